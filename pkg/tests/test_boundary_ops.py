import numpy as np
import pytest
from numpy.testing import assert_allclose

from elastomode import boundary_ops as bo
from elastomode.errors import SingularSystem
from elastomode.media import ElasticMedium, Quasiparticle, SourceSpec
from elastomode.sphere_basis import ModeIndex, SphereGrid, normalize_basis

MED = ElasticMedium(1.0, 1.0)
GRID = SphereGrid(8)
PART = Quasiparticle((0, 0, 0), 0.1, 10.0, 1.0)
SRC = SourceSpec((1.5, 0.7, -0.9), (0.3, -1.0, 0.5))


def test_static_single_layer_self_adjoint():
    assert bo.assemble_single_layer(MED, GRID, 0.0).adjoint_defect() < 1e-12


def test_single_layer_diagonal_on_t1():
    b, _ = normalize_basis(MED, ModeIndex("T", 1, 0), GRID)
    Sb = bo.assemble_single_layer(MED, GRID, 0.0).apply(b)
    scale = np.sum(GRID.weights[:, None] * Sb * b.conj())
    assert np.abs(Sb - scale * b).max() < 1e-12 * abs(scale)


def test_single_layer_scaling_law():
    d, w = 0.2, 0.9
    a = bo.assemble(MED, GRID, "S", w, radius=d).matrix
    assert_allclose(a, d * bo.assemble(MED, GRID, "S", w * d).matrix, rtol=1e-12, atol=1e-13 * np.abs(a).max())


def test_np_spectrum_in_range():
    ev = np.linalg.eigvals(bo.assemble_np(MED, GRID, 0.0).matrix)
    assert np.abs(ev.imag).max() < 1e-12
    assert ev.real.min() > -0.5
    assert ev.real.max() <= 0.5 + 1e-12


def test_np_self_adjoint():
    assert bo.assemble_np(MED, GRID, 0.0).adjoint_defect() < 1e-12


@pytest.mark.parametrize("kind", ["S", "K"])
def test_series_remainder_ratio(kind):
    rem = bo.series_remainders(MED, GRID, [0.04, 0.02])[kind]
    assert_allclose(rem[0] / rem[1], 8.0, rtol=0.05)


def test_jump_relations_t21():
    b, _ = normalize_basis(MED, ModeIndex("T", 2, 1), GRID)
    rep = bo.jump_test(MED, GRID, 0.0, b)
    assert rep.max_extrapolated < 1e-3
    assert rep.difference_residual < 1e-3
    assert rep.residual_exterior[0] > rep.residual_exterior[-1]


def test_jump_relations_at_frequency():
    b, _ = normalize_basis(MED, ModeIndex("N", 2, 0), GRID)
    assert bo.jump_test(MED, GRID, 0.3, b).max_extrapolated < 1e-3


def test_constant_vector_in_kernel():
    S = bo.assemble_single_layer(MED, GRID, 0.0)
    C = np.tile([0.3, -1.0, 2.0], (GRID.size, 1))
    y, _ = bo.invert_single_layer(S, C)
    K = bo.assemble_np(MED, GRID, 0.0)
    assert np.abs((K - 0.5 * bo.identity(GRID)).apply(y)).max() < 1e-12


def test_static_transmission_operator():
    c = PART.c(0.0)
    K = bo.assemble_np(MED, GRID, 0.0).matrix
    A = bo.assemble_A(MED, PART, GRID, 0.0).matrix
    assert_allclose(A, -(c + 1) / 2 * np.eye(K.shape[0]) + (c - 1) * K, atol=1e-12)


def test_second_order_coefficient_richardson():
    K0 = bo.assemble_np(MED, GRID, 0.0).matrix
    A1 = bo.assemble_A1(MED, GRID).matrix
    I = np.eye(K0.shape[0])

    def quotient(od):
        om = od / PART.delta
        c = PART.c(om)
        A = bo.assemble_A(MED, PART, GRID, om).matrix
        return (A - (-(c + 1) / 2 * I + (c - 1) * K0)) / ((c - 1) * od**2)

    extrapolated = 2 * quotient(0.01) - quotient(0.02)
    assert np.abs(extrapolated - A1).max() < 1e-4 * np.abs(A1).max()


def test_perturbation_remainder_ratio():
    rem = bo.perturbation_remainders(MED, PART, GRID, [0.04, 0.02])
    assert_allclose(rem[0] / rem[1], 8.0, rtol=0.05)


def test_invert_single_layer_round_trip():
    S = bo.assemble_single_layer(MED, GRID, 0.2)
    rhs = GRID.project(np.random.default_rng(1).standard_normal((GRID.size, 3)))
    phi, cond = bo.invert_single_layer(S, rhs)
    assert_allclose(S.apply(phi), rhs, atol=1e-12)
    assert cond < 1e12


def test_series_inverse_third_order():
    S = bo.assemble(MED, GRID, "S", 0.0)
    Si, R1, P1 = bo.series_inverse_coefficients(S, bo.assemble(MED, GRID, "R"), bo.assemble(MED, GRID, "P"))
    ws = [0.04, 0.02, 0.01]
    rem = [np.linalg.norm(np.linalg.inv(bo.assemble(MED, GRID, "S", w).matrix) - Si - w * R1 - w * w * P1, 2) for w in ws]
    assert bo.loglog_slope(ws, rem) > 2.9


def test_contour_r1_matches_identity():
    S = bo.assemble(MED, GRID, "S", 0.0).matrix
    R = bo.assemble(MED, GRID, "R").matrix
    Si = np.linalg.inv(S)
    ref = -Si @ R @ Si
    assert_allclose(bo.inverse_taylor_coefficient(MED, GRID, 1), ref, atol=1e-10 * np.abs(ref).max())


def test_oracle_block_matches_reduced():
    sol = bo.oracle_solve(MED, PART, SRC, GRID, 0.5)
    assert sol.agreement < 1e-8
    assert_allclose(sol.psi, sol.psi_reduced, atol=1e-8 * np.abs(sol.psi).max())


def test_asymptotic_rhs_second_order_gap():
    ds = [0.04, 0.02, 0.01]
    gaps = []
    for d in ds:
        p = Quasiparticle((0.1, -0.2, 0.3), d, 10.0, 1.0)
        gaps.append(np.abs(bo.rhs_exact(MED, p, SRC, GRID, 0.5) - bo.rhs_asymptotic(MED, p, SRC, GRID, 0.5)).max())
    assert bo.loglog_slope(ds, gaps) > 1.9


def test_singular_system_reports_condition():
    A = np.ones((4, 4))
    with pytest.raises(SingularSystem) as info:
        bo.solve_dense(A, np.ones(4))
    assert info.value.condition > 1e12


def test_binary_round_trip(tmp_path):
    op = bo.assemble(MED, SphereGrid(4), "K", 0.7)
    bo.write_binary(op, tmp_path / "k.bin")
    assert np.array_equal(bo.read_binary(tmp_path / "k.bin"), op.matrix)


def test_layer_potential_decays():
    psi = GRID.project(np.random.default_rng(5).standard_normal((GRID.size, 3)))
    d = np.array([[0.3, -0.4, 0.866]])
    vals = [R * np.linalg.norm(bo.layer_potential(MED, GRID, 0.0, psi, R * d)) for R in (4.0, 8.0, 16.0, 32.0)]
    assert max(vals) / min(vals) < 1.5
