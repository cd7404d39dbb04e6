import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from elastomode import boundary_ops as bo
from elastomode import spectral as sp
from elastomode.errors import AtResonance, ExteriorViolation, IndexOutOfRange, RealityViolation
from elastomode.media import ElasticMedium, Quasiparticle, SourceSpec
from elastomode.sphere_basis import ModeIndex, SphereGrid, normalize_basis

MED = ElasticMedium(1.0, 1.0)
GRID = SphereGrid(8)
PART = Quasiparticle((0.1, -0.2, 0.3), 0.1, 10.0, 1.0)
SRC = SourceSpec((1.5, 0.7, -0.9), (0.3, -1.0, 0.5))

# lambda = mu = 1; two independent quadrature routes agree on these to 1e-10
VARRHO_UNIT = {
    ("T", 2): -0.019047619047619,
    ("T", 3): -0.012698412698413,
    ("M", 2): -0.171851851851852,
    ("M", 3): -0.047165532879819,
    ("N", 1): -0.074074074074074,
    ("N", 2): -0.023280423280423,
}

valid_media = st.floats(0.05, 20.0).flatmap(lambda mu: st.tuples(st.floats(-0.6 * mu, 20.0), st.just(mu)))


@settings(max_examples=50, deadline=None)
@given(valid_media)
def test_dipole_eigenvalues_are_half(lm):
    m = ElasticMedium(*lm)
    assert_allclose(sp.np_eigenvalue(m, "T", 1), 0.5, rtol=1e-14)
    assert_allclose(sp.np_eigenvalue(m, "M", 1), 0.5, rtol=1e-14)


def test_t2_eigenvalue():
    assert_allclose(sp.np_eigenvalue(MED, "T", 2), 0.3, rtol=1e-15)


@pytest.mark.parametrize("lm", [(1.0, 1.0), (2.5, 0.8), (-0.3, 1.2)])
def test_m_eigenvalue_asymptote(lm):
    m = ElasticMedium(*lm)
    n = 200
    ratio = (sp.np_eigenvalue(m, "M", n) + m.kappa0) / (m.mu / (2 * (m.lam + 2 * m.mu) * n))
    assert abs(ratio - 1) < 0.05


def test_eigenvalue_index_errors():
    with pytest.raises(IndexOutOfRange):
        sp.np_eigenvalue(MED, "T", 0)
    with pytest.raises(IndexOutOfRange):
        sp.np_eigenvalue(MED, "Q", 2)


def test_rayleigh_quotients_on_coarse_grid():
    K = bo.assemble_np(MED, GRID, 0.0).matrix
    for fam in "TMN":
        for n in range(1, 5):
            b, _ = normalize_basis(MED, ModeIndex(fam, n, 0), GRID)
            c = GRID.analysis(b).reshape(-1)
            assert_allclose(np.vdot(c, K @ c).real, sp.np_eigenvalue(MED, fam, n), rtol=1e-10)


@pytest.mark.parametrize("key", sorted(VARRHO_UNIT))
def test_varrho_frozen_values(key):
    assert_allclose(sp.varrho(MED, None, GRID, *key), VARRHO_UNIT[key], rtol=1e-10)


@pytest.mark.parametrize("medium", [MED, ElasticMedium(2.5, 0.8)])
def test_varrho_two_forms_agree(medium):
    for fam in "TMN":
        for n in (1, 2, 3):
            a1, fac = sp.varrho_forms(medium, GRID, fam, n)
            assert abs(a1 - fac) < 1e-8


def test_varrho_independent_of_m():
    for fam in "TMN":
        for n in (2, 3):
            bound = n - 1 if fam == "N" else n
            vals = [sp.varrho(MED, None, GRID, fam, n, m) for m in range(-bound, bound + 1)]
            assert max(vals) - min(vals) < 1e-7


def test_varrho_t1_factored_zero():
    _, fac = sp.varrho_forms(MED, GRID, "T", 1)
    assert fac == 0


def test_varrho_reality_guard():
    with pytest.raises(RealityViolation):
        sp.varrho(MED, None, GRID, "T", 2, tol=-1.0)


def test_tau_perturbed_static_limit():
    c = PART.c(0.0)
    for lam in (0.3, -0.05, 0.2):
        assert sp.tau_perturbed(c, lam, 0.0, -0.17) == sp.tau_static(c, lam)


def test_static_modal_matches_oracle():
    sol = bo.oracle_solve(MED, PART, SRC, GRID, 0.0)
    psi = sp.solve_modal_static(MED, PART, SRC, GRID, 8).density()
    w = GRID.weights[:, None]
    err = np.sqrt(np.sum(w * np.abs(psi - sol.psi) ** 2) / np.sum(w * np.abs(sol.psi) ** 2))
    assert err < 1e-6


def test_truncation_convergence_in_n():
    sol = bo.oracle_solve(MED, PART, SRC, GRID, 0.0)
    w = GRID.weights[:, None]
    errs = []
    for N in (1, 2, 4, 8):
        psi = sp.solve_modal_static(MED, PART, SRC, GRID, N).density()
        errs.append(np.sqrt(np.sum(w * np.abs(psi - sol.psi) ** 2)))
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_modal_linear_in_polarization():
    a = sp.solve_modal_static(MED, PART, SRC, GRID, 4)
    b = sp.solve_modal_static(MED, PART, SourceSpec(SRC.s, 2 * SRC.p), GRID, 4)
    for k in a.coefficients:
        assert_allclose(b.coefficients[k], 2 * a.coefficients[k], rtol=1e-12, atol=1e-300)


def test_single_mode_right_hand_side():
    idx = ModeIndex("M", 2, 1)
    b, _ = normalize_basis(MED, idx, GRID)
    rhs, _, _ = sp.modal_coefficients(MED, GRID, b, 4)
    nonzero = [k for k, v in rhs.items() if abs(v) > 1e-12]
    assert nonzero == [idx]
    tau = sp.tau_static(PART.c(0.0), sp.np_eigenvalue(MED, "M", 2))
    assert_allclose(rhs[idx] / (PART.delta * tau), 1 / (PART.delta * tau), rtol=1e-12)


def test_at_resonance_reports_mode():
    part = Quasiparticle(PART.center, 0.1, 4.0, 1.0)  # tau_{T,2} = 0 when alpha = 4
    with pytest.raises(AtResonance) as info:
        sp.solve_modal_static(MED, part, SRC, GRID, 3)
    assert info.value.mode.family == "T" and info.value.mode.n == 2


def test_frequency_field_matches_oracle():
    pts = PART.z + np.array([[0.5, 0, 0], [0, 0.4, 0.3], [1, 1, 1]])
    om = 0.05 / PART.delta
    uo = sp.oracle_field(MED, PART, SRC, GRID, om, pts)
    um = sp.scattered_field_freq(MED, PART, SRC, GRID, 6, om, pts)
    assert np.max(np.linalg.norm(um - uo, axis=1) / np.linalg.norm(uo, axis=1)) < 1e-4


def test_scattered_field_far_decay():
    d = np.array([0.6, 0.0, 0.8])
    vals = []
    for R in (16.0, 32.0, 64.0, 128.0, 256.0):
        u = sp.scattered_field_freq(MED, PART, SRC, GRID, 4, 0.3, PART.z + R * d, tau="static")
        vals.append(R * np.linalg.norm(u))
    assert max(vals) / min(vals) < 1.5


def test_exterior_violation():
    with pytest.raises(ExteriorViolation):
        sp.scattered_field_freq(MED, PART, SRC, GRID, 4, 0.3, PART.z + 0.05)


def test_coefficient_decay_far_source():
    part = Quasiparticle((0, 0, 0), 0.1, 10.0, 1.0)
    src = SourceSpec((0.0, 0.6, 0.8), (1.0, 0.2, -0.4))
    ex = sp.solve_modal(MED, part, src, SphereGrid(14), 10, 0.3, rhs="exact", tau="static")
    assert sp.decay_exponent(ex.rhs) >= 4


def test_modal_csv(tmp_path):
    ex = sp.solve_modal_static(MED, PART, SRC, GRID, 2)
    ex.to_csv(tmp_path / "modes.csv", header="test")
    lines = (tmp_path / "modes.csv").read_text().splitlines()
    assert lines[0] == "# test"
    assert lines[1].split(",") == ["family", "n", "m", "coef_re", "coef_im", "tau_re", "tau_im"]
    assert len(lines) == 2 + len(ex.coefficients)
