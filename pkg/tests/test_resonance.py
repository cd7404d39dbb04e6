import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from elastomode import resonance as rs
from elastomode import spectral as sp
from elastomode.errors import DiscriminantSignUnexpected, ParameterConditionViolated
from elastomode.media import ElasticMedium, Quasiparticle
from elastomode.sphere_basis import SphereGrid

MED = ElasticMedium(1.0, 1.0)
PART = Quasiparticle((0, 0, 0), 1e-2, 10.0, 1.0)
MEDIA = [MED, ElasticMedium(2.5, 0.8), ElasticMedium(-0.3, 1.2)]


@pytest.fixture(scope="module")
def tables():
    return {m: sp.varrho_table(m, SphereGrid(8), 4) for m in MEDIA}


def test_t2_static_value():
    st_ = rs.static_resonances(MED, PART, 3).by_mode()
    assert_allclose(st_[("T", 2)].roots[0].omega, -6j, rtol=1e-14)


def test_dipole_modes_excluded():
    keys = rs.static_resonances(MED, PART, 3).by_mode()
    assert ("T", 1) not in keys and ("M", 1) not in keys
    assert ("N", 1) in keys


def test_static_residuals_and_sign():
    for r in rs.static_resonances(MED, PART, 6).roots():
        assert r.residual < 1e-12
        assert r.omega.real == 0 and r.omega.imag < 0


def test_parameter_condition_names_mode():
    with pytest.raises(ParameterConditionViolated) as info:
        rs.static_resonances(MED, Quasiparticle((0, 0, 0), 0.01, 3.0, 1.0), 4)
    assert info.value.mode == ("T", 2)
    with pytest.raises(ParameterConditionViolated):
        rs.static_resonances(MED, Quasiparticle((0, 0, 0), 0.01, 10.0, -1.0), 4)


def test_zero_table_reproduces_static():
    zero = {(f, n): 0.0 for f in "TMN" for n in range(1, 7)}
    st_ = rs.static_resonances(MED, PART, 6)
    co = rs.corrected_resonances(MED, PART, 6, zero)
    assert [(r.family, r.n, r.omega) for r in co.roots()] == [(r.family, r.n, r.omega) for r in st_.roots()]
    assert {m.case for m in co.modes} == {"i"}


@pytest.mark.parametrize("medium", MEDIA)
@pytest.mark.parametrize("scale,beta", [(1.0, 1.0), (2.0, 2.5)])
@pytest.mark.parametrize("delta", [1e-2, 1e-3])
def test_corrected_residual_matrix(tables, medium, scale, beta, delta):
    alpha = scale * rs.alpha_bound(medium, 4) + 5
    rset = rs.corrected_resonances(medium, Quasiparticle((0, 0, 0), delta, alpha, beta), 4, tables[medium])
    assert rset.max_residual() <= 1e-8
    for r in rset.roots():
        e1, e2, _, _ = rs.corrected_system(r.omega.real, r.omega.imag, rset.by_mode()[(r.family, r.n)].lam, rset.by_mode()[(r.family, r.n)].varrho, alpha, beta, delta)
        assert max(abs(e1), abs(e2)) < 1e-8 * max(1.0, abs(r.omega) ** 3)


def test_case_iii_roots_purely_imaginary(tables):
    rset = rs.corrected_resonances(MED, PART, 4, tables[MED])
    for m in rset.modes:
        assert m.case == "iii"
        assert len(m.roots) == 3
        assert all(r.omega.real == 0.0 for r in m.roots)


def test_case_iii_contains_static_branch(tables):
    rset = rs.corrected_resonances(MED, Quasiparticle((0, 0, 0), 1e-3, 10.0, 1.0), 4, tables[MED])
    for m in rset.modes:
        target = rs.static_omega(m.lam, 10.0, 1.0)
        assert min(abs(r.omega.imag - target) for r in m.roots) < 1e-3 * abs(target)


def test_case_ii_with_positive_correction(tables):
    flipped = {k: -v for k, v in tables[MED].items()}
    rset = rs.corrected_resonances(MED, PART, 4, flipped)
    assert {m.case for m in rset.modes} == {"ii"}
    assert rset.max_residual() <= 1e-8
    branches = {r.branch for r in rset.roots()}
    assert "delta2" in branches


def test_case_ii_dipole_mode_with_negative_correction():
    table = {("T", 1): -0.05, ("T", 2): -0.02}
    rset = rs.corrected_resonances(MED, PART, 2, table)
    t1 = rset.by_mode()[("T", 1)]
    assert t1.case == "ii"
    assert t1.roots and rset.max_residual() <= 1e-8


def test_discriminant_sign_error_suggests_smaller_delta():
    with pytest.raises(DiscriminantSignUnexpected, match="reduce delta"):
        rs.corrected_resonances(MED, Quasiparticle((0, 0, 0), 0.7, 4.05, 0.1), 2, {("T", 2): 1e-3})


def test_static_radius_brute_force():
    st_ = rs.static_resonances(MED, PART, 3)
    brute = max(abs(r.omega.imag) for r in st_.roots())
    R, ok = rs.resonance_radius(st_)
    assert_allclose(R, brute, rtol=1e-15)
    assert_allclose(rs.static_radius(MED, PART, 3), brute, rtol=1e-14)
    assert ok


def test_self_consistency_at_quarter():
    R = rs.static_radius(MED, PART, 3)
    part = Quasiparticle((0, 0, 0), 1 / (4 * R), 10.0, 1.0)
    _, ok = rs.resonance_radius(rs.static_resonances(MED, part, 3), part)
    assert ok


def test_corrected_radius_scales_inverse_delta(tables):
    flipped = {k: -v for k, v in tables[MED].items()}
    radii = []
    for d in (0.01, 0.02):
        p = Quasiparticle((0, 0, 0), d, 10.0, 1.0)
        with pytest.warns(RuntimeWarning, match="not below 1/2"):
            radii.append(rs.resonance_radius(rs.corrected_resonances(MED, p, 4, flipped), p)[0])
    assert_allclose(radii[0] / radii[1], 2.0, rtol=0.1)


def test_simple_pole_residue():
    for r in rs.static_resonances(MED, PART, 4).roots():
        lam = sp.np_eigenvalue(MED, r.family, r.n)
        eps = 1e-6
        tau = sp.tau_static(-PART.alpha + 1j * PART.beta * (r.omega + eps), lam)
        assert_allclose(tau / eps, rs.residue_constant(lam, PART.beta), rtol=1e-8)


def test_resonance_csv(tmp_path):
    st_ = rs.static_resonances(MED, PART, 2)
    st_.to_csv(tmp_path / "r.csv", header="hdr")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "# hdr"
    assert len(lines) == 2 + len(st_.roots())
    assert float(lines[2].split(",")[6]) == st_.roots()[0].omega.imag


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.4, 0.45), st.floats(1.0, 50.0), st.floats(0.1, 5.0))
def test_static_root_solves_tau(lam, extra, beta):
    alpha = (0.5 + lam) / (0.5 - lam) + extra
    om = 1j * rs.static_omega(lam, alpha, beta)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert abs(sp.tau_static(-alpha + 1j * beta * om, lam)) < 1e-12 * (1 + alpha)
    assert om.imag < 0
