import numpy as np
import pytest
from numpy.testing import assert_allclose

from elastomode import timedomain as td
from elastomode.errors import PreconditionViolated, SingularPoint
from elastomode.media import ElasticMedium, Quasiparticle, SourceSpec
from elastomode.sphere_basis import SphereGrid

MED = ElasticMedium(1.0, 1.0)
PART = Quasiparticle((0, 0, 0), 1e-2, 10.0, 1.0)
GRID = SphereGrid(8)
X = np.array([[-1.0, 1.0, 1.0]])


@pytest.fixture(scope="module")
def signal():
    return td.design_signal(3.0)


@pytest.fixture(scope="module")
def source(signal):
    return SourceSpec((1, 1, 1), (0.3, -1.0, 0.5), signal)


@pytest.fixture(scope="module")
def model(source):
    return td.ModalFrequencyModel(MED, PART, source, GRID, 6, X)


@pytest.fixture(scope="module")
def fields(source):
    return td.mode_time_fields(MED, PART, source, GRID, 6, X)


def test_transform_at_zero():
    sig = td.design_signal(2.0)
    t = np.linspace(0, 2.0, 200001)
    ref = np.trapezoid(sig.fhat(t), t) / (2 * np.pi)
    assert_allclose(sig.transform(0.0), ref, rtol=1e-9)


def test_inverse_round_trip():
    sig = td.design_signal(2.0)
    t = np.linspace(-0.5, 2.5, 13)
    assert np.abs(sig.inverse(t, 400.0) - sig.fhat(t)).max() < 1e-8


def test_paley_wiener_bound_along_ray():
    sig = td.design_signal(2.0)
    r = np.linspace(1.0, 200.0, 400)
    w = r * np.exp(-0.3j)
    bound = np.abs(sig.transform(w)) * (1 + r) ** 4 * np.exp(-sig.C1 * np.abs(w.imag))
    assert np.all(np.isfinite(bound))
    assert bound[r > 100].max() <= bound[r <= 100].max()


def test_signal_precondition():
    with pytest.raises(PreconditionViolated):
        td.design_signal(0.0)


def test_modulated_signal_conjugate_symmetric():
    sig = td.design_signal(2.0, omega0=3.0)
    w = np.array([0.7, 2.1, 5.0])
    assert_allclose(sig.transform(-w), np.conj(sig.transform(w)), rtol=1e-13)


def test_band_check_large_rho():
    sig = td.design_signal(2.0)
    assert td.band_check(sig, 200.0).eta1 < 1e-12 * sig.energy()


def test_band_check_monotone_in_support():
    # the bump height grows with C1, so compare the out-of-band fraction
    fractions = []
    for c in (1.0, 2.0, 4.0):
        sig = td.design_signal(c)
        fractions.append(td.band_check(sig, 5.0).eta1 / sig.energy())
    assert fractions[0] > fractions[1] > fractions[2]


def test_band_check_size_condition_equality():
    rep = td.band_check(td.design_signal(2.0), 8.0, eta2=0.1, delta=0.1 / 8.0)
    assert rep.size_ok
    assert_allclose(rep.delta_max, 0.1 / 8.0)
    assert_allclose(rep.rho_delta, 0.1)


def test_time_window_formula(signal):
    s = np.array([1.0, 1.0, 1.0])
    src = SourceSpec(s, (1, 0, 0), signal)
    win = td.time_window(MED, PART, src, X)
    assert_allclose(win.t_minus, 2 - PART.delta / np.sqrt(3) - 3.0, rtol=1e-14)
    assert np.all(win.t_minus < win.t_plus)


def test_time_window_collapses_to_travel_times(signal):
    tiny = Quasiparticle((0, 0, 0), 1e-12, 10.0, 1.0)
    src = SourceSpec((1, 1, 1), (1, 0, 0), signal)
    win = td.time_window(MED, tiny, src, X, C1=0.0)
    d = np.sqrt(3) * 2
    assert_allclose([win.t_minus[0], win.t_plus[0]], [d / MED.cp, d / MED.cs], rtol=1e-10)


def test_incident_matches_stokes_and_is_causal():
    sig = td.design_signal(2.0)
    src = SourceSpec((1, 1, 1), (0.3, -1.0, 0.5), sig)
    x = np.array([0.5, -1.2, 0.7])
    r = np.linalg.norm(x - src.s)
    t = np.linspace(0.0, 6.0, 25)
    a = td.incident_time_field(MED, src, x, t)
    b = td.stokes_time_field(MED, src, x, t)
    assert np.abs(a - b).max() < 1e-8 * np.abs(b).max()
    early = t < r / MED.cp
    assert np.abs(a[early]).max() < 1e-9


def test_shear_term_scaling():
    sig = td.design_signal(2.0)
    p = np.array([0.0, 0.0, 1.0])
    terms = []
    for r in (1.5, 3.0):
        x = np.array([r, 0.0, 0.0])
        t = r / MED.cs + 1.0
        terms.append(-sig.fhat(np.array([t - r / MED.cs]))[0] * p / (4 * np.pi * MED.mu * r))
    assert_allclose(terms[1], terms[0] / 2, rtol=1e-15)


def test_incident_singular_at_source():
    src = SourceSpec((1, 1, 1), (1, 0, 0), td.design_signal(1.0))
    with pytest.raises(SingularPoint):
        td.incident_time_field(MED, src, np.array([1.0, 1.0, 1.0]), [0.5])


def test_band_limited_field_is_real(source, model):
    t = np.linspace(5.0, 9.0, 5)
    P = td.truncated_scattered_time(MED, PART, source, GRID, 6, 5.0, X, t, model=model)
    assert np.abs(P.imag).max() < 1e-9 * np.abs(P).max()


def test_band_limited_field_linear_in_force(source, model):
    t = np.array([6.5, 8.0])
    P1 = td.truncated_scattered_time(MED, PART, source, GRID, 6, 4.0, X, t, model=model)
    double = SourceSpec(source.s, 2 * source.p, source.signal)
    P2 = td.truncated_scattered_time(MED, PART, double, GRID, 6, 4.0, X, t)
    assert_allclose(P2, 2 * P1, rtol=1e-7, atol=1e-9 * np.abs(P1).max())


def test_mode_terms_decay_exactly(fields):
    for f in fields:
        a, b = f.term([7.0])[0], f.term([8.0])[0]
        nz = np.abs(a) > 0
        assert_allclose(b[nz] / a[nz], np.exp(f.omega2), rtol=1e-12)


def test_decay_rate_fit_recovers_omega2(fields):
    f = max(fields, key=lambda m: np.abs(m.weight))
    t = np.linspace(7.0, 9.0, 21)
    assert_allclose(td.decay_rate(t, f.term(t)[:, 0, 0]), f.omega2, rtol=1e-10)


def test_dipole_modes_skipped(fields):
    modes = {(f.mode.family, f.mode.n) for f in fields}
    assert ("T", 1) not in modes and ("M", 1) not in modes
    assert ("T", 2) in modes and ("N", 1) in modes


def test_normalized_decomposition(source, fields):
    win = td.time_window(MED, PART, source, X)
    t = win.t_plus + np.array([0.0, 0.5, 2.0])
    for f in fields:
        assert_allclose(f.normalized_term(t, win.t_plus), f.term(t), rtol=1e-10, atol=1e-300)


def test_residue_expansion_requires_window(source, fields):
    win = td.time_window(MED, PART, source, X)
    with pytest.raises(PreconditionViolated):
        td.residue_expansion(MED, PART, source, GRID, 6, X, win.t_plus - 1.0, fields=fields)
    res = td.residue_expansion(MED, PART, source, GRID, 6, X, win.t_plus + 1.0, fields=fields)
    assert_allclose(sum(res.per_mode().values()), res.total)


def test_closed_contour_equals_residue_sum(source, model, fields):
    # with every enclosed pole included, P_rho plus the lower arc is the residue sum
    rho = 9.3
    win = td.time_window(MED, PART, source, X)
    t = win.t_plus[0] + np.array([0.0, 0.3, 1.0])
    P = td.truncated_scattered_time(MED, PART, source, GRID, 6, rho, X, t, model=model)
    arc = td.arc_remainder(model, rho, t)
    inside = [f for f in fields if abs(f.omega2) < rho]
    R = td.residue_expansion(MED, PART, source, GRID, 6, X, t, fields=inside).total
    rel = np.linalg.norm(P + arc - R, axis=-1) / np.linalg.norm(R, axis=-1)
    assert rel.max() < 1e-8
