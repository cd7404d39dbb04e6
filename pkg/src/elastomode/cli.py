"""Command-line front end.

``elastomode <spectrum|resonances|scatter|validate> --config FILE [--set k=v]... [--out DIR]``

Every run reads an INI file (missing keys fall back to :data:`DEFAULT_CONFIG`),
applies ``--set section.key=value`` overrides, validates the physical
parameters and only then computes. Output files are written at the end of a
successful run, each starting with a header line naming the command and the
config hash; reals are printed with 17 significant digits.
"""
import argparse
import configparser
import hashlib
import io
import json
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import boundary_ops as bo
from . import resonance as rs
from . import spectral as sp
from . import timedomain as td
from .errors import ConfigError, DegreeTooLow, ElastomodeError, ParameterConditionViolated
from .media import ElasticMedium, Quasiparticle, SourceSpec, validate_medium
from .sphere_basis import ModeIndex, SphereGrid, component_degree, inner_product, mode_indices, normalize_basis

__all__ = ["DEFAULT_CONFIG", "RunConfig", "load_config", "main", "run_checks", "CHECKS"]

DEFAULT_CONFIG = """\
[medium]
lam = 1.0
mu = 1.0

[particle]
center = 0, 0, 0
radius = 0.01
alpha = 10.0
beta = 1.0

[source]
location = 1, 1, 1
polarization = 0.3, -1, 0.5
c1 = 3.0
omega0 = 0.0

[grid]
degree = 10

[model]
n = 6
rho = auto
eta1 = 1e-2
eta2 = 0.2

[spectrum]
degrees = 20, 30, 40
nmax = 4
eig_degree = 12

[resonances]
corrected = yes
deltas =

[scatter]
mode = freq
omega_delta = 0.05
points = -1 1 1
tau = second_order
time_span = 10
samples_per_unit = 40

[validate]
filter =
"""


def _fmt(v):
    return f"{float(v):.17g}"


@dataclass
class RunConfig:
    """Parsed and validated configuration.

    Attributes
    ----------
    parser : configparser.ConfigParser
        Merged configuration (defaults, file, overrides).
    digest : str
        First 16 hex digits of the SHA-256 of the canonical configuration.
    """

    parser: configparser.ConfigParser
    digest: str
    path: str
    lines: dict = field(default_factory=dict)
    medium: ElasticMedium = None
    particle: Quasiparticle = None
    source: SourceSpec = None

    def get(self, section, key):
        return self.parser.get(section, key)

    def _where(self, section, key):
        ln = self.lines.get((section, key))
        return f"{self.path}:{ln}" if ln else f"{self.path}"

    def float(self, section, key):
        raw = self.get(section, key)
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{self._where(section, key)}: [{section}] {key}: expected a number, got {raw!r}") from None

    def int(self, section, key):
        raw = self.get(section, key)
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{self._where(section, key)}: [{section}] {key}: expected an integer, got {raw!r}") from None

    def bool(self, section, key):
        try:
            return self.parser.getboolean(section, key)
        except ValueError:
            raise ConfigError(f"{self._where(section, key)}: [{section}] {key}: expected yes/no") from None

    def floats(self, section, key, size=None):
        raw = self.get(section, key).replace(",", " ").split()
        try:
            vals = [float(v) for v in raw]
        except ValueError:
            raise ConfigError(f"{self._where(section, key)}: [{section}] {key}: expected numbers, got {raw!r}") from None
        if size is not None and len(vals) != size:
            raise ConfigError(f"{self._where(section, key)}: [{section}] {key}: expected {size} numbers, got {len(vals)}")
        return vals

    def points(self, section, key):
        raw = self.get(section, key).strip()
        if not raw:
            return np.zeros((0, 3))
        rows = []
        for chunk in raw.split(";"):
            vals = chunk.replace(",", " ").split()
            if len(vals) != 3:
                raise ConfigError(f"{self._where(section, key)}: [{section}] {key}: each point needs 3 coordinates")
            try:
                rows.append([float(v) for v in vals])
            except ValueError:
                raise ConfigError(f"{self._where(section, key)}: [{section}] {key}: bad coordinate in {chunk!r}") from None
        return np.array(rows)

    def header(self, command):
        return f"elastomode {command} config={self.digest}"


def _line_numbers(text):
    out, section = {}, None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
        elif section and "=" in s and not s.startswith(("#", ";")):
            out[(section, s.split("=", 1)[0].strip().lower())] = i
    return out


def _canonical(parser):
    lines = []
    for sec in sorted(parser.sections()):
        for k in sorted(parser[sec]):
            lines.append(f"{sec}.{k}={parser[sec][k].strip()}")
    return "\n".join(lines)


def load_config(path=None, sets=(), text=None):
    """Merge defaults, a config file and ``section.key=value`` overrides.

    Raises
    ------
    ConfigError
        On parse errors (with line numbers), malformed overrides, or invalid
        physical parameters.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.read_string(DEFAULT_CONFIG)
    lines = {}
    label = path or "<config>"
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"{path}: file not found")
        with open(path) as fh:
            text = fh.read()
    if text is not None:
        try:
            parser.read_string(text, source=label)
        except configparser.Error as exc:
            raise ConfigError(f"{label}: {exc}") from None
        lines = _line_numbers(text)
    for item in sets:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"--set {item!r}: expected section.key=value")
        key, value = item.split("=", 1)
        sec, opt = key.split(".", 1)
        if not parser.has_section(sec):
            raise ConfigError(f"--set {item!r}: unknown section [{sec}]")
        parser.set(sec, opt.strip().lower(), value.strip())
    digest = hashlib.sha256(_canonical(parser).encode()).hexdigest()[:16]
    cfg = RunConfig(parser, digest, label, lines)
    med = ElasticMedium(cfg.float("medium", "lam"), cfg.float("medium", "mu"))
    report = validate_medium(med)
    if not report.valid:
        raise ConfigError("invalid medium: " + "; ".join(report.violations))
    cfg.medium = med
    try:
        cfg.particle = Quasiparticle(
            cfg.floats("particle", "center", 3),
            cfg.float("particle", "radius"),
            cfg.float("particle", "alpha"),
            cfg.float("particle", "beta"),
        )
        sig = td.design_signal(cfg.float("source", "c1"), cfg.float("source", "omega0"))
        cfg.source = SourceSpec(cfg.floats("source", "location", 3), cfg.floats("source", "polarization", 3), sig)
        cfg.source.check_exterior(cfg.particle)
    except ElastomodeError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid parameters: {exc}") from None
    if cfg.int("grid", "degree") < 2:
        raise ConfigError(f"{cfg._where('grid', 'degree')}: [grid] degree must be at least 2")
    if cfg.int("model", "n") < 1:
        raise ConfigError(f"{cfg._where('model', 'n')}: [model] n must be positive")
    return cfg


# ----------------------------------------------------------------------------
# output helpers


class Outputs:
    """Buffered output files, written only when the command succeeds."""

    def __init__(self, cfg, command):
        self.cfg, self.command = cfg, command
        self.files = {}

    def csv(self, name, columns, rows):
        buf = io.StringIO()
        buf.write(f"# {self.cfg.header(self.command)}\n")
        buf.write(",".join(columns) + "\n")
        for row in rows:
            buf.write(",".join(_fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row) + "\n")
        self.files[name] = buf.getvalue()

    def json(self, name, data):
        payload = {"header": self.cfg.header(self.command), "command": self.command, "config_hash": self.cfg.digest}
        payload.update(data)
        self.files[name] = json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"

    def write(self, outdir):
        os.makedirs(outdir, exist_ok=True)
        for name, text in sorted(self.files.items()):
            with open(os.path.join(outdir, name), "w") as fh:
                fh.write(text)
        return sorted(self.files)


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(type(v))


# ----------------------------------------------------------------------------
# commands


def cmd_spectrum(cfg):
    """Closed-form NP eigenvalues against Rayleigh quotients and the assembled spectrum."""
    out = Outputs(cfg, "spectrum")
    med = cfg.medium
    degrees = [int(v) for v in cfg.floats("spectrum", "degrees")]
    nmax = cfg.int("spectrum", "nmax")
    rows, conv = [], []
    last = {}
    for deg in degrees:
        g = SphereGrid(deg)
        K = bo.cached_operator(med, g, "K", 0.0).matrix
        errs = []
        for idx in mode_indices(nmax):
            b, _ = normalize_basis(med, idx, g)
            c = g.analysis(b).reshape(-1)
            q = complex(np.vdot(c, K @ c))
            exact = sp.np_eigenvalue(med, idx.family, idx.n)
            e = abs(q - exact) / abs(exact)
            errs.append(e)
            rows.append([deg, idx.family, idx.n, idx.m, exact, q.real, q.imag, e])
            last[(idx.family, idx.n)] = max(last.get((idx.family, idx.n), 0.0), e) if deg == degrees[-1] else 0.0
        conv.append([deg, max(errs), float(np.mean(errs))])
    ge = SphereGrid(cfg.int("spectrum", "eig_degree"))
    Ke = bo.cached_operator(med, ge, "K", 0.0).matrix
    ev = np.linalg.eigvalsh(0.5 * (Ke + Ke.conj().T))
    eig_rows = []
    for f in ("T", "M", "N"):
        for n in range(1, nmax + 1):
            exact = sp.np_eigenvalue(med, f, n)
            j = int(np.argmin(np.abs(ev - exact)))
            mult = int(np.sum(np.abs(ev - exact) < 1e-8 * max(1.0, abs(exact))))
            eig_rows.append([f, n, exact, ev[j], abs(ev[j] - exact), mult])
    out.csv("spectrum_rayleigh.csv", ["degree", "family", "n", "m", "closed_form", "rayleigh_re", "rayleigh_im", "rel_err"], rows)
    out.csv("spectrum_convergence.csv", ["degree", "max_rel_err", "mean_rel_err"], conv)
    out.csv("spectrum_eigen.csv", ["family", "n", "closed_form", "nearest_eigenvalue", "abs_diff", "multiplicity"], eig_rows)
    maxes = [c[1] for c in conv]
    mono = all(b < a for a, b in zip(maxes, maxes[1:]))
    out.json(
        "spectrum.json",
        {
            "degrees": degrees,
            "max_rel_err": maxes,
            "monotone_decrease": mono,
            "at_roundoff_floor": bool(max(maxes) < 1e-10),
            "eig_degree": ge.degree,
            "kappa0": med.kappa0,
        },
    )
    return out, 0


def _rho_table(cfg, N):
    deg = max(cfg.int("grid", "degree"), N + 1)
    return sp.varrho_table(cfg.medium, SphereGrid(deg), N)


def _nearest_static(mode, particle):
    target = 1j * rs.static_omega(mode.lam, particle.alpha, particle.beta)
    return min(mode.roots, key=lambda r: abs(r.omega - target))


def cmd_resonances(cfg):
    """Static and corrected resonance tables with the self-consistency report."""
    out = Outputs(cfg, "resonances")
    med, part = cfg.medium, cfg.particle
    N = cfg.int("model", "n")
    st = rs.static_resonances(med, part, N)
    cols = ["family", "n", "k", "case", "branch", "omega_re", "omega_im", "residual"]

    def rows_of(rset):
        return [[r.family, r.n, r.k, r.case, r.branch, r.omega.real, r.omega.imag, r.residual] for r in rset.roots()]

    out.csv("resonances_static.csv", cols, rows_of(st))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        R, ok = rs.resonance_radius(st, part)
    summary = {
        "delta": part.delta,
        "alpha_bound": rs.alpha_bound(med, N),
        "static": {
            "R": R,
            "R_closed_form": rs.static_radius(med, part, N),
            "R_delta": R * part.delta,
            "self_consistent": ok,
            "max_residual": st.max_residual(),
        },
    }
    if cfg.bool("resonances", "corrected"):
        table = _rho_table(cfg, N)
        deltas = cfg.floats("resonances", "deltas") or [part.delta]
        corr = {}
        for d in deltas:
            p = Quasiparticle(part.center, d, part.alpha, part.beta)
            cs = rs.corrected_resonances(med, p, N, table)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                Rc, okc = rs.resonance_radius(cs, p)
            name = "resonances_corrected.csv" if len(deltas) == 1 else f"resonances_corrected_delta{d:g}.csv"
            out.csv(name, cols, rows_of(cs))
            near = max(abs(_nearest_static(m, p).omega) for m in cs.modes)
            corr[f"{d:.17g}"] = {
                "R": Rc,
                "R_delta": Rc * d,
                "self_consistent": okc,
                "R_static_branch": near,
                "max_residual": cs.max_residual(),
            }
        summary["corrected"] = corr
        summary["varrho"] = {f"{f}{n}": v for (f, n), v in sorted(table.items())}
    out.json("resonances.json", summary)
    return out, 0


def cmd_scatter(cfg):
    """Frequency-domain fields against the dense oracle, or time traces against the band-limited oracle."""
    mode = cfg.get("scatter", "mode").strip()
    pts = cfg.points("scatter", "points")
    if pts.shape[0] == 0:
        raise ConfigError("[scatter] points: observation list is empty")
    if np.any(cfg.particle.contains(pts)):
        raise ConfigError("[scatter] points: observation point inside the particle")
    if mode == "freq":
        return _scatter_freq(cfg, pts)
    if mode == "time":
        return _scatter_time(cfg, pts)
    raise ConfigError(f"[scatter] mode must be freq or time, got {mode!r}")


def _scatter_freq(cfg, pts):
    out = Outputs(cfg, "scatter")
    med, part, src = cfg.medium, cfg.particle, cfg.source
    g = SphereGrid(cfg.int("grid", "degree"))
    N = cfg.int("model", "n")
    tau = cfg.get("scatter", "tau").strip()
    table = _rho_table(cfg, N) if tau == "second_order" else None
    rows, summary = [], {"omega_delta": [], "max_rel_err": []}
    for k, od in enumerate(cfg.floats("scatter", "omega_delta")):
        om = od / part.delta
        exp = sp.solve_modal(med, part, src, g, N, om, rhs="exact", tau=tau, rho_table=table)
        um = sp.field_from_density(med, part, g, om, exp.density(), pts)
        uo = sp.oracle_field(med, part, src, g, om, pts)
        errs = np.linalg.norm(um - uo, axis=1) / np.linalg.norm(uo, axis=1)
        for i, x in enumerate(pts):
            rows.append(
                [od, i, *x]
                + [v for c in range(3) for v in (um[i, c].real, um[i, c].imag)]
                + [v for c in range(3) for v in (uo[i, c].real, uo[i, c].imag)]
                + [errs[i]]
            )
        coef_rows = [
            [key.family, key.n, key.m, c.real, c.imag, exp.tau[key].real, exp.tau[key].imag]
            for key, c in sorted(exp.coefficients.items())
        ]
        out.csv(f"coefficients_{k}.csv", ["family", "n", "m", "coef_re", "coef_im", "tau_re", "tau_im"], coef_rows)
        summary["omega_delta"].append(od)
        summary["max_rel_err"].append(float(errs.max()))
    cols = ["omega_delta", "point", "x", "y", "z"]
    cols += [f"modal_{c}_{p}" for c in "xyz" for p in ("re", "im")]
    cols += [f"oracle_{c}_{p}" for c in "xyz" for p in ("re", "im")]
    cols += ["rel_err"]
    out.csv("field_freq.csv", cols, rows)
    out.json("scatter.json", {"mode": "freq", "tau": tau, **summary})
    return out, 0


def _resolve_rho(cfg):
    raw = cfg.get("model", "rho").strip().lower()
    if raw == "auto":
        return rs.static_radius(cfg.medium, cfg.particle, cfg.int("model", "n"))
    return cfg.float("model", "rho")


def _scatter_time(cfg, pts):
    out = Outputs(cfg, "scatter")
    med, part, src = cfg.medium, cfg.particle, cfg.source
    g = SphereGrid(max(cfg.int("grid", "degree"), cfg.int("model", "n") + 1))
    N = cfg.int("model", "n")
    rho = _resolve_rho(cfg)
    span = cfg.float("scatter", "time_span")
    spu = cfg.int("scatter", "samples_per_unit")
    band = td.band_check(src.signal, rho, eta1=cfg.float("model", "eta1"), eta2=cfg.float("model", "eta2"), delta=part.delta)
    win = td.time_window(med, part, src, pts)
    fields = td.mode_time_fields(med, part, src, g, N, pts)
    model = td.ModalFrequencyModel(med, part, src, g, N, pts)
    rows, points_meta = [], []
    for i, x in enumerate(pts):
        tp = float(win.t_plus[i])
        t = np.linspace(tp, tp + span, int(span * spu) + 1)
        P = td.truncated_scattered_time(med, part, src, g, N, rho, pts, t, model=model)[:, i]
        R = td.residue_expansion(med, part, src, g, N, pts, t, fields=fields, enforce_window=False).total[:, i]
        err = np.linalg.norm(R - P, axis=1)
        mags = np.array([np.linalg.norm(f.term(t)[:, i], axis=1) for f in fields])
        for j in range(t.size):
            rows.append(
                [i, t[j]]
                + [v for c in range(3) for v in (R[j, c].real, R[j, c].imag)]
                + [v for c in range(3) for v in (P[j, c].real, P[j, c].imag)]
                + [err[j]]
                + list(mags[:, j])
            )
        cmp_ = td.oracle_comparison(med, part, src, g, N, rho, x[None], samples_per_unit=spu)
        points_meta.append(
            {
                "point": x.tolist(),
                "t0_minus": float(win.t_minus[i]),
                "t0_plus": tp,
                "quiescent_ratio": cmp_.quiescent_ratio,
                "l2_relative": cmp_.l2_relative,
                "t1": cmp_.t1,
                "error_ratio_t_2t": cmp_.error_ratio,
            }
        )
    cols = ["point", "t"]
    cols += [f"residue_{c}_{p}" for c in "xyz" for p in ("re", "im")]
    cols += [f"oracle_{c}_{p}" for c in "xyz" for p in ("re", "im")]
    cols += ["abs_err"] + [f"mode_{f.mode.family}{f.mode.n}_{f.mode.m}" for f in fields]
    out.csv("traces_time.csv", cols, rows)
    meta = {
        "mode": "time",
        "rho": rho,
        "R": rs.static_radius(med, part, N),
        "eta1": band.eta1,
        "eta1_ok": band.ok,
        "eta2": band.rho_delta,
        "delta_max": band.delta_max,
        "C1": src.signal.C1,
        "points": points_meta,
    }
    out.json("window.json", meta)
    return out, 0


# ----------------------------------------------------------------------------
# validation suite


def _check_orthonormality(cfg, g):
    med = cfg.medium
    nmax = min(4, g.band)
    modes = [k for k in mode_indices(nmax) if component_degree(k.family, k.n) <= g.band]
    B = [normalize_basis(med, k, g)[0] for k in modes]
    G = np.array([[inner_product(a, b, g) for b in B] for a in B])
    return float(np.abs(G - np.eye(len(B))).max()), 1e-10, "le"


def _check_jump(cfg, g, family, n):
    b, _ = normalize_basis(cfg.medium, ModeIndex(family, n, 1), g)
    return bo.jump_test(cfg.medium, g, 0.0, b).max_extrapolated, 1e-3, "le"


def _check_series(cfg, g, kind):
    ws = [0.04, 0.02, 0.01]
    return bo.loglog_slope(ws, bo.series_remainders(cfg.medium, g, ws)[kind]), 2.9, "ge"


def _check_perturbation(cfg, g):
    ods = [0.04, 0.02, 0.01]
    part = Quasiparticle(cfg.particle.center, 0.1, cfg.particle.alpha, cfg.particle.beta)
    return bo.loglog_slope(ods, bo.perturbation_remainders(cfg.medium, part, g, ods)), 2.9, "ge"


def _check_scaling(cfg, g):
    med, d = cfg.medium, 0.1
    err = 0.0
    for kind, factor in (("S", d), ("K", 1.0)):
        a = bo.assemble(med, g, kind, 1.3, radius=d).matrix
        b = factor * bo.assemble(med, g, kind, 1.3 * d).matrix
        err = max(err, float(np.abs(a - b).max() / np.abs(b).max()))
    return err, 1e-10, "le"


def _check_r1(cfg, g):
    med = cfg.medium
    S = bo.cached_operator(med, g, "S", 0.0).matrix
    R = bo.cached_operator(med, g, "R").matrix
    Si = np.linalg.inv(S)
    ref = -Si @ R @ Si
    got = bo.inverse_taylor_coefficient(med, g, 1)
    return float(np.abs(got - ref).max() / np.abs(ref).max()), 1e-10, "le"


def _check_speeds(cfg, g):
    rng = np.random.default_rng(7)
    worst = np.inf
    for _ in range(100):
        mu = rng.uniform(0.1, 10.0)
        lam = rng.uniform(-2 * mu / 3 + 1e-6, 10.0)
        m = ElasticMedium(lam, mu)
        worst = min(worst, m.cp - m.cs)
    return float(worst), 0.0, "ge"


CHECKS = [
    ("orthonormality", _check_orthonormality),
    ("jump:T2", lambda c, g: _check_jump(c, g, "T", 2)),
    ("jump:N8", lambda c, g: _check_jump(c, g, "N", 8)),
    ("slope:S-series", lambda c, g: _check_series(c, g, "S")),
    ("slope:K-series", lambda c, g: _check_series(c, g, "K")),
    ("slope:perturbation", _check_perturbation),
    ("scaling:radius", _check_scaling),
    ("identity:R1", _check_r1),
    ("speeds:cp>=cs", _check_speeds),
]


def run_checks(cfg, filt=""):
    """Run the invariant suite; returns a list of ``(name, value, threshold, passed, note)``."""
    g = SphereGrid(cfg.int("grid", "degree"))
    results = []
    for name, fn in CHECKS:
        if filt and filt not in name:
            continue
        try:
            value, thr, rel = fn(cfg, g)
            ok = value <= thr if rel == "le" else value >= thr
            results.append((name, value, thr, bool(ok), ""))
        except DegreeTooLow as exc:
            results.append((name, float("nan"), float("nan"), False, f"grid too coarse: {exc}"))
    return results


def cmd_validate(cfg, filt=None):
    """Pass/fail matrix of the invariant suite; nonzero status on any failure."""
    if filt is None:
        filt = cfg.get("validate", "filter").strip()
    out = Outputs(cfg, "validate")
    res = run_checks(cfg, filt)
    width = max([len(r[0]) for r in res] + [5])
    for name, value, thr, ok, note in res:
        line = f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  value={value:.6g}  threshold={thr:.3g}"
        print(line + (f"  ({note})" if note else ""))
    out.csv("validate.csv", ["check", "value", "threshold", "passed", "note"], [list(r) for r in res])
    failed = [r[0] for r in res if not r[3]]
    print(f"{len(res) - len(failed)}/{len(res)} checks passed")
    return out, 1 if failed else 0


COMMANDS = {"spectrum": cmd_spectrum, "resonances": cmd_resonances, "scatter": cmd_scatter, "validate": cmd_validate}


def build_parser():
    ap = argparse.ArgumentParser(prog="elastomode", description="Elastic quasiparticle modal analysis.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="INI configuration file")
    ap.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override a config value")
    ap.add_argument("--out", help="output directory (default: ./elastomode_out)")
    ap.add_argument("--filter", default=None, help="validate: run only checks whose name contains this text")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "validate":
            out, status = cmd_validate(cfg, args.filter)
        else:
            out, status = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParameterConditionViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ElastomodeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    names = out.write(args.out or "elastomode_out")
    for n in names:
        print(os.path.join(args.out or "elastomode_out", n))
    return status


if __name__ == "__main__":
    sys.exit(main())
