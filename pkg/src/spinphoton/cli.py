"""Command line entry point: ``spinphoton <command> config.yaml``.

Every command reads one YAML scenario file, fills in defaults, echoes the
resolved configuration into the output directory and writes CSV/JSON data
there.  Exit codes: 0 success, 1 invalid configuration, 2 a numerical guard
tripped (for example energy drift above ``observables.drift_threshold``).
The environment variable ``SPINPHOTON_THREADS`` caps BLAS threads.
"""

from __future__ import annotations

import argparse
import copy
import csv
import itertools
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np
import yaml
from threadpoolctl import threadpool_limits

from . import dynamics, observables, quasimode, stationary
from .mode_space import CutoffProfile, ModeSpace, build_grid, build_grid_for
from .spin_algebra import SpinConfig, basis_state, product_state

log = logging.getLogger("spinphoton")

THREADS_ENV = "SPINPHOTON_THREADS"

DEFAULTS = {
    "seed": 0,
    "h": 1.0,
    "grid": {"radial_order": 16, "angular_order": 6, "angular": "gauss", "r_min": None, "r_max": None},
    "cutoff": {"kind": "default", "rho_cut": 0.1, "scale": 1.0, "eps": 0.1},
    "particles": {"positions": [], "beta": [0.0, 0.0, 1.0]},
    "initial": {
        "field": {"kind": "zero", "amplitude": 1.0, "modes": []},
        "spin": {"subset": [], "directions": None, "amplitudes": None},
    },
    "integrator": {"method": "rk4", "dt": 1e-3, "t_final": 1.0, "record_every": 10},
    "observables": {"probes": None, "dx": 1e-3, "residuals": True, "drift_threshold": 1e-6},
    "fixed_point": {"subsets": None, "tol": 1e-8},
    "ising": {"eps": [0.2, 0.1, 0.05], "radial_order": 64, "angular_order": 72},
    "quasimode": {"D": 16, "max_sector": 3, "p_max": 1, "h_list": [0.1, 0.01, 0.001], "oracle_h": None},
    "field_map": {"source": "field_B", "lo": [-2.0, -2.0, 0.0], "hi": [2.0, 2.0, 0.0], "n": [5, 5, 1]},
    "output": {"dir": "out"},
}


class ConfigError(Exception):
    """Invalid scenario file; the message names the offending field."""


class NumericalGuardError(Exception):
    """A run finished but violated a configured numerical threshold."""


# -- configuration --------------------------------------------------------


def _node_lines(node, path=(), out=None):
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            p = path + (k.value,)
            out[p] = k.start_mark.line + 1
            _node_lines(v, p, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            out[path + (i,)] = v.start_mark.line + 1
            _node_lines(v, path + (i,), out)
    return out


def _merge(base, over, path=()):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if k not in base:
            raise ConfigError(f"{'.'.join(path + (k,))}: unknown key")
        if isinstance(base[k], dict) and isinstance(v, dict):
            out[k] = _merge(base[k], v, path + (k,))
        else:
            out[k] = v
    return out


class Config:
    """Resolved scenario plus the source line of every key for diagnostics."""

    def __init__(self, data: dict, lines: dict | None = None, source: str = "<config>"):
        self.data = data
        self.lines = lines or {}
        self.source = source

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read ({exc.strerror})") from exc
        try:
            node = yaml.compose(text)
            raw = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        lines = _node_lines(node) if node is not None else {}
        try:
            data = _merge(DEFAULTS, raw)
        except ConfigError as exc:
            key = str(exc).split(":")[0]
            line = lines.get(tuple(key.split(".")))
            raise ConfigError(f"{path}:{line}: {exc}" if line else f"{path}: {exc}") from None
        return cls(data, lines, str(path))

    def fail(self, key: str, msg: str):
        line = self.lines.get(tuple(key.split(".")))
        where = f"{self.source}:{line}" if line else self.source
        raise ConfigError(f"{where}: {key}: {msg}")

    def get(self, key: str):
        cur = self.data
        for part in key.split("."):
            cur = cur[part]
        return cur

    def number(self, key, positive=False, nonneg=False, integer=False):
        v = self.get(key)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(key, f"expected a number, got {v!r}")
        if integer and int(v) != v:
            self.fail(key, f"expected an integer, got {v!r}")
        if positive and not v > 0:
            self.fail(key, f"must be > 0, got {v!r}")
        if nonneg and v < 0:
            self.fail(key, f"must be >= 0, got {v!r}")
        return int(v) if integer else float(v)

    def vectors(self, key, allow_empty=True):
        v = self.get(key)
        try:
            arr = np.array(v, dtype=float)
        except (TypeError, ValueError):
            self.fail(key, "expected a list of 3-vectors")
        if arr.size == 0 and allow_empty:
            return arr.reshape(0, 3)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != 3:
            self.fail(key, f"expected a list of 3-vectors, got shape {arr.shape}")
        return arr

    def echo(self, outdir: Path):
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "config.yaml", "w") as fh:
            yaml.safe_dump(self.data, fh, sort_keys=False)


# -- scenario construction ------------------------------------------------


def build_space(cfg: Config) -> ModeSpace:
    kind = cfg.get("cutoff.kind")
    if kind not in ("default", "plateau", "zero"):
        cfg.fail("cutoff.kind", f"must be default, plateau or zero, got {kind!r}")
    chi = CutoffProfile(
        kind,
        rho_cut=cfg.number("cutoff.rho_cut", positive=True),
        scale=cfg.number("cutoff.scale", positive=True),
        eps=cfg.number("cutoff.eps", positive=True),
    )
    ro = cfg.number("grid.radial_order", integer=True)
    ao = cfg.number("grid.angular_order", integer=True)
    if ro < 2:
        cfg.fail("grid.radial_order", f"must be >= 2, got {ro}")
    if ao < 6:
        cfg.fail("grid.angular_order", f"must be >= 6, got {ao}")
    ang = cfg.get("grid.angular")
    if ang not in ("gauss", "lebedev"):
        cfg.fail("grid.angular", f"must be gauss or lebedev, got {ang!r}")
    lo, hi = cfg.get("grid.r_min"), cfg.get("grid.r_max")
    if lo is None and hi is None:
        grid = build_grid_for(chi, ro, ao, ang)
    else:
        slo, shi = chi.support()
        lo = slo if lo is None else cfg.number("grid.r_min", nonneg=True)
        hi = shi if hi is None else cfg.number("grid.r_max", positive=True)
        if not lo < hi:
            cfg.fail("grid.r_max", f"must exceed r_min={lo}")
        grid = build_grid(ro, ao, lo, hi, ang)
    return ModeSpace(grid, chi)


def build_config(cfg: Config) -> SpinConfig:
    pos = cfg.vectors("particles.positions")
    beta = np.array(cfg.get("particles.beta"), dtype=float)
    if beta.shape != (3,):
        cfg.fail("particles.beta", "expected a 3-vector")
    try:
        return SpinConfig(pos, beta)
    except ValueError as exc:
        cfg.fail("particles.positions", str(exc))


def initial_spin(cfg: Config, config: SpinConfig):
    amps = cfg.get("initial.spin.amplitudes")
    dirs = cfg.get("initial.spin.directions")
    if amps is not None:
        a = np.array([complex(*z) if isinstance(z, (list, tuple)) else complex(z) for z in amps])
        if len(a) != 2**config.N:
            cfg.fail("initial.spin.amplitudes", f"need {2**config.N} amplitudes, got {len(a)}")
        nrm = np.linalg.norm(a)
        if nrm == 0:
            cfg.fail("initial.spin.amplitudes", "amplitudes are all zero")
        return a / nrm
    if config.N == 0:
        return np.ones(1, dtype=complex)
    if dirs is not None:
        d = cfg.vectors("initial.spin.directions", allow_empty=False)
        if len(d) != config.N or np.any(np.linalg.norm(d, axis=1) == 0):
            cfg.fail("initial.spin.directions", f"need {config.N} nonzero 3-vectors")
        return product_state(d)
    E = cfg.get("initial.spin.subset")
    if not isinstance(E, list) or any(not isinstance(i, int) or not 0 <= i < config.N for i in E):
        cfg.fail("initial.spin.subset", f"expected particle indices in [0, {config.N})")
    if config.beta_norm == 0:
        cfg.fail("particles.beta", "a subset spin state needs a nonzero beta")
    return basis_state(E, config.beta, config.N)


def initial_field(cfg: Config, system: dynamics.System, a, rng):
    kind = cfg.get("initial.field.kind")
    g = system.grid
    if kind == "zero":
        return g.zeros()
    if kind == "random":
        amp = cfg.number("initial.field.amplitude", nonneg=True)
        return amp * rng.standard_normal((2, g.n, 2)) * system.space.chi(g.radii)[:, None]
    if kind == "fixed_point":
        return stationary.fixed_point_fields(system, a)
    if kind == "modes":
        X = g.zeros()
        for i, m in enumerate(cfg.get("initial.field.modes")):
            key = f"initial.field.modes.{i}"
            try:
                node, pol = int(m["node"]), int(m["pol"])
                X[0, node, pol] += float(m.get("q", 0.0))
                X[1, node, pol] += float(m.get("p", 0.0))
            except (KeyError, TypeError, ValueError, IndexError):
                cfg.fail(key, "expected {node, pol, q, p} with node < grid size and pol in {0, 1}")
        return X
    cfg.fail("initial.field.kind", f"must be zero, random, fixed_point or modes, got {kind!r}")


def build_system(cfg: Config, h=None):
    space = build_space(cfg)
    config = build_config(cfg)
    if h is None:
        h = cfg.number("h", nonneg=True)
    return dynamics.System(space, config, h)


def integrator_spec(cfg: Config) -> dynamics.IntegratorSpec:
    method = cfg.get("integrator.method")
    if method not in dynamics.METHODS:
        cfg.fail("integrator.method", f"must be one of {dynamics.METHODS}, got {method!r}")
    return dynamics.IntegratorSpec(
        method=method,
        dt=cfg.number("integrator.dt", positive=True),
        t_final=cfg.number("integrator.t_final"),
        record_every=cfg.number("integrator.record_every", positive=True, integer=True),
    )


# -- writers ----------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def write_json(path: Path, obj):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- commands ----------------------------------------------------------------


def cmd_simulate(cfg: Config, outdir: Path):
    """Integrate the coupled dynamics and check the field and spin laws."""
    rng = np.random.default_rng(cfg.number("seed", integer=True))
    system = build_system(cfg)
    spec = integrator_spec(cfg)
    a0 = initial_spin(cfg, system.config)
    X0 = initial_field(cfg, system, a0, rng)
    probes = cfg.get("observables.probes")
    probes = (
        cfg.vectors("observables.probes")
        if probes is not None
        else observables.default_probes(system.config, seed=cfg.number("seed", integer=True))
    )
    traj = dynamics.integrate(system, dynamics.TrajectoryState(0.0, X0, a0, h=system.h), spec)
    E = dynamics.energies(system, traj)
    N = system.config.N
    header = ["t", "photon_number", "energy", "action"]
    header += [f"S{lam}_{c}" for lam in range(N) for c in "xyz"]
    header += [f"{F}{i}_{c}" for i in range(len(probes)) for F in "BE" for c in "xyz"]
    rows = []
    for s, e in zip(traj, E):
        S = observables.spin_expectations(s.a)
        B = system.space.field_B(probes, s.X)
        Ef = system.space.field_E(probes, s.X)
        fields = np.concatenate([np.concatenate([b, ef]) for b, ef in zip(B, Ef)]) if len(probes) else []
        rows.append([s.t, observables.photon_number(s, system.grid) if system.h > 0 else float("nan"),
                     e, s.action, *S.ravel(), *fields])
    write_csv(outdir / "trajectory.csv", header, rows)
    # relative to |H(0)|, or to the Zeeman scale when H(0) happens to vanish
    scale = max(abs(E[0]), system.h * N * system.config.beta_norm, 1e-300)
    summary = {
        "energy_drift": float(np.max(np.abs(E - E[0])) / scale),
        "energy_scale": float(scale),
        "norm_deviation": float(max(abs(np.linalg.norm(s.a) - 1.0) for s in traj)),
        "probes": probes,
    }
    if cfg.get("observables.residuals") and len(traj) >= 5:
        dx = cfg.number("observables.dx", positive=True)
        summary["maxwell"] = observables.maxwell_residuals(system, traj, probes, dx).residuals
        if N:
            summary["bloch"] = observables.bloch_residual(system, traj).residuals
        if system.h > 0:
            summary["photon_number_law"] = observables.photon_number_law(system, traj).residuals
    write_json(outdir / "residuals.json", summary)
    thr = cfg.number("observables.drift_threshold", positive=True)
    if summary["energy_drift"] > thr:
        raise NumericalGuardError(f"relative energy drift {summary['energy_drift']:.3e} exceeds {thr:.3e}")
    return summary


def _subsets(cfg: Config, N):
    subs = cfg.get("fixed_point.subsets")
    if subs is None:
        return [E for k in range(N + 1) for E in itertools.combinations(range(N), k)]
    if not isinstance(subs, list):
        cfg.fail("fixed_point.subsets", "expected a list of index lists")
    out = []
    for E in subs:
        if not isinstance(E, list) or any(not isinstance(i, int) or not 0 <= i < N for i in E):
            cfg.fail("fixed_point.subsets", f"bad subset {E!r}")
        out.append(tuple(E))
    return out


def cmd_fixed_point(cfg: Config, outdir: Path):
    """Build the fixed-point fields of each product state and compare energies."""
    system = build_system(cfg)
    config = system.config
    if config.N == 0:
        cfg.fail("particles.positions", "need at least one particle")
    if config.beta_norm == 0:
        cfg.fail("particles.beta", "must be nonzero")
    tol = cfg.number("fixed_point.tol", positive=True)
    coplanar = config.is_coplanar()
    rows, report = [], []
    for E in _subsets(cfg, config.N):
        v = stationary.is_fixed_point(system, basis_state(E, config.beta, config.N), tol)
        entry = {"subset": list(E), "is_fixed": v.is_fixed, "residual": v.residual,
                 "eigenvalue": v.eigenvalue}
        formula = direct = rel = float("nan")
        if coplanar:
            en = stationary.fixed_point_energy(system, E)
            formula, direct, rel = en.formula, en.direct, en.rel_diff
            entry.update(energy_formula=formula, energy_direct=direct, rel_diff=rel)
        report.append(entry)
        rows.append(["-".join(map(str, E)) or "none", v.residual, int(v.is_fixed), formula, direct, rel])
    write_csv(outdir / "fixed_points.csv",
              ["subset", "residual", "is_fixed", "energy_formula", "energy_direct", "rel_diff"], rows)
    summary = {"coplanar": coplanar, "subsets": report}
    write_json(outdir / "fixed_points.json", summary)
    return summary


def cmd_ising(cfg: Config, outdir: Path):
    """Sweep the plateau cutoff width and compare with the dipolar kernel."""
    config = build_config(cfg)
    if config.N < 2:
        cfg.fail("particles.positions", "need at least two particles")
    if not config.is_coplanar():
        cfg.fail("particles.positions", "particles must lie in a plane orthogonal to beta")
    eps = cfg.get("ising.eps")
    if not isinstance(eps, list) or not eps or any(not isinstance(e, (int, float)) or e <= 0 for e in eps):
        cfg.fail("ising.eps", "expected a nonempty list of positive numbers")
    ro = cfg.number("ising.radial_order", integer=True)
    if ro < 64:
        cfg.fail("ising.radial_order", f"must be >= 64, got {ro}")
    rep = stationary.ising_limit_study(
        config, [float(e) for e in eps], h=cfg.number("h", positive=True), radial_order=ro,
        angular_order=cfg.number("ising.angular_order", integer=True),
    )
    rep.write_csv(outdir / "ising.csv")
    summary = {
        "self_terms": rep.self_terms,
        "energies": {e: {"-".join(map(str, E)) or "none": v for E, v in d.items()}
                     for e, d in rep.energies.items()},
    }
    write_json(outdir / "ising.json", summary)
    return summary


def cmd_quasimode(cfg: Config, outdir: Path):
    """Run the quasimode recursion and tabulate residual norms against h."""
    space = build_space(cfg)
    config = build_config(cfg)
    if config.N == 0:
        cfg.fail("particles.positions", "need at least one particle")
    if config.beta_norm == 0:
        cfg.fail("particles.beta", "must be nonzero")
    D = cfg.get("quasimode.D")
    D = None if D is None else cfg.number("quasimode.D", positive=True, integer=True)
    S = cfg.number("quasimode.max_sector", nonneg=True, integer=True)
    p_max = cfg.number("quasimode.p_max", nonneg=True, integer=True)
    if S < 2 * p_max + 1:
        cfg.fail("quasimode.max_sector", f"must be >= {2 * p_max + 1} for p_max={p_max}")
    hs = cfg.get("quasimode.h_list")
    if not isinstance(hs, list) or len(hs) < 2 or any(not isinstance(h, (int, float)) or h <= 0 for h in hs):
        cfg.fail("quasimode.h_list", "expected at least two positive values")
    model = quasimode.QuasimodeModel.build(space, config, D, S)
    series = quasimode.quasimode_series(model, p_max)
    rows, slopes = [], {}
    cases = [(0, "odd")] + [(p, "even") for p in range(1, p_max + 1)]
    for p, terms in cases:
        r = [quasimode.residual_norm(series, p, float(h), terms) for h in hs]
        for h, v in zip(hs, r):
            rows.append([p, terms, float(h), v])
        slopes[f"p{p}_{terms}"] = float(np.polyfit(np.log(hs), np.log(r), 1)[0])
    write_csv(outdir / "residuals.csv", ["p", "terms", "h", "residual"], rows)
    summary = {
        "dimension": model.dim,
        "modes": int(model.D),
        "lambda": series.lam,
        "lambda2_closed_form": quasimode.lambda2_closed_form(space, config),
        "recursion_residuals": series.recursion_residuals(),
        "slopes": slopes,
    }
    oh = cfg.get("quasimode.oracle_h")
    if oh is not None:
        oh = cfg.number("quasimode.oracle_h", positive=True)
        if p_max < 1:
            cfg.fail("quasimode.p_max", "the variational comparison needs p_max >= 1")
        try:
            K = quasimode.exact_operator_oracle(model, oh)
        except MemoryError as exc:
            raise NumericalGuardError(str(exc)) from None
        U = series.trial(oh, 2)
        summary["variational"] = {
            "h": oh,
            "min_eigenvalue": float(np.linalg.eigvalsh(K)[0]),
            "series_energy": series.energy(oh, 1),
            "bound": quasimode.residual_norm(series, 1, oh, "even") / float(np.linalg.norm(U)),
        }
    write_json(outdir / "quasimode.json", summary)
    return summary


def cmd_field_map(cfg: Config, outdir: Path):
    """Sample B and E on a box of points."""
    lo = np.array(cfg.get("field_map.lo"), float)
    hi = np.array(cfg.get("field_map.hi"), float)
    n = cfg.get("field_map.n")
    if lo.shape != (3,) or hi.shape != (3,):
        cfg.fail("field_map.lo", "lo and hi must be 3-vectors")
    if not (isinstance(n, list) and len(n) == 3 and all(isinstance(k, int) and k >= 1 for k in n)):
        cfg.fail("field_map.n", "expected three positive integers")
    axes = [np.linspace(lo[i], hi[i], n[i]) for i in range(3)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    source = cfg.get("field_map.source")
    if source == "first_order":
        space = build_space(cfg)
        config = build_config(cfg)
        if config.N == 0 or config.beta_norm == 0:
            cfg.fail("particles", "the first-order field needs particles and a nonzero beta")
        h = cfg.number("h", positive=True)
        series = quasimode.quasimode_series(quasimode.QuasimodeModel.build(space, config, None, 1), 0)
        rows = []
        for x in pts:
            f = quasimode.first_order_field(series, x, h)
            rows.append([*x, *f.fock, *f.quadrature, *f.electric])
        header = ["x", "y", "z", "Bx", "By", "Bz", "Bx_quad", "By_quad", "Bz_quad", "Ex", "Ey", "Ez"]
    elif source in ("field_B", "field_E"):
        rng = np.random.default_rng(cfg.number("seed", integer=True))
        system = build_system(cfg)
        a0 = initial_spin(cfg, system.config)
        X = initial_field(cfg, system, a0, rng)
        B = system.space.field_B(pts, X)
        E = system.space.field_E(pts, X)
        rows = [[*x, *b, *e] for x, b, e in zip(pts, B, E)]
        header = ["x", "y", "z", "Bx", "By", "Bz", "Ex", "Ey", "Ez"]
    else:
        cfg.fail("field_map.source", f"must be field_B, field_E or first_order, got {source!r}")
    write_csv(outdir / "field_map.csv", header, rows)
    return {"points": len(pts)}


COMMANDS = {
    "simulate": (cmd_simulate, "integrate the coupled field/spin system and check Maxwell, Bloch "
                 "and photon-number laws along the trajectory"),
    "fixed-point": (cmd_fixed_point, "verify that the product spin states with their induced "
                    "static fields are stationary and compare their energies"),
    "ising": (cmd_ising, "shrink the plateau cutoff and compare pair couplings with the "
              "-1/(4 pi |x|^3) dipolar kernel"),
    "quasimode": (cmd_quasimode, "run the quasimode recursion and tabulate residual norms "
                  "against h (expected slopes 2 and 2.5)"),
    "field-map": (cmd_field_map, "sample the magnetic/electric field of the initial state or "
                  "the first-order ground-state field on a box"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinphoton", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("config", help="YAML scenario file")
        p.add_argument("-o", "--out", help="output directory (overrides output.dir)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    threads = os.environ.get(THREADS_ENV)
    try:
        limit = int(threads) if threads else None
        if limit is not None and limit < 1:
            raise ValueError
    except ValueError:
        print(f"error: {THREADS_ENV} must be a positive integer, got {threads!r}", file=sys.stderr)
        return 1
    try:
        cfg = Config.load(args.config)
        if args.out:
            cfg.data["output"]["dir"] = args.out
        outdir = Path(cfg.get("output.dir"))
        fn = COMMANDS[args.command][0]
        with threadpool_limits(limits=limit):
            outdir.mkdir(parents=True, exist_ok=True)
            cfg.echo(outdir)
            fn(cfg, outdir)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
