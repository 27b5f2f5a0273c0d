"""Command-line front end.

Usage::

    cocycle-lab <subcommand> [--config FILE] [--seed N] [--out DIR] [--format csv|json]

Configs are JSON objects. A minimal one::

    {"cocycle": {"d": 2, "r": 0, "entries": {"0": [[0, -1], [1, 0]],
                                              "1": [[0.8, -0.1], [0.8, 0.1]]}}}

Optional keys: ``sft`` (defaults to the full shift on the symbols used),
``theta``, ``beta``, ``p``, ``norm``, ``budgets`` (``max_period``, ``n_max``,
``grid``, ``iters``, ``word_budget``, ``resolution``), ``tolerances``
(``holonomy``, ``mather``), ``points`` (``x``, ``y``), ``holonomy_kind``,
``samples`` (point objects), ``sample_words`` (periodic words whose orbits are
sampled), ``closing`` (``n``, ``tau``) and ``output`` (``path``, ``format``).
``cocycle`` and ``sft`` may also be paths to JSON files, relative to the config.

Exit status is 0 on success, 2 for invalid input and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cocycle import Cocycle, singular_values
from .errors import CocycleLabError, ConfigError, PreconditionViolated
from .extremal import constant_barabanov_iterate, extremality_check, perturbed_example
from .holonomy import riemannian_obstruction, stable_holonomy, unstable_holonomy
from .mather import (calibrated_cone_slope, fit_gap, mather_set_approx, periodic_spectra,
                     splitting_series, _dominating_space)
from .norms import BarabanovNorm, EllipseNorm, EuclideanNorm, MaxNorm, NormField, PolytopeNorm
from .scenarios import ExampleNonSpaceCocycle, homoclinic_point, two_matrix_pair
from .spectral import beta_lower_periodic, beta_upper_table, berger_wang_table, estimate_beta
from .symbolic import (Point, PeriodicWord, Sft, closing_periodic_orbit,
                       enumerate_periodic_words, orbit_distance_to_sample)

__all__ = ["RunConfig", "load_config", "emit_ball", "main", "run"]

SCENARIOS = ("no-riemannian", "unlocked", "calibrated-cone")
DEFAULT_BUDGETS = {"max_period": 8, "n_max": 12, "grid": 720, "iters": 500,
                   "word_budget": 2 ** 16, "resolution": 360}
DEFAULT_TOLERANCES = {"holonomy": 1e-10, "mather": 1e-9}


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % (v + 0.0)  # + 0.0 maps -0.0 to 0.0
    return str(v)


@dataclass
class RunConfig:
    sft: Sft | None = None
    cocycle: Cocycle | None = None
    theta: float = 1.0
    beta: float | None = None
    p: int = 1
    norm: object = "max"
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    points: dict = field(default_factory=dict)
    holonomy_kind: str = "stable"
    samples: list = field(default_factory=list)
    closing: dict = field(default_factory=lambda: {"n": 16, "tau": 1.0})
    output_path: str | None = None
    output_format: str = "csv"

    def need_cocycle(self) -> Cocycle:
        if self.cocycle is None:
            raise ConfigError("this subcommand needs a cocycle", "cocycle")
        return self.cocycle


def _load_ref(value, root: Path, path: str):
    if isinstance(value, str):
        ref = (root / value) if not os.path.isabs(value) else Path(value)
        if not ref.is_file():
            raise ConfigError(f"referenced file {value!r} does not exist", path)
        try:
            return json.loads(ref.read_text())
        except json.JSONDecodeError as err:
            raise ConfigError(f"invalid JSON in {value!r}: {err.msg}", path) from None
    return value


def _positive(value, path, integer=True):
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok or not value > 0:
        kind = "integer" if integer else "number"
        raise ConfigError(f"must be a positive {kind}", path)
    return value


def _parse_norm(choice, path="norm"):
    if choice in ("max", "euclidean", "barabanov", "iterate"):
        return choice
    if isinstance(choice, dict) and len(choice) == 1:
        (kind, val), = choice.items()
        try:
            if kind == "polytope":
                return PolytopeNorm(val)
            if kind == "ellipse":
                return EllipseNorm(val)
        except (CocycleLabError, ValueError, TypeError) as err:
            raise ConfigError(str(err), f"{path}.{kind}") from None
    raise ConfigError("expected max, euclidean, barabanov, iterate, {polytope: ...} "
                      "or {ellipse: ...}", path)


def _typed(data, key, kind, default):
    value = data.get(key, default)
    if not isinstance(value, kind):
        raise ConfigError("must be " + ("an object" if kind is dict else "a list"), key)
    return value


def load_config(data, root: Path = Path(".")) -> RunConfig:
    """Validate a parsed JSON config; raises ConfigError with the offending field path."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object", "<root>")
    cfg = RunConfig()
    if "sft" in data:
        cfg.sft = Sft.from_dict(_load_ref(data["sft"], root, "sft"), "sft")
    if "cocycle" in data:
        raw = _load_ref(data["cocycle"], root, "cocycle")
        cfg.cocycle = Cocycle.from_dict(raw, cfg.sft, "cocycle")
        cfg.sft = cfg.cocycle.base
    cfg.theta = float(_positive(data.get("theta", 1.0), "theta", integer=False))
    if "beta" in data:
        b = data["beta"]
        if isinstance(b, bool) or not isinstance(b, (int, float)) or not math.isfinite(b):
            raise ConfigError("must be a finite number", "beta")
        cfg.beta = float(b)
    cfg.p = _positive(data.get("p", 1), "p")
    cfg.norm = _parse_norm(data.get("norm", "max"))
    budgets = _typed(data, "budgets", dict, {})
    for key, val in budgets.items():
        if key not in DEFAULT_BUDGETS:
            raise ConfigError("unknown budget", f"budgets.{key}")
        cfg.budgets[key] = _positive(val, f"budgets.{key}")
    tols = _typed(data, "tolerances", dict, {})
    for key, val in tols.items():
        cfg.tolerances[key] = float(_positive(val, f"tolerances.{key}", integer=False))
    for key, val in _typed(data, "points", dict, {}).items():
        cfg.points[key] = Point.from_dict(val, f"points.{key}")
    kind = data.get("holonomy_kind", "stable")
    if kind not in ("stable", "unstable"):
        raise ConfigError("must be stable or unstable", "holonomy_kind")
    cfg.holonomy_kind = kind
    for i, val in enumerate(_typed(data, "samples", list, [])):
        cfg.samples.append(Point.from_dict(val, f"samples.{i}"))
    for i, w in enumerate(_typed(data, "sample_words", list, [])):
        try:
            pw = PeriodicWord(w)
        except (CocycleLabError, ValueError, TypeError) as err:
            raise ConfigError(str(err), f"sample_words.{i}") from None
        cfg.samples.extend(pw.orbit())
    closing = _typed(data, "closing", dict, {})
    cfg.closing["n"] = _positive(closing.get("n", 16), "closing.n")
    cfg.closing["tau"] = float(_positive(closing.get("tau", 1.0), "closing.tau", integer=False))
    out = _typed(data, "output", dict, {})
    cfg.output_path = out.get("path")
    if cfg.output_path is not None and not isinstance(cfg.output_path, str):
        raise ConfigError("must be a string", "output.path")
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("must be csv or json", "output.format")
    cfg.output_format = fmt
    if cfg.sft is not None:
        for key, pt in cfg.points.items():
            if not pt.is_admissible(cfg.sft):
                raise ConfigError("point is not admissible for the shift", f"points.{key}")
        for i, pt in enumerate(cfg.samples):
            if not pt.is_admissible(cfg.sft):
                raise ConfigError("point is not admissible for the shift", f"samples.{i}")
    return cfg


class Output:
    """Collects tables and records; writes them once, deterministically."""

    def __init__(self, directory: Path | None, fmt: str, stream=None):
        self.directory = directory
        self.fmt = fmt
        self.stream = stream or sys.stdout
        self.tables = {}
        self.records = {}

    def table(self, name, header, rows):
        self.tables[name] = (list(header), [list(r) for r in rows])

    def record(self, name, values: dict):
        self.records[name] = dict(values)

    def say(self, text):
        print(text, file=self.stream)

    def _csv_text(self, header, rows):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()

    def write(self, stem):
        if self.directory is None:
            return []
        self.directory.mkdir(parents=True, exist_ok=True)
        written = []
        if self.fmt == "csv":
            for name, (header, rows) in self.tables.items():
                written.append(self._write(name + ".csv", self._csv_text(header, rows)))
            for name, rec in self.records.items():
                rows = [(k, json.dumps(_jsonable(v)) if isinstance(v, (list, dict)) else v)
                        for k, v in rec.items()]
                written.append(self._write(name + ".csv", self._csv_text(["key", "value"], rows)))
        else:
            doc = {name: {"header": h, "rows": _jsonable(r)} for name, (h, r) in self.tables.items()}
            doc.update({name: _jsonable(rec) for name, rec in self.records.items()})
            written.append(self._write(stem + ".json",
                                       json.dumps(doc, indent=2, sort_keys=True) + "\n"))
        return written

    def _write(self, name, text):
        path = self.directory / name
        path.write_text(text)
        return path


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    return v


def _norm_field(cfg: RunConfig, c: Cocycle, beta: float) -> NormField:
    choice = cfg.norm
    if choice == "max":
        return MaxNorm()
    if choice == "euclidean":
        return EuclideanNorm()
    if choice == "barabanov":
        return BarabanovNorm(c, beta, n_max=cfg.budgets["n_max"], theta=cfg.theta)
    if choice == "iterate":
        return constant_barabanov_iterate(c.matrices, beta, grid=cfg.budgets["grid"],
                                          iters=cfg.budgets["iters"]).norm
    return choice


def _beta(cfg: RunConfig, c: Cocycle, out: Output) -> float:
    if cfg.beta is not None:
        return cfg.beta
    br = estimate_beta(c, cfg.budgets["word_budget"])
    out.say(f"beta bracket [{_fmt(br.lower)}, {_fmt(br.upper)}], using the midpoint")
    return br.midpoint


def emit_ball(norm: NormField, resolution: int, path, matrices=(), x: Point | None = None):
    """Write the unit ball of ``norm`` (and its images under ``matrices``) as CSV.

    ``resolution`` directions are taken per half turn, so ``2 * resolution``
    boundary points are listed per curve. Columns: ``curve, angle, radius``,
    with ``curve`` either ``ball`` or ``image_<i>``.
    """
    if resolution < 1:
        raise PreconditionViolated("resolution must be positive")
    t = math.pi * np.arange(2 * resolution) / resolution
    dirs = np.column_stack([np.cos(t), np.sin(t)])
    vals = np.asarray(norm.value(dirs, x), dtype=float)
    pts = dirs / vals[:, None]
    rows = [("ball", a, r) for a, r in zip(t, 1.0 / vals)]
    for i, m in enumerate(matrices):
        img = pts @ np.asarray(m, dtype=float).T
        ang = np.mod(np.arctan2(img[:, 1], img[:, 0]), 2 * math.pi)
        rad = np.hypot(img[:, 0], img[:, 1])
        order = np.argsort(ang, kind="stable")
        rows += [(f"image_{i}", ang[j], rad[j]) for j in order]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["curve", "angle", "radius"])
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    Path(path).write_text(buf.getvalue())
    return rows


def _cmd_beta(cfg, args, out):
    c = cfg.need_cocycle()
    br = estimate_beta(c, cfg.budgets["word_budget"])
    rows = []
    for norm in ("euclidean", "max"):
        rows += [(n, v, w, f"upper_{norm}") for n, v, w in beta_upper_table(c, br.n_upper, norm)]
    for n in range(1, br.n_lower + 1):
        val, wit = beta_lower_periodic(c, n)
        rows.append((n, val, str(wit.word), "lower"))
    out.table("beta", ["n", "bound", "witness", "kind"], rows)
    out.record("beta_bracket", {"lower": br.lower, "upper": br.upper, "n": br.n_upper,
                                "upper_norm": br.upper_norm, "lower_witness": br.lower_witness,
                                "upper_witness": br.upper_witness})
    out.say(f"beta in [{_fmt(br.lower)}, {_fmt(br.upper)}] (n = {br.n_upper}, "
            f"upper norm {br.upper_norm}, witnesses {br.lower_witness} / {br.upper_witness})")


def _cmd_berger_wang(cfg, args, out):
    c = cfg.need_cocycle()
    rows = berger_wang_table(c, cfg.budgets["max_period"])
    out.table("berger_wang", ["n", "beta_n", "upper_n", "gap", "witness"], rows)
    n, lo, hi, gap, wit = rows[-1]
    out.say(f"n = {n}: beta_n = {_fmt(lo)}, upper = {_fmt(hi)}, gap = {_fmt(gap)} ({wit})")


def _cmd_barabanov(cfg, args, out):
    c = cfg.need_cocycle()
    beta = _beta(cfg, c, out)
    res = cfg.budgets["resolution"]
    if c.step_radius == 0 and cfg.norm != "barabanov":
        it = constant_barabanov_iterate(c.matrices, beta, grid=cfg.budgets["grid"],
                                        iters=cfg.budgets["iters"])
        norm, x = it.norm, None
        out.record("barabanov", {"beta": beta, "residual": it.residual,
                                 "iterations": it.iterations})
        out.say(f"value iteration: residual {_fmt(it.residual)} after {it.iterations} iterations")
    else:
        norm = BarabanovNorm(c, beta, n_max=cfg.budgets["n_max"], theta=cfg.theta)
        x = cfg.points.get("x", c.base.extend_word(c.windows[0], -c.step_radius))
        out.record("barabanov", {"beta": beta, "n_max": cfg.budgets["n_max"],
                                 "point": json.dumps(x.to_dict(), sort_keys=True)})
        out.say(f"Barabanov formula evaluated at {x.to_dict()}")
    if c.dimension != 2:
        raise PreconditionViolated("ball output needs d = 2")
    mats = c.matrices if c.step_radius == 0 else ()
    if out.directory is not None:
        out.directory.mkdir(parents=True, exist_ok=True)
        emit_ball(norm, res, out.directory / "barabanov_ball.csv", mats, x)


def _cmd_check_extremal(cfg, args, out):
    c = cfg.need_cocycle()
    beta = _beta(cfg, c, out)
    norm = _norm_field(cfg, c, beta)
    rep = extremality_check(c, norm, beta, grid=cfg.budgets["grid"],
                            rng=np.random.default_rng(args.seed))
    out.record("check_extremal", rep.as_dict())
    out.say(f"sup log operator norm {_fmt(rep.sup_log_operator_norm)}, slack {_fmt(rep.slack)}, "
            f"extremal = {_fmt(rep.extremal)} (window {rep.worst_window})")


def _cmd_holonomy(cfg, args, out):
    c = cfg.need_cocycle()
    if "x" not in cfg.points or "y" not in cfg.points:
        raise ConfigError("holonomy needs points.x and points.y", "points")
    fn = stable_holonomy if cfg.holonomy_kind == "stable" else unstable_holonomy
    res = fn(c, cfg.points["x"], cfg.points["y"], tol=cfg.tolerances["holonomy"])
    out.table("holonomy_matrix", [f"c{j}" for j in range(c.dimension)], res.matrix.tolist())
    out.table("holonomy_trace", ["n", "increment_norm"],
              [(i + 1, v) for i, v in enumerate(res.increments)])
    out.record("holonomy", {"kind": cfg.holonomy_kind, "iterations_used": res.iterations_used,
                            "last_increment_norm": res.last_increment_norm,
                            "certified": res.certified})
    out.say(f"{cfg.holonomy_kind} holonomy: certified = {_fmt(res.certified)} after "
            f"{res.iterations_used} iterations")
    out.say(np.array2string(res.matrix, precision=12))


def _cmd_mather(cfg, args, out):
    c = cfg.need_cocycle()
    ma = mather_set_approx(c, cfg.p, cfg.budgets["max_period"], cfg.tolerances["mather"])
    kept = {str(w) for w in ma.orbits}
    rows = []
    for w, e in periodic_spectra(c, cfg.budgets["max_period"]):
        rows.append([str(w), w.period, str(w) in kept] + [float(v) for v in e])
    out.table("mather", ["word", "period", "in_mather"] +
              [f"chi_{i + 1}" for i in range(c.dimension)], rows)
    out.record("mather_summary", {"p": ma.index_p, "beta_used": ma.beta_used, "tol": ma.tol,
                                  "wedge_beta": ma.wedge_beta,
                                  "wedge_consistent": ma.wedge_consistent,
                                  "orbits": " ".join(sorted(kept))})
    out.say(f"M_{ma.index_p}: {' '.join(str(w) for w in ma.orbits)} (beta = {_fmt(ma.beta_used)})")


def _samples(cfg, c):
    if cfg.samples:
        return cfg.samples
    pts = []
    for w in enumerate_periodic_words(c.base, 4):
        pts.extend(w.orbit())
    return pts


def _cmd_splitting(cfg, args, out):
    c = cfg.need_cocycle()
    samples = _samples(cfg, c)
    n_max = cfg.budgets["n_max"]
    data = splitting_series(c, samples, cfg.p, n_max)
    tau, const, r2, ok = fit_gap(data)
    rows = [(n + 1, i, data[i, n]) for n in range(n_max) for i in range(len(samples))]
    out.table("splitting", ["n", "sample", "log_sigma_ratio"], rows)
    rec = {"p": cfg.p, "tau": tau, "c": const, "r_squared": r2, "splitting": ok}
    if ok:
        for i, x in enumerate(samples):
            rec[f"subspace_{i}"] = _dominating_space(c, x, cfg.p, n_max).basis.ravel().tolist()
    out.record("splitting_fit", rec)
    verdict = "dominated splitting" if ok else "no splitting"
    out.say(f"{verdict}: tau = {_fmt(tau)}, c = {_fmt(const)}, r^2 = {_fmt(r2)}")


def _cmd_closing(cfg, args, out):
    if cfg.sft is None:
        raise ConfigError("closing needs an sft or a cocycle", "sft")
    if not cfg.samples:
        raise ConfigError("closing needs samples or sample_words", "samples")
    n, tau = cfg.closing["n"], cfg.closing["tau"]
    w = closing_periodic_orbit(cfg.samples, n, tau, cfg.sft)
    dist = orbit_distance_to_sample(str(w), cfg.samples, cfg.sft)
    bound = n ** (-tau)
    out.record("closing", {"word": str(w), "period": w.period, "distance": dist,
                           "bound": bound, "within_bound": dist <= bound})
    out.say(f"closing orbit {w} (period {w.period}), distance {_fmt(dist)} <= {_fmt(bound)}")


def _scenario_no_riemannian(cfg, args, out):
    c = two_matrix_pair()
    br = estimate_beta(c)
    rep = extremality_check(c, MaxNorm(), 0.0)
    obs = riemannian_obstruction(c, Point.fixed(0), homoclinic_point())
    s = singular_values(c.table[(1,)])
    out.record("no_riemannian", {
        "beta_lower": br.lower, "beta_upper": br.upper, "max_norm_slack": rep.slack,
        "max_norm_extremal": rep.extremal, "sigma_1": s[0], "sigma_2": s[1],
        "loop_norm": obs.loop_norm, "loop_k": obs.k, "obstructed": obs.obstructed,
        "loop": obs.loop.tolist()})
    out.say(f"beta in [{_fmt(br.lower)}, {_fmt(br.upper)}]")
    out.say(f"max norm extremal = {_fmt(rep.extremal)} (slack {_fmt(rep.slack)})")
    out.say(f"loop norm {_fmt(obs.loop_norm)} (0.8*sqrt(2) = {_fmt(0.8 * math.sqrt(2))})")
    out.say(f"obstructed = {_fmt(obs.obstructed)}")


def _scenario_unlocked(cfg, args, out):
    ex = perturbed_example(args.m)
    target = math.log(0.8 * math.sqrt(2)) / (args.m + 1)
    out.record("unlocked", {"m": args.m, "product": ex.product.tolist(), "word": ex.word,
                            "exponent": ex.exponent, "log(0.8*sqrt(2))/(m+1)": target})
    out.say(f"A0~^{args.m} A1 = {np.array2string(ex.product, precision=12)}")
    out.say(f"diag(-0.8*sqrt(2), -0.1*sqrt(2)) = diag({_fmt(-0.8 * math.sqrt(2))}, "
            f"{_fmt(-0.1 * math.sqrt(2))})")
    out.say(f"exponent of {ex.word}: {_fmt(ex.exponent)} (log(0.8*sqrt(2))/{args.m + 1} = "
            f"{_fmt(target)})")


def _scenario_calibrated_cone(cfg, args, out):
    ex = ExampleNonSpaceCocycle(lam=1.0, theta=cfg.theta)
    m1 = mather_set_approx(ex, 1, 6, 1e-6)
    m2 = mather_set_approx(ex, 2, 6, 1e-6)
    slope = calibrated_cone_slope(ex, homoclinic_point())
    out.record("calibrated_cone", {"theta": cfg.theta, "m1_size": len(m1.orbits),
                                   "m2": " ".join(str(w) for w in m2.orbits), "slope": slope})
    out.say(f"M_1 holds {len(m1.orbits)} periodic orbits up to period 6; "
            f"M_2 = {{{', '.join(str(w) for w in m2.orbits)}}}")
    out.say(f"cone slope at the homoclinic point: {_fmt(slope)}")


COMMANDS = {"beta": _cmd_beta, "berger-wang": _cmd_berger_wang, "barabanov": _cmd_barabanov,
            "check-extremal": _cmd_check_extremal, "holonomy": _cmd_holonomy,
            "mather": _cmd_mather, "splitting": _cmd_splitting, "closing": _cmd_closing}
SCENARIO_FUNCS = {"no-riemannian": _scenario_no_riemannian, "unlocked": _scenario_unlocked,
                  "calibrated-cone": _scenario_calibrated_cone}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    parser = argparse.ArgumentParser(prog="cocycle-lab",
                                     description="Linear cocycles over subshifts of finite type.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    ex = sub.add_parser("example", parents=[common], help="named worked examples")
    ex.add_argument("scenario", choices=SCENARIOS)
    ex.add_argument("--m", type=int, default=6, help="perturbation index, m = 2 mod 4")
    return parser


def _threads():
    raw = os.environ.get("COCYCLE_LAB_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError("must be a positive integer", "env.COCYCLE_LAB_THREADS")
    return n


def run(args, stream=None) -> int:
    """Execute parsed arguments; returns the exit status."""
    stream = stream or sys.stdout
    try:
        _threads()
        if args.config is not None:
            try:
                data = json.loads(args.config.read_text())
            except FileNotFoundError:
                raise ConfigError(f"file {str(args.config)!r} not found", "--config") from None
            except json.JSONDecodeError as err:
                raise ConfigError(f"invalid JSON: {err.msg} (line {err.lineno})",
                                  "--config") from None
            cfg = load_config(data, args.config.parent)
        else:
            cfg = RunConfig()
        out_dir = args.out if args.out is not None else (
            Path(cfg.output_path) if cfg.output_path else None)
        out = Output(out_dir, args.format or cfg.output_format, stream)
        if args.command == "example":
            SCENARIO_FUNCS[args.scenario](cfg, args, out)
            stem = "example_" + args.scenario.replace("-", "_")
        else:
            COMMANDS[args.command](cfg, args, out)
            stem = args.command.replace("-", "_")
        out.write(stem)
        return 0
    except ConfigError as err:
        print(f"error: ConfigError at {err.path}: {err.message}", file=sys.stderr)
        return 2
    except CocycleLabError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 3


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
