"""Command-line front end: reproducible experiments with JSON reports.

Every subcommand builds a report with the common layout, writes it (and any
CSV/JSON artifacts) under ``--out`` when given, and prints it otherwise.
Exit status is 0 when every verdict passes, 2 on an invariant failure and
3 on bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import report as rep
from .causal import (
    DEFAULT_TOL,
    FiniteLorentzianSpace,
    compute_boundaries,
    maximal_causal_relation,
    verify_causality_level,
    verify_distinguishing,
)
from .cauchy import (
    CAUCHY,
    DEFAULT_MARGIN,
    STRONG,
    CauchyGraph,
    achronality_check,
    random_strong_graph,
    validate_graph,
    violating_graph,
)
from .curves import (
    Behavior,
    DiscreteCausalCurve,
    cauchy_complete_check,
    cone_example_curve,
    crossing_count,
    finite_compactness_check,
    inextendibility_check,
    random_timelike_curve,
    timelike_cauchy_completeness_check,
    witness_curve,
)
from .dj import (
    blaschke_net,
    constant_net,
    dj_matrix,
    dj_set,
    limit_of_cauchy_sequence,
    sample_ball,
    verify_metric_axioms,
)
from .errors import InputError, InvariantError, LorentzError
from .mesh import DEFAULT_HOPS, HyperbolicMesh, IntrinsicDistanceOracle, build_annulus_mesh, build_disk_mesh
from .models import ConeModel, FiniteModel, MinkowskiModel, StripModel, minkowski_slice, strip_slice
from .timefn import build_time_function, verify_level_crossing

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 2, 3


@dataclass
class ExperimentConfig:
    """Everything a run depends on; the seed fixes all randomness."""

    model: str = "finite"
    seed: int = 0
    tol: float = DEFAULT_TOL
    radius: float = 1.0
    resolution: int = 4
    hops: int = DEFAULT_HOPS
    inner: float = 0.0
    trials: int = 200
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError(f"tolerance must be positive, got {self.tol}")
        if self.model not in ("finite", "strip", "minkowski", "cone"):
            raise InputError(f"unknown model {self.model!r}")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


def parse_config_file(path: str | Path) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment, ``[section]`` lines are ignored.

    Values are parsed as JSON when possible (numbers, booleans, quoted
    strings, lists) and kept as bare strings otherwise.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise InputError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            out[key] = json.loads(value)
        except ValueError:
            out[key] = value.strip("'\"")
    return out


_CONFIG_FIELDS = {"model", "seed", "tol", "radius", "resolution", "hops", "inner", "trials", "out"}


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {"model": args.default_model}
    if args.config:
        values.update(parse_config_file(args.config))
    for key in ("model", "seed", "tol", "radius", "resolution", "hops", "inner", "trials", "out"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    extra = {k: v for k, v in values.items() if k not in _CONFIG_FIELDS}
    # subcommand options are part of the run's identity, so echo them too
    skip = _CONFIG_FIELDS | {"config", "func", "group", "action", "default_model", "leaf_parser"}
    extra.update({k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None})
    known = {k: v for k, v in values.items() if k in _CONFIG_FIELDS}
    try:
        cfg = ExperimentConfig(**known, extra=extra)
        cfg.seed, cfg.resolution, cfg.hops, cfg.trials = int(cfg.seed), int(cfg.resolution), int(cfg.hops), int(cfg.trials)
        cfg.tol, cfg.radius, cfg.inner = float(cfg.tol), float(cfg.radius), float(cfg.inner)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad config: {exc}") from exc
    return cfg


# -- model helpers ----------------------------------------------------------------


def _mesh(cfg: ExperimentConfig, args) -> HyperbolicMesh:
    path = getattr(args, "mesh", None)
    if path:
        return HyperbolicMesh.load(path)
    if cfg.inner > 0:
        return build_annulus_mesh(cfg.inner, cfg.radius, cfg.resolution, cfg.hops)
    return build_disk_mesh(cfg.radius, cfg.resolution, cfg.hops)


def _cone(cfg: ExperimentConfig, args) -> ConeModel:
    mesh = _mesh(cfg, args)
    cache = getattr(args, "oracle", None)
    oracle = IntrinsicDistanceOracle.load(cache) if cache else IntrinsicDistanceOracle.from_mesh(mesh)
    if oracle.n != mesh.n:
        raise InputError(f"oracle cache has {oracle.n} vertices, mesh has {mesh.n}")
    return ConeModel(mesh, oracle, cfg.tol)


def _space(args, cfg: ExperimentConfig, **kw) -> FiniteLorentzianSpace:
    if not getattr(args, "space", None):
        raise InputError("--space is required")
    space = FiniteLorentzianSpace.load(args.space, **kw)
    return FiniteLorentzianSpace(space.dist, space.causal, space.labels, space.require_antisymmetric, cfg.tol)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from exc


def _flat_model(name: str, tol: float):
    m = StripModel() if name == "strip" else MinkowskiModel()
    m.tolerance = tol
    return m


def _invariant_witnesses(check: str, failures) -> list[dict]:
    return [rep.witness(check, name, w) for name, w in failures]


# -- subcommands -----------------------------------------------------------------
# Each returns (verdicts, witnesses, artifacts) with artifacts a name -> text map.


def cmd_mesh_build(cfg, args):
    mesh = _mesh(cfg, args)
    oracle = IntrinsicDistanceOracle.from_mesh(mesh)
    rho = np.arccosh(np.clip(mesh.vertices[:, 0], 1.0, None))
    rim = np.flatnonzero(np.abs(rho - cfg.radius) <= 1e-9)
    center = int(np.argmin(rho))
    c2b = float(oracle.matrix[center, rim].max()) if rim.size else math.nan
    fails = mesh.invariant_failures()
    verdicts = [
        rep.verdict("mesh_invariants", not fails, len(fails)),
        rep.verdict("vertices", True, mesh.n),
        rep.verdict("max_edge", True, mesh.max_edge),
        rep.verdict("center_to_rim_over_radius", True, c2b / cfg.radius if rim.size else None,
                    "graph distance from the innermost vertex to the farthest rim vertex"),
    ]
    artifacts = {"mesh.json": mesh.to_json()}
    return verdicts, _invariant_witnesses("mesh_invariants", fails), artifacts, {"oracle.bin": oracle}


def cmd_space_check(cfg, args):
    space = _space(args, cfg)
    fails = space.invariant_failures()
    level = verify_causality_level(space)
    ok_d, pair = verify_distinguishing(space)
    bd = compute_boundaries(space)
    verdicts = [rep.verdict(f"invariant:{name}", False, None, f"first failure at {w}") for name, w in fails]
    verdicts += [
        rep.verdict("invariants", not fails, len(fails)),
        rep.verdict("causality_level", True, level.value),
        rep.verdict("distinguishing", True, ok_d, "" if ok_d else f"indistinguishable pair {pair}"),
        rep.verdict("boundaries", True, bd.as_dict(space.labels)),
    ]
    wit = _invariant_witnesses("invariants", fails)
    if not ok_d:
        wit.append(rep.witness("distinguishing", "distinguishing", pair))
    return verdicts, wit, {}, {}


def cmd_jd_compute(cfg, args):
    space = _space(args, cfg)
    jd = maximal_causal_relation(space)
    c = space.causal
    contains = bool((jd | ~c).all())
    equal = bool((jd == c).all())
    verdicts = [
        rep.verdict("contains_declared_relation", contains),
        rep.verdict("equals_declared_relation", True, equal),
    ]
    wit = []
    if not equal:
        extra = np.argwhere(jd != c)[0]
        wit.append(rep.witness("equals_declared_relation", "maximal_causal_relation", extra))
    artifacts = {"jd.csv": rep.matrix_csv(jd.astype(int), [str(l) for l in space.labels])}
    return verdicts, wit, artifacts, {}


def _graphs(cfg, args, model):
    if getattr(args, "graph", None):
        out = []
        for p in args.graph:
            try:
                out.append(CauchyGraph.from_json(Path(p).read_text(), model))
            except OSError as exc:
                raise InputError(f"cannot read graph {p}: {exc}") from exc
        return out
    rng = cfg.rng()
    return [random_strong_graph(model, rng, margin=args.margin) for _ in range(args.count)]


def cmd_graph_validate(cfg, args):
    model = _cone(cfg, args)
    graphs = _graphs(cfg, args, model)
    verdicts, wit = [], []
    for k, g in enumerate(graphs):
        v = validate_graph(g, args.mode, args.margin)
        a = achronality_check(g)
        verdicts.append(rep.verdict(f"graph{k}:{args.mode}", v.ok, v.value, f"worst pair {v.witness}"))
        verdicts.append(rep.verdict(f"graph{k}:achronal", a.ok, a.value))
        if not v.ok:
            wit.append(rep.witness(f"graph{k}:{args.mode}", "log_lipschitz", v.witness))
        if not a.ok:
            wit.append(rep.witness(f"graph{k}:achronal", "achronality", a.witness))
    return verdicts, wit, {}, {}


def _slices(cfg, args, times):
    maker = strip_slice if cfg.model == "strip" else minkowski_slice
    lo, hi = _floats(args.xrange)
    return [maker(t, (lo, hi), args.samples) for t in times]


def cmd_dj_pair(cfg, args):
    if args.a is None or args.b is None:
        raise InputError("dj pair needs --a and --b")
    if cfg.model in ("strip", "minkowski"):
        model = _flat_model(cfg.model, cfg.tol)
        A, B = _slices(cfg, args, [args.a, args.b])
    elif cfg.model == "cone":
        model = _cone(cfg, args)
        A, B = CauchyGraph.constant(model, args.a), CauchyGraph.constant(model, args.b)
    else:
        raise InputError("dj pair supports the strip, minkowski and cone models")
    r = dj_set(model, A, B)
    return [rep.verdict("dj", True, r.value, f"witness pair {r.witness}")], [], {}, {}


def cmd_dj_matrix(cfg, args):
    if cfg.model in ("strip", "minkowski"):
        model = _flat_model(cfg.model, cfg.tol)
        times = _floats(args.times)
        sets = _slices(cfg, args, times)
        labels = [f"t={t:g}" for t in times]
    elif cfg.model == "cone":
        model = _cone(cfg, args)
        sets = _graphs(cfg, args, model)
        labels = [f"g{k}" for k in range(len(sets))]
    else:
        raise InputError("dj matrix supports the strip, minkowski and cone models")
    M = dj_matrix(model, sets)
    sym = bool((M == M.T).all())
    return [rep.verdict("symmetric", sym), rep.verdict("size", True, len(sets))], [], {"dj_matrix.csv": rep.matrix_csv(M, labels)}, {}


def cmd_dj_axioms(cfg, args):
    model = _cone(cfg, args)
    graphs = _graphs(cfg, args, model)
    bad = [k for k, g in enumerate(graphs) if not validate_graph(g, STRONG, args.margin).ok]
    if bad:
        raise InvariantError(f"graph {bad[0]} fails strong validation", (bad[0],), invariant="log_lipschitz")
    res = verify_metric_axioms(model, graphs, cfg.trials, np.random.default_rng(cfg.seed + 1))
    verdicts = [rep.verdict(name, v.ok, v.value, v.detail) for name, v in res.checks.items()]
    verdicts.append(rep.verdict("evaluated_triples", True, res.evaluated_triples))
    verdicts.append(rep.verdict("scope", True, None, rep.SCOPE_NOTE))
    wit = [rep.witness(name, name, v.witness) for name, v in res.checks.items() if not v.ok]
    return verdicts, wit, {}, {}


def cmd_curves_crossings(cfg, args):
    model = _cone(cfg, args)
    rng = cfg.rng()
    graphs = [random_strong_graph(model, rng, margin=args.margin) for _ in range(args.graphs)]
    lo = min(float(g.f.min()) for g in graphs) / 10 if graphs else 0.01
    hi = max(float(g.f.max()) for g in graphs) * 10 if graphs else 100.0
    curves = [random_timelike_curve(model, rng, lo, hi) for _ in range(args.curves)]
    rows, wrong = [], None
    for ci, c in enumerate(curves):
        for gi, g in enumerate(graphs):
            n = crossing_count(c, g).count
            rows.append((ci, gi, n))
            if n != 1 and wrong is None:
                wrong = (ci, gi, n)
    vrows, vwrong = [], None
    for k in range(args.violations):
        g, (p, q) = violating_graph(model, rng)
        n = crossing_count(witness_curve(g, p, q), g).count
        vrows.append((k, p, q, n))
        if n == 1 and vwrong is None:
            vwrong = (k, p, q)
    verdicts = [
        rep.verdict("valid_graphs_single_crossing", wrong is None, len(rows)),
        rep.verdict("violating_graphs_witnessed", vwrong is None, len(vrows)),
    ]
    wit = []
    if wrong:
        wit.append(rep.witness("valid_graphs_single_crossing", "crossing", wrong))
    if vwrong:
        wit.append(rep.witness("violating_graphs_witnessed", "crossing", vwrong))
    artifacts = {
        "crossings.csv": rep.csv_text(["curve", "graph", "crossings"], rows),
        "witness_crossings.csv": rep.csv_text(["case", "p", "q", "crossings"], vrows),
    }
    return verdicts, wit, artifacts, {}


def cmd_complete_strip(cfg, args):
    strip, mink = _flat_model("strip", cfg.tol), _flat_model("minkowski", cfg.tol)
    lo, hi = _floats(args.xrange)
    js = range(1, args.terms + 1)
    seq_strip = [strip_slice(1.0 / j if j > 1 else 0.999, (lo, hi), args.samples) for j in js]
    seq_mink = [minkowski_slice(1.0 / j, (lo, hi), args.samples) for j in js]
    rs = limit_of_cauchy_sequence(strip, seq_strip, args.epsilon)
    rm = limit_of_cauchy_sequence(mink, seq_mink, args.epsilon)
    to_s0 = dj_set(mink, rm.limit, minkowski_slice(0.0, (lo, hi), args.samples)).value if rm.limit is not None else math.inf
    t = 1.0 - 1.0 / np.arange(2, args.terms + 1)
    t = np.concatenate([1.0 - t[::-1], t[1:]])
    curve = DiscreteCausalCurve(t, np.column_stack([t, np.zeros_like(t)]),
                                Behavior.approaches((0.0, 0.0)), Behavior.approaches((1.0, 0.0)))
    cc = cauchy_complete_check(strip, curve, "future")
    xs = np.column_stack([1.0 - 1.0 / np.arange(2, args.terms + 1), np.zeros(args.terms - 1)])
    ts = timelike_cauchy_completeness_check(strip, xs)
    verdicts = [
        rep.verdict("strip_slices_boundary_escape", rs.verdict == "boundary_escape", rs.verdict),
        rep.verdict("minkowski_slices_convergent", rm.verdict == "convergent", rm.verdict),
        rep.verdict("minkowski_limit_to_S0", to_s0 <= args.epsilon, to_s0),
        rep.verdict("strip_vertical_curve", cc.verdict == "incomplete", cc.verdict),
        rep.verdict("strip_sequence", ts.verdict == "escapes", ts.verdict),
        rep.verdict("scope", True, None, rep.SCOPE_NOTE),
    ]
    return verdicts, [], {}, {}


def cmd_complete_cone(cfg, args):
    model = _cone(cfg, args)
    curve = cone_example_curve(model, args.t_max)
    inext = inextendibility_check(model, curve)
    cc = cauchy_complete_check(model, curve, "future")
    seq = [CauchyGraph.constant(model, 1.0 + 2.0 ** -k) for k in range(1, args.terms + 1)]
    lim = limit_of_cauchy_sequence(model, seq, args.epsilon)
    gap = float(np.abs(lim.limit.f - 1.0).max()) if lim.limit is not None else math.inf
    verdicts = [
        rep.verdict("example_curve_future_inextendible", inext.future.inextendible, inext.future.reason),
        rep.verdict("example_curve_future_complete", cc.verdict == "complete", cc.verdict),
        rep.verdict("constant_graphs_convergent", lim.verdict == "convergent", lim.verdict),
        rep.verdict("constant_graphs_limit_error", gap <= args.epsilon, gap),
        rep.verdict("scope", True, None, rep.SCOPE_NOTE),
    ]
    return verdicts, [], {}, {}


def cmd_complete_finite(cfg, args):
    space = _space(args, cfg)
    model = FiniteModel(space)
    fc = finite_compactness_check(model)
    verdicts = [rep.verdict("finitely_compact", fc.finitely_compact, None, fc.reason)]
    if args.sequence:
        seq = [space.index(s.strip()) for s in args.sequence.split(",")]
        ts = timelike_cauchy_completeness_check(model, seq)
        verdicts.append(rep.verdict("sequence", ts.verdict == "convergent", ts.verdict))
    verdicts.append(rep.verdict("scope", True, None, rep.SCOPE_NOTE))
    return verdicts, [], {}, {}


def cmd_timefn_build(cfg, args):
    space = _space(args, cfg)
    enum = [s.strip() for s in args.enumeration.split(",")] if args.enumeration else None
    tf = build_time_function(space, enum)
    tau = tf.tau
    verdicts = [rep.verdict("monotone", True), rep.verdict("boundary_values", True)]
    verdicts += [rep.verdict(f"tau:{lab}", True, t) for lab, t in zip(space.labels, tau)]
    return verdicts, [], {"tau.csv": tf.to_csv()}, {}


def cmd_timefn_levels(cfg, args):
    space = _space(args, cfg)
    enum = [s.strip() for s in args.enumeration.split(",")] if args.enumeration else None
    tf = build_time_function(space, enum)
    verdicts, wit = [], []
    for level in _floats(args.levels):
        r = verify_level_crossing(space, tf, level)
        verdicts.append(rep.verdict(f"level:{level:g}", r.ok, [r.min_crossings, r.max_crossings],
                                    f"{r.chains} maximal chains, {r.non_straddling} not straddling"))
        if not r.ok:
            wit.append(rep.witness(f"level:{level:g}", "single_crossing", r.witness))
    verdicts.append(rep.verdict("discrete_surrogate", True, None,
                                "maximal chains from tau=-inf to tau=+inf stand in for inextendible curves"))
    return verdicts, wit, {"tau.csv": tf.to_csv()}, {}


def cmd_blaschke_net(cfg, args):
    model = _cone(cfg, args)
    center = CauchyGraph.constant(model, args.center)
    net = blaschke_net(center, args.r, args.epsilon, args.margin)
    rng = cfg.rng()
    probes = sample_ball(center, args.r, args.probes, rng, args.margin) if args.r > 0 else [center]
    worst, arg, used = net.coverage(probes)
    consts = constant_net(model, args.center, args.r, args.epsilon)
    verdicts = [
        rep.verdict("coverage", worst <= args.epsilon, worst, f"worst probe {arg}"),
        rep.verdict("members_used", True, used),
        rep.verdict("log10_net_size_bound", True, net.log10_size_bound),
        rep.verdict("constant_net_size", True, len(consts)),
    ]
    wit = [] if worst <= args.epsilon else [rep.witness("coverage", "epsilon_net", (arg,))]
    return verdicts, wit, {}, {}


def cmd_report(cfg, args):
    reports = rep.load_reports(args.inputs)
    verdicts = []
    for r in reports:
        for v in r.get("verdicts", []):
            verdicts.append(rep.verdict(f"{r['subcommand']}:{v['check']}", v["ok"], v.get("value"), v.get("detail", "")))
    verdicts.append(rep.verdict("scope", True, None, rep.SCOPE_NOTE))
    wit = [w for r in reports for w in r.get("witnesses", [])]
    table = "".join(rep.verdict_table(r) for r in reports)
    return verdicts, wit, {"summary.txt": table}, {}


# -- parser ------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file")
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--out", help="directory for the report and artifacts")
    p.add_argument("--model", choices=["finite", "strip", "minkowski", "cone"])


def _cone_args(p):
    p.add_argument("--mesh", help="mesh JSON file (otherwise built from --radius/--resolution)")
    p.add_argument("--oracle", help="binary distance cache matching --mesh")
    p.add_argument("--radius", type=float)
    p.add_argument("--resolution", type=int)
    p.add_argument("--hops", type=int)
    p.add_argument("--inner", type=float, help="inner radius; builds an annulus")


def _slice_args(p):
    p.add_argument("--samples", type=int, default=21)
    p.add_argument("--xrange", default="-1,1")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lorentzcauchy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def leaf(group_parsers, name, func, model="cone"):
        p = group_parsers.add_parser(name)
        _common(p)
        p.set_defaults(func=func, default_model=model, leaf_parser=p)
        return p

    mesh = sub.add_parser("mesh").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(mesh, "build", cmd_mesh_build)
    _cone_args(p)

    space = sub.add_parser("space").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(space, "check", cmd_space_check, "finite")
    p.add_argument("--space")

    jd = sub.add_parser("jd").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(jd, "compute", cmd_jd_compute, "finite")
    p.add_argument("--space")

    graph = sub.add_parser("graph").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(graph, "validate", cmd_graph_validate)
    _cone_args(p)
    p.add_argument("--graph", action="append", help="graph JSON file (repeatable)")
    p.add_argument("--count", type=int, default=5, help="random graphs when no --graph is given")
    p.add_argument("--mode", choices=[CAUCHY, STRONG], default=STRONG)
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)

    dj = sub.add_parser("dj").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(dj, "pair", cmd_dj_pair)
    _cone_args(p)
    _slice_args(p)
    p.add_argument("--a", type=float, help="slice time, or constant radius for cone")
    p.add_argument("--b", type=float)
    p = leaf(dj, "matrix", cmd_dj_matrix)
    _cone_args(p)
    _slice_args(p)
    p.add_argument("--times", default="0.2,0.5,0.7")
    p.add_argument("--graph", action="append")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    p = leaf(dj, "axioms", cmd_dj_axioms)
    _cone_args(p)
    p.add_argument("--graph", action="append")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    p.add_argument("--trials", type=int)

    curves = sub.add_parser("curves").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(curves, "crossings", cmd_curves_crossings)
    _cone_args(p)
    p.add_argument("--graphs", type=int, default=10)
    p.add_argument("--curves", type=int, default=10)
    p.add_argument("--violations", type=int, default=5)
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)

    complete = sub.add_parser("complete").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(complete, "strip", cmd_complete_strip, "strip")
    _slice_args(p)
    p.add_argument("--terms", type=int, default=64)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p = leaf(complete, "cone", cmd_complete_cone)
    _cone_args(p)
    p.add_argument("--terms", type=int, default=30)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--t-max", dest="t_max", type=float, default=4.0)
    p = leaf(complete, "finite", cmd_complete_finite, "finite")
    p.add_argument("--space")
    p.add_argument("--sequence", help="comma-separated labels of a timelike sequence")

    timefn = sub.add_parser("timefn").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(timefn, "build", cmd_timefn_build, "finite")
    p.add_argument("--space")
    p.add_argument("--enumeration", help="comma-separated labels")
    p = leaf(timefn, "levels", cmd_timefn_levels, "finite")
    p.add_argument("--space")
    p.add_argument("--enumeration")
    p.add_argument("--levels", default="0")

    blaschke = sub.add_parser("blaschke").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = leaf(blaschke, "net", cmd_blaschke_net)
    _cone_args(p)
    p.add_argument("--center", type=float, default=2.0, help="constant radius of the center graph")
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--probes", type=int, default=500)
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)

    p = sub.add_parser("report")
    _common(p)
    p.add_argument("inputs", nargs="+", help="report JSON files")
    p.set_defaults(func=cmd_report, action=None, default_model="finite", leaf_parser=p)
    return parser


def _emit(report: dict, artifacts: dict, binaries: dict, out: str | None, name: str) -> None:
    if out is None:
        sys.stdout.write(rep.dumps(report))
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / f"{name}.json").write_text(rep.dumps(report))
    for fname, text in artifacts.items():
        (d / fname).write_text(text)
    for fname, obj in binaries.items():
        obj.save(d / fname)
    sys.stdout.write(rep.verdict_table(report))


def _parse(argv) -> argparse.Namespace:
    """Parse twice when ``--config`` is given so file values become option defaults.

    Explicit command-line flags always win over the file.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            values = parse_config_file(args.config)
        except InputError as exc:
            parser.exit(EXIT_INPUT, f"lorentzcauchy: error: {exc}\n")
        known = {a.dest for a in args.leaf_parser._actions}
        args.leaf_parser.set_defaults(**{k: v for k, v in values.items() if k in known and k not in _CONFIG_FIELDS})
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    args = _parse(argv)
    name = args.group if args.action is None else f"{args.group} {args.action}"
    t0 = time.perf_counter()
    cfg = None
    try:
        cfg = build_config(args)
        verdicts, witnesses, artifacts, binaries = args.func(cfg, args)
    except LorentzError as exc:
        status = EXIT_INPUT if isinstance(exc, InputError) else EXIT_INVARIANT
        report = rep.make_report(
            name,
            cfg.echo() if cfg else {},
            [rep.verdict("error", False, exc.code, str(exc))],
            [rep.witness("error", exc.code, exc.witness)],
            time.perf_counter() - t0,
        )
        report["error"] = {"class": exc.code, "message": str(exc)}
        sys.stderr.write(f"{name}: {exc.code}: {exc}\n")
        _emit(report, {}, {}, getattr(cfg, "out", None), name.replace(" ", "_"))
        return status
    report = rep.make_report(name, cfg.echo(), verdicts, witnesses, time.perf_counter() - t0)
    ok = rep.report_ok(report)
    if not ok:
        cls = witnesses[0]["invariant"] if witnesses else next(v["check"] for v in verdicts if not v["ok"])
        report["error"] = {"class": cls, "message": "one or more verdicts failed"}
        sys.stderr.write(f"{name}: {cls}\n")
    _emit(report, artifacts, binaries, cfg.out, name.replace(" ", "_"))
    return EXIT_OK if ok else EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
