"""Acceptance criteria 1-9, one test each.

Every test prints a single ``criterion N: PASS|FAIL ...`` line before
asserting, so ``pytest -s`` (or the captured output of a failure) shows the
verdict with its measured numbers.
"""

import json
import math
import time
from pathlib import Path

import numpy as np

from lorentzcauchy.causal import (
    FiniteLorentzianSpace,
    chain_space,
    maximal_causal_relation,
    minkowski_space,
    random_weighted_poset,
    verify_distinguishing,
)
from lorentzcauchy.cauchy import CauchyGraph, random_strong_graph, violating_graph
from lorentzcauchy.cli import EXIT_OK, main
from lorentzcauchy.curves import crossing_count, random_timelike_curve, witness_curve
from lorentzcauchy.dj import (
    BOUNDARY_ESCAPE,
    CONVERGENT,
    blaschke_net,
    dj_set,
    limit_of_cauchy_sequence,
    sample_ball,
    verify_metric_axioms,
)
from lorentzcauchy.models import MinkowskiModel, StripModel, cone_distance, minkowski_slice, strip_slice
from lorentzcauchy.report import SCOPE_NOTE
from lorentzcauchy.timefn import build_time_function, monotonicity_failure, verify_level_crossing

DATA = Path(__file__).resolve().parents[1] / "data"


def announce(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def cli_json(capsys, *argv):
    code = main(list(argv))
    out, _ = capsys.readouterr()
    return code, json.loads(out)


# -- 1 -------------------------------------------------------------------------------------


def test_criterion_1_strip_slices(capsys):
    t0 = time.perf_counter()
    code, report = cli_json(capsys, "dj", "pair", "--model", "strip", "--a", "0.2", "--b", "0.7")
    elapsed = time.perf_counter() - t0
    value = report["verdicts"][0]["value"]
    ok = code == EXIT_OK and abs(value - 0.5) <= 1e-9 and elapsed < 1.0
    assert announce(1, ok, f"d_J(S_0.2, S_0.7) = {value!r}, {elapsed:.3f} s")


# -- 2 -------------------------------------------------------------------------------------


def test_criterion_2_cone_formula():
    got = float(cone_distance(1.0, 2.0, 0.5))
    expect = math.sqrt(5.0 - 4.0 * math.cosh(0.5))
    same_ray = [(float(cone_distance(a, b, 0.0)), b - a) for a, b in [(1.0, 2.0), (0.3, 7.25), (0.0, 4.0), (2.5, 2.5)]]
    ok = abs(got - expect) <= 1e-12 and all(x == y for x, y in same_ray)
    assert announce(2, ok, f"coneDistance(1, 2, 0.5) = {got!r} vs {expect!r}; same-ray exact: {same_ray}")


# -- 3 -------------------------------------------------------------------------------------


def test_criterion_3_metric_axioms(cone4):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    graphs = [random_strong_graph(cone4, rng) for _ in range(50)]
    rep = verify_metric_axioms(cone4, graphs, trials=200, rng=rng)
    elapsed = time.perf_counter() - t0
    checks = rep.checks
    ok = (
        cone4.n_vertices >= 100
        and checks["symmetry"].ok
        and checks["self_distance"].ok
        and checks["definiteness"].ok
        and checks["triangle"].ok
        and rep.evaluated_triples == 200
        and elapsed < 120
    )
    detail = ", ".join(f"{k}={'ok' if v.ok else 'FAIL'}({v.value})" for k, v in checks.items())
    assert announce(3, ok, f"{cone4.n_vertices} vertices, 50 graphs, {rep.evaluated_triples} triples: {detail}; {elapsed:.1f} s")


# -- 4 -------------------------------------------------------------------------------------


def test_criterion_4_crossings_both_directions(cone4):
    rng = np.random.default_rng(4)
    counts = []
    for _ in range(100):
        g = random_strong_graph(cone4, rng)
        lo, hi = float(g.f.min()), float(g.f.max())
        for _ in range(100):
            counts.append(crossing_count(random_timelike_curve(cone4, rng, lo / 10, hi * 10), g).count)
    witness_counts = []
    for _ in range(20):
        g, (p, q) = violating_graph(cone4, rng)
        witness_counts.append(crossing_count(witness_curve(g, p, q), g).count)
    ok = len(counts) == 10_000 and all(c == 1 for c in counts) and all(c != 1 for c in witness_counts)
    assert announce(
        4,
        ok,
        f"strong: {sum(c == 1 for c in counts)}/10000 cross once; violating witnesses cross {sorted(set(witness_counts))} times",
    )


# -- 5 -------------------------------------------------------------------------------------


def test_criterion_5_completeness_dichotomy():
    strip = limit_of_cauchy_sequence(StripModel(), [strip_slice(1.0 / j, (-1, 1), 21) for j in range(2, 65)], 1e-6)
    m = MinkowskiModel()
    mink = limit_of_cauchy_sequence(m, [minkowski_slice(1.0 / j, (-1, 1), 21) for j in range(1, 65)], 1e-6)
    to_s0 = dj_set(m, mink.limit, minkowski_slice(0.0, (-1, 1), 21)).value if mink.verdict == CONVERGENT else math.inf
    ok = strip.verdict == BOUNDARY_ESCAPE and mink.verdict == CONVERGENT and mink.limit_gap <= 1e-6 and to_s0 <= 1e-6
    assert announce(
        5, ok, f"strip: {strip.verdict}; Minkowski: {mink.verdict}, tail d_J {mink.limit_gap:.2e}, d_J(limit, S_0) {to_s0:.2e}"
    )


# -- 6 -------------------------------------------------------------------------------------


def test_criterion_6_time_function():
    t0 = time.perf_counter()
    tf = build_time_function(chain_space([1.0, 1.0], ["a", "b", "c"]), ["a", "b", "c"])
    tau_b = float(tf.tau[1])
    rng = np.random.default_rng(6)
    monotone_fail, level_fail, levels_tested = [], [], 0
    for k in range(200):
        n = int(rng.integers(2, 51))
        space = random_weighted_poset(n, rng)
        tf_k = build_time_function(space)
        if monotonicity_failure(space, tf_k) is not None:
            monotone_fail.append(k)
        finite = np.sort(tf_k.tau[np.isfinite(tf_k.tau)])
        levels = [0.0, *((finite[1:] + finite[:-1]) / 2)[:8], *finite[:4]]
        for level in levels:
            levels_tested += 1
            r = verify_level_crossing(space, tf_k, float(level))
            if not (r.ok and r.non_straddling == 0 and r.min_crossings == r.max_crossings == 1):
                level_fail.append((k, float(level)))
    elapsed = time.perf_counter() - t0
    ok = abs(tau_b - math.log(4.0)) <= 1e-12 and not monotone_fail and not level_fail and elapsed < 60
    assert announce(
        6,
        ok,
        f"tau(b) = {tau_b!r}; 200 posets, {levels_tested} levels, "
        f"monotonicity failures {monotone_fail[:3]}, level failures {level_fail[:3]}; {elapsed:.1f} s",
    )


# -- 7 -------------------------------------------------------------------------------------


def _general_position_sample(rng, t_range, n=20, gap=0.03):
    """Points whose pairs all stay ``gap`` away from being null related."""
    pts = []
    while len(pts) < n:
        p = np.array([rng.uniform(*t_range), rng.uniform(-1.0, 1.0)])
        if all(abs(abs(p[0] - q[0]) - abs(p[1] - q[1])) > gap for q in pts):
            pts.append(p)
    return np.array(pts)


def _grid(t_range, nt, x_range, nx):
    T, X = np.meshgrid(np.linspace(*t_range, nt), np.linspace(*x_range, nx), indexing="ij")
    return np.column_stack([T.ravel(), X.ravel()])


def test_criterion_7_jd_recovery():
    regions = {
        # sample region, witness grid inside the same region
        "strip": ((0.05, 0.95), _grid((0.002, 0.998), 26, (-2.0, 2.0), 51)),
        "minkowski": ((-1.0, 1.0), _grid((-2.5, 2.5), 36, (-3.5, 3.5), 51)),
    }
    mismatches, flagged, samples = {}, 0, 0
    for name, (t_range, grid) in regions.items():
        mismatches[name] = 0
        for seed in range(50):
            rng = np.random.default_rng(seed)
            pts = _general_position_sample(rng, t_range)
            jd = maximal_causal_relation(minkowski_space(np.vstack([pts, grid])), subset=range(len(pts)))
            ambient = (pts[None, :, 0] - pts[:, None, 0]) >= np.abs(pts[None, :, 1] - pts[:, None, 1])
            mismatches[name] += int((jd != ambient).sum())
            # a duplicated point gives two identical distance rows
            dup = int(rng.integers(len(pts)))
            ok_dist, pair = verify_distinguishing(minkowski_space(np.vstack([pts, pts[dup]])))
            flagged += (not ok_dist) and pair == (dup, len(pts))
            samples += 1
    ok = all(v == 0 for v in mismatches.values()) and flagged == samples
    assert announce(7, ok, f"{samples} samples of 20 points: J_d mismatches {mismatches}; duplicates flagged {flagged}/{samples}")


# -- 8 -------------------------------------------------------------------------------------


def test_criterion_8_blaschke_net(cone4):
    rng = np.random.default_rng(8)
    center = CauchyGraph.constant(cone4, 2.0)
    net = blaschke_net(center, 0.5, 0.05)
    probes = sample_ball(center, 0.5, 500, rng)
    in_ball = max(dj_set(cone4, center, p).value for p in probes)
    worst, _, used = net.coverage(probes)
    ok = len(probes) == 500 and in_ball <= 0.5 and worst <= 0.05 and math.isfinite(net.log10_size_bound)
    assert announce(
        8, ok, f"500 probes (max radius {in_ball:.4f}): max distance to net {worst:.5f}, {used} net elements used, "
        f"size bound 10^{net.log10_size_bound:.1f}"
    )


# -- 9 -------------------------------------------------------------------------------------


def test_criterion_9_scope_stated(capsys, tmp_path):
    runs = {
        "complete_strip": ["complete", "strip"],
        "complete_cone": ["complete", "cone", "--resolution", "2"],
        "complete_finite": ["complete", "finite", "--space", str(DATA / "3chain.json"), "--sequence", "a,b,c"],
    }
    stated, all_ok = [], True
    for name, argv in runs.items():
        code = main([*argv, "--out", str(tmp_path)])
        capsys.readouterr()
        report = json.loads((tmp_path / f"{name}.json").read_text())
        all_ok &= code == EXIT_OK
        stated.append(any(v["detail"] == SCOPE_NOTE for v in report["verdicts"]))
    code, summary = cli_json(capsys, "report", *(str(tmp_path / f"{n}.json") for n in runs))
    stated.append(summary["verdicts"][-1]["detail"] == SCOPE_NOTE)
    all_ok &= code == EXIT_OK
    ok = all(stated) and all_ok
    assert announce(9, ok, f"scope note present in {sum(stated)}/{len(stated)} reports; co-occurrence verdicts all pass: {all_ok}")
