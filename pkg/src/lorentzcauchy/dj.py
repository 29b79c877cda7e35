"""The symmetrized distance ``d_J`` on points and on sampled sets.

``d_J(x, y) = d(x, y) + d(y, x)`` and ``d_J(A, B)`` is its supremum over
``A x B``.  Sets are finite samples here, so the supremum is an exhaustive
maximum; on continuum sets it is a lower bound that improves under
refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cauchy import CAUCHY, CauchyGraph, Verdict, lipschitz_envelope, validate_graph
from .errors import InputError, PreconditionError
from .numerics import TAIL_TOL_FACTOR, extrapolate_limit, tail_trend

SELF_DISTANCE_TOL = 1e-6


def _as_points(S) -> np.ndarray:
    if isinstance(S, CauchyGraph):
        return S.points()
    P = np.asarray(S, dtype=float)
    if P.size == 0:
        raise InputError("d_J needs nonempty sets")
    return P


def dj_point(model, x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(model.dist_matrix(x, y)[0, 0] + model.dist_matrix(y, x)[0, 0])


def dj_kernel(model, A, B) -> np.ndarray:
    """``d_J(a, b)`` for every ``a`` in ``A`` and ``b`` in ``B``."""
    P, Q = _as_points(A), _as_points(B)
    return model.dist_matrix(P, Q) + model.dist_matrix(Q, P).T


@dataclass(frozen=True)
class DJReport:
    """``d_J(A, B)`` with the sample pair attaining it."""

    value: float
    witness: tuple[int, int]
    tolerance: float

    def as_dict(self) -> dict:
        return {"value": self.value, "witness": list(self.witness), "tolerance": self.tolerance}


def dj_set(model, A, B) -> DJReport:
    """Exhaustive maximum of ``d_J`` over the sample product ``A x B``.

    Ties resolve to the first pair in index order.
    """
    K = dj_kernel(model, A, B)
    i, j = np.unravel_index(int(np.argmax(K)), K.shape)
    return DJReport(float(K[i, j]), (int(i), int(j)), model.tolerance)


def dj_matrix(model, sets) -> np.ndarray:
    n = len(sets)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            out[i, j] = out[j, i] = dj_set(model, sets[i], sets[j]).value
    return out


def neighbourhood_mask(model, P, A, eps: float) -> np.ndarray:
    """Which points of ``P`` lie in ``N(A, eps) = {x : d_J(x, A) <= eps}``."""
    return dj_kernel(model, P, A).max(axis=1) <= eps


@dataclass
class AxiomReport:
    checks: dict[str, Verdict] = field(default_factory=dict)
    evaluated_pairs: int = 0
    evaluated_triples: int = 0

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.checks.values())

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "evaluated_pairs": self.evaluated_pairs,
            "evaluated_triples": self.evaluated_triples,
            "checks": {k: v.as_dict() for k, v in self.checks.items()},
        }


def _set_gap(A, B) -> float:
    """How far two samples differ as sets of coordinates (sample-level identity test)."""
    if isinstance(A, CauchyGraph) and isinstance(B, CauchyGraph):
        return float(np.abs(A.f - B.f).max())
    P, Q = _as_points(A), _as_points(B)
    if P.shape != Q.shape:
        return math.inf
    return float(np.abs(np.sort(P, axis=0) - np.sort(Q, axis=0)).max())


def verify_metric_axioms(
    model,
    sets,
    trials: int = 200,
    rng: np.random.Generator | None = None,
    self_tol: float = SELF_DISTANCE_TOL,
) -> AxiomReport:
    """Check the metric axioms of ``d_J`` on randomly drawn triples of sets.

    * symmetry: ``d_J(A, B) == d_J(B, A)`` exactly, both evaluated separately;
    * self distance: ``d_J(A, A) <= self_tol``;
    * definiteness: sets differing by more than the model tolerance somewhere
      have ``d_J`` above that tolerance;
    * triangle: ``d_J(A, C) <= d_J(A, B) + d_J(B, C) + 3 * tol``.

    Failures carry the first offending index tuple.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    n = len(sets)
    if n == 0:
        raise InputError("no sets given")
    tol = model.tolerance
    cache: dict[tuple[int, int], float] = {}

    def dj(i, j):
        if (i, j) not in cache:
            cache[i, j] = dj_set(model, sets[i], sets[j]).value
        return cache[i, j]

    rep = AxiomReport()
    sym = selfd = definite = tri = None
    worst_tri = -math.inf
    worst_self = 0.0
    for _ in range(trials):
        i, j, k = (int(v) for v in rng.integers(n, size=3))
        rep.evaluated_triples += 1
        for a, b in ((i, j), (j, k), (i, k)):
            ab, ba = dj(a, b), dj(b, a)
            if sym is None and ab != ba:
                sym = (a, b)
            if a == b:
                worst_self = max(worst_self, ab)
                if selfd is None and ab > self_tol:
                    selfd = (a,)
            elif definite is None and _set_gap(sets[a], sets[b]) > tol and ab <= tol:
                definite = (a, b)
        excess = dj(i, k) - dj(i, j) - dj(j, k)
        worst_tri = max(worst_tri, excess)
        if tri is None and excess > 3 * tol:
            tri = (i, j, k)
    for a in range(n):
        # every set's self distance, not only the sampled ones
        s = dj(a, a)
        worst_self = max(worst_self, s)
        if selfd is None and s > self_tol:
            selfd = (a,)
    rep.evaluated_pairs = len(cache)
    rep.checks["symmetry"] = Verdict(sym is None, sym, 0.0 if sym is None else None, "exact")
    rep.checks["self_distance"] = Verdict(selfd is None, selfd, worst_self, f"<= {self_tol}")
    rep.checks["definiteness"] = Verdict(definite is None, definite, None, f"floor {tol}")
    rep.checks["triangle"] = Verdict(tri is None, tri, worst_tri, f"excess <= {3 * tol}")
    return rep


# -- limits of Cauchy sequences ------------------------------------------------

CONVERGENT, NOT_CAUCHY, BOUNDARY_ESCAPE = "convergent", "not_cauchy", "boundary_escape"


@dataclass
class LimitReport:
    verdict: str
    limit: object | None
    limit_gap: float
    tail_dj: list[float]
    witness: tuple[int, int] | None = None
    lipschitz: Verdict | None = None

    def as_dict(self) -> dict:
        lim = self.limit
        if isinstance(lim, CauchyGraph):
            lim = lim.f.tolist()
        elif isinstance(lim, np.ndarray):
            lim = lim.tolist()
        return {
            "verdict": self.verdict,
            "limit": lim,
            "limit_gap": self.limit_gap,
            "tail_dj": self.tail_dj,
            "witness": list(self.witness) if self.witness else None,
            "lipschitz": self.lipschitz.as_dict() if self.lipschitz else None,
        }


def limit_of_cauchy_sequence(model, sets, epsilon: float) -> LimitReport:
    """Limit of a finite prefix of a ``d_J``-Cauchy sequence of matched samples.

    ``sets`` are point arrays of one shape (point ``i`` of every set
    tracking the same sample) or :class:`CauchyGraph` objects.  The limit is
    estimated coordinate-wise by Lubkin extrapolation of the sequence.  The
    prefix is certified Cauchy when its consecutive ``d_J`` steps have a
    summable tail and the extrapolated ``d_J``-distance to the limit tends to
    at most ``epsilon``.  The verdict is

    * ``not_cauchy`` with the largest tail step as witness,
    * ``boundary_escape`` when the extrapolated limit leaves the spacetime
      (radius or time reaching the edge),
    * ``convergent`` otherwise; for graphs the limit is also checked against
      the Cauchy log-Lipschitz condition.
    """
    if len(sets) < 2:
        raise InputError("need at least two sets")
    graphs = isinstance(sets[0], CauchyGraph)
    arrays = [_as_points(S) for S in sets]
    if any(a.shape != arrays[0].shape for a in arrays):
        raise InputError("sets must be matched samples of equal size")
    pts = np.stack(arrays)
    tol = model.tolerance
    steps = np.array([dj_set(model, sets[j], sets[j + 1]).value for j in range(len(sets) - 1)])
    partial = np.concatenate([[0.0], np.cumsum(steps)])

    flat = pts.reshape(len(sets), -1)
    lim = np.asarray(extrapolate_limit(flat)).reshape(pts[0].shape)
    if graphs:
        # vertex columns are exact integers; only radii are extrapolated
        lim[:, 0] = pts[0][:, 0]
    gaps = np.array([dj_set(model, pts[j], lim).value for j in range(len(sets))])
    limit_gap = float(abs(extrapolate_limit(gaps)))
    tail_start = len(sets) - max(4, len(sets) // 4)
    tail = [float(v) for v in gaps[tail_start:]]

    trend = tail_trend(partial, tol)
    if trend.kind == "diverging" or limit_gap > epsilon:
        j = tail_start + int(np.argmax(steps[tail_start:])) if tail_start < len(steps) else int(np.argmax(steps))
        return LimitReport(NOT_CAUCHY, None, limit_gap, tail, (j, j + 1))

    margin = TAIL_TOL_FACTOR * tol
    inside = model.contains(lim, margin)
    if graphs:
        inside = inside & (lim[:, 1] > margin)
    if not inside.all():
        return LimitReport(BOUNDARY_ESCAPE, lim, limit_gap, tail, (int(np.flatnonzero(~inside)[0]), -1))

    if graphs:
        g = CauchyGraph(model, lim[:, 1])
        return LimitReport(CONVERGENT, g, limit_gap, tail, None, validate_graph(g, CAUCHY))
    return LimitReport(CONVERGENT, lim, limit_gap, tail)


# -- epsilon nets ----------------------------------------------------------------


def _pair_bound(step: float, slope: float, a_max: float) -> float:
    """Largest ``d`` between points of two ``slope``-Lipschitz log-graphs within ``step/2``.

    With ``Lambda = ln(b/a)`` confined to ``[D, slope*D + step/2]`` by
    causality and the Lipschitz bound, ``d = a*sqrt(expm1(Lambda-D)*expm1(Lambda+D))``
    is maximised at the top of the interval; the remaining one-dimensional
    maximum over ``D`` is taken on a fine grid plus a half-step safety
    factor.
    """
    half = 0.5 * step
    gap = 1.0 - slope
    d_max = half / gap if gap > 0 else 1e3
    D = np.linspace(0.0, d_max, 2001)
    lam = slope * D + half
    val = np.expm1(lam - D) * np.expm1(lam + D)
    return float(a_max * np.sqrt(np.clip(val, 0.0, None)).max() * 1.001)


@dataclass(frozen=True, eq=False)
class BlaschkeNet:
    """A finite ``epsilon``-net of the closed ``d_J``-ball around a graph.

    Members are the graphs ``exp(H)`` where ``H`` is the ``slope``-Lipschitz
    envelope of ``ln f_center + step * k`` for integer vectors ``k`` within
    the ball's radial range.  That family is finite, and every strong graph
    in the ball is within ``epsilon`` of the member obtained by rounding its
    log-offsets to the grid.  Members are produced on demand because the
    family is far too large to list except in degenerate cases.
    """

    center: CauchyGraph
    r: float
    epsilon: float
    slope: float
    step: float
    k_lo: np.ndarray
    k_hi: np.ndarray

    @property
    def log10_size_bound(self) -> float:
        """``log10`` of the number of integer offset vectors (an upper bound on the net size)."""
        return float(np.log10(self.k_hi - self.k_lo + 1).sum())

    def member_index(self, g: CauchyGraph) -> tuple[int, ...]:
        k = np.rint((g.log_f - self.center.log_f) / self.step).astype(np.int64)
        return tuple(np.clip(k, self.k_lo, self.k_hi).tolist())

    def member(self, key) -> CauchyGraph:
        k = np.asarray(key, dtype=float)
        q = self.center.log_f + self.step * k
        m = self.center.model
        h = lipschitz_envelope(m, np.arange(m.n_vertices), q, self.slope)
        return self.center.with_values(np.exp(h))

    def nearest(self, g: CauchyGraph) -> CauchyGraph:
        return self.member(self.member_index(g))

    def coverage(self, probes) -> tuple[float, int, int]:
        """Max distance from ``probes`` to their net members, the argmax, and members used."""
        worst, arg, used = -math.inf, -1, set()
        for i, g in enumerate(probes):
            key = self.member_index(g)
            used.add(key)
            v = dj_set(self.center.model, g, self.member(key)).value
            if v > worst:
                worst, arg = v, i
        return worst, arg, len(used)


def blaschke_net(center: CauchyGraph, r: float, epsilon: float, margin: float = 0.05) -> BlaschkeNet:
    """Build the net for the ball of radius ``r`` around ``center``.

    The net covers strong graphs with the given ``margin``.  Requires the
    ball to stay away from the apex: ``min f_center - r > 0``.
    """
    if r < 0 or epsilon <= 0:
        raise InputError("need r >= 0 and epsilon > 0")
    f = center.f
    if f.min() - r <= 0:
        raise PreconditionError(f"ball of radius {r} reaches the apex (min radius {f.min()})", (int(np.argmin(f)),))
    slope = 1.0 - margin
    a_max = float(f.max() + r) * math.exp(epsilon)
    lo, hi = 1e-12, 1.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _pair_bound(mid, slope, a_max) <= epsilon:
            lo = mid
        else:
            hi = mid
    step = lo
    # radial pairs confine every ball member to f_c - r <= f <= f_c + r
    k_lo = np.floor((np.log(f - r) - np.log(f)) / step).astype(np.int64)
    k_hi = np.ceil((np.log(f + r) - np.log(f)) / step).astype(np.int64)
    return BlaschkeNet(center, float(r), float(epsilon), slope, step, k_lo, k_hi)


def constant_net(model, c: float, r: float, epsilon: float) -> list[CauchyGraph]:
    """``ceil(2r/eps) + 1`` constant graphs spaced evenly over ``[c - r, c + r]``.

    Covers every constant graph in the ball, since constants at distance
    ``|c1 - c2|`` apart lie within ``eps / 2`` of a member.
    """
    if c - r <= 0:
        raise PreconditionError(f"ball of radius {r} around constant {c} reaches the apex")
    k = math.ceil(2 * r / epsilon) + 1 if r > 0 else 1
    vals = np.linspace(c - r, c + r, k) if k > 1 else np.array([c])
    return [CauchyGraph.constant(model, v) for v in vals]


def sample_ball(center: CauchyGraph, r: float, count: int, rng: np.random.Generator, margin: float = 0.05, max_tries: int = 100_000) -> list[CauchyGraph]:
    """Random strong graphs inside the closed ``d_J``-ball of radius ``r`` around ``center``.

    A candidate mixes the center's log-radius with a random Lipschitz
    envelope clamped to the ball's overall radial range (clamping by
    constants keeps the Lipschitz constant), using a uniform random weight.
    Candidates with ``d_J`` to the center above ``r`` are rejected.  The
    center must itself be a strong graph with the given margin for the
    candidates to be.
    """
    m = center.model
    n = m.n_vertices
    lc = center.log_f
    lo = float(np.log(max(center.f.min() - r, 1e-300)))
    hi = float(np.log(center.f.max() + r))
    out: list[CauchyGraph] = []
    for _ in range(max_tries):
        if len(out) == count:
            return out
        k = int(rng.integers(1, max(2, n // 10) + 1))
        seeds = rng.choice(n, size=k, replace=False)
        vals = rng.uniform(lo, hi, size=k)
        h = np.clip(lipschitz_envelope(m, seeds, vals, 1.0 - margin), lo, hi)
        t = rng.random()
        g = center.with_values(np.exp((1.0 - t) * lc + t * h))
        if dj_set(m, center, g).value <= r:
            out.append(g)
    raise PreconditionError(f"only {len(out)} of {count} ball samples accepted")
