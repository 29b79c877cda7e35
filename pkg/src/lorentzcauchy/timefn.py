"""Cauchy time functions ``tau = ln(f / g)`` on finite Lorentzian spaces.

With an enumeration ``z_1, z_2, ...`` of the points,

    f(x) = sum_k 2^-k d(z_k, x) / (1 + d(z_k, x))
    g(x) = sum_k 2^-k d(x, z_k) / (1 + d(x, z_k))

The sums are evaluated in exact rational arithmetic (every float is a
dyadic rational), so order comparisons of ``tau`` are exact; the float
``tau`` values are only for output.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .causal import FiniteLorentzianSpace, compute_boundaries, verify_distinguishing
from .errors import InputError, InvariantError, PreconditionError


def _series(rows: np.ndarray, order: Sequence[int]) -> list[Fraction]:
    """``sum_k 2^-(k+1) v/(1+v)`` over ``v = rows[order[k]]``, column by column."""
    n = rows.shape[1]
    out = [Fraction(0)] * n
    for k, z in enumerate(order):
        w = Fraction(1, 2 ** (k + 1))
        for x in range(n):
            v = rows[z, x]
            if v > 0:
                fv = Fraction(float(v))
                out[x] += w * fv / (1 + fv)
    return out


class _Ratio:
    """``f / g`` in ``[0, inf]`` with exact ordering; ``inf`` when ``g = 0``."""

    __slots__ = ("f", "g")

    def __init__(self, f: Fraction, g: Fraction):
        self.f, self.g = f, g

    def __lt__(self, other: "_Ratio") -> bool:
        # f1/g1 < f2/g2 with g = 0 meaning +inf
        if self.g == 0:
            return False
        if other.g == 0:
            return True
        return self.f * other.g < other.f * self.g

    def __eq__(self, other) -> bool:
        if self.g == 0 or other.g == 0:
            return self.g == other.g
        return self.f * other.g == other.f * self.g

    def compare_level(self, bound: Fraction) -> int:
        """Sign of ``f/g - bound``."""
        if self.g == 0:
            return 1
        lhs, rhs = self.f, bound * self.g
        return (lhs > rhs) - (lhs < rhs)


@dataclass(frozen=True, eq=False)
class TimeFunctionValues:
    f: tuple[Fraction, ...]
    g: tuple[Fraction, ...]
    enumeration: tuple[int, ...]
    labels: tuple

    @property
    def n(self) -> int:
        return len(self.f)

    @property
    def tau(self) -> np.ndarray:
        """Float ``ln(f/g)``, with ``-inf`` where ``f = 0`` and ``+inf`` where ``g = 0``."""
        out = np.empty(self.n)
        for i, (f, g) in enumerate(zip(self.f, self.g)):
            if f == 0:
                out[i] = -math.inf
            elif g == 0:
                out[i] = math.inf
            else:
                # log of each factor separately keeps tiny rationals in range
                out[i] = _log_fraction(f) - _log_fraction(g)
        return out

    def ratio(self, i: int) -> _Ratio:
        return _Ratio(self.f[i], self.g[i])

    def less(self, i: int, j: int) -> bool:
        """Exact ``tau(i) < tau(j)``."""
        return self.ratio(i) < self.ratio(j)

    def level_sign(self, i: int, level: float) -> int:
        """Exact sign of ``tau(i) - level`` (``level`` enters through the float ``exp(level)``)."""
        if self.f[i] == 0:
            return -1
        return self.ratio(i).compare_level(Fraction(math.exp(level)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "f", "g", "tau"])
        for lab, f, g, t in zip(self.labels, self.f, self.g, self.tau):
            w.writerow([lab, repr(float(f)), repr(float(g)), _fmt_tau(t)])
        return buf.getvalue()

    def as_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "enumeration": [self.labels[i] for i in self.enumeration],
            "f": [float(v) for v in self.f],
            "g": [float(v) for v in self.g],
            "tau": [_fmt_tau(t) for t in self.tau],
        }


def _fmt_tau(t: float) -> str:
    if t == math.inf:
        return "+inf"
    if t == -math.inf:
        return "-inf"
    return repr(float(t))


def _log_fraction(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def build_time_function(space: FiniteLorentzianSpace, enumeration: Sequence | None = None) -> TimeFunctionValues:
    """Evaluate ``f``, ``g`` and ``tau`` and verify the time-function properties.

    Preconditions: the space satisfies its invariants, distinguishes points,
    and has empty spacelike boundary.  Afterwards ``tau`` is checked to be
    strictly increasing along every causal pair and to be infinite exactly
    on the chronological boundaries; a violation raises
    :class:`InvariantError` naming the pair or point.
    """
    space.check()
    ok, pair = verify_distinguishing(space)
    if not ok:
        raise PreconditionError(f"points {pair} are not distinguished by the distance", pair)
    bd = compute_boundaries(space)
    if bd.spacelike_boundary:
        w = min(bd.spacelike_boundary)
        err = PreconditionError(f"point {w} lies in the spacelike boundary", (w,))
        err.code = "spacelike_boundary"
        raise err
    order = tuple(range(space.n)) if enumeration is None else tuple(space.index(p) for p in enumeration)
    if sorted(order) != list(range(space.n)):
        raise InputError("enumeration must list every point exactly once")
    d = space.dist
    f = _series(d, order)  # rows z: d(z, x)
    g = _series(d.T, order)  # rows z: d(x, z)
    tf = TimeFunctionValues(tuple(f), tuple(g), order, space.labels)
    for x in range(space.n):
        if f[x] == 0 and g[x] == 0:
            raise InvariantError(f"f and g both vanish at {x}", (x,), invariant="spacelike_boundary")
        if (f[x] == 0) != (x in bd.past_chronological):
            raise InvariantError(f"f({x}) = 0 does not match the past boundary", (x,), invariant="boundary_values")
        if (g[x] == 0) != (x in bd.future_chronological):
            raise InvariantError(f"g({x}) = 0 does not match the future boundary", (x,), invariant="boundary_values")
    w = monotonicity_failure(space, tf)
    if w is not None:
        raise InvariantError(f"tau is not strictly increasing on {w}", w, invariant="monotonicity")
    return tf


def monotonicity_failure(space: FiniteLorentzianSpace, tf: TimeFunctionValues) -> tuple[int, int] | None:
    """First causal pair ``x < y`` (index order) with ``tau(x) >= tau(y)``, exactly."""
    c = space.causal
    for x in range(space.n):
        for y in np.flatnonzero(c[x]):
            y = int(y)
            if y != x and not tf.less(x, y):
                return (x, y)
    return None


# -- chains ----------------------------------------------------------------------


def cover_relation(space: FiniteLorentzianSpace) -> np.ndarray:
    """``x`` covered by ``y``: ``x < y`` with nothing strictly in between."""
    strict = space.causal & ~np.eye(space.n, dtype=bool)
    s = strict.astype(np.int64)
    return strict & ~((s @ s) > 0)


def maximal_chains(space: FiniteLorentzianSpace) -> Iterator[list[int]]:
    """Enumerate all maximal chains (exponentially many in general)."""
    cov = cover_relation(space)
    strict = space.causal & ~np.eye(space.n, dtype=bool)
    minimal = [x for x in range(space.n) if not strict[:, x].any()]

    def walk(path):
        nxt = np.flatnonzero(cov[path[-1]])
        if nxt.size == 0:
            yield list(path)
            return
        for y in nxt:
            path.append(int(y))
            yield from walk(path)
            path.pop()

    for m in minimal:
        yield from walk([m])


def chain_crossings(tf: TimeFunctionValues, chain: Sequence[int], level: float) -> int:
    """Points with ``tau = level`` plus steps with ``tau(x) < level < tau(y)``."""
    sign = [tf.level_sign(i, level) for i in chain]
    on = sum(1 for s in sign if s == 0)
    steps = sum(1 for a, b in zip(sign, sign[1:]) if a < 0 < b)
    return on + steps


@dataclass(frozen=True)
class LevelReport:
    level: float
    ok: bool
    min_crossings: int
    max_crossings: int
    chains: int
    non_straddling: int
    witness: list[int] | None

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "ok": self.ok,
            "min_crossings": self.min_crossings,
            "max_crossings": self.max_crossings,
            "chains": self.chains,
            "non_straddling": self.non_straddling,
            "witness": self.witness,
        }


def verify_level_crossing(space: FiniteLorentzianSpace, tf: TimeFunctionValues, level: float) -> LevelReport:
    """Check that every maximal chain straddling ``level`` crosses it exactly once.

    Rather than enumerating chains, a dynamic program over the cover
    relation (in a topological order) tracks, for every point, the fewest
    and most crossings over maximal chains from it, and the number of
    chains.  Maximal chains that do not straddle the level are counted and
    reported; they cannot occur when every minimal point has ``tau = -inf``
    and every maximal one ``+inf``.  The witness is a chain whose crossing
    count differs from one.
    """
    if not math.isfinite(level):
        raise InputError("level must be finite")
    n = space.n
    cov = cover_relation(space)
    strict = space.causal & ~np.eye(n, dtype=bool)
    sign = [tf.level_sign(i, level) for i in range(n)]
    topo = sorted(range(n), key=lambda x: int(strict[:, x].sum()))
    # lo/hi range over maximal chains from x that end above the level
    lo: list[float] = [math.inf] * n
    hi: list[float] = [-math.inf] * n
    count = [0] * n
    bad_count = [0] * n  # chains from x ending at a maximal point with tau <= level
    best_lo = [-1] * n
    best_hi = [-1] * n
    for x in reversed(topo):
        here = 1 if sign[x] == 0 else 0
        succ = [int(y) for y in np.flatnonzero(cov[x])]
        if not succ:
            if sign[x] > 0:
                lo[x] = hi[x] = here
            count[x] = 1
            bad_count[x] = 1 if sign[x] <= 0 else 0
            continue
        for y in succ:
            v = here + (1 if sign[x] < 0 < sign[y] else 0)
            if v + lo[y] < lo[x]:
                lo[x], best_lo[x] = v + lo[y], y
            if v + hi[y] > hi[x]:
                hi[x], best_hi[x] = v + hi[y], y
        count[x] = sum(count[y] for y in succ)
        bad_count[x] = sum(bad_count[y] for y in succ)
    minimal = [x for x in range(n) if not strict[:, x].any()]
    straddle = [x for x in minimal if sign[x] < 0]
    total = sum(count[x] for x in minimal)
    non_straddling = sum(count[x] for x in minimal if sign[x] >= 0) + sum(bad_count[x] for x in straddle)
    if not straddle:
        return LevelReport(level, True, 0, 0, total, non_straddling, None)
    mn = min(straddle, key=lambda x: lo[x])
    mx = max(straddle, key=lambda x: hi[x])
    if lo[mn] == math.inf:
        return LevelReport(level, True, 0, 0, total, non_straddling, None)
    witness = None
    if lo[mn] != 1:
        witness = _follow(mn, best_lo)
    elif hi[mx] != 1:
        witness = _follow(mx, best_hi)
    return LevelReport(level, witness is None, int(lo[mn]), int(hi[mx]), total, non_straddling, witness)


def _follow(x: int, nxt: list[int]) -> list[int]:
    path = [x]
    while nxt[path[-1]] >= 0:
        path.append(nxt[path[-1]])
    return path
