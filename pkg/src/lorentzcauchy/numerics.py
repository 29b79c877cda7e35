"""Sequence extrapolation and tail-trend classification.

Finite prefixes stand in for limits throughout the package, so the two
helpers here are shared: a Lubkin transform for estimating the limit of a
convergent prefix, and a coarse classifier telling convergent tails from
divergent ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Cauchy criterion on the tail runs at this multiple of the base tolerance.
TAIL_TOL_FACTOR = 10.0


def extrapolate_limit(seq) -> np.ndarray:
    """Estimate ``lim s_n`` from a finite prefix, column-wise.

    Applies Lubkin's W transform to the last four terms.  It is exact for
    ``s + c/(n + b)`` whatever the offset ``b`` and for ``s + c * q**n``,
    the two convergence shapes the completeness suites produce.  Columns
    whose last increments vanish, and columns where the transform is
    undefined, return their last value.
    """
    s = np.asarray(seq, dtype=float)
    squeeze = s.ndim == 1
    if squeeze:
        s = s[:, None]
    last = s[-1].copy()
    if s.shape[0] < 4:
        return last[0] if squeeze else last
    w = s[-4:]
    d = np.diff(w, axis=0)
    d2 = np.diff(d, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        est = w[1] - d[0] * d[1] * d2[1] / (d[2] * d2[0] - d[0] * d2[1])
    flat = np.all(d == 0.0, axis=0)
    bad = ~np.isfinite(est) | flat
    est[bad] = last[bad]
    return est[0] if squeeze else est


@dataclass(frozen=True)
class TailTrend:
    kind: str  # "flat" | "converging" | "diverging" | "inconclusive"
    limit: float
    ratio: float


def tail_trend(values, tol: float) -> TailTrend:
    """Classify the last quarter of a monotone sample sequence.

    ``ratio`` is the geometric-mean contraction of successive increments over
    the tail; a ratio at or above one means the increments do not shrink and
    the sequence is reported as diverging.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 8:
        return TailTrend("inconclusive", float("nan"), float("nan"))
    m = max(4, v.size // 4)
    tail = v[-m:]
    inc = np.abs(np.diff(tail))
    if inc.max() <= TAIL_TOL_FACTOR * tol:
        return TailTrend("flat", float(v[-1]), 0.0)
    first, last = inc[0], inc[-1]
    if first <= 0.0:
        nz = inc[inc > 0]
        first = nz[0]
    if last <= 0.0:
        # increments died out inside the tail
        return TailTrend("converging", float(v[-1]), 0.0)
    ratio = float((last / first) ** (1.0 / (inc.size - 1)))
    if ratio >= 1.0 - 1e-9:
        return TailTrend("diverging", float("inf"), ratio)
    return TailTrend("converging", float(extrapolate_limit(v)), ratio)
