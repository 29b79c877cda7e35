"""Sampled causal curves and the completeness conditions built on them.

A sampled curve cannot reveal what happens beyond its last sample, so each
end carries a behaviour flag (endpoint attained, escape to infinity, or
approach to a given point) and every check first confirms the flag against
the samples, then reports which flag the verdict relied on.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cauchy import CauchyGraph
from .errors import InconsistentCurveError, InputError, InvariantError, PreconditionError
from .models import ConeModel, FiniteModel
from .numerics import TAIL_TOL_FACTOR, extrapolate_limit, tail_trend

ATTAINED, ESCAPES, APPROACHES = "attained", "escapes", "approaches"


@dataclass(frozen=True)
class Behavior:
    """How a sampled curve continues past one of its ends."""

    kind: str
    point: tuple | None = None

    def __post_init__(self):
        if self.kind not in (ATTAINED, ESCAPES, APPROACHES):
            raise InputError(f"unknown behaviour flag {self.kind!r}")
        if (self.kind == APPROACHES) != (self.point is not None):
            raise InputError("a boundary point is required exactly for the 'approaches' flag")
        if self.point is not None:
            object.__setattr__(self, "point", tuple(float(v) for v in np.ravel(self.point)))

    @classmethod
    def attained(cls) -> "Behavior":
        return cls(ATTAINED)

    @classmethod
    def escapes(cls) -> "Behavior":
        return cls(ESCAPES)

    @classmethod
    def approaches(cls, point) -> "Behavior":
        return cls(APPROACHES, tuple(np.ravel(point)))

    def as_json(self):
        return self.kind if self.point is None else {self.kind: list(self.point)}

    @classmethod
    def from_json(cls, obj) -> "Behavior":
        if isinstance(obj, str):
            return cls(obj)
        if isinstance(obj, dict) and len(obj) == 1:
            (kind, point), = obj.items()
            return cls(kind, tuple(point))
        raise InputError(f"bad behaviour flag {obj!r}")


@dataclass(frozen=True, eq=False)
class DiscreteCausalCurve:
    """Samples ``(t_i, gamma(t_i))`` of a future-directed causal curve."""

    params: np.ndarray
    points: np.ndarray
    past: Behavior
    future: Behavior
    timelike: bool = True

    def __post_init__(self):
        t = np.array(self.params, dtype=float).reshape(-1)
        P = np.array(self.points, dtype=float)
        if P.ndim == 1:
            P = P.reshape(len(t), -1) if len(t) else P
        if len(t) == 0 or len(P) != len(t):
            raise InputError("need matching, nonempty parameter and point lists")
        if (np.diff(t) <= 0).any():
            raise InputError("curve parameters must be strictly increasing")
        t.setflags(write=False)
        P.setflags(write=False)
        object.__setattr__(self, "params", t)
        object.__setattr__(self, "points", P)

    def __len__(self) -> int:
        return len(self.params)

    def step_failures(self, model) -> int | None:
        """Index ``i`` of the first step ``i -> i+1`` that is not causal (timelike if flagged)."""
        P = self.points
        for i in range(len(P) - 1):
            a, b = P[i : i + 1], P[i + 1 : i + 2]
            if not model.causal_matrix(a, b)[0, 0]:
                return i
            if self.timelike and not model.dist_matrix(a, b)[0, 0] > 0:
                return i
        return None

    def check(self, model) -> None:
        i = self.step_failures(model)
        if i is not None:
            kind = "timelike_steps" if self.timelike else "causal_steps"
            raise InvariantError(f"curve step {i}->{i + 1} is not {kind.split('_')[0]}", (i, i + 1), invariant=kind)

    def to_json(self) -> str:
        return json.dumps(
            {
                "samples": [[float(t), p.tolist()] for t, p in zip(self.params, self.points)],
                "past": self.past.as_json(),
                "future": self.future.as_json(),
                "timelike": self.timelike,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DiscreteCausalCurve":
        try:
            obj = json.loads(text)
            t = [s[0] for s in obj["samples"]]
            P = [np.ravel(s[1]).tolist() for s in obj["samples"]]
            return cls(np.asarray(t), np.asarray(P), Behavior.from_json(obj["past"]),
                       Behavior.from_json(obj["future"]), bool(obj.get("timelike", True)))
        except (KeyError, ValueError, TypeError, IndexError) as exc:
            raise InputError(f"bad curve JSON: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "DiscreteCausalCurve":
        try:
            return cls.from_json(Path(path).read_text())
        except OSError as exc:
            raise InputError(f"cannot read curve {path}: {exc}") from exc


# -- crossings --------------------------------------------------------------------


@dataclass(frozen=True)
class CrossingReport:
    count: int
    intervals: list[tuple[float, float]]

    def as_dict(self) -> dict:
        return {"count": self.count, "intervals": [list(iv) for iv in self.intervals]}


def graph_offset(curve: DiscreteCausalCurve, g: CauchyGraph) -> np.ndarray:
    """``ln r(t) - ln f(p(t))`` at each sample (``-inf`` at the apex)."""
    P = curve.points
    if P.shape[1] != 2:
        raise InputError("curve and graph live in different models")
    v = P[:, 0].astype(np.int64)
    if (v < 0).any() or (v >= g.model.n_vertices).any() or (v != P[:, 0]).any():
        raise InputError("curve and graph live on different meshes")
    with np.errstate(divide="ignore"):
        return np.log(P[:, 1]) - g.log_f[v]


def crossing_count(curve: DiscreteCausalCurve, g: CauchyGraph, tol: float | None = None) -> CrossingReport:
    """Number of times the sampled curve meets the graph.

    Samples are classified as below, on (within ``tol`` in log-radius) or
    above the graph.  Each maximal run of samples on the graph counts once,
    and so does each direct below/above switch between consecutive samples.
    The curve's end flags must agree with the samples: a curve coming out of
    the apex must start below the graph and one escaping to infinity must
    end above it, otherwise the unsampled part would hide crossings.
    """
    tol = g.model.tolerance if tol is None else tol
    s = graph_offset(curve, g)
    sign = np.where(s > tol, 1, np.where(s < -tol, -1, 0))
    from_apex = _starts_at_apex(curve)
    if from_apex and sign[0] != -1:
        raise InconsistentCurveError("curve leaves the apex but its first sample is not below the graph", (0,))
    if curve.future.kind == ESCAPES and sign[-1] != 1:
        raise InconsistentCurveError("curve escapes to infinity but its last sample is not above the graph", (len(s) - 1,))
    t = curve.params
    count, intervals = 0, []
    i = 0
    while i < len(sign):
        if sign[i] == 0:
            j = i
            while j + 1 < len(sign) and sign[j + 1] == 0:
                j += 1
            count += 1
            intervals.append((float(t[i]), float(t[j])))
            i = j + 1
            continue
        if i + 1 < len(sign) and sign[i + 1] == -sign[i]:
            count += 1
            intervals.append((float(t[i]), float(t[i + 1])))
        i += 1
    return CrossingReport(count, intervals)


def _starts_at_apex(curve: DiscreteCausalCurve) -> bool:
    P = curve.points
    if P.shape[1] != 2:
        return False
    if curve.past.kind == ATTAINED:
        return bool(P[0, 1] == 0)
    if curve.past.kind == APPROACHES:
        return bool(curve.past.point[1] == 0)
    return False


# -- curve generators --------------------------------------------------------------


def random_timelike_curve(
    model: ConeModel,
    rng: np.random.Generator,
    r_start: float,
    r_stop: float,
    eta_range: tuple[float, float] = (0.01, 0.5),
    delta_max: float = 0.05,
    max_steps: int = 100_000,
) -> DiscreteCausalCurve:
    """Inextendible timelike curve from the apex out to infinity.

    The curve rises radially from the apex to ``r_start`` at a random vertex,
    then random-walks over mesh edges with log-radius increments
    ``(1 + eta) * d(p_i, p_{i+1}) + delta_i`` until it passes ``r_stop``.
    The past end attains the apex and the future end escapes.  Parameters are
    the cumulative log-radius.
    """
    mesh = model.mesh
    eta = rng.uniform(*eta_range)
    v = int(rng.integers(mesh.n))
    lr = np.log(r_start)
    verts, logs = [v], [lr]
    for _ in range(max_steps):
        if lr > np.log(r_stop):
            break
        nb = mesh.neighbours(v)
        w = int(nb[rng.integers(len(nb))]) if rng.random() < 0.9 else v
        d = model.oracle.matrix[v, w]
        inc = (1.0 + eta) * d + rng.uniform(0.0, delta_max)
        if inc <= 0:
            continue
        v, lr = w, lr + inc
        verts.append(v)
        logs.append(lr)
    else:
        raise PreconditionError("curve did not reach the stop radius")
    logs = np.asarray(logs)
    points = np.column_stack([np.asarray([verts[0]] + verts, dtype=float), np.concatenate([[0.0], np.exp(logs)])])
    params = np.concatenate([[logs[0] - 1.0], logs])
    return DiscreteCausalCurve(params, points, Behavior.attained(), Behavior.escapes(), True)


def witness_curve(g: CauchyGraph, p: int, q: int) -> DiscreteCausalCurve:
    """Timelike curve meeting a graph more than once, from a Lipschitz violation.

    Requires ``ln f(q) - ln f(p) - d(p, q) = G > 0``.  The curve rises from
    the apex along the ray of ``p`` to ``G/4`` above the graph, follows a
    shortest mesh path to ``q`` with log-radius slope ``1 + G/(4 d)``, which
    lands it below ``f(q)``, and then rises along the ray of ``q`` to
    infinity.  It therefore crosses at least three times.
    """
    m = g.model
    D = float(m.oracle.matrix[p, q])
    gap = float(g.log_f[q] - g.log_f[p] - D)
    if gap <= 4 * TAIL_TOL_FACTOR * m.tolerance:
        raise PreconditionError(f"pair ({p}, {q}) does not violate the Lipschitz bound", (p, q))
    kappa = gap / 4
    path = m.mesh.shortest_path(p, q)
    eta = gap / (4 * D) if D > 0 else 0.0
    lr = [g.log_f[p] - 2 * kappa, g.log_f[p] + kappa]
    verts = [p, p]
    for a, b in zip(path, path[1:]):
        verts.append(b)
        lr.append(lr[-1] + (1.0 + eta) * m.oracle.matrix[a, b] + 1e-12)
    # now below f(q) by about kappa; climb out past the graph and beyond
    for k in range(1, 4):
        verts.append(q)
        lr.append(g.log_f[q] + kappa * (2 * k - 3) + (k == 3) * 1.0)
    lr = np.asarray(lr)
    points = np.column_stack([np.asarray([p] + verts, dtype=float), np.concatenate([[0.0], np.exp(lr)])])
    params = np.arange(len(points), dtype=float)
    return DiscreteCausalCurve(params, points, Behavior.attained(), Behavior.escapes(), True)


def radial_curve(model: ConeModel, vertex: int, radii) -> DiscreteCausalCurve:
    """Radial ray ``r -> r * v[vertex]`` sampled at ``radii`` (parameter = radius).

    Starting at radius 0 attains the apex; the future end escapes.
    """
    r = np.asarray(radii, dtype=float)
    points = np.column_stack([np.full(len(r), float(vertex)), r])
    past = Behavior.attained() if r[0] == 0 else Behavior.approaches((vertex, 0.0))
    return DiscreteCausalCurve(r, points, past, Behavior.escapes(), True)


def cone_example_curve(model: ConeModel, t_max: float = 4.0, start: int = 0) -> DiscreteCausalCurve:
    """``gamma(t) = r(t) x(t)`` with ``r(t) = sqrt(sinh(2(t + 1)))`` and unit-speed ``x``.

    ``x`` walks back and forth along a shortest mesh path from ``start`` to
    the farthest vertex, at unit speed measured by mesh edge lengths, with
    samples at the path vertices up to parameter ``t_max``.  Since
    ``d ln r / dt = coth(2(t + 1)) > 1`` every step is timelike, but the
    excess over 1 decays like ``exp(-4t)`` and drops below double precision
    near ``t = 5``, which bounds the usable ``t_max``.  The past end is
    attained at ``t = 0``; the future end escapes.
    """
    far = int(np.argmax(model.oracle.matrix[start]))
    path = model.mesh.shortest_path(start, far)
    verts, t = [start], [0.0]
    legs = (path, path[::-1])
    k = 0
    while t[-1] <= t_max:
        leg = legs[k % 2]
        for a, b in zip(leg, leg[1:]):
            if t[-1] > t_max:
                break
            verts.append(b)
            t.append(t[-1] + float(model.oracle.matrix[a, b]))
        k += 1
    t = np.asarray(t)
    r = np.sqrt(np.sinh(2 * (t + 1)))
    return DiscreteCausalCurve(t, np.column_stack([np.asarray(verts, dtype=float), r]),
                               Behavior.attained(), Behavior.escapes(), True)


# -- inextendibility and completeness ------------------------------------------------


@dataclass(frozen=True)
class EndVerdict:
    inextendible: bool
    flag: str
    reason: str

    def as_dict(self) -> dict:
        return {"inextendible": self.inextendible, "flag": self.flag, "reason": self.reason}


@dataclass(frozen=True)
class InextendibilityReport:
    past: EndVerdict
    future: EndVerdict

    @property
    def inextendible(self) -> bool:
        return self.past.inextendible and self.future.inextendible

    def as_dict(self) -> dict:
        return {"inextendible": self.inextendible, "past": self.past.as_dict(), "future": self.future.as_dict()}


def _end_samples(curve: DiscreteCausalCurve, sense: str) -> np.ndarray:
    return curve.points if sense == "future" else curve.points[::-1]


def _check_end(model, curve: DiscreteCausalCurve, sense: str) -> EndVerdict:
    flag = curve.future if sense == "future" else curve.past
    P = _end_samples(curve, sense)
    tol = model.tolerance
    if flag.kind == ATTAINED:
        end = P[-1:]
        if model.in_causal_boundary(end, sense):
            return EndVerdict(True, ATTAINED, f"endpoint lies in the {sense} causal boundary")
        return EndVerdict(False, ATTAINED, f"endpoint is an interior point with nontrivial causal {sense}")
    if flag.kind == ESCAPES:
        size = model.size(P)
        trend = tail_trend(size, tol)
        if len(size) < 2 or size[-1] < size.max() or trend.kind in ("flat", "converging"):
            raise InconsistentCurveError(f"{sense} end flagged as escaping but sample sizes level off", (len(P) - 1,))
        return EndVerdict(True, ESCAPES, f"{sense} end leaves every bounded region")
    # approaches a point
    target = np.asarray(flag.point, dtype=float).reshape(1, -1)
    sep = model.separation(P, target)
    m = max(4, len(sep) // 4)
    tail = sep[-m:]
    est = abs(float(extrapolate_limit(sep))) if len(sep) >= 4 else float(sep[-1])
    if (np.diff(tail) > TAIL_TOL_FACTOR * tol).any() or est > TAIL_TOL_FACTOR * tol * max(1.0, sep[0]) + 1e-6 * sep[0]:
        raise InconsistentCurveError(f"{sense} samples do not approach the flagged point", (len(P) - 1,))
    if not model.contains(target)[0]:
        return EndVerdict(True, APPROACHES, f"{sense} end runs into the edge of the spacetime")
    return EndVerdict(False, APPROACHES, f"{sense} endpoint exists in the space and can be added")


def inextendibility_check(model, curve: DiscreteCausalCurve) -> InextendibilityReport:
    """Decide inextendibility of both ends from the flags, after checking them against the samples.

    An attained endpoint leaves the curve inextendible only when it lies in
    the causal boundary (no causal continuation exists); an approached point
    outside the spacetime makes the end inextendible, one inside it does not;
    escape to infinity is inextendible.
    """
    return InextendibilityReport(_check_end(model, curve, "past"), _check_end(model, curve, "future"))


COMPLETE, INCOMPLETE, INCONCLUSIVE = "complete", "incomplete", "inconclusive"


@dataclass(frozen=True)
class CompletenessVerdict:
    verdict: str
    flag: str
    trend: str
    bound: float | None

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "flag": self.flag, "trend": self.trend, "bound": self.bound}


def cauchy_complete_check(model, curve: DiscreteCausalCurve, sense: str = "future") -> CompletenessVerdict:
    """Cauchy completeness of one end of an inextendible timelike curve.

    ``t -> d(gamma(t0), gamma(t))`` from the opposite end is nondecreasing by
    the reverse triangle inequality (checked).  The end is complete if it is
    attained or the distance diverges, incomplete if the distance stays
    bounded while the end is not attained.
    """
    end = _check_end(model, curve, sense)
    if not end.inextendible:
        raise PreconditionError(f"{sense} end of the curve is extendible: {end.reason}")
    P = curve.points
    if sense == "future":
        D = model.dist_matrix(P[:1], P)[0]
    else:
        D = model.dist_matrix(P, P[-1:])[:, 0][::-1]
    tol = model.tolerance
    drop = np.flatnonzero(np.diff(D) < -tol * np.maximum(1.0, D[1:]))
    if drop.size:
        raise InvariantError("distance from a fixed sample decreases along the curve", (int(drop[0]),),
                             invariant="reverse_triangle")
    flag = curve.future.kind if sense == "future" else curve.past.kind
    if flag == ATTAINED:
        return CompletenessVerdict(COMPLETE, flag, "attained", float(D[-1]))
    trend = tail_trend(D, tol)
    if trend.kind == "inconclusive":
        return CompletenessVerdict(INCONCLUSIVE, flag, trend.kind, None)
    if trend.kind == "diverging":
        return CompletenessVerdict(COMPLETE, flag, trend.kind, None)
    return CompletenessVerdict(INCOMPLETE, flag, trend.kind, float(trend.limit))


CONVERGENT, ESCAPES_SPACE, NOT_CAUCHY = "convergent", "escapes", "not_cauchy"


@dataclass(frozen=True)
class SequenceVerdict:
    verdict: str
    limit: list | None
    cauchy_gap: float

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "limit": self.limit, "cauchy_gap": self.cauchy_gap}


def _ordered_dist(model, P, sense):
    D = model.dist_matrix(P, P)
    return D if sense == "future" else D.T


def timelike_cauchy_completeness_check(model, seq, sense: str = "future") -> SequenceVerdict:
    """Check one timelike-monotone sequence against timelike Cauchy completeness.

    ``sup_k d(x_j, x_{j+k})`` (future) or ``sup_k d(x_{j+k}, x_j)`` (past) is
    estimated from the prefix through the extrapolated limit point; the
    sequence is uniformly Cauchy if this tends to zero.  A Cauchy sequence is
    ``convergent`` if the limit lies in the space and ``escapes`` otherwise
    (which violates completeness).  Finite spaces hold only finite
    sequences, which trivially converge.
    """
    if sense not in ("future", "past"):
        raise InputError(f"sense must be future or past, got {sense!r}")
    finite = isinstance(model, FiniteModel)
    P = np.asarray(seq, dtype=float)
    if finite:
        P = P.reshape(-1)
    D = _ordered_dist(model, P, sense)
    steps = np.array([D[j, j + 1] for j in range(len(P) - 1)])
    if (steps <= 0).any():
        j = int(np.flatnonzero(steps <= 0)[0])
        raise InputError(f"sequence is not timelike monotone at step {j}->{j + 1}")
    if finite:
        return SequenceVerdict(CONVERGENT, [int(P[-1])], 0.0)
    lim = np.asarray(extrapolate_limit(P)).reshape(1, -1)
    pairs = np.vstack([P, lim])
    DL = _ordered_dist(model, pairs, sense)
    gaps = DL[:-1, -1]
    gap = abs(float(extrapolate_limit(gaps)))
    tol = model.tolerance
    if gap > TAIL_TOL_FACTOR * tol:
        return SequenceVerdict(NOT_CAUCHY, lim[0].tolist(), gap)
    if not model.contains(lim, TAIL_TOL_FACTOR * tol)[0]:
        return SequenceVerdict(ESCAPES_SPACE, lim[0].tolist(), gap)
    return SequenceVerdict(CONVERGENT, lim[0].tolist(), gap)


@dataclass(frozen=True)
class CompactnessVerdict:
    finitely_compact: bool
    reason: str
    limit: list | None = None

    def as_dict(self) -> dict:
        return {"finitely_compact": self.finitely_compact, "reason": self.reason, "limit": self.limit}


def finite_compactness_check(model, seq=None, x=None, y=None, bound: float | None = None,
                             sense: str = "future") -> CompactnessVerdict:
    """Test a sampled sequence against finite compactness.

    For ``sense="future"`` the hypotheses are ``x << y <= x_j`` and
    ``d(x, x_j) <= bound``; for ``"past"``, ``x_j <= y << x`` and
    ``d(x_j, x) <= bound``.  A sequence meeting them must accumulate in the
    space; the accumulation candidate is the extrapolated limit of the
    sequence.  Finite spaces are finitely compact outright.
    """
    if isinstance(model, FiniteModel) or seq is None:
        if not isinstance(model, FiniteModel):
            raise InputError("a sequence and reference points are required for continuum models")
        return CompactnessVerdict(True, "finite space: every sequence has an accumulation point")
    P = np.asarray(seq, dtype=float)
    x = np.asarray(x, dtype=float).reshape(1, -1)
    y = np.asarray(y, dtype=float).reshape(1, -1)
    tol = model.tolerance
    if sense == "future":
        ok = model.dist_matrix(x, y)[0, 0] > 0 and model.causal_matrix(y, P)[0].all()
        dist = model.dist_matrix(x, P)[0]
    else:
        ok = model.dist_matrix(y, x)[0, 0] > 0 and model.causal_matrix(P, y)[:, 0].all()
        dist = model.dist_matrix(P, x)[:, 0]
    if not ok or (dist > bound + tol).any():
        raise PreconditionError("sequence does not satisfy the bounded-diamond hypotheses")
    lim = np.asarray(extrapolate_limit(P)).reshape(1, -1)
    sep = model.separation(P, lim)
    if not np.isfinite(lim).all() or sep[-1] > sep[: max(1, len(sep) // 2)].max():
        return CompactnessVerdict(False, "sequence does not settle on a candidate accumulation point", None)
    if not model.contains(lim, TAIL_TOL_FACTOR * tol)[0]:
        return CompactnessVerdict(False, "bounded sequence escapes the space", lim[0].tolist())
    return CompactnessVerdict(True, "sequence accumulates inside the space", lim[0].tolist())
