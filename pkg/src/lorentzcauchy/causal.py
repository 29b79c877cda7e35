"""Finite Lorentzian spaces and the causal-space layer on top of them.

A finite space is a distance matrix plus an explicit causal matrix.  The
causal matrix is carried rather than derived from the distances, because
null relations (``d = 0`` but causally related) are allowed.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import InputError, InvariantError

DEFAULT_TOL = 1e-9

FUTURE, PAST = "future", "past"
CHRONOLOGICAL, CAUSAL = "chronological", "causal"


def _add_ext(a: float, b: float) -> float:
    # -inf + inf = -inf
    if a == -np.inf or b == -np.inf:
        return -np.inf
    return a + b


@dataclass(frozen=True)
class ExtendedTimeSeparation:
    """An extended time separation ``l: X x X -> {-inf} u [0, inf]``.

    ``evaluator(i, j)`` returns ``l(i, j)``; ``points`` enumerates the ground
    set used by the axiom checks.
    """

    evaluator: Callable[[int, int], float]
    points: Sequence[int]
    tolerance: float = DEFAULT_TOL

    def __call__(self, x: int, y: int) -> float:
        return self.evaluator(x, y)

    def lorentzian_distance(self, x: int, y: int) -> float:
        return max(0.0, self(x, y))

    def check_axioms(self, allow_infinite: bool = False) -> tuple[bool, tuple | None]:
        """Check ``l(x,x) >= 0`` and the extended reverse triangle inequality.

        Returns ``(ok, witness)`` where the witness is the first failing tuple
        in lexicographic order.  ``+inf`` values are rejected unless
        ``allow_infinite`` is set.
        """
        pts = list(self.points)
        vals = {(x, y): self(x, y) for x in pts for y in pts}
        for x in pts:
            if vals[x, x] < 0:
                return False, (x,)
        if not allow_infinite:
            for key in sorted(vals):
                if vals[key] == np.inf:
                    return False, key
        for x in pts:
            for y in pts:
                for z in pts:
                    lhs = _add_ext(vals[x, y], vals[y, z])
                    if lhs == -np.inf:
                        continue
                    if lhs > vals[x, z] + self.tolerance:
                        return False, (x, y, z)
        return True, None


@dataclass(frozen=True, eq=False)
class FiniteLorentzianSpace:
    """``n`` points with a Lorentzian distance matrix and a causal relation.

    ``causal[i, j]`` encodes ``i <= j``; timelike means ``dist[i, j] > 0``.
    Construction checks shapes only; :meth:`invariant_failures` reports
    structural violations so that callers can decide how to react.
    """

    dist: np.ndarray
    causal: np.ndarray
    labels: tuple = field(default=())
    require_antisymmetric: bool = True
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        dist = np.array(self.dist, dtype=float)
        causal = np.array(self.causal, dtype=bool)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise InputError(f"dist must be square, got shape {dist.shape}")
        if causal.shape != dist.shape:
            raise InputError(f"causal shape {causal.shape} != dist shape {dist.shape}")
        if np.isnan(dist).any() or (dist < 0).any():
            raise InputError("dist entries must be nonnegative reals")
        labels = tuple(self.labels) if len(self.labels) else tuple(str(i) for i in range(len(dist)))
        if len(labels) != len(dist):
            raise InputError(f"{len(labels)} labels for {len(dist)} points")
        if len(set(labels)) != len(labels):
            raise InputError("labels must be unique")
        dist.setflags(write=False)
        causal.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "causal", causal)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.dist)

    @property
    def timelike(self) -> np.ndarray:
        return self.dist > 0

    def index(self, label) -> int:
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < self.n:
                raise InputError(f"index {label} out of range for {self.n} points")
            return int(label)
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown point label {label!r}") from None

    def ell(self) -> ExtendedTimeSeparation:
        """The extended time separation: ``dist`` on ``<=``, ``-inf`` elsewhere."""
        d, c = self.dist, self.causal
        return ExtendedTimeSeparation(
            lambda i, j: float(d[i, j]) if c[i, j] else -np.inf,
            range(self.n),
            self.tolerance,
        )

    def subspace(self, indices: Sequence[int]) -> "FiniteLorentzianSpace":
        idx = np.asarray([self.index(i) for i in indices])
        return FiniteLorentzianSpace(
            self.dist[np.ix_(idx, idx)],
            self.causal[np.ix_(idx, idx)],
            tuple(self.labels[i] for i in idx),
            self.require_antisymmetric,
            self.tolerance,
        )

    def invariant_failures(self) -> list[tuple[str, tuple]]:
        """All violated structural invariants as ``(name, witness)`` pairs.

        Witnesses are the first failing tuple in lexicographic index order.
        """
        out = []
        d, c, tol = self.dist, self.causal, self.tolerance
        if not np.isfinite(d).all():
            out.append(("finite_distance", _first(~np.isfinite(d))))
        diag = ~np.diag(c)
        if diag.any():
            out.append(("reflexive", (int(np.argmax(diag)),)))
        w = _first_transitivity_failure(c)
        if w is not None:
            out.append(("transitive", w))
        bad = (d > 0) & ~c
        if bad.any():
            out.append(("timelike_in_causal", _first(bad)))
        w = _first_reverse_triangle_failure(d, c, tol)
        if w is not None:
            out.append(("reverse_triangle", w))
        if self.require_antisymmetric:
            anti = c & c.T & ~np.eye(self.n, dtype=bool)
            if anti.any():
                out.append(("antisymmetry", _first(anti)))
        return out

    def check(self) -> None:
        """Raise :class:`InvariantError` naming the first violated invariant."""
        fails = self.invariant_failures()
        if fails:
            name, wit = fails[0]
            raise InvariantError(f"invariant {name!r} fails at {wit}", wit, invariant=name)

    # -- serialization -------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "labels": list(self.labels),
                "dist": self.dist.tolist(),
                "causal": self.causal.astype(int).tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str, **kwargs) -> "FiniteLorentzianSpace":
        try:
            obj = json.loads(text)
            labels = obj["labels"]
            n = len(labels)
            dist = np.asarray(obj["dist"], dtype=float).reshape(n, n)
            causal = np.asarray(obj["causal"], dtype=int).reshape(n, n)
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"bad finite-space JSON: {exc}") from exc
        if not np.isin(causal, (0, 1)).all():
            raise InputError("causal entries must be 0 or 1")
        return cls(dist, causal.astype(bool), tuple(labels), **kwargs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["[labels]"])
        w.writerow(self.labels)
        w.writerow(["[dist]"])
        for row in self.dist:
            w.writerow([repr(float(v)) for v in row])
        w.writerow(["[causal]"])
        for row in self.causal:
            w.writerow([int(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, **kwargs) -> "FiniteLorentzianSpace":
        sections: dict[str, list[list[str]]] = {}
        current = None
        for row in csv.reader(io.StringIO(text)):
            if not row:
                continue
            if len(row) == 1 and row[0].startswith("[") and row[0].endswith("]"):
                current = row[0][1:-1]
                sections[current] = []
            elif current is None:
                raise InputError("CSV data before first section header")
            else:
                sections[current].append(row)
        try:
            labels = tuple(sections["labels"][0])
            dist = np.array([[float(v) for v in r] for r in sections["dist"]])
            causal = np.array([[int(v) for v in r] for r in sections["causal"]], dtype=bool)
        except (KeyError, IndexError, ValueError) as exc:
            raise InputError(f"bad finite-space CSV: {exc}") from exc
        return cls(dist, causal, labels, **kwargs)

    @classmethod
    def load(cls, path: str | Path, **kwargs) -> "FiniteLorentzianSpace":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
        if path.suffix.lower() == ".csv":
            return cls.from_csv(text, **kwargs)
        return cls.from_json(text, **kwargs)

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.write_text(self.to_csv() if path.suffix.lower() == ".csv" else self.to_json())


def _first(mask: np.ndarray) -> tuple:
    return tuple(int(v) for v in np.argwhere(mask)[0])


def _first_transitivity_failure(c: np.ndarray):
    ci = c.astype(np.int64)
    two_step = (ci @ ci) > 0
    bad = two_step & ~c
    if not bad.any():
        return None
    i, k = _first(bad)
    j = int(np.argmax(c[i] & c[:, k]))
    return (i, j, k)


def _first_reverse_triangle_failure(d: np.ndarray, c: np.ndarray, tol: float):
    n = len(d)
    for i in range(n):
        # viol[j, k]: i<=j<=k and d(i,j)+d(j,k) > d(i,k)+tol
        lhs = d[i][:, None] + d
        viol = c[i][:, None] & c & (lhs > d[i][None, :] + tol)
        if viol.any():
            j, k = _first(viol)
            return (i, j, k)
    return None


# -- operations --------------------------------------------------------------


def past_future(space: FiniteLorentzianSpace, x, sense: str = FUTURE, kind: str = CHRONOLOGICAL) -> set[int]:
    """``I+/-(x)`` or ``J+/-(x)`` as a set of point indices."""
    i = space.index(x)
    if kind == CHRONOLOGICAL:
        rel = space.timelike
    elif kind == CAUSAL:
        rel = space.causal
    else:
        raise InputError(f"kind must be chronological or causal, got {kind!r}")
    if sense == FUTURE:
        row = rel[i]
    elif sense == PAST:
        row = rel[:, i]
    else:
        raise InputError(f"sense must be future or past, got {sense!r}")
    return set(np.flatnonzero(row).tolist())


@dataclass(frozen=True)
class BoundaryReport:
    future_chronological: frozenset
    past_chronological: frozenset
    future_causal: frozenset
    past_causal: frozenset

    @property
    def bubbling_empty(self) -> bool:
        return (
            self.future_causal == self.future_chronological
            and self.past_causal == self.past_chronological
        )

    @property
    def spacelike_boundary(self) -> frozenset:
        return self.future_chronological & self.past_chronological

    def as_dict(self, labels=None) -> dict:
        name = (lambda i: labels[i]) if labels else (lambda i: i)
        return {
            "future_chronological": sorted(name(i) for i in self.future_chronological),
            "past_chronological": sorted(name(i) for i in self.past_chronological),
            "future_causal": sorted(name(i) for i in self.future_causal),
            "past_causal": sorted(name(i) for i in self.past_causal),
            "bubbling_empty": self.bubbling_empty,
            "spacelike_boundary": sorted(name(i) for i in self.spacelike_boundary),
        }


def compute_boundaries(space: FiniteLorentzianSpace) -> BoundaryReport:
    tl = space.timelike
    c = space.causal & ~np.eye(space.n, dtype=bool)
    return BoundaryReport(
        future_chronological=frozenset(np.flatnonzero(~tl.any(axis=1)).tolist()),
        past_chronological=frozenset(np.flatnonzero(~tl.any(axis=0)).tolist()),
        future_causal=frozenset(np.flatnonzero(~c.any(axis=1)).tolist()),
        past_causal=frozenset(np.flatnonzero(~c.any(axis=0)).tolist()),
    )


def maximal_causal_relation(space: FiniteLorentzianSpace, subset: Sequence[int] | None = None) -> np.ndarray:
    """The maximal causal relation ``J_d`` of the distance matrix.

    ``(x, y)`` is included iff ``d(z,x) <= d(z,y)`` and ``d(y,z) <= d(x,z)``
    for every ``z`` in the space.  With ``subset`` given, only the block of
    pairs inside the subset is returned, but ``z`` still ranges over all
    points; this is how a dense witness set sharpens the relation on a sample.
    """
    d, tol = space.dist, space.tolerance
    if not np.isfinite(d).all():
        raise InvariantError("maximal causal relation needs finite distances", invariant="finite_distance")
    idx = np.arange(space.n) if subset is None else np.asarray(subset, dtype=int)
    cols = d[:, idx]  # cols[z, a] = d(z, a)
    rows = d[idx, :]  # rows[a, z] = d(a, z)
    out = np.empty((len(idx), len(idx)), dtype=bool)
    for a in range(len(idx)):
        # past test: d(z, x) <= d(z, y) for all z
        past_ok = (cols[:, a][:, None] <= cols + tol).all(axis=0)
        # future test: d(y, z) <= d(x, z) for all z
        fut_ok = (rows <= rows[a][None, :] + tol).all(axis=1)
        out[a] = past_ok & fut_ok
    return out


def verify_distinguishing(space: FiniteLorentzianSpace) -> tuple[bool, tuple[int, int] | None]:
    """Check that every pair of distinct points is told apart by some ``z``."""
    d, tol = space.dist, space.tolerance
    for x in range(space.n):
        for y in range(x + 1, space.n):
            same_out = np.abs(d[x] - d[y]) <= tol
            same_in = np.abs(d[:, x] - d[:, y]) <= tol
            if (same_out & same_in).all():
                return False, (x, y)
    return True, None


def chain_length(space: FiniteLorentzianSpace, chain: Sequence) -> float:
    """Sum of distances along a causal chain (its Lorentzian length)."""
    idx = [space.index(p) for p in chain]
    for a, b in zip(idx, idx[1:]):
        if not space.causal[a, b]:
            raise InvariantError(f"chain step {a}->{b} is not causal", (a, b), invariant="non_causal_chain")
    return float(sum(space.dist[a, b] for a, b in zip(idx, idx[1:])))


class CausalityLevel(str, Enum):
    NONE = "none"
    CAUSAL = "causal"
    CAUSALLY_SIMPLE = "causally_simple"
    GLOBALLY_HYPERBOLIC = "globally_hyperbolic"


def verify_causality_level(space: FiniteLorentzianSpace) -> CausalityLevel:
    """Highest level of the causality hierarchy the space satisfies.

    In the discrete topology of a finite space every set is closed and
    compact, so closedness of ``J+/-(x)``, closedness of the relation, and
    compactness of causal emeralds hold automatically.  The hierarchy
    therefore collapses to antisymmetry: either the space is globally
    hyperbolic or it is not even causal.
    """
    c = space.causal
    if (c & c.T & ~np.eye(space.n, dtype=bool)).any():
        return CausalityLevel.NONE
    return CausalityLevel.GLOBALLY_HYPERBOLIC


# -- constructors ------------------------------------------------------------


def chain_space(weights: Sequence[float], labels: Sequence[str] | None = None) -> FiniteLorentzianSpace:
    """A totally ordered chain with consecutive distances ``weights``."""
    n = len(weights) + 1
    cum = np.concatenate([[0.0], np.cumsum(weights)])
    dist = np.clip(cum[None, :] - cum[:, None], 0.0, None)
    causal = np.triu(np.ones((n, n), dtype=bool))
    return FiniteLorentzianSpace(dist, causal, tuple(labels) if labels else ())


def minkowski_space(points, labels=None, tolerance: float = DEFAULT_TOL) -> FiniteLorentzianSpace:
    """Finite subset of 1+1 Minkowski space with the induced structure.

    ``points`` are ``(t, x)`` rows.
    """
    p = np.asarray(points, dtype=float)
    dt = p[None, :, 0] - p[:, None, 0]
    dx = np.abs(p[None, :, 1] - p[:, None, 1])
    causal = dt >= dx
    dist = np.where(causal, np.sqrt(np.clip(dt * dt - dx * dx, 0.0, None)), 0.0)
    return FiniteLorentzianSpace(dist, causal, tuple(labels) if labels else (), tolerance=tolerance)


def random_weighted_poset(
    n: int,
    rng: np.random.Generator,
    edge_prob: float | None = None,
    weight_range: tuple[float, float] = (0.1, 2.0),
) -> FiniteLorentzianSpace:
    """Random finite Lorentzian space from a weighted DAG.

    Edges ``i -> j`` (``i < j``) are drawn independently, the relation is
    transitively closed, and ``dist`` is the longest weighted path between
    related points.  Longest paths satisfy the reverse triangle inequality by
    construction.  Points left without any relation are attached to a random
    neighbour so the spacelike boundary stays empty.
    """
    if n < 2:
        raise InputError("need at least two points")
    if edge_prob is None:
        edge_prob = min(1.0, 2.5 / n)
    lo, hi = weight_range
    w = np.full((n, n), -np.inf)
    upper = np.triu(rng.random((n, n)) < edge_prob, k=1)
    w[upper] = rng.uniform(lo, hi, size=int(upper.sum()))
    for i in range(n):
        if not (np.isfinite(w[i]).any() or np.isfinite(w[:, i]).any()):
            j = int(rng.integers(n - 1))
            j += j >= i
            a, b = min(i, j), max(i, j)
            w[a, b] = rng.uniform(lo, hi)
    # longest path in topological order (indices are already topological)
    longest = np.full((n, n), -np.inf)
    np.fill_diagonal(longest, 0.0)
    for k in range(n):
        # extend all paths ending at k by edges k -> j
        reach = longest[:, k][:, None] + w[k][None, :]
        np.maximum(longest, reach, out=longest)
    causal = np.isfinite(longest)
    dist = np.where(causal, longest, 0.0)
    return FiniteLorentzianSpace(dist, causal)
