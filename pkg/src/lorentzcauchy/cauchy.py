"""Cauchy sets of the cone model represented as radius graphs.

A positive function ``f`` on the mesh vertices represents the set
``S_f = {f(p) * p}``.  Such a graph is a Cauchy set when ``ln f`` is
1-Lipschitz for the intrinsic domain distance, and a strong one when the
bound is strict, which is checked here with a quantitative margin.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, PreconditionError
from .models import ConeModel

CAUCHY, STRONG = "cauchy", "strong"
DEFAULT_MARGIN = 0.05


@dataclass(frozen=True, eq=False)
class CauchyGraph:
    """Radius graph ``S_f`` over the vertices of a cone model's mesh."""

    model: ConeModel
    f: np.ndarray

    def __post_init__(self):
        f = np.array(self.f, dtype=float).reshape(-1)
        if f.shape != (self.model.n_vertices,):
            raise InputError(f"need one radius per vertex ({self.model.n_vertices}), got {f.shape}")
        if not np.isfinite(f).all() or (f <= 0).any():
            bad = int(np.flatnonzero(~(np.isfinite(f) & (f > 0)))[0])
            raise InputError(f"radius at vertex {bad} must be positive and finite, got {f[bad]}")
        f.setflags(write=False)
        object.__setattr__(self, "f", f)

    @property
    def log_f(self) -> np.ndarray:
        return np.log(self.f)

    def points(self) -> np.ndarray:
        """Cone points ``(vertex, f(vertex))`` of the graph."""
        return np.column_stack([np.arange(len(self.f), dtype=float), self.f])

    def point(self, vertex: int) -> np.ndarray:
        return np.array([float(vertex), self.f[vertex]])

    def with_values(self, f) -> "CauchyGraph":
        return CauchyGraph(self.model, f)

    @classmethod
    def constant(cls, model: ConeModel, c: float) -> "CauchyGraph":
        return cls(model, np.full(model.n_vertices, float(c)))

    def to_json(self, mesh_ref: str | None = None) -> str:
        return json.dumps({"mesh": mesh_ref, "f": self.f.tolist()})

    @classmethod
    def from_json(cls, text: str, model: ConeModel) -> "CauchyGraph":
        try:
            obj = json.loads(text)
            return cls(model, np.asarray(obj["f"], dtype=float))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"bad graph JSON: {exc}") from exc

    @staticmethod
    def mesh_reference(text: str) -> str | None:
        try:
            return json.loads(text).get("mesh")
        except (ValueError, AttributeError) as exc:
            raise InputError(f"bad graph JSON: {exc}") from exc

    def save(self, path: str | Path, mesh_ref: str | None = None) -> None:
        Path(path).write_text(self.to_json(mesh_ref))


APEX_SET = "apex"
"""The Cauchy set ``{O}``: the only one not contained in the regular part."""


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check together with the tuple that decided it."""

    ok: bool
    witness: tuple | None = None
    value: float | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict:
        return {"ok": self.ok, "witness": _plain(self.witness), "value": self.value, "detail": self.detail}


def _plain(obj):
    if obj is None:
        return None
    if isinstance(obj, (tuple, list, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def lipschitz_ratios(g: CauchyGraph) -> np.ndarray:
    """``|ln f(p) - ln f(q)| / d(p, q)`` over vertex pairs (0 on the diagonal)."""
    lf = g.log_f
    d = g.model.oracle.matrix
    diff = np.abs(lf[:, None] - lf[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(d > 0, diff / d, np.where(diff > 0, np.inf, 0.0))
    return ratio


def validate_graph(g: CauchyGraph, mode: str = STRONG, margin: float = DEFAULT_MARGIN) -> Verdict:
    """Check the log-Lipschitz characterization on all vertex pairs.

    Cauchy mode requires ``|ln f(p) - ln f(q)| <= d(p, q)`` (up to the model
    tolerance); strong mode requires ``<= (1 - margin) d(p, q)``.  The
    witness is the pair with the largest ratio, first in index order on
    ties, and ``value`` is that ratio.
    """
    if mode not in (CAUCHY, STRONG):
        raise InputError(f"mode must be 'cauchy' or 'strong', got {mode!r}")
    if not 0.0 <= margin < 1.0:
        raise InputError(f"margin must lie in [0, 1), got {margin}")
    lf = g.log_f
    d = g.model.oracle.matrix
    excess = np.abs(lf[:, None] - lf[None, :]) - (1.0 - (margin if mode == STRONG else 0.0)) * d
    ratio = lipschitz_ratios(g)
    i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    i, j = (int(min(i, j)), int(max(i, j)))
    ok = bool((excess <= g.model.tolerance).all())
    return Verdict(ok, (i, j), float(ratio[i, j]), f"{mode} log-Lipschitz check")


def achronality_check(g) -> Verdict:
    """Verify that no two points of the set are timelike related.

    Accepts a :class:`CauchyGraph` or :data:`APEX_SET`.  Graph points
    ``f(p) p`` and ``f(q) q`` are timelike related iff
    ``|ln f(p) - ln f(q)| > d(p, q)``; the test is made on that log-radius
    excess (beyond the model tolerance) because the distance itself grows
    like the square root of the excess and would turn rounding noise on
    null pairs into spurious timelike ones.  ``value`` is the largest
    excess.
    """
    if isinstance(g, str) and g == APEX_SET:
        return Verdict(True, None, 0.0, "single point")
    lf = g.log_f
    excess = np.abs(lf[:, None] - lf[None, :]) - g.model.oracle.matrix
    np.fill_diagonal(excess, -np.inf)
    tol = g.model.tolerance
    bad = excess > tol
    worst = float(excess.max()) if excess.size > 1 else 0.0
    if bad.any():
        i, j = (int(v) for v in np.argwhere(bad)[0])
        if lf[i] > lf[j]:
            i, j = j, i
        return Verdict(False, (i, j), worst, "timelike pair inside the set")
    return Verdict(True, None, worst, "no timelike pair")


def chronologically_observing(g: CauchyGraph, probes) -> Verdict:
    """Every probe off the graph must be in the timelike future or past of it."""
    probes = np.asarray(probes, dtype=float).reshape(-1, 2)
    P = g.points()
    m = g.model
    up = m.dist_matrix(P, probes) > 0  # graph point before probe
    down = m.dist_matrix(probes, P) > 0
    seen = up.any(axis=0) | down.T.any(axis=0)
    if not seen.all():
        k = int(np.flatnonzero(~seen)[0])
        return Verdict(False, (k,), None, "probe not timelike related to any graph point")
    return Verdict(True, None, None, "all probes observed")


CLAUSE_FUTURE, CLAUSE_BETWEEN, CLAUSE_PAST = "z<=y", "x<=y<=z", "y<=x"


def _segment_radii(model: ConeModel, x, z, path) -> np.ndarray:
    """Radii of the straight segment from ``x`` to ``z`` above the vertices of ``path``.

    The cone over a shortest mesh path develops isometrically onto a sector
    of 1+1 Minkowski space, ``(s, r) -> (r cosh s, r sinh s)`` with ``s`` the
    arclength along the path, and the maximal curve from ``x`` to ``z`` is the
    straight segment there.
    """
    ra, rb = float(x[1]), float(z[1])
    D = model.oracle.matrix
    s = np.concatenate([[0.0], np.cumsum([D[a, b] for a, b in zip(path, path[1:])])])
    Z0, Z1 = rb * np.cosh(s[-1]), rb * np.sinh(s[-1])
    th = np.tanh(s)
    u = ra * th / (Z1 - th * (Z0 - ra))  # segment parameter where it passes over each vertex
    u[0] = 0.0
    u[-1] = 1.0
    Y0 = ra + u * (Z0 - ra)
    Y1 = u * Z1
    return np.sqrt(np.clip((Y0 - Y1) * (Y0 + Y1), 0.0, None))


def weakly_timelike_intercepting(g: CauchyGraph, pairs) -> tuple[Verdict, list[str]]:
    """For each timelike pair ``(x, z)`` find a graph point meeting one clause.

    The clauses are: ``z <= y``; ``x <= y <= z`` with
    ``d(x, z) = d(x, y) + d(y, z)``; ``y <= x``.  For the middle clause ``y``
    must lie on the maximal curve from ``x`` to ``z``, the straight segment
    over a shortest mesh path between their rays.  A graph point at a path
    vertex within the model tolerance of the segment is accepted directly;
    otherwise the segment must cross the graph between two consecutive path
    vertices, with ``ln f`` taken as linear along the edge (graph points
    exist only over vertices, so this is where the crossing lies).  Returns
    the verdict and the clause used per pair.
    """
    m = g.model
    pairs = np.asarray(pairs, dtype=float).reshape(-1, 2, 2)
    P = g.points()
    tol = m.tolerance
    clauses: list[str] = []
    for k, (x, z) in enumerate(pairs):
        if m.dist_matrix(x, z)[0, 0] <= 0:
            raise PreconditionError(f"pair {k} is not timelike related", (k,))
        if m.causal_matrix(z, P)[0].any():
            clauses.append(CLAUSE_FUTURE)
            continue
        if m.causal_matrix(P, x)[:, 0].any():
            clauses.append(CLAUSE_PAST)
            continue
        if x[1] == 0 or x[0] == z[0]:
            # radial segment: the graph point on z's ray lies strictly between x and z
            crossed = True
        else:
            path = m.mesh.shortest_path(int(x[0]), int(z[0]))
            radii = _segment_radii(m, x, z, path)
            off = g.log_f[path] - np.log(radii)
            sign = np.where(np.abs(off) <= tol, 0, np.sign(off))
            crossed = bool((sign == 0).any() or ((sign[:-1] > 0) & (sign[1:] < 0)).any())
        if crossed:
            clauses.append(CLAUSE_BETWEEN)
            continue
        return Verdict(False, (k,), None, "no intercepting graph point"), clauses
    return Verdict(True, None, None, "all pairs intercepted"), clauses


def lipschitz_envelope(model: ConeModel, seeds, values, slope: float) -> np.ndarray:
    """``h(p) = min_q (values[q] + slope * d(p, q))`` over seed vertices ``q``.

    The lower envelope of cones is ``slope``-Lipschitz for the graph metric
    exactly, so no projection step is needed.
    """
    seeds = np.asarray(seeds, dtype=np.int64)
    d = model.oracle.matrix[:, seeds]
    return (np.asarray(values, dtype=float)[None, :] + slope * d).min(axis=1)


def random_strong_graph(
    model: ConeModel,
    rng: np.random.Generator,
    margin: float = DEFAULT_MARGIN,
    n_seeds: int | None = None,
    log_range: tuple[float, float] = (-0.5, 0.5),
) -> CauchyGraph:
    """Random graph passing strong validation with the given margin by construction.

    Seed values are uniform in ``log_range``; ``f = exp(h)`` with ``h`` the
    ``(1 - margin)``-Lipschitz envelope of the seeds.
    """
    n = model.n_vertices
    k = n_seeds if n_seeds is not None else int(rng.integers(1, max(2, n // 10) + 1))
    k = min(max(k, 1), n)
    seeds = rng.choice(n, size=k, replace=False)
    vals = rng.uniform(*log_range, size=k)
    h = lipschitz_envelope(model, seeds, vals, 1.0 - margin)
    return CauchyGraph(model, np.exp(h))


def distance_graph(model: ConeModel, center: int, scale: float = 1.0) -> CauchyGraph:
    """``f(p) = scale * exp(d(center, p))``: Cauchy but with Lipschitz constant exactly 1."""
    return CauchyGraph(model, scale * np.exp(model.oracle.matrix[center]))


def bumped_graph(g: CauchyGraph, vertex: int, factor: float) -> CauchyGraph:
    f = g.f.copy()
    f[vertex] *= factor
    return g.with_values(f)


def violating_graph(model: ConeModel, rng: np.random.Generator, excess: float = 0.5) -> tuple[CauchyGraph, tuple[int, int]]:
    """A random strong graph with one vertex pushed past the Lipschitz bound.

    A neighbour ``q`` of a random vertex ``p`` is raised so that
    ``ln f(q) - ln f(p) = (1 + excess) * d(p, q)``.  Returns the graph and
    the violating pair ``(p, q)``.
    """
    g = random_strong_graph(model, rng)
    e = model.mesh.edges[int(rng.integers(len(model.mesh.edges)))]
    p, q = (int(e[0]), int(e[1])) if rng.random() < 0.5 else (int(e[1]), int(e[0]))
    d = model.oracle.matrix[p, q]
    f = g.f.copy()
    f[q] = f[p] * np.exp((1.0 + excess) * d)
    return g.with_values(f), (p, q)
