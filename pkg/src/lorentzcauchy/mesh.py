"""Triangulated compact domains in the hyperboloid model of H^2.

Vertices live on the future sheet ``<v, v> = -1`` of R^{1,2}.  Meshes are
built in the Klein disk, where hyperbolic geodesics are straight chords, so
every mesh edge is a geodesic segment and its weight is the exact
hyperbolic length between its endpoints.  The intrinsic distance of the
domain is approximated by graph shortest paths over those edges.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial import Delaunay

from .errors import InputError, InvariantError

BASE_POINT = np.array([1.0, 0.0, 0.0])
MESH_TOL = 1e-9
# Chords spanning up to this many triangulation steps are added as edges;
# three keeps center-to-rim graph distances within 2% on the default disks.
DEFAULT_HOPS = 3
_ORACLE_MAGIC = b"DOMEGA01"


def minkowski_inner(u, v) -> np.ndarray:
    """``<u, v> = -u0 v0 + u1 v1 + u2 v2`` along the last axis."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return -u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] + u[..., 2] * v[..., 2]


def hyperbolic_distance(u, v) -> np.ndarray:
    """``arcosh(-<u, v>)`` evaluated as ``2 asinh(|u - v|_L / 2)``.

    The chord form avoids the cancellation of ``arcosh`` near zero.
    """
    diff = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
    chord2 = np.clip(minkowski_inner(diff, diff), 0.0, None)
    return 2.0 * np.arcsinh(0.5 * np.sqrt(chord2))


def polar_point(rho, theta) -> np.ndarray:
    """Hyperboloid point at hyperbolic distance ``rho`` from the base point."""
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cosh(rho), np.sinh(rho) * np.cos(theta), np.sinh(rho) * np.sin(theta)], axis=-1)


def to_klein(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[..., 1:] / v[..., :1]


@dataclass(frozen=True, eq=False)
class HyperbolicMesh:
    """Vertices on H^2 and geodesic edges between them.

    ``hole_radius`` records the radius of a removed central disk (annulus
    meshes); it is informational and only used for chord admissibility
    while building.
    """

    vertices: np.ndarray
    edges: np.ndarray
    triangles: np.ndarray | None = None
    hole_radius: float = 0.0
    tolerance: float = MESH_TOL
    _weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        e = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        if v.ndim != 2 or v.shape[1] != 3:
            raise InputError(f"vertices must have shape (n, 3), got {v.shape}")
        if len(e) and (e.min() < 0 or e.max() >= len(v)):
            raise InputError("edge index out of range")
        if (e[:, 0] == e[:, 1]).any():
            raise InputError("self-loop edge")
        e = np.unique(np.sort(e, axis=1), axis=0)
        v.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "edges", e)
        w = hyperbolic_distance(v[e[:, 0]], v[e[:, 1]])
        w.setflags(write=False)
        object.__setattr__(self, "_weights", w)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def max_edge(self) -> float:
        return float(self._weights.max())

    def adjacency(self):
        n = self.n
        e, w = self.edges, self._weights
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return coo_matrix((np.concatenate([w, w]), (rows, cols)), shape=(n, n)).tocsr()

    def neighbours(self, v: int) -> np.ndarray:
        e = self.edges
        return np.concatenate([e[e[:, 0] == v, 1], e[e[:, 1] == v, 0]])

    def shortest_path(self, p: int, q: int) -> list[int]:
        """Vertex sequence of a shortest edge path from ``p`` to ``q``."""
        _, pred = dijkstra(self.adjacency(), directed=False, indices=p, return_predecessors=True)
        path = [int(q)]
        while path[-1] != p:
            prev = int(pred[path[-1]])
            if prev < 0:
                raise InvariantError(f"no path from {p} to {q}", (p, q), invariant="connected")
            path.append(prev)
        return path[::-1]

    def invariant_failures(self) -> list[tuple[str, object]]:
        out = []
        v = self.vertices
        norm = minkowski_inner(v, v) + 1.0
        bad = np.flatnonzero(np.abs(norm) > self.tolerance * np.maximum(1.0, v[:, 0] ** 2))
        if bad.size:
            out.append(("on_hyperboloid", int(bad[0])))
        past = np.flatnonzero(minkowski_inner(v, BASE_POINT) >= 0)
        if past.size:
            out.append(("future_sheet", int(past[0])))
        if (self._weights <= 0).any():
            out.append(("positive_weights", tuple(self.edges[np.argmax(self._weights <= 0)])))
        ncomp, _ = connected_components(self.adjacency(), directed=False)
        if ncomp != 1:
            out.append(("connected", ncomp))
        return out

    def check(self) -> None:
        fails = self.invariant_failures()
        if fails:
            name, wit = fails[0]
            raise InvariantError(f"mesh invariant {name!r} fails at {wit}", wit, invariant=name)

    def to_json(self) -> str:
        return json.dumps({"vertices": self.vertices.tolist(), "edges": self.edges.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "HyperbolicMesh":
        try:
            obj = json.loads(text)
            return cls(np.asarray(obj["vertices"], dtype=float), np.asarray(obj["edges"], dtype=np.int64))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"bad mesh JSON: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "HyperbolicMesh":
        try:
            return cls.from_json(Path(path).read_text())
        except OSError as exc:
            raise InputError(f"cannot read mesh {path}: {exc}") from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())


@dataclass(frozen=True, eq=False)
class IntrinsicDistanceOracle:
    """All-pairs shortest-path distances over a mesh (hyperbolic length units)."""

    matrix: np.ndarray
    tolerance: float = MESH_TOL

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_mesh(cls, mesh: HyperbolicMesh) -> "IntrinsicDistanceOracle":
        m = dijkstra(mesh.adjacency(), directed=False)
        if not np.isfinite(m).all():
            raise InvariantError("mesh graph is disconnected", invariant="connected")
        m = 0.5 * (m + m.T)
        return cls(m, mesh.tolerance)

    def __call__(self, p, q):
        return self.matrix[p, q]

    @property
    def n(self) -> int:
        return len(self.matrix)

    def save(self, path: str | Path) -> None:
        """Binary cache: magic, uint64 vertex count, float64 tolerance, row-major float64 data."""
        with open(path, "wb") as fh:
            fh.write(_ORACLE_MAGIC)
            fh.write(struct.pack("<Qd", self.n, self.tolerance))
            fh.write(np.ascontiguousarray(self.matrix, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "IntrinsicDistanceOracle":
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read oracle cache {path}: {exc}") from exc
        if raw[:8] != _ORACLE_MAGIC:
            raise InputError("not an oracle cache file")
        n, tol = struct.unpack("<Qd", raw[8:24])
        data = np.frombuffer(raw[24:], dtype="<f8")
        if data.size != n * n:
            raise InputError(f"oracle cache holds {data.size} values, expected {n * n}")
        return cls(data.reshape(n, n).copy(), tol)


def _ring_points(radii: np.ndarray, counts: np.ndarray, twist: float = 0.0):
    rho, theta = [], []
    for k, (r, c) in enumerate(zip(radii, counts)):
        rho.append(np.full(c, r))
        theta.append(2 * np.pi * (np.arange(c) + twist * (k % 2)) / c)
    return np.concatenate(rho), np.concatenate(theta)


def _hop_edges(n: int, tri: np.ndarray, hops: int) -> np.ndarray:
    """All vertex pairs within ``hops`` steps of the triangulation graph."""
    e = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [0, 2]]])
    a = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()
    a = ((a + a.T) > 0).astype(np.int64)
    reach = a.copy()
    power = a.copy()
    for _ in range(hops - 1):
        power = ((power @ a) > 0).astype(np.int64)
        reach = ((reach + power) > 0).astype(np.int64)
    pairs = np.argwhere(np.triu(reach.toarray(), k=1) > 0)
    return pairs


def _chord_clear_of_hole(k: np.ndarray, pairs: np.ndarray, apothem: float) -> np.ndarray:
    """Klein chords whose closest approach to the origin is at least ``apothem``."""
    p, q = k[pairs[:, 0]], k[pairs[:, 1]]
    d = q - p
    t = np.clip(-(p * d).sum(axis=1) / np.maximum((d * d).sum(axis=1), 1e-300), 0.0, 1.0)
    closest = p + t[:, None] * d
    return np.linalg.norm(closest, axis=1) >= apothem * (1 - 1e-12)


def _triangulate(rho, theta, hops, hole_radius=0.0, inner_count=0) -> HyperbolicMesh:
    verts = polar_point(rho, theta)
    k = to_klein(verts)
    tri = Delaunay(k).simplices
    if hole_radius > 0:
        cent = k[tri].mean(axis=1)
        apothem = np.tanh(hole_radius) * np.cos(np.pi / inner_count)
        tri = tri[np.linalg.norm(cent, axis=1) > apothem]
    pairs = _hop_edges(len(verts), tri, hops)
    if hole_radius > 0:
        pairs = pairs[_chord_clear_of_hole(k, pairs, apothem)]
    return HyperbolicMesh(verts, pairs, tri, hole_radius)


def build_disk_mesh(radius: float, resolution: int, hops: int = DEFAULT_HOPS) -> HyperbolicMesh:
    """Triangulated geodesic disk of hyperbolic ``radius`` about the base point.

    ``3 * resolution - 2`` concentric rings, ring ``k`` carrying ``6k``
    vertices; ``resolution = 1`` is a six-triangle fan and ``resolution = 4``
    has 331 vertices.  Besides triangle edges, every pair of vertices within
    ``hops`` triangulation steps is joined by its geodesic chord, which keeps
    graph distances close to hyperbolic ones without leaving the (convex)
    disk.
    """
    if not radius > 0:
        raise InputError(f"radius must be positive, got {radius}")
    if int(resolution) != resolution or resolution < 1:
        raise InputError(f"resolution must be a positive integer, got {resolution}")
    if hops < 1:
        raise InputError("hops must be >= 1")
    m = 3 * int(resolution) - 2
    ks = np.arange(1, m + 1)
    rho, theta = _ring_points(radius * ks / m, 6 * ks)
    rho = np.concatenate([[0.0], rho])
    theta = np.concatenate([[0.0], theta])
    mesh = _triangulate(rho, theta, hops)
    mesh.check()
    return mesh


def build_annulus_mesh(inner: float, outer: float, resolution: int, hops: int = DEFAULT_HOPS) -> HyperbolicMesh:
    """Triangulated geodesic annulus ``inner <= rho <= outer`` (a nonconvex domain).

    Chords that would cut into the hole beyond the inner polygon are dropped,
    so shortest paths must detour around it.
    """
    if not 0 < inner < outer:
        raise InputError(f"need 0 < inner < outer, got {inner}, {outer}")
    if int(resolution) != resolution or resolution < 1:
        raise InputError(f"resolution must be a positive integer, got {resolution}")
    rings = 2 * int(resolution) + 1
    radii = np.linspace(inner, outer, rings)
    inner_count = 12 * int(resolution)
    # keep roughly constant angular spacing measured in hyperbolic arc length
    counts = np.maximum(inner_count, np.round(inner_count * np.sinh(radii) / np.sinh(inner))).astype(int)
    rho, theta = _ring_points(radii, counts, twist=0.5)
    mesh = _triangulate(rho, theta, hops, hole_radius=inner, inner_count=inner_count)
    mesh.check()
    return mesh
