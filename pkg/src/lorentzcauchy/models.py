"""Spacetime backends sharing one small interface.

Every model works on point arrays and exposes

* ``dist_matrix(A, B)``: Lorentzian distances ``d(a, b)`` for all pairs,
* ``causal_matrix(A, B)``: the causal relation ``a <= b``,
* ``contains(P, margin)``: membership in the spacetime, optionally at a
  distance ``margin`` away from its edge,
* ``separation(P, q)``: a coordinate gap used to test convergence of
  sampled sequences,
* ``in_causal_boundary(q, sense)``: whether ``q`` has trivial causal
  future (``sense="future"``) or past.

Minkowski and strip points are ``(t, x)`` rows.  Cone points are
``(vertex, r)`` rows, the point ``r * v[vertex]`` of the cone over the mesh;
``r = 0`` is the apex regardless of the vertex column.  Finite-space points
are integer indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .causal import DEFAULT_TOL, FUTURE, PAST, FiniteLorentzianSpace, compute_boundaries
from .errors import InputError
from .mesh import HyperbolicMesh, IntrinsicDistanceOracle


def minkowski_distance(a, b) -> np.ndarray:
    """Lorentzian distance in 1+1 Minkowski space for ``(t, x)`` points.

    Broadcasts over leading axes; zero unless ``b`` lies in the causal
    future of ``a``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dt = b[..., 0] - a[..., 0]
    dx = np.abs(b[..., 1] - a[..., 1])
    causal = dt >= dx
    # (dt - dx)(dt + dx) keeps precision near the light cone
    return np.where(causal, np.sqrt(np.clip((dt - dx) * (dt + dx), 0.0, None)), 0.0)


def _minkowski_causal(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return b[..., 0] - a[..., 0] >= np.abs(b[..., 1] - a[..., 1])


def cone_causal(ra, rb, d_omega) -> np.ndarray:
    """``(p, ra) <= (q, rb)`` in the cone: ``ln rb - ln ra >= d_omega``.

    The apex (radius 0) precedes everything and follows only itself.
    """
    ra, rb, d_omega = np.broadcast_arrays(
        np.asarray(ra, dtype=float), np.asarray(rb, dtype=float), np.asarray(d_omega, dtype=float)
    )
    out = ra == 0
    reg = (ra > 0) & (rb > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = out | (reg & (np.log(rb) - np.log(ra) >= d_omega))
    return out


def cone_distance(ra, rb, d_omega) -> np.ndarray:
    """Lorentzian distance between cone points at radii ``ra``, ``rb``.

    For causally related regular points this is
    ``sqrt(ra^2 + rb^2 - 2 ra rb cosh(d_omega))``, evaluated in the
    factored form ``ra * sqrt(expm1(L - D) * expm1(L + D))`` with
    ``L = ln(rb / ra)``, which keeps full relative precision close to the
    light cone.  On a common ray (``d_omega == 0``) it is exactly
    ``rb - ra``; from the apex it is ``rb``; otherwise zero.
    """
    ra, rb, d_omega = np.broadcast_arrays(
        np.asarray(ra, dtype=float), np.asarray(rb, dtype=float), np.asarray(d_omega, dtype=float)
    )
    if (ra < 0).any() or (rb < 0).any():
        raise InputError("cone radii must be nonnegative")
    if (d_omega < 0).any():
        raise InputError("domain distance must be nonnegative")
    causal = cone_causal(ra, rb, d_omega)
    out = np.zeros(ra.shape)
    apex = causal & (ra == 0)
    out[apex] = rb[apex]
    ray = causal & (ra > 0) & (d_omega == 0)
    out[ray] = rb[ray] - ra[ray]
    gen = causal & (ra > 0) & (d_omega > 0)
    if gen.any():
        a, b, d = ra[gen], rb[gen], d_omega[gen]
        lr = np.log(b / a)
        out[gen] = a * np.sqrt(np.clip(np.expm1(lr - d) * np.expm1(lr + d), 0.0, None))
    return out


class MinkowskiModel:
    """All of 1+1 Minkowski space."""

    name = "minkowski"
    tolerance = DEFAULT_TOL

    def dist_matrix(self, A, B) -> np.ndarray:
        A, B = _rows(A, 2), _rows(B, 2)
        return minkowski_distance(A[:, None, :], B[None, :, :])

    def causal_matrix(self, A, B) -> np.ndarray:
        A, B = _rows(A, 2), _rows(B, 2)
        return _minkowski_causal(A[:, None, :], B[None, :, :])

    def contains(self, P, margin: float = 0.0) -> np.ndarray:
        P = _rows(P, 2)
        return np.isfinite(P).all(axis=1)

    def separation(self, P, q) -> np.ndarray:
        return np.abs(_rows(P, 2) - np.asarray(q, dtype=float)).max(axis=1)

    def size(self, P) -> np.ndarray:
        return np.abs(_rows(P, 2)).max(axis=1)

    def in_causal_boundary(self, q, sense: str) -> bool:
        return False


class StripModel(MinkowskiModel):
    """The open strip ``0 < t < 1`` with the Minkowski structure restricted."""

    name = "strip"

    def contains(self, P, margin: float = 0.0) -> np.ndarray:
        P = _rows(P, 2)
        return (P[:, 0] > margin) & (P[:, 0] < 1.0 - margin) & np.isfinite(P[:, 1])


@dataclass(frozen=True, eq=False)
class ConeModel:
    """Cone ``R_{>=0} * Omega`` over a meshed hyperbolic domain."""

    mesh: HyperbolicMesh
    oracle: IntrinsicDistanceOracle
    tolerance: float = DEFAULT_TOL
    name = "cone"

    @classmethod
    def from_mesh(cls, mesh: HyperbolicMesh, tolerance: float = DEFAULT_TOL) -> "ConeModel":
        return cls(mesh, IntrinsicDistanceOracle.from_mesh(mesh), tolerance)

    @property
    def n_vertices(self) -> int:
        return self.mesh.n

    def _split(self, P):
        P = _rows(P, 2)
        if (P[:, 1] < 0).any():
            raise InputError("cone radii must be nonnegative")
        v = P[:, 0].astype(np.int64)
        if (v < 0).any() or (v >= self.mesh.n).any() or (v != P[:, 0]).any():
            raise InputError("cone vertex index out of range")
        return v, P[:, 1]

    def domain_distance(self, A, B) -> np.ndarray:
        va, _ = self._split(A)
        vb, _ = self._split(B)
        return self.oracle.matrix[np.ix_(va, vb)]

    def dist_matrix(self, A, B) -> np.ndarray:
        va, ra = self._split(A)
        vb, rb = self._split(B)
        return cone_distance(ra[:, None], rb[None, :], self.oracle.matrix[np.ix_(va, vb)])

    def causal_matrix(self, A, B) -> np.ndarray:
        va, ra = self._split(A)
        vb, rb = self._split(B)
        return cone_causal(ra[:, None], rb[None, :], self.oracle.matrix[np.ix_(va, vb)])

    def contains(self, P, margin: float = 0.0) -> np.ndarray:
        v, r = self._split(P)
        return np.isfinite(r) & ((r == 0) | (r > margin))

    def embed(self, P) -> np.ndarray:
        """Ambient coordinates ``r * v`` in R^{1,2}."""
        v, r = self._split(P)
        return r[:, None] * self.mesh.vertices[v]

    def separation(self, P, q) -> np.ndarray:
        return np.abs(self.embed(P) - self.embed(q)).max(axis=1)

    def size(self, P) -> np.ndarray:
        return self._split(P)[1]

    def in_causal_boundary(self, q, sense: str) -> bool:
        # the apex is the only point without causal past; nothing lacks a future
        _, r = self._split(q)
        return sense == PAST and bool(r[0] == 0)

    @staticmethod
    def apex() -> np.ndarray:
        return np.array([[0.0, 0.0]])


@dataclass(frozen=True, eq=False)
class FiniteModel:
    """Adapter exposing a :class:`FiniteLorentzianSpace` through the model interface."""

    space: FiniteLorentzianSpace
    name = "finite"

    @property
    def tolerance(self) -> float:
        return self.space.tolerance

    def _idx(self, P) -> np.ndarray:
        idx = np.asarray(P).reshape(-1).astype(np.int64)
        if (idx < 0).any() or (idx >= self.space.n).any():
            raise InputError("point index out of range")
        return idx

    def dist_matrix(self, A, B) -> np.ndarray:
        return self.space.dist[np.ix_(self._idx(A), self._idx(B))]

    def causal_matrix(self, A, B) -> np.ndarray:
        return self.space.causal[np.ix_(self._idx(A), self._idx(B))]

    def contains(self, P, margin: float = 0.0) -> np.ndarray:
        idx = np.asarray(P).reshape(-1)
        return (idx >= 0) & (idx < self.space.n) & (idx == np.round(idx))

    def separation(self, P, q) -> np.ndarray:
        return (self._idx(P) != self._idx(q)[0]).astype(float)

    def size(self, P) -> np.ndarray:
        return np.zeros(len(self._idx(P)))

    def in_causal_boundary(self, q, sense: str) -> bool:
        b = compute_boundaries(self.space)
        i = int(self._idx(q)[0])
        return i in (b.future_causal if sense == FUTURE else b.past_causal)


def strip_slice(t: float, x_range=(-1.0, 1.0), samples: int = 21) -> np.ndarray:
    """Uniform sample ``{(t, x_i)}`` of the strip slice at time ``t``."""
    if not 0.0 < t < 1.0:
        raise InputError(f"strip slice time must lie in (0, 1), got {t}")
    return minkowski_slice(t, x_range, samples)


def minkowski_slice(t: float, x_range=(-1.0, 1.0), samples: int = 21) -> np.ndarray:
    """Uniform sample ``{(t, x_i)}`` of the Minkowski slice at time ``t``."""
    if samples < 1:
        raise InputError("need at least one sample")
    lo, hi = x_range
    if hi < lo:
        raise InputError(f"empty x range {x_range}")
    xs = np.linspace(lo, hi, samples) if samples > 1 else np.array([0.5 * (lo + hi)])
    return np.column_stack([np.full(samples, float(t)), xs])


def _rows(P, width: int) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = P.reshape(1, -1)
    if P.ndim != 2 or P.shape[1] != width:
        raise InputError(f"points must have shape (n, {width}), got {P.shape}")
    return P
