"""Geometry of the quotient map pi_C and its fibers.

For a Clifford system C = (P_0, ..., P_m) on R^(2l), the map

    pi_C(x) = (<P_0 x, x>, ..., <P_m x, x>)

sends the unit sphere S^(2l-1) into the closed unit disk of R^(m+1); its
fibers are the leaves of the Clifford foliation.  This module evaluates
pi_C, samples its fibers (boundary fibers, the focal manifold M+ over the
origin, interior fibers through the cos(t) x + sin(t) Qx parametrization),
exposes the quartic form that factors through pi_C, horizontal geodesics and
their projections, the curvature-4 metric on the quotient disk realized by a
radius-1/2 hemisphere lift, and the reflection / spin symmetries.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import max_abs, projector_colspace_basis, rng_from, sample_unit_vectors
from .clifford import CliffordSystem

__all__ = [
    "pi_c",
    "eig_split",
    "boundary_fiber_sample",
    "mplus_sample",
    "fiber_sample",
    "horizontal_basis",
    "HorizontalFrame",
    "pi_jacobian_rows",
    "fkm_f0",
    "HorizontalGeodesic",
    "make_horizontal_geodesic",
    "random_horizontal_geodesic",
    "geodesic_eval",
    "project_geodesic_params",
    "QuotientPoint",
    "quotient_lift",
    "quotient_distance",
    "reflect_symmetry",
    "reflected_disk_point",
    "spin_matrix",
    "spin_rotate",
    "rotated_disk_point",
    "EmptyFocalError",
]

_UNIT_TOL = 1e-9
_BOUNDARY_TOL = 1e-9


class EmptyFocalError(ValueError):
    """Requested samples of M+ on a system whose quotient has no interior."""


def _check_unit(x: np.ndarray, what: str = "point") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    norms = np.linalg.norm(x, axis=-1)
    if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
        raise ValueError(f"{what} must be a unit vector")
    return x


def pi_c(system: CliffordSystem, x: np.ndarray) -> np.ndarray:
    """Quotient-map coordinates (<P_i x, x>)_i along the last axis of x.

    Accepts a single point of shape (2l,) or a batch (..., 2l); the input must
    be unit-norm.
    """
    x = _check_unit(x)
    out = np.empty(x.shape[:-1] + (system.m + 1,))
    for i in range(system.m + 1):
        out[..., i] = np.sum(system.apply_generator(i, x) * x, axis=-1)
    return out


def eig_split(p: np.ndarray, tol: float = 1e-10):
    """Orthonormal bases (B_plus, B_minus) of the +-1 eigenspaces of an involution.

    Bases come from the projectors (Id +- P)/2; each has l columns.
    """
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    if max_abs(p @ p - np.eye(n)) > tol:
        raise ValueError("matrix is not an involution to the requested tolerance")
    b_plus = projector_colspace_basis((np.eye(n) + p) / 2.0)
    b_minus = projector_colspace_basis((np.eye(n) - p) / 2.0)
    return b_plus, b_minus


# --------------------------------------------------------------------------- #
# Fiber samplers
# --------------------------------------------------------------------------- #

def boundary_fiber_sample(system: CliffordSystem, p_coords: np.ndarray,
                          n: int, seed: int) -> np.ndarray:
    """n uniform samples of the boundary fiber over P = sum p_i P_i.

    The fiber over a boundary point is the unit sphere of the positive
    eigenspace E_+(P); samples are returned as rows of shape (n, 2l).
    """
    p_coords = _check_unit(p_coords, "span element")
    b_plus, _ = eig_split(system.span_matrix(p_coords))
    rng = rng_from(seed)
    z = sample_unit_vectors(rng, b_plus.shape[1], n)
    return z @ b_plus.T


def mplus_sample(system: CliffordSystem, n: int, seed: int) -> np.ndarray:
    """n samples of the focal manifold M+ = preimage of the disk origin.

    Each sample is (x_plus + x_minus)/sqrt(2) with x_plus uniform on the unit
    sphere of E_+(P_0) and x_minus uniform on the unit sphere of the
    complement of span(P_1 x_plus, ..., P_m x_plus) inside E_-(P_0); that
    complement has dimension l - m.
    """
    m, l = system.m, system.l
    if l < m + 1:
        raise EmptyFocalError("the quotient is the boundary sphere; M+ is empty")
    if l == m + 1:
        warnings.warn("l = m+1: the complement fibers are 0-spheres, so fibers are disconnected",
                      stacklevel=2)
    b_plus, b_minus = eig_split(system.dense_generator(0))
    rng = rng_from(seed)
    x_plus = sample_unit_vectors(rng, l, n) @ b_plus.T

    # P_1 x+, ..., P_m x+ are orthonormal vectors of E_-(P_0) at each sample
    w = np.stack([system.apply_generator(i, x_plus) for i in range(1, m + 1)], axis=1)
    g = rng.standard_normal((n, l)) @ b_minus.T
    if m:
        g -= np.einsum("nmd,nm->nd", w, np.einsum("nmd,nd->nm", w, g))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms < 1e-8):
        bad = norms < 1e-8
        fresh = rng.standard_normal((int(np.sum(bad)), l)) @ b_minus.T
        if m:
            wb = w[bad]
            fresh -= np.einsum("nmd,nm->nd", wb, np.einsum("nmd,nd->nm", wb, fresh))
        g[bad] = fresh
        norms = np.linalg.norm(g, axis=1)
    x_minus = g / norms[:, None]
    return (x_plus + x_minus) / np.sqrt(2.0)


def fiber_sample(system: CliffordSystem, v: np.ndarray, n: int, seed: int) -> np.ndarray:
    """n samples of the fiber over a disk point v.

    Interior points use the parametrization cos(t) x + sin(t) Qx over x in M+
    with Q = v/|v| and t = arcsin(|v|)/2, which lands exactly in the fiber
    over sin(2t) Q = v.  Origin and boundary inputs are redirected to
    :func:`mplus_sample` / :func:`boundary_fiber_sample`.
    """
    v = np.asarray(v, dtype=float)
    r = float(np.linalg.norm(v))
    if r > 1.0 + 1e-12:
        raise ValueError("disk point has norm > 1")
    if r <= 1e-12:
        return mplus_sample(system, n, seed)
    if r >= 1.0 - 1e-12:
        return boundary_fiber_sample(system, v / r, n, seed)
    q_mat = system.span_matrix(v / r)
    t = np.arcsin(r) / 2.0
    x = mplus_sample(system, n, seed)
    return np.cos(t) * x + np.sin(t) * (x @ q_mat.T)


# --------------------------------------------------------------------------- #
# Horizontal space and the quartic form
# --------------------------------------------------------------------------- #

@dataclass
class HorizontalFrame:
    """Rows spanning the space orthogonal to the fiber at a point.

    Interior points carry the m+1 gradients X_{P_i}(x) = 2 P_i x - 2 <P_i x, x> x;
    at a boundary point those degenerate and the l-dimensional normal space
    E_-(P) is returned instead, with ``at_boundary`` set.
    """

    vectors: np.ndarray
    at_boundary: bool


def pi_jacobian_rows(system: CliffordSystem, x: np.ndarray) -> np.ndarray:
    """Rows X_{P_i}(x) = 2 P_i x - 2 <P_i x, x> x of the differential of pi_C."""
    x = np.asarray(x, dtype=float)
    rows = np.empty((system.m + 1,) + x.shape)
    for i in range(system.m + 1):
        px = system.apply_generator(i, x)
        rows[i] = 2.0 * px - 2.0 * np.sum(px * x, axis=-1, keepdims=True) * x
    return rows


def horizontal_basis(system: CliffordSystem, x: np.ndarray) -> HorizontalFrame:
    """Frame of the horizontal space at x; see :class:`HorizontalFrame`."""
    x = _check_unit(x)
    v = pi_c(system, x)
    if np.linalg.norm(v) >= 1.0 - _BOUNDARY_TOL:
        _, b_minus = eig_split(system.span_matrix(v / np.linalg.norm(v)))
        return HorizontalFrame(b_minus.T, True)
    return HorizontalFrame(pi_jacobian_rows(system, x), False)


def fkm_f0(system: CliffordSystem, x: np.ndarray):
    """The quartic isoparametric form on the sphere, computed two ways.

    Returns (direct, factored) where direct = <x,x>^2 - 2 sum <P_i x, x>^2 and
    factored = 1 - 2 |pi_C(x)|^2; on the unit sphere the two agree to roundoff.
    """
    x = _check_unit(x)
    v = pi_c(system, x)
    sq = np.sum(x * x, axis=-1)
    direct = sq * sq - 2.0 * np.sum(v * v, axis=-1)
    factored = 1.0 - 2.0 * np.sum(v * v, axis=-1)
    return direct, factored


# --------------------------------------------------------------------------- #
# Horizontal geodesics
# --------------------------------------------------------------------------- #

@dataclass
class HorizontalGeodesic:
    """Great circle cos(t) x_minus + sin(t) x_plus with x_+- in E_+-(P)."""

    p_coords: np.ndarray
    x_plus: np.ndarray
    x_minus: np.ndarray


def make_horizontal_geodesic(system: CliffordSystem, p_coords: np.ndarray,
                             x_plus: np.ndarray, x_minus: np.ndarray) -> HorizontalGeodesic:
    """Validated geodesic: checks the eigenvector and orthogonality conditions."""
    p_coords = _check_unit(p_coords, "span element")
    x_plus = _check_unit(x_plus)
    x_minus = _check_unit(x_minus)
    p = system.span_matrix(p_coords)
    if max_abs(p @ x_plus - x_plus) > 1e-9 or max_abs(p @ x_minus + x_minus) > 1e-9:
        raise ValueError("endpoints are not +-1 eigenvectors of the span element")
    if abs(float(x_plus @ x_minus)) > 1e-12:
        raise ValueError("eigenvectors of distinct eigenvalues must be orthogonal")
    return HorizontalGeodesic(p_coords, x_plus, x_minus)


def random_horizontal_geodesic(system: CliffordSystem, seed: int) -> HorizontalGeodesic:
    rng = rng_from(seed)
    p_coords = sample_unit_vectors(rng, system.m + 1, 1)[0]
    b_plus, b_minus = eig_split(system.span_matrix(p_coords))
    x_plus = b_plus @ sample_unit_vectors(rng, b_plus.shape[1], 1)[0]
    x_minus = b_minus @ sample_unit_vectors(rng, b_minus.shape[1], 1)[0]
    return HorizontalGeodesic(p_coords, x_plus, x_minus)


def geodesic_eval(g: HorizontalGeodesic, t) -> np.ndarray:
    """gamma(t) = cos(t) x_minus + sin(t) x_plus; t may be an array."""
    t = np.asarray(t, dtype=float)
    return np.cos(t)[..., None] * g.x_minus + np.sin(t)[..., None] * g.x_plus


def project_geodesic_params(system: CliffordSystem, g: HorizontalGeodesic):
    """(P, Q) with Q_i = <P_i x_plus, x_minus>, so pi_C(gamma(t)) = -cos(2t) P + sin(2t) Q."""
    q = np.array([float(system.apply_generator(i, g.x_plus) @ g.x_minus)
                  for i in range(system.m + 1)])
    return np.array(g.p_coords, dtype=float), q


# --------------------------------------------------------------------------- #
# Quotient metric via the hemisphere lift
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class QuotientPoint:
    """Disk point together with its radius-1/2 hemisphere lift."""

    disk_coords: np.ndarray
    lift: np.ndarray

    @classmethod
    def from_disk(cls, v: np.ndarray) -> "QuotientPoint":
        v = np.asarray(v, dtype=float)
        return cls(v, quotient_lift(v))


def quotient_lift(v: np.ndarray) -> np.ndarray:
    """Lift of a disk point to the radius-1/2 upper hemisphere in R^(m+2).

    lambda(v) = (v, sqrt(1 - |v|^2)) / 2; the curvature-4 quotient metric on
    the disk is the round metric of this hemisphere.  Radicands within 1e-13
    of zero snap to the boundary, so points that are boundary points up to
    accumulated roundoff lift with height exactly zero.
    """
    v = np.asarray(v, dtype=float)
    r2 = np.sum(v * v, axis=-1)
    if np.any(r2 > 1.0 + 2e-12):
        raise ValueError("disk point has norm > 1")
    rad = np.maximum(0.0, 1.0 - r2)
    height = np.sqrt(np.where(rad < 1e-13, 0.0, rad))
    return 0.5 * np.concatenate([v, np.expand_dims(height, -1)], axis=-1)


def quotient_distance(v: np.ndarray, w: np.ndarray):
    """Distance in the curvature-4 disk: half the lifted great-circle angle.

    The angle uses the chord formulas 2 arcsin(|a-b|/2) / pi - 2 arcsin(|a+b|/2)
    (by the sign of the inner product), which stay fully accurate where an
    arccos of the inner product would lose half the working precision.
    """
    a = 2.0 * quotient_lift(v)
    b = 2.0 * quotient_lift(w)
    dot = np.sum(a * b, axis=-1)
    near = 2.0 * np.arcsin(np.clip(0.5 * np.linalg.norm(a - b, axis=-1), 0.0, 1.0))
    far = np.pi - 2.0 * np.arcsin(np.clip(0.5 * np.linalg.norm(a + b, axis=-1), 0.0, 1.0))
    theta = np.where(dot >= 0.0, near, far)
    return 0.5 * theta if theta.ndim else float(0.5 * theta)


# --------------------------------------------------------------------------- #
# Symmetries
# --------------------------------------------------------------------------- #

def reflect_symmetry(system: CliffordSystem, p_coords: np.ndarray,
                     x: np.ndarray) -> np.ndarray:
    """Apply the boundary element P = sum p_i P_i to x (an isometry of the sphere).

    Downstairs this is the reflection of the disk along the axis through P:
    pi_C(Px) = -pi_C(x) + 2 <pi_C(x), P> P.
    """
    p_coords = _check_unit(p_coords, "span element")
    return x @ system.span_matrix(p_coords).T


def reflected_disk_point(v: np.ndarray, p_coords: np.ndarray) -> np.ndarray:
    """Reflection -v + 2 <v, p> p of the disk along the axis through p."""
    v = np.asarray(v, dtype=float)
    p = np.asarray(p_coords, dtype=float)
    return -v + 2.0 * np.sum(v * p, axis=-1, keepdims=True) * p


def spin_matrix(system: CliffordSystem, p_coords: np.ndarray, q_coords: np.ndarray,
                theta: float) -> np.ndarray:
    """One-parameter symmetry g = cos(theta) Id + sin(theta) P Q.

    Needs orthonormal span elements P, Q; then (PQ)^2 = -Id makes g orthogonal.
    """
    p_coords = _check_unit(p_coords, "span element")
    q_coords = _check_unit(q_coords, "span element")
    if abs(float(np.dot(p_coords, q_coords))) > 1e-12:
        raise ValueError("span elements must be orthonormal")
    p = system.span_matrix(p_coords)
    q = system.span_matrix(q_coords)
    n = system.dim
    return np.cos(theta) * np.eye(n) + np.sin(theta) * (p @ q)


def spin_rotate(system: CliffordSystem, p_coords: np.ndarray, q_coords: np.ndarray,
                theta: float, x: np.ndarray) -> np.ndarray:
    """g . x for g = cos(theta) Id + sin(theta) P Q.

    Downstairs g rotates the disk by the angle -2 theta in the oriented
    (P, Q) plane and fixes the orthogonal complement; see
    :func:`rotated_disk_point` for the predicted image.
    """
    return x @ spin_matrix(system, p_coords, q_coords, theta).T


def rotated_disk_point(v: np.ndarray, p_coords: np.ndarray, q_coords: np.ndarray,
                       theta: float) -> np.ndarray:
    """Predicted disk image of pi_C under the spin symmetry at angle theta.

    Rotation by -2 theta in the oriented (P, Q) plane: the component pair
    (a, b) = (<v,P>, <v,Q>) maps to (cos(2t) a + sin(2t) b, -sin(2t) a + cos(2t) b).
    The sign is calibrated on the multiplicity-2 rank-2 system, where the
    point over (1, 0) moves to (cos 2t, -sin 2t).
    """
    v = np.asarray(v, dtype=float)
    p = np.asarray(p_coords, dtype=float)
    q = np.asarray(q_coords, dtype=float)
    a = np.sum(v * p, axis=-1, keepdims=True)
    b = np.sum(v * q, axis=-1, keepdims=True)
    rest = v - a * p - b * q
    c, s = np.cos(2.0 * theta), np.sin(2.0 * theta)
    return rest + (c * a + s * b) * p + (-s * a + c * b) * q
