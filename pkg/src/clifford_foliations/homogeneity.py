"""Explicit group actions on the fibers and the homogeneity decision table.

For the standard-layout systems with m in {1, 2, 4}, the sphere S^(2l-1)
sits inside F^k x F^k for F = R, C, H (dim_R F = m), and

    pi_C(u, v) = (|u|^2 - |v|^2, 2 sum_i u_i conj(v_i))  in  R + F.

The classical groups SO(k) / SU(k) / Sp(k) act on F^k by unitary matrices;
here the action is in the row-vector convention u -> u g (scalars multiply
vector components on the right).  That convention leaves sum_i u_i conj(v_i)
invariant over the quaternions too, so the diagonal action on F^k x F^k
preserves every component of pi_C and the orbits fill out the fibers.  The
fibers themselves are pinned down by a normal form (u1, v1, v2) computed from
pi_C alone.

Homogeneity of a whole Clifford foliation is a function of the equivalence
profile only; :func:`classify_homogeneity` is that decision table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import rng_from
from .clifford import EquivalenceProfile, delta

__all__ = [
    "FIELD_DIM",
    "FIELD_FOR_M",
    "GroupElement",
    "sample_group_element",
    "diagonal_act",
    "NormalForm",
    "normal_form",
    "HomogeneityVerdict",
    "classify_homogeneity",
]

FIELD_DIM = {"R": 1, "C": 2, "H": 4}
FIELD_FOR_M = {1: "R", 2: "C", 4: "H"}


# --------------------------------------------------------------------------- #
# Scalar arithmetic on component arrays
# --------------------------------------------------------------------------- #

def _f_conj(a: np.ndarray) -> np.ndarray:
    out = -np.asarray(a, dtype=float)
    out[0] = -out[0]
    return out


def _f_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two scalars of F given as component arrays of length 1, 2, or 4."""
    d = len(a)
    if d == 1:
        return np.array([a[0] * b[0]])
    if d == 2:
        return np.array([a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]])
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def _right_mult_matrix(q: np.ndarray) -> np.ndarray:
    """Real d x d matrix of x -> x * q on F."""
    d = len(q)
    eye = np.eye(d)
    return np.stack([_f_mul(eye[s], q) for s in range(d)], axis=1)


# --------------------------------------------------------------------------- #
# Group elements
# --------------------------------------------------------------------------- #

@dataclass
class GroupElement:
    """Unitary k x k matrix over F = R, C, or H, stored componentwise.

    ``entries`` has shape (k, k, dim F).  ``action_matrix`` is the real
    representation of u -> u g on F^k (components of u stored consecutively),
    an orthogonal (k dim F) x (k dim F) matrix.
    """

    field: str
    k: int
    entries: np.ndarray

    def action_matrix(self) -> np.ndarray:
        d = FIELD_DIM[self.field]
        k = self.k
        out = np.zeros((k * d, k * d))
        for i in range(k):
            for j in range(k):
                out[i * d:(i + 1) * d, j * d:(j + 1) * d] = _right_mult_matrix(self.entries[j, i])
        return out


def _quaternionic_unitary(rng: np.random.Generator, k: int) -> np.ndarray:
    """Gram-Schmidt over H: columns orthonormal for <a, b> = sum conj(a_i) b_i."""
    g = rng.standard_normal((k, k, 4))
    for j in range(k):
        for _ in range(2):  # re-orthogonalize once for full precision
            for a in range(j):
                # <col_a, col_j> in H, then col_j -= col_a * overlap
                ov = np.zeros(4)
                for i in range(k):
                    ov += _f_mul(_f_conj(g[i, a]), g[i, j])
                for i in range(k):
                    g[i, j] -= _f_mul(g[i, a], ov)
        g[:, j] /= np.linalg.norm(g[:, j])
    return g


def sample_group_element(field: str, k: int, seed: int) -> GroupElement:
    """Haar-style sample from SO(k), SU(k), or Sp(k) (field R, C, H).

    QR of a Gaussian with the usual sign / phase normalization; for C the
    determinant is brought to 1 by a global phase, for R by flipping the last
    column when needed.  Fixed seed gives a bit-identical element.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = rng_from(seed)
    if field == "R":
        q, r = np.linalg.qr(rng.standard_normal((k, k)))
        d = np.diagonal(r).copy()
        d[d == 0] = 1.0
        q = q * np.sign(d)
        if np.linalg.det(q) < 0:
            q[:, -1] = -q[:, -1]
        return GroupElement("R", k, q[..., None].copy())
    if field == "C":
        a = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        q, r = np.linalg.qr(a)
        d = np.diagonal(r).copy()
        d[d == 0] = 1.0
        q = q * (d / np.abs(d))
        q = q * np.exp(-1j * np.angle(np.linalg.det(q)) / k)
        return GroupElement("C", k, np.stack([q.real, q.imag], axis=-1))
    if field == "H":
        return GroupElement("H", k, _quaternionic_unitary(rng, k))
    raise ValueError(f"unknown field {field!r}")


def diagonal_act(g: GroupElement, x: np.ndarray) -> np.ndarray:
    """Diagonal action on F^k x F^k: both halves of x transform by g.

    x has shape (..., 2l) with l = k dim F in the standard (u, v) layout.
    """
    x = np.asarray(x, dtype=float)
    l = x.shape[-1] // 2
    mat = g.action_matrix()
    if mat.shape[0] != l:
        raise ValueError("group element does not match the point dimension")
    u = x[..., :l] @ mat.T
    v = x[..., l:] @ mat.T
    return np.concatenate([u, v], axis=-1)


# --------------------------------------------------------------------------- #
# Normal form
# --------------------------------------------------------------------------- #

@dataclass
class NormalForm:
    """Fiber representative (u1 e1, v1 e1 + v2 e2) with u1, v2 >= 0, v1 in F.

    Computed from pi_C data alone, so it is constant on fibers and two points
    have (numerically) equal normal forms exactly when their pi_C values agree.
    """

    u1: float
    v1: np.ndarray
    v2: float

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.u1], self.v1, [self.v2]])


def _stable_sqrt(rad: float) -> float:
    """sqrt with radicands inside accumulated-roundoff range of 0 snapped to 0.

    Components of the normal form vanish identically on whole fibers (v2 does
    for every multiplicity-1 system); without the snap those zeros would come
    back as sqrt(eps)-sized noise and fibers would stop sharing a form.
    """
    return 0.0 if rad < 1e-13 else float(np.sqrt(rad))


def normal_form(x: np.ndarray, field: str) -> NormalForm:
    """Normal form of a unit point of F^k x F^k under the diagonal group."""
    x = np.asarray(x, dtype=float)
    if abs(float(np.linalg.norm(x)) - 1.0) > 1e-9:
        raise ValueError("normal_form expects a unit vector")
    d = FIELD_DIM[field]
    l = x.shape[0] // 2
    if l % d:
        raise ValueError("point dimension is not a multiple of dim F")
    k = l // d
    u = x[:l].reshape(k, d)
    v = x[l:].reshape(k, d)
    r0 = float(np.sum(u * u) - np.sum(v * v))
    w = np.zeros(d)
    for i in range(k):
        w += _f_mul(u[i], _f_conj(v[i]))
    u1 = _stable_sqrt(max(0.0, (1.0 + r0) / 2.0))
    if u1 > 1e-8:
        v1 = _f_conj(w) / u1
    else:
        # u = 0: the group is transitive on the v-sphere, so v moves to e1
        v1 = np.zeros(d)
        v1[0] = _stable_sqrt(max(0.0, (1.0 - r0) / 2.0))
    v2 = _stable_sqrt(max(0.0, (1.0 - r0) / 2.0 - float(v1 @ v1)))
    return NormalForm(u1, v1, v2)


# --------------------------------------------------------------------------- #
# Decision table
# --------------------------------------------------------------------------- #

@dataclass
class HomogeneityVerdict:
    """Whether the foliation of a given profile is a group-orbit decomposition."""

    status: str  # "homogeneous" | "non_homogeneous" | "conditionally"
    group: Optional[str] = None
    condition: Optional[str] = None
    source: str = ""

    def __str__(self) -> str:
        if self.status == "homogeneous":
            return f"homogeneous ({self.group}) -- {self.source}"
        if self.status == "conditionally":
            return f"conditionally ({self.condition}) -- {self.source}"
        return f"non_homogeneous -- {self.source}"


def classify_homogeneity(profile: EquivalenceProfile) -> HomogeneityVerdict:
    """Decision table over equivalence profiles.

    Constructive cases carry the acting group; everything else is settled by
    the known classification of these foliations, quoted as plain statements.
    """
    m, k, kappa = profile.m, profile.k, profile.kappa
    if m < 1 or k < 1 or (m, k) == (1, 1):
        raise ValueError(f"unsupported profile {profile}")
    l = k * delta(m)
    if l == m:
        # quotient is the boundary sphere: the three Hopf projections
        if m == 2:
            return HomogeneityVerdict(
                "homogeneous", group="U(1)",
                source="quotient-sphere case: circle fibration of the 3-sphere over the 2-sphere")
        if m == 4:
            return HomogeneityVerdict(
                "homogeneous", group="Sp(1)",
                source="quotient-sphere case: unit-quaternion fibration of the 7-sphere over the 4-sphere")
        return HomogeneityVerdict(
            "non_homogeneous",
            source="quotient-sphere case: the 15-sphere fibration over the 8-sphere "
                   "is the unique regular foliation with no transitive fiber group")
    if m == 1 and k >= 2:
        return HomogeneityVerdict(
            "homogeneous", group=f"SO({k}) diagonal",
            source="orbits of the diagonal rotation action on R^k x R^k fill the fibers")
    if m == 2:
        return HomogeneityVerdict(
            "homogeneous", group=f"SU({k}) diagonal",
            source="orbits of the diagonal special-unitary action on C^k x C^k fill the fibers")
    if m == 4:
        if kappa == k:
            return HomogeneityVerdict(
                "homogeneous", group=f"Sp({k}) diagonal",
                source="generator product is +-Id (trace invariant at maximum), so the "
                       "diagonal symplectic action on H^k x H^k fills the fibers")
        return HomogeneityVerdict(
            "non_homogeneous",
            source="trace invariant below maximum: the generator product is not +-Id, "
                   "which rules out every transitive candidate action")
    if l == m + 1:
        return HomogeneityVerdict(
            "conditionally", condition="fibers disconnected (l = m+1)",
            source="the fibers split into antipodal sphere pairs, so leafwise "
                   "homogeneity is not defined for the fiber partition itself")
    if (m, k) == (9, 1):
        return HomogeneityVerdict(
            "non_homogeneous",
            source="rank-10 system on R^32: no isometry group of the required "
                   "dimension acts transitively on its 15-sphere leaves")
    return HomogeneityVerdict(
        "non_homogeneous",
        source="the codimension-one family of this system is already inhomogeneous, "
               "so the finer fiber foliation is too")
