"""Construction, combination, and classification of Clifford systems.

A Clifford system here is a family P_0, ..., P_m of symmetric matrices on
R^(2l) with P_i^2 = Id and P_i P_j = -P_j P_i for i != j.  Systems built by
this module are assembled from signed-permutation blocks, so the defining
relations hold in integer arithmetic and can be verified exactly.

The irreducible building block on R^(2 delta(m)) uses m-1 pairwise
anticommuting complex structures J_1, ..., J_{m-1} on R^(delta(m)):

    P_0(u, v) = (u, -v),   P_1(u, v) = (v, u),   P_{r+1}(u, v) = (J_r v, -J_r u)

A rank-(m+1) system of multiplicity k is the same pattern with J_r acting
blockwise on k copies, which keeps the coordinates in the (u, v) layout used
by the explicit group actions in :mod:`clifford_foliations.homogeneity`.
Flipping the sign of P_0 on j of the k blocks realizes the inequivalent
combinations that the trace invariant |tr(P_0 ... P_m)| tells apart.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import (
    Octonion,
    Quaternion,
    SignedPermMatrix,
    max_abs,
    oct_mul,
    quat_mul,
    signed_perm_kron,
)
from .reports import CheckResult, VerificationReport

__all__ = [
    "delta",
    "build_complex_structures",
    "build_system",
    "CliffordSystem",
    "Provenance",
    "EquivalenceProfile",
    "verify_relations",
    "trace_invariant",
    "equivalence_profile",
    "conjugate_system",
    "sub_system",
    "system_to_dict",
    "system_from_dict",
    "dimension_cap",
    "DEFAULT_DIM_CAP",
    "MalformedSystemError",
]

# Irreducible module dimension by rank - 1; periodic with factor 16 beyond 8.
_DELTA_SMALL = (1, 2, 4, 4, 8, 8, 8, 8)

DEFAULT_DIM_CAP = 512


class MalformedSystemError(ValueError):
    """A system whose dimensions are inconsistent with its rank."""


def delta(m: int) -> int:
    """Dimension of the irreducible module for m+1 generators."""
    if m < 1:
        raise ValueError("delta is defined for m >= 1")
    if m <= 8:
        return _DELTA_SMALL[m - 1]
    return 16 * delta(m - 8)


def dimension_cap() -> int:
    """Matrix size cap on 2l; overridable through CFL_MAX_DIM."""
    raw = os.environ.get("CFL_MAX_DIM")
    return int(raw) if raw else DEFAULT_DIM_CAP


# --------------------------------------------------------------------------- #
# Anticommuting complex structures
# --------------------------------------------------------------------------- #

def _left_mult_structure(units, mul, dim: int, index: int) -> SignedPermMatrix:
    """Signed-perm matrix of left multiplication by basis unit ``index``."""
    u = units(index)
    rows = np.empty(dim, dtype=np.int64)
    signs = np.empty(dim, dtype=np.int64)
    for j in range(dim):
        col = mul(u, units(j)).as_array()
        r = int(np.argmax(np.abs(col)))
        rows[j] = r
        signs[j] = 1 if col[r] > 0 else -1
    return SignedPermMatrix(rows, signs)


def _minimal_structures(n: int) -> list:
    """n pairwise anticommuting complex structures on R^(delta(n+1))."""
    if n == 0:
        return []
    if n == 1:
        # the 2x2 rotation generator
        return [SignedPermMatrix(np.array([1, 0]), np.array([1, -1]))]
    if n <= 3:
        return [_left_mult_structure(Quaternion.unit, quat_mul, 4, r + 1)
                for r in range(n)]
    if n <= 7:
        return [_left_mult_structure(Octonion.unit, oct_mul, 8, r + 1)
                for r in range(n)]
    if n == 8:
        seven = _minimal_structures(7)
        doubled = []
        for j in seven:
            rows = np.concatenate([j.rows, j.rows + 8])
            signs = np.concatenate([j.signs, -j.signs])
            doubled.append(SignedPermMatrix(rows, signs))
        swap = SignedPermMatrix(
            np.concatenate([np.arange(8, 16), np.arange(8)]),
            np.concatenate([np.ones(8, dtype=np.int64), -np.ones(8, dtype=np.int64)]),
        )
        return doubled + [swap]
    # Periodicity: tensor the (n-8)-structure set against the volume element
    # of the 16-dimensional set, and keep the 16-dimensional set blockwise.
    lower = _minimal_structures(n - 8)
    sixteen = _minimal_structures(8)
    omega = sixteen[0]
    for k in sixteen[1:]:
        omega = omega @ k
    eye = SignedPermMatrix.identity(delta(n - 7))
    return [signed_perm_kron(j, omega) for j in lower] + \
        [signed_perm_kron(eye, k) for k in sixteen]


def build_complex_structures(n: int, target_dim: int) -> list:
    """n anticommuting complex structures J_r on R^target_dim.

    ``target_dim`` must be delta(n+1) or an integer multiple of it; multiples
    act blockwise (one minimal block per copy), which is the layout of k
    components of a division-algebra column vector.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    minimal = delta(n + 1)
    if target_dim < minimal or target_dim % minimal:
        raise ValueError(
            f"target_dim {target_dim} is not a multiple of the minimal dimension {minimal}"
        )
    copies = target_dim // minimal
    base = _minimal_structures(n)
    if copies == 1:
        return base
    eye = SignedPermMatrix.identity(copies)
    return [signed_perm_kron(eye, j) for j in base]


# --------------------------------------------------------------------------- #
# Systems
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class Provenance:
    """Construction record: multiplicity k and count of sign-flipped blocks."""

    k: int
    flips: int


@dataclass
class EquivalenceProfile:
    """(m, k, kappa): the data deciding geometric equivalence.

    kappa is the normalized trace invariant, defined only when m is a
    multiple of 4; otherwise the rank and multiplicity already pin the class
    down.  Two systems are geometrically equivalent iff their profiles agree.
    """

    m: int
    k: int
    kappa: Optional[int] = None

    def as_tuple(self):
        return (self.m, self.k, self.kappa)

    def to_json_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "kappa": self.kappa}

    def __str__(self) -> str:
        kappa = "-" if self.kappa is None else str(self.kappa)
        return f"(m={self.m}, k={self.k}, kappa={kappa})"


@dataclass
class CliffordSystem:
    """A rank-(m+1) Clifford system on R^(2l).

    Generators are either exact :class:`SignedPermMatrix` objects (systems
    from :func:`build_system`) or dense symmetric matrices (conjugated or
    loaded systems).  Treat instances as immutable.
    """

    m: int
    l: int
    generators: tuple
    provenance: Optional[Provenance] = None
    _dense: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return 2 * self.l

    @property
    def exact(self) -> bool:
        return all(isinstance(p, SignedPermMatrix) for p in self.generators)

    def dense_generator(self, i: int) -> np.ndarray:
        if i not in self._dense:
            g = self.generators[i]
            self._dense[i] = g.to_dense() if isinstance(g, SignedPermMatrix) else g
        return self._dense[i]

    def apply_generator(self, i: int, x: np.ndarray) -> np.ndarray:
        """P_i applied along the last axis of x."""
        g = self.generators[i]
        if isinstance(g, SignedPermMatrix):
            return g.apply(x)
        return x @ g.T

    def span_matrix(self, coords: np.ndarray) -> np.ndarray:
        """Dense matrix of sum_i coords[i] * P_i."""
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.m + 1,):
            raise ValueError("span coordinates must have length m+1")
        out = np.zeros((self.dim, self.dim))
        for i, c in enumerate(coords):
            if c != 0.0:
                out += c * self.dense_generator(i)
        return out


def build_system(m: int, k: int, flips: int = 0,
                 dim_cap: Optional[int] = None) -> CliffordSystem:
    """Rank-(m+1) system of multiplicity k on R^(2 k delta(m)), built exactly.

    ``flips`` of the k irreducible blocks carry -P_0 instead of P_0.  The
    degenerate pair (m, k) = (1, 1) is rejected: its boundary fibers are
    antipodal point pairs, which none of the geometry downstream supports.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not (0 <= flips <= k):
        raise ValueError("flips must lie in [0, k]")
    if (m, k) == (1, 1):
        raise ValueError("(m, k) = (1, 1) is degenerate (fibers are point pairs) and not supported")
    d = delta(m)
    l = k * d
    cap = dim_cap if dim_cap is not None else dimension_cap()
    if 2 * l > cap:
        raise ValueError(f"system dimension 2l = {2 * l} exceeds the cap {cap}"
                         " (override with CFL_MAX_DIM)")

    structures = build_complex_structures(m - 1, l)
    idx = np.arange(2 * l)

    # block sign pattern for P_0: flipped blocks first
    eps = np.ones(l, dtype=np.int64)
    for b in range(flips):
        eps[b * d:(b + 1) * d] = -1
    p0 = SignedPermMatrix(idx, np.concatenate([eps, -eps]))
    p1 = SignedPermMatrix(np.concatenate([idx[l:], idx[:l]]),
                          np.ones(2 * l, dtype=np.int64))
    gens = [p0, p1]
    for j in structures:
        rows = np.concatenate([j.rows + l, j.rows])
        signs = np.concatenate([-j.signs, j.signs])
        gens.append(SignedPermMatrix(rows, signs))
    return CliffordSystem(m, l, tuple(gens), Provenance(k, flips))


# --------------------------------------------------------------------------- #
# Relations, invariants, equivalence
# --------------------------------------------------------------------------- #

def _dense_relation_violations(system: CliffordSystem):
    eye = np.eye(system.dim)
    sym = invol = anti = 0.0
    dense = [system.dense_generator(i) for i in range(system.m + 1)]
    for i, p in enumerate(dense):
        sym = max(sym, max_abs(p.T - p))
        invol = max(invol, max_abs(p @ p - eye))
        for q in dense[i + 1:]:
            anti = max(anti, max_abs(p @ q + q @ p))
    return sym, invol, anti


def _exact_relation_violations(system: CliffordSystem):
    gens = system.generators
    sym = invol = anti = 0.0
    for i, p in enumerate(gens):
        if not p.is_symmetric():
            sym = max(sym, max_abs(p.to_dense().T - p.to_dense()))
        if not p.is_involution():
            invol = max(invol, max_abs((p @ p).to_dense() - np.eye(system.dim)))
        for q in gens[i + 1:]:
            if not p.anticommutes_with(q):
                anti = max(anti, max_abs((p @ q).to_dense() + (q @ p).to_dense()))
    return sym, invol, anti


def verify_relations(system: CliffordSystem, tol: Optional[float] = None) -> VerificationReport:
    """Check symmetry, involutivity, and pairwise anticommutation.

    For exact (signed-permutation) systems the default tolerance is 0; for
    dense representations it is 1e-12.
    """
    if tol is None:
        tol = 0.0 if system.exact else 1e-12
    if system.exact:
        sym, invol, anti = _exact_relation_violations(system)
    else:
        sym, invol, anti = _dense_relation_violations(system)
    checks = [
        CheckResult.from_violation("symmetry", "each generator equals its transpose", sym, tol),
        CheckResult.from_violation("involution", "each generator squares to the identity", invol, tol),
        CheckResult.from_violation("anticommutation", "distinct generators anticommute", anti, tol),
    ]
    profile = None
    try:
        profile = equivalence_profile(system).to_json_dict()
    except MalformedSystemError:
        pass
    return VerificationReport.from_checks("relations", 0, 0, checks, system=profile)


def trace_invariant(system: CliffordSystem) -> float:
    """|tr(P_0 P_1 ... P_m)| / (2 delta(m)).

    Normalized so built systems of multiplicity k with j flipped blocks give
    |k - 2j| when m is a multiple of 4; for other m the product is traceless
    and the value is 0.
    """
    if system.exact:
        prod = system.generators[0]
        for g in system.generators[1:]:
            prod = prod @ g
        tr = float(prod.trace())
    else:
        prod = system.dense_generator(0)
        for i in range(1, system.m + 1):
            prod = prod @ system.dense_generator(i)
        tr = float(np.trace(prod))
    return abs(tr) / (2.0 * delta(system.m))


def equivalence_profile(system: CliffordSystem) -> EquivalenceProfile:
    """Profile (m, k, kappa) deciding the geometric equivalence class."""
    d = delta(system.m)
    if system.provenance is not None:
        k = system.provenance.k
        if system.l != k * d:
            raise MalformedSystemError(f"l = {system.l} does not equal k*delta(m) = {k * d}")
    else:
        if system.l % d:
            raise MalformedSystemError(f"l = {system.l} is not divisible by delta({system.m}) = {d}")
        k = system.l // d
    kappa = int(round(trace_invariant(system))) if system.m % 4 == 0 else None
    return EquivalenceProfile(system.m, k, kappa)


def conjugate_system(system: CliffordSystem, a: np.ndarray) -> CliffordSystem:
    """System with generators A^T P_i A for orthogonal A (dense result)."""
    a = np.asarray(a, dtype=float)
    if a.shape != (system.dim, system.dim):
        raise ValueError("conjugating matrix has the wrong shape")
    if max_abs(a.T @ a - np.eye(system.dim)) > 1e-12:
        raise ValueError("conjugating matrix is not orthogonal to 1e-12")
    gens = tuple(a.T @ system.dense_generator(i) @ a for i in range(system.m + 1))
    return CliffordSystem(system.m, system.l, gens, system.provenance)


def sub_system(system: CliffordSystem, indices: Sequence[int]) -> CliffordSystem:
    """Restriction to a nonempty subsequence of the generators."""
    indices = list(indices)
    if not indices:
        raise ValueError("sub_system needs at least one generator index")
    if any(i < 0 or i > system.m for i in indices):
        raise ValueError("generator index out of range")
    gens = tuple(system.generators[i] for i in indices)
    return CliffordSystem(len(indices) - 1, system.l, gens, None)


# --------------------------------------------------------------------------- #
# Serialization
# --------------------------------------------------------------------------- #

def system_to_dict(system: CliffordSystem, encoding: Optional[str] = None) -> dict:
    """JSON-ready form; signed_perm encoding round-trips losslessly."""
    if encoding is None:
        encoding = "signed_perm" if system.exact else "dense"
    if encoding == "signed_perm" and not system.exact:
        raise ValueError("system has dense generators; use dense encoding")
    if encoding == "signed_perm":
        payload = [[[int(r), int(s)] for r, s in zip(g.rows, g.signs)]
                   for g in system.generators]
    elif encoding == "dense":
        payload = [system.dense_generator(i).ravel().tolist()
                   for i in range(system.m + 1)]
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    prov = None
    if system.provenance is not None:
        prov = {"k": system.provenance.k, "flips": system.provenance.flips}
    return {
        "m": system.m,
        "l": system.l,
        "provenance": prov,
        "encoding": encoding,
        "generators": payload,
    }


def system_from_dict(data: dict) -> CliffordSystem:
    m = int(data["m"])
    l = int(data["l"])
    encoding = data["encoding"]
    payload = data["generators"]
    if len(payload) != m + 1:
        raise MalformedSystemError("generator count does not match rank")
    if encoding == "signed_perm":
        gens = tuple(
            SignedPermMatrix(np.array([c[0] for c in cols], dtype=np.int64),
                             np.array([c[1] for c in cols], dtype=np.int64))
            for cols in payload
        )
    elif encoding == "dense":
        gens = tuple(np.array(cols, dtype=float).reshape(2 * l, 2 * l)
                     for cols in payload)
    else:
        raise MalformedSystemError(f"unknown encoding {encoding!r}")
    for g in gens:
        size = g.n if isinstance(g, SignedPermMatrix) else g.shape[0]
        if size != 2 * l:
            raise MalformedSystemError("generator dimension does not match l")
    prov = data.get("provenance")
    provenance = Provenance(int(prov["k"]), int(prov["flips"])) if prov else None
    return CliffordSystem(m, l, gens, provenance)
