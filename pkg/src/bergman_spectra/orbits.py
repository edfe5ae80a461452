"""Canonical forms for the action of U(2) x T on 2x2 matrices.

``(A, t)`` acts by ``Z -> A Z diag(conj(t), t)``.  Every orbit meets the
upper-triangular matrices ``[[r1, r2], [0, r3]]`` with ``r >= 0``; this module
finds such a representative together with a group element reaching it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .mat2 import as_matrix, as_unitary, det2, inner

__all__ = [
    "RadialTriple",
    "GroupElement",
    "act",
    "reduce",
    "canonical_matrix",
    "radial_coordinates",
]

ZERO_COLUMN_EPS = 1e-14
DEGENERATE_DET_REL = 1e-12


class RadialTriple(NamedTuple):
    r1: float
    r2: float
    r3: float

    @classmethod
    def checked(cls, r1: float, r2: float, r3: float) -> "RadialTriple":
        r = cls(float(r1), float(r2), float(r3))
        if not all(np.isfinite(x) and x >= 0 for x in r):
            raise ValueError(f"radial coordinates must be finite and nonnegative, got {r}")
        return r


@dataclass(frozen=True)
class GroupElement:
    """An element ``(A, t)`` of U(2) x T."""

    A: np.ndarray
    t: complex

    def __post_init__(self):
        object.__setattr__(self, "A", as_unitary(self.A))
        t = complex(self.t)
        if abs(abs(t) - 1.0) > 1e-12:
            raise ValueError(f"t must have unit modulus, got |t| = {abs(t)!r}")
        object.__setattr__(self, "t", t)

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(np.eye(2, dtype=complex), 1.0)

    def inverse(self) -> "GroupElement":
        return GroupElement(np.conj(self.A.T), self.t.conjugate())

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.A @ other.A, self.t * other.t)


def act(g: GroupElement, Z) -> np.ndarray:
    """Return ``A Z diag(conj(t), t)``; broadcasts over stacked ``Z``."""
    Z = np.asarray(Z, dtype=complex)
    return (g.A @ Z) * np.array([g.t.conjugate(), g.t])


def canonical_matrix(r) -> np.ndarray:
    r1, r2, r3 = r
    return np.array([[r1, r2], [0.0, r3]], dtype=complex)


def _rotation_to_e1(u: np.ndarray) -> np.ndarray:
    """SU(2) matrix sending the unit vector ``u`` to ``e1``."""
    a, b = u
    return np.array([[np.conj(a), np.conj(b)], [-b, a]])


def _canonical_sign(t: complex) -> bool:
    """True when ``t`` is the preferred one of ``+-t``."""
    return t.real > 0 or (t.real == 0 and t.imag > 0)


def reduce(Z) -> tuple[GroupElement, RadialTriple]:
    """Find ``g`` and ``r`` with ``act(g, Z) == canonical_matrix(r)``.

    Nondegenerate ``Z`` (``det Z`` and ``<Z1, Z2>`` nonzero) determine ``g`` up
    to a sign, fixed here by taking ``Re t > 0`` (or ``t = i``).  On the
    degenerate strata any valid representative is returned.
    """
    Z = as_matrix(Z)
    Z1, Z2 = Z[:, 0], Z[:, 1]
    n1, n2 = np.linalg.norm(Z1), np.linalg.norm(Z2)

    if n1 <= ZERO_COLUMN_EPS and n2 <= ZERO_COLUMN_EPS:
        return GroupElement.identity(), RadialTriple(0.0, 0.0, 0.0)
    if n1 <= ZERO_COLUMN_EPS:
        A = _rotation_to_e1(Z2 / n2)
        return GroupElement(A, 1.0), RadialTriple(0.0, n2, 0.0)
    if n2 <= ZERO_COLUMN_EPS:
        A = _rotation_to_e1(Z1 / n1)
        return GroupElement(A, 1.0), RadialTriple(n1, 0.0, 0.0)

    d = det2(Z)
    scale = n1 * n1 + n2 * n2
    # The rank-one branch drops r3 = |det Z| / |Z1|, so that must be negligible
    # too; a small determinant over a short first column is not rank one.
    if abs(d) <= DEGENERATE_DET_REL * scale and abs(d) / n1 <= DEGENERATE_DET_REL * np.sqrt(scale):
        # Rank one: Z = (a u, b u) with u a unit vector and a, b nonzero.
        u = Z1 / n1
        a = n1
        b = inner(Z2, u)
        t = np.sqrt(a * abs(b) / (b * abs(a)))
        if not _canonical_sign(t):
            t = -t
        # A u = e1 already and a > 0; prepend the scalar t as in (tA, t).
        A = t * _rotation_to_e1(u)
        return GroupElement(A, t), RadialTriple(a, abs(b), 0.0)

    A = _rotation_to_e1(Z1 / n1)
    m = inner(Z2, Z1) / n1
    dd = d / n1
    t = np.exp(-0.5j * np.angle(m)) if m != 0 else 1.0 + 0j
    if not _canonical_sign(t):
        t = -t
    s = np.exp(-1j * np.angle(dd)) * np.conj(t)
    A = np.array([[t, 0], [0, s]]) @ A
    return GroupElement(A, t), RadialTriple(n1, abs(m), abs(dd))


def radial_coordinates(Z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized ``r`` for stacked ``Z``: ``|Z1|, |<Z2, Z1>|/|Z1|, |det Z|/|Z1|``.

    Matches :func:`reduce` on every stratum, including ``Z1 = 0`` where the
    triple is ``(0, |Z2|, 0)``.
    """
    Z = np.asarray(Z)
    Z1, Z2 = Z[..., :, 0], Z[..., :, 1]
    n1 = np.sqrt(np.sum(np.abs(Z1) ** 2, axis=-1))
    zero = n1 <= ZERO_COLUMN_EPS
    safe = np.where(zero, 1.0, n1)
    r2 = np.abs(inner(Z2, Z1)) / safe
    r3 = np.abs(det2(Z)) / safe
    n2 = np.sqrt(np.sum(np.abs(Z2) ** 2, axis=-1))
    r1 = np.where(zero, 0.0, n1)
    r2 = np.where(zero, n2, r2)
    r3 = np.where(zero, 0.0, r3)
    return r1, r2, r3
