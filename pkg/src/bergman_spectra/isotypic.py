"""Signature indices and highest-weight polynomials.

A block of the Bergman space is labelled by ``(nu1, nu2, j)`` with
``nu1 >= nu2 >= 0`` and ``0 <= j <= nu1 - nu2``.  Its highest-weight vector is

    p(Z) = z11**(nu1 - nu2 - j) * z12**j * det(Z)**nu2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .mat2 import det2

__all__ = [
    "SignatureIndex",
    "hw_poly",
    "hw_poly_on_orbit",
    "schur_norm",
    "enumerate_signatures",
    "DEGREE_CAP",
]

DEGREE_CAP = 12


@dataclass(frozen=True, order=False)
class SignatureIndex:
    nu1: int
    nu2: int
    j: int

    def __post_init__(self):
        for name in ("nu1", "nu2", "j"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise ValueError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if not self.nu1 >= self.nu2 >= 0:
            raise ValueError(f"need nu1 >= nu2 >= 0, got ({self.nu1}, {self.nu2})")
        if not 0 <= self.j <= self.nu1 - self.nu2:
            raise ValueError(f"need 0 <= j <= {self.nu1 - self.nu2}, got j = {self.j}")

    @property
    def width(self) -> int:
        """``nu1 - nu2``; the U(2) block has dimension ``width + 1``."""
        return self.nu1 - self.nu2

    @property
    def degree(self) -> int:
        return self.nu1 + self.nu2

    @property
    def weight(self) -> int:
        return self.width - 2 * self.j

    def sort_key(self) -> tuple[int, int, int]:
        return (self.degree, self.nu1, self.j)

    def with_j(self, j: int) -> "SignatureIndex":
        return SignatureIndex(self.nu1, self.nu2, j)

    def __str__(self) -> str:
        return f"(({self.nu1},{self.nu2}),{self.j})"


def hw_poly(idx: SignatureIndex, Z):
    """Evaluate ``p_{nu,j}`` at ``Z`` (broadcasts over stacked matrices)."""
    Z = np.asarray(Z, dtype=complex)
    z11 = Z[..., 0, 0]
    z12 = Z[..., 0, 1]
    # numpy gives 0**0 == 1, which is the convention needed here.
    return z11 ** (idx.width - idx.j) * z12**idx.j * det2(Z) ** idx.nu2


def hw_poly_on_orbit(idx: SignatureIndex, A, r):
    """``p_{nu,j}(A [[r1, r2], [0, r3]])`` through its expansion in ``p_{nu,k}(A)``.

    The sum runs over ``k = 0..j`` with coefficients
    ``C(j, k) r1^(nu1 - j) r2^(j - k) r3^(nu2 + k)``.
    """
    r1, r2, r3 = (np.asarray(x, dtype=float) for x in r)
    total = 0j
    for k in range(idx.j + 1):
        total = total + (
            comb(idx.j, k)
            * hw_poly(idx.with_j(k), A)
            * r1 ** (idx.nu1 - idx.j)
            * r2 ** (idx.j - k)
            * r3 ** (idx.nu2 + k)
        )
    return total


def schur_norm(idx: SignatureIndex, k: int, convention: str = "exact") -> float:
    """Haar integral of ``p_{nu,j} * conj(p_{nu,k})`` over U(2).

    The first row of a Haar unitary is uniform on the unit sphere of C^2, whose
    moments give ``delta_jk / ((w + 1) C(w, j))`` with ``w = nu1 - nu2``.
    ``convention="alternate"`` returns ``delta_jk C(w, j) / (w + 1)`` instead,
    which is not the Haar integral; the two agree only for ``j in {0, w}``.
    """
    if not 0 <= k <= idx.width:
        raise ValueError(f"k must lie in [0, {idx.width}], got {k}")
    if convention not in ("exact", "alternate"):
        raise ValueError(f"unknown convention {convention!r}")
    if k != idx.j:
        return 0.0
    if convention == "alternate":
        return comb(idx.width, idx.j) / (idx.width + 1)
    return 1.0 / ((idx.width + 1) * comb(idx.width, idx.j))


def enumerate_signatures(max_degree: int) -> list[SignatureIndex]:
    """All indices with ``nu1 + nu2 <= max_degree`` ordered by ``(|nu|, nu1, j)``."""
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    out = []
    for d in range(max_degree + 1):
        for nu1 in range((d + 1) // 2, d + 1):
            nu2 = d - nu1
            for j in range(nu1 - nu2 + 1):
                out.append(SignatureIndex(nu1, nu2, j))
    return out
