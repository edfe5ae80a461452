"""Weighted measures on D and integration over the orbit region.

For a function ``f`` of ``Z`` that is invariant under ``Z -> A Z diag(t, conj t)``
(``A`` unitary, ``|t| = 1``), the weighted probability measure ``v_lambda``
pushes forward to the region

    Omega = {r in (0, inf)^3 : [[r1, r2], [0, r3]] in D}

with density ``ORBIT_CONSTANT * c_lambda * r1^3 r2 r3 * b(r)^(lambda - 4)``,
where ``b(r) = 1 - r1^2 - r2^2 - r3^2 + r1^2 r3^2 = det(I - Z Z*)``.

Integration over Omega uses the substitution

    r1 = sin(pi u1 / 2),  r3 = sin(pi u3 / 2),  r2 = s cos(pi u1 / 2) cos(pi u3 / 2)

which maps the unit cube onto Omega and turns ``b^(lambda-4) dr`` into
``(pi/2)^2 (cos cos)^(2 lambda - 6) (1 - s^2)^(lambda - 4) du1 du3 ds``.  The
endpoint powers are absorbed by Gauss-Jacobi rules, so smooth integrands
converge spectrally for every ``lambda > 3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi

from .isotypic import SignatureIndex
from .mat2 import DOMAIN_VOLUME, defect_minors
from .montecarlo import domain_moments

__all__ = [
    "ORBIT_CONSTANT",
    "NumericalError",
    "WeightParams",
    "QuadConfig",
    "QuadResult",
    "OmegaGrid",
    "c_lambda",
    "b_poly",
    "a_exponents",
    "a_weight",
    "omega_contains",
    "omega_grid",
    "integrate_omega",
    "orbit_integral",
    "mc_integral_vlambda",
]

# Normalized Haar measure on U(2) times the Euclidean volume of U(2) (4 pi^3)
# times the 2 pi from the phase of the (1, 2) entry.
ORBIT_CONSTANT = 8.0 * math.pi**4

SCHEMES = ("tensor-gauss", "adaptive")


class NumericalError(ArithmeticError):
    """A quadrature or Monte Carlo computation could not produce a usable value."""


@dataclass(frozen=True)
class WeightParams:
    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not math.isfinite(lam) or lam <= 3:
            raise ValueError(f"weight parameter must satisfy lambda > 3, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)

    @property
    def c(self) -> float:
        return c_lambda(self)


@dataclass(frozen=True)
class QuadConfig:
    nodes_per_axis: int = 64
    scheme: str = "tensor-gauss"
    boundary_margin: float = 0.0
    # Only used by the adaptive scheme.
    tol: float = 1e-12
    max_nodes: int = 256

    def __post_init__(self):
        if int(self.nodes_per_axis) != self.nodes_per_axis or self.nodes_per_axis < 8:
            raise ValueError(f"nodes_per_axis must be an integer >= 8, got {self.nodes_per_axis!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not 0.0 <= self.boundary_margin <= 1e-6:
            raise ValueError("boundary_margin must lie in [0, 1e-6]")

    @classmethod
    def for_degree(cls, max_degree: int, **kw) -> "QuadConfig":
        return cls(nodes_per_axis=64 if max_degree <= 8 else 96, **kw)


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    nodes_per_axis: int


def _lam(p) -> float:
    return p.lam if isinstance(p, WeightParams) else WeightParams(p).lam


def c_lambda(p) -> float:
    """Normalizing constant of ``v_lambda``: ``(l-3)(l-2)^2(l-1) / pi^4``."""
    lam = _lam(p)
    return (lam - 3) * (lam - 2) ** 2 * (lam - 1) / math.pi**4


def b_poly(r1, r2, r3):
    return 1 - r1**2 - r2**2 - r3**2 + r1**2 * r3**2


def a_exponents(idx: SignatureIndex, k: int, convention: str = "exact") -> tuple[int, int, int]:
    """Exponents of ``r1, r2, r3`` in the radial weight of term ``k`` for block ``idx``.

    ``"exact"`` uses the orbit density ``r1^3 r2 r3``; ``"alternate"`` builds the
    exponents on ``r1^4 r2 r3^2`` instead.
    """
    if not 0 <= k <= idx.j:
        raise ValueError(f"k must lie in [0, {idx.j}], got {k}")
    base = {"exact": (3, 1, 1), "alternate": (4, 1, 2)}.get(convention)
    if base is None:
        raise ValueError(f"unknown convention {convention!r}")
    return (
        2 * (idx.nu1 - idx.j) + base[0],
        2 * (idx.j - k) + base[1],
        2 * (idx.nu2 + k) + base[2],
    )


def a_weight(r, idx: SignatureIndex, k: int, convention: str = "exact"):
    e1, e2, e3 = a_exponents(idx, k, convention)
    r1, r2, r3 = r
    return np.power(r1, e1) * np.power(r2, e2) * np.power(r3, e3)


def omega_contains(r) -> bool:
    # I - Z Z* for Z = [[r1, r2], [0, r3]] is [[1 - r1^2 - r2^2, -r2 r3], [-r2 r3, 1 - r3^2]];
    # its leading minor and determinant are 1 - r1^2 - r2^2 and b(r).
    r1, r2, r3 = r
    return bool(r1 * r1 + r2 * r2 < 1 and b_poly(r1, r2, r3) > 0)


class OmegaGrid:
    """Tensor Gauss-Jacobi nodes on the mapped cube for a fixed ``lambda``.

    ``w1 * w3 * ws`` (outer product) integrates against ``b^(lambda-4) dr``.
    Axis 0 carries ``u1`` (hence ``r1``), axis 1 ``u3`` and axis 2 ``s``.
    """

    def __init__(self, n: int, lam: float):
        self.n = n
        self.lam = lam
        alpha = 2 * lam - 6
        beta = lam - 4

        x, w = roots_jacobi(n, alpha, 0.0)
        u = 0.5 * (x + 1)
        v = 0.5 * (1 - x)  # 1 - u, kept exact near the endpoint
        half_pi = 0.5 * math.pi
        cos_u = np.sin(half_pi * v)
        sinc = cos_u / v
        wu = w * 2.0 ** (-alpha - 1) * sinc**alpha * half_pi

        xs, ws = roots_jacobi(n, beta, 0.0)
        s = 0.5 * (xs + 1)
        ws = ws * 2.0 ** (-beta - 1) * (1 + s) ** beta

        self.r1 = np.sin(half_pi * u)
        self.c1 = cos_u
        self.r3 = self.r1
        self.c3 = cos_u
        self.s = s
        self.w1 = wu
        self.w3 = wu
        self.ws = ws

    def radial(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable ``(r1, r2, r3)`` arrays over the node grid."""
        r1 = self.r1[:, None, None]
        r3 = self.r3[None, :, None]
        r2 = self.s[None, None, :] * self.c1[:, None, None] * self.c3[None, :, None]
        return r1, r2, r3

    def evaluate(self, f: Callable) -> np.ndarray:
        """``f(r1, r2, r3)`` on the full ``(n, n, n)`` grid; non-finite values raise."""
        r1, r2, r3 = self.radial()
        F = np.broadcast_to(np.asarray(f(r1, r2, r3)), (self.n,) * 3)
        bad = ~np.isfinite(F)
        if bad.any():
            i, j, k = np.argwhere(bad)[0]
            raise NumericalError(
                "integrand is not finite at interior node "
                f"r = ({r1[i, 0, 0]:.6g}, {r2[i, j, k]:.6g}, {r3[0, j, 0]:.6g}); "
                f"value {F[i, j, k]!r}"
            )
        return F

    def contract(self, F: np.ndarray, f1=None, f3=None, fs=None):
        """Weighted sum of ``F`` with optional extra separable factors per axis."""
        w1 = self.w1 if f1 is None else self.w1 * f1
        w3 = self.w3 if f3 is None else self.w3 * f3
        ws = self.ws if fs is None else self.ws * fs
        return (F @ ws) @ w3 @ w1

    def separable(self, f1, f3, fs) -> float:
        """Integral of a product ``f1(u1) f3(u3) fs(s)`` against the weight."""
        return float(np.dot(self.w1, f1) * np.dot(self.w3, f3) * np.dot(self.ws, fs))


@lru_cache(maxsize=16)
def omega_grid(n: int, lam: float) -> OmegaGrid:
    return OmegaGrid(n, lam)


def _integrate_at(f: Callable, n: int, lam: float):
    g = omega_grid(n, lam)
    return g.contract(g.evaluate(f))


def integrate_omega(f: Callable, p, q: QuadConfig | None = None) -> QuadResult:
    """Integral of ``f(r) b(r)^(lambda-4)`` over Omega.

    ``f`` takes broadcastable arrays ``(r1, r2, r3)``.  The value is the rule
    with ``2 n`` nodes per axis and ``error`` is its difference from the
    ``n``-node rule.  The adaptive scheme keeps doubling ``n`` until that
    difference drops below ``q.tol`` (relative to ``max(1, |value|)``) or
    ``2 n`` would exceed ``q.max_nodes``.
    """
    lam = _lam(p)
    q = q or QuadConfig()
    n = q.nodes_per_axis
    coarse = _integrate_at(f, n, lam)
    while True:
        fine = _integrate_at(f, 2 * n, lam)
        err = float(abs(fine - coarse))
        if q.scheme != "adaptive" or err <= q.tol * max(1.0, abs(fine)) or 4 * n > q.max_nodes:
            break
        n, coarse = 2 * n, fine
    value = complex(fine) if np.iscomplexobj(fine) else float(fine)
    return QuadResult(value, err, 2 * n)


def orbit_integral(f: Callable, p, q: QuadConfig | None = None) -> QuadResult:
    """``int_D f dv_lambda`` for an invariant ``f`` given as a function of ``r``."""
    lam = _lam(p)
    scale = ORBIT_CONSTANT * c_lambda(lam)
    res = integrate_omega(lambda r1, r2, r3: f(r1, r2, r3) * r1**3 * r2 * r3, lam, q)
    return QuadResult(res.value * scale, res.error * scale, res.nodes_per_axis)


def domain_weight(Z: np.ndarray, lam: float) -> np.ndarray:
    """Importance weight turning uniform samples of D into ``v_lambda`` samples."""
    _, det_defect = defect_minors(Z)
    return (c_lambda(lam) * DOMAIN_VOLUME) * det_defect ** (lam - 4)


def mc_integral_vlambda(
    F: Callable[[np.ndarray], np.ndarray],
    p,
    n: int,
    seed: int,
    allow_unbounded_weight: bool = False,
) -> tuple[complex | float, float]:
    """Monte Carlo estimate of ``int_D F dv_lambda`` with its standard error.

    Uniform samples of D are reweighted by ``c_lambda vol(D) det(I - Z Z*)^(lambda-4)``.
    The weight is unbounded for ``lambda < 4``, which must be opted into.
    """
    lam = _lam(p)
    if lam < 4 and not allow_unbounded_weight:
        raise ValueError("Monte Carlo over v_lambda needs lambda >= 4 unless unbounded weights are allowed")
    if n <= 0:
        raise ValueError("sample count must be positive")

    def features(Z):
        vals = np.asarray(F(Z)) * domain_weight(Z, lam)
        vals = np.broadcast_to(vals, (len(Z),)).astype(complex)
        return np.stack([vals.real, vals.imag], axis=-1)[:, None, :]

    mom = domain_moments(seed, n, features)
    mean = complex(mom.mean[0, 0], mom.mean[0, 1])
    cov = mom.cov[0]
    stderr = math.sqrt(max(cov[0, 0] + cov[1, 1], 0.0) / mom.n)
    if mean.imag == 0.0:
        return mean.real, stderr
    return mean, stderr
