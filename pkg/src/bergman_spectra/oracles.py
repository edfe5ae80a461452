"""Monte Carlo oracles that check the spectral formulas independently.

Every oracle integrates directly over D (or over U(2) with Haar measure) and
never goes through the radial quadrature except where a norm is needed for
normalization.  All estimates are reproducible bit-for-bit from
``(inputs, n, seed)``; the ``*_batch`` variants evaluate many cells on one
shared sample stream and return exactly what the single-cell calls would.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .isotypic import SignatureIndex, hw_poly
from .mat2 import DOMAIN_VOLUME, defect_minors
from .measure import ORBIT_CONSTANT, QuadConfig, WeightParams, c_lambda, orbit_integral
from .montecarlo import Moments, domain_moments, haar_moments
from .orbits import radial_coordinates
from .spectrum import block_norm_sum
from .symbols import SymbolSpec

__all__ = [
    "McReport",
    "rayleigh_mc",
    "rayleigh_mc_batch",
    "cross_inner_mc",
    "cross_inner_mc_batch",
    "schur_mc",
    "schur_mc_batch",
    "transpose_check",
    "transpose_check_batch",
    "decomposition_check",
    "decomposition_check_batch",
    "block_norm",
]


@dataclass(frozen=True)
class McReport:
    estimate: complex
    stderr: float
    n: int
    seed: int

    def within(self, target: complex = 0.0, sigmas: float = 4.0, slack: float = 0.0) -> bool:
        return abs(self.estimate - target) <= sigmas * self.stderr + slack


def _real_if_exact(z: complex):
    return z.real if z.imag == 0.0 else z


def _mean_report(mom: Moments, g: int, seed: int, scale: float = 1.0) -> McReport:
    """Report for a group carrying ``(re, im)`` features."""
    mean = complex(mom.mean[g, 0], mom.mean[g, 1]) * scale
    cov = mom.cov[g]
    stderr = math.sqrt(max(cov[0, 0] + cov[1, 1], 0.0) / mom.n) * abs(scale)
    return McReport(_real_if_exact(mean), stderr, mom.n, seed)


def _check_lambda(p: WeightParams, allow_unbounded_weight: bool) -> None:
    if p.lam < 4 and not allow_unbounded_weight:
        raise ValueError("Monte Carlo oracles need lambda >= 4 unless unbounded weights are allowed")


class _BlockCache:
    """Per-block memo of quantities shared between cells."""

    def __init__(self, Z: np.ndarray):
        self.Z = Z
        self._r = None
        self._defect = None
        self._w: dict[float, np.ndarray] = {}
        self._p: dict[SignatureIndex, np.ndarray] = {}
        self._phi: dict[int, np.ndarray] = {}

    @property
    def r(self):
        if self._r is None:
            self._r = radial_coordinates(self.Z)
        return self._r

    def weight(self, lam: float) -> np.ndarray:
        """``v_lambda`` density relative to the uniform law on D."""
        if lam not in self._w:
            if self._defect is None:
                self._defect = defect_minors(self.Z)[1]
            self._w[lam] = (c_lambda(lam) * DOMAIN_VOLUME) * self._defect ** (lam - 4)
        return self._w[lam]

    def p(self, idx: SignatureIndex) -> np.ndarray:
        if idx not in self._p:
            self._p[idx] = hw_poly(idx, self.Z)
        return self._p[idx]

    def phi(self, symbol: SymbolSpec) -> np.ndarray:
        key = id(symbol)
        if key not in self._phi:
            vals = np.asarray(symbol(*self.r), dtype=complex)
            self._phi[key] = np.broadcast_to(vals, (len(self.Z),))
        return self._phi[key]


def _reim(z: np.ndarray) -> np.ndarray:
    return np.stack([z.real, z.imag], axis=-1)


# Rayleigh quotients ---------------------------------------------------------


def rayleigh_mc_batch(
    cells: Sequence[tuple[SymbolSpec, SignatureIndex, WeightParams]],
    n: int,
    seed: int,
    allow_unbounded_weight: bool = False,
) -> list[McReport]:
    """Estimate ``<phi p, p> / <p, p>`` for each ``(symbol, idx, weight)`` cell.

    Numerator and denominator share samples; the standard error of the ratio
    comes from the delta method.
    """
    for _, _, p in cells:
        _check_lambda(p, allow_unbounded_weight)

    def features(Z):
        bc = _BlockCache(Z)
        out = np.empty((len(Z), len(cells), 3))
        for c, (symbol, idx, p) in enumerate(cells):
            y = bc.weight(p.lam) * np.abs(bc.p(idx)) ** 2
            x = bc.phi(symbol) * y
            out[:, c, 0] = x.real
            out[:, c, 1] = x.imag
            out[:, c, 2] = y
        return out

    mom = domain_moments(seed, n, features)
    reports = []
    for c in range(len(cells)):
        mx = complex(mom.mean[c, 0], mom.mean[c, 1])
        my = mom.mean[c, 2]
        ratio = mx / my
        cov = mom.cov[c]
        var = 0.0
        for part, R in ((0, ratio.real), (1, ratio.imag)):
            var += cov[part, part] - 2 * R * cov[part, 2] + R * R * cov[2, 2]
        stderr = math.sqrt(max(var, 0.0) / mom.n) / abs(my)
        reports.append(McReport(_real_if_exact(ratio), stderr, mom.n, seed))
    return reports


def rayleigh_mc(
    symbol: SymbolSpec,
    idx: SignatureIndex,
    p: WeightParams,
    n: int,
    seed: int,
    allow_unbounded_weight: bool = False,
) -> McReport:
    return rayleigh_mc_batch([(symbol, idx, p)], n, seed, allow_unbounded_weight)[0]


# Cross inner products -------------------------------------------------------


def block_norm(idx: SignatureIndex, p: WeightParams, q: QuadConfig | None = None) -> float:
    """``<p_{nu,j}, p_{nu,j}>_lambda`` from the radial quadrature."""
    return ORBIT_CONSTANT * c_lambda(p) / (idx.width + 1) * block_norm_sum(idx, p, q)


def cross_inner_mc_batch(
    cells: Sequence[tuple[SymbolSpec, SignatureIndex, SignatureIndex, WeightParams]],
    n: int,
    seed: int,
    q: QuadConfig | None = None,
    allow_unbounded_weight: bool = False,
) -> list[McReport]:
    """``<phi p_A, p_B> / sqrt(<p_A, p_A> <p_B, p_B>)`` for each cell."""
    for _, a, b, p in cells:
        if a == b:
            raise ValueError(f"cross inner product needs distinct indices, got {a} twice")
        _check_lambda(p, allow_unbounded_weight)

    def features(Z):
        bc = _BlockCache(Z)
        out = np.empty((len(Z), len(cells), 2))
        for c, (symbol, a, b, p) in enumerate(cells):
            out[:, c, :] = _reim(bc.weight(p.lam) * bc.phi(symbol) * bc.p(a) * np.conj(bc.p(b)))
        return out

    mom = domain_moments(seed, n, features)
    reports = []
    for c, (_, a, b, p) in enumerate(cells):
        norm = math.sqrt(block_norm(a, p, q) * block_norm(b, p, q))
        reports.append(_mean_report(mom, c, seed, 1.0 / norm))
    return reports


def cross_inner_mc(
    symbol: SymbolSpec,
    idx_a: SignatureIndex,
    idx_b: SignatureIndex,
    p: WeightParams,
    n: int,
    seed: int,
    q: QuadConfig | None = None,
    allow_unbounded_weight: bool = False,
) -> McReport:
    return cross_inner_mc_batch([(symbol, idx_a, idx_b, p)], n, seed, q, allow_unbounded_weight)[0]


# Schur orthogonality --------------------------------------------------------


def schur_mc_batch(cells: Sequence[tuple[tuple[int, int], int, int]], n: int, seed: int) -> list[McReport]:
    """Haar averages of ``p_{nu,j}(A) conj(p_{nu,k}(A))`` for ``(nu, j, k)`` cells."""
    pairs = [(SignatureIndex(nu[0], nu[1], j), SignatureIndex(nu[0], nu[1], k)) for nu, j, k in cells]

    def features(A):
        cache: dict[SignatureIndex, np.ndarray] = {}

        def p(idx):
            if idx not in cache:
                cache[idx] = hw_poly(idx, A)
            return cache[idx]

        out = np.empty((len(A), len(pairs), 2))
        for c, (a, b) in enumerate(pairs):
            out[:, c, :] = _reim(p(a) * np.conj(p(b)))
        return out

    mom = haar_moments(seed, n, features)
    return [_mean_report(mom, c, seed) for c in range(len(pairs))]


def schur_mc(nu: tuple[int, int], j: int, k: int, n: int, seed: int) -> McReport:
    return schur_mc_batch([(nu, j, k)], n, seed)[0]


# Transpose equivalence ------------------------------------------------------


def transpose_check_batch(
    cells: Sequence[tuple[SymbolSpec, SignatureIndex, SignatureIndex, WeightParams]],
    n: int,
    seed: int,
    allow_unbounded_weight: bool = False,
) -> list[McReport]:
    """``<(phi o F^-1)(f o F^-1), g o F^-1> - <phi f, g>`` with ``F(Z) = Z^T``.

    Both inner products are evaluated on the same samples, the first through
    the transposed points.
    """
    for _, _, _, p in cells:
        _check_lambda(p, allow_unbounded_weight)

    def features(Z):
        bc = _BlockCache(Z)
        bt = _BlockCache(np.swapaxes(Z, -1, -2))
        out = np.empty((len(Z), len(cells), 2))
        for c, (symbol, f, g, p) in enumerate(cells):
            w = bc.weight(p.lam)
            h = bc.phi(symbol) * bc.p(f) * np.conj(bc.p(g))
            ht = bt.phi(symbol) * bt.p(f) * np.conj(bt.p(g))
            out[:, c, :] = _reim(w * (ht - h))
        return out

    mom = domain_moments(seed, n, features)
    return [_mean_report(mom, c, seed) for c in range(len(cells))]


def transpose_check(
    symbol: SymbolSpec,
    f: SignatureIndex,
    g: SignatureIndex,
    p: WeightParams,
    n: int,
    seed: int,
    allow_unbounded_weight: bool = False,
) -> McReport:
    return transpose_check_batch([(symbol, f, g, p)], n, seed, allow_unbounded_weight)[0]


# Measure decomposition ------------------------------------------------------


@dataclass(frozen=True)
class DecompositionReport(McReport):
    """``estimate`` is the Monte Carlo side minus the quadrature side."""

    mc_value: complex = 0.0
    quad_value: complex = 0.0
    quad_error: float = 0.0


def decomposition_check_batch(
    cells: Sequence[tuple[Callable, WeightParams]],
    n: int,
    seed: int,
    q: QuadConfig | None = None,
    allow_unbounded_weight: bool = False,
) -> list[DecompositionReport]:
    """Compare ``int_D f(r(Z)) dv_lambda`` by Monte Carlo and by radial quadrature."""
    for _, p in cells:
        _check_lambda(p, allow_unbounded_weight)

    def features(Z):
        bc = _BlockCache(Z)
        out = np.empty((len(Z), len(cells), 2))
        for c, (f, p) in enumerate(cells):
            vals = np.broadcast_to(np.asarray(f(*bc.r), dtype=complex), (len(Z),))
            out[:, c, :] = _reim(bc.weight(p.lam) * vals)
        return out

    mom = domain_moments(seed, n, features)
    reports = []
    for c, (f, p) in enumerate(cells):
        mc = _mean_report(mom, c, seed)
        quad = orbit_integral(f, p, q)
        reports.append(
            DecompositionReport(
                _real_if_exact(complex(mc.estimate) - complex(quad.value)),
                mc.stderr,
                mc.n,
                seed,
                mc.estimate,
                quad.value,
                quad.error,
            )
        )
    return reports


def decomposition_check(
    f_radial: Callable,
    p: WeightParams,
    q: QuadConfig | None,
    n: int,
    seed: int,
    allow_unbounded_weight: bool = False,
) -> DecompositionReport:
    return decomposition_check_batch([(f_radial, p)], n, seed, q, allow_unbounded_weight)[0]
