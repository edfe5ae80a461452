"""Blocked, seed-reproducible Monte Carlo streams.

A run is identified by ``(seed, stream)``; samples are produced in fixed-size
blocks, each drawn from its own Philox generator keyed by
``(seed, stream, block)``.  Block statistics are merged in block order, so
results do not depend on how many worker threads evaluate the blocks.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mat2 import haar_unitary, sample_domain_uniform

__all__ = [
    "BLOCK_SIZE",
    "DOMAIN_STREAM",
    "HAAR_STREAM",
    "Moments",
    "block_generator",
    "worker_count",
    "stream_moments",
    "domain_moments",
    "haar_moments",
]

BLOCK_SIZE = 1 << 16
DOMAIN_STREAM = 0xD0
HAAR_STREAM = 0xA4
THREADS_ENV = "BERGMAN_SPECTRA_THREADS"


def block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, block])))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    cpus = os.cpu_count() or 1
    if not raw:
        return cpus
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return cap


@dataclass
class Moments:
    """Running count, mean and centred cross-products for groups of real features.

    ``mean`` has shape ``(groups, d)`` and ``m2`` shape ``(groups, d, d)``;
    features in different groups are never cross-multiplied.
    """

    n: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def from_block(cls, X: np.ndarray) -> "Moments":
        X = np.asarray(X, dtype=float)
        m, groups, d = X.shape
        mean = np.empty((groups, d))
        m2 = np.empty((groups, d, d))
        # Reduce each group on its own contiguous copy so a group's statistics
        # do not depend on which other groups share the block.
        for g in range(groups):
            Xg = np.ascontiguousarray(X[:, g, :].T)
            mu = Xg.sum(axis=1) / m
            C = Xg - mu[:, None]
            mean[g] = mu
            m2[g] = C @ C.T
        return cls(m, mean, m2)

    def merge(self, other: "Moments") -> "Moments":
        if self.n == 0:
            return other
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.n / n)
        m2 = self.m2 + other.m2 + np.einsum("gi,gj->gij", delta, delta) * (self.n * other.n / n)
        return Moments(n, mean, m2)

    @property
    def cov(self) -> np.ndarray:
        """Sample covariance of the features (``ddof = 1``)."""
        if self.n < 2:
            return np.zeros_like(self.m2)
        return self.m2 / (self.n - 1)


def _block_sizes(n: int) -> list[int]:
    full, rest = divmod(n, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def stream_moments(
    seed: int,
    stream: int,
    n: int,
    draw: Callable[[np.random.Generator, int], np.ndarray],
    features: Callable[[np.ndarray], np.ndarray],
) -> Moments:
    """Draw ``n`` samples blockwise and accumulate moments of ``features``.

    ``features`` maps a block of samples to an array of shape
    ``(m, groups, d)``.
    """
    if n <= 0:
        raise ValueError("sample count must be positive")
    sizes = _block_sizes(n)

    def run(b: int) -> Moments:
        rng = block_generator(seed, stream, b)
        return Moments.from_block(features(draw(rng, sizes[b])))

    workers = min(worker_count(), len(sizes))
    if workers == 1:
        parts = map(run, range(len(sizes)))
        total = None
        for part in parts:
            total = part if total is None else total.merge(part)
        return total
    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(run, range(len(sizes))))
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return total


def domain_moments(seed: int, n: int, features: Callable[[np.ndarray], np.ndarray]) -> Moments:
    """Moments of ``features(Z)`` for ``n`` uniform samples of D."""
    return stream_moments(seed, DOMAIN_STREAM, n, sample_domain_uniform, features)


def haar_moments(seed: int, n: int, features: Callable[[np.ndarray], np.ndarray]) -> Moments:
    """Moments of ``features(A)`` for ``n`` Haar-random unitaries."""
    return stream_moments(seed, HAAR_STREAM, n, haar_unitary, features)
