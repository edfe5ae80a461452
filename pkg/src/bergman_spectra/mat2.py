"""Numerical kernel for 2x2 complex matrices.

Matrices are plain numpy arrays of shape ``(2, 2)`` or stacked ``(..., 2, 2)``;
every function here broadcasts over leading axes.  The Hermitian inner product
on C^2 is ``<u, v> = conj(v) . u`` (linear in the first slot).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "BOUNDARY_EPS",
    "DOMAIN_VOLUME",
    "adjoint",
    "det2",
    "inner",
    "defect_minors",
    "in_domain",
    "as_matrix",
    "as_unitary",
    "as_domain_point",
    "haar_unitary",
    "propose_domain_block",
    "sample_domain_uniform",
]

# Points with a Sylvester minor below this are treated as outside D.
BOUNDARY_EPS = 1e-14

# Lebesgue volume of D in R^8, equal to 1 / c_4.
DOMAIN_VOLUME = np.pi**4 / 12.0


def as_matrix(Z) -> np.ndarray:
    """Coerce to a complex array of trailing shape (2, 2) with finite entries."""
    Z = np.asarray(Z, dtype=complex)
    if Z.shape[-2:] != (2, 2):
        raise ValueError(f"expected trailing shape (2, 2), got {Z.shape}")
    if not np.all(np.isfinite(Z)):
        raise ValueError("matrix entries must be finite")
    return Z


def adjoint(Z: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(Z, -1, -2))


def det2(Z: np.ndarray):
    Z = np.asarray(Z)
    return Z[..., 0, 0] * Z[..., 1, 1] - Z[..., 0, 1] * Z[..., 1, 0]


def inner(u: np.ndarray, v: np.ndarray):
    """Hermitian product ``<u, v> = sum(u * conj(v))`` over the last axis."""
    return np.sum(np.asarray(u) * np.conj(v), axis=-1)


def defect_minors(Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Leading minor and determinant of ``I - Z Z*``.

    Uses the closed forms ``1 - |z11|^2 - |z12|^2`` and
    ``1 - tr(Z Z*) + |det Z|^2``.
    """
    Z = np.asarray(Z)
    a2 = np.abs(Z) ** 2
    lead = 1.0 - a2[..., 0, 0] - a2[..., 0, 1]
    full = 1.0 - a2.sum(axis=(-1, -2)) + np.abs(det2(Z)) ** 2
    return lead, full


def in_domain(Z: np.ndarray):
    """True where ``Z Z* < I`` by Sylvester's criterion (NaN entries give False)."""
    lead, full = defect_minors(Z)
    return (lead > BOUNDARY_EPS) & (full > BOUNDARY_EPS)


def as_unitary(U, tol: float = 1e-12) -> np.ndarray:
    """Validate that ``U`` is unitary to ``tol`` in the max norm and return it."""
    U = as_matrix(U)
    err = np.max(np.abs(adjoint(U) @ U - np.eye(2)))
    if err > tol:
        raise ValueError(f"matrix is not unitary: |U*U - I|_max = {err:.3e}")
    return U


def as_domain_point(Z) -> np.ndarray:
    Z = as_matrix(Z)
    if not np.all(in_domain(Z)):
        raise ValueError("matrix does not satisfy Z Z* < I")
    return Z


def haar_unitary(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw from the normalized Haar measure on U(2).

    QR of a complex Ginibre matrix, with each column of Q rotated by the phase
    of the matching diagonal entry of R so the factorization is unique.
    """
    shape = (2, 2) if size is None else (size, 2, 2)
    while True:
        G = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        Q, R = np.linalg.qr(G)
        d = np.diagonal(R, axis1=-2, axis2=-1)
        if np.all(np.abs(d) > 0):
            break
    return Q * (d / np.abs(d))[..., None, :]


_MAX_PROPOSALS = 1 << 19


def _box_rows(rng: np.random.Generator, m: int) -> np.ndarray:
    """Rows drawn uniformly from [-1, 1]^4 and kept when their norm is below one.

    Each row of a point of D is a vector of norm < 1, so this is a necessary
    condition; drawing the second row only for survivors of the first keeps
    the result identical in law to filtering full box proposals.
    """
    X = 2.0 * rng.random((4, m)) - 1.0
    keep = np.einsum("ij,ij->j", X, X) < 1.0
    return X[:, keep]


def propose_domain_block(rng: np.random.Generator, m: int) -> np.ndarray:
    """Run ``m`` box proposals and return the ones that land in D."""
    top = _box_rows(rng, m)
    bottom = 2.0 * rng.random((4, top.shape[1])) - 1.0
    keep = np.einsum("ij,ij->j", bottom, bottom) < 1.0
    top, bottom = top[:, keep], bottom[:, keep]
    Z = np.empty((top.shape[1], 2, 2), dtype=complex)
    Z[:, 0, 0] = top[0] + 1j * top[1]
    Z[:, 0, 1] = top[2] + 1j * top[3]
    Z[:, 1, 0] = bottom[0] + 1j * bottom[1]
    Z[:, 1, 1] = bottom[2] + 1j * bottom[3]
    return Z[in_domain(Z)]


def sample_domain_uniform(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform (Lebesgue) samples of D by rejection from the box [-1, 1]^8.

    Every entry of a point of D has modulus below one, so the box contains D;
    the overall acceptance rate is vol(D) / 2^8, about 3.2%.
    """
    want = 1 if size is None else size
    chunks = []
    have = 0
    while have < want:
        m = min(_MAX_PROPOSALS, max(1024, int(1.15 * (want - have) / 0.0317)))
        Z = propose_domain_block(rng, m)
        chunks.append(Z)
        have += len(Z)
    out = np.concatenate(chunks)[:want]
    return out[0] if size is None else out
