from __future__ import annotations

import numpy as np
import pytest
from math import comb

from bergman_spectra.isotypic import (
    SignatureIndex,
    enumerate_signatures,
    hw_poly,
    hw_poly_on_orbit,
    schur_norm,
)
from bergman_spectra.mat2 import haar_unitary
from bergman_spectra.orbits import canonical_matrix


def test_signature_validation():
    for bad in [(0, 1, 0), (1, 0, 2), (-1, -1, 0), (1.5, 0, 0)]:
        with pytest.raises(ValueError):
            SignatureIndex(*bad)
    idx = SignatureIndex(3, 1, 2)
    assert (idx.width, idx.degree, idx.weight) == (2, 4, -2)
    assert str(idx) == "((3,1),2)"


def test_hw_poly_examples():
    Z = np.array([[1 + 2j, 3 - 1j], [0.5, 4j]])
    assert hw_poly(SignatureIndex(0, 0, 0), Z) == 1
    assert hw_poly(SignatureIndex(1, 0, 1), Z) == Z[0, 1]
    assert hw_poly(SignatureIndex(1, 1, 0), np.array([[1, 2], [3, 4]], dtype=complex)) == -2


def test_hw_poly_on_orbit_examples():
    rng = np.random.default_rng(0)
    A = haar_unitary(rng)
    r = (0.3, 0.2, 0.6)
    assert hw_poly_on_orbit(SignatureIndex(0, 0, 0), A, r) == pytest.approx(1)
    assert hw_poly_on_orbit(SignatureIndex(1, 0, 0), np.eye(2), r) == pytest.approx(0.3)
    idx = SignatureIndex(3, 1, 2)
    direct = hw_poly(idx, A @ canonical_matrix(r))
    assert abs(hw_poly_on_orbit(idx, A, r) - direct) <= 1e-12 * abs(direct)


def test_schur_norm_exact():
    assert schur_norm(SignatureIndex(0, 0, 0), 0) == 1
    assert schur_norm(SignatureIndex(2, 0, 1), 1) == pytest.approx(1 / 6)
    assert schur_norm(SignatureIndex(2, 0, 0), 1) == 0
    with pytest.raises(ValueError):
        schur_norm(SignatureIndex(2, 0, 0), 3)


def test_schur_norm_alternate_form():
    assert schur_norm(SignatureIndex(0, 0, 0), 0, "alternate") == 1
    assert schur_norm(SignatureIndex(2, 0, 1), 1, "alternate") == pytest.approx(2 / 3)
    assert schur_norm(SignatureIndex(2, 0, 0), 1, "alternate") == 0


def test_schur_norms_sum_to_one_over_weights():
    # Summing |p_{nu,j}|^2 C(w, j) over j gives |a11|^2 + |a12|^2 = 1 to the power w.
    for w in range(6):
        s = sum(comb(w, j) * schur_norm(SignatureIndex(w, 0, j), j) for j in range(w + 1))
        assert s == pytest.approx(1.0)


def test_enumerate_signatures():
    assert enumerate_signatures(0) == [SignatureIndex(0, 0, 0)]
    assert enumerate_signatures(1) == [SignatureIndex(0, 0, 0), SignatureIndex(1, 0, 0), SignatureIndex(1, 0, 1)]
    assert len(enumerate_signatures(4)) == 22
    for d in range(7):
        sigs = [s for s in enumerate_signatures(d) if s.degree == d]
        # dim of degree-d polynomials on C^4: each block has width+1 copies.
        assert sum((s.width + 1) for s in sigs) == comb(d + 3, 3)
        keys = [s.sort_key() for s in enumerate_signatures(d)]
        assert keys == sorted(keys) and len(set(keys)) == len(keys)
    with pytest.raises(ValueError):
        enumerate_signatures(-1)
