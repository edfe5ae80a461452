"""Spectra of Toeplitz operators with U(2) x T^2-invariant symbols on the 2x2 Cartan domain."""

from .isotypic import SignatureIndex, enumerate_signatures, hw_poly, hw_poly_on_orbit, schur_norm
from .mat2 import adjoint, det2, in_domain, haar_unitary, sample_domain_uniform
from .measure import NumericalError, QuadConfig, WeightParams, c_lambda, integrate_omega, orbit_integral
from .orbits import GroupElement, RadialTriple, act, canonical_matrix, reduce
from .spectrum import SpectrumTable, gamma, spectrum
from .symbols import SymbolSpec, parse_symbol, symbol_from_string

__version__ = "0.1.0"

__all__ = [
    "SignatureIndex",
    "enumerate_signatures",
    "hw_poly",
    "hw_poly_on_orbit",
    "schur_norm",
    "adjoint",
    "det2",
    "in_domain",
    "haar_unitary",
    "sample_domain_uniform",
    "NumericalError",
    "QuadConfig",
    "WeightParams",
    "c_lambda",
    "integrate_omega",
    "orbit_integral",
    "GroupElement",
    "RadialTriple",
    "act",
    "canonical_matrix",
    "reduce",
    "SpectrumTable",
    "gamma",
    "spectrum",
    "SymbolSpec",
    "parse_symbol",
    "symbol_from_string",
]
