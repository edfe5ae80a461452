"""Eigenvalues of Toeplitz operators with invariant symbols.

On the block generated by ``p_{nu,j}`` the operator ``T_phi`` is the scalar

    gamma = sum_k C(j,k)^2 / C(w, k) int_Omega phi a_k b^(lambda-4) dr
            / (same sum with phi = 1)

with ``w = nu1 - nu2`` and ``a_k = r1^(2(nu1-j)+3) r2^(2(j-k)+1) r3^(2(nu2+k)+1)``.
The ``1 / C(w, k)`` comes from the Haar norms of ``p_{nu,k}`` on U(2) and the
exponents from the orbit density ``r1^3 r2 r3``.  ``convention="alternate"``
switches both to the alternate forms (``C(w, k)`` and ``r1^4 r2 r3^2``).
The overall factor shared by numerator and denominator is never multiplied in.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .isotypic import DEGREE_CAP, SignatureIndex, enumerate_signatures, schur_norm
from .measure import NumericalError, OmegaGrid, QuadConfig, WeightParams, a_exponents, omega_grid
from .montecarlo import worker_count
from .symbols import SymbolSpec

__all__ = [
    "CSV_HEADER",
    "GammaDiagnostics",
    "SpectrumRow",
    "SpectrumTable",
    "gamma",
    "spectrum",
    "block_norm_sum",
]

CSV_HEADER = "# bergman-spectra v1"
CSV_COLUMNS = ("nu1", "nu2", "j", "lambda", "re_gamma", "im_gamma", "quad_error")


@dataclass(frozen=True)
class GammaDiagnostics:
    numerator: complex
    denominator: float
    quad_error: float
    nodes_per_axis: int
    term_errors: tuple[float, ...] = field(default=())


@dataclass(frozen=True)
class SpectrumRow:
    idx: SignatureIndex
    gamma: complex
    numerator: complex
    denominator: float
    quad_error: float


def _maybe_real(z):
    z = complex(z)
    return z.real if z.imag == 0.0 else z


def _terms(idx: SignatureIndex, convention: str):
    # The k-th coefficient is C(j, k)^2 times (w + 1) * (Haar norm of p_{nu,k}).
    for k in range(idx.j + 1):
        coef = comb(idx.j, k) ** 2 * (idx.width + 1) * schur_norm(idx.with_j(k), k, convention)
        yield coef, a_exponents(idx, k, convention)


def _factors(g: OmegaGrid, exps):
    e1, e2, e3 = exps
    # r2 = s * cos1 * cos3 splits the r2 power across all three axes.
    return g.r1**e1 * g.c1**e2, g.r3**e3 * g.c3**e2, g.s**e2


def _ratio_at(g: OmegaGrid, Phi, idx: SignatureIndex, convention: str):
    num = 0.0
    den = 0.0
    nums, dens = [], []
    for coef, exps in _terms(idx, convention):
        f1, f3, fs = _factors(g, exps)
        tn = g.contract(Phi, f1, f3, fs) if Phi is not None else g.separable(f1, f3, fs)
        td = g.separable(f1, f3, fs)
        nums.append(coef * tn)
        dens.append(coef * td)
        num = num + coef * tn
        den = den + coef * td
    return num, den, nums, dens


class _Evaluator:
    """Caches symbol values on the quadrature grids used for one symbol and weight."""

    def __init__(self, symbol: SymbolSpec | None, lam: float):
        self.symbol = symbol
        self.lam = lam
        self._phi: dict[int, np.ndarray | None] = {}

    def phi(self, n: int):
        if n not in self._phi:
            if self.symbol is None:
                self._phi[n] = None
            else:
                g = omega_grid(n, self.lam)
                Phi = g.evaluate(self.symbol)
                self.symbol.check_bound(*g.radial())
                self._phi[n] = Phi
        return self._phi[n]

    def block(self, idx: SignatureIndex, q: QuadConfig, convention: str):
        n = q.nodes_per_axis
        coarse = _ratio_at(omega_grid(n, self.lam), self.phi(n), idx, convention)
        while True:
            fine = _ratio_at(omega_grid(2 * n, self.lam), self.phi(2 * n), idx, convention)
            g_c = coarse[0] / coarse[1]
            g_f = fine[0] / fine[1]
            err = float(abs(g_f - g_c))
            if q.scheme != "adaptive" or err <= q.tol * max(1.0, abs(g_f)) or 4 * n > q.max_nodes:
                break
            n, coarse = 2 * n, fine
        num, den, nums, dens = fine
        den_err = abs(den - coarse[1])
        if not den > 10 * den_err:
            raise NumericalError(f"ill-conditioned block {idx}: denominator {den:.3e} vs error {den_err:.3e}")
        term_errors = tuple(float(abs(a - b)) for a, b in zip(nums, coarse[2]))
        diag = GammaDiagnostics(_maybe_real(num), float(den), err, 2 * n, term_errors)
        return _maybe_real(g_f), diag


def gamma(
    symbol: SymbolSpec,
    idx: SignatureIndex,
    p: WeightParams,
    q: QuadConfig | None = None,
    convention: str = "exact",
) -> tuple[complex, GammaDiagnostics]:
    """Eigenvalue of ``T_phi`` on the block of ``idx`` and its quadrature diagnostics."""
    q = q or QuadConfig()
    return _Evaluator(symbol, p.lam).block(idx, q, convention)


def block_norm_sum(idx: SignatureIndex, p: WeightParams, q: QuadConfig | None = None) -> float:
    """The denominator k-sum for ``idx`` (radial part of ``<p, p>_lambda``)."""
    q = q or QuadConfig()
    g = omega_grid(2 * q.nodes_per_axis, p.lam)
    return float(_ratio_at(g, None, idx, "exact")[1])


@dataclass
class SpectrumTable:
    lam: float
    symbol: str
    rows: list[SpectrumRow]
    nodes_per_axis: int
    convention: str = "exact"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"{CSV_HEADER}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.rows:
            g = complex(row.gamma)
            w.writerow(
                [row.idx.nu1, row.idx.nu2, row.idx.j, repr(self.lam), repr(g.real), repr(g.imag), repr(row.quad_error)]
            )
        return buf.getvalue()

    def to_dict(self) -> dict:
        def cplx(z):
            z = complex(z)
            return {"re": z.real, "im": z.imag}

        return {
            "format": "bergman-spectra/spectrum",
            "version": 1,
            "lambda": self.lam,
            "symbol": self.symbol,
            "nodes_per_axis": self.nodes_per_axis,
            "convention": self.convention,
            "rows": [
                {
                    "nu1": r.idx.nu1,
                    "nu2": r.idx.nu2,
                    "j": r.idx.j,
                    "gamma": cplx(r.gamma),
                    "numerator": cplx(r.numerator),
                    "denominator": r.denominator,
                    "quad_error": r.quad_error,
                }
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumTable":
        rows = [
            SpectrumRow(
                SignatureIndex(r["nu1"], r["nu2"], r["j"]),
                _maybe_real(complex(r["gamma"]["re"], r["gamma"]["im"])),
                _maybe_real(complex(r["numerator"]["re"], r["numerator"]["im"])),
                r["denominator"],
                r["quad_error"],
            )
            for r in d["rows"]
        ]
        return cls(d["lambda"], d["symbol"], rows, d["nodes_per_axis"], d.get("convention", "exact"))


def spectrum(
    symbol: SymbolSpec,
    p: WeightParams,
    max_degree: int,
    q: QuadConfig | None = None,
    convention: str = "exact",
) -> SpectrumTable:
    """One row per signature with ``|nu| <= max_degree`` in canonical order."""
    if not 0 <= max_degree <= DEGREE_CAP:
        raise ValueError(f"max_degree must lie in [0, {DEGREE_CAP}], got {max_degree}")
    q = q or QuadConfig.for_degree(max_degree)
    ev = _Evaluator(symbol, p.lam)
    idxs = enumerate_signatures(max_degree)
    # Fill the symbol cache before fanning out.
    ev.phi(q.nodes_per_axis)
    ev.phi(2 * q.nodes_per_axis)

    def row(idx):
        try:
            g, d = ev.block(idx, q, convention)
        except NumericalError as exc:
            raise NumericalError(f"{exc} (block {idx})") from exc
        return SpectrumRow(idx, g, d.numerator, d.denominator, d.quad_error)

    workers = min(worker_count(), len(idxs))
    if workers > 1 and q.scheme != "adaptive":
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(row, idxs))
    else:
        rows = [row(i) for i in idxs]
    return SpectrumTable(p.lam, symbol.name, rows, 2 * q.nodes_per_axis, convention)
