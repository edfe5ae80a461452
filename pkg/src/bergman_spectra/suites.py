"""Named verification suites and their JSON reports.

Each suite returns a :class:`SuiteResult` holding one record per checked cell
and a suite-level pass rule.  Records contain only inputs, estimates and
thresholds, never timings, so a report is a pure function of
``(suite, lambda, mc_samples, seed, quadrature)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations

from .isotypic import SignatureIndex, enumerate_signatures, schur_norm
from .measure import ORBIT_CONSTANT, QuadConfig, WeightParams, b_poly, c_lambda, integrate_omega
from .oracles import (
    cross_inner_mc_batch,
    decomposition_check_batch,
    rayleigh_mc_batch,
    schur_mc_batch,
    transpose_check_batch,
)
from .spectrum import gamma
from .symbols import constant, parse_symbol, rational

__all__ = ["SUITES", "SuiteResult", "run_suite", "run_suites", "report_json"]

SIGMAS = 4.0
NORMALIZATION_TOL = 1e-6
NORMALIZATION_LAMBDAS = (4.0, 5.0, 7.5)

# Signatures used by the Rayleigh suite: every k-sum shape up to degree 3.
RAYLEIGH_SIGNATURES = (
    SignatureIndex(0, 0, 0),
    SignatureIndex(1, 0, 1),
    SignatureIndex(2, 1, 0),
    SignatureIndex(2, 1, 1),
    SignatureIndex(3, 0, 2),
)


def oracle_symbols():
    return (
        parse_symbol("r1^2 + r3^2", bound=2.0),
        parse_symbol("r2^2", bound=1.0),
        rational(),
    )


@dataclass
class SuiteResult:
    name: str
    rule: str
    required: int
    checks: list[dict] = field(default_factory=list)

    @property
    def passed_count(self) -> int:
        return sum(c["pass"] for c in self.checks)

    @property
    def passed(self) -> bool:
        return self.passed_count >= self.required

    def failures(self) -> list[dict]:
        return [c for c in self.checks if not c["pass"]]

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "rule": self.rule,
            "required": self.required,
            "passed_count": self.passed_count,
            "total": len(self.checks),
            "pass": self.passed,
            "checks": self.checks,
        }


def _cplx(z) -> dict | float:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _mc_record(name: str, inputs: dict, rep, target=0.0, slack: float = 0.0) -> dict:
    threshold = SIGMAS * rep.stderr + slack
    deviation = abs(complex(rep.estimate) - complex(target))
    return {
        "name": name,
        "inputs": inputs,
        "estimate": _cplx(rep.estimate),
        "target": _cplx(target),
        "stderr": rep.stderr,
        "deviation": deviation,
        "threshold": threshold,
        "pass": bool(deviation <= threshold),
    }


def _all_of(name: str, checks: list[dict]) -> SuiteResult:
    return SuiteResult(name, "all", len(checks), checks)


def suite_normalization(lam: float, n: int, seed: int, q: QuadConfig) -> SuiteResult:
    """``int_Omega (orbit density) b^(lambda-4) = 1`` by quadrature alone."""
    lams = sorted(set(NORMALIZATION_LAMBDAS) | {float(lam)})
    checks = []
    for l in lams:
        res = integrate_omega(lambda r1, r2, r3: r1**3 * r2 * r3, l, q)
        value = ORBIT_CONSTANT * c_lambda(l) * res.value
        residual = abs(value - 1.0)
        checks.append(
            {
                "name": "normalization",
                "inputs": {"lambda": l, "nodes_per_axis": res.nodes_per_axis},
                "estimate": value,
                "target": 1.0,
                "quad_error": ORBIT_CONSTANT * c_lambda(l) * res.error,
                "deviation": residual,
                "threshold": NORMALIZATION_TOL,
                "pass": bool(residual <= NORMALIZATION_TOL),
            }
        )
    return _all_of("normalization", checks)


def suite_schur(lam: float, n: int, seed: int, q: QuadConfig) -> SuiteResult:
    nu = (3, 1)
    cells = [(nu, j, k) for j in range(3) for k in range(3)]
    reps = schur_mc_batch(cells, n, seed)
    checks = []
    for (nu_, j, k), rep in zip(cells, reps):
        target = schur_norm(SignatureIndex(nu_[0], nu_[1], j), k)
        checks.append(_mc_record("schur", {"nu": list(nu_), "j": j, "k": k}, rep, target))
    return _all_of("schur", checks)


def rayleigh_cells():
    return [
        (sym, idx, WeightParams(l))
        for sym in oracle_symbols()
        for l in (4.0, 5.0)
        for idx in RAYLEIGH_SIGNATURES
    ]


def suite_rayleigh(lam: float, n: int, seed: int, q: QuadConfig) -> SuiteResult:
    cells = rayleigh_cells()
    reps = rayleigh_mc_batch(cells, n, seed)
    checks = []
    for (sym, idx, p), rep in zip(cells, reps):
        g, diag = gamma(sym, idx, p, q)
        inputs = {"symbol": sym.name, "index": str(idx), "lambda": p.lam}
        rec = _mc_record("rayleigh", inputs, rep, g, slack=diag.quad_error)
        checks.append(rec)
    required = math.ceil(len(checks) * 28 / 30)
    return SuiteResult("rayleigh", f">= {required} of {len(checks)}", required, checks)


def suite_cross(lam: float, n: int, seed: int, q: QuadConfig) -> SuiteResult:
    p = WeightParams(4.0)
    pairs = list(combinations(enumerate_signatures(3), 2))
    checks = []
    # One call per symbol keeps the per-block feature arrays small.
    for sym in oracle_symbols():
        cells = [(sym, a, b, p) for a, b in pairs]
        for (_, a, b, _), rep in zip(cells, cross_inner_mc_batch(cells, n, seed, q)):
            inputs = {"symbol": sym.name, "a": str(a), "b": str(b), "lambda": p.lam}
            checks.append(_mc_record("cross", inputs, rep))
    required = math.ceil(0.95 * len(checks))
    return SuiteResult("cross", f">= {required} of {len(checks)}", required, checks)


def transpose_cells():
    p = WeightParams(4.0)
    s = SignatureIndex
    return [
        (constant(1.0), s(1, 0, 0), s(1, 0, 0), p),
        (parse_symbol("r3^2", bound=1.0), s(1, 0, 1), s(1, 0, 1), p),
        (parse_symbol("r1^2 + r3^2", bound=2.0), s(1, 0, 0), s(1, 0, 1), p),
        (parse_symbol("r2^2", bound=1.0), s(2, 1, 0), s(2, 1, 1), p),
        (rational(), s(3, 0, 2), s(3, 0, 2), p),
        (parse_symbol("r1^2*r2", bound=1.0), s(2, 0, 1), s(1, 1, 0), p),
    ]


def suite_transpose(lam: float, n: int, seed: int, q: QuadConfig) -> SuiteResult:
    cells = transpose_cells()
    checks = []
    for (sym, f, g, p), rep in zip(cells, transpose_check_batch(cells, n, seed)):
        inputs = {"symbol": sym.name, "f": str(f), "g": str(g), "lambda": p.lam}
        checks.append(_mc_record("transpose", inputs, rep))
    return _all_of("transpose", checks)


def decomposition_cells():
    fs = (
        ("1", lambda r1, r2, r3: 1.0 + 0 * r1),
        ("r1^2", lambda r1, r2, r3: r1**2),
        ("b", b_poly),
    )
    return [(name, f, WeightParams(l)) for name, f in fs for l in (4.0, 5.0)]


def suite_decomposition(lam: float, n: int, seed: int, q: QuadConfig) -> SuiteResult:
    cells = decomposition_cells()
    reps = decomposition_check_batch([(f, p) for _, f, p in cells], n, seed, q)
    checks = []
    for (name, _, p), rep in zip(cells, reps):
        rec = _mc_record("decomposition", {"f": name, "lambda": p.lam}, rep, 0.0, slack=rep.quad_error)
        rec["mc_value"] = _cplx(rep.mc_value)
        rec["quad_value"] = _cplx(rep.quad_value)
        checks.append(rec)
        if name == "b" and p.lam == 4.0:
            # int det(I - Z Z*) dv_4 = c_4 / c_5.
            closed = c_lambda(4.0) / c_lambda(5.0)
            dev = abs(complex(rep.mc_value) - closed)
            thr = SIGMAS * rep.stderr
            checks.append(
                {
                    "name": "decomposition-closed",
                    "inputs": {"f": name, "lambda": p.lam},
                    "estimate": _cplx(rep.mc_value),
                    "target": _cplx(closed),
                    "stderr": rep.stderr,
                    "deviation": dev,
                    "threshold": thr,
                    "pass": bool(dev <= thr),
                }
            )
    return _all_of("decomposition", checks)


SUITES = {
    "normalization": suite_normalization,
    "schur": suite_schur,
    "rayleigh": suite_rayleigh,
    "cross": suite_cross,
    "transpose": suite_transpose,
    "decomposition": suite_decomposition,
}


def run_suite(name: str, lam: float, n: int, seed: int, q: QuadConfig | None = None) -> SuiteResult:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[name](lam, n, seed, q or QuadConfig())


def run_suites(name: str, lam: float, n: int, seed: int, q: QuadConfig | None = None) -> list[SuiteResult]:
    names = list(SUITES) if name == "all" else [name]
    return [run_suite(s, lam, n, seed, q) for s in names]


def report_json(results: list[SuiteResult], config: dict) -> str:
    doc = {
        "format": "bergman-spectra/verify",
        "version": 1,
        "config": config,
        "pass": all(r.passed for r in results),
        "suites": [r.to_dict() for r in results],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
