"""Command-line front end.

    bergman-spectra spectrum --lambda 5 --max-degree 4 --symbol "r1^2 + r3^2"
    bergman-spectra verify all --seed 7 --output report.json
    bergman-spectra reduce 0.4 0 0.2 0 0 0 0.5 0

Exit codes: 0 success, 1 failed verification, 2 invalid configuration or
input, 3 numerical abort (a JSON error record goes to stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .isotypic import DEGREE_CAP
from .measure import SCHEMES, NumericalError, QuadConfig, WeightParams
from .orbits import act, canonical_matrix, reduce
from .spectrum import spectrum
from .suites import SUITES, report_json, run_suites
from .symbols import SymbolSyntaxError, symbol_from_string

MIN_VERIFY_SAMPLES = 10_000


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    lam: float = 5.0
    max_degree: int = 4
    symbol_expr: str = "1"
    quad: QuadConfig = field(default_factory=QuadConfig)
    mc_samples: int = 1_000_000
    seed: int = 0
    output_format: str = "csv"
    output_path: str = "-"
    convention: str = "exact"
    allow_unbounded_weight: bool = False

    def validate(self, verify: bool = False) -> "RunConfig":
        if not (isinstance(self.lam, (int, float)) and math.isfinite(self.lam) and self.lam > 3):
            raise ConfigError(f"--lambda must satisfy lambda > 3 (got {self.lam!r})")
        if not 0 <= self.max_degree <= DEGREE_CAP:
            raise ConfigError(f"--max-degree must lie in [0, {DEGREE_CAP}] (got {self.max_degree})")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"--seed must be a 64-bit unsigned integer (got {self.seed})")
        if self.mc_samples < 1 or (verify and self.mc_samples < MIN_VERIFY_SAMPLES):
            raise ConfigError(f"--mc-samples must be >= {MIN_VERIFY_SAMPLES} for verify (got {self.mc_samples})")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"--format must be csv or json (got {self.output_format!r})")
        if self.convention not in ("exact", "alternate"):
            raise ConfigError(f"--convention must be exact or alternate (got {self.convention!r})")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            if "quad" in d:
                d["quad"] = QuadConfig(**d["quad"])
            return cls(**d)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config: {exc}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    # Defaults are None so that --config values survive unless overridden.
    p.add_argument("--config", metavar="PATH", help="load a RunConfig JSON document")
    p.add_argument("--dump-config", metavar="PATH", help="write the resolved config as JSON and exit")
    p.add_argument("--lambda", dest="lam", type=float, help="weight parameter, lambda > 3")
    p.add_argument("--max-degree", type=int, help=f"largest |nu| (at most {DEGREE_CAP})")
    p.add_argument("--symbol", dest="symbol_expr", help="symbol expression in r1, r2, r3, b")
    p.add_argument("--quad-nodes", type=int, help="Gauss nodes per axis of the coarse rule")
    p.add_argument("--quad-scheme", choices=SCHEMES, help="fixed tensor rule or adaptive doubling")
    p.add_argument("--mc-samples", type=int, help="Monte Carlo samples per oracle")
    p.add_argument("--seed", type=int, help="64-bit seed for all Monte Carlo streams")
    p.add_argument("--output", dest="output_path", help="output file ('-' for stdout)")
    p.add_argument("--format", dest="output_format", choices=("csv", "json"))
    p.add_argument("--convention", choices=("exact", "alternate"), help="coefficient convention for spectrum")
    p.add_argument("--allow-unbounded-weight", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bergman-spectra", description="Toeplitz spectra on the 2x2 Cartan domain")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="eigenvalue table for one symbol")
    _add_common(sp)

    vp = sub.add_parser("verify", help="run Monte Carlo and quadrature checks")
    vp.add_argument("suite", choices=sorted(SUITES) + ["all"])
    _add_common(vp)

    rp = sub.add_parser("reduce", help="canonical form of a 2x2 complex matrix")
    rp.add_argument("entries", nargs="*", help="re/im pairs of z11 z12 z21 z22")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = RunConfig.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    else:
        cfg = RunConfig()
    updates = {}
    for name in ("lam", "max_degree", "symbol_expr", "mc_samples", "seed", "output_path", "output_format",
                 "convention", "allow_unbounded_weight"):
        v = getattr(args, name, None)
        if v is not None:
            updates[name] = v
    quad = {}
    if not args.config and "max_degree" in updates:
        # Follow the degree-dependent default unless a config file fixed the rule.
        quad["nodes_per_axis"] = QuadConfig.for_degree(updates["max_degree"]).nodes_per_axis
    if args.quad_nodes is not None:
        quad["nodes_per_axis"] = args.quad_nodes
    if args.quad_scheme is not None:
        quad["scheme"] = args.quad_scheme
    try:
        if quad:
            updates["quad"] = QuadConfig(**{**asdict(cfg.quad), **quad})
        return RunConfig(**{**{f.name: getattr(cfg, f.name) for f in fields(cfg)}, **updates})
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _error_record(kind: str, message: str, **extra) -> None:
    print(json.dumps({"error": kind, "message": message, **extra}, sort_keys=True), file=sys.stderr)


def cmd_spectrum(cfg: RunConfig) -> int:
    try:
        symbol = symbol_from_string(cfg.symbol_expr)
    except (SymbolSyntaxError, ValueError) as exc:
        raise ConfigError(f"--symbol: {exc}") from None
    table = spectrum(symbol, WeightParams(cfg.lam), cfg.max_degree, cfg.quad, cfg.convention)
    _write(table.to_csv() if cfg.output_format == "csv" else table.to_json(), cfg.output_path)
    return 0


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    results = run_suites(suite, cfg.lam, cfg.mc_samples, cfg.seed, cfg.quad)
    config = {"suite": suite, "lambda": cfg.lam, "mc_samples": cfg.mc_samples, "seed": cfg.seed,
              "quad": asdict(cfg.quad)}
    _write(report_json(results, config), cfg.output_path)
    failed = [r for r in results if not r.passed]
    for r in failed:
        print(f"FAIL {r.name}: {r.passed_count}/{len(r.checks)} passed, need {r.rule}", file=sys.stderr)
        for c in r.failures():
            print(f"  {c['name']} {json.dumps(c['inputs'], sort_keys=True)} deviation={c['deviation']:.3e} "
                  f"threshold={c['threshold']:.3e}", file=sys.stderr)
    return 1 if failed else 0


def parse_matrix(entries: list[str]) -> np.ndarray:
    if len(entries) != 8:
        raise ConfigError(f"reduce needs 8 reals (re/im of z11 z12 z21 z22), got {len(entries)}")
    try:
        vals = [float(e) for e in entries]
    except ValueError as exc:
        raise ConfigError(f"reduce: {exc}") from None
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError("reduce: entries must be finite")
    z = [complex(vals[2 * i], vals[2 * i + 1]) for i in range(4)]
    return np.array([[z[0], z[1]], [z[2], z[3]]])


def cmd_reduce(entries: list[str]) -> int:
    Z = parse_matrix(entries)
    g, r = reduce(Z)
    residual = float(np.max(np.abs(act(g, Z) - canonical_matrix(r))))

    def cm(M):
        return [[[complex(x).real, complex(x).imag] for x in row] for row in np.asarray(M)]

    doc = {
        "r": [float(x) for x in r],
        "A": cm(g.A),
        "t": [complex(g.t).real, complex(g.t).imag],
        "residual": residual,
    }
    print(json.dumps(doc, indent=2))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "reduce":
            return cmd_reduce(args.entries)
        cfg = resolve_config(args).validate(verify=args.command == "verify")
        if args.dump_config:
            with open(args.dump_config, "w") as fh:
                json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
            return 0
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        return cmd_verify(cfg, args.suite)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        _error_record("numerical", str(exc))
        return 3


if __name__ == "__main__":
    sys.exit(main())
