"""Command line front end: ``fricke3 {expand,basis,zeros,verify,contour-check}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import mpmath

from . import __version__, arc, basis, bounds, contour, forms

ENV_CACHE = "FRICKE3_CACHE_DIR"
ENV_PRECISION = "FRICKE3_PRECISION"


@dataclass(frozen=True)
class RunConfig:
    precision_bits: int = 768
    trunc_margin: int = basis.DEFAULT_MARGIN
    grid_points: int | None = None  # None: the subcommand's own default
    cache_dir: Path | None = None
    output_format: str = "json"
    jobs: int = 1

    def __post_init__(self):
        if self.precision_bits < 128:
            raise ValueError(f"precision must be at least 128 bits, got {self.precision_bits}")
        if self.grid_points is not None and self.grid_points < 16:
            raise ValueError(f"grid must have at least 16 points, got {self.grid_points}")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"unknown output format {self.output_format!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")
        if self.trunc_margin < 0:
            raise ValueError("trunc margin must be non-negative")

    @classmethod
    def from_args(cls, args, environ=None) -> "RunConfig":
        env = os.environ if environ is None else environ
        bits = args.bits
        if bits is None:
            bits = int(env[ENV_PRECISION]) if env.get(ENV_PRECISION) else 768
        cache = args.cache_dir or env.get(ENV_CACHE) or None
        return cls(
            precision_bits=bits,
            trunc_margin=args.trunc_margin,
            grid_points=args.grid,
            cache_dir=Path(cache) if cache else None,
            output_format=args.format,
            jobs=args.jobs,
        )

    def cache(self) -> basis.BasisCache:
        return basis.BasisCache(self.cache_dir)


# -- output ---------------------------------------------------------------


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _series_rows(series) -> list[list]:
    return [["n", "coefficient"]] + [[n, str(c)] for n, c in series.items()]


# -- subcommands ----------------------------------------------------------


def cmd_expand(args, cfg: RunConfig) -> int:
    f = forms.named_form(args.form, args.order, k=args.k, r=args.r)
    s = f.series
    if cfg.output_format == "csv":
        _emit(_csv(_series_rows(s)), args.out)
    else:
        _emit(_json({"form": f.label, "weight": f.weight, "exponent_offset": str(f.exponent_offset), **s.to_json()}), args.out)
    return 0


def cmd_basis(args, cfg: RunConfig) -> int:
    order = args.order if args.order is not None else basis.default_order(args.k, args.m, cfg.trunc_margin)
    b = basis.build(args.k, args.m, order, cache=cfg.cache())
    if cfg.output_format == "csv":
        rows = [["kind", "index", "value"]]
        rows += [["poly", i, str(c)] for i, c in enumerate(b.poly)]
        rows += [["series", n, str(c)] for n, c in b.series.items()]
        _emit(_csv(rows), args.out)
    else:
        d = b.decomp
        doc = {"ell": d.ell, "r": d.r, "eps": d.eps, "degree": b.degree, **b.to_json()}
        _emit(_json(doc), args.out)
    return 0


def cmd_zeros(args, cfg: RunConfig) -> int:
    grid = cfg.grid_points or arc.DEFAULT_GRID
    b = arc.prepare(args.k, args.m, cfg.precision_bits, cfg.cache())
    rep = arc.scan_zeros(b, grid, cfg.precision_bits, jobs=cfg.jobs, keep_samples=False)
    audit = arc.valence_audit(b, rep)
    if cfg.output_format == "csv":
        rows = [["index", "theta", "in_tail"]] + [[i, mpmath.nstr(z.theta, 20), int(z.in_tail)] for i, z in enumerate(rep.zeros)]
        _emit(_csv(rows), args.out)
    else:
        doc = rep.to_json()
        doc["valence_audit"] = str(audit)
        _emit(_json(doc), args.out)
    return 0 if rep.passed and audit == 0 else 1


def cmd_verify(args, cfg: RunConfig) -> int:
    grid = cfg.grid_points or bounds.DEFAULT_GRID
    reports = bounds.run_suite(args.suite, grid, cfg.precision_bits)
    if cfg.output_format == "csv":
        cols = ["name", "kind", "paper_value", "computed", "margin", "direct", "agrees_5sig", "status"]
        rows = [cols] + [[r.to_json()[c] for c in cols] for r in reports]
        _emit(_csv(rows), args.out)
    else:
        _emit(_json({"suite": args.suite, "all_pass": all(r.status == "pass" for r in reports),
                     "reports": [r.to_json() for r in reports]}), args.out)
    return 0 if all(r.status == "pass" for r in reports) else 1


def real_number(text: str) -> str:
    # kept as a string so the value is read at working precision
    float(text)
    return text


def cmd_contour(args, cfg: RunConfig) -> int:
    ccfg = contour.ContourConfig.for_regime(args.regime, quadrature_points=args.nodes,
                                            precision_bits=cfg.precision_bits, jobs=cfg.jobs)
    res = contour.identity_check(args.theta, args.k, args.m, args.regime, ccfg, cache=cfg.cache())
    doc = res.to_json()
    if cfg.output_format == "csv":
        flat = [["lhs", doc["lhs"]], ["rhs_re", doc["rhs"]["re"]], ["rhs_im", doc["rhs"]["im"]], ["residual", doc["residual"]]]
        for key in ("integral", "residues"):
            flat += [[f"{key}_re", doc["parts"][key]["re"]], [f"{key}_im", doc["parts"][key]["im"]]]
        flat += [["B", doc["parts"]["B"]], ["C", doc["parts"]["C"]]]
        _emit(_csv([["field", "value"]] + flat), args.out)
    else:
        _emit(_json(doc), args.out)
    return 0 if res.residual < 1e-10 else 1


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--bits", type=int, help=f"working precision (default 768 or ${ENV_PRECISION})")
    common.add_argument("--grid", type=int, help="grid points for scans")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--cache-dir", help=f"basis cache directory (default ${ENV_CACHE} or the user cache)")
    common.add_argument("--trunc-margin", type=int, default=basis.DEFAULT_MARGIN)

    p = argparse.ArgumentParser(prog="fricke3", description="Weakly holomorphic modular forms for the Fricke group of level 3.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("expand", parents=[common], help="exact q-expansion of a named form")
    e.add_argument("--form", required=True, help="j3plus, delta3plus, delta3r, eisenstein, eisenstein_plus")
    e.add_argument("--order", type=int, required=True)
    e.add_argument("--k", type=int)
    e.add_argument("--r", type=int)
    e.set_defaults(func=cmd_expand)

    b = sub.add_parser("basis", parents=[common], help="canonical basis element f_{k,m}")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--order", type=int)
    b.set_defaults(func=cmd_basis)

    z = sub.add_parser("zeros", parents=[common], help="zeros of f_{k,m} on the arc")
    z.add_argument("--k", type=int, required=True)
    z.add_argument("--m", type=int, required=True)
    z.set_defaults(func=cmd_zeros)

    v = sub.add_parser("verify", parents=[common], help="recompute the bound constants")
    v.add_argument("--suite", choices=bounds.SUITES, required=True)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("contour-check", parents=[common], help="contour integral identity at one arc point")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--theta", type=real_number, required=True)
    c.add_argument("--regime", choices=("low", "high"), required=True)
    c.add_argument("--nodes", type=int, default=contour.DEFAULT_NODES)
    c.set_defaults(func=cmd_contour)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"fricke3: error: {exc}", file=sys.stderr)
        return 2
    try:
        with mpmath.workprec(cfg.precision_bits):
            return args.func(args, cfg)
    except (ArithmeticError, ValueError, OSError) as exc:
        print(f"fricke3: {args.command} failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
