"""Command-line surface: verify suites, order reports, annihilation profiles.

Reports are JSON-first and deterministic: identical (seed, config) produce
byte-identical output.  Exit codes: 0 all checks passed, 1 at least one
exact check failed, 2 usage / parse / load / validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .modules import (
    AVModule,
    min_annihilating_order,
    module_from_dict,
    module_to_dict,
    oracle_order,
    zoo,
)
from .poly import PolyError, parse_derivation, parse_poly
from .suites import SUITE_NAMES, RunConfig, run_suite

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2


@dataclass
class ReportEnvelope:
    """Top-level machine-readable report: config echo, results, summary."""

    config: dict
    results: list = field(default_factory=list)
    tool: dict = field(default_factory=lambda: {"name": "smashmod", "version": __version__})

    def to_dict(self) -> dict:
        results = sorted(self.results, key=_result_key)
        failed = sum(1 for r in results if r.get("status") == "fail")
        return {
            "tool": self.tool,
            "config": self.config,
            "results": results,
            "summary": {
                "total": len(results),
                "passed": len(results) - failed,
                "failed": failed,
            },
            "exit_status": EXIT_FAILURES if failed else EXIT_OK,
        }


def _result_key(r: dict) -> str:
    return json.dumps(r, sort_keys=True)


def render_json(envelope: dict) -> str:
    return json.dumps(envelope, sort_keys=True, indent=2) + "\n"


def render_text(envelope: dict) -> str:
    """Human-readable rendering derived from the JSON structure."""
    lines = [f"smashmod {envelope['tool']['version']}"]
    cfg = envelope["config"]
    lines.append("config: " + json.dumps(cfg, sort_keys=True))
    for r in envelope["results"]:
        status = r.get("status", "?")
        label = r.get("identity", r.get("kind", "result"))
        detail = {k: v for k, v in r.items() if k not in ("identity", "status", "witness", "kind")}
        lines.append(f"[{status.upper():4}] {label} {json.dumps(detail, sort_keys=True)}")
        if r.get("witness"):
            lines.append(f"        witness: {json.dumps(r['witness'], sort_keys=True)}")
    s = envelope["summary"]
    lines.append(f"summary: {s['passed']}/{s['total']} passed, {s['failed']} failed")
    return "\n".join(lines) + "\n"


def _emit(envelope: ReportEnvelope, args) -> int:
    data = envelope.to_dict()
    text = render_json(data) if args.format == "json" else render_text(data)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return data["exit_status"]


# ---------------------------------------------------------------------------------
# module loading
# ---------------------------------------------------------------------------------

def load_module_spec(path: str) -> AVModule:
    """Load, parse and validate a module-definition JSON file."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise PolyError(f"cannot read module file {path!r}: {e}") from e
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise PolyError(f"module file {path!r} is not valid JSON: {e}") from e
    return module_from_dict(data)


def save_module_spec(module: AVModule, path: str) -> None:
    Path(path).write_text(render_json(module_to_dict(module)), encoding="utf-8")


def _resolve_module(args) -> AVModule:
    spec = args.module
    if spec.startswith("zoo:"):
        params = {}
        for key in ("dim", "rank", "n", "lam"):
            value = getattr(args, key, None)
            if value is not None:
                params[key] = value
        return zoo(spec[4:], **params)
    return load_module_spec(spec)


# ---------------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------------

def cmd_verify(args) -> int:
    config = RunConfig(
        dims=tuple(int(d) for d in str(args.dims).split(",") if d != ""),
        max_degree=args.degree,
        trials=args.trials,
        seed=args.seed,
        p_max=args.pmax,
    )
    config.check()
    suites = [s for s in str(args.suite).split(",") if s]
    if not suites:
        raise ValueError("no suite selected")
    for s in suites:
        if s not in SUITE_NAMES:
            raise ValueError(f"unknown suite {s!r} (known: {', '.join(SUITE_NAMES)})")
    envelope = ReportEnvelope(config={"command": "verify", "suites": suites,
                                      **config.to_dict()})
    for s in suites:
        for report in run_suite(s, config):
            record = report.to_dict()
            record["suite"] = s
            envelope.results.append(record)
    return _emit(envelope, args)


def cmd_order(args) -> int:
    module = _resolve_module(args)
    lie = module.lie_map_order()
    n_max = args.nmax if args.nmax is not None else module.rank ** 2
    oracle = oracle_order(module, n_max)
    bound = module.rank ** 2
    ok = lie == oracle and lie <= bound
    record = {
        "kind": "order",
        "identity": "order-bound",
        "module": module.name or args.module,
        "dim": module.dim,
        "rank": module.rank,
        "lie_map_order": lie,
        "oracle_order": oracle,
        "rank_squared_bound": bound,
        "status": "pass" if ok else "fail",
    }
    envelope = ReportEnvelope(config={"command": "order", "module": args.module,
                                      "n_max": n_max})
    envelope.results.append(record)
    return _emit(envelope, args)


def cmd_annihilator(args) -> int:
    module = _resolve_module(args)
    f = parse_poly(args.f, module.dim)
    eta = parse_derivation(args.eta, module.dim)
    order = min_annihilating_order(module, f, eta)
    record = {
        "kind": "annihilator",
        "identity": "annihilation-profile",
        "module": module.name or args.module,
        "f": str(f),
        "eta": str(eta),
        "min_annihilating_order": order,
        "levels_checked_exactly": module.order,
        "automatic_above": module.order,
        "status": "pass",
    }
    if f.is_constant():
        record["note"] = "constant f: every level >= 1 vanishes identically"
    envelope = ReportEnvelope(config={"command": "annihilator", "module": args.module,
                                      "f": args.f, "eta": args.eta})
    envelope.results.append(record)
    return _emit(envelope, args)


# ---------------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------------

def _add_output_flags(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("json", "text"), default="json",
                   help="report format (default json)")
    p.add_argument("--out", default=None, help="write the report to this path")


def _add_module_flags(p: argparse.ArgumentParser):
    p.add_argument("--module", required=True,
                   help="zoo:<name> (dmodule, forms, adjoint, jets, twist) or a JSON file path")
    p.add_argument("--dim", type=int, default=None, help="zoo parameter: dimension")
    p.add_argument("--rank", type=int, default=None, help="zoo parameter: rank (dmodule)")
    p.add_argument("--n", type=int, default=None, help="zoo parameter: jet order")
    p.add_argument("--lam", type=str, default=None, help="zoo parameter: twist weight (rational)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smashmod",
        description="Exact verification kernel for modules over polynomial vector fields.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run exact identity suites")
    v.add_argument("--suite", default="all",
                   help="comma-separated suite names (default all); see docs for the list")
    v.add_argument("--dims", default="1,2,3", help="comma-separated dimensions")
    v.add_argument("--degree", type=int, default=4, help="max degree of sampled polynomials")
    v.add_argument("--trials", type=int, default=100, help="seeded samples per dimension")
    v.add_argument("--seed", type=int, default=2026, help="PRNG seed (echoed in reports)")
    v.add_argument("--pmax", type=int, default=4, help="exhaustive level range 1..pmax")
    _add_output_flags(v)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("order", help="Lie-map order, oracle order and the rank^2 bound")
    _add_module_flags(o)
    o.add_argument("--nmax", type=int, default=None,
                   help="oracle search bound (default rank^2)")
    _add_output_flags(o)
    o.set_defaults(func=cmd_order)

    a = sub.add_parser("annihilator", help="minimal uniformly annihilating level for (f, eta)")
    _add_module_flags(a)
    a.add_argument("--f", required=True, help="polynomial, e.g. 'x1^2 - x2'")
    a.add_argument("--eta", required=True, help="vector field, e.g. 'x1*d1 + d2'")
    _add_output_flags(a)
    a.set_defaults(func=cmd_annihilator)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PolyError, ValueError, ZeroDivisionError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
