"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 reference
mismatch in ``reproduce``.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import io
from .measures import bipartite_bounds, gme_bounds
from .operators import Bipartition, DecompositionError, HermitianOperator, osd
from .optimizer import (
    Schedule,
    optimize_bipartite,
    optimize_multipartite,
    random_start,
)
from .reproduce import MULTIPARTITE_CONFIG, SUITES, UPB_CONFIG, run_suite
from .states import make_state, maximally_mixed
from .witnesses import fidelity_witness

log = logging.getLogger("oswit")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_MISMATCH = 0, 1, 2, 3
SEED_ENV = "OSWIT_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _library_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int | None
    library_version: str = field(default_factory=_library_version)
    wall_time: float = 0.0
    outputs: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _load_state(args) -> tuple[HermitianOperator, np.ndarray | None, str]:
    if getattr(args, "matrix", None):
        op = io.load_matrix(args.matrix)
        return op, None, Path(args.matrix).stem
    if not args.state:
        raise UsageError("give --state NAME or --matrix FILE")
    try:
        st = make_state(args.state)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return st.rho, st.vector, st.name


def _bipartition(text, dims) -> Bipartition | None:
    if text is None:
        return None
    try:
        return Bipartition.parse(text, dims)
    except ValueError as exc:
        raise UsageError(f"bad bipartition {text!r}: {exc}") from None


def _resolve_seed(cli_seed, config_seed):
    if cli_seed is not None:
        return cli_seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env, 0)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    return config_seed


def cmd_decompose(args, manifest: RunManifest) -> dict:
    rho, _, name = _load_state(args)
    bp = _bipartition(args.bipartition, rho.dims)
    dec = osd(rho, bp, perturb=args.perturb, seed=manifest.seed if manifest.seed is not None else 0x5EED)
    out = {
        "state": name,
        "dims": list(rho.dims),
        "bipartition": str(dec.bipartition),
        "mu": dec.mu.tolist(),
        "mu1": dec.mu1,
        "effective_rank": dec.effective_rank(),
        "ccnr_sum": float(np.sum(dec.mu)),
    }
    out["ccnr_detects"] = out["ccnr_sum"] > 1 + 1e-9
    return out


def _start_operator(kind: str, rho, vector, seed: int) -> HermitianOperator:
    if kind == "fidelity":
        if vector is None:
            raise UsageError("--start fidelity needs a pure state")
        return fidelity_witness(vector, rho.dims).observable
    if kind == "state":
        return rho
    if kind == "random":
        return random_start(rho.dims, seed)
    return io.load_matrix(kind)


def cmd_optimize(args, manifest: RunManifest) -> dict:
    rho, vector, name = _load_state(args)
    multipartite = rho.n_parties >= 3
    base = MULTIPARTITE_CONFIG if multipartite else UPB_CONFIG
    if args.config:
        base = io.load_config(args.config)
    changes = {}
    for flag, key in (("schedule", "schedule"), ("max_iters", "max_iters"),
                      ("phase_one_iters", "phase_one_iters"), ("step_size", "step_size"),
                      ("perturbation", "perturbation_eps"), ("tie_tolerance", "tie_tolerance")):
        if getattr(args, flag) is not None:
            changes[key] = getattr(args, flag)
    if not multipartite and "schedule" not in changes and not args.config:
        changes["schedule"] = Schedule.ALTERNATING
    changes["seed"] = _resolve_seed(args.seed, base.seed)
    try:
        cfg = replace(base, **changes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    manifest.seed = cfg.seed
    manifest.parameters["config"] = cfg.to_dict()

    noise = maximally_mixed(rho.dims) if args.noise == "white" else io.load_matrix(args.noise)
    start = args.start or ("fidelity" if vector is not None else "random")
    x0 = _start_operator(start, rho, vector, cfg.seed)
    if multipartite:
        trace = optimize_multipartite(x0, rho, noise, cfg)
    else:
        trace = optimize_bipartite(x0, rho, noise, cfg, _bipartition(args.bipartition, rho.dims))

    initial = float(trace.initial_p)
    final = float(trace.final_visibility)
    out = {
        "state": name,
        "start": start,
        "initial_p": initial if math.isfinite(initial) else "not_detecting",
        "final_p": final if math.isfinite(final) else "not_detecting",
        "improved": final < initial - 1e-9,
        "iterations": len(trace.iterations) - 1,
        "converged": trace.converged,
        "offset": trace.final_witness.offset,
        "critical_bipartition": str(trace.final_witness.bipartition),
    }
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        trace.to_csv(outdir / "trace.csv")
        io.save_witness(trace.final_witness, outdir / "witness.json")
        manifest.outputs += [str(outdir / "trace.csv"), str(outdir / "witness.json")]
    return out


def cmd_bounds(args, manifest: RunManifest) -> dict:
    rho, _, name = _load_state(args)
    x = io.load_matrix(args.observable) if args.observable else rho
    if x.dims != rho.dims:
        raise UsageError(f"observable dims {x.dims} differ from state dims {rho.dims}")
    if rho.n_parties >= 3 and not args.bipartition:
        report = gme_bounds(rho, x, largest_party=args.largest_party)
    else:
        report = bipartite_bounds(rho, x, _bipartition(args.bipartition, rho.dims))
    return {"state": name, **report.to_dict()}


def cmd_reproduce(args, manifest: RunManifest) -> dict:
    rows = run_suite(args.suite)
    if not args.json:
        for row in rows:
            print(row.line())
    return {"suite": args.suite, "rows": [r.to_dict() for r in rows],
            "passed": all(r.passed for r in rows)}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oswit", description="Operator Schmidt decomposition witnesses.")
    parser.add_argument("--json", action="store_true", help="machine-readable output only")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def state_args(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--state", help="catalog name, e.g. w3, upb, psi3:eps=0.1")
        g.add_argument("--matrix", help="matrix JSON file")
        p.add_argument("--bipartition", help='e.g. "0|12" or "0,1|2,3"')
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    p = sub.add_parser("decompose", help="operator Schmidt coefficients and CCNR sum")
    state_args(p)
    p.add_argument("--perturb", type=float, default=0.0)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("optimize", help="gradient optimization of a witness")
    state_args(p)
    p.add_argument("--noise", default="white", help='"white" or a matrix JSON file')
    p.add_argument("--schedule", choices=[s.value for s in Schedule])
    p.add_argument("--start", help='"fidelity", "random", "state" or a matrix JSON file')
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="optimizer config JSON")
    p.add_argument("--max-iters", type=int)
    p.add_argument("--phase-one-iters", type=int)
    p.add_argument("--step-size", type=float)
    p.add_argument("--perturbation", type=float)
    p.add_argument("--tie-tolerance", type=float)
    p.add_argument("--out", help="directory for trace.csv, witness.json and manifest.json")

    p = sub.add_parser("reproduce", help="run a reference suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)

    p = sub.add_parser("bounds", help="lower bounds on entanglement measures")
    state_args(p)
    p.add_argument("--observable", help="matrix JSON file; defaults to the state itself")
    p.add_argument("--largest-party", action="store_true",
                   help="GME dimension from the largest single party")
    return parser


COMMANDS = {
    "decompose": cmd_decompose,
    "optimize": cmd_optimize,
    "reproduce": cmd_reproduce,
    "bounds": cmd_bounds,
}


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.10g}"
    if isinstance(value, list) and value and all(isinstance(v, float) for v in value):
        shown = ", ".join(f"{v:.6g}" for v in value[:12])
        return f"[{shown}{', ...' if len(value) > 12 else ''}]"
    return value


def _print_human(result: dict) -> None:
    for key, value in result.items():
        if key in ("rows", "manifest"):
            continue
        print(f"{key}: {_fmt(value)}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    params = {k: v for k, v in vars(args).items() if k not in ("json", "verbose", "command")}
    manifest = RunManifest(args.command, params, getattr(args, "seed", None))
    t0 = time.perf_counter()
    try:
        if manifest.seed is None and args.command == "decompose":
            manifest.seed = _resolve_seed(None, None)
        result = COMMANDS[args.command](args, manifest)
    except UsageError as exc:
        print(f"oswit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DecompositionError, np.linalg.LinAlgError, ZeroDivisionError, FloatingPointError) as exc:
        print(f"oswit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"oswit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"oswit: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    manifest.wall_time = round(time.perf_counter() - t0, 3)
    if getattr(args, "out", None):
        path = Path(args.out) / "manifest.json"
        manifest.outputs.append(str(path))
        path.write_text(json.dumps(manifest.to_dict(), indent=1, default=_json_default) + "\n")
    result["manifest"] = manifest.to_dict()
    if args.json:
        print(json.dumps(result, default=_json_default))
    elif args.command != "reproduce":
        _print_human(result)
    else:
        print("ALL PASS" if result["passed"] else "MISMATCH")
    if args.command == "reproduce" and not result["passed"]:
        return EXIT_MISMATCH
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
