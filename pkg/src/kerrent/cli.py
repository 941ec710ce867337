"""Command-line entry point: ``kerrent run|verify|sweep|target|witness``.

Exit codes: 0 success, 2 configuration error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .errors import KerrentError
from .io import confusion_to_csv, dumps, result_to_dict, sweep_to_csv, sweep_to_json, write_result
from .protocol import ProtocolConfig, RunResult, parse_complex, run_protocol, sweep
from .states import FockState
from .verify import run_verification
from .witness import TargetState, all_pairs, build_target, chain_pairs, witness

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY = 0, 2, 3
DISPLAY_MARGIN_TOL = 1e-10


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with ProtocolConfig fields")
    p.add_argument("--modes", type=int)
    p.add_argument("--beta", help="signal amplitude, e.g. 0.5 or 0.3+0.1j")
    p.add_argument("--alpha", help="probe amplitude")
    p.add_argument("--tau", help="coupling; a comma list sets one value per mode")
    model = p.add_mutually_exclusive_group()
    model.add_argument("--weak", dest="beta_model", action="store_const", const="weak")
    model.add_argument("--poisson", dest="beta_model", action="store_const", const="poisson")
    p.add_argument("--readout", choices=["ideal", "gaussian"])
    p.add_argument("--lo-phase", type=float)
    p.add_argument("--k-max", type=int)
    p.add_argument("--signal-cutoff", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--shots", type=int)
    p.add_argument("--allow-overlap", action="store_true", default=None)
    p.add_argument("--all-pairs", action="store_true", default=None)


def _add_output_flags(p: argparse.ArgumentParser, default_format: str = "json") -> None:
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=["json", "csv"], default=default_format)


def config_from_args(args: argparse.Namespace) -> ProtocolConfig:
    data: dict[str, Any] = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise argparse.ArgumentTypeError(f"cannot read config: {exc}") from exc
    overrides = {
        "modes": args.modes,
        "beta": args.beta,
        "alpha": args.alpha,
        "beta_model": args.beta_model,
        "readout": args.readout,
        "lo_phase": args.lo_phase,
        "k_max": args.k_max,
        "signal_cutoff": args.signal_cutoff,
        "seed": args.seed,
        "shots": args.shots,
        "allow_overlap": args.allow_overlap,
        "all_pairs": args.all_pairs,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "tau", None) is not None:
        parts = [float(t) for t in args.tau.split(",")]
        if len(parts) == 1:
            data["tau"], data["taus"] = parts[0], None
        else:
            data["tau"], data["taus"] = parts[0], parts
    cfg = ProtocolConfig.from_dict(data)
    cfg.validate()
    return cfg


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _run_csv(result: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "probability", "analytic", "rel_error", "fidelity", "witness_margin_min", "witness_pass"])
    for rec, chk, wit in zip(result.outcomes, result.checks, result.witness):
        w.writerow([rec.k, repr(rec.probability), repr(chk.analytic), repr(chk.rel_error),
                    repr(wit.fidelity), repr(wit.min_margin), wit.all_passed])
    w.writerow(["tail", repr(result.tail_probability), "", "", "", "", ""])
    return buf.getvalue()


def cmd_run(args: argparse.Namespace) -> int:
    result = run_protocol(config_from_args(args))
    if args.format == "csv":
        _emit(_run_csv(result), args.out)
    elif args.out is not None:
        write_result(result, args.out)
    else:
        _emit(dumps(result_to_dict(result)), None)
    if args.confusion is not None and result.confusion is not None:
        args.confusion.write_text(confusion_to_csv(result.confusion))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    only: list[str] = []
    if args.oracle:
        only.append("oracle")
    if args.overlap_grid:
        only.append("overlap_grid")
    if args.all:
        only = []
    alphas = [float(a) for a in args.alpha.split(",")] if args.alpha else None
    report = run_verification(only or None, oracle_alphas=alphas)
    _emit(report.to_json(), args.out)
    return EXIT_OK if report.passed else EXIT_VERIFY


def parse_axis(text: str) -> list[str]:
    """``start:stop:step`` (stop inclusive) or a comma list."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        n = int(round((stop - start) / step)) + 1
        return [repr(round(start + i * step, 12)) for i in range(n)]
    return [x.strip() for x in text.split(",") if x.strip()]


def cmd_sweep(args: argparse.Namespace) -> int:
    template = config_from_args(args)
    grid: dict[str, list] = {}
    if args.beta_grid:
        grid["beta"] = [parse_complex(b) for b in parse_axis(args.beta_grid)]
    if args.tau_grid:
        grid["tau"] = [float(t) for t in parse_axis(args.tau_grid)]
    if args.alpha_grid:
        grid["alpha"] = [parse_complex(a) for a in parse_axis(args.alpha_grid)]
    if args.modes_grid:
        grid["modes"] = [int(float(m)) for m in parse_axis(args.modes_grid)]
    if args.k_grid:
        grid["k"] = [int(float(k)) for k in parse_axis(args.k_grid)]
    rows = sweep(template, grid, jobs=args.jobs)
    _emit(sweep_to_csv(rows) if args.format == "csv" else sweep_to_json(rows), args.out)
    return EXIT_OK


def cmd_target(args: argparse.Namespace) -> int:
    state = build_target(TargetState(args.family, args.photons, args.modes))
    _emit(state.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_witness(args: argparse.Namespace) -> int:
    state = FockState.from_json(args.state.read_text())
    pairs = all_pairs(state.modes) if args.all_pairs else chain_pairs(state.modes)
    target = TargetState.parse(args.target) if args.target else None
    report = witness(state, pairs, target)
    _emit(dumps(report.to_dict(margin_tol=args.margin_tol)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kerrent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the generation protocol once")
    _add_config_flags(p)
    _add_output_flags(p)
    p.add_argument("--confusion", type=Path, help="write the Gaussian confusion matrix CSV here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="run the self-check suite")
    p.add_argument("--all", action="store_true", help="every check (default when no selector given)")
    p.add_argument("--oracle", action="store_true", help="dense-oracle equivalence only")
    p.add_argument("--overlap-grid", action="store_true", help="small-angle overlap scan only")
    p.add_argument("--alpha", help="comma list of probe amplitudes for --oracle")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="tabulate the protocol over a parameter grid")
    _add_config_flags(p)
    _add_output_flags(p, default_format="csv")
    for axis in ("beta", "tau", "alpha", "modes", "k"):
        p.add_argument(f"--{axis}-grid", help="start:stop:step or comma list")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("target", help="emit a named target state as JSON")
    p.add_argument("--family", choices=["kphoton", "w", "noon"], default="kphoton")
    p.add_argument("--photons", "-k", type=int, required=True)
    p.add_argument("--modes", type=int, required=True)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_target)

    p = sub.add_parser("witness", help="evaluate the pairwise witness on a state file")
    p.add_argument("state", type=Path)
    p.add_argument("--all-pairs", action="store_true")
    p.add_argument("--target", help="target name, e.g. 3-mode-k3, w3-k1, noon2-k2")
    p.add_argument("--margin-tol", type=float, default=DISPLAY_MARGIN_TOL,
                   help="margin threshold for the pass_tol field (strict 'pass' is unaffected)")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_witness)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (KerrentError, argparse.ArgumentTypeError, ValueError, KeyError, OSError) as exc:
        print(f"kerrent: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
