"""Command-line front end; every number in a report comes from a library call.

Exit codes: 0 success, 2 invalid arguments, 3 infeasible user-supplied
efficiencies.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, pcm, task1, task2

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

MACHINES = ("paper1", "paper2", "optimized-p2", "optimized-flag")

log = logging.getLogger("qclone")


class InfeasibleMachine(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    samples: int = 10**4
    fmt: str = "json"
    out: str | None = None


def _fmt_float(x: float) -> str:
    return format(x, ".17g")


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _to_json(doc: dict) -> str:
    """JSON with every float written to 17 significant digits."""
    floats: list[float] = []

    def mark(o):
        if isinstance(o, dict):
            return {k: mark(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [mark(v) for v in o]
        if isinstance(o, float):
            floats.append(o)
            return f"\x00{len(floats) - 1}\x00"
        return o

    text = json.dumps(mark(doc), indent=2)
    for i, x in enumerate(floats):
        text = text.replace(f'"\\u0000{i}\\u0000"', _fmt_float(x), 1)
    return text + "\n"


def _to_csv(doc: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for key, val in _flatten(doc):
        w.writerow([key, _fmt_float(val) if isinstance(val, float) else ("" if val is None else val)])
    return buf.getvalue()


def emit_report(report: dict, config: RunConfig) -> str:
    """Serialize a report document and write it to ``config.out`` or stdout."""
    doc = {
        "command": config.command,
        "parameters": config.parameters,
        "seed": config.seed,
        "samples": config.samples,
        "analytic": report.get("analytic", {}),
        "empirical": report.get("empirical", {}),
        "machine": report.get("machine"),
        "version": __version__,
    }
    text = _to_json(doc) if config.fmt == "json" else _to_csv(doc)
    if config.out:
        try:
            Path(config.out).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {config.out}: {exc}") from exc
    else:
        sys.stdout.write(text)
    return text


def _machine_doc(machine: pcm.CloningMachine, name: str) -> dict:
    return {
        "name": name,
        "gammas": list(machine.gammas),
        "signs": list(machine.family.signs),
        "residual_min_eigenvalue": pcm.residual_min_eigenvalue(machine.family, machine.gammas),
    }


def _parse_gammas(text: str) -> tuple[float, float]:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad efficiency list {text!r}")
    if len(vals) != 2 or not all(0.0 <= v <= 1.0 for v in vals):
        raise argparse.ArgumentTypeError("--gammas takes g1,g2 with both in [0, 1]")
    return vals


def _resolve_machine(args) -> tuple[pcm.CloningMachine, str]:
    if args.gammas is not None:
        g1, g2 = args.gammas
        try:
            return task2.machine_from_pair(g1, g2), "user"
        except ValueError as exc:
            raise InfeasibleMachine(str(exc)) from exc
    if args.machine == "paper1":
        return task2.machine_from_pair(*task2.PAPER1), "paper1"
    if args.machine == "paper2":
        return task2.machine_from_pair(*task2.PAPER2), "paper2"
    res = task2.optimize_machine("p2" if args.machine == "optimized-p2" else "flag")
    return task2.machine_from_pair(res.gammas[0], res.gammas[1]), args.machine


def _cmd_example1(args) -> tuple[dict, dict]:
    params = task1.Example1Params(M=args.m, d=args.d, N=args.n, samples=args.samples, seed=args.seed)
    rep = task1.run_example1(params, monte_carlo=not args.no_mc, jobs=args.jobs)
    return {"M": args.m, "d": args.d, "N": args.n, "jobs": args.jobs}, {
        "analytic": rep.analytic(),
        "empirical": rep.empirical,
    }


def _cmd_example2(args) -> tuple[dict, dict]:
    machine, name = _resolve_machine(args)
    rep = task2.run_example2(machine, samples=0 if args.no_mc else args.samples, seed=args.seed, jobs=args.jobs)
    return {"machine": name, "jobs": args.jobs}, {
        "analytic": rep.analytic(),
        "empirical": rep.empirical,
        "machine": _machine_doc(machine, name),
    }


def _cmd_pcm_optimize(args) -> tuple[dict, dict]:
    res = task2.optimize_machine(args.objective)
    machine = task2.machine_from_pair(res.gammas[0], res.gammas[1])
    return {"objective": args.objective, "mode": "cloning"}, {
        "analytic": {
            "objective_value": res.value,
            "gamma1": float(res.gammas[0]),
            "gamma2": float(res.gammas[1]),
            "p2": task2.p2_closed_form(res.gammas),
            "p_success": task2.p_success(res.gammas),
            "residual_min_eigenvalue": res.min_eigenvalue,
            "feasibility_checks": res.evaluations,
        },
        "machine": _machine_doc(machine, f"optimized-{args.objective}"),
    }


def _cmd_pcm_check(args) -> tuple[dict, dict]:
    if args.gammas is not None:
        g1, g2 = args.gammas
        name = "user"
    else:
        g1, g2 = task2.PAPER1 if args.machine == "paper1" else task2.PAPER2
        name = args.machine
    fam = task2.f0_family()
    gammas = (g1, g2, g2)
    lam = pcm.residual_min_eigenvalue(fam, gammas)
    feasible = pcm.cloning_feasible(fam, gammas, args.tol)
    report = {
        "analytic": {
            "feasible": feasible,
            "tolerance": args.tol,
            "residual_min_eigenvalue": lam,
            "p_success": task2.p_success(gammas),
            "p0010": task2.p0010(gammas),
            "p2": task2.p2_closed_form(gammas),
        },
        "machine": {"name": name, "gammas": list(gammas), "signs": list(fam.signs)},
    }
    return {"machine": name, "tol": args.tol}, report


def _cmd_udisc_bound(args) -> tuple[dict, dict]:
    res = task2.no_cloning_guarantee_bound()
    return {"mode": "identification", "objective": "mean"}, {
        "analytic": {
            "bound": res.value,
            "gammas": [float(g) for g in res.gammas],
            "residual_min_eigenvalue": res.min_eigenvalue,
        },
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qclone", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=10**4)
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("example1", parents=[common], help="branch-computation fidelity game")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-mc", action="store_true", help="analytic scores only")
    p.set_defaults(func=_cmd_example1)

    p = sub.add_parser("example2", parents=[common], help="oracle-function guessing game")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--machine", choices=MACHINES, default="paper1")
    g.add_argument("--gammas", type=_parse_gammas, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-mc", action="store_true", help="exact enumeration only")
    p.set_defaults(func=_cmd_example2)

    p = sub.add_parser("pcm-optimize", parents=[common], help="search cloning efficiencies")
    p.add_argument("--objective", choices=("p2", "flag"), default="p2")
    p.set_defaults(func=_cmd_pcm_optimize)

    p = sub.add_parser("pcm-check", parents=[common], help="check a machine's feasibility")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--machine", choices=("paper1", "paper2"), default="paper1")
    g.add_argument("--gammas", type=_parse_gammas, default=None)
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(func=_cmd_pcm_check)

    p = sub.add_parser("udisc-bound", parents=[common], help="unambiguous identification bound")
    p.set_defaults(func=_cmd_udisc_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.samples < 1 or args.seed < 0 or getattr(args, "jobs", 1) < 1:
        print("error: --samples and --jobs must be positive, --seed non-negative", file=sys.stderr)
        return EXIT_USAGE
    config = RunConfig(args.command, seed=args.seed, samples=args.samples, fmt=args.fmt, out=args.out)
    try:
        config.parameters, report = args.func(args)
    except InfeasibleMachine as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    emit_report(report, config)
    if args.command == "pcm-check" and not report["analytic"]["feasible"]:
        return EXIT_INFEASIBLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
