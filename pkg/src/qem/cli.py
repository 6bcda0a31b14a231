"""``qem`` command-line interface.

Exit codes: 0 success, 1 I/O error, 2 invalid input, 3 numerical failure,
4 enumeration budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import processes
from .compare import GENERATORS, equivalence_test
from .errors import EnumerationBudgetExceeded, MachineValidationError, QEMError
from .inference import InferenceConfig, infer_machine
from .machine import dumps_machine, load_machine, simulate
from .protocol import CONSTANT_ENTROPY, run_protocol
from .quantum import theorem_check


def fmt(x) -> str:
    """12 significant digits, ``.`` decimal separator."""
    return f"{float(x):.12g}"


def _write(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _process_params(args) -> dict:
    params = {}
    for key in ("p", "K", "q"):
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    return params


def cmd_analyze(args) -> int:
    machine = load_machine(args.machine)
    method = "auto" if args.allow_monte_carlo else "exact"
    rec = theorem_check(machine, tol=args.tol, t_max=args.t_max, method=method, seed=args.seed)
    if args.trace:
        _write(_csv(["t", "H_t"], [[t, fmt(h)] for t, h in rec.e.trace]), args.trace)
    _write(json.dumps(rec.to_dict(machine), indent=2) + "\n", None)
    return 0


def sweep_rows(process: str, param: str, start: float, stop: float, step: float,
               fixed: dict | None = None, t_max=None, tol=1e-10) -> list:
    """Rows of ``(value, c_mu, e, c_q)`` over an inclusive parameter grid."""
    if not start < stop or not step > 0:
        raise ValueError("sweep needs start < stop and step > 0")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    rows = []
    for i in range(n):
        value = round(start + i * step, 12)
        machine = processes.make(process, **{**(fixed or {}), param: value})
        rec = theorem_check(machine, tol=tol, t_max=t_max)
        rows.append({param: value, "c_mu": rec.c_mu, "e": rec.e.value, "c_q": rec.c_q})
    return rows


def cmd_sweep(args) -> int:
    columns = [c.strip() for c in args.columns.split(",") if c.strip()]
    if not columns:
        raise ValueError("select at least one column")
    fixed = _process_params(args)
    fixed.pop(args.param, None)
    rows = sweep_rows(args.process, args.param, args.start, args.stop, args.step, fixed,
                      t_max=args.t_max)
    columns = [args.param if c == "param" else c for c in columns]
    for c in columns:
        if c not in rows[0]:
            raise ValueError(f"unknown column {c!r}; choose from {list(rows[0])}")
    _write(_csv(columns, [[fmt(r[c]) for c in columns] for r in rows]), args.out)
    return 0


def _symbols_text(labels) -> str:
    if all(len(a) == 1 for a in labels):
        return "".join(labels) + "\n"
    return "\n".join(labels) + "\n"


def cmd_simulate(args) -> int:
    machine = load_machine(args.machine)
    initial = args.initial if args.initial is not None else machine.states[0]
    seq = simulate(machine, initial, args.steps, args.seed)
    _write(_symbols_text(seq.labels(machine)), args.out)
    return 0


def cmd_protocol(args) -> int:
    machine = load_machine(args.machine)
    mode = args.mode.replace("-", "_")
    if mode == CONSTANT_ENTROPY:
        state = run_protocol(machine, args.steps, mode, initial_state=args.initial)
        rows = [[step, fmt(h)] for step, h in state.entropy_log]
        _write(_csv(["step", "entropy_bits"], rows), args.out)
        return 0
    if args.seed is None:
        raise ValueError("measure-prepare mode is randomized and requires --seed")
    state = run_protocol(machine, args.steps, mode, seed=args.seed, initial_state=args.initial)
    _write(_symbols_text(state.emitted.labels(machine)), args.out)
    return 0


def cmd_infer(args) -> int:
    text = Path(args.data).read_text()
    config = InferenceConfig(args.L, args.F, args.tol, args.min_count)
    machine, diag = infer_machine(text, config)
    _write(dumps_machine(machine), args.out)
    sys.stdout.write(json.dumps(diag.to_dict(), indent=2) + "\n")
    return 0


def cmd_compare(args) -> int:
    machine = load_machine(args.machine)
    seed_b = args.seed_b if args.seed_b is not None else args.seed + 1
    res = equivalence_test(GENERATORS[args.a](machine), GENERATORS[args.b](machine),
                           args.n, args.block, args.threshold, args.seed, seed_b)
    out = res.to_dict() | {"a": args.a, "b": args.b, "seed": args.seed, "seed_b": seed_b}
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return 0


def cmd_make(args) -> int:
    machine = processes.make(args.name, **_process_params(args))
    _write(dumps_machine(machine), args.out)
    return 0


def cmd_catalog(args) -> int:
    specs = [{"name": s.name, "params": s.params, "description": s.description}
             for s in processes.catalog()]
    sys.stdout.write(json.dumps(specs, indent=2) + "\n")
    return 0


def _add_process_params(p):
    p.add_argument("--p", type=float, help="flip probability (perturbed-coin, coin-lattice)")
    p.add_argument("--K", type=int, help="number of coins (coin-lattice)")
    p.add_argument("--q", type=float, help="bias (iid-coin)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qem", description=(
        "Classical and quantum epsilon-machines: complexity measures, simulation, inference."))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="report C_mu, E, C_q and the irreversibility witness as JSON")
    p.add_argument("machine")
    p.add_argument("--t-max", type=int, default=None, help="enumeration horizon (default: 20 for binary alphabets)")
    p.add_argument("--tol", type=float, default=1e-10, help="convergence tolerance for H(S_-1|X_0^t)")
    p.add_argument("--trace", metavar="CSV", help="write the (t, H_t) convergence trace here")
    p.add_argument("--allow-monte-carlo", action="store_true",
                   help="fall back to sampling when exact enumeration exceeds its budget")
    p.add_argument("--seed", type=int, default=0, help="seed for the Monte Carlo fallback")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="tabulate p, c_mu, e, c_q over a parameter grid as CSV")
    p.add_argument("--process", default="perturbed-coin", choices=sorted(processes.CATALOG))
    p.add_argument("--param", default="p")
    p.add_argument("--start", type=float, default=0.05)
    p.add_argument("--stop", type=float, default=0.45)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--columns", default="param,c_mu,e,c_q")
    p.add_argument("--t-max", type=int, default=None)
    _add_process_params(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="sample symbols from a machine")
    p.add_argument("--machine", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--initial", help="initial state label (default: first state)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("protocol", help="run a quantum prediction protocol")
    p.add_argument("--machine", required=True)
    p.add_argument("--mode", choices=["constant-entropy", "measure-prepare"], default="constant-entropy")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, help="required for measure-prepare")
    p.add_argument("--initial", help="start from this pure quantum causal state instead of the stationary mixture")
    p.add_argument("--out")
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("infer", help="reconstruct a machine from a symbol file")
    p.add_argument("--data", required=True, help="one ASCII symbol per character; whitespace ignored")
    p.add_argument("-L", type=int, default=1, help="history length")
    p.add_argument("-F", type=int, default=1, help="future length")
    p.add_argument("--tol", type=float, default=0.05, help="L1 merge tolerance")
    p.add_argument("--min-count", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("compare", help="L1 block-distribution test between two generators", description=(
        "Thresholds: with n samples and b-blocks over k symbols the self-vs-self L1 distance "
        "scales like sqrt(k**b / n); 0.02 suits n=100000, b=3 on binary processes. "
        "Check the baseline with --a classical --b classical at the same n."))
    p.add_argument("--a", choices=sorted(GENERATORS), default="classical")
    p.add_argument("--b", choices=sorted(GENERATORS), default="quantum")
    p.add_argument("--machine", required=True)
    p.add_argument("-n", type=int, default=100_000)
    p.add_argument("-b", "--block", type=int, default=3)
    p.add_argument("--threshold", type=float, default=0.02)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--seed-b", type=int, help="seed for generator b (default: seed + 1)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("make", help="write a catalog machine as JSON")
    p.add_argument("name", choices=sorted(processes.CATALOG))
    _add_process_params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_make)

    p = sub.add_parser("catalog", help="list catalog processes")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MachineValidationError as exc:
        sys.stderr.write(json.dumps({"error": "validation",
                                     "violations": [v.to_dict() for v in exc.violations]}, indent=2) + "\n")
        return exc.exit_code
    except EnumerationBudgetExceeded as exc:
        sys.stderr.write(f"qem: {exc}\n")
        return exc.exit_code
    except QEMError as exc:
        sys.stderr.write(f"qem: {exc}\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(f"qem: {exc}\n")
        return 1
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        sys.stderr.write(f"qem: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
