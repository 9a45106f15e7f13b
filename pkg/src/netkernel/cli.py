"""``netkernel`` command line: solve, verify and generate instances.

Exit codes: 0 success, 1 verification failure, 2 malformed input,
3 inconsistent balances, 4 rank deficiency, 5 singular pinned cyclic arcs.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from .decomposer import parse_cyclic
from .errors import InstanceError, NetkernelError, OracleRefusal
from .generator import GenConfig, generate_instance
from .instance import format_instance, parse_instance
from .oracle import oracle_check, random_rational
from .report import render
from .scalars import get_field
from .solution import evaluate, format_solution, parse_assignment, parse_solution, residual
from .solver import solve
from .support import load_support


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_solve(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.instance), mode=args.mode, strict=not args.relaxed)
    support = load_support(inst, _read(args.support)) if args.support else None
    cyclic = parse_cyclic(_read(args.cyclic)) if args.cyclic else None
    result = solve(inst, support=support, cyclic=cyclic)
    fld = get_field(args.mode)
    evaluations = []
    for items in args.eval or []:
        try:
            point = {arc: fld.convert(v) for arc, v in parse_assignment(items).items()}
            evaluations.append((point, evaluate(result.solution, point)))
        except (ValueError, KeyError) as exc:
            raise InstanceError(f"bad --eval point: {exc}") from None
    dump = render(result, cycles=args.dump_cycles, small_system=args.dump_D, tables=args.dump_tables)
    if dump:
        sys.stdout.write(dump)
    _write(format_solution(result.solution, evaluations), args.output)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.instance), mode=args.mode, strict=False)
    sol_file = parse_solution(_read(args.solution))
    fld = inst.arith
    tol = 0.0 if fld.exact else fld.eps
    failures: list[str] = []
    if sol_file.parametric:
        sol = sol_file.solution()
        try:
            report = oracle_check(inst, sol, trials=args.trials, seed=args.seed, tol=tol)
            print(report.summary())
            failures += [str(m) for m in report.failures]
        except OracleRefusal as exc:
            # too large for the dense oracle: random substitutions only
            print(f"note: {exc}; checking residuals only")
            rng = random.Random(args.seed)
            for t in range(args.trials):
                point = {f: fld.convert(random_rational(rng)) for f in sol.free}
                rep = residual(inst, evaluate(sol, point))
                failures += [f"trial {t + 1}: {label}: residual {v}" for label, v in rep.failures(tol)]
        for n, (point, values) in enumerate(sol_file.evaluations, start=1):
            point = {a: fld.convert(v) for a, v in point.items()}
            values = {a: fld.convert(v) for a, v in values.items()}
            expected = evaluate(sol, point)
            for arc, v in values.items():
                if arc not in expected or abs(expected[arc] - v) > tol:
                    failures.append(f"eval {n}: value of {arc} is {v}, forms give {expected.get(arc)}")
    else:
        flow = {a: fld.convert(v) for a, v in sol_file.numeric().items()}
        try:
            rep = residual(inst, flow)
        except KeyError as exc:
            raise InstanceError(str(exc.args[0])) from None
        print(f"max |residual| = {rep.max_abs}")
        failures += [f"{label}: residual {v}" for label, v in rep.failures(tol)]
    for line in failures:
        print(f"FAIL {line}")
    print("verify: " + ("FAIL" if failures else "PASS"))
    return 1 if failures else 0


def cmd_gen(args: argparse.Namespace) -> int:
    config = GenConfig(args.commodities, args.nodes, args.extra_arcs, args.side, args.coupled, args.seed)
    try:
        inst = generate_instance(config)
    except ValueError as exc:
        raise InstanceError(f"infeasible generator parameters: {exc}") from None
    header = (
        f"# generated: commodities={config.commodities} nodes={config.nodes} extra-arcs={config.extra_arcs} "
        f"side={config.side} coupled={config.coupled} seed={config.seed}\n"
    )
    _write(header + format_instance(inst), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netkernel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute the parametric general solution")
    p.add_argument("instance")
    p.add_argument("--mode", choices=["rational", "float"], default="rational")
    p.add_argument("--support", metavar="F", help="pin spanning trees ('tree <k>: <i>:<j> ...')")
    p.add_argument("--cyclic", metavar="F", help="pin cyclic arcs ('cyclic <k>:<i>:<j>' in order)")
    p.add_argument(
        "--eval", nargs="+", action="append", metavar="K:I:J=V", help="evaluate at a free-variable point (repeatable)"
    )
    p.add_argument("--dump-cycles", action="store_true", help="print fundamental cycles and characteristic vectors")
    p.add_argument("--dump-D", dest="dump_D", action="store_true", help="print D, beta and D^-1")
    p.add_argument("--dump-tables", action="store_true", help="print vectors, partial solutions, determinants, deltas")
    p.add_argument("--relaxed", action="store_true", help="accept instances that are not strictly underdetermined")
    p.add_argument("-o", "--output", metavar="OUT")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution file against an instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--mode", choices=["rational", "float"], default="rational")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a random consistent instance")
    p.add_argument("--commodities", type=int, default=3)
    p.add_argument("--nodes", type=int, default=6)
    p.add_argument("--extra-arcs", type=int, default=3)
    p.add_argument("--side", type=int, default=2)
    p.add_argument("--coupled", type=int, default=1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("-o", "--output", metavar="OUT")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NetkernelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
