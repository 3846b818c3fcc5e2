"""Command line entry point: ``reservekp {run,duel,sweep,verify,gen}``."""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from .adversaries import ADVERSARY_NAMES, DEFAULT_DELTA, DEFAULT_EPSILON, adversary_available, duel, make_adversary
from .algorithms import POLICY_NAMES, make_policy, policy_available, rho_star
from .enclosure import DEFAULT_DIGITS
from .errors import NotApplicable, ReserveKPError
from .harness import (
    SweepSpec,
    cell_instances,
    emit_curve,
    emit_gnuplot_script,
    format_curve,
    measure_ratio,
    random_instance,
    run_sweep,
    sorted_prefix_check,
    verify_lemmas,
)
from .model import format_instance, read_instance, run_on_instance, to_fraction

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def rational(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _ratio_text(ratio) -> str:
    return "inf" if ratio == float("inf") else f"{ratio} (~{float(ratio):.10g})"


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--alpha", type=rational, help="reservation factor as p/q or decimal")
    p.add_argument("--epsilon", type=rational, default=DEFAULT_EPSILON)
    p.add_argument("--delta", type=rational, default=DEFAULT_DELTA)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path")
    p.add_argument("--precision", type=int, default=DEFAULT_DIGITS,
                   help="enclosure width exponent (widths <= 10**-N)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="reservekp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="run a policy on an instance file")
    run.add_argument("instance", help="one size per line, '#' starts a comment")
    run.add_argument("--policy", default="auto", choices=POLICY_NAMES)

    d = sub.add_parser("duel", parents=[common], help="play a policy against an adversary")
    d.add_argument("--policy", default="auto", choices=POLICY_NAMES)
    d.add_argument("--adversary", default="four-item", choices=ADVERSARY_NAMES)

    s = sub.add_parser("sweep", parents=[common], help="alpha-grid experiment, CSV output")
    s.add_argument("--start", type=rational, default=Fraction(1, 100))
    s.add_argument("--end", type=rational, default=Fraction(99, 100))
    s.add_argument("--step", type=rational, default=Fraction(1, 100))
    s.add_argument("--policy", action="append", choices=POLICY_NAMES)
    s.add_argument("--adversary", action="append", choices=ADVERSARY_NAMES)
    s.add_argument("--instances", type=int, default=0, help="random instances per cell")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--gnuplot", help="also write a gnuplot script next to the CSV")

    v = sub.add_parser("verify", parents=[common], help="check the lemma suite on generated traces")
    v.add_argument("--policy", action="append", choices=POLICY_NAMES)
    v.add_argument("--count", type=int, default=50, help="random instances per alpha")

    g = sub.add_parser("gen", parents=[common], help="write a random instance file")
    g.add_argument("-n", type=int, default=10)
    g.add_argument("--max-denominator", type=int, default=1000)
    return parser


def _need_alpha(args):
    if args.alpha is None:
        print(f"reservekp {args.command}: --alpha is required", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def cmd_run(args) -> int:
    _need_alpha(args)
    instance = read_instance(args.instance)
    policy = make_policy(args.policy, args.alpha, args.precision)
    trace, outcome = run_on_instance(policy, instance, args.alpha)
    for i, step in enumerate(trace.steps, start=1):
        print(f"{i:3d}  {step.item!s:>12}  {step.action}  t={step.state.packed_total} R={step.state.reserved_total}")
    if trace.final_selection is not None:
        print(f"end  pack {list(map(str, trace.final_selection))}")
    record = measure_ratio(policy, instance, args.alpha, policy_name=args.policy)
    print(f"policy={policy.name} gain={outcome.gain} opt={record.opt} ratio={_ratio_text(record.ratio)}")
    print(f"optimal ratio for alpha={args.alpha}: {float(rho_star(args.alpha, args.precision)):.10g}")
    if args.out:
        emit_curve([record], args.out)
    return EXIT_OK


def cmd_duel(args) -> int:
    _need_alpha(args)
    policy = make_policy(args.policy, args.alpha, args.precision)
    adversary = make_adversary(args.adversary, args.alpha, args.delta, args.epsilon, args.precision)
    result = duel(policy, adversary, args.alpha)
    actions = result.trace.actions
    for i, item in enumerate(result.instance.items):
        action = actions[i] if i < len(actions) else "-"
        print(f"{i + 1:3d}  {float(item):.12f}  {action}")
    print(f"policy={policy.name} adversary={adversary.name} gain={float(result.gain):.12g} "
          f"opt={float(result.opt):.12g} ratio={_ratio_text(result.ratio)}")
    for note in result.notes:
        print(f"note: {note}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = SweepSpec(
        args.start, args.end, args.step,
        policies=tuple(args.policy or ["auto"]),
        opponents=tuple(args.adversary or ["four-item"]),
        seed=args.seed, instances=args.instances,
        epsilon=args.epsilon, delta=args.delta, digits=args.precision,
    )
    result = run_sweep(spec, jobs=args.jobs)
    if args.out:
        emit_curve(result.records, args.out)
        if args.gnuplot:
            emit_gnuplot_script(args.out, args.gnuplot)
    else:
        sys.stdout.write(format_curve(result.records))
    print(f"{len(result.records)} records, {len(result.skips)} skipped", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    alphas = [args.alpha] if args.alpha is not None else [Fraction(k, 100) for k in range(1, 100)]
    names = args.policy or ["threshold-2a", "threshold-1a", "auto"]
    traces, prefix_reports = [], []
    for a in alphas:
        for name in names:
            if not policy_available(name, a, args.precision):
                continue
            policy = make_policy(name, a, args.precision)
            for inst in cell_instances(args.seed, a, args.count):
                trace, _ = run_on_instance(policy, inst, a)
                traces.append(trace)
                if policy.kind == "threshold":
                    try:
                        prefix_reports.append(sorted_prefix_check(policy, inst, a))
                    except NotApplicable:
                        pass
            for adv_name in ADVERSARY_NAMES:
                if adversary_available(adv_name, a):
                    adversary = make_adversary(adv_name, a, args.delta, args.epsilon, args.precision)
                    traces.append(duel(policy, adversary, a).trace)
    reports = verify_lemmas(traces, digits=args.precision) + prefix_reports
    failures = [r for r in reports if not r.passed]
    by_check = {}
    for r in reports:
        ok, total = by_check.get(r.check, (0, 0))
        by_check[r.check] = (ok + r.passed, total + 1)
    for check, (ok, total) in sorted(by_check.items()):
        print(f"{check:24s} {ok}/{total} passed")
    for r in failures[:20]:
        print(f"FAIL {r.check} {r.reference} {r.witness}")
    return EXIT_FAILED if failures else EXIT_OK


def cmd_gen(args) -> int:
    instance = random_instance(args.n, args.seed, args.max_denominator)
    text = format_instance(instance)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "duel": cmd_duel, "sweep": cmd_sweep, "verify": cmd_verify, "gen": cmd_gen}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ReserveKPError, ValueError, KeyError, OSError) as exc:
        print(f"reservekp {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
