"""Command line front end: ``gen``, ``verify``, ``mc`` and ``rota``."""

from __future__ import annotations

import argparse
import sys

from .runner import emit_report, gen_instance, load_instance, report_text, run_mc, run_verify

EXIT_OK, EXIT_FAIL, EXIT_BAD_INPUT = 0, 1, 2


def _common(p: argparse.ArgumentParser, horizon: int = 4, samples: int = 0) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=3, help="number of cells for generated instances")
    p.add_argument("--horizon", type=int, default=horizon)
    p.add_argument("--samples", type=int, default=samples, help="Monte Carlo samples (0 disables)")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="l1dilation", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random instance file")
    _common(g)
    g.add_argument("--kind", choices=("akcoglu", "rota"), default="akcoglu")
    g.add_argument("--contraction", action="store_true", help="allow a column deficit (not integral preserving)")

    for name, helptext, samples in (
        ("verify", "run the full verification suite", 0),
        ("mc", "Monte Carlo comparison against the exact path sum", 100_000),
        ("rota", "Rota dilation checks on a reversible chain", 0),
    ):
        p = sub.add_parser(name, help=helptext)
        _common(p, samples=samples)
        p.add_argument("--instance", help="instance file; a random one is generated if omitted")
        p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            inst = gen_instance(args.kind, args.size, args.seed, integral_preserving=not args.contraction)
            _write(inst.dumps(), args.out)
            return EXIT_OK
        kind = "rota" if args.command == "rota" else "akcoglu"
        if args.instance:
            inst = load_instance(args.instance)
        else:
            inst = gen_instance(kind, args.size, args.seed)
        if args.command == "rota" and inst.kind != "rota":
            raise ValueError("the rota command needs a rota instance")
        if args.horizon < 0 or args.samples < 0:
            raise ValueError("horizon and samples must be nonnegative")
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT

    if args.command == "mc":
        report = run_mc(inst, args.horizon, max(args.samples, 1), args.seed)
    else:
        report = run_verify(inst, args.horizon, args.samples, args.seed)

    if args.out:
        try:
            emit_report(report, args.format, args.out)
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_BAD_INPUT
    else:
        sys.stdout.write(report_text(report, args.format))
    status = "PASS" if report.verdict else "FAIL"
    print(f"{status}: {sum(c.passed for c in report.checks)}/{len(report.checks)} checks", file=sys.stderr)
    return EXIT_OK if report.verdict else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
