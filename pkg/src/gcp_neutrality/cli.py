"""Command line entry point: ``gcp-neutrality {degrees,plateaus,solve,full}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .graph import DimacsFormatError, find_instance
from .harness import DEFAULT_INSTANCES, ConfigError, ExperimentConfig, InstanceError, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_INSTANCE = 0, 1, 2


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcp-neutrality",
        description="Neutrality analysis and neutral-walk iterated local search for k-colouring.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", action="append", type=Path, default=[],
                        help="DIMACS .col file (repeatable)")
    common.add_argument("--instance-dir", type=Path, default=Path("instances"),
                        help="where `full` looks for its default instances (default: ./instances)")
    common.add_argument("--k", type=int, default=None, help="number of colours (default: chi from the manifest)")
    common.add_argument("--samples", type=int, default=30, help="samples / runs per configuration")
    common.add_argument("--mns", type=_float_list, default=[0.0, 1.0, 2.0, 5.0],
                        help="MNS coefficients as multiples of n*(k-1), e.g. 0,1,2,5")
    common.add_argument("--budget", type=int, default=20_000_000, help="evaluations per solver run")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, default=Path("results"))
    common.add_argument("--jobs", type=int, default=1, help="worker processes (-1: all cores)")
    common.add_argument("--kick-fraction", type=float, default=1.0)
    common.add_argument("--force", action="store_true", help="run walk analysis even on filtered instances")
    common.add_argument("--manifest", type=Path, default=None)
    common.add_argument("-v", "--verbose", action="store_true")
    for mode, help_ in (
        ("degrees", "neutral degree of random solutions and local optima"),
        ("plateaus", "neutral random walks from local optima"),
        ("solve", "ILS vs NILS sweep over MNS coefficients"),
        ("full", "degrees, plateaus and solve"),
    ):
        sub.add_parser(mode, parents=[common], help=help_)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    instances = list(args.instance)
    if not instances and args.mode == "full":
        for name in DEFAULT_INSTANCES:
            path = find_instance(name, args.instance_dir)
            if path is None:
                print(f"error: {name}.col not found in {args.instance_dir}", file=sys.stderr)
                return EXIT_INSTANCE
            instances.append(path)
    config = ExperimentConfig(
        instances=instances,
        mode=args.mode,
        k=args.k,
        samples=args.samples,
        mns=args.mns,
        eval_budget=args.budget,
        seed=args.seed,
        out=args.out,
        jobs=args.jobs,
        kick_fraction=args.kick_fraction,
        force=args.force,
        manifest=args.manifest,
    )
    try:
        written = run_experiment(config)
    except (DimacsFormatError, InstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSTANCE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for p in written:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
