"""Command-line entry point ``mbl-spectra``.

Exit codes: 0 success, 2 configuration error, 3 oracle-check failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import MODES, ConfigError, make_config
from .errors import InvalidArgumentError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ORACLE = 3


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mbl-spectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment sweep")
    run.add_argument("--config", help="JSON file with RunConfig fields")
    run.add_argument("--mode", choices=MODES)
    run.add_argument("--n", type=int)
    run.add_argument("--j", type=_floats, dest="J_list", help="comma-separated couplings")
    run.add_argument("--w", type=float)
    run.add_argument("--w-list", type=_floats, dest="w_list", help="disorder strengths for appendixB")
    run.add_argument("--m", type=int)
    run.add_argument("--tmax", type=float, dest="t_max")
    run.add_argument("--samples", type=int)
    run.add_argument("--realizations", type=int)
    run.add_argument("--shots", type=int)
    run.add_argument("--noise-p", type=float, dest="noise_p")
    run.add_argument("--seed", type=int, dest="base_seed")
    run.add_argument("--out")
    run.add_argument("--workers", type=int)
    run.add_argument("--no-skip", action="store_const", const=False, dest="skip_first_interaction")
    run.add_argument("--per-realization-norm", action="store_const", const=True, dest="per_realization_norm")
    run.add_argument("--dump-circuit", action="store_const", const=True, dest="dump_circuit")
    run.add_argument("--no-figures", action="store_const", const=False, dest="figures")
    run.add_argument("--ripple", type=float)
    run.add_argument("--resolution", type=float)
    run.add_argument("--interpolation", choices=("spline", "polynomial"))
    run.add_argument("-v", "--verbose", action="store_true")

    tree = sub.add_parser("schematic", help="render the branching-line schematic")
    tree.add_argument("--J", type=float, default=0.1)
    tree.add_argument("--w", type=float, default=1.0)
    tree.add_argument("--xi", type=float, default=1.0)
    tree.add_argument("--depth", type=int, default=3)
    tree.add_argument("--n", type=int, default=3)
    tree.add_argument("--seed", type=int, default=7)
    tree.add_argument("--out", default="results/figures/schematic.png")
    return parser


def _run(args) -> int:
    from .runner import run_experiment

    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "verbose") and v is not None}
    try:
        cfg = make_config(file=args.config, **overrides)
    except InvalidArgumentError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if result.report is not None:
        for c in result.report["checks"]:
            status = "PASS" if c["passed"] else "FAIL"
            print(f"{status}  {c['name']:<28} value={c['value']:.3g}  threshold={c['threshold']:.3g}")
        return EXIT_OK if result.passed else EXIT_ORACLE
    summary = result.manifest.get("summary", {})
    if summary:
        print(json.dumps(summary, indent=2, sort_keys=True))
    print(f"wrote {len(result.files)} files under {result.out}")
    return EXIT_OK


def _schematic(args) -> int:
    from .model import sample_disorder
    from .peaks import splitting_tree_spectrum
    from .plotting import plot_split_tree

    dis = sample_disorder(args.n, args.seed)
    tree = splitting_tree_spectrum(args.J, args.w, args.xi, args.depth, dis.hx, dis.hz)
    path = plot_split_tree(tree, args.out)
    print(f"wrote {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return _run(args)
    return _schematic(args)


if __name__ == "__main__":
    sys.exit(main())
