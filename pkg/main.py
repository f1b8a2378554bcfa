import argparse
import logging
import sys
from typing import List, Optional

import requests

from decomp import Decomposer
from executor import Execute
from flow import FLOW
from steps import initialize_services, log_level


def _sizes(text: str) -> List[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _add_optimizer_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--trials", type=int, help="trials per parity sector (default 10)")
    parser.add_argument("--sectors", choices=["even", "odd", "both"], help="parity sectors to try (default both)")
    parser.add_argument("--lr", type=float, help="initial learning rate (default 0.05)")
    parser.add_argument("--lr-min", dest="lr_min", type=float, help="learning-rate floor (default 0.001)")
    parser.add_argument("--patience", type=int, help="plateau patience in iterations (default 50)")
    parser.add_argument("--threshold", type=float, help="minimum improvement that resets the plateau counter (default 1e-5)")
    parser.add_argument("--readout-threshold", dest="readout_threshold", type=float,
                        help="|<Z_i>| needed to read a bit (default 0.5)")
    parser.add_argument("--checkpoint-stride", dest="checkpoint_stride", type=int,
                        help="snapshot the forward state every k gates for the reverse sweep (0 = off)")
    parser.add_argument("--blocks", type=int, help="ansatz blocks (default n)")
    parser.add_argument("--max-iterations", dest="max_iterations", type=int, help="iteration cap per trial")
    parser.add_argument("--decay-guard", dest="decay_guard", choices=["once", "per_decay"],
                        help="apply the minimum-steps guard once per run or after every decay")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matchgate-maxcut",
                                     description="Projected matchgate solver for weighted MaxCut.")
    parser.add_argument("--seed", type=int, help="base seed (default MATCHGATE_SEED or 0)")
    parser.add_argument("--out", help="output directory (default MATCHGATE_OUT_DIR or runs)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-graph", help="generate a random instance file")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--kind", choices=["3regular", "erdos_renyi"])
    gen.add_argument("--p", type=float, help="edge probability for erdos_renyi")
    gen.add_argument("--weights", choices=["unit", "pm1"])

    solve = sub.add_parser("solve", help="optimize one instance")
    source = solve.add_mutually_exclusive_group(required=True)
    source.add_argument("--instance", help="instance file ('n m' header, 'u v w' lines)")
    source.add_argument("--remote", help="instance name in the remote library")
    source.add_argument("--n", type=int, help="generate a random instance with n vertices")
    solve.add_argument("--instance-url", dest="instance_url", help="base URL of the remote library")
    solve.add_argument("--kind", choices=["3regular", "erdos_renyi"])
    solve.add_argument("--p", type=float)
    solve.add_argument("--weights", choices=["unit", "pm1"])
    solve.add_argument("--known-optimum", dest="known_optimum", type=int, help="known optimal cut value")
    _add_optimizer_flags(solve)

    table = sub.add_parser("success-table", help="success rate over random 3-regular instances")
    table.add_argument("--sizes", type=_sizes, help="comma-separated even sizes (default 4,8,12)")
    table.add_argument("--instances", type=int, help="instances per size (default 10)")
    table.add_argument("--workers", type=int, help="worker processes (default MATCHGATE_WORKERS or CPU count)")
    _add_optimizer_flags(table)

    bench = sub.add_parser("bench", help="time one value-and-gradient evaluation per size")
    bench.add_argument("--sizes", type=_sizes, help="comma-separated even sizes (default 16,24,32,40,48)")
    bench.add_argument("--repetitions", type=int, help="timed repetitions per size (default 100)")
    bench.add_argument("--blocks", type=int)

    verify = sub.add_parser("verify", help="run the verification suite")
    verify.add_argument("--sizes", type=_sizes, help="oracle-equivalence sizes (default 4,6,8,10; max 12)")
    verify.add_argument("--cases", type=int, help="random cases per size (default 20)")
    verify.add_argument("--inject-fault", dest="inject_fault", action="store_true", default=None,
                        help="corrupt one gate-table sign to show the oracle check catches it")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=log_level(), format="%(asctime)s %(levelname)s %(message)s")

    try:
        #Initialize Everything
        initialize_services(getattr(args, "instance_url", None))

        #Decomposer
        context = Decomposer(args=args, command=args.command).run()

        #Get Flow
        flow = FLOW.get(args.command, [])
        logging.info(f"[MAIN] Flow Steps fetched for '{args.command}'")

        #Execute
        context = Execute(command=args.command, flow=flow, context=context).run()
    except (ValueError, RuntimeError, OSError, requests.RequestException) as exc:
        logging.error(f"[MAIN] {exc}")
        return 2

    for artifact in getattr(context, "artifacts", []) or []:
        logging.info(f"[MAIN] wrote {artifact}")
    if args.command == "verify" and not context.passed:
        logging.error("[MAIN] verification failed")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
