#!/usr/bin/env python3
"""Soundness sweeps: every axiom schema of chosen logics over bounded posets.

The default configuration mirrors the acceptance run (bound 3).  Pass
--bound 4 for the heavier overnight-style sweep; expect minutes.
"""

import argparse
import time

from itlmc import Countermodel, LOGICS, SemanticClass, print_poset_model, soundness_sweep

DEFAULT = ["ITL.db", "ITL.dw", "CDTL.db", "CDTL.b", "CDTL+.db"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--logics", nargs="*", default=DEFAULT, metavar="NAME")
    parser.add_argument("--bound", type=int, default=3)
    parser.add_argument(
        "--semclass", choices=("e", "p"), default=None,
        help="force one class; default: p for persistent-only logics, else e",
    )
    parser.add_argument("--show-countermodels", action="store_true")
    args = parser.parse_args()

    failures = 0
    for name in args.logics:
        logic = LOGICS[name]
        kind = args.semclass or ("p" if name.startswith(("ITL+", "ETL+", "CDTL+", "RTL")) else "e")
        semclass = SemanticClass(kind, args.bound)
        start = time.perf_counter()
        results = soundness_sweep(logic, semclass)
        elapsed = time.perf_counter() - start
        bad = {k: v for k, v in results.items() if isinstance(v, Countermodel)}
        verdict = "clean" if not bad else f"{len(bad)} FAILING: {', '.join(sorted(bad))}"
        print(f"{name:10s} class {kind} bound {args.bound}: "
              f"{len(results)} schemas, {verdict} ({elapsed:.1f}s)")
        failures += len(bad)
        if bad and args.show_countermodels:
            for schema, cm in sorted(bad.items()):
                print(f"-- {schema} falsified at {cm.world}:")
                print(print_poset_model(cm.model, cm.valuation))
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
