#!/usr/bin/env python3
"""Search bounded poset classes for countermodels to well-known schemas."""

import argparse
import time

from itlmc import (
    Countermodel,
    SemanticClass,
    parse_formula,
    print_formula,
    print_poset_model,
    validity,
)

SCHEMAS = {
    "excluded-middle": "p | ~p",
    "next-shift": "(O p -> O q) -> O(p -> q)",
    "eventually-shift": "(<>p -> []q) -> [](p -> q)",
    "distribution": "[](p | q) -> []p | <>q",
    "next-excluded-middle": "~O p & O~~p -> O q | ~O q",
    "box-negation-swap": "[]~~p -> ~~[]p",
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--bound", type=int, default=4)
    parser.add_argument("--semclass", choices=("e", "p"), default="e")
    parser.add_argument(
        "--schemas", nargs="*", default=sorted(SCHEMAS), choices=sorted(SCHEMAS)
    )
    args = parser.parse_args()

    for name in args.schemas:
        phi = parse_formula(SCHEMAS[name])
        start = time.perf_counter()
        verdict = validity(phi, SemanticClass(args.semclass, args.bound))
        elapsed = time.perf_counter() - start
        print(f"== {name}: {print_formula(phi)}  [{elapsed:.1f}s]")
        if isinstance(verdict, Countermodel):
            print(f"falsified at {verdict.world} ({verdict.model.n} worlds):")
            print(print_poset_model(verdict.model, verdict.valuation))
        else:
            print(f"valid over class {args.semclass} up to {args.bound} worlds")
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
