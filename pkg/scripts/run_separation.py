#!/usr/bin/env python3
"""Verify the bundled logic-separation certificates and print the matrix."""

import argparse
from collections import defaultdict

from itlmc import Corpus, build_separation_matrix


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--corpus", help="corpus directory (default: bundled)")
    args = parser.parse_args()

    reports = build_separation_matrix(Corpus(args.corpus))
    by_label = defaultdict(list)
    for report in reports:
        by_label[report.edge.label].append(report)

    bad = 0
    for label in sorted(by_label):
        print(f"[{label}]")
        for report in by_label[label]:
            edge = report.edge
            mark = "ok  " if report.ok else "FAIL"
            bad += 0 if report.ok else 1
            print(f"  {mark} {edge.source:6s} -> {edge.target:6s} ({edge.style}) {report.detail}")
    print(f"{len(reports) - bad}/{len(reports)} edges verified")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
