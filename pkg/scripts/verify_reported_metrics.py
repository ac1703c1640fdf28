#!/usr/bin/env python3
"""Recompute every published benchmark row from its raw confusion counts.

Prints one line per row comparing printed accuracy/precision/recall against
values recomputed from TN/FP/FN/TP, and flags the rows whose printed numbers
do not follow from their own counts.
"""

import sys

from costnet.metrics import ConfusionMatrix, scores
from costnet.reference_results import REPORTED_ROWS


def main() -> int:
    worst = 0.0
    for row in REPORTED_ROWS:
        s = scores(ConfusionMatrix(tn=row.tn, fp=row.fp, fn=row.fn, tp=row.tp))
        deltas = {
            "acc": s["accuracy"] - row.accuracy,
            "prec": s["precision"] - row.precision,
            "rec": s["recall"] - row.recall,
        }
        tag = "ok " if row.consistent else "FLAGGED"
        if row.consistent:
            worst = max(worst, *(abs(d) for d in deltas.values()))
        print(
            f"{tag} {row.use_case:5s} {row.model:13s} "
            f"{'cost-sensitive  ' if row.cost_sensitive else 'cost-insensitive'} "
            + "  ".join(f"{k} {v:+.2f}" for k, v in deltas.items())
        )
    print(f"worst deviation over consistent rows: {worst:.2f} points", file=sys.stderr)
    return 0 if worst <= 0.2 else 1


if __name__ == "__main__":
    sys.exit(main())
