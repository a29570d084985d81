#!/usr/bin/env python3
"""Survey the complex-conjugate operator G = A A^T across chirp-rate
indices: magnitude dumps, density figures, and zero-pattern verification
against the brute-force oracle.

    python3 scripts/operator_structure.py --n 64 --outdir results/operator/
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from afdmlink.analysis import density_stats, export_matrix_magnitudes
from afdmlink.daft import AfdmParams, conj_operator, zero_pattern_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--kmax", type=int, default=16)
    ap.add_argument("--outdir", required=True)
    args = ap.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    print(f"{'k':>3} {'density':>8} {'row_nnz':>8} {'pred_zeros':>10} {'discrepancies':>13}")
    for k in range(1, args.kmax + 1):
        p = AfdmParams.from_k(args.n, k, c2=0.0)
        g = conj_operator(p)
        stats = density_stats(g)
        rep = zero_pattern_report(args.n, k)
        export_matrix_magnitudes(
            g, str(outdir / f"operator_n{args.n}_k{k}.csv"),
            params={"n": args.n, "k": k},
        )
        print(
            f"{k:>3} {stats.density:8.4f} {stats.per_row_max_nnz:>8} "
            f"{int(rep.predicted_zero.sum()):>10} {rep.discrepancy_count:>13}"
        )
        if rep.discrepancy_count:
            (outdir / f"report_n{args.n}_k{k}.txt").write_text(rep.summary() + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
