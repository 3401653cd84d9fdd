"""Tail exponent against the tail threshold for one index of a panel.

    python scripts/xmin_sensitivity.py --input panel.csv --index I --xmins 0.5 1 2 4
"""

import argparse
import sys

from citeindex.distributions import fit_power_tail, pooled_scaled_pdf
from citeindex.errors import CiteIndexError
from citeindex.report import ReportConfig, build_index_table, distribution_values, load_panel


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--input", required=True)
    p.add_argument("--index", default="I", choices=("n", "I", "r", "rprime"))
    p.add_argument("--xmins", type=float, nargs="+", default=[0.5, 1.0, 1.5, 2.0, 3.0, 4.0])
    p.add_argument("--bins-per-decade", type=int, default=10)
    args = p.parse_args(argv)

    panel = load_panel(args.input)
    table = build_index_table(panel, ReportConfig())
    pooled = pooled_scaled_pdf(list(distribution_values(table, args.index, panel.years).values()),
                               args.bins_per_decade)
    print("\t".join(["x_min", "gamma_fit", "gamma_fit_se", "gamma_mle", "gamma_mle_se", "tail_size"]))
    for x_min in args.xmins:
        try:
            fit = fit_power_tail(pooled, x_min)
        except CiteIndexError as exc:
            print(f"{x_min:g}\tNA\tNA\tNA\tNA\tNA\t# {exc}")
            continue
        print(f"{x_min:g}\t{fit.gamma:.4f}\t{fit.ses['gamma']:.4f}\t{fit.mle_gamma:.4f}\t"
              f"{fit.mle_gamma_se:.4f}\t{fit.mle_tail_size}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
