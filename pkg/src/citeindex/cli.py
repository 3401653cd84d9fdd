"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .correlation import auto_correlation_table, cross_index_correlation
from .dataset import panel_to_csv
from .distributions import (
    empirical_pdf,
    fit_lognormal,
    fit_power_tail,
    pooled_scaled_pdf,
)
from .errors import CiteIndexError
from .indices import INDEX_NAMES, index_table_tsv
from .report import (
    MODELS,
    ReportConfig,
    build_index_table,
    distribution_values,
    dumps,
    fit_curve_tsv,
    fit_pair,
    fit_report,
    load_panel,
    restrict_years,
    run_report,
    tsv,
    validate,
)
from .synth import SynthSpec, generate, manifest

EXIT_USAGE = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _year_range(text):
    """``Y1:Y2`` or ``Y1..Y2``."""
    for sep in ("..", ":"):
        if sep in text:
            a, b = text.split(sep, 1)
            return [int(a), int(b)]
    y = int(text)
    return [y, y]


def _breakpoint(text):
    return None if text in ("search", "auto") else float(text)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="panel CSV")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--config", help="JSON config (report settings); flags override it")
    common.add_argument("--window", type=_year_range, help="r' averaging window Y1:Y2")

    binning = argparse.ArgumentParser(add_help=False)
    binning.add_argument("--bins-per-decade", type=int)

    p = _Parser(prog="citeindex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("validate", parents=[common], help="parse and summarise a panel")
    sub.add_parser("indices", parents=[common], help="per journal-year indices as TSV")

    c = sub.add_parser("correlate", parents=[common], help="cross-index correlation in one year")
    c.add_argument("--index-a", choices=INDEX_NAMES, required=True)
    c.add_argument("--index-b", choices=INDEX_NAMES, required=True)
    c.add_argument("--year", type=int, required=True)

    a = sub.add_parser("autocorr", parents=[common], help="correlation of an index across years")
    a.add_argument("--index", choices=INDEX_NAMES, required=True)
    a.add_argument("--pairs", default="consecutive", help="consecutive | extremes | Y1:Y2")

    f = sub.add_parser("fit", parents=[common, binning], help="binned fit of one index against another")
    f.add_argument("--model", choices=MODELS, required=True)
    f.add_argument("--x", choices=INDEX_NAMES, required=True)
    f.add_argument("--y", choices=INDEX_NAMES, required=True)
    f.add_argument("--year", type=int, required=True)
    f.add_argument("--min-count", type=int)
    f.add_argument("--breakpoint", type=_breakpoint, default=argparse.SUPPRESS, help="number or 'search'")
    f.add_argument("--weighted", action="store_true", default=None)
    f.add_argument("--bootstrap", type=int, help="bootstrap resamples for cross-check SEs")
    f.add_argument("--seed", type=int)

    d = sub.add_parser("dist", parents=[common, binning], help="empirical distribution of an index")
    d.add_argument("--index", choices=INDEX_NAMES, required=True)
    d.add_argument("--years", default="all", help="all | Y1..Y2")
    d.add_argument("--scaled", action="store_true")
    d.add_argument("--fit", choices=("lognormal", "power"))
    d.add_argument("--xmin", type=float, default=1.0, help="tail threshold (scaled units with --scaled)")

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic panel")
    s.add_argument("--spec", help="SynthSpec JSON")
    s.add_argument("--seed", type=int)
    s.add_argument("--manifest", help="ground-truth JSON output")

    sub.add_parser("report", parents=[common], help="full analysis bundle")
    return p


def _config(args) -> ReportConfig:
    data = json.loads(Path(args.config).read_text()) if args.config else {}
    cfg = ReportConfig.from_dict(data)
    overrides = {
        "input": args.input,
        "out": args.out,
        "window": args.window,
        "bins_per_decade": getattr(args, "bins_per_decade", None),
        "min_count": getattr(args, "min_count", None),
        "weighted": getattr(args, "weighted", None),
        "bootstrap": getattr(args, "bootstrap", None),
        "seed": getattr(args, "seed", None),
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if hasattr(args, "breakpoint"):
        cfg.breakpoint = args.breakpoint
    if args.command != "report":
        # an echoed report config names the bundle directory; never write there
        cfg.out = args.out
    return cfg


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _require_input(cfg):
    if not cfg.input:
        raise _UsageError("--input is required")


class _UsageError(Exception):
    pass


def _table(cfg):
    _require_input(cfg)
    panel = restrict_years(load_panel(cfg.input), cfg.years)
    return panel, build_index_table(panel, cfg)


def cmd_validate(args, cfg):
    _require_input(cfg)
    diag = validate(cfg)
    _emit(dumps(diag), cfg.out)
    for w in diag["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_indices(args, cfg):
    _, table = _table(cfg)
    _emit(index_table_tsv(table), cfg.out)
    return 0


def cmd_correlate(args, cfg):
    _, table = _table(cfg)
    res = cross_index_correlation(table, args.index_a, args.index_b, args.year)
    _emit(tsv([("pair", "R", "K", "dropped"), (res.label, res.r_value, res.sample_size, res.dropped)]), cfg.out)
    return 0


def cmd_autocorr(args, cfg):
    panel, table = _table(cfg)
    years = list(panel.years)
    if args.pairs == "consecutive":
        pairs = None
    elif args.pairs == "extremes":
        pairs = [(years[0], years[-1])] if len(years) >= 2 else []
    else:
        pairs = [tuple(_year_range(args.pairs))]
    rows = [("pair", "R", "K", "dropped")]
    for (y1, y2), res in auto_correlation_table(table, args.index, pairs):
        label = f"{args.index}({y1})~{args.index}({y2})"
        rows.append((label, None, None, None) if res is None else (label, res.r_value, res.sample_size, res.dropped))
    _emit(tsv(rows), cfg.out)
    return 0


def cmd_fit(args, cfg):
    _, table = _table(cfg)
    binned, fit = fit_pair(table, args.x, args.y, args.year, args.model, cfg)
    report = fit_report(binned, fit, args.model, cfg, args.x, args.y, args.year)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "fit.json").write_text(dumps(report))
        (out / "fit.tsv").write_text(fit_curve_tsv(binned, fit))
    else:
        sys.stdout.write(dumps(report))
    return 0


def cmd_dist(args, cfg):
    panel, table = _table(cfg)
    if args.years == "all":
        years = list(panel.years)
    else:
        lo, hi = _year_range(args.years)
        years = [y for y in panel.years if lo <= y <= hi]
    bpd = args.bins_per_decade or cfg.dist_bins_per_decade
    per_year = distribution_values(table, args.index, years)
    if args.scaled:
        dist = pooled_scaled_pdf(list(per_year.values()), bpd, label=f"{args.index} pooled")
        header = ("scaled_x", "count", "scaled_density")
    else:
        dist = empirical_pdf(np.concatenate(list(per_year.values())), bpd, label=args.index)
        header = ("bin_center", "count", "density")
    rows = [header] + list(zip(dist.bin_centers, dist.counts, dist.density))
    fit = None
    if args.fit == "lognormal":
        fit = fit_lognormal(dist).to_dict()
    elif args.fit == "power":
        fit = fit_power_tail(dist, args.xmin).to_dict()
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "dist.tsv").write_text(tsv(rows))
        if fit is not None:
            (out / "fit.json").write_text(dumps(fit))
    else:
        sys.stdout.write(tsv(rows))
        if fit is not None:
            sys.stdout.write(dumps(fit))
    return 0


def cmd_synth(args, cfg):
    data = json.loads(Path(args.spec).read_text()) if args.spec else {}
    if args.seed is not None:
        data["seed"] = args.seed
    spec = SynthSpec.from_dict(data)
    result = generate(spec)
    _emit(panel_to_csv(result.panel), cfg.out)
    if args.manifest:
        Path(args.manifest).write_text(dumps(manifest(spec)))
    return 0


def cmd_report(args, cfg):
    if not cfg.input or not cfg.out:
        raise _UsageError("report needs --input and --out")
    summary = run_report(cfg)
    print(f"wrote report for {summary['records']} records ({len(summary['years'])} years) to {cfg.out}",
          file=sys.stderr)
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "indices": cmd_indices,
    "correlate": cmd_correlate,
    "autocorr": cmd_autocorr,
    "fit": cmd_fit,
    "dist": cmd_dist,
    "synth": cmd_synth,
    "report": cmd_report,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"citeindex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CiteIndexError as exc:
        print(f"citeindex: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"citeindex: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
