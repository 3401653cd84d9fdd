"""Full analysis bundle and dry-run diagnostics."""

from __future__ import annotations

import json
import math
import os
import shutil
import tempfile
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .binfit import (
    DEFAULT_BINS_PER_DECADE,
    DEFAULT_BREAKPOINT,
    DEFAULT_MIN_COUNT,
    bootstrap_ses,
    fit_piecewise_power_law,
    fit_power_law,
    fit_stretched_log,
    log_bin,
)
from .correlation import auto_correlation_table, consecutive_pairs, cross_index_correlation
from .dataset import Panel, parse_panel
from .distributions import (
    DEFAULT_TAIL_XMIN,
    collapse_report,
    empirical_pdf,
    fit_lognormal,
    fit_power_tail,
    pooled_scaled_pdf,
    scale_collapse,
    xi_from_tail_exponents,
)
from .errors import CiteIndexError, DegenerateSampleError, DisjointSupportError, EmptyDataError, ValidationError
from .indices import INDEX_NAMES, IndexTable, index_table

MODELS = ("power", "piecewise", "stretchedlog")
# (x index, y index, model) behind tables 1-3
TABLE_FITS = {"table1": ("n", "I", "power"), "table2": ("r", "I", "piecewise"), "table3": ("n", "r", "stretchedlog")}


@dataclass
class ReportConfig:
    input: Optional[str] = None
    out: Optional[str] = None
    years: Optional[list] = None  # [first, last]; default whole panel
    window: Optional[list] = None  # averaging window for r'; default = years
    bins_per_decade: int = DEFAULT_BINS_PER_DECADE
    min_count: int = DEFAULT_MIN_COUNT
    dist_bins_per_decade: int = DEFAULT_BINS_PER_DECADE
    breakpoint: Optional[float] = DEFAULT_BREAKPOINT  # None: search
    weighted: bool = False
    tail_xmin: dict = field(default_factory=lambda: {"I": DEFAULT_TAIL_XMIN, "r": DEFAULT_TAIL_XMIN,
                                                     "rprime": DEFAULT_TAIL_XMIN})
    lognormal_range: Optional[list] = None
    # per-year samples are far smaller than the >= 800-count bins the 0.05
    # tolerance needs; the report uses a looser support for its diagnostic
    collapse_min_count: int = 100
    bootstrap: int = 0  # resamples per fit; 0 disables
    seed: int = 0

    def __post_init__(self):
        if self.years is not None and (len(self.years) != 2 or self.years[0] > self.years[1]):
            raise ValidationError(f"year range must be [first, last], got {self.years}")
        if self.bins_per_decade <= 0 or self.dist_bins_per_decade <= 0:
            raise ValidationError("bins per decade must be positive")

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self):
        return asdict(self)


class AnalysisError(CiteIndexError):
    """A module error tagged with the analysis that raised it."""

    def __init__(self, analysis, cause):
        super().__init__(f"{analysis}: {cause}")
        self.analysis = analysis
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 3)


# shared building blocks (also used by the single-purpose CLI subcommands) ----

def load_panel(path) -> Panel:
    with open(path, "rb") as fh:
        return parse_panel(fh)


def restrict_years(panel: Panel, years) -> Panel:
    if years is None:
        return panel
    lo, hi = years
    return Panel.from_records(r for r in panel.records if lo <= r.year <= hi)


def build_index_table(panel: Panel, config: ReportConfig) -> IndexTable:
    window = tuple(config.window) if config.window else None
    return index_table(panel, window)


def index_values(table, index, year):
    return {row.journal_id: row.value(index) for row in table if row.year == year}


def paired_arrays(table, x_index, y_index, year):
    """Per-journal (x, y) arrays for one year, dropping journals with either absent."""
    xs, ys = [], []
    for row in table:
        if row.year != year:
            continue
        x, y = row.value(x_index), row.value(y_index)
        if x is None or y is None:
            continue
        xs.append(x)
        ys.append(y)
    return np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)


def fit_pair(table, x_index, y_index, year, model, config: ReportConfig):
    """Bin one year's (x, y) scatter and fit ``model``; returns (binned, fit)."""
    x, y = paired_arrays(table, x_index, y_index, year)
    binned = log_bin(x, y, config.bins_per_decade, config.min_count)
    return binned, _fit(binned, model, config)


def _fit(binned, model, config):
    if model == "power":
        return fit_power_law(binned, weighted=config.weighted)
    if model == "piecewise":
        return fit_piecewise_power_law(binned, config.breakpoint, weighted=config.weighted)
    if model == "stretchedlog":
        return fit_stretched_log(binned, weighted=config.weighted)
    raise ValueError(f"unknown model {model!r}")


def fit_report(binned, fit, model, config, x_index, y_index, year):
    out = {
        "model": model,
        "x": x_index,
        "y": y_index,
        "year": year,
        "params": fit.params(),
        "ses": fit.ses(),
        "residual_rms": _rms(fit),
        "n_bins": len(binned),
        "n_points": int(binned.bin_counts.sum()),
        "n_dropped": binned.n_dropped,
        "config": {"bins_per_decade": config.bins_per_decade, "min_count": config.min_count,
                   "breakpoint": config.breakpoint, "weighted": config.weighted},
    }
    if config.bootstrap:
        out["bootstrap_ses"] = bootstrap_ses(binned, lambda b: _fit(b, model, config),
                                             config.bootstrap, config.seed)
    return out


def _rms(fit):
    if hasattr(fit, "residual_rms"):
        return fit.residual_rms
    return {"low": fit.low.residual_rms, "high": fit.high.residual_rms}


def fit_curve_tsv(binned, fit) -> str:
    rows = [("bin_center", "bin_mean", "bin_count", "bin_sem", "fitted")]
    fitted = fit.predict(binned.bin_centers)
    for c, m, k, s, f in zip(binned.bin_centers, binned.bin_means, binned.bin_counts, binned.bin_sems, fitted):
        rows.append((c, m, k, s, f))
    return tsv(rows)


def distribution_values(table, index, years):
    """Positive values of ``index`` per year."""
    out = {}
    for year in years:
        vals = [v for v in index_values(table, index, year).values() if v is not None and v > 0]
        out[year] = np.asarray(vals, dtype=float)
    return out


# formatting ------------------------------------------------------------------

def fmt(value):
    if value is None:
        return "NA"
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return format(float(value), ".6g")
    return str(value)


def tsv(rows) -> str:
    return "".join("\t".join(fmt(v) for v in row) + "\n" for row in rows)


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj)}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


# report ----------------------------------------------------------------------

class _Bundle:
    def __init__(self):
        self.files = {}

    def add(self, name, text):
        self.files[name] = text


def _analysis(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except AnalysisError:
        raise
    except (CiteIndexError, np.linalg.LinAlgError) as exc:
        raise AnalysisError(name, exc) from exc


def _table_rows(table, years, config, bundle_summary):
    tables = {}
    for name, (xi, yi, model) in TABLE_FITS.items():
        rows, boots = [], {}
        for year in years:
            binned, fit = _analysis(f"{name} ({yi} vs {xi}, {year})", fit_pair, table, xi, yi, year, model, config)
            bundle_summary["drops"][f"{name}:{year}"] = binned.n_dropped
            p, s = fit.params(), fit.ses()
            if model == "power":
                rows.append((year, p["a"], s["a"], p["xi"], s["xi"], fit.residual_rms, len(binned)))
            elif model == "piecewise":
                rows.append((year, p["breakpoint"], p["a_low"], s["a_low"], p["xi_low"], s["xi_low"],
                             p["a_high"], s["a_high"], p["xi_high"], s["xi_high"], len(binned)))
            else:
                rows.append((year, p["a"], s["a"], p["b"], s["b"], p["c"], s["c"], fit.residual_rms, len(binned)))
            if config.bootstrap:
                boots[str(year)] = bootstrap_ses(binned, lambda b, m=model: _fit(b, m, config),
                                                 config.bootstrap, config.seed)
        tables[name] = (rows, boots)
    return tables


TABLE_HEADERS = {
    "table1": ("year", "a", "a_se", "xi_n", "xi_n_se", "residual_rms", "n_bins"),
    "table2": ("year", "breakpoint", "a_low", "a_low_se", "xi_r1", "xi_r1_se",
               "a_high", "a_high_se", "xi_r2", "xi_r2_se", "n_bins"),
    "table3": ("year", "a", "a_se", "b", "b_se", "c", "c_se", "residual_rms", "n_bins"),
}


def _corr_cells(res):
    return (None, None, None) if res is None else (res.r_value, res.sample_size, res.dropped)


def run_report(config: ReportConfig) -> dict:
    """Run every analysis and write the bundle to ``config.out`` atomically.

    On any failure nothing is left behind at ``config.out`` (an existing
    directory there is only replaced after a complete run).
    """
    if not config.input or not config.out:
        raise ValidationError("report needs input and out")
    panel = restrict_years(load_panel(config.input), config.years)
    if len(panel) == 0:
        raise EmptyDataError("panel has no records in the requested years")
    years = list(panel.years)
    table = build_index_table(panel, config)
    summary = {
        "version": __version__,
        "config": config.to_dict(),
        "records": len(panel),
        "journals": len(panel.journals),
        "years": years,
        "journals_per_year": {str(y): sum(1 for r in panel.records if r.year == y) for y in years},
        "zero_publication_records": len(panel.zero_publication_records),
        "undefined": dict(table.undefined),
        "rprime_window": list(table.window),
        "drops": {},
    }
    bundle = _Bundle()

    tables = _table_rows(table, years, config, summary)
    boot = {}
    for name, (rows, boots) in tables.items():
        bundle.add(f"{name}.tsv", tsv([TABLE_HEADERS[name]] + rows))
        if boots:
            boot[name] = boots

    # auto-correlations
    auto = {ix: dict(_analysis(f"table4 ({ix})", auto_correlation_table, table, ix)) for ix in ("n", "I", "r")}
    rows = [("pair", "R_n", "K_n", "dropped_n", "R_I", "K_I", "dropped_I", "R_r", "K_r", "dropped_r")]
    for pair in consecutive_pairs(years):
        cells = []
        for ix in ("n", "I", "r"):
            cells.extend(_corr_cells(auto[ix].get(pair)))
        rows.append((f"{pair[0]}-{pair[1]}",) + tuple(cells))
    bundle.add("table4.tsv", tsv(rows))

    rows = [("index", "pair", "R", "K", "dropped")]
    if len(years) >= 2:
        ends = [(years[0], years[-1])]
        for ix in ("n", "I", "r"):
            (pair, res), = _analysis(f"extremes ({ix})", auto_correlation_table, table, ix, ends)
            rows.append((ix, f"{pair[0]}-{pair[1]}") + _corr_cells(res))
    bundle.add("extremes.tsv", tsv(rows))

    rows = [("year", "pair", "R", "K", "dropped")]
    for year in years:
        for a, b in (("n", "I"), ("r", "I"), ("n", "r"), ("r", "rprime")):
            try:
                res = cross_index_correlation(table, a, b, year)
            except DegenerateSampleError:
                res = None
            rows.append((year, f"{a}~{b}") + _corr_cells(res))
    bundle.add("cross_index.tsv", tsv(rows))

    # distributions
    collapse, pooled = {}, {}
    for ix in INDEX_NAMES:
        per_year = distribution_values(table, ix, years)
        rows = [("year", "bin_lo", "bin_hi", "bin_center", "count", "density", "scaled_x", "scaled_density")]
        scaled = []
        for year in years:
            dist = _analysis(f"dist ({ix}, {year})", empirical_pdf, per_year[year], config.dist_bins_per_decade,
                             label=str(year))
            sd = scale_collapse(dist)
            scaled.append(sd)
            for k in range(len(dist.bin_centers)):
                rows.append((year, dist.bin_edges[k], dist.bin_edges[k + 1], dist.bin_centers[k], dist.counts[k],
                             dist.density[k], sd.scaled_x[k], sd.scaled_density[k]))
        bundle.add(f"dist_{ix}.tsv", tsv(rows))
        if len(scaled) > 1:
            try:
                collapse[ix] = collapse_report(scaled, config.collapse_min_count)
            except DisjointSupportError:
                collapse[ix] = None
        pool = _analysis(f"pooled dist ({ix})", pooled_scaled_pdf, list(per_year.values()),
                         config.dist_bins_per_decade, label=f"{ix} pooled")
        pooled[ix] = pool
        rows = [("scaled_lo", "scaled_hi", "scaled_x", "count", "scaled_density")]
        for k in range(len(pool.bin_centers)):
            rows.append((pool.bin_edges[k], pool.bin_edges[k + 1], pool.bin_centers[k], pool.counts[k],
                         pool.density[k]))
        bundle.add(f"dist_{ix}_pooled.tsv", tsv(rows))

    fits = {"collapse_distance_to_median": collapse, "collapse_min_count": config.collapse_min_count}
    lrange = tuple(config.lognormal_range) if config.lognormal_range else None
    fits["lognormal_n"] = _analysis("lognormal fit (n)", fit_lognormal, pooled["n"], lrange).to_dict()
    tails = {}
    for ix in ("I", "r", "rprime"):
        tails[ix] = _analysis(f"power tail ({ix})", fit_power_tail, pooled[ix], config.tail_xmin[ix]).to_dict()
    fits["power_tail"] = tails
    xi_low = [row[4] for row in tables["table2"][0]]
    xi_high = [row[8] for row in tables["table2"][0]]
    implied = xi_from_tail_exponents(tails["I"]["gamma"], tails["r"]["gamma"])
    fits["xi_consistency"] = {
        "gamma_I": tails["I"]["gamma"],
        "gamma_r": tails["r"]["gamma"],
        "xi_r_implied": implied,
        "xi_r1_mean": float(np.mean(xi_low)),
        "xi_r2_mean": float(np.mean(xi_high)),
        "xi_r_regime_average": float((np.mean(xi_low) + np.mean(xi_high)) / 2),
    }
    bundle.add("fits.json", dumps(fits))
    if boot:
        bundle.add("bootstrap.json", dumps(boot))
    bundle.add("summary.json", dumps(summary))
    _commit(bundle, Path(config.out))
    return summary


def _commit(bundle, out: Path):
    out = out.resolve()
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{out.name}.", dir=out.parent))
    try:
        for name, text in sorted(bundle.files.items()):
            (tmp / name).write_text(text)
        if out.exists():
            old = Path(tempfile.mkdtemp(prefix=f".{out.name}.old.", dir=out.parent))
            os.rename(out, old / "bundle")
            os.rename(tmp, out)
            shutil.rmtree(old)
        else:
            os.rename(tmp, out)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise


# validate --------------------------------------------------------------------

def validate(config: ReportConfig) -> dict:
    """Parse the panel and summarise coverage without fitting anything."""
    panel = restrict_years(load_panel(config.input), config.years)
    table = build_index_table(panel, config)
    per_year = {}
    for y in panel.years:
        recs = [r for r in panel.records if r.year == y]
        per_year[str(y)] = {
            "journals": len(recs),
            "zero_publications": sum(r.publications == 0 for r in recs),
            "missing_impact_factor": sum(r.reported_impact_factor is None for r in recs),
        }
    warnings = []
    n_zero = len(panel.zero_publication_records)
    if n_zero:
        warnings.append(f"{n_zero} journal-year(s) with zero publications: citation rate undefined")
    if len(panel) == 0:
        warnings.append("panel is empty")
    return {
        "records": len(panel),
        "journals": len(panel.journals),
        "years": list(panel.years),
        "per_year": per_year,
        "undefined": dict(table.undefined),
        "warnings": warnings,
        "warning_count": len(warnings),
    }
