"""Journal citation indices: impact factor, annual citations, citation rates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .dataset import Panel, PaperCitationRecord
from .errors import NotFoundError, UndefinedIndexError

INDEX_NAMES = ("n", "I", "r", "rprime")
_ROW_ATTR = {"n": "n", "I": "impact", "r": "rate", "rprime": "rate_windowed"}


@dataclass(frozen=True)
class ImpactWindow:
    """Inputs of the two-year impact factor for year T.

    ``citations_y1`` are year-T citations to items published in T-1,
    ``citations_y2`` the same for T-2; ``articles_*`` are the matching
    citable-item counts.
    """

    citations_y1: int
    citations_y2: int
    articles_y1: int
    articles_y2: int

    def __post_init__(self):
        if min(self.citations_y1, self.citations_y2, self.articles_y1, self.articles_y2) < 0:
            raise ValueError("impact window fields must be non-negative")


@dataclass(frozen=True)
class IndexRow:
    journal_id: str
    year: int
    n: int
    impact: Optional[float] = None
    rate: Optional[float] = None
    rate_windowed: Optional[float] = None
    # two-year ratio recomputed from window data, kept next to a reported value
    impact_recomputed: Optional[float] = None

    def value(self, index):
        return getattr(self, _ROW_ATTR[index])


@dataclass
class IndexTable:
    rows: list[IndexRow]
    window: tuple[int, int]
    undefined: dict

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)


def impact_factor(window: ImpactWindow) -> float:
    articles = window.articles_y1 + window.articles_y2
    if articles <= 0:
        raise UndefinedIndexError("impact factor undefined: no citable articles in T-1, T-2")
    return (window.citations_y1 + window.citations_y2) / articles


def aggregate_annual_citations(records: Iterable[PaperCitationRecord], journal_id: str, year: int) -> int:
    """n(T): citations received in ``year`` by all of the journal's papers published up to ``year``."""
    return sum(
        r.citations
        for r in records
        if r.journal_id == journal_id and r.citing_year == year and r.publication_year <= year
    )


def citation_rate(n: int, publications: int) -> float:
    if publications <= 0:
        raise UndefinedIndexError("citation rate undefined: zero publications")
    return n / publications


def _mean_publications(panel, journal_id, window):
    lo, hi = window
    counts = [r.publications for r in panel.journal_records(journal_id) if lo <= r.year <= hi]
    if not counts:
        raise UndefinedIndexError(f"no records for {journal_id!r} in window {lo}-{hi}")
    mean = sum(counts) / len(counts)
    if mean <= 0:
        raise UndefinedIndexError(f"mean publications of {journal_id!r} in {lo}-{hi} is zero")
    return mean


def citation_rate_windowed(panel: Panel, journal_id: str, year: int, window: tuple[int, int]) -> float:
    """r'(T) = n(T) / <N>, <N> averaged over the journal's years present in ``window``."""
    rec = panel.get(journal_id, year)
    if rec is None:
        raise NotFoundError(f"no record for {journal_id!r} in {year}")
    return rec.annual_citations / _mean_publications(panel, journal_id, window)


def impact_windows_from_papers(papers: Iterable[PaperCitationRecord], panel: Panel) -> dict:
    """Derive ImpactWindow inputs per (journal, T) from per-paper citations.

    Article counts come from the panel's N(T-1), N(T-2); a (journal, T) is
    emitted only when both window years are in the panel.
    """
    cites = {}
    for p in papers:
        age = p.citing_year - p.publication_year
        if age in (1, 2):
            key = (p.journal_id, p.citing_year, age)
            cites[key] = cites.get(key, 0) + p.citations
    out = {}
    for rec in panel.records:
        y1 = panel.get(rec.journal_id, rec.year - 1)
        y2 = panel.get(rec.journal_id, rec.year - 2)
        if y1 is None or y2 is None:
            continue
        out[rec.key] = ImpactWindow(
            cites.get((rec.journal_id, rec.year, 1), 0),
            cites.get((rec.journal_id, rec.year, 2), 0),
            y1.publications,
            y2.publications,
        )
    return out


def index_table(
    panel: Panel,
    window: Optional[tuple[int, int]] = None,
    impact_windows: Optional[Mapping[tuple[str, int], ImpactWindow]] = None,
) -> IndexTable:
    """One IndexRow per journal-year.

    ``window`` defaults to the panel's full year span.  A reported impact
    factor always wins; when ``impact_windows`` has an entry for the row the
    recomputed value is stored in ``impact_recomputed`` (and used as
    ``impact`` if nothing was reported).  Undefined values stay ``None`` and
    are tallied in ``undefined``.
    """
    if window is None:
        window = (panel.years[0], panel.years[-1]) if panel.years else (0, 0)
    impact_windows = impact_windows or {}
    undefined = {"I": 0, "r": 0, "rprime": 0}
    means = {}
    rows = []
    for rec in sorted(panel.records, key=lambda r: (r.journal_id, r.year)):
        recomputed = None
        if rec.key in impact_windows:
            try:
                recomputed = impact_factor(impact_windows[rec.key])
            except UndefinedIndexError:
                pass
        impact = rec.reported_impact_factor if rec.reported_impact_factor is not None else recomputed
        rate = rec.annual_citations / rec.publications if rec.publications > 0 else None
        if rec.journal_id not in means:
            try:
                means[rec.journal_id] = _mean_publications(panel, rec.journal_id, window)
            except UndefinedIndexError:
                means[rec.journal_id] = None
        mean = means[rec.journal_id]
        windowed = rec.annual_citations / mean if mean is not None else None
        undefined["I"] += impact is None
        undefined["r"] += rate is None
        undefined["rprime"] += windowed is None
        rows.append(IndexRow(rec.journal_id, rec.year, rec.annual_citations, impact, rate, windowed, recomputed))
    return IndexTable(rows, tuple(window), undefined)


def _fmt(value):
    if value is None:
        return "NA"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def index_table_tsv(table: IndexTable) -> str:
    lines = ["journal_id\tyear\tn\timpact\trate\trate_windowed"]
    for row in table.rows:
        lines.append("\t".join([row.journal_id, str(row.year)] + [
            _fmt(v) for v in (row.n, row.impact, row.rate, row.rate_windowed)
        ]))
    return "\n".join(lines) + "\n"

