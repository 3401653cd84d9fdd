"""Journal-year panel: records, CSV ingestion and views."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import DuplicateKeyError, NotFoundError, ParseError, ValidationError

PANEL_HEADER = ("journal_id", "year", "citations", "articles", "impact_factor")
PAPER_HEADER = ("journal_id", "publication_year", "citing_year", "citations")
YEAR_RANGE = (1800, 2200)

# selector aliases accepted by journal_series
FIELDS = {
    "n": "annual_citations",
    "citations": "annual_citations",
    "annual_citations": "annual_citations",
    "N": "publications",
    "articles": "publications",
    "publications": "publications",
    "I": "reported_impact_factor",
    "impact_factor": "reported_impact_factor",
    "reported_impact_factor": "reported_impact_factor",
}


@dataclass(frozen=True)
class JournalYearRecord:
    journal_id: str
    year: int
    annual_citations: int
    publications: int
    reported_impact_factor: Optional[float] = None

    def __post_init__(self):
        if not self.journal_id or self.journal_id != self.journal_id.strip():
            raise ValidationError(f"journal_id must be non-empty without surrounding spaces: {self.journal_id!r}")
        if not YEAR_RANGE[0] <= self.year <= YEAR_RANGE[1]:
            raise ValidationError(f"year {self.year} outside {YEAR_RANGE}")
        if self.annual_citations < 0:
            raise ValidationError(f"negative citations ({self.annual_citations})")
        if self.publications < 0:
            raise ValidationError(f"negative articles ({self.publications})")
        if self.reported_impact_factor is not None and not self.reported_impact_factor >= 0:
            raise ValidationError(f"invalid impact factor ({self.reported_impact_factor})")

    @property
    def key(self):
        return (self.journal_id, self.year)


@dataclass(frozen=True)
class PaperCitationRecord:
    """Citations received in ``citing_year`` by one paper published in ``publication_year``."""

    journal_id: str
    publication_year: int
    citing_year: int
    citations: int

    def __post_init__(self):
        if self.publication_year > self.citing_year:
            raise ValidationError("publication_year after citing_year")
        if self.citations < 0:
            raise ValidationError(f"negative citations ({self.citations})")


@dataclass(frozen=True)
class Panel:
    """Immutable set of journal-year records, unique on (journal_id, year).

    Build with :meth:`from_records`; records are kept sorted by
    (year, journal_id).
    """

    records: tuple[JournalYearRecord, ...] = ()
    years: tuple[int, ...] = ()
    _index: dict = field(default_factory=dict, repr=False, compare=False)
    _by_journal: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_records(cls, records: Iterable[JournalYearRecord]) -> "Panel":
        index = {}
        for rec in records:
            if rec.key in index:
                raise DuplicateKeyError(f"duplicate key {rec.key}")
            index[rec.key] = rec
        ordered = tuple(sorted(index.values(), key=lambda r: (r.year, r.journal_id)))
        years = tuple(sorted({r.year for r in ordered}))
        by_journal = {}
        for rec in ordered:
            by_journal.setdefault(rec.journal_id, []).append(rec)
        by_journal = {k: tuple(v) for k, v in by_journal.items()}
        return cls(records=ordered, years=years, _index=index, _by_journal=by_journal)

    def __len__(self):
        return len(self.records)

    def get(self, journal_id, year):
        return self._index.get((journal_id, year))

    def journal_records(self, journal_id):
        """Records of one journal in year order (empty when absent)."""
        return self._by_journal.get(journal_id, ())

    @property
    def journals(self):
        return tuple(sorted(self._by_journal))

    @property
    def zero_publication_records(self):
        """Journal-years where N(T) = 0 and the citation rate is undefined."""
        return tuple(r for r in self.records if r.publications == 0)


def _open_text(source):
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, str):
        return io.StringIO(source)
    data = source.read()
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    return io.StringIO(data)


def _int_field(value, name, line):
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"non-integer {name} {value!r}", line) from None


def parse_panel(source) -> Panel:
    """Parse panel CSV from bytes, text or a file object.

    Header: ``journal_id,year,citations,articles[,impact_factor]``.  An empty
    ``impact_factor`` cell leaves the record's impact factor absent.
    """
    reader = csv.reader(_open_text(source))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("missing header", 1) from None
    if tuple(header) not in (PANEL_HEADER[:4], PANEL_HEADER):
        raise ParseError(f"unexpected header {header}", 1)
    width = len(header)

    records = []
    seen = {}
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != width:
            raise ParseError(f"expected {width} columns, got {len(row)}", line)
        journal_id = row[0].strip()
        year = _int_field(row[1], "year", line)
        n = _int_field(row[2], "citations", line)
        big_n = _int_field(row[3], "articles", line)
        impact = None
        if width == 5 and row[4].strip():
            try:
                impact = float(row[4])
            except ValueError:
                raise ParseError(f"non-numeric impact_factor {row[4]!r}", line) from None
        try:
            rec = JournalYearRecord(journal_id, year, n, big_n, impact)
        except ValidationError as exc:
            raise ValidationError(str(exc), line) from None
        if rec.key in seen:
            raise DuplicateKeyError(f"duplicate key {rec.key} (first on line {seen[rec.key]})", line)
        seen[rec.key] = line
        records.append(rec)
    return Panel.from_records(records)


def panel_to_csv(panel: Panel) -> str:
    """Serialise with full float precision so parse_panel(panel_to_csv(p)) == p."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PANEL_HEADER)
    for r in panel.records:
        impact = "" if r.reported_impact_factor is None else repr(float(r.reported_impact_factor))
        writer.writerow([r.journal_id, r.year, r.annual_citations, r.publications, impact])
    return buf.getvalue()


def parse_paper_citations(source) -> list[PaperCitationRecord]:
    """Parse per-paper CSV ``journal_id,publication_year,citing_year,citations``."""
    reader = csv.reader(_open_text(source))
    try:
        header = tuple(h.strip() for h in next(reader))
    except StopIteration:
        raise ParseError("missing header", 1) from None
    if header != PAPER_HEADER:
        raise ParseError(f"unexpected header {list(header)}", 1)
    out = []
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 columns, got {len(row)}", line)
        values = [_int_field(v, name, line) for v, name in zip(row[1:], PAPER_HEADER[1:])]
        try:
            out.append(PaperCitationRecord(row[0].strip(), *values))
        except ValidationError as exc:
            raise ValidationError(str(exc), line) from None
    return out


def year_slice(panel: Panel, year: int) -> list[JournalYearRecord]:
    return [r for r in panel.records if r.year == year]


def journal_series(panel: Panel, journal_id: str, field: str = "n") -> list[tuple[int, object]]:
    """Year-sorted ``(year, value)`` pairs of one field for one journal.

    Years where the field is absent (a missing impact factor) are skipped.
    """
    try:
        attr = FIELDS[field]
    except KeyError:
        raise ValueError(f"unknown field selector {field!r}") from None
    recs = panel.journal_records(journal_id)
    if not recs:
        raise NotFoundError(f"journal {journal_id!r} not in panel")
    out = []
    for r in recs:
        value = getattr(r, attr)
        if value is not None:
            out.append((r.year, value))
    return out
