"""Journal citation indices and their cross-index, temporal and distributional statistics."""

__version__ = "0.1.0"

from .dataset import JournalYearRecord, Panel, PaperCitationRecord, journal_series, parse_panel, year_slice
from .indices import ImpactWindow, citation_rate, citation_rate_windowed, impact_factor, index_table
from .correlation import auto_correlation, auto_correlation_table, cross_index_correlation, pearson
from .binfit import fit_piecewise_power_law, fit_power_law, fit_stretched_log, log_bin
from .distributions import (
    collapse_distance,
    empirical_pdf,
    fit_lognormal,
    fit_power_tail,
    scale_collapse,
    xi_from_tail_exponents,
)
from .synth import SynthSpec, generate, generate_two_regime
