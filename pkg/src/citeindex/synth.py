"""Seeded synthetic panels with known ground truth.

Cross-section of log n is normal(mu, sigma) every year, with AR(1)
persistence rho per journal:

    log n[j, 0] = mu + sigma * z
    log n[j, t] = mu + rho * (log n[j, t-1] - mu) + sigma * sqrt(1 - rho**2) * z

n is the rounded exponential; I = a * n**xi * exp(noise_level * z);
N = round(mean_N[j] * exp(publication_jitter * z)) with
log mean_N[j] ~ normal(publication_mu, publication_sigma).

Normals come from :mod:`citeindex.rng` and are consumed journal by journal:
one draw for mean_N, then per year (z_n, z_I, z_N).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .dataset import JournalYearRecord, Panel
from .errors import ValidationError
from .rng import Stream

GENERATOR = "splitmix64+box-muller-cos"


@dataclass(frozen=True)
class SynthSpec:
    n_journals: int = 5000
    n_years: int = 10
    first_year: int = 2004
    citation_mu: float = 7.0
    citation_sigma: float = 1.5
    coupling_exponent: float = 0.5
    coupling_amplitude: float = 0.04
    noise_level: float = 0.1
    publication_mu: float = 4.5
    publication_sigma: float = 1.0
    publication_jitter: float = 0.2
    yearly_persistence: float = 0.97
    seed: int = 20040101

    def __post_init__(self):
        problems = []
        if self.n_journals < 1 or self.n_years < 1:
            problems.append("n_journals and n_years must be positive")
        if not self.citation_sigma > 0:
            problems.append("citation_sigma must be > 0")
        if self.noise_level < 0 or self.publication_jitter < 0 or self.publication_sigma < 0:
            problems.append("noise levels must be >= 0")
        if not 0 <= self.yearly_persistence <= 1:
            problems.append("yearly_persistence must lie in [0, 1]")
        if not self.coupling_amplitude > 0:
            problems.append("coupling_amplitude must be > 0")
        if not 0 <= self.seed < 2**64:
            problems.append("seed must be a 64-bit unsigned integer")
        if problems:
            raise ValidationError("; ".join(problems))

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown synth spec fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass
class SynthResult:
    panel: Panel
    manifest: dict
    log_citations: np.ndarray  # latent log n, journals x years


def generate(spec: SynthSpec) -> SynthResult:
    J, T = spec.n_journals, spec.n_years
    z = Stream(spec.seed).normal((J, 1 + 3 * T))
    z_pub = z[:, 0]
    z_n = z[:, 1::3]
    z_i = z[:, 2::3]
    z_N = z[:, 3::3]

    rho = spec.yearly_persistence
    innov = spec.citation_sigma * math.sqrt(max(1.0 - rho * rho, 0.0))
    log_n = np.empty((J, T))
    log_n[:, 0] = spec.citation_mu + spec.citation_sigma * z_n[:, 0]
    for t in range(1, T):
        log_n[:, t] = spec.citation_mu + rho * (log_n[:, t - 1] - spec.citation_mu) + innov * z_n[:, t]

    n = np.rint(np.exp(log_n)).astype(np.int64)
    impact = spec.coupling_amplitude * n.astype(float) ** spec.coupling_exponent * np.exp(spec.noise_level * z_i)
    mean_pub = np.exp(spec.publication_mu + spec.publication_sigma * z_pub)
    pubs = np.rint(mean_pub[:, None] * np.exp(spec.publication_jitter * z_N)).astype(np.int64)

    width = len(str(J - 1))
    records = []
    for j in range(J):
        jid = f"J{j:0{width}d}"
        for t in range(T):
            records.append(JournalYearRecord(
                jid, spec.first_year + t, int(n[j, t]), int(pubs[j, t]), float(impact[j, t])))
    return SynthResult(Panel.from_records(records), manifest(spec), log_n)


def manifest(spec: SynthSpec) -> dict:
    """Ground truth of a generated panel."""
    return {
        "generator": GENERATOR,
        "spec": asdict(spec),
        "truth": {
            "xi_n": spec.coupling_exponent,
            "a": spec.coupling_amplitude,
            "log_n_mean": spec.citation_mu,
            "log_n_sd": spec.citation_sigma,
            "lag1_corr_log_n": spec.yearly_persistence,
            "impact_noise_sd": spec.noise_level,
        },
        "years": [spec.first_year + t for t in range(spec.n_years)],
    }


def generate_two_regime(low_exponent, high_exponent, breakpoint=50.0, n_points=5000,
                        x_range=(1.0, 5000.0), amplitude=1.0, noise_level=0.05, seed=1):
    """Scatter ``(x, y)`` from a power law whose exponent changes at ``breakpoint``.

    x is log-uniform over ``x_range``; the curve is continuous at the
    breakpoint and y carries multiplicative lognormal noise.
    """
    lo, hi = x_range
    if not 0 < lo < breakpoint < hi:
        raise ValidationError("breakpoint must lie inside x_range")
    if noise_level < 0 or amplitude <= 0:
        raise ValidationError("need noise_level >= 0 and amplitude > 0")
    stream = Stream(seed)
    u = stream.uniform(n_points)
    x = np.exp(math.log(lo) + u * (math.log(hi) - math.log(lo)))
    z = stream.normal(n_points)
    high_amp = amplitude * breakpoint ** (low_exponent - high_exponent)
    y = np.where(x < breakpoint, amplitude * x**low_exponent, high_amp * x**high_exponent)
    return x, y * np.exp(noise_level * z)
