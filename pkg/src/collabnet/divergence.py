"""Divergence of observed partner distributions from the configuration null.

For each country the smoothed partner distribution is compared, via
Kullback-Leibler divergence, with the distribution the configuration model
would produce from the same strengths. Smoothing is added to both sides
before normalising so the supports match.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EmptyNetworkError
from .panel import PanelDataset

__all__ = ["KLRecord", "kl_row", "kl_divergence_to_config", "region_mean_kl"]


@dataclass(frozen=True)
class KLRecord:
    country: str
    region: str
    period: str
    kl: float
    smoothing: float


def kl_row(counts: np.ndarray, i: int, smoothing: float = 1.0) -> float:
    """KL divergence of country i's partner distribution from the null.

    Observed side: counts[i, j] + smoothing over j != i, normalised.
    Null side: k_i k_j / 2m + smoothing over j != i, normalised.
    Terms with zero observed mass contribute nothing. NaN for an isolated
    country (strength zero).
    """
    if smoothing < 0:
        raise ConfigError("smoothing must be >= 0")
    counts = np.asarray(counts, dtype=np.float64)
    strengths = counts.sum(axis=1)
    two_m = strengths.sum()
    if two_m == 0:
        raise EmptyNetworkError("no collaborations at all")
    if strengths[i] == 0:
        return math.nan
    others = np.arange(counts.shape[0]) != i
    obs = counts[i, others] + smoothing
    null = strengths[i] * strengths[others] / two_m + smoothing
    p = obs / obs.sum()
    q = null / null.sum()
    pos = p > 0
    return float(np.sum(p[pos] * np.log(p[pos] / q[pos])))


def kl_divergence_to_config(dataset: PanelDataset, period: str,
                            smoothing: float = 1.0) -> list[KLRecord]:
    """Per-country divergence records for one period."""
    counts = dataset.collaboration_matrix(period)
    return [
        KLRecord(country=c.code, region=c.region, period=period,
                 kl=kl_row(counts, i, smoothing), smoothing=smoothing)
        for i, c in enumerate(dataset.countries)
    ]


def region_mean_kl(records: list[KLRecord], regions: list[str],
                   periods: list[str]) -> dict[str, dict[str, float]]:
    """Region means of defined divergences; empty cells omitted."""
    cells: dict[tuple[str, str], list[float]] = {}
    for rec in records:
        if not math.isnan(rec.kl):
            cells.setdefault((rec.region, rec.period), []).append(rec.kl)
    out: dict[str, dict[str, float]] = {}
    for region in regions:
        series = {p: sum(v) / len(v)
                  for p in periods if (v := cells.get((region, p)))}
        if series:
            out[region] = series
    return out
