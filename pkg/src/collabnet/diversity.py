"""Collaboration entropy and its within/outside-region decomposition.

For each country the distribution of its collaborations over partners is
summarised by a Shannon entropy normalised to [0, 1] by log(N - 1), the
maximum attainable with N - 1 possible partners. Splitting the sum over
same-region and other-region partners decomposes the entropy exactly;
collaboration strength is split the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError
from .panel import PanelDataset

__all__ = [
    "EntropyRecord",
    "collab_share",
    "collaboration_entropy",
    "entropy_decomposition",
    "within_region_entropy_share",
    "strength_decomposition",
    "entropy_table",
    "region_mean_series",
]


@dataclass(frozen=True)
class EntropyRecord:
    """Per country and period: entropy split and strength split.

    Undefined values (isolated country, empty denominator) are NaN and are
    skipped by the aggregation helpers.
    """

    country: str
    region: str
    period: str
    ce: float
    ce_in: float
    ce_out: float
    share_in: float
    d_in: float
    d_out: float
    d_prop: float


def collab_share(dataset: PanelDataset, period: str) -> np.ndarray:
    """Row-normalised collaboration matrix p_ij for one period.

    Rows of isolated countries (no collaborations at all) are NaN.
    """
    counts = dataset.collaboration_matrix(period).astype(np.float64)
    totals = counts.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / totals[:, None]
    p[totals == 0] = np.nan
    return p


def _entropy_sum(p: np.ndarray) -> float:
    """Sum of -p log p over given entries, with 0 log 0 = 0."""
    pos = p[p > 0]
    return float(-(pos * np.log(pos)).sum())


def collaboration_entropy(p_row: np.ndarray, n_countries: int) -> float:
    """Normalised entropy of one country's partner distribution.

    ``n_countries`` is the panel size N; the normaliser log(N - 1) makes
    the uniform distribution over the N - 1 possible partners score 1.
    Returns NaN for an undefined (NaN) row.
    """
    if n_countries < 3:
        raise ConfigError("entropy normaliser needs at least 3 countries")
    p_row = np.asarray(p_row, dtype=np.float64)
    if np.isnan(p_row).any():
        return math.nan
    return _entropy_sum(p_row) / math.log(n_countries - 1)


def entropy_decomposition(p_row: np.ndarray, in_mask: np.ndarray,
                          n_countries: int) -> tuple[float, float]:
    """Split the entropy sum over same-region and other-region partners.

    ``in_mask`` marks the same-region partners (the country itself must be
    False on both sides). The two parts add up to the full entropy exactly:
    they partition the terms of one sum.
    """
    if n_countries < 3:
        raise ConfigError("entropy normaliser needs at least 3 countries")
    p_row = np.asarray(p_row, dtype=np.float64)
    in_mask = np.asarray(in_mask, dtype=bool)
    if np.isnan(p_row).any():
        return math.nan, math.nan
    norm = math.log(n_countries - 1)
    ce_in = _entropy_sum(p_row[in_mask]) / norm
    ce_out = _entropy_sum(p_row[~in_mask]) / norm
    return ce_in, ce_out


def within_region_entropy_share(ce_in: float, ce_out: float) -> float:
    """Fraction of entropy contributed by same-region partners; NaN if the
    country has no entropy at all."""
    total = ce_in + ce_out
    if math.isnan(total) or total == 0:
        return math.nan
    return ce_in / total


def strength_decomposition(counts_row: np.ndarray,
                           in_mask: np.ndarray) -> tuple[float, float, float]:
    """Collaboration counts split into same-region and other-region totals,
    plus the same-region proportion (NaN for an isolated country)."""
    counts_row = np.asarray(counts_row, dtype=np.float64)
    in_mask = np.asarray(in_mask, dtype=bool)
    d_in = float(counts_row[in_mask].sum())
    d_out = float(counts_row[~in_mask].sum())
    total = d_in + d_out
    d_prop = d_in / total if total > 0 else math.nan
    return d_in, d_out, d_prop


def entropy_table(dataset: PanelDataset) -> list[EntropyRecord]:
    """Entropy and strength decomposition for every country and period."""
    n = dataset.n_countries
    codes = dataset.codes
    regions = np.array([c.region for c in dataset.countries])
    records: list[EntropyRecord] = []
    for period in dataset.period_labels:
        shares = collab_share(dataset, period)
        counts = dataset.collaboration_matrix(period)
        for i, code in enumerate(codes):
            in_mask = regions == regions[i]
            in_mask[i] = False
            ce_in, ce_out = entropy_decomposition(shares[i], in_mask, n)
            ce = collaboration_entropy(shares[i], n)
            d_in, d_out, d_prop = strength_decomposition(counts[i], in_mask)
            records.append(EntropyRecord(
                country=code, region=str(regions[i]), period=period,
                ce=ce, ce_in=ce_in, ce_out=ce_out,
                share_in=within_region_entropy_share(ce_in, ce_out),
                d_in=d_in, d_out=d_out, d_prop=d_prop,
            ))
    return records


def region_mean_series(records: Iterable[EntropyRecord], value: str,
                       regions: Sequence[str], periods: Sequence[str],
                       ) -> dict[str, dict[str, float]]:
    """Per-region mean of one record field over countries, by period.

    Countries with an undefined (NaN) value are excluded; a region-period
    cell with no defined values is omitted from the result.
    """
    sums: dict[tuple[str, str], list[float]] = {}
    for rec in records:
        v = getattr(rec, value)
        if isinstance(v, float) and math.isnan(v):
            continue
        sums.setdefault((rec.region, rec.period), []).append(float(v))
    out: dict[str, dict[str, float]] = {}
    for region in regions:
        series = {}
        for period in periods:
            vals = sums.get((region, period))
            if vals:
                series[period] = sum(vals) / len(vals)
        if series:
            out[region] = series
    return out
