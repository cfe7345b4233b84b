"""Country-by-period panel of publication and collaboration counts.

The panel is built from three CSV tables (yearly publications, yearly
pairwise collaborations, country metadata), bucketed into multi-year
periods. Counts are summed within a period; the final period may span
fewer years and is deliberately not normalised per year.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from .errors import (
    MergeCollisionError,
    NegativeCountError,
    SchemaError,
    TooFewCountriesError,
    UnknownCountryError,
    UnknownRegionError,
)

logger = logging.getLogger(__name__)

__all__ = [
    "CountryRecord",
    "PeriodSpec",
    "LoadReport",
    "PanelDataset",
    "DEFAULT_PERIODS",
    "load_panel",
    "merge_entities",
    "filter_min_production",
    "read_dataset_json",
    "write_dataset_json",
]


@dataclass(frozen=True)
class CountryRecord:
    code: str
    name: str
    region: str


@dataclass(frozen=True)
class PeriodSpec:
    label: str
    start_year: int
    end_year: int

    def __post_init__(self):
        if self.start_year > self.end_year:
            raise SchemaError(f"period {self.label}: start_year > end_year")

    def contains(self, year: int) -> bool:
        return self.start_year <= year <= self.end_year


# Five-year buckets 1970-2014 plus a final shorter bucket.
DEFAULT_PERIODS: tuple[PeriodSpec, ...] = tuple(
    [PeriodSpec(f"{y}-{y + 4}", y, y + 4) for y in range(1970, 2015, 5)]
    + [PeriodSpec("2015-2018", 2015, 2018)]
)


@dataclass(frozen=True)
class LoadReport:
    """What happened while assembling a panel; checked by tests, logged too."""

    duplicate_publication_rows: int = 0
    duplicate_collaboration_rows: int = 0
    dropped_year_rows: int = 0
    intra_group_dropped: int = 0
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "duplicate_publication_rows": self.duplicate_publication_rows,
            "duplicate_collaboration_rows": self.duplicate_collaboration_rows,
            "dropped_year_rows": self.dropped_year_rows,
            "intra_group_dropped": self.intra_group_dropped,
            "warnings": list(self.warnings),
        }


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


def _validate_periods(periods: Sequence[PeriodSpec]) -> tuple[PeriodSpec, ...]:
    periods = tuple(periods)
    if not periods:
        raise SchemaError("at least one period is required")
    labels = [p.label for p in periods]
    if len(set(labels)) != len(labels):
        raise SchemaError("duplicate period labels")
    for prev, cur in zip(periods, periods[1:]):
        if cur.start_year <= prev.end_year:
            raise SchemaError(
                f"periods {prev.label} and {cur.label} overlap or are out of order")
    return periods


@dataclass(frozen=True, eq=False)
class PanelDataset:
    """Immutable country-by-period panel.

    ``publications`` is (n_countries, n_periods); ``collaborations`` is
    (n_periods, n_countries, n_countries), symmetric with zero diagonal.
    Arrays are read-only views shared by every derived computation.
    """

    countries: tuple[CountryRecord, ...]
    periods: tuple[PeriodSpec, ...]
    publications: np.ndarray
    collaborations: np.ndarray
    region_set: tuple[str, ...] = ()
    report: LoadReport | None = field(default=None, repr=False)

    def __post_init__(self):
        periods = _validate_periods(self.periods)
        object.__setattr__(self, "periods", periods)
        codes = [c.code for c in self.countries]
        if len(set(codes)) != len(codes):
            raise SchemaError("duplicate country codes")
        n, t = len(self.countries), len(self.periods)
        pubs = np.asarray(self.publications, dtype=np.int64)
        coll = np.asarray(self.collaborations, dtype=np.int64)
        if pubs.shape != (n, t):
            raise SchemaError(f"publications shape {pubs.shape} != {(n, t)}")
        if coll.shape != (t, n, n):
            raise SchemaError(f"collaborations shape {coll.shape} != {(t, n, n)}")
        if (pubs < 0).any() or (coll < 0).any():
            raise NegativeCountError("counts must be non-negative")
        if (coll != coll.transpose(0, 2, 1)).any():
            raise SchemaError("collaboration matrices must be symmetric")
        if any(np.diagonal(coll[k]).any() for k in range(t)):
            raise SchemaError("collaboration matrices must have zero diagonal")
        region_set = tuple(self.region_set) or tuple(
            sorted({c.region for c in self.countries}))
        unknown = {c.region for c in self.countries} - set(region_set)
        if unknown:
            raise UnknownRegionError(f"regions not in declared set: {sorted(unknown)}")
        object.__setattr__(self, "region_set", region_set)
        object.__setattr__(self, "publications", _readonly(pubs))
        object.__setattr__(self, "collaborations", _readonly(coll))

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(c.code for c in self.countries)

    @property
    def n_countries(self) -> int:
        return len(self.countries)

    @property
    def period_labels(self) -> tuple[str, ...]:
        return tuple(p.label for p in self.periods)

    def period_index(self, label: str) -> int:
        for i, p in enumerate(self.periods):
            if p.label == label:
                return i
        raise SchemaError(f"unknown period {label!r}")

    def country_index(self, code: str) -> int:
        try:
            return self.codes.index(code)
        except ValueError:
            raise UnknownCountryError(f"unknown country {code!r}") from None

    def region_of(self, code: str) -> str:
        return self.countries[self.country_index(code)].region

    def region_members(self, region: str) -> tuple[str, ...]:
        return tuple(c.code for c in self.countries if c.region == region)

    def collaboration_matrix(self, period: str) -> np.ndarray:
        return self.collaborations[self.period_index(period)]

    def to_json_dict(self) -> dict:
        return {
            "format": "collabnet-panel",
            "version": 1,
            "countries": [
                {"code": c.code, "name": c.name, "region": c.region}
                for c in self.countries
            ],
            "region_set": list(self.region_set),
            "periods": [
                {"label": p.label, "start_year": p.start_year, "end_year": p.end_year}
                for p in self.periods
            ],
            "publications": self.publications.tolist(),
            "collaborations": {
                p.label: self.collaborations[k].tolist()
                for k, p in enumerate(self.periods)
            },
            "report": self.report.to_dict() if self.report else None,
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "PanelDataset":
        if doc.get("format") != "collabnet-panel":
            raise SchemaError("not a collabnet panel document")
        periods = tuple(
            PeriodSpec(p["label"], int(p["start_year"]), int(p["end_year"]))
            for p in doc["periods"])
        countries = tuple(
            CountryRecord(c["code"], c["name"], c["region"])
            for c in doc["countries"])
        coll = np.stack([
            np.asarray(doc["collaborations"][p.label], dtype=np.int64)
            for p in periods
        ]) if periods else np.zeros((0, len(countries), len(countries)), np.int64)
        rep = doc.get("report")
        report = None
        if rep:
            report = LoadReport(
                duplicate_publication_rows=rep.get("duplicate_publication_rows", 0),
                duplicate_collaboration_rows=rep.get("duplicate_collaboration_rows", 0),
                dropped_year_rows=rep.get("dropped_year_rows", 0),
                intra_group_dropped=rep.get("intra_group_dropped", 0),
                warnings=tuple(rep.get("warnings", ())),
            )
        return cls(
            countries=countries,
            periods=periods,
            publications=np.asarray(doc["publications"], dtype=np.int64),
            collaborations=coll,
            region_set=tuple(doc.get("region_set", ())),
            report=report,
        )


def write_dataset_json(dataset: PanelDataset, path: str | Path) -> None:
    text = json.dumps(dataset.to_json_dict(), sort_keys=True, indent=2,
                      ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def read_dataset_json(path: str | Path) -> PanelDataset:
    with open(path, encoding="utf-8") as fh:
        return PanelDataset.from_json_dict(json.load(fh))


def _read_table(path: str | Path, columns: Sequence[str],
                string_cols: Sequence[str]) -> pd.DataFrame:
    df = pd.read_csv(path, dtype={c: str for c in string_cols})
    missing = set(columns) - set(df.columns)
    if missing:
        raise SchemaError(f"{path}: missing columns {sorted(missing)}")
    return df[list(columns)]


def _check_counts(df: pd.DataFrame, path: str | Path) -> np.ndarray:
    counts = pd.to_numeric(df["count"], errors="coerce")
    if counts.isna().any():
        raise SchemaError(f"{path}: non-numeric count values")
    if (counts % 1 != 0).any():
        raise SchemaError(f"{path}: counts must be integers")
    if (counts < 0).any():
        raise NegativeCountError(f"{path}: negative counts")
    return counts.astype(np.int64).to_numpy()


def _bucket_years(years: pd.Series, periods: Sequence[PeriodSpec]) -> np.ndarray:
    """Map years to period indices; -1 for years outside every period."""
    years = pd.to_numeric(years, errors="coerce")
    if years.isna().any():
        raise SchemaError("non-numeric year values")
    idx = np.full(len(years), -1, dtype=np.int64)
    yr = years.astype(np.int64).to_numpy()
    for k, p in enumerate(periods):
        idx[(yr >= p.start_year) & (yr <= p.end_year)] = k
    return idx


def load_panel(publications_file: str | Path,
               collaborations_file: str | Path,
               metadata_file: str | Path,
               periods: Sequence[PeriodSpec] = DEFAULT_PERIODS,
               regions: Sequence[str] | None = None) -> PanelDataset:
    """Assemble a :class:`PanelDataset` from the three CSV tables.

    Duplicate (year, country) and (year, pair) rows are summed and counted
    in the dataset's report; unordered pair orientations are summed; years
    outside every period are dropped with a warning. Country codes missing
    from the metadata table are rejected.
    """
    periods = _validate_periods(periods)
    meta = _read_table(metadata_file, ("country_code", "name", "region"),
                       ("country_code", "name", "region"))
    if meta["country_code"].duplicated().any():
        dupes = meta.loc[meta["country_code"].duplicated(), "country_code"]
        raise SchemaError(f"{metadata_file}: duplicate metadata rows for "
                          f"{sorted(set(dupes))}")
    if meta.isna().any().any():
        raise SchemaError(f"{metadata_file}: empty fields")
    countries = tuple(CountryRecord(r.country_code, r.name, r.region)
                      for r in meta.itertuples(index=False))
    if regions is not None:
        region_set = tuple(regions)
        bad = {c.region for c in countries} - set(region_set)
        if bad:
            raise UnknownRegionError(f"regions not in declared set: {sorted(bad)}")
    else:
        region_set = tuple(sorted({c.region for c in countries}))
    code_index = {c.code: i for i, c in enumerate(countries)}
    n, t = len(countries), len(periods)
    warnings: list[str] = []
    dropped_year_rows = 0

    pubs_df = _read_table(publications_file, ("year", "country_code", "count"),
                          ("country_code",))
    pub_counts = _check_counts(pubs_df, publications_file)
    unknown = set(pubs_df["country_code"]) - set(code_index)
    if unknown:
        raise UnknownCountryError(
            f"{publications_file}: codes without metadata: {sorted(unknown)}")
    pub_period = _bucket_years(pubs_df["year"], periods)
    outside = pub_period < 0
    if outside.any():
        dropped_year_rows += int(outside.sum())
        years = sorted(set(pubs_df.loc[outside, "year"].astype(int)))
        msg = f"dropped {int(outside.sum())} publication rows for years outside all periods: {years}"
        warnings.append(msg)
        logger.warning(msg)
    keys = pd.DataFrame({
        "period": pub_period[~outside],
        "country": [code_index[c] for c in pubs_df.loc[~outside, "country_code"]],
        "count": pub_counts[~outside],
    })
    dup_pub = int(len(keys) - len(keys.groupby(["period", "country"], sort=False)))
    publications = np.zeros((n, t), dtype=np.int64)
    grouped = keys.groupby(["period", "country"], sort=False)["count"].sum()
    for (k, i), v in grouped.items():
        publications[i, k] = v

    coll_df = _read_table(collaborations_file,
                          ("year", "country_a", "country_b", "count"),
                          ("country_a", "country_b"))
    coll_counts = _check_counts(coll_df, collaborations_file)
    unknown = (set(coll_df["country_a"]) | set(coll_df["country_b"])) - set(code_index)
    if unknown:
        raise UnknownCountryError(
            f"{collaborations_file}: codes without metadata: {sorted(unknown)}")
    if (coll_df["country_a"] == coll_df["country_b"]).any():
        raise SchemaError(f"{collaborations_file}: self-collaboration rows")
    coll_period = _bucket_years(coll_df["year"], periods)
    outside = coll_period < 0
    if outside.any():
        dropped_year_rows += int(outside.sum())
        years = sorted(set(coll_df.loc[outside, "year"].astype(int)))
        msg = f"dropped {int(outside.sum())} collaboration rows for years outside all periods: {years}"
        warnings.append(msg)
        logger.warning(msg)
    ia = np.array([code_index[c] for c in coll_df["country_a"]], dtype=np.int64)
    ib = np.array([code_index[c] for c in coll_df["country_b"]], dtype=np.int64)
    lo, hi = np.minimum(ia, ib), np.maximum(ia, ib)  # orientations summed
    keys = pd.DataFrame({
        "period": coll_period[~outside],
        "lo": lo[~outside],
        "hi": hi[~outside],
        "count": coll_counts[~outside],
    })
    dup_coll = int(len(keys) - len(keys.groupby(["period", "lo", "hi"], sort=False)))
    collaborations = np.zeros((t, n, n), dtype=np.int64)
    grouped = keys.groupby(["period", "lo", "hi"], sort=False)["count"].sum()
    for (k, i, j), v in grouped.items():
        collaborations[k, i, j] += v
        collaborations[k, j, i] += v

    report = LoadReport(
        duplicate_publication_rows=dup_pub,
        duplicate_collaboration_rows=dup_coll,
        dropped_year_rows=dropped_year_rows,
        warnings=tuple(warnings),
    )
    return PanelDataset(countries=countries, periods=periods,
                        publications=publications, collaborations=collaborations,
                        region_set=region_set, report=report)


def merge_entities(dataset: PanelDataset,
                   merge_map: Mapping[str, str]) -> PanelDataset:
    """Collapse groups of country codes into single panel nodes.

    Counts are summed; ties internal to a merged group become diagonal
    entries, which are dropped and counted in the report. A merge target
    must itself be a panel country and must not collide with a country
    outside its own group.
    """
    codes = dataset.codes
    unknown = set(merge_map) - set(codes)
    if unknown:
        raise UnknownCountryError(f"merge map references unknown codes: {sorted(unknown)}")
    targets = set(merge_map.values())
    for tgt in sorted(targets):
        if tgt not in codes:
            raise UnknownCountryError(f"merge target {tgt!r} has no metadata record")
        if merge_map.get(tgt) != tgt:
            # absorbing a country that is not explicitly part of the group
            raise MergeCollisionError(
                f"merge target {tgt!r} collides with an existing distinct country "
                "(map it to itself to include it in the group)")
    full_map = {c: merge_map.get(c, c) for c in codes}

    kept = [c for c in codes if full_map[c] == c]
    new_index = {c: i for i, c in enumerate(kept)}
    group = np.array([new_index[full_map[c]] for c in codes], dtype=np.int64)
    n_new, t = len(kept), len(dataset.periods)

    publications = np.zeros((n_new, t), dtype=np.int64)
    np.add.at(publications, group, dataset.publications)
    collaborations = np.zeros((t, n_new, n_new), dtype=np.int64)
    intra_dropped = 0
    for k in range(t):
        merged = np.zeros((n_new, n_new), dtype=np.int64)
        np.add.at(merged, (group[:, None], group[None, :]), dataset.collaborations[k])
        diag = np.diagonal(merged).copy()
        intra_dropped += int(diag.sum()) // 2  # both orientations were summed
        np.fill_diagonal(merged, 0)
        collaborations[k] = merged
    if intra_dropped:
        logger.warning("dropped %d intra-group collaboration ties", intra_dropped)

    countries = tuple(c for c in dataset.countries if full_map[c.code] == c.code)
    base = dataset.report or LoadReport()
    report = replace(base, intra_group_dropped=base.intra_group_dropped + intra_dropped)
    return PanelDataset(countries=countries, periods=dataset.periods,
                        publications=publications, collaborations=collaborations,
                        region_set=dataset.region_set, report=report)


def filter_min_production(dataset: PanelDataset, threshold: int = 100) -> PanelDataset:
    """Keep countries with strictly more than ``threshold`` publications in
    every period; the surviving panel must have at least two countries."""
    keep = (dataset.publications > threshold).all(axis=1)
    if int(keep.sum()) < 2:
        raise TooFewCountriesError(
            f"filter at threshold {threshold} leaves {int(keep.sum())} countries")
    idx = np.flatnonzero(keep)
    countries = tuple(dataset.countries[i] for i in idx)
    return PanelDataset(
        countries=countries,
        periods=dataset.periods,
        publications=dataset.publications[idx],
        collaborations=dataset.collaborations[:, idx][:, :, idx],
        region_set=dataset.region_set,
        report=dataset.report,
    )
