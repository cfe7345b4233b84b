"""Panel construction: CSV loading, merging, filtering, serialisation."""

import json

import numpy as np
import pytest

from collabnet.errors import (MergeCollisionError, NegativeCountError,
                              SchemaError, TooFewCountriesError,
                              UnknownCountryError)
from collabnet.panel import (DEFAULT_PERIODS, PeriodSpec,
                             filter_min_production, load_panel,
                             merge_entities, read_dataset_json,
                             write_dataset_json)
from conftest import build_panel

PERIODS = (PeriodSpec("1990s", 1990, 1999), PeriodSpec("2000s", 2000, 2009))


def write_inputs(tmp_path, publications, collaborations, metadata):
    paths = []
    for name, text in (("publications.csv", publications),
                       ("collaborations.csv", collaborations),
                       ("metadata.csv", metadata)):
        p = tmp_path / name
        p.write_text(text)
        paths.append(p)
    return paths


BASIC_META = "country_code,name,region\nDE,Germany,EU\nFR,France,EU\nJP,Japan,AS\n"


def basic_inputs(tmp_path):
    return write_inputs(
        tmp_path,
        "year,country_code,count\n"
        "1990,DE,10\n1991,DE,5\n2001,DE,7\n"
        "1990,FR,4\n2000,FR,6\n"
        "1995,JP,8\n2005,JP,9\n",
        "year,country_a,country_b,count\n"
        "1990,DE,FR,3\n1991,FR,DE,2\n"
        "2001,DE,JP,4\n"
        "1995,JP,FR,1\n",
        BASIC_META)


def test_load_panel_buckets_years_and_sums_orientations(tmp_path):
    pubs, colls, meta = basic_inputs(tmp_path)
    ds = load_panel(pubs, colls, meta, periods=PERIODS)
    assert ds.codes == ("DE", "FR", "JP")
    assert ds.period_labels == ("1990s", "2000s")
    np.testing.assert_array_equal(ds.publications,
                                  [[15, 7], [4, 6], [8, 9]])
    first = ds.collaboration_matrix("1990s")
    # DE-FR rows 3 and 2 arrive in opposite orientations
    assert first[0, 1] == 5 and first[1, 0] == 5
    assert first[1, 2] == 1
    second = ds.collaboration_matrix("2000s")
    assert second[0, 2] == 4
    assert (np.diagonal(ds.collaborations, axis1=1, axis2=2) == 0).all()


def test_load_panel_counts_duplicates_and_dropped_years(tmp_path):
    pubs, colls, meta = write_inputs(
        tmp_path,
        "year,country_code,count\n"
        "1990,DE,10\n1990,DE,3\n1890,DE,99\n1995,FR,1\n1995,JP,1\n",
        "year,country_a,country_b,count\n"
        "1990,DE,FR,1\n1990,DE,FR,2\n2050,DE,FR,7\n",
        BASIC_META)
    ds = load_panel(pubs, colls, meta, periods=PERIODS)
    assert ds.publications[0, 0] == 13
    assert ds.collaboration_matrix("1990s")[0, 1] == 3
    assert ds.report.duplicate_publication_rows == 1
    assert ds.report.duplicate_collaboration_rows == 1
    assert ds.report.dropped_year_rows == 2
    assert ds.report.warnings


def test_load_panel_rejects_self_pairs_and_unknown_codes(tmp_path):
    pubs, colls, meta = write_inputs(
        tmp_path,
        "year,country_code,count\n1990,DE,1\n",
        "year,country_a,country_b,count\n1990,DE,DE,2\n",
        BASIC_META)
    with pytest.raises(SchemaError):
        load_panel(pubs, colls, meta, periods=PERIODS)

    pubs, colls, meta = write_inputs(
        tmp_path,
        "year,country_code,count\n1990,XX,1\n",
        "year,country_a,country_b,count\n",
        BASIC_META)
    with pytest.raises(UnknownCountryError):
        load_panel(pubs, colls, meta, periods=PERIODS)


def test_load_panel_rejects_negative_counts(tmp_path):
    pubs, colls, meta = write_inputs(
        tmp_path,
        "year,country_code,count\n1990,DE,-1\n",
        "year,country_a,country_b,count\n",
        BASIC_META)
    with pytest.raises(NegativeCountError):
        load_panel(pubs, colls, meta, periods=PERIODS)


def test_default_periods_cover_1970_to_2018():
    assert len(DEFAULT_PERIODS) == 10
    assert DEFAULT_PERIODS[0].start_year == 1970
    assert DEFAULT_PERIODS[-1] == PeriodSpec("2015-2018", 2015, 2018)
    # contiguous, no gaps
    for a, b in zip(DEFAULT_PERIODS, DEFAULT_PERIODS[1:]):
        assert b.start_year == a.end_year + 1


def test_merge_entities_sums_rows_and_drops_intra_group_ties():
    counts = np.array([
        [0, 5, 2],
        [5, 0, 3],
        [2, 3, 0],
    ])
    ds = build_panel([counts], ["EU", "EU", "AS"],
                     np.array([[10], [20], [30]]))
    merged = merge_entities(ds, {"C0": "C1", "C1": "C1"})
    assert merged.codes == ("C1", "C2")
    # C0-C2 and C1-C2 collapse onto the merged row
    np.testing.assert_array_equal(merged.collaboration_matrix("P1"),
                                  [[0, 5], [5, 0]])
    np.testing.assert_array_equal(merged.publications, [[30], [30]])
    # the 5 C0-C1 ties become diagonal and are dropped
    assert merged.report.intra_group_dropped == 5


def test_merge_requires_existing_targets_to_self_map():
    ds = build_panel([np.zeros((3, 3), dtype=int)], ["EU", "EU", "AS"])
    with pytest.raises(MergeCollisionError):
        merge_entities(ds, {"C0": "C1"})  # C1 exists but is not self-mapped
    with pytest.raises(UnknownCountryError):
        merge_entities(ds, {"C9": "C0", "C0": "C0"})


def test_filter_min_production_requires_every_period_above_threshold():
    pubs = np.array([[150, 150], [150, 100], [150, 101]])
    ds = build_panel([np.zeros((3, 3), dtype=int)] * 2, ["EU", "EU", "AS"],
                     pubs)
    kept = filter_min_production(ds, 100)
    # strictly greater in *all* periods
    assert kept.codes == ("C0", "C2")
    with pytest.raises(TooFewCountriesError):
        filter_min_production(ds, 149)


def test_dataset_json_round_trip(tmp_path, two_block_panel):
    path = tmp_path / "dataset.json"
    write_dataset_json(two_block_panel, path)
    ds = read_dataset_json(path)
    assert ds.codes == two_block_panel.codes
    assert ds.period_labels == two_block_panel.period_labels
    np.testing.assert_array_equal(ds.publications, two_block_panel.publications)
    np.testing.assert_array_equal(ds.collaborations,
                                  two_block_panel.collaborations)
    doc = json.loads(path.read_text())
    assert doc["format"] == "collabnet-panel"


def test_panel_validation_rejects_asymmetry():
    counts = np.zeros((2, 2), dtype=int)
    counts[0, 1] = 3  # transpose left at 0
    with pytest.raises(SchemaError):
        build_panel([counts], ["EU", "AS"])


def test_metadata_must_be_complete(tmp_path):
    pubs, colls, meta = write_inputs(
        tmp_path,
        "year,country_code,count\n1990,DE,1\n",
        "year,country_a,country_b,count\n",
        "country_code,name,region\nDE,Germany,EU\nDE,Germany again,EU\n")
    with pytest.raises(SchemaError):
        load_panel(pubs, colls, meta, periods=PERIODS)
