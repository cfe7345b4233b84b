"""Full analysis pipeline: dataset to figure-data bundles plus manifest.

Bundles are named for the figure they feed (fig2_profiles, fig3_network,
fig4_entropy, fig5_communities, fig6_strength, fig7_kl). All analytical
outputs are byte-deterministic functions of the inputs, parameters, and
seed; within stages, per-period work may fan out over a thread pool
without affecting results.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .communities import adjacency_from_counts, optimise_partition
from .divergence import kl_divergence_to_config, region_mean_kl
from .diversity import entropy_table, region_mean_series
from .errors import ConfigError
from .manifest import RunManifest, sha256_file, write_json
from .panel import (DEFAULT_PERIODS, PanelDataset, PeriodSpec,
                    filter_min_production, load_panel, merge_entities,
                    write_dataset_json)
from .partition import Partition
from .partition_metrics import (ABSENT, continental_partition, jaccard_flows,
                                nmi, stability_ratio)
from .profiles import (average_prevalence, cluster_mean_series,
                       cluster_profiles, profile_distance_matrix,
                       relative_abundance)
from .significance import (collaboration_significance,
                           continental_mean_weights, export_network)
from .synth import SynthConfig, generate_panel

logger = logging.getLogger(__name__)

__all__ = ["resolve_config", "dataset_from_config", "run_pipeline",
           "write_panel_csvs", "write_planted_csv"]

DEFAULTS = {
    "min_production": 100,
    "taus": [1.0, 0.76],
    "runs": 100,
    "seed": 0,
    "significance_cutoff": 0.5,
    "max_clusters": 6,
    "kl_smoothing": 1.0,
    "color_threshold": 0.6,
    "positive_only_heatmap": False,
    "use_significance_weights": False,
}


def _write_csv(df: pd.DataFrame, path: Path, **kwargs) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, lineterminator="\n", na_rep="", **kwargs)
    return path


def _tau_tag(tau: float) -> str:
    return format(tau, "g").replace(".", "_")


def resolve_config(config: dict) -> dict:
    """Apply defaults and basic validation to a pipeline config."""
    merged = dict(DEFAULTS)
    merged.update(config)
    if "inputs" not in merged:
        raise ConfigError("config must declare an 'inputs' section")
    inputs = merged["inputs"]
    has_files = all(k in inputs
                    for k in ("publications", "collaborations", "metadata"))
    has_synth = "synthetic" in inputs
    if has_files == has_synth:
        raise ConfigError("inputs must give either the three CSV paths "
                          "or a 'synthetic' block, not both")
    for tau in merged["taus"]:
        if tau <= 0:
            raise ConfigError("taus must be > 0")
    return merged


def _periods_from_config(inputs: dict) -> tuple[PeriodSpec, ...]:
    spec = inputs.get("periods")
    if spec is None:
        return DEFAULT_PERIODS
    return tuple(PeriodSpec(p["label"], int(p["start_year"]), int(p["end_year"]))
                 for p in spec)


def dataset_from_config(config: dict, base_dir: Path,
                        manifest: RunManifest | None = None) -> PanelDataset:
    """Build the filtered panel a config describes (files or synthetic)."""
    inputs = config["inputs"]
    if "synthetic" in inputs:
        synth = SynthConfig.from_json_dict(inputs["synthetic"])
        dataset, _ = generate_panel(synth)
        if manifest is not None:
            import hashlib
            from .manifest import canonical_json
            digest = hashlib.sha256(
                canonical_json(synth.to_json_dict()).encode()).hexdigest()
            manifest.input_digests["synthetic_config"] = digest
    else:
        paths = {k: (base_dir / inputs[k]) for k in
                 ("publications", "collaborations", "metadata")}
        dataset = load_panel(paths["publications"], paths["collaborations"],
                             paths["metadata"],
                             periods=_periods_from_config(inputs),
                             regions=inputs.get("regions"))
        if manifest is not None:
            for k, p in paths.items():
                manifest.input_digests[k] = sha256_file(p)
        merge_path = inputs.get("merge_map")
        if merge_path:
            merge_path = base_dir / merge_path
            with open(merge_path, encoding="utf-8") as fh:
                merge_map = json.load(fh)
            dataset = merge_entities(dataset, merge_map)
            if manifest is not None:
                manifest.input_digests["merge_map"] = sha256_file(merge_path)
    return filter_min_production(dataset, config["min_production"])


def _profiles_stage(dataset: PanelDataset, config: dict, out: Path) -> list[Path]:
    r1 = relative_abundance(dataset)
    r2 = average_prevalence(dataset)
    clustering = cluster_profiles(r2, config["max_clusters"])
    files = []
    for mat, name in ((r1, "relative_abundance"), (r2, "average_prevalence")):
        df = pd.DataFrame(mat.values, columns=list(mat.periods))
        df.insert(0, "country", list(mat.countries))
        files.append(_write_csv(df, out / f"{name}.csv"))
    dist = profile_distance_matrix(r2)
    df = pd.DataFrame(dist, columns=list(r2.countries))
    df.insert(0, "country", list(r2.countries))
    files.append(_write_csv(df, out / "distance_matrix.csv"))
    df = pd.DataFrame({"country": list(r2.countries),
                       "cluster": [clustering.labels[c] for c in r2.countries]})
    files.append(_write_csv(df, out / "clusters.csv"))
    doc = {
        "linkage": clustering.linkage,
        "threshold_r": clustering.threshold_r,
        "n_clusters": clustering.n_clusters,
        "cluster_mean_prevalence": {
            str(cid): series
            for cid, series in cluster_mean_series(r2, clustering).items()
        },
    }
    path = out / "cluster_profiles.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_json(doc, path)
    files.append(path)
    return files


def _entropy_stage(dataset: PanelDataset, out_entropy: Path,
                   out_strength: Path) -> list[Path]:
    records = entropy_table(dataset)
    files = []
    df = pd.DataFrame([{
        "country": r.country, "period": r.period, "ce": r.ce,
        "ce_in": r.ce_in, "ce_out": r.ce_out, "share_in": r.share_in,
        "d_in": r.d_in, "d_out": r.d_out, "d_prop": r.d_prop,
    } for r in records])
    files.append(_write_csv(df, out_entropy / "entropy.csv"))
    totals = {(c, p): float(dataset.collaboration_matrix(p)[i].sum())
              for p in dataset.period_labels
              for i, c in enumerate(dataset.codes)}
    scatter = pd.DataFrame([{
        "country": r.country, "region": r.region, "period": r.period,
        "ce_in": r.ce_in, "ce_out": r.ce_out,
        "total_collaborations": totals[(r.country, r.period)],
    } for r in records])
    files.append(_write_csv(scatter, out_entropy / "scatter.csv"))
    regions = list(dataset.region_set)
    periods = list(dataset.period_labels)
    path = out_entropy / "region_share_series.json"
    write_json({"measure": "share_in",
                "series": region_mean_series(records, "share_in", regions, periods)},
               path)
    files.append(path)
    strength = pd.DataFrame([{
        "country": r.country, "period": r.period,
        "d_in": r.d_in, "d_out": r.d_out, "d_prop": r.d_prop,
    } for r in records])
    files.append(_write_csv(strength, out_strength / "strength.csv"))
    path = out_strength / "region_dprop_series.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_json({"measure": "d_prop",
                "series": region_mean_series(records, "d_prop", regions, periods)},
               path)
    files.append(path)
    return files


def _network_stage(dataset: PanelDataset, config: dict, out: Path,
                   threads: int) -> list[Path]:
    cutoff = config["significance_cutoff"]

    def one_period(period: str):
        return period, collaboration_significance(dataset, period)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        networks = dict(pool.map(one_period, dataset.period_labels))
    files = []
    out.mkdir(parents=True, exist_ok=True)
    for period in dataset.period_labels:
        net = networks[period]
        path = out / f"edges_{period}.csv"
        export_network(net, dataset, path, fmt="csv", cutoff=cutoff)
        files.append(path)
        path = out / f"network_{period}.gexf"
        export_network(net, dataset, path, fmt="gexf", cutoff=cutoff)
        files.append(path)
        heat = continental_mean_weights(net, dataset,
                                        config["positive_only_heatmap"])
        path = out / f"heatmap_{period}.csv"
        heat.to_csv(path, lineterminator="\n", na_rep="", index_label="region")
        files.append(path)
    return files


def _communities_stage(dataset: PanelDataset, config: dict, out: Path,
                       seed: int, threads: int) -> list[Path]:
    taus = list(config["taus"])
    runs = config["runs"]
    periods = list(dataset.period_labels)
    use_sig = config["use_significance_weights"]
    adjacencies = {p: adjacency_from_counts(dataset, p, use_significance=use_sig)
                   for p in periods}
    continental = continental_partition(dataset)

    tasks = [(ti, pi) for ti in range(len(taus)) for pi in range(len(periods))]

    def detect(task):
        ti, pi = task
        tau, period = taus[ti], periods[pi]
        task_seed = seed + (ti * len(periods) + pi) * (runs + 1)
        result = optimise_partition(adjacencies[period], gamma=1.0 / tau,
                                    seed=task_seed, n_runs=runs,
                                    keep_run_partitions=True)
        return task, result

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = dict(pool.map(detect, tasks))

    files = []
    out.mkdir(parents=True, exist_ok=True)
    nmi_adjacent_rows = []
    nmi_continental_rows = []
    ratio_rows = []
    for ti, tau in enumerate(taus):
        tag = _tau_tag(tau)
        per_period = [results[(ti, pi)] for pi in range(len(periods))]
        rows = [{"period": period, "country": c, "community": lab}
                for period, res in zip(periods, per_period)
                for c, lab in zip(res.partition.nodes, res.partition.labels)]
        files.append(_write_csv(pd.DataFrame(rows),
                                out / f"partitions_tau{tag}.csv"))
        doc = [dict(res.to_json_dict(), period=period)
               for period, res in zip(periods, per_period)]
        path = out / f"stability_tau{tag}.json"
        write_json(doc, path)
        files.append(path)

        for pi in range(len(periods) - 1):
            a, b = per_period[pi], per_period[pi + 1]
            paired = [nmi(x, y) for x, y in
                      zip(a.run_partitions, b.run_partitions)]
            nmi_adjacent_rows.append({
                "tau": tau, "from_period": periods[pi],
                "to_period": periods[pi + 1],
                "nmi": nmi(a.partition, b.partition),
                "nmi_mean_runs": float(np.mean(paired)),
            })
        for pi, period in enumerate(periods):
            nmi_continental_rows.append({
                "tau": tau, "period": period,
                "nmi": nmi(per_period[pi].partition, continental),
            })
            ratio_rows.append({
                "tau": tau, "period": period,
                "ratio": stability_ratio(adjacencies[period],
                                         per_period[pi].partition,
                                         continental, gamma=1.0 / tau),
            })

        files.append(_sankey(out, tag, periods, per_period,
                             config["color_threshold"]))

    files.append(_write_csv(pd.DataFrame(nmi_adjacent_rows),
                            out / "nmi_adjacent.csv"))
    files.append(_write_csv(pd.DataFrame(nmi_continental_rows),
                            out / "nmi_continental.csv"))
    files.append(_write_csv(pd.DataFrame(ratio_rows),
                            out / "stability_ratio.csv"))
    return files


def _sankey(out: Path, tag: str, periods: list[str], per_period,
            color_threshold: float) -> Path:
    """Flow diagram data with colours inherited along strong overlaps."""
    colors: dict[tuple[str, int], int] = {}
    next_color = 0
    first = per_period[0].partition
    for c in range(first.n_communities):
        colors[(periods[0], c)] = next_color
        next_color += 1
    links = []
    for pi in range(len(periods) - 1):
        x = per_period[pi].partition.with_period(periods[pi])
        y = per_period[pi + 1].partition.with_period(periods[pi + 1])
        flows, inherit = jaccard_flows(x, y, color_threshold)
        for f in flows:
            links.append({
                "from_period": periods[pi],
                "from_community": "ABSENT" if f.from_community == ABSENT
                                  else f.from_community,
                "to_period": periods[pi + 1],
                "to_community": "ABSENT" if f.to_community == ABSENT
                                else f.to_community,
                "shared": f.shared,
                "jaccard": f.jaccard,
            })
        for c in range(y.n_communities):
            if c in inherit:
                colors[(periods[pi + 1], c)] = colors[(periods[pi], inherit[c])]
            else:
                colors[(periods[pi + 1], c)] = next_color
                next_color += 1
    nodes = []
    for period, res in zip(periods, per_period):
        part = res.partition
        sizes = np.bincount(part.label_array(), minlength=part.n_communities)
        for c in range(part.n_communities):
            nodes.append({"period": period, "community": c,
                          "size": int(sizes[c]),
                          "color": colors[(period, c)]})
    path = out / f"sankey_tau{tag}.json"
    write_json({"color_threshold": color_threshold,
                "nodes": nodes, "links": links}, path)
    return path


def _kl_stage(dataset: PanelDataset, config: dict, out: Path) -> list[Path]:
    smoothing = config["kl_smoothing"]
    records = []
    for period in dataset.period_labels:
        records.extend(kl_divergence_to_config(dataset, period, smoothing))
    files = []
    df = pd.DataFrame([{
        "country": r.country, "region": r.region, "period": r.period,
        "kl": r.kl, "smoothing": r.smoothing,
    } for r in records])
    files.append(_write_csv(df, out / "kl.csv"))
    path = out / "region_kl_series.json"
    write_json({"measure": "kl", "smoothing": smoothing,
                "series": region_mean_kl(records, list(dataset.region_set),
                                         list(dataset.period_labels))},
               path)
    files.append(path)
    return files


def run_pipeline(config: dict, out_dir: str | Path, base_dir: str | Path = ".",
                 seed: int | None = None, threads: int = 1) -> RunManifest:
    """Run every stage into ``out_dir`` and write manifest.json there."""
    config = resolve_config(config)
    if seed is not None:
        config["seed"] = seed
    seed = config["seed"]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(version=__version__, seed=seed, threads=threads,
                           parameters=config)
    dataset = dataset_from_config(config, Path(base_dir), manifest)
    logger.info("panel: %d countries, %d periods",
                dataset.n_countries, len(dataset.periods))

    files = []
    dataset_path = out_dir / "dataset.json"
    write_dataset_json(dataset, dataset_path)
    files.append(dataset_path)
    files += _profiles_stage(dataset, config, out_dir / "fig2_profiles")
    files += _network_stage(dataset, config, out_dir / "fig3_network", threads)
    files += _entropy_stage(dataset, out_dir / "fig4_entropy",
                            out_dir / "fig6_strength")
    files += _communities_stage(dataset, config, out_dir / "fig5_communities",
                                seed, threads)
    files += _kl_stage(dataset, config, out_dir / "fig7_kl")

    manifest.add_outputs(out_dir, files)
    manifest.write(out_dir / "manifest.json")
    return manifest


def write_panel_csvs(dataset: PanelDataset, out_dir: str | Path) -> list[Path]:
    """Emit the three standard CSVs (plus periods.json) for a panel.

    Counts are attributed to each period's start year, which round-trips
    through load_panel under the same period list.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    rows = [{"year": p.start_year, "country_code": c, "count": int(v)}
            for k, p in enumerate(dataset.periods)
            for c, v in zip(dataset.codes, dataset.publications[:, k])]
    files.append(_write_csv(pd.DataFrame(rows), out_dir / "publications.csv"))
    rows = []
    for k, p in enumerate(dataset.periods):
        mat = dataset.collaborations[k]
        for i in range(dataset.n_countries):
            for j in range(i + 1, dataset.n_countries):
                if mat[i, j]:
                    rows.append({"year": p.start_year,
                                 "country_a": dataset.codes[i],
                                 "country_b": dataset.codes[j],
                                 "count": int(mat[i, j])})
    files.append(_write_csv(pd.DataFrame(
        rows, columns=["year", "country_a", "country_b", "count"]),
        out_dir / "collaborations.csv"))
    meta = pd.DataFrame([{"country_code": c.code, "name": c.name,
                          "region": c.region} for c in dataset.countries])
    files.append(_write_csv(meta, out_dir / "metadata.csv"))
    path = out_dir / "periods.json"
    write_json([{"label": p.label, "start_year": p.start_year,
                 "end_year": p.end_year} for p in dataset.periods], path)
    files.append(path)
    return files


def write_planted_csv(planted: dict[str, Partition],
                      out_dir: str | Path) -> Path:
    out_dir = Path(out_dir)
    rows = [{"period": period, "country": node, "community": lab}
            for period, part in planted.items()
            for node, lab in zip(part.nodes, part.labels)]
    return _write_csv(pd.DataFrame(rows), out_dir / "planted_partition.csv")
