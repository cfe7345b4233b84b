"""Collaboration significance against a configuration null model.

The observed share of country i's collaborations going to j is compared
with the share expected from j's overall pull: s_ij > 1 marks a tie that
is stronger than random mixing would produce. The switch-like transform
(s - 1)/(s + 1), clamped at 0, maps s into [0, 1) for display and edge
thresholding.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import EmptyNetworkError, SchemaError
from .panel import PanelDataset

__all__ = [
    "SignificanceNetwork",
    "collaboration_significance",
    "significance_transform",
    "threshold_edges",
    "continental_mean_weights",
    "export_network",
]


@dataclass(frozen=True, eq=False)
class SignificanceNetwork:
    """Pairwise significance for one period.

    ``s`` holds the raw significance (NaN where an endpoint is isolated and
    on the diagonal); ``p_hat`` the clamped transform with zero diagonal and
    zeros at undefined entries; ``defined`` flags the meaningful entries.
    """

    period: str
    nodes: tuple[str, ...]
    s: np.ndarray
    p_hat: np.ndarray
    defined: np.ndarray

    def edge_weight(self, a: str, b: str) -> float:
        i, j = self.nodes.index(a), self.nodes.index(b)
        return float(self.p_hat[i, j])


def collaboration_significance(dataset: PanelDataset,
                               period: str) -> SignificanceNetwork:
    """Significance of every ordered pair in one period's count matrix.

    s_ij divides i's observed share of ties to j by j's expected pull
    (column total over the grand total); rows or columns of countries with
    no collaborations are undefined and flagged.
    """
    counts = dataset.collaboration_matrix(period).astype(np.float64)
    strengths = counts.sum(axis=1)
    two_m = strengths.sum()
    if two_m == 0:
        raise EmptyNetworkError(f"period {period}: no collaborations at all")
    active = strengths > 0
    defined = active[:, None] & active[None, :]
    np.fill_diagonal(defined, False)
    s = np.full_like(counts, np.nan)
    denom = strengths[:, None] * strengths[None, :]
    np.divide(counts * two_m, denom, out=s, where=defined)
    p_hat = significance_transform(s)
    p_hat[~defined] = 0.0
    return SignificanceNetwork(period=period, nodes=dataset.codes,
                               s=s, p_hat=p_hat, defined=defined)


def significance_transform(s: np.ndarray) -> np.ndarray:
    """Map significance onto [0, 1): (s - 1)/(s + 1), negatives clamped to 0.

    NaN entries stay NaN so undefined pairs remain visible to callers.
    """
    s = np.asarray(s, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        p = (s - 1.0) / (s + 1.0)
        return np.where(p < 0, 0.0, p)


def threshold_edges(network: SignificanceNetwork,
                    cutoff: float = 0.5) -> list[tuple[str, str, float]]:
    """Edges with transformed weight strictly above ``cutoff``, heaviest
    first (ties by node pair)."""
    edges = []
    n = len(network.nodes)
    for i in range(n):
        for j in range(i + 1, n):
            if network.defined[i, j] and network.p_hat[i, j] > cutoff:
                edges.append((network.nodes[i], network.nodes[j],
                              float(network.p_hat[i, j])))
    return sorted(edges, key=lambda e: (-e[2], e[0], e[1]))


def continental_mean_weights(network: SignificanceNetwork,
                             dataset: PanelDataset,
                             positive_only: bool = False) -> pd.DataFrame:
    """Mean transformed weight between (and within) regions.

    Averages run over ordered country pairs i in R, j in S with i != j that
    are defined; zero weights count unless ``positive_only``. Empty cells
    are NaN.
    """
    if network.nodes != dataset.codes:
        raise SchemaError("network and dataset country orders differ")
    regions = list(dataset.region_set)
    region_idx = {r: [i for i, c in enumerate(dataset.countries) if c.region == r]
                  for r in regions}
    out = np.full((len(regions), len(regions)), np.nan)
    for a, ra in enumerate(regions):
        for b, rb in enumerate(regions):
            vals = []
            for i in region_idx[ra]:
                for j in region_idx[rb]:
                    if i == j or not network.defined[i, j]:
                        continue
                    w = network.p_hat[i, j]
                    if positive_only and w <= 0:
                        continue
                    vals.append(w)
            if vals:
                out[a, b] = float(np.mean(vals))
    return pd.DataFrame(out, index=regions, columns=regions)


def export_network(network: SignificanceNetwork, dataset: PanelDataset,
                   path: str | Path, fmt: str = "csv",
                   cutoff: float = 0.5) -> None:
    """Write the thresholded network as an edge-list CSV or GEXF XML.

    The GEXF variant carries region and period publications as node
    attributes; output is byte-deterministic for a given network.
    """
    edges = threshold_edges(network, cutoff)
    path = Path(path)
    if fmt == "csv":
        df = pd.DataFrame(edges, columns=["source", "target", "weight"])
        df.to_csv(path, index=False, lineterminator="\n")
        return
    if fmt != "gexf":
        raise SchemaError(f"unknown export format {fmt!r}")

    k = dataset.period_index(network.period)
    root = ET.Element("gexf", xmlns="http://www.gexf.net/1.2draft", version="1.2")
    graph = ET.SubElement(root, "graph", defaultedgetype="undirected")
    attrs = ET.SubElement(graph, "attributes", {"class": "node"})
    ET.SubElement(attrs, "attribute", id="0", title="region", type="string")
    ET.SubElement(attrs, "attribute", id="1", title="publications", type="long")
    nodes_el = ET.SubElement(graph, "nodes")
    for i, c in enumerate(dataset.countries):
        node = ET.SubElement(nodes_el, "node", id=c.code, label=c.name)
        values = ET.SubElement(node, "attvalues")
        ET.SubElement(values, "attvalue", {"for": "0", "value": c.region})
        ET.SubElement(values, "attvalue",
                      {"for": "1", "value": str(int(dataset.publications[i, k]))})
    edges_el = ET.SubElement(graph, "edges")
    for eid, (a, b, w) in enumerate(edges):
        ET.SubElement(edges_el, "edge", id=str(eid), source=a, target=b,
                      weight=repr(w))
    ET.indent(root)
    tree = ET.ElementTree(root)
    tree.write(path, encoding="utf-8", xml_declaration=True)
    with open(path, "ab") as fh:
        fh.write(b"\n")
