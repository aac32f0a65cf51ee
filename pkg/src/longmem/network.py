"""Thresholded correlation networks, community structure, era splits.

Edges keep their signed coefficient, but modularity is computed on the
positive-weight subgraph only (negative survivors of a high threshold are
rare and standard modularity assumes non-negative weights); the number of
excluded negative edges is recorded on the partition.

Community detection is a greedy multi-level modularity pass made fully
deterministic: nodes are visited in canonical id order permuted by the
seeded generator, gain ties go to the smallest community label, and final
labels are renumbered by each community's smallest member id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .dcca import DccaMatrix
from .errors import LongmemError
from .series import RatePanel

__all__ = [
    "CorrelationNetwork",
    "CommunityPartition",
    "build_network",
    "detect_communities",
    "average_weighted_degree",
    "split_periods",
    "to_graphml",
    "to_dot",
    "partition_table",
]

# Relative slack for "these two modularity gains are the same number".
_GAIN_TIE_REL = 1e-12


@dataclass(frozen=True)
class CorrelationNetwork:
    """Nodes with the pairwise edges that survived the threshold."""

    ids: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]
    scale: int
    threshold: float

    def __post_init__(self):
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must be in (0, 1]")
        known = set(self.ids)
        seen = set()
        for a, b, w in self.edges:
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            if a not in known or b not in known:
                raise ValueError(f"edge ({a!r}, {b!r}) references unknown node")
            key = (a, b) if a <= b else (b, a)
            if key in seen:
                raise ValueError(f"duplicate edge for pair {key}")
            seen.add(key)
            if abs(w) < self.threshold:
                raise ValueError(
                    f"edge ({a!r}, {b!r}) weight {w} below threshold {self.threshold}"
                )

    @property
    def n_nodes(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def to_json_dict(self) -> dict:
        return {
            "ids": list(self.ids),
            "edges": [[a, b, float(w)] for a, b, w in self.edges],
            "scale": self.scale,
            "threshold": self.threshold,
        }


def build_network(m: DccaMatrix, threshold: float = 0.8) -> CorrelationNetwork:
    """Keep the pairs whose coefficient magnitude reaches the threshold."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    edges = []
    n = len(m.ids)
    for i in range(n):
        for j in range(i + 1, n):
            w = float(m.rho[i, j])
            if abs(w) >= threshold:
                edges.append((m.ids[i], m.ids[j], w))
    return CorrelationNetwork(
        ids=m.ids, edges=tuple(edges), scale=m.scale, threshold=threshold
    )


@dataclass(frozen=True)
class CommunityPartition:
    """Node to community assignment plus the modularity it achieves."""

    assignment: tuple[tuple[str, int], ...]  # (id, label), in network id order
    modularity_q: float
    resolution: float
    seed: int
    n_negative_excluded: int

    def __post_init__(self):
        if self.modularity_q > 1.0:
            raise ValueError("modularity cannot exceed 1")

    @property
    def labels(self) -> dict[str, int]:
        return dict(self.assignment)

    @property
    def communities(self) -> tuple[tuple[str, ...], ...]:
        """Members per label, labels ascending, members in id order."""
        by_label: dict[int, list[str]] = {}
        for node, label in self.assignment:
            by_label.setdefault(label, []).append(node)
        return tuple(
            tuple(sorted(by_label[lab])) for lab in sorted(by_label)
        )

    @property
    def n_communities(self) -> int:
        return len({lab for _, lab in self.assignment})

    def to_table(self) -> str:
        lines = ["id,community"]
        for node, label in self.assignment:
            lines.append(f"{node},{label}")
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "assignment": [[n, int(c)] for n, c in self.assignment],
            "modularity_q": self.modularity_q,
            "resolution": self.resolution,
            "seed": self.seed,
            "n_negative_excluded": self.n_negative_excluded,
        }


def _modularity(
    n_nodes: int,
    edges: list[tuple[int, int, float]],
    comm: list[int],
    resolution: float,
) -> float:
    """Q of an assignment on the positive-weight graph; 0 when edgeless."""
    strength = [0.0] * n_nodes
    for u, v, w in edges:
        strength[u] += w
        strength[v] += w
    two_m = sum(strength)
    if two_m == 0.0:
        return 0.0
    q = 0.0
    for u, v, w in edges:
        if comm[u] == comm[v]:
            q += 2.0 * w
    tot: dict[int, float] = {}
    for u in range(n_nodes):
        tot[comm[u]] = tot.get(comm[u], 0.0) + strength[u]
    q /= two_m
    q -= resolution * sum(t * t for t in tot.values()) / (two_m * two_m)
    return q


def _louvain_level(
    n_nodes: int,
    neighbors: list[dict[int, float]],
    loops: list[float],
    resolution: float,
    order: np.ndarray,
) -> list[int] | None:
    """One local-move phase; returns the assignment or None if nothing moved."""
    strength = [2.0 * loops[u] + sum(neighbors[u].values()) for u in range(n_nodes)]
    two_m = sum(strength)
    if two_m == 0.0:
        return None  # edgeless graph: nothing to move
    comm = list(range(n_nodes))
    tot = strength.copy()
    moved_any = False
    improved = True
    while improved:
        improved = False
        for u in order:
            u = int(u)
            cu = comm[u]
            # weight from u to each neighboring community, u taken out of its own
            w_to: dict[int, float] = {cu: 0.0}
            for v, w in neighbors[u].items():
                c = comm[v]
                w_to[c] = w_to.get(c, 0.0) + w
            tot[cu] -= strength[u]
            best_c = cu
            best_gain = w_to.get(cu, 0.0) - resolution * tot[cu] * strength[u] / two_m
            for c in sorted(w_to):
                if c == cu:
                    continue
                gain = w_to[c] - resolution * tot[c] * strength[u] / two_m
                tie = _GAIN_TIE_REL * max(1.0, abs(gain), abs(best_gain))
                if gain > best_gain + tie or (
                    abs(gain - best_gain) <= tie and c < best_c
                ):
                    best_gain = gain
                    best_c = c
            tot[best_c] += strength[u]
            comm[u] = best_c
            if best_c != cu:
                improved = True
                moved_any = True
    return comm if moved_any else None


def _aggregate(
    n_nodes: int,
    neighbors: list[dict[int, float]],
    loops: list[float],
    comm: list[int],
) -> tuple[int, list[dict[int, float]], list[float], list[list[int]]]:
    """Collapse communities into nodes; keeps internal weight as self-loops."""
    labels = sorted(set(comm))
    relabel = {c: i for i, c in enumerate(labels)}
    k = len(labels)
    new_neighbors: list[dict[int, float]] = [dict() for _ in range(k)]
    new_loops = [0.0] * k
    groups: list[list[int]] = [[] for _ in range(k)]
    for u in range(n_nodes):
        groups[relabel[comm[u]]].append(u)
        new_loops[relabel[comm[u]]] += loops[u]
    for u in range(n_nodes):
        cu = relabel[comm[u]]
        for v, w in neighbors[u].items():
            if v < u:
                continue
            cv = relabel[comm[v]]
            if cu == cv:
                new_loops[cu] += w
            else:
                new_neighbors[cu][cv] = new_neighbors[cu].get(cv, 0.0) + w
                new_neighbors[cv][cu] = new_neighbors[cv].get(cu, 0.0) + w
    return k, new_neighbors, new_loops, groups


def detect_communities(
    net: CorrelationNetwork,
    resolution: float = 1.0,
    seed: int = 0,
) -> CommunityPartition:
    """Greedy multi-level modularity maximization, deterministic given seed.

    Runs on the positive-weight subgraph.  A network with edges but no
    positive ones has no graph to optimize and is an error; an edgeless
    network degenerates to singleton communities at Q = 0.
    """
    if resolution <= 0.0:
        raise ValueError("resolution must be positive")
    if net.n_nodes == 0:
        raise LongmemError("cannot partition an empty network")
    index = {node: i for i, node in enumerate(net.ids)}
    positive = [
        (index[a], index[b], w) for a, b, w in net.edges if w > 0.0
    ]
    n_negative = net.n_edges - len(positive)
    if net.n_edges > 0 and not positive:
        raise LongmemError(
            "all edges carry negative weight; no positive-weight subgraph "
            "to run modularity on"
        )

    n = net.n_nodes
    # membership[u] = original node indices merged into current node u
    membership: list[list[int]] = [[u] for u in range(n)]
    neighbors: list[dict[int, float]] = [dict() for _ in range(n)]
    loops = [0.0] * n
    for u, v, w in positive:
        neighbors[u][v] = neighbors[u].get(v, 0.0) + w
        neighbors[v][u] = neighbors[v].get(u, 0.0) + w

    rng = np.random.default_rng(seed)
    n_cur = n
    while True:
        order = rng.permutation(n_cur)
        comm = _louvain_level(n_cur, neighbors, loops, resolution, order)
        if comm is None:
            break
        n_cur, neighbors, loops, groups = _aggregate(n_cur, neighbors, loops, comm)
        membership = [
            [orig for merged in grp for orig in membership[merged]]
            for grp in groups
        ]
        if n_cur == 1:
            break

    assign = [0] * n
    for label, members in enumerate(membership):
        for orig in members:
            assign[orig] = label

    q = _modularity(n, positive, assign, resolution)
    q_single = _modularity(n, positive, [0] * n, resolution)
    if q < q_single:
        assign = [0] * n
        q = q_single

    # canonical labels: communities numbered by their smallest member id
    reps: dict[int, str] = {}
    for i, node in enumerate(net.ids):
        c = assign[i]
        if c not in reps or node < reps[c]:
            reps[c] = node
    ordered = sorted(reps, key=lambda c: reps[c])
    relabel = {c: i for i, c in enumerate(ordered)}
    assignment = tuple(
        (node, relabel[assign[i]]) for i, node in enumerate(net.ids)
    )
    return CommunityPartition(
        assignment=assignment,
        modularity_q=q,
        resolution=resolution,
        seed=seed,
        n_negative_excluded=n_negative,
    )


def average_weighted_degree(net: CorrelationNetwork) -> float:
    """Mean over nodes of the summed magnitudes of incident edges."""
    if net.n_nodes == 0:
        return 0.0
    total = 0.0
    for _, _, w in net.edges:
        total += 2.0 * abs(w)
    return total / net.n_nodes


def split_periods(
    panel: RatePanel,
    windows: list[tuple[date, date]],
) -> list[RatePanel]:
    """Restrict the panel to each date window (windows may overlap)."""
    if not windows:
        raise ValueError("need at least one window")
    out = []
    for d_from, d_to in windows:
        members = [ts.restrict(d_from, d_to) for ts in panel.series]
        shared = set(members[0].dates)
        for ts in members[1:]:
            shared &= set(ts.dates)
        if len(shared) < 2:
            raise LongmemError(
                f"window {d_from.isoformat()}..{d_to.isoformat()} leaves "
                f"{len(shared)} shared dates, need at least 2"
            )
        out.append(RatePanel(series=tuple(members)))
    return out


def _fmt_weight(w: float) -> str:
    return repr(float(w))


def to_graphml(
    net: CorrelationNetwork,
    partition: CommunityPartition | None = None,
) -> str:
    """GraphML text with edge weights and optional community labels."""
    labels = partition.labels if partition is not None else None
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>',
    ]
    if labels is not None:
        lines.append(
            '  <key id="community" for="node" attr.name="community" attr.type="int"/>'
        )
    lines.append('  <graph id="rho-network" edgedefault="undirected">')
    for node in net.ids:
        if labels is None:
            lines.append(f"    <node id={quoteattr(node)}/>")
        else:
            lines.append(f"    <node id={quoteattr(node)}>")
            lines.append(
                f'      <data key="community">{labels[node]}</data>'
            )
            lines.append("    </node>")
    for a, b, w in net.edges:
        lines.append(
            f"    <edge source={quoteattr(a)} target={quoteattr(b)}>"
        )
        lines.append(f'      <data key="weight">{escape(_fmt_weight(w))}</data>')
        lines.append("    </edge>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(
    net: CorrelationNetwork,
    partition: CommunityPartition | None = None,
) -> str:
    """Graphviz DOT text with edge weights and optional community labels."""
    labels = partition.labels if partition is not None else None
    lines = ["graph rho_network {"]
    for node in net.ids:
        if labels is None:
            lines.append(f"  {_dot_quote(node)};")
        else:
            lines.append(
                f"  {_dot_quote(node)} [community={labels[node]}];"
            )
    for a, b, w in net.edges:
        lines.append(
            f"  {_dot_quote(a)} -- {_dot_quote(b)} [weight={_fmt_weight(w)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def partition_table(partition: CommunityPartition) -> str:
    return partition.to_table()
