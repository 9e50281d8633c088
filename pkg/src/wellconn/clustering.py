"""Partitions of graph nodes: model, thresholds, statistics, file I/O.

Clusterings are canonical: cluster ids are 0..k-1 ordered by the minimum
contained node index, which makes them invariant to the labels used in
input files and to processing order.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .errors import ClusteringParseError, ContractViolation, UniverseMismatch
from .graph import Graph, _open_text, split_by_label


class Clustering:
    """A partition of node indices [0, n) into canonical clusters."""

    __slots__ = ("assignment", "clusters")

    def __init__(self, assignment: np.ndarray, clusters: list[np.ndarray]):
        self.assignment = assignment
        self.clusters = clusters

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def num_clusters(self) -> int:
        return len(self.clusters)

    def sizes(self) -> np.ndarray:
        return np.array([len(c) for c in self.clusters], dtype=np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Clustering):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    def __hash__(self):
        return hash(self.assignment.tobytes())

    @classmethod
    def from_assignment(cls, assignment: Iterable[int] | np.ndarray) -> "Clustering":
        """Canonicalize an arbitrary id-per-node array."""
        arr = np.asarray(assignment, dtype=np.int64)
        if arr.ndim != 1:
            raise ContractViolation("assignment must be one-dimensional")
        if arr.size == 0:
            return cls(arr, [])
        # order cluster ids by first occurrence == minimum member index
        _, first_pos, inverse = np.unique(arr, return_index=True, return_inverse=True)
        rank = np.argsort(np.argsort(first_pos, kind="stable"), kind="stable")
        canonical = rank[inverse]
        clusters = split_by_label(canonical)
        return cls(canonical, clusters)

    @classmethod
    def from_clusters(
        cls, clusters: Iterable[Iterable[int]], n: int
    ) -> "Clustering":
        """Build from explicit member sets; they must partition [0, n)."""
        assignment = np.full(n, -1, np.int64)
        for cid, members in enumerate(clusters):
            for v in members:
                if v < 0 or v >= n:
                    raise ContractViolation(f"node index {v} out of range")
                if assignment[v] != -1:
                    raise ContractViolation(f"node {v} assigned to two clusters")
                assignment[v] = cid
        if np.any(assignment < 0):
            missing = int(np.flatnonzero(assignment < 0)[0])
            raise ContractViolation(f"node {missing} not covered by any cluster")
        return cls.from_assignment(assignment)

    def singletons(self) -> int:
        return sum(1 for c in self.clusters if len(c) == 1)


@dataclass(frozen=True)
class ThresholdSpec:
    """The bound f(n) a cluster's min cut must strictly exceed.

    kinds: "log10-multiple" (f(n) = coefficient * log10(n)), "constant"
    (f(n) = coefficient), "connectivity-only" (f(n) = 0, connectivity is the
    only requirement).
    """

    kind: str
    coefficient: float = 1.0

    KIND_CODES = {"log10-multiple": 0, "constant": 1, "connectivity-only": 2}

    def __post_init__(self):
        if self.kind not in self.KIND_CODES:
            raise ContractViolation(f"unknown threshold kind: {self.kind!r}")
        if self.coefficient < 0:
            raise ContractViolation("threshold coefficient must be nonnegative")

    @property
    def kind_code(self) -> int:
        return self.KIND_CODES[self.kind]

    def value(self, size: int) -> float:
        """The bound f(size) for a cluster of the given current size."""
        if size < 1:
            raise ContractViolation("cluster size must be at least 1")
        if self.kind == "log10-multiple":
            return self.coefficient * math.log10(size)
        if self.kind == "constant":
            return self.coefficient
        return 0.0

    @classmethod
    def parse(cls, text: str) -> "ThresholdSpec":
        """Parse flag grammar: '1log10', '2.5log10', '0log10', '3', 'connectivity'."""
        token = text.strip().lower()
        if token == "connectivity":
            return cls("connectivity-only", 0.0)
        if token.endswith("log10"):
            coef = token[: -len("log10")]
            try:
                return cls("log10-multiple", float(coef))
            except ValueError:
                raise ContractViolation(f"bad threshold: {text!r}") from None
        try:
            return cls("constant", float(int(token)))
        except ValueError:
            raise ContractViolation(f"bad threshold: {text!r}") from None

    def __str__(self) -> str:
        if self.kind == "connectivity-only":
            return "connectivity"
        if self.kind == "constant":
            return str(int(self.coefficient))
        coef = self.coefficient
        text = str(int(coef)) if coef == int(coef) else repr(coef)
        return f"{text}log10"


DEFAULT_THRESHOLD = ThresholdSpec("log10-multiple", 1.0)


def is_well_connected(cut_value: int, cluster_size: int, t: ThresholdSpec) -> bool:
    """Strict test: singletons pass by convention, otherwise cut > f(size)."""
    if cluster_size < 1:
        raise ContractViolation("cluster size must be at least 1")
    if cut_value < 0:
        raise ContractViolation("cut value must be nonnegative")
    if cluster_size == 1:
        return True
    return cut_value > t.value(cluster_size)


@dataclass(frozen=True)
class ClusterStats:
    """Size statistics over non-singleton clusters plus node coverage."""

    non_singleton_count: int
    median_nonsingleton_size: float | None
    max_nonsingleton_size: int
    node_coverage: float

    def to_dict(self) -> dict:
        return {
            "non_singleton_count": self.non_singleton_count,
            "median_nonsingleton_size": self.median_nonsingleton_size,
            "max_nonsingleton_size": self.max_nonsingleton_size,
            "node_coverage": self.node_coverage,
        }


def node_coverage(c: Clustering) -> float:
    """Percentage of nodes in clusters of size at least two."""
    if c.n == 0:
        return 0.0
    covered = sum(len(cl) for cl in c.clusters if len(cl) >= 2)
    return 100.0 * covered / c.n


def cluster_stats(c: Clustering) -> ClusterStats:
    sizes = [len(cl) for cl in c.clusters if len(cl) >= 2]
    if not sizes:
        return ClusterStats(0, None, 0, node_coverage(c))
    return ClusterStats(
        non_singleton_count=len(sizes),
        median_nonsingleton_size=float(np.median(sizes)),
        max_nonsingleton_size=int(max(sizes)),
        node_coverage=node_coverage(c),
    )


def is_refinement(fine: Clustering, coarse: Clustering) -> bool:
    """True when every cluster of `fine` lies inside one cluster of `coarse`."""
    if fine.n != coarse.n:
        raise UniverseMismatch(
            f"clusterings cover different universes: {fine.n} vs {coarse.n} nodes"
        )
    for members in fine.clusters:
        targets = coarse.assignment[members]
        if targets.size and (targets != targets[0]).any():
            return False
    return True


@dataclass
class ClusteringLoadResult:
    """A loaded clustering plus the graph it ended up covering.

    Labels present in the file but absent from the graph are admitted as
    degree-0 nodes (`graph` is then an extended copy); graph nodes missing
    from the file become singleton clusters.
    """

    clustering: Clustering
    graph: Graph
    unknown_labels: int
    missing_nodes: int


def read_membership(source: str | Path | IO) -> list[tuple[str, str]]:
    """Parse `node-label <tab> cluster-token` lines into (label, token) pairs.

    Repeated identical assignments collapse; conflicting ones raise.
    """
    stream, owned = _open_text(source)
    try:
        seen: dict[str, tuple[str, int]] = {}
        pairs: list[tuple[str, str]] = []
        for line_no, raw in enumerate(stream, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ClusteringParseError(
                    line_no, f"expected two tab-separated tokens, got {line!r}"
                )
            label, token = parts
            if label in seen:
                prev_token, prev_line = seen[label]
                if prev_token != token:
                    raise ClusteringParseError(
                        line_no,
                        f"node {label!r} assigned to conflicting clusters "
                        f"(lines {prev_line} and {line_no})",
                    )
                continue
            seen[label] = (token, line_no)
            pairs.append((label, token))
    finally:
        if owned:
            stream.close()
    return pairs


def load_clustering(source: str | Path | IO, g: Graph) -> ClusteringLoadResult:
    """Read `node-label <tab> cluster-token` lines into a canonical Clustering."""
    pairs = read_membership(source)
    token_ids: dict[str, int] = {}
    extra_labels: list[str] = []
    label_index = g.label_index()
    assigned: list[tuple[int, int]] = []  # (node index, token id)
    for label, token in pairs:
        tid = token_ids.setdefault(token, len(token_ids))
        node = label_index.get(label)
        if node is None:
            node = g.n + len(extra_labels)
            extra_labels.append(label)
        assigned.append((node, tid))

    graph = g.with_isolated(extra_labels)
    n = graph.n
    assignment = np.full(n, -1, np.int64)
    for node, tid in assigned:
        assignment[node] = tid
    missing = int(np.count_nonzero(assignment < 0))
    # unassigned nodes become singleton clusters
    free = np.flatnonzero(assignment < 0)
    assignment[free] = len(token_ids) + np.arange(len(free))
    clustering = Clustering.from_assignment(assignment)
    return ClusteringLoadResult(
        clustering=clustering,
        graph=graph,
        unknown_labels=len(extra_labels),
        missing_nodes=missing,
    )


def write_clustering(c: Clustering, g: Graph, target: str | Path | IO) -> None:
    """Write `node-label <tab> cluster-id` lines sorted by node label bytes."""
    if c.n != g.n:
        raise UniverseMismatch(
            f"clustering covers {c.n} nodes but graph has {g.n}"
        )
    stream, owned = (
        (open(target, "w", encoding="utf-8", newline="\n"), True)
        if isinstance(target, (str, Path))
        else (target, False)
    )
    try:
        order = sorted(range(g.n), key=g.labels.__getitem__)
        out: list[str] = []
        for v in order:
            out.append(f"{g.labels[v]}\t{c.assignment[v]}\n")
            if len(out) >= 65536:
                stream.write("".join(out))
                out.clear()
        stream.write("".join(out))
    finally:
        if owned:
            stream.close()


def clustering_to_text(c: Clustering, g: Graph) -> str:
    buf = io.StringIO()
    write_clustering(c, g, buf)
    return buf.getvalue()
