"""Connectivity audits of a (graph, clustering) pair.

Each non-singleton cluster is classified as well connected, poorly
connected, or disconnected under a threshold; singletons form their own
reporting category so the proportions describe real clusters only.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .clustering import (
    Clustering,
    ClusterStats,
    ThresholdSpec,
    cluster_stats,
    node_coverage,
)
from .errors import ContractViolation
from .graph import Graph

CATEGORIES = ("well", "poor", "disconnected", "singleton", "skipped")


@dataclass(frozen=True)
class ClusterAudit:
    """Connectivity verdict for one cluster."""

    cluster_id: int
    size: int
    connected: bool
    min_cut: int | None
    category: str
    threshold_bound: float
    at_boundary: bool = False

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "size": self.size,
            "connected": self.connected,
            "min_cut": self.min_cut,
            "category": self.category,
            "threshold_bound": self.threshold_bound,
            "at_boundary": self.at_boundary,
        }


@dataclass
class ConnectivityReport:
    """Per-cluster verdicts plus the aggregate quantities of a run."""

    graph_nodes: int
    graph_edges: int
    graph_digest: str
    threshold: str
    clusters: list[ClusterAudit]
    counts: dict[str, int]
    proportions: dict[str, float]
    node_coverage: float
    stats: ClusterStats
    mincut_size_cap: int | None = None

    def to_dict(self) -> dict:
        return {
            "graph": {
                "nodes": self.graph_nodes,
                "edges": self.graph_edges,
                "digest": self.graph_digest,
            },
            "threshold": self.threshold,
            "mincut_size_cap": self.mincut_size_cap,
            "counts": dict(self.counts),
            "proportions": dict(self.proportions),
            "node_coverage": self.node_coverage,
            "cluster_stats": self.stats.to_dict(),
            "clusters": [rec.to_dict() for rec in self.clusters],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConnectivityReport":
        stats = ClusterStats(**data["cluster_stats"])
        clusters = [ClusterAudit(**rec) for rec in data["clusters"]]
        return cls(
            graph_nodes=data["graph"]["nodes"],
            graph_edges=data["graph"]["edges"],
            graph_digest=data["graph"]["digest"],
            threshold=data["threshold"],
            clusters=clusters,
            counts=dict(data["counts"]),
            proportions=dict(data["proportions"]),
            node_coverage=data["node_coverage"],
            stats=stats,
            mincut_size_cap=data["mincut_size_cap"],
        )


def _audit_one(
    indptr: np.ndarray,
    adj: np.ndarray,
    cid: int,
    members: np.ndarray,
    t: ThresholdSpec,
    cap: int | None,
    mark: np.ndarray,
) -> ClusterAudit:
    size = len(members)
    if size == 1:
        return ClusterAudit(cid, 1, True, None, "singleton", t.value(1), False)
    bound = t.value(size)
    si, sa = _kernels.induced_csr(indptr, adj, members, mark)
    comp = _kernels.connected_labels(si, sa)
    if comp.max() > 0:
        return ClusterAudit(cid, size, False, None, "disconnected", bound, False)
    if cap is not None and size > cap:
        return ClusterAudit(cid, size, True, None, "skipped", bound, False)
    value, _side = _kernels.min_cut_csr(si, sa)
    value = int(value)
    category = "well" if value > bound else "poor"
    at_boundary = abs(value - bound) < 1e-9
    return ClusterAudit(cid, size, True, value, category, bound, at_boundary)


_AUDIT_CTX: dict = {}


def _audit_worker(task: tuple[int, np.ndarray]) -> ClusterAudit:
    cid, members = task
    ctx = _AUDIT_CTX
    mark = ctx.get("mark")
    if mark is None or len(mark) != ctx["n"]:
        mark = np.full(ctx["n"], -1, np.int64)
        ctx["mark"] = mark
    return _audit_one(
        ctx["indptr"], ctx["adj"], cid, members, ctx["threshold"], ctx["cap"], mark
    )


def connectivity_audit(
    g: Graph,
    c: Clustering,
    t: ThresholdSpec,
    *,
    processes: int = 1,
    mincut_size_cap: int | None = None,
) -> ConnectivityReport:
    """Classify every cluster and aggregate the category proportions."""
    if c.n != g.n:
        raise ContractViolation(
            f"clustering covers {c.n} nodes but graph has {g.n}"
        )
    tasks = list(enumerate(c.clusters))
    if processes > 1 and len(tasks) > 1:
        _kernels.warmup()
        _AUDIT_CTX.clear()
        _AUDIT_CTX.update(
            indptr=g.indptr, adj=g.adj, n=g.n, threshold=t, cap=mincut_size_cap
        )
        order = sorted(tasks, key=lambda kv: -len(kv[1]))
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=processes) as pool:
            records = list(pool.imap_unordered(_audit_worker, order, chunksize=4))
        _AUDIT_CTX.clear()
        records.sort(key=lambda r: r.cluster_id)
    else:
        mark = np.full(g.n, -1, np.int64)
        records = [
            _audit_one(g.indptr, g.adj, cid, members, t, mincut_size_cap, mark)
            for cid, members in tasks
        ]

    counts = {cat: 0 for cat in CATEGORIES}
    for rec in records:
        counts[rec.category] += 1
    non_singleton = sum(counts[cat] for cat in CATEGORIES if cat != "singleton")
    proportions = {
        cat: (counts[cat] / non_singleton if non_singleton else 0.0)
        for cat in CATEGORIES
        if cat != "singleton"
    }
    return ConnectivityReport(
        graph_nodes=g.n,
        graph_edges=g.m,
        graph_digest=g.digest(),
        threshold=str(t),
        clusters=records,
        counts=counts,
        proportions=proportions,
        node_coverage=node_coverage(c),
        stats=cluster_stats(c),
        mincut_size_cap=mincut_size_cap,
    )


@dataclass(frozen=True)
class AuditDelta:
    """Differences (after - before) of the aggregate audit quantities."""

    node_coverage: float
    non_singleton_count: int
    median_nonsingleton_size: float | None
    max_nonsingleton_size: int
    proportions: dict[str, float] = field(hash=False)
    counts: dict[str, int] = field(hash=False)

    def to_dict(self) -> dict:
        return {
            "node_coverage": self.node_coverage,
            "non_singleton_count": self.non_singleton_count,
            "median_nonsingleton_size": self.median_nonsingleton_size,
            "max_nonsingleton_size": self.max_nonsingleton_size,
            "proportions": dict(self.proportions),
            "counts": dict(self.counts),
        }


def audit_delta(before: ConnectivityReport, after: ConnectivityReport) -> AuditDelta:
    """Aggregate differences between two audits of the same graph."""
    if before.graph_digest != after.graph_digest:
        raise ContractViolation("audits describe different graphs")
    med_before = before.stats.median_nonsingleton_size
    med_after = after.stats.median_nonsingleton_size
    median_delta = (
        med_after - med_before
        if med_before is not None and med_after is not None
        else None
    )
    return AuditDelta(
        node_coverage=after.node_coverage - before.node_coverage,
        non_singleton_count=(
            after.stats.non_singleton_count - before.stats.non_singleton_count
        ),
        median_nonsingleton_size=median_delta,
        max_nonsingleton_size=(
            after.stats.max_nonsingleton_size - before.stats.max_nonsingleton_size
        ),
        proportions={
            cat: after.proportions.get(cat, 0.0) - before.proportions.get(cat, 0.0)
            for cat in CATEGORIES
            if cat != "singleton"
        },
        counts={
            cat: after.counts.get(cat, 0) - before.counts.get(cat, 0)
            for cat in CATEGORIES
        },
    )
