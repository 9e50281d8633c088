"""Connectivity-repair treatments for clusterings: CC, WCC, and CM.

CC replaces each cluster by the connected components of its induced
subgraph. WCC additionally removes minimum edge cuts until every emitted
cluster strictly beats the connectivity bound. CM is WCC plus a
re-clustering step applied to every part produced by a split.

The parent graph is never mutated: removing a cut and keeping both sides is
the same as recursing on the induced subgraphs of the two sides, because
crossing edges vanish from both. Per-cluster work is independent, so
clusters can be processed by a pool of worker processes; outputs are merged
canonically and do not depend on the worker count.
"""

from __future__ import annotations

import logging
import multiprocessing
import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .clustering import Clustering, ThresholdSpec
from .errors import ContractViolation, ExternalClustererError, TreatmentError
from .graph import Graph, split_by_label, write_edgelist

log = logging.getLogger("wellconn")


@dataclass
class TreatmentTrace:
    """Counters describing one treatment run."""

    cuts_performed: int = 0
    components_splits: int = 0
    max_recursion_depth: int = 0
    clusters_in: int = 0
    clusters_out: int = 0

    def to_dict(self) -> dict:
        return {
            "cuts_performed": self.cuts_performed,
            "components_splits": self.components_splits,
            "max_recursion_depth": self.max_recursion_depth,
            "clusters_in": self.clusters_in,
            "clusters_out": self.clusters_out,
        }


class IdentityClusterer:
    """Returns the whole graph as one cluster (reduces CM to WCC)."""

    kind = "identity"
    # re-clustering a connected part returns the part itself
    trivial_on_connected = True

    def cluster(self, graph: Graph) -> Clustering:
        return Clustering.from_assignment(np.zeros(graph.n, np.int64))


class ComponentsClusterer:
    """Returns the connected components as the clusters."""

    kind = "components"
    trivial_on_connected = True

    def cluster(self, graph: Graph) -> Clustering:
        labels = _kernels.connected_labels(graph.indptr, graph.adj)
        return Clustering.from_assignment(labels)


class ExternalClusterer:
    """Runs an external command on an edgelist and reads back a clustering.

    The command template is expanded by substituting `{input}` with the path
    of a tab-separated edgelist of the part and `{output}` with the path the
    command must write `node-label <tab> cluster-token` lines to. Nodes the
    command omits become singletons; labels outside the part are an error.
    """

    kind = "external"
    trivial_on_connected = False

    def __init__(self, command_template: str | list[str]):
        tokens = (
            shlex.split(command_template)
            if isinstance(command_template, str)
            else list(command_template)
        )
        if not tokens:
            raise ContractViolation("external clusterer: empty command")
        joined = " ".join(tokens)
        if "{input}" not in joined or "{output}" not in joined:
            raise ContractViolation(
                "external clusterer: command must mention {input} and {output}"
            )
        self.command = tokens

    def cluster(self, graph: Graph) -> Clustering:
        with tempfile.TemporaryDirectory(prefix="wellconn-ext-") as tmp:
            in_path = os.path.join(tmp, "part.tsv")
            out_path = os.path.join(tmp, "clusters.tsv")
            write_edgelist(graph, in_path)
            argv = [
                tok.replace("{input}", in_path).replace("{output}", out_path)
                for tok in self.command
            ]
            try:
                proc = subprocess.run(argv, capture_output=True, text=True)
            except OSError as exc:
                raise ExternalClustererError(
                    f"cannot run {argv[0]!r}: {exc}"
                ) from exc
            if proc.returncode != 0:
                tail = (proc.stderr or proc.stdout or "").strip()[-500:]
                raise ExternalClustererError(
                    f"command {argv[0]!r} exited {proc.returncode}: {tail}"
                )
            if not os.path.exists(out_path):
                raise ExternalClustererError(
                    f"command {argv[0]!r} wrote no output file"
                )
            return self._read_membership(out_path, graph)

    @staticmethod
    def _read_membership(path: str, graph: Graph) -> Clustering:
        label_index = graph.label_index()
        assignment = np.full(graph.n, -1, np.int64)
        tokens: dict[str, int] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n").rstrip("\r")
                if not line.strip():
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ExternalClustererError(
                        f"external output line {line_no}: expected two tokens"
                    )
                label, token = parts
                node = label_index.get(label)
                if node is None:
                    raise ExternalClustererError(
                        f"external output names unknown node {label!r}: not a partition"
                    )
                tid = tokens.setdefault(token, len(tokens))
                if assignment[node] != -1 and assignment[node] != tid:
                    raise ExternalClustererError(
                        f"external output assigns {label!r} twice: not a partition"
                    )
                assignment[node] = tid
        free = np.flatnonzero(assignment < 0)
        assignment[free] = len(tokens) + np.arange(len(free))
        return Clustering.from_assignment(assignment)


def parse_clusterer(text: str):
    """CLI grammar: 'identity', 'components', or 'external:<command>'."""
    if text == "identity":
        return IdentityClusterer()
    if text == "components":
        return ComponentsClusterer()
    if text.startswith("external:"):
        return ExternalClusterer(text[len("external:") :])
    raise ContractViolation(f"unknown clusterer: {text!r}")


def cc_treatment(g: Graph, c: Clustering) -> Clustering:
    """Replace each cluster by the connected components of its subgraph."""
    clustering, _ = cc_treatment_with_trace(g, c)
    return clustering


def cc_treatment_with_trace(g: Graph, c: Clustering) -> tuple[Clustering, TreatmentTrace]:
    _check_cover(g, c)
    mark = np.full(g.n, -1, np.int64)
    pieces: list[np.ndarray] = []
    splits = 0
    for members in c.clusters:
        if len(members) == 1:
            pieces.append(members)
            continue
        si, sa = _kernels.induced_csr(g.indptr, g.adj, members, mark)
        labels = _kernels.connected_labels(si, sa)
        if labels.max() == 0:
            pieces.append(members)
        else:
            splits += 1
            pieces.extend(members[grp] for grp in split_by_label(labels))
    trace = TreatmentTrace(
        cuts_performed=0,
        components_splits=splits,
        max_recursion_depth=1 if splits else 0,
        clusters_in=c.num_clusters,
        clusters_out=len(pieces),
    )
    return _merge_pieces(g.n, pieces), trace


def wcc_treatment(
    g: Graph, c: Clustering, t: ThresholdSpec, *, processes: int = 1
) -> tuple[Clustering, TreatmentTrace]:
    """Split clusters along minimum cuts until all satisfy the bound."""
    return _treat(g, c, t, clusterer=None, processes=processes)


def cm_treatment(
    g: Graph,
    c: Clustering,
    t: ThresholdSpec,
    clusterer,
    *,
    processes: int = 1,
) -> tuple[Clustering, TreatmentTrace]:
    """Like WCC, but every part produced by a split is re-clustered first."""
    if clusterer is None:
        raise ContractViolation("cm_treatment requires a clusterer")
    return _treat(g, c, t, clusterer=clusterer, processes=processes)


def _check_cover(g: Graph, c: Clustering) -> None:
    if c.n != g.n:
        raise ContractViolation(
            f"clustering covers {c.n} nodes but graph has {g.n}"
        )


def _merge_pieces(n: int, pieces: list[np.ndarray]) -> Clustering:
    assignment = np.full(n, -1, np.int64)
    for cid, piece in enumerate(pieces):
        assignment[piece] = cid
    if np.any(assignment < 0):
        raise TreatmentError("treatment produced a non-covering partition")
    return Clustering.from_assignment(assignment)


# ---------------------------------------------------------------------------
# queue engine

_WORKER_CTX: dict = {}


def _process_cluster(
    indptr: np.ndarray,
    adj: np.ndarray,
    nodes: np.ndarray,
    t: ThresholdSpec,
    clusterer,
    labels: list[str] | None,
    mark: np.ndarray,
) -> tuple[list[np.ndarray], int, int, int]:
    """Run the split queue for one original cluster.

    Returns (pieces, cuts_performed, components_splits, max_depth).
    """
    kind_code = t.kind_code
    coefficient = t.coefficient
    fast = clusterer is None or clusterer.trivial_on_connected
    emitted: list[np.ndarray] = []
    cuts = 0
    comp_splits = 0
    maxdepth = 0
    stack: list[tuple[np.ndarray, int]] = [(nodes, 0)]
    while stack:
        nd, depth = stack.pop()
        if depth > maxdepth:
            maxdepth = depth
        size = len(nd)
        if size == 1:
            emitted.append(nd)
            continue
        si, sa = _kernels.induced_csr(indptr, adj, nd, mark)
        comp = _kernels.connected_labels(si, sa)
        if comp.max() > 0:
            comp_splits += 1
            parts = [nd[grp] for grp in split_by_label(comp)]
            for part in _recluster(parts, clusterer, indptr, adj, labels, mark):
                stack.append((part, depth + 1))
            continue
        bound = t.value(size)
        if 1.0 > bound:
            # any cut of a connected graph is at least 1, so it passes
            emitted.append(nd)
            continue
        if fast:
            degree_min = int(np.min(np.diff(si)))
            if degree_min <= bound:
                alive, peeled, count = _kernels.low_degree_peel(
                    si, sa, kind_code, coefficient
                )
                if count > 0:  # guard: an empty batch must not re-enqueue
                    cuts += count
                    for i in range(count):
                        emitted.append(nd[peeled[i] : peeled[i] + 1])
                    if depth + count > maxdepth:
                        maxdepth = depth + count
                    stack.append((nd[alive], depth + count))
                    continue
        value, side = _kernels.min_cut_csr(si, sa)
        if value < 0:
            raise TreatmentError("cluster became disconnected unexpectedly")
        if value > bound:
            emitted.append(nd)
            continue
        cuts += 1
        parts = [nd[side], nd[~side]]
        for part in _recluster(parts, clusterer, indptr, adj, labels, mark):
            stack.append((part, depth + 1))
    return emitted, cuts, comp_splits, maxdepth


def _recluster(
    parts: list[np.ndarray],
    clusterer,
    indptr: np.ndarray,
    adj: np.ndarray,
    labels: list[str] | None,
    mark: np.ndarray,
) -> list[np.ndarray]:
    """Apply the re-clustering step of CM to each part of a split."""
    if clusterer is None or clusterer.trivial_on_connected:
        return parts
    out: list[np.ndarray] = []
    for part in parts:
        if len(part) == 1:
            out.append(part)
            continue
        si, sa = _kernels.induced_csr(indptr, adj, part, mark)
        part_labels = [labels[i] for i in part.tolist()]
        sub = Graph(si, sa, part_labels)
        try:
            produced = clusterer.cluster(sub)
        except TreatmentError:
            raise
        except Exception as exc:  # the failing part gets named for the caller
            raise TreatmentError(
                f"re-clustering failed on a part of {len(part)} nodes: {exc}"
            ) from exc
        if produced.n != sub.n:
            raise TreatmentError(
                "re-clustering returned a non-partition "
                f"({produced.n} nodes for a {sub.n}-node part)"
            )
        out.extend(part[grp] for grp in produced.clusters)
    return out


def _worker_run(task: tuple[int, np.ndarray]):
    idx, nodes = task
    ctx = _WORKER_CTX
    mark = ctx.get("mark")
    if mark is None or len(mark) != ctx["n"]:
        mark = np.full(ctx["n"], -1, np.int64)
        ctx["mark"] = mark
    pieces, cuts, comp_splits, maxdepth = _process_cluster(
        ctx["indptr"],
        ctx["adj"],
        nodes,
        ctx["threshold"],
        ctx["clusterer"],
        ctx["labels"],
        mark,
    )
    return idx, pieces, cuts, comp_splits, maxdepth


def _treat(
    g: Graph,
    c: Clustering,
    t: ThresholdSpec,
    clusterer,
    processes: int,
) -> tuple[Clustering, TreatmentTrace]:
    _check_cover(g, c)
    trace = TreatmentTrace(clusters_in=c.num_clusters)
    needs_labels = clusterer is not None and not clusterer.trivial_on_connected
    labels = g.labels if needs_labels else None

    tasks = [(i, members) for i, members in enumerate(c.clusters)]
    results: list[tuple[int, list[np.ndarray], int, int, int]] = []

    if processes > 1 and len(tasks) > 1:
        _kernels.warmup()  # compile before forking so children reuse the cache
        _WORKER_CTX.clear()
        _WORKER_CTX.update(
            indptr=g.indptr,
            adj=g.adj,
            n=g.n,
            threshold=t,
            clusterer=clusterer,
            labels=labels,
        )
        # largest clusters first for balance; identity restored on merge
        order = sorted(tasks, key=lambda kv: -len(kv[1]))
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=processes) as pool:
            for res in pool.imap_unordered(_worker_run, order, chunksize=4):
                results.append(res)
        _WORKER_CTX.clear()
    else:
        mark = np.full(g.n, -1, np.int64)
        for idx, nodes in tasks:
            pieces, cuts, comp_splits, maxdepth = _process_cluster(
                g.indptr, g.adj, nodes, t, clusterer, labels, mark
            )
            results.append((idx, pieces, cuts, comp_splits, maxdepth))

    results.sort(key=lambda r: r[0])
    pieces: list[np.ndarray] = []
    for idx, cluster_pieces, cuts, comp_splits, maxdepth in results:
        pieces.extend(cluster_pieces)
        trace.cuts_performed += cuts
        trace.components_splits += comp_splits
        trace.max_recursion_depth = max(trace.max_recursion_depth, maxdepth)
        log.debug(
            "cluster %d: %d nodes -> %d pieces (%d cuts, %d component splits)",
            idx,
            len(c.clusters[idx]),
            len(cluster_pieces),
            cuts,
            comp_splits,
        )
    trace.clusters_out = len(pieces)
    log.info(
        "treatment: %d clusters in, %d out, %d cuts, %d component splits",
        trace.clusters_in,
        trace.clusters_out,
        trace.cuts_performed,
        trace.components_splits,
    )
    return _merge_pieces(g.n, pieces), trace
