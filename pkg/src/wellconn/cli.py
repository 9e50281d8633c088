"""Command-line front end: treat, audit, eval, dl, stats, generate.

Every run writes one self-describing JSON document: a `manifest` block
(inputs, digests, options, version, wall-clock duration) plus a `payload`
block holding the actual results. Payloads are byte-reproducible: stable
key order, LF endings, no timestamps, independent of the worker count.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .audit import connectivity_audit
from .clustering import (
    Clustering,
    ThresholdSpec,
    cluster_stats,
    load_clustering,
    read_membership,
    write_clustering,
)
from .dl import dl_diff, load_components, pe_for_clustering
from .errors import ContractViolation, ExternalClustererError, WellconnError
from .gadgets import GadgetSpec, generate, parse_sizes
from .graph import induced_subgraph, load_edgelist, write_edgelist
from .metrics import (
    LOG_BASE,
    NMI_NORMALIZATION,
    agri,
    ari,
    nmi,
    rmi,
    table_count_method,
)
from .treatments import (
    cc_treatment_with_trace,
    cm_treatment,
    parse_clusterer,
    wcc_treatment,
)

log = logging.getLogger("wellconn")


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def _write_document(target: str | None, manifest: dict, payload: dict) -> None:
    doc = {"manifest": _jsonable(manifest), "payload": _jsonable(payload)}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if target is None or target == "-":
        sys.stdout.write(text)
    else:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _manifest(subcommand: str, inputs: dict[str, str], options: dict, started: float) -> dict:
    return {
        "tool": "wellconn",
        "version": __version__,
        "subcommand": subcommand,
        "inputs": {
            role: {"path": str(path), "sha256": _sha256(path)}
            for role, path in inputs.items()
        },
        "options": _jsonable(options),
        "duration_seconds": round(time.monotonic() - started, 3),
    }


def _setup_logging(log_file: str | None, log_level: int) -> None:
    logger = logging.getLogger("wellconn")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    if log_level <= 0:
        logger.addHandler(logging.NullHandler())
        logger.setLevel(logging.CRITICAL)
        return
    level = logging.INFO if log_level == 1 else logging.DEBUG
    handler = (
        logging.FileHandler(log_file, encoding="utf-8")
        if log_file
        else logging.StreamHandler(sys.stderr)
    )
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_treat(args) -> int:
    started = time.monotonic()
    _setup_logging(args.log_file, args.log_level)
    threshold = ThresholdSpec.parse(args.threshold)
    graph, ingest = load_edgelist(args.edgelist)
    loaded = load_clustering(args.existing_clustering, graph)
    graph = loaded.graph
    clustering = loaded.clustering
    log.info(
        "loaded %d nodes, %d edges, %d clusters",
        graph.n,
        graph.m,
        clustering.num_clusters,
    )
    if args.mode == "cc":
        treated, trace = cc_treatment_with_trace(graph, clustering)
    elif args.mode == "wcc":
        treated, trace = wcc_treatment(
            graph, clustering, threshold, processes=args.num_processors
        )
    else:
        clusterer = parse_clusterer(args.clusterer)
        treated, trace = cm_treatment(
            graph, clustering, threshold, clusterer, processes=args.num_processors
        )
    write_clustering(treated, graph, args.output_file)
    payload = {
        "mode": args.mode,
        "threshold": str(threshold),
        "ingest": {
            "lines_read": ingest.lines_read,
            "self_loops_dropped": ingest.self_loops_dropped,
            "duplicate_edges_dropped": ingest.duplicate_edges_dropped,
            "nodes": ingest.nodes,
            "edges": ingest.edges,
        },
        "clustering_file": {
            "unknown_labels": loaded.unknown_labels,
            "missing_nodes": loaded.missing_nodes,
        },
        "graph": {"nodes": graph.n, "edges": graph.m},
        "trace": trace.to_dict(),
        "clusters_out": treated.num_clusters,
        "output_sha256": _sha256(args.output_file),
    }
    manifest = _manifest(
        "treat",
        {"edgelist": args.edgelist, "existing_clustering": args.existing_clustering},
        {
            "mode": args.mode,
            "threshold": str(threshold),
            "num_processors": args.num_processors,
            "clusterer": args.clusterer if args.mode == "cm" else None,
            "output_file": str(args.output_file),
        },
        started,
    )
    _write_document(args.output_file + ".run.json", manifest, payload)
    return 0


def _cmd_audit(args) -> int:
    started = time.monotonic()
    _setup_logging(args.log_file, args.log_level)
    threshold = ThresholdSpec.parse(args.threshold)
    graph, _ingest = load_edgelist(args.edgelist)
    loaded = load_clustering(args.clustering, graph)
    report = connectivity_audit(
        loaded.graph,
        loaded.clustering,
        threshold,
        processes=args.num_processors,
        mincut_size_cap=args.mincut_cap,
    )
    if args.per_cluster_table:
        with open(args.per_cluster_table, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(
                "cluster_id\tsize\tconnected\tmin_cut\tcategory"
                "\tthreshold_bound\tat_boundary\n"
            )
            for rec in report.clusters:
                cut = "" if rec.min_cut is None else str(rec.min_cut)
                fh.write(
                    f"{rec.cluster_id}\t{rec.size}\t{rec.connected}\t{cut}"
                    f"\t{rec.category}\t{rec.threshold_bound!r}\t{rec.at_boundary}\n"
                )
    manifest = _manifest(
        "audit",
        {"edgelist": args.edgelist, "clustering": args.clustering},
        {
            "threshold": str(threshold),
            "num_processors": args.num_processors,
            "mincut_cap": args.mincut_cap,
        },
        started,
    )
    _write_document(args.output, manifest, report.to_dict())
    return 0


def _universe_for_eval(args):
    """Assemble a shared node universe for the two membership files."""
    truth_pairs = read_membership(args.ground_truth)
    est_pairs = read_membership(args.estimated)
    truth_map = dict(truth_pairs)
    est_map = dict(est_pairs)
    graph = None
    restricted = {"restricted": False, "dropped_truth": 0, "dropped_estimated": 0}
    if args.edgelist:
        graph, _ = load_edgelist(args.edgelist)
        extra = [
            lab
            for lab in dict.fromkeys(list(truth_map) + list(est_map))
            if lab not in graph.label_index()
        ]
        if args.restrict_common:
            keep = set(graph.labels) & set(truth_map) & set(est_map)
            restricted = {
                "restricted": True,
                "dropped_truth": len(truth_map) - len(keep & set(truth_map)),
                "dropped_estimated": len(est_map) - len(keep & set(est_map)),
            }
            sub_nodes = [graph.label_index()[lab] for lab in keep]
            graph, _ = induced_subgraph(graph, sub_nodes)
            labels = graph.labels
        else:
            graph = graph.with_isolated(extra)
            labels = graph.labels
    else:
        t_set, e_set = set(truth_map), set(est_map)
        if t_set != e_set:
            if not args.restrict_common:
                raise ContractViolation(
                    "clustering files cover different node sets "
                    f"({len(t_set)} vs {len(e_set)} labels); "
                    "pass --restrict-common to use the intersection"
                )
            keep = t_set & e_set
            restricted = {
                "restricted": True,
                "dropped_truth": len(t_set) - len(keep),
                "dropped_estimated": len(e_set) - len(keep),
            }
            # deterministic universe order: truth-file first appearance
            labels = [lab for lab, _ in truth_pairs if lab in keep]
        else:
            labels = [lab for lab, _ in truth_pairs]
    if not labels:
        raise ContractViolation("evaluation universe is empty")

    index = {lab: i for i, lab in enumerate(labels)}

    def build(mapping: dict[str, str]) -> Clustering:
        assignment = np.full(len(labels), -1, np.int64)
        tokens: dict[str, int] = {}
        for lab, token in mapping.items():
            pos = index.get(lab)
            if pos is None:
                continue
            assignment[pos] = tokens.setdefault(token, len(tokens))
        free = np.flatnonzero(assignment < 0)
        assignment[free] = len(tokens) + np.arange(len(free))
        return Clustering.from_assignment(assignment)

    return build(truth_map), build(est_map), graph, restricted


def _cmd_eval(args) -> int:
    started = time.monotonic()
    _setup_logging(args.log_file, args.log_level)
    if args.metrics is None:
        # agri needs the graph, so it only defaults in when one is given
        args.metrics = "nmi,ari,agri,rmi" if args.edgelist else "nmi,ari,rmi"
    wanted = [tok.strip() for tok in args.metrics.split(",") if tok.strip()]
    known = {"nmi", "ari", "agri", "rmi", "rmi_unnormalized"}
    for tok in wanted:
        if tok not in known:
            raise ContractViolation(f"unknown metric {tok!r} (choose from {sorted(known)})")
    if "agri" in wanted and not args.edgelist:
        raise ContractViolation("agri requires --edgelist")
    truth, est, graph, restricted = _universe_for_eval(args)
    scores: dict[str, float] = {}
    for tok in wanted:
        if tok == "nmi":
            scores["nmi"] = nmi(truth, est)
        elif tok == "ari":
            scores["ari"] = ari(truth, est)
        elif tok == "agri":
            scores["agri"] = agri(graph, truth, est)
        elif tok == "rmi":
            scores["rmi"] = rmi(truth, est, normalized=True)
        elif tok == "rmi_unnormalized":
            scores["rmi_unnormalized"] = rmi(truth, est, normalized=False)
    payload = {
        "scores": scores,
        "metadata": {
            "log_base": LOG_BASE,
            "nmi_normalization": NMI_NORMALIZATION,
            "rmi_normalized": "rmi" in wanted,
            "rmi_table_count_method": table_count_method(truth.n),
            "universe_nodes": truth.n,
            **restricted,
        },
    }
    inputs = {"ground_truth": args.ground_truth, "estimated": args.estimated}
    if args.edgelist:
        inputs["edgelist"] = args.edgelist
    manifest = _manifest(
        "eval",
        inputs,
        {"metrics": wanted, "restrict_common": args.restrict_common},
        started,
    )
    _write_document(args.output, manifest, payload)
    return 0


def _cmd_dl(args) -> int:
    started = time.monotonic()
    _setup_logging(args.log_file, args.log_level)
    payload: dict = {}
    inputs: dict[str, str] = {}
    if (args.components_before is None) != (args.components_after is None):
        raise ContractViolation(
            "--components-before and --components-after must be given together"
        )
    if args.edgelist and args.clustering:
        graph, _ = load_edgelist(args.edgelist)
        loaded = load_clustering(args.clustering, graph)
        value = pe_for_clustering(loaded.graph, loaded.clustering)
        payload["edge_count_prior"] = {
            "value": value,
            "unit": "nats",
            "num_blocks": loaded.clustering.num_clusters,
            "num_edges": loaded.graph.m,
        }
        inputs["edgelist"] = args.edgelist
        inputs["clustering"] = args.clustering
    if args.components_before and args.components_after:
        before = load_components(args.components_before)
        after = load_components(args.components_after)
        diff = dl_diff(before, after)
        payload["totals"] = {
            "untreated": before.total(),
            "treated": after.total(),
            "unit": before.unit,
        }
        payload["diff"] = diff.to_dict()
        inputs["components_before"] = args.components_before
        inputs["components_after"] = args.components_after
    if not payload:
        raise ContractViolation(
            "dl needs --edgelist/--clustering or the two component files"
        )
    manifest = _manifest("dl", inputs, {}, started)
    _write_document(args.output, manifest, payload)
    return 0


def _cmd_stats(args) -> int:
    started = time.monotonic()
    _setup_logging(args.log_file, args.log_level)
    inputs = {"clustering": args.clustering}
    if args.edgelist:
        graph, _ = load_edgelist(args.edgelist)
        loaded = load_clustering(args.clustering, graph)
        clustering = loaded.clustering
        extra = {
            "graph_nodes": loaded.graph.n,
            "graph_edges": loaded.graph.m,
            "missing_nodes": loaded.missing_nodes,
            "unknown_labels": loaded.unknown_labels,
        }
        inputs["edgelist"] = args.edgelist
    else:
        pairs = read_membership(args.clustering)
        tokens: dict[str, int] = {}
        assignment = np.array(
            [tokens.setdefault(tok, len(tokens)) for _, tok in pairs], dtype=np.int64
        )
        clustering = Clustering.from_assignment(assignment)
        extra = {}
    stats = cluster_stats(clustering)
    payload = {
        "nodes": clustering.n,
        "clusters": clustering.num_clusters,
        "singletons": clustering.singletons(),
        **stats.to_dict(),
        **extra,
    }
    manifest = _manifest("stats", inputs, {}, started)
    _write_document(args.output, manifest, payload)
    return 0


def _cmd_generate(args) -> int:
    started = time.monotonic()
    _setup_logging(args.log_file, args.log_level)
    if args.kind in ("clique-ring", "bridged-cliques"):
        spec = GadgetSpec(
            kind=args.kind,
            num_cliques=args.num_cliques,
            clique_size=args.clique_size,
            bridges=args.bridges,
        )
    elif args.kind == "planted-partition-lite":
        spec = GadgetSpec(
            kind=args.kind,
            sizes=parse_sizes(args.sizes),
            p_in=args.p_in,
            p_out=args.p_out,
            seed=args.seed,
        )
    else:
        spec = GadgetSpec(kind=args.kind, n=args.n, p=args.p, seed=args.seed)
    graph, clustering = generate(spec)
    write_edgelist(graph, args.edgelist_out)
    write_clustering(clustering, graph, args.clustering_out)
    payload = {
        "kind": args.kind,
        "seed": args.seed,
        "nodes": graph.n,
        "edges": graph.m,
        "clusters": clustering.num_clusters,
        "edgelist_sha256": _sha256(args.edgelist_out),
        "clustering_sha256": _sha256(args.clustering_out),
    }
    options = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = _manifest("generate", {}, options, started)
    _write_document(args.output, manifest, payload)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(sub) -> None:
    sub.add_argument("--log-file", default=None)
    sub.add_argument("--log-level", type=int, default=0, choices=(0, 1, 2))
    sub.add_argument("--output", default=None, help="report path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wellconn", description=__doc__)
    parser.add_argument("--version", action="version", version=f"wellconn {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    treat = subs.add_parser("treat", help="repair a clustering (cc, wcc, or cm)")
    treat.add_argument("--edgelist", required=True)
    treat.add_argument("--existing-clustering", required=True)
    treat.add_argument("--mode", required=True, choices=("cc", "wcc", "cm"))
    treat.add_argument("--threshold", default="1log10")
    treat.add_argument("--output-file", required=True)
    treat.add_argument("--num-processors", type=int, default=1)
    treat.add_argument(
        "--clusterer",
        default="identity",
        help="cm re-clusterer: identity, components, or external:<command>",
    )
    treat.add_argument("--log-file", default=None)
    treat.add_argument("--log-level", type=int, default=0, choices=(0, 1, 2))
    treat.set_defaults(func=_cmd_treat)

    audit = subs.add_parser("audit", help="classify cluster connectivity")
    audit.add_argument("--edgelist", required=True)
    audit.add_argument("--clustering", required=True)
    audit.add_argument("--threshold", default="1log10")
    audit.add_argument("--num-processors", type=int, default=1)
    audit.add_argument("--mincut-cap", type=int, default=None)
    audit.add_argument("--per-cluster-table", default=None)
    _add_common(audit)
    audit.set_defaults(func=_cmd_audit)

    ev = subs.add_parser("eval", help="score a clustering against ground truth")
    ev.add_argument("--ground-truth", required=True)
    ev.add_argument("--estimated", required=True)
    ev.add_argument("--metrics", default=None)
    ev.add_argument("--edgelist", default=None)
    ev.add_argument("--restrict-common", action="store_true")
    _add_common(ev)
    ev.set_defaults(func=_cmd_eval)

    dl = subs.add_parser("dl", help="description-length accounting")
    dl.add_argument("--edgelist", default=None)
    dl.add_argument("--clustering", default=None)
    dl.add_argument("--components-before", default=None)
    dl.add_argument("--components-after", default=None)
    _add_common(dl)
    dl.set_defaults(func=_cmd_dl)

    stats = subs.add_parser("stats", help="cluster size statistics and coverage")
    stats.add_argument("--clustering", required=True)
    stats.add_argument("--edgelist", default=None)
    _add_common(stats)
    stats.set_defaults(func=_cmd_stats)

    gen = subs.add_parser("generate", help="write a synthetic network + clustering")
    gen.add_argument("--kind", required=True, choices=(
        "clique-ring", "bridged-cliques", "planted-partition-lite", "random-gnp"
    ))
    gen.add_argument("--num-cliques", type=int, default=2)
    gen.add_argument("--clique-size", type=int, default=10)
    gen.add_argument("--bridges", type=int, default=1)
    gen.add_argument("--sizes", default="100x10")
    gen.add_argument("--p-in", type=float, default=0.1)
    gen.add_argument("--p-out", type=float, default=0.001)
    gen.add_argument("--n", type=int, default=100)
    gen.add_argument("--p", type=float, default=0.05)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--edgelist-out", required=True)
    gen.add_argument("--clustering-out", required=True)
    _add_common(gen)
    gen.set_defaults(func=_cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ExternalClustererError as exc:
        print(f"wellconn: external clusterer failed: {exc}", file=sys.stderr)
        return 2
    except WellconnError as exc:
        print(f"wellconn: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"wellconn: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
