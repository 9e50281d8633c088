"""Deterministic synthetic test networks with planted clusterings.

The pseudo-random source is numpy's PCG64 (O'Neill's permuted congruential
generator) seeded directly with the spec's seed; draws happen in a fixed
documented order, so equal specs reproduce byte-identical graphs anywhere
numpy runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clustering import Clustering
from .errors import ContractViolation
from .graph import Graph

KINDS = ("clique-ring", "bridged-cliques", "planted-partition-lite", "random-gnp")

# below this many nodes, edge sampling enumerates all candidate pairs
_DENSE_SAMPLING_LIMIT = 2048


@dataclass(frozen=True)
class GadgetSpec:
    """Recipe for one synthetic network.

    kinds and parameters:
      clique-ring / bridged-cliques: num_cliques, clique_size, bridges
        (cliques joined pairwise in a ring by that many bridge edges)
      planted-partition-lite: sizes, p_in, p_out, seed
      random-gnp: n, p, seed
    """

    kind: str
    num_cliques: int = 0
    clique_size: int = 0
    bridges: int = 0
    sizes: tuple[int, ...] = field(default=())
    p_in: float = 0.0
    p_out: float = 0.0
    n: int = 0
    p: float = 0.0
    seed: int = 0


def generate(spec: GadgetSpec) -> tuple[Graph, Clustering]:
    """Deterministic graph plus its planted ground-truth clustering."""
    if spec.kind in ("clique-ring", "bridged-cliques"):
        return _clique_ring(spec.num_cliques, spec.clique_size, spec.bridges)
    if spec.kind == "planted-partition-lite":
        return _planted_partition(spec.sizes, spec.p_in, spec.p_out, spec.seed)
    if spec.kind == "random-gnp":
        return _random_gnp(spec.n, spec.p, spec.seed)
    raise ContractViolation(f"unknown gadget kind: {spec.kind!r}")


def _clique_ring(k: int, s: int, b: int) -> tuple[Graph, Clustering]:
    if k < 1:
        raise ContractViolation("need at least one clique")
    if s < 1:
        raise ContractViolation("clique size must be at least 1")
    if b < 0 or b > s:
        raise ContractViolation(f"bridge count must be in [0, {s}]")
    n = k * s
    edges: list[tuple[int, int]] = []
    for i in range(k):
        base = i * s
        for a in range(s):
            for c in range(a + 1, s):
                edges.append((base + a, base + c))
    if k >= 2 and b > 0:
        ring_pairs = [(i, i + 1) for i in range(k - 1)]
        if k > 2:
            ring_pairs.append((k - 1, 0))
        for i, j in ring_pairs:
            for t in range(b):
                edges.append((i * s + t, j * s + t))
    g = Graph.from_edges(n, edges)
    assignment = np.repeat(np.arange(k, dtype=np.int64), s)
    return g, Clustering.from_assignment(assignment)


def _sample_pairs_sparse(
    rng: np.random.Generator,
    n: int,
    count: int,
    accept,
) -> np.ndarray:
    """Draw `count` distinct accepted unordered pairs as int64 keys (lo*n+hi).

    Pairs come from the first `count` distinct accepted draws of a uniform
    endpoint stream, which keeps the selection uniform and deterministic.
    """
    got = np.empty(0, np.int64)
    have: set[int] = set()
    keys_in_order: list[int] = []
    remaining = count
    while remaining > 0:
        batch = max(int(remaining * 1.3) + 16, 64)
        u = rng.integers(0, n, size=batch)
        v = rng.integers(0, n, size=batch)
        ok = u != v
        u, v = u[ok], v[ok]
        ok = accept(u, v)
        u, v = u[ok], v[ok]
        lo = np.minimum(u, v).astype(np.int64)
        hi = np.maximum(u, v).astype(np.int64)
        for key in (lo * n + hi).tolist():
            if key not in have:
                have.add(key)
                keys_in_order.append(key)
                remaining -= 1
                if remaining == 0:
                    break
    got = np.asarray(keys_in_order, dtype=np.int64)
    return got


def _sample_pairs_dense(
    rng: np.random.Generator, candidates: np.ndarray, count: int
) -> np.ndarray:
    """Uniform sample without replacement from an explicit key array."""
    perm = rng.permutation(len(candidates))
    return candidates[perm[:count]]


def _binomial_count(rng: np.random.Generator, population: int, p: float) -> int:
    if population <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return population
    return int(rng.binomial(population, p))


def _planted_partition(
    sizes: tuple[int, ...], p_in: float, p_out: float, seed: int
) -> tuple[Graph, Clustering]:
    if not sizes or any(s < 1 for s in sizes):
        raise ContractViolation("cluster sizes must be positive")
    if not (0.0 <= p_in <= 1.0 and 0.0 <= p_out <= 1.0):
        raise ContractViolation("edge probabilities must lie in [0, 1]")
    n = int(sum(sizes))
    assignment = np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)
    starts = np.zeros(len(sizes), np.int64)
    np.cumsum(np.asarray(sizes[:-1], dtype=np.int64), out=starts[1:])
    rng = np.random.Generator(np.random.PCG64(seed))
    keys: list[np.ndarray] = []

    # internal edges, cluster by cluster in index order
    for ci, size in enumerate(sizes):
        base = int(starts[ci])
        pairs = size * (size - 1) // 2
        want = _binomial_count(rng, pairs, p_in)
        if want == 0:
            continue
        if size <= _DENSE_SAMPLING_LIMIT:
            iu, iv = np.triu_indices(size, k=1)
            cand = (iu.astype(np.int64) + base) * n + (iv.astype(np.int64) + base)
            keys.append(_sample_pairs_dense(rng, cand, want))
        else:
            local = _sample_pairs_sparse(
                rng, size, want, lambda u, v: np.ones(len(u), bool)
            )
            lo = local // size + base
            hi = local % size + base
            keys.append(lo * n + hi)

    # cross-cluster edges
    internal_pairs = sum(s * (s - 1) // 2 for s in sizes)
    cross_pairs = n * (n - 1) // 2 - internal_pairs
    want = _binomial_count(rng, cross_pairs, p_out)
    if want > 0:
        if n <= _DENSE_SAMPLING_LIMIT:
            iu, iv = np.triu_indices(n, k=1)
            mask = assignment[iu] != assignment[iv]
            cand = iu[mask].astype(np.int64) * n + iv[mask].astype(np.int64)
            keys.append(_sample_pairs_dense(rng, cand, want))
        else:
            keys.append(
                _sample_pairs_sparse(
                    rng, n, want, lambda u, v: assignment[u] != assignment[v]
                )
            )

    if keys:
        all_keys = np.concatenate(keys)
        edges = np.stack([all_keys // n, all_keys % n], axis=1)
    else:
        edges = np.empty((0, 2), np.int64)
    g = Graph.from_edges(n, edges)
    return g, Clustering.from_assignment(assignment)


def _random_gnp(n: int, p: float, seed: int) -> tuple[Graph, Clustering]:
    if n < 0:
        raise ContractViolation("node count must be nonnegative")
    if not 0.0 <= p <= 1.0:
        raise ContractViolation("edge probability must lie in [0, 1]")
    if n == 0:
        return Graph.from_edges(0, []), Clustering.from_assignment(np.empty(0, np.int64))
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = n * (n - 1) // 2
    want = _binomial_count(rng, pairs, p)
    if want == 0:
        edges = np.empty((0, 2), np.int64)
    elif n <= _DENSE_SAMPLING_LIMIT:
        iu, iv = np.triu_indices(n, k=1)
        cand = iu.astype(np.int64) * n + iv.astype(np.int64)
        keys = _sample_pairs_dense(rng, cand, want)
        edges = np.stack([keys // n, keys % n], axis=1)
    else:
        keys = _sample_pairs_sparse(rng, n, want, lambda u, v: np.ones(len(u), bool))
        edges = np.stack([keys // n, keys % n], axis=1)
    g = Graph.from_edges(n, edges)
    return g, Clustering.from_assignment(np.zeros(n, np.int64))


def parse_sizes(text: str) -> tuple[int, ...]:
    """Parse a size spec like '200x3000,20000x20' into an explicit tuple."""
    sizes: list[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "x" in chunk:
            size_text, count_text = chunk.split("x", 1)
            size, count = int(size_text), int(count_text)
        else:
            size, count = int(chunk), 1
        if size < 1 or count < 1:
            raise ContractViolation(f"bad size spec chunk: {chunk!r}")
        sizes.extend([size] * count)
    if not sizes:
        raise ContractViolation(f"empty size spec: {text!r}")
    return tuple(sizes)
