"""Cluster fine-grained event types into coarse schemas.

Each event type gets three representations: a dense mean-embedding of its
genericized label, a sparse tf.idf vector over its mapped-article content,
and a sparse tf.idf vector over the IPTC codes of its mapped articles. A
weighted sum of the three cosine similarities defines pairwise similarity;
agglomeration uses Ward linkage on ``d = 1 - similarity`` (kept as-is even
though this dissimilarity is not Euclidean), and the dendrogram is cut at
an elbow of the within-cluster distance curve, falling back to a fixed
threshold when the curve has no distinct knee.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .embeddings import EmbeddingTable, cosine, cosine_sparse
from .gazetteer import GENERIC_TOKENS, EntityRecognizer, genericize_label
from .kb import KbEvent, stopwords
from .stats import ImtVocabStats, WetStats, tfidf_imt_vocab, tfidf_wet


class ClusteringError(Exception):
    pass


@dataclass(frozen=True)
class SimilarityWeights:
    """Mixing weights for the label / content / topic-code cosines."""

    alpha: float = 0.38
    beta: float = 0.57
    gamma: float = 0.05

    def __post_init__(self) -> None:
        total = self.alpha + self.beta + self.gamma
        if abs(total - 1.0) > 1e-9:
            raise ClusteringError(f"similarity weights must sum to 1, got {total}")
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ClusteringError("similarity weights must be non-negative")


@dataclass
class WetRepresentation:
    wet: str  # type qid
    label: str
    label_vec: np.ndarray
    content_vec: dict[str, float]
    imt_vec: dict[str, float]


@dataclass(frozen=True)
class Dendrogram:
    """Ordered merge list over leaf event types.

    Leaves carry ids ``0..n-1`` (position in ``leaves``, which is sorted by
    qid); each merge creates id ``n + step``. Merge distances are
    non-decreasing (Ward is monotone under the Lance-Williams update).
    """

    leaves: tuple[str, ...]
    merges: tuple[tuple[int, int, float, int], ...]

    def members(self, node_id: int) -> frozenset[str]:
        """Leaf qids under a node id."""
        n = len(self.leaves)
        out = set()
        stack = [node_id]
        while stack:
            node = stack.pop()
            if node < n:
                out.add(self.leaves[node])
            else:
                a, b, _, _ = self.merges[node - n]
                stack.extend((a, b))
        return frozenset(out)

    def cut(self, threshold: float) -> list[frozenset[str]]:
        """Partition of the leaves by applying merges with distance < threshold."""
        n = len(self.leaves)
        parent = list(range(n + len(self.merges)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b, distance, new_id in self.merges:
            if distance < threshold:
                parent[find(a)] = new_id
                parent[find(b)] = new_id
        groups: dict[int, set[str]] = {}
        for leaf_id, qid in enumerate(self.leaves):
            groups.setdefault(find(leaf_id), set()).add(qid)
        return [frozenset(g) for g in groups.values()]

    def to_merge_lines(self) -> list[str]:
        return [f"{a} {b} {d:.12g} {new}" for a, b, d, new in self.merges]


@dataclass
class FilterProperty:
    pid: str
    label: str
    kind: str
    coverage: float
    range_filterable: bool


@dataclass
class SchemaCluster:
    """A coarse event schema: an id, its member types, suggested filters."""

    schema_id: str
    label: str
    wets: tuple[str, ...]
    filters: list[FilterProperty] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Representations


def label_repr(
    label: str, table: EmbeddingTable, recognizer: EntityRecognizer, wet: str = ""
) -> np.ndarray:
    """Mean embedding of the genericized label tokens (OOV tokens skipped)."""
    tokens = genericize_label(label, recognizer)
    vec = table.mean_vector(tokens)
    if vec is None:
        raise ClusteringError(f"no embeddings for any label token of {wet or label!r}")
    return vec


def content_repr(wet: str, stats: WetStats) -> dict[str, float]:
    """Sparse token -> tf.idf vector of the type document; zero entries dropped."""
    if wet not in stats.tf:
        raise ClusteringError(f"event type {wet} has no mapped articles")
    vec = {}
    for token in stats.tf[wet]:
        weight = tfidf_wet(token, wet, stats)
        if weight != 0.0:
            vec[token] = weight
    return vec


def imt_repr(wet: str, stats: ImtVocabStats) -> dict[str, float]:
    """Sparse IPTC-code -> tf.idf vector for the type; zero entries dropped."""
    if wet not in stats.tf:
        raise ClusteringError(f"event type {wet} has no mapped articles")
    vec = {}
    for code in stats.tf[wet]:
        weight = tfidf_imt_vocab(code, wet, stats)
        if weight != 0.0:
            vec[code] = weight
    return vec


def build_representations(
    wet_labels: Mapping[str, str],
    table: EmbeddingTable,
    recognizer: EntityRecognizer,
    wet_stats: WetStats,
    imt_stats: ImtVocabStats,
) -> tuple[list[WetRepresentation], list[str]]:
    """Representations for every mapped type; unmapped or all-OOV types are
    returned separately as a skip report instead of failing the batch."""
    reps = []
    skipped = []
    for wet in sorted(wet_labels):
        label = wet_labels[wet]
        try:
            reps.append(
                WetRepresentation(
                    wet=wet,
                    label=label,
                    label_vec=label_repr(label, table, recognizer, wet=wet),
                    content_vec=content_repr(wet, wet_stats),
                    imt_vec=imt_repr(wet, imt_stats),
                )
            )
        except ClusteringError as exc:
            skipped.append(f"{wet}: {exc}")
    return reps, skipped


def pair_similarity(
    a: WetRepresentation, b: WetRepresentation, weights: SimilarityWeights
) -> float:
    """Weighted sum of the label, content and topic-code cosines."""
    return (
        weights.alpha * cosine(a.label_vec, b.label_vec)
        + weights.beta * cosine_sparse(a.content_vec, b.content_vec)
        + weights.gamma * cosine_sparse(a.imt_vec, b.imt_vec)
    )


def similarity_matrix(
    reps: Sequence[WetRepresentation], weights: SimilarityWeights
) -> np.ndarray:
    n = len(reps)
    sim = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            sim[i, j] = sim[j, i] = pair_similarity(reps[i], reps[j], weights)
    return sim


# ---------------------------------------------------------------------------
# Ward agglomeration (Lance-Williams update on the distance matrix)


def ward_cluster_distances(distances: np.ndarray, leaves: Sequence[str]) -> Dendrogram:
    """Agglomerate a precomputed dissimilarity matrix with Ward linkage.

    At every step the pair of active clusters at minimal current distance
    merges; distances to the merged cluster follow the Lance-Williams Ward
    update. Ties pick the pair whose smallest member qid is smallest (then
    the smaller other side), which makes the merge sequence independent of
    input order.
    """
    n = len(leaves)
    if n < 2:
        raise ClusteringError("clustering needs at least 2 event types")
    if distances.shape != (n, n):
        raise ClusteringError(f"distance matrix shape {distances.shape} != ({n}, {n})")
    order = sorted(range(n), key=lambda i: leaves[i])
    ordered_leaves = tuple(leaves[i] for i in order)
    D = distances[np.ix_(order, order)].astype(float).copy()
    np.fill_diagonal(D, np.inf)

    size = np.ones(n)
    cluster_id = list(range(n))  # row -> current cluster id
    min_qid = list(ordered_leaves)  # row -> smallest member qid
    active = list(range(n))
    merges = []
    next_id = n
    for _ in range(n - 1):
        best = None
        for ai, i in enumerate(active):
            for j in active[ai + 1 :]:
                d = D[i, j]
                lo, hi = sorted((min_qid[i], min_qid[j]))
                key = (d, lo, hi)
                if best is None or key < best[0]:
                    best = (key, i, j)
        (d, _, _), i, j = best
        ni, nj = size[i], size[j]
        a_id, b_id = sorted((cluster_id[i], cluster_id[j]))
        merges.append((a_id, b_id, float(d), next_id))
        # Lance-Williams Ward update against every other active cluster
        for k in active:
            if k == i or k == j:
                continue
            nk = size[k]
            d2 = ((ni + nk) * D[i, k] ** 2 + (nj + nk) * D[j, k] ** 2 - nk * d * d) / (
                ni + nj + nk
            )
            D[i, k] = D[k, i] = np.sqrt(max(d2, 0.0))
        size[i] = ni + nj
        cluster_id[i] = next_id
        min_qid[i] = min(min_qid[i], min_qid[j])
        active.remove(j)
        next_id += 1
    return Dendrogram(leaves=ordered_leaves, merges=tuple(merges))


def ward_cluster(
    reps: Sequence[WetRepresentation], weights: SimilarityWeights
) -> Dendrogram:
    """Cluster representations over ``d = 1 - pair_similarity``."""
    if len(reps) < 2:
        raise ClusteringError("clustering needs at least 2 event types")
    sim = similarity_matrix(reps, weights)
    return ward_cluster_distances(1.0 - sim, [r.wet for r in reps])


# ---------------------------------------------------------------------------
# Dendrogram cut


def find_elbow_threshold(
    dendrogram: Dendrogram, fallback: float = 0.23, flat_tolerance: float = 1e-9
) -> float:
    """Cut height at the knee of the within-cluster distance curve.

    Sweeping the cut upward one merge at a time, the total within-cluster
    distance grows by each merge's height, so the curve's second difference
    at step k is ``h[k+1] - h[k]``. The knee is the largest such jump and
    the cut lands at the height of the jump's upper merge, leaving the
    expensive merge unapplied. A curve whose second differences are flat
    within ``flat_tolerance`` has no distinct knee; the fallback applies.
    """
    heights = [d for _, _, d, _ in dendrogram.merges]
    if len(heights) < 2:
        return fallback
    gaps = [heights[k + 1] - heights[k] for k in range(len(heights) - 1)]
    if max(gaps) - min(gaps) <= flat_tolerance:
        return fallback
    knee = gaps.index(max(gaps))
    return heights[knee + 1]


def _assign_schema_ids(partition: Sequence[frozenset[str]]) -> list[tuple[str, frozenset[str]]]:
    ordered = sorted(partition, key=lambda members: (-len(members), min(members)))
    return [(f"S{i}", members) for i, members in enumerate(ordered, start=1)]


def schema_label(
    members: frozenset[str],
    wet_labels: Mapping[str, str],
    recognizer: EntityRecognizer,
) -> str:
    """Display label: the most frequent non-generic token sequence among the
    member type labels (ties to the lexicographically smallest)."""
    stop = stopwords()
    counts: Counter = Counter()
    for wet in members:
        tokens = genericize_label(wet_labels.get(wet, ""), recognizer)
        sequence = tuple(t for t in tokens if t not in GENERIC_TOKENS and t not in stop)
        if sequence:
            counts[sequence] += 1
    if not counts:
        return ""
    best = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return " ".join(best[0])


def cut_dendrogram(
    dendrogram: Dendrogram,
    threshold: float,
    wet_labels: Mapping[str, str] | None = None,
    recognizer: EntityRecognizer | None = None,
) -> list[SchemaCluster]:
    """Extract schemas below ``threshold``; ids S1..Sk by decreasing size."""
    partition = dendrogram.cut(threshold)
    clusters = []
    for schema_id, members in _assign_schema_ids(partition):
        label = ""
        if wet_labels is not None and recognizer is not None:
            label = schema_label(members, wet_labels, recognizer)
        clusters.append(
            SchemaCluster(schema_id=schema_id, label=label or schema_id, wets=tuple(sorted(members)))
        )
    return clusters


def elbow_cut(
    dendrogram: Dendrogram,
    fallback: float = 0.23,
    wet_labels: Mapping[str, str] | None = None,
    recognizer: EntityRecognizer | None = None,
) -> tuple[float, list[SchemaCluster]]:
    """Cut at the elbow (or the fallback height when the curve has no knee)."""
    threshold = find_elbow_threshold(dendrogram, fallback=fallback)
    return threshold, cut_dendrogram(dendrogram, threshold, wet_labels, recognizer)


# ---------------------------------------------------------------------------
# Schema filter properties


def derive_schema_filters(
    cluster: SchemaCluster,
    events: Sequence[KbEvent],
    min_coverage: float = 0.2,
) -> list[FilterProperty]:
    """Rank candidate filter properties of a schema by instance coverage.

    Coverage of a property is the fraction of the schema's event instances
    (events whose types intersect the member set) that carry a claim with
    that pid. Quantity properties are flagged range-filterable.
    """
    member_wets = set(cluster.wets)
    instances = [e for e in events if member_wets.intersection(e.wet_qids())]
    if not instances:
        return []
    carrying: dict[str, int] = {}
    labels: dict[str, str] = {}
    kinds: dict[str, str] = {}
    for event in instances:
        seen = set()
        for claim in event.claims:
            if claim.pid in seen:
                continue
            seen.add(claim.pid)
            carrying[claim.pid] = carrying.get(claim.pid, 0) + 1
            labels.setdefault(claim.pid, claim.label)
            kinds.setdefault(claim.pid, claim.kind)
    filters = []
    for pid, count in carrying.items():
        coverage = count / len(instances)
        if coverage < min_coverage:
            continue
        kind = kinds[pid]
        filters.append(
            FilterProperty(
                pid=pid,
                label=labels[pid],
                kind=kind,
                coverage=coverage,
                range_filterable=kind == "quantity",
            )
        )
    filters.sort(key=lambda f: (-f.coverage, f.pid))
    return filters
