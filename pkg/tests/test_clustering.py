"""Representations, Ward linkage, elbow cut, schema filters.

The Ward implementation (incremental Lance-Williams updates) is checked
against an oracle that recomputes every inter-cluster height from scratch
out of the original leaf distances, which exercises a completely different
code path and formula.
"""

import math
import random

import numpy as np
import pytest

from newsevents.clustering import (
    ClusteringError,
    SimilarityWeights,
    WetRepresentation,
    content_repr,
    cut_dendrogram,
    derive_schema_filters,
    elbow_cut,
    find_elbow_threshold,
    imt_repr,
    label_repr,
    pair_similarity,
    schema_label,
    ward_cluster,
    ward_cluster_distances,
)
from newsevents.embeddings import EmbeddingTable
from newsevents.gazetteer import load_default_recognizer
from newsevents.kb import parse_event
from newsevents.stats import ImtVocabStats, WetStats

RECOGNIZER = load_default_recognizer()

TABLE = EmbeddingTable(
    {
        "earthquake": np.array([1.0, 0.0, 0.0]),
        "election": np.array([0.0, 1.0, 0.0]),
        "geopolitical": np.array([0.0, 0.0, 1.0]),
        "entity": np.array([0.0, 0.1, 1.0]),
        "in": np.array([0.3, 0.3, 0.3]),
    }
)


# ---------------------------------------------------------------------------
# Oracle: from-scratch Ward heights out of the original leaf distances


def oracle_ward(distances, leaves):
    """O(n^3)-ish reference: every height recomputed from leaf distances.

    Uses the pairwise-sum form of the Ward merge cost,
    ``h(A,B) = sqrt(2 * (I(A|B) - I(A) - I(B)))`` with
    ``I(X) = (sum of squared leaf distances inside X) / |X|``.
    """
    n = len(leaves)
    order = sorted(range(n), key=lambda i: leaves[i])
    ordered = [leaves[i] for i in order]
    D2 = (distances[np.ix_(order, order)].astype(float)) ** 2

    def inner(members):
        members = sorted(members)
        return sum(
            D2[a][b] for i, a in enumerate(members) for b in members[i + 1 :]
        )

    def height(A, B):
        cross = sum(D2[a][b] for a in A for b in B)
        merged = (inner(A) + inner(B) + cross) / (len(A) + len(B))
        delta = merged - inner(A) / len(A) - inner(B) / len(B)
        return math.sqrt(max(2.0 * delta, 0.0))

    clusters = {i: frozenset([i]) for i in range(n)}
    min_qid = {i: ordered[i] for i in range(n)}
    merges = []
    next_id = n
    while len(clusters) > 1:
        best = None
        for a in sorted(clusters):
            for b in sorted(clusters):
                if b <= a:
                    continue
                h = height(clusters[a], clusters[b])
                lo, hi = sorted((min_qid[a], min_qid[b]))
                key = (h, lo, hi)
                if best is None or key < best[0]:
                    best = (key, a, b)
        (h, _, _), a, b = best
        merges.append((a, b, h, next_id))
        clusters[next_id] = clusters[a] | clusters[b]
        min_qid[next_id] = min(min_qid[a], min_qid[b])
        del clusters[a], clusters[b], min_qid[a], min_qid[b]
        next_id += 1
    return ordered, merges


def random_distances(rng, n):
    matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            matrix[i, j] = matrix[j, i] = rng.uniform(0.01, 2.0)
    return matrix


# ---------------------------------------------------------------------------


class TestRepresentations:
    def test_single_token_label_is_its_vector(self):
        vec = label_repr("earthquake", TABLE, RECOGNIZER)
        assert np.allclose(vec, TABLE["earthquake"])

    def test_two_token_mean(self):
        vec = label_repr("earthquake election", TABLE, RECOGNIZER)
        assert np.allclose(vec, (TABLE["earthquake"] + TABLE["election"]) / 2)

    def test_oov_tokens_skipped(self):
        vec = label_repr("earthquake zzz election", TABLE, RECOGNIZER)
        assert np.allclose(vec, (TABLE["earthquake"] + TABLE["election"]) / 2)

    def test_all_oov_is_an_error(self):
        with pytest.raises(ClusteringError, match="W9"):
            label_repr("zzz qqq", TABLE, RECOGNIZER, wet="W9")

    def test_genericized_tokens_are_embedded_word_by_word(self):
        vec = label_repr("earthquake in New Zealand", TABLE, RECOGNIZER)
        expected = (
            TABLE["earthquake"] + TABLE["in"] + TABLE["geopolitical"] + TABLE["entity"]
        ) / 4
        assert np.allclose(vec, expected)

    def test_content_repr_drops_zero_weights(self):
        stats = WetStats(
            n_wets=2,
            tf={"W1": {"quake": 2, "aid": 1}, "W2": {"aid": 3}},
            df={"quake": 1, "aid": 2},
        )
        vec = content_repr("W1", stats)
        assert vec == {"quake": pytest.approx(2 * math.log(2))}

    def test_content_repr_unmapped_type_errors(self):
        stats = WetStats(n_wets=1, tf={"W1": {}}, df={})
        with pytest.raises(ClusteringError, match="W2"):
            content_repr("W2", stats)

    def test_imt_repr_single_positive_entry(self):
        stats = ImtVocabStats(n_wets=2, tf={"W1": {"I1": 3}, "W2": {"I2": 1}}, df={"I1": 1, "I2": 1})
        assert imt_repr("W1", stats) == {"I1": pytest.approx(3 * math.log(2))}


def rep(wet, label_vec, content=None, imt=None, label=""):
    return WetRepresentation(
        wet=wet,
        label=label or wet,
        label_vec=np.asarray(label_vec, dtype=float),
        content_vec=content or {},
        imt_vec=imt or {},
    )


class TestPairSimilarity:
    WEIGHTS = SimilarityWeights()

    def test_identical_representations_score_one(self):
        a = rep("W1", [1.0, 2.0], {"t": 1.5}, {"i": 2.0})
        assert pair_similarity(a, a, self.WEIGHTS) == pytest.approx(1.0)

    def test_all_cosines_zero(self):
        a = rep("W1", [1.0, 0.0], {"t": 1.0}, {"i": 1.0})
        b = rep("W2", [0.0, 1.0], {"u": 1.0}, {"j": 1.0})
        assert pair_similarity(a, b, self.WEIGHTS) == 0.0

    def test_known_mixture(self):
        # label cosine 1, content cosine 0.5, imt cosine 0
        a = rep("W1", [1.0, 0.0], {"t": 1.0, "u": 1.0}, {"i": 1.0})
        b = rep("W2", [2.0, 0.0], {"t": 2.0, "v": 2.0}, {"j": 1.0})
        got = pair_similarity(a, b, self.WEIGHTS)
        assert got == pytest.approx(0.38 + 0.57 * 0.5)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ClusteringError):
            SimilarityWeights(alpha=0.5, beta=0.5, gamma=0.5)

    def test_dimension_mismatch(self):
        a = rep("W1", [1.0, 0.0], {}, {})
        b = rep("W2", [1.0, 0.0, 0.0], {}, {})
        with pytest.raises(ValueError):
            pair_similarity(a, b, self.WEIGHTS)

    def test_symmetry(self):
        rng = random.Random(5)
        for _ in range(20):
            a = rep("W1", [rng.random() for _ in range(4)], {"t": rng.random()}, {})
            b = rep("W2", [rng.random() for _ in range(4)], {"t": rng.random(), "u": 1.0}, {})
            assert pair_similarity(a, b, self.WEIGHTS) == pytest.approx(
                pair_similarity(b, a, self.WEIGHTS)
            )


class TestWardCluster:
    def test_two_leaves_single_merge(self):
        distances = np.array([[0.0, 0.8], [0.8, 0.0]])
        dendrogram = ward_cluster_distances(distances, ["W1", "W2"])
        assert len(dendrogram.merges) == 1
        assert dendrogram.merges[0][2] == pytest.approx(0.8)

    def test_fewer_than_two_rejected(self):
        with pytest.raises(ClusteringError):
            ward_cluster_distances(np.zeros((1, 1)), ["W1"])

    def test_two_tight_pairs_merge_first(self):
        # within-pair distance 0.05, cross-pair 0.9
        distances = np.full((4, 4), 0.9)
        np.fill_diagonal(distances, 0.0)
        distances[0, 1] = distances[1, 0] = 0.05
        distances[2, 3] = distances[3, 2] = 0.05
        dendrogram = ward_cluster_distances(distances, ["W1", "W2", "W3", "W4"])
        first_two = {frozenset(dendrogram.members(m[3])) for m in dendrogram.merges[:2]}
        assert first_two == {frozenset({"W1", "W2"}), frozenset({"W3", "W4"})}

    def test_monotone_merge_distances(self):
        rng = random.Random(3)
        for _ in range(20):
            n = rng.randint(3, 15)
            dendrogram = ward_cluster_distances(
                random_distances(rng, n), [f"W{i:02d}" for i in range(n)]
            )
            heights = [m[2] for m in dendrogram.merges]
            assert all(b >= a - 1e-12 for a, b in zip(heights, heights[1:]))

    def test_matches_from_scratch_oracle(self):
        rng = random.Random(11)
        for _ in range(30):
            n = rng.randint(3, 20)
            leaves = [f"W{i:02d}" for i in range(n)]
            distances = random_distances(rng, n)
            dendrogram = ward_cluster_distances(distances, leaves)
            oracle_leaves, oracle_merges = oracle_ward(distances, leaves)
            assert dendrogram.leaves == tuple(oracle_leaves)
            assert len(dendrogram.merges) == len(oracle_merges)
            for got, want in zip(dendrogram.merges, oracle_merges):
                assert (got[0], got[1], got[3]) == (want[0], want[1], want[3])
                assert got[2] == pytest.approx(want[2], abs=1e-9)

    def test_matches_scipy_heights(self):
        scipy_cluster = pytest.importorskip("scipy.cluster.hierarchy")
        from scipy.spatial.distance import squareform

        rng = random.Random(17)
        for _ in range(15):
            n = rng.randint(3, 18)
            distances = random_distances(rng, n)
            dendrogram = ward_cluster_distances(distances, [f"W{i:02d}" for i in range(n)])
            linkage = scipy_cluster.linkage(squareform(distances, checks=False), method="ward")
            ours = [m[2] for m in dendrogram.merges]
            theirs = sorted(linkage[:, 2])
            assert np.allclose(sorted(ours), theirs, atol=1e-9)

    def test_permutation_invariance(self):
        rng = random.Random(23)
        n = 12
        leaves = [f"W{i:02d}" for i in range(n)]
        distances = random_distances(rng, n)
        baseline = ward_cluster_distances(distances, leaves)
        perm = list(range(n))
        rng.shuffle(perm)
        shuffled = ward_cluster_distances(
            distances[np.ix_(perm, perm)], [leaves[i] for i in perm]
        )
        assert baseline.leaves == shuffled.leaves
        assert len(baseline.merges) == len(shuffled.merges)
        for a, b in zip(baseline.merges, shuffled.merges):
            assert a[:2] == b[:2] and a[3] == b[3]
            assert a[2] == pytest.approx(b[2], abs=1e-12)


class TestElbowCut:
    def blob_dendrogram(self):
        # two blobs of 3, tight inside (0.1), far apart (1.0)
        n = 6
        distances = np.full((n, n), 1.0)
        np.fill_diagonal(distances, 0.0)
        for i in range(3):
            for j in range(3):
                if i != j:
                    distances[i, j] = 0.1
                    distances[i + 3, j + 3] = 0.1
        return ward_cluster_distances(distances, [f"W{i}" for i in range(n)])

    def test_two_blobs_cut_into_two(self):
        dendrogram = self.blob_dendrogram()
        threshold, clusters = elbow_cut(dendrogram)
        assert len(clusters) == 2
        assert {frozenset(c.wets) for c in clusters} == {
            frozenset({"W0", "W1", "W2"}),
            frozenset({"W3", "W4", "W5"}),
        }

    def test_uniform_ladder_falls_back(self):
        # merge heights in a perfect arithmetic ladder: no distinct knee
        from newsevents.clustering import Dendrogram

        merges = ((0, 1, 0.1, 5), (2, 5, 0.2, 6), (3, 6, 0.3, 7), (4, 7, 0.4, 8))
        dendrogram = Dendrogram(leaves=("A", "B", "C", "D", "E"), merges=merges)
        assert find_elbow_threshold(dendrogram, fallback=0.23) == 0.23

    def test_partition_covers_all_leaves(self):
        dendrogram = self.blob_dendrogram()
        threshold, clusters = elbow_cut(dendrogram)
        seen = [w for c in clusters for w in c.wets]
        assert sorted(seen) == sorted(dendrogram.leaves)
        assert len(seen) == len(set(seen))

    def test_schema_ids_by_decreasing_size(self):
        distances = np.full((5, 5), 1.0)
        np.fill_diagonal(distances, 0.0)
        for i in (0, 1, 2):
            for j in (0, 1, 2):
                if i != j:
                    distances[i, j] = 0.05
        dendrogram = ward_cluster_distances(distances, ["W0", "W1", "W2", "W3", "W4"])
        clusters = cut_dendrogram(dendrogram, 0.5)
        assert clusters[0].schema_id == "S1" and len(clusters[0].wets) == 3
        assert [c.schema_id for c in clusters] == ["S1", "S2", "S3"]

    def test_fixed_cut_applies_merges_strictly_below(self):
        dendrogram = self.blob_dendrogram()
        heights = [m[2] for m in dendrogram.merges]
        clusters = cut_dendrogram(dendrogram, heights[-1])
        assert len(clusters) == 2
        everything = cut_dendrogram(dendrogram, heights[-1] + 1e-9)
        assert len(everything) == 1


class TestSchemaLabel:
    def test_most_frequent_non_generic_sequence(self):
        labels = {
            "W1": "earthquake in New Zealand",
            "W2": "earthquake in France",
            "W3": "volcanic eruption",
        }
        got = schema_label(frozenset(labels), labels, RECOGNIZER)
        assert got == "earthquake"


class TestSchemaFilters:
    def make_events(self):
        def ev(qid, wet, claims):
            return parse_event(
                {
                    "qid": qid,
                    "label": qid,
                    "instance_of": [{"qid": wet, "label": wet}],
                    "point_in_time": "2015-01-01",
                    "claims": claims,
                }
            )

        deaths = {"pid": "P1120", "label": "number of deaths", "kind": "quantity", "value": 10}
        place = {"pid": "P17", "label": "country", "kind": "item",
                 "value": {"qid": "Q1", "label": "France"}}
        return [
            ev("Q1", "W1", [deaths, place]),
            ev("Q2", "W1", [deaths]),
            ev("Q3", "W2", [deaths]),
        ]

    def cluster(self, wets):
        from newsevents.clustering import SchemaCluster

        return SchemaCluster(schema_id="S1", label="crash", wets=tuple(wets))

    def test_quantity_property_ranked_first_and_range_filterable(self):
        filters = derive_schema_filters(self.cluster(["W1", "W2"]), self.make_events())
        assert filters[0].pid == "P1120"
        assert filters[0].coverage == 1.0
        assert filters[0].range_filterable

    def test_low_coverage_dropped(self):
        events = self.make_events()
        filters = derive_schema_filters(self.cluster(["W1", "W2"]), events, min_coverage=0.5)
        assert all(f.pid != "P17" for f in filters)  # P17 on 1 of 3

    def test_no_claims_no_filters(self):
        events = [
            parse_event(
                {
                    "qid": "Q9",
                    "label": "bare",
                    "instance_of": [{"qid": "W9", "label": "W9"}],
                    "point_in_time": "2015-01-01",
                }
            )
        ]
        assert derive_schema_filters(self.cluster(["W9"]), events) == []
