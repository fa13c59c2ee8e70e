"""Candidate-pool assembly: relatedness scores, assignment rules, size filter."""

import numpy as np
import pytest

from conftest import MapAligner, ann
from rationales.candidates import build_candidate_sets, cluster_relatedness
from rationales.corpus import SentenceUnit
from rationales.opinions import Opinion, OpinionCluster


def unit(uid, text=None):
    text = text or f"text of {uid}"
    return SentenceUnit(
        unit_id=uid, entity_id="e", source_sentence_id=uid, kind="whole_sentence",
        text=text, tokens=tuple(text.split()), char_span=(0, len(text)),
    )


def opinion(oid, surface_noun, adj="good"):
    return Opinion(
        opinion_id=oid, noun=surface_noun, adjective=adj,
        surface=f"{surface_noun} is {adj}", source_sentence_id="summary/0",
        aspect_category=surface_noun, sentiment="positive",
    )


def cluster(cid, *opinions_):
    return OpinionCluster(cid, list(opinions_), opinions_[0].opinion_id)


ALIGN = (0.7, 0.2, 0.1)


class TestClusterRelatedness:
    def test_singleton_cluster(self):
        o = opinion("o0", "room")
        u = unit("u0")
        aligner = MapAligner(judgments={(u.text, o.surface): (0.6, 0.2, 0.2)})
        assert cluster_relatedness(u, cluster("g0", o), aligner) == pytest.approx(0.6)

    def test_max_over_members(self):
        ops = [opinion(f"o{i}", "room", a) for i, a in enumerate(["clean", "big", "airy"])]
        u = unit("u0")
        aligner = MapAligner(judgments={
            (u.text, ops[0].surface): (0.2, 0.4, 0.4),
            (u.text, ops[1].surface): (0.7, 0.2, 0.1),
            (u.text, ops[2].surface): (0.4, 0.3, 0.3),
        })
        assert cluster_relatedness(u, cluster("g0", *ops), aligner) == pytest.approx(0.7)

    def test_all_gated_zero(self):
        o = opinion("o0", "room")
        u = unit("u0")
        aligner = MapAligner(
            judgments={(u.text, o.surface): (0.9, 0.05, 0.05)},
            sentiments={u.text: "negative", o.surface: "positive"},
        )
        assert cluster_relatedness(u, cluster("g0", o), aligner) == 0.0


class TestBuildCandidateSets:
    def two_cluster_setup(self, e1, e2, aligns_with=("g0", "g1")):
        o1, o2 = opinion("o0", "room"), opinion("o1", "staff")
        clusters = [cluster("g0", o1), cluster("g1", o2)]
        u = unit("u0")
        judgments = {}
        judgments[(u.text, o1.surface)] = (e1, (1 - e1) / 2, (1 - e1) / 2) \
            if "g0" in aligns_with else (e1, 0.05, 0.95 - e1)
        judgments[(u.text, o2.surface)] = (e2, (1 - e2) / 2, (1 - e2) / 2) \
            if "g1" in aligns_with else (e2, 0.05, 0.95 - e2)
        return u, clusters, MapAligner(judgments=judgments)

    def test_argmax_assignment(self):
        u, clusters, aligner = self.two_cluster_setup(0.8, 0.6)
        sets = build_candidate_sets([u], clusters, aligner, min_size=1)
        assert [(s.cluster_id, s.member_unit_ids) for s in sets] == [("g0", ["u0"])]
        assert sets[0].relatedness_to_cluster["u0"] == pytest.approx(0.8)

    def test_no_alignment_unassigned(self):
        u, clusters, aligner = self.two_cluster_setup(0.2, 0.1, aligns_with=())
        assert build_candidate_sets([u], clusters, aligner, min_size=1) == []

    def test_condition_ii_blocks_misaligned_argmax(self):
        # unit aligns only with g0 but is most related to g1 -> unassigned:
        # the g1 judgment has high p_aligns yet its argmax label is opposite
        o1, o2 = opinion("o0", "room"), opinion("o1", "staff")
        clusters = [cluster("g0", o1), cluster("g1", o2)]
        u = unit("u0")
        aligner = MapAligner(judgments={
            (u.text, o1.surface): (0.4, 0.3, 0.3),
            (u.text, o2.surface): (0.45, 0.5, 0.05),
        })
        assert build_candidate_sets([u], clusters, aligner, min_size=1) == []

    def test_min_size_filter(self):
        o = opinion("o0", "room")
        clusters = [cluster("g0", o)]
        units = [unit(f"u{i}") for i in range(4)]
        aligner = MapAligner(judgments={
            (u.text, o.surface): ALIGN for u in units
        })
        assert build_candidate_sets(units, clusters, aligner, min_size=5) == []
        kept = build_candidate_sets(units, clusters, aligner, min_size=4)
        assert len(kept) == 1 and kept[0].size == 4

    def test_tie_breaks_toward_larger_cluster_then_id(self):
        o1, o2 = opinion("o0", "room"), opinion("o1", "rooms", "big")
        big = cluster("g1", o1, opinion("o2", "room", "neat"))
        small = cluster("g0", o2)
        u = unit("u0")
        aligner = MapAligner(judgments={
            (u.text, o1.surface): ALIGN,
            (u.text, o2.surface): ALIGN,
            (u.text, "room is neat"): (0.1, 0.2, 0.7),
        })
        sets = build_candidate_sets([u], [small, big], aligner, min_size=1)
        assert [s.cluster_id for s in sets] == ["g1"]  # larger cluster wins tie
        # equal sizes -> lexicographic cluster_id
        sets = build_candidate_sets(
            [u], [cluster("g5", o1), cluster("g2", o2)], aligner, min_size=1
        )
        assert [s.cluster_id for s in sets] == ["g2"]

    def random_world(self, seed, n_units=30, n_clusters=4):
        rng = np.random.default_rng(seed)
        ops = [opinion(f"o{i}", f"aspect{i}") for i in range(n_clusters)]
        clusters = [cluster(f"g{i}", o) for i, o in enumerate(ops)]
        units = [unit(f"u{i:02d}") for i in range(n_units)]
        judgments = {}
        for u in units:
            for o in ops:
                p = float(rng.uniform(0, 1))
                if rng.random() < 0.5:
                    judgments[(u.text, o.surface)] = (p, (1 - p) * 0.4, (1 - p) * 0.6)
                else:
                    judgments[(u.text, o.surface)] = (p * 0.3, p * 0.1, 1 - p * 0.4)
        return units, clusters, MapAligner(judgments=judgments)

    def test_disjoint_assignment_property(self):
        units, clusters, aligner = self.random_world(7)
        sets = build_candidate_sets(units, clusters, aligner, min_size=1)
        seen = [u for s in sets for u in s.member_unit_ids]
        assert len(seen) == len(set(seen))

    def test_members_dominate_other_clusters(self):
        units, clusters, aligner = self.random_world(8)
        sets = build_candidate_sets(units, clusters, aligner, min_size=1)
        units_by_id = {u.unit_id: u for u in units}
        for s in sets:
            own = {c.cluster_id: c for c in clusters}[s.cluster_id]
            for uid in s.member_unit_ids:
                e_own = cluster_relatedness(units_by_id[uid], own, aligner)
                for other in clusters:
                    e_other = cluster_relatedness(units_by_id[uid], other, aligner)
                    assert e_own >= e_other - 1e-12

    def test_removing_a_unit_never_adds_members(self):
        units, clusters, aligner = self.random_world(9)
        full = build_candidate_sets(units, clusters, aligner, min_size=1)
        reduced = build_candidate_sets(units[:-1], clusters, aligner, min_size=1)
        full_map = {s.cluster_id: set(s.member_unit_ids) for s in full}
        for s in reduced:
            assert set(s.member_unit_ids) <= full_map.get(s.cluster_id, set())
