"""Keyword extraction, rationale/pool metrics, and the Overall aggregate."""

import numpy as np
import pytest

from rationales.evaluation import (
    HashEmbedder,
    KeywordSet,
    MetricReport,
    content_tokens,
    extract_keywords,
    lemmatize,
    metric_emb_div,
    metric_emb_rel,
    metric_key_pop,
    metric_key_spec,
    metric_npmi,
    metric_silhouette,
    overall_score,
    preprocess_tokens,
)


class FixedEmbedder:
    def __init__(self, table):
        self.table = {t: np.asarray(v, dtype=float) for t, v in table.items()}

    def embed(self, text):
        return self.table[text]


class TestLemmatize:
    @pytest.mark.parametrize(
        "token,lemma",
        [
            ("rooms", "room"),
            ("cities", "city"),
            ("glasses", "glass"),
            ("boxes", "box"),
            ("dishes", "dish"),
            ("spacious", "spacious"),
            ("bus", "bus"),
            ("this", "this"),
            ("view", "view"),
            ("pastries", "pastry"),
        ],
    )
    def test_suffix_rules(self, token, lemma):
        assert lemmatize(token) == lemma


class TestPreprocess:
    def test_standard_chain(self):
        texts = [
            "The rooms were spacious",
            "rooms everywhere upstairs",
            "spacious halls all around",
            "a quiet garden",
            "another quiet garden walk",
        ]
        docs = preprocess_tokens(texts)
        assert docs[0] == ["room", "spacious"]

    def test_all_stopwords_empty(self):
        docs = preprocess_tokens(["it was the they of", "rooms rooms", "rooms here"])
        assert docs[0] == []

    def test_token_in_most_documents_dropped(self):
        texts = ["hotel alpha", "hotel bravo", "hotel charlie", "alpha bravo charlie"]
        docs = preprocess_tokens(texts)
        for doc in docs:
            assert "hotel" not in doc  # df 3/4 > 50%

    def test_rare_token_dropped(self):
        texts = ["unique alpha", "alpha beta", "beta gamma", "gamma alpha"]
        docs = preprocess_tokens(texts)
        assert "unique" not in docs[0]


class TestExtractKeywords:
    def entity(self):
        set_texts = {
            "loc": [
                "the hotel sits in downtown seattle near the library",
                "vintage downtown seattle blocks invite a walk",
                "seattle downtown walk past the vintage library",
            ],
            "svc": ["staff suggested a seattle downtown walk and the vintage library"],
            "rooms": ["rooms felt calm and fresh", "calm fresh rooms upstairs"],
            "food": ["breakfast was fresh and calm that morning"],
        }
        opinions = {
            "loc": ["location is great"],
            "svc": ["staff is helpful"],
            "rooms": ["room is clean"],
            "food": ["breakfast is good"],
        }
        return set_texts, opinions

    def test_distinctive_tokens_become_keywords(self):
        set_texts, opinions = self.entity()
        index = extract_keywords(set_texts, opinions)
        loc_tokens = [t for t, _ in index.keyword_sets["loc"].keywords]
        assert "seattle" in loc_tokens and "downtown" in loc_tokens
        assert "location" not in loc_tokens and "great" not in loc_tokens

    def test_opinion_tokens_excluded_even_when_frequent(self):
        set_texts, opinions = self.entity()
        set_texts = dict(set_texts)
        set_texts["loc"] = set_texts["loc"] + ["great location great location"]
        set_texts["svc"] = set_texts["svc"] + ["a great location indeed"]
        index = extract_keywords(set_texts, opinions)
        loc_tokens = [t for t, _ in index.keyword_sets["loc"].keywords]
        assert "location" not in loc_tokens and "great" not in loc_tokens

    def test_at_most_five_keywords(self):
        set_texts, opinions = self.entity()
        index = extract_keywords(set_texts, opinions)
        for ks in index.keyword_sets.values():
            assert len(ks.keywords) <= 5
            scores = [s for _, s in ks.keywords]
            assert scores == sorted(scores, reverse=True)
            assert ks.all_keyword_mass == pytest.approx(sum(scores))

    def test_single_set_reports_empty(self):
        index = extract_keywords({"only": ["some text here"]}, {"only": []})
        assert index.keyword_sets["only"].keywords == []
        assert index.keyword_sets["only"].all_keyword_mass == 0.0

    def test_extreme_document_frequencies_absent_from_tables(self):
        set_texts, opinions = self.entity()
        index = extract_keywords(set_texts, opinions)
        all_tokens = {t for table in index.tfidf.values() for t in table}
        # "hotel" appears in one set only (df=1 -> dropped); a token present
        # in 3 of 4 sets would exceed the 50% cap likewise
        assert "hotel" not in all_tokens

    def test_idf_formula_monotone_in_df(self):
        # ln((1+N)/(1+df)) + 1 strictly decreases as df grows
        idf = lambda n, df: np.log((1 + n) / (1 + df)) + 1  # noqa: E731
        assert idf(8, 2) > idf(8, 3) > idf(8, 8)


class TestEmbRel:
    def test_identical_text(self):
        emb = HashEmbedder()
        class Wrap:
            def embed(self, text):
                return emb.embed(text)
        assert metric_emb_rel("room is clean", ["room is clean"], Wrap()) == \
            pytest.approx(1.0)

    def test_mean_of_cosines(self):
        table = {
            "op": [1.0, 0.0],
            "r1": [0.4, np.sqrt(1 - 0.16)],
            "r2": [0.6, 0.8],
        }
        value = metric_emb_rel("op", ["r1", "r2"], FixedEmbedder(table))
        assert value == pytest.approx(0.5)

    def test_orthogonal(self):
        table = {"op": [1.0, 0.0], "r": [0.0, 1.0]}
        assert metric_emb_rel("op", ["r"], FixedEmbedder(table)) == 0.0


def kwset(pairs):
    return KeywordSet("g", list(pairs), sum(s for _, s in pairs))


class TestKeySpec:
    def test_full_coverage(self):
        ks = kwset([("seattle", 0.5), ("downtown", 0.5)])
        assert metric_key_spec(["seattle downtown views"], ks) == 1.0

    def test_no_coverage(self):
        ks = kwset([("seattle", 0.5)])
        assert metric_key_spec(["nothing relevant"], ks) == 0.0

    def test_partial_mass(self):
        ks = kwset([("alpha", 0.3), ("beta", 0.2), ("gamma", 0.5)])
        assert metric_key_spec(["alpha beta"], ks) == pytest.approx(0.5)

    def test_zero_mass_absent(self):
        assert metric_key_spec(["anything"], kwset([])) is None

    def test_lemmatized_match(self):
        ks = kwset([("pastry", 1.0)])
        assert metric_key_spec(["warm pastries"], ks) == 1.0


class TestKeyPop:
    def test_pure_keyword_rationales(self):
        ks = kwset([("alpha", 0.5), ("beta", 0.3)])
        table = {"alpha": 0.5, "beta": 0.3, "gamma": 0.9}
        assert metric_key_pop(["alpha beta"], ks, table) == 1.0

    def test_no_keywords_covered(self):
        ks = kwset([("alpha", 0.5)])
        table = {"alpha": 0.5, "gamma": 0.4}
        assert metric_key_pop(["gamma gamma"], ks, table) == 0.0

    def test_mass_ratio(self):
        ks = kwset([("alpha", 0.4)])
        table = {"alpha": 0.4, "delta": 0.4}
        assert metric_key_pop(["alpha delta"], ks, table) == pytest.approx(0.5)

    def test_out_of_table_tokens_ignored(self):
        ks = kwset([("alpha", 0.4)])
        table = {"alpha": 0.4}
        assert metric_key_pop(["alpha zebra yak"], ks, table) == 1.0

    def test_zero_denominator_absent(self):
        ks = kwset([("alpha", 0.4)])
        assert metric_key_pop(["off vocabulary"], ks, {"alpha": 0.4}) is None

    def test_in_table_non_keyword_addition_can_lower_ratio(self):
        # formula behavior, not a defect: the denominator grows when a new
        # rationale contributes table tokens that are not keywords
        ks = kwset([("alpha", 0.5)])
        table = {"alpha": 0.5, "beta": 0.4}
        before = metric_key_pop(["alpha"], ks, table)
        after = metric_key_pop(["alpha", "beta"], ks, table)
        assert before == 1.0 and after == pytest.approx(0.5 / 0.9)


class TestEmbDiv:
    def test_identical_pair_zero(self):
        emb = HashEmbedder()
        assert metric_emb_div(["same text", "same text"], emb) == pytest.approx(0.0)

    def test_orthogonal_pair(self):
        table = {"a": [1.0, 0.0], "b": [0.0, 1.0]}
        assert metric_emb_div(["a", "b"], FixedEmbedder(table)) == pytest.approx(1.0)

    def test_mean_of_three(self):
        # pairwise cosines 0.2, 0.4, 0.6 -> 1 - 0.4
        table = {
            "a": [1.0, 0.0, 0.0],
            "b": [0.2, np.sqrt(1 - 0.04), 0.0],
        }
        c = np.array([0.4, 0.0, 0.0])
        # choose c with cos(a,c)=0.4 and cos(b,c)=0.6
        remainder = 0.6 - 0.4 * 0.2
        c[1] = remainder / np.sqrt(1 - 0.04)
        c[2] = np.sqrt(1 - c[0] ** 2 - c[1] ** 2)
        table["c"] = c.tolist()
        value = metric_emb_div(["a", "b", "c"], FixedEmbedder(table))
        assert value == pytest.approx(1 - (0.2 + 0.4 + 0.6) / 3)

    def test_single_rationale_absent(self):
        assert metric_emb_div(["only one"], HashEmbedder()) is None


class TestSilhouette:
    def test_perfect_separation(self):
        table = {"a1": [1.0, 0.0], "a2": [1.0, 0.0],
                 "b1": [0.0, 1.0], "b2": [0.0, 1.0]}
        sets = {"A": ["a1", "a2"], "B": ["b1", "b2"]}
        assert metric_silhouette(sets, FixedEmbedder(table)) == pytest.approx(1.0)

    def test_all_identical_zero(self):
        table = {"a": [1.0, 0.0], "b": [1.0, 0.0],
                 "c": [1.0, 0.0], "d": [1.0, 0.0]}
        sets = {"A": ["a", "b"], "B": ["c", "d"]}
        assert metric_silhouette(sets, FixedEmbedder(table)) == pytest.approx(0.0)

    def test_hand_computed_fixture(self):
        # intra distances 0.4 in both sets; cross distances chosen so the
        # mean silhouette is exactly 11/21
        table = {
            "p1": [1.0, 0.0], "p2": [0.6, 0.8],
            "p3": [0.0, 1.0], "p4": [-0.8, 0.6],
        }
        sets = {"A": ["p1", "p2"], "B": ["p3", "p4"]}
        value = metric_silhouette(sets, FixedEmbedder(table))
        assert value == pytest.approx(11 / 21, abs=1e-9)

    def test_singleton_member_scores_zero(self):
        table = {"a": [1.0, 0.0], "b1": [0.0, 1.0], "b2": [0.0, 1.0]}
        sets = {"A": ["a"], "B": ["b1", "b2"]}
        # s(a) = 0 by convention; b members are perfectly separated
        assert metric_silhouette(sets, FixedEmbedder(table)) == pytest.approx(2 / 3)

    def test_fewer_than_two_sets_absent(self):
        assert metric_silhouette({"A": ["x"]}, HashEmbedder()) is None


class TestNpmi:
    def test_perfect_association(self):
        tfidf = {"s": {"alpha": 1.0, "bravo": 0.9}}
        units = ["alpha bravo", "alpha bravo", "charlie delta", "echo fox"]
        assert metric_npmi(tfidf, units) == pytest.approx(1.0, abs=1e-6)

    def test_independence_near_zero(self):
        tfidf = {"s": {"alpha": 1.0, "bravo": 0.9}}
        units = ["alpha bravo", "alpha echo", "bravo echo", "echo fox"]
        # p(alpha)=p(bravo)=1/2, joint=1/4: exactly independent
        assert metric_npmi(tfidf, units) == pytest.approx(0.0, abs=1e-6)

    def test_never_cooccurring_near_minus_one(self):
        tfidf = {"s": {"alpha": 1.0, "bravo": 0.9}}
        units = ["alpha echo", "alpha fox", "bravo echo", "bravo golf"]
        value = metric_npmi(tfidf, units)
        assert value == pytest.approx(-1.0, abs=0.1)

    def test_mean_over_sets(self):
        tfidf = {
            "s1": {"alpha": 1.0, "bravo": 0.9},
            "s2": {"charlie": 1.0},  # fewer than two tokens: skipped
        }
        units = ["alpha bravo", "alpha bravo", "charlie", "delta"]
        assert metric_npmi(tfidf, units) == pytest.approx(1.0, abs=1e-6)

    def test_no_scorable_sets_absent(self):
        assert metric_npmi({"s": {"alpha": 1.0}}, ["alpha"]) is None


class TestOverall:
    def test_dominating_system(self):
        table = {
            "good": {"m1": 0.9, "m2": 0.8},
            "bad": {"m1": 0.1, "m2": 0.2},
        }
        scores = overall_score(table)
        assert scores == {"good": 1.0, "bad": 0.0}

    def test_identical_systems_degenerate(self):
        table = {"a": {"m1": 0.5}, "b": {"m1": 0.5}}
        assert overall_score(table) == {"a": 1.0, "b": 1.0}

    def test_three_point_normalization(self):
        table = {"a": {"m": 0.1}, "b": {"m": 0.2}, "c": {"m": 0.3}}
        scores = overall_score(table)
        assert scores["a"] == pytest.approx(0.0)
        assert scores["b"] == pytest.approx(0.5)
        assert scores["c"] == pytest.approx(1.0)

    def test_single_system_rejected(self):
        with pytest.raises(ValueError):
            overall_score({"only": {"m": 0.5}})

    def test_recorded_system_table(self):
        # seven systems with three metrics each; expected overall values were
        # hand-derived from the min-max construction and are reproduced here
        table = {
            "full": {"emb_rel": 0.422, "key_spec": 0.217, "key_pop": 0.224},
            "wo_rel": {"emb_rel": 0.423, "key_spec": 0.223, "key_pop": 0.225},
            "wo_spec": {"emb_rel": 0.555, "key_spec": 0.147, "key_pop": 0.208},
            "wo_pop": {"emb_rel": 0.369, "key_spec": 0.195, "key_pop": 0.193},
            "llm": {"emb_rel": 0.586, "key_spec": 0.139, "key_pop": 0.129},
            "extr_a": {"emb_rel": 0.615, "key_spec": 0.165, "key_pop": 0.191},
            "extr_b": {"emb_rel": 0.610, "key_spec": 0.142, "key_pop": 0.177},
        }
        expected = {
            "full": 0.710, "wo_rel": 0.740, "wo_spec": 0.559, "wo_pop": 0.445,
            "llm": 0.294, "extr_a": 0.650, "extr_b": 0.505,
        }
        scores = overall_score(table)
        for system, value in expected.items():
            assert scores[system] == pytest.approx(value, abs=5e-3)

    def test_none_metrics_skipped(self):
        table = {
            "a": {"m1": 0.9, "m2": None},
            "b": {"m1": 0.1, "m2": None},
        }
        assert overall_score(table) == {"a": 1.0, "b": 0.0}


class TestHashEmbedder:
    def test_deterministic(self):
        emb = HashEmbedder()
        a = emb.embed("the room was clean")
        b = emb.embed("the room was clean")
        assert np.array_equal(a, b)

    def test_unit_norm(self):
        emb = HashEmbedder()
        assert np.linalg.norm(emb.embed("some text here")) == pytest.approx(1.0)

    def test_empty_text_zero_vector(self):
        emb = HashEmbedder()
        assert np.linalg.norm(emb.embed("")) == 0.0

    def test_bigrams_order_sensitive(self):
        emb = HashEmbedder()
        a = emb.embed("clean room")
        b = emb.embed("room clean")
        assert not np.array_equal(a, b)


class TestContentTokens:
    def test_stopwords_and_lemmas(self):
        assert content_tokens("The rooms were spotless") == ["room", "spotless"]


class TestMetricReport:
    def test_aggregate_and_render(self):
        per_entity = {
            "e1": {"emb_rel": 0.4, "key_spec": 0.2, "key_pop": 0.3,
                   "emb_div": None, "silh": 0.1, "npmi": -0.2, "sc": None},
            "e2": {"emb_rel": 0.6, "key_spec": None, "key_pop": 0.5,
                   "emb_div": 0.8, "silh": 0.3, "npmi": -0.4, "sc": None},
        }
        report = MetricReport.aggregate(per_entity, notes=["test note"])
        assert report.mean["emb_rel"] == pytest.approx(0.5)
        assert report.mean["key_spec"] == pytest.approx(0.2)
        assert report.mean["sc"] is None
        rendered = report.to_table()
        assert "e1" in rendered and "test note" in rendered
        parsed = report.to_json()
        assert "per_entity" in parsed
