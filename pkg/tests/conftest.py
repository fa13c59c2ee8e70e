"""Shared test helpers: annotation builders and controllable stub aligners."""

from __future__ import annotations

from collections import Counter

import pytest

from rationales.alignment import (
    AbsaAnnotation,
    Aligner,
    AlignmentJudgment,
    LabeledPair,
    opinion_surface,
)


def ann(aspect: str, sentiment: str = "positive", pairs=()) -> AbsaAnnotation:
    return AbsaAnnotation(aspect, sentiment, tuple(tuple(p) for p in pairs))


class MapAligner(Aligner):
    """Aligner with explicit per-pair judgments, for controlled graph tests.

    ``judgments`` maps (x, y) to a probability triple; unknown pairs are
    neutral.  ``sentiments`` maps texts to labels (unknown -> gate off).
    """

    def __init__(self, judgments=None, sentiments=None, default=(0.05, 0.05, 0.9)):
        self.scorer_id = "map-test"
        self.judgments = dict(judgments or {})
        self.sentiments = dict(sentiments or {})
        self.default = default
        self.judge_calls = 0

    def judge(self, x: str, y: str) -> AlignmentJudgment:
        self.judge_calls += 1
        p = self.judgments.get((x, y), self.default)
        return AlignmentJudgment(*p)

    def sentiment_of(self, text: str):
        return self.sentiments.get(text)


def eligible_partner_counts(sentences, per_label: int) -> Counter:
    """Brute-force oracle for generate_finetuning_pairs emission counts.

    Counts, per (kind, label), how many pairs should be emitted across all
    sentences given eligibility rules and the per-label cap.
    """
    counts = Counter()
    n = len(sentences)
    for i, (text, a) in enumerate(sentences):
        same_cat = [
            j for j in range(n)
            if j != i and sentences[j][1].aspect_category == a.aspect_category
        ]
        diff_cat_same_sent = [
            j for j in range(n)
            if j != i
            and sentences[j][1].aspect_category != a.aspect_category
            and sentences[j][1].sentiment == a.sentiment
        ]
        opposite = {"positive": "negative", "negative": "positive"}.get(a.sentiment)
        same_cat_opp = [
            j for j in same_cat if sentences[j][1].sentiment == opposite
        ] if opposite else []

        counts[("sent_opinion", "alignment")] += min(per_label, len(a.pairs))
        counts[("sent_opinion", "neutral")] += min(
            per_label, len([j for j in diff_cat_same_sent if sentences[j][1].pairs])
        )
        counts[("sent_opinion", "opposite")] += min(
            per_label, len([j for j in same_cat_opp if sentences[j][1].pairs])
        )
        align_pool = [i] + [
            j for j in same_cat if sentences[j][1].sentiment == a.sentiment
        ]
        counts[("sent_sent", "alignment")] += min(per_label, len(align_pool))
        counts[("sent_sent", "neutral")] += min(
            per_label,
            len([j for j in diff_cat_same_sent if sentences[j][0] != text]),
        )
        counts[("sent_sent", "opposite")] += min(
            per_label, len([j for j in same_cat_opp if sentences[j][0] != text])
        )
    return counts


def check_pair_conformance(pairs: list[LabeledPair], sentences) -> None:
    """Re-read source annotations and assert every pair satisfies its rule."""
    for pair in pairs:
        ax = sentences[pair.x_index][1]
        assert pair.x_text == sentences[pair.x_index][0]
        if pair.pair_kind == "sent_opinion":
            ay = sentences[pair.y_index][1]
            surfaces = {opinion_surface(n, adj) for n, adj in ay.pairs}
            assert pair.y_text in surfaces, pair
            if pair.label == "alignment":
                assert pair.y_index == pair.x_index
            elif pair.label == "neutral":
                assert ay.sentiment == ax.sentiment
                assert ay.aspect_category != ax.aspect_category
            else:  # opposite
                assert ay.aspect_category == ax.aspect_category
                assert {ax.sentiment, ay.sentiment} == {"positive", "negative"}
        else:
            ay = sentences[pair.y_index][1]
            assert pair.y_text == sentences[pair.y_index][0]
            if pair.label == "alignment":
                assert ay.aspect_category == ax.aspect_category
                assert ay.sentiment == ax.sentiment
            elif pair.label == "neutral":
                assert ay.sentiment == ax.sentiment
                assert ay.aspect_category != ax.aspect_category
                assert pair.y_text != pair.x_text
            else:
                assert ay.aspect_category == ax.aspect_category
                assert {ax.sentiment, ay.sentiment} == {"positive", "negative"}
                assert pair.y_text != pair.x_text


@pytest.fixture
def toy_paths():
    import rationales

    return str(rationales.toy_corpus_path()), str(rationales.toy_summaries_path())
