"""Extractive rationale-based opinion summarization.

Given an entity's review sentences and a set of summarizing sentences from
any upstream extractive summarizer, this package extracts concise
"noun is adjective" representative opinions, builds per-opinion pools of
candidate rationale sentences, and samples a user-specified number of
rationales per opinion that balance relatedness, specificity, popularity,
and diversity.  An automatic evaluation suite for the resulting rationale
sets is included.
"""

__version__ = "0.1.0"


def toy_corpus_path():
    """Path to the bundled toy review corpus (JSONL, 3 entities x 20 reviews)."""
    from importlib.resources import files

    return files(__name__) / "data" / "toy" / "corpus.jsonl"


def toy_summaries_path():
    """Path to the bundled summary sentences for the toy corpus."""
    from importlib.resources import files

    return files(__name__) / "data" / "toy" / "summaries.jsonl"
