"""Three-way text-pair alignment scoring.

Everything downstream (opinion clustering, candidate pooling, popularity
graphs) asks one question of a pair of texts: does X align with, oppose, or
stay neutral toward Y?  This module defines the judgment value, the scorer
interface, the sentiment gate that short-circuits cross-sentiment pairs to
zero, a deterministic lexical baseline scorer, a remote-service client, a
persistent judgment cache, and the synthetic pair generator used to
fine-tune learned alignment models offline.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import requests

from ._stopwords import STOPWORDS

logger = logging.getLogger(__name__)

SENTIMENTS = ("positive", "negative", "neutral")
LABELS = ("alignment", "opposite", "neutral")

_WORD_RE = re.compile(r"\w+")

PROB_TOL = 1e-6


class AlignmentError(Exception):
    """Base class for alignment-scoring failures."""


class MissingAnnotationError(AlignmentError, KeyError):
    """A text required by the lexical baseline was never registered."""


class ScoringError(AlignmentError):
    """The scorer produced an invalid or failed response."""


class TransportError(AlignmentError):
    """The remote scorer could not be reached (distinct from scoring errors)."""


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens, punctuation stripped."""
    return _WORD_RE.findall(text.lower())


def opinion_surface(noun: str, adjective: str) -> str:
    """Canonical '<noun> is <adjective>' opinion surface, whitespace-normalized."""
    noun = " ".join(noun.lower().split())
    adjective = " ".join(adjective.lower().split())
    return f"{noun} is {adjective}"


@dataclass(frozen=True)
class AlignmentJudgment:
    """Probability distribution over (aligns, opposes, neutral) for an ordered pair."""

    p_aligns: float
    p_opposes: float
    p_neutral: float

    def __post_init__(self):
        probs = (self.p_aligns, self.p_opposes, self.p_neutral)
        for p in probs:
            if not (-PROB_TOL <= p <= 1.0 + PROB_TOL):
                raise ValueError(f"probability out of [0, 1]: {p!r}")
        total = sum(probs)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"judgment probabilities sum to {total!r}, not 1")

    @property
    def label(self) -> str:
        """Argmax label; exact ties resolve in order alignment > opposite > neutral."""
        probs = (self.p_aligns, self.p_opposes, self.p_neutral)
        return LABELS[max(range(3), key=lambda i: (probs[i], -i))]

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_aligns, self.p_opposes, self.p_neutral)


@dataclass(frozen=True)
class AbsaAnnotation:
    """Aspect category, sentiment, and (noun, adjective) opinion pairs of a sentence."""

    aspect_category: str
    sentiment: str
    pairs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.sentiment not in SENTIMENTS:
            raise ValueError(f"unknown sentiment {self.sentiment!r}")

    @classmethod
    def from_dict(cls, d: Mapping) -> "AbsaAnnotation":
        return cls(
            aspect_category=d["aspect"],
            sentiment=d["sentiment"],
            pairs=tuple((n, a) for n, a in d.get("pairs", [])),
        )

    def to_dict(self) -> dict:
        return {
            "aspect": self.aspect_category,
            "sentiment": self.sentiment,
            "pairs": [list(p) for p in self.pairs],
        }


@dataclass(frozen=True)
class AnnotatedText:
    """A text together with its ABSA annotation and token list."""

    text: str
    annotation: AbsaAnnotation
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class LabeledPair:
    """A synthetic fine-tuning pair for the alignment model.

    ``x_index``/``y_index`` point back to the source sentences and exist for
    conformance checking only; they are not serialized.
    """

    x_text: str
    y_text: str
    pair_kind: str  # "sent_opinion" | "sent_sent"
    label: str  # "alignment" | "opposite" | "neutral"
    x_index: int = -1
    y_index: int = -1

    def __post_init__(self):
        if self.label in ("neutral", "opposite") and self.x_text == self.y_text:
            raise ValueError(f"{self.label} pair with identical texts")

    def to_dict(self) -> dict:
        return {
            "x": self.x_text,
            "y": self.y_text,
            "kind": self.pair_kind,
            "label": self.label,
        }


def _content_set(tokens: Iterable[str]) -> frozenset[str]:
    return frozenset(t for t in tokens if t not in STOPWORDS)


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 1.0
    union = a | b
    return len(a & b) / len(union)


def lexical_judge(x: AnnotatedText, y: AnnotatedText) -> AlignmentJudgment:
    """Deterministic annotation-driven baseline judgment.

    Same aspect and sentiment: p_aligns = 0.5 + 0.5 * J (J = Jaccard overlap
    of content-token sets), remainder split equally.  Same aspect with
    strictly opposite (positive vs negative) sentiment: opposes with 0.9.
    Anything else, including same-aspect pairs where exactly one side is
    sentiment-neutral, is neutral with 0.9.
    """
    same_aspect = (
        x.annotation.aspect_category.strip().lower()
        == y.annotation.aspect_category.strip().lower()
    )
    sx, sy = x.annotation.sentiment, y.annotation.sentiment
    if same_aspect and sx == sy:
        j = _jaccard(_content_set(x.tokens), _content_set(y.tokens))
        p_align = 0.5 + 0.5 * j
        rest = (1.0 - p_align) / 2.0
        return AlignmentJudgment(p_align, rest, rest)
    if same_aspect and {sx, sy} == {"positive", "negative"}:
        return AlignmentJudgment(0.05, 0.9, 0.05)
    return AlignmentJudgment(0.05, 0.05, 0.9)


class Aligner:
    """Scorer interface: a 3-way judgment plus the sentiment gate.

    Subclasses implement :meth:`judge` and :meth:`sentiment_of`.  The
    derived operations :meth:`p_align` and :meth:`aligns` apply the gate:
    whenever both sentiments are known and differ, p_align is 0 and the
    pair never counts as aligned.  Unknown sentiment disables the gate.
    """

    scorer_id: str = "aligner"

    def judge(self, x: str, y: str) -> AlignmentJudgment:
        raise NotImplementedError

    def sentiment_of(self, text: str) -> str | None:
        raise NotImplementedError

    def _gate_blocks(self, x: str, y: str) -> bool:
        sx = self.sentiment_of(x)
        sy = self.sentiment_of(y)
        return sx is not None and sy is not None and sx != sy

    def p_align(self, x: str, y: str) -> float:
        if self._gate_blocks(x, y):
            return 0.0
        return self.judge(x, y).p_aligns

    def aligns(self, x: str, y: str) -> bool:
        if self._gate_blocks(x, y):
            return False
        return self.judge(x, y).label == "alignment"


class LexicalAligner(Aligner):
    """Aligner backed by :func:`lexical_judge` over registered annotations."""

    def __init__(self):
        self.scorer_id = "lexical-v1"
        self._by_text: dict[str, AnnotatedText] = {}
        self.judge_calls = 0

    def register(
        self,
        text: str,
        annotation: AbsaAnnotation,
        tokens: Sequence[str] | None = None,
    ) -> None:
        if tokens is None:
            tokens = tokenize(text)
        self._by_text[text] = AnnotatedText(text, annotation, tuple(tokens))

    def _lookup(self, text: str) -> AnnotatedText:
        try:
            return self._by_text[text]
        except KeyError:
            raise MissingAnnotationError(f"no annotation registered for {text!r}")

    def judge(self, x: str, y: str) -> AlignmentJudgment:
        self.judge_calls += 1
        return lexical_judge(self._lookup(x), self._lookup(y))

    def sentiment_of(self, text: str) -> str | None:
        annotated = self._by_text.get(text)
        return annotated.annotation.sentiment if annotated else None


def _text_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class CachedAligner(Aligner):
    """Wraps an aligner with an in-memory and optionally on-disk judgment cache.

    Judgments are keyed on (scorer_id, hash(x), hash(y)); ordered pairs are
    cached separately since judge is not symmetric.  The persistent cache is
    an append-only JSONL file; I/O failures degrade to uncached operation
    with a single warning.
    """

    def __init__(self, inner: Aligner, path: str | Path | None = None):
        self.inner = inner
        self.scorer_id = inner.scorer_id
        self.path = Path(path) if path is not None else None
        self.scorer_calls = 0
        self._mem: dict[tuple[str, str], AlignmentJudgment] = {}
        self._persist = self.path is not None
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        try:
            with open(self.path, encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    if rec.get("scorer") != self.scorer_id:
                        continue
                    p = rec["p"]
                    self._mem[(rec["x_hash"], rec["y_hash"])] = AlignmentJudgment(
                        p[0], p[1], p[2]
                    )
        except (OSError, ValueError, KeyError) as exc:
            logger.warning("alignment cache %s unreadable (%s); ignoring", self.path, exc)

    def _append(self, key: tuple[str, str], judgment: AlignmentJudgment) -> None:
        if not self._persist:
            return
        rec = {
            "scorer": self.scorer_id,
            "x_hash": key[0],
            "y_hash": key[1],
            "p": list(judgment.as_tuple()),
        }
        try:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(json.dumps(rec) + "\n")
        except OSError as exc:
            logger.warning("alignment cache %s not writable (%s); caching in memory only",
                           self.path, exc)
            self._persist = False

    def judge(self, x: str, y: str) -> AlignmentJudgment:
        key = (_text_hash(x), _text_hash(y))
        hit = self._mem.get(key)
        if hit is not None:
            return hit
        self.scorer_calls += 1
        judgment = self.inner.judge(x, y)
        self._mem[key] = judgment
        self._append(key, judgment)
        return judgment

    def sentiment_of(self, text: str) -> str | None:
        return self.inner.sentiment_of(text)


class RemoteAligner(Aligner):
    """Client for the HTTP scorer service's alignment and sentiment tasks."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self._session = requests.Session()
        self._sentiments: dict[str, str] = {}
        model = self._health()
        self.scorer_id = f"remote:{model}"

    def _health(self) -> str:
        try:
            resp = self._session.get(f"{self.endpoint}/v1/health", timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(f"scorer service unreachable at {self.endpoint}: {exc}")
        if resp.status_code != 200:
            raise ScoringError(f"scorer service unhealthy: HTTP {resp.status_code}")
        try:
            return resp.json().get("model", "unknown")
        except ValueError:
            raise ScoringError("scorer health response is not JSON")

    def _score(self, task: str, items: list[dict]) -> list:
        try:
            resp = self._session.post(
                f"{self.endpoint}/v1/score",
                json={"task": task, "items": items},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"scorer service unreachable: {exc}")
        if resp.status_code != 200:
            raise ScoringError(f"scorer returned HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            results = resp.json()["results"]
        except (ValueError, KeyError):
            raise ScoringError("malformed scorer response")
        if len(results) != len(items):
            raise ScoringError(
                f"scorer returned {len(results)} results for {len(items)} items"
            )
        return results

    def judge(self, x: str, y: str) -> AlignmentJudgment:
        return self.judge_batch([(x, y)])[0]

    def judge_batch(self, pairs: Sequence[tuple[str, str]]) -> list[AlignmentJudgment]:
        items = [{"x": x, "y": y} for x, y in pairs]
        results = self._score("align", items)
        out = []
        for res in results:
            p = res["p"]
            out.append(AlignmentJudgment(p[0], p[1], p[2]))
        return out

    def sentiment_of(self, text: str) -> str | None:
        hit = self._sentiments.get(text)
        if hit is None:
            res = self._score("sentiment", [{"text": text}])[0]
            hit = res["label"]
            self._sentiments[text] = hit
        return hit


class RemoteAbsaTagger:
    """ABSA annotations via the HTTP scorer service."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self._session = requests.Session()

    def annotate(self, text: str) -> AbsaAnnotation:
        try:
            resp = self._session.post(
                f"{self.endpoint}/v1/score",
                json={"task": "absa", "items": [{"text": text}]},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"absa service unreachable: {exc}")
        if resp.status_code != 200:
            raise ScoringError(f"absa service returned HTTP {resp.status_code}")
        return AbsaAnnotation.from_dict(resp.json()["results"][0])


@dataclass
class PairGeneration:
    """Synthetic pairs plus a per-(kind, label) count of skipped sentences."""

    pairs: list[LabeledPair] = field(default_factory=list)
    skipped: Counter = field(default_factory=Counter)


def _opposite(sentiment: str) -> str | None:
    if sentiment == "positive":
        return "negative"
    if sentiment == "negative":
        return "positive"
    return None  # "opposite" is undefined for neutral sentiment


def generate_finetuning_pairs(
    sentences: Sequence[tuple[str, AbsaAnnotation]],
    per_label: int = 1,
    seed: int = 0,
) -> PairGeneration:
    """Build Sent-Opinion and Sent-Sent fine-tuning pairs from annotated sentences.

    For each sentence X and each label, up to ``per_label`` pairs of each kind
    are emitted:

    * Sent-Opinion (Y is a '<noun> is <adjective>' opinion): alignment pairs
      use opinions from X itself; neutral pairs draw an opinion from another
      sentence with the same sentiment but a different category; opposite
      pairs draw from the same category with the opposite sentiment.
    * Sent-Sent (Y is a sentence): alignment pairs sample a sentence with the
      same aspect and sentiment as X (X itself is eligible); neutral and
      opposite pairs sample other sentences under the same category/sentiment
      rules as above, using the sentence text itself as Y.

    Labels with no eligible partner are skipped silently and counted in the
    returned report.  Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    out = PairGeneration()
    n = len(sentences)

    def sample(eligible: list[int], count: int) -> list[int]:
        if not eligible:
            return []
        take = min(count, len(eligible))
        idx = rng.choice(len(eligible), size=take, replace=False)
        return [eligible[i] for i in sorted(idx)]

    def opinion_of(j: int) -> str:
        text_j, ann_j = sentences[j]
        pairs_j = ann_j.pairs
        pick = int(rng.integers(len(pairs_j))) if len(pairs_j) > 1 else 0
        noun, adj = pairs_j[pick]
        return opinion_surface(noun, adj)

    for i, (text, ann) in enumerate(sentences):
        same_cat = [
            j
            for j in range(n)
            if j != i
            and sentences[j][1].aspect_category == ann.aspect_category
        ]
        diff_cat_same_sent = [
            j
            for j in range(n)
            if j != i
            and sentences[j][1].aspect_category != ann.aspect_category
            and sentences[j][1].sentiment == ann.sentiment
        ]
        opp = _opposite(ann.sentiment)
        same_cat_opp_sent = (
            [j for j in same_cat if sentences[j][1].sentiment == opp]
            if opp is not None
            else []
        )

        # Sent-Opinion: alignment from the sentence's own opinion pairs.
        if ann.pairs:
            for noun, adj in ann.pairs[:per_label]:
                out.pairs.append(
                    LabeledPair(text, opinion_surface(noun, adj),
                                "sent_opinion", "alignment", i, i)
                )
        else:
            out.skipped[("sent_opinion", "alignment")] += 1

        for label, pool in (
            ("neutral", diff_cat_same_sent),
            ("opposite", same_cat_opp_sent),
        ):
            with_pairs = [j for j in pool if sentences[j][1].pairs]
            chosen = sample(with_pairs, per_label)
            if not chosen:
                out.skipped[("sent_opinion", label)] += 1
            for j in chosen:
                out.pairs.append(
                    LabeledPair(text, opinion_of(j), "sent_opinion", label, i, j)
                )

        # Sent-Sent: alignment partners share aspect and sentiment (self eligible).
        align_pool = [i] + [
            j for j in same_cat if sentences[j][1].sentiment == ann.sentiment
        ]
        chosen = sample(sorted(align_pool), per_label)
        if not chosen:
            out.skipped[("sent_sent", "alignment")] += 1
        for j in chosen:
            out.pairs.append(
                LabeledPair(text, sentences[j][0], "sent_sent", "alignment", i, j)
            )

        for label, pool in (
            ("neutral", diff_cat_same_sent),
            ("opposite", same_cat_opp_sent),
        ):
            distinct = [j for j in pool if sentences[j][0] != text]
            chosen = sample(distinct, per_label)
            if not chosen:
                out.skipped[("sent_sent", label)] += 1
            for j in chosen:
                out.pairs.append(
                    LabeledPair(text, sentences[j][0], "sent_sent", label, i, j)
                )

    return out


def write_pairs_jsonl(pairs: Iterable[LabeledPair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for pair in pairs:
            f.write(json.dumps(pair.to_dict()) + "\n")
