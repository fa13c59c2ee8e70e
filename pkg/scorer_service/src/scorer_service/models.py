"""Deterministic stub models implementing the task signatures.

Each model is a drop-in stand-in for a learned checkpoint: inference-mode
deterministic, batched, and cheap.  Outputs are heuristic but shaped
correctly (alignment probabilities form a simplex, sentiment labels come
with confidences, embeddings are unit-normalized), so clients and contract
tests behave exactly as they would against real models.
"""

from __future__ import annotations

import hashlib
import re

_WORD_RE = re.compile(r"\w+")

_POSITIVE = frozenset("""
amazing awesome best better bright clean comfortable delicious excellent
fabulous fantastic fresh friendly good great happy heavenly helpful ideal
kind lovely loved nice perfect pleasant quiet relaxing rich spacious
spotless stunning superb tasty warm welcoming wonderful
""".split())

_NEGATIVE = frozenset("""
awful bad bland broken cold cramped dirty disappointing dreadful dusty
gross hard horrible loud mediocre musty noisy poor rude slow spotty stale
terrible tiny uncomfortable unhelpful worst
""".split())

_ASPECT_KEYWORDS = {
    "rooms": ("room", "rooms", "bed", "beds", "bathroom", "suite", "balcony"),
    "service": ("staff", "service", "reception", "concierge", "barista",
                "waiter", "porter", "housekeeping", "owner"),
    "location": ("location", "downtown", "walk", "distance", "located",
                 "neighborhood", "harborfront"),
    "breakfast": ("breakfast", "brunch", "buffet", "omelet"),
    "food": ("food", "coffee", "espresso", "pastries", "meal", "menu",
             "dinner", "lunch"),
    "wifi": ("wifi", "internet", "router"),
    "pool": ("pool", "swimming", "jacuzzi"),
    "noise": ("noise", "noisy", "loud", "quiet"),
}

_PAIR_RE = re.compile(
    r"\b(\w+)\s+(?:is|was|are|were|felt|seemed|looked)\s+"
    r"(?:\w+ly\s+)?(?:very\s+|so\s+|really\s+)?(\w+)"
)


def _tokens(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def _jaccard(a: set[str], b: set[str]) -> float:
    if not a and not b:
        return 1.0
    union = a | b
    return len(a & b) / len(union) if union else 0.0


def _polarity(text: str) -> tuple[int, int]:
    toks = _tokens(text)
    return (
        sum(1 for t in toks if t in _POSITIVE),
        sum(1 for t in toks if t in _NEGATIVE),
    )


class AlignModel:
    model_id = "stub-align-v1"

    def score(self, x: str, y: str) -> list[float]:
        tx, ty = set(_tokens(x)), set(_tokens(y))
        overlap = _jaccard(tx, ty)
        px, nx = _polarity(x)
        py, ny = _polarity(y)
        sign_x = 1 if px >= nx else -1
        sign_y = 1 if py >= ny else -1
        conflict = 1.0 if sign_x != sign_y and (px + nx) and (py + ny) else 0.0
        raw_align = 0.1 + 0.8 * overlap * (1.0 - conflict)
        raw_oppose = 0.1 + 0.6 * conflict * min(1.0, overlap + 0.3)
        raw_neutral = 0.25 + 0.5 * (1.0 - overlap)
        total = raw_align + raw_oppose + raw_neutral
        return [raw_align / total, raw_oppose / total, raw_neutral / total]


class SentimentModel:
    model_id = "stub-sentiment-v1"

    def score(self, text: str) -> tuple[str, float]:
        pos, neg = _polarity(text)
        if pos == neg:
            return "neutral", 0.5
        label = "positive" if pos > neg else "negative"
        confidence = 0.5 + 0.5 * abs(pos - neg) / (pos + neg)
        return label, confidence


class SpecificityModel:
    model_id = "stub-specificity-v1"

    def score(self, text: str) -> float:
        toks = _tokens(text)
        if not toks:
            return 0.0
        digits = sum(1 for t in toks if any(c.isdigit() for c in t))
        long_tokens = sum(1 for t in toks if len(t) >= 7)
        return min(1.0, 0.4 * digits + 0.05 * len(toks) + 0.1 * long_tokens)


class EmbedModel:
    model_id = "stub-embed-v1"

    def __init__(self, dim: int = 384):
        self.dim = dim

    def score(self, text: str) -> list[float]:
        toks = _tokens(text)
        feats = toks + [f"{a} {b}" for a, b in zip(toks, toks[1:])]
        vec = [0.0] * self.dim
        for feat in feats:
            digest = hashlib.md5(feat.encode("utf-8")).digest()
            idx = int.from_bytes(digest[:4], "big") % self.dim
            vec[idx] += 1.0 if digest[4] & 1 else -1.0
        norm = sum(v * v for v in vec) ** 0.5
        return [v / norm for v in vec] if norm > 0 else vec


class AbsaModel:
    model_id = "stub-absa-v1"

    def __init__(self):
        self._sentiment = SentimentModel()

    def score(self, text: str) -> dict:
        toks = _tokens(text)
        aspect = "general"
        best_hits = 0
        for name, keywords in _ASPECT_KEYWORDS.items():
            hits = sum(1 for t in toks if t in keywords)
            if hits > best_hits:
                aspect, best_hits = name, hits
        label, _ = self._sentiment.score(text)
        pairs = [
            [noun, adj]
            for noun, adj in _PAIR_RE.findall(text.lower())
            if adj in _POSITIVE or adj in _NEGATIVE
        ]
        return {"aspect": aspect, "sentiment": label, "pairs": pairs}


class EntailModel:
    model_id = "stub-entail-v1"

    def score(self, premise: str, hypothesis: str) -> float:
        tp, th = set(_tokens(premise)), set(_tokens(hypothesis))
        if not th:
            return 0.0
        return len(tp & th) / len(th)


def build_models(enabled: tuple[str, ...], embed_dim: int) -> dict:
    registry = {
        "align": lambda: AlignModel(),
        "specificity": lambda: SpecificityModel(),
        "sentiment": lambda: SentimentModel(),
        "embed": lambda: EmbedModel(embed_dim),
        "absa": lambda: AbsaModel(),
        "entail": lambda: EntailModel(),
    }
    return {task: registry[task]() for task in enabled if task in registry}
