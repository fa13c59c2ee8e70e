"""Corpus loading, entity filtering, and clause segmentation.

Review corpora arrive as JSONL with one record per review:

    {"entity_id": str, "review_id": str,
     "sentences": [{"text": str, "parse": str|null, "absa": {...}|null}]}

``parse`` is a Penn-Treebank-style bracketed constituency tree used to split
multi-aspect sentences into clause units; ``absa`` is an optional per-sentence
aspect/sentiment annotation consumed by the lexical alignment baseline.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from ._rng import derive_rng
from .alignment import AbsaAnnotation


class CorpusError(ValueError):
    """Malformed corpus file or record."""


class ParseTreeError(ValueError):
    """Malformed constituency parse string."""


@dataclass(frozen=True)
class RawSentence:
    text: str
    parse: str | None = None
    absa: AbsaAnnotation | None = None


@dataclass
class Review:
    review_id: str
    sentences: list[RawSentence]


@dataclass
class Entity:
    entity_id: str
    reviews: list[Review]


@dataclass
class ReviewCorpus:
    entities: list[Entity]

    def entity_count(self) -> int:
        return len(self.entities)

    def review_count(self) -> int:
        return sum(len(e.reviews) for e in self.entities)

    def sentence_count(self) -> int:
        return sum(len(r.sentences) for e in self.entities for r in e.reviews)


@dataclass(frozen=True)
class SentenceUnit:
    """A review sentence or extracted clause; the atom of rationale selection."""

    unit_id: str
    entity_id: str
    source_sentence_id: str
    kind: str  # "whole_sentence" | "clause"
    text: str
    tokens: tuple[str, ...]
    char_span: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "entity_id": self.entity_id,
            "source_sentence_id": self.source_sentence_id,
            "kind": self.kind,
            "text": self.text,
            "tokens": list(self.tokens),
            "char_span": list(self.char_span),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SentenceUnit":
        return cls(
            unit_id=d["unit_id"],
            entity_id=d["entity_id"],
            source_sentence_id=d["source_sentence_id"],
            kind=d["kind"],
            text=d["text"],
            tokens=tuple(d["tokens"]),
            char_span=(d["char_span"][0], d["char_span"][1]),
        )


def load_corpus(path: str | Path, format: str = "jsonl") -> ReviewCorpus:
    """Load a review corpus, grouping per-review records by entity in file order."""
    if format != "jsonl":
        raise ValueError(f"unsupported corpus format {format!r}")
    path = Path(path)
    entities: dict[str, Entity] = {}
    seen_reviews: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON ({exc.msg})")
            try:
                entity_id = rec["entity_id"]
                review_id = rec["review_id"]
                raw_sentences = rec["sentences"]
            except (KeyError, TypeError) as exc:
                raise CorpusError(f"{path}:{lineno}: missing field {exc}")
            key = (entity_id, review_id)
            if key in seen_reviews:
                raise CorpusError(
                    f"{path}:{lineno}: duplicate review {review_id!r} "
                    f"for entity {entity_id!r}"
                )
            seen_reviews.add(key)
            sentences = []
            for s in raw_sentences:
                try:
                    text = s["text"]
                except (KeyError, TypeError):
                    raise CorpusError(f"{path}:{lineno}: sentence missing 'text'")
                if not isinstance(text, str) or not text.strip():
                    raise CorpusError(f"{path}:{lineno}: empty sentence text")
                absa = s.get("absa")
                sentences.append(
                    RawSentence(
                        text=text.strip(),
                        parse=s.get("parse"),
                        absa=AbsaAnnotation.from_dict(absa) if absa else None,
                    )
                )
            entity = entities.get(entity_id)
            if entity is None:
                entity = entities[entity_id] = Entity(entity_id, [])
            entity.reviews.append(Review(review_id, sentences))
    return ReviewCorpus(list(entities.values()))


def filter_entities(
    corpus: ReviewCorpus, min_reviews: int, max_reviews: int, seed: int
) -> ReviewCorpus:
    """Drop entities with too few reviews; downsample the oversized ones.

    Downsampling is uniform without replacement from a per-entity substream of
    ``seed``, so the result is deterministic and independent of entity order.
    Idempotent: a second pass with the same bounds changes nothing.
    """
    if min_reviews < 1:
        raise ValueError("min_reviews must be >= 1")
    if max_reviews < min_reviews:
        raise ValueError("max_reviews must be >= min_reviews")
    kept = []
    for entity in corpus.entities:
        n = len(entity.reviews)
        if n < min_reviews:
            continue
        reviews = entity.reviews
        if n > max_reviews:
            rng = derive_rng(seed, "filter", entity.entity_id)
            idx = sorted(rng.choice(n, size=max_reviews, replace=False).tolist())
            reviews = [entity.reviews[i] for i in idx]
        kept.append(Entity(entity.entity_id, list(reviews)))
    return ReviewCorpus(kept)


# ---------------------------------------------------------------------------
# Constituency parse trees
# ---------------------------------------------------------------------------

_TREE_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")

# PTB escape sequences mapped back to their surface forms for text alignment.
_PTB_UNESCAPE = {
    "-LRB-": "(", "-RRB-": ")",
    "-LSB-": "[", "-RSB-": "]",
    "-LCB-": "{", "-RCB-": "}",
    "``": '"', "''": '"',
}


@dataclass
class ParseNode:
    tag: str
    children: list["ParseNode"] = field(default_factory=list)
    token: str | None = None
    token_count: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    def leaves(self) -> Iterator[str]:
        if self.is_leaf:
            yield self.token
        for child in self.children:
            yield from child.leaves()


def _base_tag(tag: str) -> str:
    """Strip PTB function-tag and coindex suffixes: 'S-TPC-1' -> 'S'."""
    return tag.split("-")[0].split("=")[0]


def parse_tree(s: str) -> ParseNode:
    """Parse a bracketed constituency string into a ParseNode tree."""
    tokens = _TREE_TOKEN_RE.findall(s)
    if not tokens:
        raise ParseTreeError("empty parse string")
    pos = 0

    def parse_node() -> ParseNode:
        nonlocal pos
        if tokens[pos] != "(":
            raise ParseTreeError(f"expected '(' at token {pos}")
        pos += 1
        if pos >= len(tokens):
            raise ParseTreeError("unterminated node")
        if tokens[pos] == "(":  # PTB-style unlabeled root: "( (S ...))"
            tag = "ROOT"
        elif tokens[pos] == ")":
            raise ParseTreeError("empty node")
        else:
            tag = tokens[pos]
            pos += 1
        node = ParseNode(tag=tag)
        terminals: list[str] = []
        while pos < len(tokens) and tokens[pos] != ")":
            if tokens[pos] == "(":
                node.children.append(parse_node())
            else:
                terminals.append(tokens[pos])
                pos += 1
        if pos >= len(tokens):
            raise ParseTreeError(f"unbalanced parentheses in node {tag!r}")
        pos += 1  # consume ")"
        if terminals and node.children:
            raise ParseTreeError(f"node {tag!r} mixes tokens and subtrees")
        if terminals:
            if len(terminals) > 1:
                raise ParseTreeError(f"leaf {tag!r} carries multiple tokens")
            node.token = terminals[0]
            node.token_count = 1
        elif node.children:
            node.token_count = sum(c.token_count for c in node.children)
        else:
            raise ParseTreeError(f"node {tag!r} is empty")
        return node

    root = parse_node()
    if pos != len(tokens):
        raise ParseTreeError("trailing content after root node")
    return root


def _clause_token_spans(
    root: ParseNode, l_max: int, l_min: int
) -> list[tuple[int, int]]:
    """Token spans of clauses emitted by the bounded S-node traversal.

    At each S node: recurse into children when its yield exceeds ``l_max``
    (it may still mix aspects), emit it and stop descending when the yield
    length is within [l_min, l_max], and stop without emitting below
    ``l_min``.  SBAR nodes stop the traversal outright since they usually
    complement another clause.
    """
    spans: list[tuple[int, int]] = []

    def descend(node: ParseNode, offset: int) -> None:
        for child in node.children:
            visit(child, offset)
            offset += child.token_count

    def visit(node: ParseNode, offset: int) -> None:
        tag = _base_tag(node.tag)
        if tag == "SBAR":
            return
        if tag == "S":
            n = node.token_count
            if n > l_max:
                descend(node, offset)
            elif n >= l_min:
                spans.append((offset, offset + n))
            return
        descend(node, offset)

    visit(root, 0)
    return spans


def _align_tokens(text: str, leaves: list[str]) -> list[tuple[int, int]] | None:
    """Char offsets of each leaf token within the raw sentence, or None."""
    offsets = []
    cursor = 0
    for leaf in leaves:
        surface = _PTB_UNESCAPE.get(leaf, leaf)
        start = text.find(surface, cursor)
        if start < 0:
            return None
        cursor = start + len(surface)
        offsets.append((start, cursor))
    return offsets


def _whole_sentence_unit(
    text: str, entity_id: str, source_sentence_id: str
) -> SentenceUnit:
    text = text.strip()
    tokens = tuple(t.lower() for t in text.split())
    return SentenceUnit(
        unit_id=f"{source_sentence_id}/0-{len(text)}",
        entity_id=entity_id,
        source_sentence_id=source_sentence_id,
        kind="whole_sentence",
        text=text,
        tokens=tokens,
        char_span=(0, len(text)),
    )


def segment_sentence(
    tree: ParseNode,
    text: str,
    l_max: int,
    l_min: int,
    *,
    entity_id: str = "",
    source_sentence_id: str = "",
) -> list[SentenceUnit]:
    """Split one sentence into clause units, or fall back to the whole sentence.

    After the bounded traversal, the whole sentence is returned instead of
    clauses when (a) at most one clause was emitted, or (b) two consecutive
    emitted clauses are separated by more than ``l_min`` source tokens, since
    the dropped material would leave the clauses incomplete.
    """
    if l_min < 1 or l_max <= l_min:
        raise ValueError("require l_max > l_min >= 1")
    text = text.strip()
    if not text:
        raise ValueError("empty sentence text")
    spans = _clause_token_spans(tree, l_max, l_min)
    if len(spans) <= 1:
        return [_whole_sentence_unit(text, entity_id, source_sentence_id)]
    for (_, prev_end), (next_start, _) in zip(spans, spans[1:]):
        if next_start - prev_end > l_min:
            return [_whole_sentence_unit(text, entity_id, source_sentence_id)]
    leaves = list(tree.leaves())
    offsets = _align_tokens(text, leaves)
    if offsets is None:
        # Tree tokens do not line up with the raw text; keep it whole.
        return [_whole_sentence_unit(text, entity_id, source_sentence_id)]
    units = []
    for tok_start, tok_end in spans:
        char_start = offsets[tok_start][0]
        char_end = offsets[tok_end - 1][1]
        clause_tokens = tuple(
            _PTB_UNESCAPE.get(t, t).lower() for t in leaves[tok_start:tok_end]
        )
        units.append(
            SentenceUnit(
                unit_id=f"{source_sentence_id}/{char_start}-{char_end}",
                entity_id=entity_id,
                source_sentence_id=source_sentence_id,
                kind="clause",
                text=text[char_start:char_end],
                tokens=clause_tokens,
                char_span=(char_start, char_end),
            )
        )
    return units


def sentences_to_units(
    corpus: ReviewCorpus,
    use_clauses: bool = True,
    l_max: int = 20,
    l_min: int = 2,
) -> list[SentenceUnit]:
    """Turn every corpus sentence into one or more sentence units.

    With ``use_clauses`` enabled, sentences carrying a parse are segmented;
    sentences without one degrade to a single whole_sentence unit.
    """
    units: list[SentenceUnit] = []
    for entity in corpus.entities:
        for review in entity.reviews:
            for i, sentence in enumerate(review.sentences):
                sid = f"{entity.entity_id}/{review.review_id}/s{i}"
                if not use_clauses or sentence.parse is None:
                    units.append(
                        _whole_sentence_unit(sentence.text, entity.entity_id, sid)
                    )
                    continue
                tree = parse_tree(sentence.parse)
                units.extend(
                    segment_sentence(
                        tree,
                        sentence.text,
                        l_max,
                        l_min,
                        entity_id=entity.entity_id,
                        source_sentence_id=sid,
                    )
                )
    return units


def unit_annotations(
    corpus: ReviewCorpus, units: Iterable[SentenceUnit]
) -> dict[str, AbsaAnnotation]:
    """Map unit_id to the ABSA annotation inherited from its source sentence."""
    by_sentence: dict[str, AbsaAnnotation] = {}
    for entity in corpus.entities:
        for review in entity.reviews:
            for i, sentence in enumerate(review.sentences):
                if sentence.absa is not None:
                    sid = f"{entity.entity_id}/{review.review_id}/s{i}"
                    by_sentence[sid] = sentence.absa
    out = {}
    for unit in units:
        ann = by_sentence.get(unit.source_sentence_id)
        if ann is not None:
            out[unit.unit_id] = ann
    return out
