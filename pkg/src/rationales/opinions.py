"""Representative-opinion extraction and redundancy merging.

Summarizing sentences (from any upstream extractive summarizer) are turned
into concise '<noun> is <adjective>' opinions.  Opinions that relate to a
similar group of review units are merged: each opinion gets a feature vector
of its gated alignment probabilities against the entity's units, a graph
connects opinions whose feature cosine exceeds a threshold, and each
connected component becomes one opinion cluster represented by the member
aligning with the most units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .alignment import AbsaAnnotation, Aligner, opinion_surface
from .corpus import SentenceUnit


@dataclass(frozen=True)
class Opinion:
    opinion_id: str
    noun: str
    adjective: str
    surface: str
    source_sentence_id: str
    aspect_category: str
    sentiment: str

    def __post_init__(self):
        if not self.noun or not self.adjective:
            raise ValueError("opinion noun and adjective must be non-empty")
        if self.surface != f"{self.noun} is {self.adjective}":
            raise ValueError(f"surface {self.surface!r} does not match noun/adjective")

    def to_dict(self) -> dict:
        return {
            "opinion_id": self.opinion_id,
            "noun": self.noun,
            "adjective": self.adjective,
            "surface": self.surface,
            "source_sentence_id": self.source_sentence_id,
            "aspect": self.aspect_category,
            "sentiment": self.sentiment,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Opinion":
        return cls(
            opinion_id=d["opinion_id"],
            noun=d["noun"],
            adjective=d["adjective"],
            surface=d["surface"],
            source_sentence_id=d["source_sentence_id"],
            aspect_category=d["aspect"],
            sentiment=d["sentiment"],
        )


@dataclass
class OpinionFeatureVector:
    """Sparse unit-index -> gated alignment probability map for one opinion."""

    opinion_id: str
    entries: dict[int, float] = field(default_factory=dict)

    @property
    def support_size(self) -> int:
        return len(self.entries)

    @property
    def entry_sum(self) -> float:
        return sum(self.entries.values())


@dataclass
class OpinionCluster:
    cluster_id: str
    members: list[Opinion]
    prototype: str  # opinion_id of the prototype member

    @property
    def prototype_opinion(self) -> Opinion:
        for o in self.members:
            if o.opinion_id == self.prototype:
                return o
        raise ValueError(f"prototype {self.prototype!r} not among members")


def extract_opinions(
    summary_sentences: Sequence[tuple[str, AbsaAnnotation]],
) -> list[Opinion]:
    """One opinion per (noun, adjective) pair, deduplicated on exact surface."""
    opinions: list[Opinion] = []
    seen: set[str] = set()
    for i, (_text, ann) in enumerate(summary_sentences):
        for noun, adjective in ann.pairs:
            noun = " ".join(noun.lower().split())
            adjective = " ".join(adjective.lower().split())
            if not noun or not adjective:
                continue
            surface = opinion_surface(noun, adjective)
            if surface in seen:
                continue
            seen.add(surface)
            opinions.append(
                Opinion(
                    opinion_id=f"o{len(opinions):03d}",
                    noun=noun,
                    adjective=adjective,
                    surface=surface,
                    source_sentence_id=f"summary/{i}",
                    aspect_category=ann.aspect_category,
                    sentiment=ann.sentiment,
                )
            )
    return opinions


def build_feature_vector(
    opinion: Opinion, units: Sequence[SentenceUnit], aligner: Aligner
) -> OpinionFeatureVector:
    """Gated alignment probabilities against every unit the opinion aligns with."""
    entries = {}
    for i, unit in enumerate(units):
        if aligner.aligns(unit.text, opinion.surface):
            p = aligner.p_align(unit.text, opinion.surface)
            if p > 0.0:
                entries[i] = p
    return OpinionFeatureVector(opinion.opinion_id, entries)


def opinion_similarity(f: OpinionFeatureVector, g: OpinionFeatureVector) -> float:
    """Cosine similarity of two sparse feature vectors; 0 if either is empty."""
    if not f.entries or not g.entries:
        return 0.0
    small, large = (f.entries, g.entries) if len(f.entries) <= len(g.entries) else (g.entries, f.entries)
    dot = sum(v * large[k] for k, v in small.items() if k in large)
    if dot == 0.0:
        return 0.0
    nf = math.sqrt(sum(v * v for v in f.entries.values()))
    ng = math.sqrt(sum(v * v for v in g.entries.values()))
    return dot / (nf * ng)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def cluster_opinions(
    opinions: Sequence[Opinion],
    vectors: Mapping[str, OpinionFeatureVector],
    beta: float,
) -> list[OpinionCluster]:
    """Connected components of the similarity-above-beta graph.

    Edges require similarity strictly greater than ``beta``; the resulting
    clusters partition the opinion set.  Cluster ids are assigned in order of
    each component's first opinion in the input.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must be in [0, 1], got {beta!r}")
    n = len(opinions)
    uf = _UnionFind(n)
    for i in range(n):
        fi = vectors[opinions[i].opinion_id]
        for j in range(i + 1, n):
            if opinion_similarity(fi, vectors[opinions[j].opinion_id]) > beta:
                uf.union(i, j)
    groups: dict[int, list[Opinion]] = {}
    for i, opinion in enumerate(opinions):
        groups.setdefault(uf.find(i), []).append(opinion)
    clusters = []
    for members in groups.values():  # insertion order = first-member input order
        cluster = OpinionCluster(
            cluster_id=f"g{len(clusters):03d}",
            members=members,
            prototype=select_prototype_members(members, vectors),
        )
        clusters.append(cluster)
    return clusters


def select_prototype_members(
    members: Sequence[Opinion], vectors: Mapping[str, OpinionFeatureVector]
) -> str:
    """Member aligning with the most units; ties by entry sum, then id."""
    if not members:
        raise ValueError("cluster has no members")
    ranked = sorted(
        members,
        key=lambda o: (
            -vectors[o.opinion_id].support_size,
            -vectors[o.opinion_id].entry_sum,
            o.opinion_id,
        ),
    )
    return ranked[0].opinion_id


def select_prototype(
    cluster: OpinionCluster, vectors: Mapping[str, OpinionFeatureVector]
) -> str:
    return select_prototype_members(cluster.members, vectors)
