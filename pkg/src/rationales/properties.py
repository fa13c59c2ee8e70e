"""Rationale property estimation: relatedness, specificity, popularity, diversity.

The first three are combined multiplicatively (after per-pool min-max
normalization) into a salience score; diversity is a group property consumed
directly by the sampler's objective.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import requests

from ._stopwords import STOPWORDS
from .alignment import Aligner, ScoringError, TransportError
from .candidates import CandidateSet, cluster_relatedness
from .corpus import SentenceUnit
from .opinions import OpinionCluster

_WORD_RE = re.compile(r"\w+")


@dataclass(frozen=True)
class TokenBag:
    """Bag-of-words over lowercased, punctuation-split tokens."""

    counts: tuple[tuple[str, int], ...]

    @classmethod
    def from_text(cls, text: str) -> "TokenBag":
        counts: dict[str, int] = {}
        for tok in _WORD_RE.findall(text.lower()):
            counts[tok] = counts.get(tok, 0) + 1
        return cls(tuple(sorted(counts.items())))

    @property
    def norm(self) -> float:
        return math.sqrt(sum(c * c for _, c in self.counts))

    def as_dict(self) -> dict[str, int]:
        return dict(self.counts)


def bag_cosine(a: TokenBag, b: TokenBag) -> float:
    """Cosine of two count vectors; an empty bag is orthogonal to everything."""
    if not a.counts or not b.counts:
        return 0.0
    da, db = a.as_dict(), b.as_dict()
    if len(da) > len(db):
        da, db = db, da
    dot = sum(c * db[t] for t, c in da.items() if t in db)
    if dot == 0:
        return 0.0
    return dot / (a.norm * b.norm)


def diversity(group: Sequence[TokenBag]) -> float:
    """Negated mean pairwise cosine similarity over the group.

    A singleton group has no pairs and scores 0, so the sampler's objective
    degrades to pure salience at k=1.
    """
    k = len(group)
    if k < 1:
        raise ValueError("diversity needs at least one bag")
    if k == 1:
        return 0.0
    total = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            total += bag_cosine(group[i], group[j])
    return -total / (k * (k - 1) / 2)


def minmax_normalize(values: Mapping[str, float]) -> dict[str, float]:
    """Scale values to [0, 1]; a non-discriminating map collapses to all 1.0."""
    if not values:
        raise ValueError("cannot normalize an empty map")
    lo = min(values.values())
    hi = max(values.values())
    if hi == lo:
        return {k: 1.0 for k in values}
    span = hi - lo
    return {k: (v - lo) / span for k, v in values.items()}


@dataclass
class PropertyScores:
    unit_id: str
    rel_raw: float
    spec_raw: float
    pop_raw: float
    rel_n: float
    spec_n: float
    pop_n: float
    sal: float

    def to_dict(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "rel": self.rel_raw,
            "spec": self.spec_raw,
            "pop": self.pop_raw,
            "rel_n": self.rel_n,
            "spec_n": self.spec_n,
            "pop_n": self.pop_n,
            "sal": self.sal,
        }


def relatedness(
    unit: SentenceUnit,
    cluster: OpinionCluster,
    all_clusters: Sequence[OpinionCluster],
    aligner: Aligner,
) -> float:
    """Relatedness of the unit to its cluster relative to every cluster it aligns with.

    The denominator runs over the clusters containing at least one opinion the
    unit aligns with, so the values for one unit sum to exactly 1 across them.
    """
    aligned = [
        c
        for c in all_clusters
        if any(aligner.aligns(unit.text, o.surface) for o in c.members)
    ]
    if not any(c.cluster_id == cluster.cluster_id for c in aligned):
        raise ValueError(
            f"unit {unit.unit_id!r} does not align with cluster {cluster.cluster_id!r}"
        )
    denom = sum(cluster_relatedness(unit, c, aligner) for c in aligned)
    return cluster_relatedness(unit, cluster, aligner) / denom


class BaselineSpecificityScorer:
    """Detail-density proxy usable offline.

    score = min(1, 0.5 * numerals + 0.3 * content_tokens / l_max
                 + 0.2 * rare_tokens / tokens)

    where content tokens are non-stopwords and rare tokens fall outside the
    entity's top document-frequency decile.  A monotone stand-in for the
    learned specificity model served remotely.
    """

    def __init__(self, units: Sequence[SentenceUnit], l_max: int = 20):
        self.l_max = l_max
        df: dict[str, int] = {}
        for unit in units:
            for tok in set(_WORD_RE.findall(unit.text.lower())):
                df[tok] = df.get(tok, 0) + 1
        top = max(1, math.ceil(0.1 * len(df))) if df else 0
        ranked = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))
        self._frequent = frozenset(tok for tok, _ in ranked[:top])

    def score(self, text: str) -> float:
        tokens = _WORD_RE.findall(text.lower())
        if not tokens:
            return 0.0
        numerals = sum(1 for t in tokens if any(ch.isdigit() for ch in t))
        content = sum(1 for t in tokens if t not in STOPWORDS)
        rare = sum(1 for t in tokens if t not in self._frequent)
        return min(
            1.0,
            0.5 * numerals + 0.3 * content / self.l_max + 0.2 * rare / len(tokens),
        )


class RemoteSpecificityScorer:
    """Specificity via the HTTP scorer service."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self._session = requests.Session()

    def score(self, text: str) -> float:
        try:
            resp = self._session.post(
                f"{self.endpoint}/v1/score",
                json={"task": "specificity", "items": [{"text": text}]},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"specificity scorer unreachable: {exc}")
        if resp.status_code != 200:
            raise ScoringError(f"specificity scorer returned HTTP {resp.status_code}")
        return float(resp.json()["results"][0]["score"])


def specificity(unit: SentenceUnit, scorer) -> float:
    return scorer.score(unit.text)


def _pagerank(weights: np.ndarray, damping: float, tol: float, max_iter: int) -> np.ndarray:
    """Damped PageRank over a symmetric weight matrix.

    Each undirected edge contributes both directions; rows are normalized by
    out-weight.  Nodes without edges are not redistributed, so an isolated
    node settles at the teleport-only mass (1 - damping) / n.
    """
    n = weights.shape[0]
    out = weights.sum(axis=1)
    transition = np.zeros_like(weights)
    nonzero = out > 0
    transition[nonzero] = weights[nonzero] / out[nonzero, None]
    x = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for _ in range(max_iter):
        x_next = teleport + damping * (transition.T @ x)
        if np.abs(x_next - x).sum() < tol:
            x = x_next
            break
        x = x_next
    return x


def popularity(
    cand: CandidateSet,
    units_by_id: Mapping[str, SentenceUnit],
    aligner: Aligner,
    damping: float = 0.85,
    tol: float = 1e-6,
    max_iter: int = 100,
) -> dict[str, float]:
    """Centrality of each candidate in the pool's alignment graph.

    Nodes are the pool members plus the representative opinion.  Two members
    are connected when either aligns with the other, weighted by the greater
    of the two gated alignment probabilities; a member connects to the
    opinion node when it aligns with it, weighted by that probability.  The
    opinion node participates in the walk but is excluded from the returned
    scores.
    """
    member_ids = cand.member_unit_ids
    if len(member_ids) < 2:
        raise ValueError("popularity needs at least two candidates")
    members = [units_by_id[u] for u in member_ids]
    opinion = cand.prototype_opinion
    n = len(members) + 1
    weights = np.zeros((n, n))
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            x, y = members[i].text, members[j].text
            if aligner.aligns(x, y) or aligner.aligns(y, x):
                w = max(aligner.p_align(x, y), aligner.p_align(y, x))
                weights[i, j] = weights[j, i] = w
    for i, member in enumerate(members):
        if aligner.aligns(member.text, opinion.surface):
            w = aligner.p_align(member.text, opinion.surface)
            weights[i, n - 1] = weights[n - 1, i] = w
    scores = _pagerank(weights, damping, tol, max_iter)
    return {uid: float(scores[i]) for i, uid in enumerate(member_ids)}


def salience(
    cand: CandidateSet,
    rel_raw: Mapping[str, float],
    spec_raw: Mapping[str, float],
    pop_raw: Mapping[str, float],
) -> dict[str, PropertyScores]:
    """Combine the three member properties into per-member salience scores."""
    members = cand.member_unit_ids
    rel_n = minmax_normalize({u: rel_raw[u] for u in members})
    spec_n = minmax_normalize({u: spec_raw[u] for u in members})
    pop_n = minmax_normalize({u: pop_raw[u] for u in members})
    out = {}
    for u in members:
        out[u] = PropertyScores(
            unit_id=u,
            rel_raw=rel_raw[u],
            spec_raw=spec_raw[u],
            pop_raw=pop_raw[u],
            rel_n=rel_n[u],
            spec_n=spec_n[u],
            pop_n=pop_n[u],
            sal=rel_n[u] * spec_n[u] * pop_n[u],
        )
    return out


def compute_property_scores(
    cand: CandidateSet,
    clusters: Sequence[OpinionCluster],
    units_by_id: Mapping[str, SentenceUnit],
    aligner: Aligner,
    spec_scorer,
) -> dict[str, PropertyScores]:
    """Full per-member property computation for one candidate pool."""
    cluster = next(c for c in clusters if c.cluster_id == cand.cluster_id)
    rel = {
        u: relatedness(units_by_id[u], cluster, clusters, aligner)
        for u in cand.member_unit_ids
    }
    spec = {u: specificity(units_by_id[u], spec_scorer) for u in cand.member_unit_ids}
    pop = popularity(cand, units_by_id, aligner)
    return salience(cand, rel, spec, pop)
