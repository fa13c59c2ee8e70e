"""Automatic evaluation of rationales and candidate pools.

Rationale metrics: embedding relatedness to the opinion, TF-IDF keyword
coverage (specificity), keyword mass fraction of rationale tokens
(popularity), and embedding diversity.  Candidate-pool metrics: silhouette
over 1 - cosine distances and NPMI coherence of each pool's top TF-IDF
tokens.  An Overall score min-max normalizes each metric across systems and
averages.

Keyword extraction follows the standard preprocessing chain: lowercase,
punctuation strip, stopword removal, extreme-document-frequency filtering,
then lemmatization via bundled suffix rules.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Protocol, Sequence

import numpy as np
import requests

from ._stopwords import STOPWORDS
from .alignment import ScoringError, TransportError

_WORD_RE = re.compile(r"\w+")


# ---------------------------------------------------------------------------
# Token preprocessing
# ---------------------------------------------------------------------------

def lemmatize(token: str) -> str:
    """Singularize common English noun plurals by suffix rule."""
    if len(token) > 3 and token.endswith("ies"):
        return token[:-3] + "y"
    if len(token) > 4 and token.endswith("sses"):
        return token[:-2]
    if len(token) > 3 and token.endswith(("xes", "zes", "ches", "shes")):
        return token[:-2]
    if (
        len(token) > 2
        and token.endswith("s")
        and not token.endswith(("ss", "us", "is"))
    ):
        return token[:-1]
    return token


def content_tokens(text: str) -> list[str]:
    """Lowercased, punctuation-split, stopword-filtered, lemmatized tokens."""
    return [
        lemmatize(t)
        for t in _WORD_RE.findall(text.lower())
        if t not in STOPWORDS
    ]


def preprocess_tokens(
    texts: Sequence[str], min_df: int = 2, max_df_ratio: float = 0.5
) -> list[list[str]]:
    """Per-document token streams with extreme-frequency filtering.

    Tokens appearing in fewer than ``min_df`` documents or in more than
    ``max_df_ratio`` of them are dropped before lemmatization.
    """
    docs = [
        [t for t in _WORD_RE.findall(text.lower()) if t not in STOPWORDS]
        for text in texts
    ]
    n = len(docs)
    df: dict[str, int] = {}
    for doc in docs:
        for tok in set(doc):
            df[tok] = df.get(tok, 0) + 1
    kept = {
        tok
        for tok, count in df.items()
        if count >= min_df and count <= max_df_ratio * n
    }
    return [[lemmatize(t) for t in doc if t in kept] for doc in docs]


# ---------------------------------------------------------------------------
# TF-IDF keywords
# ---------------------------------------------------------------------------

@dataclass
class KeywordSet:
    cluster_id: str
    keywords: list[tuple[str, float]]  # descending score, length <= 5
    all_keyword_mass: float

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "keywords": [[t, s] for t, s in self.keywords],
            "mass": self.all_keyword_mass,
        }


@dataclass
class KeywordIndex:
    """Per-pool keyword sets plus the underlying TF-IDF tables of an entity."""

    keyword_sets: dict[str, KeywordSet] = field(default_factory=dict)
    tfidf: dict[str, dict[str, float]] = field(default_factory=dict)


def compute_tfidf(set_texts: Mapping[str, Sequence[str]]) -> dict[str, dict[str, float]]:
    """Smoothed TF-IDF over one document per candidate pool.

    Each pool's member texts are concatenated into a single document;
    IDF = ln((1 + N) / (1 + df)) + 1 over the entity's N pools.
    """
    cluster_ids = sorted(set_texts)
    docs = preprocess_tokens([" ".join(set_texts[c]) for c in cluster_ids])
    n = len(docs)
    df: dict[str, int] = {}
    for doc in docs:
        for tok in set(doc):
            df[tok] = df.get(tok, 0) + 1
    tables: dict[str, dict[str, float]] = {}
    for cid, doc in zip(cluster_ids, docs):
        table: dict[str, float] = {}
        if doc:
            length = len(doc)
            counts: dict[str, int] = {}
            for tok in doc:
                counts[tok] = counts.get(tok, 0) + 1
            for tok, count in counts.items():
                idf = math.log((1 + n) / (1 + df[tok])) + 1.0
                table[tok] = (count / length) * idf
        tables[cid] = table
    return tables


def extract_keywords(
    set_texts: Mapping[str, Sequence[str]],
    cluster_opinions: Mapping[str, Sequence[str]],
    top_k: int = 5,
) -> KeywordIndex:
    """Top TF-IDF tokens of each pool, excluding its opinions' own tokens.

    With fewer than two pools the IDF degenerates, so every keyword set is
    reported empty.
    """
    index = KeywordIndex()
    if len(set_texts) < 2:
        for cid in set_texts:
            index.keyword_sets[cid] = KeywordSet(cid, [], 0.0)
            index.tfidf[cid] = {}
        return index
    index.tfidf = compute_tfidf(set_texts)
    for cid in sorted(set_texts):
        excluded = set()
        for surface in cluster_opinions.get(cid, ()):
            excluded.update(lemmatize(t) for t in _WORD_RE.findall(surface.lower()))
        ranked = sorted(
            (
                (tok, score)
                for tok, score in index.tfidf[cid].items()
                if tok not in excluded
            ),
            key=lambda kv: (-kv[1], kv[0]),
        )[:top_k]
        index.keyword_sets[cid] = KeywordSet(
            cid, ranked, sum(s for _, s in ranked)
        )
    return index


# ---------------------------------------------------------------------------
# Embedders
# ---------------------------------------------------------------------------

class Embedder(Protocol):
    def embed(self, text: str) -> np.ndarray: ...


class HashEmbedder:
    """Signed feature hashing of unigrams and bigrams, L2-normalized.

    A deterministic, dependency-free stand-in for a learned sentence
    encoder; the remote embedder is the faithful option.
    """

    def __init__(self, dim: int = 512):
        self.dim = dim

    def embed(self, text: str) -> np.ndarray:
        tokens = _WORD_RE.findall(text.lower())
        feats = tokens + [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]
        v = np.zeros(self.dim)
        for feat in feats:
            digest = hashlib.md5(feat.encode("utf-8")).digest()
            idx = int.from_bytes(digest[:4], "little") % self.dim
            v[idx] += 1.0 if digest[4] & 1 else -1.0
        norm = np.linalg.norm(v)
        return v / norm if norm > 0 else v


class RemoteEmbedder:
    """Sentence embeddings via the HTTP scorer service."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self._session = requests.Session()

    def embed(self, text: str) -> np.ndarray:
        try:
            resp = self._session.post(
                f"{self.endpoint}/v1/score",
                json={"task": "embed", "items": [{"text": text}]},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"embedding service unreachable: {exc}")
        if resp.status_code != 200:
            raise ScoringError(f"embedding service returned HTTP {resp.status_code}")
        return np.asarray(resp.json()["results"][0]["vector"], dtype=np.float64)


class RemoteEntailmentScorer:
    """Optional entailment probability via the scorer service's entail task."""

    def __init__(self, endpoint: str, timeout: float = 60.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self._session = requests.Session()

    def available(self) -> bool:
        try:
            resp = self._session.get(f"{self.endpoint}/v1/health", timeout=self.timeout)
        except requests.RequestException:
            return False
        return resp.status_code == 200 and "entail" in resp.json().get("tasks", [])

    def entail(self, premise: str, hypothesis: str) -> float:
        try:
            resp = self._session.post(
                f"{self.endpoint}/v1/score",
                json={"task": "entail", "items": [{"x": premise, "y": hypothesis}]},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"entailment service unreachable: {exc}")
        if resp.status_code != 200:
            raise ScoringError(f"entailment service returned HTTP {resp.status_code}")
        return float(resp.json()["results"][0]["p"])


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


# ---------------------------------------------------------------------------
# Rationale metrics
# ---------------------------------------------------------------------------

def metric_emb_rel(
    opinion_surface: str, rationale_texts: Sequence[str], embedder: Embedder
) -> float:
    """Mean embedding cosine between the opinion and each rationale."""
    if not rationale_texts:
        raise ValueError("emb_rel needs at least one rationale")
    op = embedder.embed(opinion_surface)
    return float(
        np.mean([_cosine(op, embedder.embed(t)) for t in rationale_texts])
    )


def metric_key_spec(
    rationale_texts: Sequence[str], keyword_set: KeywordSet
) -> float | None:
    """Keyword TF-IDF mass covered by the rationales over total keyword mass."""
    if keyword_set.all_keyword_mass <= 0:
        return None
    covered_tokens = set()
    for text in rationale_texts:
        covered_tokens.update(content_tokens(text))
    covered = sum(s for t, s in keyword_set.keywords if t in covered_tokens)
    return covered / keyword_set.all_keyword_mass


def metric_key_pop(
    rationale_texts: Sequence[str],
    keyword_set: KeywordSet,
    tfidf_table: Mapping[str, float],
) -> float | None:
    """Covered keyword mass over the TF-IDF mass of all rationale tokens."""
    if not rationale_texts:
        raise ValueError("key_pop needs at least one rationale")
    tokens = set()
    for text in rationale_texts:
        tokens.update(content_tokens(text))
    denom = sum(tfidf_table.get(t, 0.0) for t in sorted(tokens))
    if denom <= 0:
        return None
    covered = sum(s for t, s in keyword_set.keywords if t in tokens)
    return covered / denom


def metric_emb_div(
    rationale_texts: Sequence[str], embedder: Embedder
) -> float | None:
    """One minus mean pairwise embedding cosine; absent for single rationales."""
    k = len(rationale_texts)
    if k < 2:
        return None
    embs = [embedder.embed(t) for t in rationale_texts]
    sims = [
        _cosine(embs[i], embs[j]) for i in range(k) for j in range(i + 1, k)
    ]
    return 1.0 - float(np.mean(sims))


# ---------------------------------------------------------------------------
# Candidate-pool metrics
# ---------------------------------------------------------------------------

def metric_silhouette(
    set_texts: Mapping[str, Sequence[str]], embedder: Embedder
) -> float | None:
    """Mean silhouette over all pool members with distance 1 - cosine.

    Members of singleton pools score 0, as do degenerate points whose intra-
    and inter-pool distances are both 0.
    """
    cluster_ids = sorted(cid for cid in set_texts if set_texts[cid])
    if len(cluster_ids) < 2:
        return None
    embs = {cid: [embedder.embed(t) for t in set_texts[cid]] for cid in cluster_ids}
    scores = []
    for cid in cluster_ids:
        own = embs[cid]
        for i, e in enumerate(own):
            if len(own) == 1:
                scores.append(0.0)
                continue
            a = float(
                np.mean([1.0 - _cosine(e, o) for j, o in enumerate(own) if j != i])
            )
            b = min(
                float(np.mean([1.0 - _cosine(e, o) for o in embs[other]]))
                for other in cluster_ids
                if other != cid
            )
            denom = max(a, b)
            scores.append(0.0 if denom == 0 else (b - a) / denom)
    return float(np.mean(scores))


def metric_npmi(
    tfidf: Mapping[str, Mapping[str, float]],
    unit_texts: Sequence[str],
    top_n: int = 10,
    eps: float = 1e-12,
) -> float | None:
    """Mean NPMI over each pool's top TF-IDF token pairs.

    Occurrence probabilities are estimated over the entity's sentence units,
    co-occurrence meaning both tokens appear in the same unit; the joint
    probability is additively smoothed by ``eps``.
    """
    if not unit_texts:
        return None
    unit_sets = [set(content_tokens(t)) for t in unit_texts]
    total = len(unit_sets)
    set_scores = []
    for cid in sorted(tfidf):
        top = [
            tok
            for tok, _ in sorted(
                tfidf[cid].items(), key=lambda kv: (-kv[1], kv[0])
            )[:top_n]
        ]
        if len(top) < 2:
            continue
        occ = {tok: sum(1 for s in unit_sets if tok in s) for tok in top}
        pair_scores = []
        for i in range(len(top)):
            for j in range(i + 1, len(top)):
                x, y = top[i], top[j]
                if occ[x] == 0 or occ[y] == 0:
                    continue
                both = sum(1 for s in unit_sets if x in s and y in s)
                p_xy = (both + eps) / total
                p_x = occ[x] / total
                p_y = occ[y] / total
                den = -math.log(p_xy)
                if den <= 0:
                    pair_scores.append(1.0)
                else:
                    pair_scores.append(math.log(p_xy / (p_x * p_y)) / den)
        if pair_scores:
            set_scores.append(float(np.mean(pair_scores)))
    if not set_scores:
        return None
    return float(np.mean(set_scores))


# ---------------------------------------------------------------------------
# Overall aggregation and reporting
# ---------------------------------------------------------------------------

def overall_score(
    metric_table: Mapping[str, Mapping[str, float | None]]
) -> dict[str, float]:
    """Average of per-metric min-max-normalized values for each system.

    Every metric is normalized to [0, 1] across the systems reporting it;
    a system's Overall is the mean of its normalized metrics.  At least two
    systems are required for the normalization to be defined.
    """
    systems = list(metric_table)
    if len(systems) < 2:
        raise ValueError(
            "Overall requires at least two systems for min-max normalization"
        )
    metrics = sorted(
        {m for row in metric_table.values() for m, v in row.items() if v is not None}
    )
    normalized: dict[str, dict[str, float]] = {s: {} for s in systems}
    for metric in metrics:
        having = [s for s in systems if metric_table[s].get(metric) is not None]
        if len(having) < 2:
            continue
        values = {s: float(metric_table[s][metric]) for s in having}
        lo, hi = min(values.values()), max(values.values())
        for s in having:
            normalized[s][metric] = (
                1.0 if hi == lo else (values[s] - lo) / (hi - lo)
            )
    out = {}
    for s in systems:
        if not normalized[s]:
            raise ValueError(f"system {s!r} has no normalizable metrics")
        out[s] = float(np.mean(list(normalized[s].values())))
    return out


METRIC_NAMES = ("emb_rel", "key_spec", "key_pop", "emb_div", "silh", "npmi", "sc")


@dataclass
class MetricReport:
    per_entity: dict[str, dict[str, float | None]]
    mean: dict[str, float | None]
    notes: list[str] = field(default_factory=list)

    @classmethod
    def aggregate(cls, per_entity: dict[str, dict[str, float | None]],
                  notes: Sequence[str] = ()) -> "MetricReport":
        mean: dict[str, float | None] = {}
        for metric in METRIC_NAMES:
            values = [
                row[metric]
                for row in per_entity.values()
                if row.get(metric) is not None
            ]
            mean[metric] = float(np.mean(values)) if values else None
        return cls(per_entity=per_entity, mean=mean, notes=list(notes))

    def to_json(self) -> str:
        payload = {
            "per_entity": self.per_entity,
            "mean": self.mean,
            "notes": self.notes,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_table(self) -> str:
        header = ["entity"] + list(METRIC_NAMES)
        rows = [header]
        for eid in sorted(self.per_entity):
            row = [eid]
            for metric in METRIC_NAMES:
                value = self.per_entity[eid].get(metric)
                row.append("-" if value is None else f"{value:.4f}")
            rows.append(row)
        mean_row = ["mean"]
        for metric in METRIC_NAMES:
            value = self.mean.get(metric)
            mean_row.append("-" if value is None else f"{value:.4f}")
        rows.append(mean_row)
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        lines = [
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
            for row in rows
        ]
        if self.notes:
            lines.append("")
            lines.extend(f"note: {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def evaluate_entity(
    unit_texts: Sequence[str],
    set_texts: Mapping[str, Sequence[str]],
    cluster_opinions: Mapping[str, Sequence[str]],
    prototype_surfaces: Mapping[str, str],
    rationale_texts: Mapping[str, Sequence[str]],
    embedder: Embedder,
    entail_scorer: RemoteEntailmentScorer | None = None,
) -> dict[str, float | None]:
    """All metrics for one entity; per-opinion metrics average over its pools."""
    index = extract_keywords(set_texts, cluster_opinions)
    emb_rel, key_spec, key_pop, emb_div = [], [], [], []
    for cid in sorted(rationale_texts):
        texts = list(rationale_texts[cid])
        if not texts:
            continue
        emb_rel.append(metric_emb_rel(prototype_surfaces[cid], texts, embedder))
        ks = metric_key_spec(texts, index.keyword_sets[cid])
        if ks is not None:
            key_spec.append(ks)
        kp = metric_key_pop(texts, index.keyword_sets[cid], index.tfidf[cid])
        if kp is not None:
            key_pop.append(kp)
        ed = metric_emb_div(texts, embedder)
        if ed is not None:
            emb_div.append(ed)
    result: dict[str, float | None] = {
        "emb_rel": float(np.mean(emb_rel)) if emb_rel else None,
        "key_spec": float(np.mean(key_spec)) if key_spec else None,
        "key_pop": float(np.mean(key_pop)) if key_pop else None,
        "emb_div": float(np.mean(emb_div)) if emb_div else None,
        "silh": metric_silhouette(set_texts, embedder),
        "npmi": metric_npmi(index.tfidf, unit_texts),
        "sc": None,
    }
    if entail_scorer is not None:
        entail_scores = [
            entail_scorer.entail(" ".join(set_texts[cid]), prototype_surfaces[cid])
            for cid in sorted(set_texts)
            if set_texts[cid]
        ]
        if entail_scores:
            result["sc"] = float(np.mean(entail_scores))
    return result
