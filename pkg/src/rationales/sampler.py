"""Gibbs rationale sampling over the joint group objective.

The probability of a k-group of candidates being the rationales is
proportional to exp(sum of member saliences + w_div * group diversity).
Exhaustive scoring of all k-subsets is intractable for real pools, so the
sampler performs Gibbs scans: each slot in turn is resampled from the
softmax over the conditional objective given the other slots, group
frequencies are recorded after a burn-in period, and the most frequent
group wins.  An exhaustive enumerator over the same objective is provided
as a verification oracle for small pools.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Mapping, Sequence

import numpy as np

from ._core import gibbs_counts
from .candidates import CandidateSet
from .corpus import SentenceUnit
from .properties import PropertyScores, TokenBag, diversity

logger = logging.getLogger(__name__)

EXACT_ENUMERATION_LIMIT = 10**6


@dataclass
class GibbsConfig:
    k: int = 3
    eta: int = 100
    theta: int = 200
    temperature: float = 0.01
    w_div: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.eta < 0:
            raise ValueError("eta must be >= 0")
        if self.theta < 1:
            raise ValueError("theta must be >= 1")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.w_div < 0:
            raise ValueError("w_div must be >= 0")


@dataclass
class RationaleSet:
    opinion_id: str
    unit_ids: tuple[str, ...]
    joint_score: float
    frequency: int
    total_recorded: int

    def to_dict(self) -> dict:
        return {
            "opinion": self.opinion_id,
            "rationales": list(self.unit_ids),
            "frequency": self.frequency,
            "recorded": self.total_recorded,
            "joint_exponent": self.joint_score,
        }


@dataclass
class SamplingProblem:
    """A candidate pool prepared for sampling: ordered ids, salience, similarities."""

    unit_ids: tuple[str, ...]
    sal: np.ndarray  # float64[n]
    sim: np.ndarray  # float64[n, n] pairwise bag cosines, zero diagonal unused

    @classmethod
    def build(
        cls,
        cand: CandidateSet,
        scores: Mapping[str, PropertyScores],
        units_by_id: Mapping[str, SentenceUnit],
    ) -> "SamplingProblem":
        ids = tuple(cand.member_unit_ids)
        bags = [TokenBag.from_text(units_by_id[u].text) for u in ids]
        return cls.from_parts(ids, [scores[u].sal for u in ids], bags)

    @classmethod
    def from_parts(
        cls,
        unit_ids: Sequence[str],
        sal: Sequence[float],
        bags: Sequence[TokenBag],
    ) -> "SamplingProblem":
        n = len(unit_ids)
        if not (n == len(sal) == len(bags)):
            raise ValueError("unit_ids, sal, and bags must have equal lengths")
        sim = np.zeros((n, n))
        from .properties import bag_cosine

        for i in range(n):
            for j in range(i + 1, n):
                sim[i, j] = sim[j, i] = bag_cosine(bags[i], bags[j])
        return cls(tuple(unit_ids), np.asarray(sal, dtype=np.float64), sim)

    @property
    def size(self) -> int:
        return len(self.unit_ids)

    def index_of(self, unit_id: str) -> int:
        return self.unit_ids.index(unit_id)


def joint_exponent(
    group: Sequence[str],
    sal: Mapping[str, float],
    div_fn: Callable[[Sequence[str]], float],
    w_div: float,
) -> float:
    """Unnormalized log-probability of a group: sum of saliences + w_div * diversity."""
    if len(set(group)) != len(group):
        raise ValueError("group members must be distinct")
    return sum(sal[u] for u in group) + w_div * div_fn(group)


def make_div_fn(bags: Mapping[str, TokenBag]) -> Callable[[Sequence[str]], float]:
    return lambda group: diversity([bags[u] for u in group])


def _group_exponent(problem: SamplingProblem, idx: Sequence[int], w_div: float) -> float:
    total = float(sum(problem.sal[i] for i in idx))
    k = len(idx)
    if k >= 2:
        pair_sum = 0.0
        for a in range(k):
            for b in range(a + 1, k):
                pair_sum += problem.sim[idx[a], idx[b]]
        total += w_div * (-pair_sum / (k * (k - 1) / 2))
    return total


def _conditional_weights(
    problem: SamplingProblem, rest: Sequence[int], k: int, cfg: GibbsConfig
) -> tuple[list[int], list[float], float]:
    """Max-shifted softmax weights over eligible candidates for one slot update.

    Scalar arithmetic in the same order as the scan kernels, so a manual
    update loop reproduces their trajectories exactly.
    """
    n_pairs = k * (k - 1) // 2
    pair_base = 0.0
    for a in range(len(rest)):
        for b in range(a + 1, len(rest)):
            pair_base += problem.sim[rest[a], rest[b]]
    eligible = []
    expos = []
    best = -math.inf
    for c in range(problem.size):
        if c in rest:
            continue
        cross = 0.0
        for r in rest:
            cross += problem.sim[c, r]
        div = -(pair_base + cross) / n_pairs if n_pairs > 0 else 0.0
        expo = (problem.sal[c] + cfg.w_div * div) / cfg.temperature
        eligible.append(c)
        expos.append(expo)
        if expo > best:
            best = expo
    total = 0.0
    weights = []
    for expo in expos:
        w = math.exp(expo - best)
        weights.append(w)
        total += w
    return eligible, weights, total


def conditional_sample(
    j: int,
    current: Sequence[str],
    problem: SamplingProblem,
    cfg: GibbsConfig,
    rng: np.random.Generator,
) -> str:
    """Resample slot j of the current group from its conditional distribution."""
    k = len(current)
    idx = [problem.index_of(u) for u in current]
    rest = [idx[a] for a in range(k) if a != j]
    eligible, weights, total = _conditional_weights(problem, rest, k, cfg)
    if not eligible:
        raise ValueError("no eligible candidate for slot update")
    u = rng.random() * total
    acc = 0.0
    chosen = eligible[-1]
    for c, w in zip(eligible, weights):
        acc += w
        if u < acc:
            chosen = c
            break
    return problem.unit_ids[chosen]


def conditional_distribution(
    j: int,
    current: Sequence[str],
    problem: SamplingProblem,
    cfg: GibbsConfig,
) -> dict[str, float]:
    """Normalized conditional probabilities for slot j (for tests and debugging)."""
    k = len(current)
    idx = [problem.index_of(u) for u in current]
    rest = [idx[a] for a in range(k) if a != j]
    eligible, weights, total = _conditional_weights(problem, rest, k, cfg)
    return {problem.unit_ids[c]: w / total for c, w in zip(eligible, weights)}


def sample_rationales(
    opinion_id: str, problem: SamplingProblem, cfg: GibbsConfig
) -> RationaleSet:
    """Run the Gibbs rationale sampler and return the most frequent group.

    The group register is keyed on the unordered id set; frequency ties break
    toward the larger joint exponent, then the lexicographically smallest id
    tuple.  Deterministic for a fixed config seed.
    """
    n = problem.size
    if n == 0:
        raise ValueError("cannot sample from an empty candidate pool")
    k = cfg.k
    if k > n:
        logger.warning(
            "k=%d exceeds pool size %d for %s; clamping", cfg.k, n, opinion_id
        )
        k = n
    rng = np.random.default_rng(cfg.seed)
    init = rng.choice(n, size=k, replace=False).astype(np.int64)
    draws = rng.random((cfg.eta + cfg.theta) * k)
    counts = gibbs_counts(
        np.ascontiguousarray(problem.sal, dtype=np.float64),
        np.ascontiguousarray(problem.sim, dtype=np.float64),
        k,
        cfg.eta,
        cfg.theta,
        cfg.w_div,
        cfg.temperature,
        init,
        draws,
    )
    best_key = None
    best_rank = None
    for key, freq in counts.items():
        expo = _group_exponent(problem, key, cfg.w_div)
        id_key = tuple(sorted(problem.unit_ids[i] for i in key))
        rank = (-freq, -expo, id_key)
        if best_rank is None or rank < best_rank:
            best_rank = rank
            best_key = key
    assert best_key is not None
    return RationaleSet(
        opinion_id=opinion_id,
        unit_ids=tuple(problem.unit_ids[i] for i in sorted(best_key)),
        joint_score=_group_exponent(problem, best_key, cfg.w_div),
        frequency=counts[best_key],
        total_recorded=k * cfg.theta,
    )


def exact_map_group(
    problem: SamplingProblem, cfg: GibbsConfig
) -> tuple[tuple[str, ...], float]:
    """Enumerate all k-subsets and return the joint-exponent maximizer.

    Verification oracle for the sampler; refuses pools whose subset count
    exceeds EXACT_ENUMERATION_LIMIT.
    """
    n = problem.size
    k = min(cfg.k, n)
    if math.comb(n, k) > EXACT_ENUMERATION_LIMIT:
        raise ValueError(
            f"C({n}, {k}) exceeds the enumeration guard of {EXACT_ENUMERATION_LIMIT}"
        )
    best = None
    best_rank = None
    for combo in combinations(range(n), k):
        expo = _group_exponent(problem, combo, cfg.w_div)
        id_key = tuple(sorted(problem.unit_ids[i] for i in combo))
        rank = (-expo, id_key)
        if best_rank is None or rank < best_rank:
            best_rank = rank
            best = combo
    assert best is not None
    return (
        tuple(problem.unit_ids[i] for i in sorted(best)),
        _group_exponent(problem, best, cfg.w_div),
    )
