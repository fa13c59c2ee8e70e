"""Rationale candidate pools.

A unit is a viable rationale candidate for an opinion cluster when it aligns
with at least one opinion in the cluster and that cluster is the one it is
most related to among all of the entity's clusters.  Relatedness between a
unit and a cluster is the maximum gated alignment probability against any
member opinion.  Pools that end up with fewer than ``min_size`` members are
discarded as too thin to sample rationales from.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .alignment import Aligner
from .corpus import SentenceUnit
from .opinions import Opinion, OpinionCluster


@dataclass
class CandidateSet:
    cluster_id: str
    prototype_opinion: Opinion
    member_unit_ids: list[str]
    relatedness_to_cluster: dict[str, float]

    @property
    def size(self) -> int:
        return len(self.member_unit_ids)

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "opinion": self.prototype_opinion.to_dict(),
            "units": list(self.member_unit_ids),
            "e": {u: self.relatedness_to_cluster[u] for u in self.member_unit_ids},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CandidateSet":
        return cls(
            cluster_id=d["cluster_id"],
            prototype_opinion=Opinion.from_dict(d["opinion"]),
            member_unit_ids=list(d["units"]),
            relatedness_to_cluster={u: float(v) for u, v in d["e"].items()},
        )


def cluster_relatedness(
    unit: SentenceUnit, cluster: OpinionCluster, aligner: Aligner
) -> float:
    """Maximum gated alignment probability between the unit and any cluster opinion."""
    if not cluster.members:
        raise ValueError(f"cluster {cluster.cluster_id!r} is empty")
    return max(aligner.p_align(unit.text, o.surface) for o in cluster.members)


def build_candidate_sets(
    units: Sequence[SentenceUnit],
    clusters: Sequence[OpinionCluster],
    aligner: Aligner,
    min_size: int = 5,
) -> list[CandidateSet]:
    """Assign each unit to at most one cluster and drop undersized pools.

    A unit goes to the cluster with the largest relatedness score among all
    clusters, provided it also aligns with at least one of that cluster's
    opinions.  Exact relatedness ties break toward the cluster with more
    member opinions, then the lexicographically smaller cluster id.
    """
    if min_size < 1:
        raise ValueError("min_size must be >= 1")
    if not clusters:
        return []
    assigned: dict[str, list[SentenceUnit]] = {c.cluster_id: [] for c in clusters}
    e_values: dict[str, dict[str, float]] = {c.cluster_id: {} for c in clusters}
    for unit in units:
        evals = {
            c.cluster_id: cluster_relatedness(unit, c, aligner) for c in clusters
        }
        aligned = {
            c.cluster_id
            for c in clusters
            if any(aligner.aligns(unit.text, o.surface) for o in c.members)
        }
        if not aligned:
            continue
        best = min(
            clusters,
            key=lambda c: (-evals[c.cluster_id], -len(c.members), c.cluster_id),
        )
        if best.cluster_id not in aligned:
            continue
        assigned[best.cluster_id].append(unit)
        e_values[best.cluster_id][unit.unit_id] = evals[best.cluster_id]

    sets = []
    for cluster in clusters:
        members = assigned[cluster.cluster_id]
        if len(members) < min_size:
            continue
        sets.append(
            CandidateSet(
                cluster_id=cluster.cluster_id,
                prototype_opinion=cluster.prototype_opinion,
                member_unit_ids=[u.unit_id for u in members],
                relatedness_to_cluster=e_values[cluster.cluster_id],
            )
        )
    return sets
