"""Assembly of the final rationale-based summary.

Opinions are ranked by the size of their rationale candidate pools (better
supported opinions first) and appended together with their sampled
rationales until the word budget runs out.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

from .candidates import CandidateSet
from .corpus import SentenceUnit
from .opinions import Opinion
from .sampler import RationaleSet


@dataclass
class SummaryItem:
    opinion: Opinion
    rationales: list[SentenceUnit]

    @property
    def word_count(self) -> int:
        return len(self.opinion.surface.split()) + sum(
            len(u.text.split()) for u in self.rationales
        )


@dataclass
class Summary:
    entity_id: str
    items: list[SummaryItem]
    word_count: int


def rank_opinions(sets: Sequence[CandidateSet]) -> list[CandidateSet]:
    """Stable descending sort by pool size; ties by cluster id."""
    return sorted(sets, key=lambda c: (-c.size, c.cluster_id))


def assemble_summary(
    entity_id: str,
    ranked: Sequence[CandidateSet],
    rationale_sets: Mapping[str, RationaleSet],
    units_by_id: Mapping[str, SentenceUnit],
    word_limit: int | None = None,
) -> Summary:
    """Append (opinion, rationales) items in rank order within the word budget.

    Items are whole: an opinion either appears with all its sampled
    rationales or not at all.  Assembly stops at the first item that does
    not fit, matching the pick-until-the-limit semantics of the budget.
    """
    items: list[SummaryItem] = []
    total = 0
    for cand in ranked:
        try:
            rset = rationale_sets[cand.cluster_id]
        except KeyError:
            raise ValueError(
                f"no sampled rationales for cluster {cand.cluster_id!r}"
            )
        item = SummaryItem(
            opinion=cand.prototype_opinion,
            rationales=[units_by_id[u] for u in rset.unit_ids],
        )
        if word_limit is not None and total + item.word_count > word_limit:
            break
        items.append(item)
        total += item.word_count
    return Summary(entity_id=entity_id, items=items, word_count=total)


def render_summary(summary: Summary, format: str = "text") -> str:
    """Render as one 'opinion: r1 | r2 | ...' line per item, or lossless JSON."""
    if format == "text":
        lines = [
            f"{item.opinion.surface}: "
            + " | ".join(u.text for u in item.rationales)
            for item in summary.items
        ]
        return "\n".join(lines) + ("\n" if lines else "")
    if format == "json":
        payload = {
            "entity_id": summary.entity_id,
            "word_count": summary.word_count,
            "items": [
                {
                    "opinion": item.opinion.to_dict(),
                    "rationales": [u.to_dict() for u in item.rationales],
                }
                for item in summary.items
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown summary format {format!r}")


def summary_from_json(payload: str) -> Summary:
    """Inverse of render_summary(format='json')."""
    d = json.loads(payload)
    items = [
        SummaryItem(
            opinion=Opinion.from_dict(item["opinion"]),
            rationales=[SentenceUnit.from_dict(u) for u in item["rationales"]],
        )
        for item in d["items"]
    ]
    return Summary(entity_id=d["entity_id"], items=items, word_count=d["word_count"])
