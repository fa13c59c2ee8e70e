#!/usr/bin/env python3
"""Regenerate the 50-tree segmentation fixture and its golden outputs.

Tree shapes cycle through the interesting traversal cases: in-bounds roots,
compound sentences above the length cap, nested descent, SBAR complements,
sub-minimum clauses, over-wide clause gaps, function-tagged labels, and
S-free parses.  Golden outputs are the serialized segmentation results and
are compared byte-for-byte by the acceptance suite.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from rationales.corpus import parse_tree, segment_sentence

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "tests" / "fixtures"

VOCAB = """
table window garden coffee street light corner music dinner market river
bridge evening morning butter silver branch stone valley copper meadow
cloud harbor candle basket velvet saffron timber orchard lantern pebble
thunder willow ribbon barrel crystal ember feather garnet hazel
""".split()

L_MAX, L_MIN = 20, 2


def words(rng, n):
    return [VOCAB[i] for i in rng.integers(0, len(VOCAB), size=n)]


def leaves(tokens):
    return " ".join(f"(NN {t})" for t in tokens)


def clause(tokens, tag="S"):
    return f"({tag} {leaves(tokens)})"


def build(rng, shape):
    if shape == 0:  # single in-bounds clause -> whole sentence
        toks = words(rng, int(rng.integers(5, 19)))
        return f"(S {leaves(toks)})", toks
    if shape == 1:  # two clause children, root above cap -> two clauses
        a = words(rng, int(rng.integers(10, 13)))
        b = words(rng, int(rng.integers(10, 13)))
        return f"(S {clause(a)} (CC and) {clause(b)})", a + ["and"] + b
    if shape == 2:  # nested oversized child -> three clauses
        a = words(rng, int(rng.integers(10, 13)))
        c = words(rng, int(rng.integers(10, 13)))
        d = words(rng, int(rng.integers(10, 13)))
        inner = f"(S {clause(c)} (CC but) {clause(d)})"
        return (
            f"(S {clause(a)} (CC and) {inner})",
            a + ["and"] + c + ["but"] + d,
        )
    if shape == 3:  # SBAR complement stops traversal -> whole sentence
        a = words(rng, int(rng.integers(10, 13)))
        b = words(rng, int(rng.integers(9, 12)))
        return (
            f"(S {clause(a)} (SBAR (IN because) {clause(b)}))",
            a + ["because"] + b,
        )
    if shape == 4:  # gap wider than the minimum length -> whole sentence
        a = words(rng, int(rng.integers(10, 13)))
        mid = words(rng, int(rng.integers(3, 6)))
        b = words(rng, int(rng.integers(10, 13)))
        advp = " ".join(f"(RB {t})" for t in mid)
        return (
            f"(S {clause(a)} (ADVP {advp}) {clause(b)})",
            a + mid + b,
        )
    if shape == 5:  # function-tagged clause labels
        a = words(rng, int(rng.integers(10, 13)))
        b = words(rng, int(rng.integers(10, 13)))
        return (
            f"(S {clause(a, 'S-TPC-1')} (CC and) {clause(b)})",
            a + ["and"] + b,
        )
    if shape == 6:  # no S nodes at all -> whole sentence
        toks = words(rng, int(rng.integers(6, 14)))
        half = len(toks) // 2
        return (
            f"(FRAG (NP {leaves(toks[:half])}) (VP {leaves(toks[half:])}))",
            toks,
        )
    # shape 7: sub-minimum clause child is skipped
    b = words(rng, int(rng.integers(10, 13)))
    c = words(rng, int(rng.integers(10, 13)))
    return (
        f"(S (S (NN yes)) (CC and) {clause(b)} (CC and) {clause(c)})",
        ["yes", "and"] + b + ["and"] + c,
    )


def main():
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240917)
    trees = []
    for i in range(50):
        parse, tokens = build(rng, i % 8)
        trees.append(
            {"tree_id": f"t{i:02d}", "parse": parse, "text": " ".join(tokens)}
        )
    with open(FIXTURE_DIR / "segmentation_trees.jsonl", "w", encoding="utf-8") as f:
        for rec in trees:
            f.write(json.dumps(rec) + "\n")
    golden = {}
    for rec in trees:
        units = segment_sentence(
            parse_tree(rec["parse"]),
            rec["text"],
            L_MAX,
            L_MIN,
            entity_id="fixture",
            source_sentence_id=rec["tree_id"],
        )
        golden[rec["tree_id"]] = [
            {
                "kind": u.kind,
                "text": u.text,
                "char_span": list(u.char_span),
                "tokens": list(u.tokens),
            }
            for u in units
        ]
    with open(FIXTURE_DIR / "segmentation_golden.json", "w", encoding="utf-8") as f:
        json.dump(golden, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote {len(trees)} trees and goldens to {FIXTURE_DIR}")


if __name__ == "__main__":
    main()
