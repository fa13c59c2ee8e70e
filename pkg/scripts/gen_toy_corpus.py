#!/usr/bin/env python3
"""Regenerate the bundled toy corpus fixtures.

Writes src/rationales/data/toy/corpus.jsonl and summaries.jsonl.  The corpus
is fully deterministic: three entities, twenty reviews each, per-sentence
ABSA annotations, synthetic constituency parses (including compound
sentences long enough to split into clauses, an SBAR complement, and a few
unparsed sentences).
"""

from __future__ import annotations

import json
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "rationales" / "data" / "toy"

_DT = {"the", "a", "an", "our", "my", "your", "their", "this", "that", "every", "some"}
_PRP = {"we", "they", "i", "you", "us", "it", "he", "she", "them"}
_VBD = {
    "was", "were", "felt", "came", "kept", "made", "smelled", "brought",
    "arranged", "remembered", "sorted", "went", "took", "walked", "watched",
    "booked", "carried", "greeted", "refilled", "stayed", "appeared",
    "waited", "lasted", "let", "told", "hovered", "lined", "ended",
    "tasted", "dropped", "sat", "overlooked", "caught", "loved", "needed",
    "had", "have",
}
_IN = {
    "in", "on", "at", "for", "from", "with", "of", "to", "by", "near",
    "behind", "over", "past", "during", "until", "about",
}
_CC = {"and", "but", "or"}


def _pos(token: str) -> str:
    if token in _DT:
        return "DT"
    if token in _PRP:
        return "PRP"
    if token in _VBD:
        return "VBD"
    if token in _IN:
        return "IN"
    if token in _CC:
        return "CC"
    if any(ch.isdigit() for ch in token):
        return "CD"
    return "NN"


def _leaves(tokens: list[str]) -> str:
    return " ".join(f"({_pos(t)} {t})" for t in tokens)


def single(aspect, sentiment, text, pairs=(), parse=True):
    tokens = text.split()
    return {
        "text": text,
        "parse": f"(S {_leaves(tokens)})" if parse else None,
        "absa": {"aspect": aspect, "sentiment": sentiment,
                 "pairs": [list(p) for p in pairs]},
    }


def compound(aspect, sentiment, first, second, pairs=()):
    text = f"{first} and {second}"
    parse = f"(S (S {_leaves(first.split())}) (CC and) (S {_leaves(second.split())}))"
    return {
        "text": text,
        "parse": parse,
        "absa": {"aspect": aspect, "sentiment": sentiment,
                 "pairs": [list(p) for p in pairs]},
    }


def sbar(aspect, sentiment, main, because_clause, pairs=()):
    text = f"{main} because {because_clause}"
    parse = (
        f"(S (S {_leaves(main.split())}) "
        f"(SBAR (IN because) (S {_leaves(because_clause.split())})))"
    )
    return {
        "text": text,
        "parse": parse,
        "absa": {"aspect": aspect, "sentiment": sentiment,
                 "pairs": [list(p) for p in pairs]},
    }


ENTITIES = {
    "hotel-arcadia": {
        "groups": [
            [   # location, positive -- 8 units (one compound sentence)
                single("location", "positive", "the location was unbeatable for exploring downtown", [("location", "unbeatable")]),
                single("location", "positive", "great location near the riverside promenade and the tram stop", [("location", "great")]),
                single("location", "positive", "we walked to the museum district in five minutes"),
                single("location", "positive", "the location could not be better for sightseeing"),
                single("location", "positive", "perfect location steps from downtown shops and the harbor market", [("location", "perfect")]),
                compound("location", "positive",
                         "the location felt wonderfully central for every famous landmark here",
                         "the tram right outside took us straight to the museum quarter",
                         [("location", "central")]),
                single("location", "positive", "honestly the best location we have had in 12 trips", [("location", "best")]),
            ],
            [   # service, positive -- 7 units
                single("service", "positive", "the staff was incredibly helpful and kind", [("staff", "helpful")]),
                single("service", "positive", "reception staff arranged a downtown museum tour for us"),
                single("service", "positive", "the concierge remembered our names every single day"),
                single("service", "positive", "helpful staff at the front desk sorted our late checkout", [("staff", "helpful")]),
                single("service", "positive", "service was warm and attentive from checkin to checkout", [("service", "warm")]),
                single("service", "positive", "the staff went out of their way to flag the tram for the kids"),
                single("service", "positive", "housekeeping staff was friendly and fast", [("staff", "friendly")]),
            ],
            [   # rooms, positive -- 6 units
                single("rooms", "positive", "the room was spotless with a stocked minibar and a safe", [("room", "spotless")]),
                single("rooms", "positive", "our room on the 7th floor overlooked the quiet courtyard", [("courtyard", "quiet")]),
                single("rooms", "positive", "the bed was huge and the linens smelled fresh", [("bed", "huge")]),
                single("rooms", "positive", "room service brought spotless trays in 20 minutes"),
                single("rooms", "positive", "the room felt airy with tall windows facing the courtyard", [("room", "airy")]),
                single("rooms", "positive", "a spacious room with a rainfall shower and heated floor", [("room", "spacious")]),
            ],
            [   # rooms, negative -- 4 units (candidate pool below min size)
                single("rooms", "negative", "our room was dirty on arrival", [("room", "dirty")]),
                single("rooms", "negative", "the room smelled musty and stale", [("room", "musty")]),
                single("rooms", "negative", "dusty corners made the room feel dirty", [("room", "dusty")]),
                single("rooms", "negative", "the bathroom in our room needed a deep clean"),
            ],
            [   # breakfast, positive -- 5 units
                single("breakfast", "positive", "breakfast had fresh pastries and strong coffee", [("pastries", "fresh")]),
                single("breakfast", "positive", "the breakfast buffet on the ground floor was generous", [("buffet", "generous")]),
                single("breakfast", "positive", "we loved the omelet station at breakfast"),
                single("breakfast", "positive", "breakfast came with juice pressed that morning", parse=False),
                single("breakfast", "positive", "the spotless courtyard breakfast tables caught the morning sun"),
            ],
            [   # wifi, negative -- 3 units (pool below min size)
                single("wifi", "negative", "the wifi kept dropping in the lobby"),
                single("wifi", "negative", "wifi was spotty during our whole stay", [("wifi", "spotty")]),
                sbar("wifi", "negative",
                     "the lobby wifi dropped every single evening this whole week",
                     "the old router sat behind the thick concrete stairwell wall"),
            ],
        ],
        "summaries": [
            ("the hotel was in a great location with fabulous views", "location", "positive", [("location", "great")]),
            ("location is perfect for exploring the city", "location", "positive", [("location", "perfect")]),
            ("staff at the hotel is helpful", "service", "positive", [("staff", "helpful")]),
            ("the room was clean and modern", "rooms", "positive", [("room", "clean")]),
            ("breakfast was delicious every morning", "breakfast", "positive", [("breakfast", "delicious")]),
            ("some rooms were dirty", "rooms", "negative", [("room", "dirty")]),
            ("wifi was spotty in the lobby", "wifi", "negative", [("wifi", "spotty")]),
        ],
    },
    "hotel-bluebird": {
        "groups": [
            [   # location, positive -- 7 units
                single("location", "positive", "the location on the harborfront is simply stunning", [("location", "stunning")]),
                single("location", "positive", "we watched the ferry glide past the lighthouse every morning"),
                single("location", "positive", "a short stroll took us to the lighthouse point"),
                single("location", "positive", "the harborfront location made every dinner walk lovely", [("location", "lovely")]),
                single("location", "positive", "ferry tickets and harbor tours start right outside the door"),
                single("location", "positive", "location is ideal for the old town and the fish market", [("location", "ideal")]),
                single("location", "positive", "the best location in town if you love the sea", [("location", "best")]),
            ],
            [   # service, positive -- 6 units
                single("service", "positive", "the staff booked our ferry crossing without any fuss"),
                single("service", "positive", "attentive staff greeted us by name at the lighthouse bar", [("staff", "attentive")]),
                single("service", "positive", "the porter carried everything up with a huge smile"),
                single("service", "positive", "service here is personal and genuinely warm", [("service", "warm")]),
                single("service", "positive", "the front desk arranged a late harbor tour for us"),
                single("service", "positive", "staff refilled the lobby lemonade all afternoon"),
            ],
            [   # rooms, positive -- 6 units
                single("rooms", "positive", "our room had a wide balcony over the water", [("balcony", "wide")]),
                single("rooms", "positive", "the seaview room was bright and comfortable", [("room", "comfortable")]),
                single("rooms", "positive", "fresh towels appeared on the balcony terrace every day"),
                single("rooms", "positive", "the corner room stayed cool even in the afternoon heat", [("room", "cool")]),
                single("rooms", "positive", "a comfortable bed and blackout curtains meant perfect sleep", [("bed", "comfortable")]),
                single("rooms", "positive", "the room felt calm with soft grey walls", [("room", "calm")]),
            ],
            [   # pool, positive -- 5 units
                single("pool", "positive", "the rooftop pool was heavenly at sunset", [("pool", "heavenly")]),
                single("pool", "positive", "warm towels waited by the pool terrace"),
                single("pool", "positive", "the pool area never felt crowded"),
                single("pool", "positive", "swimming laps at dawn with the bay view was unreal", parse=False),
                single("pool", "positive", "the heated pool made the kids deliriously happy", [("pool", "heated")]),
            ],
            [   # noise, negative -- 3 units (pool below min size)
                single("noise", "negative", "the street noise was loud past midnight", [("noise", "loud")]),
                single("noise", "negative", "thin windows let in every scooter horn"),
                single("noise", "negative", "noise from the bar below lasted until 2 am"),
            ],
        ],
        "summaries": [
            ("the hotel location on the harborfront is stunning", "location", "positive", [("location", "stunning")]),
            ("staff are attentive and kind", "service", "positive", [("staff", "attentive")]),
            ("rooms are comfortable and calm", "rooms", "positive", [("room", "comfortable")]),
            ("the rooftop pool is heavenly", "pool", "positive", [("pool", "heavenly")]),
            ("street noise is loud at night", "noise", "negative", [("noise", "loud")]),
        ],
    },
    "cafe-clementine": {
        "groups": [
            [   # coffee, positive -- 7 units (one compound sentence)
                single("coffee", "positive", "the espresso here is rich and never bitter", [("espresso", "rich")]),
                single("coffee", "positive", "they roast their own beans behind the counter"),
                single("coffee", "positive", "the cinnamon latte is dangerously good", [("latte", "good")]),
                single("coffee", "positive", "a silky flat white made from a bright single origin roast"),
                single("coffee", "positive", "coffee arrived fast and piping hot", [("coffee", "hot")]),
                compound("coffee", "positive",
                         "the morning espresso was deep and chocolatey every single visit",
                         "the afternoon roast tasted bright with hints of orange peel",
                         [("espresso", "chocolatey")]),
            ],
            [   # service, positive -- 6 units
                single("service", "positive", "the barista remembered my usual after two visits"),
                single("service", "positive", "friendly baristas chat while they pull your espresso", [("barista", "friendly")]),
                single("service", "positive", "the counter staff kept the line moving with a smile"),
                single("service", "positive", "service stayed cheerful even during the weekend rush", [("service", "cheerful")]),
                single("service", "positive", "they walked my tray to the corner table unasked"),
                single("service", "positive", "the owner topped up our water and told us about the roast"),
            ],
            [   # pastries, positive -- 6 units
                single("pastries", "positive", "the almond croissant shatters in the best way"),
                single("pastries", "positive", "warm cinnamon rolls come out at nine sharp"),
                single("pastries", "positive", "pastries lined the counter in neat golden rows"),
                single("pastries", "positive", "the lemon tart is tangy and light", [("tart", "tangy")]),
                single("pastries", "positive", "flaky croissants pair perfectly with the house jam", [("croissant", "flaky")]),
                single("pastries", "positive", "a generous slice of carrot cake ended our visit", parse=False),
            ],
            [   # seating, negative -- 4 units (pool below min size)
                single("seating", "negative", "the seating area felt cramped at noon", [("seating", "cramped")]),
                single("seating", "negative", "we hovered ten minutes waiting for a free table"),
                single("seating", "negative", "tiny tables barely fit two cups and a laptop", [("table", "tiny")]),
                single("seating", "negative", "the bench by the window is hard and narrow", [("bench", "hard")]),
            ],
        ],
        "summaries": [
            ("the espresso is rich and the roast is bright", "coffee", "positive", [("espresso", "rich"), ("roast", "bright")]),
            ("baristas are friendly", "service", "positive", [("barista", "friendly")]),
            ("pastries are flaky and fresh", "pastries", "positive", [("pastry", "flaky")]),
            ("seating is cramped", "seating", "negative", [("seating", "cramped")]),
        ],
    },
}

N_REVIEWS = 20


def interleave(groups):
    """Round-robin across aspect groups so reviews mix topics."""
    out = []
    idx = [0] * len(groups)
    while any(idx[i] < len(groups[i]) for i in range(len(groups))):
        for i, group in enumerate(groups):
            if idx[i] < len(group):
                out.append(group[idx[i]])
                idx[i] += 1
    return out


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    corpus_path = OUT_DIR / "corpus.jsonl"
    summaries_path = OUT_DIR / "summaries.jsonl"
    with open(corpus_path, "w", encoding="utf-8") as f:
        for entity_id, spec in ENTITIES.items():
            sentences = interleave(spec["groups"])
            n = len(sentences)
            assert 20 <= n <= 2 * N_REVIEWS, (entity_id, n)
            doubles = n - N_REVIEWS
            sizes = [2] * doubles + [1] * (N_REVIEWS - doubles)
            pos = 0
            for r, size in enumerate(sizes):
                record = {
                    "entity_id": entity_id,
                    "review_id": f"r{r:02d}",
                    "sentences": sentences[pos:pos + size],
                }
                pos += size
                f.write(json.dumps(record) + "\n")
            assert pos == n
    with open(summaries_path, "w", encoding="utf-8") as f:
        for entity_id, spec in ENTITIES.items():
            for text, aspect, sentiment, pairs in spec["summaries"]:
                record = {
                    "entity_id": entity_id,
                    "text": text,
                    "absa": {
                        "aspect": aspect,
                        "sentiment": sentiment,
                        "pairs": [list(p) for p in pairs],
                    },
                }
                f.write(json.dumps(record) + "\n")
    print(f"wrote {corpus_path} and {summaries_path}")


if __name__ == "__main__":
    main()
