#!/usr/bin/env python3
"""Regenerate the synthetic demo collection under data/demo/.

Five topics with seeded lexical passages (100 per topic). Run depths vary
per topic so per-topic metric values differ and collection-level t-tests
have nonzero variance. Output is deterministic for a given seed.
"""

import argparse
import random
from pathlib import Path

TOPICS = [
    ("101", "how do solar panels convert sunlight into electricity"),
    ("102", "health benefits of regular swimming exercise"),
    ("103", "what causes inflation in modern economies"),
    ("104", "history of the transcontinental railroad construction"),
    ("105", "best practices for container vegetable gardening"),
]

# candidate depth per topic (kept distinct on purpose)
DEPTHS = {"101": 100, "102": 95, "103": 90, "104": 85, "105": 80}

TOPIC_TERMS = {
    "101": ["solar", "panels", "sunlight", "electricity", "photovoltaic", "silicon",
            "inverter", "energy", "cells", "grid"],
    "102": ["swimming", "exercise", "health", "cardio", "muscles", "endurance",
            "pool", "strokes", "joints", "fitness"],
    "103": ["inflation", "economy", "prices", "monetary", "demand", "supply",
            "wages", "currency", "interest", "costs"],
    "104": ["railroad", "transcontinental", "construction", "tracks", "locomotive",
            "workers", "pacific", "union", "spike", "tunnels"],
    "105": ["garden", "containers", "vegetables", "soil", "watering", "seedlings",
            "compost", "tomatoes", "drainage", "harvest"],
}

FILLER = [
    "report", "study", "people", "years", "common", "process", "system", "large",
    "small", "often", "general", "method", "results", "section", "example",
    "different", "important", "typical", "public", "record", "modern", "early",
    "local", "several", "major", "simple", "detail", "notes", "summary", "review",
]

# grade -> number of judged passages per topic
JUDGED = {0: 12, 1: 10, 2: 5, 3: 3}


def sentence(rng, words, n):
    picked = [rng.choice(words) for _ in range(n)]
    text = " ".join(picked)
    return text[0].upper() + text[1:] + "."


def passage_text(rng, topic_id, idx):
    terms = TOPIC_TERMS[topic_id]
    # roughly rank-correlated topical density, with noise
    density = max(1, 6 - idx // 20 + rng.randint(-1, 1))
    body = []
    vocab = terms[:density] + FILLER
    for _ in range(rng.randint(2, 3)):
        body.append(sentence(rng, vocab, rng.randint(8, 14)))
    return " ".join(body)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="data/demo")
    parser.add_argument("--seed", type=int, default=20250101)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "topics.tsv", "w") as f:
        for tid, query in TOPICS:
            f.write(f"{tid}\t{query}\n")

    passages = []  # (pid, text)
    run_lines = []
    qrels_lines = []
    for tid, _query in TOPICS:
        pids = [f"p{tid}_{i:03d}" for i in range(1, 101)]
        for i, pid in enumerate(pids):
            passages.append((pid, passage_text(rng, tid, i)))
        depth = DEPTHS[tid]
        retrieved = pids[:depth]
        for rank, pid in enumerate(retrieved, start=1):
            score = 24.0 - 0.11 * rank + 0.001 * rng.randint(0, 9)
            run_lines.append(f"{tid} Q0 {pid} {rank} {score:.4f} bm25")
        # judged pool: spread across the retrieved depth
        judged_pool = rng.sample(retrieved, sum(JUDGED.values()))
        cursor = 0
        for grade, count in sorted(JUDGED.items()):
            for pid in judged_pool[cursor:cursor + count]:
                qrels_lines.append(f"{tid} 0 {pid} {grade}")
            cursor += count

    with open(out / "passages.tsv", "w") as f:
        for pid, text in passages:
            f.write(f"{pid}\t{text}\n")
    with open(out / "bm25_run.txt", "w") as f:
        f.write("\n".join(run_lines) + "\n")
    with open(out / "qrels.txt", "w") as f:
        f.write("\n".join(sorted(qrels_lines)) + "\n")

    print(f"wrote {len(TOPICS)} topics, {len(passages)} passages, "
          f"{len(run_lines)} run lines, {len(qrels_lines)} judgments to {out}")


if __name__ == "__main__":
    main()
