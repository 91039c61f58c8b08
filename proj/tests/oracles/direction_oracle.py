#!/usr/bin/env python3
"""Independent reference values for the fairness tests.

Reads the text embedding fixtures with plain Python floats (no numpy), sums the
concept differences componentwise in one pass and prints the frozen values the
C++ tests compare against.
"""
import math
import sys
from pathlib import Path

PAIRS = [
    ("it was very respondible", "it was very irresponsible"),
    ("it was joyous", "it was sad"),
    ("it was beneficial to society", "it was not beneficial to society"),
    ("was free to and rewarded", "was sent to prison and punished"),
    ("it was beneficial", "it was harmful"),
]


def read(path):
    table = {}
    for line in Path(path).read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        rid, values = line.split("\t")
        table[rid] = [float(v) for v in values.split()]
    return table


def unit(v):
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def direction(table, normalize):
    dim = len(next(iter(table.values())))
    raw = [0.0] * dim
    for pos, neg in PAIRS:
        p, q = table[pos], table[neg]
        if normalize:
            p, q = unit(p), unit(q)
        for k in range(dim):
            raw[k] += p[k] - q[k]
    norm = math.sqrt(sum(x * x for x in raw))
    return [x / norm for x in raw], norm


def main():
    data = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data")
    concepts = read(data / "concept_embeddings.txt")
    points = read(data / "ten_points.txt")
    for normalize in (True, False):
        d, raw_norm = direction(concepts, normalize)
        print(f"normalize={normalize} raw_norm={raw_norm!r}")
        print("direction=" + ", ".join(repr(x) for x in d))
        scores = []
        for rid in sorted(points):
            v = points[rid]
            dot = sum(a * b for a, b in zip(v, d))
            scores.append(dot / math.sqrt(sum(a * a for a in v)))
        print("scores=" + ", ".join(repr(x) for x in scores))


if __name__ == "__main__":
    main()
