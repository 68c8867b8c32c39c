#!/usr/bin/env python3
"""Independent ROUGE reference used once to freeze expected.json.

Tokens: NFC, lowercase, maximal runs of letters, decimal digits and marks.
ROUGE-N uses clipped n-gram counts; ROUGE-L enumerates subsequences of the
shorter list. Scores are F1 (beta = 1).

    python3 oracle.py > expected.json
"""
import itertools
import json
import pathlib
import unicodedata
from collections import Counter

HERE = pathlib.Path(__file__).resolve().parent


def tokenize(s):
    s = unicodedata.normalize("NFC", s).lower()
    out, cur = [], ""
    for ch in s:
        cat = unicodedata.category(ch)
        if cat.startswith("L") or cat == "Nd" or cat.startswith("M"):
            cur += ch
        elif cur:
            out.append(cur)
            cur = ""
    if cur:
        out.append(cur)
    return out


def f1(hits, c, r):
    p = hits / c if c else 0.0
    rr = hits / r if r else 0.0
    return 0.0 if p + rr == 0 else 2 * p * rr / (p + rr)


def rouge_n(c, r, n):
    cg = Counter(tuple(c[i:i + n]) for i in range(len(c) - n + 1))
    rg = Counter(tuple(r[i:i + n]) for i in range(len(r) - n + 1))
    return f1(sum((cg & rg).values()), sum(cg.values()), sum(rg.values()))


def is_subseq(needle, hay):
    it = iter(hay)
    return all(any(x == y for y in it) for x in needle)


def lcs(a, b):
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    for k in range(len(short), 0, -1):
        for idx in itertools.combinations(range(len(short)), k):
            if is_subseq([short[i] for i in idx], long_):
                return k
    return 0


def rouge_l(c, r):
    return f1(lcs(c, r), len(c), len(r))


def means(pairs):
    rows = [(rouge_n(c, r, 1), rouge_n(c, r, 2), rouge_l(c, r)) for c, r in pairs]
    return {k: sum(x[i] for x in rows) / len(rows) for i, k in enumerate(["rouge1", "rouge2", "rougeL"])}


def main():
    pairs = []
    for line in (HERE / "pairs20.jsonl").read_text(encoding="utf-8").splitlines():
        row = json.loads(line)
        pairs.append((tokenize(row["clue"]), tokenize(row["context"])))
    models = json.loads((HERE / "two_models.json").read_text(encoding="utf-8"))
    refs = {x["key"]: x["clue"] for x in models["set_b"]}
    aligned = [(tokenize(x["clue"]), tokenize(refs[x["key"]])) for x in models["set_a"]]
    print(json.dumps({"pairs20": means(pairs), "two_models": means(aligned)}, indent=1))


if __name__ == "__main__":
    main()
