#!/usr/bin/env python3
"""Writes the shipped trace fixtures.

Deterministic: rerunning produces byte-identical files. Run from this
directory, then run reference.py to refresh the expected outputs.
"""

import json
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
PROMPT = "This is a passage from Wikipedia about {}:"
MODEL = "synthetic-proxy"
TAIL_SPREAD = 40
VOCAB = [
    "the", "a", "was", "is", "in", "at", "of", "and", "her", "his", "she", "he",
    "born", "won", "gold", "silver", "team", "band", "city", "year", "coach",
    "album", "records", "million", "ten", "five", "song", "river", "town",
    "Olympics", "Ohio", "Texas", "Kim", "Lee", "Rome", "Paris", "1992", "1990",
    "2012", "2008", "Winger", "Poison", "Caquatto", "Ray", "club", "medal",
]

# (word, keyword_class, entity_type); sentences end with "."
PASSAGES = {
    "p1": ("Mattie Larson", [
        [("Caquatto", "entity", "PERSON"), ("was", None, None), ("born", None, None),
         ("in", None, None), ("1992", "entity", "DATE"), (".", None, None)],
        [("She", None, None), ("won", None, None), ("gold", "noun", None),
         ("at", None, None), ("the", None, None), ("2012", "entity", "DATE"),
         ("Olympics", "entity", "EVENT"), (".", None, None)],
        [("Her", None, None), ("coach", "noun", None), ("was", None, None),
         ("Kim", "entity", "PERSON"), (".", None, None)],
    ]),
    "p2": ("Winger", [
        [("Winger", "entity", "ORG"), ("is", None, None), ("a", None, None),
         ("band", "noun", None), ("from", None, None), ("Ohio", "entity", "GPE"),
         (".", None, None)],
        [("The", None, None), ("band", "noun", None), ("sold", None, None),
         ("ten", "entity", "CARDINAL"), ("million", "entity", "CARDINAL"),
         ("records", "noun", None), (".", None, None)],
    ]),
    "p3": ("Ray Lee", [
        [("Lee", "entity", "PERSON"), ("is", None, None), ("a", None, None),
         ("coach", "noun", None), (".", None, None)],
        [("He", None, None), ("was", None, None), ("born", None, None),
         ("in", None, None), ("Rome", "entity", "GPE"), ("in", None, None),
         ("1990", "entity", "DATE"), (".", None, None)],
        [("His", None, None), ("team", "noun", None), ("won", None, None),
         ("a", None, None), ("medal", "noun", None), (".", None, None)],
    ]),
}

ANNOTATIONS = {
    "p1": ["accurate", "accurate", "minor_inaccurate"],
    "p2": ["major_inaccurate", "major_inaccurate"],
    "p3": ["accurate", "major_inaccurate", "minor_inaccurate"],
}

# Label mixes for the sentence-class fixture: all accurate, all major, all
# minor, accurate+major, accurate+minor, all three.
CLASS_FIXTURE = {
    "c_acc": ["accurate", "accurate"],
    "c_major": ["major_inaccurate", "major_inaccurate", "major_inaccurate"],
    "c_minor": ["minor_inaccurate"],
    "c_acc_major": ["accurate", "major_inaccurate"],
    "c_acc_minor": ["minor_inaccurate", "accurate", "accurate"],
    "c_mixed": ["major_inaccurate", "accurate", "minor_inaccurate"],
}


def exp_entropy(probs):
    return 2.0 ** -sum(p * math.log2(p) for p in probs if p > 0.0)


def distribution(rng, text, p_realized, width):
    """Top-k candidates containing `text` with probability `p_realized`."""
    others = [w for w in VOCAB if w != text]
    rng.shuffle(others)
    remaining = 1.0 - p_realized
    cands = [(text, p_realized)]
    for w in others[:width]:
        share = round(remaining * rng.uniform(0.15, 0.6), 6)
        if share <= 0.0:
            break
        cands.append((w, share))
        remaining -= share
    cands.sort(key=lambda c: -c[1])
    tail = 1.0 - sum(p for _, p in cands)
    tail = max(0.0, round(tail, 9))
    spread = [tail / TAIL_SPREAD] * TAIL_SPREAD if tail > 0 else []
    entropy_term = exp_entropy([p for _, p in cands] + spread)
    return [[t, p] for t, p in cands], tail, entropy_term


def token(index, text, sentence, prob, cls, etype, rng, is_tag=False, width=None):
    prob = round(prob, 6)
    cands, tail, ent = distribution(rng, text, prob, width if width is not None else rng.randint(1, 5))
    rec = {
        "index": index,
        "text": text,
        "sentence_index": sentence,
        "logprob": math.log(prob),
        "entropy_term": ent,
        "is_keyword": cls is not None,
        "keyword_class": cls or "none",
    }
    if etype is not None:
        rec["entity_type"] = etype
    rec.update({"is_tag": is_tag, "candidates": cands, "tail_mass": tail})
    return rec


def attention(rng, tokens):
    rows = []
    keywords = [t["index"] for t in tokens if t["is_keyword"]]
    for pos, i in enumerate(keywords):
        if pos == 0:
            continue
        weights = [[j, round(rng.uniform(0.0, 1.0), 6)] for j in keywords[:pos]]
        rows.append({"i": i, "weights": weights})
    return {"pooling": "max-layers-heads", "rows": rows}


def build_trace(pid, concept, sentences, variant, seed):
    rng = random.Random(seed)
    tokens = []
    for s, words in enumerate(sentences):
        for word, cls, etype in words:
            if variant == "typed" and cls == "entity":
                tag = "<" + etype + ">"
                tokens.append(token(len(tokens), tag, s, rng.uniform(0.3, 0.9), None, None, rng, is_tag=True))
            # Keywords are less certain than function words; typing raises
            # entity probabilities a little.
            if cls is None:
                p = rng.uniform(0.4, 0.97)
            else:
                p = rng.uniform(0.02, 0.7)
                if variant == "typed" and cls == "entity":
                    p = min(0.95, p * rng.uniform(1.1, 1.6))
            tokens.append(token(len(tokens), word, s, p, cls, etype, rng))
    return {
        "schema_version": 1,
        "passage_id": pid,
        "variant": variant,
        "prompt": PROMPT.format(concept),
        "model_id": MODEL,
        "tokens": tokens,
        "attention": attention(rng, tokens),
    }


def minitrace():
    rng = random.Random(7)
    words = [
        [("Caquatto", "entity", "PERSON"), ("was", None, None), ("born", None, None),
         ("in", None, None), ("1992", "entity", "DATE"), (".", None, None)],
        [("She", None, None), ("won", None, None), ("gold", "noun", None),
         ("at", None, None), ("2012", "entity", "DATE"), ("Olympics", "entity", "EVENT")],
    ]
    tokens = []
    for s, ws in enumerate(words):
        for w, cls, etype in ws:
            p = rng.uniform(0.4, 0.97) if cls is None else rng.uniform(0.05, 0.6)
            tokens.append(token(len(tokens), w, s, p, cls, etype, rng))
    return {
        "schema_version": 1,
        "passage_id": "mini",
        "variant": "plain",
        "prompt": PROMPT.format("Mattie Larson"),
        "model_id": MODEL,
        "tokens": tokens,
        "attention": attention(rng, tokens),
    }


def counts(traces):
    rng = random.Random(11)
    num_docs = 1000
    doc_freq = {}
    words = set(VOCAB)
    for t in traces:
        for tok in t["tokens"]:
            words.add(tok["text"])
            words.update(c[0] for c in tok["candidates"])
    for w in sorted(words):
        if w.startswith("<"):
            continue
        if w.islower() and len(w) <= 4:
            doc_freq[w] = rng.randint(600, num_docs)
        else:
            doc_freq[w] = rng.randint(1, 300)
    # Leave a couple of candidate words unseen so the default applies.
    for w in ("Poison", "medal"):
        doc_freq.pop(w, None)
    return {"num_docs": num_docs, "doc_freq": doc_freq}


def dump(path, value):
    full = os.path.join(HERE, path)
    os.makedirs(os.path.dirname(full), exist_ok=True)
    with open(full, "w") as f:
        json.dump(value, f, indent=2, ensure_ascii=False)
        f.write("\n")


def main():
    all_traces = []
    for seed, (pid, (concept, sentences)) in enumerate(sorted(PASSAGES.items())):
        for variant in ("plain", "typed"):
            t = build_trace(pid, concept, sentences, variant, 100 + 10 * seed + (variant == "typed"))
            dump(f"golden/{variant}/{pid}.json", t)
            all_traces.append(t)
    dump("golden/annotations.json", {"passages": ANNOTATIONS})
    c = counts(all_traces)
    dump("golden/counts.json", c)
    dump("golden/idf.json", {"num_docs": c["num_docs"], "default_df": 1, "doc_freq": c["doc_freq"]})
    dump("classes/annotations.json", {"passages": CLASS_FIXTURE})

    mini = minitrace()
    dump("minitrace.json", mini)
    broken = json.loads(json.dumps(mini))
    broken["tokens"][3]["sentence_index"] = 1
    broken["tokens"][4]["entropy_term"] = 0.5
    dump("corrupted.json", broken)


if __name__ == "__main__":
    main()
