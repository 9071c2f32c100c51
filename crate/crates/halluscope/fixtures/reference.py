#!/usr/bin/env python3
"""Reference scorer for the golden fixtures.

Written from the scoring definitions alone (plain Python math, sklearn and
scipy for metrics) and shares no code with the Rust implementation. Writes
golden/expected/scores.json and golden/expected/ablation.json.
"""

import json
import math
import os

from scipy.stats import pearsonr, spearmanr
from sklearn.metrics import average_precision_score

HERE = os.path.dirname(os.path.abspath(__file__))
GAMMA, RHO = 0.9, 0.01

LADDER = [
    ("avg(h)", "plain", dict(use_keywords=False, use_penalty=False, use_type=False, use_idf=False)),
    ("+keyword", "plain", dict(use_keywords=True, use_penalty=False, use_type=False, use_idf=False)),
    ("+penalty", "plain", dict(use_keywords=True, use_penalty=True, use_type=False, use_idf=False)),
    ("+entity type", "typed", dict(use_keywords=True, use_penalty=True, use_type=True, use_idf=False)),
    ("+token idf", "typed", dict(use_keywords=True, use_penalty=True, use_type=True, use_idf=True)),
]


def load(path):
    with open(os.path.join(HERE, path)) as f:
        return json.load(f)


def rounded(x):
    r = math.copysign(math.floor(abs(x) * 1e9 + 0.5), x) / 1e9
    return 0.0 if r == 0 else r


def idf_of(table, word):
    df = table["doc_freq"].get(word, table["default_df"])
    return math.log(table["num_docs"] / df)


def two_pow_entropy(ps):
    return 2.0 ** sum(-p * math.log2(p) for p in ps if p > 0)


def token_inputs(tok, cfg, idf):
    if not (cfg["use_type"] or cfg["use_idf"]):
        return math.exp(tok["logprob"]), tok["entropy_term"]
    kept = [(w, p) for w, p in tok["candidates"] if p > RHO or w == tok["text"]]
    mass = sum(p for _, p in kept)
    dist = {w: p / mass for w, p in kept}
    if cfg["use_idf"]:
        weights = {w: idf_of(idf, w) for w in dist}
        z = sum(dist[w] * weights[w] for w in dist)
        # Equal weights cancel; a realized token with no weighted mass
        # would score infinite, so the distribution is left alone.
        if len(set(weights.values())) > 1 and dist[tok["text"]] * weights[tok["text"]] > 0:
            dist = {w: dist[w] * weights[w] / z for w in dist}
    return dist[tok["text"]], two_pow_entropy(dist.values())


def score_trace(trace, cfg, idf):
    toks = trace["tokens"]
    n = len(toks)
    h = [0.0] * n
    for t in toks:
        if not t["is_tag"]:
            p, e = token_inputs(t, cfg, idf)
            h[t["index"]] = -math.log(p) + e

    kw = [t["is_keyword"] and not t["is_tag"] for t in toks]
    h_hat = list(h)
    pen = [0.0] * n
    if cfg["use_penalty"]:
        rows = {r["i"]: r["weights"] for r in trace["attention"]["rows"]}
        for i in range(n):
            if not kw[i] or i not in rows:
                continue
            ws = [(j, w) for j, w in rows[i] if kw[j]]
            total = sum(w for _, w in ws)
            if total > 0:
                pen[i] = sum(w / total * h_hat[j] for j, w in ws)
            h_hat[i] = h[i] + GAMMA * pen[i]

    def mean_over(idx):
        scored = [i for i in idx if not toks[i]["is_tag"]]
        chosen = [i for i in scored if kw[i]] if cfg["use_keywords"] else []
        chosen = chosen or scored
        return sum(h_hat[i] for i in chosen) / len(chosen)

    sentences = sorted({t["sentence_index"] for t in toks})
    config = dict(gamma=GAMMA, rho=RHO, **cfg)
    flag = lambda k: "1" if cfg[k] else "0"
    return {
        "passage_id": trace["passage_id"],
        "variant": trace["variant"],
        "config_fingerprint": f"gamma={GAMMA};rho={RHO};keyword={flag('use_keywords')};"
        f"penalty={flag('use_penalty')};type={flag('use_type')};idf={flag('use_idf')}",
        "config": config,
        "token_scores": [
            {"index": t["index"], "h": rounded(h[t["index"]]), "h_hat": rounded(h_hat[t["index"]]),
             "penalty": rounded(pen[t["index"]])}
            for t in toks if not t["is_tag"]
        ],
        "sentence_scores": [rounded(mean_over([t["index"] for t in toks if t["sentence_index"] == s]))
                            for s in sentences],
        "passage_score": rounded(mean_over(range(n))),
    }


def metrics(annotations, raw_scores):
    nf, nf_star, fact = ([], []), ([], []), ([], [])
    gold, pred = [], []
    for pid, labels in sorted(annotations.items()):
        s = raw_scores[pid]
        all_major = all(l == "major_inaccurate" for l in labels)
        for label, score in zip(labels, s["sentences"]):
            nf[0].append(label != "accurate")
            nf[1].append(score)
            if not all_major:
                nf_star[0].append(label == "major_inaccurate")
                nf_star[1].append(score)
            fact[0].append(label == "accurate")
            fact[1].append(-score)
        value = {"accurate": 0.0, "minor_inaccurate": 0.5, "major_inaccurate": 1.0}
        gold.append(sum(value[l] for l in labels) / len(labels))
        pred.append(s["passage"])
    return {
        "nonfactual_ap": rounded(average_precision_score(*nf)),
        "nonfactual_star_ap": rounded(average_precision_score(*nf_star)),
        "factual_ap": rounded(average_precision_score(*fact)),
        "pearson": rounded(pearsonr(pred, gold)[0]),
        "spearman": rounded(spearmanr(pred, gold)[0]),
    }


def unrounded_aggregates(trace, cfg, idf):
    # Metrics are computed on full-precision scores, as the engine does.
    global rounded
    keep = rounded
    rounded = lambda x: x
    try:
        s = score_trace(trace, cfg, idf)
    finally:
        rounded = keep
    return {"sentences": s["sentence_scores"], "passage": s["passage_score"]}


def main():
    annotations = load("golden/annotations.json")["passages"]
    idf = load("golden/idf.json")
    traces = {v: {pid: load(f"golden/{v}/{pid}.json") for pid in annotations} for v in ("plain", "typed")}
    scores, rows = {}, []
    for label, variant, cfg in LADDER:
        scores[label] = [score_trace(traces[variant][pid], cfg, idf) for pid in sorted(annotations)]
        raw = {pid: unrounded_aggregates(traces[variant][pid], cfg, idf) for pid in annotations}
        rows.append({
            "label": label,
            "variant": variant,
            "config": dict(gamma=GAMMA, rho=RHO, **cfg),
            "metrics": metrics(annotations, raw),
        })
    os.makedirs(os.path.join(HERE, "golden/expected"), exist_ok=True)
    for name, value in (("scores", scores), ("ablation", {"gamma": GAMMA, "rho": RHO, "rows": rows})):
        with open(os.path.join(HERE, f"golden/expected/{name}.json"), "w") as f:
            json.dump(value, f, indent=2)
            f.write("\n")


if __name__ == "__main__":
    main()
