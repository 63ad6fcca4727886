"""The four objective similarity metrics.

All metrics operate on token lists from :mod:`c3gen.metrics.tokenize`.
Scores are sentence-level: gleu / rouge_l.f / meteor in [0, 1], cider in
[0, 10]. Aggregation into percentages happens in the report layer.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from c3gen.metrics.stemmer import stem

DEFAULT_MAX_N = 4


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _pooled_ngrams(tokens: list[str], max_n: int) -> Counter:
    pooled: Counter = Counter()
    for n in range(1, max_n + 1):
        pooled.update(_ngrams(tokens, n))
    return pooled


def gleu(candidate: list[str], reference: list[str], max_n: int = DEFAULT_MAX_N) -> float:
    """min(precision, recall) of matched n-grams pooled over n = 1..max_n."""
    cand = _pooled_ngrams(candidate, max_n)
    ref = _pooled_ngrams(reference, max_n)
    total_cand = sum(cand.values())
    total_ref = sum(ref.values())
    if total_cand == 0 or total_ref == 0:
        return 0.0
    matches = sum((cand & ref).values())
    return min(matches / total_cand, matches / total_ref)


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f: float


def lcs_length(a: list[str], b: list[str]) -> int:
    """Longest common subsequence length, standard DP."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        cur = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = max(prev[j], cur[j - 1])
        prev = cur
    return prev[len(b)]


def rouge_l(candidate: list[str], reference: list[str]) -> RougeScore:
    """LCS-based precision/recall with the balanced F-measure (beta = 1)."""
    if not candidate or not reference:
        return RougeScore(0.0, 0.0, 0.0)
    lcs = lcs_length(candidate, reference)
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    if precision + recall == 0:
        return RougeScore(0.0, 0.0, 0.0)
    f = 2 * precision * recall / (precision + recall)
    return RougeScore(precision, recall, f)


def _align(candidate: list[str], reference: list[str]) -> list[tuple[int, int]]:
    """Unigram alignment pairs (cand_idx, ref_idx): exact stage first, then
    Porter-stemmed, each greedy first-unused-match in sequence order."""
    pairs: list[tuple[int, int]] = []
    used_cand = [False] * len(candidate)
    used_ref = [False] * len(reference)

    def run_stage(cand_keys: list[str], ref_keys: list[str]):
        for i, key in enumerate(cand_keys):
            if used_cand[i]:
                continue
            for j, ref_key in enumerate(ref_keys):
                if not used_ref[j] and key == ref_key:
                    pairs.append((i, j))
                    used_cand[i] = True
                    used_ref[j] = True
                    break

    run_stage(candidate, reference)
    run_stage([stem(w) for w in candidate], [stem(w) for w in reference])
    pairs.sort()
    return pairs


def _chunks(pairs: list[tuple[int, int]]) -> int:
    """Number of maximal runs of adjacent, order-preserving pairs."""
    count = 0
    prev = None
    for pair in pairs:
        if prev is None or pair != (prev[0] + 1, prev[1] + 1):
            count += 1
        prev = pair
    return count


def meteor(candidate: list[str], reference: list[str]) -> float:
    """Unigram-alignment score: recall-weighted F-mean with a fragmentation
    penalty of 0.5 * (chunks / matches)^3."""
    if not candidate or not reference:
        return 0.0
    pairs = _align(candidate, reference)
    matches = len(pairs)
    if matches == 0:
        return 0.0
    precision = matches / len(candidate)
    recall = matches / len(reference)
    f_mean = 10 * precision * recall / (recall + 9 * precision)
    penalty = 0.5 * (_chunks(pairs) / matches) ** 3
    return f_mean * (1 - penalty)


@dataclass(frozen=True)
class CiderResult:
    per_item: list[float]  # each in [0, 10]
    mean: float
    degenerate_idf: bool  # single-item corpus: all idf = log(1) = 0


def cider(
    items: list[tuple[list[str], list[list[str]]]],
    max_n: int = DEFAULT_MAX_N,
) -> CiderResult:
    """Consensus metric: TF-IDF n-gram cosine, averaged over n, scaled x10.

    ``items`` pairs each candidate with its reference list; document
    frequency is computed over the items' reference sets, so a single-item
    corpus degenerates to all-zero idf and scores 0 by convention.
    """
    if not items:
        raise ValueError("cider requires a non-empty corpus")
    num_docs = len(items)

    # document frequency per n-gram over each item's reference set
    df: Counter = Counter()
    for _cand, refs in items:
        seen: set = set()
        for ref in refs:
            for n in range(1, max_n + 1):
                seen.update(_ngrams(ref, n))
        df.update(seen)

    def idf(gram: tuple) -> float:
        return math.log(num_docs / max(1.0, df[gram]))

    def tfidf_by_n(tokens: list[str]) -> list[dict]:
        vecs = []
        for n in range(1, max_n + 1):
            vec = {g: c * idf(g) for g, c in _ngrams(tokens, n).items()}
            vecs.append(vec)
        return vecs

    def cosine(u: dict, v: dict) -> float:
        nu = math.sqrt(sum(x * x for x in u.values()))
        nv = math.sqrt(sum(x * x for x in v.values()))
        if nu == 0 or nv == 0:
            return 0.0
        dot = sum(x * v[g] for g, x in u.items() if g in v)
        return dot / (nu * nv)

    per_item: list[float] = []
    for cand, refs in items:
        cand_vecs = tfidf_by_n(cand)
        score_by_n = []
        for n in range(max_n):
            sims = []
            for ref in refs:
                ref_vec = {g: c * idf(g) for g, c in _ngrams(ref, n + 1).items()}
                sims.append(cosine(cand_vecs[n], ref_vec))
            score_by_n.append(sum(sims) / len(sims) if sims else 0.0)
        per_item.append(10.0 * sum(score_by_n) / max_n)

    mean = sum(per_item) / len(per_item)
    return CiderResult(per_item=per_item, mean=mean, degenerate_idf=num_docs == 1)
