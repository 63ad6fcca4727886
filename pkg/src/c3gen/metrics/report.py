"""Run-level evaluation: per-item metric scores and aggregate percentages.

Input is a list of (commit_id, generated, reference) rows; output is a
report with one entry per scored item plus arithmetic-mean aggregates
scaled to percentages (the [0, 10] consensus metric maps onto [0, 100]).
Items without a reference are skipped and counted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from c3gen.errors import EmptyRunError
from c3gen.metrics.scores import cider, gleu, meteor, rouge_l
from c3gen.metrics.tokenize import tokenize

#: Documents the metric variants so scores are interpretable later.
REPORT_HEADER = {
    "bleu": "pooled 1-4 gram min(precision, recall)",
    "rouge_l": "LCS F-measure, beta=1",
    "meteor": "exact + Porter-stem unigram alignment; no synonym stage",
    "cider": "TF-IDF n-gram cosine consensus, n=1..4, scaled x10; "
             "idf over this run's references",
    "tokenizer": "lowercase, whitespace split, outer punctuation stripped",
}


@dataclass
class MetricReport:
    per_item: list[dict] = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    skipped: int = 0
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "header": REPORT_HEADER,
            "items": self.per_item,
            "aggregates": self.aggregates,
            "skipped": self.skipped,
            "warnings": self.warnings,
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def _missing(value) -> bool:
    return value is None or (isinstance(value, str) and not value.strip())


def evaluate_run(results: list[dict]) -> MetricReport:
    """Score every row of ``results`` with all four metrics.

    Rows look like {"commit_id", "generated", "reference"}; rows with a
    missing reference are skipped. Aggregates are arithmetic means as
    percentages, rounded to 2 decimals.
    """
    if not results:
        raise EmptyRunError("no results to evaluate")

    report = MetricReport()
    scored: list[tuple[str, list[str], list[str]]] = []
    for row in results:
        if _missing(row.get("reference")):
            report.skipped += 1
            continue
        generated = row.get("generated") or ""
        scored.append(
            (str(row.get("commit_id", "")), tokenize(generated), tokenize(row["reference"]))
        )
    if not scored:
        raise EmptyRunError("every result row was missing its reference")

    cider_result = cider([(cand, [ref]) for _cid, cand, ref in scored])
    if cider_result.degenerate_idf:
        report.warnings.append(
            "cider: single-item corpus has degenerate idf (log 1 = 0); scores forced to 0"
        )

    for (commit_id, cand, ref), item_cider in zip(scored, cider_result.per_item):
        report.per_item.append(
            {
                "commit_id": commit_id,
                "bleu": gleu(cand, ref),
                "rouge_l_f": rouge_l(cand, ref).f,
                "meteor": meteor(cand, ref),
                "cider": item_cider,
            }
        )

    count = len(report.per_item)
    report.aggregates = {
        "bleu": round(100 * sum(i["bleu"] for i in report.per_item) / count, 2),
        "rouge_l_f": round(100 * sum(i["rouge_l_f"] for i in report.per_item) / count, 2),
        "meteor": round(100 * sum(i["meteor"] for i in report.per_item) / count, 2),
        # cider items live in [0, 10]; x10 maps the mean onto [0, 100]
        "cider": round(10 * sum(i["cider"] for i in report.per_item) / count, 2),
        "count": count,
    }
    return report


def read_results_jsonl(text: str) -> list[dict]:
    """Parse results JSONL: one {commit_id, generated, reference} per line."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append(json.loads(line))
        except ValueError as exc:
            raise EmptyRunError(f"bad results line {lineno}: {exc}") from exc
    return rows
