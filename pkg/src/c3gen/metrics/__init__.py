"""Objective metrics, tokenization, and evaluation reports."""

from c3gen.metrics.report import MetricReport, evaluate_run, read_results_jsonl
from c3gen.metrics.scores import CiderResult, RougeScore, cider, gleu, lcs_length, meteor, rouge_l
from c3gen.metrics.tokenize import tokenize

__all__ = [
    "CiderResult",
    "MetricReport",
    "RougeScore",
    "cider",
    "evaluate_run",
    "gleu",
    "lcs_length",
    "meteor",
    "read_results_jsonl",
    "rouge_l",
    "tokenize",
]
