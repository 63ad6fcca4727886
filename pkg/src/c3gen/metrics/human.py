"""Schema and session file for the human-judgment side of evaluation.

Raters score candidates on clarity, completeness, and correctness, each an
integer 1-5. Candidate order is randomized per item (seeded) and the
permutation is persisted so scores can be de-randomized back to their
sources. Running a study is out of scope; this module only owns the data
format.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

DIMENSIONS = ("clarity", "completeness", "correctness")
MIN_SCORE, MAX_SCORE = 1, 5


@dataclass
class HumanEvalItem:
    commit_id: str
    candidates: list[dict]  # {"candidate_id", "text", "hidden_source"}
    permutation: list[str]  # hidden sources in display order
    scores: dict = field(default_factory=dict)  # rater -> candidate_id -> dims

    def to_dict(self) -> dict:
        return {
            "commit_id": self.commit_id,
            "candidates": self.candidates,
            "permutation": self.permutation,
            "scores": self.scores,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HumanEvalItem":
        return cls(
            commit_id=d["commit_id"],
            candidates=d["candidates"],
            permutation=d["permutation"],
            scores=d.get("scores", {}),
        )


@dataclass
class HumanEvalSession:
    seed: int
    items: list[HumanEvalItem] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"seed": self.seed, "items": [i.to_dict() for i in self.items]}

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "HumanEvalSession":
        return cls(seed=d["seed"], items=[HumanEvalItem.from_dict(i) for i in d["items"]])


def build_session(entries: list[dict], seed: int) -> HumanEvalSession:
    """Create a session from [{"commit_id", "sources": {name: text}}].

    Candidate order is shuffled per item with a seeded generator; the
    source names in display order are recorded as the permutation.
    """
    rng = random.Random(seed)
    session = HumanEvalSession(seed=seed)
    for entry in entries:
        sources = sorted(entry["sources"].items())
        rng.shuffle(sources)
        candidates = [
            {"candidate_id": f"c{pos + 1}", "text": text, "hidden_source": name}
            for pos, (name, text) in enumerate(sources)
        ]
        session.items.append(
            HumanEvalItem(
                commit_id=entry["commit_id"],
                candidates=candidates,
                permutation=[name for name, _text in sources],
            )
        )
    return session


def record_score(
    item: HumanEvalItem, rater: str, candidate_id: str,
    clarity: int, completeness: int, correctness: int,
) -> None:
    """Validate and store one rater's scores for one candidate."""
    values = {"clarity": clarity, "completeness": completeness, "correctness": correctness}
    for dim, value in values.items():
        if not isinstance(value, int) or not MIN_SCORE <= value <= MAX_SCORE:
            raise ValueError(f"{dim} score must be an integer in [1, 5], got {value!r}")
    if candidate_id not in {c["candidate_id"] for c in item.candidates}:
        raise ValueError(f"unknown candidate id {candidate_id!r}")
    item.scores.setdefault(rater, {})[candidate_id] = values


def derandomize(session: HumanEvalSession) -> dict:
    """Mean scores per hidden source per dimension, across raters and items."""
    sums: dict[str, dict[str, float]] = {}
    counts: dict[str, int] = {}
    for item in session.items:
        source_of = {c["candidate_id"]: c["hidden_source"] for c in item.candidates}
        for rater_scores in item.scores.values():
            for candidate_id, dims in rater_scores.items():
                source = source_of[candidate_id]
                bucket = sums.setdefault(source, {d: 0.0 for d in DIMENSIONS})
                for dim in DIMENSIONS:
                    bucket[dim] += dims[dim]
                counts[source] = counts.get(source, 0) + 1
    return {
        source: {dim: bucket[dim] / counts[source] for dim in DIMENSIONS}
        for source, bucket in sums.items()
    }
