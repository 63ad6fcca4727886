"""Commit corpus building, quality filtering, deduplication, and splitting.

Records come from local git checkouts (no network) or from pre-fetched
JSONL whose schema mirrors ``CommitRecord``. The six quality criteria are
the five tabled filters (message length 5-50 words, at most 300 changed
lines, at least one file in a supported language, no "[bot]" authors, no
merge/revert messages) plus deduplication on (normalized message, diff).
"""

from __future__ import annotations

import json
import logging
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

from c3gen.errors import CorpusError
from c3gen.languages import LanguageConfig, default_config

log = logging.getLogger(__name__)

CRITERIA = (
    "message_length",
    "diff_size",
    "file_type",
    "bot_author",
    "revert_or_merge",
    "duplicate",
)

MIN_MESSAGE_WORDS = 5
MAX_MESSAGE_WORDS = 50
MAX_CHANGED_LINES = 300


@dataclass
class CommitRecord:
    git_url: str
    repo_full_name: str
    sha: str
    author: str
    message: str
    diff: str
    changed_files: list[str] = field(default_factory=list)
    timestamp: str = ""  # ISO-8601 UTC
    loc_changed: int = 0

    def to_dict(self) -> dict:
        return {
            "git_url": self.git_url,
            "repo_full_name": self.repo_full_name,
            "sha": self.sha,
            "author": self.author,
            "message": self.message,
            "diff": self.diff,
            "changed_files": self.changed_files,
            "timestamp": self.timestamp,
            "loc_changed": self.loc_changed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CommitRecord":
        return cls(
            git_url=d.get("git_url", ""),
            repo_full_name=d.get("repo_full_name", ""),
            sha=d["sha"],
            author=d.get("author", ""),
            message=d.get("message", ""),
            diff=d.get("diff", ""),
            changed_files=list(d.get("changed_files", [])),
            timestamp=d.get("timestamp", ""),
            loc_changed=int(d.get("loc_changed", 0)),
        )


@dataclass(frozen=True)
class FilterDecision:
    sha: str
    accepted: bool
    failed_criteria: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "sha": self.sha,
            "accepted": self.accepted,
            "failed_criteria": list(self.failed_criteria),
        }


def count_changed_lines(diff: str) -> int:
    """Added + removed lines of a unified diff (file headers excluded)."""
    count = 0
    for line in diff.split("\n"):
        if line.startswith("+") and not line.startswith("+++"):
            count += 1
        elif line.startswith("-") and not line.startswith("---"):
            count += 1
    return count


# ---------------------------------------------------------------------------
# Reading local git history
# ---------------------------------------------------------------------------

_FIELD_SEP = "\x1f"
_RECORD_SEP = "\x1e"


def _git(repo_path: Path, *args: str) -> str:
    try:
        proc = subprocess.run(
            ["git", "-C", str(repo_path), *args],
            capture_output=True,
            text=True,
            errors="replace",
        )
    except FileNotFoundError as exc:
        raise CorpusError("git executable not found") from exc
    if proc.returncode != 0:
        raise CorpusError(
            f"git {' '.join(args[:2])} failed in {repo_path}: {proc.stderr.strip()}"
        )
    return proc.stdout


def read_git_history(
    repo_path: str | Path,
    since: str = "1970-01-01T00:00:00Z",
    branch: str = "HEAD",
):
    """Yield one ``CommitRecord`` per non-merge commit on ``branch`` since
    ``since``, newest first, with the diff taken against the first parent
    (root commits diff against the empty tree)."""
    repo = Path(repo_path)
    if not (repo / ".git").exists() and not (repo / "HEAD").exists():
        raise CorpusError(f"not a git repository: {repo}")
    if branch != "HEAD":
        probe = subprocess.run(
            ["git", "-C", str(repo), "rev-parse", "--verify", "--quiet", branch],
            capture_output=True,
            text=True,
        )
        if probe.returncode != 0:
            raise CorpusError(f"branch not found: {branch}")

    git_url = ""
    try:
        git_url = _git(repo, "config", "--get", "remote.origin.url").strip()
    except CorpusError:
        pass
    repo_full_name = _repo_full_name(git_url) or repo.resolve().name

    fmt = _FIELD_SEP.join(["%H", "%an", "%aI", "%P", "%B"]) + _RECORD_SEP
    raw = _git(
        repo, "log", "--first-parent", f"--since={since}",
        f"--format={fmt}", branch,
    )
    for chunk in raw.split(_RECORD_SEP):
        chunk = chunk.strip("\n")
        if not chunk.strip():
            continue
        sha, author, timestamp, parents, message = chunk.split(_FIELD_SEP, 4)
        if len(parents.split()) > 1:
            continue  # merge commit
        diff = _git(repo, "diff-tree", "--root", "-p", "--format=", sha)
        changed = [
            line
            for line in _git(
                repo, "diff-tree", "--root", "--name-only", "--format=", sha
            ).splitlines()
            if line.strip()
        ]
        yield CommitRecord(
            git_url=git_url,
            repo_full_name=repo_full_name,
            sha=sha.strip(),
            author=author,
            message=message.rstrip("\n"),
            diff=diff,
            changed_files=changed,
            timestamp=timestamp,
            loc_changed=count_changed_lines(diff),
        )


def _repo_full_name(git_url: str) -> str:
    if not git_url:
        return ""
    tail = git_url.rstrip("/").removesuffix(".git")
    parts = tail.replace(":", "/").split("/")
    return "/".join(parts[-2:]) if len(parts) >= 2 else parts[-1]


# ---------------------------------------------------------------------------
# Filtering
# ---------------------------------------------------------------------------


def apply_filters(
    record: CommitRecord, config: LanguageConfig | None = None
) -> FilterDecision:
    """Evaluate all quality criteria (never short-circuits).

    Word count is whitespace tokens over the full message; the changed-line
    limit is 300 inclusive; the file-type check matches extensions of the
    configured languages case-insensitively; bot and merge/revert checks
    are case-insensitive substring matches.
    """
    config = config or default_config()
    failed: list[str] = []

    words = len(record.message.split())
    if not MIN_MESSAGE_WORDS <= words <= MAX_MESSAGE_WORDS:
        failed.append("message_length")

    if count_changed_lines(record.diff) > MAX_CHANGED_LINES:
        failed.append("diff_size")

    if not any(config.detect(path.lower()) for path in record.changed_files):
        failed.append("file_type")

    if "[bot]" in record.author.lower():
        failed.append("bot_author")

    message_lower = record.message.lower()
    if "merge" in message_lower or "revert" in message_lower:
        failed.append("revert_or_merge")

    return FilterDecision(
        sha=record.sha, accepted=not failed, failed_criteria=tuple(failed)
    )


# ---------------------------------------------------------------------------
# Deduplication and splitting
# ---------------------------------------------------------------------------


def _dedup_key(record: CommitRecord) -> tuple[str, str]:
    normalized = " ".join(record.message.lower().split())
    return normalized, record.diff


def deduplicate(records: list[CommitRecord]) -> list[CommitRecord]:
    """Drop records whose (normalized message, diff) repeats an earlier one."""
    seen: set[tuple[str, str]] = set()
    kept: list[CommitRecord] = []
    for record in records:
        key = _dedup_key(record)
        if key in seen:
            continue
        seen.add(key)
        kept.append(record)
    return kept


def dedup_decisions(records: list[CommitRecord]) -> list[FilterDecision]:
    """Per-record duplicate decisions, aligned with :func:`deduplicate`."""
    seen: set[tuple[str, str]] = set()
    decisions: list[FilterDecision] = []
    for record in records:
        key = _dedup_key(record)
        duplicate = key in seen
        seen.add(key)
        decisions.append(
            FilterDecision(
                sha=record.sha,
                accepted=not duplicate,
                failed_criteria=("duplicate",) if duplicate else (),
            )
        )
    return decisions


def _shuffled(items: list, seed: int) -> list:
    """Fisher-Yates with an explicitly pinned PRNG draw sequence, so the
    permutation for a seed never drifts with stdlib internals."""
    import random

    rng = random.Random(seed)
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.randrange(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def split(
    records: list[CommitRecord], seed: int, test_size: int
) -> tuple[list[CommitRecord], list[CommitRecord]]:
    """Seeded shuffle then partition into (train, test); deterministic per seed."""
    if test_size > len(records):
        raise CorpusError(
            f"test_size {test_size} exceeds corpus size {len(records)}"
        )
    shuffled = _shuffled(records, seed)
    return shuffled[test_size:], shuffled[:test_size]


# ---------------------------------------------------------------------------
# JSONL plumbing
# ---------------------------------------------------------------------------


def write_jsonl(records: list[CommitRecord]) -> str:
    return "".join(
        json.dumps(r.to_dict(), sort_keys=True, ensure_ascii=False) + "\n" for r in records
    )


def read_jsonl(text: str) -> list[CommitRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(CommitRecord.from_dict(json.loads(line)))
        except (ValueError, KeyError) as exc:
            raise CorpusError(f"bad corpus line {lineno}: {exc}") from exc
    return records
