from __future__ import annotations

import hashlib
import json
import shutil
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

REPO_NAMES = ("pyrepo", "javarepo", "jsrepo", "cpprepo")


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def definitions_manifest() -> dict:
    return json.loads((FIXTURES / "manifests" / "definitions.json").read_text())


@pytest.fixture(scope="session")
def retrieval_manifest() -> dict:
    return json.loads((FIXTURES / "manifests" / "retrieval.json").read_text())


@pytest.fixture
def repo_copy(tmp_path):
    """Copy a fixture repo into tmp so tests can write caches beside it."""

    def _copy(name: str) -> Path:
        target = tmp_path / name
        shutil.copytree(FIXTURES / "repos" / name, target)
        return target

    return _copy


def make_commit_corpus(count: int = 1000) -> tuple[list, dict]:
    """Deterministic corpus with a planted accept/reject composition.

    700 records pass every filter; 60 fail each single criterion
    (message_length, diff_size, file_type, bot_author, revert_or_merge).
    Returns (records, planted_counts).
    """
    from c3gen.corpus import CommitRecord

    assert count == 1000, "composition below is planted for exactly 1000"
    planted = {
        "accepted": 700,
        "message_length": 60,
        "diff_size": 60,
        "file_type": 60,
        "bot_author": 60,
        "revert_or_merge": 60,
    }

    def sha_of(i: int) -> str:
        return hashlib.sha1(f"commit-{i}".encode()).hexdigest()

    def small_diff(i: int, added: int = 2) -> str:
        lines = [
            f"diff --git a/src/mod_{i}.py b/src/mod_{i}.py",
            f"--- a/src/mod_{i}.py",
            f"+++ b/src/mod_{i}.py",
            f"@@ -1,1 +1,{added + 1} @@",
            " context line",
        ] + [f"+added line {k}" for k in range(added)]
        return "\n".join(lines) + "\n"

    def big_diff(i: int) -> str:
        # 301 changed lines: over the 300 limit by exactly one
        lines = [
            f"diff --git a/src/mod_{i}.py b/src/mod_{i}.py",
            f"--- a/src/mod_{i}.py",
            f"+++ b/src/mod_{i}.py",
            f"@@ -1,1 +1,302 @@",
            " context line",
        ] + [f"+bulk line {k}" for k in range(301)]
        return "\n".join(lines) + "\n"

    records = []
    i = 0

    def base(i: int, **overrides) -> CommitRecord:
        diff = overrides.pop("diff", small_diff(i))
        record = CommitRecord(
            git_url="https://example.invalid/org/repo.git",
            repo_full_name="org/repo",
            sha=sha_of(i),
            author=overrides.pop("author", f"dev{i}"),
            message=overrides.pop("message", f"improve parser robustness for case {i}"),
            diff=diff,
            changed_files=overrides.pop("changed_files", [f"src/mod_{i}.py"]),
            timestamp="2021-06-01T00:00:00Z",
            loc_changed=sum(
                1
                for line in diff.split("\n")
                if (line.startswith("+") and not line.startswith("+++"))
                or (line.startswith("-") and not line.startswith("---"))
            ),
        )
        assert not overrides
        return record

    for _ in range(planted["accepted"]):
        records.append(base(i))
        i += 1
    for _ in range(planted["message_length"]):
        records.append(base(i, message=f"short note case {i % 7}"))  # 4 words
        i += 1
    for _ in range(planted["diff_size"]):
        records.append(base(i, diff=big_diff(i)))
        i += 1
    for _ in range(planted["file_type"]):
        records.append(base(i, changed_files=[f"docs/notes_{i}.md"]))
        i += 1
    for _ in range(planted["bot_author"]):
        records.append(base(i, author="dependabot[bot]"))
        i += 1
    for _ in range(planted["revert_or_merge"]):
        records.append(base(i, message=f"Merge branch feature into main {i}"))
        i += 1

    return records, planted
