"""Corpus building, filter boundaries, dedup, and seeded splitting."""

from __future__ import annotations

import subprocess
from collections import Counter

import pytest

from c3gen.corpus import (
    CommitRecord,
    apply_filters,
    count_changed_lines,
    dedup_decisions,
    deduplicate,
    read_git_history,
    read_jsonl,
    split,
    write_jsonl,
)
from c3gen.errors import CorpusError

from conftest import make_commit_corpus

# frozen from the committed shuffle algorithm on the first 100 fixture records
PINNED_TEST_IDS_SEED7 = [
    "542f3270", "5fe05f28", "69dca53b", "705f74ba", "7113f428",
    "b401d641", "dd64a4ba", "f1cd6e7a", "fa7d2d93", "ffce75ba",
]
PINNED_TEST_IDS_SEED8 = [
    "1835f721", "20901bc3", "34292e1d", "5bd5f650", "79e029c2",
    "818e015f", "97ad6044", "c5246ec2", "e4cf4468", "e9c104f3",
]


def _record(**overrides) -> CommitRecord:
    diff = overrides.pop(
        "diff",
        "--- a/src/x.py\n+++ b/src/x.py\n@@ -1,1 +1,2 @@\n ctx\n+new line\n",
    )
    base = dict(
        git_url="https://example.invalid/org/repo.git",
        repo_full_name="org/repo",
        sha="a" * 40,
        author="dev",
        message="improve parser robustness for odd input",
        diff=diff,
        changed_files=["src/x.py"],
        timestamp="2021-01-01T00:00:00Z",
        loc_changed=count_changed_lines(diff),
    )
    base.update(overrides)
    return CommitRecord(**base)


def _message_of(words: int) -> str:
    return " ".join(f"w{i}" for i in range(words))


# --- filter boundaries --------------------------------------------------------


@pytest.mark.parametrize(
    "words,accepted",
    [(4, False), (5, True), (50, True), (51, False)],
)
def test_message_length_boundaries(words, accepted):
    decision = apply_filters(_record(message=_message_of(words)))
    assert decision.accepted == accepted
    if not accepted:
        assert decision.failed_criteria == ("message_length",)


@pytest.mark.parametrize("changed,accepted", [(300, True), (301, False)])
def test_diff_size_boundaries(changed, accepted):
    body = "".join(f"+line {i}\n" for i in range(changed))
    diff = f"--- a/src/x.py\n+++ b/src/x.py\n@@ -1,0 +1,{changed} @@\n{body}"
    decision = apply_filters(_record(diff=diff))
    assert decision.accepted == accepted
    if not accepted:
        assert decision.failed_criteria == ("diff_size",)


def test_bot_author_and_merge_message_both_reported():
    decision = apply_filters(
        _record(author="dependabot[bot]", message="Merge pull request #12 from branch x")
    )
    assert not decision.accepted
    assert decision.failed_criteria == ("bot_author", "revert_or_merge")


def test_revert_substring_case_insensitive():
    assert not apply_filters(_record(message=_message_of(4) + " ReVerT change here")).accepted
    decision = apply_filters(_record(message="this reverts commit abcdef because broken"))
    assert "revert_or_merge" in decision.failed_criteria


def test_file_type_requires_one_supported_extension():
    bad = apply_filters(_record(changed_files=["README.md", "docs/a.rst"]))
    assert bad.failed_criteria == ("file_type",)
    mixed = apply_filters(_record(changed_files=["README.md", "src/Main.JAVA"]))
    assert mixed.accepted


def test_all_criteria_evaluated_not_short_circuited():
    diff = "--- a/x\n+++ b/x\n" + "".join(f"+l{i}\n" for i in range(301))
    decision = apply_filters(
        _record(
            message="merge it",  # 2 words: fails length AND revert_or_merge
            diff=diff,
            changed_files=["notes.txt"],
            author="robot[bot]",
        )
    )
    assert decision.failed_criteria == (
        "message_length", "diff_size", "file_type", "bot_author", "revert_or_merge",
    )


def test_planted_corpus_exact_accept_count():
    records, planted = make_commit_corpus()
    decisions = [apply_filters(r) for r in records]
    assert sum(d.accepted for d in decisions) == planted["accepted"]
    fails = Counter(c for d in decisions for c in d.failed_criteria)
    for criterion in ("message_length", "diff_size", "file_type", "bot_author",
                      "revert_or_merge"):
        assert fails[criterion] == planted[criterion]
    for decision in decisions:
        assert decision.accepted == (not decision.failed_criteria)


def test_loc_changed_recomputable_from_diff():
    records, _ = make_commit_corpus()
    for record in records[:50]:
        assert count_changed_lines(record.diff) == record.loc_changed


# --- dedup ---------------------------------------------------------------------


def test_identical_message_and_diff_deduplicate():
    a = _record(sha="a" * 40)
    b = _record(sha="b" * 40)  # same message+diff, different sha
    assert deduplicate([a, b]) == [a]


def test_same_message_different_diff_both_kept():
    a = _record(sha="a" * 40)
    b = _record(sha="b" * 40, diff=a.diff + "+extra\n")
    assert deduplicate([a, b]) == [a, b]


def test_normalization_collapses_case_and_whitespace():
    a = _record(sha="a" * 40, message="Fix  The   Bug")
    b = _record(sha="b" * 40, message="fix the bug")
    assert deduplicate([a, b]) == [a]


def test_planted_100_with_7_duplicates_keeps_93():
    records, _ = make_commit_corpus()
    base = records[:93]
    dupes = []
    for k in range(7):
        src = base[k * 13]
        dupes.append(_record(sha=("%040x" % (k + 1)), message=src.message, diff=src.diff))
    mixed = base + dupes
    assert len(mixed) == 100
    kept = deduplicate(mixed)
    assert len(kept) == 93
    assert kept == base  # stable order, first occurrence wins
    decisions = dedup_decisions(mixed)
    assert sum(not d.accepted for d in decisions) == 7
    assert all(d.failed_criteria == ("duplicate",) for d in decisions if not d.accepted)


# --- split ----------------------------------------------------------------------


def test_split_is_deterministic_for_a_seed():
    records, _ = make_commit_corpus()
    first100 = records[:100]
    train1, test1 = split(first100, seed=7, test_size=10)
    train2, test2 = split(first100, seed=7, test_size=10)
    assert [r.sha for r in test1] == [r.sha for r in test2]
    assert sorted(r.sha[:8] for r in test1) == PINNED_TEST_IDS_SEED7


def test_split_partition_is_disjoint_and_exhaustive():
    records, _ = make_commit_corpus()
    first100 = records[:100]
    train, test = split(first100, seed=7, test_size=10)
    assert len(train) == 90 and len(test) == 10
    assert {r.sha for r in train} | {r.sha for r in test} == {r.sha for r in first100}
    assert not ({r.sha for r in train} & {r.sha for r in test})


def test_two_seeds_give_different_test_sets():
    records, _ = make_commit_corpus()
    first100 = records[:100]
    _train7, test7 = split(first100, seed=7, test_size=10)
    _train8, test8 = split(first100, seed=8, test_size=10)
    assert sorted(r.sha[:8] for r in test8) == PINNED_TEST_IDS_SEED8
    assert {r.sha for r in test7} != {r.sha for r in test8}


def test_test_size_zero_puts_everything_in_train():
    records, _ = make_commit_corpus()
    train, test = split(records[:10], seed=1, test_size=0)
    assert len(train) == 10 and test == []


def test_oversized_test_size_is_typed_error():
    records, _ = make_commit_corpus()
    with pytest.raises(CorpusError):
        split(records[:5], seed=1, test_size=6)


# --- JSONL ----------------------------------------------------------------------


def test_jsonl_roundtrip_preserves_fields():
    records, _ = make_commit_corpus()
    sample = records[:20]
    again = read_jsonl(write_jsonl(sample))
    assert [r.to_dict() for r in again] == [r.to_dict() for r in sample]


def test_jsonl_field_names_exact():
    import json

    line = write_jsonl([_record()]).splitlines()[0]
    assert sorted(json.loads(line)) == [
        "author", "changed_files", "diff", "git_url", "loc_changed",
        "message", "repo_full_name", "sha", "timestamp",
    ]


# --- git history -----------------------------------------------------------------


def _git(repo, *args, env_extra=None):
    import os

    env = dict(os.environ)
    env.update(
        GIT_AUTHOR_NAME="Dev One", GIT_AUTHOR_EMAIL="dev@example.invalid",
        GIT_COMMITTER_NAME="Dev One", GIT_COMMITTER_EMAIL="dev@example.invalid",
        GIT_AUTHOR_DATE="2021-06-01T12:00:00 +0000",
        GIT_COMMITTER_DATE="2021-06-01T12:00:00 +0000",
    )
    if env_extra:
        env.update(env_extra)
    subprocess.run(["git", "-C", str(repo), *args], check=True, env=env,
                   capture_output=True)


@pytest.fixture
def scratch_repo(tmp_path):
    repo = tmp_path / "scratch"
    repo.mkdir()
    _git(repo, "init", "-q", "-b", "main")
    for i in range(5):
        (repo / "code.py").write_text(
            "def f():\n" + "".join(f"    x{k} = {k}\n" for k in range(i + 1))
        )
        _git(repo, "add", "code.py")
        date = f"2021-06-0{i + 1}T12:00:00 +0000"
        _git(
            repo, "commit", "-q", "-m", f"change number {i} lands here",
            env_extra={"GIT_AUTHOR_DATE": date, "GIT_COMMITTER_DATE": date},
        )
    return repo


def test_five_commits_yield_five_records_newest_first(scratch_repo):
    records = list(read_git_history(scratch_repo, branch="main"))
    assert len(records) == 5
    assert [r.message for r in records] == [
        f"change number {i} lands here" for i in (4, 3, 2, 1, 0)
    ]
    for record in records:
        assert len(record.sha) == 40
        assert record.changed_files == ["code.py"]
        assert record.timestamp.startswith("2021-06-")
        assert count_changed_lines(record.diff) == record.loc_changed


def test_since_later_than_all_commits_is_empty(scratch_repo):
    assert list(read_git_history(scratch_repo, since="2030-01-01", branch="main")) == []


def test_add_three_remove_one_counts_four(scratch_repo):
    (scratch_repo / "code.py").write_text(
        "def f():\n    x0 = 0\n    y1 = 1\n    y2 = 2\n    y3 = 3\n"
    )
    _git(scratch_repo, "add", "code.py")
    _git(scratch_repo, "commit", "-q", "-m", "swap tail lines around now")
    newest = next(iter(read_git_history(scratch_repo, branch="main")))
    # previous tip had x0..x4; this commit removes 4 and adds 3: loc = 7
    assert newest.loc_changed == count_changed_lines(newest.diff)
    adds = sum(1 for l in newest.diff.split("\n")
               if l.startswith("+") and not l.startswith("+++"))
    dels = sum(1 for l in newest.diff.split("\n")
               if l.startswith("-") and not l.startswith("---"))
    assert newest.loc_changed == adds + dels


def test_merge_commits_are_skipped(scratch_repo):
    _git(scratch_repo, "checkout", "-q", "-b", "side")
    (scratch_repo / "side.py").write_text("y = 1\n")
    _git(scratch_repo, "add", "side.py")
    _git(scratch_repo, "commit", "-q", "-m", "side work happens over here")
    _git(scratch_repo, "checkout", "-q", "main")
    (scratch_repo / "main.py").write_text("z = 1\n")
    _git(scratch_repo, "add", "main.py")
    _git(scratch_repo, "commit", "-q", "-m", "main work happens over here")
    _git(scratch_repo, "merge", "-q", "--no-ff", "side", "-m", "merge side into main")
    records = list(read_git_history(scratch_repo, branch="main"))
    assert all("merge" not in r.message for r in records)
    assert len(records) == 6  # 5 original + 1 main-side commit; merge skipped


def test_missing_branch_is_typed_error(scratch_repo):
    with pytest.raises(CorpusError):
        list(read_git_history(scratch_repo, branch="does-not-exist"))


def test_not_a_repo_is_typed_error(tmp_path):
    with pytest.raises(CorpusError):
        list(read_git_history(tmp_path))
