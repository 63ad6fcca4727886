"""Snippet extraction geometry and context assembly."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from c3gen.context import (
    CodeSnippet,
    assemble_context,
    empty_context,
    extract_context,
    extract_snippet,
)
from c3gen.definitions import DefinitionIndex
from c3gen.errors import ExtractionError
from c3gen.indexing import build_definition_index
from c3gen.references import InvocationRecord

from conftest import FIXTURES


def _record(file: str, line: int) -> InvocationRecord:
    return InvocationRecord(
        entity_name="x", entity_kind="function",
        caller_file=file, line=line, reference_kind="call",
    )


@pytest.fixture(scope="module")
def pyrepo_index() -> DefinitionIndex:
    return build_definition_index(FIXTURES / "repos" / "pyrepo")


PYREPO = FIXTURES / "repos" / "pyrepo"


def test_invocation_inside_function_extracts_whole_body(pyrepo_index):
    snippet = extract_snippet(_record("calc.py", 7), pyrepo_index, PYREPO)
    assert (snippet.start_line, snippet.end_line) == (5, 10)
    assert snippet.reason == "enclosing_function"


def test_invocation_in_class_scope_extracts_class_body(pyrepo_index):
    # line 22 is the TABLE assignment: inside Calc but outside any method
    snippet = extract_snippet(_record("calc.py", 22), pyrepo_index, PYREPO)
    assert (snippet.start_line, snippet.end_line) == (1, 30)
    assert snippet.reason == "enclosing_class"


def test_global_invocation_gets_51_line_window(tmp_path):
    lines = [f"line {i}" for i in range(1, 501)]
    (tmp_path / "big.py").write_text("\n".join(lines) + "\n")
    index = build_definition_index(tmp_path)
    snippet = extract_snippet(_record("big.py", 100), index, tmp_path)
    assert (snippet.start_line, snippet.end_line) == (75, 125)
    assert snippet.end_line - snippet.start_line == 50
    assert snippet.reason == "window"


def test_window_clamps_at_both_file_edges(tmp_path):
    (tmp_path / "small.py").write_text("\n".join(f"l{i}" for i in range(1, 31)) + "\n")
    index = build_definition_index(tmp_path)
    snippet = extract_snippet(_record("small.py", 10), index, tmp_path)
    assert (snippet.start_line, snippet.end_line) == (1, 30)


def test_snippet_text_is_verbatim(pyrepo_index):
    source = (PYREPO / "calc.py").read_text().splitlines()
    snippet = extract_snippet(_record("calc.py", 35), pyrepo_index, PYREPO)
    assert snippet.text.split("\n") == source[snippet.start_line - 1 : snippet.end_line]


def test_unreadable_file_raises_with_record(pyrepo_index):
    record = _record("missing.py", 3)
    with pytest.raises(ExtractionError) as excinfo:
        extract_snippet(record, pyrepo_index, PYREPO)
    assert excinfo.value.record == record


def test_randomized_positions_geometry(pyrepo_index):
    """100 random invocation lines per fixture file: enclosing spans exact,
    windows clamped, text always verbatim."""
    rng = random.Random(1234)
    for rel in pyrepo_index.files():
        source = (PYREPO / rel).read_text().splitlines()
        records = pyrepo_index.records(rel)
        for _ in range(100):
            line = rng.randint(1, len(source))
            snippet = extract_snippet(_record(rel, line), pyrepo_index, PYREPO)
            containing = [r for r in records if r.start_line <= line <= r.end_line]
            if containing:
                innermost = min(
                    containing, key=lambda r: (r.end_line - r.start_line, -r.start_line)
                )
                assert (snippet.start_line, snippet.end_line) == (
                    innermost.start_line, innermost.end_line,
                )
            else:
                assert snippet.reason == "window"
                assert snippet.start_line == max(1, line - 25)
                assert snippet.end_line == min(len(source), line + 25)
            assert snippet.text.split("\n") == source[
                snippet.start_line - 1 : snippet.end_line
            ]


# --- assemble_context -------------------------------------------------------


def _snip(file: str, start: int, end: int, reason: str = "window") -> CodeSnippet:
    text = "\n".join(f"{file}:{i}" for i in range(start, end + 1))
    return CodeSnippet(
        file=file, start_line=start, end_line=end, text=text,
        reason=reason, for_entity=("x", "function"),
    )


def test_overlapping_windows_merge_to_union():
    context = assemble_context([_snip("f.py", 10, 60), _snip("f.py", 40, 90)])
    assert len(context.snippets) == 1
    merged = context.snippets[0]
    assert (merged.start_line, merged.end_line) == (10, 90)
    assert merged.text.split("\n") == [f"f.py:{i}" for i in range(10, 91)]
    assert context.total_lines == 81
    assert not context.truncated


def test_adjacent_spans_merge_too():
    context = assemble_context([_snip("f.py", 1, 5), _snip("f.py", 6, 9)])
    assert len(context.snippets) == 1
    assert (context.snippets[0].start_line, context.snippets[0].end_line) == (1, 9)


def test_merge_keeps_most_specific_reason():
    context = assemble_context(
        [_snip("f.py", 10, 20, "window"), _snip("f.py", 15, 25, "enclosing_function")]
    )
    assert context.snippets[0].reason == "enclosing_function"


def test_empty_input_yields_empty_context():
    context = assemble_context([])
    assert context.snippets == () and context.total_lines == 0 and not context.truncated


def test_snippet_cap_drops_windows_before_enclosing():
    snippets = [_snip(f"w{i}.py", 1, 2, "window") for i in range(8)]
    snippets += [_snip(f"e{i}.py", 1, 2, "enclosing_function") for i in range(4)]
    context = assemble_context(snippets, max_snippets=10)
    assert context.truncated
    assert len(context.snippets) == 10
    kept_enclosing = [s for s in context.snippets if s.reason == "enclosing_function"]
    assert len(kept_enclosing) == 4  # all enclosing retained, windows dropped


def test_line_budget_truncates():
    snippets = [_snip(f"f{i}.py", 1, 100) for i in range(5)]
    context = assemble_context(snippets, max_total_lines=250)
    assert context.truncated
    assert context.total_lines <= 250
    assert len(context.snippets) == 2


def test_result_sorted_by_file_then_start():
    context = assemble_context(
        [_snip("b.py", 5, 6), _snip("a.py", 9, 10), _snip("a.py", 1, 2)]
    )
    keys = [(s.file, s.start_line) for s in context.snippets]
    assert keys == sorted(keys)


def test_assemble_is_idempotent():
    snippets = [
        _snip("a.py", 1, 30), _snip("a.py", 20, 40, "enclosing_function"),
        _snip("b.py", 5, 10), _snip("c.py", 1, 80),
    ]
    once = assemble_context(snippets)
    twice = assemble_context(list(once.snippets))
    assert twice == once


def test_serialization_deterministic_and_schema(pyrepo_index):
    records = [_record("calc.py", 35), _record("main.py", 8)]
    first = extract_context(records, pyrepo_index, PYREPO).serialize()
    second = extract_context(list(records), pyrepo_index, PYREPO).serialize()
    assert first == second
    import json

    doc = json.loads(first)
    assert set(doc) == {"snippets", "total_lines", "truncated"}
    assert set(doc["snippets"][0]) == {
        "file", "start_line", "end_line", "reason", "for_entity", "text",
    }


def test_extract_context_skips_unreadable_with_warning(pyrepo_index, caplog):
    records = [_record("calc.py", 35), _record("ghost.py", 3)]
    context = extract_context(records, pyrepo_index, PYREPO)
    assert len(context.snippets) == 1


def test_empty_context_helper():
    assert empty_context().to_dict() == {"snippets": [], "total_lines": 0, "truncated": False}


@st.composite
def snippet_lists(draw):
    count = draw(st.integers(min_value=0, max_value=12))
    out = []
    for _ in range(count):
        file = draw(st.sampled_from(["a.py", "b.py", "c.py"]))
        start = draw(st.integers(min_value=1, max_value=150))
        end = start + draw(st.integers(min_value=0, max_value=40))
        reason = draw(st.sampled_from(["window", "enclosing_function", "enclosing_class"]))
        out.append(_snip(file, start, end, reason))
    return out


@given(snippet_lists())
def test_assemble_spans_disjoint_sorted_for_arbitrary_inputs(snippets):
    context = assemble_context(snippets)
    keys = [(s.file, s.start_line) for s in context.snippets]
    assert keys == sorted(keys)
    per_file = {}
    for s in context.snippets:
        per_file.setdefault(s.file, []).append((s.start_line, s.end_line))
    for spans in per_file.values():
        for (s1, e1), (s2, _e2) in zip(spans, spans[1:]):
            assert e1 < s2
    assert context.total_lines == sum(s.line_count() for s in context.snippets)


@given(snippet_lists())
def test_assemble_idempotent_for_arbitrary_inputs(snippets):
    once = assemble_context(snippets)
    twice = assemble_context(list(once.snippets))
    assert twice.snippets == once.snippets
    assert twice.total_lines == once.total_lines


def test_every_record_covered_or_truncated(pyrepo_index):
    records = [_record("calc.py", 35), _record("calc.py", 7), _record("main.py", 8),
               _record("report.py", 13), _record("main.py", 13)]
    context = extract_context(records, pyrepo_index, PYREPO)
    covered = {
        (s.file, line)
        for s in context.snippets
        for line in range(s.start_line, s.end_line + 1)
    }
    for record in records:
        assert context.truncated or (record.caller_file, record.line) in covered


def test_exclude_entity_bodies_drops_own_definition_snippet(pyrepo_index):
    records = [_record("calc.py", 7)]  # inside add's own body
    kept = extract_context(records, pyrepo_index, PYREPO)
    assert len(kept.snippets) == 1
    dropped = extract_context(
        records, pyrepo_index, PYREPO,
        exclude_entity_bodies={("add", "function")},
    )
    assert dropped.snippets == ()
