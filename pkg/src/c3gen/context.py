"""Turn invocation records into code snippets and merge them into the
relevant code context.

A record inside a definition yields that definition's whole body; a record
in global scope yields a window of 25 lines before and after the invocation
(51 lines, clamped at file edges). Overlapping or adjacent spans in one
file merge into a single snippet, and a configurable budget caps the count
and total line volume, dropping lowest-priority snippets first.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from c3gen.definitions import KIND_CLASS, DefinitionIndex, lookup_enclosing_definition
from c3gen.errors import ExtractionError
from c3gen.references import InvocationRecord

log = logging.getLogger(__name__)

WINDOW_RADIUS = 25  # lines before and after a global-scope invocation

REASON_FUNCTION = "enclosing_function"
REASON_CLASS = "enclosing_class"
REASON_WINDOW = "window"

DEFAULT_MAX_SNIPPETS = 10
DEFAULT_MAX_TOTAL_LINES = 1000


@dataclass(frozen=True)
class CodeSnippet:
    file: str
    start_line: int  # 1-based inclusive
    end_line: int
    text: str  # exact source lines, newline-joined
    reason: str
    for_entity: tuple[str, str]  # (name, kind)

    def line_count(self) -> int:
        return self.end_line - self.start_line + 1

    def to_dict(self) -> dict:
        return {
            "file": self.file,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "reason": self.reason,
            "for_entity": {"name": self.for_entity[0], "kind": self.for_entity[1]},
            "text": self.text,
        }


@dataclass(frozen=True)
class RelevantCodeContext:
    snippets: tuple[CodeSnippet, ...]
    total_lines: int
    truncated: bool

    def to_dict(self) -> dict:
        return {
            "snippets": [s.to_dict() for s in self.snippets],
            "total_lines": self.total_lines,
            "truncated": self.truncated,
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def empty_context() -> RelevantCodeContext:
    return RelevantCodeContext(snippets=(), total_lines=0, truncated=False)


def extract_snippet(
    record: InvocationRecord,
    index: DefinitionIndex,
    repo_root: str | Path,
    line_cache: dict[str, list[str]] | None = None,
) -> CodeSnippet:
    """Snippet for one invocation: enclosing definition body, else a window.

    ``line_cache`` (file -> lines) avoids re-reading hot files when many
    records point into the same caller.
    """
    if line_cache is not None and record.caller_file in line_cache:
        source_lines = line_cache[record.caller_file]
    else:
        path = Path(repo_root) / record.caller_file
        try:
            source_lines = path.read_text(encoding="utf-8", errors="replace").splitlines()
        except OSError as exc:
            raise ExtractionError(
                f"cannot read {record.caller_file}: {exc}", record=record
            ) from exc
        if line_cache is not None:
            line_cache[record.caller_file] = source_lines

    if not source_lines:
        raise ExtractionError(
            f"{record.caller_file} is empty; nothing to extract", record=record
        )

    enclosing = lookup_enclosing_definition(index, record.caller_file, record.line)
    if enclosing is not None:
        start, end = enclosing.start_line, enclosing.end_line
        reason = REASON_CLASS if enclosing.kind == KIND_CLASS else REASON_FUNCTION
    else:
        start = max(1, record.line - WINDOW_RADIUS)
        end = min(len(source_lines), record.line + WINDOW_RADIUS)
        reason = REASON_WINDOW
    end = min(end, len(source_lines))
    start = min(start, end)
    text = "\n".join(source_lines[start - 1 : end])
    return CodeSnippet(
        file=record.caller_file,
        start_line=start,
        end_line=end,
        text=text,
        reason=reason,
        for_entity=(record.entity_name, record.entity_kind),
    )


_REASON_RANK = {REASON_FUNCTION: 0, REASON_CLASS: 0, REASON_WINDOW: 1}


def _merge_file_snippets(
    snippets: list[tuple[CodeSnippet, int]]
) -> list[tuple[CodeSnippet, int]]:
    """Merge overlapping/adjacent spans within one file (union semantics).

    Each snippet carries its arrival position; a merged snippet keeps the
    earliest position, the most specific reason (enclosing > window), and
    the earliest arrival's entity.
    """
    snippets = sorted(snippets, key=lambda sp: (sp[0].start_line, sp[0].end_line))
    merged: list[tuple[CodeSnippet, int]] = []
    for snip, pos in snippets:
        if merged and snip.start_line <= merged[-1][0].end_line + 1:
            merged[-1] = _union(merged[-1], (snip, pos))
        else:
            merged.append((snip, pos))
    return merged


def _union(
    a: tuple[CodeSnippet, int], b: tuple[CodeSnippet, int]
) -> tuple[CodeSnippet, int]:
    first, second = (a, b) if a[1] <= b[1] else (b, a)
    start = min(a[0].start_line, b[0].start_line)
    end = max(a[0].end_line, b[0].end_line)
    # stitch text from whichever snippet covers each line; both are verbatim
    lines: dict[int, str] = {}
    for snip, _pos in (a, b):
        for offset, text_line in enumerate(snip.text.split("\n")):
            lines[snip.start_line + offset] = text_line
    text = "\n".join(lines[ln] for ln in range(start, end + 1))
    reason = min(a[0].reason, b[0].reason, key=lambda r: _REASON_RANK[r])
    return (
        CodeSnippet(
            file=first[0].file,
            start_line=start,
            end_line=end,
            text=text,
            reason=reason,
            for_entity=first[0].for_entity,
        ),
        first[1],
    )


def assemble_context(
    snippets: list[CodeSnippet],
    max_snippets: int = DEFAULT_MAX_SNIPPETS,
    max_total_lines: int = DEFAULT_MAX_TOTAL_LINES,
) -> RelevantCodeContext:
    """Merged, ordered union of ``snippets`` under the configured budget.

    Spans in the same file are unioned first, then sorted by
    (file, start_line). When the snippet count or total line volume exceeds
    the caps, snippets are dropped from the tail of a priority order
    (enclosing-definition snippets before windows, diff order within each
    class) and ``truncated`` is set.
    """
    by_file: dict[str, list[tuple[CodeSnippet, int]]] = {}
    for pos, snip in enumerate(snippets):
        by_file.setdefault(snip.file, []).append((snip, pos))
    merged: list[tuple[CodeSnippet, int]] = []
    for file in sorted(by_file):
        merged.extend(_merge_file_snippets(by_file[file]))

    prioritized = sorted(merged, key=lambda sp: (_REASON_RANK[sp[0].reason], sp[1]))
    kept: list[CodeSnippet] = []
    total = 0
    truncated = False
    for snip, _pos in prioritized:
        if len(kept) >= max_snippets or total + snip.line_count() > max_total_lines:
            truncated = True
            continue
        kept.append(snip)
        total += snip.line_count()

    kept.sort(key=lambda s: (s.file, s.start_line))
    return RelevantCodeContext(snippets=tuple(kept), total_lines=total, truncated=truncated)


def extract_context(
    records: list[InvocationRecord],
    index: DefinitionIndex,
    repo_root: str | Path,
    max_snippets: int = DEFAULT_MAX_SNIPPETS,
    max_total_lines: int = DEFAULT_MAX_TOTAL_LINES,
    exclude_entity_bodies: set[tuple[str, str]] | None = None,
) -> RelevantCodeContext:
    """Extract + assemble in one step, skipping unreadable files with a warning.

    ``exclude_entity_bodies`` drops snippets that are exactly a modified
    entity's own definition body (already visible in the diff); by default
    same-file callers are kept as legitimate context.
    """
    snippets: list[CodeSnippet] = []
    line_cache: dict[str, list[str]] = {}
    for record in records:
        try:
            snippet = extract_snippet(record, index, repo_root, line_cache)
        except ExtractionError as exc:
            log.warning("%s", exc)
            continue
        if exclude_entity_bodies and snippet.reason != REASON_WINDOW:
            enclosing = lookup_enclosing_definition(index, record.caller_file, record.line)
            if enclosing is not None and (enclosing.name, enclosing.kind) in exclude_entity_bodies:
                continue
        snippets.append(snippet)
    return assemble_context(snippets, max_snippets, max_total_lines)
