"""Unified diff parsing and modified-entity extraction.

Accepts the output of ``git diff`` / ``git show`` (multiple files, renames,
mode changes, binary markers). Each changed file becomes one
``DiffSegment``; each segment's hunks carry their marker-tagged lines so
changed line ranges can be replayed on either side of the change.

The modified entities of a diff are the innermost definitions enclosing
each added line (post-change tree) and each removed line (pre-change tree
when available, else a per-language textual fallback for deleted
definitions), deduplicated on (name, kind) in diff order.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from c3gen.definitions import (
    KIND_CLASS,
    KIND_FUNCTION,
    DefinitionIndex,
    innermost_enclosing,
)
from c3gen.errors import DiffParseError

log = logging.getLogger(__name__)

CONTEXT = "context"
ADDED = "added"
REMOVED = "removed"

_HUNK_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


@dataclass(frozen=True)
class Hunk:
    old_start: int
    old_len: int
    new_start: int
    new_len: int
    lines: tuple[tuple[str, str], ...]  # (marker, text-without-marker)


@dataclass(frozen=True)
class DiffSegment:
    old_path: str | None  # None for added files
    new_path: str | None  # None for deleted files
    hunks: tuple[Hunk, ...] = ()
    is_binary: bool = False

    def path(self) -> str:
        """The segment's best display path (new side, else old side)."""
        return self.new_path or self.old_path or ""


@dataclass
class ModifiedEntity:
    name: str
    kind: str  # "function" | "class"
    origin_files: set[str] = field(default_factory=set)

    def key(self) -> tuple[str, str]:
        return (self.name, self.kind)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "origin_files": sorted(self.origin_files),
        }


def _strip_git_prefix(path: str) -> str | None:
    if path == "/dev/null":
        return None
    if path.startswith('"') and path.endswith('"') and len(path) >= 2:
        path = path[1:-1]
    if path.startswith(("a/", "b/")):
        path = path[2:]
    return path


def parse_unified_diff(text: str) -> list[DiffSegment]:
    """Parse a git unified diff into one segment per changed file.

    Raises :class:`DiffParseError` (with the byte offset of the offending
    line) for malformed hunk headers or hunks whose line counts disagree
    with the header.
    """
    if not text.strip():
        return []

    lines = text.split("\n")
    # byte offset of each line start, for error reporting
    offsets = [0]
    for line in lines[:-1]:
        offsets.append(offsets[-1] + len(line.encode("utf-8")) + 1)

    segments: list[DiffSegment] = []
    i = 0
    n = len(lines)

    def flush(seg: dict | None):
        if seg is None:
            return
        segments.append(
            DiffSegment(
                old_path=seg["old"],
                new_path=seg["new"],
                hunks=tuple(seg["hunks"]),
                is_binary=seg["binary"],
            )
        )

    current: dict | None = None
    while i < n:
        line = lines[i]
        if line.startswith("diff --git "):
            flush(current)
            current = {"old": None, "new": None, "hunks": [], "binary": False,
                       "seen_headers": False}
            # paths from the diff line itself; --- / +++ lines refine them
            m = re.match(r'^diff --git (?:"?a/)?(.*?)"? (?:"?b/)?(.*?)"?$', line)
            if m:
                current["old"], current["new"] = m.group(1), m.group(2)
            i += 1
            continue
        if line.startswith("--- ") and (current is None or not current["hunks"]):
            if current is None:
                current = {"old": None, "new": None, "hunks": [], "binary": False,
                           "seen_headers": False}
            current["old"] = _strip_git_prefix(line[4:].split("\t")[0])
            current["seen_headers"] = True
            i += 1
            continue
        if line.startswith("+++ ") and current is not None and not current["hunks"]:
            current["new"] = _strip_git_prefix(line[4:].split("\t")[0])
            current["seen_headers"] = True
            i += 1
            continue
        if line.startswith("rename from ") and current is not None:
            current["old"] = line[len("rename from "):]
            i += 1
            continue
        if line.startswith("rename to ") and current is not None:
            current["new"] = line[len("rename to "):]
            i += 1
            continue
        if line.startswith("Binary files ") or line == "GIT binary patch":
            if current is not None:
                current["binary"] = True
            i += 1
            continue
        if line.startswith("@@"):
            if current is None:
                raise DiffParseError("hunk header before any file header", offsets[i])
            m = _HUNK_RE.match(line)
            if m is None:
                raise DiffParseError(f"malformed hunk header: {line!r}", offsets[i])
            old_start = int(m.group(1))
            old_len = int(m.group(2)) if m.group(2) is not None else 1
            new_start = int(m.group(3))
            new_len = int(m.group(4)) if m.group(4) is not None else 1
            header_offset = offsets[i]
            i += 1
            body: list[tuple[str, str]] = []
            seen_old = seen_new = 0
            while i < n and (seen_old < old_len or seen_new < new_len):
                body_line = lines[i]
                if body_line.startswith("\\"):  # "\ No newline at end of file"
                    i += 1
                    continue
                if body_line.startswith("+"):
                    body.append((ADDED, body_line[1:]))
                    seen_new += 1
                elif body_line.startswith("-"):
                    body.append((REMOVED, body_line[1:]))
                    seen_old += 1
                elif body_line.startswith(" ") or body_line == "":
                    body.append((CONTEXT, body_line[1:]))
                    seen_old += 1
                    seen_new += 1
                else:
                    break
                i += 1
            if seen_old != old_len or seen_new != new_len:
                raise DiffParseError(
                    f"hunk line counts disagree with header (-{old_len} +{new_len}, "
                    f"got -{seen_old} +{seen_new})",
                    header_offset,
                )
            current["hunks"].append(Hunk(old_start, old_len, new_start, new_len, tuple(body)))
            continue
        i += 1

    flush(current)
    return segments


def changed_line_ranges(segment: DiffSegment, side: str) -> list[tuple[int, int]]:
    """Sorted disjoint (start, end) ranges of added (side="new") or removed
    (side="old") lines, in that side's file coordinates."""
    if side not in ("old", "new"):
        raise ValueError(f"side must be 'old' or 'new', got {side!r}")
    changed: list[int] = []
    for hunk in segment.hunks:
        old_ln = hunk.old_start
        new_ln = hunk.new_start
        for marker, _text in hunk.lines:
            if marker == CONTEXT:
                old_ln += 1
                new_ln += 1
            elif marker == REMOVED:
                if side == "old":
                    changed.append(old_ln)
                old_ln += 1
            else:  # ADDED
                if side == "new":
                    changed.append(new_ln)
                new_ln += 1
    return _collapse(changed)


def _collapse(sorted_lines: list[int]) -> list[tuple[int, int]]:
    ranges: list[tuple[int, int]] = []
    for ln in sorted_lines:
        if ranges and ln == ranges[-1][1] + 1:
            ranges[-1] = (ranges[-1][0], ln)
        elif ranges and ln <= ranges[-1][1]:
            continue
        else:
            ranges.append((ln, ln))
    return ranges


# Textual fallback patterns for definitions deleted outright, used when no
# pre-change index is available. Keyed by language tag.
_FALLBACK_PATTERNS: dict[str, list[tuple[re.Pattern, str]]] = {
    "python": [
        (re.compile(r"^\s*(?:async\s+)?def\s+([A-Za-z_]\w*)\s*\("), KIND_FUNCTION),
        (re.compile(r"^\s*class\s+([A-Za-z_]\w*)\s*[(:]"), KIND_CLASS),
    ],
    "java": [
        (re.compile(r"^\s*(?:(?:public|private|protected|static|final|abstract|synchronized|native)\s+)*"
                    r"(?:class|interface|enum)\s+([A-Za-z_$][\w$]*)"), KIND_CLASS),
        (re.compile(r"^\s*(?:(?:public|private|protected|static|final|abstract|synchronized|native)\s+)+"
                    r"[\w$<>\[\],.\s]+?\s([A-Za-z_$][\w$]*)\s*\([^;]*$"), KIND_FUNCTION),
    ],
    "javascript": [
        (re.compile(r"^\s*(?:export\s+)?(?:default\s+)?class\s+([A-Za-z_$][\w$]*)"), KIND_CLASS),
        (re.compile(r"^\s*(?:export\s+)?(?:default\s+)?(?:async\s+)?function\s*\*?\s*([A-Za-z_$][\w$]*)\s*\("), KIND_FUNCTION),
        (re.compile(r"^\s*(?:export\s+)?(?:const|let|var)\s+([A-Za-z_$][\w$]*)\s*=\s*(?:async\s*)?(?:\([^)]*\)|[A-Za-z_$][\w$]*)\s*=>"), KIND_FUNCTION),
    ],
    "cpp": [
        (re.compile(r"^\s*(?:class|struct)\s+([A-Za-z_]\w*)\s*[:{]"), KIND_CLASS),
        (re.compile(r"^[\w:<>~&*\s]+?[\s:*&]([A-Za-z_]\w*)\s*\([^;]*\)\s*(?:const\s*)?\{?\s*$"), KIND_FUNCTION),
    ],
}


# control-flow words the loose C-family patterns could mistake for names
_FALLBACK_STOPWORDS = frozenset(
    "if for while switch catch return new else do sizeof delete try throw".split()
)


def _fallback_entities(removed_lines: list[str], language: str | None):
    """Definition names recovered textually from removed hunk lines."""
    if language is None:
        return
    for pattern, kind in _FALLBACK_PATTERNS.get(language, ()):
        for line in removed_lines:
            m = pattern.match(line)
            if m and m.group(1) not in _FALLBACK_STOPWORDS:
                yield m.group(1), kind


def extract_modified_entities(
    segments: list[DiffSegment],
    index_new: DefinitionIndex,
    index_old: DefinitionIndex | None = None,
    attribute: str = "innermost",
) -> list[ModifiedEntity]:
    """Deduplicated (name, kind) entities touched by ``segments``.

    Added lines resolve against ``index_new``; removed lines against
    ``index_old`` when given, otherwise a textual scan of the removed lines
    recovers outright-deleted definitions. Changes in global scope produce
    nothing. ``attribute="all-enclosing"`` widens attribution from only the
    innermost definition to its whole enclosing chain.
    """
    if attribute not in ("innermost", "all-enclosing"):
        raise ValueError(f"unknown attribution mode: {attribute!r}")

    order: list[ModifiedEntity] = []
    by_key: dict[tuple[str, str], ModifiedEntity] = {}

    def note(name: str, kind: str, origin: str):
        key = (name, kind)
        entity = by_key.get(key)
        if entity is None:
            entity = ModifiedEntity(name=name, kind=kind)
            by_key[key] = entity
            order.append(entity)
        entity.origin_files.add(origin)

    def note_enclosing(records, line: int, origin: str):
        hit = innermost_enclosing(records, line)
        if hit is None:
            return
        note(hit.name, hit.kind, origin)
        if attribute == "all-enclosing":
            current = hit
            while current.parent is not None:
                parent = next(
                    (r for r in records
                     if r.name == current.parent
                     and r.start_line <= current.start_line
                     and current.end_line <= r.end_line),
                    None,
                )
                if parent is None:
                    break
                note(parent.name, parent.kind, origin)
                current = parent

    for segment in segments:
        if segment.is_binary:
            continue
        new_path, old_path = segment.new_path, segment.old_path
        new_records = index_new.records(new_path) if new_path else []
        old_records = index_old.records(old_path) if (index_old and old_path) else []
        new_known = bool(new_path) and new_path in index_new.entries
        old_known = bool(index_old) and bool(old_path) and old_path in index_old.entries

        touched_anything = False
        for hunk in segment.hunks:
            old_ln = hunk.old_start
            new_ln = hunk.new_start
            removed_texts: list[str] = []
            for marker, text in hunk.lines:
                if marker == CONTEXT:
                    old_ln += 1
                    new_ln += 1
                elif marker == ADDED:
                    if new_known:
                        note_enclosing(new_records, new_ln, new_path)
                        touched_anything = True
                    new_ln += 1
                else:  # REMOVED
                    if old_known:
                        note_enclosing(old_records, old_ln, old_path)
                        touched_anything = True
                    else:
                        removed_texts.append(text)
                    old_ln += 1
            if removed_texts and not old_known:
                language = index_new.language.get(new_path or "") if new_path else None
                if language is None and old_path:
                    from c3gen.languages import default_config

                    language = default_config().detect(old_path)
                for name, kind in _fallback_entities(removed_texts, language):
                    note(name, kind, old_path or new_path or "")
                    touched_anything = True

        if segment.hunks and not touched_anything and not new_known and not old_known:
            log.warning(
                "changed file %s not present in any index; no entities attributed",
                segment.path(),
            )

    return order
