"""Definition records and the per-repo definition index.

A ``DefinitionRecord`` is one class or function definition: its name, kind,
file, 1-based inclusive line span, and the name of the enclosing definition
when nested. The ``DefinitionIndex`` maps repo-relative paths to the ordered
record lists and is the lookup substrate for every later stage.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from c3gen.errors import UnsupportedLanguageError
from c3gen import languages as lang

log = logging.getLogger(__name__)

KIND_FUNCTION = "function"
KIND_CLASS = "class"


@dataclass(frozen=True)
class DefinitionRecord:
    """One class or function definition inside a single file."""

    name: str
    kind: str  # "function" | "class"
    file: str  # repo-relative path, "/" separators
    start_line: int  # 1-based inclusive
    end_line: int  # 1-based inclusive
    parent: str | None = None  # enclosing definition's name, None at top level

    def contains(self, line: int) -> bool:
        return self.start_line <= line <= self.end_line

    def span(self) -> int:
        return self.end_line - self.start_line

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "parent": self.parent,
        }

    @classmethod
    def from_dict(cls, d: dict, file: str) -> "DefinitionRecord":
        return cls(
            name=d["name"],
            kind=d["kind"],
            file=file,
            start_line=d["start_line"],
            end_line=d["end_line"],
            parent=d.get("parent"),
        )


@dataclass
class DefinitionIndex:
    """Per-file definition records for one repository tree.

    ``entries`` maps repo-relative path to the document-ordered record list;
    ``language`` carries the detected tag for each indexed file.
    """

    entries: dict[str, list[DefinitionRecord]] = field(default_factory=dict)
    language: dict[str, str] = field(default_factory=dict)

    def files(self) -> list[str]:
        return sorted(self.entries)

    def records(self, file: str) -> list[DefinitionRecord]:
        return self.entries.get(file, [])

    def add_file(self, file: str, tag: str, records: list[DefinitionRecord]) -> None:
        self.entries[file] = list(records)
        self.language[file] = tag

    def all_records(self):
        for path in self.files():
            yield from self.entries[path]

    def file_to_dict(self, file: str) -> dict:
        """The bit-exact per-file JSON document for ``file``."""
        return {
            "file": file,
            "language": self.language[file],
            "entities": [r.to_dict() for r in self.entries[file]],
        }

    def serialize_file(self, file: str) -> str:
        """Serialize one file's records: sorted keys, UTF-8, trailing newline."""
        return json.dumps(
            self.file_to_dict(file), sort_keys=True, ensure_ascii=False, indent=2
        ) + "\n"

    @classmethod
    def file_from_dict(cls, d: dict) -> tuple[str, str, list[DefinitionRecord]]:
        file = d["file"]
        records = [DefinitionRecord.from_dict(e, file) for e in d["entities"]]
        return file, d["language"], records


def parse_definitions(source_text: str, language: str) -> list[DefinitionRecord]:
    """Parse ``source_text`` into definition records, in document order.

    Nested definitions carry a ``parent`` link to the innermost enclosing
    definition. Anonymous functions and lambdas are ignored. A file that
    fails to parse yields an empty list with a logged warning; only an
    unsupported language tag raises.
    """
    if language not in lang.PARSEABLE:
        raise UnsupportedLanguageError(f"unsupported language tag: {language!r}")
    # Imported here so the fast JSON/metrics paths never pay the parser import.
    from c3gen.parsers import parse_source

    return parse_source(source_text, language, file="")


def parse_definitions_for_file(
    source_text: str, language: str, file: str
) -> list[DefinitionRecord]:
    """Like :func:`parse_definitions` but stamps ``file`` into each record."""
    if language not in lang.PARSEABLE:
        raise UnsupportedLanguageError(f"unsupported language tag: {language!r}")
    from c3gen.parsers import parse_source

    return parse_source(source_text, language, file=file)


def lookup_enclosing_definition(
    index: DefinitionIndex, file: str, line: int
) -> DefinitionRecord | None:
    """Innermost definition in ``file`` whose span contains ``line``.

    Returns None when the line lies in global scope or the file is not
    indexed (absent files are treated as all-global).
    """
    innermost: DefinitionRecord | None = None
    for record in index.records(file):
        if not record.contains(line):
            continue
        if innermost is None or record.span() < innermost.span() or (
            record.span() == innermost.span()
            and record.start_line > innermost.start_line
        ):
            innermost = record
    return innermost


def innermost_enclosing(
    records: list[DefinitionRecord], line: int
) -> DefinitionRecord | None:
    """Innermost record containing ``line`` from an in-memory record list."""
    best: DefinitionRecord | None = None
    for record in records:
        if not record.contains(line):
            continue
        if best is None or record.span() < best.span() or (
            record.span() == best.span() and record.start_line > best.start_line
        ):
            best = record
    return best
