"""Per-language structural parsers behind a single dispatch surface."""

from __future__ import annotations

from c3gen.definitions import DefinitionRecord
from c3gen.parsers.cfamily import find_cfamily_references, parse_cfamily
from c3gen.parsers.python_source import find_python_references, parse_python


def parse_source(text: str, language: str, file: str) -> list[DefinitionRecord]:
    """Definition records for one file. Caller validates the language tag."""
    if language == "python":
        return parse_python(text, file)
    return parse_cfamily(text, language, file)


def find_references(
    text: str,
    language: str,
    file: str,
    file_records: list[DefinitionRecord],
    function_names: set[str],
    class_names: set[str],
    include_self_refs: bool = False,
) -> list[tuple[str, str, int, str]]:
    """Call/instantiation sites of the named entities in one file."""
    if language == "python":
        return find_python_references(
            text, file, file_records, function_names, class_names, include_self_refs
        )
    return find_cfamily_references(
        text, language, file_records, function_names, class_names, include_self_refs
    )
