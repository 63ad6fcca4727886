"""Python structure and reference extraction via the stdlib ``ast`` module.

Using the real grammar means comments, docstrings, and string literals can
never produce spurious definitions or call sites. Lambdas have no name and
are skipped.
"""

from __future__ import annotations

import ast
import logging

from c3gen.definitions import KIND_CLASS, KIND_FUNCTION, DefinitionRecord

log = logging.getLogger(__name__)

_DEF_NODES = (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)


def parse_python(text: str, file: str) -> list[DefinitionRecord]:
    """All class and function definitions in ``text``, document order."""
    try:
        tree = ast.parse(text)
    except (SyntaxError, ValueError) as exc:
        log.warning("failed to parse %s: %s", file or "<source>", exc)
        return []

    records: list[DefinitionRecord] = []

    def visit(node: ast.AST, parent: str | None):
        for child in ast.iter_child_nodes(node):
            if isinstance(child, _DEF_NODES):
                kind = KIND_CLASS if isinstance(child, ast.ClassDef) else KIND_FUNCTION
                records.append(
                    DefinitionRecord(
                        name=child.name,
                        kind=kind,
                        file=file,
                        start_line=child.lineno,
                        end_line=child.end_lineno or child.lineno,
                        parent=parent,
                    )
                )
                visit(child, child.name)
            else:
                visit(child, parent)

    visit(tree, None)
    return records


def find_python_references(
    text: str,
    file: str,
    file_records: list[DefinitionRecord],
    function_names: set[str],
    class_names: set[str],
    include_self_refs: bool = False,
) -> list[tuple[str, str, int, str]]:
    """(name, kind, line, reference_kind) tuples for call sites in ``text``.

    A call whose callee name matches a modified class counts as an
    instantiation (Python classes are instantiated by calling the class
    name); otherwise a match against a modified function is a plain call.
    """
    try:
        tree = ast.parse(text)
    except (SyntaxError, ValueError) as exc:
        log.warning("failed to parse %s: %s", file or "<source>", exc)
        return []

    spans: dict[tuple[str, str], list[tuple[int, int]]] = {}
    for r in file_records:
        spans.setdefault((r.name, r.kind), []).append((r.start_line, r.end_line))

    def is_self_ref(name: str, kind: str, line: int) -> bool:
        return any(s <= line <= e for s, e in spans.get((name, kind), ()))

    out: list[tuple[str, str, int, str]] = []
    for node in ast.walk(tree):
        if not isinstance(node, ast.Call):
            continue
        func = node.func
        if isinstance(func, ast.Name):
            name, line = func.id, func.lineno
        elif isinstance(func, ast.Attribute):
            # the attribute name sits at the end of the func expression
            name, line = func.attr, func.end_lineno or func.lineno
        else:
            continue
        if name in class_names:
            if include_self_refs or not is_self_ref(name, KIND_CLASS, line):
                out.append((name, KIND_CLASS, line, "instantiation"))
        elif name in function_names:
            if include_self_refs or not is_self_ref(name, KIND_FUNCTION, line):
                out.append((name, KIND_FUNCTION, line, "call"))
    return out
