"""Structure scanning for brace-delimited languages (Java, JavaScript, C++).

The scanner walks the token stream once, tracking a frame stack of open
braces. Definition heads (class-like declarations, function/method
signatures) are recognized by local token patterns; their bodies become
named frames so nesting and line spans fall out of brace matching. The
scan also records the positions of declaration name tokens, including
bodyless declarations such as prototypes and abstract methods, so the
reference scanner can tell a definition's own ``name(`` apart from a call.

This is deliberately not a full parser: it only needs to be right about
where class and function definitions start and end, and to stay in sync
across strings, comments, generics, lambdas, and preprocessor noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from c3gen.definitions import KIND_CLASS, KIND_FUNCTION, DefinitionRecord
from c3gen.parsers.lexer import IDENT, KEYWORD, STRING, Token, tokenize

# Frame contexts.
FILE = "file"
CLASS_BODY = "class_body"
ENUM_BODY = "enum_body"
CODE = "code"

_JAVA_BAD_PRECEDER_KW = frozenset(
    "new return if while for switch catch throw else do instanceof case assert".split()
)
_CPP_BAD_PRECEDER_KW = frozenset(
    """new return if while for switch catch throw delete case goto else do sizeof
    alignof typeid decltype co_await co_return co_yield using operator
    static_assert requires noexcept template typedef""".split()
)
_CPP_QUALIFIERS = frozenset(
    "const noexcept override final mutable volatile throw requires try".split()
)


@dataclass
class _Builder:
    name: str
    kind: str
    start_line: int
    end_line: int
    parent: str | None
    name_pos: tuple[int, int]


@dataclass
class _Frame:
    context: str
    builder: _Builder | None = None
    stmt_start: int = 0
    seen_semi: bool = False


@dataclass
class StructureScan:
    """Definition records plus every declaration-name token position."""

    records: list[DefinitionRecord] = field(default_factory=list)
    decl_positions: set[tuple[int, int]] = field(default_factory=set)


@dataclass(frozen=True)
class _Head:
    name: str | None  # None for anonymous scopes (namespace, enum)
    kind: str | None
    name_tok: int | None
    body_open: int  # token index of the opening '{'
    context: str  # context of the body frame
    start_tok: int  # first token of the declaration


@dataclass(frozen=True)
class _Bodyless:
    name_tok: int
    resume: int  # token index to continue from


def _tok(tokens: list[Token], i: int) -> Token | None:
    return tokens[i] if 0 <= i < len(tokens) else None


def _skip_parens(tokens: list[Token], i: int) -> int | None:
    """Index just past the ')' matching the '(' at ``i``, or None."""
    depth = 0
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if t.is_punct("("):
            depth += 1
        elif t.is_punct(")"):
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return None


def _skip_braces(tokens: list[Token], i: int) -> int | None:
    depth = 0
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if t.is_punct("{"):
            depth += 1
        elif t.is_punct("}"):
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return None


def _skip_angles(tokens: list[Token], i: int) -> int | None:
    """Index past the '>' matching '<' at ``i``; None if it doesn't look like
    a generic/template argument list (hits ; { } or EOF first)."""
    depth = 0
    n = len(tokens)
    while i < n:
        t = tokens[i]
        if t.is_punct("<"):
            depth += 1
        elif t.is_punct(">"):
            depth -= 1
            if depth == 0:
                return i + 1
        elif t.is_punct(";") or t.is_punct("{") or t.is_punct("}"):
            return None
        i += 1
    return None


# ---------------------------------------------------------------------------
# Head matchers
# ---------------------------------------------------------------------------


def _class_like_head(tokens: list[Token], i: int, language: str) -> _Head | None:
    """Class/interface/enum/record/struct/namespace heads, per language."""
    t = tokens[i]
    n = len(tokens)

    if language == "cpp":
        if t.is_kw("namespace"):
            j = i + 1
            while j < n and not (tokens[j].is_punct("{") or tokens[j].is_punct(";")):
                j += 1
            if j < n and tokens[j].is_punct("{"):
                return _Head(None, None, None, j, FILE, i)
            return None
        if t.is_kw("enum"):
            j = i + 1
            if j < n and (tokens[j].is_kw("class") or tokens[j].is_kw("struct")):
                j += 1
            while j < n and not (tokens[j].is_punct("{") or tokens[j].is_punct(";")):
                j += 1
            if j < n and tokens[j].is_punct("{"):
                return _Head(None, None, None, j, CODE, i)
            return None
        if t.is_kw("class") or t.is_kw("struct"):
            name = _tok(tokens, i + 1)
            if name is None or name.kind != IDENT:
                return None
            j = i + 2
            while j < n:
                tj = tokens[j]
                if tj.is_punct("{"):
                    return _Head(name.text, KIND_CLASS, i + 1, j, CLASS_BODY, i)
                if tj.is_punct(";") or tj.is_punct("=") or tj.is_punct("("):
                    return None
                j += 1
            return None
        return None

    if language == "java":
        is_record = t.kind == IDENT and t.text == "record"
        named = t.kind == KEYWORD and t.text in ("class", "interface", "enum")
        if not (named or is_record):
            return None
        name = _tok(tokens, i + 1)
        if name is None or name.kind != IDENT:
            return None
        if is_record:
            after = _tok(tokens, i + 2)
            if after is None or not after.is_punct("("):
                return None
        body_ctx = ENUM_BODY if t.text == "enum" else CLASS_BODY
        j = i + 2
        while j < n:
            tj = tokens[j]
            if tj.is_punct("{"):
                return _Head(name.text, KIND_CLASS, i + 1, j, body_ctx, i)
            if tj.is_punct(";"):
                return None
            if tj.is_punct("("):
                nj = _skip_parens(tokens, j)
                if nj is None:
                    return None
                j = nj
                continue
            j += 1
        return None

    # javascript
    if t.is_kw("class"):
        name = _tok(tokens, i + 1)
        if name is None or name.kind != IDENT:
            return None
        j = i + 2
        while j < n:
            tj = tokens[j]
            if tj.is_punct("{"):
                return _Head(name.text, KIND_CLASS, i + 1, j, CLASS_BODY, _js_decl_start(tokens, i))
            if tj.is_punct(";"):
                return None
            if tj.is_punct("("):
                nj = _skip_parens(tokens, j)
                if nj is None:
                    return None
                j = nj
                continue
            j += 1
        return None
    return None


def _java_function_head(tokens, i, stmt_start):
    t = tokens[i]
    n = len(tokens)
    if t.kind != IDENT:
        return None
    nxt = _tok(tokens, i + 1)
    if nxt is None or not nxt.is_punct("("):
        return None
    if i > stmt_start:
        prev = tokens[i - 1]
        ok = (
            prev.kind == IDENT
            or (prev.kind == KEYWORD and prev.text not in _JAVA_BAD_PRECEDER_KW)
            or prev.is_punct(">")
            or prev.is_punct("]")
        )
        if not ok:
            return None
    j = _skip_parens(tokens, i + 1)
    if j is None:
        return None
    k = j
    while k < n and (
        tokens[k].is_kw("throws")
        or tokens[k].kind == IDENT
        or tokens[k].is_punct(",")
        or tokens[k].is_punct(".")
    ):
        k += 1
    if k < n and tokens[k].is_punct("{"):
        return _Head(t.text, KIND_FUNCTION, i, k, CODE, stmt_start)
    if k < n and (tokens[k].is_punct(";") or tokens[k].is_kw("default")):
        while k < n and not tokens[k].is_punct(";"):
            k += 1
        return _Bodyless(i, k + 1)
    return None


def _js_function_decl_head(tokens, i, stmt_start):
    t = tokens[i]
    if not t.is_kw("function"):
        return None
    k = i + 1
    tk = _tok(tokens, k)
    if tk is not None and tk.is_punct("*"):
        k += 1
        tk = _tok(tokens, k)
    if tk is None or tk.kind != IDENT:
        return None
    name_tok = k
    paren = _tok(tokens, k + 1)
    if paren is None or not paren.is_punct("("):
        return None
    j = _skip_parens(tokens, k + 1)
    if j is None:
        return None
    body = _tok(tokens, j)
    if body is not None and body.is_punct("{"):
        start = _js_decl_start(tokens, i)
        return _Head(tokens[name_tok].text, KIND_FUNCTION, name_tok, j, CODE, start)
    return None


def _js_decl_start(tokens, i):
    """Back over the modifiers that belong to a JS declaration head."""
    j = i
    while j > 0:
        prev = tokens[j - 1]
        if (
            (prev.kind == IDENT and prev.text in ("async", "static", "get", "set"))
            or prev.is_punct("*")
            or prev.is_kw("export")
            or prev.is_kw("default")
            or prev.is_kw("const")
            or prev.is_kw("let")
            or prev.is_kw("var")
        ):
            j -= 1
            continue
        break
    return j


def _js_assigned_head(tokens, i, stmt_start, context):
    """``const name = (...) => { }`` and ``name = function ... { }`` forms."""
    t = tokens[i]
    if t.kind != IDENT:
        return None
    eq = _tok(tokens, i + 1)
    if eq is None or not eq.is_punct("="):
        return None
    if i > 0:
        prev = tokens[i - 1]
        ok = (
            prev.is_kw("const")
            or prev.is_kw("let")
            or prev.is_kw("var")
            or prev.is_punct(";")
            or prev.is_punct("{")
            or prev.is_punct("}")
            or (context == CLASS_BODY and prev.kind == IDENT and prev.text == "static")
        )
        if not ok:
            return None
    k = i + 2
    tk = _tok(tokens, k)
    if tk is not None and tk.kind == IDENT and tk.text == "async":
        k += 1
        tk = _tok(tokens, k)
    if tk is None:
        return None
    if tk.is_kw("function"):
        k += 1
        tk = _tok(tokens, k)
        if tk is not None and tk.is_punct("*"):
            k += 1
            tk = _tok(tokens, k)
        if tk is not None and tk.kind == IDENT:  # named function expression
            k += 1
            tk = _tok(tokens, k)
        if tk is None or not tk.is_punct("("):
            return None
        j = _skip_parens(tokens, k)
        body = _tok(tokens, j) if j is not None else None
        if body is not None and body.is_punct("{"):
            return _Head(t.text, KIND_FUNCTION, i, j, CODE, _js_decl_start(tokens, i))
        return None
    if tk.is_punct("("):
        j = _skip_parens(tokens, k)
        if j is None:
            return None
        arrow = _tok(tokens, j)
        body = _tok(tokens, j + 1)
        if arrow is not None and arrow.is_punct("=>") and body is not None and body.is_punct("{"):
            return _Head(t.text, KIND_FUNCTION, i, j + 1, CODE, _js_decl_start(tokens, i))
        return None
    if tk.kind == IDENT:
        arrow = _tok(tokens, k + 1)
        body = _tok(tokens, k + 2)
        if arrow is not None and arrow.is_punct("=>") and body is not None and body.is_punct("{"):
            return _Head(t.text, KIND_FUNCTION, i, k + 2, CODE, _js_decl_start(tokens, i))
    return None


def _js_method_head(tokens, i, stmt_start):
    t = tokens[i]
    if t.kind != IDENT:
        return None
    nxt = _tok(tokens, i + 1)
    if nxt is None or not nxt.is_punct("("):
        return None
    if i > 0:
        prev = tokens[i - 1]
        ok = (
            prev.kind == IDENT  # static / async / get / set / decorator name
            or prev.is_punct("{")
            or prev.is_punct("}")
            or prev.is_punct(";")
            or prev.is_punct("*")
            or prev.is_punct(")")
        )
        if not ok:
            return None
    j = _skip_parens(tokens, i + 1)
    body = _tok(tokens, j) if j is not None else None
    if body is not None and body.is_punct("{"):
        return _Head(t.text, KIND_FUNCTION, i, j, CODE, _js_decl_start(tokens, i))
    return None


def _cpp_function_head(tokens, i, stmt_start):
    t = tokens[i]
    n = len(tokens)
    if t.kind != IDENT:
        return None
    nxt = _tok(tokens, i + 1)
    if nxt is None or not nxt.is_punct("("):
        return None
    name = t.text
    if i > stmt_start:
        prev = tokens[i - 1]
        if prev.is_punct("~"):
            name = "~" + name
        else:
            ok = (
                prev.kind == IDENT
                or (prev.kind == KEYWORD and prev.text not in _CPP_BAD_PRECEDER_KW)
                or prev.is_punct(">")
                or prev.is_punct("]")
                or prev.is_punct("*")
                or prev.is_punct("&")
                or prev.is_punct("::")
                or prev.is_punct(")")
                or prev.is_punct(":")
            )
            if not ok:
                return None
    j = _skip_parens(tokens, i + 1)
    if j is None:
        return None
    k = j
    while k < n:
        tk = tokens[k]
        if tk.kind == KEYWORD and tk.text in _CPP_QUALIFIERS:
            k += 1
            if k < n and tokens[k].is_punct("("):
                nk = _skip_parens(tokens, k)
                if nk is None:
                    return None
                k = nk
            continue
        if tk.is_punct("&"):
            k += 1
            continue
        if tk.is_punct("->"):  # trailing return type
            k += 1
            while k < n and not (
                tokens[k].is_punct("{") or tokens[k].is_punct(";") or tokens[k].is_punct("=")
            ):
                if tokens[k].is_punct("("):
                    nk = _skip_parens(tokens, k)
                    if nk is None:
                        return None
                    k = nk
                    continue
                if tokens[k].is_punct("<"):
                    nk = _skip_angles(tokens, k)
                    k = nk if nk is not None else k + 1
                    continue
                k += 1
            continue
        if tk.is_punct("{"):
            return _Head(name, KIND_FUNCTION, i, k, CODE, stmt_start)
        if tk.is_punct(";"):
            return _Bodyless(i, k + 1)
        if tk.is_punct("="):  # = default; = delete; = 0;
            while k < n and not tokens[k].is_punct(";"):
                k += 1
            return _Bodyless(i, k + 1)
        if tk.is_punct(":"):
            return _cpp_ctor_init(tokens, i, k + 1, name, stmt_start)
        return None
    return None


def _cpp_ctor_init(tokens, name_tok, k, name, stmt_start):
    """Parse a constructor initializer list; succeed on reaching the body."""
    n = len(tokens)
    while k < n:
        if tokens[k].kind not in (IDENT, KEYWORD):
            return None
        k += 1
        while k < n and (tokens[k].is_punct("::") or tokens[k].kind == IDENT):
            k += 1
        if k < n and tokens[k].is_punct("<"):
            nk = _skip_angles(tokens, k)
            if nk is not None:
                k = nk
        if k < n and tokens[k].is_punct("("):
            nk = _skip_parens(tokens, k)
            if nk is None:
                return None
            k = nk
        elif k < n and tokens[k].is_punct("{"):
            nk = _skip_braces(tokens, k)
            if nk is None:
                return None
            k = nk
        else:
            return None
        if k < n and tokens[k].is_punct(","):
            k += 1
            continue
        if k < n and tokens[k].is_punct("{"):
            return _Head(name, KIND_FUNCTION, name_tok, k, CODE, stmt_start)
        return None
    return None


def _function_head(tokens, i, language, context, stmt_start):
    if language == "java":
        if context == CLASS_BODY or context == ENUM_BODY:
            return _java_function_head(tokens, i, stmt_start)
        return None
    if language == "cpp":
        if context in (FILE, CLASS_BODY):
            return _cpp_function_head(tokens, i, stmt_start)
        return None
    # javascript
    head = _js_function_decl_head(tokens, i, stmt_start)
    if head is not None:
        return head
    if context == CLASS_BODY:
        head = _js_method_head(tokens, i, stmt_start)
        if head is not None:
            return head
    return _js_assigned_head(tokens, i, stmt_start, context)


# ---------------------------------------------------------------------------
# Main scan
# ---------------------------------------------------------------------------


def scan_structure(tokens: list[Token], language: str, file: str) -> StructureScan:
    """One forward pass over ``tokens`` building records and decl positions."""
    n = len(tokens)
    builders: list[_Builder] = []
    decl_positions: set[tuple[int, int]] = set()
    stack = [_Frame(context=FILE, stmt_start=0)]
    last_line = tokens[-1].line if tokens else 1

    def nearest_named_parent() -> str | None:
        for frame in reversed(stack):
            if frame.builder is not None:
                return frame.builder.name
        return None

    i = 0
    while i < n:
        t = tokens[i]
        frame = stack[-1]
        ctx = frame.context

        # C++ template prefix: skip the parameter list wholesale.
        if language == "cpp" and t.is_kw("template"):
            nxt = _tok(tokens, i + 1)
            if nxt is not None and nxt.is_punct("<"):
                nk = _skip_angles(tokens, i + 1)
                if nk is not None:
                    i = nk
                    continue
            i += 1
            continue

        head = _class_like_head(tokens, i, language)
        if head is None and not (ctx == ENUM_BODY and not frame.seen_semi):
            head = _function_head(tokens, i, language, ctx, frame.stmt_start)

        if isinstance(head, _Bodyless):
            decl_positions.add((tokens[head.name_tok].line, tokens[head.name_tok].col))
            i = head.resume
            frame.stmt_start = i
            continue

        if isinstance(head, _Head):
            builder = None
            if head.name is not None:
                name_t = tokens[head.name_tok]
                decl_positions.add((name_t.line, name_t.col))
                builder = _Builder(
                    name=head.name,
                    kind=head.kind,
                    start_line=tokens[head.start_tok].line,
                    end_line=last_line,
                    parent=nearest_named_parent(),
                    name_pos=(name_t.line, name_t.col),
                )
                builders.append(builder)
            stack.append(_Frame(context=head.context, builder=builder, stmt_start=head.body_open + 1))
            i = head.body_open + 1
            continue

        if t.is_punct("{"):
            # extern "C" { ... } keeps file scope for the definitions inside
            block_ctx = CODE
            if (
                language == "cpp"
                and i >= 2
                and tokens[i - 1].kind == STRING
                and tokens[i - 2].is_kw("extern")
            ):
                block_ctx = FILE
            stack.append(_Frame(context=block_ctx, stmt_start=i + 1))
            i += 1
            continue

        if t.is_punct("}"):
            if len(stack) > 1:
                closed = stack.pop()
                if closed.builder is not None:
                    closed.builder.end_line = t.line
            i += 1
            stack[-1].stmt_start = i
            continue

        if t.is_punct(";"):
            frame.stmt_start = i + 1
            if ctx == ENUM_BODY:
                frame.seen_semi = True
            i += 1
            continue

        # C++ access specifiers start a fresh member declaration.
        if (
            language == "cpp"
            and t.is_punct(":")
            and i > 0
            and tokens[i - 1].kind == KEYWORD
            and tokens[i - 1].text in ("public", "private", "protected")
        ):
            frame.stmt_start = i + 1
            i += 1
            continue

        # Java enum constants with arguments look like calls; remember their
        # name positions so the reference scanner skips them.
        if (
            ctx == ENUM_BODY
            and not frame.seen_semi
            and t.kind == IDENT
            and (nxt := _tok(tokens, i + 1)) is not None
            and nxt.is_punct("(")
        ):
            decl_positions.add((t.line, t.col))

        i += 1

    records = [
        DefinitionRecord(
            name=b.name,
            kind=b.kind,
            file=file,
            start_line=b.start_line,
            end_line=b.end_line,
            parent=b.parent,
        )
        for b in builders
    ]
    return StructureScan(records=records, decl_positions=decl_positions)


def parse_cfamily(text: str, language: str, file: str) -> list[DefinitionRecord]:
    tokens = tokenize(text, language)
    return scan_structure(tokens, language, file).records


def find_cfamily_references(
    text: str,
    language: str,
    file_records: list[DefinitionRecord],
    function_names: set[str],
    class_names: set[str],
    include_self_refs: bool = False,
) -> list[tuple[str, str, int, str]]:
    """(name, kind, line, reference_kind) tuples for calls/instantiations.

    Calls are ``name(`` sites for modified functions; instantiations are
    ``new Name(...)`` sites for modified classes. Definition-name positions
    (including bodyless declarations) are excluded, as are sites inside the
    same-named definition's own body unless ``include_self_refs``.
    """
    tokens = tokenize(text, language)
    scan = scan_structure(tokens, language, file="")
    decl_positions = scan.decl_positions
    spans_by_entity: dict[tuple[str, str], list[tuple[int, int]]] = {}
    for r in file_records:
        spans_by_entity.setdefault((r.name, r.kind), []).append((r.start_line, r.end_line))

    def is_self_ref(name: str, kind: str, line: int) -> bool:
        return any(s <= line <= e for s, e in spans_by_entity.get((name, kind), ()))

    out: list[tuple[str, str, int, str]] = []
    n = len(tokens)
    for i, t in enumerate(tokens):
        if t.kind != IDENT:
            continue
        prev = tokens[i - 1] if i > 0 else None
        if _preceded_by_new(tokens, i):
            if t.text in class_names:
                j = i + 1
                if j < n and tokens[j].is_punct("<"):
                    nj = _skip_angles(tokens, j)
                    if nj is not None:
                        j = nj
                if j < n and tokens[j].is_punct("("):
                    if include_self_refs or not is_self_ref(t.text, KIND_CLASS, t.line):
                        out.append((t.text, KIND_CLASS, t.line, "instantiation"))
            continue
        nxt = tokens[i + 1] if i + 1 < n else None
        if nxt is None or not nxt.is_punct("("):
            continue
        if t.text not in function_names:
            continue
        if (t.line, t.col) in decl_positions:
            continue
        if prev is not None and prev.is_punct("@"):
            continue
        if not include_self_refs and is_self_ref(t.text, KIND_FUNCTION, t.line):
            continue
        out.append((t.text, KIND_FUNCTION, t.line, "call"))
    return out


def _preceded_by_new(tokens: list[Token], i: int) -> bool:
    """True when the identifier at ``i`` is the type of a new-expression,
    walking back over a qualification chain (``new a.b.Foo(...)``)."""
    j = i - 1
    while j >= 1 and tokens[j].is_punct(".") and tokens[j - 1].kind == IDENT:
        j -= 2
    return j >= 0 and tokens[j].is_kw("new")
