"""Tokenizer for the C-family languages (Java, JavaScript, C++).

Produces a flat token stream with comments dropped and string literals
collapsed to single tokens, so downstream scanners never see identifiers
that only occur inside comments or strings. Line/column positions are
preserved for every token (1-based lines, 0-based columns).

Language quirks handled here: Java text blocks, JavaScript template
literals (interpolated expressions are tokenized, literal chunks are not),
JavaScript regex literals, C++ raw strings, and C++ preprocessor lines.
"""

from __future__ import annotations

from dataclasses import dataclass

IDENT = "ident"
KEYWORD = "keyword"
PUNCT = "punct"
NUMBER = "number"
STRING = "string"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    def is_punct(self, text: str) -> bool:
        return self.kind == PUNCT and self.text == text

    def is_kw(self, text: str) -> bool:
        return self.kind == KEYWORD and self.text == text


JAVA_KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while""".split()
)

# Reserved words only; contextual names (async, get, set, static, of) stay idents.
JS_KEYWORDS = frozenset(
    """break case catch class const continue debugger default delete do else
    export extends finally for function if import in instanceof let new return
    super switch this throw try typeof var void while with yield await null
    true false""".split()
)

CPP_KEYWORDS = frozenset(
    """alignas alignof auto bool break case catch char char8_t char16_t
    char32_t class concept const consteval constexpr constinit const_cast
    continue co_await co_return co_yield decltype default delete do double
    dynamic_cast else enum explicit export extern false float for friend goto
    if inline int long mutable namespace new noexcept nullptr operator private
    protected public register reinterpret_cast requires return short signed
    sizeof static static_assert static_cast struct switch template this
    thread_local throw true try typedef typeid typename union unsigned using
    virtual void volatile wchar_t while final override""".split()
)
# "final"/"override" are contextual in C++ but classifying them as keywords is
# harmless for structure scanning and simplifies the qualifier skip.

_KEYWORDS = {"java": JAVA_KEYWORDS, "javascript": JS_KEYWORDS, "cpp": CPP_KEYWORDS}

# Multi-char operators the scanners care about; everything else is single-char.
_COMPOUND = ("=>", "::", "->")

# Tokens after which a "/" starts a JS regex literal rather than division.
_JS_REGEX_PRECEDERS_PUNCT = frozenset(
    "( , = : [ ! & | ? { } ; + - * / % < > ^ ~ => ::".split()
)
_JS_REGEX_PRECEDERS_KW = frozenset(
    "return typeof case in instanceof new delete void do else yield await".split()
)


def _ident_start(ch: str, language: str) -> bool:
    if ch.isalpha() or ch in "_$":
        return True
    return language == "javascript" and ch == "#"


def _ident_cont(ch: str) -> bool:
    return ch.isalnum() or ch in "_$"


def tokenize(text: str, language: str) -> list[Token]:
    """Tokenize ``text``; comments vanish, strings become STRING tokens."""
    keywords = _KEYWORDS[language]
    tokens: list[Token] = []
    n = len(text)
    i = 0
    line = 1
    line_start = 0  # offset of the current line's first char
    only_ws_on_line = True  # for C++ preprocessor detection

    def emit(kind: str, start: int, end: int, tok_line: int, tok_col: int):
        tokens.append(Token(kind, text[start:end], tok_line, tok_col))

    def newline(pos: int):
        nonlocal line, line_start, only_ws_on_line
        line += 1
        line_start = pos + 1
        only_ws_on_line = True

    while i < n:
        ch = text[i]

        if ch == "\n":
            newline(i)
            i += 1
            continue
        if ch in " \t\r\f\v":
            i += 1
            continue

        # C++ preprocessor line (first non-ws char is '#'); eat continuations.
        if language == "cpp" and ch == "#" and only_ws_on_line:
            while i < n:
                if text[i] == "\\" and i + 1 < n and text[i + 1] == "\n":
                    newline(i + 1)
                    i += 2
                    continue
                if text[i] == "\n":
                    break
                i += 1
            continue

        only_ws_on_line = False
        col = i - line_start

        # Comments.
        if ch == "/" and i + 1 < n and text[i + 1] == "/":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "/" and i + 1 < n and text[i + 1] == "*":
            i += 2
            while i + 1 < n and not (text[i] == "*" and text[i + 1] == "/"):
                if text[i] == "\n":
                    newline(i)
                i += 1
            i = min(i + 2, n)
            continue

        # JS regex literal.
        if language == "javascript" and ch == "/" and _js_regex_position(tokens):
            end = _scan_js_regex(text, i)
            if end > i:
                emit(STRING, i, end, line, col)
                i = end
                continue
            # fall through: treat as punctuation

        # C++ raw string, with optional encoding prefix: R"delim( ... )delim"
        if language == "cpp" and ch in "RuUL8" :
            raw = _match_cpp_raw_string(text, i)
            if raw is not None:
                end, nl_count, last_nl = raw
                emit(STRING, i, end, line, col)
                if nl_count:
                    line += nl_count
                    line_start = last_nl + 1
                    only_ws_on_line = False
                i = end
                continue

        # Java text block.
        if language == "java" and text.startswith('"""', i):
            end = text.find('"""', i + 3)
            end = n if end < 0 else end + 3
            emit(STRING, i, end, line, col)
            for p in range(i, end):
                if text[p] == "\n":
                    newline(p)
            only_ws_on_line = False
            i = end
            continue

        # JS template literal: literal chunks become STRING tokens, the
        # ${...} expressions are tokenized inline via recursion.
        if language == "javascript" and ch == "`":
            i = _scan_js_template(text, i, line, line_start, tokens)
            # resync line bookkeeping
            consumed = text.count("\n", 0, i)
            if consumed + 1 != line:
                line = consumed + 1
                line_start = text.rfind("\n", 0, i) + 1
            continue

        # Plain string / char literal.
        if ch in "\"'":
            end = _scan_quoted(text, i, ch)
            emit(STRING, i, end, line, col)
            for p in range(i, end):
                if text[p] == "\n":
                    newline(p)
            only_ws_on_line = False
            i = end
            continue

        # Identifier / keyword.
        if _ident_start(ch, language):
            j = i + 1
            while j < n and _ident_cont(text[j]):
                j += 1
            word = text[i:j]
            kind = KEYWORD if word in keywords else IDENT
            emit(kind, i, j, line, col)
            i = j
            continue

        # Number.
        if ch.isdigit():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "._'"):
                j += 1
            emit(NUMBER, i, j, line, col)
            i = j
            continue

        # Punctuation (compound operators first).
        for op in _COMPOUND:
            if text.startswith(op, i):
                emit(PUNCT, i, i + len(op), line, col)
                i += len(op)
                break
        else:
            emit(PUNCT, i, i + 1, line, col)
            i += 1

    return tokens


def _scan_quoted(text: str, i: int, quote: str) -> int:
    """End offset (exclusive) of a quoted literal starting at ``i``."""
    n = len(text)
    j = i + 1
    while j < n:
        c = text[j]
        if c == "\\":
            j += 2
            continue
        if c == quote:
            return j + 1
        if c == "\n" and quote != "`":
            # Unterminated single-line literal; stop at EOL to stay in sync.
            return j
        j += 1
    return n


def _match_cpp_raw_string(text: str, i: int):
    """Match a C++ raw string at ``i``; returns (end, newlines, last_nl) or None."""
    n = len(text)
    j = i
    # optional encoding prefix (u8, u, U, L) before R
    for prefix in ("u8R", "uR", "UR", "LR", "R"):
        if text.startswith(prefix, j):
            j += len(prefix)
            break
    else:
        return None
    if j >= n or text[j] != '"':
        return None
    j += 1
    dstart = j
    while j < n and text[j] not in "(\\ \t\n":
        j += 1
    if j >= n or text[j] != "(":
        return None
    delim = text[dstart:j]
    closer = ")" + delim + '"'
    end = text.find(closer, j + 1)
    end = n if end < 0 else end + len(closer)
    nl_count = text.count("\n", i, end)
    last_nl = text.rfind("\n", i, end)
    return end, nl_count, last_nl


def _js_regex_position(tokens: list[Token]) -> bool:
    """True when a '/' at this point would start a regex literal."""
    if not tokens:
        return True
    prev = tokens[-1]
    if prev.kind == PUNCT:
        return prev.text in _JS_REGEX_PRECEDERS_PUNCT
    if prev.kind == KEYWORD:
        return prev.text in _JS_REGEX_PRECEDERS_KW
    return False  # ident, number, string -> division


def _scan_js_regex(text: str, i: int) -> int:
    """End offset of a regex literal at ``i``, or ``i`` if it isn't one."""
    n = len(text)
    j = i + 1
    in_class = False
    while j < n:
        c = text[j]
        if c == "\\":
            j += 2
            continue
        if c == "\n":
            return i  # regex literals cannot span lines
        if c == "[":
            in_class = True
        elif c == "]":
            in_class = False
        elif c == "/" and not in_class:
            j += 1
            while j < n and text[j].isalpha():
                j += 1
            return j
        j += 1
    return i


def _scan_js_template(
    text: str, i: int, line: int, line_start: int, tokens: list[Token]
) -> int:
    """Consume a template literal starting at the backtick at ``i``.

    Literal chunks are emitted as STRING tokens; each ``${...}`` body is
    tokenized recursively so calls inside interpolations are visible.
    """
    n = len(text)
    chunk_start = i
    j = i + 1
    cur_line, cur_ls = line, line_start
    while j < n:
        c = text[j]
        if c == "\\":
            j += 2
            continue
        if c == "\n":
            cur_line += 1
            cur_ls = j + 1
            j += 1
            continue
        if c == "`":
            tokens.append(
                Token(STRING, text[chunk_start : j + 1], line, chunk_start - line_start)
            )
            return j + 1
        if c == "$" and j + 1 < n and text[j + 1] == "{":
            # find the matching close brace, honoring nesting and strings
            k = j + 2
            depth = 1
            while k < n and depth:
                ck = text[k]
                if ck == "\\":
                    k += 2
                    continue
                if ck in "\"'":
                    k = _scan_quoted(text, k, ck)
                    continue
                if ck == "`":
                    k = _scan_js_template(text, k, 1, 0, [])  # positions redone below
                    continue
                if ck == "{":
                    depth += 1
                elif ck == "}":
                    depth -= 1
                k += 1
            expr = text[j + 2 : k - 1]
            inner = tokenize(expr, "javascript")
            base_line = cur_line + text.count("\n", cur_ls, j)
            for t in inner:
                # re-anchor inner positions onto the outer document
                abs_line = base_line + (t.line - 1)
                abs_col = t.col if t.line > 1 else (j + 2 - cur_ls) + t.col
                tokens.append(Token(t.kind, t.text, abs_line, abs_col))
            cur_line += expr.count("\n")
            if "\n" in expr:
                cur_ls = j + 2 + expr.rfind("\n") + 1
            j = k
            continue
        j += 1
    tokens.append(Token(STRING, text[chunk_start:], line, chunk_start - line_start))
    return n
