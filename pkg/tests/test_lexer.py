"""Tokenizer unit tests: positions, literal elision, language quirks."""

from __future__ import annotations

from c3gen.parsers.lexer import IDENT, KEYWORD, NUMBER, PUNCT, STRING, tokenize


def kinds_texts(tokens):
    return [(t.kind, t.text) for t in tokens]


def test_positions_are_one_based_lines_zero_based_cols():
    tokens = tokenize("int x;\n  foo();\n", "cpp")
    assert (tokens[0].line, tokens[0].col) == (1, 0)  # int
    foo = next(t for t in tokens if t.text == "foo")
    assert (foo.line, foo.col) == (2, 2)


def test_line_and_block_comments_vanish():
    tokens = tokenize("a // call()\n/* new X(1)\n more */ b", "java")
    assert [t.text for t in tokens] == ["a", "b"]
    assert tokens[1].line == 3  # block comment newlines still counted


def test_string_literals_collapse_to_one_token():
    tokens = tokenize('x = "call(1)" + \'c\';', "java")
    assert [t.kind for t in tokens if t.kind == STRING] == [STRING, STRING]
    assert not any(t.kind == IDENT and t.text == "call" for t in tokens)


def test_escaped_quote_does_not_end_string():
    tokens = tokenize(r'a = "he said \"hi(\" ok" ; b', "javascript")
    assert [t.text for t in tokens if t.kind == IDENT] == ["a", "b"]


def test_keywords_classified_per_language():
    java = tokenize("if (x) new Foo();", "java")
    assert java[0].kind == KEYWORD and java[0].text == "if"
    js = tokenize("async function f() {}", "javascript")
    assert js[0].kind == IDENT  # async is contextual in JS
    assert js[1].kind == KEYWORD


def test_compound_operators_kept_whole():
    tokens = tokenize("a => b; c::d; e->f;", "cpp")
    texts = [t.text for t in tokens if t.kind == PUNCT]
    assert "::" in texts and "->" in texts
    js = tokenize("x => y", "javascript")
    assert any(t.is_punct("=>") for t in js)


def test_nested_generics_use_single_angle_tokens():
    tokens = tokenize("Map<String, List<Integer>> m;", "java")
    closes = [t for t in tokens if t.is_punct(">")]
    assert len(closes) == 2  # never lexed as one ">>" token


def test_js_regex_vs_division():
    regex = tokenize("const re = /ab[/]c/g;", "javascript")
    assert any(t.kind == STRING and t.text.startswith("/ab") for t in regex)
    division = tokenize("x = a / b / c;", "javascript")
    assert sum(1 for t in division if t.is_punct("/")) == 2


def test_js_template_interpolation_tokens_surface():
    tokens = tokenize("msg = `got ${count(items)} things`;", "javascript")
    idents = [t.text for t in tokens if t.kind == IDENT]
    assert "count" in idents and "items" in idents
    count = next(t for t in tokens if t.text == "count")
    after = tokens[tokens.index(count) + 1]
    assert after.is_punct("(")


def test_js_template_multiline_positions():
    src = "pre();\nmsg = `a\nb ${hit(x)} c`;\npost();"
    tokens = tokenize(src, "javascript")
    hit = next(t for t in tokens if t.text == "hit")
    assert hit.line == 3
    post = next(t for t in tokens if t.text == "post")
    assert post.line == 4


def test_cpp_raw_string_swallows_everything():
    src = 'auto s = R"(quote " and call(1) {)" ; next();'
    tokens = tokenize(src, "cpp")
    assert not any(t.text == "call" for t in tokens)
    assert any(t.text == "next" for t in tokens)


def test_cpp_preprocessor_lines_vanish_with_continuations():
    src = "#define M(a) \\\n  call(a)\nint x;"
    tokens = tokenize(src, "cpp")
    assert [t.text for t in tokens] == ["int", "x", ";"]
    assert tokens[0].line == 3


def test_java_text_block_is_one_string():
    src = 'String q = """\n  select f(x)\n  """;\nint y;'
    tokens = tokenize(src, "java")
    assert not any(t.text == "f" for t in tokens)
    y = next(t for t in tokens if t.text == "y")
    assert y.line == 4


def test_numbers_including_separators():
    tokens = tokenize("x = 1_000 + 0xFF + 3.14f;", "java")
    numbers = [t.text for t in tokens if t.kind == NUMBER]
    assert numbers == ["1_000", "0xFF", "3.14f"]


def test_js_private_names_lex_as_idents():
    tokens = tokenize("this.#count = 1;", "javascript")
    assert any(t.kind == IDENT and t.text == "#count" for t in tokens)


def test_unterminated_literals_do_not_hang():
    for src, language in [('x = "abc', "java"), ("y = 'oops", "cpp"),
                          ("z = `tpl ${", "javascript"), ("/* never closed", "cpp")]:
        tokenize(src, language)  # must terminate without raising
