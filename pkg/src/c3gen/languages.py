"""Language configuration: which file extensions map to which language tag.

The supported set is a config value, not a constant baked into the parsers.
The default covers Python, Java, JavaScript and C++; callers can restrict or
extend it (any subset of the tags the parsers understand).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from c3gen.errors import UnsupportedLanguageError

PYTHON = "python"
JAVA = "java"
JAVASCRIPT = "javascript"
CPP = "cpp"

#: Languages the structural parsers understand.
PARSEABLE = frozenset({PYTHON, JAVA, JAVASCRIPT, CPP})

#: Default extension -> tag mapping (extensions lowercase, with the dot).
DEFAULT_EXTENSIONS: dict[str, str] = {
    ".py": PYTHON,
    ".java": JAVA,
    ".js": JAVASCRIPT,
    ".mjs": JAVASCRIPT,
    ".cjs": JAVASCRIPT,
    ".cpp": CPP,
    ".cc": CPP,
    ".cxx": CPP,
    ".hpp": CPP,
    ".hh": CPP,
    ".hxx": CPP,
    ".h": CPP,
}


@dataclass(frozen=True)
class LanguageConfig:
    """Active language set plus the extension mapping used for detection."""

    languages: frozenset[str] = PARSEABLE
    extensions: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_EXTENSIONS))

    def __post_init__(self):
        unknown = set(self.languages) - PARSEABLE
        if unknown:
            raise UnsupportedLanguageError(
                f"unsupported language tag(s): {', '.join(sorted(unknown))}"
            )

    @classmethod
    def for_languages(cls, tags) -> "LanguageConfig":
        """Config restricted to ``tags`` (an iterable of language tags)."""
        return cls(languages=frozenset(tags))

    def detect(self, path: str) -> str | None:
        """Language tag for ``path`` by extension, or None if out of scope."""
        dot = path.rfind(".")
        if dot < 0:
            return None
        tag = self.extensions.get(path[dot:].lower())
        if tag is None or tag not in self.languages:
            return None
        return tag

    def require(self, tag: str) -> str:
        """Validate ``tag`` against the active set; raise if unsupported."""
        if tag not in self.languages:
            raise UnsupportedLanguageError(f"unsupported language tag: {tag!r}")
        return tag


def default_config() -> LanguageConfig:
    return LanguageConfig()
