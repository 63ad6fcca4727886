"""Prompt assembly and the pluggable chat-completion backend.

Two input configurations exist: naive mode sends the raw diff alone, and
c3gen mode appends the retrieved code context after the diff. Rendering is
deterministic so the whole pipeline stays a pure function of its inputs.

Backends speak a chat-completion-style JSON-over-HTTP contract (model,
message list, temperature) against any configured endpoint. The ``mock:``
scheme selects an offline deterministic backend used by tests and dry
runs: it echoes the first eight words of the diff's first added line.
Secrets come from the environment (``C3GEN_API_KEY``), never flags.
"""

from __future__ import annotations

import hashlib
import logging
import os
import time
from dataclasses import dataclass

from c3gen.context import RelevantCodeContext
from c3gen.errors import (
    BackendAuthError,
    BackendError,
    BackendResponseError,
    BackendTimeoutError,
    EmptyGenerationError,
    PromptTooLargeError,
)

log = logging.getLogger(__name__)

MODE_NAIVE = "naive"
MODE_C3GEN = "c3gen"

DEFAULT_TEMPLATE_ID = "default-v1"
DEFAULT_CHAR_CEILING = 200_000

API_KEY_ENV = "C3GEN_API_KEY"

_SYSTEM_TEXT = (
    "You are an assistant that writes commit messages for code changes. "
    "Given a code diff (and, when provided, related code context from the "
    "repository), write the commit message: a one-line summary of at most "
    "50 words, optionally followed by a blank line and a short rationale. "
    "Describe what changed and why. Output only the commit message."
)

DIFF_HEADER = "### Code Diff"
CONTEXT_HEADER = "### Related Code Context"
NOTE_CONTEXT_EMPTY = "context_empty"


@dataclass(frozen=True)
class PromptBundle:
    mode: str  # "naive" | "c3gen"
    system_text: str
    user_text: str
    template_id: str
    estimated_chars: int
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class BackendConfig:
    endpoint_url: str = "mock:echo"
    model_name: str = "mock-model"
    temperature: float = 0.0
    timeout: float = 60.0
    max_retries: int = 2
    retry_base_delay: float = 0.5
    api_key_env: str = API_KEY_ENV

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class GeneratedMessage:
    text: str
    mode: str
    model_name: str
    latency: float
    request_id: str
    retries: int = 0
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "mode": self.mode,
            "model_name": self.model_name,
            "latency": self.latency,
            "request_id": self.request_id,
            "retries": self.retries,
            "notes": list(self.notes),
        }


def build_prompt(
    diff: str,
    context: RelevantCodeContext | None = None,
    template_id: str = DEFAULT_TEMPLATE_ID,
    char_ceiling: int = DEFAULT_CHAR_CEILING,
) -> PromptBundle:
    """Render the model input for ``diff`` (+ optional retrieved context).

    Rendering is deterministic; fixed section headers, snippets in context
    order with file/line provenance headers. A c3gen bundle whose context
    is empty degrades to the naive rendering and carries a note. Raises
    :class:`PromptTooLargeError` past the character ceiling.
    """
    if not diff.strip():
        raise ValueError("diff must be non-empty")
    mode = MODE_NAIVE if context is None else MODE_C3GEN
    sections = [DIFF_HEADER, "```diff", diff.rstrip("\n"), "```"]
    notes: tuple[str, ...] = ()
    if context is not None:
        if context.snippets:
            sections.append("")
            sections.append(CONTEXT_HEADER)
            for snippet in context.snippets:
                entity_name, entity_kind = snippet.for_entity
                sections.append(
                    f"--- {snippet.file}:{snippet.start_line}-{snippet.end_line} "
                    f"({snippet.reason}; references {entity_kind} {entity_name}) ---"
                )
                sections.append(snippet.text)
        else:
            notes = (NOTE_CONTEXT_EMPTY,)
    user_text = "\n".join(sections) + "\n"
    if len(user_text) > char_ceiling:
        raise PromptTooLargeError(
            f"prompt too large: {len(user_text)} chars exceeds ceiling {char_ceiling}"
        )
    return PromptBundle(
        mode=mode,
        system_text=_SYSTEM_TEXT,
        user_text=user_text,
        template_id=template_id,
        estimated_chars=len(user_text),
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------


class MockBackend:
    """Offline deterministic backend: echoes the start of the first added line.

    ``mock:echo`` summarizes the first eight words of the diff's first
    added line; ``mock:fixed=<text>`` always answers ``<text>``.
    """

    def __init__(self, spec: str = "echo"):
        self.spec = spec

    def complete(
        self, system_text: str, user_text: str, config: BackendConfig
    ) -> tuple[str, int]:
        if self.spec.startswith("fixed="):
            return self.spec[len("fixed="):], 0
        added = None
        in_diff = False
        for line in user_text.split("\n"):
            if line == DIFF_HEADER:
                in_diff = True
                continue
            if line == CONTEXT_HEADER:
                break
            if in_diff and line.startswith("+") and not line.startswith("+++"):
                added = line[1:].strip()
                if added:
                    break
        if not added:
            return "update code", 0
        return " ".join(added.split()[:8]), 0


class HttpBackend:
    """Chat-completion JSON-over-HTTP client with retry on transient failure."""

    def __init__(self, endpoint_url: str):
        self.endpoint_url = endpoint_url

    def complete(
        self, system_text: str, user_text: str, config: BackendConfig
    ) -> tuple[str, int]:
        import requests

        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        body = {
            "model": config.model_name,
            "messages": [
                {"role": "system", "content": system_text},
                {"role": "user", "content": user_text},
            ],
            "temperature": config.temperature,
        }
        attempt = 0
        while True:
            try:
                response = requests.post(
                    self.endpoint_url, json=body, headers=headers, timeout=config.timeout
                )
            except requests.Timeout as exc:
                if attempt >= config.max_retries:
                    raise BackendTimeoutError(
                        f"backend timed out after {attempt + 1} attempts"
                    ) from exc
                _backoff(config, attempt)
                attempt += 1
                continue
            except requests.RequestException as exc:
                raise BackendError(f"backend request failed: {exc}") from exc

            if response.status_code in (401, 403):
                raise BackendAuthError(f"backend rejected credentials ({response.status_code})")
            if response.status_code >= 500:
                if attempt >= config.max_retries:
                    raise BackendError(
                        f"backend error {response.status_code} after {attempt + 1} attempts"
                    )
                _backoff(config, attempt)
                attempt += 1
                continue
            if response.status_code != 200:
                raise BackendResponseError(f"unexpected status {response.status_code}")
            try:
                payload = response.json()
                return str(payload["choices"][0]["message"]["content"]), attempt
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise BackendResponseError(f"malformed backend response: {exc}") from exc


def _backoff(config: BackendConfig, attempt: int):
    delay = config.retry_base_delay * (2 ** attempt)
    log.warning("transient backend failure; retrying in %.2fs", delay)
    time.sleep(delay)


def resolve_backend(config: BackendConfig):
    if config.endpoint_url.startswith("mock:"):
        return MockBackend(config.endpoint_url[len("mock:"):])
    return HttpBackend(config.endpoint_url)


def strip_fences(text: str) -> str:
    """Drop surrounding whitespace and a wrapping code fence, if any."""
    text = text.strip()
    if text.startswith("```") and text.endswith("```"):
        lines = text.split("\n")
        if len(lines) >= 2:
            text = "\n".join(lines[1:-1]).strip()
    return text


def generate_message(
    bundle: PromptBundle,
    config: BackendConfig,
    backend=None,
) -> GeneratedMessage:
    """Obtain one commit message for ``bundle`` from the configured backend.

    Transient failures (timeouts, 5xx) are retried with exponential backoff
    up to ``max_retries``; auth failures, malformed responses, and empty
    generations raise distinct errors, so the result text is never silently
    empty. ``backend`` overrides backend resolution (used by tests).
    """
    backend = backend or resolve_backend(config)
    started = time.monotonic()
    text, retries = backend.complete(bundle.system_text, bundle.user_text, config)
    latency = time.monotonic() - started
    text = strip_fences(text)
    if not text:
        raise EmptyGenerationError("backend returned an empty message")
    if isinstance(backend, MockBackend):
        # keep mock output a pure function of the prompt
        latency = 0.0
        request_id = "mock-" + hashlib.sha256(bundle.user_text.encode("utf-8")).hexdigest()[:12]
    else:
        request_id = f"req-{int(started * 1000)}"
    return GeneratedMessage(
        text=text,
        mode=bundle.mode,
        model_name=config.model_name,
        latency=round(latency, 6),
        request_id=request_id,
        retries=retries,
        notes=bundle.notes,
    )
