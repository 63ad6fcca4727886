"""Command-line entry point.

Subcommands: ``index``, ``retrieve``, ``generate``, ``evaluate``, and
``corpus build|filter|dedup|split``. Data goes to stdout (or ``--out``),
logs and the run manifest go to stderr. Exit codes are stable: 0 success,
2 input error, 3 backend error.

Configuration precedence is flags > environment > config file > defaults;
the effective configuration is echoed into the run manifest.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import click

from c3gen import __version__
from c3gen.context import DEFAULT_MAX_SNIPPETS, DEFAULT_MAX_TOTAL_LINES
from c3gen.corpus import (
    apply_filters,
    dedup_decisions,
    deduplicate,
    read_git_history,
    read_jsonl,
    split,
    write_jsonl,
)
from c3gen.csg import build_csg_store
from c3gen.errors import C3GenError
from c3gen.generation import (
    API_KEY_ENV,
    DEFAULT_CHAR_CEILING,
    BackendConfig,
    build_prompt,
    generate_message,
)
from c3gen.indexing import (
    build_definition_index,
    load_index,
    stored_digest,
    tree_digest,
    write_index,
)
from c3gen.languages import PARSEABLE, LanguageConfig
from c3gen.metrics import evaluate_run, read_results_jsonl
from c3gen.pipeline import retrieve_context

log = logging.getLogger("c3gen")

ENV_PREFIX = "C3GEN_"


@dataclass
class RunManifest:
    command: str
    config: dict
    input_digests: dict = field(default_factory=dict)
    version: str = __version__
    started_at: str = ""
    finished_at: str = ""

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "input_digests": self.input_digests,
            "version": self.version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }


def _utc_now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _setting(flag_value, env_key: str, file_config: dict, key: str, default):
    """flags > env > config file > defaults."""
    if flag_value is not None:
        return flag_value
    env = os.environ.get(ENV_PREFIX + env_key)
    if env is not None:
        return type(default)(env) if default is not None else env
    if key in file_config:
        return file_config[key]
    return default


def _load_file_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise C3GenError(f"cannot read config file {path}: {exc}") from exc


def _language_config(languages: str | None, file_config: dict) -> LanguageConfig:
    raw = _setting(languages, "LANGUAGES", file_config, "languages", None)
    if raw is None:
        return LanguageConfig()
    tags = [t.strip() for t in str(raw).split(",") if t.strip()]
    return LanguageConfig.for_languages(tags)


def _emit(data: str, out: str | None):
    if out:
        Path(out).write_text(data, encoding="utf-8")
    else:
        sys.stdout.write(data)


def _finish_manifest(manifest: RunManifest, manifest_path: str | None):
    manifest.finished_at = _utc_now()
    line = json.dumps(manifest.to_dict(), sort_keys=True)
    log.info("run manifest: %s", line)
    if manifest_path:
        Path(manifest_path).write_text(line + "\n", encoding="utf-8")


def _read_diff(diff_file: str) -> str:
    if diff_file == "-":
        return sys.stdin.read()
    try:
        return Path(diff_file).read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise C3GenError(f"cannot read diff file {diff_file}: {exc}") from exc


class _Fail(click.ClickException):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _guarded(fn):
    """Map typed pipeline errors onto the stable exit-code contract."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except C3GenError as exc:
            raise _Fail(str(exc), exc.exit_code) from exc

    return wrapper


@click.group()
@click.version_option(version=__version__, prog_name="c3gen")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging to stderr.")
def main(verbose: bool):
    """Retrieve commit-relevant code context and generate/evaluate messages."""
    # force=True rebinds the handler to the current stderr on every
    # invocation (test harnesses swap sys.stderr between runs)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


_repo_opt = click.option(
    "--repo", "repo_root", default=".", show_default=True,
    help="Repository root (post-change checkout).",
)
_languages_opt = click.option(
    "--languages", default=None,
    help=f"Comma-separated language tags (default: {','.join(sorted(PARSEABLE))}).",
)
_config_opt = click.option("--config", "config_file", default=None, help="JSON config file.")
_exclude_opt = click.option(
    "--exclude", multiple=True, help="Glob of repo-relative paths to skip (repeatable)."
)
_jobs_opt = click.option("--jobs", default=None, type=int, help="Parallel parse workers.")
_manifest_opt = click.option("--manifest", "manifest_path", default=None,
                             help="Also write the run manifest to this path.")


@main.command("index")
@_repo_opt
@_languages_opt
@_config_opt
@_exclude_opt
@_jobs_opt
@_manifest_opt
@click.option("--out-dir", default=None, help="Cache directory (default <repo>/.c3gen).")
@_guarded
def cmd_index(repo_root, languages, config_file, exclude, jobs, manifest_path, out_dir):
    """Build and persist the definition index and structure graphs."""
    file_config = _load_file_config(config_file)
    lang_config = _language_config(languages, file_config)
    jobs = _setting(jobs, "JOBS", file_config, "jobs", 1)
    out_dir = out_dir or str(Path(repo_root) / ".c3gen")

    manifest = RunManifest(
        command="index",
        config={"languages": sorted(lang_config.languages), "exclude": list(exclude),
                "jobs": jobs, "out_dir": out_dir},
        started_at=_utc_now(),
    )
    digest = tree_digest(repo_root, lang_config, tuple(exclude))
    manifest.input_digests["repo_tree"] = digest

    index = build_definition_index(repo_root, lang_config, tuple(exclude), jobs=jobs)
    write_index(index, out_dir, digest=digest)
    csg_dir = Path(out_dir) / "csg"
    for file, graph in build_csg_store(index).items():
        target = csg_dir / (file + ".json")
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(graph.serialize(), encoding="utf-8")
    log.info("indexed %d files into %s", len(index.entries), out_dir)
    _finish_manifest(manifest, manifest_path)


@main.command("retrieve")
@click.argument("diff_file")
@_repo_opt
@_languages_opt
@_config_opt
@_exclude_opt
@_jobs_opt
@_manifest_opt
@click.option("--out", default=None, help="Write context JSON here instead of stdout.")
@click.option("--max-snippets", default=None, type=int,
              help=f"Snippet count cap (default {DEFAULT_MAX_SNIPPETS}).")
@click.option("--max-total-lines", default=None, type=int,
              help=f"Total context line cap (default {DEFAULT_MAX_TOTAL_LINES}).")
@click.option("--attribute", default="innermost",
              type=click.Choice(["innermost", "all-enclosing"]), show_default=True,
              help="Attribute a change to the innermost definition or its whole chain.")
@click.option("--include-self-refs", is_flag=True,
              help="Keep recursive references inside an entity's own body.")
@click.option("--exclude-entity-body", is_flag=True,
              help="Drop snippets that are a modified entity's own definition body.")
@click.option("--old-repo", default=None,
              help="Pre-change checkout for attributing deletions precisely.")
@click.option("--no-reindex", is_flag=True, help="Use the cached index even if stale.")
@click.option("--csg-out", default=None, help="Dump augmented structure graphs here.")
@click.option("--entities-out", default=None,
              help="Write the modified entity list JSON here.")
@click.option("--records-out", default=None,
              help="Write the invocation records JSONL here.")
@_guarded
def cmd_retrieve(diff_file, repo_root, languages, config_file, exclude, jobs,
                 manifest_path, out, max_snippets, max_total_lines, attribute,
                 include_self_refs, exclude_entity_body, old_repo, no_reindex,
                 csg_out, entities_out, records_out):
    """Retrieve the relevant code context for a diff (context JSON on stdout)."""
    file_config = _load_file_config(config_file)
    lang_config = _language_config(languages, file_config)
    jobs = _setting(jobs, "JOBS", file_config, "jobs", 1)
    max_snippets = _setting(max_snippets, "MAX_SNIPPETS", file_config,
                            "max_snippets", DEFAULT_MAX_SNIPPETS)
    max_total_lines = _setting(max_total_lines, "MAX_TOTAL_LINES", file_config,
                               "max_total_lines", DEFAULT_MAX_TOTAL_LINES)
    diff_text = _read_diff(diff_file)

    manifest = RunManifest(
        command="retrieve",
        config={
            "languages": sorted(lang_config.languages), "exclude": list(exclude),
            "jobs": jobs, "max_snippets": max_snippets,
            "max_total_lines": max_total_lines, "attribute": attribute,
            "include_self_refs": include_self_refs,
            "exclude_entity_body": exclude_entity_body,
        },
        started_at=_utc_now(),
    )
    manifest.input_digests["diff"] = _sha256_text(diff_text)
    manifest.input_digests["repo_tree"] = tree_digest(repo_root, lang_config, tuple(exclude))

    index = _cached_index(repo_root, lang_config, tuple(exclude), jobs,
                          manifest.input_digests["repo_tree"], no_reindex)
    old_index = None
    if old_repo:
        old_index = build_definition_index(old_repo, lang_config, tuple(exclude), jobs=jobs)

    result = retrieve_context(
        repo_root, diff_text, lang_config,
        index=index, old_index=old_index,
        max_snippets=max_snippets, max_total_lines=max_total_lines,
        attribute=attribute, include_self_refs=include_self_refs,
        exclude_entity_body=exclude_entity_body,
        exclude=tuple(exclude), jobs=jobs,
    )
    if csg_out:
        for file, graph in result.augmented.graphs.items():
            target = Path(csg_out) / (file + ".json")
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(graph.serialize(), encoding="utf-8")
    if entities_out:
        Path(entities_out).write_text(
            json.dumps([e.to_dict() for e in result.entities],
                       sort_keys=True, ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
    if records_out:
        from c3gen.references import serialize_records

        Path(records_out).write_text(serialize_records(result.records), encoding="utf-8")
    log.info(
        "retrieved %d snippets for %d entities (%d reference sites)",
        len(result.context.snippets), len(result.entities), len(result.records),
    )
    _emit(result.context.serialize(), out)
    _finish_manifest(manifest, manifest_path)


def _cached_index(repo_root, lang_config, exclude, jobs, digest, no_reindex):
    out_dir = Path(repo_root) / ".c3gen"
    cached = stored_digest(out_dir)
    if cached == digest or (no_reindex and cached is not None):
        if cached != digest:
            log.warning("using stale cached index (--no-reindex)")
        return load_index(out_dir)
    index = build_definition_index(repo_root, lang_config, exclude, jobs=jobs)
    write_index(index, out_dir, digest=digest)
    return index


@main.command("generate")
@click.argument("diff_file")
@_repo_opt
@_languages_opt
@_config_opt
@_exclude_opt
@_jobs_opt
@_manifest_opt
@click.option("--out", default=None, help="Write the message JSON here instead of stdout.")
@click.option("--mode", default="naive", type=click.Choice(["naive", "c3gen"]),
              show_default=True, help="Raw diff only, or diff plus retrieved context.")
@click.option("--endpoint", default=None,
              help="Chat-completion endpoint URL, or mock:echo (default).")
@click.option("--model", default=None, help="Model name sent to the backend.")
@click.option("--temperature", default=None, type=float, help="Sampling temperature.")
@click.option("--timeout", default=None, type=float, help="Request timeout (seconds).")
@click.option("--max-retries", default=None, type=int, help="Transient-failure retries.")
@click.option("--max-snippets", default=None, type=int)
@click.option("--max-total-lines", default=None, type=int)
@click.option("--char-ceiling", default=None, type=int,
              help="Reject prompts longer than this many characters.")
@_guarded
def cmd_generate(diff_file, repo_root, languages, config_file, exclude, jobs,
                 manifest_path, out, mode, endpoint, model, temperature, timeout,
                 max_retries, max_snippets, max_total_lines, char_ceiling):
    """Generate a commit message for a diff (message JSON on stdout)."""
    file_config = _load_file_config(config_file)
    lang_config = _language_config(languages, file_config)
    jobs = _setting(jobs, "JOBS", file_config, "jobs", 1)
    backend_config = BackendConfig(
        endpoint_url=_setting(endpoint, "ENDPOINT", file_config, "endpoint", "mock:echo"),
        model_name=_setting(model, "MODEL", file_config, "model", "mock-model"),
        temperature=_setting(temperature, "TEMPERATURE", file_config, "temperature", 0.0),
        timeout=_setting(timeout, "TIMEOUT", file_config, "timeout", 60.0),
        max_retries=_setting(max_retries, "MAX_RETRIES", file_config, "max_retries", 2),
    )
    max_snippets = _setting(max_snippets, "MAX_SNIPPETS", file_config,
                            "max_snippets", DEFAULT_MAX_SNIPPETS)
    max_total_lines = _setting(max_total_lines, "MAX_TOTAL_LINES", file_config,
                               "max_total_lines", DEFAULT_MAX_TOTAL_LINES)
    char_ceiling = _setting(char_ceiling, "CHAR_CEILING", file_config,
                            "char_ceiling", DEFAULT_CHAR_CEILING)
    diff_text = _read_diff(diff_file)

    manifest = RunManifest(
        command="generate",
        config={
            "mode": mode, "endpoint": backend_config.endpoint_url,
            "model": backend_config.model_name,
            "temperature": backend_config.temperature,
            "languages": sorted(lang_config.languages),
            "max_snippets": max_snippets, "max_total_lines": max_total_lines,
            "api_key_env": API_KEY_ENV,
        },
        started_at=_utc_now(),
    )
    manifest.input_digests["diff"] = _sha256_text(diff_text)

    context = None
    if mode == "c3gen":
        manifest.input_digests["repo_tree"] = tree_digest(repo_root, lang_config,
                                                          tuple(exclude))
        result = retrieve_context(
            repo_root, diff_text, lang_config,
            max_snippets=max_snippets, max_total_lines=max_total_lines,
            exclude=tuple(exclude), jobs=jobs,
        )
        context = result.context

    bundle = build_prompt(diff_text, context, char_ceiling=char_ceiling)
    message = generate_message(bundle, backend_config)
    _emit(json.dumps(message.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n", out)
    _finish_manifest(manifest, manifest_path)


@main.command("evaluate")
@click.argument("results_file")
@click.option("--out", default=None, help="Write the report JSON here instead of stdout.")
@_manifest_opt
@_guarded
def cmd_evaluate(results_file, out, manifest_path):
    """Score generated messages against references (report JSON on stdout)."""
    try:
        text = Path(results_file).read_text(encoding="utf-8")
    except OSError as exc:
        raise C3GenError(f"cannot read results file {results_file}: {exc}") from exc
    manifest = RunManifest(
        command="evaluate",
        config={"results_file": results_file},
        input_digests={"results": _sha256_text(text)},
        started_at=_utc_now(),
    )
    report = evaluate_run(read_results_jsonl(text))
    _emit(report.serialize(), out)
    _finish_manifest(manifest, manifest_path)


@main.group("corpus")
def corpus_group():
    """Build, filter, deduplicate, and split commit datasets."""


@corpus_group.command("build")
@click.option("--repo", "repo_path", required=True, help="Local git checkout to read.")
@click.option("--since", default="1970-01-01T00:00:00Z", show_default=True,
              help="Only commits at or after this timestamp.")
@click.option("--branch", default="HEAD", show_default=True)
@click.option("--out", default=None)
@_guarded
def corpus_build(repo_path, since, branch, out):
    """Read commit records from a local checkout (JSONL on stdout)."""
    records = list(read_git_history(repo_path, since=since, branch=branch))
    log.info("read %d commits from %s", len(records), repo_path)
    _emit(write_jsonl(records), out)


@corpus_group.command("filter")
@click.argument("corpus_file")
@_languages_opt
@_config_opt
@click.option("--out", default=None, help="Accepted records JSONL (default stdout).")
@click.option("--report", "report_path", default=None,
              help="Write per-record filter decisions JSONL here.")
@_guarded
def corpus_filter(corpus_file, languages, config_file, out, report_path):
    """Apply the quality criteria; accepted records to stdout."""
    file_config = _load_file_config(config_file)
    lang_config = _language_config(languages, file_config)
    records = _read_corpus(corpus_file)
    decisions = [apply_filters(r, lang_config) for r in records]
    accepted = [r for r, d in zip(records, decisions) if d.accepted]
    log.info("accepted %d of %d records", len(accepted), len(records))
    if report_path:
        Path(report_path).write_text(
            "".join(json.dumps(d.to_dict(), sort_keys=True) + "\n" for d in decisions),
            encoding="utf-8",
        )
    _emit(write_jsonl(accepted), out)


@corpus_group.command("dedup")
@click.argument("corpus_file")
@click.option("--out", default=None)
@click.option("--report", "report_path", default=None,
              help="Write per-record duplicate decisions JSONL here.")
@_guarded
def corpus_dedup(corpus_file, out, report_path):
    """Drop duplicate (message, diff) records, keeping the first of each."""
    records = _read_corpus(corpus_file)
    kept = deduplicate(records)
    log.info("kept %d of %d records", len(kept), len(records))
    if report_path:
        Path(report_path).write_text(
            "".join(
                json.dumps(d.to_dict(), sort_keys=True) + "\n"
                for d in dedup_decisions(records)
            ),
            encoding="utf-8",
        )
    _emit(write_jsonl(kept), out)


@corpus_group.command("split")
@click.argument("corpus_file")
@click.option("--test-size", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out-dir", required=True, help="Writes train.jsonl and test.jsonl here.")
@_guarded
def corpus_split(corpus_file, test_size, seed, out_dir):
    """Seeded shuffle into disjoint train/test JSONL files."""
    records = _read_corpus(corpus_file)
    train, test = split(records, seed=seed, test_size=test_size)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "train.jsonl").write_text(write_jsonl(train), encoding="utf-8")
    (out / "test.jsonl").write_text(write_jsonl(test), encoding="utf-8")
    log.info("wrote %d train / %d test records to %s", len(train), len(test), out_dir)


def _read_corpus(corpus_file: str):
    try:
        text = Path(corpus_file).read_text(encoding="utf-8")
    except OSError as exc:
        raise C3GenError(f"cannot read corpus file {corpus_file}: {exc}") from exc
    return read_jsonl(text)


if __name__ == "__main__":
    main()
