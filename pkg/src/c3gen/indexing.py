"""Build the definition index for a repository tree and persist it.

The on-disk layout mirrors the repo under ``<out>/index/`` with one JSON
document per source file plus a top-level ``manifest.json``. Serialization
is byte-stable: sorted keys, UTF-8, trailing newline, paths with ``/``
separators sorted lexicographically.
"""

from __future__ import annotations

import fnmatch
import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from c3gen.definitions import DefinitionIndex, DefinitionRecord, parse_definitions_for_file
from c3gen.errors import RepoNotFoundError
from c3gen.languages import LanguageConfig, default_config

log = logging.getLogger(__name__)

#: Directories never indexed, regardless of exclude globs.
SKIP_DIRS = {".git", ".c3gen", "__pycache__", "node_modules"}


def iter_source_files(
    repo_root: Path,
    config: LanguageConfig,
    exclude: tuple[str, ...] = (),
) -> list[tuple[str, str]]:
    """Sorted (repo-relative path, language tag) pairs under ``repo_root``."""
    root = Path(repo_root)
    if not root.is_dir():
        raise RepoNotFoundError(f"repository root not found: {root}")
    found: list[tuple[str, str]] = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = sorted(d for d in dirnames if d not in SKIP_DIRS)
        for fname in sorted(filenames):
            rel = os.path.relpath(os.path.join(dirpath, fname), root).replace(os.sep, "/")
            tag = config.detect(rel)
            if tag is None:
                continue
            if any(fnmatch.fnmatch(rel, pat) for pat in exclude):
                continue
            found.append((rel, tag))
    found.sort()
    return found


def read_source(path: Path) -> str:
    """Read a source file as UTF-8 with lossy replacement."""
    return path.read_text(encoding="utf-8", errors="replace")


def build_definition_index(
    repo_root: str | Path,
    config: LanguageConfig | None = None,
    exclude: tuple[str, ...] = (),
    jobs: int = 1,
) -> DefinitionIndex:
    """Parse every supported file under ``repo_root`` into an index.

    Unreadable files are skipped with a warning; output is deterministic
    regardless of traversal or worker scheduling (entries sorted by path).
    """
    config = config or default_config()
    root = Path(repo_root)
    files = iter_source_files(root, config, exclude)

    def parse_one(item: tuple[str, str]) -> tuple[str, str, list[DefinitionRecord]] | None:
        rel, tag = item
        try:
            text = read_source(root / rel)
        except OSError as exc:
            log.warning("skipping unreadable file %s: %s", rel, exc)
            return None
        return rel, tag, parse_definitions_for_file(text, tag, rel)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(parse_one, files))
    else:
        results = [parse_one(item) for item in files]

    index = DefinitionIndex()
    for result in sorted(r for r in results if r is not None):
        rel, tag, records = result
        index.add_file(rel, tag, records)
    return index


def tree_digest(
    repo_root: str | Path,
    config: LanguageConfig | None = None,
    exclude: tuple[str, ...] = (),
) -> str:
    """Digest of the supported source tree: path + content hash per file."""
    config = config or default_config()
    root = Path(repo_root)
    h = hashlib.sha256()
    for rel, _tag in iter_source_files(root, config, exclude):
        h.update(rel.encode("utf-8"))
        h.update(b"\0")
        try:
            h.update(hashlib.sha256((root / rel).read_bytes()).hexdigest().encode())
        except OSError:
            h.update(b"unreadable")
        h.update(b"\n")
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def index_dir(out_dir: str | Path) -> Path:
    return Path(out_dir) / "index"


def write_index(index: DefinitionIndex, out_dir: str | Path, digest: str | None = None) -> Path:
    """Persist one JSON per indexed file plus the manifest; returns the dir."""
    base = index_dir(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    for rel in index.files():
        target = base / (rel + ".json")
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(index.serialize_file(rel), encoding="utf-8")
    manifest = {
        "files": [
            {
                "file": rel,
                "language": index.language[rel],
                "entity_count": len(index.entries[rel]),
            }
            for rel in index.files()
        ],
        "tree_digest": digest,
        "version": 1,
    }
    (base / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    return base


def load_index(out_dir: str | Path) -> DefinitionIndex:
    """Load an index previously written by :func:`write_index`."""
    base = index_dir(out_dir)
    manifest = json.loads((base / "manifest.json").read_text(encoding="utf-8"))
    index = DefinitionIndex()
    for entry in manifest["files"]:
        doc = json.loads((base / (entry["file"] + ".json")).read_text(encoding="utf-8"))
        file, tag, records = DefinitionIndex.file_from_dict(doc)
        index.add_file(file, tag, records)
    return index


def stored_digest(out_dir: str | Path) -> str | None:
    path = index_dir(out_dir) / "manifest.json"
    if not path.is_file():
        return None
    try:
        return json.loads(path.read_text(encoding="utf-8")).get("tree_digest")
    except (OSError, ValueError):
        return None


def serialize_index(index: DefinitionIndex) -> str:
    """The whole index as one deterministic JSON document (for digests)."""
    docs = [index.file_to_dict(rel) for rel in index.files()]
    return json.dumps(docs, sort_keys=True, ensure_ascii=False) + "\n"
