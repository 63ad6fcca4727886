"""End-to-end composition: diff in, relevant code context out.

Ties the stages together (index the tree, partition the diff, extract the
modified entities, scan for their references, augment the structure
graphs, extract and merge snippets) so the CLI and tests share one path.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from c3gen.context import (
    DEFAULT_MAX_SNIPPETS,
    DEFAULT_MAX_TOTAL_LINES,
    RelevantCodeContext,
    extract_context,
)
from c3gen.csg import build_csg_store
from c3gen.definitions import DefinitionIndex
from c3gen.diffs import ModifiedEntity, extract_modified_entities, parse_unified_diff
from c3gen.indexing import build_definition_index
from c3gen.languages import LanguageConfig, default_config
from c3gen.references import AugmentedCsgStore, InvocationRecord, augment_csgs, scan_references


@dataclass
class RetrievalResult:
    entities: list[ModifiedEntity]
    records: list[InvocationRecord]
    context: RelevantCodeContext
    augmented: AugmentedCsgStore
    index: DefinitionIndex


def retrieve_context(
    repo_root: str | Path,
    diff_text: str,
    config: LanguageConfig | None = None,
    index: DefinitionIndex | None = None,
    old_index: DefinitionIndex | None = None,
    max_snippets: int = DEFAULT_MAX_SNIPPETS,
    max_total_lines: int = DEFAULT_MAX_TOTAL_LINES,
    attribute: str = "innermost",
    include_self_refs: bool = False,
    exclude_entity_body: bool = False,
    exclude: tuple[str, ...] = (),
    jobs: int = 1,
) -> RetrievalResult:
    """Run the full retrieval pipeline for one diff against one checkout."""
    config = config or default_config()
    if index is None:
        index = build_definition_index(repo_root, config, exclude=exclude, jobs=jobs)

    segments = parse_unified_diff(diff_text)
    entities = extract_modified_entities(segments, index, old_index, attribute=attribute)
    records = scan_references(
        repo_root, entities, config,
        exclude=exclude, include_self_refs=include_self_refs, jobs=jobs,
    )
    store = build_csg_store(index)
    augmented = augment_csgs(store, records, entities)
    entity_bodies = {(e.name, e.kind) for e in entities} if exclude_entity_body else None
    context = extract_context(
        records, index, repo_root, max_snippets, max_total_lines,
        exclude_entity_bodies=entity_bodies,
    )
    return RetrievalResult(
        entities=entities,
        records=records,
        context=context,
        augmented=augmented,
        index=index,
    )
