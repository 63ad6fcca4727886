"""c3gen: retrieve commit-relevant code context for a diff by static
analysis, feed it to a pluggable message generator, and evaluate the
results with objective text-similarity metrics."""

__version__ = "0.1.0"

from c3gen.context import CodeSnippet, RelevantCodeContext, assemble_context, extract_snippet
from c3gen.csg import CodeStructureGraph, build_csg
from c3gen.definitions import (
    DefinitionIndex,
    DefinitionRecord,
    lookup_enclosing_definition,
    parse_definitions,
)
from c3gen.diffs import (
    DiffSegment,
    ModifiedEntity,
    changed_line_ranges,
    extract_modified_entities,
    parse_unified_diff,
)
from c3gen.generation import BackendConfig, GeneratedMessage, PromptBundle, build_prompt, generate_message
from c3gen.indexing import build_definition_index, load_index, write_index
from c3gen.languages import LanguageConfig
from c3gen.pipeline import retrieve_context
from c3gen.references import AugmentedCsgStore, InvocationRecord, augment_csgs, scan_references

__all__ = [
    "AugmentedCsgStore",
    "BackendConfig",
    "CodeSnippet",
    "CodeStructureGraph",
    "DefinitionIndex",
    "DefinitionRecord",
    "DiffSegment",
    "GeneratedMessage",
    "LanguageConfig",
    "ModifiedEntity",
    "PromptBundle",
    "RelevantCodeContext",
    "InvocationRecord",
    "assemble_context",
    "augment_csgs",
    "build_csg",
    "build_definition_index",
    "build_prompt",
    "changed_line_ranges",
    "extract_modified_entities",
    "extract_snippet",
    "generate_message",
    "load_index",
    "lookup_enclosing_definition",
    "parse_definitions",
    "parse_unified_diff",
    "retrieve_context",
    "scan_references",
    "write_index",
    "__version__",
]
