"""Second-round repository scan: find every invocation or instantiation of
a modified entity and attach the results to the structure graphs as D-nodes.

Matching is by bare identifier name (no import or type resolution), which
the pipeline accepts as a documented source of noise. Comments and string
literals can never match because the scan works on parsed structure, not
raw text. Recursive self-references inside an entity's own definition body
are dropped by default; ``include_self_refs`` restores them.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from c3gen.csg import CodeStructureGraph, DiffNode, Edge
from c3gen.definitions import KIND_CLASS, KIND_FUNCTION
from c3gen.diffs import ModifiedEntity
from c3gen.indexing import iter_source_files, read_source
from c3gen.languages import LanguageConfig, default_config
from c3gen.parsers import find_references, parse_source

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class InvocationRecord:
    entity_name: str
    entity_kind: str  # "function" | "class"
    caller_file: str
    line: int
    reference_kind: str  # "call" | "instantiation"

    def sort_key(self):
        # (caller_file, line, entity_name) is the contract; the remaining
        # fields break ties so ordering is total and runs are byte-stable
        return (
            self.caller_file,
            self.line,
            self.entity_name,
            self.entity_kind,
            self.reference_kind,
        )

    def to_dict(self) -> dict:
        return {
            "entity_name": self.entity_name,
            "entity_kind": self.entity_kind,
            "caller_file": self.caller_file,
            "line": self.line,
            "reference_kind": self.reference_kind,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InvocationRecord":
        return cls(
            entity_name=d["entity_name"],
            entity_kind=d["entity_kind"],
            caller_file=d["caller_file"],
            line=d["line"],
            reference_kind=d["reference_kind"],
        )


@dataclass
class AugmentedCsgStore:
    """Graphs with D-nodes attached, plus records that matched no node."""

    graphs: dict[str, CodeStructureGraph] = field(default_factory=dict)
    unattached: list[InvocationRecord] = field(default_factory=list)


def scan_references(
    repo_root: str | Path,
    entities: list[ModifiedEntity],
    config: LanguageConfig | None = None,
    exclude: tuple[str, ...] = (),
    include_self_refs: bool = False,
    jobs: int = 1,
) -> list[InvocationRecord]:
    """Every call/instantiation of a modified entity across the repo.

    Results are sorted by (caller_file, line, entity_name); an empty entity
    list short-circuits to an empty result. Unparseable files are skipped
    with a warning (the per-language parsers already log them).
    """
    if not entities:
        return []
    config = config or default_config()
    root = Path(repo_root)
    function_names = {e.name for e in entities if e.kind == KIND_FUNCTION}
    class_names = {e.name for e in entities if e.kind == KIND_CLASS}

    def scan_one(item: tuple[str, str]) -> list[InvocationRecord]:
        rel, tag = item
        try:
            text = read_source(root / rel)
        except OSError as exc:
            log.warning("skipping unreadable file %s: %s", rel, exc)
            return []
        file_records = parse_source(text, tag, rel)
        hits = find_references(
            text, tag, rel, file_records, function_names, class_names, include_self_refs
        )
        return [
            InvocationRecord(name, kind, rel, line, ref_kind)
            for name, kind, line, ref_kind in hits
        ]

    files = iter_source_files(root, config, exclude)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(scan_one, files))
    else:
        chunks = [scan_one(item) for item in files]

    # two references to one entity on one line carry the same information
    records = sorted(
        {record for chunk in chunks for record in chunk},
        key=InvocationRecord.sort_key,
    )
    return records


def augment_csgs(
    store: dict[str, CodeStructureGraph],
    records: list[InvocationRecord],
    entities: list[ModifiedEntity],
) -> AugmentedCsgStore:
    """Attach one D-node per (graph, record) to every matching C/F-node.

    A record whose (name, kind) is defined in several files gains a D-node
    in each of those graphs. Records matching no node in any graph land in
    the ``unattached`` list. S/C/F nodes and definition edges are never
    touched.
    """
    entity_keys = {(e.name, e.kind) for e in entities}
    out = AugmentedCsgStore()
    new_d: dict[str, list[DiffNode]] = {f: [] for f in store}
    new_edges: dict[str, list[Edge]] = {f: [] for f in store}

    for record in records:
        key = (record.entity_name, record.entity_kind)
        if key not in entity_keys:
            log.warning("record %s not in the modified entity list; kept unattached", record)
            out.unattached.append(record)
            continue
        attached_anywhere = False
        for file in sorted(store):
            graph = store[file]
            matches = [
                node.id
                for node in graph.def_nodes()
                if node.name == record.entity_name and node.kind == record.entity_kind
            ]
            if not matches:
                continue
            d_id = f"D{len(new_d[file])}"
            new_d[file].append(
                DiffNode(
                    id=d_id,
                    entity_name=record.entity_name,
                    entity_kind=record.entity_kind,
                    caller_file=record.caller_file,
                    line=record.line,
                    reference_kind=record.reference_kind,
                    attached_to=tuple(matches),
                )
            )
            new_edges[file].extend(Edge(m, d_id, "augments") for m in matches)
            attached_anywhere = True
        if not attached_anywhere:
            out.unattached.append(record)

    for file, graph in store.items():
        if new_d[file]:
            out.graphs[file] = graph.with_augmentation(new_d[file], new_edges[file])
        else:
            out.graphs[file] = graph
    return out


def serialize_records(records: list[InvocationRecord]) -> str:
    """JSONL, one record per line, already in sorted order."""
    import json

    return "".join(
        json.dumps(r.to_dict(), sort_keys=True, ensure_ascii=False) + "\n" for r in records
    )
