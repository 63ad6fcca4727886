"""Per-file code structure graphs.

Each graph has one S-node (the file), one C-node per class record, one
F-node per function record, and definition edges from each node's parent:
methods hang off their class, top-level definitions off the S-node. After
the diff stage runs, D-nodes record where modified entities are referenced;
until then ``d_nodes`` is empty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from c3gen.definitions import KIND_CLASS, DefinitionIndex, DefinitionRecord
from c3gen.errors import NotIndexedError

S_NODE_ID = "S"


@dataclass(frozen=True)
class DefNode:
    """A C-node or F-node: one definition record lifted into the graph."""

    id: str
    name: str
    kind: str  # "class" | "function"
    start_line: int
    end_line: int

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "kind": self.kind,
            "start_line": self.start_line,
            "end_line": self.end_line,
        }


@dataclass(frozen=True)
class DiffNode:
    """A D-node: one invocation record attached to matching C/F-nodes."""

    id: str
    entity_name: str
    entity_kind: str
    caller_file: str
    line: int
    reference_kind: str
    attached_to: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "entity_name": self.entity_name,
            "entity_kind": self.entity_kind,
            "caller_file": self.caller_file,
            "line": self.line,
            "reference_kind": self.reference_kind,
            "attached_to": list(self.attached_to),
        }


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    kind: str  # "defines" | "augments"

    def to_dict(self) -> dict:
        return {"src": self.src, "dst": self.dst, "kind": self.kind}


@dataclass(frozen=True)
class CodeStructureGraph:
    file: str  # the S-node
    c_nodes: tuple[DefNode, ...] = ()
    f_nodes: tuple[DefNode, ...] = ()
    d_nodes: tuple[DiffNode, ...] = ()
    edges: tuple[Edge, ...] = ()

    def def_nodes(self) -> tuple[DefNode, ...]:
        return self.c_nodes + self.f_nodes

    def with_augmentation(self, d_nodes, extra_edges) -> "CodeStructureGraph":
        return replace(
            self,
            d_nodes=self.d_nodes + tuple(d_nodes),
            edges=self.edges + tuple(extra_edges),
        )

    def to_dict(self) -> dict:
        return {
            "file": self.file,
            "s_node": self.file,
            "c_nodes": [n.to_dict() for n in self.c_nodes],
            "f_nodes": [n.to_dict() for n in self.f_nodes],
            "d_nodes": [n.to_dict() for n in self.d_nodes],
            "edges": [e.to_dict() for e in self.edges],
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def build_csg(index: DefinitionIndex, file: str) -> CodeStructureGraph:
    """Graph for one indexed file; raises when ``file`` is not in the index.

    Parent edges are resolved geometrically (innermost strictly containing
    record) so duplicate names cannot mis-wire the graph.
    """
    if file not in index.entries:
        raise NotIndexedError(f"file not indexed: {file}")
    records = index.records(file)

    c_nodes: list[DefNode] = []
    f_nodes: list[DefNode] = []
    node_ids: list[str] = []
    for record in records:
        if record.kind == KIND_CLASS:
            node = DefNode(f"C{len(c_nodes)}", record.name, record.kind,
                           record.start_line, record.end_line)
            c_nodes.append(node)
        else:
            node = DefNode(f"F{len(f_nodes)}", record.name, record.kind,
                           record.start_line, record.end_line)
            f_nodes.append(node)
        node_ids.append(node.id)

    edges = [
        Edge(_parent_node_id(records, node_ids, i), node_ids[i], "defines")
        for i in range(len(records))
    ]
    return CodeStructureGraph(
        file=file, c_nodes=tuple(c_nodes), f_nodes=tuple(f_nodes), edges=tuple(edges)
    )


def _parent_node_id(records: list[DefinitionRecord], node_ids: list[str], i: int) -> str:
    """Node id of the innermost record strictly containing record ``i``."""
    me = records[i]
    best = -1
    for j, other in enumerate(records):
        if j == i:
            continue
        if other.start_line <= me.start_line and me.end_line <= other.end_line and (
            other.start_line < me.start_line or me.end_line < other.end_line
        ):
            if best < 0 or records[best].span() > other.span():
                best = j
    return node_ids[best] if best >= 0 else S_NODE_ID


def build_csg_store(index: DefinitionIndex) -> dict[str, CodeStructureGraph]:
    """One graph per indexed file, keyed by path."""
    return {file: build_csg(index, file) for file in index.files()}
