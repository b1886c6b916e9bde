"""Graph persistence: in-memory adjacency with an append-only change
log on disk, rebuilt on load.

Single-writer, multi-reader: all mutations funnel through one lock;
reads never mutate. An export routine emits a nodes/edges bulk format
for external graph databases (see docs/graph-formats.md).
"""

from __future__ import annotations

import csv
import json
import threading
from collections import defaultdict
from pathlib import Path

from ..errors import UnknownIdError, ValidationError
from ..similarity import canonicalize, shingles
from .model import EdgeKind, GraphEdge, GraphNode, NodeKind, check_edge_kinds


class GraphStore:
    def __init__(self, log_path: str | Path | None = None):
        self.nodes: dict[str, GraphNode] = {}
        self.edges: list[GraphEdge] = []
        self._edge_keys: set[tuple[str, str, str]] = set()
        self._out: dict[str, dict[EdgeKind, list[str]]] = defaultdict(lambda: defaultdict(list))
        # kind -> casefolded name -> node id (tier-1 exact-match index)
        self._name_index: dict[NodeKind, dict[str, str]] = defaultdict(dict)
        # node id -> shingle sets of all its names (tier-2 candidates)
        self._shingle_cache: dict[str, list[set[str]]] = {}
        self._creation_order: dict[str, int] = {}
        self._lock = threading.Lock()
        self._log_path = Path(log_path) if log_path else None
        if self._log_path and self._log_path.exists():
            self._load()

    # -- persistence ---------------------------------------------------

    def _append_log(self, record: dict) -> None:
        if self._log_path is None:
            return
        with open(self._log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def _load(self) -> None:
        log_path = self._log_path
        self._log_path = None  # replaying must not re-append
        try:
            with open(log_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    record = json.loads(line)
                    op = record.pop("op")
                    if op == "add-node":
                        self.add_node(
                            GraphNode(
                                id=record["id"],
                                kind=NodeKind(record["kind"]),
                                canonical_label=record["canonical_label"],
                                aliases=set(record.get("aliases", [])),
                                concept=record.get("concept"),
                            )
                        )
                    elif op == "add-alias":
                        self.add_alias(record["id"], record["alias"])
                    elif op == "add-edge":
                        self.add_edge(EdgeKind(record["kind"]), record["src"], record["dst"])
        finally:
            self._log_path = log_path

    # -- mutations (single writer) --------------------------------------

    def add_node(self, node: GraphNode) -> bool:
        """Insert a node; returns False when the id already exists."""
        node.validate()
        with self._lock:
            if node.id in self.nodes:
                return False
            self.nodes[node.id] = node
            self._creation_order[node.id] = len(self._creation_order)
            for name in node.names():
                self._name_index[node.kind].setdefault(name.casefold(), node.id)
            self._shingle_cache[node.id] = [shingles(name) for name in node.names()]
        self._append_log({"op": "add-node", **node.to_dict()})
        return True

    def add_alias(self, node_id: str, alias: str) -> bool:
        node = self.get_node(node_id)
        with self._lock:
            if alias == node.canonical_label or alias in node.aliases:
                return False
            node.aliases.add(alias)
            self._name_index[node.kind].setdefault(alias.casefold(), node.id)
            self._shingle_cache[node.id].append(shingles(alias))
        self._append_log({"op": "add-alias", "id": node_id, "alias": alias})
        return True

    def add_edge(self, kind: EdgeKind, src: str, dst: str) -> bool:
        """Insert an edge; returns False for duplicates, raises for
        unknown endpoints, self-loops and kind violations."""
        if src == dst:
            raise ValidationError(f"self-loop rejected on node {src}")
        src_node = self.get_node(src)
        dst_node = self.get_node(dst)
        check_edge_kinds(kind, src_node.kind, dst_node.kind)
        key = (kind.value, src, dst)
        with self._lock:
            if key in self._edge_keys:
                return False
            self._edge_keys.add(key)
            self.edges.append(GraphEdge(kind=kind, src=src, dst=dst))
            self._out[src][kind].append(dst)
        self._append_log({"op": "add-edge", "kind": kind.value, "src": src, "dst": dst})
        return True

    # -- queries ---------------------------------------------------------

    def get_node(self, node_id: str) -> GraphNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownIdError(node_id) from None

    def find_exact(self, kind: NodeKind, label: str) -> GraphNode | None:
        """Tier-1 lookup: case-insensitive match on canonical labels and
        aliases of same-kind nodes."""
        node_id = self._name_index[kind].get(label.casefold())
        if node_id is None:
            # Whitespace-normalized variant of the same name.
            node_id = self._name_index[kind].get(canonicalize(label))
        return self.nodes[node_id] if node_id else None

    def candidates(self, kind: NodeKind) -> list[GraphNode]:
        """Same-kind nodes in creation order (earliest first, which is
        also the tie-break order for similarity merges)."""
        nodes = [n for n in self.nodes.values() if n.kind is kind]
        nodes.sort(key=lambda n: self._creation_order[n.id])
        return nodes

    def name_shingles(self, node_id: str) -> list[set[str]]:
        return self._shingle_cache[node_id]

    def out_edges(self, node_id: str, kind: EdgeKind) -> list[str]:
        return list(self._out.get(node_id, {}).get(kind, []))

    def reachable_tools(self, entry: str) -> set[str]:
        """All nodes reachable from ``entry`` over directed CHAINS_INTO
        edges, entry excluded; terminates on cycles."""
        self.get_node(entry)
        seen: set[str] = set()
        frontier = [entry]
        while frontier:
            current = frontier.pop()
            for nxt in self._out.get(current, {}).get(EdgeKind.CHAINS_INTO, []):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        seen.discard(entry)
        return seen

    # -- export -----------------------------------------------------------

    def export(self, nodes_path: str | Path, edges_path: str | Path) -> None:
        """Property-graph bulk files: one CSV of nodes, one of edges."""
        with open(nodes_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["id", "kind", "canonical_label", "aliases", "concept"])
            for node in self.nodes.values():
                writer.writerow(
                    [node.id, node.kind.value, node.canonical_label, "|".join(sorted(node.aliases)), node.concept or ""]
                )
        with open(edges_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["kind", "src", "dst"])
            for edge in self.edges:
                writer.writerow([edge.kind.value, edge.src, edge.dst])
