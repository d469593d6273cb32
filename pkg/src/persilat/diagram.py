"""Finite commutative diagrams of vector spaces and linear maps.

A :class:`Diagram` is a connected DAG whose nodes carry dimensions and whose
edges carry matrices over F_p.  Meets and joins of pairs of nodes are
realised concretely as pullbacks and pushouts over their nearest common
targets and sources.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import networkx as nx
import numpy as np

from . import linalg
from .errors import (CycleDetected, DimensionMismatch, DisconnectedDiagram, InputError,
                     MutualReachabilityWithoutIso, NoCommonSource, NoCommonTarget,
                     SchemaError, UnknownElement)
from .lattice import DEFAULT_ELEMENT_BUDGET, FinitePoset, Lattice, dm_completion
from .linalg import PrimeFieldMatrix, QuotientRealization, SubspaceRealization


@dataclass(frozen=True)
class Node:
    id: str
    dim: int
    label: str = ""


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    matrix: PrimeFieldMatrix


@dataclass(frozen=True, eq=False)
class Diagram:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    prime: int = 2
    shape: str | None = None
    shape_params: dict = field(default_factory=dict)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        if not linalg.is_prime(self.prime):
            raise InputError(f"{self.prime} is not a prime")
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise SchemaError("duplicate node id")
        if len({e.id for e in self.edges}) != len(self.edges):
            raise SchemaError("duplicate edge id")
        dims = {n.id: n.dim for n in self.nodes}
        for n in self.nodes:
            if not isinstance(n.dim, int) or n.dim < 0:
                raise SchemaError("node dimension must be a non-negative integer", where=n.id)
        for e in self.edges:
            for end in (e.source, e.target):
                if end not in dims:
                    raise SchemaError(f"edge refers to unknown node {end!r}", where=e.id)
            if e.matrix.prime != self.prime:
                raise SchemaError(f"matrix over F_{e.matrix.prime} in a diagram over F_{self.prime}",
                                  where=e.id)
            if e.matrix.shape != (dims[e.target], dims[e.source]):
                raise DimensionMismatch(
                    f"matrix shape {e.matrix.shape} but {e.source}->{e.target} needs "
                    f"{(dims[e.target], dims[e.source])}", where=e.id)
        if self.check:
            g = self.graph
            if not nx.is_directed_acyclic_graph(g):
                cycle = nx.find_cycle(g)
                raise CycleDetected("diagram contains a directed cycle",
                                    where=" -> ".join(str(c[0]) for c in cycle))
            if len(self.nodes) and not nx.is_weakly_connected(g):
                comps = sorted(sorted(c) for c in nx.weakly_connected_components(g))
                raise DisconnectedDiagram("diagram is not connected", where=str(comps[1][0]))

    @property
    def graph(self) -> nx.MultiDiGraph:
        cached = self.__dict__.get("_graph")
        if cached is None:
            cached = nx.MultiDiGraph()
            for n in self.nodes:
                cached.add_node(n.id, dim=n.dim)
            for e in self.edges:
                cached.add_edge(e.source, e.target, key=e.id, matrix=e.matrix)
            object.__setattr__(self, "_graph", cached)
        return cached

    @property
    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def dim(self, node: str) -> int:
        try:
            return self.graph.nodes[node]["dim"]
        except KeyError:
            raise UnknownElement(f"unknown node {node!r}") from None

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise UnknownElement(f"unknown edge {edge_id!r}")

    def reachable(self, u: str, v: str) -> bool:
        return v in self._composites()[u]

    def composite(self, u: str, v: str) -> PrimeFieldMatrix:
        """Matrix of the composite map u -> v (identity when u == v)."""
        self.dim(u), self.dim(v)
        try:
            return self._composites()[u][v]
        except KeyError:
            raise InputError(f"no path from {u} to {v}") from None

    def _composites(self) -> dict[str, dict[str, PrimeFieldMatrix]]:
        cached = self.__dict__.get("_comp")
        if cached is not None:
            return cached
        order = list(nx.lexicographical_topological_sort(self.graph))
        pos = {x: i for i, x in enumerate(order)}
        out_edges = sorted(self.edges, key=lambda e: (pos[e.source], e.id))
        comp: dict[str, dict[str, PrimeFieldMatrix]] = {}
        for u in order:
            row = {u: PrimeFieldMatrix.identity(self.dim(u), self.prime)}
            for e in out_edges:
                if e.source in row and e.target not in row:
                    row[e.target] = e.matrix @ row[e.source]
            comp[u] = row
        object.__setattr__(self, "_comp", comp)
        return comp

    def paths(self, u: str, v: str) -> list[list[str]]:
        """All directed paths from u to v as edge-id lists (``[]`` when u == v)."""
        if u == v:
            return [[]]
        return sorted([k for (_, _, k) in p]
                      for p in nx.all_simple_edge_paths(self.graph, u, v))

    def path_matrix(self, path: list[str], start: str) -> PrimeFieldMatrix:
        m = PrimeFieldMatrix.identity(self.dim(start), self.prime)
        for eid in path:
            m = self.edge(eid).matrix @ m
        return m

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"prime": self.prime}
        if self.shape:
            doc["shape"] = self.shape
            if self.shape_params:
                doc["shape_params"] = dict(self.shape_params)
        doc["nodes"] = [{"id": n.id, "dim": n.dim, "label": n.label} for n in self.nodes]
        doc["edges"] = [{"id": e.id, "source": e.source, "target": e.target,
                         "matrix": e.matrix.tolist()} for e in self.edges]
        return doc


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise SchemaError(f"missing field {key!r}", where=where)
    if not isinstance(doc[key], kind):
        raise SchemaError(f"field {key!r} has the wrong type", where=where)
    return doc[key]


def load_diagram(document: str | bytes | dict | Path) -> Diagram:
    """Parse and validate a diagram from JSON text, a parsed dict or a file path."""
    if isinstance(document, Path):
        document = document.read_text()
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise SchemaError("diagram document must be a JSON object")
    prime = document.get("prime", 2)
    if not isinstance(prime, int):
        raise SchemaError("field 'prime' must be an integer")
    nodes = []
    for i, raw in enumerate(_require(document, "nodes", list, "document")):
        where = f"nodes[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError("node must be an object", where=where)
        nid = _require(raw, "id", str, where)
        dim = _require(raw, "dim", int, nid)
        nodes.append(Node(nid, dim, str(raw.get("label", ""))))
    dims = {n.id: n.dim for n in nodes}
    edges = []
    for i, raw in enumerate(document.get("edges", [])):
        where = f"edges[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError("edge must be an object", where=where)
        eid = str(raw.get("id", f"e{i}"))
        src = _require(raw, "source", str, eid)
        tgt = _require(raw, "target", str, eid)
        rows = _require(raw, "matrix", list, eid)
        if src not in dims or tgt not in dims:
            raise SchemaError("edge refers to unknown node", where=eid)
        try:
            arr = np.array(rows, dtype=np.int64)
        except (ValueError, TypeError):
            raise SchemaError("matrix is not a rectangular integer array", where=eid) from None
        if arr.size == 0 and dims[tgt] * dims[src] == 0:
            arr = np.zeros((dims[tgt], dims[src]), dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= prime):
            raise SchemaError(f"matrix entries must be reduced mod {prime}", where=eid)
        if arr.shape != (dims[tgt], dims[src]):
            raise DimensionMismatch(f"matrix shape {arr.shape} but {src}->{tgt} needs "
                                    f"{(dims[tgt], dims[src])}", where=eid)
        edges.append(Edge(eid, src, tgt, PrimeFieldMatrix(arr, prime)))
    return Diagram(tuple(nodes), tuple(edges), prime, document.get("shape"),
                   dict(document.get("shape_params", {})))


# --------------------------------------------------------------------------
# commutativity and order


@dataclass(frozen=True)
class CommutativityViolation:
    source: str
    target: str
    path_a: tuple[str, ...]
    path_b: tuple[str, ...]


def check_commutativity(d: Diagram) -> list[CommutativityViolation]:
    """Every pair of parallel paths whose composite matrices differ."""
    report = []
    for u in d.node_ids:
        for v in d.node_ids:
            if u == v or not d.reachable(u, v):
                continue
            paths = d.paths(u, v)
            mats = [d.path_matrix(p, u) for p in paths]
            for i, j in itertools.combinations(range(len(paths)), 2):
                if mats[i] != mats[j]:
                    report.append(CommutativityViolation(u, v, tuple(paths[i]), tuple(paths[j])))
    return report


@dataclass(frozen=True, eq=False)
class DiagramPoset(FinitePoset):
    classes: tuple[tuple[str, ...], ...] = ()

    def class_of(self, node: str) -> int:
        for i, c in enumerate(self.classes):
            if node in c:
                return i
        raise UnknownElement(f"unknown node {node!r}")


def _is_iso(m: PrimeFieldMatrix) -> bool:
    return m.rows == m.cols and linalg.rank(m) == m.rows


def poset_of(d: Diagram) -> DiagramPoset:
    """Reachability order; mutually reachable nodes merge only through isomorphisms."""
    g = nx.DiGraph()
    g.add_nodes_from(d.node_ids)
    g.add_edges_from((e.source, e.target) for e in d.edges)
    classes = []
    for comp in nx.strongly_connected_components(g):
        members = sorted(comp, key=d.node_ids.index)
        for u, v in itertools.combinations(members, 2):
            there = nx.shortest_path(g, u, v)
            back = nx.shortest_path(g, v, u)
            for path in (there, back):
                m = PrimeFieldMatrix.identity(d.dim(path[0]), d.prime)
                for a, b in zip(path, path[1:]):
                    e = min((e for e in d.edges if e.source == a and e.target == b),
                            key=lambda e: e.id)
                    m = e.matrix @ m
                if not _is_iso(m):
                    raise MutualReachabilityWithoutIso(
                        "mutually reachable nodes without an isomorphism", where=f"{u}, {v}")
        classes.append(tuple(members))
    classes.sort(key=lambda c: d.node_ids.index(c[0]))
    cls_of = {x: i for i, c in enumerate(classes) for x in c}
    reach = nx.transitive_closure(g, reflexive=True)
    n = len(classes)
    leq = np.zeros((n, n), dtype=bool)
    for u, v in reach.edges:
        leq[cls_of[u], cls_of[v]] = True
    ids = tuple("=".join(c) for c in classes)
    return DiagramPoset(ids, leq, tuple(classes))


def complete(d: Diagram, element_budget: int = DEFAULT_ELEMENT_BUDGET,
             saturate_limits: bool = True) -> Lattice:
    """The persistence lattice (order skeleton) of a diagram."""
    return dm_completion(poset_of(d), saturate_limits=saturate_limits,
                         element_budget=element_budget)


# --------------------------------------------------------------------------
# concrete meets and joins


def common_targets(d: Diagram, x: str, y: str) -> list[str]:
    return [z for z in d.node_ids if d.reachable(x, z) and d.reachable(y, z)]


def common_sources(d: Diagram, x: str, y: str) -> list[str]:
    return [z for z in d.node_ids if d.reachable(z, x) and d.reachable(z, y)]


def minimal_common_targets(d: Diagram, x: str, y: str) -> list[str]:
    zs = common_targets(d, x, y)
    return [z for z in zs if not any(w != z and d.reachable(w, z) for w in zs)]


def maximal_common_sources(d: Diagram, x: str, y: str) -> list[str]:
    zs = common_sources(d, x, y)
    return [z for z in zs if not any(w != z and d.reachable(z, w) for w in zs)]


def _meet_over(d: Diagram, x: str, y: str, targets: list[str]) -> SubspaceRealization:
    if not targets:
        raise NoCommonTarget(f"{x} and {y} have no common target")
    blocks = [linalg.hstack([d.composite(x, z), -d.composite(y, z)]) for z in targets]
    return linalg.subspace_from_constraints(linalg.vstack(blocks),
                                            [(x, d.dim(x)), (y, d.dim(y))])


def _join_over(d: Diagram, x: str, y: str, sources: list[str]) -> QuotientRealization:
    if not sources:
        raise NoCommonSource(f"{x} and {y} have no common source")
    blocks = [linalg.vstack([d.composite(z, x), -d.composite(z, y)]) for z in sources]
    return linalg.quotient_from_relations(linalg.hstack(blocks),
                                          [(x, d.dim(x)), (y, d.dim(y))])


def meet_realize(d: Diagram, x: str, y: str) -> SubspaceRealization:
    """X∧Y inside X⊕Y: intersection of the pullbacks over minimal common targets."""
    d.dim(x), d.dim(y)
    return _meet_over(d, x, y, minimal_common_targets(d, x, y))


def meet_realize_all_targets(d: Diagram, x: str, y: str) -> SubspaceRealization:
    """Same subspace, intersecting over every common target (brute-force check)."""
    return _meet_over(d, x, y, common_targets(d, x, y))


def join_realize(d: Diagram, x: str, y: str) -> QuotientRealization:
    """X∨Y as a quotient of X⊕Y by the images of maximal common sources."""
    d.dim(x), d.dim(y)
    return _join_over(d, x, y, maximal_common_sources(d, x, y))


def join_realize_all_sources(d: Diagram, x: str, y: str) -> QuotientRealization:
    return _join_over(d, x, y, common_sources(d, x, y))


def persistence_map(d: Diagram, x: str, y: str, leg: str = "x") -> PrimeFieldMatrix:
    """The map X∧Y -> X∨Y through the X leg (or the Y leg with ``leg='y'``)."""
    m = meet_realize(d, x, y)
    j = join_realize(d, x, y)
    if leg == "x":
        proj, inj = m.projections[0][1], j.injections[0][1]
    else:
        proj, inj = m.projections[1][1], j.injections[1][1]
    return inj @ proj


def persistence_rank(d: Diagram, x: str, y: str) -> int:
    """Rank of im(X∧Y -> X∨Y)."""
    return linalg.rank(persistence_map(d, x, y))


def chain_diagram(matrices: list[PrimeFieldMatrix], dims: list[int] | None = None,
                  prime: int = 2, prefix: str = "X", labels: list[str] | None = None) -> Diagram:
    """X0 -> X1 -> ... with the given consecutive maps."""
    if dims is None:
        dims = [matrices[0].cols] + [m.rows for m in matrices] if matrices else [0]
    nodes = tuple(Node(f"{prefix}{i}", d, labels[i] if labels else "") for i, d in enumerate(dims))
    edges = tuple(Edge(f"e{i}{i + 1}" if len(dims) <= 10 else f"e{i}_{i + 1}",
                       f"{prefix}{i}", f"{prefix}{i + 1}", m) for i, m in enumerate(matrices))
    return Diagram(nodes, edges, prime, "chain", {"n": len(dims)})
