"""Dynkin trees: {3,4,6}-edge-labelled trees, edges labelled 4 or 6 carry
an orientation.

Canonical codes come from centre-rooted AHU encoding with edge decorations
(label plus orientation relative to the traversal direction), so equal
codes characterize labelled, orientation-aware isomorphism.  Trees
correspond to two-spherical generalized Cartan matrices through the fixed
arrow convention: a directed edge i -> j carries (a_ij, a_ji) = (-1, -m)
with m = 2 for label 4 and m = 3 for label 6.

Foundations extracted from a twin building record, per edge of the Coxeter
graph, the rank-2 residue type data at a base chamber; for split residues
over one field both panels have equal size, so an orientation is only
recorded when the model supplies it as metadata.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from twinbuild.buildings import Chamber, TwinBuildingModel
from twinbuild.kacmoody import GCM, gcm


class NotATree(Exception):
    """The underlying graph is not a tree on at least two vertices."""


class TooSmall(Exception):
    """Enumeration needs at least two vertices (no isolated vertices)."""


class NotTwoSpherical(Exception):
    """Some rank-2 subsystem is of infinite type."""


class NotThick(Exception):
    """Foundation extraction needs a thick model."""


VALID_LABELS = (3, 4, 6)


@dataclass(frozen=True)
class Edge:
    """Tree edge; for labels 4 and 6 the vertex order (u, v) is the arrow
    u -> v, for label 3 the order carries no meaning."""

    u: int
    v: int
    label: int

    def normalized(self) -> "Edge":
        if self.label == 3 and self.v < self.u:
            return Edge(self.v, self.u, 3)
        return self

    def ends(self) -> frozenset[int]:
        return frozenset((self.u, self.v))


@dataclass(frozen=True)
class DynkinTree:
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        verts = set(self.vertices)
        if len(verts) < 2:
            raise NotATree("need at least two vertices")
        if len(self.edges) != len(verts) - 1:
            raise NotATree("edge count does not match a tree")
        seen = {self.vertices[0]}
        frontier = [self.vertices[0]]
        adj = self.adjacency()
        while frontier:
            x = frontier.pop()
            for y, _ in adj[x]:
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        if seen != verts:
            raise NotATree("graph is not connected")
        for e in self.edges:
            if e.label not in VALID_LABELS:
                raise NotATree(f"label {e.label} is not in {VALID_LABELS}")
            if e.u == e.v or e.u not in verts or e.v not in verts:
                raise NotATree("bad edge endpoints")

    def adjacency(self) -> dict[int, list[tuple[int, Edge]]]:
        adj: dict[int, list[tuple[int, Edge]]] = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.u].append((e.v, e))
            adj[e.v].append((e.u, e))
        return adj

    def relabel(self, mapping: dict[int, int]) -> "DynkinTree":
        return DynkinTree(
            tuple(sorted(mapping[v] for v in self.vertices)),
            tuple(
                Edge(mapping[e.u], mapping[e.v], e.label).normalized()
                for e in self.edges
            ),
        )


def tree(vertices: Iterable[int], edges: Iterable[tuple]) -> DynkinTree:
    """Edges are (u, v, label); for labels 4 and 6 the pair is the arrow."""
    return DynkinTree(
        tuple(sorted(set(vertices))),
        tuple(Edge(u, v, label).normalized() for u, v, label in edges),
    )


# ---------------------------------------------------------------------------
# canonical codes


def _centers(t: DynkinTree) -> list[int]:
    adj = t.adjacency()
    degree = {v: len(adj[v]) for v in t.vertices}
    leaves = [v for v in t.vertices if degree[v] <= 1]
    removed = len(leaves)
    while removed < len(t.vertices):
        nxt = []
        for leaf in leaves:
            degree[leaf] = 0
            for other, _ in adj[leaf]:
                if degree[other] > 0:
                    degree[other] -= 1
                    if degree[other] == 1:
                        nxt.append(other)
        removed += len(nxt)
        leaves = nxt
    return leaves if leaves else [t.vertices[0]]


def _edge_decoration(edge: Edge, parent: int, child: int) -> bytes:
    """Label byte plus the arrow seen from the traversal direction:
    0 none, 1 pointing down (parent to child), 2 pointing up."""
    if edge.label == 3:
        orient = 0
    elif (edge.u, edge.v) == (parent, child):
        orient = 1
    else:
        orient = 2
    return bytes((edge.label, orient))


def _rooted_code(t: DynkinTree, root: int, parent: int,
                 adj: dict[int, list[tuple[int, Edge]]]) -> bytes:
    items = []
    for child, edge in adj[root]:
        if child == parent:
            continue
        items.append(
            _edge_decoration(edge, root, child) + _rooted_code(t, child, root, adj)
        )
    items.sort()
    return b"(" + b"".join(items) + b")"


def canonical_code(t: DynkinTree) -> bytes:
    """Isomorphism-complete code: minimum of the centre-rooted AHU codes."""
    adj = t.adjacency()
    return min(_rooted_code(t, c, -1, adj) for c in _centers(t))


def code_hex(t: DynkinTree) -> str:
    return canonical_code(t).hex()


def isomorphic(t1: DynkinTree, t2: DynkinTree) -> bool:
    return canonical_code(t1) == canonical_code(t2)


def brute_force_isomorphic(t1: DynkinTree, t2: DynkinTree) -> bool:
    """Independent oracle: search all vertex bijections."""
    if len(t1.vertices) != len(t2.vertices):
        return False

    def edge_set(t):
        out = set()
        for e in t.edges:
            if e.label == 3:
                out.add((frozenset((e.u, e.v)), 3))
            else:
                out.add(((e.u, e.v), e.label))
        return out

    target = edge_set(t2)
    for perm in itertools.permutations(t2.vertices):
        mapping = dict(zip(t1.vertices, perm))
        image = set()
        for e in t1.edges:
            if e.label == 3:
                image.add((frozenset((mapping[e.u], mapping[e.v])), 3))
            else:
                image.add(((mapping[e.u], mapping[e.v]), e.label))
        if image == target:
            return True
    return False


# ---------------------------------------------------------------------------
# enumeration


def _labelled_trees(n: int) -> list[list[tuple[int, int]]]:
    """All trees on vertices 0..n-1, by Pruefer decoding."""
    import heapq

    if n == 2:
        return [[(0, 1)]]
    out = []
    for seq in itertools.product(range(n), repeat=n - 2):
        degree = [1] * n
        for x in seq:
            degree[x] += 1
        heap = [v for v in range(n) if degree[v] == 1]
        heapq.heapify(heap)
        edges = []
        for x in seq:
            leaf = heapq.heappop(heap)
            edges.append((leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
            if degree[x] == 1:
                heapq.heappush(heap, x)
        edges.append((heapq.heappop(heap), heapq.heappop(heap)))
        out.append(edges)
    return out


def enumerate_trees(n: int) -> list[DynkinTree]:
    """All isomorphism classes of Dynkin trees on n vertices, one canonical
    representative each, sorted by code."""
    if n < 2:
        raise TooSmall("Dynkin trees have at least two vertices")
    decorations = [(3, False), (4, False), (4, True), (6, False), (6, True)]
    seen: dict[bytes, DynkinTree] = {}
    for base_edges in _labelled_trees(n):
        for combo in itertools.product(decorations, repeat=len(base_edges)):
            edges = []
            for (u, v), (label, flip) in zip(base_edges, combo):
                a, b = (v, u) if flip else (u, v)
                edges.append((a, b, label))
            t = tree(range(n), edges)
            code = canonical_code(t)
            if code not in seen:
                seen[code] = t
    return [seen[code] for code in sorted(seen)]


def tree_to_json(t: DynkinTree) -> dict:
    """{vertices, edges: [{u, v, label, arrow?}]} with the arrow present
    exactly on 4- and 6-labelled edges."""
    edges = []
    for e in t.edges:
        entry = {"u": e.u, "v": e.v, "label": e.label}
        if e.label != 3:
            entry["arrow"] = [e.u, e.v]
        edges.append(entry)
    return {"vertices": list(t.vertices), "edges": edges}


def tree_from_json(doc: dict) -> DynkinTree:
    edges = []
    for e in doc["edges"]:
        if e["label"] != 3 and "arrow" in e:
            u, v = e["arrow"]
        else:
            u, v = e["u"], e["v"]
        edges.append((u, v, e["label"]))
    return tree(doc["vertices"], edges)


# ---------------------------------------------------------------------------
# correspondence with generalized Cartan matrices


def gcm_of_dynkin(t: DynkinTree) -> GCM:
    """Label 3 gives the symmetric pair (-1,-1); an arrow i -> j with label
    4 or 6 gives (a_ij, a_ji) = (-1,-2) or (-1,-3)."""
    index = {v: k for k, v in enumerate(t.vertices)}
    n = len(t.vertices)
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for e in t.edges:
        i, j = index[e.u], index[e.v]
        if e.label == 3:
            a[i][j] = a[j][i] = -1
        else:
            m = 2 if e.label == 4 else 3
            a[i][j] = -1
            a[j][i] = -m
    return gcm(a)


def dynkin_of_gcm(g: GCM) -> DynkinTree:
    """Inverse direction; requires a two-spherical matrix whose diagram is
    a tree."""
    n = g.rank
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if g.a[i][j] == 0:
                continue
            product = g.a[i][j] * g.a[j][i]
            if product >= 4:
                raise NotTwoSpherical(
                    f"entries ({g.a[i][j]},{g.a[j][i]}) give an infinite bond"
                )
            if product == 1:
                edges.append((i, j, 3))
            else:
                label = 4 if product == 2 else 6
                if g.a[i][j] == -1:
                    edges.append((i, j, label))
                else:
                    edges.append((j, i, label))
    return tree(range(n), edges)  # tree() validates the shape


# ---------------------------------------------------------------------------
# foundations


@dataclass(frozen=True)
class EdgeResidueType:
    """Type data of one rank-2 residue at the base chamber."""

    pair: tuple[int, int]
    bond: int
    panel_sizes: tuple[int, int]
    residue_size: int
    orientation: Optional[tuple[int, int]] = None


@dataclass(frozen=True)
class FoundationDescriptor:
    """List of rank-2 residue types at a base chamber; for split
    foundations of tree type this list determines the foundation."""

    base: str
    edges: tuple[EdgeResidueType, ...]

    def signature(self) -> tuple:
        """Base-point-free invariant: the multiset of edge types."""
        return tuple(
            sorted(
                (e.bond, tuple(sorted(e.panel_sizes)), e.residue_size,
                 e.orientation)
                for e in self.edges
            )
        )


def collapse_foundation(model: TwinBuildingModel, c: Chamber) -> FoundationDescriptor:
    """Extract the rank-2 residue data of a thick, two-spherical model
    along a base chamber.

    Panel sizes alone cannot see the orientation of a 4- or 6-labelled
    edge (both panels of a split residue over one field have equal size);
    an orientation is recorded only when the model carries it as metadata
    in an ``edge_orientations`` attribute.
    """
    sysm = model.system
    from twinbuild.coxeter import INFINITE_BOND

    for i, j, bond in sysm.all_bonds():
        if bond == INFINITE_BOND:
            raise NotTwoSpherical(f"bond between {i} and {j} is infinite")
    for s in range(sysm.rank):
        if len(model.panel(c, s)) < 3:
            raise NotThick(f"panel of type {s} at the base is not thick")
    metadata = getattr(model, "edge_orientations", {})
    edges = []
    for i, j, bond in sysm.all_bonds():
        if bond == 2:
            continue
        residue = model.residue(c, (i, j))
        edges.append(
            EdgeResidueType(
                (i, j),
                bond,
                (len(model.panel(c, i)), len(model.panel(c, j))),
                len(residue.chambers),
                metadata.get((i, j)),
            )
        )
    return FoundationDescriptor(model.chamber_label(c), tuple(edges))
