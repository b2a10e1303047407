"""Trivalent graphs with group-element edge labels, and split moves.

Every vertex has three half-edge slots numbered 1..3.  An edge records its
tail and head as ``(vertex label, slot)`` pairs and carries a label in a
coefficient group.  Vertices and edges are named by positive integers.

Split conventions (the four double-split configurations and the slot
numbering of created vertices) are fixed here and shared by every
consumer:

* double split along a non-loop edge ``e``, configuration ``c`` in 0..3:
  the half-edge moving from ``init(e)`` to ``term(e)`` is the
  ``c // 2``-th of the two other slots at ``init(e)`` (ascending slot
  order); the half-edge moving from ``term(e)`` to ``init(e)`` is the
  ``c % 2``-th of the two other slots at ``term(e)``.
* at each created vertex the moved-in half-edge sits in slot 1, the
  half-edge that stayed in slot 2 and the new edge in slot 3.
* loop split: configuration 0 is forward, 1 is backward; the shape and
  slots are unchanged, only the stem label moves.
* the created edge is labeled ``N + 1`` and keeps the orientation of the
  support; created vertices are labeled ``M + 1`` (initial) and ``M + 2``
  (terminal), or ``M + 1`` for a loop, where ``M, N`` are the current
  maximal vertex and edge labels.
"""
from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .groups import (CyclicElement, FreeWord, GroupDescriptor, GroupElement, TrivialElement,
                     invert, multiply)

TAIL, HEAD = 0, 1


class GraphError(ValueError):
    pass


class WrongKindError(GraphError):
    """A split kind does not match the type (loop / non-loop) of its support."""


@dataclass(frozen=True)
class Edge:
    label: int
    tail: tuple  # (vertex label, slot)
    head: tuple
    g: GroupElement

    @property
    def is_loop(self) -> bool:
        return self.tail[0] == self.head[0]

    def end(self, which: int) -> tuple:
        return self.head if which else self.tail

    def reversed(self) -> "Edge":
        return Edge(self.label, self.head, self.tail, invert(self.g))


@dataclass(frozen=True)
class Split:
    edge: int
    kind: str  # "double" | "loop"
    config: int

    def __post_init__(self):
        if self.kind == "double" and not 0 <= self.config <= 3:
            raise ValueError("double split configuration must be in 0..3")
        if self.kind == "loop" and not 0 <= self.config <= 1:
            raise ValueError("loop split configuration must be 0 or 1")
        if self.kind not in ("double", "loop"):
            raise ValueError(f"unknown split kind {self.kind!r}")

    def to_json(self) -> dict:
        return {"edge": self.edge, "kind": self.kind, "config": self.config}

    @classmethod
    def from_json(cls, data) -> "Split":
        return cls(int(data["edge"]), data["kind"], int(data["config"]))


class LabeledGraph:
    """An oriented trivalent G-labeled graph.  Treat instances as immutable."""

    __slots__ = ("edges", "group", "slots", "_hash")

    def __init__(self, edges: Iterable[Edge], group: GroupDescriptor, check: bool = True):
        self.edges = {e.label: e for e in edges}
        self.group = group
        slots: dict = {}
        for e in self.edges.values():
            for which in (TAIL, HEAD):
                v, s = e.end(which)
                row = slots.setdefault(v, [None, None, None])
                if not 1 <= s <= 3:
                    raise GraphError(f"slot {s} out of range at vertex {v}")
                if row[s - 1] is not None:
                    raise GraphError(f"slot {s} at vertex {v} used twice")
                row[s - 1] = (e.label, which)
        self.slots = {v: tuple(row) for v, row in slots.items()}
        self._hash = None
        if check:
            self.validate()

    # -- basic structure --------------------------------------------------

    def validate(self) -> None:
        for v, row in self.slots.items():
            if any(x is None for x in row):
                raise GraphError(f"vertex {v} is not trivalent")
        for e in self.edges.values():
            if e.g.group != self.group:
                raise GraphError(f"edge {e.label} label lies in {e.g.group}, not {self.group}")
        if self.edges and not self.is_connected():
            raise GraphError("graph is disconnected")

    @property
    def vertices(self) -> list:
        return sorted(self.slots)

    @property
    def rank(self) -> int:
        return len(self.edges) - len(self.slots) + 1

    @property
    def max_vertex_label(self) -> int:
        return max(self.slots, default=0)

    @property
    def max_edge_label(self) -> int:
        return max(self.edges, default=0)

    def slot(self, v: int, s: int) -> tuple:
        """``(edge label, end)`` occupying slot ``s`` at vertex ``v``."""
        return self.slots[v][s - 1]

    def endpoints(self, e: int) -> tuple:
        edge = self.edges[e]
        return edge.tail[0], edge.head[0]

    def is_connected(self) -> bool:
        if not self.slots:
            return True
        adj: dict = {v: set() for v in self.slots}
        for e in self.edges.values():
            adj[e.tail[0]].add(e.head[0])
            adj[e.head[0]].add(e.tail[0])
        start = next(iter(adj))
        seen = {start}
        stack = [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(adj)

    def splits(self) -> list:
        """Every split available on this graph."""
        out = []
        for lab in sorted(self.edges):
            if self.edges[lab].is_loop:
                out.extend(Split(lab, "loop", c) for c in (0, 1))
            else:
                out.extend(Split(lab, "double", c) for c in range(4))
        return out

    def relabeled(self, vmap: dict, emap: dict) -> "LabeledGraph":
        """Rename vertices and edges (maps may be partial)."""
        def end(p):
            return (vmap.get(p[0], p[0]), p[1])
        return LabeledGraph([Edge(emap.get(e.label, e.label), end(e.tail), end(e.head), e.g)
                             for e in self.edges.values()], self.group, check=False)

    def with_labels(self, labels: dict) -> "LabeledGraph":
        """Replace group labels of the given edges."""
        return LabeledGraph([Edge(e.label, e.tail, e.head, labels.get(e.label, e.g))
                             for e in self.edges.values()], self.group, check=False)

    def reverse_edge(self, e: int) -> "LabeledGraph":
        return LabeledGraph([x.reversed() if x.label == e else x for x in self.edges.values()],
                            self.group, check=False)

    # -- equality and serialization ---------------------------------------

    def _items(self):
        return (self.group, tuple(sorted((e.label, e.tail, e.head, e.g.key()) for e in self.edges.values())))

    def __eq__(self, other):
        return isinstance(other, LabeledGraph) and self._items() == other._items()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._items())
        return self._hash

    def __repr__(self):
        es = ", ".join(f"{e.label}:{e.tail}->{e.head}[{e.g}]" for e in sorted(self.edges.values(), key=lambda x: x.label))
        return f"LabeledGraph(rank={self.rank}, group={self.group}, edges=[{es}])"

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "group": str(self.group),
            "vertices": [{"label": v, "slots": [self.slots[v][s][0] for s in range(3)]}
                         for v in self.vertices],
            "edges": [{"label": e.label, "from": list(e.tail), "to": list(e.head), "g": e.g.to_json()}
                      for e in sorted(self.edges.values(), key=lambda x: x.label)],
        }

    @classmethod
    def from_json(cls, data, group: Optional[GroupDescriptor] = None) -> "LabeledGraph":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        if group is None:
            group = GroupDescriptor.parse(data.get("group", "trivial"))
        edges = [Edge(int(e["label"]), tuple(e["from"]), tuple(e["to"]), group.element(e.get("g")))
                 for e in data["edges"]]
        g = cls(edges, group)
        if "rank" in data and int(data["rank"]) != g.rank:
            raise GraphError(f"declared rank {data['rank']} but graph has rank {g.rank}")
        for rec in data.get("vertices", []):
            v = int(rec["label"])
            if v not in g.slots or [g.slots[v][s][0] for s in range(3)] != list(rec["slots"]):
                raise GraphError(f"vertex record {rec} disagrees with edge records")
        return g


# -- label arithmetic shared by the split rules -----------------------------

def _forward(ga, ge, end_a):
    # the moved half-edge of a sits at init(e)
    return multiply(ga, ge) if end_a == HEAD else multiply(invert(ge), ga)


def _backward(gb, ge, end_b):
    # the moved half-edge of b sits at term(e)
    return multiply(ge, gb) if end_b == TAIL else multiply(gb, invert(ge))


def double_split_parts(g: LabeledGraph, e: int, config: int) -> dict:
    """The half-edges involved in a double split (no graph is built)."""
    edge = g.edges[e]
    A, sA = edge.tail
    B, sB = edge.head
    oa = [s for s in (1, 2, 3) if s != sA]
    ob = [s for s in (1, 2, 3) if s != sB]
    ia, ib = config >> 1, config & 1
    return {
        "init": A, "term": B,
        "moved_init": g.slot(A, oa[ia]), "stay_init": g.slot(A, oa[1 - ia]),
        "moved_term": g.slot(B, ob[ib]), "stay_term": g.slot(B, ob[1 - ib]),
        "slot_moved_init": oa[ia], "slot_moved_term": ob[ib],
    }


def double_split(g: LabeledGraph, e: int, config: int) -> LabeledGraph:
    """Forward split of one half-edge at ``init(e)`` composed with a
    backward split of one half-edge at ``term(e)``."""
    if e not in g.edges:
        raise GraphError(f"no edge {e}")
    edge = g.edges[e]
    if edge.is_loop:
        raise WrongKindError(f"edge {e} is a loop")
    if not 0 <= config <= 3:
        raise ValueError("configuration must be in 0..3")
    parts = double_split_parts(g, e, config)
    a, ea = parts["moved_init"]
    c, ec = parts["stay_init"]
    b, eb = parts["moved_term"]
    d, ed = parts["stay_term"]
    ge = edge.g
    labels = {lab: x.g for lab, x in g.edges.items()}
    labels[a] = _forward(labels[a], ge, ea)
    labels[b] = _backward(labels[b], ge, eb)
    M, N = g.max_vertex_label, g.max_edge_label
    new_init, new_term, f = M + 1, M + 2, N + 1
    pos = {(a, ea): (new_term, 1), (d, ed): (new_term, 2),
           (b, eb): (new_init, 1), (c, ec): (new_init, 2)}
    out = []
    for lab, x in g.edges.items():
        if lab == e:
            continue
        out.append(Edge(lab, pos.get((lab, TAIL), x.tail), pos.get((lab, HEAD), x.head), labels[lab]))
    out.append(Edge(f, (new_init, 3), (new_term, 3), ge))
    return LabeledGraph(out, g.group, check=False)


def loop_split(g: LabeledGraph, e: int, config: int) -> LabeledGraph:
    """Slide the stem of loop ``e`` around the loop (0 forward, 1 backward)."""
    if e not in g.edges:
        raise GraphError(f"no edge {e}")
    edge = g.edges[e]
    if not edge.is_loop:
        raise WrongKindError(f"edge {e} is not a loop")
    if config not in (0, 1):
        raise ValueError("loop configuration must be 0 or 1")
    v = edge.tail[0]
    s3 = ({1, 2, 3} - {edge.tail[1], edge.head[1]}).pop()
    a, ea = g.slot(v, s3)
    ge = edge.g
    ga = g.edges[a].g
    if config == 0:
        ga = multiply(ga, ge) if ea == HEAD else multiply(invert(ge), ga)
    else:
        ga = multiply(ga, invert(ge)) if ea == HEAD else multiply(ge, ga)
    M, N = g.max_vertex_label, g.max_edge_label
    nv, f = M + 1, N + 1
    out = []
    for lab, x in g.edges.items():
        if lab == e:
            continue
        tail = (nv, x.tail[1]) if x.tail[0] == v else x.tail
        head = (nv, x.head[1]) if x.head[0] == v else x.head
        out.append(Edge(lab, tail, head, ga if lab == a else x.g))
    out.append(Edge(f, (nv, edge.tail[1]), (nv, edge.head[1]), ge))
    return LabeledGraph(out, g.group, check=False)


def apply_split(g: LabeledGraph, s: Split) -> LabeledGraph:
    if s.edge not in g.edges:
        raise GraphError(f"split support {s.edge} is not an edge of the graph")
    is_loop = g.edges[s.edge].is_loop
    if is_loop != (s.kind == "loop"):
        raise WrongKindError(f"{s.kind} split on {'loop' if is_loop else 'non-loop'} edge {s.edge}")
    return loop_split(g, s.edge, s.config) if is_loop else double_split(g, s.edge, s.config)


def destroyed_vertices(g: LabeledGraph, s: Split) -> tuple:
    u, w = g.endpoints(s.edge)
    return (u,) if u == w else (u, w)


# -- equivalence -------------------------------------------------------------

def normalize_orientation(g: LabeledGraph) -> LabeledGraph:
    """Pick, per edge, the lexicographically smaller of (label, tail, head)
    and (inverse label, head, tail)."""
    out = []
    for e in g.edges.values():
        r = e.reversed()
        out.append(r if (r.g.key(), r.tail, r.head) < (e.g.key(), e.tail, e.head) else e)
    return LabeledGraph(out, g.group, check=False)


def _vertex_invariant(g: LabeledGraph, v: int):
    loops = 0
    mult: dict = {}
    for lab, _ in g.slots[v]:
        e = g.edges[lab]
        if e.is_loop:
            loops += 1
        else:
            w = e.head[0] if e.tail[0] == v else e.tail[0]
            mult[w] = mult.get(w, 0) + 1
    return (loops // 2, tuple(sorted(mult.values())))


def canonical_key(g: LabeledGraph) -> bytes:
    """Complete invariant of a G-labeled graph up to isomorphism and
    reversal of edges with inversion of their labels.

    Integer labels and slot numbers are ignored.  Vertices are split into
    cells by a local invariant and every cell-respecting bijection onto
    ``0..V-1`` is tried; the least sorted edge list wins.
    """
    if not g.is_connected():
        raise GraphError("canonical_key needs a connected graph")
    inv = {v: _vertex_invariant(g, v) for v in g.slots}
    cells: dict = {}
    for v in sorted(g.slots):
        cells.setdefault(inv[v], []).append(v)
    order = sorted(cells)
    sig = tuple((k, len(cells[k])) for k in order)
    edges = [(e.tail[0], e.head[0], e.g.key(), invert(e.g).key()) for e in g.edges.values()]
    best = None
    for perms in itertools.product(*(itertools.permutations(cells[k]) for k in order)):
        idx = {}
        for perm in perms:
            for v in perm:
                idx[v] = len(idx)
        key = sorted(min((idx[t], idx[h], k), (idx[h], idx[t], ki)) for t, h, k, ki in edges)
        if best is None or key < best:
            best = key
    return repr((str(g.group), sig, tuple(best or ()))).encode()


def equivalent(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    return canonical_key(g1) == canonical_key(g2)


# -- builders -------------------------------------------------------------------

def _labels(group: GroupDescriptor, labels, count: int) -> list:
    if labels is None:
        return [group.identity()] * count
    out = [x if isinstance(x, (TrivialElement, FreeWord, CyclicElement)) else group.element(x)
           for x in labels]
    if len(out) != count:
        raise ValueError(f"expected {count} labels")
    return out


def theta_graph(group: GroupDescriptor = GroupDescriptor("trivial"), labels=None) -> LabeledGraph:
    """Two vertices joined by three parallel edges (rank 2)."""
    gs = _labels(group, labels, 3)
    return LabeledGraph([Edge(i + 1, (1, i + 1), (2, i + 1), gs[i]) for i in range(3)], group)


def dumbbell_graph(group: GroupDescriptor = GroupDescriptor("trivial"), labels=None) -> LabeledGraph:
    """Two loops joined by a bar (rank 2); edge 1 is the bar."""
    gs = _labels(group, labels, 3)
    return LabeledGraph([Edge(1, (1, 3), (2, 3), gs[0]),
                         Edge(2, (1, 1), (1, 2), gs[1]),
                         Edge(3, (2, 1), (2, 2), gs[2])], group)


def k4_graph(group: GroupDescriptor = GroupDescriptor("trivial"), labels=None) -> LabeledGraph:
    """The complete graph on four vertices (rank 3)."""
    gs = _labels(group, labels, 6)
    pairs = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    used = {v: 0 for v in range(1, 5)}
    out = []
    for i, (u, v) in enumerate(pairs):
        used[u] += 1
        used[v] += 1
        out.append(Edge(i + 1, (u, used[u]), (v, used[v]), gs[i]))
    return LabeledGraph(out, group)


def graph_from_pairing(pairing: Sequence[tuple], group: GroupDescriptor, labels=None) -> LabeledGraph:
    """Build a graph from pairs of half-edges ``((v, s), (w, t))``; edge
    ``i + 1`` runs from the first half-edge of pair ``i`` to the second."""
    gs = _labels(group, labels, len(pairing))
    return LabeledGraph([Edge(i + 1, tuple(p), tuple(q), gs[i]) for i, (p, q) in enumerate(pairing)], group)


def trivalent_shapes(rank: int) -> list:
    """One representative of every connected trivalent multigraph (loops
    allowed) of the given rank, with trivial labels, vertices ``1..2r-2``
    and edges ``1..3r-3``."""
    if rank < 2:
        raise ValueError("trivalent graphs have rank >= 2")
    nv = 2 * rank - 2
    halves = [(v, s) for v in range(1, nv + 1) for s in (1, 2, 3)]
    triv = GroupDescriptor("trivial")
    found: dict = {}

    def matchings(items):
        if not items:
            yield []
            return
        first = items[0]
        for k in range(1, len(items)):
            rest = items[1:k] + items[k + 1:]
            for m in matchings(rest):
                yield [(first, items[k])] + m

    for m in matchings(halves):
        try:
            g = graph_from_pairing(m, triv)
        except GraphError:
            continue
        key = canonical_key(g)
        if key not in found:
            found[key] = g
    return [found[k] for k in sorted(found)]


# -- ball enumeration ------------------------------------------------------------

@dataclass
class GraphBallReport:
    sizes: list
    log_ratios: list
    bounds: list  # 4^(5n-5+3r) as exact ints
    rank: int
    keys: dict  # canonical key -> radius at which it first appears

    def to_json(self) -> dict:
        return {"rank": self.rank, "sizes": self.sizes, "log_ratios": self.log_ratios,
                "bound_log4_exponents": [5 * self.rank - 5 + 3 * r for r in range(len(self.sizes))],
                "bounds": [str(b) for b in self.bounds]}


def split_code_bound(rank: int, R: int) -> int:
    """``#F_R = 4^(5n - 5 + 3R)``."""
    return 4 ** (5 * rank - 5 + 3 * R)


def _expand(graphs: list) -> list:
    out = []
    for g in graphs:
        children = []
        for s in g.splits():
            h = apply_split(g, s)
            children.append((canonical_key(h), h))
        out.append(children)
    return out


def enumerate_graph_ball(g0: LabeledGraph, R: int, guard: int = 10**6, workers: int = 1) -> GraphBallReport:
    """Breadth-first search over splits, deduplicated by ``canonical_key``.

    With ``workers > 1`` frontier expansion is farmed out to processes;
    results are merged in frontier order so the output does not depend on
    scheduling.
    """
    import math

    if R < 0:
        raise ValueError("radius must be >= 0")
    seen = {canonical_key(g0): 0}
    frontier = [g0]
    sizes = [1]
    pool = None
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        pool = ProcessPoolExecutor(max_workers=workers)
    try:
        for r in range(1, R + 1):
            if pool is not None:
                chunk = max(1, len(frontier) // (4 * workers))
                parts = [frontier[i:i + chunk] for i in range(0, len(frontier), chunk)]
                expanded = [c for part in pool.map(_expand, parts) for c in part]
            else:
                expanded = _expand(frontier)
            nxt = []
            for children in expanded:
                for key, h in children:
                    if key in seen:
                        continue
                    if len(seen) >= guard:
                        from .raag import ResourceGuardError
                        raise ResourceGuardError(f"graph ball exceeds guard of {guard} at radius {r}")
                    seen[key] = r
                    nxt.append(h)
            frontier = nxt
            sizes.append(len(seen))
    finally:
        if pool is not None:
            pool.shutdown()
    ratios = [None] + [math.log(sizes[r]) / r for r in range(1, R + 1)]
    bounds = [split_code_bound(g0.rank, r) for r in range(R + 1)]
    return GraphBallReport(sizes, ratios, bounds, g0.rank, seen)
