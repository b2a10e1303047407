"""Triangulations of punctured surfaces as labeled ribbon dual graphs.

A triangulation is stored through its dual: one vertex per triangle, one
edge per pair of glued sides.  Slot ``j`` (1..3) at a dual vertex is side
``j - 1`` of its triangle, and slots are in counter-clockwise order, so the
slot numbering is the ribbon structure.  Side ``j`` of a triangle runs from
corner ``j`` to corner ``j + 1``; ``corners[v][j - 1]`` names the surface
vertex (puncture) at the start of side ``j``.

Edge labels live in the free group ``F_m``, ``m = 2g + n - 1``, identified
with the fundamental group of the surface with every triangulation vertex
removed.  The free basis is given by the fundamental cycles of a BFS
spanning tree of the initial dual.

A flip is the double split that moves, at both ends of the dual edge, the
side that precedes it in counter-clockwise order.  With the slot convention
of ``labeled_graph`` this keeps the slot order counter-clockwise.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .groups import (FreeWord, GroupDescriptor, conjugate_equal, free_reduce,
                     generates_free_group, invert, min_conjugate_tuple, multiply)
from .labeled_graph import (HEAD, TAIL, Edge, LabeledGraph, canonical_key,
                            double_split, enumerate_graph_ball, split_code_bound)
from .raag import ResourceGuardError


class TriangulationError(ValueError):
    pass


class UnsupportedSurfaceError(TriangulationError):
    pass


class FlipError(TriangulationError):
    pass


class SurfaceMismatchError(TriangulationError):
    pass


@dataclass(frozen=True)
class SpanningTreeLabeling:
    tree: frozenset  # edge labels
    basepoint: int


@dataclass(frozen=True)
class RibbonTriangulation:
    graph: LabeledGraph
    corners: dict  # dual vertex -> surface vertices at the start of sides 1..3
    peripheral: tuple  # reference class (FreeWord) of the loop around each surface vertex
    genus: int
    punctures: int
    n: int
    spanning: Optional[SpanningTreeLabeling] = field(default=None, compare=False)
    # closed edge paths ((edge, +1|-1), ...) carried through flips, with the
    # group element each one represents
    cycles: tuple = field(default=(), compare=False)

    @property
    def rank(self) -> int:
        return 2 * self.genus + self.n - 1

    @property
    def triangle_count(self) -> int:
        return len(self.graph.slots)

    def surface(self) -> tuple:
        return (self.genus, self.punctures, self.n)

    def flippable_edges(self) -> list:
        return [e for e in sorted(self.graph.edges) if not self.graph.edges[e].is_loop]

    def to_json(self) -> dict:
        out = self.graph.to_json()
        out.update({
            "genus": self.genus, "punctures": self.punctures, "n": self.n,
            "cyclic_order": {str(v): [1, 2, 3] for v in self.graph.vertices},
            "corners": {str(v): list(self.corners[v]) for v in self.graph.vertices},
            "peripheral": [p.to_json() for p in self.peripheral],
        })
        return out


# -- construction -----------------------------------------------------------------

def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def build_labeled_dual(data) -> RibbonTriangulation:
    """Dual ribbon graph of a triangle gluing.

    ``data`` has ``triangles`` (count), ``gluing`` (pairs of
    ``[triangle, side]`` with sides 0..2, glued orientation-reversingly),
    ``genus``, ``punctures`` and optionally ``n``.  Edge ``k + 1`` is the
    ``k``-th gluing pair, oriented from its first side to its second.
    """
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    T = int(data["triangles"])
    pairs = [tuple(tuple(int(x) for x in side) for side in pair) for pair in data["gluing"]]
    if T < 1:
        raise TriangulationError("need at least one triangle")
    used = {}
    for k, (p, q) in enumerate(pairs):
        for t, i in (p, q):
            if not (0 <= t < T and 0 <= i < 3):
                raise TriangulationError(f"side {(t, i)} out of range")
            if (t, i) in used:
                raise TriangulationError(f"side {(t, i)} glued twice")
            used[(t, i)] = k
    if len(used) != 3 * T:
        missing = sorted({(t, i) for t in range(T) for i in range(3)} - set(used))
        raise TriangulationError(f"unglued sides {missing}: surfaces with boundary are not supported")
    # surface vertices are classes of corners
    parent = list(range(3 * T))
    for (t, i), (u, j) in pairs:
        for a, b in ((3 * t + i, 3 * u + (j + 1) % 3), (3 * t + (i + 1) % 3, 3 * u + j)):
            ra, rb = _find(parent, a), _find(parent, b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    vid = {}
    for c in range(3 * T):
        vid.setdefault(_find(parent, c), len(vid))
    n = len(vid)
    corner = [vid[_find(parent, c)] for c in range(3 * T)]
    if "n" in data and int(data["n"]) != n:
        raise TriangulationError(f"gluing has {n} vertices, declared {data['n']}")
    if (2 - n + T // 2) % 2 or T % 2:
        raise TriangulationError("Euler characteristic is inconsistent with a closed orientable surface")
    genus = (2 - n + T // 2) // 2
    if genus < 0:
        raise TriangulationError("negative genus: gluing is not a connected surface")
    if "genus" in data and int(data["genus"]) != genus:
        raise TriangulationError(f"gluing has genus {genus}, declared {data['genus']}")
    p = int(data.get("punctures", n))
    if p < 1:
        raise UnsupportedSurfaceError("closed surfaces are not supported")
    if p > n:
        raise TriangulationError("more punctures than vertices")
    m = 2 * genus + n - 1
    # dual graph with placeholder labels, then the spanning-tree labeling
    edges = [((t + 1, i + 1), (u + 1, j + 1)) for (t, i), (u, j) in pairs]
    adj = {v: [] for v in range(1, T + 1)}
    for k, (a, b) in enumerate(edges, start=1):
        adj[a[0]].append((k, b[0]))
        adj[b[0]].append((k, a[0]))
    tree = set()
    seen = {1}
    queue = deque([1])
    while queue:
        v = queue.popleft()
        for k, w in sorted(adj[v]):
            if w not in seen:
                seen.add(w)
                tree.add(k)
                queue.append(w)
    if len(seen) != T:
        raise TriangulationError("gluing is disconnected")
    G = GroupDescriptor("free", m)
    labels = {}
    gen = 0
    for k in range(1, len(edges) + 1):
        if k in tree:
            labels[k] = G.identity()
        else:
            labels[k] = G.generator(gen)
            gen += 1
    if gen != m:
        raise TriangulationError(f"dual rank {gen} differs from 2g + n - 1 = {m}")
    graph = LabeledGraph([Edge(k, a, b, labels[k]) for k, (a, b) in enumerate(edges, start=1)], G)
    corners = {t + 1: tuple(corner[3 * t + j] for j in range(3)) for t in range(T)}
    faces = ribbon_faces(graph, corners)
    peripheral = [None] * n
    for puncture, _, prod in faces:
        if peripheral[puncture] is not None:
            raise TriangulationError(f"vertex {puncture} has a disconnected link")
        peripheral[puncture] = prod
    if any(x is None for x in peripheral):
        raise TriangulationError("some vertex has no face")
    cycles = tuple((_fundamental_path(graph, tree, k), labels[k])
                   for k in range(1, len(edges) + 1) if k not in tree)
    return RibbonTriangulation(graph, corners, tuple(peripheral), genus, p, n,
                               SpanningTreeLabeling(frozenset(tree), 1), cycles)


def _fundamental_path(g: LabeledGraph, tree, k: int) -> tuple:
    """Closed path: tree path from vertex 1 to ``tail(k)``, edge ``k``, tree
    path back from ``head(k)``."""
    parent = {1: None}
    queue = deque([1])
    while queue:
        v = queue.popleft()
        for e in sorted(tree):
            x = g.edges[e]
            for a, b, d in ((x.tail[0], x.head[0], 1), (x.head[0], x.tail[0], -1)):
                if a == v and b not in parent:
                    parent[b] = (e, d, v)
                    queue.append(b)

    def down(v):  # path from vertex 1 to v
        out = []
        while parent[v] is not None:
            e, d, u = parent[v]
            out.append((e, d))
            v = u
        return out[::-1]

    edge = g.edges[k]
    back = [(e, -d) for e, d in reversed(down(edge.head[0]))]
    return reduce_path(tuple(down(edge.tail[0]) + [(k, 1)] + back))


def reduce_path(path: tuple) -> tuple:
    """Cyclically cancel immediate backtracking."""
    out: list = []
    for x in path:
        if out and out[-1] == (x[0], -x[1]):
            out.pop()
        else:
            out.append(x)
    while len(out) > 1 and out[0] == (out[-1][0], -out[-1][1]):
        out = out[1:-1]
    return tuple(out)


def path_product(g: LabeledGraph, path) -> FreeWord:
    prod = g.group.identity()
    for e, d in path:
        x = g.edges[e].g
        prod = multiply(prod, x if d > 0 else invert(x))
    return prod


def path_is_closed(g: LabeledGraph, path) -> bool:
    def ends(e, d):
        x = g.edges[e]
        return (x.tail[0], x.head[0]) if d > 0 else (x.head[0], x.tail[0])
    return all(ends(*path[i])[1] == ends(*path[(i + 1) % len(path)])[0] for i in range(len(path)))


def transport_path(new: LabeledGraph, e: int, f: int, path) -> tuple:
    """Image of a closed path under the flip of ``e``: traversals of ``e``
    are dropped and, where the path now jumps between the two new
    triangles, the new edge ``f`` is inserted."""
    kept = [x for x in path if x[0] != e]
    if not kept:
        return ()
    fe = new.edges[f]
    out = []
    for i, (x, d) in enumerate(kept):
        out.append((x, d))
        y, dy = kept[(i + 1) % len(kept)]
        ex, ey = new.edges[x], new.edges[y]
        arrive = ex.head[0] if d > 0 else ex.tail[0]
        leave = ey.tail[0] if dy > 0 else ey.head[0]
        if arrive != leave:
            if (arrive, leave) == (fe.tail[0], fe.head[0]):
                out.append((f, 1))
            elif (arrive, leave) == (fe.head[0], fe.tail[0]):
                out.append((f, -1))
            else:
                raise TriangulationError("path left the flipped quadrilateral")
    return reduce_path(tuple(out))


def gluing_from_corner_lists(triangles, genus: int, punctures: int) -> dict:
    """Gluing data from triangles given by their three corner names; sides
    ``(u, v)`` and ``(v, u)`` are glued.  Only for triangulations in which
    every side is determined by its endpoints."""
    sides = {}
    for t, cs in enumerate(triangles):
        for i in range(3):
            key = (cs[i], cs[(i + 1) % 3])
            if key in sides:
                raise TriangulationError(f"side {key} appears twice")
            sides[key] = (t, i)
    pairs = []
    for (u, v), ti in sorted(sides.items(), key=lambda kv: kv[1]):
        other = sides.get((v, u))
        if other is None:
            raise TriangulationError(f"side {(u, v)} has no partner")
        if ti < other:
            pairs.append([list(ti), list(other)])
    n = len({c for cs in triangles for c in cs})
    return {"triangles": len(triangles), "gluing": pairs, "genus": genus, "punctures": punctures, "n": n}


def punctured_torus() -> RibbonTriangulation:
    """Two triangles, side ``i`` of one glued to side ``i`` of the other."""
    return build_labeled_dual({"triangles": 2, "gluing": [[[0, i], [1, i]] for i in range(3)],
                               "genus": 1, "punctures": 1, "n": 1})


def four_punctured_sphere() -> RibbonTriangulation:
    """Boundary of a tetrahedron."""
    faces = [(1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)]
    return build_labeled_dual(gluing_from_corner_lists(faces, 0, 4))


BUILTINS = {"punctured-torus": punctured_torus, "four-punctured-sphere": four_punctured_sphere}


# -- ribbon structure ----------------------------------------------------------------

def _other_end(g: LabeledGraph, v: int, s: int) -> tuple:
    e_lab, end = g.slot(v, s)
    e = g.edges[e_lab]
    return e.end(1 - end), e_lab, end


def _step_element(g: LabeledGraph, e_lab: int, end: int):
    """Label read when leaving along ``e`` from the given end."""
    x = g.edges[e_lab].g
    return x if end == TAIL else invert(x)


def ribbon_faces(g: LabeledGraph, corners: dict) -> list:
    """Faces as orbits of ``(v, s) -> (w, t + 1)`` where ``(w, t)`` is the
    other end of the edge in slot ``s`` at ``v``.  Returns
    ``(surface vertex, darts, label product)`` triples."""
    seen = set()
    out = []
    G = g.group
    for v in g.vertices:
        for s in (1, 2, 3):
            if (v, s) in seen:
                continue
            darts = []
            prod = G.identity()
            puncture = corners[v][s - 1]
            d = (v, s)
            while d not in seen:
                seen.add(d)
                darts.append(d)
                if corners[d[0]][d[1] - 1] != puncture:
                    raise TriangulationError("corner data disagrees with the ribbon structure")
                (w, t), e_lab, end = _other_end(g, *d)
                prod = multiply(prod, _step_element(g, e_lab, end))
                d = (w, t % 3 + 1)
            out.append((puncture, tuple(darts), prod))
    return out


def _fundamental_cycle_products(g: LabeledGraph) -> list:
    root = g.vertices[0]
    G = g.group
    h = {root: G.identity()}
    tree_edges = set()
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for s in (1, 2, 3):
            (w, _), e_lab, end = _other_end(g, v, s)
            if w not in h:
                h[w] = multiply(h[v], _step_element(g, e_lab, end))
                tree_edges.add(e_lab)
                queue.append(w)
    out = []
    for e in sorted(g.edges.values(), key=lambda x: x.label):
        if e.label not in tree_edges:
            out.append(multiply(multiply(h[e.tail[0]], e.g), invert(h[e.head[0]])))
    return out


def is_well_labeled(t: RibbonTriangulation, cycles: Optional[list] = None) -> bool:
    """Check the labels against the surface.

    Every ribbon face must carry a product conjugate to the reference class
    of its surface vertex, each surface vertex having exactly one face, and
    the products along the fundamental cycles of a spanning tree must
    generate the free group.  Every carried cycle, and every extra
    ``(closed edge path, reference element)`` pair in ``cycles``, must
    have a product conjugate to its reference element.
    """
    g = t.graph
    if g.rank != t.rank or len(g.slots) != 2 * (t.n + 2 * t.genus - 2):
        return False
    try:
        faces = ribbon_faces(g, t.corners)
    except (TriangulationError, KeyError):
        return False
    if sorted(f[0] for f in faces) != list(range(t.n)):
        return False
    for puncture, _, prod in faces:
        if not conjugate_equal(prod, t.peripheral[puncture]):
            return False
    words = [x.letters for x in _fundamental_cycle_products(g)]
    if not generates_free_group(words, t.rank):
        return False
    for path, ref in tuple(t.cycles) + tuple(cycles or ()):
        if not path_is_closed(g, path) or not conjugate_equal(path_product(g, path), ref):
            return False
    return True


def flip_config(g: LabeledGraph, e: int) -> int:
    edge = g.edges[e]
    (A, sA), (B, sB) = edge.tail, edge.head
    pa, pb = (sA + 1) % 3 + 1, (sB + 1) % 3 + 1  # counter-clockwise predecessors
    oa = [s for s in (1, 2, 3) if s != sA]
    ob = [s for s in (1, 2, 3) if s != sB]
    return 2 * oa.index(pa) + ob.index(pb)


def flip(t: RibbonTriangulation, e: int) -> RibbonTriangulation:
    """Replace the diagonal dual to ``e`` by the other diagonal of its
    quadrilateral.  The new diagonal is dual to edge ``max label + 1``."""
    g = t.graph
    if e not in g.edges:
        raise FlipError(f"no edge {e}")
    edge = g.edges[e]
    if edge.is_loop:
        raise FlipError(f"edge {e} joins a triangle to itself and cannot be flipped")
    (A, sA), (B, sB) = edge.tail, edge.head
    succ = lambda s: s % 3 + 1  # noqa: E731
    pred = lambda s: (s + 1) % 3 + 1  # noqa: E731
    cA, cB = t.corners[A], t.corners[B]
    new = double_split(g, e, flip_config(g, e))
    M = g.max_vertex_label
    corners = {v: c for v, c in t.corners.items() if v not in (A, B)}
    corners[M + 1] = (cB[pred(sB) - 1], cA[succ(sA) - 1], cA[pred(sA) - 1])
    corners[M + 2] = (cA[pred(sA) - 1], cB[succ(sB) - 1], cB[pred(sB) - 1])
    f = g.max_edge_label + 1
    cycles = tuple((transport_path(new, e, f, path), ref) for path, ref in t.cycles)
    return RibbonTriangulation(new, corners, t.peripheral, t.genus, t.punctures, t.n, t.spanning, cycles)


# -- equality ---------------------------------------------------------------------------

def _rooted_key(g: LabeledGraph, v0: int, s0: int, rank: int) -> tuple:
    num = {v0: 0}
    entry = {v0: s0}
    G = g.group
    h = {v0: G.identity()}
    order = [v0]
    code = []
    loops = []
    tree_edges = set()
    done_edges = set()
    k = 0
    while k < len(order):
        v = order[k]
        k += 1
        for r in range(3):
            s = (entry[v] - 1 + r) % 3 + 1
            (w, t), e_lab, end = _other_end(g, v, s)
            if w not in num:
                num[w] = len(order)
                entry[w] = t
                order.append(w)
                h[w] = multiply(h[v], _step_element(g, e_lab, end))
                tree_edges.add(e_lab)
                done_edges.add(e_lab)
            elif e_lab not in done_edges:
                done_edges.add(e_lab)
                loops.append(multiply(multiply(h[v], _step_element(g, e_lab, end)), invert(h[w])))
            code.append((num[w], (t - entry[w]) % 3))
    return tuple(code), min_conjugate_tuple([x.letters for x in loops], rank)


def triangulation_key(t: RibbonTriangulation) -> tuple:
    """Complete invariant of the triangulation up to isotopy: the least,
    over root darts, of the rooted ribbon code together with the
    gauge-fixed loop labels up to simultaneous conjugation."""
    g = t.graph
    best = min(_rooted_key(g, v, s, t.rank) for v in g.vertices for s in (1, 2, 3))
    return (t.surface(), best)


def triangulations_equal(t1: RibbonTriangulation, t2: RibbonTriangulation) -> bool:
    if t1.surface() != t2.surface():
        raise SurfaceMismatchError(f"{t1.surface()} vs {t2.surface()}")
    return triangulation_key(t1) == triangulation_key(t2)


# -- flip balls ----------------------------------------------------------------------------

@dataclass
class FlipBallReport:
    sizes: list
    log_ratios: list
    rank: int
    well_labeled: bool
    dual_injective: list  # per radius: distinct dual keys == #B_r(T0)
    dual_keys: list  # per radius, cumulative set of canonical_key of duals
    graph_sizes: list = field(default_factory=list)  # #B_r(G0) where computed
    dual_contained: list = field(default_factory=list)

    @property
    def bounds(self) -> list:
        return [split_code_bound(self.rank, r) for r in range(len(self.sizes))]

    def to_json(self) -> dict:
        return {"rank": self.rank, "sizes": self.sizes, "log_ratios": self.log_ratios,
                "bound_log4_exponents": [5 * self.rank - 5 + 3 * r for r in range(len(self.sizes))],
                "asymptote": 3 * math.log(4), "well_labeled": self.well_labeled,
                "dual_injective": self.dual_injective, "graph_sizes": self.graph_sizes,
                "dual_contained": self.dual_contained}


def enumerate_flip_ball(t0: RibbonTriangulation, R: int, guard: int = 10**6,
                        graph_radius: int = -1, check_labels: bool = True,
                        graph_guard: int = 10**6) -> FlipBallReport:
    """Breadth-first search over flips deduplicated by ``triangulation_key``.

    Also records the ``canonical_key`` of every dual graph.  When
    ``graph_radius >= 0`` the labeled-graph ball of the initial dual is
    enumerated up to that radius and compared with the flip ball.
    """
    if R < 0:
        raise ValueError("radius must be >= 0")
    seen = {triangulation_key(t0)}
    frontier = [t0]
    sizes = [1]
    labels_ok = is_well_labeled(t0) if check_labels else True
    duals = {canonical_key(t0.graph)}
    dual_sets = [set(duals)]
    injective = [True]
    for r in range(1, R + 1):
        nxt = []
        for t in frontier:
            for e in t.flippable_edges():
                t2 = flip(t, e)
                if check_labels and labels_ok and not is_well_labeled(t2):
                    labels_ok = False
                key = triangulation_key(t2)
                if key in seen:
                    continue
                if len(seen) >= guard:
                    raise ResourceGuardError(f"flip ball exceeds guard of {guard} at radius {r}")
                seen.add(key)
                nxt.append(t2)
                duals.add(canonical_key(t2.graph))
        frontier = nxt
        sizes.append(len(seen))
        dual_sets.append(set(duals))
        injective.append(len(duals) == len(seen))
    ratios = [None] + [math.log(sizes[r]) / r for r in range(1, R + 1)]
    report = FlipBallReport(sizes, ratios, t0.rank, labels_ok, injective, dual_sets)
    if graph_radius >= 0:
        gb = enumerate_graph_ball(t0.graph, min(graph_radius, R), guard=graph_guard)
        report.graph_sizes = gb.sizes
        report.dual_contained = [all(gb.keys.get(k, r + 1) <= r for k in dual_sets[r])
                                 for r in range(len(gb.sizes))]
    return report
