"""Right-angled Artin groups: defining graphs, normal forms and word balls."""
from __future__ import annotations

import json
import math
import random
import string
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from . import _kernels


class ResourceGuardError(RuntimeError):
    """An enumeration would exceed its configured element budget."""


class WordParseError(ValueError):
    pass


class Letter(NamedTuple):
    vertex: int
    sign: int  # +1 generator, -1 inverse

    def code(self) -> int:
        return self.sign * (self.vertex + 1)

    @classmethod
    def from_code(cls, x: int) -> "Letter":
        return cls(abs(x) - 1, 1 if x > 0 else -1)


Word = tuple  # tuple[Letter, ...]


def word_codes(w: Iterable[Letter]) -> tuple:
    return tuple(a.code() for a in w)


def word_from_codes(codes: Iterable[int]) -> Word:
    return tuple(Letter.from_code(x) for x in codes)


def _default_names(n: int) -> tuple:
    if n <= 26:
        return tuple(string.ascii_lowercase[:n])
    return tuple(f"v{i}" for i in range(n))


@dataclass(frozen=True)
class DefiningGraph:
    """A finite simple graph; adjacent vertices give commuting generators."""

    n: int
    edges: frozenset
    names: tuple = ()
    _comm: bytes = field(default=b"", repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be >= 0")
        norm = set()
        for e in self.edges:
            i, j = e
            if i == j:
                raise ValueError(f"self-loop at {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {e} out of range")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))
        names = tuple(self.names) or _default_names(self.n)
        if len(names) != self.n or len(set(names)) != self.n:
            raise ValueError("names must be n distinct strings")
        object.__setattr__(self, "names", names)
        comm = bytearray(self.n * self.n)
        for i in range(self.n):
            comm[i * self.n + i] = 1
        for i, j in norm:
            comm[i * self.n + j] = comm[j * self.n + i] = 1
        object.__setattr__(self, "_comm", bytes(comm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, names: Sequence[str] = ()) -> "DefiningGraph":
        edges = list(edges)
        if len({(min(a, b), max(a, b)) for a, b in edges}) != len(edges):
            raise ValueError("duplicate edge")
        return cls(n, frozenset(tuple(e) for e in edges), tuple(names))

    @classmethod
    def empty(cls, n: int) -> "DefiningGraph":
        return cls(n, frozenset())

    @classmethod
    def complete(cls, n: int) -> "DefiningGraph":
        return cls(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def path(cls, n: int) -> "DefiningGraph":
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def from_json(cls, data) -> "DefiningGraph":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        n = int(data["n"])
        return cls.from_edges(n, [tuple(e) for e in data.get("edges", [])], data.get("names", ()))

    def to_json(self) -> dict:
        return {"n": self.n, "names": list(self.names), "edges": [list(e) for e in sorted(self.edges)]}

    @property
    def comm(self) -> bytes:
        return self._comm

    def commutes(self, u: int, v: int) -> bool:
        return bool(self._comm[u * self.n + v])

    def letters_commute(self, a: Letter, b: Letter) -> bool:
        return self.commutes(a.vertex, b.vertex)


@dataclass(frozen=True)
class ComplementGraph:
    """Complement of a defining graph with an ordered half-edge list at
    every vertex (half-edge ``k`` at ``v`` is ``neighbors[v][k-1]``)."""

    n: int
    neighbors: tuple

    @property
    def c0(self) -> int:
        return max((len(nb) for nb in self.neighbors), default=0)

    @property
    def edges(self) -> frozenset:
        return frozenset((min(u, v), max(u, v)) for u, nb in enumerate(self.neighbors) for v in nb)

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])


def build_complement(theta: DefiningGraph, half_edge_order: Optional[int] = None) -> ComplementGraph:
    """Complement graph; half-edges sorted by neighbour index, or shuffled
    reproducibly when a seed is given."""
    rng = random.Random(half_edge_order) if half_edge_order is not None else None
    nbrs = []
    for v in range(theta.n):
        nb = [u for u in range(theta.n) if u != v and not theta.commutes(u, v)]
        if rng is not None:
            rng.shuffle(nb)
        nbrs.append(tuple(nb))
    return ComplementGraph(theta.n, tuple(nbrs))


def growth_bound(c0: int) -> float:
    """Upper bound ``log(2*c0 + 2) + 1`` on the growth rate (natural log)."""
    if c0 < 0:
        raise ValueError("c0 must be >= 0")
    return math.log(2 * c0 + 2) + 1


def free_group_growth(n: int) -> float:
    """Growth rate ``log(2n - 1)`` of the free group on a basis of size n."""
    return math.log(2 * n - 1)


def free_ball_size(n: int, R: int) -> int:
    """Closed form for the ball of radius R in the free group of rank n."""
    if n == 0:
        return 1
    if n == 1:
        return 2 * R + 1
    return 1 + 2 * n * ((2 * n - 1) ** R - 1) // (2 * n - 2)


def normal_form(w: Sequence[Letter], theta: DefiningGraph) -> Word:
    """Unique normal form of the group element represented by ``w``.

    Inverse pairs separated only by letters commuting with them are
    cancelled; the reduced word is then reordered to the least word under
    (vertex index, sign) reachable by swapping adjacent commuting letters.
    """
    codes = word_codes(w)
    for x in codes:
        if abs(x) > theta.n:
            raise ValueError(f"letter {x} out of range")
    return word_from_codes(_kernels.normal_form(codes, theta.comm, theta.n))


def same_element(w1: Sequence[Letter], w2: Sequence[Letter], theta: DefiningGraph) -> bool:
    return normal_form(w1, theta) == normal_form(w2, theta)


def word_length(w: Sequence[Letter], theta: DefiningGraph) -> int:
    """Word length of the element represented by ``w``."""
    return len(_kernels.reduce_word(word_codes(w), theta.comm, theta.n))


def parse_word(text: str, theta: DefiningGraph) -> Word:
    """Parse whitespace separated names; a trailing apostrophe inverts."""
    index = {name: i for i, name in enumerate(theta.names)}
    out = []
    for tok in text.split():
        sign = 1
        if tok.endswith("'"):
            tok, sign = tok[:-1], -1
        if tok not in index:
            raise WordParseError(f"unknown generator {tok!r}")
        out.append(Letter(index[tok], sign))
    return tuple(out)


def format_word(w: Sequence[Letter], theta: DefiningGraph) -> str:
    return " ".join(theta.names[a.vertex] + ("'" if a.sign < 0 else "") for a in w)


@dataclass
class BallReport:
    sizes: list
    log_ratios: list  # None at r = 0
    bound: float
    c0: int

    def to_json(self) -> dict:
        return {"sizes": self.sizes, "log_ratios": self.log_ratios, "bound": self.bound, "c0": self.c0}


@dataclass
class Ball:
    report: BallReport
    elements: dict  # normal-form codes -> BFS geodesic (codes)
    radius: dict  # normal-form codes -> word length


def enumerate_ball(theta: DefiningGraph, R: int, guard: int = 10**7) -> Ball:
    """Breadth-first enumeration of the word-metric ball of radius ``R``.

    Each element is keyed by its normal form and stored with the geodesic
    through its BFS parent.
    """
    if R < 0:
        raise ValueError("radius must be >= 0")
    n, comm = theta.n, theta.comm
    gens = [s * (v + 1) for v in range(n) for s in (1, -1)]
    append, lexnf = _kernels.append_letter, _kernels.lex_normal_form
    # frontier entries hold (reduced word, geodesic); both in letter codes
    elements = {(): ()}
    radius = {(): 0}
    frontier = [((), ())]
    sizes = [1]
    for r in range(1, R + 1):
        nxt = []
        for red, geo in frontier:
            for x in gens:
                red2 = append(red, x, comm, n)
                if len(red2) <= len(red):
                    continue
                key = lexnf(red2, comm, n)
                if key in elements:
                    continue
                if len(elements) >= guard:
                    raise ResourceGuardError(f"ball exceeds guard of {guard} elements at radius {r}")
                elements[key] = geo + (x,)
                radius[key] = r
                nxt.append((key, geo + (x,)))
        frontier = nxt
        sizes.append(len(elements))
    c0 = build_complement(theta).c0
    ratios = [None] + [math.log(sizes[r]) / r for r in range(1, R + 1)]
    return Ball(BallReport(sizes, ratios, growth_bound(c0), c0), elements, radius)


def commutation_graph_from_generators(pairs: Iterable, n: int) -> DefiningGraph:
    """Defining graph whose edges are the commuting pairs, given the
    non-commuting ones."""
    bad = set()
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"pair {(a, b)} out of range")
        if a != b:
            bad.add((min(a, b), max(a, b)))
    return DefiningGraph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in bad))


def chain_commutation_graph(n: int) -> DefiningGraph:
    """Generators in a chain, each failing to commute only with its
    neighbours.  A stand-in for curve systems in which every curve meets
    at most two others."""
    return commutation_graph_from_generators([(i, i + 1) for i in range(n - 1)], n)
