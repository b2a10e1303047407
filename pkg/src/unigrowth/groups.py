"""Coefficient groups for edge labels.

Three concrete groups are supported: the trivial group, free groups of
finite rank and finite cyclic groups.  Elements are immutable and carry
their parent group so mixing groups is caught early.

Free-group letters are nonzero integers: ``i + 1`` is the ``i``-th basis
element and ``-(i + 1)`` its inverse.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union


class GroupMismatchError(ValueError):
    """Raised when elements of different coefficient groups are combined."""


@dataclass(frozen=True)
class GroupDescriptor:
    kind: str  # "trivial" | "free" | "cyclic"
    param: int = 0

    def __post_init__(self):
        if self.kind not in ("trivial", "free", "cyclic"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind == "free" and self.param < 0:
            raise ValueError("free rank must be >= 0")
        if self.kind == "cyclic" and self.param < 1:
            raise ValueError("cyclic order must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "GroupDescriptor":
        """Parse ``trivial``, ``free:m`` or ``cyclic:k``."""
        text = text.strip()
        if text == "trivial":
            return cls("trivial")
        m = re.fullmatch(r"(free|cyclic):(\d+)", text)
        if not m:
            raise ValueError(f"bad group descriptor {text!r}")
        return cls(m.group(1), int(m.group(2)))

    def __str__(self):
        return "trivial" if self.kind == "trivial" else f"{self.kind}:{self.param}"

    def identity(self) -> "GroupElement":
        if self.kind == "trivial":
            return TrivialElement()
        if self.kind == "free":
            return FreeWord((), self.param)
        return CyclicElement(0, self.param)

    def generator(self, i: int) -> "GroupElement":
        """The ``i``-th generator (0-based); free and cyclic groups only."""
        if self.kind == "free":
            if not 0 <= i < self.param:
                raise IndexError(i)
            return FreeWord((i + 1,), self.param)
        if self.kind == "cyclic":
            return CyclicElement(1 % self.param, self.param)
        raise ValueError("trivial group has no generators")

    def element(self, data) -> "GroupElement":
        """Build an element from its JSON serialization."""
        if self.kind == "trivial":
            if data not in (None, 0, [], ()):
                raise ValueError(f"bad trivial element {data!r}")
            return TrivialElement()
        if self.kind == "free":
            return FreeWord.from_letters(data or (), self.param)
        return CyclicElement(int(data) % self.param, self.param)


@dataclass(frozen=True)
class TrivialElement:
    @property
    def group(self) -> GroupDescriptor:
        return GroupDescriptor("trivial")

    def key(self):
        return ()

    def to_json(self):
        return None

    def __mul__(self, other):
        return multiply(self, other)

    def __invert__(self):
        return self

    def __str__(self):
        return "1"


@dataclass(frozen=True)
class FreeWord:
    letters: tuple
    rank: int

    def __post_init__(self):
        for a, b in zip(self.letters, self.letters[1:]):
            if a == -b:
                raise ValueError(f"word {self.letters} is not reduced")
        for a in self.letters:
            if a == 0 or abs(a) > self.rank:
                raise ValueError(f"letter {a} out of range for rank {self.rank}")

    @classmethod
    def from_letters(cls, letters: Iterable[int], rank: int) -> "FreeWord":
        return cls(free_reduce(letters), rank)

    @property
    def group(self) -> GroupDescriptor:
        return GroupDescriptor("free", self.rank)

    def key(self):
        return self.letters

    def to_json(self):
        return list(self.letters)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other):
        return multiply(self, other)

    def __invert__(self):
        return invert(self)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"x{abs(a)}" + ("'" if a < 0 else "") for a in self.letters)


@dataclass(frozen=True)
class CyclicElement:
    value: int
    order: int

    def __post_init__(self):
        if not 0 <= self.value < self.order:
            raise ValueError(f"residue {self.value} outside [0, {self.order})")

    @property
    def group(self) -> GroupDescriptor:
        return GroupDescriptor("cyclic", self.order)

    def key(self):
        return self.value

    def to_json(self):
        return self.value

    def __mul__(self, other):
        return multiply(self, other)

    def __invert__(self):
        return invert(self)

    def __str__(self):
        return f"{self.value} mod {self.order}"


GroupElement = Union[TrivialElement, FreeWord, CyclicElement]


def free_reduce(letters: Iterable[int]) -> tuple:
    """Freely reduce a sequence of signed letters."""
    out: list = []
    for a in letters:
        if a == 0:
            raise ValueError("0 is not a free-group letter")
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def _check_same(a: GroupElement, b: GroupElement) -> None:
    if a.group != b.group:
        raise GroupMismatchError(f"{a.group} vs {b.group}")


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    _check_same(a, b)
    if isinstance(a, FreeWord):
        return FreeWord(free_reduce(a.letters + b.letters), a.rank)
    if isinstance(a, CyclicElement):
        return CyclicElement((a.value + b.value) % a.order, a.order)
    return a


def invert(a: GroupElement) -> GroupElement:
    if isinstance(a, FreeWord):
        return FreeWord(tuple(-x for x in reversed(a.letters)), a.rank)
    if isinstance(a, CyclicElement):
        return CyclicElement((-a.value) % a.order, a.order)
    return a


def is_identity(a: GroupElement) -> bool:
    if isinstance(a, FreeWord):
        return not a.letters
    if isinstance(a, CyclicElement):
        return a.value == 0
    return True


def equal(a: GroupElement, b: GroupElement) -> bool:
    _check_same(a, b)
    return a == b


def cyclic_reduction(letters: Sequence[int]) -> tuple[tuple, tuple]:
    """Split a reduced word as ``u c u^-1`` with ``c`` cyclically reduced.

    Returns ``(u, c)``.
    """
    letters = tuple(letters)
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    return letters[:i], letters[i:j + 1]


def _is_rotation(c: tuple, d: tuple) -> bool:
    if len(c) != len(d):
        return False
    if not c:
        return True
    doubled = c + c
    return any(doubled[k:k + len(c)] == d for k in range(len(c)))


def conjugate_equal(a: GroupElement, b: GroupElement) -> bool:
    """Decide whether ``a`` and ``b`` are conjugate."""
    _check_same(a, b)
    if isinstance(a, FreeWord):
        return _is_rotation(cyclic_reduction(a.letters)[1], cyclic_reduction(b.letters)[1])
    if isinstance(a, (CyclicElement, TrivialElement)):
        return a == b
    raise TypeError(f"conjugacy not supported for {type(a).__name__}")


def product(elements: Iterable[GroupElement], group: GroupDescriptor) -> GroupElement:
    out = group.identity()
    for g in elements:
        out = multiply(out, g)
    return out


# -- conjugation-invariant normal forms for tuples of free words ----------

def _conj_letters(x: int, word: tuple) -> tuple:
    return free_reduce((x,) + word + (-x,))


def min_conjugate_tuple(words: Sequence[tuple], rank: int, cap: int = 100000) -> tuple:
    """Canonical representative of a tuple of free words up to simultaneous
    conjugation.

    Total length of ``h w h^-1`` summed over the tuple is a convex function
    of ``h`` on the Cayley tree, so a greedy descent reaches the global
    minimum and the minimizers form a connected plateau.  The plateau is
    explored fully and the lexicographically least tuple is returned.
    """
    words = tuple(free_reduce(w) for w in words)
    letters = [s * (i + 1) for i in range(rank) for s in (1, -1)]

    def total(ws):
        return sum(len(w) for w in ws)

    cur, cur_len = words, total(words)
    improved = True
    while improved:
        improved = False
        for x in letters:
            cand = tuple(_conj_letters(x, w) for w in cur)
            t = total(cand)
            if t < cur_len:
                cur, cur_len, improved = cand, t, True
                break
    seen = {cur}
    stack = [cur]
    while stack:
        ws = stack.pop()
        for x in letters:
            cand = tuple(_conj_letters(x, w) for w in ws)
            if cand not in seen and total(cand) == cur_len:
                if len(seen) >= cap:
                    raise RuntimeError("conjugation plateau too large")
                seen.add(cand)
                stack.append(cand)
    return min(seen)


def generates_free_group(words: Sequence[tuple], rank: int) -> bool:
    """Whether ``words`` generate the whole free group of ``rank``.

    Stallings folding of the bouquet of ``words``: the subgroup is the
    whole group iff the folded graph is the rose with one vertex and every
    letter present.
    """
    # adj[v][letter] = set of targets; vertex 0 is the basepoint
    adj: list = [{}]

    def add_edge(u, x, v):
        adj[u].setdefault(x, set()).add(v)
        adj[v].setdefault(-x, set()).add(u)

    for w in words:
        w = free_reduce(w)
        prev = 0
        for k, x in enumerate(w):
            if k == len(w) - 1:
                nxt = 0
            else:
                adj.append({})
                nxt = len(adj) - 1
            add_edge(prev, x, nxt)
            prev = nxt

    parent = list(range(len(adj)))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def conflict():
        for v in range(len(adj)):
            if parent[v] != v:
                continue
            for x in adj[v]:
                ts = {find(t) for t in adj[v][x]}
                adj[v][x] = ts
                if len(ts) > 1:
                    return sorted(ts)[:2]
        return None

    while True:
        pair = conflict()
        if pair is None:
            break
        keep, gone = pair
        parent[gone] = keep
        for y, ts in adj[gone].items():
            adj[keep].setdefault(y, set()).update(ts)
        adj[gone] = {}
    if any(parent[v] == v and v != 0 for v in range(len(adj))):
        return False
    return all(adj[0].get(s * (i + 1)) for i in range(rank) for s in (1, -1))
