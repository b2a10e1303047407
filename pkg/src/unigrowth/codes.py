"""Canonical representatives of RAAG words and their integer codes.

A word is reordered greedily: at each position the ready letter with the
smallest dynamic vertex label is moved forward, and the complement-graph
neighbours of the chosen letter receive fresh labels above the current
maximum.  The signed labels of the chosen letters form a code whose
absolute values are non-decreasing, which is what makes the ball of the
group embed into a small set of monotone sequences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from . import _kernels
from .raag import ComplementGraph, DefiningGraph, Letter, Word, word_codes, word_from_codes


class MalformedCodeError(ValueError):
    pass


@dataclass(frozen=True)
class VertexLabeling:
    labels: tuple  # labels[v] > 0, injective

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels) or any(x < 1 for x in self.labels):
            raise ValueError("labeling must be injective with positive values")

    @classmethod
    def initial(cls, n: int, order: Optional[Sequence[int]] = None) -> "VertexLabeling":
        """Labeling with image ``{1..n}``; ``order[k]`` gets label ``k+1``."""
        if order is None:
            return cls(tuple(range(1, n + 1)))
        if sorted(order) != list(range(n)):
            raise ValueError("order must be a permutation of range(n)")
        labels = [0] * n
        for k, v in enumerate(order):
            labels[v] = k + 1
        return cls(tuple(labels))

    @property
    def max_label(self) -> int:
        return max(self.labels, default=0)

    def __getitem__(self, v: int) -> int:
        return self.labels[v]


@dataclass(frozen=True)
class Code:
    values: tuple
    n: int
    c0: int
    R: int

    @property
    def bound(self) -> int:
        """``C_R = n + c0 * R``."""
        return self.n + self.c0 * self.R

    @property
    def sentinel(self) -> int:
        return self.bound + 1

    def padded(self, R: Optional[int] = None) -> "Code":
        """Pad to length ``R`` with the sentinel ``C_R + 1``."""
        R = self.R if R is None else R
        prefix = tuple(x for x in self.values if x != self.sentinel)
        if len(prefix) > R:
            raise ValueError("code longer than requested radius")
        pad = self.n + self.c0 * R + 1
        return Code(prefix + (pad,) * (R - len(prefix)), self.n, self.c0, R)

    def to_json(self) -> dict:
        return {"code": list(self.values), "n": self.n, "c0": self.c0, "R": self.R}

    @classmethod
    def from_json(cls, data: dict) -> "Code":
        return cls(tuple(data["code"]), data["n"], data["c0"], data["R"])


def is_ready(w: Sequence[Letter], k: int, i: int, theta: DefiningGraph) -> bool:
    """Whether letter ``k`` of ``w`` commutes with letters ``i..k`` (1-based)."""
    if not 1 <= i <= k <= len(w):
        raise IndexError(f"need 1 <= i <= k <= {len(w)}, got i={i}, k={k}")
    s = w[k - 1]
    return all(theta.letters_commute(s, w[j - 1]) for j in range(i, k + 1))


def canonical_representative(w0: Sequence[Letter], cbar: ComplementGraph,
                             L0: Optional[VertexLabeling] = None,
                             theta: Optional[DefiningGraph] = None):
    """Return ``(word, code, final_labeling)`` for the word ``w0``.

    ``theta`` defaults to the complement of ``cbar``.
    """
    if L0 is None:
        L0 = VertexLabeling.initial(cbar.n)
    if theta is None:
        theta = _theta_of(cbar)
    out, code, labels = _kernels.canonical_code(word_codes(w0), cbar.neighbors, L0.labels,
                                                theta.comm, theta.n)
    return (word_from_codes(out), Code(code, cbar.n, cbar.c0, len(code)),
            VertexLabeling(labels))


def _theta_of(cbar: ComplementGraph) -> DefiningGraph:
    bar = cbar.edges
    return DefiningGraph(cbar.n, frozenset((i, j) for i in range(cbar.n)
                                           for j in range(i + 1, cbar.n) if (i, j) not in bar))


def verify_code(code: Code) -> bool:
    """Monotonicity and range check; trailing sentinels are allowed."""
    if len(code.values) != code.R:
        return False
    C = code.bound
    prev = 1
    padding = False
    for x in code.values:
        if x == C + 1:
            padding = True
            continue
        if padding or x == 0 or not prev <= abs(x) <= C:
            return False
        prev = abs(x)
    return True


def decode(code: Code, cbar: ComplementGraph, L0: Optional[VertexLabeling] = None) -> Word:
    """Recover the canonical representative from its (possibly padded) code."""
    if L0 is None:
        L0 = VertexLabeling.initial(cbar.n)
    out = _kernels.decode_code(code.values, cbar.neighbors, L0.labels, code.sentinel)
    if out is None:
        raise MalformedCodeError(f"no vertex carries a label required by {code.values}")
    return word_from_codes(out)


def count_monotone(R: int, C: int) -> int:
    """``#W(R, C) = binom(C + R - 1, R)``: non-decreasing R-tuples in 1..C."""
    if R < 0 or C < 1:
        raise ValueError("need R >= 0 and C >= 1")
    return math.comb(C + R - 1, R)


def wr_bound(n: int, c0: int, R: int):
    """``2^R * binom(n + R(c0+1), R)`` and its log divided by R (0 at R=0)."""
    if min(n, c0, R) < 0:
        raise ValueError("arguments must be >= 0")
    value = 2**R * math.comb(n + R * (c0 + 1), R)
    return value, (math.log(value) / R if R else 0.0)


def count_wr_exact(n: int, c0: int, R: int) -> int:
    """Exact number of sentinel-padded monotone signed sequences.

    Sequences have ``k`` signed entries with non-decreasing absolute values
    in ``1..C_R`` followed by ``R - k`` sentinels.
    """
    C = n + c0 * R
    if C == 0:
        return 1
    return sum(2**k * math.comb(C + k - 1, k) for k in range(R + 1))


def binary_entropy(eps: float) -> float:
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if eps == 1:
        return 0.0
    return eps * math.log(1 / eps) + (1 - eps) * math.log(1 / (1 - eps))


def entropy_rate(c0: int) -> float:
    """``log 2 + (c0+1) H(1/(c0+1))``, the limit of ``log(#W_R)/R``."""
    return math.log(2) + (c0 + 1) * binary_entropy(1 / (c0 + 1))


def entropy_rate_closed(c0: int) -> float:
    """``log 2 + log(c0+1) + c0 log(1 + 1/c0)``."""
    if c0 == 0:
        return math.log(2)
    return math.log(2) + math.log(c0 + 1) + c0 * math.log(1 + 1 / c0)
