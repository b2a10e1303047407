"""Derivations (sequences of splits), their canonical form and the
``(phi, psi)`` codec.

Object-level functions here work for any coefficient group and serve as
the reference.  ``codec_exhaustive_check`` runs the same construction on
flat arrays through the compiled kernel when labels are cyclic, and is
cross-checked against this module in the tests.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from . import _kernels
from .labeled_graph import (GraphError, LabeledGraph, Split, apply_split,
                            destroyed_vertices)


class NonCanonicalError(ValueError):
    pass


class MalformedPairError(ValueError):
    pass


@dataclass(frozen=True)
class Derivation:
    start: LabeledGraph
    splits: tuple

    def __post_init__(self):
        object.__setattr__(self, "splits", tuple(self.splits))

    def __len__(self):
        return len(self.splits)

    def graphs(self) -> list:
        return apply_derivation(self)

    @property
    def result(self) -> LabeledGraph:
        return self.graphs()[-1]

    def splits_json(self) -> list:
        return [s.to_json() for s in self.splits]

    @classmethod
    def from_json(cls, start: LabeledGraph, data) -> "Derivation":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        return cls(start, tuple(Split.from_json(x) for x in data))


@dataclass(frozen=True)
class EncodingPair:
    """``phi[i-1]`` is the value at vertex label ``i``; ``psi[j-1]`` at edge
    label ``j``."""
    phi: tuple
    psi: tuple

    def to_json(self) -> dict:
        return {"phi": list(self.phi), "psi": list(self.psi)}

    @classmethod
    def from_json(cls, data) -> "EncodingPair":
        return cls(tuple(data["phi"]), tuple(data["psi"]))


def apply_derivation(d: Derivation) -> list:
    """The trajectory ``[G_0, ..., G_R]``."""
    out = [d.start]
    for k, s in enumerate(d.splits, start=1):
        try:
            out.append(apply_split(out[-1], s))
        except GraphError as exc:
            raise GraphError(f"split {k} ({s}) does not apply: {exc}") from exc
    return out


def _survives(g: LabeledGraph, e: int, s: Split) -> bool:
    if e == s.edge:
        return False
    gone = destroyed_vertices(g, s)
    u, w = g.endpoints(e)
    return u not in gone and w not in gone


def is_split_ready(d: Derivation, i: int, k: int, graphs: Optional[list] = None) -> bool:
    """Whether split ``k`` (1-based) can be moved to act on ``G_i``: the
    preimage of its support in ``G_i`` survives splits ``i+1 .. k-1``."""
    if not 0 <= i < k <= len(d.splits):
        raise IndexError(f"need 0 <= i < k <= {len(d.splits)}, got i={i}, k={k}")
    graphs = graphs or apply_derivation(d)
    e = d.splits[k - 1].edge
    if e not in graphs[i].edges:
        return False
    for j in range(i + 1, k):
        if not _survives(graphs[j - 1], e, d.splits[j - 1]):
            return False
    return True


def _created_counts(g: LabeledGraph, s: Split) -> int:
    return 1 if g.edges[s.edge].is_loop else 2


def check_commute(g: LabeledGraph, sa: Split, sb: Split) -> bool:
    """Apply ``sa`` then ``sb`` and ``sb`` then ``sa``; compare the results
    as integer-labeled group-labeled graphs after renaming the created
    items of the second order to the names they get in the first.

    Raises ValueError when the supports share a vertex (``sb`` would not be
    ready before ``sa``).
    """
    if sa.edge == sb.edge or set(g.endpoints(sa.edge)) & set(g.endpoints(sb.edge)):
        raise ValueError("supports must be vertex-disjoint")
    M, N = g.max_vertex_label, g.max_edge_label
    na, nb = _created_counts(g, sa), _created_counts(g, sb)
    ab = apply_split(apply_split(g, sa), sb)
    ba = apply_split(apply_split(g, sb), sa)
    vmap = {}
    for t in range(nb):
        vmap[M + 1 + t] = M + na + 1 + t
    for t in range(na):
        vmap[M + nb + 1 + t] = M + 1 + t
    emap = {N + 1: N + 2, N + 2: N + 1}
    return ab == ba.relabeled(vmap, emap)


def ready_pairs(g: LabeledGraph) -> Iterator[tuple]:
    """Ordered pairs ``(sa, sb)`` of splits of ``g`` such that ``sb``
    stays ready after ``sa``: the two supports share no vertex."""
    splits = g.splits()
    for sa in splits:
        gone = set(g.endpoints(sa.edge))
        for sb in splits:
            if sb.edge != sa.edge and not gone & set(g.endpoints(sb.edge)):
                yield sa, sb


def _move_to_front(splits: list, i: int, p: int, n_i: int) -> list:
    """Move the split at 0-based position ``p`` to position ``i`` and
    rename the edges created by positions ``i..p`` accordingly."""
    m = p - i
    def remap(e):
        if n_i < e <= n_i + m:
            return e + 1
        if e == n_i + m + 1:
            return n_i + 1
        return e
    moved = splits[p]
    rest = splits[i:p] + splits[p + 1:]
    return splits[:i] + [moved] + [Split(remap(s.edge), s.kind, s.config) for s in rest]


def canonical_derivation(d: Derivation) -> Derivation:
    """Repeatedly promote, among the remaining splits ready for the current
    prefix graph, the one destroying the lowest-labeled vertex."""
    splits = list(d.splits)
    R = len(splits)
    for i in range(R):
        cur = Derivation(d.start, tuple(splits))
        graphs = apply_derivation(cur)
        gi = graphs[i]
        best, best_low = -1, 0
        for p in range(i, R):
            if p > i and not is_split_ready(cur, i, p + 1, graphs):
                continue
            low = min(destroyed_vertices(gi, splits[p]))
            if best < 0 or low < best_low:
                best, best_low = p, low
        if best != i:
            splits = _move_to_front(splits, i, best, gi.max_edge_label)
    return Derivation(d.start, tuple(splits))


def is_canonical(d: Derivation) -> bool:
    return canonical_derivation(d).splits == d.splits


def codec_domains(g0: LabeledGraph, R: int) -> tuple:
    """Sizes ``(2n - 2 + 2R, 3n - 3 + R)`` of the ``phi`` and ``psi`` domains,
    using the actual maximal labels of ``g0``."""
    return g0.max_vertex_label + 2 * R, g0.max_edge_label + R


def encode_derivation(d: Derivation, R: int, check: bool = True) -> EncodingPair:
    """``phi`` records, for every destroyed vertex, the slot of the
    destroying support at that vertex (the smaller slot for a loop);
    ``psi`` records the configuration of the split each support carries."""
    if len(d.splits) > R:
        raise ValueError(f"derivation of length {len(d.splits)} exceeds budget {R}")
    if check and not is_canonical(d):
        raise NonCanonicalError("encode_derivation needs a canonical derivation")
    nphi, npsi = codec_domains(d.start, R)
    phi = [0] * nphi
    psi = [0] * npsi
    graphs = apply_derivation(d)
    for g, s in zip(graphs, d.splits):
        e = g.edges[s.edge]
        psi[s.edge - 1] = s.config
        if e.is_loop:
            phi[e.tail[0] - 1] = min(e.tail[1], e.head[1])
        else:
            phi[e.tail[0] - 1] = e.tail[1]
            phi[e.head[0] - 1] = e.head[1]
    return EncodingPair(tuple(phi), tuple(psi))


def _find_match(g: LabeledGraph, phi: Sequence[int]) -> Optional[int]:
    for v in g.vertices:
        if v > len(phi) or not phi[v - 1]:
            continue
        e_lab, end = g.slot(v, phi[v - 1])
        e = g.edges[e_lab]
        if e.is_loop:
            return e_lab
        w, t = e.end(1 - end)
        if w <= len(phi) and phi[w - 1] == t:
            return e_lab
    return None


def decode_derivation(pair: EncodingPair, g0: LabeledGraph, R: int) -> Derivation:
    """Scan vertices in ascending label order for a match, apply the split
    named by ``psi`` on the matched edge, repeat until nothing matches."""
    phi, psi = tuple(pair.phi), tuple(pair.psi)
    nphi, npsi = codec_domains(g0, R)
    if len(phi) != nphi or len(psi) != npsi:
        raise MalformedPairError(f"expected domains of size {nphi} and {npsi}")
    if any(x not in (0, 1, 2, 3) for x in phi + psi):
        raise MalformedPairError("values must lie in 0..3")
    phi_left = {i + 1 for i, x in enumerate(phi) if x}
    psi_left = {j + 1 for j, x in enumerate(psi) if x}
    g = g0
    out = []
    while True:
        e = _find_match(g, phi)
        if e is None:
            break
        if len(out) == R:
            raise MalformedPairError(f"more than {R} matches")
        is_loop = g.edges[e].is_loop
        cfg = psi[e - 1]
        if is_loop and cfg > 1:
            raise MalformedPairError(f"loop edge {e} carries configuration {cfg}")
        s = Split(e, "loop" if is_loop else "double", cfg)
        phi_left.difference_update(g.endpoints(e))
        psi_left.discard(e)
        g = apply_split(g, s)
        out.append(s)
    if phi_left or psi_left:
        raise MalformedPairError(f"unconsumed entries: vertices {sorted(phi_left)}, edges {sorted(psi_left)}")
    return Derivation(g0, tuple(out))


def enumerate_derivations(g0: LabeledGraph, R: int) -> Iterator[Derivation]:
    """Every derivation of length <= R, depth first."""
    def walk(g, prefix):
        yield Derivation(g0, tuple(prefix))
        if len(prefix) == R:
            return
        for s in g.splits():
            prefix.append(s)
            yield from walk(apply_split(g, s), prefix)
            prefix.pop()
    yield from walk(g0, [])


# -- array route ---------------------------------------------------------------

_KIND = {"double": 0, "loop": 1}
_KIND_NAME = {0: "double", 1: "loop"}


def graph_arrays(g: LabeledGraph) -> tuple:
    """Flat ``(tv, ts, hv, hs)`` arrays indexed by edge label."""
    n = g.max_edge_label
    tv, ts, hv, hs = [0] * (n + 1), [0] * (n + 1), [0] * (n + 1), [0] * (n + 1)
    for e in g.edges.values():
        tv[e.label], ts[e.label] = e.tail
        hv[e.label], hs[e.label] = e.head
    return tv, ts, hv, hs


def label_column(g: LabeledGraph) -> list:
    if g.group.kind == "trivial":
        return [0] * (g.max_edge_label + 1)
    if g.group.kind != "cyclic":
        raise ValueError("the array route needs trivial or cyclic labels")
    col = [0] * (g.max_edge_label + 1)
    for e in g.edges.values():
        col[e.label] = e.g.value
    return col


def fast_canonical(d: Derivation) -> tuple:
    """``(canonical derivation, encoding)`` through the compiled kernel."""
    out = _kernels.canonicalize_splits(*graph_arrays(d.start),
                                       [(s.edge, _KIND[s.kind], s.config) for s in d.splits])
    if out is None:
        raise GraphError("derivation does not apply")
    splits, phi, psi = out
    return (Derivation(d.start, tuple(Split(e, _KIND_NAME[k], c) for e, k, c in splits)),
            EncodingPair(tuple(phi), tuple(psi)))


@dataclass
class CodecCheckResult:
    derivations: int
    failures: int
    first_failure: Optional[list]
    backend: str

    @property
    def ok(self) -> bool:
        return self.failures == 0


def codec_exhaustive_check(shape: LabeledGraph, R: int, labelings: Sequence[Sequence[int]] = (),
                           modulus: int = 1) -> CodecCheckResult:
    """Enumerate all derivations of length <= R on ``shape`` and check that
    canonicalization preserves the final graph and that decoding inverts
    encoding.  ``labelings`` are residue lists (one value per edge label
    1..N) checked simultaneously; the zero labeling is always included.
    """
    cols = [[0] * (shape.max_edge_label + 1)]
    for lab in labelings:
        if len(lab) != shape.max_edge_label:
            raise ValueError("one residue per edge label is required")
        cols.append([0] + [x % modulus for x in lab])
    count, failures, first = _kernels.derivation_codec_check(*graph_arrays(shape), cols, max(modulus, 1), R)
    return CodecCheckResult(count, failures, first, _kernels.BACKEND)
