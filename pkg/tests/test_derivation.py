import itertools
import random

import pytest

from unigrowth.derivation import (Derivation, EncodingPair, MalformedPairError, NonCanonicalError,
                                  apply_derivation, canonical_derivation, check_commute,
                                  codec_domains, codec_exhaustive_check, decode_derivation,
                                  encode_derivation, enumerate_derivations, fast_canonical,
                                  is_canonical, is_split_ready, ready_pairs)
from unigrowth.groups import GroupDescriptor
from unigrowth.labeled_graph import (Edge, LabeledGraph, Split, apply_split, canonical_key,
                                     dumbbell_graph, k4_graph, theta_graph, trivalent_shapes)

F2 = GroupDescriptor("free", 2)
F3 = GroupDescriptor("free", 3)
Z3 = GroupDescriptor("cyclic", 3)
SHAPES = trivalent_shapes(2) + trivalent_shapes(3)


def free_labeled(shape, rng, group=F3):
    letters = [s * (i + 1) for i in range(group.param) for s in (1, -1)]
    return LabeledGraph([Edge(e.label, e.tail, e.head,
                              group.element([rng.choice(letters) for _ in range(rng.randint(0, 2))]))
                         for e in shape.edges.values()], group)


def random_derivation(g0, rng, length):
    g, splits = g0, []
    for _ in range(length):
        s = rng.choice(g.splits())
        splits.append(s)
        g = apply_split(g, s)
    return Derivation(g0, tuple(splits))


def test_empty_derivation():
    g = theta_graph()
    d = Derivation(g, ())
    assert apply_derivation(d) == [g]
    pair = encode_derivation(d, 2)
    assert set(pair.phi) == {0} and set(pair.psi) == {0}
    assert decode_derivation(pair, g, 2).splits == ()
    assert codec_domains(g, 2) == (2 * 2 - 2 + 4, 3 * 2 - 3 + 2)


def test_readiness_examples():
    rng = random.Random(1)
    g = theta_graph(F2, [[], [1], [2]])
    d = random_derivation(g, rng, 4)
    for i in range(4):
        assert is_split_ready(d, i, i + 1)
    with pytest.raises(IndexError):
        is_split_ready(d, 2, 2)
    with pytest.raises(IndexError):
        is_split_ready(d, 0, 5)
    # on the theta graph every edge touches both vertices, so the second
    # split's preimage dies with the first split
    d = Derivation(g, (Split(1, "double", 0), Split(2, "double", 0)))
    assert not is_split_ready(d, 0, 2)


def test_readiness_disjoint_supports():
    g = k4_graph()
    # edges 1 = (1,2) and 6 = (3,4) are vertex disjoint
    d = Derivation(g, (Split(1, "double", 3), Split(6, "double", 1)))
    assert is_split_ready(d, 0, 2)
    d = Derivation(g, (Split(1, "double", 3), Split(2, "double", 1)))
    assert not is_split_ready(d, 0, 2)


def test_check_commute_examples():
    g = k4_graph(F2, [[1], [2], [], [-1, 2], [2, 2], [1, -2]])
    assert check_commute(g, Split(1, "double", 0), Split(6, "double", 3))
    with pytest.raises(ValueError):
        check_commute(g, Split(1, "double", 0), Split(2, "double", 0))


def test_commute_shared_affected_edge_all_orientations():
    # supports e' and e joined by an edge a, every orientation of the three
    rng = random.Random(2)
    checked = 0
    for shape in trivalent_shapes(3):
        for _ in range(3):
            g0 = free_labeled(shape, rng)
            for sa, sb in ready_pairs(g0):
                ends_a = set(g0.endpoints(sa.edge))
                ends_b = set(g0.endpoints(sb.edge))
                links = [x for x in g0.edges.values()
                         if {x.tail[0], x.head[0]} & ends_a and {x.tail[0], x.head[0]} & ends_b]
                if not links:
                    continue
                for flips in itertools.product((False, True), repeat=3):
                    g = g0
                    for lab, f in zip((sa.edge, links[0].label, sb.edge), flips):
                        if f:
                            g = g.reverse_edge(lab)
                    assert check_commute(g, sa, sb)
                    checked += 1
    assert checked > 1000


def test_ready_pairs_commute_small_exhaustive():
    for shape in trivalent_shapes(2):
        for labs in itertools.product(range(3), repeat=3):
            g = LabeledGraph([Edge(e.label, e.tail, e.head, Z3.element(labs[e.label - 1]))
                              for e in shape.edges.values()], Z3)
            for sa, sb in ready_pairs(g):
                assert check_commute(g, sa, sb)


def test_canonical_fixpoint_and_swap():
    g = k4_graph()
    d = Derivation(g, (Split(6, "double", 1), Split(1, "double", 3)))
    c = canonical_derivation(d)
    # the split destroying vertex 1 moves first; the other support is renamed
    assert c.splits[0] == Split(1, "double", 3)
    assert c.splits[1].edge == 6 and c.splits[1].config == 1
    assert canonical_derivation(c) == c
    assert is_canonical(c) and not is_canonical(d)
    assert canonical_key(c.result) == canonical_key(d.result)


def test_canonical_preserves_result_random():
    rng = random.Random(3)
    for _ in range(300):
        g0 = free_labeled(rng.choice(SHAPES[2:]), rng) if rng.random() < 0.7 else \
            free_labeled(rng.choice(SHAPES[:2]), rng, F2)
        d = random_derivation(g0, rng, rng.randint(0, 6))
        c = canonical_derivation(d)
        assert len(c) == len(d)
        assert canonical_key(c.result) == canonical_key(d.result)
        assert canonical_derivation(c) == c


def test_literal_and_kernel_canonical_agree():
    rng = random.Random(4)
    for _ in range(300):
        g0 = free_labeled(rng.choice(SHAPES), rng)
        d = random_derivation(g0, rng, rng.randint(0, 6))
        c = canonical_derivation(d)
        fc, pair = fast_canonical(d)
        assert fc.splits == c.splits
        assert pair == encode_derivation(c, len(d))


def test_encode_loop_split():
    g = dumbbell_graph(F2, [[], [1], [2]])
    d = Derivation(g, (Split(2, "loop", 1),))
    pair = encode_derivation(d, 1)
    # a loop split replaces its vertex, so that vertex is recorded with the
    # smaller of the two loop slots
    assert [i + 1 for i, x in enumerate(pair.phi) if x] == [1]
    assert pair.phi[0] == 1
    assert [j + 1 for j, x in enumerate(pair.psi) if x] == [2] and pair.psi[1] == 1
    assert decode_derivation(pair, g, 1).splits == d.splits


def test_encode_bar_split():
    g = dumbbell_graph(F2, [[1], [2], []])
    d = Derivation(g, (Split(1, "double", 3),))
    pair = encode_derivation(d, 1)
    assert [i + 1 for i, x in enumerate(pair.phi) if x] == [1, 2]
    assert [j + 1 for j, x in enumerate(pair.psi) if x] == [1]
    assert decode_derivation(pair, g, 1).splits == d.splits


def test_encode_rejects_noncanonical_and_long():
    g = k4_graph()
    d = Derivation(g, (Split(6, "double", 1), Split(1, "double", 3)))
    with pytest.raises(NonCanonicalError):
        encode_derivation(d, 2)
    with pytest.raises(ValueError):
        encode_derivation(canonical_derivation(d), 1)


def test_decode_malformed_pairs():
    g = theta_graph()
    nphi, npsi = codec_domains(g, 1)
    phi = [0] * nphi
    phi[0] = 2  # vertex 1 slot 2 is edge 2, whose other end sits in slot 2 at vertex 2
    phi[1] = 3
    with pytest.raises(MalformedPairError):
        decode_derivation(EncodingPair(tuple(phi), (0,) * npsi), g, 1)
    with pytest.raises(MalformedPairError):
        decode_derivation(EncodingPair((0,) * (nphi + 1), (0,) * npsi), g, 1)
    with pytest.raises(MalformedPairError):
        decode_derivation(EncodingPair((0,) * nphi, (0, 0, 0, 5)), g, 1)
    psi = [0] * npsi
    psi[2] = 1
    with pytest.raises(MalformedPairError):
        decode_derivation(EncodingPair((0,) * nphi, tuple(psi)), g, 1)


def test_decode_rejects_loop_config_out_of_range():
    g = dumbbell_graph()
    nphi, npsi = codec_domains(g, 1)
    phi = [0] * nphi
    phi[0] = 1
    psi = [0] * npsi
    psi[1] = 3
    with pytest.raises(MalformedPairError):
        decode_derivation(EncodingPair(tuple(phi), tuple(psi)), g, 1)


def test_roundtrip_all_canonical_derivations_theta_f2():
    g = theta_graph(F2, [[], [1], [2]])
    R = 3
    count = 0
    for d in enumerate_derivations(g, R):
        if not is_canonical(d):
            continue
        back = decode_derivation(encode_derivation(d, R, check=False), g, R)
        assert back.splits == d.splits
        count += 1
    assert count > 100


def test_roundtrip_random_rank3_length6():
    rng = random.Random(5)
    for _ in range(300):
        g0 = free_labeled(rng.choice(SHAPES), rng)
        d = canonical_derivation(random_derivation(g0, rng, rng.randint(0, 6)))
        R = len(d) + rng.randint(0, 2)
        assert decode_derivation(encode_derivation(d, R), g0, R).splits == d.splits


def test_derivation_json():
    g = theta_graph()
    d = Derivation(g, (Split(1, "double", 2), Split(4, "double", 1)))
    assert Derivation.from_json(g, d.splits_json()) == d
    assert EncodingPair.from_json(encode_derivation(d, 2, check=False).to_json()) == \
        encode_derivation(d, 2, check=False)


def test_codec_exhaustive_check_small():
    res = codec_exhaustive_check(theta_graph(), 3, [[1, 2, 0]], 3)
    assert res.ok and res.derivations > 0
    with pytest.raises(ValueError):
        codec_exhaustive_check(theta_graph(), 2, [[1, 2]], 3)
