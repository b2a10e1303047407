"""The compiled and pure-Python kernels must agree on every input."""
import os
import random
import subprocess
import sys

import pytest

from unigrowth import _kernels
from unigrowth.derivation import graph_arrays
from unigrowth.labeled_graph import theta_graph, trivalent_shapes
from unigrowth.raag import DefiningGraph, build_complement

BACKENDS = _kernels.backends()
needs_both = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def test_python_backend_always_present():
    assert "python" in BACKENDS
    assert _kernels.BACKEND in BACKENDS


def test_env_var_forces_fallback():
    code = "from unigrowth import _kernels; print(_kernels.BACKEND)"
    env = dict(os.environ, UNIGROWTH_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def _random_theta(rng):
    n = rng.randint(1, 7)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
    return DefiningGraph.from_edges(n, edges)


@needs_both
def test_word_kernels_agree():
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    rng = random.Random(12)
    for _ in range(3000):
        theta = _random_theta(rng)
        n, comm = theta.n, theta.comm
        w = tuple(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(rng.randint(0, 20)))
        x = rng.choice((1, -1)) * rng.randint(1, n)
        assert py.append_letter(w, x, comm, n) == cy.append_letter(w, x, comm, n)
        assert py.reduce_word(w, comm, n) == cy.reduce_word(w, comm, n)
        assert py.lex_normal_form(py.reduce_word(w, comm, n), comm, n) == \
            cy.lex_normal_form(cy.reduce_word(w, comm, n), comm, n)
        assert py.normal_form(w, comm, n) == cy.normal_form(w, comm, n)
        cbar = build_complement(theta, rng.randint(0, 3))
        labels = tuple(range(1, n + 1))
        a = py.canonical_code(w, cbar.neighbors, labels, comm, n)
        b = cy.canonical_code(w, cbar.neighbors, labels, comm, n)
        assert tuple(map(tuple, a)) == tuple(map(tuple, b))
        sentinel = n + cbar.c0 * len(w) + 1
        assert py.decode_code(a[1], cbar.neighbors, labels, sentinel) == \
            cy.decode_code(b[1], cbar.neighbors, labels, sentinel)


@needs_both
def test_derivation_kernels_agree():
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    rng = random.Random(13)
    shapes = trivalent_shapes(2) + trivalent_shapes(3)
    for _ in range(500):
        g = rng.choice(shapes)
        arrays = graph_arrays(g)
        splits = []
        h = g
        from unigrowth.labeled_graph import apply_split
        for _ in range(rng.randint(0, 6)):
            s = rng.choice(h.splits())
            splits.append((s.edge, 0 if s.kind == "double" else 1, s.config))
            h = apply_split(h, s)
        a = py.canonicalize_splits(*arrays, splits)
        b = cy.canonicalize_splits(*arrays, splits)
        assert _plain(a) == _plain(b)
        R = len(splits) + 1
        assert _plain(py.decode_splits(*arrays, a[1], a[2], R)) == _plain(cy.decode_splits(*arrays, b[1], b[2], R))
        bogus = [rng.randint(0, 3) for _ in a[1]]
        assert _plain(py.decode_splits(*arrays, bogus, a[2], R)) == _plain(cy.decode_splits(*arrays, bogus, b[2], R))


def _plain(x):
    if isinstance(x, (list, tuple)):
        return tuple(_plain(y) for y in x)
    return x


@needs_both
@pytest.mark.parametrize("R", [2, 3])
def test_codec_check_agrees(R):
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    for shape in trivalent_shapes(2) + trivalent_shapes(3)[:2]:
        arrays = graph_arrays(shape)
        ne = shape.max_edge_label
        cols = [[0] * (ne + 1), [0] + [(i * 2 + 1) % 3 for i in range(ne)]]
        assert _plain(py.derivation_codec_check(*arrays, cols, 3, R)) == \
            _plain(cy.derivation_codec_check(*arrays, cols, 3, R))


def test_selected_backend_runs_codec():
    count, failures, first = _kernels.derivation_codec_check(*graph_arrays(theta_graph()),
                                                             [[0, 0, 0, 0]], 1, 2)
    assert failures == 0 and first is None
    assert count == _count_derivations(theta_graph(), 2)


def _count_derivations(g, R):
    from unigrowth.labeled_graph import apply_split
    if R == 0:
        return 1
    return 1 + sum(_count_derivations(apply_split(g, s), R - 1) for s in g.splits())
