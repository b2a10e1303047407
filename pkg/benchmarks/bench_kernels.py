"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one line per kernel with the best-of-N time for each backend and
the speedup.  Kernels missing from a backend are reported as such.
"""
import argparse
import random
import timeit

from unigrowth import _kernels
from unigrowth.derivation import graph_arrays
from unigrowth.labeled_graph import apply_split, trivalent_shapes
from unigrowth.raag import DefiningGraph, build_complement


def word_workload(rng):
    theta = DefiningGraph.path(7)
    cbar = build_complement(theta)
    words = [tuple(rng.choice((1, -1)) * rng.randint(1, 7) for _ in range(20)) for _ in range(2000)]
    labels = tuple(range(1, 8))
    return theta, cbar, words, labels


def derivation_workload(rng):
    shapes = trivalent_shapes(3)
    items = []
    for _ in range(300):
        g = rng.choice(shapes)
        h, splits = g, []
        for _ in range(5):
            s = rng.choice(h.splits())
            splits.append((s.edge, 0 if s.kind == "double" else 1, s.config))
            h = apply_split(h, s)
        items.append((graph_arrays(g), splits))
    return items


def cases(k, rng):
    theta, cbar, words, labels = word_workload(rng)
    n, comm = theta.n, theta.comm
    derivs = derivation_workload(rng)
    shape = trivalent_shapes(2)[0]
    arrays = graph_arrays(shape)
    zero = [[0] * (shape.max_edge_label + 1)]
    return {
        "normal_form x2000": lambda: [k.normal_form(w, comm, n) for w in words],
        "canonical_code x2000": lambda: [k.canonical_code(w, cbar.neighbors, labels, comm, n) for w in words],
        "canonicalize_splits x300": lambda: [k.canonicalize_splits(*a, s) for a, s in derivs],
        "derivation_codec_check R=4": lambda: k.derivation_codec_check(*arrays, zero, 1, 4),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = _kernels.backends()
    results = {}
    for name, mod in backends.items():
        for label, fn in cases(mod, random.Random(1)).items():
            results.setdefault(label, {})[name] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    print(f"{'kernel':30s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for label, t in results.items():
        py, cy = t.get("python"), t.get("cython")
        if cy is None:
            print(f"{label:30s} {py:10.4f} {'n/a':>10s} {'n/a':>8s}")
        else:
            print(f"{label:30s} {py:10.4f} {cy:10.4f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
