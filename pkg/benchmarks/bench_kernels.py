"""Compare the compiled kernels with the pure-Python fallback.

Run ``python benchmarks/bench_kernels.py``.  Each row times one kernel
on the same inputs under both backends and checks that they agree.
"""

import argparse
import random
import timeit

from ctacp import _pykernels

try:
    from ctacp import _kernels
except ImportError:
    _kernels = None


def vectors(rng, n_atoms, count):
    size = 3**n_atoms
    return [bytes(rng.randrange(3) for _ in range(size)) for _ in range(count)]


def partition_input(rng, n_states, out_degree, n_labels):
    block = [rng.randrange(4) for _ in range(n_states)]
    offsets, labels, targets = [0], [], []
    for _ in range(n_states):
        edges = sorted({(rng.randrange(n_labels), rng.randrange(n_states)) for _ in range(out_degree)})
        labels += [c for c, _ in edges]
        targets += [t for _, t in edges]
        offsets.append(len(labels))
    return n_states, block, offsets, labels, targets


def cases(rng):
    a, b = vectors(rng, 6, 2)
    yield "vec_and (6 atoms)", "vec_and", (a, b), 2000
    yield "vec_imp (6 atoms)", "vec_imp", (a, b), 2000
    yield "vec_not (6 atoms)", "vec_not", (a,), 2000
    yield "atom_vector (6 atoms)", "atom_vector", (2, 6), 2000
    yield "sat_indices (6 atoms)", "sat_indices", (a, b), 500
    yield "refine_once (2k states)", "refine_once", partition_input(rng, 2000, 8, 200), 20
    yield "refine_once (20k states)", "refine_once", partition_input(rng, 20000, 8, 500), 3


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    if _kernels is None:
        print("compiled kernels are not built; only the fallback is available")
    print(f"{'kernel':28} {'python (us)':>12} {'compiled (us)':>14} {'speedup':>8}")
    for label, name, inputs, number in cases(rng):
        py_fn = getattr(_pykernels, name)
        py_t = timeit.timeit(lambda: py_fn(*inputs), number=number) / number * 1e6
        if _kernels is None:
            print(f"{label:28} {py_t:12.1f} {'-':>14} {'-':>8}")
            continue
        c_fn = getattr(_kernels, name)
        if py_fn(*inputs) != c_fn(*inputs):
            raise SystemExit(f"{name}: backends disagree")
        c_t = timeit.timeit(lambda: c_fn(*inputs), number=number) / number * 1e6
        print(f"{label:28} {py_t:12.1f} {c_t:14.1f} {py_t / c_t:7.1f}x")


if __name__ == "__main__":
    main()
