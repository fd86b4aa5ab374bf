import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctacp import _pykernels, kernels

try:
    from ctacp import _kernels
except ImportError:
    _kernels = None

BACKENDS = [_pykernels] + ([_kernels] if _kernels is not None else [])


def vectors(n):
    return st.lists(st.integers(0, 2), min_size=n, max_size=n).map(bytes)


pairs = st.integers(0, 200).flatmap(lambda n: st.tuples(vectors(n), vectors(n)))


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__)
def test_truth_tables(impl):
    a = bytes([0, 0, 0, 1, 1, 1, 2, 2, 2])
    b = bytes([0, 1, 2] * 3)
    assert impl.vec_and(a, b) == bytes([0, 0, 0, 0, 1, 2, 0, 2, 2])
    assert impl.vec_or(a, b) == bytes([0, 1, 2, 1, 1, 1, 2, 1, 2])
    assert impl.vec_imp(a, b) == bytes([1, 1, 1, 0, 1, 2, 0, 1, 2])
    assert impl.vec_not(b) == bytes([1, 0, 2] * 3)
    assert impl.atom_vector(0, 2) == bytes([0, 0, 0, 1, 1, 1, 2, 2, 2])
    assert impl.atom_vector(1, 2) == b
    assert impl.sat_indices(a, b) == [4, 5, 7, 8]


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__)
def test_length_mismatch(impl):
    with pytest.raises(ValueError):
        impl.vec_and(b"\x00", b"\x00\x01")
    with pytest.raises(ValueError):
        impl.atom_vector(3, 2)


@pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")
@settings(max_examples=200, deadline=None)
@given(pairs)
def test_vector_parity(ab):
    a, b = ab
    for name in ("vec_and", "vec_or", "vec_imp"):
        assert getattr(_kernels, name)(a, b) == getattr(_pykernels, name)(a, b)
    assert _kernels.vec_not(a) == _pykernels.vec_not(a)
    assert _kernels.sat_indices(a, b) == _pykernels.sat_indices(a, b)


@st.composite
def partitions(draw):
    n = draw(st.integers(1, 30))
    block = draw(st.lists(st.integers(0, 3), min_size=n, max_size=n))
    offsets, labels, targets = [0], [], []
    for _ in range(n):
        edges = draw(st.lists(st.tuples(st.integers(0, 8), st.integers(0, n - 1)), max_size=6))
        labels += [c for c, _ in edges]
        targets += [t for _, t in edges]
        offsets.append(len(labels))
    return n, block, offsets, labels, targets


@pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")
@settings(max_examples=200, deadline=None)
@given(partitions())
def test_refine_parity(args):
    assert _kernels.refine_once(*args) == _pykernels.refine_once(*args)


@settings(max_examples=100, deadline=None)
@given(partitions())
def test_refine_is_a_refinement(args):
    n, block, *_ = args
    out = _pykernels.refine_once(*args)
    for s in range(n):
        for t in range(n):
            if out[s] == out[t]:
                assert block[s] == block[t]


def test_backend_selection():
    assert kernels.BACKEND in ("compiled", "python")
    if _kernels is not None:
        assert kernels.BACKEND == "compiled"


def test_pure_python_override():
    code = "import ctacp.kernels as k; print(k.BACKEND)"
    env = {"CTACP_PURE_PYTHON": "1", "PATH": ""}
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "python"
