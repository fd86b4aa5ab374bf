"""Pure-Python implementations of the hot loops.

Truth vectors are ``bytes`` whose entries are 0 (false), 1 (true) or
2 (both).  The compiled module ``ctacp._kernels`` exposes the same
functions with the same results; ``ctacp.kernels`` picks one at import.
"""

# Binary connectives are evaluated by packing two vectors into one
# integer (3*a + b per byte, never carries) and translating the bytes.


def _binary_table(fn):
    table = bytearray(256)
    for x in range(3):
        for y in range(3):
            table[3 * x + y] = fn(x, y)
    return bytes(table)


def _and(x, y):
    if x == 1 and y == 1:
        return 1
    if x == 0 or y == 0:
        return 0
    return 2


def _or(x, y):
    if x == 1 or y == 1:
        return 1
    if x == 0 and y == 0:
        return 0
    return 2


def _imp(x, y):
    return 1 if x == 0 else y


AND_TABLE = _binary_table(_and)
OR_TABLE = _binary_table(_or)
IMP_TABLE = _binary_table(_imp)
NOT_TABLE = bytes([1, 0, 2]) + bytes(253)


def _pack(a, b):
    n = len(a)
    if len(b) != n:
        raise ValueError("truth vectors differ in length")
    packed = int.from_bytes(a, "big") * 3 + int.from_bytes(b, "big")
    return packed.to_bytes(n, "big")


def vec_not(a):
    return bytes(a).translate(NOT_TABLE)


def vec_and(a, b):
    return _pack(a, b).translate(AND_TABLE)


def vec_or(a, b):
    return _pack(a, b).translate(OR_TABLE)


def vec_imp(a, b):
    return _pack(a, b).translate(IMP_TABLE)


def atom_vector(index, n_atoms):
    """Vector of atom ``index``; the first atom is the most significant digit."""
    if not 0 <= index < n_atoms:
        raise ValueError("atom index out of range")
    run = 3 ** (n_atoms - index - 1)
    block = bytes([0]) * run + bytes([1]) * run + bytes([2]) * run
    return block * (3 ** index)


def sat_indices(a, b):
    """Positions where neither vector is false."""
    return [i for i, (x, y) in enumerate(zip(a, b)) if x and y]


def refine_once(n_states, block, offsets, labels, targets):
    """One round of signature refinement.

    Edges of state ``s`` are ``labels[offsets[s]:offsets[s+1]]`` paired
    with ``targets[...]``.  A state's new block is determined by its old
    block and the set of ``(label, block[target])`` pairs; blocks are
    numbered by first appearance in state order.
    """
    ids = {}
    out = [0] * n_states
    for s in range(n_states):
        lo, hi = offsets[s], offsets[s + 1]
        sig = frozenset(zip(labels[lo:hi], [block[t] for t in targets[lo:hi]]))
        key = (block[s], sig)
        bid = ids.get(key)
        if bid is None:
            bid = ids[key] = len(ids)
        out[s] = bid
    return out
