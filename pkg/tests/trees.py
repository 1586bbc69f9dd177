"""Hypothesis strategies for ordered trees."""

from hypothesis import strategies as st

from bgwtilt.tree import OrderedTree


def close(degrees):
    """Cut a degree list where it closes, or pad it with leaves until it does."""
    out, need = [], 1
    for k in degrees:
        out.append(k)
        need += k - 1
        if need == 0:
            return OrderedTree(out)
    return OrderedTree(out + [0] * need)


def trees(max_degree=3, max_len=30):
    return st.lists(st.integers(0, max_degree), min_size=1, max_size=max_len).map(close)
