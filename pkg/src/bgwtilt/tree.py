"""Ordered rooted trees encoded by their preorder out-degree sequence.

The tree ``[2, 0, 3, 0, 0, 0]`` has a root with two children; the first child
is a leaf and the second has three leaf children.  Vertices are referred to by
their preorder index; Neveu labels (tuples of child ranks) are derived on
demand.
"""

from __future__ import annotations

import json
from collections import Counter
from typing import Iterable, Sequence

from .family import SetFamily


class OrderedTree:
    """Finite ordered rooted tree stored as a tuple of preorder out-degrees."""

    __slots__ = ("degrees",)

    def __init__(self, degrees: Iterable[int], check: bool = True):
        degrees = tuple(int(k) for k in degrees)
        if check:
            validate(degrees)
        object.__setattr__(self, "degrees", degrees)

    def __setattr__(self, name, value):
        raise AttributeError("OrderedTree is immutable")

    # text form

    @classmethod
    def parse(cls, text: str) -> OrderedTree:
        """Parse ``"[2,0,3,0,0,0]"``."""
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"cannot parse tree {text!r}") from exc
        if not isinstance(data, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in data):
            raise ValueError(f"tree must be a list of integers, got {text!r}")
        return cls(data)

    def serialize(self) -> str:
        return "[" + ",".join(map(str, self.degrees)) + "]"

    __str__ = serialize

    def __repr__(self) -> str:
        return f"OrderedTree({self.serialize()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, OrderedTree):
            return NotImplemented
        return self.degrees == other.degrees

    def __hash__(self) -> int:
        return hash(self.degrees)

    def __len__(self) -> int:
        return len(self.degrees)

    # structure

    @property
    def size(self) -> int:
        return len(self.degrees)

    def degree_counts(self) -> Counter:
        """``L_k(t)`` for every out-degree ``k`` present."""
        return Counter(self.degrees)

    def leaves(self) -> list[int]:
        """Preorder indices of the leaves."""
        return [i for i, k in enumerate(self.degrees) if k == 0]

    def parents(self) -> list[int]:
        """Parent index of every vertex (``-1`` for the root)."""
        parent = [-1] * len(self.degrees)
        stack: list[list[int]] = []  # [vertex, remaining children]
        for i, k in enumerate(self.degrees):
            if stack:
                top = stack[-1]
                parent[i] = top[0]
                top[1] -= 1
                if top[1] == 0:
                    stack.pop()
            if k:
                stack.append([i, k])
        return parent

    def children(self) -> list[list[int]]:
        """Children of every vertex in order."""
        kids: list[list[int]] = [[] for _ in self.degrees]
        for i, par in enumerate(self.parents()):
            if par >= 0:
                kids[par].append(i)
        return kids

    def heights(self) -> list[int]:
        """Height (distance to the root) of every vertex."""
        h = [0] * len(self.degrees)
        for i, par in enumerate(self.parents()):
            if par >= 0:
                h[i] = h[par] + 1
        return h

    def height(self) -> int:
        return max(self.heights())

    def neveu_labels(self) -> list[tuple[int, ...]]:
        """Neveu label of every vertex; the root is ``()`` and child ranks start at 1."""
        labels: list[tuple[int, ...]] = [()] * len(self.degrees)
        for par, kids in enumerate(self.children()):
            for rank, c in enumerate(kids, start=1):
                labels[c] = labels[par] + (rank,)
        return labels

    def subtree_end(self, i: int) -> int:
        """One past the last preorder index of the subtree rooted at ``i``."""
        need = 1
        j = i
        while need:
            need += self.degrees[j] - 1
            j += 1
        return j

    def subtree(self, i: int) -> OrderedTree:
        return OrderedTree(self.degrees[i:self.subtree_end(i)], check=False)

    # operations

    def count_LA(self, F: SetFamily) -> tuple[int, ...]:
        """Class counts ``(L_{A_1}(t), ..., L_{A_J}(t))``."""
        return count_LA(self, F)

    def truncate(self, h: int) -> OrderedTree:
        return truncate(self, h)

    def graft(self, x: int, sub: OrderedTree) -> OrderedTree:
        return graft(self, x, sub)


def validate(degrees: Sequence[int]) -> None:
    """Raise ``ValueError`` unless ``degrees`` encodes one finite tree."""
    if not degrees:
        raise ValueError("a tree has at least one vertex")
    open_slots = 1
    last = len(degrees) - 1
    for i, k in enumerate(degrees):
        if k < 0:
            raise ValueError(f"negative out-degree at position {i}")
        open_slots += k - 1
        if open_slots == 0 and i < last:
            raise ValueError(f"encoding closes at position {i} before its end")
    if open_slots != 0:
        raise ValueError(f"encoding leaves {open_slots} children unattached")


def count_LA(t: OrderedTree, F: SetFamily) -> tuple[int, ...]:
    """Number of vertices of ``t`` with out-degree in each class ``A_j``."""
    counts = [0] * F.J
    for k, c in Counter(t.degrees).items():
        j = F.class_of(k)
        if j:
            counts[j - 1] += c
    return tuple(counts)


def class_counts(t: OrderedTree, sets: Sequence) -> tuple[int, ...]:
    """Counts of vertices with out-degree in each given integer set."""
    counter = Counter(t.degrees)
    return tuple(sum(c for k, c in counter.items() if k in A) for A in sets)


def truncate(t: OrderedTree, h: int) -> OrderedTree:
    """``r_h(t)``: keep vertices of height at most ``h``; those at height ``h`` become leaves."""
    if h < 0:
        raise ValueError("truncation height must be nonnegative")
    out = []
    stack: list[list[int]] = []  # [height of the children, remaining]
    skip = 0
    for k in t.degrees:
        if skip:
            skip += k - 1
            continue
        depth = stack[-1][0] if stack else 0
        if stack:
            stack[-1][1] -= 1
            if stack[-1][1] == 0:
                stack.pop()
        if depth == h:
            out.append(0)
            skip = k
        else:
            out.append(k)
            if k:
                stack.append([depth + 1, k])
    return OrderedTree(out, check=False)


def graft(t: OrderedTree, x: int, sub: OrderedTree) -> OrderedTree:
    """``t`` with its leaf at preorder index ``x`` replaced by ``sub``."""
    if not 0 <= x < len(t.degrees):
        raise ValueError(f"vertex {x} is not in the tree")
    if t.degrees[x] != 0:
        raise ValueError(f"vertex {x} is not a leaf")
    return OrderedTree(t.degrees[:x] + sub.degrees + t.degrees[x + 1:], check=False)


def in_graft_class(s: OrderedTree, t: OrderedTree, x: int) -> bool:
    """Whether ``s`` is obtained from ``t`` by grafting some tree at the leaf ``x``."""
    if t.degrees[x] != 0:
        raise ValueError(f"vertex {x} is not a leaf")
    tail = len(t.degrees) - x - 1
    if len(s.degrees) < len(t.degrees):
        return False
    if s.degrees[:x] != t.degrees[:x]:
        return False
    if tail and s.degrees[len(s.degrees) - tail:] != t.degrees[x + 1:]:
        return False
    middle = s.degrees[x:len(s.degrees) - tail]
    try:
        validate(middle)
    except ValueError:
        return False
    return True


class TypedTree:
    """An ordered tree with one type label per vertex (preorder)."""

    __slots__ = ("tree", "types")

    def __init__(self, tree: OrderedTree, types: Sequence[int]):
        types = tuple(int(j) for j in types)
        if len(types) != len(tree):
            raise ValueError("one type per vertex is required")
        object.__setattr__(self, "tree", tree)
        object.__setattr__(self, "types", types)

    def __setattr__(self, name, value):
        raise AttributeError("TypedTree is immutable")

    @classmethod
    def from_family(cls, t: OrderedTree, F: SetFamily) -> TypedTree:
        """Type every vertex by the class of its out-degree."""
        return cls(t, [F.class_of(k) for k in t.degrees])

    def type_counts(self, J: int) -> tuple[int, ...]:
        """Number of vertices of each type ``1..J``."""
        c = Counter(self.types)
        return tuple(c.get(j, 0) for j in range(1, J + 1))

    def serialize(self) -> str:
        return "types=[" + ",".join(map(str, self.types)) + "]; tree=" + self.tree.serialize()

    __str__ = serialize

    def __repr__(self) -> str:
        return f"TypedTree({self.serialize()})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TypedTree):
            return NotImplemented
        return (self.tree, self.types) == (other.tree, other.types)

    def __hash__(self) -> int:
        return hash((self.tree, self.types))
