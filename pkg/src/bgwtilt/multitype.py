"""Removal of ``A_0``-type vertices and the induced multi-type offspring law.

:func:`rizzolo` maps a tree onto a tree over the active types by deleting
the vertices whose degree lies in ``A_0`` and reattaching every remaining
vertex below the first remaining vertex of the fringe subtree above its most
recent common ancestor with its predecessor.  Applied to a critical BGW tree,
the result is a multi-type BGW tree whose offspring law is described by
:class:`MultiOffspring`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dist import IntSet, Pmf, Tail
from .family import (SetFamily, check_direction, critical_distribution, is_aperiodic, is_inf,
                     multi_classes, solve_critical, support_of, theta_min)
from .sample import DegreeSampler, sample_bgw_degrees
from .tree import OrderedTree, TypedTree

ONE = IntSet.finite([1])
ZERO = IntSet.finite([0])


# the transformation


def rizzolo(t: OrderedTree, F: SetFamily) -> tuple[TypedTree, dict]:
    """Typed tree over the active types and the type-preserving bijection ``phi``.

    ``phi`` maps the preorder index of every vertex of ``t`` outside ``A_0``
    to the preorder index of its image.
    """
    types = [F.class_of(k) for k in t.degrees]
    keep = [i for i, j in enumerate(types) if j]
    if not keep:
        raise ValueError("every vertex has type 0")
    if len(keep) == len(types):
        return TypedTree(t, types), {i: i for i in keep}
    ends = [t.subtree_end(i) for i in range(len(t))]
    parent_of = t.parents()
    first_kept = [None] * (len(t) + 1)  # first kept index at or after i
    nxt = None
    for i in range(len(t) - 1, -1, -1):
        if types[i]:
            nxt = i
        first_kept[i] = nxt
    children: dict = {keep[0]: []}
    for a, b in zip(keep, keep[1:]):
        m = b
        while not (m <= a < ends[m]):
            m = parent_of[m]
        v = first_kept[m]  # the fringe subtree above m starts at m
        children[v].append(b)
        children[b] = []
    order = []
    stack = [keep[0]]
    while stack:
        u = stack.pop()
        order.append(u)
        stack.extend(reversed(children[u]))
    phi = {u: i for i, u in enumerate(order)}
    tree = OrderedTree([len(children[u]) for u in order], check=False)
    return TypedTree(tree, [types[u] for u in order]), phi


def class_ids(F: SetFamily, degrees: np.ndarray) -> np.ndarray:
    """Class index of every entry of a degree array."""
    values, inverse = np.unique(degrees, return_inverse=True)
    lookup = np.array([F.class_of(int(k)) for k in values], dtype=np.int64)
    return lookup[inverse]


def first_generation(degrees: np.ndarray, types: np.ndarray, J: int) -> tuple[int, np.ndarray]:
    """Root type and child type counts of the transformed tree, from the degree walk.

    With ``S`` the partial sums of ``k - 1`` and ``i_1 < ... < i_n`` the
    vertices outside ``A_0``, vertex ``i_{l+1}`` hangs from the root exactly
    when the minimum of ``S`` over ``[i_l, i_{l+1})`` is a strict new record
    among the minima over ``[i_1, i_l)``.
    """
    idx = np.flatnonzero(types)
    if idx.size == 0:
        raise ValueError("every vertex has type 0")
    counts = np.zeros(J, dtype=np.int64)
    root = int(types[idx[0]])
    if idx.size == 1:
        return root, counts
    walk = np.cumsum(degrees.astype(np.int64) - 1)
    seg = np.minimum.reduceat(walk, idx)[:-1]
    prior = np.concatenate(([np.iinfo(np.int64).max], np.minimum.accumulate(seg)[:-1]))
    hit = seg < prior
    kids = types[idx[1:]][hit]
    np.add.at(counts, kids - 1, 1)
    return root, counts


# the multi-type offspring law


@dataclass(frozen=True)
class MultiOffspring:
    """Offspring law over the active types induced by a critical direction.

    Attributes
    ----------
    F : SetFamily
    alpha : tuple
        Direction over all ``J`` classes.
    theta : float
        Critical tilt ``theta_alpha``.
    p_alpha : Pmf
        The critical compatible distribution.
    jstar : tuple
        Active classes (positive direction entries).
    alpha_star : tuple
        Direction restricted to ``jstar``.
    r : float
        ``P(N <= T)``, equal to ``1 - theta_min / theta_alpha``.
    """

    F: SetFamily
    alpha: tuple
    theta: float
    p_alpha: Pmf
    jstar: tuple
    alpha_star: tuple
    r: float

    @classmethod
    def from_family(cls, F: SetFamily, alpha) -> MultiOffspring:
        alpha = check_direction(F, alpha)
        sol = solve_critical(F, alpha)
        if sol.theta is None:
            raise ValueError(f"no critical distribution in this direction: {sol.reason}")
        p_alpha = critical_distribution(F, alpha).to_float()
        jstar = tuple(support_of(alpha))
        astar = tuple(float(alpha[j - 1]) for j in jstar)
        return cls(F, alpha, float(sol.theta), p_alpha, jstar, astar, closed_form_r(F, sol.theta))

    @property
    def size(self) -> int:
        return len(self.jstar)

    def index(self, j: int) -> int:
        return self.jstar.index(j)


def closed_form_r(F: SetFamily, theta) -> float:
    """``1 - theta_min / theta_alpha`` (``1`` when ``0 not in A_0``)."""
    if 0 not in F.A0 or is_inf(theta):
        return 1.0
    return 1.0 - float(theta_min(F)) / float(theta)


def hitting_r(m: MultiOffspring) -> float:
    """``P(N <= T)`` from the smallest fixed point of ``x = sum_{k in A_0} p_alpha(k) x^k``."""
    p, A0 = m.p_alpha, m.F.A0
    if p.mass(A0) == 0 or p(0) == 0 or 0 not in A0:
        return 1.0
    f = lambda x: p.gen_fn(A0, x) - x
    if f(1.0 - 1e-15) >= 0:  # the smallest root is 1 only when the A_0 walk cannot drift down
        return 0.0
    return 1.0 - brentq(f, 0.0, 1.0 - 1e-15, xtol=1e-16, rtol=1e-15)


def _restricted(p: Pmf, A: IntSet) -> Pmf:
    mass = float(p.mass(A))
    table = {k: v / mass for k, v in p.table.items() if k in A}
    tails = []
    for t in p.tails:
        part = A & t.progression
        for k in part.finite_part():
            table[k] = t.weight(k) / mass
        for first, step in part.classes():
            tails.append(Tail(first, step, t.coeff / mass, t.ratio))
    return Pmf(table, tails, mode="float", check=False)


class OffspringSampler:
    """Draws of ``X^A_j`` conditioned on ``{N <= T}`` for every active type ``j``."""

    def __init__(self, m: MultiOffspring, max_retries: int = 10 ** 6):
        self.m = m
        p = m.p_alpha
        F = m.F
        self.s = float(1 - p.mass(F.A0))
        self.type_samplers = {j: DegreeSampler(_restricted(p, F.A(j))) for j in m.jstar}
        self.zero_sampler = DegreeSampler(_restricted(p, F.A0)) if self.s < 1 else None
        self.max_retries = max_retries
        self.probs = np.array(m.alpha_star)

    def sample(self, j: int, rng: np.random.Generator) -> np.ndarray:
        m = self.m
        x = int(self.type_samplers[j].draw(rng, 1)[0])
        extra = self._padding(rng)
        y = x + extra
        z = int(rng.binomial(y, m.r)) if y else 0
        return rng.multinomial(z, self.probs) if z else np.zeros(m.size, dtype=np.int64)

    def _padding(self, rng) -> int:
        """``sum_{i < N} X^0_i`` drawn on the event that the partial sums avoid ``-1``."""
        if self.zero_sampler is None:
            return 0
        for _ in range(self.max_retries):
            n = int(rng.geometric(self.s))
            if n == 1:
                return 0
            steps = self.zero_sampler.draw(rng, n - 1) - 1
            walk = np.cumsum(steps)
            if not (walk == -1).any():
                return int(walk[-1])
        raise TimeoutError("conditioning on N <= T exceeded its retry budget")


def offspring_sample(m: MultiOffspring, j: int, rng: np.random.Generator,
                     sampler: OffspringSampler | None = None) -> np.ndarray:
    """One draw of the type-``j`` offspring count vector (indexed like ``m.jstar``)."""
    if j not in m.jstar:
        raise ValueError(f"type {j} is not active")
    return (sampler or OffspringSampler(m)).sample(j, rng)


def expected_children(m: MultiOffspring) -> np.ndarray:
    """``E[Y_j] = 1 + r (m_j / p_alpha(A_j) + (m_0 - 1) / p_alpha(A_0^c))`` per active type."""
    p, F = m.p_alpha, m.F
    rest = float(1 - p.mass(F.A0))
    m0 = float(p.deriv_gen_fn(F.A0, 1.0)) if not F.A0.is_empty() else 0.0
    out = []
    for j in m.jstar:
        A = F.A(j)
        mj = float(p.deriv_gen_fn(A, 1.0))
        out.append(1 + m.r * (mj / float(p.mass(A)) + (m0 - 1) / rest))
    return np.array(out)


def mean_matrix(m: MultiOffspring) -> np.ndarray:
    """Rank-one mean matrix ``m_{jl} = E[Y_j] alpha_l`` over the active types."""
    ey = expected_children(m)
    ey[np.abs(ey) < 1e-13] = 0.0
    return np.outer(ey, np.array(m.alpha_star))


@dataclass(frozen=True)
class OffspringReport:
    spectral_radius: float
    critical: bool
    zero_rows: tuple
    positive_rows: tuple
    aperiodic: bool


def check_offspring(m: MultiOffspring) -> OffspringReport:
    """Criticality, positivity pattern and aperiodicity of the multi-type law."""
    M = mean_matrix(m)
    rho = float(max(abs(np.linalg.eigvals(M))))
    zero = tuple(j for j, row in zip(m.jstar, M) if not row.any())
    positive = tuple(j for j, row in zip(m.jstar, M) if (row > 0).all())
    try:
        aper = bool(is_aperiodic(m.F, m.alpha, m.theta))
    except ValueError:
        aper = False
    return OffspringReport(rho, abs(rho - 1) <= 1e-9, zero, positive, aper)


def expected_zero_rows(m: MultiOffspring) -> tuple:
    """Rows forced to vanish: the class of 0 when it is ``{0}`` with ``A_0`` inside ``{1}``,
    or when the critical tilt is 0."""
    F = m.F
    j0 = F.zero_class()
    if j0 not in m.jstar:
        return ()
    if (F.A(j0) == ZERO and F.A0.issubset(ONE)) or m.theta == 0:
        return (j0,)
    return ()


def normalize_zero_singleton(F: SetFamily, alpha) -> tuple[SetFamily, tuple]:
    """Move a class equal to ``{0}`` into ``A_0`` and renormalize the direction."""
    alpha = check_direction(F, alpha)
    jstar = support_of(alpha)
    if multi_classes(F, jstar):
        raise ValueError("some active class has at least two degrees")
    if not F.A0.issubset(ONE):
        raise ValueError("A_0 must be inside {1}")
    j0 = next((j for j in range(1, F.J + 1) if F.A(j) == ZERO), None)
    if j0 is None:
        raise ValueError("no class equals {0}")
    keep = [j for j in range(1, F.J + 1) if j != j0]
    if not keep:
        raise ValueError("removing the class of 0 leaves no class")
    rest = 1 - alpha[j0 - 1]
    return SetFamily(F.base, [F.A(j) for j in keep]), tuple(alpha[j - 1] / rest for j in keep)


# sampling the two sides of the push-forward identity


def sample_transformed_first_generation(m: MultiOffspring, rng: np.random.Generator,
                                        cap: int = 10 ** 6, max_tries: int = 10 ** 6):
    """Root type and first-generation counts of the transformed critical tree.

    The critical BGW tree is redrawn until it has a vertex outside ``A_0``;
    draws exceeding ``cap`` vertices are redrawn as well.
    """
    F = m.F
    sampler = DegreeSampler(m.p_alpha)
    lookup: dict = {}
    for _ in range(max_tries):
        deg = sample_bgw_degrees(m.p_alpha, rng, cap, sampler)
        if deg is None:
            continue
        types = _lookup_classes(F, deg, lookup)
        if not types.any():
            continue
        root, counts = first_generation(deg, types, F.J)
        return root, counts[[j - 1 for j in m.jstar]]
    raise TimeoutError("no tree with a vertex outside A_0 within the budget")


def _lookup_classes(F, deg, cache) -> np.ndarray:
    values, inverse = np.unique(deg, return_inverse=True)
    lookup = np.empty(len(values), dtype=np.int64)
    for i, k in enumerate(values.tolist()):
        j = cache.get(k)
        if j is None:
            j = cache[k] = F.class_of(k)
        lookup[i] = j
    return lookup[inverse]


def sample_multitype_first_generation(m: MultiOffspring, rng: np.random.Generator,
                                      sampler: OffspringSampler | None = None):
    """Root type drawn from ``alpha_star`` and its offspring vector."""
    sampler = sampler or OffspringSampler(m)
    j = m.jstar[int(rng.choice(m.size, p=np.array(m.alpha_star)))]
    return j, sampler.sample(j, rng)
