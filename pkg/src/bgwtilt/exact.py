"""Exact and high-precision oracles for conditioned BGW trees.

The central quantity is the forest weight ``W(n, w)``: the probability that
``w`` independent BGW trees have class counts ``n`` (a vector over the classes
``A_1..A_J``, degrees in ``A_0`` are free).  By the cycle lemma, a forest with
``N`` vertices and ``w`` trees built from a given multiset of degrees has
``(w/N) N! / prod(c_k!)`` orderings, which gives

    W(n, w) = sum_m (w/N) N! / (prod n_j! m!) [z^(N-w)] prod G_j^{n_j} G_0^m,

with ``N = |n| + m`` and ``G_j(z) = sum_{k in A_j} p(k) z^k``.  Degree-one
vertices of ``A_0`` are contracted first: each of the ``N`` remaining vertices
carries a chain of them above it, contributing ``(1 - p(1))**(-N)``.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import brentq

from .dist import IntSet, Pmf, Tail
from .family import SetFamily, check_direction, critical_distribution
from .tree import OrderedTree, count_LA

ONE = IntSet.finite([1])


# forest weights


class CountDP:
    """Forest weights ``W(n, w)`` for a distribution over a set family.

    Parameters
    ----------
    F : SetFamily
        The classes; ``A_0`` is taken from ``F``.
    pmf : Pmf, optional
        Offspring law, defaults to ``F.base``.  Its support may be smaller
        than ``F.base``'s (for instance a critical representative).
    exact : bool, optional
        Rational arithmetic; defaults to the mode of ``pmf``.
    """

    def __init__(self, F: SetFamily, pmf: Pmf | None = None, exact: bool | None = None):
        self.F = F
        self.p = F.base if pmf is None else pmf
        if not self.p.support.issubset(F.base.support):
            raise ValueError("the distribution must live on the family's support")
        self.exact = self.p.exact if exact is None else exact
        if self.exact and not self.p.exact:
            raise ValueError("exact weights need an exact distribution")
        self.fp = self.p.to_float()
        self.A0r = F.A0 - ONE
        self.leafy = 0 in F.A0 and self.p(0) > 0
        u = self.p(1) if 1 in F.A0 else self.p.zero()
        self.u = u if self.exact else float(u)
        if self.u >= 1:
            raise ValueError("p(1) = 1 gives no finite trees")
        self._memo: dict = {}
        self._mins = [self._class_min(F.A(j)) for j in range(1, F.J + 1)]

    def _class_min(self, A: IntSet):
        hit = A & self.p.support
        return None if hit.is_empty() else hit.min()

    def _class(self, j: int) -> IntSet:
        return self.A0r if j == 0 else self.F.A(j)

    def _coeffs(self, j: int, D: int) -> list:
        """Coefficients of ``G_j`` up to degree ``D`` in exact arithmetic."""
        p = self.p
        return [p(k) if k in self._class(j) else p.zero() for k in range(D + 1)]

    def _log_coeffs(self, j: int, D: int) -> np.ndarray:
        p = self.fp
        out = np.full(D + 1, -np.inf)
        for k in (self._class(j) & p.support).elements_upto(D):
            v = p(k)
            if v > 0:
                out[k] = math.log(v)
        return out

    def m_range(self, n: Sequence[int], w: int) -> range | None:
        """Possible numbers of contracted ``A_0`` vertices, ``None`` when unbounded."""
        if self.leafy:
            return None
        if (self.A0r & self.p.support).is_empty():
            return range(0, 1)
        lo = sum(nj * mj for nj, mj in zip(n, self._mins) if nj)
        top = sum(n) - w - lo
        return range(0, max(top, -1) + 1)

    def is_achievable(self, n: Sequence[int], w: int = 1) -> bool:
        return is_achievable(self.F, n, w, pmf=self.p)

    # exact route

    def weight(self, n: Sequence[int], w: int = 1, m_cap: int | None = None):
        """``W(n, w)``; exact when the DP is exact.

        With ``0 in A_0`` the sum over ``m`` is infinite; exact mode refuses it
        and float mode truncates it (see :meth:`log_weight`).
        """
        n = tuple(int(x) for x in n)
        if any(x < 0 for x in n) or w < 0:
            return self.p.zero() if self.exact else 0.0
        if not self.exact:
            lw = self.log_weight(n, w, m_cap=m_cap)
            return 0.0 if lw == -math.inf else math.exp(lw)
        key = ("x", n, w)
        if key in self._memo:
            return self._memo[key]
        if sum(n) == 0 and w == 0:
            return Fraction(1)
        rng = self.m_range(n, w)
        if rng is None:
            if m_cap is None:
                raise ValueError("exact weights with 0 in A_0 need a cap on the padding")
            rng = range(0, m_cap + 1)
        total = Fraction(0)
        for m in rng:
            total += self._exact_term(n, w, m)
        self._memo[key] = total
        return total

    def _exact_term(self, n, w, m) -> Fraction:
        N = sum(n) + m
        D = N - w
        if N == 0 or D < 0:
            return Fraction(0)
        poly = [Fraction(1)]
        for j, nj in enumerate(n, start=1):
            if nj:
                poly = _mul_trunc(poly, _pow_trunc(self._coeffs(j, D), nj, D), D)
        if m:
            poly = _mul_trunc(poly, _pow_trunc(self._coeffs(0, D), m, D), D)
        coeff = poly[D] if len(poly) > D else Fraction(0)
        if coeff == 0:
            return Fraction(0)
        multinom = Fraction(math.factorial(N), math.prod(math.factorial(x) for x in n) * math.factorial(m))
        return (1 - self.u) ** (-N) * Fraction(w, N) * multinom * coeff

    # float route

    def log_weight(self, n: Sequence[int], w: int = 1, m_cap: int | None = None,
                   rel_tol: float = 1e-17) -> float:
        """``log W(n, w)`` in floating point with exponential tilting.

        When ``0 in A_0`` the padding sum is truncated once the terms have
        been decreasing and the geometric remainder bound falls below
        ``rel_tol`` relative to the running sum (or at ``m_cap``).
        """
        n = tuple(int(x) for x in n)
        if any(x < 0 for x in n) or w < 0:
            return -math.inf
        key = ("f", n, w)
        if key in self._memo:
            return self._memo[key]
        if sum(n) == 0 and w == 0:
            return 0.0
        if not self.is_achievable(n, w):
            self._memo[key] = -math.inf
            return -math.inf
        rng = self.m_range(n, w)
        logs = []
        if rng is not None:
            for m in rng:
                logs.append(self._log_term(n, w, m))
        else:
            cap = m_cap if m_cap is not None else 50 * (sum(n) + w) + 1000
            prev = -math.inf
            for m in range(cap + 1):
                lt = self._log_term(n, w, m)
                logs.append(lt)
                if m > 2 and lt < prev and lt > -math.inf:
                    ratio = math.exp(lt - prev)
                    total = _logsumexp(logs)
                    if ratio < 1 and lt - math.log1p(-ratio) < total + math.log(rel_tol):
                        break
                prev = lt
        value = _logsumexp(logs)
        if value == -math.inf:
            raise ArithmeticError(f"weight of achievable counts {n} underflowed")
        self._memo[key] = value
        return value

    def _log_term(self, n, w, m) -> float:
        N = sum(n) + m
        D = N - w
        if N == 0 or D < 0:
            return -math.inf
        classes = [(j, nj) for j, nj in enumerate(n, start=1) if nj]
        if m:
            classes.append((0, m))
        logc = {j: self._log_coeffs(j, D) for j, _ in classes}
        lt = _tilt_for(logc, classes, D)
        coef = _log_coeff_at(logc, classes, D, lt)
        if coef == -math.inf:
            return -math.inf
        log_multinom = math.lgamma(N + 1) - sum(math.lgamma(x + 1) for x in n) - math.lgamma(m + 1)
        return (-N * math.log1p(-self.u) + math.log(w) - math.log(N) + log_multinom + coef)

    def log_ratio(self, n_num, w_num, n_den, w_den) -> float:
        return self.log_weight(n_num, w_num) - self.log_weight(n_den, w_den)


def _logsumexp(values) -> float:
    vals = [v for v in values if v > -math.inf]
    if not vals:
        return -math.inf
    top = max(vals)
    return top + math.log(math.fsum(math.exp(v - top) for v in vals))


def _mul_trunc(a: list, b: list, D: int) -> list:
    out = [Fraction(0)] * min(len(a) + len(b) - 1, D + 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j in range(min(len(b), D + 1 - i)):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def _pow_trunc(a: list, e: int, D: int) -> list:
    result = [Fraction(1)]
    base = a[:D + 1]
    while e:
        if e & 1:
            result = _mul_trunc(result, base, D)
        e >>= 1
        if e:
            base = _mul_trunc(base, base, D)
    return result


def _tilted_mean(logc: np.ndarray, lt: float) -> float:
    k = np.arange(len(logc))
    x = logc + k * lt
    top = np.max(x)
    wts = np.exp(x - top)
    return float(np.dot(k, wts) / wts.sum())


def _tilt_for(logc: dict, classes, D: int) -> float:
    """``log theta`` making the tilted sum have mean ``D``."""
    def f(lt):
        return sum(c * _tilted_mean(logc[j], lt) for j, c in classes) - D

    lo, hi = -40.0, 40.0
    flo, fhi = f(lo), f(hi)
    if flo >= 0:
        return lo
    if fhi <= 0:
        return hi
    return brentq(f, lo, hi, xtol=1e-10)


class _Scaled:
    """Nonnegative array with a separate log scale (values relative to max)."""

    __slots__ = ("a", "log_scale")

    def __init__(self, a: np.ndarray, log_scale: float):
        top = a.max()
        if top > 0:
            self.a = a / top
            self.log_scale = log_scale + math.log(top)
        else:
            self.a = a
            self.log_scale = -math.inf

    def mul(self, other: _Scaled, D: int) -> _Scaled:
        return _Scaled(np.convolve(self.a, other.a)[:D + 1], self.log_scale + other.log_scale)


def _log_coeff_at(logc: dict, classes, D: int, lt: float) -> float:
    """``log [z^D] prod_j G_j^{c_j}`` via tilted, rescaled convolution powers."""
    total = None
    for j, c in classes:
        x = logc[j] + np.arange(D + 1) * lt
        top = np.max(x)
        base = _Scaled(np.exp(x - top), top)
        powered = None
        e = c
        while e:
            if e & 1:
                powered = base if powered is None else powered.mul(base, D)
            e >>= 1
            if e:
                base = base.mul(base, D)
        total = powered if total is None else total.mul(powered, D)
    if total is None or len(total.a) <= D or total.a[D] == 0:
        return -math.inf
    return math.log(total.a[D]) + total.log_scale - D * lt


# achievability


def _shifted_support(A: IntSet, p: Pmf, limit: int) -> np.ndarray:
    """Indicator of ``{k - 1 : k in A, p(k) > 0, k - 1 <= limit}`` on ``[-1, limit]``."""
    ind = np.zeros(limit + 2, dtype=bool)
    for k in (A & p.support).elements_upto(limit + 1):
        ind[k] = True
    return ind


def _or_conv(a: np.ndarray, b: np.ndarray, size: int) -> np.ndarray:
    return np.convolve(a.astype(np.int64), b.astype(np.int64))[:size] > 0


def is_achievable(F: SetFamily, n: Sequence[int], w: int = 1, pmf: Pmf | None = None) -> bool:
    """Whether a forest of ``w`` trees can have class counts ``n`` with positive probability."""
    p = F.base if pmf is None else pmf
    n = tuple(int(x) for x in n)
    if len(n) != F.J:
        raise ValueError(f"count vector has {len(n)} entries, family has {F.J} classes")
    if any(x < 0 for x in n) or w < 0:
        return False
    if w == 0:
        return sum(n) == 0
    total = sum(n)
    if 0 in F.A0 and p(0) > 0:
        # with leaves in A_0 every A_j degree is at least one, padding closes the forest
        for j, nj in enumerate(n, start=1):
            if nj and (F.A(j) & p.support).is_empty():
                return False
        return True
    # values are shifted by the number of vertices so index s means sum(k - 1) = s - total
    limit = total
    size = 2 * total + 2
    acc = np.zeros(size, dtype=bool)
    acc[0] = True
    offset = 0
    for j, nj in enumerate(n, start=1):
        if not nj:
            continue
        ind = _shifted_support(F.A(j), p, limit)
        if not ind.any():
            return False
        base, e = ind, nj
        powered = None
        while e:
            if e & 1:
                powered = base if powered is None else _or_conv(powered, base, size)
            e >>= 1
            if e:
                base = _or_conv(base, base, size)
        acc = _or_conv(acc, powered, size)
        offset += nj
    # acc[i] means sum(k - 1) = i - offset is reachable
    A0r = (F.A0 - ONE) & p.support
    target = offset - w
    if target < 0:
        return False
    if A0r.is_empty():
        return bool(acc[target]) if target < size else False
    # padding adds k - 1 >= 1 per vertex of A_0 \ {1}; the reachable set is a semigroup
    steps = [k - 1 for k in A0r.elements_upto(target + 1)]
    semi = np.zeros(target + 1, dtype=bool)
    semi[0] = True
    for s in range(1, target + 1):
        semi[s] = any(semi[s - d] for d in steps if d <= s)
    return any(acc[i] and semi[target - i] for i in range(target + 1))


# tree enumeration


def enumerate_trees(max_size: int, degrees: Sequence[int]) -> Iterator[OrderedTree]:
    """All trees with at most ``max_size`` vertices and out-degrees in ``degrees``."""
    degrees = sorted(set(int(k) for k in degrees))
    seq: list[int] = []

    def rec(open_slots: int):
        if open_slots == 0:
            yield OrderedTree(seq, check=False)
            return
        room = max_size - len(seq)
        for k in degrees:
            # each open slot needs at least one more vertex
            if open_slots - 1 + k > room - 1:
                break
            seq.append(k)
            yield from rec(open_slots - 1 + k)
            seq.pop()

    yield from rec(1)


def enumerate_conditioned(F: SetFamily, n: Sequence[int], max_size: int,
                          pmf: Pmf | None = None) -> Iterator[OrderedTree]:
    """Trees with class counts ``n``, at most ``max_size`` vertices and positive probability."""
    p = F.base if pmf is None else pmf
    n = tuple(n)
    degrees = (p.support).elements_upto(max_size)
    cls = {k: F.class_of(k) for k in degrees}
    seq: list[int] = []
    used = [0] * (F.J + 1)

    def rec(open_slots: int):
        if open_slots == 0:
            if tuple(used[1:]) == n:
                yield OrderedTree(seq, check=False)
            return
        room = max_size - len(seq)
        for k in degrees:
            if open_slots - 1 + k > room - 1:
                break
            j = cls[k]
            if j and used[j] >= n[j - 1]:
                continue
            used[j] += 1
            seq.append(k)
            yield from rec(open_slots - 1 + k)
            seq.pop()
            used[j] -= 1

    yield from rec(1)


def tree_probability(t: OrderedTree, p: Pmf):
    """``P(T_p = t) = prod_u p(k_u(t))``."""
    out = p.one()
    for k, c in Counter(t.degrees).items():
        out *= p(k) ** c
    return out


def signature(t: OrderedTree) -> tuple:
    return tuple(sorted(Counter(t.degrees).items()))


@dataclass(frozen=True)
class ConditionalLaw:
    """Exact conditional law of a BGW tree given its class counts (within a size budget)."""

    law: dict
    total: Fraction
    missing: Fraction


def conditional_law(F: SetFamily, n: Sequence[int], max_size: int, pmf: Pmf | None = None) -> ConditionalLaw:
    """Exact law of ``T_p`` given ``L_A(T_p) = n`` over trees with at most ``max_size`` vertices.

    ``missing`` is the conditional mass of larger trees (zero when the budget
    covers every tree of the event).  With ``0 in A_0`` the normalizer is an
    infinite series and the law is reported relative to the enumerated mass.
    """
    p = F.base if pmf is None else pmf
    if not p.exact:
        raise ValueError("the conditional law oracle runs in exact arithmetic")
    n = tuple(int(x) for x in n)
    if not is_achievable(F, n, 1, pmf=p):
        raise ValueError(f"counts {n} have probability 0")
    law = {}
    for t in enumerate_conditioned(F, n, max_size, pmf=p):
        law[t] = tree_probability(t, p)
    enumerated = sum(law.values(), Fraction(0))
    if 0 in F.A0:
        norm = enumerated
        missing = None
    else:
        norm = CountDP(F, p, exact=True).weight(n, 1)
        missing = 1 - enumerated / norm
    law = {t: v / norm for t, v in law.items()}
    return ConditionalLaw(law, sum(law.values(), Fraction(0)),
                          missing if missing is not None else Fraction(0))


# compatibility oracle


@dataclass(frozen=True)
class OracleVerdict:
    """Result of the compatibility oracle."""

    compatible: bool
    checked_classes: int
    checked_trees: int
    counts: tuple | None = None
    tree: OrderedTree | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.compatible


def compatibility_oracle(F: SetFamily, p_prime: Pmf, bound: int) -> OracleVerdict:
    """Check that ``p_prime`` and ``F.base`` have equal conditional laws given ``L_A``.

    Every tree with at most ``bound`` vertices and degrees in ``supp(p)`` is
    grouped by its class count vector.  Within each group the two probabilities
    must be proportional; when the normalizers are computable exactly
    (``0 not in A_0``) the conditional probabilities themselves are compared,
    which also covers trees larger than the bound.
    """
    p = F.base
    if not (p.exact and p_prime.exact):
        raise ValueError("the oracle needs exact distributions")
    if not p_prime.support.issubset(p.support):
        raise ValueError("supp(p') must be inside supp(p)")
    degrees = p.support.elements_upto(bound)
    groups: dict = defaultdict(list)
    sig_cache: dict = {}
    count = 0
    for t in enumerate_trees(bound, degrees):
        count += 1
        sig = signature(t)
        if sig not in sig_cache:
            sig_cache[sig] = (tree_probability(t, p), tree_probability(t, p_prime))
        groups[count_LA(t, F)].append((t, sig))
    exact_norm = 0 not in F.A0
    dp = CountDP(F, p, exact=True) if exact_norm else None
    dq = CountDP(F, p_prime, exact=True) if exact_norm else None
    for n, members in sorted(groups.items()):
        if exact_norm:
            wp, wq = dp.weight(n, 1), dq.weight(n, 1)
            if wq == 0:
                return OracleVerdict(False, len(groups), count, n, members[0][0],
                                     "counts are achievable under p but not under p'")
            for t, sig in members:
                a, b = sig_cache[sig]
                if a / wp != b / wq:
                    return OracleVerdict(False, len(groups), count, n, t,
                                         f"conditional probabilities differ: {a / wp} vs {b / wq}")
        else:
            ratio = None
            for t, sig in members:
                a, b = sig_cache[sig]
                r = b / a
                if ratio is None:
                    ratio = r
                elif r != ratio:
                    return OracleVerdict(False, len(groups), count, n, t,
                                         "probability ratio is not constant on the class")
    return OracleVerdict(True, len(groups), count, reason="equal conditional laws")


# Catalan forests


def forest_count(k: int, n: int) -> int:
    """Number ``f_{k,n}`` of planar forests of ``k`` full binary trees with ``n`` leaves."""
    if k < 1:
        raise ValueError("a forest needs k >= 1 trees")
    if n < k:
        return 0
    return k * math.comb(2 * n - k - 1, n - 1) // n


def forest_count_F(k: int, n: int) -> int:
    """``F_{k,n} = sum_l l f_{1,l} f_{k,n+1-l}``, in closed form ``C(2n - k, n)``."""
    if not n >= k >= 1:
        raise ValueError("F_{k,n} needs n >= k >= 1")
    return math.comb(2 * n - k, n)


def forest_count_F_convolution(k: int, n: int) -> int:
    """``F_{k,n}`` from its defining convolution."""
    return sum(l * forest_count(1, l) * forest_count(k, n + 1 - l) for l in range(1, n - k + 2))


def binary_forests(k: int, leaves: int) -> Iterator[tuple[OrderedTree, ...]]:
    """All ordered forests of ``k`` full binary trees with ``leaves`` leaves in total."""
    if k == 0:
        if leaves == 0:
            yield ()
        return
    for first in range(1, leaves - k + 2):
        for t in _binary_trees(first):
            for rest in binary_forests(k - 1, leaves - first):
                yield (t,) + rest


def _binary_trees(leaves: int) -> list[OrderedTree]:
    if leaves == 1:
        return [OrderedTree([0])]
    out = []
    for left in range(1, leaves):
        for a in _binary_trees(left):
            for b in _binary_trees(leaves - left):
                out.append(OrderedTree((2,) + a.degrees + b.degrees, check=False))
    return out


# the condensation counterexample


@dataclass(frozen=True)
class CounterexampleRow:
    """One odd ``n`` of the condensation computation.

    ``log_b1`` and ``log_b2`` are the natural logs of
    ``P(k_root >= eps n, L_A = (n, 1))`` and ``P(L_A = (n, 1))``.
    """

    n: int
    log_b1: float
    log_b2: float
    ratio: float


def counterexample_tail_coeff(p0: float, p2: float, b: float) -> float:
    """Coefficient ``c`` making ``p0 + p2 + sum_{k in 3+2N} c b**k = 1``."""
    return (1 - p0 - p2) * (1 - b * b) / b ** 3


def counterexample_family(p0, p2, b, c=None) -> SetFamily:
    """``p`` on ``{0, 2} + (3 + 2N)`` with classes ``A_1 = {0, 2}`` and ``A_2 = 3 + 2N``."""
    p0, p2, b = float(p0), float(p2), float(b)
    if not (p0 > 0 and p2 > 0 and 0 < b < 1):
        raise ValueError("need p0 > 0, p2 > 0 and b in (0, 1)")
    c_fit = counterexample_tail_coeff(p0, p2, b)
    if c is None:
        c = c_fit
    elif abs(float(c) - c_fit) > 1e-9:
        raise ValueError(f"masses do not sum to 1: c = {c}, expected {c_fit}")
    if c <= 0:
        raise ValueError("tail coefficient must be positive")
    p = Pmf({0: p0, 2: p2}, [Tail(3, 2, float(c), b)], mode="float")
    return SetFamily(p, [[0, 2], IntSet.progression(3, 2)])


def _log_root_terms(p0, p2, b, c, n):
    """``log P(k_root = k, L_A = (n,1))`` and ``log P(L_A = (n,1), A_2 vertex has degree k)``."""
    out = []
    lp0, lp2 = math.log(p0), math.log(p2)
    lgn = math.lgamma(n + 1)
    for k in range(3, n + 1, 2):
        half = (n - k) // 2
        lbin = lgn - math.lgamma(half + 1) - math.lgamma(n - half + 1)
        base = math.log(c) + k * math.log(b) + lbin + (n + k) // 2 * lp0 + half * lp2
        out.append((k, base + math.log(k / n), base))
    return out


def counterexample_ratio(p0, p2, b, eps, n, c=None) -> CounterexampleRow:
    """Conditional probability that the root has degree at least ``eps n`` given ``L_A = (n, 1)``."""
    if n % 2 == 0 or n < 3:
        raise ValueError("n must be odd and at least 3")
    counterexample_family(p0, p2, b, c)
    if c is None:
        c = counterexample_tail_coeff(p0, p2, b)
    terms = _log_root_terms(float(p0), float(p2), float(b), float(c), n)
    lb1 = _logsumexp([root for k, root, _ in terms if k > eps * n])
    lb2 = _logsumexp([total for _, _, total in terms])
    return CounterexampleRow(n, lb1, lb2, math.exp(lb1 - lb2))


def c0(eps: float, ab: float) -> float:
    """``r(1 - eps) / (2r - (1 + eps))`` with ``r = (ab)^2 / (1 + (ab)^2)``."""
    r = ab * ab / (1 + ab * ab)
    if not 2 * r > 1 + eps:
        raise ValueError("need ab > (1 + eps)/(1 - eps)")
    return r * (1 - eps) / (2 * r - (1 + eps))


def condensation_floor(eps: float, ab: float, M: float) -> float:
    """Asymptotic lower bound ``eps / (1 + 2 c0 M^2)`` on the root-degree probability."""
    return eps / (1 + 2 * c0(eps, ab) * M * M)


# strong ratio


@dataclass(frozen=True)
class RatioPoint:
    n: tuple
    ratio: float | None
    status: str


def strong_ratio_check(p_alpha: Pmf, F: SetFamily, ns: Sequence[Sequence[int]],
                       shift: Sequence[int]) -> list[RatioPoint]:
    """``P(L_A(T) = n + shift) / P(L_A(T) = n)`` under ``p_alpha`` along ``ns``."""
    dp = CountDP(F, p_alpha.to_float())
    out = []
    for n in ns:
        n = tuple(int(x) for x in n)
        m = tuple(a + b for a, b in zip(n, shift))
        den = dp.log_weight(n, 1)
        num = dp.log_weight(m, 1) if all(x >= 0 for x in m) else -math.inf
        if den == -math.inf:
            out.append(RatioPoint(n, None, "denominator unachievable"))
        elif num == -math.inf:
            out.append(RatioPoint(n, None, "numerator unachievable"))
        else:
            out.append(RatioPoint(n, math.exp(num - den), "ok"))
    return out


# local limits


def height_shapes(h: int, degrees: Sequence[int]) -> Iterator[OrderedTree]:
    """Trees of height at most ``h`` whose vertices below height ``h`` have degrees in
    ``degrees``; vertices at height ``h`` appear as leaves."""
    degrees = sorted(set(degrees))

    def vertex(depth: int) -> Iterator[tuple]:
        if depth == h:
            yield (0,)
            return
        for k in degrees:
            for kids in product(*([list(vertex(depth + 1))] * k)) if k else [()]:
                yield (k,) + tuple(x for kid in kids for x in kid)

    for seq in vertex(0):
        yield OrderedTree(seq, check=False)


def _shape_stats(t: OrderedTree, h: int):
    """Degrees below height ``h`` and the number of vertices at height ``h``."""
    heights = t.heights()
    inner = [k for k, d in zip(t.degrees, heights) if d < h]
    z = sum(1 for d in heights if d == h)
    return inner, z


def kesten_shape_probability(t: OrderedTree, p: Pmf, h: int) -> float:
    """``P(r_h(T*) = t) = Z_h(t) prod_{H(u) < h} p(k_u)``."""
    inner, z = _shape_stats(t, h)
    return z * math.prod(float(p(k)) for k in inner)


def conditioned_shape_log_probability(t: OrderedTree, dp: CountDP, n: Sequence[int], h: int) -> float:
    """``log P(r_h(T) = t, L_A(T) = n)``."""
    inner, z = _shape_stats(t, h)
    rest = list(n)
    logp = 0.0
    for k in inner:
        v = float(dp.p(k))
        if v <= 0:
            return -math.inf
        logp += math.log(v)
        j = dp.F.class_of(k)
        if j:
            rest[j - 1] -= 1
    if any(x < 0 for x in rest):
        return -math.inf
    if z == 0:
        return logp if all(x == 0 for x in rest) else -math.inf
    return logp + dp.log_weight(tuple(rest), z)


@dataclass(frozen=True)
class LimitDistance:
    """Total variation between truncated conditioned and Kesten laws.

    ``tv`` is exact when both enumerated masses are 1; otherwise it is an upper
    bound and ``missing`` holds the unenumerated masses (conditioned, Kesten).
    """

    tv: float
    missing: tuple
    shapes: int


def local_limit_distance(F: SetFamily, alpha, n: Sequence[int], h: int,
                         degree_cap: int | None = None, pmf: Pmf | None = None,
                         p_alpha: Pmf | None = None) -> LimitDistance:
    """TV distance between ``r_h(T_p | L_A = n)`` and ``r_h`` of the Kesten tree of ``p_alpha``."""
    if h < 1:
        raise ValueError("height must be at least 1")
    alpha = check_direction(F, alpha)
    if p_alpha is None:
        p_alpha = critical_distribution(F, alpha)
    pa = p_alpha.to_float()
    dp = CountDP(F, (F.base if pmf is None else pmf).to_float())
    n = tuple(int(x) for x in n)
    denom = dp.log_weight(n, 1)
    if denom == -math.inf:
        raise ValueError(f"counts {n} have probability 0")
    support = F.base.support
    if degree_cap is None:
        degree_cap = sum(n) + 1 if 0 not in F.A0 else 60
        if h >= 2:
            degree_cap = min(degree_cap, 8)
    degrees = support.elements_upto(degree_cap)
    tv = 0.0
    mass_c = mass_k = 0.0
    shapes = 0
    for t in height_shapes(h, degrees):
        shapes += 1
        lc = conditioned_shape_log_probability(t, dp, n, h)
        a = math.exp(lc - denom) if lc > -math.inf else 0.0
        b = kesten_shape_probability(t, pa, h)
        tv += abs(a - b)
        mass_c += a
        mass_k += b
    miss = (max(0.0, 1 - mass_c), max(0.0, 1 - mass_k))
    if miss[0] < 1e-12 and miss[1] < 1e-12:
        miss = (0.0, 0.0)
    return LimitDistance(0.5 * (tv + miss[0] + miss[1]), miss, shapes)


def root_degree_law(F: SetFamily, n: Sequence[int], degrees: Sequence[int], pmf: Pmf | None = None) -> dict:
    """``P(k_root = k | L_A = n)`` for the listed degrees (float)."""
    dp = CountDP(F, (F.base if pmf is None else pmf).to_float())
    n = tuple(int(x) for x in n)
    denom = dp.log_weight(n, 1)
    out = {}
    for k in degrees:
        t = OrderedTree([k] + [0] * k, check=False)
        lc = conditioned_shape_log_probability(t, dp, n, 1)
        out[k] = math.exp(lc - denom) if lc > -math.inf else 0.0
    return out
