"""Offspring distributions on the nonnegative integers.

A :class:`Pmf` is a finite table of atoms plus any number of geometric
tails ``p(k) = c * b**k`` on arithmetic progressions ``{s, s+d, ...}``.
Restricted generating functions, their derivatives, radii of convergence
and means are all available in closed form.  Subsets of the integers are
described with :class:`IntSet`, a small algebra of eventually periodic sets
(finite sets, progressions, unions, intersections and complements).

Two arithmetic modes are supported: ``"exact"`` (``fractions.Fraction``)
and ``"float"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, Union

Number = Union[Fraction, float, int]

INF = math.inf

FLOAT_TOL = 1e-12


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


class IntSet:
    """Eventually periodic subset of the nonnegative integers.

    The set is stored as the elements below ``start`` together with a set of
    residues modulo ``period`` describing membership for ``n >= start``.
    Instances are immutable and kept in a canonical reduced form, so equal
    sets compare equal.
    """

    __slots__ = ("head", "start", "period", "residues")

    def __init__(self, head: Iterable[int] = (), start: int | None = None,
                 period: int = 1, residues: Iterable[int] = ()):
        head = frozenset(int(x) for x in head)
        if any(x < 0 for x in head):
            raise ValueError("IntSet elements must be nonnegative")
        if period < 1:
            raise ValueError("period must be positive")
        residues = frozenset(int(r) % period for r in residues)
        if start is None:
            start = max(head) + 1 if head else 0
        head = frozenset(x for x in head if x < start)
        # shrink the period to the smallest invariant shift
        for d in _divisors(period):
            if all((r + d) % period in residues for r in residues):
                residues = frozenset(r % d for r in residues)
                period = d
                break
        # pull the periodic part as far left as it agrees with the head
        while start > 0 and ((start - 1) in head) == ((start - 1) % period in residues):
            start -= 1
            head = head - {start}
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "residues", residues)

    def __setattr__(self, name, value):
        raise AttributeError("IntSet is immutable")

    # constructors

    @classmethod
    def finite(cls, elements: Iterable[int]) -> IntSet:
        return cls(head=elements)

    @classmethod
    def progression(cls, start: int, step: int) -> IntSet:
        """The set ``{start, start+step, start+2*step, ...}``."""
        if start < 0 or step < 1:
            raise ValueError("progression needs start >= 0 and step >= 1")
        return cls(start=start, period=step, residues=[start])

    @classmethod
    def naturals(cls) -> IntSet:
        return cls(start=0, period=1, residues=[0])

    @classmethod
    def empty(cls) -> IntSet:
        return cls()

    @classmethod
    def coerce(cls, obj) -> IntSet:
        if isinstance(obj, IntSet):
            return obj
        if isinstance(obj, int):
            return cls.finite([obj])
        return cls.finite(obj)

    # membership and structure

    def __contains__(self, n) -> bool:
        if not isinstance(n, int) or n < 0:
            return False
        if n < self.start:
            return n in self.head
        return n % self.period in self.residues

    def is_finite(self) -> bool:
        return not self.residues

    def is_empty(self) -> bool:
        return not self.head and not self.residues

    def __bool__(self) -> bool:
        return not self.is_empty()

    def classes(self) -> list[tuple[int, int]]:
        """Infinite part as progressions ``(first, step)``, sorted by first element."""
        out = []
        for r in self.residues:
            first = self.start + (r - self.start) % self.period
            out.append((first, self.period))
        return sorted(out)

    def finite_part(self) -> list[int]:
        return sorted(self.head)

    def size(self) -> float:
        return len(self.head) if self.is_finite() else INF

    def __len__(self) -> int:
        if not self.is_finite():
            raise TypeError("infinite IntSet has no len()")
        return len(self.head)

    def __iter__(self) -> Iterator[int]:
        if self.is_finite():
            yield from sorted(self.head)
            return
        n = 0
        while True:
            if n in self:
                yield n
            n += 1

    def elements_upto(self, limit: int) -> list[int]:
        """Elements ``<= limit`` in increasing order."""
        return [n for n in range(0, limit + 1) if n in self]

    def min(self) -> int:
        if self.is_empty():
            raise ValueError("min of empty set")
        if self.head:
            return min(self.head)
        return self.classes()[0][0]

    def sup(self) -> float | int:
        """Largest element, or ``inf`` for an infinite set."""
        if self.is_empty():
            raise ValueError("sup of empty set")
        if not self.is_finite():
            return INF
        return max(self.head)

    def issubset(self, other) -> bool:
        return (self - IntSet.coerce(other)).is_empty()

    def isdisjoint(self, other) -> bool:
        return (self & IntSet.coerce(other)).is_empty()

    def diff_gcd(self) -> int:
        """gcd of the difference set ``A - A`` (0 if ``|A| <= 1``)."""
        if self.size() < 2:
            return 0
        gens = sorted(self.head) + [first for first, _ in self.classes()]
        base = min(gens)
        g = reduce(math.gcd, (x - base for x in gens), 0)
        if not self.is_finite():
            g = math.gcd(g, self.period)
        return g

    def shift_gcd(self, shift: int) -> int:
        """gcd of ``{a - shift : a in A}`` (0 if that set is ``{0}`` or empty)."""
        gens = sorted(self.head) + [first for first, _ in self.classes()]
        g = reduce(math.gcd, (abs(x - shift) for x in gens), 0)
        if not self.is_finite():
            g = math.gcd(g, self.period)
        return g

    # boolean algebra

    def _combine(self, other: IntSet, op) -> IntSet:
        other = IntSet.coerce(other)
        period = _lcm(self.period, other.period)
        start = max(self.start, other.start)
        head = [n for n in range(start) if op(n in self, n in other)]
        residues = []
        for r in range(period):
            n = start + (r - start) % period
            if op(n in self, n in other):
                residues.append(r)
        return IntSet(head=head, start=start, period=period, residues=residues)

    def __or__(self, other) -> IntSet:
        return self._combine(other, lambda a, b: a or b)

    def __and__(self, other) -> IntSet:
        return self._combine(other, lambda a, b: a and b)

    def __sub__(self, other) -> IntSet:
        return self._combine(other, lambda a, b: a and not b)

    def complement(self) -> IntSet:
        return IntSet.naturals() - self

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntSet):
            try:
                other = IntSet.coerce(other)
            except TypeError:
                return NotImplemented
        return (self.head, self.start, self.period, self.residues) == (
            other.head, other.start, other.period, other.residues)

    def __hash__(self) -> int:
        return hash((self.head, self.start, self.period, self.residues))

    def __repr__(self) -> str:
        if self.is_finite():
            return f"IntSet({sorted(self.head)})"
        progs = ", ".join(f"{f}+{d}N" for f, d in self.classes())
        return f"IntSet({sorted(self.head)} | {progs})"

    # serialization

    def to_json_obj(self):
        if self.is_finite():
            return sorted(self.head)
        return {
            "elements": sorted(self.head),
            "progressions": [{"start": f, "step": d} for f, d in self.classes()],
        }

    @classmethod
    def from_json_obj(cls, obj) -> IntSet:
        if isinstance(obj, list):
            return cls.finite(int(x) for x in obj)
        if not isinstance(obj, dict):
            raise ValueError(f"cannot parse integer set from {obj!r}")
        out = cls.finite(int(x) for x in obj.get("elements", []))
        progs = obj.get("progressions", [])
        if "progression" in obj:
            progs = list(progs) + [obj["progression"]]
        for prog in progs:
            out = out | cls.progression(int(prog["start"]), int(prog["step"]))
        if obj.get("complement"):
            out = out.complement()
        return out


def _to_number(x, exact: bool) -> Number:
    if isinstance(x, str):
        x = x.strip()
        return Fraction(x) if exact else float(Fraction(x))
    if exact:
        if isinstance(x, float):
            return Fraction(repr(x))
        return Fraction(x)
    return float(x)


def _format_number(x: Number) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def _falling(n: int, order: int) -> int:
    out = 1
    for i in range(order):
        out *= n - i
    return out


def _class_sum(first: int, step: int, x: Number, order: int) -> Number:
    """``sum_i [n]_order x**n`` over ``n = first + step*i``, using closed forms."""
    y = x ** step
    one = 1 - y
    s0 = 1 / one
    lead = x ** first
    if order == 0:
        return lead * s0
    s1 = y / one ** 2
    p1 = first * s0 + step * s1
    if order == 1:
        return lead * p1
    s2 = y * (1 + y) / one ** 3
    p2 = first * first * s0 + 2 * first * step * s1 + step * step * s2
    if order == 2:
        return lead * (p2 - p1)
    raise ValueError("order must be 0, 1 or 2")


@dataclass(frozen=True)
class Tail:
    """Geometric tail ``p(k) = coeff * ratio**k`` for ``k in {start, start+step, ...}``."""

    start: int
    step: int
    coeff: Number
    ratio: Number

    @property
    def progression(self) -> IntSet:
        return IntSet.progression(self.start, self.step)

    def weight(self, k: int) -> Number:
        return self.coeff * self.ratio ** k

    def total(self) -> Number:
        return self.coeff * self.ratio ** self.start / (1 - self.ratio ** self.step)


class Pmf:
    """Probability distribution on the nonnegative integers.

    Parameters
    ----------
    table : mapping
        Finite atoms ``{k: p(k)}``.  Values may be ints, Fractions, floats or
        strings such as ``"1/4"`` or ``"0.25"``.
    tails : iterable of Tail or tuples
        Geometric tails on pairwise disjoint progressions, each disjoint from
        the table's support.
    mode : {"exact", "float"}, optional
        Arithmetic mode.  Defaults to exact unless a float value is given.
    """

    __slots__ = ("table", "tails", "mode", "_support")

    def __init__(self, table=None, tails=(), mode: str | None = None, *, check: bool = True):
        table = dict(table or {})
        tails = [t if isinstance(t, Tail) else Tail(*t) for t in tails]
        if mode is None:
            values = list(table.values())
            for t in tails:
                values += [t.coeff, t.ratio]
            mode = "float" if any(isinstance(v, float) for v in values) else "exact"
        if mode not in ("exact", "float"):
            raise ValueError(f"unknown mode {mode!r}")
        exact = mode == "exact"
        clean = {}
        for k, v in table.items():
            k = int(k)
            v = _to_number(v, exact)
            if k < 0:
                raise ValueError("atoms must sit on nonnegative integers")
            if v < 0:
                raise ValueError(f"negative mass at {k}")
            if v > 0:
                clean[k] = v
        tails = [Tail(int(t.start), int(t.step), _to_number(t.coeff, exact),
                      _to_number(t.ratio, exact)) for t in tails]
        support = IntSet.finite(clean)
        for t in tails:
            if t.start < 0 or t.step < 1:
                raise ValueError("tail needs start >= 0 and step >= 1")
            if not (0 < t.ratio < 1) or t.coeff <= 0:
                raise ValueError("tail needs coeff > 0 and ratio in (0, 1)")
            if not support.isdisjoint(t.progression):
                raise ValueError("tail overlaps the table or another tail")
            support = support | t.progression
        object.__setattr__(self, "table", clean)
        object.__setattr__(self, "tails", tuple(sorted(tails, key=lambda t: (t.start, t.step))))
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "_support", support)
        if check:
            total = self.mass(IntSet.naturals())
            if exact and total != 1:
                raise ValueError(f"total mass is {total}, not 1")
            if not exact and abs(total - 1) > 1e-9:
                raise ValueError(f"total mass is {total!r}, not 1")

    def __setattr__(self, name, value):
        raise AttributeError("Pmf is immutable")

    # basic queries

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    @property
    def support(self) -> IntSet:
        return self._support

    def __call__(self, k: int) -> Number:
        zero = Fraction(0) if self.exact else 0.0
        if k in self.table:
            return self.table[k]
        for t in self.tails:
            if k in t.progression:
                return t.weight(k)
        return zero

    def atoms(self) -> Iterator[tuple[int, Number]]:
        """Yield ``(k, p(k))`` over the support in increasing order (possibly forever)."""
        if not self.tails:
            for k in sorted(self.table):
                yield k, self.table[k]
            return
        k = 0
        while True:
            if k in self._support:
                yield k, self(k)
            k += 1

    def max_finite_atom(self) -> int:
        return max(self.table) if self.table else -1

    def zero(self) -> Number:
        return Fraction(0) if self.exact else 0.0

    def one(self) -> Number:
        return Fraction(1) if self.exact else 1.0

    def num(self, x) -> Number:
        """Coerce ``x`` into this distribution's arithmetic."""
        if isinstance(x, float) and math.isinf(x):
            return x
        return _to_number(x, self.exact)

    # sums over sets

    def _moment(self, A, r, order: int) -> Number:
        """``sum_{n in A} [n]_order p(n) r**(n-order)``, the order-th derivative of g_A."""
        A = IntSet.coerce(A)
        if isinstance(r, float) and math.isinf(r):
            return self._at_infinity(A, order)
        if r < 0:
            raise ValueError("generating functions are evaluated at r >= 0")
        if r == 0:
            if order in A:
                return math.factorial(order) * self(order)
            return self.zero()
        total = self.zero()
        for k, v in self.table.items():
            if k >= order and k in A:
                total += _falling(k, order) * v * r ** (k - order)
        for t in self.tails:
            part = A & t.progression
            if part.is_empty():
                continue
            for k in part.finite_part():
                if k >= order:
                    total += _falling(k, order) * t.weight(k) * r ** (k - order)
            classes = part.classes()
            if not classes:
                continue
            x = t.ratio * r
            if x >= 1:
                return INF
            for first, step in classes:
                total += t.coeff * _class_sum(first, step, x, order) / r ** order
        return total

    def _at_infinity(self, A: IntSet, order: int) -> Number:
        hit = A & self._support
        if hit.is_empty():
            return self.zero()
        if hit.sup() <= order:
            return math.factorial(order) * self(order) if order in hit else self.zero()
        return INF

    def mass(self, A) -> Number:
        """``p(A)``; exact in rational mode."""
        return self._moment(A, self.one(), 0)

    def gen_fn(self, A, r) -> Number:
        """Restricted generating function ``g_A(r)``, ``inf`` when divergent."""
        return self._moment(A, r, 0)

    def deriv_gen_fn(self, A, r, order: int = 1) -> Number:
        """Derivative of ``g_A`` of the given order (1 or 2) at ``r``."""
        return self._moment(A, r, order)

    def radius(self, A) -> float | Number:
        """Radius of convergence ``rho_A`` of ``g_A``."""
        A = IntSet.coerce(A)
        rho = INF
        for t in self.tails:
            if not (A & t.progression).is_finite():
                rho = min(rho, 1 / t.ratio)
        return rho

    def mean(self) -> Number:
        """Mean (always finite for geometric tails)."""
        return self._moment(IntSet.naturals(), self.one(), 1)

    def is_nontrivial(self) -> bool:
        return self(0) > 0 and self(0) + self(1) < 1

    def is_critical(self, tol: float = 1e-9) -> bool:
        m = self.mean()
        return m == 1 if self.exact else abs(m - 1) <= tol

    def size_biased(self, tol: float = 1e-9) -> SizeBiased:
        """The size-biased law ``p*(n) = n p(n)`` of a critical distribution."""
        m = self.mean()
        if (self.exact and m != 1) or (not self.exact and abs(m - 1) > tol):
            raise ValueError(f"size-biasing needs a critical distribution, mean is {m}")
        return SizeBiased(self)

    # conversions

    def to_float(self) -> Pmf:
        if not self.exact:
            return self
        return Pmf({k: float(v) for k, v in self.table.items()},
                   [Tail(t.start, t.step, float(t.coeff), float(t.ratio)) for t in self.tails],
                   mode="float", check=False)

    def to_json_obj(self) -> dict:
        obj = {"table": {str(k): _format_number(v) for k, v in sorted(self.table.items())}}
        tails = [{"start": t.start, "step": t.step, "coeff": _format_number(t.coeff),
                  "ratio": _format_number(t.ratio)} for t in self.tails]
        if len(tails) == 1:
            obj["tail"] = tails[0]
        elif tails:
            obj["tails"] = tails
        if not self.exact:
            obj["mode"] = "float"
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> Pmf:
        if not isinstance(obj, dict) or "table" not in obj:
            raise ValueError("a distribution needs a 'table' entry")
        tails = list(obj.get("tails", []))
        if obj.get("tail") is not None:
            tails.append(obj["tail"])
        tails = [Tail(int(t["start"]), int(t.get("step", 1)), t["coeff"], t["ratio"]) for t in tails]
        return cls(obj["table"], tails, mode=obj.get("mode", "exact"))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pmf):
            return NotImplemented
        return (self.mode, self.table, self.tails) == (other.mode, other.table, other.tails)

    def __hash__(self) -> int:
        return hash((self.mode, tuple(sorted(self.table.items())), self.tails))

    def __repr__(self) -> str:
        atoms = ", ".join(f"{k}: {_format_number(v)}" for k, v in sorted(self.table.items()))
        tails = "".join(f", tail {t.coeff}*{t.ratio}^k on {t.start}+{t.step}N" for t in self.tails)
        return f"Pmf({{{atoms}}}{tails}, mode={self.mode})"


class SizeBiased:
    """Size-biased law ``n p(n)`` of a critical :class:`Pmf`."""

    __slots__ = ("base",)

    def __init__(self, base: Pmf):
        self.base = base

    def __call__(self, k: int) -> Number:
        return k * self.base(k)

    @property
    def support(self) -> IntSet:
        return self.base.support - {0}

    def atoms(self) -> Iterator[tuple[int, Number]]:
        for k, v in self.base.atoms():
            if k > 0:
                yield k, k * v

    def as_pmf(self) -> Pmf:
        """Finite-support size-biased law as a :class:`Pmf`."""
        if self.base.tails:
            raise ValueError("size-biased law of a geometric tail is not geometric")
        return Pmf({k: k * v for k, v in self.base.table.items() if k > 0},
                   mode=self.base.mode, check=self.base.exact)


def uniform(values: Iterable[int]) -> Pmf:
    """Uniform exact distribution on the given integers."""
    values = sorted(set(values))
    return Pmf({k: Fraction(1, len(values)) for k in values})
