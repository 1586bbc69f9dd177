"""Tilted offspring families, directions, the mean map and the critical solver.

A :class:`SetFamily` fixes disjoint degree classes ``A_1..A_J`` inside the
support of a base distribution ``p``; the leftover degrees form ``A_0``.
Distributions compatible with ``p`` (same conditional tree laws given the
class counts) are parametrized either by a tilt ``(theta, beta)`` or by a
direction ``(theta, alpha)``.  This module decides membership of these
parameter sets, builds the corresponding distributions, evaluates the mean
``mu(theta, alpha)`` and solves ``mu = 1`` for the critical tilt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from scipy.optimize import brentq

from .dist import INF, IntSet, Number, Pmf, Tail

ONE_SET = IntSet.finite([1])
ZERO_ONE = IntSet.finite([0, 1])


def is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x)


@dataclass(frozen=True)
class Verdict:
    """Boolean answer together with a short reason."""

    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


class SetFamily:
    """Pairwise disjoint degree classes ``A_1..A_J`` refining ``supp(p)``.

    Parameters
    ----------
    base : Pmf
        The distribution whose support is partitioned.
    sets : sequence of IntSet or iterables of int
        The classes ``A_1..A_J``; each must be a nonempty subset of the support.
    """

    def __init__(self, base: Pmf, sets: Sequence):
        sets = tuple(IntSet.coerce(A) for A in sets)
        if not sets:
            raise ValueError("a set family needs at least one class")
        support = base.support
        union = IntSet.empty()
        for j, A in enumerate(sets, start=1):
            if A.is_empty():
                raise ValueError(f"class A_{j} is empty")
            if not A.issubset(support):
                raise ValueError(f"class A_{j} is not contained in the support")
            if not A.isdisjoint(union):
                raise ValueError(f"class A_{j} overlaps an earlier class")
            union = union | A
        self.base = base
        self.sets = sets
        self.A0 = support - union

    @property
    def J(self) -> int:
        return len(self.sets)

    def A(self, j: int) -> IntSet:
        """Class ``A_j`` for ``j`` in ``0..J`` (``A(0)`` is the leftover class)."""
        return self.A0 if j == 0 else self.sets[j - 1]

    def class_of(self, k: int) -> int:
        """Index ``j`` with ``k in A_j``; raises for degrees outside the support."""
        for j, A in enumerate(self.sets, start=1):
            if k in A:
                return j
        if k in self.A0:
            return 0
        raise ValueError(f"degree {k} is outside the support")

    def zero_class(self) -> int:
        """The index ``j0`` with ``0 in A_{j0}``."""
        return self.class_of(0)

    def with_base(self, p: Pmf) -> SetFamily:
        """Same classes over another distribution with the same support."""
        if p.support != self.base.support:
            raise ValueError("replacement distribution must have the same support")
        return SetFamily(p, self.sets)

    def finite_classes(self) -> list[int]:
        """Indices ``j >= 1`` with ``sup A_j < inf``."""
        return [j for j in range(1, self.J + 1) if self.A(j).is_finite()]

    def to_json_obj(self) -> dict:
        return {"sets": [A.to_json_obj() for A in self.sets]}

    @classmethod
    def from_json_obj(cls, base: Pmf, obj: dict) -> SetFamily:
        if not isinstance(obj, dict) or "sets" not in obj:
            raise ValueError("a set family needs a 'sets' entry")
        sets = [IntSet.from_json_obj(s) for s in obj["sets"]]
        for key, prog in (obj.get("tails") or {}).items():
            j = int(key)
            sets[j - 1] = sets[j - 1] | IntSet.progression(int(prog["start"]), int(prog["step"]))
        return cls(base, sets)

    def __repr__(self) -> str:
        return f"SetFamily(A0={self.A0!r}, sets={list(self.sets)!r})"


@dataclass(frozen=True)
class TiltParam:
    """Tilt parameter ``(theta, beta)`` with ``theta`` in ``[0, inf]``."""

    theta: Number
    beta: tuple

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(self.beta))


@dataclass(frozen=True)
class DirParam:
    """Direction parameter ``(theta, alpha)`` with ``theta`` in ``[0, inf]``."""

    theta: Number
    alpha: tuple

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))


# helpers on families and vectors

def _close(a, b, tol=1e-10) -> bool:
    if isinstance(a, Fraction) and isinstance(b, (Fraction, int)):
        return a == b
    return abs(a - b) <= tol * max(1.0, abs(b))


def parse_vector(values, exact: bool = True) -> tuple:
    """Parse a direction/weight vector from numbers or strings like ``"0.6,0.4"``."""
    if isinstance(values, str):
        values = [v for v in values.split(",") if v.strip()]
    out = []
    for v in values:
        if isinstance(v, str):
            v = Fraction(v.strip()) if exact else float(v)
        out.append(v)
    return tuple(out)


def check_direction(F: SetFamily, alpha) -> tuple:
    """Validate that ``alpha`` lies in the simplex of dimension ``J``."""
    alpha = parse_vector(alpha)
    if len(alpha) != F.J:
        raise ValueError(f"direction has {len(alpha)} entries, family has {F.J} classes")
    if any(a < 0 for a in alpha):
        raise ValueError("direction entries must be nonnegative")
    if not _close(sum(alpha), 1):
        raise ValueError(f"direction entries sum to {sum(alpha)}, not 1")
    return alpha


def support_of(weights) -> list[int]:
    """Indices ``j >= 1`` with positive weight (``J*``)."""
    return [j for j, w in enumerate(weights, start=1) if w > 0]


def multi_classes(F: SetFamily, jstar: Sequence[int]) -> list[int]:
    """``J**``: indices in ``jstar`` whose class has at least two elements."""
    return [j for j in jstar if F.A(j).size() >= 2]


def condition_patho(F: SetFamily, alpha) -> bool:
    """``A_0`` has a degree other than 1, or some active class has two or more degrees."""
    jstar = support_of(alpha)
    return not (F.A0 - ONE_SET).is_empty() or bool(multi_classes(F, jstar))


def _union(F: SetFamily, indices) -> IntSet:
    out = IntSet.empty()
    for j in indices:
        out = out | F.A(j)
    return out


def _max_min(F: SetFamily, jstar) -> int:
    return max(F.A(j).min() for j in jstar)


def _max_max(F: SetFamily, jstar) -> float:
    return max(F.A(j).sup() for j in jstar)


# tilt parameters

def _beta0(F: SetFamily, theta) -> Number:
    p = F.base
    if theta == 0 or is_inf(theta):
        return p(1) if 1 in F.A0 else p.zero()
    return 1 / p.num(theta) if p.exact and not isinstance(theta, float) else 1 / theta


def in_Pa(F: SetFamily, t: TiltParam) -> Verdict:
    """Membership of ``(theta, beta)`` in the parameter set ``Pa(p, A)``."""
    p = F.base
    theta, beta = t.theta, t.beta
    if len(beta) != F.J:
        return Verdict(False, f"beta has {len(beta)} entries, family has {F.J} classes")
    if any(b < 0 for b in beta):
        return Verdict(False, "beta must be nonnegative")
    if theta < 0:
        return Verdict(False, "theta must be nonnegative")
    jb = support_of(beta)
    b0 = _beta0(F, theta)
    if theta == 0 or is_inf(theta):
        total = b0 + sum(beta[j - 1] for j in jb)
        if not _close(total, 1):
            return Verdict(False, f"degenerate normalization fails: weights sum to {total}")
        if theta == 0 and 0 in F.A0:
            return Verdict(False, "theta = 0 requires 0 outside A_0")
        if is_inf(theta):
            if not F.A0.issubset(ZERO_ONE):
                return Verdict(False, "theta = inf requires A_0 inside {0, 1}")
            if any(not F.A(j).is_finite() for j in jb):
                return Verdict(False, "theta = inf requires bounded active classes")
        return Verdict(True, "degenerate")
    g0 = p.gen_fn(F.A0, theta)
    if is_inf(g0):
        return Verdict(False, "g_{A_0}(theta) diverges")
    total = b0 * g0
    for j in jb:
        g = p.gen_fn(F.A(j), theta)
        if is_inf(g):
            return Verdict(False, f"g_{{A_{j}}}(theta) diverges")
        total += beta[j - 1] * g
    if not _close(total, 1):
        return Verdict(False, f"normalization fails: sum beta_j g_j(theta) = {total}")
    return Verdict(True, "non-degenerate")


def in_Pa_star(F: SetFamily, t: TiltParam) -> Verdict:
    """Membership in ``Pa*``: ``Pa`` without ``beta = 0``, except ``(theta_min, 0)`` when ``0 in A_0``."""
    v = in_Pa(F, t)
    if not v:
        return v
    if all(b == 0 for b in t.beta):
        if 0 in F.A0 and _close(t.theta, theta_min(F)):
            return Verdict(True, "extinction point (theta_min, 0)")
        return Verdict(False, "beta = 0 is excluded away from theta_min")
    return v


def tilde_p(F: SetFamily, t: TiltParam) -> Pmf:
    """The tilted distribution: ``beta_j theta**n p(n)`` on ``A_j`` (``beta_0 = 1/theta``)."""
    v = in_Pa(F, t)
    if not v:
        raise ValueError(f"parameter outside Pa(p, A): {v.reason}")
    p = F.base
    theta = t.theta
    weights = {0: _beta0(F, theta)}
    weights.update({j: t.beta[j - 1] for j in support_of(t.beta)})
    if theta == 0 or is_inf(theta):
        table = {}
        for j, w in weights.items():
            if w == 0 or F.A(j).is_empty():
                continue
            k = F.A(j).min() if theta == 0 else F.A(j).sup()
            table[k] = table.get(k, p.zero()) + w
        return Pmf(table, mode=p.mode)
    return _reweight(p, F, theta, weights)


def _reweight(p: Pmf, F: SetFamily, theta, weights: dict) -> Pmf:
    """``w_j theta**k p(k)`` on ``A_j`` for the classes listed in ``weights``."""
    table = {}
    tails = []
    for k, v in p.table.items():
        j = F.class_of(k)
        if weights.get(j, 0):
            table[k] = weights[j] * theta ** k * v
    for tail in p.tails:
        for j, w in weights.items():
            if not w:
                continue
            part = F.A(j) & tail.progression
            for k in part.finite_part():
                table[k] = w * theta ** k * tail.weight(k)
            for first, step in part.classes():
                tails.append(Tail(first, step, w * tail.coeff, tail.ratio * theta))
    exact = p.exact and not isinstance(theta, float) and all(
        not isinstance(w, float) for w in weights.values())
    return Pmf(table, tails, mode="exact" if exact else "float", check=exact)


def is_compatible_param(F: SetFamily, t: TiltParam) -> Verdict:
    """Whether ``(theta, beta)`` in ``Pa*`` yields a non-trivial tilted distribution."""
    v = in_Pa_star(F, t)
    if not v:
        return Verdict(False, f"not in Pa*: {v.reason}")
    p = F.base
    theta = t.theta
    jstar = support_of(t.beta)
    if 0 < theta and not is_inf(theta):
        AJ = _union(F, [0] + jstar)
        if 0 not in AJ:
            return Verdict(False, "0 is not in an active class")
        if not p.mass(AJ - ZERO_ONE) > 0:
            return Verdict(False, "no active degree above 1")
        return Verdict(True, "non-degenerate and non-trivial")
    if theta == 0:
        if 0 not in _union(F, jstar):
            return Verdict(False, "theta = 0 needs 0 in an active class")
        if not _max_min(F, jstar) > 1:
            return Verdict(False, "theta = 0 needs max of min A_j above 1")
        return Verdict(True, "degenerate at 0 and non-trivial")
    if not any(F.A(j) == IntSet.finite([0]) for j in jstar):
        return Verdict(False, "theta = inf needs an active class equal to {0}")
    if not _max_max(F, jstar) > 1:
        return Verdict(False, "theta = inf needs max of max A_j above 1")
    return Verdict(True, "degenerate at inf and non-trivial")


# directions

def direction_of(p_prime: Pmf, F: SetFamily) -> tuple:
    """Direction ``alpha_j = p'(A_j) / (1 - p'(A_0))`` of a distribution."""
    rest = p_prime.one() - p_prime.mass(F.A0)
    if rest <= 0 or (not p_prime.exact and rest < 1e-15):
        raise ValueError("direction undefined: all mass sits on A_0")
    return tuple(p_prime.mass(F.A(j)) / rest for j in range(1, F.J + 1))


def is_possible_direction(F: SetFamily, alpha) -> Verdict:
    """``alpha`` avoids the ineligible set (a zero weight on the class of 0,
    or full weight on a class that together with ``A_0`` stays inside ``{0, 1}``)."""
    alpha = check_direction(F, alpha)
    for j in range(1, F.J + 1):
        a = alpha[j - 1]
        if a == 0 and 0 in F.A(j):
            return Verdict(False, f"alpha_{j} = 0 but 0 is in A_{j}")
        if _close(a, 1) and (F.A0 | F.A(j)).issubset(ZERO_ONE):
            return Verdict(False, f"alpha_{j} = 1 but A_0 and A_{j} stay in {{0, 1}}")
    return Verdict(True, "eligible")


def _require_direction(F: SetFamily, alpha) -> tuple:
    alpha = check_direction(F, alpha)
    v = is_possible_direction(F, alpha)
    if not v:
        raise ValueError(f"ineligible direction: {v.reason}")
    return alpha


def q1(F: SetFamily) -> Number:
    """``1 - p(1) 1{1 in A_0}``."""
    p = F.base
    return p.one() - (p(1) if 1 in F.A0 else p.zero())


# the parameter interval I_alpha

def theta_min(F: SetFamily) -> Number:
    """Smallest root of ``g_{A_0}(theta) = theta`` in ``[0, 1)``."""
    p = F.base
    A0 = F.A0
    if 0 not in A0:
        return p.zero()
    if A0.issubset(ZERO_ONE):
        # affine case: p(0) + p(1) theta = theta
        return p(0) / (p.one() - p(1) if 1 in A0 else p.one())
    fp = p.to_float()
    return brentq(lambda x: fp.gen_fn(A0, x) - x, 0.0, 1.0, xtol=1e-15, rtol=1e-15)


def _tail_safe_radius(p: Pmf, A: IntSet) -> float:
    return float(p.radius(A))


def theta_max(F: SetFamily, alpha) -> float:
    """Right end of ``I_alpha``: the smaller of ``rho_{J*}`` and the right end of
    ``{theta >= 1 : g_{A_0}(theta) < theta}`` below ``rho_{A_0}``."""
    alpha = check_direction(F, alpha)
    p = F.base.to_float()
    jstar = support_of(alpha)
    rho_star = min(_tail_safe_radius(p, F.A(j)) for j in jstar)
    return min(rho_star, _subcritical_end(p, F.A0))


def _subcritical_end(p: Pmf, A0: IntSet) -> float:
    """``sup{theta in [1, rho_{A_0}) : g_{A_0}(theta) < theta}``."""
    rho0 = _tail_safe_radius(p, A0)
    f = lambda x: p.gen_fn(A0, x) - x
    if (A0 - ZERO_ONE).is_empty():
        # affine: below the diagonal from 1 on as g(1) < 1
        return rho0
    if not is_inf(rho0):
        top = rho0 * (1 - 1e-15)
        if f(top) < 0:
            return rho0
    else:
        top = 2.0
        while f(top) < 0:
            top *= 2
            if top > 1e300:
                return INF
    return brentq(f, 1.0, top, xtol=1e-14, rtol=1e-15)


def in_I_alpha(F: SetFamily, theta, alpha) -> Verdict:
    """Whether ``(theta, alpha)`` is a compatible direction parameter."""
    alpha = _require_direction(F, alpha)
    p = F.base
    jstar = support_of(alpha)
    if theta == 0:
        if 0 in F.A0:
            return Verdict(False, "theta = 0 needs 0 outside A_0")
        if not _max_min(F, jstar) > 1:
            return Verdict(False, "theta = 0 needs max of min A_j above 1")
        return Verdict(True, "degenerate at 0")
    if is_inf(theta):
        if not F.A0.issubset(ONE_SET):
            return Verdict(False, "theta = inf needs A_0 inside {1}")
        if not any(F.A(j) == IntSet.finite([0]) for j in jstar):
            return Verdict(False, "theta = inf needs an active class equal to {0}")
        if any(not F.A(j).is_finite() for j in jstar):
            return Verdict(False, "theta = inf needs bounded active classes")
        if not _max_max(F, jstar) > 1:
            return Verdict(False, "theta = inf needs max of max A_j above 1")
        return Verdict(True, "degenerate at inf")
    if theta < 0:
        return Verdict(False, "theta must be nonnegative")
    g0 = p.gen_fn(F.A0, theta)
    if not g0 < theta:
        return Verdict(False, "g_{A_0}(theta) >= theta")
    for j in jstar:
        if is_inf(p.gen_fn(F.A(j), theta)):
            return Verdict(False, f"g_{{A_{j}}}(theta) diverges")
    return Verdict(True, "non-degenerate")


def p_dir(F: SetFamily, d: DirParam) -> Pmf:
    """The distribution ``p(theta, alpha)`` with direction ``alpha``."""
    v = in_I_alpha(F, d.theta, d.alpha)
    if not v:
        raise ValueError(f"theta outside I_alpha: {v.reason}")
    p = F.base
    theta, alpha = d.theta, check_direction(F, d.alpha)
    jstar = support_of(alpha)
    if theta == 0 or is_inf(theta):
        table = {}
        if 1 in F.A0:
            table[1] = p(1)
        for j in jstar:
            k = F.A(j).min() if theta == 0 else F.A(j).sup()
            table[k] = table.get(k, p.zero()) + alpha[j - 1] * q1(F)
        mode = "exact" if p.exact and all(not isinstance(a, float) for a in alpha) else "float"
        return Pmf(table, mode=mode, check=mode == "exact")
    exact = p.exact and not isinstance(theta, float) and all(not isinstance(a, float) for a in alpha)
    if exact:
        theta = p.num(theta)
        g0 = p.gen_fn(F.A0, theta)
        weights = {0: 1 / theta}
        for j in jstar:
            weights[j] = alpha[j - 1] * (theta - g0) / (theta * p.gen_fn(F.A(j), theta))
        return _reweight(p, F, theta, weights)
    return _p_dir_float(F, float(theta), alpha)


def _log_class_weights(p: Pmf, A: IntSet, theta: float):
    """``(k, log(theta**k p(k)))`` for the finite part of ``A`` in the support."""
    lt = math.log(theta)
    out = []
    for k, v in p.table.items():
        if k in A and v > 0:
            out.append((k, k * lt + math.log(v)))
    return out


def _p_dir_float(F: SetFamily, theta: float, alpha) -> Pmf:
    p = F.base.to_float()
    jstar = support_of(alpha)
    g0 = p.gen_fn(F.A0, theta)
    keep = 1.0 - g0 / theta
    weights = {0: 1.0 / theta}
    logs = {}
    for j in jstar:
        logs[j] = log_gen_fn(p, F.A(j), theta)
        weights[j] = float(alpha[j - 1]) * keep / (theta * math.exp(logs[j])) if logs[j] < 700 else 0.0
    table = {}
    for k, v in p.table.items():
        j = F.class_of(k)
        if j == 0:
            table[k] = theta ** (k - 1) * v
        elif j in logs:
            table[k] = float(alpha[j - 1]) * keep * math.exp(k * math.log(theta) + math.log(v) - logs[j])
    tails = []
    for tail in p.tails:
        for j, w in weights.items():
            part = F.A(j) & tail.progression
            if j == 0:
                factor_log = -math.log(theta)
            elif j in logs:
                factor_log = math.log(float(alpha[j - 1]) * keep) - logs[j]
            else:
                continue
            for k in part.finite_part():
                table[k] = math.exp(factor_log + k * math.log(theta) + math.log(tail.weight(k)))
            for first, step in part.classes():
                tails.append(Tail(first, step, math.exp(factor_log) * tail.coeff, tail.ratio * theta))
    return Pmf(table, tails, mode="float", check=False)


def log_gen_fn(p: Pmf, A: IntSet, theta: float) -> float:
    """``log g_A(theta)`` computed stably for large ``theta``."""
    p = p.to_float()
    if (A & p.support).is_empty():
        return -INF
    parts = _log_class_weights(p, A, theta)
    tail_part = p.gen_fn(A - IntSet.finite(p.table), theta) if p.tails else 0.0
    if is_inf(tail_part):
        return INF
    if tail_part > 0:
        parts.append((None, math.log(tail_part)))
    top = max(lw for _, lw in parts)
    return top + math.log(sum(math.exp(lw - top) for _, lw in parts))


# the mean map


@dataclass
class MeanMap:
    """Evaluator of ``mu(theta, alpha)`` and its ingredients in float arithmetic."""

    F: SetFamily
    alpha: tuple
    p: Pmf = field(init=False)
    jstar: list = field(init=False)

    def __post_init__(self):
        self.alpha = check_direction(self.F, self.alpha)
        self.p = self.F.base.to_float()
        self.jstar = support_of(self.alpha)

    def h(self, j: int, theta: float) -> float:
        """``h_j(theta) = theta g'_{A_j}(theta) / g_{A_j}(theta)``, with ``h_j(0) = min A_j``."""
        A = self.F.A(j)
        if theta == 0:
            return float(A.min())
        if is_inf(theta):
            return float(A.sup())
        p = self.p
        if (A & p.support).is_finite() and not p.tails:
            parts = _log_class_weights(p, A, theta)
            top = max(lw for _, lw in parts)
            ws = [(k, math.exp(lw - top)) for k, lw in parts]
            return sum(k * w for k, w in ws) / sum(w for _, w in ws)
        g = p.gen_fn(A, theta)
        if is_inf(g):
            return INF
        return theta * p.deriv_gen_fn(A, theta) / g

    def H(self, theta: float) -> float:
        return sum(float(self.alpha[j - 1]) * self.h(j, theta) for j in self.jstar)

    def __call__(self, theta) -> float:
        """``mu(theta, alpha)``, using the closed forms at the degenerate ends."""
        p, F = self.p, self.F
        if theta == 0 or is_inf(theta):
            qq = float(q1(F))
            ks = [F.A(j).min() if theta == 0 else F.A(j).sup() for j in self.jstar]
            return (1 - qq) + qq * sum(float(self.alpha[j - 1]) * k for j, k in zip(self.jstar, ks))
        theta = float(theta)
        g0 = p.gen_fn(F.A0, theta)
        dg0 = p.deriv_gen_fn(F.A0, theta)
        if is_inf(g0) or is_inf(dg0):
            return INF
        H = self.H(theta)
        keep = 1.0 - g0 / theta
        if is_inf(H):
            return INF if keep > 0 else float("nan")
        return dg0 + keep * H

    def derivative(self, theta: float, rel: float = 1e-6) -> float:
        """Central finite-difference derivative of ``mu`` in ``theta``."""
        step = rel * max(theta, 1e-12)
        return (self(theta + step) - self(theta - step)) / (2 * step)


def mu_dir(F: SetFamily, d: DirParam) -> float:
    """Mean of ``p(theta, alpha)``."""
    v = in_I_alpha(F, d.theta, d.alpha)
    if not v:
        raise ValueError(f"theta outside I_alpha: {v.reason}")
    p = F.base
    alpha = check_direction(F, d.alpha)
    exact = p.exact and not isinstance(d.theta, float) and all(not isinstance(a, float) for a in alpha)
    if exact:
        return p_dir(F, d).mean()
    return MeanMap(F, alpha)(d.theta)


# the critical solver


@dataclass(frozen=True)
class CriticalSolution:
    """Outcome of solving ``mu(theta, alpha) = 1``.

    ``theta`` is ``None`` when no critical compatible distribution exists in
    the direction.  ``degenerate`` flags ``theta`` in ``{0, inf}``;
    ``constant_mean`` flags the branch where ``mu`` does not depend on ``theta``
    (then any ``theta`` in ``I_alpha`` gives the same distribution and
    ``theta = 1`` is reported).
    """

    theta: float | None
    reason: str
    degenerate: bool = False
    constant_mean: bool = False
    mean_value: float | None = None

    def __bool__(self) -> bool:
        return self.theta is not None


def solve_critical(F: SetFamily, alpha, tol: float = 1e-12, scan_points: int = 64) -> CriticalSolution:
    """Find the tilt ``theta_alpha`` making ``p(theta, alpha)`` critical.

    Exact closed forms decide the degenerate ends.  Inside, ``mu`` is scanned on
    a geometric grid starting just above ``theta_min``; the first grid point with
    ``mu > 1`` brackets the unique crossing, which is then refined by bisection.
    """
    alpha = _require_direction(F, alpha)
    mm = MeanMap(F, alpha)
    lo = float(theta_min(F))
    hi = theta_max(F, alpha)
    if not condition_patho(F, alpha):
        value = mm(1.0)
        if abs(value - 1) <= 1e-12:
            return CriticalSolution(1.0, "constant mean equal to 1", constant_mean=True, mean_value=value)
        return CriticalSolution(None, "constant mean", constant_mean=True, mean_value=value)
    if in_I_alpha(F, 0, alpha):
        m0 = _exact_end_mean(F, alpha, 0)
        if m0 == 1:
            return CriticalSolution(0.0, "degenerate at 0", degenerate=True, mean_value=1.0)
        if m0 > 1:
            return CriticalSolution(None, "mean exceeds 1 already at theta = 0", mean_value=float(m0))
    grid = _scan_grid(lo, hi, scan_points)
    prev = lo
    for theta in grid:
        value = mm(theta)
        if math.isnan(value):
            continue
        if value > 1:
            root = _bisect(mm, prev, theta, tol)
            return CriticalSolution(root, "interior root", mean_value=mm(root))
        prev = theta
    # no crossing strictly inside: look at the right end
    if is_inf(hi):
        if in_I_alpha(F, INF, alpha):
            m_inf = _exact_end_mean(F, alpha, INF)
            if m_inf == 1:
                return CriticalSolution(INF, "degenerate at inf", degenerate=True, mean_value=1.0)
        return CriticalSolution(None, "mean stays below 1 on I_alpha")
    if in_I_alpha(F, hi, alpha):
        value = mm(hi)
        if abs(value - 1) <= tol:
            return CriticalSolution(hi, "root at theta_max", mean_value=value)
        if value > 1:
            root = _bisect(mm, prev, hi, tol)
            return CriticalSolution(root, "interior root", mean_value=mm(root))
    return CriticalSolution(None, "mean stays below 1 on I_alpha")


def _exact_end_mean(F: SetFamily, alpha, end) -> Number:
    """``(1 - q1) + q1 sum alpha_j k_j`` with ``k_j`` the min (end 0) or max (end inf) of ``A_j``."""
    qq = q1(F)
    total = 0
    for j in support_of(alpha):
        total += alpha[j - 1] * (F.A(j).min() if end == 0 else F.A(j).sup())
    return (1 - qq) + qq * total


def _scan_grid(lo: float, hi: float, n: int) -> list[float]:
    """Points accumulating geometrically at both ends of ``(lo, hi)``."""
    pts = []
    if is_inf(hi):
        base = max(lo, 0.0)
        eps = max(lo, 1.0) * 1e-12
        for i in range(n):
            pts.append(base + eps * (1e30 / eps) ** (i / (n - 1)) if base == 0 else
                       base * (1 + 1e-12 * (1e24) ** (i / (n - 1))))
        # extend into the far range for interior bases
        if base > 0:
            pts += [base + 10.0 ** e for e in range(-6, 31)]
        return sorted(set(p for p in pts if p > lo))
    width = hi - lo
    for i in range(1, n + 1):
        s = 30.0 * (2 * i / (n + 1) - 1)
        pts.append(lo + width / (1 + math.exp(-s)))
    return sorted(set(p for p in pts if lo < p < hi))


def _bisect(mm: MeanMap, a: float, b: float, tol: float) -> float:
    """Root of ``mu - 1`` between ``a`` (``mu <= 1``) and ``b`` (``mu > 1``)."""
    fa = mm(a) - 1 if a > 0 else -1.0
    if math.isnan(fa):
        fa = -1.0
    f = lambda x: mm(x) - 1 if x > 0 else fa
    root = brentq(f, a, b, xtol=tol * max(1.0, a), rtol=1e-15, maxiter=500)
    return root


def critical_theta(F: SetFamily, alpha, tol: float = 1e-12) -> float | None:
    """``theta_alpha`` or ``None`` when ``p`` is not generic in direction ``alpha``."""
    return solve_critical(F, alpha, tol).theta


def critical_distribution(F: SetFamily, alpha, tol: float = 1e-12) -> Pmf:
    """The critical compatible distribution ``p_alpha``."""
    sol = solve_critical(F, alpha, tol)
    if sol.theta is None:
        raise ValueError(f"no critical distribution in this direction: {sol.reason}")
    alpha = check_direction(F, alpha)
    theta = sol.theta
    if theta == 1.0 and F.base.exact and all(not isinstance(a, float) for a in alpha):
        theta = Fraction(1)
    elif theta == 0.0:
        theta = 0
    return p_dir(F, DirParam(theta, alpha))


# genericity and aperiodicity


def is_generic(F: SetFamily, alpha) -> Verdict:
    """Whether a critical compatible distribution exists in direction ``alpha``.

    The answer follows the three obstruction clauses: (i) a condensation
    obstruction at a finite radius ``rho_J``, (ii) ``0`` outside ``A_0`` with
    ``sum alpha_j min A_j > 1``, (iii) ``A_0`` inside ``{1}``, infinite radius
    and ``sum alpha_j sup A_j < 1``.  ``Verdict.reason`` names the clause.
    """
    alpha = _require_direction(F, alpha)
    if not condition_patho(F, alpha):
        sol = solve_critical(F, alpha)
        return Verdict(sol.theta is not None, "constant")
    p = F.base
    fp = p.to_float()
    jstar = support_of(alpha)
    jall = [0] + jstar
    rho = min(float(fp.radius(F.A(j))) for j in jall)
    if not is_inf(rho):
        dg0 = fp.deriv_gen_fn(F.A0, rho)
        gJ = sum(fp.gen_fn(F.A(j), rho) for j in jall)
        if dg0 <= 1 and not is_inf(gJ):
            g0 = fp.gen_fn(F.A0, rho)
            H = MeanMap(F, alpha).H(rho)
            if H < rho * (1 - dg0) / (rho - g0):
                return Verdict(False, "i")
    if 0 not in F.A0:
        if sum(alpha[j - 1] * F.A(j).min() for j in jstar) > 1:
            return Verdict(False, "ii")
    if F.A0.issubset(ONE_SET) and is_inf(rho):
        if sum(alpha[j - 1] * F.A(j).sup() for j in jstar) < 1:
            return Verdict(False, "iii")
    return Verdict(True, "generic")


def gamma_gcd(F: SetFamily, alpha) -> int:
    """gcd generating the group spanned by ``(A_0 - 1)`` and the ``A_j - A_j``, ``j in J*``."""
    g = F.A0.shift_gcd(1) if not F.A0.is_empty() else 0
    for j in support_of(alpha):
        g = math.gcd(g, F.A(j).diff_gcd())
    return g


def is_aperiodic(F: SetFamily, alpha, theta=None) -> Verdict:
    """Aperiodicity in direction ``alpha``: finite positive ``theta_alpha`` and gcd 1."""
    alpha = _require_direction(F, alpha)
    if theta is None:
        sol = solve_critical(F, alpha)
        if sol.theta is None:
            raise ValueError(f"aperiodicity needs a critical tilt: {sol.reason}")
        theta = sol.theta
    if theta == 0 or is_inf(theta):
        return Verdict(False, "degenerate critical tilt")
    g = gamma_gcd(F, alpha)
    if g != 1:
        return Verdict(False, f"difference group has index {g}")
    return Verdict(True, "gcd 1")


def admissible_sequence(F: SetFamily, alpha, m: int, base_size: int = 5,
                        growth: float = 2.0, radius: int = 3) -> list[tuple]:
    """``m`` achievable count vectors growing in size with direction tending to ``alpha``.

    Sizes follow ``base_size * growth**k``; each target ``round(alpha * size)``
    is moved to the nearest achievable vector within ``radius`` (in each
    coordinate of ``J*``), keeping zero coordinates where ``alpha_j = 0``.
    """
    from itertools import product

    from .exact import is_achievable

    alpha = _require_direction(F, alpha)
    jstar = support_of(alpha)
    out = []
    last = 0
    for k in range(m):
        size = max(int(round(base_size * growth ** k)), last + 1)
        target = [float(alpha[j - 1]) * size for j in range(1, F.J + 1)]
        best = None
        offsets = range(-radius, radius + 1)
        for delta in product(offsets, repeat=len(jstar)):
            n = [0] * F.J
            for j, dj in zip(jstar, delta):
                n[j - 1] = int(round(target[j - 1])) + dj
            if any(x < 0 for x in n) or sum(n) <= last:
                continue
            score = sum((n[j - 1] - target[j - 1]) ** 2 for j in jstar)
            if best is not None and score >= best[0]:
                continue
            if is_achievable(F, tuple(n)):
                best = (score, tuple(n))
        if best is None:
            raise ValueError(f"no achievable count vector near size {size}")
        out.append(best[1])
        last = sum(best[1])
    return out
