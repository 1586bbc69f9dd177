"""Random BGW trees, truncated Kesten trees and trees conditioned on class counts.

Randomness comes from :func:`make_rng`, a Philox counter-based generator keyed
by ``(seed, stream)`` so that replicas can be split without overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .dist import Pmf
from .exact import CountDP, is_achievable
from .family import SetFamily
from .tree import OrderedTree

DEFAULT_CAP = 10 ** 6


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for replica ``stream`` of ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(stream),))))


@dataclass(frozen=True)
class Overflow:
    """A BGW draw that exceeded the vertex budget."""

    cap: int

    def __bool__(self) -> bool:
        return False


class DegreeSampler:
    """Vectorized exact sampler for a :class:`Pmf` (table atoms plus geometric tails).

    With ``size_biased=True`` draws from ``k p(k)`` instead (``p`` must be critical).
    """

    def __init__(self, p: Pmf, size_biased: bool = False):
        p = p.to_float()
        self.p = p
        keys = sorted(p.table)
        vals = [p.table[k] * (k if size_biased else 1) for k in keys]
        self.atoms = np.array(keys, dtype=np.int64)
        comps = []  # (weight, kind, start, step, q) for tail parts
        for t in p.tails:
            q = t.ratio ** t.step
            lead = t.coeff * t.ratio ** t.start
            if size_biased:
                # (s + d g) q^g splits into s q^g and d g q^g
                comps.append((lead * t.start / (1 - q), "geom", t.start, t.step, q))
                comps.append((lead * t.step * q / (1 - q) ** 2, "negbin", t.start, t.step, q))
            else:
                comps.append((lead / (1 - q), "geom", t.start, t.step, q))
        self.comps = comps
        weights = np.array([sum(vals)] + [c[0] for c in comps], dtype=float)
        self.comp_p = weights / weights.sum()
        atom_w = np.array(vals, dtype=float)
        self.atom_cdf = np.cumsum(atom_w) / atom_w.sum() if atom_w.sum() > 0 else None

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if not self.comps:
            return self._atoms(rng, size)
        which = rng.choice(len(self.comp_p), size=size, p=self.comp_p)
        out = np.empty(size, dtype=np.int64)
        mask = which == 0
        if mask.any():
            out[mask] = self._atoms(rng, int(mask.sum()))
        for i, (_, kind, start, step, q) in enumerate(self.comps, start=1):
            mask = which == i
            m = int(mask.sum())
            if not m:
                continue
            if kind == "geom":
                g = rng.geometric(1 - q, size=m) - 1
            else:
                g = rng.negative_binomial(2, 1 - q, size=m) + 1
            out[mask] = start + step * g
        return out

    def _atoms(self, rng, size):
        idx = np.searchsorted(self.atom_cdf, rng.random(size), side="right")
        return self.atoms[np.minimum(idx, len(self.atoms) - 1)]


def sample_bgw(p: Pmf, rng: np.random.Generator, cap: int = DEFAULT_CAP,
               sampler: DegreeSampler | None = None) -> OrderedTree | Overflow:
    """BGW tree with offspring law ``p``, or :class:`Overflow` past ``cap`` vertices."""
    sampler = sampler or DegreeSampler(p)
    chunks = []
    level = 1  # open slots before the chunk
    drawn = 0
    chunk = 64
    while drawn < cap:
        size = min(chunk, cap - drawn)
        k = sampler.draw(rng, size)
        walk = level + np.cumsum(k - 1)
        hit = np.flatnonzero(walk == 0)
        if hit.size:
            chunks.append(k[:hit[0] + 1])
            return OrderedTree(np.concatenate(chunks).tolist(), check=False)
        chunks.append(k)
        drawn += size
        level = int(walk[-1])
        chunk *= 2
    return Overflow(cap)


def sample_bgw_degrees(p: Pmf, rng: np.random.Generator, cap: int = DEFAULT_CAP,
                       sampler: DegreeSampler | None = None) -> np.ndarray | None:
    """Preorder degree array of a BGW tree (``None`` on overflow)."""
    sampler = sampler or DegreeSampler(p)
    chunks = []
    level = 1
    drawn = 0
    chunk = 64
    while drawn < cap:
        size = min(chunk, cap - drawn)
        k = sampler.draw(rng, size)
        walk = level + np.cumsum(k - 1)
        hit = np.flatnonzero(walk == 0)
        if hit.size:
            chunks.append(k[:hit[0] + 1])
            return np.concatenate(chunks)
        chunks.append(k)
        drawn += size
        level = int(walk[-1])
        chunk *= 2
    return None


def sample_kesten(p: Pmf, rng: np.random.Generator, depth: int) -> OrderedTree:
    """``r_h`` of Kesten's tree: spine vertices reproduce by ``k p(k)``, others by ``p``."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    m = p.mean()
    if abs(float(m) - 1) > 1e-9:
        raise ValueError(f"Kesten's tree needs a critical distribution, mean is {m}")
    plain = DegreeSampler(p)
    spine = DegreeSampler(p, size_biased=True)
    out = []
    stack = [(0, True)]  # (height, on spine), preorder via a stack
    while stack:
        height, on_spine = stack.pop()
        if height == depth:
            out.append(0)
            continue
        k = int((spine if on_spine else plain).draw(rng, 1)[0])
        out.append(k)
        if k:
            special = int(rng.integers(k)) if on_spine else -1
            for i in reversed(range(k)):
                stack.append((height + 1, i == special))
    return OrderedTree(out, check=False)


def sample_conditioned(F: SetFamily, n: Sequence[int], rng: np.random.Generator,
                       strategy: str = "dp", pmf: Pmf | None = None,
                       max_tries: int = 10 ** 6, cap: int = DEFAULT_CAP) -> OrderedTree:
    """Exact draw of ``T_p`` given ``L_A(T_p) = n``.

    strategy
        ``"rejection"``: BGW draws until the counts match (up to ``max_tries``).
        ``"dp"``: degree by degree in preorder, weighting each choice by the
        forest weights of what remains.
        ``"cycle"``: for a single class covering the support, a tilted i.i.d.
        degree sequence with the right sum, rotated into a tree.
    """
    p = F.base if pmf is None else pmf
    n = tuple(int(x) for x in n)
    if not is_achievable(F, n, 1, pmf=p):
        raise ValueError(f"counts {n} have probability 0")
    if strategy == "rejection":
        return _rejection(F, n, p, rng, max_tries, cap)
    if strategy == "dp":
        return _dp_backward(_shared_dp(F, p), n, rng)
    if strategy == "cycle":
        return _cycle_lemma(F, n, p, rng, max_tries)
    raise ValueError(f"unknown strategy {strategy!r}")


def _rejection(F, n, p, rng, max_tries, cap) -> OrderedTree:
    """BGW draws abandoned as soon as some class count exceeds its target."""
    sampler = DegreeSampler(p)
    cls: dict = {}
    buf: list = []
    pos = 0
    block = 256
    target = (0,) + n
    # every open slot still needs a leaf; with leaves counted this bounds the draw
    leaf = F.class_of(0) if 0 in p.support else 0
    for _ in range(max_tries):
        seq = []
        open_slots = 1
        counts = [0] * (F.J + 1)
        ok = True
        while open_slots:
            if pos == len(buf):
                buf = sampler.draw(rng, block).tolist()
                pos = 0
                block = min(2 * block, 1 << 16)
            k = buf[pos]
            pos += 1
            j = cls.get(k)
            if j is None:
                j = cls[k] = F.class_of(k)
            counts[j] += 1
            if j and counts[j] > target[j]:
                ok = False
                break
            seq.append(k)
            open_slots += k - 1
            if leaf and counts[leaf] + open_slots > target[leaf]:
                ok = False
                break
            if len(seq) >= cap:
                ok = False
                break
        if ok and counts[1:] == list(n):
            return OrderedTree(seq, check=False)
    raise TimeoutError(f"rejection did not hit counts {n} in {max_tries} tries")


_DP_CACHE: dict = {}


def _shared_dp(F: SetFamily, p: Pmf) -> CountDP:
    """Forest-weight tables reused across draws for the same family and law."""
    key = (id(F), p)
    hit = _DP_CACHE.get(key)
    if hit is None or hit[0] is not F:
        if len(_DP_CACHE) > 32:
            _DP_CACHE.clear()
        hit = _DP_CACHE[key] = (F, CountDP(F, p.to_float()))
    return hit[1]


class ConditionedSampler:
    """Reusable degree-by-degree sampler sharing one forest-weight memo."""

    def __init__(self, F: SetFamily, pmf: Pmf | None = None, tail_tol: float = 1e-18):
        p = (F.base if pmf is None else pmf).to_float()
        self.dp = CountDP(F, p)
        self.F = F
        self.p = p
        self.tail_tol = tail_tol

    def sample(self, n: Sequence[int], rng: np.random.Generator) -> OrderedTree:
        return _dp_backward(self.dp, tuple(n), rng, self.tail_tol)


def _candidate_degrees(dp: CountDP, rest: tuple, w: int, tail_tol: float) -> list[int]:
    p = dp.fp
    if not dp.leafy:
        # every pending subtree holds a counted leaf
        top = sum(rest) + 1 - w
        return p.support.elements_upto(max(top, 0))
    out = []
    acc = 0.0
    for k, v in p.atoms():
        out.append(k)
        acc += v
        if acc >= 1 - tail_tol and k >= max(p.table, default=0):
            break
    return out


def _dp_backward(dp: CountDP, n: tuple, rng: np.random.Generator, tail_tol: float = 1e-18) -> OrderedTree:
    F = dp.F
    rest = list(n)
    w = 1
    out = []
    while w:
        base = dp.log_weight(tuple(rest), w)
        ks, logs = [], []
        for k in _candidate_degrees(dp, tuple(rest), w, tail_tol):
            v = dp.fp(k)
            if v <= 0:
                continue
            j = F.class_of(k)
            nxt = list(rest)
            if j:
                nxt[j - 1] -= 1
                if nxt[j - 1] < 0:
                    continue
            lw = dp.log_weight(tuple(nxt), w - 1 + k)
            if lw > -math.inf:
                ks.append(k)
                logs.append(math.log(v) + lw - base)
        probs = np.exp(np.array(logs))
        probs /= probs.sum()
        k = ks[int(rng.choice(len(ks), p=probs))]
        out.append(k)
        j = F.class_of(k)
        if j:
            rest[j - 1] -= 1
        w += k - 1
    return OrderedTree(out, check=False)


def _cycle_lemma(F, n, p, rng, max_tries) -> OrderedTree:
    if F.J != 1 or not F.A0.is_empty():
        raise ValueError("the cycle-lemma path needs one class covering the support")
    size = n[0]
    if size == 1:
        return OrderedTree([0])
    fp = p.to_float()
    target = (size - 1) / size
    support = fp.support
    # tilt theta**k p(k) to mean (size - 1) / size; the conditional law does not change
    upper = math.log(float(fp.radius(support))) - 1e-9 if fp.tails else 30.0
    lt = brentq(lambda x: _tilted_mean(fp, math.exp(x)) - target, -30.0, upper)
    tilted = _tilted_pmf(fp, math.exp(lt))
    sampler = DegreeSampler(tilted)
    for _ in range(max_tries):
        k = sampler.draw(rng, size)
        if int(k.sum()) != size - 1:
            continue
        walk = np.cumsum(k - 1)
        start = int(np.argmin(walk)) + 1  # first index of the minimum
        rotated = np.concatenate([k[start:], k[:start]])
        return OrderedTree(rotated.tolist(), check=False)
    raise TimeoutError("cycle-lemma rejection exceeded its budget")


def _tilted_mean(p: Pmf, theta: float) -> float:
    A = p.support
    return theta * p.deriv_gen_fn(A, theta) / p.gen_fn(A, theta)


def _tilted_pmf(p: Pmf, theta: float) -> Pmf:
    from .dist import Tail

    A = p.support
    g = p.gen_fn(A, theta)
    table = {k: v * theta ** k / g for k, v in p.table.items()}
    tails = [Tail(t.start, t.step, t.coeff / g, t.ratio * theta) for t in p.tails]
    return Pmf(table, tails, mode="float", check=False)
