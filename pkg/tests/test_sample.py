from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from bgwtilt.dist import Pmf
from bgwtilt.exact import conditional_law, height_shapes, kesten_shape_probability
from bgwtilt.family import SetFamily
from bgwtilt.sample import (DegreeSampler, Overflow, make_rng, sample_bgw, sample_bgw_degrees,
                            sample_conditioned, sample_kesten)
from bgwtilt.tree import OrderedTree, count_LA, truncate

from conftest import tail_pmf
from stats import tv, within_sigmas

F = Fraction
BINARY = Pmf({0: F(1, 2), 2: F(1, 2)})


def test_rng_streams_are_reproducible_and_distinct():
    a = make_rng(7, 0).random(4)
    assert np.array_equal(a, make_rng(7, 0).random(4))
    assert not np.array_equal(a, make_rng(7, 1).random(4))


def test_degree_sampler_tail_frequencies():
    p = tail_pmf()
    draws = DegreeSampler(p).draw(make_rng(1), 200_000)
    c = Counter(draws.tolist())
    for k in (0, 2, 3, 5, 7):
        assert within_sigmas(c[k], len(draws), float(p(k)))
    assert all(k in p.support for k in c)


def test_size_biased_sampler():
    p = tail_pmf()
    mean = float(p.mean())
    s = DegreeSampler(p, size_biased=True)
    c = Counter(s.draw(make_rng(2), 200_000).tolist())
    for k in (2, 3, 5):
        assert within_sigmas(c[k], 200_000, k * float(p(k)) / mean)


def test_bgw_degenerate():
    assert sample_bgw(Pmf({0: 1}), make_rng(0)) == OrderedTree([0])


def test_bgw_small_tree_frequencies():
    rng = make_rng(3)
    n = 20_000
    c = Counter()
    for _ in range(n):
        t = sample_bgw(BINARY, rng, cap=10 ** 5)
        if t:
            c[t.degrees] += 1
    assert within_sigmas(c[(0,)], n, 0.5)
    assert within_sigmas(c[(2, 0, 0)], n, 0.125)


def test_overflow_is_reported():
    out = sample_bgw(Pmf({2: 1}), make_rng(0), cap=100)
    assert isinstance(out, Overflow) and not out
    assert sample_bgw_degrees(Pmf({2: 1}), make_rng(0), cap=100) is None


def test_kesten_examples(crit_binary):
    assert sample_kesten(Pmf({0: F(1, 2), 2: F(1, 2)}), make_rng(0), 1) == OrderedTree([2, 0, 0])
    rng = make_rng(4)
    roots = Counter(sample_kesten(crit_binary, rng, 1).degrees[0] for _ in range(20_000))
    assert within_sigmas(roots[1], 20_000, 0.5)


def test_kesten_height_two_law(crit_binary):
    rng = make_rng(5)
    c = Counter(sample_kesten(crit_binary, rng, 2) for _ in range(40_000))
    law = {t: kesten_shape_probability(t, crit_binary.to_float(), 2) for t in height_shapes(2, [0, 1, 2])}
    assert tv(c, law) < 0.02


def test_conditioned_size_one():
    G = SetFamily(BINARY, [[0, 2]])
    for strategy in ("dp", "rejection", "cycle"):
        assert sample_conditioned(G, (1,), make_rng(0), strategy=strategy) == OrderedTree([0])


def test_conditioned_binary_five_is_uniform():
    G = SetFamily(BINARY, [[0, 2]])
    rng = make_rng(6)
    c = Counter(sample_conditioned(G, (5,), rng) for _ in range(4000))
    assert set(c) == {OrderedTree([2, 0, 2, 0, 0]), OrderedTree([2, 2, 0, 0, 0])}
    assert within_sigmas(c[OrderedTree([2, 2, 0, 0, 0])], 4000, 0.5)


def test_conditioned_rejects_impossible_counts(fam_0_23):
    with pytest.raises(ValueError):
        sample_conditioned(fam_0_23, (1, 1), make_rng(0))
    with pytest.raises(ValueError):
        sample_conditioned(fam_0_23, (4, 2), make_rng(0), strategy="nope")


@pytest.mark.parametrize("strategy", ["dp", "rejection"])
def test_conditioned_counts_are_exact(fam_0_23, strategy):
    rng = make_rng(8)
    for _ in range(200):
        assert count_LA(sample_conditioned(fam_0_23, (4, 2), rng, strategy=strategy), fam_0_23) == (4, 2)


def shape_stat(t, F):
    """The tree with unary vertices contracted, paired with the number of unary vertices."""
    kept = [k for k in t.degrees if k != 1]
    return OrderedTree(kept, check=False), len(t) - len(kept)


@pytest.mark.parametrize("strategy", ["dp", "rejection"])
def test_conditioned_law_against_exact(fam_0_23, strategy):
    law = conditional_law(fam_0_23, (3, 1), 14)
    target = Counter()
    for t, pr in law.law.items():
        target[shape_stat(t, fam_0_23)] += pr
    rng = make_rng(9)
    c = Counter(shape_stat(sample_conditioned(fam_0_23, (3, 1), rng, strategy=strategy), fam_0_23)
                for _ in range(20_000))
    assert tv(c, target) < 0.03 + float(law.missing)


def test_cycle_lemma_against_exact(crit_binary):
    G = SetFamily(crit_binary, [[0, 1, 2]])
    law = conditional_law(G, (7,), 7).law
    for strategy in ("cycle", "dp"):
        rng = make_rng(10)
        c = Counter(sample_conditioned(G, (7,), rng, strategy=strategy) for _ in range(30_000))
        assert tv(c, law) < 0.03


@pytest.mark.parametrize("strategy", ["dp", "rejection", "cycle"])
def test_seeded_determinism(crit_binary, strategy):
    G = SetFamily(crit_binary, [[0, 1, 2]])
    a = [sample_conditioned(G, (15,), make_rng(11, i), strategy=strategy) for i in range(5)]
    b = [sample_conditioned(G, (15,), make_rng(11, i), strategy=strategy) for i in range(5)]
    assert a == b


def test_truncated_conditioned_tree_is_a_shape(fam_0_23):
    t = sample_conditioned(fam_0_23, (30, 20), make_rng(12))
    assert truncate(t, 2).height() <= 2
