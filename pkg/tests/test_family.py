import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from bgwtilt.dist import INF, IntSet, Pmf, uniform
from bgwtilt.exact import compatibility_oracle, conditional_law
from bgwtilt.family import (DirParam, MeanMap, SetFamily, TiltParam, admissible_sequence,
                            critical_distribution, critical_theta, direction_of, gamma_gcd,
                            in_I_alpha, is_aperiodic, is_compatible_param, is_generic,
                            is_possible_direction, mu_dir, p_dir, solve_critical, theta_max,
                            theta_min, tilde_p)

from conftest import tail_pmf

F = Fraction


def atoms(p, upto=4):
    return tuple(p(k) for k in range(upto))


# family construction


def test_leftover_class(fam_0_23):
    assert fam_0_23.A0 == IntSet.finite([1])
    assert fam_0_23.zero_class() == 1
    assert fam_0_23.class_of(3) == 2


def test_overlapping_classes_rejected(u4):
    with pytest.raises(ValueError):
        SetFamily(u4, [[0, 2], [2, 3]])
    with pytest.raises(ValueError):
        SetFamily(u4, [[0, 5]])


# tilts


def test_tilt_identity(fam_0_23, u4):
    assert tilde_p(fam_0_23, TiltParam(1, (1, 1))) == u4


def test_tilt_half(fam_0_23):
    p = tilde_p(fam_0_23, TiltParam(F(1, 2), (2, F(8, 3))))
    assert atoms(p) == (F(1, 2), F(1, 4), F(1, 6), F(1, 12))


def test_tilt_at_zero(fam_0_23):
    p = tilde_p(fam_0_23, TiltParam(0, (F(1, 2), F(1, 4))))
    assert atoms(p) == (F(1, 2), F(1, 4), F(1, 4), 0)


def test_compatible_param_examples(fam_0_23, u4):
    assert is_compatible_param(fam_0_23, TiltParam(1, (1, 1)))
    # theta = 0 needs some active class with min A_j > 1
    G = SetFamily(u4, [[0, 1], [2, 3]])
    t0 = TiltParam(0, (F(1, 2), F(1, 2)))
    low = SetFamily(uniform([0, 1, 2]), [[0], [1, 2]])
    assert not is_compatible_param(low, TiltParam(0, (F(1, 2), F(1, 2))))
    assert is_compatible_param(G, t0)
    assert not is_compatible_param(G, TiltParam(0, (1, 1)))
    # theta = inf without a class {0}
    assert not is_compatible_param(G, TiltParam(INF, (F(1, 2), F(1, 2))))


# directions


def test_direction_of_normalizes(fam_0_23):
    q = Pmf({0: F(1, 2), 1: F(1, 4), 2: F(1, 8), 3: F(1, 8)})
    assert direction_of(q, fam_0_23) == (F(2, 3), F(1, 3))
    with pytest.raises(ValueError):
        direction_of(Pmf({1: 1}), fam_0_23)


def test_direction_without_leftover():
    G = SetFamily(uniform(range(4)), [[0, 1], [2, 3]])
    assert direction_of(G.base, G) == (F(1, 2), F(1, 2))


def test_possible_directions(fam_0_23, u4):
    assert is_possible_direction(SetFamily(u4, [[0, 1], [2, 3]]), (F(1, 2), F(1, 2)))
    assert not is_possible_direction(fam_0_23, (1, 0))
    assert not is_possible_direction(fam_0_23, (0, 1))


def test_p_dir_examples(fam_0_23):
    p = p_dir(fam_0_23, DirParam(1, (F(1, 2), F(1, 2))))
    assert atoms(p) == (F(3, 8), F(1, 4), F(3, 16), F(3, 16))
    assert mu_dir(fam_0_23, DirParam(1, (F(1, 2), F(1, 2)))) == pytest.approx(19 / 16)
    p = p_dir(fam_0_23, DirParam(1, (F(3, 5), F(2, 5))))
    assert atoms(p) == (F(9, 20), F(1, 4), F(3, 20), F(3, 20))
    assert p.mean() == 1


def test_p_dir_at_zero_is_the_right_limit(fam_0_23):
    alpha = (F(1, 2), F(1, 2))
    at0 = p_dir(fam_0_23, DirParam(0, alpha))
    near = p_dir(fam_0_23, DirParam(1e-9, (0.5, 0.5)))
    for k in range(4):
        assert float(at0(k)) == pytest.approx(near(k), abs=1e-8)
    assert at0.mean() == 1


def test_theta_min_examples():
    assert theta_min(SetFamily(uniform(range(4)), [[0], [2, 3]])) == 0
    p = Pmf({0: F(1, 4), 1: F(1, 4), 2: F(1, 2)})
    assert float(theta_min(SetFamily(p, [[1]]))) == pytest.approx(1 - math.sqrt(2) / 2)
    p = Pmf({0: F(1, 4), 2: F(3, 4)})
    assert theta_min(SetFamily(p, [[2]])) == F(1, 4)


def test_theta_max_examples(fam_0_23, nonmono):
    assert theta_max(fam_0_23, (F(3, 5), F(2, 5))) == INF
    assert theta_max(nonmono, (1,)) == pytest.approx(2.0)
    G = SetFamily(tail_pmf(), [[0, 2], IntSet.progression(3, 2)])
    assert theta_max(G, (0.5, 0.5)) == pytest.approx(2.0)


def test_interval_membership(nonmono):
    assert in_I_alpha(nonmono, 1.0, (1,))
    assert not in_I_alpha(nonmono, 2.5, (1,))


# the mean and the critical tilt


def test_constant_mean_case():
    # A_0 = {1, 3}, singleton classes {0} and {6} with 0/2 + 6/2 = 3: mean 1 + (1 - p(1)) (3 - 1)
    p = Pmf({0: F(1, 4), 1: F(1, 2), 3: F(1, 8), 6: F(1, 8)})
    G = SetFamily(p, [[0], [6]])
    alpha = (F(1, 2), F(1, 2))
    for t in (0.2, 0.5, 1.0, 1.4):
        assert mu_dir(G, DirParam(t, alpha)) == pytest.approx(2, abs=1e-12)
    sol = solve_critical(G, alpha)
    assert sol.theta is None and sol.mean_value == pytest.approx(2)


def test_critical_theta_examples(fam_0_23):
    assert critical_theta(fam_0_23, (0.6, 0.4)) == pytest.approx(1, abs=1e-9)
    sol = solve_critical(fam_0_23, (F(1, 2), F(1, 2)))
    assert sol.theta == 0 and sol.degenerate


def test_critical_theta_closed_form(fam_0_23):
    # mu(theta, alpha) = 1 reduces to (2 + 3 theta) / (1 + theta) = 1 / alpha_2
    for a2 in (0.34, 0.37, 0.4, 0.45, 0.49):
        expected = (1 / a2 - 2) / (3 - 1 / a2)
        assert critical_theta(fam_0_23, (1 - a2, a2)) == pytest.approx(expected, rel=1e-9)


def test_critical_distribution_is_critical(fam_0_23):
    p = critical_distribution(fam_0_23, (0.62, 0.38))
    assert p.mean() == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("a2, ok, clause", [
    (0.34, True, "generic"), (0.40, True, "generic"), (0.50, True, "generic"),
    (0.30, False, "iii"), (0.55, False, "ii")])
def test_genericity_boundary(fam_0_23, a2, ok, clause):
    v = is_generic(fam_0_23, (1 - a2, a2))
    assert (bool(v), v.reason) == (ok, clause)


def nonmono_mean(theta):
    # p_alpha(2) = theta / 2, the rest split on {0, 4} in proportion 1 : theta^4
    return theta + (4 - 2 * theta) * theta ** 4 / (1 + theta ** 4)


def test_nonmonotone_mean_against_closed_form(nonmono):
    mm = MeanMap(nonmono, (1,))
    for t in (0.1, 0.36, 0.7, 1.0, 1.24, 1.5, 1.92, 1.99):
        assert mm(t) == pytest.approx(nonmono_mean(t), rel=1e-12)


def test_nonmonotone_root(nonmono):
    root = brentq(lambda t: nonmono_mean(t) - 1, 0.01, 1.0)
    assert critical_theta(nonmono, (1,)) == pytest.approx(root, abs=1e-9)
    assert root == pytest.approx(0.628960, abs=1e-5)


def test_nonmonotone_mean_tends_to_zero(nonmono):
    mm = MeanMap(nonmono, (1,))
    assert mm(1e-6) < 1e-5


# aperiodicity


def test_aperiodic_examples(fam_0_23):
    assert is_aperiodic(fam_0_23, (0.6, 0.4))
    G = SetFamily(tail_pmf(), [[0, 2], IntSet.progression(3, 2)])
    assert gamma_gcd(G, (0.5, 0.5)) == 2
    assert not is_aperiodic(G, (0.5, 0.5), theta=1.0)
    H = SetFamily(uniform(range(4)), [[2, 3]])
    assert gamma_gcd(H, (1,)) == 1


# admissible sequences


def test_admissible_sequence_direction(fam_0_23):
    seq = admissible_sequence(fam_0_23, (0.6, 0.4), 4)
    sizes = [sum(n) for n in seq]
    assert sizes == sorted(sizes) and len(set(sizes)) == 4
    assert seq[-1][0] / seq[-1][1] == pytest.approx(1.5, rel=0.15)


def test_admissible_sequence_respects_zero_weight(crit_binary):
    G = SetFamily(crit_binary, [[0, 2], [1]])
    for n in admissible_sequence(G, (1, 0), 3):
        assert n[1] == 0


# compatibility of tilts, checked by the exact oracle


@settings(max_examples=8, deadline=None)
@given(st.fractions(min_value=F(1, 5), max_value=3, max_denominator=6),
       st.fractions(min_value=F(1, 5), max_value=F(4, 5), max_denominator=6))
def test_directional_family_is_compatible(theta, a1):
    G = SetFamily(uniform(range(4)), [[0], [2, 3]])
    q = p_dir(G, DirParam(theta, (a1, 1 - a1)))
    assert compatibility_oracle(G, q, 7)


@settings(max_examples=6, deadline=None)
@given(st.fractions(min_value=F(1, 4), max_value=2, max_denominator=5))
def test_tilt_preserves_conditional_law(theta):
    G = SetFamily(Pmf({0: F(1, 4), 1: F(1, 4), 2: F(1, 4), 4: F(1, 4)}), [[0, 2], [4]])
    q = p_dir(G, DirParam(theta, (F(2, 3), F(1, 3))))
    for n in [(3, 0), (5, 0), (4, 1), (7, 2)]:
        a = conditional_law(G, n, 9).law
        b = conditional_law(G, n, 9, pmf=q).law
        assert a == b
