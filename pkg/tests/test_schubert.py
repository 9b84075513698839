from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

import pytest

from chowcalc.chern import BundleSpec, compute_q, degree_of_x
from chowcalc.ring import make_ring
from chowcalc.schubert import (
    GrassCtx,
    RankMismatch,
    compute_p,
    d_class,
    f_bundle_rank,
    f_bundle_top_chern,
    fano,
    fiber_pushforward,
    pieri_mul,
    pushforward_to_products,
    restrict_to_section,
    tower,
    tower_integrate,
)
from chowcalc.tautring import TautCtx, gamma_start


def ballot_count(m: int) -> int:
    """Standard Young tableaux of a 2 x m rectangle, by counting ballot paths."""

    @lru_cache(maxsize=None)
    def walk(top: int, bottom: int) -> int:
        if top == m and bottom == m:
            return 1
        total = 0
        if top < m:
            total += walk(top + 1, bottom)
        if bottom < top:
            total += walk(top, bottom + 1)
        return total

    return walk(0, 0)


@pytest.mark.parametrize("big_n", range(4, 9))
def test_plucker_degree_counts_tableaux(big_n):
    g = GrassCtx(big_n)
    assert g.integrate(g.power(g.sigma(1), 2 * (big_n - 2))) == ballot_count(big_n - 2)


def test_small_degrees():
    g4, g5 = GrassCtx(4), GrassCtx(5)
    assert g4.integrate(g4.power(g4.sigma(1), 4)) == 2
    assert g5.integrate(g5.power(g5.sigma(1), 6)) == 5


@pytest.mark.parametrize("big_n", [4, 5, 6])
def test_dual_basis(big_n):
    g = GrassCtx(big_n)
    k = big_n - 2
    for a, b in g.basis:
        for c, d in g.basis:
            got = g.integrate(pieri_mul(g, g.sigma(a, b), g.sigma(c, d)))
            assert got == (1 if (c, d) == (k - b, k - a) else 0)


@pytest.mark.parametrize("big_n", [5, 6])
def test_product_is_commutative_and_associative(big_n):
    g = GrassCtx(big_n)
    basis = [g.sigma(*s) for s in g.basis]
    for x, y in itertools.product(basis, repeat=2):
        assert g.mul(x, y) == g.mul(y, x)
    for x, y, z in itertools.product(basis[:6], repeat=3):
        assert g.mul(g.mul(x, y), z) == g.mul(x, g.mul(y, z))


def test_giambelli_consistent_with_pieri():
    g = GrassCtx(6)
    s1 = g.sigma(1)
    s11 = g.sigma(1, 1)
    # sigma_1^2 = sigma_2 + sigma_11
    assert g.mul(s1, s1) == {(2, 0): 1, (1, 1): 1}
    # sigma_11 = sigma_1 sigma_1 - sigma_2
    for key in g.basis:
        x = g.sigma(*key)
        lhs = g.mul(x, s11)
        rhs = dict(g.mul(g.mul(x, s1), s1))
        for kk, v in g.mul(x, g.sigma(2)).items():
            rhs[kk] = rhs.get(kk, 0) - v
        assert lhs == {k: v for k, v in rhs.items() if v}


def test_tower_relation_and_integration():
    t = tower(GrassCtx(5), 2)
    xi = t.xi(0)
    assert xi * xi - t.sigma1() * xi + t.sigma11() == 0
    # the class of xi_1^4 xi_2^4 on W_2 (N = 5) integrates like a point of P^4 x P^4
    assert tower_integrate(t.xi(0) ** 4 * t.xi(1) ** 4) == 1
    assert tower_integrate(t.sigma1() ** 6) == 0


def test_section_divisor():
    t = tower(GrassCtx(5), 2, fiber=True)
    base = t.base()
    for i in range(2):
        b = d_class(t, i)
        assert fiber_pushforward(b) == base.one()
        assert restrict_to_section(b, i) == base.xi(i) * 2 - base.sigma1()
        j = 1 - i
        assert restrict_to_section(b, j) == base.xi(i) + base.xi(j) - base.sigma1()
    assert fiber_pushforward(t.one()) == 0


def test_pushforward_of_simple_classes():
    t = tower(GrassCtx(5), 2)
    target = make_ring(2, [4, 4])
    assert pushforward_to_products(t, t.one(), target) == target.one()
    assert pushforward_to_products(t, t.xi(0), target) == target.var(0)


def test_pushforward_reproduces_two_point_classes():
    n, d = 3, 5
    ctx = TautCtx(n, d, 2)
    t = tower(GrassCtx(n + 2), 2)
    for a, b in [(1, 2), (2, 1)]:
        top = f_bundle_top_chern(t, (a, b), BundleSpec.split([d]), expected_rank=n)
        pushed = pushforward_to_products(t, top)
        want = gamma_start(ctx, a, b)
        assert dict(pushed.items()) == {exps: c for (_, exps), c in want.terms.items()}


def test_rank_bookkeeping():
    assert f_bundle_rank((1, 1, 1), (5,)) == 3
    assert f_bundle_rank((1, 1, 1), (3, 3)) == 2
    assert f_bundle_rank((1, 1, 1), (2, 2, 3)) == 1  # two Sym^{-1} summands vanish
    t = tower(GrassCtx(5), 3)
    with pytest.raises(RankMismatch):
        f_bundle_top_chern(t, (1, 1, 1), BundleSpec.split([5]), expected_rank=4)
    with pytest.raises(RankMismatch):
        f_bundle_rank((2, 2), (2,))


def test_fano_anchors():
    assert fano(BundleSpec.split([5]), 5) == fano(BundleSpec.split([5]), 5)
    assert fano(BundleSpec.split([5]), 5).degree == 2875
    assert fano(BundleSpec.split([3]), 4).degree == 27
    two_cubics = fano(BundleSpec.split([3, 3]), 6)
    assert two_cubics.expected_dim == 0
    assert two_cubics.degree > 0 and two_cubics.degree.denominator == 1
    assert fano(BundleSpec.split([4]), 5).expected_dim == 1
    assert fano(BundleSpec.split([4]), 5).degree is None


@pytest.mark.parametrize("degrees, n", [([5], 3), ([3, 3], 3), ([6], 4), ([4, 4], 5)])
def test_p_matches_q_along_the_point_slice(degrees, n):
    spec = BundleSpec.split(degrees)
    a = compute_q(n, spec).a
    p = compute_p(n, spec, (1, 1, 1))
    deg_x = degree_of_x(spec, n)
    for i in range(n + 1):
        assert p.coeff((i, n - i, n)) == -(a[i] + a[n - i]) / deg_x
    assert p.is_integral()
    assert p.is_homogeneous(2 * n)
    for perm in itertools.permutations(range(3)):
        assert p.permute(list(perm)) == p


def test_quintic_p_values():
    p = compute_p(3, BundleSpec.split([5]), (1, 1, 1))
    assert p.coeff((0, 3, 3)) == -6
    assert p.coeff((1, 2, 3)) == -19


def test_hypersurface_p_symmetry_in_the_tuple():
    spec = BundleSpec.split([6])
    p112 = compute_p(3, spec, (1, 1, 2))
    p211 = compute_p(3, spec, (2, 1, 1))
    assert p112.permute([2, 1, 0]) == p211
    assert p112.is_homogeneous(3 * 2)
    assert p112.is_integral()
