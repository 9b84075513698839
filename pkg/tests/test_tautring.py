from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chowcalc.partitions import PartitionMap, enumerate_partitions
from chowcalc.ring import TruncPoly
from chowcalc.tautring import (
    DiagClass,
    SymbolicExpr,
    TautCtx,
    apply_corr,
    classify,
    d_class,
    delta,
    from_poly,
    gamma_start,
    integrate,
    is_type_a,
    monomial,
    mul_h,
    normalize,
    push_diag,
    push_map,
    push_proj,
    reassemble,
)

C2 = TautCtx(3, 5, 2)
C3 = TautCtx(3, 5, 3)


def poly_class(ctx, terms):
    return from_poly(ctx, TruncPoly(ctx.poly_ring(), terms))


def test_diagonal_times_h():
    got = mul_h(delta(C2), 0, 1)
    want = poly_class(C2, {(1, 3): Fraction(1, 5), (2, 2): Fraction(1, 5), (3, 1): Fraction(1, 5)})
    assert got == want


def test_diagonal_times_point():
    assert mul_h(delta(C2), 0, 3) == poly_class(C2, {(3, 3): Fraction(1, 5)})


def test_monomial_bump_caps():
    assert mul_h(monomial(C2, (1, 2)), 1, 1) == monomial(C2, (1, 3))
    assert mul_h(monomial(C2, (1, 2)), 1, 2) == 0


def test_point_classes():
    assert d_class(C3, [2]).terms == {((0, 0, 1), (0, 3)): Fraction(1, 5)}
    assert d_class(C3, [0, 1]) == poly_class(C3, {(3, 3, 0): Fraction(1, 25)})
    assert d_class(C3, []) == delta(C3)
    with pytest.raises(ValueError):
        d_class(C3, [0, 1, 2])
    assert from_poly(C3, C3.poly_ring().zero()) == 0


def test_push_along_diagonals():
    double_first = PartitionMap((0, 0, 1))
    assert push_diag(double_first, d_class(C2, [0])) == d_class(C3, [0, 1])
    assert push_diag(double_first, d_class(C2, [1])) == d_class(C3, [2])
    x = gamma_start(C2, 1, 2)
    assert push_diag(PartitionMap.identity(2), x) == x


def test_projections():
    assert push_proj(delta(C3), [0, 1]) == delta(C2)
    assert push_proj(d_class(C3, [2]), [0, 1]) == delta(C2)
    assert push_proj(monomial(C3, (1, 2, 3)), [0, 1]) == monomial(C2, (1, 2)) * 5
    assert push_proj(monomial(C3, (2, 2, 2)), [0, 1]) == 0
    assert push_proj(monomial(C3, (1, 2, 3)), [2, 0]) == 0
    assert push_proj(monomial(C3, (3, 3, 1)), [2, 0]) == monomial(C2, (1, 3)) * 5


def test_two_point_class():
    g = gamma_start(C2, 1, 2)
    assert g == poly_class(C2, {(3, 0): 24, (2, 1): 58, (1, 2): 37, (0, 3): 6})
    cl = classify(g)
    assert cl.b_coeff({0}) == 120 and cl.b_coeff({1}) == 30
    assert cl.poly == TruncPoly(C2.poly_ring(), {(2, 1): 58, (1, 2): 37})
    swapped = push_map(gamma_start(C2, 2, 1), [1, 0])
    assert swapped == g
    with pytest.raises(ValueError):
        gamma_start(C2, 1, 1)


def test_classify_basics():
    cl = classify(d_class(C3, [0, 1]) + delta(C3) * 3)
    assert cl.delta == 3
    assert cl.b_parts == {2: {frozenset({0, 1}): 1}}
    empty = classify(DiagClass.zero(C3))
    assert empty.delta == 0 and not empty.b_parts and not empty.poly and empty.is_standard()


def test_classify_flags_odd_terms():
    odd = DiagClass(C3, {((0, 0, 1), (0, 1)): 1})
    cl = classify(odd)
    assert not cl.is_standard()
    assert reassemble(C3, cl) == odd


C4 = TautCtx(3, 5, 4)


def random_class(ctx, rng, size=6):
    out = DiagClass.zero(ctx)
    for _ in range(size):
        s = rng.randint(1, ctx.r)
        p = rng.choice(enumerate_partitions(ctx.r, s))
        exps = [rng.randint(0, ctx.n) for _ in range(s)]
        out = out + DiagClass(ctx, {(p.rgs, tuple(exps)): Fraction(rng.randint(-4, 4), rng.randint(1, 3))})
    return out


@pytest.mark.parametrize("seed", range(20))
def test_classify_reassemble_round_trip(seed):
    rng = random.Random(seed)
    x = random_class(C4, rng)
    for split in (True, False):
        assert reassemble(C4, classify(x, split_top=split)) == x


@pytest.mark.parametrize("seed", range(20))
def test_rewrite_order_does_not_matter(seed):
    rng = random.Random(seed)
    ctx = TautCtx(3, 7, 4)
    raw = {}
    for _ in range(5):
        s = rng.randint(1, 3)
        p = rng.choice(enumerate_partitions(4, s))
        raw[(p.rgs, tuple(rng.randint(0, 3) for _ in range(s)))] = Fraction(rng.randint(1, 9))
    assert normalize(ctx, raw, rng=random.Random(seed + 100)) == normalize(ctx, raw)


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("b", range(1, 5))
def test_rewrite_conserves_integrals(n, b):
    ctx = TautCtx(n, 4, b)
    for e in range(n + 1):
        x = DiagClass(ctx, {((0,) * b, (e,)): 1})
        for mult in itertools.product(range(n + 1), repeat=b):
            y = x
            for i, m in enumerate(mult):
                y = mul_h(y, i, m)
            want = 4 if e + sum(mult) == n else 0
            assert integrate(y) == want


def test_rewrite_for_codimension_two():
    ctx = TautCtx(3, 9, 2, codim=2)
    # exponent below the codimension stays on the diagonal
    x = mul_h(delta(ctx), 0, 1)
    assert x.terms == {((0, 0), (1,)): 1}
    y = mul_h(delta(ctx), 0, 2)
    assert y == poly_class(ctx, {(2, 3): Fraction(1, 9), (3, 2): Fraction(1, 9)})
    for mult in itertools.product(range(4), repeat=2):
        z = mul_h(mul_h(x, 0, mult[0]), 1, mult[1])
        assert integrate(z) == (9 if 1 + sum(mult) == 3 else 0)


@st.composite
def type_a_pushes(draw):
    r = draw(st.integers(2, 4))
    s = draw(st.integers(1, r))
    alpha = draw(st.sampled_from(enumerate_partitions(r, s)))
    exps = draw(st.lists(st.integers(1, 3), min_size=s, max_size=s))
    return r, s, alpha, tuple(exps)


@settings(max_examples=80, deadline=None)
@given(type_a_pushes())
def test_pushforward_keeps_type_a(data):
    r, s, alpha, exps = data
    x = monomial(TautCtx(3, 5, s), exps)
    y = push_diag(alpha, x)
    assert is_type_a(y)


@pytest.mark.parametrize("r", [3, 4])
def test_pushforward_of_point_classes_raises_type_by_at_most_one(r):
    ctx = TautCtx(3, 5, r - 1)
    big = TautCtx(3, 5, r)
    for j in range(1, r - 1):
        for subset in itertools.combinations(range(r - 1), j):
            x = d_class(ctx, subset)
            for alpha in enumerate_partitions(r, r - 1):
                cl = classify(push_diag(alpha, x), split_top=True)
                assert cl.is_standard() and cl.delta == 0
                assert set(cl.b_parts) <= {j, j + 1}
                assert not cl.poly or j + 1 == big.r - 1


@pytest.mark.parametrize("seed", range(10))
def test_doubling_then_projecting_is_identity(seed):
    rng = random.Random(seed)
    x = random_class(C3, rng)
    for j in range(3):
        doubled = push_map(x, [0, 1, 2, j])
        assert push_proj(doubled, [0, 1, 2]) == x


def test_correspondence_action_of_point_class():
    x = d_class(C3, [2])
    expr = apply_corr(x, (1, 2))
    key = SymbolicExpr.key
    assert expr == SymbolicExpr(3, 5, (1, 2), {key([(0, 1)], ()): Fraction(1, 5)})
    assert apply_corr(d_class(C3, [0]), (1, 2)) == 0
    assert apply_corr(delta(C3), (1, 2)).terms == {key([], (0, 1)): 1}
    with pytest.raises(ValueError):
        apply_corr(x, (1, 1))
    with pytest.raises(ValueError):
        apply_corr(x, (0, 3))


def test_symbolic_specialization_and_h_reduction():
    key = SymbolicExpr.key
    e = SymbolicExpr(3, 5, (1, 2), {key([(1,)], (0,)): 2, key([(0, 1)], ()): 1})
    # z_0 = h: z_0.h^2 becomes h^3 and deg(z_0 z_1) becomes deg(z_1)
    assert e.substitute_h(0).terms == {key([(1,)], ()): 3}
    assert e.reduce_h_powers().terms == {key([(1,), (0,)], ()): Fraction(2, 5), key([(0, 1)], ()): 1}
    assert e.reduce_h_powers().is_h_multiple()
    assert not e.is_h_multiple()


def test_gamma_symbol_survives_without_rule():
    expr = apply_corr(delta(C3), (1, 2), gamma_coeff=2, gamma_rule=False)
    assert not expr.is_h_multiple()
    assert expr.gamma_free() == apply_corr(delta(C3), (1, 2))
