from __future__ import annotations

from fractions import Fraction

import pytest

from chowcalc.chern import (
    BundleSpec,
    CalabiYauError,
    a0_closed_form,
    a1_closed_form,
    chern_from_power_sums,
    compute_q,
    degree_of_x,
    excess_factor,
    m_top_chern_grr,
    m_top_chern_split,
    power_sums,
)
from chowcalc.decomp import calabi_yau_split_specs
from chowcalc.ring import make_ring


def test_bundle_spec_validation():
    assert BundleSpec.split([2, 3, 2]).degrees == (3, 2, 2)
    assert BundleSpec.split([3, 3]).chern_classes == (6, 9)
    with pytest.raises(ValueError):
        BundleSpec.split([1, 5])
    with pytest.raises(ValueError):
        BundleSpec(2, degrees=(3, 3), chern=(6, 9))


def test_power_sums_from_chern_classes():
    assert power_sums(BundleSpec.from_chern([6, 9]), 3) == [6, 18, 54]
    assert power_sums(BundleSpec.split([2, 3, 4]), 3) == [9, 29, 99]


def test_newton_round_trip():
    ctx = make_ring(1, [0])
    spec = BundleSpec.split([2, 3, 5])
    ps = [ctx.const(3)] + [ctx.const(p) for p in power_sums(spec, 3)]
    e = chern_from_power_sums(ps, 3)
    assert [x.constant_term() for x in e[1:]] == [10, 31, 30]


def test_quintic_q():
    q = compute_q(3, BundleSpec.split([5]))
    assert q.a == (24, 58, 37, 6)
    assert q.diamond


def test_q_for_two_cubics():
    q = compute_q(3, BundleSpec.split([3, 3]))
    assert q.a == (4, 24, 21, 5)
    assert degree_of_x(BundleSpec.split([3, 3]), 3) == 9


def test_q_for_non_split_input_matches_split():
    split = compute_q(3, BundleSpec.split([3, 3]))
    chern = compute_q(3, BundleSpec.from_chern([6, 9]))
    assert split.q_poly.terms == chern.q_poly.terms


def test_calabi_yau_condition_enforced():
    with pytest.raises(CalabiYauError):
        compute_q(6, BundleSpec.split([3, 3, 3]))


@pytest.mark.parametrize("n, spec", calabi_yau_split_specs(6, 4))
def test_grr_path_agrees_with_split_product(n, spec):
    assert m_top_chern_grr(n, spec.rank, spec) == m_top_chern_split(n, spec)


@pytest.mark.parametrize("n, spec", [(n, s) for n, s in calabi_yau_split_specs(6, 4) if n >= 2])
def test_closed_forms(n, spec):
    q = compute_q(n, spec)
    assert q.a[0] == a0_closed_form(spec)
    assert q.a[1] == a1_closed_form(spec, n)
    assert q.q_poly.is_integral()


def test_a1_has_no_excess_term_for_hypersurfaces():
    spec = BundleSpec.split([5])
    inner = sum(Fraction(j, 5 - j) for j in range(1, 4))
    assert a1_closed_form(spec, 3) == 24 * inner == 58


def test_excess_factor_degree():
    spec = BundleSpec.split([3, 3])
    ctx = make_ring(2, [5, 5])
    h1, h2 = ctx.gens()
    assert excess_factor(spec, ctx) == h1 * 6 + (h2 - h1)
