"""Characteristic classes on P x P for the Calabi-Yau decomposition.

Everything here lives in CH*(P^{n+r} x P^{n+r}) = Q[H1, H2]/(H1^{n+r+1}, H2^{n+r+1}).
The polynomial Q is the product of the top Chern class of the bundle M
(equations of E on a line vanishing doubly at one point and simply at a
second) with the excess class c_{r-1}(pr1*E - O(1,-1)).

c_top(M) is available by two unrelated routes: the explicit split product,
and a Chern character expansion that only needs the Chern classes of E.
On split bundles the two must agree exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, prod
from typing import Sequence

from .ring import (
    RingCtx,
    TSeries,
    TruncPoly,
    exp_series,
    geometric_inverse,
    linear_product,
    make_ring,
    ratio_series,
)


class CalabiYauError(ValueError):
    """The bundle does not satisfy c_1(E) = n + r + 1."""


@dataclass(frozen=True)
class BundleSpec:
    """A vector bundle on projective space.

    Either split, ``E = O(d_1) + ... + O(d_r)``, or known only through its
    Chern classes ``c_i(E) = chern[i-1] * H^i``.
    """

    rank: int
    degrees: tuple[int, ...] | None = None
    chern: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if (self.degrees is None) == (self.chern is None):
            raise ValueError("give exactly one of degrees or chern classes")
        data = self.degrees if self.degrees is not None else self.chern
        if len(data) != self.rank:
            raise ValueError(f"rank {self.rank} does not match {data}")
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if self.degrees is not None and min(self.degrees) < 2:
            raise ValueError("split bundles must have every d_i >= 2")

    @classmethod
    def split(cls, degrees: Sequence[int]) -> BundleSpec:
        degrees = tuple(sorted((int(d) for d in degrees), reverse=True))
        return cls(len(degrees), degrees=degrees)

    @classmethod
    def from_chern(cls, classes: Sequence[int]) -> BundleSpec:
        return cls(len(classes), chern=tuple(int(c) for c in classes))

    @property
    def is_split(self) -> bool:
        return self.degrees is not None

    @property
    def chern_classes(self) -> tuple[int, ...]:
        """(c_1, ..., c_r) as integers multiplying H^i."""
        if self.chern is not None:
            return self.chern
        e = [1] + [0] * self.rank
        for d in self.degrees:
            for i in range(self.rank, 0, -1):
                e[i] += d * e[i - 1]
        return tuple(e[1:])

    @property
    def c1(self) -> int:
        return self.chern_classes[0]

    def label(self) -> str:
        if self.is_split:
            return "O(" + ",".join(map(str, self.degrees)) + ")"
        return "c=(" + ",".join(map(str, self.chern)) + ")"


@dataclass(frozen=True)
class QResult:
    q_poly: TruncPoly
    a: tuple[Fraction, ...]
    diamond_a0: bool
    diamond_a1: bool

    @property
    def diamond(self) -> bool:
        return self.diamond_a0 and self.diamond_a1


def check_calabi_yau(n: int, spec: BundleSpec) -> None:
    if spec.c1 != n + spec.rank + 1:
        raise CalabiYauError(
            f"{spec.label()} has c_1 = {spec.c1}, Calabi-Yau needs {n + spec.rank + 1}"
        )


def pp_ring(n: int, r: int) -> RingCtx:
    """CH* of P^{n+r} x P^{n+r}."""
    return make_ring(2, [n + r, n + r])


def total_chern(spec: BundleSpec, ctx: RingCtx, var: int = 0) -> TruncPoly:
    h = ctx.var(var)
    out = ctx.one()
    for i, c in enumerate(spec.chern_classes, start=1):
        out = out + (h ** i) * c
    return out


def power_sums(spec: BundleSpec, upto: int) -> list[Fraction]:
    """Power sums p_1..p_upto of the Chern roots, via Newton's identities."""
    if upto < 1:
        raise ValueError("upto must be >= 1")
    e = [Fraction(1)] + [Fraction(c) for c in spec.chern_classes]
    p: list[Fraction] = [Fraction(spec.rank)]
    for k in range(1, upto + 1):
        acc = Fraction(0)
        for i in range(1, min(k, spec.rank) + 1):
            term = e[i] * (p[k - i] if i < k else k)
            acc += term if i % 2 else -term
        p.append(acc)
    return p[1:]


def chern_from_power_sums(ps: Sequence[TruncPoly], upto: int) -> list[TruncPoly]:
    """Elementary symmetric functions e_0..e_upto from power sums.

    ``ps[k]`` is the k-th power sum (``ps[0]`` is the rank and is unused).
    Inverse Newton: k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} p_i.
    """
    ctx = ps[0].ctx
    e = [ctx.one()]
    for k in range(1, upto + 1):
        acc = ctx.zero()
        for i in range(1, k + 1):
            term = e[k - i] * ps[i]
            acc = acc + term if i % 2 else acc - term
        e.append(acc / k)
    return e


def m_top_chern_split(n: int, spec: BundleSpec) -> TruncPoly:
    """c_{n-r+1}(M) as the product over (i, j) of j H1 + (d_i - j) H2."""
    if not spec.is_split:
        raise ValueError("m_top_chern_split needs split degrees")
    check_calabi_yau(n, spec)
    ctx = pp_ring(n, spec.rank)
    forms = [(j, d - j) for d in spec.degrees for j in range(1, d - 1)]
    return linear_product(ctx, forms)


def shifted_power_sums(spec: BundleSpec, shift: int, upto: int) -> list[Fraction]:
    """sum_i (d_i + shift)^k for k = 0..upto, from the Chern classes alone."""
    p = [Fraction(spec.rank)] + power_sums(spec, max(upto, 1))
    return [
        sum((comb(k, l) * Fraction(shift) ** (k - l) * p[l] for l in range(k + 1)), Fraction(0))
        for k in range(upto + 1)
    ]


def m_chern_character(n: int, spec: BundleSpec, order: int) -> TSeries:
    """ch(M)(t) through t^order, with coefficients in CH*(P x P).

    Each summand of E contributes

        e^{(H1+2H2)t} (e^{a H1 t} - e^{a H2 t}) / (e^{H1 t} - e^{H2 t}),  a = d_i - 2,
      = e^{(H1+H2)t} e^{a H2 t} (e^{a w} - 1)/(e^w - 1),                  w = (H1 - H2) t,

    which is a power series whose coefficients are polynomials in a.  The
    sum over summands replaces a^k by sum_i (d_i - 2)^k.
    """
    r = spec.rank
    base = pp_ring(n, r)
    # work in Q[H1, H2, A], then trade A^k for the shifted power sums
    big = make_ring(3, [n + r, n + r, order + 2])
    h1, h2, a = big.gens()
    series = exp_series(h1 + h2, order) * exp_series(a * h2, order)
    ratio = ratio_series(order)
    w = h1 - h2
    lifted = [ratio[m].embed(big, [2]) * (w ** m) for m in range(order + 1)]
    series = series * TSeries(big, order, lifted)

    sums = shifted_power_sums(spec, -2, order + 2)
    coeffs = []
    for m in range(order + 1):
        acc = {}
        for (e1, e2, ea), c in series[m].terms.items():
            key = (e1, e2)
            acc[key] = acc.get(key, Fraction(0)) + c * sums[ea]
        coeffs.append(TruncPoly(base, acc))
    return TSeries(base, order, coeffs)


def m_top_chern_grr(n: int, r: int, spec: BundleSpec) -> TruncPoly:
    """c_{n-r+1}(M) from the Chern character of M (no splitting needed)."""
    if spec.rank != r:
        raise ValueError(f"spec has rank {spec.rank}, expected {r}")
    top = n - r + 1
    if top < 0:
        raise ValueError("n - r + 1 must be non-negative")
    ch = m_chern_character(n, spec, top)
    ps = [ch[m] * factorial(m) for m in range(top + 1)]
    return chern_from_power_sums(ps, top)[top]


def excess_factor(spec: BundleSpec, ctx: RingCtx | None = None) -> TruncPoly:
    """c_{r-1}(pr1*E - O(1) x O(-1)): degree r-1 part of c(E)(H1)/(1 - (H2 - H1))."""
    r = spec.rank
    if ctx is None:
        ctx = make_ring(2, [max(r - 1, 1)] * 2)
    h1, h2 = ctx.gens()
    series = total_chern(spec, ctx, 0) * geometric_inverse(h2 - h1, r - 1)
    return series.graded_part(r - 1)


def _coefficients(q: TruncPoly, n: int) -> tuple[Fraction, ...]:
    return tuple(q.coeff((i, n - i)) for i in range(n + 1))


def compute_q(n: int, spec: BundleSpec) -> QResult:
    """Q(H1, H2) = c_{n-r+1}(M) * c_{r-1}(excess), with a_i = [H1^i H2^{n-i}]Q."""
    check_calabi_yau(n, spec)
    r = spec.rank
    ctx = pp_ring(n, r)
    if spec.is_split:
        cm = m_top_chern_split(n, spec)
    else:
        cm = m_top_chern_grr(n, r, spec)
    q = cm * excess_factor(spec, ctx)
    if not q.is_homogeneous(n):
        raise AssertionError(f"Q is not homogeneous of degree {n}: {q}")
    a = _coefficients(q, n)
    return QResult(q, a, a[0] != 0, len(a) > 1 and a[1] != a[0])


def a0_closed_form(spec: BundleSpec) -> Fraction:
    return Fraction(prod(factorial(d - 1) for d in spec.degrees))


def a1_closed_form(spec: BundleSpec, n: int) -> Fraction:
    """Coefficient of H1 H2^{n-1} in Q for split bundles.

    The ``n + 2`` summand comes from the linear part of the excess factor,
    which only exists when r >= 2.
    """
    inner = sum(
        (Fraction(j, d - j) for d in spec.degrees for j in range(1, d - 1)),
        Fraction(0),
    )
    if spec.rank >= 2:
        inner += n + 2
    return a0_closed_form(spec) * inner


def degree_of_x(spec: BundleSpec, n: int) -> Fraction:
    """deg X = integral of c_r(E) H^n over P^{n+r}."""
    ctx = make_ring(1, [n + spec.rank])
    c = total_chern(spec, ctx).graded_part(spec.rank)
    return (c * ctx.var(0) ** n).integrate()
