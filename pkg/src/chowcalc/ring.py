"""Exact truncated polynomial rings.

A :class:`RingCtx` fixes the number of variables and a cap per variable;
any monomial with an exponent above its cap is zero.  This is exactly the
Chow ring of a product of projective spaces,

    CH*(P^{c_1} x ... x P^{c_r}) = Q[H_1, ..., H_r] / (H_i^{c_i + 1}),

and it is the arithmetic substrate of every other module.  Coefficients are
:class:`fractions.Fraction` throughout; nothing is ever rounded.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping, Sequence, Union

Rational = Fraction
Scalar = Union[int, Fraction]


class ContextMismatch(ValueError):
    """Two polynomials from different rings were combined."""


@dataclass(frozen=True)
class RingCtx:
    num_vars: int
    caps: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.num_vars < 1:
            raise ValueError("a ring needs at least one variable")
        if len(self.caps) != self.num_vars:
            raise ValueError(
                f"caps has length {len(self.caps)}, expected {self.num_vars}"
            )
        if any(c < 0 for c in self.caps):
            raise ValueError("caps must be non-negative")

    @property
    def top(self) -> tuple[int, ...]:
        return self.caps

    def zero(self) -> TruncPoly:
        return TruncPoly(self, {})

    def one(self) -> TruncPoly:
        return TruncPoly(self, {(0,) * self.num_vars: Fraction(1)})

    def const(self, c: Scalar) -> TruncPoly:
        return self.one() * c

    def var(self, i: int) -> TruncPoly:
        e = [0] * self.num_vars
        e[i] = 1
        return TruncPoly.monomial(self, e)

    def gens(self) -> list[TruncPoly]:
        return [self.var(i) for i in range(self.num_vars)]

    def fits(self, exps: Sequence[int]) -> bool:
        return all(0 <= e <= c for e, c in zip(exps, self.caps))

    def monomials(self, degree: int) -> Iterable[tuple[int, ...]]:
        """All in-cap exponent vectors of the given total degree, lex order."""
        def rec(i: int, left: int):
            if i == self.num_vars - 1:
                if left <= self.caps[i]:
                    yield (left,)
                return
            for e in range(min(left, self.caps[i]), -1, -1):
                for rest in rec(i + 1, left - e):
                    yield (e,) + rest

        if degree < 0:
            return iter(())
        return rec(0, degree)


def make_ring(num_vars: int, caps: Sequence[int]) -> RingCtx:
    return RingCtx(num_vars, tuple(int(c) for c in caps))


class TruncPoly:
    """An element of a truncated polynomial ring.

    ``terms`` maps exponent tuples to nonzero Fractions.  Instances are
    treated as immutable; every operation returns a new object.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: RingCtx, terms: Mapping[tuple[int, ...], Scalar]):
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, c in terms.items():
            exps = tuple(exps)
            if len(exps) != ctx.num_vars:
                raise ValueError(f"exponent vector {exps} has wrong length")
            if c and ctx.fits(exps):
                clean[exps] = clean.get(exps, Fraction(0)) + Fraction(c)
        self.ctx = ctx
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def monomial(cls, ctx: RingCtx, exps: Sequence[int], coeff: Scalar = 1) -> TruncPoly:
        return cls(ctx, {tuple(exps): coeff})

    # -- comparisons ---------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TruncPoly):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.ctx.const(other).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"TruncPoly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            mono = "*".join(
                f"H{i + 1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(exps)
                if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- arithmetic ----------------------------------------------------

    def _check(self, other: TruncPoly) -> None:
        if self.ctx != other.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def _coerce(self, other) -> TruncPoly:
        if isinstance(other, TruncPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        raise TypeError(f"cannot combine TruncPoly with {type(other).__name__}")

    def __add__(self, other) -> TruncPoly:
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return TruncPoly(self.ctx, out)

    __radd__ = __add__

    def __neg__(self) -> TruncPoly:
        return TruncPoly(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> TruncPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> TruncPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> TruncPoly:
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ctx.zero()
            return TruncPoly(self.ctx, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        caps = self.ctx.caps
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if all(x <= cap for x, cap in zip(e, caps)):
                    out[e] = out.get(e, Fraction(0)) + c1 * c2
        return TruncPoly(self.ctx, out)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> TruncPoly:
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, m: int) -> TruncPoly:
        if m < 0:
            raise ValueError("negative powers are not defined")
        result = self.ctx.one()
        base = self
        while m:
            if m & 1:
                result = result * base
            base = base * base
            m >>= 1
        return result

    # -- structure -----------------------------------------------------

    def coeff(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coeff((0,) * self.ctx.num_vars)

    def degree(self) -> int:
        """Largest total degree present; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def graded_part(self, d: int) -> TruncPoly:
        return TruncPoly(self.ctx, {e: c for e, c in self.terms.items() if sum(e) == d})

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        return len(degs) == 1 and (d is None or degs == {d})

    def integrate(self) -> Fraction:
        return self.coeff(self.ctx.caps)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    def permute(self, perm: Sequence[int]) -> TruncPoly:
        """Rename variable ``i`` to ``perm[i]``."""
        out = {}
        for e, c in self.terms.items():
            new = [0] * len(e)
            for i, x in enumerate(e):
                new[perm[i]] = x
            out[tuple(new)] = c
        return TruncPoly(self.ctx, out)

    def embed(self, ctx: RingCtx, var_map: Sequence[int]) -> TruncPoly:
        """Send variable ``i`` of this ring to variable ``var_map[i]`` of ``ctx``.

        Monomials that exceed the target caps are dropped, so this is also
        the restriction map CH(P^a) -> CH(X) when caps shrink.
        """
        out = {}
        for e, c in self.terms.items():
            new = [0] * ctx.num_vars
            for i, x in enumerate(e):
                new[var_map[i]] += x
            out[tuple(new)] = c
        return TruncPoly(ctx, out)

    def items(self):
        return sorted(self.terms.items())


# -- module level operations ---------------------------------------------


def poly_mul(a: TruncPoly, b: TruncPoly) -> TruncPoly:
    if a.ctx != b.ctx:
        raise ContextMismatch(f"{a.ctx} vs {b.ctx}")
    return a * b


def linear_form(ctx: RingCtx, coeffs: Sequence[Scalar]) -> TruncPoly:
    if len(coeffs) != ctx.num_vars:
        raise ValueError(f"linear form needs {ctx.num_vars} coefficients")
    out = ctx.zero()
    for i, c in enumerate(coeffs):
        out = out + ctx.var(i) * c
    return out


def linear_product(ctx: RingCtx, forms: Iterable[Sequence[Scalar]]) -> TruncPoly:
    """Truncated product of linear forms, each given by its coefficients."""
    out = ctx.one()
    for f in forms:
        out = out * linear_form(ctx, f)
    return out


def geometric_inverse(u: TruncPoly, total_degree_bound: int) -> TruncPoly:
    """``1 + u + ... + u^b``, i.e. ``1/(1-u)`` up to degree ``b``.

    Requires ``u`` to have no constant term; the output is then exact in
    every degree ``<= b``.
    """
    if u.constant_term():
        raise ValueError("geometric_inverse needs a series with zero constant term")
    out = u.ctx.one()
    power = u.ctx.one()
    for _ in range(total_degree_bound):
        power = power * u
        out = out + power
    return TruncPoly(out.ctx, {e: c for e, c in out.terms.items() if sum(e) <= total_degree_bound})


def graded_part(p: TruncPoly, d: int) -> TruncPoly:
    return p.graded_part(d)


def integrate(p: TruncPoly) -> Fraction:
    return p.integrate()


# -- special numbers -------------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1)]


def bernoulli(m: int) -> Fraction:
    """Bernoulli numbers with ``B_1 = -1/2`` (the ``w/(e^w - 1)`` convention)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    while len(_BERNOULLI) <= m:
        k = len(_BERNOULLI)
        s = sum(comb(k + 1, j) * _BERNOULLI[j] for j in range(k))
        _BERNOULLI.append(-s / (k + 1))
    return _BERNOULLI[m]


# -- truncated power series in an auxiliary variable t ---------------------


class TSeries:
    """Power series in ``t`` truncated at ``t^order``, coefficients in one ring."""

    __slots__ = ("ctx", "order", "coeffs")

    def __init__(self, ctx: RingCtx, order: int, coeffs: Sequence[TruncPoly]):
        if order < 0:
            raise ValueError("order must be non-negative")
        coeffs = list(coeffs)[: order + 1]
        for c in coeffs:
            if c.ctx != ctx:
                raise ContextMismatch("series coefficients must share one ring")
        coeffs += [ctx.zero()] * (order + 1 - len(coeffs))
        self.ctx = ctx
        self.order = order
        self.coeffs = coeffs

    def __getitem__(self, m: int) -> TruncPoly:
        return self.coeffs[m]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TSeries):
            return NotImplemented
        return (self.ctx, self.order, self.coeffs) == (other.ctx, other.order, other.coeffs)

    def __repr__(self) -> str:
        return "TSeries(" + ", ".join(f"t^{m}: {c}" for m, c in enumerate(self.coeffs) if c) + ")"

    def _align(self, other: TSeries) -> int:
        if self.ctx != other.ctx:
            raise ContextMismatch("series live in different rings")
        return min(self.order, other.order)

    def __add__(self, other: TSeries) -> TSeries:
        order = self._align(other)
        return TSeries(self.ctx, order, [self[m] + other[m] for m in range(order + 1)])

    def __sub__(self, other: TSeries) -> TSeries:
        order = self._align(other)
        return TSeries(self.ctx, order, [self[m] - other[m] for m in range(order + 1)])

    def __mul__(self, other) -> TSeries:
        if isinstance(other, (int, Fraction, TruncPoly)):
            return TSeries(self.ctx, self.order, [c * other for c in self.coeffs])
        order = self._align(other)
        out = []
        for m in range(order + 1):
            acc = self.ctx.zero()
            for i in range(m + 1):
                if self[i] and other[m - i]:
                    acc = acc + self[i] * other[m - i]
            out.append(acc)
        return TSeries(self.ctx, order, out)

    __rmul__ = __mul__

    @classmethod
    def constant(cls, p: TruncPoly, order: int) -> TSeries:
        return cls(p.ctx, order, [p])


def exp_series(u: TruncPoly, order: int) -> TSeries:
    """``e^{u t}`` through ``t^order``."""
    coeffs = []
    power = u.ctx.one()
    for m in range(order + 1):
        coeffs.append(power / factorial(m))
        power = power * u
    return TSeries(u.ctx, order, coeffs)


def exp_linear(ctx: RingCtx, form: Sequence[Scalar], order: int) -> TSeries:
    """``e^{l t}`` for the linear form ``l`` with the given coefficients."""
    return exp_series(linear_form(ctx, form), order)


def ratio_series(order: int) -> TSeries:
    """Expansion of ``(e^{a w} - 1)/(e^w - 1)`` in ``w`` through ``w^order``.

    The coefficients are polynomials in the symbolic root ``a``, stored in the
    one-variable ring with cap ``order + 1`` (the ``w^m`` coefficient has
    degree ``m + 1`` in ``a``).  Computed as the product

        a * [(e^{a w} - 1)/(a w)] * [w/(e^w - 1)],

    which never divides by a zero divisor.
    """
    ctx = make_ring(1, [order + 1])
    a = ctx.var(0)
    first = TSeries(ctx, order, [(a ** m) / factorial(m + 1) for m in range(order + 1)])
    todd = TSeries(ctx, order, [ctx.const(bernoulli(m) / factorial(m)) for m in range(order + 1)])
    return first * todd * a


def evaluate_univariate(p: TruncPoly, value: Scalar) -> Fraction:
    """Evaluate a one-variable polynomial at a number."""
    if p.ctx.num_vars != 1:
        raise ValueError("evaluate_univariate needs a one-variable ring")
    return sum((c * Fraction(value) ** e[0] for e, c in p.terms.items()), Fraction(0))

