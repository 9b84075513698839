"""A formal model of the diagonal/hyperplane subring of CH*(X^r)_Q.

X is a smooth complete intersection of codimension ``codim`` and degree
``degree`` in P^{n+codim}, and h is the hyperplane class.  The classes
handled here are combinations of *diagonal monomials*: a set partition of
the r factors plus an exponent for each block, meaning the pushforward of
prod_B h^{e_B} along the diagonal embedding X^s -> X^r.

Positive exponents on a multi-point block are pushed off the diagonal with

    Delta_*(h^e) = (1/D) sum_{j=c}^{n} h^{e+j-c} x h^{n+c-j}       (e >= c),

the restriction of the diagonal of P^{n+c} to X x X (D = deg X, c = codim,
h^{>n} = 0).  Splitting off the largest index of a block repeatedly gives
the normal form.  Distinct normal monomials are treated as independent.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .partitions import PartitionMap, _canonical
from .ring import RingCtx, TruncPoly, linear_product, make_ring

# a monomial is (rgs, exponents per block)
Monomial = tuple


@dataclass(frozen=True)
class TautCtx:
    n: int
    degree: int
    r: int
    codim: int = 1

    def __post_init__(self) -> None:
        if self.n < 1 or self.degree < 1 or self.r < 1 or self.codim < 1:
            raise ValueError(f"invalid TautCtx {self}")

    def with_r(self, r: int) -> TautCtx:
        return TautCtx(self.n, self.degree, r, self.codim)

    def poly_ring(self) -> RingCtx:
        return make_ring(self.r, [self.n] * self.r)

    def point_integral(self, e: int) -> int:
        """Integral of h^e over X."""
        return self.degree if e == self.n else 0


def _make_key(labels: Sequence, exps_by_label: Mapping) -> Monomial:
    rgs = _canonical(labels)
    exps = [0] * (max(rgs) + 1)
    for lab, j in zip(labels, rgs):
        exps[j] = exps_by_label[lab]
    return (rgs, tuple(exps))


def _block_members(rgs: Sequence[int]) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(max(rgs) + 1)]
    for i, j in enumerate(rgs):
        out[j].append(i)
    return out


def _expandable(ctx: TautCtx, key: Monomial) -> list[int]:
    rgs, exps = key
    sizes = [0] * len(exps)
    for j in rgs:
        sizes[j] += 1
    return [j for j, e in enumerate(exps) if sizes[j] >= 2 and e >= ctx.codim]


def _expand_once(ctx: TautCtx, key: Monomial, block: int) -> list[tuple[Monomial, Fraction]]:
    rgs, exps = key
    members = _block_members(rgs)[block]
    x = members[-1]
    e = exps[block]
    n, c = ctx.n, ctx.codim
    out = []
    for j in range(c, n + 1):
        rest_exp, x_exp = e + j - c, n + c - j
        if rest_exp > n:
            continue
        labels = [("b", lab) for lab in rgs]
        labels[x] = ("x",)
        table = {("b", lab): exps[lab] for lab in range(len(exps))}
        table[("b", block)] = rest_exp
        table[("x",)] = x_exp
        out.append((_make_key(labels, table), Fraction(1, ctx.degree)))
    return out


def normalize(ctx: TautCtx, terms: Mapping, rng: random.Random | None = None) -> dict:
    """Rewrite to normal form.  ``rng`` shuffles the rewrite order (for testing confluence)."""
    done: dict = {}
    work = list(terms.items())
    while work:
        if rng is not None:
            rng.shuffle(work)
        key, c = work.pop()
        if not c:
            continue
        rgs, exps = key
        if any(e > ctx.n or e < 0 for e in exps):
            continue
        cand = _expandable(ctx, key)
        if not cand:
            v = done.get(key, 0) + c
            if v:
                done[key] = v
            else:
                done.pop(key, None)
            continue
        block = rng.choice(cand) if rng is not None else min(cand, key=lambda b: rgs.index(b))
        for new_key, f in _expand_once(ctx, key, block):
            work.append((new_key, c * f))
    return done


class DiagClass:
    """A normalized rational combination of diagonal monomials on X^r."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: TautCtx, terms: Mapping | None = None, *, normalized: bool = False):
        self.ctx = ctx
        raw = {}
        for (rgs, exps), c in (terms or {}).items():
            rgs, exps = tuple(rgs), tuple(exps)
            if len(rgs) != ctx.r:
                raise ValueError(f"monomial {rgs} does not live on X^{ctx.r}")
            if c:
                raw[(rgs, exps)] = raw.get((rgs, exps), 0) + Fraction(c)
        self.terms = raw if normalized else normalize(ctx, raw)

    @classmethod
    def zero(cls, ctx: TautCtx) -> DiagClass:
        return cls(ctx, {})

    def __eq__(self, other: object) -> bool:
        if isinstance(other, DiagClass):
            return self.ctx == other.ctx and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"DiagClass({self.ctx}, {dict(sorted(self.terms.items()))})"

    def _check(self, other: DiagClass) -> None:
        if self.ctx != other.ctx:
            raise ValueError(f"context mismatch: {self.ctx} vs {other.ctx}")

    def __add__(self, other: DiagClass) -> DiagClass:
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return DiagClass(self.ctx, out, normalized=True)

    def __neg__(self) -> DiagClass:
        return self * -1

    def __sub__(self, other: DiagClass) -> DiagClass:
        return self + (-other)

    def __mul__(self, scalar) -> DiagClass:
        if not isinstance(scalar, (int, Fraction)):
            return NotImplemented
        return DiagClass(self.ctx, {k: v * scalar for k, v in self.terms.items()}, normalized=True)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> DiagClass:
        return self * (1 / Fraction(scalar))

    def items(self):
        return sorted(self.terms.items())


# -- constructors ------------------------------------------------------------------


def from_poly(ctx: TautCtx, p: TruncPoly) -> DiagClass:
    """Restrict a polynomial in H_1..H_r to X^r (H_i -> h_i, h^{>n} = 0)."""
    if p.ctx.num_vars != ctx.r:
        raise ValueError(f"polynomial in {p.ctx.num_vars} variables on X^{ctx.r}")
    ident = tuple(range(ctx.r))
    return DiagClass(ctx, {(ident, m): c for m, c in p.items() if max(m, default=0) <= ctx.n},
                     normalized=True)


def monomial(ctx: TautCtx, exps: Sequence[int], coeff=1) -> DiagClass:
    return DiagClass(ctx, {(tuple(range(ctx.r)), tuple(exps)): coeff})


def delta(ctx: TautCtx) -> DiagClass:
    """The small diagonal."""
    return DiagClass(ctx, {((0,) * ctx.r, (0,)): 1})


def d_class(ctx: TautCtx, subset: Iterable[int]) -> DiagClass:
    """D_I: diagonal over the complement of I, the point class h^n/D at each i in I."""
    subset = frozenset(subset)
    if not subset < frozenset(range(ctx.r)):
        raise ValueError(f"{sorted(subset)} must be a proper subset of 0..{ctx.r - 1}")
    labels = [("p", i) if i in subset else ("diag",) for i in range(ctx.r)]
    table = {lab: (ctx.n if lab[0] == "p" else 0) for lab in labels}
    return DiagClass(ctx, {_make_key(labels, table): Fraction(1, ctx.degree ** len(subset))})


def gamma_start(ctx: TautCtx, a: int, b: int) -> DiagClass:
    """prod_{i=0}^{n-1} ((b+i) h_1 + (n-1-i+a) h_2) on X x X, for a + b = d + 1 - n."""
    if ctx.r != 2 or ctx.codim != 1:
        raise ValueError("gamma_start lives on X x X for a hypersurface")
    k = ctx.degree + 1 - ctx.n
    if a < 1 or b < 1 or a + b != k:
        raise ValueError(f"need a, b >= 1 with a + b = {k}, got ({a}, {b})")
    n = ctx.n
    forms = [(b + i, n - 1 - i + a) for i in range(n)]
    return from_poly(ctx, linear_product(ctx.poly_ring(), forms))


# -- operations --------------------------------------------------------------------


def mul_h(x: DiagClass, i: int, m: int) -> DiagClass:
    """Multiply by pr_i^* h^m."""
    if not 0 <= i < x.ctx.r:
        raise IndexError(i)
    out = {}
    for (rgs, exps), c in x.terms.items():
        e = list(exps)
        e[rgs[i]] += m
        key = (rgs, tuple(e))
        out[key] = out.get(key, 0) + c
    return DiagClass(x.ctx, out)


def push_map(x: DiagClass, labels: Sequence[int], raw: bool = False) -> DiagClass:
    """Push forward along X^s -> X^r, (y_j) -> (y_{labels[i]})_i, with labels onto 0..s-1.

    With ``raw`` the result is left unexpanded (positive exponents may sit on
    diagonal blocks), which keeps the geometric shape of the class visible.
    """
    s = x.ctx.r
    if sorted(set(labels)) != list(range(s)):
        raise ValueError(f"{labels} is not a surjection onto 0..{s - 1}")
    tctx = x.ctx.with_r(len(labels))
    out: dict = {}
    for (rgs, exps), c in x.terms.items():
        new_labels = [rgs[j] for j in labels]
        key = _make_key(new_labels, dict(enumerate(exps)))
        out[key] = out.get(key, 0) + c
    return DiagClass(tctx, out, normalized=raw)


def push_diag(a: PartitionMap, x: DiagClass) -> DiagClass:
    """Pushforward along the diagonal embedding X^s -> X^r of a partition."""
    if a.s != x.ctx.r:
        raise ValueError(f"{a} has {a.s} blocks but the class lives on X^{x.ctx.r}")
    return push_map(x, a.rgs)


def push_proj(x: DiagClass, keep: Sequence[int]) -> DiagClass:
    """Pushforward along the projection X^r -> X^{len(keep)} onto the listed factors."""
    ctx = x.ctx
    keep = list(keep)
    if not keep or len(set(keep)) != len(keep) or any(not 0 <= i < ctx.r for i in keep):
        raise ValueError(f"bad projection {keep}")
    out: dict = {}
    kept = set(keep)
    for (rgs, exps), c in x.terms.items():
        factor = Fraction(c)
        for j, members in enumerate(_block_members(rgs)):
            if not kept.intersection(members):
                factor *= ctx.point_integral(exps[j])
        if not factor:
            continue
        key = _make_key([rgs[i] for i in keep], dict(enumerate(exps)))
        out[key] = out.get(key, 0) + factor
    return DiagClass(ctx.with_r(len(keep)), out)


def integrate(x: DiagClass) -> Fraction:
    """Degree of the 0-dimensional part: product over blocks of the integral of h^e."""
    total = Fraction(0)
    for (rgs, exps), c in x.terms.items():
        f = Fraction(c)
        for e in exps:
            f *= x.ctx.point_integral(e)
        total += f
    return total


def swap_poly(p: TruncPoly) -> TruncPoly:
    """Reverse the order of the variables."""
    return p.permute(list(range(p.ctx.num_vars))[::-1])


# -- classification ----------------------------------------------------------------


@dataclass
class Classification:
    delta: Fraction
    b_parts: dict[int, dict[frozenset, Fraction]]
    poly: TruncPoly
    nonstandard: dict = field(default_factory=dict)

    def b_coeff(self, subset: Iterable[int]) -> Fraction:
        subset = frozenset(subset)
        return self.b_parts.get(len(subset), {}).get(subset, Fraction(0))

    def is_standard(self) -> bool:
        return not self.nonstandard


def classify(x: DiagClass, split_top: bool = True) -> Classification:
    """Read off the small diagonal, the D_I and the pure polynomial part.

    With ``split_top`` the monomials prod_{i in I} h_i^n with |I| = r - 1
    (which are D_I up to the factor D^{r-1}) are reported as D_I as well;
    otherwise they stay in the polynomial part.
    """
    ctx = x.ctx
    r, n = ctx.r, ctx.n
    ring = ctx.poly_ring()
    delta_c = Fraction(0)
    b_parts: dict[int, dict[frozenset, Fraction]] = {}
    poly: dict = {}
    odd: dict = {}
    for key, c in x.terms.items():
        rgs, exps = key
        blocks = _block_members(rgs)
        if len(blocks) == 1 and r > 1:
            if exps[0] == 0:
                delta_c += c
            else:
                odd[key] = c
            continue
        if len(blocks) == r:
            if split_top and r >= 2 and sorted(exps) == [0] + [n] * (r - 1):
                subset = frozenset(i for i in range(r) if exps[i] == n)
                b_parts.setdefault(r - 1, {})[subset] = c * ctx.degree ** (r - 1)
            else:
                poly[exps] = c
            continue
        multi = [j for j, m in enumerate(blocks) if len(m) >= 2]
        singles = [j for j, m in enumerate(blocks) if len(m) == 1]
        if len(multi) == 1 and exps[multi[0]] == 0 and all(exps[j] == n for j in singles):
            subset = frozenset(blocks[j][0] for j in singles)
            b_parts.setdefault(len(subset), {})[subset] = c * ctx.degree ** len(subset)
        else:
            odd[key] = c
    return Classification(delta_c, b_parts, TruncPoly(ring, poly), odd)


def reassemble(ctx: TautCtx, cl: Classification) -> DiagClass:
    out = delta(ctx) * cl.delta + from_poly(ctx, cl.poly)
    for subsets in cl.b_parts.values():
        for subset, c in subsets.items():
            out = out + d_class(ctx, subset) * c
    if cl.nonstandard:
        out = out + DiagClass(ctx, cl.nonstandard, normalized=True)
    return out


def is_type_a(x: DiagClass) -> bool:
    """Every monomial is a pure polynomial in which each h_i occurs."""
    return all(len(exps) == x.ctx.r and min(exps) >= 1 for (_, exps) in x.terms)


def drop_type_a(x: DiagClass) -> DiagClass:
    return DiagClass(x.ctx, {k: c for k, c in x.terms.items()
                             if not (len(k[1]) == x.ctx.r and min(k[1]) >= 1)}, normalized=True)


# -- symbolic action on cycles -----------------------------------------------------

GAMMA = "Gamma"


class SymbolicExpr:
    """Formal 0-cycles built from input cycles z_0..z_{m-1} of given codimensions.

    A term is ``coeff * prod_S deg[S] * cycle[T]`` where ``deg[S]`` is the
    degree of prod_{j in S} z_j * h^{n - codim S} and ``cycle[T]`` is the
    0-cycle prod_{j in T} z_j * h^{n - codim T}; ``cycle[()]`` is h^n.  The
    cycle slot may also be the opaque marker ``GAMMA``.
    """

    __slots__ = ("n", "degree", "codims", "terms")

    def __init__(self, n: int, degree: int, codims: Sequence[int], terms: Mapping | None = None):
        self.n, self.degree, self.codims = n, degree, tuple(codims)
        clean: dict = {}
        for key, c in (terms or {}).items():
            if c:
                v = clean.get(key, 0) + Fraction(c)
                if v:
                    clean[key] = v
                else:
                    clean.pop(key, None)
        self.terms = clean

    def _like(self, terms: Mapping) -> SymbolicExpr:
        return SymbolicExpr(self.n, self.degree, self.codims, terms)

    @staticmethod
    def key(degs: Iterable[Iterable[int]], cycle) -> tuple:
        ds = tuple(sorted(tuple(sorted(s)) for s in degs))
        cyc = cycle if cycle == GAMMA else tuple(sorted(cycle))
        return (ds, cyc)

    def __add__(self, other: SymbolicExpr) -> SymbolicExpr:
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return self._like(out)

    def __neg__(self) -> SymbolicExpr:
        return self * -1

    def __sub__(self, other: SymbolicExpr) -> SymbolicExpr:
        return self + (-other)

    def __mul__(self, scalar) -> SymbolicExpr:
        return self._like({k: v * scalar for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SymbolicExpr):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"SymbolicExpr({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (degs, cyc), c in sorted(self.terms.items(), key=lambda kv: repr(kv[0])):
            factors = [f"deg[{','.join(map(str, s))}]" for s in degs]
            if cyc == GAMMA:
                factors.append("Gamma(z)")
            elif cyc:
                factors.append(f"cycle[{','.join(map(str, cyc))}]")
            else:
                factors.append(f"h^{self.n}")
            parts.append(f"({c})*" + "*".join(factors))
        return " + ".join(parts)

    def is_h_multiple(self) -> bool:
        """Only h^n appears as a cycle; everything else is a number."""
        return all(cyc == () for (_, cyc) in self.terms)

    def gamma_free(self) -> SymbolicExpr:
        return self._like({k: v for k, v in self.terms.items() if k[1] != GAMMA})

    def substitute_h(self, j: int) -> SymbolicExpr:
        """Specialize z_j = h^{codim_j}."""
        out: dict = {}
        for (degs, cyc), c in self.terms.items():
            c = Fraction(c)
            new_degs = []
            for s in degs:
                s2 = tuple(i for i in s if i != j)
                if s2:
                    new_degs.append(s2)
                else:
                    c *= self.degree
            new_cyc = cyc if cyc == GAMMA else tuple(i for i in cyc if i != j)
            key = self.key(new_degs, new_cyc)
            out[key] = out.get(key, 0) + c
        return self._like(out)

    def reduce_h_powers(self) -> SymbolicExpr:
        """Replace every cycle of codimension < n by (deg / D) h^n."""
        out: dict = {}
        for (degs, cyc), c in self.terms.items():
            if cyc != GAMMA and cyc and sum(self.codims[i] for i in cyc) < self.n:
                key = self.key(list(degs) + [cyc], ())
                out[key] = out.get(key, 0) + Fraction(c, self.degree)
            else:
                out[(degs, cyc)] = out.get((degs, cyc), 0) + c
        return self._like(out)


def apply_corr(x: DiagClass, codims: Sequence[int], gamma_coeff=0,
               gamma_rule: bool = True) -> SymbolicExpr:
    """Act by x (a correspondence X^{r-1} |- X, last factor = target) on z_0 x ... x z_{r-2}."""
    ctx = x.ctx
    n = ctx.n
    if len(codims) != ctx.r - 1:
        raise ValueError(f"need {ctx.r - 1} input cycles, got {len(codims)}")
    if sum(codims) != n or min(codims, default=1) < 1:
        raise ValueError(f"codimensions {tuple(codims)} must be positive and sum to {n}")
    out = SymbolicExpr(n, ctx.degree, codims)
    target = ctx.r - 1
    acc: dict = {}
    for (rgs, exps), c in x.terms.items():
        degs, cyc, alive = [], None, True
        for j, members in enumerate(_block_members(rgs)):
            inputs = [i for i in members if i != target]
            weight = sum(codims[i] for i in inputs) + exps[j]
            if target in members:
                if weight != n:
                    alive = False
                    break
                cyc = inputs
            else:
                if weight != n:
                    alive = False
                    break
                degs.append(inputs)
        if not alive:
            continue
        key = SymbolicExpr.key(degs, cyc)
        acc[key] = acc.get(key, 0) + c
    if gamma_coeff and not gamma_rule:
        acc[((), GAMMA)] = Fraction(gamma_coeff)
    return out + SymbolicExpr(n, ctx.degree, codims, acc)


def subsets_of_size(r: int, j: int) -> list[frozenset]:
    return [frozenset(c) for c in combinations(range(r), j)]
