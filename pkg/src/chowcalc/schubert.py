"""Schubert calculus on G(2, N) and the collinear-point varieties over it.

Conventions (pinned by the tests, not assumed):

* G = G(2, N) parametrises lines in P^{N-1}; S is the rank 2 tautological
  subbundle and c(S^dual) = 1 + sigma_1 + sigma_{1,1}.
* W_r = L x_G ... x_G L (r copies of the universal line L = P(S)).  With
  xi_i the pull-back of the hyperplane class from the i-th point,
  CH*(W_r) = CH*(G)[xi_1..xi_r] / (xi_i^2 - sigma_1 xi_i + sigma_{1,1}).
* Over W_r the universal line P(S) -> W_r carries its own class zeta with the
  same relation; the section through the i-th point has class
  [B_i] = zeta + xi_i - sigma_1.

Grassmannian classes are plain dicts ``{(a, b): Fraction}``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .chern import BundleSpec
from .ring import RingCtx, TruncPoly, make_ring

GrassElem = dict  # {(a, b): Fraction}


def _add_into(acc: dict, key, c) -> None:
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


class GrassCtx:
    """Chow ring of G(2, N) in the Schubert basis sigma_{a,b}, N-2 >= a >= b >= 0."""

    def __init__(self, N: int):
        if N < 2:
            raise ValueError("G(2, N) needs N >= 2")
        self.N = N
        self.k = N - 2
        self.dim = 2 * self.k
        self.basis = tuple((a, b) for a in range(self.k + 1) for b in range(a + 1))
        self._mul_basis = lru_cache(maxsize=None)(self._mul_basis_uncached)

    def __repr__(self) -> str:
        return f"GrassCtx(N={self.N})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GrassCtx) and other.N == self.N

    def __hash__(self) -> int:
        return hash(("G2", self.N))

    def sigma(self, a: int, b: int = 0) -> GrassElem:
        if not (self.k >= a >= b >= 0):
            return {}
        return {(a, b): Fraction(1)}

    def one(self) -> GrassElem:
        return self.sigma(0, 0)

    def pieri(self, x: Mapping, c: int) -> GrassElem:
        """Multiply by the special class sigma_c (horizontal strips)."""
        if c < 0:
            return {}
        out: dict = {}
        for (a, b), coef in x.items():
            for y in range(b, a + 1):
                xx = a + b + c - y
                if a <= xx <= self.k:
                    _add_into(out, (xx, y), coef)
        return out

    def _mul_basis_uncached(self, s: tuple[int, int], t: tuple[int, int]) -> tuple:
        c, e = t
        x = {s: Fraction(1)}
        if e == 0:
            prod = self.pieri(x, c)
        else:
            # Giambelli: sigma_{c,e} = sigma_c sigma_e - sigma_{c+1} sigma_{e-1}
            prod = dict(self.pieri(self.pieri(x, e), c))
            for key, v in self.pieri(self.pieri(x, e - 1), c + 1).items():
                _add_into(prod, key, -v)
        return tuple(sorted(prod.items()))

    def mul(self, x: Mapping, y: Mapping) -> GrassElem:
        out: dict = {}
        for s, cs in x.items():
            for t, ct in y.items():
                for key, v in self._mul_basis(s, t):
                    _add_into(out, key, cs * ct * v)
        return out

    def power(self, x: Mapping, m: int) -> GrassElem:
        out = self.one()
        for _ in range(m):
            out = self.mul(out, x)
        return out

    def integrate(self, x: Mapping) -> Fraction:
        return Fraction(x.get((self.k, self.k), 0))


def pieri_mul(ctx: GrassCtx, x: Mapping, y: Mapping) -> GrassElem:
    return ctx.mul(x, y)


# -- the tower W_r and the universal line over it ----------------------------


@dataclass(frozen=True)
class TowerCtx:
    grass: GrassCtx
    r: int
    fiber: bool = False

    @property
    def nbits(self) -> int:
        return self.r + (1 if self.fiber else 0)

    @property
    def zeta_bit(self) -> int:
        if not self.fiber:
            raise ValueError("this tower has no fiber variable")
        return 1 << self.r

    @property
    def full_mask(self) -> int:
        return (1 << self.nbits) - 1

    @property
    def dim(self) -> int:
        return self.grass.dim + self.nbits

    def base(self) -> TowerCtx:
        return TowerCtx(self.grass, self.r, False)

    def element(self, terms: Mapping) -> TowerElem:
        return TowerElem(self, terms)

    def one(self) -> TowerElem:
        return TowerElem(self, {(0, (0, 0)): 1})

    def from_grass(self, g: Mapping) -> TowerElem:
        return TowerElem(self, {(0, ab): c for ab, c in g.items()})

    def sigma1(self) -> TowerElem:
        return self.from_grass(self.grass.sigma(1))

    def sigma11(self) -> TowerElem:
        return self.from_grass(self.grass.sigma(1, 1))

    def xi(self, i: int) -> TowerElem:
        if not 0 <= i < self.r:
            raise IndexError(i)
        return TowerElem(self, {(1 << i, (0, 0)): 1})

    def zeta(self) -> TowerElem:
        return TowerElem(self, {(self.zeta_bit, (0, 0)): 1})


def tower(ctx: GrassCtx, r: int, fiber: bool = False) -> TowerCtx:
    if r < 0:
        raise ValueError("r must be non-negative")
    return TowerCtx(ctx, r, fiber)


@lru_cache(maxsize=None)
def _overlap_factors(grass: GrassCtx, o: int) -> tuple:
    """For each subset T of an o-element overlap: sigma_1^|T| (-sigma_11)^(o-|T|)."""
    s1 = grass.sigma(1)
    m11 = {k: -v for k, v in grass.sigma(1, 1).items()}
    out = []
    for t in range(o + 1):
        out.append(tuple(sorted(grass.mul(grass.power(s1, t), grass.power(m11, o - t)).items())))
    return tuple(out)


class TowerElem:
    """Element of CH*(W_r) (optionally of CH*(P(S)) over it) in normal form.

    ``terms`` maps ``(mask, (a, b))`` to a Fraction, meaning
    coefficient * prod_{bits in mask} xi_i (or zeta) * sigma_{a,b}.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: TowerCtx, terms: Mapping):
        self.ctx = ctx
        clean: dict = {}
        k = ctx.grass.k
        for (mask, (a, b)), c in terms.items():
            if c and k >= a >= b >= 0 and 0 <= mask <= ctx.full_mask:
                _add_into(clean, (mask, (a, b)), Fraction(c))
        self.terms = clean

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TowerElem):
            return self.ctx == other.ctx and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"TowerElem({dict(sorted(self.terms.items()))})"

    def __add__(self, other: TowerElem) -> TowerElem:
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(out, k, v)
        return TowerElem(self.ctx, out)

    def __neg__(self) -> TowerElem:
        return TowerElem(self.ctx, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: TowerElem) -> TowerElem:
        return self + (-other)

    def __mul__(self, other) -> TowerElem:
        if isinstance(other, (int, Fraction)):
            return TowerElem(self.ctx, {k: v * other for k, v in self.terms.items()})
        if self.ctx != other.ctx:
            raise ValueError("tower elements from different contexts")
        grass = self.ctx.grass
        out: dict = {}
        for (m1, s1), c1 in self.terms.items():
            for (m2, s2), c2 in other.terms.items():
                base = grass._mul_basis(s1, s2)
                if not base:
                    continue
                overlap = m1 & m2
                sym = m1 ^ m2
                bits = [1 << i for i in range(self.ctx.nbits) if overlap >> i & 1]
                factors = _overlap_factors(grass, len(bits))
                for size in range(len(bits) + 1):
                    fac = factors[size]
                    if not fac:
                        continue
                    coeff = grass.mul(dict(base), dict(fac))
                    if not coeff:
                        continue
                    for chosen in itertools.combinations(bits, size):
                        mask = sym | sum(chosen)
                        for ab, v in coeff.items():
                            _add_into(out, (mask, ab), c1 * c2 * v)
        return TowerElem(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, m: int) -> TowerElem:
        out = self.ctx.one()
        for _ in range(m):
            out = out * self
        return out

    def degree_parts(self) -> set[int]:
        return {bin(mask).count("1") + a + b for (mask, (a, b)) in self.terms}

    def grass_coeff(self, mask: int) -> GrassElem:
        return {ab: c for (m, ab), c in self.terms.items() if m == mask}


def tower_mul(x: TowerElem, y: TowerElem) -> TowerElem:
    return x * y


def tower_integrate(x: TowerElem) -> Fraction:
    """Push down every P^1 (xi_i -> 1, xi_i-free -> 0), then integrate on G."""
    return x.ctx.grass.integrate(x.grass_coeff(x.ctx.full_mask))


def fiber_pushforward(x: TowerElem) -> TowerElem:
    """p_*: CH(P(S)) -> CH(W_r), keeping the zeta-linear part."""
    zb = x.ctx.zeta_bit
    base = x.ctx.base()
    return TowerElem(base, {(m & ~zb, ab): c for (m, ab), c in x.terms.items() if m & zb})


def restrict_to_section(x: TowerElem, j: int) -> TowerElem:
    """Pull back along the j-th tautological section (zeta -> xi_j)."""
    zb = x.ctx.zeta_bit
    base = x.ctx.base()
    plain = TowerElem(base, {(m, ab): c for (m, ab), c in x.terms.items() if not m & zb})
    linear = TowerElem(base, {(m & ~zb, ab): c for (m, ab), c in x.terms.items() if m & zb})
    return plain + linear * base.xi(j)


def d_class(tctx: TowerCtx, i: int) -> TowerElem:
    """Class of the divisor B_i in P(S) traced by the i-th point."""
    return tctx.zeta() + tctx.xi(i) - tctx.sigma1()


# -- bundles on W_r ---------------------------------------------------------------


def sym_top_chern(tctx: TowerCtx, m: int, twist: TowerElem) -> TowerElem:
    """c_{m+1}(Sym^m S^dual (x) L) with c_1(L) = twist.

    The roots j x1 + (m - j) x2 + l are paired (j with m - j) so that every
    factor is symmetric in x1, x2 and can be written with
    sigma_1 = x1 + x2 and sigma_11 = x1 x2.
    """
    if m < 0:
        return tctx.one()
    s1, s11 = tctx.sigma1(), tctx.sigma11()
    s1sq = s1 * s1
    out = tctx.one()
    for j in range((m + 1) // 2):
        k = m - j
        pair = (s1sq * (j * k) + s11 * (j * j + k * k - 2 * j * k)
                + twist * s1 * m + twist * twist)
        out = out * pair
    if m % 2 == 0:
        out = out * (s1 * Fraction(m, 2) + twist)
    return out


class RankMismatch(ValueError):
    pass


def f_bundle_rank(a: Sequence[int], degrees: Sequence[int]) -> int:
    k = sum(a)
    ranks = [d - k + 1 for d in degrees]
    if any(x < 0 for x in ranks):
        raise RankMismatch(f"Sym^{{d-k}} with d - k < -1 for degrees {degrees}, a={a}")
    return sum(ranks)


def f_bundle_top_chern(tctx: TowerCtx, a: Sequence[int], spec: BundleSpec,
                       expected_rank: int | None = None) -> TowerElem:
    """Top Chern class of F~(a) = sum_i Sym^{d_i - K} S^dual (x) O(K sigma_1 - sum a_j xi_j)."""
    if not spec.is_split:
        raise NotImplementedError("F~(a) is only implemented for split bundles")
    if len(a) != tctx.r:
        raise ValueError(f"tuple {a} does not match W_{tctx.r}")
    rank = f_bundle_rank(a, spec.degrees)
    if expected_rank is not None and rank != expected_rank:
        raise RankMismatch(f"F~({a}) has rank {rank}, expected {expected_rank}")
    k = sum(a)
    twist = tctx.sigma1() * k
    for j, aj in enumerate(a):
        twist = twist - tctx.xi(j) * aj
    out = tctx.one()
    for d in spec.degrees:
        out = out * sym_top_chern(tctx, d - k, twist)
    return out


def products_ring(tctx: TowerCtx) -> RingCtx:
    """CH* of (P^{N-1})^r, the target of W_r."""
    return make_ring(tctx.r, [tctx.grass.N - 1] * tctx.r)


def pushforward_to_products(tctx: TowerCtx, elem: TowerElem,
                            target: RingCtx | None = None) -> TruncPoly:
    """Class of i_*(elem) in CH*((P^{N-1})^r), by pairing with the dual monomials.

    [prod H^m] i_*(elem) = integral over W_r of elem * prod xi_i^{N-1-m_i}.
    Pushing xi^e down one P^1 gives sigma_{e-1}, so each integral is a chain
    of Pieri products.
    """
    if tctx.fiber:
        raise ValueError("push the fiber variable down first")
    grass = tctx.grass
    N, r = grass.N, tctx.r
    if target is None:
        target = products_ring(tctx)
    if target.caps != (N - 1,) * r:
        raise ValueError(f"target must be (P^{N - 1})^{r}")
    by_mask: dict[int, dict] = {}
    for (mask, ab), c in elem.terms.items():
        _add_into(by_mask.setdefault(mask, {}), ab, c)
    codim = r * (N - 1) - tctx.dim
    out = {}
    for deg in sorted(elem.degree_parts()):
        for m in target.monomials(deg + codim):
            total = Fraction(0)
            for mask, g in by_mask.items():
                x = g
                for i in range(r):
                    x = grass.pieri(x, N - 1 - m[i] - 1 + (mask >> i & 1))
                    if not x:
                        break
                total += grass.integrate(x)
            if total:
                out[m] = total
    return TruncPoly(target, out)


def compute_p(n: int, spec: BundleSpec, a: Sequence[int]) -> TruncPoly:
    """P_a = -i_* c_top(F~(a)) in CH*((P^{n+rk})^{len a}), rk = rank E.

    Covers both the Calabi-Yau case (a = (1, 1, 1), E = sum O(d_i)) and the
    hypersurface case (E = O(d), any tuple summing to d + 1 - n).
    """
    rk = spec.rank
    N = n + rk + 1
    tctx = tower(GrassCtx(N), len(a))
    top = f_bundle_top_chern(tctx, a, spec, expected_rank=n - rk + 1)
    return -pushforward_to_products(tctx, top)


@dataclass(frozen=True)
class FanoData:
    expected_dim: int
    degree: Fraction | None


def fano(spec: BundleSpec, N: int) -> FanoData:
    """Expected dimension of the lines on X in P^{N-1}, and their number when finite."""
    if not spec.is_split:
        raise NotImplementedError("Fano degrees are computed for split bundles only")
    grass = GrassCtx(N)
    rank = sum(d + 1 for d in spec.degrees)
    dim = grass.dim - rank
    if dim != 0:
        return FanoData(dim, None)
    tctx = tower(grass, 0)
    top = tctx.one()
    zero = TowerElem(tctx, {})
    for d in spec.degrees:
        top = top * sym_top_chern(tctx, d, zero)
    return FanoData(0, tower_integrate(top))
