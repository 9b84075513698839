"""End-to-end pipelines: small-diagonal decompositions and their checks.

Two settings are covered.

* Calabi-Yau complete intersections X (c_1(E) = n + r + 1).  The small
  diagonal of X^3 is, up to the factor N = a_0 deg X, the sum of the lines
  cycle Gamma, three copies of Q along the big diagonals, and a polynomial P.
* Hypersurfaces of degree d >= n + 2, with k = d + 1 - n.  The classes
  gamma_a of collinear tuples with prescribed contact orders are obtained
  recursively from the two-point classes, and gamma_{1^k} yields a
  decomposition of the small diagonal of X^k.

Every identity is checked inside the formal ring of :mod:`chowcalc.tautring`.
"""
from __future__ import annotations

import logging
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import factorial, prod
from typing import Any, Iterable, Sequence

from .chern import (
    BundleSpec,
    QResult,
    a0_closed_form,
    a1_closed_form,
    check_calabi_yau,
    compute_q,
    degree_of_x,
    m_top_chern_grr,
    m_top_chern_split,
)
from .partitions import count_with_isolated, enumerate_partitions, identity_sum, pull_tuple, stirling2
from .ring import TruncPoly
from .schubert import GrassCtx, compute_p, fano
from .tautring import (
    Classification,
    DiagClass,
    SymbolicExpr,
    TautCtx,
    apply_corr,
    classify,
    d_class,
    delta,
    drop_type_a,
    from_poly,
    gamma_start,
    integrate,
    mul_h,
    normalize,
    push_map,
    push_proj,
    swap_poly,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_K = 6
DEFAULT_MAX_N = 6


def desk_caps() -> tuple[int, int]:
    """(max k, max n); CHOWCALC_MAX_K raises the k cap."""
    raw = os.environ.get("CHOWCALC_MAX_K")
    max_k = int(raw) if raw else DEFAULT_MAX_K
    return max_k, DEFAULT_MAX_N


@dataclass
class Check:
    name: str
    passed: bool | None  # None means inconclusive
    lhs: Any = None
    rhs: Any = None
    note: str = ""


def _check(name: str, lhs, rhs, note: str = "") -> Check:
    return Check(name, lhs == rhs, lhs, rhs, note)


def all_pass(checks: Iterable[Check]) -> bool:
    return all(c.passed is not False for c in checks)


def compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts <= 0:
        return [()] if total == 0 else []
    if parts == 1:
        return [(total,)] if total >= 1 else []
    return [(first,) + rest
            for first in range(1, total - parts + 2)
            for rest in compositions(total - first, parts - 1)]


# -- the Calabi-Yau case -----------------------------------------------------------


@dataclass
class CyReport:
    spec: BundleSpec
    n: int
    q: QResult
    deg_x: Fraction
    big_n: Fraction
    p_poly: TruncPoly | None
    checks: list[Check]
    nondegenerate: bool

    @property
    def gamma_coeff(self) -> Fraction:
        """Coefficient of Gamma once the small diagonal has coefficient 1."""
        return 1 / self.big_n


def cy_taut_ctx(spec: BundleSpec, n: int, deg_x) -> TautCtx:
    return TautCtx(n, int(deg_x), 3, codim=spec.rank)


def cy_q_terms(ctx: TautCtx, q: TruncPoly, raw: bool = False) -> DiagClass:
    """j12_* Q(h1, h2) + j13_* Q(h1, h3) + j23_* Q(h3, h2) on X^3."""
    two = ctx.with_r(2)
    q_x = from_poly(two, q)
    q_swapped = from_poly(two, swap_poly(q))
    return (push_map(q_x, (0, 0, 1), raw) + push_map(q_x, (0, 1, 0), raw)
            + push_map(q_swapped, (0, 1, 1), raw))


def p_from_point_slice(ctx: TautCtx, a: Sequence[Fraction]) -> DiagClass:
    """The part of P with an h^n factor on the last slot, as forced by the point-slice relation."""
    n = ctx.n
    ring = ctx.poly_ring()
    terms = {(i, n - i, n): -(a[i] + a[n - i]) / ctx.degree for i in range(n + 1)}
    return from_poly(ctx, TruncPoly(ring, terms))


def cy_pipeline(spec: BundleSpec, n: int, with_p: bool = False) -> CyReport:
    check_calabi_yau(n, spec)
    max_k, max_n = desk_caps()
    if n > max_n:
        raise ValueError(f"n = {n} exceeds the desk-scale cap {max_n}")
    if with_p and not spec.is_split:
        raise ValueError("P is only available for split bundles")
    q = compute_q(n, spec)
    a = q.a
    deg_x = degree_of_x(spec, n)
    big_n = a[0] * deg_x
    checks: list[Check] = [_check("n_equals_a0_deg_x", big_n, a[0] * deg_x, "N = a_0 deg X")]
    if spec.is_split:
        checks.append(_check("N_factorials", big_n, Fraction(prod(factorial(d) for d in spec.degrees))))
        checks.append(_check("a0_closed_form", a[0], a0_closed_form(spec)))
        a1_note = "single hypersurface: the n + 2 term is absent" if spec.rank == 1 else ""
        checks.append(_check("a1_closed_form", a[1], a1_closed_form(spec, n), a1_note))
        checks.append(_check("grr_vs_split", m_top_chern_grr(n, spec.rank, spec),
                             m_top_chern_split(n, spec)))
        fd = fano(spec, n + spec.rank + 1)
        checks.append(_check("fano_expected_dim", fd.expected_dim, n - 3))
    checks.append(Check("q_integral", q.q_poly.is_integral(), note="Q has integer coefficients"))
    checks.append(Check("diamond", q.diamond, lhs=[str(a[0]), str(a[1])],
                        note="a_0 != 0 and a_1 != a_0"))

    ctx = cy_taut_ctx(spec, n, deg_x)
    q_terms = cy_q_terms(ctx, q.q_poly)
    p_poly = None
    if with_p:
        p_poly = compute_p(n, spec, (1, 1, 1))
        checks.append(Check("p_integral", p_poly.is_integral()))
        sym = all(p_poly.permute(perm) == p_poly
                  for perm in ((1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)))
        checks.append(Check("p_symmetric", sym))
        for i in range(n + 1):
            lhs = p_poly.coeff((i, n - i, n))
            rhs = -(a[i] + a[n - i]) / deg_x
            checks.append(_check(f"point_slice[{i},{n - i},{n}]", lhs, rhs))
        p_x = from_poly(ctx, p_poly.embed(ctx.poly_ring(), [0, 1, 2]))
        p_note = ""
    else:
        p_x = p_from_point_slice(ctx, a)
        p_note = "P replaced by its point-slice part"
    residual = delta(ctx) * big_n - q_terms - p_x
    projected = push_proj(residual, [0, 1])
    checks.append(Check("pr12_residual", not projected, lhs=str(len(projected.terms)), rhs="0",
                        note=p_note))
    if spec.rank == 1:
        cl = classify(q_terms / big_n)
        b1 = cl.b_parts.get(1, {})
        values = [b1.get(frozenset({i}), Fraction(0)) for i in range(3)]
        checks.append(Check("three_point_recovery", all(v == 1 for v in values),
                            lhs=[str(v) for v in values], rhs="1"))
    report = CyReport(spec, n, q, deg_x, big_n, p_poly, checks, q.diamond)
    raw = cy_q_terms(ctx, q.q_poly, raw=True) + p_x
    report.checks.extend(cy_corollary_suite(report, raw, q_terms + p_x))
    return report


def product_formula_expected(n: int, degree, a: Sequence[Fraction], k: int, l: int) -> SymbolicExpr:
    """a_0 deg(Z.Z') h^n + a_l deg(Z') Z.h^l + a_k deg(Z) Z'.h^k - (a_k+a_l) deg Z deg Z'/D h^n."""
    key = SymbolicExpr.key
    return SymbolicExpr(n, degree, (k, l), {
        key([(0, 1)], ()): a[0],
        key([(1,)], (0,)): a[l],
        key([(0,)], (1,)): a[k],
        key([(0,), (1,)], ()): -(a[k] + a[l]) / degree,
    })


def cy_corollary_suite(report: CyReport, raw: DiagClass, normal: DiagClass) -> list[Check]:
    """Act with both sides of the decomposition on Z x Z' for every codimension split.

    ``raw`` keeps the big-diagonal pushforwards unexpanded, so its action is
    the four-term formula; ``normal`` is the same class in normal form.
    """
    n, a = report.n, report.q.a
    degree = raw.ctx.degree
    key = SymbolicExpr.key
    out = []
    for k in range(1, n):
        l = n - k
        expr = apply_corr(raw, (k, l), gamma_coeff=1, gamma_rule=True)
        out.append(_check(f"product_formula[{k},{l}]", expr, product_formula_expected(n, degree, a, k, l)))
        # Z = h^k: the two sides differ by (a_0 - a_k)(D Z'.h^k - deg Z' h^n)
        lhs = SymbolicExpr(n, degree, (k, l), {key([], (0, 1)): report.big_n})
        diff = (lhs - expr).substitute_h(0)
        want = SymbolicExpr(n, degree, (k, l), {
            key([], (1,)): (a[0] - a[k]) * degree,
            key([(1,)], ()): -(a[0] - a[k]),
        })
        out.append(_check(f"h_specialization[{k},{l}]", diff, want))
        reduced = expr.reduce_h_powers()
        out.append(_check(f"h_reduction_matches_normal_form[{k},{l}]", reduced,
                          apply_corr(normal, (k, l)).reduce_h_powers()))
        if report.nondegenerate:
            out.append(Check(f"product_in_Qh^n[{k},{l}]", reduced.is_h_multiple(), lhs=str(reduced)))
        else:
            out.append(Check(f"product_in_Qh^n[{k},{l}]", None, note="inconclusive: diamond fails"))
    return out


# -- hypersurfaces: the gamma recursion --------------------------------------------


def mu(r: int) -> int:
    return (-1) ** r * factorial(r - 2)


def psi(d: int, k: int, a: int) -> Fraction:
    return Fraction(d * factorial(d - a), factorial(k - 1 - a))


class GammaEngine:
    """gamma_a for tuples of positive contact orders summing to k = d + 1 - n.

    Without P the pure polynomials in which every h_i occurs are discarded
    (they only ever push forward to such polynomials); the D_i coefficients
    stay exact, the D_I with |I| >= 2 do not.  With P the classes are complete.
    """

    def __init__(self, n: int, d: int, with_p: bool = False):
        self.n, self.d = n, d
        self.k = d + 1 - n
        if self.k < 2:
            raise ValueError(f"need d + 1 - n >= 2, got n={n}, d={d}")
        self.with_p = with_p
        self.base = TautCtx(n, d, 1)
        self._memo: dict[tuple[int, ...], DiagClass] = {}
        self._spec = BundleSpec.split([d])

    def ctx(self, r: int) -> TautCtx:
        return self.base.with_r(r)

    def _validate(self, a: Sequence[int]) -> None:
        if len(a) < 2 or min(a) < 1 or sum(a) != self.k:
            raise ValueError(f"tuple {tuple(a)} must have >= 2 positive entries summing to {self.k}")

    def p_class(self, a: Sequence[int]) -> DiagClass:
        p = compute_p(self.n, self._spec, tuple(a))
        ctx = self.ctx(len(a))
        return from_poly(ctx, p.embed(ctx.poly_ring(), list(range(len(a)))))

    def gamma(self, a: Sequence[int]) -> DiagClass:
        a = tuple(a)
        self._validate(a)
        b = tuple(sorted(a))
        if b not in self._memo:
            self._memo[b] = self._compute(b)
        if a == b:
            return self._memo[b]
        used = [False] * len(b)
        perm = []
        for v in a:
            j = next(j for j in range(len(b)) if b[j] == v and not used[j])
            used[j] = True
            perm.append(j)
        return push_map(self._memo[b], perm)

    def _compute(self, b: tuple[int, ...]) -> DiagClass:
        r = len(b)
        if r == 2:
            out = gamma_start(self.ctx(2), b[0], b[1])
        else:
            total = DiagClass.zero(self.ctx(r))
            for s in range(2, r):
                for alpha in enumerate_partitions(r, s):
                    inner = self.gamma(pull_tuple(alpha, b))
                    total = total + push_map(inner, alpha.rgs)
            out = -total
            if self.with_p:
                out = out - self.p_class(b)
        log.debug("gamma%s: %d terms", b, len(out.terms))
        return out if self.with_p else drop_type_a(out)


def hyp_gamma(n: int, d: int, a: Sequence[int], with_p: bool = False,
              engine: GammaEngine | None = None) -> DiagClass:
    engine = engine or GammaEngine(n, d, with_p)
    return engine.gamma(a)


def verify_gamma_coefficients(n: int, d: int, r_max: int, engine: GammaEngine | None = None) -> list[Check]:
    """Compare every D_i coefficient of gamma_a with mu_r psi(a_i)."""
    engine = engine or GammaEngine(n, d)
    k = engine.k
    if not 2 <= r_max <= k:
        raise ValueError(f"need 2 <= r_max <= {k}")
    out = []
    for r in range(2, r_max + 1):
        for a in compositions(k, r):
            cl = classify(engine.gamma(a))
            got = [cl.b_coeff({i}) for i in range(r)]
            want = [mu(r) * psi(d, k, x) for x in a]
            out.append(Check(f"gamma{a}", got == want, [str(x) for x in got],
                             [str(x) for x in want]))
    return out


# -- hypersurfaces: the decomposition ----------------------------------------------


@dataclass
class Identity:
    """0 = gamma * Gamma + const + lambda_0 * lam0, on X^r."""

    gamma: Fraction
    const: DiagClass
    lam0: DiagClass


def project_reduce(identity: Identity, l: int) -> Identity:
    """Push the identity to the first l factors; Gamma dies (relative dimension 1)."""
    r = identity.const.ctx.r
    if not 1 <= l < r:
        raise ValueError(f"can only project X^{r} to fewer factors, got l={l}")
    keep = list(range(l))
    return Identity(Fraction(0), push_proj(identity.const, keep), push_proj(identity.lam0, keep))


@dataclass
class HypReport:
    n: int
    d: int
    k: int
    with_p: bool
    gamma_table: dict[tuple[int, ...], Classification]
    lambdas: dict[int, Fraction]
    lambda1: Fraction
    gamma_coeff: Fraction
    p_poly: TruncPoly | None
    identity: Identity
    reduced: Identity
    gamma_empty: bool
    checks: list[Check]
    case_notes: list[str] = field(default_factory=list)

    @property
    def normalized_lambdas(self) -> dict[int, Fraction]:
        """Case 1 coefficients of sum_{|I|=j} D_I after dividing by lambda_1."""
        return {j: v / self.lambda1 for j, v in self.lambdas.items()}


def _symmetric_buckets(cl: Classification, r: int, top: int) -> tuple[dict[int, Fraction], list[Check]]:
    lambdas: dict[int, Fraction] = {}
    checks = []
    for j in range(1, top + 1):
        bucket = cl.b_parts.get(j, {})
        values = {bucket.get(frozenset(I), Fraction(0)) for I in combinations(range(r), j)}
        checks.append(Check(f"lambda_{j}_symmetric", len(values) == 1,
                            lhs=sorted(str(v) for v in values)))
        lambdas[j] = next(iter(values)) if len(values) == 1 else Fraction(0)
    return lambdas, checks


def hyp_pipeline(n: int, d: int, with_p: bool = False) -> HypReport:
    k = d + 1 - n
    if d < n + 2:
        raise ValueError(f"need d >= n + 2, got n={n}, d={d}")
    max_k, max_n = desk_caps()
    if k > max_k or n > max_n:
        raise ValueError(f"(n, k) = ({n}, {k}) exceeds the desk-scale caps (n <= {max_n}, k <= {max_k});"
                         " set CHOWCALC_MAX_K to raise the k cap")
    engine = GammaEngine(n, d, with_p)
    ones = (1,) * k
    gamma_full = engine.gamma(ones)
    ctx = engine.ctx(k)
    cl = classify(gamma_full, split_top=False)
    lambdas, checks = _symmetric_buckets(cl, k, k - 2)
    lambda1 = lambdas.get(1, Fraction(0))
    checks.append(_check("lambda1", lambda1, Fraction((-1) ** k * factorial(d))))
    checks.append(Check("standard_form", cl.is_standard(), lhs=len(cl.nonstandard), rhs=0))
    checks.append(_check("mu_k_psi_1", mu(k) * psi(d, k, 1), Fraction((-1) ** k * factorial(d))))
    gamma_coeff = -1 / lambda1 if lambda1 else Fraction(0)
    checks.append(_check("gamma_coeff_case1", gamma_coeff, Fraction((-1) ** (k - 1), factorial(d))))

    p_poly = None
    if with_p:
        p_poly = compute_p(n, BundleSpec.split([d]), ones)
        checks.append(Check("p_integral", p_poly.is_integral()))

    gamma_table = {}
    for r in range(2, k + 1):
        for a in compositions(k, r):
            b = tuple(sorted(a))
            if b not in gamma_table:
                gamma_table[b] = classify(engine.gamma(b))

    # Gamma = lambda_0 delta + gamma_{1^k}  <=>  0 = -Gamma + gamma_{1^k} + lambda_0 delta
    identity = Identity(Fraction(-1), gamma_full, delta(ctx))
    reduced = project_reduce(identity, k - 1)
    rc, rl = classify(reduced.const, split_top=False), classify(reduced.lam0, split_top=False)
    checks.append(_check("reduced_delta_coeff", rc.delta, lambda1,
                         "projection turns D_k into the small diagonal"))
    checks.append(_check("reduced_lambda0_coeff", rl.delta, Fraction(1)))
    if with_p:
        r_lambdas, r_checks = _symmetric_buckets(rc, k - 1, k - 3)
        checks.extend(Check("reduced_" + c.name, c.passed, c.lhs) for c in r_checks)
    checks.append(Check("reduced_standard_form", rc.is_standard()))

    notes = [
        "lambda_0 (small-diagonal coefficient of the lift from X^k minus the small diagonal) is a free parameter",
        f"case 1 (lambda_0 = -lambda_1): delta = ({gamma_coeff})*Gamma + sum D_i + ...",
        "case 2 (lambda_0 != -lambda_1): project to fewer factors (project_reduce) and divide by lambda_0 + lambda_1",
    ]
    if not with_p:
        notes.append("without P the D_I coefficients with |I| >= 2 are partial")
    gamma_empty = k > n
    if gamma_empty:
        notes.append("Gamma is empty (k > n): the identity is a relation among the D_I and a polynomial")
    report = HypReport(n, d, k, with_p, gamma_table, lambdas, lambda1, gamma_coeff, p_poly,
                       identity, reduced, gamma_empty, checks, notes)
    report.checks.extend(hyp_corollary_suite(report))
    return report


def hyp_corollary_suite(report: HypReport) -> list[Check]:
    """Act with the case 1 right-hand side on z_1 x ... x z_{k-1}: only h^n may survive."""
    k, n = report.k, report.n
    if not report.lambda1:
        return [Check("corollary", None, note="inconclusive: lambda_1 = 0")]
    rhs = report.identity.const / report.lambda1
    comps = compositions(n, k - 1)
    if not comps:
        return [Check("corollary", True, note=f"no compositions of {n} into {k - 1} positive parts")]
    out = []
    ctx = rhs.ctx
    for comp in comps:
        expr = apply_corr(rhs, comp, gamma_coeff=report.gamma_coeff, gamma_rule=True)
        point = d_class(ctx, [k - 1])
        expected_point = apply_corr(point, comp)
        out.append(Check(f"corollary{comp}", expr.is_h_multiple(), lhs=str(expr)))
        out.append(_check(f"point_term{comp}", expected_point,
                          SymbolicExpr(n, ctx.degree, comp,
                                       {SymbolicExpr.key([tuple(range(k - 1))], ()): Fraction(1, ctx.degree)})))
    return out


# -- verification suites -----------------------------------------------------------


def calabi_yau_split_specs(n_max: int, r_max: int) -> list[tuple[int, BundleSpec]]:
    """All (n, O(d_1,..,d_r)) with d_i >= 2, sum d_i = n + r + 1, n - r + 1 >= 0."""
    out = []

    def parts(total: int, count: int, largest: int):
        if count == 0:
            if total == 0:
                yield ()
            return
        for first in range(min(largest, total - 2 * (count - 1)), 1, -1):
            for rest in parts(total - first, count - 1, first):
                yield (first,) + rest

    for n in range(1, n_max + 1):
        for r in range(1, r_max + 1):
            if n - r + 1 < 0:
                continue
            for degs in parts(n + r + 1, r, n + r + 1):
                out.append((n, BundleSpec.split(degs)))
    return out


def verify_grr(n_max: int = 6, r_max: int = 4) -> list[Check]:
    return [_check(f"grr_vs_split[n={n},{spec.label()}]", m_top_chern_grr(n, spec.rank, spec),
                   m_top_chern_split(n, spec))
            for n, spec in calabi_yau_split_specs(n_max, r_max)]


def verify_stirling(m_max: int = 12) -> list[Check]:
    return [_check(f"identity_sum[{m}]", identity_sum(m), Fraction(0)) for m in range(2, m_max + 1)]


def verify_isolated(r_max: int = 8) -> list[Check]:
    return [_check(f"isolated[{r},{s}]", count_with_isolated(r, s), stirling2(r - 1, s - 1))
            for r in range(3, r_max + 1) for s in range(2, r)]


def catalan(m: int) -> int:
    return factorial(2 * m) // (factorial(m) * factorial(m + 1))


def verify_schubert(n_max: int = 8) -> list[Check]:
    out = []
    for big_n in range(4, n_max + 1):
        g = GrassCtx(big_n)
        out.append(_check(f"catalan[N={big_n}]", g.integrate(g.power(g.sigma(1), 2 * (big_n - 2))),
                          Fraction(catalan(big_n - 2))))
    out.append(_check("lines_cubic_surface", fano(BundleSpec.split([3]), 4).degree, Fraction(27)))
    out.append(_check("lines_quintic_threefold", fano(BundleSpec.split([5]), 5).degree, Fraction(2875)))
    for n, spec in calabi_yau_split_specs(5, 3):
        if n >= 3:
            out.append(_check(f"fano_dim[n={n},{spec.label()}]",
                              fano(spec, n + spec.rank + 1).expected_dim, n - 3))
    return out


def block_pushforward(ctx: TautCtx, e: int) -> DiagClass:
    """Delta^{(r)}_*(h^e) on X^r, in normal form."""
    return DiagClass(ctx, {((0,) * ctx.r, (e,)): 1})


def times_monomial(x: DiagClass, mult: Sequence[int]) -> DiagClass:
    for i, m in enumerate(mult):
        if m:
            x = mul_h(x, i, m)
    return x


def verify_rewrite(n_max: int = 4, b_max: int = 4, degree: int = 5, seed: int | None = 0) -> list[Check]:
    """Integrals against every monomial survive the rewrite; the normal form is order independent."""
    out = []
    rng = random.Random(seed)
    for n in range(1, n_max + 1):
        for b in range(1, b_max + 1):
            ctx = TautCtx(n, degree, b)
            for e in range(n + 1):
                x = block_pushforward(ctx, e)
                conserved = all(
                    integrate(times_monomial(x, mult))
                    == (degree if e + sum(mult) == n else 0)
                    for mult in product(range(n + 1), repeat=b)
                )
                shuffled = normalize(ctx, {((0,) * b, (e,)): Fraction(1)}, rng=rng)
                out.append(Check(f"rewrite[n={n},b={b},e={e}]", conserved and shuffled == x.terms))
    return out
