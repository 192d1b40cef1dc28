"""Dunkl operators, the contravariant and Gaussian bilinear forms, and the
norm of the discriminant as an exact polynomial in the deformation parameter.

The operator attached to a direction a is

    T_a f = d_a f + k * sum over positive roots alpha of
            (alpha, a) * (f - s_alpha f) / (alpha, x),

acting on polynomials in the coordinates u_i = (alpha_i, x).  Directions are
stored in the basis {omega_i} dual to the simple roots, so d_{omega_i} is the
plain partial derivative in u_i.  The divided differences are computed by a
division-free twisted-Leibniz recursion over monomials, memoized per root;
the synthetic-division route in `polynomials` stays as an independent check.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass

from .errors import BudgetError
from .polynomials import (EXP_BITS, EXP_MASK, MultiPoly, _acc, _normalize,
                          apply_reflection, build_discriminant)
from .scalars import FieldElement, KPoly, as_rational, rat


# ---------------------------------------------------------------------------
# directions
# ---------------------------------------------------------------------------


class DunklDirection:
    """A direction in the reflection representation, in dual-basis coordinates.

    `dual[i]` is the coefficient of omega_i; `pairings[a]` caches (alpha, a)
    for every positive root alpha."""

    __slots__ = ("ring", "dual", "pairings")

    def __init__(self, ring, dual_raw):
        self.ring = ring
        self.dual = tuple(dual_raw)
        sp = ring.spec
        roots = ring.roots_raw()
        pairings = []
        for c in roots:
            acc = sp.raw_zero()
            for i, a in enumerate(self.dual):
                if any(a) and any(c[i]):
                    acc = sp.raw_add(acc, sp.raw_mul(a, c[i]))
            pairings.append(acc)
        self.pairings = tuple(pairings)

    @classmethod
    def omega(cls, ring, i):
        """The dual basis vector omega_i (so the derivative part is d/du_i)."""
        sp = ring.spec
        dual = [sp.raw_zero()] * ring.rank
        dual[i] = sp.raw_one()
        return cls(ring, dual)

    @classmethod
    def from_root(cls, ring, root_index):
        """The positive root alpha as a direction: dual coordinates (alpha_i, alpha)."""
        return cls(ring, ring.pair_vectors()[root_index])

    @classmethod
    def from_dual_coords(cls, ring, coords):
        sp = ring.spec
        dual = [c.co if isinstance(c, FieldElement) else sp.raw_from_rational(c)
                for c in coords]
        return cls(ring, dual)


def _omega_directions(rs):
    return rs._cache("omega_dirs", lambda: tuple(
        DunklDirection.omega(rs, i) for i in range(rs.rank)))


def _root_directions(rs):
    return rs._cache("root_dirs", lambda: tuple(
        DunklDirection.from_root(rs, i) for i in range(rs.num_positive)))


# ---------------------------------------------------------------------------
# divided-difference kernel
# ---------------------------------------------------------------------------


def _dd_memo(rs, root_index):
    key = ("dd", root_index)
    memo = rs._caches.get(key)
    if memo is None:
        memo = {0: ()}
        rs._caches[key] = memo
    return memo


def _dd_monomial(rs, root_index, key, memo, pair, sform):
    """(u^E - s_alpha u^E) / (alpha, x) as ((packed, raw), ...).

    Twisted Leibniz on u^E = u_i * u^(E - e_i):
        dd(u^E) = (alpha_i, alpha) u^(E-e_i) + s_alpha(u_i) * dd(u^(E-e_i)).
    """
    got = memo.get(key)
    if got is not None:
        return got
    sp = rs.spec
    stack = [key]
    while stack:
        cur = stack[-1]
        if cur in memo:
            stack.pop()
            continue
        i = 0
        while not (cur >> (EXP_BITS * i)) & EXP_MASK:
            i += 1
        prev_key = cur - (1 << (EXP_BITS * i))
        prev = memo.get(prev_key)
        if prev is None:
            stack.append(prev_key)
            continue
        stack.pop()
        dst = {}
        pi = pair[i]
        if any(pi):
            dst[prev_key] = pi
        for fkey, fco in prev:
            for step, cf in sform[i]:
                p = sp.raw_mul(fco, cf)
                k2 = fkey + step
                slot = dst.get(k2)
                dst[k2] = p if slot is None else sp.raw_add(slot, p)
        memo[cur] = tuple(sorted(
            (k2, v) for k2, v in dst.items() if not sp.raw_is_zero(v)))
    return memo[key]


def _dd_context(rs, root_index):
    """(memo, pair vector, reflected-variable linear forms) for one root."""
    key = ("ddctx", root_index)
    ctx = rs._caches.get(key)
    if ctx is None:
        sp = rs.spec
        pair = rs.pair_vectors()[root_index]
        croot = rs.roots_raw()[root_index]
        sform = []
        for i in range(rs.rank):
            form = []
            for l in range(rs.rank):
                cf = sp.raw_neg(sp.raw_mul(pair[i], croot[l]))
                if l == i:
                    cf = sp.raw_add(cf, sp.raw_one())
                if not sp.raw_is_zero(cf):
                    form.append((1 << (EXP_BITS * l), cf))
            sform.append(tuple(form))
        ctx = (_dd_memo(rs, root_index), pair, tuple(sform))
        rs._caches[key] = ctx
    return ctx


def clear_dunkl_caches(rs):
    """Drop divided-difference memo tables (used after large computations)."""
    for key in [k for k in rs._caches if isinstance(k, tuple) and k[0] in ("dd", "ddctx")]:
        rs._caches.pop(key, None)


def _apply_direction(rs, direction, terms):
    """Raw Dunkl application on a packed term dict; k-degree rises by <= 1."""
    sp = rs.spec
    out = {}
    # derivative part
    for i, a in enumerate(direction.dual):
        if not any(a):
            continue
        step = 1 << (EXP_BITS * i)
        for key, kco in terms.items():
            e = (key >> (EXP_BITS * i)) & EXP_MASK
            if not e:
                continue
            w = sp.raw_scale(a, as_rational(e))
            _acc(sp, out, key - step, [sp.raw_mul(c, w) for c in kco])
    # reflection part, shifted by one power of k
    for alpha, w in enumerate(direction.pairings):
        if not any(w):
            continue
        memo, pair, sform = _dd_context(rs, alpha)
        for key, kco in terms.items():
            if not key:
                continue
            table = _dd_monomial(rs, alpha, key, memo, pair, sform)
            if not table:
                continue
            scaled = [sp.raw_mul(c, w) for c in kco]
            for k2, tv in table:
                _acc(sp, out, k2, [sp.raw_mul(c, tv) for c in scaled], shift=1)
    return _normalize(sp, out)


def dunkl_apply(direction: DunklDirection, f: MultiPoly) -> MultiPoly:
    """Apply the Dunkl operator for the given direction."""
    if direction.ring is not f.ring:
        raise ValueError("direction and polynomial from different rings")
    return MultiPoly(f.ring, _apply_direction(f.ring, direction, f.terms))


def dunkl_apply_omega(rs, i, f: MultiPoly) -> MultiPoly:
    return dunkl_apply(_omega_directions(rs)[i], f)


def dunkl_apply_root(rs, root_index, f: MultiPoly) -> MultiPoly:
    return dunkl_apply(_root_directions(rs)[root_index], f)


# ---------------------------------------------------------------------------
# bilinear forms
# ---------------------------------------------------------------------------


def beta_form(f: MultiPoly, g: MultiPoly) -> KPoly:
    """The contravariant pairing: substitute the Dunkl operator y_{alpha_j}
    for each multiplication variable u_j in f, apply to g, evaluate at 0.

    Normalized so that pairing(1, 1) = 1; homogeneous polynomials of
    different degrees pair to zero."""
    f._check_ring(g)
    rs = f.ring
    sp = rs.spec
    y_dirs = [_root_directions(rs)[i] for i in range(rs.rank)]
    nodes = {0: g.terms}

    def node(key):
        got = nodes.get(key)
        if got is not None:
            return got
        i = 0
        while not (key >> (EXP_BITS * i)) & EXP_MASK:
            i += 1
        prev = node(key - (1 << (EXP_BITS * i)))
        res = _apply_direction(rs, y_dirs[i], prev)
        nodes[key] = res
        return res

    total = KPoly.zero(sp)
    for key, kco in sorted(f.terms.items()):
        const = node(key).get(0)
        if not const:
            continue
        total = total + KPoly(sp, kco) * KPoly(sp, const)
    return total


def dunkl_laplacian(f: MultiPoly) -> MultiPoly:
    """Sum of squared Dunkl operators over any orthonormal frame.

    Computed basis-independently as sum_j T_{omega_j} (y_{alpha_j} f)."""
    rs = f.ring
    sp = rs.spec
    omega = _omega_directions(rs)
    ydirs = _root_directions(rs)
    out = {}
    for j in range(rs.rank):
        h = _apply_direction(rs, ydirs[j], f.terms)
        h = _apply_direction(rs, omega[j], h)
        for key, kco in h.items():
            _acc(sp, out, key, kco)
    return MultiPoly(rs, _normalize(sp, out))


def gaussian_exponential(f: MultiPoly) -> MultiPoly:
    """exp of half the Dunkl Laplacian applied to f (a finite sum: the
    Laplacian lowers degree by exactly two)."""
    total = f
    term = f
    n = 0
    while not term.is_zero():
        n += 1
        term = dunkl_laplacian(term).scale(rat(1, 2 * n))
        total = total + term
    return total


def gamma_form(f: MultiPoly, g: MultiPoly) -> KPoly:
    """The Gaussian pairing: the contravariant pairing twisted by exp of half
    the Dunkl Laplacian on both arguments."""
    return beta_form(gaussian_exponential(f), gaussian_exponential(g))


# ---------------------------------------------------------------------------
# norm of the discriminant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BFactorization:
    """Leading constant and the positive rationals k_i with
    b(k) = b0 * prod (k + k_i)^{n_i}."""

    b0: FieldElement
    roots: tuple  # sorted ((mpq, multiplicity), ...)

    def expand(self, spec) -> KPoly:
        out = KPoly.const(spec, self.b0)
        for root, mult in self.roots:
            out = out * KPoly.from_coeffs(spec, [root, 1]) ** mult
        return out

    def to_string(self):
        parts = [str(self.b0)]
        for root, mult in self.roots:
            s = f"(k+{root})"
            if mult > 1:
                s += f"^{mult}"
            parts.append(s)
        return "*".join(parts)


@dataclass(frozen=True)
class BPolyResult:
    computed: KPoly
    closed_form: KPoly
    factorization: BFactorization    # None when the root pattern fails
    roots_exact: bool

    @property
    def equal(self):
        return self.computed == self.closed_form


def closed_form_b(spec, dd) -> KPoly:
    """|W| * prod_i prod_{m=1}^{d_i - 1} (k d_i + m)."""
    out = KPoly.const(spec, dd.order)
    for d in dd.degrees:
        for m in range(1, d):
            out = out * KPoly.from_coeffs(spec, [m, d])
    return out


def closed_form_b_string(dd) -> str:
    parts = [str(dd.order)]
    for d in dd.degrees:
        for m in range(1, d):
            parts.append(f"({d}k+{m})")
    return "*".join(parts)


def b_poly(rs, dd, allow_heavy=False) -> BPolyResult:
    """The pairing of the discriminant with itself, three ways.

    `computed` applies the product of the root Dunkl operators to the
    discriminant and reads off the constant term (the discriminant is the
    product of the root linear forms, so this is its image under the
    x -> y substitution).  `closed_form` is the degree product formula, and
    the factorization certifies that the rational roots are exactly -m/d_i."""
    if not allow_heavy and (rs.num_positive > 15 or rs.rank > 4):
        raise BudgetError(
            f"b_poly for {rs.label} (|S|={rs.num_positive}) needs allow_heavy=True")
    sp = rs.spec
    delta = build_discriminant(rs)
    terms = delta.terms
    for idx in range(rs.num_positive):
        terms = _apply_direction(rs, _root_directions(rs)[idx], terms)
    if set(terms) - {0}:
        raise ArithmeticError("discriminant pairing left positive-degree terms")
    computed = KPoly(sp, terms.get(0, ()))
    if rs.rank >= 4:
        clear_dunkl_caches(rs)

    closed = closed_form_b(sp, dd)

    fac = computed
    roots = Counter()
    exact = True
    for d in dd.degrees:
        for m in range(1, d):
            divisor = KPoly.from_coeffs(sp, [rat(m, d), 1])
            q, r = fac.divmod(divisor)
            if not r.is_zero():
                exact = False
                break
            fac = q
            roots[rat(m, d)] += 1
        if not exact:
            break
    factorization = None
    if exact and fac.degree == 0:
        b0 = fac.coeff(0)
        factorization = BFactorization(b0, tuple(sorted(roots.items())))
        if factorization.expand(sp) != computed:  # pragma: no cover
            raise ArithmeticError("factorization does not expand to b")
        if b0.sign() <= 0:  # pragma: no cover
            raise ArithmeticError("leading coefficient of b not positive")
    else:
        exact = False
    return BPolyResult(computed, closed, factorization, exact)


# ---------------------------------------------------------------------------
# defining-relation checks
# ---------------------------------------------------------------------------


@dataclass
class AlgebraReport:
    trials: int
    checks: int
    failures: list

    @property
    def ok(self):
        return not self.failures


def random_poly(rs, max_degree, rng, homogeneous=True, terms=4):
    """Random small-integer polynomial for property checks (deterministic rng)."""
    r = rs.rank
    deg = rng.randint(1, max_degree)
    mapping = {}
    for _ in range(terms):
        cuts = sorted(rng.randint(0, deg) for _ in range(r - 1)) if r > 1 else []
        exps = []
        prev = 0
        for c in cuts:
            exps.append(c - prev)
            prev = c
        exps.append(deg - prev)
        coeff = rng.choice([-3, -2, -1, 1, 2, 3])
        exps = tuple(exps)
        mapping[exps] = mapping.get(exps, 0) + coeff
        if not homogeneous and rng.random() < 0.3:
            deg = rng.randint(1, max_degree)
    return MultiPoly.from_terms(rs, {e: c for e, c in mapping.items() if c})


def verify_algebra_relations(rs, degree_cap=4, trials=25, seed=0) -> AlgebraReport:
    """Exact checks, coefficientwise in k, on random polynomials:

    (a) the Dunkl operators commute;
    (b) the commutator [T_a, x_b] equals (a,b) + k sum (alpha,a)(alpha,b) s_alpha;
    (c) the deformed Euler identity
        sum_j u_j T_{omega_j} f = deg(f) f + k sum_alpha (f - s_alpha f).
    """
    rng = random.Random(seed)
    sp = rs.spec
    r = rs.rank
    roots = rs.roots_raw()
    pair_vecs = rs.pair_vectors()
    failures = []
    checks = 0
    for t in range(trials):
        f = random_poly(rs, degree_cap, rng)
        # (a) commutativity on dual-basis pairs
        for i in range(r):
            ti = dunkl_apply_omega(rs, i, f)
            for j in range(i + 1, r):
                tj = dunkl_apply_omega(rs, j, f)
                checks += 1
                if dunkl_apply_omega(rs, j, ti) != dunkl_apply_omega(rs, i, tj):
                    failures.append(f"commutator trial {t} pair ({i},{j})")
        # (b) deformed Heisenberg with a = omega_i, b = alpha_j
        refl_images = [apply_reflection(f, a) for a in range(rs.num_positive)]
        for i in range(r):
            tf = dunkl_apply_omega(rs, i, f)
            for j in range(r):
                uj_f = MultiPoly.variable(rs, j) * f
                lhs = dunkl_apply_omega(rs, i, uj_f) - MultiPoly.variable(rs, j) * tf
                rhs = f if i == j else MultiPoly.zero(rs)
                acc = MultiPoly.zero(rs)
                for a in range(rs.num_positive):
                    w = sp.raw_mul(roots[a][i], pair_vecs[a][j])
                    if not any(w):
                        continue
                    acc = acc + refl_images[a].scale(FieldElement(sp, w))
                rhs = rhs + acc.k_shift(1)
                checks += 1
                if lhs != rhs:
                    failures.append(f"heisenberg trial {t} pair ({i},{j})")
        # (c) deformed Euler identity on the homogeneous f
        deg = f.degree()
        lhs = MultiPoly.zero(rs)
        for j in range(r):
            lhs = lhs + MultiPoly.variable(rs, j) * dunkl_apply_omega(rs, j, f)
        anti = MultiPoly.zero(rs)
        for a in range(rs.num_positive):
            anti = anti + (f - refl_images[a])
        rhs = f.scale(deg) + anti.k_shift(1)
        checks += 1
        if lhs != rhs:
            failures.append(f"euler trial {t}")
    return AlgebraReport(trials, checks, failures)
