"""Finite Coxeter groups: root systems, enumeration, degrees, rank-2 census.

Roots are kept in simple-root coordinates with the normalization
(alpha, alpha) = 2 for every root, so the Gram matrix of the simple roots
has 2 on the diagonal and -2cos(pi/m_ij) off it, and every coordinate lies
in the single field QQ(2cos(pi/m*)) for the largest bond label m*.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from itertools import permutations

from .errors import BudgetError, FactorizationError
from .scalars import (FieldElement, KPoly, R0, R1, as_rational, cos_field,
                      rat)

DEFAULT_ENUMERATION_BUDGET = 20000
DEFAULT_ROOT_BUDGET = 600

#: groups whose expensive checks are opt-in
HEAVY_LABELS = frozenset({"F4", "H4"})

_LABEL_RE = re.compile(r"^([ABDEFH])(\d+)$|^I2\((\d+)\)$")


class CoxeterDiagram:
    """Rank, bond matrix m_ij and a canonical label."""

    __slots__ = ("rank", "bonds", "label")

    def __init__(self, bonds, label):
        n = len(bonds)
        for i in range(n):
            if bonds[i][i] != 1:
                raise ValueError("diagonal bond labels must be 1")
            for j in range(n):
                if bonds[i][j] != bonds[j][i]:
                    raise ValueError("bond matrix must be symmetric")
                if i != j and bonds[i][j] < 2:
                    raise ValueError("off-diagonal bond labels must be >= 2")
        self.rank = n
        self.bonds = tuple(tuple(row) for row in bonds)
        self.label = label

    def max_bond(self):
        m = 3
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                m = max(m, self.bonds[i][j])
        return m

    def __repr__(self):
        return f"CoxeterDiagram({self.label!r}, rank={self.rank})"


def _chain(n, special=None):
    bonds = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    for i in range(n - 1):
        bonds[i][i + 1] = bonds[i + 1][i] = 3
    if special:
        i, j, m = special
        bonds[i][j] = bonds[j][i] = m
    return bonds


def standard_diagram(label: str) -> CoxeterDiagram:
    """Diagram for a canonical type label: A1..An, Bn, Dn, E6-E8, F4, H3, H4, I2(m)."""
    m = _LABEL_RE.match(label.strip())
    if not m:
        raise ValueError(f"unknown Coxeter type label {label!r}")
    if m.group(3) is not None:
        order = int(m.group(3))
        if order < 2:
            raise ValueError("I2(m) needs m >= 2")
        return CoxeterDiagram([[1, order], [order, 1]], f"I2({order})")
    family, n = m.group(1), int(m.group(2))
    if family == "A" and n >= 1:
        return CoxeterDiagram(_chain(n), label)
    if family == "B" and 2 <= n <= 8:
        return CoxeterDiagram(_chain(n, (n - 2, n - 1, 4)), label)
    if family == "D" and 4 <= n <= 8:
        bonds = _chain(n)
        bonds[n - 2][n - 1] = bonds[n - 1][n - 2] = 2
        bonds[n - 3][n - 1] = bonds[n - 1][n - 3] = 3
        return CoxeterDiagram(bonds, label)
    if family == "E" and n in (6, 7, 8):
        bonds = _chain(n - 1)
        for row in bonds:
            row.append(2)
        bonds.append([2] * (n - 1) + [1])
        bonds[2][n - 1] = bonds[n - 1][2] = 3
        return CoxeterDiagram(bonds, label)
    if family == "F" and n == 4:
        return CoxeterDiagram(_chain(4, (1, 2, 4)), label)
    if family == "H" and n in (3, 4):
        return CoxeterDiagram(_chain(n, (0, 1, 5)), label)
    raise ValueError(f"unknown Coxeter type label {label!r}")


def known_label(label: str) -> bool:
    try:
        standard_diagram(label)
        return True
    except ValueError:
        return False


# ---------------------------------------------------------------------------
# root systems
# ---------------------------------------------------------------------------


class RootSystem:
    """Positive roots of a finite Coxeter group in simple-root coordinates."""

    def __init__(self, diagram, spec, gram, positive_roots):
        self.diagram = diagram
        self.spec = spec
        self.gram = gram                      # tuple of tuples of FieldElement
        self.positive_roots = positive_roots  # tuple of tuples of FieldElement
        self.simple_indices = tuple(range(diagram.rank))
        self._caches = {}

    @property
    def rank(self):
        return self.diagram.rank

    @property
    def num_positive(self):
        return len(self.positive_roots)

    @property
    def label(self):
        return self.diagram.label

    def inner(self, v, w):
        """Invariant inner product of two coordinate vectors."""
        acc = self.spec.zero()
        for i in range(self.rank):
            if not v[i]:
                continue
            row = self.gram[i]
            for j in range(self.rank):
                if w[j]:
                    acc = acc + v[i] * row[j] * w[j]
        return acc

    # -- cached derived data -------------------------------------------------

    def _cache(self, key, build):
        val = self._caches.get(key)
        if val is None:
            val = build()
            self._caches[key] = val
        return val

    def gram_raw(self):
        return self._cache("gram_raw", lambda: tuple(
            tuple(e.co for e in row) for row in self.gram))

    def roots_raw(self):
        return self._cache("roots_raw", lambda: tuple(
            tuple(e.co for e in root) for root in self.positive_roots))

    def pair_vectors(self):
        """For each positive root alpha, the vector ((alpha_i, alpha))_i = G c_alpha."""
        def build():
            sp = self.spec
            out = []
            graw = self.gram_raw()
            for c in self.roots_raw():
                vec = []
                for i in range(self.rank):
                    acc = sp.raw_zero()
                    for j in range(self.rank):
                        if any(c[j]):
                            acc = sp.raw_add(acc, sp.raw_mul(graw[i][j], c[j]))
                    vec.append(acc)
                out.append(tuple(vec))
            return tuple(out)
        return self._cache("pair_vectors", build)

    def root_gram(self):
        """Raw matrix of inner products (alpha, beta) over positive roots."""
        def build():
            sp = self.spec
            pv = self.pair_vectors()
            roots = self.roots_raw()
            n = len(roots)
            out = []
            for a in range(n):
                row = []
                for b in range(n):
                    acc = sp.raw_zero()
                    for i in range(self.rank):
                        if any(roots[a][i]):
                            acc = sp.raw_add(acc, sp.raw_mul(roots[a][i], pv[b][i]))
                    row.append(acc)
                out.append(tuple(row))
            return tuple(out)
        return self._cache("root_gram", build)

    def reflection_matrix(self, root_index):
        """Matrix of s_alpha on simple-root coordinates: v - (alpha, v) c_alpha."""
        key = ("refl", root_index)

        def build():
            sp = self.spec
            c = self.roots_raw()[root_index]
            pair = self.pair_vectors()[root_index]
            rows = []
            for a in range(self.rank):
                row = []
                for b in range(self.rank):
                    e = sp.raw_one() if a == b else sp.raw_zero()
                    e = sp.raw_sub(e, sp.raw_mul(c[a], pair[b]))
                    row.append(FieldElement(sp, e))
                rows.append(tuple(row))
            return tuple(rows)
        return self._cache(key, build)

    def simple_reflection_matrices(self):
        return self._cache("simple_refl", lambda: tuple(
            self.reflection_matrix(i) for i in range(self.rank)))

    # -- float data for the Monte Carlo sampler ------------------------------

    def float_data(self):
        """(A, C) with A the Cholesky factor of the Gram matrix and C the
        root coordinate matrix, both float64."""
        def build():
            import numpy as np
            g = np.array([[float(e) for e in row] for row in self.gram])
            a = np.linalg.cholesky(g)
            c = np.array([[float(e) for e in root] for root in self.positive_roots])
            return a, c
        return self._cache("float_data", build)

    def __repr__(self):
        return f"RootSystem({self.label}, |S|={self.num_positive})"


def build_root_system(diagram: CoxeterDiagram,
                      root_budget=DEFAULT_ROOT_BUDGET) -> RootSystem:
    """Close the simple roots under reflection, keeping positive representatives."""
    spec = cos_field(diagram.max_bond())
    c = spec.gen()
    r = diagram.rank

    def gram_entry(i, j):
        if i == j:
            return spec.from_rational(2)
        m = diagram.bonds[i][j]
        if m == 2:
            return spec.zero()
        if m == 3:
            return spec.from_rational(-1)
        if m == diagram.max_bond():
            return -c
        raise ValueError(
            f"bond label {m} not expressible in QQ(2cos(pi/{diagram.max_bond()}))")

    gram = tuple(tuple(gram_entry(i, j) for j in range(r)) for i in range(r))

    zero, one = spec.zero(), spec.one()
    simple = [tuple(one if j == i else zero for j in range(r)) for i in range(r)]
    seen = {tuple(e.co for e in v): idx for idx, v in enumerate(simple)}
    roots = list(simple)
    queue = list(range(r))
    qpos = 0
    while qpos < len(queue):
        v = roots[queue[qpos]]
        qpos += 1
        for i in range(r):
            t = zero
            for j in range(r):
                if v[j]:
                    t = t + gram[i][j] * v[j]
            w = list(v)
            w[i] = v[i] - t
            # decide positivity from the first nonzero coordinate
            sgn = 0
            for e in w:
                if e:
                    sgn = e.sign()
                    break
            if sgn <= 0:
                continue
            key = tuple(e.co for e in w)
            if key in seen:
                continue
            if len(roots) >= root_budget:
                raise BudgetError(
                    f"root closure for {diagram.label} exceeded budget {root_budget}"
                    " (non-finite diagram?)")
            seen[key] = len(roots)
            roots.append(tuple(w))
            queue.append(len(roots) - 1)

    rs = RootSystem(diagram, spec, gram, tuple(roots))
    two = spec.from_rational(2)
    for root in rs.positive_roots:
        if rs.inner(root, root) != two:
            raise ArithmeticError("root with norm != 2 (internal bug)")
    return rs


# ---------------------------------------------------------------------------
# group enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    """Orthogonal transformation in simple-root coordinates, with a reduced word."""

    matrix: tuple
    word: tuple

    @property
    def length(self):
        return len(self.word)

    def trace(self):
        t = self.matrix[0][0].spec.zero()
        for i in range(len(self.matrix)):
            t = t + self.matrix[i][i]
        return t


def _mat_mul(spec, a, b):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        arow = a[i]
        for j in range(n):
            acc = spec.raw_zero()
            for l in range(n):
                x = arow[l].co
                if any(x):
                    acc = spec.raw_add(acc, spec.raw_mul(x, b[l][j].co))
            row.append(FieldElement(spec, acc))
        out.append(tuple(row))
    return tuple(out)


def _identity_matrix(spec, n):
    return tuple(
        tuple(spec.one() if i == j else spec.zero() for j in range(n))
        for i in range(n))


def _matrix_key(m):
    return tuple(tuple(e.co for e in row) for row in m)


def enumerate_group(rs: RootSystem,
                    budget=DEFAULT_ENUMERATION_BUDGET) -> list:
    """All group elements by breadth-first search over reduced words.

    The result is ordered by (length, word) lexicographically; BFS guarantees
    every stored word is reduced.
    """
    spec = rs.spec
    gens = rs.simple_reflection_matrices()
    ident = GroupElement(_identity_matrix(spec, rs.rank), ())
    elements = [ident]
    seen = {_matrix_key(ident.matrix)}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for i in range(rs.rank):
                mat = _mat_mul(spec, g.matrix, gens[i])
                key = _matrix_key(mat)
                if key in seen:
                    continue
                if len(elements) >= budget:
                    raise BudgetError(
                        f"group enumeration for {rs.label} exceeded budget {budget}")
                seen.add(key)
                el = GroupElement(mat, g.word + (i,))
                elements.append(el)
                nxt.append(el)
        frontier = nxt
    return elements


def element_sends_negative(rs, element):
    """Number of positive roots mapped to negative roots (equals the length)."""
    count = 0
    for root in rs.positive_roots:
        img = []
        for a in range(rs.rank):
            acc = rs.spec.zero()
            for b in range(rs.rank):
                if root[b]:
                    acc = acc + element.matrix[a][b] * root[b]
            img.append(acc)
        for e in img:
            if e:
                if e.sign() < 0:
                    count += 1
                break
    return count


# ---------------------------------------------------------------------------
# length generating function and degrees
# ---------------------------------------------------------------------------


def poincare_polynomial(elements, spec) -> KPoly:
    """Sum of q^length over the group, as an exact polynomial in q."""
    hist = Counter(g.length for g in elements)
    top = max(hist)
    return KPoly.from_coeffs(spec, [hist.get(i, 0) for i in range(top + 1)])


@dataclass(frozen=True)
class DegreeData:
    degrees: tuple
    order: int
    num_reflections: int

    def __post_init__(self):
        prod = 1
        for d in self.degrees:
            prod *= d
        if prod != self.order:
            raise FactorizationError("degree product differs from group order")
        if sum(d - 1 for d in self.degrees) != self.num_reflections:
            raise FactorizationError("sum of (d_i - 1) differs from reflection count")


def compute_degrees(rs: RootSystem, poincare: KPoly) -> DegreeData:
    """Factor the length generating function as a product of q-integers.

    Trial division from the highest plausible degree downwards is exact and
    deterministic; both bookkeeping identities are validated on the result.
    """
    coeffs = []
    for i in range(poincare.degree + 1):
        fe = poincare.coeff(i)
        q = fe.rational()
        if q.denominator != 1:
            raise FactorizationError("non-integer Poincare coefficient")
        coeffs.append(int(q))
    order = sum(coeffs)
    degrees = []
    work = list(coeffs)
    while len(work) > 1:
        for d in range(len(work), 1, -1):
            qint = [1] * d
            try:
                quotient = _int_poly_div(work, qint)
            except ArithmeticError:
                continue
            degrees.append(d)
            work = quotient
            break
        else:
            raise FactorizationError(
                f"cannot factor {work} into q-integers (enumeration bug?)")
    if work != [1]:
        raise FactorizationError("residual factor after q-integer division")
    degrees.sort()
    return DegreeData(tuple(degrees), order, rs.num_positive)


def _int_poly_div(num, den):
    num = list(num)
    if len(num) < len(den):
        raise ArithmeticError("degree too small")
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, y in enumerate(den):
                num[i + j] -= c * y
    if any(num):
        raise ArithmeticError("inexact division")
    return q


# ---------------------------------------------------------------------------
# Chevalley rational-function identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChevalleyResult:
    equal: bool
    lhs: tuple   # (numerator, denominator) in lowest terms, monic denominator
    rhs: tuple


_PERMS = {n: [(p, _sign(p)) for p in permutations(range(n))] for n in ()}


def _sign(p):
    n = len(p)
    seen = [False] * n
    sgn = 1
    for i in range(n):
        if seen[i]:
            continue
        j, cyc = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            cyc += 1
        if cyc % 2 == 0:
            sgn = -sgn
    return sgn


def _perms_signed(n):
    out = _PERMS.get(n)
    if out is None:
        out = [(p, _sign(p)) for p in permutations(range(n))]
        _PERMS[n] = out
    return out


def _det_one_minus_q(spec, matrix):
    """det(I - q M) as a KPoly in q."""
    n = len(matrix)
    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            const = spec.raw_one() if i == j else spec.raw_zero()
            row.append(KPoly(spec, (const, spec.raw_neg(matrix[i][j].co))))
        entries.append(row)
    acc = KPoly.zero(spec)
    for p, sgn in _perms_signed(n):
        term = KPoly.one(spec)
        for i in range(n):
            term = term * entries[i][p[i]]
        acc = acc + (term if sgn > 0 else -term)
    return acc


def _reduce_fraction(num: KPoly, den: KPoly):
    from .scalars import kpoly_gcd
    g = kpoly_gcd(num, den)
    if g.degree > 0:
        num = num // g
        den = den // g
    lead = den.leading()
    inv = KPoly.const(den.spec, 1 / lead)
    return (num * inv, den * inv)


def chevalley_q_identity(rs: RootSystem, elements, dd: DegreeData) -> ChevalleyResult:
    """Exact identity between the invariant-degree product and the element sum.

    Both sides of
        (1-q)^r * sum_w det(1 - q w)^(-1)  ==  |W| * prod_i (1-q)/(1-q^{d_i})
    are returned in lowest terms over the field.
    """
    spec = rs.spec
    counts = Counter()
    polys = {}
    for g in elements:
        cp = _det_one_minus_q(spec, g.matrix)
        counts[cp.co] += 1
        polys[cp.co] = cp
    # group by characteristic polynomial: few distinct terms keeps the sum small
    num = KPoly.zero(spec)
    den = KPoly.one(spec)
    for key in sorted(counts, key=len):
        cp = polys[key]
        num = num * cp + KPoly.const(spec, counts[key]) * den
        den = den * cp
    one_minus_q = KPoly.from_coeffs(spec, [1, -1])
    lhs = _reduce_fraction(num * one_minus_q ** rs.rank, den)

    rhs_num = KPoly.const(spec, dd.order) * one_minus_q ** rs.rank
    rhs_den = KPoly.one(spec)
    for d in dd.degrees:
        rhs_den = rhs_den * KPoly.from_coeffs(spec, [1] + [0] * (d - 1) + [-1])
    rhs = _reduce_fraction(rhs_num, rhs_den)
    return ChevalleyResult(lhs[0] == rhs[0] and lhs[1] == rhs[1], lhs, rhs)


# ---------------------------------------------------------------------------
# rank-2 parabolic census and the psi identities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Rank2Parabolic:
    """Codimension-2 mirror intersection: a dihedral pointwise stabilizer."""

    flat_id: tuple        # sorted indices of the mirrors through the flat
    m: int                # number of such mirrors; the group is I2(m)
    member_roots: tuple


def rank2_parabolics(rs: RootSystem) -> list:
    """One entry per plane spanned by two positive roots.

    Every unordered pair of reflections lands in exactly one entry; the
    partition is verified by the pair count identity."""
    sp = rs.spec
    roots = rs.roots_raw()
    n = len(roots)
    r = rs.rank
    assigned = {}
    planes = []
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in assigned:
                continue
            # pivot rows (p, q) with invertible 2x2 minor of [c_i c_j]
            pivot = None
            for p in range(r):
                for q in range(p + 1, r):
                    det = sp.raw_sub(sp.raw_mul(roots[i][p], roots[j][q]),
                                     sp.raw_mul(roots[i][q], roots[j][p]))
                    if any(det):
                        pivot = (p, q, sp.raw_inv(det))
                        break
                if pivot:
                    break
            p, q, inv_det = pivot
            members = []
            for g in range(n):
                a = sp.raw_mul(sp.raw_sub(sp.raw_mul(roots[g][p], roots[j][q]),
                                          sp.raw_mul(roots[g][q], roots[j][p])),
                               inv_det)
                b = sp.raw_mul(sp.raw_sub(sp.raw_mul(roots[i][p], roots[g][q]),
                                          sp.raw_mul(roots[i][q], roots[g][p])),
                               inv_det)
                ok = True
                for t in range(r):
                    lhs = sp.raw_add(sp.raw_mul(a, roots[i][t]),
                                     sp.raw_mul(b, roots[j][t]))
                    if lhs != roots[g][t]:
                        ok = False
                        break
                if ok:
                    members.append(g)
            members = tuple(members)
            planes.append(Rank2Parabolic(members, len(members), members))
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    assigned[(members[a], members[b])] = len(planes) - 1
    total_pairs = sum(p.m * (p.m - 1) // 2 for p in planes)
    if total_pairs != n * (n - 1) // 2:
        raise ArithmeticError("mirror pairs do not partition into planes")
    return planes


def psi_invariant(dd: DegreeData) -> int:
    """3|S|^2 - sum(d_i^2 - 1)."""
    s = dd.num_reflections
    return 3 * s * s - sum(d * d - 1 for d in dd.degrees)


def double_reflection_rotations(rs: RootSystem) -> list:
    """Products of two distinct reflections, deduplicated by exact matrix.

    Returns (matrix, trace) pairs."""
    sp = rs.spec
    n = rs.num_positive
    mats = [rs.reflection_matrix(i) for i in range(n)]
    seen = {}
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            m = _mat_mul(sp, mats[a], mats[b])
            key = _matrix_key(m)
            if key not in seen:
                tr = sp.raw_zero()
                for i in range(rs.rank):
                    tr = sp.raw_add(tr, m[i][i].co)
                seen[key] = (m, FieldElement(sp, tr))
    return list(seen.values())


@dataclass(frozen=True)
class PsiReport:
    psi: int
    parabolic_sum: int
    parabolic_ok: bool
    trace_identity_ok: bool
    census: tuple   # sorted (m, count) pairs


def verify_psi_identities(rs: RootSystem, dd: DegreeData) -> PsiReport:
    """Additivity of psi over rank-2 parabolics, and the trace-sum form.

    Checks exactly that psi(W) equals both sum(2m^2 - 2) over the census and
    24 * sum over two-reflection rotations of 1/(r - trace)."""
    psi = psi_invariant(dd)
    planes = rank2_parabolics(rs)
    parabolic_sum = sum(2 * p.m * p.m - 2 for p in planes)
    sp = rs.spec
    acc = sp.zero()
    rr = sp.from_rational(rs.rank)
    for _, tr in double_reflection_rotations(rs):
        denom = rr - tr
        if denom.sign() <= 0:
            raise ArithmeticError("rotation with r - trace <= 0 (internal bug)")
        acc = acc + 1 / denom
    trace_ok = (24 * acc == sp.from_rational(psi))
    census = Counter(p.m for p in planes)
    return PsiReport(psi, parabolic_sum, parabolic_sum == psi, trace_ok,
                     tuple(sorted(census.items())))
