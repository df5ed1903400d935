"""Polynomial differential forms and polyvector fields on R^m, truncated by
polynomial degree, and the operators that make the de Rham complex of a
Poisson or Jacobi structure a mixed complex or multicomplex.

Coordinates are 0-based internally.  A form monomial is (alpha, I): exponent
tuple and strictly increasing index tuple for x^alpha dx_I; a polyvector
monomial is (alpha, J) for x^alpha in the exterior algebra of coordinate
vector fields.  Form degree k is exported at homological degree -k, so the
de Rham differential has degree -1 and contraction by a bivector degree +2.

Truncation compresses everything onto the span of the monomials below a
cutoff; see FormAlgebra for the two cutoff semantics and when operator
identities survive the compression exactly.

Sign conventions are pinned by the contraction/bracket compatibility check
`check_contraction_identity` rather than trusted: with the frozen choices
(the factors of i(v_1 ^ ... ^ v_k) applied to the form in listed order, and
the odd-bracket convention below) the identity
i([P, Q]) = -[[i(Q), d], i(P)] holds on every tested pair, while composing
the factors the other way round breaks it.  Under the frozen choice
i(v_0 ^ v_1)(dx_0 ^ dx_1) = +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .complexes import Multicomplex, validate_multicomplex
from .errors import NotJacobi, NotPoisson, NotSquareZero, ShapeMismatch, WindowTooSmall
from .exactla import Matrix, kernel_image, rat, solve
from .gauge import OperatorSeries, check_gauge_hodge
from .graded import GradedMap, GradedVectorSpace, compose

# frozen application order of the single contractions inside
# i(v_1 ^ ... ^ v_k): the listed order, v_1 first; reversing it rescales
# each i by the sign of the order-reversing permutation and breaks the
# compatibility identity
CONTRACTION_REVERSED = False


def _merge_sign(left, right):
    """Sign of sorting the concatenation left + right, or 0 on overlap."""
    if set(left) & set(right):
        return 0, ()
    inversions = sum(1 for j in left for i in right if j > i)
    merged = tuple(sorted(left + right))
    return (-1) ** (inversions % 2), merged


def _iota_chain(indices, application_order):
    """Contract dx_I by the given coordinate directions, in the given order."""
    sign = 1
    cur = list(indices)
    for j in application_order:
        if j not in cur:
            return 0, ()
        pos = cur.index(j)
        sign *= (-1) ** pos
        cur.pop(pos)
    return sign, tuple(cur)


class PolyVector:
    """Polynomial-coefficient polyvector field, sparse on (alpha, J)."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms=None):
        self.dim = dim
        clean = {}
        items = terms.items() if isinstance(terms, dict) else (terms or [])
        for (alpha, J), c in items:
            alpha, J = tuple(alpha), tuple(J)
            c = rat(c)
            if len(alpha) != dim or any(e < 0 for e in alpha):
                raise ShapeMismatch("bad exponent vector %r" % (alpha,))
            if list(J) != sorted(set(J)) or any(not 0 <= j < dim for j in J):
                raise ShapeMismatch("indices must be strictly increasing in range")
            if c:
                key = (alpha, J)
                tot = clean.get(key, Fraction(0)) + c
                if tot:
                    clean[key] = tot
                elif key in clean:
                    del clean[key]
        self.terms = dict(sorted(clean.items()))

    @staticmethod
    def zero(dim: int) -> "PolyVector":
        return PolyVector(dim)

    @staticmethod
    def coordinate_field(dim: int, j: int) -> "PolyVector":
        return PolyVector(dim, {((0,) * dim, (j,)): 1})

    def __eq__(self, other):
        return (isinstance(other, PolyVector) and self.dim == other.dim
                and self.terms == other.terms)

    def __repr__(self):
        return "PolyVector(dim %d, %d terms)" % (self.dim, len(self.terms))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def vector_degrees(self):
        return sorted({len(J) for (_, J) in self.terms})

    def is_homogeneous(self, k: int) -> bool:
        return all(len(J) == k for (_, J) in self.terms)

    def coefficient_degree(self) -> int:
        return max((sum(a) for (a, _) in self.terms), default=0)

    def component(self, k: int) -> "PolyVector":
        return PolyVector(self.dim, {key: c for key, c in self.terms.items()
                                     if len(key[1]) == k})

    def add(self, other: "PolyVector") -> "PolyVector":
        out = dict(self.terms)
        for key, c in other.terms.items():
            tot = out.get(key, Fraction(0)) + c
            if tot:
                out[key] = tot
            elif key in out:
                del out[key]
        return PolyVector(self.dim, out)

    def scale(self, a) -> "PolyVector":
        a = rat(a)
        return PolyVector(self.dim, {k: a * c for k, c in self.terms.items()})

    def neg(self) -> "PolyVector":
        return self.scale(-1)

    def sub(self, other: "PolyVector") -> "PolyVector":
        return self.add(other.neg())

    def wedge(self, other: "PolyVector") -> "PolyVector":
        out = {}
        for (a1, J1), c1 in self.terms.items():
            for (a2, J2), c2 in other.terms.items():
                sign, J = _merge_sign(J1, J2)
                if not sign:
                    continue
                alpha = tuple(x + y for x, y in zip(a1, a2))
                key = (alpha, J)
                out[key] = out.get(key, Fraction(0)) + sign * c1 * c2
        return PolyVector(self.dim, out)


class PolyForm:
    """Polynomial-coefficient differential form truncated by polynomial
    degree; the wedge quotients by the ideal of overflowing monomials."""

    __slots__ = ("dim", "truncation", "terms")

    def __init__(self, dim: int, truncation: int, terms=None):
        self.dim = dim
        self.truncation = truncation
        clean = {}
        items = terms.items() if isinstance(terms, dict) else (terms or [])
        for (alpha, I), c in items:
            alpha, I = tuple(alpha), tuple(I)
            c = rat(c)
            if len(alpha) != dim or any(e < 0 for e in alpha):
                raise ShapeMismatch("bad exponent vector %r" % (alpha,))
            if sum(alpha) > truncation:
                raise ShapeMismatch("monomial beyond the truncation")
            if list(I) != sorted(set(I)) or any(not 0 <= i < dim for i in I):
                raise ShapeMismatch("indices must be strictly increasing in range")
            if c:
                key = (alpha, I)
                tot = clean.get(key, Fraction(0)) + c
                if tot:
                    clean[key] = tot
                elif key in clean:
                    del clean[key]
        self.terms = dict(sorted(clean.items()))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, PolyForm) and self.dim == other.dim
                and self.truncation == other.truncation and self.terms == other.terms)

    def __repr__(self):
        return "PolyForm(dim %d, %d terms)" % (self.dim, len(self.terms))

    def form_degrees(self):
        return sorted({len(I) for (_, I) in self.terms})

    def add(self, other: "PolyForm") -> "PolyForm":
        out = dict(self.terms)
        for key, c in other.terms.items():
            tot = out.get(key, Fraction(0)) + c
            if tot:
                out[key] = tot
            elif key in out:
                del out[key]
        return PolyForm(self.dim, self.truncation, out)

    def scale(self, a) -> "PolyForm":
        a = rat(a)
        return PolyForm(self.dim, self.truncation,
                        {k: a * c for k, c in self.terms.items()})

    def neg(self) -> "PolyForm":
        return self.scale(-1)

    def sub(self, other: "PolyForm") -> "PolyForm":
        return self.add(other.neg())

    def wedge(self, other: "PolyForm") -> "PolyForm":
        out = {}
        for (a1, I1), c1 in self.terms.items():
            for (a2, I2), c2 in other.terms.items():
                sign, I = _merge_sign(I1, I2)
                if not sign:
                    continue
                alpha = tuple(x + y for x, y in zip(a1, a2))
                if sum(alpha) > self.truncation:
                    continue
                key = (alpha, I)
                out[key] = out.get(key, Fraction(0)) + sign * c1 * c2
        return PolyForm(self.dim, self.truncation, out)


def _x_derivative(terms, dim, i):
    out = {}
    for (alpha, J), c in terms.items():
        if alpha[i]:
            beta = list(alpha)
            beta[i] -= 1
            key = (tuple(beta), J)
            out[key] = out.get(key, Fraction(0)) + c * alpha[i]
    return out


def _right_theta_derivative(terms, i):
    out = {}
    for (alpha, J), c in terms.items():
        if i not in J:
            continue
        pos = J.index(i)
        sign = (-1) ** (len(J) - 1 - pos)
        key = (alpha, tuple(j for j in J if j != i))
        out[key] = out.get(key, Fraction(0)) + sign * c
    return out


def _schouten_homogeneous(p: PolyVector, q: PolyVector, pdeg, qdeg) -> PolyVector:
    dim = p.dim
    acc = PolyVector.zero(dim)
    for i in range(dim):
        left = PolyVector(dim, _right_theta_derivative(p.terms, i))
        right = PolyVector(dim, _x_derivative(q.terms, dim, i))
        acc = acc.add(left.wedge(right))
        left2 = PolyVector(dim, _right_theta_derivative(q.terms, i))
        right2 = PolyVector(dim, _x_derivative(p.terms, dim, i))
        sign = (-1) ** ((pdeg - 1) * (qdeg - 1) % 2)
        acc = acc.sub(left2.wedge(right2).scale(sign))
    return acc


def schouten(p: PolyVector, q: PolyVector) -> PolyVector:
    """Schouten-Nijenhuis bracket, the odd bracket extending the Lie bracket
    of vector fields; bidegree |p| + |q| - 1 on homogeneous inputs."""
    if p.dim != q.dim:
        raise ShapeMismatch("polyvectors on different spaces")
    acc = PolyVector.zero(p.dim)
    for pdeg in p.vector_degrees():
        for qdeg in q.vector_degrees():
            acc = acc.add(_schouten_homogeneous(
                p.component(pdeg), q.component(qdeg), pdeg, qdeg))
    return acc


def verify_poisson(w: PolyVector) -> bool:
    """True iff [w, w] = 0 for the bivector w."""
    return schouten(w, w).is_zero


def jacobi_defects(w: PolyVector, e: PolyVector):
    """The two structure equations of a Jacobi pair, as exact defects."""
    first = schouten(w, w).sub(e.wedge(w).scale(2))
    second = schouten(e, w)
    return first, second


def verify_jacobi(w: PolyVector, e: PolyVector) -> bool:
    first, second = jacobi_defects(w, e)
    return first.is_zero and second.is_zero


class FormAlgebra:
    """Monomial basis of the truncated form algebra and operator builders.

    Two truncation semantics share one class.  The default keeps monomials
    with polynomial degree |alpha| <= truncation; compressing operators onto
    it is exact for the differential and for wedge but can lose
    raise-then-lower composites at the top degree.  With weight=True the
    cutoff reads |alpha| + |I| <= truncation, the degree of x^alpha dx_I
    under rescaling of the coordinates.  That ideal is stable under wedge,
    the differential, and contraction by fields of coefficient degree at
    most 2 (resp. 1 for vector fields), so on the weight quotient every
    operator identity holds verbatim; the Jacobi builders rely on this.
    """

    def __init__(self, dim: int, truncation: int, weight: bool = False):
        if dim < 0 or truncation < 0:
            raise ShapeMismatch("dimension and truncation must be nonnegative")
        self.dim = dim
        self.truncation = truncation
        self.weight = weight
        self.monomials = sorted(self._exponents(), key=lambda a: (sum(a), a))
        self.basis = {}
        self.position = {}
        for k in range(dim + 1):
            items = []
            for alpha in self.monomials:
                if weight and sum(alpha) + k > truncation:
                    continue
                for I in combinations(range(dim), k):
                    items.append((alpha, I))
            self.basis[k] = items
            self.position[k] = {key: pos for pos, key in enumerate(items)}
        self._space = GradedVectorSpace({-k: len(self.basis[k])
                                         for k in range(dim + 1)})

    def cutoff(self, form_degree: int) -> int:
        """Largest stored polynomial degree in the given form degree."""
        return self.truncation - form_degree if self.weight else self.truncation

    def _exponents(self):
        def rec(prefix, remaining, slots):
            if slots == 0:
                yield tuple(prefix)
                return
            for e in range(remaining + 1):
                yield from rec(prefix + [e], remaining - e, slots - 1)
        yield from rec([], self.truncation, self.dim)

    @property
    def space(self) -> GradedVectorSpace:
        return self._space

    def form_degree_dim(self, k: int) -> int:
        return len(self.basis.get(k, []))

    def operator(self, form_shift: int, action) -> GradedMap:
        """Assemble the graded map of an operator given termwise on basis
        monomials; action(k, alpha, I) yields ((beta, J), coeff) terms of
        form degree k + form_shift.  Terms beyond the truncation are dropped
        (the quotient ideal absorbs them)."""
        entries = []
        for k in range(self.dim + 1):
            k_out = k + form_shift
            if not 0 <= k_out <= self.dim:
                continue
            pos_out = self.position[k_out]
            for col, (alpha, I) in enumerate(self.basis[k]):
                for (beta, J), coeff in action(k, alpha, I):
                    if sum(beta) > self.cutoff(k_out):
                        continue
                    entries.append((-k, pos_out[(beta, J)], col, coeff))
        return GradedMap.from_entries(self._space, self._space,
                                      -form_shift, entries)

    def vector_of_form_terms(self, terms, k: int) -> Matrix:
        """Column vector of a form of pure degree k given as term dict."""
        col = Matrix(self.form_degree_dim(k), 1)
        for (alpha, I), c in terms.items():
            col.entries[(self.position[k][(alpha, I)], 0)] = rat(c)
        return col


def d_de_rham(a: FormAlgebra) -> GradedMap:
    """Exterior differential: d(x^alpha dx_I) = sum_i alpha_i x^(alpha - e_i)
    dx_i ^ dx_I; lowers polynomial degree, so it is exact on the quotient."""
    def action(k, alpha, I):
        for i in range(a.dim):
            if not alpha[i]:
                continue
            sign, J = _merge_sign((i,), I)
            if not sign:
                continue
            beta = list(alpha)
            beta[i] -= 1
            yield (tuple(beta), J), sign * alpha[i]
    return a.operator(1, action)


def wedge_multiplication(a: FormAlgebra, beta, J) -> GradedMap:
    """Left wedge multiplication by x^beta dx_J on the quotient."""
    beta, J = tuple(beta), tuple(J)
    def action(k, alpha, I):
        sign, merged = _merge_sign(J, I)
        if sign:
            gamma = tuple(x + y for x, y in zip(beta, alpha))
            yield (gamma, merged), sign
    return a.operator(len(J), action)


def contraction(a: FormAlgebra, p: PolyVector,
                reversed_order: bool = CONTRACTION_REVERSED) -> GradedMap:
    """Contraction by a homogeneous polyvector, extended linearly over the
    polynomial coefficients."""
    if p.dim != a.dim:
        raise ShapeMismatch("polyvector dimension differs from the algebra")
    degs = p.vector_degrees()
    if len(degs) > 1:
        raise ShapeMismatch("contraction needs a homogeneous polyvector")
    j = degs[0] if degs else 0
    def action(k, alpha, I):
        for (beta, J), c in p.terms.items():
            order = tuple(reversed(J)) if reversed_order else J
            sign, rest = _iota_chain(I, order)
            if not sign:
                continue
            gamma = tuple(x + y for x, y in zip(alpha, beta))
            yield (gamma, rest), sign * c
    return a.operator(-j, action)


def koszul_delta(a: FormAlgebra, w: PolyVector) -> GradedMap:
    """The square-lowering operator [i(w), d] of a bivector."""
    if not w.is_zero and not w.is_homogeneous(2):
        raise ShapeMismatch("the structure field must be a bivector")
    if w.is_zero:
        return GradedMap.zero(a.space, a.space, 1)
    iw = contraction(a, w)
    d = d_de_rham(a)
    return compose(iw, d).sub(compose(d, iw))


def check_contraction_identity(p: PolyVector, q: PolyVector, check_degree: int,
                               reversed_order: bool = CONTRACTION_REVERSED,
                               window: int | None = None) -> bool:
    """Compatibility of contraction, bracket, and differential:
    i([p, q]) = -[[i(q), d], i(p)] on all forms of polynomial degree
    <= check_degree, evaluated inside a window wide enough not to cut the
    outputs.  This single identity pins every sign convention here."""
    if p.dim != q.dim:
        raise ShapeMismatch("polyvectors on different spaces")
    needed = check_degree + p.coefficient_degree() + q.coefficient_degree()
    if window is None:
        window = needed
    if window < needed:
        raise WindowTooSmall("window %d below required %d" % (window, needed))
    a = FormAlgebra(p.dim, window)
    d = d_de_rham(a)
    ip = contraction(a, p, reversed_order)
    iq = contraction(a, q, reversed_order)
    pdeg = p.vector_degrees()[0] if p.vector_degrees() else 0
    qdeg = q.vector_degrees()[0] if q.vector_degrees() else 0
    bracket = schouten(p, q)
    if bracket.is_zero:
        ibr = GradedMap.zero(a.space, a.space, pdeg + qdeg - 1)
    else:
        ibr = contraction(a, bracket, reversed_order)
    # graded commutators with parities read off the operator degrees
    inner = _graded_commutator(iq, d, qdeg % 2, 1)
    outer = _graded_commutator(inner, ip, (qdeg + 1) % 2, pdeg % 2)
    defect = ibr.add(outer)
    if defect.is_zero:
        return True
    # restrict the verdict to the uncut columns when the window is exactly
    # the needed one the defect is already exact
    for k, block in defect.blocks.items():
        for (_, col) in block.entries:
            alpha, _ = a.basis[-k][col]
            if sum(alpha) <= check_degree:
                return False
    return True


def _graded_commutator(f: GradedMap, g: GradedMap, pf: int, pg: int) -> GradedMap:
    sign = -1 if (pf and pg) else 1
    return compose(f, g).sub(compose(g, f).scale(sign))


def graded_commutator(f: GradedMap, g: GradedMap) -> GradedMap:
    """Commutator with Koszul sign read from the map degrees."""
    return _graded_commutator(f, g, f.degree % 2, g.degree % 2)


def multiplication_generators(a: FormAlgebra):
    """Left multiplications by the algebra generators x_i and dx_i."""
    gens = []
    zero = (0,) * a.dim
    for i in range(a.dim):
        e_i = tuple(1 if t == i else 0 for t in range(a.dim))
        gens.append(wedge_multiplication(a, e_i, ()))
        gens.append(wedge_multiplication(a, zero, (i,)))
    return gens


def operator_order(a: FormAlgebra, p: GradedMap, bound: int,
                   probe_degree: int | None = None) -> bool:
    """Differential-operator order, recursively: order <= -1 means zero,
    order <= k means every graded commutator with a generator multiplication
    L_{x_i} or L_{dx_i} has order <= k - 1.  Checking generators suffices
    since multiplications by products expand by the Leibniz rule.

    With probe_degree set, the zero test at the bottom of the recursion only
    reads columns of polynomial degree <= probe_degree.  Operators of
    x-derivative order <= probe_degree vanish there iff they vanish on the
    whole polynomial algebra, so a wide enough ambient window (see
    `order_window`) certifies the order of the untruncated operator instead
    of an artifact of the cutoff.
    """
    gens = multiplication_generators(a)

    def zero_enough(q):
        if q.is_zero:
            return True
        if probe_degree is None:
            return False
        for k, block in q.blocks.items():
            for (_, c) in block.entries:
                alpha, _ = a.basis[-k][c]
                if sum(alpha) <= probe_degree:
                    return False
        return True

    def rec(q, k):
        if q.is_zero:
            return True
        if k < 0:
            return zero_enough(q)
        return all(rec(graded_commutator(q, g), k - 1) for g in gens)

    return rec(p, bound)


def order_window(probe_degree: int, bound: int, raise_margin: int) -> int:
    """Truncation making the order recursion exact on the probe columns:
    one degree per commutator level plus the operator's internal raising."""
    return probe_degree + bound + 1 + raise_margin


@dataclass
class OrderLadder:
    d_at_most_0: bool
    d_at_most_1: bool
    delta1_at_most_1: bool
    delta1_at_most_2: bool
    delta2_at_most_3: bool | None


def structure_order_ladder(w: PolyVector, e: PolyVector | None = None) -> OrderLadder:
    """Certified differential-operator orders of the structure operators on
    the full polynomial algebra: the exterior differential, the bivector's
    square-lowering operator, and (for a Jacobi pair) the weight-two
    contraction composite."""
    dim = w.dim
    c_w = w.coefficient_degree()

    def fresh(probe, bound, margin):
        return FormAlgebra(dim, order_window(probe, bound, margin))

    a_d = fresh(1, 1, 0)
    d = d_de_rham(a_d)
    d0 = operator_order(a_d, d, 0, probe_degree=1)
    d1 = operator_order(a_d, d, 1, probe_degree=1)

    a1 = fresh(1, 2, c_w)
    delta1 = koszul_delta(a1, w)
    l1 = operator_order(a1, delta1, 1, probe_degree=1)
    l2 = operator_order(a1, delta1, 2, probe_degree=1)

    l3 = None
    if e is not None:
        c_e = e.coefficient_degree()
        a2 = fresh(0, 3, c_w + c_e)
        delta2 = compose(contraction(a2, e), contraction(a2, w))
        l3 = operator_order(a2, delta2, 3, probe_degree=0)
    return OrderLadder(d_at_most_0=d0, d_at_most_1=d1,
                       delta1_at_most_1=l1, delta1_at_most_2=l2,
                       delta2_at_most_3=l3)


@dataclass
class GeometricComplex:
    multicomplex: Multicomplex
    gauge: OperatorSeries
    algebra: FormAlgebra


def poisson_mixed_complex(w: PolyVector, a: FormAlgebra) -> GeometricComplex:
    """Mixed complex (forms, d, [i(w), d]) of a Poisson bivector, plus the
    weight-one gauge series i(w) z; both defining identities are asserted."""
    if not verify_poisson(w):
        raise NotPoisson("the bivector does not bracket to zero with itself")
    d = d_de_rham(a)
    delta = koszul_delta(a, w)
    if not compose(delta, delta).is_zero:
        raise NotSquareZero("square of the induced operator is nonzero")
    m = Multicomplex(a.space, [d, delta])
    rep = validate_multicomplex(m)
    if not rep.ok:
        raise NotSquareZero(rep.describe())
    series = OperatorSeries(a.space, {1: contraction(a, w)})
    if not check_gauge_hodge(series, m).ok:
        raise NotSquareZero("contraction series fails to conjugate the differential")
    return GeometricComplex(multicomplex=m, gauge=series, algebra=a)


def jacobi_multicomplex(w: PolyVector, e: PolyVector, a: FormAlgebra) -> GeometricComplex:
    """Multicomplex (forms, d, [i(w), d], i(e) i(w)) of a Jacobi pair.

    All five convolution relations, the bracket identity
    [i(w), [i(w), d]] = 2 i(e) i(w), and the quadratic gauge identity are
    asserted exactly before returning.  For structure fields with nonzero
    coefficient degree use a weight-truncated algebra: the plain polynomial
    cutoff loses raise-then-lower composites at its top degree and the
    weight-two relation then genuinely fails there.
    """
    if not verify_jacobi(w, e):
        raise NotJacobi("the pair fails the structure equations")
    d = d_de_rham(a)
    delta1 = koszul_delta(a, w)
    iw = contraction(a, w) if not w.is_zero else GradedMap.zero(a.space, a.space, 2)
    ie = contraction(a, e)
    if e.is_zero or w.is_zero:
        delta2 = GradedMap.zero(a.space, a.space, 3)
    else:
        delta2 = compose(ie, iw)
    checks = {
        "d squared": compose(d, d),
        "anticommute": compose(d, delta1).add(compose(delta1, d)),
        "square defect": compose(delta1, delta1).add(compose(delta2, d)).add(compose(d, delta2)),
        "weight three": compose(delta1, delta2).add(compose(delta2, delta1)),
        "weight four": compose(delta2, delta2),
        "adjoint square": graded_commutator(iw, delta1).sub(delta2.scale(2)),
    }
    for name, defect in checks.items():
        if not defect.is_zero:
            raise NotJacobi("identity %r fails on the truncated algebra" % name)
    m = Multicomplex(a.space, [d, delta1, delta2])
    rep = validate_multicomplex(m)
    if not rep.ok:
        raise NotJacobi(rep.describe())
    series = OperatorSeries(a.space, {1: iw})
    if not check_gauge_hodge(series, m).ok:
        raise NotJacobi("contraction series fails the quadratic gauge identity")
    return GeometricComplex(multicomplex=m, gauge=series, algebra=a)


@dataclass
class BasicComplex:
    multicomplex: Multicomplex
    inclusions: dict          # exported degree -> column basis in the ambient
    ambient: FormAlgebra
    gauge: OperatorSeries


def _restrict(f: GradedMap, subspace_basis: dict, sub: GradedVectorSpace) -> GradedMap:
    blocks = {}
    for k in sub.degrees:
        src = subspace_basis[k]
        img = f.block(k).mul(src)
        if img.is_zero():
            continue
        tgt_dim = sub.dim(k + f.degree)
        if not tgt_dim:
            raise NotJacobi("operator does not preserve the basic subcomplex")
        coords = solve(subspace_basis[k + f.degree], img)
        if coords is None:
            raise NotJacobi("operator does not preserve the basic subcomplex")
        blocks[k] = coords
    return GradedMap(sub, sub, f.degree, blocks)


def basic_subcomplex(w: PolyVector, e: PolyVector, a: FormAlgebra) -> BasicComplex:
    """Mixed complex of basic forms: kernel of i(e) and of i(e) d, with the
    restricted differential and square-lowering operator."""
    if not verify_jacobi(w, e):
        raise NotJacobi("the pair fails the structure equations")
    d = d_de_rham(a)
    delta = koszul_delta(a, w)
    ie = contraction(a, e)
    ie_d = compose(ie, d)
    anti = compose(ie, delta).add(compose(delta, ie))
    if not anti.is_zero:
        raise NotJacobi("contraction by the structure field fails to anticommute")
    bases = {}
    dims = {}
    for k in a.space.degrees:
        stacked = ie.block(k).vstack(ie_d.block(k))
        ker, _ = kernel_image(stacked)
        bases[k] = ker.basis
        dims[k] = ker.dim
    sub = GradedVectorSpace(dims)
    basis = {k: bases[k] for k in sub.degrees}
    d_b = _restrict(d, basis, sub)
    delta_b = _restrict(delta, basis, sub)
    if not compose(delta_b, delta_b).is_zero:
        raise NotJacobi("restricted operator fails to square to zero")
    m = Multicomplex(sub, [d_b, delta_b])
    rep = validate_multicomplex(m)
    if not rep.ok:
        raise NotJacobi(rep.describe())
    iw_b = _restrict(contraction(a, w), basis, sub)
    series = OperatorSeries(sub, {1: iw_b})
    if not check_gauge_hodge(series, m).ok:
        raise NotJacobi("restricted contraction series fails the gauge identity")
    return BasicComplex(multicomplex=m, inclusions=basis, ambient=a, gauge=series)
