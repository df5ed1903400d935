"""Truncated operator power series and the gauge condition.

Series live in End(A)[[z]] with graded-map coefficients.  On a space of
finite grading width every coefficient degree grows linearly with the power,
so all series here are exactly truncated: beyond the cap every coefficient is
degree-forced to zero, and exp/log are finite sums, not approximations.

The gauge condition for a multicomplex (A, d, delta_1, delta_2, ...) asks for
a series R(z) with zero constant term conjugating d onto the full family:
exp(R) d exp(-R) = d + delta_1 z + delta_2 z^2 + ...  Existence is detected
constructively through the minimal model; the witness of failure is the least
weight whose transferred operator refuses to vanish.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .complexes import (
    InfinityMorphism,
    Multicomplex,
    compose_infinity,
    validate_multicomplex,
)
from .errors import BadConstantTerm, NotSquareZero, SpaceMismatch
from .graded import GradedMap, GradedVectorSpace, compose, lincomb
from .transfer import check_hodge_data, minimal_model


def power_cap(space: GradedVectorSpace) -> int:
    """Every coefficient of power n > cap is zero for both parity families
    (degree 2n and degree 2n - 1 maps die once they overshoot the width)."""
    if space.is_zero:
        return 0
    return space.width // 2 + 1


class OperatorSeries:
    """Finitely many graded-map coefficients indexed by the power of z."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: GradedVectorSpace, coeffs=None):
        self.space = space
        clean = {}
        for n, f in (coeffs or {}).items():
            if f.source != space or f.target != space:
                raise SpaceMismatch("coefficient %d is not an endomorphism of the space" % n)
            if n < 0:
                raise BadConstantTerm("negative power %d" % n)
            if not f.is_zero and n <= power_cap(space):
                clean[int(n)] = f
        self.coeffs = dict(sorted(clean.items()))

    @staticmethod
    def zero(space) -> "OperatorSeries":
        return OperatorSeries(space)

    @staticmethod
    def unit(space) -> "OperatorSeries":
        return OperatorSeries(space, {0: GradedMap.identity(space)})

    @staticmethod
    def single(power: int, f: GradedMap) -> "OperatorSeries":
        return OperatorSeries(f.source, {power: f})

    @staticmethod
    def from_constant(f: GradedMap) -> "OperatorSeries":
        return OperatorSeries(f.source, {0: f})

    def coefficient(self, n: int, degree=None) -> GradedMap:
        f = self.coeffs.get(n)
        if f is not None:
            return f
        return GradedMap.zero(self.space, self.space, 0 if degree is None else degree)

    @property
    def max_power(self) -> int:
        return max(self.coeffs, default=-1)

    @property
    def constant_term(self) -> GradedMap:
        return self.coefficient(0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (isinstance(other, OperatorSeries) and self.space == other.space
                and self.coeffs == other.coeffs)

    def __repr__(self):
        return "OperatorSeries(powers %r)" % (list(self.coeffs),)

    def add(self, other: "OperatorSeries") -> "OperatorSeries":
        if self.space != other.space:
            raise SpaceMismatch("series on different spaces")
        out = {}
        for n in set(self.coeffs) | set(other.coeffs):
            a, b = self.coeffs.get(n), other.coeffs.get(n)
            out[n] = a if b is None else (b if a is None else a.add(b))
        return OperatorSeries(self.space, out)

    def scale(self, a) -> "OperatorSeries":
        return OperatorSeries(self.space, {n: f.scale(a) for n, f in self.coeffs.items()})

    def neg(self) -> "OperatorSeries":
        return self.scale(-1)

    def sub(self, other: "OperatorSeries") -> "OperatorSeries":
        return self.add(other.neg())

    def shift(self, by: int) -> "OperatorSeries":
        return OperatorSeries(self.space, {n + by: f for n, f in self.coeffs.items()})


def series_mul(a: OperatorSeries, b: OperatorSeries) -> OperatorSeries:
    """Cauchy product; coefficients compose as operators (a after b)."""
    if a.space != b.space:
        raise SpaceMismatch("series on different spaces")
    cap = power_cap(a.space)
    out = {}
    for n, fa in a.coeffs.items():
        for m, fb in b.coeffs.items():
            if n + m > cap:
                continue
            term = compose(fa, fb)
            if term.is_zero:
                continue
            cur = out.get(n + m)
            out[n + m] = term if cur is None else cur.add(term)
    return OperatorSeries(a.space, out)


def series_exp(r: OperatorSeries) -> OperatorSeries:
    """exp of a series with zero constant term (a finite sum by nilpotency)."""
    if 0 in r.coeffs:
        raise BadConstantTerm("exp needs a zero constant term")
    cap = power_cap(r.space)
    acc = OperatorSeries.unit(r.space)
    term = OperatorSeries.unit(r.space)
    fact = 1
    for k in range(1, cap + 1):
        term = series_mul(term, r)
        if term.is_zero:
            break
        fact *= k
        acc = acc.add(term.scale(Fraction(1, fact)))
    return acc


def series_log(u: OperatorSeries) -> OperatorSeries:
    """log of a series with constant term the identity."""
    if u.constant_term != GradedMap.identity(u.space):
        raise BadConstantTerm("log needs constant term equal to the identity")
    v = u.sub(OperatorSeries.unit(u.space))
    cap = power_cap(u.space)
    acc = OperatorSeries.zero(u.space)
    term = OperatorSeries.unit(u.space)
    for k in range(1, cap + 1):
        term = series_mul(term, v)
        if term.is_zero:
            break
        acc = acc.add(term.scale(Fraction((-1) ** (k + 1), k)))
    return acc


def commutator_series(a: OperatorSeries, b: OperatorSeries) -> OperatorSeries:
    return series_mul(a, b).sub(series_mul(b, a))


def conjugate_series(r: OperatorSeries, d_series: OperatorSeries) -> OperatorSeries:
    """exp(r) d exp(-r), computed as the exponential of ad_r and cross-checked
    against the literal triple product; the two must agree exactly."""
    if 0 in r.coeffs:
        raise BadConstantTerm("gauge series needs a zero constant term")
    cap = power_cap(r.space)
    acc = d_series
    term = d_series
    fact = 1
    for k in range(1, cap + 1):
        term = commutator_series(r, term)
        if term.is_zero:
            break
        fact *= k
        acc = acc.add(term.scale(Fraction(1, fact)))
    direct = series_mul(series_exp(r), series_mul(d_series, series_exp(r.neg())))
    if direct != acc:
        raise NotSquareZero("adjoint exponential disagrees with the triple product")
    return acc


def conjugate_differential(r: OperatorSeries, d: GradedMap) -> OperatorSeries:
    return conjugate_series(r, OperatorSeries.from_constant(d))


def deltas_as_series(m: Multicomplex) -> OperatorSeries:
    return OperatorSeries(m.space, {n: m.delta(n) for n in range(m.order + 1)
                                    if not m.delta(n).is_zero})


@dataclass
class GaugeCheck:
    ok: bool
    witness: object  # first differing power, or None

    def __bool__(self):
        return self.ok


def check_gauge_hodge(r: OperatorSeries, m: Multicomplex) -> GaugeCheck:
    """Does exp(r) d exp(-r) reproduce the operator family coefficientwise?"""
    if r.space != m.space:
        raise SpaceMismatch("series and multicomplex live on different spaces")
    conj = conjugate_differential(r, m.delta(0))
    top = max(conj.max_power, m.order, 0)
    for n in range(top + 1):
        if conj.coefficient(n, 2 * n - 1) != m.delta(n):
            return GaugeCheck(ok=False, witness=n)
    return GaugeCheck(ok=True, witness=None)


def gauge_construct(d: GradedMap, r: OperatorSeries) -> Multicomplex:
    """Multicomplex whose operators are the coefficients of exp(r) d exp(-r).

    Conjugation preserves the square of the full series, so the result always
    satisfies the multicomplex relations; this is asserted on the way out.
    """
    if not compose(d, d).is_zero:
        raise NotSquareZero("d squared is nonzero")
    conj = conjugate_differential(r, d)
    deltas = [conj.coefficient(n, 2 * n - 1) for n in range(max(conj.max_power, 0) + 1)]
    m = Multicomplex(d.source, deltas)
    rep = validate_multicomplex(m)
    if not rep.ok:
        raise NotSquareZero("conjugated family fails the relations: " + rep.describe())
    return m


def conjugate_multicomplex(r: OperatorSeries, m: Multicomplex) -> Multicomplex:
    """Gauge transform of a whole multicomplex: coefficients of
    exp(r) D(z) exp(-r) where D(z) collects the operator family."""
    conj = conjugate_series(r, deltas_as_series(m))
    deltas = [conj.coefficient(n, 2 * n - 1) for n in range(max(conj.max_power, 0) + 1)]
    return Multicomplex(m.space, deltas)


def isotopy_to_series(f: InfinityMorphism) -> OperatorSeries:
    """An infinity-isotopy of complexes on one space, viewed as the series
    sum f_n z^n with f_0 = id."""
    if f.source.space != f.target.space:
        raise SpaceMismatch("only endomorphism isotopies convert to series")
    if not f.is_isotopy:
        raise BadConstantTerm("component 0 must be the identity")
    return OperatorSeries(f.source.space,
                          {n: f.comp(n) for n in range(f.order + 1)})


def series_to_isotopy(s: OperatorSeries, source: Multicomplex,
                      target: Multicomplex) -> InfinityMorphism:
    if s.constant_term != GradedMap.identity(s.space):
        raise BadConstantTerm("component 0 must be the identity")
    comps = [s.coefficient(n, 2 * n) for n in range(max(s.max_power, 0) + 1)]
    return InfinityMorphism(source, target, comps)


@dataclass
class NoGauge:
    """Returned when no gauge series exists; the witness is the least weight
    whose transferred operator on homology is nonzero."""
    witness: int

    def __bool__(self):
        return False


def find_gauge(m: Multicomplex):
    """A gauge series for m, or NoGauge.

    When every transferred operator on homology vanishes, the inverse of the
    minimal-model isomorphism composed with the splitting chain map is an
    infinity-isotopy from (A, d) with trivial higher structure to m; its
    logarithm is a gauge.  Otherwise no gauge can exist, and the least
    obstructing weight is cited.
    """
    model = minimal_model(m)
    for n in range(1, model.minimal.order + 1):
        if not model.minimal.delta(n).is_zero:
            return NoGauge(witness=n)
    bare = Multicomplex.trivial(m.space, m.delta(0))
    to_product = InfinityMorphism.strict(bare, model.iso.target, model.iso.comp(0))
    phi = compose_infinity(model.iso_inv, to_product)
    series = series_log(isotopy_to_series(phi))
    check = check_gauge_hodge(series, m)
    if not check.ok:
        raise NotSquareZero("constructed gauge fails at power %r" % (check.witness,))
    return series


def mixed_complex_gauge(retract, delta: GradedMap) -> OperatorSeries:
    """Gauge series for a mixed complex carried by a deformation retract.

    Built from -log(1 - h delta z + sum_n incl proj (delta h)^n z^n); the
    retract must witness the vanishing of the transferred operators, and the
    output is asserted to conjugate d onto d + delta z.
    """
    from .errors import HodgeDataFails
    space = retract.big
    if delta.degree != 1 or delta.source != space:
        raise SpaceMismatch("second operator must be a degree +1 endomorphism")
    m = Multicomplex(space, [retract.d_big, delta])
    hodge = check_hodge_data(retract, m)
    if not hodge.ok:
        raise HodgeDataFails("transferred operator %d is nonzero" % hodge.witness)
    h_delta = compose(retract.homotopy, delta)
    delta_h = compose(delta, retract.homotopy)
    ip = compose(retract.incl, retract.proj)
    cap = power_cap(space)
    inner = OperatorSeries.unit(space).sub(OperatorSeries.single(1, h_delta))
    power = GradedMap.identity(space)
    for n in range(1, cap + 1):
        power = compose(power, delta_h)
        if power.is_zero:
            break
        inner = inner.add(OperatorSeries.single(n, compose(ip, power)))
    series = series_log(inner).neg()
    check = check_gauge_hodge(series, m)
    if not check.ok:
        raise HodgeDataFails("mixed gauge fails at power %r" % (check.witness,))
    return series


def mixed_gauge_coefficient(retract, delta: GradedMap, n: int) -> GradedMap:
    """Closed form for the weight-n coefficient of the mixed gauge series:
    (h delta)^n / n - sum_{l=1}^{n} (h delta)^{l-1} incl proj (delta h)^{n-l+1} / l."""
    space = retract.big
    h_delta = compose(retract.homotopy, delta)
    delta_h = compose(delta, retract.homotopy)
    ip = compose(retract.incl, retract.proj)

    def pow_map(f, k):
        out = GradedMap.identity(space)
        for _ in range(k):
            out = compose(out, f)
        return out

    terms = [(Fraction(1, n), pow_map(h_delta, n))]
    for l in range(1, n + 1):
        piece = compose(pow_map(h_delta, l - 1), compose(ip, pow_map(delta_h, n - l + 1)))
        terms.append((Fraction(-1, l), piece))
    return lincomb(terms, degree=2 * n, source=space, target=space)
