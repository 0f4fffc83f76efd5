"""Exact sparse multivariate polynomials over the rationals.

A polynomial is a map from exponent tuples to nonzero Fraction coefficients;
the empty map is the zero polynomial.  On top of the ring operations this
module provides the two summation devices everything else is built from:

* ``power_sum_polynomial(m)`` -- the one-variable polynomial p with
  p(n) = 0^m + 1^m + ... + n^m, constructed through the binomial basis
  (k^m = sum_r b_r C(k,r), then sum_k C(k,r) = C(n+1,r+1)), so that p
  carries the factor (x+1) and in particular p(-1) = 0.
* ``prefix_sum_polynomial(q)`` -- for q in t+1 variables, the polynomial p
  with p(x1..xt, n) = sum_{lam=0..n} q(x1..xt, lam) and p(..., -1) = 0.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

Rational = Fraction


class DimensionError(ValueError):
    """Raised when an argument's arity does not match the operand's."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


class MultiPoly:
    """Polynomial in a fixed number of variables, exact rational coefficients.

    ``terms`` maps exponent tuples (length = arity, entries >= 0) to nonzero
    Fractions.  Instances are immutable; all operations return new objects.
    """

    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms=None):
        if arity < 0:
            raise ValueError("arity must be non-negative")
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != arity:
                raise DimensionError(
                    f"exponent tuple {exps} has length {len(exps)}, expected {arity}"
                )
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coeff = _as_fraction(coeff)
            if coeff:
                clean[exps] = clean.get(exps, Fraction(0)) + coeff
                if not clean[exps]:
                    del clean[exps]
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def _raw(cls, arity: int, terms: dict) -> "MultiPoly":
        """Internal constructor for already-clean term dicts (no validation)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "arity", arity)
        object.__setattr__(obj, "terms", terms)
        return obj

    @classmethod
    def zero(cls, arity: int) -> "MultiPoly":
        return cls._raw(arity, {})

    @classmethod
    def constant(cls, arity: int, value) -> "MultiPoly":
        return cls(arity, {(0,) * arity: _as_fraction(value)})

    @classmethod
    def variable(cls, arity: int, index: int) -> "MultiPoly":
        if not 0 <= index < arity:
            raise DimensionError(f"variable index {index} out of range for arity {arity}")
        exps = [0] * arity
        exps[index] = 1
        return cls(arity, {tuple(exps): Fraction(1)})

    @classmethod
    def affine(cls, coeffs, constant=0) -> "MultiPoly":
        """Linear form sum(coeffs[i] * x_i) + constant."""
        coeffs = [_as_fraction(c) for c in coeffs]
        arity = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                exps = [0] * arity
                exps[i] = 1
                terms[tuple(exps)] = c
        constant = _as_fraction(constant)
        if constant:
            terms[(0,) * arity] = constant
        return cls._raw(arity, terms)

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if self.arity != other.arity:
            raise DimensionError(f"arity mismatch: {self.arity} vs {other.arity}")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.arity, other)
        self._check(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            cur = terms.get(exps)
            if cur is None:
                terms[exps] = coeff
            else:
                cur = cur + coeff
                if cur:
                    terms[exps] = cur
                else:
                    del terms[exps]
        return MultiPoly._raw(self.arity, terms)

    def __neg__(self):
        return MultiPoly._raw(self.arity, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.arity, other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            scalar = _as_fraction(other)
            if not scalar:
                return MultiPoly._raw(self.arity, {})
            return MultiPoly._raw(self.arity, {e: c * scalar for e, c in self.terms.items()})
        self._check(other)
        terms = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                cur = terms.get(key)
                terms[key] = ca * cb if cur is None else cur + ca * cb
        zero_keys = [k for k, v in terms.items() if not v]
        for k in zero_keys:
            del terms[k]
        return MultiPoly._raw(self.arity, terms)

    __rmul__ = __mul__
    __radd__ = __add__

    def __eq__(self, other):
        return (
            isinstance(other, MultiPoly)
            and self.arity == other.arity
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.arity, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -- queries -----------------------------------------------------------

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.arity, Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def eval(self, point) -> Fraction:
        """Exact value at a point of Fractions/ints (length = arity)."""
        point = [_as_fraction(v) for v in point]
        if len(point) != self.arity:
            raise DimensionError(f"point has length {len(point)}, expected {self.arity}")
        total = Fraction(0)
        for exps, coeff in self.terms.items():
            term = coeff
            for e, v in zip(exps, point):
                if e:
                    term *= v**e
            total += term
        return total

    def substitute(self, subs) -> "MultiPoly":
        """Substitute subs[i] (all of one common arity) for variable i."""
        subs = list(subs)
        if len(subs) != self.arity:
            raise DimensionError(
                f"{len(subs)} substitutions given, expected {self.arity}"
            )
        if subs:
            target = subs[0].arity
            for s in subs:
                if s.arity != target:
                    raise DimensionError("substitution polynomials must share arity")
        else:
            target = 0
        out = MultiPoly.zero(target)
        # cache powers of each substitution polynomial as needed
        powers = [{0: MultiPoly.constant(target, 1)} for _ in subs]
        for exps, coeff in self.terms.items():
            term = MultiPoly.constant(target, coeff)
            for i, e in enumerate(exps):
                if not e:
                    continue
                cache = powers[i]
                if e not in cache:
                    best = max(k for k in cache if k <= e)
                    acc = cache[best]
                    for k in range(best + 1, e + 1):
                        acc = acc * subs[i]
                        cache[k] = acc
                term = term * cache[e]
            out = out + term
        return out

    def coefficients_in_last(self) -> dict:
        """Expand in the last variable: returns {j: a_j} with the a_j free of it."""
        if self.arity == 0:
            raise DimensionError("polynomial has no variables")
        out: dict[int, MultiPoly] = {}
        for exps, coeff in self.terms.items():
            j = exps[-1]
            rest = exps[:-1] + (0,)
            cur = out.get(j, MultiPoly.zero(self.arity))
            out[j] = cur + MultiPoly(self.arity, {rest: coeff})
        return out

    # -- rendering ---------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        def key(item):
            exps, _ = item
            return (-sum(exps), tuple(-e for e in exps))
        parts = []
        for exps, coeff in sorted(self.terms.items(), key=key):
            factors = []
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(f"x{i + 1}")
                elif e > 1:
                    factors.append(f"x{i + 1}^{e}")
            cs = str(coeff.numerator) if coeff.denominator == 1 else f"{coeff.numerator}/{coeff.denominator}"
            if factors:
                if coeff == 1:
                    parts.append(" ".join(factors))
                elif coeff == -1:
                    parts.append("-" + " ".join(factors))
                else:
                    parts.append(cs + " " + " ".join(factors))
            else:
                parts.append(cs)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"MultiPoly({self.arity}, {self.terms!r})"


def power_sum_polynomial(m: int) -> MultiPoly:
    """One-variable polynomial p with p(n) = sum_{lam=0..n} lam^m and p(-1) = 0.

    Built by expressing k^m in the binomial basis C(k,0)..C(k,m) (solving the
    triangular system on k = 0..m) and summing each binomial column to
    C(n+1, r+1).
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    b = [Fraction(0)] * (m + 1)
    for k in range(m + 1):
        val = Fraction(k**m)
        for r in range(k):
            val -= b[r] * comb(k, r)
        b[k] = val
    # p(n) = sum_r b[r] * C(n+1, r+1); every C(n+1, r+1) carries the factor (n+1)
    n = MultiPoly.variable(1, 0)
    out = MultiPoly.zero(1)
    for r in range(m + 1):
        if not b[r]:
            continue
        binom = MultiPoly.constant(1, Fraction(1, _factorial(r + 1)))
        for i in range(r + 1):
            binom = binom * (n + MultiPoly.constant(1, 1 - i))
        out = out + b[r] * binom
    return out


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def prefix_sum_polynomial(q: MultiPoly) -> MultiPoly:
    """Polynomial p with p(x1..xt, n) = sum_{lam=0..n} q(x1..xt, lam), p(.., -1) = 0.

    Expands q in its last variable and replaces each power of the summation
    variable with the matching power-sum polynomial.
    """
    if q.arity == 0:
        raise DimensionError("q must have at least one variable")
    arity = q.arity
    last = MultiPoly.variable(arity, arity - 1)
    out = MultiPoly.zero(arity)
    for j, a_j in q.coefficients_in_last().items():
        p_j = power_sum_polynomial(j)
        lifted = p_j.substitute([last])
        out = out + a_j * lifted
    return out
