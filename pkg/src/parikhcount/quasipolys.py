"""Quasi-polynomials: polynomials selected by the residues of the arguments.

A quasi-polynomial of arity t and period d holds one polynomial per residue
tuple in [0,d)^t (absent tuple = zero polynomial).  Tables may be lazy: a
provider derives the piece for a selection key on first use and the result is
memoised.

Internally each object carries a *selector*: the finite data that actually
picks its piece at a point.  A plain table selects by the full residue tuple,
but the objects built by the summation machinery select by much less -- a
floor of an affine form only needs that form's value modulo one integer.
Selectors compose, report their exact period along any lattice direction, and
shift along rays; this keeps every residue-class split proportional to true
periods instead of the lcm of loose bounds, which is what makes multi-level
constructions affordable.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, gcd, lcm

import numpy as np

from .polynomials import DimensionError, MultiPoly, _as_fraction


# ---------------------------------------------------------------------------
# Selectors


class ResidueSelector:
    """Select by the full residue tuple of the point modulo one period."""

    __slots__ = ("period", "arity")

    def __init__(self, period: int, arity: int):
        self.period = period
        self.arity = arity

    @property
    def width(self):
        return self.arity

    def key(self, point):
        return tuple(int(v) % self.period for v in point)

    def keys_batch(self, pts: np.ndarray) -> np.ndarray:
        return pts % self.period

    def period_along(self, direction) -> int:
        out = 1
        for d in direction:
            if d:
                out = lcm(out, self.period // gcd(self.period, d))
        return out

    def shift(self, key, direction, lam: int):
        return tuple((k - lam * d) % self.period for k, d in zip(key, direction))


class ProjectionSelector:
    """Select by residues of a subset of coordinates, one modulus each.

    Used by the lattice-ray indicator: only the coordinates with a nonzero ray
    entry matter, each modulo that entry.
    """

    __slots__ = ("axes", "moduli")

    def __init__(self, axes, moduli):
        self.axes = tuple(axes)
        self.moduli = tuple(moduli)

    @property
    def width(self):
        return len(self.axes)

    def key(self, point):
        return tuple(int(point[i]) % m for i, m in zip(self.axes, self.moduli))

    def keys_batch(self, pts):
        if not self.axes:
            return np.zeros((len(pts), 0), dtype=np.int64)
        return pts[:, list(self.axes)] % np.array(self.moduli, dtype=np.int64)

    def period_along(self, direction) -> int:
        out = 1
        for i, m in zip(self.axes, self.moduli):
            d = direction[i]
            if d:
                out = lcm(out, m // gcd(m, d))
        return out

    def shift(self, key, direction, lam: int):
        return tuple(
            (k - lam * direction[i]) % m for k, i, m in zip(key, self.axes, self.moduli)
        )


class FormSelector:
    """Select by the value of one integer linear form modulo one integer."""

    __slots__ = ("form", "modulus")

    def __init__(self, form, modulus: int):
        self.form = tuple(int(v) for v in form)
        self.modulus = modulus

    @property
    def width(self):
        return 1

    def _value(self, point):
        return sum(f * int(v) for f, v in zip(self.form, point))

    def key(self, point):
        return (self._value(point) % self.modulus,)

    def keys_batch(self, pts):
        vals = pts @ np.array(self.form, dtype=np.int64)
        return (vals % self.modulus).reshape(-1, 1)

    def period_along(self, direction) -> int:
        v = sum(f * d for f, d in zip(self.form, direction))
        return self.modulus // gcd(self.modulus, v)

    def shift(self, key, direction, lam: int):
        v = sum(f * d for f, d in zip(self.form, direction))
        return ((key[0] - lam * v) % self.modulus,)


class PairSelector:
    """Concatenation of two selectors (flat key layout: left then right)."""

    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right

    @property
    def width(self):
        return self.left.width + self.right.width

    def key(self, point):
        return self.left.key(point) + self.right.key(point)

    def keys_batch(self, pts):
        return np.hstack([self.left.keys_batch(pts), self.right.keys_batch(pts)])

    def period_along(self, direction) -> int:
        return lcm(self.left.period_along(direction), self.right.period_along(direction))

    def shift(self, key, direction, lam: int):
        w = self.left.width
        return self.left.shift(key[:w], direction, lam) + self.right.shift(
            key[w:], direction, lam
        )


class SumSelector:
    """Concatenation of the selectors of the terms of a sum."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = tuple(parts)

    @property
    def width(self):
        return sum(p.width for p in self.parts)

    def key(self, point):
        out = ()
        for p in self.parts:
            out += p.key(point)
        return out

    def keys_batch(self, pts):
        return np.hstack([p.keys_batch(pts) for p in self.parts])

    def period_along(self, direction) -> int:
        out = 1
        for p in self.parts:
            out = lcm(out, p.period_along(direction))
        return out

    def shift(self, key, direction, lam: int):
        out = ()
        pos = 0
        for p in self.parts:
            out += p.shift(key[pos : pos + p.width], direction, lam)
            pos += p.width
        return out


# ---------------------------------------------------------------------------
# The quasi-polynomial object


class QuasiPolynomial:
    """Arity-t map given by a period and residue/selector-indexed pieces.

    ``summands`` (when set) records the object as a signed sum of simpler
    quasi-polynomials; evaluation and batch evaluation distribute over the
    terms, so work stays proportional to each term's own selection structure.
    """

    __slots__ = ("arity", "period", "selector", "_pieces", "_provider", "summands")

    def __init__(self, arity: int, period: int, pieces=None, provider=None,
                 selector=None, summands=None):
        if period < 1:
            raise ValueError("period must be >= 1")
        self.arity = arity
        self.period = period
        self.selector = selector if selector is not None else ResidueSelector(period, arity)
        self._pieces = {}
        self._provider = provider
        self.summands = summands
        for res, poly in (pieces or {}).items():
            res = tuple(res)
            if len(res) != arity or any(not 0 <= r < period for r in res):
                raise ValueError(f"bad residue tuple {res} for period {period}")
            if poly.arity != arity:
                raise DimensionError("piece arity does not match")
            if poly:
                self._pieces[self.selector.key(res)] = poly

    # -- pieces ------------------------------------------------------------

    def piece_by_key(self, key) -> MultiPoly:
        poly = self._pieces.get(key)
        if poly is None:
            if self._provider is not None:
                poly = self._provider(key)
            else:
                poly = MultiPoly.zero(self.arity)
            self._pieces[key] = poly
        return poly

    def piece(self, residues) -> MultiPoly:
        """The polynomial selected by a residue tuple (reduced mod period)."""
        res = tuple(int(r) % self.period for r in residues)
        if len(res) != self.arity:
            raise DimensionError(f"residue tuple of length {len(res)}, expected {self.arity}")
        return self.piece_by_key(self.selector.key(res))

    def materialize(self) -> dict:
        """All d^t pieces as a residue -> polynomial dict (zero pieces omitted)."""
        out = {}
        for res in _residue_tuples(self.period, self.arity):
            poly = self.piece(res)
            if poly:
                out[res] = poly
        return out

    def eval(self, point) -> Fraction:
        if len(point) != self.arity:
            raise DimensionError(f"point of length {len(point)}, expected {self.arity}")
        if self.summands is not None:
            total = Fraction(0)
            for sign, term in self.summands:
                total += sign * term.eval(point)
            return total
        return self.piece_by_key(self.selector.key(point)).eval(point)

    def is_zero_constant(self) -> bool:
        """True when built from an explicit table with no nonzero piece."""
        return self._provider is None and self.summands is None and not self._pieces

    def __repr__(self):
        return f"QuasiPolynomial(arity={self.arity}, period={self.period})"


def _residue_tuples(period: int, arity: int):
    if arity == 0:
        yield ()
        return
    for rest in _residue_tuples(period, arity - 1):
        for r in range(period):
            yield rest + (r,)


def qp_from_poly(poly: MultiPoly) -> QuasiPolynomial:
    """A plain polynomial as a period-1 quasi-polynomial."""
    return QuasiPolynomial(poly.arity, 1, {(0,) * poly.arity: poly})


def qp_zero(arity: int) -> QuasiPolynomial:
    return QuasiPolynomial(arity, 1, {})


def qp_constant(arity: int, value) -> QuasiPolynomial:
    return qp_from_poly(MultiPoly.constant(arity, value))


def qp_eval(q: QuasiPolynomial, point) -> Fraction:
    return q.eval(point)


def qp_leaf_terms(q: QuasiPolynomial):
    """Flatten a sum structure into (sign, leaf) pairs; a leaf is its own term."""
    if q.summands is None:
        return [(1, q)]
    return list(q.summands)


def _sum_of(terms, arity: int) -> QuasiPolynomial:
    terms = [(s, t) for s, t in terms if not t.is_zero_constant()]
    if not terms:
        return qp_zero(arity)
    if len(terms) == 1 and terms[0][0] == 1:
        return terms[0][1]
    period = 1
    for _, t in terms:
        period = lcm(period, t.period)
    selector = SumSelector([t.selector for _, t in terms])

    def provider(key):
        total = None
        pos = 0
        for sign, t in terms:
            piece = t.piece_by_key(key[pos : pos + t.selector.width])
            pos += t.selector.width
            piece = piece if sign == 1 else -piece
            total = piece if total is None else total + piece
        return total

    return QuasiPolynomial(arity, period, provider=provider, selector=selector, summands=terms)


def qp_sum_terms(terms, arity: int) -> QuasiPolynomial:
    """Signed sum of quasi-polynomials from an explicit (sign, term) list."""
    flat = []
    for sign, term in terms:
        flat.extend((sign * s, t) for s, t in qp_leaf_terms(term))
    return _sum_of(flat, arity)


def qp_add(q1: QuasiPolynomial, q2: QuasiPolynomial) -> QuasiPolynomial:
    """Pointwise sum; the result period is lcm(d1, d2)."""
    if q1.arity != q2.arity:
        raise DimensionError("arity mismatch in quasi-polynomial sum")
    return _sum_of(qp_leaf_terms(q1) + qp_leaf_terms(q2), q1.arity)


def qp_neg(q: QuasiPolynomial) -> QuasiPolynomial:
    return _sum_of([(-s, t) for s, t in qp_leaf_terms(q)], q.arity)


def qp_sub(q1: QuasiPolynomial, q2: QuasiPolynomial) -> QuasiPolynomial:
    terms = qp_leaf_terms(q1) + [(-s, t) for s, t in qp_leaf_terms(q2)]
    return _sum_of(terms, q1.arity)


def qp_refit(q: QuasiPolynomial, k: int) -> QuasiPolynomial:
    """The same map presented with the larger period k (k a multiple of d)."""
    if k < 1 or k % q.period:
        raise ValueError(f"{k} is not a positive multiple of period {q.period}")
    if k == q.period:
        return q
    return QuasiPolynomial(
        q.arity,
        k,
        provider=q.piece_by_key,
        selector=q.selector,
        summands=q.summands,
    )


def qp_equal(q1: QuasiPolynomial, q2: QuasiPolynomial, limit: int = 100_000) -> bool:
    """Exact equality as maps, by comparing pieces over the common period.

    Materialises lcm(d1,d2)^t pieces; guarded by ``limit`` to keep accidental
    use on huge periods from running away.
    """
    if q1.arity != q2.arity:
        return False
    period = lcm(q1.period, q2.period)
    if period**q1.arity > limit:
        raise ValueError("common period too large for exact piece comparison")
    for res in _residue_tuples(period, q1.arity):
        if q1.piece(res) != q2.piece(res):
            return False
    return True


def qp_canonicalize(q: QuasiPolynomial, limit: int = 100_000) -> QuasiPolynomial:
    """Shrink the period to the smallest divisor presenting the same map.

    Materialises the full piece table, so intended for reporting on desk-size
    objects rather than for the inner construction loop.
    """
    if q.period**q.arity > limit:
        raise ValueError("period too large to canonicalize")
    table = {res: q.piece(res) for res in _residue_tuples(q.period, q.arity)}
    period = q.period
    changed = True
    while changed and period > 1:
        changed = False
        for p in sorted(_prime_factors(period)):
            cand = period // p
            if _table_has_period(table, q.arity, period, cand):
                table = {res: table[res] for res in _residue_tuples(cand, q.arity)}
                period = cand
                changed = True
                break
    pieces = {res: poly for res, poly in table.items() if poly}
    return QuasiPolynomial(q.arity, period, pieces)


def _table_has_period(table, arity, period, cand):
    for res in _residue_tuples(period, arity):
        reduced = tuple(r % cand for r in res)
        if table[res] != table[reduced]:
            return False
    return True


def _prime_factors(n: int):
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


# ---------------------------------------------------------------------------
# Floors of affine forms


def _floor_piece(coeffs, g: int, k: int, d: int, bracket, value: int) -> MultiPoly:
    """Piece of floor((bracket(<b,x>) + k)/d) on the class <g*b, x> = value mod g*d.

    With v any representative of the class, <b,x> = v/g + d*A for an integer A,
    and floor((bracket(v/g + dA) + k)/d) = A + floor((bracket(v/g) + k)/d), so
    the piece is the affine polynomial below -- independent of A.
    """
    v = Fraction(value, g)
    const = Fraction((bracket(v) + k) // d) - v / d
    return MultiPoly.affine([c / d for c in coeffs], const)


def floor_affine_qp(b, k: int, d: int, mode: str = "floor") -> QuasiPolynomial:
    """Quasi-polynomial equal to floor((inner(<b,x>) + k) / d) on N^t.

    ``mode`` picks the inner bracket: "floor" or "ceiling" (the latter is what
    a strict upper summation index ceil(u) - 1 - j reduces to).  The period is
    g*d with g the lcm of the coefficient denominators; the piece only depends
    on the value of the integer form g*<b,x> modulo g*d, and the coefficients
    may have either sign.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if mode not in ("floor", "ceiling"):
        raise ValueError(f"unknown mode {mode!r}")
    coeffs = [_as_fraction(c) for c in b]
    t = len(coeffs)
    g = 1
    for c in coeffs:
        g = lcm(g, c.denominator)
    period = g * d
    bracket = floor if mode == "floor" else ceil
    form = [int(c * g) for c in coeffs]
    selector = FormSelector(form, period)

    def provider(key):
        return _floor_piece(coeffs, g, k, d, bracket, key[0])

    return QuasiPolynomial(t, period, provider=provider, selector=selector)


def format_quasipolynomial(q: QuasiPolynomial) -> str:
    """Serialisation: period first, then residue tuples in lexicographic order."""
    lines = [f"period {q.period}"]
    for res in sorted(q.materialize()):
        lines.append(f"  {' '.join(map(str, res))}: {q.piece(res)}")
    if len(lines) == 1:
        lines.append("  (zero)")
    return "\n".join(lines)
