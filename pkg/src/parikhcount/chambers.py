"""Central hyperplane arrangements, sign-vector regions, piecewise counting maps.

Regions of N^t are the equivalence classes of points under the sign pattern
they present to a fixed arrangement of hyperplanes through the origin (which
always contains the coordinate hyperplanes).  A BoxSpline is a map that is a
quasi-polynomial on every region, plus a finite override table taking strict
precedence -- evaluation is total on N^t and must produce non-negative
integers.

Region pieces may be supplied as an explicit table or derived lazily by a
provider keyed on the sign vector; derived pieces are memoised, and identical
sign vectors always yield the identical piece object.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .polynomials import DimensionError, MultiPoly
from .quasipolys import (
    QuasiPolynomial,
    format_quasipolynomial,
    qp_add,
    qp_zero,
)


class ConsistencyError(RuntimeError):
    """A constructed piece produced a negative or non-integer counting value."""


class Hyperplane:
    """Homogeneous hyperplane, canonical integer normal.

    The normal is primitive (gcd 1) with positive first nonzero entry, so
    equal hyperplanes compare and hash equal.
    """

    __slots__ = ("normal",)

    def __init__(self, normal):
        normal = tuple(int(v) for v in normal)
        if not any(normal):
            raise ValueError("hyperplane normal must be nonzero")
        g = 0
        for v in normal:
            g = gcd(g, abs(v))
        normal = tuple(v // g for v in normal)
        for v in normal:
            if v:
                if v < 0:
                    normal = tuple(-w for w in normal)
                break
        object.__setattr__(self, "normal", normal)

    def __setattr__(self, name, value):
        raise AttributeError("Hyperplane is immutable")

    @property
    def dimension(self):
        return len(self.normal)

    def value(self, x):
        return sum(n * v for n, v in zip(self.normal, x))

    def side(self, x) -> int:
        v = self.value(x)
        return (v > 0) - (v < 0)

    def coordinate_axis(self):
        """Index i when this is the plane x_i = 0, else None."""
        axis = None
        for i, v in enumerate(self.normal):
            if v == 1 and axis is None:
                axis = i
            elif v:
                return None
        return axis

    def __eq__(self, other):
        return isinstance(other, Hyperplane) and self.normal == other.normal

    def __hash__(self):
        return hash(self.normal)

    def __repr__(self):
        return f"Hyperplane({self.normal})"


def normalize_form(coeffs):
    """Rational linear form -> (Hyperplane, orientation) or (None, 0) if zero.

    orientation s satisfies sign(form(x)) = s * sign(normal . x).
    """
    coeffs = [Fraction(c) for c in coeffs]
    if not any(coeffs):
        return None, 0
    denom = 1
    for c in coeffs:
        denom = lcm(denom, c.denominator)
    ints = [int(c * denom) for c in coeffs]
    plane = Hyperplane(ints)
    for v in ints:
        if v:
            orient = 1 if v > 0 else -1
            break
    return plane, orient


class Arrangement:
    """Ordered list of distinct hyperplanes containing the coordinate planes."""

    __slots__ = ("dimension", "planes", "_index", "_normal_matrix")

    def __init__(self, dimension: int, planes):
        seen = []
        present = set()
        for p in planes:
            if p.dimension != dimension:
                raise DimensionError("hyperplane dimension mismatch")
            if p not in present:
                present.add(p)
                seen.append(p)
        for i in range(dimension):
            axis = [0] * dimension
            axis[i] = 1
            if Hyperplane(axis) not in present:
                raise ValueError(f"arrangement is missing coordinate plane x{i + 1} = 0")
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "planes", tuple(seen))
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(seen)})
        object.__setattr__(self, "_normal_matrix", None)

    def __setattr__(self, name, value):
        raise AttributeError("Arrangement is immutable")

    def index_of(self, plane: Hyperplane) -> int:
        return self._index[plane]

    def __contains__(self, plane):
        return plane in self._index

    def __len__(self):
        return len(self.planes)

    def with_planes(self, extra) -> "Arrangement":
        return Arrangement(self.dimension, list(self.planes) + list(extra))

    def normal_matrix(self) -> np.ndarray:
        mat = self._normal_matrix
        if mat is None:
            mat = np.array([p.normal for p in self.planes], dtype=np.int64)
            object.__setattr__(self, "_normal_matrix", mat)
        return mat


def coordinate_arrangement(dimension: int) -> Arrangement:
    planes = []
    for i in range(dimension):
        axis = [0] * dimension
        axis[i] = 1
        planes.append(Hyperplane(axis))
    return Arrangement(dimension, planes)


def sign_vector(arr: Arrangement, x) -> tuple:
    """Entry i is the sign of <normal_i, x>."""
    if len(x) != arr.dimension:
        raise DimensionError(f"point of length {len(x)}, expected {arr.dimension}")
    return tuple(p.side(x) for p in arr.planes)


def sign_string(sig) -> str:
    return "".join("+" if s > 0 else "-" if s < 0 else "0" for s in sig)


# ---------------------------------------------------------------------------
# Fourier-Motzkin feasibility of sign-vector cones


def fourier_motzkin_feasible(constraints, dimension: int) -> bool:
    """Feasibility over the rationals of a homogeneous system.

    ``constraints`` is a list of (coeffs, strict) meaning coeffs.x >= 0, with
    strict=True for > 0.  Equalities are passed as two opposite inequalities.
    """
    rows = [([Fraction(c) for c in coeffs], strict) for coeffs, strict in constraints]
    for var in range(dimension):
        pos, neg, rest = [], [], []
        for coeffs, strict in rows:
            c = coeffs[var]
            if c > 0:
                pos.append((coeffs, strict))
            elif c < 0:
                neg.append((coeffs, strict))
            else:
                rest.append((coeffs, strict))
        new_rows = rest
        for pc, ps in pos:
            for nc, ns in neg:
                # eliminate: combine pc (coeff a>0) and nc (coeff b<0)
                a, b = pc[var], nc[var]
                comb = [a * nv - b * pv for pv, nv in zip(pc, nc)]
                comb[var] = Fraction(0)
                new_rows.append((comb, ps or ns))
        rows = new_rows
    for coeffs, strict in rows:
        if strict:
            # constant row 0 > 0 is infeasible
            return False
    return True


def region_realizable(arr: Arrangement, sig) -> bool:
    """Whether some point of N^t presents this sign vector (exact decision).

    A rational cone point with the required signs scales to a lattice point,
    so rational feasibility plus non-negative coordinate signs is exact.
    """
    if len(sig) != len(arr.planes):
        raise DimensionError("sign vector length does not match arrangement")
    t = arr.dimension
    for p, s in zip(arr.planes, sig):
        if p.coordinate_axis() is not None and s < 0:
            return False
    constraints = []
    for p, s in zip(arr.planes, sig):
        coeffs = [Fraction(v) for v in p.normal]
        if s > 0:
            constraints.append((coeffs, True))
        elif s < 0:
            constraints.append(([-c for c in coeffs], True))
        else:
            constraints.append((coeffs, False))
            constraints.append(([-c for c in coeffs], False))
    return fourier_motzkin_feasible(constraints, t)


# ---------------------------------------------------------------------------
# BoxSpline


class BoxSpline:
    """Piecewise quasi-polynomial over the regions of a central arrangement."""

    def __init__(self, arrangement: Arrangement, pieces=None, provider=None, overrides=None):
        self.arrangement = arrangement
        self._cache = {}
        self._provider = provider
        self.overrides = {tuple(int(v) for v in pt): int(c) for pt, c in (overrides or {}).items()}
        for pt, c in self.overrides.items():
            if c < 0:
                raise ValueError("override values must be non-negative")
        if pieces:
            for sig, qp in pieces.items():
                sig = tuple(sig)
                if qp.arity != arrangement.dimension:
                    raise DimensionError("piece arity does not match arrangement")
                if not region_realizable(arrangement, sig):
                    raise ValueError(f"sign vector {sign_string(sig)} is not realizable in N^t")
                self._cache[sig] = qp

    @property
    def dimension(self):
        return self.arrangement.dimension

    def piece_for(self, sig) -> QuasiPolynomial:
        sig = tuple(sig)
        qp = self._cache.get(sig)
        if qp is None:
            if self._provider is not None:
                qp = self._provider(sig)
            else:
                qp = qp_zero(self.dimension)
            self._cache[sig] = qp
        return qp

    def eval(self, x) -> int:
        x = tuple(int(v) for v in x)
        if len(x) != self.dimension:
            raise DimensionError(f"point of length {len(x)}, expected {self.dimension}")
        if any(v < 0 for v in x):
            raise ValueError("box splines are evaluated on N^t")
        if x in self.overrides:
            return self.overrides[x]
        sig = sign_vector(self.arrangement, x)
        val = self.piece_for(sig).eval(x)
        if val.denominator != 1 or val < 0:
            raise ConsistencyError(
                f"piece at {sign_string(sig)} evaluates to {val} at {x}"
            )
        return int(val)

    # -- batch evaluation ---------------------------------------------------

    def eval_box(self, bounds) -> np.ndarray:
        """Exact values on the whole box prod [0, bounds_i], as an int array.

        Points are grouped by sign vector and then by residue class, so each
        region piece and each piece polynomial is derived once and evaluated
        over all its points together.
        """
        bounds = tuple(int(b) for b in bounds)
        if len(bounds) != self.dimension:
            raise DimensionError("bounds length does not match dimension")
        shape = tuple(b + 1 for b in bounds)
        pts = np.indices(shape).reshape(self.dimension, -1).T.astype(np.int64)
        out = np.zeros(len(pts), dtype=object)
        normals = self.arrangement.normal_matrix()
        sigs = np.sign(pts @ normals.T).astype(np.int8)
        uniq, inverse = np.unique(sigs, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        for u_idx in range(len(uniq)):
            sig = tuple(int(s) for s in uniq[u_idx])
            sel = inverse == u_idx
            group = pts[sel]
            piece = self.piece_for(sig)
            vals = _eval_qp_batch(piece, group)
            ints = []
            for v in vals:
                if v.denominator != 1 or v < 0:
                    raise ConsistencyError(
                        f"piece at {sign_string(sig)} produced value {v}"
                    )
                ints.append(int(v))
            out[sel] = ints
        for pt, c in self.overrides.items():
            if all(0 <= v <= b for v, b in zip(pt, bounds)):
                idx = 0
                for v, b in zip(pt, shape):
                    idx = idx * b + v
                out[idx] = c
        return out.reshape(shape)

    # -- structure ----------------------------------------------------------

    def enumerate_regions(self, bound: int):
        """All sign vectors realized in [0,bound]^t with their pieces, sorted."""
        if bound < 1:
            raise ValueError("bound must be >= 1")
        shape = (bound + 1,) * self.dimension
        pts = np.indices(shape).reshape(self.dimension, -1).T.astype(np.int64)
        normals = self.arrangement.normal_matrix()
        sigs = np.sign(pts @ normals.T).astype(np.int8)
        uniq = np.unique(sigs, axis=0)
        result = []
        for row in uniq:
            sig = tuple(int(s) for s in row)
            result.append((sig, self.piece_for(sig)))
        result.sort(key=lambda item: item[0])
        return result

    def describe(self, bound: int = 10) -> str:
        lines = [f"dimension {self.dimension}"]
        lines.append("hyperplanes:")
        for p in self.arrangement.planes:
            lines.append(f"  {' '.join(map(str, p.normal))}")
        lines.append(f"regions (witnessed in [0,{bound}]^{self.dimension}):")
        for sig, piece in self.enumerate_regions(bound):
            lines.append(f"  region {sign_string(sig)}:")
            for ln in format_quasipolynomial(piece).splitlines():
                lines.append("    " + ln)
        if self.overrides:
            lines.append("overrides:")
            for pt in sorted(self.overrides):
                lines.append(f"  {' '.join(map(str, pt))} -> {self.overrides[pt]}")
        return "\n".join(lines)


def _eval_qp_batch(piece: QuasiPolynomial, pts: np.ndarray):
    """Exact evaluation of a quasi-polynomial at many integer points.

    Returns Fractions: intermediate terms of a sum need not be integral on
    their own.  Sum-structured pieces are evaluated term by term so points
    group by each term's own selection structure instead of the lcm of all
    of them; terms may provide their own batch evaluator.
    """
    n = len(pts)
    if n == 0:
        return []
    if piece.summands is not None:
        vals = [Fraction(0)] * n
        for sign, term in piece.summands:
            sub = _eval_qp_batch(term, pts)
            if sign == 1:
                vals = [a + b for a, b in zip(vals, sub)]
            else:
                vals = [a - b for a, b in zip(vals, sub)]
        return vals
    batch = getattr(piece, "eval_batch", None)
    if batch is not None:
        return batch(pts)
    vals = [Fraction(0)] * n
    keys = piece.selector.keys_batch(pts)
    if keys.shape[1] == 0:
        poly = piece.piece_by_key(())
        if poly:
            return eval_poly_batch(poly, pts)
        return vals
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    for k_idx in range(len(uniq)):
        key = tuple(int(v) for v in uniq[k_idx])
        poly = piece.piece_by_key(key)
        if not poly:
            continue
        sel = np.nonzero(inverse == k_idx)[0]
        values = eval_poly_batch(poly, pts[sel])
        for pos, v in zip(sel, values):
            vals[int(pos)] = v
    return vals


def eval_poly_batch(poly: MultiPoly, pts: np.ndarray):
    """Exact values of a polynomial at many integer points, as Fractions."""
    denom = 1
    for c in poly.terms.values():
        denom = lcm(denom, c.denominator)
    terms = [(exps, int(c * denom)) for exps, c in poly.terms.items()]
    if not terms:
        return [Fraction(0)] * len(pts)
    max_abs = max(abs(c) for _, c in terms)
    max_pt = int(np.max(np.abs(pts))) if pts.size else 0
    deg = poly.degree()
    # int64 fast path when no overflow is possible
    if max_abs * (max(max_pt, 1) ** deg) * len(terms) < 2**62:
        acc = np.zeros(len(pts), dtype=np.int64)
        for exps, c in terms:
            term = np.full(len(pts), c, dtype=np.int64)
            for i, e in enumerate(exps):
                for _ in range(e):
                    term = term * pts[:, i]
            acc = acc + term
        if denom == 1:
            return [Fraction(int(v)) for v in acc]
        return [Fraction(int(v), denom) for v in acc]
    out = []
    for row in pts:
        total = 0
        for exps, c in terms:
            term = c
            for i, e in enumerate(exps):
                if e:
                    term *= int(row[i]) ** e
            total += term
        out.append(Fraction(total, denom))
    return out


def bs_add(b1: BoxSpline, b2: BoxSpline) -> BoxSpline:
    """Pointwise sum over the union arrangement (Minkowski of region structure)."""
    if b1.dimension != b2.dimension:
        raise DimensionError("dimension mismatch in box spline sum")
    merged = b1.arrangement.with_planes(b2.arrangement.planes)
    idx1 = [merged.index_of(p) for p in b1.arrangement.planes]
    idx2 = [merged.index_of(p) for p in b2.arrangement.planes]

    def provider(sig):
        s1 = tuple(sig[i] for i in idx1)
        s2 = tuple(sig[i] for i in idx2)
        return qp_add(b1.piece_for(s1), b2.piece_for(s2))

    overrides = {}
    for pt in set(b1.overrides) | set(b2.overrides):
        overrides[pt] = b1.eval(pt) + b2.eval(pt)
    return BoxSpline(merged, provider=provider, overrides=overrides)
