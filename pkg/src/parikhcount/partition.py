"""Counting maps of non-negative linear Diophantine systems, by chambers.

``box_spline_of_system`` builds, for a t x k matrix A with non-negative
entries and no zero column, the map n |-> #{x in N^k : Ax = n} as a BoxSpline:
a central hyperplane arrangement together with one quasi-polynomial per sign
region.  The construction is an induction on columns:

* one column a: solutions live on the lattice ray {lam * a}, cut out by the
  pairwise difference planes a_j x_i - a_i x_j = 0; on the ray the count is
  the 0/1 periodic divisibility indicator with period lcm of the entries.
* k columns: with G the spline for columns 2..k, the count is
  sum_{0 <= lam <= Lambda(n)} G(n - lam * a) where Lambda = min n_i / a_i over
  nonzero a_i.  Crossing each hyperplane of G's arrangement happens at a fixed
  linear functional of n, so after enlarging the arrangement with all pairwise
  differences of those functionals, the sorted crossing pattern is constant on
  every region and the sum splits into closed-form interval sums.

Everything is derived lazily per queried sign vector; a sign vector alone
determines the whole derivation, so pieces are witness-independent by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import lcm

from .chambers import (
    Arrangement,
    BoxSpline,
    ConsistencyError,
    Hyperplane,
    coordinate_arrangement,
    normalize_form,
)
from .polynomials import DimensionError, MultiPoly, prefix_sum_polynomial
from .quasipolys import (
    PairSelector,
    ProjectionSelector,
    FormSelector,
    QuasiPolynomial,
    _floor_piece,
    floor_affine_qp,
    qp_add,
    qp_constant,
    qp_leaf_terms,
    qp_sub,
    qp_sum_terms,
    qp_zero,
)


class DiophantineSystem:
    """Non-negative integer matrix with no zero column, plus a constant offset.

    Counts refer to solutions of A x + offset = n over x in N^k.
    """

    __slots__ = ("rows", "cols", "matrix", "offset")

    def __init__(self, matrix, offset=None):
        matrix = tuple(tuple(int(v) for v in row) for row in matrix)
        if not matrix or not matrix[0]:
            raise ValueError("matrix must have at least one row and one column")
        rows = len(matrix)
        cols = len(matrix[0])
        if any(len(r) != cols for r in matrix):
            raise ValueError("ragged matrix")
        if any(v < 0 for r in matrix for v in r):
            raise ValueError("matrix entries must be non-negative")
        for j in range(cols):
            if all(matrix[i][j] == 0 for i in range(rows)):
                raise ValueError(f"column {j + 1} is zero")
        offset = tuple(int(v) for v in (offset or (0,) * rows))
        if len(offset) != rows or any(v < 0 for v in offset):
            raise ValueError("offset must be a non-negative vector of length t")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "offset", offset)

    def __setattr__(self, name, value):
        raise AttributeError("DiophantineSystem is immutable")

    def columns(self):
        return [tuple(self.matrix[i][j] for i in range(self.rows)) for j in range(self.cols)]

    def __eq__(self, other):
        return (
            isinstance(other, DiophantineSystem)
            and self.matrix == other.matrix
            and self.offset == other.offset
        )

    def __hash__(self):
        return hash((self.matrix, self.offset))

    def __repr__(self):
        return f"DiophantineSystem({self.matrix!r}, offset={self.offset!r})"

    # -- file format ---------------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> "DiophantineSystem":
        """Parse 't k' header, t rows of k entries, optional 'offset: ...' line."""
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise ValueError("empty system file")
        head = lines[0].split()
        if len(head) != 2:
            raise ValueError(f"line 1: expected 't k', got {lines[0]!r}")
        t, k = int(head[0]), int(head[1])
        if len(lines) < 1 + t:
            raise ValueError(f"expected {t} matrix rows, found {len(lines) - 1}")
        matrix = []
        for i in range(t):
            parts = lines[1 + i].split()
            if len(parts) != k:
                raise ValueError(f"line {i + 2}: expected {k} entries, got {len(parts)}")
            matrix.append([int(p) for p in parts])
        offset = None
        rest = lines[1 + t :]
        if rest:
            if len(rest) != 1 or not rest[0].startswith("offset:"):
                raise ValueError(f"line {t + 2}: expected optional 'offset:' line")
            offset = [int(p) for p in rest[0][len("offset:") :].split()]
        return cls(matrix, offset)

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        for row in self.matrix:
            lines.append(" ".join(map(str, row)))
        if any(self.offset):
            lines.append("offset: " + " ".join(map(str, self.offset)))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RayFunctional:
    """The parameter value at which the ray x - lam*a crosses a hyperplane.

    For a plane with normal beta and gamma = <beta, a> != 0 the crossing is at
    lam = <beta, x> / gamma, a linear functional of x.
    """

    coeffs: tuple
    plane: Hyperplane


def lambda_functional(h: Hyperplane, a) -> RayFunctional | None:
    """Crossing functional of a plane along direction a, or None when parallel."""
    gamma = h.value(a)
    if gamma == 0:
        return None
    return RayFunctional(tuple(Fraction(n, gamma) for n in h.normal), h)


def extend_arrangement(arr: Arrangement, a) -> Arrangement:
    """Add the difference planes of all pairs of crossing functionals.

    On the regions of the enlarged arrangement the relative order (including
    ties) of all crossing values along direction a is constant.
    """
    if len(a) != arr.dimension:
        raise DimensionError("column length does not match arrangement dimension")
    funcs = [f for f in (lambda_functional(p, a) for p in arr.planes) if f is not None]
    extra = []
    for i in range(len(funcs)):
        for j in range(i + 1, len(funcs)):
            diff = [x - y for x, y in zip(funcs[i].coeffs, funcs[j].coeffs)]
            plane, _ = normalize_form(diff)
            if plane is not None:
                extra.append(plane)
    return arr.with_planes(extra)


# ---------------------------------------------------------------------------
# Interval sums along a ray


from math import ceil as _ceil, floor as _floor


_PREFIX_CACHE: dict = {}
_FLOOR_PIECE_CACHE: dict = {}


def _class_prefix(qc: MultiPoly, a, d: int, j: int) -> MultiPoly:
    """Prefix-sum polynomial of mu |-> qc(x - (j + mu*d) * a), cached globally.

    The same piece polynomial recurs across many selection keys, regions and
    bound functionals; the cache is keyed by the polynomial itself.
    """
    memo_key = (qc, a, d, j)
    out = _PREFIX_CACHE.get(memo_key)
    if out is None:
        t = qc.arity
        subs = []
        for i in range(t):
            coeffs = [Fraction(0)] * (t + 1)
            coeffs[i] = Fraction(1)
            coeffs[t] = Fraction(-d * a[i])
            subs.append(MultiPoly.affine(coeffs, -j * a[i]))
        out = prefix_sum_polynomial(qc.substitute(subs))
        _PREFIX_CACHE[memo_key] = out
    return out


def _floor_piece_cached(u_coeffs, g, k_off, d, bracket, v):
    memo_key = (u_coeffs, k_off, d, bracket is _floor, v)
    out = _FLOOR_PIECE_CACHE.get(memo_key)
    if out is None:
        out = _floor_piece(u_coeffs, g, k_off, d, bracket, v)
        _FLOOR_PIECE_CACHE[memo_key] = out
    return out


_COMPOSE_CACHE: dict = {}


def _compose_last(P: MultiPoly, nu: MultiPoly) -> MultiPoly:
    """P(x1..xt, nu(x1..xt)) for P of arity t+1, cached on the pair."""
    memo_key = (P, nu)
    out = _COMPOSE_CACHE.get(memo_key)
    if out is not None:
        return out
    t = nu.arity
    by_degree: dict[int, dict] = {}
    for exps, coeff in P.terms.items():
        bucket = by_degree.setdefault(exps[-1], {})
        bucket[exps[:-1]] = coeff
    total = MultiPoly.zero(t)
    power = MultiPoly.constant(t, 1)
    for e in range(max(by_degree, default=0) + 1):
        bucket = by_degree.get(e)
        if bucket:
            total = total + MultiPoly._raw(t, dict(bucket)) * power
        if e < max(by_degree, default=0):
            power = power * nu
    _COMPOSE_CACHE[memo_key] = total
    return total


class RaySumQP(QuasiPolynomial):
    """sum over integers lam in [0, u(x)] (inclusive) or [0, u(x)) of q(x - lam*a).

    Valid wherever u(x) >= 0 (the empty-interval case u(x) = 0, exclusive,
    yields 0 through the prefix polynomial vanishing at -1).  The sum is split
    by residue classes of lam: within one class the shifted point selects a
    fixed piece of q, so the inner sum is a polynomial prefix sum whose top
    index is the floor-of-affine quasi-polynomial of u.  The class modulus is
    q's exact selection period along the direction a, not its nominal period.

    Asking for a piece polynomial materialises the full class sum (all d
    classes).  Evaluation at a point only ever touches the classes with a
    non-empty index range there -- the others vanish through the prefix
    polynomial's root at -1 -- so values cost O(u(x)) even when d is large.
    """

    __slots__ = ("q", "a", "u_coeffs", "inclusive", "d", "g", "_prefix_cache")

    def __init__(self, q: QuasiPolynomial, a, u_coeffs, inclusive: bool):
        t = len(a)
        a = tuple(int(v) for v in a)
        u_coeffs = tuple(Fraction(c) for c in u_coeffs)
        d = q.selector.period_along(a)
        g = 1
        for c in u_coeffs:
            g = lcm(g, c.denominator)
        m = g * d
        form = [int(c * g) for c in u_coeffs]
        selector = PairSelector(q.selector, FormSelector(form, m))
        super().__init__(t, lcm(q.period, m), provider=self._derive, selector=selector)
        self.q = q
        self.a = a
        self.u_coeffs = u_coeffs
        self.inclusive = inclusive
        self.d = d
        self.g = g
        self._prefix_cache = {}

    def signature(self):
        return (id(self.q), self.a, self.u_coeffs, self.inclusive)

    def _bracket(self, value):
        return _floor(value) if self.inclusive else _ceil(value)

    def _prefix(self, j, qc):
        return _class_prefix(qc, self.a, self.d, j)

    def _derive(self, key):
        qwidth = self.q.selector.width
        qkey = key[:qwidth]
        v = key[qwidth]
        bracket = _floor if self.inclusive else _ceil
        total = MultiPoly.zero(self.arity)
        for j in range(self.d):
            qc = self.q.piece_by_key(self.q.selector.shift(qkey, self.a, j))
            if not qc:
                continue
            # top index for the class lam = j (mod d): floor((bracket(u)-j)/d)
            k_off = -j if self.inclusive else -1 - j
            top = _floor_piece_cached(self.u_coeffs, self.g, k_off, self.d, bracket, v)
            total = total + _compose_last(self._prefix(j, qc), top)
        return total

    def eval(self, point) -> Fraction:
        if len(point) != self.arity:
            raise DimensionError(f"point of length {len(point)}, expected {self.arity}")
        u_val = sum(c * int(x) for c, x in zip(self.u_coeffs, point))
        top = self._bracket(u_val) if self.inclusive else self._bracket(u_val) - 1
        if top < 0:
            return Fraction(0)
        total = Fraction(0)
        qkey = self.q.selector.key(point)
        for j in range(min(self.d, top + 1)):
            qc = self.q.piece_by_key(self.q.selector.shift(qkey, self.a, j))
            if not qc:
                continue
            n_j = (top - j) // self.d
            total += self._prefix(j, qc).eval(tuple(point) + (n_j,))
        return total

    def eval_batch(self, pts):
        """Exact values at many points, touching only non-empty index classes."""
        import numpy as np

        from .chambers import eval_poly_batch

        n = len(pts)
        vals = [Fraction(0)] * n
        if n == 0:
            return vals
        form = np.array([int(c * self.g) for c in self.u_coeffs], dtype=np.int64)
        w = pts @ form
        # top index: floor(w/g) inclusive, ceil(w/g)-1 exclusive
        if self.inclusive:
            tops = w // self.g
        else:
            tops = -((-w) // self.g) - 1
        max_top = int(tops.max())
        if max_top < 0:
            return vals
        a_row = np.array(self.a, dtype=np.int64)
        for j in range(min(self.d, max_top + 1)):
            sel = np.nonzero(tops >= j)[0]
            if not len(sel):
                continue
            group = pts[sel]
            ikeys = self.q.selector.keys_batch(group - j * a_row)
            n_js = (tops[sel] - j) // self.d
            if ikeys.shape[1] == 0:
                qc = self.q.piece_by_key(())
                if qc:
                    ext = np.hstack([group, n_js.reshape(-1, 1)])
                    for pos, v in zip(sel, eval_poly_batch(self._prefix(j, qc), ext)):
                        vals[int(pos)] += v
                continue
            uniq, inverse = np.unique(ikeys, axis=0, return_inverse=True)
            inverse = inverse.ravel()
            for k_idx in range(len(uniq)):
                qc = self.q.piece_by_key(tuple(int(v) for v in uniq[k_idx]))
                if not qc:
                    continue
                msel = np.nonzero(inverse == k_idx)[0]
                ext = np.hstack([group[msel], n_js[msel].reshape(-1, 1)])
                values = eval_poly_batch(self._prefix(j, qc), ext)
                for pos, v in zip(sel[msel], values):
                    vals[int(pos)] += v
        return vals


_HALF_SUM_CACHE: dict = {}


def _half_sum(q: QuasiPolynomial, a, u_coeffs, inclusive: bool) -> QuasiPolynomial:
    # many regions request the identical sum (same inner piece and bound);
    # sharing the object shares its prefix polynomials and piece tables
    key = (id(q), tuple(a), tuple(u_coeffs), inclusive)
    out = _HALF_SUM_CACHE.get(key)
    if out is None:
        out = RaySumQP(q, a, u_coeffs, inclusive)
        _HALF_SUM_CACHE[key] = out
    return out


_BOUND_KINDS = ("[]", "[)", "(]", "()")


def sum_over_interval(p: QuasiPolynomial, a, lower, upper: RayFunctional, bounds: str) -> QuasiPolynomial:
    """Closed form of sum_{lam integer in interval} p(x - lam*a).

    ``lower`` may be a RayFunctional or None/0 for the zero functional;
    ``bounds`` selects which endpoints are included.  The result is exact on
    any region where 0 <= lower(x) <= upper(x) and the shifted points stay in
    p's region of validity; outside that, values carry no contract.
    """
    if bounds not in _BOUND_KINDS:
        raise ValueError(f"bounds must be one of {_BOUND_KINDS}")
    up = upper.coeffs
    hi = _half_sum(p, a, up, bounds in ("[]", "(]"))
    zero_lower = lower is None or lower == 0
    if zero_lower and bounds in ("[]", "[)"):
        return hi
    lo_coeffs = (Fraction(0),) * len(a) if zero_lower else lower.coeffs
    lo = _half_sum(p, a, lo_coeffs, bounds in ("(]", "()"))
    return qp_sub(hi, lo)


# ---------------------------------------------------------------------------
# Base case: a single column


def _ray_spline(t: int, col) -> BoxSpline:
    """Counting spline of the one-column system: 1 on lattice multiples of col."""
    extra = []
    for i in range(t):
        for j in range(i + 1, t):
            normal = [0] * t
            normal[i] = col[j]
            normal[j] = -col[i]
            if any(normal):
                extra.append(Hyperplane(normal))
    arr = coordinate_arrangement(t).with_planes(extra)
    period = 1
    for v in col:
        if v:
            period = lcm(period, v)

    one = MultiPoly.constant(t, 1)
    zero_poly = MultiPoly.zero(t)

    def indicator_piece(res):
        if all(ai == 0 or r % ai == 0 for r, ai in zip(res, col)):
            return one
        return zero_poly

    indicator = QuasiPolynomial(t, period, provider=indicator_piece)
    zero = qp_zero(t)
    sig_ray = tuple(p.side(col) for p in arr.planes)
    sig_origin = (0,) * len(arr.planes)

    def provider(sig):
        if sig == sig_ray or sig == sig_origin:
            return indicator
        return zero

    return BoxSpline(arr, provider=provider)


def origin_indicator_spline(t: int) -> BoxSpline:
    """The delta at the origin as a box spline (system with no columns)."""
    arr = coordinate_arrangement(t)
    one = qp_constant(t, 1)
    zero = qp_zero(t)

    def provider(sig):
        return one if sig == (0,) * t else zero

    return BoxSpline(arr, provider=provider)


# ---------------------------------------------------------------------------
# Inductive step


class _LiftTables:
    """Per-level precomputation for decomposing [0, Lambda] on each region.

    All rational-form normalisations (the crossing functionals, their pairwise
    differences, and the comparisons defining the minimum) are resolved once
    into arrangement indices with orientations; per-region work is then pure
    sign lookups.
    """

    def __init__(self, G: BoxSpline, a, arr_hat: Arrangement):
        self.G = G
        self.a = tuple(int(v) for v in a)
        self.arr_hat = arr_hat
        gplanes = G.arrangement.planes
        self.g_count = len(gplanes)
        self.g_index_in_hat = [arr_hat.index_of(p) for p in gplanes]
        self.gamma = [p.value(self.a) for p in gplanes]
        # crossing functionals, as indices into gplanes
        self.prim = [i for i, g in enumerate(self.gamma) if g]
        self.coeffs = {
            i: tuple(Fraction(n, self.gamma[i]) for n in gplanes[i].normal)
            for i in self.prim
        }
        self.coord = [
            i for i in self.prim if gplanes[i].coordinate_axis() is not None
        ]
        # sign of lam_i on a region = orient * sig[plane]
        self.self_sign = {
            i: (self.g_index_in_hat[i], 1 if self.gamma[i] > 0 else -1)
            for i in self.prim
        }
        # sign of lam_i - lam_j: normalized difference plane
        self.diff_sign = {}
        for ii, i in enumerate(self.prim):
            for j in self.prim[ii + 1 :]:
                diff = [x - y for x, y in zip(self.coeffs[i], self.coeffs[j])]
                plane, orient = normalize_form(diff)
                if plane is None:
                    self.diff_sign[(i, j)] = None
                else:
                    self.diff_sign[(i, j)] = (arr_hat.index_of(plane), orient)

    def sign_self(self, sig, i) -> int:
        idx, orient = self.self_sign[i]
        return orient * sig[idx]

    def sign_diff(self, sig, i, j) -> int:
        if i == j:
            return 0
        if i < j:
            entry = self.diff_sign[(i, j)]
            flip = 1
        else:
            entry = self.diff_sign[(j, i)]
            flip = -1
        if entry is None:
            return 0
        idx, orient = entry
        return flip * orient * sig[idx]

    def segments(self, sig):
        """(kind, lower, upper, G-piece) covering N intersect [0, Lambda(x)].

        An optional half-open head [0, v1), one singleton per distinct
        crossing value, and the open gaps in between; the last crossing value
        is always Lambda itself (the minimizing coordinate plane crosses
        there).
        """
        lam_min = self.coord[0]
        for i in self.coord[1:]:
            if self.sign_diff(sig, i, lam_min) < 0:
                lam_min = i
        window = [
            i
            for i in self.prim
            if self.sign_self(sig, i) >= 0 and self.sign_diff(sig, i, lam_min) <= 0
        ]
        classes: list[list] = []
        for i in window:
            for cls in classes:
                if self.sign_diff(sig, i, cls[0]) == 0:
                    cls.append(i)
                    break
            else:
                classes.append([i])
        reps = [cls[0] for cls in classes]
        reps.sort(key=cmp_to_key(lambda x, y: self.sign_diff(sig, x, y)))

        raw = []
        if self.sign_self(sig, reps[0]) > 0:
            raw.append(("head", None, reps[0]))
        for idx, v in enumerate(reps):
            raw.append(("point", v, v))
            if idx + 1 < len(reps):
                raw.append(("open", v, reps[idx + 1]))

        out = []
        for kind, lo, hi in raw:
            sig_g = []
            for p_idx in range(self.g_count):
                if self.gamma[p_idx] == 0:
                    sig_g.append(sig[self.g_index_in_hat[p_idx]])
                    continue
                if kind == "point":
                    rel = self.sign_diff(sig, p_idx, hi)
                else:
                    if self.sign_diff(sig, p_idx, hi) >= 0:
                        rel = 1
                    elif (lo is not None and self.sign_diff(sig, p_idx, lo) <= 0) or (
                        lo is None and self.sign_self(sig, p_idx) < 0
                    ):
                        rel = -1
                    else:
                        raise ConsistencyError(
                            "crossing functional falls strictly inside an open segment"
                        )
                sig_g.append((1 if self.gamma[p_idx] > 0 else -1) * rel)
            lo_c = None if lo is None else self.coeffs[lo]
            hi_c = self.coeffs[hi]
            out.append((kind, lo_c, hi_c, self.G.piece_for(tuple(sig_g))))
        return out


def _lift_spline(G: BoxSpline, a) -> BoxSpline:
    """Spline of S(x) = sum_{0 <= lam <= Lambda(x)} G(x - lam*a)."""
    t = G.dimension
    arr_hat = extend_arrangement(G.arrangement, a)
    tables = _LiftTables(G, a, arr_hat)

    def provider(sig):
        # adjacent segments that keep the same inner piece produce cancelling
        # half-open sums; accumulate signed multiplicities per (piece, bound,
        # inclusivity) signature and only realise the survivors
        wanted: dict = {}
        leaves: dict = {}

        def request(sign, leaf, u_coeffs, inclusive):
            u_coeffs = tuple(Fraction(c) for c in u_coeffs)
            key = (id(leaf), u_coeffs, inclusive)
            leaves[key] = (leaf, u_coeffs, inclusive)
            wanted[key] = wanted.get(key, 0) + sign

        for kind, lo, hi, piece in tables.segments(sig):
            # one level of flattening: each inner term is summed with its own
            # (usually much smaller) class modulus along a
            for sign, leaf in qp_leaf_terms(piece):
                if leaf.is_zero_constant():
                    continue
                if kind == "head":
                    request(sign, leaf, hi, False)
                elif kind == "point":
                    request(sign, leaf, hi, True)
                    request(-sign, leaf, hi, False)
                else:
                    request(sign, leaf, hi, False)
                    request(-sign, leaf, lo, True)
        terms = []
        for key, mult in wanted.items():
            if mult == 0:
                continue
            leaf, u_coeffs, inclusive = leaves[key]
            hs = _half_sum(leaf, a, u_coeffs, inclusive)
            sgn = 1 if mult > 0 else -1
            for _ in range(abs(mult)):
                terms.append((sgn, hs))
        return qp_sum_terms(terms, t)

    return BoxSpline(arr_hat, provider=provider)


_SPLINE_CACHE: dict = {}


def _spline_for_columns(t: int, cols: tuple) -> BoxSpline:
    key = (t, cols)
    spline = _SPLINE_CACHE.get(key)
    if spline is None:
        if len(cols) == 1:
            spline = _ray_spline(t, cols[0])
        else:
            spline = _lift_spline(_spline_for_columns(t, cols[1:]), cols[0])
        _SPLINE_CACHE[key] = spline
    return spline


def box_spline_of_system(sys: DiophantineSystem) -> BoxSpline:
    """The counting map n |-> #{x in N^k : Ax = n} as a BoxSpline.

    Requires offset zero: shifted systems are evaluated as spline(n - offset)
    by the language layer, which keeps this construction homogeneous.
    """
    if any(sys.offset):
        raise ValueError("box_spline_of_system requires a zero offset")
    return _spline_for_columns(sys.rows, tuple(sys.columns()))
