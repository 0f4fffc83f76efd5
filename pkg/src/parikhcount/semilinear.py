"""Linear, semilinear and semi-simple subsets of N^k, with exact decomposition.

A linear set is base + (periods)*; it is *simple* when the periods are
linearly independent over the rationals, which makes every member's
multiplicity vector unique.  ``decompose_semisimple`` rewrites any finite
union of linear sets as a finite union of simple sets that are pairwise
disjoint:

* dependent periods are split away by a bounded case analysis on an integer
  relation between them (each case drops one period), until simple;
* components are made disjoint left to right: membership in a simple set is a
  conjunction of rational equalities, inequalities and integrality conditions
  on the unique multiplicity functionals, so a difference splits into finitely
  many disjoint branches; each branch is a system of linear Diophantine
  constraints whose solution set is rebuilt from its minimal solutions and
  Hilbert basis (Contejean-Devie completion).

The case analysis can cascade, so the worklist carries a generation counter
with a configurable cap; exceeding it raises instead of silently truncating.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm


class DecompositionDepthError(RuntimeError):
    """The disjointification worklist exceeded its generation cap."""


@dataclass(frozen=True)
class LinearSet:
    """base + N-combinations of the period vectors."""

    dim: int
    base: tuple
    periods: tuple

    def __init__(self, dim, base, periods):
        base = tuple(int(v) for v in base)
        if len(base) != dim or any(v < 0 for v in base):
            raise ValueError("base must be a non-negative vector of the right dimension")
        seen = []
        for p in periods:
            p = tuple(int(v) for v in p)
            if len(p) != dim:
                raise ValueError("period dimension mismatch")
            if any(v < 0 for v in p):
                raise ValueError("periods must be non-negative")
            if not any(p):
                raise ValueError("zero period")
            if p not in seen:
                seen.append(p)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "periods", tuple(sorted(seen)))


@dataclass(frozen=True)
class SemilinearSet:
    """Finite union of linear sets of one dimension."""

    dim: int
    components: tuple

    def __init__(self, dim, components):
        components = tuple(components)
        for c in components:
            if c.dim != dim:
                raise ValueError("component dimension mismatch")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "components", components)


@dataclass(frozen=True)
class SemiSimpleSet:
    """Finite union of simple sets, pairwise disjoint."""

    dim: int
    components: tuple

    def __init__(self, dim, components):
        components = tuple(components)
        for c in components:
            if c.dim != dim:
                raise ValueError("component dimension mismatch")
            if not is_simple(c):
                raise ValueError("component is not simple")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "components", components)

    def as_semilinear(self) -> SemilinearSet:
        return SemilinearSet(self.dim, self.components)


# ---------------------------------------------------------------------------
# Membership


def linear_member(l: LinearSet, v) -> bool:
    v = tuple(int(x) for x in v)
    if len(v) != l.dim:
        raise ValueError("dimension mismatch")
    residual = [a - b for a, b in zip(v, l.base)]
    if any(r < 0 for r in residual):
        return False
    return _member_rec(l.periods, 0, residual)


def _member_rec(periods, j, residual) -> bool:
    if all(r == 0 for r in residual):
        return True
    if j == len(periods):
        return False
    p = periods[j]
    bound = None
    for pi, ri in zip(p, residual):
        if pi:
            b = ri // pi
            bound = b if bound is None else min(bound, b)
    for mult in range(bound + 1):
        rest = [ri - mult * pi for ri, pi in zip(residual, p)]
        if all(r >= 0 for r in rest) and _member_rec(periods, j + 1, rest):
            return True
    return False


def sl_member(s: SemilinearSet, v) -> bool:
    """Membership by bounded search over period multiplicities."""
    return any(linear_member(c, v) for c in s.components)


# ---------------------------------------------------------------------------
# Exact linear algebra over the rationals


def rational_rank(vectors) -> int:
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    rank = 0
    cols = len(rows[0]) if rows else 0
    pivot_col = 0
    r = 0
    while r < len(rows) and pivot_col < cols:
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][pivot_col]:
                pivot = i
                break
        if pivot is None:
            pivot_col += 1
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][pivot_col]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][pivot_col]:
                f = rows[i][pivot_col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        rank += 1
        pivot_col += 1
    return rank


def is_simple(l: LinearSet) -> bool:
    """Simplicity = rational linear independence of the period vectors.

    For non-negative periods this is equivalent to the period monoid being
    free on them with unambiguous sums: a rational dependency rearranges into
    two distinct N-combinations of the same point.
    """
    if not l.periods:
        return True
    return rational_rank(l.periods) == len(l.periods)


def _integer_kernel_vector(periods):
    """A nonzero integer vector r with sum r_i * periods_i = 0, or None."""
    n = len(periods)
    dim = len(periods[0])
    # reduce the matrix whose columns are the periods; track a kernel vector
    rows = [[Fraction(periods[j][i]) for j in range(n)] for i in range(dim)]
    pivots = {}
    r = 0
    for col in range(n):
        pivot = None
        for i in range(r, dim):
            if rows[i][col]:
                pivot = i
                break
        if pivot is None:
            # free column: kernel vector with 1 here, back-substituted pivots
            vec = [Fraction(0)] * n
            vec[col] = Fraction(1)
            for pcol, prow in pivots.items():
                vec[pcol] = -rows[prow][col]
            denom = 1
            for x in vec:
                denom = lcm(denom, x.denominator)
            ints = [int(x * denom) for x in vec]
            g = 0
            for x in ints:
                g = gcd(g, abs(x))
            return [x // g for x in ints]
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][col]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(dim):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots[col] = r
        r += 1
    return None


def _simplify_linear(l: LinearSet):
    """Simple sets covering l (union equals l; pieces may overlap).

    While the periods satisfy an integer relation sum_{i in P} r_i b_i =
    sum_{i in Q} (-r_i) b_i, every member has a representation in which some
    i in P carries multiplicity < r_i; casing on that index and value drops
    one period per branch.
    """
    if is_simple(l):
        return [l]
    r = _integer_kernel_vector(l.periods)
    pos = [i for i, v in enumerate(r) if v > 0]
    neg = [i for i, v in enumerate(r) if v < 0]
    if not pos:
        pos, neg = neg, pos
        r = [-v for v in r]
    # with non-negative nonzero periods both sides are nonempty
    out = []
    for i in pos:
        for mult in range(r[i]):
            base = tuple(b + mult * p for b, p in zip(l.base, l.periods[i]))
            rest = l.periods[:i] + l.periods[i + 1 :]
            out.extend(_simplify_linear(LinearSet(l.dim, base, rest)))
    return out


# ---------------------------------------------------------------------------
# Minimal solutions and Hilbert bases (Contejean-Devie completion)


def solve_nat_system(rows, rhs, node_cap: int = 2_000_000):
    """Non-negative integer solutions of (rows) z = rhs.

    Returns (minimal_solutions, hilbert_basis): the solution set is exactly
    the union over minimal solutions w of w + (hilbert basis)*.  Implemented
    by homogenising with an extra variable multiplying -rhs and running the
    Contejean-Devie completion from the unit vectors.
    """
    n_rows = len(rows)
    n_vars = len(rows[0]) if rows else 0
    cols = [tuple(rows[i][j] for i in range(n_rows)) for j in range(n_vars)]
    cols.append(tuple(-v for v in rhs))
    n = n_vars + 1
    basis = []
    frontier = []
    seen = set()
    for i in range(n):
        z = [0] * n
        z[i] = 1
        frontier.append((tuple(z), cols[i]))
        seen.add(tuple(z))
    nodes = 0
    while frontier:
        new_frontier = []
        for z, defect in frontier:
            nodes += 1
            if nodes > node_cap:
                raise DecompositionDepthError("Hilbert completion exceeded node cap")
            if all(v == 0 for v in defect):
                basis.append(z)
                continue
            for i in range(n):
                # move only toward the origin of the defect
                dot = sum(a * b for a, b in zip(defect, cols[i]))
                if dot >= 0:
                    continue
                z2 = list(z)
                z2[i] += 1
                z2 = tuple(z2)
                if z2 in seen:
                    continue
                if any(all(b[j] <= z2[j] for j in range(n)) for b in basis):
                    continue
                seen.add(z2)
                new_frontier.append((z2, tuple(a + b for a, b in zip(defect, cols[i]))))
        frontier = new_frontier
    # minimality filter (defensive; completion order already prunes most)
    basis = [
        b
        for b in basis
        if not any(
            b2 != b and all(x <= y for x, y in zip(b2, b)) for b2 in basis
        )
    ]
    minimal = [b[:n_vars] for b in basis if b[n_vars] == 1]
    homogeneous = [b[:n_vars] for b in basis if b[n_vars] == 0 and any(b[:n_vars])]
    return minimal, homogeneous


def _linear_intersects(s1: LinearSet, s2: LinearSet) -> bool:
    """Whether two linear sets share a point (exact)."""
    rows = []
    for i in range(s1.dim):
        row = [p[i] for p in s1.periods] + [-p[i] for p in s2.periods]
        rows.append(row)
    rhs = [b2 - b1 for b1, b2 in zip(s1.base, s2.base)]
    minimal, _ = solve_nat_system(rows, rhs)
    return bool(minimal) or all(v == 0 for v in rhs)


# ---------------------------------------------------------------------------
# Membership conditions of a simple set, as constraints on multiplicities


def _affine_sub(f1, f2):
    return tuple(a - b for a, b in zip(f1, f2))


def _membership_atoms(target: LinearSet, host: LinearSet):
    """Conditions on the multiplicity vector m of ``target`` for membership
    of its point x(m) = base + periods . m in the simple set ``host``.

    Each atom is ('eq'|'ge'|'int', affine form over m as (coeff tuple, const)
    of Fractions).  Solving host's period matrix for the unique candidate
    multiplicities gives: consistency equalities for the rows outside the
    pivot set, then non-negativity and integrality of each candidate.
    """
    k = target.dim
    n_t = len(target.periods)
    n_h = len(host.periods)
    # y(m) = (base_t - base_h) + periods_t . m, one affine form per coordinate
    y = []
    for i in range(k):
        coeffs = tuple(Fraction(p[i]) for p in target.periods)
        const = Fraction(target.base[i] - host.base[i])
        y.append((coeffs, const))
    if n_h == 0:
        return [("eq", form) for form in y]
    # row-reduce host's period matrix, carrying the affine forms along
    rows = [[Fraction(p[i]) for p in host.periods] for i in range(k)]
    forms = list(y)
    pivots = []
    r = 0
    for col in range(n_h):
        pivot = None
        for i in range(r, k):
            if rows[i][col]:
                pivot = i
                break
        if pivot is None:
            raise ValueError("host set is not simple")
        rows[r], rows[pivot] = rows[pivot], rows[r]
        forms[r], forms[pivot] = forms[pivot], forms[r]
        pv = rows[r][col]
        rows[r] = [x / pv for x in rows[r]]
        forms[r] = (tuple(c / pv for c in forms[r][0]), forms[r][1] / pv)
        for i in range(k):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x - f * z for x, z in zip(rows[i], rows[r])]
                forms[i] = (
                    _affine_sub(forms[i][0], tuple(f * c for c in forms[r][0])),
                    forms[i][1] - f * forms[r][1],
                )
        pivots.append(col)
        r += 1
    atoms = []
    # rows beyond the pivot count must vanish (span conditions)
    for i in range(n_h, k):
        atoms.append(("eq", forms[i]))
    # candidate multiplicity of host period (pivot row r solves column r)
    for i in range(n_h):
        atoms.append(("ge", forms[i]))
        atoms.append(("int", forms[i]))
    return atoms


def _scale_form(form):
    coeffs, const = form
    denom = 1
    for c in coeffs:
        denom = lcm(denom, c.denominator)
    denom = lcm(denom, const.denominator)
    return tuple(int(c * denom) for c in coeffs), int(const * denom), denom


def _subtract_simple(target: LinearSet, hosts, branch_cap: int = 50_000):
    """target minus the union of the (simple) hosts, as disjoint linear sets.

    Branches are conjunctions over m-space (the target's multiplicities, a
    bijective parameterisation since target is simple): the first failing
    atom per host, with equalities split two-sided and integrality failures
    split by residue, so distinct branches are disjoint.
    """
    n = len(target.periods)
    branches = [[]]
    for host in hosts:
        atoms = _membership_atoms(target, host)
        new_branches = []
        for prefix in branches:
            for fail_idx in range(len(atoms)):
                held = [("pos", atoms[i]) for i in range(fail_idx)]
                kind, form = atoms[fail_idx]
                if kind == "eq":
                    new_branches.append(prefix + held + [("lt", form)])
                    new_branches.append(prefix + held + [("gt", form)])
                elif kind == "ge":
                    new_branches.append(prefix + held + [("lt", form)])
                else:
                    new_branches.append(prefix + held + [("notint", form)])
            if len(new_branches) > branch_cap:
                raise DecompositionDepthError("difference case analysis exploded")
        branches = new_branches
    pieces = []
    for branch in branches:
        pieces.extend(_solve_branch(target, branch))
    return pieces


def _solve_branch(target: LinearSet, branch):
    """Solve one conjunction of constraints over the target's multiplicities."""
    n = len(target.periods)
    eqs = []       # integer (coeffs, const): == 0
    ineqs = []     # integer (coeffs, const): >= 0
    congs = []     # (coeffs, const, modulus): == 0 mod modulus
    anticongs = [] # (coeffs, const, modulus): != 0 mod modulus
    for tag, item in branch:
        if tag == "pos":
            kind, form = item
            w, c0, q = _scale_form(form)
            if kind == "eq":
                eqs.append((w, c0))
            elif kind == "ge":
                ineqs.append((w, c0))
            else:
                if q > 1:
                    congs.append((w, c0, q))
        else:
            w, c0, q = _scale_form(item)
            if tag == "lt":
                ineqs.append((tuple(-v for v in w), -c0 - 1))
            elif tag == "gt":
                ineqs.append((w, c0 - 1))
            else:  # notint
                if q == 1:
                    return []
                anticongs.append((w, c0, q))
    moduli = [q for _, _, q in congs] + [q for _, _, q in anticongs]
    support = set()
    for w, _, _ in congs + anticongs:
        support.update(i for i, v in enumerate(w) if v)
    step = [1] * n
    if moduli:
        d = 1
        for q in moduli:
            d = lcm(d, q)
        for i in support:
            step[i] = d
    pieces = []
    for rho in _residue_vectors(step):
        ok = True
        for w, c0, q in congs:
            if (sum(a * b for a, b in zip(w, rho)) + c0) % q:
                ok = False
                break
        if ok:
            for w, c0, q in anticongs:
                if (sum(a * b for a, b in zip(w, rho)) + c0) % q == 0:
                    ok = False
                    break
        if not ok:
            continue
        # substitute m = rho + step * mhat
        sub_eqs = []
        for w, c0 in eqs:
            coeffs = tuple(wi * si for wi, si in zip(w, step))
            const = sum(a * b for a, b in zip(w, rho)) + c0
            sub_eqs.append((coeffs, const))
        sub_ineqs = []
        for w, c0 in ineqs:
            coeffs = tuple(wi * si for wi, si in zip(w, step))
            const = sum(a * b for a, b in zip(w, rho)) + c0
            sub_ineqs.append((coeffs, const))
        pieces.extend(_polyhedron_pieces(target, rho, step, sub_eqs, sub_ineqs))
    return pieces


def _residue_vectors(step):
    if not step:
        yield ()
        return
    for rest in _residue_vectors(step[1:]):
        for r in range(step[0]):
            yield (r,) + rest


def _polyhedron_pieces(target: LinearSet, rho, step, eqs, ineqs):
    """Integer solutions of the constraint system, mapped back to x-space.

    Solutions in mhat >= 0 of eqs == 0 and ineqs >= 0 are the union over
    minimal solutions of translates of the Hilbert basis monoid; slack
    variables turn inequalities into equalities.
    """
    n = len(target.periods)
    n_slack = len(ineqs)
    rows = []
    rhs = []
    for coeffs, const in eqs:
        rows.append(list(coeffs) + [0] * n_slack)
        rhs.append(-const)
    for idx, (coeffs, const) in enumerate(ineqs):
        slack = [0] * n_slack
        slack[idx] = -1
        rows.append(list(coeffs) + slack)
        rhs.append(-const)
    if not rows:
        # unconstrained: the whole residue class
        base_m = rho
        period_m = [tuple(step[i] if j == i else 0 for i in range(n)) for j in range(n) if step[j]]
        return [_map_back(target, base_m, period_m)]
    minimal, homogeneous = solve_nat_system(rows, rhs)
    pieces = []
    hom_m = []
    for h in homogeneous:
        vec = tuple(hi * si for hi, si in zip(h[:n], step))
        if any(vec):
            hom_m.append(vec)
    for w in minimal:
        base_m = tuple(r + wi * si for r, wi, si in zip(rho, w[:n], step))
        pieces.append(_map_back(target, base_m, hom_m))
    return pieces


def _map_back(target: LinearSet, base_m, periods_m) -> LinearSet:
    k = target.dim
    base = list(target.base)
    for mult, p in zip(base_m, target.periods):
        for i in range(k):
            base[i] += mult * p[i]
    periods = []
    for pm in periods_m:
        vec = [0] * k
        for mult, p in zip(pm, target.periods):
            for i in range(k):
                vec[i] += mult * p[i]
        if any(vec):
            periods.append(tuple(vec))
    return LinearSet(k, tuple(base), tuple(set(periods)))


# ---------------------------------------------------------------------------
# The decomposition


def decompose_semisimple(s: SemilinearSet, depth_cap: int = 12) -> SemiSimpleSet:
    """Equal semi-simple presentation: simple components, pairwise disjoint.

    Components are simplified, then subtracted against everything accepted so
    far; difference pieces re-enter the worklist with an incremented
    generation (the cap turns runaway case analyses into a diagnostic error).
    """
    from collections import deque

    acc: list[LinearSet] = []
    work = deque((c, 0) for c in s.components)
    while work:
        current, gen = work.popleft()
        if gen > depth_cap:
            raise DecompositionDepthError(
                f"decomposition exceeded depth cap {depth_cap}"
            )
        for simple in _simplify_linear(current):
            overlaps = [a for a in acc if _linear_intersects(simple, a)]
            if not overlaps:
                acc.append(simple)
                continue
            pieces = _subtract_simple(simple, overlaps)
            for piece in reversed(pieces):
                work.appendleft((piece, gen + 1))
    acc.sort(key=lambda l: (l.base, l.periods))
    return SemiSimpleSet(s.dim, tuple(acc))


# ---------------------------------------------------------------------------
# Semilinear algebra (union, Minkowski sum, star) used by the Parikh pipeline


def sl_empty(dim: int) -> SemilinearSet:
    return SemilinearSet(dim, ())


def sl_singleton(v) -> SemilinearSet:
    v = tuple(int(x) for x in v)
    return SemilinearSet(len(v), (LinearSet(len(v), v, ()),))


def sl_union(*sets) -> SemilinearSet:
    dim = sets[0].dim
    comps = []
    for s in sets:
        comps.extend(s.components)
    return sl_compact(SemilinearSet(dim, comps))


def sl_sum(s1: SemilinearSet, s2: SemilinearSet) -> SemilinearSet:
    """Minkowski sum."""
    comps = []
    for a in s1.components:
        for b in s2.components:
            base = tuple(x + y for x, y in zip(a.base, b.base))
            comps.append(LinearSet(s1.dim, base, a.periods + b.periods))
    return sl_compact(SemilinearSet(s1.dim, comps))


def sl_star(s: SemilinearSet) -> SemilinearSet:
    """All finite sums of elements (the submonoid generated by the set).

    For one linear set: {0} union (base + ({base} union periods)*); for a
    union, the star is the Minkowski product of the component stars.
    """
    out = sl_singleton((0,) * s.dim)
    for c in s.components:
        extra = c.periods if not any(c.base) else c.periods + (c.base,)
        starred = SemilinearSet(
            s.dim,
            (
                LinearSet(s.dim, (0,) * s.dim, ()),
                LinearSet(s.dim, c.base, extra),
            ),
        )
        out = sl_sum(out, starred)
    return sl_compact(out)


def sl_scale_members(s: SemilinearSet, count: int) -> SemilinearSet:
    """Minkowski sum of ``count`` independent copies."""
    out = sl_singleton((0,) * s.dim)
    for _ in range(count):
        out = sl_sum(out, s)
    return out


def sl_compact(s: SemilinearSet) -> SemilinearSet:
    """Drop duplicate components and components absorbed by another.

    Absorption check: the base lies in the other component and every period
    is generated by the other's periods (bounded search); sound pruning only.
    """
    comps = list(dict.fromkeys(s.components))
    out = []
    for i, c in enumerate(comps):
        absorbed = False
        for j, other in enumerate(comps):
            if i == j:
                continue
            if _linear_absorbs(other, c) and not (
                _linear_absorbs(c, other) and j > i
            ):
                absorbed = True
                break
        if not absorbed:
            out.append(c)
    return SemilinearSet(s.dim, tuple(out))


def _linear_absorbs(host: LinearSet, sub: LinearSet) -> bool:
    if not linear_member(host, sub.base):
        return False
    zero_host = LinearSet(host.dim, (0,) * host.dim, host.periods)
    return all(linear_member(zero_host, p) for p in sub.periods)


# ---------------------------------------------------------------------------
# File format


def parse_semilinear(text: str) -> SemilinearSet:
    """Parse the set file format: a 'dim k' line, then one component per line
    as 'base: v1 .. vk ; periods: p11 .. p1k | p21 .. p2k | ...'."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty set file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "dim":
        raise ValueError(f"line 1: expected 'dim k', got {lines[0]!r}")
    dim = int(head[1])
    comps = []
    for ln_no, ln in enumerate(lines[1:], start=2):
        if not ln.startswith("base:"):
            raise ValueError(f"line {ln_no}: expected 'base:' entry")
        body = ln[len("base:") :]
        if ";" in body:
            base_part, periods_part = body.split(";", 1)
            periods_part = periods_part.strip()
            if not periods_part.startswith("periods:"):
                raise ValueError(f"line {ln_no}: expected 'periods:' after ';'")
            periods_part = periods_part[len("periods:") :]
        else:
            base_part, periods_part = body, ""
        base = tuple(int(v) for v in base_part.split())
        periods = []
        for chunk in periods_part.split("|"):
            chunk = chunk.strip()
            if chunk:
                periods.append(tuple(int(v) for v in chunk.split()))
        comps.append(LinearSet(dim, base, tuple(periods)))
    return SemilinearSet(dim, tuple(comps))


def format_semilinear(s: SemilinearSet) -> str:
    lines = [f"dim {s.dim}"]
    for c in s.components:
        base = " ".join(map(str, c.base))
        if c.periods:
            periods = " | ".join(" ".join(map(str, p)) for p in c.periods)
            lines.append(f"base: {base} ; periods: {periods}")
        else:
            lines.append(f"base: {base}")
    return "\n".join(lines) + "\n"
