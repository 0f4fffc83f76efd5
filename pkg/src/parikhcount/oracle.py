"""Brute-force ground truth, independent of the constructions it validates.

Everything here is exhaustive enumeration with plain integer arithmetic.  The
box-table variants exist only to make acceptance sweeps affordable; they are
themselves enumeration and are cross-checked against the per-point versions in
the test suite before anything relies on them.
"""

from __future__ import annotations

import numpy as np


def count_system_brute(sys, n) -> int:
    """Exact number of x in N^k with A x + offset = n, by nested enumeration.

    Column j's multiplier is bounded by the residual right-hand side divided
    by any positive entry of the column; the last column is closed by a
    divisibility check instead of a loop.
    """
    n = tuple(int(v) for v in n)
    if len(n) != sys.rows:
        raise ValueError("right-hand side length does not match system")
    residual = [ni - ci for ni, ci in zip(n, sys.offset)]
    if any(v < 0 for v in residual):
        return 0
    cols = sys.columns()
    return _count_rec(cols, 0, residual)


def _count_rec(cols, j, residual) -> int:
    if j == len(cols) - 1:
        return 1 if _on_column(cols[j], residual) else 0
    col = cols[j]
    bound = None
    for ci, ri in zip(col, residual):
        if ci:
            b = ri // ci
            bound = b if bound is None else min(bound, b)
    total = 0
    for mult in range(bound + 1):
        rest = [ri - mult * ci for ri, ci in zip(residual, col)]
        total += _count_rec(cols, j + 1, rest)
    return total


def _on_column(col, residual) -> bool:
    mult = None
    for ci, ri in zip(col, residual):
        if ci == 0:
            if ri != 0:
                return False
        else:
            if ri % ci:
                return False
            m = ri // ci
            if mult is None:
                mult = m
            elif m != mult:
                return False
    return mult is not None and mult >= 0


def count_system_box(sys, bounds) -> np.ndarray:
    """Counts for every n with 0 <= n_i <= bounds_i, one enumeration pass.

    Enumerates all x with A x + offset inside the box and bins the results;
    still brute force, just batched.
    """
    bounds = tuple(int(b) for b in bounds)
    if len(bounds) != sys.rows:
        raise ValueError("bounds length does not match system")
    shape = tuple(b + 1 for b in bounds)
    table = np.zeros(shape, dtype=np.int64)
    cols = sys.columns()
    limits = []
    for col in cols:
        lim = None
        for ci, bi, oi in zip(col, bounds, sys.offset):
            if ci:
                avail = bi - oi
                if avail < 0:
                    return table
                b = avail // ci
                lim = b if lim is None else min(lim, b)
        limits.append(lim)
    grids = np.meshgrid(*[np.arange(l + 1) for l in limits], indexing="ij")
    xs = np.stack([g.ravel() for g in grids], axis=1)
    a = np.array(sys.matrix, dtype=np.int64)
    ns = xs @ a.T + np.array(sys.offset, dtype=np.int64)
    mask = np.all(ns <= np.array(bounds), axis=1)
    ns = ns[mask]
    np.add.at(table, tuple(ns.T), 1)
    return table


def count_representations_brute(linear, v) -> int:
    """Number of multiplicity vectors m >= 0 with base + sum m_i p_i = v."""
    v = tuple(int(x) for x in v)
    if len(v) != linear.dim:
        raise ValueError("dimension mismatch")
    residual = [vi - bi for vi, bi in zip(v, linear.base)]
    if any(r < 0 for r in residual):
        return 0
    periods = list(linear.periods)
    return _rep_rec(periods, 0, residual)


def _rep_rec(periods, j, residual) -> int:
    if j == len(periods):
        return 1 if all(r == 0 for r in residual) else 0
    p = periods[j]
    bound = None
    for pi, ri in zip(p, residual):
        if pi:
            b = ri // pi
            bound = b if bound is None else min(bound, b)
    total = 0
    for mult in range(bound + 1):
        rest = [ri - mult * pi for ri, pi in zip(residual, p)]
        total += _rep_rec(periods, j + 1, rest)
    return total


def enumerate_language(bl, maxlen: int) -> set:
    """All words of the bounded language with length <= maxlen.

    Candidates are the block words u1^l1 ... uk^lk within the length budget;
    membership is settled by the chart parser.
    """
    from .grammars import cnf_form, parse_member

    cnf = cnf_form(bl.grammar)
    words = bl.words
    out = set()
    seen = set()
    for exps in _length_bounded_tuples([len(u) for u in words], maxlen):
        w = "".join(u * e for u, e in zip(words, exps))
        if w in seen:
            continue
        seen.add(w)
        if parse_member(cnf, w):
            out.add(w)
    return out


def _length_bounded_tuples(weights, budget):
    if not weights:
        yield ()
        return
    w = weights[0]
    for first in range(budget // w + 1):
        for rest in _length_bounded_tuples(weights[1:], budget - first * w):
            yield (first,) + rest


def census_parikh(bl, box) -> dict:
    """Exact word counts per Parikh vector over the whole box.

    Enumerates block exponent tuples whose letter counts fit the box,
    deduplicates the resulting words, keeps the parser-approved ones and bins
    them by Parikh vector.
    """
    from .grammars import cnf_form, parse_member
    from .langfront import parikh_vector

    alphabet = bl.grammar.terminals
    box = tuple(int(b) for b in box)
    if len(box) != len(alphabet):
        raise ValueError("box length does not match alphabet size")
    cnf = cnf_form(bl.grammar)
    images = [parikh_vector(u, alphabet) for u in bl.words]
    table: dict = {}
    for v in _box_tuples(box):
        table[v] = 0
    seen = set()
    for exps in _psi_bounded_tuples(images, box):
        w = "".join(u * e for u, e in zip(bl.words, exps))
        if w in seen:
            continue
        seen.add(w)
        if parse_member(cnf, w):
            v = parikh_vector(w, alphabet)
            table[v] += 1
    return table


def _box_tuples(box):
    if not box:
        yield ()
        return
    for first in range(box[0] + 1):
        for rest in _box_tuples(box[1:]):
            yield (first,) + rest


def _psi_bounded_tuples(images, box):
    if not images:
        yield ()
        return
    img = images[0]
    bound = None
    for ci, bi in zip(img, box):
        if ci:
            b = bi // ci
            bound = b if bound is None else min(bound, b)
    for first in range(bound + 1):
        rest_box = tuple(bi - first * ci for bi, ci in zip(box, img))
        for rest in _psi_bounded_tuples(images[1:], rest_box):
            yield (first,) + rest
