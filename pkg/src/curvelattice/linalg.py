"""Exact linear algebra over Gram matrices.

Everything here runs on ``int`` or ``Fraction`` entries; there is no floating
point path.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .config import Configuration, GramMatrix, QDivisor, gram_matrix

NEGATIVE_DEFINITE = "negative_definite"
SEMIDEFINITE_DEGENERATE = "negative_semidefinite_degenerate"
INDEFINITE = "indefinite_or_other"


class SingularMatrixError(ArithmeticError):
    pass


class HypothesisError(ValueError):
    """A lemma's hypothesis does not hold for the given input."""


def _as_rows(m) -> list[list]:
    if isinstance(m, GramMatrix):
        return m.rows()
    return [list(row) for row in m]


def _integral(rows) -> list[list]:
    """Rows as ints when every entry is integral, else as Fractions."""
    if all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1) for row in rows for x in row):
        return [[int(x) for x in row] for row in rows]
    return [[Fraction(x) for x in row] for row in rows]


def _div(v, d):
    return v // d if isinstance(v, int) and isinstance(d, int) else v / d


def bareiss_minors(rows: Sequence[Sequence]) -> list:
    """Leading principal minors via fraction-free elimination without pivoting.

    Stops early (returning the minors computed so far followed by a zero) as
    soon as a leading minor vanishes.
    """
    a = _integral(rows)
    n = len(a)
    minors = []
    prev = 1
    for k in range(n):
        piv = a[k][k]
        minors.append(piv)
        if piv == 0:
            return minors
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, n):
                row_i[j] = _div(piv * row_i[j] - aik * row_k[j], prev)
        prev = piv
    return minors


def determinant(m) -> Fraction:
    """Exact determinant by Bareiss elimination with row pivoting."""
    a = _integral(_as_rows(m))
    n = len(a)
    if n == 0:
        return Fraction(1)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        piv = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                a[i][j] = _div(piv * a[i][j] - aik * a[k][j], prev)
        prev = piv
    return Fraction(sign * a[n - 1][n - 1])


def is_negative_definite(m) -> bool:
    """Sylvester's criterion on -m; the fast path used by searches."""
    rows = _as_rows(m)
    if not rows:
        return True
    minors = bareiss_minors([[-x for x in row] for row in rows])
    return len(minors) == len(rows) and all(x > 0 for x in minors)


def solve(m, rhs: Sequence, indices: Sequence[int] | None = None) -> list[Fraction]:
    """Solve the principal subsystem on ``indices`` exactly.

    Raises SingularMatrixError when that submatrix is singular.
    """
    rows = _as_rows(m)
    idx = list(range(len(rows))) if indices is None else list(indices)
    if len(rhs) != len(idx):
        raise ValueError("right-hand side length does not match the index set")
    n = len(idx)
    a = [[Fraction(rows[i][j]) for j in idx] + [Fraction(rhs[k])] for k, i in enumerate(idx)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("singular system")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / pv
                rr, rc = a[r], a[col]
                for c in range(col, n + 1):
                    rr[c] -= f * rc[c]
    return [a[i][n] / a[i][i] for i in range(n)]


def nullspace(m) -> list[list[Fraction]]:
    """Basis of the kernel via reduced row echelon form."""
    a = [[Fraction(x) for x in row] for row in _as_rows(m)]
    n_rows = len(a)
    n_cols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][f]
        basis.append(normalize_kernel_vector(v))
    return basis


def normalize_kernel_vector(v: Sequence[Fraction]) -> list[Fraction]:
    """Scale so the smallest nonzero |entry| is 1 and the entry sum is >= 0."""
    nz = [abs(x) for x in v if x != 0]
    if not nz:
        return list(v)
    scale = min(nz)
    out = [Fraction(x) / scale for x in v]
    total = sum(out)
    if total < 0 or (total == 0 and next(x for x in out if x != 0) < 0):
        out = [-x for x in out]
    return out


@dataclass(frozen=True)
class Definiteness:
    kind: str
    kernel: tuple = ()

    @property
    def negative_definite(self) -> bool:
        return self.kind == NEGATIVE_DEFINITE

    @property
    def semidefinite(self) -> bool:
        return self.kind in (NEGATIVE_DEFINITE, SEMIDEFINITE_DEGENERATE)


def _psd_radical_dim(a: list[list[Fraction]]) -> int | None:
    """Symmetric elimination with diagonal pivoting on a = -m.

    Returns the radical dimension when a is positive semidefinite, else None.
    """
    a = [row[:] for row in a]
    active = list(range(len(a)))
    while active:
        best = max(active, key=lambda i: a[i][i])
        piv = a[best][best]
        if piv > 0:
            active.remove(best)
            rb = a[best]
            for i in active:
                f = a[i][best] / piv
                if f:
                    ri = a[i]
                    for j in active:
                        ri[j] -= f * rb[j]
            continue
        if piv < 0:
            return None
        # every remaining diagonal entry is zero
        if any(a[i][j] != 0 for i in active for j in active):
            return None
        return len(active)
    return 0


def definiteness(m: GramMatrix) -> Definiteness:
    rows = m.rows()
    neg = [[-Fraction(x) for x in row] for row in rows]
    dim = _psd_radical_dim(neg)
    if dim is None:
        return Definiteness(INDEFINITE)
    if dim == 0:
        return Definiteness(NEGATIVE_DEFINITE)
    kernel = tuple(QDivisor(zip(m.labels, v)) for v in nullspace(rows))
    if len(kernel) != dim:
        raise ArithmeticError("radical dimension mismatch")
    return Definiteness(SEMIDEFINITE_DEGENERATE, kernel)


def has_positive_square(m) -> bool:
    """True when some rational vector has positive self-pairing."""
    rows = _as_rows(m)
    return _psd_radical_dim([[-Fraction(x) for x in row] for row in rows]) is None


def weight_relaxation_bound(cfg: Configuration, k, distinguished=None):
    """Largest m with the determinant sign condition kept when G_k^2 = -m.

    All other weights are set to -2. ``distinguished`` is the node left out of
    the definite block (the first curve by default). Returns ``math.inf`` when
    every large m qualifies and ``None`` when no positive m qualifies.
    """
    labels = list(cfg.labels)
    if len(labels) < 2:
        raise HypothesisError("need at least two curves")
    if k not in cfg:
        raise HypothesisError(f"unknown curve {k!r}")
    d0 = labels[0] if distinguished is None else distinguished
    if d0 not in cfg:
        raise HypothesisError(f"unknown curve {d0!r}")
    if any(c.self_int > -2 for c in cfg.curves):
        raise HypothesisError("every curve must have square <= -2")
    n = len(labels) - 1
    base = gram_matrix(cfg).rows()
    pos = labels.index(k)
    zero = labels.index(d0)
    block = [i for i in range(len(labels)) if i != zero]

    def relaxed(mval):
        rows = [row[:] for row in base]
        for i in range(len(labels)):
            rows[i][i] = Fraction(-2)
        rows[pos][pos] = Fraction(-mval)
        return rows

    def block_definite(mval):
        rows = relaxed(mval)
        return is_negative_definite([[rows[i][j] for j in block] for i in block])

    if not block_definite(2):
        raise HypothesisError("the block without the distinguished curve is not negative definite")
    sign = 1 if n % 2 == 0 else -1
    # det is affine in the single relaxed diagonal entry
    d1 = determinant(relaxed(1))
    d2 = determinant(relaxed(2))
    slope = d2 - d1
    intercept = d1 - slope

    def ok(mval):
        return block_definite(mval) and sign * (intercept + slope * mval) > 0

    # smallest m keeping the block definite; definiteness is monotone in m
    lo = 1
    while not block_definite(lo):
        lo += 1
    if sign * slope > 0:
        return math.inf
    if sign * slope == 0:
        return math.inf if ok(lo) else None
    # sign condition holds exactly for m < -intercept/slope
    root = Fraction(-intercept) / slope
    top = math.ceil(root) - 1
    if top < lo or not ok(top):
        return None
    return top
