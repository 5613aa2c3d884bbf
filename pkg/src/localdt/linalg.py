"""Dense Gaussian elimination over Q(s, t1, t2) and over truncated q-series."""

from __future__ import annotations

from typing import Sequence

from .algebra import ONE, ZERO, QSeries, RatFunc


def _weight(x: RatFunc) -> int:
    num, den = x.zpolys
    return len(num) + len(den)


def solve(a: Sequence[Sequence[RatFunc]], b: Sequence[Sequence[RatFunc]]) -> list[list[RatFunc]]:
    """Solve ``a @ x = b`` for square nonsingular ``a``; ``b`` has one row per equation.

    Pivots are chosen to keep the entries small (fewest terms first).
    Raises ``ZeroDivisionError`` when ``a`` is singular.
    """
    n = len(a)
    if n == 0:
        return []
    m = len(b[0])
    rows = [list(a[i]) + list(b[i]) for i in range(n)]
    for col in range(n):
        best, best_w = None, None
        for r in range(col, n):
            if not rows[r][col].is_zero():
                w = _weight(rows[r][col])
                if best is None or w < best_w:
                    best, best_w = r, w
        if best is None:
            raise ZeroDivisionError(f"singular matrix (no pivot in column {col})")
        rows[col], rows[best] = rows[best], rows[col]
        inv = rows[col][col].inverse()
        pivot_row = [x * inv if not x.is_zero() else x for x in rows[col]]
        rows[col] = pivot_row
        for r in range(n):
            if r == col:
                continue
            f = rows[r][col]
            if f.is_zero():
                continue
            rows[r] = [x - f * y if not y.is_zero() else x for x, y in zip(rows[r], pivot_row)]
    return [row[n:n + m] for row in rows]


def inverse(a: Sequence[Sequence[RatFunc]]) -> list[list[RatFunc]]:
    n = len(a)
    eye = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    return solve(a, eye)


def matmul(a: Sequence[Sequence[RatFunc]], b: Sequence[Sequence[RatFunc]]) -> list[list[RatFunc]]:
    out = []
    for row in a:
        new = []
        for j in range(len(b[0])):
            acc = ZERO
            for k, x in enumerate(row):
                if not x.is_zero() and not b[k][j].is_zero():
                    acc = acc + x * b[k][j]
            new.append(acc)
        out.append(new)
    return out


def matvec(a: Sequence[Sequence[RatFunc]], v: Sequence[RatFunc]) -> list[RatFunc]:
    return [row[0] for row in matmul(a, [[x] for x in v])]


# ---------------------------------------------------------------------------
# truncated q-series coefficients


class PrecisionError(ArithmeticError):
    """A series computation needs more q-orders than were supplied."""


def series_solve(a: Sequence[Sequence[QSeries]], b: Sequence[Sequence[QSeries]],
                 need: int | None = None) -> list[list[QSeries]]:
    """Solve ``a @ x = b`` over truncated Laurent series in q.

    Pivots have the smallest available q-valuation; every division by a pivot
    of valuation v costs v orders of precision, and ``QSeries`` tracks that
    loss.  If a column has no pivot that is nonzero to the known precision, or
    the result is known to fewer than ``need`` orders, ``PrecisionError``
    reports the deficit.
    """
    n = len(a)
    if n == 0:
        return []
    m = len(b[0])
    rows = [list(a[i]) + list(b[i]) for i in range(n)]
    for col in range(n):
        best = None
        for r in range(col, n):
            e = rows[r][col]
            if not e.is_zero() and (best is None or e.valuation < rows[best][col].valuation):
                best = r
        if best is None:
            known = min(rows[r][col].truncation for r in range(col, n))
            raise PrecisionError(f"no pivot in column {col} nonzero through q^{known}; "
                                 "the matrix is singular or needs more q-orders")
        rows[col], rows[best] = rows[best], rows[col]
        inv = rows[col][col].inverse()
        pivot_row = [x * inv for x in rows[col]]
        rows[col] = pivot_row
        for r in range(n):
            if r == col or rows[r][col].is_zero():
                continue
            f = rows[r][col]
            rows[r] = [x - f * y for x, y in zip(rows[r], pivot_row)]
    out = [row[n:n + m] for row in rows]
    if need is not None:
        have = min(x.truncation for row in out for x in row)
        if have < need:
            raise PrecisionError(f"solution known through q^{have}, q^{need} requested "
                                 f"(deficit {need - have} orders)")
    return out


def series_inverse(a: Sequence[Sequence[QSeries]], need: int | None = None) -> list[list[QSeries]]:
    n = len(a)
    trunc = min(x.truncation for row in a for x in row)
    eye = [[QSeries.constant(1 if i == j else 0, trunc) for j in range(n)] for i in range(n)]
    return series_solve(a, eye, need)
