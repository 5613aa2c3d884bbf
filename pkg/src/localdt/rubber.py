"""The rubber operator S and the regrading of rubber series.

``S`` is the unique solution of ``q dS/dq = M S - S M(0)`` with ``S(0) = Id``.
The rubber series with a ``1/(1 - psi)`` insertion at the far boundary is
``q^d M(-q)^-(t1+t2) <A|S|B>``; replacing ``1/(1 - psi)`` by
``1/(z - psi)`` is handled by :func:`z_dilate`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .algebra import ONE, ZERO, QSeries, RatFunc, T1, T2, as_ratfunc, homogeneous_components, macmahon_neg
from .fock import FockOperator, FockVector, operator_M, pairing
from .linalg import solve
from .partitions import Partition

SIGMA = T1 + T2
GRADED = ("t1", "t2")


@lru_cache(maxsize=None)
def operator_S(d: int, truncation: int) -> FockOperator:
    """Solve the rubber differential equation order by order in q.

    At order n the coefficient S_n satisfies
    (n - ad M_0) S_n = sum_{0<k<=n} M_k S_{n-k}, solved as one flat linear
    system over Q(t1, t2).
    """
    M = operator_M(d, truncation)
    N = len(M.basis)
    mats = [M.coefficient_matrix(k) for k in range(truncation + 1)]
    m0 = mats[0]
    S = {0: [[ONE if i == j else ZERO for j in range(N)] for i in range(N)]}
    for n in range(1, truncation + 1):
        rhs = [[ZERO] * N for _ in range(N)]
        for k in range(1, n + 1):
            mk = mats[k]
            prev = S[n - k]
            for i in range(N):
                for j in range(N):
                    acc = rhs[i][j]
                    for l in range(N):
                        if not mk[i][l].is_zero() and not prev[l][j].is_zero():
                            acc = acc + mk[i][l] * prev[l][j]
                    rhs[i][j] = acc
        # unknown x[i][j] sits at flat index i*N + j
        a = [[ZERO] * (N * N) for _ in range(N * N)]
        for i in range(N):
            for j in range(N):
                row = a[i * N + j]
                row[i * N + j] = row[i * N + j] + n
                for l in range(N):
                    if not m0[i][l].is_zero():
                        row[l * N + j] = row[l * N + j] - m0[i][l]
                    if not m0[l][j].is_zero():
                        row[i * N + l] = row[i * N + l] + m0[l][j]
        b = [[rhs[i][j]] for i in range(N) for j in range(N)]
        try:
            x = solve(a, b)
        except ZeroDivisionError as exc:
            raise AssertionError(f"n - ad M(0) is singular at order {n}, degree {d}") from exc
        S[n] = [[x[i * N + j][0] for j in range(N)] for i in range(N)]
    return FockOperator.from_matrices(d, S, truncation)


def ode_residual(d: int, truncation: int) -> FockOperator:
    """q dS/dq - (M S - S M(0)); identically zero for a correct S."""
    S = operator_S(d, truncation)
    M = operator_M(d, truncation)
    return S.map(QSeries.qderiv) - (M @ S - S @ M.at_zero())


def rubber_bracket(a: FockVector, b: FockVector, truncation: int) -> QSeries:
    """q^-d <a| 1/(1 - psi_infinity) |b>~ = M(-q)^-(t1+t2) <a|S|b>."""
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} != {b.degree}")
    S = operator_S(a.degree, truncation)
    value = pairing(a, S.apply(b.as_series(truncation)))
    if not isinstance(value, QSeries):
        value = QSeries.constant(value, truncation)
    return macmahon_neg(truncation).power(-SIGMA) * value


@dataclass(frozen=True)
class RubberSeries:
    row: FockVector
    column: FockVector
    value: QSeries
    psi_base_degree: int


def base_degree_nakajima(lam: Partition) -> int:
    """Degree of <[I_mu] | lam> in (t1, t2): d - l(lam)."""
    return lam.size - len(lam)


def z_dilate(r: QSeries, base_degree: int, z) -> QSeries:
    """Turn a 1/(1 - psi) series into the 1/(z - psi) series.

    A coefficient splits as sum_b c_b with c_b homogeneous of degree
    ``base_degree + b`` in (t1, t2); the result is sum_b z^(-1-b) c_b.  Since
    c_b(t/z) = z^(-base-b) c_b(t), this is z^(base-1) c(t1/z, t2/z), which
    stays valid when the number of pieces is infinite.  The lowest piece
    must have degree at least ``base_degree``; that is asserted through the
    order of vanishing under t -> xi t.
    """
    z = as_ratfunc(z)
    prefactor = z ** (base_degree - 1)
    inv = z.inverse()

    def dilate(c: RatFunc) -> RatFunc:
        if c.is_zero():
            return c
        order = c.order_in(GRADED)
        if order < base_degree:
            raise AssertionError(f"component of degree {order} below the base degree {base_degree}")
        return c.scale_variables(GRADED, inv) * prefactor

    return r.map(dilate)


def z_dilate_by_components(r: QSeries, base_degree: int, z) -> QSeries:
    """Same regrading through an explicit finite homogeneous decomposition.

    Raises ``ValueError`` when a coefficient is not a finite sum of
    homogeneous pieces.
    """
    z = as_ratfunc(z)

    def dilate(c: RatFunc) -> RatFunc:
        acc = ZERO
        for deg, piece in homogeneous_components(c, GRADED).items():
            b = deg - base_degree
            if b < 0:
                raise AssertionError(f"component of degree {deg} below the base degree {base_degree}")
            acc = acc + piece * z ** (-1 - b)
        return acc

    return r.map(dilate)
