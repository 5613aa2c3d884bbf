"""Equivariant 1-legged vertex.

The reduced vertex ``W'(mu)`` (vertex divided by the empty vertex) is
computed in the frame of tangent weights ``(s, t1 - s, t2)`` by solving the
localization identity for the level (-1, 0) cap as a linear system, one
equation per partition ``lam`` of ``d``::

    sum_mu W'(mu) q^n(mu) E(mu) Rubb(mu, lam) t2^l(lam)
        = q^d / z(lam) prod_i 1/(1 - (-q)^lam_i)

Frames with general weights ``(s1, s2, s3)`` are stored in the same three
variable slots as ``(s, t1, t2)``; the conversion from the solver frame is
``s -> s1, t1 -> s1 + s2, t2 -> s3``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .algebra import ONE, S, T1, T2, QSeries, RatFunc, as_ratfunc, macmahon_neg, one_plus_q
from .fock import FockVector
from .linalg import inverse, matvec
from .partitions import Partition, content_sum, gen_partitions, hook_product, n_of_mu, zee
from .rubber import base_degree_nakajima, z_dilate
from .symfunc import fixed_point_class, powersum_specialize

SIGMA = T1 + T2

Weights = tuple[RatFunc, RatFunc, RatFunc]
SOLVER_FRAME: Weights = (S, T1 - S, T2)
# the three general weights occupy the variable slots of s, t1, t2
GENERAL_FRAME: Weights = (S, T1, T2)


@dataclass(frozen=True)
class VertexSeries:
    profile: Partition
    weights: Weights
    value: QSeries
    reduced: bool


@dataclass(frozen=True)
class EdgeWeight:
    profile: Partition
    value: RatFunc


def _check_weights(w: Weights) -> Weights:
    w = tuple(as_ratfunc(x) for x in w)
    if any(x.is_zero() for x in w):
        raise ZeroDivisionError("vertex weights must be nonzero")
    return w


def empty_vertex_exponent(weights: Weights) -> RatFunc:
    s1, s2, s3 = _check_weights(weights)
    return -(s1 + s2) * (s1 + s3) * (s2 + s3) / (s1 * s2 * s3)


def closed_vertex_empty(weights: Weights, truncation: int) -> QSeries:
    """M(-q)^(-(s1+s2)(s1+s3)(s2+s3)/(s1 s2 s3))."""
    return macmahon_neg(truncation).power(empty_vertex_exponent(weights))


def closed_vertex_empty_relative(weights: Weights, truncation: int) -> QSeries:
    """M(-q)^(-(s2+s3)/s1), the empty vertex on a relative divisor."""
    s1, s2, s3 = _check_weights(weights)
    return macmahon_neg(truncation).power(-(s2 + s3) / s1)


def closed_vertex_deg1(weights: Weights, truncation: int, reduced: bool = False) -> QSeries:
    """(1+q)^((s2+s3)/s1) times the empty vertex unless ``reduced``."""
    s1, s2, s3 = _check_weights(weights)
    red = one_plus_q(truncation).power((s2 + s3) / s1)
    return red if reduced else red * closed_vertex_empty(weights, truncation)


def descendent_vertex(lam: Partition, w: QSeries, s: RatFunc = S, t1: RatFunc = T1, t2: RatFunc = T2) -> QSeries:
    """Vertex series with a sigma_1 insertion on a leg of weight ``s``.

    Each configuration is weighted by ch_3 / (t1 t2) = -s|pi| + c(lam) + |lam|(t1+t2)/2,
    so the operator is -s q d/dq + c(lam) + |lam|(t1+t2)/2.
    """
    lam = Partition(lam)
    content = content_sum(lam).substitute({"t1": t1, "t2": t2})
    shift = content + (t1 + t2) * Fraction(lam.size, 2)
    return w.qderiv().scale(-as_ratfunc(s)) + w.scale(shift)


# ---------------------------------------------------------------------------
# edge weight of the (-1, 0) geometry

Laurent = dict[tuple[int, int, int], int]


def _lmul(a: Laurent, b: Laurent) -> Laurent:
    out: Laurent = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2])
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _ladd(*ps: Laurent) -> Laurent:
    out: Laurent = {}
    for p in ps:
        for e, c in p.items():
            out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


def _lscale(p: Laurent, c: int) -> Laurent:
    return {e: c * v for e, v in p.items()}


def tangent_character(mu: Partition) -> Laurent:
    """F_mu(x1, x2) from the cell generating polynomial Q_mu, exponents (0, k1, k2)."""
    q = {(0, i, j): 1 for i, j in Partition(mu).cells()}
    qbar = {(0, -i, -j): 1 for i, j in Partition(mu).cells()}
    inv12 = {(0, -1, -1): 1}
    factor = _lmul({(0, 0, 0): 1, (0, 1, 0): -1}, {(0, 0, 0): 1, (0, 0, 1): -1})
    return _ladd(_lscale(q, -1), _lscale(_lmul(qbar, inv12), -1),
                 _lmul(_lmul(q, qbar), _lmul(factor, inv12)))


def tangent_character_arms_legs(mu: Partition) -> Laurent:
    from .partitions import hooks_arms_legs
    out: Laurent = {}
    for c in hooks_arms_legs(Partition(mu)):
        for e in ((0, c.leg, -c.arm - 1), (0, -c.leg - 1, c.arm)):
            out[e] = out.get(e, 0) - 1
    return {e: v for e, v in out.items() if v}


def edge_character(mu: Partition) -> Laurent:
    """E_mu = F(x1,x2)/(x0-1) + F(x1 x0, x2)/(x0^-1 - 1) as a Laurent polynomial.

    Written as (F(x1,x2) - x0 F(x0 x1, x2)) / (x0 - 1); the division is exact
    and any remainder raises.
    """
    f = tangent_character(mu)
    shifted = {(e[1], e[1], e[2]): c for e, c in f.items()}
    numer = _ladd(f, {(e[0] + 1, e[1], e[2]): -c for e, c in shifted.items()})
    groups: dict[tuple[int, int], dict[int, int]] = {}
    for e, c in numer.items():
        groups.setdefault((e[1], e[2]), {})[e[0]] = c
    out: Laurent = {}
    for (k1, k2), poly in groups.items():
        lo, hi = min(poly), max(poly)
        carry = 0
        for j in range(hi, lo, -1):
            carry += poly.get(j, 0)
            if carry:
                out[(j - 1, k1, k2)] = carry
        carry += poly.get(lo, 0)
        if carry:
            raise AssertionError(f"edge character of {mu} is not a Laurent polynomial")
    return out


@lru_cache(maxsize=None)
def edge_weight_m10(mu: Partition) -> EdgeWeight:
    """Edge weight of the level (-1, 0) cap in the solver frame.

    A monomial x0^k0 x1^k1 x2^k2 with coefficient a contributes
    w^(-a) with w = -(k0 s + k1 (t1 - s) + k2 t2); the sign makes the value
    at t1 + t2 = 0 equal (-1)^n(mu) t2^-d / prod(hooks).
    """
    mu = Partition(mu)
    value = ONE
    for (k0, k1, k2), a in edge_character(mu).items():
        w = -(S * k0 + (T1 - S) * k1 + T2 * k2)
        if w.is_zero():
            raise ZeroDivisionError(f"zero weight in the edge character of {mu}")
        value = value * w ** (-a)
    return EdgeWeight(mu, value)


def edge_weight_antidiagonal(mu: Partition) -> RatFunc:
    """(-1)^n(mu) t2^-d / prod(hooks)."""
    mu = Partition(mu)
    return T2 ** (-mu.size) * Fraction((-1) ** n_of_mu(mu), hook_product(mu))


# ---------------------------------------------------------------------------
# localization system


def cap_m10_lhs(lam: Partition, truncation: int) -> QSeries:
    """q^d / z(lam) prod_i 1/(1 - (-q)^lam_i)."""
    lam = Partition(lam)
    out = QSeries.monomial(Fraction(1, zee(lam)), lam.size, truncation)
    for part in lam:
        out = out * powersum_specialize(part, truncation)
    return out


@lru_cache(maxsize=None)
def rubber_ratio(mu: Partition, lam: Partition, truncation: int) -> QSeries:
    """Rubber factor Rubb(mu, lam) of the localization identity, valuation d.

    The cotangent line sits at the rubber divisor glued to the edge, which is
    the side carrying [I_mu]; in terms of S this is the matrix element
    <lam| S |[I_mu]>.  Numerator and denominator (the degree-0 series) are
    regraded by :func:`z_dilate` with z = -s, with base degrees d - l(lam)
    and 0.
    """
    from .rubber import rubber_bracket
    mu, lam = Partition(mu), Partition(lam)
    d = mu.size
    z = -S
    num = rubber_bracket(FockVector.basis(lam), fixed_point_class(mu), truncation)
    den = rubber_bracket(FockVector.vacuum(), FockVector.vacuum(), truncation)
    ratio = z_dilate(num, base_degree_nakajima(lam), z) / z_dilate(den, 0, z)
    return ratio.shift(d)


def system_matrix(d: int, truncation: int) -> dict[tuple[Partition, Partition], QSeries]:
    """B(lam, mu) = E(mu) Rubb(mu, lam) t2^l(lam) q^-d."""
    out = {}
    for lam in gen_partitions(d):
        for mu in gen_partitions(d):
            r = rubber_ratio(mu, lam, truncation).shift(-d)
            out[(lam, mu)] = r.scale(edge_weight_m10(mu).value * T2 ** len(lam))
    return out


def cap_m10_rhs(lam: Partition, w_unknowns: Mapping[Partition, QSeries], truncation: int) -> QSeries:
    """Right side of the localization identity for the (-1,0) cap."""
    lam = Partition(lam)
    d = lam.size
    total = QSeries.zero(truncation)
    for mu in gen_partitions(d):
        term = w_unknowns[mu].shift(n_of_mu(mu)) * rubber_ratio(mu, lam, truncation)
        total = total + term.scale(edge_weight_m10(mu).value * T2 ** len(lam))
    return total


@lru_cache(maxsize=None)
def solve_vertex(d: int, truncation: int) -> dict[Partition, VertexSeries]:
    """Reduced vertices W'(mu), mu a partition of d, in the solver frame.

    The unknowns u_mu = q^n(mu) W'(mu) are determined order by order from the
    invertible q^0 part of the system.  The overdetermined information that
    u_mu starts at q^n(mu) is checked, not assumed.
    """
    parts = gen_partitions(d)
    if d == 0:
        return {parts[0]: VertexSeries(parts[0], SOLVER_FRAME, QSeries.constant(ONE, truncation), True)}
    shifts = {mu: n_of_mu(mu) for mu in parts}
    top = truncation + max(shifts.values())
    B = system_matrix(d, top)
    lhs = {lam: cap_m10_lhs(lam, top + d).shift(-d) for lam in parts}
    b0 = [[B[(lam, mu)][0] for mu in parts] for lam in parts]
    try:
        b0_inv = inverse(b0)
    except ZeroDivisionError as exc:
        raise ArithmeticError(f"leading coefficient matrix is singular in degree {d}") from exc
    u: list[list[RatFunc]] = []
    for m in range(top + 1):
        rhs = []
        for lam in parts:
            acc = lhs[lam][m]
            for k in range(1, m + 1):
                for j, mu in enumerate(parts):
                    c = B[(lam, mu)][k]
                    if not c.is_zero() and not u[m - k][j].is_zero():
                        acc = acc - c * u[m - k][j]
            rhs.append(acc)
        u.append(matvec(b0_inv, rhs))
    out = {}
    for j, mu in enumerate(parts):
        low = [m for m in range(shifts[mu]) if not u[m][j].is_zero()]
        if low:
            raise AssertionError(f"W'({mu}) would have a pole: q^{low[0]} term below q^{shifts[mu]}")
        coeffs = [u[m][j] for m in range(shifts[mu], shifts[mu] + truncation + 1)]
        out[mu] = VertexSeries(mu, SOLVER_FRAME, QSeries(coeffs, 0, truncation), True)
    return out


def to_general_frame(f: RatFunc) -> RatFunc:
    """Rewrite a solver-frame function in weights (s1, s2, s3) held in slots (s, t1, t2)."""
    return as_ratfunc(f).substitute({"s": S, "t1": S + T1, "t2": T2})


def from_general_frame(f: RatFunc) -> RatFunc:
    """Inverse of :func:`to_general_frame`."""
    return as_ratfunc(f).substitute({"s": S, "t1": T1 - S, "t2": T2})


def vertex_general(mu: Partition, truncation: int) -> VertexSeries:
    sol = solve_vertex(Partition(mu).size, truncation)[Partition(mu)]
    return VertexSeries(sol.profile, GENERAL_FRAME, sol.value.map(to_general_frame), True)


def calabi_yau(f: RatFunc) -> RatFunc:
    """Specialize the solver frame to s1 + s2 + s3 = 0, i.e. t2 = -t1."""
    return as_ratfunc(f).substitute({"t2": -T1})


def hook_product_series(mu: Partition, truncation: int) -> QSeries:
    """prod over cells 1/(1 - (-q)^hook)."""
    from .partitions import hooks_arms_legs
    out = QSeries.constant(ONE, truncation)
    for c in hooks_arms_legs(Partition(mu)):
        out = out * powersum_specialize(c.hook, truncation)
    return out
