"""Symmetric functions in the power-sum basis and fixed-point classes.

A :class:`SymFunc` of degree ``d`` stores coefficients on ``p_mu``.  The
fixed-point classes of the Hilbert scheme are Jack symmetric functions read
in Nakajima coordinates; they are produced here by Gram-Schmidt on monomial
symmetric functions and then rescaled so that each class pairs with itself
to the Euler class of the tangent space at its fixed point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import flint
from flint.utils.flint_exceptions import DomainError

from .algebra import ONE, T1, T2, ZERO, QSeries, RatFunc, antidiagonal, as_ratfunc, geometric
from .fock import FockVector, pairing
from .partitions import (Partition, character, gen_partitions, hook_product, hooks_arms_legs,
                         n_of_mu, zee)


class SymFunc:
    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: Mapping[Partition, RatFunc | Fraction | int]):
        self.degree = degree
        self.coeffs = {Partition(mu): as_ratfunc(c) for mu, c in coeffs.items() if as_ratfunc(c)}

    def __getitem__(self, mu: Partition) -> RatFunc:
        return self.coeffs.get(Partition(mu), ZERO)

    def __add__(self, other: "SymFunc") -> "SymFunc":
        keys = set(self.coeffs) | set(other.coeffs)
        return SymFunc(self.degree, {k: self[k] + other[k] for k in keys})

    def scale(self, c) -> "SymFunc":
        return SymFunc(self.degree, {k: v * c for k, v in self.coeffs.items()})

    def __sub__(self, other: "SymFunc") -> "SymFunc":
        return self + other.scale(-1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SymFunc) and self.degree == other.degree and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return "SymFunc(" + " + ".join(f"({c})p{mu}" for mu, c in self.coeffs.items()) + ")"

    def to_fock(self) -> FockVector:
        """p_mu = z(mu) |mu>."""
        return FockVector(self.degree, {mu: c * zee(mu) for mu, c in self.coeffs.items()})


def schur_in_p(mu: Partition) -> SymFunc:
    """s_mu = sum_lambda chi^mu_lambda p_lambda / z(lambda)."""
    mu = Partition(mu)
    return SymFunc(mu.size, {lam: Fraction(character(mu, lam), zee(lam)) for lam in gen_partitions(mu.size)})


def powersum_specialize(k: int, truncation: int) -> QSeries:
    """p_k(1, -q, q^2, ...) = 1/(1 - (-q)^k)."""
    if k < 1:
        raise ValueError("k must be positive")
    return geometric(k, (-1) ** k, truncation)


def principal_powersum(k: int, truncation: int) -> QSeries:
    """p_k(1, q, q^2, ...) = 1/(1 - q^k)."""
    return geometric(k, 1, truncation)


def schur_specialize(mu: Partition, truncation: int) -> QSeries:
    """s_mu(1, q, q^2, ...) = q^n(mu) / prod over cells (1 - q^hook)."""
    mu = Partition(mu)
    out = QSeries.monomial(ONE, n_of_mu(mu), truncation)
    for c in hooks_arms_legs(mu):
        out = out * principal_powersum(c.hook, truncation)
    return out


def schur_specialize_via_p(mu: Partition, truncation: int) -> QSeries:
    """Same series through the power-sum expansion of s_mu."""
    s = schur_in_p(mu)
    total = QSeries.zero(truncation)
    for lam, c in s.coeffs.items():
        term = QSeries.constant(c, truncation)
        for part in lam:
            term = term * principal_powersum(part, truncation)
        total = total + term
    return total


# ---------------------------------------------------------------------------
# tangent weights


def tangent_weights(mu: Partition) -> list[RatFunc]:
    """Two weights per cell: l*t1 - (a+1)*t2 and -(l+1)*t1 + a*t2."""
    out = []
    for c in hooks_arms_legs(Partition(mu)):
        out.append(T1 * c.leg - T2 * (c.arm + 1))
        out.append(-T1 * (c.leg + 1) + T2 * c.arm)
    return out


def euler_class(mu: Partition) -> RatFunc:
    e = ONE
    for w in tangent_weights(mu):
        e = e * w
    return e


# ---------------------------------------------------------------------------
# monomial basis and Jack polynomials


@lru_cache(maxsize=None)
def p_to_m(d: int) -> dict[Partition, dict[Partition, int]]:
    """Coefficients of m_lambda in p_mu, by expanding in exactly d variables."""
    out: dict[Partition, dict[Partition, int]] = {}
    for mu in gen_partitions(d):
        poly: dict[tuple[int, ...], int] = {(0,) * d: 1}
        for part in mu:
            nxt: dict[tuple[int, ...], int] = {}
            for exp, c in poly.items():
                for v in range(d):
                    e = list(exp)
                    e[v] += part
                    key = tuple(e)
                    nxt[key] = nxt.get(key, 0) + c
            poly = nxt
        row = {}
        for lam in gen_partitions(d):
            key = tuple(lam) + (0,) * (d - len(lam))
            if poly.get(key):
                row[lam] = poly[key]
        out[mu] = row
    return out


@lru_cache(maxsize=None)
def m_in_p(d: int) -> dict[Partition, SymFunc]:
    """Monomial symmetric functions in the power-sum basis (exact inverse)."""
    parts = gen_partitions(d)
    n = len(parts)
    table = p_to_m(d)
    mat = flint.fmpq_mat(n, n, [table[mu].get(lam, 0) for mu in parts for lam in parts])
    inv = mat.inv()
    return {lam: SymFunc(d, {mu: Fraction(int(inv[j, i].p), int(inv[j, i].q))
                             for i, mu in enumerate(parts)})
            for j, lam in enumerate(parts)}


def jack_pairing(f: SymFunc, g: SymFunc, alpha: RatFunc) -> RatFunc:
    """<p_mu, p_nu> = delta z(mu) alpha^l(mu)."""
    acc = ZERO
    for mu, c in f.coeffs.items():
        if mu in g.coeffs:
            acc = acc + c * g.coeffs[mu] * alpha ** len(mu) * zee(mu)
    return acc


def dominance_leq(a: Partition, b: Partition) -> bool:
    sa = sb = 0
    for i in range(max(len(a), len(b))):
        sa += a[i] if i < len(a) else 0
        sb += b[i] if i < len(b) else 0
        if sa > sb:
            return False
    return True


def jack_monic(d: int, alpha: RatFunc) -> dict[Partition, SymFunc]:
    """Monic Jack functions P_lambda: m_lambda plus dominance-lower terms.

    Gram-Schmidt over a linear extension of dominance (the reverse of the
    reverse-lexicographic order), starting from (1^d).
    """
    ms = m_in_p(d)
    done: list[tuple[Partition, SymFunc, RatFunc]] = []
    out = {}
    for lam in reversed(gen_partitions(d)):
        f = ms[lam]
        for mu, g, norm in done:
            c = jack_pairing(ms[lam], g, alpha) / norm
            if c:
                f = f - g.scale(c)
        norm = jack_pairing(f, f, alpha)
        if norm.is_zero():
            raise AssertionError(f"degenerate Gram matrix at {lam}")
        done.append((lam, f, norm))
        out[lam] = f
    return out


def _square_root(f: RatFunc) -> RatFunc:
    num, den = f.zpolys
    try:
        return RatFunc.from_zpolys(num.sqrt(), den.sqrt())
    except DomainError as exc:
        raise AssertionError(f"{f} is not a square in Q(s, t1, t2)") from exc


@lru_cache(maxsize=None)
def fixed_point_classes(d: int) -> dict[Partition, FockVector]:
    """All fixed-point classes of degree d in the Nakajima basis."""
    alpha = -T1 / T2
    jacks = jack_monic(d, alpha)
    out = {}
    for lam, j in jacks.items():
        label = lam.conjugate()
        vec = FockVector(d, {mu: c * zee(mu) * T1 ** (d + len(mu)) for mu, c in j.coeffs.items()})
        ratio = euler_class(label) / pairing(vec, vec)
        vec = vec.scale(_square_root(ratio))
        out[label] = vec.scale(_orientation_sign(label, vec))
    return out


def _orientation_sign(lam: Partition, vec: FockVector) -> int:
    """Sign making the pairing with |1^d> match the character formula at t2 = -t1."""
    d = lam.size
    ones = Partition([1] * d)
    target = antidiagonal(character_pairing_value(lam, ones))
    got = antidiagonal(pairing(vec, FockVector.basis(ones)))
    if got == target:
        return 1
    if got == -target:
        return -1
    raise AssertionError(f"class {lam} does not match the character formula up to sign")


def fixed_point_class(mu: Partition) -> FockVector:
    mu = Partition(mu)
    return fixed_point_classes(mu.size)[mu]


def character_pairing_value(mu: Partition, lam: Partition) -> RatFunc:
    """t2^(d - l(lam)) chi^mu_lam prod(hooks of mu) / z(lam), the anti-diagonal pairing."""
    d = mu.size
    return T2 ** (d - len(lam)) * Fraction(character(mu, lam) * hook_product(mu), zee(lam))
