"""Fock space of the Hilbert schemes of points of the plane.

Vectors of degree ``d`` are finite combinations of the Nakajima basis
``|mu> = prod(alpha_{-mu_i}) |0> / z(mu)`` indexed by partitions of ``d``.
Coefficients may be :class:`RatFunc` values or :class:`QSeries`; operators
are matrices of ``QSeries`` whose entry ``(mu, nu)`` is the coefficient of
``|mu>`` in ``Op|nu>``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Sequence, Union

from .algebra import ONE, T1, T2, ZERO, QSeries, RatFunc, as_ratfunc, phi
from .partitions import EMPTY, Partition, gen_partitions, zee

Coeff = Union[RatFunc, QSeries]
SIGMA = T1 + T2
T1T2 = T1 * T2


class FockVector:
    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: Mapping[Partition, Coeff] | None = None):
        self.degree = degree
        clean: dict[Partition, Coeff] = {}
        for mu, c in (coeffs or {}).items():
            mu = Partition(mu)
            if mu.size != degree:
                raise ValueError(f"{mu} is not a partition of {degree}")
            if isinstance(c, (int, Fraction)):
                c = as_ratfunc(c)
            if not c.is_zero():
                clean[mu] = c
        self.coeffs = clean

    @classmethod
    def basis(cls, mu: Partition, coeff: Coeff = ONE) -> "FockVector":
        return cls(Partition(mu).size, {Partition(mu): coeff})

    @classmethod
    def vacuum(cls) -> "FockVector":
        return cls(0, {EMPTY: ONE})

    def __getitem__(self, mu: Partition) -> Coeff:
        return self.coeffs.get(Partition(mu), ZERO)

    def __add__(self, other: "FockVector") -> "FockVector":
        _same_degree(self.degree, other.degree)
        out = dict(self.coeffs)
        for mu, c in other.coeffs.items():
            out[mu] = out[mu] + c if mu in out else c
        return FockVector(self.degree, out)

    def __neg__(self) -> "FockVector":
        return FockVector(self.degree, {mu: -c for mu, c in self.coeffs.items()})

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + (-other)

    def scale(self, c: Coeff | int | Fraction) -> "FockVector":
        if isinstance(c, (int, Fraction)):
            c = as_ratfunc(c)
        return FockVector(self.degree, {mu: v * c for mu, v in self.coeffs.items()})

    def map(self, fn: Callable[[Coeff], Coeff]) -> "FockVector":
        return FockVector(self.degree, {mu: fn(c) for mu, c in self.coeffs.items()})

    def as_series(self, truncation: int) -> "FockVector":
        return self.map(lambda c: c if isinstance(c, QSeries) else QSeries.constant(c, truncation))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FockVector):
            return NotImplemented
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        body = " + ".join(f"({c})|{mu}>" for mu, c in sorted(self.coeffs.items(), key=lambda kv: _order(kv[0])))
        return f"FockVector[{self.degree}]({body or '0'})"

    def to_json(self) -> dict:
        rows = []
        for mu in gen_partitions(self.degree):
            if mu in self.coeffs:
                c = self.coeffs[mu]
                rows.append({"partition": list(mu), "value": c.to_json()})
        return {"degree": self.degree, "coeffs": rows}


def _order(mu: Partition) -> int:
    return gen_partitions(mu.size).index(mu)


def _same_degree(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"degree mismatch: {a} != {b}")


# ---------------------------------------------------------------------------
# Heisenberg operators


def alpha(k: int, v: FockVector) -> FockVector:
    """alpha_k for k != 0; negative k creates a part of size -k."""
    if k == 0:
        raise ValueError("alpha_0 is not used")
    out: dict[Partition, Coeff] = {}
    if k < 0:
        part = -k
        for mu, c in v.coeffs.items():
            nu = mu.add_part(part)
            out[nu] = c * (part * (mu.multiplicity(part) + 1))
        return FockVector(v.degree + part, out)
    for mu, c in v.coeffs.items():
        if k in mu:
            nu = mu.remove_part(k)
            out[nu] = out[nu] + c if nu in out else c
    return FockVector(v.degree - k, out)


def pairing_weight(mu: Partition) -> RatFunc:
    """<mu|mu> = (t1 t2)^(-l) (-1)^(|mu|-l) / z(mu)."""
    l = len(mu)
    return T1T2 ** (-l) * Fraction((-1) ** (mu.size - l), zee(mu))


def pairing(u: FockVector, w: FockVector) -> Coeff:
    _same_degree(u.degree, w.degree)
    acc: Coeff | None = None
    for mu, c in u.coeffs.items():
        if mu in w.coeffs:
            term = c * w.coeffs[mu] * pairing_weight(mu)
            acc = term if acc is None else acc + term
    return ZERO if acc is None else acc


def delta_d(mu: Partition) -> RatFunc:
    """Inverse of the intersection form on |mu>: (-1)^(d-l) (t1t2)^l z(mu)."""
    l = len(mu)
    return T1T2 ** l * ((-1) ** (mu.size - l) * zee(mu))


def splitting_joining(v: FockVector) -> FockVector:
    """The cubic part of the divisor operator, q-independent."""
    out = FockVector(v.degree)
    for mu, c in v.coeffs.items():
        base = FockVector(v.degree, {mu: c})
        for m in set(mu):
            removed = alpha(m, base)
            for k in range(1, m):
                out = out + alpha(-k, alpha(-(m - k), removed)).scale(T1T2 * Fraction(1, 2))
        parts = sorted(set(mu))
        for i, k in enumerate(parts):
            for l in parts[i:]:
                if k == l and mu.multiplicity(k) < 2:
                    continue
                joined = alpha(-(k + l), alpha(k, alpha(l, base)))
                weight = Fraction(1, 2) if k == l else Fraction(1)
                out = out - joined.scale(weight)
    return out


def _number_operator(k: int, v: FockVector) -> FockVector:
    return alpha(-k, alpha(k, v))


# ---------------------------------------------------------------------------
# operators


class FockOperator:
    """Degree-preserving operator with ``QSeries`` matrix entries."""

    __slots__ = ("degree", "basis", "entries", "truncation")

    def __init__(self, degree: int, entries: Sequence[Sequence[QSeries]]):
        self.degree = degree
        self.basis = gen_partitions(degree)
        n = len(self.basis)
        if len(entries) != n or any(len(r) != n for r in entries):
            raise ValueError("entry matrix has the wrong shape")
        self.entries = tuple(tuple(r) for r in entries)
        self.truncation = min((e.truncation for r in self.entries for e in r), default=0)

    @classmethod
    def from_columns(cls, degree: int, column: Callable[[Partition], FockVector], truncation: int) -> "FockOperator":
        basis = gen_partitions(degree)
        cols = []
        for nu in basis:
            img = column(nu).as_series(truncation)
            cols.append([img[mu] if mu in img.coeffs else QSeries.zero(truncation) for mu in basis])
        return cls(degree, [[cols[j][i] for j in range(len(basis))] for i in range(len(basis))])

    @classmethod
    def from_matrices(cls, degree: int, mats: Mapping[int, Sequence[Sequence[RatFunc]]], truncation: int) -> "FockOperator":
        n = len(gen_partitions(degree))
        entries = [[QSeries.from_dict({k: m[i][j] for k, m in mats.items() if k <= truncation and not m[i][j].is_zero()},
                                      truncation) for j in range(n)] for i in range(n)]
        return cls(degree, entries)

    @classmethod
    def identity(cls, degree: int, truncation: int) -> "FockOperator":
        n = len(gen_partitions(degree))
        return cls(degree, [[QSeries.constant(ONE if i == j else ZERO, truncation) for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, degree: int, value: QSeries) -> "FockOperator":
        n = len(gen_partitions(degree))
        zero = QSeries.zero(value.truncation)
        return cls(degree, [[value if i == j else zero for j in range(n)] for i in range(n)])

    def __getitem__(self, key: tuple[Partition, Partition]) -> QSeries:
        mu, nu = key
        return self.entries[self.basis.index(Partition(mu))][self.basis.index(Partition(nu))]

    def coefficient_matrix(self, n: int) -> list[list[RatFunc]]:
        return [[e[n] for e in row] for row in self.entries]

    def at_zero(self) -> "FockOperator":
        return FockOperator.from_matrices(self.degree, {0: self.coefficient_matrix(0)}, self.truncation)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        _same_degree(self.degree, other.degree)
        return FockOperator(self.degree, [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self) -> "FockOperator":
        return FockOperator(self.degree, [[-a for a in r] for r in self.entries])

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return self + (-other)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        _same_degree(self.degree, other.degree)
        n = len(self.basis)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = self.entries[i][0] * other.entries[0][j]
                for k in range(1, n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return FockOperator(self.degree, out)

    def scale(self, c: Union[QSeries, RatFunc, int, Fraction]) -> "FockOperator":
        return FockOperator(self.degree, [[a * c for a in r] for r in self.entries])

    def apply(self, v: FockVector) -> FockVector:
        _same_degree(self.degree, v.degree)
        out: dict[Partition, Coeff] = {}
        for j, nu in enumerate(self.basis):
            if nu not in v.coeffs:
                continue
            c = v.coeffs[nu]
            for i, mu in enumerate(self.basis):
                e = self.entries[i][j]
                if e.is_zero():
                    continue
                term = e * c
                out[mu] = out[mu] + term if mu in out else term
        return FockVector(self.degree, out)

    def map(self, fn: Callable[[QSeries], QSeries]) -> "FockOperator":
        return FockOperator(self.degree, [[fn(a) for a in r] for r in self.entries])

    def matrix_element(self, u: FockVector, w: FockVector) -> QSeries:
        """pairing(u, Op w) as a q-series."""
        value = pairing(u, self.apply(w))
        if isinstance(value, QSeries):
            return value
        return QSeries.constant(value, self.truncation)

    def equal_to(self, other: "FockOperator") -> bool:
        return all(a.equal_to(b) for r, s in zip(self.entries, other.entries) for a, b in zip(r, s))

    def to_json(self) -> dict:
        return {"degree": self.degree, "basis": [list(m) for m in self.basis],
                "entries": [[e.to_json() for e in r] for r in self.entries]}


def diagonal_series(k: int, truncation: int) -> QSeries:
    """((-q)^k + 1)/((-q)^k - 1) = -1 - 2 sum_{j>=1} (-q)^(k j)."""
    data = {0: RatFunc.const(-1)}
    for j in range(1, truncation // k + 1):
        data[k * j] = RatFunc.const(-2 * (-1) ** (k * j))
    return QSeries.from_dict(data, truncation)


def classical_column(nu: Partition) -> FockVector:
    """Action of the classical divisor operator on |nu>."""
    v = FockVector.basis(nu)
    diag = -SIGMA * Fraction(sum(p * (p - 1) for p in nu), 2)
    return v.scale(diag) + splitting_joining(v)


def operator_D_classical(d: int) -> FockOperator:
    return FockOperator.from_columns(d, classical_column, 0)


def operator_M(d: int, truncation: int) -> FockOperator:
    """The q-deformed divisor operator.

    Diagonal eigenvalue on |mu> is (t1+t2)/2 * sum_i mu_i^2 f(mu_i) with
    f(k) = ((-q)^k+1)/((-q)^k-1); the cubic terms are q-independent.
    """
    fk = {k: diagonal_series(k, truncation) for k in range(1, d + 1)}

    def column(nu: Partition) -> FockVector:
        diag = QSeries.zero(truncation)
        for p in nu:
            diag = diag + fk[p].scale(SIGMA * Fraction(p * p, 2))
        cubic = splitting_joining(FockVector.basis(nu)).as_series(truncation)
        return FockVector.basis(nu, diag) + cubic

    return FockOperator.from_columns(d, column, truncation)


def energy(d: int, truncation: int = 0) -> FockOperator:
    """sum_k alpha_{-k} alpha_k, eigenvalue |mu|."""

    def column(nu: Partition) -> FockVector:
        v = FockVector.basis(nu)
        out = FockVector(d)
        for k in set(nu):
            out = out + _number_operator(k, v)
        return out

    return FockOperator.from_columns(d, column, truncation)


def operator_Msigma(d: int, truncation: int) -> FockOperator:
    """M - (t1+t2) Phi(q) Id."""
    shift = phi(truncation)
    return operator_M(d, truncation) - FockOperator.scalar(d, shift.scale(SIGMA))


def operator_MD(d: int, truncation: int) -> FockOperator:
    """M - (t1+t2)/2 f(1) |.|."""
    shift = diagonal_series(1, truncation).scale(SIGMA * Fraction(1, 2))
    return operator_M(d, truncation) - energy(d, truncation).scale(shift)


def divisor_class(d: int) -> FockVector:
    """c_1 of the tautological bundle: -|2,1^(d-2)>."""
    if d < 2:
        return FockVector(d)
    return FockVector.basis(Partition([2] + [1] * (d - 2)), RatFunc.const(-1))


def unit_vector(d: int) -> FockVector:
    return FockVector.basis(Partition([1] * d))


def basis_vectors(d: int) -> list[FockVector]:
    return [FockVector.basis(mu) for mu in gen_partitions(d)]
