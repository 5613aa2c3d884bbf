"""Gluing calculus for the local theory of curves.

Partition functions ``DT(g|k1,k2)`` of degree ``d`` are assembled from the
level (0,0) cap, tube and pair of pants together with the level (-1,0) cap.
The state space is the degree-``d`` Fock space with basis ``e_lam = |lam>``;
its metric is the Nakajima pairing and indices are raised with ``delta_d``.

The pair of pants is reconstructed from ``M_D``.  The level (0,0) theory is a
commutative Frobenius algebra with unit ``|1^d>`` in which multiplication by
the divisor ``D`` acts as ``M_D``.  Each basis vector is written as a
polynomial in ``M_D`` applied to the unit (a Krylov solve), which yields the
multiplication operator of every basis vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .algebra import ONE, T1, T2, ZERO, QSeries, RatFunc, as_ratfunc, macmahon_neg
from .fock import FockOperator, FockVector, delta_d, operator_MD, pairing_weight
from .linalg import PrecisionError, series_inverse, solve
from .partitions import Partition, gen_partitions, zee
from .symfunc import powersum_specialize

SIGMA = T1 + T2
T1T2 = T1 * T2
Level = tuple[int, int]
LEVEL_STEPS: tuple[Level, ...] = ((-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass(frozen=True)
class TqftBlock:
    """Tensor of series indexed by partitions of ``degree``.

    ``slots`` marks each index ``"lower"`` or ``"upper"``; raising an index
    multiplies by ``delta_d`` of that partition.
    """

    genus: int
    level: Level
    degree: int
    slots: tuple[str, ...]
    entries: Mapping[tuple[Partition, ...], QSeries] = field(repr=False)

    def __getitem__(self, key: Sequence[Partition]) -> QSeries:
        return self.entries[tuple(Partition(k) for k in key)]

    @property
    def truncation(self) -> int:
        return min(v.truncation for v in self.entries.values())

    def _rescale(self, i: int, to: str, factor: Callable[[Partition], RatFunc]) -> "TqftBlock":
        if self.slots[i] == to:
            raise ValueError(f"slot {i} is already {to}")
        entries = {k: v.scale(factor(k[i])) for k, v in self.entries.items()}
        slots = self.slots[:i] + (to,) + self.slots[i + 1:]
        return TqftBlock(self.genus, self.level, self.degree, slots, entries)

    def raise_slot(self, i: int) -> "TqftBlock":
        return self._rescale(i, "upper", delta_d)

    def lower_slot(self, i: int) -> "TqftBlock":
        return self._rescale(i, "lower", pairing_weight)

    def equal_to(self, other: "TqftBlock") -> bool:
        return (self.slots == other.slots and self.entries.keys() == other.entries.keys()
                and all(v.equal_to(other.entries[k]) for k, v in self.entries.items()))

    def to_json(self) -> dict:
        return {"genus": self.genus, "level": list(self.level), "degree": self.degree,
                "slots": list(self.slots),
                "entries": [{"index": [list(p) for p in k], "value": v.to_json()}
                            for k, v in sorted(self.entries.items())]}


def _block(genus: int, level: Level, d: int, slots: tuple[str, ...],
           value: Callable[..., QSeries]) -> TqftBlock:
    parts = gen_partitions(d)
    entries = {key: value(*key) for key in product(parts, repeat=len(slots))}
    return TqftBlock(genus, level, d, slots, entries)


def swap_t(f: RatFunc) -> RatFunc:
    return as_ratfunc(f).substitute({"t1": T2, "t2": T1})


# ---------------------------------------------------------------------------
# degree 0


def degree0_exponent(g: int, k1: int, k2: int, r: int) -> RatFunc:
    """(2g - 2 + r)(t1+t2)^2/(t1 t2) - (k1 + k2)."""
    return SIGMA * SIGMA / T1T2 * (2 * g - 2 + r) - (k1 + k2)


def degree0(g: int, k1: int, k2: int, r: int, truncation: int) -> QSeries:
    """Degree-0 partition function with ``r`` relative points."""
    return macmahon_neg(truncation).power(degree0_exponent(g, k1, k2, r))


def degree0_localization_exponent(k1: int, k2: int, relative: bool = False) -> RatFunc:
    """Exponent of M(-q) for the genus-0 level (k1,k2) degree-0 series by localization.

    Adds the vertex exponents at the two torus-fixed points of the base, with
    tangent weights (s, t1 + k1 s, t2 + k2 s) and (-s, t1, t2), then sets s = 0.
    With ``relative`` the point at infinity is a relative divisor instead.
    """
    from .vertex import empty_vertex_exponent
    s = RatFunc.var("s")
    total = empty_vertex_exponent((s, T1 + s * k1, T2 + s * k2))
    if relative:
        total = total - SIGMA / (-s)
    else:
        total = total + empty_vertex_exponent((-s, T1, T2))
    try:
        return total.substitute({"s": 0})
    except ZeroDivisionError as exc:
        raise ArithmeticError("the exponent sum is singular at s = 0") from exc


# ---------------------------------------------------------------------------
# level (0,0) building blocks


def tube(d: int, truncation: int) -> TqftBlock:
    """DT(0|0,0)_mu^nu = delta."""
    return _block(0, (0, 0), d, ("lower", "upper"),
                  lambda mu, nu: QSeries.constant(1 if mu == nu else 0, truncation))


def tube_lower(d: int, truncation: int) -> TqftBlock:
    """DT(0|0,0)_{mu,nu}, the Nakajima pairing."""
    return _block(0, (0, 0), d, ("lower", "lower"),
                  lambda mu, nu: QSeries.constant(pairing_weight(mu) if mu == nu else ZERO, truncation))


def cap00_value(lam: Partition) -> RatFunc:
    d = lam.size
    if lam == Partition([1] * d):
        return T1T2 ** (-d) * Fraction(1, factorial(d))
    return ZERO


def cap00(d: int, truncation: int) -> TqftBlock:
    return _block(0, (0, 0), d, ("lower",),
                  lambda lam: QSeries.constant(cap00_value(lam), truncation))


def pants_D(d: int, truncation: int) -> TqftBlock:
    """DT(0|0,0)_{mu,D,nu} = <mu|M_D|nu> with D = -(2,1^(d-2))."""
    if d <= 1:
        return _block(0, (0, 0), d, ("lower", "lower"), lambda mu, nu: QSeries.zero(truncation))
    md = operator_MD(d, truncation)
    return _block(0, (0, 0), d, ("lower", "lower"),
                  lambda mu, nu: md.matrix_element(FockVector.basis(mu), FockVector.basis(nu)))


def krylov_coefficients(d: int, truncation: int) -> tuple[list[FockOperator], list[list[QSeries]]]:
    """Powers of M_D and the coefficients c[k][nu] with sum_k c[k][nu] M_D^k e = |nu>.

    Raises ``PrecisionError`` when the Krylov matrix cannot be inverted to
    the requested precision.
    """
    parts = gen_partitions(d)
    n = len(parts)
    unit = FockVector.basis(Partition([1] * d)).as_series(truncation)
    powers = [FockOperator.identity(d, truncation)]
    if n > 1:
        md = operator_MD(d, truncation)
        for _ in range(n - 1):
            powers.append(md @ powers[-1])
    columns = [p.apply(unit) for p in powers]
    krylov = [[columns[k].coeffs.get(mu, QSeries.zero(truncation)) for k in range(n)] for mu in parts]
    return powers, series_inverse(krylov, need=truncation)


@lru_cache(maxsize=None)
def multiplication_operators(d: int, truncation: int) -> dict[Partition, FockOperator]:
    """Operator of multiplication by e_nu for every nu, as a polynomial in M_D."""
    parts = gen_partitions(d)
    powers, coeffs = krylov_coefficients(d, truncation)
    out = {}
    for j, nu in enumerate(parts):
        op = powers[0].scale(coeffs[0][j])
        for k in range(1, len(parts)):
            op = op + powers[k].scale(coeffs[k][j])
        out[nu] = op
    return out


def pants_full(d: int, truncation: int) -> TqftBlock:
    """DT(0|0,0)_{lam,mu,nu} = <lam| e_mu e_nu>."""
    ops = multiplication_operators(d, truncation)
    return _block(0, (0, 0), d, ("lower", "lower", "lower"),
                  lambda lam, mu, nu: ops[mu].matrix_element(FockVector.basis(lam), FockVector.basis(nu)))


# ---------------------------------------------------------------------------
# level (-1,0) and level-changing tubes


def cap_m10_value(lam: Partition, truncation: int) -> QSeries:
    """t2^-l(lam) / z(lam) prod_i 1/(1 - (-q)^lam_i)."""
    lam = Partition(lam)
    out = QSeries.constant(T2 ** (-len(lam)) * Fraction(1, zee(lam)), truncation)
    for part in lam:
        out = out * powersum_specialize(part, truncation)
    return out


def cap_m10(d: int, truncation: int) -> TqftBlock:
    return _block(0, (-1, 0), d, ("lower",), lambda lam: cap_m10_value(lam, truncation))


def _element_operator(vec: Mapping[Partition, QSeries], d: int, truncation: int) -> FockOperator:
    """Multiplication by the algebra element sum_gamma vec[gamma] e_gamma."""
    ops = multiplication_operators(d, truncation)
    out = FockOperator.scalar(d, QSeries.zero(truncation))
    for gamma, c in vec.items():
        out = out + ops[gamma].scale(c)
    return out


@lru_cache(maxsize=None)
def level_operator(d: int, truncation: int, step: Level) -> FockOperator:
    """Multiplication operator of one level-changing tube.

    The (-1,0) tube multiplies by the cap element with raised index; the
    (1,0) tube is its inverse; the (0,-1) and (0,1) tubes swap t1 and t2.
    """
    if step == (-1, 0):
        return _element_operator(_down_element(d, truncation), d, truncation)
    if step == (1, 0):
        for reserve in (0, d, 2 * d, 4 * d, d * d + 4 * d):
            wide = level_operator(d, truncation + reserve, (-1, 0))
            try:
                inv = series_inverse([list(r) for r in wide.entries], need=truncation)
            except PrecisionError:
                continue
            return FockOperator(d, [[e.truncate(truncation) for e in r] for r in inv])
        raise PrecisionError(f"the (-1,0) tube of degree {d} is not invertible through q^{truncation}")
    if step in ((0, -1), (0, 1)):
        return level_operator(d, truncation, (step[1], 0)).map(lambda s: s.map(swap_t))
    raise ValueError(f"{step} is not a unit level step")


def level_operators(d: int, truncation: int) -> dict[Level, FockOperator]:
    return {step: level_operator(d, truncation, step) for step in LEVEL_STEPS}


def _down_element(d: int, truncation: int) -> dict[Partition, QSeries]:
    return {g: cap_m10_value(g, truncation).scale(delta_d(g)) for g in gen_partitions(d)}


def level_tube(d: int, truncation: int, step: Level) -> TqftBlock:
    """Level-changing tube DT_mu^nu: the coefficient of e_nu in (tube element) e_mu."""
    op = level_operator(d, truncation, step)
    return _block(0, step, d, ("lower", "upper"), lambda mu, nu: op[(nu, mu)])


def level_tubes(d: int, truncation: int) -> dict[Level, TqftBlock]:
    return {step: level_tube(d, truncation, step) for step in LEVEL_STEPS}


# ---------------------------------------------------------------------------
# assembly


def _check_insertions(insertions: Iterable[Sequence[int]], d: int) -> list[Partition]:
    out = [Partition(p) for p in insertions]
    for p in out:
        if p.size != d:
            raise ValueError(f"insertion {tuple(p)} is not a partition of {d}")
    return out


def counit(vec: FockVector, truncation: int) -> QSeries:
    """Glue the level (0,0) cap onto a state."""
    total = QSeries.zero(truncation)
    for lam, c in vec.coeffs.items():
        cap = cap00_value(lam)
        if not cap.is_zero():
            total = total + c * cap
    return total


def handle_operator(d: int, truncation: int) -> FockOperator:
    """Multiplication by the handle element sum_gamma delta(gamma) e_gamma e_gamma."""
    ops = multiplication_operators(d, truncation)
    out = FockOperator.scalar(d, QSeries.zero(truncation))
    for gamma in gen_partitions(d):
        out = out + (ops[gamma] @ ops[gamma]).scale(delta_d(gamma))
    return out


def assemble(g: int, k1: int, k2: int, insertions: Sequence[Sequence[int]], d: int,
             truncation: int) -> QSeries:
    """DT(g|k1,k2)_{lam^1..lam^r} through multiplication operators.

    Evaluates the counit on e_{lam^1} ... e_{lam^r} H^g L1^(-k1) L2^(-k2),
    where H is the handle element and L1, L2 are the (-1,0) and (0,-1) cap
    elements (negative powers use the inverse tubes).
    """
    ins = _check_insertions(insertions, d)
    if g < 0:
        raise ValueError("genus must be nonnegative")
    if d == 0:
        return QSeries.constant(1, truncation)
    return _with_reserve(d, truncation, lambda work: _assemble_operators(g, k1, k2, ins, d, work))


def _with_reserve(d: int, truncation: int, compute: Callable[[int], QSeries]) -> QSeries:
    """Run ``compute`` with extra q-orders until the result reaches ``truncation``."""
    have = None
    for reserve in (0, d, 2 * d, 4 * d, d * d + 4 * d):
        try:
            value = compute(truncation + reserve)
        except PrecisionError:
            continue
        if value.truncation >= truncation:
            return value.truncate(truncation)
        have = value.truncation
    known = "nothing" if have is None else f"q^{have}"
    raise PrecisionError(f"degree {d}: result known through {known}, q^{truncation} requested")


def _assemble_operators(g: int, k1: int, k2: int, ins: list[Partition], d: int,
                        truncation: int) -> QSeries:
    ops = multiplication_operators(d, truncation)
    vec = FockVector.basis(Partition([1] * d)).as_series(truncation)
    for lam in ins:
        vec = ops[lam].apply(vec)
    if g:
        handle = handle_operator(d, truncation)
        for _ in range(g):
            vec = handle.apply(vec)
    for steps, down, up in ((k1, (-1, 0), (1, 0)), (k2, (0, -1), (0, 1))):
        if not steps:
            continue
        op = level_operator(d, truncation, down if steps < 0 else up)
        for _ in range(abs(steps)):
            vec = op.apply(vec)
    return counit(vec, truncation)


def assemble_by_gluing(g: int, k1: int, k2: int, insertions: Sequence[Sequence[int]], d: int,
                       truncation: int, rotate: int = 0, level_first: bool = False) -> QSeries:
    """DT(g|k1,k2)_{lam^1..lam^r} from explicit tensors and the degeneration rules.

    Handles are cut with the genus-reduction rule, pairs of pants split off
    two boundary circles at a time, and the level is moved onto a tube glued
    at the last boundary circle.  ``rotate`` cycles the insertions and
    ``level_first`` peels the level before splitting, so different arguments
    realize different decompositions of the same surface.
    """
    ins = _check_insertions(insertions, d)
    if g < 0:
        raise ValueError("genus must be nonnegative")
    if d == 0:
        return QSeries.constant(1, truncation)
    shift = rotate % len(ins) if ins else 0
    order = tuple(ins[shift:] + ins[:shift])
    return _with_reserve(d, truncation, lambda work: _glue_tensors(g, (k1, k2), order, d, work, level_first))


def _glue_tensors(g: int, level: Level, order: tuple[Partition, ...], d: int, truncation: int,
                  level_first: bool) -> QSeries:
    parts = gen_partitions(d)
    pants = pants_full(d, truncation)
    tubes: dict[Level, TqftBlock] = {}
    zero = QSeries.zero(truncation)

    def glue(left: Callable[[Partition], QSeries], right: Callable[[Partition], QSeries]) -> QSeries:
        total = zero
        for gamma in parts:
            total = total + (left(gamma) * right(gamma)).scale(delta_d(gamma))
        return total

    @lru_cache(maxsize=None)
    def dt(genus: int, level: Level, idx: tuple[Partition, ...]) -> QSeries:
        if genus > 0:
            return glue(lambda gm: QSeries.constant(1, truncation),
                        lambda gm: dt(genus - 1, level, idx + (gm, gm)))
        if not idx:
            # a sphere: glue a level (0,0) cap onto a one-point sphere
            return glue(lambda gm: QSeries.constant(cap00_value(gm), truncation),
                        lambda gm: dt(0, level, (gm,)))
        if level != (0, 0) and (level_first or len(idx) <= 2):
            k1_, k2_ = level
            step = ((-1 if k1_ < 0 else 1), 0) if k1_ else (0, (-1 if k2_ < 0 else 1))
            rest = (k1_ - step[0], k2_ - step[1])
            last = idx[-1]
            total = zero
            for gamma in parts:
                if step not in tubes:
                    tubes[step] = level_tube(d, truncation, step)
                entry = tubes[step][(last, gamma)]
                if not entry.is_zero():
                    total = total + entry * dt(0, rest, idx[:-1] + (gamma,))
            return total
        if len(idx) >= 3:
            first, tail = idx[:2], idx[2:]
            return glue(lambda gm: pants[first + (gm,)], lambda gm: dt(0, level, (gm,) + tail))
        if len(idx) == 1:
            return QSeries.constant(cap00_value(idx[0]), truncation)
        mu, nu = idx
        return QSeries.constant(pairing_weight(mu) if mu == nu else ZERO, truncation)

    return dt(g, level, order)


# ---------------------------------------------------------------------------
# starred normalization


@dataclass(frozen=True)
class StarredSeries:
    """(-q)^(half_power/2) * series, with ``half_power`` reduced to 0 or 1."""

    half_power: int
    series: QSeries

    @classmethod
    def make(cls, half_power: int, series: QSeries) -> "StarredSeries":
        whole, rest = divmod(half_power, 2)
        return cls(rest, series.shift(whole).scale((-1) ** (whole % 2)))

    def equal_to(self, other: "StarredSeries") -> bool:
        return self.half_power == other.half_power and self.series.equal_to(other.series)

    def to_text(self) -> str:
        prefix = "(-q)^(1/2) * " if self.half_power else ""
        return prefix + self.series.to_text()

    def to_json(self) -> dict:
        return {"half_power": self.half_power, "series": self.series.to_json()}


def starred_from(g: int, k1: int, k2: int, d: int, value: QSeries) -> StarredSeries:
    """DT* = (-1)^(d(g-1)) (-q)^(-d(k1+k2)/2) DT."""
    return StarredSeries.make(-d * (k1 + k2), value.scale((-1) ** ((d * (g - 1)) % 2)))


def starred(g: int, k1: int, k2: int, insertions: Sequence[Sequence[int]], d: int,
            truncation: int) -> StarredSeries:
    return starred_from(g, k1, k2, d, assemble(g, k1, k2, insertions, d, truncation))


def starred_raising(nu: Partition) -> RatFunc:
    """Index raising for starred series: z(nu) (-t1 t2)^l(nu)."""
    return (-T1T2) ** len(nu) * zee(nu)


def gw_star_cap_m10(lam: Partition, truncation: int) -> StarredSeries:
    """The Gromov-Witten starred (-1,0) cap.

    (-q)^(-d/2) t2^-l (-1)^(d-l) / z(lam) prod_i 1/(1 - (-q)^(-lam_i)), where each
    factor is the q-expansion of y/(y - 1) at y = (-q)^lam_i.
    """
    lam = Partition(lam)
    d, length = lam.size, len(lam)
    body = QSeries.constant(T2 ** (-length) * Fraction((-1) ** (d - length), zee(lam)), truncation + d)
    for part in lam:
        y = QSeries.monomial((-1) ** part, part, truncation + d)
        body = body * (y / (y - 1))
    return StarredSeries.make(-d, body)


# ---------------------------------------------------------------------------
# rational reconstruction


@dataclass(frozen=True)
class RationalFit:
    """numerator/denominator polynomials in q with RatFunc coefficients, times q^valuation."""

    valuation: int
    numerator: tuple[RatFunc, ...]
    denominator: tuple[RatFunc, ...]

    def expand(self, truncation: int) -> QSeries:
        rel = truncation - self.valuation
        num = QSeries(self.numerator, 0, rel)
        den = QSeries(self.denominator, 0, rel)
        return (num / den).shift(self.valuation)


def rational_fit(series: QSeries, fit_orders: int, max_degree: int | None = None) -> RationalFit:
    """Fit P/Q (Q(0) = 1) to the first ``fit_orders`` coefficients of ``series``.

    Tries total degrees deg P + deg Q + 2 <= fit_orders in increasing order
    and returns the first fit whose defining linear system is nonsingular
    and which reproduces all ``fit_orders`` coefficients, so at least one
    coefficient is checked beyond those that determine the fit.  Raises
    ``ValueError`` when none exists.  Checking the remaining coefficients is
    left to the caller.
    """
    v = series.valuation if not series.is_zero() else 0
    coeffs = [series[v + i] for i in range(fit_orders)]
    limit = fit_orders - 2 if max_degree is None else min(max_degree, fit_orders - 2)
    for total in range(0, limit + 1):
        for n in range(0, total + 1):
            m = total - n
            fit = _pade(coeffs, m, n)
            if fit is None:
                continue
            num, den = fit
            candidate = RationalFit(v, tuple(num), tuple(den))
            if candidate.expand(v + fit_orders - 1).equal_to(series.truncate(v + fit_orders - 1)):
                return candidate
    raise ValueError(f"no rational fit with degree <= {limit} from {fit_orders} coefficients")


def _pade(c: Sequence[RatFunc], m: int, n: int) -> tuple[list[RatFunc], list[RatFunc]] | None:
    def coef(k: int) -> RatFunc:
        return c[k] if 0 <= k < len(c) else ZERO

    if n:
        a = [[coef(m + i + 1 - j) for j in range(1, n + 1)] for i in range(n)]
        b = [[-coef(m + i + 1)] for i in range(n)]
        try:
            sol = solve(a, b)
        except ZeroDivisionError:
            return None
        den = [ONE] + [row[0] for row in sol]
    else:
        den = [ONE]
    num = []
    for k in range(m + 1):
        acc = ZERO
        for j in range(min(k, n) + 1):
            acc = acc + den[j] * coef(k - j)
        num.append(acc)
    return num, den
