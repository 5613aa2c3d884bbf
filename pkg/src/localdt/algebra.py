"""Exact coefficient arithmetic.

Everything downstream lives over the field Q(s, t1, t2).  ``MultiPoly`` and
``RatFunc`` are thin immutable wrappers over FLINT's multivariate integer
polynomials, kept in a canonical reduced form so that equality is structural
and serialization is bit-exact.  ``QSeries`` is a truncated Laurent series in
``q`` with ``RatFunc`` coefficients that carries its own precision.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import flint

Rational = Fraction

VARIABLES: tuple[str, str, str] = ("s", "t1", "t2")
_ZCTX = flint.fmpz_mpoly_ctx.get(VARIABLES, "deglex")
_QCTX = flint.fmpq_mpoly_ctx.get(VARIABLES, "deglex")
_ZERO = _ZCTX.from_dict({})
_ONE = _ZCTX.from_dict({(0, 0, 0): 1})

Exponent = tuple[int, int, int]
Scalar = Union[int, Fraction, "RatFunc"]


def _canonical_key(exp: Exponent) -> tuple[int, Exponent]:
    return (sum(exp), exp)


def _zpoly_terms(p) -> list[tuple[Exponent, int]]:
    items = [(tuple(int(e) for e in m), int(c)) for m, c in p.to_dict().items()]
    items.sort(key=lambda kv: _canonical_key(kv[0]), reverse=True)
    return items


class MultiPoly:
    """A polynomial in (s, t1, t2) with rational coefficients.

    Terms are listed in canonical order: descending total degree, ties broken
    lexicographically on the exponent triple (e_s, e_t1, e_t2).
    """

    __slots__ = ("_p",)

    def __init__(self, terms: Mapping[Exponent, Fraction | int] | None = None):
        data = {}
        for exp, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                if len(exp) != 3 or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent {exp!r}")
                data[tuple(exp)] = flint.fmpq(c.numerator, c.denominator)
        self._p = _QCTX.from_dict(data)

    @classmethod
    def _wrap(cls, p) -> "MultiPoly":
        obj = cls.__new__(cls)
        obj._p = p
        return obj

    @classmethod
    def from_zpoly(cls, p) -> "MultiPoly":
        return cls._wrap(_QCTX.from_dict(p.to_dict()))

    def terms(self) -> list[tuple[Exponent, Fraction]]:
        out = []
        for m, c in self._p.to_dict().items():
            c = flint.fmpq(c)
            out.append((tuple(int(e) for e in m), Fraction(int(c.p), int(c.q))))
        out.sort(key=lambda kv: _canonical_key(kv[0]), reverse=True)
        return out

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def total_degree(self) -> int:
        return int(self._p.total_degree()) if not self.is_zero() else -1

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        return MultiPoly._wrap(self._p + other._p)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return MultiPoly._wrap(self._p - other._p)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        return MultiPoly._wrap(self._p * other._p)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._wrap(-self._p)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MultiPoly) and self._p == other._p

    def __hash__(self) -> int:
        return hash(tuple(self.terms()))

    def __repr__(self) -> str:
        return f"MultiPoly({format_poly(self.terms())})"

    def __str__(self) -> str:
        return format_poly(self.terms())


def format_poly(terms: Sequence[tuple[Exponent, Fraction | int]]) -> str:
    """Canonical text for a list of (exponent, coefficient) terms."""
    if not terms:
        return "0"
    pieces = []
    for idx, (exp, c) in enumerate(terms):
        c = Fraction(c)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        factors = []
        for name, e in zip(VARIABLES, exp):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        if mag != 1 or not factors:
            factors.insert(0, str(mag))
        body = "*".join(factors)
        if idx == 0:
            pieces.append(body if sign == "+" else "-" + body)
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces)


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


def parse_poly(text: str) -> dict[Exponent, Fraction]:
    """Inverse of :func:`format_poly`."""
    text = text.strip()
    if text == "0":
        return {}
    out: dict[Exponent, Fraction] = {}
    pos = 0
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial {text!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(sign)
        exp = [0, 0, 0]
        for factor in m.group(2).strip().split("*"):
            factor = factor.strip()
            name, _, power = factor.partition("^")
            if name in VARIABLES:
                exp[VARIABLES.index(name)] += int(power) if power else 1
            else:
                coeff *= Fraction(factor)
        key = tuple(exp)
        out[key] = out.get(key, Fraction(0)) + coeff
    return {k: v for k, v in out.items() if v}


class RatFunc:
    """Element of Q(s, t1, t2) in canonical reduced form.

    Internally ``num`` and ``den`` are integer polynomials with no common
    factor (integer content included) and the leading coefficient of ``den``
    in canonical order is positive.  Two equal functions therefore have
    identical representations.
    """

    __slots__ = ("_num", "_den", "_hash")

    def __init__(self, num: MultiPoly | int | Fraction = 0, den: MultiPoly | int | Fraction = 1):
        n = _to_zfrac(num)
        d = _to_zfrac(den)
        # (a/b) / (c/e) with integer polynomials a, c and integers b, e
        zn = n[0] * d[1]
        zd = d[0] * n[1]
        self._num, self._den = _normalize(zn, zd)
        self._hash = None

    @classmethod
    def _raw(cls, num, den) -> "RatFunc":
        obj = cls.__new__(cls)
        obj._num = num
        obj._den = den
        obj._hash = None
        return obj

    @classmethod
    def from_zpolys(cls, num, den) -> "RatFunc":
        n, d = _normalize(num, den)
        return cls._raw(n, d)

    @classmethod
    def var(cls, name: str) -> "RatFunc":
        return cls._raw(_ZCTX.gen(VARIABLES.index(name)), _ONE)

    @classmethod
    def const(cls, c: int | Fraction) -> "RatFunc":
        c = Fraction(c)
        return cls._raw(_ZCTX.from_dict({(0, 0, 0): c.numerator}) if c else _ZERO,
                        _ZCTX.from_dict({(0, 0, 0): c.denominator}))

    @property
    def num(self) -> MultiPoly:
        return MultiPoly.from_zpoly(self._num)

    @property
    def den(self) -> MultiPoly:
        return MultiPoly.from_zpoly(self._den)

    @property
    def zpolys(self):
        return self._num, self._den

    def is_zero(self) -> bool:
        return self._num.is_zero()

    def is_constant(self) -> bool:
        return self._num.is_constant() and self._den.is_constant()

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return Fraction(int(self._num.coefficient(0)) if not self._num.is_zero() else 0,
                        int(self._den.coefficient(0)))

    def __bool__(self) -> bool:
        return not self._num.is_zero()

    def __add__(self, other: Scalar) -> "RatFunc":
        if not isinstance(other, (RatFunc, int, Fraction)):
            return NotImplemented
        other = as_ratfunc(other)
        if other._num.is_zero():
            return self
        if self._num.is_zero():
            return other
        a, b, c, d = self._num, self._den, other._num, other._den
        if b == d:
            if b.is_one():
                return RatFunc._raw(a + c, b)
            return RatFunc.from_zpolys(a + c, b)
        if b.is_one():
            return RatFunc._raw(a * d + c, d)
        if d.is_one():
            return RatFunc._raw(a + c * b, b)
        g = b.gcd(d)
        bg = b / g
        dg = d / g
        n = a * dg + c * bg
        return RatFunc.from_zpolys(n, b * dg)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc._raw(-self._num, self._den)

    def __sub__(self, other: Scalar) -> "RatFunc":
        if not isinstance(other, (RatFunc, int, Fraction)):
            return NotImplemented
        return self + (-as_ratfunc(other))

    def __rsub__(self, other: Scalar) -> "RatFunc":
        return as_ratfunc(other) + (-self)

    def __mul__(self, other: Scalar) -> "RatFunc":
        if not isinstance(other, (RatFunc, int, Fraction)):
            return NotImplemented
        if isinstance(other, int):
            if other == 0:
                return ZERO
            g = int(self._den.content()) if not self._den.is_one() else 1
            g = _igcd(g, other)
            if g == 1:
                return RatFunc._raw(self._num * other, self._den)
            return RatFunc._raw(self._num * (other // g), self._den / g)
        other = as_ratfunc(other)
        a, b, c, d = self._num, self._den, other._num, other._den
        if a.is_zero() or c.is_zero():
            return ZERO
        if b.is_one() and d.is_one():
            return RatFunc._raw(a * c, b)
        g1 = a.gcd(d)
        g2 = c.gcd(b)
        if not g1.is_one():
            a = a / g1
            d = d / g1
        if not g2.is_one():
            c = c / g2
            b = b / g2
        return RatFunc._raw(*_fix_sign(a * c, b * d))

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self._num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc._raw(*_fix_sign(self._den, self._num))

    def __truediv__(self, other: Scalar) -> "RatFunc":
        return self * as_ratfunc(other).inverse()

    def __rtruediv__(self, other: Scalar) -> "RatFunc":
        return as_ratfunc(other) * self.inverse()

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc._raw(self._num ** n, self._den ** n)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RatFunc.const(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((tuple(_zpoly_terms(self._num)), tuple(_zpoly_terms(self._den))))
        return self._hash

    def __repr__(self) -> str:
        return f"RatFunc({self})"

    def __str__(self) -> str:
        return self.to_text()

    def to_text(self) -> str:
        num = format_poly(_zpoly_terms(self._num))
        if self._den.is_one():
            return num
        return f"({num})/({format_poly(_zpoly_terms(self._den))})"

    @classmethod
    def from_text(cls, text: str) -> "RatFunc":
        text = text.strip()
        m = re.fullmatch(r"\((.*)\)/\((.*)\)", text)
        if m:
            return cls(MultiPoly(parse_poly(m.group(1))), MultiPoly(parse_poly(m.group(2))))
        return cls(MultiPoly(parse_poly(text)))

    def to_json(self) -> dict:
        return {"num": _poly_json(self._num), "den": _poly_json(self._den)}

    @classmethod
    def from_json(cls, data: Mapping) -> "RatFunc":
        num = {tuple(e): Fraction(c) for e, c in data["num"]}
        den = {tuple(e): Fraction(c) for e, c in data["den"]}
        return cls(MultiPoly(num), MultiPoly(den))

    def substitute(self, values: Mapping[str, Scalar]) -> "RatFunc":
        """Replace variables by rational functions; unspecified ones stay."""
        vals = []
        for name in VARIABLES:
            v = as_ratfunc(values[name]) if name in values else RatFunc.var(name)
            vals.append(v)
        degs = [max(int(a), int(b)) for a, b in zip(self._num.degrees(), self._den.degrees())]
        num = _eval_cleared(self._num, vals, degs)
        den = _eval_cleared(self._den, vals, degs)
        if den.is_zero():
            raise ZeroDivisionError(f"substitution makes the denominator of {self} vanish")
        return RatFunc.from_zpolys(num, den)

    def graded_parts(self, variables: Iterable[str]) -> tuple[dict[int, object], dict[int, object]]:
        """Split numerator and denominator by total degree in ``variables``."""
        idx = [VARIABLES.index(v) for v in variables]
        return _split_by_degree(self._num, idx), _split_by_degree(self._den, idx)

    def order_in(self, variables: Iterable[str]) -> int:
        """Order of vanishing at xi = 0 after v -> xi*v for v in ``variables``."""
        if self.is_zero():
            raise ValueError("order of the zero function is undefined")
        nparts, dparts = self.graded_parts(variables)
        return min(nparts) - min(dparts)

    def scale_variables(self, variables: Iterable[str], factor: Scalar) -> "RatFunc":
        """Return f(v -> factor*v for v in ``variables``), using grading only."""
        factor = as_ratfunc(factor)
        if factor.is_zero():
            raise ZeroDivisionError("scaling by zero")
        nparts, dparts = self.graded_parts(list(variables))
        fn, fd = factor._num, factor._den
        top = max(max(nparts), max(dparts))
        low = min(min(nparts), min(dparts))

        def assemble(parts):
            acc = _ZERO
            for k, p in parts.items():
                acc = acc + p * fn ** (k - low) * fd ** (top - k)
            return acc

        return RatFunc.from_zpolys(assemble(nparts), assemble(dparts))


def _igcd(a: int, b: int) -> int:
    from math import gcd
    return gcd(a, b)


def _split_by_degree(p, idx: Sequence[int]) -> dict[int, object]:
    groups: dict[int, dict] = {}
    for m, c in p.to_dict().items():
        k = sum(int(m[i]) for i in idx)
        groups.setdefault(k, {})[m] = c
    return {k: _ZCTX.from_dict(v) for k, v in groups.items()}


def _eval_cleared(p, vals: Sequence[RatFunc], degs: Sequence[int]):
    """p(vals) times prod(den_j ** degs[j]) as an integer polynomial."""
    cache: dict[tuple[int, int], object] = {}

    def power(j: int, e: int):
        key = (j, e)
        if key not in cache:
            vn, vd = vals[j]._num, vals[j]._den
            cache[key] = vn ** e * vd ** (degs[j] - e)
        return cache[key]

    acc = _ZERO
    for m, c in p.to_dict().items():
        term = _ZCTX.from_dict({(0, 0, 0): c})
        for j, e in enumerate(m):
            term = term * power(j, int(e))
        acc = acc + term
    return acc


def _poly_json(p) -> list:
    out = []
    for exp, c in _zpoly_terms(p):
        out.append([list(exp), str(Fraction(c))])
    return out


def _to_zfrac(x) -> tuple[object, int]:
    if isinstance(x, MultiPoly):
        terms = x.terms()
        den = 1
        for _, c in terms:
            den = den * c.denominator // _igcd(den, c.denominator)
        return _ZCTX.from_dict({e: int(c * den) for e, c in terms}), den
    x = Fraction(x)
    return _ZCTX.from_dict({(0, 0, 0): x.numerator}) if x else _ZERO, x.denominator


def _fix_sign(num, den):
    if den.leading_coefficient() < 0:
        return -num, -den
    return num, den


def _normalize(num, den):
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return _ZERO, _ONE
    g = num.gcd(den)
    if not g.is_one():
        num = num / g
        den = den / g
    return _fix_sign(num, den)


ZERO = RatFunc._raw(_ZERO, _ONE)
ONE = RatFunc._raw(_ONE, _ONE)
S = RatFunc.var("s")
T1 = RatFunc.var("t1")
T2 = RatFunc.var("t2")


def as_ratfunc(x: Scalar) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, (int, Fraction)):
        return RatFunc.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to RatFunc")


def divisible_by_t1_plus_t2(f: Scalar) -> bool:
    """True when f vanishes on the anti-diagonal t2 = -t1."""
    f = as_ratfunc(f)
    num, den = f.zpolys
    s, t1, _ = _ZCTX.gens()
    if num.compose(s, t1, -t1).is_zero():
        if den.compose(s, t1, -t1).is_zero():
            raise ValueError(f"{f} has a pole along t1 + t2 = 0")
        return True
    return False


def antidiagonal(f: Scalar) -> RatFunc:
    """Specialize t2 -> -t1."""
    return as_ratfunc(f).substitute({"t2": -T1})


def homogeneous_components(f: Scalar, variables: Iterable[str]) -> dict[int, RatFunc]:
    """Decompose f into pieces homogeneous in ``variables``.

    The remaining variables are treated as constants.  Raises ``ValueError``
    when the reduced denominator is not homogeneous, which is exactly the
    case where the expansion in the scaling parameter does not terminate.
    """
    f = as_ratfunc(f)
    variables = list(variables)
    if f.is_zero():
        return {}
    nparts, dparts = f.graded_parts(variables)
    if len(dparts) != 1:
        raise ValueError(f"{f} is not a finite sum of homogeneous pieces in {variables}")

    (dd, den), = dparts.items()
    return {k - dd: RatFunc.from_zpolys(p, den) for k, p in sorted(nparts.items())}


# ---------------------------------------------------------------------------
# truncated Laurent series


class QSeries:
    """Laurent series in q known exactly modulo O(q^(truncation+1)).

    ``coeffs[i]`` is the coefficient of ``q^(valuation+i)``.  The leading
    coefficient is nonzero unless the series is zero to its precision, in
    which case ``valuation == truncation + 1`` and ``coeffs`` is empty.
    """

    __slots__ = ("valuation", "coeffs", "truncation")

    def __init__(self, coeffs: Sequence[Scalar], valuation: int = 0, truncation: int | None = None):
        cs = [as_ratfunc(c) for c in coeffs]
        if truncation is None:
            truncation = valuation + len(cs) - 1
        cs = cs[: max(0, truncation - valuation + 1)]
        cs.extend([ZERO] * (truncation - valuation + 1 - len(cs)))
        start = 0
        while start < len(cs) and cs[start].is_zero():
            start += 1
        self.valuation = valuation + start if start < len(cs) else truncation + 1
        self.coeffs = tuple(cs[start:])
        self.truncation = truncation

    @classmethod
    def constant(cls, c: Scalar, truncation: int) -> "QSeries":
        return cls([c], 0, truncation)

    @classmethod
    def monomial(cls, c: Scalar, power: int, truncation: int) -> "QSeries":
        return cls([c], power, max(truncation, power - 1))

    @classmethod
    def zero(cls, truncation: int) -> "QSeries":
        return cls([], truncation + 1, truncation)

    @classmethod
    def from_dict(cls, data: Mapping[int, Scalar], truncation: int) -> "QSeries":
        if not data:
            return cls.zero(truncation)
        lo = min(data)
        return cls([data.get(n, ZERO) for n in range(lo, truncation + 1)], lo, truncation)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, n: int) -> RatFunc:
        if n > self.truncation:
            raise IndexError(f"q^{n} is beyond the truncation O(q^{self.truncation + 1})")
        if n < self.valuation:
            return ZERO
        return self.coeffs[n - self.valuation]

    def items(self):
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                yield self.valuation + i, c

    def truncate(self, truncation: int) -> "QSeries":
        if truncation > self.truncation:
            raise ValueError("cannot extend the truncation of a series")
        return QSeries(self.coeffs, self.valuation, truncation)

    def _lo(self, other: "QSeries") -> int:
        return min(self.valuation, other.valuation)

    def __add__(self, other: Union["QSeries", Scalar]) -> "QSeries":
        if not isinstance(other, QSeries):
            other = QSeries.constant(other, self.truncation)
        trunc = min(self.truncation, other.truncation)
        lo = min(self._lo(other), trunc + 1)
        return QSeries([self[n] + other[n] for n in range(lo, trunc + 1)], lo, trunc)

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries([-c for c in self.coeffs], self.valuation, self.truncation)

    def __sub__(self, other: Union["QSeries", Scalar]) -> "QSeries":
        if not isinstance(other, QSeries):
            other = QSeries.constant(other, self.truncation)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "QSeries":
        return (-self) + other

    def scale(self, c: Scalar) -> "QSeries":
        c = as_ratfunc(c)
        return QSeries([x * c for x in self.coeffs], self.valuation, self.truncation)

    def __mul__(self, other: Union["QSeries", Scalar]) -> "QSeries":
        if not isinstance(other, QSeries):
            return self.scale(other)
        trunc = min(self.truncation + other.valuation, other.truncation + self.valuation)
        if self.is_zero() or other.is_zero():
            return QSeries.zero(trunc)
        lo = self.valuation + other.valuation
        out = []
        a, b = self.coeffs, other.coeffs
        for k in range(trunc - lo + 1):
            acc = ZERO
            for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
                acc = acc + a[i] * b[k - i]
            out.append(acc)
        return QSeries(out, lo, trunc)

    __rmul__ = __mul__

    def shift(self, k: int) -> "QSeries":
        """Multiply by q^k."""
        return QSeries(self.coeffs, self.valuation + k, self.truncation + k)

    def inverse(self) -> "QSeries":
        if self.is_zero():
            raise ZeroDivisionError("division by the zero series")
        v = self.valuation
        rel = self.truncation - v
        a = self.coeffs
        inv0 = a[0].inverse()
        out = [inv0]
        for n in range(1, rel + 1):
            acc = ZERO
            for k in range(1, min(n, len(a) - 1) + 1):
                acc = acc + a[k] * out[n - k]
            out.append(-acc * inv0)
        return QSeries(out, -v, rel - v)

    def __truediv__(self, other: Union["QSeries", Scalar]) -> "QSeries":
        if not isinstance(other, QSeries):
            return self.scale(as_ratfunc(other).inverse())
        return self * other.inverse()

    def __rtruediv__(self, other: Scalar) -> "QSeries":
        return self.inverse().scale(other)

    def __pow__(self, n: int) -> "QSeries":
        if n < 0:
            return self.inverse() ** (-n)
        result = QSeries.constant(ONE, self.truncation - self.valuation) if n == 0 else None
        if n == 0:
            return result
        base, out = self, None
        while n:
            if n & 1:
                out = base if out is None else out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def qderiv(self) -> "QSeries":
        """q d/dq."""
        return QSeries([c * (self.valuation + i) for i, c in enumerate(self.coeffs)],
                       self.valuation, self.truncation)

    def map(self, fn) -> "QSeries":
        return QSeries([fn(c) for c in self.coeffs], self.valuation, self.truncation)

    def _unit_check(self) -> None:
        if self.valuation != 0 or self.coeffs[0] != ONE:
            raise ValueError("series must have valuation 0 and constant term 1")

    def log(self) -> "QSeries":
        """Logarithm of a series with constant term 1; valuation >= 1."""
        self._unit_check()
        ratio = self.qderiv() / self
        return QSeries([ZERO] + [ratio[n] * Fraction(1, n) for n in range(1, self.truncation + 1)],
                       0, self.truncation)

    def exp(self) -> "QSeries":
        """Exponential of a series with valuation >= 1."""
        if self.valuation < 1:
            raise ValueError("exp needs a series with positive valuation")
        T = self.truncation
        kl = [self[k] * k for k in range(T + 1)]
        out = [ONE]
        for n in range(1, T + 1):
            acc = ZERO
            for k in range(1, n + 1):
                if not kl[k].is_zero():
                    acc = acc + kl[k] * out[n - k]
            out.append(acc * Fraction(1, n))
        return QSeries(out, 0, T)

    def power(self, exponent: Scalar) -> "QSeries":
        """self ** exponent for a rational-function exponent.

        Uses the recurrence from f * q(f^E)' = E * q f' * f^E.
        """
        self._unit_check()
        E = as_ratfunc(exponent)
        T = self.truncation
        f = [self[k] for k in range(T + 1)]
        out = [ONE]
        for n in range(1, T + 1):
            acc = ZERO
            for k in range(1, n + 1):
                if f[k].is_zero():
                    continue
                acc = acc + f[k] * out[n - k] * (E * k - (n - k))
            out.append(acc * Fraction(1, n))
        return QSeries(out, 0, T)

    def equal_to(self, other: "QSeries") -> bool:
        """Equality up to the common truncation."""
        trunc = min(self.truncation, other.truncation)
        lo = min(self.valuation, other.valuation)
        return all(self[n] == other[n] for n in range(lo, trunc + 1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self.truncation == other.truncation and self.valuation == other.valuation
                and self.coeffs == other.coeffs)

    def __hash__(self) -> int:
        return hash((self.valuation, self.truncation, self.coeffs))

    def __repr__(self) -> str:
        return f"QSeries({self.to_text()})"

    def to_text(self) -> str:
        parts = [f"q^{self.valuation + i}*({c.to_text()})"
                 for i, c in enumerate(self.coeffs) if not c.is_zero()]
        parts.append(f"O(q^{self.truncation + 1})")
        return " + ".join(parts[:-1]) + ("; " if len(parts) > 1 else "") + parts[-1]

    @classmethod
    def from_text(cls, text: str) -> "QSeries":
        body, _, tail = text.rpartition("O(q^")
        truncation = int(tail.rstrip(")")) - 1
        data: dict[int, RatFunc] = {}
        body = body.strip().rstrip(";").strip()
        if body:
            for piece in _split_top_level(body):
                m = re.fullmatch(r"q\^(-?\d+)\*\((.*)\)", piece.strip())
                if not m:
                    raise ValueError(f"cannot parse series term {piece!r}")
                data[int(m.group(1))] = RatFunc.from_text(m.group(2))
        return cls.from_dict(data, truncation)

    def to_json(self) -> dict:
        return {"valuation": self.valuation, "truncation": self.truncation,
                "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: Mapping) -> "QSeries":
        return cls([RatFunc.from_json(c) for c in data["coeffs"]], data["valuation"], data["truncation"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _split_top_level(text: str) -> list[str]:
    pieces, depth, cur = [], 0, []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and text.startswith(" + q^", i):
            pieces.append("".join(cur))
            cur = []
            i += 3
            continue
        cur.append(ch)
        i += 1
    pieces.append("".join(cur))
    return pieces


# ---------------------------------------------------------------------------
# distinguished series


def sigma2(n: int) -> int:
    return sum(d * d for d in range(1, n + 1) if n % d == 0)


def macmahon(truncation: int) -> QSeries:
    """M(q) = prod (1 - q^n)^(-n), coefficients from the sigma_2 recurrence."""
    if truncation < 0:
        raise ValueError("truncation must be non-negative")
    a = [1]
    for n in range(1, truncation + 1):
        a.append(sum(sigma2(k) * a[n - k] for k in range(1, n + 1)) // n)
    return QSeries(a, 0, truncation)


def macmahon_neg(truncation: int) -> QSeries:
    """M(-q): sign flip on odd coefficients."""
    m = macmahon(truncation)
    return QSeries([c if n % 2 == 0 else -c for n, c in enumerate(m.coeffs)], 0, truncation)


def phi(truncation: int) -> QSeries:
    """q d/dq log M(-q) = sum_n sigma_2(n) (-q)^n."""
    if truncation < 0:
        raise ValueError("truncation must be non-negative")
    return QSeries([0] + [sigma2(n) * (-1) ** n for n in range(1, truncation + 1)], 0, truncation)


def geometric(power: int, sign: int, truncation: int) -> QSeries:
    """1 / (1 - sign * q^power) for power >= 1."""
    data = {power * j: RatFunc.const(sign ** j) for j in range(truncation // power + 1)}
    return QSeries.from_dict(data, truncation)


def one_plus_q(truncation: int) -> QSeries:
    return QSeries([1, 1], 0, truncation)
