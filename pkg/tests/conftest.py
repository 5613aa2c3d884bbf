from __future__ import annotations

import sympy

from localdt.algebra import QSeries, RatFunc

s, t1, t2, q = sympy.symbols("s t1 t2 q")
SYMBOLS = {"s": s, "t1": t1, "t2": t2}


def to_sympy(f: RatFunc) -> sympy.Expr:
    """Convert through the canonical text form."""
    return sympy.sympify(f.to_text().replace("^", "**"), locals=SYMBOLS)


def from_sympy(expr: sympy.Expr) -> RatFunc:
    num, den = sympy.fraction(sympy.together(sympy.sympify(expr)))
    text = f"({sympy.expand(num)})/({sympy.expand(den)})".replace("**", "^")
    return RatFunc.from_text(text)


def sympy_series(expr: sympy.Expr, truncation: int) -> QSeries:
    """Expand ``expr`` in q independently of the package's series code."""
    expr = sympy.sympify(expr)
    if expr.is_rational_function(q):
        coeffs = _rational_coefficients(expr, truncation)
    else:
        expansion = sympy.series(expr, q, 0, truncation + 1).removeO()
        poly = sympy.Poly(sympy.expand(expansion), q)
        coeffs = dict(zip((int(m[0]) for m in poly.monoms()), poly.coeffs()))
    return QSeries.from_dict({n: from_sympy(c) for n, c in coeffs.items()}, truncation)


def _rational_coefficients(expr: sympy.Expr, truncation: int) -> dict[int, sympy.Expr]:
    """Long division of numerator by denominator, both polynomials in q."""
    num, den = (sympy.Poly(part, q) for part in sympy.fraction(sympy.together(expr)))
    shift = min(m[0] for m in den.monoms())
    b = [den.coeff_monomial(q ** k) for k in range(shift, den.degree() + 1)]
    a = [num.coeff_monomial(q ** k) for k in range(num.degree() + 1)]
    out: list[sympy.Expr] = []
    for n in range(truncation + shift + 1):
        acc = a[n] if n < len(a) else 0
        acc -= sum(b[k] * out[n - k] for k in range(1, min(n, len(b) - 1) + 1))
        out.append(sympy.cancel(acc / b[0]))
    return {n - shift: c for n, c in enumerate(out) if c != 0}


def assert_series_equal(got: QSeries, want: QSeries) -> None:
    assert got.equal_to(want), f"\n got  {got.to_text()}\n want {want.to_text()}"
