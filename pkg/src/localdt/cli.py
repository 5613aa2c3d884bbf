"""Command-line front end.

Subcommands::

    localdt dt      --degree D --genus G --level K1,K2 [--cap LAM | --insertions "A;B"] --qmax Q
    localdt vertex  --degree D --qmax Q [--frame standard|solver|cy|custom --weights S1,S2,S3]
    localdt check   SUITE [--dmax N] [--qmax Q]

Results go to stdout (``--format text`` or ``json``), progress to stderr.
Exit codes: 0 success, 1 usage, 2 computation error, 3 check failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import boxcount, fock, rubber, symfunc, tqft, vertex
from .algebra import T1, T2, QSeries, RatFunc, antidiagonal, macmahon, macmahon_neg, one_plus_q, phi
from .linalg import PrecisionError
from .partitions import Partition, gen_partitions, parse_partition, zee

log = logging.getLogger("localdt")

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_CHECK = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class JobSpec:
    command: str
    degree: int | None = None
    genus: int = 0
    level: tuple[int, int] = (0, 0)
    insertions: tuple[Partition, ...] = ()
    qmax: int = 6
    output: str = "text"
    suite: str | None = None
    dmax: int | None = None
    frame: str = "standard"
    weights: tuple[str, ...] = field(default_factory=tuple)
    starred: bool = False

    def __post_init__(self) -> None:
        if self.qmax < 0:
            raise UsageError("--qmax must be nonnegative")
        if self.degree is not None and self.degree < 0:
            raise UsageError("--degree must be nonnegative")
        if self.genus < 0:
            raise UsageError("--genus must be nonnegative")
        if self.degree is not None:
            for lam in self.insertions:
                if lam.size != self.degree:
                    raise UsageError(f"insertion {list(lam)} is not a partition of {self.degree}")


# ---------------------------------------------------------------------------
# parsing


def _parse_level(text: str) -> tuple[int, int]:
    try:
        k1, k2 = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--level expects two integers 'k1,k2', got {text!r}") from exc
    return k1, k2


def _parse_partition(text: str) -> Partition:
    body = text.strip().strip("()[]")
    try:
        raw = [int(x) for x in body.split(",")] if body else []
    except ValueError as exc:
        raise UsageError(f"cannot read partition {text!r}") from exc
    if any(p <= 0 for p in raw) or raw != sorted(raw, reverse=True):
        raise UsageError(f"{text!r} is not a partition (positive, weakly decreasing)")
    return parse_partition(body)


def _parse_insertions(text: str | None) -> tuple[Partition, ...]:
    if text is None or not text.strip():
        return ()
    return tuple(_parse_partition(piece) for piece in text.split(";"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="localdt", description="Equivariant DT theory of local curves.")
    parser.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    dt = sub.add_parser("dt", help="partition function DT(g|k1,k2)")
    dt.add_argument("--degree", type=int)
    dt.add_argument("--genus", type=int, default=0)
    dt.add_argument("--level", default="0,0")
    dt.add_argument("--cap", help="single insertion, e.g. 2,1")
    dt.add_argument("--insertions", help="insertions separated by ';', e.g. '2;1,1'")
    dt.add_argument("--qmax", type=int, default=6)
    dt.add_argument("--starred", action="store_true", help="print the starred normalization")
    dt.add_argument("--format", dest="output", choices=("text", "json"), default="text")

    vx = sub.add_parser("vertex", help="reduced 1-legged vertices of degree d")
    vx.add_argument("--degree", type=int, required=True)
    vx.add_argument("--qmax", type=int, default=6)
    vx.add_argument("--frame", choices=("standard", "solver", "cy", "custom"), default="standard")
    vx.add_argument("--cy", action="store_true", help="shorthand for --frame cy")
    vx.add_argument("--weights", help="custom frame: s1,s2,s3 as polynomials or (num)/(den) in s,t1,t2")
    vx.add_argument("--format", dest="output", choices=("text", "json"), default="text")

    ck = sub.add_parser("check", help="run a verification suite")
    ck.add_argument("suite", choices=sorted(SUITES) + ["all"])
    ck.add_argument("--dmax", type=int)
    ck.add_argument("--qmax", type=int, default=8)
    ck.add_argument("--format", dest="output", choices=("text", "json"), default="json")
    return parser


def job_from_args(args: argparse.Namespace) -> JobSpec:
    if args.command == "dt":
        if args.cap is not None and args.insertions is not None:
            raise UsageError("give either --cap or --insertions, not both")
        ins = (_parse_partition(args.cap),) if args.cap is not None else _parse_insertions(args.insertions)
        degree = args.degree
        if degree is None:
            degree = ins[0].size if ins else 0
        return JobSpec("dt", degree, args.genus, _parse_level(args.level), ins, args.qmax,
                       args.output, starred=args.starred)
    if args.command == "vertex":
        frame = "cy" if args.cy else args.frame
        weights = tuple(w.strip() for w in args.weights.split(",")) if args.weights else ()
        if frame == "custom" and len(weights) != 3:
            raise UsageError("--frame custom needs --weights s1,s2,s3")
        return JobSpec("vertex", args.degree, qmax=args.qmax, output=args.output, frame=frame, weights=weights)
    return JobSpec("check", qmax=args.qmax, output=args.output, suite=args.suite, dmax=args.dmax)


# ---------------------------------------------------------------------------
# commands


def cmd_partition_function(job: JobSpec) -> str:
    d, (k1, k2) = job.degree or 0, job.level
    log.info("DT(%d|%d,%d) degree %d, %d insertions, through q^%d", job.genus, k1, k2, d,
             len(job.insertions), job.qmax)
    if d == 0:
        value = tqft.degree0(job.genus, k1, k2, len(job.insertions), job.qmax)
    else:
        value = tqft.assemble(job.genus, k1, k2, job.insertions, d, job.qmax)
    head = {"genus": job.genus, "level": [k1, k2], "degree": d,
            "insertions": [list(p) for p in job.insertions]}
    if job.starred and d > 0:
        star = tqft.starred_from(job.genus, k1, k2, d, value)
        if job.output == "json":
            return _dumps({**head, "starred": star.to_json()})
        return star.to_text()
    if job.output == "json":
        return _dumps({**head, "series": value.to_json()})
    return value.to_text()


def _frame_map(job: JobSpec) -> Callable[[RatFunc], RatFunc]:
    if job.frame == "solver":
        return lambda f: f
    if job.frame == "standard":
        return vertex.to_general_frame
    if job.frame == "cy":
        return vertex.calabi_yau
    try:
        s1, s2, s3 = (RatFunc.from_text(w) for w in job.weights)
    except ValueError as exc:
        raise UsageError(f"cannot read custom weights {job.weights}") from exc
    return lambda f: vertex.to_general_frame(f).substitute({"s": s1, "t1": s2, "t2": s3})


def cmd_vertex(job: JobSpec) -> str:
    d = job.degree or 0
    convert = _frame_map(job)
    log.info("solving the degree %d vertex system through q^%d", d, job.qmax)
    sols = vertex.solve_vertex(d, job.qmax)
    values = {mu: sols[mu].value.map(convert) for mu in gen_partitions(d)}
    if job.output == "json":
        return _dumps({"degree": d, "frame": job.frame, "weights": list(job.weights),
                       "vertices": [{"profile": list(mu), "series": v.to_json()} for mu, v in values.items()]})
    return "\n".join(f"{tuple(mu)}: {v.to_text()}" for mu, v in values.items())


def _dumps(obj: object) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# verification suites


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _result(name: str, failures: list[str]) -> CheckResult:
    return CheckResult(name, not failures, "; ".join(failures[:5]))


def check_macmahon(dmax: int, qmax: int) -> CheckResult:
    counts = boxcount.volume_counts(Partition(), qmax)
    expected = macmahon(qmax)
    failures = [f"q^{n}: {counts[n]} boxes vs {expected[n]}" for n in range(qmax + 1)
                if RatFunc.const(counts[n]) != expected[n]]
    return _result("macmahon", failures)


def check_cy_vertex(dmax: int, qmax: int) -> CheckResult:
    failures = []
    for d in range(dmax + 1):
        for lam in gen_partitions(d):
            log.info("cy-vertex %s", tuple(lam))
            got = boxcount.cy_vertex(lam, qmax, reduced=True)
            if not got.equal_to(vertex.hook_product_series(lam, qmax)):
                failures.append(f"{tuple(lam)}")
    return _result("cy-vertex", failures)


def check_degree0(dmax: int, qmax: int) -> CheckResult:
    failures = []
    for g in range(3):
        for r in range(4):
            for k1 in range(-2, 3):
                for k2 in range(-2, 3):
                    whole = tqft.degree0(g, k1, k2, r, qmax)
                    if g >= 1 and not whole.equal_to(tqft.degree0(g - 1, k1, k2, r + 2, qmax)):
                        failures.append(f"genus reduction g={g} r={r}")
                    for g1 in range(g + 1):
                        for r1 in range(r + 1):
                            split = (tqft.degree0(g1, k1, 0, r1 + 1, qmax)
                                     * tqft.degree0(g - g1, 0, k2, r - r1 + 1, qmax))
                            if not whole.equal_to(split):
                                failures.append(f"splitting g={g} r={r} k=({k1},{k2})")
    for k1 in range(-2, 3):
        for k2 in range(-2, 3):
            if tqft.degree0_localization_exponent(k1, k2) != tqft.degree0_exponent(0, k1, k2, 0):
                failures.append(f"localization exponent k=({k1},{k2})")
    return _result("degree0", failures)


def _r_value(mu: Partition, qmax: int) -> QSeries:
    op = fock.operator_Msigma(mu.size, qmax)
    return op[(mu, mu)]


def sigma_bracket_diagonal(mu: Partition, qmax: int) -> QSeries:
    """<mu|sigma_1(F)|mu> / <mu|mu> = -q^|mu| <mu|M_sigma|mu> / <mu|mu>."""
    op = fock.operator_Msigma(mu.size, qmax)
    return -(op[(mu, mu)].shift(mu.size))


def check_additivity(dmax: int, qmax: int) -> CheckResult:
    failures = []
    for d in range(1, dmax + 1):
        for mu in gen_partitions(d):
            lhs = sigma_bracket_diagonal(mu, qmax)
            rhs = phi(qmax).shift(d).scale(-(T1 + T2) * (len(mu) - 1))
            for part in mu:
                rhs = rhs + sigma_bracket_diagonal(Partition([part]), qmax).shift(d - part)
            if not lhs.equal_to(rhs):
                failures.append(f"{tuple(mu)}")
    return _result("additivity", failures)


def check_operators(dmax: int, qmax: int) -> CheckResult:
    failures = []
    for d in range(1, dmax + 1):
        log.info("operators, degree %d", d)
        m = fock.operator_M(d, qmax)
        basis = fock.basis_vectors(d)
        for u in basis:
            for w in basis:
                if not m.matrix_element(u, w).equal_to(m.matrix_element(w, u)):
                    failures.append(f"M not self-adjoint at degree {d}")
        msig = fock.operator_Msigma(d, qmax)
        diff = msig - msig.at_zero()
        if not all(e.map(antidiagonal).is_zero() for r in diff.entries for e in r):
            failures.append(f"M_sigma - M_sigma(0) survives t2 = -t1 at degree {d}")
        target = fock.operator_D_classical(d) - fock.FockOperator.scalar(
            d, QSeries.constant((T1 + T2) * Fraction(d, 2), 0))
        if not m.at_zero().equal_to(target):
            failures.append(f"M(0) differs from the shifted classical operator at degree {d}")
    return _result("operators", failures)


def check_rubber_ode(dmax: int, qmax: int) -> CheckResult:
    failures = []
    for d in range(dmax + 1):
        log.info("rubber ode, degree %d", d)
        res = rubber.ode_residual(d, qmax)
        if not all(e.is_zero() for r in res.entries for e in r):
            failures.append(f"residual at degree {d}")
    vac = fock.FockVector.vacuum()
    if not rubber.rubber_bracket(vac, vac, qmax).equal_to(macmahon_neg(qmax).power(-(T1 + T2))):
        failures.append("degree 0 bracket")
    s1 = rubber.operator_S(1, qmax)
    if not s1[(Partition([1]), Partition([1]))].equal_to(one_plus_q(qmax).power(T1 + T2)):
        failures.append("degree 1 solution")
    return _result("rubber-ode", failures)


def check_fixed_points(dmax: int, qmax: int) -> CheckResult:
    failures = []
    for d in range(1, dmax + 1):
        classes = symfunc.fixed_point_classes(d)
        for mu, vm in classes.items():
            for nu, vn in classes.items():
                value = fock.pairing(vm, vn)
                if mu == nu:
                    # the classes are normalized by <[I_mu],[I_mu]> = e(T_mu); see the README
                    if value != symfunc.euler_class(mu):
                        failures.append(f"self-pairing of {tuple(mu)} is not e(T)")
                elif not value.is_zero():
                    failures.append(f"{tuple(mu)} and {tuple(nu)} not orthogonal")
            for lam in gen_partitions(d):
                got = antidiagonal(fock.pairing(vm, fock.FockVector.basis(lam)))
                if got != antidiagonal(symfunc.character_pairing_value(mu, lam)):
                    failures.append(f"character formula at ({tuple(mu)}, {tuple(lam)})")
    return _result("fixed-points", failures)


def check_cap_m10(dmax: int, qmax: int) -> CheckResult:
    failures = []
    for d in range(1, dmax + 1):
        log.info("vertex system, degree %d", d)
        sols = vertex.solve_vertex(d, qmax)
        unknowns = {mu: v.value for mu, v in sols.items()}
        for lam in gen_partitions(d):
            lhs = vertex.cap_m10_lhs(lam, qmax)
            rhs = vertex.cap_m10_rhs(lam, unknowns, qmax)
            if not lhs.equal_to(rhs):
                failures.append(f"localization identity at {tuple(lam)}")
        for mu, v in sols.items():
            cy = v.value.map(vertex.calabi_yau)
            if not cy.equal_to(vertex.hook_product_series(mu, qmax)):
                failures.append(f"Calabi-Yau limit of {tuple(mu)}")
        if d == 1:
            w = vertex.vertex_general(Partition([1]), qmax).value
            if not w.equal_to(vertex.closed_vertex_deg1(vertex.GENERAL_FRAME, qmax, reduced=True)):
                failures.append("degree 1 closed form")
    return _result("cap-m10", failures)


def check_gw_dt(dmax: int, qmax: int) -> CheckResult:
    failures = []
    for d in range(1, dmax + 1):
        for lam in gen_partitions(d):
            dt_star = tqft.starred(0, -1, 0, [lam], d, qmax)
            if not dt_star.equal_to(tqft.gw_star_cap_m10(lam, qmax)):
                failures.append(f"{tuple(lam)}")
    return _result("gw-dt", failures)


def check_tqft_gluing(dmax: int, qmax: int) -> CheckResult:
    failures = []
    for d in range(1, dmax + 1):
        log.info("gluing, degree %d", d)
        parts = gen_partitions(d)
        unit = Partition([1] * d)
        pants = tqft.pants_full(d, qmax)
        for mu in parts:
            for nu in parts:
                want = fock.pairing_weight(mu) if mu == nu else RatFunc.const(0)
                if not pants[(mu, unit, nu)].equal_to(QSeries.constant(want, qmax)):
                    failures.append(f"unit axiom at {tuple(mu)},{tuple(nu)}")
        tubes = tqft.level_tubes(d, qmax)
        for down, up in (((-1, 0), (1, 0)), ((0, -1), (0, 1))):
            for mu in parts:
                for nu in parts:
                    acc = QSeries.zero(qmax)
                    for gamma in parts:
                        acc = acc + tubes[down][(mu, gamma)] * tubes[up][(gamma, nu)]
                    if not acc.equal_to(QSeries.constant(1 if mu == nu else 0, qmax)):
                        failures.append(f"level tubes {down},{up} do not compose to the identity")
        cases = [(1, 0, 0, []), (2, 0, 0, []), (1, -1, 0, [parts[0]]), (0, -1, 1, [parts[0], parts[-1], parts[0]])]
        for g, k1, k2, ins in cases:
            ref = tqft.assemble(g, k1, k2, ins, d, qmax)
            for rotate in range(max(1, len(ins))):
                for first in (False, True):
                    other = tqft.assemble_by_gluing(g, k1, k2, ins, d, qmax, rotate=rotate, level_first=first)
                    if not ref.equal_to(other):
                        failures.append(f"decomposition dependence at g={g} k=({k1},{k2}) d={d}")
    return _result("tqft-gluing", failures)


def _poly_power(base: Sequence[int], exponent: int) -> list[int]:
    out = [1]
    for _ in range(exponent):
        out = [sum(out[i] * base[k - i] for i in range(len(out)) if 0 <= k - i < len(base))
               for k in range(len(out) + len(base) - 1)]
    return out


def _closed_rational(prefactor: RatFunc, numerator: Sequence[int], denominator: Sequence[int]) -> tqft.RationalFit:
    return tqft.RationalFit(0, tuple(prefactor * c for c in numerator), tuple(RatFunc.const(c) for c in denominator))


def check_rationality(dmax: int, qmax: int) -> CheckResult:
    failures = []
    closed: list[tuple[str, QSeries, tqft.RationalFit]] = []
    for d in range(1, dmax + 1):
        for lam in gen_partitions(d):
            den = [1]
            for part in lam:
                factor = [1] + [0] * (part - 1) + [-((-1) ** part)]
                den = [sum(den[i] * factor[k - i] for i in range(len(den)) if 0 <= k - i < len(factor))
                       for k in range(len(den) + len(factor) - 1)]
            pre = T2 ** (-len(lam)) * Fraction(1, zee(lam))
            closed.append((f"cap {tuple(lam)}", tqft.cap_m10_value(lam, qmax), _closed_rational(pre, [1], den)))
    for g, k1, k2 in ((0, -1, 0), (1, 1, -2), (2, -1, -2), (0, 2, 1)):
        pre = (T1 * T2) ** (g - 1) * T1 ** (-k1) * T2 ** (-k2)
        k = k1 + k2
        num, den = (_poly_power([1, 1], k), [1]) if k >= 0 else ([1], _poly_power([1, 1], -k))
        closed.append((f"degree 1 DT({g}|{k1},{k2})", tqft.assemble(g, k1, k2, [], 1, qmax),
                       _closed_rational(pre, num, den)))
    tube = tqft.level_tube(1, qmax, (-1, 0))[(Partition([1]), Partition([1]))]
    closed.append(("degree 1 (-1,0) tube", tube, _closed_rational(T1, [1], [1, 1])))
    for name, series, form in closed:
        if not form.expand(qmax).equal_to(series):
            failures.append(f"{name} differs from its closed form")
    half = (qmax + 2) // 2
    for key, series in tqft.pants_full(2, qmax).entries.items():
        name = f"pants {tuple(map(tuple, key))}"
        try:
            fit = tqft.rational_fit(series, half)
        except ValueError:
            failures.append(f"no fit for {name}")
            continue
        if not fit.expand(qmax).equal_to(series):
            failures.append(f"fit of {name} fails on the held-out orders")
    return _result("rationality", failures)


SUITES: dict[str, tuple[Callable[[int, int], CheckResult], int]] = {
    "macmahon": (check_macmahon, 0),
    "cy-vertex": (check_cy_vertex, 4),
    "degree0": (check_degree0, 0),
    "operators": (check_operators, 5),
    "additivity": (check_additivity, 5),
    "rubber-ode": (check_rubber_ode, 4),
    "fixed-points": (check_fixed_points, 5),
    "cap-m10": (check_cap_m10, 3),
    "gw-dt": (check_gw_dt, 5),
    "tqft-gluing": (check_tqft_gluing, 3),
    "rationality": (check_rationality, 3),
}


def cmd_check(job: JobSpec) -> tuple[str, bool]:
    names = sorted(SUITES) if job.suite == "all" else [job.suite]
    results = []
    for name in names:
        fn, default_dmax = SUITES[name]
        start = time.monotonic()
        log.info("suite %s", name)
        res = fn(job.dmax if job.dmax is not None else default_dmax, job.qmax)
        log.info("suite %s finished in %.1fs", name, time.monotonic() - start)
        results.append(res)
    ok = all(r.passed for r in results)
    if job.output == "json":
        body = _dumps({"passed": ok, "suites": [{"name": r.name, "passed": r.passed, "detail": r.detail}
                                                 for r in results]})
    else:
        body = "\n".join(f"{'PASS' if r.passed else 'FAIL'} {r.name}" + (f": {r.detail}" if r.detail else "")
                         for r in results)
    return body, ok


# ---------------------------------------------------------------------------
# entry point


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    """Let ``--level -1,0`` through argparse by rewriting it as ``--level=-1,0``."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        if argv[i] in ("--level", "--weights") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        job = job_from_args(args)
        if job.command == "dt":
            out, ok = cmd_partition_function(job), True
        elif job.command == "vertex":
            out, ok = cmd_vertex(job), True
        else:
            out, ok = cmd_check(job)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, ArithmeticError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_COMPUTE
    print(out)
    return EXIT_OK if ok else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
