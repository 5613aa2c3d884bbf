from __future__ import annotations

import pytest

from localdt import tqft
from localdt.algebra import ONE, T1, T2, ZERO, QSeries, macmahon_neg
from localdt.fock import FockVector, divisor_class, operator_MD, pairing_weight
from localdt.partitions import Partition, gen_partitions
from localdt.symfunc import euler_class

from conftest import assert_series_equal, q, sympy_series, t1, t2

P = Partition
SIGMA = T1 + T2
T1T2 = T1 * T2
QMAX = 6


def unit(d: int) -> Partition:
    return P([1] * d)


# -- degree 0 ---------------------------------------------------------------------

def test_degree_zero_examples():
    assert_series_equal(tqft.degree0(0, 0, 0, 0, 8), macmahon_neg(8).power(-2 * SIGMA ** 2 / T1T2))
    for k1, k2 in ((0, 0), (1, -2), (-1, -1)):
        want = macmahon_neg(8).power(-SIGMA ** 2 / T1T2 - (k1 + k2))
        assert_series_equal(tqft.degree0(0, k1, k2, 1, 8), want)


@pytest.mark.parametrize("g, r", [(0, 2), (1, 1), (2, 3)])
def test_degree_zero_recursions(g, r):
    for k1 in range(-2, 3):
        for k2 in range(-2, 3):
            whole = tqft.degree0(g, k1, k2, r, 6)
            if g:
                assert_series_equal(whole, tqft.degree0(g - 1, k1, k2, r + 2, 6))
            split = tqft.degree0(g, k1, 0, 1, 6) * tqft.degree0(0, 0, k2, r + 1, 6)
            assert_series_equal(whole, split)


@pytest.mark.parametrize("k1, k2", [(0, 0), (-1, 0), (2, -1), (-2, -2)])
def test_degree_zero_exponent_by_localization(k1, k2):
    assert tqft.degree0_localization_exponent(k1, k2) == tqft.degree0_exponent(0, k1, k2, 0)
    assert tqft.degree0_localization_exponent(k1, k2, relative=True) == tqft.degree0_exponent(0, k1, k2, 1)


# -- level (0,0) blocks ------------------------------------------------------

@pytest.mark.parametrize("d", range(1, 4))
def test_tube_is_the_identity(d):
    block = tqft.tube(d, QMAX)
    for mu in gen_partitions(d):
        for nu in gen_partitions(d):
            assert_series_equal(block[(mu, nu)], QSeries.constant(1 if mu == nu else 0, QMAX))
    lowered = block.lower_slot(1)
    assert lowered.equal_to(tqft.tube_lower(d, QMAX))
    assert lowered.raise_slot(1).equal_to(block)
    with pytest.raises(ValueError):
        block.raise_slot(1)


def test_cap00_examples():
    assert tqft.cap00_value(P([1, 1])) == ONE / (2 * T1T2 ** 2)
    assert tqft.cap00_value(P([2])) == ZERO
    assert tqft.cap00_value(P([1])) == ONE / T1T2


def test_pants_D_examples():
    for d in (0, 1):
        block = tqft.pants_D(d, QMAX)
        assert all(v.is_zero() for v in block.entries.values())
    for d in (2, 3):
        block = tqft.pants_D(d, QMAX)
        md = operator_MD(d, QMAX)
        assert block[(unit(d), unit(d))].is_zero()
        for mu in gen_partitions(d):
            for nu in gen_partitions(d):
                want = md[(mu, nu)].scale(pairing_weight(mu))
                assert_series_equal(block[(mu, nu)], want)


@pytest.mark.parametrize("d", range(1, 4))
def test_pants_unit_axiom_and_symmetry(d):
    pants = tqft.pants_full(d, QMAX)
    parts = gen_partitions(d)
    for a in parts:
        for b in parts:
            want = QSeries.constant(pairing_weight(a) if a == b else ZERO, QMAX)
            assert_series_equal(pants[(a, unit(d), b)], want)
            for c in parts:
                assert_series_equal(pants[(a, b, c)], pants[(b, a, c)])
                assert_series_equal(pants[(a, b, c)], pants[(a, c, b)])


@pytest.mark.parametrize("d", range(2, 4))
def test_pants_contracted_with_the_divisor(d):
    pants = tqft.pants_full(d, QMAX)
    md_block = tqft.pants_D(d, QMAX)
    divisor = divisor_class(d)
    for mu in gen_partitions(d):
        for nu in gen_partitions(d):
            total = QSeries.zero(QMAX)
            for gamma, c in divisor.coeffs.items():
                total = total + pants[(mu, gamma, nu)].scale(c)
            assert_series_equal(total, md_block[(mu, nu)])


def test_degree_two_pants_by_hand():
    # e_(2) = -D, so e_(2) e_(2) = M_D^2 applied to the unit
    md = operator_MD(2, QMAX)
    pants = tqft.pants_full(2, QMAX)
    two, ones = P([2]), P([1, 1])
    square = (md @ md).apply(FockVector.basis(ones).as_series(QMAX))
    for lam in (two, ones):
        want = square[lam].scale(pairing_weight(lam)) if lam in square.coeffs else QSeries.zero(QMAX)
        assert_series_equal(pants[(lam, two, two)], want)
        for nu in (two, ones):
            # multiplication by e_(2) is -M_D
            assert_series_equal(pants[(lam, two, nu)], (-md[(lam, nu)]).scale(pairing_weight(lam)))


# -- level (-1,0) ---------------------------------------------------------------------

def test_cap_m10_examples():
    assert_series_equal(tqft.cap_m10_value(P([1]), 8), sympy_series(1 / (t2 * (1 + q)), 8))
    assert_series_equal(tqft.cap_m10_value(P([2]), 8), sympy_series(1 / (2 * t2 * (1 - q ** 2)), 8))
    assert_series_equal(tqft.cap_m10(2, 8)[(P([1, 1]),)], tqft.cap_m10_value(P([1, 1]), 8))


@pytest.mark.parametrize("d", range(1, 4))
def test_level_tubes_compose_to_identity(d):
    tubes = tqft.level_tubes(d, QMAX)
    parts = gen_partitions(d)
    for down, up in (((-1, 0), (1, 0)), ((0, -1), (0, 1))):
        for mu in parts:
            for nu in parts:
                acc = QSeries.zero(QMAX)
                for gamma in parts:
                    acc = acc + tubes[down][(mu, gamma)] * tubes[up][(gamma, nu)]
                assert_series_equal(acc, QSeries.constant(1 if mu == nu else 0, QMAX))


def test_level_step_must_be_a_unit_step():
    with pytest.raises(ValueError):
        tqft.level_operator(1, 2, (1, 1))


@pytest.mark.parametrize("d", range(1, 4))
def test_cap_by_gluing_tube_onto_level_zero_cap(d):
    for lam in gen_partitions(d):
        assert_series_equal(tqft.assemble(0, -1, 0, [lam], d, QMAX), tqft.cap_m10_value(lam, QMAX))


# -- assembly ---------------------------------------------------------------------

@pytest.mark.parametrize("d", range(1, 4))
def test_assemble_small_surfaces(d):
    parts = gen_partitions(d)
    for lam in parts:
        assert_series_equal(tqft.assemble(0, 0, 0, [lam], d, QMAX), QSeries.constant(tqft.cap00_value(lam), QMAX))
        for nu in parts:
            want = QSeries.constant(pairing_weight(lam) if lam == nu else ZERO, QMAX)
            assert_series_equal(tqft.assemble(0, 0, 0, [lam, nu], d, QMAX), want)
    # the torus is the trace of the identity
    assert_series_equal(tqft.assemble(1, 0, 0, [], d, QMAX), QSeries.constant(len(parts), QMAX))


@pytest.mark.parametrize("d", [2, 3])
def test_genus_two_classical_limit_is_sum_of_euler_classes(d):
    got = tqft.assemble(2, 0, 0, [], d, 0)
    total = sum((euler_class(mu) for mu in gen_partitions(d)), ZERO)
    assert got[0] == total


@pytest.mark.parametrize("g, k1, k2", [(0, 0, 0), (1, -1, 0), (2, 1, -2), (0, -2, 1), (3, 0, 2)])
def test_degree_one_partition_function(g, k1, k2):
    expr = (t1 * t2) ** (g - 1) * t1 ** (-k1) * t2 ** (-k2) * (1 + q) ** (k1 + k2)
    assert_series_equal(tqft.assemble(g, k1, k2, [], 1, 8), sympy_series(expr, 8))


@pytest.mark.parametrize("g, d", [(1, 1), (1, 2), (2, 1)])
def test_decomposition_independence(g, d):
    parts = gen_partitions(d)
    cases = [(0, 0, []), (-1, 0, [parts[0]]), (0, -1, [parts[-1], parts[0]]), (-1, 1, [])]
    for k1, k2, ins in cases:
        ref = tqft.assemble(g, k1, k2, ins, d, QMAX)
        for rotate in range(max(1, len(ins))):
            for first in (False, True):
                other = tqft.assemble_by_gluing(g, k1, k2, ins, d, QMAX, rotate=rotate, level_first=first)
                assert_series_equal(other, ref)


@pytest.mark.parametrize("d", range(1, 4))
def test_two_decompositions_of_genus_two_and_capped_genus_one(d):
    assert_series_equal(tqft.assemble_by_gluing(2, 0, 0, [], d, 4), tqft.assemble(2, 0, 0, [], d, 4))
    for lam in gen_partitions(d):
        a = tqft.assemble_by_gluing(1, -1, 0, [lam], d, 4)
        b = tqft.assemble_by_gluing(1, -1, 0, [lam], d, 4, level_first=True)
        assert_series_equal(a, b)
        assert_series_equal(a, tqft.assemble(1, -1, 0, [lam], d, 4))


def test_assemble_rejects_bad_input():
    with pytest.raises(ValueError):
        tqft.assemble(0, 0, 0, [P([2])], 1, 3)
    with pytest.raises(ValueError):
        tqft.assemble(-1, 0, 0, [], 1, 3)
    assert tqft.assemble(3, 1, 1, [], 0, 4) == QSeries.constant(1, 4)


@pytest.mark.parametrize("d", [2, 3])
def test_raised_level_is_a_palindromic_laurent_polynomial(d):
    value = tqft.assemble(0, 1, 0, [], d, d + 6)
    low = value.valuation
    assert low < 0
    for n in range(low, d + 7):
        mirror = d - n
        want = value[mirror] if low <= mirror <= d + 6 else ZERO
        assert value[n] == want


# -- starred normalization ------------------------------------------------------------

def test_starred_series_normalizes_half_powers():
    s = tqft.StarredSeries.make(-3, QSeries.constant(ONE, 4))
    assert s.half_power == 1
    assert s.series == QSeries.constant(ONE, 4).shift(-2)
    assert tqft.StarredSeries.make(2, QSeries.constant(ONE, 2)).series == QSeries.monomial(-1, 1, 3)


def test_starred_cap_relation():
    lam = P([2])
    plain = tqft.assemble(0, -1, 0, [lam], 2, QMAX)
    star = tqft.starred(0, -1, 0, [lam], 2, QMAX)
    # (-1)^(-d) (-q)^(d/2) with d = 2
    assert star.half_power == 0
    assert_series_equal(star.series, plain.shift(1).scale(-1))


@pytest.mark.parametrize("d", range(1, 4))
def test_gw_dt_cap_match(d):
    for lam in gen_partitions(d):
        assert tqft.starred(0, -1, 0, [lam], d, 8).equal_to(tqft.gw_star_cap_m10(lam, 8))


def test_starred_raising():
    assert tqft.starred_raising(P([2, 1])) == T1T2 ** 2 * 2
    assert tqft.starred_raising(P([2])) == -T1T2 * 2


# -- rational reconstruction ---------------------------------------------------------

def test_rational_fit_recovers_a_rational_function():
    series = sympy_series((1 + 2 * q) / ((1 - q) * (1 + q ** 2)) * t1, 12)
    fit = tqft.rational_fit(series, 7)
    assert_series_equal(fit.expand(12), series)
    assert len(fit.denominator) == 4


def test_rational_fit_handles_valuation_shift():
    series = tqft.cap_m10_value(P([1]), 10).shift(3)
    fit = tqft.rational_fit(series, 5)
    assert fit.valuation == 3
    assert_series_equal(fit.expand(13), series)


def test_rational_fit_needs_enough_coefficients():
    with pytest.raises(ValueError):
        tqft.rational_fit(QSeries([1, 1], 0, 4), 1)


def test_rational_fit_detects_non_rational_series_on_held_out_orders():
    series = macmahon_neg(12)
    try:
        fit = tqft.rational_fit(series, 6)
    except ValueError:
        return
    assert not fit.expand(12).equal_to(series)


def test_block_json_layout():
    data = tqft.tube(2, 1).to_json()
    assert data["slots"] == ["lower", "upper"]
    assert len(data["entries"]) == 4
