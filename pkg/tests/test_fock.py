from __future__ import annotations

from fractions import Fraction

import pytest

from localdt.algebra import ONE, T1, T2, ZERO, QSeries, RatFunc, antidiagonal, divisible_by_t1_plus_t2, phi
from localdt.fock import (
    FockOperator, FockVector, alpha, basis_vectors, delta_d, divisor_class, energy, operator_D_classical,
    operator_M, operator_MD, operator_Msigma, pairing, pairing_weight, unit_vector,
)
from localdt.partitions import Partition, gen_partitions

from conftest import assert_series_equal, q, sympy_series, to_sympy

P = Partition
SIGMA = T1 + T2
QMAX = 10


def basis(*parts: int) -> FockVector:
    return FockVector.basis(P(parts))


def test_heisenberg_examples():
    for d in range(1, 5):
        assert alpha(1, unit_vector(d)) == unit_vector(d - 1)
    assert alpha(-2, FockVector.vacuum()) == basis(2).scale(2)
    for k in range(1, 4):
        assert alpha(k, FockVector.vacuum()) == FockVector(-k)


@pytest.mark.parametrize("k, l", [(1, 1), (1, 2), (2, 3), (3, 3)])
def test_heisenberg_commutator(k, l):
    # [alpha_k, alpha_{-l}] = k delta_{kl}
    for d in range(0, 4):
        for v in basis_vectors(d):
            lhs = alpha(k, alpha(-l, v)) - alpha(-l, alpha(k, v))
            want = v.scale(k) if k == l else FockVector(lhs.degree)
            assert lhs == want


def test_pairing_examples():
    assert pairing(basis(2), basis(2)) == -ONE / (2 * T1 * T2)
    assert pairing(basis(1, 1), basis(1, 1)) == ONE / (2 * (T1 * T2) ** 2)
    assert pairing(basis(2), basis(1, 1)) == ZERO


def test_delta_examples():
    assert delta_d(P([1, 1])) == 2 * (T1 * T2) ** 2
    assert delta_d(P([2])) == -2 * T1 * T2
    for d in range(6):
        for mu in gen_partitions(d):
            assert delta_d(mu) * pairing_weight(mu) == ONE


@pytest.mark.parametrize("k", range(1, 5))
def test_adjoint_rule(k):
    # (alpha_k)^* = (-1)^(k-1) t1 t2 alpha_{-k}
    for d in range(0, 4):
        for u in basis_vectors(d + k):
            for w in basis_vectors(d):
                lhs = pairing(alpha(k, u), w)
                rhs = pairing(u, alpha(-k, w)) * (T1 * T2) * (-1) ** (k - 1)
                assert lhs == rhs


def test_operator_M_degree_one():
    m = operator_M(1, QMAX)
    want = sympy_series(to_sympy(SIGMA) / 2 * (1 - q) / (-q - 1), QMAX)
    assert_series_equal(m[(P([1]), P([1]))], want)


def test_operator_M_degree_two_columns():
    m = operator_M(2, QMAX)
    s = to_sympy(SIGMA)
    one_one, two = P([1, 1]), P([2])
    assert_series_equal(m[(one_one, one_one)], sympy_series(-s * (1 - q) / (1 + q), QMAX))
    assert_series_equal(m[(two, one_one)], QSeries.constant(-1, QMAX))
    assert_series_equal(m[(two, two)], sympy_series(2 * s * (q ** 2 + 1) / (q ** 2 - 1), QMAX))
    assert_series_equal(m[(one_one, two)], QSeries.constant(T1 * T2, QMAX))


@pytest.mark.parametrize("d", range(1, 6))
def test_operator_M_at_zero_acts_on_the_unit(d):
    m0 = operator_M(d, 0).at_zero()
    image = m0.apply(unit_vector(d).as_series(0))
    want = unit_vector(d).scale(-SIGMA * Fraction(d, 2)) + divisor_class(d)
    assert image == want.as_series(0)


def test_classical_divisor_examples():
    for d in range(2, 6):
        assert operator_D_classical(d).apply(unit_vector(d).as_series(0)) == divisor_class(d).as_series(0)
    d1 = operator_D_classical(1)
    assert d1[(P([1]), P([1]))].is_zero()
    d2 = operator_D_classical(2).apply(basis(2).as_series(0))
    assert d2 == (basis(2).scale(-SIGMA) + basis(1, 1).scale(T1 * T2)).as_series(0)


def test_operator_M_sigma_low_degree_examples():
    vac = operator_Msigma(0, QMAX)[(P(), P())]
    assert_series_equal(vac, phi(QMAX).scale(-SIGMA))
    one = operator_Msigma(1, QMAX)[(P([1]), P([1]))]
    want = sympy_series(-to_sympy(SIGMA) / 2 * (1 - q) / (1 + q), QMAX) - phi(QMAX).scale(SIGMA)
    assert_series_equal(one, want)


def test_operator_MD_vanishes_in_low_degree():
    for d in (0, 1):
        md = operator_MD(d, QMAX)
        assert all(e.is_zero() for row in md.entries for e in row)


@pytest.mark.parametrize("d", range(1, 6))
def test_M_is_self_adjoint(d):
    m = operator_M(d, QMAX)
    vs = basis_vectors(d)
    for u in vs:
        for w in vs:
            assert_series_equal(m.matrix_element(u, w), m.matrix_element(w, u))


@pytest.mark.parametrize("d", range(1, 6))
def test_energy_counts_boxes(d):
    assert energy(d).equal_to(FockOperator.scalar(d, QSeries.constant(d, 0)))


@pytest.mark.parametrize("d", range(1, 6))
def test_M_sigma_structure(d):
    msig = operator_Msigma(d, QMAX)
    zero_part = msig.at_zero()
    for mu in gen_partitions(d):
        # the diagonal times (t1 t2)^l is divisible by t1 + t2
        diag = msig[(mu, mu)].scale(pairing_weight(mu) * (T1 * T2) ** len(mu))
        assert all(divisible_by_t1_plus_t2(c) for _, c in diag.items())
        for nu in gen_partitions(d):
            entry = msig[(mu, nu)]
            if abs(len(mu) - len(nu)) > 1:
                assert entry.is_zero()
            if len(mu) == len(nu) and mu != nu:
                assert_series_equal(entry, zero_part[(mu, nu)])
            q_part = entry - zero_part[(mu, nu)]
            assert q_part.map(antidiagonal).is_zero()


@pytest.mark.parametrize("d", range(2, 6))
def test_divisor_class_pairs_to_zero_with_the_unit(d):
    md = operator_MD(d, QMAX)
    assert md.matrix_element(unit_vector(d), unit_vector(d)).is_zero()
    assert pairing(divisor_class(d), unit_vector(d)) == ZERO


def test_operator_json_lists_basis_in_canonical_order():
    data = operator_M(3, 2).to_json()
    assert data["basis"] == [[3], [2, 1], [1, 1, 1]]
    assert QSeries.from_json(data["entries"][0][0]).equal_to(operator_M(3, 2)[(P([3]), P([3]))])


def test_vector_json_layout():
    v = basis(2, 1).scale(T1) + basis(3).scale(RatFunc.const(Fraction(1, 3)))
    data = v.to_json()
    assert data["degree"] == 3
    assert [row["partition"] for row in data["coeffs"]] == [[3], [2, 1]]
    assert [RatFunc.from_json(row["value"]) for row in data["coeffs"]] == [RatFunc.const(Fraction(1, 3)), T1]
