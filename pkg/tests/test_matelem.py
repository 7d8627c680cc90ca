import json
import math
from fractions import Fraction

import pytest

from airylab.errors import ArgumentError, DomainError
from airylab.matelem import (
    MomentExpression,
    airy_product_integral,
    bouncer_dipole,
    derivative_integral,
    dipole_half_sho,
    dipole_linear,
    even_even_z2,
    gordon_integral,
    half_sho_y2,
    half_sho_y3,
    linear_matrix_element,
    moment_expression,
    moment_recursion_airy,
    oscillator_recursion,
    quad_airy_integral,
    quad_derivative_integral,
    quad_half_line_moment,
    quad_matrix_element,
    sho_ladder_element,
    virial_ratios,
)
from airylab.specfun import airy_ai, airy_ai_prime
from airylab.spectra import Parity, SpectralPoint, SystemId, airy_zero, boundary_value, even, odd

Z1, Z2 = airy_zero("ai", 1), airy_zero("ai", 2)
E1, E2 = airy_zero("aiprime", 1), airy_zero("aiprime", 2)


def sho(n):
    return SpectralPoint(SystemId.HALF_SHO, n)


def test_gordon_examples():
    assert gordon_integral(0, Z1, Z1) == pytest.approx(airy_ai_prime(-Z1) ** 2, rel=1e-14)
    assert gordon_integral(0, Z1, Z1) == pytest.approx(0.49170, abs=1e-5)
    assert abs(gordon_integral(0, Z1, Z2)) < 1e-12
    norm = 1 / (math.sqrt(2) * airy_ai_prime(-Z1)) / (math.sqrt(2 * E1) * airy_ai(-E1))
    assert 2 * norm * gordon_integral(1, Z1, E1) == pytest.approx(dipole_linear(1, 1), rel=1e-12)


def test_product_integral_result_fields():
    res = airy_product_integral(2, 3.0, 5.5)
    assert res.p == 2 and len(res.f_terms) == 4
    assert res.f_terms[0] == pytest.approx(airy_ai(-3.0) * airy_ai(-5.5))


@pytest.mark.parametrize("p", [0, 1, 2])
@pytest.mark.parametrize("a,b", [(Z1, Z1), (E2, E2), (1.7, 1.7), (Z1, E1), (2.5, 6.25), (E1, 9.0)])
def test_closed_forms_against_quadrature(p, a, b):
    closed = gordon_integral(p, a, b)
    quad = quad_airy_integral(p, a, b)
    assert closed == pytest.approx(quad, rel=1e-9, abs=1e-12)


def test_gordon_errors():
    with pytest.raises(ArgumentError):
        gordon_integral(3, Z1, Z1)
    with pytest.raises(DomainError):
        gordon_integral(1, Z1, Z1 * (1 + 1e-12))
    with pytest.raises(DomainError):
        gordon_integral(0, -1.0, 2.0)


def test_derivative_integral():
    assert derivative_integral(Z1) / airy_ai_prime(-Z1) ** 2 == pytest.approx(Z1 / 3, rel=1e-13)
    assert derivative_integral(E1) / (E1 * airy_ai(-E1) ** 2) == pytest.approx(E1 / 3, rel=1e-13)
    assert derivative_integral(Z2) == pytest.approx(quad_derivative_integral(Z2), rel=1e-9)


def test_dipole_linear_examples():
    assert dipole_linear(1, 1) == pytest.approx(0.8628634620, abs=1e-9)
    assert linear_matrix_element(1, odd(3), odd(3)) == 0.0
    assert linear_matrix_element(1, even(2), even(2)) == 0.0
    seq = [abs(dipole_linear(1, k)) for k in range(2, 10)]
    assert seq[-2] == pytest.approx(1.1222e-3, rel=1e-4)  # k = 8
    assert seq[-1] < 1e-3  # k = 9
    assert all(x > y for x, y in zip(seq, seq[1:]))


def test_linear_matrix_elements_via_quadrature():
    assert quad_matrix_element("symmetric_linear", 1, odd(1), odd(1)) == pytest.approx(0.0, abs=1e-13)
    assert quad_matrix_element("symmetric_linear", 1, odd(1), even(1)) == pytest.approx(
        dipole_linear(1, 1), rel=1e-10
    )
    assert quad_matrix_element("symmetric_linear", 2, even(1), even(2)) == pytest.approx(
        even_even_z2(1, 2), rel=1e-10
    )


def test_even_even_z2_diagonal_rejected():
    with pytest.raises(ArgumentError):
        even_even_z2(3, 3)


def test_bouncer_dipole():
    b = lambda n: SpectralPoint(SystemId.BOUNCER, n)  # noqa: E731
    assert quad_matrix_element("bouncer", 1, b(2), b(5)) == pytest.approx(bouncer_dipole(2, 5), rel=1e-10)
    assert linear_matrix_element(1, b(2), b(5)) == pytest.approx(bouncer_dipole(2, 5), rel=1e-12)


def test_symmetry_under_exchange():
    for p in (0, 1, 2):
        assert linear_matrix_element(p, odd(2), even(4)) == pytest.approx(
            linear_matrix_element(p, even(4), odd(2)), rel=1e-12, abs=1e-15
        )
    assert oscillator_recursion(3, 2, 6) == pytest.approx(oscillator_recursion(3, 6, 2), rel=1e-12)
    assert half_sho_y2(3, 4) == half_sho_y2(4, 3)


def test_virial():
    for n in (1, 4, 10):
        for par in ("odd", "even"):
            v, t = virial_ratios(par, n)
            assert v == pytest.approx(2 / 3, rel=1e-9)
            assert t == pytest.approx(1 / 3, rel=1e-9)


# --- moments -------------------------------------------------------------------


def test_moment_lists_exact():
    odd_list = moment_recursion_airy("odd", 5)
    expected_odd = [
        ((Fraction(2, 3), 1),),
        ((Fraction(8, 15), 2),),
        ((Fraction(16, 35), 3), (Fraction(3, 7), 0)),
        ((Fraction(128, 315), 4), (Fraction(80, 63), 1)),
        ((Fraction(256, 693), 5), (Fraction(1808, 693), 2)),
    ]
    assert [e.terms for e in odd_list] == expected_odd
    even_list = moment_recursion_airy("even", 5)
    expected_even = [
        ((Fraction(2, 3), 1),),
        ((Fraction(8, 15), 2), (Fraction(1, 5), -1)),
        ((Fraction(16, 35), 3), (Fraction(3, 5), 0)),
        ((Fraction(128, 315), 4), (Fraction(64, 45), 1)),
        ((Fraction(256, 693), 5), (Fraction(272, 99), 2), (Fraction(6, 11), -1)),
    ]
    assert [e.terms for e in even_list] == expected_even


def test_moment_normalization_and_structure():
    for par in ("odd", "even"):
        assert moment_expression(par, 0).evaluate(7.3) == 1.0
        for e in moment_recursion_airy(par, 10):
            exps = [x for _, x in e.terms]
            assert exps[0] == e.p
            assert all((e.p - x) % 3 == 0 for x in exps)
            assert exps == sorted(exps, reverse=True)


def test_moment_leading_coefficient():
    # 2^p p! / (2p+1)!! reproduces the classical leading term
    for p in range(1, 9):
        dfact = math.prod(range(2 * p + 1, 0, -2))
        assert moment_expression("odd", p).coefficient(p) == Fraction(2**p * math.factorial(p), dfact)


def test_moment_json_round_trip():
    e = moment_expression("even", 5)
    data = json.loads(json.dumps(e.to_json()))
    assert data["terms"][0] == {"num": 256, "den": 693, "exp": 5}
    assert MomentExpression.from_json(data) == e


def test_moment_expression_validates_exponents():
    with pytest.raises(ArgumentError):
        MomentExpression(Parity.ODD, 2, ((Fraction(1), 2), (Fraction(1), 1)))
    with pytest.raises(ArgumentError):
        MomentExpression(Parity.ODD, 2, ((Fraction(1), -1), (Fraction(1), 2)))


@pytest.mark.parametrize("par", ["odd", "even"])
@pytest.mark.parametrize("n", [1, 3, 10])
def test_moments_against_quadrature(par, n):
    kind = "ai" if par == "odd" else "aiprime"
    lam = airy_zero(kind, n)
    for p in range(1, 9):
        expr = moment_expression(par, p).evaluate(lam)
        assert quad_half_line_moment(par, p, n) == pytest.approx(expr, rel=1e-9)


def test_quadrature_oracle_self_checks():
    assert quad_matrix_element("symmetric_linear", 1, odd(1), odd(1)) == 0.0
    b1 = SpectralPoint(SystemId.BOUNCER, 1)
    assert quad_matrix_element("bouncer", 1, b1, b1) == pytest.approx(2 * Z1 / 3, rel=1e-10)
    assert quad_matrix_element("half_sho", 1, sho(0), sho(0)) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-10)
    with pytest.raises(DomainError):
        quad_matrix_element("bouncer", 1, odd(1), odd(1))


# --- oscillators -----------------------------------------------------------------


def test_half_sho_dipole_examples():
    assert dipole_half_sho(0, 0) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-15)
    s0, s1 = boundary_value(sho(0)), boundary_value(sho(1))
    assert s0 * s1 < 0  # (-1)^n slopes
    assert dipole_half_sho(0, 1) == pytest.approx(-s0 * s1 / 6, rel=1e-15)
    assert quad_matrix_element("half_sho", 1, sho(0), sho(1)) == pytest.approx(dipole_half_sho(0, 1), rel=1e-10)


def test_oscillator_recursion_examples():
    assert oscillator_recursion(2, 0, 0) == pytest.approx(1.5, rel=1e-15)
    assert oscillator_recursion(1, 0, 1) == pytest.approx(dipole_half_sho(0, 1), rel=1e-14)
    assert oscillator_recursion(3, 0, 0) == pytest.approx(
        quad_matrix_element("half_sho", 3, sho(0), sho(0)), rel=1e-10
    )
    with pytest.raises(ArgumentError):
        oscillator_recursion(-1, 0, 0)


def test_oscillator_recursion_q1_is_dipole():
    for n in range(6):
        for m in range(6):
            assert oscillator_recursion(1, n, m) == pytest.approx(dipole_half_sho(n, m), rel=1e-13)


def test_half_sho_closed_forms():
    for n in range(5):
        for k in range(5):
            assert oscillator_recursion(2, n, k) == pytest.approx(half_sho_y2(n, k), rel=1e-13, abs=1e-14)
            assert oscillator_recursion(3, n, k) == pytest.approx(half_sho_y3(n, k), rel=1e-12)


def test_y3_is_proportional_to_dipole():
    for n, k in ((0, 0), (1, 4), (6, 2)):
        ratio = -6 * (2 * n + 2 * k + 3) / (4 * (n - k) ** 2 - 9)
        assert half_sho_y3(n, k) == pytest.approx(ratio * dipole_half_sho(n, k), rel=1e-14)


@pytest.mark.parametrize("q", [1, 2, 3, 4, 5, 6])
def test_half_sho_recursion_against_quadrature(q):
    for n, m in ((0, 0), (1, 3), (4, 4), (2, 7)):
        ref = quad_matrix_element("half_sho", q, sho(n), sho(m))
        assert oscillator_recursion(q, n, m) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_full_sho_selection_rules():
    for q in (1, 2, 3, 4):
        for n in range(8):
            for m in range(8):
                val = oscillator_recursion(q, n, m, system="full_sho")
                allowed = abs(n - m) <= q and (n - m - q) % 2 == 0
                if not allowed:
                    assert abs(val) < 1e-12
                else:
                    assert val == pytest.approx(sho_ladder_element(q, n, m), rel=1e-12)


def test_full_sho_quadrature_agrees_with_ladder():
    f = lambda n: SpectralPoint(SystemId.FULL_SHO, n)  # noqa: E731
    assert quad_matrix_element("full_sho", 2, f(3), f(5)) == pytest.approx(sho_ladder_element(2, 3, 5), rel=1e-10)
    assert quad_matrix_element("full_sho", 1, f(3), f(5)) == 0.0
