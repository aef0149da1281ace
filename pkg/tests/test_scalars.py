import random
from decimal import Decimal
from fractions import Fraction

import pytest

from quasifold import (IndeterminateSignError, ScalarSyntaxError,
                       parse_scalar)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def bisect_root(coeffs, lo, hi, iterations=80):
    """Independent bisection for a root of a polynomial with a sign change."""
    lo, hi = Fraction(lo), Fraction(hi)

    def value(x):
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * x + Fraction(c)
        return acc

    assert value(lo) * value(hi) < 0
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if value(mid) == 0:
            return mid, mid
        if value(lo) * value(mid) < 0:
            hi = mid
        else:
            lo = mid
    return lo, hi


GOLDEN_LO, GOLDEN_HI = bisect_root([-1, -1, 1], 1, 2)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def test_parse_zero(rational):
    assert parse_scalar("0", rational).is_zero()


def test_parse_golden_identity(golden):
    # 1 + 1/phi equals phi itself
    assert parse_scalar("1 + 1/phi", golden) == golden.generator()


def test_parse_quartic_collapse(quartic):
    value = parse_scalar("(alpha^2-2)^2 - (alpha^2-2) - 1", quartic)
    assert value.is_zero()


def test_parse_syntax_error_position():
    from quasifold import RationalDomain
    with pytest.raises(ScalarSyntaxError) as err:
        parse_scalar("1 + + 2", RationalDomain())
    assert err.value.position == 4


def test_parse_unknown_symbol(rational):
    with pytest.raises(ScalarSyntaxError):
        parse_scalar("phi + 1", rational)


def test_parse_division_by_zero(golden):
    with pytest.raises((ScalarSyntaxError, ZeroDivisionError)):
        parse_scalar("1/(phi^2 - phi - 1)", golden)


def test_parse_negative_exponent(parameter):
    assert parse_scalar("a^-1", parameter) == parameter.generator().inverse()


def test_parse_precedence(rational, parameter):
    assert parse_scalar("2 + 3 * 4 ^ 2", rational) == rational.scalar(50)
    assert parse_scalar("2 * 3 / 4", rational) == rational.scalar("3/2")
    assert parse_scalar("-2^2", rational) == rational.scalar(-4)
    a = parameter.generator()
    assert parse_scalar("-(a + 1)^2", parameter) == -((a + 1) ** 2)
    assert parse_scalar("1/2*a", parameter) == a / 2


# ---------------------------------------------------------------------------
# arithmetic
# ---------------------------------------------------------------------------

def test_inverse_of_one(rational):
    assert rational.one().inverse() == rational.one()


def test_golden_inverse(golden):
    phi = golden.generator()
    assert phi.inverse() == phi - 1
    assert phi * (phi - 1) == golden.one()


def test_parameter_inverse(parameter):
    a = parameter.generator()
    assert a.inverse().text() == "1/a"
    assert a * a.inverse() == parameter.one()


def test_domain_mismatch(rational, golden):
    from quasifold import DomainMismatchError
    with pytest.raises(DomainMismatchError):
        rational.one() + golden.one()


def test_inversion_of_zero(rational):
    with pytest.raises(ZeroDivisionError):
        rational.zero().inverse()


def test_golden_square_reduces(golden):
    phi = golden.generator()
    assert phi ** 2 == phi + 1


# ---------------------------------------------------------------------------
# numeric evaluation
# ---------------------------------------------------------------------------

def test_eval_golden_ratio(golden):
    expected = (GOLDEN_LO + GOLDEN_HI) / 2
    value = golden.generator().eval_numeric(12)
    assert abs(Fraction(str(value)) - expected) < Fraction(1, 10 ** 12) * 2


def test_eval_rational(rational):
    assert rational.scalar("1/2").eval_numeric(6) == Decimal("0.5")


def test_eval_golden_inverse(golden):
    # 1/phi equals phi - 1
    expected = (GOLDEN_LO + GOLDEN_HI) / 2 - 1
    value = golden.generator().inverse().eval_numeric(12)
    assert abs(Fraction(str(value)) - expected) < Fraction(1, 10 ** 12) * 2


def test_eval_against_trigonometric_oracle(golden, quartic):
    # phi = (1 + sqrt 5)/2 and alpha = 2 sin(72 deg): independent closed
    # forms for the designated roots, evaluated by mpmath
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    phi_expected = (1 + mpmath.sqrt(5)) / 2
    phi_value = mpmath.mpf(str(golden.generator().eval_numeric(30)))
    assert abs(phi_value - phi_expected) < mpmath.mpf("1e-29")
    alpha_expected = 2 * mpmath.sin(2 * mpmath.pi / 5)
    alpha_value = mpmath.mpf(str(quartic.generator().eval_numeric(30)))
    assert abs(alpha_value - alpha_expected) < mpmath.mpf("1e-29")


def test_eval_parameter_uses_sample(parameter):
    a = parameter.generator()
    value = a.eval_numeric(12)
    assert abs(Fraction(str(value)) - Fraction("1.41421356237309")) < Fraction(1, 10 ** 10)
    value = a.eval_numeric(12, parameter_sample=Fraction(3))
    assert value == Decimal(3)


# ---------------------------------------------------------------------------
# signs
# ---------------------------------------------------------------------------

def test_sign_zero(rational):
    assert rational.zero().sign() == 0


def test_sign_golden_minus_one(golden):
    assert (golden.generator() - 1).sign() == 1
    assert (golden.generator() - 2).sign() == -1


def test_sign_parameter_indeterminate(parameter):
    a = parameter.generator()
    with pytest.raises(IndeterminateSignError):
        (a - 1).sign()
    assert (a - 1).sign(parameter_sample=Fraction(2)) == 1
    assert (a - 1).sign(parameter_sample=Fraction("1/2")) == -1
    assert a.sign() == 1
    assert (-a - 1).sign() == -1


# ---------------------------------------------------------------------------
# domain construction
# ---------------------------------------------------------------------------

def test_min_poly_must_be_monic_degree_two():
    from quasifold import NumberFieldDomain
    with pytest.raises(ValueError):
        NumberFieldDomain(["-1", "1"], "r", "1.0")  # degree 1
    with pytest.raises(ValueError):
        NumberFieldDomain(["-1", "-1", "2"], "r", "1.0")  # not monic


def test_embedding_approx_must_isolate_a_root():
    from quasifold import NumberFieldDomain
    with pytest.raises(ValueError):
        NumberFieldDomain(["-1", "-1", "1"], "phi", "7.5")


def test_reducible_min_poly_surfaces_as_zero_divisor():
    # x^2 - 1 factors; inverting r - 1 hits the zero divisor
    from quasifold import NumberFieldDomain
    domain = NumberFieldDomain(["-1", "0", "1"], "r", "1.0000000001")
    with pytest.raises(ZeroDivisionError):
        (domain.generator() - 1).inverse()


def test_default_sample_must_be_positive():
    from quasifold import RationalFunctionDomain
    with pytest.raises(ValueError):
        RationalFunctionDomain("a", default_sample="-2")


# ---------------------------------------------------------------------------
# randomized properties
# ---------------------------------------------------------------------------

def random_scalar(domain, rng):
    kind = domain.kind
    if kind == "rational":
        return domain.scalar(Fraction(rng.randint(-30, 30),
                                      rng.randint(1, 12)))
    if kind == "number_field":
        gen = domain.generator()
        acc = domain.zero()
        power = domain.one()
        for _ in range(domain.degree):
            acc = acc + power * Fraction(rng.randint(-9, 9), rng.randint(1, 4))
            power = power * gen
        return acc
    a = domain.generator()
    num = domain.zero()
    power = domain.one()
    for _ in range(3):
        num = num + power * rng.randint(-6, 6)
        power = power * a
    den = a + rng.randint(1, 5) if rng.random() < 0.5 else domain.one()
    return num / den


def test_field_axioms(rational, golden, parameter):
    rng = random.Random(20240501)
    for domain in (rational, golden, parameter):
        for _ in range(60):
            x = random_scalar(domain, rng)
            y = random_scalar(domain, rng)
            z = random_scalar(domain, rng)
            assert (x + y) + z == x + (y + z)
            assert x + y == y + x
            assert (x * y) * z == x * (y * z)
            assert x * y == y * x
            assert x * (y + z) == x * y + x * z
            if not x.is_zero():
                assert x * x.inverse() == domain.one()


def test_parse_format_roundtrip(rational, golden, parameter):
    rng = random.Random(77)
    for domain in (rational, golden, parameter):
        for _ in range(1000):
            x = random_scalar(domain, rng)
            assert parse_scalar(x.text(), domain) == x


def test_numeric_homomorphism(rational, golden, parameter):
    rng = random.Random(123)
    for domain in (rational, golden, parameter):
        for _ in range(40):
            x = random_scalar(domain, rng)
            y = random_scalar(domain, rng)
            ex = float(x.eval_numeric(12))
            ey = float(y.eval_numeric(12))
            exy = float((x * y).eval_numeric(12))
            assert abs(exy - ex * ey) < 1e-9 * max(1.0, abs(ex * ey))
