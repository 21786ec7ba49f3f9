import random

import pytest
from fractions import Fraction

from padicbsd.padic import (
    PadicError, PadicScalar, PrecisionError, hensel_unit_root, iwasawa_log,
    NotOrdinaryError, padic_exp, padic_sqrt, teichmuller,
)


def rand_scalar(rng, p, M=12):
    v = rng.randrange(-3, 4)
    u = rng.randrange(1, p**M)
    while u % p == 0:
        u = rng.randrange(1, p**M)
    return PadicScalar(p, v, u, M)


def test_identity_product_keeps_precision():
    a = PadicScalar.from_int(1, 5, 5)
    b = PadicScalar.from_int(1, 5, 5)
    c = a * b
    assert c.abs_prec == 5 and c.lift() == 1


def test_valuation_additivity():
    rng = random.Random(1)
    for _ in range(50):
        p = rng.choice([3, 5, 7, 11])
        a, b = rand_scalar(rng, p), rand_scalar(rng, p)
        assert (a * b).v == a.v + b.v


def test_division_precision_loss():
    # (p + O(p^6)) / (p + O(p^6)) -> 1 + O(p^5)
    p = 7
    a = PadicScalar(p, 1, 1, 5)  # p known mod p^6
    q = a / a
    assert q.v == 0 and q.abs_prec == 5 and q.lift() == 1


def test_add_cancellation_gives_inexact_zero():
    p = 5
    a = PadicScalar.from_int(7, p, 6)
    d = a - PadicScalar.from_int(7, p, 6)
    assert not d.is_exact_zero
    assert d.is_zero_at(6)
    with pytest.raises(PrecisionError):
        d.is_zero_at(7)


def test_exact_zero_is_distinguished():
    z = PadicScalar.exact_zero(5)
    assert z.is_exact_zero and z.is_zero_at(10**6)
    a = PadicScalar.from_int(3, 5, 8)
    assert (a * z).is_exact_zero
    assert (a + z).lift() == 3


def test_from_rational_roundtrip():
    x = Fraction(22, 7)
    a = PadicScalar.from_rational(x, 5, 10)
    assert a.agrees_with(x, 10)


def test_prime_mismatch():
    with pytest.raises(PadicError):
        PadicScalar.from_int(1, 5) + PadicScalar.from_int(1, 7)


def test_hensel_unit_root_small_case():
    # a_p = -1, p = 3: X^2 + X + 3 has unit root = 2 mod 3
    al = hensel_unit_root(-1, 3, 12)
    assert al.u % 3 == 2
    # Vieta: alpha * (a_p - alpha) = p
    prod = al * (PadicScalar.from_int(-1, 3, 12) - al)
    assert prod.agrees_with(3, 11)


def test_hensel_defining_quadratic_many():
    rng = random.Random(2)
    for _ in range(30):
        p = rng.choice([3, 5, 7, 11, 13])
        a_p = rng.randrange(-2 * p, 2 * p + 1)
        if a_p % p == 0:
            continue
        al = hensel_unit_root(a_p, p, 15)
        lhs = al * al - al * a_p + p
        assert lhs.is_zero_at(15)


def test_not_ordinary_rejected():
    with pytest.raises(NotOrdinaryError):
        hensel_unit_root(3, 3, 10)


def test_log_of_one_and_p():
    p = 7
    assert iwasawa_log(PadicScalar.from_int(1, p, 10)).is_zero_at(9)
    # branch convention: log(p) = 0
    assert iwasawa_log(PadicScalar.from_int(p, p, 10)).is_zero_at(9)


def test_log_of_teichmuller_is_zero():
    p = 5
    w = teichmuller(2, p, 12)
    assert iwasawa_log(PadicScalar(p, 0, w, 12)).is_zero_at(10)


def test_log_homomorphism():
    rng = random.Random(3)
    for _ in range(20):
        p = rng.choice([3, 5, 7])
        a, b = rand_scalar(rng, p, 14), rand_scalar(rng, p, 14)
        lab = iwasawa_log(a * b)
        la, lb = iwasawa_log(a), iwasawa_log(b)
        digits = min(12, lab.abs_prec, (la + lb).abs_prec)
        assert lab.agrees_with(la + lb, digits)


def test_log_square_is_double():
    rng = random.Random(4)
    for _ in range(10):
        p = rng.choice([3, 5, 7, 11])
        x = rand_scalar(rng, p, 14)
        assert iwasawa_log(x * x).agrees_with(iwasawa_log(x) * 2, 11)


def test_higher_precision_refines():
    # recomputing at higher precision agrees with the lower-precision value
    x_lo = PadicScalar.from_rational(Fraction(14, 9), 5, 8)
    x_hi = PadicScalar.from_rational(Fraction(14, 9), 5, 16)
    assert iwasawa_log(x_hi).agrees_with(iwasawa_log(x_lo), 7)


def test_exp_log_inverse():
    p = 7
    x = PadicScalar(p, 1, 3, 12)  # 3p
    assert iwasawa_log(padic_exp(x)).agrees_with(x, 10)


def test_exp_is_homomorphism():
    p = 5
    x = PadicScalar(p, 1, 2, 12)
    y = PadicScalar(p, 2, 3, 12)
    lhs = padic_exp(x + y)
    rhs = padic_exp(x) * padic_exp(y)
    assert lhs.agrees_with(rhs, 10)


def test_sqrt():
    p = 13
    for n in [1, 4, 9, 3]:
        x = PadicScalar.from_int(n, p, 12)
        try:
            r = padic_sqrt(x)
        except PadicError:
            # 3 is a QR mod 13 (4^2=16=3), so no exception expected here
            raise
        assert (r * r).agrees_with(n, 11)
    with pytest.raises(PadicError):
        padic_sqrt(PadicScalar.from_int(2, 13, 12))  # 2 is not a QR mod 13


def test_pow():
    a = PadicScalar.from_int(3, 5, 10)
    assert (a**4).agrees_with(81, 9)
    assert (a**0).agrees_with(1, 9)
    assert (a**-2).agrees_with(Fraction(1, 9), 9)
