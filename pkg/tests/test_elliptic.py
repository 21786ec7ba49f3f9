from fractions import Fraction

import pytest

from padicbsd.elliptic import (
    CurveData, EllipticError, add_points, b_invariants, c_invariants,
    classify_basechange, conductor, count_ap, discriminant, l_invariant,
    minimal_model, mul_point, on_curve, quadratic_twist_model, tate_period,
    tate_reduction, torsion_order, verify_tate_period,
)

E11 = CurveData("11a1", (0, -1, 1, -10, -20))
E11B = CurveData("11a3", (0, -1, 1, 0, 0))
E15 = CurveData("15a1", (1, 1, 1, -10, -10))
E37 = CurveData("37a1", (0, 0, 1, -1, 0), generators=[(0, 0)])


def test_conductors():
    assert E11.conductor == 11
    assert E15.conductor == 15
    assert E37.conductor == 37
    assert CurveData("14a1", (1, 0, 1, 4, -6)).conductor == 14


def test_good_prime_tamagawa():
    rd = tate_reduction(E11.a, 3)
    assert rd.kind == "good" and rd.tamagawa == 1


def test_11a1_at_11_split_with_c5():
    # derived by running Tate's algorithm on y^2 + y = x^3 - x^2 - 10x - 20
    rd = E11.reduction(11)
    assert rd.kind == "mult-split"
    assert rd.kodaira == "I5"
    assert rd.tamagawa == 5


def test_additive_twist_reduction():
    # twist of 11a1 by -3 has additive reduction at 3 (conductor 99)
    tw = E11.twist(-3)
    assert tw.conductor == 99
    rd = tw.reduction(3)
    assert rd.kind == "additive"
    assert rd.tamagawa >= 1


def test_ap_values():
    assert count_ap(E11.a, 2) == -2
    assert count_ap(E11.a, 3) == -1
    assert count_ap(E11.a, 7) == -2
    assert count_ap(E37.a, 2) == -2


def test_hasse_bound_sweep():
    from sympy import primerange
    for v in primerange(2, 200):
        if E15.conductor % v:
            a = count_ap(E15.a, v)
            assert a * a <= 4 * v


def test_torsion():
    assert torsion_order(E11.a) == 5
    assert torsion_order(E15.a) == 8
    assert torsion_order(E37.a) == 1


def test_point_arithmetic_and_generators():
    P = (Fraction(0), Fraction(0))
    assert on_curve(E37.a, P)
    Q = mul_point(E37.a, 5, P)
    assert on_curve(E37.a, Q)
    assert add_points(E37.a, P, mul_point(E37.a, -1, P)) is None


def test_minimal_model_rejects_nonminimal():
    # scale 11a1 up by u = 2: x -> 4x, y -> 8y
    from padicbsd.elliptic import transform
    big = tuple(int(x) for x in transform(E11.a, Fraction(1, 2), 0, 0, 0))
    amin, _ = minimal_model(big)
    assert amin == E11.a
    with pytest.raises(EllipticError):
        CurveData("bad", big)


def test_twist_properties():
    tw = E11.twist(-4)
    assert tw.conductor == 176
    # double twist is the original curve
    assert tw.twist(-4).a == E11.a
    # a_v(E^(D)) = chi_D(v) a_v(E) at good primes
    from padicbsd.ntheory import kronecker
    for v in [3, 5, 7, 13]:
        assert count_ap(tw.a, v) == kronecker(-4, v) * count_ap(E11.a, v)


def test_tate_period_11a1():
    tp = tate_period(E11, 11, 16)
    assert tp.ord == 5  # valuation of j = -2^12 31^3 / 11^5
    assert tp.ord == E11.reduction(11).tamagawa
    assert verify_tate_period(E11, tp, digits=12)


def test_tate_period_15a1_at_5():
    tp = tate_period(E15, 5, 14)
    assert tp.ord == E15.reduction(5).tamagawa == 4
    assert verify_tate_period(E15, tp, digits=10)


def test_l_invariant_isogeny_invariance():
    # 11a1 and 11a3 are isogenous; L-invariants must agree
    L1 = l_invariant(E11, 11, 18)
    L2 = l_invariant(E11B, 11, 18)
    assert L1.agrees_with(L2, 14)


def test_l_invariant_rejects_nonsplit():
    with pytest.raises(EllipticError):
        l_invariant(E15, 3)  # 15a1 is nonsplit at 3


def test_classify_basechange():
    # E split at p: p split in K -> two exceptional places
    info = classify_basechange(E11, 11, -7)   # kronecker(-7,11) = 1
    assert info["r_exc"] == 2
    # nonsplit at p, p split in K -> none
    info = classify_basechange(E15, 3, 13)    # 15a1 nonsplit at 3; (13|3)=1
    assert info["r_exc"] == 0
    # p inert -> exactly one
    info = classify_basechange(E11, 11, -4)   # (-4|11) = -1
    assert info["r_exc"] == 1
    with pytest.raises(EllipticError):
        classify_basechange(E11, 11, -11)


def test_an_coefficients_multiplicative():
    an = E11.an_coefficients(50)
    assert an[1] == 1 and an[2] == -2 and an[3] == -1
    assert an[6] == an[2] * an[3]
    assert an[4] == an[2] ** 2 - 2  # a_{p^2} = a_p^2 - p at good p
    assert an[11] == 1  # split multiplicative
