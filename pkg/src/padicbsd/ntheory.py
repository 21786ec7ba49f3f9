"""Small number-theoretic utilities shared across the package.

Everything here is exact integer arithmetic; sympy supplies factorization
and modular square roots.
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from sympy import factorint, isprime, primerange
from sympy.ntheory.residue_ntheory import sqrt_mod

__all__ = [
    "factorint", "isprime", "primerange", "sqrt_mod",
    "valuation", "kronecker", "is_fundamental_discriminant",
    "crt_pair", "inv_mod", "squarefree_part", "divisors_of",
    "rational_valuation", "is_square_in_Qp",
]


def valuation(n: int, p: int) -> int:
    """v_p(n) for a nonzero integer n."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def rational_valuation(x: Fraction, p: int) -> int:
    """v_p of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of 0 is infinite")
    return valuation(x.numerator, p) - valuation(x.denominator, p)


def inv_mod(a: int, m: int) -> int:
    return pow(a, -1, m)


def crt_pair(a1: int, m1: int, a2: int, m2: int) -> int:
    """x mod m1*m2 with x = a1 (m1), x = a2 (m2); moduli must be coprime."""
    g = gcd(m1, m2)
    if g != 1:
        raise ValueError("moduli not coprime")
    x = a1 + m1 * ((a2 - a1) * inv_mod(m1, m2) % m2)
    return x % (m1 * m2)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), full extension to all integers n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if n < 0:
        return (-1 if a < 0 else 1) * kronecker(a, -n)
    # strip factors of 2 from n
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t and a % 2 == 0:
        return 0
    # (a|2)^t
    result = 1
    if t % 2 == 1 and a % 8 in (3, 5):
        result = -result
    a %= n
    # Jacobi symbol (a|n) for odd n > 0
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_fundamental_discriminant(d: int) -> bool:
    if d == 1:
        return True
    if d % 4 == 1:
        return squarefree_part(d) == d
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and squarefree_part(m) == m
    return False


def squarefree_part(n: int) -> int:
    """The squarefree kernel of n (keeping the sign)."""
    if n == 0:
        return 0
    s = 1 if n > 0 else -1
    out = s
    for q, e in factorint(abs(n)).items():
        if e % 2 == 1:
            out *= q
    return out


@lru_cache(maxsize=None)
def divisors_of(n: int) -> tuple:
    divs = [1]
    for q, e in factorint(n).items():
        divs = [d * q**k for d in divs for k in range(e + 1)]
    return tuple(sorted(divs))


def is_square_in_Qp(x: Fraction, p: int) -> bool:
    """Whether a nonzero rational is a square in Q_p."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero input")
    v = rational_valuation(x, p)
    if v % 2 != 0:
        return False
    u = x / Fraction(p) ** v
    # u is now a p-adic unit written as a rational
    if p == 2:
        # unit square in Q_2 iff = 1 mod 8
        num, den = u.numerator, u.denominator
        return (num * inv_mod(den, 8)) % 8 == 1
    num, den = u.numerator % p, u.denominator % p
    return kronecker(num * inv_mod(den, p) % p, p) == 1
