"""Elliptic curves over Q: models, local reduction data, Tate periods,
L-invariants, twists, and base-change bookkeeping over imaginary quadratic
fields.

Models are integral Weierstrass quintuples [a1,a2,a3,a4,a6] with exact
rational point arithmetic.  Reduction data comes from a full implementation
of Tate's algorithm run on the globally minimal model (Laska--Kraus--Connell).
Mordell--Weil generators, analytic rank and analytic Sha are *ingested* from
the curve database and only verified for consistency; descent is out of scope.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .ntheory import (
    factorint, is_fundamental_discriminant, is_square_in_Qp, kronecker,
    valuation,
)
from .padic import DEFAULT_PRECISION, PadicScalar, iwasawa_log

INF = None  # the point at infinity


class EllipticError(ValueError):
    pass


# ----------------------------------------------------------------------
# Weierstrass invariants and coordinate changes
# ----------------------------------------------------------------------

def b_invariants(a):
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def c_invariants(a):
    b2, b4, b6, _ = b_invariants(a)
    c4 = b2 * b2 - 24 * b4
    c6 = -b2**3 + 36 * b2 * b4 - 216 * b6
    return c4, c6


def discriminant(a):
    b2, b4, b6, b8 = b_invariants(a)
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def transform(a, u, r, s, t):
    """Coordinate change x = u^2 x' + r, y = u^3 y' + s u^2 x' + t."""
    a1, a2, a3, a4, a6 = (Fraction(x) for x in a)
    u, r, s, t = Fraction(u), Fraction(r), Fraction(s), Fraction(t)
    A1 = (a1 + 2 * s) / u
    A2 = (a2 - s * a1 + 3 * r - s * s) / u**2
    A3 = (a3 + r * a1 + 2 * t) / u**3
    A4 = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u**4
    A6 = (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) / u**6
    return (A1, A2, A3, A4, A6)


def transform_point(P, u, r, s, t):
    if P is INF:
        return INF
    x, y = P
    u, r, s, t = Fraction(u), Fraction(r), Fraction(s), Fraction(t)
    X = (Fraction(x) - r) / u**2
    Y = (Fraction(y) - s * u * u * X - t) / u**3
    return (X, Y)


def _ints(a):
    out = []
    for x in a:
        x = Fraction(x)
        if x.denominator != 1:
            raise EllipticError("non-integral model")
        out.append(x.numerator)
    return tuple(out)


def _model_from_c4c6(c4, c6):
    """Integral model with invariants (c4, c6), when one exists (Connell)."""
    for b2 in range(-5, 7):
        if (b2 * b2 - c4) % 24 != 0:
            continue
        b4 = (b2 * b2 - c4) // 24
        num = -b2**3 + 36 * b2 * b4 - c6
        if num % 216 != 0:
            continue
        b6 = num // 216
        a1 = b2 % 2
        if (b2 - a1) % 4 != 0:
            continue
        a2 = (b2 - a1) // 4
        a3 = b6 % 2
        if (b4 - a1 * a3) % 2 != 0 or (b6 - a3 * a3) % 4 != 0:
            continue
        a4 = (b4 - a1 * a3) // 2
        a6 = (b6 - a3 * a3) // 4
        a = (a1, a2, a3, a4, a6)
        if c_invariants(a) == (c4, c6):
            return a
    return None


def _kraus_admissible(c4, c6):
    """Whether (c4, c6) are the invariants of some integral model (Kraus)."""
    # at 3: v3(c6) != 2
    if c6 % 9 == 0 and c6 % 27 != 0:
        return False
    # at 2: c6 = -1 mod 4, or (16 | c4 and c6 = 0 or 8 mod 32)
    if c6 % 4 == 3:
        return True
    return c4 % 16 == 0 and c6 % 32 in (0, 8)


def minimal_model(a):
    """Globally minimal model over Q, with the transformation (u, r, s, t)."""
    a = _ints(a)
    delta = discriminant(a)
    if delta == 0:
        raise EllipticError("singular model")
    c4, c6 = c_invariants(a)
    u = 1
    for q in factorint(abs(delta)):
        d = valuation(delta, q) // 12
        if c4 != 0:
            d = min(d, valuation(c4, q) // 4)
        if c6 != 0:
            d = min(d, valuation(c6, q) // 6)
        if q in (2, 3):
            while d > 0 and not _kraus_admissible(c4 // q**(4 * d), c6 // q**(6 * d)):
                d -= 1
        u *= q**d
    c4m, c6m = c4 // u**4, c6 // u**6
    amin = _model_from_c4c6(c4m, c6m)
    if amin is None:
        raise EllipticError("no integral model for minimal invariants")
    # recover (r, s, t) such that transform(a, u, r, s, t) == amin
    s = Fraction(u * amin[0] - a[0], 2)
    r = Fraction(u * u * amin[1] - a[1] + s * a[0] + s * s, 3)
    t = Fraction(u**3 * amin[2] - a[2] - r * a[0], 2)
    assert transform(a, u, r, s, t) == tuple(Fraction(x) for x in amin)
    return amin, (u, r, s, t)


# ----------------------------------------------------------------------
# Point arithmetic over Q
# ----------------------------------------------------------------------

def on_curve(a, P):
    if P is INF:
        return True
    a1, a2, a3, a4, a6 = (Fraction(z) for z in a)
    x, y = Fraction(P[0]), Fraction(P[1])
    return y * y + a1 * x * y + a3 * y == x**3 + a2 * x * x + a4 * x + a6


def neg_point(a, P):
    if P is INF:
        return INF
    a1, _, a3, _, _ = (Fraction(z) for z in a)
    x, y = Fraction(P[0]), Fraction(P[1])
    return (x, -y - a1 * x - a3)


def add_points(a, P, Q):
    if P is INF:
        return Q
    if Q is INF:
        return P
    a1, a2, a3, a4, a6 = (Fraction(z) for z in a)
    x1, y1 = Fraction(P[0]), Fraction(P[1])
    x2, y2 = Fraction(Q[0]), Fraction(Q[1])
    if x1 == x2:
        if y1 + y2 + a1 * x2 + a3 == 0:
            return INF
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) / (x2 - x1)
    nu = y1 - lam * x1
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return (x3, y3)


def mul_point(a, n, P):
    if n < 0:
        return mul_point(a, -n, neg_point(a, P))
    R, Q = INF, P
    while n:
        if n & 1:
            R = add_points(a, R, Q)
        Q = add_points(a, Q, Q)
        n >>= 1
    return R


# ----------------------------------------------------------------------
# Tate's algorithm
# ----------------------------------------------------------------------

@dataclass
class ReductionData:
    prime: int
    kind: str               # good | mult-split | mult-nonsplit | additive
    kodaira: str
    tamagawa: int
    conductor_exponent: int
    a_v: int = 0            # Frobenius trace (good), +-1 (mult), 0 (additive)
    vD: int = 0             # valuation of the minimal discriminant

    @property
    def is_multiplicative(self):
        return self.kind.startswith("mult")

    @property
    def is_split(self):
        return self.kind == "mult-split"


def _nroots_quadratic(b, c, p):
    """Roots of Y^2 + bY + c in F_p (0, 1, or 2)."""
    if p == 2:
        return sum(1 for t in range(2) if (t * t + b * t + c) % 2 == 0)
    disc = (b * b - 4 * c) % p
    return 1 if disc == 0 else (2 if kronecker(disc, p) == 1 else 0)


def _quadratic_double_root(b, c, p):
    if p == 2:
        for t in range(2):
            if (t * t + b * t + c) % 2 == 0:
                return t
        raise AssertionError
    return (-b * pow(2, -1, p)) % p


def tate_reduction(a, p):
    """Tate's algorithm at p; the model must be minimal at p.

    Returns the Kodaira symbol, Tamagawa number, conductor exponent (via
    Ogg's formula, valid for all p), and for multiplicative reduction the
    split/non-split decision (-c6 a square in Q_p or not).
    """
    a = _ints(a)
    delta = discriminant(a)
    n = valuation(delta, p) if delta % p == 0 else 0
    if n == 0:
        return ReductionData(p, "good", "I0", 1, 0, a_v=count_ap(a, p), vD=0)
    c4, c6 = c_invariants(a)
    if c4 % p != 0:
        split = is_square_in_Qp(Fraction(-c6), p)
        c = n if split else (2 if n % 2 == 0 else 1)
        kind = "mult-split" if split else "mult-nonsplit"
        return ReductionData(p, kind, f"I{n}", c, 1, a_v=1 if split else -1, vD=n)

    def ogg(components):
        return n - components + 1

    # -- additive: move the singular point to (0, 0)
    a1, a2, a3, a4, a6 = a
    if p < 5:
        found = False
        for x0 in range(p):
            for y0 in range(p):
                f = (y0 * y0 + a1 * x0 * y0 + a3 * y0
                     - x0**3 - a2 * x0 * x0 - a4 * x0 - a6)
                fx = a1 * y0 - 3 * x0 * x0 - 2 * a2 * x0 - a4
                fy = 2 * y0 + a1 * x0 + a3
                if f % p == 0 and fx % p == 0 and fy % p == 0:
                    found = True
                    break
            if found:
                break
        assert found, "singular point not found"
        r, t = x0, y0
    else:
        b2 = a1 * a1 + 4 * a2
        r = (-b2 * pow(12, -1, p)) % p
        t = (-(a1 * r + a3) * pow(2, -1, p)) % p
    a1, a2, a3, a4, a6 = _ints(transform((a1, a2, a3, a4, a6), 1, r, 0, t))
    assert a3 % p == 0 and a4 % p == 0 and a6 % p == 0

    if a6 % p**2 != 0:
        return ReductionData(p, "additive", "II", 1, ogg(1), vD=n)
    _, _, b6, b8 = b_invariants((a1, a2, a3, a4, a6))
    if b8 % p**3 != 0:
        return ReductionData(p, "additive", "III", 2, ogg(2), vD=n)
    if b6 % p**3 != 0:
        nr = _nroots_quadratic((a3 // p) % p, (-(a6 // p**2)) % p, p)
        return ReductionData(p, "additive", "IV", 3 if nr == 2 else 1, ogg(3), vD=n)

    # -- normalise: p | a1, a2; p^2 | a3, a4; p^3 | a6
    if p == 2:
        s = a2 % 2
        t = 2 * ((a6 // 4) % 2)
    else:
        s = (-a1 * pow(2, -1, p)) % p
        t = (-(a3 + 0)) * pow(2, -1, p**2) % p**2
    a1, a2, a3, a4, a6 = _ints(transform((a1, a2, a3, a4, a6), 1, 0, s, t))
    assert a1 % p == 0 and a2 % p == 0 and a3 % p**2 == 0 \
        and a4 % p**2 == 0 and a6 % p**3 == 0, "normalisation failed"

    # -- cubic P(T) = T^3 + (a2/p) T^2 + (a4/p^2) T + (a6/p^3) over F_p
    A, B, C = (a2 // p) % p, (a4 // p**2) % p, (a6 // p**3) % p
    roots = [t0 for t0 in range(p) if (t0**3 + A * t0 * t0 + B * t0 + C) % p == 0]
    disc_P = (18 * A * B * C - 4 * A**3 * C + A * A * B * B - 4 * B**3 - 27 * C * C) % p
    if disc_P != 0:
        return ReductionData(p, "additive", "I0*", 1 + len(roots), ogg(5), vD=n)

    # repeated root: distinguish double vs triple by polynomial identity
    triple_root = None
    for t0 in roots:
        if ((A + 3 * t0) % p, (B - 3 * t0 * t0) % p, (C + t0**3) % p) == (0, 0, 0):
            triple_root = t0
            break
    double_root = None
    if triple_root is None:
        for t0 in roots:
            if (3 * t0 * t0 + 2 * A * t0 + B) % p == 0:
                double_root = t0
                break
        if double_root is None and p == 2:
            double_root = next(t0 for t0 in roots)
        assert double_root is not None

    if triple_root is None:
        # ---- type I_m*: the double-root chain
        a1, a2, a3, a4, a6 = _ints(transform(
            (a1, a2, a3, a4, a6), 1, p * double_root, 0, 0))
        # now v(a2) = 1, v(a3) >= 2, v(a4) >= 3, v(a6) >= 4
        m = 1
        mx, my = p * p, p * p
        while True:
            # odd stage: Y^2 + (a3/my) Y - (a6/(mx*my))
            bb = (a3 // my) % p
            cc = (-(a6 // (mx * my))) % p
            if p == 2:
                distinct = bb % 2 == 1
            else:
                distinct = (bb * bb - 4 * (-cc)) % p != 0
            if distinct:
                c = 4 if _nroots_quadratic(bb, cc, p) == 2 else 2
                return ReductionData(p, "additive", f"I{m}*", c, ogg(5 + m), vD=n)
            t0 = _quadratic_double_root(bb, cc, p)
            a1, a2, a3, a4, a6 = _ints(transform(
                (a1, a2, a3, a4, a6), 1, 0, 0, my * t0))
            my *= p
            m += 1
            # even stage: (a2/p) X^2 + (a4/(p*mx)) X + (a6/(mx*my'))
            lead = (a2 // p) % p
            bb = (a4 // (p * mx)) % p
            cc = (a6 // (mx * my)) % p
            if p == 2:
                distinct = bb % 2 == 1
            else:
                distinct = (bb * bb - 4 * lead * cc) % p != 0
            if distinct:
                if p == 2:
                    nr = sum(1 for t1 in range(2)
                             if (lead * t1 * t1 + bb * t1 + cc) % 2 == 0)
                else:
                    nr = 2 if kronecker((bb * bb - 4 * lead * cc) % p, p) == 1 else 0
                c = 4 if nr == 2 else 2
                return ReductionData(p, "additive", f"I{m}*", c, ogg(5 + m), vD=n)
            if p == 2:
                r0 = next(t1 for t1 in range(2)
                          if (lead * t1 * t1 + bb * t1 + cc) % 2 == 0)
            else:
                r0 = (-bb * pow(2 * lead, -1, p)) % p
            a1, a2, a3, a4, a6 = _ints(transform(
                (a1, a2, a3, a4, a6), 1, mx * r0, 0, 0))
            mx *= p
            m += 1
            if m > n:
                raise EllipticError("I_m* chain failed to terminate")

    # ---- triple root: IV*, III*, II*, or non-minimal
    a1, a2, a3, a4, a6 = _ints(transform(
        (a1, a2, a3, a4, a6), 1, p * triple_root, 0, 0))
    # now v(a2) >= 2, v(a4) >= 3, v(a6) >= 4
    bb = (a3 // p**2) % p
    cc = (-(a6 // p**4)) % p
    if (bb % 2 == 1) if p == 2 else ((bb * bb + 4 * (a6 // p**4)) % p != 0):
        nr = _nroots_quadratic(bb, cc, p)
        return ReductionData(p, "additive", "IV*", 3 if nr == 2 else 1, ogg(7), vD=n)
    t0 = _quadratic_double_root(bb, cc, p)
    a1, a2, a3, a4, a6 = _ints(transform(
        (a1, a2, a3, a4, a6), 1, 0, 0, t0 * p**2))
    if a4 % p**4 != 0:
        return ReductionData(p, "additive", "III*", 2, ogg(8), vD=n)
    if a6 % p**6 != 0:
        return ReductionData(p, "additive", "II*", 1, ogg(9), vD=n)
    raise EllipticError(f"model is not minimal at {p}")


def conductor(a):
    a = _ints(a)
    N = 1
    for q in factorint(abs(discriminant(a))):
        N *= q ** tate_reduction(a, q).conductor_exponent
    return N


# ----------------------------------------------------------------------
# Point counting
# ----------------------------------------------------------------------

def count_points(a, v):
    """|E(F_v)| including infinity; requires good reduction at v."""
    a1, a2, a3, a4, a6 = (x % v for x in _ints(a))
    if v == 2:
        cnt = 1
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y
                        - (x**3 + a2 * x * x + a4 * x + a6)) % 2 == 0:
                    cnt += 1
        return cnt
    b2, b4, b6, _ = b_invariants((a1, a2, a3, a4, a6))
    chi = bytearray(v)
    for t in range(v // 2 + 1):
        chi[t * t % v] = 1
    cnt = 1
    for x in range(v):
        g = (4 * x**3 + b2 * x * x + 2 * b4 * x + b6) % v
        if g == 0:
            cnt += 1
        elif chi[g]:
            cnt += 2
    return cnt


def count_ap(a, v):
    if discriminant(a) % v == 0:
        raise EllipticError(f"bad prime {v}")
    av = v + 1 - count_points(a, v)
    assert av * av <= 4 * v, "Hasse bound violated"
    return av


# ----------------------------------------------------------------------
# Torsion (exact, via division polynomials and group closure)
# ----------------------------------------------------------------------

def _division_poly(a, m):
    """psi_m as a univariate Poly in x (for m odd, the full psi_m; for m even,
    psi_m / psi_2)."""
    from sympy import Poly, symbols
    x = symbols("x")
    b2, b4, b6, b8 = b_invariants(a)
    F = Poly(4 * x**3 + b2 * x**2 + 2 * b4 * x + b6, x)  # psi_2^2
    psi = {
        1: Poly(1, x),
        2: Poly(1, x),
        3: Poly(3 * x**4 + b2 * x**3 + 3 * b4 * x**2 + 3 * b6 * x + b8, x),
        4: Poly(2 * x**6 + b2 * x**5 + 5 * b4 * x**4 + 10 * b6 * x**3
                + 10 * b8 * x**2 + (b2 * b8 - b4 * b6) * x
                + (b4 * b8 - b6 * b6), x),
    }

    def get(k):
        if k in psi:
            return psi[k]
        if k % 2:
            r = (k - 1) // 2
            A = get(r + 2) * get(r) ** 3
            B = get(r - 1) * get(r + 1) ** 3
            res = A * F**2 - B if r % 2 == 0 else A - B * F**2
        else:
            r = k // 2
            res = get(r) * (get(r + 2) * get(r - 1) ** 2 - get(r - 2) * get(r + 1) ** 2)
        psi[k] = res
        return res

    return get(m)


def _isqrt_exact(n):
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def _points_with_x(a, x):
    a1, a2, a3, a4, a6 = (Fraction(z) for z in a)
    x = Fraction(x)
    B = a1 * x + a3
    C = -(x**3 + a2 * x * x + a4 * x + a6)
    disc = B * B - 4 * C
    if disc < 0:
        return []
    rn = _isqrt_exact(disc.numerator)
    rd = _isqrt_exact(disc.denominator)
    if rn is None or rd is None:
        return []
    r = Fraction(rn, rd)
    return [(x, y) for y in {(-B + r) / 2, (-B - r) / 2}]


def torsion_points(a):
    """The rational torsion subgroup as a list of points (INF included)."""
    from sympy import Poly, factor_list, symbols
    a = _ints(a)
    delta = discriminant(a)
    bound, used, v = 0, 0, 2
    while used < 8:
        from sympy import nextprime
        v = nextprime(v)
        if delta % v != 0:
            bound = gcd(bound, count_points(a, v))
            used += 1
    pts = {INF}
    x = symbols("x")
    b2, b4, b6, _ = b_invariants(a)
    for d in [d for d in range(2, 13) if bound % d == 0]:
        poly = Poly(4 * x**3 + b2 * x**2 + 2 * b4 * x + b6, x) if d == 2 \
            else _division_poly(a, d)
        for fac, _mult in factor_list(poly.as_expr())[1]:
            fp = Poly(fac, x)
            if fp.degree() == 1:
                c1, c0 = (int(c) for c in fp.all_coeffs())
                for P in _points_with_x(a, Fraction(-c0, c1)):
                    pts.add((Fraction(P[0]), Fraction(P[1])))
    while True:
        new = set()
        lst = list(pts)
        for P in lst:
            for Q in lst:
                R = add_points(a, P, Q)
                key = R if R is INF else (R[0], R[1])
                if key not in pts:
                    new.add(key)
        if not new:
            break
        pts |= new
        if len(pts) > 16:
            raise EllipticError("torsion closure exceeded the Mazur bound")
    return list(pts)


def torsion_order(a):
    return len(torsion_points(a))


# ----------------------------------------------------------------------
# Twists and base change
# ----------------------------------------------------------------------

def quadratic_twist_model(a, d):
    """Globally minimal model of the twist of a by the discriminant d."""
    if d == 1:
        return _ints(a)
    c4, c6 = c_invariants(_ints(a))
    amin, _ = minimal_model((0, 0, 0, -27 * d * d * c4, -54 * d**3 * c6))
    return amin


def classify_basechange(E, p, D):
    """Base-change bookkeeping for A = E_K, K = Q(sqrt(D)), at a
    multiplicative prime p unramified in K: the number of split
    multiplicative places of A above p and the source of each Tate period.
    """
    if D % p == 0:
        raise EllipticError("p ramified in K")
    rd = E.reduction(p)
    if not rd.is_multiplicative:
        raise EllipticError("classification needs multiplicative reduction at p")
    chi = kronecker(D, p)
    split = rd.is_split
    if chi == 1:
        r_exc = 2 if split else 0
        places = [("p", "E"), ("p*", "E")] if split else []
    else:
        # inert: the unramified quadratic base change of nonsplit is split
        r_exc = 1
        places = [("p", "E" if split else "E^(K)")]
    return {"r_exc": r_exc, "places": places, "p_split_in_K": chi == 1,
            "E_split_at_p": split}


# ----------------------------------------------------------------------
# Tate period via inversion of the j series
# ----------------------------------------------------------------------

def _j_q_series(nterms):
    """Coefficients of q*j(q) = 1 + 744 q + 196884 q^2 + ..., exactly,
    from j = E4^3/Delta."""
    n = nterms
    sigma3 = [0] * n
    for d in range(1, n):
        for m in range(d, n, d):
            sigma3[m] += d**3
    e4 = [1] + [240 * sigma3[k] for k in range(1, n)]
    prod = [0] * n
    prod[0] = 1
    for k in range(1, n):
        for _ in range(24):
            for i in range(n - 1, k - 1, -1):
                prod[i] -= prod[i - k]
    e43 = _series_mul(_series_mul(e4, e4, n), e4, n)
    return _series_mul(e43, _series_inverse(prod, n), n)


def _series_mul(A, B, n):
    out = [0] * n
    for i, ai in enumerate(A):
        if ai:
            for j in range(n - i):
                if B[j]:
                    out[i + j] += ai * B[j]
    return out


def _series_inverse(A, n):
    assert A[0] == 1
    out = [1] + [0] * (n - 1)
    for k in range(1, n):
        s = sum(A[i] * out[k - i] for i in range(1, k + 1) if i < len(A))
        out[k] = -s
    return out


@dataclass
class TatePeriod:
    p: int
    ord: int                 # ord_p(q) = -ord_p(j); equals the Tamagawa number
    unit: PadicScalar        # q / p^ord

    def q_scalar(self):
        return PadicScalar(self.p, self.ord, self.unit.u, self.unit.M)

    def log_q(self):
        """Iwasawa-branch log of q (the log of its unit part)."""
        return iwasawa_log(self.unit)


def tate_period(E, p, M=DEFAULT_PRECISION):
    """The Tate period q with j(q) = j(E), at a multiplicative prime."""
    rd = E.reduction(p)
    if not rd.is_multiplicative:
        raise EllipticError("Tate period requires multiplicative reduction")
    c4, _ = c_invariants(E.a)
    delta = discriminant(E.a)
    jp = Fraction(c4**3, delta)
    m = -(valuation(c4**3, p) - valuation(delta, p)) if c4 else valuation(delta, p)
    assert m > 0
    # fixed-point iteration q <- (sum_k jq[k] q^k) / j, starting at 1/j;
    # each pass gains at least m digits
    work = M + 2 * m + 4
    nt = work // m + 3
    jq = _j_q_series(nt)
    jinv = PadicScalar.from_rational(1 / jp, p, work)
    q = jinv
    for _ in range(work // m + 2):
        s = PadicScalar.from_int(1, p, work)
        qk = PadicScalar.from_int(1, p, work)
        for k in range(1, nt):
            qk = qk * q
            if qk.M == 0 or qk.v > work:
                break
            if jq[k]:
                s = s + qk * jq[k]
        qnew = s * jinv
        delta_q = qnew - q
        q = qnew
        if delta_q.M == 0 or delta_q.v >= M + m:
            break
    assert q.v == m, f"ord_p(q) = {q.v} != -ord_p(j) = {m}"
    return TatePeriod(p, m, PadicScalar(p, 0, q.u, min(q.M, M)))


def verify_tate_period(E, tp, digits=10):
    """Round-trip: j(q) must reproduce j(E)."""
    p = tp.p
    work = digits + 2 * tp.ord + 4
    nt = work // tp.ord + 3
    jq = _j_q_series(nt)
    q = tp.q_scalar()
    s = PadicScalar.from_int(1, p, work)
    qk = PadicScalar.from_int(1, p, work)
    for k in range(1, nt):
        qk = qk * q
        if jq[k]:
            s = s + qk * jq[k]
    jval = s / q
    c4, _ = c_invariants(E.a)
    jE = PadicScalar.from_rational(Fraction(c4**3, discriminant(E.a)), p, work)
    return jval.agrees_with(jE, digits - tp.ord)


def l_invariant(E, p, M=DEFAULT_PRECISION):
    """log(q)/ord(q) at a split multiplicative prime (Iwasawa branch)."""
    rd = E.reduction(p)
    if rd.kind != "mult-split":
        raise EllipticError("L-invariant needs split multiplicative reduction")
    tp = tate_period(E, p, M)
    return tp.log_q() / tp.ord


# ----------------------------------------------------------------------
# CurveData
# ----------------------------------------------------------------------

@dataclass
class CurveData:
    """A minimal Weierstrass model plus ingested arithmetic data.

    r_an, torsion, sha_an, the real periods, generators, and 1/c_infty
    (= Manin^2 * modular degree) come from the curve database; everything
    verifiable (minimality, conductor, points on curve) is checked here.
    """
    label: str
    a: tuple
    conductor: int = 0
    r_an: int = None
    torsion: int = None
    sha_an: Fraction = None
    omega_plus: str = None
    omega_minus: str = None
    generators: list = field(default_factory=list)
    c_inf_inv: Fraction = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.a = _ints(self.a)
        if discriminant(self.a) == 0:
            raise EllipticError("singular curve")
        amin, _ = minimal_model(self.a)
        if amin != self.a:
            raise EllipticError(f"model for {self.label} is not minimal; use {amin}")
        if not self.conductor:
            self.conductor = conductor(self.a)
        for P in self.generators:
            if not on_curve(self.a, P):
                raise EllipticError(f"ingested generator {P} is not on {self.label}")

    def reduction(self, v) -> ReductionData:
        key = ("red", v)
        if key not in self._cache:
            self._cache[key] = tate_reduction(self.a, v)
        return self._cache[key]

    def ap(self, v):
        return self.reduction(v).a_v

    def bad_primes(self):
        return sorted(factorint(self.conductor))

    def is_ordinary(self, p):
        rd = self.reduction(p)
        return rd.is_multiplicative or (rd.kind == "good" and rd.a_v % p != 0)

    def tamagawa_product(self):
        out = 1
        for v in self.bad_primes():
            out *= self.reduction(v).tamagawa
        return out

    def an_coefficients(self, nmax):
        """a_n for 1 <= n <= nmax via the standard multiplicative recursion."""
        key = ("an", nmax)
        if key in self._cache:
            return self._cache[key]
        from sympy import primerange
        an = [0] * (nmax + 1)
        an[1] = 1
        spf = list(range(nmax + 1))
        for q in primerange(2, nmax + 1):
            for mlt in range(q, nmax + 1, q):
                if spf[mlt] == mlt:
                    spf[mlt] = q
        apk = {}
        for q in primerange(2, nmax + 1):
            aq = self.ap(q) if self.conductor % q == 0 else count_ap(self.a, q)
            vals = {0: 1, 1: aq}
            k = 2
            while q**k <= nmax:
                if self.conductor % q == 0:
                    vals[k] = aq * vals[k - 1]
                else:
                    vals[k] = aq * vals[k - 1] - q * vals[k - 2]
                k += 1
            apk[q] = vals
        for m in range(2, nmax + 1):
            q = spf[m]
            k, mm = 0, m
            while mm % q == 0:
                mm //= q
                k += 1
            an[m] = an[mm] * apk[q][k]
        self._cache[key] = an
        return an

    def twist(self, d, label=None):
        if not is_fundamental_discriminant(d):
            raise EllipticError(f"{d} is not a fundamental discriminant")
        return CurveData(label or f"{self.label}x{d}", quadratic_twist_model(self.a, d))
