"""Complex-analytic oracles: period lattices by AGM, L(E, chi, 1) by rapidly
convergent exponential sums, and rational recognition.

These values are used (a) as independent test oracles and (b) to calibrate
the modular-symbol normalisation constants, which are exact rationals
recognised from 25+ significant digits.  Nothing p-adic depends on floats
beyond those recognised rationals.
"""

from fractions import Fraction

from mpmath import agm, exp, mp, mpf, pi, polyroots, sqrt

from .elliptic import b_invariants, discriminant
from .ntheory import kronecker

WORKING_DPS = 30


def _with_dps(f):
    def wrapped(*args, **kw):
        old = mp.dps
        mp.dps = max(old, WORKING_DPS)
        try:
            return f(*args, **kw)
        finally:
            mp.dps = old
    return wrapped


@_with_dps
def period_lattice(a):
    """Period lattice of the Neron differential of the minimal model a.

    Returns (omega1, omega2, omega_plus, omega_minus) where omega1 is the
    least positive real period, [omega1, omega2] generate the lattice,
    omega_plus = int_{E(R)} |dx/y| (the BSD real period: 2*omega1 when the
    discriminant is positive), and omega_minus = 2 * Im(omega2) > 0.
    """
    b2, b4, b6, _ = b_invariants(a)
    D = discriminant(a)
    rts = polyroots([4, b2, 2 * b4, b6], extraprec=80)
    if D > 0:
        e1, e2, e3 = sorted((r.real for r in rts), reverse=True)
        om1 = pi / agm(sqrt(e1 - e3), sqrt(e1 - e2))
        om2 = 1j * pi / agm(sqrt(e1 - e3), sqrt(e2 - e3))
        omega_plus = 2 * om1
    else:
        eps = mpf(10) ** (-mp.dps + 5)
        e1 = next(r for r in rts if abs(r.imag) < eps).real
        cx = [r for r in rts if abs(r.imag) >= eps]
        e2 = next(r for r in cx if r.imag > 0)
        e3 = next(r for r in cx if r.imag < 0)
        om1 = (pi / agm(sqrt(e1 - e2), sqrt(e1 - e3))).real
        om2 = pi / agm(sqrt(e2 - e1), sqrt(e2 - e3))
        if om2.imag < 0:
            om2 = -om2
        omega_plus = om1
    return om1, om2, omega_plus, 2 * abs(om2.imag)


@_with_dps
def l_value(E, twist_disc=1, x_probe=None):
    """(L(E x chi_D, 1), root number) by the two-point exponential-sum method.

    The twisted series has level N*D^2 (D coprime to N); the root number is
    determined numerically by requiring F(x) + w F(1/x) to be independent
    of x, which holds for exactly one w in {1, -1}.
    """
    N = E.conductor * twist_disc * twist_disc
    sqN = sqrt(N)
    digits = mp.dps - 4
    nmax = int(mpf(digits) * mp.log(10) / (2 * pi) * sqN * mpf("1.35")) + 20
    an = E.an_coefficients(nmax)
    if twist_disc != 1:
        an = [an[n] * kronecker(twist_disc, n) if n else 0 for n in range(len(an))]

    def F(x):
        r = exp(-2 * pi * x / sqN)
        s = mpf(0)
        rn = mpf(1)
        for n in range(1, nmax):
            rn *= r
            if an[n]:
                s += mpf(an[n]) / n * rn
        return s

    xs = x_probe or [mpf("1.1"), mpf("1.23")]
    f1, g1 = F(xs[0]), F(1 / xs[0])
    f2, g2 = F(xs[1]), F(1 / xs[1])
    d_plus = abs((f1 + g1) - (f2 + g2))
    d_minus = abs((f1 - g1) - (f2 - g2))
    w = 1 if d_plus < d_minus else -1
    val = ((f1 + w * g1) + (f2 + w * g2)) / 2
    scale = max(abs(val), mpf(1))
    if min(d_plus, d_minus) > scale * mpf(10) ** (-digits + 8):
        raise ArithmeticError("root number detection failed")
    return val, w


def recognize_rational(x, max_den=10**6, digits=None):
    """Nearest rational with small denominator; raises if the fit is poor."""
    if digits is None:
        digits = mp.dps - 6
    fr = Fraction(str(x) if not isinstance(x, str) else x).limit_denominator(max_den)
    err = abs(mpf(fr.numerator) / fr.denominator - mpf(str(x)))
    tol = mpf(10) ** (-digits) * max(1, abs(mpf(str(x))))
    if err > tol:
        raise ArithmeticError(f"value {x} is not a small rational (err {err})")
    return fr


@_with_dps
def algebraic_l_ratio(E, sign=+1):
    """L(E,1)/Omega+ (sign +1) or the odd analogue via a twist, as an exact
    rational, computed from the analytic oracle.  Returns 0 for curves with
    odd functional equation when sign = +1.
    """
    _, _, omp, omm = period_lattice(E.a)
    if sign == +1:
        L, w = l_value(E)
        if w == -1:
            return Fraction(0)
        return recognize_rational(L / omp, max_den=10**5)
    raise ValueError("sign must be +1 here; odd parts are calibrated in modsym")
