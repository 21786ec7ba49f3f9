"""Exact p-adic scalars with precision tracking.

A scalar is stored as p^v * u with u a unit known modulo p^M, so the value
is known modulo p^(v+M).  Exact zeros are a distinguished state (v = +oo),
kept separate from "zero to the working precision" (M = 0), because
order-of-vanishing decisions downstream must tell the two apart.

Arithmetic never reports more precision than the operands justify.  The
logarithm uses the Iwasawa branch log(p) = 0, which is the branch under
which the L-invariant log(q)/ord(q) of a Tate period is well defined.
"""

from fractions import Fraction

from .ntheory import inv_mod, kronecker, sqrt_mod, valuation

DEFAULT_PRECISION = 20


class PadicError(ValueError):
    pass


class PrecisionError(PadicError):
    """Raised when a comparison needs more precision than is available."""


class PadicScalar:
    """An element of Q_p known modulo p^(v+M).

    Invariants: for a finite value, 0 <= u < p^M and gcd(u, p) = 1 whenever
    M > 0.  M = 0 encodes an inexact zero O(p^v).  v is None for the exact
    zero.
    """

    __slots__ = ("p", "v", "u", "M")

    def __init__(self, p, v, u, M):
        self.p = p
        if v is None:  # exact zero
            self.v = None
            self.u = 0
            self.M = 0
            return
        if M < 0:
            M = 0
        u %= p**M if M > 0 else 1
        if M > 0 and u % p == 0:
            raise PadicError("unit part divisible by p")
        self.v, self.u, self.M = v, u, M

    # -- constructors -------------------------------------------------

    @classmethod
    def exact_zero(cls, p):
        return cls(p, None, 0, 0)

    @classmethod
    def inexact_zero(cls, p, abs_prec):
        return cls(p, abs_prec, 0, 0)

    @classmethod
    def from_int(cls, n, p, M=DEFAULT_PRECISION):
        if n == 0:
            return cls.exact_zero(p)
        v = valuation(n, p)
        u = (n // p**v) % p**M
        return cls(p, v, u, M)

    @classmethod
    def from_rational(cls, x, p, M=DEFAULT_PRECISION):
        x = Fraction(x)
        if x == 0:
            return cls.exact_zero(p)
        vn = valuation(x.numerator, p)
        vd = valuation(x.denominator, p)
        num = x.numerator // p**vn
        den = x.denominator // p**vd
        u = num * inv_mod(den, p**M) % p**M
        return cls(p, vn - vd, u, M)

    # -- state --------------------------------------------------------

    @property
    def is_exact_zero(self):
        return self.v is None

    @property
    def abs_prec(self):
        """Value is known modulo p^abs_prec (None for an exact zero)."""
        if self.is_exact_zero:
            return None
        return self.v + self.M

    def is_zero_at(self, k):
        """Provably 0 modulo p^k?  Raises if the precision cannot decide."""
        if self.is_exact_zero:
            return True
        if self.M > 0 and self.v < k:
            return False
        if self.v >= k:
            return True
        raise PrecisionError(f"need O(p^{k}) but value only known modulo p^{self.abs_prec}")

    def lift(self):
        """Representative of the value modulo p^abs_prec (Fraction if v < 0)."""
        if self.is_exact_zero:
            return 0
        if self.v < 0:
            return Fraction(self.u, self.p**(-self.v))
        return self.p**self.v * self.u

    def unit_lift(self):
        if self.M == 0:
            raise PrecisionError("no unit part available (zero at working precision)")
        return self.u

    # -- arithmetic ---------------------------------------------------

    def _check(self, other):
        if self.p != other.p:
            raise PadicError(f"prime mismatch: {self.p} vs {other.p}")

    def _coerce(self, x, extra=3):
        """Convert an int/Fraction to a scalar at precision dominating self's."""
        target = (self.abs_prec if not self.is_exact_zero else DEFAULT_PRECISION) + extra
        x = Fraction(x)
        if x == 0:
            return PadicScalar.exact_zero(self.p)
        v = valuation(x.numerator, self.p) - valuation(x.denominator, self.p)
        return PadicScalar.from_rational(x, self.p, max(target - v, 1))

    @classmethod
    def _from_lift(cls, w, p, abs_prec):
        """Build from an integer known modulo p^abs_prec."""
        w %= p**abs_prec
        if w == 0:
            return cls.inexact_zero(p, abs_prec)
        v = valuation(w, p)
        return cls(p, v, w // p**v, abs_prec - v)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        self._check(other)
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        ap = min(self.abs_prec, other.abs_prec)
        v0 = min(self.v, other.v)
        p = self.p
        w = self.u * p**(self.v - v0) + other.u * p**(other.v - v0)
        if ap - v0 <= 0:
            return PadicScalar.inexact_zero(p, ap)
        w %= p**(ap - v0)
        if w == 0:
            return PadicScalar.inexact_zero(p, ap)
        vv = valuation(w, p)
        return PadicScalar(p, v0 + vv, w // p**vv, ap - v0 - vv)

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact_zero:
            return self
        return PadicScalar(self.p, self.v, (-self.u) % self.p**self.M if self.M else 0, self.M)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return PadicScalar.exact_zero(self.p)
            other = self._coerce(other)
        self._check(other)
        if self.is_exact_zero or other.is_exact_zero:
            return PadicScalar.exact_zero(self.p)
        M = min(self.M, other.M)
        v = self.v + other.v
        if M == 0:
            return PadicScalar.inexact_zero(self.p, v)
        return PadicScalar(self.p, v, self.u * other.u % self.p**M, M)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_exact_zero:
            raise PadicError("division by exact zero")
        if self.M == 0:
            raise PadicError(f"division by a value indistinguishable from 0 (O(p^{self.v}))")
        return PadicScalar(self.p, -self.v, inv_mod(self.u, self.p**self.M), self.M)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = PadicScalar.from_int(1, self.p, self.M if not self.is_exact_zero else DEFAULT_PRECISION)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparisons ----------------------------------------------------

    def agrees_with(self, other, k):
        """True iff self = other modulo p^k, provably."""
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other, extra=k + 3)
        return (self - other).is_zero_at(k)

    def agreement_digits(self, other):
        """Number of p-adic digits (absolute) to which the two values agree."""
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        d = self - other
        if d.is_exact_zero:
            return None  # agree to all available precision
        if d.M == 0:
            return None  # indistinguishable up to the joint precision p^d.v
        return d.v

    def __repr__(self):
        if self.is_exact_zero:
            return f"0 (exact, p={self.p})"
        if self.M == 0:
            return f"O({self.p}^{self.v})"
        return f"{self.lift()} + O({self.p}^{self.abs_prec})"

    def digits_string(self, ndigits=None):
        """Base-p digit string (least significant first), scaled by p^v if v < 0."""
        if self.is_exact_zero:
            return "0(exact)"
        n = self.abs_prec if ndigits is None else min(ndigits, self.abs_prec)
        if self.v < 0:
            w = self.u % self.p**(n - self.v)
            ds = []
            for _ in range(n - self.v):
                ds.append(str(w % self.p))
                w //= self.p
            return f"{self.p}^{self.v}*(" + ",".join(ds) + f") + O({self.p}^{n})"
        w = self.lift() % self.p**n
        ds = []
        for _ in range(n):
            ds.append(str(w % self.p))
            w //= self.p
        return ",".join(ds) + f" + O({self.p}^{n})"


# -- unit roots, Teichmueller, log, exp, sqrt ---------------------------


class NotOrdinaryError(PadicError):
    pass


def hensel_unit_root(a_p, p, M=DEFAULT_PRECISION):
    """The unit root of X^2 - a_p X + p, lifted to precision M.

    Requires p not dividing a_p (good ordinary reduction).  The root is
    found by Newton iteration from the root a_p of X^2 - a_p X modulo p.
    """
    if a_p % p == 0:
        raise NotOrdinaryError(f"a_p = {a_p} is divisible by p = {p}: not ordinary")
    x = a_p % p
    prec = 1
    while prec < M:
        prec = min(2 * prec, M)
        mod = p**prec
        f = (x * x - a_p * x + p) % mod
        df = (2 * x - a_p) % mod
        x = (x - f * inv_mod(df, mod)) % mod
    assert (x * x - a_p * x + p) % p**M == 0
    return PadicScalar(p, 0, x % p**M, M)


def teichmuller(a, p, M=DEFAULT_PRECISION):
    """The Teichmueller representative of the unit a, modulo p^M."""
    if a % p == 0:
        raise PadicError("not a unit")
    mod = p**M
    x = a % mod
    for _ in range(M + 1):
        x = pow(x, p, mod)
    return x


def _log1p_lift(t, p, M):
    """log(1+t) as an integer mod p^M, for v_p(t) >= 1 (>= 2 when p = 2).

    Computed with guard digits so the divisions by k are exact to the
    reported precision.
    """
    vt = valuation(t, p) if t % p**M != 0 else M
    if vt < 1 or (p == 2 and vt < 2):
        raise PadicError("log series requires t = 0 mod p (mod 4 for p = 2)")
    guard = 2
    k = 1
    while True:
        k += 1
        if k * vt - (valuation(k, p) if k % p == 0 else 0) >= M + guard:
            break
    kmax = k
    modg = p**(M + guard + kmax)  # generous working modulus
    acc = 0
    tk = t % modg
    for k in range(1, kmax + 1):
        term = tk
        vk = valuation(k, p) if k % p == 0 else 0
        term //= p**vk
        kk = k // p**vk
        term = term * inv_mod(kk, modg) % modg
        # restore the p-power division done on tk's valuation:
        # v_p(t^k) >= k*vt >= vk + 1 in the convergence range, so the
        # integer division above was exact on the true value.
        if k % 2 == 1:
            acc = (acc + term) % modg
        else:
            acc = (acc - term) % modg
        tk = tk * t % modg
    return acc % p**M


def iwasawa_log(x: PadicScalar, M=None) -> PadicScalar:
    """The Iwasawa-branch p-adic logarithm: log(p) = 0, log(roots of 1) = 0.

    Homomorphism on Q_p^*; handles any nonzero input by projecting to the
    1 + pZ_p (1 + 4Z_2) disc through x -> <x> = x * p^-v * omega(x)^-1.
    """
    if x.is_exact_zero or x.M == 0:
        raise PadicError("log of zero at working precision")
    p = x.p
    if M is None:
        M = x.M
    M = min(M, x.M)
    mod = p**(M + 2)
    u = x.u % mod
    if p == 2:
        # square into 1 + 4Z_2, halve afterwards
        t = (u * u - 1) % mod
        w = _log1p_lift(t, p, M + 1)
        w = w // 2 if w % 2 == 0 else (w - 2**(M + 1)) // 2
        return PadicScalar._from_lift(w, p, M)
    om = teichmuller(u, p, M + 2)
    uu = u * inv_mod(om, mod) % mod
    w = _log1p_lift((uu - 1) % mod, p, M)
    return PadicScalar._from_lift(w, p, M)


def padic_exp(x: PadicScalar) -> PadicScalar:
    """exp(x) for v(x) >= 1 (v >= 2 when p = 2)."""
    if x.is_exact_zero:
        return PadicScalar.from_int(1, x.p, DEFAULT_PRECISION)
    p = x.p
    if x.M == 0 or x.v < 1 or (p == 2 and x.v < 2):
        raise PadicError("exp requires positive valuation known input")
    out = PadicScalar.from_int(1, p, x.M + x.v)
    term = PadicScalar.from_int(1, p, x.M + x.v)
    k = 0
    while True:
        k += 1
        term = term * x / k
        if term.is_exact_zero or term.M == 0 or term.v >= out.abs_prec:
            break
        out = out + term
        if k > 10 * (x.M + 5):
            raise PadicError("exp series failed to converge")
    return out


def padic_sqrt(x: PadicScalar) -> PadicScalar:
    """A square root of x in Q_p, if one exists."""
    if x.is_exact_zero:
        return x
    p, M = x.p, x.M
    if x.v % 2 != 0:
        raise PadicError("odd valuation: not a square in Q_p")
    if p == 2:
        if x.u % 8 != 1:
            raise PadicError("unit not = 1 mod 8: not a square in Q_2")
        mod = 2**(M + 3)
        r = 1
        for k in range(3, M + 3):
            if (r * r - x.u) % 2**(k + 1) != 0:
                r += 2**(k - 1)
        r %= 2**M
        return PadicScalar(p, x.v // 2, r, M - 1)
    if kronecker(x.u % p, p) != 1:
        raise PadicError("unit is a non-residue: not a square in Q_p")
    r = sqrt_mod(x.u % p, p)
    mod = p
    while mod < p**M:
        mod = min(mod * mod, p**M)
        r = (r - (r * r - x.u) * inv_mod(2 * r, mod)) % mod
    return PadicScalar(p, x.v // 2, r, M)
