"""Truncated elements of the completed group ring of Gamma = Z_p^d (d = 1, 2).

An element is represented by its power-series truncation in T = gamma - 1
(variables T+ and T- for d = 2, ordered basis (gamma+, gamma-) fixed by the
frame).  Leading terms are extracted as symmetric tensors in the monomial
basis (gamma+)^i (gamma-)^(r-i); this is the Taylor-coefficient normalisation
(the image in I^r/I^(r+1) under prod(gamma_i - 1) -> [gamma_1 x ... x gamma_r]),
not an r-th derivative.

Order-of-vanishing here is numerical: a coefficient "vanishes" when it is zero
to the stated tolerance, and reports always carry the tolerance used.
Structural zeros arise only from exact zeros.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .ntheory import inv_mod, valuation
from .padic import DEFAULT_PRECISION, PadicScalar, PrecisionError, teichmuller

DEFAULT_TRUNCATION = 4


@dataclass(frozen=True)
class GammaFrame:
    """Fixed topological generators of Gamma, shared by every value compared.

    For d = 2 the basis is the ordered pair (gamma+, gamma-); all symmetric
    tensor coordinates are reported against this basis.  The descriptions
    record how the generators were pinned (for reports).
    """
    p: int
    rank: int
    labels: tuple = ()
    description: str = ""

    def __post_init__(self):
        if self.rank not in (1, 2):
            raise ValueError("rank must be 1 or 2")
        if not self.labels:
            object.__setattr__(
                self, "labels",
                ("gamma",) if self.rank == 1 else ("gamma+", "gamma-"))

    def zero_key(self):
        return (0,) * self.rank


def _is_scalar_zero_at(c, k):
    """Zero-at-tolerance test working for PadicScalar and Fraction coefficients."""
    if isinstance(c, PadicScalar):
        return c.is_zero_at(k)
    return c == 0


def _scalar_valuation(c, p):
    if isinstance(c, PadicScalar):
        if c.is_exact_zero:
            return None
        return c.v
    if c == 0:
        return None
    c = Fraction(c)
    return valuation(c.numerator, p) - valuation(c.denominator, p)


class IwasawaElement:
    """Sum of c_(i,j) * T+^i T-^j over i + j <= D (single T when rank 1)."""

    def __init__(self, frame: GammaFrame, coeffs=None, truncation=DEFAULT_TRUNCATION):
        self.frame = frame
        self.D = truncation
        self.coeffs = {}
        if coeffs:
            for key, c in coeffs.items():
                key = tuple(key) if isinstance(key, (tuple, list)) else (key,)
                if len(key) != frame.rank:
                    raise ValueError("exponent arity does not match frame rank")
                if sum(key) <= self.D:
                    self.coeffs[key] = c

    # -- basics ---------------------------------------------------------

    def coefficient(self, key):
        key = tuple(key) if isinstance(key, (tuple, list)) else (key,)
        return self.coeffs.get(key, PadicScalar.exact_zero(self.frame.p))

    def constant_term(self):
        """Evaluation at the trivial character."""
        return self.coefficient(self.frame.zero_key())

    def _zero(self):
        return PadicScalar.exact_zero(self.frame.p)

    def __add__(self, other):
        if self.frame != other.frame:
            raise ValueError("frame mismatch")
        D = min(self.D, other.D)
        out = {}
        for k in set(self.coeffs) | set(other.coeffs):
            if sum(k) <= D:
                out[k] = self.coefficient(k) + other.coefficient(k)
        return IwasawaElement(self.frame, out, D)

    def __neg__(self):
        return IwasawaElement(self.frame, {k: -c for k, c in self.coeffs.items()}, self.D)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicScalar)):
            return IwasawaElement(
                self.frame, {k: c * other for k, c in self.coeffs.items()}, self.D)
        if self.frame != other.frame:
            raise ValueError("frame mismatch")
        D = min(self.D, other.D)
        out = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                if sum(k) <= D:
                    out[k] = out.get(k, self._zero()) + c1 * c2
        return IwasawaElement(self.frame, out, D)

    __rmul__ = __mul__

    def __repr__(self):
        names = ("T+", "T-") if self.frame.rank == 2 else ("T",)
        parts = []
        for k in sorted(self.coeffs, key=lambda t: (sum(t), t)):
            mono = "*".join(f"{n}^{e}" for n, e in zip(names, k) if e) or "1"
            parts.append(f"({self.coeffs[k]})*{mono}")
        return " + ".join(parts) or "0"

    # -- involutions ------------------------------------------------------

    def _substitute(self, images):
        """Compose with T_i -> images[i], a polynomial dict {exponent: int}."""
        D = self.D
        rank = self.frame.rank
        # precompute powers of each image series as dicts key->coeff(int)
        pows = []
        for i in range(rank):
            pw = [{(0,) * rank: 1}]
            base = images[i]
            for _ in range(D):
                nxt = {}
                for k1, c1 in pw[-1].items():
                    for k2, c2 in base.items():
                        k = tuple(a + b for a, b in zip(k1, k2))
                        if sum(k) <= D:
                            nxt[k] = nxt.get(k, 0) + c1 * c2
                pw.append(nxt)
            pows.append(pw)
        out = {}
        for k, c in self.coeffs.items():
            term = {(0,) * rank: 1}
            for i, e in enumerate(k):
                if e:
                    nxt = {}
                    for k1, c1 in term.items():
                        for k2, c2 in pows[i][e].items():
                            kk = tuple(a + b for a, b in zip(k1, k2))
                            if sum(kk) <= D:
                                nxt[kk] = nxt.get(kk, 0) + c1 * c2
                    term = nxt
            for kk, m in term.items():
                if m:
                    out[kk] = out.get(kk, self._zero()) + c * m
        return IwasawaElement(self.frame, out, D)

    def _inversion_series(self, var):
        """(1+T)^(-1) - 1 = -T + T^2 - T^3 + ... as a polynomial dict."""
        rank = self.frame.rank
        out = {}
        for k in range(1, self.D + 1):
            key = tuple(k if i == var else 0 for i in range(rank))
            out[key] = (-1) ** k
        return out

    def _identity_series(self, var):
        rank = self.frame.rank
        return {tuple(1 if i == var else 0 for i in range(rank)): 1}

    def star_involution(self):
        """Inversion gamma -> gamma^(-1) on every variable (chi -> chi^(-1))."""
        images = [self._inversion_series(i) for i in range(self.frame.rank)]
        return self._substitute(images)

    def galois_conjugation(self):
        """Complex conjugation: fixes gamma+, inverts gamma- (d = 2 only)."""
        if self.frame.rank != 2:
            raise ValueError("galois_conjugation needs rank 2")
        return self._substitute([self._identity_series(0), self._inversion_series(1)])

    def restrict_plus_line(self):
        """Specialise T- -> 0 (the quotient Gamma -> Gamma+)."""
        if self.frame.rank != 2:
            raise ValueError("rank-2 element required")
        sub = GammaFrame(self.frame.p, 1, ("gamma+",), self.frame.description)
        out = {(i,): c for (i, j), c in self.coeffs.items() if j == 0}
        return IwasawaElement(sub, out, self.D)

    def restrict_minus_line(self):
        if self.frame.rank != 2:
            raise ValueError("rank-2 element required")
        sub = GammaFrame(self.frame.p, 1, ("gamma-",), self.frame.description)
        out = {(j,): c for (i, j), c in self.coeffs.items() if i == 0}
        return IwasawaElement(sub, out, self.D)

    # -- vanishing and leading terms --------------------------------------

    def order_of_vanishing(self, tol_digits):
        """Smallest total degree with a coefficient nonzero at tolerance.

        Returns None when every coefficient up to the truncation vanishes
        (order >= D + 1 at this tolerance).  Raises PrecisionError when a
        deciding coefficient carries fewer than tol_digits digits.
        """
        for r in range(self.D + 1):
            for k, c in self.coeffs.items():
                if sum(k) == r and not _is_scalar_zero_at(c, tol_digits):
                    return r
        return None

    def leading_term(self, r, tol_digits):
        """The image in I^r/I^(r+1) as a SymTensor, checking the lower terms."""
        for k, c in self.coeffs.items():
            if sum(k) < r and not _is_scalar_zero_at(c, tol_digits):
                raise ValueError(
                    f"coefficient {k} = {c} does not vanish at tolerance {tol_digits}")
        coords = {}
        for k, c in self.coeffs.items():
            if sum(k) == r:
                coords[k[0] if self.frame.rank == 2 else 0] = c
        return SymTensor(self.frame, r, coords)


@dataclass
class SymTensor:
    """An element of Sym^r(Gamma) tensor Q_p in the basis (gamma+)^i (gamma-)^(r-i).

    coords maps i (the gamma+ exponent; 0 for rank 1) to the coordinate.
    Coordinates may be PadicScalar or exact Fractions.
    """
    frame: GammaFrame
    degree: int
    coords: dict = field(default_factory=dict)

    def coordinate(self, i):
        if not (0 <= i <= self.degree):
            raise IndexError(f"index {i} out of range for degree {self.degree}")
        z = PadicScalar.exact_zero(self.frame.p)
        return self.coords.get(i, z)

    def project_pm(self, i):
        """Coordinate of (gamma+)^i (gamma-)^(r-i): the pi_i projection."""
        return self.coordinate(i)

    def __add__(self, other):
        if self.degree != other.degree or self.frame != other.frame:
            raise ValueError("degree/frame mismatch")
        out = dict(self.coords)
        for i, c in other.coords.items():
            out[i] = out[i] + c if i in out else c
        return SymTensor(self.frame, self.degree, out)

    def __neg__(self):
        return SymTensor(self.frame, self.degree, {i: -c for i, c in self.coords.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return SymTensor(self.frame, self.degree, {i: c * s for i, c in self.coords.items()})

    def __mul__(self, other):
        """Product Sym^a x Sym^b -> Sym^(a+b) (commutative polynomial product)."""
        if isinstance(other, (int, Fraction, PadicScalar)):
            return self.scale(other)
        if self.frame != other.frame:
            raise ValueError("frame mismatch")
        out = {}
        for i, c1 in self.coords.items():
            for j, c2 in other.coords.items():
                k = i + j
                out[k] = out[k] + c1 * c2 if k in out else c1 * c2
        return SymTensor(self.frame, self.degree + other.degree, out)

    __rmul__ = __mul__

    def conjugate(self):
        """Action of complex conjugation: gamma+ fixed, gamma- negated."""
        return SymTensor(self.frame, self.degree, {
            i: c * ((-1) ** ((self.degree - i) % 2)) for i, c in self.coords.items()})

    def is_zero_at(self, tol_digits):
        return all(_is_scalar_zero_at(c, tol_digits) for c in self.coords.values())

    def __repr__(self):
        if self.frame.rank == 1:
            g = self.frame.labels[0]
            return " + ".join(f"({c})*{g}^{self.degree}" for c in self.coords.values()) or "0"
        gp, gm = self.frame.labels
        parts = [f"({c})*{gp}^{i}*{gm}^{self.degree - i}"
                 for i, c in sorted(self.coords.items())]
        return " + ".join(parts) or "0"


# -- measures on Z_p^* -> power series in T ------------------------------


def dlog_table(p, n):
    """Discrete logs base 1+p on (1+pZ_p)/(1+p^n): dict value mod p^n -> exponent."""
    mod = p**n
    size = p ** (n - 1)
    table = {}
    g = 1
    for e in range(size):
        table[g] = e
        g = g * (1 + p) % mod
    return table


def measure_to_series(frame, mu, n, cap_precision=True):
    """Convert measure values mu[a] on cosets a + p^n Z_p (a coprime to p)
    into the power-series element sum_k c_k T^k via c_k = sum_a mu(a) C(e_a, k),
    where e_a is the base-(1+p) discrete log of <a> modulo p^(n-1).

    The attained absolute precision of c_k is n - 1 - v_p(k!) (the Vandermonde
    bound for the dlog ambiguity), recorded on the coefficient.  c_0 is the
    total mass, exact in the inputs.
    """
    p = frame.p
    if frame.rank != 1:
        raise ValueError("measure conversion targets a rank-1 frame")
    if p == 2:
        raise ValueError("p = 2 tower not supported")
    mod = p**n
    table = dlog_table(p, n)
    teich = {r: teichmuller(r, p, n) for r in range(1, p)}
    D = min(DEFAULT_TRUNCATION, n - 1)
    elems = []  # (e_a, mu_a)
    for a, m in mu.items():
        a %= mod
        om = teich[a % p]
        e = table[a * inv_mod(om, mod) % mod]
        elems.append((e, m))
    coeffs = {}
    for k in range(D + 1):
        c = None
        for e, m in elems:
            term = m * comb(e, k)
            c = term if c is None else c + term
        if c is None:
            c = PadicScalar.exact_zero(p)
        if cap_precision and k >= 1 and isinstance(c, PadicScalar) and not c.is_exact_zero:
            vk = sum(valuation(j, p) for j in range(1, k + 1) if j % p == 0)
            c = _cap_abs_precision(c, n - 1 - vk)
        coeffs[(k,)] = c
    return IwasawaElement(frame, coeffs, D)


def _cap_abs_precision(c: PadicScalar, A: int) -> PadicScalar:
    if A <= 0:
        return PadicScalar.inexact_zero(c.p, max(A, 0))
    if c.is_exact_zero or c.abs_prec <= A:
        return c
    if c.v >= A:
        return PadicScalar.inexact_zero(c.p, A)
    return PadicScalar(c.p, c.v, c.u % c.p ** (A - c.v), A - c.v)
