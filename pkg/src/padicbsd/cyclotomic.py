"""Exact arithmetic in Z[zeta_m] (coefficients as Fractions, reduced modulo
the m-th cyclotomic polynomial), just enough for twisted L-value sums and
their embeddings into Q_p via Teichmueller lifts (m | p - 1)."""

from fractions import Fraction

from sympy import Poly, symbols
from sympy.polys.specialpolys import cyclotomic_poly

from .ntheory import inv_mod
from .padic import PadicScalar, teichmuller

_x = symbols("x")
_PHI_CACHE = {}


def _phi_coeffs(m):
    if m not in _PHI_CACHE:
        cp = Poly(cyclotomic_poly(m, _x), _x)
        _PHI_CACHE[m] = [int(c) for c in cp.all_coeffs()[::-1]]  # low to high
    return _PHI_CACHE[m]


class CycElement:
    """An element of Q(zeta_m), stored as coefficients of 1, z, ..., z^(d-1)."""

    __slots__ = ("m", "c")

    def __init__(self, m, coeffs=None):
        self.m = m
        d = len(_phi_coeffs(m)) - 1
        self.c = [Fraction(0)] * d
        if coeffs:
            for i, v in enumerate(coeffs):
                if i < d:
                    self.c[i] = Fraction(v)
                else:
                    raise ValueError("unreduced coefficient vector")

    @classmethod
    def zeta_power(cls, m, k):
        """zeta_m^k, reduced."""
        k %= m
        d = len(_phi_coeffs(m)) - 1
        out = cls(m)
        if k < d:
            out.c[k] = Fraction(1)
            return out
        # reduce z^k modulo Phi_m by repeated division
        work = {k: Fraction(1)}
        phi = _phi_coeffs(m)
        while work:
            top = max(work)
            if top < d:
                break
            coef = work.pop(top)
            if coef == 0:
                continue
            # z^top = -sum phi[i] z^(top-d+i) / phi[d]  (phi monic)
            for i in range(d):
                if phi[i]:
                    work[top - d + i] = work.get(top - d + i, Fraction(0)) - coef * phi[i]
        for e, coef in work.items():
            out.c[e] = out.c[e] + coef
        return out

    @classmethod
    def rational(cls, m, q):
        out = cls(m)
        out.c[0] = Fraction(q)
        return out

    def __add__(self, other):
        other = self._coerce(other)
        out = CycElement(self.m)
        out.c = [a + b for a, b in zip(self.c, other.c)]
        return out

    __radd__ = __add__

    def __neg__(self):
        out = CycElement(self.m)
        out.c = [-a for a in self.c]
        return out

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def _coerce(self, other):
        if isinstance(other, CycElement):
            if other.m != self.m:
                raise ValueError("mixed cyclotomic orders")
            return other
        return CycElement.rational(self.m, other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            out = CycElement(self.m)
            out.c = [a * other for a in self.c]
            return out
        other = self._coerce(other)
        d = len(self.c)
        raw = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    if b:
                        raw[i + j] += a * b
        phi = _phi_coeffs(self.m)
        for top in range(2 * d - 2, d - 1, -1):
            coef = raw[top]
            if coef:
                raw[top] = Fraction(0)
                for i in range(d):
                    if phi[i]:
                        raw[top - d + i] -= coef * phi[i]
        out = CycElement(self.m)
        out.c = raw[:d]
        return out

    __rmul__ = __mul__

    def conjugate(self):
        """Complex conjugation zeta -> zeta^(-1)."""
        out = CycElement(self.m)
        for i, a in enumerate(self.c):
            if a:
                out = out + CycElement.zeta_power(self.m, -i) * a
        return out

    def is_rational(self):
        return all(a == 0 for a in self.c[1:])

    def as_rational(self):
        if not self.is_rational():
            raise ValueError(f"not rational: {self.c}")
        return self.c[0]

    def embed_padic(self, p, M, zeta_image=None):
        """Image in Q_p sending zeta_m to a fixed Teichmueller root (m | p-1)."""
        if zeta_image is None:
            zeta_image = teichmuller_root_of_unity(self.m, p, M)
        out = PadicScalar.exact_zero(p)
        zk = PadicScalar.from_int(1, p, M)
        for a in self.c:
            if a:
                out = out + zk * a
            zk = zk * zeta_image
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        return self.c == other.c

    def __repr__(self):
        return f"Cyc({self.m}; {self.c})"


def primitive_root(p):
    from sympy import primitive_root as _pr
    return int(_pr(p))


def teichmuller_root_of_unity(m, p, M):
    """A primitive m-th root of unity in Z_p (requires m | p - 1)."""
    if (p - 1) % m != 0:
        raise ValueError(f"{m} does not divide p - 1 = {p - 1}")
    g = primitive_root(p)
    w = teichmuller(g, p, M)
    return PadicScalar(p, 0, pow(w, (p - 1) // m, p**M), M)


class TameCharacter:
    """A Dirichlet character of conductor p (p odd): chi = omega^j on (Z/p)^*,
    with exact values in Z[zeta_(p-1)] and a compatible p-adic avatar."""

    def __init__(self, p, j):
        self.p = p
        self.j = j % (p - 1)
        self.m = p - 1
        g = primitive_root(p)
        self._index = {}
        x = 1
        for e in range(p - 1):
            self._index[x] = e
            x = x * g % p

    @property
    def is_trivial(self):
        return self.j == 0

    def parity(self):
        """+1 for even (chi(-1) = 1), -1 for odd."""
        return 1 if (self.j % 2) == 0 else -1

    def value(self, a):
        """Exact value in Z[zeta_(p-1)] (0 on non-units)."""
        a %= self.p
        if a == 0:
            return CycElement(self.m)
        return CycElement.zeta_power(self.m, self.j * self._index[a])

    def value_padic(self, a, M):
        a %= self.p
        if a == 0:
            return PadicScalar.exact_zero(self.p)
        w = teichmuller(a, self.p, M)
        return PadicScalar(self.p, 0, pow(w, self.j, self.p**M), M)

    def conjugate(self):
        return TameCharacter(self.p, -self.j)
