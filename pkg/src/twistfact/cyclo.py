"""Exact arithmetic in Z[zeta_d] and Q(zeta_d).

Elements are coefficient vectors in the power basis 1, z, ..., z^(phi(d)-1)
modulo the cyclotomic polynomial.  Prime ideals above an unramified rational
prime p are represented by the monic irreducible factors of Phi_d mod p, and
valuations are computed by Hensel-lifting a root of Phi_d into the
unramified extension of Z_p cut out by that factor.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from sympy import factorint, isprime, totient

from . import polyutil as pu
from .errors import (
    InfiniteValuation,
    InternalArithmeticError,
    InvalidParameter,
    PrecisionError,
    RecognitionFailure,
    Unsupported,
)

HENSEL_START = 8
HENSEL_CAP = 512


def _check_d(d):
    if not isinstance(d, int) or d <= 1:
        raise InvalidParameter(f"d must be an integer > 1, got {d!r}")
    if any(e > 1 for e in factorint(d).values()):
        raise InvalidParameter(f"d={d} is not squarefree")


@lru_cache(maxsize=None)
def cyclotomic(d):
    """Integer coefficients of Phi_d, lowest degree first."""
    if d == 1:
        return (-1, 1)
    num = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            num, r = pu.divmod_monic(num, list(cyclotomic(e)))
            assert not r
    return tuple(num)


def phi(d):
    return int(totient(d))


def units_mod(d):
    return [k for k in range(1, d) if math.gcd(k, d) == 1]


@dataclass(frozen=True)
class CycElt:
    d: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != phi(self.d):
            raise InvalidParameter("coefficient vector length must equal phi(d)")

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, d):
        return cls(d, (0,) * phi(d))

    @classmethod
    def one(cls, d):
        return cls.from_int(1, d)

    @classmethod
    def from_int(cls, n, d):
        return cls(d, (n,) + (0,) * (phi(d) - 1))

    @classmethod
    def zeta(cls, d, power=1):
        return reduce([0] * (power % d) + [1], d)

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CycElt):
            if other.d != self.d:
                raise InvalidParameter("mixing elements of different cyclotomic rings")
            return other
        if isinstance(other, (int, Fraction)):
            return CycElt(self.d, (other,) + (0,) * (len(self.coeffs) - 1))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycElt(self.d, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycElt(self.d, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return reduce(pu.mul(list(self.coeffs), list(other.coeffs)), self.d)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = CycElt.one(self.d), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_integral(self):
        return all(Fraction(c).denominator == 1 for c in self.coeffs)

    def galois(self, k):
        """Image under the automorphism z -> z^k."""
        if math.gcd(k, self.d) != 1:
            raise InvalidParameter(f"k={k} is not a unit mod {self.d}")
        raw = [0] * self.d
        for j, c in enumerate(self.coeffs):
            raw[j * k % self.d] += c
        return reduce(raw, self.d)

    def conj(self):
        return self.galois(self.d - 1)

    def inverse(self):
        """Inverse in Q(zeta_d) as the product of the other conjugates over the norm."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        prod = CycElt.one(self.d)
        for k in units_mod(self.d)[1:]:
            prod = prod * self.galois(k)
        n = norm_to_Z(self)
        return CycElt(self.d, tuple(Fraction(c) / n for c in prod.coeffs))

    def embed(self, k=1, prec=None):
        """Complex value under z -> exp(2 pi i k / d)."""
        ctx = mpmath.workprec(prec) if prec else _nullctx()
        with ctx:
            z = mpmath.expjpi(mpmath.mpf(2 * k) / self.d)
            acc = mpmath.mpc(0)
            for c in reversed(self.coeffs):
                acc = acc * z + (mpmath.mpf(c.numerator) / c.denominator
                                 if isinstance(c, Fraction) else c)
            return acc

    def __repr__(self):
        return f"CycElt({self.d}, {pu.show(list(self.coeffs))})"

    def to_json(self):
        return [c if isinstance(c, int) else str(c) for c in self.coeffs]


class _nullctx:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def reduce(poly, d):
    """Canonical representative of an integer/rational polynomial in z modulo Phi_d."""
    _check_d(d)
    r = pu.rem_monic(list(poly), list(cyclotomic(d)))
    n = phi(d)
    r = [Fraction(c) if isinstance(c, Fraction) and c.denominator != 1 else int(c) for c in r]
    return CycElt(d, tuple(r + [0] * (n - len(r))))


def _mult_matrix(x):
    n = len(x.coeffs)
    cols = []
    basis_elt = x
    for _ in range(n):
        cols.append(list(basis_elt.coeffs))
        basis_elt = basis_elt * CycElt.zeta(x.d)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _det(m):
    m = [row[:] for row in m]
    n = len(m)
    if all(isinstance(v, int) for row in m for v in row):
        # fraction-free Bareiss elimination
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for r in range(k + 1, n):
                    if m[r][k]:
                        m[k], m[r] = m[r], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1]
    m = [[Fraction(v) for v in row] for row in m]
    det = Fraction(1)
    for k in range(n):
        piv = next((r for r in range(k, n) if m[r][k]), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        det *= m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            for j in range(k, n):
                m[i][j] -= f * m[k][j]
    return det


def norm_to_Z(x, half=False):
    """N_{Q(zeta_d)/Q}(x); with ``half=True`` the norm from the maximal real
    subfield of a real rotation u*x (u a root of unity), see :func:`half_norm`."""
    if half:
        return half_norm(x)
    det = _det(_mult_matrix(x))
    if isinstance(det, Fraction) and det.denominator == 1:
        return det.numerator
    return det


def real_rotation(x):
    """A root of unity u = +-z^j with u*x fixed by complex conjugation, or None."""
    d = x.d
    for j in range(d):
        for s in (1, -1):
            u = CycElt.zeta(d, j) * s
            y = u * x
            if y == y.conj():
                return u
    return None


def half_norm(x):
    """Norm from Q(zeta_d)^+ to Q of u*x for a real rotation u.

    Exact and signed when a rotation exists.  Otherwise falls back to the
    integer square root of |N(x)| when that is a perfect square, else None.
    """
    u = real_rotation(x)
    if u is not None:
        y = u * x
        reps = []
        for k in units_mod(x.d):
            if k not in reps and (x.d - k) not in reps:
                reps.append(k)
        prod = CycElt.one(x.d)
        for k in reps:
            prod = prod * y.galois(k)
        if any(c != 0 for c in prod.coeffs[1:]):
            raise InternalArithmeticError("half-norm is not rational")
        c = prod.coeffs[0]
        return c.numerator if isinstance(c, Fraction) and c.denominator == 1 else c
    n = norm_to_Z(x)
    if isinstance(n, int) and n >= 0 and math.isqrt(n) ** 2 == n:
        return math.isqrt(n)
    return None


# -- primes above p ----------------------------------------------------------

class CycPrime:
    """Prime ideal (p, g(z)) of Z[zeta_d] for p not dividing d."""

    def __init__(self, p, d, g):
        self.p = p
        self.d = d
        self.g = tuple(g)
        self.residue_degree = len(self.g) - 1
        self._lock = threading.Lock()
        self._root = None  # (k, root in (Z/p^k)[y]/(G))

    def _key(self):
        return (self.p, self.d, self.g)

    def __eq__(self, other):
        return isinstance(other, CycPrime) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other):
        return sort_key(self) < sort_key(other)

    def __repr__(self):
        return f"({self.p}, {pu.show(list(self.g), p=self.p)})"

    @property
    def residue(self):
        """Root of g in F_p for residue-degree-1 primes."""
        if self.residue_degree != 1:
            return None
        return (-self.g[0]) % self.p

    # unramified extension arithmetic --------------------------------
    def _mulmod(self, a, b, mod):
        return [c % mod for c in pu.rem_monic(pu.mul(a, b), list(self.g))]

    def _inverse(self, u, mod):
        p = self.p
        v = pu.fp_inverse_mod(pu.fp(u, p), list(self.g), p)
        prec = p
        while prec < mod:
            prec = min(prec * prec, mod)
            uv = self._mulmod(u, v, prec)
            two_minus = pu.sub([2], uv)
            v = self._mulmod(v, two_minus, prec)
        return [c % mod for c in v]

    def _eval(self, poly, r, mod):
        acc = []
        for c in reversed(poly):
            acc = self._mulmod(acc, r, mod)
            acc = pu.add(acc, [c % mod])
            acc = [a % mod for a in acc]
        return pu.trim(acc)

    def hensel_root(self, k):
        """Root of Phi_d in (Z/p^k)[y]/(G) lifting y mod (p, g)."""
        with self._lock:
            if self._root is not None and self._root[0] >= k:
                return [c % self.p ** k for c in self._root[1]]
            mod = self.p ** k
            phi_d = list(cyclotomic(self.d))
            dphi = pu.derivative(phi_d)
            r = [c % mod for c in pu.rem_monic([0, 1], list(self.g))]
            prec = 1
            while True:
                prec = min(2 * prec, k)
                m = self.p ** prec
                num = self._eval(phi_d, r, m)
                den = self._inverse(self._eval(dphi, r, m), m)
                r = [c % m for c in pu.sub(r, self._mulmod(num, den, m))]
                if prec == k:
                    break
            # one more step at full precision guards against an off-by-one in the doubling
            num = self._eval(phi_d, r, mod)
            if num:
                den = self._inverse(self._eval(dphi, r, mod), mod)
                r = [c % mod for c in pu.sub(r, self._mulmod(num, den, mod))]
            self._root = (k, r)
            return list(r)


def sort_key(P):
    return (P.residue_degree, P.g)


@lru_cache(maxsize=None)
def _primes_above_cached(p, d):
    factors = pu.fp_factor_squarefree(list(cyclotomic(d)), p)
    primes = [CycPrime(p, d, f) for f in factors]
    primes.sort(key=sort_key)
    return tuple(primes)


def primes_above(p, d):
    """Prime ideals of Z[zeta_d] above p, ordered by residue degree then by the
    coefficient tuple of g (constant term first, entries in [0, p))."""
    _check_d(d)
    if not isprime(p):
        raise InvalidParameter(f"{p} is not prime")
    if d % p == 0:
        raise Unsupported(f"p={p} ramifies in Z[zeta_{d}]")
    return list(_primes_above_cached(p, d))


def prime_with_residue(p, d, a):
    for P in primes_above(p, d):
        if P.residue_degree == 1 and P.residue == a % p:
            return P
    raise InvalidParameter(f"no degree-1 prime above {p} with residue {a}")


def valuation(x, P, max_precision=HENSEL_CAP):
    """Exact P-adic valuation of x (integral or rational coefficients)."""
    if x.d != P.d:
        raise InvalidParameter("element and prime live in different rings")
    if x.is_zero():
        raise InfiniteValuation("valuation of zero")
    coeffs = [Fraction(c) for c in x.coeffs]
    den = math.lcm(*(c.denominator for c in coeffs))
    shift = 0
    while den % P.p == 0:
        den //= P.p
        shift += 1
    # multiply by p^shift * (unit) to clear denominators
    scale = den * P.p ** shift
    ints = [int(c * scale) for c in coeffs]
    k = HENSEL_START
    while True:
        k = min(k, max_precision)
        mod = P.p ** k
        r = P.hensel_root(k)
        img = P._eval(ints, r, mod)
        if img:
            v = min(_vp(c, P.p) for c in img if c)
            if v < k:
                return v - shift
        if k >= max_precision:
            raise PrecisionError(f"valuation at {P} is >= {max_precision}")
        k *= 2


def _vp(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_int(n, p):
    if n == 0:
        raise InfiniteValuation("valuation of zero")
    if isinstance(n, Fraction):
        return _vp(abs(n.numerator), p) - _vp(n.denominator, p)
    return _vp(abs(n), p)


# -- ideal parts ---------------------------------------------------------------

class IdealPart:
    """Factorization of an ideal restricted to the primes above p."""

    def __init__(self, p, d, exps=None):
        self.p = p
        self.d = d
        primes = primes_above(p, d)
        self.exps = {P: 0 for P in primes}
        for P, e in (exps or {}).items():
            if P not in self.exps:
                raise InvalidParameter(f"{P} is not above {p} in Z[zeta_{d}]")
            if e < 0:
                raise InvalidParameter("exponents must be non-negative")
            self.exps[P] = e

    @property
    def primes(self):
        return list(self.exps)

    def vector(self):
        return tuple(self.exps[P] for P in self.primes)

    def __eq__(self, other):
        return (isinstance(other, IdealPart) and (self.p, self.d) == (other.p, other.d)
                and self.vector() == other.vector())

    def __hash__(self):
        return hash((self.p, self.d, self.vector()))

    def __mul__(self, other):
        if (self.p, self.d) != (other.p, other.d):
            raise InvalidParameter("ideal parts above different primes")
        return IdealPart(self.p, self.d, {P: self.exps[P] + other.exps[P] for P in self.primes})

    def divides(self, other):
        return all(self.exps[P] <= other.exps[P] for P in self.primes)

    def is_unit(self):
        return all(e == 0 for e in self.vector())

    def norm(self):
        return math.prod(self.p ** (P.residue_degree * e) for P, e in self.exps.items())

    def galois(self, k):
        """Image under z -> z^k (a prime P maps to the prime dividing g(x^k))."""
        return IdealPart(self.p, self.d, {galois_prime(P, k): e for P, e in self.exps.items()})

    def conj(self):
        return self.galois(self.d - 1)

    @classmethod
    def rational(cls, p, d, e=1):
        """The ideal (p)^e."""
        return cls(p, d, {P: e for P in primes_above(p, d)})

    def __str__(self):
        parts = [f"{P}^{e}" for P, e in self.exps.items() if e]
        return " * ".join(parts) if parts else "(1)"

    __repr__ = __str__

    def to_json(self):
        return {
            "p": self.p,
            "factors": [{"g": list(P.g), "f": P.residue_degree, "e": e}
                        for P, e in self.exps.items()],
        }

    @classmethod
    def from_json(cls, obj, d):
        p = obj["p"]
        by_g = {P.g: P for P in primes_above(p, d)}
        exps = {}
        for fac in obj["factors"]:
            g = tuple(fac["g"])
            if g not in by_g:
                raise InvalidParameter(f"{g} is not a prime factor of Phi_{d} mod {p}")
            exps[by_g[g]] = fac["e"]
        return cls(p, d, exps)


def galois_prime(P, k):
    k %= P.d
    target = pu.compose_power(list(P.g), k)
    for Q in primes_above(P.p, P.d):
        if not pu.fp_rem(target, list(Q.g), P.p):
            return Q
    raise InternalArithmeticError("Galois image of a prime not found")


def part_above_p(x, p):
    """(x)_p as an IdealPart, checked against the p-adic valuation of N(x)."""
    if x.is_zero():
        raise InfiniteValuation("part above p of zero")
    part = IdealPart(p, x.d, {P: valuation(x, P) for P in primes_above(p, x.d)})
    total = sum(P.residue_degree * e for P, e in part.exps.items())
    if total != vp_int(norm_to_Z(x), p):
        raise InternalArithmeticError(
            f"valuations {part.vector()} disagree with v_{p}(norm)")
    return part


def ideal_from_h(h, k, p, d):
    """IdealPart of prod_theta (h_theta(z^k), p) where h is the product of the
    h_theta: each prime gets the multiplicity of its factor g in h(x^k) mod p."""
    h = pu.fp(list(h), p)
    if not h:
        raise InvalidParameter("h vanishes mod p")
    hk = pu.compose_power(h, k)
    return IdealPart(p, d, {P: pu.fp_multiplicity(hk, list(P.g), p) for P in primes_above(p, d)})


def ideal_from_roots(roots, p, d, k=1):
    """Shortcut for h = prod (x - a) over the multiset ``roots``."""
    h = [1]
    for a in roots:
        h = pu.fp_mul(h, [-a, 1], p)
    return ideal_from_h(h, k, p, d)


# -- recognition ----------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingChoice:
    d: int
    k: int = 1

    def __post_init__(self):
        if math.gcd(self.k, self.d) != 1:
            raise InvalidParameter(f"embedding index {self.k} not coprime to {self.d}")

    def root(self, prec=None):
        with (mpmath.workprec(prec) if prec else _nullctx()):
            return mpmath.expjpi(mpmath.mpf(2 * self.k) / self.d)


def conjugate_values(x, embedding, prec):
    """[(k, iota(sigma_k(x)))] for every k coprime to d."""
    return [(k, x.galois(k).embed(embedding.k, prec)) for k in units_mod(x.d)]


def recognize(values, d, embedding, tol, prec=None):
    """Recover x in Z[zeta_d] from approximations of iota(sigma_k(x)).

    ``values`` is a list of (k, complex) pairs, one per k coprime to d.
    Raises RecognitionFailure when the solved coordinates are not within
    ``tol`` (relative) of integers or the rounded element does not re-embed
    to every input within ``tol``.
    """
    _check_d(d)
    n = phi(d)
    ks = sorted(k for k, _ in values)
    if ks != units_mod(d):
        raise InvalidParameter("need exactly one value per Galois conjugate")
    if prec is None:
        prec = max(mpmath.mp.prec, 53)
    with mpmath.workprec(prec + 20):
        vals = dict(values)
        rows, rhs = [], []
        for k in units_mod(d):
            w = mpmath.expjpi(mpmath.mpf(2 * embedding.k * k) / d)
            rows.append([w ** j for j in range(n)])
            rhs.append(mpmath.mpmathify(vals[k]))
        sol = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
        scale = max([mpmath.mpf(1)] + [abs(mpmath.mpmathify(v)) for v in rhs])
        coeffs, resid = [], mpmath.mpf(0)
        for j in range(n):
            c = sol[j]
            r = int(mpmath.nint(c.real))
            coeffs.append(r)
            resid = max(resid, abs(c - r))
        if resid >= tol * scale:
            raise RecognitionFailure(
                f"coordinates are {mpmath.nstr(resid, 5)} from integers (tol {mpmath.nstr(tol * scale, 5)})")
        x = CycElt(d, tuple(coeffs))
        for k in units_mod(d):
            back = x.galois(k).embed(embedding.k)
            if abs(back - mpmath.mpmathify(vals[k])) >= tol * scale:
                raise RecognitionFailure(f"rounded element misses conjugate k={k}")
        return x
