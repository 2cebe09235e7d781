"""Dirichlet characters of finite order, pinned by their values.

A character of order d modulo f is stored as the exponents e_i with
chi(g_i) = zeta_d^{e_i} on a fixed set of generators g_i of (Z/f)^x.
"""
from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
from sympy import factorint

from .cyclo import CycElt, units_mod
from .errors import AmbiguityError, InvalidParameter


def _primitive_root_prime_power(q, e):
    m = q ** e
    order = (q - 1) * q ** (e - 1)
    fac = list(factorint(order))
    g = 2
    while True:
        if math.gcd(g, q) == 1 and all(pow(g, order // r, m) != 1 for r in fac):
            return g
        g += 1


@lru_cache(maxsize=None)
def _components(f):
    """[(modulus q^e, local generator, order)] for the cyclic factors of (Z/f)^x."""
    comps = []
    for q, e in sorted(factorint(f).items()):
        m = q ** e
        if q == 2:
            if e == 2:
                comps.append((m, m - 1, 2))
            elif e >= 3:
                comps.append((m, m - 1, 2))
                comps.append((m, 5, 2 ** (e - 2)))
        else:
            comps.append((m, _primitive_root_prime_power(q, e), (q - 1) * q ** (e - 1)))
    return tuple(comps)


def _crt_lift(f, m, a):
    """Integer mod f congruent to a mod m and to 1 mod f/m (gcd(m, f/m) = 1)."""
    rest = f // m
    if rest == 1:
        return a % f
    # x = 1 + rest * t with 1 + rest*t = a mod m
    t = (a - 1) * pow(rest, -1, m) % m
    return (1 + rest * t) % f


def unit_group(f):
    """Generators of (Z/f)^x with their orders, as [(generator mod f, order)]."""
    if f < 2:
        raise InvalidParameter("modulus must be >= 2")
    return [(_crt_lift(f, m, g), n) for m, g, n in _components(f)]


class _DlogTable:
    """Baby-step table for discrete logs to base g in a cyclic group mod m."""

    def __init__(self, m, g, n):
        self.m, self.g, self.n = m, g, n
        self.step = math.isqrt(n) + 1
        self.baby = {}
        x = 1
        for j in range(self.step):
            self.baby.setdefault(x, j)
            x = x * g % m
        self.giant = pow(pow(g, self.step, m), -1, m)

    def log(self, a):
        a %= self.m
        y = a
        for i in range(self.step + 1):
            j = self.baby.get(y)
            if j is not None:
                return (i * self.step + j) % self.n
            y = y * self.giant % self.m
        raise InvalidParameter(f"{a} is not in the subgroup generated by {self.g} mod {self.m}")


_dlog_lock = threading.Lock()


@lru_cache(maxsize=None)
def _dlog_table(m, g, n):
    with _dlog_lock:
        return _DlogTable(m, g, n)


def unit_logs(f, n):
    """Exponent vector of n against :func:`unit_group` (n coprime to f)."""
    out = []
    for m, g, order in _components(f):
        a = n % m
        if m % 2 == 0 and m > 2:
            if g == m - 1:  # the -1 component
                if m == 4:
                    out.append(0 if a == 1 else 1)
                else:
                    out.append(0 if a % 4 == 1 else 1)
                continue
            a = a if a % 4 == 1 else (-a) % m
        out.append(_dlog_table(m, g, order).log(a))
    return out


@dataclass(frozen=True)
class CharValue:
    """chi(n): either zero or zeta_d^exp."""
    zero: bool
    exp: int = 0
    d: int = 1

    def to_cyc(self):
        if self.zero:
            return CycElt.zero(self.d)
        return CycElt.zeta(self.d, self.exp)

    def complex(self, embedding=None, prec=None):
        if self.zero:
            return mpmath.mpc(0)
        k = embedding.k if embedding else 1
        with mpmath.workprec(prec or mpmath.mp.prec):
            return mpmath.expjpi(mpmath.mpf(2 * k * self.exp) / self.d)


@dataclass(frozen=True)
class DirichletChar:
    f: int
    d: int
    gens: tuple
    exps: tuple
    primitive: bool = field(compare=False, default=False)

    def exponent(self, n):
        """e with chi(n) = zeta_d^e, or None when gcd(n, f) > 1."""
        if math.gcd(n, self.f) != 1:
            return None
        logs = unit_logs(self.f, n)
        return sum(e * l for e, l in zip(self.exps, logs)) % self.d

    def __call__(self, n):
        return evaluate(self, n)

    @property
    def order(self):
        return self.d // math.gcd(self.d, *self.exps) if self.exps else 1

    @property
    def parity(self):
        """0 for even characters, 1 for odd."""
        e = self.exponent(-1)
        if e == 0:
            return 0
        if 2 * e % self.d == 0:
            return 1
        raise InvalidParameter("chi(-1) must be +-1")

    @property
    def is_even(self):
        return self.parity == 0

    def power(self, k):
        return DirichletChar(self.f, self.d, self.gens,
                             tuple(e * k % self.d for e in self.exps), self.primitive)

    def conj(self):
        return self.power(-1)

    def table(self):
        """Exponents of chi(n) for n = 0..f-1, with -1 where chi vanishes."""
        tab = [-1] * self.f
        gens = [g for g, _ in self.gens]
        orders = [n for _, n in self.gens]
        for combo in itertools.product(*(range(n) for n in orders)):
            x = 1
            for g, c in zip(gens, combo):
                x = x * pow(g, c, self.f) % self.f
            tab[x] = sum(e * c for e, c in zip(self.exps, combo)) % self.d
        return tab

    def to_spec(self):
        """Character spec dict pinning chi on the generators."""
        return {"modulus": self.f, "order": self.d,
                "pins": [[g, e] for (g, _), e in zip(self.gens, self.exps)]}

    def __str__(self):
        pins = ", ".join(f"chi({g})=z^{e}" for (g, _), e in zip(self.gens, self.exps))
        return f"chi mod {self.f} of order {self.d} [{pins}]"


def _is_primitive(f, gens, exps, d):
    if f == 1:
        return True
    comps = _components(f)
    for q, e in factorint(f).items():
        m = q ** e
        if e == 1:
            # kernel of reduction mod f/q is the whole (Z/q)^x component
            idx = [i for i, c in enumerate(comps) if c[0] == m]
            if not idx:
                return False  # q = 2: (Z/2)^x is trivial, never primitive
            if all(exps[i] % d == 0 for i in idx):
                return False
        else:
            test = _crt_lift(f, m, 1 + q ** (e - 1))
            logs = unit_logs(f, test)
            if sum(x * l for x, l in zip(exps, logs)) % d == 0:
                return False
    return True


def all_characters(f, d):
    """Every character mod f of exact order d."""
    gens = tuple(unit_group(f))
    choices = [range(0, d, d // math.gcd(d, n)) for _, n in gens]
    out = []
    for exps in itertools.product(*choices):
        order = d // math.gcd(d, *exps) if exps else 1
        if order != d:
            continue
        out.append(DirichletChar(f, d, gens, tuple(exps), _is_primitive(f, gens, exps, d)))
    return out


def build_char(f, d, pins):
    """The unique order-d character mod f with chi(n) = zeta_d^e for each (n, e) pin."""
    if f < 1 or d < 1:
        raise InvalidParameter("modulus and order must be positive")
    for n, _ in pins:
        if math.gcd(n, f) != 1:
            raise InvalidParameter(f"pin at n={n} is not a unit mod {f}")
    cands = [c for c in all_characters(f, d)
             if all(c.exponent(n) == e % d for n, e in pins)]
    if not cands:
        raise InvalidParameter(f"no character of order {d} mod {f} satisfies pins {list(pins)}")
    if len(cands) > 1:
        raise AmbiguityError(f"{len(cands)} characters satisfy the pins", cands)
    return cands[0]


def from_spec(spec):
    return build_char(int(spec["modulus"]), int(spec["order"]),
                      [(int(n), int(e)) for n, e in spec["pins"]])


def evaluate(chi, n):
    e = chi.exponent(n)
    if e is None:
        return CharValue(True, 0, chi.d)
    return CharValue(False, e, chi.d)


def conjugates(chi):
    """[(k, chi^k)] for k coprime to d; chi^k(n) = sigma_k(chi(n))."""
    return [(k, chi.power(k)) for k in units_mod(chi.d)] if chi.d > 1 else [(1, chi)]


def gauss_sum(chi, embedding=None, prec=None):
    """sum_{a mod f} chi(a) exp(2 pi i a / f) under zeta_d -> exp(2 pi i k / d)."""
    if not chi.primitive:
        raise InvalidParameter("Gauss sums are only defined here for primitive characters")
    k = embedding.k if embedding else 1
    tab = chi.table()
    with mpmath.workprec((prec or mpmath.mp.prec) + 10):
        total = mpmath.mpc(0)
        for a, e in enumerate(tab):
            if e < 0:
                continue
            total += mpmath.expjpi(2 * (mpmath.mpf(k * e) / chi.d + mpmath.mpf(a) / chi.f))
    return +total
