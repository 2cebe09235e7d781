"""Elliptic curves over Q: Fourier coefficients, periods, congruences.

Conductor and reduction types are taken from fixture data.  Coefficients
a_l at good primes come from point counting: direct enumeration with a
quadratic-character table below ``BSGS_THRESHOLD`` and a baby-step
giant-step search over the Hasse interval above it (with the quadratic twist
brought in when one curve alone leaves the group order ambiguous).
"""
from __future__ import annotations

import json
import math
import pathlib
import random
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from sympy import primerange, factorint

from .errors import FixtureError, InternalArithmeticError, InvalidParameter, WrongRoutine

BSGS_THRESHOLD = 5000
REDUCTION_TYPES = ("good", "split", "nonsplit", "additive")


@dataclass(frozen=True)
class CurveQ:
    label: str
    ainvs: tuple
    conductor: int
    reduction: dict = field(hash=False, compare=False)
    cm_disc: int | None = None
    extra: dict = field(default_factory=dict, hash=False, compare=False)

    # invariants -------------------------------------------------------
    @property
    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def c4(self):
        b2, b4, _, _ = self.b_invariants
        return b2 * b2 - 24 * b4

    @property
    def c6(self):
        b2, b4, b6, _ = self.b_invariants
        return -b2 ** 3 + 36 * b2 * b4 - 216 * b6

    @property
    def discriminant(self):
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j_invariant(self):
        from fractions import Fraction
        return Fraction(self.c4 ** 3, self.discriminant)

    @property
    def bad_primes(self):
        return sorted(factorint(self.conductor))

    def is_good(self, ell):
        return self.conductor % ell != 0

    def on_curve(self, x, y, p=None):
        a1, a2, a3, a4, a6 = self.ainvs
        lhs = y * y + a1 * x * y + a3 * y
        rhs = x ** 3 + a2 * x * x + a4 * x + a6
        return (lhs - rhs) % p == 0 if p else lhs == rhs

    def __str__(self):
        return self.label

    @classmethod
    def from_json(cls, obj):
        try:
            ainvs = tuple(int(a) for a in obj["ainvs"])
            red = {int(k): v for k, v in obj.get("reduction", {}).items()}
            extra = {k: v for k, v in obj.items()
                     if k not in ("label", "ainvs", "conductor", "reduction", "cm_disc")}
            E = cls(obj["label"], ainvs, int(obj["conductor"]), red, obj.get("cm_disc"), extra)
        except (KeyError, TypeError, ValueError) as exc:
            raise FixtureError(f"bad curve fixture: {exc}") from exc
        validate(E)
        return E

    def to_json(self):
        out = {"label": self.label, "ainvs": list(self.ainvs), "conductor": self.conductor,
               "reduction": {str(k): v for k, v in sorted(self.reduction.items())}}
        if self.cm_disc is not None:
            out["cm_disc"] = self.cm_disc
        out.update(self.extra)
        return out


def validate(E):
    """Check the fixture against everything decidable from the model."""
    if len(E.ainvs) != 5:
        raise FixtureError("need five a-invariants")
    disc = E.discriminant
    if disc == 0:
        raise FixtureError(f"{E.label}: singular model")
    bad = E.bad_primes
    if sorted(E.reduction) != bad:
        raise FixtureError(f"{E.label}: reduction data must cover exactly the primes {bad}")
    rest = abs(disc)
    for ell in bad:
        if rest % ell:
            raise FixtureError(f"{E.label}: {ell} divides the conductor but not the discriminant")
        while rest % ell == 0:
            rest //= ell
    if rest != 1:
        raise FixtureError(f"{E.label}: discriminant has prime factors outside the conductor")
    for ell in bad:
        kind = E.reduction[ell]
        if kind not in REDUCTION_TYPES[1:]:
            raise FixtureError(f"{E.label}: unknown reduction type {kind!r} at {ell}")
        if E.conductor % (ell * ell) == 0:
            if kind != "additive":
                raise FixtureError(f"{E.label}: {ell}^2 | N forces additive reduction")
        elif kind == "additive":
            raise FixtureError(f"{E.label}: {ell} || N forces multiplicative reduction")
        elif ell >= 5:
            split = legendre(-E.c6, ell) == 1
            if split != (kind == "split"):
                raise FixtureError(f"{E.label}: reduction at {ell} is {'split' if split else 'nonsplit'}")
    return E


# -- finite field helpers ----------------------------------------------------

def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(a, p):
    """A square root of a quadratic residue a modulo an odd prime p."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


@lru_cache(maxsize=64)
def _square_table(p):
    tab = -np.ones(p, dtype=np.int64)
    x = np.arange(p, dtype=np.int64)
    tab[(x * x) % p] = 1
    tab[0] = 0
    return tab


def count_points(E, p):
    """#E(F_p) of the reduced model, singular point included, by enumeration."""
    a1, a2, a3, a4, a6 = (a % p for a in E.ainvs)
    if p == 2:
        n = 1
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % 2 == 0:
                    n += 1
        return n
    b2, b4, b6, _ = (b % p for b in E.b_invariants)
    x = np.arange(p, dtype=np.int64)
    f = (4 * x + b2) % p
    f = (f * x + 2 * b4) % p
    f = (f * x + b6) % p
    return p + 1 + int(_square_table(p)[f].sum())


# -- short Weierstrass arithmetic mod p (affine, None = infinity) -------------

def _ec_add(P, Q, A, p):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + A) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def _ec_neg(P, p):
    return None if P is None else (P[0], (-P[1]) % p)


def _ec_mul(P, n, A, p):
    if n < 0:
        return _ec_mul(_ec_neg(P, p), -n, A, p)
    R = None
    while n:
        if n & 1:
            R = _ec_add(R, P, A, p)
        P = _ec_add(P, P, A, p)
        n >>= 1
    return R


def _random_point(A, B, p, rng):
    while True:
        x = rng.randrange(p)
        rhs = (x * x * x + A * x + B) % p
        if rhs == 0:
            return (x, 0)
        if pow(rhs, (p - 1) // 2, p) == 1:
            return (x, sqrt_mod(rhs, p))


def _orders_in_interval(P, lo, hi, A, p):
    """All N in [lo, hi] with N*P = 0, by baby-step giant-step."""
    width = hi - lo
    m = math.isqrt(width) + 1
    baby = {}
    R = None
    for b in range(m):
        baby.setdefault(R, []).append(b)
        R = _ec_add(R, P, A, p)
    mP = R  # m*P
    neg_mP = _ec_neg(mP, p)
    G = _ec_neg(_ec_mul(P, lo, A, p), p)  # -lo*P
    found = set()
    for a in range(width // m + 2):
        for b in baby.get(G, ()):
            j = a * m + b
            if j <= width:
                found.add(lo + j)
        G = _ec_add(G, neg_mP, A, p)
    return found


def _bsgs_group_order(E, p, max_rounds=40):
    A = (-27 * E.c4) % p
    B = (-54 * E.c6) % p
    if (4 * A ** 3 + 27 * B * B) % p == 0:
        raise InvalidParameter(f"bad reduction at {p}")
    rng = random.Random(p)
    r = math.isqrt(4 * p)
    lo, hi = p + 1 - r - 1, p + 1 + r + 1
    cands = None
    # quadratic twist by a non-residue g: y^2 = x^3 + g^2 A x + g^3 B
    g = next(a for a in range(2, p) if pow(a, (p - 1) // 2, p) == p - 1)
    At, Bt = g * g * A % p, g ** 3 * B % p
    for rnd in range(max_rounds):
        if rnd % 2 == 0:
            P = _random_point(A, B, p, rng)
            found = _orders_in_interval(P, lo, hi, A, p)
        else:
            P = _random_point(At, Bt, p, rng)
            found = {2 * p + 2 - n for n in _orders_in_interval(P, 2 * p + 2 - hi, 2 * p + 2 - lo, At, p)}
        cands = found if cands is None else cands & found
        if len(cands) == 1:
            return cands.pop()
        if not cands:
            raise InternalArithmeticError(f"BSGS found no group order at p={p}")
    return None


def ap_good(E, ell, threshold=None):
    """a_l = l + 1 - #E(F_l) at a prime of good reduction."""
    if not E.is_good(ell):
        raise WrongRoutine(f"{ell} divides the conductor of {E.label}; use a_bad")
    threshold = BSGS_THRESHOLD if threshold is None else threshold
    if ell < max(threshold, 5):
        return ell + 1 - count_points(E, ell)
    n = _bsgs_group_order(E, ell)
    if n is None:
        n = count_points(E, ell)
    return ell + 1 - n


def ap_enum(E, ell):
    """a_l by enumeration only (oracle for the BSGS path)."""
    return ell + 1 - count_points(E, ell)


def a_bad(E, ell):
    kind = E.reduction.get(ell)
    if kind is None:
        raise FixtureError(f"{E.label}: no reduction data at {ell}")
    return {"additive": 0, "split": 1, "nonsplit": -1}[kind]


def ap(E, ell):
    return ap_good(E, ell) if E.is_good(ell) else a_bad(E, ell)


@dataclass(frozen=True)
class AnTable:
    bound: int
    values: np.ndarray  # values[n] = a_n, values[0] unused

    def __getitem__(self, n):
        return int(self.values[n])


_an_cache = {}


def an_table(E, M):
    """a_1..a_M from a_l at primes by the Hecke recursions."""
    if M < 1:
        raise InvalidParameter("bound must be >= 1")
    key = (E.ainvs, E.conductor)
    hit = _an_cache.get(key)
    if hit is not None and hit.bound >= M:
        return hit
    spf = np.zeros(M + 1, dtype=np.int64)
    for q in primerange(2, math.isqrt(M) + 1):
        block = spf[q * q::q]
        block[block == 0] = q
    primes = list(primerange(2, M + 1))
    for q in primes:
        if spf[q] == 0:
            spf[q] = q
    apv = {q: ap(E, q) for q in primes}
    a = [0] * (M + 1)
    ppart = [0] * (M + 1)
    if M >= 1:
        a[1] = 1
        ppart[1] = 1
    spf_l = spf.tolist()
    for n in range(2, M + 1):
        q = spf_l[n]
        m = n // q
        ppart[n] = ppart[m] * q if spf_l[m] == q else q
        pk = ppart[n]
        if pk == n:
            if m == 1:
                a[n] = apv[q]
            else:
                lower = q if E.is_good(q) else 0
                a[n] = apv[q] * a[m] - lower * a[m // q]
        else:
            a[n] = a[pk] * a[n // pk]
    table = AnTable(M, np.array(a, dtype=np.int64))
    _an_cache[key] = table
    return table


# -- periods -------------------------------------------------------------------

@dataclass(frozen=True)
class Periods:
    omega_plus: object       # mpf, integral of |dx/(2y+a1x+a3)| over E(R)
    omega_minus: object      # mpf, absolute value of the imaginary analogue
    omega1: object           # least positive real period
    omega2: object           # second lattice generator (mpc)
    components: int
    precision: int

    @property
    def covolume(self):
        return abs(self.omega1 * self.omega2.imag)


def _agm(a, b, prec):
    tol = mpmath.mpf(2) ** (-prec)
    for _ in range(4 * prec):
        if abs(a - b) <= tol * abs(a):
            return (a + b) / 2
        a, b = (a + b) / 2, mpmath.sqrt(a * b)
    raise InternalArithmeticError("AGM did not converge")


def periods(E, precision=192):
    b2, b4, b6, _ = E.b_invariants
    disc = E.discriminant
    with mpmath.workprec(precision + 30):
        roots = mpmath.polyroots([4, b2, 2 * b4, b6], maxsteps=400, extraprec=4 * precision)
        pi = mpmath.pi
        if disc > 0:
            e1, e2, e3 = sorted((mpmath.re(r) for r in roots), reverse=True)
            w1 = pi / _agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e1 - e2), precision)
            w2i = pi / _agm(mpmath.sqrt(e1 - e3), mpmath.sqrt(e2 - e3), precision)
            omega2 = mpmath.mpc(0, w2i)
            comps = 2
            omega_plus, omega_minus = 2 * w1, 2 * w2i
        else:
            e1 = mpmath.re(min(roots, key=lambda r: abs(mpmath.im(r))))
            a = 3 * e1 + mpmath.mpf(b2) / 4
            b = mpmath.sqrt(3 * e1 * e1 + mpmath.mpf(b2) * e1 / 2 + mpmath.mpf(b4) / 2)
            w1 = 2 * pi / _agm(2 * mpmath.sqrt(b), mpmath.sqrt(2 * b + a), precision)
            y = pi / _agm(2 * mpmath.sqrt(b), mpmath.sqrt(2 * b - a), precision)
            omega2 = mpmath.mpc(-w1 / 2, y)
            comps = 1
            omega_plus, omega_minus = w1, 2 * y
        return Periods(+omega_plus, +omega_minus, +w1, +omega2, comps, precision)


def real_period_quadrature(E, precision=64):
    """Independent check: integral of |dx/y'| over E(R) by tanh-sinh quadrature."""
    b2, b4, b6, _ = E.b_invariants
    with mpmath.workprec(precision + 20):
        roots = mpmath.polyroots([4, b2, 2 * b4, b6], maxsteps=400, extraprec=4 * precision)
        real = sorted(mpmath.re(r) for r in roots if abs(mpmath.im(r)) < mpmath.mpf(10) ** (-precision // 8))
        g = lambda x: 4 * x ** 3 + b2 * x * x + 2 * b4 * x + b6
        top = real[-1]
        slope = 12 * top * top + 2 * b2 * top + 2 * b4

        # substitute x = top + t^2 to remove the endpoint singularity
        def f(t):
            v = g(top + t * t)
            return 2 / mpmath.sqrt(slope) if v == 0 else 2 * t / mpmath.sqrt(abs(v))

        # break the range where the other roots sit closest to the real axis
        marks = {mpmath.mpf(1)}
        for r in roots:
            dist = mpmath.re(r) - top
            if dist > 0:
                marks.add(mpmath.sqrt(dist))
            marks.add(mpmath.sqrt(abs(r - top)))
        pts = sorted(m * c for m in marks if m > 0 for c in (mpmath.mpf(1) / 2, 1, 2))
        total = 2 * mpmath.quad(f, [0] + pts + [mpmath.inf])
        if len(real) == 3:
            lo, mid = real[0], real[1]
            # egg component between the two smaller roots
            h = lambda u: 1 / mpmath.sqrt(abs(g(u)))
            total += 2 * mpmath.quad(h, [lo, (lo + mid) / 2, mid])
        return total


# -- congruences -----------------------------------------------------------

def sturm_bound(N1, N2):
    L = math.lcm(N1, N2)
    num, den = L, 6
    for q in factorint(L):
        num *= q + 1
        den *= q
    return -(-num // den)


def congruent_mod_p(E1, E2, p, bound=None):
    """Compare a_l(E1) and a_l(E2) mod p at good primes up to ``bound``."""
    if bound is None:
        bound = sturm_bound(E1.conductor, E2.conductor)
    if bound < 1:
        raise InvalidParameter("bound must be >= 1")
    checked, violation = [], None
    for ell in primerange(2, bound + 1):
        if ell == p or not (E1.is_good(ell) and E2.is_good(ell)):
            continue
        a1, a2 = ap_good(E1, ell), ap_good(E2, ell)
        checked.append(ell)
        if (a1 - a2) % p:
            violation = {"ell": ell, "a1": a1, "a2": a2}
            break
    return {
        "congruent": violation is None,
        "p": p,
        "bound": bound,
        "checked": checked,
        "first_violation": violation,
        "note": "coefficient congruence up to the bound is evidence for E1[p] ~ E2[p], not a proof",
    }


# -- fixtures ---------------------------------------------------------------

def _data_dir():
    from importlib.resources import files
    return files("twistfact") / "data" / "curves"


def available_curves():
    return sorted(json.loads(p.read_text())["label"] for p in _data_dir().iterdir()
                  if p.name.endswith(".json"))


def load_curve(ref):
    """A CurveQ from a fixture path or from the label of a bundled fixture."""
    path = pathlib.Path(str(ref))
    if path.suffix == ".json" and path.exists():
        text = path.read_text()
    else:
        for entry in _data_dir().iterdir():
            if not entry.name.endswith(".json"):
                continue
            obj = json.loads(entry.read_text())
            if obj.get("label") == ref:
                return CurveQ.from_json(obj)
        raise FixtureError(f"unknown curve {ref!r}")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FixtureError(f"{path}: {exc}") from exc
    return CurveQ.from_json(obj)
