"""Points over a cyclic number field and the Galois action on them.

A field K = Q(alpha) is given by the minimal polynomial h of alpha and the
image t(alpha) of alpha under a generator tau of Gal(K/Q).  The matrix of
tau on a list of Mordell-Weil generators is found by a bounded search for
the integer combination of generators equal to tau(P_i).  Candidates are
first screened in E(F_l) at a few primes l where h has a root, and only the
survivors are checked exactly over K.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

from sympy import Matrix, primerange

from . import cyclo
from . import polyutil as pu
from .cyclo import IdealPart
from .errors import (
    FixtureError,
    InternalArithmeticError,
    InvalidParameter,
    NonIndependenceError,
    SearchRadiusError,
    Unsupported,
)

DEFAULT_RADIUS = 3
MAX_RADIUS = 6


# -- number field ---------------------------------------------------------------

class NumberFieldK:
    def __init__(self, poly, tau_image):
        poly = [int(c) for c in poly]
        if not poly or poly[-1] != 1:
            raise FixtureError("defining polynomial must be monic")
        self.h = poly
        self.q = len(poly) - 1
        if self.q < 1:
            raise FixtureError("defining polynomial must have positive degree")
        if self.q > 1 and pu.degree(_q_gcd(poly, pu.derivative(poly))) > 0:
            raise FixtureError("defining polynomial is not square-free")
        self.t = NFElt(self, [Fraction(c) for c in tau_image])
        if self.h_at(self.t):
            raise FixtureError("tau image is not a root of the defining polynomial")
        x = self.gen()
        y = x
        for _ in range(self.q):
            y = self.tau(y)
        if y != x:
            raise FixtureError(f"tau does not have order dividing {self.q}")
        z = self.tau(x)
        if self.q > 1 and z == x:
            raise FixtureError("tau is the identity")

    def gen(self):
        return NFElt(self, [0, 1] if self.q > 1 else [0])

    def elt(self, coeffs):
        return NFElt(self, [Fraction(c) for c in coeffs])

    def h_at(self, a):
        acc = NFElt(self, [])
        for c in reversed(self.h):
            acc = acc * a + c
        return acc

    def tau(self, a, times=1):
        for _ in range(times):
            acc = NFElt(self, [])
            for c in reversed(a.coeffs):
                acc = acc * self.t + c
            a = acc
        return a

    def order_of_tau(self):
        x = self.gen()
        y = self.tau(x)
        n = 1
        while y != x:
            y = self.tau(y)
            n += 1
        return n


def _q_gcd(a, b):
    a = [Fraction(c) for c in pu.trim(a)]
    b = [Fraction(c) for c in pu.trim(b)]
    while b:
        a, b = b, _q_rem(a, b)
    return a


def _q_rem(a, b):
    a = list(a)
    lead = b[-1]
    n = len(b) - 1
    for i in range(len(a) - 1, n - 1, -1):
        c = a[i] / lead
        if c:
            for j in range(n + 1):
                a[i - n + j] -= c * b[j]
    return pu.trim(a[:n])


def _q_divmod(a, b):
    a = list(a)
    lead = b[-1]
    n = len(b) - 1
    if len(a) <= n:
        return [], pu.trim(a)
    q = [Fraction(0)] * (len(a) - n)
    for i in range(len(a) - 1, n - 1, -1):
        c = a[i] / lead
        q[i - n] = c
        if c:
            for j in range(n + 1):
                a[i - n + j] -= c * b[j]
    return pu.trim(q), pu.trim(a[:n])


class NFElt:
    __slots__ = ("K", "coeffs")

    def __init__(self, K, coeffs):
        self.K = K
        self.coeffs = tuple(pu.rem_monic([Fraction(c) for c in coeffs], K.h))

    def _lift(self, other):
        if isinstance(other, NFElt):
            return other
        return NFElt(self.K, [Fraction(other)])

    def __add__(self, other):
        return NFElt(self.K, pu.add(self.coeffs, self._lift(other).coeffs))

    __radd__ = __add__

    def __neg__(self):
        return NFElt(self.K, [-c for c in self.coeffs])

    def __sub__(self, other):
        return NFElt(self.K, pu.sub(self.coeffs, self._lift(other).coeffs))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        return NFElt(self.K, pu.mul(self.coeffs, self._lift(other).coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * nf_inv(self._lift(other))

    def __eq__(self, other):
        if not isinstance(other, NFElt):
            other = self._lift(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def is_rational(self):
        return len(self.coeffs) <= 1

    def reduce_mod(self, ell, root):
        """Image in F_l under alpha -> root (denominators must be prime to l)."""
        acc = 0
        for c in reversed(self.coeffs):
            if c.denominator % ell == 0:
                raise ZeroDivisionError
            acc = (acc * root + c.numerator * pow(c.denominator, -1, ell)) % ell
        return acc

    def __repr__(self):
        return pu.show([c for c in self.coeffs], "a") if self.coeffs else "0"


def nf_reduce(K, coeffs):
    return NFElt(K, coeffs)


def nf_mul(a, b):
    return a * b


def nf_inv(a):
    """Inverse by the extended Euclidean algorithm against h."""
    if not a:
        raise ZeroDivisionError("inverse of zero")
    K = a.K
    r0, r1 = [Fraction(c) for c in K.h], list(a.coeffs)
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _q_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, pu.sub(s0, pu.mul(q, s1))
    if len(r0) != 1:
        raise FixtureError("element is a zero divisor; defining polynomial is not irreducible")
    return NFElt(K, [c / r0[0] for c in s0])


# -- points ---------------------------------------------------------------------

@dataclass(frozen=True)
class PointK:
    x: NFElt | None
    y: NFElt | None

    @property
    def is_zero(self):
        return self.x is None

    def __repr__(self):
        return "O" if self.is_zero else f"({self.x} : {self.y} : 1)"


def infinity():
    return PointK(None, None)


def _on_curve(E, x, y):
    a1, a2, a3, a4, a6 = E.ainvs
    return y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6) == 0


def point_check(E, P):
    if not P.is_zero and not _on_curve(E, P.x, P.y):
        raise InvalidParameter(f"{P} is not on {E.label}")
    return P


def point_neg(E, P):
    if P.is_zero:
        return P
    a1, _, a3, _, _ = E.ainvs
    return PointK(P.x, -P.y - P.x * a1 - a3)


def point_add(E, P, Q):
    if P.is_zero:
        return Q
    if Q.is_zero:
        return P
    a1, a2, a3, a4, _ = E.ainvs
    if P.x == Q.x:
        if P.y + Q.y + P.x * a1 + a3 == 0:
            return infinity()
        lam = (P.x * P.x * 3 + P.x * (2 * a2) + a4 - P.y * a1) / (P.y * 2 + P.x * a1 + a3)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    nu = P.y - lam * P.x
    x3 = lam * lam + lam * a1 - a2 - P.x - Q.x
    y3 = -(lam + a1) * x3 - nu - a3
    return PointK(x3, y3)


def point_mul(E, P, n):
    if n < 0:
        return point_mul(E, point_neg(E, P), -n)
    R = infinity()
    while n:
        if n & 1:
            R = point_add(E, R, P)
        P = point_add(E, P, P)
        n >>= 1
    return R


def apply_aut(E, K, P):
    if P.is_zero:
        return P
    Q = PointK(K.tau(P.x), K.tau(P.y))
    if not _on_curve(E, Q.x, Q.y):
        raise InternalArithmeticError("tau(P) is off the curve; wrong automorphism?")
    return Q


# -- reduction to F_l ---------------------------------------------------------

def _add_mod(E, P, Q, ell):
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, _ = E.ainvs
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2 + a1 * x1 + a3) % ell == 0:
            return None
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) * pow(2 * y1 + a1 * x1 + a3, -1, ell)
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, ell)
    lam %= ell
    x3 = (lam * lam + a1 * lam - a2 - x1 - x2) % ell
    y3 = (-(lam + a1) * x3 - (y1 - lam * x1) - a3) % ell
    return (x3, y3)


def _neg_mod(E, P, ell):
    if P is None:
        return None
    a1, _, a3, _, _ = E.ainvs
    return (P[0], (-P[1] - a1 * P[0] - a3) % ell)


def _reduce_point(P, ell, root):
    if P.is_zero:
        return None
    return (P.x.reduce_mod(ell, root), P.y.reduce_mod(ell, root))


def _screening_primes(E, K, gens, count=4, start=50):
    """(l, root) pairs with h split at l, E good at l and all points integral at l."""
    out = []
    for ell in primerange(start, 10 ** 6):
        if E.conductor % ell == 0 or E.discriminant % ell == 0:
            continue
        roots = pu.fp_roots(K.h, ell)
        if not roots:
            continue
        root = roots[0]
        try:
            for P in gens:
                _reduce_point(P, ell, root)
        except ZeroDivisionError:
            continue
        out.append((ell, root))
        if len(out) == count:
            return out
    raise FixtureError("no screening primes found")


def _combos_mod(E, gens_mod, target, B, ell):
    """Coefficient vectors c in [-B, B]^n with sum c_j P_j = target in E(F_l)."""
    n = len(gens_mod)
    mults = []
    for P in gens_mod:
        row = {0: None}
        acc = None
        for m in range(1, B + 1):
            acc = _add_mod(E, acc, P, ell)
            row[m] = acc
            row[-m] = _neg_mod(E, acc, ell)
        mults.append(row)
    # meet in the middle: first half sums indexed by point
    half = n // 2
    left = {}
    for c in itertools.product(range(-B, B + 1), repeat=half):
        S = None
        for j, cj in enumerate(c):
            S = _add_mod(E, S, mults[j][cj], ell)
        left.setdefault(S, []).append(c)
    found = []
    for c in itertools.product(range(-B, B + 1), repeat=n - half):
        S = target
        for j, cj in enumerate(c):
            S = _add_mod(E, S, _neg_mod(E, mults[half + j][cj], ell), ell)
        for lc in left.get(S, ()):
            found.append(lc + c)
    return found


@dataclass
class ActionMatrix:
    M: list           # M[i][j] = coefficient of gens_j in tau(gens_i)
    p: int

    @property
    def size(self):
        return len(self.M)

    def charpoly(self):
        """Characteristic polynomial over Z, lowest degree first."""
        x = Matrix(self.M).charpoly().all_coeffs()
        return [int(c) for c in reversed(x)]

    def charpoly_mod_p(self):
        return pu.fp(self.charpoly(), self.p)

    def transpose_charpoly(self):
        return [int(c) for c in reversed(Matrix(self.M).T.charpoly().all_coeffs())]

    def eigenvalues(self):
        """Roots of the characteristic polynomial mod p with multiplicity."""
        f = self.charpoly_mod_p()
        out = {}
        for a in range(self.p):
            m = pu.fp_multiplicity(f, [-a % self.p, 1], self.p)
            if m:
                out[a] = m
        return out

    def eigenvalue_multiset(self):
        return sorted(a for a, m in self.eigenvalues().items() for _ in range(m))

    def power_mod_p(self, n):
        A = Matrix(self.M) ** n
        return [[int(v) % self.p for v in row] for row in A.tolist()]

    def to_json(self):
        return {"matrix": self.M, "p": self.p, "charpoly": self.charpoly(),
                "charpoly_mod_p": pu.show(self.charpoly_mod_p(), "x", self.p),
                "transpose_charpoly": self.transpose_charpoly(),
                "eigenvalues_mod_p": {str(a): m for a, m in self.eigenvalues().items()}}


def _combination(E, gens, c):
    S = infinity()
    for P, cj in zip(gens, c):
        if cj:
            S = point_add(E, S, point_mul(E, P, cj))
    return S


def action_matrix(E, K, gens, p, search_radius=DEFAULT_RADIUS, torsion_trivial=True):
    if not torsion_trivial:
        raise Unsupported("generators with torsion are out of scope")
    if search_radius < 1:
        raise InvalidParameter("search radius must be >= 1")
    for P in gens:
        point_check(E, P)
    images = [apply_aut(E, K, P) for P in gens]
    screens = _screening_primes(E, K, gens + images)
    rows = []
    for i, img in enumerate(images):
        cands = None
        for ell, root in screens:
            gm = [_reduce_point(P, ell, root) for P in gens]
            tm = _reduce_point(img, ell, root)
            found = set(_combos_mod(E, gm, tm, search_radius, ell))
            cands = found if cands is None else cands & found
            if len(cands) <= 1:
                break
        exact = [c for c in sorted(cands) if _combination(E, gens, c) == img]
        if not exact:
            raise SearchRadiusError(f"tau(P_{i}) is not a combination with entries in "
                                    f"[-{search_radius}, {search_radius}]")
        if len(exact) > 1:
            raise NonIndependenceError(f"tau(P_{i}) has several expressions: {exact}")
        rows.append(list(exact[0]))
    return ActionMatrix(rows, p)


def action_matrix_auto(E, K, gens, p, start=DEFAULT_RADIUS, limit=MAX_RADIUS, torsion_trivial=True):
    """Retry with growing radius up to ``limit``."""
    B = start
    while True:
        try:
            return action_matrix(E, K, gens, p, B, torsion_trivial)
        except SearchRadiusError:
            if B >= limit:
                raise
            B += 1


# -- corollary ------------------------------------------------------------------

def corollary_check(M, chi, p, scriptL_part=None):
    """Compare prod (h_theta(zeta), p) built from the eigenvalues with (p) and
    with the ideal part of scriptL, embedding by embedding."""
    d = chi.d
    roots = [a for a in M.eigenvalue_multiset() if pow(a, d, p) == 1 and a != 1]
    prod = cyclo.ideal_from_roots(roots, p, d) if roots else IdealPart(p, d)
    rational = IdealPart.rational(p, d)
    report = {
        "eigenvalues": M.eigenvalue_multiset(),
        "product_ideal": str(prod),
        "product_vector": prod.vector(),
        "p_divides_product": rational.divides(prod),
        "product_is_p": prod == rational,
    }
    if scriptL_part is not None:
        per = {}
        for k in cyclo.units_mod(d):
            lhs = scriptL_part.galois(pow(k, -1, d))
            per[k] = {"lhs": str(lhs), "equal": lhs == prod}
        report["per_embedding"] = per
        report["matches_scriptL"] = any(v["equal"] for v in per.values())
    return report


# -- fixtures --------------------------------------------------------------------

@dataclass
class MWFixture:
    K: NumberFieldK
    curve_label: str
    generators: list
    torsion_trivial: bool
    raw: dict


def load_mw_fixture(path_or_obj, curve=None):
    """Read {field_poly, tau_image, curve_label, generators, torsion_trivial}."""
    from .curve import load_curve
    obj = path_or_obj
    if not isinstance(obj, dict):
        try:
            with open(obj) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise FixtureError(f"cannot read MW fixture: {exc}") from exc
    try:
        K = NumberFieldK(obj["field_poly"], obj["tau_image"])
        E = curve or load_curve(obj["curve_label"])
        gens = [PointK(K.elt(xc), K.elt(yc)) for xc, yc in obj["generators"]]
    except KeyError as exc:
        raise FixtureError(f"MW fixture misses field {exc}") from exc
    for P in gens:
        if not _on_curve(E, P.x, P.y):
            raise FixtureError(f"generator {P} is not on {E.label}")
    return E, MWFixture(K, obj["curve_label"], gens, bool(obj.get("torsion_trivial", True)), obj)
