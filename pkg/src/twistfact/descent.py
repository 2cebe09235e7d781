"""Linear algebra over F_p behind a p-descent over a cyclic degree-q field.

Class groups, S-unit groups and Selmer membership are inputs.  From them
this module extracts the eigenspaces that can hold Selmer elements, turns
the index i of the field F_i carrying a Selmer element into the eigenvalue
alpha = phi(sigma)^(-i) of tau, completes the eigenvalue multiset with the
inverse pairs forced by the Cassels-Tate pairing, and forms the ideal
prod (x - alpha)(zeta) + (p).
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import ZZ
from sympy.polys.galoistools import gf_factor

from . import cyclo
from . import polyutil as pu
from .errors import FixtureError, InconsistencyError, InvalidParameter, Unsupported


# -- F_p matrices ------------------------------------------------------------

def _rref(rows, p):
    """Reduced row echelon form and pivot columns."""
    A = [[v % p for v in r] for r in rows]
    pivots = []
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [v * inv % p for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(a - f * b) % p for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank(rows, p):
    return len(_rref(rows, p)[1]) if rows else 0


def kernel(M, p):
    """Basis of {v : M v = 0} over F_p (M given by rows)."""
    n = len(M[0]) if M else 0
    R, pivots = _rref(M, p) if M else ([], [])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for row, pc in zip(R, pivots):
            v[pc] = (-row[f]) % p
        basis.append(v)
    return basis


def _matvec(M, v, p):
    return [sum(a * b for a, b in zip(row, v)) % p for row in M]


def _matmul(A, B, p):
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, c)) % p for c in cols] for row in A]


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matrix_order(M, p, bound):
    """Smallest k <= bound with M^k = I mod p, else None."""
    n = len(M)
    I = _identity(n)
    A = [[v % p for v in r] for r in M]
    P = A
    for k in range(1, bound + 1):
        if P == I:
            return k
        P = _matmul(P, A, p)
    return None


def in_span(v, basis, p):
    if not basis:
        return all(x % p == 0 for x in v)
    return rank(basis + [v], p) == rank(basis, p)


def phi_eigenspace(M, target, p):
    """Kernel of M - target*I over F_p, as a reduced basis."""
    n = len(M)
    A = [[(M[i][j] - (target if i == j else 0)) % p for j in range(n)] for i in range(n)]
    basis = kernel(A, p)
    R, _ = _rref(basis, p) if basis else ([], [])
    return R


def orbit_eigen_test(M, u, target, p):
    """Fast path: span the orbit of u under M and test whether ``target`` is an
    eigenvalue of M restricted to that span.  Returns (is_eigenvalue, orbit_basis)."""
    vecs = []
    v = [x % p for x in u]
    for _ in range(p - 1):
        if in_span(v, vecs, p):
            break
        vecs.append(v)
        v = _matvec(M, v, p)
    if not vecs:
        return False, []
    # coordinates of M b_j in the orbit basis b_j = M^j u: cyclic companion action
    k = len(vecs)
    # solve M^k u = sum c_j M^j u
    A = [[vecs[j][i] for j in range(k)] for i in range(len(u))]
    aug = [row + [t] for row, t in zip(A, v)]
    R, piv = _rref(aug, p)
    if k in piv:
        raise InconsistencyError("orbit is not closed under the action")
    c = [0] * k
    for row, pc in zip(R, piv):
        c[pc] = row[k]
    # characteristic polynomial of the companion matrix: x^k - sum c_j x^j
    poly = [(-cj) % p for cj in c] + [1]
    return pu.evaluate(poly, target) % p == 0, vecs


# -- splitting data and dimension count ---------------------------------------

def splitting_counts(poly, p):
    """Distinct prime factors of a defining polynomial mod p, by degree.

    Returns {"primes": r, "degrees": [...], "ramified": bool}; when a factor is
    repeated (ramification, or p dividing the index) the count is only valid
    for the maximal order and is flagged.
    """
    f = pu.fp(list(poly), p)
    if len(f) < 2:
        raise InvalidParameter("polynomial is constant mod p")
    hi = [ZZ(c) for c in reversed(pu.fp_monic(f, p))]
    _, facs = gf_factor(hi, p, ZZ)
    degrees = sorted(len(g) - 1 for g, _ in facs)
    ramified = any(e > 1 for _, e in facs)
    return {"primes": len(facs), "degrees": degrees, "ramified": ramified,
            "exponents": sorted(e for _, e in facs)}


def expected_kernel_dim(p, q, r_Fi, r_F):
    """(p-1)/2 (1 - 1/q) + sum_j (r_{p_j, F_i} - r_{p_j, F}), exactly."""
    if q < 1:
        raise InvalidParameter("q must be positive")
    base = Fraction(p - 1, 2) * (1 - Fraction(1, q))
    total = base + sum(a - b for a, b in zip(r_Fi, r_F))
    if total.denominator != 1:
        raise InvalidParameter(f"dimension {total} is not an integer")
    return int(total)


# -- fixtures ---------------------------------------------------------------

@dataclass
class FieldData:
    i: int
    poly: list
    dim: int
    action: list
    selmer_vectors: list
    class_group_p_trivial: bool | None = None
    r_counts: list | None = None
    r_counts_F: list | None = None


@dataclass
class DescentFixture:
    p: int
    q: int
    phi_gamma: int
    fields: list
    sha_an_Q: int | None = None
    sha_an_K: int | None = None
    label: str | None = None
    base_poly: list | None = None
    extra: dict = field(default_factory=dict)

    @property
    def phi_sigma(self):
        """phi(sigma) for sigma = gamma^((p-1)/q)."""
        return pow(self.phi_gamma, (self.p - 1) // self.q, self.p)

    def expected_selmer_dim(self):
        if self.sha_an_K is None:
            return None
        ratio = Fraction(self.sha_an_K, self.sha_an_Q or 1)
        if ratio.denominator != 1:
            raise FixtureError("Sha over K is not a multiple of Sha over Q")
        return cyclo.vp_int(ratio.numerator, self.p)

    @classmethod
    def from_json(cls, obj):
        try:
            fields = [FieldData(int(f["i"]), [int(c) for c in f.get("poly", [])], int(f["dim"]),
                                [[int(v) for v in r] for r in f["action"]],
                                [[int(v) for v in s] for s in f.get("selmer_vectors", [])],
                                f.get("class_group_p_trivial"), f.get("r_counts"), f.get("r_counts_F"))
                      for f in obj["fields"]]
            fx = cls(int(obj["p"]), int(obj["q"]), int(obj["phi_gamma"]) % int(obj["p"]), fields,
                     obj.get("sha_an_Q"), obj.get("sha_an_K"), obj.get("label"), obj.get("base_poly"),
                     {k: v for k, v in obj.items() if k not in
                      ("p", "q", "phi_gamma", "fields", "sha_an_Q", "sha_an_K", "label", "base_poly")})
        except (KeyError, TypeError, ValueError) as exc:
            raise FixtureError(f"bad descent fixture: {exc}") from exc
        if (fx.p - 1) % fx.q:
            raise Unsupported("only q | p - 1 is supported (h_theta linear)")
        for fd in fx.fields:
            if len(fd.action) != fd.dim or any(len(r) != fd.dim for r in fd.action):
                raise FixtureError(f"field {fd.i}: action matrix is not {fd.dim}x{fd.dim}")
            if any(len(s) != fd.dim for s in fd.selmer_vectors):
                raise FixtureError(f"field {fd.i}: Selmer vector of wrong length")
        return fx


def load_descent_fixture(path_or_obj):
    obj = path_or_obj
    if not isinstance(obj, dict):
        try:
            with open(obj) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise FixtureError(f"cannot read descent fixture: {exc}") from exc
    return DescentFixture.from_json(obj)


# -- h_theta ----------------------------------------------------------------

@dataclass
class EigenReport:
    p: int
    q: int
    entries: list          # per i: {i, alpha, eigenspace_dim, selmer_dim}
    searched: list         # indices i that were searched

    def alphas(self):
        return sorted(a for e in self.entries for a in [e["alpha"]] * e["selmer_dim"])

    def h_theta(self):
        """[(alpha, multiplicity)] meaning (x - alpha)^multiplicity."""
        c = Counter(self.alphas())
        return sorted(c.items())

    def to_json(self):
        return {"p": self.p, "q": self.q, "searched": self.searched, "entries": self.entries,
                "h_theta": [{"alpha": a, "mult": m, "poly": f"(x - {a})^{m}"} for a, m in self.h_theta()]}


def alpha_for_index(fx, i):
    return pow(fx.phi_sigma, -i, fx.p)


def assemble_h_theta(fx, half_search=True):
    """Selmer dimension per field F_i and the eigenvalue alpha = phi(sigma)^-i.

    With ``half_search`` only 1 <= i <= (q-1)/2 are used; :func:`ct_filter`
    supplies the inverse eigenvalues.
    """
    p = fx.p
    limit = (fx.q - 1) // 2 if half_search else fx.q - 1
    entries, searched = [], []
    for fd in sorted(fx.fields, key=lambda f: f.i):
        if not 1 <= fd.i <= limit:
            continue
        searched.append(fd.i)
        space = phi_eigenspace(fd.action, fx.phi_gamma, p)
        for v in fd.selmer_vectors:
            if not in_span(v, space, p):
                raise InconsistencyError(f"field {fd.i}: Selmer vector {v} is outside the "
                                         f"{fx.phi_gamma}-eigenspace")
        sel = rank(fd.selmer_vectors, p) if fd.selmer_vectors else 0
        entries.append({"i": fd.i, "alpha": alpha_for_index(fx, fd.i),
                        "eigenspace_dim": len(space), "selmer_dim": sel})
    return EigenReport(p, fx.q, entries, searched)


def ct_filter(alphas, expected_dim, p):
    """Close a raw eigenvalue multiset under alpha -> alpha^-1.

    Values found by a half search get their inverses added; a multiset that is
    already closed is kept.  Anything else, or a total different from
    ``expected_dim``, is inconsistent.
    """
    raw = Counter(a % p for a in alphas)
    if any(a == 0 for a in raw):
        raise InvalidParameter("eigenvalues must be units")
    inv = {a: pow(a, -1, p) for a in raw}
    closed = all(raw[a] == raw.get(inv[a], 0) for a in raw)
    candidates = []
    if closed:
        candidates.append(raw)
    # completion: every value paired with an inverse not already present
    if all(inv[a] not in raw or inv[a] == a for a in raw):
        full = Counter(raw)
        for a, m in raw.items():
            if inv[a] != a:
                full[inv[a]] += m
        candidates.append(full)
    good = []
    for c in candidates:
        if sum(c.values()) == expected_dim and c not in good:
            good.append(c)
    if not good:
        raise InconsistencyError(f"no inverse-closed multiset of size {expected_dim} "
                                 f"extends {sorted(raw.elements())}")
    return [sorted(c.elements()) for c in good]


def rhs_ideal(alphas, p, d, k=1):
    """prod over alpha of (zeta^k - alpha, p) as an IdealPart."""
    return cyclo.ideal_from_roots(list(alphas), p, d, k)


def h_theta_from_fixture(fx, half_search=True):
    rep = assemble_h_theta(fx, half_search)
    dim = fx.expected_selmer_dim()
    if dim is None:
        return rep, [rep.alphas()]
    return rep, ct_filter(rep.alphas(), dim, fx.p)


# -- fixture validation ------------------------------------------------------

def _order_mod(a, p):
    a %= p
    if a == 0:
        return None
    k, x = 1, a
    while x != 1:
        x = x * a % p
        k += 1
    return k


def fixture_validate(fx):
    items = []

    def add(name, ok, detail=None, status=None):
        items.append({"check": name, "status": status or ("pass" if ok else "fail"),
                      **({"detail": detail} if detail is not None else {})})

    p, q = fx.p, fx.q
    add("q divides p - 1", (p - 1) % q == 0, {"p": p, "q": q})
    order = _order_mod(fx.phi_gamma, p)
    add("phi(gamma) has order p - 1", order == p - 1, {"phi_gamma": fx.phi_gamma, "order": order})
    add("phi(sigma) has order q", _order_mod(fx.phi_sigma, p) == q, {"phi_sigma": fx.phi_sigma})
    for fd in fx.fields:
        o = matrix_order(fd.action, p, p - 1)
        add(f"F_{fd.i}: action order divides p - 1", o is not None and (p - 1) % o == 0,
            {"order": o})
        if fd.class_group_p_trivial is None:
            add(f"F_{fd.i}: Cl[p] = 0", False, "not stated", status="unverified")
        else:
            add(f"F_{fd.i}: Cl[p] = 0", fd.class_group_p_trivial, status="assumed-from-fixture")
        if fd.r_counts is not None and fd.r_counts_F is not None:
            exp = expected_kernel_dim(p, q, fd.r_counts, fd.r_counts_F)
            add(f"F_{fd.i}: module dimension matches the unit count", exp == fd.dim,
                {"declared": fd.dim, "expected": exp})
        space = phi_eigenspace(fd.action, fx.phi_gamma, p)
        bad = [v for v in fd.selmer_vectors if not in_span(v, space, p)]
        add(f"F_{fd.i}: Selmer vectors in the phi-eigenspace", not bad, {"outside": bad} if bad else None)
    if fx.base_poly:
        sc = splitting_counts(fx.base_poly, p)
        eligible = sc["primes"] == 1
        add("S may be empty (one prime above p in K)", eligible, sc)
    dim = fx.expected_selmer_dim()
    if dim is not None:
        add("expected Selmer dimension is even", dim % 2 == 0, {"dim": dim})
    ok = all(i["status"] != "fail" for i in items)
    return {"label": fx.label, "valid": ok, "checks": items}
