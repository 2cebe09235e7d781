"""Twisted L-values L(E, chi, 1) and their algebraic normalization.

The L-series is summed with the weight-2 approximate functional equation

    L(1) = S(t) + w * S*(t),
    S(t)  = sum a_n chi(n)/n    exp(-2 pi n t / A),
    S*(t) = sum a_n chibar(n)/n exp(-2 pi n / (t A)),   A = f sqrt(N),

and the unknown root number w is eliminated by evaluating at two values of
t.  The series is grouped by the exponent e of chi(n) = zeta^e, so one pass
over the coefficients serves every Galois conjugate of chi at once.  The
sums run in fixed-point integer arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

from . import cyclo
from .curve import an_table, ap, congruent_mod_p, periods
from .cyclo import CycElt, EmbeddingChoice, IdealPart, units_mod
from .dirichlet import evaluate, gauss_sum
from .errors import ConsistencyError, InvalidParameter, PrecisionError, RecognitionFailure

DEFAULT_PRECISION = 192
MAX_PRECISION = 1536
GUARD_BITS = 40
SPLIT = (1.0, 1.3)


def _tail(r, M):
    # |a_n / n| <= d(n) / sqrt(n) <= 2
    return 2 * r ** (M + 1) / (1 - r)


def terms_needed(A, ts, precision):
    """Number of terms so both tails are below 2^-precision."""
    tmin = min(min(t, 1 / t) for t in ts)
    with mpmath.workprec(64):
        r = mpmath.exp(-2 * mpmath.pi * tmin / A)
        target = mpmath.mpf(2) ** (-precision - 4) * (1 - r) / 4
        M = int(mpmath.ceil(mpmath.log(target) / mpmath.log(r)))
    return max(M, 10)


@dataclass(frozen=True)
class _GroupedSums:
    """sums[t, star][e] = sum over n with chi(n) = zeta^e of a_n/n exp(-2 pi n s / A),
    s = 1/t when star is set and s = t otherwise."""
    A: object
    d: int
    sums: dict
    terms: int
    precision: int
    error: object  # bound on tail plus rounding, per sum


def _grouped_sums(E, table, f, d, ts, precision):
    A_f = f * math.sqrt(E.conductor)
    M = terms_needed(A_f, ts, precision)
    an = an_table(E, M).values
    bits = precision + GUARD_BITS
    one = 1 << bits
    # key (t, False) is the scale t, key (t, True) its exact reciprocal 1/t
    wanted = sorted({(t, False) for t in ts} | {(t, True) for t in ts})
    out = {}
    with mpmath.workprec(bits + 20):
        A = f * mpmath.sqrt(E.conductor)
        for key in wanted:
            t, star = key
            scale = 1 / mpmath.mpf(t) if star else mpmath.mpf(t)
            r = mpmath.exp(-2 * mpmath.pi * scale / A)
            rfix = int(mpmath.floor(r * one))
            acc = [0] * d
            x = one
            for n in range(1, M + 1):
                x = (x * rfix) >> bits
                a = int(an[n])
                if not a:
                    continue
                e = table[n % f]
                if e < 0:
                    continue
                acc[e] += (a * x) // n
            out[key] = [mpmath.mpf(s) / one for s in acc]
        rmax = mpmath.exp(-2 * mpmath.pi * min(min(t, 1 / t) for t in ts) / A)
        # each step loses at most one unit; the error in r^n stays below 1/(1-r) units
        rounding = 2 * M / (1 - rmax) / mpmath.mpf(one)
        error = _tail(rmax, M) + rounding
    return _GroupedSums(A, d, out, M, precision, error)


def _character_data(chi):
    if chi is None:
        return [0], 1, 1
    return chi.table(), chi.f, chi.d


def _solve(sums, k, ts, prec):
    """(L, w, residual) for the conjugate chi^k under zeta -> exp(2 pi i / d)."""
    d = sums.d
    with mpmath.workprec(prec + 20):
        z = [mpmath.expjpi(mpmath.mpf(2 * k * e) / d) for e in range(d)]
        S = lambda t: mpmath.fsum(sums.sums[t, False][e] * z[e] for e in range(d))
        Sstar = lambda t: mpmath.fsum(sums.sums[t, True][e] * mpmath.conj(z[e]) for e in range(d))
        t1, t2 = ts
        s1, s2, u1, u2 = S(t1), S(t2), Sstar(t1), Sstar(t2)
        gap = u2 - u1
        if abs(gap) < mpmath.mpf(2) ** (-prec // 4):
            raise PrecisionError("splitting parameters give a near-singular system")
        w = (s1 - s2) / gap
        L = s1 + w * u1
        return L, w, gap


@dataclass(frozen=True)
class TwistedLResult:
    curve: str
    character: object
    k: int
    L_value: object
    w_twist: object
    terms_used: int
    precision: int
    tail_bound: object
    splitting: tuple = SPLIT

    def is_zero(self):
        return abs(self.L_value) < mpmath.mpf(2) ** (-self.precision // 2)


def _results(E, chi, precision, ts=SPLIT):
    table, f, d = _character_data(chi)
    if chi is not None and math.gcd(f, E.conductor) != 1:
        raise InvalidParameter("character conductor must be coprime to the curve conductor")
    sums = _grouped_sums(E, table, f, d, ts, precision)
    ks = units_mod(d) if d > 1 else [1]
    out = {}
    for k in ks:
        L, w, gap = _solve(sums, k, ts, precision)
        with mpmath.workprec(precision + 20):
            # error in w is amplified by 1/|gap|
            bound = sums.error * 8 * (1 + 1 / abs(gap))
            off = abs(abs(w) - 1)
        if off > 100 * bound and abs(L) > mpmath.mpf(2) ** (-precision // 2):
            raise ConsistencyError(
                f"{E.label}: |w| - 1 = {mpmath.nstr(off, 5)}; conductor or reduction data wrong?")
        out[k] = TwistedLResult(E.label, chi.power(k) if chi is not None else None, k,
                                L, w, sums.terms, precision, bound, tuple(ts))
    return out


def L_chi_1(E, chi, embedding=None, precision=DEFAULT_PRECISION, ts=SPLIT):
    """L(E, chi, 1) with chi's values embedded by ``embedding`` (default k = 1)."""
    if len(ts) != 2 or ts[0] == ts[1] or min(ts) <= 0:
        raise InvalidParameter("need two distinct positive splitting parameters")
    k = embedding.k if embedding else 1
    res = _results(E, chi, precision, ts)
    return res[k % chi.d if chi is not None else 1]


def L_1(E, precision=DEFAULT_PRECISION):
    """The untwisted value L(E, 1)."""
    return _results(E, None, precision)[1]


def _period(E, chi, precision):
    P = periods(E, precision + 20)
    return P.omega_plus if chi.is_even else P.omega_minus


def _normalize(E, chi_k, L, omega, precision):
    with mpmath.workprec(precision + 20):
        g = gauss_sum(chi_k.conj(), prec=precision + 20)
        sign = 1 if chi_k.is_even else -1
        return sign * g * L / omega


def script_L(E, chi, embedding=None, precision=DEFAULT_PRECISION):
    """chi(-1) G(chibar) L(E, chi, 1) / Omega for chi^k, k = embedding index."""
    res = L_chi_1(E, chi, embedding, precision)
    return _normalize(E, res.character, res.L_value, _period(E, chi, precision), precision)


@dataclass
class ScriptL:
    curve: str
    character: object
    values: dict            # k -> complex value of scriptL(E, chi^k) under zeta -> exp(2 pi i/d)
    recognized: CycElt
    norm: int
    norm_plus: object
    p: int | None
    ideal_part: IdealPart | None
    precision: int
    tail_bound: object
    terms: int
    lresults: dict = field(repr=False, default_factory=dict)

    @property
    def is_zero(self):
        return self.recognized.is_zero()

    def to_json(self, k=1):
        r = self.lresults.get(k)
        return {
            "curve": self.curve,
            "character": self.character.to_spec(),
            "embedding_k": k,
            "L": [float(mpmath.re(r.L_value)), float(mpmath.im(r.L_value))] if r else None,
            "w": [float(mpmath.re(r.w_twist)), float(mpmath.im(r.w_twist))] if r else None,
            "scriptL_coeffs": [int(c) for c in self.recognized.coeffs],
            "norm": self.norm,
            "norm_plus": self.norm_plus,
            "ideal_part_p": self.ideal_part.to_json() if self.ideal_part is not None else None,
            "ideal_part_text": str(self.ideal_part) if self.ideal_part is not None else None,
            "tail_bound": float(self.tail_bound),
            "terms": self.terms,
            "precision": self.precision,
        }


def script_L_algebraic(E, chi, p=None, precision=DEFAULT_PRECISION, max_precision=MAX_PRECISION):
    """Recognize scriptL(E, chi) in Z[zeta_d], doubling precision on failure."""
    if not chi.primitive:
        raise InvalidParameter("character must be primitive")
    prec = precision
    last = None
    while prec <= max_precision:
        res = _results(E, chi, prec)
        omega = _period(E, chi, prec)
        values = {k: _normalize(E, r.character, r.L_value, omega, prec) for k, r in res.items()}
        tol = mpmath.mpf(2) ** (-prec // 2)
        try:
            x = cyclo.recognize(list(values.items()), chi.d, EmbeddingChoice(chi.d, 1), tol, prec)
        except RecognitionFailure as exc:
            last = exc
            prec *= 2
            continue
        bound = max(r.tail_bound for r in res.values())
        norm = cyclo.norm_to_Z(x)
        part = None
        if p is not None and not x.is_zero():
            part = cyclo.part_above_p(x, p)
        norm_plus = None if x.is_zero() else cyclo.half_norm(x)
        return ScriptL(E.label, chi, values, x, norm, norm_plus, p, part, prec, bound,
                       next(iter(res.values())).terms_used, res)
    raise RecognitionFailure(f"{E.label}: no recognition up to {max_precision} bits ({last})")


def reality_check(x, E, chi, precision=DEFAULT_PRECISION):
    """Which of zeta0 * scriptL, i * zeta0 * scriptL is real, zeta0 = chi(N)^(-(d+1)/2).

    The functional equation gives scriptL = w_E chi(N) conj(scriptL) for the
    G(chibar) normalization used here, so u * scriptL is real exactly when
    u^2 = (w_E chi(N))^-1.  The square root of w_E is +-1 or +-i and w_E is
    not a fixture field; the sign never matters here.
    """
    d = chi.d
    cv = evaluate(chi, E.conductor)
    e = -cv.exp * ((d + 1) // 2) % d
    with mpmath.workprec(precision):
        z0 = mpmath.expjpi(mpmath.mpf(2 * e) / d)
        v = z0 * x
        tol = mpmath.mpf(2) ** (-precision // 2) * max(1, abs(x))
        return {"real": abs(mpmath.im(v)) < tol, "imaginary": abs(mpmath.re(v)) < tol,
                "rotated": v}


# -- Euler factors ----------------------------------------------------------

@dataclass(frozen=True)
class EulerFactor:
    """P_l(E, chi, 1) = num / den with num, den in Z[zeta_d]."""
    ell: int
    num: CycElt
    den: CycElt

    def value(self, k=1, prec=None):
        return self.num.embed(k, prec) / self.den.embed(k, prec)

    def __str__(self):
        return f"({self.num}) / ({self.den})"


def euler_factor(E, chi, ell):
    d = chi.d
    one = CycElt.one(d)
    c = evaluate(chi, ell)
    if c.zero:
        return EulerFactor(ell, one, one)
    z = c.to_cyc()
    L = CycElt.from_int(ell, d)
    if E.is_good(ell):
        return EulerFactor(ell, L, L - z * ap(E, ell) + z * z)
    kind = E.reduction[ell]
    if kind == "split":
        return EulerFactor(ell, L, L - z)
    if kind == "nonsplit":
        return EulerFactor(ell, L, L + z)
    return EulerFactor(ell, one, one)


# -- visualization criterion: hypotheses, then the conclusion ---------------

def _item(name, status, detail=None):
    out = {"check": name, "status": status}
    if detail is not None:
        out["detail"] = detail
    return out


def mainvisu_check(E1, E2, chi, p, precision=DEFAULT_PRECISION):
    """Visualization criterion: checkable hypotheses, then (p) | (scriptL(E1, chi))_p."""
    items = []
    N1, N2 = E1.conductor, E2.conductor
    ok = math.gcd(chi.f, N1 * N2) == 1
    items.append(_item("conductors coprime", "pass" if ok else "fail",
                       {"f_chi": chi.f, "N1": N1, "N2": N2}))
    for E in (E1, E2):
        if not E.is_good(p):
            items.append(_item(f"{E.label} good ordinary at {p}", "fail", "bad reduction"))
        else:
            a = ap(E, p)
            items.append(_item(f"{E.label} good ordinary at {p}", "pass" if a % p else "fail", {"a_p": a}))
    for E in (E1, E2):
        flag = E.extra.get("irreducible_mod_p")
        items.append(_item(f"{E.label}[{p}] irreducible", "assumed-from-fixture" if flag else "unverified",
                           {"fixture": flag}))
    sl1 = script_L_algebraic(E1, chi, p, precision)
    items.append(_item(f"L({E1.label}, chi, 1) != 0", "fail" if sl1.is_zero else "pass",
                       {"abs_L": float(abs(sl1.lresults[1].L_value))}))
    l1 = L_1(E1, precision)
    items.append(_item(f"L({E1.label}, 1) != 0", "fail" if l1.is_zero() else "pass",
                       {"L": float(mpmath.re(l1.L_value))}))
    vanish = []
    for prec in (precision, precision + 64):
        r = L_chi_1(E2, chi, None, prec)
        vanish.append(r.is_zero())
    items.append(_item(f"L({E2.label}, chi, 1) = 0", "pass" if all(vanish) else "fail",
                       {"precisions": [precision, precision + 64]}))
    cong = congruent_mod_p(E1, E2, p)
    items.append(_item(f"{E1.label} and {E2.label} congruent mod {p}",
                       "pass" if cong["congruent"] else "fail",
                       {"bound": cong["bound"], "primes_checked": len(cong["checked"]),
                        "first_violation": cong["first_violation"], "note": cong["note"]}))
    primes = cyclo.primes_above(p, chi.d)
    vals = {}
    for ell in sorted(set(E1.bad_primes) | set(E2.bad_primes)):
        ef = euler_factor(E1, chi, ell)
        vals[ell] = [cyclo.valuation(ef.num, P) - cyclo.valuation(ef.den, P) for P in primes]
    ok = all(v == 0 for vs in vals.values() for v in vs)
    items.append(_item("Euler factors are units at primes above p", "pass" if ok else "fail",
                       {str(k): v for k, v in vals.items()}))
    hyp_ok = all(i["status"] in ("pass", "assumed-from-fixture") for i in items)
    conclusion = None
    if not sl1.is_zero:
        conclusion = IdealPart.rational(p, chi.d).divides(sl1.ideal_part)
    return {
        "E1": E1.label, "E2": E2.label, "p": p, "character": chi.to_spec(),
        "hypotheses": items, "hypotheses_hold": hyp_ok,
        "scriptL_part": str(sl1.ideal_part) if sl1.ideal_part is not None else None,
        "scriptL_part_vector": sl1.ideal_part.vector() if sl1.ideal_part is not None else None,
        "conclusion_p_divides": conclusion,
        "equality": (sl1.ideal_part == IdealPart.rational(p, chi.d)) if sl1.ideal_part is not None else None,
        "scriptL": sl1,
    }
