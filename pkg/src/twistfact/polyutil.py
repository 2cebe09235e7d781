"""Dense univariate polynomial helpers over Z, Q and F_p.

Polynomials are lists of coefficients, lowest degree first.  The zero
polynomial is the empty list.
"""
from __future__ import annotations

from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor_sqf


def trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def degree(a):
    return len(trim(a)) - 1


def add(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def sub(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return trim(out)


def rem_monic(a, m):
    """Remainder of ``a`` modulo the monic polynomial ``m`` (exact, any ring)."""
    a = list(a)
    n = len(m) - 1
    for i in range(len(a) - 1, n - 1, -1):
        c = a[i]
        if c:
            for j in range(n + 1):
                a[i - n + j] -= c * m[j]
    return trim(a[:n])


def divmod_monic(a, m):
    a = list(a)
    n = len(m) - 1
    if len(a) <= n:
        return [], trim(a)
    q = [0] * (len(a) - n)
    for i in range(len(a) - 1, n - 1, -1):
        c = a[i]
        q[i - n] = c
        if c:
            for j in range(n + 1):
                a[i - n + j] -= c * m[j]
    return trim(q), trim(a[:n])


def evaluate(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def compose_power(a, k):
    """Return a(x^k)."""
    if not a:
        return []
    out = [0] * ((len(a) - 1) * k + 1)
    for i, c in enumerate(a):
        out[i * k] = c
    return out


def derivative(a):
    return trim([i * a[i] for i in range(1, len(a))])


# -- F_p -------------------------------------------------------------------

def fp(a, p):
    return trim([c % p for c in a])


def fp_mul(a, b, p):
    return fp(mul(a, b), p)


def fp_divmod(a, b, p):
    a = fp(a, p)
    b = fp(b, p)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    n = len(b) - 1
    if len(a) <= n:
        return [], a
    q = [0] * (len(a) - n)
    for i in range(len(a) - 1, n - 1, -1):
        c = a[i] * inv % p
        q[i - n] = c
        if c:
            for j in range(n + 1):
                a[i - n + j] = (a[i - n + j] - c * b[j]) % p
    return trim(q), trim(a[:n])


def fp_rem(a, b, p):
    return fp_divmod(a, b, p)[1]


def fp_monic(a, p):
    a = fp(a, p)
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def fp_gcd(a, b, p):
    a, b = fp(a, p), fp(b, p)
    while b:
        a, b = b, fp_rem(a, b, p)
    return fp_monic(a, p)


def fp_gcdex(a, b, p):
    """Return (s, t, g) with s*a + t*b = g = gcd(a, b), g monic."""
    r0, r1 = fp(a, p), fp(b, p)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = fp_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, fp(sub(s0, mul(q, s1)), p)
        t0, t1 = t1, fp(sub(t0, mul(q, t1)), p)
    if not r0:
        return s0, t0, r0
    inv = pow(r0[-1], -1, p)
    return ([c * inv % p for c in s0], [c * inv % p for c in t0], [c * inv % p for c in r0])


def fp_inverse_mod(a, m, p):
    s, _, g = fp_gcdex(a, m, p)
    if g != [1]:
        raise ZeroDivisionError("element is not invertible modulo m")
    return s


def fp_multiplicity(a, g, p):
    """Largest e with g^e dividing a over F_p (a nonzero)."""
    a = fp(a, p)
    e = 0
    while True:
        q, r = fp_divmod(a, g, p)
        if r:
            return e
        a = q
        e += 1


def fp_factor_squarefree(a, p):
    """Monic irreducible factors of a square-free polynomial over F_p."""
    hi = [ZZ(c) for c in reversed(fp_monic(a, p))]
    _, factors = gf_factor_sqf(hi, p, ZZ)
    return [[int(c) for c in reversed(f)] for f in factors]


def fp_roots(a, p):
    a = fp(a, p)
    return sorted(x for x in range(p) if evaluate(a, x) % p == 0)


def show(a, var="z", p=None):
    """Sparse text form, e.g. ``z^2 - 3*z + 1``; with ``p`` coefficients are
    printed in the symmetric range."""
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if p is not None:
            c %= p
            if c > p // 2:
                c -= p
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return " ".join([head] + [f"{s} {b}" for s, b in terms[1:]])
