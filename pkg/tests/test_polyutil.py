from hypothesis import given, strategies as st

from twistfact import polyutil as pu

polys = st.lists(st.integers(-20, 20), min_size=0, max_size=6)


@given(polys, polys)
def test_mul_commutes(a, b):
    assert pu.mul(a, b) == pu.mul(b, a)


@given(polys, st.lists(st.integers(-20, 20), min_size=1, max_size=4))
def test_divmod_monic_reconstructs(a, m):
    m = m + [1]
    q, r = pu.divmod_monic(a, m)
    assert pu.degree(r) < pu.degree(m)
    assert pu.trim(pu.add(pu.mul(q, m), r)) == pu.trim(a)


@given(polys, st.integers(-5, 5))
def test_evaluate_matches_horner(a, x):
    assert pu.evaluate(a, x) == sum(c * x ** i for i, c in enumerate(a))


def test_roots_of_phi5_mod_11():
    assert sorted(pu.fp_roots([1, 1, 1, 1, 1], 11)) == [3, 4, 5, 9]


def test_squarefree_factorization_mod_2_is_irreducible():
    assert pu.fp_factor_squarefree([1, 1, 1, 1, 1], 2) == [[1, 1, 1, 1, 1]]


@given(st.lists(st.integers(0, 10), min_size=2, max_size=5), st.lists(st.integers(0, 10), min_size=2, max_size=5))
def test_gcdex_bezout(a, b):
    p = 11
    s, t, g = pu.fp_gcdex(a, b, p)
    lhs = pu.fp(pu.add(pu.mul(s, a), pu.mul(t, b)), p)
    assert lhs == pu.fp(g, p)
