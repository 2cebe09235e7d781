import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from twistfact import dirichlet as dc
from twistfact.cyclo import CycElt, EmbeddingChoice
from twistfact.errors import InvalidParameter


def test_unit_groups():
    assert dc.unit_group(11) == [(2, 10)]
    assert dc.unit_group(31) == [(3, 30)]
    assert dc.unit_group(2) == []


@given(st.integers(2, 400))
def test_unit_logs_rebuild_residue(f):
    gens = dc.unit_group(f)
    for n in range(1, min(f, 60)):
        if math.gcd(n, f) != 1:
            continue
        x = 1
        for (g, _), e in zip(gens, dc.unit_logs(f, n)):
            x = x * pow(g, e, f) % f
        assert x == n % f


def test_build_char_examples():
    chi = dc.build_char(31, 5, [(3, 3)])
    assert chi.exponent(3) == 3 and chi.primitive
    chi = dc.build_char(11, 5, [(2, 1)])
    assert chi.exponent(4) == 2
    with pytest.raises(InvalidParameter):
        dc.build_char(11, 5, [(10, 1)])


def test_evaluate_examples():
    chi = dc.build_char(11, 5, [(2, 1)])
    assert chi(4).to_cyc() == CycElt.zeta(5, 2)
    assert chi(22).zero
    for c in dc.all_characters(11, 5):
        assert c.exponent(-1) == 0 and c.is_even


@given(st.integers(1, 200))
def test_homomorphism(n):
    chi = dc.build_char(31, 5, [(3, 3)])
    m = n + 7
    if math.gcd(n * m, 31) == 1:
        assert chi.exponent(n * m) == (chi.exponent(n) + chi.exponent(m)) % 5


def test_conjugates():
    chi = dc.build_char(11, 5, [(2, 2)])
    conj = dc.conjugates(chi)
    assert len(conj) == 4 and conj[0] == (1, chi)
    for j, cj in conj:
        for k, _ in conj:
            assert cj.power(k) == chi.power(j * k % 5)


def test_spec_roundtrip():
    chi = dc.build_char(31, 5, [(3, 3)])
    assert dc.from_spec(chi.to_spec()) == chi


def test_gauss_sum_modulus_all_primitive_up_to_200():
    count = 0
    with mpmath.workprec(80):
        for d in (3, 5, 7):
            for f in range(3, 201):
                for chi in dc.all_characters(f, d):
                    if not chi.primitive:
                        continue
                    g = dc.gauss_sum(chi, prec=64)
                    assert abs(abs(g) ** 2 - f) < mpmath.mpf(2) ** -50 * f
                    count += 1
    assert count > 50


def test_gauss_sum_product_even_character():
    chi = dc.build_char(11, 5, [(2, 1)])
    with mpmath.workprec(120):
        prod = dc.gauss_sum(chi, prec=100) * dc.gauss_sum(chi.conj(), prec=100)
        assert abs(prod - 11) < mpmath.mpf(2) ** -90


def test_gauss_sum_embeddings_are_conjugates():
    chi = dc.build_char(11, 5, [(2, 1)])
    with mpmath.workprec(100):
        a = dc.gauss_sum(chi, EmbeddingChoice(5, 2), prec=90)
        b = dc.gauss_sum(chi.power(2), prec=90)
        assert abs(a - b) < mpmath.mpf(2) ** -80


def test_quadratic_gauss_sum_mod_5():
    (chi,) = [c for c in dc.all_characters(5, 2)]
    with mpmath.workprec(100):
        assert abs(dc.gauss_sum(chi, prec=90) - mpmath.sqrt(5)) < mpmath.mpf(2) ** -80


def test_non_primitive_rejected():
    imprim = [c for c in dc.all_characters(22, 5) if not c.primitive]
    assert imprim
    with pytest.raises(InvalidParameter):
        dc.gauss_sum(imprim[0])
