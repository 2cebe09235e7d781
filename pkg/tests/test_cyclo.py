import random

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from twistfact import cyclo
from twistfact.cyclo import CycElt, EmbeddingChoice, IdealPart
from twistfact.errors import InfiniteValuation, InvalidParameter, RecognitionFailure


def z(d=5, k=1):
    return CycElt.zeta(d, k)


def residues(part):
    return {P.residue: e for P, e in part.exps.items()}


def rand_elt(rng, d, bound=30):
    n = cyclo.phi(d)
    return CycElt(d, tuple(rng.randint(-bound, bound) for _ in range(n)))


elements = st.lists(st.integers(-25, 25), min_size=4, max_size=4).map(lambda c: CycElt(5, tuple(c)))


# -- reduce / norm --------------------------------------------------------------

def test_reduce_zeta4():
    assert cyclo.reduce([0, 0, 0, 0, 1], 5).coeffs == (-1, -1, -1, -1)


def test_reduce_zero_and_zeta5():
    assert cyclo.reduce([0], 5).is_zero()
    assert cyclo.reduce([1, 0, 0, 0, 0, 1], 5) == CycElt.from_int(2, 5)


def test_norms():
    assert cyclo.norm_to_Z(z() - 3) == 121
    assert cyclo.norm_to_Z(CycElt.one(5)) == 1
    assert cyclo.norm_to_Z(CycElt.from_int(2, 5)) == 16


@given(elements, elements)
def test_norm_multiplicative(x, y):
    assert cyclo.norm_to_Z(x * y) == cyclo.norm_to_Z(x) * cyclo.norm_to_Z(y)


@given(elements)
def test_half_norm_squares_to_norm(x):
    h = cyclo.half_norm(x)
    if h is not None:
        assert h * h == cyclo.norm_to_Z(x)


@given(elements, st.sampled_from([1, 2, 3, 4]), st.sampled_from([1, 2, 3, 4]))
def test_galois_composes(x, j, k):
    assert x.galois(j).galois(k) == x.galois(j * k % 5)


@given(elements)
def test_inverse(x):
    if not x.is_zero():
        assert x * x.inverse() == CycElt.one(5)


# -- primes ------------------------------------------------------------------------

def test_primes_above_11():
    ps = cyclo.primes_above(11, 5)
    assert [P.residue for P in ps] == [9, 5, 4, 3]
    assert all(P.residue_degree == 1 for P in ps)


def test_primes_above_2_inert_and_31_split():
    (P,) = cyclo.primes_above(2, 5)
    assert P.residue_degree == 4
    assert len(cyclo.primes_above(31, 5)) == 4


def test_ramified_prime_rejected():
    with pytest.raises(Exception):
        cyclo.primes_above(5, 5)


def test_valuation_examples():
    x = z() - 3
    assert cyclo.valuation(x, cyclo.prime_with_residue(11, 5, 3)) == 2
    assert cyclo.valuation(x, cyclo.prime_with_residue(11, 5, 4)) == 0
    for P in cyclo.primes_above(11, 5):
        assert cyclo.valuation(CycElt.from_int(11, 5), P) == 1


def test_valuation_of_zero():
    with pytest.raises(InfiniteValuation):
        cyclo.valuation(CycElt.zero(5), cyclo.primes_above(11, 5)[0])


def test_high_valuation_needs_hensel_lift():
    P = cyclo.prime_with_residue(11, 5, 3)
    x = (z() - 3) ** 9
    assert cyclo.valuation(x, P) == 18


def test_part_above_one_is_empty():
    assert cyclo.part_above_p(CycElt.one(5), 11).is_unit()


# -- properties over many random elements -------------------------------------------

def test_valuation_multiplicative_and_norm_compatible_500():
    rng = random.Random(20261015)
    primes = cyclo.primes_above(11, 5)
    for _ in range(500):
        x, y = rand_elt(rng, 5), rand_elt(rng, 5)
        if x.is_zero() or y.is_zero():
            continue
        for P in primes:
            assert cyclo.valuation(x * y, P) == cyclo.valuation(x, P) + cyclo.valuation(y, P)
        total = sum(P.residue_degree * cyclo.valuation(x, P) for P in primes)
        assert total == cyclo.vp_int(cyclo.norm_to_Z(x), 11)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.randoms(use_true_random=False))
def test_recognize_embed_roundtrip(d, rng):
    x = rand_elt(rng, d, bound=10 ** 6)
    emb = EmbeddingChoice(d, 1)
    vals = cyclo.conjugate_values(x, emb, 200)
    assert cyclo.recognize(vals, d, emb, mpmath.mpf(2) ** -100, 200) == x


def test_recognize_other_embedding():
    x = z() - 3
    emb = EmbeddingChoice(5, 2)
    vals = cyclo.conjugate_values(x, emb, 200)
    assert cyclo.recognize(vals, 5, emb, mpmath.mpf(2) ** -100, 200) == x


def test_recognize_perturbed_zero():
    vals = [(k, mpmath.mpc(1e-40, -1e-40)) for k in (1, 2, 3, 4)]
    assert cyclo.recognize(vals, 5, EmbeddingChoice(5), mpmath.mpf(2) ** -60, 200).is_zero()


def test_recognize_rejects_non_integral():
    vals = cyclo.conjugate_values(z() - 3, EmbeddingChoice(5), 200)
    vals = [(k, v + mpmath.mpf("0.25")) for k, v in vals]
    with pytest.raises(RecognitionFailure):
        cyclo.recognize(vals, 5, EmbeddingChoice(5), mpmath.mpf(2) ** -60, 200)


def test_recognize_requires_all_conjugates():
    with pytest.raises(InvalidParameter):
        cyclo.recognize([(1, mpmath.mpc(1))], 5, EmbeddingChoice(5), 1e-10, 100)


# -- ideal parts -------------------------------------------------------------------------

def test_ideal_from_h_examples():
    assert residues(cyclo.ideal_from_h([-3, 1], 1, 11, 5)) == {9: 0, 5: 0, 4: 0, 3: 1}
    assert residues(cyclo.ideal_from_roots([3, 4], 11, 5)) == {9: 0, 5: 0, 4: 1, 3: 1}
    assert cyclo.ideal_from_h([1], 3, 11, 5).is_unit()


def test_ideal_from_h_matches_valuations():
    # (11, h(z)) has exponent min(v_P(h(z)), 1) at each P above 11
    x = (z() - 3) * (z() - 4)
    vals = {P: min(cyclo.valuation(x, P), 1) for P in cyclo.primes_above(11, 5)}
    assert IdealPart(11, 5, vals) == cyclo.ideal_from_roots([3, 4], 11, 5)


def test_all_primitive_roots_give_p():
    assert cyclo.ideal_from_roots([3, 4, 5, 9], 11, 5) == IdealPart.rational(11, 5)


def test_conjugation_pairs_inverse_residues():
    P = IdealPart(11, 5, {cyclo.prime_with_residue(11, 5, 3): 1})
    assert residues(P.conj()) == {9: 0, 5: 0, 4: 1, 3: 0}


@given(st.lists(st.sampled_from([3, 4, 5, 9]), max_size=6), st.sampled_from([1, 2, 3, 4]))
def test_galois_on_parts_matches_galois_on_elements(roots, k):
    x = CycElt.one(5)
    for a in roots:
        x = x * (z() - a)
    assert cyclo.part_above_p(x.galois(k), 11) == cyclo.part_above_p(x, 11).galois(k)


def test_galois_prime_rule():
    # sigma_k sends (11, z - a) to (11, z - b) with b^k = a
    for k in (1, 2, 3, 4):
        for P in cyclo.primes_above(11, 5):
            Q = cyclo.galois_prime(P, k)
            assert pow(Q.residue, k, 11) == P.residue


def test_ideal_part_json_roundtrip():
    part = cyclo.ideal_from_roots([5, 5, 9, 9], 11, 5)
    again = IdealPart.from_json(part.to_json(), 5)
    assert again == part
    assert str(part) == "(11, z + 2)^2 * (11, z - 5)^2"


def test_ideal_part_rejects_foreign_prime():
    with pytest.raises(InvalidParameter):
        IdealPart(11, 5, {cyclo.primes_above(31, 5)[0]: 1})
