import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from twistfact import descent as ds
from twistfact.cyclo import IdealPart
from twistfact.errors import InconsistencyError, Unsupported

from conftest import DATA

P = 11
DIAG = [[3, 0, 0, 0], [0, 4, 0, 0], [0, 0, 5, 0], [0, 0, 0, 9]]
HALF_PAIRS = {
    "5776.i1": [5, 9], "6400.a1": [5, 9], "7056.bg1": [3, 4], "16641.g1": [5, 9],
    "57600.ch1": [3, 4], "90601.c1": [3, 4], "215296.c1": [3, 4], "461041.h1": [5, 9],
    "499849.d1": [5, 9],
}


def fixture(label):
    return ds.load_descent_fixture(DATA / "descent" / f"{label.replace('.', '_')}.json")


def residues(part):
    return tuple(e for e in part.vector())   # order: residues 9, 5, 4, 3


# -- linear algebra -----------------------------------------------------------------

def test_eigenspace_identity_and_diag():
    I = [[int(i == j) for j in range(3)] for i in range(3)]
    assert len(ds.phi_eigenspace(I, 1, P)) == 3
    assert len(ds.phi_eigenspace(DIAG, 3, P)) == 1
    assert ds.phi_eigenspace(DIAG, 2, P) == []


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 10), min_size=4, max_size=4), st.sampled_from([2, 3, 4, 5, 9]))
def test_orbit_fast_path_agrees_with_kernel(u, target):
    hit, orbit = ds.orbit_eigen_test(DIAG, u, target, P)
    if not orbit:
        assert not any(u)
        return
    # brute force: is there a nonzero vector in the orbit span fixed up to target?
    space = ds.phi_eigenspace(DIAG, target, P)
    brute = any(ds.in_span(v, orbit, P) for v in space)
    assert hit == brute


@settings(max_examples=50, deadline=None)
@given(st.randoms(use_true_random=False))
def test_kernel_vectors_are_killed(rng):
    M = [[rng.randrange(P) for _ in range(4)] for _ in range(4)]
    for t in range(1, P):
        for v in ds.phi_eigenspace(M, t, P):
            w = ds._matvec(M, v, P)
            assert w == [t * x % P for x in v]


# -- splitting and dimension count ---------------------------------------------------

def test_splitting_counts():
    real11 = [1, 3, -3, -4, 1, 1]      # minimal polynomial of zeta_11 + zeta_11^-1
    sc = ds.splitting_counts(real11, 11)
    assert sc["primes"] == 1 and sc["ramified"]
    split = [1]
    for a in (1, 2, 3, 4, 5):
        split = ds.pu.fp_mul(split, [-a, 1], 11)
    assert ds.splitting_counts(split, 11)["primes"] == 5
    inert = ds.splitting_counts([-2, 0, 0, 0, 0, 1], 11)
    assert inert["primes"] == 1 and inert["degrees"] == [5] and not inert["ramified"]


def test_expected_kernel_dim():
    assert ds.expected_kernel_dim(11, 5, [1], [1]) == 4
    assert ds.expected_kernel_dim(11, 5, [5], [1]) == 8
    assert ds.expected_kernel_dim(11, 1, [], []) == 0


# -- h_theta ---------------------------------------------------------------------------

def test_7056_chain():
    fx = fixture("7056.bg1")
    assert fx.phi_gamma == (-5) % 11 and fx.phi_sigma == 3
    rep = ds.assemble_h_theta(fx)
    assert rep.searched == [1, 2]
    assert rep.alphas() == [4]
    assert ds.ct_filter(rep.alphas(), fx.expected_selmer_dim(), 11) == [[3, 4]]


def test_alpha_index_map():
    fx = fixture("7056.bg1")
    assert [ds.alpha_for_index(fx, i) for i in (1, 2, 3, 4)] == [4, 5, 9, 3]


@pytest.mark.parametrize("label", sorted(HALF_PAIRS))
def test_fixture_pairs(label):
    fx = fixture(label)
    assert ds.fixture_validate(fx)["valid"]
    _, cands = ds.h_theta_from_fixture(fx)
    assert cands == [HALF_PAIRS[label]]


def test_full_search_agrees_with_half_search():
    for label in HALF_PAIRS:
        fx = fixture(label)
        full = ds.assemble_h_theta(fx, half_search=False).alphas()
        (cand,) = ds.h_theta_from_fixture(fx)[1]
        assert full and all(full.count(a) <= cand.count(a) for a in full)


def test_empty_selmer_bits():
    obj = json.loads((DATA / "descent" / "7056_bg1.json").read_text())
    for f in obj["fields"]:
        f["selmer_vectors"] = []
    rep = ds.assemble_h_theta(ds.load_descent_fixture(obj))
    assert rep.alphas() == [] and rep.h_theta() == []


def test_selmer_vector_outside_eigenspace():
    obj = json.loads((DATA / "descent" / "7056_bg1.json").read_text())
    obj["fields"][0]["selmer_vectors"] = [[1, 0, 0, 0]]
    fx = ds.load_descent_fixture(obj)
    assert not ds.fixture_validate(fx)["valid"]
    with pytest.raises(InconsistencyError):
        ds.assemble_h_theta(fx)


def test_q_not_dividing_p_minus_1():
    obj = json.loads((DATA / "descent" / "7056_bg1.json").read_text())
    obj["q"] = 3
    with pytest.raises(Unsupported):
        ds.load_descent_fixture(obj)


def test_validation_flags_wrong_phi_order():
    obj = json.loads((DATA / "descent" / "7056_bg1.json").read_text())
    obj["phi_gamma"] = 3      # order 5 mod 11
    rep = ds.fixture_validate(ds.load_descent_fixture(obj))
    assert not rep["valid"]
    bad = [c for c in rep["checks"] if c["status"] == "fail"]
    assert any("order p - 1" in c["check"] for c in bad)


def test_validation_7056_eligibility_and_dimension():
    rep = ds.fixture_validate(fixture("7056.bg1"))
    by = {c["check"]: c for c in rep["checks"]}
    assert by["S may be empty (one prime above p in K)"]["status"] == "pass"
    assert by["F_1: module dimension matches the unit count"]["status"] == "pass"
    assert by["F_1: Cl[p] = 0"]["status"] == "assumed-from-fixture"


# -- Cassels-Tate filter -----------------------------------------------------------------

def test_ct_filter_examples():
    assert ds.ct_filter([4], 2, P) == [[3, 4]]
    assert ds.ct_filter([5], 2, P) == [[5, 9]]
    with pytest.raises(InconsistencyError):
        ds.ct_filter([3, 5], 2, P)


def test_ct_filter_inverse_closure_exhaustive():
    units = range(1, P)
    for size in (1, 2, 3):
        for raw in itertools.combinations_with_replacement(units, size):
            for dim in range(0, 2 * size + 1):
                try:
                    out = ds.ct_filter(list(raw), dim, P)
                except InconsistencyError:
                    continue
                for cand in out:
                    assert len(cand) == dim
                    for a in set(cand):
                        assert cand.count(a) == cand.count(pow(a, -1, P))
                    for a in raw:
                        assert cand.count(a) >= raw.count(a)


# -- right-hand side ideal -------------------------------------------------------------------

def test_rhs_ideal_examples():
    assert residues(ds.rhs_ideal([3, 4], P, 5)) == (0, 0, 1, 1)
    assert ds.rhs_ideal([3, 4, 5, 9], P, 5) == IdealPart.rational(P, 5)
    assert residues(ds.rhs_ideal([5, 5, 9, 9], P, 5)) == (2, 2, 0, 0)
