import random

import pytest
from hypothesis import given, settings, strategies as st

from lmhs.errors import NotMHS, WeightMismatch
from lmhs.filtrations import HodgeFiltration
from lmhs.fixtures import N_A, N_C, N_D, fixture
from lmhs.linalg import Mat, Subspace, exp_nilpotent, sum_all
from lmhs.mhs import (deligne_splitting, f_infinity, is_r_split, primitive_subspace,
                      splitting_conjugation_ok, verify_lmhs)
from lmhs.nilpotent import cone_weight_filtration, weight_filtration
from lmhs.scalars import I

import gen


def setup(name):
    p = fixture(name)
    W = cone_weight_filtration(p.cone, p.space.weight)
    return p, W


def test_splitting_fixture_A():
    p, W = setup("A")
    s = deligne_splitting(W, p.F, 1)
    assert s[(1, 1)] == Subspace.span([(1, I)], 2)
    assert s[(0, 0)] == Subspace.span([(0, 1)], 2)
    assert not is_r_split(s)


def test_splitting_fixture_A_prime():
    p, W = setup("A_prime")
    s = deligne_splitting(W, p.F, 1)
    assert s[(1, 1)] == Subspace.span([(1, 0)], 2)
    assert s[(0, 0)] == Subspace.span([(0, 1)], 2)
    assert is_r_split(s)


def test_splitting_pure():
    F = fixture("A").F
    s = deligne_splitting(weight_filtration(Mat.zeros(2), 1), F, 1)
    assert s[(1, 0)] == F(1) and s[(0, 1)] == F(1).conj()
    assert is_r_split(s)


def test_splitting_fixture_D():
    p, W = setup("D")
    s = deligne_splitting(W, p.F, 1)
    assert s.dims() == {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): 1}
    assert s[(1, 1)] == Subspace.span([(1, 0, 0, 0)], 4)
    assert s[(1, 0)] == Subspace.span([(0, 1, 0, I)], 4)


def test_splitting_rejects_non_mhs():
    W = weight_filtration(fixture("B").complex.N[1], 1)
    F = HodgeFiltration.from_spans(4, {1: [(1, I, 0, 0), (0, 0, 0, 1)]})
    with pytest.raises(NotMHS):
        deligne_splitting(W, F, 1)


def test_primitive_subspaces():
    assert primitive_subspace(N_A, weight_filtration(N_A, 1), 1, 1).dim == 1
    assert primitive_subspace(N_C, weight_filtration(N_C, 2), 0, 2).dim == 0
    assert primitive_subspace(N_D, weight_filtration(N_D, 1), 0, 1).dim == 2
    with pytest.raises(WeightMismatch):
        primitive_subspace(N_A, weight_filtration(Mat.zeros(2), 1), 0, 1)


@pytest.mark.parametrize("name", ["A", "A_prime", "C", "D", "B"])
def test_certificates_pass(name):
    p, W = setup(name)
    c = verify_lmhs(W, p.F, p.cone, p.space)
    assert c.passed, c.failures
    assert all(r["signature"][0] == r["dim"] for r in c.signatures)


def test_certificate_signature_values():
    p, W = setup("A")
    c = verify_lmhs(W, p.F, p.cone, p.space)
    assert [(r["k"], r["p"], r["q"], r["signature"]) for r in c.signatures] == [(1, 1, 1, [1, 0, 0])]
    assert c.hodge_numbers == {"0,0": 1, "1,1": 1}
    p, W = setup("C")
    c = verify_lmhs(W, p.F, p.cone, p.space)
    assert [(r["k"], r["p"], r["q"]) for r in c.signatures] == [(2, 2, 2)]


def test_conjugate_flip_of_A_is_still_polarized():
    # the only primitive piece is of type (1,1), so Q(v, N conj v) does not see the flip
    p, W = setup("A")
    F = HodgeFiltration.from_spans(2, {1: [(1, -I)]})
    assert verify_lmhs(W, F, p.cone, p.space).passed


def test_designed_failures():
    p, W = setup("A_negN")
    c = verify_lmhs(W, p.F, p.cone, p.space)
    assert not c.passed
    assert [k for k, v in c.flags.items() if not v] == ["d"]
    assert c.signatures[0]["signature"] == [0, 1, 0]
    p, W = setup("D_flipped")
    c = verify_lmhs(W, p.F, p.cone, p.space)
    assert [k for k, v in c.flags.items() if not v] == ["d"]
    bad = [r for r in c.signatures if not r["ok"]]
    assert {(r["k"], r["p"], r["q"]) for r in bad} == {(0, 0, 1), (0, 1, 0)}
    assert all(r["signature"] == [0, 1, 0] for r in bad)


def test_degenerate_block_fails_mhs():
    p, W = setup("B")
    F = HodgeFiltration.from_spans(4, {1: [(1, I, 0, 0), (0, 0, 0, 1)]})
    c = verify_lmhs(W, F, p.cone, p.space)
    assert c.flags["a"] is False and c.flags["c"] is False


def test_f_infinity_fixture_C():
    p, W = setup("C")
    Finf, rep = f_infinity(W, p.F, 2)
    assert rep == {"gr_agreement": True, "violations": []}
    assert Finf(2) == Subspace.span([(0, 0, 1)], 3)
    assert Finf(1) == Subspace.span([(0, 1, 0), (0, 0, 1)], 3)


def test_f_infinity_fixture_A():
    p, W = setup("A")
    Finf, rep = f_infinity(W, p.F, 1)
    assert rep["gr_agreement"]
    assert Finf(1) == Subspace.span([(0, 1)], 2)


def test_f_infinity_pure_is_F():
    F = fixture("A").F
    Finf, rep = f_infinity(weight_filtration(Mat.zeros(2), 1), F, 1)
    assert rep["gr_agreement"] and Finf == F


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["A", "A_prime", "C", "D"]), st.integers(0, 2**32))
def test_splitting_axioms_on_translates(name, seed):
    rng = random.Random(seed)
    p, W = setup(name)
    z = gen.gaussian(rng)
    F = p.F.transform(exp_nilpotent(p.cone.barycenter().scale(z)))
    s = deligne_splitting(W, F, p.space.weight)
    assert sum(s.dims().values()) == p.space.rank
    assert sum_all(s.pieces.values(), p.space.rank).dim == p.space.rank
    assert s.hodge_filtration() == F and s.weight_filtration() == W
    assert splitting_conjugation_ok(s)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["A", "C", "D", "A_negN", "D_flipped"]), st.integers(0, 2**32))
def test_certificate_invariant_under_real_translation(name, seed):
    rng = random.Random(seed)
    p, W = setup(name)
    base = verify_lmhs(W, p.F, p.cone, p.space)
    z = gen.gaussian(rng)
    F = p.F.transform(exp_nilpotent(p.cone.barycenter().scale(z)))
    c = verify_lmhs(W, F, p.cone, p.space)
    assert c.flags == base.flags
    assert [r["signature"] for r in c.signatures] == [r["signature"] for r in base.signatures]
