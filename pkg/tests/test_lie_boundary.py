import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from lmhs.errors import NotInCI, NotInCell, XNotCentral
from lmhs.filtrations import HodgeFiltration, check_period_domain
from lmhs.fixtures import N_A, N_D, R1_D, R2_D, U_D, fixture
from lmhs.lie import (BoundaryLieData, centralizer, fiber_solve, levi_decompose, normalize_M,
                      orbit_point, schubert_coordinate, schubert_quotient_coordinate,
                      trace_form)
from lmhs.linalg import Mat, bracket, exp_nilpotent
from lmhs.nilpotent import NilpotentCone, rescale_triple, sl2_complete
from lmhs.scalars import I

import gen


def data(name):
    p = fixture(name)
    return p, BoundaryLieData(p.space, p.cone, p.F)


@pytest.mark.parametrize("name,dim", [("A", 3), ("C", 3), ("D", 10)])
def test_g_dims(name, dim):
    assert len(fixture(name).space.lie_basis()) == dim


def test_trace_form_values():
    p, d = data("A_prime")
    t = sl2_complete(N_A, d.Y, p.space, d.splitting)
    assert trace_form(N_A, t.M) == 1
    assert trace_form(N_A, N_A) == 0
    assert trace_form(Mat.diag([1, -1]), Mat.diag([1, -1])) == 2


def test_centralizer_fixture_A():
    p, d = data("A")
    assert d.c == [N_A] or [X.flat() for X in d.c] == [N_A.flat()]
    assert len(d.c_level(1)) == len(d.c_level(2)) == 1
    assert len(d.c_level(3)) == 0


def test_centralizer_fixture_D():
    # sp4 centralizer of a rank-one nilpotent: dimension 10 - 4 = 6
    p, d = data("D")
    assert len(d.c) == 6
    assert [len(d.c_level(a)) for a in (1, 2, 3)] == [3, 1, 0]
    assert d.in_c_level(N_D, 2) and d.in_c_level(R1_D, 1) and not d.in_c_level(R1_D, 2)
    assert {k: len(v) for k, v in d.cpq.items()} == {
        (-1, -1): 1, (-1, 0): 1, (-1, 1): 1, (0, -1): 1, (0, 0): 1, (1, -1): 1}


def test_centralizer_of_zero_cone_is_g():
    sp = fixture("D").space
    assert len(centralizer(NilpotentCone([Mat.zeros(4)], sp), sp)) == 10


def test_bracket_relation_fixture_D():
    assert bracket(R1_D, R2_D) == N_D.scale(-2)


def test_levi_decompose():
    p, d = data("A_prime")
    assert levi_decompose(exp_nilpotent(N_A), d.Y, p.cone) == (Mat.identity(2), N_A)
    assert levi_decompose(Mat.identity(2), d.Y, p.cone) == (Mat.identity(2), Mat.zeros(2))
    g = Mat.diag([2, mpq(1, 2)])
    assert levi_decompose(g, d.Y) == (g, Mat.zeros(2))
    with pytest.raises(NotInCI):
        levi_decompose(g, d.Y, p.cone)


def test_levi_decompose_fixture_D():
    p, d = data("D")
    alpha, b = levi_decompose(Mat.identity(4) + R1_D, d.Y, p.cone)
    assert alpha == Mat.identity(4) and exp_nilpotent(b) == Mat.identity(4) + R1_D
    alpha, b = levi_decompose(Mat.identity(4) + U_D, d.Y, p.cone)
    assert alpha == Mat.identity(4) + U_D and b.is_zero()
    g = Mat.diag([1, -1, 1, -1])
    assert levi_decompose(g, d.Y, p.cone) == (g, Mat.zeros(4))


def test_normalize_M():
    p, d = data("A_prime")
    t = sl2_complete(N_A, d.Y, p.space, d.splitting)
    assert normalize_M(t, [N_A])[0] == 1
    k, t3 = normalize_M(rescale_triple(t, 3), [N_A])
    assert k == 3 and trace_form(t3.M, N_A) == 1
    assert normalize_M(t, [])[0] == 1


def test_schubert_coordinates():
    p, d = data("A_prime")
    assert d.lam(p.F).is_zero()
    z = mpq(2, 3) + I
    assert d.lam(HodgeFiltration.from_spans(2, {1: [(1, z)]})) == N_A.scale(z)
    p, d = data("D")
    assert d.lam(p.F.transform(exp_nilpotent(N_D))) == N_D
    with pytest.raises(NotInCell):
        d.lam(HodgeFiltration.from_spans(4, {1: [(0, 0, 1, 0), (0, 0, 0, 1)]}))


def test_schubert_quotient_coordinate():
    p, d = data("D")
    assert schubert_quotient_coordinate(p.F.transform(exp_nilpotent(N_D)), d, 1) == {}
    v = d.cpq[(-1, 0)][0]
    assert schubert_quotient_coordinate(p.F.transform(exp_nilpotent(v)), d, 1) == {(-1, 0): (1,)}
    big = schubert_quotient_coordinate(p.F.transform(exp_nilpotent(v + N_D)), d, 4)
    assert big == {(-1, 0): (1,), (-1, -1): (1,)}


def test_schubert_quotient_requires_central_coordinate():
    sp, cone, F = gen.direct_sum(("C", "C"))
    d = BoundaryLieData(sp, cone, F)
    X = next(X for X in d.gpq[(-1, -1)] if not d.in_c(X))
    with pytest.raises(XNotCentral):
        schubert_quotient_coordinate(F.transform(exp_nilpotent(X)), d, 2)


def test_orbit_points():
    p = fixture("A_prime")
    assert orbit_point([0], p.cone, p.F) == p.F
    E = orbit_point([I], p.cone, p.F)
    assert E == HodgeFiltration.from_spans(2, {1: [(1, I)]})
    assert check_period_domain(E, p.space).ok
    assert not check_period_domain(orbit_point([-I], p.cone, p.F), p.space).ok


def test_fiber_solve_base_cases():
    p, d = data("D")
    v = d.cpq[(-1, 0)][0]
    assert fiber_solve(Mat.zeros(4), v, d).y == v
    sol = fiber_solve(R1_D, Mat.zeros(4), d)
    assert sol.y == d.lam(p.F.transform(exp_nilpotent(R1_D)))
    assert d.E_part(sol.y, -1) == d.f_perp_part(d.E_part(R1_D, -1))
    sol = fiber_solve(N_D, v, d)
    assert sol.y1_holds and sol.y11_holds and sol.y11_corrected_holds


def test_fiber_solve_closed_form_gap():
    # the short (-1,-1) closed form misses the term from reordering the f-part of b
    p, d = data("D")
    v = d.cpq[(-1, 0)][0]
    sol = fiber_solve(R1_D, v.scale(I), d)
    assert sol.y1_holds and sol.y11_corrected_holds
    assert not sol.y11_holds


SUMS = [("A",), ("D",), ("C",), ("A", "A"), ("A", "D"), ("C", "C"), ("A", "A", "D"),
        ("D", "D"), ("A", "A_prime", "D")]


@pytest.fixture(scope="module")
def sum_data():
    out = {}
    for names in SUMS:
        sp, cone, F = gen.direct_sum(names)
        out[names] = BoundaryLieData(sp, cone, F)
    return out


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SUMS), st.integers(0, 2**32))
def test_lambda_round_trip(sum_data, names, seed):
    d = sum_data[names]
    rng = random.Random(seed)
    basis = [X for (p, q), v in d.gpq.items() if p < 0 for X in v]
    x = gen.combo(rng, basis, 0.7, gen.gaussian) if basis else Mat.zeros(d.r)
    assert schubert_coordinate(d.F.transform(exp_nilpotent(x)), d.F, d.splitting, d.space) == x


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_fiber_solve_properties(seed):
    p, d = data("D")
    rng = random.Random(seed)
    c1 = d.c_level(1)
    b = gen.combo(rng, c1, 0.8, gen.gaussian)
    x = gen.combo(rng, d.c_minus1_perp(), 0.8, gen.gaussian)
    sol = fiber_solve(b, x, d)
    assert d.F.transform(exp_nilpotent(b) @ exp_nilpotent(x)) == d.F.transform(exp_nilpotent(sol.y))
    assert sol.y1_holds and sol.y11_corrected_holds
    assert d.in_c_level(sol.y, 1) and d.f_part(sol.y).is_zero()
