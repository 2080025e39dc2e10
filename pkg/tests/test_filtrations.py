import pytest

from lmhs.errors import InputError
from lmhs.filtrations import (HodgeFiltration, PolarizedSpace, check_compact_dual,
                              check_period_domain, graded_piece, hodge_adapted_basis,
                              induced_end_filtration, weight_adapted_basis)
from lmhs.fixtures import N_A, N_C, N_D, Q_A, fixture
from lmhs.linalg import Mat, Subspace
from lmhs.nilpotent import weight_filtration
from lmhs.scalars import I


def test_polarized_space_validation():
    with pytest.raises(InputError):
        PolarizedSpace(2, 1, Mat([[0, 1], [1, 0]]))
    with pytest.raises(InputError):
        PolarizedSpace(2, 2, Q_A)
    with pytest.raises(InputError):
        PolarizedSpace(2, 1, Mat([[0, 0], [0, 0]]))
    sp = PolarizedSpace(2, 1, Q_A)
    assert sp.form((1, 0), (0, 1)) == 1
    assert sp.in_lie_algebra(N_A) and not sp.in_lie_algebra(Mat.identity(2))


def test_graded_pieces():
    WA = weight_filtration(N_A, 1)
    assert [graded_piece(WA, l).dim for l in (2, 1, 0)] == [1, 0, 1]
    WD = weight_filtration(N_D, 1)
    assert [graded_piece(WD, l).dim for l in (2, 1, 0)] == [1, 2, 1]
    W0 = weight_filtration(Mat.zeros(3), 2)
    assert graded_piece(W0, 2).dim == 3
    assert all(graded_piece(W0, l).dim == 0 for l in (0, 1, 3, 4))


def test_weight_adapted_basis_fixture_C():
    P, wts = weight_adapted_basis(weight_filtration(N_C, 2))
    assert wts == [0, 2, 4]
    assert P == Mat([[0, 0, 1], [0, 1, 0], [1, 0, 0]])


def test_hodge_adapted_basis_is_invertible():
    F = fixture("D").F
    P, degs = hodge_adapted_basis(F)
    assert P.rank() == 4 and sorted(degs) == [0, 0, 1, 1]


def test_hodge_numbers():
    assert fixture("A").F.hodge_numbers() == {0: 1, 1: 1}
    assert fixture("D").F.hodge_numbers() == {0: 2, 1: 2}
    assert fixture("C").F.hodge_numbers() == {0: 1, 1: 1, 2: 1}


def test_hodge_filtration_is_decreasing():
    with pytest.raises(InputError):
        HodgeFiltration.from_spans(2, {1: [(1, 0)], 2: [(0, 1)]})


def test_induced_filtration_fixture_A():
    A = fixture("A")
    Wg, _ = induced_end_filtration(weight_filtration(N_A, 1), A.F)
    g = Subspace.span([X.flat() for X in A.space.lie_basis()], 4)
    assert (Wg(-2) & g) == Subspace.span([N_A.flat()], 4)


def test_induced_filtration_fixture_C():
    C = fixture("C")
    _, Fg = induced_end_filtration(weight_filtration(N_C, 2), C.F)
    assert Fg(-1).dim == 8
    assert Fg(0).dim == 6


def test_identity_filtrations_give_everything():
    F = HodgeFiltration.from_spans(2, {0: [(1, 0), (0, 1)]})
    W = weight_filtration(Mat.zeros(2), 1)
    Wg, Fg = induced_end_filtration(W, F)
    assert Fg(0).dim == 4 and Wg(0).dim == 4 and Wg(-1).dim == 0


@pytest.mark.parametrize("vec,ok", [((1, I), True), ((1, 0), True)])
def test_compact_dual_fixture_A(vec, ok):
    F = HodgeFiltration.from_spans(2, {1: [vec]})
    assert check_compact_dual(F, fixture("A").space).ok is ok


def test_compact_dual_fails_off_the_quadric():
    F = HodgeFiltration.from_spans(3, {2: [(1, 0, 1)], 1: [(1, 0, 1), (0, 1, 0)]})
    res = check_compact_dual(F, fixture("C").space)
    assert not res.ok and res.details["violations"]


def test_period_domain_fixture_A():
    sp = fixture("A").space
    good = check_period_domain(HodgeFiltration.from_spans(2, {1: [(1, I)]}), sp)
    assert good.ok and good.details["signatures"] == {"0,1": [1, 0, 0], "1,0": [1, 0, 0]}
    bad = check_period_domain(HodgeFiltration.from_spans(2, {1: [(1, -I)]}), sp)
    assert not bad.ok and bad.details["signatures"]["1,0"] == [0, 1, 0]
    real = check_period_domain(HodgeFiltration.from_spans(2, {1: [(1, 0)]}), sp)
    assert not real.ok and real.details["decomposition"] is False


def test_filtration_transform_and_conj():
    F = fixture("A").F
    assert F.conj().conj() == F
    assert F.conj()(1) == Subspace.span([(1, -I)], 2)
    g = Mat([[1, 0], [I, 1]])
    assert F.transform(g)(1) == Subspace.span([(1, 2 * I)], 2)
