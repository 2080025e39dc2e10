import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from lmhs.errors import NonHermitian, NotNilpotent, SingularMatrix
from lmhs.fixtures import N_A, N_C
from lmhs.linalg import (Mat, Subspace, block_diag, exp_nilpotent, hermitian_signature,
                         lattice_from_generators, log_unipotent, subspace_calculus)
from lmhs.scalars import I, GaussianRational, scalar_to_json, to_scalar

import gen

rationals = st.fractions(max_denominator=6).filter(lambda q: abs(q) <= 5)
gaussians = st.builds(lambda a, b: to_scalar(a) + I * to_scalar(b), rationals, rationals)


def test_scalar_parsing():
    assert to_scalar("3/6") == mpq(1, 2)
    assert to_scalar({"re": 1, "im": "-1/2"}) == 1 - I * mpq(1, 2)
    assert to_scalar({"re": 2}) == 2 and isinstance(to_scalar({"re": 2}), type(mpq(2)))
    assert to_scalar(2j) == 2 * I
    assert to_scalar("1.5") == mpq(3, 2)
    for bad in (0.5, True, "1/0x", {"x": 1}):
        with pytest.raises((TypeError, ValueError)):
            to_scalar(bad)


def test_scalar_json():
    assert scalar_to_json(mpq(4, 2)) == "2"
    assert scalar_to_json(mpq(-1, 3) + 2 * I) == {"re": "-1/3", "im": "2"}
    assert scalar_to_json(I * I) == "-1"


@given(gaussians, gaussians)
def test_gaussian_field_axioms(a, b):
    assert (a + b) - b == a
    if b:
        assert (a / b) * b == a
    assert (a * b).conjugate() == a.conjugate() * b.conjugate() if isinstance(a * b, GaussianRational) \
        else True


def test_kernel_of_zero_is_everything():
    assert subspace_calculus("kernel", Mat.zeros(2)) == Subspace.full(2)


def test_image_of_N_A():
    assert subspace_calculus("image", N_A) == Subspace.span([(0, 1)], 2)


def test_intersection_trivial():
    a = Subspace.span([(1, I)], 2)
    b = Subspace.span([(0, 1)], 2)
    assert subspace_calculus("intersect", a, b).dim == 0
    assert (a + b).dim == 2


def test_preimage_and_sum():
    U = Subspace.span([(0, 1)], 2)
    assert U.preimage(N_A) == Subspace.full(2)
    assert Subspace.zero(2).preimage(N_A) == U


@pytest.mark.parametrize("H,sig", [
    (Mat.identity(3), (3, 0, 0)),
    (Mat.diag([1, -1]), (1, 1, 0)),
    (Mat([[0, -I], [I, 0]]), (1, 1, 0)),
    (Mat([[0, 1], [1, 0]]), (1, 1, 0)),
    (Mat([[1, 1], [1, 1]]), (1, 0, 1)),
    (Mat.zeros(2), (0, 0, 2)),
])
def test_hermitian_signature(H, sig):
    assert hermitian_signature(H) == sig


def test_hermitian_signature_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        hermitian_signature(Mat([[0, 1], [2, 0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_signature_is_congruence_invariant(seed):
    rng = random.Random(seed)
    r = rng.randint(1, 5)
    A = Mat([[gen.gaussian(rng) for _ in range(r)] for _ in range(r)])
    H = A + A.H
    P = Mat([[gen.gaussian(rng) for _ in range(r)] for _ in range(r)])
    if P.rank() < r:
        return
    assert hermitian_signature(P.H @ H @ P) == hermitian_signature(H)
    pos, neg, zero = hermitian_signature(H)
    assert zero == r - H.rank()
    assert hermitian_signature(-H) == (neg, pos, zero)


def test_exp_log():
    assert exp_nilpotent(Mat.zeros(3)) == Mat.identity(3)
    assert exp_nilpotent(N_A) == Mat([[1, 0], [1, 1]])
    assert log_unipotent(Mat([[1, 0], [1, 1]])) == N_A
    E = exp_nilpotent(N_C)
    assert E == Mat([[1, 0, 0], [1, 1, 0], [mpq(1, 2), 1, 1]])
    assert log_unipotent(E) == N_C


def test_exp_requires_nilpotent():
    with pytest.raises(NotNilpotent):
        exp_nilpotent(Mat.identity(2))
    with pytest.raises(NotNilpotent):
        log_unipotent(Mat.diag([2, 1]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_exp_log_round_trip(seed):
    rng = random.Random(seed)
    r, w = gen.rank_weight(rng, 2, 7)
    N = gen.random_nilpotent(rng, r, w, conjugate=rng.random() < 0.5)
    assert log_unipotent(exp_nilpotent(N)) == N
    assert exp_nilpotent(N) @ exp_nilpotent(-N) == Mat.identity(r)


def test_inverse_and_solve():
    A = Mat([[1, 2], [3, 4]])
    assert A @ A.inverse() == Mat.identity(2)
    with pytest.raises(SingularMatrix):
        Mat([[1, 2], [2, 4]]).inverse()
    assert Mat([[1, 2], [2, 4]]).solve(Mat([[1], [0]])) is None


def test_lattices():
    std = lattice_from_generators([(1, 0), (0, 1)])
    assert std.rank == 2 and std.denominator == 1
    L = lattice_from_generators([(2, 0), (3, 0)])
    assert [list(b) for b in L.basis] == [[1, 0]]
    H = lattice_from_generators([("1/2", 0), (0, 1)])
    assert H.denominator == 2
    assert [list(b) for b in H.basis] == [[mpq(1, 2), 0], [0, 1]]
    assert H.contains((mpq(3, 2), 5)) and not H.contains((mpq(1, 3), 0))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=5),
       st.integers(1, 4))
def test_lattice_contains_generators(rows, den):
    vecs = [[mpq(x, den) for x in v] for v in rows]
    L = lattice_from_generators(vecs)
    assert all(L.contains(v) for v in vecs)
    assert L.rank == Mat(vecs).rank()
    assert lattice_from_generators(list(L.basis), 3) == L


def test_block_diag():
    B = block_diag(N_A, Mat.identity(1))
    assert B.shape == (3, 3) and B[1, 0] == 1 and B[2, 2] == 1
