"""The Lie algebra of a polarization and its boundary decompositions.

Lie subalgebras of gl(V) are handled as :class:`Subspace` objects on
row-major flattened matrices; :func:`as_mats` turns them back into bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from gmpy2 import mpq

from .errors import (DimensionMismatch, InputError, NotInCell, NotInCI, NotInLieAlgebra,
                     NotUnipotentResidue, NotNilpotent, NotRational, XNotCentral)
from .filtrations import HodgeFiltration, PolarizedSpace, WeightFiltration, weight_adapted_basis
from .linalg import Mat, Subspace, bracket, exp_nilpotent, log_unipotent
from .mhs import DeligneSplitting, deligne_splitting
from .nilpotent import NilpotentCone, Sl2Triple, cone_weight_filtration, grading_operator, \
    integer_eigenspaces, rescale_triple
from .scalars import ONE, ZERO, denominator, is_real


def as_mats(S: Subspace, r: int) -> list[Mat]:
    return [Mat.from_flat(v, r) for v in S.vectors]


def lie_span(mats: Sequence[Mat], r: int) -> Subspace:
    return Subspace.span([m.flat() for m in mats], r * r)


def g_algebra(space: PolarizedSpace) -> list[Mat]:
    """Basis of g = {X : X^T Q + Q X = 0}."""
    r = space.rank
    Q = space.Q.rows
    eqs = []
    for i in range(r):
        for j in range(i, r):
            row = [ZERO] * (r * r)
            for k in range(r):
                if Q[k][j]:
                    row[k * r + i] = row[k * r + i] + Q[k][j]
                if Q[i][k]:
                    row[k * r + j] = row[k * r + j] + Q[i][k]
            eqs.append(row)
    return as_mats(Mat(eqs, r * r).kernel(), r)


def trace_form(a: Mat, b: Mat):
    """Q(a, b) = tr(ab), the invariant form used throughout."""
    if a.shape != b.shape:
        raise DimensionMismatch("trace form of matrices of different shapes")
    t = ZERO
    for i, row in enumerate(a.rows):
        for j, x in enumerate(row):
            if x:
                y = b.rows[j][i]
                if y:
                    t = t + x * y
    return t


def _solve_combinations(basis: Sequence[Mat], constraint) -> list[Mat]:
    """Combinations sum c_k B_k whose image under the linear ``constraint``
    (a map Mat -> tuple) vanishes."""
    if not basis:
        return []
    images = [constraint(B) for B in basis]
    if not images[0]:
        return list(basis)
    A = Mat.from_columns(images, len(images[0]))
    K = A.kernel()
    r = basis[0].nrows
    out = []
    for c in K.vectors:
        M = Mat.zeros(r)
        for ck, B in zip(c, basis):
            if ck:
                M = M + B.scale(ck)
        out.append(M)
    return as_mats(lie_span(out, r), r)


def centralizer(cone: NilpotentCone, space: PolarizedSpace) -> list[Mat]:
    """Basis of c = {X in g : [X, N_i] = 0 for all i}."""
    gens = cone.generators
    return _solve_combinations(space.lie_basis(),
                               lambda B: tuple(x for N in gens for x in bracket(B, N).flat()))


class _WeightLevel:
    """Membership test for W_l(gl) in a W-adapted basis."""

    def __init__(self, W: WeightFiltration):
        P, wts = weight_adapted_basis(W)
        self.P, self.Pinv, self.wts = P, P.inverse(), wts

    def forbidden(self, X: Mat, l: int) -> tuple:
        Xp = self.Pinv @ X @ self.P
        w = self.wts
        n = len(w)
        return tuple(Xp[i, j] for i in range(n) for j in range(n) if w[i] - w[j] > l)

    def contains(self, X: Mat, l: int) -> bool:
        return not any(self.forbidden(X, l))


def c_filtration(cone: NilpotentCone, W: WeightFiltration, a: int,
                 space: PolarizedSpace, c_basis: Sequence[Mat] | None = None) -> list[Mat]:
    """c^{-a} = c cap W_{-a}(g)."""
    cb = centralizer(cone, space) if c_basis is None else list(c_basis)
    lvl = _WeightLevel(W)
    return _solve_combinations(cb, lambda B: lvl.forbidden(B, -a))


# ---------------------------------------------------------------------------
# Levi decomposition and normalization


def levi_decompose(gamma: Mat, Y: Mat, cone: NilpotentCone | None = None):
    """gamma = alpha exp(b) with alpha commuting with Y and b nilpotent.

    alpha is the Y-block-diagonal part of gamma.
    """
    r = gamma.nrows
    if gamma.shape != Y.shape:
        raise DimensionMismatch("gamma and Y have different shapes")
    if cone is not None:
        for N in cone.generators:
            if gamma @ N != N @ gamma:
                raise NotInCI("gamma does not centralize the cone")
    eig = integer_eigenspaces(Y)
    cols, lams = [], []
    for lam, S in sorted(eig.items()):
        cols += list(S.vectors)
        lams += [lam] * S.dim
    P = Mat.from_columns(cols, r)
    Pinv = P.inverse()
    gp = Pinv @ gamma @ P
    ap = Mat([[gp[i, j] if lams[i] == lams[j] else ZERO for j in range(r)] for i in range(r)])
    try:
        alpha = P @ ap @ Pinv
        u = alpha.inverse() @ gamma
    except Exception as e:  # singular diagonal block
        raise NotUnipotentResidue(f"Levi part is singular: {e}") from None
    try:
        b = log_unipotent(u)
    except NotNilpotent:
        raise NotUnipotentResidue("alpha^{-1} gamma is not unipotent") from None
    if alpha @ Y != Y @ alpha:
        raise NotUnipotentResidue("Levi part does not commute with Y")
    if alpha @ exp_nilpotent(b) != gamma:
        raise NotUnipotentResidue("factorization does not reproduce gamma")
    return alpha, b


def normalize_M(t: Sl2Triple, bs: Sequence[Mat]):
    """Smallest k > 0 with Q(kM, b) integral for all b; returns (k, rescaled triple).

    The rescaled triple is (kM, Y, N/k).
    """
    k = 1
    for b in bs:
        v = trace_form(t.M, b)
        if not is_real(v):
            raise NotRational("Q(M, b) is not rational")
        import gmpy2
        k = int(gmpy2.lcm(k, denominator(v)))
    return k, rescale_triple(t, mpq(1, k))


# ---------------------------------------------------------------------------
# Schubert coordinates


def _graph_lift(E: HodgeFiltration, s: DeligneSplitting):
    """Unipotent U, block lower triangular for the p-grading, with U F = E."""
    r = s.n
    grading = s.p_grading()
    ps = sorted(grading, reverse=True)
    cols, pl = [], []
    for p in ps:
        cols += list(grading[p].vectors)
        pl += [p] * grading[p].dim
    P = Mat.from_columns(cols, r)
    Pinv = P.inverse()
    U = [[ZERO] * r for _ in range(r)]
    for b in ps:
        top = [i for i in range(r) if pl[i] >= b]
        low = [i for i in range(r) if pl[i] < b]
        Eb = E(b)
        if Eb.dim != len(top):
            raise NotInCell(f"dim E^{b} = {Eb.dim} differs from dim F^{b} = {len(top)}")
        coords = [Pinv @ v for v in Eb.vectors]
        T = Mat([[c[i] for c in coords] for i in top], len(coords)) if coords else None
        if T is None:
            continue
        if T.rank() != len(top):
            raise NotInCell(f"E^{b} meets the opposite cell subspace")
        Tinv = T.inverse()
        L = Mat([[c[i] for c in coords] for i in low], len(coords)) if low else None
        LT = L @ Tinv if L is not None else None
        for jj, j in enumerate(top):
            if pl[j] != b:
                continue
            U[j][j] = ONE
            if LT is not None:
                for ii, i in enumerate(low):
                    U[i][j] = LT[ii, jj]
    return P @ Mat(U) @ Pinv


def schubert_coordinate(E: HodgeFiltration, F: HodgeFiltration, s: DeligneSplitting,
                        space: PolarizedSpace | None = None) -> Mat:
    """The unique x in f-perp with exp(x) F = E."""
    if E.n != s.n or F.n != s.n:
        raise DimensionMismatch("filtration and splitting live on different spaces")
    U = _graph_lift(E, s)
    x = log_unipotent(U)
    if F.transform(exp_nilpotent(x)) != E:
        raise NotInCell("E is not in the open cell of F")
    comps = s.components(x)
    if any(p >= 0 for p, _ in comps):
        raise NotInCell("coordinate is not in f-perp")
    if space is not None and not space.in_lie_algebra(x):
        raise NotInCell("E is not in the compact dual")
    return x


def orbit_point(z: Sequence, cone: NilpotentCone, F: HodgeFiltration) -> HodgeFiltration:
    """exp(sum z_j N_j) . F."""
    return F.transform(exp_nilpotent(cone.element(z)))


# ---------------------------------------------------------------------------
# precomputed boundary data


class BoundaryLieData:
    """Read-only cache of the Lie-theoretic data attached to (space, cone, F)."""

    def __init__(self, space: PolarizedSpace, cone: NilpotentCone, F: HodgeFiltration):
        self.space = space
        self.cone = cone
        self.F = F
        self.r = space.rank
        self.n = space.weight
        self.W = cone_weight_filtration(cone, self.n)
        self.splitting = deligne_splitting(self.W, F, self.n)

    @cached_property
    def Y(self) -> Mat:
        return grading_operator(self.splitting)

    @cached_property
    def g(self) -> list[Mat]:
        return self.space.lie_basis()

    @cached_property
    def c(self) -> list[Mat]:
        return centralizer(self.cone, self.space)

    def c_level(self, a: int) -> list[Mat]:
        return self._c_levels(a)

    def _c_levels(self, a):
        cache = self.__dict__.setdefault("_cl", {})
        if a not in cache:
            cache[a] = c_filtration(self.cone, self.W, a, self.space, self.c)
        return cache[a]

    def components(self, X: Mat) -> dict:
        return self.splitting.components(X)

    def _graded(self, basis: Sequence[Mat]) -> dict[tuple[int, int], list[Mat]]:
        parts: dict = {}
        for B in basis:
            for pq, C in self.components(B).items():
                parts.setdefault(pq, []).append(C)
        out = {pq: as_mats(lie_span(v, self.r), self.r) for pq, v in sorted(parts.items())}
        if sum(len(v) for v in out.values()) != len(basis):
            raise InputError("subalgebra is not graded by the splitting")
        return out

    @cached_property
    def gpq(self) -> dict[tuple[int, int], list[Mat]]:
        out = self._graded(self.g)
        for v in out.values():
            for X in v:
                if not self.space.in_lie_algebra(X):
                    raise NotInLieAlgebra("splitting is not compatible with Q")
        return out

    @cached_property
    def cpq(self) -> dict[tuple[int, int], list[Mat]]:
        return self._graded(self.c)

    def c_minus1_perp(self) -> list[Mat]:
        """Basis of c^{-1} cap f-perp."""
        return [X for (p, q), v in self.cpq.items() if p < 0 and p + q <= -1 for X in v]

    def f_part(self, X: Mat) -> Mat:
        out = Mat.zeros(self.r)
        for (p, _), C in self.components(X).items():
            if p >= 0:
                out = out + C
        return out

    def f_perp_part(self, X: Mat) -> Mat:
        return X - self.f_part(X)

    def E_part(self, X: Mat, a: int) -> Mat:
        """Projection to E(a) = sum_{p+q=a} g^{p,q}."""
        out = Mat.zeros(self.r)
        for (p, q), C in self.components(X).items():
            if p + q == a:
                out = out + C
        return out

    def component(self, X: Mat, pq) -> Mat:
        return self.components(X).get(tuple(pq), Mat.zeros(self.r))

    def lam(self, E: HodgeFiltration) -> Mat:
        return schubert_coordinate(E, self.F, self.splitting, self.space)

    def in_c(self, X: Mat) -> bool:
        return self.space.in_lie_algebra(X) and all(
            bracket(X, N).is_zero() for N in self.cone.generators)

    def in_c_level(self, X: Mat, a: int) -> bool:
        return self.in_c(X) and _WeightLevel(self.W).contains(X, -a)


def schubert_quotient_coordinate(E: HodgeFiltration, data: BoundaryLieData, k: int) -> dict:
    """Components x^{p,q} (p < 0, -k <= p+q <= 0) of lambda(E) in bases of c^{p,q}."""
    x = data.lam(E)
    if not all(bracket(x, N).is_zero() for N in data.cone.generators):
        raise XNotCentral("coordinate does not centralize the cone")
    out = {}
    for (p, q), C in data.components(x).items():
        if p < 0 and -k <= p + q <= 0:
            basis = data.cpq.get((p, q), [])
            S = lie_span(basis, data.r)
            out[(p, q)] = S.coordinates(C.flat()) if basis else ()
    return out


# ---------------------------------------------------------------------------
# fiber coordinates


@dataclass
class FiberPoint:
    g: Mat
    x: Mat


@dataclass
class FiberSolution:
    y: Mat
    y1_holds: bool
    y11_holds: bool
    y11_corrected_holds: bool

    def to_json(self):
        return {"y": self.y.to_json(), "y1_holds": self.y1_holds,
                "y11_holds": self.y11_holds, "y11_corrected_holds": self.y11_corrected_holds}


def y11_closed_form(b: Mat, x: Mat, data: BoundaryLieData) -> Mat:
    return data.component(x + b + bracket(b, x).scale(mpq(1, 2)), (-1, -1))


def y11_corrected(b: Mat, x: Mat, data: BoundaryLieData) -> Mat:
    """Closed form including the term from moving the f-part of b across."""
    z1 = data.E_part(b + x, -1)
    corr = bracket(data.f_perp_part(z1), data.f_part(z1)).scale(mpq(1, 2))
    return y11_closed_form(b, x, data) - data.component(corr, (-1, -1))


def fiber_solve(b: Mat, x: Mat, data: BoundaryLieData) -> FiberSolution:
    """y in c^{-1} cap f-perp with exp(b) exp(x) F = exp(y) F."""
    if not data.in_c_level(b, 1):
        raise InputError("b is not in c^{-1}")
    if not data.in_c_level(x, 1) or not data.f_part(x).is_zero():
        raise InputError("x is not in c^{-1} cap f-perp")
    E = data.F.transform(exp_nilpotent(b) @ exp_nilpotent(x))
    y = data.lam(E)
    y1 = all(data.component(y, (-p, p - 1)) == data.component(x, (-p, p - 1))
             + data.component(b, (-p, p - 1)) for p in range(1, data.n + 2))
    y11 = data.component(y, (-1, -1)) == y11_closed_form(b, x, data)
    y11c = data.component(y, (-1, -1)) == y11_corrected(b, x, data)
    return FiberSolution(y, y1, y11, y11c)


__all__ = [
    "as_mats", "lie_span", "g_algebra", "trace_form", "centralizer", "c_filtration",
    "levi_decompose", "normalize_M", "schubert_coordinate", "schubert_quotient_coordinate",
    "orbit_point", "BoundaryLieData", "FiberPoint", "FiberSolution", "fiber_solve",
    "y11_closed_form", "y11_corrected",
]
