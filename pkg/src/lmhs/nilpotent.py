"""Nilpotent cones, monodromy weight filtrations and sl2-triples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .errors import (ConeNotPure, DimensionMismatch, InputError, NonCommuting, NonUnique,
                     NoSolution, NotInLieAlgebra, NotNilpotent)
from .filtrations import PolarizedSpace, WeightFiltration, graded_piece
from .linalg import Mat, Subspace, bracket, rref
from .scalars import ONE, ZERO, to_scalar


class NilpotentCone:
    """Open cone spanned over R_{>0} by commuting nilpotent generators."""

    def __init__(self, generators: Sequence[Mat], space: PolarizedSpace | None = None,
                 labels: Sequence | None = None):
        gens = list(generators)
        if not gens:
            raise InputError("a cone needs at least one generator")
        r = gens[0].nrows
        for k, N in enumerate(gens):
            if N.shape != (r, r):
                raise DimensionMismatch(f"generator {k} has shape {N.shape}")
            if not N.is_real():
                raise InputError(f"generator {k} is not rational")
            if not N.is_nilpotent():
                raise NotNilpotent(f"generator {k} is not nilpotent")
            if space is not None and not space.in_lie_algebra(N):
                raise NotInLieAlgebra(f"generator {k} is not in the Lie algebra of Q")
        for a in range(len(gens)):
            for b in range(a + 1, len(gens)):
                if not bracket(gens[a], gens[b]).is_zero():
                    raise NonCommuting(f"generators {a} and {b} do not commute")
        self.generators = gens
        self.space = space
        self.rank = r
        self.labels = list(labels) if labels is not None else list(range(1, len(gens) + 1))

    def element(self, coeffs: Sequence) -> Mat:
        if len(coeffs) != len(self.generators):
            raise DimensionMismatch("wrong number of cone coordinates")
        out = Mat.zeros(self.rank)
        for c, N in zip(coeffs, self.generators):
            c = to_scalar(c)
            if c:
                out = out + N.scale(c)
        return out

    def barycenter(self) -> Mat:
        return self.element([ONE] * len(self.generators))

    def interior_samples(self) -> list[Mat]:
        """Barycenter followed by one sample per generator weighted by 2."""
        k = len(self.generators)
        out = [self.barycenter()]
        if k > 1:
            for i in range(k):
                out.append(self.element([2 if j == i else 1 for j in range(k)]))
            out.append(self.element([mpq(j + 1, k + 1) + j for j in range(k)]))
        return out

    def __len__(self):
        return len(self.generators)


def _check_nilpotent(N: Mat, space: PolarizedSpace | None):
    if N.nrows != N.ncols:
        raise DimensionMismatch("monodromy logarithm must be square")
    if not N.is_nilpotent():
        raise NotNilpotent("matrix is not nilpotent")
    if space is not None:
        if N.nrows != space.rank:
            raise DimensionMismatch("nilpotent and polarized space have different ranks")
        if not space.in_lie_algebra(N):
            raise NotInLieAlgebra("nilpotent is not in the Lie algebra of Q")


def jordan_chains(N: Mat) -> list[list[tuple]]:
    """Chains [v, Nv, ..., N^{j-1}v] whose union is a basis (v rational if N is)."""
    r = N.nrows
    d = N.nilpotency_index()
    K = [Subspace.zero(r)]
    P = Mat.identity(r)
    for _ in range(d):
        P = P @ N
        K.append(P.kernel())
    chains = []
    for j in range(d, 0, -1):
        S = K[j - 1] + K[j + 1].image(N) if j + 1 <= d else K[j - 1]
        for v in S.complement_in(K[j]):
            chain = [v]
            for _ in range(j - 1):
                chain.append(N @ chain[-1])
            chains.append(chain)
    return chains


def weight_filtration(N: Mat, n: int, space: PolarizedSpace | None = None) -> WeightFiltration:
    """Monodromy weight filtration W(N) centered at n."""
    _check_nilpotent(N, space)
    r = N.nrows
    if r == 0:
        raise InputError("empty space")
    vecs: dict[int, list] = {}
    for chain in jordan_chains(N):
        j = len(chain)
        for i, v in enumerate(chain):
            vecs.setdefault(n + j - 1 - 2 * i, []).append(v)
    steps = {}
    acc = []
    for l in range(min(vecs), max(vecs) + 1):
        acc += vecs.get(l, [])
        steps[l] = Subspace.span(acc, r)
    return WeightFiltration(r, steps)


def weight_filtration_kernel_image(N: Mat, n: int) -> WeightFiltration:
    """W(N) from W_{n+k} = sum_{j >= max(0,-k)} ker N^{k+j+1} cap im N^j."""
    r = N.nrows
    d = N.nilpotency_index()
    pw = [Mat.identity(r)]
    for _ in range(2 * d + 2):
        pw.append(pw[-1] @ N)
    ker = [P.kernel() for P in pw]
    im = [P.image() for P in pw]
    steps = {}
    for k in range(-d, d + 1):
        S = Subspace.zero(r)
        for j in range(max(0, -k), d + 1):
            if k + j + 1 < 0:
                continue
            S = S + (ker[min(k + j + 1, len(ker) - 1)] & im[j])
        steps[n + k] = S
    return WeightFiltration(r, steps)


def check_weight_axioms(W: WeightFiltration, N: Mat, n: int) -> dict:
    """N W_l <= W_{l-2} and N^k : Gr_{n+k} -> Gr_{n-k} an isomorphism."""
    lowering = all(W(l).image(N).issubset(W(l - 2)) for l in W.indices())
    iso = True
    for k in range(0, max(W.hi - n, n - W.lo) + 1):
        top, bot = graded_piece(W, n + k), graded_piece(W, n - k)
        if top.dim != bot.dim:
            iso = False
            break
        if not top.dim:
            continue
        Nk = N ** k
        M = bot.projection @ Mat.from_columns([Nk @ v for v in top.basis], W.n)
        if M.rank() != top.dim:
            iso = False
            break
    return {"lowering": lowering, "isomorphism": iso}


def cone_weight_filtration(cone: NilpotentCone, n: int) -> WeightFiltration:
    """W(sigma): the common W(N) over interior points of the cone."""
    samples = cone.interior_samples()
    W = weight_filtration(samples[0], n, cone.space)
    for k, N in enumerate(samples[1:], 1):
        if weight_filtration(N, n, cone.space) != W:
            raise ConeNotPure(f"W(N) differs between the barycenter and interior sample {k}")
    return W


# ---------------------------------------------------------------------------
# sl2 triples


@dataclass(frozen=True)
class Sl2Triple:
    M: Mat  # raising
    Y: Mat
    N: Mat  # lowering

    def check(self) -> dict:
        return {
            "MN": bracket(self.M, self.N) == self.Y,
            "YM": bracket(self.Y, self.M) == self.M.scale(2),
            "NY": bracket(self.N, self.Y) == self.N.scale(2),
        }

    def is_valid(self) -> bool:
        return all(self.check().values())

    def to_json(self):
        return {"M": self.M.to_json(), "Y": self.Y.to_json(), "N": self.N.to_json()}


def grading_operator(splitting) -> Mat:
    """Y acting on I^{p,q} by p + q - n."""
    P, labels = splitting.adapted_basis()
    n = splitting.weight
    D = Mat.diag([p + q - n for (p, q) in labels])
    return P @ D @ P.inverse()


def integer_eigenspaces(Y: Mat) -> dict[int, Subspace]:
    r = Y.nrows
    out = {}
    total = 0
    for lam in range(-2 * r, 2 * r + 1):
        K = (Y - Mat.identity(r).scale(lam)).kernel()
        if K.dim:
            out[lam] = K
            total += K.dim
    if total != r:
        raise NoSolution("grading is not semisimple with integer eigenvalues")
    return out


def sl2_complete(N: Mat, Y: Mat, space: PolarizedSpace | None = None,
                 splitting=None) -> Sl2Triple:
    """Solve [M, N] = Y for M raising Y-eigenvalues by 2."""
    if N.shape != Y.shape:
        raise DimensionMismatch("N and Y have different shapes")
    if bracket(N, Y) != N.scale(2):
        raise NoSolution("[N, Y] != 2N")
    eig = integer_eigenspaces(Y)
    cols, lams = [], []
    for lam, S in sorted(eig.items()):
        cols += list(S.vectors)
        lams += [lam] * S.dim
    r = Y.nrows
    P = Mat.from_columns(cols, r)
    Pinv = P.inverse()
    Np = Pinv @ N @ P
    Yp = Mat.diag(lams)
    unknowns = [(i, j) for i in range(r) for j in range(r) if lams[i] == lams[j] + 2]
    rows = []
    for a in range(r):
        for b in range(r):
            row = []
            for (i, j) in unknowns:
                c = ZERO
                if a == i:
                    c = c + Np[j, b]
                if b == j:
                    c = c - Np[a, i]
                row.append(c)
            row.append(Yp[a, b])
            rows.append(row)
    k = len(unknowns)
    R, piv = rref(rows, k + 1)
    if k in piv:
        raise NoSolution("no M with [M, N] = Y")
    if len(piv) < k:
        raise NonUnique("M is not determined by [M, N] = Y")
    sol = [ZERO] * k
    for i, pc in enumerate(piv):
        sol[pc] = R[i][k]
    Mp = [[ZERO] * r for _ in range(r)]
    for (i, j), x in zip(unknowns, sol):
        Mp[i][j] = x
    M = P @ Mat(Mp) @ Pinv
    if space is not None and not space.in_lie_algebra(M):
        raise NoSolution("solution M is not in the Lie algebra of Q")
    if splitting is not None:
        comps = splitting.components(M)
        if set(comps) - {(1, 1)}:
            raise NoSolution("solution M is not of Hodge type (1,1)")
    t = Sl2Triple(M, Y, N)
    if not t.is_valid():
        raise NoSolution("triple relations fail")
    return t


def rescale_triple(t: Sl2Triple, k) -> Sl2Triple:
    """(M/k, Y, kN), again an sl2-triple."""
    k = to_scalar(k)
    if not k:
        raise InputError("rescale factor must be nonzero")
    return Sl2Triple(t.M.scale(ONE / k), t.Y, t.N.scale(k))
