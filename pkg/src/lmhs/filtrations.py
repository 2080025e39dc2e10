"""Polarized spaces, weight and Hodge filtrations, graded pieces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import DimensionMismatch, InputError
from .linalg import Mat, Subspace, hermitian_signature, sum_all
from .scalars import ZERO, conj, i_power


class PolarizedSpace:
    """Q-vector space of dimension ``rank`` with a nondegenerate
    (-1)^weight-symmetric form ``Q``."""

    def __init__(self, rank: int, weight: int, Q: Mat):
        if Q.shape != (rank, rank):
            raise DimensionMismatch(f"form has shape {Q.shape}, expected {(rank, rank)}")
        if not Q.is_real():
            raise InputError("polarization must be rational")
        sign = -1 if weight % 2 else 1
        if Q.T != Q.scale(sign):
            kind = "antisymmetric" if sign < 0 else "symmetric"
            raise InputError(f"polarization must be {kind} for weight {weight}")
        if Q.rank() != rank:
            raise InputError("polarization is degenerate")
        if weight < 0:
            raise InputError("weight must be non-negative")
        self.rank = rank
        self.weight = weight
        self.Q = Q
        self._lie = None

    def form(self, u: Sequence, v: Sequence):
        return _bilinear(u, self.Q, v)

    def in_lie_algebra(self, X: Mat) -> bool:
        return (X.T @ self.Q + self.Q @ X).is_zero()

    def in_group(self, g: Mat) -> bool:
        return g.T @ self.Q @ g == self.Q

    def lie_basis(self) -> list[Mat]:
        if self._lie is None:
            from .lie import g_algebra
            self._lie = g_algebra(self)
        return self._lie

    def __eq__(self, other):
        if not isinstance(other, PolarizedSpace):
            return NotImplemented
        return (self.rank, self.weight, self.Q) == (other.rank, other.weight, other.Q)

    def __hash__(self):
        return hash((self.rank, self.weight, self.Q))

    def __repr__(self):
        return f"PolarizedSpace(rank={self.rank}, weight={self.weight})"


def _bilinear(u, Q: Mat, v):
    t = ZERO
    for i, a in enumerate(u):
        if a:
            row = Q.rows[i]
            for j, b in enumerate(v):
                if b and row[j]:
                    t = t + a * row[j] * b
    return t


def gram(space: PolarizedSpace, U: Sequence[Sequence], V: Sequence[Sequence]) -> Mat:
    """Matrix Q(u_a, v_b)."""
    if not U or not V:
        return Mat.zeros(len(U), len(V))
    return Mat.from_columns(U, space.rank).T @ space.Q @ Mat.from_columns(V, space.rank)


class WeightFiltration:
    """Increasing filtration W_l of an n-dimensional space.

    Stored canonically: ``lo`` is the first index with W_lo != 0 and ``hi``
    the first index with W_hi equal to the whole space. Indices below ``lo``
    give 0 and indices above ``hi`` give everything.
    """

    __slots__ = ("n", "lo", "hi", "steps")

    def __init__(self, n: int, steps: Mapping[int, Subspace], require_rational: bool = False):
        if not steps:
            raise InputError("empty filtration")
        full = Subspace.full(n)
        keys = sorted(steps)
        prev = None
        for k in keys:
            S = steps[k]
            if S.n != n:
                raise DimensionMismatch(f"W_{k} lives in dimension {S.n}, expected {n}")
            if prev is not None and not prev.issubset(S):
                raise InputError(f"weight filtration is not increasing at {k}")
            if require_rational and not S.is_real():
                raise InputError(f"W_{k} is not defined over Q")
            prev = S
        if steps[keys[-1]] != full:
            raise InputError("weight filtration does not exhaust the space")
        lo = next((k for k in keys if steps[k].dim), keys[-1])
        # indices between given keys inherit the previous step
        table = {}
        cur = Subspace.zero(n)
        for k in range(keys[0], keys[-1] + 1):
            if k in steps:
                cur = steps[k]
            table[k] = cur
        hi = next(k for k in range(keys[0], keys[-1] + 1) if table[k].dim == n)
        self.n = n
        self.lo = lo
        self.hi = hi
        self.steps = tuple(table[k] for k in range(lo, hi + 1))

    def __call__(self, l: int) -> Subspace:
        if l < self.lo:
            return Subspace.zero(self.n)
        if l > self.hi:
            return Subspace.full(self.n)
        return self.steps[l - self.lo]

    def indices(self) -> range:
        return range(self.lo, self.hi + 1)

    def gr_dim(self, l: int) -> int:
        return self(l).dim - self(l - 1).dim

    def weights(self) -> list[int]:
        """Indices with nonzero graded piece."""
        return [l for l in self.indices() if self.gr_dim(l)]

    def __eq__(self, other):
        if not isinstance(other, WeightFiltration):
            return NotImplemented
        return (self.n, self.lo, self.hi, self.steps) == (other.n, other.lo, other.hi, other.steps)

    def __hash__(self):
        return hash((self.n, self.lo, self.hi, self.steps))

    def __repr__(self):
        dims = {l: self(l).dim for l in self.indices()}
        return f"WeightFiltration(n={self.n}, dims={dims})"

    def to_json(self):
        return {str(l): self(l).to_json() for l in self.indices()}


class HodgeFiltration:
    """Decreasing filtration F^p of an n-dimensional complex space.

    ``lo`` is the largest index with F^lo the whole space, ``hi`` the
    largest index with F^hi != 0.
    """

    __slots__ = ("n", "lo", "hi", "steps")

    def __init__(self, n: int, steps: Mapping[int, Subspace]):
        if not steps:
            raise InputError("empty filtration")
        keys = sorted(steps)
        for k in keys:
            if steps[k].n != n:
                raise DimensionMismatch(f"F^{k} lives in dimension {steps[k].n}, expected {n}")
        for a, b in zip(keys, keys[1:]):
            if not steps[b].issubset(steps[a]):
                raise InputError(f"Hodge filtration is not decreasing at {b}")
        full = Subspace.full(n)
        table = {}
        # indices below the first key are the whole space; gaps inherit downward
        for k in range(keys[0], keys[-1] + 1):
            nxt = next(j for j in keys if j >= k)
            table[k] = steps[nxt]
        table[keys[0] - 1] = full
        lo = max(k for k, S in table.items() if S.dim == n)
        nonzero = [k for k, S in table.items() if S.dim]
        hi = max(nonzero)
        self.n = n
        self.lo = lo
        self.hi = hi
        self.steps = tuple(table[k] for k in range(lo, hi + 1))

    @classmethod
    def from_spans(cls, n: int, spans: Mapping[int, Sequence[Sequence]]) -> "HodgeFiltration":
        return cls(n, {int(p): Subspace.span(v, n) for p, v in spans.items()})

    def __call__(self, p: int) -> Subspace:
        if p <= self.lo:
            return Subspace.full(self.n)
        if p > self.hi:
            return Subspace.zero(self.n)
        return self.steps[p - self.lo]

    def indices(self) -> range:
        return range(self.lo, self.hi + 1)

    def hodge_numbers(self) -> dict[int, int]:
        return {p: self(p).dim - self(p + 1).dim for p in self.indices()
                if self(p).dim - self(p + 1).dim}

    def conj(self) -> "HodgeFiltration":
        return HodgeFiltration(self.n, {p: self(p).conj() for p in self.indices()})

    def transform(self, g: Mat) -> "HodgeFiltration":
        """g . F."""
        return HodgeFiltration(self.n, {p: self(p).image(g) for p in self.indices()})

    def __eq__(self, other):
        if not isinstance(other, HodgeFiltration):
            return NotImplemented
        return (self.n, self.lo, self.hi, self.steps) == (other.n, other.lo, other.hi, other.steps)

    def __hash__(self):
        return hash((self.n, self.lo, self.hi, self.steps))

    def __repr__(self):
        return f"HodgeFiltration(n={self.n}, dims={ {p: self(p).dim for p in self.indices()} })"

    def to_json(self):
        return {str(p): self(p).to_json() for p in self.indices()}


def validate_hodge(F: HodgeFiltration, space: PolarizedSpace) -> None:
    if F.n != space.rank:
        raise DimensionMismatch("Hodge filtration and space have different dimensions")
    if F.lo < 0 or F.hi > space.weight:
        raise InputError(f"Hodge filtration indices [{F.lo}, {F.hi}] leave [0, {space.weight}]")


# ---------------------------------------------------------------------------
# graded pieces and adapted bases


@dataclass
class GradedPiece:
    weight: int
    basis: list  # complement of W_{l-1} inside W_l
    projection: Mat  # V -> coordinates on Gr_l (kills W_{l-1} and a complement of W_l)

    @property
    def dim(self) -> int:
        return len(self.basis)


def graded_piece(W: WeightFiltration, l: int) -> GradedPiece:
    lower, upper = W(l - 1), W(l)
    comp = lower.complement_in(upper)
    rest = upper.complement_in(Subspace.full(W.n))
    cols = list(lower.vectors) + comp + rest
    if not comp:
        return GradedPiece(l, [], Mat.zeros(0, W.n) if W.n else Mat.zeros(0, 0))
    P = Mat.from_columns(cols, W.n)
    Pinv = P.inverse()
    a = lower.dim
    proj = Mat._raw(Pinv.rows[a:a + len(comp)], W.n)
    return GradedPiece(l, comp, proj)


def weight_adapted_basis(W: WeightFiltration) -> tuple[Mat, list[int]]:
    """Basis whose first vectors span W_lo, then W_{lo+1}, ...; with weights."""
    cols, wts = [], []
    for l in W.indices():
        comp = W(l - 1).complement_in(W(l))
        cols += comp
        wts += [l] * len(comp)
    return Mat.from_columns(cols, W.n), wts


def hodge_adapted_basis(F: HodgeFiltration) -> tuple[Mat, list[int]]:
    """Basis adapted to F with the Hodge degree of each vector."""
    cols, degs = [], []
    for p in reversed(F.indices()):
        comp = F(p + 1).complement_in(F(p))
        cols += comp
        degs += [p] * len(comp)
    return Mat.from_columns(cols, F.n), degs


def _outer_span(P: Mat, labels: list[int], keep) -> Subspace:
    n = P.nrows
    Pinv = P.inverse()
    vecs = []
    for i in range(n):
        ci = P.col(i)
        for j in range(n):
            if keep(labels[i], labels[j]):
                rj = Pinv.rows[j]
                vecs.append([a * b if a and b else ZERO for a in ci for b in rj])
    return Subspace.span(vecs, n * n)


def induced_end_filtration(W: WeightFiltration, F: HodgeFiltration):
    """Filtrations induced on End(V) (matrices flattened row-major).

    W_l End = {X : X W_k <= W_{k+l}}, F^p End = {X : X F^k <= F^{k+p}}.
    """
    if W.n != F.n:
        raise DimensionMismatch("filtrations live on different spaces")
    n = W.n
    PW, wts = weight_adapted_basis(W)
    span_w = max(wts) - min(wts)
    Wend = {l: _outer_span(PW, wts, lambda a, b, l=l: a - b <= l)
            for l in range(-span_w, span_w + 1)}
    PF, degs = hodge_adapted_basis(F)
    span_f = max(degs) - min(degs)
    Fend = {p: _outer_span(PF, degs, lambda a, b, p=p: a - b >= p)
            for p in range(-span_f, span_f + 1)}
    return WeightFiltration(n * n, Wend), HodgeFiltration(n * n, Fend)


# ---------------------------------------------------------------------------
# compact dual and period domain


@dataclass
class CheckResult:
    ok: bool
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def check_compact_dual(F: HodgeFiltration, space: PolarizedSpace) -> CheckResult:
    """Q(F^p, F^q) = 0 whenever p + q > n."""
    validate_hodge(F, space)
    n = space.weight
    bad = []
    for p in F.indices():
        q = n - p + 1
        A, B = F(p), F(q)
        if A.dim and B.dim and not gram(space, A.vectors, B.vectors).is_zero():
            bad.append([p, q])
    return CheckResult(not bad, {"violations": bad})


def hodge_decomposition(F: HodgeFiltration, n: int) -> dict[tuple[int, int], Subspace]:
    Fc = F.conj()
    return {(p, n - p): F(p) & Fc(n - p) for p in range(0, n + 1)}


def check_period_domain(F: HodgeFiltration, space: PolarizedSpace) -> CheckResult:
    """Compact dual membership plus the positivity i^{p-q} Q(v, conj v) > 0."""
    cd = check_compact_dual(F, space)
    details = {"compact_dual": cd.ok, "violations": cd.details["violations"]}
    if not cd.ok:
        return CheckResult(False, details)
    n = space.weight
    H = hodge_decomposition(F, n)
    total = sum(S.dim for S in H.values())
    details["hodge_dims"] = {f"{p},{q}": S.dim for (p, q), S in sorted(H.items())}
    if total != space.rank or sum_all(H.values(), space.rank).dim != space.rank:
        details["decomposition"] = False
        return CheckResult(False, details)
    details["decomposition"] = True
    sigs = {}
    ok = True
    for (p, q), S in sorted(H.items()):
        if not S.dim:
            continue
        vs = list(S.vectors)
        G = gram(space, vs, [[conj(x) for x in v] for v in vs]).scale(i_power(p - q))
        sig = hermitian_signature(G)
        sigs[f"{p},{q}"] = list(sig)
        ok = ok and sig == (S.dim, 0, 0)
    details["signatures"] = sigs
    return CheckResult(ok, details)
