"""Exact linear algebra over Q and Q(i): matrices, subspaces, lattices."""

from __future__ import annotations

from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq

from .errors import DimensionMismatch, InputError, NotNilpotent, SingularMatrix
from .scalars import (ONE, ZERO, GaussianRational, conj, denominator, is_real,
                      scalar_to_json, to_scalar)

# ---------------------------------------------------------------------------
# row reduction on plain lists


def rref(rows: Sequence[Sequence], ncols: int):
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    A = [list(r) for r in rows]
    nrows = len(A)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if A[i][c]:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        row = A[r]
        p = row[c]
        if p != 1:
            inv = ONE / p
            row = [x * inv if x else ZERO for x in row]
            A[r] = row
        for i in range(nrows):
            if i == r:
                continue
            f = A[i][c]
            if f:
                Ai = A[i]
                A[i] = [a - f * b if b else a for a, b in zip(Ai, row)]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def _kernel_vectors(rows: Sequence[Sequence], ncols: int) -> list[list]:
    R, pivots = rref(rows, ncols)
    pivset = set(pivots)
    out = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [ZERO] * ncols
        v[f] = ONE
        for i, pc in enumerate(pivots):
            x = R[i][f]
            if x:
                v[pc] = -x
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# matrices


class Mat:
    """Immutable dense matrix with exact entries."""

    __slots__ = ("rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rs = tuple(tuple(to_scalar(x) for x in r) for r in rows)
        if ncols is None:
            if not rs:
                raise DimensionMismatch("cannot infer column count of an empty matrix")
            ncols = len(rs[0])
        for r in rs:
            if len(r) != ncols:
                raise DimensionMismatch("ragged matrix rows")
        self.rows = rs
        self.nrows = len(rs)
        self.ncols = ncols
        self._hash = None

    @classmethod
    def _raw(cls, rows, ncols):
        m = cls.__new__(cls)
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        m._hash = None
        return m

    # constructors ---------------------------------------------------------
    @classmethod
    def zeros(cls, m: int, n: int | None = None) -> "Mat":
        n = m if n is None else n
        return cls._raw(tuple((ZERO,) * n for _ in range(m)), n)

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls._raw(tuple(tuple(ONE if i == j else ZERO for j in range(n))
                              for i in range(n)), n)

    @classmethod
    def diag(cls, entries: Sequence) -> "Mat":
        n = len(entries)
        e = [to_scalar(x) for x in entries]
        return cls._raw(tuple(tuple(e[i] if i == j else ZERO for j in range(n))
                              for i in range(n)), n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int | None = None) -> "Mat":
        cols = [tuple(to_scalar(x) for x in c) for c in cols]
        if not cols:
            if nrows is None:
                raise DimensionMismatch("need nrows for an empty column list")
            return cls._raw(tuple(() for _ in range(nrows)), 0)
        m = len(cols[0])
        return cls._raw(tuple(tuple(c[i] for c in cols) for i in range(m)), len(cols))

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> "Mat":
        return cls._raw(tuple(tuple(ONE if (a, b) == (i, j) else ZERO for b in range(n))
                              for a in range(n)), n)

    @classmethod
    def from_flat(cls, vec: Sequence, n: int) -> "Mat":
        return cls._raw(tuple(tuple(vec[i * n:(i + 1) * n]) for i in range(n)), n)

    # access ---------------------------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.ncols)]

    def flat(self) -> tuple:
        return tuple(x for r in self.rows for x in r)

    # algebra --------------------------------------------------------------
    def __add__(self, other: "Mat") -> "Mat":
        self._same_shape(other)
        return Mat._raw(tuple(tuple(a + b for a, b in zip(r, s))
                              for r, s in zip(self.rows, other.rows)), self.ncols)

    def __sub__(self, other: "Mat") -> "Mat":
        self._same_shape(other)
        return Mat._raw(tuple(tuple(a - b for a, b in zip(r, s))
                              for r, s in zip(self.rows, other.rows)), self.ncols)

    def __neg__(self) -> "Mat":
        return Mat._raw(tuple(tuple(-a for a in r) for r in self.rows), self.ncols)

    def scale(self, c) -> "Mat":
        c = to_scalar(c)
        return Mat._raw(tuple(tuple(c * a if a else ZERO for a in r) for r in self.rows),
                        self.ncols)

    def __mul__(self, c):
        if isinstance(c, Mat):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Mat):
            if self.ncols != other.nrows:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            ocols = other.rows
            n = other.ncols
            out = []
            for r in self.rows:
                acc = [ZERO] * n
                for k, a in enumerate(r):
                    if a:
                        orow = ocols[k]
                        for j in range(n):
                            b = orow[j]
                            if b:
                                acc[j] = acc[j] + a * b
                out.append(tuple(acc))
            return Mat._raw(tuple(out), n)
        v = tuple(other)
        if len(v) != self.ncols:
            raise DimensionMismatch("vector length does not match matrix")
        return tuple(_dot(r, v) for r in self.rows)

    def apply(self, v: Sequence) -> tuple:
        return self @ v

    def __pow__(self, k: int) -> "Mat":
        if k < 0:
            return self.inverse() ** (-k)
        out = Mat.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    @property
    def T(self) -> "Mat":
        return Mat._raw(tuple(zip(*self.rows)) if self.nrows else tuple(), self.nrows) \
            if self.ncols else Mat._raw(tuple(), self.nrows)

    def conj(self) -> "Mat":
        if self.is_real():
            return self
        return Mat._raw(tuple(tuple(conj(a) for a in r) for r in self.rows), self.ncols)

    @property
    def H(self) -> "Mat":
        return self.conj().T

    def trace(self):
        self._square()
        t = ZERO
        for i in range(self.nrows):
            t = t + self.rows[i][i]
        return t

    def is_zero(self) -> bool:
        return not any(a for r in self.rows for a in r)

    def is_real(self) -> bool:
        return all(is_real(a) for r in self.rows for a in r)

    def real_part(self) -> "Mat":
        from .scalars import re_part
        return Mat._raw(tuple(tuple(re_part(a) for a in r) for r in self.rows), self.ncols)

    def imag_part(self) -> "Mat":
        from .scalars import im_part
        return Mat._raw(tuple(tuple(im_part(a) for a in r) for r in self.rows), self.ncols)

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, self.rows))
        return self._hash

    def __repr__(self):
        return "Mat(" + repr([[scalar_to_json(a) for a in r] for r in self.rows]) + ")"

    # linear algebra -------------------------------------------------------
    def rank(self) -> int:
        return len(rref(self.rows, self.ncols)[1])

    def kernel(self) -> "Subspace":
        return Subspace._from_rows_unreduced(_kernel_vectors(self.rows, self.ncols), self.ncols)

    def image(self) -> "Subspace":
        return Subspace.span(self.columns(), self.nrows)

    def inverse(self) -> "Mat":
        self._square()
        n = self.nrows
        aug = [list(r) + [ONE if i == j else ZERO for j in range(n)]
               for i, r in enumerate(self.rows)]
        R, piv = rref(aug, 2 * n)
        if piv[:n] != list(range(n)) or len(piv) < n:
            raise SingularMatrix("matrix is singular")
        return Mat._raw(tuple(tuple(r[n:]) for r in R[:n]), n)

    def solve(self, rhs: "Mat") -> "Mat | None":
        """One solution X of self @ X == rhs, or None if inconsistent."""
        m, n = self.shape
        if rhs.nrows != m:
            raise DimensionMismatch("right-hand side has the wrong height")
        k = rhs.ncols
        aug = [list(r) + list(s) for r, s in zip(self.rows, rhs.rows)]
        R, piv = rref(aug, n + k)
        if any(p >= n for p in piv):
            return None
        X = [[ZERO] * k for _ in range(n)]
        for i, pc in enumerate(piv):
            X[pc] = R[i][n:]
        return Mat._raw(tuple(tuple(x) for x in X), k)

    def is_nilpotent(self) -> bool:
        self._square()
        return (self ** self.nrows).is_zero()

    def nilpotency_index(self) -> int:
        """Smallest d with self**d == 0."""
        self._square()
        P = Mat.identity(self.nrows)
        for d in range(self.nrows + 1):
            if P.is_zero():
                return d
            P = P @ self
        raise NotNilpotent("matrix is not nilpotent")

    def to_json(self):
        return [[scalar_to_json(a) for a in r] for r in self.rows]

    # helpers --------------------------------------------------------------
    def _same_shape(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"shape mismatch {self.shape} vs {other.shape}")

    def _square(self):
        if self.nrows != self.ncols:
            raise DimensionMismatch(f"matrix is not square: {self.shape}")


def _dot(a, b):
    t = ZERO
    for x, y in zip(a, b):
        if x and y:
            t = t + x * y
    return t


def bracket(a: Mat, b: Mat) -> Mat:
    return a @ b - b @ a


def ad(g: Mat, x: Mat) -> Mat:
    """Ad_g x = g x g^{-1}."""
    return g @ x @ g.inverse()


def block_diag(*blocks: Mat) -> Mat:
    n = sum(b.nrows for b in blocks)
    rows = []
    off = 0
    for b in blocks:
        for r in b.rows:
            rows.append((ZERO,) * off + tuple(r) + (ZERO,) * (n - off - b.ncols))
        off += b.ncols
    return Mat._raw(tuple(rows), n)


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """A subspace of Q(i)^n with a canonical reduced echelon basis.

    ``vectors`` are the rows of the reduced row echelon form of any spanning
    set; as columns they give the reduced column echelon basis matrix.
    """

    __slots__ = ("n", "vectors", "pivots")

    def __init__(self, n: int, vectors, pivots):
        self.n = n
        self.vectors = vectors
        self.pivots = pivots

    @classmethod
    def span(cls, vectors: Iterable[Sequence], n: int) -> "Subspace":
        rows = []
        for v in vectors:
            v = [to_scalar(x) for x in v]
            if len(v) != n:
                raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {n}")
            rows.append(v)
        return cls._from_rows_unreduced(rows, n)

    @classmethod
    def _from_rows_unreduced(cls, rows, n) -> "Subspace":
        R, piv = rref(rows, n)
        return cls(n, tuple(tuple(r) for r in R), tuple(piv))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, (), ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        I = Mat.identity(n)
        return cls(n, I.rows, tuple(range(n)))

    @classmethod
    def from_basis_matrix(cls, B: Mat) -> "Subspace":
        return cls.span(B.columns(), B.nrows)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    @property
    def basis(self) -> Mat:
        return Mat.from_columns(self.vectors, self.n)

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self.vectors)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.vectors == other.vectors

    def __hash__(self):
        return hash((self.n, self.vectors))

    def __repr__(self):
        return f"Subspace(n={self.n}, dim={self.dim})"

    def _check(self, other: "Subspace"):
        if self.n != other.n:
            raise DimensionMismatch(f"ambient dimensions differ: {self.n} vs {other.n}")

    def reduce(self, v: Sequence) -> list:
        """Canonical representative of v modulo this subspace."""
        w = [to_scalar(x) for x in v]
        for row, pc in zip(self.vectors, self.pivots):
            f = w[pc]
            if f:
                w = [a - f * b if b else a for a, b in zip(w, row)]
        return w

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.n:
            raise DimensionMismatch("vector length does not match ambient dimension")
        return not any(self.reduce(v))

    __contains__ = contains

    def coordinates(self, v: Sequence) -> tuple:
        """Coefficients of v in the canonical basis; raises if v is outside."""
        w = [to_scalar(x) for x in v]
        c = tuple(w[pc] for pc in self.pivots)
        if any(self.reduce(w)):
            raise InputError("vector is not in the subspace")
        return c

    def issubset(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(v) for v in self.vectors)

    __le__ = issubset

    def __ge__(self, other: "Subspace") -> bool:
        return other.issubset(self)

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if not other.vectors:
            return self
        if not self.vectors:
            return other
        return Subspace._from_rows_unreduced(list(self.vectors) + list(other.vectors), self.n)

    def annihilator(self) -> list[list]:
        """Row functionals vanishing on the subspace."""
        return _kernel_vectors(self.vectors, self.n) if self.vectors else \
            [list(r) for r in Mat.identity(self.n).rows]

    def __and__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if not self.vectors or not other.vectors:
            return Subspace.zero(self.n)
        if self.dim == self.n:
            return other
        if other.dim == other.n:
            return self
        eqs = self.annihilator() + other.annihilator()
        return Subspace._from_rows_unreduced(_kernel_vectors(eqs, self.n), self.n)

    def conj(self) -> "Subspace":
        if all(is_real(x) for v in self.vectors for x in v):
            return self
        return Subspace._from_rows_unreduced([[conj(x) for x in v] for v in self.vectors],
                                             self.n)

    def is_real(self) -> bool:
        return all(is_real(x) for v in self.vectors for x in v)

    def image(self, A: Mat) -> "Subspace":
        if A.ncols != self.n:
            raise DimensionMismatch("matrix does not act on this space")
        return Subspace.span([A @ v for v in self.vectors], A.nrows)

    def preimage(self, A: Mat) -> "Subspace":
        """{v : A v in self}."""
        if A.nrows != self.n:
            raise DimensionMismatch("matrix does not map into this space")
        if self.dim == self.n:
            return Subspace.full(A.ncols)
        ann = self.annihilator()
        eqs = [list((Mat._raw((tuple(f),), self.n) @ A).rows[0]) for f in ann]
        return Subspace._from_rows_unreduced(_kernel_vectors(eqs, A.ncols), A.ncols)

    def complement_in(self, sup: "Subspace") -> list[tuple]:
        """Canonical basis of a complement of self inside sup (self <= sup).

        Vectors are the reductions modulo self of sup's canonical basis,
        skipping those that become dependent.
        """
        self._check(sup)
        out = []
        cur = self
        for v in sup.vectors:
            if not cur.contains(v):
                out.append(v)
                cur = cur + Subspace.span([v], self.n)
        return out

    def to_json(self):
        return self.basis.to_json()


def subspace_calculus(op: str, *args):
    """Dispatcher for kernel | image | sum | intersect | preimage."""
    if op == "kernel":
        (A,) = args
        return A.kernel()
    if op == "image":
        (A,) = args
        return A.image()
    if op == "sum":
        U, V = args
        return U + V
    if op == "intersect":
        U, V = args
        return U & V
    if op == "preimage":
        A, U = args
        return U.preimage(A)
    raise InputError(f"unknown subspace operation {op!r}")


def sum_all(spaces: Iterable[Subspace], n: int) -> Subspace:
    rows = [v for S in spaces for v in S.vectors]
    return Subspace._from_rows_unreduced(rows, n)


# ---------------------------------------------------------------------------
# Hermitian forms, exp and log


def hermitian_signature(H: Mat) -> tuple[int, int, int]:
    """(n+, n-, n0) of a Hermitian matrix by exact congruence."""
    H._square()
    if H.H != H:
        from .errors import NonHermitian
        raise NonHermitian("matrix is not Hermitian")
    n = H.nrows
    A = [list(r) for r in H.rows]
    pos = neg = 0
    live = list(range(n))
    while live:
        piv = next((i for i in live if A[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in live for j in live if i != j and A[i][j]), None)
            if pair is None:
                break
            i, j = pair
            # e_i + c e_j with c = conj(A[i][j]) has norm 2|A[i][j]|^2 > 0
            c = conj(A[i][j])
            for k in range(n):
                A[k][i] = A[k][i] + c * A[k][j]
            cc = conj(c)
            for k in range(n):
                A[i][k] = A[i][k] + cc * A[j][k]
            piv = i
        p = A[piv][piv]
        if p > 0:
            pos += 1
        else:
            neg += 1
        live.remove(piv)
        for k in live:
            m = A[piv][k] / p
            if m:
                for t in range(n):
                    A[t][k] = A[t][k] - m * A[t][piv]
                cm = conj(m)
                for t in range(n):
                    A[k][t] = A[k][t] - cm * A[piv][t]
    return pos, neg, n - pos - neg


def exp_nilpotent(X: Mat) -> Mat:
    d = X.nilpotency_index()
    n = X.nrows
    out = Mat.identity(n)
    term = Mat.identity(n)
    for k in range(1, d):
        term = (term @ X).scale(mpq(1, k))
        out = out + term
    return out


def log_unipotent(U: Mat) -> Mat:
    U._square()
    X = U - Mat.identity(U.nrows)
    try:
        d = X.nilpotency_index()
    except NotNilpotent:
        raise NotNilpotent("matrix is not unipotent") from None
    out = Mat.zeros(U.nrows)
    term = Mat.identity(U.nrows)
    for k in range(1, d):
        term = term @ X
        c = mpq(1, k) if k % 2 else mpq(-1, k)
        out = out + term.scale(c)
    return out


# ---------------------------------------------------------------------------
# lattices


def _hnf_rows(rows: list[list[int]], ncols: int) -> list[list[int]]:
    A = [list(r) for r in rows if any(r)]
    r = 0
    for c in range(ncols):
        if r >= len(A):
            break
        while True:
            nz = [i for i in range(r, len(A)) if A[i][c]]
            if not nz:
                break
            k = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[k] = A[k], A[r]
            done = True
            for i in range(r + 1, len(A)):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if r < len(A) and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-a for a in A[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
            r += 1
    return [row for row in A[:r]]


class RationalLattice:
    """Z-span of rational vectors, stored as a Hermite normal form basis.

    ``basis`` rows are the HNF of the integral lattice denominator * L,
    divided back by ``denominator`` (the least common denominator of the
    HNF basis).
    """

    __slots__ = ("n", "basis", "denominator")

    def __init__(self, n: int, basis: tuple, denominator: int):
        self.n = n
        self.basis = basis
        self.denominator = denominator

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        v = [to_scalar(x) for x in v]
        if not all(is_real(x) for x in v):
            return False
        aug = lattice_from_generators(list(self.basis) + [v], self.n)
        return aug == self

    def __eq__(self, other):
        if not isinstance(other, RationalLattice):
            return NotImplemented
        return (self.n, self.basis, self.denominator) == (other.n, other.basis, other.denominator)

    def __hash__(self):
        return hash((self.n, self.basis, self.denominator))

    def __repr__(self):
        return f"RationalLattice(rank={self.rank}, denominator={self.denominator})"

    def to_json(self):
        return {"basis": [[scalar_to_json(x) for x in b] for b in self.basis],
                "denominator": str(self.denominator)}


def lattice_from_generators(vectors: Sequence[Sequence], n: int | None = None) -> RationalLattice:
    vecs = [[to_scalar(x) for x in v] for v in vectors]
    if n is None:
        if not vecs:
            raise DimensionMismatch("cannot infer dimension of an empty generator list")
        n = len(vecs[0])
    for v in vecs:
        if len(v) != n:
            raise DimensionMismatch("generators have inconsistent lengths")
        if not all(is_real(x) for x in v):
            raise InputError("lattice generators must be rational")
    D = 1
    for v in vecs:
        for x in v:
            D = int(gmpy2.lcm(D, denominator(x)))
    ints = [[int(x * D) for x in v] for v in vecs]
    H = _hnf_rows(ints, n)
    basis = [[mpq(a, D) for a in row] for row in H]
    d = 1
    for row in basis:
        for x in row:
            d = int(gmpy2.lcm(d, x.denominator))
    return RationalLattice(n, tuple(tuple(r) for r in basis), d)


__all__ = [
    "GaussianRational", "Mat", "Subspace", "RationalLattice", "rref", "bracket", "ad",
    "block_diag", "subspace_calculus", "sum_all", "hermitian_signature",
    "exp_nilpotent", "log_unipotent", "lattice_from_generators",
]
