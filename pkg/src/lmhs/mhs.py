"""Deligne splittings and limiting mixed Hodge structure certificates."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DimensionMismatch, NonHermitian, NotMHS, WeightMismatch
from .filtrations import (HodgeFiltration, PolarizedSpace, WeightFiltration,
                          check_compact_dual, graded_piece)
from .linalg import Mat, Subspace, hermitian_signature, sum_all
from .nilpotent import NilpotentCone, weight_filtration
from .scalars import ZERO, conj, i_power


class DeligneSplitting:
    """Bigrading V = sum I^{p,q} of a mixed Hodge structure of center ``weight``."""

    def __init__(self, pieces: dict[tuple[int, int], Subspace], weight: int, n: int):
        self.pieces = {k: v for k, v in sorted(pieces.items()) if v.dim}
        self.weight = weight
        self.n = n
        self._basis = None

    def __getitem__(self, pq) -> Subspace:
        return self.pieces.get(tuple(pq), Subspace.zero(self.n))

    def dims(self) -> dict[tuple[int, int], int]:
        return {k: v.dim for k, v in self.pieces.items()}

    def adapted_basis(self) -> tuple[Mat, list[tuple[int, int]]]:
        if self._basis is None:
            cols, labels = [], []
            for pq, S in self.pieces.items():
                cols += list(S.vectors)
                labels += [pq] * S.dim
            P = Mat.from_columns(cols, self.n)
            self._basis = (P, labels, P.inverse())
        return self._basis[0], self._basis[1]

    def _pinv(self) -> Mat:
        self.adapted_basis()
        return self._basis[2]

    def components(self, X: Mat) -> dict[tuple[int, int], Mat]:
        """Bidegree decomposition of an endomorphism (nonzero parts only)."""
        P, labels = self.adapted_basis()
        Pinv = self._pinv()
        Xp = Pinv @ X @ P
        parts: dict[tuple[int, int], list] = {}
        for i, row in enumerate(Xp.rows):
            pi, qi = labels[i]
            for j, x in enumerate(row):
                if x:
                    pj, qj = labels[j]
                    key = (pi - pj, qi - qj)
                    M = parts.setdefault(key, [[ZERO] * self.n for _ in range(self.n)])
                    M[i][j] = x
        return {k: P @ Mat(v) @ Pinv for k, v in sorted(parts.items())}

    def component(self, X: Mat, pq) -> Mat:
        return self.components(X).get(tuple(pq), Mat.zeros(self.n))

    def p_grading(self) -> dict[int, Subspace]:
        """V_p = sum over q of I^{p,q}."""
        out: dict[int, list] = {}
        for (p, q), S in self.pieces.items():
            out.setdefault(p, []).extend(S.vectors)
        return {p: Subspace.span(v, self.n) for p, v in sorted(out.items())}

    def hodge_filtration(self) -> HodgeFiltration:
        ps = sorted({p for p, _ in self.pieces})
        steps = {}
        for p in range(ps[0], ps[-1] + 1):
            steps[p] = sum_all([S for (a, _), S in self.pieces.items() if a >= p], self.n)
        return HodgeFiltration(self.n, steps)

    def weight_filtration(self) -> WeightFiltration:
        ws = sorted({p + q for p, q in self.pieces})
        steps = {}
        for l in range(ws[0], ws[-1] + 1):
            steps[l] = sum_all([S for (a, b), S in self.pieces.items() if a + b <= l], self.n)
        return WeightFiltration(self.n, steps)

    def to_json(self):
        return {f"{p},{q}": S.to_json() for (p, q), S in self.pieces.items()}


def deligne_splitting(W: WeightFiltration, F: HodgeFiltration, weight: int) -> DeligneSplitting:
    """I^{p,q} = F^p cap W_{p+q} cap (conj F^q cap W_{p+q}
    + sum_{j>=1} conj F^{q-j} cap W_{p+q-j-1})."""
    if W.n != F.n:
        raise DimensionMismatch("W and F live on different spaces")
    n = W.n
    Fc = F.conj()
    lo, hi = F.lo, F.hi
    pieces = {}
    for p in range(lo, hi + 1):
        for q in range(lo, hi + 1):
            l = p + q
            if l < W.lo or l > W.hi + 1:
                continue
            A = F(p) & W(l)
            if not A.dim:
                continue
            B = Fc(q) & W(l)
            for j in range(1, q - lo + 2):
                B = B + (Fc(q - j) & W(l - j - 1))
            S = A & B
            if S.dim:
                pieces[(p, q)] = S
    s = DeligneSplitting(pieces, weight, n)
    total = sum(S.dim for S in s.pieces.values())
    if total != n or sum_all(s.pieces.values(), n).dim != n:
        raise NotMHS(f"bigraded pieces do not decompose V (dimensions sum to {total} of {n})")
    for l in W.indices():
        if sum_all([S for (p, q), S in s.pieces.items() if p + q <= l], n) != W(l):
            raise NotMHS(f"W_{l} is not the sum of I^(p,q) with p+q <= {l}")
    for p in range(lo, hi + 1):
        if sum_all([S for (a, _), S in s.pieces.items() if a >= p], n) != F(p):
            raise NotMHS(f"F^{p} is not the sum of I^(a,b) with a >= {p}")
    if not splitting_conjugation_ok(s):
        raise NotMHS("conjugation congruence fails")
    return s


def splitting_conjugation_ok(s: DeligneSplitting) -> bool:
    """conj I^{p,q} <= I^{q,p} + sum_{r<q, t<p} I^{r,t}."""
    for (p, q), S in s.pieces.items():
        T = sum_all([s[(q, p)]] + [U for (r, t), U in s.pieces.items() if r < q and t < p], s.n)
        if not S.conj().issubset(T):
            return False
    return True


def is_r_split(s: DeligneSplitting) -> bool:
    return all(S.conj() == s[(q, p)] for (p, q), S in s.pieces.items())


def primitive_subspace(N: Mat, W: WeightFiltration, k: int, n: int) -> Subspace:
    """ker(N^{k+1} : Gr_{n+k} -> Gr_{n-k-2}) in graded-piece coordinates."""
    if k < 0:
        raise DimensionMismatch("k must be non-negative")
    if weight_filtration(N, n) != W:
        raise WeightMismatch("W is not the weight filtration of N")
    top = graded_piece(W, n + k)
    if not top.dim:
        return Subspace.zero(0)
    bot = graded_piece(W, n - k - 2)
    Nk1 = N ** (k + 1)
    images = [Nk1 @ v for v in top.basis]
    if not bot.dim:
        return Subspace.full(top.dim)
    return (bot.projection @ Mat.from_columns(images, W.n)).kernel()


# ---------------------------------------------------------------------------
# LMHS certificates


@dataclass
class LmhsCertificate:
    passed: bool
    flags: dict
    signatures: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    hodge_numbers: dict = field(default_factory=dict)

    def to_json(self):
        return {"passed": self.passed, "flags": dict(self.flags),
                "failures": list(self.failures), "signatures": list(self.signatures),
                "hodge_numbers": dict(self.hodge_numbers)}


def _gr_hodge_ok(W: WeightFiltration, F: HodgeFiltration) -> tuple[bool, list]:
    """Each Gr_l carries a pure Hodge structure of weight l."""
    Fc = F.conj()
    bad = []
    for l in W.indices():
        Wl, Wl1 = W(l), W(l - 1)
        if Wl.dim == Wl1.dim:
            continue
        for p in range(F.lo, F.hi + 2):
            A = (F(p) & Wl) + Wl1
            B = (Fc(l - p + 1) & Wl) + Wl1
            if (A & B) != Wl1 or (A + B) != Wl:
                bad.append([l, p])
    return not bad, bad


def _polarization_records(N: Mat, W: WeightFiltration, F: HodgeFiltration,
                          space: PolarizedSpace, label) -> list:
    n = space.weight
    Fc = F.conj()
    recs = []
    for k in range(0, W.hi - n + 1):
        l = n + k
        Wl, Wl1 = W(l), W(l - 1)
        if Wl.dim == Wl1.dim:
            continue
        Nk = N ** k
        pre = (W(n - k - 3).preimage(N ** (k + 1))) & Wl
        prim_dim = pre.dim - Wl1.dim
        found = 0
        for p in range(F.lo, F.hi + 1):
            q = l - p
            S = ((F(p) & Wl) + Wl1) & ((Fc(q) & Wl) + Wl1) & pre
            reps = Wl1.complement_in(S)
            if not reps:
                continue
            found += len(reps)
            Bv = Mat.from_columns(reps, space.rank)
            Bc = Mat.from_columns([Nk @ [conj(x) for x in v] for v in reps], space.rank)
            H = (Bv.T @ space.Q @ Bc).scale(i_power(p - q))
            try:
                sig = list(hermitian_signature(H))
                ok = sig == [len(reps), 0, 0]
            except NonHermitian:
                sig, ok = None, False
            recs.append({"sample": label, "k": k, "p": p, "q": q, "dim": len(reps),
                         "signature": sig, "ok": ok})
        if found != prim_dim:
            recs.append({"sample": label, "k": k, "p": None, "q": None, "dim": prim_dim,
                         "signature": None, "ok": False,
                         "note": "primitive part is not a sum of its Hodge components"})
    return recs


def verify_lmhs(W: WeightFiltration, F: HodgeFiltration, cone: NilpotentCone,
                space: PolarizedSpace) -> LmhsCertificate:
    """Check that (W, F) is a limiting mixed Hodge structure polarized by the cone.

    Flags: weight (W is W(N) at every interior sample), compact_dual,
    a (mixed Hodge structure), b (horizontality N F^p <= F^{p-1} for
    generators and samples), c (pure Hodge structure on every Gr),
    d (polarization of primitive parts at interior samples).
    """
    n = space.weight
    flags = {}
    failures = []
    samples = cone.interior_samples()
    flags["weight"] = all(weight_filtration(N, n, space) == W for N in samples)
    flags["compact_dual"] = check_compact_dual(F, space).ok
    try:
        deligne_splitting(W, F, n)
        flags["a"] = True
    except NotMHS as e:
        flags["a"] = False
        failures.append(f"a: {e}")
    flags["b"] = all(F(p).image(N).issubset(F(p - 1))
                     for N in list(cone.generators) + samples for p in F.indices())
    flags["c"], bad_c = _gr_hodge_ok(W, F)
    if bad_c:
        failures.append(f"c: graded pieces fail at (l, p) = {bad_c}")
    recs = []
    for idx, N in enumerate(samples):
        recs += _polarization_records(N, W, F, space, idx)
    flags["d"] = all(r["ok"] for r in recs)
    for r in recs:
        if not r["ok"]:
            failures.append(f"d: sample {r['sample']} k={r['k']} (p,q)=({r['p']},{r['q']}) "
                            f"signature {r['signature']}")
    if not flags["weight"]:
        failures.insert(0, "weight: W differs from W(N) at an interior point")
    if not flags["compact_dual"]:
        failures.insert(0, "compact_dual: F is not isotropic")
    if not flags["b"]:
        failures.append("b: N F^p is not contained in F^(p-1)")
    hn = {}
    for l in W.indices():
        for p in range(F.lo, F.hi + 1):
            d = ((F(p) & W(l)) + W(l - 1)).dim - ((F(p + 1) & W(l)) + W(l - 1)).dim
            if d:
                hn[f"{p},{l - p}"] = d
    return LmhsCertificate(all(flags.values()), flags, recs, failures, hn)


def f_infinity(W: WeightFiltration, F: HodgeFiltration, weight: int,
               splitting: DeligneSplitting | None = None):
    """F_inf^b = sum over c <= n - b of I^{a,c}; returns (F_inf, agreement report).

    On Gr_l the two filtrations agree after the shift F_inf^b <-> F^{b+l-n}.
    """
    s = splitting or deligne_splitting(W, F, weight)
    n = weight
    cs = sorted({c for _, c in s.pieces})
    steps = {}
    for b in range(n - cs[-1], n - cs[0] + 2):
        steps[b] = sum_all([S for (_, c), S in s.pieces.items() if c <= n - b], s.n)
    Finf = HodgeFiltration(s.n, steps)
    bad = []
    for l in W.indices():
        for b in range(Finf.lo, Finf.hi + 2):
            A = (Finf(b) & W(l)) + W(l - 1)
            B = (F(b + l - n) & W(l)) + W(l - 1)
            if A != B:
                bad.append([l, b])
    return Finf, {"gr_agreement": not bad, "violations": bad}


__all__ = ["DeligneSplitting", "deligne_splitting", "is_r_split", "primitive_subspace",
           "LmhsCertificate", "verify_lmhs", "f_infinity", "splitting_conjugation_ok"]
