"""Combinatorics of a normal crossing boundary: strata, closures, Upsilon classes."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import ClosureViolation, InputError, NotInWt
from .filtrations import HodgeFiltration, PolarizedSpace, WeightFiltration
from .lie import _solve_combinations, _WeightLevel, centralizer, lie_span
from .linalg import Mat, Subspace, bracket, exp_nilpotent
from .mhs import verify_lmhs
from .nilpotent import NilpotentCone, cone_weight_filtration, weight_filtration
from .scalars import is_integral, is_real, scalar_to_json


def _key(I: Iterable[int]) -> frozenset:
    return frozenset(int(i) for i in I)


def fmt(I: Iterable[int]) -> list[int]:
    return sorted(I)


class BoundaryComplex:
    """Index sets of nonempty strata with the monodromy logarithms N_i."""

    def __init__(self, nu: int, strata: Iterable[Iterable[int]], space: PolarizedSpace,
                 nilpotents: Mapping[int, Mat], gamma: Sequence[Mat] = ()):
        self.nu = int(nu)
        self.strata = sorted({_key(I) for I in strata}, key=lambda s: (len(s), sorted(s)))
        self.space = space
        self.N = {int(i): M for i, M in nilpotents.items()}
        self.gamma = list(gamma)
        self._W: dict = {}

    def __contains__(self, I) -> bool:
        return _key(I) in set(self.strata)

    def _require(self, I) -> frozenset:
        k = _key(I)
        if k not in set(self.strata):
            raise InputError(f"{fmt(k)} is not a stratum")
        return k

    def cone(self, I) -> NilpotentCone:
        k = sorted(self._require(I))
        return NilpotentCone([self.N[i] for i in k], self.space, labels=k)

    def W(self, I) -> WeightFiltration:
        k = self._require(I)
        if k not in self._W:
            self._W[k] = cone_weight_filtration(self.cone(k), self.space.weight)
        return self._W[k]

    def span(self, I) -> Subspace:
        r = self.space.rank
        return lie_span([self.N[i] for i in sorted(_key(I))], r)


def validate_complex(c: BoundaryComplex) -> dict:
    """Itemized check of the complex; ``valid`` is True when nothing is violated."""
    v = []
    S = set(c.strata)
    for I in c.strata:
        if not I:
            v.append("empty index set listed as a stratum")
            continue
        bad = [i for i in I if i < 1 or i > c.nu]
        if bad:
            v.append(f"stratum {fmt(I)} uses indices outside 1..{c.nu}: {bad}")
        for k in range(1, len(I)):
            for sub in combinations(sorted(I), k):
                if _key(sub) not in S:
                    v.append(f"stratum {fmt(I)} has missing face {list(sub)}")
    used = sorted({i for I in c.strata for i in I})
    for i in used:
        if i not in c.N:
            v.append(f"no nilpotent given for component {i}")
    r = c.space.rank
    for i, N in sorted(c.N.items()):
        if N.shape != (r, r):
            v.append(f"N_{i} has shape {N.shape}")
            continue
        if not N.is_real():
            v.append(f"N_{i} is not rational")
        if not N.is_nilpotent():
            v.append(f"N_{i} is not nilpotent")
        if not c.space.in_lie_algebra(N):
            v.append(f"N_{i} is not an infinitesimal isometry of Q")
    checked = set()
    for I in c.strata:
        for a, b in combinations(sorted(I), 2):
            if (a, b) in checked or a not in c.N or b not in c.N:
                continue
            checked.add((a, b))
            if c.N[a].shape == c.N[b].shape and not bracket(c.N[a], c.N[b]).is_zero():
                v.append(f"N_{a} and N_{b} do not commute")
    if c.gamma:
        for k, g in enumerate(c.gamma):
            if not all(is_real(x) and is_integral(x) for x in g.flat()):
                v.append(f"gamma[{k}] is not integral")
            if not c.space.in_group(g):
                v.append(f"gamma[{k}] does not preserve Q")
        for i, N in sorted(c.N.items()):
            try:
                T = exp_nilpotent(N)
            except Exception:
                continue
            if not all(is_integral(x) for x in T.flat()):
                v.append(f"exp(N_{i}) is not integral")
    return {"valid": not v, "violations": v}


def upsilon_partition(c: BoundaryComplex) -> list[list[frozenset]]:
    """Finest partition with I ~ J whenever I <= J and the N-spans agree."""
    parent = {I: I for I in c.strata}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    spans = {I: c.span(I) for I in c.strata}
    for I in c.strata:
        for J in c.strata:
            if I < J and spans[I] == spans[J]:
                a, b = find(I), find(J)
                if a != b:
                    parent[b] = a
    classes: dict = {}
    for I in c.strata:
        classes.setdefault(find(I), []).append(I)
    out = [sorted(v, key=lambda s: (len(s), sorted(s))) for v in classes.values()]
    return sorted(out, key=lambda cl: (len(cl[0]), sorted(cl[0])))


def _class_of(c: BoundaryComplex, I: frozenset, part=None) -> list:
    part = part or upsilon_partition(c)
    return next(cl for cl in part if I in cl)


def cone_closure(c: BoundaryComplex, I, part=None) -> list[frozenset]:
    k = c._require(I)
    cl = _class_of(c, k, part)
    return [J for J in c.strata if k <= J and J in cl]


def wt_set(c: BoundaryComplex, I) -> list[frozenset]:
    """Strata J >= I with W(sigma_J) = W(sigma_I); checks interval closure."""
    k = c._require(I)
    W = c.W(k)
    out = [J for J in c.strata if k <= J and c.W(J) == W]
    S = set(out)
    strata = set(c.strata)
    for J in out:
        for m in range(len(k), len(J)):
            for mid in combinations(sorted(J), m):
                mid = _key(mid)
                if k <= mid and mid in strata and mid not in S:
                    raise ClosureViolation(f"{fmt(mid)} lies between {fmt(k)} and {fmt(J)} "
                                           "but has a different weight filtration")
    return out


@dataclass
class SigmaAPrime:
    generators: list
    labels: list
    in_c_minus2: bool
    barycenter_weight_ok: dict
    generator_weight_equal: dict
    barycenters_outside_c_minus3: bool
    classes_mod_c_minus4: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "labels": self.labels,
            "generators": [g.to_json() for g in self.generators],
            "in_c_minus2": self.in_c_minus2,
            "barycenter_weight_ok": self.barycenter_weight_ok,
            "generator_weight_equal": self.generator_weight_equal,
            "barycenters_outside_c_minus3": self.barycenters_outside_c_minus3,
            "classes_mod_c_minus4": {k: [scalar_to_json(x) for x in v]
                                     for k, v in self.classes_mod_c_minus4.items()},
        }


def sigma_a_prime(c: BoundaryComplex, I, S: Iterable[Iterable[int]]) -> SigmaAPrime:
    """The cone spanned by sigma_J for J in S, checked against c_I^{-2}."""
    k = c._require(I)
    Sk = [c._require(J) for J in S]
    wt = set(wt_set(c, k))
    for J in Sk:
        if J not in wt:
            raise NotInWt(f"{fmt(J)} is not in wt({fmt(k)})")
    gens, labels = [], []
    for J in Sk:
        for i in sorted(J):
            if i not in labels:
                labels.append(i)
                gens.append(c.N[i])
    n = c.space.weight
    W = c.W(k)
    r = c.space.rank
    cI = centralizer(c.cone(k), c.space)
    lvl = _WeightLevel(W)
    c2 = _solve_combinations(cI, lambda B: lvl.forbidden(B, -2))
    c3 = _solve_combinations(cI, lambda B: lvl.forbidden(B, -3))
    c4 = _solve_combinations(cI, lambda B: lvl.forbidden(B, -4))
    S2, S3, S4 = lie_span(c2, r), lie_span(c3, r), lie_span(c4, r)
    in_c2 = all(S2.contains(g.flat()) for g in gens)
    bary_ok = {}
    bary_out3 = True
    for J in Sk:
        B = c.cone(J).barycenter()
        bary_ok[",".join(map(str, sorted(J)))] = weight_filtration(B, n, c.space) == W
        bary_out3 = bary_out3 and not S3.contains(B.flat())
    gen_eq = {str(i): weight_filtration(g, n, c.space) == W for i, g in zip(labels, gens)}
    classes = {}
    if in_c2:
        # coordinates of each class in a complement of c^{-4} inside c^{-2}
        basis_all = list(S4.vectors) + S4.complement_in(S2)
        B = Mat.from_columns(basis_all, r * r)
        for i, g in zip(labels, gens):
            sol = B.solve(Mat.from_columns([g.flat()], r * r)) if basis_all else None
            classes[str(i)] = tuple(sol.col(0)[len(S4.vectors):]) if sol is not None else ()
    return SigmaAPrime(gens, labels, in_c2, bary_ok, gen_eq, bary_out3, classes)


def verify_boundary_inclusions(c: BoundaryComplex, I, J, F: HodgeFiltration) -> dict:
    kI, kJ = c._require(I), c._require(J)
    if not kI <= kJ:
        raise InputError(f"{fmt(kI)} is not contained in {fmt(kJ)}")
    if kJ not in set(wt_set(c, kI)):
        raise NotInWt(f"{fmt(kJ)} is not in wt({fmt(kI)})")
    W = c.W(kJ)
    pre = verify_lmhs(W, F, c.cone(kJ), c.space)
    cert_I = verify_lmhs(W, F, c.cone(kI), c.space)
    r = c.space.rank
    lvl = _WeightLevel(W)
    cI = centralizer(c.cone(kI), c.space)
    cJ = centralizer(c.cone(kJ), c.space)
    SJ = lie_span(cJ, r)
    res = {}
    for a, name in ((1, "b"), (2, "c")):
        cJa = lie_span(_solve_combinations(cJ, lambda B: lvl.forbidden(B, -a)), r)
        cIa = lie_span(_solve_combinations(cI, lambda B: lvl.forbidden(B, -a)), r)
        res[name] = cJa == (SJ & cIa)
    out = {
        "I": fmt(kI), "J": fmt(kJ),
        "precondition": pre.passed,
        "a": cert_I.passed,
        "b": res["b"],
        "c": res["c"],
        "certificate_I": cert_I.to_json(),
    }
    if not pre.passed:
        out["certificate_J"] = pre.to_json()
    out["passed"] = out["a"] and out["b"] and out["c"]
    return out


def build_strata_report(c: BoundaryComplex) -> dict:
    part = upsilon_partition(c)
    class_id = {I: k for k, cl in enumerate(part) for I in cl}
    per = []
    ok = True
    for I in c.strata:
        rec = {"I": fmt(I), "upsilon_class": class_id[I]}
        try:
            rec["W"] = {str(l): c.W(I)(l).dim for l in c.W(I).indices()}
            cc = cone_closure(c, I, part)
            rec["cone_closure"] = [fmt(J) for J in cc]
            wt = wt_set(c, I)
            rec["wt"] = [fmt(J) for J in wt]
            rec["cone_closure_in_wt"] = set(cc) <= set(wt)
            ok = ok and rec["cone_closure_in_wt"]
        except Exception as e:  # recorded per stratum
            code = getattr(e, "code", type(e).__name__)
            rec["error"] = {"code": code, "message": str(e)}
            ok = False
        per.append(rec)
    return {"nu": c.nu, "upsilon": [[fmt(I) for I in cl] for cl in part],
            "strata": per, "passed": ok}


__all__ = ["BoundaryComplex", "validate_complex", "upsilon_partition", "cone_closure",
           "wt_set", "SigmaAPrime", "sigma_a_prime", "verify_boundary_inclusions",
           "build_strata_report"]
