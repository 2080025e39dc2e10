"""Extension tori, factors of automorphy, metrics and Chern forms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .errors import GammaNotUnipotentRadical, InputError, NonHermitian
from .filtrations import HodgeFiltration
from .lie import (BoundaryLieData, FiberPoint, fiber_solve, levi_decompose, lie_span,
                  trace_form)
from .linalg import (Mat, RationalLattice, ad, bracket, exp_nilpotent, hermitian_signature,
                     lattice_from_generators, log_unipotent)
from .nilpotent import NilpotentCone
from .scalars import ZERO, I, im_part, is_integral, is_real, re_part, scalar_to_json, \
    to_scalar


@dataclass(frozen=True)
class AutomorphyExponent:
    """The factor exp(pi i q), with q a Gaussian rational taken modulo 2."""

    q: object

    def __mul__(self, other: "AutomorphyExponent") -> "AutomorphyExponent":
        return AutomorphyExponent(self.q + other.q)

    def inverse(self) -> "AutomorphyExponent":
        return AutomorphyExponent(-self.q)

    def equals(self, other: "AutomorphyExponent") -> bool:
        """Equality of the factors exp(pi i q): q - q' in 2Z."""
        d = to_scalar(self.q - other.q)
        return is_real(d) and is_integral(d) and int(d) % 2 == 0

    def is_trivial(self) -> bool:
        return self.equals(AutomorphyExponent(ZERO))

    def log_abs_sq(self):
        """|exp(pi i q)|^2 = exp(-2 pi Im q); returns -2 Im q (units of pi)."""
        return -2 * im_part(self.q)

    def to_json(self):
        return {"q": scalar_to_json(self.q), "meaning": "exp(pi*i*q), q mod 2"}


# ---------------------------------------------------------------------------
# extension data


@dataclass
class ExtensionSpace:
    basis: list  # E_C: components c^{-p,p-1}, p > 0
    bidegrees: list
    eprime: list  # c^{-1,0}
    lattice: RationalLattice | None
    generator_coords: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def to_json(self):
        return {
            "dim_E": self.dim,
            "dim_Eprime": len(self.eprime),
            "bidegrees": [list(b) for b in self.bidegrees],
            "basis": [b.to_json() for b in self.basis],
            "lattice": self.lattice.to_json() if self.lattice else None,
            "lattice_rank": self.lattice.rank if self.lattice else 0,
            "generator_coordinates": [[scalar_to_json(x) for x in c] for c in self.generator_coords],
        }


def _is_unipotent_radical(gamma: Mat, data: BoundaryLieData) -> bool:
    r = data.r
    if not all(gamma @ N == N @ gamma for N in data.cone.generators):
        return False
    if not data.space.in_group(gamma):
        return False
    # acts trivially on Gr^W
    return _lowers_weight(gamma - Mat.identity(r), data)


def _lowers_weight(X: Mat, data: BoundaryLieData) -> bool:
    W = data.W
    return all(W(l).image(X).issubset(W(l - 1)) for l in W.indices())


def extension_coordinates(b: Mat, E: ExtensionSpace, data: BoundaryLieData) -> tuple:
    """Coordinates of sum_{p>0} b^{-p,p-1} in the E_C basis."""
    comps = data.components(b)
    total = Mat.zeros(data.r)
    for bd in set(tuple(x) for x in E.bidegrees):
        if bd in comps:
            total = total + comps[bd]
    S = lie_span(E.basis, data.r)
    return S.coordinates(total.flat()) if E.basis else ()


def extension_space(data: BoundaryLieData, gammas: Sequence[Mat] = ()) -> ExtensionSpace:
    """E_C = c^{-1} / (c^{-2} + c^{-1} cap f) realized as sum_{p>0} c^{-p,p-1}."""
    basis, bds = [], []
    for (p, q), v in data.cpq.items():
        if p < 0 and q == -p - 1:
            basis += v
            bds += [(p, q)] * len(v)
    eprime = list(data.cpq.get((-1, 0), []))
    E = ExtensionSpace(basis, bds, eprime, None)
    coords = []
    for k, g in enumerate(gammas):
        if not _is_unipotent_radical(g, data):
            raise GammaNotUnipotentRadical(f"generator {k} is not in the unipotent radical")
        b = log_unipotent(g)
        coords.append(extension_coordinates(b, E, data))
    if coords:
        real = [[c for z in v for c in (re_part(z), im_part(z))] for v in coords]
        E.lattice = lattice_from_generators(real, 2 * len(basis))
    E.generator_coords = coords
    return E


# ---------------------------------------------------------------------------
# action and automorphy factors


def act_on_fiber(gamma: Mat, point: FiberPoint, data: BoundaryLieData) -> FiberPoint:
    """gamma . g exp(x) F = (alpha g) exp(y) F."""
    alpha, b = levi_decompose(gamma, data.Y, data.cone)
    g, x = point.g, point.x
    bg = ad(g.inverse(), b)
    y = fiber_solve(bg, x, data).y
    h = alpha @ g
    lhs = data.F.transform(gamma @ g @ exp_nilpotent(x))
    rhs = data.F.transform(h @ exp_nilpotent(y))
    if lhs != rhs:
        raise InputError("fiber action does not reproduce the translated filtration")
    return FiberPoint(h, y)


def e_m_exponent(M: Mat, gamma: Mat, point: FiberPoint, data: BoundaryLieData) -> AutomorphyExponent:
    """Closed form q = Q(M, [b, Ad_g x])."""
    _, b = levi_decompose(gamma, data.Y, data.cone)
    return AutomorphyExponent(trace_form(M, bracket(b, ad(point.g, point.x))))


def e_m_exponent_from_definition(M: Mat, gamma: Mat, point: FiberPoint,
                                 data: BoundaryLieData) -> AutomorphyExponent:
    """q = 2 (Q(M, Ad_h y) - Q(M, Ad_g x)) for gamma . (g, x) = (h, y)."""
    new = act_on_fiber(gamma, point, data)
    q = 2 * (trace_form(M, ad(new.g, new.x)) - trace_form(M, ad(point.g, point.x)))
    return AutomorphyExponent(q)


def h_m_exponent(M: Mat, point: FiberPoint) -> AutomorphyExponent:
    """h_M = exp(pi i q) with q = Q(M, [Ad_g x, Ad_g conj x])."""
    x = ad(point.g, point.x)
    q = trace_form(M, bracket(x, x.conj()))
    return AutomorphyExponent(q)


def h_m_is_real_positive(e: AutomorphyExponent) -> bool:
    return re_part(to_scalar(e.q)) == 0


def metric_transform_defect(M: Mat, gamma: Mat, point: FiberPoint, data: BoundaryLieData,
                            e: AutomorphyExponent | None = None, metric_scale=1):
    """log h(gamma z) - log h(z) + 2 log|e| in units of pi (zero when the metric
    transforms correctly). ``metric_scale`` multiplies the exponent of h."""
    new = act_on_fiber(gamma, point, data)
    h0 = to_scalar(h_m_exponent(M, point).q) * metric_scale
    h1 = to_scalar(h_m_exponent(M, new).q) * metric_scale
    e = e or e_m_exponent(M, gamma, point, data)
    # log h = pi i q_h ; log |e|^2 = -2 pi Im q_e
    return (h1 - h0) * I + e.log_abs_sq()


def chern_form(M: Mat, vectors: Sequence[Mat]) -> Mat:
    """H_jk = -(i/2) Q(M, [v_j, conj v_k])."""
    H = [[-(I * trace_form(M, bracket(vj, vk.conj()))) * mpq(1, 2) for vk in vectors]
         for vj in vectors]
    Hm = Mat(H, len(vectors)) if vectors else Mat.zeros(0)
    if Hm.H != Hm:
        raise NonHermitian("Chern form is not Hermitian")
    return Hm


def abelian_check(M: Mat, E: ExtensionSpace) -> dict:
    H = chern_form(M, E.eprime)
    sig = hermitian_signature(H) if E.eprime else (0, 0, 0)
    return {"H": H.to_json(), "signature": list(sig),
            "positive_definite": sig == (len(E.eprime), 0, 0)}


def theorem_e_coefficients(M: Mat, nilpotents: Sequence[Mat],
                           cone: NilpotentCone | None = None) -> list[dict]:
    """Values Q(M, N_j) with integrality and (inside the cone) positivity flags."""
    out = []
    in_cone = set()
    if cone is not None:
        in_cone = {g for g in cone.generators}
    for j, N in enumerate(nilpotents):
        v = trace_form(M, N)
        rec = {"index": j, "value": scalar_to_json(v),
               "integral": is_real(v) and is_integral(v)}
        if N in in_cone:
            rec["positive"] = is_real(v) and v > 0
        out.append(rec)
    return out


def tilde_e_m_exponent(M: Mat, gamma: Mat, s: HodgeFiltration,
                       data: BoundaryLieData) -> AutomorphyExponent:
    """q = 2 [Q(M, lambda(gamma s)) - Q(M, lambda(s))]."""
    x0 = data.lam(s)
    x1 = data.lam(s.transform(gamma))
    return AutomorphyExponent(2 * (trace_form(M, x1) - trace_form(M, x0)))


__all__ = [
    "AutomorphyExponent", "ExtensionSpace", "extension_space", "extension_coordinates",
    "act_on_fiber", "e_m_exponent", "e_m_exponent_from_definition", "h_m_exponent",
    "h_m_is_real_positive", "metric_transform_defect", "chern_form", "abelian_check",
    "theorem_e_coefficients", "tilde_e_m_exponent",
]
