"""Command line interface.

Every verb reads one problem file and prints a JSON report (or a flat
human-readable listing with --human). Exit status: 0 when the computed
certificate holds, 1 when it fails, 2 on malformed or inconsistent input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from itertools import product

from gmpy2 import mpq

from . import __version__
from .bundles import (AutomorphyExponent, abelian_check, act_on_fiber, chern_form,
                      e_m_exponent, e_m_exponent_from_definition, extension_space,
                      h_m_exponent, metric_transform_defect, theorem_e_coefficients,
                      tilde_e_m_exponent, _is_unipotent_radical)
from .errors import InputError, LmhsError
from .filtrations import check_period_domain
from .fixtures import emit_fixtures
from .lie import (BoundaryLieData, FiberPoint, levi_decompose, normalize_M, orbit_point,
                  schubert_quotient_coordinate, trace_form)
from .linalg import Mat, exp_nilpotent, hermitian_signature
from .mhs import f_infinity, is_r_split, verify_lmhs
from .nilpotent import (check_weight_axioms, cone_weight_filtration, sl2_complete,
                        weight_filtration, weight_filtration_kernel_image)
from .problem import Problem, load_problem, parse_matrix
from .scalars import I, scalar_to_json, to_scalar
from .strata import (build_strata_report, sigma_a_prime, validate_complex,
                     verify_boundary_inclusions)

THREADS_ENV = "LMHS_THREADS"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# shared pieces


def _lie_data(prob: Problem) -> BoundaryLieData:
    prob.require("cone", "F")
    return BoundaryLieData(prob.space, prob.cone, prob.F)


def _normalized_triple(prob: Problem, data: BoundaryLieData):
    t = sl2_complete(prob.cone.barycenter(), data.Y, prob.space, data.splitting)
    bs = [levi_decompose(g, data.Y, prob.cone)[1] for g in prob.gamma]
    k, tn = normalize_M(t, bs)
    return t, k, tn, bs


def _radical(prob: Problem, data: BoundaryLieData) -> list[Mat]:
    idx = prob.params.get("radical")
    if idx is None:
        return [g for g in prob.gamma if _is_unipotent_radical(g, data)]
    out = []
    for i in idx:
        if i >= len(prob.gamma):
            raise InputError(f"params.radical: no gamma[{i}]", location="params.radical")
        out.append(prob.gamma[i])
    return out


def _points(prob: Problem, data: BoundaryLieData) -> list[FiberPoint]:
    r = data.r
    if "points" in prob.params:
        pts = []
        for k, p in enumerate(prob.params["points"]):
            g = parse_matrix(p["g"], f"params.points[{k}].g", (r, r)) if "g" in p else Mat.identity(r)
            x = parse_matrix(p["x"], f"params.points[{k}].x", (r, r))
            pts.append(FiberPoint(g, x))
        return pts
    perp = data.c_minus1_perp()
    coeffs = [mpq(2, 3) + I * mpq(1, 5), mpq(-1, 4) + I * mpq(3, 2), mpq(1, 7), mpq(5, 3) - I]
    x = Mat.zeros(r)
    for c, X in zip(coeffs * (len(perp) // len(coeffs) + 1), perp):
        x = x + X.scale(c)
    pts = [FiberPoint(Mat.identity(r), Mat.zeros(r)), FiberPoint(Mat.identity(r), x)]
    for g in prob.gamma:
        alpha, _ = levi_decompose(g, data.Y, prob.cone)
        if alpha != Mat.identity(r) and alpha.is_real():
            pts.append(FiberPoint(alpha, x))
            break
    return pts


# ---------------------------------------------------------------------------
# verbs (each returns (passed, result))


def cmd_weightfilt(prob: Problem):
    prob.require("cone")
    n = prob.space.weight
    per = []
    ok = True
    for i, N in zip(prob.cone.labels, prob.cone.generators):
        W = weight_filtration(N, n, prob.space)
        ax = check_weight_axioms(W, N, n)
        oracle = weight_filtration_kernel_image(N, n) == W
        ok = ok and all(ax.values()) and oracle
        per.append({"generator": i, "W": W.to_json(), "axioms": ax, "kernel_image_agrees": oracle})
    W = cone_weight_filtration(prob.cone, n)
    ax = check_weight_axioms(W, prob.cone.barycenter(), n)
    ok = ok and all(ax.values())
    return ok, {"generators": per, "cone": {"W": W.to_json(),
                                            "dims": {str(l): W(l).dim for l in W.indices()},
                                            "axioms": ax}}


def cmd_split(prob: Problem):
    data = _lie_data(prob)
    s = data.splitting
    return True, {"I": s.to_json(), "dims": {f"{p},{q}": d for (p, q), d in s.dims().items()},
                  "r_split": is_r_split(s), "Y": data.Y.to_json()}


def cmd_sl2(prob: Problem):
    data = _lie_data(prob)
    t, k, tn, bs = _normalized_triple(prob, data)
    rel = tn.check()
    return all(rel.values()), {"triple": t.to_json(), "relations": rel,
                               "normalization_factor": k, "normalized": tn.to_json(),
                               "Q_M_b": [scalar_to_json(trace_form(tn.M, b)) for b in bs]}


def cmd_verify_lmhs(prob: Problem):
    prob.require("cone", "F")
    W = cone_weight_filtration(prob.cone, prob.space.weight)
    cert = verify_lmhs(W, prob.F, prob.cone, prob.space)
    return cert.passed, cert.to_json()


def cmd_finfty(prob: Problem):
    prob.require("cone", "F")
    n = prob.space.weight
    W = cone_weight_filtration(prob.cone, n)
    Finf, rep = f_infinity(W, prob.F, n)
    return rep["gr_agreement"], {"F_infinity": Finf.to_json(), **rep}


def cmd_strata(prob: Problem):
    prob.require("complex")
    c = prob.complex
    val = validate_complex(c)
    if not val["valid"]:
        return False, {"validation": val}
    threads = _threads()
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            list(ex.map(c.W, c.strata))
    rep = build_strata_report(c)
    out = {"validation": val, "report": rep}
    ok = rep["passed"]
    P = prob.params
    if "I" in P and "S" in P:
        out["sigma_a_prime"] = sigma_a_prime(c, P["I"], P["S"]).to_json()
        ok = ok and out["sigma_a_prime"]["in_c_minus2"]
    if "I" in P and "J" in P and prob.F is not None:
        inc = verify_boundary_inclusions(c, P["I"], P["J"], prob.F)
        inc.pop("certificate_I", None)
        out["inclusions"] = inc
        ok = ok and inc["passed"]
    return ok, out


def cmd_ext_torus(prob: Problem):
    data = _lie_data(prob)
    E = extension_space(data, _radical(prob, data))
    res = E.to_json()
    k = prob.params.get("k")
    if k is not None:
        res["quotient_coordinates_of_F"] = {
            f"{p},{q}": [scalar_to_json(x) for x in v]
            for (p, q), v in schubert_quotient_coordinate(prob.F, data, k).items()}
    return True, res


def cmd_chern(prob: Problem):
    data = _lie_data(prob)
    _, k, tn, _ = _normalized_triple(prob, data)
    E = extension_space(data, _radical(prob, data))
    ab = abelian_check(tn.M, E)
    H = chern_form(tn.M, E.basis)
    neg = abelian_check(-tn.M, E)
    return ab["positive_definite"], {
        "normalization_factor": k, "M": tn.M.to_json(),
        "E_prime": ab, "E_full": {"H": H.to_json(), "signature": list(hermitian_signature(H))},
        "minus_M_signature": neg["signature"]}


def _audit(name, items):
    fails = [d for ok, d in items if not ok]
    return {"name": name, "holds": not fails, "checked": len(items), "failures": len(fails),
            "first_failure": fails[0] if fails else None}


def _q(e: AutomorphyExponent):
    return scalar_to_json(e.q)


def cmd_automorphy(prob: Problem):
    data = _lie_data(prob)
    _, k, tn, _ = _normalized_triple(prob, data)
    M = tn.M
    gam = prob.gamma
    if not gam:
        raise InputError("automorphy needs a gamma list", location="gamma")
    pts = _points(prob, data)
    closed_coc, def_coc, tilde_coc = [], [], []
    for (a, ga), (b, gb) in product(enumerate(gam), repeat=2):
        for pi, pt in enumerate(pts):
            moved = act_on_fiber(gb, pt, data)
            tag = {"gamma": [a, b], "point": pi}
            l, r1, r2 = (e_m_exponent(M, ga @ gb, pt, data), e_m_exponent(M, ga, moved, data),
                         e_m_exponent(M, gb, pt, data))
            closed_coc.append((l.equals(r1 * r2), dict(tag, lhs=_q(l), rhs=_q(r1 * r2))))
            l, r1, r2 = (e_m_exponent_from_definition(M, ga @ gb, pt, data),
                         e_m_exponent_from_definition(M, ga, moved, data),
                         e_m_exponent_from_definition(M, gb, pt, data))
            def_coc.append((l.equals(r1 * r2), dict(tag, lhs=_q(l), rhs=_q(r1 * r2))))
            s = data.F.transform(exp_nilpotent(pt.x))
            try:
                l, r1, r2 = (tilde_e_m_exponent(M, ga @ gb, s, data),
                             tilde_e_m_exponent(M, ga, s.transform(gb), data),
                             tilde_e_m_exponent(M, gb, s, data))
                tilde_coc.append((l.equals(r1 * r2), dict(tag, lhs=_q(l), rhs=_q(r1 * r2))))
            except LmhsError as e:
                tilde_coc.append((False, dict(tag, error=e.code)))
    # descent under c^{-2} cap f-perp shifts
    shifts = [X for (p, q), v in data.cpq.items() if p < 0 and p + q <= -2 for X in v]
    descent = []
    for a, ga in enumerate(gam):
        for pi, pt in enumerate(pts):
            base = e_m_exponent(M, ga, pt, data)
            for si, X in enumerate(shifts):
                sh = e_m_exponent(M, ga, FiberPoint(pt.g, pt.x + X), data)
                descent.append((base.equals(sh), {"gamma": a, "point": pi, "shift": si}))
    metric, metric_def = [], []
    for a, ga in enumerate(gam):
        for pi, pt in enumerate(pts):
            d = metric_transform_defect(M, ga, pt, data)
            metric.append((d == 0, {"gamma": a, "point": pi, "defect": scalar_to_json(d)}))
            e = e_m_exponent_from_definition(M, ga, pt, data)
            d2 = metric_transform_defect(M, ga, pt, data, e, 2)
            metric_def.append((d2 == 0, {"gamma": a, "point": pi, "defect": scalar_to_json(d2)}))
    gind = []
    for pi, pt in enumerate(pts):
        h0 = h_m_exponent(M, FiberPoint(Mat.identity(data.r), pt.x))
        h1 = h_m_exponent(M, pt)
        gind.append((to_scalar(h0.q - h1.q) == 0, {"point": pi}))
    audits = [_audit("e_M cocycle (closed form)", closed_coc),
              _audit("e_M descent", descent),
              _audit("metric transformation (closed forms)", metric),
              _audit("h_M independent of g", gind),
              _audit("tilde e_M cocycle", tilde_coc)]
    supplementary = [_audit("e_M cocycle (from definition)", def_coc),
                     _audit("metric transformation (definition, doubled metric)", metric_def)]
    values = []
    for a, ga in enumerate(gam):
        for pi, pt in enumerate(pts):
            values.append({"gamma": a, "point": pi,
                           "e_M": _q(e_m_exponent(M, ga, pt, data)),
                           "e_M_definition": _q(e_m_exponent_from_definition(M, ga, pt, data)),
                           "h_M": _q(h_m_exponent(M, pt))})
    ok = all(x["holds"] for x in audits)
    return ok, {"normalization_factor": k, "M": M.to_json(), "points": len(pts),
                "audits": audits, "supplementary": supplementary, "values": values}


def cmd_coeffs(prob: Problem):
    data = _lie_data(prob)
    _, k, tn, _ = _normalized_triple(prob, data)
    Ns = list(prob.complex.N.values()) if prob.complex else list(prob.cone.generators)
    coeffs = theorem_e_coefficients(tn.M, Ns, prob.cone)
    ok = all(c["integral"] and c.get("positive", True) for c in coeffs)
    return ok, {"normalization_factor": k, "M": tn.M.to_json(), "coefficients": coeffs}


def cmd_orbit(prob: Problem):
    prob.require("cone", "F")
    zs = prob.params.get("z") or [[{"re": 0, "im": 1}] * len(prob.cone)]
    out = []
    for z in zs:
        zz = [to_scalar(v) for v in z]
        if len(zz) != len(prob.cone):
            raise InputError("params.z: wrong number of coordinates", location="params.z")
        E = orbit_point(zz, prob.cone, prob.F)
        pd = check_period_domain(E, prob.space)
        out.append({"z": [scalar_to_json(v) for v in zz], "point": E.to_json(),
                    "in_period_domain": pd.ok, "details": pd.details})
    return True, {"orbit": out}


VERBS = {
    "weightfilt": (cmd_weightfilt, "weight filtrations of the generators and of the cone"),
    "split": (cmd_split, "Deligne splitting and grading operator"),
    "sl2": (cmd_sl2, "sl2-triple and its normalization against the gamma list"),
    "verify-lmhs": (cmd_verify_lmhs, "limiting mixed Hodge structure certificate"),
    "finfty": (cmd_finfty, "the filtration F_infinity"),
    "strata": (cmd_strata, "boundary strata report"),
    "ext-torus": (cmd_ext_torus, "extension space and its lattice"),
    "chern": (cmd_chern, "Chern form on the extension space"),
    "automorphy": (cmd_automorphy, "factor of automorphy audits"),
    "coeffs": (cmd_coeffs, "coefficients Q(M, N_j)"),
    "orbit": (cmd_orbit, "nilpotent orbit probe"),
}


# ---------------------------------------------------------------------------
# report plumbing


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def make_report(command: str, input_bytes: bytes, status: str, result) -> dict:
    rep = {"command": command, "version": __version__,
           "input_sha256": hashlib.sha256(input_bytes).hexdigest(),
           "status": status, "result": result}
    rep["digest"] = hashlib.sha256(_canonical(rep).encode()).hexdigest()
    return rep


def _human(obj, prefix="", out=None):
    out = [] if out is None else out
    if isinstance(obj, dict):
        for k in sorted(obj):
            _human(obj[k], f"{prefix}.{k}" if prefix else str(k), out)
    elif isinstance(obj, list) and obj and all(isinstance(x, list) for x in obj):
        out.append(f"{prefix}: {_canonical(obj)}")
    elif isinstance(obj, list):
        if all(not isinstance(x, (dict, list)) for x in obj):
            out.append(f"{prefix}: {_canonical(obj)}")
        else:
            for i, x in enumerate(obj):
                _human(x, f"{prefix}[{i}]", out)
    else:
        out.append(f"{prefix}: {obj if isinstance(obj, str) else _canonical(obj)}")
    return out


def _emit(rep: dict, human: bool, out_path: str | None):
    if human:
        text = "\n".join(_human(rep)) + "\n"
    else:
        text = json.dumps(rep, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lmhs", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"lmhs {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True)
    for name, (_, help_) in VERBS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("problem", help="problem file (JSON)")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="human", action="store_false", help="JSON report (default)")
        fmt.add_argument("--human", dest="human", action="store_true", help="flat text report")
        p.add_argument("--out", help="write the report to this file instead of stdout")
        p.add_argument("--timing", action="store_true",
                       help="add elapsed seconds (not covered by the digest)")
        p.set_defaults(human=False)
    p = sub.add_parser("emit-fixtures", help="write the reference problem files")
    p.add_argument("directory")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.verb == "emit-fixtures":
        for path in emit_fixtures(args.directory):
            print(path)
        return 0
    fn = VERBS[args.verb][0]
    t0 = time.perf_counter()
    try:
        with open(args.problem, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        print(f"lmhs: error: {args.problem}: {e.strerror}", file=sys.stderr)
        return 2
    try:
        prob = load_problem(args.problem)
        ok, result = fn(prob)
        status, code = ("pass", 0) if ok else ("fail", 1)
    except InputError as e:
        loc = e.context.get("location")
        print(f"lmhs: input error{f' at {loc}' if loc else ''}: {e}", file=sys.stderr)
        rep = make_report(args.verb, raw, "input_error", e.to_json())
        _emit(rep, args.human, args.out)
        return 2
    except LmhsError as e:
        status, code, result = "fail", 1, {"error": e.to_json()}
    rep = make_report(args.verb, raw, status, result)
    if args.timing:
        rep["timing_seconds"] = round(time.perf_counter() - t0, 6)
    _emit(rep, args.human, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
