"""Reference problems A, A', B, C, D and two designed failures."""

from __future__ import annotations

import json
from pathlib import Path

from .linalg import Mat, block_diag, exp_nilpotent
from .problem import Problem, problem_from_dict, problem_to_dict
from .scalars import I


def _json(M: Mat):
    return M.to_json()


Q_A = Mat([[0, 1], [-1, 0]])
N_A = Mat([[0, 0], [1, 0]])
Q_C = Mat([[0, 0, 1], [0, -1, 0], [1, 0, 0]])
N_C = Mat([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
Q_D = Mat([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
N_D = Mat.unit(4, 2, 0)
# rational basis of c^{-1} / c^{-2} for fixture D and a unipotent Levi element
R1_D = Mat.unit(4, 1, 0) - Mat.unit(4, 2, 3)
R2_D = Mat.unit(4, 3, 0) + Mat.unit(4, 2, 1)
U_D = Mat.unit(4, 1, 3)


def _space(Q: Mat, n: int) -> dict:
    return {"rank": Q.nrows, "weight": n, "Q": _json(Q)}


def _cols(*vectors) -> list:
    return Mat.from_columns(vectors).to_json()


def fixture_dicts() -> dict[str, dict]:
    Id4 = Mat.identity(4)
    A = {
        "name": "A",
        "description": "weight 1, rank 2, N e1 = e2, F^1 = span(e1 + i e2)",
        "space": _space(Q_A, 1),
        "cone": [_json(N_A)],
        "hodge": {"1": _cols((1, I))},
        "gamma": [_json(exp_nilpotent(N_A))],
        "params": {"z": [[{"re": 0, "im": 1}], [{"re": 3, "im": "1/2"}], [{"re": 0, "im": -1}]]},
    }
    A_prime = dict(A, name="A_prime", description="fixture A with F^1 = span(e1)",
                   hodge={"1": _cols((1, 0))})
    QB = block_diag(Q_A, Q_A)
    N1 = block_diag(N_A, N_A)
    N2 = block_diag(N_A, Mat.zeros(2))
    B = {
        "name": "B",
        "description": "two-component boundary on A + A: N1 = (N_A, N_A), N2 = (N_A, 0)",
        "space": _space(QB, 1),
        "complex": {"nu": 2, "strata": [[1], [2], [1, 2]],
                    "N": {"1": _json(N1), "2": _json(N2)},
                    "gamma": [_json(exp_nilpotent(N1)), _json(exp_nilpotent(N2))]},
        "hodge": {"1": _cols((1, I, 0, 0), (0, 0, 1, I))},
        "params": {"I": [1], "J": [1, 2], "S": [[1], [1, 2]]},
    }
    C = {
        "name": "C",
        "description": "weight 2, rank 3, principal nilpotent e1 -> e2 -> e3",
        "space": _space(Q_C, 2),
        "cone": [_json(N_C)],
        "hodge": {"2": _cols((1, 0, 0)), "1": _cols((1, 0, 0), (0, 1, 0))},
        "gamma": [_json(exp_nilpotent(N_C.scale(2)))],
    }
    D = {
        "name": "D",
        "description": "weight 1, rank 4, N e1 = e3, F^1 = span(e1, e2 + i e4)",
        "space": _space(Q_D, 1),
        "cone": [_json(N_D)],
        "hodge": {"1": _cols((1, 0, 0, 0), (0, 1, 0, I))},
        "gamma": [_json(Id4 + R1_D), _json(Id4 + R2_D), _json(Id4 + U_D)],
        "params": {"radical": [0, 1], "k": 2},
    }
    A_neg = dict(A, name="A_negN", description="fixture A with -N: polarization fails",
                 cone=[_json(-N_A)], gamma=[_json(exp_nilpotent(-N_A))])
    D_flip = dict(D, name="D_flipped",
                  description="fixture D with F^1 = span(e1, e2 - i e4): polarization fails",
                  hodge={"1": _cols((1, 0, 0, 0), (0, 1, 0, -I))})
    return {"A": A, "A_prime": A_prime, "B": B, "C": C, "D": D,
            "A_negN": A_neg, "D_flipped": D_flip}


def fixture(name: str) -> Problem:
    return problem_from_dict(fixture_dicts()[name])


def emit_fixtures(directory: str | Path) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    out = []
    for name, data in fixture_dicts().items():
        p = d / f"{name}.json"
        canon = problem_to_dict(problem_from_dict(data))
        p.write_text(json.dumps(canon, indent=2, sort_keys=True) + "\n")
        out.append(p)
    return out
