import json

import pytest

from lmhs.cli import main, make_report
from lmhs.fixtures import emit_fixtures, fixture_dicts
from lmhs.problem import problem_from_dict, problem_to_dict


@pytest.fixture(scope="module")
def fx(tmp_path_factory):
    d = tmp_path_factory.mktemp("fixtures")
    emit_fixtures(d)
    return d


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_emit_fixtures_round_trip(fx):
    names = sorted(p.stem for p in fx.glob("*.json"))
    assert names == sorted(fixture_dicts())
    for name, data in fixture_dicts().items():
        on_disk = json.loads((fx / f"{name}.json").read_text())
        assert problem_to_dict(problem_from_dict(on_disk)) == on_disk
        p, q = problem_from_dict(data), problem_from_dict(on_disk)
        assert (q.space, q.F, q.gamma, q.params) == (p.space, p.F, p.gamma, p.params)
        assert q.cone.generators == p.cone.generators


def test_verify_lmhs_exit_codes(fx, capsys):
    code, out, _ = run(capsys, "verify-lmhs", fx / "A.json")
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "pass" and rep["result"]["passed"]
    code, out, _ = run(capsys, "verify-lmhs", fx / "A_negN.json")
    rep = json.loads(out)
    assert code == 1 and rep["status"] == "fail"
    assert rep["result"]["failures"] == ["d: sample 0 k=1 (p,q)=(1,1) signature [0, 1, 0]"]


def test_input_error_non_nilpotent(tmp_path, capsys):
    data = fixture_dicts()["A"]
    data["cone"] = [[[1, 0], [0, -1]]]
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(data))
    code, out, err = run(capsys, "weightfilt", f)
    assert code == 2 and "input error" in err
    assert json.loads(out)["status"] == "input_error"


def test_input_error_location(tmp_path, capsys):
    data = fixture_dicts()["A"]
    data["space"]["Q"][0][1] = 0.5
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(data))
    code, _, err = run(capsys, "split", f)
    assert code == 2 and "space.Q[0][1]" in err
    f.write_text("{\n  \"space\": ")
    code, _, err = run(capsys, "split", f)
    assert code == 2 and "line 2" in err


def test_missing_section(fx, capsys):
    code, _, err = run(capsys, "strata", fx / "A.json")
    assert code == 2 and "complex" in err


def test_strata_report(fx, capsys):
    code, out, _ = run(capsys, "strata", fx / "B.json")
    res = json.loads(out)["result"]
    assert code == 0
    wt = {tuple(s["I"]): s["wt"] for s in res["report"]["strata"]}
    assert wt == {(1,): [[1], [1, 2]], (2,): [[2]], (1, 2): [[1, 2]]}
    assert res["sigma_a_prime"]["labels"] == [1, 2] and res["inclusions"]["passed"]


def test_chern_on_fixture_D_reports_sign(fx, capsys):
    code, out, _ = run(capsys, "chern", fx / "D.json")
    res = json.loads(out)["result"]
    assert res["E_prime"]["signature"] == [0, 1, 0] and res["minus_M_signature"] == [1, 0, 0]
    assert code == 1


def test_human_output(fx, capsys):
    code, out, _ = run(capsys, "sl2", fx / "C.json", "--human")
    assert code == 0 and "result.relations.MN: true" in out.splitlines()


def test_out_and_timing(fx, tmp_path, capsys):
    target = tmp_path / "r.json"
    run(capsys, "finfty", fx / "C.json", "--out", target, "--timing")
    rep = json.loads(target.read_text())
    assert "timing_seconds" in rep
    timing = rep.pop("timing_seconds")
    assert timing >= 0
    assert make_report(rep["command"], (fx / "C.json").read_bytes(), rep["status"],
                       rep["result"])["digest"] == rep["digest"]


def test_threads_env_does_not_change_report(fx, capsys, monkeypatch):
    _, one, _ = run(capsys, "strata", fx / "B.json")
    monkeypatch.setenv("LMHS_THREADS", "4")
    _, four, _ = run(capsys, "strata", fx / "B.json")
    assert one == four


@pytest.mark.parametrize("verb", ["weightfilt", "split", "sl2", "verify-lmhs", "finfty",
                                  "ext-torus", "chern", "automorphy", "coeffs", "orbit"])
def test_verbs_deterministic(fx, capsys, verb):
    a = run(capsys, verb, fx / "D.json")
    b = run(capsys, verb, fx / "D.json")
    assert a == b and a[0] in (0, 1)
