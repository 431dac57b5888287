import json

import numpy as np
import pytest

from angcurv import _mc
from angcurv.cli import main, run
from angcurv.curvmeas import weight_to_json, Federer
from angcurv.exterior import BiGradedForm
from angcurv.polytope import cube, simplex


@pytest.fixture
def files(tmp_path):
    def write(name, data):
        p = tmp_path / name
        p.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(p)

    return write


def report(argv, capsys):
    code, rep = run(argv)
    out = capsys.readouterr()
    return code, rep, out


def test_intrinsic_cube(files, capsys):
    code, rep, out = report(["intrinsic", "--polytope", files("cube3.json", cube(3).to_json())], capsys)
    assert code == 0
    assert rep["results"]["V"] == pytest.approx([1, 3, 3, 1], abs=1e-12)
    assert json.loads(out.out)["command"] == "intrinsic"


def test_classify_rank_example(capsys):
    code, rep, _ = report(["classify-rank", "--n", "4", "--k", "2", "--samples", "5000", "--seed", "1"], capsys)
    assert code == 0
    r = rep["results"]
    assert (r["rank"], r["expected"], r["verdict"]) == (20, 20, "pass")


def test_lemma_checks_all_zero(capsys):
    code, rep, _ = report(["lemma-checks", "--nmax", "8"], capsys)
    assert code == 0
    assert not any(rep["results"]["tensor_residuals"].values())
    assert not any(rep["results"]["branch_residuals"].values())


def test_seed_required_for_sampling(files, capsys):
    P = files("cube.json", cube(2).to_json())
    for argv in (["crofton", "--polytope", P, "--k", "1"], ["steiner", "--polytope", P], ["classify-rank", "--n", "3", "--k", "1"]):
        code, _, out = report(argv, capsys)
        assert code == 1 and "--seed" in out.err


def test_parse_errors_name_the_path(files, capsys):
    bad = files("bad.json", {"n": 2, "vertices": [[0, 0], [1, 0, 3]]})
    code, _, out = report(["faces", "--polytope", bad], capsys)
    assert code == 1 and "vertices[1]" in out.err and "bad.json" in out.err
    broken = files("broken.json", "{not json")
    code, _, out = report(["faces", "--polytope", broken], capsys)
    assert code == 1 and "line 1" in out.err
    form = files("form.json", {"n": 2, "base": 1, "fiber": 1, "terms": [{"base_idx": [5], "fiber_idx": [1], "coef": 1}]})
    code, _, out = report(["direct-cc", "--form", form, "--polytope", files("sq.json", cube(2).to_json()), "--seed", "1"], capsys)
    assert code == 1 and "terms[0].base_idx" in out.err
    box = files("box.json", {"lo": [0, 0]})
    w = files("w.json", weight_to_json(Federer(1)))
    code, _, out = report(["evaluate", "--weight", w, "--polytope", files("sq2.json", cube(2).to_json()), "--box", box], capsys)
    assert code == 1 and "hi: missing" in out.err


def test_usage_errors_exit_1(capsys):
    assert main(["no-such-command"]) == 1
    assert main(["classify-rank", "--n", "x", "--k", "1"]) == 1
    assert main(["lr", "--lam", "2,1"]) == 1
    capsys.readouterr()


def test_failed_check_exits_2(files, capsys):
    # zero tolerance turns any Monte Carlo residual into a failure
    P = files("sq.json", cube(2).to_json())
    code, rep, _ = report(["steiner", "--polytope", P, "--eps", "0.5", "--samples", "20000", "--seed", "3", "--tol", "0"], capsys)
    assert code == 2 and rep["verdicts"] == {"eps=0.5": False}
    code, _, _ = report(["steiner", "--polytope", P, "--eps", "0.5", "--samples", "20000", "--seed", "3"], capsys)
    assert code == 0


def test_deterministic_and_thread_independent(files, capsys):
    P = files("tri.json", simplex(2).to_json())
    argv = ["crofton", "--polytope", P, "--k", "1", "--samples", "1e5", "--seed", "7"]
    old = _mc.get_threads()
    try:
        _, a, _ = report(argv + ["--threads", "1"], capsys)
        _, b, _ = report(argv + ["--threads", "3"], capsys)
    finally:
        _mc.set_threads(old)
    assert a["results"] == b["results"]
    assert a["inputs_digest"] == b["inputs_digest"]
    _, c, _ = report(argv[:-1] + ["8"], capsys)
    assert c["inputs_digest"] != a["inputs_digest"] and c["results"] != a["results"]


def test_json_out(files, tmp_path, capsys):
    out = tmp_path / "rep.json"
    code, rep, _ = report(["weyl-dim", "--group", "so", "--n", "4", "--weight", "2,-2", "--json-out", str(out)], capsys)
    assert code == 0 and rep["results"]["dim"] == 5
    assert json.loads(out.read_text()) == rep


def test_rep_commands(capsys):
    _, rep, _ = report(["lr", "--lam", "2,1", "--mu", "2,1", "--nu", "3,2,1"], capsys)
    assert rep["results"]["coefficient"] == 2
    _, rep, _ = report(["lr", "--lam", "1", "--mu", "1", "--n", "2"], capsys)
    assert {tuple(d["nu"]): d["multiplicity"] for d in rep["results"]["decomposition"]} == {(2,): 1, (1, 1): 1}
    _, rep, _ = report(["branch", "--lam", "2,2", "--n", "4"], capsys)
    r = rep["results"]
    assert r["gl_dim"] == 20 and sorted(tuple(c["mu"]) for c in r["constituents"]) == [(), (2,), (2, 2)]


def test_strichartz_and_fit(files, capsys):
    _, rep, _ = report(["strichartz", "--n", "4", "--k", "1", "--m", "2", "--phi", "1.0471975511965976"], capsys)
    assert rep["results"]["value"]["re"] == pytest.approx(0.0625)
    code, rep, _ = report(["fit-quadratic", "--n", "4", "--k", "2", "--m1", "2"], capsys)
    assert code == 0 and rep["results"]["quadratic"] is False
    frames = np.linalg.qr(np.random.default_rng(0).standard_normal((60, 3, 1)))[0]
    vals = frames[:, 0, 0] ** 2
    data = files("fit.json", {"frames": frames.tolist(), "values": vals.tolist()})
    _, rep, _ = report(["fit-quadratic", "--data", data], capsys)
    assert rep["results"]["residual"] < 1e-12


def test_geometry_commands(files, capsys):
    sq = files("sq.json", cube(2).to_json())
    _, rep, _ = report(["faces", "--polytope", sq], capsys)
    assert rep["results"]["f_vector"] == [4, 4, 1]
    cone = files("cone.json", {"n": 3, "generators": np.eye(3).tolist(), "lineality": []})
    _, rep, _ = report(["angle", "--cone", cone], capsys)
    assert rep["results"]["angle"] == pytest.approx(0.125) and rep["results"]["exact"]
    cone4 = files("cone4.json", {"n": 4, "generators": np.eye(4).tolist()})
    code, _, _ = report(["angle", "--cone", cone4], capsys)
    assert code == 1
    om = files("om.json", BiGradedForm.term(2, (0,), (1,)).to_json())
    code, rep, _ = report(["direct-cc", "--form", om, "--polytope", sq, "--samples", "20000", "--seed", "2"], capsys)
    assert code == 0 and rep["verdicts"]["angular"]
    w = files("w.json", weight_to_json(Federer(1)))
    code, rep, _ = report(["vk-action", "--weight", w, "--polytope", sq, "--samples", "2e5", "--seed", "4"], capsys)
    assert code == 0 and abs(rep["results"]["value"] - np.pi / 2) < 3 * rep["results"]["sigma"]
    code, rep, _ = report(["evaluate", "--weight", w, "--polytope", sq], capsys)
    assert rep["results"]["total"] == pytest.approx(2.0)


def test_verify_all_subset(capsys):
    code, rep, out = report(["verify-all", "--only", "9,10"], capsys)
    assert code == 0
    assert out.err.count("PASS") == 2
    assert set(rep["verdicts"]) == {"criterion 9", "criterion 10"}
