import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import make_tiny1
from oracles import corpus
from packtravel.cli import main
from packtravel.io import load_instance, read_plan, read_results, save_instance
from packtravel.model import Instance, evaluate

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def tiny_path(tmp_path):
    p = tmp_path / "tiny1.json"
    save_instance(make_tiny1(), p)
    return p


def test_evaluate(capsys, tiny_path):
    code, out, _ = run(capsys, "evaluate", "--instance", tiny_path, "--plan", "100")
    doc = json.loads(out)
    assert code == 0
    assert doc["objective"] == pytest.approx(7.260274, abs=1e-6)
    assert doc["per_leg_velocity"] == pytest.approx([0.73, 0.73])


def test_preprocess(capsys, tiny_path):
    code, out, _ = run(capsys, "preprocess", "--instance", tiny_path)
    doc = json.loads(out)
    assert code == 0
    assert doc["compulsory"] == [0, 2] and doc["ver"] == "u"


def test_solve_and_oracle_agree(capsys, tiny_path):
    _, out, _ = run(capsys, "solve", "--instance", tiny_path)
    bb = json.loads(out)
    _, out, _ = run(capsys, "oracle", "--instance", tiny_path)
    oracle = json.loads(out)
    assert bb["plan"] == oracle["plan"] == "101"
    assert bb["objective"] == pytest.approx(oracle["objective"], abs=1e-9)
    assert set(bb["timings"]) == {"wall_time"}


def test_solve_limit_exit_code(capsys, tmp_path):
    buckets = [[(20 + k, 5 + k % 4) for k in range(6)] for _ in range(4)]
    p = tmp_path / "big.json"
    save_instance(Instance.build([2] * 4, buckets, 60, 0.1, 1, 0.5), p)
    code, out, _ = run(capsys, "solve", "--instance", p, "--node-limit", "5", "--no-preprocess")
    assert code == 3
    assert json.loads(out)["proven_optimal"] is False


def test_gen_ssp_then_oracle(capsys, tmp_path):
    inst = tmp_path / "ssp.json"
    code, _, _ = run(capsys, "gen-ssp", "--values", "3,5,7", "--target", "8", "--out", inst)
    assert code == 0
    _, out, _ = run(capsys, "oracle", "--instance", inst)
    doc = json.loads(out)
    assert doc["objective"] == pytest.approx(-14, abs=1e-9)
    assert doc["decision"] == "YES" and doc["weight_hits_target"] is True
    run(capsys, "gen-ssp", "--values", "3,5,7", "--target", "4", "--out", inst)
    _, out, _ = run(capsys, "oracle", "--instance", inst)
    assert json.loads(out)["decision"] == "NO"


def test_gen_ssp_to_stdout(capsys):
    code, out, _ = run(capsys, "gen-ssp", "--values", "4", "--target", "4")
    assert code == 0
    assert json.loads(out)["meta"]["threshold"] == 0


def test_emit_enkp(capsys, tiny_path, tmp_path):
    out_lp = tmp_path / "m.lp"
    code, out, _ = run(capsys, "emit-enkp", "--instance", tiny_path, "--no-preprocess", "--out", out_lp)
    assert code == 0
    assert out_lp.read_bytes() == (DATA / "tiny1_enkp.lp").read_bytes()
    side = json.loads(out_lp.with_suffix(".json").read_text())
    assert side["variables"]["x_1_2"] == {"role": "item", "index": 1, "city": 1, "slot": 2}
    assert json.loads(out)["constraints"] == 23


def test_emit_enkp_with_cuts_carries_constant(capsys, tiny_path, tmp_path):
    out_lp = tmp_path / "m.lp"
    run(capsys, "emit-enkp", "--instance", tiny_path, "--rlt", "--dominance", "--out", out_lp)
    assert "\\ Objective constant: 14" in out_lp.read_text()
    assert json.loads(out_lp.with_suffix(".json").read_text())["objective_constant"] == 14


def test_emit_ankp_beta_bounded(capsys, tiny_path, tmp_path):
    out_lp = tmp_path / "a.lp"
    code, out, _ = run(capsys, "emit-ankp", "--instance", tiny_path, "--tau", "100",
                       "--no-preprocess", "--out", out_lp)
    doc = json.loads(out)
    assert code == 0
    assert 0 < doc["beta"] <= 100 * 101 / 100
    side = json.loads(out_lp.with_suffix(".json").read_text())
    assert side["variables"]["y_1_0"]["speed"] == 1.0


def test_ttp_with_tour(capsys):
    code, out, _ = run(capsys, "evaluate", "--instance", DATA / "tiny3.ttp",
                       "--tour", DATA / "tiny3_rev.tour", "--plan", "11")
    assert code == 0
    inst, _ = load_instance(DATA / "tiny3.ttp", DATA / "tiny3_rev.tour")
    assert json.loads(out)["objective"] == evaluate(inst, read_plan("11", inst)).objective


@pytest.mark.parametrize("argv", [
    ["evaluate", "--instance", "missing.json", "--plan", "1"],
    ["evaluate", "--instance", "{tiny}", "--plan", "11"],
    ["gen-ssp", "--values", "3,x", "--target", "2"],
    ["gen-ssp", "--values", "3", "--target", "9"],
    ["preprocess", "--instance", "{bad}"],
    ["evaluate", "--instance", str(DATA / "tiny3.ttp"), "--tour", "{badtour}", "--plan", "11"],
])
def test_bad_input_exit_code(capsys, tiny_path, tmp_path, argv):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    badtour = tmp_path / "b.tour"
    badtour.write_text("1 1 2\n")
    argv = [a.format(tiny=tiny_path, bad=bad, badtour=badtour) for a in argv]
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_degenerate_velocity_exit_code(capsys, tmp_path):
    p = tmp_path / "d.json"
    save_instance(make_tiny1(capacity=4), p)
    code, _, err = run(capsys, "evaluate", "--instance", p, "--plan", "111")
    assert code == 1 and "velocity" in err


def test_oracle_too_large_exit_code(capsys, tmp_path):
    p = tmp_path / "l.json"
    save_instance(Instance.build([1], [[(1, 1)] * 25], 100, 0.1, 1, 1), p)
    code, _, _ = run(capsys, "oracle", "--instance", p)
    assert code == 1


def test_bench_rows_reevaluate(capsys, tmp_path):
    for k, inst in enumerate(corpus(8, seed=41)):
        save_instance(inst, tmp_path / f"i{k}.json")
    (tmp_path / "i0.lp").write_text("ignored")
    run(capsys, "emit-enkp", "--instance", tmp_path / "i1.json", "--out", tmp_path / "side.lp")
    out_csv = tmp_path / "res.csv"
    code, out, _ = run(capsys, "bench", "--dir", tmp_path, "--out", out_csv, "--workers", "3")
    assert code == 0
    rows = read_results(out_csv)
    assert [r["instance"] for r in rows] == [f"i{k}.json" for k in range(8)]
    for row in rows:
        inst, _ = load_instance(tmp_path / row["instance"])
        value = evaluate(inst, read_plan(row["plan"], inst)).objective
        assert value == pytest.approx(float(row["objective"]), abs=1e-9)
        assert row["ver"] in ("u", "c")


def test_module_entry_point(tiny_path):
    res = subprocess.run([sys.executable, "-m", "packtravel", "preprocess", "--instance", str(tiny_path)],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["alpha"] == pytest.approx(100 / 3)
