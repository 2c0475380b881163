import csv
import io
import json

import pytest

from skisat.cli import main
from skisat.cnf import read_dimacs

from conftest import DATA

UF20 = str(DATA / "uf20-01.cnf")


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"trials": 4, "dynamics": {"max_steps": 1500}}))
    return str(path)


def test_gen_writes_dimacs(tmp_path):
    out = tmp_path / "g.cnf"
    assert main(["gen", "-n", "20", "-m", "91", "--seed", "3", "-o", str(out)]) == 0
    cnf = read_dimacs(out)
    assert (cnf.num_vars, cnf.num_clauses) == (20, 91)
    assert main(["gen", "-n", "2", "-m", "1", "-k", "3"]) == 3


def test_solve_json_and_trace(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    code = main(["solve", UF20, "--seed", "2", "--trace", str(trace)])
    rec = json.loads(capsys.readouterr().out)
    assert code == (0 if rec["solved"] else 1)
    assert rec["seed"] == 2 and "unsat_trace" not in rec
    rows = list(csv.reader(trace.open()))
    assert rows[0] == ["step", "unsat_count", "P"]
    assert len(rows) - 1 == rec["steps_run"]


def test_solve_unsat_exits_one(tmp_path, capsys):
    p = tmp_path / "u.cnf"
    p.write_text("p cnf 1 2\n1 0\n-1 0\n")
    assert main(["solve", str(p), "--mode", "none"]) == 1
    assert json.loads(capsys.readouterr().out)["final_best_unsat"] == 1


def test_malformed_input_exits_three(tmp_path, capsys):
    p = tmp_path / "bad.cnf"
    p.write_text("p cnf 2 1\n1 5 0\n")
    assert main(["solve", str(p)]) == 3
    assert "line 2" in capsys.readouterr().err
    assert main(["solve", str(tmp_path / "missing.cnf")]) == 3


def test_bad_config_exits_three(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text('{\n "trials": 2,\n "nope": 1\n}')
    assert main(["bench", UF20, "--config", str(p)]) == 3
    assert "c.json:3" in capsys.readouterr().err


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["solve"])
    assert exc.value.code == 2


def test_bench_csv_over_glob(small_config, capsys):
    pattern = str(DATA / "rand50-218-s500[03].cnf")
    assert main(["bench", pattern, "--config", small_config, "--out", "csv", "--jobs", "1"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["instance"] for r in rows] == ["rand50-218-s5000", "rand50-218-s5003"]
    assert all(r["trials"] == "4" for r in rows)


def test_bench_json_with_records_and_power(small_config, capsys):
    assert main(["bench", UF20, "--config", small_config, "--jobs", "1", "--records",
                 "--power", "0.02"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert len(rep["records"]) == 4
    assert rep["power_watts"] == 0.02
    if rep["tts_seconds"] is not None:
        assert rep["ets_joules"] == pytest.approx(rep["tts_seconds"] * 0.02)


def test_ablate_runs_three_modes(small_config, capsys):
    assert main(["ablate", UF20, "--config", small_config, "--jobs", "1"]) == 0
    reps = json.loads(capsys.readouterr().out)
    assert [r["solver"] for r in reps] == ["skisat:none", "skisat:gaussian_noise", "skisat:ski_pulse"]


def test_oracle(tmp_path, capsys):
    assert main(["oracle", UF20]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["satisfiable"] and out["min_unsat"] == 0
    assert main(["oracle", UF20, "--walksat", "--seed", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["solver"] == "walksat"
    big = tmp_path / "big.cnf"
    main(["gen", "-n", "40", "-m", "10", "-o", str(big)])
    assert main(["oracle", str(big)]) == 3


def test_config_init(tmp_path, capsys):
    p = tmp_path / "c.json"
    assert main(["config", "init", str(p)]) == 0
    assert json.loads(p.read_text())["perturbation"]["slot_steps"] == 16
    assert main(["config", "init", str(p)]) == 3
    assert main(["config", "init", str(p), "--force"]) == 0
