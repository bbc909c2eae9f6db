"""CLI contract: exit codes, formats, golden files, determinism."""

import json
import subprocess
import sys
from pathlib import Path

import pytest
from click.testing import CliRunner

from floeralg import maslov as mv
from floeralg import serialize
from floeralg.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run_cli(*args):
    # click >= 8.2 separates stdout and stderr by default
    return CliRunner().invoke(main, list(args))


def run_proc(*args):
    return subprocess.run([sys.executable, "-m", "floeralg.cli", *args],
                          capture_output=True, text=True)


def golden(name):
    return (GOLDEN / name).read_text(encoding="utf-8")


# -- ring ------------------------------------------------------------------


def test_ring_torus_golden():
    r = run_cli("ring", "torus", "--n", "2")
    assert r.exit_code == 0
    assert r.stdout == golden("ring_torus_2.json")
    assert len(json.loads(r.stdout)["basis"]) == 4


def test_ring_rp_golden():
    r = run_cli("ring", "rp", "--n", "3")
    assert r.exit_code == 0
    assert r.stdout == golden("ring_rp_3.json")
    data = json.loads(r.stdout)
    assert [b["degree"] for b in data["basis"]] == [0, 1, 2, 3]


def test_ring_size_limit_exit_2():
    r = run_cli("ring", "torus", "--n", "99")
    assert r.exit_code == 2
    assert r.stderr.startswith("error:")


def test_ring_round_trip():
    r = run_cli("ring", "torus", "--n", "3")
    ring = serialize.ring_from_dict(json.loads(r.stdout))
    assert serialize.canonical_json(serialize.ring_to_dict(ring)) == r.stdout


def test_unknown_flag_is_an_error():
    r = run_cli("ring", "torus", "--n", "2", "--bogus")
    assert r.exit_code == 2


# -- ss run -------------------------------------------------------------------


def test_ss_run_worked_example_golden():
    r = run_cli("ss", "run", str(GOLDEN / "t2_complex.json"))
    assert r.exit_code == 0
    assert r.stdout == golden("ss_run_t2.json")
    data = json.loads(r.stdout)
    assert data["pages"][1]["V"] == {"0": 1, "1": 2, "2": 1}
    assert data["pages"][2]["V"] == {"0": 0, "1": 0, "2": 0}


def test_ss_run_corrupted_operator_exit_2(tmp_path):
    data = json.loads(golden("t2_complex.json"))
    data["operators"]["1"] = sorted(data["operators"]["1"] + [[1, 3]])
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    r = run_cli("ss", "run", str(bad))
    assert r.exit_code == 2
    assert "witness generator" in r.stderr


def test_ss_run_zero_higher_ops(tmp_path):
    data = json.loads(golden("t2_complex.json"))
    data["operators"] = {"0": []}
    data.pop("products")
    path = tmp_path / "frozen.json"
    path.write_text(json.dumps(data))
    r = run_cli("ss", "run", str(path))
    assert r.exit_code == 0
    out = json.loads(r.stdout)
    dims = out["pages"][1]["V"]
    assert all(p["V"] == dims for p in out["pages"][1:])


def test_ss_run_verbose_pages():
    r = run_cli("ss", "run", str(GOLDEN / "t2_complex.json"), "--verbose-pages")
    assert r.exit_code == 0
    data = json.loads(r.stdout)
    assert "representatives" in data["pages"][1]
    assert "delta" in data["pages"][1]


def test_ss_run_rejects_bad_schema(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text('{"dimL": 2}')
    r = run_cli("ss", "run", str(path))
    assert r.exit_code == 2


def test_ss_run_rejects_duplicate_entries(tmp_path):
    data = json.loads(golden("t2_complex.json"))
    data["operators"]["1"] = data["operators"]["1"] + data["operators"]["1"][:1]
    path = tmp_path / "dup.json"
    path.write_text(json.dumps(data))
    r = run_cli("ss", "run", str(path))
    assert r.exit_code == 2
    assert "twice" in r.stderr


def test_complex_file_round_trip():
    data = json.loads(golden("t2_complex.json"))
    fc = serialize.complex_from_dict(data)
    assert serialize.complex_to_dict(fc) == data


# -- audin / rp ------------------------------------------------------------------


def test_audin_contradiction_exit_0_golden():
    r = run_cli("audin", "torus", "--n", "3", "--maslov", "4", "--displaceable")
    assert r.exit_code == 0
    assert r.stdout == golden("audin_torus_3_4.json")


def test_audin_consistent_exit_1_golden():
    r = run_cli("audin", "torus", "--n", "2", "--maslov", "2", "--displaceable")
    assert r.exit_code == 1
    assert r.stdout == golden("audin_torus_2_2.json")


def test_audin_odd_maslov_warning_on_stderr():
    r = run_cli("audin", "torus", "--n", "3", "--maslov", "3", "--displaceable")
    assert r.exit_code == 0
    assert "warning" in r.stderr


def test_audin_ring_file(tmp_path):
    ring_json = run_cli("ring", "rp", "--n", "4").stdout
    path = tmp_path / "rp4.json"
    path.write_text(ring_json)
    r = run_cli("audin", "ring", "--ring-file", str(path), "--maslov", "3",
                "--displaceable")
    assert r.exit_code == 0
    assert json.loads(r.stdout)["verdict"] == "contradiction"


def test_rp_golden():
    r = run_cli("rp", "--n", "5", "--maslov", "3")
    assert r.exit_code == 0
    assert r.stdout == golden("rp_5_3.json")
    d = json.loads(r.stdout)
    assert d["hf_total_rank"] == 6 and d["intersection_bound"] == 6


def test_rp_hypothesis_failure_exit_2():
    r = run_cli("rp", "--n", "4", "--maslov", "2")
    assert r.exit_code == 2


# -- derivations ------------------------------------------------------------------


def test_derivations_enumerate_golden():
    r = run_cli("derivations", "enumerate", "--kind", "torus", "--n", "2",
                "--shift", "-1")
    assert r.exit_code == 0
    assert r.stdout == golden("derivations_torus_2_m1.json")
    d = json.loads(r.stdout)
    assert d["count"] == 4 and d["nonzero"] == 3


def test_derivations_forced_zero():
    r = run_cli("derivations", "enumerate", "--kind", "rp", "--n", "5",
                "--shift", "-2")
    d = json.loads(r.stdout)
    assert d["count"] == 1 and d["nonzero"] == 0


# -- maslov ---------------------------------------------------------------------


def test_maslov_index_rotating(tmp_path):
    loop = mv.rotating_loop(1, 256)
    path = tmp_path / "loop.json"
    path.write_text(serialize.canonical_json(serialize.loop_to_dict(loop)))
    r = run_cli("maslov", "index", str(path))
    assert r.exit_code == 0
    assert json.loads(r.stdout)["index"] == 1


def test_maslov_index_constant(tmp_path):
    path = tmp_path / "loop.json"
    path.write_text(serialize.canonical_json(
        serialize.loop_to_dict(mv.constant_loop(2))))
    r = run_cli("maslov", "index", str(path))
    assert r.exit_code == 0
    assert json.loads(r.stdout)["index"] == 0


def test_maslov_coarse_exit_3(tmp_path):
    path = tmp_path / "loop.json"
    path.write_text(serialize.canonical_json(
        serialize.loop_to_dict(mv.rotating_loop(1, 4))))
    r = run_cli("maslov", "index", str(path))
    assert r.exit_code == 3
    assert "resample" in r.stderr


# -- corpus ---------------------------------------------------------------------


def test_corpus_all_pass(tmp_path):
    out = tmp_path / "corpus"
    r = run_cli("corpus", "--seed", "42", "--count", "8", "--dims", "1,2,2,1",
                "--maslov", "2", "--out", str(out))
    assert r.exit_code == 0
    d = json.loads(r.stdout)
    assert d["passed"] == 8 and not d["failed_seeds"]
    assert len(list(out.glob("complex_*.json"))) == 8


def test_corpus_empty(tmp_path):
    r = run_cli("corpus", "--seed", "1", "--count", "0", "--dims", "1,1",
                "--maslov", "2", "--out", str(tmp_path / "c"))
    assert r.exit_code == 0
    assert json.loads(r.stdout)["count"] == 0


def test_corpus_files_reload_and_revalidate(tmp_path):
    out = tmp_path / "corpus"
    run_cli("corpus", "--seed", "7", "--count", "3", "--dims", "2,2,2",
            "--maslov", "3", "--out", str(out))
    for path in sorted(out.glob("complex_*.json")):
        data = json.loads(path.read_text())
        fc = serialize.complex_from_dict(data)
        assert serialize.complex_to_dict(fc) == data


def test_corpus_file_feeds_ss_run(tmp_path):
    # end to end across two commands: generate, then analyze the emitted file
    out = tmp_path / "corpus"
    run_cli("corpus", "--seed", "3", "--count", "1", "--dims", "1,3,3,1",
            "--maslov", "2", "--out", str(out))
    path = next(out.glob("complex_*.json"))
    r = run_cli("ss", "run", str(path))
    assert r.exit_code == 0
    assert json.loads(r.stdout)["convergence"]["ok"]


# -- determinism across processes ---------------------------------------------------


@pytest.mark.parametrize("args", [
    ("ring", "torus", "--n", "3"),
    ("audin", "torus", "--n", "4", "--maslov", "5", "--displaceable"),
    ("derivations", "enumerate", "--kind", "torus", "--n", "3", "--shift", "-1"),
    ("rp", "--n", "6", "--maslov", "4"),
])
def test_rerun_byte_identical(args):
    a = run_proc(*args)
    b = run_proc(*args)
    assert a.stdout == b.stdout
    assert a.returncode == b.returncode


def test_table_format_renders():
    r = run_cli("audin", "torus", "--n", "3", "--maslov", "4", "--displaceable",
                "--format", "table")
    assert r.exit_code == 0
    assert "verdict: contradiction" in r.stdout
    r2 = run_cli("ss", "run", str(GOLDEN / "t2_complex.json"), "--format", "table")
    assert "convergence ok: True" in r2.stdout
