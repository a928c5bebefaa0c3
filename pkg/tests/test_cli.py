from __future__ import annotations

import json

from toricdescent.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_complexity_square(capsys, data_dir):
    code, out = run(capsys, "complexity", "--polytope", data_dir / "square.json")
    assert code == 0 and out.strip().splitlines()[0].endswith("2")


def test_hull_and_json_report(capsys, data_dir, tmp_path):
    report = tmp_path / "hull.json"
    code, _ = run(capsys, "hull", "--points", data_dir / "square.json", "--out", report)
    assert code == 0
    data = json.loads(report.read_text())
    assert len(data["polytope"]["vertices"]) == 4


def test_admissible(capsys, data_dir):
    code, out = run(capsys, "admissible", "--polytope", data_dir / "triangle.json",
                    "--target", data_dir / "triangle_target.json")
    assert code == 0 and "valid" in out


def test_hilbert_and_normality(capsys, data_dir):
    code, out = run(capsys, "hilbert", "--rays", data_dir / "segre_cone.json", "--json")
    assert code == 0 and len(json.loads(out)["hilbert_basis"]) == 4
    code, out = run(capsys, "normal", "--generators", data_dir / "monoid.json")
    assert code == 0 and "normal" in out


def test_machine_commands(capsys):
    code, out = run(capsys, "machine-analyze", "--sequence", "++-+-+")
    assert code == 0 and "δ = 0" in out
    code, out = run(capsys, "machine-worst", "--i", 1, "--json")
    rep = json.loads(out)
    assert code == 0 and rep["bound"] == 7 and rep["observed_max"] == 2
    code, _ = run(capsys, "order-check", "--i", 3)
    assert code == 0


def test_sublemma_readings(capsys):
    assert run(capsys, "sublemma", "--n", 4)[0] == 0
    assert run(capsys, "sublemma", "--n", 4, "--literal")[0] == 1


def test_exit_codes_for_bad_input(capsys, tmp_path):
    assert run(capsys, "complexity", "--polytope", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [[0, 0], [1, "x"]]}')
    assert run(capsys, "complexity", "--polytope", bad)[0] == 2
    assert run(capsys, "machine-analyze", "--sequence", "+?")[0] == 2


def test_budget_exit_code(capsys, data_dir):
    code, _ = run(capsys, "hh-rank", "--instance", data_dir / "rank2_instance.json", "--t", 2, 1,
                  "--i", 2, "--d", 12, "--max-terms", 5)
    assert code == 3


def test_descend_from_file(capsys, data_dir):
    code, out = run(capsys, "descend", "--instance", data_dir / "rank2_instance.json", "--t", 2, 1,
                    "--chain", data_dir / "chain_t21.json", "--json")
    assert code == 0
    assert all(json.loads(out)["flags"].values())


def test_certify_documented_instance(capsys, data_dir):
    code, out = run(capsys, "certify", "--instance", data_dir / "rank2_instance.json",
                    "--deg-max", 4, "--samples", 2, "--json")
    rep = json.loads(out)
    assert [w["rank"] for w in rep["image_ranks_window"]] == [0] * 5
    assert rep["window_fallback"] is None
    assert "unavailable" in rep["checks"]["descent"]
    assert code == 0  # nothing failed; the unavailable check is reported, not asserted
