import csv
import json
import subprocess
import sys

import pytest

from polydg.cli import main
from polydg.mesh import build_mesh, load_mesh, save_mesh


def run(*argv):
    try:
        return main([str(a) for a in argv])
    except SystemExit as exc:  # argparse usage errors
        return exc.code


@pytest.fixture(scope="module")
def dualhex8_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("mesh") / "dh8.json"
    assert run("generate", "dualhex", 8, path) == 0
    return path


@pytest.mark.parametrize("family, n, cells", [("dualhex", 8, 81), ("hybrid", 2, 12)])
def test_generate(tmp_path, capsys, family, n, cells):
    out = tmp_path / "m.json"
    assert run("generate", family, n, out) == 0
    data = json.loads(out.read_text())
    assert len(data["cells"]) == cells
    assert f"{cells} cells" in capsys.readouterr().out


def test_generate_invalid_family(tmp_path, capsys):
    assert run("generate", "voronoi", 8, tmp_path / "m.json") == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("n", ["3", "0", "x"])
def test_generate_invalid_n(tmp_path, capsys, n):
    assert run("generate", "hybrid", n, tmp_path / "m.json") == 2
    assert "error" in capsys.readouterr().err
    assert not (tmp_path / "m.json").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "polydg", "generate", "hexagons", "4",
                           str(tmp_path / "m.json")], capture_output=True, text=True)
    assert proc.returncode == 2 and "usage" in proc.stderr


def test_solve_paper_problem(tmp_path):
    mesh = tmp_path / "dh16.json"
    out = tmp_path / "r.json"
    assert run("generate", "dualhex", 16, mesh) == 0
    assert run("solve", mesh, out, "--problem", "paper") == 0
    res = json.loads(out.read_text())
    assert res["solver"]["converged"] and res["solver"]["method"] == "cg"
    assert res["params"] == {"degree": 1, "delta": 1, "alpha": 10.0, "problem": "paper", "tol": 1e-10}
    assert 0.0461 / 2 <= res["errors"]["l2"] <= 0.0461 * 2
    assert len(res["solution"]["coefficients"]) == 3 * 17 * 17


def test_solve_sinsin_norm_ordering(tmp_path, dualhex8_file):
    out = tmp_path / "r.json"
    assert run("solve", dualhex8_file, out, "--problem", "sinsin", "--delta", "-1") == 0
    res = json.loads(out.read_text())
    err = res["errors"]
    assert res["solver"]["method"] == "bicgstab"
    assert all(v == v and v < float("inf") for v in err.values())
    assert err["energy"] >= err["h1_broken"]


def test_solve_small_penalty_exit_3(tmp_path, dualhex8_file, capsys):
    out = tmp_path / "r.json"
    assert run("solve", dualhex8_file, out, "--alpha", "0.01") == 3
    assert "not positive definite" in capsys.readouterr().err
    res = json.loads(out.read_text())
    assert res["solver"]["converged"] is False


def test_solve_unreadable_mesh(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("solve", bad, tmp_path / "r.json") == 2
    assert run("solve", tmp_path / "missing.json", tmp_path / "r.json") == 2
    assert run("audit", tmp_path / "missing.json", tmp_path / "a.json") == 2


def test_solve_round_trip_is_bitwise(tmp_path, dualhex8_file):
    copy = tmp_path / "copy.json"
    save_mesh(load_mesh(dualhex8_file), copy)
    outs = []
    for i, mesh in enumerate((dualhex8_file, copy)):
        out = tmp_path / f"r{i}.json"
        assert run("solve", mesh, out) == 0
        outs.append(json.loads(out.read_text()))
    assert outs[0]["errors"] == outs[1]["errors"]
    assert outs[0]["solution"] == outs[1]["solution"]


def test_convergence_outputs(tmp_path, capsys):
    csv_path, svg_path, js = tmp_path / "c.csv", tmp_path / "c.svg", tmp_path / "c.json"
    assert run("convergence", "hybrid", 4, 8, 16, "--problem", "sinsin",
               "--csv", csv_path, "--svg", svg_path, "--json", js) == 0
    with open(csv_path) as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["cells"]) for r in rows] == [48, 192, 768]
    assert rows[0]["rate_L2"] == "" and float(rows[-1]["rate_H1"]) > 0.8
    assert svg_path.read_text().startswith("<svg")
    data = json.loads(js.read_text())
    assert set(data["fitted"]) == {"l2", "h1_broken", "energy"}
    assert "fitted rates" in capsys.readouterr().out


def test_convergence_identical_levels(tmp_path, capsys):
    assert run("convergence", "dualhex", 8, 8, "--csv", tmp_path / "c.csv") == 2
    assert "strictly decrease h" in capsys.readouterr().err
    assert not (tmp_path / "c.csv").exists()


def test_convergence_single_level(tmp_path):
    assert run("convergence", "dualhex", 8, "--csv", tmp_path / "c.csv") == 2


def test_audit(tmp_path, dualhex8_file):
    out = tmp_path / "a.json"
    assert run("audit", dualhex8_file, out) == 0
    rep = json.loads(out.read_text())
    assert rep["kappa"] > 0.3
    assert rep["worst"]["kappa"]["value"] == rep["kappa"]


def test_audit_unit_square(tmp_path):
    mesh, out = tmp_path / "sq.json", tmp_path / "a.json"
    save_mesh(build_mesh([(0, 0), (1, 0), (1, 1), (0, 1)], [[0, 1, 2, 3]]), mesh)
    assert run("audit", mesh, out) == 0
    assert json.loads(out.read_text())["rho_v"] == pytest.approx(0.5)


def test_audit_lists_sliver(tmp_path):
    mesh, out = tmp_path / "sl.json", tmp_path / "a.json"
    v = [(0, 0), (1, 0), (1, 1), (0, 1), (2, 0), (2, 1e-6)]
    save_mesh(build_mesh(v, [[0, 1, 2, 3], [1, 4, 5]]), mesh)
    assert run("audit", mesh, out) == 0
    rep = json.loads(out.read_text())
    assert rep["worst"]["rho_v"]["cell"] == 1
    assert rep["rho_v"] == pytest.approx(5e-7, rel=1e-6)


def test_audit_warns_but_succeeds(tmp_path, capsys):
    mesh, out = tmp_path / "c.json", tmp_path / "a.json"
    v = [(0, 0), (3, 0), (3, 1), (1, 1), (1, 2), (3, 2), (3, 3), (0, 3)]
    save_mesh(build_mesh(v, [list(range(8))]), mesh)
    assert run("audit", mesh, out) == 0
    assert "warning" in capsys.readouterr().err
    assert json.loads(out.read_text())["non_star_cells"] == [0]
