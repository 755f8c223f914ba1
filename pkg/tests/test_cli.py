import csv
import io
import json

import pytest

from sqfock import __version__
from sqfock.cli import (EXIT_INFEASIBLE, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, Table,
                        UsageError, main, parse_grid, parse_values, render)
from sqfock.protocol import energy_cost, optimal_entangler, solve_inputs
from sqfock.states import SFTarget


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            k, v = line[2:].split("=", 1)
            meta[k] = v
        else:
            body.append(line)
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    return meta, rows


def test_parse_values_list_and_range():
    assert parse_values("1,2,3", int) == [1, 2, 3]
    assert parse_values("0:1:3") == [0.0, 0.5, 1.0]
    assert parse_values("2:5:1") == [2.0]


@pytest.mark.parametrize("text", ["0:1:0", "a,b", "nan", "inf", ""])
def test_parse_values_rejects(text):
    with pytest.raises(UsageError):
        parse_values(text)


def test_parse_grid():
    g1, g2 = parse_grid("r1:-1:1:3,r2:0:1:2")
    assert list(g1) == [-1.0, 0.0, 1.0] and list(g2) == [0.0, 1.0]
    with pytest.raises(UsageError):
        parse_grid("r1:-1:1:3")
    with pytest.raises(UsageError):
        parse_grid("r3:0:1:2,r2:0:1:2")


def test_render_formats():
    table = Table(["x", "y"], [[1, 0.1 + 0.2], [2, float("nan")]], {"k": True})
    assert render(table, "csv") == "# k=true\nx,y\n1,0.3\n2,nan\n"
    doc = json.loads(render(table, "json"))
    assert doc == {"metadata": {"k": True}, "columns": ["x", "y"],
                   "data": {"x": [1, 2], "y": [0.3, None]}}


def test_solve_cz_record(capsys):
    code, out, _ = run(["solve", "--n", "1", "--R", "1", "--kind", "cz"], capsys)
    assert code == EXIT_OK
    meta, rows = parse_csv(out)
    assert meta["version"] == __version__
    assert meta["quad_order"] == "120" and meta["n_max"] == "100"
    (row,) = rows
    assert float(row["probability"]) == pytest.approx(0.25, abs=0.005)
    assert float(row["residual_1"]) < 1e-10 and float(row["residual_2"]) < 1e-10
    assert float(row["fidelity"]) == pytest.approx(1.0, abs=1e-8)


def test_solve_squeezed_vacuum(capsys):
    code, out, _ = run(["solve", "--n", "0", "--R", "0.3", "--kind", "bs"], capsys)
    assert code == EXIT_OK
    _, (row,) = parse_csv(out)
    assert float(row["fidelity"]) == pytest.approx(1.0, abs=1e-8)


def test_solve_flags_budget(capsys):
    code, out, err = run(["solve", "--n", "1", "--R", "2", "--kind", "bs"], capsys)
    assert code == EXIT_OK
    assert "exceeds budget" in err
    _, (row,) = parse_csv(out)
    assert row["within_budget"] == "false"


@pytest.mark.parametrize("argv, code", [
    (["solve", "--bogus"], EXIT_USAGE),
    (["frobnicate"], EXIT_USAGE),
    (["solve", "--quad-order", "4"], EXIT_USAGE),
    (["solve", "--n", "-1"], EXIT_USAGE),
    (["solve", "--R", "0:1:0"], EXIT_USAGE),
    (["surface", "--grid", "r1:0:1:2"], EXIT_USAGE),
    (["detector", "--eta", "1.5", "--n", "1", "--kind", "cz"], EXIT_USAGE),
    (["solve", "--kind", "bs", "--R", "0"], EXIT_INFEASIBLE),
    (["detector", "--n", "1", "--R", "1.5", "--kind", "cz", "--eta", "0.9", "--nmax", "20"],
     EXIT_NUMERICAL),
])
def test_exit_codes(argv, code, capsys):
    try:
        got = main(argv)
    except SystemExit as exc:
        got = exc.code
    capsys.readouterr()
    assert got == code


def test_byte_identical_output(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["budget", "--n", "1,2", "--R", "0.5,1", "--out", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_json_mirrors_columns(capsys):
    code, out, _ = run(["energy", "--n", "1", "--R", "0.5,1", "--format", "json"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["columns"] == ["n", "R", "kind", "param", "energy"]
    assert all(len(doc["data"][c]) == 4 for c in doc["columns"])
    assert doc["metadata"]["version"] == __version__


def test_energy_rows_consistent_and_ordered(capsys):
    code, out, _ = run(["energy", "--n", "1,2,3", "--R", "0.25,1"], capsys)
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    assert len(rows) == 12
    table = {(int(r["n"]), float(r["R"]), r["kind"]): float(r["energy"]) for r in rows}
    for n in (1, 2, 3):
        for R in (0.25, 1.0):
            assert table[(n, R, "cz")] < table[(n, R, "bs")]
        assert table[(n, 0.25, "bs")] < table[(n, 1.0, "bs")]
    for n, R, kind in [(1, 0.25, "bs"), (2, 1.0, "cz"), (3, 0.25, "cz")]:
        target = SFTarget(n, R)
        e, _ = optimal_entangler(target, kind)
        assert table[(n, R, kind)] == pytest.approx(energy_cost(e, solve_inputs(e, target)), rel=1e-10)


def test_budget_rows(capsys):
    code, out, _ = run(["budget", "--n", "0,1,2", "--R", "0.001,0.5,1,1.5"], capsys)
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    db = {(int(r["n"]), float(r["R"]), r["kind"]): float(r["max_db"]) for r in rows}
    assert db[(0, 0.001, "cz")] == pytest.approx(0.0, abs=0.01)
    assert db[(0, 0.001, "bs")] == pytest.approx(0.0, abs=0.01)
    for n in (1, 2):
        for R in (0.5, 1.0, 1.5):
            assert db[(n, R, "cz")] >= db[(n, R, "bs")]
        for kind in ("bs", "cz"):
            series = [db[(n, R, kind)] for R in (0.001, 0.5, 1.0, 1.5)]
            assert series == sorted(series, reverse=True)


def test_loss_rows(capsys):
    code, out, _ = run(["loss", "--mu", "0,0.1"], capsys)
    assert code == EXIT_OK
    meta, rows = parse_csv(out)
    assert "interpreted" in meta["note"]
    by = {(float(r["mu"]), r["kind"]): r for r in rows}
    for kind in ("bs", "cz"):
        assert float(by[(0.0, kind)]["p_deficit"]) == 0.0
        assert float(by[(0.0, kind)]["f_deficit"]) == pytest.approx(0.0, abs=1e-10)
        assert float(by[(0.1, kind)]["p_deficit"]) < 0.01
    assert float(by[(0.1, "cz")]["p_deficit"]) <= float(by[(0.1, "bs")]["p_deficit"])
    assert float(by[(0.1, "cz")]["f_deficit"]) <= float(by[(0.1, "bs")]["f_deficit"])


def test_surface_rows_and_metadata(capsys):
    code, out, _ = run(["surface", "--n", "1,2", "--grid", "r1:-3:3:31,r2:-3:3:31"], capsys)
    assert code == EXIT_OK
    meta, rows = parse_csv(out)
    assert len(rows) == 2 * 2 * 31 * 31
    frac = {k: float(v) for k, v in meta.items() if k.startswith("plateau_fraction_")}
    assert frac["plateau_fraction_cz_n1_R1"] >= frac["plateau_fraction_bs_n1_R1"]
    for kind in ("bs", "cz"):
        assert frac[f"plateau_fraction_{kind}_n2_R1"] <= frac[f"plateau_fraction_{kind}_n1_R1"]
        fields = dict(x.split("=") for x in meta[f"optimum_{kind}_n1_R1"].split(";"))
        assert float(fields["F"]) == pytest.approx(1.0, abs=1e-8)


def test_detector_rows(capsys):
    code, out, _ = run(["detector", "--n", "1", "--kind", "cz", "--eta", "0.9,1"], capsys)
    assert code == EXIT_OK
    _, rows = parse_csv(out)
    assert [float(r["eta"]) for r in rows] == [0.9, 1.0]
    for r in rows:
        assert float(r["abs_diff"]) < 2e-3
    assert float(rows[1]["F_quadrature"]) == pytest.approx(1.0, abs=1e-6)
