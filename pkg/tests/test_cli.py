import csv
import io
import json
from fractions import Fraction
import subprocess
import sys

import pytest

from linkoid.cli import main
from linkoid.fixtures import fixture_path, read_fixture

HOPF = str(fixture_path("hopf_linkoid.pd"))
BORROMEAN = str(fixture_path("borromean_open.txt"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_jones_text(capsys):
    code, out, _ = run(capsys, "jones", "--diagram", HOPF)
    assert code == 0
    assert out == "bracket: -A^4 - A^-4\nwrithe: -2\njones: -A^10 - A^2\n"


def test_jones_in_t(capsys):
    code, out, _ = run(capsys, "jones", "--diagram", HOPF, "--var", "t")
    assert out.splitlines()[-1] == "jones: -t^{-5/2} - t^{-1/2}"


def test_bracket_json(capsys):
    code, out, _ = run(capsys, "bracket", "--diagram", HOPF, "--json")
    obj = json.loads(out)
    assert code == 0
    assert {t["exp"]: t["coef"] for t in obj["bracket"]["terms"]} == {"4": -1, "-4": -1}
    assert "jones" not in obj


def test_bad_diagram_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.pd"
    bad.write_text("linkoid v1\nopen 1: a0 X1.o a1\n")
    code, _, err = run(capsys, "jones", "--diagram", str(bad))
    assert code == 2
    assert "error" in err
    assert run(capsys, "jones", "--diagram", str(tmp_path / "missing.pd"))[0] == 2


def test_cap_exit_code(tmp_path, capsys):
    from linkoid.diagram import format_diagram
    from linkoid.moves import braid_linkoid

    path = tmp_path / "big.pd"
    path.write_text(format_diagram(braid_linkoid([1, 2, 1, 2, 1, 2, 1, 2], 3, closed=[0, 1, 2])))
    assert run(capsys, "jones", "--diagram", str(path), "--method", "states", "--cap", "4")[0] == 3
    assert run(capsys, "jones", "--diagram", str(path), "--method", "contract", "--cap", "4")[0] == 0


def test_manifest_written(tmp_path, capsys):
    out = tmp_path / "hopf.txt"
    code, stdout, _ = run(capsys, "jones", "--diagram", HOPF, "--out", str(out))
    assert code == 0 and stdout == ""
    manifest = json.loads((tmp_path / "hopf.txt.manifest.json").read_text())
    assert manifest["outputs"] == [str(out)]
    assert len(manifest["inputs"][HOPF]) == 64
    assert manifest["command"][:2] == ["linkoid", "jones"]
    assert "version" in manifest and manifest["wall_time"] >= 0


def test_project_and_reparse(tmp_path, capsys):
    out = tmp_path / "d.pd"
    code, _, _ = run(capsys, "project", "--curves", BORROMEAN, "--xi", "0,0,1", "--out", str(out))
    assert code == 0
    code, text, _ = run(capsys, "jones", "--diagram", str(out))
    assert code == 0 and text.startswith("bracket:")


def test_project_strict_degenerate(tmp_path, capsys):
    curves = tmp_path / "c.txt"
    curves.write_text("P = [[0,0,0],[1,0,0]]\nQ = [[0.5,0,1],[0.5,1,1]]\n")
    assert run(capsys, "project", "--curves", str(curves), "--strict")[0] == 4
    code, _, err = run(capsys, "project", "--curves", str(curves))
    assert code == 0 and "jittering" in err


def test_bad_direction(capsys):
    assert run(capsys, "project", "--curves", BORROMEAN, "--xi", "0,0")[0] == 2
    assert run(capsys, "project", "--curves", BORROMEAN, "--xi", "a,b,c")[0] == 2


def test_sphere_closed_borromean(capsys):
    code, out, _ = run(capsys, "sphere-jones", "--curves", BORROMEAN, "--s", "1", "--samples", "50")
    assert code == 0
    # [PAPER] closed Borromean rings
    assert out.splitlines()[0] == ("mean: -1.00 t^{-3} + 3.00 t^{-2} - 2.00 t^{-1} + 4.00 "
                                   "- 2.00 t + 3.00 t^{2} - 1.00 t^{3}")


def test_sphere_json_census(capsys):
    code, out, _ = run(capsys, "sphere-bracket", "--curves", BORROMEAN, "--samples", "60",
                       "--json", "--census", "--var", "A")
    obj = json.loads(out)
    assert code == 0
    assert obj["samples_used"] == 60
    assert sum(c["count"] for c in obj["census"]) == 60
    assert obj["mean"]["variable"] == "A"


def test_sampler_argument_errors(capsys):
    assert run(capsys, "sphere-jones", "--curves", BORROMEAN, "--samples", "0")[0] == 2
    assert run(capsys, "sphere-jones", "--curves", BORROMEAN, "--threads", "0")[0] == 2
    assert run(capsys, "sweep", "--curves", BORROMEAN, "--s", "0,2")[0] == 2
    assert run(capsys, "sweep", "--curves", BORROMEAN, "--s", "x")[0] == 2


def test_sweep_csv_is_reproducible(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run(capsys, "sweep", "--curves", BORROMEAN, "--s", "0,1", "--samples", "100",
                   "--out", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    rows = list(csv.reader(io.StringIO(paths[0].read_text())))
    header = rows[0]
    assert header[0] == "s"
    exps = [Fraction(h) for h in header[1:]]
    assert exps == sorted(exps)
    last = dict(zip(header, rows[2]))
    assert rows[2][0] == "1"
    assert float(last["0"]) == 4 and float(last["-3"]) == -1


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    assert "FAIL" not in out and "PASS" in out


def test_cache_size_env(monkeypatch, capsys):
    monkeypatch.setenv("LINKOID_CACHE_SIZE", "lots")
    assert run(capsys, "jones", "--diagram", HOPF)[0] == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "linkoid.cli", "jones", "--diagram", HOPF],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "jones: -A^10 - A^2" in proc.stdout


def test_fixture_text_is_readable():
    assert read_fixture("hopf_linkoid.pd").startswith("linkoid v1")
