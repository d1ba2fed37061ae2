import json
import subprocess
import sys

from ergocount.cli import main


def test_forms_csv_to_stdout(capsys):
    assert main(["forms", "--log2T", "3", "--samples", "2", "--seed", "5"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "experiment,seed,sample,m,n,b,scale,count,expected,ratio"
    assert len(out) == 7 and out[1].startswith("forms,5,0,")


def test_json_file(tmp_path):
    path = tmp_path / "r.json"
    assert main(["lattice", "--primitive", "--log2T", "4", "--samples", "3", "--format", "json", "--out", str(path)]) == 0
    doc = json.loads(path.read_text())
    assert len(doc["rows"]) == 12 and doc["scenario"]["primitive"] is True


def test_origami_file(tmp_path):
    f = tmp_path / "l.txt"
    f.write_text("3\n2 1 3\n3 2 1\n")
    assert main(["origami", "--file", str(f), "--log2T", "7", "--samples", "10", "--distinct-holonomies",
                 "--out", str(tmp_path / "o.csv")]) == 0
    assert main(["origami", "--file", str(f), "--theta", "zero", "--log2T", "6", "--out", str(tmp_path / "z.csv")]) == 0
    assert len((tmp_path / "z.csv").read_text().splitlines()) == 7


def test_exit_codes(tmp_path, capsys):
    assert main(["siegel", "--m", "2"]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n1 1\n1 2\n")
    assert main(["origami", "--file", str(bad)]) == 2
    assert "bad.txt:2:" in capsys.readouterr().err
    assert main(["lattice", "--m", "2", "--log2T", "30", "--samples", "1", "--budget", "100"]) == 3
    assert main(["toral", "--N", "1"]) == 2


def test_scenario_file(tmp_path):
    sc = tmp_path / "s.toml"
    sc.write_text('experiment = "toral"\nN = 500\nsamples = 2\nb = 0.5\n')
    out = tmp_path / "t.csv"
    assert main(["toral", "--scenario", str(sc), "--out", str(out)]) == 0
    assert out.read_text().count("\n") == 1 + 2 * 9
    assert main(["forms", "--scenario", str(sc)]) == 2


def test_volume_check(capsys):
    assert main(["volume-check", "--samples", "200000", "--theta-angle", "0.7"]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header == "exact,mc_mean,mc_stderr,samples,rel_diff"
    assert float(row.split(",")[-1]) < 0.02


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "ergocount.cli", "forms", "--log2T", "2", "--samples", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("experiment,")
    proc = subprocess.run([sys.executable, "-m", "ergocount.cli", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
