import csv

import pytest

from fuchsian_codes.cli import main
from fuchsian_codes.codec import normic_form, read_codebook_csv
from fuchsian_codes.fuchsian import load_preset


def test_gen_constellation(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert main(["gen-constellation", "--size", "4", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 4
    assert all(normic_form([int(r[c]) for c in "xyzt"]) == 1 for r in rows)
    assert len(read_codebook_csv(out, load_preset("e2d1D6ii"))) == 4


def test_gen_constellation_rate(tmp_path, capsys):
    assert main(["gen-constellation", "--size", "8", "--out", str(tmp_path / "c.csv")]) == 0
    assert "R=3 " in capsys.readouterr().out


def test_bad_preset(tmp_path, capsys):
    assert main(["gen-constellation", "--preset", "nosuch", "--out", str(tmp_path / "c.csv")]) == 2
    assert "nosuch" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    [],
    ["simulate", "--snr-step", "0"],
    ["simulate", "--snr-min", "10", "--snr-max", "5"],
    ["simulate", "--trials", "0"],
    ["gen-constellation", "--size", "0"],
    ["gen-constellation", "--tau-re", "0"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_simulate_with_baseline(tmp_path):
    out = tmp_path / "s.csv"
    args = ["simulate", "--size", "4", "--trials", "2000", "--snr-min", "25", "--snr-max", "75",
            "--snr-step", "10", "--seed", "5", "--baseline", "qam", "--out", str(out)]
    assert main(args) == 0
    qam = tmp_path / "s_qam.csv"
    rows = list(csv.DictReader(out.open()))
    qrows = list(csv.DictReader(qam.open()))
    assert [r["snr_db"] for r in rows] == [r["snr_db"] for r in qrows]
    assert float(rows[-1]["cer"]) < float(rows[0]["cer"])
    first = out.read_bytes()
    assert main(args) == 0
    assert out.read_bytes() == first


def test_optimize_tau(capsys):
    assert main(["optimize-tau", "--grid", "21"]) == 0
    re, im = map(float, capsys.readouterr().out.split())
    assert im > 0 and abs(complex(re, im)) == pytest.approx(1, abs=1e-3)


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    assert "phi(1, 0, 1)=(2, 0, 3, 2)" in capsys.readouterr().out


def test_selftest_corrupted_preset(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("name broken\nkind strip\ngenerator a 1 2 3\n")
    assert main(["selftest", "--preset-file", str(bad)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_preset_file(tmp_path, capsys):
    from importlib import resources
    text = resources.files("fuchsian_codes").joinpath("presets").joinpath("e2d1D6ii.txt").read_text()
    f = tmp_path / "copy.txt"
    f.write_text(text)
    assert main(["gen-constellation", "--preset-file", str(f), "--out", str(tmp_path / "c.csv")]) == 0
