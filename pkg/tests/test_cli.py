import csv
import io
import math
import subprocess
import sys

import pytest

from lmgphase import __version__
from lmgphase.cli import fmt, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def data(text):
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(rows))))


def comments(text):
    return [line for line in text.splitlines() if line.startswith("#")]


def test_fmt():
    assert fmt(math.pi) == "3.14159265359"
    assert fmt(-0.0) == "0"
    assert fmt(7) == "7"
    assert fmt(math.nan) == "nan"


def test_biaxial_single_point(capsys):
    code, out, _ = run(capsys, "biaxial", "--gamma", "0.5", "--h", "2.0", "--n", "1000")
    assert code == 0
    assert comments(out)[0] == f"# lmgphase {__version__}"
    assert "# gamma=0.5" in comments(out)
    rows = data(out)
    assert list(rows[0]) == ["gamma", "h", "N", "theta", "epsilon", "t_sq", "phi_g", "n_mean"]
    (row,) = rows
    assert float(row["epsilon"]) == pytest.approx(-0.2, abs=1e-12)
    n_mean = float(row["n_mean"])
    assert float(row["phi_g"]) == pytest.approx(math.pi * (1 - n_mean), abs=1e-10)


def test_biaxial_grid_peaks_near_critical_field(capsys):
    _, out, _ = run(capsys, "biaxial", "--gamma", "0.5", "--h-min", "0.05", "--h-max", "2",
                    "--h-steps", "400", "--n", "1000")
    rows = data(out)
    assert len(rows) == 400
    peak = max(rows, key=lambda r: abs(float(r["phi_g"])))
    assert abs(float(peak["h"]) - 1.0) <= 1.95 / 399


def test_biaxial_isotropic_is_pi(capsys):
    _, out, _ = run(capsys, "biaxial", "--gamma", "1.0", "--h", "2.0", "--n", "100")
    (row,) = data(out)
    assert row["phi_g"] == fmt(math.pi)
    assert float(row["epsilon"]) == 0.0


def test_biaxial_ed_columns(capsys):
    _, out, _ = run(capsys, "biaxial", "--h", "2", "--n", "100", "--ed")
    (row,) = data(out)
    assert float(row["n_mean_ed"]) == pytest.approx(float(row["n_mean"]), abs=2e-3)
    assert float(row["gap_ed"]) > 1.0


def test_uniaxial_cusp_row(capsys):
    _, out, _ = run(capsys, "uniaxial", "--hz", "0.5", "--hx-min", "-0.5", "--hx-max", "0.5",
                    "--hx-steps", "401", "--n", "200")
    rows = data(out)
    assert len(rows) == 401 and float(rows[200]["h_x"]) == 0.0
    phi = [float(r["phi_g"]) for r in rows]
    assert phi[200] == max(phi)  # symmetric peak with a kink


def test_uniaxial_symmetric_point(capsys):
    _, out, _ = run(capsys, "uniaxial", "--hz", "2", "--hx", "0", "--n", "200")
    (row,) = data(out)
    assert list(row) == ["h_x", "h_z", "N", "lambda0", "y", "epsilon", "t_sq", "phi_g", "n_mean", "e0"]
    assert float(row["lambda0"]) == 0.0
    assert float(row["epsilon"]) == pytest.approx(-1 / 3, abs=1e-11)
    assert float(row["e0"]) == pytest.approx(-200.25)


def test_uniaxial_divergent_point(capsys):
    _, out, _ = run(capsys, "uniaxial", "--hz", "1", "--hx", "0", "--n", "200")
    (row,) = data(out)
    assert float(row["phi_g"]) == pytest.approx(math.pi * (1 - 200 / 3), rel=1e-10)


def test_scaling_fit_lines(capsys):
    _, out, _ = run(capsys, "scaling", "--gamma", "1.0", "--h", "1.0")
    fits = [c for c in comments(out) if c.startswith("# fit:")]
    assert len(fits) == 2
    slope = float(fits[0].split("slope=")[1].split()[0])
    assert slope == pytest.approx(-math.pi / 3, rel=0.05)
    assert len(data(out)) == 4


def test_scaling_needs_three_sizes(capsys):
    with pytest.raises(SystemExit) as info:
        main(["scaling", "--n-list", "100"])
    assert info.value.code == 2


def test_oracle_biaxial(capsys):
    _, out, _ = run(capsys, "oracle", "--model", "biaxial", "--gamma", "0.5", "--h", "2.0",
                    "--n", "200", "--steps", "2000")
    (row,) = data(out)
    assert list(row) == ["model", "gamma", "h", "N", "n_mean_hp", "n_mean_ed", "abs_diff", "gap",
                         "phase_overlap", "phase_exact"]
    assert float(row["abs_diff"]) <= 5e-2


def test_oracle_full_check(capsys):
    _, out, _ = run(capsys, "oracle", "--gamma", "0.5", "--h", "2.0", "--n", "8", "--full-check")
    (line,) = [c for c in comments(out) if c.startswith("# full_check:")]
    assert float(line.split("abs_diff=")[1]) <= 1e-10


def test_oracle_full_check_rejects_large_n(capsys):
    with pytest.raises(SystemExit) as info:
        main(["oracle", "--n", "20", "--full-check", "--steps", "100"])
    assert info.value.code == 2


def test_oracle_uniaxial_cusp_location(capsys):
    _, out, _ = run(capsys, "oracle", "--model", "uniaxial", "--hz", "0.5", "--hx-min", "-0.2",
                    "--hx-max", "0.2", "--hx-steps", "41", "--n", "400", "--steps", "500")
    cusp = {c.split(":")[0]: c.split("=")[1] for c in comments(out) if c.startswith("# cusp_")}
    assert float(cusp["# cusp_ed"]) == pytest.approx(0.0, abs=0.01)
    assert float(cusp["# cusp_hp"]) == pytest.approx(0.0, abs=0.01)


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "o.csv"
    code, out, _ = run(capsys, "biaxial", "--h", "2", "--n", "10", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_bytes().startswith(b"# lmgphase")


def test_total_failure_exit_code(capsys):
    code, out, err = run(capsys, "biaxial", "--gamma", "1.5", "--h", "2", "--n", "10")
    assert code == 1
    assert "DomainError" in out and "gamma" in err


def test_partial_failure_still_succeeds(capsys):
    code, out, _ = run(capsys, "biaxial", "--gamma-min", "0.5", "--gamma-max", "1.5",
                       "--gamma-steps", "3", "--h", "2", "--n", "10")
    assert code == 0
    assert sum(r["phi_g"] == "nan" for r in data(out)) == 1


@pytest.mark.parametrize("argv", [["biaxial", "--h-min", "2", "--h-max", "1"],
                                  ["biaxial", "--h", "1", "--h-min", "0.5", "--h-max", "2"],
                                  ["biaxial", "--n", "x"], ["nonsense"],
                                  ["uniaxial", "--threads", "-1"]])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


@pytest.mark.parametrize("sub", ["biaxial", "uniaxial", "scaling", "oracle"])
def test_help_lists_defaults(sub, capsys):
    with pytest.raises(SystemExit) as info:
        main([sub, "--help"])
    assert info.value.code == 0
    text = capsys.readouterr().out
    assert "--out" in text and "--threads" in text and "default" in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lmgphase", "uniaxial", "--hz", "2", "--hx", "0"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.count("\n") == len(proc.stdout.splitlines())
    assert "\r" not in proc.stdout
