import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from qubit_decoherence import cli
from qubit_decoherence.scenarios import ConfigError, ScenarioConfig


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    return rows[0], np.array([[float(x) for x in r] for r in rows[1:]])


def comments(text):
    return dict(line[2:].split(" = ", 1) for line in text.splitlines() if line.startswith("# "))


def test_table1_layout(capsys):
    code, out, _ = run(capsys, "table1")
    assert code == 0
    header, data = parse(out)
    assert header == ["n", "measure_short_time", "measure_magnus", "deviation", "ratio_short_time", "ratio_magnus"]
    assert data[:, 0].tolist() == [1, 2, 3]
    assert data[0, 4] == 1.0
    assert comments(out)["command"] == "table1"
    assert comments(out)["model"] == "adiabatic"


def test_table1_zero_coupling(capsys):
    code, out, _ = run(capsys, "table1", "--J", "0")
    assert code == 0
    _, data = parse(out)
    assert np.all(data[:, 1:4] == 0)


def test_fig1_starts_at_zero(capsys):
    code, out, _ = run(capsys, "fig1", "--t-end", "1", "--points", "3")
    assert code == 0
    header, data = parse(out)
    assert header == ["t", "deviation_short_time", "deviation_magnus"]
    assert np.all(data[0, 1:] == 0)
    assert comments(out)["c"] == "1.0"


def test_fig3_defaults_to_large_amplitude_and_exceeds_weak_gate(capsys):
    _, strong, _ = run(capsys, "fig3", "--t-start", "1", "--t-end", "1", "--points", "1")
    _, weak, _ = run(capsys, "fig3", "--t-start", "1", "--t-end", "1", "--points", "1", "--c", "1")
    assert comments(strong)["c"] == "15.0"
    s, w = parse(strong)[1], parse(weak)[1]
    assert s[0, 2] > w[0, 2] and s[0, 1] > w[0, 1]


def test_fig3_amplitude_follows_a(capsys):
    _, out, _ = run(capsys, "fig3", "--a", "2", "--points", "1", "--t-end", "0.1")
    assert comments(out)["c"] == "30.0"


def test_fig2_pairs(capsys):
    code, out, _ = run(capsys, "fig2", "--t-start", "1", "--t-end", "2", "--points", "2")
    header, data = parse(out)
    assert code == 0 and len(header) == 1 + 28
    assert "ReD_ppp_ppp" not in header
    assert np.all(data[:, 1:] <= 0)
    _, out, _ = run(capsys, "fig2", "--t-start", "1", "--t-end", "2", "--points", "2", "--all-pairs")
    header, data = parse(out)
    assert len(header) == 1 + 64
    diag = [k for k, h in enumerate(header) if h.startswith("ReD_") and h[4:7] == h[8:11]]
    assert len(diag) == 8 and np.all(data[:, diag] == 0)


def test_fig4_grid(capsys):
    code, out, _ = run(capsys, "fig4", "--c-min", "1", "--c-max", "3", "--c-points", "3")
    header, data = parse(out)
    assert code == 0 and header[0] == "c"
    np.testing.assert_allclose(data[:, 0], [1, 2, 3])


def test_single_point_sweep_matches_direct_row(capsys):
    _, sweep, _ = run(capsys, "sweep", "--param", "c", "--values", "2", "--t-end", "1.5")
    _, direct, _ = run(capsys, "fig3", "--c", "2", "--t-start", "1.5", "--t-end", "1.5", "--points", "1")
    assert parse(sweep)[1][0, 1:].tolist() == parse(direct)[1][0, 1:].tolist()


def test_sweep_linear_in_J(capsys):
    _, out, _ = run(capsys, "sweep", "--param", "J", "--values", "1e-7", "2e-7", "--scheme", "magnus")
    data = parse(out)[1]
    assert data[1, 1] / data[0, 1] == pytest.approx(2.0, rel=0.01)


def test_sweep_order_and_workers_do_not_change_output(capsys):
    _, a, _ = run(capsys, "sweep", "--param", "c", "--values", "1", "3", "2")
    _, b, _ = run(capsys, "sweep", "--param", "c", "--values", "2", "1", "3", "--workers", "2")
    strip = lambda text: [l for l in text.splitlines() if not l.startswith("# workers")]
    assert strip(a) == strip(b)
    _, c, _ = run(capsys, "sweep", "--param", "c", "--values", "1", "3", "2")
    assert a == c


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nJ = 2e-6\nomega-c = 20\nscheme = magnus\n")
    _, out, _ = run(capsys, "fig1", "--config", str(cfg), "--points", "1", "--omega-c", "25")
    meta = comments(out)
    assert meta["J"] == "2e-06" and meta["omega_c"] == "25.0" and meta["scheme"] == "magnus"


def test_output_file(tmp_path, capsys):
    target = tmp_path / "t1.csv"
    code, out, _ = run(capsys, "table1", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("# command = table1")


@pytest.mark.parametrize("argv", [
    ["fig1", "--t-start", "2", "--t-end", "1"],
    ["fig1", "--points", "0"],
    ["fig1", "--J", "-1"],
    ["table1", "--model", "rotating_wave"],
    ["sweep"],
    ["fig1", "--config", "/nonexistent/file.cfg"],
])
def test_config_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert "configuration error" in err


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n")
    assert run(capsys, "fig1", "--config", str(cfg))[0] == 1


def test_numerical_failure_exit_2(capsys, monkeypatch):
    from qubit_decoherence.bath import QuadratureError

    def broken(cfg):
        raise QuadratureError("budget exhausted", 0.0, 1.0)

    monkeypatch.setitem(cli.COMMANDS, "fig2", broken)
    code, out, err = run(capsys, "fig2")
    assert code == 2 and "numerical failure" in err and out == ""


def test_seeded_random_state(capsys):
    _, a, _ = run(capsys, "fig1", "--seed", "7", "--points", "2")
    _, b, _ = run(capsys, "fig1", "--seed", "7", "--points", "2")
    assert a == b and comments(a)["theta"] == "None"


def test_config_validation_directly():
    with pytest.raises(ConfigError):
        ScenarioConfig(scheme="exact")
    with pytest.raises(ConfigError):
        ScenarioConfig(param="temperature")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qubit_decoherence", "table1", "--J", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# command = table1")
