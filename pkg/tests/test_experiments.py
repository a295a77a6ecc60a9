import math
import subprocess
import sys
from pathlib import Path

import pytest

from ampshare.channel import ChannelGains, PowerBudget
from ampshare.cli import EXIT_CONFIG, EXIT_GEOMETRY, EXIT_OK, main
from ampshare.experiments import (
    ConfigError,
    ExperimentConfig,
    ExperimentSpec,
    format_number,
    format_rate_row,
    kcell_baselines,
    kcell_layout,
    load_config,
    parse_config_text,
    render_csv,
    run_kcell,
    run_mode_map,
    run_rate,
    run_sweep,
)
from ampshare.geometry import Direction, network_throughput

DATA = Path(__file__).parent / "data"


def body(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


def cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


# -- rate ---------------------------------------------------------------

@pytest.mark.parametrize("argv, last", [
    (["--snr", "2,2", "--inr", "4,4"], "strong,0,0,2.8074"),
    (["--snr", "1,1", "--inr", "1,1", "--scheme", "tin"], "weak,1,1,1.1699"),
    (["--snr", "3,3", "--inr", "0.5,7", "--scheme", "orthogonal"], "mixed2,1,1,2.0000"),
])
def test_rate_rows(capsys, argv, last):
    code, out = cli(capsys, "rate", *argv)
    assert code == EXIT_OK
    lines = body(out.out)
    assert lines[0] == "mode,p1p,p2p,sum_rate"
    assert lines[-1] == last


def test_rate_oracle_and_etw():
    g, b = ChannelGains(10.0, 1.0, 1.0, 10.0), PowerBudget(1.0, 1.0, 1.0)
    mode, p1p, p2p, rate = run_rate(g, b, "oracle", grid_n=64)
    assert mode.value == "weak"
    assert rate <= run_rate(g, b, "hk")[3] + 1e-12
    _, p1p, p2p, _ = run_rate(g, b, "etw")
    assert (p1p, p2p) == (1.0, 1.0)


def test_rate_row_format():
    from ampshare.channel import InterferenceMode
    assert format_rate_row((InterferenceMode.STRONG, 0.0, 0.25, math.log2(7))) == "strong,0,0.25,2.8074"


def test_rate_from_gains_and_layout(capsys, tmp_path):
    code, out = cli(capsys, "rate", "--gains", "2,4,4,2", "--powers", "2,2", "--n0", "2")
    assert code == EXIT_OK
    assert body(out.out)[-1] == "strong,0,0,2.8074"
    layout = tmp_path / "k1_layout.txt"
    layout.write_text("MUE 250 40\nSAP -150 200\nSUE -170 230\n")
    code, out = cli(capsys, "rate", "--layout", str(layout))
    assert code == EXIT_OK
    assert body(out.out)[-1].split(",")[0] in {"strong", "mixed1", "mixed2", "weak", "veryweak", "verystrong"}
    # two pairs cannot form a two-user channel
    assert cli(capsys, "rate", "--layout", str(DATA / "k2_layout.txt"))[0] == EXIT_CONFIG


def test_rate_unknown_scheme():
    with pytest.raises(ConfigError):
        run_rate(ChannelGains(1, 1, 1, 1), PowerBudget(1, 1, 1), "fancy")


# -- config -------------------------------------------------------------

def test_config_defaults_and_items():
    cfg = load_config()
    keys = dict(cfg.items())
    assert keys["mbs_power_dbm"] == 46.0
    assert keys["cell_radius_m"] == 500.0
    assert keys["trials"] == 100
    assert [k for k, _ in cfg.items()] == sorted(keys)


def test_config_file_then_overrides(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("# scenario\nsteps = 7\ncell_radius_m = 400  # smaller cell\nsweep_direction = Downlink\n")
    cfg = load_config(path, {"steps": "9"})
    assert cfg.steps == 9
    assert cfg.network.cell_radius_m == 400.0
    assert cfg.sweep_direction == "downlink"


@pytest.mark.parametrize("text", ["nokey\n", " = 3\n"])
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


@pytest.mark.parametrize("overrides", [
    {"bogus": "1"},
    {"steps": "many"},
    {"steps": "1"},
    {"trials": "0"},
    {"mode_map_direction": "sideways"},
    {"cell_radius_m": "-3"},
    {"d_min_m": "600"},
    {"mue_distance_fraction": "nan"},
])
def test_config_rejects(overrides):
    with pytest.raises(ConfigError):
        load_config(None, overrides)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.conf")


def test_experiment_spec_validation():
    with pytest.raises(ConfigError):
        ExperimentSpec(kind="plot")
    with pytest.raises(ConfigError):
        ExperimentSpec(kind="rate", seed=-1)
    assert ExperimentSpec(kind="sweep").seed == 0


def test_render_csv_header_block():
    cfg = ExperimentConfig()
    text = render_csv(cfg, ["a", "b"], [(1, 0.123456789), "x,y"], [("experiment", "t")])
    lines = text.splitlines()
    assert lines[0] == "# resolved-config"
    assert "# experiment = t" in lines
    assert "# cell_radius_m = 500" in lines
    assert lines[-3:] == ["a,b", "1,0.123457", "x,y"]
    assert format_number(1e-7) == "1e-07"


# -- mode map -----------------------------------------------------------

def test_mode_map_labels_and_shape():
    cfg = load_config(None, {"resolution": 41})
    rows = run_mode_map(cfg)
    assert len(rows) == 41 * 41
    labels = {m for _, _, m in rows}
    assert labels <= {"verystrong", "strong", "mixed1", "mixed2", "weak", "veryweak", "invalid"}
    for x, y, m in rows:
        r = math.hypot(x, y)
        if not 35 <= r <= 500:
            assert m == "invalid"
    # y is the outer loop
    assert rows[0][1] == rows[40][1] and rows[0][0] != rows[1][0]


def test_mode_map_resolution_check():
    with pytest.raises(ConfigError):
        run_mode_map(load_config(), resolution=1)


# -- sweep --------------------------------------------------------------

def test_sweep_rows():
    rows = run_sweep(load_config(None, {"steps": 25}))
    assert len(rows) == 25
    assert rows[0][0] == 35.0 and rows[-1][0] == 500.0
    orth = {r[5] for r in rows}
    assert len(orth) == 1
    for d, mode, hk, etw, tin, o in rows:
        assert hk >= max(etw, tin, o) - 1e-9


# -- kcell --------------------------------------------------------------

def test_kcell_single_trial_equals_throughput():
    cfg = load_config(None, {"kmax": 1, "trials": 1})
    (row,) = run_kcell(cfg, seed=4)
    layout = kcell_layout(cfg, 1, 4, 0)
    assert row[0] == 1
    assert row[1] == network_throughput(layout, cfg.network).total
    orth, tin = kcell_baselines(layout, cfg.network)
    assert (row[2], row[3]) == (orth, tin)


def test_kcell_layout_properties():
    cfg = load_config()
    layout = kcell_layout(cfg, 5, 0, 3)
    assert layout.k == 5
    assert layout.mue.radius == pytest.approx(500 * 2 / 3)
    assert layout.direction is Direction.DOWNLINK
    assert layout == kcell_layout(cfg, 5, 0, 3)
    assert layout != kcell_layout(cfg, 5, 1, 3)


def test_kcell_baselines_interference_free_limit():
    cfg = load_config()
    layout = kcell_layout(cfg, 1, 0, 0)
    orth, tin = kcell_baselines(layout, cfg.network)
    assert 0 < orth and 0 < tin


# -- CLI ----------------------------------------------------------------

def test_cli_exit_code_config(capsys, tmp_path):
    assert cli(capsys, "sweep", "--set", "steps=1")[0] == EXIT_CONFIG
    assert cli(capsys, "sweep", "--set", "nonsense")[0] == EXIT_CONFIG
    assert cli(capsys, "sweep", "--config", str(tmp_path / "none.conf"))[0] == EXIT_CONFIG
    assert cli(capsys, "rate", "--snr", "1,2")[0] == EXIT_CONFIG
    assert cli(capsys, "rate", "--snr", "1,x", "--inr", "1,1")[0] == EXIT_CONFIG
    assert cli(capsys, "rate", "--snr", "1,-2", "--inr", "1,1")[0] == EXIT_CONFIG
    assert cli(capsys, "kcell", "--workers", "0")[0] == EXIT_CONFIG


def test_cli_exit_code_geometry(capsys, caplog):
    code, _ = cli(capsys, "kcell", "--kmax", "500", "--trials", "1")
    assert code == EXIT_GEOMETRY
    assert "exceeds" in caplog.text


def test_cli_writes_out_file(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    code, out = cli(capsys, "sweep", "--steps", "5", "--out", str(path), "--seed", "3")
    assert code == EXIT_OK and out.out == ""
    text = path.read_text()
    assert "# seed = 3" in text and "# steps = 5" in text
    assert len(body(text)) == 6


def test_cli_direction_flag(capsys):
    _, down = cli(capsys, "mode-map", "--resolution", "15")
    _, up = cli(capsys, "mode-map", "--resolution", "15", "--direction", "uplink")
    assert "# mode_map_direction = uplink" in up.out
    assert body(down.out) != body(up.out)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "ampshare", "rate", "--snr", "2,2", "--inr", "10,10"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.splitlines()[-1] == "verystrong,0,0,3.1699"


@pytest.mark.parametrize("argv", [
    ["kcell", "--kmax", "3", "--trials", "4", "--seed", "9"],
    ["sweep", "--steps", "12"],
    ["mode-map", "--resolution", "13", "--direction", "uplink"],
])
def test_byte_identical_across_workers(tmp_path, argv):
    texts = []
    for workers in ("1", "3"):
        path = tmp_path / f"w{workers}.csv"
        assert main(argv + ["--workers", workers, "--out", str(path)]) == EXIT_OK
        texts.append(path.read_bytes())
    assert texts[0] == texts[1]


def test_kcell_seed_changes_output():
    cfg = load_config(None, {"kmax": 2, "trials": 3})
    assert run_kcell(cfg, seed=1) != run_kcell(cfg, seed=2)
    assert run_kcell(cfg, seed=1) == run_kcell(cfg, seed=1)
