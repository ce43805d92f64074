import math
from dataclasses import replace

import numpy as np
import pytest

from eitfwm import cli
from eitfwm.config import (ExperimentConfig, config_hash, load_config, parse_config,
                           serialize_config)
from eitfwm.csvio import read_table
from eitfwm.errors import ConfigurationError, TraceFormatError
from eitfwm.experiments import (FIGURES, bundled_config, expand_curves, run_single, run_sweep,
                                sweep_table)
from eitfwm.units import us_to_gamma_time

CHEAP = """
[figure]
id = cheap

[params]
omega_c = 0.32
omega_d = 0.35   # inline comment
delta = 13
gamma21 = 9e-4
alpha = 10

[probe]
peak_rabi = 0.001
duration_us = 5
edge_time_us = 0.5
start_us = 1

[driving]
duration_us = 7
edge_time_us = 0.5
start_us = 1

[grid]
n_z = 20
dt = 0.05

[output]
sample_us = 0.5
"""

CHEAP_SWEEP = CHEAP + """
[sweep]
variable = omega_d
values = 0.3, 0.1, 0.2
"""


@pytest.fixture
def cheap_file(tmp_path):
    path = tmp_path / "cheap.ini"
    path.write_text(CHEAP)
    return path


# parsing

def test_parse_units_and_defaults():
    cfg = parse_config(CHEAP)
    assert cfg.omega_d == 0.35
    assert cfg.params.gamma31 == 1.25 and cfg.params.gamma41 == 1.25
    assert cfg.probe.duration == pytest.approx(us_to_gamma_time(5.0))
    assert cfg.driving.peak_rabi == 0.35
    assert cfg.grid.n_z == 20 and cfg.sweep is None
    assert cfg.figure == {"id": "cheap"}


@pytest.mark.parametrize("fig", FIGURES)
def test_round_trip_bundled(fig):
    cfg = bundled_config(fig)
    text = serialize_config(cfg)
    again = parse_config(text)
    assert again == cfg
    assert serialize_config(again) == text
    assert config_hash(again) == config_hash(cfg)


def test_round_trip_with_values():
    cfg = parse_config(CHEAP_SWEEP)
    again = parse_config(serialize_config(cfg))
    assert again.sweep.values == (0.3, 0.1, 0.2)


def test_hash_changes_with_content():
    a = parse_config(CHEAP)
    assert config_hash(a) != config_hash(a.with_value("delta", 12.0))
    assert len(config_hash(a)) == 16


@pytest.mark.parametrize("patch, match", [
    (("alpha = 10", "alpha = -1"), "alpha"),
    (("alpha = 10", "alpha = abc"), "not a number"),
    (("omega_d = 0.35", "omega_d = -0.35"), "omega_d"),
    (("delta = 13", ""), "delta"),
    (("n_z = 20", "n_z = 2.5"), "n_z"),
    (("duration_us = 5", "duration_us = 0"), "duration"),
    (("[params]", "[parameters]"), "params"),
    (("sample_us = 0.5", "sample_us = 0"), "sample_us"),
])
def test_invalid_configs(patch, match):
    with pytest.raises(ConfigurationError, match=match):
        parse_config(CHEAP.replace(*patch))


@pytest.mark.parametrize("sweep, match", [
    ("variable = omega_d\nvalues =", "non-empty"),
    ("variable = gamma21\nvalues = 1e-3", "variable"),
    ("variable = delta\nvalues = 1, inf", "finite"),
    ("variable = delta\nlinspace = 0, 1", "linspace"),
    ("variable = delta", "values"),
    ("variable = delta\nvalues = 1\nmode = fast", "mode"),
])
def test_invalid_sweeps(sweep, match):
    with pytest.raises(ConfigurationError, match=match):
        parse_config(CHEAP + "\n[sweep]\n" + sweep + "\n")


def test_malformed_text():
    with pytest.raises(ConfigurationError, match="malformed"):
        parse_config("omega_c = 1")


def test_with_value_unknown():
    with pytest.raises(ConfigurationError):
        parse_config(CHEAP).with_value("gamma99", 1.0)


def test_expand_curves():
    cfg = bundled_config("fig2")
    curves = expand_curves(cfg)
    assert [label for label, _ in curves] == ["gamma21=0.0002", "gamma21=0.0009",
                                              "gamma21=0.0016"]
    assert [c.params.gamma21 for _, c in curves] == [2e-4, 9e-4, 1.6e-3]
    assert expand_curves(parse_config(CHEAP)) == [("", parse_config(CHEAP))]


def test_unknown_figure():
    with pytest.raises(ConfigurationError, match="fig9"):
        bundled_config("fig9")


# runs

def test_run_single_is_byte_identical(tmp_path):
    cfg = parse_config(CHEAP)
    _, a = run_single(cfg, tmp_path / "a.csv")
    _, b = run_single(cfg, tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()
    meta, columns, rows = read_table(a)
    assert meta["config_hash"] == config_hash(cfg)
    assert meta["figure.id"] == "cheap"
    assert meta["efficiency_definition"] == "energy ratio"
    assert float(meta["summary.conversion_efficiency"]) > 0
    dt_us = np.diff([r[0] for r in rows])
    np.testing.assert_allclose(dt_us, 0.5, rtol=0.05)


def test_run_single_rejects_sweep():
    with pytest.raises(ConfigurationError):
        run_single(parse_config(CHEAP_SWEEP))


def test_run_sweep_order_and_csv(tmp_path):
    cfg = parse_config(CHEAP_SWEEP)
    out = tmp_path / "sweep.csv"
    records = run_sweep(cfg, serial=True, out_path=out)
    assert [r.swept_value for r in records] == [0.3, 0.1, 0.2]
    singles = [run_single(replace(cfg.with_value("omega_d", v), sweep=None))[0]
               for v in (0.3, 0.1, 0.2)]
    assert [r.signal_efficiency for r in records] == [s.conversion_efficiency for s in singles]
    meta, columns, rows = read_table(out)
    assert columns == ["omega_d", "probe_transmission", "signal_efficiency", "probe_delay_us"]
    assert len(rows) == 3 and meta["mode"] == "pulsed"
    assert sweep_table(records).shape == (3, 4)


def test_parallel_sweep_matches_serial():
    cfg = parse_config(CHEAP_SWEEP)
    a = run_sweep(cfg, serial=True)
    b = run_sweep(cfg, serial=False)
    assert [r.signal_efficiency for r in a] == [r.signal_efficiency for r in b]


def test_sweep_failure_names_point():
    cfg = parse_config(CHEAP_SWEEP.replace("values = 0.3, 0.1, 0.2", "values = 0.3, 40"))
    with pytest.raises(ConfigurationError, match="omega_d=40"):
        run_sweep(cfg, serial=True)


def test_analytic_fig5():
    cfg = bundled_config("fig5")
    peaks = {}
    for label, sub in expand_curves(cfg):
        records = run_sweep(sub)
        assert len(records) == 601
        assert all(math.isnan(r.probe_delay) for r in records)
        best = max(records, key=lambda r: r.signal_efficiency)
        peaks[sub.params.gamma31] = best.swept_value
    assert 70 <= peaks[1.0] <= 90
    assert 90 <= peaks[1.25] <= 110


# CLI

def test_cli_steady(capsys):
    assert cli.main(["steady", "--omega-c", "0.32", "--omega-d", "0.32", "--delta", "0",
                     "--alpha", "0"]) == 0
    out = capsys.readouterr().out
    assert "probe_transmission=1" in out and "signal_efficiency=0" in out


def test_cli_steady_domain_error(capsys):
    assert cli.main(["steady", "--omega-c", "0", "--omega-d", "0"]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_propagate(cheap_file, tmp_path, capsys):
    out = tmp_path / "env.csv"
    assert cli.main(["propagate", "--config", str(cheap_file), "--out", str(out)]) == 0
    assert "conversion_efficiency=" in capsys.readouterr().out
    assert out.exists()


def test_cli_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text(CHEAP.replace("alpha = 10", "alpha = -3"))
    assert cli.main(["propagate", "--config", str(bad)]) == 2
    assert cli.main(["propagate", "--config", str(tmp_path / "missing.ini")]) == 4


def test_cli_sweep(tmp_path, capsys):
    cfg = tmp_path / "s.ini"
    cfg.write_text(CHEAP_SWEEP)
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--config", str(cfg), "--out", str(out), "--analytic"]) == 0
    with pytest.raises(TraceFormatError, match="not finite"):
        read_table(out)
    _, columns, rows = read_table(out, allow_nan=True)
    assert len(rows) == 3 and all(math.isnan(r[3]) for r in rows)
    assert "3 points" in capsys.readouterr().out


def test_cli_fit_bad_trace(cheap_file, tmp_path, capsys):
    trace = tmp_path / "t.csv"
    trace.write_text("time_us,probe_out_norm,signal_out_norm\n0,1,1\n")
    assert cli.main(["fit", "--config", str(cheap_file), "--trace", str(trace)]) == 4
    assert "trace error" in capsys.readouterr().err


def test_cli_harris_hau(capsys):
    assert cli.main(["harris-hau"]) == 0
    out = dict(line.split("=") for line in capsys.readouterr().out.split())
    assert float(out["zeta"]) == pytest.approx(0.06, abs=0.005)


def test_cli_convert_units(capsys):
    assert cli.main(["convert-units", "--delay", "42", "1.25", "0.32"]) == 0
    out = capsys.readouterr().out
    assert float(out.split("=")[1]) == pytest.approx(13.6, abs=0.05)
    assert cli.main(["convert-units"]) == 2


def test_cli_reproduce_fig5(tmp_path, capsys):
    assert cli.main(["reproduce-figure", "fig5", "--out", str(tmp_path)]) == 0
    written = sorted(p.name for p in tmp_path.iterdir())
    assert written == ["fig5_gamma31_1.25.csv", "fig5_gamma31_1.csv"]


def test_cli_usage_error():
    with pytest.raises(SystemExit) as info:
        cli.main(["reproduce-figure", "fig9"])
    assert info.value.code == 2


# bundled figure behaviour (full grid)

@pytest.mark.slow
def test_fig3a_efficiency():
    result, _ = run_single(bundled_config("fig3a"))
    assert result.conversion_efficiency == pytest.approx(0.42, abs=0.04)


@pytest.mark.slow
def test_fig2_interior_maximum():
    cfg = bundled_config("fig2")
    cfg = replace(cfg.with_value("gamma21", 9e-4), curves=None,
                  sweep=replace(cfg.sweep, values=(0.1, 0.2, 0.3, 0.4, 0.6, 0.8),
                                linspace=None))
    records = run_sweep(cfg, serial=True)
    effs = [r.signal_efficiency for r in records]
    best = int(np.argmax(effs))
    assert 0 < best < len(effs) - 1
    assert 0.25 <= records[best].swept_value <= 0.5


@pytest.mark.slow
def test_fig4_decreases_above_optimum():
    cfg = bundled_config("fig4")
    cfg = replace(cfg, sweep=replace(cfg.sweep, values=(9.0, 11.0, 13.0, 15.0), linspace=None))
    effs = [r.signal_efficiency for r in run_sweep(cfg, serial=True)]
    assert all(a > b for a, b in zip(effs, effs[1:]))
