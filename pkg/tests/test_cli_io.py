"""Configuration parsing, CSV round-trips, SVG emission, CLI dispatch."""

import json
import os
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from vortexlab.config import parse_config, serialize_config
from vortexlab.errors import ConfigError, DegenerateInputError
from vortexlab.experiments import (DiagnosticsRecord, Numerics, run_sweep)
from vortexlab.initial_data import InitialDataSpec
from vortexlab.io import (DIAGNOSTICS_HEADER, read_cloud_csv,
                          read_diagnostics_csv, read_measure_csv,
                          write_cloud_csv, write_diagnostics_csv,
                          write_measure_csv)
from vortexlab.measures import AtomicMeasure
from vortexlab.plots import emit_svg_plots
from vortexlab.cli import cli_dispatch

MINIMAL_PV = {
    "mode": "pointvortex",
    "point_vortices": {
        "positions": [[-0.5, 0.0], [0.5, 0.0]],
        "intensities": [1.0, 1.0],
    },
}


class TestParseConfig:
    def test_minimal_defaults(self):
        cfg = parse_config(json.dumps(MINIMAL_PV))
        assert cfg.mode == "pointvortex"
        assert cfg.numerics.dt == 1e-3
        assert cfg.numerics.horizon == 5.0
        assert cfg.numerics.deterministic is True

    def test_epsilon_above_radius_names_field(self):
        doc = {
            "mode": "simulate",
            "initial_data": {
                "centers": [[0.0, 0.0]], "intensities": [1.0],
                "epsilon": 0.3, "support_radius": 0.25,
                "separation": 1.5, "p_exponent": 4.0,
            },
        }
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps(doc))
        assert err.value.field == "epsilon"
        assert "epsilon" in str(err.value)

    def test_unknown_key_rejected(self):
        doc = dict(MINIMAL_PV)
        doc["viscosity"] = 0.01
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps(doc))
        assert "viscosity" in str(err.value)

    def test_unknown_nested_key_rejected(self):
        doc = json.loads(json.dumps(MINIMAL_PV))
        doc["numerics"] = {"dt": 1e-3, "remeshing": True}
        with pytest.raises(ConfigError):
            parse_config(json.dumps(doc))

    def test_parse_error_carries_byte_offset(self):
        with pytest.raises(ConfigError) as err:
            parse_config('{"mode": }')
        assert "byte" in str(err.value)

    def test_round_trip(self):
        doc = {
            "mode": "sweep",
            "output_dir": "runs",
            "initial_data": {
                "centers": [[-1.0, 0.0], [1.0, 0.0]],
                "intensities": [1.0, 1.0],
                "epsilon": 0.16, "support_radius": 0.25,
                "separation": 1.5, "p_exponent": 4.0,
            },
            "sweep": {"epsilons": [0.16, 0.08]},
            "numerics": {"dt": 0.02, "horizon": 2.0,
                         "pv_offset_fraction": 0.5},
        }
        cfg = parse_config(json.dumps(doc))
        text = serialize_config(cfg)
        cfg2 = parse_config(text)
        assert serialize_config(cfg2) == text

    def test_mode_required(self):
        with pytest.raises(ConfigError):
            parse_config("{}")


def _record(t, n=2):
    rng = np.random.default_rng(int(t * 1000) + 7)
    return DiagnosticsRecord(
        t=t, x_centers=rng.normal(0, 1, (n, 2)),
        y_centers=rng.normal(0, 1, (n, 2)),
        w2_pv=rng.uniform(0, 1, n), w2_center=rng.uniform(0, 1, n),
        center_gap=rng.uniform(0, 1, n), vel_gap=rng.uniform(0, 1, n),
        m_r=rng.uniform(0, 1, n), m_2r=rng.uniform(0, 1, n),
        mu=rng.uniform(0, 1, n), w1_total=float(rng.uniform(0, 1)),
        min_sep_cloud=float(rng.uniform(1, 2)), min_sep_pv=np.inf)


class TestDiagnosticsCsv:
    def test_empty_records_header_only(self, tmp_path):
        path = tmp_path / "d.csv"
        write_diagnostics_csv([], path)
        assert path.read_text() == DIAGNOSTICS_HEADER + "\n"

    def test_row_count(self, tmp_path):
        path = tmp_path / "d.csv"
        write_diagnostics_csv([_record(0.0)], path)
        lines = path.read_text().splitlines()
        assert len(lines) == 3  # header + one row per component

    def test_round_trip_exact(self, tmp_path):
        path = tmp_path / "d.csv"
        records = [_record(t) for t in (0.0, 0.125, 0.25)]
        write_diagnostics_csv(records, path)
        back = read_diagnostics_csv(path)
        assert len(back) == len(records)
        for a, b in zip(records, back):
            assert a.t == b.t
            assert (a.x_centers == b.x_centers).all()
            assert (a.y_centers == b.y_centers).all()
            assert (a.w2_pv == b.w2_pv).all()
            assert (a.vel_gap == b.vel_gap).all()
            assert a.w1_total == b.w1_total
            assert a.min_sep_cloud == b.min_sep_cloud
            assert a.min_sep_pv == b.min_sep_pv  # inf round-trips


class TestCloudMeasureCsv:
    def test_cloud_round_trip(self, tmp_path):
        from helpers import random_single_sign_cloud
        rng = np.random.default_rng(81)
        cloud = random_single_sign_cloud(rng, n_components=2, n_per=15)
        path = tmp_path / "cloud.csv"
        write_cloud_csv(cloud, path)
        back = read_cloud_csv(path)
        assert (back.xy == cloud.xy).all()
        assert (back.gamma == cloud.gamma).all()
        assert (back.tag == cloud.tag).all()

    def test_measure_round_trip(self, tmp_path):
        rng = np.random.default_rng(82)
        m = AtomicMeasure(rng.normal(0, 1, (9, 2)), rng.normal(0, 1, 9))
        path = tmp_path / "m.csv"
        write_measure_csv(m, path)
        back = read_measure_csv(path)
        assert (back.xy == m.xy).all()
        assert (back.mass == m.mass).all()


@pytest.fixture(scope="module")
def tiny_sweep():
    spec = InitialDataSpec(centers=[[-1, 0], [1, 0]],
                           intensities=[1.0, 1.0], epsilon=0.16,
                           support_radius=0.25, separation=1.5,
                           p_exponent=4.0)
    num = Numerics(dt=0.02, horizon=0.2, particles_per_core=8,
                   pv_offset_fraction=0.5)
    return run_sweep(spec, [0.16, 0.08], num)


class TestSvgPlots:
    def test_well_formed_xml_with_slope(self, tmp_path, tiny_sweep):
        path = tmp_path / "plot.svg"
        emit_svg_plots(tiny_sweep, path)
        root = ET.parse(path).getroot()
        assert root.tag.endswith("svg")
        text = path.read_text()
        slope = tiny_sweep.fits["w2_pv"][0].slope
        assert f"slope={slope:.2f}" in text

    def test_single_scale_errors_without_file(self, tmp_path):
        spec = InitialDataSpec(centers=[[-1, 0], [1, 0]],
                               intensities=[1.0, 1.0], epsilon=0.16,
                               support_radius=0.25, separation=1.5,
                               p_exponent=4.0)
        num = Numerics(dt=0.02, horizon=0.1, particles_per_core=8)
        res = run_sweep(spec, [0.16], num)
        path = tmp_path / "plot.svg"
        with pytest.raises(DegenerateInputError):
            emit_svg_plots(res, path)
        assert not path.exists()


class TestCli:
    def test_pointvortex_happy_path(self, tmp_path):
        cfg = tmp_path / "pv.json"
        doc = dict(MINIMAL_PV)
        doc["numerics"] = {"dt": 1e-2, "horizon": 0.1}
        cfg.write_text(json.dumps(doc))
        out = tmp_path / "runs"
        code = cli_dispatch(["pointvortex", "--config", str(cfg),
                             "--out", str(out)])
        assert code == 0
        assert (out / "pv_trajectory.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        names = {f["name"] for f in manifest["files"]}
        assert "pv_trajectory.csv" in names

    def test_missing_config_flag(self, capsys):
        code = cli_dispatch(["pointvortex"])
        assert code == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_subcommand(self, capsys):
        code = cli_dispatch(["explode"])
        assert code == 1
        assert "usage" in capsys.readouterr().err

    def test_unreadable_config(self, tmp_path, capsys):
        code = cli_dispatch(["pointvortex", "--config",
                             str(tmp_path / "nope.json"),
                             "--out", str(tmp_path)])
        assert code == 1

    def test_metrics_small_measures(self, tmp_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        write_measure_csv(AtomicMeasure([[0.0, 0.0], [1.0, 0.0]],
                                        [0.5, 0.5]), a)
        write_measure_csv(AtomicMeasure([[0.5, 0.0]], [1.0]), b)
        cfg = tmp_path / "m.json"
        cfg.write_text(json.dumps({
            "mode": "metrics",
            "metrics": {"measure_csvs": [str(a), str(b)]},
        }))
        out = tmp_path / "mo"
        code = cli_dispatch(["metrics", "--config", str(cfg),
                             "--out", str(out)])
        assert code == 0
        assert "W1 = 0.5" in capsys.readouterr().out
        doc = json.loads((out / "metrics.json").read_text())
        assert doc["w1"] == pytest.approx(0.5, abs=1e-15)

    def test_metrics_cloud_csv(self, tmp_path):
        from helpers import random_single_sign_cloud
        rng = np.random.default_rng(83)
        cloud = random_single_sign_cloud(rng, n_components=2, n_per=12)
        cloud_path = tmp_path / "cloud.csv"
        write_cloud_csv(cloud, cloud_path)
        cfg = tmp_path / "m.json"
        cfg.write_text(json.dumps({
            "mode": "metrics",
            "metrics": {"cloud_csv": str(cloud_path), "radii": [0.5, 1.0],
                        "pitch": 0.05},
        }))
        out = tmp_path / "mo"
        code = cli_dispatch(["metrics", "--config", str(cfg),
                             "--out", str(out)])
        assert code == 0
        doc = json.loads((out / "metrics.json").read_text())
        assert len(doc["components"]) == 2
        assert doc["support_distance"] is not None
        assert doc["lp_norm"] > 0
        comp = doc["components"][0]
        for r in ("0.5", "1.0"):
            mu = comp["smoothed_outer_mass"][r]
            assert comp["outer_mass"][r] >= mu or \
                abs(comp["outer_mass"][r] - mu) < 1e-12

    def test_mode_mismatch(self, tmp_path, capsys):
        cfg = tmp_path / "pv.json"
        cfg.write_text(json.dumps(MINIMAL_PV))
        code = cli_dispatch(["simulate", "--config", str(cfg),
                             "--out", str(tmp_path)])
        assert code == 1

    def test_console_script_runs(self):
        proc = subprocess.run([sys.executable, "-m", "vortexlab.cli"],
                              capture_output=True, text=True)
        assert proc.returncode != 0  # usage error, but the module loads


def test_numpy_backend_subprocess():
    """The fallback backend honors the same bitwise tree/direct contract."""
    code = (
        "import numpy as np\n"
        "import vortexlab as vl\n"
        "from vortexlab.kernels import KernelParams, direct_velocity, "
        "tree_velocity\n"
        "assert vl.backend_name() == 'numpy'\n"
        "rng = np.random.default_rng(3)\n"
        "xy = rng.uniform(-1, 1, (400, 2))\n"
        "gam = rng.uniform(0.1, 1.0, 400)\n"
        "p = KernelParams(blob_radius=0.01, opening_angle=0.0, "
        "deterministic=True)\n"
        "ud = direct_velocity(xy, gam, None, p, self_interaction=True)\n"
        "ut = tree_velocity(xy, gam, None, p, self_interaction=True)\n"
        "assert (ud == ut).all()\n"
        "u = direct_velocity([[0.0, 0.0]], [1.0], [[1.0, 0.0]])\n"
        "assert abs(u[0, 1] - 1.0 / (2 * np.pi)) < 1e-15\n"
    )
    env = dict(os.environ, VORTEXLAB_BACKEND="numpy")
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
