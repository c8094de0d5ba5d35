"""Converter behavior: parsing, schema errors, JSON output, CLI."""

import json
import subprocess
import sys

import numpy as np
import pytest
import scipy.io

from lasa2json import SchemaError, convert, read_lasa_mat
from lasa2json.cli import main

from conftest import write_mat


class TestReadLasaMat:
    def test_reads_seven_demos(self, lasa_mat):
        shape = read_lasa_mat(lasa_mat)
        assert shape.n_demos == 7
        assert shape.dt == 0.01
        assert shape.name == "SyntheticShape"
        for pos, vel in zip(shape.positions, shape.velocities):
            assert pos.shape[0] == 2
            assert pos.shape == vel.shape

    def test_wrong_count_rejected(self, tmp_path):
        path = write_mat(tmp_path / "two.mat", n_demos=2)
        with pytest.raises(SchemaError, match="expected 7"):
            read_lasa_mat(path)
        assert read_lasa_mat(path, allow_any_count=True).n_demos == 2

    def test_missing_demos_lists_found_fields(self, tmp_path):
        path = tmp_path / "odd.mat"
        scipy.io.savemat(path, {"trajectories": np.zeros((2, 5)), "label": "x"})
        with pytest.raises(SchemaError) as excinfo:
            read_lasa_mat(path)
        message = str(excinfo.value)
        assert "trajectories" in message
        assert "label" in message

    def test_missing_demo_fields_listed(self, tmp_path):
        path = write_mat(tmp_path / "novel.mat", drop_fields=("vel",))
        with pytest.raises(SchemaError) as excinfo:
            read_lasa_mat(path)
        assert "pos" in str(excinfo.value)

    def test_dt_derived_from_time_vector(self, tmp_path):
        path = write_mat(tmp_path / "t_only.mat", drop_fields=("dt",))
        assert read_lasa_mat(path).dt == pytest.approx(0.01)


class TestConvert:
    def test_output_schema_and_losslessness(self, lasa_mat, tmp_path):
        out = tmp_path / "demos.json"
        convert(lasa_mat, out)
        doc = json.loads(out.read_text())
        assert doc["dims"] == 2
        assert len(doc["demonstrations"]) == 7
        shape = read_lasa_mat(lasa_mat)
        assert doc["dt"] == shape.dt
        for entry, pos, vel in zip(doc["demonstrations"], shape.positions, shape.velocities):
            np.testing.assert_array_equal(np.asarray(entry["states"]), pos.T)
            np.testing.assert_array_equal(np.asarray(entry["derivatives"]), vel.T)

    def test_round_trip_bit_exact_doubles(self, tmp_path):
        # Adversarial values exercising full double precision.
        rng = np.random.default_rng(3)
        path = write_mat(tmp_path / "shape.mat")
        mat = scipy.io.loadmat(path, squeeze_me=True, struct_as_record=False)
        raw = np.asarray(mat["demos"], dtype=object).ravel()[0].pos
        out = tmp_path / "demos.json"
        convert(path, out)
        loaded = np.asarray(json.loads(out.read_text())["demonstrations"][0]["states"])
        np.testing.assert_array_equal(loaded, np.asarray(raw, dtype=float).T)
        del rng


class TestCli:
    def test_success(self, lasa_mat, tmp_path):
        out = tmp_path / "demos.json"
        assert main([str(lasa_mat), str(out)]) == 0
        assert out.exists()

    def test_schema_error_exit_one(self, tmp_path, capsys):
        path = write_mat(tmp_path / "two.mat", n_demos=2)
        code = main([str(path), str(tmp_path / "o.json")])
        assert code == 1
        assert json.loads(capsys.readouterr().err)["error"] == "schema"

    def test_allow_any_count_flag(self, tmp_path):
        path = write_mat(tmp_path / "two.mat", n_demos=2)
        out = tmp_path / "o.json"
        assert main([str(path), str(out), "--allow-any-count"]) == 0
        assert len(json.loads(out.read_text())["demonstrations"]) == 2

    def test_missing_input_exit_three(self, tmp_path, capsys):
        code = main([str(tmp_path / "nope.mat"), str(tmp_path / "o.json")])
        assert code == 3
        assert json.loads(capsys.readouterr().err)["error"] == "io"


class TestPrimaryPipelineIntegration:
    def test_train_consumes_converted_demos(self, lasa_mat, tmp_path):
        """Acceptance: MAT fixture -> DemoFile -> primary `train` end to end."""
        demos_json = tmp_path / "demos.json"
        convert(lasa_mat, demos_json)
        center = np.mean(
            [
                np.asarray(d["states"])[-1]
                for d in json.loads(demos_json.read_text())["demonstrations"]
            ],
            axis=0,
        )
        states = np.vstack(
            [np.asarray(d["states"]) for d in json.loads(demos_json.read_text())["demonstrations"]]
        )
        half = 1.3 * np.max(np.abs(states - center), axis=0)
        (tmp_path / "barrier.json").write_text(
            json.dumps(
                {
                    "kind": "ellipse2d",
                    "center": center.tolist(),
                    "semi_axes": half.tolist(),
                    "rotation": 0.0,
                    "gamma": 2.0,
                }
            )
        )
        (tmp_path / "config.json").write_text(
            json.dumps(
                {
                    "n_h": 10,
                    "rho": 5.0,
                    "sampling": {"strategy": "uniform-random", "count": 150, "seed": 1},
                }
            )
        )
        result = subprocess.run(
            [
                sys.executable, "-m", "safeflow.cli", "train",
                "--demos", str(demos_json),
                "--barrier", str(tmp_path / "barrier.json"),
                "--config", str(tmp_path / "config.json"),
                "--out", str(tmp_path / "model.json"),
            ],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0, result.stderr
        model = json.loads((tmp_path / "model.json").read_text())
        assert model["format_version"] == "safeflow/1"
        assert model["diagnostics"]["qp_status"] == "optimal"
