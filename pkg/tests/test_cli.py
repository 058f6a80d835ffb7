import json
import os

import pytest

from corrdyn import gallery
from corrdyn.cli import main
from corrdyn.correspondence import to_record
from corrdyn.manifest import canonical_json, load_config, parse_policy, ConfigError
from corrdyn.pointcloud import load_cloud


def write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def run_dir(out_root):
    subs = [d for d in os.listdir(out_root) if os.path.isdir(os.path.join(out_root, d))]
    assert len(subs) == 1
    return os.path.join(out_root, subs[0])


class TestAnalyze:
    def test_linear_pair_report(self, tmp_path, lin, capsys):
        cfg = {"correspondence": to_record(lin), "seed": 3, "grid_resolution": 96,
               "analyze": {"horizon": 6, "norm_iters": 12}}
        code = main(["analyze", "--config", write_cfg(tmp_path, cfg),
                     "--out", str(tmp_path / "runs")])
        out = capsys.readouterr().out
        assert code == 0
        assert "d1 = 2, d2 = 2" in out
        rd = run_dir(tmp_path / "runs")
        report = json.load(open(os.path.join(rd, "analysis.json")))
        assert report["delta_bound"] == 4
        assert len(report["b2"]) == 2
        manifest = json.load(open(os.path.join(rd, "manifest.json")))
        assert manifest["command"] == "analyze"
        assert "analysis.json" in manifest["outputs"]

    def test_fiber_graph_rejected_as_config_error(self, tmp_path):
        rec = {"bidegree": [2, 1],
               "coeffs": [[0, 0], [0, 0], [0, 0], [1, 0], [-1, 0], [0, 0]]}
        code = main(["analyze", "--config", write_cfg(tmp_path, {"correspondence": rec}),
                     "--out", str(tmp_path / "runs")])
        assert code == 2

    def test_missing_config(self, tmp_path):
        assert main(["analyze", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "runs")]) == 2


class TestEquidistribute:
    def test_outputs_and_reproducibility(self, tmp_path, hyp):
        cfg = {"correspondence": to_record(hyp), "seed": 5,
               "equidistribute": {"direction": "plus", "n_values": [2, 4, 6],
                                  "budget": 5000, "starting_points": [[1.0, 0.0]],
                                  "render": {"resolution": 64, "bandwidth": 2.0}}}
        cpath = write_cfg(tmp_path, cfg)
        assert main(["equidistribute", "--config", cpath,
                     "--out", str(tmp_path / "r1")]) == 0
        assert main(["equidistribute", "--config", cpath,
                     "--out", str(tmp_path / "r2")]) == 0
        d1, d2 = run_dir(tmp_path / "r1"), run_dir(tmp_path / "r2")
        assert os.path.basename(d1) == os.path.basename(d2)
        for name in sorted(os.listdir(d1)):
            if name.endswith((".bin", ".pgm")):
                b1 = open(os.path.join(d1, name), "rb").read()
                b2 = open(os.path.join(d2, name), "rb").read()
                assert b1 == b2, name
        cloud = load_cloud(os.path.join(d1, "cloud_p0_n6.bin"))
        assert abs(cloud.mass - 1.0) < 1e-12

    def test_strict_exit_on_periodic_critical_value(self, tmp_path, sq):
        cfg = {"correspondence": to_record(sq), "seed": 2,
               "equidistribute": {"direction": "plus", "n_values": [2, 3, 4],
                                  "budget": 2000,
                                  "render": {"resolution": 32}}}
        code = main(["equidistribute", "--config", write_cfg(tmp_path, cfg),
                     "--out", str(tmp_path / "runs"), "--strict"])
        assert code == 4
        rd = run_dir(tmp_path / "runs")
        names = os.listdir(rd)
        assert any(name.endswith("_unverified.bin") for name in names)
        manifest = json.load(open(os.path.join(rd, "manifest.json")))
        assert manifest["flags"]["hypothesis_unverified"] is True


class TestOtherCommands:
    def test_spectra(self, tmp_path, capsys):
        rot = gallery.rotation_pair(12, -12, 96)
        cfg = {"correspondence": to_record(rot), "seed": 1, "grid_resolution": 96,
               "spectra": {"iters": 12, "directions": ["pullback"]}}
        assert main(["spectra", "--config", write_cfg(tmp_path, cfg),
                     "--out", str(tmp_path / "runs")]) == 0
        out = capsys.readouterr().out
        assert "weak-modularity suspected" in out
        rd = run_dir(tmp_path / "runs")
        rep = json.load(open(os.path.join(rd, "spectra.json")))
        assert abs(rep["pullback"]["norm_estimate"] - 1.0) < 0.02

    def test_mixing(self, tmp_path, sq):
        cfg = {"correspondence": to_record(sq), "seed": 4,
               "mixing": {"pairs": [[[8, 8, "re"], [2, 2, "re"]]], "n_range": [2, 4],
                          "budget": 50000, "mu_depth": 8, "mu_atoms": 256,
                          "start": [3.0, 0.0]}}
        assert main(["mixing", "--config", write_cfg(tmp_path, cfg),
                     "--out", str(tmp_path / "runs")]) == 0
        rd = run_dir(tmp_path / "runs")
        rep = json.load(open(os.path.join(rd, "mixing.json")))
        assert rep[0]["pairs"][0][0] == 2

    def test_periodic(self, tmp_path, lin):
        cfg = {"correspondence": to_record(lin), "seed": 1,
               "periodic": {"n_values": [1]}}
        assert main(["periodic", "--config", write_cfg(tmp_path, cfg),
                     "--out", str(tmp_path / "runs")]) == 0
        rd = run_dir(tmp_path / "runs")
        rep = json.load(open(os.path.join(rd, "periodic_summary.json")))
        assert rep["1"]["count_with_multiplicity"] == 4
        table = open(os.path.join(rd, "periodic_n1.txt")).read()
        assert "repelling" in table

    def test_render_from_cloud_file(self, tmp_path, hyp):
        cfg = {"correspondence": to_record(hyp), "seed": 5,
               "equidistribute": {"direction": "plus", "n_values": [4],
                                  "budget": 2000, "render": {"resolution": 32}}}
        assert main(["equidistribute", "--config", write_cfg(tmp_path, cfg),
                     "--out", str(tmp_path / "r")]) == 0
        cloud_file = os.path.join(run_dir(tmp_path / "r"), "cloud_p0_n4.bin")
        cfg2 = {"correspondence": to_record(hyp),
                "render": {"cloud_file": cloud_file, "resolution": 64}}
        assert main(["render", "--config", write_cfg(tmp_path, cfg2, "r.json"),
                     "--out", str(tmp_path / "r2")]) == 0
        pgm = os.path.join(run_dir(tmp_path / "r2"), "density.pgm")
        assert open(pgm, "rb").read(3) == b"P5\n"


class TestConfigHandling:
    def test_round_trip_identity(self, tmp_path, hyp):
        cfg = {"correspondence": to_record(hyp), "seed": 9,
               "analyze": {"horizon": 4, "norm_iters": 10}}
        path = write_cfg(tmp_path, cfg)
        loaded = load_config(path)
        again = json.loads(canonical_json(loaded))
        assert canonical_json(again) == canonical_json(loaded)

    def test_manifest_accepted_as_config(self, tmp_path, lin):
        cfg = {"correspondence": to_record(lin), "seed": 3, "grid_resolution": 96,
               "analyze": {"horizon": 4, "norm_iters": 10}}
        assert main(["analyze", "--config", write_cfg(tmp_path, cfg),
                     "--out", str(tmp_path / "a")]) == 0
        manifest_path = os.path.join(run_dir(tmp_path / "a"), "manifest.json")
        assert main(["analyze", "--config", manifest_path,
                     "--out", str(tmp_path / "b")]) == 0
        assert os.path.basename(run_dir(tmp_path / "a")) == os.path.basename(run_dir(tmp_path / "b"))

    def test_unknown_policy_field_rejected(self):
        with pytest.raises(ConfigError, match="unknown policy"):
            parse_policy({"policy": {"not_a_field": 1.0}})

    def test_seed_override_changes_run_id(self, tmp_path, lin):
        cfg = {"correspondence": to_record(lin), "seed": 3, "grid_resolution": 96,
               "analyze": {"horizon": 4, "norm_iters": 10}}
        cpath = write_cfg(tmp_path, cfg)
        assert main(["analyze", "--config", cpath, "--out", str(tmp_path / "a")]) == 0
        assert main(["analyze", "--config", cpath, "--out", str(tmp_path / "b"),
                     "--seed", "77"]) == 0
        assert os.path.basename(run_dir(tmp_path / "a")) != os.path.basename(run_dir(tmp_path / "b"))
