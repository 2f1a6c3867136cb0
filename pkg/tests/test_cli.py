import os

import pytest

from riskring.cli import main
from riskring.dataset import Dataset

SCENARIO = """
format_version = 1
seed = 5
[uav]
altitude_m = 8000
speed_mps = 330
heading_deg = 0
[launch]
time_s = 0
range_km = 60
bearing_deg = 45
altitude_m = 10000
speed_mps = 300
[launch]
time_s = 0
range_km = 65
bearing_deg = 180
altitude_m = 10000
speed_mps = 300
[launch]
time_s = 3
range_km = 70
bearing_deg = 300
altitude_m = 9500
speed_mps = 290
"""


@pytest.fixture()
def scenario_file(tmp_path):
    path = tmp_path / "scenario.txt"
    path.write_text(SCENARIO)
    return str(path)


def run(argv):
    return main(argv)


class TestCollectTrain:
    def test_collect_then_train(self, tmp_path, capsys):
        data = str(tmp_path / "n.bvrd")
        assert run(["collect", "--policy", "N", "--episodes", "3", "--seed", "7",
                    "--out", data, "--workers", "1"]) == 0
        out = capsys.readouterr().out
        assert "3 episodes" in out
        ds = Dataset.read(data)
        assert ds.n_episodes == 3

        model = str(tmp_path / "n.bvrm")
        assert run(["train", "--dataset", data, "--out", model,
                    "--epochs", "2", "--seed", "1"]) == 0
        assert os.path.getsize(model) > 100000
        assert "val mse" in capsys.readouterr().out

    def test_collect_determinism(self, tmp_path):
        a, b = str(tmp_path / "a.bvrd"), str(tmp_path / "b.bvrd")
        for out in (a, b):
            assert run(["collect", "--policy", "SE", "--episodes", "2", "--seed", "9",
                        "--out", out, "--workers", "2"]) == 0
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_bad_dataset_path_fails_cleanly(self, tmp_path, capsys):
        code = run(["train", "--dataset", str(tmp_path / "missing.bvrd"),
                    "--out", str(tmp_path / "m.bvrm")])
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestAssessReplay:
    def test_assess_prints_ring_with_safest_last(self, scenario_file, shared_manifest, capsys):
        assert run(["assess", "--scenario", scenario_file, "--manifest", shared_manifest]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("risk_ring format_version=1")
        assert len(lines) == 10
        assert lines[-1].startswith("safest policy=")

    def test_assess_deterministic(self, scenario_file, shared_manifest, capsys):
        run(["assess", "--scenario", scenario_file, "--manifest", shared_manifest])
        first = capsys.readouterr().out
        run(["assess", "--scenario", scenario_file, "--manifest", shared_manifest])
        assert capsys.readouterr().out == first

    def test_replay_fixed_policy_writes_trace(self, scenario_file, shared_manifest,
                                              tmp_path, capsys):
        trace = str(tmp_path / "trace.txt")
        assert run(["replay", "--scenario", scenario_file, "--manifest", shared_manifest,
                    "--policy", "SW", "--out", trace]) == 0
        assert "outcome=" in capsys.readouterr().out
        content = open(trace).read()
        assert content.startswith("replay_trace format_version=1")
        assert "mode=SW" in content

    def test_replay_determinism(self, scenario_file, shared_manifest, tmp_path):
        t1, t2 = str(tmp_path / "t1.txt"), str(tmp_path / "t2.txt")
        for out in (t1, t2):
            assert run(["replay", "--scenario", scenario_file, "--manifest", shared_manifest,
                        "--policy", "auto", "--out", out]) == 0
        assert open(t1).read() == open(t2).read()

    def test_missing_manifest_is_an_error(self, scenario_file, capsys):
        with pytest.raises(SystemExit):
            run(["assess", "--scenario", scenario_file])
