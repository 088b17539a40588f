import json
import os
import subprocess
import sys

import pytest

from factories import random_episode
from exoretarget.io.cli import main
from exoretarget.io.episode import read_episode, write_episode


@pytest.fixture(scope="module")
def synth(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    assert main(["gen-synthetic", "--scenario", "squat", "--out", str(d), "--duration", "3",
                 "--exo-rate", "25", "--odom-rate", "50"]) == 0
    return d


def test_gen_synthetic_files(synth):
    assert sorted(p.name for p in synth.iterdir()) == ["calib.json", "exo_raw.jsonl", "odom.jsonl", "truth.json"]
    truth = json.loads((synth / "truth.json").read_text())
    assert truth["scenario"] == "squat" and len(truth["arm_joints"]) == 76 and len(truth["base"]) == 151


def test_retarget_validate_stats_mirror(synth, tmp_path, capsys):
    ep = tmp_path / "ep.jsonl"
    assert main(["retarget", "--exo-raw", str(synth / "exo_raw.jsonl"), "--odom", str(synth / "odom.jsonl"),
                 "--out", str(ep), "--rate", "25", "--task-label", "Squat"]) == 0
    episode = read_episode(ep)
    assert episode.header.task_label == "Squat" and len(episode.frames) == 75

    capsys.readouterr()
    assert main(["validate", "--episode", str(ep)]) == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True

    assert main(["stats", "--input", str(ep)]) == 0
    s = json.loads(capsys.readouterr().out)
    assert s["frames"] == 75 and len(s["joints"]) == 26 and s["command"]["h"]["max"] == pytest.approx(0.75)

    mir = tmp_path / "mir.jsonl"
    assert main(["mirror-augment", "--episode", str(ep), "--out", str(mir)]) == 0
    assert read_episode(mir).header.mirrored


def test_validate_exit_code_on_violation(tmp_path, rng, capsys):
    ep = random_episode(rng, 5)  # random magnitudes: limits violated
    write_episode(ep, tmp_path / "bad.jsonl")
    capsys.readouterr()
    assert main(["validate", "--episode", str(tmp_path / "bad.jsonl")]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is False and report["summary"]["limit_violations"] > 0


def test_handled_errors_exit_2(tmp_path, capsys):
    (tmp_path / "junk.jsonl").write_text("not json\n")
    assert main(["validate", "--episode", str(tmp_path / "junk.jsonl")]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["stats", "--input", str(tmp_path / "missing.jsonl")]) == 2


def test_mix_and_stats_on_manifest(tmp_path, rng, capsys):
    for src in ("teleop", "exo"):
        (tmp_path / src).mkdir()
        for k in range(4):
            write_episode(random_episode(rng, 3, source=src), tmp_path / src / f"{k}.jsonl")
    out = tmp_path / "m.json"
    assert main(["mix", "--teleop-dir", str(tmp_path / "teleop"), "--exo-dir", str(tmp_path / "exo"),
                 "--teleop-n", "1", "--exo-n", "3", "--seed", "0", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["teleop_fraction"] == 0.25
    capsys.readouterr()
    assert main(["stats", "--input", str(out)]) == 0
    assert json.loads(capsys.readouterr().out)["episodes"] == 4
    assert main(["mix", "--teleop-dir", str(tmp_path / "teleop"), "--exo-dir", str(tmp_path / "exo"),
                 "--teleop-n", "9", "--exo-n", "0", "--seed", "0", "--out", str(out)]) == 2


def test_module_entry_point_and_log_level(tmp_path):
    env = dict(os.environ, EXO_LOG_LEVEL="info")
    r = subprocess.run([sys.executable, "-m", "exoretarget", "gen-synthetic", "--scenario", "home",
                        "--duration", "1", "--exo-rate", "10", "--odom-rate", "10", "--out", str(tmp_path)],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0 and "INFO" in r.stderr
    r = subprocess.run([sys.executable, "-m", "exoretarget", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "gen-synthetic" in r.stdout
