import subprocess
import sys

import pytest

from evoart.cli import main, parse_size


def run(*argv):
    return main([str(a) for a in argv])


def test_parse_size():
    assert parse_size("500") == (500, 500)
    assert parse_size("64x32") == (64, 32)


def test_unknown_subcommand_exits_one(capsys):
    assert run("paint") == 1
    assert "error" in capsys.readouterr().err


def test_missing_required_option():
    assert run("render", "--out", "x.png") == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "evoart", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "experiment" in proc.stdout


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("population_size = 4\ngenerations = 1\nwidth = 32\nheight = 32\n"
                    "eval_budget = 5\nexclude = flow-field\nseed = 9\n")
    return path


def test_evolve_twice_identical(config, tmp_path):
    assert run("evolve", "--config", config, "--out", tmp_path / "a", "--jobs", 1) == 0
    assert run("evolve", "--config", config, "--out", tmp_path / "b", "--jobs", 2) == 0
    for name in ("run_manifest", "fitness.csv", "gen1_ind0.png"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_experiment_masks_and_aggregate(config, tmp_path, capsys):
    out = tmp_path / "res"
    assert run("experiment", "--config", config, "--masks", "ut,ac;ns", "--replicates", 1,
               "--out", out, "--jobs", 1) == 0
    assert (out / "ec36" / "rep00" / "run_manifest").exists()
    assert (out / "ec16" / "rep00" / "run_manifest").exists()
    assert run("experiment", "--config", config, "--masks", "ut,ac;ns", "--replicates", 1,
               "--out", out, "--resume") == 0
    assert "skipped 2" in capsys.readouterr().out
    assert run("aggregate", "--results", out, "--out", tmp_path / "h.csv") == 0
    assert (tmp_path / "h.csv").read_text().splitlines()[0] == "config,pc,gc,ut,cd,ns,ac"
    assert run("sweeps", "--run", out / "ec36" / "rep00") == 0
    assert (out / "ec36" / "rep00" / "sweeps.csv").exists()


def test_bad_config_exits_one(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("population_size = 1\n")
    assert run("evolve", "--config", path, "--out", tmp_path / "o") == 1


def test_render_and_collage(tmp_path, capsys):
    g = tmp_path / "g.txt"
    g.write_text("basic-trig:0,2,0.2,1.0,0.0,0.5,2\n")
    (tmp_path / "img").mkdir()
    assert run("render", "--genome", g, "--size", "48x32", "--out", tmp_path / "img" / "a.png") == 0
    assert "genes expressed: 1" in capsys.readouterr().out
    assert run("collage", "--dir", tmp_path / "img", "--columns", 1, "--cell-size", "16x16",
               "--out", tmp_path / "c.png") == 0


def test_render_malformed_genome(tmp_path, capsys):
    g = tmp_path / "g.txt"
    g.write_text("basic-trig:0,2\n")
    assert run("render", "--genome", g, "--out", tmp_path / "a.png") != 0
    assert "line 1" in capsys.readouterr().err


def test_render_from_stdin(tmp_path, monkeypatch):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO("circle-packing:0,50,2,10\n"))
    assert run("render", "--genome", "-", "--size", 24, "--out", tmp_path / "s.png") == 0


def test_classifier_commands(tmp_path, capsys):
    from evoart.classifier import generate_smooth_corpus
    generate_smooth_corpus(4, (32, 32), 0, tmp_path / "art")
    assert run("classifier", "gen-noise", "--count", 4, "--size", 32, "--out", tmp_path / "noise") == 0
    assert run("classifier", "gen-noise", "--count", 0, "--out", tmp_path / "n0") == 1
    model = tmp_path / "m.txt"
    assert run("classifier", "train", "--art", tmp_path / "art", "--not-art", tmp_path / "noise",
               "--out", model) == 0
    assert run("classifier", "score", "--model", model, tmp_path / "noise" / "noise_0000.png") == 0
    assert capsys.readouterr().out.strip().endswith("not-art")
    assert run("classifier", "batch", "--model", model, "--dir", tmp_path / "art",
               "--out", tmp_path / "b.csv") == 0
    assert len((tmp_path / "b.csv").read_text().splitlines()) == 5
    assert run("classifier", "score", "--model", tmp_path / "nope.txt", tmp_path / "x.png") == 2


def test_timing_command(tmp_path):
    assert run("timing", "--invocations", 1, "--size", 32, "--out", tmp_path / "t.csv") == 0
    assert len((tmp_path / "t.csv").read_text().splitlines()) == 5
    assert run("timing", "--invocations", 0, "--out", tmp_path / "t.csv") == 1
