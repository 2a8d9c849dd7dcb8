import json
import re

import numpy as np
import numpy.testing as npt
import pytest

from densitop import cli, problem, runner
from densitop.runner import RunConfig


def test_render_density_mapping():
    x = np.array([[0.0, 0.5, 1.0], [-0.2, 1.3, 0.25]])
    pixels = runner.render_density(x)
    assert pixels.dtype == np.uint8
    # Solid is black, void is white; out-of-range values clamp.
    npt.assert_array_equal(pixels, [[255, 128, 0], [255, 0, 191]])


def test_pgm_roundtrip(tmp_path, rng):
    pixels = rng.integers(0, 256, size=(5, 9), dtype=np.uint8)
    path = tmp_path / "img.pgm"
    runner.write_pgm(path, pixels)
    data = path.read_bytes()
    assert data.startswith(b"P5\n9 5\n255\n")
    assert len(data) == len(b"P5\n9 5\n255\n") + 5 * 9
    npt.assert_array_equal(runner.read_pgm(path), pixels)


def test_read_pgm_rejects_other_formats(tmp_path):
    path = tmp_path / "img.ppm"
    path.write_bytes(b"P6\n2 2\n255\n" + bytes(12))
    with pytest.raises(ValueError, match="not a binary PGM"):
        runner.read_pgm(path)


def test_write_pgm_requires_2d(tmp_path):
    with pytest.raises(ValueError, match="2D"):
        runner.write_pgm(tmp_path / "x.pgm", np.zeros(4, dtype=np.uint8))


def test_build_spec_preset_overrides():
    cfg = RunConfig(problem="cantilever", width=12, height=8, density=0.35,
                    steps=7, filter_width=1.4, penal=2.0)
    spec = runner.build_spec(cfg)
    assert (spec.nelx, spec.nely) == (12, 8)
    assert spec.density == 0.35
    assert spec.opt_steps == 7
    assert spec.filter_width == 1.4
    assert spec.penal == 2.0


def test_build_spec_file_problem(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"preset": "mbb", "width": 8, "height": 5}))
    spec = runner.build_spec(RunConfig(problem=str(path), steps=3, density=0.45))
    assert (spec.nelx, spec.nely) == (8, 5)
    assert spec.opt_steps == 3
    assert spec.density == 0.45

    with pytest.raises(problem.ValidationError, match="preset problems"):
        runner.build_spec(RunConfig(problem=str(path), width=10))


def test_run_writes_outputs(tmp_path):
    out = tmp_path / "results"
    cfg = RunConfig(problem="mbb", out_dir=str(out), width=8, height=5, steps=3,
                    save_frames=True, quiet=True)
    assert runner.run(cfg) == 0

    design = runner.read_pgm(out / "design.pgm")
    assert design.shape == (5, 8)
    full = runner.read_pgm(out / "design_full.pgm")
    assert full.shape == (5, 16)
    # The full design is the half domain mirrored about the left edge.
    npt.assert_array_equal(full[:, 8:], design)
    npt.assert_array_equal(full[:, :8], design[:, ::-1])

    frames = sorted((out / "frames").iterdir())
    assert [p.name for p in frames] == [f"step_{n:04d}.pgm" for n in range(4)]

    lines = (out / "loss.csv").read_text().splitlines()
    assert lines[0] == "step,compliance,volume_fraction"
    assert len(lines) == 1 + 4  # header plus one row per evaluation
    for n, line in enumerate(lines[1:]):
        step, compliance, volume = line.split(",")
        assert int(step) == n
        assert float(compliance) > 0
        assert 0.0 < float(volume) <= 0.4 + 1e-6


def test_run_trace_matches_csv(tmp_path, capsys):
    out = tmp_path / "traced"
    cfg = RunConfig(problem="mbb", out_dir=str(out), width=8, height=5, steps=4)
    spec = runner.build_spec(cfg)
    assert spec.print_every == 10  # only evaluation 0 gets traced here
    assert runner.run(cfg) == 0

    stdout = capsys.readouterr().out
    assert "Optimizing a problem with 108 DOFs" in stdout
    traced = re.findall(r"step (\d+), loss (\d\.\d{2}e[+-]\d{2}), t=\d+\.\d{2}s", stdout)
    assert [int(step) for step, _ in traced] == [0]

    rows = (out / "loss.csv").read_text().splitlines()[1:]
    losses = [float(row.split(",")[1]) for row in rows]
    for step, shown in traced:
        assert shown == f"{losses[int(step)]:.2e}"


def test_run_invalid_problem_returns_1(tmp_path, capsys):
    cfg = RunConfig(problem=str(tmp_path / "missing.json"), out_dir=str(tmp_path / "o"))
    assert runner.run(cfg) == 1
    assert "error:" in capsys.readouterr().err


def test_run_numerical_failure_returns_2(tmp_path, capsys):
    # A single pinned node cannot restrain rotation: the solve must fail and
    # the runner must report it as a numerical failure, not a crash.
    doc = {"width": 4, "height": 3, "fixed": [[0, 0, 0], [0, 0, 1]],
           "loads": [[4, 3, 1, -1.0]], "opt_steps": 2}
    path = tmp_path / "mechanism.json"
    path.write_text(json.dumps(doc))
    cfg = RunConfig(problem=str(path), out_dir=str(tmp_path / "o"), quiet=True)
    assert runner.run(cfg) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_run_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "cli_out"
    code = cli.main([
        "run", "--problem", "mbb", "--width", "8", "--height", "5",
        "--steps", "2", "--out", str(out), "--quiet",
    ])
    assert code == 0
    assert (out / "design.pgm").exists()
    assert (out / "loss.csv").exists()
    assert not (out / "frames").exists()
    capsys.readouterr()

    assert cli.main(["run", "--problem", "no-such-preset.json"]) == 1
    assert "error:" in capsys.readouterr().err

    # argparse usage problems map to exit code 1, --help to 0.
    assert cli.main([]) == 1
    assert cli.main(["run"]) == 1
    assert cli.main(["--help"]) == 0
    capsys.readouterr()


def test_apply_thread_cap():
    env = {}
    assert cli.apply_thread_cap(env) is None
    assert env == {var: "1" for var in cli._THREAD_VARS}

    env = {"DENSITOP_THREADS": "3", "OMP_NUM_THREADS": "8"}
    assert cli.apply_thread_cap(env) is None
    assert env["OMP_NUM_THREADS"] == "8"  # explicit settings win
    assert env["MKL_NUM_THREADS"] == "3"

    assert "positive integer" in cli.apply_thread_cap({"DENSITOP_THREADS": "0"})
    assert "positive integer" in cli.apply_thread_cap({"DENSITOP_THREADS": "abc"})
