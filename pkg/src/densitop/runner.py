"""End-to-end runs: optimize a problem, write images, a loss log, and a trace.

Outputs land in the configured directory: ``design.pgm`` (the optimized half
domain), ``design_full.pgm`` (mirrored to the full span), ``loss.csv`` (one
row per objective evaluation), and optionally ``frames/step_NNNN.pgm``
snapshots.  The CSV contains only deterministic columns so identical runs
produce identical files; wall-clock timing appears in the printed trace only.
"""

import dataclasses
import pathlib
import sys
import time

import numpy as np

from . import mma, problem
from .filters import mean_density
from .sparse import NumericalError


@dataclasses.dataclass
class RunConfig:
    """What to run and where to put the results.

    ``problem`` is a preset name (mbb, cantilever, bridge) or a path to a
    JSON problem file.  Unset overrides keep the problem's own values;
    width/height are meaningful for presets only.
    """

    problem: str
    out_dir: str = "out"
    width: int = None
    height: int = None
    density: float = None
    steps: int = None
    filter_width: float = None
    penal: float = None
    save_frames: bool = False
    quiet: bool = False


def build_spec(cfg):
    """ProblemSpec for a RunConfig, with all overrides applied."""
    if cfg.problem in problem.PRESETS:
        kwargs = {}
        for name, value in (("width", cfg.width), ("height", cfg.height),
                            ("density", cfg.density)):
            if value is not None:
                kwargs[name] = value
        spec = problem.PRESETS[cfg.problem](**kwargs)
    else:
        spec = problem.load_problem(cfg.problem)
        if cfg.width is not None or cfg.height is not None:
            raise problem.ValidationError(
                "width/height overrides apply only to preset problems")
        if cfg.density is not None:
            spec = dataclasses.replace(spec, density=cfg.density)
    overrides = {}
    if cfg.steps is not None:
        overrides["opt_steps"] = cfg.steps
    if cfg.filter_width is not None:
        overrides["filter_width"] = cfg.filter_width
    if cfg.penal is not None:
        overrides["penal"] = cfg.penal
    if overrides:
        spec = dataclasses.replace(spec, **overrides)
    return spec


def run(cfg):
    """Execute one optimization run; returns a process exit status.

    0 on success, 1 on a validation error, 2 on a numerical failure.
    """
    try:
        spec = build_spec(cfg)
    except problem.ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out = pathlib.Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()

    def progress(step, loss, _x):
        if not cfg.quiet:
            elapsed = time.perf_counter() - start
            print(f"step {step}, loss {loss:.2e}, t={elapsed:.2f}s", flush=True)

    if not cfg.quiet:
        print(f"Optimizing a problem with {spec.ndof} DOFs", flush=True)
    try:
        losses, x_final, frames = mma.optimize(spec, progress=progress)
    except problem.ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    volumes = [float(mean_density(frame, spec)) for frame in frames]
    _write_loss_csv(out / "loss.csv", losses, volumes)
    write_pgm(out / "design.pgm", render_density(x_final))
    full = np.concatenate([x_final[:, ::-1], x_final], axis=1)
    write_pgm(out / "design_full.pgm", render_density(full))
    if cfg.save_frames:
        frames_dir = out / "frames"
        frames_dir.mkdir(exist_ok=True)
        for n, frame in enumerate(frames):
            write_pgm(frames_dir / f"step_{n:04d}.pgm", render_density(frame))
    return 0


def _write_loss_csv(path, losses, volumes):
    # repr() of a plain float keeps full precision and is stable across runs
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("step,compliance,volume_fraction\n")
        for n, (loss, volume) in enumerate(zip(losses, volumes)):
            fh.write(f"{n},{float(loss)!r},{float(volume)!r}\n")


def render_density(x):
    """8-bit grayscale of a density field: solid is black, void is white."""
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    return np.floor(255.0 * (1.0 - x) + 0.5).astype(np.uint8)


def write_pgm(path, pixels):
    """Write an 8-bit grayscale image as a binary PGM (P5) file."""
    pixels = np.asarray(pixels, dtype=np.uint8)
    if pixels.ndim != 2:
        raise ValueError("PGM pixels must form a 2D array")
    height, width = pixels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())


def read_pgm(path):
    """Read back a binary PGM (P5) file as written by write_pgm."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM file")
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        begin = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(int(data[begin:pos]))
    width, height, maxval = fields
    if maxval != 255:
        raise ValueError(f"{path}: expected 8-bit pixels, got maxval {maxval}")
    pos += 1  # the single whitespace byte separating header and raster
    raster = np.frombuffer(data, dtype=np.uint8, offset=pos, count=width * height)
    return raster.reshape(height, width).copy()
