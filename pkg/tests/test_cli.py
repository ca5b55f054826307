import json
import os

import numpy as np
import pytest

from tzitzeica import cli, meshout
from tzitzeica.config import parse_config_text
from tzitzeica.errors import ConfigParseError, ConfigValidationError
from tzitzeica.grid import PeriodicGrid, load_field

FLAT_LY = 2.0 * np.pi / np.sqrt(3.0)


def flat_config_text(out_dir, nx=32, ny=32, substeps=16, extra=""):
    return (
        f"nx = {nx}\nny = {ny}\n"
        f"lx = {float(2*np.pi)!r}\nly = {float(FLAT_LY)!r}\n"
        "radius = 1.0\ntheta = 0.0\ntol = 1e-10\nmax_iter = 20\n"
        f"seed = zero\nsubsteps = {substeps}\nout_dir = {out_dir}\n" + extra
    )


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def test_config_parse_and_defaults(tmp_path):
    cfg = parse_config_text(flat_config_text(str(tmp_path)))
    assert cfg.nx == 32 and cfg.ny == 32
    assert cfg.projection == "pca"
    assert cfg.extend_closure is True


def test_config_comments_and_errors():
    cfg = parse_config_text(
        "nx = 8 # nodes\nny = 8\nlx = 1.0\nly = 1.0\n# a comment line\n"
    )
    assert cfg.nx == 8
    with pytest.raises(ConfigParseError):
        parse_config_text("nx 8\n")
    with pytest.raises(ConfigParseError):
        parse_config_text("nx = 8\nnx = 9\nny = 8\nlx = 1\nly = 1\n")
    with pytest.raises(ConfigValidationError):
        parse_config_text("nx = 8\nny = 8\nlx = 1.0\nly = 1.0\nbogus = 1\n")
    with pytest.raises(ConfigValidationError):
        parse_config_text("nx = 8\nny = 8\nlx = 1.0\n")
    with pytest.raises(ConfigValidationError):
        parse_config_text("nx = 8\nny = 8\nlx = -1.0\nly = 1.0\n")
    with pytest.raises(ConfigValidationError):
        parse_config_text("nx = 8\nny = 8\nlx = 1.0\nly = 1.0\nseed = wave\n")
    with pytest.raises(ConfigValidationError):
        parse_config_text("nx = 8\nny = 8\nlx = 1\nly = 1\nseed = wave\nwave_energy = 5\n")


def test_cli_exit_codes(tmp_path):
    missing = str(tmp_path / "nope.cfg")
    assert cli.main(["solve", "--config", missing]) == 2

    bad = write_config(tmp_path, "nx 8 without an equals sign\n", "bad.cfg")
    assert cli.main(["solve", "--config", bad]) == 2

    invalid = write_config(tmp_path, "nx = 4\nny = 8\nlx = 1\nly = 1\n", "invalid.cfg")
    assert cli.main(["solve", "--config", invalid]) == 3


def test_cli_numerical_failure_is_exit_4_with_named_error(tmp_path):
    # grid tuned onto the -12 resonance
    n = 64
    theta = 2 * np.pi / n
    num = -30.0 + 32.0 * np.cos(theta) - 2.0 * np.cos(2.0 * theta)
    lx = n * np.sqrt(-num / 144.0)
    out = tmp_path / "out"
    cfgtext = (
        f"nx = {n}\nny = 8\nlx = {float(lx)!r}\nly = 0.5\nseed = zero\nout_dir = {out}\n"
    )
    cfg_path = write_config(tmp_path, cfgtext, "resonant.cfg")
    assert cli.main(["solve", "--config", cfg_path]) == 4
    log_lines = (out / "solve.log").read_text().strip().splitlines()
    assert log_lines[-1] == "error: resonance"


# ---------------------------------------------------------------------------
# pipeline stages and artifacts
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def flat_run(tmp_path_factory):
    out = str(tmp_path_factory.mktemp("flatrun"))
    cfg = parse_config_text(flat_config_text(out))
    for stage in ("solve", "frame", "surface", "report", "export"):
        cli.run_pipeline(cfg, stage, out, echo=False)
    return cfg, out


def test_solve_stage_zero_seed(flat_run):
    cfg, out = flat_run
    field = load_field(os.path.join(out, cli.FIELD_CSV))
    assert np.all(field.values == 0.0)
    log = open(os.path.join(out, "solve.log")).read()
    assert "final_residual=0" in log


def test_frame_csv_round_trip(flat_run):
    cfg, out = flat_run
    field = load_field(os.path.join(out, cli.FIELD_CSV))
    frame = cli.load_frame(os.path.join(out, cli.FRAME_CSV), field)
    assert frame.extend == (32, 32)
    assert frame.unitary.shape == (64, 64, 3, 3)
    from tzitzeica.lax import frame_orthonormality_report

    assert frame_orthonormality_report(frame) < 1e-8
    # write/read identity
    second = os.path.join(out, "frame2.csv")
    cli.save_frame(frame, second)
    again = cli.load_frame(second, field)
    assert np.array_equal(again.unitary, frame.unitary)


def test_report_stage_contents(flat_run):
    cfg, out = flat_run
    with open(os.path.join(out, cli.REPORT_JSON)) as fh:
        rep = json.load(fh)
    assert rep["h2_max"] < 1e-10
    assert rep["minimality_H"] < 1e-8
    assert rep["invariant_t2_defect"] < 1e-5
    assert rep["closure_defect"] < 1e-4
    assert all(v >= 0 for v in rep.values())


def test_mesh_csv_and_obj_round_trip(flat_run):
    cfg, out = flat_run
    grid, radius, points = meshout.load_mesh_points(os.path.join(out, cli.MESH_CSV))
    assert grid.nx == 32 and radius == 1.0
    radii = np.sqrt(np.sum(np.abs(points) ** 2, axis=-1))
    assert np.abs(radii - 1.0).max() < 1e-8

    verts, faces = meshout.parse_obj(os.path.join(out, "mesh.obj"))
    assert verts.shape == (32 * 32, 3)
    assert faces.shape == (2 * 32 * 32, 3)
    assert faces.min() == 0 and faces.max() == 32 * 32 - 1

    with open(os.path.join(out, "mesh.meta.json")) as fh:
        meta = json.load(fh)
    assert meta["projection"] == "pca"
    assert meta["faces"] == 2 * 32 * 32

    ply = open(os.path.join(out, "mesh.ply")).read().splitlines()
    assert ply[0] == "ply"
    assert f"element vertex {32*32}" in ply


def test_named_projection_export(tmp_path):
    out = str(tmp_path)
    cfg = parse_config_text(
        flat_config_text(out, extra="projection = re1,re2,re3\n")
    )
    for stage in ("solve", "frame", "surface", "export"):
        cli.run_pipeline(cfg, stage, out, echo=False)
    grid, radius, points = meshout.load_mesh_points(os.path.join(out, cli.MESH_CSV))
    verts, _ = meshout.parse_obj(os.path.join(out, "mesh.obj"))
    assert np.allclose(verts, meshout.points_to_r6(points)[:, [0, 2, 4]], atol=1e-12)
    with open(os.path.join(out, "mesh.meta.json")) as fh:
        assert json.load(fh)["projection"] == ["re1", "re2", "re3"]


def test_surface_requires_frame_artifact(tmp_path):
    out = str(tmp_path)
    cfg = parse_config_text(flat_config_text(out))
    with pytest.raises(ConfigValidationError):
        cli.run_pipeline(cfg, "surface", out, echo=False)


def test_wave_stage(tmp_path):
    out = str(tmp_path)
    cfg = parse_config_text(
        flat_config_text(out, extra="wave_energy = 6.1\n")
    )
    cli.run_pipeline(cfg, "wave", out, echo=False)
    lines = open(os.path.join(out, cli.WAVE_CSV)).read().splitlines()
    n, period, energy = lines[0].split(",")
    assert int(n) == len(lines) - 1
    assert abs(float(energy) - 6.1) < 1e-12
    log = open(os.path.join(out, "wave.log")).read()
    assert "period_quadrature=" in log and "energy_drift=" in log
