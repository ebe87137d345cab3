import json

import numpy as np
import pytest

from smartpatch import BezierPatch, PatchSet
from smartpatch.cli import main
from smartpatch.io import dump_patchset, read_patchset

from helpers import bilinear_grid, random_compliant_grid, random_patch


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_set(tmp_path, name, patches, adjacency=None):
    path = tmp_path / f"{name}.json"
    path.write_text(dump_patchset(PatchSet(name=name, patches=patches, adjacency=adjacency)))
    return path


@pytest.fixture
def bilinear_set(tmp_path, rng):
    patches = [
        BezierPatch(*(bilinear_grid(*rng.uniform(-5, 5, 4)) for _ in range(3)))
        for _ in range(2)
    ]
    return write_set(tmp_path, "bilinear", patches)


# ---------------------------------------------------------------------------
# lambda


def test_lambda_text_report(capsys):
    code, out, _ = run(capsys, "lambda")
    assert code == 0
    assert "rank = 5" in out
    assert "1 -3 3 -1 -3 9 -9 3 3 -9 9 -3 -1 3 -3 1" in out.splitlines()[1]
    assert "1/9" in out


def test_lambda_json_report(capsys):
    code, out, _ = run(capsys, "lambda", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["rank"] == 5
    assert rep["matches_reference"] is True
    assert rep["inner_identity"]["plus_variant_in_row_space"] is True
    assert rep["inner_identity"]["minus_variant_in_row_space"] is False
    assert len(rep["matrix"]) == 6 and len(rep["matrix"][0]) == 16


# ---------------------------------------------------------------------------
# validate


def test_validate_bilinear_compliant(capsys, bilinear_set):
    code, out, _ = run(capsys, "validate", "--in", str(bilinear_set))
    assert code == 0
    assert "2 of 2 patches compliant" in out


def test_validate_teapot_noncompliant(capsys, teapot_path):
    code, out, _ = run(capsys, "validate", "--in", str(teapot_path), "--json")
    assert code == 1
    rep = json.loads(out)
    assert rep["patch_count"] == 32
    # regression value: every patch of the raw teapot violates the
    # cubic-diagonal conditions in at least one coordinate
    assert len(rep["noncompliant_patches"]) == 32
    grids_bad = sum(
        1
        for p in rep["patches"]
        for coord in ("x", "y", "z")
        if p["coords"][coord]["max_residual"] > rep["tolerance"]
    )
    assert grids_bad == 68


def test_validate_empty_set(capsys, tmp_path):
    path = write_set(tmp_path, "empty", [])
    code, out, _ = run(capsys, "validate", "--in", str(path), "--json")
    assert code == 0
    assert json.loads(out)["patch_count"] == 0


def test_validate_hermite_form(capsys, tmp_path, rng):
    from helpers import hs_consistent_grid

    patches = [BezierPatch(*(hs_consistent_grid(rng) for _ in range(3)))]
    path = write_set(tmp_path, "hs", patches)
    code, out, _ = run(capsys, "validate", "--in", str(path), "--form", "hermite", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["patches"][0]["compliant"] is True


def test_validate_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", "--in", str(tmp_path / "nope.json"))
    assert code == 2
    assert "error" in err


def test_validate_malformed_json(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ not json")
    code, _, err = run(capsys, "validate", "--in", str(path))
    assert code == 2
    assert "line" in err


# ---------------------------------------------------------------------------
# repair


def test_repair_compliant_input_unchanged(capsys, tmp_path, rng):
    patches = [BezierPatch(*(random_compliant_grid(rng) for _ in range(3)))]
    src = write_set(tmp_path, "ok", patches)
    dst = tmp_path / "out.json"
    code, out, _ = run(capsys, "repair", "--in", str(src), "--out", str(dst), "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["max_displacement"] <= 1e-12
    assert rep["compliant_after"] is True
    back = read_patchset(dst)
    for g, h in zip(patches[0].grids, back.patches[0].grids):
        assert np.max(np.abs(g - h)) <= 1e-12


def test_repair_teapot_validates_after(capsys, teapot_path, tmp_path):
    dst = tmp_path / "teapot_fixed.json"
    code, out, _ = run(capsys, "repair", "--in", str(teapot_path), "--out", str(dst), "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["compliant_after"] is True
    assert rep["max_corner_displacement"] == 0.0
    code, _, _ = run(capsys, "validate", "--in", str(dst))
    assert code == 0


# ---------------------------------------------------------------------------
# convert


def test_convert_roundtrip_report(capsys, tmp_path, rng):
    src = write_set(tmp_path, "src", [random_patch(rng) for _ in range(3)])
    dst = tmp_path / "hermite.json"
    code, out, _ = run(
        capsys, "convert", "--in", str(src), "--out", str(dst),
        "--direction", "b2h", "--roundtrip", "--json",
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["roundtrip_max_error"] <= 1e-12
    assert (tmp_path / "hermite.json").exists()


def test_convert_constant_set(capsys, tmp_path):
    const = BezierPatch(np.ones((4, 4)), np.ones((4, 4)), np.ones((4, 4)))
    src = write_set(tmp_path, "const", [const])
    dst = tmp_path / "h.json"
    code, _, _ = run(capsys, "convert", "--in", str(src), "--out", str(dst), "--direction", "b2h")
    assert code == 0
    h = read_patchset(dst).patches[0]
    assert np.allclose(h.x[:2, :2], 1.0, atol=1e-14)
    assert np.allclose(h.x[2:, :], 0.0, atol=1e-14)
    # converting back restores the constant control net
    back = tmp_path / "b.json"
    code, _, _ = run(capsys, "convert", "--in", str(dst), "--out", str(back), "--direction", "h2b")
    assert code == 0
    b = read_patchset(back).patches[0]
    assert np.allclose(b.x, 1.0, atol=1e-14)


def test_convert_empty_set(capsys, tmp_path):
    src = write_set(tmp_path, "empty", [])
    dst = tmp_path / "out.json"
    code, out, _ = run(capsys, "convert", "--in", str(src), "--out", str(dst),
                       "--direction", "b2h", "--json")
    assert code == 0
    assert json.loads(out)["patch_count"] == 0


# ---------------------------------------------------------------------------
# tessellate


def test_tessellate_single_patch_merged(capsys, tmp_path, rng):
    src = write_set(tmp_path, "one", [random_patch(rng)])
    dst = tmp_path / "mesh.obj"
    code, out, _ = run(
        capsys, "tessellate", "--in", str(src), "--out", str(dst),
        "--n", "1", "--merge", "--json",
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["vertices"] == 4 and rep["triangles"] == 2
    lines = dst.read_text().splitlines()
    assert sum(1 for ln in lines if ln.startswith("v ")) == 4
    assert sum(1 for ln in lines if ln.startswith("f ")) == 2


def test_tessellate_reruns_byte_identical(capsys, tmp_path, rng):
    src = write_set(tmp_path, "one", [random_patch(rng)])
    a, b = tmp_path / "a.obj", tmp_path / "b.obj"
    run(capsys, "tessellate", "--in", str(src), "--out", str(a), "--n", "7",
        "--pattern", "alt", "--normals", "--merge")
    run(capsys, "tessellate", "--in", str(src), "--out", str(b), "--n", "7",
        "--pattern", "alt", "--normals", "--merge")
    assert a.read_bytes() == b.read_bytes()


def test_tessellate_per_patch_files(capsys, tmp_path, rng):
    src = write_set(tmp_path, "two", [random_patch(rng), random_patch(rng)])
    out_dir = tmp_path / "meshes"
    code, out, _ = run(capsys, "tessellate", "--in", str(src), "--out", str(out_dir),
                       "--n", "2", "--json")
    assert code == 0
    rep = json.loads(out)
    assert len(rep["files"]) == 2
    assert (out_dir / "patch_000.obj").exists() and (out_dir / "patch_001.obj").exists()


def test_tessellate_teapot_counts(capsys, teapot_path, tmp_path):
    dst = tmp_path / "teapot.obj"
    code, out, _ = run(
        capsys, "tessellate", "--in", str(teapot_path), "--out", str(dst),
        "--n", "16", "--merge", "--json",
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["vertices"] == 32 * 17 * 17
    assert rep["triangles"] == 32 * 2 * 16 * 16


# ---------------------------------------------------------------------------
# continuity


def test_continuity_identical_pair_fixture(capsys, tmp_path, rng):
    patch = random_patch(rng)
    twin = BezierPatch(patch.x, patch.y, patch.z)
    adjacency = [
        {"a": 0, "edge_a": "U1", "reversed_a": False, "b": 1, "edge_b": "U1", "reversed_b": False}
    ]
    doc = json.loads(dump_patchset(PatchSet(name="pair", patches=[patch, twin])))
    doc["adjacency"] = adjacency
    path = tmp_path / "pair.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "continuity", "--in", str(path), "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["pairs"][0]["c0_max_gap"] == 0.0
    assert rep["pairs"][0]["c1_max_mismatch"] == 0.0
    assert rep["pairs"][0]["g1_max_angle"] == 0.0


def test_continuity_offset_pair(capsys, tmp_path, rng):
    patch = random_patch(rng)
    shifted = BezierPatch(patch.x, patch.y, patch.z + 0.5)
    adjacency = [
        {"a": 0, "edge_a": "V0", "reversed_a": False, "b": 1, "edge_b": "V0", "reversed_b": False}
    ]
    doc = json.loads(dump_patchset(PatchSet(name="pair", patches=[patch, shifted])))
    doc["adjacency"] = adjacency
    path = tmp_path / "pair.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "continuity", "--in", str(path), "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["pairs"][0]["c0_max_gap"] == pytest.approx(0.5, abs=1e-12)


def test_continuity_needs_adjacency(capsys, bilinear_set):
    code, _, err = run(capsys, "continuity", "--in", str(bilinear_set))
    assert code == 2
    assert "detect" in err


def test_continuity_teapot_detected(capsys, teapot_path):
    code, out, _ = run(capsys, "continuity", "--in", str(teapot_path), "--detect", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["pair_count"] == 52  # regression: seams of the shipped teapot
    assert rep["worst"]["c0_max_gap"] <= 1e-9 * 3.525


# ---------------------------------------------------------------------------
# teapot pipeline


def test_teapot_pipeline(capsys, teapot_path, tmp_path):
    out_dir = tmp_path / "tea"
    code, out, _ = run(
        capsys, "teapot", "--in", str(teapot_path), "--out", str(out_dir), "--json"
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["patch_count"] == 32
    assert rep["before"]["noncompliant_patches"] == 32
    assert rep["after"]["noncompliant_patches"] == 0
    assert rep["after"]["max_residual"] <= 1e-9
    assert rep["max_corner_displacement"] == 0.0
    assert rep["c0_max_delta"] == 0.0
    assert rep["mesh"]["vertices"] == 32 * 17 * 17
    assert (out_dir / "teapot.obj").exists()
    assert (out_dir / "teapot_repaired.json").exists()
    report_file = json.loads((out_dir / "teapot_report.json").read_text())
    assert report_file["after"]["max_residual"] <= 1e-9
    # the repaired set must validate clean through the CLI as well
    code, _, _ = run(capsys, "validate", "--in", str(out_dir / "teapot_repaired.json"))
    assert code == 0


def test_teapot_missing_input(capsys, tmp_path):
    code, _, err = run(capsys, "teapot", "--in", str(tmp_path / "nope.newell"),
                       "--out", str(tmp_path / "out"))
    assert code == 2
    assert "ingest" in err
