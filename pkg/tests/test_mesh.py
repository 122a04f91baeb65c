import csv
import math

import numpy as np
import pytest

from canalkit import AllSingular, InvalidParams, evaluate, export_csv, export_obj, normal, tessellate
from canalkit.mesh import CSV_HEADER
from canalkit.surface import local
from conftest import cylinder, generic_canal, helix_tube, torus

TWO_PI = 2 * math.pi


def test_cylinder_vertices_lie_on_radius():
    mesh = tessellate(cylinder(2.0), (-1.0, 1.0), ns=2, nt=4)
    assert mesh.vertices.shape == (8, 3)
    np.testing.assert_allclose(np.hypot(mesh.vertices[:, 1], mesh.vertices[:, 2]), 2.0, rtol=1e-15)
    assert mesh.quads.shape == (3, 4)
    assert mesh.n_masked == 0


def test_vertex_order_is_row_major():
    mesh = tessellate(generic_canal(), (-1.0, 1.0), ns=3, nt=5, with_curvature=False)
    i, j = 2, 3
    np.testing.assert_array_equal(mesh.vertices[i * 5 + j], evaluate(generic_canal(), mesh.s[i], mesh.t[j]))


def test_window_avoiding_singular_line_has_no_masked_cells():
    mesh = tessellate(helix_tube(-1), (-2.0, 2.0), t_range=(0.1, TWO_PI - 0.1), ns=9, nt=40)
    assert mesh.n_masked == 0
    assert mesh.t[0] == 0.1 and mesh.t[-1] == TWO_PI - 0.1


def test_full_range_masks_cells_touching_singular_line():
    ns, nt = 9, 65
    mesh = tessellate(helix_tube(-1), (-2.0, 2.0), ns=ns, nt=nt)
    mask = mesh.cell_mask.reshape(ns - 1, nt - 1)
    # t = 0 is a sample; only the cells to its right exist when the seam is open
    assert mask[:, 0].all() and not mask[:, 1:].any()

    welded = tessellate(helix_tube(-1), (-2.0, 2.0), ns=ns, nt=nt, weld=True)
    assert len(welded.quads) == nt * (ns - 1)
    mask = welded.cell_mask.reshape(ns - 1, nt)
    assert mask[:, 0].all() and mask[:, -1].all() and not mask[:, 1:-1].any()


def test_even_nt_samples_pi_on_positive_sign():
    ns, nt = 5, 64
    mesh = tessellate(helix_tube(1), (-2.0, 2.0), ns=ns, nt=nt)
    assert mesh.t[nt // 2] == math.pi
    mask = mesh.cell_mask.reshape(ns - 1, nt - 1)
    assert set(np.flatnonzero(mask.any(axis=0))) == {nt // 2 - 1, nt // 2}
    assert not mesh.regular.reshape(ns, nt)[:, nt // 2].any()


def test_tiny_window_on_singular_line_is_all_singular():
    with pytest.raises(AllSingular):
        tessellate(helix_tube(1), (-0.5, 0.5), t_range=(math.pi - 0.01, math.pi + 0.01), ns=2, nt=3)


def test_bad_resolution():
    with pytest.raises(InvalidParams):
        tessellate(torus(), ns=1, nt=8)


def test_vertices_and_normals_match_surface():
    surf = generic_canal()
    mesh = tessellate(surf, (-2.5, 2.5), ns=17, nt=32)
    S = np.repeat(mesh.s, 32)
    T = np.tile(mesh.t, 17)
    loc = local(surf, S)
    dist = np.linalg.norm(mesh.vertices - loc.frame.position, axis=-1)
    np.testing.assert_allclose(dist, loc.jet.r, rtol=1e-10)
    reg = mesh.regular
    assert reg.sum() > 0
    np.testing.assert_allclose(mesh.normals[reg], normal(surf, S[reg], T[reg]), atol=1e-10)
    np.testing.assert_allclose(np.linalg.norm(mesh.normals, axis=-1), 1.0, atol=1e-14)


def test_refinement_reproduces_shared_vertices_exactly():
    coarse = tessellate(torus(), (-3.0, 3.0), ns=5, nt=16)
    fine = tessellate(torus(), (-3.0, 3.0), ns=9, nt=32)
    fine_v = fine.vertices.reshape(9, 32, 3)
    np.testing.assert_array_equal(fine_v[::2, ::2], coarse.vertices.reshape(5, 16, 3))


def test_obj_layout(tmp_path):
    mesh = tessellate(torus(), (-1.0, 1.0), ns=2, nt=3)
    path = tmp_path / "m.obj"
    export_obj(mesh, path)
    lines = path.read_text().splitlines()
    v = [ln for ln in lines if ln.startswith("v ")]
    vn = [ln for ln in lines if ln.startswith("vn ")]
    f = [ln for ln in lines if ln.startswith("f ")]
    assert len(v) == 6 and len(vn) == 6
    assert len(f) <= 2
    assert f[0] == "f 1//1 4//4 5//5 2//2"
    np.testing.assert_array_equal(np.array([ln.split()[1:] for ln in v], dtype=float), mesh.vertices)


def test_obj_omits_masked_faces_but_keeps_vertices(tmp_path):
    ns, nt = 5, 64
    mesh = tessellate(helix_tube(1), (-2.0, 2.0), ns=ns, nt=nt)
    path = tmp_path / "m.obj"
    export_obj(mesh, path)
    text = path.read_text().splitlines()
    assert sum(ln.startswith("v ") for ln in text) == ns * nt
    faces = [ln for ln in text if ln.startswith("f ")]
    assert len(faces) == len(mesh.quads) - mesh.n_masked
    used = {int(tok.split("//")[0]) - 1 for ln in faces for tok in ln.split()[1:]}
    assert not any(k in used for k in np.flatnonzero(~mesh.regular))


def test_csv_round_trip_is_exact(tmp_path):
    mesh = tessellate(helix_tube(1), (-1.0, 1.0), ns=4, nt=8)
    path = tmp_path / "m.csv"
    export_csv(mesh, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == CSV_HEADER
    body = rows[1:]
    assert len(body) == 4 * 8

    def num(x):
        return float(x) if x else np.nan

    xyz = np.array([[num(c) for c in row[2:5]] for row in body])
    np.testing.assert_array_equal(xyz, mesh.vertices)
    for k, name in enumerate(("K", "H", "K_II")):
        col = np.array([num(row[5 + k]) for row in body])
        np.testing.assert_array_equal(col, getattr(mesh, name))
    regular = np.array([int(row[8]) for row in body], dtype=bool)
    np.testing.assert_array_equal(regular, mesh.regular)
    # t = pi is sampled: its curvatures are written as empty fields
    assert not regular.all()
    assert all(row[5] == "" for row, ok in zip(body, regular) if not ok)
    assert b"\r" not in path.read_bytes()


def test_unwritable_path_names_the_path(tmp_path):
    mesh = tessellate(torus(), (-1.0, 1.0), ns=2, nt=3)
    bad = tmp_path / "missing" / "m.obj"
    with pytest.raises(OSError, match="missing"):
        export_obj(mesh, bad)
    with pytest.raises(OSError, match="missing"):
        export_csv(mesh, bad)


def test_threads_do_not_change_the_mesh(monkeypatch):
    serial = tessellate(generic_canal(), (-2.0, 2.0), ns=7, nt=12)
    monkeypatch.setenv("CANALKIT_THREADS", "3")
    threaded = tessellate(generic_canal(), (-2.0, 2.0), ns=7, nt=12)
    np.testing.assert_array_equal(serial.vertices, threaded.vertices)
    np.testing.assert_array_equal(serial.normals, threaded.normals)
    np.testing.assert_array_equal(serial.cell_mask, threaded.cell_mask)
