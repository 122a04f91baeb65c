"""Quad tessellation of canal surfaces with OBJ and CSV export."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curvature import curvature_arrays
from .errors import AllSingular, InvalidParams
from .surface import CanalSurface, evaluate, local, partials, reg_threshold

TWO_PI = 2 * np.pi


@dataclass
class SurfaceMesh:
    """Vertices are stored row-major: index = i * nt + j for (s_i, t_j)."""

    s: np.ndarray
    t: np.ndarray
    vertices: np.ndarray
    normals: np.ndarray
    quads: np.ndarray
    regular: np.ndarray
    cell_mask: np.ndarray
    K: np.ndarray | None = None
    H: np.ndarray | None = None
    K_II: np.ndarray | None = None

    @property
    def shape(self):
        return len(self.s), len(self.t)

    @property
    def n_masked(self):
        return int(self.cell_mask.sum())


def _t_samples(t_range, nt):
    lo, hi = t_range
    if np.isclose(hi - lo, TWO_PI, rtol=0, atol=1e-12):
        return lo + TWO_PI * np.arange(nt) / nt, True
    return np.linspace(lo, hi, nt), False


def _vertex_data(surf, S, T):
    loc = local(surf, S)
    pts = evaluate(surf, S, T)
    Cs, Ct = partials(surf, S, T, loc)
    cross = np.cross(Cs, Ct)
    norm2 = np.einsum("...i,...i", cross, cross)
    regular = norm2 > reg_threshold(loc.tube.Q)
    # singular vertices fall back to the outward sphere direction
    sphere = (pts - loc.frame.position) / loc.jet.r[..., None]
    with np.errstate(invalid="ignore", divide="ignore"):
        nrm = np.where(regular[..., None], cross / np.sqrt(norm2)[..., None], sphere)
    return pts, nrm, regular


def tessellate(
    surf: CanalSurface,
    s_range=None,
    t_range=(0.0, TWO_PI),
    ns: int = 33,
    nt: int = 65,
    with_curvature: bool = True,
    weld: bool = False,
) -> SurfaceMesh:
    """Sample the surface on an ns x nt grid and build quads.

    A full 2pi t range is sampled half-open and the seam cells are only
    emitted when ``weld`` is set. Cells with a singular corner are masked.
    """
    if ns < 2 or nt < 3:
        raise InvalidParams("need ns >= 2 and nt >= 3")
    s_range = s_range if s_range is not None else surf.s_interval
    s = np.linspace(float(s_range[0]), float(s_range[1]), ns)
    t, periodic = _t_samples((float(t_range[0]), float(t_range[1])), nt)
    S, T = np.meshgrid(s, t, indexing="ij")

    n_threads = max(1, int(os.environ.get("CANALKIT_THREADS", "1") or 1))
    if n_threads > 1 and ns > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            rows = list(pool.map(lambda i: _vertex_data(surf, S[i], T[i]), range(ns)))
        pts, nrm, regular = (np.stack(x) for x in zip(*rows))
    else:
        pts, nrm, regular = _vertex_data(surf, S, T)

    idx = np.arange(ns * nt).reshape(ns, nt)
    jn = nt if (periodic and weld) else nt - 1
    i0, j0 = np.meshgrid(np.arange(ns - 1), np.arange(jn), indexing="ij")
    j1 = (j0 + 1) % nt
    quads = np.stack([idx[i0, j0], idx[i0 + 1, j0], idx[i0 + 1, j1], idx[i0, j1]], axis=-1)
    reg = regular.ravel()
    cell_mask = ~reg[quads].all(axis=-1)
    if cell_mask.all():
        raise AllSingular("every cell has a singular corner")

    mesh = SurfaceMesh(
        s=s,
        t=t,
        vertices=pts.reshape(-1, 3),
        normals=nrm.reshape(-1, 3),
        quads=quads.reshape(-1, 4),
        regular=reg,
        cell_mask=cell_mask.ravel(),
    )
    if with_curvature:
        a = curvature_arrays(surf, S, T)
        mesh.K, mesh.H, mesh.K_II = a["K"].ravel(), a["H"].ravel(), a["K_II"].ravel()
    return mesh


def _open(path):
    try:
        return open(path, "w", newline="", encoding="ascii")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def _g(x):
    return "%.17g" % x


def export_obj(mesh: SurfaceMesh, path) -> None:
    faces = mesh.quads[~mesh.cell_mask] + 1
    with _open(path) as fh:
        fh.write(f"# canalkit mesh {mesh.shape[0]}x{mesh.shape[1]}\n")
        for v in mesh.vertices:
            fh.write("v %s %s %s\n" % tuple(_g(x) for x in v))
        for n in mesh.normals:
            fh.write("vn %s %s %s\n" % tuple(_g(x) for x in n))
        for q in faces:
            fh.write("f " + " ".join(f"{i}//{i}" for i in q) + "\n")


CSV_HEADER = ["s", "t", "x", "y", "z", "K", "H", "K_II", "regular"]


def export_csv(mesh: SurfaceMesh, path) -> None:
    ns, nt = mesh.shape
    S = np.repeat(mesh.s, nt)
    T = np.tile(mesh.t, ns)
    nan = np.full(ns * nt, np.nan)
    K = mesh.K if mesh.K is not None else nan
    H = mesh.H if mesh.H is not None else nan
    KII = mesh.K_II if mesh.K_II is not None else nan

    def cell(x):
        return "" if np.isnan(x) else _g(x)

    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for k in range(ns * nt):
            x, y, z = mesh.vertices[k]
            w.writerow(
                [_g(S[k]), _g(T[k]), _g(x), _g(y), _g(z), cell(K[k]), cell(H[k]), cell(KII[k]), int(mesh.regular[k])]
            )
