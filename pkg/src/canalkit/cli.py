"""``canalkit`` command line: JSON scenes in, JSON reports out.

Exit codes: 0 success, 1 verification failed, 2 bad scene or arguments,
3 singular or degenerate input, 4 file IO.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .curvature import brioschi_oracle, curvature_arrays, curvature_triple
from .curve import CurveSpec, make_curve
from .errors import (
    AllSingular,
    CanalError,
    DegenerateQ,
    DegenerateSecondForm,
    EmptyGrid,
    NotASurface,
    RankDeficient,
    SingularPoint,
    VanishingCurvature,
)
from .mesh import export_csv, export_obj, tessellate
from .radius import RadiusSpec
from .surface import ORACLE_STEP, CanalSurface, forms, forms_oracle, orientation_factor
from .weingarten import JACOBI_STEP, JACOBI_TOL, Grid, classify, fit_linear

SCENE_VERSION = 1

DEFAULT_TOLERANCES = {
    "jacobi": JACOBI_TOL,
    "forms": 1e-7,
    "curvature": 1e-7,
    "second_gaussian": 1e-5,
}

EXIT_OK, EXIT_VERIFY, EXIT_SCENE, EXIT_SINGULAR, EXIT_IO = 0, 1, 2, 3, 4

# Errors that mean "the geometry is singular here", as opposed to a bad scene.
_SINGULAR = (SingularPoint, DegenerateSecondForm, AllSingular, EmptyGrid, RankDeficient, DegenerateQ, VanishingCurvature)


class SceneError(Exception):
    pass


@dataclass
class Scene:
    surface: CanalSurface
    s_range: tuple
    grid: tuple = (33, 65)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def sample_grid(self, margin=0.0):
        return Grid.uniform(self.s_range, self.grid[0], self.grid[1], margin=margin)


def load_scene(path) -> Scene:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read scene {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SceneError(f"{path}: invalid JSON ({exc})") from exc
    return scene_from_dict(data)


def scene_from_dict(data) -> Scene:
    if not isinstance(data, dict):
        raise SceneError("scene must be a JSON object")
    if data.get("version", SCENE_VERSION) != SCENE_VERSION:
        raise SceneError(f"unsupported scene version {data.get('version')!r}")
    try:
        curve_d = dict(data["curve"])
        radius_d = dict(data["radius"])
    except (KeyError, TypeError) as exc:
        raise SceneError("scene needs 'curve' and 'radius' objects") from exc

    sign = int(data.get("sign", radius_d.get("sign", 1)))
    s_range = data.get("s_range")
    try:
        if s_range is not None:
            s_range = (float(s_range[0]), float(s_range[1]))
            curve_d.setdefault("interval", list(s_range))
        curve = make_curve(CurveSpec.from_dict(curve_d))
        radius = RadiusSpec.from_dict(radius_d)
        surface = CanalSurface(curve, radius, sign, s_range)
    except NotASurface as exc:
        raise SceneError(f"not a surface: {exc}") from exc
    except (CanalError, KeyError, TypeError, ValueError) as exc:
        raise SceneError(f"invalid scene: {exc}") from exc

    grid = data.get("grid", (33, 65))
    if isinstance(grid, dict):
        grid = (grid.get("ns", 33), grid.get("nt", 65))
    try:
        grid = (int(grid[0]), int(grid[1]))
    except (TypeError, ValueError, IndexError) as exc:
        raise SceneError("grid must be [ns, nt]") from exc
    if grid[0] < 2 or grid[1] < 3:
        raise SceneError("grid needs ns >= 2 and nt >= 3")

    tol = dict(DEFAULT_TOLERANCES)
    for key, value in dict(data.get("tolerances", {})).items():
        if key not in tol:
            raise SceneError(f"unknown tolerance {key!r}")
        tol[key] = float(value)
    return Scene(surface, tuple(surface.s_interval), grid, tol)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x + 0.0 if math.isfinite(x) else None  # + 0.0 drops negative zeros
    return obj


def _emit(obj):
    json.dump(_jsonable(obj), sys.stdout, indent=2, allow_nan=False)
    sys.stdout.write("\n")


def cmd_curvature(scene: Scene, s: float, t: float):
    triple = curvature_triple(scene.surface, s, t)
    if not triple.regular:
        raise SingularPoint(f"EG - F^2 vanishes at (s, t) = ({s:g}, {t:g})")
    return triple.as_dict()


def cmd_forms(scene: Scene, s: float, t: float):
    fc = forms(scene.surface, s, t)
    out = fc.as_dict()
    out["orientation"] = float(np.sign(orientation_factor(scene.surface, s, t)))
    return out


def cmd_classify(scene: Scene):
    grid = scene.sample_grid(margin=4 * JACOBI_STEP)
    return classify(scene.surface, grid, scene.tolerances["jacobi"]).as_dict()


def cmd_fit(scene: Scene, mask: str):
    return fit_linear(scene.surface, mask, scene.sample_grid()).as_dict()


def _max_rel(a, b):
    if np.size(a) == 0:
        return 0.0
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def cmd_verify(scene: Scene):
    """Closed forms against the finite-difference and Brioschi oracles."""
    surf = scene.surface
    h = ORACLE_STEP
    grid = scene.sample_grid(margin=4 * h)
    S, T = grid.points()
    a = curvature_arrays(surf, S, T)
    reg = a["regular"]
    s, t = S[reg], T[reg]
    closed = forms(surf, s, t)
    oracle = forms_oracle(surf, s, t, h)
    # oracle normal is C_s x C_t; the closed forms use the outward sphere normal
    orient = np.sign(orientation_factor(surf, s, t))
    K_o = oracle.det2 / oracle.area2
    H_o = orient * (oracle.E * oracle.g - 2 * oracle.F * oracle.f + oracle.G * oracle.e) / (2 * oracle.area2)
    deltas = {
        "first_form": max(_max_rel(getattr(closed, k), getattr(oracle, k)) for k in "EFG"),
        "second_form": max(_max_rel(getattr(closed, k), orient * getattr(oracle, k)) for k in "efg"),
        "K": _max_rel(a["K"][reg], K_o),
        "H": _max_rel(a["H"][reg], H_o),
    }
    nd = reg & a["nondegenerate"]
    if nd.any():
        deltas["K_II"] = _max_rel(a["K_II"][nd], brioschi_oracle(surf, S[nd], T[nd], h))
    tol_key = {"first_form": "forms", "second_form": "forms", "K": "curvature", "H": "curvature", "K_II": "second_gaussian"}
    checks = {
        k: {"max_rel_delta": v, "tolerance": scene.tolerances[tol_key[k]], "ok": v <= scene.tolerances[tol_key[k]]}
        for k, v in deltas.items()
    }
    return {
        "ok": all(c["ok"] for c in checks.values()),
        "checks": checks,
        "n_points": int(reg.sum()),
        "n_masked": int((~reg).sum()),
        "n_second_form_points": int(nd.sum()),
        "oracle_step": h,
    }


def cmd_mesh(scene: Scene, out: str, fmt: str):
    mesh = tessellate(scene.surface, scene.s_range, ns=scene.grid[0], nt=scene.grid[1])
    (export_obj if fmt == "obj" else export_csv)(mesh, out)
    return {"path": out, "format": fmt, "vertices": len(mesh.vertices), "faces": int((~mesh.cell_mask).sum())}


def build_parser():
    p = argparse.ArgumentParser(prog="canalkit", description="Curvature and Weingarten analysis of canal surfaces.")
    p.add_argument("command", choices=["curvature", "forms", "classify", "fit", "verify", "mesh"])
    p.add_argument("--scene", required=True, help="scene JSON file")
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--mask", default="KHKII", choices=["K", "KH", "KKII", "HKII", "KHKII"])
    p.add_argument("--out", help="mesh output path")
    p.add_argument("--format", choices=["obj", "csv"], help="mesh format (default from --out suffix)")
    p.add_argument("--sign", type=int, choices=[-1, 1], help="override the scene's Q sign")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="override a scene tolerance")
    return p


def _apply_overrides(scene_data, args):
    if args.sign is not None:
        scene_data["sign"] = args.sign
    if args.tol:
        tol = dict(scene_data.get("tolerances", {}))
        for item in args.tol:
            name, _, value = item.partition("=")
            try:
                tol[name] = float(value)
            except ValueError as exc:
                raise SceneError(f"bad --tol {item!r}") from exc
        scene_data["tolerances"] = tol
    return scene_data


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_SCENE

    try:
        try:
            with open(args.scene, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneError(f"{args.scene}: invalid JSON ({exc})") from exc
        scene = scene_from_dict(_apply_overrides(data, args))

        if args.command == "curvature":
            result = cmd_curvature(scene, args.s, args.t)
        elif args.command == "forms":
            result = cmd_forms(scene, args.s, args.t)
        elif args.command == "classify":
            result = cmd_classify(scene)
        elif args.command == "fit":
            result = cmd_fit(scene, args.mask)
        elif args.command == "verify":
            result = cmd_verify(scene)
        else:
            if not args.out:
                raise SceneError("mesh needs --out")
            fmt = args.format or ("csv" if args.out.lower().endswith(".csv") else "obj")
            result = cmd_mesh(scene, args.out, fmt)
    except SceneError as exc:
        print(f"canalkit: {exc}", file=sys.stderr)
        return EXIT_SCENE
    except _SINGULAR as exc:
        print(f"canalkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except CanalError as exc:
        print(f"canalkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SCENE
    except OSError as exc:
        print(f"canalkit: {exc}", file=sys.stderr)
        return EXIT_IO

    _emit(result)
    if args.command == "verify" and not result["ok"]:
        print("canalkit: oracle deltas exceed tolerance", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
