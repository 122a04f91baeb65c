"""Weingarten (Jacobi) tests and linear Weingarten fits for canal surfaces."""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .curvature import _gaussian, _mean, _second_gaussian, ii_threshold
from .errors import DegenerateSecondForm, EmptyGrid, InvalidParams, RankDeficient, SingularPoint
from .surface import CanalSurface, _area2_expanded, _second, _st, local, reg_threshold

JACOBI_STEP = 5e-3
JACOBI_TOL = 1e-6
RANK_TOL = 1e-12


class Pair(str, enum.Enum):
    """Curvature pair (X, Y) for the Jacobi function X_t Y_s - X_s Y_t."""

    KH = "KH"
    HKII = "HKII"
    KKII = "KKII"

    @property
    def names(self):
        return {"KH": ("H", "K"), "HKII": ("H", "K_II"), "KKII": ("K", "K_II")}[self.value]


@dataclass(frozen=True)
class Grid:
    """Tensor grid of parameter points; ``s`` and ``t`` broadcast to (ns, nt)."""

    s: np.ndarray
    t: np.ndarray

    @classmethod
    def uniform(cls, s_range, ns=33, nt=65, t_exclude: float = 0.0, margin: float = 0.0):
        """``ns`` points on the closed s range (shrunk by ``margin``), ``nt``
        on [0, 2pi), dropping t within ``t_exclude`` of 0 (mod 2pi)."""
        lo, hi = s_range
        s = np.linspace(lo + margin, hi - margin, ns)
        t = 2 * np.pi * np.arange(nt) / nt
        if t_exclude > 0:
            wrapped = np.minimum(t, 2 * np.pi - t)
            t = t[wrapped >= t_exclude]
        return cls(s[:, None], t[None, :])

    @property
    def shape(self):
        return np.broadcast_shapes(self.s.shape, self.t.shape)

    def points(self):
        return np.broadcast_arrays(self.s, self.t)


def default_grid(surf: CanalSurface, ns=33, nt=65, t_exclude=0.0):
    # keep finite-difference stencils inside the declared interval
    return Grid.uniform(surf.s_interval, ns, nt, t_exclude, margin=4 * JACOBI_STEP)


def _threads():
    try:
        return max(1, int(os.environ.get("CANALKIT_THREADS", "1")))
    except ValueError:
        return 1


def _rows(fun, S, T):
    """Apply ``fun`` row by row over s, in parallel when CANALKIT_THREADS > 1."""
    n = _threads()
    if n == 1 or S.shape[0] < 2:
        return fun(S, T)
    with ThreadPoolExecutor(max_workers=n) as pool:
        parts = list(pool.map(lambda i: fun(S[i : i + 1], T[i : i + 1]), range(S.shape[0])))
    return tuple(np.concatenate(p, axis=0) for p in zip(*parts)) if isinstance(parts[0], tuple) else np.concatenate(parts, axis=0)


def _curvature_values(surf, S, T, names):
    """Requested curvatures with a validity mask (regular, II-nondegenerate if needed)."""
    loc = local(surf, S)
    valid = _area2_expanded(loc, T) > reg_threshold(loc.tube.Q)
    out = {}
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if "K" in names:
            out["K"] = _gaussian(loc, T)
        if "H" in names:
            out["H"] = _mean(loc, T)
        if "K_II" in names:
            kii, det2, eps = _second_gaussian(loc, T)
            out["K_II"] = kii
            valid &= np.abs(det2) > eps
    return out, valid


_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def _jacobi_parts(surf, pair: Pair, s, t, h):
    s, t = _st(s, t)
    X, Y = pair.names
    offs = np.arange(-2, 3) * h
    Ss = s[..., None] + offs
    Tt = t[..., None] + offs
    vs, ok_s = _curvature_values(surf, Ss, np.broadcast_to(t[..., None], Ss.shape), (X, Y))
    vt, ok_t = _curvature_values(surf, np.broadcast_to(s[..., None], Tt.shape), Tt, (X, Y))
    valid = ok_s.all(axis=-1) & ok_t.all(axis=-1)

    def d(v):
        return v @ _D1 / h

    with np.errstate(invalid="ignore", over="ignore"):
        Xs, Ys = d(vs[X]), d(vs[Y])
        Xt, Yt = d(vt[X]), d(vt[Y])
        phi = Xt * Ys - Xs * Yt
        # |phi| / (|grad X| |grad Y|) is the sine of the angle between the
        # gradients; the cross-term scale below is kept for reporting.
        scale = np.maximum(np.hypot(Xs, Xt) * np.hypot(Ys, Yt), 1.0)
        cross_scale = np.maximum(np.maximum(np.abs(Xs * Yt), np.abs(Xt * Ys)), 1.0)
    return phi, scale, cross_scale, valid


def jacobi(surf: CanalSurface, pair, s, t, h: float = JACOBI_STEP):
    """Phi(X, Y) = X_t Y_s - X_s Y_t from central differences of the closed forms."""
    pair = Pair(pair)
    phi, _, _, valid = _jacobi_parts(surf, pair, s, t, h)
    if not np.all(valid):
        if "K_II" in pair.names:
            raise DegenerateSecondForm("stencil touches a singular or II-degenerate point")
        raise SingularPoint("stencil touches a singular point")
    return phi


def leading_obstruction(surf: CanalSurface, pair, s):
    """Top cos(t)-degree factor of the Jacobi numerator, without its sin(t)."""
    pair = Pair(pair)
    loc = local(surf, np.asarray(s, dtype=float))
    Q, R = loc.tube.Q, loc.tube.R
    r, r1, k = loc.jet.r, loc.jet.r1, loc.frame.kappa
    if pair is Pair.KH:
        return 2 * Q**2 * k**6 * r**2 * r1 * (2 * Q**2 * R**2 + R**4 + Q**4)
    if pair is Pair.HKII:
        # kept as Q^2 + R^4 although the (K, K_II) factor has Q^4 + R^4 here
        return 128 * Q**2 * k**10 * r**5 * r1 * (4 * Q**2 * R**2 * (Q**2 + R**4) + 6 * Q**4 * R**4 + R**8 + Q**8)
    return 64 * Q**2 * k**10 * r**6 * r1 * (4 * Q**2 * R**2 * (Q**4 + R**4) + R**8 + 6 * Q**4 * R**4 + Q**8)


@dataclass
class PairVerdict:
    max_phi: float
    max_scaled_phi: float
    max_cross_scaled_phi: float
    satisfied: bool
    n_points: int
    n_masked: int

    def as_dict(self):
        return {
            "max_phi": self.max_phi,
            "max_scaled_phi": self.max_scaled_phi,
            "max_cross_scaled_phi": self.max_cross_scaled_phi,
            "verdict": "satisfied" if self.satisfied else "violated",
            "n_points": self.n_points,
            "n_masked": self.n_masked,
        }


@dataclass
class ClassificationReport:
    is_tube: bool
    is_revolution: bool
    is_cylinder: bool
    weingarten: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def as_dict(self):
        return {
            "is_tube": self.is_tube,
            "is_revolution": self.is_revolution,
            "is_cylinder": self.is_cylinder,
            "weingarten": {p.value: v.as_dict() for p, v in self.weingarten.items()},
            "notes": list(self.notes),
        }


def classify(surf: CanalSurface, grid: Grid | None = None, tol: float = JACOBI_TOL, h: float = JACOBI_STEP):
    grid = grid or default_grid(surf)
    S, T = grid.points()
    loc = local(surf, grid.s[:, 0])
    is_tube = bool(np.max(np.abs(loc.jet.r1)) <= tol)
    is_rev = bool(np.max(loc.frame.kappa) <= tol)
    report = ClassificationReport(is_tube, is_rev, is_tube and is_rev)
    for pair in Pair:
        phi, scale, cross, valid = _rows(lambda a, b, p=pair: _jacobi_parts(surf, p, a, b, h), S, T)
        n = int(valid.sum())
        masked = valid.size - n
        if n == 0:
            report.notes.append(f"{pair.value}: every grid point masked")
            report.weingarten[pair] = PairVerdict(float("nan"), float("nan"), float("nan"), False, 0, masked)
            continue
        scaled = float(np.max(np.abs(phi[valid]) / scale[valid]))
        report.weingarten[pair] = PairVerdict(
            float(np.max(np.abs(phi[valid]))),
            scaled,
            float(np.max(np.abs(phi[valid]) / cross[valid])),
            scaled <= tol,
            n,
            masked,
        )
        if masked:
            report.notes.append(f"{pair.value}: {masked} singular or II-degenerate grid points masked")
    return report


_MASKS = {
    "K": (True, False, False),
    "KH": (True, True, False),
    "KKII": (True, False, True),
    "HKII": (False, True, True),
    "KHKII": (True, True, True),
}


def parse_mask(mask):
    """Accept 'KH', 'KKII', 'HKII', 'KHKII', 'K' or a set like {'K', 'H', 'd'}."""
    if isinstance(mask, str):
        key = mask.upper().replace("_", "").replace(",", "")
        if key not in _MASKS:
            raise InvalidParams(f"unknown mask {mask!r}")
        return _MASKS[key]
    names = {str(m) for m in mask}
    unknown = names - {"K", "H", "K_II", "KII", "d"}
    if unknown:
        raise InvalidParams(f"unknown mask entries {sorted(unknown)}")
    return ("K" in names, "H" in names, bool(names & {"K_II", "KII"}))


def _sample_matrix(surf, grid, use_kii):
    names = ("K", "H", "K_II") if use_kii else ("K", "H")
    S, T = grid.points()
    vals, valid = _curvature_values(surf, S, T, names)
    if not np.any(valid):
        raise EmptyGrid("every grid point is singular or II-degenerate")
    cols = [vals["K"][valid], vals["H"][valid]]
    cols.append(vals["K_II"][valid] if use_kii else np.zeros(int(valid.sum())))
    return np.column_stack(cols + [-np.ones(int(valid.sum()))])


def linear_residual(surf: CanalSurface, coeffs, grid: Grid | None = None) -> float:
    """max |aK + bH + cK_II - d| over the valid grid points."""
    a, b, c, d = (float(x) for x in coeffs)
    if not all(np.isfinite([a, b, c, d])):
        raise InvalidParams("coefficients must be finite")
    grid = grid or default_grid(surf)
    A = _sample_matrix(surf, grid, use_kii=c != 0)
    return float(np.max(np.abs(A @ np.array([a, b, c, d]))))


@dataclass
class LinearFit:
    coeffs: np.ndarray
    residual: float
    pair_mask: tuple
    singular_values: np.ndarray
    n_points: int

    def as_dict(self):
        return {
            "coeffs": {"a": self.coeffs[0], "b": self.coeffs[1], "c": self.coeffs[2], "d": self.coeffs[3]},
            "residual": self.residual,
            "pair_mask": {"K": self.pair_mask[0], "H": self.pair_mask[1], "K_II": self.pair_mask[2], "d": True},
            "n_points": self.n_points,
            "singular_values": self.singular_values.tolist(),
        }


def _sign_normalise(v):
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def fit_linear(surf: CanalSurface, pair_mask="KHKII", grid: Grid | None = None) -> LinearFit:
    """Best homogeneous relation aK + bH + cK_II = d on the grid.

    Columns are equilibrated before the SVD; the right singular vector of
    the smallest singular value is mapped back and normalised to unit
    length with its first nonzero entry positive.
    """
    mask = parse_mask(pair_mask)
    grid = grid or default_grid(surf)
    A = _sample_matrix(surf, grid, use_kii=mask[2])
    keep = [i for i, m in enumerate(mask) if m] + [3]
    if A.shape[0] < 8:
        raise EmptyGrid(f"need at least 8 valid grid points, have {A.shape[0]}")
    sub = A[:, keep]
    norms = np.linalg.norm(sub, axis=0)
    norms[norms == 0] = 1.0
    _, sv, vt = np.linalg.svd(sub / norms, full_matrices=False)
    if len(sv) >= 2 and sv[-2] - sv[-1] <= RANK_TOL * sv[0]:
        raise RankDeficient(f"two smallest singular values coincide: {sv[-2]:.3e}, {sv[-1]:.3e}")
    y = vt[-1] / norms
    coeffs = np.zeros(4)
    coeffs[keep] = y
    coeffs = _sign_normalise(coeffs / np.linalg.norm(coeffs)) + 0.0  # no negative zeros
    residual = float(np.max(np.abs(A @ coeffs)))
    return LinearFit(coeffs, residual, mask, sv, A.shape[0])
