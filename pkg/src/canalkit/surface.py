"""Canal surface evaluation and fundamental forms.

The surface is C(s, t) = alpha(s) - R T - Q cos(t) N + Q sin(t) B. The
closed-form coefficients use the outward sphere normal (C - alpha) / r;
:func:`normal` uses C_s x C_t. The two agree wherever
:func:`orientation_factor` is positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .curve import FrameJet, FramedCurve, frenet_apparatus
from .errors import InvalidParams, NotASurface, SingularPoint
from .radius import RadiusJet, RadiusSpec, Status, TubeFunctions, radius_jet, regularity_check, tube_functions

REG_EPS = 1e-10
# Roundoff dominates the oracle error below about 1e-2; beyond 3e-2 truncation
# starts to show. A power of two keeps s +- h exact.
ORACLE_STEP = 2.0**-6


@dataclass(frozen=True)
class CanalSurface:
    curve: FramedCurve
    radius: RadiusSpec
    sign: int = 1
    s_interval: tuple[float, float] | None = None

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InvalidParams("sign must be +1 or -1")
        if self.s_interval is None:
            object.__setattr__(self, "s_interval", tuple(self.curve.interval))
        verdict = regularity_check(self.curve, self.radius, self.s_interval)
        if verdict.status is Status.NOT_A_SURFACE:
            raise NotASurface(verdict.detail)
        object.__setattr__(self, "verdict", verdict)


@dataclass(frozen=True)
class Local:
    """Everything the closed forms need at a parameter s."""

    frame: FrameJet
    jet: RadiusJet
    tube: TubeFunctions


def local(surf: CanalSurface, s) -> Local:
    s = np.asarray(s, dtype=float)
    jet = radius_jet(surf.radius, s)
    return Local(frenet_apparatus(surf.curve, s), jet, tube_functions(jet, surf.sign))


def _st(s, t):
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    return s, t


def _vec(coef_T, coef_N, coef_B, frame):
    return coef_T[..., None] * frame.T + coef_N[..., None] * frame.N + coef_B[..., None] * frame.B


def evaluate(surf: CanalSurface, s, t):
    s, t = _st(s, t)
    loc = local(surf, s)
    R, Q = loc.tube.R, loc.tube.Q
    return loc.frame.position + _vec(-R, -Q * np.cos(t), Q * np.sin(t), loc.frame)


def partials(surf: CanalSurface, s, t, loc: Local | None = None):
    """Analytic C_s and C_t from the Frenet equations."""
    s, t = _st(s, t)
    loc = loc or local(surf, s)
    f, tb = loc.frame, loc.tube
    c, sn = np.cos(t), np.sin(t)
    k, tau = f.kappa, f.tau
    Cs = _vec(
        1 - tb.R1 + tb.Q * k * c,
        -tb.R * k - tb.Q1 * c - tb.Q * tau * sn,
        tb.Q1 * sn - tb.Q * tau * c,
        f,
    )
    Ct = _vec(np.zeros_like(c), tb.Q * sn, tb.Q * c, f)
    return Cs, Ct


def reg_threshold(Q):
    return REG_EPS * np.maximum(1.0, Q * Q)


def orientation_factor(surf: CanalSurface, s, t):
    """(C_s x C_t) . (C - alpha)/r, whose square is EG - F^2.

    Equals Q (Q - Q R' + Q' R + kappa r^2 cos t) / r.
    """
    s, t = _st(s, t)
    loc = local(surf, s)
    tb = loc.tube
    r = loc.jet.r
    return tb.Q * (tb.Q - tb.Q * tb.R1 + tb.Q1 * tb.R + loc.frame.kappa * r * r * np.cos(t)) / r


def normal(surf: CanalSurface, s, t):
    """Unit normal (C_s x C_t)/|C_s x C_t|; raises SingularPoint where it vanishes."""
    s, t = _st(s, t)
    loc = local(surf, s)
    Cs, Ct = partials(surf, s, t, loc)
    cross = np.cross(Cs, Ct)
    norm2 = np.einsum("...i,...i", cross, cross)
    if np.any(norm2 <= reg_threshold(loc.tube.Q)):
        raise SingularPoint("C_s x C_t vanishes (EG - F^2 below threshold)")
    return cross / np.sqrt(norm2)[..., None]


def _first(loc: Local, t):
    f, tb = loc.frame, loc.tube
    Q, Q1, R, R1 = tb.Q, tb.Q1, tb.R, tb.R1
    k, tau = f.kappa, f.tau
    c, sn = np.cos(t), np.sin(t)
    E = (
        Q**2 * k**2 * c**2
        + (2 * Q - 2 * Q * R1 + 2 * Q1 * R) * k * c
        + 2 * Q * R * k * tau * sn
        + Q**2 * tau**2
        + Q1**2
        + R**2 * k**2
        + 1
        - 2 * R1
        + R1**2
    )
    F = -Q * (R * k * sn + Q * tau)
    G = Q**2 * np.ones_like(c)
    return E, F, G


def _second(loc: Local, t):
    f, tb = loc.frame, loc.tube
    Q, Q1, Q2, R, R1, R2 = tb.Q, tb.Q1, tb.Q2, tb.R, tb.R1, tb.R2
    k, tau, r = f.kappa, f.tau, loc.jet.r
    c, sn = np.cos(t), np.sin(t)
    e = (
        -(
            Q**2 * k**2 * c**2
            + (2 * R * Q1 - 2 * Q * R1 + Q) * k * c
            - Q * Q2
            + R**2 * k**2
            - R * R2
            + Q**2 * tau**2
            + 2 * R * Q * k * tau * sn
        )
        / r
    )
    fc = Q * (R * k * sn + Q * tau) / r
    g = -(Q**2) / r * np.ones_like(c)
    return e, fc, g


def _area2_expanded(loc: Local, t):
    tb, k = loc.tube, loc.frame.kappa
    Q, Q1, R, R1 = tb.Q, tb.Q1, tb.R, tb.R1
    c = np.cos(t)
    return Q**2 * (
        k**2 * (R**2 + Q**2) * c**2 + 2 * k * (Q1 * R - Q * R1 + Q) * c + 1 - 2 * R1 + R1**2 + Q1**2
    )


def first_form(surf: CanalSurface, s, t):
    s, t = _st(s, t)
    return _first(local(surf, s), t)


def second_form(surf: CanalSurface, s, t):
    s, t = _st(s, t)
    return _second(local(surf, s), t)


def area2_expanded(surf: CanalSurface, s, t):
    """EG - F^2 from its expanded closed form (not from E, F, G)."""
    s, t = _st(s, t)
    return _area2_expanded(local(surf, s), t)


@dataclass(frozen=True)
class FormCoefficients:
    E: Any
    F: Any
    G: Any
    e: Any
    f: Any
    g: Any

    @property
    def area2(self):
        return self.E * self.G - self.F**2

    @property
    def det2(self):
        return self.e * self.g - self.f**2

    def as_dict(self):
        return {
            k: float(getattr(self, k)) for k in ("E", "F", "G", "e", "f", "g", "area2", "det2")
        }


def forms(surf: CanalSurface, s, t) -> FormCoefficients:
    s, t = _st(s, t)
    loc = local(surf, s)
    return FormCoefficients(*_first(loc, t), *_second(loc, t))


# Five-point central stencils, fourth order.
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_OFFSETS = np.arange(-2, 3)


def _richardson(fine, coarse, order=4):
    return (2**order * fine - coarse) / (2**order - 1)


def _stencil_partials(fun, s, t, h):
    """Value and first/second partials of ``fun(s, t)``.

    ``fun`` may return trailing value axes (e.g. points in R^3). Each
    derivative uses the fourth-order stencil at steps h and h/2, combined by
    Richardson extrapolation.
    """
    s, t = _st(s, t)
    ax = s.ndim  # axis of the s offsets once the grid is built
    levels = []
    for step in (h, h / 2):
        ds = _OFFSETS * step
        S, T = np.broadcast_arrays(s[..., None, None] + ds[:, None], t[..., None, None] + ds[None, :])
        vals = fun(S, T)  # s.shape + (5 s-offsets, 5 t-offsets) + value shape
        along_s = np.take(vals, 2, axis=ax + 1)
        along_t = np.take(vals, 2, axis=ax)

        def contract(arr, w):
            return np.tensordot(arr, w, axes=([ax], [0]))

        levels.append(
            {
                "f": np.take(along_s, 2, axis=ax),
                "s": contract(along_s, _D1) / step,
                "t": contract(along_t, _D1) / step,
                "ss": contract(along_s, _D2) / step**2,
                "tt": contract(along_t, _D2) / step**2,
                "st": contract(np.tensordot(vals, _D1, axes=([ax + 1], [0])), _D1) / step**2,
            }
        )
    coarse, fine = levels
    out = {"f": fine["f"]}
    for key in ("s", "t", "ss", "tt", "st"):
        out[key] = _richardson(fine[key], coarse[key])
    return out


def forms_oracle(surf: CanalSurface, s, t, h: float = ORACLE_STEP) -> FormCoefficients:
    """E, F, G, e, f, g from finite differences of :func:`evaluate` alone.

    The normal is C_s x C_t normalised, all partials numerical.
    """
    s, t = _st(s, t)
    lo, hi = surf.s_interval
    if np.any(s - 2 * h < lo) or np.any(s + 2 * h > hi):
        raise InvalidParams("oracle stencil leaves the s interval")
    d = _stencil_partials(lambda S, T: evaluate(surf, S, T), s, t, h)
    Cs, Ct = d["s"], d["t"]
    cross = np.cross(Cs, Ct)
    norm2 = np.einsum("...i,...i", cross, cross)
    Q = local(surf, s).tube.Q
    if np.any(norm2 <= reg_threshold(Q)):
        raise SingularPoint("C_s x C_t vanishes at the oracle point")
    n = cross / np.sqrt(norm2)[..., None]

    def dot(a, b):
        return np.einsum("...i,...i", a, b)

    return FormCoefficients(dot(Cs, Cs), dot(Cs, Ct), dot(Ct, Ct), dot(d["ss"], n), dot(d["st"], n), dot(d["tt"], n))
