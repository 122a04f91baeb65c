"""Unit-speed center curves and their Frenet apparatus.

Every curve exposes ``derivatives(s)``: an array of shape ``(5, *s.shape, 3)``
holding the position and the first four arclength derivatives. All
evaluation is vectorised over ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .errors import InvalidParams, NotUnitSpeed, VanishingCurvature

KAPPA_MIN = 1e-12
DEFAULT_INTERVAL = (-10.0, 10.0)


@dataclass(frozen=True)
class CurveSpec:
    """Declarative description of a center curve.

    ``family`` is one of ``line``, ``circle``, ``helix`` or ``analytic``.
    For ``analytic`` the callable ``jet(s)`` must return a ``(5, 3)`` array
    with alpha(s) and its first four derivatives at scalar ``s``.
    """

    family: str
    params: Mapping[str, Any] = field(default_factory=dict)
    jet: Callable[[float], Any] | None = None
    interval: tuple[float, float] | None = None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CurveSpec":
        data = dict(data)
        family = str(data.pop("family")).lower()
        interval = data.pop("interval", None)
        if interval is not None:
            interval = (float(interval[0]), float(interval[1]))
        return cls(family, data, interval=interval)


class FramedCurve:
    """Base class: a unit-speed curve with analytic derivative jets."""

    family = "abstract"
    fixed_frame: np.ndarray | None = None

    def __init__(self, interval: tuple[float, float]):
        self.interval = interval

    def derivatives(self, s) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


class Line(FramedCurve):
    family = "line"

    def __init__(self, point, direction, interval=DEFAULT_INTERVAL):
        super().__init__(interval)
        self.point = np.asarray(point, dtype=float)
        d = np.asarray(direction, dtype=float)
        self.direction = d / np.linalg.norm(d)
        self.fixed_frame = _line_frame(self.direction)

    def derivatives(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros((5,) + s.shape + (3,))
        out[0] = self.point + s[..., None] * self.direction
        out[1] = self.direction
        return out

    def to_dict(self):
        return {"family": "line", "point": self.point.tolist(), "direction": self.direction.tolist()}


class Circle(FramedCurve):
    """Circle of radius ``rho`` about the origin in the z=0 plane."""

    family = "circle"

    def __init__(self, rho, interval=DEFAULT_INTERVAL):
        super().__init__(interval)
        self.rho = rho

    def derivatives(self, s):
        s = np.asarray(s, dtype=float)
        w = 1.0 / self.rho
        out = np.zeros((5,) + s.shape + (3,))
        for k in range(5):
            phase = w * s + k * math.pi / 2
            out[k, ..., 0] = self.rho * w**k * np.cos(phase)
            out[k, ..., 1] = self.rho * w**k * np.sin(phase)
        return out

    def to_dict(self):
        return {"family": "circle", "rho": self.rho}


class Helix(FramedCurve):
    """Circular helix (a cos, a sin, b ·) reparametrised by arclength."""

    family = "helix"

    def __init__(self, a, b, interval=DEFAULT_INTERVAL):
        super().__init__(interval)
        self.a, self.b = a, b
        self.c = math.hypot(a, b)

    def derivatives(self, s):
        s = np.asarray(s, dtype=float)
        w = 1.0 / self.c
        out = np.zeros((5,) + s.shape + (3,))
        for k in range(5):
            phase = w * s + k * math.pi / 2
            out[k, ..., 0] = self.a * w**k * np.cos(phase)
            out[k, ..., 1] = self.a * w**k * np.sin(phase)
        out[0, ..., 2] = self.b * w * s
        out[1, ..., 2] = self.b * w
        return out

    def to_dict(self):
        return {"family": "helix", "a": self.a, "b": self.b}


class AnalyticJetCurve(FramedCurve):
    family = "analytic"

    def __init__(self, jet, interval):
        super().__init__(interval)
        self.jet = jet

    def derivatives(self, s):
        s = np.asarray(s, dtype=float)
        flat = [np.asarray(self.jet(float(x)), dtype=float) for x in s.ravel()]
        if not flat:
            return np.zeros((5,) + s.shape + (3,))
        out = np.stack(flat, axis=1)
        if out.shape[0] != 5 or out.shape[-1] != 3:
            raise InvalidParams("analytic jet must return a (5, 3) array")
        return out.reshape((5,) + s.shape + (3,))

    def to_dict(self):
        return {"family": "analytic"}


def _line_frame(direction):
    """Fixed (T, N, B) for a straight line.

    N is the first standard basis vector not parallel to T, orthogonalised.
    """
    basis = np.eye(3)
    for e in basis:
        n = e - np.dot(e, direction) * direction
        if np.linalg.norm(n) > 1e-6:
            n = n / np.linalg.norm(n)
            return np.stack([direction, n, np.cross(direction, n)])
    raise InvalidParams("degenerate line direction")  # pragma: no cover


def _finite(*values):
    return all(math.isfinite(float(v)) for v in values)


def make_curve(spec: CurveSpec) -> FramedCurve:
    p = dict(spec.params)
    interval = spec.interval or DEFAULT_INTERVAL
    if not (_finite(*interval) and interval[0] < interval[1]):
        raise InvalidParams(f"bad interval {interval}")
    fam = spec.family.lower()
    if fam == "line":
        point = p.get("point", (0.0, 0.0, 0.0))
        direction = p.get("direction", (1.0, 0.0, 0.0))
        if not _finite(*point, *direction) or np.linalg.norm(direction) == 0:
            raise InvalidParams("line needs a finite point and nonzero direction")
        return Line(point, direction, interval)
    if fam == "circle":
        rho = float(p.get("rho", p.get("radius", 1.0)))
        if not _finite(rho) or rho <= 0:
            raise InvalidParams("circle radius must be positive")
        return Circle(rho, interval)
    if fam == "helix":
        a, b = float(p["a"]), float(p["b"])
        if not _finite(a, b) or a <= 0:
            raise InvalidParams("helix needs finite a > 0 and finite b")
        return Helix(a, b, interval)
    if fam in ("analytic", "analyticjet", "analytic_jet"):
        if spec.jet is None or spec.interval is None:
            raise InvalidParams("analytic curves need a jet callback and an interval")
        curve = AnalyticJetCurve(spec.jet, interval)
        if not validate_unit_speed(curve, 65, 1e-9):
            raise NotUnitSpeed("analytic curve is not parametrised by arclength")
        return curve
    raise InvalidParams(f"unknown curve family {spec.family!r}")


@dataclass(frozen=True)
class FrameJet:
    s: Any
    position: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: Any
    kappa_prime: Any
    tau: Any


def frenet_apparatus(curve: FramedCurve, s) -> FrameJet:
    """Frenet frame, curvature, its derivative and torsion at ``s``.

    Straight lines get the fixed frame of ``_line_frame`` with zero
    curvature and torsion.
    """
    s = np.asarray(s, dtype=float)
    d = curve.derivatives(s)
    if curve.fixed_frame is not None:
        shape = s.shape + (3,)
        zero = np.zeros(s.shape)
        T, N, B = (np.broadcast_to(v, shape).copy() for v in curve.fixed_frame)
        return FrameJet(s, d[0], T, N, B, zero, zero.copy(), zero.copy())

    d1, d2, d3 = d[1], d[2], d[3]
    kappa = np.linalg.norm(d2, axis=-1)
    if np.any(kappa < KAPPA_MIN):
        raise VanishingCurvature(f"curvature below {KAPPA_MIN} on a {curve.family} curve")
    T = d1 / np.linalg.norm(d1, axis=-1)[..., None]
    N = d2 / kappa[..., None]
    B = np.cross(T, N)
    tau = np.einsum("...i,...i", np.cross(d1, d2), d3) / kappa**2
    kappa_prime = np.einsum("...i,...i", d2, d3) / kappa
    return FrameJet(s, d[0], T, N, B, kappa, kappa_prime, tau)


def validate_unit_speed(curve: FramedCurve, n_samples: int = 100, tol: float = 1e-10) -> bool:
    if n_samples < 2:
        raise InvalidParams("n_samples must be at least 2")
    s = np.linspace(curve.interval[0], curve.interval[1], n_samples)
    speed = np.linalg.norm(curve.derivatives(s)[1], axis=-1)
    return bool(np.all(np.abs(speed - 1.0) <= tol))
