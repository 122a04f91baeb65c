"""Radius functions, the derived tube functions R, Q, and regularity checks."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .curve import KAPPA_MIN, FramedCurve, frenet_apparatus
from .errors import DegenerateQ, InvalidParams, NonPositiveRadius, SlopeExceedsOne

SLOPE_TOL = 1e-12
FAMILY_FIT_TOL = 1e-9
DEFAULT_SAMPLES = 257


@dataclass(frozen=True)
class RadiusSpec:
    """Radius family and parameters.

    Families and parameters:

    - ``constant``: ``value``
    - ``affine``: ``c1, c2`` with r = c1 s + c2
    - ``sqrt_quadratic``: ``c1, c2`` with r = sqrt(s^2 - 2 c1 s + 2 c2)
    - ``sinusoid``: ``mean, amplitude, frequency=1, phase=0`` with
      r = mean + amplitude sin(frequency s + phase)
    - ``analytic``: callable ``jet(s) -> (r, r', r'', r''', r'''')``
    """

    family: str
    params: Mapping[str, float] = field(default_factory=dict)
    jet: Callable[[float], Any] | None = None

    @classmethod
    def constant(cls, value):
        return cls("constant", {"value": float(value)})

    @classmethod
    def affine(cls, c1, c2):
        return cls("affine", {"c1": float(c1), "c2": float(c2)})

    @classmethod
    def sqrt_quadratic(cls, c1, c2):
        return cls("sqrt_quadratic", {"c1": float(c1), "c2": float(c2)})

    @classmethod
    def sinusoid(cls, mean, amplitude, frequency=1.0, phase=0.0):
        return cls(
            "sinusoid",
            {"mean": float(mean), "amplitude": float(amplitude), "frequency": float(frequency), "phase": float(phase)},
        )

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RadiusSpec":
        data = dict(data)
        data.pop("sign", None)
        family = str(data.pop("family")).lower()
        builders = {
            "constant": cls.constant,
            "affine": cls.affine,
            "sqrt_quadratic": cls.sqrt_quadratic,
            "sinusoid": cls.sinusoid,
        }
        if family not in builders:
            raise InvalidParams(f"unknown radius family {family!r}")
        try:
            spec = builders[family](**data)
        except (TypeError, ValueError) as exc:
            raise InvalidParams(f"bad parameters for radius family {family!r}: {exc}") from exc
        if not all(np.isfinite(v) for v in spec.params.values()):
            raise InvalidParams("radius parameters must be finite")
        return spec

    def to_dict(self):
        return {"family": self.family, **self.params}


@dataclass(frozen=True)
class RadiusJet:
    s: Any
    r: Any
    r1: Any
    r2: Any
    r3: Any
    r4: Any


@dataclass(frozen=True)
class TubeFunctions:
    R: Any
    R1: Any
    R2: Any
    R3: Any
    Q: Any
    Q1: Any
    Q2: Any
    Q3: Any
    sign: int


def _raw_jet(spec: RadiusSpec, s: np.ndarray):
    p = spec.params
    fam = spec.family
    zero = np.zeros_like(s)
    if fam == "constant":
        return np.full_like(s, p["value"]), zero, zero, zero, zero
    if fam == "affine":
        return p["c1"] * s + p["c2"], np.full_like(s, p["c1"]), zero, zero, zero
    if fam == "sqrt_quadratic":
        c1, c2 = p["c1"], p["c2"]
        u = s * s - 2 * c1 * s + 2 * c2
        if np.any(u <= 0):
            raise NonPositiveRadius("s^2 - 2 c1 s + 2 c2 must be positive")
        r = np.sqrt(u)
        disc = 2 * c2 - c1 * c1
        r1 = (s - c1) / r
        r2 = disc / r**3
        r3 = -3 * disc * r1 / r**4
        r4 = -3 * disc * (r * r2 - 4 * r1 * r1) / r**5
        return r, r1, r2, r3, r4
    if fam == "sinusoid":
        m, a = p["mean"], p["amplitude"]
        w, ph = p.get("frequency", 1.0), p.get("phase", 0.0)
        x = w * s + ph
        sn, cs = np.sin(x), np.cos(x)
        return m + a * sn, a * w * cs, -a * w**2 * sn, -a * w**3 * cs, a * w**4 * sn
    if fam in ("analytic", "analyticjet", "analytic_jet"):
        if spec.jet is None:
            raise InvalidParams("analytic radius needs a jet callback")
        vals = np.array([np.asarray(spec.jet(float(x)), dtype=float) for x in s.ravel()])
        vals = vals.reshape(s.shape + (5,))
        return tuple(np.moveaxis(vals, -1, 0))
    raise InvalidParams(f"unknown radius family {fam!r}")


def radius_jet(spec: RadiusSpec, s, check: bool = True) -> RadiusJet:
    """r and its first four derivatives at ``s`` (vectorised)."""
    s = np.asarray(s, dtype=float)
    r, r1, r2, r3, r4 = _raw_jet(spec, s)
    if check:
        if np.any(r <= 0):
            raise NonPositiveRadius(f"radius must be positive, min r = {np.min(r):g}")
        if np.any(np.abs(r1) > 1 + SLOPE_TOL):
            raise SlopeExceedsOne(f"|r'| > 1 (max {np.max(np.abs(r1)):g}); no real canal surface")
    return RadiusJet(s, r, r1, r2, r3, r4)


def tube_functions(jet: RadiusJet, sign: int = 1) -> TubeFunctions:
    """R = r r', Q = sign r sqrt(1 - r'^2) and derivatives to order three.

    The Q chain follows from differentiating Q Q' = R (1 - R'), which holds
    because Q^2 + R^2 = r^2.
    """
    if sign not in (1, -1):
        raise InvalidParams("sign must be +1 or -1")
    r, r1, r2, r3, r4 = jet.r, jet.r1, jet.r2, jet.r3, jet.r4
    w = 1 - r1 * r1
    if np.any(np.abs(w) <= SLOPE_TOL):
        raise DegenerateQ("r'^2 = 1: Q vanishes and both fundamental forms degenerate")
    if np.any(w < 0):
        raise SlopeExceedsOne("|r'| > 1")
    R = r * r1
    R1 = r1 * r1 + r * r2
    R2 = 3 * r1 * r2 + r * r3
    R3 = 3 * r2 * r2 + 4 * r1 * r3 + r * r4
    Q = sign * r * np.sqrt(w)
    Q1 = R * (1 - R1) / Q
    Q2 = (R1 * (1 - R1) - R * R2 - Q1 * Q1) / Q
    Q3 = (R2 * (1 - 3 * R1) - R * R3 - 3 * Q1 * Q2) / Q
    return TubeFunctions(R, R1, R2, R3, Q, Q1, Q2, Q3, sign)


class Status(str, enum.Enum):
    REGULAR = "Regular"
    DEGENERATE_FIRST_FORM = "DegenerateFirstForm"
    DEGENERATE_SECOND_FORM = "DegenerateSecondForm"
    NOT_A_SURFACE = "NotASurface"


@dataclass(frozen=True)
class RegularityVerdict:
    status: Status
    detail: str = ""

    @property
    def is_surface(self) -> bool:
        """True when the first fundamental form is nondegenerate."""
        return self.status in (Status.REGULAR, Status.DEGENERATE_SECOND_FORM)


def _fit_residual(columns, y):
    A = np.column_stack(columns)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(np.max(np.abs(A @ coef - y)))


def regularity_check(curve: FramedCurve, spec: RadiusSpec, interval=None, n_samples: int = DEFAULT_SAMPLES):
    """Classify a (curve, radius) pair as a canal surface.

    Checked in order: r'^2 = 1 somewhere (DegenerateFirstForm), straight
    center with r^2 - s^2 affine (NotASurface), straight center with r
    affine (DegenerateSecondForm), otherwise Regular.
    """
    lo, hi = interval if interval is not None else curve.interval
    s = np.linspace(lo, hi, n_samples)
    jet = radius_jet(spec, s, check=False)
    if np.any(jet.r <= 0):
        raise NonPositiveRadius(f"radius must be positive, min r = {np.min(jet.r):g}")
    slope2 = jet.r1**2
    if np.any(slope2 >= 1 - SLOPE_TOL):
        where = float(s[np.argmax(slope2)])
        return RegularityVerdict(Status.DEGENERATE_FIRST_FORM, f"r'^2 = 1 (or exceeds it) near s = {where:g}")

    if curve.fixed_frame is not None:
        straight = True
    else:
        kappa = np.linalg.norm(curve.derivatives(s)[2], axis=-1)
        straight = bool(np.max(kappa) <= KAPPA_MIN)
    if straight:
        ones = np.ones_like(s)
        scale = max(1.0, float(np.max(jet.r**2)))
        if _fit_residual([s, ones], jet.r**2 - s**2) <= FAMILY_FIT_TOL * scale:
            return RegularityVerdict(
                Status.NOT_A_SURFACE, "straight center with r = sqrt(s^2 - 2c1 s + 2c2): C(s,t) is a plane curve"
            )
        if _fit_residual([s, ones], jet.r) <= FAMILY_FIT_TOL * max(1.0, float(np.max(jet.r))):
            return RegularityVerdict(
                Status.DEGENERATE_SECOND_FORM, "surface of revolution with affine radius: eg - f^2 = 0"
            )
    return RegularityVerdict(Status.REGULAR, "")
