"""Gaussian, mean and second Gaussian curvature of canal surfaces.

Closed forms are polynomials in cos t over the metric determinants. K_II
has a finite-difference Brioschi oracle built on the second fundamental
form. Two monomials of the original coefficient list and its denominator
are corrected; the uncorrected variants stay reachable via ``as_printed``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DegenerateSecondForm, InvalidParams, SingularPoint
from .surface import (
    ORACLE_STEP,
    CanalSurface,
    Local,
    _area2_expanded,
    _second,
    _st,
    _stencil_partials,
    local,
    reg_threshold,
)

II_EPS = 1e-10


def ii_threshold(e, g):
    return II_EPS * np.maximum(1.0, np.abs(e * g))


def _k_brace(loc: Local, c):
    tb, k = loc.tube, loc.frame.kappa
    return k**2 * (tb.R**2 + tb.Q**2) * c**2 + k * (2 * tb.Q1 * tb.R - 2 * tb.Q * tb.R1 + tb.Q) * c - (
        tb.R * tb.R2 + tb.Q * tb.Q2
    )


def _gaussian(loc: Local, t):
    r, Q = loc.jet.r, loc.tube.Q
    return Q**2 / (r**2 * _area2_expanded(loc, t)) * _k_brace(loc, np.cos(t))


def _mean(loc: Local, t):
    tb, k, r = loc.tube, loc.frame.kappa, loc.jet.r
    Q, Q1, Q2, R, R1, R2 = tb.Q, tb.Q1, tb.Q2, tb.R, tb.R1, tb.R2
    c = np.cos(t)
    brace = (
        2 * k**2 * (Q**2 + R**2) * c**2
        + k * (4 * (Q1 * R - Q * R1) + 3 * Q) * c
        + R1**2
        + Q1**2
        - 2 * R1
        - R * R2
        - Q * Q2
        + 1
    )
    return -(Q**2) / (2 * r * _area2_expanded(loc, t)) * brace


def _check_regular(loc: Local, t):
    area2 = _area2_expanded(loc, t)
    if np.any(area2 <= reg_threshold(loc.tube.Q)):
        raise SingularPoint("EG - F^2 vanishes: curvature undefined")


def gaussian(surf: CanalSurface, s, t):
    s, t = _st(s, t)
    loc = local(surf, s)
    _check_regular(loc, t)
    return _gaussian(loc, t)


def mean(surf: CanalSurface, s, t):
    s, t = _st(s, t)
    loc = local(surf, s)
    _check_regular(loc, t)
    return _mean(loc, t)


@dataclass(frozen=True)
class KiiCoefficients:
    n0: Any
    n1: Any
    n2: Any
    n3: Any
    n4: Any

    def polynomial(self, c):
        return self.n0 + self.n1 * c + self.n2 * c**2 + self.n3 * c**3 + self.n4 * c**4


def kii_blocks(Q, Q1, Q2, Q3, R, R1, R2, R3, r, r1, r2, k, kp, tau, sin_t, as_printed=False):
    """The coefficients n0..n4 of K_II's cos(t) polynomial.

    Monomials are listed in their original order. With ``as_printed=False`` two
    monomials are corrected against the Brioschi determinant:
    in n1 the term Q Q' R' kappa' r^2 carries factor 4, and in n2 the term
    8 Q' R R' kappa r^2 (inside the kappa bracket) is positive.
    """
    n0 = (
        -Q * k**2 * r**2
        + 4 * Q * R1 * k**2 * r**2
        - 4 * Q * R1**2 * k**2 * r**2
        - 2 * Q1 * R * k**2 * r**2
        - Q**2 * Q3 * r * r1
        + 2 * Q * Q1 * Q3 * r**2
        - 4 * Q**2 * Q2 * k**2 * r**2
        - 2 * Q * R * R2 * r1**2
        + 2 * Q**2 * Q2 * r * r2
        + 2 * Q * R * R2 * r * r2
        + 2 * Q1 * R1 * R2 * r**2
        + 2 * Q1 * R * R3 * r**2
        - 4 * Q2 * R * R2 * r**2
        - Q * R * r * r1 * k**2
        + 4 * Q1 * R * R1 * k**2 * r**2
        + 2 * Q * R * R1 * r * r1 * k**2
        - 2 * Q1 * R**2 * r * r1 * k**2
        - 4 * Q * Q2**2 * r**2
        + 2 * Q1**2 * Q2 * r**2
        + 2 * Q1 * R * R2 * r * r1
        - 2 * Q**2 * Q2 * r1**2
        + Q * Q1 * Q2 * r * r1
        - Q * R1 * R2 * r * r1
        - Q * R * R3 * r * r1
        - 4 * Q * R * R2 * k**2 * r**2
        + k
        * tau
        * (
            (4 * Q * Q2 * R + 4 * R**2 * R2 + 2 * Q * Q1 + 4 * Q1**2 * R - 4 * Q * Q1 * R1) * r**2
            + Q * (2 * Q * R1 - Q - 2 * Q1 * R) * r * r1
        )
        * sin_t
    )
    qq1r1kp = 1 if as_printed else 4
    n1 = (
        Q**2 * r * r1 * kp
        + 4 * R**2 * R1 * r**2 * k**3
        - 4 * Q1**2 * R * kp * r**2
        - 2 * Q * Q1 * kp * r**2
        - 2 * R**3 * k**3 * r * r1
        - 4 * Q**2 * R1 * r1**2 * k
        - 2 * Q**2 * r * r2 * k
        - 4 * R**2 * R2 * kp * r**2
        - 2 * R**2 * k**3 * r**2
        - 2 * Q1**2 * k * r**2
        + 2 * Q**2 * r1**2 * k
        - Q * Q1 * r * r1 * k
        + 4 * Q * Q1 * R * r1**2 * k
        - 2 * Q**2 * R1 * r * r1 * kp
        + 4 * Q * Q1 * R1 * r * r1 * k
        + 2 * Q * Q1 * R * r * r1 * kp
        - 4 * Q1**2 * R * r * r1 * k
        + 2 * R**2 * R2 * r * r1 * k
        - 6 * R * R1 * R2 * k * r**2
        + 4 * Q * Q1 * R * k**3 * r**2
        + qq1r1kp * Q * Q1 * R1 * kp * r**2
        - 2 * Q**2 * R * k**3 * r * r1
        + 2 * R**2 * R3 * k * r**2
        + 2 * R * R2 * k * r**2
        + 6 * Q * Q2 * k * r**2
        + 4 * Q * Q2 * R * r * r1 * k
        - 16 * Q * Q2 * R1 * k * r**2
        - 4 * Q * Q2 * R * kp * r**2
        + 6 * Q1 * Q2 * R * k * r**2
        - 2 * Q**2 * R2 * r * r1 * k
        + 4 * Q**2 * R1 * r * r2 * k
        - 4 * Q * Q1 * R * r * r2 * k
        + 2 * Q * Q3 * R * k * r**2
        + 4 * Q * Q1 * R2 * k * r**2
        + k**2 * tau * (2 * Q * r**2 * (2 * Q * Q1 + 2 * R * R1 - R) - 2 * Q * (R**2 + Q**2) * r * r1) * sin_t
    )
    q1rr1 = -8 if as_printed else 8
    n2 = k * (
        12 * Q**2 * Q2 * k * r**2
        + 8 * Q * R1 * k * r**2
        - 12 * Q * R1**2 * k * r**2
        - 4 * Q * Q1**2 * k * r**2
        + 2 * Q * R**2 * r1**2 * k
        + 2 * Q**3 * kp * r * r1
        - Q * R * k * r * r1
        + 2 * Q * R**2 * kp * r * r1
        - 2 * Q**3 * k * r * r2
        - Q * k * r**2
        + 2 * Q**3 * r1**2 * k
        - 4 * Q * R * R1 * kp * r**2
        + 12 * Q * R * R2 * k * r**2
        + q1rr1 * Q1 * R * R1 * k * r**2
        + 2 * Q * R * kp * r**2
        - 4 * Q1 * R * k * r**2
        - 4 * Q**2 * Q1 * kp * r**2
        - 4 * Q1 * R**2 * r * r1 * k
        - 2 * Q * R**2 * k * r * r2
        + 4 * Q * R * R1 * r * r1 * k
    )
    n3 = 2 * Q * k**3 * r**2 * (8 * Q * R1 - 8 * Q1 * R - 3 * Q)
    n4 = -4 * Q * k**4 * r**2 * (Q**2 + R**2)
    return KiiCoefficients(n0, n1, n2, n3, n4)


def _kii_coefficients(loc: Local, t, as_printed=False):
    tb, f, j = loc.tube, loc.frame, loc.jet
    return kii_blocks(
        tb.Q, tb.Q1, tb.Q2, tb.Q3, tb.R, tb.R1, tb.R2, tb.R3,
        j.r, j.r1, j.r2, f.kappa, f.kappa_prime, f.tau, np.sin(t),
        as_printed=as_printed,
    )  # fmt: skip


def kii_coefficients(surf: CanalSurface, s, t, as_printed: bool = False) -> KiiCoefficients:
    s, t = _st(s, t)
    return _kii_coefficients(local(surf, s), t, as_printed)


def _second_gaussian(loc: Local, t, as_printed=False):
    e, f, g = _second(loc, t)
    det2 = e * g - f**2
    n = _kii_coefficients(loc, t, as_printed).polynomial(np.cos(t))
    Q, r = loc.tube.Q, loc.jet.r
    denom = 4 * r**5 * (det2 if as_printed else det2**2)
    return Q**3 * n / denom, det2, ii_threshold(e, g)


def second_gaussian(surf: CanalSurface, s, t, as_printed: bool = False):
    """K_II = Q^3 sum(n_i cos^i t) / (4 r^5 (eg - f^2)^2).

    ``as_printed=True`` uses the original denominator 4 r^5 (eg - f^2) and
    the uncorrected n1, n2; it does not agree with the Brioschi value and is
    kept only for comparison.
    """
    s, t = _st(s, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        kii, det2, eps = _second_gaussian(local(surf, s), t, as_printed)
    if np.any(np.abs(det2) <= eps):
        raise DegenerateSecondForm("eg - f^2 vanishes: K_II undefined")
    return kii


def brioschi(e_fn, f_fn, g_fn, s, t, h: float = ORACLE_STEP, prefactor: str = "standard"):
    """Brioschi curvature of the quadratic form (e, f, g), partials by finite differences.

    ``prefactor="printed"`` divides by (|eg| - f^2)^2 instead of (eg - f^2)^2;
    the two differ only where eg < 0.
    """
    if prefactor not in ("standard", "printed"):
        raise InvalidParams("prefactor must be 'standard' or 'printed'")
    s, t = _st(s, t)
    de = _stencil_partials(e_fn, s, t, h)
    df = _stencil_partials(f_fn, s, t, h)
    dg = _stencil_partials(g_fn, s, t, h)
    e, f, g = de["f"], df["f"], dg["f"]
    det2 = e * g - f**2
    if np.any(np.abs(det2) <= ii_threshold(e, g)):
        raise DegenerateSecondForm("eg - f^2 vanishes: Brioschi formula undefined")

    a11 = -0.5 * de["tt"] + df["st"] - 0.5 * dg["ss"]
    a12, a13 = 0.5 * de["s"], df["s"] - 0.5 * de["t"]
    a21, a31 = df["t"] - 0.5 * dg["s"], 0.5 * dg["t"]
    first = (
        a11 * (e * g - f * f)
        - a12 * (a21 * g - f * a31)
        + a13 * (a21 * f - e * a31)
    )
    b12, b13 = 0.5 * de["t"], 0.5 * dg["s"]
    second = -b12 * (b12 * g - f * b13) + b13 * (b12 * f - e * b13)
    if prefactor == "standard":
        denom = det2**2
    else:
        denom = (np.abs(e * g) - f**2) ** 2
    return (first - second) / denom


def brioschi_oracle(surf: CanalSurface, s, t, h: float = ORACLE_STEP, prefactor: str = "standard"):
    """K_II from the Brioschi determinants over the closed-form e, f, g."""
    s, t = _st(s, t)
    lo, hi = surf.s_interval
    if np.any(s - 2 * h < lo) or np.any(s + 2 * h > hi):
        raise InvalidParams("oracle stencil leaves the s interval")

    def component(i):
        return lambda S, T: _second(local(surf, S), T)[i]

    return brioschi(component(0), component(1), component(2), s, t, h, prefactor)


@dataclass(frozen=True)
class CurvatureTriple:
    K: float | None
    H: float | None
    K_II: float | None
    regular: bool
    second_form_definite: bool
    second_form_nondegenerate: bool

    def as_dict(self):
        out = {"K": self.K, "H": self.H}
        if self.K_II is not None:
            out["K_II"] = self.K_II
        out["flags"] = {
            "regular": self.regular,
            "second_form_definite": self.second_form_definite,
            "second_form_nondegenerate": self.second_form_nondegenerate,
        }
        return out


def curvature_arrays(surf: CanalSurface, s, t):
    """K, H, K_II on arrays, NaN where undefined, plus the masks used."""
    s, t = _st(s, t)
    loc = local(surf, s)
    area2 = _area2_expanded(loc, t)
    regular = area2 > reg_threshold(loc.tube.Q)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        K = np.where(regular, _gaussian(loc, t), np.nan)
        H = np.where(regular, _mean(loc, t), np.nan)
        kii, det2, eps = _second_gaussian(loc, t)
    nondeg = np.abs(det2) > eps
    with np.errstate(invalid="ignore"):
        K_II = np.where(regular & nondeg, kii, np.nan)
    return {"K": K, "H": H, "K_II": K_II, "regular": regular, "nondegenerate": nondeg, "det2": det2}


def curvature_triple(surf: CanalSurface, s: float, t: float) -> CurvatureTriple:
    a = curvature_arrays(surf, float(s), float(t))
    regular = bool(a["regular"])
    nondeg = bool(a["nondegenerate"])
    definite = nondeg and bool(a["det2"] > 0)

    def val(x):
        x = float(x)
        return None if np.isnan(x) else x

    return CurvatureTriple(val(a["K"]), val(a["H"]), val(a["K_II"]), regular, definite, nondeg)
