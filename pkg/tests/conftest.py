import math
import sys

import numpy as np
import pytest

from canalkit import CanalSurface, CurveSpec, RadiusSpec, make_curve

SQRT3_2 = math.sqrt(3) / 2
INTERVAL = (-3.5, 3.5)


def catenary_jet(s):
    """Unit-speed catenary (asinh s, sqrt(1+s^2), 0); kappa = 1/(1+s^2)."""
    u = 1.0 + s * s
    return np.array(
        [
            [math.asinh(s), math.sqrt(u), 0.0],
            [u**-0.5, s * u**-0.5, 0.0],
            [-s * u**-1.5, u**-1.5, 0.0],
            [(2 * s * s - 1) * u**-2.5, -3 * s * u**-2.5, 0.0],
            [(9 * s - 6 * s**3) * u**-3.5, (12 * s * s - 3) * u**-3.5, 0.0],
        ]
    )


def build(curve, radius, sign=1, interval=INTERVAL):
    if curve.get("family") == "analytic":
        spec = CurveSpec("analytic", {}, jet=curve["jet"], interval=interval)
    else:
        spec = CurveSpec.from_dict({**curve, "interval": interval})
    return CanalSurface(make_curve(spec), radius, sign)


HELIX = {"family": "helix", "a": 0.5, "b": SQRT3_2}


def helix_tube(sign=1):
    return build(HELIX, RadiusSpec.constant(2.0), sign)


def torus():
    return build({"family": "circle", "rho": 2.0}, RadiusSpec.constant(1.0))


def revolution():
    return build({"family": "line"}, RadiusSpec.sinusoid(2.0, 0.3))


def generic_canal():
    return build(HELIX, RadiusSpec.sinusoid(2.0, 0.3))


def cylinder(c=2.0):
    return build({"family": "line"}, RadiusSpec.constant(c))


SURFACES = {
    "helix_tube": lambda: helix_tube(1),
    "helix_tube_minus": lambda: helix_tube(-1),
    "torus": torus,
    "revolution": revolution,
    "revolution_wave": lambda: build({"family": "line"}, RadiusSpec.sinusoid(1.5, 0.5, 0.8)),
    "revolution_tilted": lambda: build(
        {"family": "line", "point": [1.0, -2.0, 0.5], "direction": [1.0, 2.0, 2.0]}, RadiusSpec.sinusoid(2.5, 0.6, 0.5, 0.3)
    ),
    "flat_helix_tube": lambda: build({"family": "helix", "a": 1.0, "b": 0.3}, RadiusSpec.constant(0.4)),
    "torsion_light_tube": lambda: build({"family": "helix", "a": 1.0, "b": 0.2}, RadiusSpec.constant(0.5)),
    "generic_canal": generic_canal,
    "catenary_canal": lambda: build({"family": "analytic", "jet": catenary_jet}, RadiusSpec.sinusoid(1.2, 0.25, 1.3)),
    "cone_of_revolution": lambda: build({"family": "line"}, RadiusSpec.affine(0.4, 2.0)),
}

TUBES = ["helix_tube", "helix_tube_minus", "torus", "flat_helix_tube", "torsion_light_tube"]
REVOLUTIONS = ["revolution", "revolution_wave", "revolution_tilted"]


@pytest.fixture(scope="session")
def surfaces():
    return {name: make() for name, make in SURFACES.items()}


def grid(ns=33, nt=65, s_range=(-3.0, 3.0)):
    s = np.linspace(*s_range, ns)[:, None]
    t = (2 * np.pi * np.arange(nt) / nt)[None, :]
    return np.broadcast_arrays(s, t)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        title, ok, detail = results[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n}. {title}: {detail}")
