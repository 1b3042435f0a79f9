import math
import sys

import numpy as np
import pytest

from nbody_analogue.decomposition import Body, SystemConfig

SQRT_125 = math.sqrt(0.125)


def pair(v, m=(0.25, 0.25)):
    """Two bodies at (+-0.5, 0) with opposite transverse velocities (0, +-v)."""
    return SystemConfig((Body(m[0], (0.5, 0.0), (0.0, v)), Body(m[1], (-0.5, 0.0), (0.0, -v))))


def system_b_like(e):
    """System B geometry with the epoch at apoapsis of a relative orbit of eccentricity e."""
    return pair(0.5 * math.sqrt(0.5 * (1.0 - e)))


def two_body(e, nu, alpha=0.0, masses=(0.5, 0.5), p=1.0, G=1.0, clockwise=False):
    """Barycentric two-body config whose relative orbit (body 2 seen from body 1)
    has eccentricity ``e``, semi-latus rectum ``p``, is at true anomaly ``nu``
    and has its periapsis direction at angle ``alpha``."""
    m1, m2 = masses
    mu = G * (m1 + m2)
    r = p / (1 + e * math.cos(nu))
    vr = math.sqrt(mu / p) * e * math.sin(nu)
    vt = math.sqrt(mu / p) * (1 + e * math.cos(nu))
    if clockwise:
        vt = -vt
    ang = alpha + (-nu if clockwise else nu)
    c, s = math.cos(ang), math.sin(ang)
    rel = np.array([r * c, r * s])
    vrel = np.array([vr * c - vt * s, vr * s + vt * c])
    M = m1 + m2
    x1, x2 = -m2 / M * rel, m1 / M * rel
    v1, v2 = -m2 / M * vrel, m1 / M * vrel
    return SystemConfig(
        (Body(m1, tuple(x1), tuple(v1)), Body(m2, tuple(x2), tuple(v2))), G=G
    )


def random_barycentric(rng, n=None):
    """Random N-body config shifted to zero total momentum and centroid at the origin."""
    n = n or int(rng.integers(2, 6))
    m = rng.uniform(0.1, 2.0, n)
    x = rng.uniform(-2, 2, (n, 2))
    v = rng.uniform(-0.5, 0.5, (n, 2))
    x -= m @ x / m.sum()
    v -= m @ v / m.sum()
    return SystemConfig(tuple(Body(mi, tuple(xi), tuple(vi)) for mi, xi, vi in zip(m, x, v)))


@pytest.fixture
def system_a():
    return pair(SQRT_125)


@pytest.fixture
def system_b():
    return pair(0.3)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
