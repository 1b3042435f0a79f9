"""Conic solution of the relative orbit in the body's angle variable.

With u = 1/x and h = x_o**2 * thetadot_o the relative radial equation
becomes u'' + u = mu/h**2, whose solution is written

    x(theta_k) = 1 / (k1*cos(theta_k - phi) + k2),   k2 = mu/h**2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .decomposition import TwoBodyAnalogue
from .errors import DegenerateInputError, UnboundedOrbitError

#: Relative width (against k2) of the circular and parabolic class boundaries.
CLASS_TOL = 1e-12


class OrbitClass(str, enum.Enum):
    CIRCULAR = "circular"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"

    @property
    def bounded(self) -> bool:
        return self in (OrbitClass.CIRCULAR, OrbitClass.ELLIPTIC)


@dataclass(frozen=True)
class ConicCoefficients:
    k1: float
    k2: float
    phi: float
    theta_k0: float

    def __post_init__(self):
        if not self.k2 > 0:
            raise ValueError(f"k2 must be positive, got {self.k2!r}")

    @property
    def eccentricity(self) -> float:
        return abs(self.k1) / self.k2

    @property
    def orbit_class(self) -> OrbitClass:
        return classify(self)


def classify(coeffs: ConicCoefficients) -> OrbitClass:
    a, k2 = abs(coeffs.k1), coeffs.k2
    if a <= CLASS_TOL * k2:
        return OrbitClass.CIRCULAR
    if abs(a - k2) <= CLASS_TOL * k2:
        return OrbitClass.PARABOLIC
    return OrbitClass.ELLIPTIC if a < k2 else OrbitClass.HYPERBOLIC


def conic_constants(analogue: TwoBodyAnalogue) -> ConicCoefficients:
    """Fit k1, k2, phi to the epoch separation and its angular derivative.

    The conic is anchored at the body's epoch angle: the relative angle is
    taken as theta_k0 - pi, as the collinear model assumes, so that the
    epoch separation is reproduced even when the input configuration is
    not exactly collinear.
    """
    rel = analogue.relative0
    if not rel.radius > 0:
        raise DegenerateInputError(
            f"body {analogue.index + 1}: nonpositive separation", body=analogue.index
        )
    if rel.angular_rate == 0.0:
        raise DegenerateInputError(
            f"body {analogue.index + 1}: zero relative angular rate", body=analogue.index
        )
    h = analogue.angular_momentum
    k2 = analogue.mu / (h * h)
    # u(theta) = c1 cos(theta) + c2 sin(theta) + k2 with u(theta0) = 1/x_o and
    # u'(theta0) = -xdot_o / h, where theta0 is the relative angle at the epoch
    theta_k0 = analogue.body0.angle
    theta0 = theta_k0 - math.pi
    a = 1.0 / rel.radius - k2
    b = -rel.radial_rate / h
    c, s = math.cos(theta0), math.sin(theta0)
    c1 = a * c - b * s
    c2 = a * s + b * c
    # theta = theta_k - pi negates both harmonics, hence the negative amplitude
    return ConicCoefficients(
        k1=-math.hypot(c1, c2), k2=k2, phi=math.atan2(c2, c1), theta_k0=theta_k0
    )


def _denominator(coeffs: ConicCoefficients, theta_k):
    return coeffs.k1 * np.cos(theta_k - coeffs.phi) + coeffs.k2


def separation(coeffs: ConicCoefficients, theta_k):
    """Relative separation at body angle ``theta_k`` (scalar or array)."""
    d = _denominator(coeffs, theta_k)
    if np.any(d <= 0):
        raise UnboundedOrbitError(
            f"angle outside the reachable arc of the {coeffs.orbit_class.value} orbit"
        )
    out = 1.0 / d
    return float(out) if np.ndim(out) == 0 else out


def min_denominator(coeffs: ConicCoefficients, a: float, b: float) -> float:
    """Smallest value of k1*cos(theta - phi) + k2 for theta between a and b."""
    lo, hi = min(a, b), max(a, b)
    k1, k2 = coeffs.k1, coeffs.k2
    vals = [k1 * math.cos(lo - coeffs.phi) + k2, k1 * math.cos(hi - coeffs.phi) + k2]
    # interior extremum where cos(theta - phi) = -sign(k1)
    target = math.pi if k1 > 0 else 0.0
    n = math.ceil((lo - coeffs.phi - target) / (2 * math.pi))
    if coeffs.phi + target + 2 * math.pi * n <= hi:
        vals.append(k2 - abs(k1))
    return min(vals)
