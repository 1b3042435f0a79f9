"""Time as a function of body angle along the relative conic.

    t(theta_k) = t_o + (1/h) * integral_{theta_k0}^{theta_k} x(theta)**2 dtheta

evaluated either through the explicit half-angle antiderivative
(:func:`time_closed`) or by adaptive quadrature (:func:`time_quadrature`).
The two routes share nothing but the conic coefficients, so each checks
the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .conic import ConicCoefficients, min_denominator
from .decomposition import TwoBodyAnalogue
from .errors import ConvergenceError, UnboundedOrbitError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TimeAngleContext:
    coeffs: ConicCoefficients
    h: float
    t0: float
    theta_k0: float

    def __post_init__(self):
        if self.h == 0 or not math.isfinite(self.h):
            raise ValueError(f"angular momentum must be finite and nonzero, got {self.h!r}")

    @classmethod
    def from_analogue(cls, analogue: TwoBodyAnalogue, coeffs: ConicCoefficients):
        return cls(
            coeffs=coeffs,
            h=analogue.angular_momentum,
            t0=analogue.t0,
            theta_k0=coeffs.theta_k0,
        )

    @property
    def direction(self) -> int:
        """+1 for counterclockwise motion, -1 for clockwise."""
        return 1 if self.h > 0 else -1


def _require_bounded(coeffs: ConicCoefficients) -> None:
    cls = coeffs.orbit_class
    if not cls.bounded:
        raise UnboundedOrbitError(
            f"closed form needs a bounded orbit, got {cls.value} (e={coeffs.eccentricity:.6g})"
        )


def _antiderivative(k1: float, k2: float, phi: float, theta: float) -> float:
    """Continuous antiderivative of 1/(k1 cos(theta - phi) + k2)**2 for k1**2 < k2**2.

    The half-angle form is only valid between consecutive poles of
    tan(0.5*phi - 0.5*theta); each pole crossed adds one revolution's worth
    of area, 2*pi*k2/s**3.
    """
    s2 = (k1 + k2) * (k2 - k1)
    s = math.sqrt(s2)
    s3 = s2 * s
    psi = theta - phi
    # exact reduction; floor-based reduction can disagree with j by one next to a pole
    r = math.remainder(psi, TWO_PI)  # in [-pi, pi]
    j = round((psi - r) / TWO_PI)
    branch = j * TWO_PI * k2 / s3
    if abs(r) == math.pi:
        # limit at the pole: the tangent term vanishes and the arctangent tends to -+pi/2
        return math.copysign(math.pi, r) * k2 / s3 + branch
    T = math.tan(-0.5 * r)  # tan(0.5*phi - 0.5*theta) on the principal branch
    T2 = T * T
    A = math.atan((k2 - k1) * T / s)
    bracket = -k1 * T2 + k1 + k2 + k2 * T2
    brace = (
        k1 * s * T
        + k1 * k2 * T2 * A
        - k1 * k2 * A
        - k2 * k2 * T2 * A
        - k2 * k2 * A
    )
    return 2.0 / s3 * brace / bracket + branch


def time_closed(ctx: TimeAngleContext, theta_k: float) -> float:
    """Closed-form time at body angle ``theta_k`` (circular or elliptic orbits only)."""
    c = ctx.coeffs
    _require_bounded(c)
    if theta_k == ctx.theta_k0:
        return ctx.t0
    area = _antiderivative(c.k1, c.k2, c.phi, theta_k) - _antiderivative(
        c.k1, c.k2, c.phi, ctx.theta_k0
    )
    return ctx.t0 + area / ctx.h


def time_quadrature(
    ctx: TimeAngleContext, theta_k: float, rel_tol: float = 1e-10, limit: int = 200
) -> float:
    """Time at ``theta_k`` by adaptive Gauss-Kronrod quadrature of x**2 / h.

    Works for every orbit class as long as the sweep from the epoch angle
    stays on the reachable arc.  Sweeps longer than one revolution are split
    per revolution, each piece getting its own subdivision budget.
    """
    if not 0 < rel_tol <= 1e-3:
        raise ValueError(f"rel_tol must lie in (0, 1e-3], got {rel_tol!r}")
    c = ctx.coeffs
    a = ctx.theta_k0
    if theta_k == a:
        return ctx.t0
    if min_denominator(c, a, theta_k) <= 0:
        raise UnboundedOrbitError(
            f"sweep to theta_k={theta_k:.6g} leaves the reachable arc of the "
            f"{c.orbit_class.value} orbit"
        )
    k1, k2, phi = c.k1, c.k2, c.phi

    def integrand(th):
        d = k1 * math.cos(th - phi) + k2
        return 1.0 / (d * d)

    pieces = max(1, math.ceil(abs(theta_k - a) / TWO_PI))
    edges = [a + (theta_k - a) * i / pieces for i in range(pieces + 1)]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        out = integrate.quad(
            integrand, lo, hi, epsabs=0.0, epsrel=rel_tol, limit=limit, full_output=1
        )
        if len(out) > 3:
            raise ConvergenceError(f"quadrature did not converge on [{lo:.6g}, {hi:.6g}]: {out[3]}")
        total += out[0]
    return ctx.t0 + total / ctx.h


def period(ctx: TimeAngleContext) -> float:
    """Time for one full revolution, 2*pi*k2 / (|h| (k2**2 - k1**2)**1.5)."""
    c = ctx.coeffs
    _require_bounded(c)
    s2 = (c.k2 + c.k1) * (c.k2 - c.k1)
    return TWO_PI * c.k2 / (abs(ctx.h) * s2 * math.sqrt(s2))


def time_of_angle(ctx: TimeAngleContext, theta_k: float, rel_tol: float = 1e-10) -> float:
    """Closed form when the orbit is bounded, quadrature otherwise."""
    if ctx.coeffs.orbit_class.bounded:
        return time_closed(ctx, theta_k)
    return time_quadrature(ctx, theta_k, rel_tol)


def angle_of_time(ctx: TimeAngleContext, t: float, tol: float = 1e-12) -> float:
    """Body angle reached at time ``t``; inverse of :func:`time_closed`.

    ``t`` is reduced modulo the period and the remaining angle is found by
    Brent's method on one revolution.  The result satisfies
    ``abs(time_closed(ctx, theta) - t) <= tol * period``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    P = period(ctx)
    sign = ctx.direction
    n = math.floor((t - ctx.t0) / P)
    base = ctx.theta_k0 + sign * TWO_PI * n

    def residual(delta):
        return time_closed(ctx, base + sign * delta) - t

    r_lo, r_hi = residual(0.0), residual(TWO_PI)
    if r_lo >= 0:
        delta = 0.0
    elif r_hi <= 0:
        delta = TWO_PI
    else:
        delta, info = optimize.brentq(
            residual, 0.0, TWO_PI, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200, full_output=True,
            disp=False,
        )
        if not info.converged:
            raise ConvergenceError(f"angle inversion did not converge at t={t!r}: {info.flag}")
    theta = base + sign * delta
    err = abs(time_closed(ctx, theta) - t)
    if err > tol * P:
        raise ConvergenceError(
            f"angle inversion residual {err:.3g} exceeds {tol:.3g} * period at t={t!r}"
        )
    return theta
