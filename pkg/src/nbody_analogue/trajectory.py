"""Radial trajectories of each body and of its complement point, sampled
in angle or in time.

Body k's radius follows from integrating its radial equation twice and
eliminating the unknown double integral with the relative equation:

    x_k = x_k0 + xdot_k0 (t - t_o) + f [x(t) - xdot_o (t - t_o) - x_o],
    f   = M_k / (m_k + M_k),

with t and x expressed through the body angle.  The complement point
obeys the same relation with f replaced by m_k / (m_k + M_k).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from .conic import ConicCoefficients, OrbitClass, conic_constants, separation
from .decomposition import SystemConfig, TwoBodyAnalogue, build_analogue
from .errors import AnalogueError, ConfigError, UnboundedOrbitError, ValidityWarning
from .timeangle import TimeAngleContext, angle_of_time, period, time_of_angle

BY_ANGLE = "by-angle"
BY_TIME = "by-time"


@dataclass(frozen=True)
class SamplingSpec:
    """Uniform sampling of ``count`` points from ``start`` to ``end``.

    In ``by-angle`` mode the bounds are angle offsets from the body's epoch
    angle, measured in its direction of motion.  In ``by-time`` mode they
    are absolute times.
    """

    mode: str
    start: float
    end: float
    count: int

    def __post_init__(self):
        if self.mode not in (BY_ANGLE, BY_TIME):
            raise ConfigError(f"sampling mode must be {BY_ANGLE!r} or {BY_TIME!r}, got {self.mode!r}")
        if int(self.count) != self.count or self.count < 2:
            raise ConfigError(f"sample count must be an integer >= 2, got {self.count!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.end)) or self.start == self.end:
            raise ConfigError(f"sampling bounds must be finite and distinct, got {self.start}, {self.end}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.end, int(self.count))


class Row(NamedTuple):
    t: float
    theta_k: float
    x_k: float
    x: float
    px: float
    py: float


@dataclass(frozen=True)
class TrajectorySeries:
    body_index: int
    mode: str
    t: np.ndarray
    theta_k: np.ndarray
    x_k: np.ndarray
    x: np.ndarray
    orbit_class: OrbitClass
    eccentricity: float
    period: float | None
    collinearity_defect: float
    rate_warning: bool
    breakdown_angles: tuple[float, ...] = field(default=())

    @property
    def points(self) -> np.ndarray:
        return np.column_stack((self.x_k * np.cos(self.theta_k), self.x_k * np.sin(self.theta_k)))

    def rows(self) -> Iterator[Row]:
        pts = self.points
        for i in range(len(self.t)):
            yield Row(self.t[i], self.theta_k[i], self.x_k[i], self.x[i], pts[i, 0], pts[i, 1])

    def __len__(self) -> int:
        return len(self.t)


def _radial(x0, xdot0, frac, analogue, ctx, theta_k, t=None):
    rel = analogue.relative0
    t0 = analogue.t0
    if t is None:
        t = time_of_angle(ctx, theta_k)
    x = separation(ctx.coeffs, theta_k)
    return (
        x0
        - frac * rel.radius
        + (frac * rel.radial_rate - xdot0) * t0
        + (xdot0 - frac * rel.radial_rate) * t
        + frac * x
    )


def radial_body(
    analogue: TwoBodyAnalogue,
    coeffs: ConicCoefficients,
    ctx: TimeAngleContext,
    theta_k: float,
    t: float | None = None,
) -> float:
    """Radius of body k at body angle ``theta_k``.

    ``t`` may be passed when the time at ``theta_k`` is already known.
    The result may be negative outside the validity region; callers decide
    how to report that.
    """
    b = analogue.body0
    return _radial(b.radius, b.radial_rate, analogue.complement_fraction, analogue, ctx, theta_k, t)


def radial_complement(
    analogue: TwoBodyAnalogue,
    coeffs: ConicCoefficients,
    ctx: TimeAngleContext,
    theta_k: float,
    t: float | None = None,
) -> float:
    """Radius of the complement point at body angle ``theta_k``."""
    a = analogue.aggregate0
    return _radial(a.radius, a.radial_rate, analogue.body_fraction, analogue, ctx, theta_k, t)


def sample(
    analogue: TwoBodyAnalogue,
    coeffs: ConicCoefficients,
    ctx: TimeAngleContext,
    spec: SamplingSpec,
    tol: float = 1e-12,
    rel_tol: float = 1e-10,
) -> TrajectorySeries:
    """Sample body k's trajectory on a uniform angle or time grid.

    ``tol`` is the time inversion tolerance (fraction of a period) and
    ``rel_tol`` the quadrature tolerance used on unbounded orbits.
    """
    bounded = coeffs.orbit_class.bounded
    grid = spec.grid()
    if spec.mode == BY_ANGLE:
        thetas = ctx.theta_k0 + ctx.direction * grid
        times = np.array([time_of_angle(ctx, th, rel_tol) for th in thetas])
    else:
        if not bounded:
            raise UnboundedOrbitError(
                f"body {analogue.index + 1}: time sampling needs a bounded orbit, "
                f"got {coeffs.orbit_class.value}",
                body=analogue.index,
            )
        times = grid
        thetas = np.array([angle_of_time(ctx, t, tol) for t in times])
    seps = np.array([separation(coeffs, th) for th in thetas])
    radii = np.array([radial_body(analogue, coeffs, ctx, th, t) for th, t in zip(thetas, times)])
    # model breakdown: unphysical radius, flagged and kept
    bad = tuple(float(th) for th, r in zip(thetas, radii) if r <= 0)
    if bad:
        warnings.warn(
            f"body {analogue.index + 1}: nonpositive radius at {len(bad)} sample(s), "
            f"first at theta_k={bad[0]:.6g}",
            ValidityWarning,
            stacklevel=2,
        )
    return TrajectorySeries(
        body_index=analogue.index,
        mode=spec.mode,
        t=np.asarray(times, dtype=float),
        theta_k=np.asarray(thetas, dtype=float),
        x_k=radii,
        x=seps,
        orbit_class=coeffs.orbit_class,
        eccentricity=coeffs.eccentricity,
        period=period(ctx) if bounded else None,
        collinearity_defect=analogue.collinearity_defect,
        rate_warning=analogue.rate_warning,
        breakdown_angles=bad,
    )


def solve_body(cfg: SystemConfig, k: int):
    """Analogue, conic coefficients and time context for body ``k``."""
    analogue = build_analogue(cfg, k)
    coeffs = conic_constants(analogue)
    return analogue, coeffs, TimeAngleContext.from_analogue(analogue, coeffs)


def approx_system(
    cfg: SystemConfig,
    spec: SamplingSpec,
    partial: bool = False,
    tol: float = 1e-12,
    rel_tol: float = 1e-10,
) -> list[TrajectorySeries | None]:
    """One independent series per body.

    A failing body raises with its one-based label in the message; with
    ``partial=True`` its slot is ``None`` and a warning is issued instead.
    """
    out: list[TrajectorySeries | None] = []
    for k in range(len(cfg)):
        try:
            out.append(sample(*solve_body(cfg, k), spec, tol, rel_tol))
        except AnalogueError as exc:
            if not partial:
                if exc.body is None:
                    raise type(exc)(f"body {k + 1}: {exc}", body=k) from exc
                raise
            warnings.warn(f"body {k + 1} skipped: {exc}", ValidityWarning, stacklevel=2)
            out.append(None)
    return out
