"""Direct Newtonian N-body integration used as ground truth.

Fixed-step classic RK4 on the full pairwise equations, conserved-quantity
audit, and deviation metrics against approximate trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .decomposition import SystemConfig
from .errors import ConfigError, DegenerateInputError, OracleAbort
from .trajectory import BY_TIME, TrajectorySeries

#: Collinearity defect (rad) above which the CLI warns.
COLLINEARITY_WARN = 0.1


@dataclass(frozen=True)
class OracleSeries:
    """Every integration step: ``positions`` and ``velocities`` are (steps, N, 2)."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    masses: np.ndarray
    G: float
    step: float
    method: str = "rk4"

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class ConservedQuantities:
    energy: float
    momentum: tuple[float, float]
    angular_momentum: float


@dataclass(frozen=True)
class ErrorReport:
    per_body: tuple[tuple[float, float], ...]
    max_overall: float
    collinearity_defect_max: float
    validity_flags: dict = field(default_factory=dict)


def _pair_geometry(positions: np.ndarray):
    d = positions[None, :, :] - positions[:, None, :]  # d[i, j] = x_j - x_i
    r2 = np.einsum("ijk,ijk->ij", d, d)
    return d, r2


def accelerations(positions, masses, G: float) -> np.ndarray:
    """Pairwise Newtonian accelerations, a_i = sum_j G m_j (x_j - x_i)/|x_j - x_i|**3."""
    x = np.asarray(positions, dtype=float)
    m = np.asarray(masses, dtype=float)
    d, r2 = _pair_geometry(x)
    np.fill_diagonal(r2, np.inf)
    if np.any(r2 == 0):
        i, j = np.argwhere(r2 == 0)[0]
        raise DegenerateInputError(f"bodies {i + 1} and {j + 1} coincide")
    inv3 = r2 ** -1.5
    return G * np.einsum("ij,ijk->ik", inv3 * m[None, :], d)


def invariants(positions, velocities, masses, G: float) -> ConservedQuantities:
    x = np.asarray(positions, dtype=float)
    v = np.asarray(velocities, dtype=float)
    m = np.asarray(masses, dtype=float)
    kinetic = 0.5 * float(np.sum(m * np.einsum("ik,ik->i", v, v)))
    potential = 0.0
    n = len(m)
    for i in range(n):
        for j in range(i + 1, n):
            r = math.hypot(*(x[j] - x[i]))
            if r == 0:
                raise DegenerateInputError(f"bodies {i + 1} and {j + 1} coincide")
            potential -= G * m[i] * m[j] / r
    p = m @ v
    L = float(np.sum(m * (x[:, 0] * v[:, 1] - x[:, 1] * v[:, 0])))
    return ConservedQuantities(kinetic + potential, (float(p[0]), float(p[1])), L)


def integrate(
    cfg: SystemConfig, t_end: float, step: float, encounter_radius: float | None = None
) -> OracleSeries:
    """RK4 from ``cfg.t0`` to ``t_end`` with fixed ``step``; the last step is shortened.

    Aborts with :class:`OracleAbort` when two bodies come closer than
    ``encounter_radius`` (default: 1e-6 of the smallest initial separation)
    or the state stops being finite.  No softening is applied.
    """
    if not step > 0:
        raise ConfigError(f"step must be positive, got {step!r}")
    t0 = cfg.t0
    if t_end < t0:
        raise ConfigError(f"t_end {t_end!r} precedes the epoch {t0!r}")
    m = np.array(cfg.masses)
    G = cfg.G
    x = np.array([b.position for b in cfg.bodies], dtype=float)
    v = np.array([b.velocity for b in cfg.bodies], dtype=float)
    if encounter_radius is None:
        _, r2 = _pair_geometry(x)
        np.fill_diagonal(r2, np.inf)
        encounter_radius = 1e-6 * math.sqrt(r2.min())
    enc2 = encounter_radius ** 2

    span = t_end - t0
    if span == 0:
        times = np.array([t0])
    else:
        # a remainder within 1e-9 of a step boundary is absorbed, not taken as a sliver step
        n = max(1, math.ceil(span / step - 1e-9))
        times = np.append(t0 + step * np.arange(n), t_end)

    def acc(pos, t):
        d, r2 = _pair_geometry(pos)
        np.fill_diagonal(r2, np.inf)
        if r2.min() < enc2 or not np.all(np.isfinite(pos)):
            i, j = np.unravel_index(np.argmin(r2), r2.shape)
            raise OracleAbort(
                f"close encounter between bodies {i + 1} and {j + 1} at t={t:.6g}", time=t
            )
        return G * np.einsum("ij,ijk->ik", r2 ** -1.5 * m[None, :], d)

    xs = np.empty((len(times), len(m), 2))
    vs = np.empty_like(xs)
    xs[0], vs[0] = x, v
    a = acc(x, t0)
    for i in range(1, len(times)):
        t = times[i - 1]
        dt = times[i] - t
        k1x, k1v = v, a
        k2x, k2v = v + 0.5 * dt * k1v, acc(x + 0.5 * dt * k1x, t + 0.5 * dt)
        k3x, k3v = v + 0.5 * dt * k2v, acc(x + 0.5 * dt * k2x, t + 0.5 * dt)
        k4x, k4v = v + dt * k3v, acc(x + dt * k3x, t + dt)
        x = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        _check_swept(xs[i - 1], x, enc2, times[i])
        a = acc(x, times[i])
        xs[i], vs[i] = x, v
    return OracleSeries(times, xs, vs, m, G, step)


def _check_swept(before: np.ndarray, after: np.ndarray, enc2: float, t: float) -> None:
    """Closest approach of each pair along the straight path between two steps.

    Catches fixed steps that carry two bodies through each other without any
    stage landing inside the encounter radius.
    """
    d0, _ = _pair_geometry(before)
    d1, _ = _pair_geometry(after)
    dd = d1 - d0
    den = np.einsum("ijk,ijk->ij", dd, dd)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.clip(-np.einsum("ijk,ijk->ij", d0, dd) / den, 0.0, 1.0)
    s = np.where(den > 0, s, 0.0)
    closest = d0 + s[..., None] * dd
    r2 = np.einsum("ijk,ijk->ij", closest, closest)
    np.fill_diagonal(r2, np.inf)
    if r2.min() < enc2:
        i, j = np.unravel_index(np.argmin(r2), r2.shape)
        raise OracleAbort(
            f"close encounter between bodies {i + 1} and {j + 1} at t={t:.6g}", time=t
        )


def drift(series: OracleSeries) -> dict[str, float]:
    """Largest deviation of each conserved quantity from its initial value.

    Energy and angular momentum drifts are relative to their initial
    magnitude; momentum drift is absolute, scaled by sum(m |v|) at the epoch
    since the total momentum is often zero.
    """
    q = [invariants(series.positions[i], series.velocities[i], series.masses, series.G)
         for i in range(len(series))]
    e0, l0, p0 = q[0].energy, q[0].angular_momentum, np.array(q[0].momentum)
    pscale = float(np.sum(series.masses * np.linalg.norm(series.velocities[0], axis=1)))
    return {
        "energy": float(max(abs(c.energy - e0) for c in q) / abs(e0)) if e0 else math.nan,
        "angular_momentum": max(abs(c.angular_momentum - l0) for c in q) / abs(l0) if l0 else math.nan,
        "momentum": max(float(np.linalg.norm(np.array(c.momentum) - p0)) for c in q) / pscale
        if pscale else math.nan,
    }


def interpolate_positions(series: OracleSeries, t) -> np.ndarray:
    """Cubic Hermite interpolation of positions at times ``t``, shape (len(t), N, 2)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if len(series) < 2:
        if np.all(t == series.times[0]):
            return np.repeat(series.positions[:1], len(t), 0)
        raise ConfigError("oracle series has a single sample")
    steps, n = series.positions.shape[:2]
    spline = CubicHermiteSpline(series.times, series.positions.reshape(steps, 2 * n),
                                series.velocities.reshape(steps, 2 * n))
    return spline(t).reshape(len(t), n, 2)


def collinearity_defects(positions: np.ndarray, masses: np.ndarray) -> np.ndarray:
    """|angle(x_Mk) - angle(x_k) - pi| wrapped to [0, pi] for each time and body."""
    total = np.einsum("n,tnk->tk", masses, positions)
    M = masses.sum() - masses
    agg = (total[:, None, :] - masses[None, :, None] * positions) / M[None, :, None]
    ang_k = np.arctan2(positions[..., 1], positions[..., 0])
    ang_m = np.arctan2(agg[..., 1], agg[..., 0])
    return np.abs(np.angle(np.exp(1j * (ang_m - ang_k - np.pi))))


def compare(approx: Sequence[TrajectorySeries], oracle: OracleSeries) -> ErrorReport:
    """Planar deviation of each approximate series from the oracle."""
    if not approx:
        raise ConfigError("no approximate series to compare")
    lo, hi = oracle.times[0], oracle.times[-1]
    tol = 1e-12 * max(1.0, abs(hi))
    per_body = []
    flags = {}
    defect_max = 0.0
    for s in approx:
        if s is None or len(s) == 0:
            raise ConfigError("empty approximate series")
        if s.mode != BY_TIME:
            raise ConfigError(f"body {s.body_index + 1}: comparison needs a by-time series")
        if s.t.min() < lo - tol or s.t.max() > hi + tol:
            raise ConfigError(
                f"body {s.body_index + 1}: time grid [{s.t.min():.6g}, {s.t.max():.6g}] "
                f"outside oracle span [{lo:.6g}, {hi:.6g}]"
            )
        pos = interpolate_positions(oracle, np.clip(s.t, lo, hi))
        dev = np.linalg.norm(s.points - pos[:, s.body_index, :], axis=1)
        per_body.append((float(dev.max()), float(np.sqrt(np.mean(dev ** 2)))))
        defects = collinearity_defects(pos, oracle.masses)[:, s.body_index]
        defect_max = max(defect_max, float(defects.max()))
        flags[s.body_index + 1] = {
            "rate_warning": bool(s.rate_warning),
            "epoch_collinearity_warning": bool(s.collinearity_defect > COLLINEARITY_WARN),
            "breakdown": bool(s.breakdown_angles),
        }
    return ErrorReport(
        per_body=tuple(per_body),
        max_overall=max(b[0] for b in per_body),
        collinearity_defect_max=defect_max,
        validity_flags=flags,
    )
