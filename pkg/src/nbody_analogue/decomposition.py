"""Reduction of a planar N-body configuration to N two-body analogues.

Body ``k`` is paired with a fictitious point carrying the mass of every
other body and sitting at their mass-weighted centroid.  The pair is
frozen at the epoch; nothing here is re-aggregated later.

Body indices are zero-based in the library API; user-facing messages
and file names use one-based labels.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError, DegenerateInputError, ValidityWarning

Vec2 = tuple[float, float]

#: Angular rate (rad/s) at and above which the reduction is flagged.
ANGULAR_RATE_LIMIT = 1.0


def _vec(value, name: str) -> Vec2:
    try:
        x, y = (float(c) for c in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a pair of numbers, got {value!r}")
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return (x, y)


@dataclass(frozen=True)
class Body:
    """A gravitating point: mass, planar position and velocity."""

    mass: float
    position: Vec2
    velocity: Vec2

    def __post_init__(self):
        mass = float(self.mass)
        if not (math.isfinite(mass) and mass > 0):
            raise ConfigError(f"mass must be positive and finite, got {self.mass!r}")
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "position", _vec(self.position, "position"))
        object.__setattr__(self, "velocity", _vec(self.velocity, "velocity"))


@dataclass(frozen=True)
class SystemConfig:
    """Ordered bodies, gravitation constant ``G`` and epoch ``t0``."""

    bodies: tuple[Body, ...]
    G: float = 1.0
    t0: float = 0.0

    def __post_init__(self):
        bodies = tuple(self.bodies)
        object.__setattr__(self, "bodies", bodies)
        if len(bodies) < 2:
            raise ConfigError(f"need at least 2 bodies, got {len(bodies)}")
        G = float(self.G)
        if not (math.isfinite(G) and G > 0):
            raise ConfigError(f"G must be positive and finite, got {self.G!r}")
        object.__setattr__(self, "G", G)
        t0 = float(self.t0)
        if not math.isfinite(t0):
            raise ConfigError(f"t0 must be finite, got {self.t0!r}")
        object.__setattr__(self, "t0", t0)
        seen: dict[Vec2, int] = {}
        for i, body in enumerate(bodies):
            j = seen.setdefault(body.position, i)
            if j != i:
                raise DegenerateInputError(
                    f"bodies {j + 1} and {i + 1} coincide at {body.position}"
                )

    @property
    def masses(self) -> list[float]:
        return [b.mass for b in self.bodies]

    def __len__(self) -> int:
        return len(self.bodies)


@dataclass(frozen=True)
class PolarState:
    """Radius, angle, radial rate and angular rate of a planar point."""

    radius: float
    angle: float
    radial_rate: float
    angular_rate: float


def to_polar(position: Sequence[float], velocity: Sequence[float]) -> PolarState:
    """Convert a planar position/velocity pair to polar form.

    The angle is the principal value in (-pi, pi].
    """
    px, py = position
    vx, vy = velocity
    r = math.hypot(px, py)
    if r == 0.0:
        raise DegenerateInputError("polar form undefined at the origin")
    return PolarState(
        radius=r,
        angle=math.atan2(py, px),
        radial_rate=(px * vx + py * vy) / r,
        angular_rate=(px * vy - py * vx) / (r * r),
    )


def from_polar(state: PolarState) -> tuple[Vec2, Vec2]:
    """Inverse of :func:`to_polar`."""
    c, s = math.cos(state.angle), math.sin(state.angle)
    r, rdot, tdot = state.radius, state.radial_rate, state.angular_rate
    position = (r * c, r * s)
    velocity = (rdot * c - r * tdot * s, rdot * s + r * tdot * c)
    return position, velocity


def _check_index(cfg: SystemConfig, k: int) -> None:
    if len(cfg) < 2:
        raise ConfigError(f"need at least 2 bodies, got {len(cfg)}")
    if not 0 <= k < len(cfg):
        raise IndexError(f"body index {k} out of range for {len(cfg)} bodies")


def aggregate_complement(cfg: SystemConfig, k: int) -> tuple[float, Vec2, Vec2]:
    """Mass, centroid position and centroid velocity of every body except ``k``.

    Sums use :func:`math.fsum`, so the result does not depend on body order.
    """
    _check_index(cfg, k)
    others = [b for i, b in enumerate(cfg.bodies) if i != k]
    M = math.fsum(b.mass for b in others)
    position = tuple(math.fsum(b.mass * b.position[d] for b in others) / M for d in (0, 1))
    velocity = tuple(math.fsum(b.mass * b.velocity[d] for b in others) / M for d in (0, 1))
    return M, position, velocity


def _wrap(angle: float) -> float:
    """Wrap into (-pi, pi]."""
    w = math.remainder(angle, 2 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class TwoBodyAnalogue:
    """Frozen epoch data for the pairing of body ``index`` with its complement."""

    index: int
    mass: float
    complement_mass: float
    mu: float
    body0: PolarState
    aggregate0: PolarState
    relative0: PolarState
    t0: float
    collinearity_defect: float

    @property
    def complement_fraction(self) -> float:
        """M_k / (m_k + M_k), the share of the separation carried by body k."""
        return self.complement_mass / (self.mass + self.complement_mass)

    @property
    def body_fraction(self) -> float:
        return self.mass / (self.mass + self.complement_mass)

    @property
    def angular_momentum(self) -> float:
        """Specific angular momentum of the relative orbit, x_o**2 * thetadot_o."""
        r = self.relative0
        return r.radius * r.radius * r.angular_rate

    @property
    def rate_warning(self) -> bool:
        return abs(self.relative0.angular_rate) >= ANGULAR_RATE_LIMIT


def build_analogue(cfg: SystemConfig, k: int) -> TwoBodyAnalogue:
    """Build the two-body analogue for body ``k`` at the epoch.

    Emits :class:`ValidityWarning` when the relative angular rate reaches
    1 rad/s.  Raises :class:`DegenerateInputError` for a body or centroid
    at the origin, a zero separation, or a purely radial relative motion.
    """
    M, pos_M, vel_M = aggregate_complement(cfg, k)
    body = cfg.bodies[k]
    label = k + 1
    try:
        body0 = to_polar(body.position, body.velocity)
    except DegenerateInputError:
        raise DegenerateInputError(f"body {label} sits at the origin", body=k) from None
    try:
        aggregate0 = to_polar(pos_M, vel_M)
    except DegenerateInputError:
        raise DegenerateInputError(
            f"complement point of body {label} sits at the origin", body=k
        ) from None
    rel_pos = (pos_M[0] - body.position[0], pos_M[1] - body.position[1])
    rel_vel = (vel_M[0] - body.velocity[0], vel_M[1] - body.velocity[1])
    try:
        relative0 = to_polar(rel_pos, rel_vel)
    except DegenerateInputError:
        raise DegenerateInputError(
            f"body {label} coincides with its complement point", body=k
        ) from None
    if relative0.angular_rate == 0.0:
        raise DegenerateInputError(
            f"body {label}: degenerate radial motion (zero relative angular rate)", body=k
        )
    analogue = TwoBodyAnalogue(
        index=k,
        mass=body.mass,
        complement_mass=M,
        mu=cfg.G * (body.mass + M),
        body0=body0,
        aggregate0=aggregate0,
        relative0=relative0,
        t0=cfg.t0,
        collinearity_defect=abs(_wrap(aggregate0.angle - body0.angle - math.pi)),
    )
    if analogue.rate_warning:
        warnings.warn(
            f"body {label}: relative angular rate {relative0.angular_rate:.6g} rad/s "
            f"is outside the validity region (< {ANGULAR_RATE_LIMIT} rad/s)",
            ValidityWarning,
            stacklevel=2,
        )
    return analogue


def build_all(cfg: SystemConfig) -> list[TwoBodyAnalogue]:
    return [build_analogue(cfg, k) for k in range(len(cfg))]
