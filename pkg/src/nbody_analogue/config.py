"""JSON configuration files.

Schema::

    {"G": 1.0, "t0": 0.0,
     "bodies": [{"mass": m, "position": [x, y], "velocity": [vx, vy]}, ...]}

Units are the caller's; they only have to be consistent.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .decomposition import Body, SystemConfig
from .errors import ConfigError

BUNDLED = ("systemA", "systemB", "triple")


def parse_config(data) -> SystemConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - {"G", "t0", "bodies"}
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
    bodies = data.get("bodies")
    if not isinstance(bodies, list):
        raise ConfigError("config needs a 'bodies' list")
    parsed = []
    for i, b in enumerate(bodies):
        if not isinstance(b, dict) or set(b) != {"mass", "position", "velocity"}:
            raise ConfigError(f"body {i + 1} must have exactly mass, position and velocity")
        try:
            parsed.append(Body(b["mass"], b["position"], b["velocity"]))
        except ConfigError as exc:
            raise ConfigError(f"body {i + 1}: {exc}") from None
    return SystemConfig(tuple(parsed), G=data.get("G", 1.0), t0=data.get("t0", 0.0))


def resolve(path: str | Path) -> Path:
    """Return ``path``, or the bundled config of that name if no such file exists."""
    p = Path(path)
    if p.exists():
        return p
    stem = p.name.removesuffix(".json")
    if stem in BUNDLED:
        return Path(str(resources.files("nbody_analogue") / "data" / f"{stem}.json"))
    raise ConfigError(f"cannot read config {str(path)!r}: no such file")


def load_config(path: str | Path) -> SystemConfig:
    p = resolve(path)
    try:
        data = json.loads(p.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc}") from None
    return parse_config(data)


def dump_config(cfg: SystemConfig) -> dict:
    return {
        "G": cfg.G,
        "t0": cfg.t0,
        "bodies": [
            {"mass": b.mass, "position": list(b.position), "velocity": list(b.velocity)}
            for b in cfg.bodies
        ],
    }
