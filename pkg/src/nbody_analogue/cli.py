"""Command line front end.

    nbody-analogue decompose --config systemA.json --out out/ [--echo]
    nbody-analogue approx    --config systemA.json --by-angle 0:6.2832:65 --out out/
    nbody-analogue integrate --config systemA.json --period 1 --step 1e-3 --out out/
    nbody-analogue compare   --config systemA.json --period 1 --step 1e-3 --out out/
    nbody-analogue sweep     --config systemB.json --scale 0.8:1.2:9 --out out/

Exit codes: 0 ok, 2 config, 3 degenerate input, 4 unbounded orbit,
5 oracle abort, 6 numerical nonconvergence.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

from . import oracle
from .config import dump_config, load_config
from .conic import conic_constants
from .decomposition import Body, SystemConfig, build_analogue
from .errors import AnalogueError, ConfigError, ValidityWarning
from .timeangle import period
from .trajectory import BY_ANGLE, BY_TIME, SamplingSpec, approx_system, solve_body


@dataclass(frozen=True)
class RunManifest:
    """Everything that determines a run's output."""

    config: str
    subcommand: str
    out: str
    rel_tol: float = 1e-10
    tol: float = 1e-12
    sampling: SamplingSpec | None = None
    seed: int = 0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.tol > 0):
            raise ConfigError("tolerances must be positive")


def fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def parse_range(text: str) -> tuple[float, float, int]:
    try:
        start, end, count = text.split(":")
        return float(start), float(end), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:end:count, got {text!r}")


def _warn_collinearity(cfg: SystemConfig) -> None:
    for k in range(len(cfg)):
        try:
            a = build_analogue(cfg, k)
        except AnalogueError:
            continue
        if a.collinearity_defect > oracle.COLLINEARITY_WARN:
            warnings.warn(
                f"body {k + 1}: collinearity defect {a.collinearity_defect:.3g} rad at the epoch",
                ValidityWarning,
            )


def _system_period(cfg: SystemConfig) -> float:
    return max(period(solve_body(cfg, k)[2]) for k in range(len(cfg)))


def _t_end(args, cfg: SystemConfig) -> float:
    if args.t_end is not None:
        return args.t_end
    return cfg.t0 + args.period * _system_period(cfg)


# --- subcommands ---


def cmd_decompose(args, cfg: SystemConfig, manifest: RunManifest) -> int:
    if args.echo:
        print(json.dumps(dump_config(cfg), indent=2))
    header = [
        "k", "m_k", "M_k", "mu",
        "x_k0", "theta_k0", "xdot_k0", "thetadot_k0",
        "xM_k0", "thetaM_k0", "xdotM_k0", "thetadotM_k0",
        "x_o", "theta_o", "xdot_o", "thetadot_o",
        "k1", "k2", "phi", "orbit_class", "eccentricity",
        "collinearity_defect", "rate_warning",
    ]
    rows = []
    for k in range(len(cfg)):
        a = build_analogue(cfg, k)
        c = conic_constants(a)
        rows.append([
            k + 1, a.mass, a.complement_mass, a.mu,
            *dataclasses.astuple(a.body0), *dataclasses.astuple(a.aggregate0),
            *dataclasses.astuple(a.relative0),
            c.k1, c.k2, c.phi, c.orbit_class.value, c.eccentricity,
            a.collinearity_defect, a.rate_warning,
        ])
    write_csv(Path(manifest.out) / "analogues.csv", header, rows)
    return 0


def _write_series(out: Path, series) -> None:
    for s in series:
        write_csv(out / f"body_{s.body_index + 1}.csv", ["t", "theta_k", "x_k", "x", "px", "py"],
                  s.rows())
    write_csv(
        out / "summary.csv",
        ["k", "orbit_class", "eccentricity", "period", "collinearity_defect", "rate_warning",
         "breakdown_count"],
        [[s.body_index + 1, s.orbit_class.value, s.eccentricity,
          s.period if s.period is not None else math.nan, s.collinearity_defect,
          s.rate_warning, len(s.breakdown_angles)] for s in series],
    )


def cmd_approx(args, cfg: SystemConfig, manifest: RunManifest) -> int:
    series = approx_system(cfg, manifest.sampling, tol=manifest.tol, rel_tol=manifest.rel_tol)
    _write_series(Path(manifest.out), series)
    return 0


def cmd_integrate(args, cfg: SystemConfig, manifest: RunManifest) -> int:
    result = oracle.integrate(cfg, _t_end(args, cfg), args.step)
    n = len(cfg)
    header = ["t"] + [f"{c}_{i + 1}" for i in range(n) for c in ("x", "y", "vx", "vy")]
    rows = (
        [t] + [float(v) for i in range(n) for v in (*result.positions[j, i], *result.velocities[j, i])]
        for j, t in enumerate(result.times)
    )
    out = Path(manifest.out)
    write_csv(out / "oracle.csv", header, rows)
    d = oracle.drift(result)
    write_csv(out / "oracle_summary.csv", ["steps", "step", "energy_drift", "momentum_drift",
                                           "angular_momentum_drift"],
              [[len(result) - 1, args.step, d["energy"], d["momentum"], d["angular_momentum"]]])
    return 0


def _compare(cfg: SystemConfig, t_end: float, step: float, samples: int, manifest: RunManifest):
    spec = SamplingSpec(BY_TIME, cfg.t0, t_end, samples)
    series = approx_system(cfg, spec, tol=manifest.tol, rel_tol=manifest.rel_tol)
    return series, oracle.compare(series, oracle.integrate(cfg, t_end, step))


def cmd_compare(args, cfg: SystemConfig, manifest: RunManifest) -> int:
    series, report = _compare(cfg, _t_end(args, cfg), args.step, args.samples, manifest)
    out = Path(manifest.out)
    _write_series(out, series)
    write_csv(out / "errors.csv", ["k", "max_dev", "rms_dev"],
              [[k + 1, mx, rms] for k, (mx, rms) in enumerate(report.per_body)])
    write_csv(out / "error_summary.csv", ["max_dev", "collinearity_defect_max"],
              [[report.max_overall, report.collinearity_defect_max]])
    print(f"max_dev={fmt(report.max_overall)}")
    return 0


def _scaled(cfg: SystemConfig, factor: float) -> SystemConfig:
    bodies = tuple(Body(b.mass, b.position, (b.velocity[0] * factor, b.velocity[1] * factor))
                   for b in cfg.bodies)
    return SystemConfig(bodies, cfg.G, cfg.t0)


def cmd_sweep(args, cfg: SystemConfig, manifest: RunManifest) -> int:
    """Scale every velocity by each factor of the grid and record the error surface."""
    start, end, count = args.scale
    rows = []
    for i in range(count):
        factor = start + (end - start) * i / (count - 1) if count > 1 else start
        scaled = _scaled(cfg, factor)
        ecc = rate = dev = rms = defect = math.nan
        try:
            solved = [solve_body(scaled, k) for k in range(len(scaled))]
            ecc = max(c.eccentricity for _, c, _ in solved)
            rate = max(abs(a.relative0.angular_rate) for a, _, _ in solved)
            t_end = scaled.t0 + args.period * max(period(ctx) for _, _, ctx in solved)
            _, report = _compare(scaled, t_end, args.step, args.samples, manifest)
            dev, defect = report.max_overall, report.collinearity_defect_max
            rms = max(r for _, r in report.per_body)
            status = "ok"
        except AnalogueError as exc:
            status = type(exc).__name__
        rows.append([factor, ecc, rate, dev, rms, defect, status])
    write_csv(Path(manifest.out) / "sweep.csv",
              ["scale", "eccentricity_max", "thetadot_max", "max_dev", "rms_dev_max",
               "collinearity_defect_max", "status"], rows)
    return 0


COMMANDS = {
    "decompose": cmd_decompose,
    "approx": cmd_approx,
    "integrate": cmd_integrate,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbody-analogue",
        description="Approximate planar N-body trajectories from per-body two-body analogues.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON system config (or a bundled name)")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--rel-tol", type=float, default=1e-10, help="quadrature relative tolerance")
        p.add_argument("--tol", type=float, default=1e-12,
                       help="angle inversion tolerance, as a fraction of the period")
        p.add_argument("--seed", type=int, default=0)
        return p

    def horizon(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--period", type=float, default=1.0,
                       help="horizon in periods of the slowest body (default 1)")
        g.add_argument("--t-end", type=float, help="absolute end time")
        p.add_argument("--step", type=float, default=1e-3, help="RK4 step (default 1e-3)")

    p = common(sub.add_parser("decompose", help="per-body analogue table"))
    p.add_argument("--echo", action="store_true", help="print the parsed config as JSON")

    p = common(sub.add_parser("approx", help="approximate trajectories as CSV"))
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--by-angle", type=parse_range, metavar="START:END:COUNT",
                   help="angle offsets from each body's epoch angle")
    g.add_argument("--by-time", type=parse_range, metavar="START:END:COUNT")

    horizon(common(sub.add_parser("integrate", help="direct N-body integration")))

    p = common(sub.add_parser("compare", help="approximation error against the integrator"))
    horizon(p)
    p.add_argument("--samples", type=int, default=257, help="time samples per body")

    p = common(sub.add_parser("sweep", help="error over a grid of velocity scale factors"))
    horizon(p)
    p.add_argument("--samples", type=int, default=129)
    p.add_argument("--scale", type=parse_range, default=(0.8, 1.2, 5), metavar="START:END:COUNT")
    return parser


def _manifest(args) -> RunManifest:
    sampling = None
    if args.command == "approx":
        mode, rng = (BY_ANGLE, args.by_angle) if args.by_angle else (BY_TIME, args.by_time)
        sampling = SamplingSpec(mode, *rng)
    return RunManifest(
        config=args.config, subcommand=args.command, out=args.out,
        rel_tol=args.rel_tol, tol=args.tol, sampling=sampling, seed=args.seed,
    )


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ValidityWarning)
        try:
            manifest = _manifest(args)
            cfg = load_config(args.config)
            _warn_collinearity(cfg)
            status = COMMANDS[args.command](args, cfg, manifest)
        except AnalogueError as exc:
            status = exc.exit_code
            print(f"error: {exc}", file=sys.stderr)
        seen = set()
        for w in caught:
            msg = str(w.message)
            if msg not in seen:
                seen.add(msg)
                print(f"warning: {msg}", file=sys.stderr)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
