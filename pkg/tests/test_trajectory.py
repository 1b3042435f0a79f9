import math
import warnings

import numpy as np
import pytest

from nbody_analogue.conic import OrbitClass
from nbody_analogue.decomposition import Body, SystemConfig
from nbody_analogue.errors import ConfigError, DegenerateInputError, UnboundedOrbitError, ValidityWarning
from nbody_analogue.oracle import integrate, interpolate_positions
from nbody_analogue.timeangle import period, time_of_angle
from nbody_analogue.trajectory import (
    BY_ANGLE,
    BY_TIME,
    SamplingSpec,
    approx_system,
    radial_body,
    radial_complement,
    sample,
    solve_body,
)

from .conftest import SQRT_125, pair, random_barycentric, two_body

TWO_PI = 2 * math.pi


def test_system_a_radii_constant(system_a):
    a, c, ctx = solve_body(system_a, 0)
    for th in np.linspace(-3, 9, 25):
        assert radial_body(a, c, ctx, th) == pytest.approx(0.5, rel=1e-12)
        assert radial_complement(a, c, ctx, th) == pytest.approx(0.5, rel=1e-12)


def test_epoch_recovery():
    cfg = two_body(0.4, 1.2, -0.3, masses=(0.7, 0.2))
    a, c, ctx = solve_body(cfg, 0)
    assert radial_body(a, c, ctx, c.theta_k0) == a.body0.radius
    assert radial_complement(a, c, ctx, c.theta_k0) == a.aggregate0.radius


def test_epoch_recovery_with_nonzero_epoch_time():
    base = two_body(0.4, 1.2, -0.3, masses=(0.7, 0.2))
    cfg = SystemConfig(base.bodies, base.G, t0=12.5)
    a, c, ctx = solve_body(cfg, 1)
    assert radial_body(a, c, ctx, c.theta_k0) == pytest.approx(a.body0.radius, rel=1e-14)


def test_system_b_half_turn(system_b):
    a, c, ctx = solve_body(system_b, 0)
    # equal masses: xdot_k0 = xdot_o * M/(m+M), the time term drops out
    assert radial_body(a, c, ctx, c.theta_k0 + math.pi) == pytest.approx(0.5 * 0.5625, rel=1e-14)


def test_system_b_half_turn_matches_oracle(system_b):
    a, c, ctx = solve_body(system_b, 0)
    t_half = period(ctx) / 2
    run = integrate(system_b, t_half, 1e-3)
    assert np.linalg.norm(run.positions[-1, 0]) == pytest.approx(0.28125, rel=1e-9)


@pytest.mark.parametrize("seed", range(30))
def test_pair_identity_random_barycentric(seed):
    rng = np.random.default_rng(seed)
    cfg = random_barycentric(rng)
    for k in range(len(cfg)):
        try:
            a, c, ctx = solve_body(cfg, k)
        except DegenerateInputError:
            continue
        if not c.orbit_class.bounded:
            continue
        for th in c.theta_k0 + ctx.direction * rng.uniform(0, 2 * TWO_PI, 5):
            x = 1 / (c.k1 * math.cos(th - c.phi) + c.k2)
            total = radial_body(a, c, ctx, th) + radial_complement(a, c, ctx, th)
            assert total == pytest.approx(x, rel=1e-12)


def test_pair_identity_absolute_rounding_bound():
    # near-radial plunges put periapsis many decades below the epoch radii; the
    # identity then holds to rounding of the O(1) terms, not relative to x
    rng = np.random.default_rng(55)
    eps = np.finfo(float).eps
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        for _ in range(400):
            cfg = random_barycentric(rng)
            k = int(rng.integers(len(cfg)))
            try:
                a, c, ctx = solve_body(cfg, k)
            except DegenerateInputError:
                continue
            if not c.orbit_class.bounded:
                continue
            th = c.theta_k0 + ctx.direction * rng.uniform(0, 2 * TWO_PI)
            t = time_of_angle(ctx, th)
            x = 1 / (c.k1 * math.cos(th - c.phi) + c.k2)
            states = (a.body0, a.aggregate0, a.relative0)
            scale = sum(s.radius for s in states) + sum(abs(s.radial_rate) for s in states) * abs(t) + x
            total = radial_body(a, c, ctx, th) + radial_complement(a, c, ctx, th)
            worst = max(worst, abs(total - x) / (eps * scale))
    assert worst <= 8


def test_sample_by_angle_circular(system_a):
    a, c, ctx = solve_body(system_a, 0)
    s = sample(a, c, ctx, SamplingSpec(BY_ANGLE, 0, TWO_PI, 5))
    P = period(ctx)
    assert len(s) == 5
    assert np.allclose(s.x_k, 0.5, rtol=1e-12)
    assert np.allclose(s.t, [0, P / 4, P / 2, 3 * P / 4, P], rtol=1e-12, atol=1e-12)
    assert s.t[0] == 0 and s.theta_k[0] == c.theta_k0
    assert np.allclose(s.points, np.column_stack((0.5 * np.cos(s.theta_k), 0.5 * np.sin(s.theta_k))))


def test_sample_two_points_starts_at_epoch(system_b):
    a, c, ctx = solve_body(system_b, 1)
    s = sample(a, c, ctx, SamplingSpec(BY_ANGLE, 0.0, 0.5, 2))
    assert (s.t[0], s.theta_k[0], s.x_k[0]) == (0.0, a.body0.angle, a.body0.radius)


def test_sample_by_time_system_b(system_b):
    a, c, ctx = solve_body(system_b, 0)
    P = period(ctx)
    s = sample(a, c, ctx, SamplingSpec(BY_TIME, 0, P, 9))
    assert np.array_equal(s.t, np.linspace(0, P, 9))
    steps = np.diff(s.theta_k)
    # apoapsis at the epoch, periapsis half a period later: faster in the middle
    assert steps[3] > steps[1] > steps[0]
    assert steps[4] > steps[6] > steps[7]
    assert s.theta_k[-1] == pytest.approx(c.theta_k0 + TWO_PI, abs=1e-12)
    run = integrate(system_b, P, 1e-3)
    oracle = interpolate_positions(run, s.t)[:, 0]
    assert np.max(np.linalg.norm(s.points - oracle, axis=1)) < 1e-9


def test_approx_system_mirror(system_a):
    s1, s2 = approx_system(system_a, SamplingSpec(BY_TIME, 0, 8.0, 33))
    assert np.allclose(s1.points, -s2.points, atol=1e-12)


def test_heavy_body_nearly_stationary():
    # star plus two light planets in the barycentric frame
    m = np.array([1.0, 1e-6, 1e-6])
    x = np.array([[0.0, 0.0], [1.0, 0.0], [-1.5, 0.0]])
    v = np.array([[0.0, 0.0], [0.0, 1.0], [0.0, -math.sqrt(1 / 1.5)]])
    x -= m @ x / m.sum()
    v -= m @ v / m.sum()
    cfg = SystemConfig(tuple(Body(*z) for z in zip(m, map(tuple, x), map(tuple, v))))
    star, p1, p2 = approx_system(cfg, SamplingSpec(BY_ANGLE, 0, TWO_PI, 17))
    assert np.max(np.abs(star.x_k)) < 5e-6
    assert np.max(np.linalg.norm(star.points, axis=1)) < 5e-6
    assert p1.x_k == pytest.approx(1.0, rel=1e-5)


def test_approx_system_names_failing_body():
    cfg = SystemConfig((Body(1, (1, 0), (0, 0)), Body(1, (2, 0), (0.5, 0))))
    with pytest.raises(DegenerateInputError, match="body 1"):
        approx_system(cfg, SamplingSpec(BY_ANGLE, 0, 1, 3))


def test_approx_system_partial():
    # body 3 sits at the origin; the others are fine
    cfg = SystemConfig((Body(1, (1, 0), (0, 0.4)), Body(1, (-1, 0), (0, -0.4)),
                        Body(1e-3, (0, 0), (0, 0))))
    with pytest.warns(ValidityWarning, match="body 3 skipped"):
        out = approx_system(cfg, SamplingSpec(BY_ANGLE, 0, 1, 3), partial=True)
    assert out[2] is None and out[0] is not None


@pytest.mark.parametrize("alpha", [0.0, 1.0, -2.5])
def test_circular_exactness(alpha):
    cfg = two_body(0.0, 0.0, alpha, masses=(0.3, 1.1))
    for k in range(2):
        a, c, ctx = solve_body(cfg, k)
        assert c.orbit_class is OrbitClass.CIRCULAR
        s = sample(a, c, ctx, SamplingSpec(BY_ANGLE, 0, 3 * TWO_PI, 101))
        assert np.allclose(s.x_k, a.body0.radius, rtol=1e-12, atol=0)
        sweep = (s.theta_k - c.theta_k0) * ctx.direction
        affine = sweep / abs(a.relative0.angular_rate)
        assert np.allclose(s.t, affine, rtol=1e-10, atol=1e-10 * period(ctx))


@pytest.mark.parametrize("seed", range(10))
def test_mass_fraction_envelope(seed):
    rng = np.random.default_rng(300 + seed)
    cfg = two_body(rng.uniform(0, 0.8), rng.uniform(-3, 3), rng.uniform(-3, 3),
                   masses=tuple(rng.uniform(0.1, 2, 2)))
    for k in range(2):
        a, c, ctx = solve_body(cfg, k)
        assert 0 < a.complement_fraction < 1
        s = sample(a, c, ctx, SamplingSpec(BY_TIME, 0, period(ctx), 200))
        lo = a.body0.radius - a.relative0.radius
        hi = a.body0.radius + s.x.max()
        assert np.all((s.x_k >= lo) & (s.x_k <= hi))


def test_breakdown_flagged_not_clamped():
    # whole system drifting through the origin: radii computed by the model go negative
    drift = (-2.0, 0.0)
    cfg = SystemConfig((Body(1, (1, 0), (drift[0], 0.3)), Body(1, (2, 0), (drift[0], -0.3))))
    a, c, ctx = solve_body(cfg, 0)
    with pytest.warns(ValidityWarning, match="nonpositive radius"):
        s = sample(a, c, ctx, SamplingSpec(BY_ANGLE, 0, TWO_PI, 33))
    assert s.breakdown_angles
    assert s.x_k.min() < 0
    assert s.breakdown_angles[0] in s.theta_k


def test_by_time_rejects_hyperbolic():
    a, c, ctx = solve_body(two_body(1.5, 0.2, 0.0), 0)
    with pytest.raises(UnboundedOrbitError):
        sample(a, c, ctx, SamplingSpec(BY_TIME, 0, 1, 5))
    s = sample(a, c, ctx, SamplingSpec(BY_ANGLE, 0, 1.0, 5))
    assert np.all(np.diff(s.t) > 0)
    assert s.period is None


@pytest.mark.parametrize(
    "args", [("sideways", 0, 1, 3), (BY_ANGLE, 0, 1, 1), (BY_ANGLE, 1, 1, 3), (BY_TIME, 0, math.inf, 3),
             (BY_ANGLE, 0, 1, 2.5)]
)
def test_sampling_spec_validation(args):
    with pytest.raises(ConfigError):
        SamplingSpec(*args)
