import math

import numpy as np
import pytest

from sloshpulse.engine import (
    CAUSE_PROXIMITY,
    CAUSE_VERTICAL,
    EngineState,
    TriggerConfig,
    cog_acceleration,
    proximity_triggers,
    run_engine,
    schedule,
    vertical_shake_detect,
)
from sloshpulse.errors import ConfigurationError, InputError
from sloshpulse.fluid import CoGSample
from sloshpulse.vessel import builtin_profile, layout_actuators

DT = 1.0 / 90.0


def samples_from_z(zs, dt=DT):
    return [CoGSample(t=k * dt, cog=np.array([0.0, 0.0, z])) for k, z in enumerate(zs)]


def samples_from_xyz(points, dt=DT):
    return [CoGSample(t=k * dt, cog=np.asarray(p, dtype=float)) for k, p in enumerate(points)]


@pytest.fixture(scope="module")
def layout():
    return layout_actuators(builtin_profile("beaker"), 8, anchor_height=0.020)


class TestCogAcceleration:
    def test_constant(self):
        hist = samples_from_xyz([(0.01, 0, 0.02)] * 3)
        assert cog_acceleration(hist, DT) == 0.0

    def test_linear(self):
        hist = samples_from_xyz([(0.00, 0, 0), (0.01, 0, 0), (0.02, 0, 0)])
        assert cog_acceleration(hist, DT) == pytest.approx(0.0, abs=1e-15)

    def test_hand_value(self):
        hist = samples_from_xyz([(0.0, 0, 0), (0.001, 0, 0), (0.004, 0, 0)])
        assert cog_acceleration(hist, DT) == pytest.approx(0.002)

    def test_wrong_count(self):
        with pytest.raises(InputError):
            cog_acceleration(samples_from_z([0, 0]), DT)

    def test_mismatched_timestamps(self):
        hist = samples_from_z([0, 0, 0])
        hist[2] = CoGSample(t=hist[2].t + 0.01, cog=hist[2].cog)
        with pytest.raises(InputError):
            cog_acceleration(hist, DT)


class TestProximityTriggers:
    def test_single_hit(self, layout):
        cfg = TriggerConfig()
        anchor = layout.anchor_positions[3]
        cog = anchor + np.array([0.005, 0, 0])
        assert proximity_triggers(cog, 1e-3, layout, cfg) == {3}

    def test_zero_accel_no_trigger(self, layout):
        cfg = TriggerConfig()
        assert proximity_triggers(layout.anchor_positions[3], 0.0, layout, cfg) == set()

    def test_threshold_equality_no_trigger(self, layout):
        cfg = TriggerConfig(accel_threshold=1e-5)
        assert proximity_triggers(layout.anchor_positions[0], 1e-5, layout, cfg) == set()

    def test_distance_equality_no_trigger(self, layout):
        cfg = TriggerConfig(distance_threshold=0.01)
        cog = layout.anchor_positions[2] + np.array([0.01, 0, 0])
        assert 2 not in proximity_triggers(cog, 1.0, layout, cfg)

    def test_equidistant_pair(self):
        # narrow vessel so adjacent anchors sit < 2 cm apart
        prof = builtin_profile("beaker")
        narrow = type(prof)(name="vial", height=0.1, knots=((0.0, 0.0124), (0.1, 0.0124)))
        tight = layout_actuators(narrow, 8, ring_height=0.05, anchor_height=0.02)
        cfg = TriggerConfig()
        a2, a3 = tight.anchor_positions[2], tight.anchor_positions[3]
        cog = (a2 + a3) / 2
        d2 = np.linalg.norm(cog - a2)
        d3 = np.linalg.norm(cog - a3)
        assert d2 == pytest.approx(d3)
        assert d2 < 0.01
        others = np.linalg.norm(tight.anchor_positions - cog, axis=1)
        assert np.sort(others)[2] > 0.01  # only the pair is in range
        assert proximity_triggers(cog, 1.0, tight, cfg) == {2, 3}


class TestVerticalShakeDetect:
    def test_full_cycle_fires_on_down_crossing(self):
        cfg = TriggerConfig()
        state = EngineState(motor_count=8)
        fill = 0.10
        zs = [0.01, 0.05, 0.09, 0.09, 0.05, 0.01]
        fired = [vertical_shake_detect(state, s, fill, cfg) for s in samples_from_z(zs)]
        assert fired == [False, False, False, False, False, True]

    def test_monotone_rise_never_fires(self):
        cfg = TriggerConfig()
        state = EngineState(motor_count=8)
        for s in samples_from_z(np.linspace(0.0, 0.095, 40)):
            assert not vertical_shake_detect(state, s, 0.10, cfg)

    def test_window_expiry(self):
        cfg = TriggerConfig(vertical_window=1.0)
        state = EngineState(motor_count=8)
        fill = 0.10
        up = CoGSample(t=0.0, cog=np.array([0, 0, 0.09]))
        assert not vertical_shake_detect(state, up, fill, cfg)
        down_late = CoGSample(t=2.0, cog=np.array([0, 0, 0.01]))
        assert not vertical_shake_detect(state, down_late, fill, cfg)

    def test_rearm_after_detection(self):
        cfg = TriggerConfig()
        state = EngineState(motor_count=8)
        fill = 0.10
        zs = [0.09, 0.01, 0.09, 0.01]
        fired = [
            vertical_shake_detect(state, CoGSample(t=k * 0.1, cog=np.array([0, 0, z])), fill, cfg)
            for k, z in enumerate(zs)
        ]
        assert fired == [False, True, False, True]

    def test_bad_fill_height(self):
        cfg = TriggerConfig()
        state = EngineState(motor_count=8)
        with pytest.raises(InputError):
            vertical_shake_detect(state, CoGSample(t=0, cog=np.zeros(3)), 0.0, cfg)


class TestSchedule:
    def test_single_idle_motor(self):
        cfg = TriggerConfig()
        state = EngineState(motor_count=8)
        cmds = schedule(1.5, {3}, CAUSE_PROXIMITY, state, cfg)
        assert len(cmds) == 1
        c = cmds[0]
        assert (c.t_start, c.motor, c.duration_ms, c.strength, c.cause) == (
            1.5,
            3,
            80.0,
            255,
            CAUSE_PROXIMITY,
        )

    def test_ignore_while_active(self):
        cfg = TriggerConfig()
        state = EngineState(motor_count=8)
        schedule(1.0, {3}, CAUSE_PROXIMITY, state, cfg)
        again = schedule(1.010, {3}, CAUSE_PROXIMITY, state, cfg)
        assert again == []
        after = schedule(1.081, {3}, CAUSE_PROXIMITY, state, cfg)
        assert len(after) == 1

    def test_vertical_skips_active(self):
        cfg = TriggerConfig()
        state = EngineState(motor_count=8)
        schedule(0.0, {1, 5}, CAUSE_PROXIMITY, state, cfg)
        burst = schedule(0.01, range(8), CAUSE_VERTICAL, state, cfg)
        assert len(burst) == 6
        assert {c.motor for c in burst} == {0, 2, 3, 4, 6, 7}
        assert len({c.t_start for c in burst}) == 1


class TestRunEngine:
    def test_stationary_trace_empty(self, layout):
        cfg = TriggerConfig()
        trace = samples_from_xyz([(0, 0, 0.02)] * 100)
        assert run_engine(trace, layout, cfg, 0.08) == []

    def test_engineered_single_hit(self, layout):
        cfg = TriggerConfig()
        anchor = layout.anchor_positions[0]
        near = anchor - np.array([0.005, 0, 0])
        far = near - np.array([0.05, 0, 0])
        # jump to the anchor on the last step: huge second difference, one hit
        trace = samples_from_xyz([far, far, far, near])
        cmds = run_engine(trace, layout, cfg, 0.08)
        assert len(cmds) == 1
        assert cmds[0].motor == 0
        assert cmds[0].cause == CAUSE_PROXIMITY

    def test_no_pulse_below_accel_threshold(self, layout):
        cfg = TriggerConfig(accel_threshold=1.0)
        anchor = layout.anchor_positions[0]
        near = anchor - np.array([0.005, 0, 0])
        far = near - np.array([0.05, 0, 0])
        trace = samples_from_xyz([far, far, far, near])
        assert run_engine(trace, layout, cfg, 0.08) == []

    def test_replay_identical(self, layout):
        cfg = TriggerConfig()
        rng = np.random.default_rng(2)
        pts = layout.anchor_positions[1] + rng.uniform(-0.02, 0.02, size=(200, 3))
        trace = samples_from_xyz(pts)
        assert run_engine(trace, layout, cfg, 0.08) == run_engine(trace, layout, cfg, 0.08)

    def test_output_sorted(self, layout):
        cfg = TriggerConfig()
        rng = np.random.default_rng(4)
        pts = rng.uniform(-0.05, 0.05, size=(300, 3)) + np.array([0, 0, 0.03])
        trace = samples_from_xyz(pts)
        cmds = run_engine(trace, layout, cfg, 0.08)
        keys = [(c.t_start, c.motor) for c in cmds]
        assert keys == sorted(keys)

    def test_no_same_motor_overlap(self, layout):
        cfg = TriggerConfig()
        rng = np.random.default_rng(4)
        pts = rng.uniform(-0.05, 0.05, size=(400, 3)) + np.array([0, 0, 0.03])
        cmds = run_engine(samples_from_xyz(pts), layout, cfg, 0.08)
        by_motor = {}
        for c in cmds:
            by_motor.setdefault(c.motor, []).append(c)
        for cs in by_motor.values():
            for a, b in zip(cs, cs[1:]):
                assert b.t_start >= a.t_start + a.duration_ms / 1000.0 - 1e-12

    def test_rotational_equivariance(self, layout):
        cfg = TriggerConfig()
        rng = np.random.default_rng(9)
        pts = layout.anchor_positions[0] + rng.uniform(-0.015, 0.015, size=(150, 3))
        trace = samples_from_xyz(pts)
        theta = 2 * math.pi / layout.motor_count
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
        rotated = samples_from_xyz(pts @ rot.T)
        base = run_engine(trace, layout, cfg, 0.08)
        moved = run_engine(rotated, layout, cfg, 0.08)
        expected = [
            (c.t_start, (c.motor + 1) % layout.motor_count if c.cause == CAUSE_PROXIMITY else c.motor, c.cause)
            for c in base
        ]
        got = [(c.t_start, c.motor, c.cause) for c in moved]
        assert sorted(got) == sorted(expected)


class TestTriggerConfigValidation:
    def test_bad_distance(self):
        with pytest.raises(ConfigurationError):
            TriggerConfig(distance_threshold=0.0)

    def test_bad_bands(self):
        with pytest.raises(ConfigurationError):
            TriggerConfig(vertical_low_frac=0.8, vertical_high_frac=0.75)

    def test_bad_strength(self):
        with pytest.raises(ConfigurationError):
            TriggerConfig(pulse_strength=300)
