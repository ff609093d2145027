"""Live session service and the device-emulator endpoint.

Message framing (the `serve` schema): each message is a 4-byte big-endian
length prefix followed by that many bytes of UTF-8 JSON. Inbound message
types: pose, config. Outbound: pulse, cog, snapshot, error. See
docs/protocol.md for field-level details.

The simulation clock is driven by inbound pose timestamps: gaps are filled
with zero-order-held poses at the fixed timestep, and silence does not
advance the simulation (unless a motion preset is active, which self-paces
against the wall clock).
"""

from __future__ import annotations

import dataclasses
import json
import math
import queue
import socket
import struct
import threading
import time

from sloshpulse.calibration import MotionSpec, generate_motion
from sloshpulse.device import Emulator
from sloshpulse.engine import (
    CAUSE_PROXIMITY,
    CAUSE_VERTICAL,
    EngineState,
    cog_acceleration,
    proximity_triggers,
    schedule,
    vertical_shake_detect,
)
from sloshpulse.errors import ConfigurationError
from sloshpulse.fluid import FluidSimulator
from sloshpulse.harness import SessionConfig
from sloshpulse.motion import PoseSample

_HEADER = struct.Struct(">I")
COG_RATE_LIMIT = 30.0  # outbound CoG samples per second, max


def send_message(sock: socket.socket, obj: dict):
    payload = json.dumps(obj, separators=(",", ":")).encode()
    sock.sendall(_HEADER.pack(len(payload)) + payload)


def recv_message(sock: socket.socket):
    """Read one framed message; None on clean EOF."""
    header = _recv_exact(sock, _HEADER.size)
    if header is None:
        return None
    (length,) = _HEADER.unpack(header)
    payload = _recv_exact(sock, length)
    if payload is None:
        return None
    return json.loads(payload.decode())


def _recv_exact(sock, n):
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return buf


class Session:
    """One live simulation session: poses in, pulses/CoG/snapshots out."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.sim = FluidSimulator(config.profile(), config.fluid)
        self.layout = config.layout()
        self.engine_state = EngineState(motor_count=config.motor_count)
        self.timestep = config.fluid.timestep
        self.poses = []  # last 3 accepted poses
        self.cogs = []  # last 3 CoG samples
        self.preset = None
        self.preset_t = 0.0
        self._cog_stride = max(1, math.ceil(1.0 / (self.timestep * COG_RATE_LIMIT)))
        self._step_count = 0

    # -- inbound ---------------------------------------------------------

    def handle_pose(self, msg):
        pose = PoseSample(
            t=float(msg["t"]),
            position=tuple(float(v) for v in msg["position"]),
            orientation=tuple(float(v) for v in msg.get("orientation", (1.0, 0.0, 0.0, 0.0))),
        )
        out = []
        if self.poses and pose.t <= self.poses[-1].t:
            return [{"type": "error", "message": f"pose time regression at t={pose.t}"}]
        # Zero-order hold: fill timestamp gaps with the held pose.
        while self.poses and pose.t - self.poses[-1].t > 1.5 * self.timestep:
            held = PoseSample(
                t=self.poses[-1].t + self.timestep,
                position=self.poses[-1].position,
                orientation=self.poses[-1].orientation,
            )
            out.extend(self._accept(held))
        out.extend(self._accept(pose))
        return out

    def handle_config(self, msg):
        patch = {k: v for k, v in msg.items() if k != "type"}
        preset = patch.pop("preset", "unchanged")
        try:
            strength = patch.pop("strength", None)
            if patch or strength is not None:
                base = _config_dict(self.config)
                if strength is not None:
                    base["trigger"]["pulse_strength"] = int(strength)
                base.update(patch)
                self.config = SessionConfig.from_dict(base)
                self.layout = self.config.layout()
                self.engine_state = EngineState(motor_count=self.config.motor_count)
            if preset != "unchanged":
                self.preset = MotionSpec(**preset) if preset else None
                self.preset_t = self.poses[-1].t if self.poses else 0.0
        except (ConfigurationError, TypeError, KeyError) as exc:
            return [{"type": "error", "message": f"rejected config patch: {exc}"}]
        return [self.snapshot()]

    def idle_tick(self):
        """Wall-clock tick with no inbound pose: advance only under a preset."""
        if self.preset is None:
            return []
        t = (self.poses[-1].t + self.timestep) if self.poses else 0.0
        dt_local = t - self.preset_t
        w = 2.0 * math.pi * self.preset.frequency
        a = self.preset.amplitude
        ph = w * dt_local + self.preset.phase
        if self.preset.kind == "sway":
            pos = (a * math.sin(ph), 0.0, 0.0)
        elif self.preset.kind == "shake":
            pos = (0.0, 0.0, a * math.sin(ph))
        else:
            pos = (a * math.cos(ph), a * math.sin(ph), 0.0)
        return self._accept(PoseSample(t=t, position=pos))

    # -- stepping --------------------------------------------------------

    def _accept(self, pose):
        self.poses.append(pose)
        if len(self.poses) > 3:
            self.poses.pop(0)
        if len(self.poses) < 3:
            return []
        sample = self.sim.advance(*self.poses)
        self.cogs.append(sample)
        if len(self.cogs) > 3:
            self.cogs.pop(0)
        out = []
        cfg = self.config.trigger
        if len(self.cogs) == 3:
            accel = cog_acceleration(self.cogs, self.timestep)
            commands = []
            if vertical_shake_detect(self.engine_state, sample, self.config.fill_height, cfg):
                commands.extend(
                    schedule(
                        sample.t,
                        range(self.layout.motor_count),
                        CAUSE_VERTICAL,
                        self.engine_state,
                        cfg,
                    )
                )
            hits = proximity_triggers(sample.cog, accel, self.layout, cfg)
            if hits:
                commands.extend(
                    schedule(sample.t, hits, CAUSE_PROXIMITY, self.engine_state, cfg)
                )
            for c in commands:
                out.append(
                    {
                        "type": "pulse",
                        "t_start": c.t_start,
                        "motor": c.motor,
                        "duration_ms": c.duration_ms,
                        "strength": c.strength,
                        "cause": c.cause,
                    }
                )
        self._step_count += 1
        if self._step_count % self._cog_stride == 0:
            x, y, z = (float(v) for v in sample.cog)
            out.append({"type": "cog", "t": sample.t, "cog": [x, y, z]})
        return out

    def snapshot(self):
        profile = self.config.profile()
        return {
            "type": "snapshot",
            "vessel": self.config.vessel,
            "profile": [[z, r] for z, r in profile.knots],
            "height": profile.height,
            "motor_count": self.config.motor_count,
            "motors": self.layout.motor_positions.tolist(),
            "anchors": self.layout.anchor_positions.tolist(),
            "strength": self.config.trigger.pulse_strength,
            "pulse_duration_ms": self.config.trigger.pulse_duration_ms,
            "fill_height": self.config.fill_height,
            "timestep": self.timestep,
            "preset": None
            if self.preset is None
            else {
                "kind": self.preset.kind,
                "amplitude": self.preset.amplitude,
                "frequency": self.preset.frequency,
                "duration": self.preset.duration,
            },
        }


def _config_dict(config: SessionConfig) -> dict:
    return dataclasses.asdict(config)


def serve(config: SessionConfig, port: int, host: str = "127.0.0.1", ready=None, stop=None):
    """Accept one interactive session; returns when the client disconnects."""
    stop = stop or threading.Event()
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as srv:
        srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        srv.bind((host, port))
        srv.listen(1)
        if ready is not None:
            ready.set()
        srv.settimeout(0.2)
        conn = None
        while conn is None and not stop.is_set():
            try:
                conn, _ = srv.accept()
            except socket.timeout:
                continue
        if conn is None:
            return
        with conn:
            _run_session(conn, config, stop)


def _run_session(conn, config, stop):
    session = Session(config)
    send_message(conn, session.snapshot())
    inbound = queue.Queue()
    eof = threading.Event()

    def reader():
        try:
            while True:
                msg = recv_message(conn)
                if msg is None:
                    break
                inbound.put(msg)
        except OSError:
            pass
        eof.set()

    threading.Thread(target=reader, daemon=True).start()
    while not stop.is_set():
        try:
            msg = inbound.get(timeout=session.timestep)
        except queue.Empty:
            if eof.is_set():
                break
            replies = session.idle_tick()
        else:
            kind = msg.get("type")
            if kind == "pose":
                replies = session.handle_pose(msg)
            elif kind == "config":
                replies = session.handle_config(msg)
            else:
                replies = [{"type": "error", "message": f"unknown message type {kind!r}"}]
        try:
            for reply in replies:
                send_message(conn, reply)
        except OSError:
            break


def emulate_device(port: int, host: str = "127.0.0.1", ready=None, stop=None, dump_interval: float = 0.5):
    """Byte-stream endpoint feeding the firmware emulator.

    Inbound: raw wire frames. Outbound (side channel on the same socket):
    length-prefixed JSON state dumps after each feed and as idle heartbeats.
    """
    stop = stop or threading.Event()
    emulator = Emulator()
    t0 = time.monotonic()
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as srv:
        srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        srv.bind((host, port))
        srv.listen(1)
        if ready is not None:
            ready.set()
        srv.settimeout(0.2)
        conn = None
        while conn is None and not stop.is_set():
            try:
                conn, _ = srv.accept()
            except socket.timeout:
                continue
        if conn is None:
            return emulator
        with conn:
            conn.settimeout(dump_interval)
            while not stop.is_set():
                now_ms = (time.monotonic() - t0) * 1000.0
                try:
                    data = conn.recv(4096)
                    if not data:
                        break
                    emulator.feed(data, now_ms)
                except socket.timeout:
                    pass
                except OSError:
                    break
                try:
                    send_message(conn, {"type": "state", **emulator.state_dump(now_ms)})
                except OSError:
                    break
    return emulator
