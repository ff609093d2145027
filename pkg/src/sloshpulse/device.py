"""Host-to-controller wire protocol, firmware emulator, and motor power model.

Frame layout (6 bytes): sync 0xAA | motor 0-7 | strength 0-255 |
duration_ms u16 little-endian | checksum = XOR(motor, strength, dur_lo, dur_hi).
The decoder resynchronizes by scanning forward for the sync byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sloshpulse.errors import FormatError, InputError

SYNC = 0xAA
FRAME_LEN = 6
MAX_MOTORS = 8


class ChecksumError(FormatError):
    pass


class NeedMoreData(Exception):
    """Byte buffer does not yet hold a complete frame."""


@dataclass(frozen=True)
class Frame:
    """Wire-visible pulse fields. Host-side timing/cause never cross the wire."""

    motor: int
    strength: int
    duration_ms: int


@dataclass(frozen=True)
class MotorModel:
    resistance: float = 15.2  # ohm
    rated_voltage: float = 5.0  # V
    rated_frequency: float = 200.0  # Hz
    rated_current: float = 0.085  # A
    max_amplitude: float = 1.2  # g


def frame_of(cmd) -> Frame:
    """Project an engine PulseCommand (or a Frame) onto its wire fields."""
    if isinstance(cmd, Frame):
        return cmd
    return Frame(motor=cmd.motor, strength=cmd.strength, duration_ms=int(round(cmd.duration_ms)))


def encode(cmd) -> bytes:
    f = frame_of(cmd)
    if not 0 <= f.motor < MAX_MOTORS:
        raise InputError(f"motor {f.motor} outside 0..{MAX_MOTORS - 1}")
    if not 0 <= f.strength <= 255:
        raise InputError(f"strength {f.strength} outside 0..255")
    if not 0 <= f.duration_ms <= 0xFFFF:
        raise InputError(f"duration {f.duration_ms} ms outside 0..65535")
    lo, hi = f.duration_ms & 0xFF, (f.duration_ms >> 8) & 0xFF
    checksum = f.motor ^ f.strength ^ lo ^ hi
    return bytes([SYNC, f.motor, f.strength, lo, hi, checksum])


def decode(buf) -> Frame:
    """Decode the first frame in buf, skipping garbage before the sync byte."""
    frame, _ = decode_stream(bytes(buf))
    return frame


def decode_stream(buf: bytes):
    """Decode one frame, returning (frame, bytes_consumed).

    Raises NeedMoreData if no complete frame is available, ChecksumError or
    FormatError for a corrupt frame (consumption restarts after its sync byte).
    """
    start = buf.find(bytes([SYNC]))
    if start < 0:
        raise NeedMoreData
    if len(buf) - start < FRAME_LEN:
        raise NeedMoreData
    sync, motor, strength, lo, hi, checksum = buf[start : start + FRAME_LEN]
    consumed = start + FRAME_LEN
    if checksum != (motor ^ strength ^ lo ^ hi):
        raise ChecksumError("frame checksum mismatch", offset=start)
    if motor >= MAX_MOTORS:
        raise FormatError(f"motor index {motor} out of range", offset=start)
    return Frame(motor=motor, strength=strength, duration_ms=lo | (hi << 8)), consumed


def power_draw(strength: int, model: MotorModel = MotorModel()):
    """PWM duty-cycle drive of a resistive motor.

    Returns (effective_voltage, average_power): V_eff = duty * V_rated,
    P_avg = duty * V_rated^2 / R (the supply sees full voltage during on-time).
    """
    if not 0 <= strength <= 255:
        raise InputError(f"strength {strength} outside 0..255")
    duty = strength / 255.0
    v_eff = duty * model.rated_voltage
    p_avg = duty * model.rated_voltage**2 / model.resistance
    return v_eff, p_avg


@dataclass
class MotorState:
    active: bool = False
    strength: int = 0
    expires_at: float = 0.0  # ms


class Emulator:
    """Firmware-side state machine fed raw bytes.

    Hardware semantics: every valid frame (re)starts its motor, extending the
    expiry to now + duration even if the motor is already running. The host
    engine's ignore-while-active policy lives on the other side of the wire.
    """

    def __init__(self, model: MotorModel = MotorModel(), motor_count: int = MAX_MOTORS):
        self.model = model
        self.motor_count = motor_count
        self.motors = [MotorState() for _ in range(motor_count)]
        self.clock = 0.0  # ms
        self.fault_log = []
        self.energy_joules = 0.0
        self._buffer = b""

    def _advance_clock(self, now: float):
        now = max(now, self.clock)
        for m in self.motors:
            if m.active:
                end = min(m.expires_at, now)
                if end > self.clock:
                    _, p = power_draw(m.strength, self.model)
                    self.energy_joules += p * (end - self.clock) / 1000.0
                if now >= m.expires_at:
                    m.active = False
                    m.strength = 0
        self.clock = now

    def feed(self, data: bytes, now: float):
        """Ingest bytes at emulator time now (ms). Faults are recorded, not raised."""
        self._advance_clock(now)
        self._buffer += bytes(data)
        while True:
            try:
                frame, consumed = decode_stream(self._buffer)
            except NeedMoreData:
                break
            except FormatError as exc:
                self.fault_log.append(str(exc))
                # drop through the offending sync byte and rescan
                bad = self._buffer.find(bytes([SYNC]))
                self._buffer = self._buffer[bad + 1 :]
                continue
            self._buffer = self._buffer[consumed:]
            if frame.motor >= self.motor_count:
                self.fault_log.append(f"frame for absent motor {frame.motor}")
                continue
            m = self.motors[frame.motor]
            m.active = frame.duration_ms > 0
            m.strength = frame.strength
            m.expires_at = now + frame.duration_ms
        return self

    def state_dump(self, now: float = None) -> dict:
        if now is not None:
            self._advance_clock(now)
        return {
            "clock_ms": self.clock,
            "motors": [
                {"active": m.active, "strength": m.strength, "expires_at_ms": m.expires_at}
                for m in self.motors
            ],
            "faults": len(self.fault_log),
            "energy_joules": self.energy_joules,
        }
