import pytest
from hypothesis import given, settings, strategies as st

from sloshpulse.device import (
    FRAME_LEN,
    MAX_MOTORS,
    SYNC,
    ChecksumError,
    Emulator,
    Frame,
    MotorModel,
    NeedMoreData,
    decode,
    decode_stream,
    encode,
    frame_of,
    power_draw,
)
from sloshpulse.engine import PulseCommand
from sloshpulse.errors import FormatError, InputError


class TestEncode:
    def test_worked_frame(self):
        assert encode(Frame(3, 255, 80)) == bytes.fromhex("aa03ff5000ac")

    def test_all_zero_payload(self):
        assert encode(Frame(0, 0, 0)) == bytes.fromhex("aa0000000000")

    def test_pulse_command_accepted(self):
        cmd = PulseCommand(t_start=1.0, motor=3, duration_ms=80.0, strength=255, cause="proximity")
        assert encode(cmd) == encode(Frame(3, 255, 80))

    def test_motor_out_of_range(self):
        with pytest.raises(InputError):
            encode(Frame(8, 0, 0))

    def test_duration_out_of_range(self):
        with pytest.raises(InputError):
            encode(Frame(0, 0, 65536))


class TestDecode:
    def test_worked_frame(self):
        assert decode(bytes.fromhex("aa03ff5000ac")) == Frame(3, 255, 80)

    def test_corrupt_checksum(self):
        with pytest.raises(ChecksumError):
            decode(bytes.fromhex("aa03ff5000ad"))

    def test_resync_after_garbage(self):
        buf = b"\x01\x02\x03" + encode(Frame(5, 100, 200))
        frame, consumed = decode_stream(buf)
        assert frame == Frame(5, 100, 200)
        assert consumed == len(buf)

    def test_need_more_data(self):
        with pytest.raises(NeedMoreData):
            decode_stream(encode(Frame(1, 2, 3))[:4])
        with pytest.raises(NeedMoreData):
            decode_stream(b"\x01\x02")

    def test_round_trip_exhaustive(self):
        for motor in range(MAX_MOTORS):
            for strength in (0, 150, 200, 255):
                for duration in (0, 80, 65535):
                    f = Frame(motor, strength, duration)
                    assert decode(encode(f)) == f

    def test_single_byte_corruptions_detected(self):
        frame = encode(Frame(3, 255, 80))
        for pos in range(FRAME_LEN):
            for val in range(256):
                if val == frame[pos]:
                    continue
                corrupted = bytearray(frame)
                corrupted[pos] = val
                try:
                    got, _ = decode_stream(bytes(corrupted))
                except (ChecksumError, FormatError, NeedMoreData):
                    continue
                # a corruption that still decodes must not masquerade as the
                # original frame (sync-byte corruption just loses the frame)
                assert got != Frame(3, 255, 80) or pos == 0

    @given(
        st.integers(0, MAX_MOTORS - 1), st.integers(0, 255), st.integers(0, 0xFFFF)
    )
    def test_round_trip_property(self, motor, strength, duration):
        f = Frame(motor, strength, duration)
        assert decode(encode(f)) == f

    def test_frame_of_rounds_duration(self):
        cmd = PulseCommand(t_start=0, motor=1, duration_ms=79.6, strength=10, cause="vertical")
        assert frame_of(cmd).duration_ms == 80


class TestPowerDraw:
    def test_full_strength(self):
        v, p = power_draw(255)
        assert v == pytest.approx(5.0)
        assert p == pytest.approx(1.645, rel=0.01)

    def test_strength_150(self):
        v, p = power_draw(150)
        assert v == pytest.approx(2.94, abs=0.005)
        assert p == pytest.approx(150 / 255 * 5.0**2 / 15.2, rel=1e-9)

    def test_zero(self):
        assert power_draw(0) == (0.0, 0.0)

    def test_out_of_range(self):
        with pytest.raises(InputError):
            power_draw(256)

    def test_eight_motor_total(self):
        _, p = power_draw(255)
        assert 8 * p == pytest.approx(8 * 1.645, rel=0.01)

    def test_model_defaults(self):
        m = MotorModel()
        assert (m.resistance, m.rated_voltage, m.rated_frequency) == (15.2, 5.0, 200.0)
        assert (m.rated_current, m.max_amplitude) == (0.085, 1.2)


class TestEmulator:
    def test_activation_and_expiry(self):
        emu = Emulator()
        emu.feed(encode(Frame(2, 255, 80)), now=1000.0)
        assert emu.motors[2].active
        assert emu.motors[2].expires_at == 1080.0
        emu.feed(b"", now=1079.0)
        assert emu.motors[2].active
        emu.feed(b"", now=1080.0)
        assert not emu.motors[2].active

    def test_retrigger_extends_expiry(self):
        # hardware semantics diverge from the host scheduler on purpose:
        # every frame restarts the motor clock
        emu = Emulator()
        emu.feed(encode(Frame(2, 255, 80)), now=0.0)
        emu.feed(encode(Frame(2, 255, 80)), now=10.0)
        assert emu.motors[2].expires_at == 90.0

    def test_corrupt_frame_logged_and_stream_recovers(self):
        emu = Emulator()
        bad = bytearray(encode(Frame(1, 50, 80)))
        bad[5] ^= 0xFF
        emu.feed(bytes(bad) + encode(Frame(4, 60, 70)), now=0.0)
        assert len(emu.fault_log) == 1
        assert emu.motors[4].active
        assert not emu.motors[1].active

    def test_split_feed(self):
        emu = Emulator()
        data = encode(Frame(6, 10, 500))
        emu.feed(data[:3], now=0.0)
        assert not emu.motors[6].active
        emu.feed(data[3:], now=1.0)
        assert emu.motors[6].active

    def test_energy_accumulation(self):
        emu = Emulator()
        emu.feed(encode(Frame(0, 255, 1000)), now=0.0)
        emu.feed(b"", now=1000.0)
        _, p = power_draw(255)
        assert emu.energy_joules == pytest.approx(p * 1.0, rel=1e-9)

    def test_state_dump_shape(self):
        emu = Emulator()
        emu.feed(encode(Frame(1, 20, 30)), now=5.0)
        dump = emu.state_dump()
        assert dump["faults"] == 0
        assert len(dump["motors"]) == MAX_MOTORS
        assert dump["motors"][1]["active"]

    def test_zero_duration_no_activation(self):
        emu = Emulator()
        emu.feed(encode(Frame(3, 100, 0)), now=0.0)
        assert not emu.motors[3].active

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(
            st.tuples(
                st.integers(0, MAX_MOTORS - 1),
                st.integers(0, 255),
                st.integers(0, 500),
                st.floats(min_value=0, max_value=50),
            ),
            max_size=20,
        )
    )
    def test_never_active_past_expiry(self, events):
        emu = Emulator()
        now = 0.0
        for motor, strength, duration, gap in events:
            now += gap
            emu.feed(encode(Frame(motor, strength, duration)), now=now)
            for m in emu.motors:
                assert not m.active or m.expires_at > now
        emu.feed(b"", now=now + 501.0)
        assert not any(m.active for m in emu.motors)
