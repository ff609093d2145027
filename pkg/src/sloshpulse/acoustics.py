"""Impact analysis of contact-microphone recordings.

Impact length is the span between the first and last zero crossings of the
(noise-floored) signal. Stereo clips additionally get a left/right peak
amplitude ratio that separates side-impact events from symmetric ones.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from sloshpulse.errors import FormatError, InputError


@dataclass(frozen=True)
class AudioClip:
    sample_rate: int
    samples: np.ndarray  # (channels, n) float in [-1, 1]

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    def __len__(self):
        return self.samples.shape[1]


@dataclass(frozen=True)
class ImpactMeasurement:
    duration_ms: float
    first_crossing: int
    last_crossing: int


def load_pcm(data: bytes) -> AudioClip:
    """Parse a RIFF/WAVE container holding 16-bit signed PCM, 1 or 2 channels.

    Samples are normalized to [-1, 1) by dividing by 32768.
    """
    if len(data) < 12 or data[0:4] != b"RIFF":
        raise FormatError("not a RIFF container", offset=0)
    if data[8:12] != b"WAVE":
        raise FormatError("RIFF form type is not WAVE", offset=8)
    pos = 12
    fmt = None
    pcm = None
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if chunk_id == b"fmt ":
            if size < 16:
                raise FormatError("fmt chunk too short", offset=pos)
            audio_format, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", body)
            if audio_format != 1:
                raise FormatError(f"unsupported audio format {audio_format}", offset=pos)
            if bits != 16:
                raise FormatError(f"unsupported bit depth {bits}", offset=pos)
            if channels not in (1, 2):
                raise FormatError(f"unsupported channel count {channels}", offset=pos)
            fmt = (channels, rate)
        elif chunk_id == b"data":
            if len(body) < size:
                raise FormatError("truncated data chunk", offset=pos)
            pcm = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None:
        raise FormatError("missing fmt chunk")
    if pcm is None:
        raise FormatError("missing data chunk")
    channels, rate = fmt
    raw = np.frombuffer(pcm[: len(pcm) - len(pcm) % (2 * channels)], dtype="<i2")
    samples = raw.astype(np.float64).reshape(-1, channels).T / 32768.0
    if samples.size == 0:
        samples = samples.reshape(channels, 0)
    return AudioClip(sample_rate=rate, samples=samples)


def write_pcm(clip: AudioClip) -> bytes:
    """Serialize a clip back to a canonical 16-bit PCM WAVE file."""
    ch, n = clip.samples.shape
    pcm = np.clip(np.round(clip.samples.T * 32768.0), -32768, 32767).astype("<i2").tobytes()
    byte_rate = clip.sample_rate * ch * 2
    hdr = b"RIFF" + struct.pack("<I", 36 + len(pcm)) + b"WAVE"
    hdr += b"fmt " + struct.pack("<IHHIIHH", 16, 1, ch, clip.sample_rate, byte_rate, ch * 2, 16)
    hdr += b"data" + struct.pack("<I", len(pcm))
    return hdr + pcm


def _crossing_indices(x: np.ndarray, noise_floor: float) -> np.ndarray:
    """Indices of zero crossings after flooring small samples to zero.

    A floored-to-zero sample adjacent to signal counts as a crossing point; an
    abrupt sign flip between adjacent nonzero samples is attributed to the
    first of the two.
    """
    # 1e-12 full-scale is below any representable 16-bit signal; it keeps
    # floating-point residue (e.g. sin at multiples of pi) from masking an
    # exact zero when the caller asks for noise_floor=0.
    y = np.where(np.abs(x) <= max(noise_floor, 1e-12), 0.0, x)
    s = np.sign(y)
    crossings = []
    zero = s == 0
    if zero.any():
        nb = np.zeros_like(zero)
        nb[:-1] |= ~zero[1:]
        nb[1:] |= ~zero[:-1]
        crossings.append(np.nonzero(zero & nb)[0])
    flips = np.nonzero(s[:-1] * s[1:] < 0)[0]
    crossings.append(flips)
    if not crossings:
        return np.array([], dtype=int)
    return np.unique(np.concatenate(crossings))


def impact_duration(
    clip: AudioClip, channel: int = 0, noise_floor: float = 0.01
) -> ImpactMeasurement:
    """First-to-last zero-crossing span of one channel, in milliseconds."""
    if not 0 <= channel < clip.channels:
        raise InputError(f"channel {channel} out of range for {clip.channels}-channel clip")
    if noise_floor < 0:
        raise InputError("noise_floor must be >= 0")
    idx = _crossing_indices(clip.samples[channel], noise_floor)
    if len(idx) < 2:
        return ImpactMeasurement(duration_ms=0.0, first_crossing=0, last_crossing=0)
    first, last = int(idx[0]), int(idx[-1])
    return ImpactMeasurement(
        duration_ms=(last - first) / clip.sample_rate * 1000.0,
        first_crossing=first,
        last_crossing=last,
    )


def mean_duration(measurements) -> float:
    """Arithmetic mean of measured durations, ms."""
    if not measurements:
        raise InputError("mean of an empty measurement list")
    vals = [
        m.duration_ms if isinstance(m, ImpactMeasurement) else float(m) for m in measurements
    ]
    return float(np.mean(vals))


def channel_asymmetry(clip: AudioClip, window=None, threshold: float = 1.5):
    """Left/right peak ratio over a sample window, classified against a threshold.

    Returns (ratio, classification) where classification is "asymmetric" when
    ratio > threshold or < 1/threshold, else "symmetric".
    """
    if clip.channels != 2:
        raise InputError("channel_asymmetry needs a stereo clip")
    lo, hi = (0, len(clip)) if window is None else window
    left = np.abs(clip.samples[0, lo:hi])
    right = np.abs(clip.samples[1, lo:hi])
    peak_l = float(left.max()) if left.size else 0.0
    peak_r = float(right.max()) if right.size else 0.0
    if peak_l == 0.0 and peak_r == 0.0:
        raise InputError("both channels silent in window; ratio undefined")
    ratio = peak_l / peak_r if peak_r > 0.0 else float("inf")
    asym = ratio > threshold or ratio < 1.0 / threshold
    return ratio, ("asymmetric" if asym else "symmetric")
