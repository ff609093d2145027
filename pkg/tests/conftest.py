import numpy as np
import pytest

from sloshpulse.acoustics import AudioClip, write_pcm
from sloshpulse.vessel import builtin_profile


@pytest.fixture(scope="session")
def beaker():
    return builtin_profile("beaker")


@pytest.fixture(scope="session")
def erlen():
    return builtin_profile("erlen")


@pytest.fixture(scope="session")
def florence():
    return builtin_profile("florence")


def make_bump_clip(span: int, lead: int = 100, tail: int = 100, sample_rate: int = 48000,
                   amplitude: float = 0.8) -> AudioClip:
    """Mono clip whose only zero crossings are at lead and lead+span.

    A half-sine bump occupies the open interval between them; everything else
    is exactly zero.
    """
    n = lead + span + tail + 1
    x = np.zeros(n)
    k = np.arange(1, span)
    x[lead + k] = amplitude * np.sin(np.pi * k / span)
    return AudioClip(sample_rate=sample_rate, samples=x[None, :])


def bump_wav_bytes(span: int, **kw) -> bytes:
    return write_pcm(make_bump_clip(span, **kw))
