"""BPSK modulation, AWGN links and channel LLRs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import L_MAX, clamp_llr

LINKS = ("sd1", "sd2", "sr1", "sr2", "rd")


@dataclass(frozen=True, eq=False)
class ChannelParams:
    """SNRs in dB (Es/N0); one value per link class of the symmetric network."""

    snr_sd: float
    snr_sr: float
    snr_rd: float


@dataclass(frozen=True, eq=False)
class ObservationFrame:
    samples: np.ndarray
    origin: str | None = None
    absent: bool = False

    def __len__(self):
        return self.samples.size


def bpsk_modulate(bits) -> np.ndarray:
    """Map 0 -> +1.0 and 1 -> -1.0."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=float)


def add_awgn(signal, noise_var: float, rng: np.random.Generator, origin: str | None = None) -> ObservationFrame:
    """Add i.i.d. ``N(0, noise_var)`` noise. ``noise_var = inf`` yields an absent observation."""
    signal = np.asarray(signal, dtype=float)
    if noise_var < 0 or math.isnan(noise_var):
        raise ValueError("noise variance must be >= 0")
    if math.isinf(noise_var):
        return ObservationFrame(np.zeros_like(signal), origin, absent=True)
    noise = rng.standard_normal(signal.shape)
    return ObservationFrame(signal + math.sqrt(noise_var) * noise, origin)


def channel_llr(obs: ObservationFrame, noise_var: float) -> np.ndarray:
    """``L = -2 y / noise_var``, clamped; absent links and infinite variance give zeros."""
    y = np.asarray(obs.samples, dtype=float)
    if obs.absent or math.isinf(noise_var):
        return np.zeros_like(y)
    if noise_var == 0:
        return -L_MAX * np.sign(y)
    return clamp_llr(-2.0 * y / noise_var)
