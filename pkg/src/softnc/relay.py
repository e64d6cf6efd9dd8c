"""Soft network-coding relay: BCJR on both sources, permute, soft XOR, analog forward."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bcjr import bcjr_decode
from .channel import ObservationFrame, add_awgn, channel_llr
from .convcode import Trellis
from .core import Permutation, boxplus, clamp_llr, db_to_noise_variance


@dataclass(frozen=True, eq=False)
class RelayFrame:
    """Network-coded soft frame.

    ``llr`` holds the clamped soft-XOR values before power normalization;
    ``values = llr * power_scale`` is what the relay transmits.
    """

    llr: np.ndarray
    power_scale: float

    @property
    def values(self) -> np.ndarray:
        return self.llr * self.power_scale

    def __len__(self):
        return self.llr.size


def normalize_power(llr) -> tuple[np.ndarray, float]:
    """Scale to unit mean power; an all-zero frame keeps scale 1."""
    llr = np.asarray(llr, dtype=float)
    power = float(np.mean(llr * llr))
    if power == 0.0:
        return llr.copy(), 1.0
    scale = 1.0 / math.sqrt(power)
    return llr * scale, scale


def code_bit_posteriors(obs: ObservationFrame, noise_var: float, trellis: Trellis) -> np.ndarray:
    """Code-bit posterior LLRs (systematic then parity) of one source observation."""
    llr = channel_llr(obs, noise_var)
    n = llr.size // 2
    return bcjr_decode(trellis, llr[:n], llr[n:]).code_posterior


def relay_process(obs_sr1: ObservationFrame, obs_sr2: ObservationFrame, snr_sr: float,
                  perm: Permutation, trellis: Trellis) -> RelayFrame:
    n = len(obs_sr1)
    if len(obs_sr2) != n or len(perm) != n:
        raise ValueError(f"observation lengths ({n}, {len(obs_sr2)}) and permutation ({len(perm)}) differ")
    noise_var = db_to_noise_variance(snr_sr)
    if obs_sr1.absent or obs_sr2.absent or math.isinf(noise_var):
        return RelayFrame(np.zeros(n), 1.0)
    l1 = code_bit_posteriors(obs_sr1, noise_var, trellis)
    l2 = code_bit_posteriors(obs_sr2, noise_var, trellis)
    lr = clamp_llr(boxplus(l1, perm.apply(l2)))
    _, scale = normalize_power(lr)
    return RelayFrame(lr, scale)


def transmit_relay(frame: RelayFrame, snr_rd: float, rng: np.random.Generator) -> ObservationFrame:
    """``y_r = power_scale * L_r + n`` with ``n ~ N(0, noise_var(snr_rd))``."""
    return add_awgn(frame.values, db_to_noise_variance(snr_rd), rng, origin="rd")
