"""Destination: two BCJR decoders coupled through relay check nodes.

The relay check enforces ``x_r = x1 XOR x2'`` (``x2' = perm.apply(x2)``) in the
soft domain: the message toward one decoder is the boxplus of the relay LLR
and the other decoder's extrinsic LLR at the same network-coded position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bcjr import bcjr_decode
from .channel import ChannelParams, ObservationFrame, channel_llr
from .convcode import Trellis
from .core import Permutation, boxplus, clamp_llr, db_to_noise_variance
from .exitchart import measure_mutual_information

RELAY_MODES = ("raw", "scaled")
TO_SECOND = "to_second"
TO_FIRST = "to_first"


def scaled_mode_gain(power_scale: float, noise_var_rd: float) -> float:
    """Damping ``1 / (1 + noise_var_rd * v)`` for the scaled relay mode.

    The relay LLR is modelled as a consistent Gaussian with mean magnitude
    ``mu``; unit transmit power fixes ``mu^2 + 2 mu = 1 / power_scale^2``.
    Adding noise of variance ``s2 = noise_var_rd / power_scale^2`` in the LLR
    domain keeps the observation an LLR after multiplying by
    ``2 mu / (2 mu + s2)``, i.e. ``v = 1 / (2 mu power_scale^2)``.
    """
    if noise_var_rd == 0:
        return 1.0
    mean_power = 1.0 / power_scale**2
    mu = math.sqrt(1.0 + mean_power) - 1.0
    if mu <= 0:
        return 0.0
    v = 1.0 / (2.0 * mu * power_scale**2)
    return 1.0 / (1.0 + noise_var_rd * v)


def relay_obs_to_llr(y_r: ObservationFrame, power_scale: float, noise_var_rd: float, mode: str = "raw") -> np.ndarray:
    """Turn the received analog relay frame back into LLRs of the XOR bits.

    ``raw`` undoes the power normalization and uses the result as an LLR;
    ``scaled`` additionally applies :func:`scaled_mode_gain`.
    """
    if mode not in RELAY_MODES:
        raise ValueError(f"unknown relay observation mode {mode!r}; expected one of {RELAY_MODES}")
    if y_r.absent or math.isinf(noise_var_rd):
        return np.zeros(len(y_r))
    llr = np.asarray(y_r.samples, dtype=float) / power_scale
    if mode == "scaled":
        llr = scaled_mode_gain(power_scale, noise_var_rd) * llr
    return clamp_llr(llr)


def check_node_update(relay_llr, extrinsic_other, perm: Permutation, direction: str) -> np.ndarray:
    """A-priori LLRs for one decoder from the other decoder's code-bit extrinsics.

    ``to_second``: ``extrinsic_other`` is decoder 1's; the result is indexed in
    decoder 2's (unpermuted) code-bit order. ``to_first``: the reverse.
    """
    relay_llr = np.asarray(relay_llr, dtype=float)
    if direction == TO_SECOND:
        return perm.invert(boxplus(relay_llr, extrinsic_other))
    if direction == TO_FIRST:
        return boxplus(relay_llr, perm.apply(extrinsic_other))
    raise ValueError(f"unknown direction {direction!r}")


@dataclass(eq=False)
class DecoderState:
    L_E1: np.ndarray
    L_E2: np.ndarray
    L_r_obs: np.ndarray
    iteration: int
    decoded_u1: np.ndarray
    decoded_u2: np.ndarray
    # (I(X1; L_E1), I(X2; L_E2)) per iteration, filled when reference codewords are given
    mi_history: list = field(default_factory=list)


def joint_decode(ch1, ch2, relay_llr, perm: Permutation, trellis: Trellis, max_iter: int = 10,
                 early_stop: bool = True, reference=None) -> DecoderState:
    """Iterative decoding from channel LLRs of both codewords and the relay LLR frame.

    Args:
        ch1, ch2: code-bit channel LLRs (systematic then parity), length ``2 (K + m)``.
        relay_llr: LLRs of ``c1 XOR perm.apply(c2)``; zeros decouple the decoders.
        reference: optional ``(c1, c2)`` true code bits for mutual-information diagnostics.

    Serial schedule per iteration: decoder 1, check node toward decoder 2,
    decoder 2, check node toward decoder 1. Stops early once both hard
    decisions repeat across a full iteration.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    ch1 = np.asarray(ch1, dtype=float)
    ch2 = np.asarray(ch2, dtype=float)
    n = ch1.size
    if ch2.size != n or len(perm) != n or np.size(relay_llr) != n:
        raise ValueError("codeword, relay and permutation lengths must agree")
    half = n // 2
    la1 = np.zeros(n)
    prev = None
    mi = []
    for it in range(1, max_iter + 1):
        r1 = bcjr_decode(trellis, ch1[:half], ch1[half:], la1)
        la2 = check_node_update(relay_llr, r1.code_extrinsic, perm, TO_SECOND)
        r2 = bcjr_decode(trellis, ch2[:half], ch2[half:], la2)
        la1 = check_node_update(relay_llr, r2.code_extrinsic, perm, TO_FIRST)
        u1 = (r1.info_posterior > 0).astype(np.int8)
        u2 = (r2.info_posterior > 0).astype(np.int8)
        if reference is not None:
            mi.append((measure_mutual_information(r1.code_extrinsic, reference[0]),
                       measure_mutual_information(r2.code_extrinsic, reference[1])))
        if early_stop and prev is not None and np.array_equal(prev[0], u1) and np.array_equal(prev[1], u2):
            break
        prev = (u1, u2)
    return DecoderState(r1.code_extrinsic, r2.code_extrinsic, np.asarray(relay_llr, dtype=float),
                        it, u1, u2, mi)


def iterative_decode(y1: ObservationFrame, y2: ObservationFrame, y_r: ObservationFrame,
                     params: ChannelParams, perm: Permutation, trellis: Trellis, max_iter: int = 10,
                     power_scale: float = 1.0, mode: str = "raw", early_stop: bool = True,
                     reference=None) -> DecoderState:
    """Decode both sources from the two direct observations and the relay observation."""
    var_sd = db_to_noise_variance(params.snr_sd)
    var_rd = db_to_noise_variance(params.snr_rd)
    relay_llr = relay_obs_to_llr(y_r, power_scale, var_rd, mode)
    return joint_decode(channel_llr(y1, var_sd), channel_llr(y2, var_sd), relay_llr, perm, trellis,
                        max_iter=max_iter, early_stop=early_stop, reference=reference)


def decode_single(y: ObservationFrame, snr_sd: float, trellis: Trellis) -> np.ndarray:
    """Hard decisions of one source decoded on its own (no relay)."""
    llr = channel_llr(y, db_to_noise_variance(snr_sd))
    half = llr.size // 2
    return (bcjr_decode(trellis, llr[:half], llr[half:]).info_posterior > 0).astype(np.int8)
