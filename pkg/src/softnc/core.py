"""Shared numeric primitives: LLR algebra, SNR conversion, permutations.

LLRs throughout the package use the convention ``L = log(P(x=1) / P(x=0))``,
so a positive value favours bit 1 (BPSK symbol -1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

L_MAX = 25.0
LINK_ABSENT = float("-inf")


def clamp_llr(llr):
    """Clip LLRs to ``[-L_MAX, L_MAX]``; infinities map to the bounds."""
    return np.clip(llr, -L_MAX, L_MAX)


def is_absent(snr_db: float) -> bool:
    return snr_db == LINK_ABSENT


def db_to_noise_variance(snr_db: float) -> float:
    """Per-dimension noise variance for unit-energy BPSK at ``Es/N0 = snr_db``.

    ``-inf`` dB (link absent) maps to ``inf``; ``+inf`` dB maps to 0.
    """
    if math.isnan(snr_db):
        raise ValueError("SNR must not be NaN")
    if snr_db == LINK_ABSENT:
        return math.inf
    if snr_db == math.inf:
        return 0.0
    return 1.0 / (2.0 * 10.0 ** (snr_db / 10.0))


def boxplus(l1, l2):
    """LLR of ``x1 XOR x2`` from independent LLRs of ``x1`` and ``x2``.

    Evaluates ``log((e^l1 + e^l2) / (1 + e^(l1 + l2)))`` as a difference of
    two log-sum-exps, which stays finite for any finite inputs and is exactly
    0 when either input is 0.
    """
    l1 = np.asarray(l1, dtype=float)
    l2 = np.asarray(l2, dtype=float)
    out = np.logaddexp(l1, l2) - np.logaddexp(0.0, l1 + l2)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True, eq=False)
class Permutation:
    """Bijection on ``{0..n-1}``; ``apply(x)[k] == x[mapping[k]]``."""

    mapping: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        mapping = np.array(self.mapping, dtype=np.int64)
        n = mapping.size
        if n < 1 or not np.array_equal(np.sort(mapping), np.arange(n)):
            raise ValueError("mapping is not a bijection on 0..n-1")
        mapping.setflags(write=False)
        inverse = np.empty(n, dtype=np.int64)
        inverse[mapping] = np.arange(n)
        inverse.setflags(write=False)
        object.__setattr__(self, "mapping", mapping)
        object.__setattr__(self, "_inverse", inverse)

    def __len__(self):
        return self.mapping.size

    @property
    def inverse(self) -> np.ndarray:
        return self._inverse

    def apply(self, x):
        x = np.asarray(x)
        if x.shape[-1] != self.mapping.size:
            raise ValueError(f"frame length {x.shape[-1]} != permutation length {self.mapping.size}")
        return x[..., self.mapping]

    def invert(self, x):
        x = np.asarray(x)
        if x.shape[-1] != self.mapping.size:
            raise ValueError(f"frame length {x.shape[-1]} != permutation length {self.mapping.size}")
        return x[..., self._inverse]


def make_permutation(seed: int, n: int) -> Permutation:
    """Seeded Fisher-Yates permutation of length ``n``."""
    if n < 1:
        raise ValueError("permutation length must be >= 1")
    rng = np.random.default_rng(seed)
    return Permutation(rng.permutation(n), seed=seed)
