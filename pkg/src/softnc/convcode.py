"""Recursive systematic convolutional (RSC) code: trellis construction and encoding.

Generator masks are little-endian in ``D``: bit ``i`` of a mask is the
coefficient of ``D^i``. The turbo-code constituent ``(1, (1+D^4)/(1+D+D^2+D^3+D^4))``
is ``GeneratorSpec(feedforward=0b10001, feedback=0b11111, memory=4)``.

A trellis state packs the last ``m`` register values ``w[k-1], ..., w[k-m]``
into an integer with ``w[k-i]`` at bit ``i-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GeneratorSpec:
    feedforward: int
    feedback: int
    memory: int

    def __post_init__(self):
        if self.memory < 1:
            raise ValueError("memory must be >= 1")
        limit = 1 << (self.memory + 1)
        for name in ("feedforward", "feedback"):
            mask = getattr(self, name)
            if not 0 < mask < limit:
                raise ValueError(f"{name} mask {mask:#b} does not fit in memory+1 = {self.memory + 1} bits")
        if not self.feedback & 1:
            raise ValueError("feedback polynomial must have its D^0 coefficient set")


TURBO_RSC = GeneratorSpec(feedforward=0b10001, feedback=0b11111, memory=4)


@dataclass(frozen=True, eq=False)
class Trellis:
    """State-transition tables of an RSC encoder.

    ``next_state[s, u]`` and ``parity[s, u]`` give the successor state and the
    parity bit for input ``u`` in state ``s``; the systematic bit is ``u``.
    ``tail_input[s]`` is the input that feeds a 0 into the register, so ``m``
    such steps return any state to 0.
    """

    spec: GeneratorSpec
    next_state: np.ndarray
    parity: np.ndarray
    tail_input: np.ndarray
    num_states: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "num_states", 1 << self.spec.memory)
        for arr in (self.next_state, self.parity, self.tail_input):
            arr.setflags(write=False)

    @property
    def memory(self) -> int:
        return self.spec.memory


def _parity_of(x: int) -> int:
    return bin(x).count("1") & 1


def build_trellis(spec: GeneratorSpec) -> Trellis:
    m = spec.memory
    n_states = 1 << m
    state_mask = n_states - 1
    fb_taps = spec.feedback >> 1  # D^1..D^m aligned with state bits 0..m-1
    ff_taps = spec.feedforward >> 1
    ff0 = spec.feedforward & 1

    next_state = np.zeros((n_states, 2), dtype=np.int64)
    parity = np.zeros((n_states, 2), dtype=np.int64)
    tail_input = np.zeros(n_states, dtype=np.int64)
    for s in range(n_states):
        fb = _parity_of(s & fb_taps)
        tail_input[s] = fb
        for u in (0, 1):
            w = u ^ fb
            next_state[s, u] = ((s << 1) | w) & state_mask
            parity[s, u] = (ff0 & w) ^ _parity_of(s & ff_taps)
    return Trellis(spec, next_state, parity, tail_input)


@dataclass(frozen=True, eq=False)
class CodewordFrame:
    """Terminated RSC codeword; both streams have length ``K + m``."""

    systematic: np.ndarray
    parity: np.ndarray

    def __len__(self):
        return self.systematic.size + self.parity.size

    def bits(self) -> np.ndarray:
        """Transmission order: all systematic bits, then all parity bits."""
        return np.concatenate([self.systematic, self.parity])


def encode(info, trellis: Trellis) -> CodewordFrame:
    """Encode ``info`` from state 0 and append ``m`` termination bits."""
    info = np.asarray(info, dtype=np.int64)
    if info.ndim != 1 or info.size < 1:
        raise ValueError("info must be a non-empty 1-D bit vector")
    if np.any((info != 0) & (info != 1)):
        raise ValueError("info must contain only 0/1")
    m = trellis.memory
    n = info.size + m
    sys = np.empty(n, dtype=np.int8)
    par = np.empty(n, dtype=np.int8)
    ns, pa, tail = trellis.next_state, trellis.parity, trellis.tail_input
    s = 0
    for k in range(n):
        u = int(info[k]) if k < info.size else int(tail[s])
        sys[k] = u
        par[k] = pa[s, u]
        s = int(ns[s, u])
    assert s == 0, "termination failed"
    return CodewordFrame(sys, par)


def final_state(bits, trellis: Trellis) -> int:
    """State reached after feeding ``bits`` (systematic stream) from state 0."""
    s = 0
    for u in np.asarray(bits, dtype=np.int64):
        s = int(trellis.next_state[s, u])
    return s
