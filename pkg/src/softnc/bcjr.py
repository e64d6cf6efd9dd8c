"""Exact log-MAP (BCJR) decoding over a terminated RSC trellis."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .convcode import Trellis
from .core import clamp_llr

_NEG_INF = -np.inf


@numba.njit(cache=True, inline="always")
def _maxstar(a, b):
    if a == _NEG_INF:
        return b
    if b == _NEG_INF:
        return a
    if a > b:
        return a + np.log1p(np.exp(b - a))
    return b + np.log1p(np.exp(a - b))


@numba.njit(cache=True)
def _log_map(next_state, parity, in_sys, in_par):
    """Extrinsic LLRs of systematic and parity bits; both trellis ends pinned to state 0."""
    n_states = next_state.shape[0]
    T = in_sys.size
    alpha = np.full((T + 1, n_states), _NEG_INF)
    beta = np.full((T + 1, n_states), _NEG_INF)
    alpha[0, 0] = 0.0
    beta[T, 0] = 0.0

    for k in range(T):
        ls = in_sys[k]
        lp = in_par[k]
        for s in range(n_states):
            a = alpha[k, s]
            if a == _NEG_INF:
                continue
            for u in range(2):
                ns = next_state[s, u]
                g = u * ls + parity[s, u] * lp
                alpha[k + 1, ns] = _maxstar(alpha[k + 1, ns], a + g)
        top = alpha[k + 1, 0]
        for s in range(1, n_states):
            if alpha[k + 1, s] > top:
                top = alpha[k + 1, s]
        for s in range(n_states):
            alpha[k + 1, s] -= top

    for k in range(T - 1, -1, -1):
        ls = in_sys[k]
        lp = in_par[k]
        top = _NEG_INF
        for s in range(n_states):
            acc = _NEG_INF
            for u in range(2):
                b = beta[k + 1, next_state[s, u]]
                if b == _NEG_INF:
                    continue
                acc = _maxstar(acc, b + u * ls + parity[s, u] * lp)
            beta[k, s] = acc
            if acc > top:
                top = acc
        for s in range(n_states):
            beta[k, s] -= top

    ext_sys = np.empty(T)
    ext_par = np.empty(T)
    for k in range(T):
        ls = in_sys[k]
        lp = in_par[k]
        s0 = _NEG_INF
        s1 = _NEG_INF
        p0 = _NEG_INF
        p1 = _NEG_INF
        for s in range(n_states):
            a = alpha[k, s]
            if a == _NEG_INF:
                continue
            for u in range(2):
                b = beta[k + 1, next_state[s, u]]
                if b == _NEG_INF:
                    continue
                base = a + b
                p = parity[s, u]
                without_sys = base + p * lp
                without_par = base + u * ls
                if u == 1:
                    s1 = _maxstar(s1, without_sys)
                else:
                    s0 = _maxstar(s0, without_sys)
                if p == 1:
                    p1 = _maxstar(p1, without_par)
                else:
                    p0 = _maxstar(p0, without_par)
        ext_sys[k] = s1 - s0
        ext_par[k] = p1 - p0
    return ext_sys, ext_par


@dataclass(frozen=True, eq=False)
class BcjrResult:
    """Posterior and extrinsic LLRs.

    Code-bit frames have length ``2 (K + m)`` in transmission order
    (systematic stream, then parity stream).
    """

    info_posterior: np.ndarray
    info_extrinsic: np.ndarray
    code_posterior: np.ndarray
    code_extrinsic: np.ndarray


def bcjr_decode(trellis: Trellis, ch_llr_sys, ch_llr_par, apriori=None, info_length: int | None = None) -> BcjrResult:
    """Run log-MAP BCJR on one terminated frame.

    Args:
        trellis: code trellis; both ends are pinned to state 0.
        ch_llr_sys: channel LLRs of the systematic stream, length ``K + m``.
        ch_llr_par: channel LLRs of the parity stream, length ``K + m``.
        apriori: optional a-priori LLRs. Length ``K`` (info bits),
            ``K + m`` (systematic stream) or ``2 (K + m)`` (every code bit).
        info_length: ``K``; defaults to ``len(ch_llr_sys) - m``.

    Returns:
        BcjrResult with clamped LLRs. Extrinsic values exclude both the
        channel LLR and the a-priori LLR of their own position.
    """
    ch_sys = np.ascontiguousarray(ch_llr_sys, dtype=float)
    ch_par = np.ascontiguousarray(ch_llr_par, dtype=float)
    n = ch_sys.size
    m = trellis.memory
    if ch_par.size != n:
        raise ValueError(f"systematic ({n}) and parity ({ch_par.size}) lengths differ")
    K = n - m if info_length is None else info_length
    if K < 1 or K + m != n:
        raise ValueError(f"stream length {n} inconsistent with K={K} and memory {m}")

    ap_sys = np.zeros(n)
    ap_par = np.zeros(n)
    if apriori is not None:
        ap = np.asarray(apriori, dtype=float)
        if ap.size == K:
            ap_sys[:K] = ap
        elif ap.size == n:
            ap_sys[:] = ap
        elif ap.size == 2 * n:
            ap_sys[:] = ap[:n]
            ap_par[:] = ap[n:]
        else:
            raise ValueError(f"a-priori length {ap.size} matches none of K={K}, K+m={n}, 2(K+m)={2 * n}")

    in_sys = ch_sys + ap_sys
    in_par = ch_par + ap_par
    ext_sys, ext_par = _log_map(trellis.next_state, trellis.parity, in_sys, in_par)
    post_sys = ext_sys + in_sys
    post_par = ext_par + in_par
    code_post = clamp_llr(np.concatenate([post_sys, post_par]))
    code_ext = clamp_llr(np.concatenate([ext_sys, ext_par]))
    return BcjrResult(
        info_posterior=code_post[:K].copy(),
        info_extrinsic=code_ext[:K].copy(),
        code_posterior=code_post,
        code_extrinsic=code_ext,
    )
