"""Independent reference computations used to check the fast paths.

Nothing here shares code with the decoders it checks: the encoder steps a
bit-level shift register, MAP decoding enumerates every information word,
boxplus works in the probability domain and mutual information uses
Gauss-Hermite quadrature.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.special import expit

from .convcode import GeneratorSpec


def reference_encode(info, spec: GeneratorSpec) -> tuple[np.ndarray, np.ndarray]:
    """Terminated RSC encoding by direct simulation of the feedback register."""
    m = spec.memory
    fb = [(spec.feedback >> i) & 1 for i in range(m + 1)]
    ff = [(spec.feedforward >> i) & 1 for i in range(m + 1)]
    reg = [0] * m  # reg[i-1] holds w[k-i]
    sys, par = [], []
    for k in range(len(info) + m):
        feedback = 0
        for i in range(1, m + 1):
            feedback ^= fb[i] & reg[i - 1]
        u = int(info[k]) if k < len(info) else feedback
        w = u ^ feedback
        p = ff[0] & w
        for i in range(1, m + 1):
            p ^= ff[i] & reg[i - 1]
        sys.append(u)
        par.append(p)
        reg = [w] + reg[:-1]
    assert not any(reg)
    return np.array(sys, dtype=np.int8), np.array(par, dtype=np.int8)


def series_division(num: int, den: int, n_terms: int) -> list[int]:
    """First ``n_terms`` coefficients of ``num(D) / den(D)`` over GF(2) (little-endian masks)."""
    assert den & 1
    rem = num
    out = []
    for k in range(n_terms):
        bit = (rem >> k) & 1
        out.append(bit)
        if bit:
            rem ^= den << k
    return out


def boxplus_probability(l1, l2):
    """XOR LLR via bit probabilities; ``P(x=0)`` is computed directly to avoid cancellation."""
    p1, q1 = expit(l1), expit(-np.asarray(l1))
    p2, q2 = expit(l2), expit(-np.asarray(l2))
    return np.log(p1 * q2 + q1 * p2) - np.log(p1 * p2 + q1 * q2)


def exhaustive_map(spec: GeneratorSpec, K: int, llr_sys, llr_par, apriori_info=None) -> np.ndarray:
    """Info-bit posterior LLRs by enumerating all ``2^K`` information words."""
    llr_sys = np.asarray(llr_sys, dtype=float)
    llr_par = np.asarray(llr_par, dtype=float)
    words = np.array(list(itertools.product((0, 1), repeat=K)), dtype=np.int8)
    metric = np.empty(words.shape[0])
    for i, w in enumerate(words):
        s, p = reference_encode(w, spec)
        metric[i] = s @ llr_sys + p @ llr_par
        if apriori_info is not None:
            metric[i] += w @ np.asarray(apriori_info, dtype=float)
    out = np.empty(K)
    for k in range(K):
        one = words[:, k] == 1
        out[k] = np.logaddexp.reduce(metric[one]) - np.logaddexp.reduce(metric[~one])
    return out


def bpsk_awgn_mutual_information(snr_db: float, order: int = 160) -> float:
    """``I(X; L)`` of channel LLRs for unit-energy BPSK at ``Es/N0 = snr_db`` (Gauss-Hermite)."""
    var = 1.0 / (2.0 * 10.0 ** (snr_db / 10.0))
    mu = 2.0 / var  # sign-aligned LLR ~ N(mu, 2 mu)
    sd = math.sqrt(2.0 * mu)
    t, w = np.polynomial.hermite.hermgauss(order)
    x = mu + math.sqrt(2.0) * sd * t
    return 1.0 - float(np.sum(w * np.logaddexp(0.0, -x))) / (math.sqrt(math.pi) * math.log(2.0))


def run_selftest(stream) -> bool:
    """Run quick oracle comparisons, one PASS/FAIL line each."""
    from .bcjr import bcjr_decode
    from .convcode import TURBO_RSC, build_trellis, encode
    from .core import L_MAX, boxplus
    from .exitchart import j_function

    rng = np.random.default_rng(12345)
    trellis = build_trellis(TURBO_RSC)
    results = []

    l = rng.uniform(-20, 20, (2, 10_000))
    results.append(("boxplus vs probability domain",
                    float(np.max(np.abs(boxplus(l[0], l[1]) - boxplus_probability(l[0], l[1])))), 1e-9))

    worst = 0.0
    for _ in range(20):
        info = rng.integers(0, 2, 12)
        c = encode(info, trellis)
        s, p = reference_encode(info, TURBO_RSC)
        worst = max(worst, float(np.sum(c.systematic != s) + np.sum(c.parity != p)))
    results.append(("encoder vs shift register", worst, 0.0))

    worst = 0.0
    for var in (0.25, 0.5, 1.0):
        for _ in range(10):
            info = rng.integers(0, 2, 8)
            s, p = reference_encode(info, TURBO_RSC)
            ls = -2.0 * (1.0 - 2.0 * s + math.sqrt(var) * rng.standard_normal(s.size)) / var
            lp = -2.0 * (1.0 - 2.0 * p + math.sqrt(var) * rng.standard_normal(p.size)) / var
            got = bcjr_decode(trellis, ls, lp).info_posterior
            want = np.clip(exhaustive_map(TURBO_RSC, 8, ls, lp), -L_MAX, L_MAX)
            worst = max(worst, float(np.max(np.abs(got - want))))
    results.append(("BCJR vs exhaustive MAP (K=8)", worst, 1e-9))

    worst = 0.0
    for snr in (-5.0, 0.0, 5.0):
        sigma = math.sqrt(8.0 * 10.0 ** (snr / 10.0))
        worst = max(worst, abs(j_function(sigma) - bpsk_awgn_mutual_information(snr)))
    results.append(("J function vs Gauss-Hermite", worst, 1e-6))

    ok = True
    for name, err, tol in results:
        passed = err <= tol
        ok &= passed
        stream.write(f"{'PASS' if passed else 'FAIL'} {name}: max error {err:.3g} (tol {tol:g})\n")
    return ok
