"""EXIT-chart analysis: Gaussian a-priori model, mutual information, transfer curves.

Curves are measured with common random numbers: every grid point of one
curve reuses the same bits and the same standard-normal draws, so measured
curves are smooth in ``i_a`` and comparable across grid points.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .bcjr import bcjr_decode
from .channel import add_awgn, bpsk_modulate, channel_llr
from .convcode import TURBO_RSC, Trellis, build_trellis, encode
from .core import boxplus, clamp_llr, db_to_noise_variance, make_permutation

SIGMA_MAX = 60.0
DEFAULT_GRID = np.round(np.arange(0.0, 1.0 + 1e-9, 0.05), 10)
DEFAULT_SAMPLES = 200_000

CHECK_NODE = "check_node"
CONV_DECODER = "conv_decoder"

_LN2 = math.log(2.0)


def measure_mutual_information(llrs, bits) -> float:
    """Time-average estimate of ``I(X; L)`` in bits, clipped to ``[0, 1]``.

    Bit 1 pairs with positive LLRs.
    """
    llrs = np.asarray(llrs, dtype=float)
    bits = np.asarray(bits)
    if llrs.shape != bits.shape or llrs.size == 0:
        raise ValueError("llrs and bits must be non-empty with equal shape")
    s = 2.0 * bits.astype(float) - 1.0
    i = 1.0 - float(np.mean(np.logaddexp(0.0, -s * llrs))) / _LN2
    return min(max(i, 0.0), 1.0)


def mutual_information_stderr(llrs, bits) -> float:
    """Standard error of :func:`measure_mutual_information` from the per-sample spread."""
    llrs = np.asarray(llrs, dtype=float)
    s = 2.0 * np.asarray(bits, dtype=float) - 1.0
    per_sample = np.logaddexp(0.0, -s * llrs) / _LN2
    return float(np.std(per_sample) / math.sqrt(per_sample.size))


def j_function(sigma: float) -> float:
    """Mutual information of a consistent Gaussian LLR ``N(sigma^2/2, sigma^2)``."""
    if sigma <= 0:
        return 0.0
    mu = 0.5 * sigma * sigma

    def integrand(x):
        return math.exp(-0.5 * ((x - mu) / sigma) ** 2) * np.logaddexp(0.0, -x)

    lo, hi = mu - 12.0 * sigma, mu + 12.0 * sigma
    val, _ = integrate.quad(integrand, lo, hi, points=[0.0] if lo < 0.0 < hi else None,
                            limit=200, epsabs=1e-13, epsrel=1e-11)
    return 1.0 - val / (sigma * math.sqrt(2.0 * math.pi) * _LN2)


@functools.lru_cache(maxsize=1)
def _j_table():
    sigmas = np.concatenate([np.linspace(0.0, 10.0, 201), np.linspace(10.5, SIGMA_MAX, 100)])
    values = np.array([j_function(s) for s in sigmas])
    return sigmas, np.maximum.accumulate(values)


def j_inverse(i: float) -> float:
    """Inverse of :func:`j_function`; values at or above ``J(SIGMA_MAX)`` return ``SIGMA_MAX``."""
    if not 0.0 <= i <= 1.0:
        raise ValueError("mutual information must lie in [0, 1]")
    if i == 0.0:
        return 0.0
    sigmas, values = _j_table()
    if i >= values[-1]:
        return SIGMA_MAX
    k = int(np.searchsorted(values, i))
    lo, hi = sigmas[max(k - 1, 0)], sigmas[k]
    return optimize.brentq(lambda s: j_function(s) - i, lo, hi, xtol=1e-12)


def _apriori_from_noise(sigma: float, bits, noise) -> np.ndarray:
    s = 2.0 * np.asarray(bits, dtype=float) - 1.0
    return clamp_llr(s * (0.5 * sigma * sigma) + sigma * noise)


def generate_apriori(i_a: float, bits, rng: np.random.Generator) -> np.ndarray:
    """Consistent-Gaussian a-priori LLRs carrying ``i_a`` bits about ``bits``."""
    bits = np.asarray(bits)
    sigma = j_inverse(i_a)
    if sigma == 0.0:
        return np.zeros(bits.shape)
    return _apriori_from_noise(sigma, bits, rng.standard_normal(bits.shape))


@dataclass(frozen=True)
class ExitPoint:
    i_a: float
    i_e: float


@dataclass(frozen=True, eq=False)
class ExitCurve:
    component: str
    snr_db: float
    i_a: np.ndarray
    i_e: np.ndarray
    stderr: np.ndarray | None = None

    def __post_init__(self):
        if self.i_a.size > 1 and np.any(np.diff(self.i_a) <= 0):
            raise ValueError("i_a grid must be strictly increasing")

    @property
    def points(self) -> list[ExitPoint]:
        return [ExitPoint(float(a), float(e)) for a, e in zip(self.i_a, self.i_e)]

    def __call__(self, i_a):
        """Piecewise-linear transfer function through the measured points."""
        return np.interp(i_a, self.i_a, self.i_e)


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or grid.min() < 0 or grid.max() > 1:
        raise ValueError("grid must be a non-empty list of values in [0, 1]")
    return grid


def exit_curve_check_node(snr_r: float, grid=DEFAULT_GRID, samples: int = DEFAULT_SAMPLES,
                          seed: int = 0) -> ExitCurve:
    """Transfer curve of the relay check node with a BPSK-AWGN surrogate relay channel.

    A-priori information refers to ``X1``; extrinsic output is measured against
    ``X2 = X1 XOR X_r`` where ``X_r`` is observed through the surrogate channel.
    """
    grid = _check_grid(grid)
    rng = np.random.default_rng([seed, 1])
    x1 = rng.integers(0, 2, samples)
    xr = rng.integers(0, 2, samples)
    x2 = x1 ^ xr
    obs = add_awgn(bpsk_modulate(xr), db_to_noise_variance(snr_r), rng)
    l_obs = channel_llr(obs, db_to_noise_variance(snr_r))
    noise = rng.standard_normal(samples)
    i_e, se = [], []
    for a in grid:
        out = boxplus(l_obs, _apriori_from_noise(j_inverse(a), x1, noise))
        i_e.append(measure_mutual_information(out, x2))
        se.append(mutual_information_stderr(out, x2))
    return ExitCurve(CHECK_NODE, snr_r, grid, np.array(i_e), np.array(se))


def exit_curve_conv_decoder(snr_sd: float, grid=DEFAULT_GRID, samples: int = DEFAULT_SAMPLES,
                            frame_length: int = 1024, seed: int = 0,
                            trellis: Trellis | None = None) -> ExitCurve:
    """Code-bit transfer curve of the BCJR decoder with a-priori on every code bit."""
    grid = _check_grid(grid)
    trellis = build_trellis(TURBO_RSC) if trellis is None else trellis
    rng = np.random.default_rng([seed, 2])
    n = 2 * (frame_length + trellis.memory)
    n_frames = max(1, math.ceil(samples / n))
    var = db_to_noise_variance(snr_sd)
    frames = []
    for _ in range(n_frames):
        c = encode(rng.integers(0, 2, frame_length), trellis).bits()
        ch = channel_llr(add_awgn(bpsk_modulate(c), var, rng), var)
        frames.append((c, ch, rng.standard_normal(n)))
    half = n // 2
    bits = np.concatenate([c for c, _, _ in frames])
    i_e, se = [], []
    for a in grid:
        sigma = j_inverse(a)
        ext = np.concatenate([
            bcjr_decode(trellis, ch[:half], ch[half:], _apriori_from_noise(sigma, c, z)).code_extrinsic
            for c, ch, z in frames
        ])
        i_e.append(measure_mutual_information(ext, bits))
        se.append(mutual_information_stderr(ext, bits))
    return ExitCurve(CONV_DECODER, snr_sd, grid, np.array(i_e), np.array(se))


@dataclass(eq=False)
class Trajectory:
    """Decoding trajectory in the ``(I(X1; L_E1), I(X2; L_E2))`` plane.

    ``steps`` is the staircase from the measured transfer curves, one point
    per decoder activation starting at ``(0, 0)``; ``measured`` holds the
    per-iteration averages observed in actual iterative decoding.
    """

    snr_sd: float
    snr_r: float
    decoder_curve: ExitCurve
    check_curve: ExitCurve
    steps: list = field(default_factory=list)
    measured: list = field(default_factory=list)

    @property
    def final_information(self) -> float:
        return max(max(p) for p in self.steps)


def staircase(decoder_curve: ExitCurve, check_curve: ExitCurve, max_steps: int = 20,
              tol: float = 1e-5) -> list[tuple[float, float]]:
    """Alternate ``i_e = D(C(i_e_other))`` between the two decoders until it stalls."""
    ie = [0.0, 0.0]
    steps = [(0.0, 0.0)]
    stalled = 0
    for step in range(max_steps):
        who = step % 2
        new = float(decoder_curve(check_curve(ie[1 - who])))
        if new <= ie[who] + tol:
            stalled += 1
            if stalled == 2:
                break
            continue
        stalled = 0
        ie[who] = new
        steps.append((ie[0], ie[1]))
    return steps


def measured_trajectory(snr_sd: float, snr_r: float, max_iter: int = 10, frames: int = 10,
                        frame_length: int = 1024, seed: int = 0,
                        trellis: Trellis | None = None) -> list[tuple[float, float]]:
    """Average per-iteration extrinsic information of the joint decoder.

    The relay observation follows the same surrogate channel as the check-node
    curve: ``y_r = bpsk(c1 XOR perm(c2)) + N_r``.
    """
    from .destination import joint_decode

    trellis = build_trellis(TURBO_RSC) if trellis is None else trellis
    n = 2 * (frame_length + trellis.memory)
    perm = make_permutation(seed, n)
    rng = np.random.default_rng([seed, 3])
    var_sd, var_r = db_to_noise_variance(snr_sd), db_to_noise_variance(snr_r)
    totals = np.zeros((max_iter, 2))
    for _ in range(frames):
        c1 = encode(rng.integers(0, 2, frame_length), trellis).bits()
        c2 = encode(rng.integers(0, 2, frame_length), trellis).bits()
        ch1 = channel_llr(add_awgn(bpsk_modulate(c1), var_sd, rng), var_sd)
        ch2 = channel_llr(add_awgn(bpsk_modulate(c2), var_sd, rng), var_sd)
        lr = channel_llr(add_awgn(bpsk_modulate(c1 ^ perm.apply(c2)), var_r, rng), var_r)
        state = joint_decode(ch1, ch2, lr, perm, trellis, max_iter=max_iter, early_stop=False,
                             reference=(c1, c2))
        totals += np.array(state.mi_history)
    return [tuple(map(float, row)) for row in totals / frames]


def trajectory(snr_sd: float, snr_r: float, max_iter: int = 10, grid=DEFAULT_GRID,
               samples: int = DEFAULT_SAMPLES, frame_length: int = 1024, seed: int = 0,
               measured_frames: int = 10) -> Trajectory:
    """Staircase over the measured curves at ``(snr_sd, snr_r)``.

    ``max_iter`` full iterations correspond to ``2 * max_iter`` staircase steps.
    ``measured_frames = 0`` skips the simulated overlay.
    """
    trellis = build_trellis(TURBO_RSC)
    dec = exit_curve_conv_decoder(snr_sd, grid, samples, frame_length, seed, trellis)
    chk = exit_curve_check_node(snr_r, grid, samples, seed)
    traj = Trajectory(snr_sd, snr_r, dec, chk, staircase(dec, chk, 2 * max_iter))
    if measured_frames:
        traj.measured = measured_trajectory(snr_sd, snr_r, max_iter, measured_frames, frame_length, seed, trellis)
    return traj
