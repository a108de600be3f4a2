"""Synthetic technical-noise emulation on measured fluctuation images.

Distinguishes two ways classical noise enters the noise-ratio curve:
pixel-level white noise lifts the curve by a constant amount at every
binning, while beam-scale (box-convolved) noise grows quadratically with
the superpixel size - the signature of temporal technical noise surviving
the two-frame subtraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import CH_EMULATION, substream
from .errors import ConfigError, StatisticsError
from .pipeline import AlignedPair
from .stats import curve_from_shots, sigma_from_components


@dataclass(frozen=True)
class EmulationSpec:
    """Amplitude (fraction of the baseline fluctuation peak-to-peak) and
    spatial mode of the added noise.

    ``kernel_size`` of 1 (or ``convolved=False``) adds independent
    pixel-level noise; larger kernels model spatially smooth noise at the
    beam scale (default 40 px, the probe FWHM).
    """

    fraction: float = 0.07
    convolved: bool = False
    kernel_size: int = 40

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ConfigError(f"fraction must be in (0, 1], got {self.fraction}")
        if self.kernel_size < 1:
            raise ConfigError("kernel size must be >= 1")


def gen_noise(shape, amplitude, rng):
    """Uniform noise on [-amplitude, amplitude] with exactly zero sample mean.

    The sample mean is subtracted, so entries live in
    ``[-amplitude - mu, amplitude - mu]`` and sum to zero.
    """
    if amplitude <= 0:
        raise ConfigError(f"amplitude must be positive, got {amplitude}")
    noise = rng.uniform(-amplitude, amplitude, size=shape)
    return noise - noise.mean()


def running_average(noise, k):
    """Same-size box-kernel average (elements of equal value, unit sum).

    At the boundaries the kernel is cropped to the valid overlap and
    renormalized, avoiding edge darkening.
    """
    a = np.asarray(noise, dtype=np.float64)
    if k > min(a.shape):
        raise ConfigError(f"kernel size {k} exceeds image dimensions {a.shape}")
    if k == 1:
        return a.copy()
    half = k // 2
    h, w = a.shape
    padded = np.zeros((h + 1, w + 1))
    padded[1:, 1:] = np.cumsum(np.cumsum(a, axis=0), axis=1)
    i = np.arange(h)
    j = np.arange(w)
    r0 = np.clip(i - half, 0, h)
    r1 = np.clip(i + k - half, 0, h)
    c0 = np.clip(j - half, 0, w)
    c1 = np.clip(j + k - half, 0, w)
    s = (
        padded[np.ix_(r1, c1)]
        - padded[np.ix_(r0, c1)]
        - padded[np.ix_(r1, c0)]
        + padded[np.ix_(r0, c0)]
    )
    return s / np.outer(r1 - r0, c1 - c0)


def _scaled_noise(shape, spec, target_ptp, rng):
    """Noise matrix whose post-processing peak-to-peak equals ``target_ptp``."""
    raw = gen_noise(shape, 1.0, rng)
    shaped = running_average(raw, spec.kernel_size) if spec.convolved else raw
    ptp = float(shaped.max() - shaped.min())
    if ptp <= 0:
        raise StatisticsError("generated noise has zero peak-to-peak")
    return shaped * (target_ptp / ptp)


def baseline_peak_to_peak(baseline):
    """Mean fluctuation peak-to-peak over baseline pairs (both beams)."""
    vals = []
    for pair in baseline:
        for img in (pair.probe_fluct.values, pair.conj_fluct_rotated.values):
            vals.append(float(img.max() - img.min()))
    ptp = float(np.mean(vals))
    if ptp <= 0:
        raise StatisticsError("baseline fluctuation peak-to-peak is zero")
    return ptp


def emulate(baseline, spec: EmulationSpec, bin_sizes, shots, rng_seed):
    """Noise-ratio curve with synthetic noise added to baseline fluctuations.

    ``baseline`` is a sequence of :class:`AlignedPair` from the fastest
    acquisition interval (cycled if shorter than ``shots``).  Each shot adds
    an independent pair of noise matrices (one per beam) scaled so that the
    post-processing peak-to-peak equals ``spec.fraction`` times the baseline
    fluctuation peak-to-peak, then evaluates the noise ratio at every bin
    size.  Returns the emulated curve; compare with ``baseline_curve``.
    """
    baseline = list(baseline)
    if not baseline:
        raise ConfigError("at least one baseline pair is required")
    if shots < 1:
        raise ConfigError("shots must be >= 1")
    target_ptp = spec.fraction * baseline_peak_to_peak(baseline)
    per_shot = {b: [] for b in bin_sizes}
    for s in range(shots):
        pair: AlignedPair = baseline[s % len(baseline)]
        shape = pair.probe_fluct.shape
        rng = substream(rng_seed, s, 0, CH_EMULATION)
        noise_p = _scaled_noise(shape, spec, target_ptp, rng)
        noise_c = _scaled_noise(shape, spec, target_ptp, rng)
        dp = pair.probe_fluct.values + noise_p
        dc = pair.conj_fluct_rotated.values + noise_c
        for b in bin_sizes:
            per_shot[b].append(sigma_from_components(dp - dc, pair.total, b))
    meta = {
        "kind": "noise_emulation",
        "fraction": spec.fraction,
        "convolved": spec.convolved,
        "kernel_size": spec.kernel_size,
        "shots": shots,
    }
    return curve_from_shots(bin_sizes, per_shot, meta=meta)


def baseline_curve(baseline, bin_sizes):
    """Noise-ratio curve of the unmodified baseline pairs."""
    per_shot = {b: [] for b in bin_sizes}
    for pair in baseline:
        d = pair.probe_fluct.values - pair.conj_fluct_rotated.values
        for b in bin_sizes:
            per_shot[b].append(sigma_from_components(d, pair.total, b))
    return curve_from_shots(bin_sizes, per_shot, meta={"kind": "baseline"})


__all__ = [
    "EmulationSpec",
    "baseline_curve",
    "baseline_peak_to_peak",
    "emulate",
    "gen_noise",
    "running_average",
]
