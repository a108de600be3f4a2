"""Superpixel statistics: the noise-ratio estimators, coherence-area
measurement via cross-correlation, and mode/flux accounting.

The noise ratio is the spatial variance of the probe-minus-conjugate
fluctuation difference over superpixels, normalized by the mean total
photocounts of the four contributing frames; 1 is the shot-noise limit,
values below 1 certify intensity correlations stronger than shot noise.

All operations are pure functions of their array inputs; orientation
(the 180-degree conjugate rotation) is handled upstream in the pipeline.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ConfigError, StatisticsError
from .frames import FluctuationImage, Frame, Region

MIN_SUPERPIXELS = 4


def _as_array(x):
    if isinstance(x, Frame):
        return x.counts
    if isinstance(x, FluctuationImage):
        return x.values
    return np.asarray(x, dtype=np.float64)


def bin_superpixels(image, n):
    """Sum ``n x n`` pixel blocks into superpixels.

    The input is cropped to the largest top-left-anchored sub-matrix whose
    dimensions are multiples of ``n``; output dims are ``floor(dims / n)``.
    """
    a = _as_array(image)
    if n < 1:
        raise ConfigError(f"bin size must be >= 1, got {n}")
    if n > a.shape[0] or n > a.shape[1]:
        raise StatisticsError(f"bin size {n} exceeds image dimensions {a.shape}")
    return _kernels.block_sum(a, int(n))


def binned_variance_and_mean(diff, total, n):
    """Superpixel variance of a difference image and mean of a total image.

    Returns ``(variance, mean, superpixel_count)``: the unbiased sample
    variance of the binned difference and the mean of the binned total.
    """
    bd = bin_superpixels(diff, n)
    bt = bin_superpixels(total, n)
    count = bd.size
    if count < MIN_SUPERPIXELS:
        raise StatisticsError(
            f"{count} superpixels at bin size {n}; at least {MIN_SUPERPIXELS} required"
        )
    return float(np.var(bd, ddof=1)), float(np.mean(bt)), count


def sigma_from_components(diff, total, n):
    """Noise ratio from a fluctuation-difference image and a total-counts image.

    Returns ``(sigma, std_error, superpixel_count)`` where sigma is the
    unbiased sample variance of the binned difference over superpixels
    divided by the mean binned total, and the standard error follows the
    near-Gaussian variance-of-a-sample-variance formula
    ``sigma * sqrt(2 / (count - 1))``.
    """
    num, den, count = binned_variance_and_mean(diff, total, n)
    if den <= 0:
        raise StatisticsError(f"zero denominator (mean total counts) at bin size {n}")
    sigma = num / den
    return sigma, sigma * np.sqrt(2.0 / (count - 1)), count


def noise_ratio(p1, p2, c1, c2, n, rescale=1.0):
    """Noise ratio of aligned probe/conjugate analysis crops.

    ``p2`` and ``c2`` (second-frame images) are multiplied by ``rescale``
    before differencing; the denominator uses the raw (unrescaled) sums.
    Inputs must already be oriented: the conjugate crops rotated by 180
    degrees so that correlated regions overlay pixel-by-pixel.
    """
    p1, p2, c1, c2 = (_as_array(x) for x in (p1, p2, c1, c2))
    if not (p1.shape == p2.shape == c1.shape == c2.shape):
        raise ConfigError("all four crops must share dimensions")
    if rescale <= 0:
        raise ConfigError(f"rescale must be positive, got {rescale}")
    diff = (p1 - rescale * p2) - (c1 - rescale * c2)
    total = p1 + p2 + c1 + c2
    return sigma_from_components(diff, total, n)


def noise_ratio_bg(p1, p2, c1, c2, pb1, pb2, cb1, cb2, n, rescale=1.0):
    """Background-subtracted noise ratio.

    Subtracts the fluctuation variance and the mean counts of a background
    sequence (same analysis regions) from the signal terms.  The result may
    be negative when the background variance exceeds the signal variance;
    it is reported as-is.
    """
    p1, p2, c1, c2 = (_as_array(x) for x in (p1, p2, c1, c2))
    pb1, pb2, cb1, cb2 = (_as_array(x) for x in (pb1, pb2, cb1, cb2))
    if not (p1.shape == p2.shape == c1.shape == c2.shape == pb1.shape == pb2.shape == cb1.shape == cb2.shape):
        raise ConfigError("signal and background crops must share dimensions")
    if rescale <= 0:
        raise ConfigError(f"rescale must be positive, got {rescale}")

    sig_diff = (p1 - rescale * p2) - (c1 - rescale * c2)
    bg_diff = (pb1 - rescale * pb2) - (cb1 - rescale * cb2)
    bs = bin_superpixels(sig_diff, n)
    bb = bin_superpixels(bg_diff, n)
    count = bs.size
    if count < MIN_SUPERPIXELS:
        raise StatisticsError(
            f"{count} superpixels at bin size {n}; at least {MIN_SUPERPIXELS} required"
        )
    num_sig = float(np.var(bs, ddof=1))
    num_bg = float(np.var(bb, ddof=1))
    den_sig = float(np.mean(bin_superpixels(p1 + p2 + c1 + c2, n)))
    den_bg = float(np.mean(bin_superpixels(pb1 + pb2 + cb1 + cb2, n)))
    den = den_sig - den_bg
    if den <= 0:
        raise StatisticsError(
            "background mean counts reach the signal level; background-subtracted "
            f"denominator {den:g} <= 0 at bin size {n}"
        )
    sigma_b = (num_sig - num_bg) / den
    rel = np.sqrt(2.0 / (count - 1))
    std_error = np.hypot(num_sig * rel, num_bg * rel) / den
    return sigma_b, std_error, count


def scaling_factor(p1, p2, region: Region | None = None):
    """Ratio of total first-frame to second-frame probe photocounts.

    Applied to the second frame it balances slow seed-power drift so the
    two-frame subtraction removes the DC beam profile.
    """
    a1, a2 = _as_array(p1), _as_array(p2)
    if region is not None:
        if not (region.fits(a1.shape) and region.fits(a2.shape)):
            raise ConfigError(f"region {region} does not fit frames")
        a1, a2 = a1[region.slices()], a2[region.slices()]
    t1, t2 = float(a1.sum()), float(a2.sum())
    if t2 <= 0:
        raise StatisticsError("second-frame total is zero; cannot compute scaling factor")
    if t1 <= 0:
        raise StatisticsError("first-frame total is zero; cannot compute scaling factor")
    return t1 / t2


# ---------------------------------------------------------------------------
# Coherence area


@dataclass(frozen=True)
class CoherenceEstimate:
    """Cross-correlation map with its peak location and FWHM extents."""

    correlation_map: np.ndarray
    fwhm_rows: float
    fwhm_cols: float
    peak_offset: tuple

    def __post_init__(self):
        m = np.asarray(self.correlation_map, dtype=np.float64)
        m.flags.writeable = False
        object.__setattr__(self, "correlation_map", m)
        if not (self.fwhm_rows > 0 and self.fwhm_cols > 0):
            raise StatisticsError("FWHM values must be positive")


def _fwhm_1d(profile, peak_idx):
    """Width at half the peak height via linear interpolation, in pixels."""
    half = profile[peak_idx] / 2.0
    left = None
    for i in range(peak_idx, 0, -1):
        if profile[i - 1] < half <= profile[i]:
            frac = (profile[i] - half) / (profile[i] - profile[i - 1])
            left = i - frac
            break
    right = None
    for i in range(peak_idx, len(profile) - 1):
        if profile[i + 1] < half <= profile[i]:
            frac = (profile[i] - half) / (profile[i] - profile[i + 1])
            right = i + frac
            break
    if left is None or right is None:
        raise StatisticsError("correlation peak does not fall to half maximum within the search radius")
    return right - left


def estimate_from_map(m, max_shift):
    """Peak location and FWHM extraction from a correlation map.

    Raises :class:`StatisticsError` when the peak does not exceed 5x the
    map's robust noise floor (median absolute deviation), which signals
    uncorrelated inputs.
    """
    m = np.asarray(m, dtype=np.float64)
    pr, pc = np.unravel_index(int(np.argmax(m)), m.shape)
    peak = m[pr, pc]
    med = float(np.median(m))
    mad = float(np.median(np.abs(m - med)))
    floor = 1.4826 * mad
    if peak <= 0.0 or peak - med <= 5.0 * floor:
        raise StatisticsError(
            f"correlation peak {peak:.3g} not above 5x the robust noise floor {floor:.3g}; "
            "inputs appear uncorrelated"
        )
    fwhm_rows = _fwhm_1d(m[:, pc], int(pr))
    fwhm_cols = _fwhm_1d(m[pr, :], int(pc))
    return CoherenceEstimate(
        correlation_map=m,
        fwhm_rows=fwhm_rows,
        fwhm_cols=fwhm_cols,
        peak_offset=(int(pr) - int(max_shift), int(pc) - int(max_shift)),
    )


def coherence_area(fp, fc, max_shift=20):
    """Measure the coherence area from probe/conjugate fluctuation images.

    ``fc`` must already be rotated into probe orientation.  Returns a
    :class:`CoherenceEstimate` whose map holds the Pearson correlation of
    the mean-subtracted inputs at every shift within ``max_shift``; the
    FWHM is read off the central row/column through the peak by linear
    interpolation at half the peak height.
    """
    a = _as_array(fp)
    b = _as_array(fc)
    if a.shape != b.shape:
        raise ConfigError("fluctuation images must share dimensions")
    a = a - a.mean()
    b = b - b.mean()
    m = _kernels.pearson_shift_map(a, b, int(max_shift), int(max_shift))
    return estimate_from_map(m, int(max_shift))


# ---------------------------------------------------------------------------
# Mode and flux accounting


def mode_count(region: Region, coherence_fwhm, pulse_width_us, fwm_bandwidth_mhz, total_counts=None):
    """Spatial/temporal mode numbers for an analysis region.

    Spatial modes = region area / coherence area (FWHM squared); temporal
    modes = pulse width x process bandwidth (microseconds x megahertz).
    When ``total_counts`` is given, also returns the mean photon number
    per detected mode.
    """
    if coherence_fwhm <= 0 or pulse_width_us <= 0 or fwm_bandwidth_mhz <= 0:
        raise ConfigError("coherence FWHM, pulse width and bandwidth must be positive")
    spatial = (region.height * region.width) / float(coherence_fwhm) ** 2
    temporal = pulse_width_us * fwm_bandwidth_mhz
    if total_counts is None:
        return spatial, temporal, None
    return spatial, temporal, total_counts / (spatial * temporal)


# ---------------------------------------------------------------------------
# Noise-ratio curves


@dataclass(frozen=True)
class CurvePoint:
    bin_size: int
    sigma: float
    std_error: float
    superpixel_count: int


@dataclass(frozen=True)
class NoiseRatioCurve:
    """Noise ratio as a function of superpixel bin size.

    ``std_error`` per point is the analytic single-shot formula
    ``sigma * sqrt(2/(count-1))`` (averaged over shots for multi-shot
    curves); ``shot_std`` optionally carries the empirical standard
    deviation of per-shot sigmas.
    """

    points: tuple
    shot_std: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise StatisticsError("curve must contain at least one point")
        bins = [p.bin_size for p in pts]
        if any(b2 <= b1 for b1, b2 in zip(bins, bins[1:])):
            raise StatisticsError(f"bin sizes must be strictly increasing, got {bins}")
        allow_negative = bool(self.meta.get("background_subtracted"))
        for p in pts:
            if p.superpixel_count < MIN_SUPERPIXELS:
                raise StatisticsError(f"superpixel count {p.superpixel_count} below {MIN_SUPERPIXELS}")
            if p.sigma < 0 and not allow_negative:
                raise StatisticsError(f"negative sigma {p.sigma} in a non-background-subtracted curve")

    @property
    def bin_sizes(self):
        return [p.bin_size for p in self.points]

    @property
    def sigmas(self):
        return [p.sigma for p in self.points]

    @property
    def std_errors(self):
        return [p.std_error for p in self.points]

    def __getitem__(self, bin_size):
        for p in self.points:
            if p.bin_size == bin_size:
                return p
        raise KeyError(bin_size)

    def to_csv(self, path=None, header_comments=()):
        """Serialize as 'bin,sigma,stderr,count' CSV; '#' lines first."""
        buf = io.StringIO()
        for line in header_comments:
            buf.write(f"# {line}\n")
        buf.write("bin,sigma,stderr,count\n")
        for p in self.points:
            buf.write(f"{p.bin_size},{p.sigma!r},{p.std_error!r},{p.superpixel_count}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8", newline="\n")
        return text

    @classmethod
    def from_csv(cls, path):
        points = []
        meta = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                if ":" in line:
                    k, _, v = line.lstrip("# ").partition(":")
                    meta[k.strip()] = v.strip()
                continue
            if line.startswith("bin,"):
                continue
            b, s, e, c = line.split(",")
            points.append(CurvePoint(int(b), float(s), float(e), int(c)))
        if meta.get("background_subtracted"):
            meta["background_subtracted"] = meta["background_subtracted"] == "True"
        return cls(tuple(points), meta=meta)


def curve_from_shots(bin_sizes, per_shot, meta=None, background_subtracted=False):
    """Aggregate per-shot (sigma, std_error, count) triples into a curve.

    ``per_shot`` maps each bin size to a list of triples; sigma and the
    analytic std_error are averaged over shots and the empirical standard
    deviation of per-shot sigmas is kept alongside.
    """
    meta = dict(meta or {})
    if background_subtracted:
        meta["background_subtracted"] = True
    points = []
    shot_std = []
    for b in bin_sizes:
        triples = per_shot[b]
        sigmas = np.array([t[0] for t in triples])
        errs = np.array([t[1] for t in triples])
        counts = {t[2] for t in triples}
        points.append(CurvePoint(int(b), float(sigmas.mean()), float(errs.mean()), int(counts.pop())))
        shot_std.append(float(sigmas.std(ddof=1)) if len(sigmas) > 1 else 0.0)
    return NoiseRatioCurve(tuple(points), shot_std=tuple(shot_std), meta=meta)


__all__ = [
    "CoherenceEstimate",
    "CurvePoint",
    "NoiseRatioCurve",
    "bin_superpixels",
    "binned_variance_and_mean",
    "coherence_area",
    "curve_from_shots",
    "estimate_from_map",
    "mode_count",
    "noise_ratio",
    "noise_ratio_bg",
    "scaling_factor",
    "sigma_from_components",
]
