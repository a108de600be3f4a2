"""Monte Carlo generator of quantum-correlated probe/conjugate frame pairs.

Sampling model (per pulse):

1. seed component: per-pixel independent Poisson counts with a Gaussian
   beam profile, probe beam only;
2. pair component: a Poisson number of photon pairs, ``(gain - 1)`` per
   seed photon; each pair draws a position from the probe profile, the
   probe photon lands there and the conjugate photon lands diametrically
   opposite across the mirror point, each photon independently jittered
   by an isotropic Gaussian of width ``coherence_sigma`` (the measured
   probe/conjugate correlation kernel is then the autocorrelation of the
   single-photon jitter, sqrt(2) wider);
3. detection: independent Bernoulli thinning at the effective quantum
   efficiency;
4. optional multiplication excess noise: each detected photoelectron
   carries a unit-mean exponential weight (high-gain register limit,
   noise factor 2).

Whole-region difference statistics then satisfy
``Var(Np - Nc) / <Np + Nc> = 1 - eta + eta / (2 gain - 1)``.

Two samplers with identical keyed RNG structure are provided:

* ``photon``: literal per-pair sampling with continuous positions - the
  reference implementation, cost linear in the photon number;
* ``field``: per-pixel Poisson sampling of the equivalent lattice point
  process (pair-coincidence, probe-only and conjugate-only detection
  classes), cost independent of brightness.  Probe marginal and the pair
  displacement kernel are exact; the conjugate marginal is wider by the
  kernel width (a few percent for typical geometries).  Intended for
  photon budgets beyond ~1e6 per frame where per-pair sampling is slow.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._rng import (
    CH_BACKGROUND,
    CH_CONJ_EXTRA,
    CH_PAIRS,
    CH_PROBE_EXTRA,
    CH_SEED_FIELD,
    CH_TECH_NOISE,
    substream,
)
from .errors import ConfigError
from .frames import Frame, FrameMeta, FrameSequence, Region

FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))  # 2.3548...
AUTO_FIELD_THRESHOLD = 1.0e6
CLIP_WARN_FRACTION = 0.01

_erf = np.vectorize(math.erf, otypes=[np.float64])


@dataclass(frozen=True)
class SimConfig:
    """All generative parameters of the twin-beam source and camera timing.

    ``seed_photons`` is the expected seed photocount in the analysis region
    (``analysis_size`` squared, centered on the beam) per pulse.  The
    conjugate beam center defaults to the mirror image of the probe center
    across the frame's geometric center.
    """

    gain: float = 4.0
    seed_photons: float = 3.0e5
    probe_center: tuple = (85.0, 160.0)
    probe_fwhm: float = 40.0
    conjugate_center: tuple | None = None
    coherence_sigma: float = 3.0
    qe: float = 0.7
    extra_loss: float = 0.0
    background_rate: float = 4.0e5
    background_fwhm_factor: float = 4.0
    background_uniform: bool = False
    background_excess: float = 1.0
    tech_noise_amplitude: float = 0.0
    tech_noise_tau_us: float = 300.0
    seed_drift: float = 1.0 / 1.003
    em_excess_noise: bool = False
    transient_kappa: float = 0.01
    transient_excess: float = 0.0
    pulse_timing_us: tuple = (6.0, 1.0, 3.0)
    frame_shape: tuple = (170, 512)
    analysis_size: int = 80
    sampling: str = "auto"
    rng_seed: int = 12345

    def __post_init__(self):
        if self.gain < 1.0:
            raise ConfigError(f"gain must be >= 1, got {self.gain}")
        if not 0.0 <= self.qe <= 1.0:
            raise ConfigError(f"quantum efficiency must be in [0, 1], got {self.qe}")
        if not 0.0 <= self.extra_loss < 1.0:
            raise ConfigError(f"extra loss must be in [0, 1), got {self.extra_loss}")
        if self.coherence_sigma <= 0:
            raise ConfigError("coherence sigma must be positive")
        for name in ("seed_photons", "background_rate", "tech_noise_amplitude", "transient_excess"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")
        if self.background_excess < 1.0:
            raise ConfigError("background excess variance factor must be >= 1")
        if self.sampling not in ("auto", "photon", "field"):
            raise ConfigError(f"unknown sampling mode {self.sampling!r}")
        if self.seed_drift <= 0:
            raise ConfigError("seed drift factor must be positive")

    @property
    def eta(self):
        """Effective detection efficiency including the excess-loss knob."""
        return self.qe * (1.0 - self.extra_loss)

    @property
    def mirror_point(self):
        """Continuous point the pair positions are mirrored through."""
        h, w = self.frame_shape
        if self.conjugate_center is None:
            return (h / 2.0, w / 2.0)
        pr, pc = self.probe_center
        cr, cc = self.conjugate_center
        return ((pr + cr) / 2.0, (pc + cc) / 2.0)

    @property
    def conj_center(self):
        mr, mc = self.mirror_point
        pr, pc = self.probe_center
        return (2.0 * mr - pr, 2.0 * mc - pc)

    @property
    def exposure_us(self):
        return sum(self.pulse_timing_us) + 2.0

    def analysis_region(self, beam="probe") -> Region:
        center = self.probe_center if beam == "probe" else self.conj_center
        return Region.centered(center[0], center[1], self.analysis_size)


def ideal_noise_ratio(gain, eta=1.0):
    """Twin-beam noise ratio with detection efficiency ``eta``:
    ``1 - eta + eta / (2 gain - 1)``."""
    return 1.0 - eta + eta / (2.0 * gain - 1.0)


def transient_gain(delay_us, cfg: SimConfig):
    """Effective gain and excess-noise scale for a pump-probe delay.

    The gain ramps from 1 after a ~1 us delay and saturates at the
    configured value by ~6 us (smoothstep in between); the excess-noise
    scale ``kappa * (1 - s)`` models the classical transient noise that
    dominates while the gain is low.
    """
    if delay_us < 0:
        raise ConfigError("delay must be nonnegative")
    u = (delay_us - 1.0) / 5.0
    if u <= 0.0:
        s = 0.0
    elif u >= 1.0:
        s = 1.0
    else:
        s = 3.0 * u * u - 2.0 * u ** 3
    return 1.0 + (cfg.gain - 1.0) * s, cfg.transient_kappa * (1.0 - s)


# ---------------------------------------------------------------------------
# Profile helpers


@functools.lru_cache(maxsize=256)
def _pixel_gaussian_1d(lo, hi, center, sigma):
    """Per-pixel mass of a unit 1D Gaussian over integer pixels [lo, hi).

    Cached: profiles depend only on geometry, and the erf evaluation would
    otherwise dominate the per-pulse cost.  The returned array is read-only.
    """
    edges = np.arange(lo, hi + 1, dtype=np.float64)
    cdf = 0.5 * (1.0 + _erf((edges - center) / (sigma * math.sqrt(2.0))))
    out = np.diff(cdf)
    out.flags.writeable = False
    return out


def _region_mass(cfg):
    """Probe-profile mass inside the analysis region (normalizes rates)."""
    sb = cfg.probe_fwhm / FWHM_PER_SIGMA
    reg = cfg.analysis_region("probe")
    mr = _pixel_gaussian_1d(reg.row, reg.row + reg.height, cfg.probe_center[0], sb).sum()
    mc = _pixel_gaussian_1d(reg.col, reg.col + reg.width, cfg.probe_center[1], sb).sum()
    return float(mr * mc)


def _support_window(cfg, extent):
    """Clipped window rows/cols around the probe center."""
    h, w = cfg.frame_shape
    pr, pc = cfg.probe_center
    r0 = max(0, int(math.floor(pr - extent)))
    r1 = min(h, int(math.ceil(pr + extent)))
    c0 = max(0, int(math.floor(pc - extent)))
    c1 = min(w, int(math.ceil(pc + extent)))
    return r0, r1, c0, c1


@functools.lru_cache(maxsize=64)
def _offset_kernel_1d(coherence_sigma, radius):
    """Distribution of the integer pixel offset between the two photons of a
    pair along one axis, for uniform sub-pixel beam phase.

    The continuous pair displacement is N(0, 2 sigma^2) per axis; pixel
    quantization convolves it with a unit triangle.  Integrated numerically;
    truncated to ``[-radius, radius]`` and renormalized.
    """
    s = math.sqrt(2.0) * coherence_sigma
    v = np.arange(-radius, radius + 1, dtype=np.float64)
    d = np.linspace(-1.0, 1.0, 801)
    tri = 1.0 - np.abs(d)
    q = np.empty_like(v)
    for i, vi in enumerate(v):
        x = -vi + d
        pdf = np.exp(-0.5 * (x / s) ** 2) / (s * math.sqrt(2.0 * math.pi))
        q[i] = np.trapezoid(pdf * tri, d)
    total = q.sum()
    if total <= 0:
        raise ConfigError("offset kernel vanished; coherence sigma too small for the radius")
    q = q / total
    q.flags.writeable = False
    return q


# ---------------------------------------------------------------------------
# Pulse sampling


def _sample_seed_field(cfg, rng, n_seed_eff, probe_counts):
    """Deposit the detected seed component (per-pixel Poisson) onto probe."""
    if n_seed_eff <= 0:
        return 0.0
    sb = cfg.probe_fwhm / FWHM_PER_SIGMA
    r0, r1, c0, c1 = _support_window(cfg, 4.0 * sb)
    rows = _pixel_gaussian_1d(r0, r1, cfg.probe_center[0], sb)
    cols = _pixel_gaussian_1d(c0, c1, cfg.probe_center[1], sb)
    lam = (cfg.eta * n_seed_eff / _region_mass(cfg)) * np.outer(rows, cols)
    probe_counts[r0:r1, c0:c1] += rng.poisson(lam)
    expected = cfg.eta * n_seed_eff / _region_mass(cfg)
    return max(0.0, expected - lam.sum())


def _sample_pairs_photon(cfg, rng_pairs, rng_probe, rng_conj, lam_pairs, probe_counts, conj_counts):
    """Per-pair sampling with continuous positions; returns (clipped, total)."""
    if lam_pairs <= 0:
        return 0.0, 0.0
    h, w = cfg.frame_shape
    sb = cfg.probe_fwhm / FWHM_PER_SIGMA
    mr, mc = cfg.mirror_point
    total_rate = lam_pairs / _region_mass(cfg)
    k = int(rng_pairs.poisson(total_rate))
    if k == 0:
        return 0.0, 0.0
    pr, pc = cfg.probe_center
    x = rng_pairs.normal(0.0, sb, size=(k, 2))
    jp = rng_pairs.normal(0.0, cfg.coherence_sigma, size=(k, 2))
    jc = rng_pairs.normal(0.0, cfg.coherence_sigma, size=(k, 2))
    probe_pos = x + jp
    probe_pos[:, 0] += pr
    probe_pos[:, 1] += pc
    conj_pos = -x + jc
    conj_pos[:, 0] += 2.0 * mr - pr
    conj_pos[:, 1] += 2.0 * mc - pc

    eta = cfg.eta
    clipped = 0
    detected_total = 0
    for pos, keep_rng, counts in (
        (probe_pos, rng_probe, probe_counts),
        (conj_pos, rng_conj, conj_counts),
    ):
        keep = keep_rng.random(k) < eta if eta < 1.0 else np.ones(k, dtype=bool)
        rows = np.floor(pos[:, 0]).astype(np.int64)
        cols = np.floor(pos[:, 1]).astype(np.int64)
        inside = (rows >= 0) & (rows < h) & (cols >= 0) & (cols < w)
        clipped += int(np.count_nonzero(keep & ~inside))
        sel = keep & inside
        detected_total += int(np.count_nonzero(keep))
        _kernels.deposit(counts, rows[sel], cols[sel])
    return float(clipped), float(detected_total)


def _sample_pairs_field(cfg, rng_pairs, rng_probe, rng_conj, lam_pairs, probe_counts, conj_counts):
    """Lattice-Poisson sampling of the pair point process.

    The pair midpoint is Gaussian with width ``sqrt(sb^2 + sc^2/2)``; for a
    given integer pixel offset ``v`` between the two photons, the probe
    pixel follows the midpoint profile shifted by ``-v/2``.  Sampling one
    Poisson field per offset therefore reproduces the probe marginal, the
    conjugate marginal and the pair-displacement kernel of the per-photon
    model exactly (up to the sub-pixel-phase quantization folded into the
    offset kernel).
    """
    if lam_pairs <= 0:
        return 0.0, 0.0
    h, w = cfg.frame_shape
    sb = cfg.probe_fwhm / FWHM_PER_SIGMA
    sc = cfg.coherence_sigma
    radius = max(1, int(math.ceil(3.5 * math.sqrt(2.0) * sc)))
    r0, r1, c0, c1 = _support_window(cfg, 4.0 * sb + radius)
    wr, wc = r1 - r0, c1 - c0

    sm = math.sqrt(sb * sb + 0.5 * sc * sc)  # midpoint spread
    q = _offset_kernel_1d(sc, radius)
    offsets = range(-radius, radius + 1)
    # conditional probe profiles per offset, and the padded (aligned)
    # conjugate profiles at +v/2
    rows_v = [_pixel_gaussian_1d(r0, r1, cfg.probe_center[0] - v / 2.0, sm) for v in offsets]
    cols_v = [_pixel_gaussian_1d(c0, c1, cfg.probe_center[1] - v / 2.0, sm) for v in offsets]
    pad = radius
    rows_cv = [_pixel_gaussian_1d(r0 - pad, r1 + pad, cfg.probe_center[0] + v / 2.0, sm)
               for v in offsets]
    cols_cv = [_pixel_gaussian_1d(c0 - pad, c1 + pad, cfg.probe_center[1] + v / 2.0, sm)
               for v in offsets]

    lam0 = lam_pairs / _region_mass(cfg)
    eta = cfg.eta
    expected = 2.0 * eta * lam0
    placed = 0.0

    # pair-coincidence class: both photons detected
    conj_aligned = np.zeros((wr + 2 * pad, wc + 2 * pad), dtype=np.float64)
    if eta > 0.0:
        both = eta * eta * lam0
        for ir, vr in enumerate(offsets):
            if q[ir] <= 0:
                continue
            for ic, vc in enumerate(offsets):
                scale = both * q[ir] * q[ic]
                if scale <= 0:
                    continue
                lam = scale * np.outer(rows_v[ir], cols_v[ic])
                n = rng_pairs.poisson(lam)
                probe_counts[r0:r1, c0:c1] += n
                conj_aligned[pad + vr : pad + vr + wr, pad + vc : pad + vc + wc] += n
                placed += 2.0 * float(lam.sum())
        # single-sided detection classes
        if eta < 1.0:
            single = eta * (1.0 - eta) * lam0
            prow = sum(qi * r for qi, r in zip(q, rows_v))
            pcol = sum(qi * c for qi, c in zip(q, cols_v))
            lam_p = single * np.outer(prow, pcol)
            probe_counts[r0:r1, c0:c1] += rng_probe.poisson(lam_p)
            crow = sum(qi * r for qi, r in zip(q, rows_cv))
            ccol = sum(qi * c for qi, c in zip(q, cols_cv))
            lam_c = single * np.outer(crow, ccol)
            conj_aligned += rng_conj.poisson(lam_c)
            placed += float(lam_p.sum() + lam_c.sum())

    clipped = max(0.0, expected - placed)  # window truncation, in expectation

    # map aligned conjugate counts to the mirrored frame location
    flipped = conj_aligned[::-1, ::-1]
    # aligned local index l corresponds to frame row H-1-(r0+l); after the
    # flip the block covers ascending frame rows starting at:
    fr0 = h - 1 - (r0 + wr + pad - 1)
    fc0 = w - 1 - (c0 + wc + pad - 1)
    tr0, tc0 = max(fr0, 0), max(fc0, 0)
    tr1 = min(fr0 + flipped.shape[0], h)
    tc1 = min(fc0 + flipped.shape[1], w)
    if tr1 > tr0 and tc1 > tc0:
        block = flipped[tr0 - fr0 : tr1 - fr0, tc0 - fc0 : tc1 - fc0]
        conj_counts[tr0:tr1, tc0:tc1] += block
        clipped += float(flipped.sum() - block.sum())
    else:
        clipped += float(flipped.sum())
    return clipped, max(expected, 1.0)


def _apply_em_noise(counts, rng):
    """Replace integer photoelectron counts by Gamma(count, 1) weights."""
    nz = counts > 0
    if np.any(nz):
        counts[nz] = rng.standard_gamma(counts[nz])


def _choose_sampling(cfg, lam_pairs):
    if cfg.sampling != "auto":
        return cfg.sampling
    return "field" if lam_pairs > AUTO_FIELD_THRESHOLD else "photon"


def generate_pulse_pair_detailed(cfg: SimConfig, seed=None, shot=0, frame=0,
                                 common_scale=1.0, seed_noise=0.0):
    """One probe/conjugate pulse pair plus a generation-info dict.

    ``common_scale`` multiplies all intensities (seed drift, common-mode
    technical noise); ``seed_noise`` is an extra relative modulation of the
    seed component only (transient excess noise).
    """
    seed = cfg.rng_seed if seed is None else seed
    h, w = cfg.frame_shape
    probe = np.zeros((h, w), dtype=np.float64)
    conj = np.zeros((h, w), dtype=np.float64)

    rng_seed_field = substream(seed, shot, frame, CH_SEED_FIELD)
    rng_pairs = substream(seed, shot, frame, CH_PAIRS)
    rng_probe = substream(seed, shot, frame, CH_PROBE_EXTRA)
    rng_conj = substream(seed, shot, frame, CH_CONJ_EXTRA)

    n_seed_eff = cfg.seed_photons * common_scale * max(0.0, 1.0 + seed_noise)
    lam_pairs = (cfg.gain - 1.0) * cfg.seed_photons * common_scale

    clip_seed = _sample_seed_field(cfg, rng_seed_field, n_seed_eff, probe)
    mode = _choose_sampling(cfg, lam_pairs)
    if mode == "photon":
        clipped, total = _sample_pairs_photon(cfg, rng_pairs, rng_probe, rng_conj,
                                              lam_pairs, probe, conj)
    else:
        clipped, total = _sample_pairs_field(cfg, rng_pairs, rng_probe, rng_conj,
                                             lam_pairs, probe, conj)
    clip_fraction = clipped / max(total, 1.0)
    if clip_fraction > CLIP_WARN_FRACTION:
        warnings.warn(
            f"{clip_fraction:.1%} of pair photons fell outside the frame; "
            "beams too close to the edge", stacklevel=2)

    if cfg.em_excess_noise:
        _apply_em_noise(probe, rng_probe)
        _apply_em_noise(conj, rng_conj)

    meta = dict(frame_index=frame, exposure_us=cfg.exposure_us)
    info = {"clip_fraction": clip_fraction, "sampling": mode,
            "common_scale": common_scale, "seed_noise": seed_noise}
    return (
        Frame(probe, FrameMeta(label="probe", **meta)),
        Frame(conj, FrameMeta(label="conjugate", **meta)),
        info,
    )


def generate_pulse_pair(cfg: SimConfig, seed=None, shot=0, frame=0):
    """One probe/conjugate pulse pair (see module docstring for the model)."""
    probe, conj, _ = generate_pulse_pair_detailed(cfg, seed=seed, shot=shot, frame=frame)
    return probe, conj


def ou_series(rng, n, dt, tau, amplitude):
    """Stationary Ornstein-Uhlenbeck samples at ``n`` times spaced ``dt``."""
    eps = np.zeros(n)
    if amplitude <= 0 or n == 0:
        return eps
    rho = math.exp(-dt / tau)
    eps[0] = amplitude * rng.standard_normal()
    innov = amplitude * math.sqrt(1.0 - rho * rho)
    for k in range(1, n):
        eps[k] = rho * eps[k - 1] + innov * rng.standard_normal()
    return eps


def generate_sequence(cfg: SimConfig, n_frames, interval_us, seed=None, shot=0):
    """Probe and conjugate frame sequences with drift and technical noise.

    Frame ``k`` is generated with all intensities multiplied by
    ``drift^k * (1 + eps_k)`` where ``eps`` is a common-mode (shared by both
    beams) Ornstein-Uhlenbeck process sampled at the frame times; the
    two-frame subtraction therefore cancels it only for intervals short
    against the correlation time.  Each frame consumes its own keyed RNG
    substreams, so generation is reproducible under any scheduling.
    """
    if n_frames < 2:
        raise ConfigError("a sequence needs at least 2 frames for subtraction analysis")
    if interval_us <= 0:
        raise ConfigError("inter-frame interval must be positive")
    seed = cfg.rng_seed if seed is None else seed
    rng_tech = substream(seed, shot, 0, CH_TECH_NOISE)
    eps = ou_series(rng_tech, n_frames, interval_us, cfg.tech_noise_tau_us,
                    cfg.tech_noise_amplitude)
    xi = (rng_tech.standard_normal(n_frames) * cfg.transient_excess
          if cfg.transient_excess > 0 else np.zeros(n_frames))

    probe_frames, conj_frames = [], []
    for k in range(n_frames):
        common = (cfg.seed_drift ** k) * max(0.0, 1.0 + eps[k])
        p, c, _ = generate_pulse_pair_detailed(cfg, seed=seed, shot=shot, frame=k,
                                               common_scale=common, seed_noise=xi[k])
        t_k = k * interval_us
        pm = FrameMeta(frame_index=k, exposure_us=cfg.exposure_us,
                       acquisition_time_us=t_k, label="probe")
        cm = FrameMeta(frame_index=k, exposure_us=cfg.exposure_us,
                       acquisition_time_us=t_k, label="conjugate")
        probe_frames.append(Frame(p.counts, pm))
        conj_frames.append(Frame(c.counts, cm))
    return (
        FrameSequence(tuple(probe_frames), interval_us),
        FrameSequence(tuple(conj_frames), interval_us),
    )


def generate_background(cfg: SimConfig, seed=None, shot=0, frame=0):
    """Scattered-pump background frames (input seed off).

    Per-pixel counts with a broad Gaussian profile (FWHM at least 4x the
    probe's by default, or uniform) totaling ``background_rate`` per
    analysis region, independent between beams and frames.  With
    ``background_excess > 1`` the counts are negative-binomial with that
    variance-to-mean ratio, modeling classically noisy scattered light.
    """
    seed = cfg.rng_seed if seed is None else seed
    h, w = cfg.frame_shape
    rng = substream(seed, shot, frame, CH_BACKGROUND)
    out = []
    for beam, center in (("probe", cfg.probe_center), ("conjugate", cfg.conj_center)):
        counts = np.zeros((h, w), dtype=np.float64)
        if cfg.background_rate > 0:
            if cfg.background_uniform:
                lam = np.full((h, w), cfg.background_rate / cfg.analysis_size ** 2)
                counts += _draw_background(rng, lam, cfg.background_excess)
            else:
                sbg = cfg.background_fwhm_factor * cfg.probe_fwhm / FWHM_PER_SIGMA
                reg = cfg.analysis_region(beam)
                rows_m = _pixel_gaussian_1d(reg.row, reg.row + reg.height, center[0], sbg).sum()
                cols_m = _pixel_gaussian_1d(reg.col, reg.col + reg.width, center[1], sbg).sum()
                rows = _pixel_gaussian_1d(0, h, center[0], sbg)
                cols = _pixel_gaussian_1d(0, w, center[1], sbg)
                lam = (cfg.background_rate / float(rows_m * cols_m)) * np.outer(rows, cols)
                counts += _draw_background(rng, lam, cfg.background_excess)
        meta = FrameMeta(frame_index=frame, exposure_us=cfg.exposure_us,
                         label=f"{beam} background")
        out.append(Frame(counts, meta))
    return out[0], out[1]


def _draw_background(rng, lam, excess):
    if excess <= 1.0:
        return rng.poisson(lam)
    p = 1.0 / excess
    n = lam * p / (1.0 - p)
    positive = n > 0
    draws = np.zeros_like(lam)
    if np.any(positive):
        draws[positive] = rng.negative_binomial(n[positive], p)
    return draws


def generate_coherent_pair(cfg: SimConfig, seed=None, shot=0, frame=0):
    """Classical coherent-state surrogate: two independent Poisson beams.

    Both beams carry the probe profile (one at each beam center) with
    ``seed_photons`` expected counts per analysis region; used to calibrate
    the shot-noise limit (noise ratio 1).
    """
    seed = cfg.rng_seed if seed is None else seed
    h, w = cfg.frame_shape
    sb = cfg.probe_fwhm / FWHM_PER_SIGMA
    mass = _region_mass(cfg)
    rng = substream(seed, shot, frame, CH_SEED_FIELD)
    out = []
    for beam, center in (("probe", cfg.probe_center), ("conjugate", cfg.conj_center)):
        counts = np.zeros((h, w), dtype=np.float64)
        rows = _pixel_gaussian_1d(0, h, center[0], sb)
        cols = _pixel_gaussian_1d(0, w, center[1], sb)
        lam = (cfg.eta * cfg.seed_photons / mass) * np.outer(rows, cols)
        counts += rng.poisson(lam)
        if cfg.em_excess_noise:
            _apply_em_noise(counts, rng)
        meta = FrameMeta(frame_index=frame, exposure_us=cfg.exposure_us,
                         label=f"{beam} coherent")
        out.append(Frame(counts, meta))
    return out[0], out[1]


def generate_coherent_sequence(cfg: SimConfig, n_frames, interval_us, seed=None, shot=0):
    """Sequence of independent coherent-surrogate frames."""
    if n_frames < 2:
        raise ConfigError("a sequence needs at least 2 frames for subtraction analysis")
    seed = cfg.rng_seed if seed is None else seed
    probe_frames, conj_frames = [], []
    for k in range(n_frames):
        p, c = generate_coherent_pair(cfg, seed=seed, shot=shot, frame=k)
        pm = FrameMeta(frame_index=k, exposure_us=cfg.exposure_us,
                       acquisition_time_us=k * interval_us, label="probe")
        cm = FrameMeta(frame_index=k, exposure_us=cfg.exposure_us,
                       acquisition_time_us=k * interval_us, label="conjugate")
        probe_frames.append(Frame(p.counts, pm))
        conj_frames.append(Frame(c.counts, cm))
    return (
        FrameSequence(tuple(probe_frames), interval_us),
        FrameSequence(tuple(conj_frames), interval_us),
    )


__all__ = [
    "AUTO_FIELD_THRESHOLD",
    "FWHM_PER_SIGMA",
    "SimConfig",
    "generate_background",
    "generate_coherent_pair",
    "generate_coherent_sequence",
    "generate_pulse_pair",
    "generate_pulse_pair_detailed",
    "generate_sequence",
    "ideal_noise_ratio",
    "ou_series",
    "transient_gain",
]
