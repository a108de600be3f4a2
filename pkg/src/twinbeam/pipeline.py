"""Turn raw frame sequences into aligned, rescaled, oriented fluctuation
images: locate the beams, coarse-crop, register, rescale, subtract, fine-crop
and rotate the conjugate by 180 degrees.

Registration is integer-pixel: the coherence area of the beams (several
pixels) makes sub-pixel alignment unnecessary, and integer shifts keep the
pipeline exactly deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import AnalysisError, BeamNotFoundError, ConfigError, RegistrationError
from .frames import FluctuationImage, Frame, FrameSequence, Region, crop
from .stats import scaling_factor

RESCALE_SANITY = (0.9, 1.1)


@dataclass(frozen=True)
class PipelineConfig:
    """Crop sizes, registration search radius and rescaling policy.

    ``rescale_mode``:
      * ``"auto"``        per-beam factor from each beam's own frame totals
      * ``"auto-probe"``  probe-derived factor applied to both beams
      * ``"off"``         no rescaling
      * a float           fixed factor applied to both beams
    ``rotation_center`` optionally overrides the conjugate rotation center
    (row, col, in fine-crop coordinates); default is the crop's geometric
    center.
    """

    coarse_crop: int = 120
    analysis_crop: int = 80
    registration_search_radius: int = 10
    rescale_mode: object = "auto"
    rotation_center: tuple | None = None

    def __post_init__(self):
        if self.analysis_crop > self.coarse_crop:
            raise ConfigError("analysis crop must not exceed the coarse crop")
        if not 0 <= self.registration_search_radius < self.coarse_crop // 2:
            raise ConfigError("search radius must be nonnegative and below half the coarse crop")
        if isinstance(self.rescale_mode, str):
            if self.rescale_mode not in ("auto", "auto-probe", "off"):
                raise ConfigError(f"unknown rescale mode {self.rescale_mode!r}")
        else:
            v = float(self.rescale_mode)
            if v <= 0:
                raise ConfigError("fixed rescale factor must be positive")


@dataclass(frozen=True)
class AlignedPair:
    """Oriented fluctuation images of one probe/conjugate frame pair.

    ``conj_fluct_rotated`` is the conjugate fluctuation rotated by 180
    degrees so correlated structure overlays ``probe_fluct`` pixel by pixel.
    ``total`` is the sum of the four aligned analysis crops (raw counts,
    conjugate part rotated), the denominator image for noise ratios.
    """

    probe_fluct: FluctuationImage
    conj_fluct_rotated: FluctuationImage
    rescale_used: tuple
    registration_shift: dict
    total: np.ndarray = None
    crop_origins: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.probe_fluct.shape != self.conj_fluct_rotated.shape:
            raise AnalysisError("probe and conjugate fluctuations must share dimensions")
        if self.total is not None:
            t = np.asarray(self.total, dtype=np.float64)
            t.flags.writeable = False
            object.__setattr__(self, "total", t)


def rot180(values, center=None):
    """Rotate an image 180 degrees about its geometric center.

    With the default center, pixel ``(i, j)`` maps to ``(H-1-i, W-1-j)``.
    A custom center (r, c) mirrors indices to ``(2r - i, 2c - j)`` and
    requires the image to be symmetric around it.
    """
    a = np.asarray(values)
    if center is None:
        return a[::-1, ::-1].copy()
    h, w = a.shape
    r, c = center
    rows = np.round(2 * r - np.arange(h)).astype(int)
    cols = np.round(2 * c - np.arange(w)).astype(int)
    if rows.min() < 0 or rows.max() >= h or cols.min() < 0 or cols.max() >= w:
        raise ConfigError(f"rotation center {center} maps pixels outside the image")
    return a[np.ix_(rows, cols)].copy()


def _box_mean(a, k):
    """Same-size box average with boundary windows renormalized to their
    actual overlap."""
    a = np.asarray(a, dtype=np.float64)
    half = k // 2
    padded = np.zeros((a.shape[0] + 1, a.shape[1] + 1))
    padded[1:, 1:] = np.cumsum(np.cumsum(a, axis=0), axis=1)
    h, w = a.shape
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
    area = np.outer(r1 - r0, c1 - c0)
    return s / area


def locate_beam(frame: Frame, beam_region_hint: Region):
    """Locate a beam inside the hint region.

    The hint crop is smoothed with a 3x3 mean (robust to single hot pixels);
    the returned position is the intensity centroid of the 9x9 neighborhood
    around the smoothed maximum, in frame coordinates.

    Raises :class:`BeamNotFoundError` when the maximum does not rise above
    the region level by 5 standard deviations, with level and spread taken
    as median/MAD estimates so a bright beam cannot mask itself.
    """
    if not beam_region_hint.fits(frame.shape):
        raise ConfigError(f"hint region {beam_region_hint} outside frame {frame.shape}")
    sub = frame.counts[beam_region_hint.slices()]
    smooth = _box_mean(sub, 3)
    mu = float(np.median(smooth))
    sd = 1.4826 * float(np.median(np.abs(smooth - mu)))
    peak = smooth.max()
    if not peak > mu + 5.0 * sd:
        raise BeamNotFoundError(
            f"no beam in hint region: max {peak:.4g} <= level {mu:.4g} + 5 spread {sd:.4g}"
        )
    pr, pc = np.unravel_index(int(np.argmax(smooth)), smooth.shape)
    r0, r1 = max(pr - 4, 0), min(pr + 5, smooth.shape[0])
    c0, c1 = max(pc - 4, 0), min(pc + 5, smooth.shape[1])
    win = smooth[r0:r1, c0:c1]
    total = win.sum()
    if total <= 0:
        raise BeamNotFoundError("beam neighborhood has zero intensity")
    ii, jj = np.mgrid[r0:r1, c0:c1]
    return (
        float((ii * win).sum() / total) + beam_region_hint.row,
        float((jj * win).sum() / total) + beam_region_hint.col,
    )


def register(a, b, radius):
    """Integer shift of ``b`` relative to ``a`` within ``+-radius``.

    Maximizes the per-shift Pearson correlation of the mean-subtracted
    overlap; ties break toward the smallest ``|dr| + |dc|``, then the
    smallest ``dr``, then the smallest ``dc``.  Raises
    :class:`RegistrationError` on a flat correlation surface.
    """
    av = a.counts if isinstance(a, Frame) else np.asarray(a, dtype=np.float64)
    bv = b.counts if isinstance(b, Frame) else np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape:
        raise ConfigError("frames must share dimensions for registration")
    if radius < 0:
        raise ConfigError("radius must be nonnegative")
    if radius == 0:  # search disabled
        return (0, 0)
    m = _kernels.pearson_shift_map(av, bv, int(radius), int(radius))
    peak = float(m.max())
    # statistical noise floor of a Pearson estimate over the smallest overlap
    h, w = av.shape
    overlap = max((h - int(radius)) * (w - int(radius)), 2)
    floor = 5.0 / np.sqrt(overlap)
    if peak <= floor:
        raise RegistrationError(
            f"correlation surface flat (peak {peak:.3g} <= noise floor {floor:.3g}); "
            "no unique registration shift"
        )
    return _best_shift(m, int(radius))


def _best_shift(m, radius):
    """Shift of the map maximum; exact ties break toward the smallest
    ``|dr| + |dc|``, then the smallest ``dr``, then the smallest ``dc``."""
    peak = m.max()
    best = None
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            if m[dr + radius, dc + radius] == peak:
                key = (abs(dr) + abs(dc), dr, dc)
                if best is None or key < best[0]:
                    best = (key, (dr, dc))
    return best[1]


def _rescale_factors(cfg, probe_i, probe_j, conj_i, conj_j):
    mode = cfg.rescale_mode
    if mode == "off":
        return 1.0, 1.0
    if isinstance(mode, str):
        s_probe = scaling_factor(probe_i, probe_j)
        if mode == "auto-probe":
            return s_probe, s_probe
        return s_probe, scaling_factor(conj_i, conj_j)
    v = float(mode)
    return v, v


def make_fluctuations(probe_seq: FrameSequence, conj_seq: FrameSequence,
                      frame_i, frame_j, probe_hint: Region, conj_hint: Region,
                      cfg: PipelineConfig = PipelineConfig(), beam_centers=None):
    """Build the oriented fluctuation pair from frames ``i`` and ``j``.

    Steps per beam: locate the beam in frame i, coarse-crop both frames at
    the located position, register the frame-j crop to the frame-i crop,
    rescale frame j, subtract, fine-crop the analysis region centered on the
    located beam, then rotate the conjugate fluctuation by 180 degrees about
    the fine-crop center.  All shifts and factors are recorded.

    ``beam_centers`` (probe, conjugate) pins the crop geometry to known
    positions instead of locating the beams; use it when the source geometry
    is known exactly, e.g. for simulated sequences, where centroid noise on a
    beam straddling a pixel boundary would otherwise jitter the two beams'
    crop anchors against each other.
    """
    if not (0 <= frame_i < len(probe_seq) and 0 <= frame_j < len(probe_seq)):
        raise ConfigError(f"frame ordinals ({frame_i}, {frame_j}) outside sequence")
    if frame_i >= frame_j:
        raise ConfigError("frame_i must precede frame_j")
    if len(probe_seq) != len(conj_seq):
        raise ConfigError("probe and conjugate sequences must have equal length")

    coarse, fine = cfg.coarse_crop, cfg.analysis_crop
    fixed = {"probe": None, "conjugate": None}
    if beam_centers is not None:
        fixed["probe"], fixed["conjugate"] = beam_centers
    results = {}
    for name, seq, hint in (("probe", probe_seq, probe_hint), ("conjugate", conj_seq, conj_hint)):
        fi, fj = seq[frame_i], seq[frame_j]
        center = fixed[name] if fixed[name] is not None else locate_beam(fi, hint)
        coarse_region = Region.centered(center[0], center[1], coarse)
        if not coarse_region.fits(fi.shape):
            raise AnalysisError(f"{name}: coarse crop {coarse_region} leaves the frame")
        ci = crop(fi, coarse_region).counts
        cj_region0 = coarse_region
        cj0 = crop(fj, cj_region0).counts
        shift = register(ci, cj0, cfg.registration_search_radius)
        cj_region = cj_region0.shifted(*shift)
        if not cj_region.fits(fj.shape):
            raise AnalysisError(f"{name}: registered crop {cj_region} leaves the frame")
        cj = crop(fj, cj_region).counts
        results[name] = {
            "center": center,
            "coarse_i": ci,
            "coarse_j": cj,
            "origin": (coarse_region.row, coarse_region.col),
            "shift": shift,
        }

    s_probe, s_conj = _rescale_factors(
        cfg,
        results["probe"]["coarse_i"], results["probe"]["coarse_j"],
        results["conjugate"]["coarse_i"], results["conjugate"]["coarse_j"],
    )
    for name, s in (("probe", s_probe), ("conjugate", s_conj)):
        if not RESCALE_SANITY[0] <= s <= RESCALE_SANITY[1]:
            raise AnalysisError(
                f"{name} rescale factor {s:.4g} outside {RESCALE_SANITY}; misconfigured sequence"
            )

    margin = (coarse - fine) // 2
    fine_sl = (slice(margin, margin + fine), slice(margin, margin + fine))

    pr = results["probe"]
    probe_diff = (pr["coarse_i"] - s_probe * pr["coarse_j"])[fine_sl]
    probe_total = (pr["coarse_i"] + pr["coarse_j"])[fine_sl]

    cr = results["conjugate"]
    conj_diff = (cr["coarse_i"] - s_conj * cr["coarse_j"])[fine_sl]
    conj_total = (cr["coarse_i"] + cr["coarse_j"])[fine_sl]
    conj_diff_rot = rot180(conj_diff, cfg.rotation_center)
    conj_total_rot = rot180(conj_total, cfg.rotation_center)

    fine_origins = {
        name: (results[name]["origin"][0] + margin, results[name]["origin"][1] + margin)
        for name in ("probe", "conjugate")
    }
    src = f"frames {frame_i}-{frame_j}"
    return AlignedPair(
        probe_fluct=FluctuationImage(probe_diff, source=f"probe {src}", rescale_factor=s_probe),
        conj_fluct_rotated=FluctuationImage(conj_diff_rot, source=f"conjugate {src} rot180",
                                            rescale_factor=s_conj),
        rescale_used=(s_probe, s_conj),
        registration_shift={name: results[name]["shift"] for name in ("probe", "conjugate")},
        total=probe_total + conj_total_rot,
        crop_origins=fine_origins,
    )


def dump_aligned_pair(pair: AlignedPair, directory, stem="pair"):
    """Write the two fluctuation images as CSV plus a key-value provenance
    file (shifts, rescale factors, crop origins)."""
    from pathlib import Path

    from .frames import write_frame

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_frame(pair.probe_fluct.values, directory / f"{stem}_probe_fluct.csv", "csv")
    write_frame(pair.conj_fluct_rotated.values, directory / f"{stem}_conj_fluct_rot.csv", "csv")
    lines = [
        f"probe_rescale = {pair.rescale_used[0]!r}",
        f"conjugate_rescale = {pair.rescale_used[1]!r}",
        f"probe_shift = {pair.registration_shift['probe']}",
        f"conjugate_shift = {pair.registration_shift['conjugate']}",
        f"probe_crop_origin = {pair.crop_origins.get('probe')}",
        f"conjugate_crop_origin = {pair.crop_origins.get('conjugate')}",
    ]
    (directory / f"{stem}_provenance.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


__all__ = [
    "AlignedPair",
    "PipelineConfig",
    "dump_aligned_pair",
    "locate_beam",
    "make_fluctuations",
    "register",
    "rot180",
]
