"""Image containers, analysis-region geometry and portable frame I/O.

Pixel convention: row-major arrays, origin at the top-left, pixel ``(i, j)``
covering the unit square ``[i, i+1) x [j, j+1)`` in continuous coordinates.
Counts are stored as float64 throughout the pipeline; raw camera frames are
integral and may be written as 16-bit binary PGM, derived (signed, rescaled)
data goes to CSV.

All containers are immutable after construction: the wrapped arrays are
marked read-only and every operation returns new values.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, FrameFormatError

PGM_MAXVAL = 65535


def _freeze(a):
    a = np.asarray(a, dtype=np.float64)
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FrameMeta:
    """Acquisition metadata attached to one frame."""

    frame_index: int = 0
    exposure_us: float = 12.0
    acquisition_time_us: float = 0.0
    label: str = ""

    def __post_init__(self):
        if self.exposure_us <= 0:
            raise ConfigError(f"exposure must be positive, got {self.exposure_us}")


@dataclass(frozen=True)
class Frame:
    """A 2D matrix of photocounts per pixel with acquisition metadata."""

    counts: np.ndarray
    meta: FrameMeta = field(default_factory=FrameMeta)

    def __post_init__(self):
        counts = _freeze(self.counts)
        object.__setattr__(self, "counts", counts)
        if counts.ndim != 2 or counts.size == 0:
            raise ConfigError(f"frame must be a non-empty 2D matrix, got shape {counts.shape}")
        if not np.all(np.isfinite(counts)):
            raise ConfigError("frame counts must be finite")
        if counts.min() < 0:
            raise ConfigError("frame counts must be nonnegative")

    @property
    def height(self):
        return self.counts.shape[0]

    @property
    def width(self):
        return self.counts.shape[1]

    @property
    def shape(self):
        return self.counts.shape


@dataclass(frozen=True)
class Region:
    """A rectangular sub-region: origin (row, col) plus height and width."""

    row: int
    col: int
    height: int
    width: int

    def __post_init__(self):
        if self.height <= 0 or self.width <= 0:
            raise ConfigError(f"region must have positive size, got {self}")

    @classmethod
    def centered(cls, center_row, center_col, size):
        """Square region of side ``size`` anchored so its center is nearest
        to the given continuous coordinates (round-half-up)."""
        r0 = int(np.floor(center_row + 0.5)) - size // 2
        c0 = int(np.floor(center_col + 0.5)) - size // 2
        return cls(r0, c0, size, size)

    def fits(self, shape):
        h, w = shape
        return 0 <= self.row and 0 <= self.col and self.row + self.height <= h and self.col + self.width <= w

    def slices(self):
        return (slice(self.row, self.row + self.height), slice(self.col, self.col + self.width))

    def shifted(self, dr, dc):
        return Region(self.row + dr, self.col + dc, self.height, self.width)


@dataclass(frozen=True)
class FrameSequence:
    """Ordered frames sharing one geometry, acquired at a fixed interval."""

    frames: tuple
    inter_frame_interval_us: float

    def __post_init__(self):
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        if not frames:
            raise ConfigError("sequence must contain at least one frame")
        shape = frames[0].shape
        for f in frames:
            if f.shape != shape:
                raise ConfigError(f"all frames must share dimensions, got {f.shape} vs {shape}")
        if self.inter_frame_interval_us <= 0:
            raise ConfigError("inter-frame interval must be positive")
        times = [f.meta.acquisition_time_us for f in frames]
        if any(t2 < t1 for t1, t2 in zip(times, times[1:])):
            raise ConfigError("acquisition times must be nondecreasing")

    def __len__(self):
        return len(self.frames)

    def __getitem__(self, i):
        return self.frames[i]


@dataclass(frozen=True)
class FluctuationImage:
    """Signed spatial photocount fluctuations from a two-frame subtraction."""

    values: np.ndarray
    source: str = ""
    rescale_factor: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))

    @property
    def shape(self):
        return self.values.shape


def crop(frame: Frame, region: Region) -> Frame:
    """Copy the given region out of a frame; metadata is preserved."""
    if not region.fits(frame.shape):
        raise ConfigError(
            f"region {region} does not fit frame of shape {frame.shape}"
        )
    return Frame(frame.counts[region.slices()].copy(), frame.meta)


# ---------------------------------------------------------------------------
# Frame file I/O


def write_frame(frame_or_array, path, format="pgm16"):
    """Write pixel data as binary 16-bit PGM or as CSV.

    PGM requires integral counts in [0, 65535]; use CSV for signed or
    large-valued derived data.
    """
    a = frame_or_array.counts if isinstance(frame_or_array, Frame) else np.asarray(frame_or_array, dtype=np.float64)
    path = Path(path)
    if format == "pgm16":
        if a.min() < 0 or a.max() > PGM_MAXVAL:
            raise FrameFormatError(
                f"{path}: counts outside [0, {PGM_MAXVAL}] cannot be written as pgm16; use csv"
            )
        if not np.all(a == np.round(a)):
            raise FrameFormatError(f"{path}: non-integral counts cannot be written as pgm16; use csv")
        h, w = a.shape
        header = f"P5\n{w} {h}\n{PGM_MAXVAL}\n".encode("ascii")
        payload = a.astype(">u2").tobytes()
        path.write_bytes(header + payload)
    elif format == "csv":
        buf = io.StringIO()
        for row in a:
            buf.write(",".join(repr(float(v)) for v in row))
            buf.write("\n")
        path.write_text(buf.getvalue(), encoding="utf-8", newline="\n")
    else:
        raise ConfigError(f"unknown frame format {format!r}")


def _pgm_tokens(data, pos, count, path):
    """Read whitespace/comment-delimited header tokens starting at ``pos``."""
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        if pos == start:
            raise FrameFormatError(f"{path}: offset {pos}: truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def _read_pgm16(path):
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise FrameFormatError(f"{path}: offset 0: not a binary PGM (missing 'P5' magic)")
    tokens, pos = _pgm_tokens(data, 2, 3, path)
    try:
        w, h, maxval = (int(t) for t in tokens)
    except ValueError:
        raise FrameFormatError(f"{path}: offset {pos}: non-numeric PGM header field") from None
    if maxval != PGM_MAXVAL:
        raise FrameFormatError(f"{path}: offset {pos}: expected maxval {PGM_MAXVAL}, got {maxval}")
    if w <= 0 or h <= 0:
        raise FrameFormatError(f"{path}: offset {pos}: bad dimensions {w}x{h}")
    pos += 1  # single whitespace byte after maxval
    expected = w * h * 2
    payload = data[pos : pos + expected]
    if len(payload) != expected:
        raise FrameFormatError(
            f"{path}: offset {pos}: payload has {len(payload)} bytes, expected {expected}"
        )
    return np.frombuffer(payload, dtype=">u2").reshape(h, w).astype(np.float64)


def _read_csv_frame(path):
    rows = []
    width = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise FrameFormatError(
                    f"{path}: line {lineno}: expected {width} columns, got {len(fields)}"
                )
            try:
                rows.append([float(f) for f in fields])
            except ValueError:
                raise FrameFormatError(f"{path}: line {lineno}: non-numeric value") from None
    if not rows:
        raise FrameFormatError(f"{path}: line 1: empty csv frame")
    return np.array(rows, dtype=np.float64)


def read_frame(path, format="pgm16", meta=None) -> Frame:
    """Read a frame from disk.  ``format`` is 'pgm16' or 'csv'."""
    if format == "pgm16":
        a = _read_pgm16(path)
    elif format == "csv":
        a = _read_csv_frame(path)
    else:
        raise ConfigError(f"unknown frame format {format!r}")
    return Frame(a, meta if meta is not None else FrameMeta())


def read_values(path, format="csv"):
    """Read raw pixel values (possibly signed) without Frame validation."""
    if format == "csv":
        return _read_csv_frame(path)
    return _read_pgm16(path)


# ---------------------------------------------------------------------------
# Sequence directory with sidecar manifest

MANIFEST_NAME = "sequence.ini"


def write_sequence(directory, probe: FrameSequence, conjugate: FrameSequence,
                   pulse_timing_us=(6.0, 1.0, 3.0), beam_centers=None, format="pgm16"):
    """Write probe/conjugate sequences plus the sidecar manifest.

    The manifest lists frame files in order together with the inter-frame
    interval, exposure, labels and the pump/probe pulse timing (A, B, C).
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ext = "pgm" if format == "pgm16" else "csv"
    cp = configparser.ConfigParser()
    cp["sequence"] = {
        "frame_count": str(len(probe)),
        "inter_frame_interval_us": repr(float(probe.inter_frame_interval_us)),
        "exposure_us": repr(float(probe[0].meta.exposure_us)),
        "pulse_a_us": repr(float(pulse_timing_us[0])),
        "pulse_b_us": repr(float(pulse_timing_us[1])),
        "pulse_c_us": repr(float(pulse_timing_us[2])),
        "format": format,
    }
    if beam_centers is not None:
        (pr, pc), (cr, cc) = beam_centers
        cp["sequence"]["probe_center"] = f"{pr!r}, {pc!r}"
        cp["sequence"]["conjugate_center"] = f"{cr!r}, {cc!r}"
    cp["frames"] = {}
    for k, (pf, cf) in enumerate(zip(probe.frames, conjugate.frames)):
        pname = f"probe_{k:03d}.{ext}"
        cname = f"conjugate_{k:03d}.{ext}"
        write_frame(pf, directory / pname, format)
        write_frame(cf, directory / cname, format)
        cp["frames"][f"probe_{k}"] = pname
        cp["frames"][f"conjugate_{k}"] = cname
        cp["frames"][f"label_{k}"] = pf.meta.label or f"frame {k}"
    with open(directory / MANIFEST_NAME, "w", encoding="utf-8") as fh:
        cp.write(fh)


def read_sequence(directory):
    """Read a sequence directory written by :func:`write_sequence`.

    Returns ``(probe, conjugate, info)`` where ``info`` is the parsed
    ``[sequence]`` section as a dict.
    """
    directory = Path(directory)
    manifest = directory / MANIFEST_NAME
    if not manifest.exists():
        raise FrameFormatError(f"{manifest}: missing sequence manifest")
    cp = configparser.ConfigParser()
    cp.read(manifest, encoding="utf-8")
    sec = cp["sequence"]
    n = sec.getint("frame_count")
    interval = sec.getfloat("inter_frame_interval_us")
    exposure = sec.getfloat("exposure_us")
    fmt = sec.get("format", "pgm16")
    probe_frames, conj_frames = [], []
    for k in range(n):
        label = cp["frames"].get(f"label_{k}", f"frame {k}")
        for role, out in (("probe", probe_frames), ("conjugate", conj_frames)):
            meta = FrameMeta(frame_index=k, exposure_us=exposure,
                             acquisition_time_us=k * interval, label=f"{role}: {label}")
            out.append(read_frame(directory / cp["frames"][f"{role}_{k}"], fmt, meta))
    info = dict(sec)
    return (
        FrameSequence(tuple(probe_frames), interval),
        FrameSequence(tuple(conj_frames), interval),
        info,
    )


def parse_center(text):
    """Parse 'row, col' from a manifest value."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"expected 'row, col', got {text!r}")
    return float(parts[0]), float(parts[1])


__all__ = [
    "Frame",
    "FrameMeta",
    "FrameSequence",
    "FluctuationImage",
    "Region",
    "crop",
    "read_frame",
    "read_values",
    "write_frame",
    "write_sequence",
    "read_sequence",
    "parse_center",
    "MANIFEST_NAME",
    "PGM_MAXVAL",
]
