import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from twinbeam.errors import ConfigError, FrameFormatError
from twinbeam.frames import (
    Frame,
    FrameMeta,
    FrameSequence,
    Region,
    crop,
    read_frame,
    read_sequence,
    read_values,
    write_frame,
    write_sequence,
)


def test_csv_parse_trivial(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("1,2\n3,4\n")
    f = read_frame(p, "csv")
    assert np.array_equal(f.counts, [[1.0, 2.0], [3.0, 4.0]])


def test_pgm_zeros_roundtrip(tmp_path):
    p = tmp_path / "z.pgm"
    write_frame(Frame(np.zeros((512, 512))), p, "pgm16")
    f = read_frame(p, "pgm16")
    assert f.shape == (512, 512)
    assert f.counts.sum() == 0


def test_pgm_header_layout(tmp_path):
    p = tmp_path / "one.pgm"
    write_frame(Frame(np.zeros((1, 1))), p, "pgm16")
    data = p.read_bytes()
    assert data.startswith(b"P5\n1 1\n65535\n")
    assert len(data) == len(b"P5\n1 1\n65535\n") + 2


@given(a=arrays(np.uint16, (7, 9), elements=st.integers(0, 65535)))
@settings(max_examples=30, deadline=None)
def test_pgm_roundtrip_property(tmp_path_factory, a):
    p = tmp_path_factory.mktemp("pgm") / "x.pgm"
    write_frame(Frame(a.astype(float)), p, "pgm16")
    assert np.array_equal(read_frame(p, "pgm16").counts, a.astype(float))


def test_pgm_roundtrip_simulated_frame(tmp_path):
    rng = np.random.default_rng(5)
    counts = rng.poisson(40.0, size=(170, 512)).astype(float)
    p = tmp_path / "sim.pgm"
    write_frame(Frame(counts), p, "pgm16")
    assert np.array_equal(read_frame(p, "pgm16").counts, counts)


def test_pgm_supports_bright_beam_counts(tmp_path):
    # ~1e8 counts over 80x80 px is ~1.6e4 per pixel, well below the maxval
    counts = np.full((80, 80), 1.5e4)
    p = tmp_path / "bright.pgm"
    write_frame(Frame(counts), p, "pgm16")
    assert np.array_equal(read_frame(p, "pgm16").counts, counts)


def test_pgm_overflow_rejected(tmp_path):
    with pytest.raises(FrameFormatError, match="csv"):
        write_frame(Frame(np.full((2, 2), 70000.0)), tmp_path / "o.pgm", "pgm16")


def test_pgm_nonintegral_rejected(tmp_path):
    with pytest.raises(FrameFormatError, match="csv"):
        write_frame(Frame(np.full((2, 2), 1.5)), tmp_path / "o.pgm", "pgm16")


def test_csv_signed_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    vals = rng.normal(size=(33, 17)) * 1e3
    p = tmp_path / "fluct.csv"
    write_frame(vals, p, "csv")
    back = read_values(p, "csv")
    assert np.allclose(back, vals, atol=1e-9)


def test_csv_exact_roundtrip_via_repr(tmp_path):
    vals = np.array([[0.1, -2.7182818284590455], [1e-17, 3.0]])
    p = tmp_path / "v.csv"
    write_frame(vals, p, "csv")
    assert np.array_equal(read_values(p, "csv"), vals)


def test_pgm_error_reports_offset(tmp_path):
    p = tmp_path / "bad.pgm"
    p.write_bytes(b"P5\n4 4\n65535\n\x00\x00")  # truncated payload
    with pytest.raises(FrameFormatError, match="offset"):
        read_frame(p, "pgm16")
    p2 = tmp_path / "notpgm.pgm"
    p2.write_bytes(b"JUNK")
    with pytest.raises(FrameFormatError, match="offset 0"):
        read_frame(p2, "pgm16")
    p3 = tmp_path / "badmax.pgm"
    p3.write_bytes(b"P5\n2 2\n255\n" + b"\x00" * 4)
    with pytest.raises(FrameFormatError, match="maxval"):
        read_frame(p3, "pgm16")


def test_csv_error_reports_line(tmp_path):
    p = tmp_path / "ragged.csv"
    p.write_text("1,2\n3,4,5\n")
    with pytest.raises(FrameFormatError, match="line 2"):
        read_frame(p, "csv")
    p2 = tmp_path / "nan.csv"
    p2.write_text("1,2\nx,4\n")
    with pytest.raises(FrameFormatError, match="line 2"):
        read_frame(p2, "csv")


def test_frame_validation():
    with pytest.raises(ConfigError):
        Frame(np.array([[1.0, -2.0]]))
    with pytest.raises(ConfigError):
        Frame(np.array([[np.inf, 1.0]]))
    with pytest.raises(ConfigError):
        Frame(np.zeros((0, 4)))


def test_frame_counts_immutable():
    f = Frame(np.ones((3, 3)))
    with pytest.raises(ValueError):
        f.counts[0, 0] = 5.0


def test_crop_trivial_and_identity():
    f = Frame(np.zeros((512, 512)))
    c = crop(f, Region(10, 20, 80, 80))
    assert c.shape == (80, 80)
    assert c.counts.sum() == 0
    same = crop(f, Region(0, 0, 512, 512))
    assert np.array_equal(same.counts, f.counts)


def test_crop_out_of_bounds():
    f = Frame(np.zeros((32, 32)))
    with pytest.raises(ConfigError):
        crop(f, Region(0, 0, 33, 4))
    with pytest.raises(ConfigError):
        crop(f, Region(-1, 0, 4, 4))


def test_crop_centers_gaussian_peak():
    # center-of-mass oracle: synthetic Gaussian, peak lands at crop center
    rows, cols = np.mgrid[0:170, 0:512]
    g = 1000.0 * np.exp(-((rows - 85.0) ** 2 + (cols - 260.0) ** 2) / (2 * 9.0 ** 2))
    f = Frame(g)
    region = Region.centered(85.0, 260.0, 120)
    c = crop(f, region)
    pr, pc = np.unravel_index(np.argmax(c.counts), c.shape)
    assert abs(pr - 59.5) <= 1.0 and abs(pc - 59.5) <= 1.0


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_crop_composition(data):
    base = np.arange(24 * 24, dtype=float).reshape(24, 24)
    f = Frame(base)
    h1 = data.draw(st.integers(4, 24), label="h1")
    w1 = data.draw(st.integers(4, 24), label="w1")
    r1 = data.draw(st.integers(0, 24 - h1), label="r1")
    c1 = data.draw(st.integers(0, 24 - w1), label="c1")
    outer = Region(r1, c1, h1, w1)
    h2 = data.draw(st.integers(1, h1), label="h2")
    w2 = data.draw(st.integers(1, w1), label="w2")
    r2 = data.draw(st.integers(0, h1 - h2), label="r2")
    c2 = data.draw(st.integers(0, w1 - w2), label="c2")
    inner = Region(r2, c2, h2, w2)
    composed = Region(r1 + r2, c1 + c2, h2, w2)
    once = crop(f, composed)
    twice = crop(crop(f, outer), inner)
    assert np.array_equal(once.counts, twice.counts)


def test_sequence_validation():
    f1 = Frame(np.zeros((4, 4)), FrameMeta(frame_index=0))
    f2 = Frame(np.zeros((4, 4)), FrameMeta(frame_index=1, acquisition_time_us=63.0))
    seq = FrameSequence((f1, f2), 63.0)
    assert len(seq) == 2
    with pytest.raises(ConfigError):
        FrameSequence((f1, Frame(np.zeros((5, 4)))), 63.0)
    with pytest.raises(ConfigError):
        FrameSequence((), 63.0)


def test_sequence_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    frames = []
    for k in range(2):
        frames.append(
            Frame(rng.poisson(30.0, (64, 128)).astype(float),
                  FrameMeta(frame_index=k, acquisition_time_us=63.0 * k, label="probe"))
        )
    probe = FrameSequence(tuple(frames), 63.0)
    conj = FrameSequence(tuple(Frame(f.counts, f.meta) for f in frames), 63.0)
    d = tmp_path / "seq"
    write_sequence(d, probe, conj, pulse_timing_us=(6.0, 1.0, 3.0),
                   beam_centers=((32.0, 30.0), (32.0, 98.0)))
    p2, c2, info = read_sequence(d)
    assert np.array_equal(p2[0].counts, probe[0].counts)
    assert np.array_equal(c2[1].counts, conj[1].counts)
    assert float(info["pulse_a_us"]) == 6.0
    assert float(info["inter_frame_interval_us"]) == 63.0
    assert p2[1].meta.acquisition_time_us == 63.0
