"""Command-line interface.

Subcommands: simulate, analyze, sweep, emulate-noise, coherence, timing.
Exit codes: 0 success, 1 configuration error, 2 runtime/statistics error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import experiments
from .config import apply_env_overrides, pipeline_from_section, read_config, sim_from_section
from .errors import ConfigError, TwinbeamError
from .frames import parse_center, read_sequence, write_sequence
from .pipeline import PipelineConfig, dump_aligned_pair
from .sim import SimConfig, generate_sequence
from .stats import curve_from_shots
from .svgchart import write_chart


def _add_common(p):
    p.add_argument("--config", help="INI config file with [experiment]/[sim]/[pipeline] sections")
    p.add_argument("--out", help="output directory")
    p.add_argument("--shots", type=int, help="number of shots")
    p.add_argument("--seed", type=int, help="RNG seed")
    p.add_argument("--workers", type=int, help="parallel workers")
    p.add_argument("--bins", help="comma-separated superpixel bin sizes")


def _load_configs(args):
    sim, pipe, exp_kwargs = None, None, {}
    if args.config:
        cp = read_config(args.config)
        if "sim" in cp:
            sim = sim_from_section(cp["sim"])
        if "pipeline" in cp:
            pipe = pipeline_from_section(cp["pipeline"])
        if "experiment" in cp:
            for key, raw in cp["experiment"].items():
                if key in experiments._SPEC_SCALAR_FIELDS:
                    exp_kwargs[key] = experiments._SPEC_SCALAR_FIELDS[key](raw)
                elif key in experiments._SPEC_TUPLE_FIELDS:
                    exp_kwargs[key] = experiments._SPEC_TUPLE_FIELDS[key](raw)
                else:
                    raise ConfigError(f"unknown experiment option {key!r}")
    return sim, pipe, exp_kwargs


def _build_spec(kind, args, **extra):
    sim, pipe, kwargs = _load_configs(args)
    kwargs.pop("kind", None)
    if sim is not None:
        kwargs["sim"] = sim
    if pipe is not None:
        kwargs["pipeline"] = pipe
    if args.out:
        kwargs["output_dir"] = args.out
    if args.shots:
        kwargs["shots"] = args.shots
    if args.workers:
        kwargs["workers"] = args.workers
    if args.bins:
        kwargs["bin_sizes"] = tuple(int(b) for b in args.bins.split(","))
    kwargs.update(extra)
    if args.seed is not None:
        base = kwargs.get("sim", SimConfig())
        kwargs["sim"] = dataclasses.replace(base, rng_seed=args.seed)
    kwargs = apply_env_overrides(kwargs)
    spec = experiments.default_spec(kind)
    overrides = {k: v for k, v in kwargs.items()}
    return dataclasses.replace(spec, **overrides) if overrides else spec


def _cmd_timing(args):
    t = experiments.frame_interval(args.shift_ns_per_row, args.rows, args.exposure_us)
    print(f"{t:g}")
    return 0


def _cmd_simulate(args):
    sim, _, _ = _load_configs(args)
    sim = sim or SimConfig()
    if args.seed is not None:
        sim = dataclasses.replace(sim, rng_seed=args.seed)
    out = Path(args.out or "simulated")
    shots = args.shots or 1
    for shot in range(shots):
        pseq, cseq = generate_sequence(sim, args.frames, args.interval, shot=shot)
        directory = out / f"shot_{shot:03d}" if shots > 1 else out
        write_sequence(directory, pseq, cseq, pulse_timing_us=sim.pulse_timing_us,
                       beam_centers=(sim.probe_center, sim.conj_center),
                       format=args.format)
    print(f"wrote {shots} sequence(s) to {out}")
    return 0


def _analyze_one(directory, pipe, bins, args):
    probe, conj, info = read_sequence(directory)
    if "probe_center" in info and "conjugate_center" in info:
        pc = parse_center(info["probe_center"])
        cc = parse_center(info["conjugate_center"])
    elif args.probe_center and args.conjugate_center:
        pc = parse_center(args.probe_center)
        cc = parse_center(args.conjugate_center)
    else:
        raise ConfigError(
            "beam centers not in the sequence manifest; pass --probe-center and --conjugate-center"
        )
    h, w = probe[0].shape
    sim_like = SimConfig(probe_center=pc, conjugate_center=cc, frame_shape=(h, w),
                         analysis_size=pipe.analysis_crop)
    hints = (experiments.hint_region(sim_like, "probe"), experiments.hint_region(sim_like, "conjugate"))
    from .pipeline import make_fluctuations
    from .stats import sigma_from_components

    pair = make_fluctuations(probe, conj, args.frame_i, args.frame_j, hints[0], hints[1], pipe)
    d = pair.probe_fluct.values - pair.conj_fluct_rotated.values
    triples = {b: sigma_from_components(d, pair.total, b) for b in bins}
    return pair, triples


def _cmd_analyze(args):
    _, pipe, _ = _load_configs(args)
    pipe = pipe or PipelineConfig()
    bins = tuple(int(b) for b in args.bins.split(",")) if args.bins else experiments.DEFAULT_BINS
    root = Path(args.sequence_dir)
    shot_dirs = sorted(p for p in root.glob("shot_*") if p.is_dir()) or [root]
    per_shot = {b: [] for b in bins}
    for d in shot_dirs:
        pair, triples = _analyze_one(d, pipe, bins, args)
        for b in bins:
            per_shot[b].append(triples[b])
        if args.dump_fluctuations:
            dump_aligned_pair(pair, Path(args.out or "analysis"), stem=d.name or "pair")
    curve = curve_from_shots(bins, per_shot, meta={"kind": "analysis", "shots": len(shot_dirs)})
    out = Path(args.out or "analysis")
    out.mkdir(parents=True, exist_ok=True)
    curve.to_csv(out / "noise_ratio.csv",
                 header_comments=[f"source: {root}", f"shots: {len(shot_dirs)}"])
    write_chart(out / "noise_ratio.svg",
                [{"label": "measured", "x": curve.bin_sizes, "y": curve.sigmas,
                  "yerr": curve.std_errors}],
                title="noise ratio", x_label="superpixel bin size (px)",
                y_label="noise ratio", y_reference=1.0)
    print(f"wrote {out / 'noise_ratio.csv'}")
    return 0


def _cmd_sweep(args):
    spec = _build_spec(args.kind, args)
    result = experiments.run(spec)
    print(f"wrote {len(result.outputs)} file(s) to {spec.output_dir}")
    if result.failures:
        for slug, msg in result.failures.items():
            print(f"condition {slug} failed: {msg}", file=sys.stderr)
        return 2
    return 0


def _cmd_emulate(args):
    extra = {}
    if args.pixel_fraction is not None:
        extra["pixel_fraction"] = args.pixel_fraction
    if args.fractions:
        extra["convolved_fractions"] = tuple(float(f) for f in args.fractions.split(","))
    if args.kernel:
        extra["emulation_kernel"] = args.kernel
    spec = _build_spec("noise_emulation", args, **extra)
    result = experiments.run(spec)
    print(f"wrote {len(result.outputs)} file(s) to {spec.output_dir}")
    return 0


def _cmd_coherence(args):
    extra = {}
    if args.max_shift:
        extra["coherence_max_shift"] = args.max_shift
    spec = _build_spec("coherence_measurement", args, **extra)
    result = experiments.run(spec)
    est = result.coherence
    print(f"coherence FWHM: {est.fwhm_rows:.2f} x {est.fwhm_cols:.2f} px, "
          f"peak at {est.peak_offset}")
    return 0


def _cmd_regenerate(args):
    result = experiments.regenerate(args.manifest, args.out)
    print(f"regenerated {len(result.outputs)} file(s) into {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="twinbeam",
                                description="Twin-beam spatial squeezing simulator and analysis")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="generate frame sequences to disk")
    _add_common(s)
    s.add_argument("--frames", type=int, default=2)
    s.add_argument("--interval", type=float, default=63.0, help="inter-frame interval (us)")
    s.add_argument("--format", choices=("pgm16", "csv"), default="pgm16")
    s.set_defaults(fn=_cmd_simulate)

    s = sub.add_parser("analyze", help="run the analysis pipeline on sequence directories")
    _add_common(s)
    s.add_argument("sequence_dir")
    s.add_argument("--frame-i", type=int, default=0)
    s.add_argument("--frame-j", type=int, default=1)
    s.add_argument("--probe-center", help="'row, col' if not in the manifest")
    s.add_argument("--conjugate-center", help="'row, col' if not in the manifest")
    s.add_argument("--dump-fluctuations", action="store_true")
    s.set_defaults(fn=_cmd_analyze)

    s = sub.add_parser("sweep", help="run one of the standard studies")
    _add_common(s)
    s.add_argument("kind", choices=[k for k in experiments.KINDS
                                    if k not in ("noise_emulation", "coherence_measurement")])
    s.set_defaults(fn=_cmd_sweep)

    s = sub.add_parser("emulate-noise", help="synthetic pixel/convolved noise study")
    _add_common(s)
    s.add_argument("--pixel-fraction", type=float)
    s.add_argument("--fractions", help="comma-separated convolved-noise fractions")
    s.add_argument("--kernel", type=int)
    s.set_defaults(fn=_cmd_emulate)

    s = sub.add_parser("coherence", help="measure the coherence area")
    _add_common(s)
    s.add_argument("--max-shift", type=int)
    s.set_defaults(fn=_cmd_coherence)

    s = sub.add_parser("timing", help="kinetic-mode frame-interval calculator")
    s.add_argument("shift_ns_per_row", type=float)
    s.add_argument("rows", type=int)
    s.add_argument("exposure_us", type=float)
    s.set_defaults(fn=_cmd_timing)

    s = sub.add_parser("regenerate", help="re-run an experiment from its manifest")
    s.add_argument("manifest")
    s.add_argument("out")
    s.set_defaults(fn=_cmd_regenerate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except TwinbeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
