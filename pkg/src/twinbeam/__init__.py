"""Twin-beam spatial squeezing: Monte Carlo simulator and EMCCD-style
frame-analysis pipeline (superpixel noise ratios, background subtraction,
coherence-area measurement, technical-noise studies)."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .errors import (
    AnalysisError,
    BeamNotFoundError,
    ConfigError,
    FrameFormatError,
    RegistrationError,
    StatisticsError,
    TwinbeamError,
)
from .experiments import ExperimentSpec, default_spec, frame_interval, photon_flux, run
from .frames import FluctuationImage, Frame, FrameMeta, FrameSequence, Region, crop, read_frame, write_frame
from .noise_emu import EmulationSpec, emulate, gen_noise, running_average
from .pipeline import AlignedPair, PipelineConfig, locate_beam, make_fluctuations, register, rot180
from .sim import (
    SimConfig,
    generate_background,
    generate_pulse_pair,
    generate_sequence,
    ideal_noise_ratio,
    transient_gain,
)
from .stats import (
    CoherenceEstimate,
    NoiseRatioCurve,
    bin_superpixels,
    coherence_area,
    mode_count,
    noise_ratio,
    noise_ratio_bg,
    scaling_factor,
)

__version__ = "0.1.0"

__all__ = [
    "AlignedPair",
    "AnalysisError",
    "BeamNotFoundError",
    "CoherenceEstimate",
    "ConfigError",
    "EmulationSpec",
    "ExperimentSpec",
    "FluctuationImage",
    "Frame",
    "FrameFormatError",
    "FrameMeta",
    "FrameSequence",
    "KERNEL_BACKEND",
    "NoiseRatioCurve",
    "PipelineConfig",
    "Region",
    "RegistrationError",
    "SimConfig",
    "StatisticsError",
    "TwinbeamError",
    "bin_superpixels",
    "coherence_area",
    "crop",
    "default_spec",
    "emulate",
    "frame_interval",
    "gen_noise",
    "generate_background",
    "generate_pulse_pair",
    "generate_sequence",
    "ideal_noise_ratio",
    "locate_beam",
    "make_fluctuations",
    "mode_count",
    "noise_ratio",
    "noise_ratio_bg",
    "photon_flux",
    "read_frame",
    "register",
    "rot180",
    "run",
    "running_average",
    "scaling_factor",
    "transient_gain",
    "write_frame",
]
