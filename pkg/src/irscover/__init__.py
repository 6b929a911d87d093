"""Static IRS phase design with distributed APs for worst-case coverage."""

__version__ = "0.1.0"

from .association import (Association, SubareaSpans, angular_deviation, brute_force_association,
                          successive_refinement, uniform_association)
from .channel import ChannelParams, los_steering, path_loss, sample_channel
from .evaluation import (SystemConfig, avg_received_power, dibf_worst_power, mc_received_power,
                         min_required_aps, mrt_beamformer, plan_static_irs, theorem1_gain,
                         worst_case_power)
from .geometry import (Position, ScenarioGeometry, TargetArea, UniformDeployment, direction_cosine,
                       partition_area_uniform, place_aps_uniform, spatial_freq_bounds)
from .pattern import (AngularSpan, IrsPattern, SynthConfig, brute_force_synth, design_pattern, gain,
                      synth_anchored, synth_flat, synth_linear, worst_case_gain)

__all__ = [
    "Association", "SubareaSpans", "angular_deviation", "brute_force_association",
    "successive_refinement", "uniform_association",
    "ChannelParams", "los_steering", "path_loss", "sample_channel",
    "SystemConfig", "avg_received_power", "dibf_worst_power", "mc_received_power",
    "min_required_aps", "mrt_beamformer", "plan_static_irs", "theorem1_gain", "worst_case_power",
    "Position", "ScenarioGeometry", "TargetArea", "UniformDeployment", "direction_cosine",
    "partition_area_uniform", "place_aps_uniform", "spatial_freq_bounds",
    "AngularSpan", "IrsPattern", "SynthConfig", "brute_force_synth", "design_pattern", "gain",
    "synth_anchored", "synth_flat", "synth_linear", "worst_case_gain",
]
