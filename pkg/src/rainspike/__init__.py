"""rainspike: continuous rain synthesis, Bayer spike-camera simulation,
classical spike reconstruction, forward spiking kernels, and energy/quality
accounting."""

from .energy import EnergyConfig, OpCensus, ann_energy, census_from_run, count_sops, snn_energy
from .estimators import RainAugmenter, SpikeCameraSimulator, SpikeReconstructor
from .metrics import MetricReport, evaluate, psnr_y, rgb_to_y, ssim_y
from .rainsynth import (
    RainParams,
    RainSequence,
    build_motion_kernel,
    compose_rainy_frame,
    generate_noise_map,
    generate_sequence,
    synthesize_rain_layer,
)
from .snnkernel import LIFConfig, LIFState, SRBWeights, TdBNParams, heaviside, lif_step, srb_forward, tdbn
from .spikecam import BayerMask, ColorSpikeStream, integrate_and_fire, make_bayer_mask, simulate_color_spikes
from .spikerecon import ReconConfig, ReconMethod, cfa_reconstruct, tfi, tfp
from .streamio import CameraConfig, ResetMode, SpikeStream, read_stream, stream_stats, write_stream

__version__ = "0.1.0"
