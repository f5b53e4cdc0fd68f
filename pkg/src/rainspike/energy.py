"""Theoretical SNN energy accounting.

Synaptic operations scale with activation sparsity and simulation length:
N_sop = s * T * A, where A is the additive op count of the matching
non-spiking network. Total energy is N_sop * e_sop + n_sign * e_sign, against
an ANN baseline of 12.5 pJ per FLOP.
"""

from dataclasses import dataclass

import numpy as np

from .validation import check_range

ANN_FLOP_PJ = 12.5

# Reference operating points of the spiking deraining network this toolkit
# models: simulation length -> (GFLOPs of the matching ANN, reported uJ).
REFERENCE_TIMESTEP_TABLE = {
    3: (8.479, 1.0565e5),
    4: (8.578, 1.0690e5),
    5: (8.678, 1.0814e5),
    6: (8.777, 1.0939e5),
    7: (8.877, 1.1064e5),
}


@dataclass(frozen=True)
class EnergyConfig:
    """Energy per operation, in picojoules."""

    e_sop: float
    e_sign: float
    e_flop: float = ANN_FLOP_PJ

    def __post_init__(self):
        if self.e_sop < 0 or self.e_sign < 0 or self.e_flop < 0:
            raise ValueError("energy costs must be >= 0")


@dataclass(frozen=True)
class OpCensus:
    """Operation counts measured from (or declared for) one forward pass."""

    ann_adds: int
    timesteps: int
    sparsity: float
    n_sign: int

    def __post_init__(self):
        check_range(self.sparsity, 0.0, 1.0, "sparsity")
        if self.ann_adds < 0 or self.timesteps < 0 or self.n_sign < 0:
            raise ValueError("census counts must be >= 0")


def count_sops(census):
    """N_sop = round(sparsity * timesteps * ann_adds)."""
    return int(round(census.sparsity * census.timesteps * census.ann_adds))


def snn_energy(census, cfg):
    """Total SNN energy in pJ: synaptic additions plus spike triggers."""
    return count_sops(census) * cfg.e_sop + census.n_sign * cfg.e_sign


def ann_energy(flops, cfg):
    """ANN baseline energy in pJ."""
    if flops < 0:
        raise ValueError("flops must be >= 0")
    return flops * cfg.e_flop


def census_from_run(spike_tensors, ann_adds, timesteps):
    """Measure sparsity and spike count from recorded binary tensors."""
    if len(spike_tensors) == 0:
        raise ValueError("no spike tensors recorded")
    total = 0
    ones = 0
    for t in spike_tensors:
        arr = np.asarray(t)
        total += arr.size
        ones += int(np.count_nonzero(arr))
    return OpCensus(
        ann_adds=ann_adds,
        timesteps=timesteps,
        sparsity=ones / total,
        n_sign=ones,
    )


def reference_table_fit():
    """Least-squares line through the reference (timesteps, GFLOPs) points.

    Returns (slope GFLOPs/step, intercept GFLOPs, max abs residual GFLOPs).
    """
    ts = np.array(sorted(REFERENCE_TIMESTEP_TABLE))
    gflops = np.array([REFERENCE_TIMESTEP_TABLE[t][0] for t in ts])
    slope, intercept = np.polyfit(ts, gflops, 1)
    residuals = gflops - (slope * ts + intercept)
    return float(slope), float(intercept), float(np.abs(residuals).max())
