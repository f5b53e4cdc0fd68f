import numpy as np
import pytest

from rainspike.energy import (
    ANN_FLOP_PJ,
    REFERENCE_TIMESTEP_TABLE,
    EnergyConfig,
    OpCensus,
    ann_energy,
    census_from_run,
    count_sops,
    reference_table_fit,
    snn_energy,
)


def cfg(e_sop=0.9, e_sign=3.7):
    return EnergyConfig(e_sop=e_sop, e_sign=e_sign)


class TestCountSops:
    def test_silent_network(self):
        assert count_sops(OpCensus(ann_adds=1000, timesteps=5, sparsity=0.0,
                                   n_sign=0)) == 0

    def test_dense_single_step(self):
        assert count_sops(OpCensus(ann_adds=1000, timesteps=1, sparsity=1.0,
                                   n_sign=0)) == 1000

    def test_scalar_arithmetic(self):
        census = OpCensus(ann_adds=10**6, timesteps=5, sparsity=0.2, n_sign=0)
        assert count_sops(census) == 10**6

    def test_sparsity_validated(self):
        with pytest.raises(ValueError, match="sparsity"):
            OpCensus(ann_adds=1, timesteps=1, sparsity=1.5, n_sign=0)


class TestSnnEnergy:
    def test_zero_census(self):
        census = OpCensus(ann_adds=0, timesteps=0, sparsity=0.0, n_sign=0)
        assert snn_energy(census, cfg()) == 0.0

    def test_sop_term(self):
        census = OpCensus(ann_adds=10**6, timesteps=1, sparsity=1.0, n_sign=0)
        assert snn_energy(census, cfg(e_sop=0.9)) == pytest.approx(9e5)

    def test_sign_term(self):
        census = OpCensus(ann_adds=0, timesteps=1, sparsity=0.0, n_sign=10**3)
        assert snn_energy(census, cfg(e_sign=3.7)) == pytest.approx(3.7e3)

    def test_monotone_in_each_field(self):
        base = OpCensus(ann_adds=1000, timesteps=5, sparsity=0.5, n_sign=100)
        e0 = snn_energy(base, cfg())
        more_adds = OpCensus(ann_adds=2000, timesteps=5, sparsity=0.5, n_sign=100)
        more_t = OpCensus(ann_adds=1000, timesteps=6, sparsity=0.5, n_sign=100)
        more_s = OpCensus(ann_adds=1000, timesteps=5, sparsity=0.7, n_sign=100)
        more_sign = OpCensus(ann_adds=1000, timesteps=5, sparsity=0.5, n_sign=200)
        for census in (more_adds, more_t, more_s, more_sign):
            assert snn_energy(census, cfg()) >= e0 >= 0.0


class TestAnnEnergy:
    def test_zero(self):
        assert ann_energy(0, cfg()) == 0.0

    def test_default_flop_cost(self):
        assert EnergyConfig(e_sop=1.0, e_sign=1.0).e_flop == 12.5

    def test_reference_points(self):
        # the published per-step cost figures are consistent with the
        # 12.5 pJ/FLOP baseline to within 0.5%
        for _, (gflops, uj) in REFERENCE_TIMESTEP_TABLE.items():
            pj = ann_energy(gflops * 1e9, cfg())
            assert abs(pj / 1e6 - uj) / uj <= 0.005

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="flops"):
            ann_energy(-1, cfg())


class TestReferenceTableFit:
    def test_slope_and_residuals(self):
        slope, intercept, max_resid = reference_table_fit()
        assert slope == pytest.approx(0.0995, abs=0.0005)
        assert max_resid < 0.001


class TestCensusFromRun:
    def test_all_zero(self):
        tensors = [np.zeros((5, 4, 4)), np.zeros((3, 2))]
        census = census_from_run(tensors, ann_adds=100, timesteps=5)
        assert census.sparsity == 0.0
        assert census.n_sign == 0

    def test_all_one(self):
        census = census_from_run([np.ones((4, 4))], ann_adds=10, timesteps=1)
        assert census.sparsity == 1.0

    def test_matches_popcount_oracle(self):
        from rainspike.snnkernel import LIFConfig, SRBWeights, scu_forward

        rng = np.random.default_rng(0)
        x = rng.normal(0, 1, (5, 1, 4, 8, 8))
        weights = SRBWeights.random(channels=4, seed=3, scale=0.5)
        spikes = scu_forward(x, weights.scu1, LIFConfig(v_thr=0.2))
        census = census_from_run([spikes], ann_adds=100, timesteps=5)
        naive_ones = sum(
            1 for v in np.asarray(spikes).ravel() if v == 1.0
        )
        assert census.n_sign == naive_ones
        assert census.sparsity == naive_ones / spikes.size

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="no spike tensors"):
            census_from_run([], ann_adds=1, timesteps=1)


class TestEnergyConfig:
    def test_negative_cost_rejected(self):
        with pytest.raises(ValueError, match="energy costs"):
            EnergyConfig(e_sop=-1.0, e_sign=0.0)

    def test_flop_baseline_constant(self):
        assert ANN_FLOP_PJ == 12.5
