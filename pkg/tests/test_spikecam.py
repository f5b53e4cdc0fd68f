import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rainspike.spikecam import (
    integrate_and_fire,
    make_bayer_mask,
    mosaic_intensity,
    simulate_color_spikes,
)
from rainspike.streamio import (
    CameraConfig,
    ResetMode,
    SpikeStream,
    pack_bits,
    read_stream,
    stream_stats,
    unpack_bits,
    write_stream,
)

from oracles import popcount_payload, scalar_integrate_and_fire


def constant_frames(value, n, shape=(4, 4)):
    return [np.full(shape, value, dtype=np.float64)] * n


class TestBayerMask:
    def test_rggb_tile(self):
        m = make_bayer_mask((2, 2), "RGGB")
        assert m.m_r.tolist() == [[1, 0], [0, 0]]
        assert m.m_g.tolist() == [[0, 1], [1, 0]]
        assert m.m_b.tolist() == [[0, 0], [0, 1]]

    def test_counts_4x4(self):
        m = make_bayer_mask((4, 4), "RGGB")
        assert m.m_r.sum() == 4
        assert m.m_g.sum() == 8
        assert m.m_b.sum() == 4

    @pytest.mark.parametrize("pattern", ["RGGB", "BGGR", "GRBG", "GBRG"])
    def test_partition(self, pattern):
        for dims in [(2, 2), (5, 7), (6, 6), (3, 8)]:
            m = make_bayer_mask(dims, pattern)
            total = m.m_r.astype(int) + m.m_g.astype(int) + m.m_b.astype(int)
            assert np.all(total == 1)

    def test_zero_dims_rejected(self):
        with pytest.raises(ValueError, match="empty image"):
            make_bayer_mask((0, 2), "RGGB")


class TestIntegrateAndFire:
    def test_dark_input_never_fires(self):
        stream = integrate_and_fire(constant_frames(0.0, 10), CameraConfig())
        assert not stream.to_dense().any()

    def test_half_intensity_fires_every_second_step(self):
        stream = integrate_and_fire(constant_frames(0.5, 10), CameraConfig())
        dense = stream.to_dense()[:, 0, 0]
        assert dense.tolist() == [False, True] * 5

    def test_matches_scalar_oracle(self):
        intensity = 0.3
        stream = integrate_and_fire(
            constant_frames(intensity, 1000, shape=(2, 2)), CameraConfig()
        )
        expected = scalar_integrate_and_fire(intensity, 1.0, 1000)
        dense = stream.to_dense()
        for y in range(2):
            for x in range(2):
                assert dense[:, y, x].astype(int).tolist() == expected
        count = dense[:, 0, 0].sum()
        assert abs(count - intensity * 1000) <= 1

    def test_upsample_substep_length(self):
        # one frame at I=1.0 with 4 substeps of dt=0.25 integrates to exactly
        # the threshold on the last substep
        stream = integrate_and_fire(
            constant_frames(1.0, 1), CameraConfig(upsample_factor=4)
        )
        dense = stream.to_dense()[:, 0, 0]
        assert dense.tolist() == [False, False, False, True]

    def test_reset_mode_ordering(self):
        frames = constant_frames(0.37, 200)
        sub = integrate_and_fire(
            frames, CameraConfig(reset_mode=ResetMode.SUBTRACT_THRESHOLD)
        )
        zero = integrate_and_fire(
            frames, CameraConfig(reset_mode=ResetMode.RESET_TO_ZERO)
        )
        assert sub.to_dense().sum() >= zero.to_dense().sum()

    def test_monotone_in_intensity(self):
        counts = []
        for intensity in (0.1, 0.3, 0.5, 0.9):
            stream = integrate_and_fire(
                constant_frames(intensity, 100), CameraConfig()
            )
            counts.append(stream.to_dense()[:, 0, 0].sum())
        assert counts == sorted(counts)

    def test_noise_deterministic_given_seed(self):
        frames = constant_frames(0.4, 50)
        cfg = CameraConfig(sigma_g=0.05, sigma_p=0.1, seed=99)
        a = integrate_and_fire(frames, cfg)
        b = integrate_and_fire(frames, cfg)
        assert a.payload == b.payload

    def test_empty_frame_list_rejected(self):
        with pytest.raises(ValueError, match="empty frame list"):
            integrate_and_fire([], CameraConfig())

    def test_dims_mismatch_rejected(self):
        frames = [np.zeros((4, 4)), np.zeros((4, 5))]
        with pytest.raises(ValueError, match="dims mismatch"):
            integrate_and_fire(frames, CameraConfig())


class TestColorSpikes:
    def test_black_video_silent(self):
        frames = [np.zeros((4, 4, 3), dtype=np.uint8)] * 20
        mask = make_bayer_mask((4, 4), "RGGB")
        cstream = simulate_color_spikes(frames, mask, CameraConfig())
        assert not cstream.stream.to_dense().any()

    def test_pure_red_spikes_only_on_red_pixels(self):
        frame = np.zeros((4, 4, 3), dtype=np.uint8)
        frame[:, :, 0] = 255
        mask = make_bayer_mask((4, 4), "RGGB")
        cstream = simulate_color_spikes([frame] * 20, mask, CameraConfig())
        counts = cstream.stream.to_dense().sum(axis=0)
        assert np.all(counts[mask.m_r == 1] > 0)
        assert np.all(counts[mask.m_r == 0] == 0)

    def test_gray_uniform_rate(self):
        frame = np.full((4, 4, 3), 128, dtype=np.uint8)
        mask = make_bayer_mask((4, 4), "RGGB")
        n = 200
        cstream = simulate_color_spikes([frame] * n, mask, CameraConfig())
        counts = cstream.stream.to_dense().sum(axis=0)
        assert counts.min() == counts.max()  # identical drive at every pixel
        expected = scalar_integrate_and_fire(128 / 255, 1.0, n)
        assert counts[0, 0] == sum(expected)
        assert abs(counts[0, 0] / n - 128 / 255) <= 1 / n

    def test_mosaic_intensity_selects_channel(self):
        frame = np.zeros((2, 2, 3), dtype=np.uint8)
        frame[:, :, 0] = 255  # red
        frame[:, :, 1] = 51  # green
        frame[:, :, 2] = 102  # blue
        mask = make_bayer_mask((2, 2), "RGGB")
        mono = mosaic_intensity(frame, mask)
        assert mono[0, 0] == pytest.approx(1.0)
        assert mono[0, 1] == pytest.approx(0.2)
        assert mono[1, 0] == pytest.approx(0.2)
        assert mono[1, 1] == pytest.approx(0.4)

    def test_dim_mismatch_rejected(self):
        frame = np.zeros((4, 4, 3), dtype=np.uint8)
        mask = make_bayer_mask((6, 6), "RGGB")
        with pytest.raises(ValueError, match="dims mismatch"):
            simulate_color_spikes([frame], mask, CameraConfig())


class TestPackingAndFormat:
    @given(
        t=st.integers(1, 5),
        h=st.integers(1, 8),
        w=st.integers(1, 8),
        seed=st.integers(0, 2**32 - 1),
    )
    @settings(max_examples=50, deadline=None)
    def test_pack_unpack_roundtrip(self, t, h, w, seed):
        rng = np.random.default_rng(seed)
        dense = rng.integers(0, 2, (t, h, w)).astype(bool)
        assert np.array_equal(unpack_bits(pack_bits(dense), (t, h, w)), dense)

    def test_bit_order_msb_first_txy(self):
        dense = np.zeros((2, 2, 2), dtype=bool)
        dense[0, 0, 0] = True  # first bit -> MSB of first byte
        dense[1, 1, 1] = True  # last of 8 bits -> LSB of first byte
        payload = pack_bits(dense)
        assert payload == bytes([0b10000001])

    def test_file_roundtrip(self, tmp_path):
        rng = np.random.default_rng(0)
        dense = rng.integers(0, 2, (7, 5, 3)).astype(bool)
        cfg = CameraConfig(threshold=1.5, sigma_g=0.25, sigma_p=0.125, seed=4)
        stream = SpikeStream.from_dense(dense, config=cfg, pattern="GRBG")
        path = tmp_path / "s.spks"
        write_stream(stream, path)
        loaded = read_stream(path)
        assert loaded.payload == stream.payload
        assert (loaded.height, loaded.width, loaded.timesteps) == (5, 3, 7)
        assert loaded.pattern == "GRBG"
        assert loaded.config.threshold == 1.5
        assert loaded.config.sigma_g == 0.25
        assert loaded.config.sigma_p == 0.125
        assert loaded.config.reset_mode is ResetMode.SUBTRACT_THRESHOLD

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.spks"
        path.write_bytes(b"NOPE" + b"\x00" * 60)
        with pytest.raises(ValueError, match="bad magic"):
            read_stream(path)

    def test_truncated_rejected(self, tmp_path):
        path = tmp_path / "short.spks"
        path.write_bytes(b"SPK")
        with pytest.raises(ValueError, match="truncated"):
            read_stream(path)


class TestStreamStats:
    def test_all_zero(self):
        stream = SpikeStream.from_dense(np.zeros((10, 4, 4), dtype=bool))
        assert stream_stats(stream)["sparsity"] == 0.0

    def test_all_one(self):
        stream = SpikeStream.from_dense(np.ones((10, 4, 4), dtype=bool))
        stats = stream_stats(stream)
        assert stats["sparsity"] == 1.0
        assert stats["total_spikes"] == 160

    def test_rate_matches_intensity(self):
        stream = integrate_and_fire(constant_frames(0.3, 1000), CameraConfig())
        stats = stream_stats(stream)
        assert np.all(np.abs(stats["per_pixel_counts"] - 0.3 * 1000) <= 1)

    def test_matches_raw_popcount(self):
        rng = np.random.default_rng(8)
        dense = rng.integers(0, 2, (16, 8, 8)).astype(bool)
        stream = SpikeStream.from_dense(dense)
        stats = stream_stats(stream)
        assert stats["total_spikes"] == popcount_payload(stream.payload)
