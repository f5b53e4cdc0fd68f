"""Scikit-learn style transformer wrappers around the functional core, so the
simulation stages compose with sklearn pipelines and share get_params /
set_params / clone semantics."""

from sklearn.base import BaseEstimator, TransformerMixin

from . import rainsynth, spikecam, spikerecon
from .streamio import CameraConfig, ResetMode
from .validation import check_image_u8


class RainAugmenter(BaseEstimator, TransformerMixin):
    """Adds a drifting, parameterized rain layer to background images.

    transform(X) expects a list of (h, w, 3) uint8 images and returns, per
    image, a list of `n_frames` rainy frames.
    """

    def __init__(self, length_px=9, width_px=1, angle_deg=0.0, noise_level=10,
                 opacity=0.8, drift_per_frame=(2.0, 1.0), n_frames=14, seed=0):
        self.length_px = length_px
        self.width_px = width_px
        self.angle_deg = angle_deg
        self.noise_level = noise_level
        self.opacity = opacity
        self.drift_per_frame = drift_per_frame
        self.n_frames = n_frames
        self.seed = seed

    def _params(self):
        return rainsynth.RainParams(
            length_px=self.length_px,
            width_px=self.width_px,
            angle_deg=self.angle_deg,
            noise_level=self.noise_level,
            opacity=self.opacity,
            drift_per_frame=tuple(self.drift_per_frame),
            seed=self.seed,
        )

    def fit(self, X, y=None):
        self._params()  # validate parameter ranges
        return self

    def transform(self, X):
        params = self._params()
        out = []
        for img in X:
            frames, _ = rainsynth.generate_sequence(
                check_image_u8(img), params, self.n_frames
            )
            out.append(frames)
        return out


class SpikeCameraSimulator(BaseEstimator, TransformerMixin):
    """Turns RGB frame sequences into Bayer color spike streams.

    transform(X) expects a list of frame sequences (each a list of (h, w, 3)
    uint8 images) and returns a list of ColorSpikeStream.
    """

    def __init__(self, pattern="RGGB", threshold=1.0, sigma_g=0.0, sigma_p=0.0,
                 upsample_factor=1, reset_mode="subtract", seed=0):
        self.pattern = pattern
        self.threshold = threshold
        self.sigma_g = sigma_g
        self.sigma_p = sigma_p
        self.upsample_factor = upsample_factor
        self.reset_mode = reset_mode
        self.seed = seed

    def _config(self):
        mode = {
            "subtract": ResetMode.SUBTRACT_THRESHOLD,
            "zero": ResetMode.RESET_TO_ZERO,
        }[self.reset_mode]
        return CameraConfig(
            threshold=self.threshold,
            sigma_g=self.sigma_g,
            sigma_p=self.sigma_p,
            upsample_factor=self.upsample_factor,
            reset_mode=mode,
            seed=self.seed,
        )

    def fit(self, X, y=None):
        self._config()
        return self

    def transform(self, X):
        config = self._config()
        out = []
        for frames in X:
            first = check_image_u8(frames[0])
            mask = spikecam.make_bayer_mask(first.shape[:2], self.pattern)
            out.append(spikecam.simulate_color_spikes(frames, mask, config))
        return out


class SpikeReconstructor(BaseEstimator, TransformerMixin):
    """Reconstructs color images from color spike streams (TFP or TFI).

    transform(X) expects a list of ColorSpikeStream and returns a list of
    (h, w, 3) uint8 images.
    """

    def __init__(self, method="tfp", window=39, center_t=None):
        self.method = method
        self.window = window
        self.center_t = center_t

    def _config(self):
        return spikerecon.ReconConfig(
            method=spikerecon.ReconMethod(self.method), window=self.window
        )

    def fit(self, X, y=None):
        self._config()
        return self

    def transform(self, X):
        config = self._config()
        out = []
        for cstream in X:
            t = self.center_t
            if t is None:
                t = cstream.stream.timesteps // 2
            out.append(spikerecon.cfa_reconstruct(cstream, config, t))
        return out
