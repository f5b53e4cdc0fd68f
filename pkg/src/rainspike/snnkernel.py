"""Forward-only spiking building blocks: LIF neuron dynamics,
threshold-dependent batch normalization, and the spiking residual block
(two spiking-conv units plus a normalized shortcut convolution, with a
pluggable attention hook that defaults to identity)."""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LIFConfig:
    """Leaky integrate-and-fire neuron parameters."""

    tau: float = 2.0
    v_thr: float = 1.0
    v_reset: float = 0.0
    beta: float = 0.9  # membrane decay applied to non-spiking entries

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must be in [0, 1]")


@dataclass
class LIFState:
    """Membrane potentials carried across timesteps (caller-owned)."""

    u: np.ndarray

    @classmethod
    def zeros(cls, shape, cfg):
        return cls(u=np.full(shape, cfg.v_reset, dtype=np.float64))


def heaviside(x):
    """Unit step with the convention step(0) = 1; returns a binary tensor."""
    return (np.asarray(x) >= 0).astype(np.float64)


def lif_step(state, x, cfg):
    """One LIF update.

    H = U_prev + (1/tau) * (X - (U_prev - V_reset));
    S = step(H - V_thr);
    U_new = beta * H on non-spiking entries, V_reset on spiking ones.
    """
    x = np.asarray(x, dtype=np.float64)
    if state.u.shape != x.shape:
        raise ValueError(f"shape mismatch: state {state.u.shape} vs input {x.shape}")
    u_prev = state.u
    h = u_prev + (1.0 / cfg.tau) * (x - (u_prev - cfg.v_reset))
    s = heaviside(h - cfg.v_thr)
    u_new = (cfg.beta * h) * (1.0 - s) + cfg.v_reset * s
    return s, LIFState(u=u_new)


@dataclass(frozen=True)
class TdBNParams:
    """Threshold-dependent batch normalization parameters (per channel)."""

    alpha: float = 1.0
    v_th: float = 1.0
    lambda_k: np.ndarray = None
    beta_k: np.ndarray = None
    epsilon: float = 1e-5

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


def tdbn(x, params):
    """Normalize a (time, batch, channel, h, w) tensor per channel.

    Statistics are taken jointly over time, batch, and spatial axes; the
    normalized value is scaled to alpha * v_th standard deviation before the
    per-channel affine (lambda_k, beta_k).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 5:
        raise ValueError(f"expected (t, b, c, h, w) tensor, got shape {x.shape}")
    t, b, c, h, w = x.shape
    if t * b * h * w == 0:
        raise ValueError("zero-size statistics population")
    axes = (0, 1, 3, 4)
    mean = x.mean(axis=axes, keepdims=True)
    var = x.var(axis=axes, keepdims=True)
    xhat = params.alpha * params.v_th * (x - mean) / np.sqrt(var + params.epsilon)
    lam = np.ones(c) if params.lambda_k is None else np.asarray(params.lambda_k)
    bet = np.zeros(c) if params.beta_k is None else np.asarray(params.beta_k)
    return lam.reshape(1, 1, c, 1, 1) * xhat + bet.reshape(1, 1, c, 1, 1)


def conv2d(x, weight):
    """3x3 (or any odd k) same-padded, stride-1 2D convolution.

    x: (batch, c_in, h, w); weight: (c_out, c_in, k, k). Cross-correlation
    convention, zero padding.
    """
    x = np.asarray(x, dtype=np.float64)
    weight = np.asarray(weight, dtype=np.float64)
    co, ci, kh, kw = weight.shape
    if x.shape[1] != ci:
        raise ValueError(f"channel mismatch: input {x.shape[1]} vs weight {ci}")
    ph, pw = kh // 2, kw // 2
    xp = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    windows = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3))
    # windows: (b, c_in, h, w, kh, kw)
    return np.einsum("bihwyx,oiyx->bohw", windows, weight)


@dataclass
class SRBWeights:
    """Weights for one spiking residual block."""

    scu1: np.ndarray  # (c, c, k, k)
    scu2: np.ndarray
    shortcut: np.ndarray
    tdbn_params: TdBNParams = field(default_factory=TdBNParams)
    mau: object = None  # callable on the (t, b, c, h, w) tensor; None = identity

    @classmethod
    def random(cls, channels, kernel=3, seed=0, scale=0.1):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        shape = (channels, channels, kernel, kernel)
        return cls(
            scu1=rng.normal(0, scale, shape),
            scu2=rng.normal(0, scale, shape),
            shortcut=rng.normal(0, scale, shape),
            tdbn_params=TdBNParams(
                lambda_k=rng.normal(1, 0.1, channels),
                beta_k=rng.normal(0, 0.1, channels),
            ),
        )


def scu_forward(x, weight, cfg):
    """Spiking conv unit: convolution then LIF across the time axis with
    carried membrane state. x: (t, b, c, h, w) -> binary (t, b, c, h, w)."""
    x = np.asarray(x, dtype=np.float64)
    t = x.shape[0]
    state = LIFState.zeros(x.shape[1:], cfg)
    out = np.empty_like(x)
    for i in range(t):
        s, state = lif_step(state, conv2d(x[i], weight), cfg)
        out[i] = s
    return out


def srb_forward(x, weights, cfg):
    """Spiking residual block forward pass.

    branch 1: SCU(SCU(x)); branch 2: tdBN(Conv(x));
    output = MAU(branch1 + branch2) + x, MAU defaulting to identity.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 5:
        raise ValueError(f"expected (t, b, c, h, w) tensor, got shape {x.shape}")
    branch1 = scu_forward(scu_forward(x, weights.scu1, cfg), weights.scu2, cfg)
    conv_out = np.stack([conv2d(x[i], weights.shortcut) for i in range(x.shape[0])])
    branch2 = tdbn(conv_out, weights.tdbn_params)
    mixed = branch1 + branch2
    if weights.mau is not None:
        mixed = weights.mau(mixed)
    return mixed + x


def srb_ann_adds(channels, height, width, kernel=3):
    """Additive operation count of the matching non-spiking block, per
    timestep: three k*k convolutions over the feature map."""
    per_conv = channels * height * width * channels * kernel * kernel
    return 3 * per_conv


def srb_op_count(channels, height, width, timesteps, kernel=3):
    """Total additive operations of srb_forward; linear in timesteps."""
    return timesteps * srb_ann_adds(channels, height, width, kernel)
