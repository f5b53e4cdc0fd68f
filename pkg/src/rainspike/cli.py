"""Command-line entry points.

Subcommands: rainsynth, spikecam, spikerecon, snnkernel, energy, metrics,
pipeline. Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

import argparse
import json
import sys
import zlib
from pathlib import Path

import numpy as np

from . import energy as energy_mod
from . import imageio, metrics, pipeline, rainsynth, snnkernel, spikecam
from . import spikerecon, streamio


def _parse_drift(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("drift must be 'rows,cols'")
    return float(parts[0]), float(parts[1])


def _add_rainsynth(sub):
    p = sub.add_parser("rainsynth", help="generate rainy frame sequences")
    p.add_argument("--background", required=True,
                   help="background image, or a directory of backgrounds "
                        "(per-image parameters are then sampled)")
    p.add_argument("--frames", type=int, default=14)
    p.add_argument("--length", type=int, default=9)
    p.add_argument("--width", type=int, default=1)
    p.add_argument("--angle", type=float, default=0.0)
    p.add_argument("--noise", type=int, default=10)
    p.add_argument("--opacity", type=float, default=0.8)
    p.add_argument("--drift", type=_parse_drift, default=(2.0, 1.0))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)


def _run_rainsynth(args):
    bg_path = Path(args.background)
    out = Path(args.out)
    if bg_path.is_dir():
        backgrounds = sorted(
            p for p in bg_path.iterdir()
            if p.suffix.lower() in (".png", ".ppm")
        )
        if not backgrounds:
            print("no backgrounds found", file=sys.stderr)
            return 1
        written = pipeline.generate_rain_dataset(
            backgrounds, out, n_frames=args.frames, seed=args.seed
        )
        print(f"wrote {len(written)} scenes to {out}")
        return 0
    params = rainsynth.RainParams(
        length_px=args.length,
        width_px=args.width,
        angle_deg=args.angle,
        noise_level=args.noise,
        opacity=args.opacity,
        drift_per_frame=args.drift,
        seed=args.seed,
    )
    background = imageio.load_image(bg_path)
    frames, _ = rainsynth.generate_sequence(background, params, args.frames)
    out.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(frames):
        imageio.save_image(frame, out / f"rainy_{i:03d}.png")
    manifest = {
        "background": str(bg_path),
        "n_frames": args.frames,
        "params": {
            "length": params.length_px, "width": params.width_px,
            "angle": params.angle_deg, "noise": params.noise_level,
            "opacity": params.opacity, "drift": list(params.drift_per_frame),
            "seed": params.seed,
        },
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    print(f"wrote {args.frames} frames to {out}")
    return 0


def _add_spikecam(sub):
    p = sub.add_parser("spikecam", help="simulate a color spike camera")
    p.add_argument("--frames", required=True, help="directory of input frames")
    p.add_argument("--pattern", default="rggb",
                   choices=["rggb", "bggr", "grbg", "gbrg"])
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--sigma-g", type=float, default=0.0)
    p.add_argument("--sigma-p", type=float, default=0.0)
    p.add_argument("--upsample", type=int, default=1)
    p.add_argument("--reset", default="subtract", choices=["subtract", "zero"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)


def _run_spikecam(args):
    frame_dir = Path(args.frames)
    paths = sorted(
        p for p in frame_dir.iterdir() if p.suffix.lower() in (".png", ".ppm")
    )
    if not paths:
        print("no input frames found", file=sys.stderr)
        return 1
    frames = [imageio.load_image(p) for p in paths]
    config = streamio.CameraConfig(
        threshold=args.theta,
        sigma_g=args.sigma_g,
        sigma_p=args.sigma_p,
        upsample_factor=args.upsample,
        reset_mode=streamio.ResetMode.SUBTRACT_THRESHOLD
        if args.reset == "subtract"
        else streamio.ResetMode.RESET_TO_ZERO,
        seed=args.seed,
    )
    mask = spikecam.make_bayer_mask(frames[0].shape[:2], args.pattern.upper())
    cstream = spikecam.simulate_color_spikes(frames, mask, config)
    streamio.write_stream(cstream.stream, args.out)
    stats = streamio.stream_stats(cstream.stream)
    print(f"wrote {args.out}: T={cstream.stream.timesteps}, "
          f"sparsity={stats['sparsity']:.4f}")
    return 0


def _add_spikerecon(sub):
    p = sub.add_parser("spikerecon", help="reconstruct intensity from spikes")
    p.add_argument("--stream", required=True)
    p.add_argument("--method", default="tfp", choices=["tfp", "tfi"])
    p.add_argument("--window", type=int, default=39)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--out", required=True)


def _run_spikerecon(args):
    stream = streamio.read_stream(args.stream)
    t = args.t if args.t is not None else stream.timesteps // 2
    config = spikerecon.ReconConfig(
        method=spikerecon.ReconMethod(args.method),
        window=min(args.window, stream.timesteps),
    )
    if stream.pattern is None:
        if config.method is spikerecon.ReconMethod.TFP:
            mono = spikerecon.tfp(stream, t, config.window)
        else:
            mono = spikerecon.tfi(stream, t)
        gray = np.rint(np.clip(mono * 255.0, 0, 255)).astype(np.uint8)
        image = np.stack([gray] * 3, axis=-1)
    else:
        mask = spikecam.make_bayer_mask(
            (stream.height, stream.width), stream.pattern
        )
        cstream = spikecam.ColorSpikeStream(stream=stream, mask=mask)
        image = spikerecon.cfa_reconstruct(cstream, config, t)
    imageio.save_image(image, args.out)
    print(f"wrote {args.out}")
    return 0


def _add_snnkernel(sub):
    p = sub.add_parser("snnkernel", help="spiking kernel utilities")
    k = p.add_subparsers(dest="snn_command", required=True)
    demo = k.add_parser("demo", help="run a seeded residual-block forward pass")
    demo.add_argument("--timesteps", type=int, default=5)
    demo.add_argument("--channels", type=int, default=8)
    demo.add_argument("--size", type=int, default=16)
    demo.add_argument("--seed", type=int, default=3)
    demo.add_argument("--weights", default=None,
                      help="optional tensor container with scu1/scu2/shortcut")


def _run_snnkernel(args):
    from . import tensorio

    cfg = snnkernel.LIFConfig()
    if args.weights:
        tensors = tensorio.read_tensors(args.weights)
        weights = snnkernel.SRBWeights(
            scu1=tensors["scu1"],
            scu2=tensors["scu2"],
            shortcut=tensors["shortcut"],
            tdbn_params=snnkernel.TdBNParams(
                lambda_k=tensors.get("lambda_k"),
                beta_k=tensors.get("beta_k"),
            ),
        )
        channels = weights.scu1.shape[0]
    else:
        channels = args.channels
        weights = snnkernel.SRBWeights.random(channels, seed=args.seed)
    rng = np.random.Generator(np.random.Philox(key=np.uint64(args.seed)))
    x = rng.normal(0, 1, (args.timesteps, 1, channels, args.size, args.size))
    out = snnkernel.srb_forward(x, weights, cfg)
    checksum = zlib.crc32(np.ascontiguousarray(out).tobytes())
    print(f"output shape: {out.shape}")
    print(f"output mean: {out.mean():.6f}  std: {out.std():.6f}")
    print(f"output crc32: {checksum:08x}")
    return 0


def _add_energy(sub):
    p = sub.add_parser("energy", help="SNN energy accounting")
    k = p.add_subparsers(dest="energy_command", required=True)
    rep = k.add_parser("report", help="energy report from an op census")
    rep.add_argument("--census", required=True,
                     help="JSON with ann_adds, timesteps, sparsity, n_sign")
    rep.add_argument("--e-sop", type=float, required=True)
    rep.add_argument("--e-sign", type=float, required=True)
    rep.add_argument("--e-flop", type=float, default=energy_mod.ANN_FLOP_PJ)


def _run_energy(args):
    data = json.loads(Path(args.census).read_text())
    census = energy_mod.OpCensus(
        ann_adds=int(data["ann_adds"]),
        timesteps=int(data["timesteps"]),
        sparsity=float(data["sparsity"]),
        n_sign=int(data["n_sign"]),
    )
    cfg = energy_mod.EnergyConfig(
        e_sop=args.e_sop, e_sign=args.e_sign, e_flop=args.e_flop
    )
    e_snn = energy_mod.snn_energy(census, cfg)
    flops = census.ann_adds * census.timesteps
    e_ann = energy_mod.ann_energy(flops, cfg)
    print(f"synaptic ops: {energy_mod.count_sops(census)}")
    print(f"snn energy: {e_snn:.3f} pJ ({e_snn / 1e6:.6f} uJ)")
    print(f"ann energy: {e_ann:.3f} pJ ({e_ann / 1e6:.6f} uJ)")
    if e_ann > 0:
        print(f"snn/ann ratio: {e_snn / e_ann:.4f}")
    return 0


def _add_metrics(sub):
    p = sub.add_parser("metrics", help="Y-channel PSNR/SSIM between two images")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)


def _run_metrics(args):
    ref = imageio.load_image(args.ref)
    test = imageio.load_image(args.test)
    report = metrics.evaluate(ref, test)
    print(f"psnr_db: {report.psnr_db:.4f}")
    print(f"ssim: {report.ssim:.6f}")
    return 0


def _add_pipeline(sub):
    p = sub.add_parser("pipeline", help="run the full synthesis/recon pipeline")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="override the rain and camera seeds")


def _run_pipeline(args):
    text = Path(args.config).read_text()
    cfg = pipeline.validate_config(text, seed_override=args.seed)
    result = pipeline.run_pipeline(cfg)
    for key, value in result.items():
        print(f"{key}: {value}")
    return 0


_RUNNERS = {
    "rainsynth": _run_rainsynth,
    "spikecam": _run_spikecam,
    "spikerecon": _run_spikerecon,
    "snnkernel": _run_snnkernel,
    "energy": _run_energy,
    "metrics": _run_metrics,
    "pipeline": _run_pipeline,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rainspike",
        description="Rain synthesis, spike-camera simulation, reconstruction, "
                    "SNN kernels, and evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_rainsynth(sub)
    _add_spikecam(sub)
    _add_spikerecon(sub)
    _add_snnkernel(sub)
    _add_energy(sub)
    _add_metrics(sub)
    _add_pipeline(sub)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _RUNNERS[args.command](args)
    except (ValueError, pipeline.ConfigError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except pipeline.PipelineError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
