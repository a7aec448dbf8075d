# Copyright 2026 The olatkit Authors
# SPDX-License-Identifier: Apache-2.0
"""olatkit: OLAT reflectance-field alignment and image-based relighting.

Numpy-facing bindings over the C++ core. Images are (H, W, 3) float32
linear radiance, OLAT stacks are (N, H, W, 3), LED weights are (N, 3)
float64, flow fields are (H, W, 2).
"""

from olatkit._core import (
    IoError,
    LightRig,
    SyntheticScene,
    ValidationError,
    composite,
    compute_flow,
    default_scene,
    demosaic,
    env_to_weights,
    estimate_stats,
    fibonacci_rig,
    load_rig,
    mae,
    mean_param,
    ms_ssim,
    mse,
    normal_angular_error,
    normalize_stream,
    photometric_loss,
    psnr,
    read_image,
    read_pfm,
    relight,
    render_env_direct,
    render_olat,
    rim_preset,
    smooth_env,
    ssim,
    warp,
    write_pfm,
    write_png,
)

__version__ = "0.1.0"

__all__ = [
    "IoError",
    "LightRig",
    "SyntheticScene",
    "ValidationError",
    "composite",
    "compute_flow",
    "default_scene",
    "demosaic",
    "env_to_weights",
    "estimate_stats",
    "fibonacci_rig",
    "load_rig",
    "mae",
    "mean_param",
    "ms_ssim",
    "mse",
    "normal_angular_error",
    "normalize_stream",
    "photometric_loss",
    "psnr",
    "read_image",
    "read_pfm",
    "relight",
    "render_env_direct",
    "render_olat",
    "rim_preset",
    "smooth_env",
    "ssim",
    "warp",
    "write_pfm",
    "write_png",
]
