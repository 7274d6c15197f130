"""Per-target landmark-to-face generator.

A flat landmark vector passes through two fully connected layers, is reshaped
to a small feature map, and is upsampled to the output resolution by a chain
of conv + pixel-shuffle blocks, ending in a tanh RGB head. Output resolution
is base_size * 2**num_upscales.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn
import torch.nn.functional as F

from lm2face.torch_utils import kaiming_init_

__all__ = [
    "pixel_shuffle",
    "space_to_depth",
    "UpscaleBlock",
    "GeneratorConfig",
    "FaceGenerator",
]


def pixel_shuffle(t, r):
    """Rearrange a (..., C*r*r, H, W) map to (..., C, r*H, r*W).

    Pure permutation: out[c, y, x] = in[c*r*r + (y % r)*r + (x % r), y // r, x // r].
    """
    if r < 1 or int(r) != r:
        raise ValueError(f"upscale factor must be a positive integer, got {r}")
    squeeze = t.dim() == 3
    if squeeze:
        t = t.unsqueeze(0)
    if t.dim() != 4:
        raise ValueError(f"expected (C, H, W) or (B, C, H, W), got {t.dim()}-dim")
    b, c, h, w = t.shape
    if c % (r * r) != 0:
        raise ValueError(f"channel count {c} not divisible by r*r = {r * r}")
    out_c = c // (r * r)
    out = (
        t.reshape(b, out_c, r, r, h, w)
        .permute(0, 1, 4, 2, 5, 3)
        .reshape(b, out_c, h * r, w * r)
    )
    return out.squeeze(0) if squeeze else out


def space_to_depth(t, r):
    """Inverse permutation of pixel_shuffle: (..., C, r*H, r*W) -> (..., C*r*r, H, W)."""
    if r < 1 or int(r) != r:
        raise ValueError(f"downscale factor must be a positive integer, got {r}")
    squeeze = t.dim() == 3
    if squeeze:
        t = t.unsqueeze(0)
    if t.dim() != 4:
        raise ValueError(f"expected (C, H, W) or (B, C, H, W), got {t.dim()}-dim")
    b, c, h, w = t.shape
    if h % r != 0 or w % r != 0:
        raise ValueError(f"spatial dims ({h}, {w}) not divisible by {r}")
    out = (
        t.reshape(b, c, h // r, r, w // r, r)
        .permute(0, 1, 3, 5, 2, 4)
        .reshape(b, c * r * r, h // r, w // r)
    )
    return out.squeeze(0) if squeeze else out


class UpscaleBlock(nn.Module):
    """Conv to 4x the target channels, pixel-shuffle by 2, leaky ReLU."""

    def __init__(self, in_channels, out_channels, slope=0.2, instance_norm=False):
        super().__init__()
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.conv = nn.Conv2d(
            in_channels, 4 * out_channels, kernel_size=3, padding=1, padding_mode="reflect"
        )
        self.norm = nn.InstanceNorm2d(out_channels, affine=True) if instance_norm else None
        self.slope = slope

    def forward(self, x):
        if x.shape[-3] != self.in_channels:
            raise ValueError(f"expected {self.in_channels} input channels, got {x.shape[-3]}")
        x = pixel_shuffle(self.conv(x), 2)
        if self.norm is not None:
            x = self.norm(x)
        return F.leaky_relu(x, self.slope)


@dataclass
class GeneratorConfig:
    landmark_dim: int
    num_upscales: int = 6
    base_size: int = 4
    base_channels: int = 512
    fc_hidden: int = 1024
    min_channels: int = 16
    channel_schedule: tuple = None
    instance_norm: bool = False

    def __post_init__(self):
        if self.landmark_dim <= 0 or self.landmark_dim % 2 != 0:
            raise ValueError(f"landmark_dim must be a positive even count, got {self.landmark_dim}")
        if self.num_upscales < 1:
            raise ValueError("need at least one upscale block")
        if self.channel_schedule is not None and len(self.channel_schedule) != self.num_upscales:
            raise ValueError(
                f"channel_schedule has {len(self.channel_schedule)} entries "
                f"for {self.num_upscales} upscales"
            )

    @property
    def output_size(self):
        return self.base_size * 2**self.num_upscales

    def resolved_schedule(self):
        if self.channel_schedule is not None:
            return tuple(self.channel_schedule)
        return tuple(
            max(self.base_channels >> (i + 1), self.min_channels)
            for i in range(self.num_upscales)
        )

    @classmethod
    def desk(cls, landmark_dim=24):
        """Small configuration for 64x64 runs on a CPU."""
        return cls(
            landmark_dim=landmark_dim,
            num_upscales=4,
            base_channels=128,
            fc_hidden=256,
        )


class FaceGenerator(nn.Module):
    """Landmark vector -> RGB image in [-1, 1] for a single target identity."""

    def __init__(self, config):
        super().__init__()
        self.config = config
        c0, s0 = config.base_channels, config.base_size
        self.fc1 = nn.Linear(config.landmark_dim, config.fc_hidden)
        self.fc2 = nn.Linear(config.fc_hidden, c0 * s0 * s0)
        blocks = []
        channels = c0
        for out_ch in config.resolved_schedule():
            blocks.append(UpscaleBlock(channels, out_ch, instance_norm=config.instance_norm))
            channels = out_ch
        self.blocks = nn.ModuleList(blocks)
        self.to_rgb = nn.Conv2d(channels, 3, kernel_size=3, padding=1, padding_mode="reflect")
        kaiming_init_(self)

    @property
    def output_size(self):
        return self.config.output_size

    def forward(self, lms):
        """Synthesize faces from (B, 2L) or (2L,) landmark vectors."""
        squeeze = lms.dim() == 1
        if squeeze:
            lms = lms.unsqueeze(0)
        if lms.dim() != 2 or lms.shape[1] != self.config.landmark_dim:
            raise ValueError(
                f"expected landmark vectors of length {self.config.landmark_dim}, "
                f"got shape {tuple(lms.shape)}"
            )
        x = F.leaky_relu(self.fc1(lms), 0.2)
        x = F.leaky_relu(self.fc2(x), 0.2)
        x = x.reshape(-1, self.config.base_channels, self.config.base_size, self.config.base_size)
        for block in self.blocks:
            x = block(x)
        img = torch.tanh(self.to_rgb(x))
        return img.squeeze(0) if squeeze else img
