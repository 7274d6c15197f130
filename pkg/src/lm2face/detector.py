"""Differentiable landmark detector.

A single-stack hourglass maps an image to one raw score map per landmark at
1/4 input resolution; a spatial softmax followed by an expectation over
pixel-center coordinates (soft-argmax) turns each map into a numerical (x, y)
in (0, 1), keeping the whole image-to-coordinates path differentiable.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn
import torch.nn.functional as F

from lm2face.torch_utils import kaiming_init_

__all__ = [
    "coordinate_grid",
    "spatial_softmax",
    "dsnt",
    "DetectorConfig",
    "LandmarkDetector",
    "detection_loss",
]


def coordinate_grid(height, width, dtype=torch.float32, device=None):
    """Pixel-center coordinate maps: gx[y, x] = (x + 0.5)/W, gy[y, x] = (y + 0.5)/H."""
    xs = (torch.arange(width, dtype=dtype, device=device) + 0.5) / width
    ys = (torch.arange(height, dtype=dtype, device=device) + 0.5) / height
    gy, gx = torch.meshgrid(ys, xs, indexing="ij")
    return gx, gy


def spatial_softmax(raw, temperature=1.0):
    """Per-channel softmax over spatial positions; raises on non-finite scores."""
    if not torch.isfinite(raw).all():
        raise ValueError("raw score maps contain non-finite values")
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    b_h_w = raw.shape
    flat = (raw / temperature).reshape(*b_h_w[:-2], -1)
    return F.softmax(flat, dim=-1).reshape(b_h_w)


def dsnt(raw, temperature=1.0):
    """Soft-argmax readout of raw score maps.

    raw: (L, H, W) or (B, L, H, W). Returns (L, 2) or (B, L, 2) coordinates,
    each the probability-weighted mean of pixel-center positions, so always
    strictly inside (0, 1).
    """
    squeeze = raw.dim() == 3
    if squeeze:
        raw = raw.unsqueeze(0)
    if raw.dim() != 4:
        raise ValueError(f"expected (L, H, W) or (B, L, H, W), got {raw.dim()}-dim")
    probs = spatial_softmax(raw, temperature)
    gx, gy = coordinate_grid(raw.shape[-2], raw.shape[-1], dtype=raw.dtype, device=raw.device)
    x = (probs * gx).sum(dim=(-2, -1))
    y = (probs * gy).sum(dim=(-2, -1))
    coords = torch.stack([x, y], dim=-1)
    return coords.squeeze(0) if squeeze else coords


class _ConvBlock(nn.Module):
    def __init__(self, channels, slope=0.2):
        super().__init__()
        self.conv = nn.Conv2d(channels, channels, kernel_size=3, padding=1)
        self.slope = slope

    def forward(self, x):
        return F.leaky_relu(self.conv(x), self.slope)


class _HourglassLevel(nn.Module):
    """Recursive encoder-decoder level with a skip path at each resolution."""

    def __init__(self, channels, depth):
        super().__init__()
        self.skip = _ConvBlock(channels)
        self.down = _ConvBlock(channels)
        self.inner = _HourglassLevel(channels, depth - 1) if depth > 1 else _ConvBlock(channels)
        self.up = _ConvBlock(channels)

    def forward(self, x):
        s = self.skip(x)
        y = F.max_pool2d(x, 2)
        y = self.down(y)
        y = self.inner(y)
        y = self.up(y)
        y = F.interpolate(y, scale_factor=2, mode="nearest")
        return s + y


@dataclass
class DetectorConfig:
    point_count: int = 12
    input_size: int = 64
    base_channels: int = 128
    depth: int = 3
    temperature: float = 1.0

    def __post_init__(self):
        if self.input_size % 4 != 0:
            raise ValueError("input_size must be divisible by 4 (two stride-2 stem convs)")
        if (self.input_size // 4) % (2**self.depth) != 0:
            raise ValueError(
                f"heatmap size {self.input_size // 4} not divisible by 2^depth = {2**self.depth}"
            )

    @property
    def heatmap_size(self):
        return self.input_size // 4


class LandmarkDetector(nn.Module):
    """Image -> per-landmark score maps -> normalized coordinates."""

    def __init__(self, config):
        super().__init__()
        self.config = config
        c = config.base_channels
        self.stem = nn.Sequential(
            nn.Conv2d(3, c // 2, kernel_size=3, stride=2, padding=1),
            nn.LeakyReLU(0.2),
            nn.Conv2d(c // 2, c, kernel_size=3, stride=2, padding=1),
            nn.LeakyReLU(0.2),
        )
        self.hourglass = _HourglassLevel(c, config.depth)
        self.head = nn.Sequential(
            _ConvBlock(c),
            nn.Conv2d(c, config.point_count, kernel_size=1),
        )
        kaiming_init_(self)

    @property
    def input_size(self):
        return self.config.input_size

    def heatmaps(self, images):
        """Raw score maps at 1/4 input resolution: (B, L, H/4, W/4)."""
        squeeze = images.dim() == 3
        if squeeze:
            images = images.unsqueeze(0)
        size = self.config.input_size
        if images.shape[-3:] != (3, size, size):
            raise ValueError(
                f"expected 3x{size}x{size} images, got {tuple(images.shape[-3:])}; "
                "resize before calling"
            )
        raw = self.head(self.hourglass(self.stem(images)))
        return raw.squeeze(0) if squeeze else raw

    def forward(self, images):
        """Detected landmarks as (B, L, 2) (or (L, 2)) normalized coordinates."""
        return dsnt(self.heatmaps(images), self.config.temperature)

    detect = forward


def _gaussian_target_maps(coords, height, width, sigma_px):
    """Unit-sum Gaussian heatmaps centered at normalized target coords."""
    gx, gy = coordinate_grid(height, width, dtype=coords.dtype, device=coords.device)
    tx = coords[..., 0].unsqueeze(-1).unsqueeze(-1)
    ty = coords[..., 1].unsqueeze(-1).unsqueeze(-1)
    sx = sigma_px / width
    sy = sigma_px / height
    logq = -0.5 * (((gx - tx) / sx) ** 2 + ((gy - ty) / sy) ** 2)
    q = torch.exp(logq - logq.amax(dim=(-2, -1), keepdim=True))
    return q / q.sum(dim=(-2, -1), keepdim=True)


def _js_divergence(p, q, eps=1e-12):
    m = 0.5 * (p + q)
    kl_pm = (p * (torch.log(p.clamp_min(eps)) - torch.log(m.clamp_min(eps)))).sum(dim=(-2, -1))
    kl_qm = (q * (torch.log(q.clamp_min(eps)) - torch.log(m.clamp_min(eps)))).sum(dim=(-2, -1))
    return 0.5 * kl_pm + 0.5 * kl_qm


def detection_loss(raw, target_coords, temperature=1.0, sigma_px=1.0, reg_weight=1.0):
    """Supervision for detector training.

    Mean per-point Euclidean error between the soft-argmax readout and target
    coordinates, plus a Jensen-Shannon regularizer pulling each normalized
    score map toward a unit-sum Gaussian (sigma_px heatmap pixels) at the
    target location, which keeps heatmaps peaked rather than multi-modal.
    """
    squeeze = raw.dim() == 3
    if squeeze:
        raw = raw.unsqueeze(0)
        target_coords = target_coords.unsqueeze(0)
    coords = dsnt(raw, temperature)
    coord_term = (coords - target_coords).norm(dim=-1).mean()
    probs = spatial_softmax(raw, temperature)
    q = _gaussian_target_maps(target_coords, raw.shape[-2], raw.shape[-1], sigma_px)
    reg_term = _js_divergence(probs, q).mean()
    return coord_term + reg_weight * reg_term
