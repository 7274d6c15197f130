"""Per-target patch discriminator over real vs synthesized face images.

Emits a map of real/fake logits, one per receptive-field patch, rather than
a single global score. The first layer carries no normalization; middle
layers use instance norm.
"""

from __future__ import annotations

from dataclasses import dataclass

from torch import nn

from lm2face.torch_utils import kaiming_init_

__all__ = ["DiscriminatorConfig", "PatchDiscriminator", "score_map_size"]


@dataclass
class DiscriminatorConfig:
    input_size: int = 256
    base_channels: int = 64
    num_downsamples: int = 3
    penultimate: bool = True  # extra stride-1 conv before the head (70x70-RF design)
    max_channels: int = 512

    @classmethod
    def desk(cls, input_size=64):
        """Scaled-down 3-layer variant for 64x64 runs."""
        return cls(input_size=input_size, num_downsamples=3, penultimate=False)


def score_map_size(config):
    """Spatial size of the logit map as a pure function of the layer stack."""
    n = config.input_size
    for _ in range(config.num_downsamples):
        n = (n + 2 - 4) // 2 + 1
    if config.penultimate:
        n = n - 1
    return n - 1  # head conv, stride 1


class PatchDiscriminator(nn.Module):
    def __init__(self, config):
        super().__init__()
        self.config = config
        c = config.base_channels
        layers = [
            nn.Conv2d(3, c, kernel_size=4, stride=2, padding=1),
            nn.LeakyReLU(0.2),
        ]
        for _ in range(config.num_downsamples - 1):
            c_next = min(c * 2, config.max_channels)
            layers += [
                nn.Conv2d(c, c_next, kernel_size=4, stride=2, padding=1),
                nn.InstanceNorm2d(c_next, affine=True),
                nn.LeakyReLU(0.2),
            ]
            c = c_next
        if config.penultimate:
            c_next = min(c * 2, config.max_channels)
            layers += [
                nn.Conv2d(c, c_next, kernel_size=4, stride=1, padding=1),
                nn.InstanceNorm2d(c_next, affine=True),
                nn.LeakyReLU(0.2),
            ]
            c = c_next
        layers.append(nn.Conv2d(c, 1, kernel_size=4, stride=1, padding=1))
        self.net = nn.Sequential(*layers)
        kaiming_init_(self)

    def forward(self, images):
        """Patch logit map (B, 1, Hp, Wp) for images at the configured resolution."""
        squeeze = images.dim() == 3
        if squeeze:
            images = images.unsqueeze(0)
        size = self.config.input_size
        if images.shape[-3:] != (3, size, size):
            raise ValueError(
                f"expected 3x{size}x{size} images, got {tuple(images.shape[-3:])}"
            )
        out = self.net(images)
        return out.squeeze(0) if squeeze else out
