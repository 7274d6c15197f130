"""Landmark converter: shared encoder with one decoder per target identity.

The encoder maps a flat landmark vector to an identity-neutral latent of the
same length; each registered target owns a decoder that reshapes the latent
into that identity's landmark geometry. Both sides are five fully connected
layers. Decoder outputs pass through a sigmoid so converted coordinates stay
in [0, 1] for any weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn
import torch.nn.functional as F

from lm2face.torch_utils import kaiming_init_

__all__ = ["ConverterConfig", "LandmarkConverter"]

LAYERS_PER_SIDE = 5


@dataclass
class ConverterConfig:
    landmark_dim: int
    hidden: int = 512

    def __post_init__(self):
        if self.landmark_dim <= 0 or self.landmark_dim % 2 != 0:
            raise ValueError(f"landmark_dim must be a positive even count, got {self.landmark_dim}")
        if self.hidden <= 0:
            raise ValueError("hidden width must be positive")


def _five_layer_mlp(dim, hidden):
    layers = [nn.Linear(dim, hidden)]
    for _ in range(LAYERS_PER_SIDE - 2):
        layers.append(nn.Linear(hidden, hidden))
    layers.append(nn.Linear(hidden, dim))
    return nn.ModuleList(layers)


def _run_mlp(layers, x, slope=0.2):
    for layer in layers[:-1]:
        x = F.leaky_relu(layer(x), slope)
    return layers[-1](x)


class LandmarkConverter(nn.Module):
    """Encoder shared across identities; decoders keyed by target id."""

    def __init__(self, config, targets):
        super().__init__()
        self.config = config
        self.encoder = _five_layer_mlp(config.landmark_dim, config.hidden)
        self.decoders = nn.ModuleDict()
        for tid in targets:
            self._add_decoder(tid)
        kaiming_init_(self)

    def _add_decoder(self, target_id):
        if not target_id or "." in target_id:
            raise ValueError(f"invalid target id {target_id!r}")
        if target_id in self.decoders:
            raise ValueError(f"target {target_id!r} already registered")
        self.decoders[target_id] = _five_layer_mlp(self.config.landmark_dim, self.config.hidden)

    @property
    def targets(self):
        return list(self.decoders.keys())

    def _check_vector(self, v, name):
        squeeze = v.dim() == 1
        if squeeze:
            v = v.unsqueeze(0)
        if v.dim() != 2 or v.shape[1] != self.config.landmark_dim:
            raise ValueError(
                f"{name} must have length {self.config.landmark_dim}, got shape {tuple(v.shape)}"
            )
        return v, squeeze

    def _decoder_for(self, target_id):
        if target_id not in self.decoders:
            raise KeyError(
                f"unknown target {target_id!r}; registered targets: {self.targets}"
            )
        return self.decoders[target_id]

    def encode(self, lms):
        """Identity-neutral latent (same length as the landmark vector)."""
        v, squeeze = self._check_vector(lms, "landmark vector")
        z = _run_mlp(self.encoder, v)
        return z.squeeze(0) if squeeze else z

    def decode(self, target_id, latent):
        """Target-shaped landmark vector in [0, 1] from a latent code."""
        decoder = self._decoder_for(target_id)
        z, squeeze = self._check_vector(latent, "latent code")
        out = torch.sigmoid(_run_mlp(decoder, z))
        return out.squeeze(0) if squeeze else out

    def convert(self, lms, target_id):
        """Composition decode(target, encode(lms)), no extra processing."""
        return self.decode(target_id, self.encode(lms))

    def cycle(self, lms, via, back):
        """Round trip through identity `via` and back to `back`."""
        return self.convert(self.convert(lms, via), back)
