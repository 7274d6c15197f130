"""Small shared torch helpers: weight init and parameter bookkeeping."""

import torch
from torch import nn


def kaiming_init_(module, slope=0.2):
    """He-initialize every conv/linear in `module` for leaky-ReLU fan-in."""
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.Linear)):
            nn.init.kaiming_normal_(m.weight, a=slope, nonlinearity="leaky_relu")
            if m.bias is not None:
                nn.init.zeros_(m.bias)
    return module


def count_params(module):
    return sum(p.numel() for p in module.parameters())


def flat_params(module):
    """Detached copy of all parameters as one flat vector (change detection)."""
    with torch.no_grad():
        return torch.cat([p.detach().reshape(-1).clone() for p in module.parameters()])
