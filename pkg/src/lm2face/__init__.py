"""Landmark-to-face synthesis framework.

Pipeline: a shared landmark encoder with per-target decoders reshapes input
landmarks to a target identity, a per-target upsampling generator renders the
face, and a differentiable heatmap detector closes the loop for training and
evaluation.
"""

from lm2face.geometry import (
    TOY_TOPOLOGY,
    WFLW_TOPOLOGY,
    LandmarkSet,
    LandmarkTopology,
    denormalize,
    normalize,
    unit_l2,
)

__version__ = "0.1.0"
