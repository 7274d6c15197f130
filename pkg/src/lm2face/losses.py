"""The five training loss terms and their weighted sum.

All losses take batched tensors (a leading batch axis is added when missing)
and return 0-dim differentiable tensors. Landmark-space terms use the raw
Euclidean norm of the residual vector by default; a per-point-averaged
variant is available where a scale-free reading is preferred.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import torch
import torch.nn.functional as F

__all__ = [
    "LossWeights",
    "LossBreakdown",
    "loss_l2i",
    "loss_i2l",
    "loss_l2l",
    "loss_xl2l",
    "loss_gan",
    "loss_overall",
]


def _as_batch(t, dim):
    if t.dim() == dim:
        return t.unsqueeze(0)
    if t.dim() == dim + 1:
        return t
    raise ValueError(f"expected {dim}- or {dim + 1}-dim tensor, got {t.dim()}-dim")


def _landmark_residual_norm(a, b, per_point=False):
    a = _as_batch(a, 1)
    b = _as_batch(b, 1)
    if a.shape != b.shape:
        raise ValueError(f"landmark vector shapes differ: {tuple(a.shape)} vs {tuple(b.shape)}")
    if per_point:
        diff = (a - b).reshape(a.shape[0], -1, 2)
        return diff.norm(dim=2).mean(dim=1).mean()
    return (a - b).norm(dim=1).mean()


def loss_l2i(real, synth):
    """Mean absolute pixel difference between an image and its reconstruction."""
    real = _as_batch(real, 3)
    synth = _as_batch(synth, 3)
    if real.shape != synth.shape:
        raise ValueError(f"image shapes differ: {tuple(real.shape)} vs {tuple(synth.shape)}")
    return (real - synth).abs().mean()


def loss_i2l(target_lms, synth_img, detector, per_point=False):
    """Landmark preservation: residual between target landmarks and the
    detector's reading of the synthesized image.

    The detector must map images to (B, L, 2) normalized coordinates and stay
    differentiable; gradients flow through it into the synthesized image. The
    image is resized (bilinearly, so still differentiable) when the detector
    declares an input size different from the image's.
    """
    target_lms = _as_batch(target_lms, 1)
    synth_img = _as_batch(synth_img, 3)
    size = getattr(detector, "input_size", None)
    if size is not None and synth_img.shape[-2:] != (size, size):
        synth_img = F.interpolate(
            synth_img, size=(size, size), mode="bilinear", align_corners=False
        )
    detected = detector(synth_img).reshape(synth_img.shape[0], -1)
    return _landmark_residual_norm(target_lms, detected, per_point=per_point)


def loss_l2l(lms, recon, latent, per_point=False):
    """Converter reconstruction plus the identity-neutral latent anchor.

    First term: residual between input landmarks and their round-trip through
    encoder and target decoder. Second term: residual between the encoder
    output and the unit-norm-scaled input landmarks, which anchors the latent
    to an identity-independent embedding.
    """
    lms_b = _as_batch(lms, 1)
    norms = lms_b.norm(dim=1, keepdim=True)
    if (norms == 0).any():
        raise ValueError("landmark vector has zero norm; unit scaling undefined")
    unit_target = lms_b / norms
    latent_b = _as_batch(latent, 1)
    if latent_b.shape != lms_b.shape:
        raise ValueError(
            f"latent shape {tuple(latent_b.shape)} differs from landmarks {tuple(lms_b.shape)}"
        )
    recon_term = _landmark_residual_norm(lms, recon, per_point=per_point)
    latent_term = _landmark_residual_norm(unit_target, latent_b, per_point=per_point)
    return recon_term + latent_term


def loss_xl2l(lms, cycled, per_point=False):
    """Cross-identity cycle residual: landmarks converted to another identity
    and back should land where they started. The caller samples the
    intermediate identity distinct from the source."""
    return _landmark_residual_norm(lms, cycled, per_point=per_point)


def loss_gan(real_scores, fake_scores, saturating=False):
    """Patch-discriminator losses from real/fake logit maps.

    Returns (d_loss, g_loss). The discriminator loss is the stable
    log-sigmoid cross-entropy pushing real logits up and fake logits down.
    The generator loss defaults to the non-saturating form -log sigmoid(fake);
    `saturating=True` selects the literal log(1 - sigmoid(fake)) objective,
    whose gradient vanishes for confidently rejected fakes.
    """
    d_loss = F.softplus(-real_scores).mean() + F.softplus(fake_scores).mean()
    if saturating:
        g_loss = -F.softplus(fake_scores).mean()
    else:
        g_loss = F.softplus(-fake_scores).mean()
    return d_loss, g_loss


@dataclass
class LossWeights:
    """Per-term multipliers; the default is the plain unweighted sum."""

    l2i: float = 1.0
    i2l: float = 1.0
    l2l: float = 1.0
    x_l2l: float = 1.0
    gan: float = 1.0


@dataclass
class LossBreakdown:
    """The five generator-side terms, the discriminator loss, and their
    weighted total, kept as 0-dim tensors so the total stays differentiable."""

    l2i: torch.Tensor
    i2l: torch.Tensor
    l2l: torch.Tensor
    x_l2l: torch.Tensor
    gan_g: torch.Tensor
    gan_d: torch.Tensor
    overall: torch.Tensor
    weights: LossWeights

    def as_record(self, step=None):
        """Plain-float dict in the loss-log record layout."""
        rec = {} if step is None else {"step": int(step)}
        for name in ("l2i", "i2l", "l2l", "x_l2l", "gan_g", "gan_d", "overall"):
            rec[name] = float(getattr(self, name))
        return rec


def loss_overall(l2i, i2l, l2l, x_l2l, gan_g, gan_d=None, weights=None):
    """Weighted sum of the five generator-side terms.

    `gan_d` is carried in the breakdown for logging but never summed; it
    belongs to the discriminator's own step.
    """
    weights = weights or LossWeights()
    parts = {"l2i": l2i, "i2l": i2l, "l2l": l2l, "x_l2l": x_l2l, "gan_g": gan_g}
    terms = {}
    for name, value in parts.items():
        t = value if isinstance(value, torch.Tensor) else torch.tensor(float(value), dtype=torch.float64)
        if t.numel() != 1:
            raise ValueError(f"loss term '{name}' must be a scalar")
        if not torch.isfinite(t):
            raise ValueError(f"loss term '{name}' is non-finite: {float(t)}")
        terms[name] = t.reshape(())
    w = {f.name: getattr(weights, f.name) for f in fields(weights)}
    overall = (
        w["l2i"] * terms["l2i"]
        + w["i2l"] * terms["i2l"]
        + w["l2l"] * terms["l2l"]
        + w["x_l2l"] * terms["x_l2l"]
        + w["gan"] * terms["gan_g"]
    )
    if gan_d is None:
        gan_d = torch.zeros(())
    elif not isinstance(gan_d, torch.Tensor):
        gan_d = torch.tensor(float(gan_d), dtype=torch.float64)
    return LossBreakdown(
        l2i=terms["l2i"],
        i2l=terms["i2l"],
        l2l=terms["l2l"],
        x_l2l=terms["x_l2l"],
        gan_g=terms["gan_g"],
        gan_d=gan_d.reshape(()),
        overall=overall,
        weights=weights,
    )
