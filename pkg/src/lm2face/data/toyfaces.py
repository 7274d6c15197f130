"""Procedural toy-face dataset: identity specs, landmark sampler, renderer.

The renderer is a deterministic rasterizer over flat palette colors, so the
landmark-to-image mapping is exactly known: feature locations can be read
back from color masks, which is what makes desk-scale verification of the
synthesis pipeline possible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image, ImageDraw

from lm2face.geometry import TOY_TOPOLOGY, LandmarkSet
from lm2face.imgio import from_uint8

__all__ = [
    "Palette",
    "IdentitySpec",
    "CANONICAL_POINTS",
    "default_identities",
    "sample_toy_landmarks",
    "render_toy_face",
]

# Shared 12-point basis, deformed per identity. Order follows TOY_TOPOLOGY:
# contour (left, top, right, chin), eyes (L-outer, L-inner, R-inner, R-outer),
# nose, mouth (left, bottom, right).
CANONICAL_POINTS = np.array(
    [
        [0.22, 0.50], [0.50, 0.16], [0.78, 0.50], [0.50, 0.86],
        [0.32, 0.40], [0.43, 0.40], [0.57, 0.40], [0.68, 0.40],
        [0.50, 0.56],
        [0.38, 0.70], [0.50, 0.76], [0.62, 0.70],
    ],
    dtype=np.float64,
)

_BOUNDS = (0.05, 0.95)


@dataclass(frozen=True)
class Palette:
    """Flat colors for the four rendered regions; must be pairwise distinct."""

    skin: tuple
    eyes: tuple
    mouth: tuple
    background: tuple

    def __post_init__(self):
        colors = [self.skin, self.eyes, self.mouth, self.background, self.nose]
        for c in colors:
            if len(c) != 3 or any(not (0 <= int(v) <= 255) for v in c):
                raise ValueError(f"invalid RGB color {c}")
        if len({tuple(c) for c in colors}) != len(colors):
            raise ValueError("palette colors must be pairwise distinct")

    @property
    def nose(self):
        """Nose/brow accent: deterministic darkening of the skin tone."""
        return tuple(int(v * 0.6) for v in self.skin)

    def to_dict(self):
        return {
            "skin": list(self.skin),
            "eyes": list(self.eyes),
            "mouth": list(self.mouth),
            "background": list(self.background),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(*(tuple(int(v) for v in d[k]) for k in ("skin", "eyes", "mouth", "background")))


@dataclass
class IdentitySpec:
    """Shape and color signature of one toy identity.

    scale/aspect set the identity's face geometry (applied about the frame
    center); size_jitter, translate, and jitter add per-sample variation.
    texture_seed separates the identity's sampling stream from the others.
    """

    target_id: str
    scale: float
    aspect: float
    palette: Palette
    texture_seed: int
    size_jitter: float = 0.03
    translate: float = 0.02
    jitter: float = 0.006
    canonical: np.ndarray = field(default_factory=lambda: CANONICAL_POINTS.copy())

    def __post_init__(self):
        self.canonical = np.asarray(self.canonical, dtype=np.float64)
        if self.canonical.shape != (TOY_TOPOLOGY.point_count, 2):
            raise ValueError(f"canonical basis must be (12, 2), got {self.canonical.shape}")
        if not self.target_id or "." in self.target_id:
            raise ValueError(f"invalid target id {self.target_id!r}")
        lo, hi = _BOUNDS
        margin = min(0.5 - lo, hi - 0.5)
        offsets = np.abs(self.canonical - 0.5)
        worst = 1.0 + 4.0 * self.size_jitter
        reach_x = offsets[:, 0].max() * self.scale * self.aspect * worst
        reach_y = offsets[:, 1].max() * self.scale / self.aspect * worst
        reach = max(reach_x, reach_y) + self.translate + 4.0 * self.jitter
        if reach > margin:
            raise ValueError(
                f"identity {self.target_id!r} can deform landmarks outside "
                f"[{lo}, {hi}]^2 (reach {reach:.3f} > margin {margin:.3f})"
            )

    def expected_contour_width(self):
        """Mean rendered contour width implied by the sampler's affine."""
        xs = self.canonical[TOY_TOPOLOGY.group_indices("contour"), 0]
        return float((xs.max() - xs.min()) * self.scale * self.aspect)

    def to_dict(self):
        return {
            "target_id": self.target_id,
            "scale": self.scale,
            "aspect": self.aspect,
            "palette": self.palette.to_dict(),
            "texture_seed": self.texture_seed,
            "size_jitter": self.size_jitter,
            "translate": self.translate,
            "jitter": self.jitter,
            "canonical": self.canonical.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            target_id=d["target_id"],
            scale=float(d["scale"]),
            aspect=float(d["aspect"]),
            palette=Palette.from_dict(d["palette"]),
            texture_seed=int(d["texture_seed"]),
            size_jitter=float(d["size_jitter"]),
            translate=float(d["translate"]),
            jitter=float(d["jitter"]),
            canonical=np.asarray(d["canonical"], dtype=np.float64),
        )


def default_identities():
    """Five identities with clearly separated shapes and palettes."""
    return [
        IdentitySpec("alpha", 0.92, 1.18, Palette((224, 172, 138), (52, 68, 160), (168, 50, 60), (28, 34, 48)), 101),
        IdentitySpec("bravo", 0.80, 0.82, Palette((238, 208, 182), (40, 120, 70), (180, 40, 70), (22, 48, 30)), 102),
        IdentitySpec("charlie", 0.75, 1.00, Palette((150, 102, 70), (36, 30, 26), (140, 36, 52), (52, 26, 58)), 103),
        IdentitySpec("delta", 1.00, 1.06, Palette((196, 160, 110), (110, 80, 36), (210, 90, 80), (18, 60, 66)), 104),
        IdentitySpec("echo", 0.85, 0.92, Palette((106, 70, 48), (170, 120, 40), (196, 70, 96), (40, 44, 52)), 105),
    ]


def sample_toy_landmarks(spec, rng_seed):
    """Draw one landmark set for an identity, deterministic per seed.

    The canonical basis is scaled about the frame center by the identity's
    (scale, aspect) with multiplicative size noise, translated, and jittered
    per point. A final clip keeps tail draws inside the sampler bounds.
    """
    rng = np.random.default_rng([int(spec.texture_seed), int(rng_seed)])
    m = 1.0 + spec.size_jitter * rng.standard_normal()
    sx = spec.scale * spec.aspect * m
    sy = spec.scale / spec.aspect * m
    if sx == 1.0 and sy == 1.0:
        pts = spec.canonical.copy()
    else:
        pts = 0.5 + (spec.canonical - 0.5) * np.array([sx, sy])
    shift = rng.uniform(-spec.translate, spec.translate, size=2)
    noise = rng.normal(0.0, spec.jitter, size=spec.canonical.shape) if spec.jitter > 0 else 0.0
    if spec.translate > 0 or spec.jitter > 0:
        pts = pts + shift + noise
    pts = np.clip(pts, *_BOUNDS)
    return LandmarkSet(points=pts, topology=TOY_TOPOLOGY)


def _catmull_rom_closed(pts, samples_per_segment=24):
    """Closed Catmull-Rom spline through all points, densely sampled."""
    pts = np.asarray(pts, dtype=np.float64)
    n = len(pts)
    t = np.linspace(0.0, 1.0, samples_per_segment, endpoint=False)
    t2, t3 = t * t, t * t * t
    out = []
    for i in range(n):
        p0, p1, p2, p3 = pts[(i - 1) % n], pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
        seg = 0.5 * (
            2.0 * p1
            + np.outer(t, -p0 + p2)
            + np.outer(t2, 2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3)
            + np.outer(t3, -p0 + 3.0 * p1 - 3.0 * p2 + p3)
        )
        out.append(seg)
    return np.concatenate(out, axis=0)


def render_toy_face(lms, spec, resolution=64):
    """Rasterize a toy face from landmarks: (3, R, R) float32 in [-1, 1].

    Flat palette colors, no anti-aliasing: every feature occupies an exact
    color mask. Deterministic given (lms, spec, resolution).
    """
    if lms.topology is not TOY_TOPOLOGY and lms.topology != TOY_TOPOLOGY:
        raise ValueError("toy renderer requires the 12-point toy topology")
    r = int(resolution)
    pts = lms.points * r
    img = Image.new("RGB", (r, r), tuple(spec.palette.background))
    draw = ImageDraw.Draw(img)

    contour = pts[TOY_TOPOLOGY.group_indices("contour")]
    outline = _catmull_rom_closed(contour)
    draw.polygon([(float(x), float(y)) for x, y in outline], fill=tuple(spec.palette.skin))

    eye_idx = TOY_TOPOLOGY.group_indices("eyes")
    for a, b in (eye_idx[:2], eye_idx[2:]):
        pa, pb = pts[a], pts[b]
        cx, cy = (pa + pb) / 2.0
        half_w = float(np.linalg.norm(pb - pa)) / 2.0
        half_h = 0.6 * half_w
        if half_w >= 0.5:
            draw.ellipse(
                [cx - half_w, cy - half_h, cx + half_w, cy + half_h],
                fill=tuple(spec.palette.eyes),
            )

    nose = pts[TOY_TOPOLOGY.group_indices("nose")[0]]
    nr = 0.028 * r
    draw.ellipse(
        [nose[0] - nr, nose[1] - nr, nose[0] + nr, nose[1] + nr],
        fill=spec.palette.nose,
    )

    mouth = pts[TOY_TOPOLOGY.group_indices("mouth")]
    draw.polygon([(float(x), float(y)) for x, y in mouth], fill=tuple(spec.palette.mouth))

    return from_uint8(np.asarray(img))
