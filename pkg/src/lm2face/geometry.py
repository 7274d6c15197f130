"""Landmark representations, normalization, and the fixed landmark topology.

Every other module works on the types defined here: a topology describing
the point layout (groups and polyline connectivity), landmark sets in
normalized [0,1] image coordinates, and flat interleaved coordinate vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LandmarkTopology",
    "LandmarkSet",
    "TOY_TOPOLOGY",
    "WFLW_TOPOLOGY",
    "normalize",
    "denormalize",
    "unit_l2",
]


def _polyline_edges(indices, closed=False):
    idx = list(indices)
    edges = [(idx[i], idx[i + 1]) for i in range(len(idx) - 1)]
    if closed and len(idx) > 2:
        edges.append((idx[-1], idx[0]))
    return edges


@dataclass(frozen=True)
class LandmarkTopology:
    """Fixed layout of L landmarks: named index ranges plus drawing edges.

    Groups are half-open [start, end) ranges; they must be disjoint and
    together cover [0, point_count). Connectivity is a list of index pairs
    used to draw polylines (UI overlays, debug renders).
    """

    name: str
    point_count: int
    groups: dict
    connectivity: tuple

    def __post_init__(self):
        if self.point_count <= 0:
            raise ValueError("point_count must be positive")
        covered = np.zeros(self.point_count, dtype=bool)
        for gname, (start, end) in self.groups.items():
            if not (0 <= start <= end <= self.point_count):
                raise ValueError(f"group '{gname}' range ({start}, {end}) out of bounds")
            if covered[start:end].any():
                raise ValueError(f"group '{gname}' overlaps another group")
            covered[start:end] = True
        if not covered.all():
            missing = int(np.flatnonzero(~covered)[0])
            raise ValueError(f"groups do not cover index {missing}")
        for a, b in self.connectivity:
            if not (0 <= a < self.point_count and 0 <= b < self.point_count):
                raise ValueError(f"connectivity edge ({a}, {b}) out of range")

    @property
    def vector_dim(self):
        return 2 * self.point_count

    def group_indices(self, group):
        """Indices belonging to a named group, as an int array."""
        if group not in self.groups:
            raise KeyError(f"unknown group '{group}'; have {sorted(self.groups)}")
        start, end = self.groups[group]
        return np.arange(start, end)

    def to_dict(self):
        return {
            "name": self.name,
            "point_count": self.point_count,
            "groups": {k: [int(a), int(b)] for k, (a, b) in self.groups.items()},
            "connectivity": [[int(a), int(b)] for a, b in self.connectivity],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            name=d["name"],
            point_count=int(d["point_count"]),
            groups={k: (int(v[0]), int(v[1])) for k, v in d["groups"].items()},
            connectivity=tuple((int(a), int(b)) for a, b in d["connectivity"]),
        )


# 12-point desk-scale layout: 4 contour, 2 per eye, 1 nose, 3 mouth.
TOY_TOPOLOGY = LandmarkTopology(
    name="toy12",
    point_count=12,
    groups={
        "contour": (0, 4),
        "eyes": (4, 8),
        "nose": (8, 9),
        "mouth": (9, 12),
    },
    connectivity=tuple(
        _polyline_edges([0, 1, 2, 3], closed=True)
        + [(4, 5), (6, 7)]
        + _polyline_edges([9, 10, 11], closed=True)
    ),
)

# 98-point convention: 33 contour, 18 brows, 9 nose, 16 eyes, 20 mouth, 2 pupils.
WFLW_TOPOLOGY = LandmarkTopology(
    name="wflw98",
    point_count=98,
    groups={
        "contour": (0, 33),
        "brows": (33, 51),
        "nose": (51, 60),
        "eyes": (60, 76),
        "mouth": (76, 96),
        "pupils": (96, 98),
    },
    connectivity=tuple(
        _polyline_edges(range(0, 33))
        + _polyline_edges(range(33, 42), closed=True)
        + _polyline_edges(range(42, 51), closed=True)
        + _polyline_edges(range(51, 55))
        + _polyline_edges(range(55, 60))
        + _polyline_edges(range(60, 68), closed=True)
        + _polyline_edges(range(68, 76), closed=True)
        + _polyline_edges(range(76, 88), closed=True)
        + _polyline_edges(range(88, 96), closed=True)
    ),
)


@dataclass
class LandmarkSet:
    """L landmark points in normalized [0,1] image coordinates."""

    points: np.ndarray
    topology: LandmarkTopology

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.shape != (self.topology.point_count, 2):
            raise ValueError(
                f"expected {self.topology.point_count} (x, y) points, got shape {pts.shape}"
            )
        if not np.isfinite(pts).all():
            bad = int(np.flatnonzero(~np.isfinite(pts).all(axis=1))[0])
            raise ValueError(f"non-finite coordinate at point {bad}")
        if pts.min() < 0.0 or pts.max() > 1.0:
            bad = int(np.flatnonzero(((pts < 0.0) | (pts > 1.0)).any(axis=1))[0])
            raise ValueError(f"coordinate out of [0,1] at point {bad}")
        self.points = pts

    def to_vector(self):
        """Flat interleaved (x0, y0, x1, y1, ...) vector of length 2L."""
        return self.points.reshape(-1).copy()

    @classmethod
    def from_vector(cls, values, topology):
        vec = np.asarray(values, dtype=np.float64)
        if vec.shape != (topology.vector_dim,):
            raise ValueError(f"expected vector of length {topology.vector_dim}, got {vec.shape}")
        return cls(points=vec.reshape(topology.point_count, 2), topology=topology)


def normalize(points, frame_w, frame_h, topology):
    """Scale pixel-space points into the unit square.

    Out-of-frame points are clamped rather than rejected (landmark edits may
    deliberately push points past the frame); the clamp count is returned so
    callers can warn.

    Returns (LandmarkSet, clamped_point_count).
    """
    if frame_w <= 0 or frame_h <= 0:
        raise ValueError(f"frame extents must be positive, got {frame_w}x{frame_h}")
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape != (topology.point_count, 2):
        raise ValueError(
            f"expected {topology.point_count} (x, y) points, got shape {pts.shape}"
        )
    if not np.isfinite(pts).all():
        bad = int(np.flatnonzero(~np.isfinite(pts).all(axis=1))[0])
        raise ValueError(f"non-finite input point at index {bad}")
    scaled = pts / np.array([frame_w, frame_h], dtype=np.float64)
    clipped = np.clip(scaled, 0.0, 1.0)
    clamped = int(np.sum((scaled != clipped).any(axis=1)))
    return LandmarkSet(points=clipped, topology=topology), clamped


def denormalize(lms, frame_w, frame_h):
    """Map a LandmarkSet back to pixel coordinates of the given frame."""
    if frame_w <= 0 or frame_h <= 0:
        raise ValueError(f"frame extents must be positive, got {frame_w}x{frame_h}")
    return lms.points * np.array([frame_w, frame_h], dtype=np.float64)


def unit_l2(values):
    """Rescale a flat coordinate vector to unit Euclidean norm."""
    vec = np.asarray(values, dtype=np.float64)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("cannot unit-normalize a zero or non-finite vector")
    return vec / norm
