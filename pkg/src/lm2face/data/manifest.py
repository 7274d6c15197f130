"""Line-delimited dataset manifests and single-record landmark files.

One JSON record per face: {image_path, target_id, frame: {w, h},
points: [[x, y] * L], split}. Coordinates are stored in pixel space and
normalized on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from lm2face.geometry import normalize

__all__ = [
    "ManifestRecord",
    "DatasetManifest",
    "load_manifest",
    "save_manifest",
    "read_landmark_file",
    "write_landmark_file",
]


@dataclass
class ManifestRecord:
    image_path: str
    target_id: str
    frame_w: int
    frame_h: int
    points: np.ndarray  # (L, 2) pixel coordinates
    split: str = "train"

    def landmarks(self, topology):
        """Normalized LandmarkSet (clamp count discarded; manifests are trusted)."""
        lms, _ = normalize(self.points, self.frame_w, self.frame_h, topology)
        return lms

    def to_dict(self):
        return {
            "image_path": self.image_path,
            "target_id": self.target_id,
            "frame": {"w": int(self.frame_w), "h": int(self.frame_h)},
            "points": np.asarray(self.points, dtype=float).tolist(),
            "split": self.split,
        }

    @classmethod
    def from_dict(cls, d):
        frame = d["frame"]
        return cls(
            image_path=d.get("image_path", ""),
            target_id=d.get("target_id", ""),
            frame_w=int(frame["w"]),
            frame_h=int(frame["h"]),
            points=np.asarray(d["points"], dtype=np.float64),
            split=d.get("split", "train"),
        )


@dataclass
class DatasetManifest:
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def target_ids(self):
        seen = []
        for rec in self.records:
            if rec.target_id not in seen:
                seen.append(rec.target_id)
        return seen

    def filter(self, target_id=None, split=None):
        recs = [
            r
            for r in self.records
            if (target_id is None or r.target_id == target_id)
            and (split is None or r.split == split)
        ]
        return DatasetManifest(records=recs)


def load_manifest(path, topology=None, known_targets=None):
    """Parse and validate a JSONL manifest; errors cite the offending line."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"manifest not found: {path}")
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                rec = ManifestRecord.from_dict(raw)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed record ({exc})") from exc
            if rec.points.ndim != 2 or rec.points.shape[1] != 2:
                raise ValueError(f"{path}:{lineno}: points must be a list of [x, y] pairs")
            if topology is not None and rec.points.shape[0] != topology.point_count:
                raise ValueError(
                    f"{path}:{lineno}: expected {topology.point_count} points, "
                    f"got {rec.points.shape[0]}"
                )
            if not np.isfinite(rec.points).all():
                raise ValueError(f"{path}:{lineno}: non-finite landmark coordinate")
            if known_targets is not None and rec.target_id not in known_targets:
                raise ValueError(
                    f"{path}:{lineno}: unknown target {rec.target_id!r} "
                    f"(known: {sorted(known_targets)})"
                )
            records.append(rec)
    return DatasetManifest(records=records)


def save_manifest(manifest, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for rec in manifest.records:
            fh.write(json.dumps(rec.to_dict()) + "\n")


def read_landmark_file(path):
    """Single-record landmark file: same JSON layout as one manifest line."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"landmark file not found: {path}")
    with open(path) as fh:
        try:
            raw = json.loads(fh.read())
            rec = ManifestRecord.from_dict(raw)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}: malformed landmark file ({exc})") from exc
    return rec


def write_landmark_file(record, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(json.dumps(record.to_dict()) + "\n")
