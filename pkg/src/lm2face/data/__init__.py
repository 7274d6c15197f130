"""Dataset ingestion and the procedural toy-face ground-truth generator."""

import numpy as np

from lm2face.data.generate import build_toy_dataset, load_identities
from lm2face.data.manifest import (
    DatasetManifest,
    ManifestRecord,
    load_manifest,
    read_landmark_file,
    save_manifest,
    write_landmark_file,
)
from lm2face.data.toyfaces import (
    CANONICAL_POINTS,
    IdentitySpec,
    Palette,
    default_identities,
    render_toy_face,
    sample_toy_landmarks,
)

__all__ = [
    "build_toy_dataset",
    "load_identities",
    "DatasetManifest",
    "ManifestRecord",
    "load_manifest",
    "save_manifest",
    "read_landmark_file",
    "write_landmark_file",
    "CANONICAL_POINTS",
    "IdentitySpec",
    "Palette",
    "default_identities",
    "render_toy_face",
    "sample_toy_landmarks",
    "group_arrays",
]


def group_arrays(manifest, root_dir, topology):
    """Load a manifest's images and landmark vectors into per-target arrays.

    Returns {target_id: {split: (images (N, 3, H, W) float32,
    landmark_vectors (N, 2L) float32)}}.
    """
    from pathlib import Path

    from lm2face.imgio import load_png

    root = Path(root_dir)
    grouped = {}
    for rec in manifest.records:
        imgs, lms = grouped.setdefault(rec.target_id, {}).setdefault(rec.split, ([], []))
        imgs.append(load_png(root / rec.image_path))
        lms.append(rec.landmarks(topology).to_vector().astype(np.float32))
    return {
        tid: {
            split: (np.stack(imgs), np.stack(lms))
            for split, (imgs, lms) in splits.items()
        }
        for tid, splits in grouped.items()
    }
