"""Self-contained toy dataset directories: images, manifest, specs, topology."""

from __future__ import annotations

import json
import math
from pathlib import Path

from lm2face.data.manifest import DatasetManifest, ManifestRecord, save_manifest
from lm2face.data.toyfaces import default_identities, render_toy_face, sample_toy_landmarks
from lm2face.geometry import TOY_TOPOLOGY, denormalize
from lm2face.imgio import save_png

__all__ = ["build_toy_dataset", "load_identities"]


def build_toy_dataset(
    out_dir,
    identities=None,
    samples_per_identity=200,
    resolution=64,
    seed=0,
    val_fraction=0.1,
):
    """Render a toy dataset to disk; returns the written manifest.

    Layout: images/<id>_<index>.png, manifest.jsonl, identities.json,
    topology.json. The trailing val_fraction of each identity's samples is
    tagged as the val split.
    """
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    identities = identities if identities is not None else default_identities()
    n_val = math.ceil(samples_per_identity * val_fraction)
    records = []
    for spec in identities:
        for i in range(samples_per_identity):
            lms = sample_toy_landmarks(spec, rng_seed=seed * 1_000_000 + i)
            img = render_toy_face(lms, spec, resolution=resolution)
            rel = f"images/{spec.target_id}_{i:05d}.png"
            save_png(img, out_dir / rel)
            records.append(
                ManifestRecord(
                    image_path=rel,
                    target_id=spec.target_id,
                    frame_w=resolution,
                    frame_h=resolution,
                    points=denormalize(lms, resolution, resolution),
                    split="val" if i >= samples_per_identity - n_val else "train",
                )
            )
    manifest = DatasetManifest(records=records)
    save_manifest(manifest, out_dir / "manifest.jsonl")
    with open(out_dir / "identities.json", "w") as fh:
        json.dump([spec.to_dict() for spec in identities], fh, indent=2)
    with open(out_dir / "topology.json", "w") as fh:
        json.dump(TOY_TOPOLOGY.to_dict(), fh, indent=2)
    return manifest


def load_identities(path):
    """Read identities.json back into IdentitySpec objects."""
    from lm2face.data.toyfaces import IdentitySpec

    with open(path) as fh:
        raw = json.load(fh)
    return [IdentitySpec.from_dict(d) for d in raw]
