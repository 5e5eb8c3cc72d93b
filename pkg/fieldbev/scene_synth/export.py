"""`synth` output: a text manifest, raw float64 blobs and image previews per scene."""
from __future__ import annotations

from dataclasses import fields
from pathlib import Path

import numpy as np

from ..adapters import reject
from ..failures import ErrConfig
from ..io import (
    format_shape, parse_shape, read_blob, read_manifest,
    write_blob, write_manifest, write_ppm, write_depth_pgm, write_heatmap_pgm,
)
from .generate import SyntheticScene

BLOBS = ("gt_rgb", "gt_depth", "masks2d", "mask_bev", "raw_grid")


def scene_manifest(scene: SyntheticScene) -> list[tuple[str, object]]:
    cfg = scene.config
    entries: list[tuple[str, object]] = [("format", "fieldbev-scene"), ("version", 1)]
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "grid":
            entries += [
                ("scene.grid.origin", value.origin),
                ("scene.grid.voxel_size", value.voxel_size),
                ("scene.grid.dims", value.dims),
            ]
        else:
            entries.append((f"scene.{f.name}", value))
    entries.append(("boxes", len(scene.boxes)))
    for b, box in enumerate(scene.boxes):
        entries += [
            (f"box.{b}.center", box.center),
            (f"box.{b}.size", box.size),
            (f"box.{b}.yaw", box.yaw),
            (f"box.{b}.color", box.color),
        ]
    entries.append(("cameras", len(scene.cameras)))
    for v, cam in enumerate(scene.cameras):
        entries += [
            (f"camera.{v}.intrinsics", (cam.fx, cam.fy, cam.cx, cam.cy)),
            (f"camera.{v}.size", (cam.width, cam.height)),
            (f"camera.{v}.rotation", cam.rotation),
            (f"camera.{v}.translation", cam.translation),
        ]
    for name in BLOBS:
        array = getattr(scene, name)
        entries.append((f"blob.{name}", f"{name}.f64 {format_shape(array.shape)}"))
    return entries


def write_scene_dir(scene: SyntheticScene, out_dir: str | Path) -> Path:
    """Write one scene under `out_dir/scene_<seed>`; returns that directory."""
    root = Path(out_dir) / f"scene_{scene.seed}"
    root.mkdir(parents=True, exist_ok=True)
    write_manifest(root / "manifest.txt", scene_manifest(scene))
    for name in BLOBS:
        write_blob(root / f"{name}.f64", getattr(scene, name))
    for v in range(scene.n_views):
        write_ppm(root / f"view_{v}.ppm", scene.gt_rgb[v])
        write_depth_pgm(root / f"depth_{v}.pgm", scene.gt_depth[v])
        write_heatmap_pgm(root / f"mask_{v}.pgm", scene.masks2d[v])
    write_heatmap_pgm(root / "mask_bev.pgm", scene.mask_bev)
    return root


def read_scene_manifest(scene_dir: str | Path) -> dict[str, str]:
    """Manifest entries of a `synth` scene directory, keyed as written."""
    path = Path(scene_dir) / "manifest.txt"
    entries = dict(read_manifest(path))
    if entries.get("format") != "fieldbev-scene":
        raise reject(ErrConfig(
            key="format",
            value=entries.get("format"),
            allowed=("fieldbev-scene",),
            path=str(path),
            message=f"{path}: not a scene manifest",
        ))
    return entries


def read_scene_blob(scene_dir: str | Path, name: str) -> np.ndarray:
    entries = read_scene_manifest(scene_dir)
    filename, shape = entries[f"blob.{name}"].split()
    return read_blob(Path(scene_dir) / filename, parse_shape(shape))
