from .config import SceneConfig, BACKGROUND_MODES
from .raycast import ray_box_distance, cast, raycast_reference
from .generate import (
    SyntheticScene, SourceViews, MAX_ATTEMPTS,
    background_image, ring_cameras, sample_boxes, raw_voxel_grid, build_scene, generate_scene,
)
from .export import BLOBS, scene_manifest, write_scene_dir, read_scene_manifest, read_scene_blob

__all__ = [
    "SceneConfig", "BACKGROUND_MODES",
    "ray_box_distance", "cast", "raycast_reference",
    "SyntheticScene", "SourceViews", "MAX_ATTEMPTS",
    "background_image", "ring_cameras", "sample_boxes", "raw_voxel_grid",
    "build_scene", "generate_scene",
    "BLOBS", "scene_manifest", "write_scene_dir", "read_scene_manifest", "read_scene_blob",
]
