from .camera import (
    Camera, Projection, project, project_points, unproject, camera_rays, look_at_camera,
)
from .grid import VoxelGridSpec, voxel_centers, bev_cell_centers
from .boxes import Box3D
from .masks import (
    Mask2D, MaskBEV, convex_hull, points_in_hull,
    box_to_mask2d, union_mask2d, boxes_to_maskbev,
)

__all__ = [
    "Camera", "Projection", "project", "project_points", "unproject",
    "camera_rays", "look_at_camera",
    "VoxelGridSpec", "voxel_centers", "bev_cell_centers",
    "Box3D",
    "Mask2D", "MaskBEV", "convex_hull", "points_in_hull",
    "box_to_mask2d", "union_mask2d", "boxes_to_maskbev",
]
