from .atomic import atomic_write_bytes, atomic_write_text
from .blobs import to_blob, write_blob, read_blob
from .images import write_ppm, write_pgm16, write_depth_pgm, write_heatmap_pgm, read_image
from .manifest import (
    format_value, parse_lines, render_manifest, write_manifest, read_manifest,
    parse_floats, parse_ints, format_shape, parse_shape,
)
