"""Box algebra, overlap measures and dense map encodings.

Everything here is pure numpy over immutable inputs. Boxes use pixel
coordinates in (x, y, w, h) form with the origin at the top-left corner;
coordinates may lie outside the image (partially visible objects are
legal). An absent target is represented by ``None``, never by a
degenerate box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Box",
    "GridSpec",
    "ScoreMap",
    "LtrbMap",
    "iou",
    "giou",
    "gaussian_map",
    "ltrb_map",
    "decode_box",
]


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle: top-left corner plus positive width/height."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box needs positive size, got w={self.w}, h={self.h}")

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def cx(self) -> float:
        return self.x + 0.5 * self.w

    @property
    def cy(self) -> float:
        return self.y + 0.5 * self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    def translated(self, dx: float, dy: float) -> "Box":
        return Box(self.x + dx, self.y + dy, self.w, self.h)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.w, self.h], dtype=np.float64)

    @staticmethod
    def from_array(a) -> "Box":
        return Box(float(a[0]), float(a[1]), float(a[2]), float(a[3]))


@dataclass(frozen=True)
class GridSpec:
    """Spatial grid of cells overlaid on an image at a fixed stride."""

    height_cells: int
    width_cells: int
    stride: int
    image_height: int
    image_width: int

    def __post_init__(self):
        if self.height_cells * self.stride < self.image_height - self.stride:
            raise ValueError("grid does not cover the image vertically")
        if self.width_cells * self.stride < self.image_width - self.stride:
            raise ValueError("grid does not cover the image horizontally")

    @staticmethod
    def for_image(image_height: int, image_width: int, stride: int) -> "GridSpec":
        if image_height % stride or image_width % stride:
            raise ValueError(
                f"image {image_height}x{image_width} not divisible by stride {stride}"
            )
        return GridSpec(image_height // stride, image_width // stride, stride,
                        image_height, image_width)

    @property
    def diag(self) -> float:
        """Image diagonal in pixels; the normalization constant for LTRB maps."""
        return math.hypot(self.image_width, self.image_height)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Pixel coordinates of cell centers as (cx[w], cy[h]) 1-D arrays."""
        cx = (np.arange(self.width_cells, dtype=np.float64) + 0.5) * self.stride
        cy = (np.arange(self.height_cells, dtype=np.float64) + 0.5) * self.stride
        return cx, cy


@dataclass(frozen=True)
class ScoreMap:
    """Single-channel score map over a grid, values in [0, 1]."""

    grid: GridSpec
    values: np.ndarray  # (h, w)

    def __post_init__(self):
        expected = (self.grid.height_cells, self.grid.width_cells)
        if self.values.shape != expected:
            raise ValueError(f"score map shape {self.values.shape} != grid {expected}")


@dataclass(frozen=True)
class LtrbMap:
    """Per-cell distances to the box edges (left, top, right, bottom), normalized."""

    grid: GridSpec
    values: np.ndarray  # (h, w, 4), nonnegative

    def __post_init__(self):
        expected = (self.grid.height_cells, self.grid.width_cells, 4)
        if self.values.shape != expected:
            raise ValueError(f"ltrb map shape {self.values.shape} != grid {expected}")


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two present boxes."""
    if a is None or b is None:
        raise ValueError("iou requires two present boxes")
    ix = min(a.x2, b.x2) - max(a.x, b.x)
    iy = min(a.y2, b.y2) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union


def giou(a: Box, b: Box) -> float:
    """Generalized IoU: IoU minus the hull area not covered by the union."""
    if a is None or b is None:
        raise ValueError("giou requires two present boxes")
    if a.area <= 0 or b.area <= 0:
        raise ValueError("giou is undefined for zero-area boxes")
    ix = min(a.x2, b.x2) - max(a.x, b.x)
    iy = min(a.y2, b.y2) - max(a.y, b.y)
    inter = ix * iy if (ix > 0 and iy > 0) else 0.0
    union = a.area + b.area - inter
    hull = (max(a.x2, b.x2) - min(a.x, b.x)) * (max(a.y2, b.y2) - min(a.y, b.y))
    return inter / union - (hull - union) / hull


def gaussian_map(box: Box | None, grid: GridSpec, sigma_cells: float) -> ScoreMap:
    """Isotropic Gaussian centered on the box center, peak value 1.

    Distances are measured in cell units, so the footprint is fixed in grid
    space regardless of the stride. ``None`` (absent target) yields the
    all-zero map.
    """
    if box is None:
        shape = (grid.height_cells, grid.width_cells)
        return ScoreMap(grid, np.zeros(shape, dtype=np.float64))
    if sigma_cells <= 0:
        raise ValueError("sigma_cells must be positive")
    cx, cy = grid.cell_centers()
    dx = (cx - box.cx) / grid.stride
    dy = (cy - box.cy) / grid.stride
    sq = dy[:, None] ** 2 + dx[None, :] ** 2
    values = np.exp(-sq / (2.0 * sigma_cells**2))
    return ScoreMap(grid, values)


def ltrb_map(box: Box, grid: GridSpec) -> LtrbMap:
    """Distances from each cell center to the box edges, over the image diagonal.

    Sides that would be negative (cell outside the box) are clamped to 0;
    the box geometry itself is never clamped to the image.
    """
    if box is None:
        raise ValueError("ltrb_map requires a present box")
    cx, cy = grid.cell_centers()
    diag = grid.diag
    left = (cx[None, :] - box.x) / diag
    right = (box.x2 - cx[None, :]) / diag
    top = (cy[:, None] - box.y) / diag
    bottom = (box.y2 - cy[:, None]) / diag
    h, w = grid.height_cells, grid.width_cells
    values = np.empty((h, w, 4), dtype=np.float64)
    values[:, :, 0] = np.clip(np.broadcast_to(left, (h, w)), 0.0, None)
    values[:, :, 1] = np.clip(np.broadcast_to(top, (h, w)), 0.0, None)
    values[:, :, 2] = np.clip(np.broadcast_to(right, (h, w)), 0.0, None)
    values[:, :, 3] = np.clip(np.broadcast_to(bottom, (h, w)), 0.0, None)
    return LtrbMap(grid, values)


def decode_box(score: ScoreMap, ltrb: LtrbMap) -> tuple[Box, float]:
    """Read the box at the score argmax and invert the LTRB encoding.

    The argmax tie-break is the lowest row-major index (np.argmax), so the
    readout is deterministic. The presence score is the maximum map value;
    an all-zero map decodes with presence 0, which callers treat as low
    confidence.
    """
    if score.grid != ltrb.grid:
        raise ValueError("score and ltrb maps must share a grid")
    grid = score.grid
    flat = int(np.argmax(score.values))
    row, col = divmod(flat, grid.width_cells)
    cxs, cys = grid.cell_centers()
    cx, cy = cxs[col], cys[row]
    diag = grid.diag
    l, t, r, b = ltrb.values[row, col]
    x = cx - l * diag
    y = cy - t * diag
    w = max((l + r) * diag, 1e-6)
    h = max((t + b) * diag, 1e-6)
    presence = float(score.values[row, col])
    return Box(float(x), float(y), float(w), float(h)), presence
