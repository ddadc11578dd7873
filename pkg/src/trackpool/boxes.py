"""Box geometry.

Internally a box is a continuous axis-aligned rectangle described by its
center and extent, in 0-indexed image coordinates. Ground-truth files use
the top-left, 1-indexed (x, y, w, h) convention; the conversions live here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class BoundingBox:
    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        vals = (self.cx, self.cy, self.w, self.h)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite box {vals}")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box must have positive area, got w={self.w} h={self.h}")

    @property
    def left(self) -> float:
        return self.cx - self.w / 2.0

    @property
    def top(self) -> float:
        return self.cy - self.h / 2.0

    @property
    def right(self) -> float:
        return self.cx + self.w / 2.0

    @property
    def bottom(self) -> float:
        return self.cy + self.h / 2.0

    @property
    def area(self) -> float:
        return self.w * self.h

    def iou(self, other: "BoundingBox") -> float:
        iw = min(self.right, other.right) - max(self.left, other.left)
        ih = min(self.bottom, other.bottom) - max(self.top, other.top)
        if iw <= 0 or ih <= 0:
            return 0.0
        inter = iw * ih
        return inter / (self.area + other.area - inter)

    def center_distance(self, other: "BoundingBox") -> float:
        return math.hypot(self.cx - other.cx, self.cy - other.cy)

    def moved(self, dx: float, dy: float) -> "BoundingBox":
        return BoundingBox(self.cx + dx, self.cy + dy, self.w, self.h)

    def resized(self, w: float, h: float) -> "BoundingBox":
        return BoundingBox(self.cx, self.cy, w, h)

    def clamped(self, img_w: float, img_h: float, min_size: float = 2.0) -> "BoundingBox":
        """Keep the box inside the image, at least min_size on each side."""
        w = min(max(self.w, min_size), img_w)
        h = min(max(self.h, min_size), img_h)
        cx = min(max(self.cx, w / 2.0), img_w - w / 2.0) if img_w > w else img_w / 2.0
        cy = min(max(self.cy, h / 2.0), img_h - h / 2.0) if img_h > h else img_h / 2.0
        return BoundingBox(cx, cy, w, h)

    @classmethod
    def from_ltwh(cls, x: float, y: float, w: float, h: float) -> "BoundingBox":
        """From a 1-indexed top-left ground-truth row."""
        return cls((x - 1.0) + w / 2.0, (y - 1.0) + h / 2.0, w, h)

    def to_ltwh(self) -> tuple:
        """Back to the 1-indexed top-left row convention."""
        return (self.left + 1.0, self.top + 1.0, self.w, self.h)


@dataclass(frozen=True)
class PatchSpec:
    """Search/training region: center plus padded size in image pixels."""
    cx: float
    cy: float
    width: float
    height: float
    scale: float = 1.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("patch must have positive size")
        if self.scale <= 0:
            raise ValueError("patch scale must be positive")

    @classmethod
    def around(cls, box: BoundingBox, padding: float, scale: float = 1.0) -> "PatchSpec":
        return cls(box.cx, box.cy, box.w * padding, box.h * padding, scale)
