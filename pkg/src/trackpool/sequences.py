"""Sequence ingestion: benchmark-style directories and synthetic rendering.

A sequence directory holds img/ with sortable frame files plus
groundtruth_rect.txt, one "x,y,w,h" row per frame (top-left, 1-indexed;
comma, tab, or space separated). Synthetic sequences are rendered from a
small declarative key=value script and are bit-reproducible for a given
script and seed.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import grids
from .boxes import BoundingBox
from .errors import DataError, FormatError, NotFoundError

_IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp"}


@dataclass
class SequenceSpec:
    """Frames plus raw ground-truth rows (kept verbatim for exact round-trips)."""
    name: str
    gt: np.ndarray                      # (N, 4) float64, top-left 1-indexed
    frame_paths: Optional[List[Path]] = None
    frames: Optional[List[np.ndarray]] = None  # in-memory uint8 RGB
    attributes: tuple = ()

    def __len__(self) -> int:
        return len(self.gt)

    def frame(self, index: int) -> np.ndarray:
        """Frame as (H, W, 3) uint8 RGB."""
        if not 0 <= index < len(self):
            raise NotFoundError(f"frame {index} out of range 0..{len(self) - 1}")
        if self.frames is not None:
            return self.frames[index]
        from PIL import Image
        path = self.frame_paths[index]
        try:
            with Image.open(path) as im:
                return np.asarray(im.convert("RGB"))
        except OSError as e:
            raise DataError(f"frame {index} unreadable ({path}): {e}") from e

    @property
    def boxes(self) -> list:
        return [BoundingBox.from_ltwh(*row) for row in self.gt]

    def save_groundtruth(self, path):
        lines = [",".join(repr(float(v)) for v in row) for row in self.gt]
        Path(path).write_text("\n".join(lines) + "\n")


def _parse_gt_line(line: str, lineno: int):
    parts = line.replace(",", " ").split()
    if len(parts) != 4:
        raise FormatError(f"ground-truth line {lineno}: expected 4 fields, "
                          f"got {len(parts)}")
    try:
        x, y, w, h = (float(p) for p in parts)
    except ValueError:
        raise FormatError(f"ground-truth line {lineno}: non-numeric field") from None
    if w <= 0 or h <= 0:
        raise FormatError(f"ground-truth line {lineno}: non-positive size")
    return x, y, w, h


def load_sequence(directory) -> SequenceSpec:
    """Load a benchmark-style sequence directory."""
    root = Path(directory)
    if not root.is_dir():
        raise NotFoundError(f"sequence directory not found: {root}")
    img_dir = root / "img"
    if not img_dir.is_dir():
        raise NotFoundError(f"no img/ directory under {root}")
    frames = sorted(p for p in img_dir.iterdir()
                    if p.suffix.lower() in _IMAGE_SUFFIXES)
    if not frames:
        raise NotFoundError(f"no image files under {img_dir}")
    gt_path = root / "groundtruth_rect.txt"
    if not gt_path.is_file():
        raise NotFoundError(f"missing {gt_path}")
    rows = []
    for i, line in enumerate(gt_path.read_text().splitlines(), start=1):
        if line.strip():
            rows.append(_parse_gt_line(line, i))
    if len(rows) != len(frames):
        raise FormatError(f"{root.name}: {len(frames)} frames but {len(rows)} "
                          f"ground-truth rows")
    attrs = ()
    attr_path = root / "attrs.txt"
    if attr_path.is_file():
        attrs = tuple(attr_path.read_text().replace(",", " ").split())
    return SequenceSpec(name=root.name, gt=np.array(rows, dtype=np.float64),
                        frame_paths=frames, attributes=attrs)


@dataclass
class MotionScript:
    """Declarative synthetic-sequence description (key=value file)."""
    name: str = "synthetic"
    width: int = 320
    height: int = 240
    frames: int = 60
    target_width: float = 40.0
    target_height: float = 40.0
    start_x: float = 60.0          # initial center, 0-indexed pixels
    start_y: float = 120.0
    velocity_x: float = 0.0        # pixels per frame
    velocity_y: float = 0.0
    zoom: float = 1.0              # per-frame size multiplier
    texture_cells: int = 8
    seed: int = 7
    occluder_from: int = 0         # 1-based frame range; 0 disables
    occluder_to: int = 0
    occluder_x: float = 0.0
    occluder_width: float = 0.0

    @classmethod
    def parse(cls, text: str) -> "MotionScript":
        types = {f.name: type(f.default) for f in fields(cls)}
        values = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise FormatError(f"script line {lineno}: expected key=value")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in types:
                raise FormatError(f"script line {lineno}: unknown key {key!r}")
            try:
                values[key] = types[key](val.strip())
            except ValueError:
                raise FormatError(
                    f"script line {lineno}: bad value for {key!r}") from None
        return cls(**values)

    @classmethod
    def load(cls, path) -> "MotionScript":
        p = Path(path)
        if not p.is_file():
            raise NotFoundError(f"script not found: {p}")
        return cls.parse(p.read_text())


def _target_texture(script: MotionScript, rng: np.random.Generator) -> np.ndarray:
    """Warm checkerboard with per-pixel noise, float RGB at base resolution."""
    th = max(8, int(round(script.target_height)))
    tw = max(8, int(round(script.target_width)))
    cells = max(2, script.texture_cells)
    yy = (np.arange(th)[:, None] * cells // th)
    xx = (np.arange(tw)[None, :] * cells // tw)
    checker = ((yy + xx) % 2).astype(np.float64)
    a = np.array([210.0, 60.0, 40.0])
    b = np.array([240.0, 200.0, 60.0])
    tex = checker[:, :, None] * b + (1.0 - checker[:, :, None]) * a
    tex += rng.normal(0.0, 18.0, size=tex.shape)
    return np.clip(tex, 0.0, 255.0)


def _background(script: MotionScript, rng: np.random.Generator) -> np.ndarray:
    h, w = script.height, script.width
    ys = np.linspace(0.0, 1.0, h)[:, None, None]
    xs = np.linspace(0.0, 1.0, w)[None, :, None]
    base = np.array([40.0, 70.0, 110.0]) + 60.0 * ys + 25.0 * xs
    base = base + rng.normal(0.0, 6.0, size=(h, w, 3))
    return np.clip(base, 0.0, 255.0)


def synth_sequence(script) -> SequenceSpec:
    """Render a moving/zooming textured rectangle over a static background."""
    if isinstance(script, (str, Path)):
        script = MotionScript.load(script)
    if script.frames < 1:
        raise ValueError("need at least one frame")
    if script.width < 16 or script.height < 16:
        raise ValueError("image too small")
    rng = np.random.Generator(np.random.PCG64(script.seed))
    tex = _target_texture(script, rng)
    bg = _background(script, rng)
    occ_noise = rng.normal(0.0, 5.0, size=(script.height, 1, 3))

    frames = []
    gt = np.empty((script.frames, 4), dtype=np.float64)
    for t in range(script.frames):
        cx = script.start_x + script.velocity_x * t
        cy = script.start_y + script.velocity_y * t
        w = script.target_width * script.zoom ** t
        h = script.target_height * script.zoom ** t
        frame = bg.copy()

        top, left = cy - h / 2.0, cx - w / 2.0
        y0 = max(0, int(np.floor(top)))
        y1 = min(script.height, int(np.ceil(top + h)))
        x0 = max(0, int(np.floor(left)))
        x1 = min(script.width, int(np.ceil(left + w)))
        if y1 > y0 and x1 > x0:
            py = np.arange(y0, y1) + 0.5
            px = np.arange(x0, x1) + 0.5
            inside_y = (py >= top) & (py < top + h)
            inside_x = (px >= left) & (px < left + w)
            ty = (py - top) / h * tex.shape[0] - 0.5
            tx = (px - left) / w * tex.shape[1] - 0.5
            vals = grids.bilinear_sample(tex, ty[:, None], tx[None, :])
            sel = inside_y[:, None] & inside_x[None, :]
            region = frame[y0:y1, x0:x1]
            region[sel] = vals[sel]

        if (script.occluder_from > 0
                and script.occluder_from <= t + 1 <= script.occluder_to):
            ox0 = max(0, int(round(script.occluder_x)))
            ox1 = min(script.width, int(round(script.occluder_x
                                              + script.occluder_width)))
            if ox1 > ox0:
                frame[:, ox0:ox1] = np.clip(128.0 + occ_noise, 0.0, 255.0)

        frames.append(np.clip(np.round(frame), 0, 255).astype(np.uint8))
        gt[t] = (left + 1.0, top + 1.0, w, h)

    return SequenceSpec(name=script.name, gt=gt, frames=frames)


def write_sequence(seq: SequenceSpec, out_dir) -> Path:
    """Write frames as PNGs plus groundtruth_rect.txt in benchmark layout."""
    from PIL import Image
    root = Path(out_dir)
    img_dir = root / "img"
    img_dir.mkdir(parents=True, exist_ok=True)
    for i in range(len(seq)):
        Image.fromarray(seq.frame(i)).save(img_dir / f"{i + 1:04d}.png")
    seq.save_groundtruth(root / "groundtruth_rect.txt")
    return root
