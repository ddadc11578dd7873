"""Binary container for precomputed per-frame feature maps.

Byte layout (all integers little-endian):

    offset  size  field
    0       4     magic, the ASCII bytes "FACF"
    4       4     u32 version, currently 1
    8       4     u32 frame_count
    12      4     u32 kind_count
    16      16*K  kind table, one entry per stored kind:
                  u32 kind index (FeatureKind value), u32 channels,
                  u32 rows, u32 cols
    ...           payload: frame-major, kinds in table order, channel-major,
                  row-major float32 values

Payload length must equal frame_count * sum(channels*rows*cols) floats and
every value must be finite.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .. import grids
from ..dcf import FeatureStack
from ..errors import FormatError, NotFoundError
from .kinds import FeatureKind

MAGIC = b"FACF"
VERSION = 1
_HEAD = struct.Struct("<4sIII")
_KIND = struct.Struct("<IIII")


class ChannelMapFile:
    """In-memory view of a channel-map file: frames of per-kind stacks."""

    def __init__(self, frame_count: int, shapes: dict, frames: list):
        self.frame_count = frame_count
        self.shapes = shapes    # FeatureKind -> (channels, rows, cols)
        self._frames = frames   # list of dict FeatureKind -> (C, R, W) float32

    @property
    def kinds(self) -> tuple:
        return tuple(self.shapes)

    @classmethod
    def read(cls, path) -> "ChannelMapFile":
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise NotFoundError(f"cannot read channel maps: {exc}") from exc
        if len(raw) < _HEAD.size:
            raise FormatError(f"{path}: truncated header")
        magic, version, frame_count, kind_count = _HEAD.unpack_from(raw, 0)
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        if kind_count < 1:
            raise FormatError(f"{path}: no kinds")
        off = _HEAD.size
        shapes = {}
        for _ in range(kind_count):
            if off + _KIND.size > len(raw):
                raise FormatError(f"{path}: truncated kind table")
            idx, ch, rows, cols = _KIND.unpack_from(raw, off)
            off += _KIND.size
            try:
                kind = FeatureKind(idx)
            except ValueError:
                raise FormatError(f"{path}: unknown kind index {idx}") from None
            if kind in shapes:
                raise FormatError(f"{path}: duplicate kind {kind.name}")
            if ch < 1 or rows < 1 or cols < 1:
                raise FormatError(f"{path}: empty dims for kind {kind.name}")
            shapes[kind] = (ch, rows, cols)

        per_frame = sum(c * r * w for c, r, w in shapes.values())
        expect = off + 4 * per_frame * frame_count
        if len(raw) != expect:
            raise FormatError(
                f"{path}: payload is {len(raw) - off} bytes, expected {expect - off}")
        flat = np.frombuffer(raw, dtype="<f4", offset=off)
        if not np.isfinite(flat).all():
            raise FormatError(f"{path}: non-finite payload values")

        frames = []
        pos = 0
        for _ in range(frame_count):
            stacks = {}
            for kind, (c, r, w) in shapes.items():
                n = c * r * w
                stacks[kind] = flat[pos:pos + n].reshape(c, r, w)
                pos += n
            frames.append(stacks)
        return cls(frame_count, shapes, frames)

    def _stack_raw(self, kind: FeatureKind, frame_index: int) -> np.ndarray:
        if kind not in self.shapes:
            raise NotFoundError(f"kind {kind.name} not stored in file")
        if not 0 <= frame_index < self.frame_count:
            raise NotFoundError(
                f"frame {frame_index} out of range (0..{self.frame_count - 1})")
        return self._frames[frame_index][kind]

    def stack(self, kind: FeatureKind, frame_index: int,
              out_shape: tuple = None) -> FeatureStack:
        """Stored stack for one frame, optionally resampled to (rows, cols)."""
        raw = self._stack_raw(kind, frame_index).astype(np.float64)
        if out_shape is not None:
            raw = grids.resize_stack(raw, out_shape[0], out_shape[1])
        return FeatureStack(raw)

    def patch_stack(self, kind: FeatureKind, frame_index: int,
                    rect: tuple, image_shape: tuple, out_shape: tuple) -> FeatureStack:
        """Crop of the stored map under an image-space rect (top, left, bottom, right).

        The rect is mapped through the stored-grid / image size ratio, then
        sampled bilinearly to out_shape.
        """
        raw = self._stack_raw(kind, frame_index)
        top, left, bottom, right = rect
        ih, iw = image_shape[:2]
        _, mr, mc = self.shapes[kind]
        sy, sx = mr / ih, mc / iw
        crop = grids.sample_stack_rect(raw.astype(np.float64),
                                       top * sy, left * sx, bottom * sy, right * sx,
                                       out_shape[0], out_shape[1])
        return FeatureStack(crop)


def load_channel_map(file: ChannelMapFile, kind: FeatureKind, frame_index: int,
                     out_shape: tuple = None) -> FeatureStack:
    """Convenience wrapper over ChannelMapFile.stack."""
    return file.stack(kind, frame_index, out_shape)


def write_channel_maps(path, frames) -> Path:
    """Write frames (each a dict FeatureKind -> (C, R, W) array) to a file."""
    if not frames:
        raise ValueError("need at least one frame")
    shapes = {}
    for kind in frames[0]:
        arr = np.asarray(frames[0][kind])
        if arr.ndim != 3:
            raise ValueError(f"{kind.name}: stacks must be 3-D")
        shapes[FeatureKind(kind)] = arr.shape
    parts = [_HEAD.pack(MAGIC, VERSION, len(frames), len(shapes))]
    for kind, (c, r, w) in shapes.items():
        parts.append(_KIND.pack(kind.value, c, r, w))
    for i, stacks in enumerate(frames):
        if set(stacks) != set(shapes):
            raise ValueError(f"frame {i}: kind set differs from frame 0")
        for kind, shape in shapes.items():
            arr = np.asarray(stacks[kind], dtype=np.float64)
            if arr.shape != shape:
                raise ValueError(
                    f"frame {i} kind {kind.name}: shape {arr.shape} != {shape}")
            if not np.isfinite(arr).all():
                raise ValueError(f"frame {i} kind {kind.name}: non-finite values")
            parts.append(arr.astype("<f4").tobytes(order="C"))
    out = Path(path)
    out.write_bytes(b"".join(parts))
    return out
