"""31-channel gradient-orientation features (Felzenszwalb variant).

Per cell: 18 contrast-sensitive orientation channels, 9 contrast-insensitive,
4 gradient-energy channels. Every cell is kept; block-normalization
neighborhoods are clamped at the patch border, so the output grid is exactly
floor(h/cell) x floor(w/cell).
"""
from __future__ import annotations

import numpy as np

from .. import grids
from ..boxes import PatchSpec
from ..dcf import FeatureStack

N_SENSITIVE = 18
N_INSENSITIVE = 9
N_CHANNELS = 31
TRUNCATION = 0.2
_ENERGY_GAIN = 1.0 / np.sqrt(float(N_SENSITIVE))
_NORM_EPS = 1e-9


def _pixel_gradients(img: np.ndarray):
    """Per-pixel gradient of the color channel with the largest magnitude."""
    p = np.pad(img, ((1, 1), (1, 1), (0, 0)), mode="edge")
    dy = p[2:, 1:-1] - p[:-2, 1:-1]
    dx = p[1:-1, 2:] - p[1:-1, :-2]
    mag2 = dx * dx + dy * dy
    pick = np.argmax(mag2, axis=2)
    take = np.take_along_axis
    gx = take(dx, pick[:, :, None], axis=2)[:, :, 0]
    gy = take(dy, pick[:, :, None], axis=2)[:, :, 0]
    return gx, gy


def _cell_coords(n_pixels: int, cell: int, n_cells: int):
    """Soft assignment of pixel rows/cols to the two nearest cell centers."""
    pos = (np.arange(n_pixels) + 0.5) / cell - 0.5
    i0 = np.floor(pos).astype(np.int64)
    f = pos - i0
    i1 = i0 + 1
    i0c = np.clip(i0, 0, n_cells - 1)
    i1c = np.clip(i1, 0, n_cells - 1)
    return i0c, i1c, 1.0 - f, f


def cell_histograms(pixels: np.ndarray, cell_size: int = 4) -> np.ndarray:
    """Soft-binned 18-orientation cell histograms, shape (cy, cx, 18).

    Orientation and spatial contributions are both linearly interpolated;
    spatial bins past the border fold into the outermost cell.
    """
    img = np.asarray(pixels, dtype=np.float64)
    if img.ndim == 2:
        img = img[:, :, None].repeat(3, axis=2)
    h, w = img.shape[:2]
    cy, cx = h // cell_size, w // cell_size
    if cy < 1 or cx < 1:
        raise ValueError(f"patch {h}x{w} smaller than one {cell_size}px cell")

    gx, gy = _pixel_gradients(img)
    mag = np.sqrt(gx * gx + gy * gy)
    ang = np.arctan2(gy, gx) % (2.0 * np.pi)
    b = ang * (N_SENSITIVE / (2.0 * np.pi))
    b0 = np.floor(b).astype(np.int64) % N_SENSITIVE
    bf = b - np.floor(b)
    b1 = (b0 + 1) % N_SENSITIVE

    r0, r1, wr0, wr1 = _cell_coords(h, cell_size, cy)
    c0, c1, wc0, wc1 = _cell_coords(w, cell_size, cx)

    hist = np.zeros(cy * cx * N_SENSITIVE)
    for rows, wr in ((r0, wr0), (r1, wr1)):
        for cols, wc in ((c0, wc0), (c1, wc1)):
            sw = wr[:, None] * wc[None, :] * mag
            base = (rows[:, None] * cx + cols[None, :]) * N_SENSITIVE
            np.add.at(hist, base + b0, sw * (1.0 - bf))
            np.add.at(hist, base + b1, sw * bf)
    return hist.reshape(cy, cx, N_SENSITIVE)


def _shift_clamped(a: np.ndarray, dy: int, dx: int) -> np.ndarray:
    ys = np.clip(np.arange(a.shape[0]) + dy, 0, a.shape[0] - 1)
    xs = np.clip(np.arange(a.shape[1]) + dx, 0, a.shape[1] - 1)
    return a[ys[:, None], xs[None, :]]


def hog_features(pixels: np.ndarray, cell_size: int = 4) -> FeatureStack:
    """31-channel stack from an image patch (H, W, 3) or (H, W) in [0, 1]."""
    hist = cell_histograms(pixels, cell_size)
    insens = hist[:, :, :N_INSENSITIVE] + hist[:, :, N_INSENSITIVE:]
    energy = (insens * insens).sum(axis=2)

    out = np.zeros(hist.shape[:2] + (N_CHANNELS,))
    for i, (sy, sx) in enumerate(((-1, -1), (-1, 1), (1, -1), (1, 1))):
        block = (energy
                 + _shift_clamped(energy, sy, 0)
                 + _shift_clamped(energy, 0, sx)
                 + _shift_clamped(energy, sy, sx))
        norm = 1.0 / np.sqrt(block + _NORM_EPS)
        hs = np.minimum(hist * norm[:, :, None], TRUNCATION)
        hi = np.minimum(insens * norm[:, :, None], TRUNCATION)
        out[:, :, :N_SENSITIVE] += 0.5 * hs
        out[:, :, N_SENSITIVE:N_SENSITIVE + N_INSENSITIVE] += 0.5 * hi
        out[:, :, N_SENSITIVE + N_INSENSITIVE + i] = _ENERGY_GAIN * hs.sum(axis=2)
    return FeatureStack(np.moveaxis(out, 2, 0))


def extract_hog(image: np.ndarray, patch: PatchSpec, cell_size: int = 4) -> FeatureStack:
    """HOG stack of a patch cropped (edge-replicated) at its native size."""
    ph = int(round(patch.height))
    pw = int(round(patch.width))
    if ph < cell_size or pw < cell_size:
        raise ValueError(f"patch {ph}x{pw} smaller than one {cell_size}px cell")
    img = np.asarray(image)
    scale = 255.0 if img.dtype == np.uint8 else 1.0
    pix = grids.extract_patch(img, patch.cx, patch.cy, patch.width, patch.height,
                              ph, pw) / scale
    return hog_features(pix, cell_size)
