"""Multi-channel linear correlation filtering in the Fourier domain.

Conventions, fixed package-wide:
  * unnormalized forward DFT, 1/(MN) inverse (numpy's default);
  * the model stores numerator A_d = y_hat * conj(x_hat_d) per channel and a
    shared real denominator B = sum_d x_hat_d * conj(x_hat_d);
  * the response to a candidate z is real(ifft2(sum_d A_d*z_hat_d / (B+lambda))),
    so responding to the training patch peaks at the label peak and a circular
    shift of the candidate moves the peak by exactly that shift.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


class FeatureStack:
    """A (channels, rows, cols) stack of real-valued feature grids."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3:
            raise ValueError(f"expected 2-D or 3-D data, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1 or arr.shape[2] < 1:
            raise ValueError(f"empty feature stack {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("feature stack contains non-finite values")
        self.data = arr

    @property
    def channel_count(self) -> int:
        return self.data.shape[0]

    @property
    def grid_shape(self) -> tuple:
        return self.data.shape[1:]

    def __repr__(self):
        return f"FeatureStack{self.data.shape}"


@dataclass
class GaussianLabel:
    """Desired response: periodic Gaussian with peak exactly 1 at zero shift."""
    grid: np.ndarray
    sigma: float
    _spectrum: np.ndarray = field(default=None, repr=False)

    @property
    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            self._spectrum = np.fft.fft2(self.grid)
        return self._spectrum


@dataclass
class FilterModel:
    """Learned filter state: per-channel numerator, shared denominator."""
    numerator: np.ndarray    # (D, M, N) complex
    denominator: np.ndarray  # (M, N) real
    lam: float
    eta: float = 1.0

    @property
    def channel_count(self) -> int:
        return self.numerator.shape[0]

    @property
    def grid_shape(self) -> tuple:
        return self.numerator.shape[1:]


class ResponseMap:
    """Real response grid plus its argmax peak (ties: smallest row, then col)."""

    __slots__ = ("grid", "peak_position", "peak_value")

    def __init__(self, grid: np.ndarray):
        g = np.asarray(grid, dtype=np.float64)
        if g.ndim != 2:
            raise ValueError("response grid must be 2-D")
        self.grid = g
        flat = int(np.argmax(g))  # first occurrence in row-major order
        self.peak_position = (flat // g.shape[1], flat % g.shape[1])
        self.peak_value = float(g[self.peak_position])


def make_gaussian_label(rows: int, cols: int, target_h: float, target_w: float,
                        sigma_factor: float) -> GaussianLabel:
    """Periodic Gaussian label over circular shift distances.

    sigma = sigma_factor * sqrt(target_h * target_w), in grid units.
    """
    if rows < 1 or cols < 1:
        raise ValueError("label grid must be at least 1x1")
    if target_h <= 0 or target_w <= 0 or sigma_factor <= 0:
        raise ValueError("target size and sigma factor must be positive")
    sigma = sigma_factor * float(np.sqrt(target_h * target_w))
    rm = np.arange(rows)
    cn = np.arange(cols)
    dr = np.minimum(rm, rows - rm)[:, None]
    dc = np.minimum(cn, cols - cn)[None, :]
    grid = np.exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma))
    return GaussianLabel(grid=grid, sigma=sigma)


@lru_cache(maxsize=32)
def hann_window(rows: int, cols: int) -> np.ndarray:
    """Separable 2-D Hann window; a length-1 axis contributes [1.0]."""
    win = np.outer(np.hanning(rows), np.hanning(cols))
    win.setflags(write=False)
    return win


def apply_hann(features: FeatureStack) -> FeatureStack:
    """Multiply every channel by the separable Hann window."""
    win = hann_window(*features.grid_shape)
    return FeatureStack(features.data * win[None, :, :])


def _check_pair(features: FeatureStack, label: GaussianLabel):
    if features.grid_shape != label.grid.shape:
        raise ValueError(
            f"feature grid {features.grid_shape} != label grid {label.grid.shape}")


def train_filter(features: FeatureStack, label: GaussianLabel, lam: float) -> FilterModel:
    """Ridge-regression filter over all circular shifts of the training stack."""
    if lam < 0:
        raise ValueError("regularization must be >= 0")
    _check_pair(features, label)
    xf = np.fft.fft2(features.data, axes=(-2, -1))
    num = label.spectrum[None, :, :] * np.conj(xf)
    den = (xf * np.conj(xf)).real.sum(axis=0)
    return FilterModel(numerator=num, denominator=den, lam=lam, eta=1.0)


def respond(model: FilterModel, candidate: FeatureStack) -> ResponseMap:
    """Correlation response of the model over all circular shifts of the candidate."""
    if candidate.grid_shape != model.grid_shape:
        raise ValueError(
            f"candidate grid {candidate.grid_shape} != model grid {model.grid_shape}")
    if candidate.channel_count != model.channel_count:
        raise ValueError(
            f"candidate has {candidate.channel_count} channels, model "
            f"{model.channel_count}")
    zf = np.fft.fft2(candidate.data, axes=(-2, -1))
    return respond_spectrum(model, zf)


def respond_spectrum(model: FilterModel, zf: np.ndarray) -> ResponseMap:
    """respond() on an already-transformed candidate spectrum (D, M, N)."""
    spec = (model.numerator * zf).sum(axis=0) / (model.denominator + model.lam)
    return ResponseMap(np.fft.ifft2(spec).real)


def update_model(model: FilterModel, features: FeatureStack, label: GaussianLabel,
                 eta: float) -> FilterModel:
    """Exponential running update of numerator and denominator.

    A <- (1-eta) A + eta y_hat*conj(x_hat);  B <- (1-eta) B + eta sum|x_hat|^2.
    eta = 1 reproduces train_filter exactly.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError("eta must be in (0, 1]")
    _check_pair(features, label)
    if features.channel_count != model.channel_count:
        raise ValueError(
            f"update has {features.channel_count} channels, model "
            f"{model.channel_count}")
    xf = np.fft.fft2(features.data, axes=(-2, -1))
    num = label.spectrum[None, :, :] * np.conj(xf)
    den = (xf * np.conj(xf)).real.sum(axis=0)
    return FilterModel(
        numerator=(1.0 - eta) * model.numerator + eta * num,
        denominator=(1.0 - eta) * model.denominator + eta * den,
        lam=model.lam,
        eta=eta,
    )


def wrap_displacement(peak: tuple, shape: tuple) -> tuple:
    """Map an argmax position to a signed circular displacement."""
    r, c = peak
    rows, cols = shape
    dr = (r + rows // 2) % rows - rows // 2
    dc = (c + cols // 2) % cols - cols // 2
    return dr, dc
