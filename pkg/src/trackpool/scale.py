"""One-dimensional correlation filter over scale-sampled patches.

Candidate scales are step**s for s = -(S//2) .. centred on the current size.
Each candidate crop is reduced to a fixed grayscale template, flattened, and
weighted by a Hann window over the scale axis; a 1-D filter over that axis
locates the best multiplier. S = 1 degenerates to a constant 1.0.
"""
from __future__ import annotations

import numpy as np

from . import grids

_MAX_MODEL_AREA = 512.0


class ScaleFilter:
    def __init__(self, count: int = 33, step: float = 1.02, *,
                 sigma_factor: float = 0.25, lam: float = 1e-2,
                 learning_rate: float = 0.025):
        if count < 1:
            raise ValueError("need at least one scale candidate")
        if step <= 1.0:
            raise ValueError("scale step must exceed 1")
        if not 0.0 < learning_rate <= 1.0:
            raise ValueError("scale learning rate must be in (0, 1]")
        self.count = count
        self.step = step
        self.lam = lam
        self.learning_rate = learning_rate
        self.offsets = np.arange(count) - count // 2
        self.factors = step ** self.offsets.astype(np.float64)
        sigma = max(np.sqrt(count) * sigma_factor, 1e-3)
        label = np.exp(-0.5 * (self.offsets / sigma) ** 2)
        self._label_f = np.fft.fft(label)
        self.window = np.hanning(count) if count > 1 else np.ones(1)
        self.model_shape = None
        self.numerator = None
        self.denominator = None

    def _model_shape_for(self, w: float, h: float) -> tuple:
        shrink = min(1.0, np.sqrt(_MAX_MODEL_AREA / (w * h)))
        return (max(4, int(round(h * shrink))), max(4, int(round(w * shrink))))

    def sample(self, gray: np.ndarray, cx: float, cy: float, w: float, h: float,
               cache: dict = None) -> np.ndarray:
        """Sample matrix (template length x S), mean-removed, Hann-weighted."""
        if self.model_shape is None:
            self.model_shape = self._model_shape_for(w, h)
        key = ("scale", cx, cy, w, h, self.model_shape, self.count, self.step)
        if cache is not None and key in cache:
            return cache[key]
        mh, mw = self.model_shape
        x = np.empty((mh * mw, self.count))
        for i, f in enumerate(self.factors):
            p = grids.extract_patch(gray, cx, cy, w * f, h * f, mh, mw)
            x[:, i] = p.ravel()
        x -= x.mean(axis=0, keepdims=True)
        x *= self.window[None, :]
        if cache is not None:
            cache[key] = x
        return x

    @property
    def trained(self) -> bool:
        return self.numerator is not None

    def update(self, gray: np.ndarray, cx: float, cy: float, w: float, h: float,
               cache: dict = None):
        """Train (first call) or running-update the scale filter at a located box."""
        x = self.sample(gray, cx, cy, w, h, cache)
        xf = np.fft.fft(x, axis=1)
        num = self._label_f[None, :] * np.conj(xf)
        den = (xf * np.conj(xf)).real.sum(axis=0)
        if self.numerator is None:
            self.numerator = num
            self.denominator = den
        else:
            lr = self.learning_rate
            self.numerator = (1.0 - lr) * self.numerator + lr * num
            self.denominator = (1.0 - lr) * self.denominator + lr * den

    def locate(self, gray: np.ndarray, cx: float, cy: float, w: float, h: float,
               cache: dict = None) -> float:
        """Best multiplier for the current box; exact ties prefer smallest |s|."""
        if self.numerator is None:
            raise ValueError("scale filter has not been trained")
        if self.count == 1:
            return 1.0
        z = self.sample(gray, cx, cy, w, h, cache)
        zf = np.fft.fft(z, axis=1)
        spec = (self.numerator * zf).sum(axis=0) / (self.denominator + self.lam)
        resp = np.fft.ifft(spec).real
        ties = np.flatnonzero(resp == resp.max())
        best = min(ties, key=lambda i: (abs(int(self.offsets[i])), i))
        return float(self.factors[best])
