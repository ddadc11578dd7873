"""Scale filter: candidate grid, training, location."""
import numpy as np
import pytest

from trackpool import grids
from trackpool.scale import ScaleFilter


def checker_image(rng, size=200, cell=8):
    y, x = np.mgrid[0:size, 0:size]
    img = (((y // cell) + (x // cell)) % 2).astype(np.float64)
    img += rng.normal(0.0, 0.02, img.shape)
    return np.clip(img, 0.0, 1.0)


def test_candidate_grid_centered():
    sf = ScaleFilter(count=33, step=1.02)
    assert sf.offsets[0] == -16 and sf.offsets[-1] == 16
    assert sf.factors[16] == 1.0
    assert sf.factors[17] == pytest.approx(1.02)
    assert sf.factors[0] == pytest.approx(1.02 ** -16)
    even = ScaleFilter(count=4, step=1.05)
    assert list(even.offsets) == [-2, -1, 0, 1]


def test_constructor_validation():
    with pytest.raises(ValueError):
        ScaleFilter(count=0)
    with pytest.raises(ValueError):
        ScaleFilter(step=1.0)
    with pytest.raises(ValueError):
        ScaleFilter(learning_rate=0.0)


def test_locate_requires_training(rng):
    sf = ScaleFilter()
    with pytest.raises(ValueError):
        sf.locate(checker_image(rng), 100.0, 100.0, 40.0, 40.0)


def test_static_scene_locates_unit_scale(rng):
    img = checker_image(rng)
    sf = ScaleFilter(count=33, step=1.02)
    sf.update(img, 100.0, 100.0, 40.0, 40.0)
    assert sf.locate(img, 100.0, 100.0, 40.0, 40.0) == 1.0


def test_single_candidate_is_identity(rng):
    img = checker_image(rng)
    sf = ScaleFilter(count=1, step=1.02)
    sf.update(img, 100.0, 100.0, 40.0, 40.0)
    assert sf.locate(img, 100.0, 100.0, 40.0, 40.0) == 1.0


def test_detects_grown_target(rng):
    # the training scene shown again at 1.02^4 magnification about the center;
    # querying at the old size should pick a factor close to that growth
    img = checker_image(rng, cell=8)
    sf = ScaleFilter(count=33, step=1.02)
    sf.update(img, 100.0, 100.0, 48.0, 48.0)
    zoom = 1.02 ** 4
    big = grids.extract_patch(img, 100.0, 100.0, 200.0 / zoom, 200.0 / zoom,
                              200, 200)
    got = sf.locate(big, 100.0, 100.0, 48.0, 48.0)
    assert got == pytest.approx(zoom, rel=0.03)


def test_model_area_capped():
    sf = ScaleFilter()
    mh, mw = sf._model_shape_for(120.0, 90.0)
    assert mh * mw <= 512 * 1.1
    assert sf._model_shape_for(10.0, 8.0) == (8, 10)


def test_update_damps_filter(rng):
    img_a = checker_image(rng)
    img_b = np.roll(img_a, 3, axis=0)
    sf = ScaleFilter(count=9, step=1.03, learning_rate=0.25)
    sf.update(img_a, 100.0, 100.0, 40.0, 40.0)
    num0 = sf.numerator.copy()
    den0 = sf.denominator.copy()
    sf.update(img_b, 100.0, 100.0, 40.0, 40.0)
    fresh = ScaleFilter(count=9, step=1.03, learning_rate=0.25)
    fresh.update(img_b, 100.0, 100.0, 40.0, 40.0)
    assert sf.numerator == pytest.approx(0.75 * num0 + 0.25 * fresh.numerator)
    assert sf.denominator == pytest.approx(0.75 * den0 + 0.25 * fresh.denominator)


def test_sample_cache_reused(rng):
    img = checker_image(rng)
    sf = ScaleFilter(count=5, step=1.02)
    cache = {}
    a = sf.sample(img, 100.0, 100.0, 40.0, 40.0, cache)
    b = sf.sample(img, 100.0, 100.0, 40.0, 40.0, cache)
    assert a is b
    assert len(cache) == 1
