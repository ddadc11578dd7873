"""Shared fixtures and small builders for the test suite."""
from __future__ import annotations

import numpy as np
import pytest

from trackpool import ExpertId, FeatureKind, MotionScript, RunConfig, synth_sequence
from trackpool.tracker import PoolTracker


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def translation_script(frames=30, dx=2.0, dy=0.0, seed=7, name="translate"):
    return MotionScript(name=name, width=320, height=240, frames=frames,
                        target_width=40.0, target_height=40.0,
                        start_x=60.0, start_y=120.0,
                        velocity_x=dx, velocity_y=dy, seed=seed)


def zoom_script(frames=11, zoom=1.05, seed=5, name="zoom"):
    return MotionScript(name=name, width=280, height=280, frames=frames,
                        target_width=40.0, target_height=40.0,
                        start_x=140.0, start_y=140.0, zoom=zoom, seed=seed)


def started_tracker(masks=(1,), frames=2, script=None, **overrides):
    """PoolTracker after start() on frame 0 of a synthetic sequence.

    Returns (tracker, sequence). Default pool is the HOG-only expert.
    """
    script = script or translation_script(frames=frames)
    seq = synth_sequence(script)
    cfg = RunConfig(**{"executive_count": len(masks), **overrides})
    tracker = PoolTracker(cfg, pool=[ExpertId(m) for m in masks])
    tracker.start(seq.frame(0), seq.boxes[0])
    return tracker, seq


def write_fullframe_maps(seq, path, kinds=(FeatureKind.L5,), stride=2):
    """Channel-map file of blurred-luminance stacks at image/stride resolution."""
    from trackpool import grids
    from trackpool.features import (BLUR_RADIUS, CHANNEL_COUNT,
                                    write_channel_maps)
    frames = []
    for i in range(len(seq)):
        img = seq.frame(i)
        gray = grids.to_gray(img)
        mh, mw = gray.shape[0] // stride, gray.shape[1] // stride
        stacks = {}
        for kind in kinds:
            base = BLUR_RADIUS[kind]
            chans = [grids.box_blur(gray, base + j)
                     for j in range(CHANNEL_COUNT[kind])]
            stacks[kind] = grids.resize_stack(np.stack(chans), mh, mw)
        frames.append(stacks)
    return write_channel_maps(path, frames)
