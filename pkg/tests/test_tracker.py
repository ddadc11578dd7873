"""Run configuration and the per-frame tracking loop."""
import numpy as np
import pytest
from conftest import started_tracker, translation_script, zoom_script

from trackpool import ExpertId, RunConfig, enumerate_pool, run_tracker, synth_sequence
from trackpool.errors import ConfigError
from trackpool.metrics import precision_curve
from trackpool.tracker import MODES, PoolTracker


# ---------------------------------------------------------------- config

def test_default_config_is_valid():
    cfg = RunConfig().validate()
    assert cfg.executive_count == 28
    assert cfg.mode in MODES


@pytest.mark.parametrize("field,value", [
    ("regularization", -1.0), ("learning_rate", 0.0), ("learning_rate", 1.5),
    ("sigma_factor", 0.0), ("padding", 1.0), ("cell_size", 0),
    ("executive_count", 0), ("executive_count", 64), ("fitness_window", 0),
    ("rho", 1.0), ("mu", -0.1), ("epsilon", 0.0), ("scale_count", 0),
    ("scale_step", 0.99), ("scale_learning_rate", 0.0), ("color_bins", 1),
    ("mode", "greedy"), ("features", ""),
])
def test_config_rejects_bad_values(field, value):
    with pytest.raises(ConfigError):
        RunConfig(**{field: value}).validate()


def test_config_text_round_trip():
    cfg = RunConfig(regularization=3e-4, learning_rate=0.015, padding=2.25,
                    executive_count=10, rho=1.3, color_mask=False, seed=42,
                    mode="all-experts")
    assert RunConfig.from_text(cfg.to_text()) == cfg


def test_config_file_round_trip(tmp_path):
    cfg = RunConfig(sigma_factor=0.0625, scale_step=1.03)
    path = tmp_path / "run.cfg"
    cfg.to_file(path)
    assert RunConfig.from_file(path) == cfg


def test_config_parses_comments_and_bools():
    cfg = RunConfig.from_text("""
        # overrides
        color_mask = off
        executive_count = 5   # inline comments too
        mu = 0.25
    """)
    assert cfg.color_mask is False
    assert cfg.executive_count == 5
    assert cfg.mu == 0.25


@pytest.mark.parametrize("text", [
    "padding", "not_a_key = 1", "cell_size = four", "color_mask = maybe",
    "mu = 2.0",
])
def test_config_text_rejects(text):
    with pytest.raises(ConfigError):
        RunConfig.from_text(text)


def test_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_file(tmp_path / "none.cfg")


def test_config_overrides_skip_none():
    cfg = RunConfig().with_overrides(seed=None, executive_count=7)
    assert cfg.seed == 0 and cfg.executive_count == 7
    with pytest.raises(ConfigError):
        RunConfig().with_overrides(executive_count=200)


# ---------------------------------------------------------------- startup

def test_start_builds_geometry_and_trains_pool():
    tracker, seq = started_tracker(masks=(1, 2, 3))
    # 40 px box, padding 2.0, cell 4: grid 20, template 80 px
    assert tracker.ctx.grid == (20, 20)
    assert tracker.ctx.tmpl == (80, 80)
    assert tracker.ctx.label.grid[0, 0] == 1.0
    assert all(ex.last_trained_frame == 0 for ex in tracker.experts)
    assert tracker.best_box == seq.boxes[0]
    assert tracker.frame_no == 1


def test_start_record_shape():
    tracker, seq = started_tracker(masks=(1, 5))
    rec = tracker.start(seq.frame(0), seq.boxes[0])
    assert rec.index == 1
    assert rec.winner == 0
    assert rec.box == seq.boxes[0]
    assert rec.executives == (1 << 0) | (1 << 4)
    assert rec.breakdowns == {}


def test_step_requires_start():
    tracker = PoolTracker(RunConfig(executive_count=1), pool=[ExpertId(1)])
    with pytest.raises(RuntimeError):
        tracker.step(np.zeros((40, 40, 3), dtype=np.uint8))


def test_pool_validation():
    with pytest.raises(ValueError):
        PoolTracker(RunConfig(executive_count=1), pool=[])
    with pytest.raises(ValueError):
        PoolTracker(RunConfig(executive_count=1), pool=[ExpertId(1), ExpertId(1)])
    with pytest.raises(ConfigError):
        PoolTracker(RunConfig(executive_count=5), pool=[ExpertId(1), ExpertId(2)])


# ---------------------------------------------------------------- selection flow

def test_cold_start_runs_everyone_then_narrows():
    masks = (1, 2, 4, 8, 16)
    tracker, seq = started_tracker(masks=masks, frames=12,
                                   executive_count=2, fitness_window=3)
    all_bits = sum(1 << (m - 1) for m in masks)
    recs = [tracker.step(seq.frame(i)) for i in range(1, 8)]
    # frames 2 and 3 fall inside the window: every expert runs
    assert recs[0].executives == all_bits
    assert recs[1].executives == all_bits
    for rec in recs[2:]:
        assert bin(rec.executives).count("1") == 2


def test_all_experts_mode_ignores_roulette():
    tracker, seq = started_tracker(masks=(1, 2, 3, 4), frames=8,
                                   executive_count=1, mode="all-experts")
    for i in range(1, 6):
        rec = tracker.step(seq.frame(i))
        assert bin(rec.executives).count("1") == 4
        assert rec.winner in (1, 2, 3, 4)


def test_executive_count_width_after_cold_start():
    cfg = RunConfig(executive_count=10, fitness_window=2, seed=3)
    seq = synth_sequence(translation_script(frames=6))
    record = run_tracker(cfg, seq)
    assert bin(record.frames[1].executives).count("1") == 63
    for fr in record.frames[2:]:
        assert bin(fr.executives).count("1") == 10


def test_non_executive_state_is_frozen():
    tracker, seq = started_tracker(masks=tuple(range(1, 11)), frames=10,
                                   executive_count=3, fitness_window=1)
    tracker.step(seq.frame(1))
    before = tracker.ledger.fitness.copy()
    trained_before = [ex.last_trained_frame for ex in tracker.experts]
    rec = tracker.step(seq.frame(2))
    ran = [i for i in range(10) if rec.executives >> (tracker.experts[i].id.mask - 1) & 1]
    for i in range(10):
        if i in ran:
            assert tracker.experts[i].last_trained_frame == 2
        else:
            assert tracker.ledger.fitness[i] == before[i]
            assert tracker.experts[i].last_trained_frame == trained_before[i]
    assert len(ran) == 3


def test_winner_box_becomes_search_center():
    tracker, seq = started_tracker(masks=(1, 2, 3), frames=5,
                                   executive_count=3)
    rec = tracker.step(seq.frame(1))
    assert tracker.best_box == rec.box
    assert rec.winner in (1, 2, 3)


# ---------------------------------------------------------------- whole runs

def test_single_expert_follows_translation():
    seq = synth_sequence(translation_script(frames=20))
    cfg = RunConfig(executive_count=1, seed=0)
    record = run_tracker(cfg, seq, pool=[ExpertId(1)])
    _, p20 = precision_curve(record.boxes, seq.boxes)
    errors = [b.center_distance(g) for b, g in zip(record.boxes, seq.boxes)]
    assert p20 == 1.0
    assert max(errors) <= 4.0
    assert np.mean(errors) <= 2.0


def test_run_is_seed_deterministic():
    seq = synth_sequence(translation_script(frames=8))
    cfg = RunConfig(executive_count=4, fitness_window=2, seed=9)
    pool = [ExpertId(m) for m in range(1, 16)]
    a = run_tracker(cfg, seq, pool)
    b = run_tracker(cfg, seq, pool)
    assert a.results_rows() == b.results_rows()


def test_different_seeds_select_differently():
    seq = synth_sequence(translation_script(frames=8))
    pool = [ExpertId(m) for m in range(1, 32)]
    cfg = RunConfig(executive_count=3, fitness_window=1, seed=0)
    a = run_tracker(cfg, seq, pool)
    b = run_tracker(cfg.with_overrides(seed=123), seq, pool)
    exe_a = [f.executives for f in a.frames]
    exe_b = [f.executives for f in b.frames]
    assert exe_a != exe_b


def test_adaptive_equals_all_experts_when_pool_saturated():
    # executive_count == pool size disables the roulette entirely
    seq = synth_sequence(translation_script(frames=6))
    pool = [ExpertId(m) for m in (1, 2, 3)]
    adaptive = run_tracker(RunConfig(executive_count=3, seed=5), seq, pool)
    exhaustive = run_tracker(RunConfig(executive_count=3, seed=77,
                                       mode="all-experts"), seq, pool)
    assert adaptive.results_rows() == exhaustive.results_rows()


def test_zoom_sequence_tracks_scale():
    seq = synth_sequence(zoom_script(frames=11, zoom=1.05))
    cfg = RunConfig(executive_count=1, sigma_factor=0.0625)
    record = run_tracker(cfg, seq, pool=[ExpertId(1)])
    want = 40.0 * 1.05 ** 10
    got = record.frames[-1].box.w
    assert got == pytest.approx(want, rel=0.10)
    assert record.frames[-1].box.w > 40.0 * 1.02 ** 5  # actually grew


def test_scale_disabled_keeps_size_fixed():
    seq = synth_sequence(zoom_script(frames=5))
    cfg = RunConfig(executive_count=1, scale_count=1)
    record = run_tracker(cfg, seq, pool=[ExpertId(1)])
    assert all(f.box.w == 40.0 for f in record.frames)


def test_run_empty_sequence_rejected():
    seq = synth_sequence(translation_script(frames=1))
    seq.gt = seq.gt[:0]
    seq.frames = []
    with pytest.raises(ValueError):
        run_tracker(RunConfig(), seq)


def test_results_rows_layout():
    seq = synth_sequence(translation_script(frames=3))
    record = run_tracker(RunConfig(executive_count=1), seq, pool=[ExpertId(7)])
    rows = record.results_rows()
    assert len(rows) == 3
    assert rows[0][0] == 1 and rows[2][0] == 3
    assert rows[0][5] == 0        # init frame has no winner
    assert rows[1][5] == 7        # single expert wins by default
    assert all(len(r) == 7 for r in rows)


def test_tracking_from_channel_map_file(tmp_path):
    from conftest import write_fullframe_maps
    from trackpool import FeatureKind

    seq = synth_sequence(translation_script(frames=12))
    maps = write_fullframe_maps(seq, tmp_path / "maps.bin",
                                kinds=(FeatureKind.L5,))
    cfg = RunConfig(executive_count=1, features=str(maps))
    record = run_tracker(cfg, seq, pool=[ExpertId(FeatureKind.L5.bit)])
    errors = [b.center_distance(g) for b, g in zip(record.boxes, seq.boxes)]
    assert np.mean(errors) <= 5.0
    assert max(errors) <= 10.0


def test_missing_channel_map_file_reports_not_found(tmp_path):
    from trackpool.errors import NotFoundError

    seq = synth_sequence(translation_script(frames=2))
    cfg = RunConfig(executive_count=1, features=str(tmp_path / "absent.bin"))
    with pytest.raises(NotFoundError):
        run_tracker(cfg, seq, pool=[ExpertId(2)])
