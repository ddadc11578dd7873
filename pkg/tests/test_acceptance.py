"""Acceptance suite: ten end-to-end checks at their advertised tolerances.

Each test prints one ACCEPTANCE nn PASS/FAIL line (visible with -s; pytest -v
also reports one line per criterion) and asserts the stated bound.
"""
import hashlib
import math
import time

import numpy as np
from conftest import translation_script, zoom_script

from trackpool import (BoundingBox, FeatureStack, RunConfig,
                       make_gaussian_label, respond, run_tracker,
                       select_executives, synth_sequence, train_filter)
from trackpool.fitness import (combine_fitness, fluctuation, mean_overlap,
                               overlap, pair_score, self_score, smoothness,
                               weighted_temporal_mean)
from trackpool.metrics import (PRECISION_THRESHOLDS, SUCCESS_THRESHOLDS,
                               precision_curve, success_auc)
from trackpool.reports import write_results_csv
from trackpool.tracker import PoolTracker


def report(num, desc, ok, detail=""):
    line = f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}: {desc}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def random_box(rng, span=100.0):
    return BoundingBox(float(rng.uniform(10, span)), float(rng.uniform(10, span)),
                       float(rng.uniform(2, 40)), float(rng.uniform(2, 40)))


def test_01_response_matches_spatial_correlation():
    """Fourier response equals brute-force spatial circular correlation."""
    rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(3, 17))
        n = int(rng.integers(3, 17))
        d = int(rng.integers(1, 5))
        lam = float(rng.uniform(1e-4, 1e-2))
        x = FeatureStack(rng.normal(size=(d, m, n)))
        z = FeatureStack(rng.normal(size=(d, m, n)))
        label = make_gaussian_label(m, n, m / 2.0, n / 2.0, 0.1)
        model = train_filter(x, label, lam)
        got = respond(model, z).grid
        taps = np.fft.ifft2(np.conj(model.numerator / (model.denominator + lam)),
                            axes=(-2, -1)).real
        for dr in range(m):
            for dc in range(n):
                want = (taps * np.roll(z.data, (-dr, -dc), axis=(-2, -1))).sum()
                worst = max(worst, abs(got[dr, dc] - want))
    elapsed = time.perf_counter() - t0
    report(1, "response matches spatial circular correlation",
           worst < 1e-6 and elapsed < 10.0,
           f"max abs err {worst:.3e} < 1e-6, {elapsed:.1f}s < 10s")


def test_02_fitness_chain_matches_reference():
    """Every fitness formula agrees with a straight reference implementation."""
    rng = np.random.default_rng(1)

    def ref_iou(a, b):
        ix = min(a.cx + a.w / 2, b.cx + b.w / 2) - max(a.cx - a.w / 2,
                                                       b.cx - b.w / 2)
        iy = min(a.cy + a.h / 2, b.cy + b.h / 2) - max(a.cy - a.h / 2,
                                                       b.cy - b.h / 2)
        if ix <= 0 or iy <= 0:
            return 0.0
        inter = ix * iy
        return inter / (a.w * a.h + b.w * b.h - inter)

    def close(a, b):
        return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-15)

    ok = True
    for _ in range(1000):
        a, b = random_box(rng), random_box(rng)
        o = overlap(a, b)
        d = 1.0 - ref_iou(a, b)
        ok &= close(o, math.exp(-d * d))

        k = int(rng.integers(1, 6))
        cur = rng.uniform(math.exp(-1.0), 1.0, size=k)
        ref = rng.uniform(math.exp(-1.0), 1.0, size=k)
        ok &= close(mean_overlap(cur), sum(cur) / k)
        ok &= close(fluctuation(cur, ref),
                    math.sqrt(sum((c - r) ** 2 for c, r in zip(cur, ref)) / k))

        rho = float(rng.uniform(1.01, 2.0))
        series = rng.uniform(0.0, 1.0, size=int(rng.integers(1, 6)))
        weights = [rho ** i for i in range(len(series))]
        want = sum(w * s for w, s in zip(weights, series)) / sum(weights)
        ok &= close(weighted_temporal_mean(series, rho), want)
        ok &= close(self_score(series, rho), want)

        m_bar = float(rng.uniform(0.3, 1.0))
        v_bar = float(rng.uniform(0.0, 0.5))
        eps = 1e-6
        ok &= close(pair_score(m_bar, v_bar, eps), m_bar / (v_bar + eps))

        prev, curb = random_box(rng), random_box(rng)
        dist2 = (prev.cx - curb.cx) ** 2 + (prev.cy - curb.cy) ** 2
        sigma = (curb.w + curb.h) / 2.0
        ok &= close(smoothness(prev, curb),
                    math.exp(-dist2 / (2.0 * sigma * sigma)))

        mu = float(rng.uniform(0.0, 1.0))
        r_pair = m_bar / (v_bar + eps)
        r_self = want
        ok &= close(combine_fitness(r_pair, r_self, mu),
                    mu * r_pair + (1.0 - mu) * r_self)
        if not ok:
            break
    report(2, "fitness formulas match independent reference",
           bool(ok), "1000 random inputs, rel 1e-9")


def test_03_roulette_frequencies():
    """Single-draw roulette frequencies match the probabilities."""
    probs = np.array([0.5, 0.25, 0.25, 0.0, 0.0, 0.0])
    rng = np.random.Generator(np.random.PCG64(7))
    counts = np.zeros(probs.size)
    n = 100_000
    for _ in range(n):
        counts[select_executives(probs, 1, rng)[0]] += 1
    freq = counts / n
    worst = float(np.abs(freq - probs).max())
    report(3, "roulette single-draw frequencies within 0.01",
           worst <= 0.01, f"max deviation {worst:.4f}, n={n}")


def test_04_saturated_adaptive_equals_exhaustive(tmp_path):
    """Adaptive selection with every expert seated degrades to the fixed ensemble."""
    seq = synth_sequence(translation_script(frames=50))
    base = dict(fitness_window=5, seed=1)
    a = run_tracker(RunConfig(mode="adaptive", executive_count=63, **base), seq)
    b = run_tracker(RunConfig(mode="all-experts", executive_count=63, **base), seq)
    pa = write_results_csv(a, tmp_path / "adaptive.csv")
    pb = write_results_csv(b, tmp_path / "exhaustive.csv")
    same = pa.read_bytes() == pb.read_bytes()
    report(4, "adaptive K=63 bit-identical to all-experts mode",
           same, "50-frame synthetic run, results bytes compared")


def test_05_translation_tracking_precision():
    """Full-pool adaptive tracking of a 100-frame constant-velocity target."""
    seq = synth_sequence(translation_script(frames=100, dx=2.0))
    t0 = time.perf_counter()
    record = run_tracker(RunConfig(seed=0), seq)
    elapsed = time.perf_counter() - t0
    _, p20 = precision_curve(record.boxes, seq.boxes)
    errors = [b.center_distance(g) for b, g in zip(record.boxes, seq.boxes)]
    mean_err = float(np.mean(errors))
    report(5, "100-frame translation: P(20px)=1.0, mean error <= 2px, < 2min",
           p20 == 1.0 and mean_err <= 2.0 and elapsed < 120.0,
           f"P20={p20:.3f}, mean err {mean_err:.2f}px, {elapsed:.1f}s")


def test_06_zoom_scale_estimate():
    """Cumulative scale estimate on a steadily growing target."""
    seq = synth_sequence(zoom_script(frames=11, zoom=1.05))
    record = run_tracker(RunConfig(seed=0), seq)
    want = 1.05 ** 10
    got = record.frames[-1].box.w / seq.boxes[0].w
    rel = abs(got - want) / want
    report(6, "zoom sequence: cumulative scale within 10%",
           rel <= 0.10, f"estimated x{got:.4f} vs x{want:.4f}, err {rel:.1%}")


def test_07_metrics_match_counting():
    """Precision/success/AUC equal counting oracles; perfect prediction tops out."""
    rng = np.random.default_rng(3)
    ok = True
    for _ in range(100):
        n = int(rng.integers(5, 40))
        gt = [random_box(rng) for _ in range(n)]
        pred = [b.moved(rng.normal(0, 12), rng.normal(0, 12)) for b in gt]
        p_curve, p20 = precision_curve(pred, gt)
        s_curve, auc = success_auc(pred, gt)
        for ti, tau in enumerate(PRECISION_THRESHOLDS):
            want = sum(p.center_distance(g) <= tau
                       for p, g in zip(pred, gt)) / n
            ok &= abs(p_curve[ti] - want) < 1e-12
        for ti, theta in enumerate(SUCCESS_THRESHOLDS):
            want = sum(p.iou(g) > theta for p, g in zip(pred, gt)) / n
            ok &= abs(s_curve[ti] - want) < 1e-12
        ok &= abs(p20 - p_curve[20]) < 1e-12
        ok &= abs(auc - s_curve.mean()) < 1e-12
        if not ok:
            break
    gt = [random_box(rng) for _ in range(10)]
    perfect, _ = precision_curve(gt, gt)
    ok &= bool(np.all(perfect == 1.0))
    report(7, "metrics match counting oracles; pred=gt gives P(tau)=1",
           bool(ok), "100 random track pairs, abs 1e-12")


def test_08_overlap_bounds_symmetry_identity():
    """Overlap score is bounded, symmetric, and 1 exactly for identical boxes."""
    rng = np.random.default_rng(4)
    lo = math.exp(-1.0)
    ok = True
    for _ in range(10_000):
        a, b = random_box(rng), random_box(rng)
        o = overlap(a, b)
        ok &= lo <= o <= 1.0
        ok &= o == overlap(b, a)
        ok &= o < 1.0  # random continuous boxes never coincide
        ok &= overlap(a, a) == 1.0
        if not ok:
            break
    report(8, "overlap in [exp(-1), 1], symmetric, 1 iff identical",
           bool(ok), "10000 random box pairs")


def test_09_non_executive_state_frozen():
    """Experts outside the executive set keep fitness and filters bit-identical."""

    def digest(expert, fitness_value):
        h = hashlib.sha1()
        h.update(repr(float(fitness_value)).encode())
        for kind in sorted(expert.models):
            m = expert.models[kind]
            h.update(m.numerator.tobytes())
            h.update(m.denominator.tobytes())
        if expert.scale is not None and expert.scale.trained:
            h.update(expert.scale.numerator.tobytes())
            h.update(expert.scale.denominator.tobytes())
        return h.digest()

    seq = synth_sequence(translation_script(frames=50))
    tracker = PoolTracker(RunConfig(executive_count=10, seed=2))
    tracker.start(seq.frame(0), seq.boxes[0])
    violations = 0
    checked = 0
    for i in range(1, len(seq)):
        before = [digest(ex, tracker.ledger.fitness[j])
                  for j, ex in enumerate(tracker.experts)]
        rec = tracker.step(seq.frame(i))
        for j, ex in enumerate(tracker.experts):
            if rec.executives >> (ex.id.mask - 1) & 1:
                continue
            checked += 1
            if digest(ex, tracker.ledger.fitness[j]) != before[j]:
                violations += 1
    report(9, "non-executive fitness and filter state bitwise frozen",
           violations == 0 and checked > 0,
           f"{checked} expert-frames checked, {violations} violations")


def test_10_identical_runs_byte_identical(tmp_path):
    """Same config and seed reproduce the results file byte for byte."""
    seq = synth_sequence(translation_script(frames=50))
    cfg = RunConfig(executive_count=10, seed=5)
    pa = write_results_csv(run_tracker(cfg, seq), tmp_path / "a.csv")
    pb = write_results_csv(run_tracker(cfg, seq), tmp_path / "b.csv")
    same = pa.read_bytes() == pb.read_bytes()
    report(10, "identical config+seed gives byte-identical results",
           same, "two 50-frame runs compared")
