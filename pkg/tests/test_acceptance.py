"""Acceptance gate: one test per shipped criterion, each emitting a single
PASS/FAIL line (visible with `pytest -v -s` and in the captured output)."""

import functools
import time

import numpy as np
import pytest

from demo2bt import infotheory as it
from demo2bt.geometry import IDENTITY_QUAT
from demo2bt.pipeline import compile_demonstration
from demo2bt.replay_sim import (ScenarioSpec, TEMPLATES, WorldState, execute_bt,
                                generate_scenario, initial_scene, interval_iou,
                                placement_references,
                                velocity_manipulation_baseline,
                                verify_relative_poses)
from demo2bt.scene_graph import MANIPULATION, WindowedSignals
from demo2bt.signal_io import ElementId, PipelineConfig, Recording, Track

GRID = it.QuantizationGrid(0.01)


def criterion(number, description):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except pytest.skip.Exception:
                print(f"criterion {number:2d}: SKIP - {description}")
                raise
            except BaseException:
                print(f"criterion {number:2d}: FAIL - {description}")
                raise
            print(f"criterion {number:2d}: PASS - {description}")
        return wrapper
    return decorate


def counting_entropy(xs):
    _, counts = np.unique(GRID.bin_indices(xs), return_counts=True)
    p = counts / counts.sum()
    return float(-np.sum(p * np.log2(p)))


def counting_joint(xs, ys):
    pairs = np.stack([GRID.bin_indices(xs), GRID.bin_indices(ys)], axis=1)
    _, counts = np.unique(pairs, axis=0, return_counts=True)
    p = counts / counts.sum()
    return float(-np.sum(p * np.log2(p)))


@criterion(1, "information-theory property suite (1000 vectors, oracle-exact, < 5 s)")
def test_criterion_1_infotheory_properties():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    for _ in range(1000):
        x = rng.normal(0.0, rng.uniform(0.001, 0.2), 40)
        y = x + rng.normal(0.0, rng.uniform(0.001, 0.2), 40) \
            if rng.random() < 0.5 else rng.normal(0.0, 0.1, 40)

        hx = it.entropy(x, GRID)
        hy = it.entropy(y, GRID)
        hxy = it.joint_entropy(x, y, GRID)
        mi = it.mutual_information(x, y, GRID)

        assert abs(hx - counting_entropy(x)) <= 1e-9
        assert abs(hxy - counting_joint(x, y)) <= 1e-9
        assert -1e-9 <= hx <= np.log2(40) + 1e-9  # entropy bounds
        assert max(hx, hy) - 1e-9 <= hxy <= hx + hy + 1e-9  # joint bounds
        assert mi >= 0.0
        assert abs(mi - it.mutual_information(y, x, GRID)) <= 1e-9  # symmetry
        assert abs(it.mutual_information(x, x, GRID) - hx) <= 1e-9  # MI(x,x)=H(x)
        shift = it.QuantizationGrid(GRID.q, origin=3 * GRID.q)
        assert abs(it.entropy(x + 3 * GRID.q, shift) - hx) <= 1e-9  # grid shift
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, f"property suite took {elapsed:.2f} s"


@criterion(2, "relocate entropy bell shape and MI phase structure (Fig. 2 analog)")
def test_criterion_2_bell_shape():
    rec, gt = generate_scenario(ScenarioSpec("relocate", seed=0))
    signals = WindowedSignals(rec, PipelineConfig())
    cs, ce = gt.motion["cup"]
    mid = (cs + ce) // 2
    half = signals.half

    h = it.sliding_entropy(rec.positions("cup")[:, 0], signals.w, GRID)
    mi = signals.mi("hand", "cup")
    for t in signals.frames():
        if t < cs - half or t > ce + half:  # window fully outside the motion
            assert h[t] == 0.0, f"entropy {h[t]} at static frame {t}"
            assert mi[t] == 0.0, f"MI {mi[t]} during approach/retreat at {t}"
    support = [t for t in signals.frames() if h[t] > 0]
    assert support, "no positive-entropy support"
    assert np.all(np.diff(support) == 1), "entropy support is not contiguous"
    peak = max(signals.frames(), key=lambda t: h[t])
    assert support[0] < peak < support[-1], "maximum is not interior"
    assert abs(peak - mid) <= half, f"peak {peak} vs motion midpoint {mid}"
    assert mi[mid] > signals.config.mi_epsilon


@criterion(3, "pick-and-place golden plan: 1 activity x [move, grasp, move, release]")
def test_criterion_3_pick_and_place_golden():
    rec, _ = generate_scenario(ScenarioSpec("pick_and_place", seed=0))
    first = compile_demonstration(rec)
    assert len(first.activities) == 1
    prims = first.primitive_lists[0]
    assert [p.family for p in prims] == ["move", "grasp", "move", "release"]
    assert [p.kind for p in prims] == ["move_to", "grasp", "move_to", "release"]
    assert [p.target for p in prims] == ["cup", "cup", "coaster", "cup"]
    assert len(first.plan.children) == 1
    assert len(first.plan.leaves()) == 4
    second = compile_demonstration(generate_scenario(ScenarioSpec("pick_and_place", seed=0))[0])
    assert first.plan.structurally_equal(second.plan), "pipeline is not deterministic"


@criterion(4, "cashier activity has 6 leaves including the complex-move node (Fig. 9)")
def test_criterion_4_cashier_structure():
    rec, _ = generate_scenario(ScenarioSpec("cashier", seed=0))
    result = compile_demonstration(rec)
    assert len(result.activities) == 1
    leaves = result.plan.children[0].children
    assert len(leaves) == 6
    assert [leaf.action_type for leaf in leaves] == [
        "move_to", "grasp", "move_to", "move_complex", "move_to", "release"]
    stub = leaves[3]
    assert stub.iu_bounds is not None  # demonstrated segment for the patterned motion
    # the flag must come from non-monotone MI over the scanning IU
    scan_iu = next(iu for iu in result.ius
                   if iu.kind == "HOO" and iu.target_identity() == "bottle"
                   and iu.repr_graph.oo_edge.target == "scanner")
    mi = [g.ho_edge.relation.mi_value for g in scan_iu.graphs]
    assert max(mi) - min(mi) > 0.5, "scanning oscillation did not modulate MI"
    assert scan_iu.repr_graph.oo_edge.relation.interaction_complexity is True


@criterion(5, "temporary-OO filtering: distractor removed; debug flag shows 1 extra move")
def test_criterion_5_temporary_filtering():
    with_d, _ = generate_scenario(ScenarioSpec("pass_by_distractor", seed=0))
    without_d, _ = generate_scenario(ScenarioSpec("pick_and_place", seed=0))
    pa = [p for pl in compile_demonstration(with_d).primitive_lists for p in pl]
    pb = [p for pl in compile_demonstration(without_d).primitive_lists for p in pl]
    assert [(p.kind, p.target) for p in pa] == [(p.kind, p.target) for p in pb]
    for a, b in zip(pa, pb):
        if a.transform is not None:
            assert np.allclose(a.transform, b.transform, atol=1e-12)

    raw = [p for pl in compile_demonstration(with_d, filter_temporary=False).primitive_lists
           for p in pl]
    assert len(raw) == len(pa) + 1
    extra = [p for p in raw if (p.kind, p.target) not in
             [(q.kind, q.target) for q in pa]]
    assert len(extra) == 1
    assert extra[0].family == "move"
    assert extra[0].target == "distractor"


@criterion(6, "generalization replay: 3 tray layouts within 1e-6; object-removal SUCCESS")
def test_criterion_6_generalization_replay():
    rec, _ = generate_scenario(ScenarioSpec("tray_two_cups", seed=0))
    plan = compile_demonstration(rec).plan
    for seed in (1, 2, 3):
        layout, _ = generate_scenario(ScenarioSpec("tray_two_cups", seed=seed))
        scene = initial_scene(layout, 0)
        effector = scene.pop(layout.hand.id)
        _, trace = execute_bt(plan, WorldState(scene, effector))
        assert trace.status == "SUCCESS"
        report = verify_relative_poses(trace, placement_references(plan),
                                       pos_tolerance=1e-6, yaw_tolerance=1e-6)
        assert report.passed, f"layout {seed}: {[vars(c) for c in report.checks]}"

    rec, _ = generate_scenario(ScenarioSpec("weigh_and_box", seed=0))
    plan = compile_demonstration(rec).plan
    scene = initial_scene(rec, 0)
    effector = scene.pop(rec.hand.id)
    scene.pop("profile_B2")  # background object not involved in any primitive
    _, trace = execute_bt(plan, WorldState(scene, effector))
    assert trace.status == "SUCCESS"
    assert verify_relative_poses(trace, placement_references(plan)).passed


@criterion(7, "noise robustness: IoU >= 0.8 on >= 18/20 seeds, beats velocity baseline")
def test_criterion_7_noise_robustness():
    runs = []
    for seed in range(20):
        rec, gt = generate_scenario(ScenarioSpec("relocate", seed=seed, noise_sigma=0.03))
        runs.append((rec, gt.manipulation["cup"]))

    mi_ious = []
    for rec, interval in runs:
        result = compile_demonstration(rec)
        mask = np.zeros(rec.duration, dtype=bool)
        for frame, g in zip(result.signals.frames(), result.graphs):
            if g is not None and g.ho_edge.relation.ho_type == MANIPULATION:
                mask[frame] = True
        mi_ious.append(interval_iou(mask, interval))
    mi_ious = np.array(mi_ious)
    assert np.sum(mi_ious >= 0.8) >= 18, f"IoUs: {np.round(mi_ious, 3)}"

    best_mean = -1.0
    for move_th in (0.02, 0.04, 0.06, 0.08, 0.10, 0.15):
        for rel_th in (0.05, 0.1, 0.2, 0.4, 0.8, 1.5, 3.0):
            ious = [interval_iou(
                velocity_manipulation_baseline(rec, "hand", "cup", move_th, rel_th),
                interval) for rec, interval in runs]
            best_mean = max(best_mean, float(np.mean(ious)))
    assert float(np.mean(mi_ious)) > best_mean, (
        f"MI mean {np.mean(mi_ious):.3f} vs baseline best {best_mean:.3f}")


@criterion(8, "all IU boundaries within w/2 = 20 frames across 9 templates x 5 seeds")
def test_criterion_8_boundary_accuracy():
    for template in TEMPLATES:
        for seed in range(5):
            rec, gt = generate_scenario(ScenarioSpec(template, seed=seed))
            result = compile_demonstration(rec)
            detected = [iu.start for iu in result.ius[1:]]
            assert len(detected) == len(gt.iu_boundaries), (
                f"{template}/{seed}: {detected} vs {gt.iu_boundaries}")
            for d, g in zip(detected, gt.iu_boundaries):
                assert abs(d - g) <= 20, (
                    f"{template}/{seed}: boundary {d} vs {g}")


@criterion(9, "throughput: 60 s / 30 Hz / 6-element recording in < 5 s")
def test_criterion_9_throughput():
    base, _ = generate_scenario(ScenarioSpec("tray_two_cups", seed=0))
    n = 1800
    tracks = {}
    for e in base.elements:
        pos = base.tracks[e.id].positions
        pos = np.vstack([pos, np.tile(pos[-1], (n - len(pos), 1))])
        tracks[e.id] = Track(pos, np.tile(IDENTITY_QUAT, (n, 1)))
    elements = list(base.elements)
    for i, xy in enumerate([(2.0, 2.0), (-2.0, 2.0)]):
        eid = f"extra{i + 1}"
        elements.append(ElementId(eid, "object"))
        tracks[eid] = Track(np.tile([xy[0], xy[1], 0.0], (n, 1)),
                            np.tile(IDENTITY_QUAT, (n, 1)))
    bench = Recording(30.0, elements, tracks, n)
    assert len(elements) == 6

    t0 = time.perf_counter()
    result = compile_demonstration(bench)
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, f"pipeline took {elapsed:.2f} s"
    assert len(result.activities) == 2  # the padded demo still compiles correctly


@criterion(10, "92% corpus success rate: not reproducible at desk scale (documented)")
def test_criterion_10_corpus_out_of_scope():
    pytest.skip("requires the external 150-video marker-based corpus; "
                "acceptance rests on criteria 1-9 (pose-log ingestion is "
                "covered by signal_io tests)")
