"""Synthetic demonstration scenarios with ground truth, kinematic plan execution
against arbitrary initial scenes, and relative-pose verification.

Scenario tracks are built from minimum-jerk segments between waypoints; additive
Gaussian position noise and small seed-dependent layout jitter make multi-seed
robustness studies meaningful. Ground truth is derived from the clean tracks
(threshold crossings of instantaneous distances), independent of the windowed
estimators under test.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bt_gen import BTNode, FAILURE, MOVE_AWAY, MOVE_COMPLEX, MOVE_TO, SUCCESS, resolve_target
from .geometry import IDENTITY_QUAT, Pose6D, invert_transform, relative_transform, wrap_angle
from .primitives import EFFECTOR, GRASP, RELEASE, ObjectConfig
from .signal_io import ElementId, PipelineConfig, Recording, Track, sliding_mean

TEMPLATES = (
    "relocate",
    "stir_and_place",
    "carry_assembly",
    "pick_and_place",
    "pass_by_distractor",
    "cashier",
    "weigh_and_box",
    "tray_two_cups",
    "clean_surface",
)

LAYOUT_JITTER = 0.01  # meters, uniform per object per horizontal axis


@dataclass
class ScenarioSpec:
    template: str
    seed: int = 0
    noise_sigma: float = 0.0
    sample_rate: float = 30.0

    def __post_init__(self):
        if self.template not in TEMPLATES:
            raise ValueError(f"unknown template {self.template!r}")


@dataclass
class GroundTruth:
    """By-construction reference for a generated scenario."""

    manipulation: dict[str, tuple[int, int]]  # object -> carried interval (inclusive)
    motion: dict[str, tuple[int, int]]  # object -> frames in motion
    iu_boundaries: list[int]  # internal segment-boundary frames
    activities: list[dict]  # {"target": id, "primitives": [action types]}
    placements: list[tuple[str, str]]  # (carried object, background object)

    def to_dict(self) -> dict:
        return {
            "manipulation": {k: list(v) for k, v in self.manipulation.items()},
            "motion": {k: list(v) for k, v in self.motion.items()},
            "iu_boundaries": self.iu_boundaries,
            "activities": self.activities,
            "placements": [list(p) for p in self.placements],
        }


def minimum_jerk_profile(n: int) -> np.ndarray:
    """Normalized positions s(tau) at tau = 1/n .. 1 for an n-step segment."""
    tau = np.arange(1, n + 1) / n
    return 10 * tau**3 - 15 * tau**4 + 6 * tau**5


class _Builder:
    """Appends hold / minimum-jerk phases to dense per-element position tracks."""

    def __init__(self, initial: dict[str, np.ndarray]):
        self.tracks = {e: [np.asarray(p, dtype=float).copy()] for e, p in initial.items()}

    @property
    def frame(self) -> int:
        return len(next(iter(self.tracks.values()))) - 1

    def current(self, element: str) -> np.ndarray:
        return self.tracks[element][-1]

    def hold(self, n: int) -> None:
        for frames in self.tracks.values():
            frames.extend([frames[-1]] * n)

    def move(self, n: int, destinations: dict[str, np.ndarray]) -> tuple[int, int]:
        """Minimum-jerk move of the named elements; others hold. Returns the
        (first, last) frame indices of the segment."""
        start = self.frame + 1
        s = minimum_jerk_profile(n)
        for element, frames in self.tracks.items():
            if element in destinations:
                p0 = frames[-1]
                p1 = np.asarray(destinations[element], dtype=float)
                frames.extend([p0 + (p1 - p0) * si for si in s])
            else:
                frames.extend([frames[-1]] * n)
        return start, self.frame

    def arrays(self) -> dict[str, np.ndarray]:
        return {e: np.vstack(frames) for e, frames in self.tracks.items()}


def _distance(tracks: dict[str, np.ndarray], a: str, b: str) -> np.ndarray:
    return np.linalg.norm(tracks[a][:, :2] - tracks[b][:, :2], axis=1)


def _first_below(d: np.ndarray, th: float, start: int) -> int:
    idx = np.nonzero(d[start:] < th)[0]
    if len(idx) == 0:
        raise ValueError("no crossing found")
    return start + int(idx[0])


def _first_at_or_above(d: np.ndarray, th: float, start: int) -> int:
    idx = np.nonzero(d[start:] >= th)[0]
    if len(idx) == 0:
        raise ValueError("no crossing found")
    return start + int(idx[0])


_MOVE = MOVE_TO
_PICK = [MOVE_TO, GRASP, MOVE_TO, RELEASE]


def _oscillate(b: _Builder, elements: list[str], axis: int, half_amplitude: float,
               half_strokes: int, frames_per_stroke: int) -> tuple[int, int]:
    start = b.frame + 1
    for i in range(half_strokes):
        sign = 1.0 if i % 2 == 0 else -1.0
        dests = {}
        for e in elements:
            p = b.current(e).copy()
            p[axis] += sign * 2 * half_amplitude if i > 0 else sign * half_amplitude
            dests[e] = p
        b.move(frames_per_stroke, dests)
    # recentre on the starting point
    dests = {}
    for e in elements:
        p = b.current(e).copy()
        p[axis] += half_amplitude if half_strokes % 2 == 0 else -half_amplitude
        dests[e] = p
    b.move(frames_per_stroke // 2, dests)
    return start, b.frame


def _build_template(template: str, jitter) -> tuple[dict[str, np.ndarray], GroundTruth, str]:
    """Returns (position tracks, ground truth, hand id)."""
    cfg = PipelineConfig()
    d_ho, d_oo = cfg.d_ho_threshold, cfg.d_oo_threshold
    hand = "hand"

    if template == "relocate":
        cup = jitter("cup", [0.40, 0.00])
        b = _Builder({hand: [1.20, 0.60, 0.0], "cup": cup})
        b.hold(70)
        b.move(16, {hand: b.current("cup")})
        b.hold(3)
        dest = b.current("cup") + [0.50, 0.15, 0.0]
        carry = b.move(120, {hand: dest, "cup": dest})
        b.hold(6)
        b.move(16, {hand: [1.20, 0.60, 0.0]})
        b.hold(70)
        tracks = b.arrays()
        ho_end = _first_at_or_above(_distance(tracks, hand, "cup"), d_ho, carry[1])
        gt = GroundTruth(
            manipulation={"cup": carry}, motion={"cup": carry},
            iu_boundaries=[carry[0], ho_end],
            activities=[{"target": "cup", "primitives": [MOVE_TO, GRASP, RELEASE]}],
            placements=[])
        return tracks, gt, hand

    if template in ("pick_and_place", "pass_by_distractor"):
        cup = jitter("cup", [0.40, 0.00])
        coaster = jitter("coaster", [0.90, 0.00])
        initial = {hand: [0.10, 0.50, 0.0], "cup": cup, "coaster": coaster}
        if template == "pass_by_distractor":
            initial["distractor"] = jitter("distractor", [0.40, 0.13])
        b = _Builder(initial)
        b.hold(70)
        b.move(20, {hand: b.current("cup")})
        b.hold(3)
        dest = b.current("coaster") + [-0.04, 0.0, 0.0]
        carry = b.move(90, {hand: dest, "cup": dest})
        b.hold(20)
        b.move(20, {hand: [0.10, 0.50, 0.0]})
        b.hold(80)
        tracks = b.arrays()
        oo_start = _first_below(_distance(tracks, "cup", "coaster"), d_oo, carry[0])
        ho_end = _first_at_or_above(_distance(tracks, hand, "cup"), d_ho, carry[1])
        gt = GroundTruth(
            manipulation={"cup": carry}, motion={"cup": carry},
            iu_boundaries=[carry[0], oo_start, ho_end],
            activities=[{"target": "cup", "primitives": list(_PICK)}],
            placements=[("cup", "coaster")])
        return tracks, gt, hand

    if template == "cashier":
        bottle = jitter("bottle", [0.30, 0.00])
        scanner = jitter("scanner", [0.60, 0.35])
        packing = jitter("packing_area", [1.05, -0.05])
        b = _Builder({hand: [0.00, 0.55, 0.0], "bottle": bottle,
                      "scanner": scanner, "packing_area": packing})
        b.hold(70)
        b.move(20, {hand: b.current("bottle")})
        b.hold(3)
        scan_pos = b.current("scanner") + [0.0, -0.05, 0.0]
        carry1 = b.move(60, {hand: scan_pos, "bottle": scan_pos})
        _oscillate(b, [hand, "bottle"], axis=0, half_amplitude=0.05,
                   half_strokes=6, frames_per_stroke=30)
        dest = b.current("packing_area") + [-0.04, 0.04, 0.0]
        carry2 = b.move(75, {hand: dest, "bottle": dest})
        b.hold(20)
        b.move(20, {hand: [0.00, 0.55, 0.0]})
        b.hold(80)
        tracks = b.arrays()
        d_scan = _distance(tracks, "bottle", "scanner")
        d_pack = _distance(tracks, "bottle", "packing_area")
        oo1_start = _first_below(d_scan, d_oo, carry1[0])
        oo1_end = _first_at_or_above(d_scan, d_oo, carry2[0])
        oo2_start = _first_below(d_pack, d_oo, carry2[0])
        ho_end = _first_at_or_above(_distance(tracks, hand, "bottle"), d_ho, carry2[1])
        gt = GroundTruth(
            manipulation={"bottle": (carry1[0], carry2[1])},
            motion={"bottle": (carry1[0], carry2[1])},
            iu_boundaries=[carry1[0], oo1_start, oo1_end, oo2_start, ho_end],
            activities=[{"target": "bottle",
                         "primitives": [MOVE_TO, GRASP, MOVE_TO, MOVE_COMPLEX, MOVE_TO, RELEASE]}],
            placements=[("bottle", "packing_area")])
        return tracks, gt, hand

    if template == "weigh_and_box":
        profile = jitter("profile_C", [0.30, 0.00])
        b2 = jitter("profile_B2", [0.30, 0.13])
        scale = jitter("scale", [0.75, 0.10])
        b1 = jitter("profile_B1", [0.80, -0.40])
        b = _Builder({hand: [0.05, 0.45, 0.0], "profile_C": profile,
                      "profile_B2": b2, "scale": scale, "profile_B1": b1})
        b.hold(70)
        b.move(20, {hand: b.current("profile_C")})
        b.hold(3)
        dest1 = b.current("scale") + [-0.03, 0.0, 0.0]
        carry1 = b.move(75, {hand: dest1, "profile_C": dest1})
        b.hold(20)
        b.move(20, {hand: [0.30, 0.55, 0.0]})
        b.hold(70)
        b.move(20, {hand: b.current("profile_C")})
        b.hold(3)
        dest2 = b.current("profile_B1") + [-0.02, 0.04, 0.0]
        carry2 = b.move(75, {hand: dest2, "profile_C": dest2})
        b.hold(20)
        b.move(20, {hand: [0.40, 0.20, 0.0]})
        b.hold(80)
        tracks = b.arrays()
        d_scale = _distance(tracks, "profile_C", "scale")
        oo1_start = _first_below(d_scale, d_oo, carry1[0])
        ho1_end = _first_at_or_above(_distance(tracks, hand, "profile_C"), d_ho, carry1[1])
        oo2_start = _first_below(_distance(tracks, "profile_C", "profile_B1"), d_oo, carry2[0])
        ho2_end = _first_at_or_above(_distance(tracks, hand, "profile_C"), d_ho, carry2[1])
        gt = GroundTruth(
            manipulation={"profile_C": carry1},
            motion={"profile_C": carry1},
            iu_boundaries=[carry1[0], oo1_start, ho1_end,
                           carry2[0], oo2_start, ho2_end],
            activities=[{"target": "profile_C", "primitives": list(_PICK)},
                        {"target": "profile_C", "primitives": list(_PICK)}],
            placements=[("profile_C", "scale"), ("profile_C", "profile_B1")])
        return tracks, gt, hand

    if template == "tray_two_cups":
        tray = jitter("tray", [0.80, 0.00])
        cup1 = jitter("cup1", [0.25, 0.35])
        cup2 = jitter("cup2", [0.25, -0.35])
        b = _Builder({hand: [0.00, 0.00, 0.0], "tray": tray, "cup1": cup1, "cup2": cup2})
        b.hold(70)
        b.move(20, {hand: b.current("cup1")})
        b.hold(3)
        dest1 = b.current("tray") + [0.0, 0.12, 0.0]
        carry1 = b.move(75, {hand: dest1, "cup1": dest1})
        b.hold(20)
        b.move(20, {hand: [0.00, 0.00, 0.0]})
        b.hold(40)
        b.move(20, {hand: b.current("cup2")})
        b.hold(3)
        dest2 = b.current("tray") + [0.0, -0.12, 0.0]
        carry2 = b.move(75, {hand: dest2, "cup2": dest2})
        b.hold(20)
        b.move(20, {hand: [0.00, 0.00, 0.0]})
        b.hold(80)
        tracks = b.arrays()
        oo1_start = _first_below(_distance(tracks, "cup1", "tray"), d_oo, carry1[0])
        ho1_end = _first_at_or_above(_distance(tracks, hand, "cup1"), d_ho, carry1[1])
        oo2_start = _first_below(_distance(tracks, "cup2", "tray"), d_oo, carry2[0])
        ho2_end = _first_at_or_above(_distance(tracks, hand, "cup2"), d_ho, carry2[1])
        gt = GroundTruth(
            manipulation={"cup1": carry1, "cup2": carry2},
            motion={"cup1": carry1, "cup2": carry2},
            iu_boundaries=[carry1[0], oo1_start, ho1_end,
                           carry2[0], oo2_start, ho2_end],
            activities=[{"target": "cup1", "primitives": list(_PICK)},
                        {"target": "cup2", "primitives": list(_PICK)}],
            placements=[("cup1", "tray"), ("cup2", "tray")])
        return tracks, gt, hand

    if template == "carry_assembly":
        profile = jitter("profile_A", [0.40, 0.00])
        joint = jitter("joint", [0.40, 0.08])
        b = _Builder({hand: [0.05, 0.45, 0.0], "profile_A": profile, "joint": joint})
        b.hold(70)
        b.move(20, {hand: b.current("profile_A")})
        b.hold(3)
        delta = np.array([0.45, 0.25, 0.0])
        carry = b.move(90, {hand: b.current("profile_A") + delta,
                            "profile_A": b.current("profile_A") + delta,
                            "joint": b.current("joint") + delta})
        b.hold(15)
        b.move(20, {hand: [0.05, 0.45, 0.0]})
        b.hold(80)
        tracks = b.arrays()
        ho_end = _first_at_or_above(_distance(tracks, hand, "profile_A"), d_ho, carry[1])
        gt = GroundTruth(
            manipulation={"profile_A": carry},
            motion={"profile_A": carry, "joint": carry},
            iu_boundaries=[carry[0], ho_end],
            activities=[{"target": "unity:joint+profile_A",
                         "primitives": [MOVE_TO, GRASP, RELEASE]}],
            placements=[])
        return tracks, gt, hand

    if template in ("stir_and_place", "clean_surface"):
        tool = "spoon" if template == "stir_and_place" else "sponge"
        site = "cup" if template == "stir_and_place" else "cooker"
        tool0 = jitter(tool, [0.40, 0.00] if tool == "spoon" else [0.30, -0.10])
        site0 = jitter(site, [0.75, 0.20] if site == "cup" else [0.75, 0.10])
        b = _Builder({hand: [0.10, 0.50, 0.0], tool: tool0, site: site0})
        b.hold(70)
        b.move(20, {hand: b.current(tool)})
        b.hold(3)
        work = b.current(site) + [0.0, -0.05, 0.0]
        carry1 = b.move(60, {hand: work, tool: work})
        _oscillate(b, [hand, tool], axis=0, half_amplitude=0.05,
                   half_strokes=6, frames_per_stroke=30)
        rest = np.array([0.40, -0.30, 0.0]) if tool == "spoon" else tool0
        carry2 = b.move(75, {hand: rest, tool: rest})
        b.hold(20)
        b.move(20, {hand: [0.10, 0.50, 0.0]})
        b.hold(80)
        tracks = b.arrays()
        d_site = _distance(tracks, tool, site)
        oo_start = _first_below(d_site, d_oo, carry1[0])
        oo_end = _first_at_or_above(d_site, d_oo, carry2[0])
        ho_end = _first_at_or_above(_distance(tracks, hand, tool), d_ho, carry2[1])
        gt = GroundTruth(
            manipulation={tool: (carry1[0], carry2[1])},
            motion={tool: (carry1[0], carry2[1])},
            iu_boundaries=[carry1[0], oo_start, oo_end, ho_end],
            activities=[{"target": tool,
                         "primitives": [MOVE_TO, GRASP, MOVE_TO, MOVE_COMPLEX, RELEASE]}],
            placements=[])
        return tracks, gt, hand

    raise ValueError(f"unknown template {template!r}")


def generate_scenario(spec: ScenarioSpec) -> tuple[Recording, GroundTruth]:
    """Deterministic synthetic demonstration plus its by-construction reference."""
    rng = np.random.default_rng(spec.seed)
    jitters: dict[str, np.ndarray] = {}

    def jitter(name: str, base) -> np.ndarray:
        offs = rng.uniform(-LAYOUT_JITTER, LAYOUT_JITTER, size=2)
        jitters[name] = offs
        return np.array([base[0] + offs[0], base[1] + offs[1], 0.0])

    tracks, gt, hand = _build_template(spec.template, jitter)
    duration = len(next(iter(tracks.values())))
    elements = [ElementId(hand, "hand")] + [
        ElementId(e, "object") for e in sorted(tracks) if e != hand]
    rec_tracks = {}
    for e in elements:
        pos = tracks[e.id].copy()
        if spec.noise_sigma > 0:
            pos = pos + rng.normal(0.0, spec.noise_sigma, size=pos.shape)
        quat = np.tile(IDENTITY_QUAT, (duration, 1))
        rec_tracks[e.id] = Track(pos, quat)
    recording = Recording(sample_rate=spec.sample_rate, elements=elements,
                          tracks=rec_tracks, duration=duration)
    return recording, gt


def initial_scene(recording: Recording, frame: int = 0) -> dict[str, Pose6D]:
    """World poses of all objects (and the hand as effector seed) at a frame."""
    return {e.id: recording.pose_at(e.id, frame) for e in recording.elements}


# --- kinematic execution -----------------------------------------------------


@dataclass
class WorldState:
    poses: dict[str, Pose6D]
    effector: Pose6D
    attached: dict[str, np.ndarray] = field(default_factory=dict)  # obj -> T_eff_obj

    def copy(self) -> "WorldState":
        return WorldState(dict(self.poses), self.effector, dict(self.attached))


@dataclass
class ExecutionTrace:
    steps: list[dict] = field(default_factory=list)
    # relative pose achieved at the moment of each placement move, in leaf order
    placements: list[tuple[str, str, np.ndarray]] = field(default_factory=list)

    def record(self, leaf: BTNode, status: str, world: WorldState) -> None:
        self.steps.append({
            "action": leaf.action_type,
            "target": leaf.target,
            "status": status,
            "effector": [float(v) for v in world.effector.position],
        })

    @property
    def status(self) -> str:
        return self.steps[-1]["status"] if self.steps else SUCCESS

    def to_dict(self) -> dict:
        return {"status": self.status, "steps": self.steps}


def _move_effector_to(world: WorldState, pose: Pose6D) -> None:
    T_new = pose.to_matrix()
    world.effector = pose
    for obj, t_eff_obj in world.attached.items():
        world.poses[obj] = Pose6D.from_matrix(T_new @ t_eff_obj)


def execute_bt(root: BTNode, initial: WorldState,
               object_config: ObjectConfig | None = None,
               grasp_tolerance: float = 0.02) -> tuple[WorldState, ExecutionTrace]:
    """Tick the plan against a mutable world: moves teleport the moving frame to
    its resolved target, grasp rigidly attaches the nearest object within
    tolerance, release detaches. Sequence semantics stop at the first FAILURE."""
    object_config = object_config or ObjectConfig()
    world = initial.copy()
    trace = ExecutionTrace()

    def run_leaf(leaf: BTNode) -> str:
        if leaf.action_type in (MOVE_TO, MOVE_AWAY):
            if leaf.action_type == MOVE_TO:
                if leaf.target not in world.poses:
                    return FAILURE
                desired = resolve_target(leaf, world.poses)
            else:
                desired = Pose6D.from_matrix(leaf.custom_pose)
            if leaf.moving == EFFECTOR:
                _move_effector_to(world, desired)
            else:
                if leaf.moving not in world.attached:
                    return FAILURE  # placement move for an object not in hand
                t_eff_obj = world.attached[leaf.moving]
                _move_effector_to(world, Pose6D.from_matrix(
                    desired.to_matrix() @ invert_transform(t_eff_obj)))
                if leaf.action_type == MOVE_TO:
                    trace.placements.append((leaf.moving, leaf.target, relative_transform(
                        world.poses[leaf.target], world.poses[leaf.moving])))
            return SUCCESS
        if leaf.action_type == GRASP:
            candidates = [o for o in world.poses if o not in world.attached]
            if not candidates:
                return FAILURE
            def gap(o):
                grasp_pose = world.poses[o].to_matrix() @ object_config.grasp_offset(o)
                return float(np.linalg.norm(grasp_pose[:3, 3] - world.effector.position))
            nearest = min(candidates, key=gap)
            if gap(nearest) > grasp_tolerance:
                return FAILURE
            world.attached[nearest] = invert_transform(world.effector.to_matrix()) \
                @ world.poses[nearest].to_matrix()
            return SUCCESS
        if leaf.action_type == RELEASE:
            world.attached.clear()
            return SUCCESS
        if leaf.action_type == MOVE_COMPLEX:
            return SUCCESS  # patterned-motion stub: succeeds as a no-op
        return FAILURE

    for seq in root.children:
        for leaf in seq.children:
            status = run_leaf(leaf)
            trace.record(leaf, status, world)
            if status != SUCCESS:
                return world, trace
    return world, trace


# --- verification ------------------------------------------------------------


@dataclass
class PlacementCheck:
    moving: str
    target: str
    position_error: float
    yaw_error: float
    ok: bool


@dataclass
class VerificationReport:
    checks: list[PlacementCheck]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [vars(c) for c in self.checks]}


def placement_references(root: BTNode) -> list[tuple[str, str, np.ndarray]]:
    """(moving object, target object, demonstrated relative transform) for every
    placement move embedded in the plan."""
    refs = []
    for leaf in root.leaves():
        if leaf.action_type == MOVE_TO and leaf.moving != EFFECTOR:
            refs.append((leaf.moving, leaf.target, leaf.transform))
    return refs


def verify_relative_poses(trace: ExecutionTrace, references,
                          pos_tolerance: float = 1e-6,
                          yaw_tolerance: float = 1e-6) -> VerificationReport:
    """Compare each demonstrated placement with the relative pose achieved at the
    moment the corresponding move executed (later moves may displace the object
    again, so the final world state is not the right reference)."""
    checks = []
    achieved_by_leaf = list(trace.placements)
    for i, (moving, target, T_ref) in enumerate(references):
        if i >= len(achieved_by_leaf):
            checks.append(PlacementCheck(moving, target, float("inf"), float("inf"), False))
            continue
        a_moving, a_target, achieved = achieved_by_leaf[i]
        if (a_moving, a_target) != (moving, target):
            checks.append(PlacementCheck(moving, target, float("inf"), float("inf"), False))
            continue
        pos_err = float(np.linalg.norm(achieved[:3, 3] - T_ref[:3, 3]))
        yaw_err = abs(wrap_angle(yaw_of_matrix(achieved) - yaw_of_matrix(T_ref)))
        checks.append(PlacementCheck(moving, target, pos_err, yaw_err,
                                     pos_err <= pos_tolerance and yaw_err <= yaw_tolerance))
    return VerificationReport(checks)


def yaw_of_matrix(T: np.ndarray) -> float:
    return float(np.arctan2(T[1, 0], T[0, 0]))


# --- comparison baseline -----------------------------------------------------


def velocity_manipulation_baseline(recording: Recording, hand: str, obj: str,
                                   move_threshold: float, rel_threshold: float,
                                   axes=(0, 1), smooth_w: int = 40) -> np.ndarray:
    """Finite-difference relative-velocity detector: both elements moving faster
    than `move_threshold` with relative speed below `rel_threshold`."""
    fs = recording.sample_rate
    axes = list(axes)
    ph = recording.positions(hand)[:, axes]
    po = recording.positions(obj)[:, axes]
    vh = np.gradient(ph, axis=0) * fs
    vo = np.gradient(po, axis=0) * fs
    speed_h = sliding_mean(np.linalg.norm(vh, axis=1), smooth_w)
    speed_o = sliding_mean(np.linalg.norm(vo, axis=1), smooth_w)
    rel = sliding_mean(np.linalg.norm(vh - vo, axis=1), smooth_w)
    with np.errstate(invalid="ignore"):
        return (speed_h > move_threshold) & (speed_o > move_threshold) & (rel < rel_threshold)


def interval_iou(detected: np.ndarray, interval: tuple[int, int]) -> float:
    """IoU between a boolean detection mask and a reference frame interval."""
    ref = np.zeros(len(detected), dtype=bool)
    ref[interval[0]:interval[1] + 1] = True
    union = np.sum(detected | ref)
    return float(np.sum(detected & ref) / union) if union else 0.0
