"""Per-frame interaction detection producing a scene-graph sequence.

For each analyzable frame, the detector searches hand-object interactions first
(nearest object first) and only then object-object interactions, yielding one of
four topologies: hand->obj, hand->unity, hand->obj->obj, hand->unity->obj.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import infotheory as it
from .geometry import Pose6D
from .signal_io import PipelineConfig, Recording, sliding_average_distance

HO = "HO"
OO = "OO"

MANIPULATION = "manipulation"
CONTACT_ONLY = "contact_only"
DYNAMIC = "dynamic"
STATIC_SIGNIFICANT = "static_significant"
STATIC_TEMPORARY = "static_temporary"

MI_POSITIVE = 1e-9  # strict-positivity floor for empirical MI


@dataclass
class Relation:
    category: str  # HO | OO
    ho_type: str | None = None
    oo_type: str | None = None
    mi_value: float = 0.0
    interaction_complexity: bool = False

    def __post_init__(self):
        if self.category == HO and (self.ho_type is None or self.oo_type is not None):
            raise ValueError("HO relation must carry ho_type only")
        if self.category == OO and (self.oo_type is None or self.ho_type is not None):
            raise ValueError("OO relation must carry oo_type only")
        if self.mi_value < 0:
            raise ValueError("mi_value must be >= 0")


@dataclass
class Node:
    identity: str
    kind: str  # hand | object | unity
    pose: Pose6D
    members: tuple[str, ...] = ()  # unity only, sorted element ids
    held: str | None = None  # unity only: the object the hand actually holds


@dataclass
class Edge:
    source: str
    target: str
    relation: Relation


@dataclass
class SceneGraph:
    frame: int
    nodes: list[Node]
    edges: list[Edge]

    def node(self, identity: str) -> Node:
        for n in self.nodes:
            if n.identity == identity:
                return n
        raise KeyError(identity)

    @property
    def ho_edge(self) -> Edge:
        return next(e for e in self.edges if e.relation.category == HO)

    @property
    def oo_edge(self) -> Edge | None:
        return next((e for e in self.edges if e.relation.category == OO), None)

    @property
    def manipulated(self) -> Node:
        return self.node(self.ho_edge.target)

    @property
    def held_object(self) -> str:
        node = self.manipulated
        return node.held if node.kind == "unity" else node.identity

    @property
    def topology(self) -> str:
        unity = self.manipulated.kind == "unity"
        oo = self.oo_edge is not None
        return {(False, False): "A", (True, False): "B", (False, True): "C", (True, True): "D"}[(unity, oo)]

    def identity_signature(self) -> tuple:
        """Topology plus node identities; interaction types excluded on purpose."""
        return (self.topology, tuple(sorted(n.identity for n in self.nodes)))


def unity_identity(members) -> str:
    return "unity:" + "+".join(sorted(members))


@dataclass
class DetectorState:
    """Frame-to-frame memory of the interaction detectors."""

    prev_graph: SceneGraph | None = None
    manipulation_seen: set[str] = field(default_factory=set)  # objects the hand has manipulated
    significant_pairs: set[frozenset] = field(default_factory=set)
    unity_members: tuple[str, ...] | None = None


class WindowedSignals:
    """Lazy cache of the windowed statistics the detectors consume."""

    def __init__(self, recording: Recording, config: PipelineConfig):
        self.recording = recording
        self.config = config.resolved_for(recording.sample_rate)
        self.grid = it.QuantizationGrid(self.config.quantization)
        self.w = self.config.window_samples
        self.half = self.w // 2
        self._dbar: dict[frozenset, np.ndarray] = {}
        self._mi: dict[frozenset, np.ndarray] = {}
        self._pos_entropy: dict[tuple[str, int], np.ndarray] = {}
        self._h_dbar: dict[frozenset, np.ndarray] = {}

    @property
    def analysis_start(self) -> int:
        return self.half

    @property
    def analysis_end(self) -> int:
        # last frame with both a full window and a defined displacement lookahead
        return self.recording.duration - 1 - self.half

    def frames(self) -> range:
        return range(self.analysis_start, self.analysis_end + 1)

    def dbar(self, a: str, b: str) -> np.ndarray:
        key = frozenset((a, b))
        if key not in self._dbar:
            self._dbar[key] = sliding_average_distance(
                self.recording, a, b, self.w, self.config.axis_indices)
        return self._dbar[key]

    def mi(self, a: str, b: str) -> np.ndarray:
        key = frozenset((a, b))
        if key not in self._mi:
            self._mi[key] = it.sliding_mi_nd(
                self.recording.positions(a), self.recording.positions(b),
                self.config.axis_indices, self.w, self.grid)
        return self._mi[key]

    def position_entropy(self, element: str, axis: int) -> np.ndarray:
        key = (element, axis)
        if key not in self._pos_entropy:
            self._pos_entropy[key] = it.sliding_entropy(
                self.recording.positions(element)[:, axis], self.w, self.grid)
        return self._pos_entropy[key]

    def entropy_of_dbar(self, a: str, b: str) -> np.ndarray:
        """Windowed entropy of the windowed-average-distance series (same w and grid)."""
        key = frozenset((a, b))
        if key not in self._h_dbar:
            self._h_dbar[key] = it.sliding_entropy(self.dbar(a, b), self.w, self.grid)
        return self._h_dbar[key]

    def stationary(self, element: str, k: int) -> bool:
        """All window samples within one bin per configured axis."""
        for ax in self.config.axis_indices:
            h = self.position_entropy(element, ax)[k]
            if not np.isfinite(h) or h != 0.0:
                return False
        return True

    def instantaneous_distance(self, a: str, b: str, k: int) -> float:
        axes = list(self.config.axis_indices)
        pa = self.recording.positions(a)[k][axes]
        pb = self.recording.positions(b)[k][axes]
        return float(np.linalg.norm(pa - pb))

    def present(self, element: str, k: int) -> bool:
        lo, hi = k - self.half, k + self.half
        pos = self.recording.positions(element)[max(lo, 0):hi]
        return lo >= 0 and hi <= self.recording.duration and bool(np.all(np.isfinite(pos)))


def displacement_angle(signals: WindowedSignals, a: str, b: str, t: int) -> float:
    """Angle in degrees between the displacement vectors of a and b over [t, t + w/2],
    restricted to the configured axes. Near-zero displacements yield 180 degrees."""
    axes = list(signals.config.axis_indices)
    rec = signals.recording
    t2 = min(t + signals.half, rec.duration - 1)
    da = rec.positions(a)[t2][axes] - rec.positions(a)[t][axes]
    db = rec.positions(b)[t2][axes] - rec.positions(b)[t][axes]
    if not (np.all(np.isfinite(da)) and np.all(np.isfinite(db))):
        raise ValueError(f"element absent when computing displacement at frame {t}")
    na, nb = np.linalg.norm(da), np.linalg.norm(db)
    if na < 1e-9 or nb < 1e-9:
        return 180.0
    cosang = np.clip(np.dot(da, db) / (na * nb), -1.0, 1.0)
    return float(np.degrees(np.arccos(cosang)))


def detect_ho(signals: WindowedSignals, k: int, state: DetectorState) -> tuple[str, Relation] | None:
    """Hand-object pass: nearest object first, first qualifying match wins."""
    cfg = signals.config
    hand = signals.recording.hand.id
    objs = [o.id for o in signals.recording.objects if signals.present(o.id, k)]
    objs.sort(key=lambda o: signals.instantaneous_distance(hand, o, k))

    # expire manipulation memory for pairs that moved apart
    for o in list(state.manipulation_seen):
        d = signals.dbar(hand, o)[k]
        if not np.isfinite(d) or d >= cfg.d_ho_threshold:
            state.manipulation_seen.discard(o)

    prev_contact = None
    if state.prev_graph is not None and state.prev_graph.ho_edge.relation.ho_type == CONTACT_ONLY:
        prev = state.prev_graph.manipulated
        prev_contact = set(prev.members) if prev.kind == "unity" else {prev.identity}

    for o in objs:
        d = signals.dbar(hand, o)[k]
        if not np.isfinite(d) or d >= cfg.d_ho_threshold:
            continue
        mi = signals.mi(hand, o)[k]
        if not np.isfinite(mi):
            continue
        if mi > cfg.mi_epsilon:
            state.manipulation_seen.add(o)
            return o, Relation(HO, ho_type=MANIPULATION, mi_value=float(mi))
        if o in state.manipulation_seen:
            held_before = prev_contact is not None and o in prev_contact
            decaying = (
                mi < cfg.mi_epsilon
                and it.trend_sign_or_default(signals.mi(hand, o), k, cfg.horizon) == "negative"
            )
            if held_before or decaying:
                return o, Relation(HO, ho_type=CONTACT_ONLY, mi_value=float(mi))
    return None


def detect_dynamic_oo(signals: WindowedSignals, o_m: str, k: int,
                      state: DetectorState) -> tuple[str, ...] | None:
    """Moving-unity formation: objects close to o_m, sharing information, and
    moving the same direction join the unity. Members retained from the previous
    frame stay while they remain within the object-object threshold."""
    cfg = signals.config
    others = [o.id for o in signals.recording.objects if o.id != o_m and signals.present(o.id, k)]
    others.sort(key=lambda o: signals.instantaneous_distance(o_m, o, k))

    retained = []
    if state.unity_members:
        for o in state.unity_members:
            if o == o_m or o not in others:
                continue
            d = signals.dbar(o_m, o)[k]
            if np.isfinite(d) and d < cfg.d_oo_threshold:
                retained.append(o)

    members = list(retained)
    for o in others:
        if o in members:
            continue
        d = signals.dbar(o_m, o)[k]
        if not np.isfinite(d) or d >= cfg.d_oo_threshold:
            continue
        mi = signals.mi(o_m, o)[k]
        if not np.isfinite(mi) or mi <= MI_POSITIVE:
            continue
        if displacement_angle(signals, o_m, o, k) > cfg.angle_threshold:
            continue
        if members:
            # joint membership must share information as a set
            lo, hi = k - signals.half, k + signals.half
            coinfo = 0.0
            for ax in cfg.axis_indices:
                sigs = [signals.recording.positions(e)[lo:hi, ax] for e in [o_m, *members, o]]
                coinfo += it.co_information(sigs, signals.grid)
            if coinfo <= 0.0:
                continue
        members.append(o)
    if not members:
        return None
    return tuple(sorted([o_m, *members]))


def detect_static_oo(signals: WindowedSignals, o_m: str, unity: tuple[str, ...] | None,
                     k: int, state: DetectorState, ho_type: str) -> tuple[str, Relation] | None:
    """Static object-object pass: nearest stationary object first; the first object
    within threshold terminates the search whatever its classification."""
    cfg = signals.config
    exclude = set(unity or ()) | {o_m}
    others = [o.id for o in signals.recording.objects if o.id not in exclude and signals.present(o.id, k)]
    others.sort(key=lambda o: signals.instantaneous_distance(o_m, o, k))

    # significance memory expires once the pair moves apart
    for pair in list(state.significant_pairs):
        a, b = tuple(pair)
        d = signals.dbar(a, b)[k]
        if not np.isfinite(d) or d >= cfg.d_oo_threshold:
            state.significant_pairs.discard(pair)

    for o in others:
        if not signals.stationary(o, k):
            continue
        d = signals.dbar(o_m, o)[k]
        if not np.isfinite(d) or d >= cfg.d_oo_threshold:
            continue
        pair = frozenset((o_m, o))
        if ho_type == CONTACT_ONLY or pair in state.significant_pairs:
            oo_type = STATIC_SIGNIFICANT
        else:
            h_dbar = signals.entropy_of_dbar(o_m, o)
            trend = it.trend_sign_or_default(h_dbar, k, cfg.horizon)
            oo_type = STATIC_SIGNIFICANT if trend == "negative" else STATIC_TEMPORARY
        if oo_type == STATIC_SIGNIFICANT:
            state.significant_pairs.add(pair)
        return o, Relation(OO, oo_type=oo_type)
    return None


def build_scene_graph(signals: WindowedSignals, k: int, state: DetectorState) -> SceneGraph | None:
    """Run the HO pass, then the dynamic- and static-OO passes, for one frame.

    Mutates `state`; returns None when no hand-object interaction exists."""
    rec = signals.recording
    hand = rec.hand.id
    ho = detect_ho(signals, k, state)
    if ho is None:
        state.prev_graph = None
        state.unity_members = None
        state.significant_pairs.clear()
        return None
    o_m, ho_rel = ho

    unity = None
    if ho_rel.ho_type == MANIPULATION:
        unity = detect_dynamic_oo(signals, o_m, k, state)
    elif state.unity_members and o_m in state.unity_members:
        # contact-only extends to the whole unity while the hand stays
        unity = state.unity_members
    state.unity_members = unity

    nodes = [Node(hand, "hand", rec.pose_at(hand, k))]
    if unity:
        anchor = min(unity, key=lambda o: signals.instantaneous_distance(hand, o, k))
        target_node = Node(unity_identity(unity), "unity", rec.pose_at(anchor, k),
                           members=unity, held=o_m)
    else:
        target_node = Node(o_m, "object", rec.pose_at(o_m, k))
    nodes.append(target_node)
    edges = [Edge(hand, target_node.identity, ho_rel)]

    static = detect_static_oo(signals, o_m, unity, k, state, ho_rel.ho_type)
    if static is not None:
        o_j, oo_rel = static
        nodes.append(Node(o_j, "object", rec.pose_at(o_j, k)))
        edges.append(Edge(target_node.identity, o_j, oo_rel))

    graph = SceneGraph(frame=k, nodes=nodes, edges=edges)
    state.prev_graph = graph
    return graph


def generate_graphs(recording: Recording, config: PipelineConfig) -> tuple[WindowedSignals, list[SceneGraph | None]]:
    """Sequential detection over every analyzable frame."""
    signals = WindowedSignals(recording, config)
    if recording.duration < signals.w + 1:
        raise ValueError(f"recording of {recording.duration} frames is shorter than the window")
    state = DetectorState()
    graphs = [build_scene_graph(signals, k, state) for k in signals.frames()]
    return signals, graphs
