"""Graph differencing between adjacent representative graphs and the mapping of
started/expired interactions to move / grasp / release motion primitives."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import relative_transform
from .scene_graph import SceneGraph
from .segmentation import Activity, InteractionUnit

HO_STARTED = "ho_started"
HO_ENDED = "ho_ended"
OO_STARTED = "oo_started"
OO_ENDED = "oo_ended"

MOVE_TO = "move_to"
MOVE_COMPLEX = "move_complex"
MOVE_AWAY = "move_away"
GRASP = "grasp"
RELEASE = "release"

EFFECTOR = "effector"


@dataclass
class GraphDiff:
    case: str
    graph: SceneGraph  # the representative graph carrying the changed edge
    target: str  # object or unity identity on the changed edge


@dataclass
class Primitive:
    kind: str  # move_to | move_complex | move_away | grasp | release
    target: str
    moving: str | None = None  # move_to only: "effector" or the carried object id
    transform: np.ndarray | None = None  # move_to: pose of moving frame w.r.t. target
    custom_pose: np.ndarray | None = None  # move_away only: 4x4 world target
    complex: bool = False
    iu_bounds: tuple[int, int] | None = None  # move_complex only

    @property
    def family(self) -> str:
        """Collapse the move variants to the three-letter primitive alphabet."""
        return {MOVE_TO: "move", MOVE_COMPLEX: "move", MOVE_AWAY: "move",
                GRASP: "grasp", RELEASE: "release"}[self.kind]


@dataclass
class ObjectConfig:
    """Per-object grasp-point offsets and optional move-away poses.

    `grasp_offsets` maps object id to a 4x4 transform of the effector frame
    w.r.t. the object frame; `move_away_poses` maps object id to a 4x4 world
    pose enabling the optional move on an expired OO."""

    grasp_offsets: dict[str, np.ndarray] = field(default_factory=dict)
    move_away_poses: dict[str, np.ndarray] = field(default_factory=dict)

    def grasp_offset(self, object_id: str) -> np.ndarray:
        return self.grasp_offsets.get(object_id, np.eye(4))


def _edge_key(graph: SceneGraph | None, category: str):
    if graph is None:
        return None
    if category == "HO":
        e = graph.ho_edge
    else:
        e = graph.oo_edge
        if e is None:
            return None
    return (e.source, e.target)


def graph_diff(eff: SceneGraph | None, prec: SceneGraph | None) -> list[GraphDiff]:
    """Started/expired interaction subgraphs between two representative graphs,
    HO changes ordered before OO changes."""
    diffs: list[GraphDiff] = []
    ho_eff, ho_prec = _edge_key(eff, "HO"), _edge_key(prec, "HO")
    if ho_prec is not None and ho_prec != ho_eff:
        diffs.append(GraphDiff(HO_ENDED, prec, ho_prec[1]))
    if ho_eff is not None and ho_eff != ho_prec:
        diffs.append(GraphDiff(HO_STARTED, eff, ho_eff[1]))
    oo_eff, oo_prec = _edge_key(eff, "OO"), _edge_key(prec, "OO")
    if oo_prec is not None and oo_prec != oo_eff:
        diffs.append(GraphDiff(OO_ENDED, prec, oo_prec[1]))
    if oo_eff is not None and oo_eff != oo_prec:
        diffs.append(GraphDiff(OO_STARTED, eff, oo_eff[1]))
    return diffs


def activity_diffs(activity: Activity) -> list[tuple[InteractionUnit | None, list[GraphDiff]]]:
    """Diff stream over the activity's representative graphs, including the final
    hand-object expiry at the activity boundary."""
    out = []
    prec: SceneGraph | None = None
    for iu in activity.ius:
        out.append((iu, graph_diff(iu.repr_graph, prec)))
        prec = iu.repr_graph
    out.append((None, graph_diff(None, prec)))
    return out


def map_primitives(activity: Activity, object_config: ObjectConfig | None = None) -> list[Primitive]:
    """Apply the four-case mapping: HO start -> move + grasp, OO start -> move
    (plus a complex-motion stub when flagged), OO end -> optional configured
    move-away, HO end -> release."""
    object_config = object_config or ObjectConfig()
    prims: list[Primitive] = []
    grasped: str | None = None
    for iu, diffs in activity_diffs(activity):
        for diff in diffs:
            g = diff.graph
            if diff.case == HO_STARTED:
                held = g.held_object
                hand = g.ho_edge.source
                t_om_h = relative_transform(g.node(diff.target).pose, g.node(hand).pose)
                prims.append(Primitive(MOVE_TO, target=held, moving=EFFECTOR,
                                       transform=t_om_h @ object_config.grasp_offset(held)))
                prims.append(Primitive(GRASP, target=held))
                grasped = held
            elif diff.case == HO_ENDED:
                if grasped is None:
                    raise ValueError("release without a prior grasp in the diff stream")
                prims.append(Primitive(RELEASE, target=grasped))
                grasped = None
            elif diff.case == OO_STARTED:
                oo = g.oo_edge
                o_m = g.held_object
                t_oj_om = relative_transform(g.node(diff.target).pose, g.manipulated.pose)
                prims.append(Primitive(MOVE_TO, target=diff.target, moving=o_m,
                                       transform=t_oj_om))
                if oo.relation.interaction_complexity:
                    prims.append(Primitive(MOVE_COMPLEX, target=o_m, complex=True,
                                           iu_bounds=iu.bounds if iu else None))
            elif diff.case == OO_ENDED:
                o_m = g.held_object
                pose = object_config.move_away_poses.get(o_m)
                if pose is not None:
                    prims.append(Primitive(MOVE_AWAY, target=o_m, moving=o_m,
                                           custom_pose=np.asarray(pose, dtype=float)))
    return prims
