"""Grouping of the scene-graph sequence into Interaction Units and Activities.

An IU is a maximal run of frames sharing graph topology and node identities;
interaction-type changes do not split it. Temporary-only IUs are merged away,
each surviving IU gets a representative graph (the member minimizing hand-object
MI), and consecutive IUs sharing one hand-side target form an Activity.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .scene_graph import HO, OO, STATIC_SIGNIFICANT, SceneGraph

IDLE = "idle"
KIND_HO = "HO"
KIND_HOO = "HOO"

# empirical MI jitters by a few hundredths of a bit even during plain
# placements; only a substantially larger recovery marks patterned motion
COMPLEXITY_TOLERANCE_BITS = 0.1


@dataclass
class InteractionUnit:
    index: int
    start: int  # first frame, inclusive
    end: int  # last frame, inclusive
    kind: str  # idle | HO | HOO
    graphs: list[SceneGraph] = field(default_factory=list)
    repr_graph: SceneGraph | None = None

    @property
    def bounds(self) -> tuple[int, int]:
        return self.start, self.end

    def target_identity(self) -> str | None:
        """Identity of the hand-interaction target (object id or unity signature)."""
        if self.kind == IDLE:
            return None
        g = self.repr_graph if self.repr_graph is not None else self.graphs[0]
        return g.ho_edge.target


@dataclass
class Activity:
    index: int
    start: int
    end: int
    ius: list[InteractionUnit]

    @property
    def bounds(self) -> tuple[int, int]:
        return self.start, self.end

    @property
    def target(self) -> str:
        return self.ius[0].target_identity()


def _kind_of(graph: SceneGraph | None) -> str:
    if graph is None:
        return IDLE
    return KIND_HOO if graph.oo_edge is not None else KIND_HO


def _similar(a: SceneGraph | None, b: SceneGraph | None) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return a.identity_signature() == b.identity_signature()


def segment_ius(graphs: list[SceneGraph | None], start_frame: int) -> list[InteractionUnit]:
    """Split the per-frame graph sequence whenever topology or node identities change."""
    ius: list[InteractionUnit] = []
    for offset, g in enumerate(graphs):
        frame = start_frame + offset
        prev = graphs[offset - 1] if offset > 0 else None
        if ius and (offset > 0 and _similar(g, prev)):
            iu = ius[-1]
            iu.end = frame
            if g is not None:
                iu.graphs.append(g)
            if _kind_of(g) == KIND_HOO:
                iu.kind = KIND_HOO
        else:
            ius.append(InteractionUnit(
                index=len(ius), start=frame, end=frame, kind=_kind_of(g),
                graphs=[] if g is None else [g]))
    return ius


def _strip_oo(iu: InteractionUnit) -> None:
    graphs = []
    for g in iu.graphs:
        g = copy.deepcopy(g)
        oo = g.oo_edge
        if oo is not None:
            g.edges.remove(oo)
            g.nodes = [n for n in g.nodes if n.identity != oo.target]
        graphs.append(g)
    iu.graphs = graphs
    iu.kind = KIND_HO


def _is_temporary(iu: InteractionUnit) -> bool:
    if iu.kind != KIND_HOO:
        return False
    return not any(
        e.relation.category == OO and e.relation.oo_type == STATIC_SIGNIFICANT
        for g in iu.graphs for e in g.edges)


def filter_temporary(ius: list[InteractionUnit]) -> list[InteractionUnit]:
    """Merge IUs whose OO never became significant into the adjacent same-HO IU.

    A temporary IU with no same-target neighbor is downgraded to an HO IU in
    place rather than deleted, preserving hand-object continuity."""
    out = [copy.deepcopy(iu) for iu in ius]
    changed = True
    while changed:
        changed = False
        for i, iu in enumerate(out):
            if not _is_temporary(iu):
                continue
            target_held = iu.graphs[0].held_object
            neighbor = None
            for j in (i - 1, i + 1):
                if 0 <= j < len(out) and out[j].kind == KIND_HO \
                        and out[j].graphs and out[j].graphs[0].held_object == target_held:
                    neighbor = j
                    break
            _strip_oo(iu)
            if neighbor is not None:
                lo, hi = sorted((i, neighbor))
                merged = out[lo]
                other = out[hi]
                merged.end = other.end
                merged.graphs = merged.graphs + other.graphs
                del out[hi]
            changed = True
            break
    # collapse adjacent IUs made similar by stripping
    collapsed: list[InteractionUnit] = []
    for iu in out:
        if collapsed and iu.kind != IDLE and collapsed[-1].kind != IDLE \
                and _similar(collapsed[-1].graphs[-1], iu.graphs[0]):
            collapsed[-1].end = iu.end
            collapsed[-1].graphs += iu.graphs
        else:
            collapsed.append(iu)
    for i, iu in enumerate(collapsed):
        iu.index = i
    return collapsed


def representative_graph(iu: InteractionUnit) -> SceneGraph:
    """Member graph minimizing the hand-object MI; ties resolve to the earliest frame."""
    if iu.kind == IDLE:
        raise ValueError("idle IU has no representative graph")
    return min(iu.graphs, key=lambda g: (g.ho_edge.relation.mi_value, g.frame))


def interaction_complexity(iu: InteractionUnit) -> bool:
    """True when the hand-object MI over the IU is not monotone decreasing,
    indicating a patterned motion rather than a plain placement."""
    mi = [g.ho_edge.relation.mi_value for g in iu.graphs]
    if len(mi) < 2:
        return False
    running_min = mi[0]
    for v in mi[1:]:
        if v - running_min > COMPLEXITY_TOLERANCE_BITS:
            return True
        running_min = min(running_min, v)
    return False


def annotate_representatives(ius: list[InteractionUnit]) -> None:
    for iu in ius:
        if iu.kind == IDLE:
            continue
        iu.repr_graph = copy.deepcopy(representative_graph(iu))
        if iu.kind == KIND_HOO:
            # patterned-motion analysis only applies to significant interactions
            complex_motion = not _is_temporary(iu) and interaction_complexity(iu)
            oo = iu.repr_graph.oo_edge
            if oo is not None:
                oo.relation.interaction_complexity = complex_motion


def group_activities(ius: list[InteractionUnit]) -> list[Activity]:
    """Consecutive non-idle IUs sharing one hand-side target form an Activity;
    idle IUs close the current one and belong to none."""
    activities: list[Activity] = []
    current: list[InteractionUnit] = []

    def flush():
        nonlocal current
        if current:
            activities.append(Activity(
                index=len(activities), start=current[0].start, end=current[-1].end,
                ius=current))
            current = []

    for iu in ius:
        if iu.kind == IDLE:
            flush()
            continue
        if current and iu.target_identity() != current[-1].target_identity():
            flush()
        current.append(iu)
    flush()
    return activities


def segment(graphs: list[SceneGraph | None], start_frame: int,
            filter_temporary_ius: bool = True) -> tuple[list[InteractionUnit], list[Activity]]:
    """Full segmentation pass: IUs, temporary filtering, representatives, activities."""
    ius = segment_ius(graphs, start_frame)
    if filter_temporary_ius:
        ius = filter_temporary(ius)
    annotate_representatives(ius)
    return ius, group_activities(ius)
