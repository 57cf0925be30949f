"""Shared factories for hand-built scene graphs used by the unit tests."""

import numpy as np

from demo2bt.geometry import Pose6D
from demo2bt.scene_graph import (HO, MANIPULATION, OO, Edge, Node, Relation,
                                 SceneGraph, unity_identity)


def pose(x=0.0, y=0.0, z=0.0):
    return Pose6D(np.array([x, y, z]))


def make_graph(frame, target="cup", ho_type=MANIPULATION, mi=1.0,
               oo_target=None, oo_type=None, unity_members=None, held=None,
               positions=None):
    """Minimal valid scene graph; positions maps identity -> (x, y, z)."""
    positions = positions or {}

    def pose_of(name):
        return pose(*positions.get(name, (0.0, 0.0, 0.0)))

    nodes = [Node("hand", "hand", pose_of("hand"))]
    if unity_members is not None:
        identity = unity_identity(unity_members)
        nodes.append(Node(identity, "unity", pose_of(identity),
                          members=tuple(sorted(unity_members)),
                          held=held or sorted(unity_members)[0]))
        target = identity
    else:
        nodes.append(Node(target, "object", pose_of(target)))
    edges = [Edge("hand", target, Relation(HO, ho_type=ho_type, mi_value=mi))]
    if oo_target is not None:
        nodes.append(Node(oo_target, "object", pose_of(oo_target)))
        edges.append(Edge(target, oo_target, Relation(OO, oo_type=oo_type)))
    return SceneGraph(frame=frame, nodes=nodes, edges=edges)
