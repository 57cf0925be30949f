"""Behavior-tree plan assembly, tick semantics, target resolution against a live
scene, and a lossless plan-document serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import Pose6D, check_transform
from .primitives import (EFFECTOR, GRASP, MOVE_AWAY, MOVE_COMPLEX, MOVE_TO,
                         RELEASE, Primitive)
from .segmentation import Activity

SUCCESS = "SUCCESS"
FAILURE = "FAILURE"
RUNNING = "RUNNING"

PLAN_FORMAT = "demo2bt-plan"
PLAN_VERSION = 1

ACTION_TYPES = (MOVE_TO, MOVE_COMPLEX, MOVE_AWAY, GRASP, RELEASE)


class PlanSchemaError(ValueError):
    """Plan document violates the tree structure or payload schema."""


@dataclass
class BTNode:
    kind: str  # root | sequence | action
    name: str = ""
    action_type: str | None = None
    target: str | None = None
    moving: str | None = None
    transform: np.ndarray | None = None
    custom_pose: np.ndarray | None = None
    iu_bounds: tuple[int, int] | None = None
    children: list["BTNode"] = field(default_factory=list)

    def validate(self) -> None:
        if self.kind == "root":
            if any(c.kind != "sequence" for c in self.children):
                raise PlanSchemaError("root may contain only sequence nodes")
            for c in self.children:
                c.validate()
        elif self.kind == "sequence":
            if not self.children or any(c.kind != "action" for c in self.children):
                raise PlanSchemaError("sequence may contain only action nodes")
            for c in self.children:
                c.validate()
        elif self.kind == "action":
            if self.action_type not in ACTION_TYPES:
                raise PlanSchemaError(f"unknown action type {self.action_type!r}")
            if self.children:
                raise PlanSchemaError("action nodes are leaves")
            if self.action_type == MOVE_TO and self.transform is None:
                raise PlanSchemaError("move_to requires an embedded transform")
        else:
            raise PlanSchemaError(f"unknown node kind {self.kind!r}")

    def leaves(self) -> list["BTNode"]:
        if self.kind == "action":
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def structurally_equal(self, other: "BTNode") -> bool:
        if (self.kind, self.name, self.action_type, self.target, self.moving,
                self.iu_bounds) != (other.kind, other.name, other.action_type,
                                    other.target, other.moving, other.iu_bounds):
            return False
        for a, b in ((self.transform, other.transform), (self.custom_pose, other.custom_pose)):
            if (a is None) != (b is None):
                return False
            if a is not None and not np.array_equal(a, b):
                return False
        if len(self.children) != len(other.children):
            return False
        return all(a.structurally_equal(b) for a, b in zip(self.children, other.children))


def _leaf_from_primitive(p: Primitive, index: int) -> BTNode:
    return BTNode(
        kind="action",
        name=f"P{index}",
        action_type=p.kind,
        target=p.target,
        moving=p.moving,
        transform=None if p.transform is None else np.asarray(p.transform, dtype=float),
        custom_pose=None if p.custom_pose is None else np.asarray(p.custom_pose, dtype=float),
        iu_bounds=p.iu_bounds,
    )


def build_bt(activities: list[Activity], primitive_lists: list[list[Primitive]]) -> BTNode:
    """Root with one sequence subtree per activity, leaves in primitive order."""
    if not activities:
        raise ValueError("empty activity list")
    if len(activities) != len(primitive_lists):
        raise ValueError("one primitive list per activity is required")
    root = BTNode(kind="root", name="task")
    for activity, prims in zip(activities, primitive_lists):
        seq = BTNode(kind="sequence", name=f"activity_{activity.index + 1}")
        for i, p in enumerate(prims, start=1):
            seq.children.append(_leaf_from_primitive(p, i))
        root.children.append(seq)
    root.validate()
    return root


def resolve_target(action: BTNode, scene: dict[str, Pose6D]) -> Pose6D:
    """World pose of the moving frame: T_world_target composed with the embedded
    relative transform. Raises KeyError when the target is absent."""
    if action.action_type != MOVE_TO:
        raise ValueError("resolve_target applies to move_to actions")
    if action.target not in scene:
        raise KeyError(action.target)
    T = scene[action.target].to_matrix() @ action.transform
    return Pose6D.from_matrix(T)


def tick(root: BTNode, scene: dict[str, Pose6D], executor) -> str:
    """Pure status propagation: sequences succeed iff all children succeed in order.

    `executor(leaf, scene) -> status` performs the action side effects."""
    for seq in root.children:
        for leaf in seq.children:
            status = executor(leaf, scene)
            if status != SUCCESS:
                return status
    return SUCCESS


def _matrix_to_doc(T: np.ndarray | None):
    return None if T is None else [float(v) for v in np.asarray(T).reshape(16)]


def _matrix_from_doc(values, what: str) -> np.ndarray | None:
    if values is None:
        return None
    if len(values) != 16:
        raise PlanSchemaError(f"{what} must have 16 values")
    T = np.asarray(values, dtype=float).reshape(4, 4)
    try:
        check_transform(T, tol=1e-6)
    except ValueError as exc:
        raise PlanSchemaError(f"invalid {what}: {exc}") from exc
    return T


def _node_to_doc(node: BTNode) -> dict:
    doc: dict = {"kind": node.kind}
    if node.name:
        doc["name"] = node.name
    if node.kind == "action":
        doc["action"] = node.action_type
        doc["target"] = node.target
        if node.moving is not None:
            doc["moving"] = node.moving
        if node.transform is not None:
            doc["transform"] = _matrix_to_doc(node.transform)
        if node.custom_pose is not None:
            doc["custom_pose"] = _matrix_to_doc(node.custom_pose)
        if node.iu_bounds is not None:
            doc["iu_bounds"] = list(node.iu_bounds)
    else:
        doc["children"] = [_node_to_doc(c) for c in node.children]
    return doc


def _node_from_doc(doc: dict) -> BTNode:
    kind = doc.get("kind")
    node = BTNode(kind=kind, name=doc.get("name", ""))
    if kind == "action":
        node.action_type = doc.get("action")
        node.target = doc.get("target")
        node.moving = doc.get("moving")
        node.transform = _matrix_from_doc(doc.get("transform"), "transform")
        node.custom_pose = _matrix_from_doc(doc.get("custom_pose"), "custom_pose")
        bounds = doc.get("iu_bounds")
        node.iu_bounds = tuple(bounds) if bounds is not None else None
    else:
        node.children = [_node_from_doc(c) for c in doc.get("children", [])]
    return node


def serialize_plan(root: BTNode) -> str:
    root.validate()
    doc = {"format": PLAN_FORMAT, "version": PLAN_VERSION, "root": _node_to_doc(root)}
    return json.dumps(doc, indent=2)


def deserialize_plan(document: str) -> BTNode:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise PlanSchemaError(f"plan document is not valid JSON: {exc}") from exc
    if doc.get("format") != PLAN_FORMAT:
        raise PlanSchemaError(f"unexpected document format {doc.get('format')!r}")
    if doc.get("version") != PLAN_VERSION:
        raise PlanSchemaError(f"unsupported plan version {doc.get('version')!r}")
    root = _node_from_doc(doc["root"])
    root.validate()
    return root


def save_plan(root: BTNode, path: str | Path) -> None:
    Path(path).write_text(serialize_plan(root))


def load_plan(path: str | Path) -> BTNode:
    return deserialize_plan(Path(path).read_text())


def plan_to_dot(root: BTNode) -> str:
    """Graphviz description of the tree for visual inspection."""
    lines = ["digraph plan {", "  node [shape=box];", '  root [label="root"];']
    for i, seq in enumerate(root.children):
        sid = f"seq{i}"
        lines.append(f'  {sid} [label="{seq.name or sid}"];')
        lines.append(f"  root -> {sid};")
        for j, leaf in enumerate(seq.children):
            lid = f"{sid}_a{j}"
            label = f"{leaf.action_type} {leaf.target}"
            style = ', style=dashed' if leaf.action_type == MOVE_COMPLEX else ""
            lines.append(f'  {lid} [label="{label}"{style}];')
            lines.append(f"  {sid} -> {lid};")
    lines.append("}")
    return "\n".join(lines)
