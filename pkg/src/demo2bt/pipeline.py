"""End-to-end orchestration: recording -> scene graphs -> segmentation ->
primitives -> behavior-tree plan."""

from __future__ import annotations

from dataclasses import dataclass

from .bt_gen import BTNode, build_bt
from .primitives import ObjectConfig, Primitive, map_primitives
from .scene_graph import SceneGraph, WindowedSignals, generate_graphs
from .segmentation import Activity, InteractionUnit, segment
from .signal_io import PipelineConfig, Recording


@dataclass
class PipelineResult:
    recording: Recording
    config: PipelineConfig
    signals: WindowedSignals
    graphs: list[SceneGraph | None]
    ius: list[InteractionUnit]
    activities: list[Activity]
    primitive_lists: list[list[Primitive]]
    plan: BTNode


def compile_demonstration(recording: Recording,
                          config: PipelineConfig | None = None,
                          object_config: ObjectConfig | None = None,
                          filter_temporary: bool = True) -> PipelineResult:
    """Compile one demonstration into an executable plan. Raises ValueError when
    the recording contains no detectable hand-object interaction."""
    config = config or PipelineConfig()
    signals, graphs = generate_graphs(recording, config)
    ius, activities = segment(graphs, signals.analysis_start,
                              filter_temporary_ius=filter_temporary)
    if not activities:
        raise ValueError("no hand-object interaction detected in the recording")
    primitive_lists = [map_primitives(a, object_config) for a in activities]
    plan = build_bt(activities, primitive_lists)
    return PipelineResult(recording, signals.config, signals, graphs, ius,
                          activities, primitive_lists, plan)
