"""Delimited metric dumps, scene-graph records, and matplotlib report figures."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .scene_graph import SceneGraph, WindowedSignals
from .segmentation import Activity, IDLE, InteractionUnit

_IU_COLORS = {IDLE: "0.85", "HO": "tab:orange", "HOO": "tab:red"}


def write_metrics_csv(signals: WindowedSignals, path: str | Path) -> None:
    """Per-frame hand-object MI and windowed distance for every object."""
    rec = signals.recording
    hand = rec.hand.id
    objs = [o.id for o in rec.objects]
    header = ["frame"] + [f"mi_{o}" for o in objs] + [f"dbar_{o}" for o in objs]
    mi = {o: signals.mi(hand, o) for o in objs}
    dbar = {o: signals.dbar(hand, o) for o in objs}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in signals.frames():
            writer.writerow([k] + [f"{mi[o][k]:.6f}" for o in objs]
                            + [f"{dbar[o][k]:.6f}" for o in objs])


def write_segmentation_csv(ius: list[InteractionUnit], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "start", "end", "kind", "target"])
        for iu in ius:
            writer.writerow([iu.index, iu.start, iu.end, iu.kind,
                             iu.target_identity() or ""])


def graph_record(frame: int, graph: SceneGraph | None) -> dict:
    """JSON-friendly record of one analyzed frame."""
    if graph is None:
        return {"frame": frame, "graph": None}
    return {
        "frame": frame,
        "graph": {
            "topology": graph.topology,
            "nodes": [
                {"id": n.identity, "kind": n.kind,
                 "position": [float(v) for v in n.pose.position],
                 **({"members": list(n.members), "held": n.held} if n.kind == "unity" else {})}
                for n in graph.nodes],
            "edges": [
                {"source": e.source, "target": e.target,
                 "category": e.relation.category,
                 "type": e.relation.ho_type or e.relation.oo_type,
                 "mi": float(e.relation.mi_value),
                 "complex": bool(e.relation.interaction_complexity)}
                for e in graph.edges],
        },
    }


def segmentation_record(ius: list[InteractionUnit], activities: list[Activity]) -> dict:
    def iu_rec(iu: InteractionUnit) -> dict:
        rec = {"index": iu.index, "start": iu.start, "end": iu.end, "kind": iu.kind}
        if iu.kind != IDLE:
            rec["target"] = iu.target_identity()
            if iu.repr_graph is not None:
                rec["representative_frame"] = iu.repr_graph.frame
        return rec

    return {
        "interaction_units": [iu_rec(iu) for iu in ius],
        "activities": [
            {"index": a.index, "start": a.start, "end": a.end, "target": a.target,
             "interaction_units": [iu.index for iu in a.ius]}
            for a in activities],
    }


def render_signal_figure(signals: WindowedSignals, path: str | Path) -> None:
    """Hand-object MI and windowed distance over the analyzed frames."""
    rec = signals.recording
    hand = rec.hand.id
    objs = [o.id for o in rec.objects]
    frames = np.array(signals.frames())
    fig, (ax_mi, ax_d) = plt.subplots(2, 1, sharex=True, figsize=(10, 6))
    for o in objs:
        ax_mi.plot(frames, signals.mi(hand, o)[frames], label=o)
        ax_d.plot(frames, signals.dbar(hand, o)[frames], label=o)
    ax_mi.axhline(signals.config.mi_epsilon, color="k", ls="--", lw=0.8)
    ax_mi.set_ylabel("MI(hand, object) [bits]")
    ax_mi.legend(loc="upper right", fontsize="small")
    ax_d.axhline(signals.config.d_ho_threshold, color="k", ls="--", lw=0.8)
    ax_d.set_ylabel("windowed distance [m]")
    ax_d.set_xlabel("frame")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_timeline_figure(ius: list[InteractionUnit], activities: list[Activity],
                           path: str | Path) -> None:
    """Segmentation timeline: one band of IUs, one band of activities."""
    fig, ax = plt.subplots(figsize=(10, 2.4))
    for iu in ius:
        ax.barh(1, iu.end - iu.start + 1, left=iu.start, height=0.8,
                color=_IU_COLORS.get(iu.kind, "tab:blue"), edgecolor="white")
        if iu.kind != IDLE:
            ax.text((iu.start + iu.end) / 2, 1, iu.kind, ha="center", va="center",
                    fontsize=7)
    for a in activities:
        ax.barh(0, a.end - a.start + 1, left=a.start, height=0.8,
                color="tab:green", edgecolor="white")
        ax.text((a.start + a.end) / 2, 0, a.target, ha="center", va="center",
                fontsize=7)
    ax.set_yticks([0, 1], ["activities", "IUs"])
    ax.set_xlabel("frame")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
