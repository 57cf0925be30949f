"""Command-line interface: synthesize demonstrations, analyze recordings, and
compile, inspect, and replay behavior-tree plans."""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import click

from . import __version__
from .bt_gen import load_plan, plan_to_dot, save_plan, serialize_plan
from .pipeline import compile_demonstration
from .replay_sim import (ScenarioSpec, TEMPLATES, WorldState, execute_bt,
                         generate_scenario, initial_scene, placement_references,
                         verify_relative_poses)
from .report import (graph_record, render_signal_figure, render_timeline_figure,
                     segmentation_record, write_metrics_csv, write_segmentation_csv)
from .signal_io import PipelineConfig, load_recording, save_recording

CONFIG_ENVVAR = "DEMO2BT_CONFIG"


def _load_config(path: str | None) -> PipelineConfig:
    return PipelineConfig.from_file(path) if path else PipelineConfig()


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True, dir_okay=False),
    envvar=CONFIG_ENVVAR, default=None,
    help=f"Pipeline-configuration JSON (or set ${CONFIG_ENVVAR}).")
rate_option = click.option("--sample-rate", type=float, default=30.0, show_default=True)
filter_option = click.option(
    "--no-filter-temporary", "filter_temporary", is_flag=True, flag_value=False,
    default=True,
    help="Keep interaction units whose object-object relation never became significant.")


@click.group()
@click.version_option(__version__)
def main():
    """Compile manual-task demonstrations into behavior-tree plans."""


@main.command()
@click.argument("template", type=click.Choice(TEMPLATES))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sigma", type=float, default=0.0, show_default=True,
              help="Gaussian position-noise standard deviation in meters.")
@rate_option
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True,
              help="Output recording (.jsonl or .csv).")
@click.option("--ground-truth", "gt_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the by-construction reference as JSON.")
def synth(template, seed, sigma, sample_rate, out_path, gt_path):
    """Generate a synthetic demonstration recording."""
    recording, gt = generate_scenario(ScenarioSpec(
        template=template, seed=seed, noise_sigma=sigma, sample_rate=sample_rate))
    out_path = Path(out_path)
    fmt = "csv" if out_path.suffix.lower() == ".csv" else "jsonl"
    save_recording(recording, out_path, format=fmt)
    if gt_path:
        Path(gt_path).write_text(json.dumps(gt.to_dict(), indent=2))
    click.echo(f"wrote {recording.duration} frames x {len(recording.elements)} elements to {out_path}")


@main.command()
@click.argument("recording_path", type=click.Path(exists=True, dir_okay=False))
@config_option
@rate_option
@click.option("--outdir", type=click.Path(file_okay=False), required=True)
def analyze(recording_path, config_path, sample_rate, outdir):
    """Windowed MI / distance metrics, per-frame scene graphs, and figures."""
    config = _load_config(config_path)
    recording = load_recording(recording_path, sample_rate=sample_rate,
                               max_gap_frames=config.max_gap_frames)
    result = compile_demonstration(recording, config)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_metrics_csv(result.signals, outdir / "metrics.csv")
    with open(outdir / "graphs.jsonl", "w") as fh:
        for frame, graph in zip(result.signals.frames(), result.graphs):
            fh.write(json.dumps(graph_record(frame, graph)) + "\n")
    render_signal_figure(result.signals, outdir / "signals.png")
    click.echo(f"analysis written to {outdir}")


@main.command()
@click.argument("recording_path", type=click.Path(exists=True, dir_okay=False))
@config_option
@rate_option
@filter_option
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True,
              help="Segmentation JSON output.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the interaction-unit table as CSV.")
@click.option("--timeline", "timeline_path", type=click.Path(dir_okay=False), default=None,
              help="Also render the segmentation timeline as PNG.")
def segment(recording_path, config_path, sample_rate, filter_temporary, out_path,
            csv_path, timeline_path):
    """Segment a recording into interaction units and activities."""
    config = _load_config(config_path)
    recording = load_recording(recording_path, sample_rate=sample_rate,
                               max_gap_frames=config.max_gap_frames)
    result = compile_demonstration(recording, config, filter_temporary=filter_temporary)
    Path(out_path).write_text(json.dumps(
        segmentation_record(result.ius, result.activities), indent=2))
    if csv_path:
        write_segmentation_csv(result.ius, csv_path)
    if timeline_path:
        render_timeline_figure(result.ius, result.activities, timeline_path)
    click.echo(f"{len(result.ius)} interaction units, {len(result.activities)} activities -> {out_path}")


@main.command()
@click.argument("recording_path", type=click.Path(exists=True, dir_okay=False))
@config_option
@rate_option
@filter_option
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True,
              help="Plan JSON output.")
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False), default=None,
              help="Also write a Graphviz rendering of the tree.")
def plan(recording_path, config_path, sample_rate, filter_temporary, out_path, dot_path):
    """Compile a recording into a behavior-tree plan document."""
    config = _load_config(config_path)
    recording = load_recording(recording_path, sample_rate=sample_rate,
                               max_gap_frames=config.max_gap_frames)
    result = compile_demonstration(recording, config, filter_temporary=filter_temporary)
    save_plan(result.plan, out_path)
    if dot_path:
        Path(dot_path).write_text(plan_to_dot(result.plan))
    leaves = result.plan.leaves()
    click.echo(f"plan with {len(result.plan.children)} activities and {len(leaves)} actions -> {out_path}")


@main.command()
@click.argument("plan_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--scene", "scene_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Recording providing the initial scene.")
@rate_option
@click.option("--frame", type=int, default=0, show_default=True,
              help="Frame of the scene recording to take initial poses from.")
@click.option("--drop", "dropped", multiple=True,
              help="Object id to remove from the initial scene (repeatable).")
@click.option("--grasp-tolerance", type=float, default=0.02, show_default=True)
@click.option("--pos-tol", type=float, default=1e-6, show_default=True)
@click.option("--yaw-tol", type=float, default=1e-6, show_default=True)
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), default=None,
              help="Write the execution trace as JSON.")
def replay(plan_path, scene_path, sample_rate, frame, dropped, grasp_tolerance,
           pos_tol, yaw_tol, trace_path):
    """Execute a plan against a scene and verify the demonstrated placements.

    Exits nonzero when execution fails or a relative pose misses tolerance."""
    root = load_plan(plan_path)
    recording = load_recording(scene_path, sample_rate=sample_rate)
    scene = initial_scene(recording, frame)
    effector = scene.pop(recording.hand.id)
    for obj in dropped:
        scene.pop(obj, None)
    _, trace = execute_bt(root, WorldState(scene, effector),
                          grasp_tolerance=grasp_tolerance)
    report = verify_relative_poses(trace, placement_references(root),
                                   pos_tolerance=pos_tol, yaw_tolerance=yaw_tol)
    if trace_path:
        Path(trace_path).write_text(json.dumps(
            {"execution": trace.to_dict(), "verification": report.to_dict()}, indent=2))
    for step in trace.steps:
        click.echo(f"  {step['action']}({step['target']}) -> {step['status']}")
    for c in report.checks:
        click.echo(f"  placement {c.moving} on {c.target}: "
                   f"pos {c.position_error:.2e} m, yaw {c.yaw_error:.2e} rad "
                   f"[{'ok' if c.ok else 'FAIL'}]")
    if trace.status != "SUCCESS" or not report.passed:
        click.echo("replay FAILED")
        sys.exit(1)
    click.echo("replay SUCCESS")


@main.command()
@click.argument("recording_path", type=click.Path(exists=True, dir_okay=False))
@config_option
@rate_option
@filter_option
@click.option("--outdir", type=click.Path(file_okay=False), required=True)
def run(recording_path, config_path, sample_rate, filter_temporary, outdir):
    """Full pipeline: metrics, graphs, segmentation, plan, figures, manifest."""
    config = _load_config(config_path)
    recording_path = Path(recording_path)
    recording = load_recording(recording_path, sample_rate=sample_rate,
                               max_gap_frames=config.max_gap_frames)
    result = compile_demonstration(recording, config, filter_temporary=filter_temporary)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    write_metrics_csv(result.signals, outdir / "metrics.csv")
    with open(outdir / "graphs.jsonl", "w") as fh:
        for frame, graph in zip(result.signals.frames(), result.graphs):
            fh.write(json.dumps(graph_record(frame, graph)) + "\n")
    (outdir / "segmentation.json").write_text(json.dumps(
        segmentation_record(result.ius, result.activities), indent=2))
    write_segmentation_csv(result.ius, outdir / "segmentation.csv")
    (outdir / "plan.json").write_text(serialize_plan(result.plan))
    (outdir / "plan.dot").write_text(plan_to_dot(result.plan))
    render_signal_figure(result.signals, outdir / "signals.png")
    render_timeline_figure(result.ius, result.activities, outdir / "timeline.png")

    manifest = {
        "tool": {"name": "demo2bt", "version": __version__},
        "input": {"path": str(recording_path), "sha256": _sha256(recording_path),
                  "frames": recording.duration, "sample_rate": sample_rate,
                  "elements": [e.id for e in recording.elements]},
        "config": result.config.to_dict(),
        "filter_temporary": filter_temporary,
        "outputs": ["metrics.csv", "graphs.jsonl", "segmentation.json",
                    "segmentation.csv", "plan.json", "plan.dot",
                    "signals.png", "timeline.png"],
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    click.echo(f"pipeline outputs written to {outdir}")


if __name__ == "__main__":
    main()
