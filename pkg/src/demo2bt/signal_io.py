"""Recording ingestion, validation, windowing, and pipeline configuration."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .geometry import Pose6D

AXIS_INDEX = {"x": 0, "y": 1, "z": 2}

CSV_COLUMNS = ["frame", "id", "kind", "px", "py", "pz", "qx", "qy", "qz", "qw"]


class RecordingError(ValueError):
    """Malformed or inconsistent recording input."""


@dataclass(frozen=True)
class ElementId:
    id: str
    kind: str  # "hand" | "object"

    def __post_init__(self):
        if self.kind not in ("hand", "object"):
            raise ValueError(f"unknown element kind {self.kind!r}")


@dataclass
class Track:
    """Dense per-frame pose arrays; NaN rows mark frames where the element is absent."""

    positions: np.ndarray  # (duration, 3)
    orientations: np.ndarray  # (duration, 4), scalar-last

    def present(self, k: int) -> bool:
        return bool(np.all(np.isfinite(self.positions[k])))

    def pose_at(self, k: int) -> Pose6D:
        if not self.present(k):
            raise RecordingError(f"element absent at frame {k}")
        return Pose6D(self.positions[k].copy(), self.orientations[k].copy())


@dataclass
class Recording:
    sample_rate: float
    elements: list[ElementId]
    tracks: dict[str, Track]
    duration: int

    @property
    def hand(self) -> ElementId:
        return next(e for e in self.elements if e.kind == "hand")

    @property
    def objects(self) -> list[ElementId]:
        return [e for e in self.elements if e.kind == "object"]

    def element(self, element_id: str) -> ElementId:
        for e in self.elements:
            if e.id == element_id:
                return e
        raise KeyError(element_id)

    def positions(self, element_id: str) -> np.ndarray:
        return self.tracks[element_id].positions

    def pose_at(self, element_id: str, k: int) -> Pose6D:
        return self.tracks[element_id].pose_at(k)


@dataclass
class PipelineConfig:
    """All tunables of the demonstration-analysis pipeline.

    Defaults reproduce the reference setup: 30 Hz capture, a 40-sample window,
    1 cm quantization, and 0.15 / 0.2 m proximity thresholds.
    """

    window_samples: int = 40
    quantization: float = 0.01
    mi_epsilon: float = 0.05
    d_ho_threshold: float = 0.15
    d_oo_threshold: float = 0.2
    trend_horizon: int | None = None
    axes: tuple[str, ...] = ("x", "y")
    angle_threshold: float = 45.0
    max_gap_frames: int = 5
    window_seconds: float | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.window_samples < 4 or self.window_samples % 2 != 0:
            raise ValueError("window_samples must be even and >= 4")
        if self.quantization <= 0:
            raise ValueError("quantization must be > 0")
        if self.mi_epsilon <= 0:
            raise ValueError("mi_epsilon must be > 0")
        if self.d_ho_threshold <= 0 or self.d_oo_threshold <= 0:
            raise ValueError("distance thresholds must be > 0")
        if not self.axes or any(a not in AXIS_INDEX for a in self.axes):
            raise ValueError(f"axes must be a nonempty subset of {sorted(AXIS_INDEX)}")
        if self.trend_horizon is not None and self.trend_horizon < 1:
            raise ValueError("trend_horizon must be >= 1")

    @property
    def horizon(self) -> int:
        return self.trend_horizon if self.trend_horizon is not None else self.window_samples // 2

    @property
    def axis_indices(self) -> tuple[int, ...]:
        return tuple(AXIS_INDEX[a] for a in self.axes)

    def resolved_for(self, sample_rate: float) -> "PipelineConfig":
        """Apply window_seconds at a given sample rate; explicit samples win on conflict."""
        if self.window_seconds is None:
            return self
        w = int(round(self.window_seconds * sample_rate))
        if w % 2 != 0:
            w += 1
        cfg = replace(self, window_seconds=None)
        if self.window_samples == PipelineConfig.window_samples:
            cfg = replace(cfg, window_samples=w)
        return cfg

    @staticmethod
    def from_dict(data: dict) -> "PipelineConfig":
        known = set(PipelineConfig.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "axes" in data:
            data = dict(data, axes=tuple(data["axes"]))
        return PipelineConfig(**data)

    @staticmethod
    def from_file(path: str | Path) -> "PipelineConfig":
        with open(path) as fh:
            return PipelineConfig.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "window_samples": self.window_samples,
            "quantization": self.quantization,
            "mi_epsilon": self.mi_epsilon,
            "d_ho_threshold": self.d_ho_threshold,
            "d_oo_threshold": self.d_oo_threshold,
            "trend_horizon": self.trend_horizon,
            "axes": list(self.axes),
            "angle_threshold": self.angle_threshold,
            "max_gap_frames": self.max_gap_frames,
        }


def _rows_from_jsonl(path: Path):
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                yield lineno, int(obj["k"]), str(obj["id"]), str(obj["kind"]), obj["p"], obj["q"]
            except (KeyError, TypeError, ValueError) as exc:
                raise RecordingError(f"{path}:{lineno}: malformed row ({exc})") from exc


def _rows_from_csv(path: Path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1 and row and row[0].strip() == "frame":
                continue  # optional header
            if not row:
                continue
            if len(row) != len(CSV_COLUMNS):
                raise RecordingError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} columns, got {len(row)}")
            try:
                k = int(row[0])
                p = [float(v) for v in row[3:6]]
                q = [float(v) for v in row[6:10]]
                yield lineno, k, row[1], row[2], p, q
            except ValueError as exc:
                raise RecordingError(f"{path}:{lineno}: malformed row ({exc})") from exc


def load_recording(
    path: str | Path,
    format: str | None = None,
    sample_rate: float = 30.0,
    max_gap_frames: int = 5,
) -> Recording:
    """Load a pose recording from JSONL or CSV and gap-fill short dropouts.

    Gaps up to `max_gap_frames` hold the last observed pose; longer gaps leave
    the element absent (NaN) for those frames.
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unknown format {format!r}")
    rows = _rows_from_jsonl(path) if format == "jsonl" else _rows_from_csv(path)

    samples: dict[str, dict[int, tuple[list, list]]] = {}
    kinds: dict[str, str] = {}
    max_frame = -1
    for lineno, k, eid, kind, p, q in rows:
        if k < 0:
            raise RecordingError(f"{path}:{lineno}: negative frame index {k}")
        if eid in kinds and kinds[eid] != kind:
            raise RecordingError(f"{path}:{lineno}: element {eid!r} changes kind")
        kinds[eid] = kind
        per = samples.setdefault(eid, {})
        if k in per:
            raise RecordingError(f"{path}:{lineno}: duplicate (id, frame) pair ({eid!r}, {k})")
        if len(p) != 3 or len(q) != 4:
            raise RecordingError(f"{path}:{lineno}: bad pose arity")
        per[k] = (p, q)
        max_frame = max(max_frame, k)

    if max_frame < 0:
        raise RecordingError(f"{path}: recording is empty")
    hands = [eid for eid, kind in kinds.items() if kind == "hand"]
    if len(hands) != 1:
        raise RecordingError(f"{path}: expected exactly one hand element, found {len(hands)}")

    duration = max_frame + 1
    elements = [ElementId(eid, kinds[eid]) for eid in sorted(kinds, key=lambda e: (kinds[e] != "hand", e))]
    tracks = {}
    for e in elements:
        pos = np.full((duration, 3), np.nan)
        quat = np.full((duration, 4), np.nan)
        for k, (p, q) in samples[e.id].items():
            pos[k] = p
            quat[k] = q
        _fill_gaps(pos, quat, max_gap_frames)
        tracks[e.id] = Track(pos, quat)
    return Recording(sample_rate=sample_rate, elements=elements, tracks=tracks, duration=duration)


def _fill_gaps(pos: np.ndarray, quat: np.ndarray, max_gap: int) -> None:
    last = None
    gap = 0
    for k in range(len(pos)):
        if np.all(np.isfinite(pos[k])):
            last = k
            gap = 0
        elif last is not None:
            gap += 1
            if gap <= max_gap:
                pos[k] = pos[last]
                quat[k] = quat[last]


def save_recording(recording: Recording, path: str | Path, format: str = "jsonl") -> None:
    path = Path(path)
    if format == "jsonl":
        with open(path, "w") as fh:
            for e in recording.elements:
                tr = recording.tracks[e.id]
                for k in range(recording.duration):
                    if not tr.present(k):
                        continue
                    fh.write(json.dumps({
                        "k": k, "id": e.id, "kind": e.kind,
                        "p": [float(v) for v in tr.positions[k]],
                        "q": [float(v) for v in tr.orientations[k]],
                    }) + "\n")
    elif format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for e in recording.elements:
                tr = recording.tracks[e.id]
                for k in range(recording.duration):
                    if not tr.present(k):
                        continue
                    writer.writerow([k, e.id, e.kind,
                                     *(repr(float(v)) for v in tr.positions[k]),
                                     *(repr(float(v)) for v in tr.orientations[k])])
    else:
        raise ValueError(f"unknown format {format!r}")


def window_bounds(t: int, w: int) -> tuple[int, int]:
    """Half-open frame range [t - w/2, t + w/2) of the centered window at t."""
    half = w // 2
    return t - half, t + half


def average_distance(
    recording: Recording,
    a: str,
    b: str,
    t: int,
    w: int,
    axes: tuple[int, ...] = (0, 1),
) -> float:
    """Mean Euclidean distance between two elements over the centered window,
    restricted to the configured axes."""
    lo, hi = window_bounds(t, w)
    if lo < 0 or hi > recording.duration:
        raise RecordingError(f"window [{lo}, {hi}) outside recording of {recording.duration} frames")
    pa = recording.positions(a)[lo:hi][:, list(axes)]
    pb = recording.positions(b)[lo:hi][:, list(axes)]
    if not (np.all(np.isfinite(pa)) and np.all(np.isfinite(pb))):
        raise RecordingError(f"element absent within window [{lo}, {hi})")
    return float(np.mean(np.linalg.norm(pa - pb, axis=1)))


def sliding_average_distance(
    recording: Recording, a: str, b: str, w: int, axes: tuple[int, ...] = (0, 1)
) -> np.ndarray:
    """Windowed average distance for every frame; NaN where no full window exists."""
    pa = recording.positions(a)[:, list(axes)]
    pb = recording.positions(b)[:, list(axes)]
    d = np.linalg.norm(pa - pb, axis=1)
    return sliding_mean(d, w)


def sliding_mean(values: np.ndarray, w: int) -> np.ndarray:
    n = len(values)
    out = np.full(n, np.nan)
    half = w // 2
    if n < w:
        return out
    v = np.where(np.isfinite(values), values, 0.0)
    bad = ~np.isfinite(values)
    csum = np.concatenate([[0.0], np.cumsum(v)])
    cbad = np.concatenate([[0], np.cumsum(bad)])
    for t in range(half, n - half + 1):
        lo, hi = t - half, t + half
        if cbad[hi] - cbad[lo] > 0:
            continue
        out[t] = (csum[hi] - csum[lo]) / w
    return out
