"""demo2bt: compile a single manual-task demonstration, given as time-stamped
hand and object pose streams, into an executable behavior-tree plan.

The pipeline detects hand-object and object-object interactions with sliding-
window Shannon entropy and mutual information, represents each frame as a scene
graph, segments the graph sequence into interaction units and activities,
extracts motion primitives by graph differencing, and emits a behavior tree
whose placements generalize to new object layouts.
"""

__version__ = "0.1.0"

from .pipeline import PipelineResult, compile_demonstration  # noqa: F401
from .signal_io import PipelineConfig, Recording, load_recording  # noqa: F401
