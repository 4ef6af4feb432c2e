"""Renderers for grwasim CSV/JSON artifacts; no physics is recomputed here."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import entropy_trace, heatmap, polar_plot, surface, sweep
from ._io import SchemaError

__version__ = "0.1.0"

_KINDS = {
    "entropy_trace": entropy_trace.render,
    "heatmap": heatmap.render,
    "surface": surface.render,
    "polar": polar_plot.render,
    "sweep": sweep.render,
}


@dataclass(frozen=True)
class PlotSpec:
    """One render job: input CSVs, figure family, output image path."""

    inputs: tuple[str, ...]
    kind: str
    output: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SchemaError(f"unknown plot kind {self.kind!r}; know {sorted(_KINDS)}")
        if not self.inputs:
            raise SchemaError("PlotSpec needs at least one input CSV")


def render(spec: PlotSpec) -> str:
    """Dispatch to the figure family; returns the written image path."""
    fn = _KINDS[spec.kind]
    return fn(spec.inputs[0], spec.output, **spec.options)


__all__ = ["PlotSpec", "render", "SchemaError", "__version__"]
