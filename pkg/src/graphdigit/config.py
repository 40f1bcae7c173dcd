"""Run configuration: one JSON document naming every tunable constant.

Calibration (16.5 px slots, 13 px bottom row, 164 px height), cleaning
sizes, corrections, match thresholds and the stop rule are all keys here,
so experiments never require code edits.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import FormatError
from .extraction import ExtractionConfig
from .fileio import atomic_write_text, dump_json
from .geometry import GraphGeometry
from .synth import DEFAULT_DURATION_RANGE, RenderStyle, style_from_dict
from .templates import DEFAULT_THRESHOLDS, SUPPRESS_RADIUS_PX, TM_CORRECTIONS


@dataclass
class RunConfig:
    geometry: GraphGeometry = field(default_factory=GraphGeometry)
    extraction: ExtractionConfig = field(default_factory=ExtractionConfig)
    style: RenderStyle = field(default_factory=RenderStyle)
    tm_thresholds: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    tm_corrections: dict[str, float] = field(default_factory=lambda: dict(TM_CORRECTIONS))
    suppress_radius_px: int = SUPPRESS_RADIUS_PX
    n_images: int = 32
    blank_fraction: float = 0.12
    duration_range: tuple[int, int] = DEFAULT_DURATION_RANGE
    jobs: int = 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d["duration_range"] = list(self.duration_range)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise FormatError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(d)
        if "geometry" in kwargs:
            kwargs["geometry"] = GraphGeometry(**kwargs["geometry"])
        if "extraction" in kwargs:
            ex = dict(kwargs["extraction"])
            if "bp_column_steps" in ex:
                ex["bp_column_steps"] = tuple(ex["bp_column_steps"])
            kwargs["extraction"] = ExtractionConfig(**ex)
        if "style" in kwargs:
            kwargs["style"] = style_from_dict(kwargs["style"])
        if "duration_range" in kwargs:
            kwargs["duration_range"] = tuple(kwargs["duration_range"])
        return cls(**kwargs)

    def save(self, path) -> None:
        atomic_write_text(path, dump_json(self.to_dict()))

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise FormatError(f"{path}: invalid JSON: {e}") from e
        return cls.from_dict(doc)
