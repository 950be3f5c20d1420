"""JSON configuration file.

Every section is optional::

    {
      "bank":   {"fq1": [8 values], ...},                 # hyper-die parameter lists
      "rules":  [{"parameter": "fq1s", "triple": [8, 7, 6]}, ...],
      "patch":  {"ldns": 0.6, "vibrato_rate": 5.0, ...},  # VoicePatch defaults/overrides
      "render": {"sample_rate": 44100},
      "walk":   {"steps": 24, "shots": 500, "initial_pitch_code": "110",
                 "initial_duration_code": "100", "pitches": {"000": 60, ...},
                 "durations": {"000": [1.0, false], ...},
                 "schedule": [{"step": 12, "pitches": {...}}]},
      "markov": {"matrix": "rules" | "walk" | {"labels": [...], "rows": [[...]]},
                 "start": "C4", "length": 16, "duration": 1.0}
    }

Command-line flags override values read from the file.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .hyperdie import CANONICAL_RULES, CodeRule, ParameterBank, rules_from_config
from .markov import BUILTIN, TransitionMatrix, validate_matrix
from .qwalk import DictionarySwitch
from .voice import RenderSettings, VoicePatch

SECTIONS = {"bank", "rules", "patch", "render", "walk", "markov"}


@dataclass
class FileConfig:
    bank: ParameterBank = field(default_factory=ParameterBank)
    rules: tuple[CodeRule, ...] = CANONICAL_RULES
    patch: VoicePatch = field(default_factory=VoicePatch)
    render: RenderSettings = field(default_factory=RenderSettings)
    walk: dict = field(default_factory=dict)
    markov: dict = field(default_factory=dict)


def _durations(d: dict) -> dict[str, tuple[float, bool]]:
    return {k: (float(v[0]), bool(v[1])) for k, v in d.items()}


def walk_kwargs(section: dict) -> dict:
    """WalkConfig keyword arguments from the ``walk`` section."""
    out = {k: v for k, v in section.items() if k not in ("durations", "schedule", "pitches")}
    if "pitches" in section:
        out["pitches"] = {k: int(v) for k, v in section["pitches"].items()}
    if "durations" in section:
        out["durations"] = _durations(section["durations"])
    if "schedule" in section:
        out["schedule"] = [
            DictionarySwitch(
                int(s["step"]),
                {k: int(v) for k, v in s["pitches"].items()} if "pitches" in s else None,
                _durations(s["durations"]) if "durations" in s else None,
            )
            for s in section["schedule"]
        ]
    return out


def markov_matrix(source) -> TransitionMatrix:
    if isinstance(source, str):
        if source not in BUILTIN:
            raise ValueError(f"unknown built-in chain {source!r}; choose from {sorted(BUILTIN)}")
        return BUILTIN[source]()
    matrix = TransitionMatrix.from_dict(source)
    problems = validate_matrix(matrix)
    if problems:
        raise ValueError("invalid transition matrix: " + "; ".join(f"{p.row}: {p.reason}" for p in problems))
    return matrix


def parse_config(data: dict) -> FileConfig:
    unknown = set(data) - SECTIONS
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    cfg = FileConfig()
    if "bank" in data:
        cfg.bank = ParameterBank.from_dict({**asdict(ParameterBank()), **data["bank"]})
    if "rules" in data:
        cfg.rules = rules_from_config(data["rules"])
    if "patch" in data:
        cfg.patch = VoicePatch.from_dict(data["patch"])
    if "render" in data:
        cfg.render = RenderSettings(**data["render"])
    cfg.walk = dict(data.get("walk", {}))
    cfg.markov = dict(data.get("markov", {}))
    return cfg


def load_config(path: str | Path | None) -> FileConfig:
    if path is None:
        return FileConfig()
    with open(path, encoding="utf-8") as fh:
        return parse_config(json.load(fh))
