"""JSON run configuration: schema validation and shipped presets.

Top-level keys are ``experiments``, ``analysis`` and ``output``; see
``docs/config.md`` for the full schema.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .cluster import ClusterSpec
from .errors import ValidationError
from .scaling import DEFAULT_KNEE_THRESHOLD
from .simulator import ExperimentSpec
from .workload import WorkloadSpec

CURVE_FORMATS = ("csv", "json")
REPORT_FORMATS = ("md", "csv", "json")

_WORKLOAD_KEYS = {f.name for f in fields(WorkloadSpec)}
_CLUSTER_KEYS = {f.name for f in fields(ClusterSpec)}
_EXPERIMENT_KEYS = {"label", "workload", "cluster", "gpu_counts", "noise_sigma", "seed"}
_TOP_KEYS = {"experiments", "analysis", "output"}


@dataclass(frozen=True)
class AnalysisConfig:
    knee_threshold: float = DEFAULT_KNEE_THRESHOLD
    baseline_n: int | None = None  # None: first GPU count of each curve
    allocation_targets: Mapping[str, tuple[float, ...]] | tuple[float, ...] = ()
    n_max: int | None = None  # None: largest GPU count of each curve
    truncate_at_min: bool = False

    def targets_for(self, label: str) -> tuple[float, ...]:
        if isinstance(self.allocation_targets, Mapping):
            return tuple(self.allocation_targets.get(label, ()))
        return tuple(self.allocation_targets)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "results"
    curve_format: str = "csv"
    report_format: str = "md"
    plot: bool = True


@dataclass(frozen=True)
class RunConfig:
    experiments: tuple[ExperimentSpec, ...]
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


def _fail(key: str, value: Any, why: str) -> ValidationError:
    return ValidationError(f"load_config: {key}={value!r}: {why}")


def _check_keys(obj: Any, allowed: set[str], where: str, required: set[str] = frozenset()) -> None:
    if not isinstance(obj, dict):
        raise _fail(where, obj, "expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise _fail(f"{where}.{unknown[0]}", obj[unknown[0]], f"unknown key (allowed: {sorted(allowed)})")
    missing = sorted(required - set(obj))
    if missing:
        raise _fail(f"{where}.{missing[0]}", None, "required key is missing")


def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _build(cls, data: dict, where: str):
    try:
        return cls(**data)
    except ValidationError as exc:
        raise ValidationError(f"load_config: {where}: {exc}") from None
    except TypeError as exc:
        raise _fail(where, data, str(exc)) from None


def _parse_experiment(raw: Any, where: str) -> ExperimentSpec:
    _check_keys(raw, _EXPERIMENT_KEYS, where, required={"label", "workload"})
    label = raw["label"]
    if not isinstance(label, str) or not label:
        raise _fail(f"{where}.label", label, "must be a non-empty string")
    where = f"{where}[label={label!r}]"

    w_raw = raw["workload"]
    _check_keys(w_raw, _WORKLOAD_KEYS, f"{where}.workload",
                required={"param_count", "dataset_size", "batch_size_per_device", "compute_time_per_sample"})
    w_raw = {"name": label, **w_raw}
    workload = _build(WorkloadSpec, w_raw, f"{where}.workload")

    c_raw = raw.get("cluster", {})
    _check_keys(c_raw, _CLUSTER_KEYS, f"{where}.cluster")
    cluster = _build(ClusterSpec, c_raw, f"{where}.cluster")

    extra: dict[str, Any] = {}
    if "gpu_counts" in raw:
        grid = raw["gpu_counts"]
        if not isinstance(grid, list) or not all(_is_int(n) for n in grid):
            raise _fail(f"{where}.gpu_counts", grid, "must be a list of integers")
        for i in range(1, len(grid)):
            if grid[i] <= grid[i - 1]:
                raise _fail(f"{where}.gpu_counts", grid,
                            f"must be strictly increasing, {grid[i]} follows {grid[i - 1]} at index {i}")
        extra["gpu_counts"] = tuple(grid)
    if "noise_sigma" in raw:
        s = raw["noise_sigma"]
        if not _is_number(s) or not math.isfinite(s) or s < 0:
            raise _fail(f"{where}.noise_sigma", s, "must be a number >= 0")
        extra["noise_sigma"] = float(s)
    if "seed" in raw:
        if not _is_int(raw["seed"]):
            raise _fail(f"{where}.seed", raw["seed"], "must be an integer")
        extra["seed"] = raw["seed"]
    try:
        return ExperimentSpec(workload=workload, cluster=cluster, label=label, **extra)
    except ValidationError as exc:
        raise ValidationError(f"load_config: {where}: {exc}") from None


def _parse_analysis(raw: Any) -> AnalysisConfig:
    keys = {f.name for f in fields(AnalysisConfig)}
    _check_keys(raw, keys, "analysis")
    out: dict[str, Any] = {}
    if "knee_threshold" in raw:
        v = raw["knee_threshold"]
        if not _is_number(v) or not math.isfinite(v) or v <= 1:
            raise _fail("analysis.knee_threshold", v, "must be a number > 1")
        out["knee_threshold"] = float(v)
    for key in ("baseline_n", "n_max"):
        if key in raw and raw[key] is not None:
            v = raw[key]
            if not _is_int(v) or v < 1:
                raise _fail(f"analysis.{key}", v, "must be an integer >= 1 or null")
            out[key] = v
    if "allocation_targets" in raw:
        v = raw["allocation_targets"]

        def targets(seq: Any, key: str) -> tuple[float, ...]:
            if not isinstance(seq, list) or not all(_is_number(x) and math.isfinite(x) and x > 0 for x in seq):
                raise _fail(key, seq, "must be a list of positive numbers")
            return tuple(float(x) for x in seq)

        if isinstance(v, dict):
            out["allocation_targets"] = {k: targets(s, f"analysis.allocation_targets.{k}") for k, s in v.items()}
        else:
            out["allocation_targets"] = targets(v, "analysis.allocation_targets")
    if "truncate_at_min" in raw:
        if not isinstance(raw["truncate_at_min"], bool):
            raise _fail("analysis.truncate_at_min", raw["truncate_at_min"], "must be true or false")
        out["truncate_at_min"] = raw["truncate_at_min"]
    return AnalysisConfig(**out)


def _parse_output(raw: Any) -> OutputConfig:
    keys = {f.name for f in fields(OutputConfig)}
    _check_keys(raw, keys, "output")
    if "directory" in raw and (not isinstance(raw["directory"], str) or not raw["directory"]):
        raise _fail("output.directory", raw["directory"], "must be a non-empty string")
    if raw.get("curve_format", "csv") not in CURVE_FORMATS:
        raise _fail("output.curve_format", raw["curve_format"], f"must be one of {CURVE_FORMATS}")
    if raw.get("report_format", "md") not in REPORT_FORMATS:
        raise _fail("output.report_format", raw["report_format"], f"must be one of {REPORT_FORMATS}")
    if "plot" in raw and not isinstance(raw["plot"], bool):
        raise _fail("output.plot", raw["plot"], "must be true or false")
    return OutputConfig(**raw)


def parse_config(data: Any) -> RunConfig:
    """Validate an already-decoded JSON document."""
    _check_keys(data, _TOP_KEYS, "config", required={"experiments"})
    raw_exps = data["experiments"]
    if not isinstance(raw_exps, list) or not raw_exps:
        raise _fail("experiments", raw_exps, "must be a non-empty list")
    experiments = tuple(_parse_experiment(e, f"experiments[{i}]") for i, e in enumerate(raw_exps))
    seen: set[str] = set()
    for i, e in enumerate(experiments):
        if e.label in seen:
            raise _fail(f"experiments[{i}].label", e.label, "duplicate label")
        seen.add(e.label)
    return RunConfig(
        experiments=experiments,
        analysis=_parse_analysis(data.get("analysis", {})),
        output=_parse_output(data.get("output", {})),
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")  # FileNotFoundError propagates as I/O failure
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"load_config: malformed JSON in {str(path)!r} at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    return parse_config(data)


def available_presets() -> list[str]:
    root = resources.files("ddpscale") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def preset_path(name: str) -> Path:
    root = resources.files("ddpscale") / "presets"
    candidate = root / f"{name}.json"
    if not candidate.is_file():
        raise ValidationError(f"load_preset: unknown preset {name!r} (available: {available_presets()})")
    return Path(str(candidate))


def load_preset(name: str) -> RunConfig:
    return load_config(preset_path(name))


def experiment_to_dict(e: ExperimentSpec) -> dict:
    w = {f.name: getattr(e.workload, f.name) for f in fields(WorkloadSpec) if f.name != "name"}
    c = {f.name: getattr(e.cluster, f.name) for f in fields(ClusterSpec)}
    return {
        "label": e.label,
        "workload": w,
        "cluster": c,
        "gpu_counts": list(e.gpu_counts),
        "noise_sigma": e.noise_sigma,
        "seed": e.seed,
    }
