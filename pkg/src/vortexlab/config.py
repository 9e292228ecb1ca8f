"""JSON run configuration: strict parsing (unknown keys rejected), field-level
validation messages, and a round-trippable serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .experiments import Numerics
from .initial_data import InitialDataSpec

MODES = ("pointvortex", "simulate", "sweep", "metrics")

_TOP_KEYS = {"mode", "output_dir", "initial_data", "numerics", "sweep",
             "point_vortices", "metrics"}
_INITIAL_KEYS = {"centers", "intensities", "epsilon", "support_radius",
                 "separation", "p_exponent", "scaling_exponent",
                 "scaling_constant", "profile", "tail_fraction"}
_NUMERICS_KEYS = {"dt", "horizon", "particles_per_core", "blob_radius_factor",
                  "opening_angle", "direct_crossover", "leaf_size",
                  "deterministic", "seed", "record_every", "dt_core_fraction",
                  "collision_floor_factor", "pv_offset_fraction"}
_SWEEP_KEYS = {"epsilons"}
_PV_KEYS = {"positions", "intensities"}
_METRICS_KEYS = {"cloud_csv", "measure_csvs", "radii", "p_exponent", "pitch"}


@dataclass
class MetricsTask:
    cloud_csv: str | None = None
    measure_csvs: tuple | None = None
    radii: tuple = (0.25, 0.5)
    p_exponent: float = 4.0
    pitch: float | None = None  # enables quadrature-norm recomputation


@dataclass
class RunConfig:
    mode: str
    numerics: Numerics = field(default_factory=Numerics)
    initial_data: InitialDataSpec | None = None
    sweep_epsilons: list | None = None
    pv_positions: np.ndarray | None = None
    pv_intensities: np.ndarray | None = None
    metrics: MetricsTask | None = None
    output_dir: str | None = None


def _reject_unknown(section: dict, allowed: set, where: str):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}", key)


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"missing required key {key!r} in {where}", key)
    return section[key]


def parse_config(text: str) -> RunConfig:
    """Parse and validate a UTF-8 JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"JSON parse error at byte {exc.pos}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("top-level document must be an object")
    _reject_unknown(doc, _TOP_KEYS, "document")

    mode = _require(doc, "mode", "document")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}",
                          "mode")

    num_doc = doc.get("numerics", {})
    if not isinstance(num_doc, dict):
        raise ConfigError("numerics must be an object", "numerics")
    _reject_unknown(num_doc, _NUMERICS_KEYS, "numerics")
    try:
        numerics = Numerics(**num_doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid numerics: {exc}", "numerics") from exc

    cfg = RunConfig(mode=mode, numerics=numerics,
                    output_dir=doc.get("output_dir"))

    if mode in ("simulate", "sweep"):
        section = _require(doc, "initial_data", "document")
        if not isinstance(section, dict):
            raise ConfigError("initial_data must be an object",
                              "initial_data")
        _reject_unknown(section, _INITIAL_KEYS, "initial_data")
        for key in ("centers", "intensities", "epsilon", "support_radius",
                    "separation", "p_exponent"):
            _require(section, key, "initial_data")
        cfg.initial_data = InitialDataSpec(**section)

    if mode == "sweep":
        section = _require(doc, "sweep", "document")
        _reject_unknown(section, _SWEEP_KEYS, "sweep")
        eps = _require(section, "epsilons", "sweep")
        if not isinstance(eps, list) or not eps:
            raise ConfigError("sweep.epsilons must be a nonempty list",
                              "epsilons")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigError("sweep.epsilons must be strictly decreasing",
                              "epsilons")
        if any(e > cfg.initial_data.support_radius for e in eps):
            raise ConfigError("sweep.epsilons must not exceed support_radius",
                              "epsilons")
        cfg.sweep_epsilons = [float(e) for e in eps]

    if mode == "pointvortex":
        section = _require(doc, "point_vortices", "document")
        _reject_unknown(section, _PV_KEYS, "point_vortices")
        pos = np.asarray(_require(section, "positions", "point_vortices"),
                         dtype=np.float64)
        inten = np.asarray(_require(section, "intensities", "point_vortices"),
                           dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ConfigError("point_vortices.positions must be (n, 2)",
                              "positions")
        if inten.shape != (pos.shape[0],):
            raise ConfigError(
                "point_vortices.intensities must match positions",
                "intensities")
        if (inten == 0.0).any():
            raise ConfigError("intensities must be nonzero", "intensities")
        cfg.pv_positions = pos
        cfg.pv_intensities = inten

    if mode == "metrics":
        section = _require(doc, "metrics", "document")
        _reject_unknown(section, _METRICS_KEYS, "metrics")
        task = MetricsTask(
            cloud_csv=section.get("cloud_csv"),
            measure_csvs=(tuple(section["measure_csvs"])
                          if section.get("measure_csvs") else None),
            radii=tuple(section.get("radii", (0.25, 0.5))),
            p_exponent=float(section.get("p_exponent", 4.0)),
            pitch=(float(section["pitch"])
                   if section.get("pitch") is not None else None),
        )
        if task.cloud_csv is None and task.measure_csvs is None:
            raise ConfigError(
                "metrics needs cloud_csv or measure_csvs", "metrics")
        if task.measure_csvs is not None and len(task.measure_csvs) != 2:
            raise ConfigError("measure_csvs must list exactly two files",
                              "measure_csvs")
        if task.p_exponent <= 2.0:
            raise ConfigError("p_exponent must exceed 2", "p_exponent")
        cfg.metrics = task
    return cfg


def serialize_config(cfg: RunConfig) -> str:
    """Canonical JSON for a RunConfig; parse_config round-trips it."""
    doc = {"mode": cfg.mode}
    if cfg.output_dir is not None:
        doc["output_dir"] = cfg.output_dir
    num = cfg.numerics
    doc["numerics"] = {
        "dt": num.dt, "horizon": num.horizon,
        "particles_per_core": num.particles_per_core,
        "blob_radius_factor": num.blob_radius_factor,
        "opening_angle": num.opening_angle,
        "direct_crossover": num.direct_crossover,
        "leaf_size": num.leaf_size,
        "deterministic": num.deterministic,
        "seed": num.seed,
        "record_every": num.record_every,
        "dt_core_fraction": num.dt_core_fraction,
        "collision_floor_factor": num.collision_floor_factor,
        "pv_offset_fraction": num.pv_offset_fraction,
    }
    if cfg.initial_data is not None:
        spec = cfg.initial_data
        doc["initial_data"] = {
            "centers": spec.centers.tolist(),
            "intensities": spec.intensities.tolist(),
            "epsilon": spec.epsilon,
            "support_radius": spec.support_radius,
            "separation": spec.separation,
            "p_exponent": spec.p_exponent,
            "scaling_exponent": spec.scaling_exponent,
            "scaling_constant": spec.scaling_constant,
            "profile": spec.profile,
            "tail_fraction": spec.tail_fraction,
        }
    if cfg.sweep_epsilons is not None:
        doc["sweep"] = {"epsilons": cfg.sweep_epsilons}
    if cfg.pv_positions is not None:
        doc["point_vortices"] = {
            "positions": cfg.pv_positions.tolist(),
            "intensities": cfg.pv_intensities.tolist(),
        }
    if cfg.metrics is not None:
        task = cfg.metrics
        section = {"radii": list(task.radii), "p_exponent": task.p_exponent}
        if task.cloud_csv is not None:
            section["cloud_csv"] = task.cloud_csv
        if task.measure_csvs is not None:
            section["measure_csvs"] = list(task.measure_csvs)
        if task.pitch is not None:
            section["pitch"] = task.pitch
        doc["metrics"] = section
    return json.dumps(doc, indent=2, sort_keys=True)
