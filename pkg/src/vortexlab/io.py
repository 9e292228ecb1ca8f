"""CSV and manifest serialization.

All reals are written with shortest round-trip precision (Python repr), so
reading a file back reproduces the in-memory values exactly.
"""

from __future__ import annotations

import hashlib
import json
import os

import numpy as np

from .cloud import ParticleCloud
from .experiments import DiagnosticsRecord
from .measures import AtomicMeasure
from .pointvortex import PVTrajectory

DIAGNOSTICS_HEADER = ("t,comp,Xx,Xy,Yx,Yy,w2_pv,w2_center,center_gap,"
                      "vel_gap,m_R,m_2R,mu,w1_total,min_sep_cloud,min_sep_pv")
CLOUD_HEADER = "k,x,y,gamma,tag"
MEASURE_HEADER = "x,y,mass"
PV_TRAJECTORY_HEADER = ("t,i,x,y,hamiltonian,px,py,angular_impulse,"
                        "min_separation")


def _f(x) -> str:
    return repr(float(x))


def write_diagnostics_csv(records, path) -> None:
    """One row per (record, component); global columns repeated per row."""
    lines = [DIAGNOSTICS_HEADER]
    for rec in records:
        for i in range(rec.n_components):
            lines.append(",".join([
                _f(rec.t), str(i),
                _f(rec.x_centers[i, 0]), _f(rec.x_centers[i, 1]),
                _f(rec.y_centers[i, 0]), _f(rec.y_centers[i, 1]),
                _f(rec.w2_pv[i]), _f(rec.w2_center[i]),
                _f(rec.center_gap[i]), _f(rec.vel_gap[i]),
                _f(rec.m_r[i]), _f(rec.m_2r[i]), _f(rec.mu[i]),
                _f(rec.w1_total), _f(rec.min_sep_cloud),
                _f(rec.min_sep_pv),
            ]))
    _write_text(path, "\n".join(lines) + "\n")


def read_diagnostics_csv(path):
    rows = _read_rows(path, DIAGNOSTICS_HEADER)
    records = []
    group = []
    for row in rows:
        comp = int(row[1])
        if comp == 0 and group:
            records.append(_rows_to_record(group))
            group = []
        group.append(row)
    if group:
        records.append(_rows_to_record(group))
    return records


def _rows_to_record(rows) -> DiagnosticsRecord:
    vals = [[float(c) for c in row] for row in rows]
    return DiagnosticsRecord(
        t=vals[0][0],
        x_centers=np.array([[v[2], v[3]] for v in vals]),
        y_centers=np.array([[v[4], v[5]] for v in vals]),
        w2_pv=np.array([v[6] for v in vals]),
        w2_center=np.array([v[7] for v in vals]),
        center_gap=np.array([v[8] for v in vals]),
        vel_gap=np.array([v[9] for v in vals]),
        m_r=np.array([v[10] for v in vals]),
        m_2r=np.array([v[11] for v in vals]),
        mu=np.array([v[12] for v in vals]),
        w1_total=vals[0][13],
        min_sep_cloud=vals[0][14],
        min_sep_pv=vals[0][15],
    )


def write_cloud_csv(cloud: ParticleCloud, path) -> None:
    lines = [CLOUD_HEADER]
    for k in range(cloud.n_particles):
        lines.append(",".join([
            str(k), _f(cloud.xy[k, 0]), _f(cloud.xy[k, 1]),
            _f(cloud.gamma[k]), str(int(cloud.tag[k]))]))
    _write_text(path, "\n".join(lines) + "\n")


def read_cloud_csv(path, pitch=None, blob_radius=0.0,
                   time=0.0) -> ParticleCloud:
    rows = _read_rows(path, CLOUD_HEADER)
    xy = np.array([[float(r[1]), float(r[2])] for r in rows]).reshape(-1, 2)
    gamma = np.array([float(r[3]) for r in rows])
    tag = np.array([int(r[4]) for r in rows], dtype=np.int64)
    return ParticleCloud(xy, gamma, tag, pitch, blob_radius, time)


def write_measure_csv(measure: AtomicMeasure, path) -> None:
    lines = [MEASURE_HEADER]
    for k in range(measure.n_atoms):
        lines.append(",".join([
            _f(measure.xy[k, 0]), _f(measure.xy[k, 1]), _f(measure.mass[k])]))
    _write_text(path, "\n".join(lines) + "\n")


def read_measure_csv(path) -> AtomicMeasure:
    rows = _read_rows(path, MEASURE_HEADER)
    xy = np.array([[float(r[0]), float(r[1])] for r in rows]).reshape(-1, 2)
    mass = np.array([float(r[2]) for r in rows])
    return AtomicMeasure(xy, mass)


def write_pv_trajectory_csv(traj: PVTrajectory, path) -> None:
    lines = [PV_TRAJECTORY_HEADER]
    for s in range(traj.times.shape[0]):
        for i in range(traj.positions.shape[1]):
            lines.append(",".join([
                _f(traj.times[s]), str(i),
                _f(traj.positions[s, i, 0]), _f(traj.positions[s, i, 1]),
                _f(traj.hamiltonian[s]),
                _f(traj.linear_impulse[s, 0]), _f(traj.linear_impulse[s, 1]),
                _f(traj.angular_impulse[s]), _f(traj.min_separation[s])]))
    _write_text(path, "\n".join(lines) + "\n")


def _write_text(path, text) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _read_rows(path, expected_header):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    if not lines or lines[0] != expected_header:
        raise ValueError(f"{path}: expected header {expected_header!r}")
    return [line.split(",") for line in lines[1:] if line]


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir, config_doc, started, finished,
                   version) -> str:
    """Inventory every file in the output directory (except the manifest
    itself) with size and checksum; returns the manifest path."""
    inventory = []
    for name in sorted(os.listdir(out_dir)):
        full = os.path.join(out_dir, name)
        if name == "manifest.json" or not os.path.isfile(full):
            continue
        inventory.append({
            "name": name,
            "bytes": os.path.getsize(full),
            "sha256": sha256_of(full),
        })
    manifest = {
        "artifact_version": version,
        "config": config_doc,
        "started_utc": started,
        "finished_utc": finished,
        "files": inventory,
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def sweep_summary_doc(result) -> dict:
    """JSON-serializable summary of a sweep (records live in the CSVs)."""
    doc = {
        "epsilons": result.epsilons,
        "tail_bound_ratios": [_json_float(r) for r in result.tail_ratios],
        "sup": {k: np.asarray(v).tolist() for k, v in result.sup.items()},
        "fits": {
            family: [{"slope": f.slope, "intercept": f.intercept,
                      "residual": f.residual} for f in fits]
            for family, fits in result.fits.items()
        },
        "runs": [],
    }
    for eps, run in zip(result.epsilons, result.runs):
        doc["runs"].append({
            "epsilon": eps,
            "dt": run.dt,
            "pitch": run.pitch,
            "blob_radius": run.blob_radius,
            "n_particles": run.n_particles,
            "n_records": len(run.records),
            "reached_horizon": run.reached_horizon,
            "separation_time": run.separation_time,
            "pv_separation_time": run.pv_separation_time,
            "collision_time": run.collision_time,
            "gronwall": [{"growth_rate": g.growth_rate,
                          "prefactor": g.prefactor,
                          "residual": g.residual} for g in run.gronwall],
            "threshold": {
                "alpha": run.threshold.alpha,
                "level": run.threshold.level,
                "crossing_times": run.threshold.crossing_times,
            },
        })
    return doc


def _json_float(x):
    x = float(x)
    return None if np.isnan(x) else x
