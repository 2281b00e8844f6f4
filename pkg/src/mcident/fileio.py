"""JSON file formats and report emission.

Formats (all JSON):
  matrix      {"d": n, "rows": [[...], ...]}         row-stochastic, 1e-8
  probvector  {"d": n, "p": [...]}
  trajectory  {"d": n, "states": [...]}              states are 1-based
  samples     {"d": K, "samples": [...]}             symbols are 1-based

Rows are validated at 1e-8 and then renormalized exactly, so files produced
by other tools with print-rounded floats still load. All numbers in emitted
reports are rounded to 12 significant digits, which keeps reports
byte-identical across runs with the same manifest.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from .chain_core import ProbVector, TransitionMatrix
from .errors import MalformedDistribution, MalformedMatrix
from .sampling import Trajectory

_FILE_TOL = 1e-8


def load_matrix(path) -> TransitionMatrix:
    doc = _read(path)
    rows = np.asarray(doc.get("rows"), dtype=float)
    d = int(doc.get("d", -1))
    if rows.ndim != 2 or rows.shape != (d, d):
        raise MalformedMatrix(f"{path}: rows shape {rows.shape} does not match d={d}")
    sums = rows.sum(axis=1)
    if np.abs(sums - 1.0).max() > _FILE_TOL or rows.min() < -_FILE_TOL:
        raise MalformedMatrix(f"{path}: rows must sum to 1 within {_FILE_TOL}")
    rows = np.clip(rows, 0.0, None)
    return TransitionMatrix(rows / rows.sum(axis=1, keepdims=True))


def save_matrix(P: TransitionMatrix, path) -> None:
    _write(path, {"d": P.d, "rows": [[float(x) for x in row] for row in P.entries]})


def load_probvector(path) -> ProbVector:
    doc = _read(path)
    p = np.asarray(doc.get("p"), dtype=float)
    d = int(doc.get("d", -1))
    if p.ndim != 1 or p.shape[0] != d:
        raise MalformedDistribution(f"{path}: p shape {p.shape} does not match d={d}")
    if abs(p.sum() - 1.0) > _FILE_TOL or p.min() < -_FILE_TOL:
        raise MalformedDistribution(f"{path}: p must sum to 1 within {_FILE_TOL}")
    p = np.clip(p, 0.0, None)
    return ProbVector(p / p.sum())


def save_probvector(p: ProbVector, path) -> None:
    _write(path, {"d": p.d, "p": [float(x) for x in p.entries]})


def load_trajectory(path) -> Trajectory:
    doc = _read(path)
    states = np.asarray(doc.get("states"), dtype=np.int64)
    d = int(doc.get("d", -1))
    return Trajectory(d=d, states=states - 1)


def save_trajectory(traj: Trajectory, path) -> None:
    _write(path, {"d": traj.d, "states": [int(s) + 1 for s in traj.states]})


def load_samples(path) -> tuple[int, list]:
    """Integer-alphabet samples; returns (alphabet size, 0-based symbols)."""
    doc = _read(path)
    d = int(doc.get("d", -1))
    return d, [int(s) - 1 for s in doc.get("samples", [])]


def save_samples(d: int, samples, path) -> None:
    _write(path, {"d": d, "samples": [int(s) + 1 for s in samples]})


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def round12(obj):
    """Recursively round floats to 12 significant digits for stable output."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round12(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def write_report(doc: dict, path=None) -> str:
    """Serialize a report deterministically; write to path or stdout."""
    text = json.dumps(round12(doc), indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


def _read(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _write(path, doc) -> None:
    Path(path).write_text(json.dumps(round12(doc), indent=2, sort_keys=True) + "\n")
