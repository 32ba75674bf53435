"""JSON and CSV serialization.

Matrices are stored as ``{"dims": [...], "re": [[...]], "im": [[...]]}`` in
row-major order. Python's ``repr`` of a float round-trips exactly, so files
reload bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .measures import MeasureBoundReport
from .operators import Bipartition, HermitianOperator
from .optimizer import OptimizerConfig, read_trace_csv, write_trace_csv
from .witnesses import GmeCertificate, Witness, WitnessKind

__all__ = [
    "matrix_to_dict", "matrix_from_dict", "save_matrix", "load_matrix",
    "witness_to_dict", "witness_from_dict", "save_witness", "load_witness",
    "save_config", "load_config", "save_report", "load_report",
    "write_trace_csv", "read_trace_csv",
]


def matrix_to_dict(op: HermitianOperator) -> dict:
    return {
        "dims": list(op.dims),
        "re": op.data.real.tolist(),
        "im": op.data.imag.tolist(),
    }


def matrix_from_dict(data: dict, label: str = "") -> HermitianOperator:
    try:
        dims = tuple(int(d) for d in data["dims"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from None
    if re.shape != im.shape:
        raise ValueError("real and imaginary parts differ in shape")
    return HermitianOperator(re + 1j * im, dims, label=label)


def _dump(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def save_matrix(op: HermitianOperator, path) -> None:
    _dump(matrix_to_dict(op), path)


def load_matrix(path) -> HermitianOperator:
    return matrix_from_dict(json.loads(Path(path).read_text()), label=Path(path).stem)


def witness_to_dict(w: Witness) -> dict:
    out = {
        "kind": w.kind.value,
        "offset": float(w.offset),
        "observable": matrix_to_dict(w.observable),
        "certificate": w.certificate.to_dict() if w.certificate else None,
    }
    if w.k is not None:
        out["k"] = w.k
    if w.bipartition is not None:
        out["bipartition"] = [list(w.bipartition.alpha), list(w.bipartition.complement)]
    if w.heuristic:
        out["heuristic"] = True
    return out


def witness_from_dict(data: dict) -> Witness:
    obs = matrix_from_dict(data["observable"])
    bp = None
    if data.get("bipartition"):
        bp = Bipartition(tuple(data["bipartition"][0]), obs.dims)
    cert = None
    if data.get("certificate"):
        c = data["certificate"]
        cert = GmeCertificate(dict(c["per_bipartition_mu1"]),
                              Bipartition(tuple(c["critical"][0]), obs.dims))
    return Witness(float(data["offset"]), obs, WitnessKind(data["kind"]), k=data.get("k"),
                   certificate=cert, bipartition=bp, heuristic=bool(data.get("heuristic", False)))


def save_witness(w: Witness, path) -> None:
    _dump(witness_to_dict(w), path)


def load_witness(path) -> Witness:
    return witness_from_dict(json.loads(Path(path).read_text()))


def save_config(cfg: OptimizerConfig, path) -> None:
    _dump(cfg.to_dict(), path)


def load_config(path) -> OptimizerConfig:
    return OptimizerConfig.from_dict(json.loads(Path(path).read_text()))


def save_report(report: MeasureBoundReport, path) -> None:
    _dump(report.to_dict(), path)


def load_report(path) -> MeasureBoundReport:
    return MeasureBoundReport.from_dict(json.loads(Path(path).read_text()))
