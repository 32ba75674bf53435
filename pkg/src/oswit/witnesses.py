"""Fidelity, OSD, CCNR and GME witnesses of the form ``W = offset * 1 - X``."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .operators import (
    Bipartition,
    HermitianOperator,
    as_bipartition,
    coefficient_matrix,
    enumerate_bipartitions,
    osd,
)

STATE_TOL = 1e-9


class WitnessKind(str, Enum):
    FIDELITY = "fidelity"
    OSD = "osd"
    SCHMIDT_NUMBER = "schmidt_number"
    GME = "gme"


class NotDetecting:
    """Visibility sentinel for a witness that never detects the target.

    Compares and converts like ``+inf`` so it ranks last.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __float__(self):
        return float("inf")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self or float(other) == float("inf")

    def __gt__(self, other):
        return other is not self and float(other) != float("inf")

    def __ge__(self, other):
        return True

    def __repr__(self):
        return "NOT_DETECTING"

    def __reduce__(self):
        return (NotDetecting, ())


NOT_DETECTING = NotDetecting()


@dataclass(frozen=True)
class GmeCertificate:
    per_bipartition_mu1: dict[str, float]
    critical: Bipartition

    def to_dict(self) -> dict:
        return {
            "per_bipartition_mu1": dict(self.per_bipartition_mu1),
            "critical": [list(self.critical.alpha), list(self.critical.complement)],
        }


@dataclass(frozen=True, eq=False)
class Witness:
    """``W = offset * 1 - observable``.

    ``heuristic`` marks witnesses whose offset came from a numerical lower
    bound; they must not be used to certify anything.
    """

    offset: float
    observable: HermitianOperator
    kind: WitnessKind
    k: int | None = None
    certificate: GmeCertificate | None = None
    bipartition: Bipartition | None = None
    heuristic: bool = field(default=False)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.observable.dims

    def matrix(self) -> np.ndarray:
        x = self.observable.data
        return self.offset * np.eye(x.shape[0]) - x

    def scaled(self, c: float) -> "Witness":
        if c <= 0:
            raise ValueError("scale must be positive")
        return Witness(self.offset * c, self.observable * c, self.kind, self.k,
                       self.certificate, self.bipartition, self.heuristic)

    def evaluate(self, rho) -> float:
        return evaluate(self, rho)


def _data(x) -> np.ndarray:
    return x.data if isinstance(x, HermitianOperator) else np.asarray(x, dtype=complex)


def check_state(rho, tol: float = STATE_TOL) -> None:
    """Raise ``ValueError`` unless ``rho`` is PSD with unit trace."""
    data = _data(rho)
    if np.linalg.norm(data - data.conj().T) > tol * max(1.0, np.linalg.norm(data)):
        raise ValueError("state is not Hermitian")
    tr = np.trace(data).real
    if abs(tr - 1) > tol:
        raise ValueError(f"state trace {tr:.12g} differs from 1")
    lo = np.linalg.eigvalsh((data + data.conj().T) / 2)[0]
    if lo < -tol:
        raise ValueError(f"state has negative eigenvalue {lo:.3e}")


def schmidt_coefficients(psi, dims, bp: Bipartition | None = None) -> np.ndarray:
    """Vector Schmidt coefficients of a pure state, decreasing."""
    psi = np.asarray(psi, dtype=complex).ravel()
    dims = tuple(dims)
    bp = as_bipartition(bp, dims)
    t = psi.reshape(dims).transpose(list(bp.alpha) + list(bp.complement))
    return np.linalg.svd(t.reshape(bp.m_alpha, bp.n_alpha_bar), compute_uv=False)


def _check_normalized(psi: np.ndarray) -> None:
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > 1e-9:
        raise ValueError(f"state vector has norm {norm:.12g}, expected 1")


def fidelity_witness(psi, dims, bp=None) -> Witness:
    """``s_1**2 * 1 - |psi><psi|``.

    With ``bp`` given the largest squared Schmidt coefficient across that
    split is used; otherwise the maximum over all bipartitions, which makes
    the result a GME witness for three or more parties.
    """
    psi = np.asarray(psi, dtype=complex).ravel()
    dims = tuple(dims)
    _check_normalized(psi)
    if bp is not None:
        bp = as_bipartition(bp, dims)
        bps = [bp]
    else:
        bps = enumerate_bipartitions(len(dims), dims)
    values = {str(b): float(schmidt_coefficients(psi, dims, b)[0] ** 2) for b in bps}
    crit = max(range(len(bps)), key=lambda i: (values[str(bps[i])], -i))
    x = HermitianOperator.from_ket(psi, dims, label="projector")
    cert = GmeCertificate(values, bps[crit]) if len(bps) > 1 else None
    return Witness(values[str(bps[crit])], x, WitnessKind.FIDELITY,
                   certificate=cert, bipartition=bps[crit])


def osd_witness(x: HermitianOperator, bp=None) -> Witness:
    bp = as_bipartition(bp, x.dims)
    dec = osd(x, bp)
    return Witness(dec.mu1, x, WitnessKind.OSD, bipartition=bp)


def ccnr_value(rho: HermitianOperator, bp=None) -> float:
    """Sum of the operator Schmidt coefficients; above 1 means entangled."""
    check_state(rho)
    return float(np.sum(osd(rho, as_bipartition(bp, rho.dims)).mu))


def ccnr_witness(rho: HermitianOperator, bp=None) -> Witness:
    """``offset * 1 - sum_i G_i^A (x) G_i^B`` built on the Schmidt operators of ``rho``.

    Only pairs above the effective-rank threshold enter; the offset is the
    leading coefficient of the resulting operator, recomputed rather than
    assumed to be one.
    """
    check_state(rho)
    bp = as_bipartition(bp, rho.dims)
    dec = osd(rho, bp)
    rank = dec.effective_rank()
    ones = np.zeros_like(dec.mu)
    ones[:rank] = 1.0
    x = dec.reconstruct(ones)
    x = HermitianOperator(x.data, x.dims, label="ccnr")
    return Witness(osd(x, bp).mu1, x, WitnessKind.OSD, bipartition=bp)


def bipartition_mu1(x: HermitianOperator, bps=None) -> dict[str, float]:
    if bps is None:
        bps = enumerate_bipartitions(x.n_parties, x.dims)
    return {str(b): float(np.linalg.norm(coefficient_matrix(x, b), 2)) for b in bps}


def gme_witness(x: HermitianOperator) -> Witness:
    """``mu * 1 - X`` with ``mu`` the largest leading coefficient over all bipartitions.

    Ties between bipartitions go to the lowest canonical index.
    """
    if x.n_parties < 3:
        return osd_witness(x)
    bps = enumerate_bipartitions(x.n_parties, x.dims)
    values = bipartition_mu1(x, bps)
    mus = np.array([values[str(b)] for b in bps])
    crit = int(np.flatnonzero(mus >= mus.max() - 1e-12)[0])
    return Witness(float(mus.max()), x, WitnessKind.GME,
                   certificate=GmeCertificate(values, bps[crit]), bipartition=bps[crit])


def evaluate(w: Witness, rho) -> float:
    """``offset * Tr(rho) - Tr(X rho)``."""
    data = _data(rho)
    if data.shape != w.observable.data.shape:
        raise ValueError(f"dimension mismatch: witness {w.observable.data.shape}, state {data.shape}")
    val = w.offset * np.trace(data) - np.vdot(w.observable.data.conj().T, data)
    if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
        raise ValueError(f"expectation value has imaginary part {val.imag:.3e}")
    return float(val.real)


def visibility(w: Witness, rho, sigma):
    """Smallest weight ``p`` of ``rho`` in ``p rho + (1-p) sigma`` still detected.

    Returns :data:`NOT_DETECTING` when ``Tr(W rho) >= 0``.
    """
    wr = evaluate(w, rho)
    ws = evaluate(w, sigma)
    if ws < -1e-9:
        raise ValueError(f"noise state is itself detected (Tr(W sigma) = {ws:.3e})")
    if wr >= 0:
        return NOT_DETECTING
    return ws / (ws - wr)
