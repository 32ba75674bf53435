"""Lower bounds on entanglement measures from the expectation value of an observable.

With ``S = max(Tr(rho X) / offset, 1)`` and ``m`` the relevant local
dimension, the bounds are

* CREN: ``(S - 1) / 2``
* concurrence: ``sqrt(2 / (m (m - 1))) (S - 1)``
* G-concurrence: ``S + 1 - m``
* geometric measure: ``1 - (sqrt(S) + sqrt((m - 1)(m - S)))**2 / m**2``

For a bipartition ``offset`` is the leading operator Schmidt coefficient of
``X`` and ``m`` the smaller local dimension. For genuine multipartite
entanglement ``offset`` is the GME witness offset and ``m`` the largest of
the per-bipartition values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .operators import HermitianOperator, as_bipartition, enumerate_bipartitions, osd
from .witnesses import check_state, gme_witness, schmidt_coefficients

MEASURES = ("CREN", "Concurrence", "GConcurrence", "GeometricMeasure")


class BoundContext(str, Enum):
    BIPARTITE = "bipartite"
    GME = "gme"


@dataclass(frozen=True)
class MeasureBoundReport:
    S: float
    m: int
    bounds: dict[str, float]
    context: BoundContext

    def to_dict(self) -> dict:
        return {"S": self.S, "m": self.m, "context": self.context.value, "bounds": dict(self.bounds)}

    @classmethod
    def from_dict(cls, data: dict) -> "MeasureBoundReport":
        return cls(float(data["S"]), int(data["m"]),
                   {k: float(v) for k, v in data["bounds"].items()},
                   BoundContext(data["context"]))


def _data(x) -> np.ndarray:
    return x.data if isinstance(x, HermitianOperator) else np.asarray(x, dtype=complex)


def s_value(rho, x, offset: float) -> float:
    """``max(Tr(rho X) / offset, 1)``."""
    if offset <= 0:
        raise ValueError("offset must be positive")
    val = np.vdot(_data(x).conj().T, _data(rho)).real
    return max(float(val) / offset, 1.0)


def bounds_from_s(s: float, m: int) -> dict[str, float]:
    if m < 2:
        raise ValueError("m must be at least 2")
    conc = math.sqrt(2 / (m * (m - 1))) * (s - 1)
    root = math.sqrt(max((m - 1) * (m - s), 0.0))
    geo = 1 - (math.sqrt(s) + root) ** 2 / m**2
    return {
        "CREN": (s - 1) / 2,
        "Concurrence": conc,
        "GConcurrence": s + 1 - m,
        "GeometricMeasure": max(geo, 0.0),
    }


def bipartite_bounds(rho, x: HermitianOperator, bp=None) -> MeasureBoundReport:
    check_state(rho)
    bp = as_bipartition(bp, x.dims)
    mu1 = osd(x, bp).mu1
    s = s_value(rho, x, mu1)
    m = bp.smaller_dim
    return MeasureBoundReport(s, m, bounds_from_s(s, m), BoundContext.BIPARTITE)


def gme_dimension(dims, largest_party: bool = False) -> int:
    """``max`` over bipartitions of the smaller side.

    ``largest_party=True`` gives the alternative convention, the largest
    single local dimension.
    """
    dims = tuple(dims)
    if largest_party:
        return max(dims)
    return max(b.smaller_dim for b in enumerate_bipartitions(len(dims), dims))


def gme_bounds(rho, x: HermitianOperator, largest_party: bool = False) -> MeasureBoundReport:
    if x.n_parties < 3:
        raise ValueError("GME bounds need at least three parties")
    check_state(rho)
    mu = gme_witness(x).offset
    s = s_value(rho, x, mu)
    m = gme_dimension(x.dims, largest_party)
    return MeasureBoundReport(s, m, bounds_from_s(s, m), BoundContext.GME)


def pure_state_oracle(psi, dims, bp=None, measure: str = "Concurrence") -> float:
    """Exact value of a measure on a pure state, from its Schmidt vector."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if abs(np.linalg.norm(psi) - 1) > 1e-9:
        raise ValueError("state vector is not normalized")
    dims = tuple(dims)
    bp = as_bipartition(bp, dims)
    s = schmidt_coefficients(psi, dims, bp)
    m = bp.smaller_dim
    s = np.concatenate([s, np.zeros(max(0, m - len(s)))])[:m]
    if measure == "Concurrence":
        return math.sqrt(max(2 * (1 - float(np.sum(s**4))), 0.0))
    if measure == "CREN":
        return (float(np.sum(s)) ** 2 - 1) / 2
    if measure == "GConcurrence":
        return m * float(np.prod(s**2)) ** (1 / m)
    if measure == "GeometricMeasure":
        return 1 - float(s[0]) ** 2
    raise ValueError(f"unknown measure {measure!r}; choose from {MEASURES}")


def min_bipartite_concurrence(psi, dims) -> float:
    dims = tuple(dims)
    return min(pure_state_oracle(psi, dims, b, "Concurrence")
               for b in enumerate_bipartitions(len(dims), dims))
