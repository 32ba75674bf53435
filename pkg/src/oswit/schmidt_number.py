"""Offsets ``lambda_k`` for witnesses of Schmidt number ``k``.

A witness ``lambda_k * 1 - X`` must be nonnegative on every pure state of
Schmidt rank ``k - 1``. For such a state with Schmidt vector ``s`` the
operator Schmidt coefficients of its projector are the products
``s_a * s_b``, so ``lambda_k`` is the maximum of ``sum_j mu_j tau_j`` with
``tau`` the decreasing arrangement of those products.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .operators import HermitianOperator, as_bipartition, osd
from .witnesses import Witness, WitnessKind, check_state

log = logging.getLogger(__name__)

CLOSED_FORM_KS = (2, 3, 4)


class LambdaMethod(str, Enum):
    CLOSED_FORM_3 = "closed-form-3"
    EIGEN_MATRICES_4 = "eigen-matrices-4"
    BRUTE_FORCE = "brute-force"
    LEADING = "leading"


@dataclass(frozen=True)
class SchmidtNumberCoefficient:
    k: int
    value: float
    method: LambdaMethod

    def __float__(self):
        return self.value


def _prepare_mu(mu, k: int) -> np.ndarray:
    mu = np.asarray(mu, dtype=float).ravel()
    if np.any(mu < -1e-12):
        raise ValueError("coefficients must be nonnegative")
    if np.any(np.diff(mu) > 1e-12):
        raise ValueError("coefficients must be sorted in decreasing order")
    need = (k - 1) ** 2
    if len(mu) < need:
        log.debug("zero-padding %d coefficients to %d", len(mu), need)
        mu = np.concatenate([mu, np.zeros(need - len(mu))])
    return np.clip(mu, 0.0, None)


def _max_eig_sym(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh((m + m.T) / 2)[-1])


def lambda_k(mu, k: int) -> SchmidtNumberCoefficient:
    """Closed-form ``lambda_k`` for ``k`` in ``{2, 3, 4}``.

    Parameters
    ----------
    mu : array_like
        Operator Schmidt coefficients, decreasing and nonnegative. Shorter
        vectors are padded with zeros.
    k : int
        Schmidt number to certify.

    Returns
    -------
    SchmidtNumberCoefficient
    """
    if k not in CLOSED_FORM_KS:
        raise ValueError(f"no closed form for k={k}; use lambda_k_bruteforce (lower bound only)")
    mu = _prepare_mu(mu, k)
    if k == 2:
        return SchmidtNumberCoefficient(2, float(mu[0]), LambdaMethod.LEADING)
    if k == 3:
        m1, m2, m3, m4 = mu[:4]
        val = (m1 + m4 + math.sqrt((m1 - m4) ** 2 + (m2 + m3) ** 2)) / 2
        return SchmidtNumberCoefficient(3, float(val), LambdaMethod.CLOSED_FORM_3)
    u = np.concatenate([[0.0], mu[:9]])  # 1-based
    first = np.array([[u[1], u[2], u[4]], [u[3], u[6], u[7]], [u[5], u[8], u[9]]])
    second = np.array([[u[1], u[2], u[5]], [u[3], u[4], u[7]], [u[6], u[8], u[9]]])
    val = max(_max_eig_sym(first), _max_eig_sym(second))
    return SchmidtNumberCoefficient(4, val, LambdaMethod.EIGEN_MATRICES_4)


def _objective(mu: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``sum_j mu_j tau_j`` for each row of ``s``."""
    prods = (s[:, :, None] * s[:, None, :]).reshape(len(s), -1)
    tau = -np.sort(-prods, axis=1)
    return tau @ mu[: tau.shape[1]]


def _from_angles(theta: np.ndarray) -> np.ndarray:
    """Hyperspherical coordinates in ``[0, pi/2]`` to points of the positive orthant."""
    n = theta.shape[1] + 1
    out = np.ones((len(theta), n))
    for j in range(n - 1):
        out[:, j] *= np.cos(theta[:, j])
        out[:, j + 1:] *= np.sin(theta[:, j])[:, None]
    return out


def lambda_k_bruteforce(mu, k: int, grid: float = 0.01, *, max_points: int = 2_000_000,
                        return_argmax: bool = False):
    """Numerical ``lambda_k`` by grid search plus coordinate ascent.

    The search runs over Schmidt vectors of length ``k - 1`` on the positive
    part of the unit sphere, parameterized by angles in ``[0, pi/2]``. The
    result never exceeds the true maximum, so a witness built on it is only
    heuristic.

    Parameters
    ----------
    mu : array_like
        Decreasing nonnegative coefficients.
    k : int
        Schmidt number, at least 2.
    grid : float
        Angular resolution as a fraction of ``pi/2``, in ``(0, 0.1]``.
    max_points : int
        Cap on the number of grid points; the resolution is coarsened to fit.
    return_argmax : bool
        Also return the maximizing Schmidt vector, sorted decreasingly.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if not 0 < grid <= 0.1:
        raise ValueError("grid resolution must lie in (0, 0.1]")
    mu = _prepare_mu(mu, k)
    n = k - 1
    if n == 1:
        s = np.ones(1)
        return (float(mu[0]), s) if return_argmax else float(mu[0])
    per_axis = int(math.ceil(1 / grid)) + 1
    per_axis = min(per_axis, max(2, int(max_points ** (1 / (n - 1)))))
    axis = np.linspace(0, math.pi / 2, per_axis)
    best_val, best_theta = -np.inf, None
    for chunk in _chunked_grid(axis, n - 1):
        vals = _objective(mu, _from_angles(chunk))
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_theta = float(vals[i]), chunk[i].copy()
    step = (math.pi / 2) / (per_axis - 1)
    theta = best_theta
    for _ in range(50):
        for j in range(n - 1):
            trial = np.repeat(theta[None, :], 3, axis=0)
            trial[:, j] += np.array([-step, 0.0, step])
            trial[:, j] = np.clip(trial[:, j], 0, math.pi / 2)
            vals = _objective(mu, _from_angles(trial))
            i = int(np.argmax(vals))
            if vals[i] > best_val:
                best_val = float(vals[i])
            theta = trial[i]
        step *= 0.7
    s = -np.sort(-_from_angles(theta[None, :])[0])
    return (best_val, s) if return_argmax else best_val


def _chunked_grid(axis: np.ndarray, ndim: int, chunk: int = 200_000):
    total = len(axis) ** ndim
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        coords = np.stack(np.unravel_index(idx, (len(axis),) * ndim), axis=1)
        yield axis[coords]


def bruteforce_coefficient(mu, k: int, grid: float = 0.01) -> SchmidtNumberCoefficient:
    return SchmidtNumberCoefficient(k, lambda_k_bruteforce(mu, k, grid), LambdaMethod.BRUTE_FORCE)


def sn_witness(x: HermitianOperator, bp=None, k: int = 3, *, allow_heuristic: bool = False,
               grid: float = 0.01) -> Witness:
    """``lambda_k * 1 - X``; a negative expectation certifies Schmidt number ``k``.

    ``k`` above 4 requires ``allow_heuristic=True`` and yields a witness with
    a brute-force offset, flagged ``heuristic``.
    """
    bp = as_bipartition(bp, x.dims)
    mu = osd(x, bp).mu
    if k in CLOSED_FORM_KS:
        coeff = lambda_k(mu, k)
        heuristic = False
    elif allow_heuristic:
        log.warning("k=%d offset is a numerical lower bound; witness is heuristic", k)
        coeff = bruteforce_coefficient(mu, k, grid)
        heuristic = True
    else:
        raise ValueError(f"k={k} has no closed form; pass allow_heuristic=True")
    kind = WitnessKind.OSD if k == 2 else WitnessKind.SCHMIDT_NUMBER
    return Witness(coeff.value, x, kind, k=k, bipartition=bp, heuristic=heuristic)


def extended_ccnr_sn_check(rho: HermitianOperator, bp=None, k: int = 3) -> bool:
    """True when ``sum(mu) > k - 1``, which rules out Schmidt number ``k - 1``."""
    check_state(rho)
    if k < 2:
        raise ValueError("k must be at least 2")
    return bool(np.sum(osd(rho, as_bipartition(bp, rho.dims)).mu) > k - 1)


def ordered_products(s) -> np.ndarray:
    """Decreasing products ``s_a s_b``: the coefficients of ``|psi><psi|``."""
    s = np.asarray(s, dtype=float)
    return -np.sort(-np.array([a * b for a, b in itertools.product(s, s)]))
