"""Gradient descent on OSD witnesses.

Two moves are available on the working bipartition:

* coefficient steps: ``mu_i <- mu_i - eps * v_i`` with fixed Schmidt operators;
* operator steps: an infinitesimal ``SO(N)`` rotation of the Schmidt operators
  on one side, ``G_i <- G_i - eps * sum_l v_l sum_k g^(l)_ik G_k``.

``v`` is always the normalized gradient of the required visibility. After
every move the operator is rescaled to its initial trace and the offset is
recomputed from a fresh decomposition over every bipartition, so each iterate
is a valid witness.

For three or more parties the offset is the maximum leading coefficient over
all bipartitions. When several bipartitions are within ``tie_tolerance`` of
that maximum, the offset derivative is averaged over them; with
``tie_tolerance=0`` only the critical bipartition enters and the gradients
reduce to the closed forms in :func:`grad_visibility_wrt_mu` and
:func:`grad_visibility_wrt_rotation`.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np

from .operators import (
    DEFAULT_PERTURBATION_SEED,
    Bipartition,
    HermitianOperator,
    OperatorSchmidtDecomposition,
    as_bipartition,
    coefficient_matrix,
    complete_columns,
    enumerate_bipartitions,
    operator_from_coefficients,
)
from .states import random_density
from .witnesses import (
    NOT_DETECTING,
    GmeCertificate,
    Witness,
    WitnessKind,
    visibility,
)

log = logging.getLogger(__name__)

ORTHO_RESIDUAL = 1e-8


class Schedule(str, Enum):
    OSC_ONLY = "osc-only"
    OPS_ONLY = "ops-only"
    ALTERNATING = "alternating"
    TWO_PHASE = "two-phase"


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings of one optimization run.

    ``max_iters`` bounds the main loop; for the two-phase schedule the first
    coefficient-only stage is bounded separately by ``phase_one_iters`` and
    ends early once its best visibility has not improved for
    ``phase_one_patience`` iterations.
    """

    step_size: float = 1e-3
    max_iters: int = 100_000
    convergence_tol: float = 1e-8
    convergence_window: int = 100
    perturbation_eps: float = 1e-4
    seed: int = DEFAULT_PERTURBATION_SEED
    schedule: Schedule = Schedule.ALTERNATING
    tie_tolerance: float = 1e-3
    phase_one_iters: int = 2000
    phase_one_patience: int = 500

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.perturbation_eps < 0:
            raise ValueError("perturbation_eps must be nonnegative")
        if self.max_iters < 0 or self.phase_one_iters < 0:
            raise ValueError("iteration counts must be nonnegative")
        if self.tie_tolerance < 0:
            raise ValueError("tie_tolerance must be nonnegative")
        object.__setattr__(self, "schedule", Schedule(self.schedule))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["schedule"] = self.schedule.value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "OptimizerConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown optimizer settings: {sorted(unknown)}")
        return cls(**data)


def so_generators(n: int) -> np.ndarray:
    """Antisymmetric generators of ``SO(n)``, shape ``(n(n-1)/2, n, n)``.

    Generator ``l`` has ``+1`` at ``(p, q)`` and ``-1`` at ``(q, p)``, with the
    pairs ``p < q`` enumerated row by row.
    """
    if n < 2:
        raise ValueError("SO(n) generators need n >= 2")
    p, q = np.triu_indices(n, 1)
    gens = np.zeros((len(p), n, n))
    idx = np.arange(len(p))
    gens[idx, p, q] = 1.0
    gens[idx, q, p] = -1.0
    return gens


def _data(x) -> np.ndarray:
    return x.data if isinstance(x, HermitianOperator) else np.asarray(x, dtype=complex)


def grad_visibility_wrt_mu(decomp: OperatorSchmidtDecomposition, rho, sigma) -> np.ndarray:
    """Gradient of the visibility with respect to the Schmidt coefficients.

    The offset is taken to be the first coefficient and the Schmidt operators
    are held fixed.
    """
    mu = decomp.mu
    r = decomp.pair_expectations(rho)
    s = decomp.pair_expectations(sigma)
    denom = float(mu @ (r - s))
    if abs(denom) < 1e-300:
        raise ZeroDivisionError("Tr(W rho) equals Tr(W sigma); perturb the inputs")
    delta = np.zeros_like(mu)
    delta[0] = 1.0
    return ((delta - s) * denom - (r - s) * (mu[0] - mu @ s)) / denom**2


def _rotation_terms(mu, u_full, v, coeff) -> np.ndarray:
    """Derivative of ``sum_i mu_i Tr[(G_i^A (x) G_i^B) Y]`` along every generator.

    ``coeff`` is the coefficient matrix of ``Y``; the result is the
    antisymmetric matrix whose ``(p, q)`` entry with ``p < q`` belongs to the
    generator with ``+1`` at ``(p, q)``.
    """
    n = u_full.shape[0]
    s = len(mu)
    t = u_full.T @ coeff @ v
    a = np.zeros((n, n))
    a[:s, :] = mu[:, None] * t[:, :s].T
    return a - a.T


def grad_visibility_wrt_rotation(decomp: OperatorSchmidtDecomposition, rho, sigma,
                                 side: str = "A") -> np.ndarray:
    """Gradient of the visibility with respect to the rotation parameters of one side.

    The Schmidt operators of ``side`` are completed to a full orthonormal
    basis first; the result has one entry per generator of
    :func:`so_generators` of that basis size. The offset is held fixed.
    """
    bp = decomp.bipartition
    u, v = decomp.coeffs_a, decomp.coeffs_b
    pr, ps = coefficient_matrix(rho, bp), coefficient_matrix(sigma, bp)
    if side.upper() == "B":
        u, v, pr, ps = v, u, pr.T, ps.T
    elif side.upper() != "A":
        raise ValueError("side must be 'A' or 'B'")
    mu = decomp.mu
    u_full = complete_columns(u)
    r_tilde = float(np.einsum("i,ai,ab,bi->", mu, u, pr, v))
    s_tilde = float(np.einsum("i,ai,ab,bi->", mu, u, ps, v))
    iu = np.triu_indices(u_full.shape[0], 1)
    r_xi = _rotation_terms(mu, u_full, v, pr)[iu]
    s_xi = _rotation_terms(mu, u_full, v, ps)[iu]
    denom = r_tilde - s_tilde
    if abs(denom) < 1e-300:
        raise ZeroDivisionError("Tr(W rho) equals Tr(W sigma); perturb the inputs")
    return (denom * (-s_xi) - (r_xi - s_xi) * (mu[0] - s_tilde)) / denom**2


@dataclass
class TraceRecord:
    index: int
    p_crit: float
    step_kind: str
    mu1: float
    critical_bipartition: str

    @property
    def detecting(self) -> bool:
        return math.isfinite(self.p_crit)


@dataclass
class OptimizationTrace:
    """Per-iteration history plus the best witness encountered."""

    iterations: list[TraceRecord]
    final_witness: Witness
    best_p: float | object
    initial_p: float | object
    final_visibility: float | object
    phase_boundary: int | None = None
    converged: bool = False
    config: OptimizerConfig = field(default_factory=OptimizerConfig)

    @property
    def p_values(self) -> np.ndarray:
        return np.array([r.p_crit for r in self.iterations])

    def first_iteration_below(self, threshold: float) -> int | None:
        for rec in self.iterations:
            if rec.p_crit <= threshold:
                return rec.index
        return None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            write_trace_csv(self.iterations, fh)


TRACE_COLUMNS = ("iter", "p_crit", "mu1", "step_kind", "critical_bipartition")


def write_trace_csv(records, fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(TRACE_COLUMNS)
    for r in records:
        p = repr(float(r.p_crit)) if math.isfinite(r.p_crit) else "not_detecting"
        writer.writerow([r.index, p, repr(float(r.mu1)), r.step_kind, r.critical_bipartition])


def read_trace_csv(fh) -> list[TraceRecord]:
    reader = csv.DictReader(fh)
    if tuple(reader.fieldnames or ()) != TRACE_COLUMNS:
        raise ValueError(f"unexpected trace columns {reader.fieldnames}")
    out = []
    for row in reader:
        p = float("inf") if row["p_crit"] == "not_detecting" else float(row["p_crit"])
        out.append(TraceRecord(int(row["iter"]), p, row["step_kind"], float(row["mu1"]),
                               row["critical_bipartition"]))
    return out


class _Problem:
    """Cached data of one run: states, bipartitions and their coefficient matrices."""

    def __init__(self, rho: np.ndarray, sigma: np.ndarray, dims, bps, tie_tolerance: float,
                 rho_eval: np.ndarray | None = None, sigma_eval: np.ndarray | None = None):
        self.rho = rho
        self.sigma = sigma
        self.rho_eval = rho if rho_eval is None else rho_eval
        self.sigma_eval = sigma if sigma_eval is None else sigma_eval
        self.dims = tuple(dims)
        self.bps = list(bps)
        self.tie_tolerance = tie_tolerance
        self.p_rho = [coefficient_matrix(rho, b) for b in self.bps]
        self.p_sigma = [coefficient_matrix(sigma, b) for b in self.bps]

    def analyze(self, x: np.ndarray) -> "_Snapshot":
        svds = []
        for b in self.bps:
            u, s, vt = np.linalg.svd(coefficient_matrix(x, b), full_matrices=False)
            svds.append((u, s, vt.T))
        mus = np.array([s[0] for _, s, _ in svds])
        top = mus.max()
        crit = int(np.flatnonzero(mus >= top - 1e-12)[0])
        xt = x.conj().T
        r = float(np.vdot(xt, self.rho).real)
        s = float(np.vdot(xt, self.sigma).real)
        r_eval = float(np.vdot(xt, self.rho_eval).real)
        s_eval = float(np.vdot(xt, self.sigma_eval).real)
        return _Snapshot(svds, mus, crit, float(top), r, s, r_eval, s_eval)

    def offset_gradient(self, snap: "_Snapshot") -> np.ndarray:
        """Dense derivative of the offset, averaged over near-critical bipartitions."""
        cutoff = snap.mu * (1 - self.tie_tolerance) if self.tie_tolerance else snap.mu
        active = [snap.critical] + [j for j in range(len(self.bps))
                                    if j != snap.critical and snap.mus[j] >= cutoff]
        grad = np.zeros_like(self.rho)
        for j in active:
            u, _, v = snap.svds[j]
            grad += operator_from_coefficients(np.outer(u[:, 0], v[:, 0]), self.bps[j])
        return grad / len(active)

    def objective_gradient(self, snap: "_Snapshot") -> np.ndarray:
        """Dense gradient of the visibility, or of the detection surrogate.

        With ``a = Tr(W sigma)`` and ``b = Tr(W rho)`` the visibility is
        ``a / (a - b)``; before detection (``b >= 0``) ``b / a`` is minimized.
        """
        dmu = self.offset_gradient(snap)
        a, b = snap.mu - snap.s, snap.mu - snap.r
        da, db = dmu - self.sigma, dmu - self.rho
        if b < 0:
            return (da * (a - b) - a * (da - db)) / (a - b) ** 2
        return (db * a - b * da) / a**2


@dataclass
class _Snapshot:
    svds: list
    mus: np.ndarray
    critical: int
    mu: float
    r: float
    s: float
    r_eval: float
    s_eval: float

    @property
    def p(self) -> float:
        """Visibility on the unperturbed states."""
        a, b = self.mu - self.s_eval, self.mu - self.r_eval
        return a / (a - b) if b < 0 else float("inf")

    @property
    def score(self) -> float:
        """Visibility extended past the detection boundary, for ranking iterates."""
        a, b = self.mu - self.s_eval, self.mu - self.r_eval
        if a - b <= 0:
            return float("inf")
        return a / (a - b)


def _normalizer(x0: np.ndarray):
    tr = float(np.trace(x0).real)
    norm = float(np.linalg.norm(x0))
    if abs(tr) > 1e-8 * norm:
        return lambda x: x * (tr / float(np.trace(x).real))
    return lambda x: x * (norm / float(np.linalg.norm(x)))


def _osc_move(problem: _Problem, snap: _Snapshot, step: float) -> np.ndarray:
    bp = problem.bps[snap.critical]
    u, mu, v = snap.svds[snap.critical]
    grad = coefficient_matrix(problem.objective_gradient(snap), bp)
    g = np.einsum("ai,ab,bi->i", u, grad, v)
    norm = np.linalg.norm(g)
    if norm == 0:
        return None
    return operator_from_coefficients((u * (mu - step * g / norm)) @ v.T, bp)


def _orthonormalize(q: np.ndarray) -> np.ndarray:
    gram_resid = np.max(np.abs(q.T @ q - np.eye(q.shape[1])))
    if gram_resid <= ORTHO_RESIDUAL:
        return q
    qq, r = np.linalg.qr(q)
    return qq * np.sign(np.diag(r))


def _ops_move(problem: _Problem, snap: _Snapshot, side: str, step: float) -> np.ndarray:
    bp = problem.bps[snap.critical]
    u, mu, v = snap.svds[snap.critical]
    grad = coefficient_matrix(problem.objective_gradient(snap), bp)
    if side == "B":
        u, v, grad = v, u, grad.T
    u_full = complete_columns(u)
    n = u_full.shape[0]
    iu = np.triu_indices(n, 1)
    g = _rotation_terms(mu, u_full, v, grad)[iu]
    norm = np.linalg.norm(g)
    if norm == 0:
        return None
    omega = np.zeros((n, n))
    omega[iu] = g / norm
    omega -= omega.T
    rotated = _orthonormalize(u_full @ (np.eye(n) - step * omega).T)
    c = (rotated[:, : len(mu)] * mu) @ v.T
    if side == "B":
        c = c.T
    return operator_from_coefficients(c, bp)


def _as_problem(x0, rho, sigma, bps, config: OptimizerConfig):
    x0d, rhod, sigmad = _data(x0), _data(rho), _data(sigma)
    d = x0d.shape[0]
    if rhod.shape != (d, d) or sigmad.shape != (d, d):
        raise ValueError("x0, rho and sigma must have the same dimension")
    rho_p, sigma_p = rhod, sigmad
    if config.perturbation_eps:
        noise = random_density(d, seed=config.seed).data
        e = config.perturbation_eps
        rho_p = (1 - e) * rhod + e * noise
        sigma_p = (1 - e) * sigmad + e * noise
    return x0d, _Problem(rho_p, sigma_p, bps[0].dims, bps, config.tie_tolerance, rhod, sigmad)


def step_osc(x, rho, sigma, config: OptimizerConfig = OptimizerConfig(), bp=None) -> HermitianOperator:
    """One coefficient update on ``bp`` (default: the critical bipartition).

    Inputs are used as given; no perturbation is applied. The result has the
    same trace as ``x``.
    """
    problem, snap = _single_step_problem(x, rho, sigma, config, bp)
    new = _osc_move(problem, snap, config.step_size)
    if new is None:
        return x
    return HermitianOperator(_normalizer(x.data)(new), x.dims, check=False)


def step_ops(x, rho, sigma, side: str = "A", config: OptimizerConfig = OptimizerConfig(),
             bp=None) -> HermitianOperator:
    """One Schmidt-operator rotation on ``side`` of ``bp`` (default: critical)."""
    side = side.upper()
    if side not in ("A", "B"):
        raise ValueError("side must be 'A' or 'B'")
    problem, snap = _single_step_problem(x, rho, sigma, config, bp)
    new = _ops_move(problem, snap, side, config.step_size)
    if new is None:
        return x
    return HermitianOperator(_normalizer(x.data)(new), x.dims, check=False)


def _single_step_problem(x, rho, sigma, config, bp):
    if bp is not None:
        bps = [as_bipartition(bp, x.dims)]
    elif x.n_parties == 2:
        bps = [Bipartition((0,), x.dims)]
    else:
        bps = enumerate_bipartitions(x.n_parties, x.dims)
    problem = _Problem(_data(rho), _data(sigma), x.dims, bps, config.tie_tolerance)
    return problem, problem.analyze(x.data)


def _run(x0, rho, sigma, bps, config: OptimizerConfig, kind: WitnessKind) -> OptimizationTrace:
    x, problem = _as_problem(x0, rho, sigma, bps, config)
    normalize = _normalizer(x)
    eps = config.step_size
    snap = problem.analyze(x)
    records: list[TraceRecord] = []
    best = {"score": snap.score, "x": x.copy()}
    initial_p = snap.p

    def record(index, kind_label, snap):
        records.append(TraceRecord(index, snap.p, kind_label, snap.mu,
                                   str(problem.bps[snap.critical])))

    def consider(x, snap):
        if snap.score < best["score"]:
            best["score"] = snap.score
            best["x"] = x.copy()

    def apply(x, snap, move):
        new = move(problem, snap)
        if new is None:
            return x, snap
        new = normalize(new)
        new_snap = problem.analyze(new)
        consider(new, new_snap)
        return new, new_snap

    osc = lambda pr, sn: _osc_move(pr, sn, eps)
    ops_a = lambda pr, sn: _ops_move(pr, sn, "A", eps)
    ops_b = lambda pr, sn: _ops_move(pr, sn, "B", eps)
    moves = {
        Schedule.OSC_ONLY: ("osc", [osc]),
        Schedule.OPS_ONLY: ("ops", [ops_a, ops_b]),
        Schedule.ALTERNATING: ("osc+ops", [osc, ops_a, ops_b]),
    }

    record(0, "start", snap)
    index = 0
    phase_boundary = None
    if config.schedule is Schedule.TWO_PHASE:
        stale = 0
        for _ in range(config.phase_one_iters):
            before = best["score"]
            x, snap = apply(x, snap, osc)
            index += 1
            record(index, "osc", snap)
            stale = stale + 1 if best["score"] >= before * (1 - config.convergence_tol) else 0
            if stale >= config.phase_one_patience:
                break
        phase_boundary = index
        x = best["x"].copy()
        snap = problem.analyze(x)
        label, seq = moves[Schedule.ALTERNATING]
    else:
        label, seq = moves[config.schedule]

    converged = False
    quiet = 0
    prev = snap.p
    for _ in range(config.max_iters):
        for move in seq:
            x, snap = apply(x, snap, move)
        index += 1
        record(index, label, snap)
        cur = snap.p
        if math.isfinite(cur) and math.isfinite(prev) and abs(cur - prev) <= config.convergence_tol * abs(prev):
            quiet += 1
            if quiet >= config.convergence_window:
                converged = True
                break
        else:
            quiet = 0
        prev = cur

    best_x = best["x"]
    witness = _witness_for(best_x, problem, kind)
    final_vis = visibility(witness, rho, sigma)
    best_snap = problem.analyze(best_x)
    log.info("optimization finished after %d iterations, best p=%s", index, best_snap.p)
    return OptimizationTrace(
        iterations=records,
        final_witness=witness,
        best_p=best_snap.p if math.isfinite(best_snap.p) else NOT_DETECTING,
        initial_p=initial_p if math.isfinite(initial_p) else NOT_DETECTING,
        final_visibility=final_vis,
        phase_boundary=phase_boundary,
        converged=converged,
        config=config,
    )


def _witness_for(x: np.ndarray, problem: _Problem, kind: WitnessKind) -> Witness:
    x = (x + x.conj().T) / 2
    op = HermitianOperator(x, problem.dims, label="optimized", check=False)
    snap = problem.analyze(x)
    bp = problem.bps[snap.critical]
    cert = None
    if len(problem.bps) > 1:
        cert = GmeCertificate({str(b): float(m) for b, m in zip(problem.bps, snap.mus)}, bp)
    return Witness(snap.mu, op, kind, certificate=cert, bipartition=bp)


def optimize_bipartite(x0, rho, sigma, config: OptimizerConfig = OptimizerConfig(),
                       bp=None) -> OptimizationTrace:
    """Improve ``W = mu_1 1 - X`` for ``rho`` against the noise ``sigma``.

    Parameters
    ----------
    x0, rho, sigma : HermitianOperator
        Starting observable, entangled target and separable noise.
    config : OptimizerConfig
        Step size, schedule, iteration budget and input perturbation.
    bp : Bipartition, optional
        Split to optimize on; defaults to ``0|1`` for two parties.

    Returns
    -------
    OptimizationTrace
        Iterates plus the best witness seen. Recorded visibilities refer
        to the unperturbed ``rho`` and ``sigma``; the perturbation only
        enters the gradients.
    """
    bp = as_bipartition(bp, x0.dims)
    return _run(x0, rho, sigma, [bp], config, WitnessKind.OSD)


def optimize_multipartite(x0, rho, sigma, config: OptimizerConfig = OptimizerConfig(
        schedule=Schedule.TWO_PHASE)) -> OptimizationTrace:
    """Improve a GME witness ``mu 1 - X``, stepping on the critical bipartition."""
    if x0.n_parties < 3:
        raise ValueError("multipartite optimization needs at least three parties")
    bps = enumerate_bipartitions(x0.n_parties, x0.dims)
    return _run(x0, rho, sigma, bps, config, WitnessKind.GME)


def random_start(dims, seed: int = DEFAULT_PERTURBATION_SEED) -> HermitianOperator:
    """Random density matrix used as a starting observable.

    Its trace is one, which keeps the trace normalization well conditioned.
    """
    dims = tuple(dims)
    rng = np.random.default_rng((int(seed), 1))
    rho = random_density(int(np.prod(dims)), seed=rng)
    return HermitianOperator(rho.data, dims, label="random start", check=False)


def with_overrides(config: OptimizerConfig, **changes) -> OptimizerConfig:
    return replace(config, **changes)
