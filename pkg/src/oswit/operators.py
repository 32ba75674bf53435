"""Dense operator algebra on multipartite qudit systems.

Operators are stored as row-major complex matrices together with the list of
local dimensions. Parties are ordered big-endian: the leftmost ket symbol is
party 0.

The operator Schmidt decomposition (OSD) is computed from the realigned
matrix. Internally the realignment is expressed in orthonormal Hermitian
operator bases on both sides, so the coefficient matrix of a Hermitian
operator is real and its SVD always returns Hermitian Schmidt operators,
even when singular values are degenerate.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-10
EFFECTIVE_RANK_TOL = 1e-10
DEFAULT_PERTURBATION_SEED = 0x5EED


class DecompositionError(ValueError):
    """Raised when an operator Schmidt decomposition cannot be produced."""


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Hermitian matrix acting on a tensor product of qudits.

    Parameters
    ----------
    data : array_like
        Square complex matrix of size ``prod(dims)``.
    dims : sequence of int
        Local dimension of every party.
    label : str, optional
        Free text used in reports.
    check : bool, optional
        Verify the Hermiticity invariant on construction.
    """

    data: np.ndarray
    dims: tuple[int, ...]
    label: str = ""
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", dims)
        data.setflags(write=False)
        if any(d < 1 for d in dims):
            raise ValueError(f"local dimensions must be positive, got {dims}")
        total = int(np.prod(dims))
        if data.shape != (total, total):
            raise ValueError(
                f"matrix shape {data.shape} does not match dims {dims} (D={total})"
            )
        if self.check:
            norm = np.linalg.norm(data)
            resid = np.linalg.norm(data - data.conj().T)
            if resid > HERMITIAN_TOL * max(1.0, norm):
                raise ValueError(f"operator is not Hermitian (residual {resid:.3e})")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def expectation(self, rho: "HermitianOperator | np.ndarray") -> float:
        """Return ``Tr(self @ rho)`` as a real number."""
        other = rho.data if isinstance(rho, HermitianOperator) else np.asarray(rho)
        return float(np.vdot(self.data.conj().T, other).real)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        _require_same_dims(self, other)
        return HermitianOperator(self.data + other.data, self.dims, check=False)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        _require_same_dims(self, other)
        return HermitianOperator(self.data - other.data, self.dims, check=False)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(self.data * float(scalar), self.dims, self.label, check=False)

    __rmul__ = __mul__

    @classmethod
    def identity(cls, dims) -> "HermitianOperator":
        dims = tuple(dims)
        return cls(np.eye(int(np.prod(dims))), dims, label="identity", check=False)

    @classmethod
    def from_ket(cls, psi, dims, label: str = "") -> "HermitianOperator":
        psi = np.asarray(psi, dtype=complex).ravel()
        return cls(np.outer(psi, psi.conj()), dims, label=label, check=False)


def _require_same_dims(a: HermitianOperator, b: HermitianOperator) -> None:
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")


@dataclass(frozen=True)
class Bipartition:
    """Split ``alpha | complement`` of the parties of a system.

    ``alpha`` always contains party 0 in canonical form, so each unordered
    split has exactly one representative. The ``alpha`` side is the ``A`` side
    of every decomposition.
    """

    alpha: tuple[int, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        alpha = tuple(sorted(set(int(a) for a in self.alpha)))
        dims = tuple(int(d) for d in self.dims)
        n = len(dims)
        if n < 2:
            raise ValueError("a bipartition needs at least two parties")
        if not alpha or len(alpha) >= n:
            raise ValueError(f"alpha must be a nonempty strict subset, got {alpha}")
        if alpha[0] < 0 or alpha[-1] >= n:
            raise ValueError(f"party index out of range in {alpha} for {n} parties")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "dims", dims)

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.dims)) if i not in self.alpha)

    @property
    def m_alpha(self) -> int:
        return int(np.prod([self.dims[i] for i in self.alpha]))

    @property
    def n_alpha_bar(self) -> int:
        return int(np.prod([self.dims[i] for i in self.complement]))

    @property
    def smaller_dim(self) -> int:
        return min(self.m_alpha, self.n_alpha_bar)

    @property
    def is_canonical(self) -> bool:
        return 0 in self.alpha

    def canonical(self) -> "Bipartition":
        if self.is_canonical:
            return self
        return Bipartition(self.complement, self.dims)

    def __str__(self) -> str:
        return "".join(map(str, self.alpha)) + "|" + "".join(map(str, self.complement))

    @classmethod
    def parse(cls, text: str, dims) -> "Bipartition":
        """Parse ``"0|12"`` or ``"0,1|2,3"`` style strings."""
        left, sep, right = text.partition("|")
        if not sep:
            raise ValueError(f"bipartition {text!r} lacks a '|' separator")

        def parties(part):
            part = part.strip()
            if "," in part:
                return [int(p) for p in part.split(",") if p.strip()]
            return [int(p) for p in part]

        alpha, rest = parties(left), parties(right)
        if sorted(alpha + rest) != list(range(len(dims))):
            raise ValueError(f"bipartition {text!r} does not cover {len(dims)} parties")
        return cls(tuple(alpha), tuple(dims))


def as_bipartition(bp, dims) -> Bipartition:
    if bp is None:
        if len(dims) != 2:
            raise ValueError("a bipartition must be given for more than two parties")
        return Bipartition((0,), tuple(dims))
    if isinstance(bp, Bipartition):
        if bp.dims != tuple(dims):
            raise ValueError(f"bipartition dims {bp.dims} do not match operator dims {tuple(dims)}")
        return bp
    if isinstance(bp, str):
        return Bipartition.parse(bp, dims)
    return Bipartition(tuple(bp), tuple(dims))


def enumerate_bipartitions(n_parties: int, dims=None) -> list[Bipartition]:
    """All ``2**(n-1) - 1`` unordered bipartitions in canonical order.

    Ordered by the size of ``alpha`` first, then lexicographically, so for
    three parties the result is ``0|12, 01|2, 02|1``.
    """
    if n_parties < 2:
        raise ValueError("need at least two parties")
    if dims is None:
        dims = (2,) * n_parties
    dims = tuple(dims)
    if len(dims) != n_parties:
        raise ValueError("dims must list one dimension per party")
    rest = range(1, n_parties)
    out = []
    for size in range(0, n_parties - 1):
        for extra in itertools.combinations(rest, size):
            out.append(Bipartition((0,) + extra, dims))
    return out


def tensor_product(*ops: HermitianOperator) -> HermitianOperator:
    if not ops:
        raise ValueError("tensor_product needs at least one operator")
    data = ops[0].data
    dims = list(ops[0].dims)
    for op in ops[1:]:
        data = np.kron(data, op.data)
        dims.extend(op.dims)
    return HermitianOperator(data, tuple(dims), check=False)


def partial_trace(x: HermitianOperator, keep) -> HermitianOperator:
    """Trace out every party not listed in ``keep``."""
    keep = sorted(set(int(k) for k in keep))
    n = x.n_parties
    if not keep:
        raise ValueError("keep must name at least one party")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"party index out of range in {keep} for {n} parties")
    drop = [i for i in range(n) if i not in keep]
    dk = int(np.prod([x.dims[i] for i in keep]))
    dd = int(np.prod([x.dims[i] for i in drop])) if drop else 1
    t = x.data.reshape(x.dims + x.dims)
    perm = keep + drop
    t = t.transpose(perm + [p + n for p in perm]).reshape(dk, dd, dk, dd)
    reduced = np.trace(t, axis1=1, axis2=3)
    return HermitianOperator(reduced, tuple(x.dims[i] for i in keep), check=False)


@functools.lru_cache(maxsize=None)
def _bipartite_axes(dims: tuple[int, ...], alpha: tuple[int, ...]) -> tuple[int, ...]:
    n = len(dims)
    comp = [i for i in range(n) if i not in alpha]
    order = list(alpha) + comp
    return tuple(order + [i + n for i in order])


def _as_bipartite(x: np.ndarray, bp: Bipartition) -> np.ndarray:
    """Reshape ``x`` to ``(m, n, m, n)`` with the alpha parties first."""
    dims = bp.dims
    m, n = bp.m_alpha, bp.n_alpha_bar
    t = np.asarray(x).reshape(dims + dims).transpose(_bipartite_axes(dims, bp.alpha))
    return t.reshape(m, n, m, n)


def realign(x, bp: Bipartition | None = None) -> np.ndarray:
    """Realignment matrix of shape ``(m**2, n**2)``.

    Entry ``[(i, i'), (k, k')]`` equals ``<i k|X|i' k'>`` with the alpha
    parties moved to the front. Its singular values are the operator Schmidt
    coefficients.
    """
    op = _coerce(x)
    bp = as_bipartition(bp, op.dims)
    m, n = bp.m_alpha, bp.n_alpha_bar
    t = _as_bipartite(op.data, bp)
    return t.transpose(0, 2, 1, 3).reshape(m * m, n * n)


def _coerce(x, dims=None) -> HermitianOperator:
    if isinstance(x, HermitianOperator):
        return x
    if dims is None:
        raise TypeError("raw arrays need explicit dims")
    return HermitianOperator(x, dims)


@functools.lru_cache(maxsize=None)
def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian operator basis of ``d x d`` matrices.

    Returns an array of shape ``(d*d, d, d)``: the normalized identity first,
    then the symmetric, antisymmetric and diagonal generalized Gell-Mann
    matrices, all with unit Hilbert-Schmidt norm.
    """
    ops = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1 / np.sqrt(2)
            ops.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j / np.sqrt(2)
            a[k, j] = 1j / np.sqrt(2)
            ops.append(a)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        ops.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    basis = np.array(ops)
    basis.setflags(write=False)
    return basis


@functools.lru_cache(maxsize=None)
def _coefficient_map(dims: tuple[int, ...], alpha: tuple[int, ...]):
    """Real-coefficient map for one bipartition.

    Returns ``(forward, basis_a, basis_b)`` where ``forward`` has shape
    ``(m*m*n*n, D*D)`` and maps ``vec(X)`` to the row-major coefficient matrix
    ``C[a, b] = Tr(X (E_a (x) F_b))``.
    """
    bp = Bipartition(alpha, dims)
    m, n = bp.m_alpha, bp.n_alpha_bar
    ea, fb = hermitian_basis(m), hermitian_basis(n)
    k = len(dims)
    # E_a (x) F_b in alpha-first order, shape (m2, n2, m, n, m, n)
    prod = np.einsum("aij,bkl->abikjl", ea, fb)
    axes = _bipartite_axes(dims, alpha)
    ordered = tuple(dims[i] for i in axes[:k])
    prod = prod.reshape((m * m * n * n,) + ordered + ordered)
    prod = prod.transpose((0,) + tuple(1 + int(i) for i in np.argsort(axes)))
    d = int(np.prod(dims))
    # Tr(X K) = vec(X) . vec(K^T)
    forward = prod.reshape(-1, d, d).transpose(0, 2, 1).reshape(-1, d * d).copy()
    forward.setflags(write=False)
    return forward, ea, fb


def coefficient_matrix(x, bp: Bipartition) -> np.ndarray:
    """Real matrix ``C[a, b] = Tr(X (E_a (x) F_b))`` in the Hermitian bases."""
    data = x.data if isinstance(x, HermitianOperator) else np.asarray(x)
    forward, ea, fb = _coefficient_map(bp.dims, bp.alpha)
    c = forward @ data.ravel()
    return c.real.reshape(len(ea), len(fb))


def operator_from_coefficients(c: np.ndarray, bp: Bipartition) -> np.ndarray:
    """Inverse of :func:`coefficient_matrix`; returns the dense matrix."""
    forward, ea, fb = _coefficient_map(bp.dims, bp.alpha)
    d = int(np.prod(bp.dims))
    vec = forward.conj().T @ np.asarray(c, dtype=float).ravel()
    return vec.reshape(d, d)


@dataclass(frozen=True, eq=False)
class OperatorSchmidtDecomposition:
    """``X = sum_i mu_i G_i^A (x) G_i^B`` for one bipartition.

    ``coeffs_a`` and ``coeffs_b`` hold the Schmidt operators as columns of
    real coordinates in :func:`hermitian_basis`; ``ops_a``/``ops_b`` are the
    dense matrices.
    """

    mu: np.ndarray
    coeffs_a: np.ndarray
    coeffs_b: np.ndarray
    bipartition: Bipartition

    @property
    def ops_a(self) -> np.ndarray:
        return np.einsum("ai,ajk->ijk", self.coeffs_a, hermitian_basis(self.bipartition.m_alpha))

    @property
    def ops_b(self) -> np.ndarray:
        return np.einsum("bi,bjk->ijk", self.coeffs_b, hermitian_basis(self.bipartition.n_alpha_bar))

    @property
    def mu1(self) -> float:
        return float(self.mu[0])

    def effective_rank(self, tol: float = EFFECTIVE_RANK_TOL) -> int:
        if self.mu[0] == 0:
            return 0
        return int(np.sum(self.mu > tol * self.mu[0]))

    def reconstruct(self, mu=None) -> HermitianOperator:
        """Rebuild the operator, optionally with replaced coefficients."""
        mu = self.mu if mu is None else np.asarray(mu, dtype=float)
        c = (self.coeffs_a * mu) @ self.coeffs_b.T
        data = operator_from_coefficients(c, self.bipartition)
        return HermitianOperator(data, self.bipartition.dims, check=False)

    def pair_expectations(self, rho) -> np.ndarray:
        """``Tr[(G_i^A (x) G_i^B) rho]`` for every Schmidt pair."""
        r = coefficient_matrix(rho, self.bipartition)
        return np.einsum("ai,ab,bi->i", self.coeffs_a, r, self.coeffs_b)


def _fix_signs(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # largest-magnitude coordinate of each G^A made positive, G^B flipped along
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, v * signs


def osd_from_coefficients(c: np.ndarray, bp: Bipartition) -> OperatorSchmidtDecomposition:
    try:
        u, s, vt = np.linalg.svd(c, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD failed on bipartition {bp}") from exc
    u, v = _fix_signs(u, vt.T)
    return OperatorSchmidtDecomposition(s, u, v, bp)


def osd(
    x,
    bp: Bipartition | None = None,
    *,
    perturb: float = 0.0,
    seed: int = DEFAULT_PERTURBATION_SEED,
) -> OperatorSchmidtDecomposition:
    """Operator Schmidt decomposition of a Hermitian operator.

    Parameters
    ----------
    x : HermitianOperator
        Operator to decompose.
    bp : Bipartition, optional
        Split to use; may be omitted for two parties.
    perturb : float, optional
        Weight of a fixed-seed random density matrix mixed in before the
        decomposition, ``(1 - perturb) X + perturb * rho_random``. Lifts
        degeneracies of the coefficients.
    seed : int, optional
        Seed of the random density matrix.

    Returns
    -------
    OperatorSchmidtDecomposition
        Coefficients sorted in decreasing order; zero coefficients are kept.
    """
    op = _coerce(x)
    bp = as_bipartition(bp, op.dims)
    data = op.data
    if perturb:
        from .states import random_density

        noise = random_density(op.dim, seed=seed)
        data = (1 - perturb) * data + perturb * noise.data
    resid = np.linalg.norm(data - data.conj().T)
    if resid > 1e-6 * max(1.0, np.linalg.norm(data)):
        raise DecompositionError(f"input is not Hermitian (residual {resid:.3e})")
    return osd_from_coefficients(coefficient_matrix(data, bp), bp)


def complete_operator_basis(partial, dim: int, tol: float = 1e-9) -> np.ndarray:
    """Extend orthonormal operators to a full basis of ``dim x dim`` matrices.

    The first entries of the result are exactly ``partial``; the rest come
    from Gram-Schmidt over the normalized identity and generalized Gell-Mann
    matrices.

    Parameters
    ----------
    partial : sequence of (dim, dim) arrays
        Hilbert-Schmidt orthonormal operators.
    dim : int
        Matrix dimension.

    Returns
    -------
    numpy.ndarray
        Array of shape ``(dim**2, dim, dim)``.
    """
    partial = [np.asarray(p.data if isinstance(p, HermitianOperator) else p, dtype=complex)
               for p in partial]
    if len(partial) > dim * dim:
        raise ValueError("more operators than the operator space dimension")
    for p in partial:
        if p.shape != (dim, dim):
            raise ValueError(f"operator of shape {p.shape}, expected {(dim, dim)}")
    vecs = np.array([p.ravel() for p in partial]).reshape(len(partial), dim * dim)
    gram = vecs.conj() @ vecs.T
    if len(partial) and np.max(np.abs(gram - np.eye(len(partial)))) > tol:
        raise ValueError("partial operator set is not orthonormal")
    basis = list(vecs)
    for cand in hermitian_basis(dim):
        if len(basis) == dim * dim:
            break
        w = cand.ravel().copy()
        for _ in range(2):
            for b in basis:
                w = w - np.vdot(b, w) * b
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            basis.append(w / norm)
    return np.array(basis).reshape(dim * dim, dim, dim)


def complete_columns(q: np.ndarray) -> np.ndarray:
    """Extend real orthonormal columns ``q`` (N x k) to an orthogonal N x N matrix."""
    n, k = q.shape
    if k == n:
        return q.copy()
    proj = np.eye(n) - q @ q.T
    u, _, _ = np.linalg.svd(proj)
    return np.hstack([q, u[:, : n - k]])
