"""Named states and random-state generators.

Kets are big-endian: ``ket("001")`` puts the excitation on the last party.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass

import numpy as np

from .operators import HermitianOperator

NAMES = (
    "ghz3", "w3", "w4", "dicke4-2", "h3", "singlet4", "cluster4", "comb",
    "upb", "rho3", "psi3", "phi3",
)


@dataclass(frozen=True, eq=False)
class NamedState:
    """A state from the catalog.

    ``vector`` is set for pure states; ``rho`` is always available.
    """

    name: str
    dims: tuple[int, ...]
    rho: HermitianOperator
    vector: np.ndarray | None = None

    @property
    def is_pure(self) -> bool:
        return self.vector is not None


def ket(bits: str, dims=None) -> np.ndarray:
    """Computational basis vector for a digit string such as ``"0110"``."""
    digits = [int(b) for b in bits]
    if dims is None:
        dims = (2,) * len(digits)
    index = 0
    for digit, d in zip(digits, dims):
        if not 0 <= digit < d:
            raise ValueError(f"digit {digit} out of range for dimension {d}")
        index = index * d + digit
    out = np.zeros(int(np.prod(dims)), dtype=complex)
    out[index] = 1.0
    return out


def _superpose(terms, dims=None) -> np.ndarray:
    vec = sum(c * ket(b, dims) for c, b in terms)
    return vec / np.linalg.norm(vec)


def ghz(n: int = 3) -> np.ndarray:
    return _superpose([(1, "0" * n), (1, "1" * n)])


def dicke(n: int, k: int) -> np.ndarray:
    if not 0 <= k <= n or n < 1:
        raise ValueError(f"invalid Dicke parameters n={n}, k={k}")
    terms = []
    for ones in itertools.combinations(range(n), k):
        bits = "".join("1" if i in ones else "0" for i in range(n))
        terms.append((1, bits))
    return _superpose(terms)


def w_state(n: int = 3) -> np.ndarray:
    return dicke(n, 1)


def hypergraph3() -> np.ndarray:
    """Uniform three-qubit hypergraph state, all amplitudes ``±1/sqrt(8)``."""
    amps = np.ones(8, dtype=complex)
    amps[7] = -1
    return amps / np.sqrt(8)


def singlet4() -> np.ndarray:
    plus = ket("01") + ket("10")
    vec = ket("0011") + ket("1100") - 0.5 * np.kron(plus, plus)
    return vec / np.sqrt(3)


def cluster4() -> np.ndarray:
    return 0.5 * (ket("0000") + ket("1100") + ket("0011") - ket("1111"))


def comb() -> np.ndarray:
    vec = math.sqrt(2) * ket("1111") + ket("0001") + ket("0010") + ket("0100") + ket("1000")
    return vec / math.sqrt(6)


def bell_phi_plus(d: int = 2) -> np.ndarray:
    return sum(ket(f"{i}{i}", (d, d)) for i in range(d)) / math.sqrt(d)


def upb_vectors() -> list[np.ndarray]:
    """The five product vectors of the 3x3 tiles unextendible product basis."""
    e = np.eye(3)
    s = e[0] + e[1] + e[2]
    pairs = [
        (e[0], (e[0] - e[1]) / math.sqrt(2)),
        ((e[0] - e[1]) / math.sqrt(2), e[2]),
        (e[2], (e[1] - e[2]) / math.sqrt(2)),
        ((e[1] - e[2]) / math.sqrt(2), e[0]),
        (s / math.sqrt(3), s / math.sqrt(3)),
    ]
    return [np.kron(a, b).astype(complex) for a, b in pairs]


def upb_state() -> HermitianOperator:
    proj = sum(np.outer(v, v.conj()) for v in upb_vectors())
    return HermitianOperator((np.eye(9) - proj) / 4, (3, 3), label="upb")


def rho3() -> HermitianOperator:
    """Two-ququad state with Schmidt number three."""
    dims = (4, 4)
    phi = (ket("00", dims) + ket("11", dims) + ket("22", dims)) / math.sqrt(3)
    tail = ket("23", dims) + ket("32", dims)
    data = 0.5 * np.outer(phi, phi.conj()) + 0.25 * np.outer(tail, tail.conj())
    return HermitianOperator(data, dims, label="rho3")


def psi3(eps: float = 0.1) -> np.ndarray:
    if not 0 <= 2 * eps * eps <= 1:
        raise ValueError(f"eps={eps} gives an unnormalizable state")
    dims = (4, 4)
    return (math.sqrt(1 - 2 * eps * eps) * ket("00", dims)
            + eps * (ket("11", dims) + ket("22", dims)))


def _pure(name, vec, dims) -> NamedState:
    vec = np.asarray(vec, dtype=complex)
    return NamedState(name, dims, HermitianOperator.from_ket(vec, dims, label=name), vec)


_NAME_RE = re.compile(r"^(?P<base>[a-z0-9-]+)(?::(?P<params>.*))?$")


def _parse_params(text: str | None) -> dict[str, float]:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        key, _, value = item.partition("=")
        out[key.strip()] = float(value)
    return out


def make_state(name: str, **params) -> NamedState:
    """Build a catalog state from its name.

    Accepted names: ``ghz3``, ``w3``, ``w4``, ``dicke4-2``, ``h3``,
    ``singlet4``, ``cluster4``, ``comb``, ``upb``, ``rho3``,
    ``psi3:eps=0.1``, ``phi3``, ``bell`` and the parametric forms ``ghz<n>``,
    ``w<n>``, ``dicke<n>-<k>``, ``phi<d>`` and ``white<n>`` (maximally mixed
    state of ``n`` qubits).
    """
    match = _NAME_RE.match(name.strip().lower())
    if not match:
        raise ValueError(f"unknown state {name!r}")
    base = match["base"]
    params = {**_parse_params(match["params"]), **params}
    if base == "h3":
        return _pure(base, hypergraph3(), (2, 2, 2))
    if base == "singlet4":
        return _pure(base, singlet4(), (2,) * 4)
    if base == "cluster4":
        return _pure(base, cluster4(), (2,) * 4)
    if base == "comb":
        return _pure(base, comb(), (2,) * 4)
    if base == "upb":
        rho = upb_state()
        return NamedState(base, rho.dims, rho)
    if base == "rho3":
        rho = rho3()
        return NamedState(base, rho.dims, rho)
    if base == "psi3":
        eps = params.get("eps", 0.1)
        return _pure(f"psi3:eps={eps:g}", psi3(eps), (4, 4))
    if m := re.fullmatch(r"ghz(\d+)", base):
        n = int(m[1])
        return _pure(base, ghz(n), (2,) * n)
    if m := re.fullmatch(r"w(\d+)", base):
        n = int(m[1])
        return _pure(base, w_state(n), (2,) * n)
    if m := re.fullmatch(r"dicke(\d+)-(\d+)", base):
        n, k = int(m[1]), int(m[2])
        return _pure(base, dicke(n, k), (2,) * n)
    if m := re.fullmatch(r"phi(\d+)", base):
        d = int(m[1])
        return _pure(base, bell_phi_plus(d), (d, d))
    if m := re.fullmatch(r"white(\d+)", base):
        dims = (2,) * int(m[1])
        return NamedState(base, dims, maximally_mixed(dims))
    if base == "bell":
        return _pure(base, bell_phi_plus(2), (2, 2))
    raise ValueError(f"unknown state {name!r}")


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_ket(dim: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_pure_product(dims, seed=None) -> np.ndarray:
    """Haar-random product vector ``|a_0> (x) |a_1> (x) ...``."""
    rng = _rng(seed)
    vec = np.ones(1, dtype=complex)
    for d in dims:
        vec = np.kron(vec, random_ket(d, rng))
    return vec


def random_density(dim: int, seed=None, rank: int | None = None) -> HermitianOperator:
    """Normalized Wishart matrix ``G G^dag / Tr``; full rank by default."""
    rng = _rng(seed)
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return HermitianOperator(rho / np.trace(rho).real, (dim,), label="random", check=False)


def random_hermitian(dims, seed=None) -> HermitianOperator:
    """Gaussian Hermitian matrix ``(G + G^dag) / 2``."""
    rng = _rng(seed)
    dims = tuple(dims)
    d = int(np.prod(dims))
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return HermitianOperator((g + g.conj().T) / 2, dims, check=False)


def random_separable(dims, n_terms: int = 10, seed=None) -> HermitianOperator:
    """Convex mixture of up to ``n_terms`` random pure product states."""
    rng = _rng(seed)
    dims = tuple(dims)
    k = int(rng.integers(1, n_terms + 1))
    weights = rng.dirichlet(np.ones(k))
    data = sum(w * np.outer(v, v.conj())
               for w, v in zip(weights, (random_pure_product(dims, rng) for _ in range(k))))
    return HermitianOperator(data, dims, check=False)


def maximally_mixed(dims) -> HermitianOperator:
    dims = tuple(dims)
    d = int(np.prod(dims))
    return HermitianOperator(np.eye(d) / d, dims, label="white", check=False)


def partial_transpose(rho: HermitianOperator, party: int = 1) -> np.ndarray:
    n = rho.n_parties
    t = rho.data.reshape(rho.dims + rho.dims)
    axes = list(range(2 * n))
    axes[party], axes[party + n] = axes[party + n], axes[party]
    return t.transpose(axes).reshape(rho.dim, rho.dim)
