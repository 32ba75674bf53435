import numpy as np
import pytest
from conftest import haar_unitary
from helpers import realign_by_loops
from hypothesis import given
from hypothesis import strategies as st

from oswit.operators import (
    Bipartition,
    DecompositionError,
    HermitianOperator,
    as_bipartition,
    coefficient_matrix,
    complete_columns,
    complete_operator_basis,
    enumerate_bipartitions,
    hermitian_basis,
    operator_from_coefficients,
    osd,
    partial_trace,
    realign,
    tensor_product,
)
from oswit.states import make_state, random_hermitian, random_ket

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def op(data, dims):
    return HermitianOperator(np.asarray(data, dtype=complex), dims)


# ---------- types ----------

def test_hermitian_operator_rejects_non_hermitian():
    with pytest.raises(ValueError):
        HermitianOperator(np.array([[0, 1], [0, 0]], dtype=complex), (2,))


def test_hermitian_operator_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        HermitianOperator(np.eye(4), (2, 3))


def test_hermitian_operator_is_read_only():
    x = HermitianOperator.identity((2, 2))
    with pytest.raises(ValueError):
        x.data[0, 0] = 5


def test_bipartition_fields_and_canonical():
    bp = Bipartition((1, 2), (2, 3, 4))
    assert bp.complement == (0,)
    assert bp.m_alpha == 12 and bp.n_alpha_bar == 2
    assert not bp.is_canonical
    assert bp.canonical().alpha == (0,)
    assert str(Bipartition((0,), (2, 2, 2))) == "0|12"


@pytest.mark.parametrize("alpha", [(), (0, 1, 2), (3,)])
def test_bipartition_invalid(alpha):
    with pytest.raises(ValueError):
        Bipartition(alpha, (2, 2, 2))


def test_bipartition_parse():
    dims = (2, 2, 2, 2)
    assert Bipartition.parse("0,1|2,3", dims).alpha == (0, 1)
    assert Bipartition.parse("02|13", dims).alpha == (0, 2)
    with pytest.raises(ValueError):
        Bipartition.parse("01", dims)
    with pytest.raises(ValueError):
        Bipartition.parse("0|1", dims)


def test_as_bipartition_requires_split_for_three_parties():
    with pytest.raises(ValueError):
        as_bipartition(None, (2, 2, 2))


# ---------- tensor product and partial trace ----------

def test_tensor_identity():
    i2 = HermitianOperator.identity((2,))
    assert np.allclose(tensor_product(i2, i2).data, np.eye(4))


def test_tensor_sz_sz():
    out = tensor_product(op(SZ, (2,)), op(SZ, (2,)))
    assert np.allclose(out.data, np.diag([1, -1, -1, 1]))
    assert out.dims == (2, 2)


def test_tensor_sx_norm():
    a = op(SX / np.sqrt(2), (2,))
    assert np.linalg.norm(tensor_product(a, a).data) == pytest.approx(1.0, abs=1e-14)


def test_partial_trace_bell():
    bell = make_state("bell").rho
    assert np.allclose(partial_trace(bell, [0]).data, np.eye(2) / 2)


def test_partial_trace_product(rng):
    a = op(np.diag([0.3, 0.7]), (2,))
    b = op(np.diag([0.1, 0.2, 0.3]), (3,))
    red = partial_trace(tensor_product(a, b), [0])
    assert np.allclose(red.data, a.data * 0.6)


def test_partial_trace_w3():
    # <0|rho_A|0> collects |010>, |001>; <1|rho_A|1> collects |100>
    red = partial_trace(make_state("w3").rho, {0})
    assert np.allclose(red.data, np.diag([2 / 3, 1 / 3]))


def test_partial_trace_keeps_trace(rng):
    x = random_hermitian((2, 3, 2), rng)
    for keep in ([0], [1, 2], [0, 2]):
        assert partial_trace(x, keep).trace() == pytest.approx(x.trace(), abs=1e-12)


@pytest.mark.parametrize("keep", [[], [5]])
def test_partial_trace_errors(keep):
    with pytest.raises(ValueError):
        partial_trace(HermitianOperator.identity((2, 2)), keep)


# ---------- realignment ----------

def test_realign_identity():
    r = realign(HermitianOperator.identity((2, 2)))
    s = np.linalg.svd(r, compute_uv=False)
    assert s[0] == pytest.approx(2.0)
    assert np.allclose(s[1:], 0)


def test_realign_product_projector():
    x = HermitianOperator.from_ket(np.eye(4)[0], (2, 2))
    s = np.linalg.svd(realign(x), compute_uv=False)
    assert s[0] == pytest.approx(1.0) and np.allclose(s[1:], 0)


def test_realign_bell_singular_values():
    s = np.linalg.svd(realign(make_state("bell").rho), compute_uv=False)
    assert np.allclose(s, [0.5] * 4)


def test_realign_matches_index_definition(rng):
    x = random_hermitian((2, 3), rng)
    assert np.allclose(realign(x), realign_by_loops(x.data, 2, 3))


def test_realign_moves_alpha_to_front(rng):
    x = random_hermitian((2, 3, 2), rng)
    bp = Bipartition((1,), x.dims)
    # swap parties so that party 1 comes first, then realign with the loop oracle
    t = x.data.reshape(2, 3, 2, 2, 3, 2).transpose(1, 0, 2, 4, 3, 5).reshape(12, 12)
    assert np.allclose(realign(x, bp), realign_by_loops(t, 3, 4))


def test_coefficient_singular_values_match_realignment(rng):
    x = random_hermitian((3, 2, 2), rng)
    for bp in enumerate_bipartitions(3, x.dims):
        a = np.linalg.svd(realign(x, bp), compute_uv=False)
        b = np.linalg.svd(coefficient_matrix(x, bp), compute_uv=False)
        assert np.allclose(a, b, atol=1e-12)


def test_coefficient_roundtrip(rng):
    x = random_hermitian((2, 2, 2), rng)
    bp = Bipartition((0, 2), x.dims)
    assert np.allclose(operator_from_coefficients(coefficient_matrix(x, bp), bp), x.data)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_hermitian_basis_orthonormal(d):
    b = hermitian_basis(d)
    gram = np.einsum("aij,bij->ab", b.conj(), b)
    assert np.allclose(gram, np.eye(d * d))
    for m in b:
        assert np.allclose(m, m.conj().T)


# ---------- OSD examples ----------

def test_osd_bell():
    dec = osd(make_state("bell").rho)
    assert np.allclose(dec.mu, [0.5] * 4)
    assert dec.mu1 == pytest.approx(0.5)


def test_osd_product_projector():
    dec = osd(HermitianOperator.from_ket(np.eye(4)[0], (2, 2)))
    assert np.allclose(dec.mu, [1, 0, 0, 0], atol=1e-14)


def test_osd_partially_entangled():
    psi = np.sqrt(0.8) * np.eye(4)[0] + np.sqrt(0.2) * np.eye(4)[3]
    dec = osd(HermitianOperator.from_ket(psi, (2, 2)))
    assert np.allclose(dec.mu, [0.8, 0.4, 0.4, 0.2])


def test_osd_keeps_zero_coefficients():
    dec = osd(HermitianOperator.from_ket(np.eye(9)[0], (3, 3)))
    assert len(dec.mu) == 9
    assert dec.effective_rank() == 1


def test_osd_rejects_non_hermitian_input():
    x = HermitianOperator(np.array([[0, 1, 0, 0]] + [[0] * 4] * 3, dtype=complex), (2, 2), check=False)
    with pytest.raises(DecompositionError):
        osd(x)


def test_osd_raw_array_needs_dims():
    with pytest.raises(TypeError):
        osd(np.eye(4))


def test_osd_perturbation_is_deterministic():
    rho = make_state("upb").rho
    a = osd(rho, perturb=1e-4, seed=3).mu
    b = osd(rho, perturb=1e-4, seed=3).mu
    c = osd(rho, perturb=1e-4, seed=4).mu
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_osd_sign_convention():
    dec = osd(make_state("bell").rho)
    idx = np.argmax(np.abs(dec.coeffs_a), axis=0)
    assert np.all(dec.coeffs_a[idx, np.arange(dec.coeffs_a.shape[1])] > 0)


# ---------- OSD invariants on random operators ----------

def _check_osd(x, bp, tol=1e-9):
    dec = osd(x, bp)
    norm = np.linalg.norm(x.data)
    assert np.all(np.diff(dec.mu) <= 1e-12) and np.all(dec.mu >= -1e-12)
    for ops in (dec.ops_a, dec.ops_b):
        gram = np.einsum("aij,bij->ab", ops.conj(), ops)
        assert np.max(np.abs(gram - np.eye(len(ops)))) <= tol
        for g in ops:
            assert np.linalg.norm(g - g.conj().T) <= tol
    rebuilt = sum(m * np.kron(a, b) for m, a, b in zip(dec.mu, dec.ops_a, dec.ops_b))
    if bp.alpha == (0,):
        assert np.linalg.norm(x.data - rebuilt) <= tol * norm
    assert np.linalg.norm(x.data - dec.reconstruct().data) <= tol * norm
    assert abs(np.sum(dec.mu**2) - norm**2) <= tol * norm**2


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3)])
def test_osd_invariants_random(dims):
    rng = np.random.default_rng(sum(dims))
    for _ in range(200):
        x = random_hermitian(dims, rng)
        _check_osd(x, Bipartition((0,), dims))


def test_osd_invariants_multipartite(rng):
    for dims in [(2, 2, 2), (2, 3, 2), (2, 2, 2, 2)]:
        x = random_hermitian(dims, rng)
        for bp in enumerate_bipartitions(len(dims), dims):
            _check_osd(x, bp)


@given(st.integers(0, 10**6), st.sampled_from([(2, 2), (2, 3), (3, 2), (3, 3)]))
def test_osd_local_unitary_invariance(seed, dims):
    rng = np.random.default_rng(seed)
    x = random_hermitian(dims, rng)
    u = np.kron(haar_unitary(dims[0], rng), haar_unitary(dims[1], rng))
    y = HermitianOperator(u @ x.data @ u.conj().T, dims, check=False)
    assert np.max(np.abs(osd(x).mu - osd(y).mu)) <= 1e-8


@given(st.integers(0, 10**6))
def test_osd_of_reconstruction(seed):
    x = random_hermitian((2, 3), np.random.default_rng(seed))
    dec = osd(x)
    assert np.allclose(osd(dec.reconstruct()).mu, dec.mu, atol=1e-8)


@given(st.integers(0, 10**6), st.sampled_from([(2, 2), (2, 3), (3, 3), (3, 4)]))
def test_pure_state_osc_are_schmidt_products(seed, dims):
    psi = random_ket(dims[0] * dims[1], np.random.default_rng(seed))
    s = np.linalg.svd(psi.reshape(dims), compute_uv=False)
    expected = np.sort(np.outer(s, s).ravel())[::-1]
    mu = osd(HermitianOperator.from_ket(psi, dims)).mu
    assert np.allclose(mu[: len(expected)], expected, atol=1e-8)
    assert np.allclose(mu[len(expected):], 0, atol=1e-8)


def test_pair_expectations_match_dense(rng):
    x = random_hermitian((2, 3), rng)
    rho = random_hermitian((2, 3), rng)
    dec = osd(x)
    dense = [np.trace(np.kron(a, b) @ rho.data).real for a, b in zip(dec.ops_a, dec.ops_b)]
    assert np.allclose(dec.pair_expectations(rho), dense)


# ---------- basis completion ----------

def test_complete_from_identity():
    out = complete_operator_basis([np.eye(2) / np.sqrt(2)], 2)
    assert out.shape == (4, 2, 2)
    assert np.allclose(out[0], np.eye(2) / np.sqrt(2))
    gram = np.einsum("aij,bij->ab", out.conj(), out)
    assert np.allclose(gram, np.eye(4))


def test_complete_full_basis_unchanged():
    full = hermitian_basis(3)
    assert np.allclose(complete_operator_basis(list(full), 3), full)


def test_complete_four_in_dim_four(rng):
    dec = osd(random_hermitian((4, 4), rng))
    partial = list(dec.ops_a[:4])
    out = complete_operator_basis(partial, 4)
    assert out.shape == (16, 4, 4)
    assert np.allclose(out[:4], partial)
    gram = np.einsum("aij,bij->ab", out.conj(), out)
    assert np.max(np.abs(gram - np.eye(16))) <= 1e-9


def test_complete_rejects_non_orthonormal():
    with pytest.raises(ValueError):
        complete_operator_basis([np.eye(2), SZ], 2)


def test_complete_columns(rng):
    q, _ = np.linalg.qr(rng.normal(size=(7, 3)))
    full = complete_columns(q)
    assert np.allclose(full[:, :3], q)
    assert np.allclose(full.T @ full, np.eye(7))


# ---------- bipartition enumeration ----------

@pytest.mark.parametrize("n,count", [(2, 1), (3, 3), (4, 7), (5, 15)])
def test_enumerate_count(n, count):
    bps = enumerate_bipartitions(n)
    assert len(bps) == count == 2 ** (n - 1) - 1
    assert all(b.is_canonical for b in bps)
    assert len({b.alpha for b in bps}) == count


def test_enumerate_three_party_order():
    assert [str(b) for b in enumerate_bipartitions(3)] == ["0|12", "01|2", "02|1"]


def test_enumerate_too_few():
    with pytest.raises(ValueError):
        enumerate_bipartitions(1)
