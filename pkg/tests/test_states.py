import itertools

import numpy as np
import pytest

from oswit.operators import HermitianOperator
from oswit.states import (
    NAMES,
    ket,
    make_state,
    partial_transpose,
    random_density,
    random_pure_product,
    random_separable,
    upb_vectors,
)
from oswit.witnesses import ccnr_value

PURE = ["ghz3", "w3", "w4", "dicke4-2", "h3", "singlet4", "cluster4", "comb", "psi3", "phi3", "bell"]


@pytest.mark.parametrize("name", PURE)
def test_pure_states_normalized(name):
    st = make_state(name)
    assert st.is_pure
    assert np.linalg.norm(st.vector) == pytest.approx(1.0, abs=1e-12)
    assert st.rho.trace() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name", NAMES)
def test_catalog_states_are_states(name):
    rho = make_state(name).rho
    assert rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(rho.data)[0] >= -1e-10


def test_ket_big_endian():
    assert np.argmax(ket("001")) == 1
    assert np.argmax(ket("100")) == 4
    assert np.argmax(ket("12", (3, 3))) == 5
    with pytest.raises(ValueError):
        ket("2", (2,))


def test_w3_amplitudes():
    v = make_state("w3").vector
    support = {format(i, "03b") for i in np.flatnonzero(np.abs(v) > 1e-12)}
    assert support == {"001", "010", "100"}
    assert np.allclose(np.abs(v[np.abs(v) > 1e-12]), 1 / np.sqrt(3))


def test_dicke42_amplitudes():
    v = make_state("dicke4-2").vector
    nz = v[np.abs(v) > 1e-12]
    assert len(nz) == 6 and np.allclose(nz, 1 / np.sqrt(6))
    assert all(format(i, "04b").count("1") == 2 for i in np.flatnonzero(np.abs(v) > 1e-12))


def test_comb_amplitude_on_1111():
    v = make_state("comb").vector
    assert v[15] == pytest.approx(np.sqrt(2) / np.sqrt(6))


def test_h3_hadamard_form():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    v = np.kron(np.eye(4), h) @ make_state("h3").vector
    target = (ket("000") + ket("010") + ket("100") + ket("111")) / 2
    overlap = np.vdot(target, v)
    assert abs(overlap) == pytest.approx(1.0, abs=1e-12)


def test_singlet4_is_singlet():
    # total spin zero: invariant under U^{(x)4}
    v = make_state("singlet4").vector
    rng = np.random.default_rng(1)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    u, _ = np.linalg.qr(z)
    u = u / np.sqrt(np.linalg.det(u))
    uu = u
    for _ in range(3):
        uu = np.kron(uu, u)
    assert abs(np.vdot(v, uu @ v)) == pytest.approx(1.0, abs=1e-12)


def test_upb_vectors_orthogonal_products():
    vecs = upb_vectors()
    for a, b in itertools.combinations(vecs, 2):
        assert abs(np.vdot(a, b)) <= 1e-12
    for v in vecs:
        assert np.linalg.matrix_rank(v.reshape(3, 3), tol=1e-12) == 1


def test_upb_state_bound_entangled():
    rho = make_state("upb").rho
    assert rho.trace() == pytest.approx(1.0)
    assert np.linalg.matrix_rank(rho.data, tol=1e-10) == 4
    assert np.linalg.eigvalsh(partial_transpose(rho, 1))[0] >= -1e-10
    assert ccnr_value(rho) > 1


def test_rho3_definition():
    rho = make_state("rho3").rho
    assert rho.dims == (4, 4)
    assert np.linalg.matrix_rank(rho.data, tol=1e-10) == 2


def test_psi3_parameter():
    st = make_state("psi3:eps=0.2")
    assert st.vector[0] == pytest.approx(np.sqrt(1 - 2 * 0.04))
    with pytest.raises(ValueError):
        make_state("psi3:eps=0.8")


@pytest.mark.parametrize("name", ["dicke3-4", "nonsense", "w"])
def test_invalid_names(name):
    with pytest.raises(ValueError):
        make_state(name)


def test_parametric_names():
    assert make_state("ghz5").dims == (2,) * 5
    assert make_state("phi4").dims == (4, 4)
    assert np.allclose(make_state("white2").rho.data, np.eye(4) / 4)


def test_random_product_ccnr_saturates():
    for seed in range(20):
        v = random_pure_product((2, 3), seed)
        rho = HermitianOperator.from_ket(v, (2, 3))
        assert ccnr_value(rho) == pytest.approx(1.0, abs=1e-9)


def test_random_density_valid():
    rho = random_density(6, seed=3)
    assert rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(rho.data)[0] >= 0


def test_random_generators_deterministic():
    assert random_density(5, seed=11).data.tobytes() == random_density(5, seed=11).data.tobytes()
    assert random_pure_product((2, 2), 4).tobytes() == random_pure_product((2, 2), 4).tobytes()
    a = random_separable((2, 2), seed=9).data
    assert a.tobytes() == random_separable((2, 2), seed=9).data.tobytes()
