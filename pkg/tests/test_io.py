import json

import numpy as np
import pytest

from oswit.io import (
    load_config,
    load_matrix,
    load_report,
    load_witness,
    matrix_from_dict,
    matrix_to_dict,
    save_config,
    save_matrix,
    save_report,
    save_witness,
    witness_from_dict,
    witness_to_dict,
)
from oswit.measures import gme_bounds
from oswit.operators import Bipartition
from oswit.optimizer import OptimizerConfig, Schedule
from oswit.schmidt_number import sn_witness
from oswit.states import make_state, random_hermitian
from oswit.witnesses import WitnessKind, fidelity_witness, gme_witness, osd_witness


def same_witness(a, b):
    assert a.kind is b.kind
    assert a.offset == b.offset
    assert a.observable.dims == b.observable.dims
    assert a.observable.data.tobytes() == b.observable.data.tobytes()
    assert a.k == b.k and a.heuristic == b.heuristic
    assert a.bipartition == b.bipartition
    assert (a.certificate is None) == (b.certificate is None)
    if a.certificate is not None:
        assert a.certificate.per_bipartition_mu1 == b.certificate.per_bipartition_mu1
        assert a.certificate.critical == b.certificate.critical


def test_matrix_roundtrip_bitwise(tmp_path, rng):
    x = random_hermitian((2, 3), rng)
    path = tmp_path / "x.json"
    save_matrix(x, path)
    y = load_matrix(path)
    assert y.dims == (2, 3) and y.label == "x"
    assert y.data.tobytes() == x.data.tobytes()
    assert set(json.loads(path.read_text())) == {"dims", "re", "im"}


def test_matrix_dict_validation():
    with pytest.raises(ValueError):
        matrix_from_dict({"re": [[1]]})
    with pytest.raises(ValueError):
        matrix_from_dict({"dims": [2], "re": [[1, 0], [0, 1]], "im": [[0]]})
    real_only = matrix_from_dict({"dims": [2], "re": [[0.5, 0], [0, 0.5]]})
    assert np.allclose(real_only.data, np.eye(2) / 2)


def test_matrix_dict_is_json_native(rng):
    d = matrix_to_dict(random_hermitian((2, 2), rng))
    assert json.loads(json.dumps(d)) == d


@pytest.mark.parametrize("build", [
    lambda: osd_witness(make_state("bell").rho),
    lambda: gme_witness(make_state("w3").rho),
    lambda: fidelity_witness(make_state("ghz3").vector, (2, 2, 2)),
    lambda: sn_witness(make_state("psi3").rho, None, 3),
    lambda: sn_witness(random_hermitian((3, 3), np.random.default_rng(1)), None, 5,
                       allow_heuristic=True, grid=0.1),
])
def test_witness_roundtrip(build, tmp_path):
    w = build()
    path = tmp_path / "w.json"
    save_witness(w, path)
    same_witness(load_witness(path), w)
    same_witness(witness_from_dict(json.loads(json.dumps(witness_to_dict(w)))), w)


def test_witness_dict_fields():
    d = witness_to_dict(gme_witness(make_state("w3").rho))
    assert d["kind"] == WitnessKind.GME.value
    assert d["bipartition"] == [[0], [1, 2]]
    assert set(d["certificate"]["per_bipartition_mu1"]) == {"0|12", "01|2", "02|1"}


def test_config_roundtrip(tmp_path):
    cfg = OptimizerConfig(step_size=5e-4, schedule=Schedule.OPS_ONLY, seed=42)
    path = tmp_path / "cfg.json"
    save_config(cfg, path)
    assert load_config(path) == cfg
    path.write_text(json.dumps({"step": 1}))
    with pytest.raises(ValueError):
        load_config(path)


def test_report_roundtrip(tmp_path):
    r = gme_bounds(make_state("ghz3").rho, make_state("ghz3").rho)
    path = tmp_path / "r.json"
    save_report(r, path)
    assert load_report(path) == r


def test_bipartition_survives(tmp_path):
    x = make_state("w4").rho
    w = osd_witness(x, Bipartition((0, 2), x.dims))
    path = tmp_path / "w.json"
    save_witness(w, path)
    assert load_witness(path).bipartition == Bipartition((0, 2), x.dims)
