import json

import numpy as np
import pytest

from losr import io
from losr.linalg import matrix_to_json, proj
from losr.randgen import random_box, random_density, random_resource
from losr.resources import Wiring, assemblage_from_state, from_state, validate
from losr.types import System

from conftest import PHI_PLUS, X_POVM, Z_POVM


def test_resource_round_trip(tmp_path):
    r = random_resource(Wiring(System.quantum(2), System.classical(4), System.trivial(), System.quantum(3)), seed=1)
    path = tmp_path / "r.json"
    io.dump_json(io.resource_to_json(r), path)
    back = io.load_resource(path)
    assert back.wiring == r.wiring
    assert np.max(np.abs(back.matrix - r.matrix)) < 1e-12


def test_compact_encodings(tmp_path):
    P = random_box(2, 2, 2, 2, seed=2)
    assert np.allclose(io.box_from_json(io.box_to_json(io.box_from_json({"P": P.tolist()}))).P, P)
    a = assemblage_from_state(random_density(4, seed=3), [Z_POVM, X_POVM], 2, 2)
    assert np.allclose(io.assemblage_from_json(io.assemblage_to_json(a)).sigma, a.sigma)
    rho = proj(PHI_PLUS)
    back, dA, dB = io.state_from_json(io.state_to_json(rho, 2, 2))
    assert (dA, dB) == (2, 2) and np.allclose(back, rho)
    # a state resource file also serves as a state
    back, dA, dB = io.state_from_json(io.resource_to_json(from_state(rho, 2, 2)))
    assert np.allclose(back, rho)


def test_choi_files_are_not_validated_on_load(tmp_path):
    w = Wiring(System.quantum(2), System.trivial(), System.trivial(), System.quantum(2))
    obj = {"wiring": w.to_json(), "choi": matrix_to_json(proj(PHI_PLUS) * 2)}
    r = io.resource_from_json(obj)
    assert validate(r)


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(io.ParseError):
        io.load_json(bad)
    with pytest.raises(io.ParseError):
        io.load_json(tmp_path / "missing.json")
    with pytest.raises(io.ParseError):
        io.resource_from_json({"nothing": 1})
    with pytest.raises(io.ParseError):
        io.resource_from_json([1, 2])
    w = Wiring(System.quantum(2), System.quantum(2), System.trivial(), System.trivial())
    with pytest.raises(io.ParseError):
        io.resource_from_json({"wiring": w.to_json(), "choi": matrix_to_json(np.eye(2))})


def test_sha256(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"a": 1}))
    assert io.sha256_file(p) == io.sha256_file(p) and len(io.sha256_file(p)) == 64
