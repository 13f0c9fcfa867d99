import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from losr.linalg import ChoiOperator, choi_from_map, dephase, identity_choi, proj
from losr.randgen import random_box, random_density, random_free_resource, random_resource
from losr.resources import (
    Assemblage,
    CorrelationTable,
    InvalidResource,
    Resource,
    Wiring,
    assemblage_from_state,
    box_wiring,
    from_assemblage,
    from_box,
    from_channel,
    from_state,
    pr_box,
    to_assemblage,
    to_box,
    validate,
)
from losr.transforms import apply, sq_encode
from losr.types import System

from conftest import PHI_PLUS, SINGLET, X_POVM, Z_POVM

Q2, C2, I = System.quantum(2), System.classical(2), System.trivial()

# the wirings of the ten named resource kinds
FIG1 = {
    "II->QQ": Wiring(I, Q2, I, Q2),
    "CC->CC": Wiring(C2, C2, C2, C2),
    "CI->CQ": Wiring(C2, C2, I, Q2),
    "QI->CQ": Wiring(Q2, C2, I, Q2),
    "QQ->CC": Wiring(Q2, C2, Q2, C2),
    "CQ->CC": Wiring(C2, C2, Q2, C2),
    "CQ->CQ": Wiring(C2, C2, Q2, Q2),
    "CC->CQ": Wiring(C2, C2, C2, Q2),
    "CC->QQ": Wiring(C2, Q2, C2, Q2),
    "QQ->QQ": Wiring(Q2, Q2, Q2, Q2),
}


def names(violations):
    return {v.check for v in violations}


def test_state_examples(phi_plus_rho):
    r = from_state(phi_plus_rho, 2, 2)
    assert validate(r) == [] and str(r.type) == "II->QQ"
    assert validate(from_state(np.eye(4) / 4, 2, 2)) == []
    with pytest.raises(ValueError):
        from_state(2 * phi_plus_rho, 2, 2)


def test_signaling_identity_flagged():
    w = Wiring(Q2, I, I, Q2)  # A's input goes straight to B's output
    r = Resource(w, identity_choi(2))
    assert "nonsignaling A->B" in names(validate(r))
    with pytest.raises(InvalidResource):
        from_channel(identity_choi(2), w)


def test_subnormalized_box_tp_violation():
    P = 0.9 * pr_box().P
    r = Resource(box_wiring(2, 2, 2, 2), ChoiOperator(np.diag(P.reshape(-1)).astype(complex), 4, 4))
    (v,) = [v for v in validate(r) if v.check == "tp"]
    assert np.isclose(v.magnitude, 0.1)


def test_box_examples():
    r = from_box(pr_box())
    assert validate(r) == [] and str(r.type) == "CC->CC"
    assert np.allclose(pr_box().P.sum(axis=1), 0.5) and np.allclose(pr_box().P.sum(axis=0), 0.5)
    coins = np.full((2, 2, 2, 2), 0.25)
    assert validate(from_box(coins)) == []
    sig = np.zeros((2, 2, 2, 2))
    for a, b, x, y in np.ndindex(sig.shape):
        sig[a, b, x, y] = 0.5 * (b == x)  # B's output reveals A's input
    with pytest.raises(InvalidResource):
        from_box(sig)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(2, 3), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_box_round_trip_exact(nA, nB, nX, nY, seed):
    P = random_box(nA, nB, nX, nY, seed=seed)
    assert np.array_equal(to_box(from_box(P)).P, P)


def test_assemblage_examples():
    a = assemblage_from_state(proj(SINGLET), [Z_POVM, X_POVM], 2, 2)
    r = from_assemblage(a, 2)
    assert validate(r) == [] and str(r.type) == "CI->CQ"
    # each conditional state is pure: the anti-aligned partner of A's outcome
    for x, povm in enumerate([Z_POVM, X_POVM]):
        for k, m in enumerate(povm):
            s = a.sigma[x, k]
            assert np.isclose(np.trace(s).real, 0.5)
            assert np.allclose(s, 0.5 * povm[1 - k].T)
    prod = assemblage_from_state(np.kron(random_density(2, seed=1), random_density(2, seed=2)), [Z_POVM, X_POVM], 2, 2)
    assert validate(from_assemblage(prod)) == []
    bad = np.array(a.sigma)
    bad[1] = [np.diag([0.5, 0]), np.diag([0.5, 0])]
    with pytest.raises(InvalidResource):
        from_assemblage(Assemblage(bad))


def test_assemblage_round_trip():
    a = assemblage_from_state(random_density(4, seed=3), [Z_POVM, X_POVM], 2, 2)
    assert np.max(np.abs(to_assemblage(from_assemblage(a)).sigma - a.sigma)) < 1e-12


def test_channel_examples(phi_plus_rho):
    enc = sq_encode("A", 2)
    enc = apply(sq_encode("B", 2), apply(enc, from_state(phi_plus_rho, 2, 2)))
    assert str(enc.type) == "QQ->CC" and validate(enc) == []
    # identity on A, B's input discarded
    J = np.kron(identity_choi(2).matrix, np.eye(2))
    assert validate(from_channel(J, Wiring(Q2, Q2, Q2, I))) == []
    swap = choi_from_map(lambda m: m.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4), 4, 4)
    v = names(validate(Resource(Wiring(Q2, Q2, Q2, Q2), swap)))
    assert {"nonsignaling A->B", "nonsignaling B->A"} <= v


@pytest.mark.parametrize("kind", sorted(FIG1))
def test_named_kinds_validate_and_dephase(kind):
    w = FIG1[kind]
    for r in (random_free_resource(w, seed=11), random_resource(w, seed=12)):
        assert validate(r) == []
        assert str(r.type) == kind
        for k, s in enumerate(w.systems):
            if s.kind.name == "C":
                assert np.max(np.abs(dephase(r.matrix, w.dims, [k]) - r.matrix)) < 1e-12


def test_classical_factor_must_be_diagonal():
    w = Wiring(I, C2, I, Q2)
    r = Resource(w, ChoiOperator(proj(PHI_PLUS), 4, 1))
    assert "classical A_out" in names(validate(r))


def test_mix_is_convex():
    w = FIG1["CQ->CC"]
    r1, r2 = random_resource(w, seed=1), random_resource(w, seed=2)
    m = r1.mix(r2, 0.3)
    assert validate(m) == []
    assert np.allclose(m.matrix, 0.3 * r1.matrix + 0.7 * r2.matrix)


def test_table_problems():
    t = CorrelationTable(np.full((2, 2, 2, 2), 0.25))
    assert t.problems() == []
    with pytest.raises(ValueError):
        CorrelationTable(np.zeros((2, 2, 2)))


def test_wiring_json_round_trip():
    for w in FIG1.values():
        assert Wiring.parse(w.to_json()) == w
    with pytest.raises(ValueError):
        Wiring.parse({"A": {"in": "Q:2"}})
