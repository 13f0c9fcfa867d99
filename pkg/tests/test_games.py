import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from losr.acceptance import basis_at, chsh_quantum_box_resource
from losr.games import (
    Analyzer,
    Game,
    GameError,
    TypeMismatch,
    UnverifiedDecoder,
    box_game,
    chsh_game,
    correlations,
    evaluate,
    load_game,
    performance_exact_classical,
    pushforward,
    qudit_povm,
    qudit_preparations,
    witness_game_on_states,
)
from losr.linalg import compose_parallel, identity_choi, proj, unitary_choi
from losr.randgen import random_box, random_density, random_resource, random_unitary
from losr.resources import Wiring, deterministic_box, from_box, from_channel, from_state, pr_box
from losr.transforms import (
    LosrTransform,
    apply,
    compose,
    parse_canonical,
    sq_decode,
    sq_encode,
    stochastic_input,
    stochastic_output,
)
from losr.types import System

from conftest import PHI_PLUS, X_POVM, Z_POVM

Q2, C2, I = System.quantum(2), System.classical(2), System.trivial()
TSIRELSON = np.cos(np.pi / 8) ** 2


def random_hermitian(d, rng):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


@pytest.mark.parametrize("d", [2, 3])
def test_default_analyzer_is_complete(d):
    preps, povm = qudit_preparations(d), qudit_povm(d)
    assert len(preps) == d * d == len(povm)
    assert np.allclose(sum(povm), np.eye(d))
    assert all(np.linalg.eigvalsh(m)[0] > -1e-12 for m in povm)
    gram = np.array([[np.trace(a @ b).real for b in preps] for a in preps])
    assert abs(np.linalg.det(gram)) > 1e-9
    assert Analyzer.default(Wiring(Q2, System.quantum(d), C2, Q2)).complete


def test_incomplete_analyzer_flagged():
    z = Analyzer(Wiring(I, Q2, I, Q2), (tuple(Z_POVM), tuple(Z_POVM)), ((np.eye(1),), (np.eye(1),)))
    assert not z.complete
    with pytest.raises(GameError):
        Analyzer(Wiring(I, Q2, I, Q2), ((np.eye(2), np.eye(2)), tuple(Z_POVM)), ((np.eye(1),), (np.eye(1),)))


def test_correlations_born_rule(phi_plus_rho):
    # a local unitary on A's qubit, identity on B's: Z/X preparations, Z/X readout
    U = random_unitary(2, seed=1)
    r = from_channel(compose_parallel(unitary_choi(U), identity_choi(2)), Wiring(Q2, Q2, Q2, Q2))
    preps = (proj([1, 0]), proj(np.array([1, 1]) / np.sqrt(2)))
    z = Analyzer(r.wiring, (tuple(Z_POVM), tuple(X_POVM)), (preps, preps))
    P = correlations(z, r).P
    for a, b, x, y in itertools.product(range(2), repeat=4):
        want = np.trace(Z_POVM[a] @ U @ preps[x] @ U.conj().T).real * np.trace(X_POVM[b] @ preps[y]).real
        assert np.isclose(P[a, b, x, y], want)
    # on Phi+ with Z and X readouts
    zs = Analyzer(Wiring(I, Q2, I, Q2), (tuple(Z_POVM), tuple(X_POVM)), ((np.eye(1),), (np.eye(1),)))
    P = correlations(zs, from_state(phi_plus_rho, 2, 2)).P[:, :, 0, 0]
    want = [[np.real(PHI_PLUS @ np.kron(Z_POVM[a], X_POVM[b]) @ PHI_PLUS) for b in range(2)] for a in range(2)]
    assert np.allclose(P, want)


def test_correlations_box_passthrough():
    P = random_box(2, 3, 3, 2, seed=2)
    r = from_box(P)
    assert np.allclose(correlations(Analyzer.default(r.wiring), r).P, P)


def test_correlations_factorize_on_products():
    rho = np.kron(random_density(2, seed=3), random_density(2, seed=4))
    r = from_state(rho, 2, 2)
    P = correlations(Analyzer.default(r.wiring), r).P
    assert np.allclose(P, np.einsum("axy,bxy->abxy", P.sum(axis=1), P.sum(axis=0)))


def test_chsh_values():
    g = chsh_game()
    assert evaluate(g, from_box(pr_box())) == pytest.approx(1.0, abs=1e-15)
    best = max(evaluate(g, from_box(deterministic_box(fa, fb)))
               for fa in itertools.product(range(2), repeat=2) for fb in itertools.product(range(2), repeat=2))
    assert best == pytest.approx(0.75, abs=1e-12)
    q = evaluate(g, chsh_quantum_box_resource())
    # Born rule with the same settings, summed by hand
    A = [basis_at(0.0), basis_at(np.pi / 2)]
    B = [basis_at(np.pi / 4), basis_at(-np.pi / 4)]
    rho = proj(PHI_PLUS)
    direct = sum(0.25 * np.real(np.trace(np.kron(A[x][a], B[y][b]) @ rho))
                 for a, b, x, y in itertools.product(range(2), repeat=4) if (a ^ b) == (x & y))
    assert q == pytest.approx(direct, abs=1e-12)
    assert q == pytest.approx(TSIRELSON, abs=1e-9)


def test_evaluate_type_mismatch(phi_plus_rho):
    with pytest.raises(TypeMismatch, match="semiquantum encoder"):
        evaluate(chsh_game(), from_state(phi_plus_rho, 2, 2))


def test_witness_game_examples(phi_plus_rho):
    rho = random_density(4, seed=5)
    assert evaluate(witness_game_on_states(np.eye(4), 2, 2), from_state(rho, 2, 2)) == pytest.approx(1.0, abs=1e-10)
    g = witness_game_on_states(phi_plus_rho, 2, 2)
    assert evaluate(g, from_state(phi_plus_rho, 2, 2)) == pytest.approx(1.0, abs=1e-10)
    swap = np.eye(4)[[0, 2, 1, 3]]
    value = evaluate(witness_game_on_states(swap, 2, 2), from_state(phi_plus_rho, 2, 2))
    assert value == pytest.approx(np.trace(swap @ phi_plus_rho).real, abs=1e-10)
    assert value == pytest.approx(1.0, abs=1e-10)  # Phi+ is symmetric under the swap
    with pytest.raises(GameError):
        witness_game_on_states(np.triu(np.ones((4, 4))), 2, 2)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_witness_game_is_trace(seed):
    rng = np.random.default_rng(seed)
    W, rho = random_hermitian(6, rng), random_density(6, seed=rng)
    assert evaluate(witness_game_on_states(W, 2, 3), from_state(rho, 2, 3)) == pytest.approx(np.trace(W @ rho).real, abs=1e-10)


def test_pushforward_witness_through_encoder():
    rng = np.random.default_rng(6)
    enc = parse_canonical("sq-encode:A:2+sq-encode:B:2")
    dec = parse_canonical("sq-decode:A:2+sq-decode:B:2")
    W = random_hermitian(4, rng)
    g = pushforward(witness_game_on_states(W, 2, 2), enc, dec)
    assert str(g.type) == "QQ->CC"
    for _ in range(3):
        rho = random_density(4, seed=rng)
        value = evaluate(g, apply(enc, from_state(rho, 2, 2)))
        assert value == pytest.approx(np.trace(W @ rho).real, abs=1e-8)


def test_pushforward_steering_game_is_mdi():
    rng = np.random.default_rng(7)
    w = Wiring(C2, C2, I, Q2)
    z = Analyzer.default(w)
    g = Game(z, rng.normal(size=z.shape), "steering")
    g2 = pushforward(g, sq_encode("B", 2), sq_decode("B", 2))
    assert str(g2.type) == "CQ->CC"
    for _ in range(3):
        r = random_resource(w, seed=rng)
        assert evaluate(g2, apply(sq_encode("B", 2), r)) == pytest.approx(evaluate(g, r), abs=1e-8)


def test_pushforward_identity_and_bad_decoder():
    g = chsh_game()
    same = pushforward(g, LosrTransform.identity(), LosrTransform.identity())
    for seed in range(3):
        r = from_box(random_box(2, 2, 2, 2, seed=seed))
        assert evaluate(same, r) == pytest.approx(evaluate(g, r), abs=1e-10)
    wg = witness_game_on_states(np.eye(4), 2, 2)
    with pytest.raises(UnverifiedDecoder):
        pushforward(wg, sq_encode("A", 2), stochastic_output("A", [[0.5] * 4, [0.5] * 4]))


def test_linearity():
    rng = np.random.default_rng(8)
    w = Wiring(Q2, C2, C2, Q2)
    z = Analyzer.default(w)
    g = Game(z, rng.normal(size=z.shape))
    r1, r2 = random_resource(w, seed=rng), random_resource(w, seed=rng)
    mix = r1.mix(r2, 0.5)
    assert evaluate(g, mix) == pytest.approx(0.5 * evaluate(g, r1) + 0.5 * evaluate(g, r2), abs=1e-10)


def test_correlations_injective():
    rng = np.random.default_rng(9)
    for w in (Wiring(Q2, C2, I, Q2), Wiring(Q2, Q2, Q2, Q2), Wiring(C2, Q2, I, Q2)):
        z = Analyzer.default(w)
        for _ in range(3):
            r1, r2 = random_resource(w, seed=rng), random_resource(w, seed=rng)
            assert np.max(np.abs(r1.matrix - r2.matrix)) >= 1e-3
            diff = np.max(np.abs(correlations(z, r1).P - correlations(z, r2).P))
            assert diff >= 1e-6


def _random_classical_transform(rng, n=2):
    def kernel():
        K = rng.random((n, n))
        return K / K.sum(axis=0)

    return LosrTransform.mixture([
        (0.5, compose(stochastic_output("A", kernel()), stochastic_input("B", kernel()))),
        (0.5, compose(stochastic_input("A", kernel()), stochastic_output("B", kernel()))),
    ])


def test_performance_monotone_under_losr():
    rng = np.random.default_rng(10)
    for _ in range(20):
        r = from_box(random_box(2, 2, 2, 2, seed=rng) * 0.5 + 0.5 * pr_box().P)
        g = box_game(rng.normal(size=(2, 2, 2, 2)))
        t = _random_classical_transform(rng)
        assert performance_exact_classical(g, apply(t, r)) <= performance_exact_classical(g, r) + 1e-9


def test_performance_exact_examples(phi_plus_rho):
    g = chsh_game()
    assert performance_exact_classical(g, from_box(pr_box())) == pytest.approx(1.0, abs=1e-12)
    for seed in range(5):
        r = from_box(random_box(2, 2, 2, 2, seed=seed))
        omega = performance_exact_classical(g, r)
        assert omega <= 0.75 + 1e-12
        assert omega >= evaluate(g, r) - 1e-12
    with pytest.raises(GameError):
        performance_exact_classical(g, from_state(phi_plus_rho, 2, 2))


def _coarse_grain():
    # A merges outputs 1 and 2, B keeps x' = y
    return compose(stochastic_output("A", [[1, 0, 0], [0, 1, 1]]), stochastic_input("B", [[1, 0], [0, 1], [0, 0]]))


def test_performance_on_other_shapes():
    rng = np.random.default_rng(11)
    r = from_box(random_box(3, 2, 2, 3, seed=rng))
    g = box_game(rng.normal(size=(2, 2, 2, 2)))
    omega = performance_exact_classical(g, r)
    assert omega >= evaluate(g, apply(_coarse_grain(), r)) - 1e-12
    zero = box_game(np.zeros((2, 2, 2, 2)))
    assert performance_exact_classical(zero, r) == 0.0


def test_game_json_round_trip(tmp_path):
    g = witness_game_on_states(np.diag([1.0, -1, -1, 1]), 2, 2)
    path = tmp_path / "g.json"
    path.write_text(json.dumps(g.to_json()))
    back = load_game(str(path))
    r = from_state(random_density(4, seed=12), 2, 2)
    assert evaluate(back, r) == pytest.approx(evaluate(g, r), abs=1e-12)
    obj = g.to_json()
    obj["type"] = "CC->CC"
    path.write_text(json.dumps(obj))
    with pytest.raises(GameError):
        load_game(str(path))


def test_load_game_names(tmp_path):
    from losr.linalg import matrix_to_json

    assert load_game("chsh").name == "chsh"
    W = np.diag([1.0, -1, -1, 1])
    (tmp_path / "W.json").write_text(json.dumps({"W": matrix_to_json(W), "dA": 2, "dB": 2}))
    g = load_game(f"pushforward:witness:{tmp_path / 'W.json'}:sq-encode:A:2+sq-encode:B:2")
    assert str(g.type) == "QQ->CC"
    with pytest.raises(GameError):
        load_game("pushforward:chsh")
