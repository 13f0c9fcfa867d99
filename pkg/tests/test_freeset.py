import itertools

import numpy as np
import pytest

from losr.acceptance import basis_at
from losr.freeset import (
    FreeVerdict,
    assemblage_is_unsteerable,
    box_convertible,
    box_is_local,
    deterministic_boxes,
    state_is_ppt,
    werner_state,
)
from losr.linalg import proj
from losr.randgen import random_box, random_density, random_pure
from losr.resources import Assemblage, assemblage_from_state, box_from_state, deterministic_box, pr_box

from conftest import PHI_PLUS, SINGLET, X_POVM, Z_POVM

FREE, NONFREE, INCONCLUSIVE = FreeVerdict.FREE, FreeVerdict.NONFREE, FreeVerdict.INCONCLUSIVE


def pr_variant(alpha, beta, gamma):
    P = np.zeros((2, 2, 2, 2))
    for a, b, x, y in np.ndindex(P.shape):
        P[a, b, x, y] = 0.5 * ((a ^ b) == ((x & y) ^ (alpha & x) ^ (beta & y) ^ gamma))
    return P


def chsh_local(P):
    """Local iff every CHSH inequality holds (binary inputs and outputs)."""
    E = np.einsum("abxy,ab->xy", P, np.array([[1, -1], [-1, 1]]))
    s = E.reshape(-1)
    return all(abs(s @ np.array(sign)) <= 2 + 1e-9 for sign in
               ([-1, 1, 1, 1], [1, -1, 1, 1], [1, 1, -1, 1], [1, 1, 1, -1]))


def check_certificate(rep, P):
    c = rep.certificate
    if rep.verdict is FREE:
        assert c["error"] < 1e-7
    elif rep.verdict is NONFREE:
        D, _ = deterministic_boxes(*P.shape)
        bound = np.max(D @ c["F"].reshape(-1))
        assert np.isclose(bound, c["bound"])
        assert np.sum(c["F"] * P) > bound + 1e-9


def test_box_examples():
    rep = box_is_local(pr_box())
    assert rep.verdict is NONFREE
    assert rep.certificate["value"] == pytest.approx(1.0) and rep.certificate["bound"] == pytest.approx(0.75)
    assert box_is_local(np.full((2, 2, 2, 2), 0.25)).verdict is FREE
    A = [basis_at(0.0), basis_at(np.pi / 2)]
    B = [basis_at(np.pi / 4), basis_at(-np.pi / 4)]
    q = box_from_state(proj(PHI_PLUS), A, B, 2, 2)
    rep = box_is_local(q)
    assert rep.verdict is NONFREE
    check_certificate(rep, q.P)


def test_box_is_local_matches_chsh_facets():
    rng = np.random.default_rng(0)
    prs = [pr_variant(*bits) for bits in itertools.product(range(2), repeat=3)]
    D, _ = deterministic_boxes(2, 2, 2, 2)
    seen = set()
    for _ in range(60):
        w = rng.dirichlet(np.full(4, 0.5))
        P = w[0] * prs[rng.integers(8)] + w[1] * prs[rng.integers(8)] \
            + w[2] * D[rng.integers(16)].reshape(2, 2, 2, 2) + w[3] * 0.25
        rep = box_is_local(P)
        assert (rep.verdict is FREE) == chsh_local(P)
        check_certificate(rep, P)
        seen.add(rep.verdict)
    assert seen == {FREE, NONFREE}


def test_box_decomposition_reconstructs():
    P = random_box(3, 2, 2, 3, seed=1)
    rep = box_is_local(P)
    assert rep.verdict is FREE
    D, labels = deterministic_boxes(3, 2, 2, 3)
    index = {lab: i for i, lab in enumerate(labels)}
    rows = [index[lab] for lab in rep.certificate["vertices"]]
    assert np.max(np.abs(rep.certificate["weights"] @ D[rows] - P.reshape(-1))) < 1e-7


def test_werner_ppt_examples():
    assert state_is_ppt(werner_state(0.5), 2, 2).verdict is NONFREE
    assert state_is_ppt(werner_state(0.2), 2, 2).verdict is FREE
    assert state_is_ppt(werner_state(1 / 3), 2, 2).verdict is FREE
    for p in np.linspace(0, 1, 11):
        rep = state_is_ppt(werner_state(p), 2, 2)
        lmin = rep.certificate["min_eig"]
        assert abs(lmin - (1 - 3 * p) / 4) < 1e-12


def test_ppt_witness_separates():
    rho = werner_state(0.8)
    rep = state_is_ppt(rho, 2, 2)
    F = rep.certificate["F"]
    assert np.trace(F @ rho).real > 0
    rng = np.random.default_rng(2)
    for _ in range(20):
        sep = np.kron(random_density(2, seed=rng), random_density(2, seed=rng))
        assert np.trace(F @ sep).real <= 1e-12


def test_ppt_outside_small_dims_is_inconclusive():
    assert state_is_ppt(np.eye(9) / 9, 3, 3).verdict is INCONCLUSIVE
    with pytest.raises(ValueError):
        state_is_ppt(np.eye(4) / 4, 2, 3)


def test_steering_examples():
    prod = assemblage_from_state(np.kron(random_density(2, seed=3), random_density(2, seed=4)), [Z_POVM, X_POVM], 2, 2)
    rep = assemblage_is_unsteerable(prod)
    assert rep.verdict is FREE
    sing = assemblage_from_state(proj(SINGLET), [Z_POVM, X_POVM], 2, 2)
    rep = assemblage_is_unsteerable(sing)
    assert rep.verdict is NONFREE
    # re-verify: the value on the assemblage beats every deterministic response
    F, sigma = rep.certificate["F"], sing.sigma
    value = np.real(np.einsum("xaij,xaji->", F, sigma))
    lhs = max(np.linalg.eigvalsh(sum(F[x, lam[x]] for x in range(2)))[-1]
              for lam in itertools.product(range(2), repeat=2))
    assert value == pytest.approx(rep.certificate["value"]) and lhs == pytest.approx(rep.certificate["bound"])
    assert value > lhs + 1e-9
    w = assemblage_from_state(werner_state(0.3), [Z_POVM, X_POVM], 2, 2)
    rep = assemblage_is_unsteerable(w)
    assert rep.verdict is FREE
    hidden = rep.certificate["hidden_states"]
    recon = np.zeros_like(w.sigma)
    for lam, h in zip(rep.certificate["responses"], hidden):
        for x in range(2):
            recon[x, lam[x]] += h
    assert np.max(np.abs(recon - w.sigma)) < 1e-7
    assert all(np.linalg.eigvalsh(h)[0] >= -1e-12 for h in hidden)


def _random_assemblage(rng):
    rho = 0.5 * random_density(4, seed=rng) + 0.5 * np.eye(4) / 4
    povms = []
    for _ in range(3):
        v = proj(random_pure(2, seed=rng))
        povms.append([v, np.eye(2) - v])
    return assemblage_from_state(rho, povms, 2, 2)


def test_steering_iteration_cap_is_inconclusive():
    rng = np.random.default_rng(0)
    verdicts = [assemblage_is_unsteerable(_random_assemblage(rng), max_iter=2, check_every=1).verdict
                for _ in range(30)]
    assert INCONCLUSIVE in verdicts
    rng = np.random.default_rng(0)
    capped = [a for a, v in zip((_random_assemblage(rng) for _ in range(30)), verdicts) if v is INCONCLUSIVE]
    # with the default cap the same assemblages are decided
    assert all(assemblage_is_unsteerable(a).verdict is not INCONCLUSIVE for a in capped)


def test_three_setting_threshold():
    Y = [proj(np.array([1, 1j]) / np.sqrt(2)), proj(np.array([1, -1j]) / np.sqrt(2))]
    for p, want in ((0.57, FREE), (0.58, NONFREE)):
        a = assemblage_from_state(werner_state(p), [Z_POVM, X_POVM, Y], 2, 2)
        assert assemblage_is_unsteerable(a).verdict is want


def test_steering_rejects_invalid_assemblage():
    bad = np.zeros((2, 2, 2, 2), dtype=complex)
    bad[0, 0] = np.eye(2)
    bad[1, 1] = np.diag([1.0, 0])
    with pytest.raises(ValueError):
        assemblage_is_unsteerable(Assemblage(bad))


def test_werner_045_boxes_all_local():
    rho = werner_state(0.45)
    assert state_is_ppt(rho, 2, 2).verdict is NONFREE
    angles = np.linspace(0, np.pi, 5)
    pairs = [(a, b) for a in angles for b in angles[:4]]
    assert len(pairs) == 20
    for ta, tb in pairs:
        A = [basis_at(0.0), basis_at(ta)]
        B = [basis_at(tb), basis_at(tb + np.pi / 2)]
        assert box_is_local(box_from_state(rho, A, B, 2, 2)).verdict is FREE


def test_box_conversion_examples():
    local = deterministic_box([0, 1], [1, 1])
    assert box_convertible(pr_box(), local).verdict is FREE
    rep = box_convertible(deterministic_box([0, 0], [0, 0]), pr_box())
    assert rep.verdict is NONFREE
    assert rep.certificate["value"] > rep.certificate["bound"] + 1e-9
    assert rep.certificate["bound"] <= 0.75 + 1e-9
    P = random_box(2, 2, 2, 2, seed=5)
    assert box_convertible(P, P).verdict is FREE


def test_free_to_free_stays_free():
    rng = np.random.default_rng(6)
    for _ in range(20):
        p = random_box(2, 2, 2, 2, seed=rng)
        q = 0.5 * random_box(2, 2, 2, 2, seed=rng) + 0.5 * pr_box().P
        if box_convertible(p, q).verdict is FREE:
            assert box_is_local(q).verdict is FREE
        q2 = random_box(2, 2, 2, 2, seed=rng)
        if box_convertible(p, q2).verdict is FREE:
            assert box_is_local(q2).verdict is FREE


def test_report_json():
    rep = box_is_local(pr_box())
    obj = rep.to_json()
    assert obj["verdict"] == "NonFree" and obj["certificate"]["kind"] == "dual"
    assert obj["certificate"]["bound"] == pytest.approx(0.75)
    assert np.array(obj["certificate"]["F"]).shape == (2, 2, 2, 2)
