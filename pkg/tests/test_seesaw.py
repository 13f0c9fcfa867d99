import numpy as np
import pytest

from losr.games import Game, chsh_game, evaluate
from losr.linalg import proj
from losr.randgen import random_density
from losr.resources import from_state, validate
from losr.seesaw import performance_seesaw
from losr.transforms import apply

from conftest import PHI_PLUS

TSIRELSON = np.cos(np.pi / 8) ** 2


def test_zero_payoff_gives_zero():
    g = chsh_game()
    zero = Game(g.analyzer, np.zeros(g.analyzer.shape))
    res = performance_seesaw(zero, from_state(proj(PHI_PLUS), 2, 2), restarts=2, iters=5)
    assert res.value == 0.0


def test_separable_state_stays_classical():
    rho = np.kron(random_density(2, seed=1), random_density(2, seed=2))
    res = performance_seesaw(chsh_game(), from_state(rho, 2, 2), restarts=3, iters=60)
    assert res.value <= 0.75 + 1e-6
    assert res.kind == "lower-bound"


def test_phi_plus_reaches_tsirelson():
    res = performance_seesaw(chsh_game(), from_state(proj(PHI_PLUS), 2, 2), restarts=5, iters=200)
    assert res.value >= TSIRELSON - 1e-4
    assert res.value <= TSIRELSON + 1e-6


def test_history_monotone_and_transform_reproduces_value():
    r = from_state(random_density(4, seed=3), 2, 2)
    res = performance_seesaw(chsh_game(), r, restarts=2, iters=30, seed=4)
    h = np.array(res.history)
    assert np.all(np.diff(h) >= -1e-10)
    out = apply(res.transform, r, tol=1e-8)
    assert validate(out, 1e-8) == []
    assert evaluate(chsh_game(), out) == pytest.approx(res.value, abs=1e-8)


def test_seeded_runs_are_reproducible():
    r = from_state(random_density(4, seed=5), 2, 2)
    a = performance_seesaw(chsh_game(), r, restarts=2, iters=10, seed=6)
    b = performance_seesaw(chsh_game(), r, restarts=2, iters=10, seed=6)
    assert a.value == b.value and a.restart == b.restart


def test_bad_env_mode():
    with pytest.raises(ValueError):
        performance_seesaw(chsh_game(), from_state(proj(PHI_PLUS), 2, 2), env="huge")
