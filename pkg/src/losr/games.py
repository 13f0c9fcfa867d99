"""Games as linear functionals on resources.

A game is an analyzer (preparations on every input, a POVM on every output)
together with a real payoff table ``F[a, b, x, y]``.  Its value on a resource
is ``sum F * P`` where ``P`` is the correlation table the analyzer extracts.
Input distributions are folded into ``F``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    LabeledOp,
    as_matrix,
    herm_eigvals,
    is_hermitian,
    matrix_from_json,
    matrix_to_json,
)
from .randgen import random_resource
from .resources import LABELS, CorrelationTable, Resource, Wiring, box_wiring
from .transforms import LosrTransform, adjoint_functional, apply_raw
from .types import Kind, System


class GameError(ValueError):
    pass


class TypeMismatch(GameError):
    pass


class UnverifiedDecoder(GameError):
    pass


# --------------------------------------------------------------------------
# analyzers


def qudit_preparations(d: int) -> list[np.ndarray]:
    """The d**2 states |j>, (|j>+|k>)/sqrt2 and (|j>+i|k>)/sqrt2 for j<k."""
    basis = np.eye(d, dtype=complex)
    vecs = [basis[j] for j in range(d)]
    for j in range(d):
        for k in range(j + 1, d):
            vecs.append((basis[j] + basis[k]) / np.sqrt(2))
            vecs.append((basis[j] + 1j * basis[k]) / np.sqrt(2))
    return [np.outer(v, v.conj()) for v in vecs]


def qudit_povm(d: int) -> list[np.ndarray]:
    """Informationally complete POVM: the preparation projectors rescaled by S^(-1/2)."""
    projs = qudit_preparations(d)
    S = sum(projs)
    w, U = np.linalg.eigh(S)
    Sih = (U * w ** -0.5) @ U.conj().T
    return [Sih @ p @ Sih for p in projs]


def default_preparations(sys: System) -> list[np.ndarray]:
    if sys.kind is Kind.Q:
        return qudit_preparations(sys.dim)
    return [np.diag(np.eye(sys.dim)[x]).astype(complex) for x in range(sys.dim)]


def default_povm(sys: System) -> list[np.ndarray]:
    if sys.kind is Kind.Q:
        return qudit_povm(sys.dim)
    return [np.diag(np.eye(sys.dim)[a]).astype(complex) for a in range(sys.dim)]


def _span_rank(ops: Sequence[np.ndarray]) -> int:
    return np.linalg.matrix_rank(np.array([o.reshape(-1) for o in ops]), tol=1e-9)


@dataclass(frozen=True)
class Analyzer:
    """Preparations for the inputs and POVMs for the outputs of a wiring.

    ``effects`` holds (Ao, Bo) POVMs, ``preparations`` holds (Ai, Bi) states.
    """

    wiring: Wiring
    effects: tuple[tuple[np.ndarray, ...], tuple[np.ndarray, ...]]
    preparations: tuple[tuple[np.ndarray, ...], tuple[np.ndarray, ...]]
    complete: bool = field(init=False)

    def __post_init__(self):
        dAo, dBo, dAi, dBi = self.wiring.dims
        eff = tuple(tuple(as_matrix(m) for m in es) for es in self.effects)
        prep = tuple(tuple(as_matrix(m) for m in ps) for ps in self.preparations)
        for es, d in zip(eff, (dAo, dBo)):
            if not es or any(m.shape != (d, d) for m in es):
                raise GameError(f"POVM effects must be {d}x{d}")
            if any(not is_hermitian(m) or herm_eigvals(m)[0] < -DEFAULT_TOL for m in es):
                raise GameError("POVM effects must be positive semidefinite")
            if np.max(np.abs(sum(es) - np.eye(d))) > 1e-9:
                raise GameError("POVM effects do not sum to the identity")
        for ps, d in zip(prep, (dAi, dBi)):
            if not ps or any(m.shape != (d, d) for m in ps):
                raise GameError(f"preparations must be {d}x{d}")
            if any(abs(np.trace(m) - 1) > 1e-9 or herm_eigvals(m)[0] < -DEFAULT_TOL for m in ps):
                raise GameError("preparations must be density matrices")
        object.__setattr__(self, "effects", eff)
        object.__setattr__(self, "preparations", prep)
        # classical systems only need to span the diagonal
        need = [s.dim ** 2 if s.kind is Kind.Q else s.dim for s in self.wiring.systems]
        have = [_span_rank(ops) for ops in (*eff, *prep)]
        object.__setattr__(self, "complete", all(h >= n for h, n in zip(have, need)))

    @classmethod
    def default(cls, wiring: Wiring) -> "Analyzer":
        Ao, Bo, Ai, Bi = wiring.systems
        return cls(
            wiring,
            (tuple(default_povm(Ao)), tuple(default_povm(Bo))),
            (tuple(default_preparations(Ai)), tuple(default_preparations(Bi))),
        )

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (len(self.effects[0]), len(self.effects[1]), len(self.preparations[0]), len(self.preparations[1]))

    def factor_functionals(self) -> list[np.ndarray]:
        """Per-factor stacks of functional tensors, in (Ao, Bo, Ai, Bi) order.

        Pairing with a Choi operator is elementwise, so an effect ``M``
        contributes ``M^T`` and a preparation ``rho`` contributes ``rho``.
        """
        out = [np.array([m.T for m in es]) for es in self.effects]
        out += [np.array(ps) for ps in self.preparations]
        return out

    def to_json(self) -> dict:
        return {
            "effects": [[matrix_to_json(m) for m in es] for es in self.effects],
            "preparations": [[matrix_to_json(m) for m in ps] for ps in self.preparations],
        }

    @classmethod
    def from_json(cls, wiring: Wiring, obj: dict) -> "Analyzer":
        eff = tuple(tuple(matrix_from_json(m) for m in es) for es in obj["effects"])
        prep = tuple(tuple(matrix_from_json(m) for m in ps) for ps in obj["preparations"])
        return cls(wiring, eff, prep)


def _choi_tensor(r: Resource) -> np.ndarray:
    d = r.wiring.dims
    return r.matrix.reshape(*d, *d)


def correlations(z: Analyzer, r: Resource) -> CorrelationTable:
    """P(ab|xy) = Tr[(M_a (x) N_b) E(rho_x (x) rho_y)]."""
    if r.wiring != z.wiring:
        raise TypeMismatch(f"analyzer is for {z.wiring}, resource is {r.wiring}")
    LA, LB, RA, RB = z.factor_functionals()
    T = _choi_tensor(r)
    P = np.einsum("apq,brs,xtu,yvw,prtvqsuw->abxy", LA, LB, RA, RB, T, optimize=True)
    if np.max(np.abs(P.imag)) > 1e-9:
        raise GameError("correlation table has a non-negligible imaginary part")
    return CorrelationTable(P.real)


# --------------------------------------------------------------------------
# games


@dataclass(frozen=True)
class Game:
    analyzer: Analyzer
    payoff: np.ndarray
    name: str = "game"

    def __post_init__(self):
        F = np.asarray(self.payoff, dtype=float)
        if F.shape != self.analyzer.shape:
            raise GameError(f"payoff shape {F.shape} does not match analyzer {self.analyzer.shape}")
        if not np.all(np.isfinite(F)):
            raise GameError("payoff entries must be finite")
        object.__setattr__(self, "payoff", F)

    @property
    def wiring(self) -> Wiring:
        return self.analyzer.wiring

    @property
    def type(self):
        return self.wiring.global_type

    def functional(self) -> LabeledOp:
        """The game as a tensor that pairs elementwise with Choi operators."""
        LA, LB, RA, RB = self.analyzer.factor_functionals()
        T = np.einsum("abxy,apq,brs,xtu,yvw->prtvqsuw", self.payoff, LA, LB, RA, RB, optimize=True)
        return LabeledOp(T, LABELS)

    def to_json(self) -> dict:
        return {
            "type": str(self.type),
            "wiring": self.wiring.to_json(),
            "analyzer": self.analyzer.to_json(),
            "payoff": {"F": self.payoff.tolist()},
            "name": self.name,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Game":
        wiring = Wiring.parse(obj["wiring"])
        if "type" in obj and str(wiring.global_type) != obj["type"].replace(" ", ""):
            raise GameError(f"declared type {obj['type']} does not match wiring {wiring}")
        return cls(Analyzer.from_json(wiring, obj["analyzer"]), np.asarray(obj["payoff"]["F"]), obj.get("name", "game"))


def evaluate(g: Game, r: Resource) -> float:
    """sum_abxy F(abxy) P(ab|xy); the resource must have exactly the game's type."""
    if r.wiring != g.wiring:
        raise TypeMismatch(
            f"game expects {g.wiring} but resource is {r.wiring}; "
            "convert the resource explicitly first (for example with the semiquantum encoder)"
        )
    return float(np.sum(g.payoff * correlations(g.analyzer, r).P))


def box_game(F) -> Game:
    F = np.asarray(F, dtype=float)
    return Game(Analyzer.default(box_wiring(*F.shape)), F, "box")


def chsh_payoff() -> np.ndarray:
    F = np.zeros((2, 2, 2, 2))
    for a, b, x, y in np.ndindex(F.shape):
        F[a, b, x, y] = 0.25 * ((a ^ b) == (x & y))
    return F


def chsh_game() -> Game:
    return Game(Analyzer.default(box_wiring(2, 2, 2, 2)), chsh_payoff(), "chsh")


def solve_payoff(z: Analyzer, functional: LabeledOp, check_tol: float = 1e-8) -> np.ndarray:
    """Find real ``F`` whose analyzer functional matches ``functional``.

    Coefficients are obtained per factor from the pseudo-inverse of the
    analyzer's frame.  On classical factors only the diagonal is matched,
    which is all that a valid resource of that type can see.
    """
    L = functional.reorder(LABELS).tensor
    for k, fs in enumerate(z.factor_functionals()):
        n, d, _ = fs.shape
        B = fs.reshape(n, d * d).T  # column j is factor functional j
        L = _contract_factor(L, k, np.linalg.pinv(B))
    if np.max(np.abs(L.imag)) > check_tol * max(1.0, np.max(np.abs(L))):
        raise GameError("functional is not real on the analyzer frame")
    return np.ascontiguousarray(L.real)


def _contract_factor(L: np.ndarray, k: int, pinv: np.ndarray) -> np.ndarray:
    """Replace the k-th remaining (row, col) factor of ``L`` by frame coefficients.

    ``L`` has already-solved coefficient axes first, then (rows..., cols...)
    of the unsolved factors.
    """
    n_solved = k
    rest = L.ndim - n_solved
    m = rest // 2
    r_ax, c_ax = n_solved, n_solved + m
    d = L.shape[r_ax]
    moved = np.moveaxis(L, (r_ax, c_ax), (-2, -1))
    flat = moved.reshape(*moved.shape[:-2], d * d)
    coef = flat @ pinv.T  # (..., n)
    coef = np.moveaxis(coef, -1, n_solved)
    return coef


def witness_game_on_states(W, dA: int, dB: int) -> Game:
    """A game of type II->QQ with value Tr(W rho) on the state rho."""
    W = as_matrix(W)
    if W.shape != (dA * dB, dA * dB):
        raise GameError(f"W must be {dA * dB}x{dA * dB}")
    if not is_hermitian(W):
        raise GameError("W must be Hermitian")
    wiring = Wiring(System.trivial(), System.quantum(dA), System.trivial(), System.quantum(dB))
    z = Analyzer.default(wiring)
    # Tr(W rho) pairs rho elementwise with W^T
    L = LabeledOp.from_matrix(W.T, LABELS, wiring.dims)
    return Game(z, solve_payoff(z, L), "witness")


def linear_game(wiring: Wiring, functional: LabeledOp, name: str = "linear") -> Game:
    z = Analyzer.default(wiring)
    return Game(z, solve_payoff(z, functional), name)


def verify_decoder(enc: LosrTransform, dec: LosrTransform, wiring: Wiring, n_probes: int = 3,
                   seed=0, tol: float = 1e-8) -> float:
    """Max Frobenius error of dec(enc(r)) vs r over random probe resources."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_probes):
        r = random_resource(wiring, seed=rng)
        back = apply_raw(dec, apply_raw(enc, r))
        if back.wiring.dims != r.wiring.dims:
            raise UnverifiedDecoder(f"decoder returns {back.wiring}, expected {r.wiring}")
        worst = max(worst, float(np.linalg.norm(back.matrix - r.matrix)))
    if worst > tol:
        raise UnverifiedDecoder(f"decoder does not invert encoder on probes (error {worst:.3g})")
    return worst


def pushforward(g: Game, enc: LosrTransform, dec: LosrTransform, n_probes: int = 3, seed=0) -> Game:
    """The game G(E) := g(dec(E)) on the encoder's output type.

    ``dec`` must undo ``enc``; this is checked on random probes before the
    game is built, so that evaluating the result on ``enc(r)`` gives ``g(r)``.
    """
    verify_decoder(enc, dec, g.wiring, n_probes, seed)
    target = enc.output_wiring(g.wiring)
    back = dec.output_wiring(target)
    if back.dims != g.wiring.dims:
        raise UnverifiedDecoder(f"decoder maps {target} to {back}, expected {g.wiring}")
    L = adjoint_functional(dec, g.functional(), target)
    return linear_game(target, L, f"pushforward({g.name})")


# --------------------------------------------------------------------------
# exact performance for classical types


def _is_classical(w: Wiring) -> bool:
    return all(s.kind is not Kind.Q for s in w.systems)


def performance_exact_classical(g: Game, r: Resource, max_wirings: int = 5_000_000) -> float:
    """Exact optimum of g over LOSR transforms of a fully classical resource.

    The objective is linear in the transform, so it is attained at a
    deterministic pair of wirings; one party is enumerated and the other
    plays its closed-form best response.
    """
    if not (_is_classical(g.wiring) and _is_classical(r.wiring)):
        raise GameError("exact performance requires fully classical types")
    from .resources import to_box
    from .kernels import best_wiring_value

    P = to_box(r).P
    return best_wiring_value(g.payoff, P, max_wirings=max_wirings)


def load_game(spec: str, base_dir: Optional[str] = None) -> Game:
    """Resolve built-in names (``chsh``, ``witness:<file>``,
    ``pushforward:<game>:<encoder>``) or a JSON game file."""
    from .transforms import parse_canonical

    if spec == "chsh":
        return chsh_game()
    if spec.startswith("witness:"):
        with open(spec.split(":", 1)[1]) as fh:
            obj = json.load(fh)
        W = matrix_from_json(obj["W"]) if "W" in obj else matrix_from_json(obj)
        dA = int(obj.get("dA", int(round(np.sqrt(W.shape[0])))))
        dB = int(obj.get("dB", W.shape[0] // dA))
        return witness_game_on_states(W, dA, dB)
    if spec.startswith("pushforward:"):
        rest = spec[len("pushforward:"):]
        inner, enc_spec = _split_pushforward(rest)
        g = load_game(inner)
        enc = parse_canonical(enc_spec)
        dec = parse_canonical(enc_spec.replace("sq-encode", "sq-decode"))
        return pushforward(g, enc, dec)
    with open(spec) as fh:
        return Game.from_json(json.load(fh))


def _split_pushforward(rest: str) -> tuple[str, str]:
    """Split ``<game>:<encoder>`` where the encoder itself contains colons."""
    idx = rest.find("sq-encode")
    if idx <= 0 or rest[idx - 1] != ":":
        raise GameError(f"cannot parse pushforward spec {rest!r}; expected <game>:sq-encode:<party>:<d>")
    return rest[: idx - 1], rest[idx:]
