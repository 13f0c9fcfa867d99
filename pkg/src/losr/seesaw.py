"""See-saw lower bounds on the performance of a resource in a game.

Each of the four comb blocks (pre and post map of each party) is held as a
Stinespring isometry.  With the other three blocks fixed, the game value is
a Hermitian quadratic form in the isometry; adding a multiple of the
identity makes it convex, and maximizing its linearization over isometries
is a polar decomposition.  This minorize-maximize step never decreases the
value, so the history of every restart is monotone.

The result is a lower bound on the optimal performance: the search is
local and the memory dimension is fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .games import Game, evaluate
from .linalg import ChoiOperator, LabeledOp, dephase, link
from .randgen import random_isometry
from .resources import Resource
from .transforms import ExplicitComb, LosrTransform, apply
from .types import Kind


@dataclass
class SeesawResult:
    value: float
    transform: LosrTransform
    restart: int
    history: list[float] = field(default_factory=list)
    kind: str = "lower-bound"


@dataclass
class _Block:
    labels: tuple[str, ...]  # output labels then input label(s)
    d_out: int
    d_in: int
    V: np.ndarray  # (d_out * env, d_in)

    @property
    def env_dim(self) -> int:
        return self.V.shape[0] // self.d_out

    def kraus(self) -> np.ndarray:
        return self.V.reshape(self.d_out, self.env_dim, self.d_in)

    def choi(self) -> np.ndarray:
        K = self.kraus()
        return np.einsum("oki,pkj->oipj", K, K.conj()).reshape(self.d_out * self.d_in, -1)

    def op(self, dims: tuple[int, ...]) -> LabeledOp:
        return LabeledOp.from_matrix(self.choi(), self.labels, dims)


def _polar(G: np.ndarray) -> np.ndarray:
    U, _, Wh = np.linalg.svd(G, full_matrices=False)
    return U @ Wh


class _Problem:
    def __init__(self, g: Game, r: Resource, mem: int, env: str = "min"):
        self.g, self.r, self.mem, self.env_mode = g, r, mem, env
        self.J = r.labeled()
        star = {l: l + "*" for l in ("Ao", "Bo", "Ai", "Bi")}
        self.L = g.functional().relabel(star)
        self.specs = []  # (labels, dims, d_out, d_in)
        for party in ("A", "B"):
            r_in, r_out = r.wiring.party(party)
            n_in, n_out = g.wiring.party(party)
            p = party
            self.specs.append(((f"{p}i", f"{p}m", f"{p}i*"), (r_in.dim, mem, n_in.dim), r_in.dim * mem, n_in.dim))
            self.specs.append(((f"{p}o*", f"{p}o", f"{p}m"), (n_out.dim, r_out.dim, mem), n_out.dim, r_out.dim * mem))

    def init_blocks(self, rng) -> list[_Block]:
        blocks = []
        for labels, _, d_out, d_in in self.specs:
            # a minimal dilation starts far from the depolarizing channel,
            # which otherwise drags restarts into the classical optimum
            env = -(-d_in // d_out) if self.env_mode == "min" else d_in * d_out
            blocks.append(_Block(labels, d_out, d_in, random_isometry(d_in, d_out * env, rng)))
        return blocks

    def env(self, blocks: list[_Block], k: int) -> np.ndarray:
        """Hermitian H with value = sum_k v_k^H H v_k for block ``k``."""
        others = [b.op(self.specs[i][1]) for i, b in enumerate(blocks) if i != k]
        E = link(self.L, self.J, *others)
        A = E.matrix(self.specs[k][0]).T
        return 0.5 * (A + A.conj().T)

    def value(self, blocks: list[_Block]) -> float:
        ops = [b.op(s[1]) for b, s in zip(blocks, self.specs)]
        return float(np.real(np.sum(link(self.L, self.J, *ops[:-1]).matrix(self.specs[-1][0]) * ops[-1].matrix())))

    def step(self, blocks: list[_Block], k: int, inner: int) -> None:
        b = blocks[k]
        H = self.env(blocks, k)
        c = np.max(np.abs(np.linalg.eigvalsh(H)))
        Hs = H + c * np.eye(H.shape[0])
        Hs4 = Hs.reshape(b.d_out, b.d_in, b.d_out, b.d_in)
        for _ in range(inner):
            K = b.kraus()
            G = np.einsum("oipj,pkj->oki", Hs4, K)
            b.V = _polar(G.reshape(b.d_out * b.env_dim, b.d_in))

    def transform(self, blocks: list[_Block]) -> LosrTransform:
        combs = []
        for party, (pre, post) in zip("AB", (blocks[0:2], blocks[2:4])):
            n_in, n_out = self.g.wiring.party(party)
            pre_m, post_m = pre.choi(), post.choi()
            # dephasing new classical systems leaves the value unchanged
            if n_in.kind is Kind.C:
                pre_m = dephase(pre_m, (pre.d_out, n_in.dim), [1])
            if n_out.kind is Kind.C:
                post_m = dephase(post_m, (n_out.dim, post.d_in), [0])
            combs.append(
                ExplicitComb(
                    ChoiOperator(pre_m, pre.d_out, pre.d_in),
                    ChoiOperator(post_m, post.d_out, post.d_in),
                    self.mem,
                    n_in,
                    n_out,
                    tol=1e-8,
                )
            )
        return LosrTransform.product(combs[0], combs[1])


def performance_seesaw(
    g: Game,
    r: Resource,
    mem: int = 2,
    restarts: int = 20,
    iters: int = 300,
    seed: int = 0,
    stall: float = 1e-7,
    inner: int = 20,
    env: str = "min",
) -> SeesawResult:
    """Lower bound on max over LOSR transforms t of ``evaluate(g, t(r))``.

    ``env`` is the Stinespring environment size of every block: ``"min"``
    (smallest isometric dilation) or ``"full"`` (any channel).  Restarts
    use independent seeded streams; the best restart wins, ties going to
    the lower restart index.
    """
    if env not in ("min", "full"):
        raise ValueError("env must be 'min' or 'full'")
    prob = _Problem(g, r, mem, env)
    best: SeesawResult | None = None
    for restart in range(restarts):
        rng = np.random.default_rng([seed, restart])
        blocks = prob.init_blocks(rng)
        hist = [prob.value(blocks)]
        for _ in range(iters):
            for k in range(len(blocks)):
                prob.step(blocks, k, inner)
            hist.append(prob.value(blocks))
            if hist[-1] - hist[-2] < stall:
                break
        if best is None or hist[-1] > best.value + 1e-12:
            t = prob.transform(blocks)
            best = SeesawResult(hist[-1], t, restart, hist)
    # the reported value is the one the returned transform actually achieves
    achieved = evaluate(g, apply(best.transform, r, tol=1e-8))
    if abs(achieved - best.value) > 1e-8:
        raise RuntimeError(f"see-saw transform reproduces {achieved}, expected {best.value}")
    best.value = achieved
    return best
