"""The acceptance suite: one check function per criterion.

Each check returns a :class:`Check` with the measured numbers in ``detail``;
the command line and the test-suite share these functions.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .freeset import (
    FreeVerdict,
    assemblage_is_unsteerable,
    box_convertible,
    box_is_local,
    deterministic_boxes,
    party_wirings,
    state_is_ppt,
    werner_state,
)
from .games import chsh_game, chsh_payoff, evaluate, pushforward, witness_game_on_states
from .linalg import dephase, partial_transpose, proj, unitary_choi
from .randgen import random_box, random_channel, random_density, random_free_resource, random_resource
from .resources import (
    Resource,
    Wiring,
    assemblage_from_state,
    deterministic_box,
    from_assemblage,
    from_box,
    from_channel,
    from_state,
    pr_box,
    validate,
)
from .seesaw import performance_seesaw
from .transforms import apply, measure_with_settings, parse_canonical, sq_decode, sq_encode, compose
from .types import (
    ALL_PARTITIONS,
    NONTRIVIAL_PARTITIONS,
    TABLE_FIXTURE,
    Kind,
    System,
    Verdict,
    partition_encodes,
)

TSIRELSON = float(np.cos(np.pi / 8) ** 2)
PHI_PLUS = np.array([1, 0, 0, 1]) / np.sqrt(2)
SINGLET = np.array([0, 1, -1, 0]) / np.sqrt(2)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, reported as such
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    return Check(name, bool(ok), detail, time.perf_counter() - t0)


def basis_at(t: float) -> list[np.ndarray]:
    """Projective qubit measurement along Bloch direction (sin t, 0, cos t)."""
    v = np.array([np.cos(t / 2), np.sin(t / 2)])
    w = np.array([-np.sin(t / 2), np.cos(t / 2)])
    return [proj(v), proj(w)]


def chsh_quantum_box_resource() -> Resource:
    """Phi+ measured with the optimal CHSH settings, as a CC->CC resource."""
    r = from_state(proj(PHI_PLUS), 2, 2)
    t = compose(
        measure_with_settings("B", [basis_at(np.pi / 4), basis_at(-np.pi / 4)]),
        measure_with_settings("A", [basis_at(0.0), basis_at(np.pi / 2)]),
    )
    return apply(t, r)


# --------------------------------------------------------------------------
# criteria


def check_roundtrip(n: int = 50, seed: int = 1) -> Check:
    def run():
        rng = np.random.default_rng(seed)
        kinds = [System.trivial(), System.classical(2), System.quantum(2)]
        worst, t0 = 0.0, time.perf_counter()
        for i in range(n):
            d = 2 + i % 2
            a_in = kinds[rng.integers(3)]
            b_in, b_out = kinds[rng.integers(3)], kinds[rng.integers(3)]
            w = Wiring(a_in, System.quantum(d), b_in, b_out)
            r = random_resource(w, seed=rng)
            enc = apply(sq_encode("A", d), r)
            back = apply(sq_decode("A", d, input_kind=a_in.kind), enc)
            if back.wiring != r.wiring:
                return False, f"type not restored: {back.wiring} vs {r.wiring}"
            worst = max(worst, float(np.linalg.norm(back.matrix - r.matrix)))
        dt = time.perf_counter() - t0
        return worst < 1e-8 and dt < 30, f"{n} resources, max Frobenius error {worst:.2e}, {dt:.1f}s"

    return _timed("1 round-trip identity", run)


def check_chsh_ladder(restarts: int = 20, seed: int = 0) -> Check:
    def run():
        g = chsh_game()
        pr = evaluate(g, from_box(pr_box()))
        D, _ = deterministic_boxes(2, 2, 2, 2)
        local = float(np.max(D @ chsh_payoff().reshape(-1)))
        quantum = evaluate(g, chsh_quantum_box_resource())
        sq = apply(parse_canonical("sq-encode:A:2+sq-encode:B:2"), from_state(proj(PHI_PLUS), 2, 2))
        res = performance_seesaw(g, sq, mem=2, restarts=restarts, seed=seed)
        ok = (
            pr == 1.0
            and len(D) == 16
            and abs(local - 0.75) <= 1e-9
            and abs(quantum - TSIRELSON) <= 1e-6
            and res.value >= 0.8534
        )
        return ok, (
            f"PR {pr!r}, local bound {local:.12f} over {len(D)} vertices, "
            f"quantum {quantum:.10f}, see-saw {res.value:.10f} (restart {res.restart})"
        )

    return _timed("2 CHSH ladder", run)


def check_werner_ppt() -> Check:
    def run():
        worst = 0.0
        for p in np.linspace(0, 1, 41):
            rho = werner_state(p)
            lmin = np.linalg.eigvalsh(partial_transpose(rho, (2, 2), 1))[0]
            worst = max(worst, abs(lmin - (1 - 3 * p) / 4))
        below = state_is_ppt(werner_state(1 / 3 - 1e-9), 2, 2, tol=1e-12).verdict
        above = state_is_ppt(werner_state(1 / 3 + 1e-9), 2, 2, tol=1e-12).verdict
        ok = worst <= 1e-12 and below is FreeVerdict.FREE and above is FreeVerdict.NONFREE
        return ok, f"max |lmin - (1-3p)/4| = {worst:.1e} on 41 points; 1/3-1e-9 {below.value}, 1/3+1e-9 {above.value}"

    return _timed("3 Werner/PPT threshold", run)


def _reverify_steering(cert: dict, sigma: np.ndarray) -> tuple[float, float]:
    """Recompute the LHS bound by enumerating every response function."""
    F = np.asarray(cert["F"])
    nX, nA = sigma.shape[:2]
    bound = -np.inf
    for lam in itertools.product(range(nA), repeat=nX):
        Z = sum(F[x, lam[x]] for x in range(nX))
        bound = max(bound, np.linalg.eigvalsh(0.5 * (Z + Z.conj().T))[-1])
    value = float(np.real(sum(np.trace(F[x, a] @ sigma[x, a]) for x in range(nX) for a in range(nA))))
    return float(bound), value


def _reconstruct_lhs(cert: dict, sigma: np.ndarray) -> float:
    nX, nA = sigma.shape[:2]
    rec = np.zeros_like(sigma)
    for lam, s in zip(cert["responses"], cert["hidden_states"]):
        if np.linalg.eigvalsh(s)[0] < -1e-12:
            return np.inf
        for x in range(nX):
            rec[x, lam[x]] += s
    return float(np.max(np.abs(rec - sigma)))


def check_steering() -> Check:
    def run():
        Z, X = basis_at(0.0), basis_at(np.pi / 2)
        t0 = time.perf_counter()
        out = []
        singlet = assemblage_from_state(proj(SINGLET), [Z, X], 2, 2)
        rep = assemblage_is_unsteerable(singlet)
        ok = rep.verdict is FreeVerdict.NONFREE
        if ok:
            bound, value = _reverify_steering(rep.certificate, singlet.sigma)
            ok = value > bound + 1e-9
            out.append(f"singlet NonFree value {value:.4g} > bound {bound:.2e}")
        else:
            out.append(f"singlet {rep.verdict.value}")
        prod = np.kron(random_density(2, seed=11), random_density(2, seed=12))
        for name, rho in (("product", prod), ("Werner 0.3", werner_state(0.3))):
            a = assemblage_from_state(rho, [Z, X], 2, 2)
            rep = assemblage_is_unsteerable(a)
            if rep.verdict is not FreeVerdict.FREE:
                ok = False
                out.append(f"{name} {rep.verdict.value}")
                continue
            err = _reconstruct_lhs(rep.certificate, a.sigma)
            ok = ok and err < 1e-7
            out.append(f"{name} Free residual {err:.1e}")
        dt = time.perf_counter() - t0
        return ok and dt < 60, "; ".join(out) + f"; {dt:.1f}s"

    return _timed("4 steering", run)


def _random_hermitian(d: int, rng) -> np.ndarray:
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (G + G.conj().T) / 2


def check_pushforward(n: int = 10, seed: int = 5) -> Check:
    def run():
        rng = np.random.default_rng(seed)
        enc = parse_canonical("sq-encode:A:2+sq-encode:B:2")
        dec = parse_canonical("sq-decode:A:2+sq-decode:B:2")
        Ws = [_random_hermitian(4, rng) for _ in range(n)]
        rhos = [random_density(4, seed=rng) for _ in range(n)]
        encoded = [apply(enc, from_state(rho, 2, 2)) for rho in rhos]
        worst = 0.0
        for W in Ws:
            g = pushforward(witness_game_on_states(W, 2, 2), enc, dec)
            for rho, e in zip(rhos, encoded):
                worst = max(worst, abs(evaluate(g, e) - float(np.real(np.trace(W @ rho)))))
        return worst <= 1e-8, f"{n} witnesses x {n} states through QQ->CC, max error {worst:.2e}"

    return _timed("5 semiquantum pushforward", run)


def check_table() -> Check:
    def run():
        mismatches, unknown = [], 0
        for t, u in itertools.product(NONTRIVIAL_PARTITIONS, repeat=2):
            got = partition_encodes(t, u)
            want = TABLE_FIXTURE[str(t)][str(u)]
            if (got.value.value, got.provenance) != want:
                mismatches.append(f"{t} vs {u}: {got} != {want}")
            unknown += got.value is Verdict.UNKNOWN
        yes = {(t, u) for t, u in itertools.product(ALL_PARTITIONS, repeat=2) if partition_encodes(t, u).value is Verdict.YES}
        broken = [
            (a, b, c)
            for a, b, c in itertools.product(ALL_PARTITIONS, repeat=3)
            if (a, b) in yes and (b, c) in yes and (a, c) not in yes
        ]
        ok = not mismatches and unknown == 2 and not broken
        return ok, f"36 cells, {len(mismatches)} mismatches, {unknown} Unknown, {len(broken)} transitivity failures"

    return _timed("6 encodability table", run)


def check_box_conversion(n: int = 100, seed: int = 7) -> Check:
    def run():
        pr = pr_box()
        loc = deterministic_box([0, 0], [0, 0])
        r1 = box_convertible(pr, loc)
        r2 = box_convertible(loc, pr)
        r3 = box_convertible(pr, pr)
        gap = r2.certificate.get("value", 0) - r2.certificate.get("bound", 1)
        ok = (
            r1.verdict is FreeVerdict.FREE
            and r2.verdict is FreeVerdict.NONFREE
            and abs(r2.certificate["bound"] - 0.75) <= 1e-9
            and gap >= 0.25 - 1e-9
            and r3.verdict is FreeVerdict.FREE
        )
        rng = np.random.default_rng(seed)
        WA = party_wirings(2, 2, 2, 2)
        WB = party_wirings(2, 2, 2, 2)
        failures = 0
        for _ in range(n):
            p = random_box(2, 2, 2, 2, seed=rng)
            w = rng.dirichlet(np.ones(3))
            q = sum(
                wk * np.einsum("pXax,qYby,abxy->pqXY", WA[rng.integers(len(WA))], WB[rng.integers(len(WB))], p)
                for wk in w
            )
            conv = box_convertible(p, q).verdict
            loc_p = box_is_local(p).verdict
            loc_q = box_is_local(q).verdict
            if not (conv is FreeVerdict.FREE and loc_p is FreeVerdict.FREE and loc_q is FreeVerdict.FREE):
                failures += 1
        ok = ok and failures == 0
        return ok, (
            f"PR->local {r1.verdict.value}, local->PR {r2.verdict.value} "
            f"(value {r2.certificate.get('value', float('nan')):.4f}, bound {r2.certificate.get('bound', float('nan')):.4f}), "
            f"PR->PR {r3.verdict.value}, free-to-free failures {failures}/{n}"
        )

    return _timed("7 box convertibility", run)


def check_validation(seed: int = 3) -> Check:
    def run():
        rng = np.random.default_rng(seed)
        C2, Q2, I = System.classical(2), System.quantum(2), System.trivial()
        made = {
            "from_state": from_state(random_density(4, seed=rng), 2, 2),
            "from_box": from_box(random_box(2, 3, 2, 2, seed=rng)),
            "pr_box": from_box(pr_box()),
            "from_assemblage": from_assemblage(assemblage_from_state(random_density(4, seed=rng), [basis_at(0), basis_at(1)], 2, 2)),
            "from_channel": from_channel(
                # a product of local channels is nonsignaling by construction
                _product_channel(random_channel(2, 2, seed=rng).matrix, random_channel(2, 2, seed=rng).matrix, 2, 2, 2, 2),
                Wiring(Q2, Q2, Q2, Q2),
            ),
            "random_free": random_free_resource(Wiring(C2, Q2, Q2, C2), seed=rng),
            "random": random_resource(Wiring(Q2, C2, I, Q2), seed=rng),
            "sq_encode": apply(sq_encode("A", 2), from_state(random_density(4, seed=rng), 2, 2)),
        }
        bad = {k: validate(r, 1e-9) for k, r in made.items() if validate(r, 1e-9)}
        worst_dephase = 0.0
        for r in made.values():
            cls = [k for k, s in enumerate(r.wiring.systems) if s.kind is Kind.C]
            if cls:
                worst_dephase = max(worst_dephase, float(np.max(np.abs(dephase(r.matrix, r.wiring.dims, cls) - r.matrix))))
        swap = np.eye(4)[[0, 2, 1, 3]]
        sw = Resource(Wiring(Q2, Q2, Q2, Q2), unitary_choi(swap))
        swap_checks = {v.check for v in validate(sw)}
        swap_rejected = any(c.startswith("nonsignaling") for c in swap_checks)
        ok = not bad and worst_dephase <= 1e-12 and swap_rejected
        return ok, (
            f"{len(made)} constructors, {len(bad)} with violations; dephasing drift {worst_dephase:.1e}; "
            f"swap channel flagged: {sorted(swap_checks)}"
        )

    return _timed("8 validation invariants", run)


def _product_channel(JA, JB, dAo, dAi, dBo, dBi) -> np.ndarray:
    """Choi of J_A (x) J_B in the global order (Ao, Bo, Ai, Bi)."""
    T = np.einsum("aibj,ckdl->acikbdjl", JA.reshape(dAo, dAi, dAo, dAi), JB.reshape(dBo, dBi, dBo, dBi))
    n = dAo * dBo * dAi * dBi
    return T.reshape(n, n)


ALL_CHECKS: list[Callable[[], Check]] = [
    check_roundtrip,
    check_chsh_ladder,
    check_werner_ppt,
    check_steering,
    check_pushforward,
    check_table,
    check_box_conversion,
    check_validation,
]


def run_all() -> list[Check]:
    return [fn() for fn in ALL_CHECKS]
