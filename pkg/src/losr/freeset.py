"""Free-set membership tests with certificates.

Every verdict carries a certificate that is re-checked by direct
evaluation before it is returned: a convex decomposition for ``Free`` and
a separating functional with its free-set bound for ``NonFree``.  Solver
state is never trusted on its own.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import linprog

from .kernels import best_wiring_value
from .linalg import DEFAULT_TOL, partial_transpose, proj
from .resources import Assemblage, CorrelationTable


class FreeVerdict(enum.Enum):
    FREE = "Free"
    NONFREE = "NonFree"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class MembershipReport:
    verdict: FreeVerdict
    certificate: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "certificate": _jsonable(self.certificate)}


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"re": obj.real.tolist(), "im": obj.imag.tolist()}
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


# --------------------------------------------------------------------------
# local polytope


def deterministic_boxes(nA: int, nB: int, nX: int, nY: int) -> tuple[np.ndarray, list]:
    """All deterministic local boxes, as rows of an array, and their labels.

    Row ``k`` is ``D[a, b, x, y] = [a = fa(x)][b = fb(y)]`` flattened.
    """
    fas = list(itertools.product(range(nA), repeat=nX))
    fbs = list(itertools.product(range(nB), repeat=nY))
    DA = np.zeros((len(fas), nA, nX))
    for i, fa in enumerate(fas):
        DA[i, fa, range(nX)] = 1
    DB = np.zeros((len(fbs), nB, nY))
    for j, fb in enumerate(fbs):
        DB[j, fb, range(nY)] = 1
    D = np.einsum("iax,jby->ijabxy", DA, DB).reshape(len(fas) * len(fbs), -1)
    labels = [(fa, fb) for fa in fas for fb in fbs]
    return D, labels


def _decompose(V: np.ndarray, target: np.ndarray) -> np.ndarray | None:
    """Weights q >= 0, sum 1, with q @ V = target; None if infeasible."""
    n = V.shape[0]
    A_eq = np.vstack([V.T, np.ones((1, n))])
    b_eq = np.concatenate([target, [1.0]])
    res = linprog(np.zeros(n), A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    return np.clip(res.x, 0, None)


def _separate(V: np.ndarray, target: np.ndarray, fmax: float) -> tuple[np.ndarray, float]:
    """Functional F in [0, fmax] maximizing F.target - max_k F.V[k]."""
    n, m = V.shape
    # variables (F, beta); maximize F.t - beta  s.t.  V F - beta <= 0
    c = np.concatenate([-target, [1.0]])
    A_ub = np.hstack([V, -np.ones((n, 1))])
    bounds = [(0, fmax)] * m + [(None, None)]
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(n), bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"separation LP failed: {res.message}")
    return res.x[:m], res.x[m]


def box_is_local(p, tol: float = DEFAULT_TOL) -> MembershipReport:
    """Membership of a box in the local polytope.

    Free: weights over deterministic boxes reconstructing ``p``.
    NonFree: a Bell functional ``F`` (normalized to win-probability scale)
    whose value on ``p`` exceeds its maximum over deterministic boxes.
    """
    table = p if isinstance(p, CorrelationTable) else CorrelationTable(np.asarray(p, dtype=float))
    table.check(max(tol, 1e-9))
    P = table.P
    D, labels = deterministic_boxes(*P.shape)
    target = P.reshape(-1)
    q = _decompose(D, target)
    if q is not None:
        err = float(np.max(np.abs(q @ D - target)))
        if err < 1e-7:
            keep = q > 1e-12
            return MembershipReport(
                FreeVerdict.FREE,
                {
                    "kind": "decomposition",
                    "weights": q[keep],
                    "vertices": [labels[i] for i in np.flatnonzero(keep)],
                    "error": err,
                },
            )
    nX, nY = P.shape[2], P.shape[3]
    F, _ = _separate(D, target, 1.0 / (nX * nY))
    F = F.reshape(P.shape)
    bound = float(np.max(D @ F.reshape(-1)))  # vertex enumeration
    value = float(np.sum(F * P))
    if value > bound + tol:
        return MembershipReport(FreeVerdict.NONFREE, {"kind": "dual", "F": F, "bound": bound, "value": value})
    return MembershipReport(FreeVerdict.INCONCLUSIVE, {"kind": "none", "bound": bound, "value": value})


# --------------------------------------------------------------------------
# states


def state_is_ppt(rho, dA: int, dB: int, tol: float = DEFAULT_TOL) -> MembershipReport:
    """PPT test: NonFree with a witness if the partial transpose is not PSD.

    PPT implies separability only for 2x2 and 2x3; elsewhere a PPT state is
    reported Inconclusive.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dA * dB, dA * dB):
        raise ValueError(f"state of shape {rho.shape} does not match dims {dA}x{dB}")
    pt = partial_transpose(rho, (dA, dB), 1)
    w, U = np.linalg.eigh(0.5 * (pt + pt.conj().T))
    lmin = float(w[0])
    if lmin < -tol:
        # Tr(W rho) = <v|rho^TB|v> < 0 while Tr(W sigma) >= 0 on separable sigma
        W = partial_transpose(proj(U[:, 0]), (dA, dB), 1)
        value = float(np.real(np.trace(W @ rho)))
        # written as a functional to maximize: F = -W, bound 0
        return MembershipReport(
            FreeVerdict.NONFREE,
            {"kind": "dual", "F": -W, "bound": 0.0, "value": -value, "min_eig": lmin},
        )
    if sorted((dA, dB)) in ([2, 2], [2, 3]):
        return MembershipReport(FreeVerdict.FREE, {"kind": "ppt", "min_eig": lmin})
    return MembershipReport(FreeVerdict.INCONCLUSIVE, {"kind": "ppt", "min_eig": lmin})


def werner_state(p: float) -> np.ndarray:
    """p |Psi-><Psi-| + (1 - p) I/4."""
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    return p * proj(psi) + (1 - p) * np.eye(4) / 4


# --------------------------------------------------------------------------
# assemblages


def _response_matrix(nA: int, nX: int) -> tuple[np.ndarray, list]:
    """M[(x, a), lam] = [a = lam(x)] over deterministic responses lam."""
    lams = list(itertools.product(range(nA), repeat=nX))
    M = np.zeros((nX * nA, len(lams)))
    for j, lam in enumerate(lams):
        for x, a in enumerate(lam):
            M[x * nA + a, j] = 1
    return M, lams


def _psd_project(S: np.ndarray) -> np.ndarray:
    w, U = np.linalg.eigh(S)
    return (U * np.clip(w, 0, None)[..., None, :]) @ np.swapaxes(U.conj(), -1, -2)


def _steering_witness(F_ax: np.ndarray, sigma: np.ndarray, M: np.ndarray) -> tuple[float, float]:
    """LHS bound max_lam lambda_max(sum D F) and value sum Tr(F sigma)."""
    nX, nA, d, _ = sigma.shape
    Ff = F_ax.reshape(nX * nA, d, d)
    Z = np.einsum("kl,kij->lij", M, Ff)
    bound = float(max(np.linalg.eigvalsh(0.5 * (z + z.conj().T))[-1] for z in Z))
    value = float(np.real(np.einsum("xaij,xaji->", F_ax, sigma)))
    return bound, value


def assemblage_is_unsteerable(
    a: Assemblage,
    tol: float = DEFAULT_TOL,
    max_iter: int = 50_000,
    residual: float = 1e-7,
    check_every: int = 50,
) -> MembershipReport:
    """LHS feasibility by Dykstra's alternating projections.

    The iterate lives in the space of hidden states ``sigma_lam``: one set
    is the affine space of models reproducing ``a``, the other the PSD cone.
    If they meet, the cone iterate is an LHS model.  If not, the difference
    of the iterates tends to the normal of a separating hyperplane, which is
    mapped back to a steering functional and verified.
    """
    problems = a.problems(max(tol, 1e-9))
    if problems:
        raise ValueError("invalid assemblage: " + "; ".join(map(str, problems)))
    sigma = np.asarray(a.sigma, dtype=complex)
    nX, nA, d, _ = sigma.shape
    M, lams = _response_matrix(nA, nX)
    Mp = np.linalg.pinv(M)
    t = sigma.reshape(nX * nA, d, d)

    def affine(S):
        R = np.einsum("kl,lij->kij", M, S) - t
        return S - np.einsum("lk,kij->lij", Mp, R)

    X = np.einsum("lk,kij->lij", Mp, t)  # minimum-norm model
    P_corr = np.zeros_like(X)
    Q_corr = np.zeros_like(X)
    C = X
    last_witness = None
    for it in range(1, max_iter + 1):
        C = _psd_project(X + P_corr)
        P_corr = X + P_corr - C
        X_new = affine(C + Q_corr)
        Q_corr = C + Q_corr - X_new
        X = X_new
        if it % check_every and it != max_iter:
            continue
        C_chk = _psd_project(X)
        res = float(np.max(np.abs(np.einsum("kl,lij->kij", M, C_chk) - t)))
        if res < residual:
            return MembershipReport(
                FreeVerdict.FREE,
                {
                    "kind": "decomposition",
                    "hidden_states": C_chk,
                    "responses": lams,
                    "error": res,
                    "iterations": it,
                },
            )
        # separating normal: the model minus its PSD part, i.e. its negative part
        gap = X - C_chk
        F = np.einsum("lk,lij->kij", Mp, gap)  # pinv(M^T) applied entrywise
        F = 0.5 * (F + np.swapaxes(F.conj(), -1, -2))
        F = F.reshape(nX, nA, d, d)
        bound, value = _steering_witness(F, sigma, M)
        last_witness = (F, bound, value)
        if value > bound + max(tol, 1e-12) and value - bound > 1e-9:
            return MembershipReport(
                FreeVerdict.NONFREE,
                {"kind": "dual", "F": F, "bound": bound, "value": value, "iterations": it},
            )
    cert = {"kind": "none", "iterations": max_iter}
    if last_witness is not None:
        cert.update(bound=last_witness[1], value=last_witness[2])
    return MembershipReport(FreeVerdict.INCONCLUSIVE, cert)


# --------------------------------------------------------------------------
# box conversion


def party_wirings(n_out_src: int, n_in_src: int, n_out_new: int, n_in_new: int) -> np.ndarray:
    """All deterministic wirings of one party as 0/1 matrices W[(a', x'), (a, x)].

    ``x = f(x')`` selects the source input, ``a' = g(a, x')`` the new output.
    """
    mats = []
    for f in itertools.product(range(n_in_src), repeat=n_in_new):
        for g in itertools.product(range(n_out_new), repeat=n_out_src * n_in_new):
            W = np.zeros((n_out_new, n_in_new, n_out_src, n_in_src))
            for xp in range(n_in_new):
                for a in range(n_out_src):
                    W[g[a * n_in_new + xp], xp, a, f[xp]] = 1
            mats.append(W)
    return np.array(mats)


def wiring_images(p: np.ndarray, new_shape: tuple[int, int, int, int]) -> np.ndarray:
    """Distinct boxes reachable from ``p`` by deterministic local wirings, as rows."""
    nA, nB, nX, nY = p.shape
    mA, mB, mX, mY = new_shape
    WA = party_wirings(nA, nX, mA, mX)
    WB = party_wirings(nB, nY, mB, mY)
    left = np.einsum("kpXax,abxy->kpXby", WA, p)
    imgs = np.einsum("kpXby,lqYby->klpqXY", left, WB).reshape(len(WA) * len(WB), -1)
    return np.unique(np.round(imgs, 14), axis=0)


def box_convertible(p, q, tol: float = DEFAULT_TOL) -> MembershipReport:
    """Can ``p`` be converted into ``q`` by a single-copy LOSR wiring?

    Free: a mixture of deterministic wiring images reconstructing ``q``.
    NonFree: a functional whose value on ``q`` exceeds its maximum over
    everything ``p`` can be wired into.
    """
    tp = p if isinstance(p, CorrelationTable) else CorrelationTable(np.asarray(p, dtype=float))
    tq = q if isinstance(q, CorrelationTable) else CorrelationTable(np.asarray(q, dtype=float))
    tp.check(max(tol, 1e-9))
    tq.check(max(tol, 1e-9))
    P, Q = tp.P, tq.P
    V = wiring_images(P, Q.shape)
    target = Q.reshape(-1)
    w = _decompose(V, target)
    if w is not None:
        err = float(np.max(np.abs(w @ V - target)))
        if err < 1e-7:
            keep = w > 1e-12
            return MembershipReport(
                FreeVerdict.FREE,
                {"kind": "decomposition", "weights": w[keep], "images": V[keep].reshape(-1, *Q.shape), "error": err},
            )
    mX, mY = Q.shape[2], Q.shape[3]
    F, _ = _separate(V, target, 1.0 / (mX * mY))
    F = F.reshape(Q.shape)
    bound = float(np.max(V @ F.reshape(-1)))
    # independent check of the bound through the best-response enumeration
    bound_enum = best_wiring_value(F, P)
    if abs(bound - bound_enum) > 1e-9:
        raise RuntimeError(f"wiring bound mismatch: LP images give {bound}, enumeration {bound_enum}")
    value = float(np.sum(F * Q))
    if value > bound + tol:
        return MembershipReport(FreeVerdict.NONFREE, {"kind": "dual", "F": F, "bound": bound, "value": value})
    return MembershipReport(FreeVerdict.INCONCLUSIVE, {"kind": "none", "bound": bound, "value": value})
