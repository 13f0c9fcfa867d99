"""Random states, channels and LOSR-free resources for tests and probes."""

from __future__ import annotations

import numpy as np

from .linalg import ChoiOperator, LabeledOp, dephase, link
from .resources import Resource, Wiring, _checked
from .types import Kind


def rng_of(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def ginibre(rng, rows: int, cols: int) -> np.ndarray:
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_pure(d: int, seed=None) -> np.ndarray:
    rng = rng_of(seed)
    v = ginibre(rng, d, 1)[:, 0]
    return v / np.linalg.norm(v)


def random_density(d: int, rank: int | None = None, seed=None) -> np.ndarray:
    rng = rng_of(seed)
    g = ginibre(rng, d, rank or d)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(d: int, seed=None) -> np.ndarray:
    rng = rng_of(seed)
    q, r = np.linalg.qr(ginibre(rng, d, d))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_isometry(d_in: int, d_out: int, seed=None) -> np.ndarray:
    """A ``d_out x d_in`` isometry (``d_out >= d_in``)."""
    rng = rng_of(seed)
    q, r = np.linalg.qr(ginibre(rng, d_out, d_in))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(d_in: int, d_out: int, n_kraus: int = 2, seed=None) -> ChoiOperator:
    """A random CPTP map via a Stinespring isometry with ``n_kraus`` environment levels."""
    n_kraus = max(n_kraus, -(-d_in // d_out))
    V = random_isometry(d_in, d_out * n_kraus, seed)
    K = V.reshape(d_out, n_kraus, d_in)
    J = np.zeros((d_out * d_in, d_out * d_in), dtype=complex)
    for k in range(n_kraus):
        vec = K[:, k, :].reshape(-1)  # sum_i K|i> (x) |i>
        J += np.outer(vec, vec.conj())
    return ChoiOperator(J, d_out, d_in)


def random_free_resource(wiring: Wiring, mem: int = 2, seed=None) -> Resource:
    """A random LOSR-free resource of the given wiring.

    A shared random (classically correlated) memory feeds two random local
    channels; classical systems are dephased.
    """
    rng = rng_of(seed)
    dAo, dBo, dAi, dBi = wiring.dims
    p = rng.dirichlet(np.ones(mem))
    S = LabeledOp.from_matrix(_correlated(p), ("Am", "Bm"), (mem, mem))
    ops = [S]
    for party, (di, do) in (("A", (dAi, dAo)), ("B", (dBi, dBo))):
        J = random_channel(di * mem, do, n_kraus=2, seed=rng)
        ops.append(LabeledOp.from_matrix(J.matrix, (f"{party}o", f"{party}i", f"{party}m"), (do, di, mem)))
    total = link(*ops).reorder(("Ao", "Bo", "Ai", "Bi"))
    M = total.matrix()
    classical = [k for k, s in enumerate(wiring.systems) if s.kind is Kind.C]
    if classical:
        M = dephase(M, wiring.dims, classical)
    r = Resource(wiring, ChoiOperator(M, dAo * dBo, dAi * dBi))
    return _checked(r)


def _correlated(p: np.ndarray) -> np.ndarray:
    """The state sum_l p_l |l,l><l,l| on two memories."""
    m = len(p)
    out = np.zeros((m * m, m * m), dtype=complex)
    for k, pk in enumerate(p):
        out[k * m + k, k * m + k] = pk
    return out


def random_resource(wiring: Wiring, seed=None) -> Resource:
    """A random (generally nonfree) resource of the given wiring.

    Built from a random entangled state on two memories and random local
    channels, which keeps it nonsignaling.
    """
    rng = rng_of(seed)
    dAo, dBo, dAi, dBi = wiring.dims
    mem = 2
    S = LabeledOp.from_matrix(random_density(mem * mem, seed=rng), ("Am", "Bm"), (mem, mem))
    ops = [S]
    for party, (di, do) in (("A", (dAi, dAo)), ("B", (dBi, dBo))):
        J = random_channel(di * mem, do, n_kraus=2, seed=rng)
        ops.append(LabeledOp.from_matrix(J.matrix, (f"{party}o", f"{party}i", f"{party}m"), (do, di, mem)))
    M = link(*ops).reorder(("Ao", "Bo", "Ai", "Bi")).matrix()
    classical = [k for k, s in enumerate(wiring.systems) if s.kind is Kind.C]
    if classical:
        M = dephase(M, wiring.dims, classical)
    return _checked(Resource(wiring, ChoiOperator(M, dAo * dBo, dAi * dBi)))


def random_box(nA: int, nB: int, nX: int, nY: int, seed=None) -> np.ndarray:
    """A random LOSR-free correlation table P[a, b, x, y]."""
    rng = rng_of(seed)
    n = 4
    lam = rng.dirichlet(np.ones(n))
    P = np.zeros((nA, nB, nX, nY))
    for l in range(n):
        pa = rng.dirichlet(np.ones(nA), size=nX).T  # (a, x)
        pb = rng.dirichlet(np.ones(nB), size=nY).T
        P += lam[l] * np.einsum("ax,by->abxy", pa, pb)
    return P
