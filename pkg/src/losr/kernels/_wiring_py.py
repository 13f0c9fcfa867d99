"""Pure numpy implementation of the deterministic-wiring enumeration."""

from __future__ import annotations

import itertools

import numpy as np


def best_response_enumeration(F: np.ndarray, P: np.ndarray):
    """Return ``(value, f, g)`` maximizing over A's wirings with B best responding.

    ``F[a', b', x', y']`` is the target payoff, ``P[a, b, x, y]`` the source box.
    """
    F = np.ascontiguousarray(F, dtype=float)
    P = np.ascontiguousarray(P, dtype=float)
    nAg, nBg, nXg, nYg = F.shape
    nAr, nBr, nXr, nYr = P.shape
    best, best_f, best_g = -np.inf, None, None
    # one-hot output maps, all at once: G[k, a', a, x']
    gs = np.array(list(itertools.product(range(nAg), repeat=nAr * nXg)), dtype=np.int64)
    gs = gs[:, ::-1].reshape(-1, nAr, nXg)  # first label varies fastest, as in the compiled kernel
    G = np.zeros((len(gs), nAg, nAr, nXg))
    k_idx, a_idx, x_idx = np.indices(gs.shape)
    G[k_idx, gs, a_idx, x_idx] = 1.0
    chunk = max(1, 2_000_000 // max(1, nAg * nAr * nXg * nBg * nBr * nYg * nYr))
    for f in itertools.product(range(nXr), repeat=nXg):
        f = np.array(f[::-1])
        Pf = P[:, :, f, :]  # (a, b, x', y)
        for s in range(0, len(G), chunk):
            C = np.einsum("kpax,pBxY,abxy->kBbYy", G[s:s + chunk], F, Pf, optimize=True)
            # best b' per (b, y', y), summed over b; best y per y', summed over y'
            vals = C.max(axis=1).sum(axis=1).max(axis=2).sum(axis=1)
            i = int(np.argmax(vals))
            if vals[i] > best + 1e-15:
                best, best_f, best_g = float(vals[i]), f.copy(), gs[s + i].copy()
    return best, best_f, best_g
