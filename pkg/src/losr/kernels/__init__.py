"""Hot loops, compiled when available.

The compiled extension is used if it was built; otherwise (or when the
environment variable ``LOSR_PURE_PYTHON`` is set to ``1``) the numpy
implementation is used.  Both expose the same functions.
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("LOSR_PURE_PYTHON") == "1":
    from ._wiring_py import best_response_enumeration

    BACKEND = "python"
else:
    try:
        from ._wiring import best_response_enumeration

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._wiring_py import best_response_enumeration

        BACKEND = "python"


class TooManyWirings(ValueError):
    pass


def wiring_count(F_shape, P_shape) -> tuple[int, int]:
    """Number of deterministic wirings of (A, B) for target ``F`` and source ``P`` shapes."""
    nAg, nBg, nXg, nYg = F_shape
    nAr, nBr, nXr, nYr = P_shape
    return nXr ** nXg * nAg ** (nAr * nXg), nYr ** nYg * nBg ** (nBr * nYg)


def best_wiring(F, P, max_wirings: int = 5_000_000):
    """Best deterministic wiring pair of box ``P`` for payoff ``F``.

    Returns ``(value, party, f, g)``: the enumerated party, its input map
    ``f[x']`` and output map ``g[a, x']``; the other party best responds.
    """
    F = np.ascontiguousarray(F, dtype=float)
    P = np.ascontiguousarray(P, dtype=float)
    nA, nB = wiring_count(F.shape, P.shape)
    if min(nA, nB) > max_wirings:
        raise TooManyWirings(f"{min(nA, nB)} wirings to enumerate exceeds the limit {max_wirings}")
    if nA <= nB:
        value, f, g = best_response_enumeration(F, P)
        return value, "A", f, g
    value, f, g = best_response_enumeration(
        np.ascontiguousarray(F.transpose(1, 0, 3, 2)), np.ascontiguousarray(P.transpose(1, 0, 3, 2))
    )
    return value, "B", f, g


def best_wiring_value(F, P, max_wirings: int = 5_000_000) -> float:
    return float(best_wiring(F, P, max_wirings)[0])


__all__ = ["BACKEND", "TooManyWirings", "best_response_enumeration", "best_wiring", "best_wiring_value", "wiring_count"]
