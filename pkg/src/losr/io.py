"""JSON files for resources, boxes, states, assemblages and reports.

Resource files hold ``{"wiring": ..., "choi": <matrix>}``; a box file may
instead hold ``{"P": [[[[...]]]]}``, a state file ``{"state": <matrix>,
"dA": 2, "dB": 2}`` and an assemblage file ``{"sigma": [[<matrix>, ...], ...]}``
indexed ``sigma[x][a]``.  Matrices are ``{"rows", "cols", "re", "im"}``.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np

from .linalg import ChoiOperator, matrix_from_json, matrix_to_json
from .resources import (
    Assemblage,
    CorrelationTable,
    Resource,
    Wiring,
    from_assemblage,
    from_box,
    from_state,
    to_assemblage,
    to_box,
)
from .types import Kind


class ParseError(ValueError):
    """A file that cannot be read as the requested object."""


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc


def dump_json(obj: Any, path: str | Path | None = None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=False)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def resource_to_json(r: Resource) -> dict:
    return {"wiring": r.wiring.to_json(), "choi": matrix_to_json(r.matrix)}


def resource_from_json(obj: dict, tol: float = 1e-9) -> Resource:
    """Build a resource from any supported file shape.

    Files giving an explicit Choi operator are *not* validated here so that
    callers can report violations; the other shapes go through their
    validating constructors.
    """
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object")
    try:
        if "choi" in obj:
            wiring = Wiring.parse(obj["wiring"])
            J = matrix_from_json(obj["choi"])
            dAo, dBo, dAi, dBi = wiring.dims
            if J.shape != (dAo * dBo * dAi * dBi,) * 2:
                raise ParseError(f"Choi matrix of shape {J.shape} does not match wiring {wiring}")
            return Resource(wiring, ChoiOperator(J, dAo * dBo, dAi * dBi))
        if "P" in obj:
            return from_box(np.asarray(obj["P"], dtype=float), tol)
        if "state" in obj:
            rho = matrix_from_json(obj["state"])
            dA = int(obj.get("dA", round(np.sqrt(rho.shape[0]))))
            dB = int(obj.get("dB", rho.shape[0] // dA))
            return from_state(rho, dA, dB, tol)
        if "sigma" in obj:
            return from_assemblage(assemblage_from_json(obj), tol=tol)
    except ParseError:
        raise
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed resource file: {exc}") from exc
    raise ParseError("resource file needs one of the keys 'choi', 'P', 'state', 'sigma'")


def load_resource(path: str | Path, tol: float = 1e-9) -> Resource:
    return resource_from_json(load_json(path), tol)


def box_from_json(obj: dict) -> CorrelationTable:
    if "P" in obj:
        return CorrelationTable(np.asarray(obj["P"], dtype=float))
    return to_box(resource_from_json(obj))


def box_to_json(p: CorrelationTable) -> dict:
    return {"P": np.asarray(p.P).tolist()}


def assemblage_from_json(obj: dict) -> Assemblage:
    if "sigma" not in obj:
        return to_assemblage(resource_from_json(obj))
    try:
        sigma = np.array([[matrix_from_json(m) for m in row] for row in obj["sigma"]])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed assemblage: {exc}") from exc
    return Assemblage(sigma)


def assemblage_to_json(a: Assemblage) -> dict:
    return {"sigma": [[matrix_to_json(m) for m in row] for row in a.sigma]}


def state_from_json(obj: dict) -> tuple[np.ndarray, int, int]:
    """A bipartite density matrix from a state file or an II->QQ resource file."""
    if "state" in obj:
        rho = matrix_from_json(obj["state"])
        dA = int(obj.get("dA", round(np.sqrt(rho.shape[0]))))
        dB = int(obj.get("dB", rho.shape[0] // dA))
        return rho, dA, dB
    r = resource_from_json(obj)
    w = r.wiring
    if w.a_in.kind is not Kind.I or w.b_in.kind is not Kind.I:
        raise ParseError(f"resource of type {r.type} is not a state")
    return r.matrix, w.a_out.dim, w.b_out.dim


def state_to_json(rho, dA: int, dB: int) -> dict:
    return {"state": matrix_to_json(rho), "dA": dA, "dB": dB}
