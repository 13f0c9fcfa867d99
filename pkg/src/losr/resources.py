"""Typed bipartite nonsignaling resources in Choi form.

Every resource is stored as one Choi operator over the global factor order
``A_out, B_out, A_in, B_in``.  Classical systems are diagonal quantum
systems; trivial systems have dimension one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ChoiOperator,
    LabeledOp,
    as_matrix,
    dephase,
    herm_eigvals,
    is_hermitian,
    partial_trace,
)
from .types import GlobalType, Kind, PartitionType, System

LABELS = ("Ao", "Bo", "Ai", "Bi")


class InvalidResource(ValueError):
    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


@dataclass(frozen=True)
class Wiring:
    """Input and output systems of both parties."""

    a_in: System
    a_out: System
    b_in: System
    b_out: System

    @classmethod
    def parse(cls, obj: dict) -> "Wiring":
        try:
            return cls(
                System.parse(obj["A"]["in"]),
                System.parse(obj["A"]["out"]),
                System.parse(obj["B"]["in"]),
                System.parse(obj["B"]["out"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed wiring: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "A": {"in": str(self.a_in), "out": str(self.a_out)},
            "B": {"in": str(self.b_in), "out": str(self.b_out)},
        }

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (self.a_out.dim, self.b_out.dim, self.a_in.dim, self.b_in.dim)

    @property
    def systems(self) -> tuple[System, System, System, System]:
        return (self.a_out, self.b_out, self.a_in, self.b_in)

    @property
    def global_type(self) -> GlobalType:
        return GlobalType(
            (
                PartitionType(self.a_in.kind, self.a_out.kind),
                PartitionType(self.b_in.kind, self.b_out.kind),
            )
        )

    def party(self, p: str) -> tuple[System, System]:
        if p == "A":
            return self.a_in, self.a_out
        if p == "B":
            return self.b_in, self.b_out
        raise ValueError(f"unknown party {p!r}")

    def with_party(self, p: str, inp: System, out: System) -> "Wiring":
        if p == "A":
            return replace(self, a_in=inp, a_out=out)
        if p == "B":
            return replace(self, b_in=inp, b_out=out)
        raise ValueError(f"unknown party {p!r}")

    def __str__(self) -> str:
        return f"A[{self.a_in}->{self.a_out}] B[{self.b_in}->{self.b_out}]"


@dataclass(frozen=True)
class Violation:
    check: str
    magnitude: float

    def __str__(self) -> str:
        return f"{self.check}: {self.magnitude:.3g}"


@dataclass(frozen=True)
class Resource:
    wiring: Wiring
    choi: ChoiOperator

    def __post_init__(self):
        dAo, dBo, dAi, dBi = self.wiring.dims
        if self.choi.dims != (dAo * dBo, dAi * dBi):
            raise ValueError(f"Choi dims {self.choi.dims} do not match wiring {self.wiring}")

    @property
    def type(self) -> GlobalType:
        return self.wiring.global_type

    @property
    def matrix(self) -> np.ndarray:
        return self.choi.matrix

    def labeled(self) -> LabeledOp:
        return LabeledOp.from_matrix(self.choi.matrix, LABELS, self.wiring.dims)

    @classmethod
    def from_labeled(cls, op: LabeledOp, wiring: Wiring) -> "Resource":
        m = op.matrix(LABELS)
        dAo, dBo, dAi, dBi = wiring.dims
        return cls(wiring, ChoiOperator(m, dAo * dBo, dAi * dBi))

    def mix(self, other: "Resource", p: float) -> "Resource":
        """Convex mixture ``p * self + (1 - p) * other``."""
        if other.wiring != self.wiring:
            raise ValueError("cannot mix resources of different wiring")
        return Resource(self.wiring, self.choi * p + other.choi * (1 - p))


def _maxabs(m) -> float:
    return float(np.max(np.abs(m), initial=0.0))


def validate(r: Resource, tol: float = DEFAULT_TOL) -> list[Violation]:
    """Report every failed invariant with its magnitude; never raises.

    Magnitudes are max-abs entry deviations (eigenvalue depth for CP).
    """
    out: list[Violation] = []
    J = r.matrix
    dAo, dBo, dAi, dBi = dims = list(r.wiring.dims)

    herm = _maxabs(J - J.conj().T)
    if herm > tol:
        out.append(Violation("hermitian", herm))
    lam = herm_eigvals((J + J.conj().T) / 2)[0]
    if lam < -tol:
        out.append(Violation("cp", float(-lam)))

    tp = _maxabs(partial_trace(J, dims, keep=[2, 3]) - np.eye(dAi * dBi))
    if tp > tol:
        out.append(Violation("tp", tp))

    # B's input must not influence A's marginal, and symmetrically
    marg_a = partial_trace(J, dims, keep=[0, 2, 3])
    ref_a = np.kron(partial_trace(J, dims, keep=[0, 2]) / dBi, np.eye(dBi))
    ns = _maxabs(marg_a - ref_a)
    if ns > tol:
        out.append(Violation("nonsignaling B->A", ns))
    marg_b = partial_trace(J, dims, keep=[1, 2, 3])  # order (Bo, Ai, Bi)
    ref_b = partial_trace(J, dims, keep=[1, 3]) / dAi  # (Bo, Bi)
    ref_b = np.einsum("bjBJ,iI->bijBIJ", ref_b.reshape(dBo, dBi, dBo, dBi), np.eye(dAi))
    ns = _maxabs(marg_b - ref_b.reshape(marg_b.shape))
    if ns > tol:
        out.append(Violation("nonsignaling A->B", ns))

    names = ("A_out", "B_out", "A_in", "B_in")
    for k, sys in enumerate(r.wiring.systems):
        if sys.kind is Kind.C:
            dev = _maxabs(dephase(J, dims, [k]) - J)
            if dev > tol:
                out.append(Violation(f"classical {names[k]}", dev))
    return out


def _checked(r: Resource, tol: float = DEFAULT_TOL) -> Resource:
    v = validate(r, tol)
    if v:
        raise InvalidResource("invalid resource: " + "; ".join(map(str, v)), v)
    return r


def from_channel(J, wiring: Wiring, tol: float = DEFAULT_TOL) -> Resource:
    """Wrap a Choi operator as a resource; raises :class:`InvalidResource`."""
    if not isinstance(J, ChoiOperator):
        dAo, dBo, dAi, dBi = wiring.dims
        J = ChoiOperator(as_matrix(J), dAo * dBo, dAi * dBi)
    return _checked(Resource(wiring, J), tol)


def from_state(rho, dA: int, dB: int, tol: float = DEFAULT_TOL) -> Resource:
    rho = as_matrix(rho)
    if rho.shape != (dA * dB, dA * dB):
        raise ValueError(f"state must be {dA * dB}x{dA * dB}")
    if not is_hermitian(rho, tol) or herm_eigvals(rho, tol)[0] < -tol:
        raise ValueError("state is not positive semidefinite")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"state has trace {np.trace(rho).real:.6g}, expected 1")
    w = Wiring(System.trivial(), System.quantum(dA), System.trivial(), System.quantum(dB))
    return _checked(Resource(w, ChoiOperator(rho, dA * dB, 1)), tol)


def state_of(r: Resource) -> np.ndarray:
    if r.wiring.a_in.dim != 1 or r.wiring.b_in.dim != 1:
        raise ValueError("resource has inputs; not a state")
    return r.matrix.copy()


# --------------------------------------------------------------------------
# boxes


@dataclass(frozen=True)
class CorrelationTable:
    """Conditional distribution ``P[a, b, x, y] = P(ab|xy)``."""

    P: np.ndarray
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        if P.ndim != 4 or min(P.shape) < 1:
            raise ValueError(f"table must have shape (nA, nB, nX, nY), got {P.shape}")
        if not np.all(np.isfinite(P)):
            raise ValueError("table has non-finite entries")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.P.shape

    def problems(self, tol: float | None = None) -> list[Violation]:
        tol = self.tol if tol is None else tol
        P = self.P
        out = []
        neg = float(-P.min())
        if neg > tol:
            out.append(Violation("nonnegative", neg))
        norm = _maxabs(P.sum(axis=(0, 1)) - 1)
        if norm > tol:
            out.append(Violation("tp", norm))
        pa = P.sum(axis=1)  # (a, x, y)
        ns = _maxabs(pa - pa.mean(axis=2, keepdims=True))
        if ns > tol:
            out.append(Violation("nonsignaling B->A", ns))
        pb = P.sum(axis=0)  # (b, x, y)
        ns = _maxabs(pb - pb.mean(axis=1, keepdims=True))
        if ns > tol:
            out.append(Violation("nonsignaling A->B", ns))
        return out

    def check(self, tol: float | None = None) -> "CorrelationTable":
        v = self.problems(tol)
        if v:
            raise InvalidResource("invalid correlation table: " + "; ".join(map(str, v)), v)
        return self

    def value(self, F) -> float:
        return float(np.sum(np.asarray(F, dtype=float) * self.P))


def box_wiring(nA: int, nB: int, nX: int, nY: int) -> Wiring:
    return Wiring(System.classical(nX), System.classical(nA), System.classical(nY), System.classical(nB))


def from_box(p: CorrelationTable | np.ndarray, tol: float = DEFAULT_TOL) -> Resource:
    if not isinstance(p, CorrelationTable):
        p = CorrelationTable(p)
    p.check(tol)
    nA, nB, nX, nY = p.shape
    J = np.diag(p.P.reshape(-1).astype(complex))
    w = box_wiring(nA, nB, nX, nY)
    return _checked(Resource(w, ChoiOperator(J, nA * nB, nX * nY)), tol)


def to_box(r: Resource) -> CorrelationTable:
    if any(s.kind is Kind.Q for s in r.wiring.systems):
        raise ValueError(f"resource {r.type} has quantum systems; not a box")
    return CorrelationTable(np.diagonal(r.matrix).real.reshape(r.wiring.dims))


# --------------------------------------------------------------------------
# assemblages


@dataclass(frozen=True)
class Assemblage:
    """Steering assemblage ``sigma[x, a] = sigma_{a|x}`` on B's quantum output."""

    sigma: np.ndarray

    def __post_init__(self):
        s = np.array(self.sigma, dtype=complex)
        if s.ndim != 4 or s.shape[2] != s.shape[3]:
            raise ValueError(f"assemblage must have shape (nX, nA, d, d), got {s.shape}")
        s.setflags(write=False)
        object.__setattr__(self, "sigma", s)

    @property
    def n_settings(self) -> int:
        return self.sigma.shape[0]

    @property
    def n_outcomes(self) -> int:
        return self.sigma.shape[1]

    @property
    def dim(self) -> int:
        return self.sigma.shape[2]

    @property
    def reduced_state(self) -> np.ndarray:
        return self.sigma[0].sum(axis=0)

    def problems(self, tol: float = DEFAULT_TOL) -> list[Violation]:
        out = []
        s = self.sigma
        herm = _maxabs(s - s.conj().transpose(0, 1, 3, 2))
        if herm > tol:
            out.append(Violation("hermitian", herm))
        lam = np.linalg.eigvalsh((s + s.conj().transpose(0, 1, 3, 2)) / 2).min()
        if lam < -tol:
            out.append(Violation("cp", float(-lam)))
        marg = s.sum(axis=1)
        ns = _maxabs(marg - marg[0])
        if ns > tol:
            out.append(Violation("nonsignaling A->B", ns))
        tr = abs(np.trace(marg[0]) - 1)
        if tr > tol:
            out.append(Violation("tp", float(tr)))
        return out


def from_assemblage(a: Assemblage, n_settings: int | None = None, tol: float = DEFAULT_TOL) -> Resource:
    if n_settings is not None and n_settings != a.n_settings:
        raise ValueError(f"assemblage has {a.n_settings} settings, expected {n_settings}")
    v = a.problems(tol)
    if v:
        raise InvalidResource("invalid assemblage: " + "; ".join(map(str, v)), v)
    nX, nA, d = a.n_settings, a.n_outcomes, a.dim
    t = np.zeros((nA, d, nX, nA, d, nX), dtype=complex)
    for x in range(nX):
        for k in range(nA):
            t[k, :, x, k, :, x] = a.sigma[x, k]
    J = t.reshape(nA * d * nX, nA * d * nX)
    w = Wiring(System.classical(nX), System.classical(nA), System.trivial(), System.quantum(d))
    return _checked(Resource(w, ChoiOperator(J, nA * d, nX)), tol)


def to_assemblage(r: Resource) -> Assemblage:
    w = r.wiring
    if w.b_in.dim != 1 or w.a_in.kind is Kind.Q or w.a_out.kind is Kind.Q:
        raise ValueError(f"resource {r.type} is not an assemblage")
    nA, d, nX = w.a_out.dim, w.b_out.dim, w.a_in.dim
    t = r.matrix.reshape(nA, d, nX, nA, d, nX)
    sigma = np.empty((nX, nA, d, d), dtype=complex)
    for x in range(nX):
        for k in range(nA):
            sigma[x, k] = t[k, :, x, k, :, x]
    return Assemblage(sigma)


def assemblage_from_state(rho, povms, dA: int, dB: int) -> Assemblage:
    """sigma_{a|x} = Tr_A[(M_{a|x} (x) I) rho] for POVMs ``povms[x][a]`` on A."""
    rho = as_matrix(rho).reshape(dA, dB, dA, dB)
    sigma = np.array(
        [[np.einsum("ij,jbic->bc", as_matrix(m), rho) for m in povm] for povm in povms]
    )
    return Assemblage(sigma)


def box_from_state(rho, povms_a, povms_b, dA: int, dB: int) -> CorrelationTable:
    """P(ab|xy) = Tr[(M_{a|x} (x) N_{b|y}) rho]."""
    rho = as_matrix(rho)
    nX, nY = len(povms_a), len(povms_b)
    nA, nB = len(povms_a[0]), len(povms_b[0])
    P = np.zeros((nA, nB, nX, nY))
    for x, y in itertools.product(range(nX), range(nY)):
        for a, b in itertools.product(range(nA), range(nB)):
            op = np.kron(as_matrix(povms_a[x][a]), as_matrix(povms_b[y][b]))
            P[a, b, x, y] = float(np.real(np.trace(op @ rho)))
    return CorrelationTable(P)


def pr_box() -> CorrelationTable:
    """P(ab|xy) = 1/2 [a xor b = x and y]."""
    P = np.zeros((2, 2, 2, 2))
    for a, b, x, y in np.ndindex(P.shape):
        P[a, b, x, y] = 0.5 * ((a ^ b) == (x & y))
    return CorrelationTable(P)


def deterministic_box(fa, fb, nA: int = 2, nB: int = 2) -> CorrelationTable:
    """The box with outputs a = fa[x], b = fb[y]."""
    P = np.zeros((nA, nB, len(fa), len(fb)))
    for x, y in itertools.product(range(len(fa)), range(len(fb))):
        P[fa[x], fb[y], x, y] = 1.0
    return CorrelationTable(P)
