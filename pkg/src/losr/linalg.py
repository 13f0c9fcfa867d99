"""Dense complex-matrix kernel and Choi-operator channel calculus.

Choi convention used everywhere in the package: for a map ``E`` from an
input space of dimension ``d_in`` to an output space of dimension ``d_out``

    J = sum_ij E(|i><j|) (x) |i><j|

i.e. unnormalized, with the OUTPUT factor first.  With this convention
``E(rho) = Tr_in[J (I_out (x) rho^T)]`` and the link product of two Choi
operators is a plain contraction of the shared row and column indices (no
partial transposes), see :func:`link`.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def tensor(*ms) -> np.ndarray:
    """Kronecker product, first argument's indices major."""
    out = np.ones((1, 1), dtype=complex)
    for m in ms:
        out = np.kron(out, np.asarray(m))
    return out


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if int(np.prod(dims)) != m.shape[0]:
        raise ValueError(f"dims {list(dims)} do not match matrix side {m.shape[0]}")


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every tensor factor whose index is not in ``keep``.

    Kept factors stay in their original order.
    """
    m = np.asarray(m)
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = m.reshape(dims + dims)
    letters = string.ascii_letters
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    for i in range(n):
        if i not in keep:
            cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    res = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    side = int(np.prod([dims[i] for i in keep])) if keep else 1
    return res.reshape(side, side)


def partial_transpose(m, dims: Sequence[int], factor: int) -> np.ndarray:
    m = np.asarray(m)
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    if not 0 <= factor < len(dims):
        raise ValueError(f"factor {factor} out of range")
    n = len(dims)
    t = m.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[factor], axes[n + factor] = axes[n + factor], axes[factor]
    return t.transpose(axes).reshape(m.shape)


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def herm_eigvals(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix (LAPACK ``heevd``)."""
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def dephase(m, dims: Sequence[int], factors: Iterable[int]) -> np.ndarray:
    """Zero every entry that is off-diagonal in any of the given factors."""
    m = np.asarray(m)
    dims = [int(d) for d in dims]
    _check_dims(m, dims)
    n = len(dims)
    t = m.reshape(dims + dims).copy()
    for f in factors:
        mask_shape = [1] * (2 * n)
        mask_shape[f] = dims[f]
        mask_shape[n + f] = dims[f]
        t = t * np.eye(dims[f]).reshape(mask_shape)
    return t.reshape(m.shape)


def proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def omega(d: int) -> np.ndarray:
    """Unnormalized maximally entangled vector sum_i |ii>."""
    return np.eye(d, dtype=complex).reshape(-1)


def shift(d: int) -> np.ndarray:
    """Generalized Pauli X: |j> -> |j+1 mod d>."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def clock(d: int) -> np.ndarray:
    """Generalized Pauli Z: |j> -> exp(2 pi i j / d) |j>."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


# --------------------------------------------------------------------------
# Choi operators


@dataclass(frozen=True)
class ChoiOperator:
    matrix: np.ndarray
    dim_out: int
    dim_in: int

    def __post_init__(self):
        m = as_matrix(self.matrix)
        side = self.dim_out * self.dim_in
        if m.shape != (side, side):
            raise ValueError(f"Choi matrix must be {side}x{side}, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_out, self.dim_in)

    def __add__(self, other: "ChoiOperator") -> "ChoiOperator":
        if self.dims != other.dims:
            raise ValueError("Choi dims differ")
        return ChoiOperator(self.matrix + other.matrix, self.dim_out, self.dim_in)

    def __mul__(self, c: float) -> "ChoiOperator":
        return ChoiOperator(self.matrix * c, self.dim_out, self.dim_in)

    __rmul__ = __mul__


def choi_from_kraus(kraus: Sequence[np.ndarray]) -> ChoiOperator:
    kraus = [as_matrix(k) for k in kraus]
    d_out, d_in = kraus[0].shape
    J = np.zeros((d_out * d_in, d_out * d_in), dtype=complex)
    for k in kraus:
        # vec with output index major: sum_i K|i> (x) |i>
        v = k.reshape(d_out, d_in).reshape(-1)
        J += np.outer(v, v.conj())
    return ChoiOperator(J, d_out, d_in)


def choi_from_map(fn, d_in: int, d_out: int) -> ChoiOperator:
    """Build the Choi operator of a linear map given as a Python callable."""
    J = np.zeros((d_out * d_in, d_out * d_in), dtype=complex)
    for i in range(d_in):
        for j in range(d_in):
            e = np.zeros((d_in, d_in), dtype=complex)
            e[i, j] = 1.0
            J += np.kron(as_matrix(fn(e)), e)
    return ChoiOperator(J, d_out, d_in)


def identity_choi(d: int) -> ChoiOperator:
    return ChoiOperator(proj(omega(d)), d, d)


def unitary_choi(u) -> ChoiOperator:
    return choi_from_kraus([u])


def choi_of_channel_apply(J: ChoiOperator, rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (J.dim_in, J.dim_in):
        raise ValueError(f"input must be {J.dim_in}x{J.dim_in}, got {rho.shape}")
    t = J.matrix.reshape(J.dim_out, J.dim_in, J.dim_out, J.dim_in)
    # Tr_in[J (I (x) rho^T)]_{o,o'} = sum_{i,i'} J[o i, o' i'] rho^T[i', i]
    return np.einsum("aibj,ij->ab", t, rho)


def compose_sequential(J2: ChoiOperator, J1: ChoiOperator) -> ChoiOperator:
    """Choi operator of E2 after E1."""
    if J1.dim_out != J2.dim_in:
        raise ValueError(f"cannot compose: dim_out(J1)={J1.dim_out} != dim_in(J2)={J2.dim_in}")
    t1 = J1.matrix.reshape(J1.dim_out, J1.dim_in, J1.dim_out, J1.dim_in)
    t2 = J2.matrix.reshape(J2.dim_out, J2.dim_in, J2.dim_out, J2.dim_in)
    t = np.einsum("yxYX,zyZY->zxZX", t1, t2)
    n = J2.dim_out * J1.dim_in
    return ChoiOperator(t.reshape(n, n), J2.dim_out, J1.dim_in)


def compose_parallel(Ja: ChoiOperator, Jb: ChoiOperator) -> ChoiOperator:
    """Choi operator of Ea (x) Eb, factors ordered (out_a, out_b, in_a, in_b)."""
    oa, ia, ob, ib = Ja.dim_out, Ja.dim_in, Jb.dim_out, Jb.dim_in
    ta = Ja.matrix.reshape(oa, ia, oa, ia)
    tb = Jb.matrix.reshape(ob, ib, ob, ib)
    t = np.einsum("aiAI,bjBJ->abijABIJ", ta, tb)
    n = oa * ob * ia * ib
    return ChoiOperator(t.reshape(n, n), oa * ob, ia * ib)


def is_cp(J: ChoiOperator, tol: float = DEFAULT_TOL) -> bool:
    m = J.matrix
    if not is_hermitian(m, tol):
        return False
    return bool(herm_eigvals(m, tol)[0] >= -tol)


def tp_defect(J: ChoiOperator) -> float:
    red = partial_trace(J.matrix, [J.dim_out, J.dim_in], keep=[1])
    return float(np.linalg.norm(red - np.eye(J.dim_in)))


def is_tp(J: ChoiOperator, tol: float = DEFAULT_TOL) -> bool:
    return tp_defect(J) <= tol


# --------------------------------------------------------------------------
# Labeled operators and the link product


@dataclass(frozen=True)
class LabeledOp:
    """An operator on a tensor product of labeled factors.

    ``tensor`` has shape ``dims + dims`` (row indices then column indices).
    Labels are unique strings; the link product contracts matching labels.
    """

    tensor: np.ndarray
    labels: tuple[str, ...]

    @classmethod
    def from_matrix(cls, m, labels: Sequence[str], dims: Sequence[int]) -> "LabeledOp":
        m = np.asarray(m, dtype=complex)
        dims = [int(d) for d in dims]
        _check_dims(m, dims)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels {labels}")
        return cls(m.reshape(dims + dims), tuple(labels))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.tensor.shape[: len(self.labels)])

    def dim(self, label: str) -> int:
        return self.dims[self.labels.index(label)]

    def matrix(self, order: Sequence[str] | None = None) -> np.ndarray:
        op = self if order is None else self.reorder(order)
        side = int(np.prod(op.dims)) if op.labels else 1
        return op.tensor.reshape(side, side)

    def reorder(self, order: Sequence[str]) -> "LabeledOp":
        order = tuple(order)
        if sorted(order) != sorted(self.labels):
            raise ValueError(f"cannot reorder {self.labels} as {order}")
        n = len(order)
        perm = [self.labels.index(l) for l in order]
        return LabeledOp(self.tensor.transpose(perm + [p + n for p in perm]), order)

    def relabel(self, mapping: dict[str, str]) -> "LabeledOp":
        labels = tuple(mapping.get(l, l) for l in self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"relabel produced duplicates: {labels}")
        return LabeledOp(self.tensor, labels)

    def merge(self, labels: Sequence[str], new: str) -> "LabeledOp":
        """Fuse several factors (first one major) into a single factor ``new``."""
        rest = [l for l in self.labels if l not in labels]
        op = self.reorder(rest + list(labels))
        k = len(rest)
        dims = list(op.dims)
        side = int(np.prod(dims[k:]))
        t = op.tensor.reshape(dims[:k] + [side] + dims[:k] + [side])
        return LabeledOp(t, tuple(rest) + (new,))

    def __add__(self, other: "LabeledOp") -> "LabeledOp":
        other = other.reorder(self.labels)
        return LabeledOp(self.tensor + other.tensor, self.labels)

    def scale(self, c) -> "LabeledOp":
        return LabeledOp(self.tensor * c, self.labels)


def link(*ops: LabeledOp) -> LabeledOp:
    """Link product of labeled Choi operators.

    Every label shared by two operators is contracted (row with row, column
    with column).  A label may appear in at most two operators.  With the
    OUT-first Choi convention this realizes sequential composition along the
    shared wires and tensor products along the rest.
    """
    count: dict[str, int] = {}
    for op in ops:
        for l in op.labels:
            count[l] = count.get(l, 0) + 1
    if any(c > 2 for c in count.values()):
        raise ValueError("a label appears in more than two operators")
    free = [l for op in ops for l in op.labels if count[l] == 1]
    all_labels = list(dict.fromkeys(l for op in ops for l in op.labels))
    if 2 * len(all_labels) > 52:
        raise ValueError("too many factors for einsum")
    sym = {l: (string.ascii_letters[2 * i], string.ascii_letters[2 * i + 1]) for i, l in enumerate(all_labels)}
    terms = []
    operands = []
    for op in ops:
        terms.append("".join(sym[l][0] for l in op.labels) + "".join(sym[l][1] for l in op.labels))
        operands.append(op.tensor)
    out = "".join(sym[l][0] for l in free) + "".join(sym[l][1] for l in free)
    t = np.einsum(",".join(terms) + "->" + out, *operands, optimize="greedy")
    return LabeledOp(np.asarray(t), tuple(free))


def pair(functional: LabeledOp, op: LabeledOp) -> complex:
    """Full contraction sum_{s,t} functional[s,t] op[s,t] over matching labels."""
    res = link(functional, op)
    if res.labels:
        raise ValueError(f"labels left open: {res.labels}")
    return complex(res.tensor)


# --------------------------------------------------------------------------
# JSON encoding of matrices


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError("expected a matrix")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.reshape(-1)],
        "im": [float(x) for x in m.imag.reshape(-1)],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * (rows * cols)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1 or re.size != rows * cols or im.size != rows * cols:
        raise ValueError("matrix entry count does not match rows x cols")
    return as_matrix((re + 1j * im).reshape(rows, cols))
