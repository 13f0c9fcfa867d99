"""LOSR transformations: shared-randomness mixtures of per-party local combs.

A local comb for party ``P`` is a pair of CPTP maps around the party's share
of the resource::

    new_in --pre--> (res_in, mem)      (res_out, mem) --post--> new_out

Combs are *bound* to the resource systems of the party when a transform is
applied, which lets the canonical transforms (measurements, the semiquantum
encoder, ...) be defined independently of the resource they act on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    ChoiOperator,
    LabeledOp,
    as_matrix,
    clock,
    herm_eigvals,
    is_cp,
    is_hermitian,
    is_tp,
    link,
    matrix_from_json,
    matrix_to_json,
    omega,
    proj,
    shift,
)
from .resources import LABELS, Resource, Wiring, _checked
from .types import Kind, System

PARTIES = ("A", "B")


class TransformError(ValueError):
    pass


def _lab(party: str) -> dict[str, str]:
    return {
        "in": f"{party}i",
        "out": f"{party}o",
        "mem": f"{party}m",
        "new_in": f"{party}i*",
        "new_out": f"{party}o*",
    }


@dataclass(frozen=True)
class BoundComb:
    """A comb with concrete Choi operators.

    ``pre`` acts on labels ``(in, mem) <- new_in`` and ``post`` on
    ``new_out <- (out, mem)``, with generic label names ``in``, ``out``,
    ``mem``, ``new_in``, ``new_out``.
    """

    pre: LabeledOp
    post: LabeledOp
    new_in: System
    new_out: System

    def for_party(self, party: str) -> tuple[LabeledOp, LabeledOp]:
        m = _lab(party)
        return self.pre.relabel(m), self.post.relabel(m)

    @property
    def mem_dim(self) -> int:
        return self.pre.dim("mem")


def _bound(pre_m, pre_dims, post_m, post_dims, new_in: System, new_out: System) -> BoundComb:
    """Assemble a bound comb from matrices in (out..., in...) factor order.

    ``pre_dims`` = (d_in, d_mem, d_new_in); ``post_dims`` = (d_new_out, d_out, d_mem).
    """
    pre = LabeledOp.from_matrix(pre_m, ("in", "mem", "new_in"), pre_dims)
    post = LabeledOp.from_matrix(post_m, ("new_out", "out", "mem"), post_dims)
    return BoundComb(pre, post, new_in, new_out)


def identity_bound(inp: System, out: System) -> BoundComb:
    return _bound(
        proj(omega(inp.dim)), (inp.dim, 1, inp.dim),
        proj(omega(out.dim)), (out.dim, out.dim, 1),
        inp, out,
    )


class LocalComb:
    """Base class; subclasses implement :meth:`bind` and :meth:`to_json`."""

    def bind(self, inp: System, out: System) -> BoundComb:  # pragma: no cover - abstract
        raise NotImplementedError

    def to_json(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class ExplicitComb(LocalComb):
    """A comb given by explicit pre/post Choi operators."""

    pre: ChoiOperator
    post: ChoiOperator
    mem_dim: int
    new_in: System
    new_out: System
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        for name, J in (("pre", self.pre), ("post", self.post)):
            if not is_cp(J, self.tol):
                raise TransformError(f"{name} map of comb is not completely positive")
            if not is_tp(J, self.tol):
                raise TransformError(f"{name} map of comb is not trace preserving")
        if self.pre.dim_in != self.new_in.dim or self.pre.dim_out % self.mem_dim:
            raise TransformError("pre map dims inconsistent with new input / memory")
        if self.post.dim_out != self.new_out.dim or self.post.dim_in % self.mem_dim:
            raise TransformError("post map dims inconsistent with new output / memory")

    def bind(self, inp: System, out: System) -> BoundComb:
        d_in = self.pre.dim_out // self.mem_dim
        d_out = self.post.dim_in // self.mem_dim
        if (d_in, d_out) != (inp.dim, out.dim):
            raise TransformError(
                f"comb expects resource systems of dims in={d_in}, out={d_out}; got {inp}, {out}"
            )
        return _bound(
            self.pre.matrix, (d_in, self.mem_dim, self.new_in.dim),
            self.post.matrix, (self.new_out.dim, d_out, self.mem_dim),
            self.new_in, self.new_out,
        )

    def to_json(self) -> dict:
        return {
            "pre": matrix_to_json(self.pre.matrix),
            "post": matrix_to_json(self.post.matrix),
            "mem": self.mem_dim,
            "new_in": str(self.new_in),
            "new_out": str(self.new_out),
        }


@dataclass(frozen=True)
class CanonicalComb(LocalComb):
    """A named, resource-independent comb built lazily at bind time."""

    name: str
    params: tuple
    builder: Callable[[System, System], BoundComb]

    def bind(self, inp: System, out: System) -> BoundComb:
        return self.builder(inp, out)

    def to_json(self) -> dict:
        return {"canonical": self.name, **dict(self.params)}


@dataclass(frozen=True)
class ComposedComb(LocalComb):
    """``outer`` applied after ``inner`` (inner sits next to the resource)."""

    inner: LocalComb
    outer: LocalComb

    def bind(self, inp: System, out: System) -> BoundComb:
        b1 = self.inner.bind(inp, out)
        b2 = self.outer.bind(b1.new_in, b1.new_out)
        pre = link(
            b1.pre.relabel({"mem": "m1", "new_in": "mid"}),
            b2.pre.relabel({"in": "mid", "mem": "m2"}),
        ).merge(["m1", "m2"], "mem")
        post = link(
            b1.post.relabel({"mem": "m1", "new_out": "mid"}),
            b2.post.relabel({"out": "mid", "mem": "m2"}),
        ).merge(["m1", "m2"], "mem")
        return BoundComb(
            pre.reorder(("in", "mem", "new_in")),
            post.reorder(("new_out", "out", "mem")),
            b2.new_in,
            b2.new_out,
        )

    def to_json(self) -> dict:
        return {"compose": [self.inner.to_json(), self.outer.to_json()]}


@dataclass(frozen=True)
class Branch:
    p: float
    A: Optional[LocalComb] = None
    B: Optional[LocalComb] = None

    def comb(self, party: str) -> Optional[LocalComb]:
        return self.A if party == "A" else self.B


@dataclass(frozen=True)
class LosrTransform:
    branches: tuple[Branch, ...]

    def __post_init__(self):
        branches = tuple(self.branches)
        if not branches:
            raise TransformError("a transform needs at least one branch")
        ps = np.array([b.p for b in branches], dtype=float)
        if np.any(ps < 0) or abs(ps.sum() - 1) > 1e-12:
            raise TransformError(f"branch probabilities must be a distribution, got {ps}")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def identity(cls) -> "LosrTransform":
        return cls((Branch(1.0),))

    @classmethod
    def local(cls, party: str, comb: LocalComb) -> "LosrTransform":
        if party not in PARTIES:
            raise TransformError(f"unknown party {party!r}")
        return cls((Branch(1.0, **{party: comb}),))

    @classmethod
    def product(cls, comb_a: Optional[LocalComb], comb_b: Optional[LocalComb]) -> "LosrTransform":
        return cls((Branch(1.0, comb_a, comb_b),))

    @classmethod
    def mixture(cls, weighted: Sequence[tuple[float, "LosrTransform"]]) -> "LosrTransform":
        out = []
        for w, t in weighted:
            out.extend(Branch(w * b.p, b.A, b.B) for b in t.branches)
        return cls(tuple(out))

    def bind(self, wiring: Wiring) -> list[tuple[float, BoundComb, BoundComb]]:
        bound = []
        for br in self.branches:
            pair = []
            for party in PARTIES:
                inp, out = wiring.party(party)
                c = br.comb(party)
                pair.append(identity_bound(inp, out) if c is None else c.bind(inp, out))
            bound.append((br.p, pair[0], pair[1]))
        sigs = {(a.new_in, a.new_out, b.new_in, b.new_out) for _, a, b in bound}
        if len(sigs) != 1:
            raise TransformError("branches disagree on the output type signature")
        return bound

    def output_wiring(self, wiring: Wiring) -> Wiring:
        _, a, b = self.bind(wiring)[0]
        return Wiring(a.new_in, a.new_out, b.new_in, b.new_out)

    def to_json(self) -> dict:
        return {
            "branches": [
                {
                    "p": b.p,
                    "A": None if b.A is None else b.A.to_json(),
                    "B": None if b.B is None else b.B.to_json(),
                }
                for b in self.branches
            ]
        }


_PRIMED = {f"{p}{s}*": f"{p}{s}" for p in PARTIES for s in "io"}


def apply_raw(t: LosrTransform, r: Resource) -> Resource:
    """Apply without validating the result."""
    bound = t.bind(r.wiring)
    J = r.labeled()
    total = None
    for p, ca, cb in bound:
        if p == 0:
            continue
        pa, qa = ca.for_party("A")
        pb, qb = cb.for_party("B")
        term = link(J, pa, qa, pb, qb).relabel(_PRIMED).scale(p)
        total = term if total is None else total + term
    _, ca, cb = bound[0]
    wiring = Wiring(ca.new_in, ca.new_out, cb.new_in, cb.new_out)
    return Resource.from_labeled(total, wiring)


def apply(t: LosrTransform, r: Resource, tol: float = DEFAULT_TOL) -> Resource:
    """Return ``t`` applied to ``r``; the result is validated."""
    return _checked(apply_raw(t, r), tol)


def adjoint_functional(t: LosrTransform, functional: LabeledOp, wiring: Wiring) -> LabeledOp:
    """Pull a linear functional on ``t``'s outputs back to resources of ``wiring``.

    ``functional`` pairs with Choi tensors over the standard labels via
    :func:`linalg.pair`; the result satisfies
    ``pair(result, J) == pair(functional, apply_raw(t, J))``.
    """
    bound = t.bind(wiring)
    primed = functional.relabel({v: k for k, v in _PRIMED.items()})
    total = None
    for p, ca, cb in bound:
        pa, qa = ca.for_party("A")
        pb, qb = cb.for_party("B")
        term = link(primed, pa, qa, pb, qb).scale(p)
        total = term if total is None else total + term
    return total.reorder(LABELS)


def compose(t2: LosrTransform, t1: LosrTransform) -> LosrTransform:
    """The transform ``t2 after t1``; branches are the products of both lists."""
    out = []
    for b1 in t1.branches:
        for b2 in t2.branches:
            combs = []
            for party in PARTIES:
                c1, c2 = b1.comb(party), b2.comb(party)
                if c1 is None:
                    combs.append(c2)
                elif c2 is None:
                    combs.append(c1)
                else:
                    combs.append(ComposedComb(c1, c2))
            out.append(Branch(b1.p * b2.p, combs[0], combs[1]))
    return LosrTransform(tuple(out))


# --------------------------------------------------------------------------
# canonical transforms


def _check_povm(effects, tol=DEFAULT_TOL) -> list[np.ndarray]:
    effects = [as_matrix(e) for e in effects]
    if not effects:
        raise TransformError("empty POVM")
    d = effects[0].shape[0]
    for e in effects:
        if e.shape != (d, d) or not is_hermitian(e, tol) or herm_eigvals(e, tol)[0] < -tol:
            raise TransformError("POVM effects must be PSD matrices of equal size")
    if np.max(np.abs(sum(effects) - np.eye(d))) > tol:
        raise TransformError("POVM effects do not sum to the identity")
    return effects


def _check_state(rho, tol=DEFAULT_TOL) -> np.ndarray:
    rho = as_matrix(rho)
    if not is_hermitian(rho, tol) or herm_eigvals(rho, tol)[0] < -tol:
        raise TransformError("state is not positive semidefinite")
    if abs(np.trace(rho) - 1) > tol:
        raise TransformError("state does not have unit trace")
    return rho


def _measurement_choi(effects: Sequence[np.ndarray]) -> np.ndarray:
    """Choi of rho -> sum_k Tr(M_k rho) |k><k|, factors (k, in)."""
    k = len(effects)
    d = effects[0].shape[0]
    J = np.zeros((k * d, k * d), dtype=complex)
    for i, m in enumerate(effects):
        J[i * d:(i + 1) * d, i * d:(i + 1) * d] = m.T
    return J


def _check_dim(sys: System, d: int, what: str) -> None:
    if sys.dim != d:
        raise TransformError(f"{what} has dimension {sys.dim}, expected {d}")


def measure_output(party: str, povm: Sequence) -> LosrTransform:
    """Measure the party's output; it becomes classical with one label per effect."""
    effects = _check_povm(povm)
    d, k = effects[0].shape[0], len(effects)
    post = _measurement_choi(effects)

    def build(inp: System, out: System) -> BoundComb:
        _check_dim(out, d, "output")
        return _bound(proj(omega(inp.dim)), (inp.dim, 1, inp.dim), post, (k, d, 1), inp, System.classical(k))

    return LosrTransform.local(party, CanonicalComb("measure", (("povm", tuple(map(matrix_to_json, effects))),), build))


def measure_with_settings(party: str, povms: Sequence[Sequence]) -> LosrTransform:
    """Measure the output with a POVM chosen by a new classical setting.

    The setting is appended (as the minor factor) to the party's input.
    """
    povms = [_check_povm(p) for p in povms]
    ns = len(povms)
    k = len(povms[0])
    d = povms[0][0].shape[0]
    if any(len(p) != k or p[0].shape[0] != d for p in povms):
        raise TransformError("all POVMs must have the same number of effects and dimension")
    # post: (k) <- (out d, mem ns)
    post = np.zeros((k, d, ns, k, d, ns), dtype=complex)
    for s, effects in enumerate(povms):
        for i, m in enumerate(effects):
            post[i, :, s, i, :, s] = m.T
    post = post.reshape(k * d * ns, k * d * ns)

    def build(inp: System, out: System) -> BoundComb:
        _check_dim(out, d, "output")
        n = inp.dim
        # pre: (in n, mem ns) <- (new_in = n x ns), identity on n, copy of s
        pre = np.zeros((n, ns, n, ns, n, ns, n, ns), dtype=complex)
        for s in range(ns):
            pre[:, s, :, s, :, s, :, s] = proj(omega(n)).reshape(n, n, n, n)
        pre = pre.reshape(n * ns * n * ns, n * ns * n * ns)
        return _bound(pre, (n, ns, n * ns), post, (k, d, ns), inp * System.classical(ns), System.classical(k))

    params = (("povms", tuple(tuple(map(matrix_to_json, p)) for p in povms)),)
    return LosrTransform.local(party, CanonicalComb("measure-settings", params, build))


def prepare_from_classical(party: str, states: Sequence) -> LosrTransform:
    """Replace the party's input by a classical label ``j`` that prepares ``states[j]``."""
    states = [_check_state(s) for s in states]
    if not states:
        raise TransformError("need at least one state")
    d, n = states[0].shape[0], len(states)
    if any(s.shape != (d, d) for s in states):
        raise TransformError("states must share a dimension")
    pre = np.zeros((d, n, d, n), dtype=complex)
    for j, s in enumerate(states):
        pre[:, j, :, j] = s
    pre = pre.reshape(d * n, d * n)

    def build(inp: System, out: System) -> BoundComb:
        _check_dim(inp, d, "input")
        return _bound(pre, (d, 1, n), proj(omega(out.dim)), (out.dim, out.dim, 1), System.classical(n), out)

    return LosrTransform.local(party, CanonicalComb("prepare", (("states", tuple(map(matrix_to_json, states))),), build))


def entangle_assist(party: str, phi, dims: tuple[int, int]) -> LosrTransform:
    """Feed half of the pure state ``phi`` into the party's input; keep the other half.

    The kept half is appended (minor factor) to the party's output, and the
    party's input becomes trivial.
    """
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    d1, d2 = dims
    if phi.size != d1 * d2:
        raise TransformError(f"phi has {phi.size} amplitudes, expected {d1 * d2}")
    if abs(np.vdot(phi, phi) - 1) > DEFAULT_TOL:
        raise TransformError("phi is not normalized")
    pre = proj(phi)

    def build(inp: System, out: System) -> BoundComb:
        _check_dim(inp, d1, "input")
        n = out.dim * d2
        return _bound(pre, (d1, d2, 1), proj(omega(n)), (n, out.dim, d2), System.trivial(), out * System.quantum(d2))

    params = (("phi", matrix_to_json(phi.reshape(-1, 1))), ("dims", list(dims)))
    return LosrTransform.local(party, CanonicalComb("entangle", params, build))


def _check_stochastic(kernel) -> np.ndarray:
    K = np.asarray(kernel, dtype=float)
    if K.ndim != 2 or np.any(K < -DEFAULT_TOL) or np.max(np.abs(K.sum(axis=0) - 1)) > DEFAULT_TOL:
        raise TransformError("kernel must be column-stochastic")
    return K


def stochastic_input(party: str, kernel) -> LosrTransform:
    """Relabel/randomize a classical input: ``x = K[x, x']`` given new input ``x'``."""
    K = _check_stochastic(kernel)
    nx, nxp = K.shape
    pre = np.zeros((nx, nxp, nx, nxp), dtype=complex)
    for x in range(nx):
        for xp in range(nxp):
            pre[x, xp, x, xp] = K[x, xp]
    pre = pre.reshape(nx * nxp, nx * nxp)

    def build(inp: System, out: System) -> BoundComb:
        _check_dim(inp, nx, "input")
        return _bound(pre, (nx, 1, nxp), proj(omega(out.dim)), (out.dim, out.dim, 1), System.classical(nxp), out)

    return LosrTransform.local(party, CanonicalComb("stochastic-input", (("kernel", K.tolist()),), build))


def stochastic_output(party: str, kernel) -> LosrTransform:
    """Classical post-processing ``a' ~ K[a', a]`` of the party's output."""
    K = _check_stochastic(kernel)
    effects = [np.diag(K[i]).astype(complex) for i in range(K.shape[0])]
    comb = measure_output(party, effects).branches[0].comb(party)
    return LosrTransform.local(party, CanonicalComb("stochastic-output", (("kernel", K.tolist()),), comb.builder))


def bell_basis(d: int) -> list[np.ndarray]:
    """Vectors (I (x) X^a Z^b)|Omega>/sqrt(d) on (resource output, new input), index a*d+b."""
    X, Z = shift(d), clock(d)
    om = omega(d) / np.sqrt(d)
    out = []
    for a in range(d):
        for b in range(d):
            V = np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b)
            out.append(np.kron(np.eye(d), V) @ om)
    return out


def teleport_corrections(d: int) -> list[np.ndarray]:
    """Correction unitaries matched to :func:`bell_basis`: ``(X^a Z^b)^T``."""
    X, Z = shift(d), clock(d)
    return [
        (np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b)).T
        for a in range(d)
        for b in range(d)
    ]


def sq_encode(party: str, d: int) -> LosrTransform:
    """Bell-measure the party's quantum output together with a new quantum input.

    The output becomes classical of dimension ``d**2``; the new input of
    dimension ``d`` is appended (minor factor) to the party's input.
    """
    effects = [proj(v) for v in bell_basis(d)]
    post = _measurement_choi(effects)  # (k) <- (out d, mem d)

    def build(inp: System, out: System) -> BoundComb:
        if out.kind is not Kind.Q or out.dim != d:
            raise TransformError(f"sq-encode needs a quantum output of dimension {d}, got {out}")
        n = inp.dim * d
        return _bound(proj(omega(n)), (inp.dim, d, n), post, (d * d, d, d), inp * System.quantum(d), System.classical(d * d))

    return LosrTransform.local(party, CanonicalComb("sq-encode", (("d", d),), build))


def sq_decode(party: str, d: int, input_kind: Kind | None = None) -> LosrTransform:
    """Left inverse of :func:`sq_encode`: teleport through the Bell measurement.

    Feeds half of a maximally entangled pair into the trailing ``d``-dim
    input and corrects the kept half conditioned on the classical outcome.
    ``input_kind`` restores the kind of the remaining input (default: quantum
    unless trivial).
    """
    U = teleport_corrections(d)
    post = np.zeros((d, d * d, d, d, d * d, d), dtype=complex)  # (new_out, k, mem)
    for k, u in enumerate(U):
        v = np.kron(u, np.eye(d)) @ omega(d)
        post[:, k, :, :, k, :] = proj(v).reshape(d, d, d, d)
    post = post.reshape(d * d * d * d, d * d * d * d)

    def build(inp: System, out: System) -> BoundComb:
        if out.kind is not Kind.C or out.dim != d * d:
            raise TransformError(f"sq-decode needs a classical output of dimension {d * d}, got {out}")
        if inp.dim % d:
            raise TransformError(f"sq-decode needs an input containing a {d}-dim quantum factor, got {inp}")
        n = inp.dim // d
        # pre: (in = (n, q), mem) <- new_in n; identity on n, |Omega><Omega|/d on (q, mem)
        ident = proj(omega(n)).reshape(n, n, n, n)
        bell = proj(omega(d)).reshape(d, d, d, d) / d
        pre = np.einsum("aAbB,qmQM->aqmAbQMB", ident, bell).reshape(n * d * d * n, n * d * d * n)
        if n == 1:
            new_in = System.trivial()
        else:
            kind = input_kind if input_kind is not None else Kind.Q
            new_in = System(kind, n)
        return _bound(pre, (n * d, d, n), post, (d, d * d, d), new_in, System.quantum(d))

    params = (("d", d),) if input_kind is None else (("d", d), ("input_kind", Kind(input_kind).name))
    return LosrTransform.local(party, CanonicalComb("sq-decode", params, build))


# --------------------------------------------------------------------------
# JSON


def _comb_from_json(obj, party: str) -> Optional[LocalComb]:
    if obj is None:
        return None
    if "compose" in obj:
        inner, outer = (_comb_from_json(o, party) for o in obj["compose"])
        return ComposedComb(inner, outer)
    if "canonical" in obj:
        name = obj["canonical"]
        if name == "sq-encode":
            t = sq_encode(party, int(obj["d"]))
        elif name == "sq-decode":
            kind = Kind.parse(obj["input_kind"]) if "input_kind" in obj else None
            t = sq_decode(party, int(obj["d"]), kind)
        elif name == "measure":
            t = measure_output(party, [matrix_from_json(m) for m in obj["povm"]])
        elif name == "measure-settings":
            t = measure_with_settings(party, [[matrix_from_json(m) for m in p] for p in obj["povms"]])
        elif name == "prepare":
            t = prepare_from_classical(party, [matrix_from_json(m) for m in obj["states"]])
        elif name == "entangle":
            t = entangle_assist(party, matrix_from_json(obj["phi"]), tuple(obj["dims"]))
        elif name == "stochastic-input":
            t = stochastic_input(party, obj["kernel"])
        elif name == "stochastic-output":
            t = stochastic_output(party, obj["kernel"])
        else:
            raise TransformError(f"unknown canonical comb {name!r}")
        return t.branches[0].comb(party)
    return ExplicitComb(
        _choi_pre(obj),
        _choi_post(obj),
        int(obj["mem"]),
        System.parse(obj["new_in"]),
        System.parse(obj["new_out"]),
    )


def _choi_pre(obj) -> ChoiOperator:
    m = matrix_from_json(obj["pre"])
    d_new = System.parse(obj["new_in"]).dim
    return ChoiOperator(m, m.shape[0] // d_new, d_new)


def _choi_post(obj) -> ChoiOperator:
    m = matrix_from_json(obj["post"])
    d_new = System.parse(obj["new_out"]).dim
    return ChoiOperator(m, d_new, m.shape[0] // d_new)


def transform_from_json(obj: dict) -> LosrTransform:
    try:
        return LosrTransform(
            tuple(
                Branch(float(b["p"]), _comb_from_json(b.get("A"), "A"), _comb_from_json(b.get("B"), "B"))
                for b in obj["branches"]
            )
        )
    except (KeyError, TypeError) as exc:
        raise TransformError(f"malformed transform: {exc}") from exc


def parse_canonical(spec: str) -> LosrTransform:
    """Parse CLI names such as ``sq-encode:A:2`` or ``sq-decode:B:2``.

    Several specs joined by ``+`` are applied left to right.
    """
    t = None
    for part in spec.split("+"):
        bits = part.strip().split(":")
        if len(bits) != 3 or bits[1] not in PARTIES:
            raise TransformError(f"malformed transform name {part!r}; expected <name>:<party>:<d>")
        name, party, d = bits[0], bits[1], int(bits[2])
        if name == "sq-encode":
            step = sq_encode(party, d)
        elif name == "sq-decode":
            step = sq_decode(party, d)
        else:
            raise TransformError(f"unknown canonical transform {name!r}")
        t = step if t is None else compose(step, t)
    if t is None:
        raise TransformError("empty transform spec")
    return t
