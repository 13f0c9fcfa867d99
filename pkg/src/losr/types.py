"""The trivial/classical/quantum type algebra and the encodability order.

The order over single-party partition types is *derived* from a handful of
seed facts (embeddings, the universality of the semiquantum partition type,
and the two known impossibility results) by closing under transitivity.
``TABLE_FIXTURE`` is an independent hand-written copy of the published grid
used to cross-check the derivation.
"""

from __future__ import annotations

import enum
import functools
import itertools
import re
from dataclasses import dataclass


class Kind(enum.IntEnum):
    I = 0  # trivial
    C = 1  # classical
    Q = 2  # quantum

    @classmethod
    def parse(cls, s: str) -> "Kind":
        try:
            return cls[s.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown system kind {s!r}; expected I, C or Q") from None


@dataclass(frozen=True)
class System:
    kind: Kind
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.I and self.dim != 1:
            raise ValueError("trivial systems have dimension 1")
        if self.kind is not Kind.I and self.dim < 2:
            raise ValueError(f"{self.kind.name} systems need dimension >= 2")

    @classmethod
    def trivial(cls) -> "System":
        return cls(Kind.I, 1)

    @classmethod
    def classical(cls, d: int) -> "System":
        return cls(Kind.C, d) if d > 1 else cls.trivial()

    @classmethod
    def quantum(cls, d: int) -> "System":
        return cls(Kind.Q, d) if d > 1 else cls.trivial()

    @classmethod
    def parse(cls, s: str) -> "System":
        """Parse ``"<kind>:<dim>"``; a bare ``"I"`` means the trivial system."""
        m = re.fullmatch(r"\s*([ICQicq])\s*(?::\s*(\d+))?\s*", s)
        if not m:
            raise ValueError(f"malformed system {s!r}")
        kind = Kind.parse(m.group(1))
        dim = int(m.group(2)) if m.group(2) else 1
        return cls(kind, dim)

    def __str__(self) -> str:
        return f"{self.kind.name}:{self.dim}"

    def __mul__(self, other: "System") -> "System":
        """Group two systems into one, typed by the least expressive embedding."""
        d = self.dim * other.dim
        if d == 1:
            return System.trivial()
        return System(max(self.kind, other.kind, Kind.C), d)


def embeds(a: Kind, b: Kind) -> bool:
    """True if systems of kind ``a`` embed systems of kind ``b`` (I <= C <= Q)."""
    return Kind(a) >= Kind(b)


@dataclass(frozen=True, order=True)
class PartitionType:
    input: Kind
    output: Kind

    def __post_init__(self):
        object.__setattr__(self, "input", Kind(self.input))
        object.__setattr__(self, "output", Kind(self.output))

    @classmethod
    def parse(cls, s: str) -> "PartitionType":
        m = re.fullmatch(r"\s*([ICQicq])\s*->\s*([ICQicq])\s*", s)
        if not m:
            raise ValueError(f"malformed partition type {s!r}")
        return cls(Kind.parse(m.group(1)), Kind.parse(m.group(2)))

    def __str__(self) -> str:
        return f"{self.input.name}->{self.output.name}"


ALL_PARTITIONS = tuple(PartitionType(x, y) for x in Kind for y in Kind)
NONTRIVIAL_PARTITIONS = tuple(p for p in ALL_PARTITIONS if p.output is not Kind.I)


def is_trivial_partition(t: PartitionType) -> bool:
    return t.output is Kind.I


@dataclass(frozen=True)
class GlobalType:
    parties: tuple[PartitionType, ...]

    def __post_init__(self):
        if len(self.parties) < 1:
            raise ValueError("a global type needs at least one party")

    @classmethod
    def parse(cls, s: str) -> "GlobalType":
        m = re.fullmatch(r"\s*([ICQicq]+)\s*->\s*([ICQicq]+)\s*", s)
        if not m or len(m.group(1)) != len(m.group(2)):
            raise ValueError(f"malformed global type {s!r}")
        return cls(tuple(PartitionType(Kind.parse(x), Kind.parse(y)) for x, y in zip(m.group(1), m.group(2))))

    def __str__(self) -> str:
        return "".join(p.input.name for p in self.parties) + "->" + "".join(p.output.name for p in self.parties)


class Verdict(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


PROVENANCE_KEYS = frozenset(
    {"embed", "werner-states", "losr-cannot-entangle", "trans", "semiquantum-games", "thm-3", "open"}
)


@dataclass(frozen=True)
class EncodeVerdict:
    value: Verdict
    provenance: str

    def __post_init__(self):
        if self.provenance not in PROVENANCE_KEYS:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def __str__(self) -> str:
        return f"{self.value.value}/{self.provenance}"


def _p(s: str) -> PartitionType:
    return PartitionType.parse(s)


def _partition_embeds(t: PartitionType, u: PartitionType) -> bool:
    return embeds(t.input, u.input) and embeds(t.output, u.output)


@functools.lru_cache(maxsize=None)
def _derived_order() -> dict[tuple[PartitionType, PartitionType], EncodeVerdict]:
    yes: dict[tuple, str] = {}
    no: dict[tuple, str] = {}

    for t, u in itertools.product(ALL_PARTITIONS, repeat=2):
        if is_trivial_partition(u):
            # the three output-trivial partitions are the bottom class
            yes[t, u] = "embed"
        elif _partition_embeds(t, u):
            yes[t, u] = "embed"
    sq = _p("Q->C")
    for u in ALL_PARTITIONS:
        if (sq, u) not in yes:
            yes[sq, u] = "semiquantum-games" if u == _p("I->Q") else "thm-3"

    no[_p("C->C"), _p("I->Q")] = "werner-states"
    no[_p("I->Q"), _p("C->C")] = "losr-cannot-entangle"
    # a trivial partition carries no nonclassicality, a nontrivial one can
    for t in ALL_PARTITIONS:
        if is_trivial_partition(t):
            no[t, _p("I->C")] = "trans"

    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(yes), repeat=2):
            if b == c and (a, d) not in yes:
                yes[a, d] = "trans"
                changed = True
        for (a, b) in list(no):
            for (c, d) in list(yes):
                # a >= d and a not>= b  =>  d not>= b
                if c == a and (d, b) not in no and (d, b) not in yes:
                    no[d, b] = "trans"
                    changed = True
                # a not>= b and c >= b  =>  a not>= c
                if d == b and (a, c) not in no and (a, c) not in yes:
                    no[a, c] = "trans"
                    changed = True

    clash = set(yes) & set(no)
    if clash:
        raise AssertionError(f"inconsistent encodability facts: {clash}")

    out = {}
    for key in itertools.product(ALL_PARTITIONS, repeat=2):
        if key in yes:
            out[key] = EncodeVerdict(Verdict.YES, yes[key])
        elif key in no:
            out[key] = EncodeVerdict(Verdict.NO, no[key])
        else:
            out[key] = EncodeVerdict(Verdict.UNKNOWN, "open")
    return out


def partition_encodes(t: PartitionType, u: PartitionType) -> EncodeVerdict:
    """Does partition type ``t`` encode the nonclassicality of ``u``?"""
    return _derived_order()[t, u]


# Published grid over the six nontrivial partition types: TABLE_FIXTURE[t][u]
# answers "does t encode u".
TABLE_FIXTURE: dict[str, dict[str, tuple[str, str]]] = {
    "I->C": {
        "I->C": ("Yes", "embed"), "I->Q": ("No", "trans"), "C->C": ("No", "trans"),
        "C->Q": ("No", "trans"), "Q->C": ("No", "trans"), "Q->Q": ("No", "trans"),
    },
    "I->Q": {
        "I->C": ("Yes", "embed"), "I->Q": ("Yes", "embed"), "C->C": ("No", "losr-cannot-entangle"),
        "C->Q": ("No", "trans"), "Q->C": ("No", "trans"), "Q->Q": ("No", "trans"),
    },
    "C->C": {
        "I->C": ("Yes", "embed"), "I->Q": ("No", "werner-states"), "C->C": ("Yes", "embed"),
        "C->Q": ("No", "trans"), "Q->C": ("No", "trans"), "Q->Q": ("No", "trans"),
    },
    "C->Q": {
        "I->C": ("Yes", "embed"), "I->Q": ("Yes", "embed"), "C->C": ("Yes", "embed"),
        "C->Q": ("Yes", "embed"), "Q->C": ("Unknown", "open"), "Q->Q": ("Unknown", "open"),
    },
    "Q->C": {
        "I->C": ("Yes", "embed"), "I->Q": ("Yes", "semiquantum-games"), "C->C": ("Yes", "embed"),
        "C->Q": ("Yes", "thm-3"), "Q->C": ("Yes", "embed"), "Q->Q": ("Yes", "thm-3"),
    },
    "Q->Q": {
        "I->C": ("Yes", "embed"), "I->Q": ("Yes", "embed"), "C->C": ("Yes", "embed"),
        "C->Q": ("Yes", "embed"), "Q->C": ("Yes", "embed"), "Q->Q": ("Yes", "embed"),
    },
}

_GLOBAL_NO = {
    (GlobalType.parse("CC->CC"), GlobalType.parse("II->QQ")): "werner-states",
    (GlobalType.parse("II->QQ"), GlobalType.parse("CC->CC")): "losr-cannot-entangle",
}


def global_encodes_sufficient(t: GlobalType, u: GlobalType) -> EncodeVerdict:
    """Partitionwise sufficient test for ``t`` encoding ``u``.

    Only ``Yes`` is conclusive in general; partitionwise failure yields
    ``Unknown`` except for the two global impossibilities known outright.
    """
    if len(t.parties) != len(u.parties):
        raise ValueError(f"party count mismatch: {t} vs {u}")
    if (t, u) in _GLOBAL_NO:
        return EncodeVerdict(Verdict.NO, _GLOBAL_NO[t, u])
    cells = [partition_encodes(a, b) for a, b in zip(t.parties, u.parties)]
    if all(c.value is Verdict.YES for c in cells):
        provs = {c.provenance for c in cells}
        prov = next((k for k in ("thm-3", "semiquantum-games", "trans") if k in provs), "embed")
        return EncodeVerdict(Verdict.YES, prov)
    return EncodeVerdict(Verdict.UNKNOWN, "open")
