"""Type-independent LOSR resource theory: nonsignaling resources of any
I/C/Q type, LOSR transformations between them, games, and free-set tests."""

from .freeset import (
    FreeVerdict,
    MembershipReport,
    assemblage_is_unsteerable,
    box_convertible,
    box_is_local,
    state_is_ppt,
)
from .games import Analyzer, Game, evaluate, pushforward, verify_decoder
from .kernels import BACKEND
from .resources import Assemblage, CorrelationTable, InvalidResource, Resource, Wiring, validate
from .seesaw import performance_seesaw
from .transforms import LosrTransform, apply, compose, sq_decode, sq_encode
from .types import Kind, PartitionType, System, Verdict, partition_encodes

__version__ = "0.1.0"

__all__ = [
    "Analyzer",
    "Assemblage",
    "BACKEND",
    "CorrelationTable",
    "FreeVerdict",
    "Game",
    "InvalidResource",
    "Kind",
    "LosrTransform",
    "MembershipReport",
    "PartitionType",
    "Resource",
    "System",
    "Verdict",
    "Wiring",
    "apply",
    "assemblage_is_unsteerable",
    "box_convertible",
    "box_is_local",
    "compose",
    "evaluate",
    "partition_encodes",
    "performance_seesaw",
    "pushforward",
    "sq_decode",
    "sq_encode",
    "state_is_ppt",
    "validate",
    "verify_decoder",
]
