"""Tensor types, tensor networks and mappings between them."""

from .array import ArrayTensor, ArrayType, einsum_pair, kron, permute
from .core import AxiomReport, TensorType, TensorTypeError, run_axiom_suite
from .graded import GradedSpace, GradedTensor, GradedType, g_commutor, g_contract, g_permute
from .mappings import (
    MappingError,
    TensorMapping,
    map_network,
    mapping_from_name,
    verify_mapping_commutes,
)
from .network import (
    EvaluationError,
    Network,
    NetworkParseError,
    NetworkValidationError,
    evaluate,
    evaluate_order_independent,
    load_network,
    plan,
    validate,
)
from .pairing import PairingTensor, PairingType, p_count
from .scalars import BOOLEAN, COMPLEX, NONNEG, REAL, ScalarRing, int_mod, ring_from_name
from .schur import SchurRectType, SchurSquareType, SchurTensor, SingularBlock, determinant, pfaffian

__all__ = [
    "ArrayTensor",
    "ArrayType",
    "AxiomReport",
    "BOOLEAN",
    "COMPLEX",
    "EvaluationError",
    "GradedSpace",
    "GradedTensor",
    "GradedType",
    "MappingError",
    "NONNEG",
    "Network",
    "NetworkParseError",
    "NetworkValidationError",
    "PairingTensor",
    "PairingType",
    "REAL",
    "ScalarRing",
    "SchurRectType",
    "SchurSquareType",
    "SchurTensor",
    "SingularBlock",
    "TensorMapping",
    "TensorType",
    "TensorTypeError",
    "determinant",
    "einsum_pair",
    "evaluate",
    "evaluate_order_independent",
    "g_commutor",
    "g_contract",
    "g_permute",
    "int_mod",
    "kron",
    "load_network",
    "map_network",
    "mapping_from_name",
    "p_count",
    "permute",
    "pfaffian",
    "plan",
    "ring_from_name",
    "run_axiom_suite",
    "validate",
    "verify_mapping_commutes",
]
