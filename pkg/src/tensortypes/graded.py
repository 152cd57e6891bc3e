"""Twisted-symmetric (fermionic) tensors.

Each slot carries a grading of its basis elements, either in Z2 (parities)
or in Z. Payloads are dense arrays whose entries vanish on every
configuration with non-zero total grading (odd total parity for Z2). The
tensor product and contraction are those of plain arrays; all fermionic signs
enter through the commutor ``(-1)^{|j||k|}`` and the product
dual-automorphor.

Bond direction is recorded in the 0-data as a ``dual`` flag. A contraction
pairs a slot with its dual placed directly after it; the reversed order
differs by the involutor ``(-1)^{|j|}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .array import decode_entries, encode_entries
from .core import TensorType, TensorTypeError
from .scalars import REAL, ScalarRing, deviation


@dataclass(frozen=True)
class GradedSpace:
    """0-data: the grading of each basis element plus the dual flag."""

    grading: tuple
    dual: bool = False

    def __post_init__(self):
        object.__setattr__(self, "grading", tuple(int(g) for g in self.grading))

    @property
    def dim(self) -> int:
        return len(self.grading)

    @property
    def parities(self) -> np.ndarray:
        return np.array(self.grading, dtype=np.int64) % 2

    def __repr__(self) -> str:
        star = "*" if self.dual else ""
        return f"G{list(self.grading)}{star}"


def space_product(a: GradedSpace, b: GradedSpace) -> GradedSpace:
    if a.dual != b.dual:
        raise TensorTypeError("cannot block a slot with a dual slot")
    grading = [ga + gb for ga in a.grading for gb in b.grading]
    return GradedSpace(grading, a.dual)


def space_dual(a: GradedSpace, zgraded: bool = False) -> GradedSpace:
    grading = tuple(-g for g in a.grading) if zgraded else a.grading
    return GradedSpace(grading, not a.dual)


def _broadcast(vec: np.ndarray, axis: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = vec.size
    return vec.reshape(shape)


def total_grading(slots: Sequence[GradedSpace]) -> np.ndarray:
    n = len(slots)
    total = np.zeros((1,) * n, dtype=np.int64)
    for k, s in enumerate(slots):
        total = total + _broadcast(np.array(s.grading, dtype=np.int64), k, n)
    return np.broadcast_to(total, tuple(s.dim for s in slots))


@dataclass(frozen=True, eq=False)
class GradedTensor:
    ring: ScalarRing
    slots: tuple
    data: np.ndarray
    zgraded: bool = False

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        data = self.ring.coerce(self.data)
        dims = tuple(s.dim for s in self.slots)
        if data.shape != dims:
            if data.size != prod(dims):
                raise TensorTypeError(
                    f"parity vectors {self.slots} do not match payload of {data.size} entries"
                )
            data = data.reshape(dims)
        object.__setattr__(self, "data", data)
        bad = self.violation_mask()
        if np.any(data[bad] != self.ring.zero):
            kind = "non-zero total grading" if self.zgraded else "odd total parity"
            raise TensorTypeError(f"graded tensor has entries on configurations of {kind}")

    def violation_mask(self) -> np.ndarray:
        total = total_grading(self.slots)
        return (total % 2 != 0) if not self.zgraded else (total != 0)

    @property
    def entries(self) -> np.ndarray:
        return self.data.reshape(-1)

    def __repr__(self) -> str:
        return f"GradedTensor({self.ring.name}, {list(self.slots)})"


def _sign(ring: ScalarRing, exponent: np.ndarray) -> np.ndarray:
    return np.where(exponent % 2 == 0, ring.one, ring.neg(ring.one)).astype(ring.dtype)


def _apply_sign(A: GradedTensor, exponent: np.ndarray, data=None) -> np.ndarray:
    data = A.data if data is None else data
    if A.ring.neg is None:
        raise TensorTypeError(f"ring {A.ring.name} has no negation for fermionic signs")
    return A.ring.mul(data, _sign(A.ring, np.broadcast_to(exponent, data.shape)))


def _same_kind(A: GradedTensor, B: GradedTensor):
    if A.ring != B.ring:
        raise TensorTypeError(f"ring mismatch: {A.ring.name} vs {B.ring.name}")
    if A.zgraded != B.zgraded:
        raise TensorTypeError("cannot combine Z- and Z2-graded tensors")


def g_tensor_product(A: GradedTensor, B: GradedTensor) -> GradedTensor:
    _same_kind(A, B)
    a = A.data.reshape(A.data.shape + (1,) * B.data.ndim)
    return GradedTensor(A.ring, A.slots + B.slots, A.ring.mul(a, B.data), A.zgraded)


def koszul_exponent(slots: Sequence[GradedSpace], perm: Sequence[int]) -> np.ndarray:
    """Sum of ``|j_k||j_l|`` over slot pairs whose order ``perm`` reverses."""
    n = len(slots)
    where = {src: dst for dst, src in enumerate(perm)}
    exponent = np.zeros((1,) * n, dtype=np.int64)
    for k in range(n):
        pk = _broadcast(slots[k].parities, k, n)
        for l in range(k + 1, n):
            if where[k] > where[l]:
                exponent = exponent + pk * _broadcast(slots[l].parities, l, n)
    return exponent


def g_permute(A: GradedTensor, perm: Sequence[int]) -> GradedTensor:
    """General commutor: transpose plus the Koszul sign."""
    perm = tuple(perm)
    if sorted(perm) != list(range(len(A.slots))):
        raise TensorTypeError(f"invalid permutation {perm}")
    signed = _apply_sign(A, koszul_exponent(A.slots, perm))
    data = np.ascontiguousarray(np.transpose(signed, perm))
    return GradedTensor(A.ring, [A.slots[p] for p in perm], data, A.zgraded)


def g_commutor(A: GradedTensor, i: int) -> GradedTensor:
    """Exchange adjacent slots ``i, i+1``: ``(-1)^{|j||k|} A(.., k, j, ..)``."""
    n = len(A.slots)
    if not 0 <= i < n - 1:
        raise TensorTypeError(f"no adjacent slot pair at {i}")
    perm = list(range(n))
    perm[i], perm[i + 1] = i + 1, i
    return g_permute(A, perm)


def g_dual_automorphor(A: GradedTensor, i: int) -> GradedTensor:
    """Diagonal sign ``(-1)^{|j||k|}`` on slots ``i, i+1``; no transposition."""
    n = len(A.slots)
    exponent = _broadcast(A.slots[i].parities, i, n) * _broadcast(
        A.slots[i + 1].parities, i + 1, n
    )
    return GradedTensor(A.ring, A.slots, _apply_sign(A, exponent), A.zgraded)


def g_involutor(A: GradedTensor, i: int) -> GradedTensor:
    """``(-1)^{|j|}`` on slot ``i``."""
    exponent = _broadcast(A.slots[i].parities, i, len(A.slots))
    return GradedTensor(A.ring, A.slots, _apply_sign(A, exponent), A.zgraded)


def g_contract(A: GradedTensor, pair: tuple[int, int]) -> GradedTensor:
    """Contract ``pair = (out, in)``: reorder with the commutor, then sum.

    The ``in`` slot must carry the dual of the ``out`` slot. After moving the
    pair to the end (``out`` first) the contraction is the plain array sum.
    """
    p, q = pair
    n = len(A.slots)
    rest = [k for k in range(n) if k not in (p, q)]
    B = g_permute(A, rest + [p, q]) if rest + [p, q] != list(range(n)) else A
    return _contract_last(B)


def _contract_last(A: GradedTensor) -> GradedTensor:
    a, b = A.slots[-2], A.slots[-1]
    if b != space_dual(a, A.zgraded):
        raise TensorTypeError(f"cannot contract {a!r} with {b!r}: not dual")
    diag = np.diagonal(A.data, axis1=-2, axis2=-1)
    return GradedTensor(A.ring, A.slots[:-2], A.ring.sum(diag, axis=-1).copy(), A.zgraded)


def g_identity(a: GradedSpace, ring: ScalarRing = REAL, zgraded: bool = False) -> GradedTensor:
    data = np.full((a.dim, a.dim), ring.zero, dtype=ring.dtype)
    np.fill_diagonal(data, ring.one)
    return GradedTensor(ring, (space_dual(a, zgraded), a), data, zgraded)


class GradedType(TensorType):
    """Z2- (or Z-) twisted-symmetric tensors over ``ring``."""

    symmetric_contraction = False
    symmetric_identity = False
    has_dual = True

    def __init__(self, ring: ScalarRing = REAL, zgraded: bool = False):
        self.ring = ring
        self.zgraded = zgraded
        self.name = ("zgraded" if zgraded else "graded") + f"/{ring.name}"
        self.exact = ring.exact

    @property
    def unit(self):
        return GradedSpace((0,))

    def product(self, a, b):
        return space_product(a, b)

    def dual(self, a):
        return space_dual(a, self.zgraded)

    def tensor(self, A, B):
        return g_tensor_product(A, B)

    def permute(self, A, perm):
        return g_permute(A, perm)

    def contract(self, A):
        return _contract_last(A)

    def merge(self, A, i):
        slots = A.slots[:i] + (space_product(A.slots[i], A.slots[i + 1]),) + A.slots[i + 2 :]
        return GradedTensor(A.ring, slots, A.data.reshape(-1), A.zgraded)

    def split(self, A, i, a, b):
        if space_product(a, b) != A.slots[i]:
            raise TensorTypeError(f"{A.slots[i]!r} is not {a!r} (x) {b!r}")
        slots = A.slots[:i] + (a, b) + A.slots[i + 1 :]
        return GradedTensor(A.ring, slots, A.data.reshape(-1), A.zgraded)

    def merge_dual(self, A, i):
        return self.merge(g_dual_automorphor(A, i), i)

    def involutor(self, A, i):
        return g_involutor(A, i)

    def identity(self, a):
        return g_identity(a, self.ring, self.zgraded)

    def trivial(self):
        return GradedTensor(self.ring, (), np.array(self.ring.one), self.zgraded)

    def deviation(self, A, B):
        if A.slots != B.slots:
            return float("inf")
        return deviation(A.data, B.data)

    def random_zero(self, rng, budget=4):
        dim = int(rng.integers(1, budget + 1))
        if self.zgraded:
            return GradedSpace(rng.integers(-1, 2, size=dim))
        return GradedSpace(rng.integers(0, 2, size=dim))

    def random_tensor(self, slots, rng):
        slots = tuple(slots)
        data = self.ring.sample(rng, tuple(s.dim for s in slots))
        probe = GradedTensor(self.ring, slots, np.zeros_like(data), self.zgraded)
        data[probe.violation_mask()] = self.ring.zero
        return GradedTensor(self.ring, slots, data, self.zgraded)

    def asymmetry_witness(self):
        odd = GradedSpace((1,))
        return GradedTensor(self.ring, (odd, self.dual(odd)), np.array([[self.ring.one]]), self.zgraded)

    def cost(self, slots):
        return float(prod(s.dim for s in slots))

    def zero_from_literal(self, lit):
        if isinstance(lit, dict):
            grading, dual = lit.get("grading"), bool(lit.get("dual", False))
        else:
            grading, dual = lit, False
        if not isinstance(grading, list) or not all(
            isinstance(g, int) and not isinstance(g, bool) for g in grading
        ):
            raise TensorTypeError(f"graded 0-data must be a list of ints, got {lit!r}")
        if not self.zgraded and any(g not in (0, 1) for g in grading):
            raise TensorTypeError("Z2 parities must be 0 or 1")
        return GradedSpace(grading, dual)

    def zero_to_literal(self, a):
        if a.dual:
            return {"grading": list(a.grading), "dual": True}
        return list(a.grading)

    def tensor_from_literal(self, slots, data):
        flat = decode_entries(self.ring, data)
        return GradedTensor(self.ring, slots, flat, self.zgraded)

    def tensor_to_literal(self, A):
        return encode_entries(A.ring, A.entries)
