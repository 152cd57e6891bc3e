"""Skeletal array tensors over an arbitrary commutative semiring.

Entries are stored row-major: the configuration ``(i, j)`` of a pair of slots
with dimensions ``(a, b)`` sits at flat position ``b*i + j``. All operations
materialise their results; nothing is a lazy view.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Hashable, Mapping, Sequence

import numpy as np

from .core import TensorType, TensorTypeError
from .scalars import REAL, ScalarRing, deviation, ring_from_name


@dataclass(frozen=True, eq=False)
class ArrayTensor:
    """An array over ``ring`` with one axis per slot."""

    ring: ScalarRing
    data: np.ndarray

    def __post_init__(self):
        if self.data.dtype != np.dtype(self.ring.dtype):
            object.__setattr__(self, "data", self.ring.coerce(self.data))

    @classmethod
    def from_flat(cls, ring: ScalarRing, shape: Sequence[int], entries) -> "ArrayTensor":
        shape = tuple(int(d) for d in shape)
        if any(d < 0 for d in shape):
            raise TensorTypeError(f"negative dimension in {shape}")
        if 0 in shape and not ring.has_zero:
            raise TensorTypeError("dimension 0 needs a ring with zero")
        flat = ring.coerce(entries).reshape(-1)
        if flat.size != prod(shape):
            raise TensorTypeError(
                f"{flat.size} entries do not fit shape {shape} ({prod(shape)} entries)"
            )
        return cls(ring, flat.reshape(shape))

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def slots(self) -> tuple:
        return self.data.shape

    @property
    def entries(self) -> np.ndarray:
        return self.data.reshape(-1)

    def __repr__(self) -> str:
        return f"ArrayTensor({self.ring.name}, shape={self.shape})"


def _same_ring(A: ArrayTensor, B: ArrayTensor) -> ScalarRing:
    if A.ring != B.ring:
        raise TensorTypeError(f"ring mismatch: {A.ring.name} vs {B.ring.name}")
    return A.ring


def kron(A: ArrayTensor, B: ArrayTensor) -> ArrayTensor:
    """Tensor product: ``(A (x) B)(i, j) = A(i) * B(j)``."""
    ring = _same_ring(A, B)
    a = A.data.reshape(A.shape + (1,) * B.data.ndim)
    return ArrayTensor(ring, ring.mul(a, B.data))


def einsum_pair(A: ArrayTensor, pair: tuple[int, int]) -> ArrayTensor:
    """Sum over the diagonal of two slots; the other slots keep their order.

    The summation runs over ascending ``j`` with the ring's addition, so the
    floating-point result does not depend on numpy's reduction strategy.
    """
    p, q = pair
    n = A.data.ndim
    if p == q or not (0 <= p < n and 0 <= q < n):
        raise TensorTypeError(f"invalid contraction pair {pair} for {n} slots")
    if A.shape[p] != A.shape[q]:
        raise TensorTypeError(
            f"dimension mismatch in contraction: {A.shape[p]} vs {A.shape[q]}"
        )
    diag = np.diagonal(A.data, axis1=p, axis2=q)  # diagonal axis goes last
    return ArrayTensor(A.ring, A.ring.sum(diag, axis=-1).copy())


def permute(A: ArrayTensor, perm: Sequence[int]) -> ArrayTensor:
    perm = tuple(perm)
    if sorted(perm) != list(range(A.data.ndim)):
        raise TensorTypeError(f"invalid permutation {perm} for {A.data.ndim} slots")
    return ArrayTensor(A.ring, np.ascontiguousarray(np.transpose(A.data, perm)))


def identity(dim: int, ring: ScalarRing = REAL) -> ArrayTensor:
    if not ring.has_zero:
        raise TensorTypeError(f"ring {ring.name} has no zero; no identity tensor")
    data = np.full((dim, dim), ring.zero, dtype=ring.dtype)
    np.fill_diagonal(data, ring.one)
    return ArrayTensor(ring, data)


def trivial(ring: ScalarRing = REAL) -> ArrayTensor:
    return ArrayTensor(ring, np.array(ring.one, dtype=ring.dtype))


def _check_labeling(labeling: Sequence[Sequence[Hashable]]) -> list[dict]:
    index = []
    for k, labels in enumerate(labeling):
        pos = {lab: i for i, lab in enumerate(labels)}
        if len(pos) != len(labels):
            raise TensorTypeError(f"labeling of slot {k} is not a bijection")
        index.append(pos)
    return index


def skeleton_project(
    entries: Mapping[tuple, object],
    labeling: Sequence[Sequence[Hashable]],
    ring: ScalarRing = REAL,
) -> ArrayTensor:
    """Turn a finite-set array (label tuple -> value) into a skeletal one.

    ``labeling[k]`` lists the elements of slot ``k``'s set; element number
    ``i`` becomes index ``i``.
    """
    index = _check_labeling(labeling)
    shape = tuple(len(lab) for lab in labeling)
    if len(entries) != prod(shape):
        raise TensorTypeError("entries do not cover the labeled configurations")
    data = np.empty(shape, dtype=ring.dtype)
    for key, value in entries.items():
        if len(key) != len(shape):
            raise TensorTypeError(f"configuration {key!r} has wrong arity")
        try:
            pos = tuple(index[k][lab] for k, lab in enumerate(key))
        except KeyError as exc:
            raise TensorTypeError(f"unknown label {exc.args[0]!r}") from None
        data[pos] = value
    return ArrayTensor(ring, data)


def skeleton_embed(
    A: ArrayTensor, labeling: Sequence[Sequence[Hashable]]
) -> dict[tuple, object]:
    """Inverse of :func:`skeleton_project`."""
    _check_labeling(labeling)
    if tuple(len(lab) for lab in labeling) != A.shape:
        raise TensorTypeError("labeling sizes do not match the array shape")
    return {
        tuple(labeling[k][i] for k, i in enumerate(pos)): A.data[pos].item()
        for pos in np.ndindex(*A.shape)
    }


class ArrayType(TensorType):
    """Array tensors over ``ring``; 0-data are bond dimensions."""

    has_dual = False

    def __init__(self, ring: ScalarRing = REAL):
        self.ring = ring
        self.name = f"array/{ring.name}"
        self.exact = ring.exact

    @property
    def unit(self):
        return 1

    def product(self, a, b):
        return a * b

    def tensor(self, A, B):
        return kron(A, B)

    def permute(self, A, perm):
        return permute(A, perm)

    def contract(self, A):
        n = A.data.ndim
        if n < 2:
            raise TensorTypeError("contraction needs two slots")
        return einsum_pair(A, (n - 2, n - 1))

    def merge(self, A, i):
        s = A.shape
        return ArrayTensor(A.ring, A.data.reshape(s[:i] + (s[i] * s[i + 1],) + s[i + 2 :]))

    def split(self, A, i, a, b):
        s = A.shape
        if s[i] != a * b:
            raise TensorTypeError(f"cannot split dimension {s[i]} into {a}x{b}")
        return ArrayTensor(A.ring, A.data.reshape(s[:i] + (a, b) + s[i + 1 :]))

    def identity(self, a):
        return identity(a, self.ring)

    def trivial(self):
        return trivial(self.ring)

    def deviation(self, A, B):
        if A.shape != B.shape:
            return float("inf")
        return deviation(A.data, B.data)

    def random_zero(self, rng, budget=4):
        if rng.random() < 0.1:
            return 0
        return int(rng.integers(1, budget + 1))

    def random_tensor(self, slots, rng):
        shape = tuple(slots)
        return ArrayTensor(self.ring, self.ring.sample(rng, shape))

    def cost(self, slots):
        return float(prod(slots))

    def zero_from_literal(self, lit):
        if not isinstance(lit, int) or isinstance(lit, bool) or lit < 0:
            raise TensorTypeError(f"array 0-data must be a non-negative int, got {lit!r}")
        return lit

    def zero_to_literal(self, a):
        return int(a)

    def tensor_from_literal(self, slots, data):
        return ArrayTensor.from_flat(self.ring, slots, decode_entries(self.ring, data))

    def tensor_to_literal(self, A):
        return encode_entries(A.ring, A.entries)


def decode_entries(ring: ScalarRing, data) -> np.ndarray:
    if not isinstance(data, list):
        raise TensorTypeError("array payload must be a flat list")
    if ring.name == "c64":
        vals = []
        for x in data:
            if isinstance(x, list):
                if len(x) != 2:
                    raise TensorTypeError("complex entries are [re, im] pairs")
                vals.append(complex(x[0], x[1]))
            else:
                vals.append(complex(x))
        return np.array(vals, dtype=np.complex128)
    if any(isinstance(x, list) for x in data):
        raise TensorTypeError("array payload must be a flat list")
    return ring.coerce(np.array(data))


def encode_entries(ring: ScalarRing, entries: np.ndarray) -> list:
    if ring.name == "c64":
        return [[float(z.real), float(z.imag)] for z in entries]
    if ring.name == "bool":
        return [int(x) for x in entries]
    if ring.name.startswith("zmod:"):
        return [int(x) for x in entries]
    return [float(x) for x in entries]


def array_type(ring_name: str = "f64") -> ArrayType:
    return ArrayType(ring_from_name(ring_name))
