"""Pairing tensors: perfect matchings on dots, with a real prefactor.

Each slot carries a number of dots. Dots are indexed globally per tensor in
slot order, so a tensor on slots ``(2, 3)`` owns dots ``0, 1`` (first slot)
and ``2, 3, 4`` (second slot). Matchings are stored as sorted tuples of sorted
pairs; structural equality is therefore exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from .core import TensorType, TensorTypeError
from .scalars import deviation


def _canonical(pairs: Iterable[Sequence[int]]) -> tuple:
    return tuple(sorted(tuple(sorted((int(i), int(j)))) for i, j in pairs))


@dataclass(frozen=True)
class PairingTensor:
    slots: tuple
    pairs: tuple
    prefactor: float = 1.0

    def __post_init__(self):
        slots = tuple(int(d) for d in self.slots)
        if any(d < 0 for d in slots):
            raise TensorTypeError(f"negative dot count in {slots}")
        object.__setattr__(self, "slots", slots)
        pairs = _canonical(self.pairs)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "prefactor", float(self.prefactor))
        n = sum(slots)
        seen = [k for p in pairs for k in p]
        if sorted(seen) != list(range(n)):
            raise TensorTypeError(
                f"pairs {list(pairs)} are not a perfect matching of {n} dots"
            )

    @property
    def dots(self) -> int:
        return sum(self.slots)

    def partner(self) -> dict:
        out = {}
        for i, j in self.pairs:
            out[i] = j
            out[j] = i
        return out


def p_count(dots: int) -> int:
    """Number of perfect matchings of ``dots`` points."""
    if dots < 0:
        raise ValueError("dot count must be non-negative")
    if dots % 2:
        return 0
    n = dots // 2
    return factorial(2 * n) // (factorial(n) * 2**n)


def p_tensor_product(A: PairingTensor, B: PairingTensor) -> PairingTensor:
    off = A.dots
    pairs = list(A.pairs) + [(i + off, j + off) for i, j in B.pairs]
    return PairingTensor(A.slots + B.slots, pairs, A.prefactor * B.prefactor)


def p_identity(dots: int) -> PairingTensor:
    return PairingTensor((dots, dots), [(i, i + dots) for i in range(dots)], 1.0)


def p_trivial() -> PairingTensor:
    return PairingTensor((), (), 1.0)


def p_permute(A: PairingTensor, perm: Sequence[int]) -> PairingTensor:
    perm = tuple(perm)
    if sorted(perm) != list(range(len(A.slots))):
        raise TensorTypeError(f"invalid permutation {perm}")
    starts = np.concatenate([[0], np.cumsum(A.slots)]).astype(int)
    new_index = {}
    pos = 0
    for src in perm:
        for k in range(A.slots[src]):
            new_index[starts[src] + k] = pos
            pos += 1
    pairs = [(new_index[i], new_index[j]) for i, j in A.pairs]
    return PairingTensor([A.slots[p] for p in perm], pairs, A.prefactor)


def p_contract(A: PairingTensor, pair: tuple[int, int]) -> PairingTensor:
    """Glue the dots of slot ``pair[0]`` to those of ``pair[1]`` positionally.

    Paths through the glued dots are concatenated; every closed loop is
    dropped and doubles the prefactor.
    """
    x, y = pair
    if x == y or not (0 <= x < len(A.slots) and 0 <= y < len(A.slots)):
        raise TensorTypeError(f"invalid contraction pair {pair}")
    if A.slots[x] != A.slots[y]:
        raise TensorTypeError(
            f"dot-count mismatch in contraction: {A.slots[x]} vs {A.slots[y]}"
        )
    starts = np.concatenate([[0], np.cumsum(A.slots)]).astype(int)
    xs = range(starts[x], starts[x] + A.slots[x])
    ys = range(starts[y], starts[y] + A.slots[y])
    glue = {}
    for i, j in zip(xs, ys):
        glue[i] = j
        glue[j] = i
    partner = A.partner()

    kept = [k for k in range(len(A.slots)) if k not in (x, y)]
    renumber = {}
    pos = 0
    for s in kept:
        for d in range(starts[s], starts[s] + A.slots[s]):
            renumber[d] = pos
            pos += 1

    visited = set()
    pairs = []
    for start in renumber:
        if start in visited:
            continue
        visited.add(start)
        cur = partner[start]
        while cur in glue:
            visited.add(cur)
            nxt = glue[cur]
            visited.add(nxt)
            cur = partner[nxt]
        visited.add(cur)
        pairs.append((renumber[start], renumber[cur]))

    loops = 0
    for d in glue:
        if d in visited:
            continue
        loops += 1
        cur = d
        while cur not in visited:
            visited.add(cur)
            mate = partner[cur]
            visited.add(mate)
            cur = glue[mate]
    return PairingTensor([A.slots[k] for k in kept], pairs, A.prefactor * 2.0**loops)


def random_matching(dots: int, rng: np.random.Generator) -> list:
    if dots % 2:
        raise TensorTypeError(f"odd number of dots ({dots}) admits no pairing")
    order = rng.permutation(dots)
    return [(int(order[2 * k]), int(order[2 * k + 1])) for k in range(dots // 2)]


class PairingType(TensorType):
    """Prefactor pairing tensors; 0-data are dot counts."""

    name = "pairing"
    has_dual = False
    exact = True

    @property
    def unit(self):
        return 0

    def product(self, a, b):
        return a + b

    def tensor(self, A, B):
        return p_tensor_product(A, B)

    def permute(self, A, perm):
        return p_permute(A, perm)

    def contract(self, A):
        n = len(A.slots)
        if n < 2:
            raise TensorTypeError("contraction needs two slots")
        return p_contract(A, (n - 2, n - 1))

    def merge(self, A, i):
        slots = A.slots[:i] + (A.slots[i] + A.slots[i + 1],) + A.slots[i + 2 :]
        return PairingTensor(slots, A.pairs, A.prefactor)

    def split(self, A, i, a, b):
        if A.slots[i] != a + b:
            raise TensorTypeError(f"cannot split {A.slots[i]} dots into {a}+{b}")
        return PairingTensor(A.slots[:i] + (a, b) + A.slots[i + 1 :], A.pairs, A.prefactor)

    def identity(self, a):
        return p_identity(a)

    def trivial(self):
        return p_trivial()

    def deviation(self, A, B):
        if A.slots != B.slots or A.pairs != B.pairs:
            return float("inf")
        return deviation(A.prefactor, B.prefactor)

    def random_zero(self, rng, budget=4):
        # even counts keep every sampled slot list pairable
        return 2 * int(rng.integers(0, budget // 2 + 1))

    def random_tensor(self, slots, rng):
        slots = tuple(slots)
        # small integer prefactors keep every product exact
        return PairingTensor(slots, random_matching(sum(slots), rng), float(rng.integers(1, 4)))

    def cost(self, slots):
        return float(sum(slots))

    def zero_from_literal(self, lit):
        if not isinstance(lit, int) or isinstance(lit, bool) or lit < 0:
            raise TensorTypeError(f"pairing 0-data must be a non-negative int, got {lit!r}")
        return lit

    def zero_to_literal(self, a):
        return int(a)

    def tensor_from_literal(self, slots, data):
        if not isinstance(data, dict) or "pairs" not in data:
            raise TensorTypeError('pairing payload must be {"pairs": [...], "prefactor": x}')
        pairs = data["pairs"]
        if not all(isinstance(p, list) and len(p) == 2 for p in pairs):
            raise TensorTypeError("pairs must be [i, j] lists")
        return PairingTensor(slots, pairs, float(data.get("prefactor", 1.0)))

    def tensor_to_literal(self, A):
        return {"pairs": [list(p) for p in A.pairs], "prefactor": A.prefactor}
