"""Commutative semirings used as entry types of array and graded tensors.

A :class:`ScalarRing` bundles vectorised ``add``/``mul`` operations on numpy
arrays together with its units, a sampler and an approximate equality. All
rings are immutable and can be shared freely.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

DEFAULT_TOL = 1e-9


class RingError(ValueError):
    """Raised for invalid ring names, values or homomorphisms."""


def approx_eq(x, y, tol: float = DEFAULT_TOL) -> bool:
    """Relative comparison for ``|x| > 1``, absolute otherwise."""
    return deviation(x, y) <= tol


def deviation(x, y) -> float:
    """Largest entrywise deviation under the relative/absolute policy."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        return float("inf")
    if x.size == 0:
        return 0.0
    if x.dtype == bool or y.dtype == bool:
        return float(np.any(x != y))
    diff = np.abs(x.astype(complex) - y.astype(complex))
    scale = np.maximum(1.0, np.abs(x.astype(complex)))
    return float(np.max(diff / scale))


@dataclass(frozen=True)
class ScalarRing:
    """A commutative semiring acting elementwise on numpy arrays."""

    name: str
    dtype: Any
    add: Callable = field(repr=False, compare=False)
    mul: Callable = field(repr=False, compare=False)
    one: Any = field(compare=False)
    zero: Any = field(default=None, compare=False)
    neg: Optional[Callable] = field(default=None, repr=False, compare=False)
    exact: bool = field(default=False, compare=False)
    sampler: Optional[Callable] = field(default=None, repr=False, compare=False)
    validator: Optional[Callable] = field(default=None, repr=False, compare=False)

    @property
    def has_zero(self) -> bool:
        return self.zero is not None

    @property
    def has_negation(self) -> bool:
        return self.neg is not None

    def coerce(self, values) -> np.ndarray:
        """Convert raw values into a ring-valued array, validating them."""
        arr = np.asarray(values)
        if self.dtype == np.int64 and arr.dtype.kind == "f":
            if not np.all(arr == np.round(arr)):
                raise RingError(f"non-integer value for ring {self.name}")
        if self.dtype == np.bool_ and arr.dtype != bool:
            if not np.all((arr == 0) | (arr == 1)):
                raise RingError("boolean entries must be 0 or 1")
        if self.dtype != np.complex128 and np.iscomplexobj(arr):
            raise RingError(f"complex value for ring {self.name}")
        arr = arr.astype(self.dtype)
        if self.validator is not None:
            arr = self.validator(arr)
        return arr

    def sample(self, rng: np.random.Generator, size=()) -> np.ndarray:
        if self.sampler is None:
            raise RingError(f"ring {self.name} has no sampler")
        return self.coerce(self.sampler(rng, size))

    def sum(self, values: np.ndarray, axis: int = 0) -> np.ndarray:
        """Fold ``add`` along an axis in ascending index order."""
        values = np.moveaxis(np.asarray(values), axis, 0)
        if values.shape[0] == 0:
            if not self.has_zero:
                raise RingError(f"empty sum in ring {self.name} without zero")
            return np.full(values.shape[1:], self.zero, dtype=self.dtype)
        acc = values[0]
        for j in range(1, values.shape[0]):
            acc = self.add(acc, values[j])
        return acc

    def eq(self, x, y, tol: float = DEFAULT_TOL) -> bool:
        if self.exact:
            return bool(np.array_equal(np.asarray(x), np.asarray(y)))
        return approx_eq(x, y, tol)

    def __str__(self) -> str:
        return self.name


def _check_nonneg(arr: np.ndarray) -> np.ndarray:
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise RingError("negative value in nonneg ring")
    return arr


def _real_sampler(rng, size):
    return rng.normal(size=size)


def _complex_sampler(rng, size):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


REAL = ScalarRing(
    "f64", np.float64, np.add, np.multiply, 1.0, 0.0, np.negative,
    sampler=_real_sampler,
)
COMPLEX = ScalarRing(
    "c64", np.complex128, np.add, np.multiply, 1.0 + 0j, 0j, np.negative,
    sampler=_complex_sampler,
)
BOOLEAN = ScalarRing(
    "bool", np.bool_, np.logical_or, np.logical_and, True, False,
    exact=True, sampler=lambda rng, size: rng.integers(0, 2, size=size),
)
NONNEG = ScalarRing(
    "nonneg", np.float64, np.add, np.multiply, 1.0, 0.0,
    sampler=lambda rng, size: rng.exponential(size=size),
    validator=_check_nonneg,
)


def int_mod(n: int) -> ScalarRing:
    """Residues modulo ``n`` (stored as int64 in ``0..n-1``)."""
    if n < 1:
        raise RingError("modulus must be positive")
    return ScalarRing(
        f"zmod:{n}",
        np.int64,
        lambda x, y: np.mod(np.add(x, y), n),
        lambda x, y: np.mod(np.multiply(x, y), n),
        1 % n,
        0,
        lambda x: np.mod(np.negative(x), n),
        exact=True,
        sampler=lambda rng, size: rng.integers(0, n, size=size),
        validator=lambda arr: np.mod(arr, n),
    )


def ring_from_name(name: str) -> ScalarRing:
    """Look up a ring by its network-file name."""
    fixed = {r.name: r for r in (REAL, COMPLEX, BOOLEAN, NONNEG)}
    if name in fixed:
        return fixed[name]
    m = re.fullmatch(r"zmod:(\d+)", name)
    if m:
        return int_mod(int(m.group(1)))
    raise RingError(f"unknown ring {name!r}")


# -- homomorphisms ----------------------------------------------------------


@dataclass(frozen=True)
class RingHom:
    name: str
    source: Optional[ScalarRing]
    target: ScalarRing
    fn: Callable = field(repr=False, compare=False)

    def __call__(self, x):
        return self.target.coerce(self.fn(np.asarray(x)))


def ring_hom(name: str) -> RingHom:
    """Named homomorphism between shipped rings.

    ``source`` is ``None`` for ``mod-<n>-reduce``, whose domain is the
    plain integers.
    """
    if name == "complex-conjugate":
        return RingHom(name, COMPLEX, COMPLEX, np.conj)
    if name == "embed-real-in-complex":
        return RingHom(name, REAL, COMPLEX, lambda x: x.astype(np.complex128))
    if name == "embed-nonneg-in-real":
        return RingHom(name, NONNEG, REAL, lambda x: x.astype(np.float64))
    m = re.fullmatch(r"mod-(\d+)-reduce", name)
    if m:
        n = int(m.group(1))
        return RingHom(name, None, int_mod(n), lambda x: np.mod(x.astype(np.int64), n))
    raise RingError(f"unknown homomorphism {name!r}")


def ring_hom_apply(name: str, x):
    out = ring_hom(name)(x)
    return out.item() if out.ndim == 0 else out


# -- axiom suite ------------------------------------------------------------


@dataclass
class RingAxiomResult:
    axiom: str
    passed: bool
    counterexample: Optional[tuple] = None


def _values(ring: ScalarRing, sample_count: int, seed: int) -> np.ndarray:
    if ring.name == "bool":
        return np.array([False, True])
    if ring.name.startswith("zmod:"):
        n = int(ring.name.split(":")[1])
        return np.arange(n, dtype=np.int64)
    return ring.sample(np.random.default_rng(seed), (sample_count,))


def ring_axiom_suite(
    ring: ScalarRing, sample_count: int = 100, seed: int = 0, tol: float = 1e-12
) -> list[RingAxiomResult]:
    """Check the commutative-semiring laws on sampled values.

    Finite rings are checked exhaustively over all pairs/triples; continuous
    rings on ``sample_count`` random triples.
    """
    if sample_count <= 0:
        raise RingError("sample_count must be positive")
    vals = _values(ring, sample_count, seed)
    if len(vals) ** 3 <= 4096:
        triples = list(itertools.product(vals, repeat=3))
    else:
        rng = np.random.default_rng(seed + 1)
        idx = rng.integers(0, len(vals), size=(sample_count, 3))
        triples = [tuple(vals[i] for i in row) for row in idx]

    add, mul = ring.add, ring.mul
    laws: dict[str, Callable] = {
        "add_associative": lambda x, y, z: (add(add(x, y), z), add(x, add(y, z))),
        "add_commutative": lambda x, y, z: (add(x, y), add(y, x)),
        "mul_associative": lambda x, y, z: (mul(mul(x, y), z), mul(x, mul(y, z))),
        "mul_commutative": lambda x, y, z: (mul(x, y), mul(y, x)),
        "mul_unit": lambda x, y, z: (mul(x, ring.one), x),
        "distributive": lambda x, y, z: (mul(x, add(y, z)), add(mul(x, y), mul(x, z))),
    }
    if ring.has_zero:
        laws["add_unit"] = lambda x, y, z: (add(x, ring.zero), x)
        laws["mul_zero"] = lambda x, y, z: (mul(x, ring.zero), ring.zero)
    if ring.has_negation:
        laws["additive_inverse"] = lambda x, y, z: (add(x, ring.neg(x)), ring.zero)

    results = []
    for name, law in laws.items():
        witness = None
        for t in triples:
            lhs, rhs = law(*t)
            if not ring.eq(lhs, rhs, tol):
                witness = tuple(np.asarray(v).item() for v in t)
                break
        results.append(RingAxiomResult(name, witness is None, witness))
    return results
