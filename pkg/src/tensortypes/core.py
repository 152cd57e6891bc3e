"""The tensor-type contract and a randomized harness for its 2-axioms.

A tensor type works on skeletal 1-data: every payload knows the ordered list
of its slot 0-data. Reassociation is therefore implicit (all shipped types are
strictly associative) and the only structural 2-functions that move data are

* ``permute`` -- the commutor, for an arbitrary slot permutation,
* ``merge``/``split`` -- blocking two adjacent slots into one and back,
* ``merge_dual`` -- blocking ``(b*, c*)`` into ``(b (x) c)*`` (the product
  dual-automorphor),
* ``contract`` -- the contraction of the last two slots, where the second
  slot carries the dual of the first.

Axiom checks sample random payloads and compare the two sides of each
2-axiom with :meth:`TensorType.deviation`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .scalars import DEFAULT_TOL


class TensorTypeError(ValueError):
    """Payload/0-data mismatch inside a tensor type."""


class TensorType:
    """Base class for concrete tensor types.

    Subclasses implement the 0-data algebra and the 2-functions; the helpers
    defined here (``contract_pair``, ``swap``...) are derived from them.
    """

    name = "abstract"
    symmetric_contraction = True
    symmetric_identity = True
    strict_associativity = True
    has_dual = False
    has_identity = True
    exact = False

    # -- 0-data ------------------------------------------------------------
    @property
    def unit(self):
        raise NotImplementedError

    def product(self, a, b):
        raise NotImplementedError

    def dual(self, a):
        return a

    def zero_eq(self, a, b) -> bool:
        return a == b

    # -- 1-data ------------------------------------------------------------
    def slots(self, A) -> tuple:
        return A.slots

    def tensor(self, A, B):
        raise NotImplementedError

    def permute(self, A, perm: Sequence[int]):
        """Reorder slots so that output slot ``k`` is input slot ``perm[k]``."""
        raise NotImplementedError

    def contract(self, A):
        """Contract the last two slots (the last one is the dual)."""
        raise NotImplementedError

    def merge(self, A, i: int):
        raise NotImplementedError

    def split(self, A, i: int, a, b):
        raise NotImplementedError

    def merge_dual(self, A, i: int):
        """Block slots ``(b*, c*)`` at ``i, i+1`` into one ``(b (x) c)*`` slot."""
        return self.merge(A, i)

    def involutor(self, A, i: int):
        """The dual involutor on slot ``i``; trivial unless overridden."""
        return A

    def identity(self, a):
        """Identity tensor on slots ``(a*, a)``."""
        raise NotImplementedError

    def trivial(self):
        raise NotImplementedError

    def deviation(self, A, B) -> float:
        raise NotImplementedError

    # -- sampling and cost ------------------------------------------------
    def random_zero(self, rng: np.random.Generator, budget: int = 4):
        raise NotImplementedError

    def random_tensor(self, slots: Sequence, rng: np.random.Generator):
        raise NotImplementedError

    def cost(self, slots: Sequence) -> float:
        return float(len(slots))

    # -- literals (network file format) -------------------------------------
    def zero_from_literal(self, lit):
        raise NotImplementedError

    def zero_to_literal(self, a):
        raise NotImplementedError

    def tensor_from_literal(self, slots: Sequence, data):
        raise NotImplementedError

    def tensor_to_literal(self, A):
        raise NotImplementedError

    # -- derived helpers -----------------------------------------------------
    def swap(self, A, i: int):
        """Commutor exchanging slots ``i`` and ``i+1``."""
        n = len(self.slots(A))
        perm = list(range(n))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        return self.permute(A, perm)

    def contract_pair(self, A, i: int, j: int):
        """Move slots ``i`` then ``j`` to the end and contract them."""
        n = len(self.slots(A))
        rest = [k for k in range(n) if k not in (i, j)]
        perm = rest + [i, j]
        if perm != list(range(n)):
            A = self.permute(A, perm)
        return self.contract(A)

    def close(self, A, B, tol: float = DEFAULT_TOL) -> bool:
        dev = self.deviation(A, B)
        return dev == 0.0 if self.exact else dev <= tol

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


# -- axiom harness ------------------------------------------------------------


@dataclass
class AxiomFailure:
    case: int
    sizes: tuple
    deviation: float


@dataclass
class AxiomReport:
    axiom: str
    cases: int = 0
    failures: list = field(default_factory=list)
    note: Optional[str] = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def __str__(self) -> str:
        status = "pass" if self.passed else f"FAIL ({len(self.failures)} cases)"
        extra = f" [{self.note}]" if self.note else ""
        return f"{self.axiom}: {status} over {self.cases} cases{extra}"


def _case_rng(seed: int, case: int) -> np.random.Generator:
    return np.random.default_rng([seed, case])


def _run(name, T, cases, seed, tol, body) -> AxiomReport:
    report = AxiomReport(name)
    for case in range(cases):
        rng = _case_rng(seed, case)
        try:
            sizes, dev = body(rng)
        except (TensorTypeError, ArithmeticError, NotImplementedError):
            # a 2-function the axiom needs is unavailable or ill-defined here
            sizes, dev = (), float("inf")
        report.cases += 1
        ok = dev == 0.0 if T.exact else dev <= tol
        if not ok:
            report.failures.append(AxiomFailure(case, tuple(sizes), dev))
    return report


def _zeros(T, rng, k, budget):
    return [T.random_zero(rng, budget) for _ in range(k)]


def check_commutor_involutive(T: TensorType, cases=200, seed=0, tol=DEFAULT_TOL, budget=4):
    """sigma0 sigma0 = id on two slots and sigma sigma = id with an auxiliary slot."""

    def body(rng):
        a, b, c = _zeros(T, rng, 3, budget)
        A = T.random_tensor([a, b], rng)
        d0 = T.deviation(T.swap(T.swap(A, 0), 0), A)
        B = T.random_tensor([a, b, c], rng)
        d1 = T.deviation(T.swap(T.swap(B, 1), 1), B)
        return (a, b, c), max(d0, d1)

    return _run("commutor_involutive", T, cases, seed, tol, body)


def check_hexagon(T: TensorType, cases=200, seed=0, tol=DEFAULT_TOL, budget=4):
    """Moving one slot past a blocked pair equals moving it past each factor."""

    def body(rng):
        x, a, b, c = _zeros(T, rng, 4, budget)
        A = T.random_tensor([x, a, b, c], rng)
        blocked = T.merge(A, 2)
        lhs = T.split(T.swap(blocked, 1), 1, b, c)
        rhs = T.swap(T.swap(A, 1), 2)
        return (x, a, b, c), T.deviation(lhs, rhs)

    return _run("hexagon", T, cases, seed, tol, body)


def check_block_compatibility(T: TensorType, cases=200, seed=0, tol=DEFAULT_TOL, budget=4):
    """Two successive contractions equal one contraction of the blocked pair."""

    def body(rng):
        a, b, c = _zeros(T, rng, 3, budget)
        bd, cd = T.dual(b), T.dual(c)
        A = T.random_tensor([a, b, bd, c, cd], rng)
        iterated = T.contract(T.contract(A))
        # (a, b, b*, c, c*) -> (a, b, c, b*, c*) -> (a, b(x)c, (b(x)c)*)
        B = T.permute(A, [0, 1, 3, 2, 4])
        B = T.merge_dual(T.merge(B, 1), 2)
        blocked = T.contract(B)
        return (a, b, c), T.deviation(iterated, blocked)

    return _run("block_compatibility", T, cases, seed, tol, body)


def check_contractions_commute(T: TensorType, cases=200, seed=0, tol=DEFAULT_TOL, budget=4):
    """Two disjoint contractions performed in either order agree."""

    def body(rng):
        a, b, c = _zeros(T, rng, 3, budget)
        A = T.random_tensor([a, b, T.dual(b), c, T.dual(c)], rng)
        first = T.contract(T.contract(A))
        second = T.contract(T.contract(T.permute(A, [0, 3, 4, 1, 2])))
        return (a, b, c), T.deviation(first, second)

    return _run("contractions_commute", T, cases, seed, tol, body)


def check_contraction_tensorproduct(
    T: TensorType, cases=200, seed=0, tol=DEFAULT_TOL, budget=4
):
    """[A] (x) B equals contracting A (x) B after moving B's slot forward."""

    def body(rng):
        a, b, d = _zeros(T, rng, 3, budget)
        A = T.random_tensor([a, b, T.dual(b)], rng)
        B = T.random_tensor([d], rng)
        lhs = T.tensor(T.contract(A), B)
        rhs = T.contract(T.permute(T.tensor(A, B), [0, 3, 1, 2]))
        return (a, b, d), T.deviation(lhs, rhs)

    return _run("contraction_tensorproduct", T, cases, seed, tol, body)


def check_identity_axiom(T: TensorType, cases=200, seed=0, tol=DEFAULT_TOL, budget=4):
    """Contracting with an identity tensor changes nothing.

    Both bond directions are checked. For types without a symmetric identity,
    gluing two identities through a reversed bond must give the dual
    involutor applied to the identity.
    """

    def body(rng):
        a, b = _zeros(T, rng, 2, budget)
        bd = T.dual(b)
        # A's slot b -> identity's dual slot; the identity's open slot replaces it
        A = T.random_tensor([a, b], rng)
        out = T.contract_pair(T.tensor(A, T.identity(b)), 1, 2)
        d0 = T.deviation(out, A)
        # identity's b slot -> A's dual slot
        B = T.random_tensor([a, bd], rng)
        out = T.contract_pair(T.tensor(T.identity(b), B), 1, 3)
        d1 = T.deviation(T.permute(out, [1, 0]), B)
        dev = max(d0, d1)
        if not T.symmetric_identity:
            I = T.identity(b)
            reversed_ = T.contract_pair(T.tensor(I, I), 2, 1)  # b* slot first
            dev = max(dev, T.deviation(reversed_, T.involutor(I, 1)))
        return (a, b), dev

    return _run("identity", T, cases, seed, tol, body)


def symmetric_contraction_deviation(T: TensorType, A) -> float:
    """Deviation between contracting ``(b, b*)`` and the swapped ``(b*, b)``."""
    return T.deviation(T.contract(A), T.contract(T.swap(A, len(T.slots(A)) - 2)))


def check_symmetric_contraction(
    T: TensorType, cases=200, seed=0, tol=DEFAULT_TOL, budget=4
) -> AxiomReport:
    """Contraction is invariant under swapping the contracted pair.

    For asymmetric types the swapped contraction must instead equal the
    contraction after the dual involutor, and some sampled case (or the
    type's own ``asymmetry_witness``) must show that the involutor matters.
    """
    if T.symmetric_contraction:

        def body(rng):
            a, b = _zeros(T, rng, 2, budget)
            A = T.random_tensor([a, b, T.dual(b)], rng)
            return (a, b), symmetric_contraction_deviation(T, A)

        return _run("symmetric_contraction", T, cases, seed, tol, body)

    found = []

    def body(rng):
        a, b = _zeros(T, rng, 2, budget)
        A = T.random_tensor([a, b, T.dual(b)], rng)
        if not found and symmetric_contraction_deviation(T, A) > tol:
            found.append(A)
        swapped = T.contract(T.swap(A, 1))
        return (a, b), T.deviation(swapped, T.contract(T.involutor(A, 1)))

    report = _run("symmetric_contraction", T, cases, seed, tol, body)
    witness = getattr(T, "asymmetry_witness", None)
    if witness is not None and symmetric_contraction_deviation(T, witness()) > tol:
        found.append(witness())
    if found:
        report.note = "asymmetric: witness found"
    else:
        report.failures.append(AxiomFailure(-1, (), 0.0))
        report.note = "asymmetric type but no witness found"
    return report


AXIOM_CHECKS = {
    "commutor_involutive": check_commutor_involutive,
    "hexagon": check_hexagon,
    "block_compatibility": check_block_compatibility,
    "contractions_commute": check_contractions_commute,
    "contraction_tensorproduct": check_contraction_tensorproduct,
    "identity": check_identity_axiom,
    "symmetric_contraction": check_symmetric_contraction,
}


def run_axiom_suite(
    T: TensorType, cases: int = 200, seed: int = 0, tol: float = DEFAULT_TOL, budget: int = 4
) -> list[AxiomReport]:
    """Run every check applicable to ``T``; one report per axiom."""
    reports = []
    for name, check in AXIOM_CHECKS.items():
        if name == "identity" and not T.has_identity:
            continue
        reports.append(check(T, cases=cases, seed=seed, tol=tol, budget=budget))
    return reports


def payload_sizes(T: TensorType, A) -> tuple[Any, ...]:
    return tuple(T.slots(A))
