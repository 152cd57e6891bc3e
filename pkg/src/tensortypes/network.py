"""Tensor networks: data model, validation, contraction plans and evaluation.

A network lists *atoms* (copies of named tensors), *bonds* between receptors
``(atom, slot)``, the ordered *open* receptors and two kinds of extra
identity tensors:

* free bonds: identities with both slots open. Free bond ``k`` behaves like
  an extra atom with index ``len(atoms) + k`` on slots ``(a*, a)``; ``open``
  refers to its slots through that index.
* loops: identities glued to themselves. Loop ``k`` gets the index
  ``len(atoms) + len(free_bonds) + k``; its bond runs from slot 1 to slot 0.

A bond ``(p, q)`` runs from an output receptor ``p`` to an input receptor
``q``; ``q`` carries the dual of ``p``'s 0-data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .array import ArrayType
from .core import TensorType, TensorTypeError
from .graded import GradedType
from .pairing import PairingType
from .scalars import DEFAULT_TOL, RingError, ring_from_name
from .schur import SchurRectType, SchurSquareType

Receptor = tuple


class NetworkParseError(ValueError):
    """The network file is not well-formed."""


class NetworkValidationError(ValueError):
    """The network does not satisfy its structural invariants."""


class EvaluationError(RuntimeError):
    """A 2-function failed while evaluating a network."""


@dataclass
class Network:
    tensors: dict
    atoms: list
    bonds: list
    open: list
    free_bonds: list = field(default_factory=list)
    loops: list = field(default_factory=list)

    def __post_init__(self):
        self.atoms = list(self.atoms)
        self.bonds = [(tuple(p), tuple(q)) for p, q in self.bonds]
        self.open = [tuple(r) for r in self.open]
        self.free_bonds = list(self.free_bonds)
        self.loops = list(self.loops)

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_virtual(self) -> int:
        return len(self.atoms) + len(self.free_bonds) + len(self.loops)

    def loop_index(self, k: int) -> int:
        return len(self.atoms) + len(self.free_bonds) + k

    def all_bonds(self) -> list:
        """Bonds including the self-bond of every loop."""
        return self.bonds + [((self.loop_index(k), 1), (self.loop_index(k), 0)) for k in range(len(self.loops))]


def atom_slots(net: Network, T: TensorType, atom: int) -> tuple:
    """0-data of every slot of a (possibly virtual) atom."""
    n = net.n_atoms
    if atom < n:
        return tuple(T.slots(net.tensors[net.atoms[atom]]))
    extra = net.free_bonds + net.loops
    a = extra[atom - n]
    return (T.dual(a), a)


# -- validation -------------------------------------------------------------------


def validate(net: Network, T: TensorType) -> None:
    """Raise :class:`NetworkValidationError` naming the first offending receptor."""
    for i, name in enumerate(net.atoms):
        if name not in net.tensors:
            raise NetworkValidationError(f"atom {i} refers to unknown tensor {name!r}")
    if (net.free_bonds or net.loops) and not T.has_identity:
        raise NetworkValidationError(f"type {T.name} has no identity: free bonds and loops not allowed")
    slots = [atom_slots(net, T, i) for i in range(net.n_virtual)]
    used: dict = {}

    def claim(r, where):
        if len(r) != 2 or not all(isinstance(x, (int, np.integer)) for x in r):
            raise NetworkValidationError(f"{where}: malformed receptor {list(r)}")
        a, s = r
        if not 0 <= a < net.n_virtual:
            raise NetworkValidationError(f"{where}: no atom {a}")
        if net.n_atoms + len(net.free_bonds) <= a and where.startswith("open"):
            raise NetworkValidationError(f"{where}: loop receptor ({a}, {s}) cannot be open")
        if not 0 <= s < len(slots[a]):
            raise NetworkValidationError(f"{where}: atom {a} has no slot {s}")
        if (a, s) in used:
            raise NetworkValidationError(
                f"{where}: receptor ({a}, {s}) already used by {used[(a, s)]}"
            )
        used[(a, s)] = where

    for k, (p, q) in enumerate(net.bonds):
        claim(p, f"bond {k}")
        claim(q, f"bond {k}")
        a, b = slots[p[0]][p[1]], slots[q[0]][q[1]]
        if T.has_dual:
            if getattr(a, "dual", False) and getattr(b, "dual", None) is False:
                raise NetworkValidationError(
                    f"bond {k}: direction violation, ({p[0]}, {p[1]}) is an input and "
                    f"({q[0]}, {q[1]}) an output"
                )
            if not T.zero_eq(b, T.dual(a)):
                both = getattr(a, "dual", None) is not None and a.dual == b.dual
                kind = "direction violation" if both else "0-data mismatch"
                raise NetworkValidationError(
                    f"bond {k}: {kind} between ({p[0]}, {p[1]}) {a!r} and ({q[0]}, {q[1]}) {b!r}"
                )
        elif not T.zero_eq(a, b):
            raise NetworkValidationError(
                f"bond {k}: 0-data mismatch between ({p[0]}, {p[1]}) {a!r} and ({q[0]}, {q[1]}) {b!r}"
            )
    for k, r in enumerate(net.open):
        claim(r, f"open {k}")
    for a in range(net.n_atoms + len(net.free_bonds)):
        for s in range(len(slots[a])):
            if (a, s) not in used:
                raise NetworkValidationError(f"dangling receptor ({a}, {s}): neither bonded nor open")


# -- plans ------------------------------------------------------------------------


@dataclass(frozen=True)
class EmitIdentity:
    target: int
    zero: Any


@dataclass(frozen=True)
class EmitTrivial:
    target: int


@dataclass(frozen=True)
class TensorProduct:
    left: int
    right: int


@dataclass(frozen=True)
class Permute:
    target: int
    perm: tuple


@dataclass(frozen=True)
class Contract:
    target: int
    bond: int


@dataclass
class EvaluationPlan:
    steps: list
    result: int

    def kinds(self) -> list:
        return [type(s).__name__ for s in self.steps]


def _bond_order(net, T, order, rng) -> list:
    bonds = net.all_bonds()
    idx = list(range(len(bonds)))
    if order in ("given", None, "greedy"):
        return idx
    if order == "random":
        rng = rng if rng is not None else np.random.default_rng(0)
        return [int(i) for i in rng.permutation(len(bonds))]
    if isinstance(order, (list, tuple)):
        if sorted(order) != idx:
            raise ValueError("bond order must be a permutation of all bonds")
        return list(order)
    raise ValueError(f"unknown order {order!r}")


def plan(net: Network, T: TensorType, order="greedy", rng: Optional[np.random.Generator] = None) -> EvaluationPlan:
    """Lower the network to a sequence of 2-functions.

    ``order`` is ``"given"`` (file order), ``"greedy"`` (bonds inside a component
    first, then the pair of components whose merge shrinks the type's cost
    estimate the most), ``"random"`` (shuffled with ``rng``) or an
    explicit permutation of bond indices (loop bonds come last).
    """
    bonds = net.all_bonds()
    steps: list = []
    # component id -> list of receptors in slot order; virtual atoms are emitted
    comps: dict = {}
    zero: dict = {}
    for a in range(net.n_virtual):
        if a >= net.n_atoms:
            extra = (net.free_bonds + net.loops)[a - net.n_atoms]
            steps.append(EmitIdentity(a, extra))
        sl = atom_slots(net, T, a)
        comps[a] = [(a, s) for s in range(len(sl))]
        for s, z in enumerate(sl):
            zero[(a, s)] = z
    owner = {r: c for c, rs in comps.items() for r in rs}

    def contract(k):
        p, q = bonds[k]
        cp, cq = owner[p], owner[q]
        if cp != cq:
            left, right = min(cp, cq), max(cp, cq)
            steps.append(TensorProduct(left, right))
            comps[left] = comps[left] + comps.pop(right)
            for r in comps[left]:
                owner[r] = left
            cp = left
        labels = comps[cp]
        i, j = labels.index(p), labels.index(q)
        rest = [x for x in range(len(labels)) if x not in (i, j)]
        perm = tuple(rest + [i, j])
        if perm != tuple(range(len(labels))):
            steps.append(Permute(cp, perm))
        steps.append(Contract(cp, k))
        comps[cp] = [labels[x] for x in rest]
        del owner[p], owner[q]

    if order == "greedy":
        pending = set(range(len(bonds)))
        while pending:
            # bonds inside a component only shrink it: take those first
            inner = [k for k in sorted(pending) if owner[bonds[k][0]] == owner[bonds[k][1]]]
            if inner:
                contract(inner[0])
                pending.discard(inner[0])
                continue
            shared: dict = {}
            for k in sorted(pending):
                p, q = bonds[k]
                pair = tuple(sorted((owner[p], owner[q])))
                shared.setdefault(pair, []).extend([p, q])
            best = None
            for (cp, cq), rs in shared.items():
                joined = comps[cp] + comps[cq]
                size_p = T.cost([zero[r] for r in comps[cp]])
                size_q = T.cost([zero[r] for r in comps[cq]])
                after = T.cost([zero[r] for r in joined if r not in rs])
                peak = T.cost([zero[r] for r in joined])
                key = (after - size_p - size_q, peak, cp, cq)
                if best is None or key < best:
                    best = key
            k = min(k for k in pending if {owner[bonds[k][0]], owner[bonds[k][1]]} == {best[2], best[3]})
            contract(k)
            pending.discard(k)
    else:
        for k in _bond_order(net, T, order, rng):
            contract(k)

    ids = sorted(comps)
    if not ids:
        steps.append(EmitTrivial(0))
        return EvaluationPlan(steps, 0)
    root = ids[0]
    for c in ids[1:]:
        steps.append(TensorProduct(root, c))
        comps[root] = comps[root] + comps.pop(c)
    labels = comps[root]
    if sorted(labels) != sorted(net.open):
        raise NetworkValidationError("open receptors do not match the remaining slots")
    perm = tuple(labels.index(r) for r in net.open)
    if perm != tuple(range(len(perm))):
        steps.append(Permute(root, perm))
    return EvaluationPlan(steps, root)


def evaluate(
    net: Network,
    T: TensorType,
    plan_: Optional[EvaluationPlan] = None,
    order="greedy",
    rng: Optional[np.random.Generator] = None,
):
    """Evaluate to a payload on the open slots, in ``open`` order."""
    if plan_ is None:
        plan_ = plan(net, T, order, rng)
    values = {a: net.tensors[name] for a, name in enumerate(net.atoms)}
    try:
        for step in plan_.steps:
            if isinstance(step, EmitIdentity):
                values[step.target] = T.identity(step.zero)
            elif isinstance(step, EmitTrivial):
                values[step.target] = T.trivial()
            elif isinstance(step, TensorProduct):
                values[step.left] = T.tensor(values[step.left], values.pop(step.right))
            elif isinstance(step, Permute):
                values[step.target] = T.permute(values[step.target], step.perm)
            elif isinstance(step, Contract):
                values[step.target] = T.contract(values[step.target])
    except (TensorTypeError, ArithmeticError, RingError) as exc:
        where = f"bond {step.bond}" if isinstance(step, Contract) else type(step).__name__
        raise EvaluationError(f"{where}: {exc}") from exc
    return values[plan_.result]


@dataclass
class OrderReport:
    trials: int
    max_deviation: float
    tol: float
    exact: bool

    @property
    def passed(self) -> bool:
        return self.max_deviation == 0.0 if self.exact else self.max_deviation <= self.tol


def evaluate_order_independent(
    net: Network, T: TensorType, trials: int = 5, seed: int = 0, tol: float = DEFAULT_TOL
) -> OrderReport:
    """Compare the given-order evaluation with ``trials`` random bond orders."""
    ref = evaluate(net, T, order="given")
    rng = np.random.default_rng(seed)
    dev = 0.0
    for _ in range(trials):
        dev = max(dev, T.deviation(evaluate(net, T, order="random", rng=rng), ref))
    return OrderReport(trials, dev, tol, T.exact)


# -- random networks --------------------------------------------------------------


def random_network(
    T: TensorType,
    rng: np.random.Generator,
    max_atoms: int = 5,
    max_bonds: int = 6,
    budget: int = 3,
    max_slots: int = 3,
    extras: bool = True,
) -> Network:
    """A random valid network over ``T`` with bounded size."""
    n_atoms = int(rng.integers(1, max_atoms + 1))
    n_bonds = int(rng.integers(0, max_bonds + 1))
    receptors = []  # (atom, slot) -> 0-data chosen so far
    atom_zero: list = [[] for _ in range(n_atoms)]
    bonds = []
    for _ in range(n_bonds):
        a, b = int(rng.integers(n_atoms)), int(rng.integers(n_atoms))
        if len(atom_zero[a]) >= max_slots or len(atom_zero[b]) >= max_slots + (a == b):
            continue
        if a == b and len(atom_zero[a]) + 2 > max_slots + 1:
            continue
        z = T.random_zero(rng, budget)
        sa = len(atom_zero[a])
        atom_zero[a].append(z)
        sb = len(atom_zero[b])
        atom_zero[b].append(T.dual(z))
        bonds.append(((a, sa), (b, sb)))
    for a in range(n_atoms):
        for _ in range(int(rng.integers(0, 2))):
            atom_zero[a].append(T.random_zero(rng, budget))
            receptors.append((a, len(atom_zero[a]) - 1))
    free_bonds, loops = [], []
    if extras and T.has_identity:
        if rng.random() < 0.3:
            free_bonds.append(T.random_zero(rng, budget))
        if rng.random() < 0.3 and getattr(T, "loops_evaluable", True):
            loops.append(T.random_zero(rng, budget))
    for k in range(len(free_bonds)):
        receptors += [(n_atoms + k, 0), (n_atoms + k, 1)]
    tensors = {}
    atoms = []
    for a in range(n_atoms):
        name = f"t{a}"
        tensors[name] = T.random_tensor(atom_zero[a], rng)
        atoms.append(name)
    order = rng.permutation(len(receptors))
    open_ = [receptors[i] for i in order]
    bond_order = rng.permutation(len(bonds))
    return Network(tensors, atoms, [bonds[i] for i in bond_order], open_, free_bonds, loops)


# -- file format ------------------------------------------------------------------


def _parse_u(u, square: bool):
    named = {
        "sx": [[0, 1], [1, 0]] if square else [1, 1],
        "isy": [[0, 1], [-1, 0]] if square else [-1, 1],
    }
    if isinstance(u, str):
        if u not in named:
            raise NetworkParseError(f"unknown u shorthand {u!r} (use 'sx' or 'isy')")
        return named[u]
    return u


def type_from_spec(kind: str, ring: str = "f64", params: Optional[dict] = None) -> TensorType:
    """Build a tensor type from the ``type``/``ring``/``params`` fields."""
    params = dict(params or {})
    try:
        R = ring_from_name(ring)
        if kind == "array":
            return ArrayType(R)
        if kind == "graded":
            grading = params.get("grading", "z2")
            if grading not in ("z2", "z"):
                raise NetworkParseError(f"unknown grading {grading!r}")
            return GradedType(R, zgraded=grading == "z")
        if kind == "pairing":
            return PairingType()
        if kind == "schur-rect":
            u = _parse_u(params.get("u", [1, 1]), square=False)
            return SchurRectType(tuple(u), R, params.get("prefactor_mode", "none"))
        if kind == "schur-square":
            u = _parse_u(params.get("u", [[0, 1], [1, 0]]), square=True)
            return SchurSquareType(u, params.get("symmetry", "none"), R, params.get("prefactor_mode", "none"))
    except (RingError, TensorTypeError, TypeError, ValueError) as exc:
        if isinstance(exc, NetworkParseError):
            raise
        raise NetworkParseError(f"bad type specification: {exc}") from None
    raise NetworkParseError(f"unknown tensor type {kind!r}")


def type_spec(T: TensorType) -> dict:
    """Inverse of :func:`type_from_spec`."""
    if isinstance(T, ArrayType):
        return {"type": "array", "ring": T.ring.name, "params": {}}
    if isinstance(T, GradedType):
        return {"type": "graded", "ring": T.ring.name, "params": {"grading": "z" if T.zgraded else "z2"}}
    if isinstance(T, PairingType):
        return {"type": "pairing", "ring": "f64", "params": {}}
    if isinstance(T, SchurRectType):
        u = [np.real_if_close(x).item() for x in T.u]
        return {"type": "schur-rect", "ring": T.ring.name, "params": {"u": u, "prefactor_mode": T.prefactor_mode}}
    if isinstance(T, SchurSquareType):
        return {
            "type": "schur-square",
            "ring": T.ring.name,
            "params": {
                "u": np.real_if_close(T.u).tolist(),
                "symmetry": T.symmetry,
                "prefactor_mode": T.prefactor_mode,
            },
        }
    raise TypeError(f"no file format for {T!r}")


def _receptor(x, where):
    if (
        not isinstance(x, list)
        or len(x) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in x)
    ):
        raise NetworkParseError(f"{where}: receptor must be [atom, slot], got {x!r}")
    return (x[0], x[1])


def network_from_dict(doc: dict) -> tuple[Network, TensorType]:
    """Parse a decoded JSON document. Payload errors count as validation errors."""
    if not isinstance(doc, dict):
        raise NetworkParseError("network file must contain a JSON object")
    for key in ("type", "tensors", "atoms"):
        if key not in doc:
            raise NetworkParseError(f"missing field {key!r}")
    T = type_from_spec(doc["type"], doc.get("ring", "f64"), doc.get("params"))
    if not isinstance(doc["tensors"], dict):
        raise NetworkParseError("'tensors' must be an object")
    tensors = {}
    for name, spec in doc["tensors"].items():
        if not isinstance(spec, dict) or "slots" not in spec or "data" not in spec:
            raise NetworkParseError(f"tensor {name!r} needs 'slots' and 'data'")
        if not isinstance(spec["slots"], list):
            raise NetworkParseError(f"tensor {name!r}: 'slots' must be a list")
        try:
            slots = [T.zero_from_literal(z) for z in spec["slots"]]
            tensors[name] = T.tensor_from_literal(slots, spec["data"])
        except (TensorTypeError, RingError, TypeError, ValueError) as exc:
            raise NetworkValidationError(f"tensor {name!r}: {exc}") from None
    atoms = doc["atoms"]
    if not isinstance(atoms, list) or not all(isinstance(a, str) for a in atoms):
        raise NetworkParseError("'atoms' must be a list of tensor names")
    bonds = []
    for k, b in enumerate(doc.get("bonds", [])):
        if not isinstance(b, list) or len(b) != 2:
            raise NetworkParseError(f"bond {k}: expected [[atom, slot], [atom, slot]]")
        bonds.append((_receptor(b[0], f"bond {k}"), _receptor(b[1], f"bond {k}")))
    open_ = [_receptor(r, f"open {k}") for k, r in enumerate(doc.get("open", []))]
    try:
        free_bonds = [T.zero_from_literal(z) for z in doc.get("free_bonds", [])]
        loops = [T.zero_from_literal(z) for z in doc.get("loops", [])]
    except (TensorTypeError, TypeError, ValueError) as exc:
        raise NetworkValidationError(f"free bond/loop 0-data: {exc}") from None
    net = Network(tensors, atoms, bonds, open_, free_bonds, loops)
    return net, T


def load_network(path) -> tuple[Network, TensorType]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise NetworkParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    except OSError as exc:
        raise NetworkParseError(f"{path}: {exc.strerror}") from None
    return network_from_dict(doc)


def network_to_dict(net: Network, T: TensorType) -> dict:
    doc = type_spec(T)
    doc["tensors"] = {
        name: {
            "slots": [T.zero_to_literal(z) for z in T.slots(A)],
            "data": T.tensor_to_literal(A),
        }
        for name, A in net.tensors.items()
    }
    doc["atoms"] = list(net.atoms)
    doc["bonds"] = [[list(p), list(q)] for p, q in net.bonds]
    doc["open"] = [list(r) for r in net.open]
    doc["free_bonds"] = [T.zero_to_literal(z) for z in net.free_bonds]
    doc["loops"] = [T.zero_to_literal(z) for z in net.loops]
    return doc


def dump_network(net: Network, T: TensorType, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_dict(net, T), fh, indent=1)
