"""Tensor mappings between tensor types.

A mapping consists of a 0-data map ``zero``, a 1-data map ``one`` and a dual
homomorphor. :func:`map_network` applies the mapping atom by atom; every bond
input receptor gets the dual homomorphor, which turns the mapped 0-data
``m(a*)`` into ``m(a)*``. Free bonds and loops are replaced by atoms holding
the image of the source identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .array import ArrayTensor, ArrayType
from .core import TensorType
from .graded import GradedSpace, GradedTensor, GradedType, g_permute
from .network import Network, atom_slots, evaluate, validate
from .pairing import PairingTensor, PairingType
from .scalars import REAL, RingError, RingHom, ring_hom
from .schur import SchurRectType, SchurSquareType, SchurTensor, determinant, pfaffian


# (u0, u1) of the rectangular type matching u = i sigma_y
_RECT_ISY = (-1.0, 1.0)


class MappingError(ValueError):
    """The mapping does not apply to the given type or payload."""


class TensorMapping:
    """Base class: override ``zero`` and ``one`` (and the homomorphor if needed)."""

    name = "mapping"

    def __init__(self, source: TensorType, target: TensorType):
        self.source = source
        self.target = target

    def zero(self, a):
        raise NotImplementedError

    def one(self, A):
        raise NotImplementedError

    def dual_homomorphor(self, B, i: int, a):
        """Turn slot ``i`` of ``B`` (carrying ``m(a*)``) into ``m(a)*``."""
        return B

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.source.name} -> {self.target.name}>"


# -- pairing -> array -------------------------------------------------------------


class PairingToArray(TensorMapping):
    """Dots become qubits; an entry is the prefactor iff matched bits agree."""

    name = "pairing2array"

    def __init__(self, source: Optional[PairingType] = None):
        super().__init__(source or PairingType(), ArrayType(REAL))

    def zero(self, a):
        return 2**a

    def one(self, A: PairingTensor) -> ArrayTensor:
        return map_pairing_to_array(A)


def map_pairing_to_array(A: PairingTensor) -> ArrayTensor:
    n = A.dots
    bits = _occupations(n)
    ok = np.ones(len(bits), dtype=bool)
    for i, j in A.pairs:
        ok &= bits[:, i] == bits[:, j]
    data = np.where(ok, A.prefactor, 0.0)
    return ArrayTensor.from_flat(REAL, [2**d for d in A.slots], data)


# -- entrywise ----------------------------------------------------------------------


class EntrywiseArrayMapping(TensorMapping):
    """Apply a ring homomorphism to every entry of an array tensor."""

    def __init__(self, hom: RingHom | str, source: Optional[ArrayType] = None):
        if isinstance(hom, str):
            try:
                hom = ring_hom(hom)
            except RingError as exc:
                raise MappingError(str(exc)) from None
        src = source or ArrayType(hom.source if hom.source is not None else REAL)
        if hom.source is not None and src.ring != hom.source:
            raise MappingError(f"{hom.name} expects {hom.source.name} entries, not {src.ring.name}")
        super().__init__(src, ArrayType(hom.target))
        self.hom = hom
        self.name = f"entrywise:{hom.name}"

    def zero(self, a):
        return a

    def one(self, A: ArrayTensor) -> ArrayTensor:
        return entrywise_array_mapping(self.hom, A)


def entrywise_array_mapping(hom: RingHom | str, A: ArrayTensor) -> ArrayTensor:
    hom = ring_hom(hom) if isinstance(hom, str) else hom
    if hom.source is not None and A.ring != hom.source:
        raise MappingError(f"{hom.name} expects {hom.source.name} entries, not {A.ring.name}")
    return ArrayTensor(hom.target, hom(A.data))


# -- determinant mapping ---------------------------------------------------------------


def _mode_spaces(gradings) -> list:
    return [GradedSpace((0, g)) for g in gradings]


def _merge_groups(B: GradedTensor, sizes) -> GradedTensor:
    """Merge consecutive single-mode slots into groups of the given sizes."""
    T = GradedType(B.ring, B.zgraded)
    pos = 0
    for size in sizes:
        if size == 0:
            slots = B.slots[:pos] + (GradedSpace((0,), False),) + B.slots[pos:]
            B = GradedTensor(B.ring, slots, B.data.reshape(-1), B.zgraded)
        else:
            for _ in range(size - 1):
                B = T.merge(B, pos)
        pos += 1
    return B


def _split_modes(B: GradedTensor, i: int, gradings) -> GradedTensor:
    """Split slot ``i`` into single-mode slots with the given gradings."""
    spaces = _mode_spaces(gradings)
    slots = B.slots[:i] + tuple(spaces) + B.slots[i + 1 :]
    return GradedTensor(B.ring, slots, B.data.reshape(-1), B.zgraded)


def _occupations(n: int) -> np.ndarray:
    """All ``2**n`` bit patterns, first mode most significant."""
    return np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64).reshape(2**n, n)


def determinant_mapping(A: SchurTensor, ring=REAL) -> GradedTensor:
    """Second quantization of a rectangular prefactor tensor.

    Entry of an occupation pattern is ``P * det(A_M[occupied ins, occupied
    outs])`` (zero unless the counts agree). Modes are laid out as all
    in-modes followed by all out-modes and then moved into per-slot order with
    the graded commutor, which produces the sign ``(-1)^{|a_o||b_i|}`` for
    slots ``a`` before ``b``. An extra ``(-1)^{|a_o||b_o|}`` per slot pair
    makes the map multiplicative under the tensor product.
    """
    slots = A.slots
    n_in, n_out = A.matrix.shape
    occ = _occupations(n_in + n_out)
    # out-mode count per slot, for the extra pairwise sign
    bounds = np.cumsum([0] + [d for _, d in slots])
    data = np.zeros(len(occ), dtype=ring.dtype)
    for k, row in enumerate(occ):
        rows = np.flatnonzero(row[:n_in])
        cols = np.flatnonzero(row[n_in:])
        if len(rows) == len(cols):
            outs = [row[n_in + lo : n_in + hi].sum() for lo, hi in zip(bounds[:-1], bounds[1:])]
            pair = (sum(outs) ** 2 - sum(o * o for o in outs)) // 2
            sign = -1 if pair % 2 else 1
            data[k] = sign * A.prefactor * determinant(A.matrix[np.ix_(rows, cols)])
    spaces = _mode_spaces([-1] * n_in + [1] * n_out)
    B = GradedTensor(ring, spaces, data, zgraded=True)
    # (ins of all slots, outs of all slots) -> (ins_1, outs_1, ins_2, outs_2, ...)
    perm, ri, ro = [], 0, n_in
    for c, d in slots:
        perm += list(range(ri, ri + c)) + list(range(ro, ro + d))
        ri += c
        ro += d
    B = g_permute(B, perm)
    return _merge_groups(B, [c + d for c, d in slots])


def determinant_space(a) -> GradedSpace:
    n_in, n_out = a
    occ = _occupations(n_in + n_out)
    grading = (-occ[:, :n_in].sum(axis=1) + occ[:, n_in:].sum(axis=1)).tolist()
    return GradedSpace(grading)


class DeterminantMapping(TensorMapping):
    """Rectangular ``u = i sigma_y`` prefactor tensors to Z-graded tensors.

    Both orientations ``(-1, 1)`` and ``(1, -1)`` are accepted. They are
    related by ``u -> -u``; the second one carries an extra sign
    ``(-1)^{#occupied in-modes}`` on every slot and ``(-1)^{c+d}`` in the
    dual homomorphor.
    """

    name = "det"

    def __init__(self, source: Optional[SchurRectType] = None):
        source = source or SchurRectType(_RECT_ISY, REAL, "det")
        if not isinstance(source, SchurRectType) or source.prefactor_mode != "det":
            raise MappingError("the determinant mapping needs rectangular tensors with det prefactors")
        flipped = (-_RECT_ISY[0], -_RECT_ISY[1])
        if source.u not in (_RECT_ISY, flipped):
            raise MappingError(f"the determinant mapping needs u = {_RECT_ISY} or {flipped}, got {source.u}")
        self.flipped = source.u == flipped
        super().__init__(source, GradedType(source.ring, zgraded=True))

    def zero(self, a):
        return determinant_space(a)

    def one(self, A):
        B = determinant_mapping(A, self.source.ring)
        if not self.flipped:
            return B
        data = B.data
        for k, (n_in, n_out) in enumerate(A.slots):
            occ_in = _occupations(n_in + n_out)[:, :n_in].sum(axis=1)
            data = data * _broadcast_axis(_sign_vector(occ_in), k, data.ndim)
        return GradedTensor(B.ring, B.slots, data, B.zgraded)

    def dual_homomorphor(self, B, i, a):
        # slot i carries m(a*) = (ins: a_out modes, outs: a_in modes)
        c, d = a
        B = _dual_homomorphor_rect(B, i, c, d)
        if self.flipped and (c + d) % 2:
            B = GradedTensor(B.ring, B.slots, -B.data, B.zgraded)
        return B


def _sign_vector(exponent: np.ndarray) -> np.ndarray:
    return np.where(exponent % 2 == 0, 1.0, -1.0)


def _flag_dual(B: GradedTensor, i: int, sign: np.ndarray) -> GradedTensor:
    """Multiply slot ``i`` by a diagonal sign and mark it as dual."""
    data = B.data * _broadcast_axis(sign, i, B.data.ndim)
    slots = list(B.slots)
    slots[i] = GradedSpace(slots[i].grading, True)
    return GradedTensor(B.ring, slots, data, B.zgraded)


def _broadcast_axis(vec: np.ndarray, axis: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = vec.size
    return vec.reshape(shape)


def _dual_homomorphor_rect(B: GradedTensor, i: int, c: int, d: int) -> GradedTensor:
    """``m((d, c)) -> m((c, d))*``: move the ``c`` out-modes in front of the ``d`` in-modes."""
    n = len(B.slots)
    if c and d:
        B = _split_modes(B, i, [-1] * d + [1] * c)
        group = list(range(i, i + c + d))
        perm = list(range(i)) + group[d:] + group[:d] + list(range(i + c + d, n + c + d - 1))
        B = g_permute(B, perm)
        B = _merge_groups(B, [1] * i + [c + d] + [1] * (n - i - 1))
    occ = _occupations(c + d)
    n_c, n_d = occ[:, :c].sum(axis=1), occ[:, c:].sum(axis=1)
    return _flag_dual(B, i, _sign_vector(n_c * n_d + d * (c + 1)))


# -- Pfaffian mapping ---------------------------------------------------------------


def pfaffian_mapping(A: SchurTensor, ring=REAL) -> GradedTensor:
    """Entry of an occupation pattern is ``P * pf(A_M[occupied, occupied])``."""
    n = A.matrix.shape[0]
    occ = _occupations(n)
    data = np.zeros(len(occ), dtype=ring.dtype)
    for k, row in enumerate(occ):
        idx = np.flatnonzero(row)
        if len(idx) % 2 == 0:
            data[k] = A.prefactor * pfaffian(A.matrix[np.ix_(idx, idx)])
    B = GradedTensor(ring, _mode_spaces([1] * n), data, zgraded=False)
    return _merge_groups(B, list(A.slots))


def pfaffian_space(a: int) -> GradedSpace:
    return GradedSpace(_occupations(a).sum(axis=1) % 2)


class PfaffianMapping(TensorMapping):
    """Antisymmetric square ``u = i sigma_y`` prefactor tensors to Z2-graded tensors."""

    name = "pfaffian"

    def __init__(self, source: Optional[SchurSquareType] = None):
        source = source or SchurSquareType(((0.0, 1.0), (-1.0, 0.0)), "anti", REAL, "pfaffian")
        if not isinstance(source, SchurSquareType) or source.prefactor_mode != "pfaffian":
            raise MappingError("the Pfaffian mapping needs antisymmetric tensors with Pfaffian prefactors")
        if not np.array_equal(source.u, np.array([[0, 1], [-1, 0]])):
            raise MappingError(f"the Pfaffian mapping needs u = [[0, 1], [-1, 0]], got {source.u.tolist()}")
        super().__init__(source, GradedType(source.ring, zgraded=False))

    def zero(self, a):
        return pfaffian_space(a)

    def one(self, A):
        return pfaffian_mapping(A, self.source.ring)

    def dual_homomorphor(self, B, i, a):
        k = _occupations(a).sum(axis=1)
        return _flag_dual(B, i, _sign_vector(k * (k + 1) // 2 + a * (a + 1) // 2))


# -- anti-symmetrization and in-out pairs -------------------------------------------


def _rect_mode_order(slots) -> np.ndarray:
    """Positions of per-slot (ins, outs) modes inside the (all ins, all outs) layout."""
    n_in = sum(c for c, _ in slots)
    order, ri, ro = [], 0, n_in
    for c, d in slots:
        order += list(range(ri, ri + c)) + list(range(ro, ro + d))
        ri += c
        ro += d
    return np.array(order, dtype=int)


def antisymmetrization_mapping(A: SchurTensor, pfaffian_prefactor: bool = False) -> SchurTensor:
    """Embed ``A`` as ``[[0, A], [-A^T, 0]]`` with modes regrouped per slot.

    With ``pfaffian_prefactor`` a determinant prefactor becomes a Pfaffian one;
    this needs the sign ``(-1)^{c(c-1)/2}`` for every slot with ``c`` in-modes.
    """
    n_in, n_out = A.matrix.shape
    M = np.zeros((n_in + n_out, n_in + n_out), dtype=A.matrix.dtype)
    M[:n_in, n_in:] = A.matrix
    M[n_in:, :n_in] = -A.matrix.T
    idx = _rect_mode_order(A.slots)
    pref = A.prefactor
    if pfaffian_prefactor and sum(c * (c - 1) // 2 for c, _ in A.slots) % 2:
        pref = -pref
    return SchurTensor([c + d for c, d in A.slots], M[np.ix_(idx, idx)], pref, "anti")


class AntisymmetrizationMapping(TensorMapping):
    """Rectangular ``u = i sigma_y`` tensors to antisymmetric square ones.

    Determinant prefactors go to Pfaffian prefactors; without prefactors the
    target has none either.
    """

    name = "antisym"

    def __init__(self, source: Optional[SchurRectType] = None):
        source = source or SchurRectType(_RECT_ISY, REAL, "none")
        if not isinstance(source, SchurRectType) or source.u != _RECT_ISY:
            raise MappingError(f"the anti-symmetrization mapping needs u = {_RECT_ISY}")
        self.pfaffian_prefactor = source.prefactor_mode == "det"
        mode = "pfaffian" if self.pfaffian_prefactor else "none"
        target = SchurSquareType(((0.0, 1.0), (-1.0, 0.0)), "anti", source.ring, mode)
        super().__init__(source, target)

    def zero(self, a):
        return a[0] + a[1]

    def one(self, A):
        return antisymmetrization_mapping(A, self.pfaffian_prefactor)

    def dual_homomorphor(self, B, i, a):
        # slot i holds (a_out ins, a_in outs) of a*; reorder to (a_in, a_out) of a
        c, d = a
        r = sum(B.slots[:i])
        n = B.matrix.shape[0]
        idx = np.concatenate([np.arange(r), r + d + np.arange(c), r + np.arange(d), np.arange(r + c + d, n)])
        M = B.matrix[np.ix_(idx, idx)].copy()
        # a -1 gauge on the slot flips the sign of the pairing it enters
        M[r : r + c + d, :] *= -1
        M[:, r : r + c + d] *= -1
        pref = -B.prefactor if self.pfaffian_prefactor and c % 2 else B.prefactor
        return SchurTensor(B.slots, M, pref, B.symmetry)


class InOutPairMapping(TensorMapping):
    """Square tensors with off-diagonal ``u`` read as rectangular ones on ``(a, a)``."""

    name = "inoutpair"

    def __init__(self, source: Optional[SchurSquareType] = None):
        source = source or SchurSquareType(((0.0, 1.0), (1.0, 0.0)), "none", REAL, "none")
        if not isinstance(source, SchurSquareType):
            raise MappingError("the in-out-pair mapping needs square Schur tensors")
        u = source.u
        if u[0, 0] != 0 or u[1, 1] != 0:
            raise MappingError(f"the in-out-pair mapping needs a vanishing diagonal in u, got {u.tolist()}")
        if source.prefactor_mode == "pfaffian":
            raise MappingError("Pfaffian prefactors have no rectangular counterpart")
        target = SchurRectType((u[0, 1], u[1, 0]), source.ring, source.prefactor_mode)
        super().__init__(source, target)

    def zero(self, a):
        return (a, a)

    def one(self, A):
        return in_out_pair_mapping(A)


def in_out_pair_mapping(A: SchurTensor) -> SchurTensor:
    return SchurTensor([(a, a) for a in A.slots], A.matrix, A.prefactor)


# -- trivial mapping (harness only) ---------------------------------------------------


class _UnitType(TensorType):
    """Every 0-data is the unit; a 1-data only remembers its slot count."""

    name = "unit"
    exact = True

    @property
    def unit(self):
        return ()

    def product(self, a, b):
        return ()

    def tensor(self, A, B):
        return A + B

    def permute(self, A, perm):
        return tuple(A[p] for p in perm)

    def contract(self, A):
        return A[:-2]

    def merge(self, A, i):
        return A[:-1]

    def split(self, A, i, a, b):
        return A + ((),)

    def identity(self, a):
        return ((), ())

    def trivial(self):
        return ()

    def slots(self, A):
        return A

    def deviation(self, A, B):
        return 0.0 if A == B else float("inf")


class TrivialMapping(TensorMapping):
    """Every 1-data goes to the trivial tensor on the right number of unit slots."""

    name = "trivial"

    def __init__(self, source: TensorType):
        super().__init__(source, _UnitType())

    def zero(self, a):
        return ()

    def one(self, A):
        return ((),) * len(self.source.slots(A))


# -- mapping networks ---------------------------------------------------------------


def map_network(mapping: TensorMapping, net: Network) -> Network:
    """Map every atom; free bonds and loops become atoms holding the mapped identity."""
    S = mapping.source
    N, F = net.n_atoms, len(net.free_bonds)
    payloads = [mapping.one(net.tensors[name]) for name in net.atoms]
    payloads += [mapping.one(S.identity(a)) for a in net.free_bonds + net.loops]
    zero = {}
    for a in range(net.n_virtual):
        for s, z in enumerate(atom_slots(net, S, a)):
            zero[(a, s)] = z
    bonds = net.all_bonds()
    for p, q in bonds:
        payloads[q[0]] = mapping.dual_homomorphor(payloads[q[0]], q[1], zero[p])
    names = [f"{net.atoms[a]}@{a}" if a < N else f"{'free' if a < N + F else 'loop'}@{a}" for a in range(net.n_virtual)]
    return Network(dict(zip(names, payloads)), names, bonds, list(net.open))


@dataclass
class MappingReport:
    mapping: str
    trials: int
    max_deviation: float
    tol: float
    exact: bool

    @property
    def passed(self) -> bool:
        return self.max_deviation == 0.0 if self.exact else self.max_deviation <= self.tol

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.mapping}: max deviation {self.max_deviation:.3e} over {self.trials} orders"


def verify_mapping_commutes(
    mapping: TensorMapping, net: Network, trials: int = 1, seed: int = 0, tol: float = 1e-8
) -> MappingReport:
    """Map-then-evaluate versus evaluate-then-map.

    The mapped network is evaluated in greedy order and ``trials - 1``
    further random bond orders.
    """
    validate(net, mapping.source)
    expected = mapping.one(evaluate(net, mapping.source, order="given"))
    mapped = map_network(mapping, net)
    validate(mapped, mapping.target)
    rng = np.random.default_rng(seed)
    dev = 0.0
    for k in range(max(1, trials)):
        got = evaluate(mapped, mapping.target, order="greedy" if k == 0 else "random", rng=rng)
        dev = max(dev, mapping.target.deviation(got, expected))
    return MappingReport(mapping.name, max(1, trials), dev, tol, mapping.target.exact)


MAPPING_NAMES = ("pairing2array", "det", "pfaffian", "antisym", "inoutpair", "entrywise:<hom>")


def mapping_from_name(name: str, source: Optional[TensorType] = None) -> TensorMapping:
    """Look up a shipped mapping; ``source`` overrides its default source type."""
    if name == "pairing2array":
        return PairingToArray(source)
    if name == "det":
        return DeterminantMapping(source)
    if name == "pfaffian":
        return PfaffianMapping(source)
    if name == "antisym":
        return AntisymmetrizationMapping(source)
    if name == "inoutpair":
        return InOutPairMapping(source)
    if name.startswith("entrywise:"):
        return EntrywiseArrayMapping(name.split(":", 1)[1], source)
    raise MappingError(f"unknown mapping {name!r}; known: {', '.join(MAPPING_NAMES)}")
