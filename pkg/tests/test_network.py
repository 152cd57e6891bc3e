import json
from importlib.resources import files

import numpy as np
import pytest

from tensortypes.array import ArrayTensor, ArrayType, identity
from tensortypes.graded import GradedSpace, GradedTensor, GradedType
from tensortypes.network import (
    Contract,
    EmitIdentity,
    Network,
    NetworkParseError,
    NetworkValidationError,
    TensorProduct,
    evaluate,
    evaluate_order_independent,
    load_network,
    network_from_dict,
    network_to_dict,
    plan,
    random_network,
    validate,
)
from tensortypes.pairing import PairingTensor, PairingType
from tensortypes.scalars import REAL
from tensortypes.schur import SchurRectType, SchurSquareType

T = ArrayType(REAL)
M = ArrayTensor(REAL, np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=float))
V = ArrayTensor(REAL, np.array([0.3, 0.25, 0.45]))
DATA = files("tensortypes") / "data"


def kinds(p):
    return [type(s).__name__ for s in p.steps]


# -- validation ---------------------------------------------------------------------


def test_single_atom_all_open_validates():
    validate(Network({"M": M}, ["M"], [], [(0, 0), (0, 1)]), T)


def test_dimension_mismatch_names_bond():
    u = ArrayTensor(REAL, np.ones(2))
    net = Network({"M": M, "u": u}, ["M", "u"], [((0, 1), (1, 0))], [(0, 0)])
    with pytest.raises(NetworkValidationError, match="bond 0: 0-data mismatch"):
        validate(net, T)


def test_graded_two_outputs_is_direction_violation():
    F = GradedSpace((0, 1))
    A = GradedTensor(REAL, (F,), np.array([1.0, 0.0]))
    net = Network({"A": A}, ["A", "A"], [((0, 0), (1, 0))], [])
    with pytest.raises(NetworkValidationError, match="direction violation"):
        validate(net, GradedType())


def test_dangling_and_reused_receptors():
    with pytest.raises(NetworkValidationError, match="dangling"):
        validate(Network({"M": M}, ["M"], [], [(0, 0)]), T)
    with pytest.raises(NetworkValidationError, match="already used"):
        validate(Network({"M": M}, ["M"], [], [(0, 0), (0, 0), (0, 1)]), T)
    with pytest.raises(NetworkValidationError, match="unknown tensor"):
        validate(Network({}, ["M"], [], []), T)


# -- plans ----------------------------------------------------------------------------


def test_plan_two_atoms_one_bond():
    p = plan(Network({"M": M, "v": V}, ["M", "v"], [((0, 0), (1, 0))], [(0, 1)]), T)
    assert kinds(p) == ["TensorProduct", "Permute", "Contract"]
    # when the bonded slots are already last, the permutation is skipped
    p = plan(Network({"M": M, "v": V}, ["M", "v"], [((0, 1), (1, 0))], [(0, 0)]), T)
    assert kinds(p) == ["TensorProduct", "Contract"]


def test_plan_self_bond():
    p = plan(Network({"M": M}, ["M"], [((0, 1), (0, 0))], []), T)
    assert kinds(p) == ["Permute", "Contract"]


def test_plan_free_loop():
    p = plan(Network({}, [], [], [], [], [3]), T)
    assert isinstance(p.steps[0], EmitIdentity) and isinstance(p.steps[-1], Contract)
    assert float(evaluate(Network({}, [], [], [], [], [3]), T).data) == 3.0


def test_plan_replays_every_atom_and_bond_once():
    for seed in range(30):
        rng = np.random.default_rng(seed)
        net = random_network(T, rng)
        for order in ("given", "greedy", "random"):
            p = plan(net, T, order, np.random.default_rng(seed))
            bonds = [s.bond for s in p.steps if isinstance(s, Contract)]
            assert sorted(bonds) == list(range(len(net.all_bonds())))
            merged = [s.right for s in p.steps if isinstance(s, TensorProduct)]
            assert len(set(merged)) == len(merged)
            out = evaluate(net, T, p)
            assert len(T.slots(out)) == len(net.open)


# -- evaluation ---------------------------------------------------------------------


def test_intro_examples():
    mv = evaluate(Network({"M": M, "v": V}, ["M", "v"], [((0, 1), (1, 0))], [(0, 0)]), T)
    assert mv.data.tolist() == [0.25, 0.3, 0.45]
    tr = evaluate(Network({"M": M}, ["M", "M"], [((0, 1), (1, 0)), ((1, 1), (0, 0))], []), T)
    assert float(tr.data) == 3.0
    t = ArrayTensor(REAL, np.arange(12.0).reshape(2, 3, 2))
    s = evaluate(Network({"t": t, "M": M}, ["t", "M"], [((0, 1), (1, 0))], [(0, 0), (1, 1), (0, 2)]), T)
    assert s.data.tolist() == [[[2, 3], [0, 1], [4, 5]], [[8, 9], [6, 7], [10, 11]]]


def test_single_atom_is_returned_unchanged():
    rng = np.random.default_rng(0)
    A = ArrayTensor(REAL, rng.normal(size=(2, 3)))
    out = evaluate(Network({"A": A}, ["A"], [], [(0, 0), (0, 1)]), T)
    assert np.array_equal(out.data, A.data)
    P = PairingTensor((2, 2), [(0, 3), (1, 2)], 3.0)
    assert evaluate(Network({"P": P}, ["P"], [], [(0, 0), (0, 1)]), PairingType()) == P


@pytest.mark.parametrize(
    "TT",
    [T, GradedType(), PairingType(), SchurRectType((1.0, -1.0)), SchurSquareType([[0.0, 1.0], [-1.0, 0.0]], "anti")],
    ids=lambda x: x.name,
)
def test_order_independence(TT):
    for seed in range(15):
        net = random_network(TT, np.random.default_rng([seed, 1]), max_atoms=4, max_bonds=5, budget=2)
        rep = evaluate_order_independent(net, TT, trials=3, seed=seed)
        assert rep.passed, rep


def test_relabeling_atoms_is_invariant():
    for seed in range(15):
        net = random_network(T, np.random.default_rng(seed), extras=False)
        n = net.n_atoms
        perm = np.random.default_rng(seed + 100).permutation(n)
        where = {int(old): new for new, old in enumerate(perm)}
        atoms = [net.atoms[int(old)] for old in perm]
        bonds = [((where[p[0]], p[1]), (where[q[0]], q[1])) for p, q in net.bonds]
        open_ = [(where[a], s) for a, s in net.open]
        other = Network(net.tensors, atoms, bonds, open_)
        assert np.allclose(evaluate(other, T).data, evaluate(net, T).data, atol=1e-12)


def test_inserting_identity_on_a_bond():
    for seed in range(15):
        net = random_network(T, np.random.default_rng(seed), extras=False)
        if not net.bonds:
            continue
        (p, q), rest = net.bonds[0], net.bonds[1:]
        dim = T.slots(net.tensors[net.atoms[p[0]]])[p[1]]
        tensors = dict(net.tensors, _id=identity(dim))
        k = net.n_atoms
        other = Network(tensors, net.atoms + ["_id"], rest + [(p, (k, 0)), ((k, 1), q)], net.open)
        assert np.allclose(evaluate(other, T).data, evaluate(net, T).data, atol=1e-12)


# -- file format ----------------------------------------------------------------------


def test_golden_files_load():
    net, TT = load_network(DATA / "matrix_vector.json")
    assert evaluate(net, TT).data.tolist() == [0.25, 0.3, 0.45]


def test_round_trip_through_dict():
    for TT in (T, GradedType(), PairingType(), SchurRectType((1.0, 1.0), REAL, "det")):
        net = random_network(TT, np.random.default_rng(3))
        doc = json.loads(json.dumps(network_to_dict(net, TT)))
        net2, TT2 = network_from_dict(doc)
        assert TT.deviation(evaluate(net2, TT2), evaluate(net, TT)) < 1e-12


def test_parse_errors():
    with pytest.raises(NetworkParseError):
        network_from_dict({"type": "array"})
    with pytest.raises(NetworkParseError):
        network_from_dict({"type": "hopf", "tensors": {}, "atoms": []})
    with pytest.raises(NetworkParseError):
        network_from_dict({"type": "array", "tensors": {}, "atoms": [], "bonds": [[0, 1]]})
    with pytest.raises(NetworkValidationError):
        network_from_dict({"type": "array", "tensors": {"x": {"slots": [2], "data": [1]}}, "atoms": ["x"]})
