import itertools

import numpy as np
import pytest

from tensortypes.array import ArrayType
from tensortypes.core import TensorTypeError
from tensortypes.graded import (
    GradedSpace,
    GradedTensor,
    GradedType,
    g_commutor,
    g_contract,
    g_dual_automorphor,
    g_identity,
    g_permute,
    g_tensor_product,
)
from tensortypes.network import Network, evaluate, random_network
from tensortypes.scalars import REAL

from .oracles import creation_ops

F = GradedSpace((0, 1))
FD = GradedSpace((0, 1), True)


def random_even(slots, rng):
    return GradedType().random_tensor(slots, rng)


def test_even_support_enforced():
    data = np.zeros((2, 2))
    data[0, 1] = 1.0
    with pytest.raises(TensorTypeError):
        GradedTensor(REAL, (F, F), data)


def test_tensor_product_is_even_and_commutative():
    rng = np.random.default_rng(0)
    A, B = random_even((F, F), rng), random_even((F,), rng)
    C = g_tensor_product(A, B)
    par = np.add.outer(np.add.outer([0, 1], [0, 1]), [0, 1]) % 2
    assert np.all(C.data[par == 1] == 0)
    # swapping the two factors with the commutor gives B (x) A
    swapped = g_permute(C, (2, 0, 1))
    assert np.allclose(swapped.data, g_tensor_product(B, A).data)


def test_commutor_sign_and_involution():
    data = np.zeros((2, 2))
    data[0, 0], data[1, 1] = 2.0, 5.0
    A = GradedTensor(REAL, (F, F), data)
    B = g_commutor(A, 0)
    assert B.data[1, 1] == -5.0 and B.data[0, 0] == 2.0
    rng = np.random.default_rng(1)
    for _ in range(20):
        A = random_even((F, GradedSpace((0, 0, 1)), F), rng)
        for i in (0, 1):
            assert np.array_equal(g_commutor(g_commutor(A, i), i).data, A.data)


def test_even_slot_swaps_plainly():
    rng = np.random.default_rng(2)
    E = GradedSpace((0, 0))
    A = random_even((E, F, F), rng)
    assert np.array_equal(g_commutor(A, 0).data, np.swapaxes(A.data, 0, 1))


def test_dual_automorphor():
    rng = np.random.default_rng(3)
    A = random_even((F, F), rng)
    D = g_dual_automorphor(A, 0)
    assert D.data[1, 1] == -A.data[1, 1] and D.data[0, 0] == A.data[0, 0]
    assert np.array_equal(g_dual_automorphor(D, 0).data, A.data)
    E = GradedSpace((0, 0))
    B = random_even((E, E), rng)
    assert np.array_equal(g_dual_automorphor(B, 0).data, B.data)


def test_identity_and_wrong_direction_witness():
    rng = np.random.default_rng(4)
    A = random_even((F, FD), rng)
    # A's output slot 0 glued to the input slot of an identity; the survivors
    # are (A's input, identity's output), i.e. A with its slots exchanged
    out = g_contract(g_tensor_product(A, g_identity(F)), (0, 2))
    assert np.allclose(out.data, g_permute(A, (1, 0)).data)
    back = g_contract(g_tensor_product(out, g_identity(FD)), (0, 2))
    assert np.allclose(back.data, A.data)
    T = GradedType()
    odd = np.zeros((2, 2))
    odd[1, 1] = 1.0
    W = GradedTensor(REAL, (F, FD), odd)
    straight = T.contract(W)
    # contracting in the wrong direction amounts to the involutor (-1)^{|j|}
    wrong = T.contract(T.involutor(W, 1))
    assert float(straight.data) == 1.0
    assert float(wrong.data) == -1.0


def test_contract_rejects_non_dual():
    rng = np.random.default_rng(5)
    A = random_even((F, F), rng)
    with pytest.raises(TensorTypeError):
        g_contract(A, (0, 1))


def test_all_even_network_matches_array_network():
    G = GradedType()
    Arr = ArrayType(REAL)
    for seed in range(20):
        rng = np.random.default_rng([seed, 9])
        net = random_network(Arr, rng, max_atoms=4, max_bonds=4, budget=3, extras=False)

        # orient every bond out -> in by flagging the second receptor as dual
        duals = {q for _, q in net.bonds}
        tensors = {}
        for a, name in enumerate(net.atoms):
            A = net.tensors[name]
            slots = [GradedSpace((0,) * d, (a, s) in duals) for s, d in enumerate(A.shape)]
            tensors[f"g{a}"] = GradedTensor(REAL, slots, A.data)
        gnet = Network(tensors, [f"g{a}" for a in range(net.n_atoms)], net.bonds, net.open)
        got = evaluate(gnet, G).data
        ref = evaluate(net, Arr).data
        assert np.allclose(got, ref, rtol=0, atol=1e-12)


# -- operator reordering against Jordan-Wigner ------------------------------------------


def reorder_via_commutors(T: GradedTensor, order) -> GradedTensor:
    """Bring out-slots and in-slots into ``order`` by adjacent commutors."""
    n = len(order)
    current = list(range(2 * n))
    target = list(order) + [n + o for o in order]
    for pos in range(2 * n):
        k = current.index(target[pos])
        while k > pos:
            T = g_commutor(T, k - 1)
            current[k - 1], current[k] = current[k], current[k - 1]
            k -= 1
    return T


def jw_reordered_matrix(O: np.ndarray, n: int, order) -> np.ndarray:
    cdag = creation_ops(n)

    def state(bits):
        v = np.zeros(2**n)
        v[0] = 1.0
        for mode, b in reversed(list(zip(order, bits))):
            if b:
                v = cdag[mode] @ v
        return v

    basis = [state(bits) for bits in itertools.product((0, 1), repeat=n)]
    B = np.array(basis).T
    return B.T @ O @ B


@pytest.mark.parametrize("seed", range(5))
def test_mode_reordering_matches_jordan_wigner(seed):
    n = 3
    rng = np.random.default_rng(seed)
    parity = np.array([sum(b) % 2 for b in itertools.product((0, 1), repeat=n)])
    O = rng.normal(size=(2**n, 2**n)) * (parity[:, None] == parity[None, :])
    T = GradedTensor(REAL, [F] * n + [FD] * n, O.reshape((2,) * (2 * n)))
    for order in itertools.permutations(range(n)):
        got = reorder_via_commutors(T, order).data.reshape(2**n, 2**n)
        assert np.allclose(got, jw_reordered_matrix(O, n, order), atol=1e-12)


def test_two_mode_exchange_sign():
    # exchanging the creation order of two occupied modes costs a sign
    data = np.zeros((2, 2))
    data[1, 1] = 1.0
    T = GradedTensor(REAL, (F, F), data)
    assert g_commutor(T, 0).data[1, 1] == -1.0
