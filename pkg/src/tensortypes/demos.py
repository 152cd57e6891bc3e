"""Physics demos built from tensor networks, each with a brute-force oracle.

* Ising: copy tensors on vertices and Boltzmann matrices on edges over
  non-negative reals. Observed spins are extra open slots of their copy
  tensor; probabilities are ``Z(o) / Z``.
* Dimers: Boolean vertex constraints ("exactly one incident edge is covered")
  with the boundary edges left open. An entry says whether the grid admits a
  dimer covering with that boundary pattern.
* Free fermions: the determinant mapping of a single-particle matrix against
  a Jordan-Wigner many-body computation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .array import ArrayTensor, ArrayType
from .mappings import DeterminantMapping, verify_mapping_commutes
from .network import Network, evaluate
from .scalars import BOOLEAN, NONNEG, REAL
from .schur import SchurRectType, SchurTensor

MAX_ISING_SITES = 16
MAX_DIMER_SIDE = 4
MAX_FERMION_MODES = 4


class DemoError(ValueError):
    """Demo parameters out of range."""


# -- Ising ------------------------------------------------------------------------


def grid_edges(width: int, height: int, periodic: bool = False) -> list:
    """Nearest-neighbour edges of a grid, vertices numbered row by row."""
    edges = []
    for y in range(height):
        for x in range(width):
            v = y * width + x
            if x + 1 < width or periodic:
                edges.append((v, y * width + (x + 1) % width))
            if y + 1 < height or periodic:
                edges.append((v, ((y + 1) % height) * width + x))
    return edges


def copy_tensor(legs: int, ring=NONNEG) -> ArrayTensor:
    """The delta tensor on ``legs`` binary slots (the scalar 2 for no legs)."""
    if legs == 0:
        return ArrayTensor(ring, np.array(2.0 if ring is not BOOLEAN else True))
    data = np.zeros((2,) * legs, dtype=ring.dtype)
    data[(0,) * legs] = data[(1,) * legs] = ring.one
    return ArrayTensor(ring, data)


def ising_network(width: int, height: int, beta: float, periodic: bool = False, observe=()) -> Network:
    """Edge-Boltzmann network; spin index 0 means +1 and 1 means -1."""
    n = width * height
    edges = grid_edges(width, height, periodic)
    spins = np.array([1.0, -1.0])
    boltzmann = ArrayTensor(NONNEG, np.exp(beta * np.outer(spins, spins)))
    legs = [[] for _ in range(n)]  # per vertex: (edge atom, edge slot)
    for k, (u, v) in enumerate(edges):
        legs[u].append((n + k, 0))
        legs[v].append((n + k, 1))
    observe = list(observe)
    tensors, atoms, bonds, open_ = {"E": boltzmann}, [], [], []
    for v in range(n):
        k = len(legs[v]) + (v in observe)
        name = f"delta{k}"
        tensors.setdefault(name, copy_tensor(k))
        atoms.append(name)
        for s, r in enumerate(legs[v]):
            bonds.append(((v, s), r))
    atoms += ["E"] * len(edges)
    open_ = [(v, len(legs[v])) for v in observe]
    return Network(tensors, atoms, bonds, open_)


@dataclass
class IsingResult:
    z: float
    z_observed: np.ndarray
    observe: list

    @property
    def probabilities(self) -> np.ndarray:
        return self.z_observed / self.z


def ising(width: int, height: int, beta: float, periodic: bool = False, observe=()) -> IsingResult:
    if width < 1 or height < 1:
        raise DemoError("grid sides must be positive")
    if width * height > MAX_ISING_SITES:
        raise DemoError(f"{width}x{height} grid exceeds {MAX_ISING_SITES} sites")
    observe = list(observe)
    if any(not 0 <= v < width * height for v in observe) or len(set(observe)) != len(observe):
        raise DemoError(f"observed vertices {observe} must be distinct sites of the grid")
    T = ArrayType(NONNEG)
    z = float(evaluate(ising_network(width, height, beta, periodic), T).data)
    zo = evaluate(ising_network(width, height, beta, periodic, observe), T).data
    return IsingResult(z, np.asarray(zo, dtype=float), observe)


def ising_brute_force(width: int, height: int, beta: float, periodic: bool = False, observe=()) -> IsingResult:
    """Sum over all ``2^(width*height)`` spin configurations."""
    n = width * height
    edges = np.array(grid_edges(width, height, periodic), dtype=int).reshape(-1, 2)
    conf = 1 - 2 * np.array(list(itertools.product((0, 1), repeat=n)), dtype=float).reshape(2**n, n)
    energy = (conf[:, edges[:, 0]] * conf[:, edges[:, 1]]).sum(axis=1)
    weight = np.exp(beta * energy)
    observe = list(observe)
    if not observe:
        return IsingResult(float(weight.sum()), np.array(weight.sum()), observe)
    zo = np.zeros((2,) * len(observe))
    bits = ((1 - conf[:, observe]) / 2).astype(int)
    np.add.at(zo, tuple(bits.T), weight)
    return IsingResult(float(weight.sum()), zo, observe)


# -- dimers -------------------------------------------------------------------------

# slot order of every vertex tensor
_DIRECTIONS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def exactly_one(legs: int) -> ArrayTensor:
    data = np.zeros((2,) * legs, dtype=bool)
    for k in range(legs):
        idx = [0] * legs
        idx[k] = 1
        data[tuple(idx)] = True
    return ArrayTensor(BOOLEAN, data)


def dimer_network(width: int, height: int) -> Network:
    """Every vertex has four legs; legs leaving the grid stay open."""
    n = width * height
    bonds, open_ = [], []
    for y in range(height):
        for x in range(width):
            v = y * width + x
            for s, (dx, dy) in enumerate(_DIRECTIONS):
                nx, ny = x + dx, y + dy
                if 0 <= nx < width and 0 <= ny < height:
                    if s in (1, 3):  # right and up bonds, each edge once
                        w = ny * width + nx
                        bonds.append(((v, s), (w, s - 1)))
                else:
                    open_.append((v, s))
    return Network({"V": exactly_one(4)}, ["V"] * n, bonds, open_)


def dimer(width: int, height: int) -> ArrayTensor:
    if not (1 <= width <= MAX_DIMER_SIDE and 1 <= height <= MAX_DIMER_SIDE):
        raise DemoError(f"dimer grids are limited to {MAX_DIMER_SIDE}x{MAX_DIMER_SIDE}")
    return evaluate(dimer_network(width, height), ArrayType(BOOLEAN))


def dimer_brute_force(width: int, height: int) -> np.ndarray:
    """Backtracking over coverings; returns the feasibility of every boundary pattern."""
    net = dimer_network(width, height)
    boundary = {r: k for k, r in enumerate(net.open)}
    n = width * height
    # every vertex picks the leg it covers; inner legs must agree at both ends
    partner = {}
    for p, q in net.bonds:
        partner[p] = q
        partner[q] = p
    out = np.zeros((2,) * len(boundary), dtype=bool)
    choice = [None] * n

    def covered(v):
        return choice[v] is not None

    def go(v):
        if v == n:
            pattern = [0] * len(boundary)
            for u in range(n):
                r = (u, choice[u])
                if r in boundary:
                    pattern[boundary[r]] = 1
            out[tuple(pattern)] = True
            return
        if covered(v):
            go(v + 1)
            return
        for s in range(4):
            r = (v, s)
            if r in boundary:
                choice[v] = s
                go(v + 1)
                choice[v] = None
            elif r in partner:
                w, t = partner[r]
                if w > v and not covered(w):
                    choice[v], choice[w] = s, t
                    go(v + 1)
                    choice[v] = choice[w] = None

    go(0)
    return out


# -- free fermions ------------------------------------------------------------------


def jw_annihilators(n: int) -> list:
    """Jordan-Wigner matrices ``c_0 .. c_{n-1}``; mode 0 is the most significant bit."""
    z = np.diag([1.0, -1.0])
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    ops = []
    for k in range(n):
        factors = [z] * k + [a] + [np.eye(2)] * (n - k - 1)
        op = np.ones((1, 1))
        for f in factors:
            op = np.kron(op, f)
        ops.append(op)
    return ops


def occupation_state(occupied, n: int, cdag=None) -> np.ndarray:
    """``c^dag_{i_1} ... c^dag_{i_k} |0>`` with the given modes in ascending order."""
    cdag = cdag if cdag is not None else [c.T for c in jw_annihilators(n)]
    v = np.zeros(2**n)
    v[0] = 1.0
    for i in sorted(occupied, reverse=True):
        v = cdag[i] @ v
    return v


def many_body_amplitudes(U: np.ndarray) -> np.ndarray:
    """``<alpha| prod_{i in beta} (sum_j U_ij c^dag_j) |0>`` for all patterns.

    Returns an array indexed by ``(beta bits..., alpha bits...)``.
    """
    n = U.shape[0]
    cdag = [c.T for c in jw_annihilators(n)]
    dressed = [sum(U[i, j] * cdag[j] for j in range(n)) for i in range(n)]
    out = np.zeros((2,) * (2 * n), dtype=U.dtype)
    patterns = list(itertools.product((0, 1), repeat=n))
    bras = {a: occupation_state([i for i in range(n) if a[i]], n, cdag) for a in patterns}
    for beta in patterns:
        v = np.zeros(2**n, dtype=U.dtype)
        v[0] = 1.0
        for i in reversed([i for i in range(n) if beta[i]]):
            v = dressed[i] @ v
        for alpha in patterns:
            out[beta + alpha] = bras[alpha] @ v
    return out


@dataclass
class FreeFermionResult:
    modes: int
    max_error: float
    network_deviation: float
    tol: float = 1e-8

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tol and self.network_deviation <= self.tol


def freefermion(modes: int, seed: int = 0) -> FreeFermionResult:
    """Compare the determinant mapping of a random ``U`` with Jordan-Wigner amplitudes."""
    if not 1 <= modes <= MAX_FERMION_MODES:
        raise DemoError(f"modes must be between 1 and {MAX_FERMION_MODES}")
    rng = np.random.default_rng(seed)
    U = rng.normal(size=(modes, modes))
    T = SchurRectType((-1.0, 1.0), REAL, "det")
    mapping = DeterminantMapping(T)
    # one slot: in-modes are the created modes (beta), out-modes the read-out ones (alpha)
    mapped = mapping.one(SchurTensor([(modes, modes)], U, 1.0))
    amplitudes = many_body_amplitudes(U).reshape(-1)
    err = float(np.max(np.abs(mapped.data.reshape(-1) - amplitudes)))
    # two propagators glued along a bond, evaluated on both sides of the mapping
    A = T.random_tensor([(modes, 0), (0, modes)], rng)
    B = T.random_tensor([(modes, 0), (0, modes)], rng)
    net = Network({"A": A, "B": B}, ["A", "B"], [((0, 1), (1, 0))], [(0, 0), (1, 1)])
    dev = verify_mapping_commutes(mapping, net, trials=2, seed=seed).max_deviation
    return FreeFermionResult(modes, err, dev)


def boundary_edge_count(width: int, height: int) -> int:
    return 2 * (width + height)

