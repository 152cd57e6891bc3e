"""Slow reference implementations, kept independent of the package code."""

from __future__ import annotations

import itertools

import numpy as np


def pfaffian_expand(M) -> float:
    """Pfaffian by expansion along the first row."""
    M = np.asarray(M)
    n = M.shape[0]
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0
    total = 0.0
    rest = list(range(1, n))
    for pos, j in enumerate(rest):
        keep = [k for k in rest if k != j]
        total += (-1) ** pos * M[0, j] * pfaffian_expand(M[np.ix_(keep, keep)])
    return total


def matchings(points: list) -> list:
    """All perfect matchings of ``points`` as lists of pairs."""
    if not points:
        return [[]]
    first, rest = points[0], points[1:]
    out = []
    for k, p in enumerate(rest):
        for m in matchings(rest[:k] + rest[k + 1 :]):
            out.append([(first, p)] + m)
    return out


def gather_permute(data: np.ndarray, perm) -> np.ndarray:
    """``out[i_0..] = data[j]`` with ``j[perm[k]] = i_k``, one entry at a time."""
    shape = tuple(data.shape[p] for p in perm)
    out = np.empty(shape, dtype=data.dtype)
    for idx in itertools.product(*(range(d) for d in shape)):
        src = [0] * data.ndim
        for k, p in enumerate(perm):
            src[p] = idx[k]
        out[idx] = data[tuple(src)]
    return out


def trace_pair(data: np.ndarray, p: int, q: int) -> np.ndarray:
    """Sum over ``i_p = i_q`` with explicit loops."""
    rest = [k for k in range(data.ndim) if k not in (p, q)]
    shape = tuple(data.shape[k] for k in rest)
    out = np.zeros(shape, dtype=data.dtype)
    for idx in itertools.product(*(range(d) for d in shape)):
        for j in range(data.shape[p]):
            src = [0] * data.ndim
            for k, r in enumerate(rest):
                src[r] = idx[k]
            src[p] = src[q] = j
            out[idx] += data[tuple(src)]
    return out


# -- fermions ---------------------------------------------------------------------


def _index(bits) -> int:
    return int("".join(str(b) for b in bits), 2) if len(bits) else 0


def creation_ops(n: int) -> list:
    """``c^dag_k`` on occupation bit strings, mode 0 most significant.

    ``c^dag_k |s> = (-1)^{s_0 + ... + s_{k-1}} |s + e_k>``.
    """
    ops = []
    for k in range(n):
        op = np.zeros((2**n, 2**n))
        for bits in itertools.product((0, 1), repeat=n):
            if bits[k]:
                continue
            new = list(bits)
            new[k] = 1
            op[_index(new), _index(bits)] = (-1) ** sum(bits[:k])
        ops.append(op)
    return ops


def fock_state(order, bits, cdag) -> np.ndarray:
    """``prod_k (c^dag_{order[k]})^{bits[k]} |0>`` with the product left to right."""
    v = np.zeros(cdag[0].shape[0])
    v[0] = 1.0
    for mode, b in reversed(list(zip(order, bits))):
        if b:
            v = cdag[mode] @ v
    return v


def amplitudes(U: np.ndarray) -> np.ndarray:
    """``<alpha| prod_{i in beta} (sum_j U_ij c^dag_j) |0>``, indexed ``(beta, alpha)``."""
    n = U.shape[0]
    cdag = creation_ops(n)
    dressed = [sum(U[i, j] * cdag[j] for j in range(n)) for i in range(n)]
    out = np.zeros((2,) * (2 * n))
    for beta in itertools.product((0, 1), repeat=n):
        v = np.zeros(2**n)
        v[0] = 1.0
        for i in reversed(range(n)):
            if beta[i]:
                v = dressed[i] @ v
        for alpha in itertools.product((0, 1), repeat=n):
            out[beta + alpha] = fock_state(range(n), alpha, cdag) @ v
    return out


def minor_det(U: np.ndarray, rows, cols) -> float:
    rows, cols = list(rows), list(cols)
    if len(rows) != len(cols):
        return 0.0
    if not rows:
        return 1.0
    return float(np.linalg.det(U[np.ix_(rows, cols)]))


# -- statistical models -------------------------------------------------------------


def ising_partition(width, height, beta, periodic=False, fixed=None) -> float:
    """Plain loop over spin configurations; ``fixed`` pins sites to +1/-1."""
    fixed = fixed or {}
    n = width * height
    bonds = set()
    for y in range(height):
        for x in range(width):
            for dx, dy in ((1, 0), (0, 1)):
                nx, ny = x + dx, y + dy
                if periodic:
                    nx, ny = nx % width, ny % height
                elif nx >= width or ny >= height:
                    continue
                bonds.add((y * width + x, ny * width + nx, len(bonds)))
    total = 0.0
    for spins in itertools.product((1, -1), repeat=n):
        if any(spins[v] != s for v, s in fixed.items()):
            continue
        total += np.exp(beta * sum(spins[a] * spins[b] for a, b, _ in bonds))
    return total


def dimer_patterns(width, height) -> set:
    """Boundary patterns admitting a covering, by enumerating edge subsets.

    Edges are the inner grid edges plus one stub per boundary leg, in the
    order (vertex, direction) with directions left, right, down, up.
    """
    stubs = []
    inner = []
    for y in range(height):
        for x in range(width):
            v = y * width + x
            for d, (dx, dy) in enumerate(((-1, 0), (1, 0), (0, -1), (0, 1))):
                nx, ny = x + dx, y + dy
                if 0 <= nx < width and 0 <= ny < height:
                    if d in (1, 3):
                        inner.append((v, ny * width + nx))
                else:
                    stubs.append(v)
    n = width * height
    found = set()
    edges = [(a, b) for a, b in inner] + [(v, None) for v in stubs]
    for mask in range(2 ** len(edges)):
        deg = [0] * n
        for k, (a, b) in enumerate(edges):
            if mask >> k & 1:
                deg[a] += 1
                if b is not None:
                    deg[b] += 1
        if all(d == 1 for d in deg):
            found.add(tuple((mask >> (len(inner) + k)) & 1 for k in range(len(stubs))))
    return found
