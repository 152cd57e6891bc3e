"""Schur-complement tensors.

Two variants share most of the machinery:

* rectangular: a slot carries ``(n_in, n_out)`` modes; the payload is an
  ``in x out`` matrix whose rows are the in-modes of all slots (slot order)
  and whose columns are the out-modes. The dual swaps in and out.
* square: a slot carries ``n`` modes and the payload is an ``n x n`` matrix,
  optionally constrained to be symmetric or antisymmetric.

Tensor product is the direct sum, contraction is the Schur complement after
subtracting the ``u`` pattern on the contracted modes. With a prefactor mode
the payload also carries a scalar that picks up the determinant (or, for
antisymmetric square tensors, the Pfaffian) of the eliminated block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import warnings

import numpy as np
import scipy.linalg

from .core import TensorType, TensorTypeError
from .scalars import COMPLEX, REAL, ScalarRing, deviation

PIVOT_TOL = 1e-12
SYMMETRY_TOL = 1e-9


class SingularBlock(ArithmeticError):
    """The block eliminated by a Schur complement is not invertible."""


# -- linear algebra -------------------------------------------------------------


def _lu(Z: np.ndarray):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(Z, check_finite=True)
    scale = np.max(np.linalg.norm(Z, axis=1))
    if scale == 0 or np.min(np.abs(np.diag(lu))) < PIVOT_TOL * scale:
        raise SingularBlock(f"{Z.shape[0]}x{Z.shape[0]} block is singular")
    return lu, piv


def determinant(M: np.ndarray) -> complex | float:
    """Determinant through LU with partial pivoting (no singularity check)."""
    M = np.asarray(M)
    if M.shape[0] == 0:
        return M.dtype.type(1)
    with warnings.catch_warnings():
        # singular input is fine here: a zero pivot gives det 0
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    return (-1) ** swaps * np.prod(np.diag(lu))


def schur_complement(M: np.ndarray, k: int, l: int | None = None):
    """Eliminate the trailing ``k x l`` block ``Z`` of ``M``.

    Returns ``(W - X Z^-1 Y, det Z)``. Raises :class:`SingularBlock` when an
    LU pivot of ``Z`` falls below ``PIVOT_TOL`` times its largest row norm.
    """
    l = k if l is None else l
    if k != l:
        raise TensorTypeError(f"eliminated block must be square, got {k}x{l}")
    M = np.asarray(M)
    r, c = M.shape[0] - k, M.shape[1] - k
    if r < 0 or c < 0:
        raise TensorTypeError(f"cannot eliminate {k} modes from a {M.shape} matrix")
    W, X, Y, Z = M[:r, :c], M[:r, c:], M[r:, :c], M[r:, c:]
    if k == 0:
        return W.copy(), M.dtype.type(1)
    lu, piv = _lu(Z)
    swaps = np.count_nonzero(piv != np.arange(k))
    det = (-1) ** swaps * np.prod(np.diag(lu))
    return W - X @ scipy.linalg.lu_solve((lu, piv), Y), det


def pfaffian(M: np.ndarray, tol: float = SYMMETRY_TOL):
    """Pfaffian by skew-symmetric Gaussian elimination with pivoting.

    Each step brings the largest entry of the current column into the
    sub-diagonal (every swap flips the sign) and eliminates the rest.
    """
    A = np.array(M, dtype=np.result_type(M, np.float64))
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("Pfaffian needs a square matrix")
    scale = max(1.0, float(np.max(np.abs(A)))) if n else 1.0
    if n and np.max(np.abs(A + A.T)) > tol * scale:
        raise ValueError("matrix is not antisymmetric")
    if n % 2:
        return A.dtype.type(0)
    pf = A.dtype.type(1)
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k + 1 :, k])))
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        pivot = A[k, k + 1]
        if pivot == 0:
            return A.dtype.type(0)
        pf = pf * pivot
        if k + 2 < n:
            tau = A[k, k + 2 :] / pivot
            col = A[k + 2 :, k + 1].copy()
            A[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return pf


def norm_constraint_check(M: np.ndarray, iterations: int = 200, tol: float = 1e-10) -> bool:
    """True iff the largest singular value of ``M`` is below 1."""
    M = np.asarray(M)
    if M.size == 0:
        return True
    G = M.conj().T @ M
    v = np.random.default_rng(0).normal(size=G.shape[0]).astype(G.dtype)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iterations):
        w = G @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return True
        v = w / norm
        if abs(norm - lam) <= tol * max(1.0, norm):
            lam = norm
            break
        lam = norm
    return bool(np.sqrt(lam) < 1.0)


def direct_sum(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = np.zeros(
        (A.shape[0] + B.shape[0], A.shape[1] + B.shape[1]), dtype=np.result_type(A, B)
    )
    out[: A.shape[0], : A.shape[1]] = A
    out[A.shape[0] :, A.shape[1] :] = B
    return out


def _block_order(sizes: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    starts = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    return np.concatenate(
        [np.arange(starts[p], starts[p + 1]) for p in perm] + [np.zeros(0, dtype=int)]
    )


# -- payloads -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SchurTensor:
    """A (prefactor) matrix together with the slot 0-data it lives on."""

    slots: tuple
    matrix: np.ndarray
    prefactor: complex = 1.0
    symmetry: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        M = np.asarray(self.matrix)
        if M.ndim != 2:
            M = M.reshape(self.shape)
        if M.shape != self.shape:
            raise TensorTypeError(f"matrix of shape {M.shape} does not fit slots {self.slots}")
        object.__setattr__(self, "matrix", M)
        if self.symmetry not in ("none", "sym", "anti"):
            raise TensorTypeError(f"unknown symmetry tag {self.symmetry!r}")
        if self.symmetry != "none" and M.size:
            sign = 1 if self.symmetry == "sym" else -1
            scale = max(1.0, float(np.max(np.abs(M))))
            if np.max(np.abs(M - sign * M.T)) > SYMMETRY_TOL * scale:
                word = "symmetric" if sign == 1 else "antisymmetric"
                raise TensorTypeError(f"matrix is not {word}")

    @property
    def rect(self) -> bool:
        return bool(self.slots) and isinstance(self.slots[0], tuple)

    @property
    def shape(self) -> tuple:
        if not self.slots:
            return (0, 0)
        if isinstance(self.slots[0], tuple):
            return (sum(s[0] for s in self.slots), sum(s[1] for s in self.slots))
        n = sum(self.slots)
        return (n, n)


def s_direct_sum(A: SchurTensor, B: SchurTensor) -> SchurTensor:
    if A.symmetry != B.symmetry:
        raise TensorTypeError("cannot combine payloads with different symmetry tags")
    if A.slots and B.slots and A.rect != B.rect:
        raise TensorTypeError("cannot combine rectangular and square payloads")
    return SchurTensor(
        A.slots + B.slots, direct_sum(A.matrix, B.matrix), A.prefactor * B.prefactor, A.symmetry
    )


class _SchurBase(TensorType):
    has_dual = False
    # a self-contracted identity eliminates a zero block
    loops_evaluable = False
    prefactor_modes = ("none", "det")

    def __init__(self, ring: ScalarRing, prefactor_mode: str):
        if ring not in (REAL, COMPLEX):
            raise TensorTypeError(f"Schur tensors need f64 or c64 entries, not {ring.name}")
        if prefactor_mode not in self.prefactor_modes:
            raise TensorTypeError(f"prefactor mode {prefactor_mode!r} not available here")
        self.ring = ring
        self.prefactor_mode = prefactor_mode
        self.dtype = ring.dtype

    def _scalar(self, x):
        return complex(x) if self.ring is COMPLEX else float(np.real_if_close(x))

    def deviation(self, A, B):
        if A.slots != B.slots:
            return float("inf")
        d = deviation(A.matrix, B.matrix)
        if self.prefactor_mode != "none":
            d = max(d, deviation(A.prefactor, B.prefactor))
        return d

    def tensor(self, A, B):
        return s_direct_sum(A, B)

    def trivial(self):
        return SchurTensor((), np.zeros((0, 0), dtype=self.dtype), self._scalar(1), self.symmetry)

    def _eliminate(self, M, k, pf_block=False):
        if pf_block:
            r = M.shape[0] - k
            W, _ = schur_complement(M, k)
            return W, pfaffian(M[r:, r:])
        return schur_complement(M, k)

    def _sample_matrix(self, rng, shape, norm=0.5):
        M = self.ring.sample(rng, shape)
        if self.symmetry == "sym":
            M = M + M.T
        elif self.symmetry == "anti":
            M = M - M.T
        if M.size:
            s = np.linalg.norm(M, 2)
            if s > 0:
                M = M * (norm * rng.uniform(0.2, 1.0) / s)
        return M

    def _prefactor_sample(self, rng):
        if self.prefactor_mode == "none":
            return self._scalar(1)
        return self._scalar(self.ring.sample(rng, ()) + 2.0)

    def tensor_to_literal(self, A):
        def enc(x):
            return [float(x.real), float(x.imag)] if self.ring is COMPLEX else float(x)

        return {
            "matrix": [[enc(x) for x in row] for row in A.matrix],
            "prefactor": enc(np.asarray(A.prefactor, dtype=self.dtype).item()),
        }

    def _decode_matrix(self, data, shape):
        if not isinstance(data, dict) or "matrix" not in data:
            raise TensorTypeError('Schur payload must be {"matrix": [[...]], "prefactor": x}')

        def dec(x):
            if isinstance(x, list):
                if self.ring is not COMPLEX or len(x) != 2:
                    raise TensorTypeError("complex entries are [re, im] pairs over c64")
                return complex(x[0], x[1])
            return x

        rows = data["matrix"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise TensorTypeError("matrix must be a list of rows")
        M = np.array([[dec(x) for x in r] for r in rows], dtype=self.dtype)
        if shape[0] == 0 or shape[1] == 0:
            M = np.zeros(shape, dtype=self.dtype)
        if M.shape != shape:
            raise TensorTypeError(f"matrix of shape {M.shape} does not fit 0-data ({shape})")
        pref = dec(data.get("prefactor", 1.0))
        return M, self._scalar(pref)


class SchurRectType(_SchurBase):
    """Rectangular Schur-complement tensors with parameters ``u = (u0, u1)``."""

    has_dual = True
    symmetry = "none"

    def __init__(self, u=(1.0, 1.0), ring: ScalarRing = REAL, prefactor_mode: str = "none"):
        super().__init__(ring, prefactor_mode)
        u0, u1 = u
        if u0 == 0 or u1 == 0:
            raise TensorTypeError("rectangular Schur tensors need u0, u1 != 0")
        self.u = (self._scalar(u0), self._scalar(u1))
        self.symmetric_contraction = self.symmetric_identity = self.u[0] == self.u[1]
        self.name = f"schur-rect{list(self.u)}/{prefactor_mode}"

    @property
    def unit(self):
        return (0, 0)

    def product(self, a, b):
        return (a[0] + b[0], a[1] + b[1])

    def dual(self, a):
        return (a[1], a[0])

    def permute(self, A, perm):
        perm = tuple(perm)
        if sorted(perm) != list(range(len(A.slots))):
            raise TensorTypeError(f"invalid permutation {perm}")
        rows = _block_order([s[0] for s in A.slots], perm)
        cols = _block_order([s[1] for s in A.slots], perm)
        M = A.matrix[np.ix_(rows, cols)]
        return SchurTensor([A.slots[p] for p in perm], M, A.prefactor)

    def contract(self, A):
        if len(A.slots) < 2:
            raise TensorTypeError("contraction needs two slots")
        x, y = A.slots[-2], A.slots[-1]
        if y != self.dual(x):
            raise TensorTypeError(f"cannot contract {x} with {y}: not dual")
        c, d = x
        M = A.matrix.astype(np.result_type(A.matrix, self.dtype), copy=True)
        r0, q0 = M.shape[0] - (c + d), M.shape[1] - (c + d)
        u0, u1 = self.u
        for k in range(c):  # x_in k <-> y_out k
            M[r0 + k, q0 + d + k] -= u0
        for k in range(d):  # y_in k <-> x_out k
            M[r0 + c + k, q0 + k] -= u1
        S, det = schur_complement(M, c + d)
        pref = A.prefactor * det if self.prefactor_mode == "det" else A.prefactor
        return SchurTensor(A.slots[:-2], S, self._scalar(pref))

    def merge(self, A, i):
        s = A.slots
        merged = (s[i][0] + s[i + 1][0], s[i][1] + s[i + 1][1])
        return SchurTensor(s[:i] + (merged,) + s[i + 2 :], A.matrix, A.prefactor)

    def split(self, A, i, a, b):
        if self.product(a, b) != A.slots[i]:
            raise TensorTypeError(f"cannot split {A.slots[i]} into {a} and {b}")
        return SchurTensor(A.slots[:i] + (a, b) + A.slots[i + 1 :], A.matrix, A.prefactor)

    def merge_dual(self, A, i):
        B = self.merge(A, i)
        if self.prefactor_mode == "det":
            # slots (b*, c*): b* = (b_out, b_in), c* = (c_out, c_in)
            (b_out, b_in), (c_out, c_in) = A.slots[i], A.slots[i + 1]
            if (b_out * c_in + b_in * c_out) % 2:
                B = SchurTensor(B.slots, B.matrix, -B.prefactor)
        return B

    def involutor(self, A, i):
        """Rescale slot ``i``: in-rows by ``u0/u1``, out-columns by ``u1/u0``."""
        u0, u1 = self.u
        if u0 == u1:
            return A
        lam = u0 / u1
        M = A.matrix.astype(np.result_type(A.matrix, self.dtype), copy=True)
        r = sum(s[0] for s in A.slots[:i])
        c = sum(s[1] for s in A.slots[:i])
        M[r : r + A.slots[i][0], :] *= lam
        M[:, c : c + A.slots[i][1]] /= lam
        pref = A.prefactor
        if self.prefactor_mode == "det":
            pref = pref * lam ** (A.slots[i][1] - A.slots[i][0])
        return SchurTensor(A.slots, M, self._scalar(pref))

    def identity(self, a):
        n_in, n_out = a
        u0, u1 = self.u
        # slots (a*, a): rows (a_out modes, a_in modes), cols (a_in modes, a_out modes)
        M = np.zeros((n_out + n_in, n_in + n_out), dtype=self.dtype)
        M[:n_out, n_in:] = u1 * np.eye(n_out)
        M[n_out:, :n_in] = u0 * np.eye(n_in)
        pref = 1.0
        if self.prefactor_mode == "det":
            # cancels det of the eliminated block when the identity is used
            sign = -1 if (n_in * n_out + n_in + n_out) % 2 else 1
            pref = sign / (u0**n_in * u1**n_out)
        return SchurTensor([self.dual(a), a], M, self._scalar(pref))

    def random_zero(self, rng, budget=4):
        n_in = int(rng.integers(0, budget // 2 + 1))
        n_out = int(rng.integers(0, budget // 2 + 1))
        return (n_in, n_out)

    def random_tensor(self, slots, rng):
        slots = tuple(slots)
        shape = (sum(s[0] for s in slots), sum(s[1] for s in slots))
        return SchurTensor(slots, self._sample_matrix(rng, shape), self._prefactor_sample(rng))

    def cost(self, slots):
        return float(sum(s[0] + s[1] for s in slots))

    def zero_from_literal(self, lit):
        if (
            not isinstance(lit, list)
            or len(lit) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) and x >= 0 for x in lit)
        ):
            raise TensorTypeError(f"rectangular 0-data must be [n_in, n_out], got {lit!r}")
        return (lit[0], lit[1])

    def zero_to_literal(self, a):
        return [int(a[0]), int(a[1])]

    def tensor_from_literal(self, slots, data):
        slots = tuple(slots)
        shape = (sum(s[0] for s in slots), sum(s[1] for s in slots))
        M, pref = self._decode_matrix(data, shape)
        return SchurTensor(slots, M, pref)


class SchurSquareType(_SchurBase):
    """Square Schur-complement tensors with a 2x2 parameter matrix ``u``."""

    prefactor_modes = ("none", "det", "pfaffian")

    def __init__(
        self,
        u=((0.0, 1.0), (1.0, 0.0)),
        symmetry: str = "none",
        ring: ScalarRing = REAL,
        prefactor_mode: str = "none",
    ):
        super().__init__(ring, prefactor_mode)
        u = np.asarray(u, dtype=self.dtype)
        if u.shape != (2, 2):
            raise TensorTypeError("u must be a 2x2 matrix")
        if symmetry == "sym" and u[0, 1] != u[1, 0]:
            raise TensorTypeError("symmetric tensors need u01 == u10")
        if symmetry == "anti" and (u[0, 0] != 0 or u[1, 1] != 0 or u[0, 1] != -u[1, 0]):
            raise TensorTypeError("antisymmetric tensors need u = [[0, a], [-a, 0]]")
        if symmetry not in ("none", "sym", "anti"):
            raise TensorTypeError(f"unknown symmetry {symmetry!r}")
        if prefactor_mode == "pfaffian" and symmetry != "anti":
            raise TensorTypeError("Pfaffian prefactors need antisymmetric tensors")
        self.u = u
        self.symmetry = symmetry
        self.symmetric_contraction = self.symmetric_identity = bool(
            u[0, 0] == u[1, 1] and u[0, 1] == u[1, 0]
        )
        self.has_identity = bool(abs(np.linalg.det(u)) > 0)
        self.name = f"schur-square{u.tolist()}/{symmetry}/{prefactor_mode}"

    @property
    def unit(self):
        return 0

    def product(self, a, b):
        return a + b

    def permute(self, A, perm):
        perm = tuple(perm)
        if sorted(perm) != list(range(len(A.slots))):
            raise TensorTypeError(f"invalid permutation {perm}")
        idx = _block_order(A.slots, perm)
        return SchurTensor([A.slots[p] for p in perm], A.matrix[np.ix_(idx, idx)], A.prefactor, A.symmetry)

    def contract(self, A):
        if len(A.slots) < 2:
            raise TensorTypeError("contraction needs two slots")
        n = A.slots[-1]
        if A.slots[-2] != n:
            raise TensorTypeError(f"cannot contract {A.slots[-2]} modes with {n}")
        M = A.matrix.astype(np.result_type(A.matrix, self.dtype), copy=True)
        r = M.shape[0] - 2 * n
        M[r:, r:] -= np.kron(self.u, np.eye(n))
        if self.prefactor_mode == "pfaffian":
            pf = pfaffian(M[r:, r:])
            S, _ = schur_complement(M, 2 * n)
            pref = A.prefactor * pf
        else:
            S, det = schur_complement(M, 2 * n)
            pref = A.prefactor * det if self.prefactor_mode == "det" else A.prefactor
        if self.symmetry != "none":
            sign = 1 if self.symmetry == "sym" else -1
            S = (S + sign * S.T) / 2
        return SchurTensor(A.slots[:-2], S, self._scalar(pref), self.symmetry)

    def merge(self, A, i):
        s = A.slots
        return SchurTensor(s[:i] + (s[i] + s[i + 1],) + s[i + 2 :], A.matrix, A.prefactor, A.symmetry)

    def split(self, A, i, a, b):
        if a + b != A.slots[i]:
            raise TensorTypeError(f"cannot split {A.slots[i]} modes into {a}+{b}")
        return SchurTensor(A.slots[:i] + (a, b) + A.slots[i + 1 :], A.matrix, A.prefactor, A.symmetry)

    def merge_dual(self, A, i):
        B = self.merge(A, i)
        if self.prefactor_mode == "pfaffian" and (A.slots[i] * A.slots[i + 1]) % 2:
            B = SchurTensor(B.slots, B.matrix, -B.prefactor, B.symmetry)
        return B

    def involutor(self, A, i):
        """Rescale slot ``i``: rows by ``u10/u01``, columns by ``u01/u10``.

        Only available when the contraction is symmetric (then trivial) or
        ``u`` is off-diagonal.
        """
        if self.symmetric_contraction:
            return A
        u = self.u
        if u[0, 0] != 0 or u[1, 1] != 0:
            raise TensorTypeError("dual involutor only implemented for off-diagonal u")
        lam = u[1, 0] / u[0, 1]
        M = A.matrix.astype(np.result_type(A.matrix, self.dtype), copy=True)
        r = sum(A.slots[:i])
        M[r : r + A.slots[i], :] *= lam
        M[:, r : r + A.slots[i]] /= lam
        return SchurTensor(A.slots, M, A.prefactor, A.symmetry)

    def identity(self, a):
        if not self.has_identity:
            raise TensorTypeError("u is singular: this type has no identity tensor")
        M = np.kron(self.u[::-1, ::-1], np.eye(a))
        pref = 1.0
        if self.prefactor_mode == "det":
            pref = 1 / (-self.u[0, 1] * self.u[1, 0]) ** a
        elif self.prefactor_mode == "pfaffian":
            pref = (-1) ** (a * (a + 1) // 2) / self.u[0, 1] ** a
        return SchurTensor([a, a], M, self._scalar(pref), self.symmetry)

    def random_zero(self, rng, budget=4):
        return int(rng.integers(0, budget + 1))

    def random_tensor(self, slots, rng):
        slots = tuple(slots)
        n = sum(slots)
        return SchurTensor(slots, self._sample_matrix(rng, (n, n)), self._prefactor_sample(rng), self.symmetry)

    def cost(self, slots):
        return float(sum(slots))

    def zero_from_literal(self, lit):
        if not isinstance(lit, int) or isinstance(lit, bool) or lit < 0:
            raise TensorTypeError(f"square 0-data must be a non-negative int, got {lit!r}")
        return lit

    def zero_to_literal(self, a):
        return int(a)

    def tensor_from_literal(self, slots, data):
        n = sum(slots)
        M, pref = self._decode_matrix(data, (n, n))
        return SchurTensor(slots, M, pref, self.symmetry)
