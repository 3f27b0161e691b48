"""Matrix representation of Majorana polynomials on the mode Fock space.

Mode k pairs generators 2k and 2k+1.  Basis states are labelled by the
occupation bitstring n, with bit k (least significant = mode 0) the
occupation of mode k; state vectors are plain numpy complex arrays of
length 2**n_modes.  The encoding is the usual string construction

    c_{2k}   = Z_0 ... Z_{k-1} X_k,
    c_{2k+1} = Z_0 ... Z_{k-1} Y_k,

so every generator, and hence every monomial, is a signed permutation:
exactly one entry per row and column, values in {+-1, +-i} times the
coefficient.  Matrices are assembled by composing bit-flip/phase maps
column by column, never by generic sparse-sparse products.

Dense arrays are only materialized up to ``DENSE_DIM_CAP``; beyond that
callers get matrix-free application (`apply_polynomial`) and the sparse
matvec of `SparseOperator`.
"""

from __future__ import annotations

import struct
import threading

import numpy as np
import scipy.sparse as sp

from .clifford import MajoranaPolynomial, _to_complex

DENSE_DIM_CAP = 4096
DUMP_FORMAT_VERSION = 1

_PHASES = np.array([1.0, 1.0j, -1.0, -1.0j], dtype=np.complex128)


def _bit_parity(x: np.ndarray) -> np.ndarray:
    """Parity of the set bits of each (non-negative int64) entry."""
    x = x.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        x ^= x >> shift
    return x & 1


def monomial_action(indices, n_modes: int):
    """Column action of the ordered product of generators `indices`.

    Returns (perm, phase_exp): basis column n maps to row perm[n] with
    amplitude i**phase_exp[n].  Phases are tracked as exact quarter-turn
    exponents mod 4.
    """
    dim = 1 << n_modes
    state = np.arange(dim, dtype=np.int64)
    exp = np.zeros(dim, dtype=np.int64)
    for i in reversed(list(indices)):  # rightmost factor acts first
        if not 0 <= i < 2 * n_modes:
            raise ValueError(f"generator index {i} outside 0..{2 * n_modes - 1}")
        k, odd = divmod(i, 2)
        low = np.int64((1 << k) - 1)
        exp += 2 * _bit_parity(state & low)  # Z string on modes < k
        if odd:
            # Y_k: |0> -> i|1>, |1> -> -i|0>
            exp += 1 + 2 * ((state >> k) & 1)
        state ^= np.int64(1 << k)
    return state, exp & 3


# Polynomial assembly revisits the same monomial keys constantly (RP
# sampling alone reuses a few thousand keys hundreds of times), so the
# per-key permutation/phase arrays are cached behind a byte budget.
_ACTION_CACHE: dict = {}
_ACTION_CACHE_BUDGET = 1 << 26
_action_cache_bytes = 0
_action_cache_lock = threading.Lock()


def _cached_action(key: tuple, n_modes: int):
    global _action_cache_bytes
    k = (key, n_modes)
    hit = _ACTION_CACHE.get(k)
    if hit is not None:
        return hit
    perm, exp = monomial_action(key, n_modes)
    perm.setflags(write=False)
    exp.setflags(write=False)
    size = perm.nbytes + exp.nbytes
    if size <= _ACTION_CACHE_BUDGET:
        with _action_cache_lock:
            while _ACTION_CACHE and _action_cache_bytes + size > _ACTION_CACHE_BUDGET:
                oldest = next(iter(_ACTION_CACHE))
                p, e = _ACTION_CACHE.pop(oldest)
                _action_cache_bytes -= p.nbytes + e.nbytes
            _ACTION_CACHE[k] = (perm, exp)
            _action_cache_bytes += size
    return perm, exp


class SparseOperator:
    """Sparse matrix wrapper tied to a fixed mode count."""

    __slots__ = ("matrix", "n_modes")

    def __init__(self, matrix: sp.csr_matrix, n_modes: int):
        self.matrix = matrix.tocsr()
        self.n_modes = n_modes
        if self.matrix.shape != (self.dim, self.dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match {self.dim}"
            )

    @property
    def dim(self) -> int:
        return 1 << self.n_modes

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def to_dense(self) -> np.ndarray:
        if self.dim > DENSE_DIM_CAP:
            raise ValueError(
                f"dense form refused: dim {self.dim} exceeds cap {DENSE_DIM_CAP}"
            )
        return self.matrix.toarray()

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.getH()
        return float(np.abs(d.data).max()) if d.nnz else 0.0

    def dump(self, path) -> None:
        """Binary dump: '<3q' header (dim, nnz, format version), then
        row-ordered '<4d' records (row, col, re, im), little endian."""
        m = self.matrix.tocoo()
        order = np.lexsort((m.col, m.row))
        with open(path, "wb") as fh:
            fh.write(struct.pack("<3q", self.dim, m.nnz, DUMP_FORMAT_VERSION))
            rec = np.empty((m.nnz, 4), dtype="<f8")
            rec[:, 0] = m.row[order]
            rec[:, 1] = m.col[order]
            rec[:, 2] = m.data[order].real
            rec[:, 3] = m.data[order].imag
            fh.write(rec.tobytes())

    @classmethod
    def load(cls, path) -> "SparseOperator":
        with open(path, "rb") as fh:
            dim, nnz, version = struct.unpack("<3q", fh.read(24))
            if version != DUMP_FORMAT_VERSION:
                raise ValueError(f"unsupported dump format version {version}")
            rec = np.frombuffer(fh.read(32 * nnz), dtype="<f8").reshape(nnz, 4)
        n_modes = dim.bit_length() - 1
        if 1 << n_modes != dim:
            raise ValueError(f"dump dimension {dim} is not a power of two")
        data = rec[:, 2] + 1j * rec[:, 3]
        rows = rec[:, 0].astype(np.int64)
        cols = rec[:, 1].astype(np.int64)
        m = sp.coo_matrix((data, (rows, cols)), shape=(dim, dim)).tocsr()
        return cls(m, n_modes)


def generator_matrix(i: int, n_modes: int) -> SparseOperator:
    """Signed-permutation matrix of the single generator c_i."""
    perm, exp = monomial_action((i,), n_modes)
    dim = 1 << n_modes
    cols = np.arange(dim, dtype=np.int64)
    m = sp.coo_matrix((_PHASES[exp], (perm, cols)), shape=(dim, dim))
    return SparseOperator(m.tocsr(), n_modes)


def to_matrix(poly: MajoranaPolynomial, n_modes: int) -> SparseOperator:
    """Sparse matrix of a polynomial; term permutations are summed so
    coincident entries accumulate exactly once."""
    dim = 1 << n_modes
    support = poly.support()
    if support and max(support) >= 2 * n_modes:
        raise ValueError(
            f"polynomial touches generator {max(support)}; only {2 * n_modes} exist"
        )
    terms = poly.terms()
    if not terms:
        return SparseOperator(sp.csr_matrix((dim, dim), dtype=np.complex128),
                              n_modes)
    cols = np.arange(dim, dtype=np.int64)
    # group terms by their bit-flip mask: every monomial with the same
    # mask shares its permutation, so values fold into one row block and
    # the COO triple stays at (distinct masks) x dim instead of terms x dim
    by_mask: dict[int, np.ndarray] = {}
    perms: dict[int, np.ndarray] = {}
    for key, coeff in terms.items():
        perm, exp = _cached_action(key, n_modes)
        mask = int(perm[0])  # perm[n] == n ^ mask
        vals = _to_complex(coeff) * _PHASES[exp]
        if mask in by_mask:
            by_mask[mask] += vals
        else:
            by_mask[mask] = vals
            perms[mask] = perm
    rows = np.concatenate([perms[m] for m in by_mask])
    vals = np.concatenate(list(by_mask.values()))
    m = sp.coo_matrix(
        (vals, (rows, np.tile(cols, len(by_mask)))), shape=(dim, dim)
    )
    return SparseOperator(m.tocsr(), n_modes)


def apply_polynomial(poly: MajoranaPolynomial, vec: np.ndarray) -> np.ndarray:
    """Matrix-free action of a polynomial on a state vector.

    Each monomial is a phase-decorated XOR permutation of the basis, so
    the action costs O(terms * dim) with no matrix ever formed.
    """
    dim = len(vec)
    n_modes = dim.bit_length() - 1
    if 1 << n_modes != dim:
        raise ValueError(f"state length {dim} is not a power of two")
    out = np.zeros(dim, dtype=np.complex128)
    for key, coeff in poly.terms().items():
        perm, exp = _cached_action(key, n_modes)
        out[perm] += (_to_complex(coeff) * _PHASES[exp]) * vec
    return out
