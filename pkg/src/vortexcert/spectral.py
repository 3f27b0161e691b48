"""Spectra, ground spaces and thermal functionals.

Dense eigendecomposition is used up to DENSE_CAP; above that a
restarted, fully reorthogonalized Lanczos iteration with sequential
deflation finds the low end of the spectrum.  Ground-space bases are
made deterministic by re-orthogonalizing coordinate projections in a
fixed pivot order, so reports do not depend on eigensolver gauge.

Thermal quantities always shift energies by E0 before exponentiating;
beta can then be large without overflow.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .clifford import MajoranaPolynomial, multiply, reflect
from .fock import DENSE_DIM_CAP, SparseOperator, to_matrix
from .lattice import ReflectionData

DENSE_CAP = DENSE_DIM_CAP
# bump when the Majorana-to-matrix convention changes; keys the eigenvalue cache
REPRESENTATION_VERSION = 1

HERMITICITY_TOL = 1e-12


class SpectralError(RuntimeError):
    pass


class DenseCapError(SpectralError):
    """Operator dimension exceeds what dense routines will touch."""


class NonHermitianError(SpectralError):
    pass


class IllSeparatedError(SpectralError):
    """Spectrum has weight within a decade of the clustering cut."""


class ConvergenceError(SpectralError):
    pass


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # orthonormal columns

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]


@dataclass(frozen=True)
class GroundSpace:
    e0: float
    basis: np.ndarray  # dim x N orthonormal columns, deterministic gauge
    gap_tol: float

    @property
    def n(self) -> int:
        return self.basis.shape[1]


def default_gap_tol(e0: float) -> float:
    return 1e-8 * max(1.0, abs(e0))


def dense_spectrum(op: SparseOperator) -> Spectrum:
    if op.dim > DENSE_CAP:
        raise DenseCapError(f"dim {op.dim} exceeds the dense cap {DENSE_CAP}")
    defect = op.hermiticity_defect()
    if defect > HERMITICITY_TOL:
        raise NonHermitianError(f"hermiticity defect {defect:.3e}")
    w, v = np.linalg.eigh(op.to_dense())
    return Spectrum(eigenvalues=w, eigenvectors=v)


def _cluster_count(values: np.ndarray, gap_tol: float) -> int:
    """Size of the ground cluster; rejects a cut with nearby weight.

    An eigenvalue whose offset from E0 lies within a decade of gap_tol
    on either side makes the cluster boundary ambiguous.
    """
    rel = values - values[0]
    ambiguous = (rel > gap_tol / 10) & (rel <= 10 * gap_tol)
    if ambiguous.any():
        worst = float(rel[ambiguous][0])
        raise IllSeparatedError(
            f"eigenvalue at E0 + {worst:.3e} is within a decade of "
            f"gap_tol = {gap_tol:.3e}; choose a different tolerance"
        )
    return int((rel <= gap_tol).sum())


def canonical_subspace_basis(basis: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(columns).

    Projects coordinate vectors e_0, e_1, ... into the subspace,
    Gram-Schmidts them in that fixed order, keeps the ones with
    non-negligible residual, and fixes each phase by making the lowest
    non-negligible amplitude real positive.  Depends only on the
    subspace, not on the gauge of the input columns.
    """
    q, _ = np.linalg.qr(basis)
    dim, n = q.shape
    coeffs: list[np.ndarray] = []
    out: list[np.ndarray] = []
    for i in range(dim):
        c = q[i, :].conj().copy()
        for a in coeffs:
            c -= a * (a.conj() @ c)
        nrm = np.linalg.norm(c)
        if nrm <= 1e-8:
            continue
        c /= nrm
        coeffs.append(c)
        v = q @ c
        j = int(np.argmax(np.abs(v) > 1e-10))
        v *= v[j].conjugate() / abs(v[j])
        out.append(v)
        if len(out) == n:
            break
    if len(out) != n:
        raise SpectralError("could not pivot a full basis; subspace degenerate?")
    return np.column_stack(out)


def ground_space(op, gap_tol: float | None = None) -> GroundSpace:
    """Ground cluster of a Hermitian operator (dense route).

    Accepts a SparseOperator or a precomputed Spectrum.  The cluster is
    {E : E - E0 <= gap_tol}; a spectrum with weight within a decade of
    the cut raises IllSeparatedError rather than guessing.
    """
    spec = op if isinstance(op, Spectrum) else dense_spectrum(op)
    e0 = float(spec.eigenvalues[0])
    if gap_tol is None:
        gap_tol = default_gap_tol(e0)
    n = _cluster_count(spec.eigenvalues, gap_tol)
    basis = canonical_subspace_basis(spec.eigenvectors[:, :n])
    return GroundSpace(e0=e0, basis=basis, gap_tol=gap_tol)


# ---------------------------------------------------------------------------
# Lanczos beyond the dense cap

def _lowest_eigenpair(apply, dim, rng, deflate, conv_tol, max_matvecs, window):
    """One converged lowest eigenpair, orthogonal to `deflate` columns.

    Thick-restart Lanczos with full reorthogonalization: the small
    projected matrix is accumulated exactly (Rayleigh-Ritz), restarts
    keep the lowest Ritz vectors plus the running residual direction.
    """
    window = max(8, min(window, dim))
    keep = min(10, window - 2)
    d = np.column_stack(deflate) if deflate else None

    def dproj(w):
        if d is not None:
            w -= d @ (d.conj().T @ w)
            w -= d @ (d.conj().T @ w)
        return w

    q = np.empty((dim, window), dtype=np.complex128)
    t = np.zeros((window, window), dtype=np.complex128)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v = dproj(v)
    q[:, 0] = v / np.linalg.norm(v)
    j = 1
    matvecs = 0
    best_res = np.inf

    while matvecs < max_matvecs:
        w = apply(q[:, j - 1])
        matvecs += 1
        w = dproj(w)
        h = q[:, :j].conj().T @ w
        w = w - q[:, :j] @ h
        h2 = q[:, :j].conj().T @ w
        w = w - q[:, :j] @ h2
        h += h2
        t[: j, j - 1] = h
        t[j - 1, : j] = h.conj()
        beta = np.linalg.norm(w)

        theta, s = np.linalg.eigh(t[:j, :j])
        res = beta * abs(s[j - 1, 0])
        best_res = min(best_res, res)
        if res <= conv_tol * max(1.0, abs(theta[0])):
            # estimate says converged; accept only if the true residual agrees
            y = q[:, :j] @ s[:, 0]
            y = dproj(y)
            y /= np.linalg.norm(y)
            hy = apply(y)
            matvecs += 1
            val = float(np.vdot(y, hy).real)
            true_res = float(np.linalg.norm(hy - val * y))
            if true_res <= 100 * conv_tol * max(1.0, abs(val)):
                return val, y, true_res, matvecs

        if beta < 1e-13:
            # invariant subspace; inject a fresh direction (couplings to it
            # vanish exactly, so leaving t untouched is correct)
            v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            v = dproj(v)
            v -= q[:, :j] @ (q[:, :j].conj().T @ v)
            nrm = np.linalg.norm(v)
            if nrm < 1e-10 or j >= window:
                # nothing left to explore at this dimension
                y = q[:, :j] @ s[:, 0]
                val = float(theta[0])
                return val, y, res, matvecs
            q[:, j] = v / nrm
            j += 1
            continue

        if j == window:
            # thick restart: lowest `keep` Ritz pairs plus the residual
            y = q[:, :j] @ s[:, :keep]
            q[:, :keep] = y
            t[:, :] = 0
            t[np.arange(keep), np.arange(keep)] = theta[:keep]
            arrow = beta * s[j - 1, :keep]
            t[keep, :keep] = arrow
            t[:keep, keep] = arrow.conj()
            q[:, keep] = w / beta
            j = keep + 1
        else:
            q[:, j] = w / beta
            j += 1

    raise ConvergenceError(
        f"no eigenpair after {matvecs} products; best residual {best_res:.3e}"
    )


def lanczos_ground(op: SparseOperator, k: int = 3, seed: int = 0,
                   gap_tol: float | None = None, conv_tol: float = 1e-9,
                   max_matvecs: int = 60000, window: int = 64) -> GroundSpace:
    """Ground cluster via deflated Lanczos; k must exceed the degeneracy.

    Finds the k lowest eigenpairs one at a time, deflating each
    converged vector, then clusters exactly as ground_space does.  If
    every found eigenvalue fits inside the cluster the degeneracy may
    exceed k, so that is an error: request a larger k.
    """
    if k < 1 or k > op.dim:
        raise ValueError(f"k must be in 1..{op.dim}")
    rng = np.random.default_rng(seed)
    vals: list[float] = []
    vecs: list[np.ndarray] = []
    budget = max_matvecs
    for _ in range(k):
        val, vec, _res, used = _lowest_eigenpair(
            op.apply, op.dim, rng, vecs, conv_tol, budget, window)
        budget -= used
        vals.append(val)
        vecs.append(vec)
    order = np.argsort(vals)
    values = np.array([vals[i] for i in order])
    columns = [vecs[i] for i in order]
    e0 = float(values[0])
    if gap_tol is None:
        gap_tol = default_gap_tol(e0)
    n = _cluster_count(values, gap_tol)
    if n == k and k < op.dim:
        raise ConvergenceError(
            f"all {k} eigenvalues fall in the ground cluster; the degeneracy "
            f"may be larger, request k > {k}"
        )
    basis = canonical_subspace_basis(np.column_stack(columns[:n]))
    return GroundSpace(e0=e0, basis=basis, gap_tol=gap_tol)


# ---------------------------------------------------------------------------
# Thermal functionals (dense only: positivity must be resolved to 1e-9,
# which stochastic trace estimators cannot do at desk effort)

def _as_spectrum(h) -> Spectrum:
    if isinstance(h, Spectrum):
        return h
    return dense_spectrum(h)


def thermal_expectation(o: SparseOperator, h, beta: float) -> complex:
    """<O> in the thermal state e^{-beta H} / Z, energies shifted by E0."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    spec = _as_spectrum(h)
    if o.dim != spec.dim:
        raise ValueError("operator and Hamiltonian dimensions differ")
    weights = np.exp(-beta * (spec.eigenvalues - spec.eigenvalues[0]))
    ov = o.matrix @ spec.eigenvectors
    diag = np.einsum("ij,ij->j", spec.eigenvectors.conj(), ov)
    return complex((weights * diag).sum() / weights.sum())


def rp_functional(a: MajoranaPolynomial, r: ReflectionData, h, beta: float) -> complex:
    """Tr(A theta(A) e^{-beta H}) / Tr(e^{-beta H}).

    A must be supported on Lambda_minus; the theorem under test says the
    real part is >= 0, and the imaginary part is returned for the caller
    to report rather than assumed to vanish.
    """
    allowed = set(r.left)
    stray = [i for i in a.support() if i not in allowed]
    if stray:
        raise ValueError(
            f"A touches {stray}: not in the Lambda_minus algebra of this mirror"
        )
    spec = _as_spectrum(h)
    n_modes = spec.dim.bit_length() - 1
    w_a = multiply(a, reflect(a, r.sigma))
    return thermal_expectation(to_matrix(w_a, n_modes), spec, beta)


# ---------------------------------------------------------------------------
# Eigenvalue cache plumbing

def spectrum_cache_key(lattice_hash: str, lam: float,
                       version: int = REPRESENTATION_VERSION) -> str:
    payload = f"{lattice_hash}:{float(lam)!r}:{version}"
    return hashlib.sha256(payload.encode()).hexdigest()


def save_eigenvalues(path, values) -> None:
    np.asarray(values, dtype="<f8").tofile(path)


def load_eigenvalues(path) -> np.ndarray:
    return np.fromfile(path, dtype="<f8")
