"""The certification checks.

Each check measures one link of the chain

    reflection symmetry -> reflection positivity -> topological order
    -> vortex-loop expectations +1 in every ground state

and returns either a CheckReport (self-contained, re-runnable from its
witness) or a small result tuple the frontend wraps into one.

Sampling policy for reflection positivity: exhaustive even monomials to
degree 4 on Lambda_minus plus seeded random even polynomials with
unit-disk coefficients.  Odd elements are measured in a separate report
that is never asserted: the positivity literature is written for the
even case and we refuse to hard-fail on a case left implicit.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import __version__
from .clifford import MajoranaPolynomial, commutator
from .fock import SparseOperator, to_matrix
from .lattice import IslandLattice, ReflectionData
from .model import (
    build_hamiltonian,
    parity_operator,
    vortex_operator,
)
from .spectral import (
    GroundSpace,
    Spectrum,
    dense_spectrum,
    rp_functional,
)

DEFAULT_RP_TOL = 1e-9
DEFAULT_TOPO_TOL = 1e-8
DEFAULT_POS_TOL = 1e-8
DEFAULT_CLASS_TOL = 1e-6


@dataclass(frozen=True)
class RPSampleSpec:
    """One family of trial elements A drawn from the Lambda_minus algebra."""

    mode: str  # "exhaustive-monomials" | "random-polynomials"
    max_degree: int = 4
    count: int = 100
    seed: int = 0
    parity: str = "even"  # even | odd | both

    def __post_init__(self):
        if self.mode not in ("exhaustive-monomials", "random-polynomials"):
            raise ValueError(f"unknown sample mode {self.mode!r}")
        if self.parity not in ("even", "odd", "both"):
            raise ValueError(f"unknown parity filter {self.parity!r}")
        if self.max_degree < 0 or self.count < 0:
            raise ValueError("max_degree and count must be >= 0")


def default_rp_samples(seed: int = 0) -> tuple[RPSampleSpec, RPSampleSpec]:
    return (
        RPSampleSpec(mode="exhaustive-monomials", max_degree=4, parity="even"),
        RPSampleSpec(mode="random-polynomials", max_degree=4, count=100,
                     seed=seed, parity="even"),
    )


def _degree_basis(indices: tuple[int, ...], max_degree: int, parity: str):
    """All monomial keys over `indices` passing the degree parity filter."""
    want = {"even": 0, "odd": 1}.get(parity)
    for deg in range(max_degree + 1):
        if want is not None and deg % 2 != want:
            continue
        yield from itertools.combinations(sorted(indices), deg)


def _sample_witness(key: str, a) -> str:
    """Sample id plus a bounded rendering; the key and seed pin the
    polynomial exactly, so huge renders add nothing."""
    text = a.render()
    if len(text) > 160:
        text = f"{text[:157]}... ({len(a)} terms)"
    return f"{key} A = {text}"


def rp_sample_polynomials(spec: RPSampleSpec, indices,
                          tag: str = "") -> list[tuple[str, MajoranaPolynomial]]:
    """Deterministic (key, A) list for one sample spec."""
    indices = tuple(sorted(indices))
    basis = list(_degree_basis(indices, spec.max_degree, spec.parity))
    out = []
    if spec.mode == "exhaustive-monomials":
        for key in basis:
            label = "m{}:{}".format(tag, ",".join(map(str, key)))
            out.append((label, MajoranaPolynomial.monomial(key, 1.0)))
        return out
    rng = np.random.default_rng(spec.seed)
    for n in range(spec.count):
        poly = MajoranaPolynomial.zero()
        for key in basis:
            # uniform on the complex unit disk
            radius = np.sqrt(rng.uniform())
            angle = 2 * np.pi * rng.uniform()
            coeff = complex(radius * np.cos(angle), radius * np.sin(angle))
            poly = poly + MajoranaPolynomial.monomial(key, coeff)
        out.append((f"r{tag}:{n:04d}", poly))
    return out


@dataclass(frozen=True)
class CheckReport:
    check: str
    lattice: str  # content hash
    params: dict
    tolerances: dict
    verdict: str  # pass | fail | skipped
    worst: dict | None
    timing_ms: float | None
    version: str = __version__

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self, include_timing: bool = True) -> dict:
        d = {
            "check": self.check,
            "lattice": self.lattice,
            "params": dict(self.params),
            "tolerances": dict(self.tolerances),
            "verdict": self.verdict,
            "worst": dict(self.worst) if self.worst is not None else None,
            "timing_ms": self.timing_ms if include_timing else None,
            "version": self.version,
        }
        return d


def check_rp(lat: IslandLattice, r: ReflectionData, lam: float, beta: float,
             specs=None, tol: float = DEFAULT_RP_TOL,
             spectrum: Spectrum | None = None, name: str = "rp",
             seed: int = 0) -> CheckReport:
    """Sample Tr(A theta(A) e^{-beta H})/Z over A in the Lambda_minus algebra.

    Pass iff the minimum real part stays above -tol and every imaginary
    part stays within tol.  The worst sample is serialized in canonical
    text, so a failure is a standalone regression case.
    """
    t0 = time.perf_counter()
    if specs is None:
        specs = default_rp_samples(seed)
    if isinstance(specs, RPSampleSpec):
        specs = (specs,)
    if spectrum is None:
        h = build_hamiltonian(lat, lam)
        spectrum = dense_spectrum(to_matrix(h, lat.n_modes))

    samples: list[tuple[str, MajoranaPolynomial]] = []
    for k, sp in enumerate(specs):
        samples.extend(rp_sample_polynomials(sp, r.left, tag=str(k) if k else ""))
    samples.sort(key=lambda kv: kv[0])

    values = []
    for key, a in samples:
        val = rp_functional(a, r, spectrum, beta)
        values.append((key, a, val))

    min_re = min(values, key=lambda kav: kav[2].real)
    max_im = max(values, key=lambda kav: abs(kav[2].imag))
    ok = min_re[2].real >= -tol and abs(max_im[2].imag) <= tol
    worst = min_re if (min_re[2].real < -tol or abs(max_im[2].imag) <= tol) else max_im
    seeds = [sp.seed for sp in specs if sp.mode == "random-polynomials"]
    return CheckReport(
        check=name,
        lattice=lat.content_hash(),
        params={"lambda": float(lam), "beta": float(beta),
                "seed": seeds[0] if seeds else None},
        tolerances={"rp": tol},
        verdict="pass" if ok else "fail",
        worst={
            "value_re": float(worst[2].real),
            "value_im": float(worst[2].imag),
            "witness": _sample_witness(worst[0], worst[1]),
        },
        timing_ms=1e3 * (time.perf_counter() - t0),
        version=__version__,
    )


class TopoResult(NamedTuple):
    alpha: float
    deviation: float
    verdict: str


def check_topological_order(ground: GroundSpace, w: SparseOperator,
                            tol: float = DEFAULT_TOPO_TOL) -> TopoResult:
    """Is P W P a scalar multiple of P on the ground projector?

    alpha is the mean diagonal expectation; the deviation is the
    Frobenius norm of <mu|W|nu> - alpha*delta over the ground basis.
    """
    m = ground.basis.conj().T @ (w.matrix @ ground.basis)
    n = ground.n
    alpha = float(np.trace(m).real) / n
    deviation = float(np.linalg.norm(m - alpha * np.eye(n)))
    return TopoResult(alpha=alpha, deviation=deviation,
                      verdict="pass" if deviation <= tol else "fail")


class PositivityResult(NamedTuple):
    minimum: float
    spread: float
    max_imag: float
    verdict: str


def check_ground_positivity(ground: GroundSpace, w_a: SparseOperator,
                            tol: float = DEFAULT_POS_TOL) -> PositivityResult:
    """Minimum of <Omega^mu, W_A Omega^mu> over the ground basis.

    Pass iff the minimum real part is >= -tol.  The spread max-min is
    reported as well: under topological order it should vanish.
    """
    ov = w_a.matrix @ ground.basis
    diag = np.einsum("ij,ij->j", ground.basis.conj(), ov)
    minimum = float(diag.real.min())
    spread = float(diag.real.max() - diag.real.min())
    max_imag = float(np.abs(diag.imag).max())
    return PositivityResult(minimum=minimum, spread=spread, max_imag=max_imag,
                            verdict="pass" if minimum >= -tol else "fail")


def vortex_map(lat: IslandLattice, ground: GroundSpace,
               tol: float = DEFAULT_CLASS_TOL) -> dict:
    """Classify every octagon by its ground-space vortex expectation."""
    out = {}
    for o in lat.octagons:
        w = to_matrix(vortex_operator(lat, o).W, lat.n_modes)
        ov = w.matrix @ ground.basis
        diag = np.einsum("ij,ij->j", ground.basis.conj(), ov)
        alpha = float(diag.real.mean())
        out[o.center] = {"alpha": alpha, "classification": _classify(alpha, tol)}
    return out


def _classify(alpha: float, tol: float) -> str:
    if alpha >= 1 - tol:
        return "vortex-free"
    if alpha <= -1 + tol:
        return "vortex-full"
    if alpha > tol:
        return "partially-free"
    if alpha < -tol:
        return "partially-full"
    return "undetermined"


def check_conservation(lat: IslandLattice, lam) -> CheckReport:
    """[W, H] = 0 for every octagon, decided in exact arithmetic.

    The total fermion parity is checked alongside under the witness key
    "parity"; it commutes for the same structural reason.
    """
    t0 = time.perf_counter()
    h = build_hamiltonian(lat, lam, exact=True)
    worst = None
    for o in lat.octagons:
        w = vortex_operator(lat, o).W
        c = commutator(w, h)
        if not c.is_zero:
            worst = {
                "value_re": c.max_abs_coeff(),
                "value_im": 0.0,
                "witness": f"octagon {o.center}: [W,H] = {c.render()}",
            }
            break
    if worst is None:
        c = commutator(parity_operator(lat), h)
        if not c.is_zero:
            worst = {
                "value_re": c.max_abs_coeff(),
                "value_im": 0.0,
                "witness": f"parity: [P,H] = {c.render()}",
            }
    return CheckReport(
        check="conservation",
        lattice=lat.content_hash(),
        params={"lambda": float(lam), "beta": None, "seed": None},
        tolerances={},  # exact decision, no tolerance involved
        verdict="pass" if worst is None else "fail",
        worst=worst,
        timing_ms=1e3 * (time.perf_counter() - t0),
        version=__version__,
    )


def theorem_chain_violations(rp_passed: bool | None,
                             conservation_passed: bool | None,
                             topo: TopoResult | None,
                             pos: PositivityResult | None,
                             topo_tol: float = DEFAULT_TOPO_TOL,
                             pos_tol: float = DEFAULT_POS_TOL) -> list[str]:
    """Cross-check the implications the theorem chain promises.

    Any returned string is an internal inconsistency (a bug or a
    counterexample), not a mere check failure.  Checks that did not run
    are passed as None and the implications involving them are skipped.
    """
    bad = []
    if rp_passed and topo is not None and topo.verdict == "pass" and pos is not None:
        if pos.minimum < -pos_tol:
            bad.append(
                f"RP and topological order hold but min expectation "
                f"{pos.minimum:.3e} < -{pos_tol:.1e}"
            )
    if (conservation_passed and topo is not None and topo.verdict == "pass"
            and pos is not None and pos.verdict == "pass"):
        if abs(topo.alpha - 1.0) > topo_tol:
            bad.append(
                f"conservation + order + positivity force alpha = +1, "
                f"got {topo.alpha!r}"
            )
    if topo is not None and topo.verdict == "pass" and pos is not None:
        # each diagonal deviates from alpha by at most the Frobenius deviation
        if pos.spread > 2 * topo_tol:
            bad.append(
                f"diagonal spread {pos.spread:.3e} despite deviation "
                f"{topo.deviation:.3e} <= {topo_tol:.1e}"
            )
    return bad
