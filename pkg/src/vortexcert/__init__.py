"""Certification toolkit for Majorana island lattices.

Builds the island-plaquette Hamiltonian with imaginary bond couplings,
computes exact spectra at desk scale, and certifies the chain

    reflection symmetry -> reflection positivity -> octagon-loop order
        -> +1 vortex-loop expectations in every ground state

with explicit tolerances and machine-readable reports.
"""

__version__ = "0.1.0"

from .clifford import (
    GaussianRational,
    MajoranaPolynomial,
    ReflectionMap,
    anticommutator,
    commutator,
    commutator_is_zero,
    multiply,
    reflect,
)
from .fock import DENSE_DIM_CAP, SparseOperator, apply_polynomial, to_matrix
from .lattice import (
    IslandLattice,
    LatticeError,
    Octagon,
    ReflectionData,
    ReflectionError,
    build_lattice,
    diamond_lattice,
    enumerate_octagons,
    reflection_data,
)
from .model import (
    ModelError,
    ModelParams,
    VortexLoop,
    bond_term,
    build_hamiltonian,
    island_term,
    loop_operator,
    model_manifest,
    parity_operator,
    verify_reflection_symmetry,
    vortex_operator,
)
from .spectral import (
    ConvergenceError,
    DenseCapError,
    GroundSpace,
    IllSeparatedError,
    NonHermitianError,
    SpectralError,
    Spectrum,
    canonical_subspace_basis,
    default_gap_tol,
    dense_spectrum,
    ground_space,
    lanczos_ground,
    rp_functional,
    spectrum_cache_key,
    thermal_expectation,
)
from .verify import (
    CheckReport,
    PositivityResult,
    RPSampleSpec,
    TopoResult,
    check_conservation,
    check_ground_positivity,
    check_rp,
    check_topological_order,
    default_rp_samples,
    rp_sample_polynomials,
    theorem_chain_violations,
    vortex_map,
)

__all__ = [
    "__version__",
    "GaussianRational",
    "MajoranaPolynomial",
    "ReflectionMap",
    "anticommutator",
    "commutator",
    "commutator_is_zero",
    "multiply",
    "reflect",
    "DENSE_DIM_CAP",
    "SparseOperator",
    "apply_polynomial",
    "to_matrix",
    "IslandLattice",
    "LatticeError",
    "Octagon",
    "ReflectionData",
    "ReflectionError",
    "build_lattice",
    "diamond_lattice",
    "enumerate_octagons",
    "reflection_data",
    "ModelError",
    "ModelParams",
    "VortexLoop",
    "bond_term",
    "build_hamiltonian",
    "island_term",
    "loop_operator",
    "model_manifest",
    "parity_operator",
    "verify_reflection_symmetry",
    "vortex_operator",
    "ConvergenceError",
    "DenseCapError",
    "GroundSpace",
    "IllSeparatedError",
    "NonHermitianError",
    "SpectralError",
    "Spectrum",
    "canonical_subspace_basis",
    "default_gap_tol",
    "dense_spectrum",
    "ground_space",
    "lanczos_ground",
    "rp_functional",
    "spectrum_cache_key",
    "thermal_expectation",
    "CheckReport",
    "PositivityResult",
    "RPSampleSpec",
    "TopoResult",
    "check_conservation",
    "check_ground_positivity",
    "check_rp",
    "check_topological_order",
    "default_rp_samples",
    "rp_sample_polynomials",
    "theorem_chain_violations",
    "vortex_map",
]
