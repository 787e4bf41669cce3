//! Dressed-hypercube Cayley spin networks.
//!
//! Builds the networks Z_2^d(l) (the d-cube with every nonzero pattern on
//! the first `l` coordinates added as a generator), computes their integer
//! spectra exactly in the Walsh–Hadamard basis, evolves single excitations
//! under `H = A(G)`, and plans perfect routes between arbitrary nodes by
//! switching between rotated dressings for `pi/2` at a time.
//!
//! ```
//! use hyperroute::{plan_route, execute_route};
//!
//! let plan = plan_route(4, 0b0000, 0b0111).unwrap();
//! assert_eq!(plan.steps.len(), 2);
//! let outcome = execute_route(&plan).unwrap();
//! assert!((outcome.fidelity - 1.0).abs() < 1e-9);
//! ```

pub mod bits;
pub mod cayley;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod formats;
pub mod routing;
pub mod spectral;

pub use bits::{BitVector, MAX_DIM};
pub use cayley::{
    adjacency_matrix, build_cayley_graph, build_generating_set, build_path_graph, cartesian_product,
    check_columnar, generator_masks, standard_graph, Adjacency, CayleyGraph, ColumnarReport,
    ColumnarViolation, CoordPerm, GeneratingSet,
};
pub use dynamics::{
    evolve, evolve_dense_oracle, fidelity_series, hadamard_transform, DenseOracle, FidelitySeries,
    StateVector,
};
pub use error::{Error, Result};
pub use routing::{
    execute_route, extract_permutation, plan_route, predicted_permutation, ExtractedPermutation,
    PermutationSpec, RouteOutcome, RoutePlan, RouteStep,
};
pub use spectral::{
    build_spectral_table, eigenvalue_by_summation, eigenvalue_closed_form, phase_offset,
    rational_ratio_check, Parity, SignVector, SpectralTable,
};
