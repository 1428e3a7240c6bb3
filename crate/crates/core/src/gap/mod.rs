//! Gap metric on subspaces, kernel-sheaf values, and the holomorphic
//! Jordanizability probe for polynomial matrix families.

mod family;
mod report;
mod sheaf;
mod subspace;

pub use family::{exact_from_c64, Branch, FamilyPoly, MatrixFamily, Path};
pub use report::{
    default_paths, dyadic_samples, jordanizability_report, limit_along_path, JordanizabilityReport, PathOutcome,
    PathProbe, ProbeConfig, DEFAULT_LIMIT_TOL, DEFAULT_TOL,
};
pub use sheaf::kernel_sheaf_value_1d;
pub use subspace::{
    gap_distance, generalized_eigenspace, intertwiner_dimension, kernel_subspace, smallest_singular_subspace, Subspace,
};
