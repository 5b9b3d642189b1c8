//! Exact integer and prime-field linear algebra.

mod fp;
mod int_matrix;
mod smith;
mod subspace;

pub use fp::FpMatrix;
pub use int_matrix::IntMatrix;
pub use smith::{smith_normal_form, smith_normal_form_with_transforms, SmithForm};
pub use subspace::{
    annihilator, enumerate_subspaces, gaussian_binomial, Budget, Subspace, SubspaceIter, BUDGET_ENV,
    DEFAULT_ENUMERATION_BUDGET,
};
