//! Exact integer matrix algebra: dense arbitrary-precision matrices, Smith
//! normal forms with unimodular transforms, and cokernel presentations with
//! chosen generators. No floating point anywhere.

mod matrix;
mod quotient;
mod snf;

pub use matrix::IntMatrix;
pub use quotient::{
    cokernel_presentation, induced_quotient_map, QuotientMode, QuotientPresentation,
};
pub use snf::{cyclic_block, diagonal_factors, smith_normal_form, SmithDecomposition};
