//! Decides whether homogeneous fibrations `H ⊂ K ⊂ G` of compact Lie groups
//! satisfy the commuting-pair condition: every pair `X, Y` in the orthogonal
//! complement of `h` with `[X, Y] = 0` also has `[X_m, Y_m]_m = 0`.
//!
//! Positive answers come with exact certificates, negative answers with an
//! exactly verified pair of matrices. Arithmetic is over Q(√2, √3), with
//! polynomial coefficients for one-parameter families of subgroups.

pub mod algebra;
pub mod catalog;
pub mod chain;
pub mod criteria;
pub mod expr;
pub mod linalg;
pub mod locus;
pub mod param;
pub mod ring;
pub mod scalar;
pub mod search;
pub mod verdict;

pub use algebra::{Elem, ExactElem, LieAlgebra, ParamElem};
pub use param::ParamScalar;
pub use ring::Real;
pub use scalar::{Cx, Scalar};
