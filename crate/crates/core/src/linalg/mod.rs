//! Linear algebra backends: sparse storage, dense Hermitian kernels, a block
//! Krylov eigensolver and a block-tridiagonal indefinite factorization.

pub mod blockldl;
pub mod dense;
pub mod krylov;
pub mod sparse;

#[allow(non_camel_case_types)]
pub type c64 = num_complex::Complex64;

pub use blockldl::{BlockLdl, BlockPartition};
pub use dense::Inertia;
pub use krylov::{HermitianOperator, KrylovOptions};
pub use sparse::CsrMatrix;
