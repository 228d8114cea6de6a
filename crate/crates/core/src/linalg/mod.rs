//! Dense complex linear algebra generic over the real component type.

pub mod eigen;
pub mod matrix;
pub mod poly;
pub mod tensor;

pub use eigen::{eigh, eigvalsh, EigenDecomposition};
pub use matrix::{inner, orthonormalize_columns, vector_norm, ComplexMatrix};
pub use poly::{poly_eval, real_poly_roots};
pub use tensor::{
    kron, kron_vec, kron_with_cap, partial_trace, partial_transpose, permute_subsystems,
    permute_vector, reduce_bipartite_vector, reduced_from_vector, trace_norm, Factorization,
    DEFAULT_KRON_CAP,
};
