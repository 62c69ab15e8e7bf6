//! Scalar orthogonal polynomial families consumed by the pipelines.

pub mod asc;
pub mod cdqh;
pub mod little_q_jacobi;

pub use asc::{asc_density, asc_weight, asc_weight_unchecked, continuous_regime};
pub use cdqh::{
    cdqh_orthonormal_eval, cdqh_orthonormal_eval_all, cdqh_orthonormal_recurrence, cdqh_weight,
    CdqhParams,
};
pub use little_q_jacobi::{
    lqj_difference_op, lqj_difference_op_in, lqj_eigenvalue, lqj_eval, lqj_eval_in, lqj_eval_lattice, lqj_leading, lqj_norm, lqj_norm_in,
    lqj_orthonormal, lqj_orthonormal_in, lqj_weight_in,
    lqj_weight, LqjParams,
};
