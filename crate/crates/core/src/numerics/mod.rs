//! Quadrature on [0, π], q-lattice sums and 2×2 matrix utilities.

pub mod lattice;
pub mod mat2;
pub mod quadrature;

pub use lattice::{qlattice_sum, qlattice_sum_real};
pub use mat2::{
    herm2_eigen, herm2_eigenvalues, herm2_psd_check, hermitian_defect, mat2_inverse, Herm2, Mat2,
    PsdCheck, DEFAULT_DET_FLOOR,
};
pub use quadrature::{
    integrate_0_pi, integrate_scalar_0_pi, integrate_vec, QuadratureConfig, QuadratureResult,
};
