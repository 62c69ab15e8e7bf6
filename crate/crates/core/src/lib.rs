//! Matrix-valued orthogonal polynomials generated by self-adjoint five-term
//! recurrence operators, with two explicit q-families and the numerical
//! machinery to verify their orthogonality.

pub mod error;
pub mod families;
pub mod fiveterm;
pub mod lqj;
pub mod mp;
pub mod mvop;
pub mod numerics;
pub mod qcore;
pub mod qsu2;
pub mod real;

pub use error::{Error, Result};
