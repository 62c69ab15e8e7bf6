use crate::error::{Error, Result};
use crate::real::{cabs, conj, Real};
use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use serde::Serialize;
use std::ops::{Add, Mul, Sub};

pub const DEFAULT_DET_FLOOR: f64 = 1e-250;

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat2<T: Real = f64> {
    pub m: [[Complex<T>; 2]; 2],
}

/// Hermitian-by-intent 2×2 matrix in double precision.
pub type Herm2 = Mat2<f64>;

impl<T: Real> Mat2<T> {
    pub fn new(m00: Complex<T>, m01: Complex<T>, m10: Complex<T>, m11: Complex<T>) -> Self {
        Mat2 {
            m: [[m00, m01], [m10, m11]],
        }
    }

    pub fn from_real(m00: T, m01: T, m10: T, m11: T) -> Self {
        let z = || T::zero();
        Mat2::new(
            Complex::new(m00, z()),
            Complex::new(m01, z()),
            Complex::new(m10, z()),
            Complex::new(m11, z()),
        )
    }

    pub fn zero() -> Self {
        let z = Complex::<T>::zero;
        Mat2::new(z(), z(), z(), z())
    }

    pub fn identity() -> Self {
        Self::scalar(T::one())
    }

    pub fn scalar(s: T) -> Self {
        let z = Complex::<T>::zero;
        Mat2::new(Complex::new(s.clone(), T::zero()), z(), z(), Complex::new(s, T::zero()))
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex<T> {
        &self.m[i][j]
    }

    pub fn adjoint(&self) -> Self {
        Mat2::new(
            conj(&self.m[0][0]),
            conj(&self.m[1][0]),
            conj(&self.m[0][1]),
            conj(&self.m[1][1]),
        )
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0].clone() * self.m[1][1].clone() - self.m[0][1].clone() * self.m[1][0].clone()
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0].clone() + self.m[1][1].clone()
    }

    pub fn scale(&self, s: &Complex<T>) -> Self {
        let f = |z: &Complex<T>| z.clone() * s.clone();
        Mat2::new(f(&self.m[0][0]), f(&self.m[0][1]), f(&self.m[1][0]), f(&self.m[1][1]))
    }

    pub fn mul_vec(&self, v: &[Complex<T>; 2]) -> [Complex<T>; 2] {
        [
            self.m[0][0].clone() * v[0].clone() + self.m[0][1].clone() * v[1].clone(),
            self.m[1][0].clone() * v[0].clone() + self.m[1][1].clone() * v[1].clone(),
        ]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(cabs).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> Herm2 {
        let f = |z: &Complex<T>| Complex64::new(z.re.to_f64(), z.im.to_f64());
        Mat2::new(f(&self.m[0][0]), f(&self.m[0][1]), f(&self.m[1][0]), f(&self.m[1][1]))
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.m[0][1].is_zero()
    }

    /// `M⁻¹`, refusing when `|det M|` is below `floor`.
    pub fn inverse_with_floor(&self, floor: f64) -> Result<Self> {
        let d = self.det();
        let dabs = cabs(&d);
        if !(dabs > floor) {
            return Err(Error::Singular { det: dabs });
        }
        let inv = Complex::<T>::one() / d;
        Ok(Mat2::new(
            self.m[1][1].clone() * inv.clone(),
            -self.m[0][1].clone() * inv.clone(),
            -self.m[1][0].clone() * inv.clone(),
            self.m[0][0].clone() * inv,
        ))
    }

    /// Solve `M x = rhs` for lower-triangular `M` by substitution.
    pub fn solve_lower(&self, rhs: &Self) -> Result<Self> {
        let (a, b, c) = (&self.m[0][0], &self.m[1][0], &self.m[1][1]);
        if a.is_zero() || c.is_zero() {
            return Err(Error::Singular { det: 0.0 });
        }
        let r0 = [rhs.m[0][0].clone() / a.clone(), rhs.m[0][1].clone() / a.clone()];
        let r1 = [
            (rhs.m[1][0].clone() - b.clone() * r0[0].clone()) / c.clone(),
            (rhs.m[1][1].clone() - b.clone() * r0[1].clone()) / c.clone(),
        ];
        let [r00, r01] = r0;
        let [r10, r11] = r1;
        Ok(Mat2::new(r00, r01, r10, r11))
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let [[a, b], [c, d]] = self.m;
        let [[e, f], [g, h]] = o.m;
        Mat2::new(a + e, b + f, c + g, d + h)
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let [[a, b], [c, d]] = self.m;
        let [[e, f], [g, h]] = o.m;
        Mat2::new(a - e, b - f, c - g, d - h)
    }
}

impl<T: Real> Mul for &Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, o: &Mat2<T>) -> Mat2<T> {
        let e = |i: usize, j: usize| {
            self.m[i][0].clone() * o.m[0][j].clone() + self.m[i][1].clone() * o.m[1][j].clone()
        };
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, o: Mat2<T>) -> Mat2<T> {
        &self * &o
    }
}

pub fn mat2_inverse(m: &Herm2) -> Result<Herm2> {
    m.inverse_with_floor(DEFAULT_DET_FLOOR)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdCheck {
    pub psd: bool,
    /// Ascending.
    pub eigenvalues: (f64, f64),
}

/// Deviation from Hermitian symmetry: largest of |M₁₂ − conj(M₂₁)| and the
/// imaginary parts of the diagonal.
pub fn hermitian_defect(m: &Herm2) -> f64 {
    (m.m[0][1] - m.m[1][0].conj())
        .norm()
        .max(m.m[0][0].im.abs())
        .max(m.m[1][1].im.abs())
}

/// Closed-form eigenvalues of a Hermitian 2×2 matrix, ascending.
pub fn herm2_eigenvalues(m: &Herm2) -> (f64, f64) {
    let (a, d) = (m.m[0][0].re, m.m[1][1].re);
    let b = 0.5 * (m.m[0][1] + m.m[1][0].conj());
    let mean = 0.5 * (a + d);
    let r = (0.5 * (a - d)).hypot(b.norm());
    // Recover the small eigenvalue from det to avoid cancellation.
    let big = if mean >= 0.0 { mean + r } else { mean - r };
    let det = a * d - b.norm_sqr();
    let small = if big != 0.0 { det / big } else { 0.0 };
    if big >= small {
        (small, big)
    } else {
        (big, small)
    }
}

pub fn herm2_psd_check(m: &Herm2, tol: f64) -> Result<PsdCheck> {
    let asym = hermitian_defect(m);
    if asym > tol * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let eigenvalues = herm2_eigenvalues(m);
    Ok(PsdCheck {
        psd: eigenvalues.0 >= -tol && eigenvalues.1 >= -tol,
        eigenvalues,
    })
}

/// Unit eigenvectors with eigenvalues, as a spectral decomposition `M = Σ λᵢ vᵢ vᵢ*`.
pub fn herm2_eigen(m: &Herm2) -> [(f64, [Complex64; 2]); 2] {
    let (l0, l1) = herm2_eigenvalues(m);
    let b = 0.5 * (m.m[0][1] + m.m[1][0].conj());
    let a = m.m[0][0].re;
    let d = m.m[1][1].re;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if b.norm() <= 1e-300 {
        return if a <= d {
            [(a, [one, zero]), (d, [zero, one])]
        } else {
            [(d, [zero, one]), (a, [one, zero])]
        };
    }
    let vec_for = |l: f64| {
        // (M − l) v = 0 with v = (b, l − a) or (l − d, conj b), picking the larger.
        let v1 = [b, Complex64::new(l - a, 0.0)];
        let v2 = [Complex64::new(l - d, 0.0), b.conj()];
        let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
        let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
        if n1 >= n2 {
            [v1[0] / n1, v1[1] / n1]
        } else {
            [v2[0] / n2, v2[1] / n2]
        }
    };
    [(l0, vec_for(l0)), (l1, vec_for(l1))]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(a: f64, b: f64, c: f64, d: f64) -> Herm2 {
        Mat2::from_real(a, b, c, d)
    }

    fn close(a: &Herm2, b: &Herm2, tol: f64) -> bool {
        (a.clone() - b.clone()).max_abs() <= tol
    }

    #[test]
    fn psd_examples() {
        let c = herm2_psd_check(&Herm2::identity(), 1e-12).unwrap();
        assert!(c.psd);
        assert_eq!(c.eigenvalues, (1.0, 1.0));
        let c = herm2_psd_check(&r(1.0, 1.0, 1.0, 1.0), 1e-12).unwrap();
        assert!(c.psd);
        assert!(c.eigenvalues.0.abs() < 1e-15 && (c.eigenvalues.1 - 2.0).abs() < 1e-15);
        let c = herm2_psd_check(&r(1.0, 2.0, 2.0, 1.0), 1e-12).unwrap();
        assert!(!c.psd);
        assert!((c.eigenvalues.0 + 1.0).abs() < 1e-15 && (c.eigenvalues.1 - 3.0).abs() < 1e-15);
        assert!(matches!(
            herm2_psd_check(&r(1.0, 2.0, 0.0, 1.0), 1e-12),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mat2_inverse(&Herm2::identity()).unwrap(), Herm2::identity());
        assert!(close(&mat2_inverse(&r(2.0, 0.0, 0.0, 4.0)).unwrap(), &r(0.5, 0.0, 0.0, 0.25), 0.0));
        let (a, b, c) = (0.7, -0.3, 1.9);
        let expected = r(1.0 / a, 0.0, -b / (a * c), 1.0 / c);
        assert!(close(&mat2_inverse(&r(a, 0.0, b, c)).unwrap(), &expected, 1e-15));
        assert!(matches!(mat2_inverse(&r(1.0, 2.0, 2.0, 4.0)), Err(Error::Singular { .. })));
    }

    #[test]
    fn eigen_decomposition_reconstructs() {
        let m = Mat2::new(
            Complex64::new(2.0, 0.0),
            Complex64::new(0.3, -0.8),
            Complex64::new(0.3, 0.8),
            Complex64::new(-1.0, 0.0),
        );
        let rebuilt = herm2_eigen(&m).iter().fold(Herm2::zero(), |acc, (l, v)| {
            let outer = Mat2::new(v[0] * v[0].conj(), v[0] * v[1].conj(), v[1] * v[0].conj(), v[1] * v[1].conj());
            acc + outer.scale(&Complex64::new(*l, 0.0))
        });
        assert!(close(&rebuilt, &m, 1e-14));
    }

    proptest! {
        #[test]
        fn eigenvalue_product_is_det(a in -5.0f64..5.0, d in -5.0f64..5.0, br in -3.0f64..3.0, bi in -3.0f64..3.0) {
            let b = Complex64::new(br, bi);
            let m = Mat2::new(Complex64::new(a, 0.0), b, b.conj(), Complex64::new(d, 0.0));
            let (l0, l1) = herm2_eigenvalues(&m);
            let det = m.det().re;
            prop_assert!((l0 * l1 - det).abs() <= 1e-12 * (1.0 + det.abs().max(l1.abs() * l1.abs())));
            prop_assert!(l0 <= l1);
        }

        #[test]
        fn inverse_roundtrip(v in proptest::array::uniform8(-3.0f64..3.0)) {
            let m = Mat2::new(
                Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]),
                Complex64::new(v[4], v[5]), Complex64::new(v[6], v[7]),
            );
            prop_assume!(m.det().norm() > 1e-3);
            let p = &m * &mat2_inverse(&m).unwrap();
            let cond = m.max_abs().powi(2) / m.det().norm();
            prop_assert!((p - Herm2::identity()).max_abs() <= 1e-14 * cond.max(1.0));
        }

        #[test]
        fn lower_solve_matches_inverse(a in 0.1f64..2.0, b in -2.0f64..2.0, c in 0.1f64..2.0, rhs in proptest::array::uniform4(-2.0f64..2.0)) {
            let m = r(a, 0.0, b, c);
            let y = r(rhs[0], rhs[1], rhs[2], rhs[3]);
            let x1 = m.solve_lower(&y).unwrap();
            let x2 = &mat2_inverse(&m).unwrap() * &y;
            prop_assert!(close(&x1, &x2, 1e-12));
        }
    }
}
