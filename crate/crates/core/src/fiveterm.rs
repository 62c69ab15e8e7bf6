//! Five-term coefficients from connection data and their folding into 2×2
//! recurrence blocks.

use crate::error::{Error, Result};
use crate::numerics::Mat2;
use crate::real::{conj, Real};
use num_complex::Complex;
use num_traits::Zero;

/// Connection data of an operator `T = r(x)(L + ρ) + τx`, where
/// φₙ = αₙΦₙ + βₙΦₙ₋₁ + γₙΦₙ₋₂, LΦₙ = λₙΦₙ and xφₙ = θₙφₙ₊₁ + ξₙφₙ + θₙ₋₁φₙ₋₁.
///
/// `beta(0)`, `gamma(0)`, `gamma(1)` and negative indices are never queried.
pub trait ConnectionSource<T: Real> {
    fn alpha(&self, n: usize) -> T;
    fn beta(&self, n: usize) -> T;
    fn gamma(&self, n: usize) -> T;
    fn lambda(&self, n: usize) -> T;
    fn theta(&self, n: usize) -> T;
    fn xi(&self, n: usize) -> T;
    fn rho(&self) -> T;
    fn tau(&self) -> T;

    /// Number of indices available, if finite.
    fn available(&self) -> Option<usize> {
        None
    }
}

/// Tabulated connection data.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionData<T: Real = f64> {
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub gamma: Vec<T>,
    pub lambda: Vec<T>,
    pub theta: Vec<T>,
    pub xi: Vec<T>,
    pub rho: T,
    pub tau: T,
}

impl<T: Real> ConnectionSource<T> for ConnectionData<T> {
    fn alpha(&self, n: usize) -> T {
        self.alpha[n].clone()
    }
    fn beta(&self, n: usize) -> T {
        self.beta[n].clone()
    }
    fn gamma(&self, n: usize) -> T {
        self.gamma[n].clone()
    }
    fn lambda(&self, n: usize) -> T {
        self.lambda[n].clone()
    }
    fn theta(&self, n: usize) -> T {
        self.theta[n].clone()
    }
    fn xi(&self, n: usize) -> T {
        self.xi[n].clone()
    }
    fn rho(&self) -> T {
        self.rho.clone()
    }
    fn tau(&self) -> T {
        self.tau.clone()
    }
    fn available(&self) -> Option<usize> {
        [&self.alpha, &self.beta, &self.gamma, &self.lambda, &self.theta, &self.xi]
            .iter()
            .map(|v| v.len())
            .min()
    }
}

/// Coefficients of `T fₙ = aₙfₙ₊₂ + bₙfₙ₊₁ + cₙfₙ + conj(bₙ₋₁)fₙ₋₁ + aₙ₋₂fₙ₋₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiveTermCoeffs<T: Real = f64> {
    pub a: Vec<T>,
    pub b: Vec<Complex<T>>,
    pub c: Vec<T>,
}

impl<T: Real> FiveTermCoeffs<T> {
    pub fn len(&self) -> usize {
        self.a.len().min(self.b.len()).min(self.c.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// aₙ with aₙ = 0 for n < 0.
    pub fn a_at(&self, n: isize) -> T {
        if n < 0 {
            T::zero()
        } else {
            self.a[n as usize].clone()
        }
    }

    /// bₙ with bₙ = 0 for n < 0.
    pub fn b_at(&self, n: isize) -> Complex<T> {
        if n < 0 {
            Complex::zero()
        } else {
            self.b[n as usize].clone()
        }
    }

    /// Dense `size × size` section of the band matrix; column n holds T fₙ.
    pub fn band_matrix(&self, size: usize) -> Vec<Vec<Complex<T>>> {
        let mut m = vec![vec![Complex::<T>::zero(); size]; size];
        let re = |x: T| Complex::new(x, T::zero());
        for n in 0..size {
            m[n][n] = re(self.c[n].clone());
            if n + 1 < size {
                m[n + 1][n] = self.b[n].clone();
                m[n][n + 1] = conj(&self.b[n]);
            }
            if n + 2 < size {
                m[n + 2][n] = re(self.a[n].clone());
                m[n][n + 2] = re(self.a[n].clone());
            }
        }
        m
    }
}

/// aₙ = αₙγₙ₊₂(λₙ+ρ), bₙ = αₙβₙ₊₁(λₙ+ρ) + βₙ(λₙ₋₁+ρ)γₙ₊₁ + τθₙ,
/// cₙ = αₙ²(λₙ+ρ) + βₙ²(λₙ₋₁+ρ) + γₙ²(λₙ₋₂+ρ) + τξₙ for n < len,
/// with β₀ = γ₀ = γ₁ = 0.
pub fn build_fiveterm<T: Real, S: ConnectionSource<T> + ?Sized>(
    conn: &S,
    len: usize,
) -> Result<FiveTermCoeffs<T>> {
    if let Some(avail) = conn.available() {
        if avail < len + 2 {
            return Err(Error::SequenceTooShort {
                needed: len + 1,
                available: avail,
            });
        }
    }
    let beta = |n: usize| if n == 0 { T::zero() } else { conn.beta(n) };
    let gamma = |n: usize| if n < 2 { T::zero() } else { conn.gamma(n) };
    let rho = conn.rho();
    let tau = conn.tau();
    let shifted = |n: usize| conn.lambda(n) + rho.clone();

    let mut a = Vec::with_capacity(len);
    let mut b = Vec::with_capacity(len);
    let mut c = Vec::with_capacity(len);
    for n in 0..len {
        let al = conn.alpha(n);
        let ln = shifted(n);
        a.push(al.clone() * gamma(n + 2) * ln.clone());

        let mut bt = al.clone() * beta(n + 1) * ln.clone();
        let mut ct = al.clone() * al * ln;
        if n >= 1 {
            let be = beta(n);
            let l1 = shifted(n - 1);
            bt = bt + be.clone() * l1.clone() * gamma(n + 1);
            ct = ct + be.clone() * be * l1;
        }
        if n >= 2 {
            let g = gamma(n);
            ct = ct + g.clone() * g * shifted(n - 2);
        }
        b.push(Complex::new(bt + tau.clone() * conn.theta(n), T::zero()));
        c.push(ct + tau.clone() * conn.xi(n));
    }
    Ok(FiveTermCoeffs { a, b, c })
}

/// Aₙ = [[a₂ₙ, 0], [b₂ₙ₊₁, a₂ₙ₊₁]] and Bₙ = [[c₂ₙ, b₂ₙ], [conj b₂ₙ, c₂ₙ₊₁]].
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceBlocks<T: Real = f64> {
    pub a: Vec<Mat2<T>>,
    pub b: Vec<Mat2<T>>,
}

impl<T: Real> RecurrenceBlocks<T> {
    pub fn len(&self) -> usize {
        self.a.len().min(self.b.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> RecurrenceBlocks<f64> {
        RecurrenceBlocks {
            a: self.a.iter().map(Mat2::to_f64).collect(),
            b: self.b.iter().map(Mat2::to_f64).collect(),
        }
    }
}

fn nonzero<T: Real>(x: &T) -> bool {
    x.to_f64().abs() > f64::MIN_POSITIVE || !x.is_zero() && x.to_f64() != 0.0
}

/// Blocks 0..=n from coefficients defined up to index 2n+1.
pub fn blocks_from_fiveterm<T: Real>(ft: &FiveTermCoeffs<T>, n: usize) -> Result<RecurrenceBlocks<T>> {
    let needed = 2 * n + 1;
    if ft.len() <= needed {
        return Err(Error::SequenceTooShort {
            needed,
            available: ft.len(),
        });
    }
    let re = |x: &T| Complex::new(x.clone(), T::zero());
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for k in 0..=n {
        for idx in [2 * k, 2 * k + 1] {
            if !nonzero(&ft.a[idx]) {
                return Err(Error::SingularBlock { index: k });
            }
        }
        a.push(Mat2::new(
            re(&ft.a[2 * k]),
            Complex::zero(),
            ft.b[2 * k + 1].clone(),
            re(&ft.a[2 * k + 1]),
        ));
        b.push(Mat2::new(
            re(&ft.c[2 * k]),
            ft.b[2 * k].clone(),
            conj(&ft.b[2 * k]),
            re(&ft.c[2 * k + 1]),
        ));
    }
    Ok(RecurrenceBlocks { a, b })
}

/// Inverse of [`blocks_from_fiveterm`].
pub fn unfold<T: Real>(blocks: &RecurrenceBlocks<T>) -> FiveTermCoeffs<T> {
    let n = blocks.len();
    let mut ft = FiveTermCoeffs {
        a: Vec::with_capacity(2 * n),
        b: Vec::with_capacity(2 * n),
        c: Vec::with_capacity(2 * n),
    };
    for (a, b) in blocks.a.iter().zip(&blocks.b) {
        ft.a.push(a.m[0][0].re.clone());
        ft.a.push(a.m[1][1].re.clone());
        ft.b.push(b.m[0][1].clone());
        ft.b.push(a.m[1][0].clone());
        ft.c.push(b.m[0][0].re.clone());
        ft.c.push(b.m[1][1].re.clone());
    }
    ft
}
