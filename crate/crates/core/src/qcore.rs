//! q-Pochhammer symbols and the 2phi1 basic hypergeometric series.
//!
//! Public entry points work in `Complex<f64>`; the `*_in` kernels are generic
//! over [`Real`] so the same code runs in multiprecision.

use crate::error::{Error, Result};
use crate::real::{cabs, Real};
use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use serde::Serialize;

pub const DEFAULT_TOL: f64 = 1e-14;
pub const MAX_TERMS: usize = 10_000;

/// Relative size below which a denominator factor counts as a pole.
const POLE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct QBase(f64);

impl QBase {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q < 1.0 {
            Ok(QBase(q))
        } else {
            Err(Error::InvalidBase(q))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn squared(self) -> QBase {
        QBase(self.0 * self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue<T: Real = f64> {
    pub value: Complex<T>,
    pub abs_error: f64,
    pub terms_used: usize,
}

pub fn qpoch_finite_in<T: Real>(a: &Complex<T>, q: &T, n: usize) -> Complex<T> {
    let mut acc = Complex::<T>::one();
    let mut aq = a.clone();
    for _ in 0..n {
        acc = acc * (Complex::<T>::one() - aq.clone());
        aq = aq * q.clone();
    }
    acc
}

/// Term cap for a series whose terms eventually shrink by `rate` per step:
/// MAX_TERMS, or more when reaching `tol` at that rate genuinely needs it.
fn term_budget(rate: f64, tol: f64) -> usize {
    let needed = 4.0 * tol.ln() / rate.ln();
    if needed.is_finite() && needed > MAX_TERMS as f64 {
        needed.min(1e8) as usize
    } else {
        MAX_TERMS
    }
}

/// (a;q)_∞ truncated once the remaining factors provably change the
/// partial product by at most `tol·min(1, |partial|)`.
pub fn qpoch_inf_in<T: Real>(a: &Complex<T>, q: &T, tol: f64) -> Result<SeriesValue<T>> {
    let qf = q.to_f64();
    let mut partial = Complex::<T>::one();
    let mut term = a.clone();
    let budget = term_budget(qf, tol);
    for j in 0..=budget {
        let t = cabs(&term);
        if t < 0.5 {
            let eps = t / ((1.0 - qf) * (1.0 - t));
            let mag = cabs(&partial);
            let err = mag * eps.exp_m1();
            if err <= tol * mag.min(1.0) {
                return Ok(SeriesValue {
                    value: partial,
                    abs_error: err,
                    terms_used: j.max(1),
                });
            }
        }
        partial = partial * (Complex::<T>::one() - term.clone());
        term = term * q.clone();
    }
    Err(Error::NonConvergence {
        what: "infinite q-Pochhammer product",
        terms: budget,
    })
}

/// (c x, c/x; q)_∞ for x on the unit circle, where 1/x = conj(x).
pub fn qpoch_pm_in<T: Real>(
    x: &Complex<T>,
    prefactor: &Complex<T>,
    q: &T,
    tol: f64,
) -> Result<SeriesValue<T>> {
    let xb = Complex::new(x.re.clone(), -x.im.clone());
    let p1 = qpoch_inf_in(&(prefactor.clone() * x.clone()), q, tol)?;
    let p2 = qpoch_inf_in(&(prefactor.clone() * xb), q, tol)?;
    let (m1, m2) = (cabs(&p1.value), cabs(&p2.value));
    Ok(SeriesValue {
        value: p1.value * p2.value,
        abs_error: m1 * p2.abs_error + m2 * p1.abs_error + p1.abs_error * p2.abs_error,
        terms_used: p1.terms_used + p2.terms_used,
    })
}

/// Index m with `a ≈ q^{-m}`, when the upper parameter terminates the series.
fn terminating_index<T: Real>(a: &Complex<T>, q: f64) -> Option<usize> {
    let (re, im) = (a.re.to_f64(), a.im.to_f64());
    if re < 1.0 - 1e-12 || im.abs() > 1e-12 * re {
        return None;
    }
    let m = (re.ln() / -q.ln()).round();
    if !(0.0..=MAX_TERMS as f64).contains(&m) {
        return None;
    }
    let target = q.powi(-(m as i32));
    ((re - target).abs() <= 1e-12 * target).then_some(m as usize)
}

fn check_pole<T: Real>(b1q: &Complex<T>, index: usize) -> Result<()> {
    let d = Complex::<T>::one() - b1q.clone();
    if cabs(&d) < POLE_FLOOR * cabs(b1q).max(1.0) {
        Err(Error::PoleInDenominator { index })
    } else {
        Ok(())
    }
}

/// 2phi1(q^{-n}, a2; b1; q, z), summed with exactly n+1 terms.
pub fn phi21_terminating_in<T: Real>(
    n: usize,
    a2: &Complex<T>,
    b1: &Complex<T>,
    q: &T,
    z: &Complex<T>,
) -> Result<Complex<T>> {
    let one = Complex::<T>::one();
    let mut sum = one.clone();
    let mut term = one.clone();
    let mut qk = T::one();
    let mut qkn = q.powi(-(n as i32));
    for k in 0..n {
        let b1qk = b1.clone() * qk.clone();
        check_pole(&b1qk, k)?;
        let num = (one.clone() - a2.clone() * qk.clone()) * (T::one() - qkn.clone());
        let den = (one.clone() - b1qk) * (T::one() - qk.clone() * q.clone());
        term = term * num / den * z.clone();
        sum = sum + term.clone();
        qk = qk * q.clone();
        qkn = qkn * q.clone();
    }
    Ok(sum)
}

pub fn phi21_in<T: Real>(
    a1: &Complex<T>,
    a2: &Complex<T>,
    b1: &Complex<T>,
    q: &T,
    z: &Complex<T>,
    tol: f64,
) -> Result<SeriesValue<T>> {
    let qf = q.to_f64();
    let term_limit = [a1, a2]
        .iter()
        .filter_map(|a| terminating_index(*a, qf))
        .min();
    let one = Complex::<T>::one();
    if let Some(m) = term_limit {
        let mut sum = one.clone();
        let mut term = one.clone();
        let mut qk = T::one();
        for k in 0..m {
            let b1qk = b1.clone() * qk.clone();
            check_pole(&b1qk, k)?;
            let num = (one.clone() - a1.clone() * qk.clone()) * (one.clone() - a2.clone() * qk.clone());
            let den = (one.clone() - b1qk) * (T::one() - qk.clone() * q.clone());
            term = term * num / den * z.clone();
            sum = sum + term.clone();
            qk = qk * q.clone();
        }
        return Ok(SeriesValue {
            value: sum,
            abs_error: 0.0,
            terms_used: m + 1,
        });
    }

    let zf = cabs(z);
    if zf >= 1.0 {
        return Err(Error::DivergentSeries { z_abs: zf });
    }
    if zf == 0.0 {
        return Ok(SeriesValue {
            value: one,
            abs_error: 0.0,
            terms_used: 1,
        });
    }
    let (a1f, a2f, b1f) = (cabs(a1), cabs(a2), cabs(b1));
    let mut sum = Complex::<T>::zero();
    let mut term = one.clone();
    let mut qk = T::one();
    let mut qkf = 1.0;
    let budget = term_budget(zf.max(qf), tol);
    for k in 0..budget {
        sum = sum + term.clone();
        let b1qk = b1.clone() * qk.clone();
        check_pole(&b1qk, k)?;
        // Bound on |t_{j+1}/t_j| for every j ≥ k; decreasing in j.
        if b1f * qkf < 1.0 {
            let r = zf * (1.0 + a1f * qkf) * (1.0 + a2f * qkf)
                / ((1.0 - b1f * qkf) * (1.0 - qkf * qf));
            if r < 1.0 {
                let err = cabs(&term) * r / (1.0 - r);
                if err <= tol * cabs(&sum).max(1.0) {
                    return Ok(SeriesValue {
                        value: sum,
                        abs_error: err,
                        terms_used: k + 1,
                    });
                }
            }
        }
        let num = (one.clone() - a1.clone() * qk.clone()) * (one.clone() - a2.clone() * qk.clone());
        let den = (one.clone() - b1qk) * (T::one() - qk.clone() * q.clone());
        term = term * num / den * z.clone();
        qk = qk * q.clone();
        qkf *= qf;
    }
    Err(Error::NonConvergence {
        what: "2phi1 series",
        terms: budget,
    })
}

pub fn qpoch_finite(a: Complex64, q: QBase, n: usize) -> Complex64 {
    qpoch_finite_in(&a, &q.value(), n)
}

pub fn qpoch_inf(a: Complex64, q: QBase, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    if !(a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("qpoch_inf argument {a} is not finite")));
    }
    qpoch_inf_in(&a, &q.value(), tol)
}

/// (c e^{it}, c e^{-it}; q)_∞ with `x = e^{it}`.
pub fn qpoch_pm(x: Complex64, prefactor: Complex64, q: QBase, tol: f64) -> Result<SeriesValue> {
    check_tol(tol)?;
    let r = x.norm();
    if (r - 1.0).abs() > 1e-12 {
        return Err(Error::NotOnUnitCircle(r));
    }
    let mut v = qpoch_pm_in(&x, &prefactor, &q.value(), tol)?;
    if prefactor.im == 0.0 {
        let m = v.value.norm();
        if v.value.im.abs() > tol.max(1e-10 * m) {
            return Err(Error::NotReal {
                imag: v.value.im,
                modulus: m,
            });
        }
        v.value.im = 0.0;
    }
    Ok(v)
}

pub fn phi21(
    a1: Complex64,
    a2: Complex64,
    b1: Complex64,
    q: QBase,
    z: Complex64,
    tol: f64,
) -> Result<SeriesValue> {
    check_tol(tol)?;
    phi21_in(&a1, &a2, &b1, &q.value(), &z, tol)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")))
    }
}
