use crate::error::{Error, Result};
use crate::mp::Mp;
use crate::qcore::{phi21_terminating_in, qpoch_finite, qpoch_finite_in, qpoch_inf, qpoch_inf_in, QBase, DEFAULT_TOL};
use crate::real::{cx, Real};
use num_complex::Complex64;
use serde::Serialize;

/// Parameters of the little q-Jacobi family p_n(x; a, b; q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LqjParams {
    pub q: QBase,
    pub a: f64,
    pub b: f64,
    /// Mass of the lattice point x = 1.
    w0: f64,
}

impl LqjParams {
    pub fn new(q: f64, a: f64, b: f64) -> Result<Self> {
        let qb = QBase::new(q)?;
        if !(a > 0.0 && a < 1.0 / q) {
            return Err(Error::InvalidParameter(format!("a = {a} must satisfy 0 < a < 1/q = {}", 1.0 / q)));
        }
        if !(b < 1.0 / q) {
            return Err(Error::InvalidParameter(format!("b = {b} must satisfy b < 1/q = {}", 1.0 / q)));
        }
        let num = qpoch_inf(c(a * q), qb, DEFAULT_TOL)?.value.re;
        let den = qpoch_inf(c(a * b * q * q), qb, DEFAULT_TOL)?.value.re;
        Ok(LqjParams { q: qb, a, b, w0: num / den })
    }

    /// The family with (a, b) replaced by (aq, bq).
    pub fn shifted(&self) -> Result<Self> {
        let q = self.q.value();
        LqjParams::new(q, self.a * q, self.b * q)
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn poch(a: f64, q: QBase, n: usize) -> f64 {
    qpoch_finite(c(a), q, n).re
}

/// pₙ(x; a, b; q) at working precision `T`.
pub fn lqj_eval_in<T: Real>(n: usize, x: &T, p: &LqjParams) -> Result<T> {
    let f = T::from_f64;
    let q = f(p.q.value());
    let a = f(p.a);
    let ab = a.clone() * f(p.b);
    let v = phi21_terminating_in(
        n,
        &cx(ab * q.powi(n as i32 + 1)),
        &cx(a * q.clone()),
        &q,
        &cx(q.clone() * x.clone()),
    )?;
    Ok(v.re)
}

fn eval_in<T: Real>(n: usize, x: f64, p: &LqjParams) -> Result<f64> {
    Ok(lqj_eval_in(n, &T::from_f64(x), p)?.to_f64())
}

fn lattice_in<T: Real>(n: usize, k: i32, p: &LqjParams) -> Result<f64> {
    Ok(lqj_eval_in(n, &T::from_f64(p.q.value()).powi(k), p)?.to_f64())
}

/// Working bits lost to cancellation when evaluating pₙ at x: the terms of
/// the defining sum reach about q^{−n(n−1)/2}·max(1, |x|)ⁿ, while near x = 1
/// the value itself can be as small as q^{n(n+1)/2}.
fn cancellation_bits(n: usize, x: f64, q: f64) -> f64 {
    let nf = n as f64;
    nf * nf * -q.log2() + nf * x.abs().max(1.0).log2()
}

/// pₙ(x; a, b; q), with the working precision chosen from the expected cancellation.
pub fn lqj_eval(n: usize, x: f64, p: &LqjParams) -> Result<f64> {
    match cancellation_bits(n, x, p.q.value()) {
        _ if n < 2 => eval_in::<f64>(n, x, p),
        l if l < 190.0 => eval_in::<Mp<256>>(n, x, p),
        l if l < 440.0 => eval_in::<Mp<512>>(n, x, p),
        l if l < 960.0 => eval_in::<Mp<1024>>(n, x, p),
        _ => eval_in::<Mp<4096>>(n, x, p),
    }
}

/// pₙ(qᵏ; a, b; q) with the lattice point formed at working precision.
/// Near x = 1, pₙ is so ill-conditioned that rounding qᵏ to f64 first
/// already costs many digits.
pub fn lqj_eval_lattice(n: usize, k: i32, p: &LqjParams) -> Result<f64> {
    let q = p.q.value();
    match cancellation_bits(n, q.powi(k), q) {
        _ if n < 2 => lattice_in::<f64>(n, k, p),
        l if l < 190.0 => lattice_in::<Mp<256>>(n, k, p),
        l if l < 440.0 => lattice_in::<Mp<512>>(n, k, p),
        l if l < 960.0 => lattice_in::<Mp<1024>>(n, k, p),
        _ => lattice_in::<Mp<4096>>(n, k, p),
    }
}

/// Coefficient of xⁿ in pₙ.
pub fn lqj_leading(n: usize, p: &LqjParams) -> f64 {
    let q = p.q;
    let qv = q.value();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let e = -((n * n.saturating_sub(1)) as f64) / 2.0;
    sign * qv.powf(e) * poch(p.a * p.b * qv.powi(n as i32 + 1), q, n) / poch(p.a * qv, q, n)
}

/// Mass w_k at the lattice point x = q^k; the masses sum to one.
pub fn lqj_weight(k: usize, p: &LqjParams) -> Result<f64> {
    let q = p.q;
    let qv = q.value();
    Ok((p.a * qv).powi(k as i32) * poch(p.b * qv, q, k) / poch(qv, q, k) * p.w0)
}

/// [`lqj_weight`] at working precision `T`.
pub fn lqj_weight_in<T: Real>(k: usize, p: &LqjParams) -> Result<T> {
    let f = T::from_f64;
    let q = f(p.q.value());
    let (a, b) = (f(p.a), f(p.b));
    let tol = 4.0 * T::epsilon();
    let w0 = qpoch_inf_in(&cx(a.clone() * q.clone()), &q, tol)?.value.re
        / qpoch_inf_in(&cx(a.clone() * b.clone() * q.clone() * q.clone()), &q, tol)?.value.re;
    Ok((a * q.clone()).powi(k as i32) * qpoch_finite_in(&cx(b * q.clone()), &q, k).re
        / qpoch_finite_in(&cx(q.clone()), &q, k).re
        * w0)
}

/// Squared norm hₙ = Σ_k pₙ(q^k)² w_k.
pub fn lqj_norm(n: usize, p: &LqjParams) -> f64 {
    let q = p.q;
    let qv = q.value();
    let ab = p.a * p.b;
    (1.0 - ab * qv) / (1.0 - ab * qv.powi(2 * n as i32 + 1)) * poch(qv, q, n) * poch(p.b * qv, q, n)
        / (poch(p.a * qv, q, n) * poch(ab * qv, q, n))
        * (p.a * qv).powi(n as i32)
}

/// Eigenvalue λₙ of the second-order q-difference operator.
pub fn lqj_eigenvalue(n: usize, p: &LqjParams) -> f64 {
    let qv = p.q.value();
    qv.powi(-(n as i32)) * (1.0 - qv.powi(n as i32)) * (1.0 - p.a * p.b * qv.powi(n as i32 + 1))
}

/// hₙ at working precision `T`.
pub fn lqj_norm_in<T: Real>(n: usize, p: &LqjParams) -> T {
    let f = T::from_f64;
    let q = f(p.q.value());
    let (a, b) = (f(p.a), f(p.b));
    let ab = a.clone() * b.clone();
    let one = T::one();
    let poch = |x: T| qpoch_finite_in(&cx(x), &q, n).re;
    (one.clone() - ab.clone() * q.clone()) / (one - ab.clone() * q.powi(2 * n as i32 + 1))
        * poch(q.clone())
        * poch(b * q.clone())
        / (poch(a.clone() * q.clone()) * poch(ab * q.clone()))
        * (a * q.clone()).powi(n as i32)
}

/// Orthonormal polynomial with positive leading coefficient.
pub fn lqj_orthonormal(n: usize, x: f64, p: &LqjParams) -> Result<f64> {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * lqj_eval(n, x, p)? / lqj_norm(n, p).sqrt())
}

/// [`lqj_orthonormal`] at working precision `T`.
pub fn lqj_orthonormal_in<T: Real>(n: usize, x: &T, p: &LqjParams) -> Result<T> {
    let v = lqj_eval_in(n, x, p)? / lqj_norm_in::<T>(n, p).sqrt();
    Ok(if n.is_multiple_of(2) { v } else { -v })
}

/// (L f)(x) = a(bqx − 1)/x (f(qx) − f(x)) + (x − 1)/x (f(x/q) − f(x)).
pub fn lqj_difference_op<F: Fn(f64) -> f64>(f: F, x: f64, p: &LqjParams) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::DivisionByZero);
    }
    let q = p.q.value();
    let fx = f(x);
    Ok(p.a * (p.b * q * x - 1.0) / x * (f(q * x) - fx) + (x - 1.0) / x * (f(x / q) - fx))
}

/// [`lqj_difference_op`] at working precision `T`; `f` may fail.
pub fn lqj_difference_op_in<T: Real, F: Fn(&T) -> Result<T>>(f: F, x: &T, p: &LqjParams) -> Result<T> {
    if x.to_f64() == 0.0 {
        return Err(Error::DivisionByZero);
    }
    let fnum = T::from_f64;
    let q = fnum(p.q.value());
    let one = T::one();
    let fx = f(x)?;
    let up = f(&(q.clone() * x.clone()))? - fx.clone();
    let down = f(&(x.clone() / q.clone()))? - fx;
    Ok(fnum(p.a) * (fnum(p.b) * q * x.clone() - one.clone()) / x.clone() * up + (x.clone() - one) / x.clone() * down)
}
