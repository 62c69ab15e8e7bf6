use crate::error::{Error, Result};
use crate::qcore::{qpoch_inf, qpoch_pm, QBase, DEFAULT_TOL};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Continuous dual q-Hahn parameters (A, B, C).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdqhParams {
    pub q: QBase,
    pub abc: [f64; 3],
}

impl CdqhParams {
    pub fn new(q: QBase, a: f64, b: f64, c: f64) -> Result<Self> {
        let ok = [a, b, c].iter().all(|v| v.abs() < 1.0) && a * b < 1.0 && a * c < 1.0 && b * c < 1.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "continuous dual q-Hahn parameters ({a}, {b}, {c}) must lie in (-1, 1)"
            )));
        }
        Ok(CdqhParams { q, abc: [a, b, c] })
    }

    /// (A, B, C) = (√(qb), √(qb), q√(qb)).
    pub fn specialization(q: QBase, b: f64) -> Result<Self> {
        let qv = q.value();
        if !(b > 0.0 && b < 1.0 / qv) {
            return Err(Error::InvalidParameter(format!("b = {b} must satisfy 0 < b < 1/q")));
        }
        let s = (qv * b).sqrt();
        CdqhParams::new(q, s, s, qv * s)
    }
}

/// Orthonormal recurrence coefficients in the convention
/// `2x pₖ = α̃ₖ pₖ₊₁ + β̃ₖ pₖ + α̃ₖ₋₁ pₖ₋₁`, x = cos t.
pub fn cdqh_orthonormal_recurrence(k: usize, p: &CdqhParams) -> (f64, f64) {
    let q = p.q.value();
    let [a, b, c] = p.abc;
    let qk = q.powi(k as i32);
    let off = ((1.0 - q * qk) * (1.0 - a * b * qk) * (1.0 - a * c * qk) * (1.0 - b * c * qk)).sqrt();
    let bc_prev = if k == 0 { 0.0 } else { b * c * qk / q };
    let diag = a + (b + c) * qk - a * b * c * qk * qk - a * (1.0 - qk) * (1.0 - bc_prev);
    (off, diag)
}

/// p₀(x), …, p_kmax(x) by forward recurrence.
pub fn cdqh_orthonormal_eval_all(kmax: usize, cos_t: f64, p: &CdqhParams) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(1.0);
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut off_prev = 0.0;
    for k in 0..kmax {
        let (off, diag) = cdqh_orthonormal_recurrence(k, p);
        let next = ((2.0 * cos_t - diag) * cur - off_prev * prev) / off;
        out.push(next);
        prev = cur;
        cur = next;
        off_prev = off;
    }
    out
}

pub fn cdqh_orthonormal_eval(k: usize, cos_t: f64, p: &CdqhParams) -> f64 {
    cdqh_orthonormal_eval_all(k, cos_t, p)[k]
}

/// Normalized orthogonality density in t on [0, π].
pub fn cdqh_weight(t: f64, p: &CdqhParams) -> Result<f64> {
    let q = p.q;
    let [a, b, c] = p.abc;
    let x = Complex64::from_polar(1.0, t);
    let re = |v: f64| Complex64::new(v, 0.0);
    let mut norm = qpoch_inf(re(q.value()), q, DEFAULT_TOL)?.value.re;
    for prod in [a * b, a * c, b * c] {
        norm *= qpoch_inf(re(prod), q, DEFAULT_TOL)?.value.re;
    }
    let num = qpoch_pm(x * x, re(1.0), q, DEFAULT_TOL)?.value.re;
    let mut den = 1.0;
    for v in [a, b, c] {
        den *= qpoch_pm(x, re(v), q, DEFAULT_TOL)?.value.re;
    }
    Ok((norm / (2.0 * PI) * num / den).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_scalar_0_pi;

    fn cdqh(q: f64, b: f64) -> CdqhParams {
        CdqhParams::specialization(QBase::new(q).unwrap(), b).unwrap()
    }

    #[test]
    fn recurrence_examples() {
        let q = QBase::new(0.5).unwrap();
        let zero = CdqhParams::new(q, 0.0, 0.0, 0.0).unwrap();
        for k in 0..10 {
            let (off, diag) = cdqh_orthonormal_recurrence(k, &zero);
            assert!((off - (1.0 - 0.5f64.powi(k as i32 + 1)).sqrt()).abs() < 1e-15);
            assert_eq!(diag, 0.0);
        }
        let (off, _) = cdqh_orthonormal_recurrence(0, &cdqh(0.5, 0.4));
        assert!((off - 0.9 * 0.4f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn recurrence_limits() {
        let p = cdqh(0.5, 0.4);
        let (off, diag) = cdqh_orthonormal_recurrence(80, &p);
        assert!((off - 1.0).abs() < 1e-15);
        assert!(diag.abs() < 1e-15);
        for k in 0..40 {
            assert!(cdqh_orthonormal_recurrence(k, &p).0 > 0.0);
        }
    }

    #[test]
    fn weight_is_normalized() {
        let p = cdqh(0.5, 0.4);
        assert_eq!(cdqh_weight(0.0, &p).unwrap(), 0.0);
        assert!(cdqh_weight(PI, &p).unwrap().abs() < 1e-14);
        let mass = integrate_scalar_0_pi(|t| cdqh_weight(t, &p), 1e-12).unwrap();
        assert!((mass.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn orthonormality() {
        for (q, b) in [(0.5, 0.4), (0.4, 0.2), (0.7, 0.9)] {
            let p = cdqh(q, b);
            let cfg = crate::numerics::QuadratureConfig::with_tol(1e-11);
            let n = 9;
            let f = |t: f64| {
                let w = cdqh_weight(t, &p)?;
                let v = cdqh_orthonormal_eval_all(n - 1, t.cos(), &p);
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        out.push(Complex64::new(w * v[i] * v[j], 0.0));
                    }
                }
                Ok(out)
            };
            let g = crate::numerics::integrate_vec(f, 0.0, PI, n * n, &cfg).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((g.value[i * n + j].re - expect).abs() < 1e-8, "({q},{b}) G[{i}][{j}]");
                }
            }
        }
    }

    #[test]
    fn three_term_identity() {
        let p = cdqh(0.5, 0.4);
        for t in [0.3f64, 1.1, 2.9] {
            let v = cdqh_orthonormal_eval_all(12, t.cos(), &p);
            for k in 1..11 {
                let (off, diag) = cdqh_orthonormal_recurrence(k, &p);
                let (off_prev, _) = cdqh_orthonormal_recurrence(k - 1, &p);
                let r = 2.0 * t.cos() * v[k] - off * v[k + 1] - diag * v[k] - off_prev * v[k - 1];
                assert!(r.abs() < 1e-10 * v.iter().fold(1.0f64, |m, x| m.max(x.abs())));
            }
        }
    }

    #[test]
    fn realness_of_weight_products() {
        let p = cdqh(0.5, 0.4);
        let q = p.q;
        for i in 1..=100 {
            let t = PI * i as f64 / 101.0;
            let x = Complex64::from_polar(1.0, t);
            for v in p.abc {
                let a = crate::qcore::qpoch_inf(x * v, q, DEFAULT_TOL).unwrap().value;
                let b = crate::qcore::qpoch_inf(x.conj() * v, q, DEFAULT_TOL).unwrap().value;
                assert!((a * b).im.abs() < 1e-12);
            }
        }
    }
}
