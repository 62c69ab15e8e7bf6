use crate::error::{Error, Result};
use crate::qcore::{qpoch_inf, qpoch_pm, QBase, DEFAULT_TOL};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Normalized Al-Salam–Chihara density in t for parameters (α, β) and base `base`.
pub fn asc_density(t: f64, alpha: f64, beta: f64, base: QBase) -> Result<f64> {
    let re = |v: f64| Complex64::new(v, 0.0);
    let x = Complex64::from_polar(1.0, t);
    let norm = qpoch_inf(re(base.value()), base, DEFAULT_TOL)?.value.re
        * qpoch_inf(re(alpha * beta), base, DEFAULT_TOL)?.value.re;
    let num = qpoch_pm(x * x, re(1.0), base, DEFAULT_TOL)?.value.re;
    let den = qpoch_pm(x, re(alpha), base, DEFAULT_TOL)?.value.re * qpoch_pm(x, re(beta), base, DEFAULT_TOL)?.value.re;
    Ok((norm / (2.0 * PI) * num / den).max(0.0))
}

/// True when σ ± τ ≤ 1, i.e. no discrete spectrum.
pub fn continuous_regime(sigma: f64, tau: f64) -> bool {
    sigma.abs() + tau.abs() <= 1.0
}

/// (v₁₁, v₂₂) with v₁₁ the density for (q^{1+σ−τ}, −q^{1−σ−τ}) in base q²
/// and v₂₂ the same with (σ, τ) → (−σ, −τ).
pub fn asc_weight(t: f64, sigma: f64, tau: f64, q: QBase) -> Result<(f64, f64)> {
    if !continuous_regime(sigma, tau) {
        return Err(Error::ParameterOutOfRegime(format!(
            "sigma = {sigma}, tau = {tau}: need sigma + tau <= 1 and sigma - tau <= 1"
        )));
    }
    asc_weight_unchecked(t, sigma, tau, q)
}

/// [`asc_weight`] without the regime guard, for diagnostics.
pub fn asc_weight_unchecked(t: f64, sigma: f64, tau: f64, q: QBase) -> Result<(f64, f64)> {
    let qv = q.value();
    let q2 = q.squared();
    let v11 = asc_density(t, qv.powf(1.0 + sigma - tau), -qv.powf(1.0 - sigma - tau), q2)?;
    let v22 = asc_density(t, qv.powf(1.0 - sigma + tau), -qv.powf(1.0 + sigma + tau), q2)?;
    Ok((v11, v22))
}
