//! MVOPs from a five-term operator with explicit coefficients in the
//! parameters (σ, τ, φ), whose spectral measure is built from
//! Al-Salam–Chihara densities in base q².

use crate::error::{Error, Result};
use crate::families::{asc_weight, continuous_regime};
use crate::fiveterm::{blocks_from_fiveterm, FiveTermCoeffs, RecurrenceBlocks};
use crate::mvop::{gram_table, w2_from_pair, w2_without_conjugation, GramReport, GramTable, Measure, WeightFactor, WeightSample, WeightSampler};
use crate::numerics::{Herm2, QuadratureConfig};
use crate::qcore::{phi21, qpoch_inf, QBase, DEFAULT_TOL};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Offset applied to a quadrature node that hits a removable singularity.
pub const NODE_PERTURBATION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Qsu2Params {
    pub q: QBase,
    pub sigma: f64,
    pub tau: f64,
    /// Angle in [0, 2π).
    pub phi: f64,
}

impl Qsu2Params {
    /// Validated parameters, mapped by the symmetries of the coefficients
    /// onto σ ≥ τ, σ ≥ −τ.
    pub fn new(q: f64, sigma: f64, tau: f64, phi: f64) -> Result<Self> {
        let q = QBase::new(q)?;
        for (name, v) in [("sigma", sigma), ("tau", tau), ("phi", phi)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be finite")));
            }
        }
        let images = [
            (sigma, tau, phi),
            (tau, sigma, -phi),
            (-sigma, -tau, phi + PI),
            (-tau, -sigma, -phi + PI),
        ];
        let (s, t, f) = images
            .into_iter()
            .find(|&(s, t, _)| s >= t && s >= -t)
            .expect("one image satisfies sigma >= |tau|");
        Ok(Qsu2Params {
            q,
            sigma: s,
            tau: t,
            phi: f.rem_euclid(TAU),
        })
    }

    pub fn continuous_only(&self) -> bool {
        continuous_regime(self.sigma, self.tau)
    }

    fn require_continuous(&self) -> Result<()> {
        if self.continuous_only() {
            Ok(())
        } else {
            Err(Error::ParameterOutOfRegime(format!(
                "sigma = {}, tau = {}: the weight needs sigma + tau <= 1 and sigma - tau <= 1",
                self.sigma, self.tau
            )))
        }
    }
}

/// q-symbols and ₂φ₁ series in base q² only.
#[derive(Debug, Clone, Copy)]
struct BaseQ2 {
    q: f64,
    base: QBase,
}

impl BaseQ2 {
    fn new(q: QBase) -> Self {
        BaseQ2 { q: q.value(), base: q.squared() }
    }

    fn poch_inf(&self, a: Complex64) -> Result<Complex64> {
        Ok(qpoch_inf(a, self.base, DEFAULT_TOL)?.value)
    }

    fn phi21(&self, a1: Complex64, a2: Complex64, b1: Complex64, z: Complex64) -> Result<Complex64> {
        Ok(phi21(a1, a2, b1, self.base, z, DEFAULT_TOL)?.value)
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// (aₙ, bₙ, cₙ); for n < 0 the coefficients aₙ, bₙ vanish and cₙ is undefined.
pub fn qsu2_coeffs(n: i64, p: &Qsu2Params) -> (f64, Complex64, Option<f64>) {
    if n < 0 {
        return (0.0, Complex64::new(0.0, 0.0), None);
    }
    let q = p.q.value();
    let qp = |e: f64| q.powf(e);
    let n = n as f64;
    let ds = qp(-p.sigma) - qp(p.sigma);
    let dt = qp(-p.tau) - qp(p.tau);
    let a = 0.5 * ((1.0 - qp(2.0 * n + 2.0)) * (1.0 - qp(2.0 * n + 4.0))).sqrt();
    let mix = Complex64::from_polar(ds, p.phi) + Complex64::from_polar(dt, -p.phi);
    let b = Complex64::new(0.0, 0.5) * qp(n + 1.0) * (1.0 - qp(2.0 * n + 2.0)).sqrt() * mix;
    let c = qp(1.0 + 2.0 * n) * ((2.0 * p.phi).cos() - 0.5 * ds * dt);
    (a, b, Some(c))
}

pub fn qsu2_fiveterm(p: &Qsu2Params, len: usize) -> FiveTermCoeffs {
    let mut ft = FiveTermCoeffs {
        a: Vec::with_capacity(len),
        b: Vec::with_capacity(len),
        c: Vec::with_capacity(len),
    };
    for n in 0..len {
        let (a, b, c) = qsu2_coeffs(n as i64, p);
        ft.a.push(a);
        ft.b.push(b);
        ft.c.push(c.expect("defined for n >= 0"));
    }
    ft
}

pub fn build_qsu2_blocks(p: &Qsu2Params, n: usize) -> Result<RecurrenceBlocks> {
    blocks_from_fiveterm(&qsu2_fiveterm(p, 2 * n + 2), n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumInfo {
    pub continuous: [f64; 2],
    pub continuous_multiplicity: u32,
    pub sigma_minus: Vec<f64>,
    pub sigma_plus: Vec<f64>,
}

fn mu(x: f64) -> f64 {
    0.5 * (x + 1.0 / x)
}

pub fn discrete_spectrum(p: &Qsu2Params) -> SpectrumInfo {
    let q = p.q.value();
    let points = |offset: f64, sign: f64| -> Vec<f64> {
        (0..)
            .map(|k| offset + 2.0 * k as f64)
            .take_while(|&e| e < 0.0)
            .map(|e| mu(sign * q.powf(e)))
            .collect()
    };
    SpectrumInfo {
        continuous: [-1.0, 1.0],
        continuous_multiplicity: 2,
        sigma_minus: points(1.0 - p.sigma - p.tau, -1.0),
        sigma_plus: points(1.0 - p.sigma + p.tau, 1.0),
    }
}

fn f10_raw(t: f64, sigma: f64, tau: f64, phi: f64, b: &BaseQ2) -> Result<Complex64> {
    let q = b.q;
    let x = Complex64::from_polar(1.0, t);
    let norm = b.poch_inf(re(-q.powf(2.0 * tau)))?.re.sqrt();
    let den = b.poch_inf(Complex64::from_polar(q, t + 2.0 * phi))?;
    let series = b.phi21(
        x * q.powf(1.0 + sigma - tau),
        -x * q.powf(1.0 - sigma - tau),
        re(-q.powf(2.0 - 2.0 * tau)),
        Complex64::from_polar(q, 2.0 * phi - t),
    )?;
    Ok(series / (den * norm))
}

fn f11_raw(t: f64, sigma: f64, tau: f64, phi: f64, b: &BaseQ2) -> Result<Complex64> {
    let q = b.q;
    let x = Complex64::from_polar(1.0, t);
    let a1 = x * q.powf(1.0 + sigma - tau);
    let a2 = -x * q.powf(1.0 - sigma - tau);
    let b1 = re(-q.powf(2.0 - 2.0 * tau));
    let pre = Complex64::new(0.0, -1.0) * Complex64::from_polar(q.powf(-tau), -phi)
        / ((1.0 - q * q) * b.poch_inf(re(-q.powf(2.0 * tau)))?.re).sqrt();
    let far = b.phi21(a1, a2, b1, Complex64::from_polar(q.powi(3), 2.0 * phi - t))?
        / b.poch_inf(Complex64::from_polar(q.powi(3), t + 2.0 * phi))?;
    let near = b.phi21(a1, a2, b1, Complex64::from_polar(q, 2.0 * phi - t))?
        / b.poch_inf(Complex64::from_polar(q, t + 2.0 * phi))?;
    Ok(pre * (-far + (1.0 - q.powf(2.0 * tau)) * near))
}

fn retry_pole<F: Fn(f64) -> Result<Complex64>>(t: f64, f: F) -> Result<Complex64> {
    match f(t) {
        Err(Error::PoleInDenominator { .. }) => f(t + NODE_PERTURBATION),
        r => r,
    }
}

/// F₁,₀ for the parameters (σ, τ) given explicitly; φ and q from `p`.
pub fn qsu2_f10_with(t: f64, sigma: f64, tau: f64, p: &Qsu2Params) -> Result<Complex64> {
    let b = BaseQ2::new(p.q);
    retry_pole(t, |s| f10_raw(s, sigma, tau, p.phi, &b))
}

/// F₁,₁ for the parameters (σ, τ) given explicitly; φ and q from `p`.
pub fn qsu2_f11_with(t: f64, sigma: f64, tau: f64, p: &Qsu2Params) -> Result<Complex64> {
    let b = BaseQ2::new(p.q);
    retry_pole(t, |s| f11_raw(s, sigma, tau, p.phi, &b))
}

pub fn qsu2_f10(t: f64, p: &Qsu2Params) -> Result<Complex64> {
    qsu2_f10_with(t, p.sigma, p.tau, p)
}

pub fn qsu2_f11(t: f64, p: &Qsu2Params) -> Result<Complex64> {
    qsu2_f11_with(t, p.sigma, p.tau, p)
}

/// The images u = Uf₀ and v = Uf₁ (two components each) and V = diag(v₁₁, v₂₂).
pub fn qsu2_spectral_data(t: f64, p: &Qsu2Params) -> Result<([Complex64; 2], [Complex64; 2], (f64, f64))> {
    p.require_continuous()?;
    let (s, r) = (p.sigma, p.tau);
    let u = [qsu2_f10_with(t, s, r, p)?, qsu2_f10_with(t, -s, -r, p)?];
    let v = [qsu2_f11_with(t, s, r, p)?, -qsu2_f11_with(t, -s, -r, p)?];
    let dens = asc_weight(t, s, r, p.q)?;
    Ok((u, v, dens))
}

pub fn qsu2_weight_w2(t: f64, p: &Qsu2Params) -> Result<Herm2> {
    let (u, v, (v11, v22)) = qsu2_spectral_data(t, p)?;
    Ok(w2_from_pair(&u, &v, &Herm2::from_real(v11, 0.0, 0.0, v22)))
}

/// W₂ assembled without complex conjugation on the cross terms.
pub fn qsu2_weight_w2_literal(t: f64, p: &Qsu2Params) -> Result<Herm2> {
    let (u, v, (v11, v22)) = qsu2_spectral_data(t, p)?;
    Ok(w2_without_conjugation(&u, &v, &Herm2::from_real(v11, 0.0, 0.0, v22)))
}

/// max |W₂ − W₂(no conjugation)| at t.
pub fn qsu2_conjugation_discrepancy(t: f64, p: &Qsu2Params) -> Result<f64> {
    Ok((qsu2_weight_w2(t, p)? - qsu2_weight_w2_literal(t, p)?).max_abs())
}

/// Weight samples in factored form: v₁₁ w₁w₁* + v₂₂ w₂w₂* with wᵢ = (Uᵢf₀, Uᵢf₁).
pub struct Qsu2Sampler {
    params: Qsu2Params,
}

impl Qsu2Sampler {
    pub fn new(p: &Qsu2Params) -> Result<Self> {
        p.require_continuous()?;
        Ok(Qsu2Sampler { params: *p })
    }
}

impl WeightSampler for Qsu2Sampler {
    type Scalar = f64;

    fn sample(&self, t: f64) -> Result<WeightSample> {
        let (u, v, (v11, v22)) = qsu2_spectral_data(t, &self.params)?;
        Ok(WeightSample {
            t,
            lambda: t.cos(),
            density: 1.0,
            factors: vec![
                WeightFactor { mass: v11, vector: [u[0], v[0]] },
                WeightFactor { mass: v22, vector: [u[1], v[1]] },
            ],
        })
    }
}

pub fn qsu2_gram_table(p: &Qsu2Params, n_max: usize, cfg: &QuadratureConfig) -> Result<GramTable> {
    let sampler = Qsu2Sampler::new(p)?;
    let blocks = build_qsu2_blocks(p, n_max.max(1))?;
    gram_table(&blocks, &Measure::continuous(&sampler), n_max, cfg)
}

pub fn qsu2_gram(p: &Qsu2Params, n: usize, m: usize, tol: f64) -> Result<GramReport> {
    Ok(qsu2_gram_table(p, n.max(m), &QuadratureConfig::with_tol(tol))?.report(n, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::herm2_psd_check;

    fn p1() -> Qsu2Params {
        Qsu2Params::new(0.6, 0.5, 0.2, 0.3).unwrap()
    }

    fn p2() -> Qsu2Params {
        Qsu2Params::new(0.6, 0.3, -0.3, 1.1).unwrap()
    }

    #[test]
    fn canonicalization() {
        let p = Qsu2Params::new(0.6, 0.2, 0.5, -0.3).unwrap();
        assert_eq!((p.sigma, p.tau), (0.5, 0.2));
        assert!((p.phi - 0.3).abs() < 1e-15);
        let p = Qsu2Params::new(0.6, -0.5, -0.2, 0.3).unwrap();
        assert_eq!((p.sigma, p.tau), (0.5, 0.2));
        assert!((p.phi - (0.3 + PI)).abs() < 1e-15);
        let p = Qsu2Params::new(0.6, -0.2, -0.5, 0.3).unwrap();
        assert_eq!((p.sigma, p.tau), (0.5, 0.2));
        assert!((p.phi - (PI - 0.3)).abs() < 1e-15);
        assert_eq!(p2().tau, -0.3);
        assert!(Qsu2Params::new(0.6, 0.1, 0.1, f64::NAN).is_err());
    }

    #[test]
    fn symmetries_preserve_coefficients() {
        let raw = [(0.5, 0.2, 0.3), (0.2, 0.5, -0.3), (-0.5, -0.2, 0.3 + PI), (-0.2, -0.5, PI - 0.3)];
        let q = 0.6;
        let lit = |s: f64, t: f64, f: f64| Qsu2Params { q: QBase::new(q).unwrap(), sigma: s, tau: t, phi: f };
        let base = lit(raw[0].0, raw[0].1, raw[0].2);
        for &(s, t, f) in &raw[1..] {
            for n in 0..10 {
                let (a0, b0, c0) = qsu2_coeffs(n, &base);
                let (a1, b1, c1) = qsu2_coeffs(n, &lit(s, t, f));
                assert!((a0 - a1).abs() < 1e-15);
                assert!((b0 - b1).norm() < 1e-14);
                assert!((c0.unwrap() - c1.unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(qsu2_coeffs(-1, &p1()), (0.0, Complex64::new(0.0, 0.0), None));
        let z = Qsu2Params::new(0.6, 0.0, 0.0, 0.7).unwrap();
        for n in 0..10 {
            let (a, b, c) = qsu2_coeffs(n, &z);
            assert_eq!(b, Complex64::new(0.0, 0.0));
            assert!((c.unwrap() - 0.6f64.powi(1 + 2 * n as i32) * (1.4f64).cos()).abs() < 1e-15);
            assert!(a > 0.0 && a < 0.5);
        }
        assert!((qsu2_coeffs(200, &p1()).0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn b_is_imaginary_only_in_special_cases() {
        for phi in [0.0, PI] {
            let p = Qsu2Params::new(0.6, 0.5, 0.2, phi).unwrap();
            for n in 0..10 {
                assert!(qsu2_coeffs(n, &p).1.re.abs() < 1e-15);
            }
        }
        let p = Qsu2Params::new(0.6, 0.4, 0.4, 1.1).unwrap();
        assert!(qsu2_coeffs(3, &p).1.re.abs() < 1e-15);
        assert!(qsu2_coeffs(0, &p1()).1.re.abs() > 1e-3);
    }

    #[test]
    fn block_structure() {
        for p in [p1(), p2()] {
            let blocks = build_qsu2_blocks(&p, 50).unwrap();
            for (a, b) in blocks.a.iter().zip(&blocks.b) {
                assert_eq!(a.m[0][1], Complex64::new(0.0, 0.0));
                assert!(a.m[0][0].re > 0.0 && a.m[0][0].re <= 0.5 && a.m[1][1].re > 0.0 && a.m[1][1].re <= 0.5);
                assert_eq!(b.m[0][1], b.m[1][0].conj());
                assert_eq!(b.m[0][0].im, 0.0);
            }
        }
    }

    #[test]
    fn spectrum() {
        let s = discrete_spectrum(&p1());
        assert!(s.sigma_minus.is_empty() && s.sigma_plus.is_empty());
        let p = Qsu2Params::new(0.5, 1.0, 1.0, 0.0).unwrap();
        let s = discrete_spectrum(&p);
        assert_eq!(s.sigma_minus, vec![-1.25]);
        assert!(s.sigma_plus.is_empty());
        let p = Qsu2Params::new(0.5, 3.2, 0.1, 0.0).unwrap();
        let s = discrete_spectrum(&p);
        assert_eq!(s.sigma_minus.len(), 2);
        assert_eq!(s.sigma_plus.len(), 2);
        assert!(s.sigma_minus.iter().chain(&s.sigma_plus).all(|x| x.abs() > 1.0));
        assert!(!p.continuous_only());
        assert!(matches!(qsu2_weight_w2(1.0, &p), Err(Error::ParameterOutOfRegime(_))));
    }

    #[test]
    fn f10_brute_force() {
        let p = Qsu2Params::new(0.6, 0.0, 0.0, 0.0).unwrap();
        let t = PI / 2.0;
        let q: f64 = 0.6;
        let q2 = q * q;
        let x = Complex64::from_polar(1.0, t);
        let prod = |a: Complex64| (0..400).fold(re(1.0), |acc, j| acc * (re(1.0) - a * q2.powi(j)));
        let poch = |a: Complex64, k: usize| (0..k).fold(re(1.0), |acc, j| acc * (re(1.0) - a * q2.powi(j as i32)));
        let z = Complex64::from_polar(q, -t);
        let series: Complex64 = (0..200)
            .map(|k| {
                poch(x * q, k) * poch(-x * q, k) / (poch(re(-q2), k) * poch(re(q2), k)) * z.powi(k as i32)
            })
            .sum();
        let oracle = series / (prod(re(-1.0)).re.sqrt() * prod(Complex64::from_polar(q, t)));
        assert!((qsu2_f10(t, &p).unwrap() - oracle).norm() < 1e-10);
    }

    #[test]
    fn w2_structure() {
        for p in [p1(), p2()] {
            for i in 1..100 {
                let t = PI * i as f64 / 100.0;
                let w = qsu2_weight_w2(t, &p).unwrap();
                assert!((w.m[0][1] - w.m[1][0].conj()).norm() < 1e-12 * w.max_abs().max(1.0));
                let chk = herm2_psd_check(&w, 1e-10).unwrap();
                assert!(chk.eigenvalues.0 >= -1e-10);
            }
            for i in 0..10 {
                let t = 0.1 + 0.29 * i as f64;
                assert!(qsu2_weight_w2(t, &p).unwrap().det().re > 0.0);
            }
        }
    }

    #[test]
    fn w2_matches_printed_sums_with_conjugation() {
        let p = p1();
        let t = 1.3;
        let (s, r) = (p.sigma, p.tau);
        let (v11, v22) = asc_weight(t, s, r, p.q).unwrap();
        let (f0, f1) = (qsu2_f10(t, &p).unwrap(), qsu2_f11(t, &p).unwrap());
        let (g0, g1) = (qsu2_f10_with(t, -s, -r, &p).unwrap(), qsu2_f11_with(t, -s, -r, &p).unwrap());
        let w = qsu2_weight_w2(t, &p).unwrap();
        assert!((w.m[0][0].re - (f0.norm_sqr() * v11 + g0.norm_sqr() * v22)).abs() < 1e-13);
        assert!((w.m[1][1].re - (f1.norm_sqr() * v11 + g1.norm_sqr() * v22)).abs() < 1e-13);
        let cross = f0 * v11 * f1.conj() - g0 * v22 * g1.conj();
        assert!((w.m[0][1] - cross).norm() < 1e-13);
        assert!(qsu2_conjugation_discrepancy(t, &p).unwrap() > 1e-3);
    }

    #[test]
    fn small_gram() {
        let g = qsu2_gram_table(&p1(), 3, &QuadratureConfig::with_tol(1e-10)).unwrap();
        assert!(g.max_deviation() < 1e-6, "{}", g.max_deviation());
    }
}
