//! MVOPs built from a second-order q-difference operator on the little
//! q-Jacobi lattice, whose spectral decomposition is given by continuous
//! dual q-Hahn polynomials.

use crate::error::{Error, Result};
use crate::families::{cdqh_weight, lqj_orthonormal_in, CdqhParams, LqjParams};
use crate::fiveterm::{blocks_from_fiveterm, build_fiveterm, ConnectionSource, FiveTermCoeffs, RecurrenceBlocks};
use crate::mp::{Mp, Precision};
use crate::mvop::{gram_table, generate_p, w1_rank1, GramReport, GramTable, Measure, WeightSample, WeightSampler};
use crate::numerics::{Herm2, QuadratureConfig};
use crate::qcore::{phi21_in, qpoch_inf_in, QBase};
use crate::real::{cx, Real};
use num_complex::{Complex, Complex64};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LqjPipelineParams {
    pub q: QBase,
    pub a: f64,
    pub b: f64,
}

impl LqjPipelineParams {
    pub fn new(q: f64, a: f64, b: f64) -> Result<Self> {
        let qb = QBase::new(q)?;
        if !(a > 0.0 && a < 1.0 / q) {
            return Err(Error::InvalidParameter(format!("a = {a} must satisfy 0 < a < 1/q = {}", 1.0 / q)));
        }
        if !(b > 0.0 && b < 1.0 / q) {
            return Err(Error::InvalidParameter(format!("b = {b} must satisfy 0 < b < 1/q = {}", 1.0 / q)));
        }
        let p = LqjPipelineParams { q: qb, a, b };
        if !(p.k() > 0.0) {
            return Err(Error::InvalidParameter(format!("K = {} must be positive", p.k())));
        }
        Ok(p)
    }

    pub fn k(&self) -> f64 {
        let (q, a, b) = (self.q.value(), self.a, self.b);
        (1.0 - a * q) * (1.0 - b * q) / ((1.0 - a * b * q * q) * (1.0 - a * b * q * q * q))
    }

    /// The little q-Jacobi system (a, b).
    pub fn scalar(&self) -> Result<LqjParams> {
        LqjParams::new(self.q.value(), self.a, self.b)
    }

    /// The little q-Jacobi system (aq, bq).
    pub fn shifted(&self) -> Result<LqjParams> {
        self.scalar()?.shifted()
    }

    /// Continuous dual q-Hahn parameters carrying the spectral measure.
    pub fn cdqh(&self) -> Result<CdqhParams> {
        CdqhParams::specialization(self.q, self.b)
    }
}

/// How the integration variable t ∈ [0, π] is turned into the spectral variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectralMap {
    /// λ = (1 + aq + 2√(aq) cos t)/K, the spectrum of the operator.
    Affine,
    /// λ = 2 cos t/c with c = √(aq) + (1 − K)/√(aq).
    ScaledCos,
    /// λ = cos t.
    PlainCos,
}

impl SpectralMap {
    pub const ALL: [SpectralMap; 3] = [SpectralMap::Affine, SpectralMap::ScaledCos, SpectralMap::PlainCos];

    pub fn name(self) -> &'static str {
        match self {
            SpectralMap::Affine => "affine",
            SpectralMap::ScaledCos => "2cos t/c",
            SpectralMap::PlainCos => "cos t",
        }
    }

    pub fn apply<T: Real>(self, c: &LqjConsts<T>, cos_t: &T) -> T {
        let two = T::from_f64(2.0);
        match self {
            SpectralMap::Affine => {
                (T::one() + c.s.clone() * c.s.clone() + two * c.s.clone() * cos_t.clone()) / c.k.clone()
            }
            SpectralMap::ScaledCos => {
                let scale = c.s.clone() + (T::one() - c.k.clone()) / c.s.clone();
                two * cos_t.clone() / scale
            }
            SpectralMap::PlainCos => cos_t.clone(),
        }
    }
}

/// Closed-form constants of the pipeline at working precision `T`.
#[derive(Debug, Clone)]
pub struct LqjConsts<T: Real = f64> {
    q: T,
    a: T,
    b: T,
    ab: T,
    sq: T,
    sa: T,
    pub k: T,
    pub rho: T,
    pub tau: T,
    /// √(aq)
    pub s: T,
    sqrt_w0: T,
    sqrt_h1: T,
}

impl<T: Real> LqjConsts<T> {
    pub fn new(p: &LqjPipelineParams) -> Result<Self> {
        let f = T::from_f64;
        let (q, a, b) = (f(p.q.value()), f(p.a), f(p.b));
        let one = T::one();
        let ab = a.clone() * b.clone();
        let sab = ab.sqrt();
        let q2 = q.clone() * q.clone();
        let q3 = q2.clone() * q.clone();
        let k = (one.clone() - a.clone() * q.clone()) * (one.clone() - b.clone() * q.clone())
            / ((one.clone() - ab.clone() * q2.clone()) * (one.clone() - ab.clone() * q3.clone()));
        let rho = (one.clone() + q.clone() * sab.clone()) * (one.clone() + q2.clone() * sab.clone());
        let tau = (q.clone() * sab * (one.clone() + q.clone() * b.clone())
            + b.clone() * q.clone() * (one.clone() + a.clone() * q.clone()))
            / k.clone();
        let tol = 4.0 * T::epsilon();
        let w0 = qpoch_inf_in(&cx(a.clone() * q.clone()), &q, tol)?.value.re
            / qpoch_inf_in(&cx(ab.clone() * q2.clone()), &q, tol)?.value.re;
        let h1 = a.clone() * q.clone() * (one.clone() - q.clone()) * (one.clone() - b.clone() * q.clone())
            / ((one.clone() - ab.clone() * q3) * (one - a.clone() * q.clone()));
        Ok(LqjConsts {
            sq: q.sqrt(),
            sa: a.sqrt(),
            s: (a.clone() * q.clone()).sqrt(),
            q,
            a,
            b,
            ab,
            k,
            rho,
            tau,
            sqrt_w0: w0.sqrt(),
            sqrt_h1: h1.sqrt(),
        })
    }

    fn qp(&self, e: i64) -> T {
        self.q.powi(e as i32)
    }

    /// 1 − c·qᵉ
    fn om(&self, c: &T, e: i64) -> T {
        T::one() - c.clone() * self.qp(e)
    }

    fn one_minus_q(&self, e: i64) -> T {
        T::one() - self.qp(e)
    }

    /// (A(x), B(x), C(x)) of the operator.
    pub fn operator_coeffs(&self, x: &T) -> (T, T, T) {
        let one = T::one();
        let q = &self.q;
        let damp = one.clone() - self.b.clone() * q.clone() * x.clone();
        (
            self.a.clone() * q.clone() / self.k.clone()
                * damp.clone()
                * (self.b.clone() * q.clone() * q.clone() * x.clone() - one.clone()),
            damp.clone() * (x.clone() - one) / self.k.clone(),
            x.clone() * (self.rho.clone() / self.k.clone() * damp + self.tau.clone()),
        )
    }
}

impl<T: Real> ConnectionSource<T> for LqjConsts<T> {
    fn alpha(&self, n: usize) -> T {
        let n = n as i64;
        let (a, b, ab) = (&self.a, &self.b, &self.ab);
        let num = self.om(ab, 2) * self.om(ab, 3) * self.om(a, n + 1) * self.om(b, n + 1) * self.om(ab, n + 1) * self.om(ab, n + 2);
        let den = self.om(a, 1) * self.om(b, 1) * self.om(ab, 2 * n + 1) * self.om(ab, 2 * n + 3);
        self.sq.powi(n as i32) * num.sqrt() / (self.om(ab, 2 * n + 2) * den.sqrt())
    }

    fn beta(&self, n: usize) -> T {
        if n == 0 {
            return T::zero();
        }
        let n = n as i64;
        let (a, b, ab) = (&self.a, &self.b, &self.ab);
        let root = (self.om(ab, n + 1) * self.one_minus_q(n) * self.om(ab, 2) * self.om(ab, 3)
            / (self.om(a, 1) * self.om(b, 1)))
        .sqrt();
        // (1−aqⁿ)/(1−abq²ⁿ) − (1−aqⁿ⁺¹)/(1−abq²ⁿ⁺²) without cancellation.
        let e = T::one() - b.clone() * self.qp(n) * (T::one() + self.q.clone()) + ab.clone() * self.qp(2 * n + 1);
        self.sa.clone() * self.sq.powi(n as i32) * root * e / (self.om(ab, 2 * n) * self.om(ab, 2 * n + 2))
    }

    fn gamma(&self, n: usize) -> T {
        if n < 2 {
            return T::zero();
        }
        let n = n as i64;
        let (a, b, ab) = (&self.a, &self.b, &self.ab);
        let num = self.one_minus_q(n - 1) * self.one_minus_q(n) * self.om(a, 1) * self.om(a, n) * self.om(b, 1) * self.om(b, n);
        let den = self.om(ab, 2 * n - 1) * self.om(ab, 2 * n + 1) * self.om(ab, 2) * self.om(ab, 3);
        -(ab.clone() * self.sq.powi(3 * n as i32) / self.k.clone()) * num.sqrt() / (self.om(ab, 2 * n) * den.sqrt())
    }

    /// Eigenvalue of the (aq, bq) difference operator.
    fn lambda(&self, n: usize) -> T {
        let n = n as i64;
        self.qp(-n) * self.one_minus_q(n) * self.om(&self.ab, n + 3)
    }

    fn theta(&self, n: usize) -> T {
        let n = n as i64;
        let (a, b, ab) = (&self.a, &self.b, &self.ab);
        let num = a.clone() * self.q.clone() * self.om(a, n + 1) * self.om(b, n + 1) * self.one_minus_q(n + 1) * self.om(ab, n + 1);
        let den = self.om(ab, 2 * n + 1) * self.om(ab, 2 * n + 3);
        self.qp(n) * num.sqrt() / (self.om(ab, 2 * n + 2) * den.sqrt())
    }

    fn xi(&self, n: usize) -> T {
        let n = n as i64;
        let (a, b, ab) = (&self.a, &self.b, &self.ab);
        let qn = self.qp(n);
        qn.clone() * self.om(a, n + 1) * self.om(ab, n + 1) / (self.om(ab, 2 * n + 1) * self.om(ab, 2 * n + 2))
            + a.clone() * qn * self.one_minus_q(n) * self.om(b, n) / (self.om(ab, 2 * n) * self.om(ab, 2 * n + 1))
    }

    fn rho(&self) -> T {
        self.rho.clone()
    }

    fn tau(&self) -> T {
        self.tau.clone()
    }
}

/// (a_{n,n}, a_{n,n−1}, a_{n,n−2}) with pₙ(x; a, b) = Σⱼ a_{n,j} pⱼ(x; aq, bq).
pub fn connection_monic(n: usize, p: &LqjPipelineParams) -> (f64, f64, f64) {
    let (q, a, b) = (p.q.value(), p.a, p.b);
    let ab = a * b;
    let qp = |e: i64| q.powi(e as i32);
    let ni = n as i64;
    let ann = (1.0 - a * qp(ni + 1)) * (1.0 - ab * qp(ni + 1)) * (1.0 - ab * qp(ni + 2))
        / ((1.0 - a * q) * (1.0 - ab * qp(2 * ni + 1)) * (1.0 - ab * qp(2 * ni + 2)));
    let an1 = if n == 0 {
        0.0
    } else {
        let d = -a * qp(ni) * (1.0 - q) * (1.0 - b * qp(ni) * (1.0 + q) + ab * qp(2 * ni + 1))
            / ((1.0 - ab * qp(2 * ni)) * (1.0 - ab * qp(2 * ni + 2)));
        qp(1 - ni) * (1.0 - qp(ni)) * (1.0 - ab * qp(ni + 1)) / ((1.0 - q) * (1.0 - a * q)) * d
    };
    let an2 = if n < 2 {
        0.0
    } else {
        -(a * ab * qp(ni + 2) / p.k()) * (1.0 - qp(ni - 1)) * (1.0 - qp(ni)) * (1.0 - b * q) * (1.0 - b * qp(ni))
            / ((1.0 - ab * q * q) * (1.0 - ab * qp(3)) * (1.0 - ab * qp(2 * ni)) * (1.0 - ab * qp(2 * ni + 1)))
    };
    (ann, an1, an2)
}

/// (αₙ, βₙ, γₙ) with φₙ = αₙΦₙ + βₙΦₙ₋₁ + γₙΦₙ₋₂ for the orthonormal systems (a, b) and (aq, bq).
pub fn connection_orthonormal(n: usize, p: &LqjPipelineParams) -> Result<(f64, f64, f64)> {
    let c = LqjConsts::<f64>::new(p)?;
    let beta = if n == 0 { 0.0 } else { c.beta(n) };
    let gamma = if n < 2 { 0.0 } else { c.gamma(n) };
    Ok((c.alpha(n), beta, gamma))
}

/// (θₙ, ξₙ) with xφₙ = θₙφₙ₊₁ + ξₙφₙ + θₙ₋₁φₙ₋₁.
pub fn lqj_threeterm(n: usize, p: &LqjPipelineParams) -> Result<(f64, f64)> {
    let c = LqjConsts::<f64>::new(p)?;
    Ok((c.theta(n), c.xi(n)))
}

/// Five-term coefficients aₙ, bₙ, cₙ for n < len.
pub fn lqj_fiveterm<T: Real>(p: &LqjPipelineParams, len: usize) -> Result<FiveTermCoeffs<T>> {
    build_fiveterm(&LqjConsts::<T>::new(p)?, len)
}

/// Blocks A₀…A_N, B₀…B_N.
pub fn build_lqj_blocks<T: Real>(p: &LqjPipelineParams, n: usize) -> Result<RecurrenceBlocks<T>> {
    blocks_from_fiveterm(&lqj_fiveterm::<T>(p, 2 * n + 2)?, n)
}

/// Coefficients of (Tf)(x) = A(x)(f(qx) − f(x)) + B(x)(f(x/q) − f(x)) + C(x)f(x).
pub fn operator_coeffs(x: f64, p: &LqjPipelineParams) -> Result<(f64, f64, f64)> {
    Ok(LqjConsts::<f64>::new(p)?.operator_coeffs(&x))
}

/// The operator r(x)(L + ρ) + τx, with L the (aq, bq) difference operator.
pub fn operator_apply<F: Fn(f64) -> f64>(f: F, x: f64, p: &LqjPipelineParams) -> Result<f64> {
    operator_apply_in(&LqjConsts::<f64>::new(p)?, |y: &f64| Ok(f(*y)), &x)
}

/// [`operator_apply`] at working precision `T`; `f` may fail.
pub fn operator_apply_in<T: Real, F: Fn(&T) -> Result<T>>(c: &LqjConsts<T>, f: F, x: &T) -> Result<T> {
    let (a, b, cc) = c.operator_coeffs(x);
    let fx = f(x)?;
    Ok(a * (f(&(c.q.clone() * x.clone()))? - fx.clone()) + b * (f(&(x.clone() / c.q.clone()))? - fx.clone()) + cc * fx)
}

/// Entries (J_{k,k+1}, J_{k+1,k}, J_{k,k}) of the operator in the orthonormal lattice basis.
pub fn lattice_jacobi(k: usize, p: &LqjPipelineParams) -> Result<(f64, f64, f64)> {
    let c = LqjConsts::<f64>::new(p)?;
    let q = p.q.value();
    let x = q.powi(k as i32);
    // w_{k+1}/w_k
    let ratio = p.a * q * (1.0 - p.b * q * x) / (1.0 - q * x);
    let (ak, bk, ck) = c.operator_coeffs(&x);
    let (_, bk1, _) = c.operator_coeffs(&(q * x));
    Ok((ak / ratio.sqrt(), bk1 * ratio.sqrt(), ck - ak - bk))
}

/// (α̃ₖ, β̃ₖ) read off from the lattice Jacobi matrix after the affine change
/// (K/√(aq))J − (√(aq) + 1/√(aq)) and the sign flip eₖ → (−1)ᵏeₖ.
pub fn jacobi_entries_from_operator(k: usize, p: &LqjPipelineParams) -> Result<(f64, f64)> {
    let s = (p.a * p.q.value()).sqrt();
    let kk = p.k();
    let (up, _, diag) = lattice_jacobi(k, p)?;
    Ok((-(kk / s) * up, (kk / s) * diag - (s + 1.0 / s)))
}

/// (α̃ₖ, β̃ₖ) in closed form with ρ and τ substituted.
pub fn jacobi_entries_closed_form(k: usize, p: &LqjPipelineParams) -> (f64, f64) {
    let (q, a, b) = (p.q.value(), p.a, p.b);
    let kk = p.k();
    let s = (a * q).sqrt();
    let sab = (a * b).sqrt();
    let rho = (1.0 + q * sab) * (1.0 + q * q * sab);
    let tau = (q * sab * (1.0 + q * b) + b * q * (1.0 + a * q)) / kk;
    let qk = q.powi(k as i32);
    let off = (1.0 - b * q * q * qk) * ((1.0 - q * qk) * (1.0 - b * q * qk)).sqrt();
    let base = rho - 1.0 - a * b * q * q * q;
    let diag = qk / s * (base - b * q * (1.0 + a * q) + kk * tau) - qk * qk / s * b * q * base;
    (off, diag)
}

fn generating_function<T: Real>(c: &LqjConsts<T>, x: &Complex<T>, t: &T) -> Result<Complex<T>> {
    let tol = 4.0 * T::epsilon();
    let q = &c.q;
    let a_ = (q.clone() * c.b.clone()).sqrt();
    let c_ = q.clone() * a_.clone();
    let xb = Complex::new(x.re.clone(), -x.im.clone());
    let num = qpoch_inf_in(&cx(a_.clone() * t.clone()), q, tol)?.value;
    let den = qpoch_inf_in(&(x.clone() * t.clone()), q, tol)?.value;
    let series = phi21_in(
        &(x.clone() * a_),
        &(x.clone() * c_),
        &cx(q.clone() * q.clone() * c.b.clone()),
        q,
        &(xb * t.clone()),
        tol,
    )?
    .value;
    Ok(num / den * series * c.sqrt_w0.clone())
}

/// (F₀, F₁) at cos t = `cos_t`, the images of φ₀ and φ₁ under the spectral map.
pub fn lqj_f_pair<T: Real>(c: &LqjConsts<T>, cos_t: &T) -> Result<[Complex<T>; 2]> {
    let sin_t = (T::one() - cos_t.clone() * cos_t.clone()).abs().sqrt();
    let x = Complex::new(cos_t.clone(), sin_t);
    let t0 = -c.s.clone();
    let g0 = generating_function(c, &x, &t0)?;
    let g1 = generating_function(c, &x, &(c.q.clone() * t0))?;
    let one = T::one();
    let ratio = (one.clone() - c.ab.clone() * c.q.clone() * c.q.clone()) / (one - c.a.clone() * c.q.clone());
    let f1 = -(g0.clone() - g1 * ratio) / c.sqrt_h1.clone();
    Ok([g0, f1])
}

pub fn lqj_f0(t: f64, p: &LqjPipelineParams) -> Result<Complex64> {
    Ok(lqj_f_pair(&LqjConsts::<f64>::new(p)?, &t.cos())?[0])
}

pub fn lqj_f1(t: f64, p: &LqjPipelineParams) -> Result<Complex64> {
    Ok(lqj_f_pair(&LqjConsts::<f64>::new(p)?, &t.cos())?[1])
}

/// W₁(t) = (F₀, F₁)(F₀, F₁)*.
pub fn lqj_weight_w1(t: f64, p: &LqjPipelineParams) -> Result<Herm2> {
    let [f0, f1] = lqj_f_pair(&LqjConsts::<f64>::new(p)?, &t.cos())?;
    Ok(w1_rank1(f0, f1))
}

/// Weight samples for the Gram integral: continuous dual q-Hahn density
/// times W₁, polynomials evaluated through `map`.
pub struct LqjSampler<T: Real> {
    consts: LqjConsts<T>,
    cdqh: CdqhParams,
    map: SpectralMap,
}

impl<T: Real> LqjSampler<T> {
    pub fn new(p: &LqjPipelineParams, map: SpectralMap) -> Result<Self> {
        Ok(LqjSampler {
            consts: LqjConsts::new(p)?,
            cdqh: p.cdqh()?,
            map,
        })
    }
}

impl<T: Real> WeightSampler for LqjSampler<T> {
    type Scalar = T;

    fn sample(&self, t: f64) -> Result<WeightSample<T>> {
        let cos_t = T::from_f64(t.cos());
        let density = cdqh_weight(t, &self.cdqh)?;
        let u = lqj_f_pair(&self.consts, &cos_t)?;
        let lambda = self.map.apply(&self.consts, &cos_t);
        Ok(WeightSample::rank1(t, lambda, density, u))
    }
}

/// Working precision for the Gram integral: the largest ‖Pₙ(λ)‖ over a
/// sweep of t, plus 100 guard bits.
pub fn lqj_required_precision(p: &LqjPipelineParams, n_max: usize, map: SpectralMap) -> Result<Precision> {
    let consts = LqjConsts::<f64>::new(p)?;
    let blocks = build_lqj_blocks::<f64>(p, n_max.max(1))?;
    let mut growth = 1.0f64;
    for i in 0..=32 {
        let t = PI * i as f64 / 32.0;
        let lambda = map.apply(&consts, &t.cos());
        let ev = generate_p(&lambda, &blocks, n_max)?;
        growth = ev.values.iter().map(|m| m.max_abs()).fold(growth, f64::max);
    }
    let bits = growth.log2() + 100.0;
    Ok(if bits.is_finite() { Precision::for_bits(bits) } else { Precision::Bits768 })
}

fn gram_at<T: Real>(p: &LqjPipelineParams, n_max: usize, map: SpectralMap, cfg: &QuadratureConfig) -> Result<GramTable> {
    let blocks = build_lqj_blocks::<T>(p, n_max.max(1))?;
    let sampler = LqjSampler::<T>::new(p, map)?;
    gram_table(&blocks, &Measure::continuous(&sampler), n_max, cfg)
}

/// Gram matrices for n, m ≤ n_max at an explicit working precision.
pub fn lqj_gram_table_at(
    p: &LqjPipelineParams,
    n_max: usize,
    map: SpectralMap,
    cfg: &QuadratureConfig,
    precision: Precision,
) -> Result<GramTable> {
    match precision {
        Precision::Double => gram_at::<f64>(p, n_max, map, cfg),
        Precision::Bits256 => gram_at::<Mp<256>>(p, n_max, map, cfg),
        Precision::Bits512 => gram_at::<Mp<512>>(p, n_max, map, cfg),
        Precision::Bits768 => gram_at::<Mp<768>>(p, n_max, map, cfg),
    }
}

/// Gram matrices for n, m ≤ n_max with the working precision chosen automatically.
pub fn lqj_gram_table(p: &LqjPipelineParams, n_max: usize, map: SpectralMap, cfg: &QuadratureConfig) -> Result<GramTable> {
    let precision = lqj_required_precision(p, n_max, map)?;
    lqj_gram_table_at(p, n_max, map, cfg, precision)
}

pub fn lqj_gram(p: &LqjPipelineParams, n: usize, m: usize, tol: f64) -> Result<GramReport> {
    let table = lqj_gram_table(p, n.max(m), SpectralMap::Affine, &QuadratureConfig::with_tol(tol))?;
    Ok(table.report(n, m))
}

/// Pointwise (T φₙ)(x) from the five-term recurrence.
pub fn fiveterm_apply(ft: &FiveTermCoeffs, n: usize, x: f64, p: &LqjParams) -> Result<f64> {
    fiveterm_apply_in(ft, n, &x, p)
}

/// [`fiveterm_apply`] at working precision `T`.
pub fn fiveterm_apply_in<T: Real>(ft: &FiveTermCoeffs<T>, n: usize, x: &T, p: &LqjParams) -> Result<T> {
    let phi = |j: isize| -> Result<T> {
        if j < 0 {
            Ok(T::zero())
        } else {
            lqj_orthonormal_in(j as usize, x, p)
        }
    };
    let n = n as isize;
    Ok(ft.a_at(n) * phi(n + 2)?
        + ft.b_at(n).re * phi(n + 1)?
        + ft.c[n as usize].clone() * phi(n)?
        + ft.b_at(n - 1).re * phi(n - 1)?
        + ft.a_at(n - 2) * phi(n - 2)?)
}
