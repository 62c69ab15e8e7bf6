//! 2×2 matrix-valued orthogonal polynomials: generation from recurrence
//! blocks, weight assembly and Gram matrices.

use crate::error::{Error, Result};
use crate::fiveterm::RecurrenceBlocks;
use crate::numerics::{herm2_eigen, integrate_vec, Herm2, Mat2, QuadratureConfig};
use crate::real::{conj, to_c64, Real};
use num_complex::{Complex, Complex64};
use num_traits::Zero;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct MatPolyEvaluation<T: Real = f64> {
    pub lambda: T,
    pub values: Vec<Mat2<T>>,
}

fn need_blocks<T: Real>(blocks: &RecurrenceBlocks<T>, n: usize) -> Result<()> {
    if n > 0 && blocks.len() < n {
        Err(Error::SequenceTooShort {
            needed: n - 1,
            available: blocks.len(),
        })
    } else {
        Ok(())
    }
}

/// P₀(λ), …, P_n(λ) from λPₖ = AₖPₖ₊₁ + BₖPₖ + Aₖ₋₁*Pₖ₋₁, P₋₁ = 0, P₀ = I.
pub fn generate_p<T: Real>(lambda: &T, blocks: &RecurrenceBlocks<T>, n: usize) -> Result<MatPolyEvaluation<T>> {
    need_blocks(blocks, n)?;
    let mut values = Vec::with_capacity(n + 1);
    values.push(Mat2::identity());
    let lam = Mat2::scalar(lambda.clone());
    for k in 0..n {
        let mut rhs = &(lam.clone() - blocks.b[k].clone()) * &values[k];
        if k > 0 {
            rhs = rhs - &blocks.a[k - 1].adjoint() * &values[k - 1];
        }
        let next = blocks.a[k]
            .solve_lower(&rhs)
            .map_err(|_| Error::SingularBlock { index: k })?;
        values.push(next);
    }
    Ok(MatPolyEvaluation {
        lambda: lambda.clone(),
        values,
    })
}

/// Largest relative residual of the block recurrence over k < n.
pub fn recurrence_residual<T: Real>(eval: &MatPolyEvaluation<T>, blocks: &RecurrenceBlocks<T>) -> f64 {
    let lam = Mat2::scalar(eval.lambda.clone());
    let p = &eval.values;
    (0..p.len().saturating_sub(1))
        .map(|k| {
            let lhs = &lam * &p[k];
            let t1 = &blocks.a[k] * &p[k + 1];
            let t2 = &blocks.b[k] * &p[k];
            let t3 = if k > 0 {
                &blocks.a[k - 1].adjoint() * &p[k - 1]
            } else {
                Mat2::zero()
            };
            let scale = [&lhs, &t1, &t2, &t3].iter().map(|m| m.max_abs()).fold(1e-300, f64::max);
            (lhs - t1 - t2 - t3).max_abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Vectors P₀(λ)v, …, P_n(λ)v, generated by the same recurrence as `generate_p`.
pub fn apply_p<T: Real>(
    lambda: &T,
    blocks: &RecurrenceBlocks<T>,
    n: usize,
    v: &[Complex<T>; 2],
) -> Result<Vec<[Complex<T>; 2]>> {
    need_blocks(blocks, n)?;
    let mut out: Vec<[Complex<T>; 2]> = Vec::with_capacity(n + 1);
    out.push(v.clone());
    for k in 0..n {
        let b = &blocks.b[k];
        let cur = &out[k];
        let bv = b.mul_vec(cur);
        let mut r0 = cur[0].clone() * lambda.clone() - bv[0].clone();
        let mut r1 = cur[1].clone() * lambda.clone() - bv[1].clone();
        if k > 0 {
            let prev = &out[k - 1];
            let ap = blocks.a[k - 1].adjoint().mul_vec(prev);
            r0 = r0 - ap[0].clone();
            r1 = r1 - ap[1].clone();
        }
        let a = &blocks.a[k];
        let (a00, a10, a11) = (&a.m[0][0], &a.m[1][0], &a.m[1][1]);
        if a00.is_zero() || a11.is_zero() {
            return Err(Error::SingularBlock { index: k });
        }
        let y0 = r0 / a00.clone();
        let y1 = (r1 - a10.clone() * y0.clone()) / a11.clone();
        out.push([y0, y1]);
    }
    Ok(out)
}

fn outer(u: &[Complex64; 2], v: &[Complex64; 2]) -> Herm2 {
    Mat2::new(
        u[0] * v[0].conj(),
        u[0] * v[1].conj(),
        u[1] * v[0].conj(),
        u[1] * v[1].conj(),
    )
}

/// W = [[|u₀|², u₀ conj(u₁)], [conj(u₀) u₁, |u₁|²]].
pub fn w1_rank1(u0: Complex64, u1: Complex64) -> Herm2 {
    let u = [u0, u1];
    outer(&u, &u)
}

/// Gram matrix of the pair (u, v) in the inner product of `vmat`:
/// Wᵢⱼ = xⱼ* V xᵢ with (x₀, x₁) = (u, v). For diagonal V this is
/// Σₖ Vₖₖ m⁽ᵏ⁾ m⁽ᵏ⁾* with m⁽ᵏ⁾ = (uₖ, vₖ).
pub fn w2_from_pair(u: &[Complex64; 2], v: &[Complex64; 2], vmat: &Herm2) -> Herm2 {
    let ip = |x: &[Complex64; 2], y: &[Complex64; 2]| {
        let vy = vmat.mul_vec(y);
        x[0].conj() * vy[0] + x[1].conj() * vy[1]
    };
    Mat2::new(ip(u, u), ip(v, u), ip(u, v), ip(v, v))
}

/// The same assembly with every conjugation on the cross terms dropped.
pub fn w2_without_conjugation(u: &[Complex64; 2], v: &[Complex64; 2], vmat: &Herm2) -> Herm2 {
    let (v11, v22) = (vmat.m[0][0], vmat.m[1][1]);
    let cross = u[0] * v11 * v[0] + u[1] * v22 * v[1];
    Mat2::new(
        v11 * u[0].norm_sqr() + v22 * u[1].norm_sqr(),
        cross,
        cross,
        v11 * v[0].norm_sqr() + v22 * v[1].norm_sqr(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightFactor<T: Real = f64> {
    pub mass: f64,
    pub vector: [Complex<T>; 2],
}

/// dμ(t)·W(t) = density · Σ massᵢ vᵢvᵢ*, with polynomials evaluated at `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSample<T: Real = f64> {
    pub t: f64,
    pub lambda: T,
    pub density: f64,
    pub factors: Vec<WeightFactor<T>>,
}

impl<T: Real> WeightSample<T> {
    /// W(t) without the scalar density.
    pub fn weight(&self) -> Herm2 {
        self.factors.iter().fold(Herm2::zero(), |acc, f| {
            let v = [to_c64(&f.vector[0]), to_c64(&f.vector[1])];
            acc + outer(&v, &v).scale(&Complex64::new(f.mass, 0.0))
        })
    }

    pub fn rank1(t: f64, lambda: T, density: f64, u: [Complex<T>; 2]) -> Self {
        WeightSample {
            t,
            lambda,
            density,
            factors: vec![WeightFactor { mass: 1.0, vector: u }],
        }
    }
}

impl WeightSample<f64> {
    /// Factor a dense Hermitian weight through its spectral decomposition.
    pub fn from_dense(t: f64, lambda: f64, density: f64, w: &Herm2) -> Self {
        let factors = herm2_eigen(w)
            .into_iter()
            .filter(|(l, _)| *l != 0.0)
            .map(|(mass, vector)| WeightFactor { mass, vector })
            .collect();
        WeightSample {
            t,
            lambda,
            density,
            factors,
        }
    }
}

/// Source of weight samples on [0, π].
pub trait WeightSampler: Sync {
    type Scalar: Real;
    fn sample(&self, t: f64) -> Result<WeightSample<Self::Scalar>>;
}

/// Absolutely continuous part on [0, π] plus finitely many point masses;
/// for a point mass `density` is its mass.
pub struct Measure<'a, T: Real> {
    pub continuous: Option<&'a (dyn WeightSampler<Scalar = T> + 'a)>,
    pub discrete: Vec<WeightSample<T>>,
}

impl<'a, T: Real> Measure<'a, T> {
    pub fn continuous(s: &'a (dyn WeightSampler<Scalar = T> + 'a)) -> Self {
        Measure {
            continuous: Some(s),
            discrete: Vec::new(),
        }
    }

    pub fn discrete(points: Vec<WeightSample<T>>) -> Self {
        Measure {
            continuous: None,
            discrete: points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramReport {
    pub n: usize,
    pub m: usize,
    /// Row-major entries as (re, im).
    pub value: [[(f64, f64); 2]; 2],
    pub est_error: f64,
    pub nodes_used: usize,
    /// max |G − δₙₘ I| over entries.
    pub deviation: f64,
}

/// Gram matrices for all 0 ≤ n, m ≤ n_max from one shared quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct GramTable {
    pub n_max: usize,
    pub entries: Vec<Herm2>,
    pub est_error: f64,
    pub nodes_used: usize,
}

impl GramTable {
    pub fn get(&self, n: usize, m: usize) -> &Herm2 {
        &self.entries[n * (self.n_max + 1) + m]
    }

    pub fn deviation(&self, n: usize, m: usize) -> f64 {
        let g = self.get(n, m).clone();
        let target = if n == m { Herm2::identity() } else { Herm2::zero() };
        (g - target).max_abs()
    }

    pub fn max_deviation(&self) -> f64 {
        (0..=self.n_max)
            .flat_map(|n| (0..=self.n_max).map(move |m| (n, m)))
            .map(|(n, m)| self.deviation(n, m))
            .fold(0.0, f64::max)
    }

    pub fn report(&self, n: usize, m: usize) -> GramReport {
        let g = self.get(n, m);
        let e = |i: usize, j: usize| (g.m[i][j].re, g.m[i][j].im);
        GramReport {
            n,
            m,
            value: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
            est_error: self.est_error,
            nodes_used: self.nodes_used,
            deviation: self.deviation(n, m),
        }
    }
}

fn accumulate<T: Real>(
    sample: &WeightSample<T>,
    blocks: &RecurrenceBlocks<T>,
    n_max: usize,
    scale: f64,
    out: &mut [Complex64],
) -> Result<()> {
    let stride = n_max + 1;
    for f in &sample.factors {
        let vs = apply_p(&sample.lambda, blocks, n_max, &f.vector)?;
        let vs: Vec<[Complex64; 2]> = vs.iter().map(|v| [to_c64(&v[0]), to_c64(&v[1])]).collect();
        let w = scale * sample.density * f.mass;
        for n in 0..=n_max {
            for m in 0..=n_max {
                let base = (n * stride + m) * 4;
                for i in 0..2 {
                    for j in 0..2 {
                        out[base + 2 * i + j] += vs[n][i] * vs[m][j].conj() * w;
                    }
                }
            }
        }
    }
    Ok(())
}

/// ∫ Pₙ W Pₘ* dμ for all n, m ≤ n_max.
pub fn gram_table<T: Real>(
    blocks: &RecurrenceBlocks<T>,
    measure: &Measure<'_, T>,
    n_max: usize,
    cfg: &QuadratureConfig,
) -> Result<GramTable> {
    need_blocks(blocks, n_max)?;
    let len = (n_max + 1) * (n_max + 1) * 4;
    let mut total = vec![Complex64::zero(); len];
    let mut est_error = 0.0;
    let mut nodes_used = 0;
    if let Some(sampler) = measure.continuous {
        let f = |t: f64| {
            let s = sampler.sample(t)?;
            let mut out = vec![Complex64::zero(); len];
            accumulate(&s, blocks, n_max, 1.0, &mut out)?;
            Ok(out)
        };
        let r = integrate_vec(f, 0.0, PI, len, cfg)?;
        total = r.value;
        est_error = r.est_error;
        nodes_used = r.nodes_used;
    }
    for point in &measure.discrete {
        accumulate(point, blocks, n_max, 1.0, &mut total)?;
    }
    let entries = total
        .chunks_exact(4)
        .map(|c| Mat2::new(c[0], c[1], c[2], c[3]))
        .collect();
    Ok(GramTable {
        n_max,
        entries,
        est_error,
        nodes_used,
    })
}

pub fn gram<T: Real>(
    blocks: &RecurrenceBlocks<T>,
    measure: &Measure<'_, T>,
    n: usize,
    m: usize,
    tol: f64,
) -> Result<GramReport> {
    let table = gram_table(blocks, measure, n.max(m), &QuadratureConfig::with_tol(tol))?;
    Ok(table.report(n, m))
}

/// Kernel vector (conj u₁, −conj u₀) of the rank-one weight.
pub fn w1_kernel_vector(u0: Complex64, u1: Complex64) -> [Complex64; 2] {
    [u1.conj(), -u0.conj()]
}

/// Complex conjugate of a vector pair, handy for generic callers.
pub fn conj_pair<T: Real>(v: &[Complex<T>; 2]) -> [Complex<T>; 2] {
    [conj(&v[0]), conj(&v[1])]
}
