use super::mat2::Herm2;
use crate::error::{Error, Result};
use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Absolute tolerance on every component of the integral.
    pub tol: f64,
    pub max_depth: u32,
    /// Gauss–Legendre points per panel.
    pub order: usize,
    pub initial_panels: usize,
    /// Scale `tol` by the magnitude of the integral, as extrapolated from each panel.
    pub relative: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            tol: 1e-10,
            max_depth: 18,
            order: 20,
            initial_panels: 4,
            relative: false,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(tol: f64) -> Self {
        QuadratureConfig {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResult<V> {
    pub value: V,
    pub est_error: f64,
    pub nodes_used: usize,
}

type Rule = Vec<(f64, f64)>;

fn legendre_rule(order: usize) -> Result<&'static [(f64, f64)]> {
    static RULES: OnceLock<Vec<(usize, Rule)>> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        [10usize, 20, 30, 40]
            .iter()
            .map(|&n| {
                let g = GaussLegendre::new(n).expect("valid Gauss-Legendre degree");
                (n, g.as_node_weight_pairs().to_vec())
            })
            .collect()
    });
    rules
        .iter()
        .find(|(n, _)| *n == order)
        .map(|(_, r)| r.as_slice())
        .ok_or_else(|| Error::InvalidParameter(format!("quadrature order {order} not in {{10,20,30,40}}")))
}

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    value: Vec<Complex64>,
}

fn panel_rule<F>(f: &F, a: f64, b: f64, rule: &[(f64, f64)], len: usize) -> Result<Vec<Complex64>>
where
    F: Fn(f64) -> Result<Vec<Complex64>> + Sync,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    for &(x, w) in rule {
        let v = f(mid + half * x)?;
        if v.len() != len {
            return Err(Error::InvalidParameter(format!(
                "integrand returned {} components, expected {len}",
                v.len()
            )));
        }
        for (s, vi) in acc.iter_mut().zip(v) {
            *s += vi * (w * half);
        }
    }
    Ok(acc)
}

fn max_diff(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// Adaptive Gauss–Legendre integration of a vector-valued integrand over
/// `[a, b]`. Each panel is compared against the sum over its two halves;
/// panels are refined until the difference is below their share of `tol`.
pub fn integrate_vec<F>(
    f: F,
    a: f64,
    b: f64,
    len: usize,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult<Vec<Complex64>>>
where
    F: Fn(f64) -> Result<Vec<Complex64>> + Sync,
{
    if !(b > a) || !(cfg.tol > 0.0) || cfg.initial_panels == 0 {
        return Err(Error::InvalidParameter("integration interval or tolerance".into()));
    }
    let rule = legendre_rule(cfg.order)?;
    let width = b - a;
    let h = width / cfg.initial_panels as f64;
    let bounds: Vec<(f64, f64)> = (0..cfg.initial_panels)
        .map(|i| (a + i as f64 * h, if i + 1 == cfg.initial_panels { b } else { a + (i + 1) as f64 * h }))
        .collect();
    let mut active: Vec<Panel> = bounds
        .par_iter()
        .map(|&(pa, pb)| {
            panel_rule(&f, pa, pb, rule, len).map(|value| Panel {
                a: pa,
                b: pb,
                depth: 0,
                value,
            })
        })
        .collect::<Result<_>>()?;
    let mut nodes = active.len() * rule.len();
    let mut done: Vec<(f64, Vec<Complex64>, f64)> = Vec::new();

    while !active.is_empty() {
        let halves: Vec<(Vec<Complex64>, Vec<Complex64>)> = active
            .par_iter()
            .map(|p| {
                let m = 0.5 * (p.a + p.b);
                Ok((panel_rule(&f, p.a, m, rule, len)?, panel_rule(&f, m, p.b, rule, len)?))
            })
            .collect::<Result<_>>()?;
        nodes += 2 * active.len() * rule.len();
        let mut next = Vec::new();
        for (p, (l, r)) in active.into_iter().zip(halves) {
            let fine: Vec<Complex64> = l.iter().zip(&r).map(|(x, y)| x + y).collect();
            let diff = max_diff(&fine, &p.value);
            let mut share = cfg.tol * (p.b - p.a) / width;
            if cfg.relative {
                let mag = fine.iter().map(|z| z.norm()).fold(0.0, f64::max);
                share *= (mag * width / (p.b - p.a)).max(1.0);
            }
            if diff <= share {
                done.push((p.a, fine, diff));
            } else if p.depth + 1 >= cfg.max_depth {
                return Err(Error::NoConvergence {
                    depth: cfg.max_depth,
                    residual: diff,
                });
            } else {
                let m = 0.5 * (p.a + p.b);
                next.push(Panel { a: p.a, b: m, depth: p.depth + 1, value: l });
                next.push(Panel { a: m, b: p.b, depth: p.depth + 1, value: r });
            }
        }
        active = next;
    }

    done.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut value = vec![Complex64::new(0.0, 0.0); len];
    let mut est_error = 0.0;
    for (_, v, e) in &done {
        for (s, vi) in value.iter_mut().zip(v) {
            *s += vi;
        }
        est_error += e;
    }
    Ok(QuadratureResult {
        value,
        est_error,
        nodes_used: nodes,
    })
}

pub fn integrate_0_pi<F>(f: F, tol: f64) -> Result<QuadratureResult<Herm2>>
where
    F: Fn(f64) -> Result<Herm2> + Sync,
{
    let g = |t: f64| {
        let m = f(t)?;
        Ok(m.m.iter().flatten().copied().collect())
    };
    let r = integrate_vec(g, 0.0, PI, 4, &QuadratureConfig::with_tol(tol))?;
    let v = r.value;
    Ok(QuadratureResult {
        value: Herm2::new(v[0], v[1], v[2], v[3]),
        est_error: r.est_error,
        nodes_used: r.nodes_used,
    })
}

pub fn integrate_scalar_0_pi<F>(f: F, tol: f64) -> Result<QuadratureResult<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let g = |t: f64| Ok(vec![Complex64::new(f(t)?, 0.0)]);
    let r = integrate_vec(g, 0.0, PI, 1, &QuadratureConfig::with_tol(tol))?;
    Ok(QuadratureResult {
        value: r.value[0].re,
        est_error: r.est_error,
        nodes_used: r.nodes_used,
    })
}
