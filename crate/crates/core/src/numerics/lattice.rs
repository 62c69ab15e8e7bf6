use crate::error::{Error, Result};
use crate::qcore::{SeriesValue, MAX_TERMS};
use num_complex::Complex64;

/// Consecutive ratios below `r < 1` required before the tail bound is trusted.
const RATIO_RUN: usize = 5;
const DECAY_PATIENCE: usize = 50;

/// Σ_{k≥0} term(k) for terms decaying at least geometrically.
///
/// After [`RATIO_RUN`] consecutive ratios `|t_{k+1}/t_k| ≤ r < 1` the tail is
/// bounded by `|t_k| r / (1 − r)` with `r` the largest ratio seen in the run.
pub fn qlattice_sum<F>(mut term: F, tol: f64) -> Result<SeriesValue>
where
    F: FnMut(usize) -> Complex64,
{
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prev = term(0);
    sum += prev;
    let mut run = 0usize;
    let mut run_max: f64 = 0.0;
    let mut stalled = 0usize;
    for k in 1..MAX_TERMS {
        let t = term(k);
        sum += t;
        let (pa, ta) = (prev.norm(), t.norm());
        if ta == 0.0 && pa == 0.0 {
            run += 1;
        } else if pa > 0.0 && ta < pa {
            run += 1;
            run_max = run_max.max(ta / pa);
            stalled = 0;
        } else if ta == 0.0 {
            run += 1;
        } else {
            run = 0;
            run_max = 0.0;
            stalled += 1;
            if stalled >= DECAY_PATIENCE {
                return Err(Error::NoDecay { index: k });
            }
        }
        if run >= RATIO_RUN {
            let err = if run_max > 0.0 { ta * run_max / (1.0 - run_max) } else { ta };
            if err <= tol {
                return Ok(SeriesValue {
                    value: sum,
                    abs_error: err,
                    terms_used: k + 1,
                });
            }
        }
        prev = t;
    }
    Err(Error::NonConvergence {
        what: "lattice sum",
        terms: MAX_TERMS,
    })
}

pub fn qlattice_sum_real<F>(mut term: F, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(usize) -> f64,
{
    let s = qlattice_sum(|k| Complex64::new(term(k), 0.0), tol)?;
    Ok((s.value.re, s.abs_error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::little_q_jacobi::{lqj_weight, LqjParams};

    #[test]
    fn examples() {
        let g = qlattice_sum_real(|k| 0.5f64.powi(k as i32), 1e-15).unwrap();
        assert!((g.0 - 2.0).abs() < 1e-15);
        let d = qlattice_sum_real(|k| if k == 0 { 1.0 } else { 0.0 }, 1e-15).unwrap();
        assert_eq!(d.0, 1.0);
        let p = LqjParams::new(0.5, 0.3, 0.4).unwrap();
        let m = qlattice_sum_real(|k| lqj_weight(k, &p).unwrap(), 1e-15).unwrap();
        assert!((m.0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn geometric_series() {
        for i in 1..=9 {
            let x = i as f64 / 10.0;
            let (s, err) = qlattice_sum_real(|k| x.powi(k as i32), 1e-13).unwrap();
            assert!(err <= 1e-13);
            assert!((s - 1.0 / (1.0 - x)).abs() <= 2e-13 / (1.0 - x), "x = {x}");
        }
    }

    #[test]
    fn no_decay() {
        assert!(matches!(qlattice_sum(|_| Complex64::new(1.0, 0.0), 1e-12), Err(Error::NoDecay { .. })));
    }
}
