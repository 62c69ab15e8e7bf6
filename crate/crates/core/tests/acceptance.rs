//! Acceptance suite. Runs every criterion, prints one line each and exits
//! non-zero if any criterion fails.

use num_complex::Complex64;
use qmvop::families::{
    cdqh_orthonormal_recurrence, lqj_difference_op_in, lqj_eigenvalue, lqj_eval, lqj_eval_in, lqj_eval_lattice, lqj_norm,
    lqj_weight, LqjParams,
};
use qmvop::lqj::{
    build_lqj_blocks, connection_monic, fiveterm_apply_in, jacobi_entries_closed_form, jacobi_entries_from_operator,
    lqj_f0, lqj_f1, lqj_fiveterm, lqj_gram_table, lqj_weight_w1, operator_apply_in, LqjConsts, LqjPipelineParams,
    SpectralMap,
};
use qmvop::families::lqj_orthonormal_in;
use qmvop::mp::Mp;
use qmvop::mvop::w1_kernel_vector;
use qmvop::numerics::{hermitian_defect, herm2_eigenvalues, Herm2, QuadratureConfig};
use qmvop::qcore::{phi21, qpoch_finite, qpoch_inf, QBase, DEFAULT_TOL};
use qmvop::qsu2::{build_qsu2_blocks, qsu2_gram_table, qsu2_weight_w2, Qsu2Params};
use qmvop::real::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

type M = Mp<256>;

const LQJ_SETS: [(f64, f64, f64); 2] = [(0.5, 0.3, 0.4), (0.4, 0.5, 0.2)];
const QSU2_SETS: [(f64, f64, f64, f64); 2] = [(0.6, 0.5, 0.2, 0.3), (0.6, 0.3, -0.3, 1.1)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn lqj_sets() -> Vec<LqjPipelineParams> {
    LQJ_SETS.iter().map(|&(q, a, b)| LqjPipelineParams::new(q, a, b).unwrap()).collect()
}

fn qsu2_sets() -> Vec<Qsu2Params> {
    QSU2_SETS.iter().map(|&(q, s, t, f)| Qsu2Params::new(q, s, t, f).unwrap()).collect()
}

fn t_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| PI * (j as f64 + 0.5) / n as f64)
}

fn scalar_orthogonality() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &(q, a, b) in &LQJ_SETS {
        let p = LqjParams::new(q, a, b).unwrap();
        // Masses fall like (aq)^k; 120 points leave a tail far below 1e-30.
        let kmax = 120;
        let w: Vec<f64> = (0..kmax).map(|k| lqj_weight(k, &p).unwrap()).collect();
        let vals: Vec<Vec<f64>> = (0..=10)
            .map(|n| (0..kmax).map(|k| lqj_eval_lattice(n, k as i32, &p).unwrap()).collect())
            .collect();
        for n in 0..=10 {
            for m in 0..=n {
                let s: f64 = (0..kmax).map(|k| vals[n][k] * vals[m][k] * w[k]).sum();
                let expect = if n == m { lqj_norm(n, &p) } else { 0.0 };
                worst = worst.max((s - expect).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-10 && elapsed < Duration::from_secs(1),
        format!("max |<p_n,p_m> - delta h_n| = {worst:.2e} (tol 1e-10), runtime limit 1 s"),
    )
}

fn eigenfunction() -> Outcome {
    let mut worst = 0.0f64;
    for &(q, a, b) in &LQJ_SETS {
        let p = LqjParams::new(q, a, b).unwrap();
        let qm = M::from_f64(q);
        for n in 0..=10 {
            let lam = M::from_f64(q).powi(-(n as i32))
                * (M::from_f64(1.0) - qm.powi(n as i32))
                * (M::from_f64(1.0) - M::from_f64(a * b) * qm.powi(n as i32 + 1));
            for k in 0..=20 {
                let x = qm.powi(k);
                let lhs = lqj_difference_op_in(|y: &M| lqj_eval_in(n, y, &p), &x, &p).unwrap();
                let rhs = lam.clone() * lqj_eval_in(n, &x, &p).unwrap();
                let scale = lhs.to_f64().abs().max(rhs.to_f64().abs());
                if scale > 0.0 {
                    worst = worst.max((lhs - rhs).to_f64().abs() / scale);
                }
            }
            let lam64 = lqj_eigenvalue(n, &p);
            worst = worst.max((lam64 - lam.to_f64()).abs() / lam64.abs().max(1.0));
        }
    }
    outcome(worst < 1e-9, format!("max relative residual = {worst:.2e} (tol 1e-9)"))
}

fn connection_expansion() -> Outcome {
    let mut worst = 0.0f64;
    for p in lqj_sets() {
        let (s, sh) = (p.scalar().unwrap(), p.shifted().unwrap());
        for n in 0..=10usize {
            let (c0, c1, c2) = connection_monic(n, &p);
            for k in 0..=20 {
                let x = p.q.value().powi(k);
                let shifted = |j: usize| lqj_eval(j, x, &sh).unwrap();
                let mut rhs = c0 * shifted(n);
                if n >= 1 {
                    rhs += c1 * shifted(n - 1);
                }
                if n >= 2 {
                    rhs += c2 * shifted(n - 2);
                }
                let lhs = lqj_eval(n, x, &s).unwrap();
                worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
            }
        }
    }
    outcome(worst < 1e-9, format!("max residual = {worst:.2e} (tol 1e-9, relative to max(1,|p_n|))"))
}

fn operator_consistency() -> Outcome {
    let mut worst = 0.0f64;
    for p in lqj_sets() {
        let s = p.scalar().unwrap();
        let c = LqjConsts::<M>::new(&p).unwrap();
        let ft = lqj_fiveterm::<M>(&p, 12).unwrap();
        for n in 0..=8usize {
            for k in 0..=20 {
                let x = M::from_f64(p.q.value()).powi(k);
                let direct = operator_apply_in(&c, |y| lqj_orthonormal_in(n, y, &s), &x).unwrap();
                let five = fiveterm_apply_in(&ft, n, &x, &s).unwrap();
                let scale = direct.to_f64().abs().max(five.to_f64().abs());
                if scale > 0.0 {
                    worst = worst.max((direct - five).to_f64().abs() / scale);
                }
            }
        }
    }
    outcome(worst < 1e-8, format!("max relative error = {worst:.2e} (tol 1e-8)"))
}

fn jacobi_match() -> Outcome {
    let mut worst = 0.0f64;
    for p in lqj_sets() {
        let cd = p.cdqh().unwrap();
        for k in 0..=30 {
            let (ra, rb) = cdqh_orthonormal_recurrence(k, &cd);
            let (ca, cb) = jacobi_entries_closed_form(k, &p);
            let (oa, ob) = jacobi_entries_from_operator(k, &p).unwrap();
            for d in [ca - ra, cb - rb, oa - ra, ob - rb] {
                worst = worst.max(d.abs());
            }
        }
    }
    outcome(worst < 1e-12, format!("max |entry difference| = {worst:.2e} (tol 1e-12)"))
}

fn lqj_orthogonality() -> Outcome {
    let start = Instant::now();
    let cfg = QuadratureConfig::with_tol(1e-8);
    let mut worst = 0.0f64;
    let mut ok = true;
    for p in lqj_sets() {
        match lqj_gram_table(&p, 8, SpectralMap::Affine, &cfg) {
            Ok(g) => worst = worst.max(g.max_deviation()),
            Err(e) => {
                ok = false;
                eprintln!("    gram failed: {e}");
            }
        }
    }
    let main_time = start.elapsed();

    // Spectral-map resolution on a short table: only the right map makes
    // even the first few blocks orthonormal.
    let mut rcfg = QuadratureConfig::with_tol(1e-8);
    rcfg.relative = true;
    let mut winners = Vec::new();
    let mut lines = Vec::new();
    for map in SpectralMap::ALL {
        let devs: Vec<f64> = lqj_sets()
            .iter()
            .map(|p| lqj_gram_table(p, 3, map, &rcfg).map_or(f64::INFINITY, |g| g.max_deviation()))
            .collect();
        let pass = devs.iter().all(|d| *d < 1e-6);
        lines.push(format!("{}: {:.1e}/{:.1e}", map.name(), devs[0], devs[1]));
        if pass {
            winners.push(map);
        }
    }
    let resolved = winners == [SpectralMap::Affine];
    let total = start.elapsed();
    let pass = ok && worst < 1e-6 && resolved && total < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "max Gram deviation n,m<=8 = {worst:.2e} (tol 1e-6) in {main_time:.1?}; resolution [{}] -> winner {:?}; total {total:.1?}",
            lines.join(", "),
            winners.iter().map(|m| m.name()).collect::<Vec<_>>()
        ),
    )
}

fn qsu2_orthogonality() -> Outcome {
    let start = Instant::now();
    let cfg = QuadratureConfig::with_tol(1e-8);
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut sets = qsu2_sets();
    // The symmetric parameterizations describe the same operator.
    sets.extend(QSU2_SETS.iter().map(|&(q, s, t, f)| Qsu2Params::new(q, t, s, -f).unwrap()));
    for p in &sets {
        match qsu2_gram_table(p, 8, &cfg) {
            Ok(g) => worst = worst.max(g.max_deviation()),
            Err(e) => {
                ok = false;
                eprintln!("    gram failed: {e}");
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = ok && worst < 1e-6 && elapsed < Duration::from_secs(60);
    outcome(pass, format!("max Gram deviation n,m<=8 = {worst:.2e} (tol 1e-6) in {elapsed:.1?}"))
}

fn apply(w: &Herm2, v: &[Complex64; 2]) -> [Complex64; 2] {
    w.mul_vec(v)
}

fn weight_structure() -> Outcome {
    let mut det_ratio = 0.0f64;
    let mut kernel = 0.0f64;
    let mut min_trace = f64::INFINITY;
    for p in lqj_sets() {
        for t in t_grid(200) {
            let w = lqj_weight_w1(t, &p).unwrap();
            let tr = w.trace().re;
            min_trace = min_trace.min(tr);
            det_ratio = det_ratio.max(w.det().norm() / (tr * tr));
            let k = w1_kernel_vector(lqj_f0(t, &p).unwrap(), lqj_f1(t, &p).unwrap());
            let knorm = (k[0].norm_sqr() + k[1].norm_sqr()).sqrt();
            let r = apply(&w, &k);
            kernel = kernel.max((r[0].norm_sqr() + r[1].norm_sqr()).sqrt() / (tr * knorm));
        }
    }
    let mut min_eig = f64::INFINITY;
    let mut herm = 0.0f64;
    for p in qsu2_sets() {
        for t in t_grid(200) {
            let w = qsu2_weight_w2(t, &p).unwrap();
            herm = herm.max(hermitian_defect(&w));
            min_eig = min_eig.min(herm2_eigenvalues(&w).0);
        }
    }
    let pass = det_ratio < 1e-12 && min_trace > 0.0 && kernel < 1e-12 && herm <= 1e-12 && min_eig >= -1e-10;
    outcome(
        pass,
        format!(
            "W1: max det/tr^2 = {det_ratio:.1e}, min trace = {min_trace:.2e}, kernel residual = {kernel:.1e}; W2: hermitian defect = {herm:.1e}, min eigenvalue = {min_eig:.2e}"
        ),
    )
}

fn block_ok(a: &Herm2, b: &Herm2) -> (bool, f64) {
    let det = a.det().norm();
    let nonsingular = det > 0.0 && det.is_finite();
    (nonsingular, hermitian_defect(b) / b.max_abs().max(f64::MIN_POSITIVE))
}

fn block_structure() -> Outcome {
    let mut singular = 0usize;
    let mut herm = 0.0f64;
    let mut positive_a = 0usize;
    for p in lqj_sets() {
        let blocks = build_lqj_blocks::<M>(&p, 50).unwrap();
        for k in 0..=50 {
            let (a, b) = (blocks.a[k].to_f64(), blocks.b[k].to_f64());
            let (ns, h) = block_ok(&a, &b);
            singular += usize::from(!ns);
            herm = herm.max(h);
            positive_a += usize::from(a.m[0][0].re >= 0.0) + usize::from(a.m[1][1].re >= 0.0);
        }
    }
    for p in qsu2_sets() {
        let blocks = build_qsu2_blocks(&p, 50).unwrap();
        for k in 0..=50 {
            let (ns, h) = block_ok(&blocks.a[k], &blocks.b[k]);
            singular += usize::from(!ns);
            herm = herm.max(h);
        }
    }
    let pass = singular == 0 && herm <= 1e-15;
    outcome(
        pass,
        format!(
            "singular A_n: {singular}, max relative hermitian defect of B_n: {herm:.1e}, lqj diagonal a_n >= 0: {positive_a} (expected 0)"
        ),
    )
}

fn kernel_regression() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_split = 0.0f64;
    let mut worst_inf = 0.0f64;
    let mut worst_poly = 0.0f64;
    for _ in 0..1000 {
        let q: f64 = rng.gen_range(0.05..0.95);
        let qb = QBase::new(q).unwrap();
        let a = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let (n, m) = (rng.gen_range(0..=20usize), rng.gen_range(0..=20usize));
        let lhs = qpoch_finite(a, qb, n) * qpoch_finite(a * q.powi(n as i32), qb, m);
        let rhs = qpoch_finite(a, qb, n + m);
        worst_split = worst_split.max((lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE));

        let qi: f64 = rng.gen_range(0.05..0.9);
        let qib = QBase::new(qi).unwrap();
        let ai = Complex64::new(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9));
        let full = qpoch_inf(ai, qib, DEFAULT_TOL).unwrap().value;
        let split = qpoch_finite(ai, qib, n) * qpoch_inf(ai * qi.powi(n as i32), qib, DEFAULT_TOL).unwrap().value;
        worst_inf = worst_inf.max((full - split).norm() / full.norm());

        // A terminating series equals the degree-d polynomial whose
        // coefficients come from explicit products.
        let d = rng.gen_range(0..=10usize);
        let qt: f64 = rng.gen_range(0.2..0.9);
        let qtb = QBase::new(qt).unwrap();
        let a1 = Complex64::new(qt.powi(-(d as i32)), 0.0);
        let a2 = Complex64::new(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9));
        let b1 = Complex64::new(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9));
        let z = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let coeffs: Vec<Complex64> = (0..=d)
            .map(|k| {
                qpoch_finite(a1, qtb, k) * qpoch_finite(a2, qtb, k)
                    / (qpoch_finite(b1, qtb, k) * qpoch_finite(Complex64::new(qt, 0.0), qtb, k))
            })
            .collect();
        let horner = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
        let scale: f64 = coeffs.iter().enumerate().map(|(k, c)| c.norm() * z.norm().powi(k as i32)).sum();
        let series = phi21(a1, a2, b1, qtb, z, DEFAULT_TOL).unwrap();
        let err = (series.value - horner).norm() / scale.max(1.0);
        worst_poly = worst_poly.max(if series.terms_used <= d + 1 { err } else { f64::INFINITY });
    }
    let pass = worst_split < 1e-13 && worst_inf < 1e-13 && worst_poly < 1e-13;
    outcome(
        pass,
        format!(
            "1000 cases: finite splitting {worst_split:.1e}, infinite splitting {worst_inf:.1e}, terminating polynomial {worst_poly:.1e} (tol 1e-13)"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("scalar orthogonality", scalar_orthogonality),
        ("eigenfunction equation", eigenfunction),
        ("connection expansion", connection_expansion),
        ("operator consistency", operator_consistency),
        ("Jacobi matrix match", jacobi_match),
        ("matrix orthogonality, little q-Jacobi", lqj_orthogonality),
        ("matrix orthogonality, quantum SU(2)", qsu2_orthogonality),
        ("weight structure", weight_structure),
        ("block structure", block_structure),
        ("kernel regression", kernel_regression),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {name} ({:.2?}) {}", i + 1, start.elapsed(), o.detail);
        failures += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
