use crate::config::{Grid, Params, RunConfig, DEPTH_CAP, GRAM_CAP};
use crate::error::CliError;
use crate::output::{complex_json, matrix_cells, matrix_columns, matrix_json, Cell, Output, Table};
use num_complex::Complex64;
use qmvop::families::{
    lqj_difference_op_in, lqj_eigenvalue, lqj_eval, lqj_eval_in, lqj_eval_lattice, lqj_norm, lqj_weight, LqjParams,
};
use qmvop::fiveterm::{blocks_from_fiveterm, FiveTermCoeffs, RecurrenceBlocks};
use qmvop::lqj::{build_lqj_blocks, lqj_fiveterm, lqj_gram_table, LqjConsts, LqjPipelineParams, LqjSampler, SpectralMap};
use qmvop::mp::Mp;
use qmvop::mvop::{generate_p, recurrence_residual, GramTable, WeightSampler};
use qmvop::numerics::{herm2_eigenvalues, hermitian_defect, Herm2, QuadratureConfig};
use qmvop::qsu2::{build_qsu2_blocks, discrete_spectrum, qsu2_fiveterm, qsu2_gram_table, Qsu2Sampler};
use qmvop::real::Real;
use serde::Serialize;
use serde_json::json;
use std::f64::consts::PI;

/// Working precision for little q-Jacobi block recurrences, whose entries
/// span hundreds of orders of magnitude.
type Wide = Mp<768>;

fn midpoints(n: usize) -> Vec<f64> {
    (0..n).map(|j| PI * (j as f64 + 0.5) / n as f64).collect()
}

fn t_grid(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    match &cfg.grid {
        Grid::Count(n) => Ok(midpoints(*n)),
        Grid::Points(ts) => match ts.iter().find(|t| !(**t > 0.0 && **t < PI)) {
            Some(t) => Err(CliError::Usage(format!("--grid point t = {t} must lie in (0, pi)"))),
            None => Ok(ts.clone()),
        },
    }
}

/// Evaluation points for matrix families: listed values are used as λ, a
/// count samples the continuous spectrum at the midpoint t-grid.
fn lambda_grid(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    match &cfg.grid {
        Grid::Points(p) => Ok(p.clone()),
        Grid::Count(n) => {
            let ts = midpoints(*n);
            Ok(match &cfg.params {
                Params::Lqj(p) => {
                    let c = LqjConsts::<f64>::new(p)?;
                    ts.iter().map(|t| SpectralMap::Affine.apply(&c, &t.cos())).collect()
                }
                _ => ts.iter().map(|t| t.cos()).collect(),
            })
        }
    }
}

fn custom_fiveterm(a: f64, b: f64, len: usize) -> FiveTermCoeffs {
    FiveTermCoeffs {
        a: vec![a; len],
        b: vec![Complex64::new(b, 0.0); len],
        c: vec![0.0; len],
    }
}

fn matrix_blocks(cfg: &RunConfig, n: usize) -> Result<RecurrenceBlocks, CliError> {
    Ok(match &cfg.params {
        Params::Lqj(p) => build_lqj_blocks::<Wide>(p, n)?.to_f64(),
        Params::Qsu2 { params, .. } => build_qsu2_blocks(params, n)?,
        Params::Custom { a, b } => blocks_from_fiveterm(&custom_fiveterm(*a, *b, 2 * n + 2), n)?,
        Params::Scalar(_) => unreachable!("scalar family has no block form"),
    })
}

fn pipeline_of(p: &LqjParams) -> Result<LqjPipelineParams, CliError> {
    Ok(LqjPipelineParams::new(p.q.value(), p.a, p.b)?)
}

pub fn coeffs(cfg: &RunConfig) -> Result<Output, CliError> {
    cfg.require_depth(DEPTH_CAP)?;
    let n = cfg.n_max;
    if let Params::Scalar(p) = &cfg.params {
        let ft = lqj_fiveterm::<Wide>(&pipeline_of(p)?, n + 1)?;
        let mut table = Table::new(&["n", "a", "b_re", "b_im", "c"]);
        let mut rows = Vec::new();
        for k in 0..=n {
            let (a, b, c) = (ft.a[k].to_f64(), qmvop::real::to_c64(&ft.b[k]), ft.c[k].to_f64());
            table.push(vec![k.into(), a.into(), b.re.into(), b.im.into(), c.into()]);
            rows.push(json!({ "n": k, "a": a, "b": complex_json(b), "c": c }));
        }
        return Ok(Output { command: "coeffs", body: json!({ "rows": rows }), table, passed: true });
    }
    let blocks = matrix_blocks(cfg, n)?;
    // qsu2 also lists its native five-term sequence alongside the blocks.
    let scalar = match &cfg.params {
        Params::Qsu2 { params, .. } => Some(qsu2_fiveterm(params, n + 1)),
        _ => None,
    };
    let mut header = vec!["n".to_string()];
    header.extend(matrix_columns("A"));
    header.extend(matrix_columns("B"));
    if scalar.is_some() {
        header.extend(["a", "b_re", "b_im", "c"].map(String::from));
    }
    let mut table = Table::new(&header);
    let mut rows = Vec::new();
    for k in 0..=n {
        let mut row: Vec<Cell> = vec![k.into()];
        row.extend(matrix_cells(&blocks.a[k]));
        row.extend(matrix_cells(&blocks.b[k]));
        let mut doc = json!({ "n": k, "A": matrix_json(&blocks.a[k]), "B": matrix_json(&blocks.b[k]) });
        if let Some(ft) = &scalar {
            let (a, b, c) = (ft.a[k], ft.b[k], ft.c[k]);
            row.extend([a.into(), b.re.into(), b.im.into(), c.into()]);
            doc["a"] = json!(a);
            doc["b"] = complex_json(b);
            doc["c"] = json!(c);
        }
        table.push(row);
        rows.push(doc);
    }
    Ok(Output { command: "coeffs", body: json!({ "rows": rows }), table, passed: true })
}

struct WeightRow {
    t: f64,
    lambda: f64,
    density: f64,
    w: Herm2,
}

fn weight_rows(cfg: &RunConfig, ts: &[f64]) -> Result<Vec<WeightRow>, CliError> {
    let sample_with = |s: &dyn WeightSampler<Scalar = f64>| -> Result<Vec<WeightRow>, CliError> {
        ts.iter()
            .map(|&t| {
                let smp = s.sample(t)?;
                let w = smp.weight().scale(&Complex64::new(smp.density, 0.0));
                Ok(WeightRow { t, lambda: smp.lambda, density: smp.density, w })
            })
            .collect()
    };
    match &cfg.params {
        Params::Lqj(p) => sample_with(&LqjSampler::<f64>::new(p, SpectralMap::Affine)?),
        Params::Qsu2 { params, .. } => sample_with(&Qsu2Sampler::new(params)?),
        _ => Err(CliError::Usage(format!("weight is not available for family {}", cfg.family.name()))),
    }
}

pub fn weight(cfg: &RunConfig) -> Result<Output, CliError> {
    if let Params::Scalar(p) = &cfg.params {
        let mut table = Table::new(&["k", "x", "mass"]);
        let mut rows = Vec::new();
        let q = p.q.value();
        for k in 0..=cfg.n_max {
            let (x, w) = (q.powi(k as i32), lqj_weight(k, p)?);
            table.push(vec![k.into(), x.into(), w.into()]);
            rows.push(json!({ "k": k, "x": x, "mass": w }));
        }
        return Ok(Output { command: "weight", body: json!({ "rows": rows }), table, passed: true });
    }
    let rows = weight_rows(cfg, &t_grid(cfg)?)?;
    let mut header: Vec<String> = ["t", "lambda", "density"].iter().map(|s| s.to_string()).collect();
    header.extend(matrix_columns("W"));
    header.extend(["det", "trace", "min_eigenvalue", "hermitian", "psd"].iter().map(|s| s.to_string()));
    let mut table = Table::new(&header);
    let mut json_rows = Vec::new();
    let mut all_ok = true;
    for r in &rows {
        let (det, trace) = (r.w.det().re, r.w.trace().re);
        let min_eig = herm2_eigenvalues(&r.w).0;
        let hermitian = hermitian_defect(&r.w) <= cfg.tol * trace.abs().max(f64::MIN_POSITIVE);
        let psd = min_eig >= -cfg.tol * trace.abs();
        all_ok &= hermitian && psd;
        let mut row: Vec<Cell> = vec![r.t.into(), r.lambda.into(), r.density.into()];
        row.extend(matrix_cells(&r.w));
        row.extend([det.into(), trace.into(), min_eig.into(), hermitian.into(), psd.into()]);
        table.push(row);
        json_rows.push(json!({
            "t": r.t, "lambda": r.lambda, "density": r.density, "W": matrix_json(&r.w),
            "det": det, "trace": trace, "min_eigenvalue": min_eig, "hermitian": hermitian, "psd": psd,
        }));
    }
    Ok(Output { command: "weight", body: json!({ "rows": json_rows }), table, passed: all_ok })
}

pub fn eval(cfg: &RunConfig) -> Result<Output, CliError> {
    cfg.require_depth(DEPTH_CAP)?;
    let n = cfg.n_max;
    if let Params::Scalar(p) = &cfg.params {
        let mut table = Table::new(&["n", "x", "p", "phi"]);
        let mut rows = Vec::new();
        let points: Vec<(f64, Option<i32>)> = match &cfg.grid {
            Grid::Points(xs) => xs.iter().map(|&x| (x, None)).collect(),
            Grid::Count(c) => (0..*c as i32).map(|k| (p.q.value().powi(k), Some(k))).collect(),
        };
        for k in 0..=n {
            let h = lqj_norm(k, p).sqrt();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            for &(x, lattice) in &points {
                let v = match lattice {
                    Some(j) => lqj_eval_lattice(k, j, p)?,
                    None => lqj_eval(k, x, p)?,
                };
                let phi = sign * v / h;
                table.push(vec![k.into(), x.into(), v.into(), phi.into()]);
                rows.push(json!({ "n": k, "x": x, "p": v, "phi": phi }));
            }
        }
        return Ok(Output { command: "eval", body: json!({ "rows": rows }), table, passed: true });
    }
    let lambdas = lambda_grid(cfg)?;
    let mut header = vec!["n".to_string(), "lambda".to_string()];
    header.extend(matrix_columns("P"));
    let mut table = Table::new(&header);
    let mut rows = Vec::new();
    let values: Vec<Vec<Herm2>> = match &cfg.params {
        Params::Lqj(p) => {
            let blocks = build_lqj_blocks::<Wide>(p, n.max(1))?;
            lambdas
                .iter()
                .map(|l| Ok(generate_p(&Wide::from_f64(*l), &blocks, n)?.values.iter().map(|m| m.to_f64()).collect()))
                .collect::<Result<_, CliError>>()?
        }
        _ => {
            let blocks = matrix_blocks(cfg, n.max(1))?;
            lambdas
                .iter()
                .map(|l| Ok(generate_p(l, &blocks, n)?.values))
                .collect::<Result<_, CliError>>()?
        }
    };
    for k in 0..=n {
        for (l, vals) in lambdas.iter().zip(&values) {
            let mut row: Vec<Cell> = vec![k.into(), (*l).into()];
            row.extend(matrix_cells(&vals[k]));
            table.push(row);
            rows.push(json!({ "n": k, "lambda": l, "P": matrix_json(&vals[k]) }));
        }
    }
    Ok(Output { command: "eval", body: json!({ "rows": rows }), table, passed: true })
}

fn quadrature(cfg: &RunConfig) -> QuadratureConfig {
    QuadratureConfig::with_tol(cfg.tol / 100.0)
}

fn matrix_gram(cfg: &RunConfig) -> Result<GramTable, CliError> {
    let n = cfg.n_max;
    Ok(match &cfg.params {
        Params::Lqj(p) => lqj_gram_table(p, n, SpectralMap::Affine, &quadrature(cfg))?,
        Params::Qsu2 { params, .. } => qsu2_gram_table(params, n, &quadrature(cfg))?,
        _ => {
            return Err(CliError::Usage(format!(
                "gram needs a known weight; not available for family {}",
                cfg.family.name()
            )))
        }
    })
}

/// Orthonormality table Σₖ φₙφₘ wₖ of the scalar family on the lattice.
fn scalar_gram(p: &LqjParams, n_max: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let mut masses = Vec::new();
    for k in 0.. {
        let w = lqj_weight(k, p)?;
        if k > 2 * n_max + 4 && w.abs() < 1e-40 {
            break;
        }
        if k > 20_000 {
            return Err(CliError::Core(qmvop::Error::NoDecay { index: k }));
        }
        masses.push(w);
    }
    let phi: Vec<Vec<f64>> = (0..=n_max)
        .map(|n| {
            let h = lqj_norm(n, p).sqrt();
            (0..masses.len())
                .map(|k| Ok(lqj_eval_lattice(n, k as i32, p)? / h))
                .collect::<Result<Vec<_>, CliError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok((0..=n_max)
        .map(|n| (0..=n_max).map(|m| masses.iter().enumerate().map(|(k, w)| phi[n][k] * phi[m][k] * w).sum()).collect())
        .collect())
}

fn delta(n: usize, m: usize) -> f64 {
    if n == m {
        1.0
    } else {
        0.0
    }
}

pub fn gram(cfg: &RunConfig) -> Result<Output, CliError> {
    cfg.require_depth(GRAM_CAP)?;
    let n = cfg.n_max;
    if let Params::Scalar(p) = &cfg.params {
        let g = scalar_gram(p, n)?;
        let mut table = Table::new(&["n", "m", "value", "deviation"]);
        let mut rows = Vec::new();
        let mut worst = 0.0f64;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let d = (v - delta(i, j)).abs();
                worst = worst.max(d);
                table.push(vec![i.into(), j.into(), (*v).into(), d.into()]);
                rows.push(json!({ "n": i, "m": j, "value": v, "deviation": d }));
            }
        }
        let body = json!({ "entries": rows, "max_deviation": worst, "passed": worst <= cfg.tol });
        return Ok(Output { command: "gram", body, table, passed: worst <= cfg.tol });
    }
    let g = matrix_gram(cfg)?;
    let mut header = vec!["n".to_string(), "m".to_string()];
    header.extend(matrix_columns("G"));
    header.push("deviation".to_string());
    let mut table = Table::new(&header);
    let mut entries = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            let r = g.report(i, j);
            let mut row: Vec<Cell> = vec![i.into(), j.into()];
            row.extend(matrix_cells(g.get(i, j)));
            row.push(r.deviation.into());
            table.push(row);
            entries.push(json!({
                "n": i,
                "m": j,
                "value": matrix_json(g.get(i, j)),
                "est_error": r.est_error,
                "nodes_used": r.nodes_used,
                "deviation": r.deviation,
            }));
        }
    }
    let worst = g.max_deviation();
    let body = json!({
        "entries": entries,
        "max_deviation": worst,
        "quadrature_tol": quadrature(cfg).tol,
        "est_error": g.est_error,
        "nodes_used": g.nodes_used,
        "passed": worst <= cfg.tol,
    });
    Ok(Output { command: "gram", body, table, passed: worst <= cfg.tol })
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
    passed: bool,
}

impl Check {
    /// Passes when value ≤ threshold.
    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        Check { name, value, threshold, passed: value <= threshold }
    }

    /// Passes when value ≥ threshold.
    fn at_least(name: &'static str, value: f64, threshold: f64) -> Self {
        Check { name, value, threshold, passed: value >= threshold }
    }
}

fn block_checks(blocks: &RecurrenceBlocks, tol: f64) -> Vec<Check> {
    let min_det = blocks.a.iter().map(|a| a.det().norm()).fold(f64::INFINITY, f64::min);
    let herm = blocks
        .b
        .iter()
        .map(|b| hermitian_defect(b) / b.max_abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    vec![
        Check { name: "blocks_nonsingular", value: min_det, threshold: 0.0, passed: min_det > 0.0 && min_det.is_finite() },
        Check::at_most("blocks_hermitian", herm, tol),
    ]
}

fn residual_check(cfg: &RunConfig, lambdas: &[f64]) -> Result<Check, CliError> {
    let n = cfg.n_max.max(1);
    let worst = match &cfg.params {
        Params::Lqj(p) => {
            let blocks = build_lqj_blocks::<Wide>(p, n)?;
            lambdas.iter().try_fold(0.0f64, |acc, l| {
                Ok::<_, CliError>(acc.max(recurrence_residual(&generate_p(&Wide::from_f64(*l), &blocks, n)?, &blocks)))
            })?
        }
        _ => {
            let blocks = matrix_blocks(cfg, n)?;
            lambdas
                .iter()
                .try_fold(0.0f64, |acc, l| Ok::<_, CliError>(acc.max(recurrence_residual(&generate_p(l, &blocks, n)?, &blocks))))?
        }
    };
    Ok(Check::at_most("recurrence_residual", worst, cfg.tol))
}

fn scalar_checks(p: &LqjParams, n_max: usize, tol: f64) -> Result<Vec<Check>, CliError> {
    let g = scalar_gram(p, n_max)?;
    let orth = g
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, v)| (v - delta(i, j)).abs()))
        .fold(0.0, f64::max);
    type E = Mp<1024>;
    let q = E::from_f64(p.q.value());
    let mut eig = 0.0f64;
    for n in 0..=n_max {
        let lam = E::from_f64(lqj_eigenvalue(n, p));
        let lam_exact = q.powi(-(n as i32))
            * (E::from_f64(1.0) - q.powi(n as i32))
            * (E::from_f64(1.0) - E::from_f64(p.a * p.b) * q.powi(n as i32 + 1));
        eig = eig.max((lam.clone() - lam_exact.clone()).to_f64().abs() / lam.to_f64().abs().max(1.0));
        for k in 0..=20 {
            let x = q.powi(k);
            let lhs = lqj_difference_op_in(|y: &E| lqj_eval_in(n, y, p), &x, p)?;
            let rhs = lam_exact.clone() * lqj_eval_in(n, &x, p)?;
            let scale = lhs.to_f64().abs().max(rhs.to_f64().abs());
            if scale > 0.0 {
                eig = eig.max((lhs - rhs).to_f64().abs() / scale);
            }
        }
    }
    Ok(vec![Check::at_most("scalar_orthonormality", orth, tol), Check::at_most("eigenfunction_residual", eig, tol)])
}

pub fn verify(cfg: &RunConfig) -> Result<Output, CliError> {
    cfg.require_depth(GRAM_CAP)?;
    let tol = cfg.tol;
    let mut checks = Vec::new();
    match &cfg.params {
        Params::Scalar(p) => checks.extend(scalar_checks(p, cfg.n_max, tol)?),
        Params::Custom { .. } => {
            checks.extend(block_checks(&matrix_blocks(cfg, cfg.n_max)?, tol));
            checks.push(residual_check(cfg, &lambda_grid(cfg)?)?);
        }
        Params::Lqj(_) | Params::Qsu2 { .. } => {
            let g = matrix_gram(cfg)?;
            checks.push(Check::at_most("gram_max_deviation", g.max_deviation(), tol));
            checks.extend(block_checks(&matrix_blocks(cfg, cfg.n_max)?, tol));
            checks.push(residual_check(cfg, &lambda_grid(cfg)?)?);
            let rows = weight_rows(cfg, &t_grid(cfg)?)?;
            let herm = rows
                .iter()
                .map(|r| hermitian_defect(&r.w) / r.w.trace().re.abs().max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            checks.push(Check::at_most("weight_hermitian", herm, tol));
            let min_eig = rows
                .iter()
                .map(|r| herm2_eigenvalues(&r.w).0 / r.w.trace().re.abs().max(f64::MIN_POSITIVE))
                .fold(f64::INFINITY, f64::min);
            checks.push(Check::at_least("weight_min_eigenvalue", min_eig, -tol));
            if let Params::Lqj(p) = &cfg.params {
                let rank = rows
                    .iter()
                    .map(|r| r.w.det().norm() / r.w.trace().re.powi(2).max(f64::MIN_POSITIVE))
                    .fold(0.0, f64::max);
                checks.push(Check::at_most("weight_rank_one", rank, tol));
                checks.extend(scalar_checks(&p.scalar()?, cfg.n_max, tol)?);
            }
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    let failures: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let mut table = Table::new(&["check", "value", "threshold", "passed"]);
    for c in &checks {
        table.push(vec![c.name.into(), c.value.into(), c.threshold.into(), c.passed.into()]);
    }
    let body = json!({ "passed": passed, "checks": checks, "failures": failures });
    Ok(Output { command: "verify", body, table, passed })
}

pub fn spectrum(cfg: &RunConfig) -> Result<Output, CliError> {
    let Params::Qsu2 { params, .. } = &cfg.params else {
        return Err(CliError::Usage(format!(
            "spectrum is only defined for family qsu2, not {}",
            cfg.family.name()
        )));
    };
    let info = discrete_spectrum(params);
    let mut table = Table::new(&["kind", "value"]);
    table.push(vec!["continuous_min".into(), info.continuous[0].into()]);
    table.push(vec!["continuous_max".into(), info.continuous[1].into()]);
    for v in &info.sigma_minus {
        table.push(vec!["sigma_minus".into(), (*v).into()]);
    }
    for v in &info.sigma_plus {
        table.push(vec!["sigma_plus".into(), (*v).into()]);
    }
    let body = json!({ "spectrum": info, "continuous_only": params.continuous_only() });
    Ok(Output { command: "spectrum", body, table, passed: true })
}
