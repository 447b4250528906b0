//! Sobol index estimation from Saltelli block outputs.
//!
//! First-order indices use the correlation estimator
//! `S_i = (1/N)·Σ f_B·(f_ABi − f_A) / Var(Y)`, total-order indices the
//! Jansen squared-difference form `S_i^T = (1/2N)·Σ (f_A − f_ABi)² / Var(Y)`,
//! and second-order indices the closed form over the crossed blocks,
//! `S^c_ij = ((1/N)·Σ f_BAi·f_ABj − mean²) / Var(Y)`, reduced to the pure
//! index `S_ij = S^c_ij − S_i − S_j`. Estimates may be negative near zero
//! and are deliberately not clamped.
//!
//! All reductions are sequential in fixed index order, so a given design and
//! model always produce bit-identical results.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sensitivity::saltelli::ModelOutputs;

/// Relative variance floor below which the model is treated as constant.
const VARIANCE_FLOOR_REL: f64 = 1e-12;

/// Estimated sensitivity indices for `d` labeled inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityResult {
    pub labels: Vec<String>,
    pub first_order: Vec<f64>,
    pub total_order: Vec<f64>,
    /// Pure second-order indices, d×d symmetric with an exactly zero diagonal.
    pub second_order: Vec<Vec<f64>>,
    pub output_variance: f64,
    pub output_mean: f64,
}

/// Estimates all index orders from per-block model outputs.
///
/// All blocks must hold `N ≥ 2` outputs; `f_ab`/`f_ba` must hold one block
/// per input. Fails with [`Error::VarianceZero`] when the pooled output
/// variance vanishes (constant model).
pub fn estimate_indices(labels: &[String], outputs: &ModelOutputs) -> Result<SensitivityResult> {
    let d = labels.len();
    let n = outputs.f_a.len();
    if n < 2 || outputs.f_b.len() != n {
        return Err(Error::InvalidInput {
            what: "sensitivity estimation",
            reason: format!("blocks must share a length of at least 2, got {n}"),
        });
    }
    if outputs.f_ab.len() != d || outputs.f_ba.len() != d {
        return Err(Error::InvalidInput {
            what: "sensitivity estimation",
            reason: format!(
                "expected {d} crossed blocks, got {}/{}",
                outputs.f_ab.len(),
                outputs.f_ba.len()
            ),
        });
    }
    for block in outputs.f_ab.iter().chain(&outputs.f_ba) {
        if block.len() != n {
            return Err(Error::InvalidInput {
                what: "sensitivity estimation",
                reason: "crossed block length mismatch".into(),
            });
        }
    }

    let nf = n as f64;
    let mean_a = outputs.f_a.iter().sum::<f64>() / nf;
    let mean_b = outputs.f_b.iter().sum::<f64>() / nf;
    let mean = (mean_a + mean_b) / 2.0;

    // Unbiased variance over the pooled A and B outputs.
    let mut ss = 0.0;
    for y in outputs.f_a.iter().chain(&outputs.f_b) {
        let dev = y - mean;
        ss += dev * dev;
    }
    let variance = ss / (2.0 * nf - 1.0);
    if variance == 0.0 || variance < VARIANCE_FLOOR_REL * mean * mean {
        return Err(Error::VarianceZero);
    }

    let mut first_order = Vec::with_capacity(d);
    let mut total_order = Vec::with_capacity(d);
    for ab in &outputs.f_ab {
        let mut corr = 0.0;
        let mut jansen = 0.0;
        for ((&fa, &fb), &fab) in outputs.f_a.iter().zip(&outputs.f_b).zip(ab) {
            corr += fb * (fab - fa);
            let diff = fa - fab;
            jansen += diff * diff;
        }
        first_order.push(corr / nf / variance);
        total_order.push(jansen / (2.0 * nf) / variance);
    }

    // Each unordered pair is estimated once and mirrored, keeping the matrix
    // exactly symmetric.
    let mut second_order = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in (i + 1)..d {
            let mut cross = 0.0;
            for (&ba, &ab) in outputs.f_ba[i].iter().zip(&outputs.f_ab[j]) {
                cross += ba * ab;
            }
            let closed = (cross / nf - mean_a * mean_b) / variance;
            let pure = closed - first_order[i] - first_order[j];
            second_order[i][j] = pure;
            second_order[j][i] = pure;
        }
    }

    Ok(SensitivityResult {
        labels: labels.to_vec(),
        first_order,
        total_order,
        second_order,
        output_variance: variance,
        output_mean: mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensitivity::saltelli::{evaluate_design, saltelli_sample};
    use std::f64::consts::PI;

    fn labels(d: usize) -> Vec<String> {
        (0..d).map(|i| format!("x{}", i + 1)).collect()
    }

    fn run(d: usize, n: usize, model: impl Fn(&[f64]) -> f64) -> SensitivityResult {
        let design = saltelli_sample(d, n).unwrap();
        let outputs = evaluate_design(&design, model);
        estimate_indices(&labels(d), &outputs).unwrap()
    }

    /// Y = X1 + 2·X2 on the unit square: Var = 5/12, S1 = 0.2, S2 = 0.8.
    #[test]
    fn linear_model_matches_analytic_decomposition() {
        let r = run(2, 1024, |x| x[0] + 2.0 * x[1]);
        assert!((r.first_order[0] - 0.2).abs() <= 0.02, "S1 = {}", r.first_order[0]);
        assert!((r.first_order[1] - 0.8).abs() <= 0.02, "S2 = {}", r.first_order[1]);
        assert!(r.second_order[0][1].abs() <= 0.02, "S12 = {}", r.second_order[0][1]);
        assert!((r.output_variance - 5.0 / 12.0).abs() <= 0.01);

        // additive model: first orders sum to ~1, interactions vanish
        let sum: f64 = r.first_order.iter().sum();
        assert!((0.95..=1.05).contains(&sum));
        assert!(r.second_order[0][1].abs() <= 0.05);
    }

    #[test]
    fn constant_model_reports_zero_variance() {
        let design = saltelli_sample(2, 64).unwrap();
        let outputs = evaluate_design(&design, |_| 7.0);
        assert!(matches!(
            estimate_indices(&labels(2), &outputs),
            Err(Error::VarianceZero)
        ));
    }

    fn ishigami(x: &[f64]) -> f64 {
        let (a, b) = (7.0, 0.1);
        let map = |u: f64| -PI + 2.0 * PI * u;
        let (x1, x2, x3) = (map(x[0]), map(x[1]), map(x[2]));
        x1.sin() + a * x2.sin().powi(2) + b * x3.powi(4) * x1.sin()
    }

    /// Analytic Ishigami decomposition for a = 7, b = 0.1.
    fn ishigami_analytic() -> ([f64; 3], [f64; 3]) {
        let (a, b) = (7.0f64, 0.1f64);
        let pi4 = PI.powi(4);
        let pi8 = pi4 * pi4;
        let v1 = 0.5 * (1.0 + b * pi4 / 5.0).powi(2);
        let v2 = a * a / 8.0;
        let v13 = b * b * pi8 * 8.0 / 225.0;
        let var = v1 + v2 + v13;
        (
            [v1 / var, v2 / var, 0.0],
            [(v1 + v13) / var, v2 / var, v13 / var],
        )
    }

    #[test]
    fn ishigami_matches_analytic_indices() {
        let r = run(3, 4096, ishigami);
        let (first, total) = ishigami_analytic();
        for i in 0..3 {
            assert!(
                (r.first_order[i] - first[i]).abs() <= 0.03,
                "S{}: {} vs {}",
                i + 1,
                r.first_order[i],
                first[i]
            );
            assert!(
                (r.total_order[i] - total[i]).abs() <= 0.03,
                "ST{}: {} vs {}",
                i + 1,
                r.total_order[i],
                total[i]
            );
        }
        // X3 acts only through its interaction with X1
        assert!(r.first_order[2].abs() <= 0.03);
        assert!(r.total_order[2] > 0.15);
    }

    #[test]
    fn first_order_bounded_by_total_order() {
        for result in [
            run(2, 1024, |x| x[0] + 2.0 * x[1]),
            run(2, 1024, |x| x[0] * x[1]),
            run(3, 1024, ishigami),
        ] {
            for (s, st) in result.first_order.iter().zip(&result.total_order) {
                assert!(s <= &(st + 0.05), "S = {s} exceeds ST = {st}");
            }
        }
    }

    #[test]
    fn second_order_matrix_symmetric_zero_diagonal() {
        let r = run(3, 256, ishigami);
        for i in 0..3 {
            assert_eq!(r.second_order[i][i], 0.0);
            for j in 0..3 {
                assert_eq!(r.second_order[i][j], r.second_order[j][i]);
            }
        }
    }

    /// Y = X1·X2 on the unit square has a closed decomposition:
    /// Var = 7/144, S1 = S2 = 3/7, pure S12 = 1/7.
    #[test]
    fn product_model_interaction_detected() {
        let r = run(2, 4096, |x| x[0] * x[1]);
        assert!((r.first_order[0] - 3.0 / 7.0).abs() <= 0.03);
        assert!((r.first_order[1] - 3.0 / 7.0).abs() <= 0.03);
        assert!((r.second_order[0][1] - 1.0 / 7.0).abs() <= 0.03);
    }

    #[test]
    fn estimates_are_deterministic() {
        let a = run(3, 512, ishigami);
        let b = run(3, 512, ishigami);
        assert_eq!(a, b);
    }

    /// Average absolute error against the analytic indices must not grow by
    /// more than 1.5x when N doubles, across the three benchmark models.
    #[test]
    fn doubling_n_does_not_worsen_estimates() {
        let avg_err = |n: usize| -> f64 {
            let mut errs = Vec::new();

            let r = run(2, n, |x| x[0] + 2.0 * x[1]);
            errs.push((r.first_order[0] - 0.2).abs());
            errs.push((r.first_order[1] - 0.8).abs());

            let r = run(2, n, |x| x[0] * x[1]);
            errs.push((r.first_order[0] - 3.0 / 7.0).abs());
            errs.push((r.second_order[0][1] - 1.0 / 7.0).abs());

            let r = run(3, n, ishigami);
            let (first, total) = ishigami_analytic();
            for i in 0..3 {
                errs.push((r.first_order[i] - first[i]).abs());
                errs.push((r.total_order[i] - total[i]).abs());
            }
            errs.iter().sum::<f64>() / errs.len() as f64
        };
        let mut prev = avg_err(1024);
        for n in [2048, 4096] {
            let cur = avg_err(n);
            assert!(cur <= prev * 1.5, "error grew from {prev} to {cur} at N = {n}");
            prev = cur;
        }
    }

    #[test]
    fn rejects_mismatched_blocks() {
        let design = saltelli_sample(2, 8).unwrap();
        let mut outputs = evaluate_design(&design, |x| x[0]);
        outputs.f_ab.pop();
        assert!(estimate_indices(&labels(2), &outputs).is_err());
    }
}
