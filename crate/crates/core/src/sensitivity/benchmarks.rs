//! Built-in test functions with closed-form variance decompositions, used
//! by the `sobol-test` self-check.

use std::f64::consts::PI;

/// Y = X1 + 2·X2 on the unit square.
pub fn linear_two_input(x: &[f64]) -> f64 {
    x[0] + 2.0 * x[1]
}

/// Analytic first-order indices of [`linear_two_input`]: Var = 5/12 splits
/// 1:4 between the two inputs, with no interaction.
pub const LINEAR_FIRST_ORDER: [f64; 2] = [0.2, 0.8];

/// Ishigami parameters used throughout: a = 7, b = 0.1.
pub const ISHIGAMI_A: f64 = 7.0;
pub const ISHIGAMI_B: f64 = 0.1;

/// Ishigami function over the unit cube (inputs mapped to [−π, π]³):
/// sin x1 + a·sin² x2 + b·x3⁴·sin x1.
pub fn ishigami_unit(u: &[f64]) -> f64 {
    let map = |v: f64| -PI + 2.0 * PI * v;
    let (x1, x2, x3) = (map(u[0]), map(u[1]), map(u[2]));
    x1.sin() + ISHIGAMI_A * x2.sin().powi(2) + ISHIGAMI_B * x3.powi(4) * x1.sin()
}

/// Closed-form Ishigami sensitivity indices.
#[derive(Debug, Clone, Copy)]
pub struct IshigamiIndices {
    pub first: [f64; 3],
    pub total: [f64; 3],
}

pub fn ishigami_indices() -> IshigamiIndices {
    let (a, b) = (ISHIGAMI_A, ISHIGAMI_B);
    let pi4 = PI.powi(4);
    let pi8 = pi4 * pi4;
    let v1 = 0.5 * (1.0 + b * pi4 / 5.0).powi(2);
    let v2 = a * a / 8.0;
    let v13 = b * b * pi8 * 8.0 / 225.0;
    let var = v1 + v2 + v13;
    IshigamiIndices {
        first: [v1 / var, v2 / var, 0.0],
        total: [(v1 + v13) / var, v2 / var, v13 / var],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ishigami_decomposition_sums_to_one() {
        let idx = ishigami_indices();
        let interactions: f64 = idx.total.iter().sum::<f64>() - idx.first.iter().sum::<f64>();
        let total = idx.first.iter().sum::<f64>() + interactions / 2.0;
        assert!((total - 1.0).abs() < 1e-12);
        // widely quoted reference values for a = 7, b = 0.1
        assert!((idx.first[0] - 0.3139).abs() < 5e-4);
        assert!((idx.first[1] - 0.4424).abs() < 5e-4);
        assert!((idx.total[0] - 0.5576).abs() < 5e-4);
    }

    #[test]
    fn ishigami_is_bounded_on_the_cube() {
        for u in [[0.0, 0.0, 0.0], [0.5, 0.5, 0.5], [0.99, 0.01, 0.73]] {
            let y = ishigami_unit(&u);
            assert!(y.is_finite());
        }
    }
}
