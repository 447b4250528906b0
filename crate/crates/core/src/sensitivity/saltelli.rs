//! Saltelli's block sampling design.
//!
//! For `d` inputs and a base count `N`, draws `N` quasi-random points in
//! dimension `2d` (skipping the all-zero point) and splits each into two
//! `d`-dimensional halves A and B. The design then stacks, in order: the
//! A block, the B block, the `d` cross blocks A_B^(i) (A with column i
//! taken from B) and the `d` cross blocks B_A^(i). Running a model over the
//! resulting `N(2d+2)` rows is exactly the evaluation budget needed to
//! estimate first-, second- and total-order indices.

use crate::error::{Error, Result};
use crate::sensitivity::sobol::SobolGenerator;

/// The `N(2d+2) × d` sample matrix with named blocks.
#[derive(Debug, Clone)]
pub struct SaltelliDesign {
    input_count: usize,
    base_count: usize,
    /// Row-major rows, `base_count * (2*input_count + 2)` of them.
    rows: Vec<f64>,
}

impl SaltelliDesign {
    pub fn input_count(&self) -> usize {
        self.input_count
    }

    pub fn base_count(&self) -> usize {
        self.base_count
    }

    pub fn row_count(&self) -> usize {
        self.base_count * (2 * self.input_count + 2)
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let d = self.input_count;
        &self.rows[r * d..(r + 1) * d]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.rows.chunks_exact(self.input_count)
    }

    /// Row `k` of block A.
    pub fn a_row(&self, k: usize) -> &[f64] {
        self.row(k)
    }

    /// Row `k` of block B.
    pub fn b_row(&self, k: usize) -> &[f64] {
        self.row(self.base_count + k)
    }

    /// Row `k` of block A_B^(i): A with column `i` from B.
    pub fn ab_row(&self, i: usize, k: usize) -> &[f64] {
        self.row((2 + i) * self.base_count + k)
    }

    /// Row `k` of block B_A^(i): B with column `i` from A.
    pub fn ba_row(&self, i: usize, k: usize) -> &[f64] {
        self.row((2 + self.input_count + i) * self.base_count + k)
    }
}

/// Builds the Saltelli design for `d` inputs from `n` base samples.
pub fn saltelli_sample(d: usize, n: usize) -> Result<SaltelliDesign> {
    if d < 2 {
        return Err(Error::InvalidInput {
            what: "Saltelli design",
            reason: format!("need at least 2 inputs, got {d}"),
        });
    }
    if n < 2 {
        return Err(Error::InvalidInput {
            what: "Saltelli design",
            reason: format!("need a base count of at least 2, got {n}"),
        });
    }

    // One 2d-dimensional stream provides both halves; index 0 (the origin)
    // is skipped since a degenerate all-zero scenario adds nothing.
    let mut gen = SobolGenerator::new(2 * d)?;
    gen.skip_to(1);
    let mut a = vec![0.0; n * d];
    let mut b = vec![0.0; n * d];
    let mut point = vec![0.0; 2 * d];
    for k in 0..n {
        gen.next_point(&mut point);
        a[k * d..(k + 1) * d].copy_from_slice(&point[..d]);
        b[k * d..(k + 1) * d].copy_from_slice(&point[d..]);
    }

    let mut rows = Vec::with_capacity(n * (2 * d + 2) * d);
    rows.extend_from_slice(&a);
    rows.extend_from_slice(&b);
    for i in 0..d {
        for k in 0..n {
            let (ar, br) = (&a[k * d..(k + 1) * d], &b[k * d..(k + 1) * d]);
            rows.extend(ar.iter().enumerate().map(|(c, &v)| if c == i { br[c] } else { v }));
        }
    }
    for i in 0..d {
        for k in 0..n {
            let (ar, br) = (&a[k * d..(k + 1) * d], &b[k * d..(k + 1) * d]);
            rows.extend(br.iter().enumerate().map(|(c, &v)| if c == i { ar[c] } else { v }));
        }
    }

    Ok(SaltelliDesign {
        input_count: d,
        base_count: n,
        rows,
    })
}

/// Model outputs grouped by design block, in design-row order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutputs {
    pub f_a: Vec<f64>,
    pub f_b: Vec<f64>,
    pub f_ab: Vec<Vec<f64>>,
    pub f_ba: Vec<Vec<f64>>,
}

impl ModelOutputs {
    /// Splits a flat vector of outputs (one per design row, in row order)
    /// back into the named blocks.
    pub fn from_flat(design: &SaltelliDesign, outputs: Vec<f64>) -> Self {
        let (d, n) = (design.input_count, design.base_count);
        assert_eq!(outputs.len(), design.row_count());
        let block = |b: usize| outputs[b * n..(b + 1) * n].to_vec();
        ModelOutputs {
            f_a: block(0),
            f_b: block(1),
            f_ab: (0..d).map(|i| block(2 + i)).collect(),
            f_ba: (0..d).map(|i| block(2 + d + i)).collect(),
        }
    }
}

/// Evaluates `model` over every design row serially, in row order.
pub fn evaluate_design(design: &SaltelliDesign, model: impl Fn(&[f64]) -> f64) -> ModelOutputs {
    let outputs: Vec<f64> = design.iter_rows().map(model).collect();
    ModelOutputs::from_flat(design, outputs)
}
