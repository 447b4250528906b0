//! Dense bounded-variable primal simplex.
//!
//! Solves `min c·x` subject to `A x = b` and `l ≤ x ≤ u` (upper bounds may be
//! infinite). The caller supplies a starting basis that is nonsingular and
//! primal feasible, which the day-ahead scheduler can always construct
//! directly, so no phase-1 artificials are needed.
//!
//! Pivoting uses Bland's anti-cycling rule throughout: the entering variable
//! is the lowest-index candidate with a favorable reduced cost, and ratio-test
//! ties leave the basic variable with the lowest index. The full tableau is
//! kept dense; the problems here are ~50 rows by ~120 columns.

use crate::error::{Error, Result};

/// Reduced-cost optimality tolerance.
const TOL_REDUCED_COST: f64 = 1e-9;
/// Smallest pivot magnitude considered nonzero.
const TOL_PIVOT: f64 = 1e-9;
/// Recompute basic values from the tableau every this many pivots.
const REFRESH_INTERVAL: usize = 64;
/// Iteration cap; Bland's rule terminates finitely but guard anyway.
const MAX_ITERATIONS: usize = 20_000;

/// Equality-constrained LP with variable bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    /// Objective coefficients, length n (minimized).
    pub objective: Vec<f64>,
    /// Constraint rows, each of length n.
    pub rows: Vec<Vec<f64>>,
    /// Right-hand side, length m.
    pub rhs: Vec<f64>,
    /// Lower bounds, length n.
    pub lower: Vec<f64>,
    /// Upper bounds, length n; `f64::INFINITY` when unbounded above.
    pub upper: Vec<f64>,
}

/// Optimal point returned by the solver.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarStatus {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Tableau {
    m: usize,
    n: usize,
    /// Row-major m×n working matrix, kept equal to B⁻¹A.
    a: Vec<f64>,
    /// B⁻¹b.
    rhs: Vec<f64>,
    /// Reduced costs c − c_B·B⁻¹A.
    reduced: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    status: Vec<VarStatus>,
    basis: Vec<usize>,
    /// Current values of the basic variables, one per row.
    basic_value: Vec<f64>,
    /// Current values of nonbasic variables (at a bound).
    x: Vec<f64>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    fn new(lp: &LinearProgram, basis: &[usize], at_upper: &[usize]) -> Result<Self> {
        let m = lp.rows.len();
        let n = lp.objective.len();
        assert_eq!(basis.len(), m, "one basic variable per row");
        for row in &lp.rows {
            assert_eq!(row.len(), n);
        }

        let mut a = Vec::with_capacity(m * n);
        for row in &lp.rows {
            a.extend_from_slice(row);
        }

        let mut t = Tableau {
            m,
            n,
            a,
            rhs: lp.rhs.clone(),
            reduced: vec![0.0; n],
            lower: lp.lower.clone(),
            upper: lp.upper.clone(),
            status: vec![VarStatus::AtLower; n],
            basis: basis.to_vec(),
            basic_value: vec![0.0; m],
            x: lp.lower.clone(),
        };
        for &j in at_upper {
            t.status[j] = VarStatus::AtUpper;
            t.x[j] = t.upper[j];
        }
        for (i, &j) in basis.iter().enumerate() {
            t.status[j] = VarStatus::Basic(i);
        }

        // Gauss-Jordan reduce onto the starting basis.
        for (i, &j) in basis.iter().enumerate() {
            let piv = t.at(i, j);
            if piv.abs() < TOL_PIVOT {
                return Err(Error::SolverFailure(format!(
                    "singular starting basis at row {i}"
                )));
            }
            t.scale_row(i, 1.0 / piv);
            for r in 0..m {
                if r != i {
                    let f = t.at(r, j);
                    if f != 0.0 {
                        t.eliminate(r, i, f);
                    }
                }
            }
        }

        t.refresh_basic_values();
        for (i, &bv) in t.basic_value.iter().enumerate() {
            let j = t.basis[i];
            if bv < t.lower[j] - 1e-7 || bv > t.upper[j] + 1e-7 {
                return Err(Error::SolverFailure(format!(
                    "starting basis infeasible: variable {j} = {bv}"
                )));
            }
        }

        // Reduced costs from the reduced tableau: rc_j = c_j − Σ_i c_Bi·T_ij.
        for j in 0..n {
            let mut rc = lp.objective[j];
            for i in 0..m {
                let cb = lp.objective[t.basis[i]];
                if cb != 0.0 {
                    rc -= cb * t.at(i, j);
                }
            }
            t.reduced[j] = rc;
        }
        Ok(t)
    }

    fn scale_row(&mut self, i: usize, f: f64) {
        let start = i * self.n;
        for v in &mut self.a[start..start + self.n] {
            *v *= f;
        }
        self.rhs[i] *= f;
    }

    /// row r ← row r − f · row i
    fn eliminate(&mut self, r: usize, i: usize, f: f64) {
        let (rs, is) = (r * self.n, i * self.n);
        for j in 0..self.n {
            self.a[rs + j] -= f * self.a[is + j];
        }
        self.rhs[r] -= f * self.rhs[i];
    }

    fn refresh_basic_values(&mut self) {
        for i in 0..self.m {
            let mut v = self.rhs[i];
            for j in 0..self.n {
                if !matches!(self.status[j], VarStatus::Basic(_)) {
                    let coef = self.at(i, j);
                    if coef != 0.0 {
                        v -= coef * self.x[j];
                    }
                }
            }
            self.basic_value[i] = v;
        }
    }

    /// Lowest-index nonbasic variable with a favorable reduced cost.
    fn entering(&self) -> Option<usize> {
        (0..self.n).find(|&j| match self.status[j] {
            VarStatus::AtLower => {
                self.reduced[j] < -TOL_REDUCED_COST && self.upper[j] > self.lower[j]
            }
            VarStatus::AtUpper => {
                self.reduced[j] > TOL_REDUCED_COST && self.upper[j] > self.lower[j]
            }
            VarStatus::Basic(_) => false,
        })
    }
}

/// Runs the primal simplex from a caller-supplied feasible basis.
///
/// `basis[i]` is the basic variable of row `i`; `at_upper` lists the nonbasic
/// variables that start at their upper bound (everything else starts at its
/// lower bound). The implied point must satisfy the bounds.
pub fn solve_from_basis(
    lp: &LinearProgram,
    basis: &[usize],
    at_upper: &[usize],
) -> Result<Solution> {
    let mut t = Tableau::new(lp, basis, at_upper)?;
    let mut iterations = 0;

    while let Some(j) = t.entering() {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::SolverFailure(format!(
                "iteration cap {MAX_ITERATIONS} exceeded"
            )));
        }
        if iterations % REFRESH_INTERVAL == 0 {
            t.refresh_basic_values();
        }

        // Direction the entering variable moves: up from lower, down from upper.
        let dir = if t.status[j] == VarStatus::AtLower {
            1.0
        } else {
            -1.0
        };

        // Ratio test: step length before some basic variable hits a bound,
        // or the entering variable reaches its opposite bound.
        let span = t.upper[j] - t.lower[j];
        let mut best_limit = f64::INFINITY;
        let mut leaving: Option<(usize, bool)> = None; // (row, hits_upper)
        for i in 0..t.m {
            let w = t.at(i, j);
            let delta = -dir * w; // rate of change of basic i per unit step
            if delta.abs() <= TOL_PIVOT {
                continue;
            }
            let b = t.basis[i];
            let (limit, hits_upper) = if delta < 0.0 {
                ((t.basic_value[i] - t.lower[b]).max(0.0) / -delta, false)
            } else {
                if t.upper[b].is_infinite() {
                    continue;
                }
                ((t.upper[b] - t.basic_value[i]).max(0.0) / delta, true)
            };
            let take = match leaving {
                None => true,
                // Bland tie-break: lowest basic variable index.
                Some((cur, _)) => {
                    limit < best_limit || (limit == best_limit && b < t.basis[cur])
                }
            };
            if take {
                best_limit = limit;
                leaving = Some((i, hits_upper));
            }
        }

        if best_limit.is_infinite() && span.is_infinite() {
            return Err(Error::SolverFailure("objective unbounded below".into()));
        }

        match leaving {
            // A tie with the entering span prefers the bound flip below.
            Some((r, hits_upper)) if best_limit < span => {
                // Move to the new vertex and swap basis.
                let step = dir * best_limit;
                for i in 0..t.m {
                    let w = t.at(i, j);
                    if w != 0.0 {
                        t.basic_value[i] -= step * w;
                    }
                }
                let old = t.basis[r];
                let bound = if hits_upper { t.upper[old] } else { t.lower[old] };
                t.status[old] = if hits_upper {
                    VarStatus::AtUpper
                } else {
                    VarStatus::AtLower
                };
                t.x[old] = bound;

                let entering_value = t.x[j] + step;
                let piv = t.at(r, j);
                if piv.abs() < TOL_PIVOT {
                    return Err(Error::SolverFailure("degenerate pivot element".into()));
                }
                t.scale_row(r, 1.0 / piv);
                for i in 0..t.m {
                    if i != r {
                        let f = t.at(i, j);
                        if f != 0.0 {
                            t.eliminate(i, r, f);
                        }
                    }
                }
                let rc = t.reduced[j];
                if rc != 0.0 {
                    let rs = r * t.n;
                    for c in 0..t.n {
                        t.reduced[c] -= rc * t.a[rs + c];
                    }
                }
                t.basis[r] = j;
                t.status[j] = VarStatus::Basic(r);
                t.basic_value[r] = entering_value;
            }
            _ => {
                // Entering variable runs bound to bound; basis unchanged.
                let step = dir * span;
                for i in 0..t.m {
                    let w = t.at(i, j);
                    if w != 0.0 {
                        t.basic_value[i] -= step * w;
                    }
                }
                let (new_status, bound) = if dir > 0.0 {
                    (VarStatus::AtUpper, t.upper[j])
                } else {
                    (VarStatus::AtLower, t.lower[j])
                };
                t.status[j] = new_status;
                t.x[j] = bound;
            }
        }
    }

    // Assemble the point: nonbasic at bounds, basic from tracked values
    // clamped to their box to shed accumulated roundoff.
    let mut x = t.x.clone();
    for (i, &j) in t.basis.iter().enumerate() {
        x[j] = t.basic_value[i].clamp(t.lower[j], t.upper[j].min(f64::MAX));
    }
    let objective = lp
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .sum::<f64>();
    Ok(Solution {
        x,
        objective,
        iterations,
    })
}
