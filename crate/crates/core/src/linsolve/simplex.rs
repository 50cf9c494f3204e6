//! Dense bounded-variable primal simplex.
//!
//! Rows are equilibrated (divided by their largest coefficient), `≤` rows get
//! a slack in `[0, ∞)`, and rows whose initial residual cannot be absorbed by a
//! slack get an artificial variable. Phase one drives the artificials to zero;
//! phase two minimizes the objective. Entering and leaving variables follow
//! Bland's rule, which rules out cycling. Basic values are recomputed from the
//! original rows with a dense LU solve at the end.

use super::{verify, LinearProgram, LpError, LpSolution, LpStatus, FEAS_TOL};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const BOUND_EPS: f64 = 1e-12;
const TIE_EPS: f64 = 1e-13;

/// Solves `lp`. Returns `Infeasible` when phase one cannot remove the
/// artificial infeasibility, and [`LpError::Unbounded`] when a non-zero
/// objective decreases without limit.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.n_vars;
    let infeasible = || LpSolution {
        status: LpStatus::Infeasible,
        values: Vec::new(),
        objective_value: f64::NAN,
    };

    // Equilibrated rows; all-zero rows are decided immediately.
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::with_capacity(lp.n_rows());
    for (r, is_eq) in lp
        .eq_rows
        .iter()
        .map(|r| (r, true))
        .chain(lp.le_rows.iter().map(|r| (r, false)))
    {
        let scale = r.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if scale == 0.0 {
            let tol = FEAS_TOL * r.rhs.abs().max(1.0);
            let violated = if is_eq { r.rhs.abs() > tol } else { r.rhs < -tol };
            if violated {
                return Ok(infeasible());
            }
            continue;
        }
        rows.push((r.coeffs.iter().map(|a| a / scale).collect(), r.rhs / scale, is_eq));
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| !r.2).count();

    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    let mut x: Vec<f64> = (0..n)
        .map(|j| {
            if lower[j].is_finite() {
                lower[j]
            } else if upper[j].is_finite() {
                upper[j]
            } else {
                0.0
            }
        })
        .collect();
    lower.extend(std::iter::repeat_n(0.0, n_slack));
    upper.extend(std::iter::repeat_n(f64::INFINITY, n_slack));
    x.extend(std::iter::repeat_n(0.0, n_slack));

    // Decide the starting basic variable of every row.
    let mut residuals = Vec::with_capacity(m);
    let mut needs_art = Vec::with_capacity(m);
    for (coeffs, rhs, is_eq) in &rows {
        let r = rhs - coeffs.iter().zip(&x).map(|(a, v)| a * v).sum::<f64>();
        residuals.push(r);
        needs_art.push(*is_eq || r < 0.0);
    }
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let ncols = n + n_slack + n_art;
    lower.extend(std::iter::repeat_n(0.0, n_art));
    upper.extend(std::iter::repeat_n(f64::INFINITY, n_art));
    x.extend(std::iter::repeat_n(0.0, n_art));

    let mut orig = vec![0.0; m * ncols];
    let mut tab = vec![0.0; m * ncols];
    let mut basis = vec![0usize; m];
    let mut is_basic = vec![false; ncols];
    let mut rhs = Vec::with_capacity(m);
    let (mut slack_col, mut art_col) = (n, n + n_slack);
    for (i, (coeffs, b, is_eq)) in rows.iter().enumerate() {
        let row = &mut orig[i * ncols..(i + 1) * ncols];
        row[..n].copy_from_slice(coeffs);
        let mut slack = None;
        if !is_eq {
            row[slack_col] = 1.0;
            slack = Some(slack_col);
            slack_col += 1;
        }
        let (basic, sign) = if needs_art[i] {
            let sign = if residuals[i] >= 0.0 { 1.0 } else { -1.0 };
            row[art_col] = sign;
            art_col += 1;
            x[art_col - 1] = residuals[i].abs();
            (art_col - 1, sign)
        } else {
            let s = slack.expect("inequality rows carry a slack");
            x[s] = residuals[i];
            (s, 1.0)
        };
        basis[i] = basic;
        is_basic[basic] = true;
        for (t, o) in tab[i * ncols..(i + 1) * ncols].iter_mut().zip(row.iter()) {
            *t = o / sign;
        }
        rhs.push(*b);
    }

    let mut t = Tableau {
        m,
        ncols,
        tab,
        basis,
        is_basic,
        x,
        lower,
        upper,
    };
    let max_iter = 50 * (m + ncols) + 1000;
    let art_start = n + n_slack;

    if n_art > 0 {
        let mut cost = vec![0.0; ncols];
        cost[art_start..].fill(1.0);
        t.optimize(&cost, max_iter)?;
        let art_sum: f64 = t.x[art_start..].iter().sum();
        let scale = rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        if art_sum > 1e-9 * scale {
            return Ok(infeasible());
        }
        // Pivot remaining basic artificials out where possible.
        for r in 0..m {
            if t.basis[r] < art_start {
                continue;
            }
            let row = &t.tab[r * ncols..(r + 1) * ncols];
            let candidate = (0..art_start)
                .filter(|&j| !t.is_basic[j])
                .map(|j| (j, row[j].abs()))
                .filter(|&(_, a)| a > PIVOT_TOL)
                .fold(None, |best: Option<(usize, f64)>, c| match best {
                    Some(b) if b.1 >= c.1 => Some(b),
                    _ => Some(c),
                });
            if let Some((j, _)) = candidate {
                let old = t.basis[r];
                t.pivot(r, j);
                t.x[old] = 0.0;
            }
        }
        for j in art_start..ncols {
            t.lower[j] = 0.0;
            t.upper[j] = 0.0;
            t.x[j] = 0.0;
        }
    }

    let status = if lp.objective.iter().all(|&c| c == 0.0) {
        LpStatus::Feasible
    } else {
        let mut cost = vec![0.0; ncols];
        cost[..n].copy_from_slice(&lp.objective);
        t.optimize(&cost, max_iter)?;
        LpStatus::Optimal
    };

    t.polish(&orig, &rhs);
    let values = t.x[..n].to_vec();
    if let Err(v) = verify(lp, &values, FEAS_TOL) {
        return Err(LpError::Numerical(format!("solution failed verification: {v:?}")));
    }
    let objective_value = lp.objective.iter().zip(&values).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status,
        values,
        objective_value,
    })
}

struct Tableau {
    m: usize,
    ncols: usize,
    /// Row-major `B⁻¹M`.
    tab: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    x: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Tableau {
    fn optimize(&mut self, cost: &[f64], max_iter: usize) -> Result<(), LpError> {
        let (m, nc) = (self.m, self.ncols);
        for _ in 0..max_iter {
            // Bland: first improving column.
            let mut entering = None;
            for j in 0..nc {
                if self.is_basic[j] {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..m {
                    let cb = cost[self.basis[i]];
                    if cb != 0.0 {
                        d -= cb * self.tab[i * nc + j];
                    }
                }
                if d < -COST_TOL && self.x[j] < self.upper[j] - BOUND_EPS {
                    entering = Some((j, 1.0));
                    break;
                }
                if d > COST_TOL && self.x[j] > self.lower[j] + BOUND_EPS {
                    entering = Some((j, -1.0));
                    break;
                }
            }
            let Some((j, dir)) = entering else {
                return Ok(());
            };

            // Ratio test; a bound flip of the entering variable competes with
            // every basic variable reaching one of its bounds.
            let mut best = self.upper[j] - self.lower[j];
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let alpha = dir * self.tab[i * nc + j];
                let b = self.basis[i];
                let (limit, bound) = if alpha > PIVOT_TOL && self.lower[b].is_finite() {
                    ((self.x[b] - self.lower[b]) / alpha, self.lower[b])
                } else if alpha < -PIVOT_TOL && self.upper[b].is_finite() {
                    ((self.upper[b] - self.x[b]) / -alpha, self.upper[b])
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let better = limit < best - TIE_EPS
                    || (limit <= best + TIE_EPS
                        && leave.is_some_and(|(r, _)| b < self.basis[r]));
                if better {
                    best = limit;
                    leave = Some((i, bound));
                }
            }
            if !best.is_finite() {
                return Err(LpError::Unbounded);
            }

            let step = dir * best;
            for i in 0..m {
                let a = self.tab[i * nc + j];
                if a != 0.0 {
                    self.x[self.basis[i]] -= step * a;
                }
            }
            match leave {
                None => {
                    self.x[j] = if dir > 0.0 { self.upper[j] } else { self.lower[j] };
                }
                Some((r, bound)) => {
                    self.x[j] += step;
                    let old = self.basis[r];
                    self.x[old] = bound;
                    self.pivot(r, j);
                }
            }
        }
        Err(LpError::Numerical("simplex iteration limit reached".into()))
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let nc = self.ncols;
        let piv = self.tab[r * nc + j];
        for v in &mut self.tab[r * nc..(r + 1) * nc] {
            *v /= piv;
        }
        let pivot_row = self.tab[r * nc..(r + 1) * nc].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.tab[i * nc + j];
            if f == 0.0 {
                continue;
            }
            for (v, p) in self.tab[i * nc..(i + 1) * nc].iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            self.tab[i * nc + j] = 0.0;
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[j] = true;
        self.basis[r] = j;
    }

    /// Recomputes basic values from the original rows: `B x_B = b − N x_N`.
    fn polish(&mut self, orig: &[f64], rhs: &[f64]) {
        let (m, nc) = (self.m, self.ncols);
        if m == 0 {
            return;
        }
        let mut a = vec![0.0; m * m];
        let mut b = rhs.to_vec();
        for i in 0..m {
            for j in 0..nc {
                let v = orig[i * nc + j];
                if v != 0.0 && !self.is_basic[j] {
                    b[i] -= v * self.x[j];
                }
            }
            for (k, &col) in self.basis.iter().enumerate() {
                a[i * m + k] = orig[i * nc + col];
            }
        }
        if let Some(sol) = lu_solve(&mut a, &mut b, m) {
            for (k, &col) in self.basis.iter().enumerate() {
                self.x[col] = sol[k];
            }
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn lu_solve(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))?;
        if a[p * n + k].abs() < 1e-14 {
            return None;
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            b.swap(k, p);
        }
        for i in k + 1..n {
            let f = a[i * n + k] / a[k * n + k];
            if f == 0.0 {
                continue;
            }
            for c in k..n {
                a[i * n + c] -= f * a[k * n + c];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| a[k * n + c] * x[c]).sum();
        x[k] = (b[k] - s) / a[k * n + k];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_equality() {
        let mut lp = LinearProgram::new(1);
        lp.set_bounds(0, 0.0, 1.0);
        lp.add_eq(vec![1.0], 0.5);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Feasible);
        assert!((s.values[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn contradictory_bound_and_row() {
        let mut lp = LinearProgram::new(1);
        lp.set_bounds(0, 1.0, 2.0);
        lp.add_le(vec![1.0], 0.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn tiny_polytope_minimum() {
        // Vertices of {x+y ≥ 1} ∩ [0,10]²: (1,0), (0,1), (10,0), (0,10), (10,10), ...
        // enumerated minimum of x+y over them is 1.
        let mut lp = LinearProgram::new(2);
        lp.set_bounds(0, 0.0, 10.0);
        lp.set_bounds(1, 0.0, 10.0);
        lp.add_le(vec![-1.0, -1.0], -1.0);
        lp.set_objective(vec![1.0, 1.0]);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 1.0).abs() < 1e-9);
        assert!(verify(&lp, &s.values, 1e-8).is_ok());
    }

    #[test]
    fn unbounded_objective() {
        let mut lp = LinearProgram::new(2);
        lp.add_le(vec![1.0, -1.0], 1.0);
        lp.set_objective(vec![0.0, -1.0]);
        assert_eq!(solve(&lp), Err(LpError::Unbounded));
    }

    #[test]
    fn zero_rows_are_decided_directly() {
        let mut lp = LinearProgram::new(1);
        lp.add_eq(vec![0.0], 1.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
        let mut lp = LinearProgram::new(1);
        lp.add_le(vec![0.0], 1.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Feasible);
    }

    #[test]
    fn free_variables_and_redundant_rows() {
        let mut lp = LinearProgram::new(2);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_eq(vec![1.0, 1.0], 2.0);
        lp.add_eq(vec![2.0, 2.0], 4.0);
        lp.add_eq(vec![1.0, -1.0], -4.0);
        let s = solve(&lp).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-10);
        assert!((s.values[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn classic_maximization() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36
        let mut lp = LinearProgram::new(2);
        lp.add_le(vec![1.0, 0.0], 4.0);
        lp.add_le(vec![0.0, 2.0], 12.0);
        lp.add_le(vec![3.0, 2.0], 18.0);
        lp.set_objective(vec![-3.0, -5.0]);
        let s = solve(&lp).unwrap();
        assert!((s.objective_value + 36.0).abs() < 1e-9);
        assert!((s.values[0] - 2.0).abs() < 1e-9 && (s.values[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example (cycles under the textbook largest-coefficient rule).
        let mut lp = LinearProgram::new(4);
        lp.add_le(vec![0.25, -60.0, -1.0 / 25.0, 9.0], 0.0);
        lp.add_le(vec![0.5, -90.0, -1.0 / 50.0, 3.0], 0.0);
        lp.add_le(vec![0.0, 0.0, 1.0, 0.0], 1.0);
        lp.set_objective(vec![-0.75, 150.0, -1.0 / 50.0, 6.0]);
        let s = solve(&lp).unwrap();
        assert!((s.objective_value + 0.05).abs() < 1e-9);
    }
}
