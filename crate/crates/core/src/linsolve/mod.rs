//! Small dense linear programs with bounded variables.
//!
//! Problems here have at most a few hundred variables and rows, so the solver
//! is a dense two-phase primal simplex (see [`solve`]). A separate
//! [`verify`] re-checks any assignment against the raw constraint data.
//!
//! [`LinearProgram::write_debug`] dumps a problem as plain text, one item per
//! line:
//!
//! ```text
//! vars <n>
//! bound <j> <lower> <upper>
//! obj <c_0> <c_1> ...
//! eq <a_0> <a_1> ... | <rhs>
//! le <a_0> <a_1> ... | <rhs>
//! ```

mod simplex;

use std::io::{self, Write};

use thiserror::Error;

pub use simplex::solve;

/// Residual tolerance of accepted solutions (absolute, scaled by `max(1, |b|)`).
pub const FEAS_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("row {row} has {actual} coefficients, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        actual: usize,
    },
    #[error("variable {0} has lower bound above upper bound or a NaN bound")]
    BadBounds(usize),
    #[error("non-finite coefficient or right-hand side in row {0}")]
    NonFinite(usize),
    #[error("objective is unbounded below")]
    Unbounded,
    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

/// `minimize c·x  s.t.  A_eq x = b_eq,  A_le x ≤ b_le,  l ≤ x ≤ u`.
///
/// Bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub eq_rows: Vec<Row>,
    pub le_rows: Vec<Row>,
    pub objective: Vec<f64>,
}

impl LinearProgram {
    /// Variables default to `[0, +∞)` with a zero objective.
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            lower: vec![0.0; n_vars],
            upper: vec![f64::INFINITY; n_vars],
            eq_rows: Vec::new(),
            le_rows: Vec::new(),
            objective: vec![0.0; n_vars],
        }
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.eq_rows.push(Row { coeffs, rhs });
    }

    pub fn add_le(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.le_rows.push(Row { coeffs, rhs });
    }

    pub fn set_objective(&mut self, objective: Vec<f64>) {
        self.objective = objective;
    }

    pub fn n_rows(&self) -> usize {
        self.eq_rows.len() + self.le_rows.len()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.lower.len() != self.n_vars || self.upper.len() != self.n_vars {
            return Err(LpError::Numerical("bound vectors have the wrong length".into()));
        }
        for j in 0..self.n_vars {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(LpError::BadBounds(j));
            }
        }
        if self.objective.len() != self.n_vars {
            return Err(LpError::RowLength {
                row: usize::MAX,
                expected: self.n_vars,
                actual: self.objective.len(),
            });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Numerical("non-finite objective".into()));
        }
        for (row, r) in self.eq_rows.iter().chain(&self.le_rows).enumerate() {
            if r.coeffs.len() != self.n_vars {
                return Err(LpError::RowLength {
                    row,
                    expected: self.n_vars,
                    actual: r.coeffs.len(),
                });
            }
            if !r.rhs.is_finite() || r.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFinite(row));
            }
        }
        Ok(())
    }

    /// Writes the plain-text dump described in the module docs.
    pub fn write_debug<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "vars {}", self.n_vars)?;
        for j in 0..self.n_vars {
            writeln!(out, "bound {} {} {}", j, self.lower[j], self.upper[j])?;
        }
        write!(out, "obj")?;
        for c in &self.objective {
            write!(out, " {c}")?;
        }
        writeln!(out)?;
        for (kind, rows) in [("eq", &self.eq_rows), ("le", &self.le_rows)] {
            for r in rows {
                write!(out, "{kind}")?;
                for a in &r.coeffs {
                    write!(out, " {a}")?;
                }
                writeln!(out, " | {}", r.rhs)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    /// Feasible and optimal for a non-zero objective.
    Optimal,
    /// Feasible; the objective was identically zero.
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Empty when infeasible.
    pub values: Vec<f64>,
    pub objective_value: f64,
}

impl LpSolution {
    pub fn is_feasible(&self) -> bool {
        self.status != LpStatus::Infeasible
    }
}

/// Largest violation found by [`verify`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Bound { var: usize, amount: f64 },
    Eq { row: usize, residual: f64 },
    Le { row: usize, excess: f64 },
    Length { expected: usize, actual: usize },
}

/// Checks `values` against every bound and row of `lp` with tolerance `tol`
/// (bounds absolute, rows relative to `max(1, |rhs|)`). Independent of the
/// solver's internal state.
pub fn verify(lp: &LinearProgram, values: &[f64], tol: f64) -> Result<(), Violation> {
    if values.len() != lp.n_vars {
        return Err(Violation::Length {
            expected: lp.n_vars,
            actual: values.len(),
        });
    }
    for (var, &x) in values.iter().enumerate() {
        let amount = (lp.lower[var] - x).max(x - lp.upper[var]);
        if !x.is_finite() || amount > tol {
            return Err(Violation::Bound { var, amount });
        }
    }
    let dot = |r: &Row| r.coeffs.iter().zip(values).map(|(a, x)| a * x).sum::<f64>();
    for (row, r) in lp.eq_rows.iter().enumerate() {
        let residual = dot(r) - r.rhs;
        if residual.abs() > tol * r.rhs.abs().max(1.0) {
            return Err(Violation::Eq { row, residual });
        }
    }
    for (row, r) in lp.le_rows.iter().enumerate() {
        let excess = dot(r) - r.rhs;
        if excess > tol * r.rhs.abs().max(1.0) {
            return Err(Violation::Le { row, excess });
        }
    }
    Ok(())
}
