use super::simplex::{LpStatus, Simplex};
use crate::error::{Error, Result};
use crate::model::Sense;

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `maximize c·x` subject to sparse rows and `lower <= x <= upper`.
/// Bounds may be infinite.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// `n` variables in `[0, ∞)` with a zero objective and no rows.
    pub fn new(n: usize) -> Self {
        Self { objective: vec![0.0; n], rows: Vec::new(), lower: vec![0.0; n], upper: vec![f64::INFINITY; n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.rows.push(LpRow { coeffs, sense, rhs });
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::invalid("bound vectors must match the objective length"));
        }
        for (l, u) in self.lower.iter().zip(&self.upper) {
            if l.is_nan() || u.is_nan() || l > u || *l == f64::INFINITY || *u == f64::NEG_INFINITY {
                return Err(Error::invalid(format!("invalid variable bounds [{l}, {u}]")));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("objective coefficients must be finite"));
        }
        for row in &self.rows {
            if !row.rhs.is_finite() || row.coeffs.iter().any(|&(k, c)| k >= n || !c.is_finite()) {
                return Err(Error::invalid("row references an unknown variable or non-finite value"));
            }
        }
        Ok(())
    }

    /// Largest bound or row violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| (l - v).max(v - u).max(0.0));
        let rows = self.rows.iter().map(|r| {
            let lhs: f64 = r.coeffs.iter().map(|&(k, c)| c * x[k]).sum();
            match r.sense {
                Sense::Le => (lhs - r.rhs).max(0.0),
                Sense::Ge => (r.rhs - lhs).max(0.0),
                Sense::Eq => (lhs - r.rhs).abs(),
            }
        });
        bounds.chain(rows).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// One dual per row, for the maximization convention.
    pub duals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

/// Solves a linear program with the two-phase bounded simplex.
///
/// Infeasibility and unboundedness are outcomes, not errors; errors are
/// reserved for malformed input and exhausted iteration budgets.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let rows: Vec<(Sense, f64)> = lp.rows.iter().map(|r| (r.sense, r.rhs)).collect();
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.num_vars()];
    for (i, row) in lp.rows.iter().enumerate() {
        for &(k, c) in &row.coeffs {
            if c != 0.0 {
                cols[k].push((i, c));
            }
        }
    }
    let mut simplex = Simplex::new(&rows);
    let ids: Vec<usize> = cols
        .into_iter()
        .enumerate()
        .map(|(j, col)| simplex.add_column(lp.objective[j], col, lp.lower[j], lp.upper[j]))
        .collect();
    Ok(match simplex.solve()? {
        LpStatus::Infeasible => LpOutcome::Infeasible,
        LpStatus::Unbounded => LpOutcome::Unbounded,
        LpStatus::Optimal => {
            let x: Vec<f64> = ids
                .iter()
                .enumerate()
                .map(|(j, &id)| simplex.value(id).clamp(lp.lower[j], lp.upper[j]))
                .collect();
            let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
            LpOutcome::Optimal(LpSolution { x, value, duals: simplex.duals() })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bounded_variable() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![1.0];
        lp.add_row(vec![(0, 1.0)], Sense::Le, 3.0);
        let sol = solve_lp(&lp).unwrap();
        let s = sol.optimal().unwrap();
        assert!((s.x[0] - 3.0).abs() < 1e-12);
        assert!((s.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_face() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Sense::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.optimal().unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![1.0];
        lp.add_row(vec![(0, 1.0)], Sense::Le, 1.0);
        lp.add_row(vec![(0, 1.0)], Sense::Ge, 2.0);
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 0.0];
        lp.add_row(vec![(0, 1.0), (1, -1.0)], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn bounds_free_and_equality() {
        // max -|x - 2| style: max y s.t. y <= x - 2, y <= 2 - x, x free, y free
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![0.0, 1.0];
        lp.lower = vec![f64::NEG_INFINITY, f64::NEG_INFINITY];
        lp.add_row(vec![(1, 1.0), (0, -1.0)], Sense::Le, -2.0);
        lp.add_row(vec![(1, 1.0), (0, 1.0)], Sense::Le, 2.0);
        let s = solve_lp(&lp).unwrap();
        let s = s.optimal().unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-9 && s.x[1].abs() < 1e-9);

        let mut lp = LinearProgram::new(3);
        lp.objective = vec![1.0, 2.0, -1.0];
        lp.upper = vec![4.0, 1.0, 10.0];
        lp.lower = vec![-1.0, 0.0, 2.0];
        lp.add_row(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Sense::Eq, 5.0);
        let s = solve_lp(&lp).unwrap();
        let s = s.optimal().unwrap();
        // x2 at its lower bound 2, x1 = 1, x0 = 2
        assert!((s.value - (2.0 + 2.0 - 2.0)).abs() < 1e-9, "{s:?}");
        assert!(lp.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn duals_certify_optimality() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![3.0, 2.0];
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Sense::Le, 4.0);
        lp.add_row(vec![(0, 1.0), (1, 3.0)], Sense::Le, 6.0);
        lp.add_row(vec![(0, 1.0)], Sense::Le, 3.0);
        let out = solve_lp(&lp).unwrap();
        let s = out.optimal().unwrap();
        assert!((s.value - 11.0).abs() < 1e-9);
        let dual_value: f64 = s.duals.iter().zip(&lp.rows).map(|(y, r)| y * r.rhs).sum();
        assert!((dual_value - 11.0).abs() < 1e-9);
        assert!(s.duals.iter().all(|&y| y >= -1e-12));
    }

    #[test]
    fn malformed_input_is_an_error() {
        let mut lp = LinearProgram::new(1);
        lp.lower = vec![2.0];
        lp.upper = vec![1.0];
        assert!(solve_lp(&lp).is_err());
        let mut lp = LinearProgram::new(1);
        lp.add_row(vec![(3, 1.0)], Sense::Le, 1.0);
        assert!(solve_lp(&lp).is_err());
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule
        let mut lp = LinearProgram::new(4);
        lp.objective = vec![0.75, -20.0, 0.5, -6.0];
        lp.add_row(vec![(0, 0.25), (1, -8.0), (2, -1.0), (3, 9.0)], Sense::Le, 0.0);
        lp.add_row(vec![(0, 0.5), (1, -12.0), (2, -0.5), (3, 3.0)], Sense::Le, 0.0);
        lp.add_row(vec![(2, 1.0)], Sense::Le, 1.0);
        let out = solve_lp(&lp).unwrap();
        assert!((out.optimal().unwrap().value - 1.25).abs() < 1e-9);
    }
}
