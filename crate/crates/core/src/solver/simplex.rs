//! Bounded-variable revised simplex with an explicit dense basis inverse.
//!
//! Every row gets a logical (slack) column whose bounds encode the row
//! sense, so all constraints are equalities `A x + s = b`. Phase 1 starts
//! from the all-logical basis and adds one artificial per row whose slack
//! cannot absorb the residual. Pricing is Dantzig's rule with a switch to
//! Bland's rule after a run of degenerate pivots, which rules out cycling.
//!
//! Columns may be appended and costs changed after a solve; the current
//! basis stays primal feasible as long as new columns enter at zero, so
//! [`Simplex::reoptimize`] continues from where the last solve stopped.

use crate::error::{Error, Result};
use crate::model::Sense;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const PRIMAL_TOL: f64 = 1e-10;
const PHASE1_TOL: f64 = 1e-8;
const REFACTOR_EVERY: usize = 64;
const DEGENERATE_RUN: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
enum ColKind {
    Logical(usize),
    Artificial(usize, f64),
    Sparse(Vec<(usize, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum State {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Free nonbasic variable resting at zero.
    Zero,
}

#[derive(Debug, Clone)]
struct Var {
    kind: ColKind,
    cost: f64,
    lower: f64,
    upper: f64,
    state: State,
    value: f64,
}

impl Var {
    fn fixed(&self) -> bool {
        self.upper - self.lower <= 0.0
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Simplex {
    m: usize,
    rhs: Vec<f64>,
    vars: Vec<Var>,
    /// Variable index of the basic variable in each row position.
    basis: Vec<usize>,
    /// Row-major `m × m` inverse of the basis matrix.
    binv: Vec<f64>,
    pivots_since_refactor: usize,
    started: bool,
    pub(crate) iterations: usize,
    iteration_limit: usize,
    /// Logical bounds per row, kept for cold restarts.
    senses: Vec<(f64, f64)>,
    singular: bool,
}

impl Simplex {
    /// A program with the given rows and no structural columns yet.
    pub(crate) fn new(rows: &[(Sense, f64)]) -> Self {
        let m = rows.len();
        let mut vars = Vec::with_capacity(2 * m);
        let senses: Vec<(f64, f64)> = rows
            .iter()
            .map(|&(sense, _)| match sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            })
            .collect();
        for (i, &(lower, upper)) in senses.iter().enumerate() {
            vars.push(Var { kind: ColKind::Logical(i), cost: 0.0, lower, upper, state: State::Basic(i), value: 0.0 });
        }
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        Self {
            m,
            rhs: rows.iter().map(|r| r.1).collect(),
            vars,
            basis: (0..m).collect(),
            binv,
            pivots_since_refactor: 0,
            started: false,
            iterations: 0,
            iteration_limit: 200_000,
            senses,
            singular: false,
        }
    }

    /// Appends a structural column; returns its variable index. The column
    /// enters nonbasic at its lower bound (or upper, or zero when free).
    pub(crate) fn add_column(&mut self, cost: f64, coeffs: Vec<(usize, f64)>, lower: f64, upper: f64) -> usize {
        debug_assert!(coeffs.iter().all(|&(r, _)| r < self.m));
        let (state, value) = if lower.is_finite() {
            (State::AtLower, lower)
        } else if upper.is_finite() {
            (State::AtUpper, upper)
        } else {
            (State::Zero, 0.0)
        };
        if self.started && value != 0.0 {
            // shift basic values so the rows stay satisfied
            let alpha = self.ftran(&coeffs);
            for (pos, &b) in self.basis.iter().enumerate() {
                self.vars[b].value -= alpha[pos] * value;
            }
        }
        self.vars.push(Var { kind: ColKind::Sparse(coeffs), cost, lower, upper, state, value });
        self.vars.len() - 1
    }

    pub(crate) fn set_cost(&mut self, var: usize, cost: f64) {
        self.vars[var].cost = cost;
    }

    pub(crate) fn value(&self, var: usize) -> f64 {
        self.vars[var].value
    }

    pub(crate) fn objective(&self) -> f64 {
        self.vars.iter().map(|v| v.cost * v.value).sum()
    }

    /// Row duals `y = c_B B^{-1}` of the current basis.
    pub(crate) fn duals(&self) -> Vec<f64> {
        let costs: Vec<f64> = self.basis.iter().map(|&b| self.vars[b].cost).collect();
        self.btran(&costs)
    }

    /// Two-phase solve from the initial logical basis.
    pub(crate) fn solve(&mut self) -> Result<LpStatus> {
        assert!(!self.started, "solve() may only run once; use reoptimize()");
        self.started = true;
        match self.two_phase() {
            Err(e) if self.singular => {
                self.cold_start();
                self.two_phase().map_err(|_| e)
            }
            other => other,
        }
    }

    /// Phase 2 from the current (primal feasible) basis. Falls back to a
    /// cold two-phase solve if the basis turns numerically singular.
    pub(crate) fn reoptimize(&mut self) -> Result<LpStatus> {
        match self.phase_two() {
            Err(e) if self.singular => {
                self.cold_start();
                self.two_phase().map_err(|_| e)
            }
            other => other,
        }
    }

    fn two_phase(&mut self) -> Result<LpStatus> {
        if !self.phase_one()? {
            return Ok(LpStatus::Infeasible);
        }
        self.phase_two()
    }

    fn phase_two(&mut self) -> Result<LpStatus> {
        let costs: Vec<f64> = self.vars.iter().map(|v| v.cost).collect();
        let status = self.iterate(&costs)?;
        self.refactor()?;
        Ok(status)
    }

    /// Back to the all-logical basis with artificials retired.
    fn cold_start(&mut self) {
        let m = self.m;
        self.singular = false;
        for (idx, v) in self.vars.iter_mut().enumerate() {
            match v.kind {
                ColKind::Logical(i) => v.state = State::Basic(i),
                ColKind::Artificial(..) => {
                    v.upper = 0.0;
                    (v.state, v.value) = (State::AtLower, 0.0);
                }
                ColKind::Sparse(_) => {}
            }
            debug_assert!(idx >= m || matches!(v.kind, ColKind::Logical(_)));
        }
        for (i, v) in self.vars[..m].iter_mut().enumerate() {
            (v.lower, v.upper) = self.senses[i];
        }
        self.basis = (0..m).collect();
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = 1.0;
        }
        self.pivots_since_refactor = 0;
    }

    fn phase_one(&mut self) -> Result<bool> {
        for v in self.vars.iter_mut() {
            if matches!(v.kind, ColKind::Sparse(_)) {
                (v.state, v.value) = if v.lower.is_finite() {
                    (State::AtLower, v.lower)
                } else if v.upper.is_finite() {
                    (State::AtUpper, v.upper)
                } else {
                    (State::Zero, 0.0)
                };
            }
        }
        let mut residual = self.rhs.clone();
        for v in &self.vars {
            if let ColKind::Sparse(col) = &v.kind {
                if v.value != 0.0 {
                    for &(r, c) in col {
                        residual[r] -= c * v.value;
                    }
                }
            }
        }
        let mut any_artificial = false;
        for i in 0..self.m {
            let (lo, up) = (self.vars[i].lower, self.vars[i].upper);
            let r = residual[i];
            if r >= lo - PRIMAL_TOL && r <= up + PRIMAL_TOL {
                self.vars[i].value = r.clamp(lo, up);
                continue;
            }
            let (bound, state) = if r < lo { (lo, State::AtLower) } else { (up, State::AtUpper) };
            self.vars[i].state = state;
            self.vars[i].value = bound;
            let sign = if r > bound { 1.0 } else { -1.0 };
            self.vars.push(Var {
                kind: ColKind::Artificial(i, sign),
                cost: 0.0,
                lower: 0.0,
                upper: f64::INFINITY,
                state: State::Basic(i),
                value: (r - bound).abs(),
            });
            self.basis[i] = self.vars.len() - 1;
            self.binv[i * self.m + i] = sign;
            any_artificial = true;
        }
        if !any_artificial {
            return Ok(true);
        }
        let costs: Vec<f64> = self
            .vars
            .iter()
            .map(|v| if matches!(v.kind, ColKind::Artificial(..)) { -1.0 } else { 0.0 })
            .collect();
        let status = self.iterate(&costs)?;
        debug_assert_ne!(status, LpStatus::Unbounded);
        self.refactor()?;
        let scale = 1.0 + self.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let infeasibility: f64 = self
            .vars
            .iter()
            .filter(|v| matches!(v.kind, ColKind::Artificial(..)))
            .map(|v| v.value)
            .sum();
        // lock artificials at zero for the rest of the solve
        for v in self.vars.iter_mut() {
            if matches!(v.kind, ColKind::Artificial(..)) {
                v.upper = 0.0;
                if !matches!(v.state, State::Basic(_)) {
                    v.state = State::AtLower;
                    v.value = 0.0;
                }
            }
        }
        Ok(infeasibility <= PHASE1_TOL * scale)
    }

    fn column(&self, var: usize) -> Vec<(usize, f64)> {
        match &self.vars[var].kind {
            ColKind::Logical(r) => vec![(*r, 1.0)],
            ColKind::Artificial(r, s) => vec![(*r, *s)],
            ColKind::Sparse(c) => c.clone(),
        }
    }

    fn ftran(&self, col: &[(usize, f64)]) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m];
        for &(k, c) in col {
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.binv[i * m + k] * c;
            }
        }
        out
    }

    fn btran(&self, row: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &c) in row.iter().enumerate() {
            if c != 0.0 {
                let r = &self.binv[i * m..(i + 1) * m];
                for (yk, &b) in y.iter_mut().zip(r) {
                    *yk += c * b;
                }
            }
        }
        y
    }

    fn dot_column(&self, var: usize, y: &[f64]) -> f64 {
        match &self.vars[var].kind {
            ColKind::Logical(r) => y[*r],
            ColKind::Artificial(r, s) => s * y[*r],
            ColKind::Sparse(c) => c.iter().map(|&(r, v)| v * y[r]).sum(),
        }
    }

    /// Rebuilds `B^{-1}` by Gauss-Jordan elimination and recomputes the
    /// basic values from the nonbasic ones.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        if m == 0 {
            return Ok(());
        }
        let mut b = vec![0.0; m * m];
        for (pos, &var) in self.basis.iter().enumerate() {
            for (r, c) in self.column(var) {
                b[r * m + pos] = c;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&p, &q| b[p * m + col].abs().total_cmp(&b[q * m + col].abs()))
                .unwrap();
            if b[piv * m + col].abs() < 1e-11 {
                self.singular = true;
                return Err(Error::invalid("simplex basis became singular"));
            }
            if piv != col {
                for k in 0..m {
                    b.swap(piv * m + k, col * m + k);
                    inv.swap(piv * m + k, col * m + k);
                }
            }
            let d = 1.0 / b[col * m + col];
            for k in 0..m {
                b[col * m + k] *= d;
                inv[col * m + k] *= d;
            }
            for r in 0..m {
                if r != col {
                    let f = b[r * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            b[r * m + k] -= f * b[col * m + k];
                            inv[r * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.pivots_since_refactor = 0;

        let mut residual = self.rhs.clone();
        for (idx, v) in self.vars.iter().enumerate() {
            if !matches!(v.state, State::Basic(_)) && v.value != 0.0 {
                for (r, c) in self.column(idx) {
                    residual[r] -= c * v.value;
                }
            }
        }
        let xb = self.ftran(&residual.iter().copied().enumerate().collect::<Vec<_>>());
        for (pos, &var) in self.basis.iter().enumerate() {
            self.vars[var].value = xb[pos];
        }
        Ok(())
    }

    fn iterate(&mut self, costs: &[f64]) -> Result<LpStatus> {
        let m = self.m;
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= self.iteration_limit {
                return Err(Error::Resource { budget: "simplex iteration", limit: self.iteration_limit });
            }
            let cb: Vec<f64> = self.basis.iter().map(|&b| costs.get(b).copied().unwrap_or(0.0)).collect();
            let y = self.btran(&cb);
            let bland = degenerate_run >= DEGENERATE_RUN;

            // pricing
            let mut entering: Option<(usize, f64)> = None;
            for (j, v) in self.vars.iter().enumerate() {
                if matches!(v.state, State::Basic(_)) || v.fixed() {
                    continue;
                }
                let d = costs.get(j).copied().unwrap_or(0.0) - self.dot_column(j, &y);
                let dir = match v.state {
                    State::AtLower if d > COST_TOL => 1.0,
                    State::AtUpper if d < -COST_TOL => -1.0,
                    State::Zero if d.abs() > COST_TOL => d.signum(),
                    _ => continue,
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if entering.map_or(true, |(_, best)| d.abs() > best.abs()) {
                    entering = Some((j, d.abs() * dir));
                }
            }
            let Some((q, signed)) = entering else {
                return Ok(LpStatus::Optimal);
            };
            let dir = signed.signum();
            let alpha = self.ftran(&self.column(q));

            // Harris two-pass ratio test; basic x_B moves by -dir·t·alpha
            let limit = |pos: usize, tol: f64| -> Option<f64> {
                let a = dir * alpha[pos];
                if a.abs() < PIVOT_TOL {
                    return None;
                }
                let v = &self.vars[self.basis[pos]];
                if a > 0.0 {
                    v.lower.is_finite().then(|| ((v.value - v.lower + tol) / a).max(0.0))
                } else {
                    v.upper.is_finite().then(|| ((v.upper - v.value + tol) / -a).max(0.0))
                }
            };
            let mut bound = f64::INFINITY;
            for pos in 0..m {
                if let Some(t) = limit(pos, PRIMAL_TOL) {
                    bound = bound.min(t);
                }
            }
            let own_range = self.vars[q].upper - self.vars[q].lower;
            let mut leave: Option<usize> = None;
            if bound.is_finite() {
                let mut best_pivot = 0.0;
                for pos in 0..m {
                    if let Some(t) = limit(pos, 0.0) {
                        if t <= bound {
                            let piv = alpha[pos].abs();
                            let better = if bland {
                                leave.map_or(true, |l| self.basis[pos] < self.basis[l])
                            } else {
                                piv > best_pivot
                            };
                            if better {
                                best_pivot = piv;
                                leave = Some(pos);
                            }
                        }
                    }
                }
            }
            let step = leave.map(|pos| limit(pos, 0.0).unwrap());
            self.iterations += 1;

            match step {
                Some(t) if t <= own_range => {
                    let r = leave.unwrap();
                    for pos in 0..m {
                        let b = self.basis[pos];
                        self.vars[b].value -= dir * t * alpha[pos];
                    }
                    self.vars[q].value += dir * t;
                    let out = self.basis[r];
                    let ov = &mut self.vars[out];
                    let a = dir * alpha[r];
                    (ov.state, ov.value) = if a > 0.0 { (State::AtLower, ov.lower) } else { (State::AtUpper, ov.upper) };
                    self.vars[q].state = State::Basic(r);
                    self.basis[r] = q;
                    self.pivot(r, &alpha);
                    degenerate_run = if t <= PRIMAL_TOL { degenerate_run + 1 } else { 0 };
                }
                _ if own_range.is_finite() => {
                    // bound flip
                    let t = own_range;
                    for pos in 0..m {
                        let b = self.basis[pos];
                        self.vars[b].value -= dir * t * alpha[pos];
                    }
                    let v = &mut self.vars[q];
                    (v.state, v.value) = if dir > 0.0 { (State::AtUpper, v.upper) } else { (State::AtLower, v.lower) };
                    degenerate_run = 0;
                }
                _ => return Ok(LpStatus::Unbounded),
            }
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
        }
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let d = 1.0 / alpha[r];
        for k in 0..m {
            self.binv[r * m + k] *= d;
        }
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (row_r, after) = rest.split_at_mut(m);
        for (i, chunk) in before.chunks_exact_mut(m).enumerate() {
            let f = alpha[i];
            if f != 0.0 {
                for (x, &p) in chunk.iter_mut().zip(row_r.iter()) {
                    *x -= f * p;
                }
            }
        }
        for (off, chunk) in after.chunks_exact_mut(m).enumerate() {
            let f = alpha[r + 1 + off];
            if f != 0.0 {
                for (x, &p) in chunk.iter_mut().zip(row_r.iter()) {
                    *x -= f * p;
                }
            }
        }
        for (idx, &b) in self.basis.iter().enumerate() {
            self.vars[b].state = State::Basic(idx);
        }
        self.pivots_since_refactor += 1;
    }
}
