//! Bounded-variable primal simplex over an explicit dense basis inverse.
//!
//! Columns are stored sparse, the basis inverse dense and row-major. Every
//! row gets either a slack or an artificial as its initial basic variable;
//! phase 1 drives the artificials to zero, after which they are fixed at
//! zero and phase 2 minimizes the real objective.

use std::collections::HashSet;

use super::{LinearProgram, LpError, LpSolution, LpStatus, Pricing, Sense, SimplexOptions};

/// Pivots between full recomputations of basic values and duals.
const REFRESH_PERIOD: usize = 50;
/// Entries below this are dropped when updating the inverse.
const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
}

enum Step {
    Optimal,
    Unbounded,
}

struct Solver<'o> {
    m: usize,
    n_struct: usize,
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    true_cost: Vec<f64>,
    artificial: Vec<bool>,
    rhs: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    pi: Vec<f64>,
    alpha: Vec<f64>,
    alpha_nz: Vec<usize>,
    pivots: usize,
    since_refresh: usize,
    /// Hash of the basis and of the variables at their upper bound.
    signature: u64,
    /// Signatures visited since the last nondegenerate step.
    degenerate_run: HashSet<u64>,
    /// Set once a basis repeats; pricing follows Bland's rule until the
    /// objective moves again.
    cycling: bool,
    opts: &'o SimplexOptions,
}

/// Solves the LP relaxation of `lp` (integrality marks are ignored).
pub fn solve(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution, LpError> {
    solve_with_bounds(lp, &lp.bounds(), opts)
}

/// Same as [`solve`] with the variable bounds replaced by `bounds`.
pub fn solve_with_bounds(
    lp: &LinearProgram,
    bounds: &[(f64, f64)],
    opts: &SimplexOptions,
) -> Result<LpSolution, LpError> {
    lp.check()?;
    if bounds.len() != lp.num_vars() {
        return Err(LpError::Malformed(format!(
            "{} bounds for {} variables",
            bounds.len(),
            lp.num_vars()
        )));
    }
    if let Some((j, _)) = bounds
        .iter()
        .enumerate()
        .find(|(_, (lo, hi))| !lo.is_finite() || hi.is_nan() || hi < lo)
    {
        return Err(LpError::Malformed(format!(
            "bounds of {} are empty or unbounded below",
            lp.vars()[j].name
        )));
    }

    let mut s = Solver::new(lp, bounds, opts);
    let iterations = |s: &Solver| s.pivots;

    if s.artificial.iter().any(|&a| a) {
        s.cost = s.artificial.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        s.refresh();
        s.run()?;
        s.refresh();
        let infeasible = s
            .basis
            .iter()
            .any(|&b| s.artificial[b] && s.x[b] > opts.feasibility_tol);
        if infeasible {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: s.x[..s.n_struct].to_vec(),
                objective: f64::NAN,
                duals: vec![0.0; s.m],
                iterations: iterations(&s),
            });
        }
        for j in 0..s.artificial.len() {
            if s.artificial[j] {
                s.upper[j] = 0.0;
                s.lower[j] = 0.0;
                if s.state[j] != State::Basic {
                    s.x[j] = 0.0;
                    s.state[j] = State::AtLower;
                }
            }
        }
    }

    s.cost = s.true_cost.clone();
    let mut attempts = 0;
    loop {
        s.refresh();
        match s.run()? {
            Step::Unbounded => {
                return Ok(LpSolution {
                    status: LpStatus::Unbounded,
                    values: s.x[..s.n_struct].to_vec(),
                    objective: f64::NEG_INFINITY,
                    duals: vec![0.0; s.m],
                    iterations: iterations(&s),
                });
            }
            Step::Optimal => {}
        }
        s.refresh();
        let values = s.x[..s.n_struct].to_vec();
        let violation = lp.max_violation(&values, bounds);
        if violation <= opts.feasibility_tol || attempts >= 2 {
            break;
        }
        // Accumulated round-off in the inverse: rebuild it and resume.
        attempts += 1;
        s.reinvert();
    }

    let values: Vec<f64> = s.x[..s.n_struct].to_vec();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: lp.objective_value(&values),
        values,
        duals: s.pi.clone(),
        iterations: iterations(&s),
    })
}

impl<'o> Solver<'o> {
    fn new(lp: &LinearProgram, bounds: &[(f64, f64)], opts: &'o SimplexOptions) -> Self {
        let m = lp.num_constraints();
        let n_struct = lp.num_vars();

        let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_struct];
        for (i, row) in lp.constraints().iter().enumerate() {
            for &(v, a) in &row.coeffs {
                let list = &mut entries[v.0];
                match list.last_mut() {
                    Some((r, acc)) if *r == i => *acc += a,
                    _ => list.push((i, a)),
                }
            }
        }

        let mut col_start = vec![0];
        let mut col_row = Vec::new();
        let mut col_val = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut true_cost = Vec::new();
        let mut artificial = Vec::new();
        let mut x = Vec::new();
        let mut state = Vec::new();

        for (j, list) in entries.iter().enumerate() {
            for &(i, a) in list {
                if a != 0.0 {
                    col_row.push(i);
                    col_val.push(a);
                }
            }
            col_start.push(col_row.len());
            let (lo, hi) = bounds[j];
            lower.push(lo);
            upper.push(hi);
            true_cost.push(lp.vars()[j].cost);
            artificial.push(false);
            x.push(lo);
            state.push(State::AtLower);
        }

        let rhs: Vec<f64> = lp.constraints().iter().map(|r| r.rhs).collect();
        let mut residual = rhs.clone();
        for j in 0..n_struct {
            if x[j] != 0.0 {
                for k in col_start[j]..col_start[j + 1] {
                    residual[col_row[k]] -= col_val[k] * x[j];
                }
            }
        }

        let mut basis = vec![usize::MAX; m];
        let mut diag = vec![0.0; m];
        let mut push_unit = |row: usize, coef: f64, is_art: bool, value: f64, basic: bool| {
            col_row.push(row);
            col_val.push(coef);
            col_start.push(col_row.len());
            lower.push(0.0);
            upper.push(f64::INFINITY);
            true_cost.push(0.0);
            artificial.push(is_art);
            x.push(value);
            state.push(if basic { State::Basic } else { State::AtLower });
            x.len() - 1
        };
        for (i, row) in lp.constraints().iter().enumerate() {
            let slack_sign = match row.sense {
                Sense::Le => Some(1.0),
                Sense::Ge => Some(-1.0),
                Sense::Eq => None,
            };
            let r = residual[i];
            if let Some(sign) = slack_sign {
                let value = r * sign;
                let basic = value >= 0.0;
                let j = push_unit(i, sign, false, if basic { value } else { 0.0 }, basic);
                if basic {
                    basis[i] = j;
                    diag[i] = sign;
                    continue;
                }
            }
            let sign = if r >= 0.0 { 1.0 } else { -1.0 };
            let j = push_unit(i, sign, true, r.abs(), true);
            basis[i] = j;
            diag[i] = sign;
        }

        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0 / diag[i];
        }

        let n_total = x.len();
        let mut solver = Solver {
            m,
            n_struct,
            col_start,
            col_row,
            col_val,
            lower,
            upper,
            cost: vec![0.0; n_total],
            true_cost,
            artificial,
            rhs,
            x,
            state,
            basis,
            binv,
            pi: vec![0.0; m],
            alpha: vec![0.0; m],
            alpha_nz: Vec::with_capacity(m),
            pivots: 0,
            since_refresh: 0,
            signature: 0,
            degenerate_run: HashSet::new(),
            cycling: false,
            opts,
        };
        solver.signature = solver.basis.iter().fold(0, |h, &j| h ^ basic_key(j));
        for j in 0..n_total {
            if solver.state[j] == State::AtUpper {
                solver.signature ^= upper_key(j);
            }
        }
        solver
    }

    fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.col_start[j]..self.col_start[j + 1]).map(move |k| (self.col_row[k], self.col_val[k]))
    }

    /// Recomputes basic values and duals from the current inverse.
    fn refresh(&mut self) {
        let m = self.m;
        let mut r = self.rhs.clone();
        for j in 0..self.x.len() {
            if self.state[j] != State::Basic && self.x[j] != 0.0 {
                let xj = self.x[j];
                for k in self.col_start[j]..self.col_start[j + 1] {
                    r[self.col_row[k]] -= self.col_val[k] * xj;
                }
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            let v: f64 = row.iter().zip(&r).map(|(a, b)| a * b).sum();
            self.x[self.basis[i]] = v;
        }
        self.pi.iter_mut().for_each(|p| *p = 0.0);
        for i in 0..m {
            let c = self.cost[self.basis[i]];
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (p, b) in self.pi.iter_mut().zip(row) {
                    *p += c * b;
                }
            }
        }
        self.since_refresh = 0;
    }

    fn reduced_cost(&self, j: usize) -> f64 {
        let mut d = self.cost[j];
        for k in self.col_start[j]..self.col_start[j + 1] {
            d -= self.pi[self.col_row[k]] * self.col_val[k];
        }
        d
    }

    /// Entering variable and its direction (+1 increase, -1 decrease).
    fn price(&self, bland: bool) -> Option<(usize, f64, f64)> {
        let tol = self.opts.optimality_tol;
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.x.len() {
            if self.state[j] == State::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let d = self.reduced_cost(j);
            let dir = match self.state[j] {
                State::AtLower if d < -tol => 1.0,
                State::AtUpper if d > tol => -1.0,
                _ => continue,
            };
            if bland {
                return Some((j, dir, d));
            }
            if best.is_none_or(|(_, _, bd)| d.abs() > bd.abs()) {
                best = Some((j, dir, d));
            }
        }
        best
    }

    fn ftran(&mut self, q: usize) {
        let m = self.m;
        self.alpha.iter_mut().for_each(|a| *a = 0.0);
        for k in self.col_start[q]..self.col_start[q + 1] {
            let (row, val) = (self.col_row[k], self.col_val[k]);
            for i in 0..m {
                self.alpha[i] += self.binv[i * m + row] * val;
            }
        }
        self.alpha_nz.clear();
        for i in 0..m {
            if self.alpha[i].abs() > DROP_TOL {
                self.alpha_nz.push(i);
            } else {
                self.alpha[i] = 0.0;
            }
        }
    }

    fn run(&mut self) -> Result<Step, LpError> {
        self.degenerate_run.clear();
        self.cycling = false;
        loop {
            if self.since_refresh >= REFRESH_PERIOD {
                self.refresh();
            }
            let bland = self.opts.pricing == Pricing::Bland || self.cycling;
            let Some((q, dir, d_q)) = self.price(bland) else {
                return Ok(Step::Optimal);
            };
            if self.pivots >= self.opts.max_pivots {
                return Err(LpError::IterationLimitExceeded {
                    limit: self.opts.max_pivots,
                });
            }
            self.ftran(q);

            let ptol = self.opts.pivot_tol;
            let mut theta = f64::INFINITY;
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_mag = 0.0;
            for &i in &self.alpha_nz {
                let rate = self.alpha[i] * dir;
                let b = self.basis[i];
                let (limit, to_upper) = if rate > ptol {
                    ((self.x[b] - self.lower[b]) / rate, false)
                } else if rate < -ptol && self.upper[b].is_finite() {
                    ((self.upper[b] - self.x[b]) / -rate, true)
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let better = match leave {
                    None => true,
                    Some(_) if limit < theta - 1e-12 => true,
                    Some((r, _)) if limit <= theta + 1e-12 => {
                        if bland {
                            b < self.basis[r]
                        } else {
                            rate.abs() > leave_mag
                        }
                    }
                    _ => false,
                };
                if better {
                    theta = if leave.is_none() { limit } else { theta.min(limit) };
                    leave = Some((i, to_upper));
                    leave_mag = rate.abs();
                }
            }

            let span = self.upper[q] - self.lower[q];
            if span <= theta {
                // bound flip, no basis change
                if span.is_infinite() {
                    return Ok(Step::Unbounded);
                }
                self.shift(q, dir, span);
                self.state[q] = if dir > 0.0 { State::AtUpper } else { State::AtLower };
                self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                self.signature ^= upper_key(q);
                self.pivots += 1;
                self.since_refresh += 1;
                self.progressed();
                continue;
            }
            let Some((r, to_upper)) = leave else {
                return Ok(Step::Unbounded);
            };
            self.shift(q, dir, theta);
            self.pivot(r, q, to_upper, d_q);
            if theta > 1e-12 {
                self.progressed();
            } else if !self.degenerate_run.insert(self.signature) {
                self.cycling = true;
            }
        }
    }

    fn progressed(&mut self) {
        self.degenerate_run.clear();
        self.cycling = false;
    }

    fn shift(&mut self, q: usize, dir: f64, theta: f64) {
        if theta == 0.0 {
            return;
        }
        self.x[q] += dir * theta;
        for &i in &self.alpha_nz {
            let b = self.basis[i];
            self.x[b] -= dir * theta * self.alpha[i];
        }
    }

    fn pivot(&mut self, r: usize, q: usize, to_upper: bool, d_q: f64) {
        let m = self.m;
        let leaving = self.basis[r];
        self.signature ^= basic_key(leaving) ^ basic_key(q);
        if self.state[q] == State::AtUpper {
            self.signature ^= upper_key(q);
        }
        if to_upper {
            self.x[leaving] = self.upper[leaving];
            self.state[leaving] = State::AtUpper;
            self.signature ^= upper_key(leaving);
        } else {
            self.x[leaving] = self.lower[leaving];
            self.state[leaving] = State::AtLower;
        }

        let piv = self.alpha[r];
        let row_r: Vec<f64> = self.binv[r * m..(r + 1) * m].iter().map(|v| v / piv).collect();
        let row_nz: Vec<usize> = (0..m).filter(|&k| row_r[k] != 0.0).collect();

        for k in &row_nz {
            self.pi[*k] += d_q * row_r[*k];
        }
        for &i in &self.alpha_nz {
            if i == r {
                continue;
            }
            let f = self.alpha[i];
            let row = &mut self.binv[i * m..(i + 1) * m];
            for &k in &row_nz {
                let v = row[k] - f * row_r[k];
                row[k] = if v.abs() < DROP_TOL { 0.0 } else { v };
            }
        }
        self.binv[r * m..(r + 1) * m].copy_from_slice(&row_r);

        self.basis[r] = q;
        self.state[q] = State::Basic;
        self.pivots += 1;
        self.since_refresh += 1;
    }

    /// Rebuilds the inverse from the basis columns by Gauss-Jordan
    /// elimination with partial pivoting.
    fn reinvert(&mut self) {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (i, &j) in self.basis.iter().enumerate() {
            for (row, val) in self.column(j).collect::<Vec<_>>() {
                b[row * m + i] = val;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let p = (col..m)
                .max_by(|&a, &c| b[a * m + col].abs().total_cmp(&b[c * m + col].abs()))
                .expect("non-empty range");
            if b[p * m + col].abs() < 1e-14 {
                // singular basis; keep the current inverse
                return;
            }
            if p != col {
                for k in 0..m {
                    b.swap(p * m + k, col * m + k);
                    inv.swap(p * m + k, col * m + k);
                }
            }
            let d = b[col * m + col];
            for k in 0..m {
                b[col * m + k] /= d;
                inv[col * m + k] /= d;
            }
            let nz = |row: &[f64]| -> Vec<(usize, f64)> {
                row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, v)| (k, *v)).collect()
            };
            let piv_b = nz(&b[col * m..(col + 1) * m]);
            let piv_i = nz(&inv[col * m..(col + 1) * m]);
            for i in 0..m {
                if i == col {
                    continue;
                }
                let f = b[i * m + col];
                if f == 0.0 {
                    continue;
                }
                for &(k, v) in &piv_b {
                    b[i * m + k] -= f * v;
                }
                for &(k, v) in &piv_i {
                    inv[i * m + k] -= f * v;
                }
            }
        }
        self.binv = inv;
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn basic_key(j: usize) -> u64 {
    splitmix(2 * j as u64)
}

fn upper_key(j: usize) -> u64 {
    splitmix(2 * j as u64 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{LinearProgram, Sense, VarId};

    fn opts(pricing: Pricing) -> SimplexOptions {
        SimplexOptions {
            pricing,
            ..SimplexOptions::default()
        }
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        for pricing in [Pricing::Bland, Pricing::Dantzig] {
            let mut lp = LinearProgram::new();
            let x = lp.add_var("x", 0.0, f64::INFINITY, -3.0);
            let y = lp.add_var("y", 0.0, f64::INFINITY, -5.0);
            lp.add_constraint("c1", vec![(x, 1.0)], Sense::Le, 4.0);
            lp.add_constraint("c2", vec![(y, 2.0)], Sense::Le, 12.0);
            lp.add_constraint("c3", vec![(x, 3.0), (y, 2.0)], Sense::Le, 18.0);
            let sol = solve(&lp, &opts(pricing)).unwrap();
            assert_eq!(sol.status, LpStatus::Optimal);
            assert!((sol.objective + 36.0).abs() < 1e-9);
            assert!((sol.values[0] - 2.0).abs() < 1e-9);
            assert!((sol.values[1] - 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn equality_and_ge_rows_need_phase_one() {
        // min x + 2y st x + y = 3, x - y >= -1, x <= 1.5 -> x = 1.5, y = 1.5
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, 1.5, 1.0);
        let y = lp.add_var("y", 0.0, f64::INFINITY, 2.0);
        lp.add_constraint("sum", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 3.0);
        lp.add_constraint("diff", vec![(x, 1.0), (y, -1.0)], Sense::Ge, -1.0);
        let sol = solve(&lp, &SimplexOptions::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 4.5).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, f64::INFINITY, 1.0);
        lp.add_constraint("a", vec![(x, 1.0)], Sense::Le, 1.0);
        lp.add_constraint("b", vec![(x, 1.0)], Sense::Ge, 2.0);
        assert_eq!(solve(&lp, &SimplexOptions::default()).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, f64::INFINITY, -1.0);
        let y = lp.add_var("y", 0.0, f64::INFINITY, 0.0);
        lp.add_constraint("a", vec![(x, 1.0), (y, -1.0)], Sense::Le, 1.0);
        assert_eq!(solve(&lp, &SimplexOptions::default()).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn bound_flips_and_fixed_variables() {
        // min -x - y with x in [0, 2], y fixed at 1, x + y <= 10
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, 2.0, -1.0);
        let y = lp.add_var("y", 1.0, 1.0, -1.0);
        lp.add_constraint("cap", vec![(x, 1.0), (y, 1.0)], Sense::Le, 10.0);
        let sol = solve(&lp, &SimplexOptions::default()).unwrap();
        assert_eq!(sol.values, vec![2.0, 1.0]);
        assert_eq!(sol.objective, -3.0);
    }

    #[test]
    fn iteration_limit() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, f64::INFINITY, -1.0);
        lp.add_constraint("a", vec![(x, 1.0)], Sense::Le, 1.0);
        let o = SimplexOptions {
            max_pivots: 0,
            ..SimplexOptions::default()
        };
        assert_eq!(solve(&lp, &o), Err(LpError::IterationLimitExceeded { limit: 0 }));
    }

    #[test]
    fn rejects_undeclared_variables() {
        let mut lp = LinearProgram::new();
        lp.add_var("x", 0.0, 1.0, 1.0);
        lp.add_constraint("bad", vec![(VarId(7), 1.0)], Sense::Le, 1.0);
        assert!(matches!(solve(&lp, &SimplexOptions::default()), Err(LpError::Malformed(_))));
    }

    #[test]
    fn beale_cycling_example_terminates_under_bland() {
        // Beale's example cycles under naive Dantzig pricing with lowest-index ties.
        let mut lp = LinearProgram::new();
        let x4 = lp.add_var("x4", 0.0, f64::INFINITY, -0.75);
        let x5 = lp.add_var("x5", 0.0, f64::INFINITY, 150.0);
        let x6 = lp.add_var("x6", 0.0, f64::INFINITY, -0.02);
        let x7 = lp.add_var("x7", 0.0, f64::INFINITY, 6.0);
        lp.add_constraint("r1", vec![(x4, 0.25), (x5, -60.0), (x6, -0.04), (x7, 9.0)], Sense::Le, 0.0);
        lp.add_constraint("r2", vec![(x4, 0.5), (x5, -90.0), (x6, -0.02), (x7, 3.0)], Sense::Le, 0.0);
        lp.add_constraint("r3", vec![(x6, 1.0)], Sense::Le, 1.0);
        for pricing in [Pricing::Bland, Pricing::Dantzig] {
            let sol = solve(&lp, &opts(pricing)).unwrap();
            assert_eq!(sol.status, LpStatus::Optimal);
            assert!((sol.objective + 0.05).abs() < 1e-9, "{}", sol.objective);
        }
    }

    #[test]
    fn reinversion_reproduces_the_inverse() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, f64::INFINITY, -3.0);
        let y = lp.add_var("y", 0.0, f64::INFINITY, -5.0);
        lp.add_constraint("c1", vec![(x, 1.0)], Sense::Le, 4.0);
        lp.add_constraint("c2", vec![(y, 2.0)], Sense::Le, 12.0);
        lp.add_constraint("c3", vec![(x, 3.0), (y, 2.0)], Sense::Le, 18.0);
        let o = SimplexOptions::default();
        let mut s = Solver::new(&lp, &lp.bounds(), &o);
        s.cost = s.true_cost.clone();
        s.refresh();
        s.run().unwrap();
        let before = s.binv.clone();
        s.reinvert();
        for (a, b) in before.iter().zip(&s.binv) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
