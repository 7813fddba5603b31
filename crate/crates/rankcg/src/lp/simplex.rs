//! Bounded-variable revised simplex with a dense LU-refactorized basis.
//!
//! Two phases with artificial variables, Dantzig pricing with a Bland's-rule
//! fallback once degenerate pivots accumulate, and fully deterministic
//! tie-breaking (lowest variable index) so repeated solves are bit-identical.
//! The basis is refactorized from scratch every iteration; no eta updates.

use crate::linalg::{Lu, Matrix};
use crate::scalar::Real;

use super::{verify_certificates, LinearProgram, LpError, LpSolution, LpStatus, RowSense, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    FreeAtZero,
}

struct Simplex<'a, T> {
    lp: &'a LinearProgram<T>,
    m: usize,
    n_struct: usize,
    /// structural | slack | artificial
    n_total: usize,
    lower: Vec<T>,
    upper: Vec<T>,
    cost: Vec<T>,
    art_sign: Vec<T>,
    state: Vec<State>,
    basis: Vec<usize>,
    x_basic: Vec<T>,
    iterations: usize,
    degenerate_pivots: usize,
    bland: bool,
    tol_feas: T,
    tol_pivot: T,
    max_iters: usize,
}

enum StepOutcome {
    Moved,
    PhaseOptimal,
    Unbounded,
    Breakdown(String),
}

impl<'a, T: Real> Simplex<'a, T> {
    fn new(lp: &'a LinearProgram<T>, opts: &SolverOptions) -> Self {
        let m = lp.n_rows();
        let k = lp.n_vars();
        let n_total = k + 2 * m;
        let mut lower = Vec::with_capacity(n_total);
        let mut upper = Vec::with_capacity(n_total);
        for b in &lp.bounds {
            lower.push(b.lower);
            upper.push(b.upper);
        }
        for sense in &lp.senses {
            match sense {
                RowSense::Le => {
                    lower.push(T::zero());
                    upper.push(T::infinity());
                }
                RowSense::Ge => {
                    lower.push(T::neg_infinity());
                    upper.push(T::zero());
                }
                RowSense::Eq => {
                    lower.push(T::zero());
                    upper.push(T::zero());
                }
            }
        }
        for _ in 0..m {
            lower.push(T::zero());
            upper.push(T::infinity());
        }
        Self {
            lp,
            m,
            n_struct: k,
            n_total,
            lower,
            upper,
            cost: vec![T::zero(); n_total],
            art_sign: vec![T::one(); m],
            state: vec![State::AtLower; n_total],
            basis: Vec::new(),
            x_basic: vec![T::zero(); m],
            iterations: 0,
            degenerate_pivots: 0,
            bland: false,
            tol_feas: T::real(opts.tol_feas),
            tol_pivot: T::real(opts.tol_pivot),
            max_iters: opts.max_iters.unwrap_or(50 * (m + k)),
        }
    }

    fn slack(&self, row: usize) -> usize {
        self.n_struct + row
    }

    fn artificial(&self, row: usize) -> usize {
        self.n_struct + self.m + row
    }

    /// Writes column `j` of the working equality system into `out`.
    fn column_into(&self, j: usize, out: &mut [T]) {
        out.fill(T::zero());
        if j < self.n_struct {
            for i in 0..self.m {
                out[i] = self.lp.a.get(i, j);
            }
        } else if j < self.n_struct + self.m {
            out[j - self.n_struct] = T::one();
        } else {
            let row = j - self.n_struct - self.m;
            out[row] = self.art_sign[row];
        }
    }

    /// Current value of a nonbasic variable.
    fn nonbasic_value(&self, j: usize) -> T {
        match self.state[j] {
            State::AtLower => self.lower[j],
            State::AtUpper => self.upper[j],
            State::FreeAtZero => T::zero(),
            State::Basic => unreachable!("basic variable has no nonbasic value"),
        }
    }

    /// Picks the initial nonbasic rest point for a variable.
    fn initial_state(lower: T, upper: T) -> State {
        if lower.is_finite() {
            if upper.is_finite() && upper.abs() < lower.abs() {
                State::AtUpper
            } else {
                State::AtLower
            }
        } else if upper.is_finite() {
            State::AtUpper
        } else {
            State::FreeAtZero
        }
    }

    /// Sets up the initial basis: the slack where it is feasible on its own,
    /// otherwise a signed artificial. Returns the phase-1 infeasibility.
    fn initialize(&mut self) -> T {
        for j in 0..self.n_struct {
            self.state[j] = Self::initial_state(self.lower[j], self.upper[j]);
        }
        for row in 0..self.m {
            let s = self.slack(row);
            let a = self.artificial(row);
            self.state[s] = match self.lp.senses[row] {
                RowSense::Le | RowSense::Eq => State::AtLower,
                RowSense::Ge => State::AtUpper,
            };
            self.state[a] = State::AtLower;
        }
        // residual with every variable nonbasic
        let mut residual = self.lp.rhs.clone();
        for j in 0..self.n_struct {
            let v = self.nonbasic_value(j);
            if v != T::zero() {
                for i in 0..self.m {
                    residual[i] -= self.lp.a.get(i, j) * v;
                }
            }
        }

        self.basis = Vec::with_capacity(self.m);
        let mut infeasibility = T::zero();
        for (row, &r) in residual.iter().enumerate() {
            let slack_ok = match self.lp.senses[row] {
                RowSense::Le => r >= T::zero(),
                RowSense::Ge => r <= T::zero(),
                RowSense::Eq => r == T::zero(),
            };
            if slack_ok {
                let s = self.slack(row);
                self.state[s] = State::Basic;
                self.basis.push(s);
            } else {
                let a = self.artificial(row);
                self.art_sign[row] = if r >= T::zero() { T::one() } else { -T::one() };
                self.state[a] = State::Basic;
                self.basis.push(a);
                infeasibility += r.abs();
            }
        }
        infeasibility
    }

    fn set_phase1_costs(&mut self) {
        self.cost.fill(T::zero());
        let art0 = self.n_struct + self.m;
        for row in 0..self.m {
            self.cost[art0 + row] = T::one();
        }
    }

    fn set_phase2_costs(&mut self) {
        self.cost.fill(T::zero());
        self.cost[..self.n_struct].copy_from_slice(&self.lp.objective);
        // artificials may never re-enter
        let art0 = self.n_struct + self.m;
        for row in 0..self.m {
            self.lower[art0 + row] = T::zero();
            self.upper[art0 + row] = T::zero();
        }
    }

    fn factor_basis(&self) -> Result<Lu<T>, String> {
        let mut b = Matrix::zeros(self.m, self.m);
        let mut col = vec![T::zero(); self.m];
        for (p, &j) in self.basis.iter().enumerate() {
            self.column_into(j, &mut col);
            for i in 0..self.m {
                b.set(i, p, col[i]);
            }
        }
        Lu::factor(&b).map_err(|_| "singular basis matrix".to_string())
    }

    /// Recomputes basic values from scratch for the current basis.
    fn compute_basic_values(&mut self, lu: &Lu<T>) {
        let mut rhs = self.lp.rhs.clone();
        for j in 0..self.n_total {
            if self.state[j] == State::Basic {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v == T::zero() {
                continue;
            }
            if j < self.n_struct {
                for i in 0..self.m {
                    rhs[i] -= self.lp.a.get(i, j) * v;
                }
            } else if j < self.n_struct + self.m {
                rhs[j - self.n_struct] -= v;
            } else {
                let row = j - self.n_struct - self.m;
                rhs[row] -= self.art_sign[row] * v;
            }
        }
        lu.solve(&mut rhs);
        self.x_basic = rhs;
    }

    fn duals(&self, lu: &Lu<T>) -> Vec<T> {
        let mut y: Vec<T> = self.basis.iter().map(|&j| self.cost[j]).collect();
        lu.solve_transpose(&mut y);
        y
    }

    /// Reduced costs for every variable: `z = cost - y' A`.
    fn reduced_costs(&self, y: &[T]) -> Vec<T> {
        let mut z = self.cost.clone();
        for i in 0..self.m {
            let yi = y[i];
            if yi == T::zero() {
                continue;
            }
            let row = self.lp.a.row(i);
            for (j, &a) in row.iter().enumerate() {
                z[j] -= yi * a;
            }
        }
        for row in 0..self.m {
            z[self.slack(row)] -= y[row];
            z[self.artificial(row)] -= self.art_sign[row] * y[row];
        }
        z
    }

    /// Entering variable and its movement direction (+1 away from lower,
    /// -1 away from upper). Dantzig by default, Bland once triggered.
    fn choose_entering(&self, z: &[T]) -> Option<(usize, T)> {
        let mut best: Option<(usize, T, T)> = None; // (var, dir, violation)
        for j in 0..self.n_total {
            if self.state[j] == State::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let zj = z[j];
            let candidate = match self.state[j] {
                State::AtLower => (zj < -self.tol_feas).then(|| (T::one(), -zj)),
                State::AtUpper => (zj > self.tol_feas).then(|| (-T::one(), zj)),
                State::FreeAtZero => {
                    if zj < -self.tol_feas {
                        Some((T::one(), -zj))
                    } else if zj > self.tol_feas {
                        Some((-T::one(), zj))
                    } else {
                        None
                    }
                }
                State::Basic => None,
            };
            if let Some((dir, viol)) = candidate {
                if self.bland {
                    return Some((j, dir));
                }
                let better = match &best {
                    None => true,
                    Some((_, _, best_viol)) => viol > *best_viol,
                };
                if better {
                    best = Some((j, dir, viol));
                }
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// One simplex pivot. `lu` is the factorization of the current basis.
    fn step(&mut self, lu: &Lu<T>) -> StepOutcome {
        let y = self.duals(lu);
        let z = self.reduced_costs(&y);
        let Some((entering, dir)) = self.choose_entering(&z) else {
            return StepOutcome::PhaseOptimal;
        };

        // direction of basic variables per unit increase of the entering one
        let mut d = vec![T::zero(); self.m];
        self.column_into(entering, &mut d);
        lu.solve(&mut d);

        // ratio test: tightest blocking bound, ties to the lowest variable
        // index; the entering variable's own opposite bound allows a flip
        let mut t_best = T::infinity();
        let mut leave: Option<(usize, State)> = None; // (row, bound reached)
        for (i, &bi) in self.basis.iter().enumerate() {
            let rate = -(dir * d[i]);
            let candidate = if rate > self.tol_pivot && self.upper[bi].is_finite() {
                let room = (self.upper[bi] - self.x_basic[i]).max(T::zero());
                Some((room / rate, State::AtUpper))
            } else if rate < -self.tol_pivot && self.lower[bi].is_finite() {
                let room = (self.x_basic[i] - self.lower[bi]).max(T::zero());
                Some((room / -rate, State::AtLower))
            } else {
                None
            };
            if let Some((t, bound)) = candidate {
                if t < t_best
                    || (t == t_best && leave.as_ref().is_some_and(|(r, _)| bi < self.basis[*r]))
                {
                    t_best = t;
                    leave = Some((i, bound));
                }
            }
        }
        let span = self.upper[entering] - self.lower[entering];
        let flip = span.is_finite() && span < t_best;
        if flip {
            t_best = span;
        }

        if !t_best.is_finite() {
            return StepOutcome::Unbounded;
        }
        if t_best <= self.tol_pivot {
            self.degenerate_pivots += 1;
            if self.degenerate_pivots > 3 * (self.m + self.n_struct) {
                self.bland = true;
            }
        }

        if flip {
            self.state[entering] = match self.state[entering] {
                State::AtLower => State::AtUpper,
                State::AtUpper => State::AtLower,
                other => other,
            };
            return StepOutcome::Moved;
        }

        let Some((leave_row, leave_state)) = leave else {
            return StepOutcome::Breakdown("ratio test found no blocking bound".to_string());
        };
        let leaving = self.basis[leave_row];
        self.state[leaving] = leave_state;
        self.state[entering] = State::Basic;
        self.basis[leave_row] = entering;
        StepOutcome::Moved
    }

    /// Runs pivots until the current phase is optimal. Returns `Ok(true)` on
    /// phase optimality, `Ok(false)` on unboundedness.
    fn run_phase(&mut self) -> Result<bool, (LpStatus, String)> {
        loop {
            if self.iterations >= self.max_iters {
                return Err((
                    LpStatus::IterationLimit,
                    format!("iteration cap {} reached", self.max_iters),
                ));
            }
            let lu = self
                .factor_basis()
                .map_err(|msg| (LpStatus::IterationLimit, msg))?;
            self.compute_basic_values(&lu);
            match self.step(&lu) {
                StepOutcome::PhaseOptimal => return Ok(true),
                StepOutcome::Unbounded => return Ok(false),
                StepOutcome::Breakdown(msg) => return Err((LpStatus::IterationLimit, msg)),
                StepOutcome::Moved => self.iterations += 1,
            }
        }
    }

    fn phase1_objective(&self) -> T {
        let mut total = T::zero();
        for (i, &j) in self.basis.iter().enumerate() {
            if j >= self.n_struct + self.m {
                total += self.x_basic[i].abs();
            }
        }
        total
    }

    fn extract(&mut self) -> (Vec<T>, Vec<T>, T) {
        let lu = self.factor_basis().expect("optimal basis is factorizable");
        self.compute_basic_values(&lu);
        let y = self.duals(&lu);
        let mut x = vec![T::zero(); self.n_struct];
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = match self.state[j] {
                State::Basic => T::zero(), // filled below
                _ => self.nonbasic_value(j),
            };
        }
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.n_struct {
                x[j] = self.x_basic[i];
            }
        }
        let objective = x
            .iter()
            .zip(&self.lp.objective)
            .map(|(&xi, &ci)| xi * ci)
            .sum();
        (x, y, objective)
    }
}

/// Solves a minimization LP. The status is authoritative: numerical
/// breakdown is reported as `IterationLimit` with diagnostics, and a result
/// is only labeled `Optimal` after its own certificates pass a self-check.
pub fn solve<T: Real>(lp: &LinearProgram<T>, opts: &SolverOptions) -> Result<LpSolution<T>, LpError> {
    lp.validate()?;
    let mut s = Simplex::new(lp, opts);

    let failed = |status: LpStatus, iterations: usize, msg: String| LpSolution {
        status,
        x: vec![T::zero(); lp.n_vars()],
        y: vec![T::zero(); lp.n_rows()],
        objective: T::zero(),
        iterations,
        diagnostics: Some(msg),
    };

    let infeasibility = s.initialize();
    let rhs_scale = lp
        .rhs
        .iter()
        .fold(T::one(), |acc, v| acc.max(v.abs()));

    if infeasibility > T::zero() {
        s.set_phase1_costs();
        match s.run_phase() {
            Ok(true) => {}
            Ok(false) => {
                return Ok(failed(
                    LpStatus::IterationLimit,
                    s.iterations,
                    "phase-1 objective reported unbounded".to_string(),
                ))
            }
            Err((status, msg)) => return Ok(failed(status, s.iterations, msg)),
        }
        let lu = match s.factor_basis() {
            Ok(lu) => lu,
            Err(msg) => return Ok(failed(LpStatus::IterationLimit, s.iterations, msg)),
        };
        s.compute_basic_values(&lu);
        if s.phase1_objective() > s.tol_feas * rhs_scale {
            let mut sol = failed(LpStatus::Infeasible, s.iterations, String::new());
            sol.diagnostics = None;
            return Ok(sol);
        }
    }

    s.set_phase2_costs();
    match s.run_phase() {
        Ok(true) => {}
        Ok(false) => {
            let mut sol = failed(LpStatus::Unbounded, s.iterations, String::new());
            sol.diagnostics = None;
            return Ok(sol);
        }
        Err((status, msg)) => return Ok(failed(status, s.iterations, msg)),
    }

    let (x, y, objective) = s.extract();
    let solution = LpSolution {
        status: LpStatus::Optimal,
        x,
        y,
        objective,
        iterations: s.iterations,
        diagnostics: None,
    };

    // self-check: never return a wrong Optimal
    let report = verify_certificates(lp, &solution)?;
    let obj_scale = T::one() + objective.abs();
    let cost_scale = lp
        .objective
        .iter()
        .fold(T::one(), |acc, v| acc.max(v.abs()));
    let ok = report.max_primal_violation <= T::real(opts.tol_feas) * rhs_scale * T::real(10.0)
        && report.max_dual_violation <= T::real(opts.tol_gap) * cost_scale
        && report.duality_gap <= T::real(opts.tol_gap)
        && report.complementary_slackness <= T::real(opts.tol_gap) * obj_scale;
    if !ok {
        let mut sol = solution;
        sol.status = LpStatus::IterationLimit;
        sol.diagnostics = Some(format!(
            "self-check failed: primal {:e}, dual {:e}, gap {:e}, slackness {:e}",
            report.max_primal_violation,
            report.max_dual_violation,
            report.duality_gap,
            report.complementary_slackness
        ));
        return Ok(sol);
    }
    Ok(solution)
}
