//! Self-contained smooth constrained NLP solver used by every optimization
//! layer (trajectories, pose programs, posture adjustments).
//!
//! Method: augmented Lagrangian outer loop with projected L-BFGS inner
//! solves. Bounds are handled exactly by projection; equality and inequality
//! constraints through multiplier/penalty terms. Everything is deterministic:
//! a fixed problem and options produce the identical iterate sequence.

mod solver;

pub use solver::solve;

use crate::scalar::Real;

type ScalarFn<R> = Box<dyn Fn(&[R]) -> R + Send + Sync>;
type VectorFn<R> = Box<dyn Fn(&[R], &mut [R]) + Send + Sync>;

/// A smooth nonlinear program:
/// minimize `objective(x)` subject to `eq(x) = 0`, `ineq(x) <= 0`,
/// `lower <= x <= upper`.
pub struct NlpProblem<R> {
    pub dim: usize,
    pub objective: ScalarFn<R>,
    /// Analytic gradient; central finite differences when absent.
    pub objective_grad: Option<VectorFn<R>>,
    pub eq_count: usize,
    pub eq: Option<VectorFn<R>>,
    /// Row-major `eq_count x dim` Jacobian callback.
    pub eq_jac: Option<VectorFn<R>>,
    pub ineq_count: usize,
    pub ineq: Option<VectorFn<R>>,
    /// Row-major `ineq_count x dim` Jacobian callback.
    pub ineq_jac: Option<VectorFn<R>>,
    pub lower: Vec<R>,
    pub upper: Vec<R>,
    pub initial: Vec<R>,
}

impl<R: Real> NlpProblem<R> {
    pub fn new(dim: usize, objective: impl Fn(&[R]) -> R + Send + Sync + 'static) -> Self {
        Self {
            dim,
            objective: Box::new(objective),
            objective_grad: None,
            eq_count: 0,
            eq: None,
            eq_jac: None,
            ineq_count: 0,
            ineq: None,
            ineq_jac: None,
            lower: vec![R::neg_infinity(); dim],
            upper: vec![R::infinity(); dim],
            initial: vec![R::zero(); dim],
        }
    }

    pub fn with_gradient(
        mut self,
        grad: impl Fn(&[R], &mut [R]) + Send + Sync + 'static,
    ) -> Self {
        self.objective_grad = Some(Box::new(grad));
        self
    }

    pub fn with_eq(
        mut self,
        count: usize,
        f: impl Fn(&[R], &mut [R]) + Send + Sync + 'static,
    ) -> Self {
        self.eq_count = count;
        self.eq = Some(Box::new(f));
        self
    }

    pub fn with_eq_jac(mut self, jac: impl Fn(&[R], &mut [R]) + Send + Sync + 'static) -> Self {
        self.eq_jac = Some(Box::new(jac));
        self
    }

    pub fn with_ineq(
        mut self,
        count: usize,
        f: impl Fn(&[R], &mut [R]) + Send + Sync + 'static,
    ) -> Self {
        self.ineq_count = count;
        self.ineq = Some(Box::new(f));
        self
    }

    pub fn with_ineq_jac(
        mut self,
        jac: impl Fn(&[R], &mut [R]) + Send + Sync + 'static,
    ) -> Self {
        self.ineq_jac = Some(Box::new(jac));
        self
    }

    pub fn with_bounds(mut self, lower: Vec<R>, upper: Vec<R>) -> Self {
        assert_eq!(lower.len(), self.dim);
        assert_eq!(upper.len(), self.dim);
        for (lo, hi) in lower.iter().zip(&upper) {
            assert!(lo <= hi, "lower bound above upper bound");
        }
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn with_initial(mut self, x0: Vec<R>) -> Self {
        assert_eq!(x0.len(), self.dim);
        self.initial = x0;
        self
    }

    pub(crate) fn eval_eq(&self, x: &[R], out: &mut [R]) {
        if let Some(f) = &self.eq {
            f(x, out);
        }
    }

    pub(crate) fn eval_ineq(&self, x: &[R], out: &mut [R]) {
        if let Some(f) = &self.ineq {
            f(x, out);
        }
    }
}

/// Solver tolerances and iteration limits.
#[derive(Debug, Clone)]
pub struct NlpOptions<R> {
    /// Stationarity tolerance on the projected Lagrangian gradient.
    pub opt_tol: R,
    /// Maximum allowed constraint violation at convergence.
    pub feas_tol: R,
    /// Cap on outer (multiplier) iterations.
    pub max_outer: usize,
    /// Cap on inner L-BFGS iterations per outer iteration.
    pub max_inner: usize,
    pub penalty_init: R,
    pub penalty_growth: R,
    pub penalty_cap: R,
    /// Record per-iteration trace rows.
    pub keep_trace: bool,
}

impl<R: Real> Default for NlpOptions<R> {
    fn default() -> Self {
        Self {
            opt_tol: R::c(1e-6),
            feas_tol: R::c(1e-6),
            max_outer: 500,
            max_inner: 200,
            penalty_init: R::c(10.0),
            penalty_growth: R::c(10.0),
            penalty_cap: R::c(1e8),
            keep_trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
}

/// One outer-iteration trace row. `al_start`/`al_end` are the augmented
/// Lagrangian merit under that iteration's multipliers before and after the
/// inner solve; the inner line search guarantees `al_end <= al_start`.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow<R> {
    pub iteration: usize,
    pub objective: R,
    pub violation: R,
    pub al_start: R,
    pub al_end: R,
}

/// Lagrange multipliers attached to a solution.
#[derive(Debug, Clone, Default)]
pub struct Multipliers<R> {
    pub eq: Vec<R>,
    pub ineq: Vec<R>,
}

#[derive(Debug, Clone)]
pub struct NlpSolution<R> {
    pub point: Vec<R>,
    pub objective_value: R,
    pub max_constraint_violation: R,
    pub status: SolveStatus,
    /// Outer iterations performed.
    pub iterations: usize,
    pub multipliers: Multipliers<R>,
    pub trace: Vec<TraceRow<R>>,
}

/// KKT residual triple at a point; all zero at an exact KKT point.
#[derive(Debug, Clone, Copy)]
pub struct KktResiduals<R> {
    pub stationarity: R,
    pub feasibility: R,
    pub complementarity: R,
}

/// Central finite-difference step per the solver contract.
pub(crate) fn fd_step<R: Real>(x: R) -> R {
    R::c(1e-6) * (R::one() + x.abs())
}

/// Evaluate the KKT residuals of `problem` at `point` under `multipliers`.
///
/// Stationarity is the projected gradient norm of the Lagrangian (projection
/// absorbs the bound multipliers), feasibility the worst constraint/bound
/// violation, complementarity the worst `|mu_i * c_i|`.
pub fn kkt_residuals<R: Real>(
    problem: &NlpProblem<R>,
    point: &[R],
    multipliers: &Multipliers<R>,
) -> KktResiduals<R> {
    assert_eq!(point.len(), problem.dim);
    let n = problem.dim;
    let mut grad = vec![R::zero(); n];
    solver::objective_gradient(problem, point, &mut grad);

    let mut h = vec![R::zero(); problem.eq_count];
    problem.eval_eq(point, &mut h);
    let mut c = vec![R::zero(); problem.ineq_count];
    problem.eval_ineq(point, &mut c);

    let jh = solver::eq_jacobian(problem, point);
    let jc = solver::ineq_jacobian(problem, point);
    for (i, &lam) in multipliers.eq.iter().enumerate() {
        for k in 0..n {
            grad[k] = grad[k] + lam * jh[i * n + k];
        }
    }
    for (i, &mu) in multipliers.ineq.iter().enumerate() {
        for k in 0..n {
            grad[k] = grad[k] + mu * jc[i * n + k];
        }
    }
    let mut stationarity = R::zero();
    for k in 0..n {
        let stepped = (point[k] - grad[k]).max(problem.lower[k]).min(problem.upper[k]);
        stationarity = stationarity.max((stepped - point[k]).abs());
    }

    let mut feasibility = R::zero();
    for &hv in &h {
        feasibility = feasibility.max(hv.abs());
    }
    for &cv in &c {
        feasibility = feasibility.max(cv.max(R::zero()));
    }
    for k in 0..n {
        feasibility = feasibility.max(problem.lower[k] - point[k]).max(point[k] - problem.upper[k]);
    }

    let mut complementarity = R::zero();
    for (i, &mu) in multipliers.ineq.iter().enumerate() {
        complementarity = complementarity.max((mu * c[i]).abs());
    }
    KktResiduals { stationarity, feasibility, complementarity }
}
