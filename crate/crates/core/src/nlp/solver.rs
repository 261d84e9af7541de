//! Augmented Lagrangian solver internals.

use crate::nlp::{
    fd_step, Multipliers, NlpOptions, NlpProblem, NlpSolution, SolveStatus, TraceRow,
};
use crate::scalar::Real;

/// Gradient of the objective: analytic callback or central differences.
pub(crate) fn objective_gradient<R: Real>(problem: &NlpProblem<R>, x: &[R], out: &mut [R]) {
    if let Some(g) = &problem.objective_grad {
        g(x, out);
        return;
    }
    let mut xp = x.to_vec();
    for k in 0..problem.dim {
        let h = fd_step(x[k]);
        xp[k] = x[k] + h;
        let fp = (problem.objective)(&xp);
        xp[k] = x[k] - h;
        let fm = (problem.objective)(&xp);
        xp[k] = x[k];
        out[k] = (fp - fm) / (h + h);
    }
}

/// Row-major equality Jacobian: analytic callback or central differences.
pub(crate) fn eq_jacobian<R: Real>(problem: &NlpProblem<R>, x: &[R]) -> Vec<R> {
    let rows = problem.eq_count;
    let n = problem.dim;
    let mut jac = vec![R::zero(); rows * n];
    if rows == 0 {
        return jac;
    }
    if let Some(j) = &problem.eq_jac {
        j(x, &mut jac);
        return jac;
    }
    fd_vector_jacobian(n, rows, |x, out| problem.eval_eq(x, out), x, &mut jac);
    jac
}

/// Row-major inequality Jacobian: analytic callback or central differences.
pub(crate) fn ineq_jacobian<R: Real>(problem: &NlpProblem<R>, x: &[R]) -> Vec<R> {
    let rows = problem.ineq_count;
    let n = problem.dim;
    let mut jac = vec![R::zero(); rows * n];
    if rows == 0 {
        return jac;
    }
    if let Some(j) = &problem.ineq_jac {
        j(x, &mut jac);
        return jac;
    }
    fd_vector_jacobian(n, rows, |x, out| problem.eval_ineq(x, out), x, &mut jac);
    jac
}

fn fd_vector_jacobian<R: Real>(
    n: usize,
    rows: usize,
    f: impl Fn(&[R], &mut [R]),
    x: &[R],
    jac: &mut [R],
) {
    let mut xp = x.to_vec();
    let mut vp = vec![R::zero(); rows];
    let mut vm = vec![R::zero(); rows];
    for k in 0..n {
        let h = fd_step(x[k]);
        xp[k] = x[k] + h;
        f(&xp, &mut vp);
        xp[k] = x[k] - h;
        f(&xp, &mut vm);
        xp[k] = x[k];
        for r in 0..rows {
            jac[r * n + k] = (vp[r] - vm[r]) / (h + h);
        }
    }
}

struct AlState<'p, R> {
    problem: &'p NlpProblem<R>,
    lambda: Vec<R>,
    mu: Vec<R>,
    rho: R,
}

impl<R: Real> AlState<'_, R> {
    /// Augmented Lagrangian value at `x`.
    fn value(&self, x: &[R]) -> R {
        let p = self.problem;
        let f = (p.objective)(x);
        let mut h = vec![R::zero(); p.eq_count];
        p.eval_eq(x, &mut h);
        let mut c = vec![R::zero(); p.ineq_count];
        p.eval_ineq(x, &mut c);
        self.assemble(f, &h, &c)
    }

    fn assemble(&self, f: R, h: &[R], c: &[R]) -> R {
        let half = R::c(0.5);
        let mut v = f;
        for (i, &hi) in h.iter().enumerate() {
            v = v + self.lambda[i] * hi + half * self.rho * hi * hi;
        }
        let inv2rho = half / self.rho;
        for (i, &ci) in c.iter().enumerate() {
            let t = (self.mu[i] + self.rho * ci).max(R::zero());
            v = v + inv2rho * (t * t - self.mu[i] * self.mu[i]);
        }
        v
    }

    /// Value and gradient of the augmented Lagrangian.
    fn value_grad(&self, x: &[R], grad: &mut [R]) -> R {
        let p = self.problem;
        let n = p.dim;
        let f = (p.objective)(x);
        let mut h = vec![R::zero(); p.eq_count];
        p.eval_eq(x, &mut h);
        let mut c = vec![R::zero(); p.ineq_count];
        p.eval_ineq(x, &mut c);

        objective_gradient(p, x, grad);
        if p.eq_count > 0 {
            let jh = eq_jacobian(p, x);
            for i in 0..p.eq_count {
                let w = self.lambda[i] + self.rho * h[i];
                for k in 0..n {
                    grad[k] = grad[k] + w * jh[i * n + k];
                }
            }
        }
        if p.ineq_count > 0 {
            let jc = ineq_jacobian(p, x);
            for i in 0..p.ineq_count {
                let w = (self.mu[i] + self.rho * c[i]).max(R::zero());
                if w > R::zero() {
                    for k in 0..n {
                        grad[k] = grad[k] + w * jc[i * n + k];
                    }
                }
            }
        }
        self.assemble(f, &h, &c)
    }
}

fn project<R: Real>(x: &mut [R], lo: &[R], hi: &[R]) {
    for k in 0..x.len() {
        x[k] = x[k].max(lo[k]).min(hi[k]);
    }
}

fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn inf_norm<R: Real>(a: &[R]) -> R {
    a.iter().fold(R::zero(), |m, &v| m.max(v.abs()))
}

/// Projected-gradient stationarity measure `||P(x - g) - x||_inf`.
fn projected_grad_norm<R: Real>(x: &[R], g: &[R], lo: &[R], hi: &[R]) -> R {
    let mut m = R::zero();
    for k in 0..x.len() {
        let stepped = (x[k] - g[k]).max(lo[k]).min(hi[k]);
        m = m.max((stepped - x[k]).abs());
    }
    m
}

struct InnerResult<R> {
    x: Vec<R>,
    al_start: R,
    al_end: R,
    non_finite: bool,
}

/// Projected L-BFGS with Armijo backtracking along the projected path.
fn inner_minimize<R: Real>(
    al: &AlState<R>,
    x0: Vec<R>,
    tol: R,
    max_iter: usize,
) -> InnerResult<R> {
    let p = al.problem;
    let n = p.dim;
    let memory = 10usize;
    let c1 = R::c(1e-4);

    let mut x = x0;
    project(&mut x, &p.lower, &p.upper);
    let mut grad = vec![R::zero(); n];
    let mut f = al.value_grad(&x, &mut grad);
    let al_start = f;
    if !f.is_finite() {
        return InnerResult { x, al_start, al_end: f, non_finite: true };
    }

    let mut s_hist: Vec<Vec<R>> = Vec::new();
    let mut y_hist: Vec<Vec<R>> = Vec::new();
    let mut rho_hist: Vec<R> = Vec::new();
    let mut gamma = R::one();

    for _ in 0..max_iter {
        if projected_grad_norm(&x, &grad, &p.lower, &p.upper) <= tol {
            break;
        }
        // Two-loop recursion for the L-BFGS direction.
        let mut d: Vec<R> = grad.iter().map(|&g| -g).collect();
        let m = s_hist.len();
        let mut alphas = vec![R::zero(); m];
        for i in (0..m).rev() {
            let a = rho_hist[i] * dot(&s_hist[i], &d);
            alphas[i] = a;
            for k in 0..n {
                d[k] = d[k] - a * y_hist[i][k];
            }
        }
        for dk in d.iter_mut() {
            *dk = *dk * gamma;
        }
        for i in 0..m {
            let b = rho_hist[i] * dot(&y_hist[i], &d);
            let corr = alphas[i] - b;
            for k in 0..n {
                d[k] = d[k] + corr * s_hist[i][k];
            }
        }
        // Guard against ascent directions from stale curvature.
        if dot(&d, &grad) >= R::zero() {
            for (dk, &gk) in d.iter_mut().zip(&grad) {
                *dk = -gk;
            }
        }

        // Backtracking along the projected arc.
        let mut alpha = R::one();
        let mut accepted = false;
        let mut x_new = x.clone();
        let mut f_new = f;
        for _ in 0..60 {
            for k in 0..n {
                x_new[k] = x[k] + alpha * d[k];
            }
            project(&mut x_new, &p.lower, &p.upper);
            f_new = al.value(&x_new);
            if f_new.is_finite() {
                let step: Vec<R> =
                    x_new.iter().zip(&x).map(|(&a, &b)| a - b).collect();
                let decrease = dot(&grad, &step);
                if inf_norm(&step) == R::zero() {
                    break;
                }
                if f_new <= f + c1 * decrease.min(R::zero()) {
                    accepted = true;
                    break;
                }
            }
            alpha = alpha * R::c(0.5);
        }
        if !accepted {
            break;
        }

        let mut grad_new = vec![R::zero(); n];
        let f_check = al.value_grad(&x_new, &mut grad_new);
        if !f_check.is_finite() || grad_new.iter().any(|g| !g.is_finite()) {
            return InnerResult { x: x_new, al_start, al_end: f_check, non_finite: true };
        }
        let s: Vec<R> = x_new.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let y: Vec<R> = grad_new.iter().zip(&grad).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > R::c(1e-10) * inf_norm(&s) * inf_norm(&y) {
            gamma = sy / dot(&y, &y).max(R::c(1e-30));
            s_hist.push(s);
            y_hist.push(y);
            rho_hist.push(R::one() / sy);
            if s_hist.len() > memory {
                s_hist.remove(0);
                y_hist.remove(0);
                rho_hist.remove(0);
            }
        }
        x = x_new;
        f = f_new;
        grad = grad_new;
    }
    InnerResult { x, al_start, al_end: f, non_finite: false }
}

/// Worst violation over equalities, inequalities (and exact bounds, which
/// projection keeps at zero).
fn max_violation<R: Real>(h: &[R], c: &[R]) -> R {
    let mut v = R::zero();
    for &hv in h {
        v = v.max(hv.abs());
    }
    for &cv in c {
        v = v.max(cv.max(R::zero()));
    }
    v
}

/// Solve a smooth constrained NLP.
pub fn solve<R: Real>(problem: &NlpProblem<R>, options: &NlpOptions<R>) -> NlpSolution<R> {
    let n = problem.dim;
    let mut x = problem.initial.clone();
    project(&mut x, &problem.lower, &problem.upper);

    let f0 = (problem.objective)(&x);
    if !f0.is_finite() {
        return NlpSolution {
            point: x,
            objective_value: f0,
            max_constraint_violation: R::infinity(),
            status: SolveStatus::Diverged,
            iterations: 0,
            multipliers: Multipliers::default(),
            trace: Vec::new(),
        };
    }

    let mut lambda = vec![R::zero(); problem.eq_count];
    let mut mu = vec![R::zero(); problem.ineq_count];
    let mut rho = options.penalty_init;
    let mut viol_prev = R::infinity();
    let mut trace = Vec::new();

    let mut h = vec![R::zero(); problem.eq_count];
    let mut c = vec![R::zero(); problem.ineq_count];

    for outer in 1..=options.max_outer {
        let al = AlState { problem, lambda: lambda.clone(), mu: mu.clone(), rho };
        let inner_tol = (options.opt_tol * R::c(0.1)).max(R::c(1e-2) / rho).min(R::c(1e-3));
        let result = inner_minimize(&al, x, inner_tol, options.max_inner);
        x = result.x;

        problem.eval_eq(&x, &mut h);
        problem.eval_ineq(&x, &mut c);
        let viol = max_violation(&h, &c);
        let f = (problem.objective)(&x);

        if options.keep_trace {
            trace.push(TraceRow {
                iteration: outer,
                objective: f,
                violation: viol,
                al_start: result.al_start,
                al_end: result.al_end,
            });
        }
        if result.non_finite || !f.is_finite() {
            return NlpSolution {
                point: x,
                objective_value: f,
                max_constraint_violation: viol,
                status: SolveStatus::Diverged,
                iterations: outer,
                multipliers: Multipliers { eq: lambda, ineq: mu },
                trace,
            };
        }

        // First-order multiplier updates.
        for i in 0..problem.eq_count {
            lambda[i] = lambda[i] + rho * h[i];
        }
        for i in 0..problem.ineq_count {
            mu[i] = (mu[i] + rho * c[i]).max(R::zero());
        }

        // Stationarity of the Lagrangian under the updated multipliers.
        let mut grad = vec![R::zero(); n];
        objective_gradient(problem, &x, &mut grad);
        if problem.eq_count > 0 {
            let jh = eq_jacobian(problem, &x);
            for i in 0..problem.eq_count {
                for k in 0..n {
                    grad[k] = grad[k] + lambda[i] * jh[i * n + k];
                }
            }
        }
        if problem.ineq_count > 0 {
            let jc = ineq_jacobian(problem, &x);
            for i in 0..problem.ineq_count {
                if mu[i] > R::zero() {
                    for k in 0..n {
                        grad[k] = grad[k] + mu[i] * jc[i * n + k];
                    }
                }
            }
        }
        let stat = projected_grad_norm(&x, &grad, &problem.lower, &problem.upper);

        if viol <= options.feas_tol && stat <= options.opt_tol {
            return NlpSolution {
                point: x,
                objective_value: f,
                max_constraint_violation: viol,
                status: SolveStatus::Converged,
                iterations: outer,
                multipliers: Multipliers { eq: lambda, ineq: mu },
                trace,
            };
        }

        // Grow the penalty when the violation stalls.
        if viol > options.feas_tol && viol > R::c(0.25) * viol_prev {
            rho = (rho * options.penalty_growth).min(options.penalty_cap);
        }
        viol_prev = viol;
    }

    problem.eval_eq(&x, &mut h);
    problem.eval_ineq(&x, &mut c);
    let f = (problem.objective)(&x);
    NlpSolution {
        point: x,
        objective_value: f,
        max_constraint_violation: max_violation(&h, &c),
        status: SolveStatus::MaxIterations,
        iterations: options.max_outer,
        multipliers: Multipliers { eq: lambda, ineq: mu },
        trace,
    }
}
