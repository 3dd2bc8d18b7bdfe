//! Bound-constrained Levenberg-Marquardt on a residual vector.

use nalgebra::{DMatrix, DVector};

pub(crate) const MAX_ITERATIONS: usize = 2000;
const REL_DECREASE_TOL: f64 = 1e-12;
const STEP_TOL: f64 = 1e-12;
const LAMBDA_MAX: f64 = 1e16;

pub(crate) struct LmOutcome {
    pub x: DVector<f64>,
    /// Sum of squared residuals at `x`.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `(JᵀJ)⁻¹` diagonal at `x`, pseudo-inverse when rank deficient.
    pub inverse_curvature: Vec<f64>,
    /// Cost after each accepted step, starting with the initial cost.
    pub history: Vec<f64>,
}

fn jacobian<F>(f: &F, x: &DVector<f64>, rows: usize) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut jac = DMatrix::zeros(rows, x.len());
    for j in 0..x.len() {
        let h = 1e-6 * (1.0 + x[j].abs());
        let mut up = x.clone();
        let mut dn = x.clone();
        up[j] += h;
        dn[j] -= h;
        let col = (f(&up) - f(&dn)) / (2.0 * h);
        jac.set_column(j, &col);
    }
    jac
}

fn clamp(x: &DVector<f64>, lower: &[f64], upper: &[f64]) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| x[i].clamp(lower[i], upper[i]))
}

fn pinv_diag(a: &DMatrix<f64>) -> Vec<f64> {
    let svd = a.clone().svd(true, true);
    let max = svd.singular_values.max();
    let pinv = svd
        .pseudo_inverse(max * 1e-14)
        .unwrap_or_else(|_| DMatrix::zeros(a.nrows(), a.ncols()));
    (0..a.nrows()).map(|i| pinv[(i, i)].max(0.0)).collect()
}

/// Minimizes `‖f(x)‖²` subject to `lower ≤ x ≤ upper`.
///
/// Parameters sitting on a bound whose gradient points outward are frozen
/// for the step; the remaining ones take a Marquardt-damped Gauss-Newton
/// step which is then projected onto the box. Only steps that do not
/// raise the cost are accepted.
pub(crate) fn minimize<F>(f: F, x0: DVector<f64>, lower: &[f64], upper: &[f64]) -> LmOutcome
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = x0.len();
    let mut x = clamp(&x0, lower, upper);
    let mut r = f(&x);
    let mut cost = r.norm_squared();
    let mut history = vec![cost];
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS && cost.is_finite() {
        if cost == 0.0 {
            converged = true;
            break;
        }
        let jac = jacobian(&f, &x, r.len());
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &r;
        let free: Vec<usize> = (0..n)
            .filter(|&i| !((x[i] <= lower[i] && grad[i] > 0.0) || (x[i] >= upper[i] && grad[i] < 0.0)))
            .collect();
        if free.is_empty() {
            converged = true;
            break;
        }
        let a = DMatrix::from_fn(free.len(), free.len(), |i, j| jtj[(free[i], free[j])]);
        let g = DVector::from_fn(free.len(), |i, _| grad[free[i]]);
        let diag_floor = 1e-12 * a.diagonal().max().max(f64::MIN_POSITIVE);

        let mut stepped = false;
        while lambda <= LAMBDA_MAX {
            let mut damped = a.clone();
            for i in 0..free.len() {
                damped[(i, i)] += lambda * a[(i, i)].max(diag_floor);
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let delta = chol.solve(&(-&g));
            let mut trial = x.clone();
            for (k, &i) in free.iter().enumerate() {
                trial[i] += delta[k];
            }
            let trial = clamp(&trial, lower, upper);
            let r_trial = f(&trial);
            let cost_trial = r_trial.norm_squared();
            if cost_trial.is_finite() && cost_trial <= cost {
                let step = (&trial - &x).norm();
                let decrease = cost - cost_trial;
                x = trial;
                r = r_trial;
                cost = cost_trial;
                history.push(cost);
                lambda = (lambda / 3.0).max(1e-12);
                iterations += 1;
                stepped = true;
                if decrease <= REL_DECREASE_TOL * cost || step < STEP_TOL {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if !stepped {
            // no damped step lowers the cost: a minimum at working precision
            converged = true;
            break;
        }
        if converged {
            break;
        }
    }

    let jac = jacobian(&f, &x, r.len());
    let inverse_curvature = pinv_diag(&(jac.transpose() * &jac));
    LmOutcome {
        x,
        cost,
        iterations,
        converged,
        inverse_curvature,
        history,
    }
}
