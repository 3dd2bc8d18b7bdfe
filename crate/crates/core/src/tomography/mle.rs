//! Maximum-likelihood reconstruction over physical density matrices.
//!
//! The estimate is written as `ρ = T†T / Tr(T†T)` with `T` lower triangular
//! and a real diagonal, which is positive semidefinite for any of the 16
//! real parameters. The negative Poisson log-likelihood is minimized with
//! BFGS from the linear-inversion estimate.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use super::linear::{check_counts, check_design};
use super::{linear_inversion, projector, CorrectedRecord};
use crate::error::Result;
use crate::state::{c, r, DensityMatrix, Mat4, Vector4C};

type Params = SVector<f64, 16>;
type Hessian = SMatrix<f64, 16, 16>;

/// Lower-triangle positions below the diagonal, in parameter order.
const OFF_DIAGONAL: [(usize, usize); 6] = [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)];

/// Smallest eigenvalue kept when the starting point is made positive definite.
const EIGEN_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub max_iterations: usize,
    /// Stop once the gradient norm falls below this.
    pub gradient_tol: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            gradient_tol: 1e-11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub rho_hat: DensityMatrix,
    /// Poisson log-likelihood of the counts, without the `ln n!` terms.
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn to_matrix(t: &Params) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..4 {
        m[(i, i)] = r(t[i]);
    }
    for (k, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
        m[(i, j)] = c(t[4 + 2 * k], t[5 + 2 * k]);
    }
    m
}

fn from_matrix(m: &Mat4) -> Params {
    let mut t = Params::zeros();
    for i in 0..4 {
        t[i] = m[(i, i)].re;
    }
    for (k, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
        t[4 + 2 * k] = m[(i, j)].re;
        t[5 + 2 * k] = m[(i, j)].im;
    }
    t
}

/// Lower-triangular `T` with `T†T = m`, for positive definite `m`.
fn reverse_cholesky(m: &Mat4) -> Option<Mat4> {
    // with J the exchange matrix, J m J = L L† gives m = (J L J)(J L J)†,
    // so T = (J L J)† is lower triangular
    let mut j = Mat4::zeros();
    for i in 0..4 {
        j[(i, 3 - i)] = r(1.0);
    }
    let l = (j * m * j).cholesky()?.l();
    Some((j * l * j).adjoint())
}

struct Objective {
    states: Vec<Vector4C>,
    freqs: Vec<f64>,
}

impl Objective {
    fn predicted(&self, t: &Mat4) -> Vec<f64> {
        self.states.iter().map(|psi| (t * psi).norm_squared()).collect()
    }

    /// `Σ mₖ − nₖ ln mₖ` with `mₖ = ‖Tψₖ‖²`.
    fn value(&self, p: &Params) -> f64 {
        let m = self.predicted(&to_matrix(p));
        let mut f = 0.0;
        for (&mk, &nk) in m.iter().zip(&self.freqs) {
            if nk > 0.0 {
                if mk <= 0.0 {
                    return f64::INFINITY;
                }
                f += mk - nk * mk.ln();
            } else {
                f += mk;
            }
        }
        f
    }

    /// `∂F/∂Re T = 2 Re(TG)`, `∂F/∂Im T = 2 Im(TG)` with `G = Σ (1 − nₖ/mₖ) |ψₖ⟩⟨ψₖ|`.
    fn gradient(&self, p: &Params) -> Params {
        let t = to_matrix(p);
        let m = self.predicted(&t);
        let mut g = Mat4::zeros();
        for ((psi, &mk), &nk) in self.states.iter().zip(&m).zip(&self.freqs) {
            let w = if nk > 0.0 { 1.0 - nk / mk } else { 1.0 };
            g += psi * psi.adjoint() * r(w);
        }
        let tg = t * g * r(2.0);
        let mut grad = from_matrix(&tg);
        // diagonal of T is real, so only the real derivative applies
        for i in 0..4 {
            grad[i] = tg[(i, i)].re;
        }
        grad
    }
}

/// Finds the physical state that maximizes the Poisson likelihood of the
/// corrected counts.
pub fn reconstruct_mle(records: &[CorrectedRecord], options: &MleOptions) -> Result<ReconstructionResult> {
    let settings: Vec<_> = records.iter().map(|rec| rec.setting).collect();
    check_design(&settings)?;
    let total = check_counts(records)?;
    let objective = Objective {
        states: settings.iter().map(|&s| projector(s).amplitudes().clone_owned()).collect(),
        freqs: records.iter().map(|rec| rec.counts / total).collect(),
    };

    let start = positive_start(&linear_inversion(records)?, &objective);
    let (p, iterations, converged) = bfgs(&objective, start, options);

    let t = to_matrix(&p);
    let m = t.adjoint() * t;
    let rho_hat = DensityMatrix::from_matrix(m / r(m.trace().re)).hermitian_part();

    let predicted = objective.predicted(&t);
    let scale = total / predicted.iter().sum::<f64>();
    let log_likelihood = records
        .iter()
        .zip(&predicted)
        .map(|(rec, &mk)| {
            let lambda = mk * scale;
            let n = rec.counts;
            if n > 0.0 {
                n * lambda.ln() - lambda
            } else {
                -lambda
            }
        })
        .sum();

    Ok(ReconstructionResult {
        rho_hat,
        log_likelihood,
        iterations,
        converged,
    })
}

/// Linear-inversion estimate with eigenvalues floored, scaled so that the
/// predicted frequencies sum to one.
fn positive_start(rho: &DensityMatrix, objective: &Objective) -> Params {
    let herm = (rho.matrix() + rho.matrix().adjoint()) * r(0.5);
    let eig = nalgebra::SymmetricEigen::new(herm);
    let vals = eig.eigenvalues.map(|e| r(e.max(EIGEN_FLOOR)));
    let mut m = eig.eigenvectors * Mat4::from_diagonal(&vals) * eig.eigenvectors.adjoint();
    m = (m + m.adjoint()) * r(0.5);
    let t = reverse_cholesky(&m).unwrap_or_else(|| Mat4::identity() * r(0.5));
    let sum: f64 = objective.predicted(&t).iter().sum();
    from_matrix(&(t / r(sum.sqrt())))
}

fn bfgs(objective: &Objective, mut x: Params, options: &MleOptions) -> (Params, usize, bool) {
    let mut f = objective.value(&x);
    let mut g = objective.gradient(&x);
    let mut h = Hessian::identity();

    for iter in 0..options.max_iterations {
        if g.norm() < options.gradient_tol {
            return (x, iter, true);
        }
        let mut d = -(h * g);
        if d.dot(&g) >= 0.0 {
            h = Hessian::identity();
            d = -g;
        }
        let slope = d.dot(&g);

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = x + d * step;
            let ft = objective.value(&trial);
            if ft.is_finite() && ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if h != Hessian::identity() {
                h = Hessian::identity();
                continue;
            }
            // no descent possible at machine precision
            return (x, iter, g.norm() < options.gradient_tol.sqrt());
        };

        let g_new = objective.gradient(&x_new);
        let s = x_new - x;
        let y = g_new - g;
        let sy = s.dot(&y);
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let hy = h * y;
            // H ← (I − ρsyᵀ) H (I − ρysᵀ) + ρssᵀ
            h += (s * s.transpose()) * (rho + rho * rho * y.dot(&hy))
                - (hy * s.transpose() + s * hy.transpose()) * rho;
        }
        let stalled = f - f_new <= 1e-16 * f.abs().max(1.0) && s.norm() <= 1e-15;
        x = x_new;
        f = f_new;
        g = g_new;
        if stalled {
            return (x, iter + 1, g.norm() < options.gradient_tol.sqrt());
        }
    }
    (x, options.max_iterations, g.norm() < options.gradient_tol)
}
