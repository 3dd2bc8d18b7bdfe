use nalgebra::{DMatrix, DVector, Matrix2};

use super::{projector, CorrectedRecord, MeasurementSetting};
use crate::error::{Error, Result};
use crate::state::{c, r, DensityMatrix, Mat2, Mat4};

/// Designs whose condition number exceeds this are treated as singular.
const MAX_CONDITION: f64 = 1e10;

fn paulis() -> [Mat2; 4] {
    [
        Mat2::identity(),
        Matrix2::new(r(0.0), r(1.0), r(1.0), r(0.0)),
        Matrix2::new(r(0.0), c(0.0, -1.0), c(0.0, 1.0), r(0.0)),
        Matrix2::new(r(1.0), r(0.0), r(0.0), r(-1.0)),
    ]
}

fn pauli_products() -> Vec<Mat4> {
    let s = paulis();
    let mut out = Vec::with_capacity(16);
    for a in &s {
        for b in &s {
            out.push(a.kronecker(b));
        }
    }
    out
}

/// `A[k, 4i+j] = ⟨ψₖ|σᵢ⊗σⱼ|ψₖ⟩`, one row per setting.
pub fn design_matrix(settings: &[MeasurementSetting]) -> DMatrix<f64> {
    let basis = pauli_products();
    DMatrix::from_fn(settings.len(), 16, |k, col| {
        let v = projector(settings[k]).amplitudes().clone_owned();
        (v.adjoint() * basis[col] * v)[(0, 0)].re
    })
}

/// Ratio of largest to smallest singular value of the design matrix;
/// infinite when the settings do not span the two-qubit operators.
pub fn condition_number(settings: &[MeasurementSetting]) -> f64 {
    if settings.len() < 16 {
        return f64::INFINITY;
    }
    let sv = design_matrix(settings).singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub(super) fn check_counts(records: &[CorrectedRecord]) -> Result<f64> {
    for (index, rec) in records.iter().enumerate() {
        if !(rec.counts.is_finite() && rec.counts >= 0.0) {
            return Err(Error::NonPositiveData {
                index,
                value: rec.counts,
            });
        }
    }
    let total: f64 = records.iter().map(|rec| rec.counts).sum();
    if total <= 0.0 {
        return Err(Error::MalformedData("all counts are zero".into()));
    }
    Ok(total)
}

pub(super) fn check_design(settings: &[MeasurementSetting]) -> Result<()> {
    if settings.len() < 16 {
        return Err(Error::Underdetermined {
            points: settings.len(),
            params: 16,
        });
    }
    let cond = condition_number(settings);
    if cond > MAX_CONDITION {
        return Err(Error::Singular(format!(
            "measurement settings are not informationally complete (condition number {cond:.3e})"
        )));
    }
    Ok(())
}

/// Linear-inversion estimate from accidental-corrected counts.
///
/// Solves the (least-squares, when more than 16 settings are given)
/// system for the Pauli coefficients and normalizes to unit trace. The
/// result is Hermitian but may have small negative eigenvalues.
pub fn linear_inversion(records: &[CorrectedRecord]) -> Result<DensityMatrix> {
    let settings: Vec<_> = records.iter().map(|rec| rec.setting).collect();
    check_design(&settings)?;
    let total = check_counts(records)?;

    let a = design_matrix(&settings);
    let n = DVector::from_iterator(records.len(), records.iter().map(|rec| rec.counts / total));
    let x = a
        .svd(true, true)
        .solve(&n, 1e-12)
        .map_err(|e| Error::Singular(e.to_string()))?;

    let basis = pauli_products();
    let m = basis
        .iter()
        .zip(x.iter())
        .fold(Mat4::zeros(), |acc, (sigma, &coef)| acc + sigma * r(coef));
    let tr = m.trace().re;
    if !(tr > 0.0) {
        return Err(Error::Singular("reconstructed trace is not positive".into()));
    }
    let m = (m + m.adjoint()) * r(0.5 / tr);
    Ok(DensityMatrix::from_matrix(m))
}
