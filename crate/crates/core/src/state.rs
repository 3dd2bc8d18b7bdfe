//! Two-qubit polarization states.
//!
//! The computational basis is ordered `(HH, HV, VH, VV)` with the signal
//! photon as the left tensor factor and the idler as the right one.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_range, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Vector4C = Vector4<C64>;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

const NORM_TOL: f64 = 1e-12;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A normalized two-qubit pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amplitudes: Vector4<C64>,
}

impl PureState {
    /// Builds a state from amplitudes, rejecting vectors whose norm is not 1.
    pub fn new(amplitudes: [C64; 4]) -> Result<Self> {
        let v = Vector4::from(amplitudes);
        let norm2 = v.norm_squared();
        check_range("squared norm", norm2, 1.0 - NORM_TOL, 1.0 + NORM_TOL, "1 +/- 1e-12")?;
        Ok(Self { amplitudes: v })
    }

    /// Product state `signal ⊗ idler` of two normalized qubit states.
    pub fn product(signal: [C64; 2], idler: [C64; 2]) -> Result<Self> {
        Self::new([
            signal[0] * idler[0],
            signal[0] * idler[1],
            signal[1] * idler[0],
            signal[1] * idler[1],
        ])
    }

    pub fn amplitudes(&self) -> &Vector4<C64> {
        &self.amplitudes
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_matrix(self.amplitudes * self.amplitudes.adjoint())
    }
}

/// `(|HH⟩ + |VV⟩)/√2`, the state emitted by the pair source.
pub fn make_bell_phi_plus() -> PureState {
    PureState {
        amplitudes: Vector4::new(r(FRAC_1_SQRT_2), r(0.0), r(0.0), r(FRAC_1_SQRT_2)),
    }
}

/// Werner state `P|Φ+⟩⟨Φ+| + (1-P)/4 · I`.
pub fn make_werner(p: f64) -> Result<DensityMatrix> {
    check_range("Werner probability", p, 0.0, 1.0, "[0, 1]")?;
    let bell = make_bell_phi_plus().projector();
    let m = bell.entries * r(p) + Mat4::identity() * r((1.0 - p) / 4.0);
    Ok(DensityMatrix::from_matrix(m))
}

/// A 4×4 complex matrix intended to hold a two-qubit density matrix.
///
/// Construction does not enforce physicality; use [`validate`] to check it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    entries: Mat4,
}

impl DensityMatrix {
    pub fn from_matrix(entries: Mat4) -> Self {
        Self { entries }
    }

    pub fn maximally_mixed() -> Self {
        Self::from_matrix(Mat4::identity() * r(0.25))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.entries
    }

    /// Entry at zero-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let herm = (self.entries + self.entries.adjoint()) * r(0.5);
        let mut ev: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        [ev[0], ev[1], ev[2], ev[3]]
    }

    /// `(ρ + ρ†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_matrix((self.entries + self.entries.adjoint()) * r(0.5))
    }

    /// Divides by the real part of the trace.
    pub fn normalized(&self) -> Self {
        Self::from_matrix(self.entries / r(self.trace().re))
    }

    /// Trace distance `½‖a − b‖₁` between the Hermitian parts.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = DensityMatrix::from_matrix(self.entries - other.entries);
        0.5 * diff.eigenvalues().iter().map(|e| e.abs()).sum::<f64>()
    }

    pub fn to_rows(&self) -> [[[f64; 2]; 4]; 4] {
        let mut rows = [[[0.0; 2]; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let z = self.entries[(i, j)];
                *cell = [z.re, z.im];
            }
        }
        rows
    }

    pub fn from_rows(rows: &[[[f64; 2]; 4]; 4]) -> Self {
        Self::from_matrix(Mat4::from_fn(|i, j| c(rows[i][j][0], rows[i][j][1])))
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = <[[[f64; 2]; 4]; 4]>::deserialize(deserializer)?;
        Ok(Self::from_rows(&rows))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Signal,
    Idler,
}

/// A 2×2 operator acting on one photon of the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitOperator {
    pub entries: Mat2,
    pub arm: Arm,
}

impl SingleQubitOperator {
    pub fn new(entries: Mat2, arm: Arm) -> Self {
        Self { entries, arm }
    }

    pub fn identity(arm: Arm) -> Self {
        Self::new(Mat2::identity(), arm)
    }

    pub fn on(self, arm: Arm) -> Self {
        Self { arm, ..self }
    }

    /// Largest elementwise deviation of `M†M` from the identity.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.entries.adjoint() * self.entries - Mat2::identity();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The 4×4 lift `op ⊗ I` or `I ⊗ op`.
    pub fn lift(&self) -> Mat4 {
        let id = Mat2::identity();
        match self.arm {
            Arm::Signal => self.entries.kronecker(&id),
            Arm::Idler => id.kronecker(&self.entries),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub hermiticity_residual: f64,
    /// `|tr ρ − 1|`, including any imaginary part of the trace.
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hermiticity residual {:.3e}, trace residual {:.3e}, min eigenvalue {:.3e}",
            self.hermiticity_residual, self.trace_residual, self.min_eigenvalue
        )
    }
}

pub fn validate(rho: &DensityMatrix) -> ValidationReport {
    let m = rho.matrix();
    let hermiticity_residual = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let trace_residual = (rho.trace() - r(1.0)).norm();
    let min_eigenvalue = rho.eigenvalues()[0];
    let finite = m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    let passed = finite
        && hermiticity_residual <= HERMITIAN_TOL
        && trace_residual <= TRACE_TOL
        && min_eigenvalue >= -PSD_TOL;
    ValidationReport {
        hermiticity_residual,
        trace_residual,
        min_eigenvalue,
        passed,
    }
}

/// `K ρ K†` with `K` the operator lifted onto its arm. Not renormalized.
pub fn apply_operator(rho: &DensityMatrix, op: &SingleQubitOperator) -> DensityMatrix {
    let k = op.lift();
    DensityMatrix::from_matrix(k * rho.matrix() * k.adjoint())
}

/// `⟨a|ρ|a⟩`.
pub fn overlap(a: &PureState, rho: &DensityMatrix) -> f64 {
    let v = a.amplitudes();
    (v.adjoint() * rho.matrix() * v)[(0, 0)].re
}

/// Square root of the Hermitian part, with negative eigenvalues clipped.
fn psd_sqrt(m: &Mat4) -> Mat4 {
    let herm = (m + m.adjoint()) * r(0.5);
    let eig = SymmetricEigen::new(herm);
    let roots = eig.eigenvalues.map(|e| r(e.max(0.0).sqrt()));
    eig.eigenvectors * Mat4::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let s = psd_sqrt(rho.matrix());
    let inner = psd_sqrt(&(s * sigma.matrix() * s));
    inner.trace().re.powi(2)
}
