//! Symmetric positive-definite matrix algebra.
//!
//! Every scaling matrix used by the performance measures is a function of a
//! residual covariance matrix: its square root, its inverse square root, or a
//! composition of the two. [`SpdMatrix`] validates its input once, keeps the
//! symmetric eigendecomposition around, and derives roots spectrally from it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative asymmetry accepted before a matrix is rejected.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Eigenvalues must exceed this fraction of the largest eigenvalue.
pub const EIGEN_FLOOR: f64 = 1e-12;
/// Default cap on the condition number for inverse roots.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

/// Symmetric positive-definite matrix with a cached eigendecomposition.
///
/// Storage is exactly symmetric: inputs are symmetrized as `(m + mᵀ)/2` after
/// the asymmetry check passes.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    entries: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

/// Outcome of [`validate_spd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdReport {
    /// `max |m[i][j] - m[j][i]|`.
    pub symmetry_error: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `max_eigenvalue / min_eigenvalue`, or `+inf` when the minimum is not positive.
    pub condition_number: f64,
    /// Asymmetry is within `tol * max|m|`.
    pub symmetric: bool,
    /// Symmetric and every eigenvalue above the relative floor.
    pub positive_definite: bool,
}

/// Inspect a square matrix for symmetry and definiteness.
///
/// Eigenvalues are computed on the symmetrized matrix. `tol` is the relative
/// symmetry tolerance; the eigenvalue floor is [`EIGEN_FLOOR`].
pub fn validate_spd(m: &DMatrix<f64>, tol: f64) -> Result<SpdReport> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let (report, _) = inspect(m, tol)?;
    Ok(report)
}

fn inspect(m: &DMatrix<f64>, tol: f64) -> Result<(SpdReport, SymmetricEigen<f64, nalgebra::Dyn>)> {
    if m.nrows() == 0 {
        return Err(Error::NotSpd("empty matrix".into()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotSpd("non-finite entry".into()));
    }
    let n = m.nrows();
    let mut symmetry_error = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            symmetry_error = symmetry_error.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    let scale = m.amax();
    let symmetric = symmetry_error <= tol * scale;

    let sym = symmetrize(m);
    let eig = SymmetricEigen::new(sym);
    let min_eigenvalue = eig.eigenvalues.min();
    let max_eigenvalue = eig.eigenvalues.max();
    let condition_number = if min_eigenvalue > 0.0 {
        max_eigenvalue / min_eigenvalue
    } else {
        f64::INFINITY
    };
    let positive_definite =
        symmetric && max_eigenvalue > 0.0 && min_eigenvalue > EIGEN_FLOOR * max_eigenvalue;
    Ok((
        SpdReport {
            symmetry_error,
            min_eigenvalue,
            max_eigenvalue,
            condition_number,
            symmetric,
            positive_definite,
        },
        eig,
    ))
}

/// `(m + mᵀ) / 2`, exactly symmetric.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = m.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

impl SpdMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NonSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let (report, eig) = inspect(&m, SYMMETRY_TOL)?;
        if !report.symmetric {
            return Err(Error::NotSpd(format!(
                "asymmetry {:.3e} exceeds tolerance",
                report.symmetry_error
            )));
        }
        if !report.positive_definite {
            return Err(Error::NotSpd(format!(
                "minimum eigenvalue {:.3e} (maximum {:.3e})",
                report.min_eigenvalue, report.max_eigenvalue
            )));
        }
        Ok(Self {
            entries: symmetrize(&m),
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn from_rows(n: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: rows.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(n, n, rows))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n, n),
            eigenvalues: DVector::from_element(n, 1.0),
            eigenvectors: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    // Builds V·diag(f(λ))·Vᵀ; the result shares the eigenvectors.
    fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mapped = self.eigenvalues.map(f);
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= mapped[j];
        }
        let entries = symmetrize(&(scaled * v.transpose()));
        Self {
            entries,
            eigenvalues: mapped,
            eigenvectors: v.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.min()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.max()
    }

    pub fn condition_number(&self) -> f64 {
        self.max_eigenvalue() / self.min_eigenvalue()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn diagonal(&self) -> DVector<f64> {
        self.entries.diagonal()
    }

    /// Unique SPD square root `R` with `R·R = m`.
    pub fn sqrt(&self) -> Self {
        self.spectral_map(f64::sqrt)
    }

    /// Inverse square root `S` with `S·m·S = I`, refused above `cap`.
    pub fn inv_sqrt(&self, cap: f64) -> Result<Self> {
        let cond = self.condition_number();
        if !(cond <= cap) {
            return Err(Error::IllConditioned { cond, cap });
        }
        Ok(self.inv_sqrt_unchecked())
    }

    /// Inverse square root without the conditioning cap.
    pub fn inv_sqrt_unchecked(&self) -> Self {
        self.spectral_map(|l| 1.0 / l.sqrt())
    }

    pub fn inverse(&self) -> Self {
        self.spectral_map(|l| 1.0 / l)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::NotSpd(format!("scale factor {c} is not positive")));
        }
        Ok(Self {
            entries: &self.entries * c,
            eigenvalues: &self.eigenvalues * c,
            eigenvectors: self.eigenvectors.clone(),
        })
    }
}

pub fn sqrt_spd(m: &SpdMatrix) -> SpdMatrix {
    m.sqrt()
}

pub fn inv_sqrt_spd(m: &SpdMatrix, cap: f64) -> Result<SpdMatrix> {
    m.inv_sqrt(cap)
}

/// Frobenius norm of `a - b` relative to `‖b‖_F`.
pub fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}
