//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Matrices cross the boundary as row-major `Float64Array`s.

use girlab_core::factorreg::CovConvention;
use girlab_core::linkcheck::{inverse_bias_factor, sample_size_guard};
use girlab_core::matops::DEFAULT_CONDITION_CAP;
use girlab_core::measures::{alpha_star, gir, ir};
use girlab_core::transport::{covariance_distance, optimal_map, wd2, GaussianMoments};
use girlab_core::{ModelLabel, RegressionFit, SpdMatrix};
use nalgebra::{DMatrix, DVector};
use wasm_bindgen::prelude::*;

fn square(values: &[f64]) -> girlab_core::Result<SpdMatrix> {
    let n = (values.len() as f64).sqrt().round() as usize;
    if n * n != values.len() {
        return Err(girlab_core::Error::InvalidSpec(format!("{} entries do not form a square matrix", values.len())));
    }
    SpdMatrix::from_rows(n, values)
}

/// `[WD₂, covariance trace term of WD₂², T row-major...]` for `N(m_p, Σ_p) → N(m_q, Σ_q)`.
pub fn transport_summary(mean_p: &[f64], cov_p: &[f64], mean_q: &[f64], cov_q: &[f64]) -> girlab_core::Result<Vec<f64>> {
    let (sp, sq) = (square(cov_p)?, square(cov_q)?);
    let p = GaussianMoments::new(DVector::from_column_slice(mean_p), sp.clone())?;
    let q = GaussianMoments::new(DVector::from_column_slice(mean_q), sq.clone())?;
    let t = optimal_map(&sp, &sq, DEFAULT_CONDITION_CAP)?;
    let mut out = vec![wd2(&p, &q)?, covariance_distance(&sp, &sq)?];
    out.extend(t.matrix().transpose().iter());
    Ok(out)
}

/// α*, IR and GIR (concatenated) for alphas with residual vols `vols` and
/// constant pairwise residual correlation `rho`, then the condition number.
pub fn measures_under_correlation(alphas: &[f64], vols: &[f64], rho: f64) -> girlab_core::Result<Vec<f64>> {
    let n = alphas.len();
    if vols.len() != n {
        return Err(girlab_core::Error::LengthMismatch(n, vols.len()));
    }
    let cov = DMatrix::from_fn(n, n, |i, j| if i == j { vols[i] * vols[i] } else { rho * vols[i] * vols[j] });
    let cond = SpdMatrix::new(cov.clone())?.condition_number();
    let fit = RegressionFit {
        model_label: ModelLabel::Custom("demo".into()),
        asset_ids: (1..=n).map(|i| format!("F{i}")).collect(),
        factor_names: Vec::new(),
        alphas: DVector::from_column_slice(alphas),
        betas: DMatrix::zeros(n, 0),
        residuals: DMatrix::zeros(0, n),
        residual_cov: cov,
        alpha_tstats: DVector::zeros(n),
        beta_tstats: DMatrix::zeros(n, 0),
        r_squared: DVector::zeros(n),
        n_obs: 0,
        convention: CovConvention::MaxLikelihood,
    };
    let mut out = Vec::with_capacity(3 * n + 1);
    for mv in [alpha_star(&fit)?, ir(&fit)?, gir(&fit)?] {
        out.extend(mv.values.iter());
    }
    out.push(cond);
    Ok(out)
}

/// `L / (L − n − 2)` for `L` in `l_from..=l_to`, NaN where undefined.
pub fn bias_factors(n: usize, l_from: usize, l_to: usize) -> Vec<f64> {
    (l_from..=l_to).map(|l| inverse_bias_factor(n, l).unwrap_or(f64::NAN)).collect()
}

fn js(e: girlab_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = gaussianTransport)]
pub fn gaussian_transport(mean_p: &[f64], cov_p: &[f64], mean_q: &[f64], cov_q: &[f64]) -> Result<Vec<f64>, JsError> {
    transport_summary(mean_p, cov_p, mean_q, cov_q).map_err(js)
}

#[wasm_bindgen(js_name = compareMeasures)]
pub fn compare_measures(alphas: &[f64], vols: &[f64], rho: f64) -> Result<Vec<f64>, JsError> {
    measures_under_correlation(alphas, vols, rho).map_err(js)
}

#[wasm_bindgen(js_name = biasCurve)]
pub fn bias_curve(n: usize, l_from: usize, l_to: usize) -> Vec<f64> {
    bias_factors(n, l_from, l_to)
}

#[wasm_bindgen(js_name = sampleSizeAdvice)]
pub fn sample_size_advice(n: usize, l: usize) -> String {
    sample_size_guard(n, l).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transport_to_identity_is_inverse_root() {
        let out = transport_summary(&[0.0, 0.0], &[4.0, 0.0, 0.0, 9.0], &[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        // WD2² = (2-1)² + (3-1)²
        assert!((out[0] - 5f64.sqrt()).abs() < 1e-12);
        assert!((out[1] - 5.0).abs() < 1e-12);
        let t = &out[2..];
        assert!((t[0] - 0.5).abs() < 1e-12 && (t[3] - 1.0 / 3.0).abs() < 1e-12);
        assert!(t[1].abs() < 1e-12 && t[2].abs() < 1e-12);
    }

    #[test]
    fn uncorrelated_gir_equals_ir() {
        let out = measures_under_correlation(&[0.2, -0.1, 0.4], &[1.0, 2.0, 4.0], 0.0).unwrap();
        let (ir, gir) = (&out[3..6], &out[6..9]);
        for i in 0..3 {
            assert!((ir[i] - gir[i]).abs() < 1e-12);
        }
        // σ_e = 7/3
        assert!((out[0] - 0.2 * 3.0 / 7.0).abs() < 1e-12);
        assert!((out[9] - 16.0).abs() < 1e-9);
    }

    #[test]
    fn correlation_separates_gir_from_ir() {
        let out = measures_under_correlation(&[0.3, 0.3], &[1.0, 1.0], 0.5).unwrap();
        // Σ^{-1/2}(1,1)ᵀ = (1,1)ᵀ / sqrt(1.5)
        assert!((out[4] - 0.3 / 1.5f64.sqrt()).abs() < 1e-12);
        assert!(measures_under_correlation(&[0.3, 0.3], &[1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn bias_curve_marks_degenerate_lengths() {
        let c = bias_factors(25, 26, 36);
        assert!(c[..2].iter().all(|x| x.is_nan()));
        assert!((c[10] - 4.0).abs() < 1e-12);
        assert_eq!(sample_size_advice(10, 120), "OK");
    }
}
