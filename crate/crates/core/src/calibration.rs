//! Least-squares parameter estimation: a small dense QR solver plus the
//! log-linear fits for the Cobb-Douglas production function and the
//! exponential population-flow function.
//!
//! Both model fits are linear after a log transform, so everything reduces
//! to ordinary least squares. The solver uses Householder reflections
//! rather than the normal equations: economic regressors mix levels and
//! logs and are routinely badly scaled.

use crate::kernel::{PpflParams, ProductionParams};
use thiserror::Error;

/// Relative pivot threshold below which a design column is declared
/// linearly dependent on its predecessors.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalibrationError {
    #[error("design column {column} is rank deficient (pivot {pivot:.3e} below tolerance)")]
    RankDeficient { column: usize, pivot: f64 },
    #[error("too few observations: {got} provided, {needed} needed")]
    TooFewObservations { needed: usize, got: usize },
    #[error(
        "estimates outside the model domain (need alpha > 0, beta > 0, alpha + beta < 1): {raw:?}"
    )]
    EstimateOutOfDomain { raw: Vec<f64> },
    #[error("observation {index}: flow must be strictly positive, got {value}")]
    NonPositiveFlow { index: usize, value: f64 },
    #[error("observation {index}: {field} must be {requirement}, got {value}")]
    InvalidObservation { index: usize, field: &'static str, requirement: &'static str, value: f64 },
    #[error("design matrix shape mismatch: {rows} rows of targets vs {expected}")]
    ShapeMismatch { rows: usize, expected: usize },
}

/// Dense row-major matrix, just big enough for small regression designs.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * k);
        for row in rows {
            assert_eq!(row.len(), k, "ragged design matrix");
            data.extend_from_slice(row);
        }
        Self { rows: n, cols: k, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }
}

/// One historical production record; every field strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductionObservation {
    pub output: f64,
    pub labor: f64,
    pub capital: f64,
    pub land: f64,
}

/// One historical population-flow record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowObservation {
    pub flow: f64,
    pub population: f64,
    pub land: f64,
    pub green_land: f64,
}

/// Goodness-of-fit summary in the transformed (log) regression space.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// Raw regression coefficients in the transformed space.
    pub coefficients: Vec<f64>,
    /// Coefficient of determination, clamped to [0, 1].
    pub r_squared: f64,
    /// Root mean squared residual.
    pub rmse: f64,
    /// Per-observation residuals `y - y_hat`.
    pub residuals: Vec<f64>,
}

/// Minimize `||design * beta - targets||^2` by Householder QR.
///
/// Requires at least as many rows as columns and full column rank; a pivot
/// below [`RANK_TOLERANCE`] relative to the largest pivot reports the
/// offending column.
#[allow(clippy::needless_range_loop)]
pub fn ols_solve(design: &Matrix, targets: &[f64]) -> Result<Vec<f64>, CalibrationError> {
    let n = design.rows();
    let k = design.cols();
    if targets.len() != n {
        return Err(CalibrationError::ShapeMismatch { rows: targets.len(), expected: n });
    }
    if n < k || k == 0 {
        return Err(CalibrationError::TooFewObservations { needed: k.max(1), got: n });
    }

    let mut r = design.clone();
    let mut rhs = targets.to_vec();

    // Householder triangularization, applying each reflector to the RHS.
    for col in 0..k {
        let mut norm = 0.0f64;
        for row in col..n {
            norm += r.get(row, col) * r.get(row, col);
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue; // column already zero below the diagonal; rank check catches it
        }

        // v = x + sign(x0) * ||x|| * e1, normalized
        let sign = if r.get(col, col) >= 0.0 { 1.0 } else { -1.0 };
        let mut v: Vec<f64> = (col..n).map(|row| r.get(row, col)).collect();
        v[0] += sign * norm;
        let v_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if v_norm == 0.0 {
            continue;
        }
        for x in &mut v {
            *x /= v_norm;
        }

        for j in col..k {
            let dot: f64 = (0..n - col).map(|i| v[i] * r.get(col + i, j)).sum();
            for i in 0..n - col {
                let val = r.get(col + i, j) - 2.0 * v[i] * dot;
                r.set(col + i, j, val);
            }
        }
        let dot: f64 = (0..n - col).map(|i| v[i] * rhs[col + i]).sum();
        for i in 0..n - col {
            rhs[col + i] -= 2.0 * v[i] * dot;
        }
    }

    let max_pivot = (0..k).map(|j| r.get(j, j).abs()).fold(0.0f64, f64::max);
    for j in 0..k {
        let pivot = r.get(j, j).abs();
        if max_pivot == 0.0 || pivot < RANK_TOLERANCE * max_pivot {
            return Err(CalibrationError::RankDeficient { column: j, pivot });
        }
    }

    // Back-substitution on the k x k upper triangle.
    let mut beta = vec![0.0; k];
    for j in (0..k).rev() {
        let mut acc = rhs[j];
        for c in j + 1..k {
            acc -= r.get(j, c) * beta[c];
        }
        beta[j] = acc / r.get(j, j);
    }
    Ok(beta)
}

#[allow(clippy::needless_range_loop)]
fn fit_report(design: &Matrix, targets: &[f64], beta: &[f64]) -> FitReport {
    let n = design.rows();
    let mut residuals = Vec::with_capacity(n);
    let mut ss_res = 0.0;
    for row in 0..n {
        let fitted: f64 = (0..design.cols()).map(|c| design.get(row, c) * beta[c]).sum();
        let resid = targets[row] - fitted;
        ss_res += resid * resid;
        residuals.push(resid);
    }
    let mean = targets.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = targets.iter().map(|y| (y - mean) * (y - mean)).sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else if ss_res <= 1e-300 {
        1.0
    } else {
        0.0
    };
    FitReport {
        coefficients: beta.to_vec(),
        r_squared,
        rmse: (ss_res / n as f64).sqrt(),
        residuals,
    }
}

fn check_production_observations(
    observations: &[ProductionObservation],
) -> Result<(), CalibrationError> {
    for (index, obs) in observations.iter().enumerate() {
        for (field, value) in [
            ("output", obs.output),
            ("labor", obs.labor),
            ("capital", obs.capital),
            ("land", obs.land),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(CalibrationError::InvalidObservation {
                    index,
                    field,
                    requirement: "finite and strictly positive",
                    value,
                });
            }
        }
    }
    Ok(())
}

/// Estimate Cobb-Douglas parameters from history.
///
/// With `constrain_crs` (the default mode) the regression runs on per-land
/// ratios, `ln(Y/P) ~ 1 + ln(L/P) + ln(K/P)`, so the exponents sum to one
/// by construction. The unconstrained variant regresses
/// `ln Y ~ 1 + ln L + ln K + ln P` and reports the freely estimated land
/// exponent in the fit report for diagnostics.
///
/// Estimates outside the model domain are an error carrying the raw
/// coefficients, never silently clamped.
pub fn fit_production(
    observations: &[ProductionObservation],
    constrain_crs: bool,
) -> Result<(ProductionParams, FitReport), CalibrationError> {
    let k = if constrain_crs { 3 } else { 4 };
    if observations.len() < k + 1 {
        return Err(CalibrationError::TooFewObservations {
            needed: k + 1,
            got: observations.len(),
        });
    }
    check_production_observations(observations)?;

    let mut rows = Vec::with_capacity(observations.len());
    let mut targets = Vec::with_capacity(observations.len());
    for obs in observations {
        if constrain_crs {
            rows.push(vec![1.0, (obs.labor / obs.land).ln(), (obs.capital / obs.land).ln()]);
            targets.push((obs.output / obs.land).ln());
        } else {
            rows.push(vec![1.0, obs.labor.ln(), obs.capital.ln(), obs.land.ln()]);
            targets.push(obs.output.ln());
        }
    }
    let design = Matrix::from_rows(&rows);
    let beta = ols_solve(&design, &targets)?;
    let report = fit_report(&design, &targets, &beta);

    let (alpha, beta_cap) = (beta[1], beta[2]);
    let tfp = beta[0].exp();
    if !tfp.is_finite()
        || tfp <= 0.0
        || alpha <= 0.0
        || beta_cap <= 0.0
        || alpha + beta_cap >= 1.0
    {
        return Err(CalibrationError::EstimateOutOfDomain { raw: beta });
    }
    let params = ProductionParams { tfp, labor_elasticity: alpha, capital_elasticity: beta_cap };
    Ok((params, report))
}

/// Estimate population-flow coefficients by regressing `ln PPFL` on
/// `[1, pop, land, green_land]`; the flow function is already linear in its
/// parameters after the log transform.
pub fn fit_population_flow(
    observations: &[FlowObservation],
) -> Result<(PpflParams, FitReport), CalibrationError> {
    const K: usize = 4;
    if observations.len() < K + 1 {
        return Err(CalibrationError::TooFewObservations {
            needed: K + 1,
            got: observations.len(),
        });
    }
    for (index, obs) in observations.iter().enumerate() {
        if !obs.flow.is_finite() || obs.flow <= 0.0 {
            return Err(CalibrationError::NonPositiveFlow { index, value: obs.flow });
        }
        for (field, value) in [
            ("population", obs.population),
            ("land", obs.land),
            ("green_land", obs.green_land),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(CalibrationError::InvalidObservation {
                    index,
                    field,
                    requirement: "finite and non-negative",
                    value,
                });
            }
        }
    }

    let rows: Vec<Vec<f64>> = observations
        .iter()
        .map(|o| vec![1.0, o.population, o.land, o.green_land])
        .collect();
    let targets: Vec<f64> = observations.iter().map(|o| o.flow.ln()).collect();
    let design = Matrix::from_rows(&rows);
    let beta = ols_solve(&design, &targets)?;
    let report = fit_report(&design, &targets, &beta);
    let params = PpflParams { a0: beta[0], a1: beta[1], a3: beta[2], a4: beta[3] };
    Ok((params, report))
}
