//! Binary logistic regression from first principles: maximum likelihood via
//! iteratively reweighted least squares, Wald inference, likelihood-based
//! pseudo-R², and separation diagnostics.
//!
//! The solver is deliberately self-contained: a fit is one sequential IRLS
//! run over an immutable design matrix, so independent fits can run
//! concurrently without coordination.

mod linalg;
mod normal;

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::FitError;
use crate::features::DesignMatrix;

pub use normal::{normal_cdf, two_sided_tail};

/// Numerical knobs for one fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Relative log-likelihood change below which the step is small enough.
    pub convergence_tol: f64,
    /// Gradient component bound that must also hold to declare convergence.
    pub score_tol: f64,
    /// Diagonal stabilizer added to the information matrix; 0 disables it.
    pub ridge_epsilon: f64,
    /// Coefficient magnitude beyond which a column is flagged as separating.
    pub separation_threshold: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 50,
            convergence_tol: 1e-8,
            score_tol: 1e-7,
            ridge_epsilon: 0.0,
            separation_threshold: 15.0,
        }
    }
}

/// Everything a fitted model reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub column_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub z_scores: Vec<f64>,
    pub p_values: Vec<f64>,
    pub loglik_full: f64,
    pub loglik_null: f64,
    pub n: usize,
    pub cox_snell: f64,
    pub nagelkerke: f64,
    pub converged: bool,
    pub iterations: usize,
    pub separation_warnings: Vec<String>,
    /// Echo of the ridge actually applied; 0 when off.
    pub ridge_used: f64,
}

/// Per-iteration state kept for diagnostics.
#[derive(Debug, Clone, Default)]
pub struct FitTrace {
    pub loglik: Vec<f64>,
    pub coefficients: Vec<Vec<f64>>,
    pub std_errors: Vec<Vec<f64>>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const PROB_CLIP: f64 = 1e-12;

/// Bernoulli log-likelihood of `coefficients` on the matrix, probabilities
/// clipped to `[1e-12, 1 - 1e-12]` before the logs.
pub fn log_likelihood(coefficients: &[f64], x: &DesignMatrix) -> f64 {
    assert_eq!(coefficients.len(), x.n_cols, "coefficient/column mismatch");
    let mut ll = 0.0;
    for i in 0..x.n_rows {
        let p = sigmoid(dot(x.row(i), coefficients)).clamp(PROB_CLIP, 1.0 - PROB_CLIP);
        ll += if x.labels[i] == 1.0 {
            p.ln()
        } else {
            (1.0 - p).ln()
        };
    }
    ll
}

/// Gradient of the log-likelihood: `X^T (y - p)`.
pub fn score(coefficients: &[f64], x: &DesignMatrix) -> Vec<f64> {
    assert_eq!(coefficients.len(), x.n_cols, "coefficient/column mismatch");
    let mut g = vec![0.0; x.n_cols];
    for i in 0..x.n_rows {
        let resid = x.labels[i] - sigmoid(dot(x.row(i), coefficients));
        for (gj, &xij) in g.iter_mut().zip(x.row(i)) {
            *gj += resid * xij;
        }
    }
    g
}

/// Two-sided Wald p-value of a coefficient against the standard normal.
pub fn wald_p(coefficient: f64, std_error: f64) -> Result<f64, FitError> {
    if std_error.is_nan() || !std_error.is_finite() || std_error <= 0.0 {
        return Err(FitError::InvalidInference);
    }
    Ok(two_sided_tail(coefficient / std_error))
}

/// Cox & Snell and Nagelkerke pseudo-R² from the two log-likelihoods.
pub fn pseudo_r2(loglik_full: f64, loglik_null: f64, n: usize) -> (f64, f64) {
    let n = n as f64;
    let cox_snell = 1.0 - ((2.0 / n) * (loglik_null - loglik_full)).exp();
    let max_cox_snell = 1.0 - ((2.0 / n) * loglik_null).exp();
    let nagelkerke = if max_cox_snell > 0.0 {
        cox_snell / max_cox_snell
    } else {
        0.0
    };
    (cox_snell, nagelkerke)
}

/// Flag columns whose coefficient path or standard error behaves like
/// (quasi-)separation: magnitude past the threshold at any iteration, or a
/// standard error that grew by three orders of magnitude over the run.
pub fn detect_separation(trace: &FitTrace, column_names: &[String], threshold: f64) -> Vec<String> {
    let mut flagged = Vec::new();
    for (j, name) in column_names.iter().enumerate() {
        let runaway = trace
            .coefficients
            .iter()
            .any(|beta| beta[j].abs() > threshold);
        let se_diverged = match (trace.std_errors.first(), trace.std_errors.last()) {
            (Some(first), Some(last)) if trace.std_errors.len() >= 2 => {
                first[j].is_finite() && first[j] > 0.0 && last[j] / first[j] > 1e3
            }
            _ => false,
        };
        if runaway || se_diverged {
            flagged.push(name.clone());
        }
    }
    flagged
}

/// Maximum-likelihood logistic fit; see [`fit_logistic_traced`] for the
/// per-iteration trace.
pub fn fit_logistic(x: &DesignMatrix, opts: &FitOptions) -> Result<FitResult, FitError> {
    fit_logistic_traced(x, opts).map(|(result, _)| result)
}

/// IRLS with step-halving. The likelihood never decreases across iterations;
/// convergence requires both a small relative likelihood change and a small
/// gradient, and the flag stays honest under separation.
pub fn fit_logistic_traced(
    x: &DesignMatrix,
    opts: &FitOptions,
) -> Result<(FitResult, FitTrace), FitError> {
    let (n, p) = (x.n_rows, x.n_cols);
    if n == 0 {
        return Err(FitError::EmptyMatrix);
    }
    if n < p {
        return Err(FitError::InsufficientData { rows: n, cols: p });
    }
    let ones = x.labels.iter().filter(|&&y| y == 1.0).count();
    if ones == 0 || ones == n {
        return Err(FitError::DegenerateLabels);
    }

    let mut beta = vec![0.0; p];
    let mut ll = log_likelihood(&beta, x);
    let mut trace = FitTrace::default();
    let mut converged = false;
    let mut iterations = 0;
    const MIN_WEIGHT: f64 = 1e-10;

    for _ in 0..opts.max_iterations {
        iterations += 1;

        // Assemble X^T W X and X^T W z at the current estimate.
        let mut info = vec![0.0; p * p];
        let mut rhs = vec![0.0; p];
        for i in 0..n {
            let row = x.row(i);
            let eta = dot(row, &beta);
            let mu = sigmoid(eta);
            let w = (mu * (1.0 - mu)).max(MIN_WEIGHT);
            let z = eta + (x.labels[i] - mu) / w;
            for a in 0..p {
                let wxa = w * row[a];
                rhs[a] += wxa * z;
                for b in a..p {
                    info[a * p + b] += wxa * row[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                info[a * p + b] = info[b * p + a];
            }
            info[a * p + a] += opts.ridge_epsilon;
        }

        let mut factor = info;
        if let Err(col) = linalg::cholesky(&mut factor, p) {
            return Err(FitError::SingularSystem(vec![x.column_names[col].clone()]));
        }
        let proposal = linalg::cholesky_solve(&factor, p, &rhs);

        // Per-iteration standard errors from the same factorization.
        let covariance = linalg::cholesky_inverse(&factor, p);
        let ses: Vec<f64> = (0..p)
            .map(|j| covariance[j * p + j].max(0.0).sqrt())
            .collect();

        // Step-halving toward the proposal if the full step overshoots. The
        // slack keeps one-ulp noise in a flat likelihood from masquerading as
        // a decrease and halving away genuine Newton steps.
        let slack = 32.0 * f64::EPSILON * ll.abs().max(1.0);
        let mut candidate = proposal;
        let mut ll_new = log_likelihood(&candidate, x);
        let mut halvings = 0;
        while ll_new < ll - slack && halvings < 30 {
            for (c, b) in candidate.iter_mut().zip(&beta) {
                *c = 0.5 * (*c + *b);
            }
            ll_new = log_likelihood(&candidate, x);
            halvings += 1;
        }
        if ll_new < ll - slack {
            // No direction of improvement left; keep the previous estimate.
            // At a numerically exact optimum the proposal can land a hair
            // below the current likelihood, so convergence is decided by the
            // gradient here.
            trace.loglik.push(ll);
            trace.coefficients.push(beta.clone());
            trace.std_errors.push(ses);
            let g = score(&beta, x);
            converged = g.iter().all(|v| v.abs() <= opts.score_tol);
            break;
        }

        let rel_change = (ll_new - ll) / ll.abs().max(1e-10);
        beta = candidate;
        ll = ll_new;
        trace.loglik.push(ll);
        trace.coefficients.push(beta.clone());
        trace.std_errors.push(ses);

        if rel_change < opts.convergence_tol {
            let g = score(&beta, x);
            if g.iter().all(|v| v.abs() <= opts.score_tol) {
                converged = true;
                break;
            }
        }
    }

    // Inference at the final estimate.
    let mut info = vec![0.0; p * p];
    for i in 0..n {
        let row = x.row(i);
        let mu = sigmoid(dot(row, &beta));
        let w = (mu * (1.0 - mu)).max(MIN_WEIGHT);
        for a in 0..p {
            for b in a..p {
                info[a * p + b] += w * row[a] * row[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            info[a * p + b] = info[b * p + a];
        }
        info[a * p + a] += opts.ridge_epsilon;
    }
    let mut factor = info;
    if let Err(col) = linalg::cholesky(&mut factor, p) {
        return Err(FitError::SingularSystem(vec![x.column_names[col].clone()]));
    }
    let covariance = linalg::cholesky_inverse(&factor, p);
    let std_errors: Vec<f64> = (0..p)
        .map(|j| covariance[j * p + j].max(0.0).sqrt())
        .collect();
    let z_scores: Vec<f64> = beta
        .iter()
        .zip(&std_errors)
        .map(|(b, se)| if *se > 0.0 { b / se } else { 0.0 })
        .collect();
    let p_values: Vec<f64> = z_scores.iter().map(|&z| two_sided_tail(z)).collect();

    let separation_warnings = detect_separation(&trace, &x.column_names, opts.separation_threshold);
    if !separation_warnings.is_empty() {
        converged = false;
    }

    let ybar = ones as f64 / n as f64;
    let loglik_null = n as f64 * (ybar * ybar.ln() + (1.0 - ybar) * (1.0 - ybar).ln());
    let (cox_snell, nagelkerke) = pseudo_r2(ll, loglik_null, n);

    let result = FitResult {
        column_names: x.column_names.clone(),
        coefficients: beta,
        std_errors,
        z_scores,
        p_values,
        loglik_full: ll,
        loglik_null,
        n,
        cox_snell,
        nagelkerke,
        converged,
        iterations,
        separation_warnings,
        ridge_used: opts.ridge_epsilon,
    };
    Ok((result, trace))
}

impl FitResult {
    /// JSON with stable key order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit result serializes")
    }

    /// Aligned variable/coefficient table with the N and pseudo-R² footer.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .column_names
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(8)
            .max(8);
        let _ = writeln!(out, "{:<width$}  {:>12}", "variable", "coefficient");
        for (name, b) in self.column_names.iter().zip(&self.coefficients) {
            let _ = writeln!(out, "{name:<width$}  {b:>12.4}");
        }
        let _ = writeln!(
            out,
            "N = {}; Cox & Snell R2 = {:.3}; Nagelkerke R2 = {:.3}",
            self.n, self.cox_snell, self.nagelkerke
        );
        out
    }
}
