//! Numeric feasibility analysis behind the semi-random solver's constants.
//!
//! The solver's bookkeeping works as long as, for the slope constant c and
//! every μ in [0, 1/(1+c)], the definite integral
//!
//! ```text
//!   I(μ) = ∫₀^μ 1 − (1 − cμ − x)(1 − cx/(1−x)) dx
//!        = μ²(c² + 3c/2 + 1/2) + μc²·ln(1−μ)
//! ```
//!
//! stays at most cμ. Dividing by μ, that is exactly the non-positivity of
//!
//! ```text
//!   f(μ) = μ(c² + 3c/2 + 1/2) + c²·ln(1−μ) − c,
//! ```
//!
//! which holds whenever 2c²·ln((1+c)/c) ≥ 1. The smallest such c is
//! c* ≈ 0.77767, and 1/(1+c*) ≈ 0.56253 is where the ratio k/n ≈ 0.562
//! threshold comes from. This module evaluates all of that in f64 with
//! explicit tolerances: the closed form, a Simpson-quadrature cross-check,
//! the feasibility test, the bisection for c*, a grid verification that f
//! stays non-positive, and the empirical safety margin (cμ − I(μ))/μ.

use serde::Serialize;
use thiserror::Error;

/// Errors from the numeric routines: domain violations and infeasible c.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("mu = {mu} outside [0, 1) — the log term needs 1 − mu > 0")]
    MuOutOfRange { mu: f64 },
    #[error("c = {c} outside (0, 1]")]
    COutOfRange { c: f64 },
    #[error("quadrature needs at least 2 steps, got {steps}")]
    TooFewSteps { steps: usize },
    #[error("c = {c} fails the feasibility condition 2c²·ln((1+c)/c) ≥ 1")]
    ConditionNotMet { c: f64 },
}

/// Validated inputs for the integral evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralParams {
    pub c: f64,
    pub mu: f64,
    pub steps: usize,
}

impl IntegralParams {
    /// Validates 0 < c ≤ 1, 0 ≤ mu < 1, steps ≥ 2.
    pub fn new(c: f64, mu: f64, steps: usize) -> Result<Self, AnalysisError> {
        check_c(c)?;
        check_mu(mu)?;
        if steps < 2 {
            return Err(AnalysisError::TooFewSteps { steps });
        }
        Ok(IntegralParams { c, mu, steps })
    }

    /// Closed-form value of the integral.
    pub fn closed_form(&self) -> f64 {
        integral_closed_form(self.c, self.mu).expect("validated at construction")
    }

    /// Quadrature value of the integral.
    pub fn numeric(&self) -> f64 {
        integral_numeric(self.c, self.mu, self.steps).expect("validated at construction")
    }
}

fn check_mu(mu: f64) -> Result<(), AnalysisError> {
    if !(0.0..1.0).contains(&mu) { Err(AnalysisError::MuOutOfRange { mu }) } else { Ok(()) }
}

fn check_c(c: f64) -> Result<(), AnalysisError> {
    if !(c > 0.0 && c <= 1.0) { Err(AnalysisError::COutOfRange { c }) } else { Ok(()) }
}

/// I(μ) by the closed form μ²(c² + 3c/2 + 1/2) + μc²·ln(1−μ).
pub fn integral_closed_form(c: f64, mu: f64) -> Result<f64, AnalysisError> {
    check_c(c)?;
    check_mu(mu)?;
    Ok(mu * mu * (c * c + 1.5 * c + 0.5) + mu * c * c * (1.0 - mu).ln())
}

/// The integrand 1 − (1 − cμ − x)(1 − cx/(1−x)).
fn integrand(c: f64, mu: f64, x: f64) -> f64 {
    1.0 - (1.0 - c * mu - x) * (1.0 - c * x / (1.0 - x))
}

/// I(μ) by composite Simpson quadrature over [0, μ]. Odd step counts are
/// rounded up to the next even number (Simpson needs paired panels).
pub fn integral_numeric(c: f64, mu: f64, steps: usize) -> Result<f64, AnalysisError> {
    check_c(c)?;
    check_mu(mu)?;
    if steps < 2 {
        return Err(AnalysisError::TooFewSteps { steps });
    }
    if mu == 0.0 {
        return Ok(0.0);
    }
    let steps = steps + steps % 2;
    let h = mu / steps as f64;
    let mut sum = integrand(c, mu, 0.0) + integrand(c, mu, mu);
    for i in 1..steps {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * integrand(c, mu, i as f64 * h);
    }
    Ok(sum * h / 3.0)
}

/// The feasibility condition on the slope constant: 2c²·ln((1+c)/c) ≥ 1.
///
/// # Panics
/// If `c ≤ 0`.
pub fn check_c_condition(c: f64) -> bool {
    assert!(c > 0.0, "the condition needs c > 0, got {c}");
    2.0 * c * c * ((1.0 + c) / c).ln() >= 1.0
}

/// The smallest feasible c: bisection root of 2c²·ln((1+c)/c) = 1 on
/// (0.5, 1), to within `tolerance`. Expect ≈ 0.77767.
///
/// # Panics
/// If `tolerance ≤ 0`.
pub fn min_feasible_c(tolerance: f64) -> f64 {
    assert!(tolerance > 0.0, "bisection needs a positive tolerance");
    let (mut lo, mut hi) = (0.5_f64, 1.0_f64);
    debug_assert!(!check_c_condition(lo) && check_c_condition(hi));
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if check_c_condition(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Grid verification that f(μ) = μ(c² + 3c/2 + 1/2) + c²·ln(1−μ) − c stays
/// non-positive over [0, 1/(1+c)].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonpositivityReport {
    pub c: f64,
    pub grid_step: f64,
    pub grid_points: usize,
    /// Largest f value seen on the grid (non-positive when all is well).
    pub max_f: f64,
    /// Where the maximum was attained.
    pub max_at: f64,
    /// f(0), which is −c exactly.
    pub f_at_zero: f64,
    /// f′ > 0 strictly below this μ (= 1 − c²/(c² + 3c/2 + 1/2)).
    pub increasing_until: f64,
    /// Whether consecutive grid values below that threshold were strictly
    /// increasing.
    pub monotone_ok: bool,
}

/// Evaluates f on a `grid_step`-spaced grid over [0, 1/(1+c)] (right
/// endpoint always included) and reports the maximum and the monotonicity
/// structure. Requires [`check_c_condition`] to hold for `c`.
pub fn verify_f_nonpositive(c: f64, grid_step: f64) -> Result<NonpositivityReport, AnalysisError> {
    check_c(c)?;
    if !check_c_condition(c) {
        return Err(AnalysisError::ConditionNotMet { c });
    }
    assert!(grid_step > 0.0, "grid step must be positive");
    let slope = c * c + 1.5 * c + 0.5;
    let f = |mu: f64| mu * slope + c * c * (1.0 - mu).ln() - c;
    let mu_max = 1.0 / (1.0 + c);
    let increasing_until = 1.0 - c * c / slope;

    let mut grid: Vec<f64> = Vec::new();
    let mut mu = 0.0;
    while mu < mu_max {
        grid.push(mu);
        mu += grid_step;
    }
    grid.push(mu_max);

    let mut max_f = f64::NEG_INFINITY;
    let mut max_at = 0.0;
    let mut monotone_ok = true;
    let mut prev: Option<(f64, f64)> = None;
    for &mu in &grid {
        let value = f(mu);
        if value > max_f {
            max_f = value;
            max_at = mu;
        }
        if let Some((prev_mu, prev_value)) = prev
            && mu < increasing_until
            && value <= prev_value
        {
            let _ = prev_mu;
            monotone_ok = false;
        }
        prev = Some((mu, value));
    }

    Ok(NonpositivityReport {
        c,
        grid_step,
        grid_points: grid.len(),
        max_f,
        max_at,
        f_at_zero: f(0.0),
        increasing_until,
        monotone_ok,
    })
}

/// Empirical safety margin: min over an equispaced μ-grid in
/// (0, (1−ε)/(1+c)] of (cμ − I(μ))/μ. A positive result measures how far
/// the integral stays below cμ on the ε-restricted range; no formula for
/// the margin is asserted, only the measurement.
pub fn empirical_margin(c: f64, epsilon: f64, grid_points: usize) -> Result<f64, AnalysisError> {
    check_c(c)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(AnalysisError::MuOutOfRange { mu: epsilon });
    }
    if grid_points < 2 {
        return Err(AnalysisError::TooFewSteps { steps: grid_points });
    }
    let hi = (1.0 - epsilon) / (1.0 + c);
    let mut min_margin = f64::INFINITY;
    for i in 1..=grid_points {
        let mu = hi * i as f64 / grid_points as f64;
        let margin = (c * mu - integral_closed_form(c, mu)?) / mu;
        min_margin = min_margin.min(margin);
    }
    Ok(min_margin)
}
