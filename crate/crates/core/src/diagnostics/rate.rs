//! Deterministic sup-norm rate check for the weighted-basis series: the
//! cited pointwise bound says sup |f - v_n| <= C ln n / n^{p + mu - 3/2}
//! for f with p-th derivative in the Hoelder class of order mu.
//!
//! The partial sums v_n here are those of the orthonormal expansion in the
//! (1/2, -1/2) family - the standardization under which the bound's series
//! actually reproduces f (the weighted elements `u_n` differ from the
//! orthonormal ones only by the per-degree factor sqrt(h_n), which cancels
//! from the partial sum when coefficients and basis carry it symmetrically).

use crate::error::{Error, Result};
use crate::functions::{FunctionClass, TestFunction};
use crate::jacobi::{BasisKind, JacobiBasis, JacobiParams};
use crate::numeric::{linear_fit, CompensatedSum};
use crate::quadrature::{default_expansion_nodes, expand};

/// Configuration of a rate check.
#[derive(Debug, Clone)]
pub struct RateConfig {
    pub function: TestFunction,
    /// Degrees to measure, within [8, 256], strictly increasing.
    pub n_values: Vec<usize>,
    /// Points of the uniform sup-norm grid (default 201).
    pub y_grid_points: usize,
}

impl RateConfig {
    pub fn new(function: TestFunction, n_values: Vec<usize>) -> Self {
        Self {
            function,
            n_values,
            y_grid_points: 201,
        }
    }

    fn validate(&self) -> Result<(f64, bool)> {
        if self.n_values.is_empty() || self.n_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig {
                context: "n_values must be nonempty and strictly increasing".into(),
            });
        }
        if self
            .n_values
            .iter()
            .any(|&n| !(8..=256).contains(&n))
        {
            return Err(Error::InvalidConfig {
                context: "rate check degrees must lie in [8, 256]".into(),
            });
        }
        if self.y_grid_points < 2 {
            return Err(Error::InvalidConfig {
                context: "sup-norm grid needs at least 2 points".into(),
            });
        }
        match self.function.class() {
            FunctionClass::Polynomial(_) => Ok((f64::INFINITY, true)),
            FunctionClass::Lipschitz { p, mu } => {
                let rate = p as f64 + mu - 1.5;
                if rate < 0.0 {
                    return Err(Error::InvalidConfig {
                        context: format!(
                            "rate check needs p + mu >= 3/2, got {} with p + mu = {}",
                            self.function.id(),
                            p as f64 + mu
                        ),
                    });
                }
                Ok((rate, false))
            }
            _ => Err(Error::InvalidConfig {
                context: format!(
                    "rate check needs a declared smoothness class, {} has none",
                    self.function.id()
                ),
            }),
        }
    }
}

/// Result of a rate check.
#[derive(Debug, Clone)]
pub struct RateReport {
    pub n_values: Vec<usize>,
    /// sup_y |f(y) - v_n(y)| over the y-grid.
    pub sup_errors: Vec<f64>,
    /// sup-error * n^{p + mu - 3/2} / ln n (zeros for polynomial input).
    pub normalized: Vec<f64>,
    /// Largest normalized ratio: the smallest constant making the bound
    /// hold over the tested range.
    pub fitted_constant: f64,
    /// Log-log slope of the normalized ratio against n.
    pub fitted_slope: f64,
    /// Rate exponent p + mu - 3/2 used for normalization.
    pub rate_exponent: f64,
}

impl RateReport {
    /// The bound-compatibility property: no growth trend in the normalized
    /// ratio beyond the given slope.
    pub fn slope_within(&self, bound: f64) -> bool {
        self.fitted_slope <= bound
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,sup_error,normalized_ratio\n");
        for (i, &n) in self.n_values.iter().enumerate() {
            out.push_str(&format!(
                "{},{:.16e},{:.16e}\n",
                n, self.sup_errors[i], self.normalized[i]
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "rate exponent p + mu - 3/2 = {:.4}\n\
             fitted constant: {:.6e}\n\
             fitted log-log slope of normalized ratio: {:.4} (bound-compatible iff <= 0.05): {}",
            self.rate_exponent,
            self.fitted_constant,
            self.fitted_slope,
            super::pass_fail(self.slope_within(0.05))
        )
    }
}

/// Measures sup |f - v_n| on a uniform grid and fits the normalized ratio.
pub fn sup_rate_check(cfg: &RateConfig) -> Result<RateReport> {
    let (rate_exponent, is_polynomial) = cfg.validate()?;
    let max_n = *cfg.n_values.last().unwrap();
    let params = JacobiParams::half_pair();
    let expansion = expand(
        |t| cfg.function.eval(t),
        cfg.function.id(),
        BasisKind::OrthonormalP,
        params,
        max_n,
        default_expansion_nodes(max_n),
    )?;
    let basis = JacobiBasis::new(BasisKind::OrthonormalP, params, max_n)?;

    let mut sup_errors = vec![0.0f64; cfg.n_values.len()];
    let mut column = vec![0.0; max_n + 1];
    let step = 2.0 / (cfg.y_grid_points - 1) as f64;
    for i in 0..cfg.y_grid_points {
        let y = -1.0 + i as f64 * step;
        basis.eval_into(y, &mut column)?;
        let fy = cfg.function.eval(y);
        let mut acc = CompensatedSum::new();
        let mut idx = 0;
        for (k, (&c, &b)) in expansion.coefficients().iter().zip(&column).enumerate() {
            acc.add(c * b);
            while idx < cfg.n_values.len() && cfg.n_values[idx] == k {
                let err = (fy - acc.value()).abs();
                if err > sup_errors[idx] {
                    sup_errors[idx] = err;
                }
                idx += 1;
            }
        }
    }

    let (normalized, fitted_constant, fitted_slope) = if is_polynomial {
        (vec![0.0; cfg.n_values.len()], 0.0, 0.0)
    } else {
        let normalized: Vec<f64> = cfg
            .n_values
            .iter()
            .zip(&sup_errors)
            .map(|(&n, &e)| e * (n as f64).powf(rate_exponent) / (n as f64).ln())
            .collect();
        let fitted_constant = normalized.iter().copied().fold(0.0f64, f64::max);
        let ln_n: Vec<f64> = cfg.n_values.iter().map(|&n| (n as f64).ln()).collect();
        let ln_r: Vec<f64> = normalized.iter().map(|&v| v.max(1e-300).ln()).collect();
        let (slope, _) = linear_fit(&ln_n, &ln_r).ok_or(Error::DegenerateFit {
            context: "rate fit needs at least two degrees".into(),
        })?;
        (normalized, fitted_constant, slope)
    };

    Ok(RateReport {
        n_values: cfg.n_values.clone(),
        sup_errors,
        normalized,
        fitted_constant,
        fitted_slope,
        rate_exponent: if is_polynomial { 0.0 } else { rate_exponent },
    })
}
