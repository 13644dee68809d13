//! Continuity probes of the limiting stochastic integral in its evaluation
//! point: weak continuity in probability for stable paths, continuity in
//! quadratic mean for Wiener paths. Both compare I(y + h) against I(y) on
//! the same path realization as h shrinks.

use super::{par_map_replicas, pass_fail, PathFamily};
use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::jacobi::{BasisKind, JacobiBasis, JacobiParams};
use crate::numeric::{binomial_se, mean_and_variance, CompensatedSum};
use crate::paths::{PathGrid, PathSeed};
use crate::quadrature::{default_expansion_nodes, expand, GaussJacobiRule, SeriesExpansion};
use crate::series::kernel_weighted_at_grid;
use crate::integral::weighted_increment_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuityMode {
    /// P(|I(y+h) - I(y)| > eps) on symmetric stable paths over [-1, 1].
    WeakProbability,
    /// E|I(y+h) - I(y)|^2 on Wiener paths over [0, 1], with the exact
    /// quadrature track alongside.
    QuadraticMean,
}

/// Configuration of a continuity probe.
#[derive(Debug, Clone)]
pub struct ContinuityConfig {
    pub function: TestFunction,
    pub mode: ContinuityMode,
    pub params: JacobiParams,
    pub weight: JacobiParams,
    /// Stable index for the weak mode (ignored in quadratic mode).
    pub alpha: f64,
    pub y_center: f64,
    /// Strictly decreasing positive offsets.
    pub h_values: Vec<f64>,
    /// Exceedance threshold for the weak mode.
    pub epsilon: f64,
    pub replicas: usize,
    pub grid_m: usize,
    pub n_ref: usize,
    pub seed: u64,
}

impl ContinuityConfig {
    fn domain(&self) -> (f64, f64) {
        match self.mode {
            ContinuityMode::WeakProbability => (-1.0, 1.0),
            ContinuityMode::QuadraticMean => (0.0, 1.0),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.h_values.is_empty()
            || self.h_values.iter().any(|&h| !(h > 0.0))
            || self.h_values.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::InvalidConfig {
                context: "h_values must be positive and strictly decreasing".into(),
            });
        }
        if self.replicas < 100 {
            return Err(Error::InvalidConfig {
                context: format!(
                    "continuity probes need at least 100 replicas, got {}",
                    self.replicas
                ),
            });
        }
        let (lo, hi) = self.domain();
        let h_max = self.h_values[0];
        if self.y_center < lo || self.y_center + h_max > hi {
            return Err(Error::OutOfDomain {
                point: self.y_center + h_max,
                lo,
                hi,
            });
        }
        if self.mode == ContinuityMode::WeakProbability && !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig {
                context: format!("weak mode needs eps > 0, got {}", self.epsilon),
            });
        }
        Ok(())
    }
}

/// Per-offset rows of a continuity probe.
#[derive(Debug, Clone)]
pub struct ContinuityReport {
    pub mode: ContinuityMode,
    pub h_values: Vec<f64>,
    /// Weak mode: empirical exceedance probabilities and their SEs.
    pub probs: Option<Vec<f64>>,
    pub probs_se: Option<Vec<f64>>,
    /// Quadratic mode: MC second moments, their SEs, exact track.
    pub mc: Option<Vec<f64>>,
    pub mc_se: Option<Vec<f64>>,
    pub exact: Option<Vec<f64>>,
    pub replicas: usize,
    pub seed: u64,
}

impl ContinuityReport {
    /// Weak mode: probabilities nonincreasing (as h shrinks) within noise.
    pub fn probs_nonincreasing_within_noise(&self) -> bool {
        let (Some(p), Some(se)) = (&self.probs, &self.probs_se) else {
            return false;
        };
        p.windows(2).zip(se.windows(2)).all(|(pw, sw)| {
            pw[1] <= pw[0] + 2.0 * (sw[0] * sw[0] + sw[1] * sw[1]).sqrt()
        })
    }

    /// Quadratic mode: worst |mc - exact| z-score.
    pub fn qm_worst_z(&self) -> Option<f64> {
        let mc = self.mc.as_ref()?;
        let se = self.mc_se.as_ref()?;
        let exact = self.exact.as_ref()?;
        let mut worst = 0.0f64;
        for i in 0..mc.len() {
            let z = if se[i] > 0.0 {
                (mc[i] - exact[i]).abs() / se[i]
            } else if (mc[i] - exact[i]).abs() > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            worst = worst.max(z);
        }
        Some(worst)
    }

    /// Quadratic mode: (mc, exact) final-to-first decay ratios.
    pub fn decay_ratios(&self) -> Option<(f64, f64)> {
        let mc = self.mc.as_ref()?;
        let exact = self.exact.as_ref()?;
        let guard = |first: f64, last: f64| {
            if first > 0.0 {
                last / first
            } else {
                0.0
            }
        };
        Some((
            guard(*mc.first()?, *mc.last()?),
            guard(*exact.first()?, *exact.last()?),
        ))
    }

    /// Both quadratic tracks decreasing monotonically in h.
    pub fn qm_tracks_decreasing(&self) -> bool {
        let check = |v: &Vec<f64>| v.windows(2).all(|w| w[1] < w[0]);
        match (&self.mc, &self.exact) {
            (Some(mc), Some(exact)) => check(mc) && check(exact),
            _ => false,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self.mode {
            ContinuityMode::WeakProbability => {
                out.push_str("h,prob,prob_se\n");
                let p = self.probs.as_ref().unwrap();
                let se = self.probs_se.as_ref().unwrap();
                for (i, &h) in self.h_values.iter().enumerate() {
                    out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", h, p[i], se[i]));
                }
            }
            ContinuityMode::QuadraticMean => {
                out.push_str("h,mc,mc_se,exact,z\n");
                let mc = self.mc.as_ref().unwrap();
                let se = self.mc_se.as_ref().unwrap();
                let ex = self.exact.as_ref().unwrap();
                for (i, &h) in self.h_values.iter().enumerate() {
                    let z = if se[i] > 0.0 {
                        (mc[i] - ex[i]) / se[i]
                    } else {
                        0.0
                    };
                    out.push_str(&format!(
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                        h, mc[i], se[i], ex[i], z
                    ));
                }
            }
        }
        out
    }

    pub fn summary(&self) -> String {
        match self.mode {
            ContinuityMode::WeakProbability => format!(
                "weak continuity probe, replicas {}\n\
                 probabilities nonincreasing as h shrinks (within 2 SE): {}",
                self.replicas,
                pass_fail(self.probs_nonincreasing_within_noise())
            ),
            ContinuityMode::QuadraticMean => {
                let z = self.qm_worst_z().unwrap_or(f64::INFINITY);
                let (mc_ratio, exact_ratio) = self.decay_ratios().unwrap_or((1.0, 1.0));
                format!(
                    "quadratic-mean continuity probe, replicas {}\n\
                     MC matches exact within 3 SE (worst z = {:.2}): {}\n\
                     tracks decreasing: {}\n\
                     decay ratio final/first: mc {:.3e}, exact {:.3e}",
                    self.replicas,
                    z,
                    pass_fail(z <= 3.0),
                    pass_fail(self.qm_tracks_decreasing()),
                    mc_ratio,
                    exact_ratio
                )
            }
        }
    }
}

/// Runs a continuity probe per the configured mode.
pub fn continuity_probe(cfg: &ContinuityConfig) -> Result<ContinuityReport> {
    cfg.validate()?;
    match cfg.mode {
        ContinuityMode::WeakProbability => weak_probe(cfg),
        ContinuityMode::QuadraticMean => quadratic_probe(cfg),
    }
}

fn weak_probe(cfg: &ContinuityConfig) -> Result<ContinuityReport> {
    let expansion = expand(
        |t| cfg.function.eval(t),
        cfg.function.id(),
        BasisKind::OrthonormalP,
        cfg.params,
        cfg.n_ref,
        default_expansion_nodes(cfg.n_ref),
    )?;
    let grid = PathGrid::symmetric(cfg.grid_m)?;
    let kernel_center =
        kernel_weighted_at_grid(&expansion, cfg.weight, cfg.y_center, cfg.n_ref, grid)?;
    let kernel_offsets: Vec<Vec<f64>> = cfg
        .h_values
        .iter()
        .map(|&h| {
            kernel_weighted_at_grid(&expansion, cfg.weight, cfg.y_center + h, cfg.n_ref, grid)
        })
        .collect::<Result<Vec<_>>>()?;

    let family = PathFamily::Stable(cfg.alpha);
    let exceed = par_map_replicas(cfg.replicas, |r| {
        let path = family.sample(grid, PathSeed::new(cfg.seed, r))?;
        let center = weighted_increment_sum(&kernel_center, &path);
        Ok(kernel_offsets
            .iter()
            .map(|kw| (weighted_increment_sum(kw, &path) - center).abs() > cfg.epsilon)
            .collect::<Vec<bool>>())
    })?;

    let mut probs = Vec::with_capacity(cfg.h_values.len());
    let mut probs_se = Vec::with_capacity(cfg.h_values.len());
    for i in 0..cfg.h_values.len() {
        let count = exceed.iter().filter(|flags| flags[i]).count();
        probs.push(count as f64 / cfg.replicas as f64);
        probs_se.push(binomial_se(count, cfg.replicas));
    }
    Ok(ContinuityReport {
        mode: cfg.mode,
        h_values: cfg.h_values.clone(),
        probs: Some(probs),
        probs_se: Some(probs_se),
        mc: None,
        mc_se: None,
        exact: None,
        replicas: cfg.replicas,
        seed: cfg.seed,
    })
}

fn quadratic_probe(cfg: &ContinuityConfig) -> Result<ContinuityReport> {
    let f01 = cfg.function.on_unit_interval();
    let expansion = expand(
        |t| f01.eval(t),
        f01.id(),
        BasisKind::ModifiedQ,
        cfg.params,
        cfg.n_ref,
        default_expansion_nodes(cfg.n_ref),
    )?;
    let grid = PathGrid::unit(cfg.grid_m)?;
    let kernel_center =
        kernel_weighted_at_grid(&expansion, cfg.weight, cfg.y_center, cfg.n_ref, grid)?;
    let kernel_offsets: Vec<Vec<f64>> = cfg
        .h_values
        .iter()
        .map(|&h| {
            kernel_weighted_at_grid(&expansion, cfg.weight, cfg.y_center + h, cfg.n_ref, grid)
        })
        .collect::<Result<Vec<_>>>()?;

    let family = PathFamily::Wiener;
    let squared = par_map_replicas(cfg.replicas, |r| {
        let path = family.sample(grid, PathSeed::new(cfg.seed, r))?;
        let center = weighted_increment_sum(&kernel_center, &path);
        Ok(kernel_offsets
            .iter()
            .map(|kw| {
                let d = weighted_increment_sum(kw, &path) - center;
                d * d
            })
            .collect::<Vec<f64>>())
    })?;

    let mut mc = Vec::with_capacity(cfg.h_values.len());
    let mut mc_se = Vec::with_capacity(cfg.h_values.len());
    for i in 0..cfg.h_values.len() {
        let column: Vec<f64> = squared.iter().map(|row| row[i]).collect();
        let (mean, var) = mean_and_variance(&column);
        mc.push(mean);
        mc_se.push((var / cfg.replicas as f64).sqrt());
    }

    let exact = exact_offset_errors(&expansion, cfg)?;
    Ok(ContinuityReport {
        mode: cfg.mode,
        h_values: cfg.h_values.clone(),
        probs: None,
        probs_se: None,
        mc: Some(mc),
        mc_se: Some(mc_se),
        exact: Some(exact),
        replicas: cfg.replicas,
        seed: cfg.seed,
    })
}

/// Exact `int_0^1 |(s_ref(y+h, t) - s_ref(y, t)) sigma^{(eta,tau)}(t)|^2 dt`
/// per offset; polynomial integrand, so the doubled-exponent rule is exact.
fn exact_offset_errors(expansion: &SeriesExpansion, cfg: &ContinuityConfig) -> Result<Vec<f64>> {
    let doubled = JacobiParams::new(2.0 * cfg.weight.gamma(), 2.0 * cfg.weight.delta())?;
    let rule = GaussJacobiRule::new(doubled, cfg.n_ref + 8)?.sigma_rule_unit();
    let basis = JacobiBasis::new(expansion.kind(), expansion.params(), cfg.n_ref)?;
    let at_center = basis.eval_all(cfg.y_center, cfg.n_ref)?;

    let mut out = Vec::with_capacity(cfg.h_values.len());
    let mut column = vec![0.0; cfg.n_ref + 1];
    for &h in &cfg.h_values {
        let at_offset = basis.eval_all(cfg.y_center + h, cfg.n_ref)?;
        let terms: Vec<f64> = expansion.coefficients()[..=cfg.n_ref]
            .iter()
            .enumerate()
            .map(|(k, c)| c * (at_offset[k] - at_center[k]))
            .collect();
        let mut acc = CompensatedSum::new();
        for (&node, &w) in rule.nodes().iter().zip(rule.weights()) {
            basis.eval_into(node, &mut column)?;
            let mut delta = CompensatedSum::new();
            for (t, b) in terms.iter().zip(&column) {
                delta.add(t * b);
            }
            let d = delta.value();
            acc.add(w * d * d);
        }
        out.push(acc.value());
    }
    Ok(out)
}
