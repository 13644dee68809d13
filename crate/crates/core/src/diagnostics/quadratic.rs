//! Quadratic-mean experiments on [0, 1] Wiener paths: the Monte Carlo
//! second moment of |T_n - I| side by side with its exact quadrature value,
//! plus the plain isometry check used to calibrate the whole chain.

use super::{
    m_stability_median, par_map_replicas, ConvergenceReport, PathFamily, ReportMode,
};
use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::integral::{random_coefficients, weighted_increment_sum};
use crate::jacobi::{weight_sigma, BasisKind, JacobiBasis, JacobiParams};
use crate::numeric::{mean_and_variance, CompensatedSum};
use crate::paths::{sample_wiener, PathGrid, PathSeed};
use crate::quadrature::{default_expansion_nodes, expand, GaussJacobiRule, SeriesExpansion};
use crate::series::{kernel_weighted_at_grid, PartialSumPlan, SeriesVariant};

/// Configuration of one quadratic-mean experiment.
#[derive(Debug, Clone)]
pub struct QmConfig {
    /// Catalog entry; evaluated on [0, 1] through the affine pullback.
    pub function: TestFunction,
    pub params: JacobiParams,
    pub weight: JacobiParams,
    pub y: f64,
    pub n_values: Vec<usize>,
    pub replicas: usize,
    pub grid_m: usize,
    pub n_ref: usize,
    pub seed: u64,
}

impl QmConfig {
    fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.n_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig {
                context: "n_values must be nonempty and strictly increasing".into(),
            });
        }
        if self.replicas < 2 {
            return Err(Error::InvalidConfig {
                context: "quadratic mode needs at least 2 replicas".into(),
            });
        }
        let max_n = *self.n_values.last().unwrap();
        if self.n_ref <= max_n {
            return Err(Error::InvalidConfig {
                context: format!(
                    "reference truncation N_ref = {} must exceed the largest tested degree {}",
                    self.n_ref, max_n
                ),
            });
        }
        if !(0.0..=1.0).contains(&self.y) {
            return Err(Error::OutOfDomain {
                point: self.y,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(())
    }
}

/// Monte Carlo E|T_n - I|^2 and the exact squared-error integral per degree.
pub fn qm_error(cfg: &QmConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let max_n = *cfg.n_values.last().unwrap();
    let f01 = cfg.function.on_unit_interval();
    let expansion = expand(
        |t| f01.eval(t),
        f01.id(),
        BasisKind::ModifiedQ,
        cfg.params,
        cfg.n_ref,
        default_expansion_nodes(cfg.n_ref),
    )?;
    let plan = PartialSumPlan::new(&expansion, cfg.y)?;
    let grid = PathGrid::unit(cfg.grid_m)?;
    let kernel_ref = kernel_weighted_at_grid(&expansion, cfg.weight, cfg.y, cfg.n_ref, grid)?;

    let squared = par_map_replicas(cfg.replicas, |r| {
        let path = sample_wiener(grid, PathSeed::new(cfg.seed, r));
        let rc =
            random_coefficients(BasisKind::ModifiedQ, cfg.params, cfg.weight, max_n, &path)?;
        let prefix = plan.prefix_values(&rc, max_n)?;
        let reference = weighted_increment_sum(&kernel_ref, &path);
        Ok(cfg
            .n_values
            .iter()
            .map(|&n| {
                let d = prefix[n] - reference;
                d * d
            })
            .collect::<Vec<f64>>())
    })?;

    let mut qm_mc = Vec::with_capacity(cfg.n_values.len());
    let mut qm_se = Vec::with_capacity(cfg.n_values.len());
    for i in 0..cfg.n_values.len() {
        let column: Vec<f64> = squared.iter().map(|row| row[i]).collect();
        let (mean, var) = mean_and_variance(&column);
        qm_mc.push(mean);
        qm_se.push((var / cfg.replicas as f64).sqrt());
    }

    let qm_exact = exact_squared_errors(&expansion, cfg.weight, cfg.y, &cfg.n_values, cfg.n_ref)?;
    let m_stability = m_stability_median(
        &expansion,
        cfg.weight,
        cfg.y,
        cfg.n_ref,
        grid,
        PathFamily::Wiener,
        cfg.seed,
    )?;

    Ok(ConvergenceReport {
        variant: SeriesVariant::Modified,
        mode: ReportMode::QuadraticMean,
        n_values: cfg.n_values.clone(),
        epsilon: None,
        tail_probs: None,
        tail_se: None,
        bound_integrals: None,
        qm_errors_mc: Some(qm_mc),
        qm_errors_mc_se: Some(qm_se),
        qm_errors_exact: Some(qm_exact),
        replicas: cfg.replicas,
        seed: cfg.seed,
        grid_m: cfg.grid_m,
        n_ref: cfg.n_ref,
        m_stability,
    })
}

/// Exact values of `int_0^1 |(s_ref - s_n)(y, t) sigma^{(eta,tau)}(t)|^2 dt`
/// per tested degree. The integrand is a polynomial times
/// `sigma^{(2 eta, 2 tau)}`, so a rule with doubled exponents and more than
/// `n_ref` nodes integrates it exactly.
fn exact_squared_errors(
    expansion: &SeriesExpansion,
    weight: JacobiParams,
    y: f64,
    n_values: &[usize],
    n_ref: usize,
) -> Result<Vec<f64>> {
    let doubled = JacobiParams::new(2.0 * weight.gamma(), 2.0 * weight.delta())?;
    let rule = GaussJacobiRule::new(doubled, n_ref + 8)?.sigma_rule_unit();
    let basis = JacobiBasis::new(expansion.kind(), expansion.params(), n_ref)?;
    let at_y = basis.eval_all(y, n_ref)?;
    let terms: Vec<f64> = expansion.coefficients()[..=n_ref]
        .iter()
        .zip(&at_y)
        .map(|(c, p)| c * p)
        .collect();

    let mut acc = vec![CompensatedSum::new(); n_values.len()];
    let mut column = vec![0.0; n_ref + 1];
    for (&node, &w) in rule.nodes().iter().zip(rule.weights()) {
        basis.eval_into(node, &mut column)?;
        let mut suffix = CompensatedSum::new();
        let mut pending = n_values.len();
        let mut deltas = vec![0.0; n_values.len()];
        for k in (0..=n_ref).rev() {
            while pending > 0 && n_values[pending - 1] == k {
                pending -= 1;
                deltas[pending] = suffix.value();
            }
            suffix.add(terms[k] * column[k]);
        }
        for (slot, &d) in acc.iter_mut().zip(&deltas) {
            slot.add(w * d * d);
        }
    }
    Ok(acc.iter().map(|a| a.value()).collect())
}

/// One row of the isometry calibration: Monte Carlo variance of
/// `int g sigma^{(eta,tau)} dW` against the quadrature value of
/// `int (g sigma)^2 dt`.
#[derive(Debug, Clone)]
pub struct IsometryCheck {
    pub integrand: String,
    pub mc_variance: f64,
    /// Standard error of the Monte Carlo variance estimate.
    pub se: f64,
    pub exact: f64,
    pub z: f64,
}

impl IsometryCheck {
    pub fn within(&self, z_bound: f64) -> bool {
        self.z.abs() <= z_bound
    }

    pub fn csv_header() -> &'static str {
        "integrand,mc_variance,se,exact,z"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.integrand, self.mc_variance, self.se, self.exact, self.z
        )
    }
}

/// Runs the isometry check for one integrand on [0, 1] Wiener paths.
pub fn isometry_check(
    g: &TestFunction,
    weight: JacobiParams,
    grid_m: usize,
    replicas: usize,
    seed: u64,
) -> Result<IsometryCheck> {
    if replicas < 2 {
        return Err(Error::InvalidConfig {
            context: "isometry check needs at least 2 replicas".into(),
        });
    }
    let g01 = if g.domain() == (0.0, 1.0) {
        *g
    } else {
        g.on_unit_interval()
    };
    let grid = PathGrid::unit(grid_m)?;
    let gw: Vec<f64> = (0..grid_m)
        .map(|i| {
            let t = grid.point(i);
            Ok(g01.eval(t) * weight_sigma(weight, t)?)
        })
        .collect::<Result<Vec<f64>>>()?;

    let integrals = par_map_replicas(replicas, |r| {
        let path = sample_wiener(grid, PathSeed::new(seed, r));
        Ok(weighted_increment_sum(&gw, &path))
    })?;
    let (_, mc_variance) = mean_and_variance(&integrals);

    // exact: int_0^1 g^2 sigma^{(2 eta, 2 tau)} dt by an oversampled rule
    let doubled = JacobiParams::new(2.0 * weight.gamma(), 2.0 * weight.delta())?;
    let rule = GaussJacobiRule::new(doubled, 400)?.sigma_rule_unit();
    let exact = rule.integrate(|t| {
        let v = g01.eval(t);
        v * v
    })?;

    // Var(I^2-style statistic): for Gaussian I, SE of the sample variance
    // is var * sqrt(2 / (R - 1)).
    let se = mc_variance * (2.0 / (replicas as f64 - 1.0)).sqrt();
    let z = if se > 0.0 {
        (mc_variance - exact) / se
    } else {
        0.0
    };
    Ok(IsometryCheck {
        integrand: g.id().to_string(),
        mc_variance,
        se,
        exact,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::lookup;

    fn p00() -> JacobiParams {
        JacobiParams::new(0.0, 0.0).unwrap()
    }

    fn base_config() -> QmConfig {
        QmConfig {
            function: lookup("abs_pow_3_2").unwrap(),
            params: p00(),
            weight: p00(),
            y: 0.3,
            n_values: vec![4, 8, 16],
            replicas: 600,
            grid_m: 512,
            n_ref: 64,
            seed: 9001,
        }
    }

    #[test]
    fn polynomial_error_tracks_vanish_beyond_degree() {
        let mut cfg = base_config();
        cfg.function = lookup("poly3").unwrap();
        cfg.n_values = vec![3, 6];
        cfg.n_ref = 12;
        cfg.replicas = 100;
        cfg.grid_m = 128;
        let report = qm_error(&cfg).unwrap();
        for &v in report.qm_errors_mc.as_ref().unwrap() {
            assert!(v < 1e-24, "MC track {v}");
        }
        for &v in report.qm_errors_exact.as_ref().unwrap() {
            assert!(v < 1e-24, "exact track {v}");
        }
    }

    #[test]
    fn mc_track_matches_exact_track_within_three_se() {
        let report = qm_error(&base_config()).unwrap();
        let z = report.qm_worst_z().unwrap();
        assert!(z <= 3.0, "worst z = {z}");
    }

    #[test]
    fn exact_track_is_strictly_decreasing() {
        let report = qm_error(&base_config()).unwrap();
        assert!(
            report.qm_exact_strictly_decreasing(),
            "exact {:?}",
            report.qm_errors_exact
        );
    }

    #[test]
    fn exact_track_matches_orthonormality_route_for_flat_weight() {
        // With (0,0) everywhere the squared error collapses to
        // (1/2) sum_{k>n} (c_k q_k(y))^2 because <q_j, q_k> = delta/2 on [0,1].
        let cfg = base_config();
        let f01 = cfg.function.on_unit_interval();
        let expansion = expand(
            |t| f01.eval(t),
            "f",
            BasisKind::ModifiedQ,
            cfg.params,
            cfg.n_ref,
            default_expansion_nodes(cfg.n_ref),
        )
        .unwrap();
        let basis = JacobiBasis::new(BasisKind::ModifiedQ, cfg.params, cfg.n_ref).unwrap();
        let at_y = basis.eval_all(cfg.y, cfg.n_ref).unwrap();
        let exact =
            exact_squared_errors(&expansion, cfg.weight, cfg.y, &cfg.n_values, cfg.n_ref)
                .unwrap();
        for (idx, &n) in cfg.n_values.iter().enumerate() {
            let oracle: f64 = (n + 1..=cfg.n_ref)
                .map(|k| {
                    let t = expansion.coefficients()[k] * at_y[k];
                    0.5 * t * t
                })
                .sum();
            assert!(
                (exact[idx] - oracle).abs() <= 1e-12 * oracle.max(1e-15),
                "n = {n}: exact {} vs orthonormality oracle {oracle}",
                exact[idx]
            );
        }
    }

    #[test]
    fn isometry_check_flat_integrand() {
        let row = isometry_check(&lookup("poly0").unwrap(), p00(), 256, 10_000, 4242).unwrap();
        assert!((row.exact - 1.0).abs() < 1e-12);
        assert!((row.mc_variance - 1.0).abs() < 0.03, "{}", row.mc_variance);
        assert!(row.within(3.0), "z = {}", row.z);
    }

    #[test]
    fn isometry_check_weighted_integrand() {
        let weight = JacobiParams::new(1.0, 1.0).unwrap();
        let row = isometry_check(&lookup("poly1").unwrap(), weight, 256, 10_000, 4243).unwrap();
        assert!(row.within(3.0), "z = {}", row.z);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = base_config();
        cfg.n_ref = 16;
        assert!(qm_error(&cfg).is_err());
        let mut cfg = base_config();
        cfg.y = 1.5;
        assert!(qm_error(&cfg).is_err());
    }
}
