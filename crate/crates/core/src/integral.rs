//! Discretized stochastic integrals of deterministic integrands against
//! sample paths, and the random Fourier-Jacobi coefficients built from them.
//!
//! Every integral is the left-endpoint Riemann-Stieltjes sum
//! `sum_i g(t_i) w(t_i) (X(t_{i+1}) - X(t_i))`, which is the Ito convention
//! in the Wiener case. Weights are `rho` on [-1, 1] paths and `sigma` on
//! [0, 1] paths, with exponents required nonnegative so no endpoint is
//! singular.

use crate::error::{Error, Result};
use crate::jacobi::{weight_rho, weight_sigma, BasisKind, JacobiBasis, JacobiParams};
use crate::numeric::CompensatedSum;
use crate::paths::{PathGrid, PathSeed, SamplePath};

/// Weight family by interval: `rho` on [-1, 1], `sigma` on [0, 1]; any
/// other interval is a domain error.
pub fn grid_weight(grid: PathGrid, params: JacobiParams, t: f64) -> Result<f64> {
    if grid.lo() == -1.0 && grid.hi() == 1.0 {
        weight_rho(params, t)
    } else if grid.lo() == 0.0 && grid.hi() == 1.0 {
        weight_sigma(params, t)
    } else {
        Err(Error::PathDomainMismatch {
            path_lo: grid.lo(),
            path_hi: grid.hi(),
            lo: -1.0,
            hi: 1.0,
        })
    }
}

fn weight_for(path: &SamplePath, params: JacobiParams, t: f64) -> Result<f64> {
    grid_weight(path.grid(), params, t)
}

fn require_nonnegative_weight(params: JacobiParams) -> Result<()> {
    if params.gamma() < 0.0 || params.delta() < 0.0 {
        return Err(Error::NegativeWeightExponent {
            eta: params.gamma(),
            tau: params.delta(),
        });
    }
    Ok(())
}

/// Left-endpoint sum of `g(t) w(t) dX` along one path realization.
pub fn integrate_path<F: Fn(f64) -> f64>(
    g: F,
    weight_params: JacobiParams,
    path: &SamplePath,
) -> Result<f64> {
    require_nonnegative_weight(weight_params)?;
    let grid = path.grid();
    let mut acc = CompensatedSum::new();
    for (i, &dx) in path.increments().iter().enumerate() {
        let t = grid.point(i);
        let gv = g(t);
        if !gv.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: t });
        }
        acc.add(gv * weight_for(path, weight_params, t)? * dx);
    }
    Ok(acc.value())
}

/// Dot product of precomputed integrand values (already including the
/// weight) at left endpoints with the path increments. The hot-loop
/// counterpart of [`integrate_path`].
pub fn weighted_increment_sum(gw_at_left: &[f64], path: &SamplePath) -> f64 {
    debug_assert_eq!(gw_at_left.len(), path.increments().len());
    let mut acc = CompensatedSum::new();
    for (&gw, &dx) in gw_at_left.iter().zip(path.increments()) {
        acc.add(gw * dx);
    }
    acc.value()
}

/// Random Fourier-Jacobi coefficients of one path realization: degree-wise
/// stochastic integrals of basis elements against the path.
#[derive(Debug, Clone)]
pub struct RandomCoefficients {
    kind: BasisKind,
    params: JacobiParams,
    weight_params: JacobiParams,
    values: Vec<f64>,
    seed: PathSeed,
    grid: PathGrid,
    alpha: f64,
}

impl RandomCoefficients {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn params(&self) -> JacobiParams {
        self.params
    }

    pub fn weight_params(&self) -> JacobiParams {
        self.weight_params
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// Provenance of the generating path.
    pub fn path_seed(&self) -> PathSeed {
        self.seed
    }

    pub fn path_grid(&self) -> PathGrid {
        self.grid
    }

    pub fn path_alpha(&self) -> f64 {
        self.alpha
    }
}

/// Computes the random coefficients for degrees `0..=n_max` in the given
/// basis family:
///
/// * `OrthonormalP`: integrals of `p_n rho^{(eta,tau)} dX` on [-1, 1],
/// * `WeightedU`:    integrals of `u_n rho^{(eta,tau)} dX` on [-1, 1],
/// * `ModifiedQ`:    integrals of `q_n sigma^{(eta,tau)} dW` on [0, 1]
///   (Wiener paths only; the quadratic-mean theory needs Gaussian noise).
pub fn random_coefficients(
    kind: BasisKind,
    params: JacobiParams,
    weight_params: JacobiParams,
    n_max: usize,
    path: &SamplePath,
) -> Result<RandomCoefficients> {
    kind.validate_params(params)?;
    require_nonnegative_weight(weight_params)?;
    let grid = path.grid();
    let (lo, hi) = kind.domain();
    if grid.lo() != lo || grid.hi() != hi {
        return Err(Error::PathDomainMismatch {
            path_lo: grid.lo(),
            path_hi: grid.hi(),
            lo,
            hi,
        });
    }
    if kind == BasisKind::ModifiedQ && !path.is_gaussian() {
        return Err(Error::NotWienerPath {
            alpha: path.alpha(),
        });
    }

    let basis = JacobiBasis::new(kind, params, n_max)?;
    let mut acc: Vec<CompensatedSum> = vec![CompensatedSum::new(); n_max + 1];
    let mut column = vec![0.0; n_max + 1];
    for (i, &dx) in path.increments().iter().enumerate() {
        let t = grid.point(i);
        let w = weight_for(path, weight_params, t)?;
        basis.eval_into(t, &mut column)?;
        let factor = w * dx;
        for (slot, &b) in acc.iter_mut().zip(&column) {
            slot.add(b * factor);
        }
    }
    let values: Vec<f64> = acc.iter().map(|a| a.value()).collect();
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteIntegrand {
            node: grid.point(bad),
        });
    }
    Ok(RandomCoefficients {
        kind,
        params,
        weight_params,
        values,
        seed: path.seed(),
        grid,
        alpha: path.alpha(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::mean_and_variance;
    use crate::paths::{sample_wiener, PathGrid, PathSeed};
    use crate::quadrature::GaussJacobiRule;

    fn p00() -> JacobiParams {
        JacobiParams::new(0.0, 0.0).unwrap()
    }

    #[test]
    fn flat_integrand_telescopes() {
        let grid = PathGrid::unit(128).unwrap();
        let path = sample_wiener(grid, PathSeed::new(3, 0));
        let total = integrate_path(|_| 1.0, p00(), &path).unwrap();
        let endpoint = *path.values().last().unwrap();
        assert!((total - endpoint).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_weight_exponents() {
        let grid = PathGrid::symmetric(8).unwrap();
        let path = sample_wiener(grid, PathSeed::new(3, 0));
        let params = JacobiParams::new(0.5, -0.5).unwrap();
        assert!(matches!(
            integrate_path(|_| 1.0, params, &path),
            Err(Error::NegativeWeightExponent { .. })
        ));
    }

    #[test]
    fn rejects_unknown_path_interval() {
        let grid = PathGrid::new(0.0, 2.0, 8).unwrap();
        let path = sample_wiener(grid, PathSeed::new(3, 0));
        assert!(matches!(
            integrate_path(|_| 1.0, p00(), &path),
            Err(Error::PathDomainMismatch { .. })
        ));
    }

    #[test]
    fn linearity_to_machine_rounding() {
        let grid = PathGrid::symmetric(512).unwrap();
        let path = sample_wiener(grid, PathSeed::new(7, 1));
        let w = JacobiParams::new(1.0, 2.0).unwrap();
        let g = |t: f64| t * t - 0.5;
        let h = |t: f64| (3.0 * t).sin();
        let lhs = integrate_path(|t| 2.5 * g(t) - 1.25 * h(t), w, &path).unwrap();
        let rhs = 2.5 * integrate_path(g, w, &path).unwrap()
            - 1.25 * integrate_path(h, w, &path).unwrap();
        let scale = lhs.abs().max(rhs.abs()).max(1e-12);
        assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn ito_isometry_flat_and_linear_integrands() {
        // E |int g dW|^2 = int g^2 dt on [0, 1]; MC over 1e4 paths.
        let grid = PathGrid::unit(256).unwrap();
        let replicas = 10_000u64;
        let mut flat = Vec::with_capacity(replicas as usize);
        let mut linear = Vec::with_capacity(replicas as usize);
        for r in 0..replicas {
            let path = sample_wiener(grid, PathSeed::new(101, r));
            flat.push(integrate_path(|_| 1.0, p00(), &path).unwrap());
            linear.push(integrate_path(|t| t, p00(), &path).unwrap());
        }
        let (_, var_flat) = mean_and_variance(&flat);
        let (_, var_linear) = mean_and_variance(&linear);
        assert!((var_flat - 1.0).abs() < 0.03, "flat variance {var_flat}");
        assert!(
            (var_linear - 1.0 / 3.0).abs() < 0.02,
            "linear variance {var_linear}"
        );
    }

    #[test]
    fn zero_path_gives_zero_coefficients() {
        let grid = PathGrid::symmetric(16).unwrap();
        let path = SamplePath::zero(grid, 2.0);
        let rc = random_coefficients(BasisKind::OrthonormalP, p00(), p00(), 5, &path).unwrap();
        assert!(rc.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_cell_path_reduces_to_one_term() {
        let grid = PathGrid::symmetric(1).unwrap();
        let path = SamplePath::from_increments(grid, vec![0.37], 2.0).unwrap();
        let params = JacobiParams::new(0.3, 0.9).unwrap();
        let weight = JacobiParams::new(1.0, 2.0).unwrap();
        let rc =
            random_coefficients(BasisKind::OrthonormalP, params, weight, 3, &path).unwrap();
        let basis = JacobiBasis::new(BasisKind::OrthonormalP, params, 3).unwrap();
        for n in 0..=3usize {
            let want = basis.eval(n, -1.0).unwrap() * weight_rho(weight, -1.0).unwrap() * 0.37;
            assert!((rc.values()[n] - want).abs() < 1e-14, "degree {n}");
        }
    }

    #[test]
    fn wiener_coefficients_orthonormal_covariance() {
        // (gamma,delta) = (eta,tau) = (0,0): A_0, A_1 have unit variance and
        // vanishing covariance by the isometry + orthonormality oracle.
        let grid = PathGrid::symmetric(256).unwrap();
        let replicas = 10_000u64;
        let mut a0 = Vec::with_capacity(replicas as usize);
        let mut a1 = Vec::with_capacity(replicas as usize);
        for r in 0..replicas {
            let path = sample_wiener(grid, PathSeed::new(202, r));
            let rc =
                random_coefficients(BasisKind::OrthonormalP, p00(), p00(), 1, &path).unwrap();
            a0.push(rc.values()[0]);
            a1.push(rc.values()[1]);
        }
        let (m0, v0) = mean_and_variance(&a0);
        let (m1, v1) = mean_and_variance(&a1);
        let cov = a0
            .iter()
            .zip(&a1)
            .map(|(x, y)| (x - m0) * (y - m1))
            .sum::<f64>()
            / (replicas as f64 - 1.0);
        assert!((v0 - 1.0).abs() < 0.05, "var A_0 = {v0}");
        assert!((v1 - 1.0).abs() < 0.05, "var A_1 = {v1}");
        assert!(cov.abs() < 0.03, "cov(A_0, A_1) = {cov}");
    }

    #[test]
    fn weighted_coefficients_match_quadrature_variance() {
        // Var B_n = int_{-1}^{1} (u_n rho^{(eta,tau)})^2 dt, via a plain
        // Legendre rule as the isometry oracle (rho is folded into the
        // integrand, so this route is independent of the weighted rule).
        let half = JacobiParams::half_pair();
        let weight = JacobiParams::new(1.0, 0.5).unwrap();
        let basis = JacobiBasis::new(BasisKind::WeightedU, half, 2).unwrap();
        let legendre = GaussJacobiRule::new(p00(), 200).unwrap();
        let want = legendre
            .integrate(|t| {
                let v = basis.eval(2, t).unwrap() * weight_rho(weight, t).unwrap();
                v * v
            })
            .unwrap();
        let grid = PathGrid::symmetric(256).unwrap();
        let replicas = 10_000u64;
        let mut b2 = Vec::with_capacity(replicas as usize);
        for r in 0..replicas {
            let path = sample_wiener(grid, PathSeed::new(505, r));
            let rc = random_coefficients(BasisKind::WeightedU, half, weight, 2, &path).unwrap();
            b2.push(rc.values()[2]);
        }
        let (_, var) = mean_and_variance(&b2);
        let se = want * (2.0 / (replicas as f64 - 1.0)).sqrt();
        assert!(
            (var - want).abs() <= 3.0 * se,
            "var B_2 = {var}, oracle {want}, se {se}"
        );
    }

    #[test]
    fn modified_coefficients_match_quadrature_variance() {
        // Var C_n = int_0^1 (q_n sigma^{(eta,tau)})^2 dt, computed by
        // Gauss-Jacobi quadrature as the isometry oracle.
        let grid = PathGrid::unit(256).unwrap();
        let replicas = 10_000u64;
        let weight = JacobiParams::new(1.0, 1.0).unwrap();
        let basis = JacobiBasis::new(BasisKind::ModifiedQ, p00(), 0).unwrap();
        // The (0,0) sigma rule integrates against the flat weight, so this
        // is exactly int_0^1 (q_0 sigma^{(1,1)})^2 dt.
        let oracle_rule = GaussJacobiRule::new(p00(), 40).unwrap().sigma_rule_unit();
        let want = oracle_rule
            .integrate(|t| {
                let q0 = basis.eval(0, t).unwrap();
                let s = weight_sigma(weight, t).unwrap();
                q0 * q0 * s * s
            })
            .unwrap();
        let mut c0 = Vec::with_capacity(replicas as usize);
        for r in 0..replicas {
            let path = sample_wiener(grid, PathSeed::new(303, r));
            let rc = random_coefficients(BasisKind::ModifiedQ, p00(), weight, 0, &path).unwrap();
            c0.push(rc.values()[0]);
        }
        let (_, var) = mean_and_variance(&c0);
        assert!(
            (var - want).abs() < 0.05 * want.max(0.01),
            "var C_0 = {var}, oracle {want}"
        );
    }

    #[test]
    fn modified_coefficients_uncorrelated_with_half_variance() {
        // With (0,0) everywhere the q_n are orthogonal on [0,1] with squared
        // norm 1/2, so C_m, C_n decorrelate and Var C_n = 1/2.
        let grid = PathGrid::unit(256).unwrap();
        let replicas = 10_000u64;
        let mut c1 = Vec::with_capacity(replicas as usize);
        let mut c2 = Vec::with_capacity(replicas as usize);
        for r in 0..replicas {
            let path = sample_wiener(grid, PathSeed::new(404, r));
            let rc = random_coefficients(BasisKind::ModifiedQ, p00(), p00(), 2, &path).unwrap();
            c1.push(rc.values()[1]);
            c2.push(rc.values()[2]);
        }
        let (m1, v1) = mean_and_variance(&c1);
        let (m2, v2) = mean_and_variance(&c2);
        let cov = c1
            .iter()
            .zip(&c2)
            .map(|(x, y)| (x - m1) * (y - m2))
            .sum::<f64>()
            / (replicas as f64 - 1.0);
        assert!((v1 - 0.5).abs() < 0.03, "var C_1 = {v1}");
        assert!((v2 - 0.5).abs() < 0.03, "var C_2 = {v2}");
        assert!(cov.abs() < 0.02, "cov = {cov}");
    }

    #[test]
    fn modified_basis_requires_wiener_path() {
        let grid = PathGrid::unit(8).unwrap();
        let path = crate::paths::sample_stable(grid, 1.5, PathSeed::new(1, 0)).unwrap();
        assert!(matches!(
            random_coefficients(BasisKind::ModifiedQ, p00(), p00(), 2, &path),
            Err(Error::NotWienerPath { .. })
        ));
    }

    #[test]
    fn basis_and_path_domain_must_agree() {
        let grid = PathGrid::unit(8).unwrap();
        let path = sample_wiener(grid, PathSeed::new(1, 0));
        assert!(matches!(
            random_coefficients(BasisKind::OrthonormalP, p00(), p00(), 2, &path),
            Err(Error::PathDomainMismatch { .. })
        ));
    }
}
