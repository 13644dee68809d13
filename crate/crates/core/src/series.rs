//! Random Fourier-Jacobi partial sums, the degree-n kernels appearing in
//! every convergence argument, and the truncated reference limit.
//!
//! The central exact identity, which holds termwise on the discretized
//! path: the partial sum `sum_{k<=n} d_k R_k phi_k(y)` equals the path
//! integral of the kernel `sum_{k<=n} d_k phi_k(y) phi_k(t)` against the
//! same weight and the same increments. Convergence experiments always
//! couple both sides on one path realization.

use crate::error::{Error, Result};
use crate::integral::{grid_weight, weighted_increment_sum, RandomCoefficients};
use crate::jacobi::{BasisKind, JacobiBasis, JacobiParams};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::paths::{PathGrid, PathSeed, SamplePath};
use crate::quadrature::SeriesExpansion;

/// Declared tolerance for the reference-truncation self-consistency check
/// (doubling the truncation moves the reference by less than this).
pub const REFERENCE_TRUNCATION_TOLERANCE: f64 = 1e-4;

/// Which of the three series shapes an evaluation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVariant {
    /// `sum a_k A_k p_k` on [-1, 1].
    Plain,
    /// `sum b_k B_k u_k` on [-1, 1].
    Weighted,
    /// `sum c_k C_k q_k` on [0, 1].
    Modified,
}

impl SeriesVariant {
    pub fn from_basis(kind: BasisKind) -> Self {
        match kind {
            BasisKind::OrthonormalP => SeriesVariant::Plain,
            BasisKind::WeightedU => SeriesVariant::Weighted,
            BasisKind::ModifiedQ => SeriesVariant::Modified,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SeriesVariant::Plain => "S",
            SeriesVariant::Weighted => "S_weighted",
            SeriesVariant::Modified => "T",
        }
    }
}

fn check_compatible(expansion: &SeriesExpansion, rc: &RandomCoefficients) -> Result<()> {
    if expansion.kind() != rc.kind() || expansion.params() != rc.params() {
        return Err(Error::BasisMismatch {
            context: format!(
                "expansion in {} with ({}, {}) paired with coefficients in {} with ({}, {})",
                expansion.kind().label(),
                expansion.params().gamma(),
                expansion.params().delta(),
                rc.kind().label(),
                rc.params().gamma(),
                rc.params().delta()
            ),
        });
    }
    Ok(())
}

/// Kernel value `sum_{k<=n} d_k phi_k(y) phi_k(t)`.
pub fn kernel(expansion: &SeriesExpansion, n: usize, y: f64, t: f64) -> Result<f64> {
    if n > expansion.n_max() {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            n_max: expansion.n_max(),
        });
    }
    let basis = JacobiBasis::new(expansion.kind(), expansion.params(), n)?;
    let at_y = basis.eval_all(y, n)?;
    let at_t = basis.eval_all(t, n)?;
    Ok(compensated_sum(
        expansion
            .coefficients()
            .iter()
            .zip(at_y.iter().zip(&at_t))
            .map(|(c, (py, pt))| c * py * pt),
    ))
}

/// Partial sum `sum_{k<=n} d_k R_k phi_k(y)` of the random series.
pub fn partial_sum(
    expansion: &SeriesExpansion,
    coeffs: &RandomCoefficients,
    n: usize,
    y: f64,
) -> Result<f64> {
    let plan = PartialSumPlan::new(expansion, y)?;
    plan.value(coeffs, n)
}

/// Precomputed `d_k phi_k(y)` factors for one evaluation point, so that
/// sweeping degrees or replicas costs one multiply-add per term.
#[derive(Debug, Clone)]
pub struct PartialSumPlan {
    kind: BasisKind,
    params: JacobiParams,
    terms_at_y: Vec<f64>,
}

impl PartialSumPlan {
    pub fn new(expansion: &SeriesExpansion, y: f64) -> Result<Self> {
        let n_max = expansion.n_max();
        let basis = JacobiBasis::new(expansion.kind(), expansion.params(), n_max)?;
        let at_y = basis.eval_all(y, n_max)?;
        Ok(Self {
            kind: expansion.kind(),
            params: expansion.params(),
            terms_at_y: expansion
                .coefficients()
                .iter()
                .zip(&at_y)
                .map(|(c, p)| c * p)
                .collect(),
        })
    }

    pub fn n_max(&self) -> usize {
        self.terms_at_y.len() - 1
    }

    fn check(&self, coeffs: &RandomCoefficients, n: usize) -> Result<()> {
        if self.kind != coeffs.kind() || self.params != coeffs.params() {
            return Err(Error::BasisMismatch {
                context: format!(
                    "plan in {} paired with coefficients in {}",
                    self.kind.label(),
                    coeffs.kind().label()
                ),
            });
        }
        if n > self.n_max() || n > coeffs.n_max() {
            return Err(Error::DegreeOutOfRange {
                degree: n,
                n_max: self.n_max().min(coeffs.n_max()),
            });
        }
        Ok(())
    }

    /// `S_n` for a single degree.
    pub fn value(&self, coeffs: &RandomCoefficients, n: usize) -> Result<f64> {
        self.check(coeffs, n)?;
        Ok(compensated_sum(
            self.terms_at_y[..=n]
                .iter()
                .zip(coeffs.values())
                .map(|(t, r)| t * r),
        ))
    }

    /// Prefix values `S_0, ..., S_n` in one sweep.
    pub fn prefix_values(&self, coeffs: &RandomCoefficients, n: usize) -> Result<Vec<f64>> {
        self.check(coeffs, n)?;
        let mut acc = CompensatedSum::new();
        let mut out = Vec::with_capacity(n + 1);
        for (t, r) in self.terms_at_y[..=n].iter().zip(coeffs.values()) {
            acc.add(t * r);
            out.push(acc.value());
        }
        Ok(out)
    }
}

/// Kernel values times the path weight at the left endpoints of `grid`:
/// the precomputable, path-independent part of a reference integral.
pub fn kernel_weighted_at_grid(
    expansion: &SeriesExpansion,
    weight_params: JacobiParams,
    y: f64,
    n: usize,
    grid: PathGrid,
) -> Result<Vec<f64>> {
    if n > expansion.n_max() {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            n_max: expansion.n_max(),
        });
    }
    let basis = JacobiBasis::new(expansion.kind(), expansion.params(), n)?;
    let at_y = basis.eval_all(y, n)?;
    let terms: Vec<f64> = expansion.coefficients()[..=n]
        .iter()
        .zip(&at_y)
        .map(|(c, p)| c * p)
        .collect();
    let mut column = vec![0.0; n + 1];
    let mut out = Vec::with_capacity(grid.increments());
    for i in 0..grid.increments() {
        let t = grid.point(i);
        basis.eval_into(t, &mut column)?;
        let k = compensated_sum(terms.iter().zip(&column).map(|(a, b)| a * b));
        out.push(k * grid_weight(grid, weight_params, t)?);
    }
    Ok(out)
}

/// The reference limit: the path integral of the degree-`n_ref` kernel on
/// the same realization, standing in for the series' limiting stochastic
/// integral. `n_ref` should comfortably exceed every degree under test.
pub fn reference_limit(
    expansion: &SeriesExpansion,
    weight_params: JacobiParams,
    y: f64,
    path: &SamplePath,
    n_ref: usize,
) -> Result<f64> {
    let gw = kernel_weighted_at_grid(expansion, weight_params, y, n_ref, path.grid())?;
    Ok(weighted_increment_sum(&gw, path))
}

/// A partial sum evaluated over a y-grid on one path realization.
#[derive(Debug, Clone)]
pub struct PartialSumEvaluation {
    pub variant: SeriesVariant,
    pub n: usize,
    pub y_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub path_seed: PathSeed,
}

/// Evaluates `S_n` over a grid of y values on one path.
pub fn evaluate_on_grid(
    expansion: &SeriesExpansion,
    coeffs: &RandomCoefficients,
    n: usize,
    y_grid: &[f64],
) -> Result<PartialSumEvaluation> {
    check_compatible(expansion, coeffs)?;
    let values = y_grid
        .iter()
        .map(|&y| partial_sum(expansion, coeffs, n, y))
        .collect::<Result<Vec<f64>>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteIntegrand { node: f64::NAN });
    }
    Ok(PartialSumEvaluation {
        variant: SeriesVariant::from_basis(expansion.kind()),
        n,
        y_grid: y_grid.to_vec(),
        values,
        path_seed: coeffs.path_seed(),
    })
}
