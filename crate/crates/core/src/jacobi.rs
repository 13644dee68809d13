//! Jacobi polynomial families and weights.
//!
//! Three related bases are provided:
//!
//! * `p_n` - Jacobi polynomials on [-1, 1], orthonormal under the weight
//!   `rho(y) = (1-y)^gamma (1+y)^delta`,
//! * `u_n` - the weighted variant for the fixed pair (1/2, -1/2), i.e.
//!   `p_n` scaled degreewise by `[(2n+1) n!^2 / (2 Gamma(n+3/2) Gamma(n+1/2))]^{1/2}`,
//! * `q_n` - the [0, 1] family `q_n(t) = p_n(2t - 1)`.
//!
//! Evaluation runs the classical three-term recurrence and rescales by the
//! square-rooted norm `h_n`; all gamma factors go through `ln_gamma` so the
//! norms stay finite at high degree.

use crate::error::{Error, Result};
use crate::gamma::ln_gamma;

/// Exponent pair (gamma, delta) selecting a Jacobi family or weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    gamma: f64,
    delta: f64,
}

impl JacobiParams {
    /// Requires gamma > -1 and delta > -1.
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma.is_finite() && delta.is_finite() && gamma > -1.0 && delta > -1.0) {
            return Err(Error::InvalidJacobiParams { gamma, delta });
        }
        Ok(Self { gamma, delta })
    }

    /// The fixed pair (1/2, -1/2) used by the weighted basis.
    pub fn half_pair() -> Self {
        Self {
            gamma: 0.5,
            delta: -0.5,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn is_half_pair(&self) -> bool {
        self.gamma == 0.5 && self.delta == -0.5
    }
}

/// Which of the three polynomial families a computation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Orthonormal `p_n` on [-1, 1].
    OrthonormalP,
    /// Weighted `u_n`, only valid with parameters (1/2, -1/2).
    WeightedU,
    /// `q_n(t) = p_n(2t - 1)` on [0, 1].
    ModifiedQ,
}

impl BasisKind {
    /// Evaluation interval of the family.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            BasisKind::ModifiedQ => (0.0, 1.0),
            _ => (-1.0, 1.0),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BasisKind::OrthonormalP => "orthonormal_p",
            BasisKind::WeightedU => "weighted_u",
            BasisKind::ModifiedQ => "modified_q",
        }
    }

    /// Checks that `params` is admissible for this family.
    pub fn validate_params(&self, params: JacobiParams) -> Result<()> {
        if *self == BasisKind::WeightedU && !params.is_half_pair() {
            return Err(Error::WeightedBasisParams {
                gamma: params.gamma(),
                delta: params.delta(),
            });
        }
        Ok(())
    }
}

/// Per-degree coefficients of the classical recurrence
/// `P_k = (a_k y + b_k) P_{k-1} - c_k P_{k-2}`.
#[derive(Debug, Clone, Copy)]
struct StepCoeffs {
    a: f64,
    b: f64,
    c: f64,
}

/// Precomputed recurrence coefficients and norms for degrees 0..=n_max.
///
/// Shared by every evaluator and by the Gauss-Jacobi rule construction; the
/// table is immutable after construction and safe to use across threads.
#[derive(Debug, Clone)]
pub struct RecurrenceTable {
    params: JacobiParams,
    steps: Vec<StepCoeffs>,
    ln_norms: Vec<f64>,
    inv_sqrt_norms: Vec<f64>,
}

impl RecurrenceTable {
    pub fn new(params: JacobiParams, n_max: usize) -> Result<Self> {
        let g = params.gamma();
        let d = params.delta();
        let s = g + d;

        let mut steps = Vec::with_capacity(n_max);
        for k in 1..=n_max {
            let kf = k as f64;
            if k == 1 {
                steps.push(StepCoeffs {
                    a: 0.5 * (s + 2.0),
                    b: 0.5 * (g - d),
                    c: 0.0,
                });
            } else {
                let two_k_s = 2.0 * kf + s;
                let denom = 2.0 * kf * (kf + s) * (two_k_s - 2.0);
                steps.push(StepCoeffs {
                    a: (two_k_s - 1.0) * two_k_s * (two_k_s - 2.0) / denom,
                    b: (two_k_s - 1.0) * (g * g - d * d) / denom,
                    c: 2.0 * (kf + g - 1.0) * (kf + d - 1.0) * two_k_s / denom,
                });
            }
        }

        let mut ln_norms = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            ln_norms.push(ln_norm(params, n)?);
        }
        debug_assert!(ln_norms.iter().all(|v| v.is_finite()));
        let inv_sqrt_norms = ln_norms.iter().map(|h| (-0.5 * h).exp()).collect();

        Ok(Self {
            params,
            steps,
            ln_norms,
            inv_sqrt_norms,
        })
    }

    pub fn params(&self) -> JacobiParams {
        self.params
    }

    /// Largest tabulated degree.
    pub fn n_max(&self) -> usize {
        self.ln_norms.len() - 1
    }

    /// Squared norm `h_n` of the classical polynomial under the rho weight.
    pub fn norm(&self, n: usize) -> Result<f64> {
        self.check_degree(n)?;
        Ok(self.ln_norms[n].exp())
    }

    pub fn ln_norm(&self, n: usize) -> Result<f64> {
        self.check_degree(n)?;
        Ok(self.ln_norms[n])
    }

    /// Recurrence triple (a_k, b_k, c_k) of
    /// `P_k = (a_k y + b_k) P_{k-1} - c_k P_{k-2}` for `degree` in
    /// `1..=n_max`; feeds the Golub-Welsch tridiagonal and test oracles.
    pub(crate) fn step(&self, degree: usize) -> (f64, f64, f64) {
        let s = self.steps[degree - 1];
        (s.a, s.b, s.c)
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            return Err(Error::DegreeOutOfRange {
                degree: n,
                n_max: self.n_max(),
            });
        }
        Ok(())
    }

    fn check_point(&self, y: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&y) {
            return Err(Error::OutOfDomain {
                point: y,
                lo: -1.0,
                hi: 1.0,
            });
        }
        Ok(())
    }

    /// Classical (unnormalized) values `P_0(y), ..., P_m(y)` for `m = out.len() - 1`.
    fn eval_classical_into(&self, y: f64, out: &mut [f64]) {
        debug_assert!(out.len() <= self.ln_norms.len());
        if out.is_empty() {
            return;
        }
        out[0] = 1.0;
        let mut prev2 = 0.0;
        let mut prev = 1.0;
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            let StepCoeffs { a, b, c } = self.steps[k - 1];
            let next = (a * y + b) * prev - c * prev2;
            *slot = next;
            prev2 = prev;
            prev = next;
        }
    }

    /// Orthonormal value `p_n(y)`.
    pub fn eval_orthonormal(&self, n: usize, y: f64) -> Result<f64> {
        self.check_degree(n)?;
        self.check_point(y)?;
        let mut vals = vec![0.0; n + 1];
        self.eval_classical_into(y, &mut vals);
        Ok(vals[n] * self.inv_sqrt_norms[n])
    }

    /// Orthonormal values `p_0(y), ..., p_m(y)` with `m = out.len() - 1`.
    pub fn eval_orthonormal_into(&self, y: f64, out: &mut [f64]) -> Result<()> {
        if out.len() > self.ln_norms.len() {
            return Err(Error::DegreeOutOfRange {
                degree: out.len() - 1,
                n_max: self.n_max(),
            });
        }
        self.check_point(y)?;
        self.eval_classical_into(y, out);
        for (v, s) in out.iter_mut().zip(&self.inv_sqrt_norms) {
            *v *= s;
        }
        Ok(())
    }

    /// Prefactor turning `p_n^{(1/2,-1/2)}` into the weighted `u_n`.
    ///
    /// Equals `[(2n+1) Gamma(n+1)^2 / (2 Gamma(n+3/2) Gamma(n+1/2))]^{1/2}`,
    /// which for this parameter pair collapses to `h_n^{-1/2}`.
    pub fn weighted_prefactor(&self, n: usize) -> Result<f64> {
        if !self.params.is_half_pair() {
            return Err(Error::WeightedBasisParams {
                gamma: self.params.gamma(),
                delta: self.params.delta(),
            });
        }
        self.check_degree(n)?;
        Ok(self.inv_sqrt_norms[n])
    }
}

/// ln h_n with h_n = 2^{g+d+1} Gamma(n+g+1) Gamma(n+d+1)
///                   / [(2n+g+d+1) Gamma(n+g+d+1) n!].
///
/// The n = 0 case folds (g+d+1) Gamma(g+d+1) into Gamma(g+d+2), which stays
/// regular when g + d + 1 crosses zero.
fn ln_norm(params: JacobiParams, n: usize) -> Result<f64> {
    let g = params.gamma();
    let d = params.delta();
    let s = g + d;
    let nf = n as f64;
    let base = (s + 1.0) * std::f64::consts::LN_2 + ln_gamma(nf + g + 1.0)?
        + ln_gamma(nf + d + 1.0)?
        - ln_gamma(nf + 1.0)?;
    if n == 0 {
        Ok(base - ln_gamma(s + 2.0)?)
    } else {
        Ok(base - (2.0 * nf + s + 1.0).ln() - ln_gamma(nf + s + 1.0)?)
    }
}

/// A basis family bound to its recurrence table, evaluating any of the three
/// variants with the right domain checks.
#[derive(Debug, Clone)]
pub struct JacobiBasis {
    kind: BasisKind,
    table: RecurrenceTable,
    /// Degreewise scale applied after orthonormal evaluation (1 except for u).
    scales: Vec<f64>,
}

impl JacobiBasis {
    pub fn new(kind: BasisKind, params: JacobiParams, n_max: usize) -> Result<Self> {
        kind.validate_params(params)?;
        let table = RecurrenceTable::new(params, n_max)?;
        let scales = match kind {
            BasisKind::WeightedU => (0..=n_max)
                .map(|n| table.weighted_prefactor(n))
                .collect::<Result<Vec<_>>>()?,
            _ => vec![1.0; n_max + 1],
        };
        Ok(Self {
            kind,
            table,
            scales,
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn params(&self) -> JacobiParams {
        self.table.params()
    }

    pub fn n_max(&self) -> usize {
        self.table.n_max()
    }

    pub fn table(&self) -> &RecurrenceTable {
        &self.table
    }

    pub fn domain(&self) -> (f64, f64) {
        self.kind.domain()
    }

    fn map_point(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&x) {
            return Err(Error::OutOfDomain { point: x, lo, hi });
        }
        Ok(match self.kind {
            BasisKind::ModifiedQ => 2.0 * x - 1.0,
            _ => x,
        })
    }

    /// Value of basis element `n` at `x` (in the family's own domain).
    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        let y = self.map_point(x)?;
        Ok(self.table.eval_orthonormal(n, y)? * self.scales[n])
    }

    /// Values of elements `0..out.len()` at `x`, one recurrence sweep.
    pub fn eval_into(&self, x: f64, out: &mut [f64]) -> Result<()> {
        let y = self.map_point(x)?;
        self.table.eval_orthonormal_into(y, out)?;
        for (v, s) in out.iter_mut().zip(&self.scales) {
            *v *= s;
        }
        Ok(())
    }

    pub fn eval_all(&self, x: f64, n_max: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; n_max + 1];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }
}

/// Orthonormal Jacobi polynomial `p_n(y)`; convenience wrapper building the
/// table on the fly. Hot paths should hold a [`JacobiBasis`] instead.
pub fn eval_p(params: JacobiParams, n: usize, y: f64) -> Result<f64> {
    RecurrenceTable::new(params, n)?.eval_orthonormal(n, y)
}

/// Weighted Jacobi polynomial `u_n(y)` for the fixed pair (1/2, -1/2).
pub fn eval_u(n: usize, y: f64) -> Result<f64> {
    let basis = JacobiBasis::new(BasisKind::WeightedU, JacobiParams::half_pair(), n)?;
    basis.eval(n, y)
}

/// Modified polynomial `q_n(t) = p_n(2t - 1)` on [0, 1].
pub fn eval_q(params: JacobiParams, n: usize, t: f64) -> Result<f64> {
    let basis = JacobiBasis::new(BasisKind::ModifiedQ, params, n)?;
    basis.eval(n, t)
}

/// Jacobi weight `rho(y) = (1-y)^gamma (1+y)^delta` on [-1, 1].
///
/// A negative exponent at its own singular endpoint is a hard error; the
/// integrals in scope only ever use nonnegative exponents at the path stage,
/// and a silent infinity would poison every downstream quadrature.
pub fn weight_rho(params: JacobiParams, y: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&y) {
        return Err(Error::OutOfDomain {
            point: y,
            lo: -1.0,
            hi: 1.0,
        });
    }
    if (params.gamma() < 0.0 && y == 1.0) || (params.delta() < 0.0 && y == -1.0) {
        return Err(Error::SingularWeight { point: y });
    }
    Ok((1.0 - y).powf(params.gamma()) * (1.0 + y).powf(params.delta()))
}

/// Jacobi weight `sigma(t) = (1-t)^gamma t^delta` on [0, 1].
pub fn weight_sigma(params: JacobiParams, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain {
            point: t,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if (params.gamma() < 0.0 && t == 1.0) || (params.delta() < 0.0 && t == 0.0) {
        return Err(Error::SingularWeight { point: t });
    }
    Ok((1.0 - t).powf(params.gamma()) * t.powf(params.delta()))
}
