//! Discretized sample paths of the Wiener process and of symmetric
//! alpha-stable processes, as independent-increment arrays on uniform grids.
//!
//! Increment laws:
//! * Wiener: Gaussian, mean 0, variance `dt` (the normal-law constant beta
//!   is fixed to 1, so every isometry check is canonical),
//! * stable index alpha: standard symmetric S(alpha) draw from the
//!   Chambers-Mallows-Stuck transform, scaled by `dt^{1/alpha}`. Note the
//!   alpha = 2 case is Gaussian with variance `2 dt`, not `dt`; Gaussian
//!   comparisons account for that factor explicitly.

use std::io::Write;

use crate::error::{Error, Result};
use crate::rng::StreamKey;

/// Uniform grid with `m` increments over `[lo, hi]`; points are composed as
/// `lo + i * dt` rather than accumulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGrid {
    lo: f64,
    hi: f64,
    m: usize,
}

impl PathGrid {
    pub fn new(lo: f64, hi: f64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidConfig {
                context: format!("degenerate path interval [{lo}, {hi}]"),
            });
        }
        Ok(Self { lo, hi, m })
    }

    /// `[-1, 1]` grid, the home of the stable-process experiments.
    pub fn symmetric(m: usize) -> Result<Self> {
        Self::new(-1.0, 1.0, m)
    }

    /// `[0, 1]` grid, the home of the Wiener-process experiments.
    pub fn unit(m: usize) -> Result<Self> {
        Self::new(0.0, 1.0, m)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Number of increments (the grid has `m + 1` points).
    pub fn increments(&self) -> usize {
        self.m
    }

    pub fn dt(&self) -> f64 {
        (self.hi - self.lo) / self.m as f64
    }

    /// The i-th grid point, `i` in `0..=m`.
    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i <= self.m);
        self.lo + i as f64 * self.dt()
    }
}

/// Identifies one path realization: the experiment seed plus a replica
/// index. Each (seed, replica, cell) triple maps to its own RNG stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathSeed {
    pub seed: u64,
    pub replica: u64,
}

impl PathSeed {
    pub fn new(seed: u64, replica: u64) -> Self {
        Self { seed, replica }
    }
}

impl From<u64> for PathSeed {
    fn from(seed: u64) -> Self {
        Self { seed, replica: 0 }
    }
}

/// One discretized realization X(t_i), stored as its increments.
#[derive(Debug, Clone)]
pub struct SamplePath {
    grid: PathGrid,
    increments: Vec<f64>,
    alpha: f64,
    seed: PathSeed,
}

impl SamplePath {
    pub fn grid(&self) -> PathGrid {
        self.grid
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// Stability index; 2 marks the Gaussian (Wiener) case.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn seed(&self) -> PathSeed {
        self.seed
    }

    pub fn is_gaussian(&self) -> bool {
        self.alpha == 2.0
    }

    /// Path values X(t_0), ..., X(t_m) starting at 0.
    pub fn values(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.increments.len() + 1);
        let mut acc = 0.0;
        v.push(acc);
        for &dx in &self.increments {
            acc += dx;
            v.push(acc);
        }
        v
    }

    /// All-zero path on the same grid; handy for degenerate checks.
    pub fn zero(grid: PathGrid, alpha: f64) -> Self {
        Self {
            grid,
            increments: vec![0.0; grid.increments()],
            alpha,
            seed: PathSeed::new(0, 0),
        }
    }

    /// Path with explicitly supplied increments.
    pub fn from_increments(grid: PathGrid, increments: Vec<f64>, alpha: f64) -> Result<Self> {
        if increments.len() != grid.increments() {
            return Err(Error::InvalidConfig {
                context: format!(
                    "increment count {} does not match grid ({})",
                    increments.len(),
                    grid.increments()
                ),
            });
        }
        Ok(Self {
            grid,
            increments,
            alpha,
            seed: PathSeed::new(0, 0),
        })
    }

    /// Coarsens the path by summing increment pairs: the M/2-grid path on
    /// the same Brownian (or stable) skeleton. Used by the M vs 2M
    /// discretization stability checks.
    pub fn coarsen(&self) -> Option<SamplePath> {
        let m = self.increments.len();
        if m % 2 != 0 || m < 2 {
            return None;
        }
        let grid = PathGrid::new(self.grid.lo, self.grid.hi, m / 2).ok()?;
        let increments = self
            .increments
            .chunks_exact(2)
            .map(|pair| pair[0] + pair[1])
            .collect();
        Some(SamplePath {
            grid,
            increments,
            alpha: self.alpha,
            seed: self.seed,
        })
    }

    /// Writes the path as `t,x` CSV rows with full-precision floats.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "t,x")?;
        let values = self.values();
        for (i, v) in values.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", self.grid.point(i), v)?;
        }
        Ok(())
    }
}

/// Samples a Wiener path: i.i.d. Gaussian increments of variance `dt`.
pub fn sample_wiener(grid: PathGrid, seed: PathSeed) -> SamplePath {
    let replica_key = StreamKey::new(seed.seed).child(seed.replica);
    let sqrt_dt = grid.dt().sqrt();
    let increments = (0..grid.increments())
        .map(|cell| {
            let mut rng = replica_key.child(cell as u64).stream();
            sqrt_dt * rng.standard_normal()
        })
        .collect();
    SamplePath {
        grid,
        increments,
        alpha: 2.0,
        seed,
    }
}

/// Samples a symmetric alpha-stable path, alpha in [1, 2]; increments have
/// scale `dt^{1/alpha}` in the S(alpha, scale) convention with
/// characteristic function `exp(-|scale u|^alpha)`.
pub fn sample_stable(grid: PathGrid, alpha: f64, seed: PathSeed) -> Result<SamplePath> {
    if !(1.0..=2.0).contains(&alpha) {
        return Err(Error::InvalidAlpha { alpha });
    }
    let replica_key = StreamKey::new(seed.seed).child(seed.replica);
    let scale = grid.dt().powf(1.0 / alpha);
    let increments = (0..grid.increments())
        .map(|cell| {
            let mut rng = replica_key.child(cell as u64).stream();
            let u1 = rng.uniform_open();
            let u2 = rng.uniform_open();
            scale * standard_stable_draw(alpha, u1, u2)
        })
        .collect();
    Ok(SamplePath {
        grid,
        increments,
        alpha,
        seed,
    })
}

/// Chambers-Mallows-Stuck transform of (uniform, uniform) into a standard
/// symmetric stable draw. The alpha = 1 branch is the exact Cauchy formula;
/// the general branch is numerically singular there.
pub fn standard_stable_draw(alpha: f64, u1: f64, u2: f64) -> f64 {
    let v = std::f64::consts::PI * (u1 - 0.5);
    if alpha == 1.0 {
        return v.tan();
    }
    let e = -u2.ln();
    let s = (alpha * v).sin() / v.cos().powf(1.0 / alpha);
    let t = ((v - alpha * v).cos() / e).powf((1.0 - alpha) / alpha);
    s * t
}
