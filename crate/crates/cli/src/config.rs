//! Experiment configuration: a flat TOML file with per-experiment defaults,
//! aggregated field-level validation, and a fully resolved echo that is
//! itself a valid config reproducing the run.

use serde::{Deserialize, Serialize};

use rfj_core::functions::{lookup, TestFunction};
use rfj_core::jacobi::{BasisKind, JacobiParams};

/// Raw config as parsed from TOML; every field except `experiment` is
/// optional and filled from per-experiment defaults during validation.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_values: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_ref: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

/// The eight experiment kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Expand,
    Orthonormality,
    SamplePaths,
    Isometry,
    Tail,
    Qm,
    Rate,
    Continuity,
}

impl Experiment {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "expand" => Experiment::Expand,
            "orthonormality" => Experiment::Orthonormality,
            "sample-paths" => Experiment::SamplePaths,
            "isometry" => Experiment::Isometry,
            "tail" => Experiment::Tail,
            "qm" => Experiment::Qm,
            "rate" => Experiment::Rate,
            "continuity" => Experiment::Continuity,
            _ => return None,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Experiment::Expand => "expand",
            Experiment::Orthonormality => "orthonormality",
            Experiment::SamplePaths => "sample-paths",
            Experiment::Isometry => "isometry",
            Experiment::Tail => "tail",
            Experiment::Qm => "qm",
            Experiment::Rate => "rate",
            Experiment::Continuity => "continuity",
        }
    }
}

/// Fully resolved configuration: every field concrete, serializable back to
/// a valid config file.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub experiment: String,
    pub function_id: String,
    pub basis: String,
    pub gamma: f64,
    pub delta: f64,
    pub eta: f64,
    pub tau: f64,
    pub alpha: f64,
    pub y: f64,
    pub n_values: Vec<usize>,
    pub n_max: usize,
    pub nodes: usize,
    pub epsilon: f64,
    pub eps_prime: f64,
    pub tail_threshold: f64,
    pub replicas: usize,
    pub grid_m: usize,
    pub n_ref: usize,
    pub seed: u64,
    pub h_values: Vec<f64>,
    pub mode: String,
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl ResolvedConfig {
    pub fn kind(&self) -> Experiment {
        Experiment::parse(&self.experiment).expect("validated experiment")
    }

    pub fn basis_kind(&self) -> BasisKind {
        match self.basis.as_str() {
            "weighted_u" => BasisKind::WeightedU,
            "modified_q" => BasisKind::ModifiedQ,
            _ => BasisKind::OrthonormalP,
        }
    }

    pub fn params(&self) -> JacobiParams {
        JacobiParams::new(self.gamma, self.delta).expect("validated params")
    }

    pub fn weight(&self) -> JacobiParams {
        JacobiParams::new(self.eta, self.tau).expect("validated weight")
    }

    pub fn function(&self) -> TestFunction {
        lookup(&self.function_id).expect("validated function id")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("resolved config serializes")
    }
}

struct Defaults {
    function_id: &'static str,
    basis: &'static str,
    replicas: usize,
    n_values: &'static [usize],
}

fn defaults_for(kind: Experiment) -> Defaults {
    match kind {
        Experiment::Expand => Defaults {
            function_id: "abs_sqrt",
            basis: "orthonormal_p",
            replicas: 1,
            n_values: &[4, 8, 16, 32],
        },
        Experiment::Orthonormality => Defaults {
            function_id: "poly0",
            basis: "orthonormal_p",
            replicas: 1,
            n_values: &[4, 8, 16, 32],
        },
        Experiment::SamplePaths => Defaults {
            function_id: "poly0",
            basis: "orthonormal_p",
            replicas: 1,
            n_values: &[4, 8, 16, 32],
        },
        Experiment::Isometry => Defaults {
            function_id: "poly0",
            basis: "orthonormal_p",
            replicas: 10_000,
            n_values: &[4, 8, 16, 32],
        },
        Experiment::Tail => Defaults {
            function_id: "abs_pow_3_2",
            basis: "orthonormal_p",
            replicas: 2000,
            n_values: &[4, 8, 16, 32],
        },
        Experiment::Qm => Defaults {
            function_id: "abs_pow_3_2",
            basis: "modified_q",
            replicas: 5000,
            n_values: &[4, 8, 16, 32],
        },
        Experiment::Rate => Defaults {
            function_id: "abs_pow_5_2",
            basis: "weighted_u",
            replicas: 1,
            n_values: &[8, 16, 32, 64, 128, 256],
        },
        Experiment::Continuity => Defaults {
            function_id: "abs_pow_3_2",
            basis: "orthonormal_p",
            replicas: 2000,
            n_values: &[4, 8, 16, 32],
        },
    }
}

/// Validates a raw config, returning either the fully resolved form or the
/// aggregated list of field-level problems.
pub fn validate(cfg: &ExperimentConfig) -> Result<ResolvedConfig, Vec<String>> {
    let mut errors = Vec::new();

    let Some(kind) = Experiment::parse(&cfg.experiment) else {
        return Err(vec![format!(
            "experiment: unknown kind `{}` (expected one of expand, orthonormality, \
             sample-paths, isometry, tail, qm, rate, continuity)",
            cfg.experiment
        )]);
    };
    let defaults = defaults_for(kind);

    let function_id = cfg
        .function_id
        .clone()
        .unwrap_or_else(|| defaults.function_id.to_string());
    if lookup(&function_id).is_err() {
        errors.push(format!("function_id: `{function_id}` is not in the catalog"));
    }

    let basis = cfg
        .basis
        .clone()
        .unwrap_or_else(|| defaults.basis.to_string());
    let basis_kind = match basis.as_str() {
        "orthonormal_p" => Some(BasisKind::OrthonormalP),
        "weighted_u" => Some(BasisKind::WeightedU),
        "modified_q" => Some(BasisKind::ModifiedQ),
        other => {
            errors.push(format!(
                "basis: unknown basis `{other}` (expected orthonormal_p, weighted_u, modified_q)"
            ));
            None
        }
    };

    // The weighted basis pins its parameter pair; default accordingly.
    let (default_gamma, default_delta) = if basis_kind == Some(BasisKind::WeightedU) {
        (0.5, -0.5)
    } else {
        (0.0, 0.0)
    };
    let gamma = cfg.gamma.unwrap_or(default_gamma);
    let delta = cfg.delta.unwrap_or(default_delta);
    if !(gamma > -1.0 && gamma.is_finite()) {
        errors.push(format!("gamma: must be a finite number > -1, got {gamma}"));
    }
    if !(delta > -1.0 && delta.is_finite()) {
        errors.push(format!("delta: must be a finite number > -1, got {delta}"));
    }
    if basis_kind == Some(BasisKind::WeightedU) && (gamma != 0.5 || delta != -0.5) {
        errors.push(format!(
            "basis: weighted_u requires (gamma, delta) = (0.5, -0.5), got ({gamma}, {delta})"
        ));
    }

    let eta = cfg.eta.unwrap_or(0.0);
    let tau = cfg.tau.unwrap_or(0.0);
    if !(eta >= 0.0 && eta.is_finite()) {
        errors.push(format!("eta: must be a finite number >= 0, got {eta}"));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        errors.push(format!("tau: must be a finite number >= 0, got {tau}"));
    }

    let alpha = cfg.alpha.unwrap_or(2.0);
    if !(1.0..=2.0).contains(&alpha) {
        errors.push(format!("alpha: must lie in [1, 2], got {alpha}"));
    }

    let n_values = cfg
        .n_values
        .clone()
        .unwrap_or_else(|| defaults.n_values.to_vec());
    if n_values.is_empty() {
        errors.push("n_values: must be nonempty".to_string());
    } else if n_values.windows(2).any(|w| w[1] <= w[0]) {
        errors.push("n_values: must be strictly increasing".to_string());
    }
    let max_n = n_values.iter().copied().max().unwrap_or(0);

    let n_max = cfg.n_max.unwrap_or(match kind {
        Experiment::Orthonormality => 20,
        _ => 32,
    });
    let nodes = cfg.nodes.unwrap_or(match kind {
        Experiment::Orthonormality => (n_max + 1).max(21),
        _ => (4 * n_max).max(200),
    });
    if nodes < n_max + 1 {
        errors.push(format!(
            "nodes: {nodes} is too few to resolve degree {n_max} (need at least {})",
            n_max + 1
        ));
    }

    let epsilon = cfg.epsilon.unwrap_or(0.1);
    if !(epsilon > 0.0) {
        errors.push(format!("epsilon: must be positive, got {epsilon}"));
    }
    let eps_prime = cfg.eps_prime.unwrap_or(0.9 * epsilon);
    if !(eps_prime > 0.0 && eps_prime < epsilon) {
        errors.push(format!(
            "eps_prime: must satisfy 0 < eps_prime < epsilon, got {eps_prime} (epsilon {epsilon})"
        ));
    }
    let tail_threshold = cfg.tail_threshold.unwrap_or(0.05);
    if !(tail_threshold > 0.0 && tail_threshold < 1.0) {
        errors.push(format!(
            "tail_threshold: must lie in (0, 1), got {tail_threshold}"
        ));
    }

    let replicas = cfg.replicas.unwrap_or(defaults.replicas);
    if replicas < 1 {
        errors.push("replicas: must be at least 1".to_string());
    }
    let grid_m = cfg.grid_m.unwrap_or(4096);
    if grid_m < 1 {
        errors.push("grid_m: must be at least 1".to_string());
    }

    let n_ref = cfg.n_ref.unwrap_or(4 * max_n.max(1));
    if matches!(kind, Experiment::Tail | Experiment::Qm | Experiment::Continuity)
        && n_ref <= max_n
    {
        errors.push(format!(
            "n_ref: reference truncation {n_ref} must exceed the largest tested degree {max_n}"
        ));
    }

    let seed = cfg.seed.unwrap_or(1729);

    let y = cfg.y.unwrap_or(0.3);
    let domain: (f64, f64) = match (kind, basis_kind) {
        (Experiment::Qm, _) | (_, Some(BasisKind::ModifiedQ)) => (0.0, 1.0),
        (Experiment::Continuity, _) => match cfg.mode.as_deref() {
            Some("quadratic_mean") => (0.0, 1.0),
            _ => (-1.0, 1.0),
        },
        _ => (-1.0, 1.0),
    };
    if y < domain.0 || y > domain.1 {
        errors.push(format!(
            "y: evaluation point {y} outside the experiment domain [{}, {}]",
            domain.0, domain.1
        ));
    }

    let h_values = cfg.h_values.clone().unwrap_or_else(|| {
        vec![0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625]
    });
    if kind == Experiment::Continuity {
        if h_values.is_empty()
            || h_values.iter().any(|&h| !(h > 0.0))
            || h_values.windows(2).any(|w| w[1] >= w[0])
        {
            errors.push("h_values: must be positive and strictly decreasing".to_string());
        } else if y + h_values[0] > domain.1 {
            errors.push(format!(
                "h_values: y + h_max = {} leaves the domain [{}, {}]",
                y + h_values[0],
                domain.0,
                domain.1
            ));
        }
    }

    let mode = cfg
        .mode
        .clone()
        .unwrap_or_else(|| "weak_probability".to_string());
    if kind == Experiment::Continuity
        && mode != "weak_probability"
        && mode != "quadratic_mean"
    {
        errors.push(format!(
            "mode: expected weak_probability or quadratic_mean, got `{mode}`"
        ));
    }

    let family = cfg.family.clone().unwrap_or_else(|| {
        if alpha == 2.0 {
            "wiener".to_string()
        } else {
            "stable".to_string()
        }
    });
    if family != "wiener" && family != "stable" {
        errors.push(format!("family: expected wiener or stable, got `{family}`"));
    }

    // experiment-specific coherence
    match kind {
        Experiment::Rate => {
            if let Ok(f) = lookup(&function_id) {
                if f.lipschitz_exponents().is_none() && f.polynomial_degree().is_none() {
                    errors.push(format!(
                        "function_id: rate experiments need a declared polynomial or \
                         Lipschitz class, `{function_id}` has neither"
                    ));
                }
            }
            if n_values.iter().any(|&n| !(8..=256).contains(&n)) {
                errors.push("n_values: rate experiment degrees must lie in [8, 256]".to_string());
            }
        }
        Experiment::Tail => {
            if basis_kind == Some(BasisKind::ModifiedQ) {
                errors.push(
                    "basis: tail experiments run on [-1, 1] (orthonormal_p or weighted_u)"
                        .to_string(),
                );
            }
            if replicas < 100 {
                errors.push("replicas: tail mode needs at least 100".to_string());
            }
        }
        Experiment::Continuity => {
            if replicas < 100 {
                errors.push("replicas: continuity probes need at least 100".to_string());
            }
        }
        _ => {}
    }

    if errors.is_empty() {
        Ok(ResolvedConfig {
            experiment: kind.label().to_string(),
            function_id,
            basis,
            gamma,
            delta,
            eta,
            tau,
            alpha,
            y,
            n_values,
            n_max,
            nodes,
            epsilon,
            eps_prime,
            tail_threshold,
            replicas,
            grid_m,
            n_ref,
            seed,
            h_values,
            mode,
            family,
            output_path: cfg.output_path.clone(),
        })
    } else {
        Err(errors)
    }
}

/// Parses a TOML string into a raw config.
pub fn parse_toml(text: &str) -> Result<ExperimentConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}
