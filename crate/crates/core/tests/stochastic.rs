//! Statistical validation of the samplers and the discretized stochastic
//! integral: self-similarity, independence, characteristic function and
//! coupled-refinement behavior.

use rfj_core::integral::weighted_increment_sum;
use rfj_core::numeric::{linear_fit, mean_and_variance, median};
use rfj_core::paths::{sample_stable, sample_wiener, PathGrid, PathSeed};
use rfj_core::rng::StreamKey;

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n1, n2) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n1 && j < n2 {
        let (x1, x2) = (a[i], b[j]);
        if x1 <= x2 {
            i += 1;
        }
        if x2 <= x1 {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let ne = (n1 as f64 * n2 as f64) / (n1 + n2) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let mut p = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        p += sign * 2.0 * (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sign = -sign;
    }
    (d, p.clamp(0.0, 1.0))
}

fn lag1_autocorrelation(xs: &[f64]) -> f64 {
    let (mean, var) = mean_and_variance(xs);
    if var == 0.0 {
        return 0.0;
    }
    let num: f64 = xs
        .windows(2)
        .map(|w| (w[0] - mean) * (w[1] - mean))
        .sum::<f64>()
        / (xs.len() - 1) as f64;
    num / var
}

#[test]
fn self_similarity_of_stable_increment_scale() {
    // Increments at dt and dt/2, rescaled by dt^{-1/alpha}, share one law:
    // two-sample KS with p > 0.01 at 1e4 draws per side.
    for (case, alpha) in [(0u64, 1.0f64), (1, 1.5), (2, 2.0)] {
        let m = 10_000;
        let coarse = sample_stable(PathGrid::new(0.0, 1.0, m).unwrap(), alpha, PathSeed::new(600 + case, 0))
            .unwrap();
        let fine = sample_stable(
            PathGrid::new(0.0, 1.0, 2 * m).unwrap(),
            alpha,
            PathSeed::new(700 + case, 1),
        )
        .unwrap();
        let dt_c = 1.0 / m as f64;
        let dt_f = 0.5 * dt_c;
        let a: Vec<f64> = coarse
            .increments()
            .iter()
            .map(|&x| x / dt_c.powf(1.0 / alpha))
            .collect();
        let b: Vec<f64> = fine.increments()[..m]
            .iter()
            .map(|&x| x / dt_f.powf(1.0 / alpha))
            .collect();
        let (d, p) = ks_two_sample(&a, &b);
        assert!(p > 0.01, "alpha = {alpha}: KS D = {d}, p = {p}");
    }
}

#[test]
fn wiener_increments_uncorrelated_at_lag_one() {
    let m = 4096;
    let path = sample_wiener(PathGrid::unit(m).unwrap(), PathSeed::new(801, 0));
    let rho = lag1_autocorrelation(path.increments());
    assert!(
        rho.abs() < 3.0 / (m as f64).sqrt(),
        "lag-1 autocorrelation {rho}"
    );
}

#[test]
fn stable_increment_signs_uncorrelated_at_lag_one() {
    // Heavy tails make the raw autocorrelation meaningless; use signs.
    for alpha in [1.0, 1.5] {
        let m = 4096;
        let path =
            sample_stable(PathGrid::symmetric(m).unwrap(), alpha, PathSeed::new(802, 3)).unwrap();
        let signs: Vec<f64> = path.increments().iter().map(|x| x.signum()).collect();
        let rho = lag1_autocorrelation(&signs);
        assert!(
            rho.abs() < 3.0 / (m as f64).sqrt(),
            "alpha = {alpha}: sign autocorrelation {rho}"
        );
    }
}

#[test]
fn stable_empirical_characteristic_function() {
    // E cos(u Z) = exp(-|u|^alpha) for the standard symmetric law.
    let alpha = 1.5;
    let n = 100_000usize;
    let mut rng = StreamKey::new(555).stream();
    let draws: Vec<f64> = (0..n)
        .map(|_| {
            let u1 = rng.uniform_open();
            let u2 = rng.uniform_open();
            rfj_core::paths::standard_stable_draw(alpha, u1, u2)
        })
        .collect();
    for u in [0.5f64, 1.0, 2.0] {
        let cos_vals: Vec<f64> = draws.iter().map(|&z| (u * z).cos()).collect();
        let (mean, var) = mean_and_variance(&cos_vals);
        let se = (var / n as f64).sqrt();
        let want = (-(u.abs().powf(alpha))).exp();
        assert!(
            (mean - want).abs() <= 3.0 * se,
            "u = {u}: ecf {mean} vs {want} (se {se})"
        );
    }
}

#[test]
fn coupled_refinement_differences_shrink_at_rate_one() {
    // For a deterministic Lipschitz integrand the L2 error of the
    // left-endpoint sum against a Wiener path is O(dt): coupled M -> 2M
    // differences fall at observed slope ~ -1 in M (the classical bound;
    // deterministic integrands beat the generic 1/2 rate).
    let levels = [256usize, 512, 1024, 2048];
    let finest = 4096;
    let replicas = 200u64;
    let g = |t: f64| t; // Lipschitz on [0, 1]
    let grids: Vec<PathGrid> = levels
        .iter()
        .chain(std::iter::once(&finest))
        .map(|&m| PathGrid::unit(m).unwrap())
        .collect();
    let gw: Vec<Vec<f64>> = grids
        .iter()
        .map(|grid| (0..grid.increments()).map(|i| g(grid.point(i))).collect())
        .collect();

    let mut sum_sq = vec![0.0f64; levels.len()];
    for r in 0..replicas {
        let fine = sample_wiener(grids[grids.len() - 1], PathSeed::new(4000, r));
        // walk down the dyadic ladder by coarsening on the shared skeleton
        let mut ladder = vec![fine];
        for _ in 0..levels.len() {
            let next = ladder.last().unwrap().coarsen().unwrap();
            ladder.push(next);
        }
        ladder.reverse(); // now ladder[k] has levels[k] cells, last is finest
        for k in 0..levels.len() {
            let i_coarse = weighted_increment_sum(&gw[k], &ladder[k]);
            let i_fine = weighted_increment_sum(&gw[k + 1], &ladder[k + 1]);
            sum_sq[k] += (i_fine - i_coarse) * (i_fine - i_coarse);
        }
    }
    let rms: Vec<f64> = sum_sq
        .iter()
        .map(|s| (s / replicas as f64).sqrt())
        .collect();
    for w in rms.windows(2) {
        assert!(w[1] < w[0], "coupled differences not shrinking: {rms:?}");
    }
    let ln_m: Vec<f64> = levels.iter().map(|&m| (m as f64).ln()).collect();
    let ln_rms: Vec<f64> = rms.iter().map(|&v| v.ln()).collect();
    let (slope, _) = linear_fit(&ln_m, &ln_rms).unwrap();
    assert!(
        (-1.3..=-0.7).contains(&slope),
        "refinement slope {slope}, rms {rms:?}"
    );
}

#[test]
fn stable_refinement_differences_shrink_in_median() {
    // Heavy tails rule out second moments; stability in probability shows
    // up as shrinking median absolute coupled differences.
    let levels = [256usize, 512, 1024];
    let finest = 2048;
    let replicas = 300u64;
    let g = |t: f64| t.abs().powf(1.5);
    let grids: Vec<PathGrid> = levels
        .iter()
        .chain(std::iter::once(&finest))
        .map(|&m| PathGrid::symmetric(m).unwrap())
        .collect();
    let gw: Vec<Vec<f64>> = grids
        .iter()
        .map(|grid| (0..grid.increments()).map(|i| g(grid.point(i))).collect())
        .collect();

    let mut diffs = vec![Vec::new(); levels.len()];
    for r in 0..replicas {
        let fine = sample_stable(grids[grids.len() - 1], 1.2, PathSeed::new(4100, r)).unwrap();
        let mut ladder = vec![fine];
        for _ in 0..levels.len() {
            let next = ladder.last().unwrap().coarsen().unwrap();
            ladder.push(next);
        }
        ladder.reverse();
        for k in 0..levels.len() {
            let i_coarse = weighted_increment_sum(&gw[k], &ladder[k]);
            let i_fine = weighted_increment_sum(&gw[k + 1], &ladder[k + 1]);
            diffs[k].push((i_fine - i_coarse).abs());
        }
    }
    let medians: Vec<f64> = diffs.iter().map(|d| median(d)).collect();
    for w in medians.windows(2) {
        assert!(
            w[1] < w[0],
            "median coupled differences not shrinking: {medians:?}"
        );
    }
}
