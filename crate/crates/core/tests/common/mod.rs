//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Mass of `N(mu, sigma²)` on `[a, b]` by composite Gauss–Legendre
/// quadrature of the density, with panels no wider than `sigma / 4`.
pub fn normal_mass(mu: f64, sigma: f64, a: f64, b: f64) -> f64 {
    let a = a.max(mu - 40.0 * sigma);
    let b = b.min(mu + 40.0 * sigma);
    if b <= a {
        return 0.0;
    }
    let (x, w) = gauss_legendre(20);
    let panels = ((b - a) / (0.25 * sigma)).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (xi, wi) in x.iter().zip(&w) {
            let t = mid + 0.5 * h * xi;
            let z = (t - mu) / sigma;
            total += wi * 0.5 * h * norm * (-0.5 * z * z).exp();
        }
    }
    total
}

/// Two-tap BCSK error probability at one full-duplex receiver, by listing
/// all sixteen current/previous symbol combinations and integrating the
/// Gaussian density over the error region. `desired` and `own` are the
/// remote and co-located transmitter taps, current symbol first.
pub fn brute_force_two_tap_ber(
    desired: [f64; 2],
    own: [f64; 2],
    n1: f64,
    noise_var: f64,
    tau_d: f64,
    digital_cancellation: bool,
) -> f64 {
    let mut total = 0.0;
    for bits in 0..16u32 {
        let remote = [bits & 1, (bits >> 1) & 1].map(f64::from);
        let local = [(bits >> 2) & 1, (bits >> 3) & 1].map(f64::from);
        let mut mu = 0.0;
        let mut var = noise_var;
        for k in 0..2 {
            mu += n1 * remote[k] * desired[k] + n1 * local[k] * own[k];
            var += n1 * remote[k] * desired[k] * (1.0 - desired[k])
                + n1 * local[k] * own[k] * (1.0 - own[k]);
        }
        if digital_cancellation {
            mu -= n1 * local[0] * own[0];
        }
        let sigma = var.sqrt();
        let err = if remote[0] == 1.0 {
            normal_mass(mu, sigma, f64::NEG_INFINITY, tau_d)
        } else {
            normal_mass(mu, sigma, tau_d, f64::INFINITY)
        };
        total += err / 16.0;
    }
    total
}

/// Fraction of point-source molecules absorbed by an isolated sphere of
/// radius `r` by each of `times`, released at distance `d` from its surface.
/// Uses a radial random walk with a flat-surface Brownian-bridge crossing
/// correction.
pub fn single_sphere_monte_carlo(
    r: f64,
    d: f64,
    diffusion: f64,
    dt: f64,
    times: &[f64],
    n: usize,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_end = times.iter().cloned().fold(0.0, f64::max);
    let steps = (t_end / dt).round() as usize;
    let s = (2.0 * diffusion * dt).sqrt();
    let mut absorbed_at = Vec::with_capacity(n);
    for _ in 0..n {
        let mut p = [0.0, 0.0, r + d];
        let mut gap0 = d;
        for step in 1..=steps {
            for c in p.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *c += s * z;
            }
            let gap1 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - r;
            let crossed = gap1 <= 0.0
                || rng.random::<f64>() < (-gap0 * gap1 / (diffusion * dt)).exp();
            if crossed {
                absorbed_at.push(step as f64 * dt);
                break;
            }
            gap0 = gap1;
        }
    }
    times
        .iter()
        .map(|&t| absorbed_at.iter().filter(|&&a| a <= t + 1e-12).count() as f64 / n as f64)
        .collect()
}

/// Exact `Binomial(n, p)` probability mass function.
pub fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; n as usize + 1];
    let mut log_c = 0.0;
    for k in 0..=n {
        if k > 0 {
            log_c += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        pmf[k as usize] = (log_c + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp();
    }
    pmf
}
