//! Library results checked against independently computed references.

mod common;

use common::*;
use mcvd::channel::DEFAULT_BRACKET_TERMS;
use mcvd::link::{
    a_sic_filter, d_sic_subtract, emission_counts, full_duplex_schedule,
};
use mcvd::particle::{brownian_step, empirical_channel_taps};
use mcvd::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn quadrature_integrates_the_normal_density() {
    assert!((normal_mass(3.0, 2.0, f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-13);
    let half = normal_mass(0.0, 1.0, 0.0, f64::INFINITY);
    assert!((half - 0.5).abs() < 1e-14);
    let tail = normal_mass(0.0, 1.0, 2.0, f64::INFINITY);
    assert!((tail - 0.022_750_131_948_179_2).abs() < 1e-14);
}

fn two_tap_channel(desired: [f64; 2], own: [f64; 2]) -> ChannelCoefficients {
    let d = desired.to_vec();
    let o = own.to_vec();
    ChannelCoefficients::from_taps(
        0.1,
        0.0,
        [[o.clone(), d.clone()], [d.clone(), o.clone()]],
        [[o.clone(), d.clone()], [d, o]],
    )
    .unwrap()
}

#[test]
fn two_tap_ber_matches_direct_integration() {
    let cases = [
        ([0.3, 0.1], [0.6, 0.05], 500, 100.0, false),
        ([0.3, 0.1], [0.6, 0.05], 500, 100.0, true),
        ([0.05, 0.02], [0.4, 0.1], 300, 50.0, true),
        ([0.5, 0.0], [0.0, 0.0], 100, 1.0, false),
    ];
    for (desired, own, n1, noise, dsic) in cases {
        let coeffs = two_tap_channel(desired, own);
        let mut config = LinkConfig::full_duplex(n1, 0.1, 0.5);
        config.isi_taps = Some(2);
        config.noise_var = noise;
        config.d_sic = dsic;
        let eval = BerEvaluator::new(&coeffs, &config, &BerOptions::exact()).unwrap();
        for tau_m in [0.0, 0.05, 0.1, 0.2, 0.35, 0.5, 0.8] {
            let oracle =
                brute_force_two_tap_ber(desired, own, f64::from(n1), noise, tau_m * f64::from(n1), dsic);
            let got = eval.ber(tau_m);
            assert!(
                (got - oracle).abs() < 1e-12,
                "tau_m {tau_m}: evaluator {got} vs integration {oracle}"
            );
        }
    }
}

#[test]
fn single_sphere_cdf_matches_monte_carlo() {
    let times = [0.01, 0.02, 0.05];
    let mc = single_sphere_monte_carlo(5.0, 3.5, 100.0, 1e-4, &times, 100_000, 11);
    for (&t, &m) in times.iter().zip(&mc) {
        let f = single_receiver_cdf(5.0, 3.5, 100.0, t);
        assert!((f - m).abs() < 0.01, "t = {t}: analytic {f} vs Monte Carlo {m}");
    }
}

#[test]
fn particle_simulator_reproduces_single_sphere_cdf() {
    let topo = SystemTopology::collinear(5.0, 5e-6, 10.0, 3.5, 1.0, 100.0).unwrap();
    let mut cfg = SimConfig::desk(topo, Node::One, 5);
    cfg.n_molecules = 50_000;
    cfg.absorption = AbsorptionCheck::BrownianBridge;
    let run = run_simulation(&cfg).unwrap();
    for t in [0.01, 0.02, 0.05, 0.1] {
        let f = single_receiver_cdf(5.0, 3.5, 100.0, t);
        let m = run.empirical_cdf(Node::One, t);
        assert!((f - m).abs() < 0.01, "t = {t}: analytic {f} vs particles {m}");
    }
}

#[test]
#[ignore = "1e5 molecules at dt = 1e-5; several minutes on one core"]
fn particle_simulator_single_sphere_full_resolution() {
    let topo = SystemTopology::collinear(5.0, 5e-6, 10.0, 3.5, 1.0, 100.0).unwrap();
    let mut cfg = SimConfig::full_scale(topo, Node::One, 5);
    cfg.n_molecules = 100_000;
    let run = run_simulation(&cfg).unwrap();
    for t in [0.01, 0.02, 0.05, 0.1] {
        let f = single_receiver_cdf(5.0, 3.5, 100.0, t);
        let m = run.empirical_cdf(Node::One, t);
        assert!((f - m).abs() < 0.01, "t = {t}: analytic {f} vs particles {m}");
    }
}

#[test]
fn two_receiver_cdf_matches_particles_at_50_ms() {
    let topo = SystemTopology::reference();
    let model = ChannelModel::new(&topo).unwrap();
    let mut cfg = SimConfig::desk(topo, Node::One, 21);
    cfg.n_molecules = 20_000;
    cfg.t_end = 0.05;
    cfg.absorption = AbsorptionCheck::BrownianBridge;
    let run = run_simulation(&cfg).unwrap();
    for rx in Node::BOTH {
        let f = model.cdf(Node::One, rx, 0.05);
        let m = run.empirical_cdf(rx, 0.05);
        assert!((f - m).abs() < 0.02, "Rx{rx}: analytic {f} vs particles {m}");
    }
}

#[test]
fn channel_taps_match_simulated_taps() {
    let topo = SystemTopology::reference();
    let model = ChannelModel::new(&topo).unwrap();
    let t_s = 0.15;
    let k = 4;
    let analytic = model.coefficients(t_s, 0.0, k).unwrap();
    let mut cfg = SimConfig::desk(topo, Node::One, 3);
    cfg.t_end = k as f64 * t_s;
    cfg.absorption = AbsorptionCheck::BrownianBridge;
    let run = run_simulation(&cfg).unwrap();
    let sim = empirical_channel_taps(&run, t_s, 0.0, k).unwrap();
    for rx in Node::BOTH {
        for (j, (&a, &s)) in analytic.p(Node::One, rx).iter().zip(&sim.p[rx.index()]).enumerate() {
            assert!((a - s).abs() < 0.02, "Rx{rx} tap {j}: analytic {a} vs simulated {s}");
        }
    }
}

#[test]
fn long_run_absorption_approaches_capture_probabilities() {
    let topo = SystemTopology::reference();
    let caps = capture_probabilities(&topo, topo.transmitter(Node::One), 1000).unwrap();
    let mut cfg = SimConfig::desk(topo, Node::One, 8);
    cfg.n_molecules = 2_000;
    cfg.t_end = 100.0;
    cfg.absorption = AbsorptionCheck::BrownianBridge;
    let run = run_simulation(&cfg).unwrap();
    let n = run.total as f64;
    for rx in Node::BOTH {
        let k = caps.get(rx);
        let frac = run.absorbed(rx) as f64 / n;
        let se = (k * (1.0 - k) / n).sqrt();
        // The end-of-run fraction still misses the slow tail beyond 100 s.
        let tail = k - ChannelModel::new(&topo).unwrap().cdf(Node::One, rx, 100.0);
        assert!(
            (frac - (k - tail)).abs() < 3.0 * se,
            "Rx{rx}: absorbed {frac} vs capture {k} (se {se})"
        );
    }
}

#[test]
fn asymptotic_series_limit_is_capture() {
    let topo = SystemTopology::reference();
    let model = ChannelModel::new(&topo).unwrap();
    let s = model.series(Node::One).unwrap();
    let caps = model.capture(Node::One, Node::One);
    let f = two_receiver_cdf(s, Node::One, 1e7, DEFAULT_BRACKET_TERMS);
    assert!((f - caps).abs() < 1e-3);
}

#[test]
fn binomial_and_gaussian_sampling_agree_in_distribution() {
    let n1 = 500u64;
    let p = 0.1;
    let pmf = binomial_pmf(n1, p);
    // Exact pmf against the Gaussian discretised to integers.
    let mu = n1 as f64 * p;
    let sigma = (mu * (1.0 - p)).sqrt();
    let tv_exact: f64 = 0.5
        * pmf
            .iter()
            .enumerate()
            .map(|(k, &b)| (b - normal_mass(mu, sigma, k as f64 - 0.5, k as f64 + 0.5)).abs())
            .sum::<f64>();
    assert!(tv_exact < 0.05, "exact total variation {tv_exact}");

    // Sampler output in Gaussian mode against the binomial pmf.
    let zero = vec![0.0];
    let coeffs = ChannelCoefficients::from_taps(
        0.1,
        0.0,
        [[zero.clone(), vec![p]], [zero.clone(), zero.clone()]],
        [[zero.clone(), vec![p]], [zero.clone(), zero.clone()]],
    )
    .unwrap();
    let mut config = LinkConfig::full_duplex(n1 as u32, 0.1, 0.5);
    config.isi_taps = Some(1);
    config.noise_var = 0.0;
    config.sampling = Sampling::Gaussian;
    let draws = 100_000;
    let stream = SymbolStream::new(vec![1; draws], vec![0; draws]).unwrap();
    let sched = full_duplex_schedule(&stream);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let y = emission_counts(&coeffs, &sched, &config, &mut rng);
    let mut hist = vec![0.0; n1 as usize + 1];
    for &v in &y[1] {
        let k = v.round().clamp(0.0, n1 as f64) as usize;
        hist[k] += 1.0 / draws as f64;
    }
    let tv_sampled: f64 = 0.5 * pmf.iter().zip(&hist).map(|(a, b)| (a - b).abs()).sum::<f64>();
    assert!(tv_sampled < 0.05, "sampled total variation {tv_sampled}");
}

#[test]
fn discarding_window_keeps_expected_fraction() {
    let topo = SystemTopology::reference();
    let model = ChannelModel::new(&topo).unwrap();
    let (t_s, t_c) = (0.1, 0.01);
    let coeffs = model.coefficients(t_s, t_c, 1).unwrap();
    let expected = coeffs.phi(Node::One, Node::One)[0] / coeffs.p(Node::One, Node::One)[0];
    let mut cfg = SimConfig::desk(topo, Node::One, 2);
    cfg.n_molecules = 40_000;
    cfg.absorption = AbsorptionCheck::BrownianBridge;
    let run = run_simulation(&cfg).unwrap();
    let slot0: Vec<f64> = run.hits[0].iter().copied().filter(|&t| t <= t_s).collect();
    let kept = a_sic_filter(&slot0, t_c) as f64 / slot0.len() as f64;
    assert!((kept - expected).abs() < 0.02, "kept {kept} vs expected {expected}");
}

#[test]
fn digital_cancellation_is_unbiased() {
    let topo = SystemTopology::reference();
    let model = ChannelModel::new(&topo).unwrap();
    let coeffs = model.coefficients(0.1, 0.0, 1).unwrap();
    let phi0 = coeffs.phi(Node::One, Node::One)[0];
    let zero = vec![0.0];
    let own_only = ChannelCoefficients::from_taps(
        0.1,
        0.0,
        [[vec![phi0], zero.clone()], [zero.clone(), zero.clone()]],
        [[vec![phi0], zero.clone()], [zero.clone(), zero.clone()]],
    )
    .unwrap();
    let mut config = LinkConfig::full_duplex(500, 0.1, 0.5);
    config.isi_taps = Some(1);
    config.noise_var = 0.0;
    let n = 100_000;
    let stream = SymbolStream::new(vec![1; n], vec![0; n]).unwrap();
    let sched = full_duplex_schedule(&stream);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let y = emission_counts(&own_only, &sched, &config, &mut rng);
    let adjusted: Vec<f64> = y[0].iter().map(|&c| d_sic_subtract(c, 1.0, 500.0, phi0)).collect();
    let mean = adjusted.iter().sum::<f64>() / n as f64;
    let sd = (500.0 * phi0 * (1.0 - phi0) / n as f64).sqrt();
    assert!(mean.abs() < 3.0 * sd, "mean {mean} vs 3 sd {}", 3.0 * sd);
}

#[test]
fn brownian_steps_have_the_diffusive_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (d, dt) = (100.0, 1e-5);
    let n = 1_000_000;
    let mut sum = [0.0; 3];
    let mut sq = [0.0; 3];
    let mut cross = 0.0;
    for _ in 0..n {
        let p = brownian_step(Point::new(0.0, 0.0, 0.0), d, dt, &mut rng);
        let v = [p.x, p.y, p.z];
        for a in 0..3 {
            sum[a] += v[a];
            sq[a] += v[a] * v[a];
        }
        cross += p.x * p.y;
    }
    let target = 2.0 * d * dt;
    for a in 0..3 {
        let mean = sum[a] / n as f64;
        let var = sq[a] / n as f64 - mean * mean;
        assert!((var / target - 1.0).abs() < 0.01, "axis {a}: variance {var}");
    }
    let rho = (cross / n as f64) / target;
    assert!(rho.abs() < 0.01, "cross correlation {rho}");
}
