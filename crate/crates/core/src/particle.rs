//! Brownian particle simulator with two absorbing spheres.
//!
//! Every molecule draws from its own ChaCha8 stream (master seed, stream =
//! molecule id), so trajectories do not depend on how molecules are
//! scheduled across threads. By default absorption is tested at the end of
//! each step and recorded at that step's end time.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channel::{check_timing, ChannelCoefficients, EmitterTaps, HittingCdf};
use crate::error::{Error, Result};
use crate::topology::{Node, Point, SystemTopology};

/// Displace `p` by an isotropic Gaussian step with per-axis variance
/// `2 D dt`.
pub fn brownian_step<R: Rng + ?Sized>(p: Point, diffusion: f64, dt: f64, rng: &mut R) -> Point {
    let s = (2.0 * diffusion * dt).sqrt();
    let dx: f64 = rng.sample(StandardNormal);
    let dy: f64 = rng.sample(StandardNormal);
    let dz: f64 = rng.sample(StandardNormal);
    Point::new(p.x + s * dx, p.y + s * dy, p.z + s * dz)
}

/// Per-molecule RNG: independent stream `id` under the master seed.
pub fn molecule_rng(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// How absorption is detected within a time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AbsorptionCheck {
    /// Absorb when the end-of-step position is inside or on a sphere.
    #[default]
    EndOfStep,
    /// Additionally absorb, with the Brownian-bridge probability
    /// `exp(-2 g0 g1 / (2 D dt))`, molecules whose path may have touched a
    /// surface between two outside positions at gaps `g0` and `g1`. The
    /// surface is treated as locally flat.
    BrownianBridge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub topology: SystemTopology,
    pub emitter: Point,
    pub n_molecules: usize,
    /// Time step (s).
    pub dt: f64,
    /// Simulated horizon (s).
    pub t_end: f64,
    pub seed: u64,
    pub replications: usize,
    pub absorption: AbsorptionCheck,
}

impl SimConfig {
    /// Quick-running defaults: 10⁴ molecules, dt = 10⁻⁴ s, 0.1 s horizon.
    pub fn desk(topology: SystemTopology, emitter: Node, seed: u64) -> Self {
        Self {
            topology,
            emitter: topology.transmitter(emitter),
            n_molecules: 10_000,
            dt: 1e-4,
            t_end: 0.1,
            seed,
            replications: 1,
            absorption: AbsorptionCheck::EndOfStep,
        }
    }

    /// Full-resolution settings: 5×10⁴ molecules, dt = 10⁻⁵ s.
    pub fn full_scale(topology: SystemTopology, emitter: Node, seed: u64) -> Self {
        Self {
            n_molecules: 50_000,
            dt: 1e-5,
            ..Self::desk(topology, emitter, seed)
        }
    }

    pub fn n_steps(&self) -> u64 {
        (self.t_end / self.dt).round() as u64
    }

    pub fn total_molecules(&self) -> usize {
        self.n_molecules * self.replications
    }

    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(Error::invalid(format!(
                "t_end = {} must be at least dt = {}",
                self.t_end, self.dt
            )));
        }
        if self.n_molecules == 0 || self.replications == 0 {
            return Err(Error::invalid("n_molecules and replications must be at least 1"));
        }
        for rx in Node::BOTH {
            let gap = self.topology.surface_distance(self.emitter, rx);
            if gap <= 0.0 {
                return Err(Error::Domain(format!(
                    "emitter {} is not strictly outside Rx{rx} (surface distance {gap})",
                    self.emitter
                )));
            }
        }
        Ok(())
    }
}

/// One absorption event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hit {
    pub molecule: u64,
    pub receiver: Node,
    /// Index of the step at whose end the molecule was absorbed (1-based).
    pub step: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleRunResult {
    /// Absorptions sorted by (step, molecule id).
    pub events: Vec<Hit>,
    /// Absorption times per receiver (s), ascending.
    pub hits: [Vec<f64>; 2],
    pub survivors: usize,
    pub total: usize,
    /// Steps that ended inside both spheres (assigned to the nearer surface).
    pub double_hits: usize,
    pub dt: f64,
    pub t_end: f64,
}

impl ParticleRunResult {
    pub fn absorbed(&self, rx: Node) -> usize {
        self.hits[rx.index()].len()
    }

    /// Fraction of all molecules absorbed at `rx` by time `t`.
    pub fn empirical_cdf(&self, rx: Node, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let last_step = (t / self.dt + 1e-9).floor() as u64;
        let n = self
            .events
            .partition_point(|h| h.step <= last_step);
        let count = self.events[..n].iter().filter(|h| h.receiver == rx).count();
        count as f64 / self.total as f64
    }

    /// `empirical_cdf` on a grid of times.
    pub fn empirical_cdf_grid(&self, rx: Node, times: &[f64]) -> Vec<f64> {
        times.iter().map(|&t| self.empirical_cdf(rx, t)).collect()
    }

    /// Write the raw hits as CSV rows `molecule_id,receiver,time_s`.
    pub fn write_hits_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "molecule_id,receiver,time_s")?;
        for h in &self.events {
            writeln!(
                w,
                "{},{},{}",
                h.molecule,
                h.receiver.label(),
                crate::output::fmt_num(h.step as f64 * self.dt)
            )?;
        }
        Ok(())
    }
}

/// Signed surface distances `[to_rx1, to_rx2]`.
fn gaps(topology: &SystemTopology, centres: &[Point; 2], p: Point) -> [f64; 2] {
    [
        p.distance(centres[0]) - topology.r_r1,
        p.distance(centres[1]) - topology.r_r2,
    ]
}

/// Receiver absorbing a molecule whose step ended at gaps `g`, and whether
/// the position was inside both spheres.
fn absorbing_receiver(g: [f64; 2]) -> Option<(Node, bool)> {
    match (g[0] <= 0.0, g[1] <= 0.0) {
        (false, false) => None,
        (true, false) => Some((Node::One, false)),
        (false, true) => Some((Node::Two, false)),
        (true, true) => Some((if g[0].abs() <= g[1].abs() { Node::One } else { Node::Two }, true)),
    }
}

/// Simulate one molecule; returns `(receiver, step, double_hit)` on absorption.
fn simulate_molecule(config: &SimConfig, centres: &[Point; 2], id: u64) -> Option<(Node, u64, bool)> {
    let mut rng = molecule_rng(config.seed, id);
    let d = config.topology.diffusion;
    let step_var = 2.0 * d * config.dt;
    let mut p = config.emitter;
    let mut prev = gaps(&config.topology, centres, p);
    for step in 1..=config.n_steps() {
        p = brownian_step(p, d, config.dt, &mut rng);
        let g = gaps(&config.topology, centres, p);
        if let Some((rx, double)) = absorbing_receiver(g) {
            return Some((rx, step, double));
        }
        if config.absorption == AbsorptionCheck::BrownianBridge {
            for rx in Node::BOTH {
                let i = rx.index();
                let touch = (-2.0 * prev[i] * g[i] / step_var).exp();
                if rng.random::<f64>() < touch {
                    return Some((rx, step, false));
                }
            }
        }
        prev = g;
    }
    None
}

/// Run the particle simulation described by `config`.
pub fn run_simulation(config: &SimConfig) -> Result<ParticleRunResult> {
    config.validate()?;
    let centres = [
        config.topology.receiver_center(Node::One),
        config.topology.receiver_center(Node::Two),
    ];
    let total = config.total_molecules();
    let outcomes: Vec<Option<(Node, u64, bool)>> = (0..total as u64)
        .into_par_iter()
        .map(|id| simulate_molecule(config, &centres, id))
        .collect();

    let mut events = Vec::new();
    let mut double_hits = 0;
    for (id, outcome) in outcomes.into_iter().enumerate() {
        if let Some((receiver, step, double)) = outcome {
            double_hits += usize::from(double);
            events.push(Hit {
                molecule: id as u64,
                receiver,
                step,
            });
        }
    }
    events.sort_by_key(|h| (h.step, h.molecule));
    let mut hits: [Vec<f64>; 2] = Default::default();
    for h in &events {
        hits[h.receiver.index()].push(h.step as f64 * config.dt);
    }
    Ok(ParticleRunResult {
        survivors: total - events.len(),
        events,
        hits,
        total,
        double_hits,
        dt: config.dt,
        t_end: config.n_steps() as f64 * config.dt,
    })
}

/// Bin one emitter's hit times into `k` slots exactly like the analytic
/// channel coefficients.
pub fn empirical_channel_taps(
    result: &ParticleRunResult,
    t_s: f64,
    t_c: f64,
    k: usize,
) -> Result<EmitterTaps> {
    check_timing(t_s, t_c, k)?;
    let horizon = k as f64 * t_s;
    if result.t_end + 1e-9 * horizon < horizon {
        return Err(Error::invalid(format!(
            "simulated horizon {} s is shorter than {k} slots of {t_s} s",
            result.t_end
        )));
    }
    let mut taps = EmitterTaps::default();
    for rx in Node::BOTH {
        let f = |t: f64| result.empirical_cdf(rx, t);
        let mut p = Vec::with_capacity(k);
        let mut phi = Vec::with_capacity(k);
        for slot in 0..k {
            let t0 = slot as f64 * t_s;
            let end = f(t0 + t_s);
            p.push(end - f(t0));
            phi.push(end - f(t0 + t_c));
        }
        taps.p[rx.index()] = p;
        taps.phi[rx.index()] = phi;
    }
    Ok(taps)
}

/// Empirical hitting CDFs for both emitters.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalChannel<'a> {
    pub runs: [&'a ParticleRunResult; 2],
}

impl HittingCdf for EmpiricalChannel<'_> {
    fn cdf(&self, tx: Node, rx: Node, t: f64) -> f64 {
        self.runs[tx.index()].empirical_cdf(rx, t)
    }
}

impl EmpiricalChannel<'_> {
    pub fn coefficients(&self, t_s: f64, t_c: f64, k: usize) -> Result<ChannelCoefficients> {
        let [a, b] = self.runs;
        Ok(ChannelCoefficients {
            t_s,
            t_c,
            taps: [
                empirical_channel_taps(a, t_s, t_c, k)?,
                empirical_channel_taps(b, t_s, t_c, k)?,
            ],
        })
    }
}

/// Pool of simulated first-passage outcomes for one emitter, resampled to
/// drive the link simulation from particle data.
#[derive(Debug, Clone, PartialEq)]
pub struct HitPool {
    /// `(receiver, time)` per simulated molecule; `None` if it survived.
    outcomes: Vec<Option<(Node, f64)>>,
}

impl HitPool {
    pub fn from_run(result: &ParticleRunResult) -> Self {
        let mut outcomes = vec![None; result.total];
        for h in &result.events {
            outcomes[h.molecule as usize] = Some((h.receiver, h.step as f64 * result.dt));
        }
        Self { outcomes }
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Draw the fate of one molecule.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(Node, f64)> {
        self.outcomes[rng.random_range(0..self.outcomes.len())]
    }
}
