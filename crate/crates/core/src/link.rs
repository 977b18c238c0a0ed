//! Symbol-level Monte Carlo link simulation.
//!
//! Each node's receiver decodes the symbols of the *other* node's
//! transmitter, while the co-located transmitter leaks self-interference
//! into it. Time is divided into physical slots. In full duplex a slot is a
//! whole symbol and both transmitters emit in every slot. In half duplex a
//! symbol period is split into two half-length slots: Tx1 emits in the
//! first (even physical slots, counting from zero) and Tx2 in the second,
//! and each receiver only counts during the slot of the transmitter it
//! listens to.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};

use crate::channel::{isi_taps, ChannelCoefficients};
use crate::error::{Error, Result};
use crate::output::fmt_num;
use crate::particle::HitPool;
use crate::topology::Node;

/// Default counting-noise variance (molecules²).
pub const DEFAULT_NOISE_VAR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    /// Two levels, one bit per symbol.
    Bcsk,
    /// Four levels, two bits per symbol.
    Qcsk,
}

impl Modulation {
    pub const fn bits_per_symbol(self) -> u32 {
        match self {
            Modulation::Bcsk => 1,
            Modulation::Qcsk => 2,
        }
    }

    pub const fn alphabet(self) -> u8 {
        match self {
            Modulation::Bcsk => 2,
            Modulation::Qcsk => 4,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Modulation::Bcsk => "BCSK",
            Modulation::Qcsk => "QCSK",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Duplex {
    Half,
    Full,
}

impl Duplex {
    pub const fn name(self) -> &'static str {
        match self {
            Duplex::Half => "HD",
            Duplex::Full => "FD",
        }
    }
}

/// How arrivals are drawn from the channel coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// Independent binomial draws per emission and tap.
    #[default]
    Binomial,
    /// Moment-matched Gaussian per slot.
    Gaussian,
}

/// Detection thresholds, normalised by `n1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thresholds {
    Bcsk(f64),
    /// Strictly increasing.
    Qcsk([f64; 3]),
}

impl Thresholds {
    /// Absolute thresholds in molecules.
    pub fn absolute(&self, n1: f64) -> Vec<f64> {
        match self {
            Thresholds::Bcsk(t) => vec![t * n1],
            Thresholds::Qcsk(t) => t.iter().map(|x| x * n1).collect(),
        }
    }
}

/// Default QCSK emission levels as fractions of `n1`.
pub const QCSK_LEVELS: [f64; 4] = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];

/// Midpoints between consecutive levels.
pub fn midpoint_thresholds(levels: &[f64; 4]) -> [f64; 3] {
    [
        0.5 * (levels[0] + levels[1]),
        0.5 * (levels[1] + levels[2]),
        0.5 * (levels[2] + levels[3]),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub modulation: Modulation,
    /// Molecules for the top level.
    pub n1: u32,
    /// Symbol duration (s).
    pub t_s: f64,
    pub duplex: Duplex,
    pub thresholds: Thresholds,
    /// Emission level per QCSK symbol as a fraction of `n1`.
    pub qcsk_levels: [f64; 4],
    /// Discarding time at the start of each counting slot (s).
    pub t_c: f64,
    pub a_sic: bool,
    pub d_sic: bool,
    /// Counting-noise variance (molecules²).
    pub noise_var: f64,
    /// Channel memory in physical slots; `None` derives it from the ISI horizon.
    pub isi_taps: Option<usize>,
    pub n_symbols: usize,
    pub seed: u64,
    pub sampling: Sampling,
}

impl LinkConfig {
    /// Full-duplex BCSK with D-SIC only.
    pub fn full_duplex(n1: u32, t_s: f64, tau_m: f64) -> Self {
        Self {
            modulation: Modulation::Bcsk,
            n1,
            t_s,
            duplex: Duplex::Full,
            thresholds: Thresholds::Bcsk(tau_m),
            qcsk_levels: QCSK_LEVELS,
            t_c: 0.0,
            a_sic: false,
            d_sic: true,
            noise_var: DEFAULT_NOISE_VAR,
            isi_taps: None,
            n_symbols: 10_000,
            seed: 0,
            sampling: Sampling::Binomial,
        }
    }

    /// Half-duplex BCSK (no cancellation).
    pub fn half_duplex(n1: u32, t_s: f64, tau_m: f64) -> Self {
        Self {
            duplex: Duplex::Half,
            d_sic: false,
            ..Self::full_duplex(n1, t_s, tau_m)
        }
    }

    /// Half-duplex QCSK with midpoint thresholds.
    pub fn half_duplex_qcsk(n1: u32, t_s: f64) -> Self {
        Self {
            modulation: Modulation::Qcsk,
            thresholds: Thresholds::Qcsk(midpoint_thresholds(&QCSK_LEVELS)),
            ..Self::half_duplex(n1, t_s, 0.5)
        }
    }

    /// Duration of one physical (counting) slot.
    pub fn slot_duration(&self) -> f64 {
        match self.duplex {
            Duplex::Full => self.t_s,
            Duplex::Half => 0.5 * self.t_s,
        }
    }

    /// Channel memory in physical slots.
    pub fn taps(&self) -> usize {
        self.isi_taps.unwrap_or_else(|| isi_taps(self.slot_duration()))
    }

    /// Discarding time actually applied.
    pub fn discarding_time(&self) -> f64 {
        if self.a_sic {
            self.t_c
        } else {
            0.0
        }
    }

    /// Emission level of `symbol` as a fraction of `n1`.
    pub fn level(&self, symbol: u8) -> f64 {
        match self.modulation {
            Modulation::Bcsk => f64::from(symbol.min(1)),
            Modulation::Qcsk => self.qcsk_levels[usize::from(symbol.min(3))],
        }
    }

    /// Molecules emitted for `symbol` in binomial sampling.
    pub fn molecules(&self, symbol: u8) -> u64 {
        (self.level(symbol) * f64::from(self.n1)).round() as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 {
            return Err(Error::invalid("n1 must be at least 1"));
        }
        if !(self.t_s.is_finite() && self.t_s > 0.0) {
            return Err(Error::invalid(format!("t_s must be positive, got {}", self.t_s)));
        }
        let slot = self.slot_duration();
        if !(self.t_c >= 0.0 && self.t_c < slot) {
            return Err(Error::invalid(format!(
                "discarding time must satisfy 0 <= T_c < {slot}, got {}",
                self.t_c
            )));
        }
        if !(self.noise_var >= 0.0) {
            return Err(Error::invalid("noise variance must be non-negative"));
        }
        match (self.modulation, self.thresholds) {
            (Modulation::Bcsk, Thresholds::Bcsk(t)) => {
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::invalid(format!("tau_m must lie in [0, 1], got {t}")));
                }
            }
            (Modulation::Qcsk, Thresholds::Qcsk(t)) => {
                if !(t[0] < t[1] && t[1] < t[2]) {
                    return Err(Error::invalid(format!(
                        "QCSK thresholds must be strictly increasing, got {t:?}"
                    )));
                }
            }
            _ => return Err(Error::invalid("threshold kind does not match the modulation")),
        }
        if self.taps() == 0 {
            return Err(Error::invalid("at least one ISI tap is required"));
        }
        Ok(())
    }
}

/// Symbols of both transmitters, one entry per symbol period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolStream {
    pub tx: [Vec<u8>; 2],
}

impl SymbolStream {
    pub fn new(tx1: Vec<u8>, tx2: Vec<u8>) -> Result<Self> {
        if tx1.len() != tx2.len() {
            return Err(Error::invalid("symbol streams must have equal length"));
        }
        Ok(Self { tx: [tx1, tx2] })
    }

    /// Equiprobable i.i.d. symbols.
    pub fn random<R: Rng + ?Sized>(n: usize, modulation: Modulation, rng: &mut R) -> Self {
        let m = modulation.alphabet();
        let mut draw = || (0..n).map(|_| rng.random_range(0..m)).collect::<Vec<u8>>();
        let tx1 = draw();
        let tx2 = draw();
        Self { tx: [tx1, tx2] }
    }

    pub fn len(&self) -> usize {
        self.tx[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.tx[0].is_empty()
    }
}

/// Per physical slot, the symbol each transmitter emits (`None` = silent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub emissions: [Vec<Option<u8>>; 2],
    pub duplex: Duplex,
}

impl Schedule {
    pub fn n_slots(&self) -> usize {
        self.emissions[0].len()
    }

    /// Emitted symbol per slot with silence as 0.
    pub fn pattern(&self, tx: Node) -> Vec<u8> {
        self.emissions[tx.index()].iter().map(|s| s.unwrap_or(0)).collect()
    }

    /// Physical slot in which `rx` decodes symbol period `n`.
    pub fn decode_slot(&self, rx: Node, n: usize) -> usize {
        match self.duplex {
            Duplex::Full => n,
            Duplex::Half => 2 * n + rx.other().index(),
        }
    }
}

/// Both transmitters active in every slot.
pub fn full_duplex_schedule(stream: &SymbolStream) -> Schedule {
    Schedule {
        emissions: stream.tx.clone().map(|v| v.into_iter().map(Some).collect()),
        duplex: Duplex::Full,
    }
}

/// Alternate the transmitters: Tx1 in the first half of each symbol
/// period, Tx2 in the second.
pub fn apply_half_duplex(stream: &SymbolStream) -> Schedule {
    let n = stream.len();
    let mut emissions = [vec![None; 2 * n], vec![None; 2 * n]];
    for (k, (&a, &b)) in stream.tx[0].iter().zip(&stream.tx[1]).enumerate() {
        emissions[0][2 * k] = Some(a);
        emissions[1][2 * k + 1] = Some(b);
    }
    Schedule {
        emissions,
        duplex: Duplex::Half,
    }
}

pub fn schedule(stream: &SymbolStream, duplex: Duplex) -> Schedule {
    match duplex {
        Duplex::Full => full_duplex_schedule(stream),
        Duplex::Half => apply_half_duplex(stream),
    }
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> f64 {
    if n == 0 || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return n as f64;
    }
    Binomial::new(n, p).expect("valid binomial").sample(rng) as f64
}

fn gaussian<R: Rng + ?Sized>(mean: f64, var: f64, rng: &mut R) -> f64 {
    if var <= 0.0 {
        return mean;
    }
    Normal::new(mean, var.sqrt()).expect("valid normal").sample(rng)
}

/// Received counts per physical slot at both receivers, before digital
/// cancellation and including counting noise. Arrivals use `phi` taps when
/// analog cancellation is on and `p` taps otherwise.
pub fn emission_counts<R: Rng + ?Sized>(
    coeffs: &ChannelCoefficients,
    schedule: &Schedule,
    config: &LinkConfig,
    rng: &mut R,
) -> [Vec<f64>; 2] {
    let n_slots = schedule.n_slots();
    let k_taps = config.taps().min(coeffs.len());
    let mut y = [vec![0.0; n_slots], vec![0.0; n_slots]];
    for n in 0..n_slots {
        for rx in Node::BOTH {
            let mut mean = 0.0;
            let mut var = 0.0;
            let mut count = 0.0;
            for tx in Node::BOTH {
                let taps = coeffs.effective(tx, rx, config.a_sic);
                for k in 0..k_taps.min(n + 1) {
                    let Some(symbol) = schedule.emissions[tx.index()][n - k] else {
                        continue;
                    };
                    let p = taps[k];
                    match config.sampling {
                        Sampling::Binomial => count += binomial(config.molecules(symbol), p, rng),
                        Sampling::Gaussian => {
                            let m = config.level(symbol) * f64::from(config.n1);
                            mean += m * p;
                            var += m * p * (1.0 - p);
                        }
                    }
                }
            }
            let signal = match config.sampling {
                Sampling::Binomial => count,
                Sampling::Gaussian => gaussian(mean, var, rng),
            };
            y[rx.index()][n] = signal + gaussian(0.0, config.noise_var, rng);
        }
    }
    y
}

/// Slot index (from emission) and intra-slot time of an absorption at `t`.
/// A hit exactly on a boundary belongs to the slot that ends there.
fn slot_of(t: f64, slot: f64) -> (usize, f64) {
    let k = ((t / slot) - 1e-9).ceil().max(1.0) as usize - 1;
    (k, t - k as f64 * slot)
}

/// Number of intra-slot absorption times kept after discarding those at or
/// before `t_c`.
pub fn a_sic_filter(intra_slot_times: &[f64], t_c: f64) -> usize {
    intra_slot_times.iter().filter(|&&t| t > t_c).count()
}

/// Remove the expected current-symbol self-interference.
pub fn d_sic_subtract(count: f64, own_level: f64, n1: f64, phi_own_0: f64) -> f64 {
    count - n1 * phi_own_0 * own_level
}

/// Counts driven by resampled particle hit times.
pub fn physical_counts<R: Rng + ?Sized>(
    pools: [&HitPool; 2],
    schedule: &Schedule,
    config: &LinkConfig,
    rng: &mut R,
) -> [Vec<f64>; 2] {
    let n_slots = schedule.n_slots();
    let slot = config.slot_duration();
    let t_c = config.discarding_time();
    let mut intra: [Vec<Vec<f64>>; 2] = [vec![Vec::new(); n_slots], vec![Vec::new(); n_slots]];
    for tx in Node::BOTH {
        for (m, symbol) in schedule.emissions[tx.index()].iter().enumerate() {
            let Some(symbol) = *symbol else { continue };
            for _ in 0..config.molecules(symbol) {
                if let Some((rx, t)) = pools[tx.index()].draw(rng) {
                    let (k, within) = slot_of(t, slot);
                    if m + k < n_slots {
                        intra[rx.index()][m + k].push(within);
                    }
                }
            }
        }
    }
    let mut y = [vec![0.0; n_slots], vec![0.0; n_slots]];
    for rx in Node::BOTH {
        for n in 0..n_slots {
            let kept = a_sic_filter(&intra[rx.index()][n], t_c) as f64;
            y[rx.index()][n] = kept + gaussian(0.0, config.noise_var, rng);
        }
    }
    y
}

/// Threshold detection. Values equal to a threshold fall below it.
pub fn detect(value: f64, config: &LinkConfig) -> u8 {
    let n1 = f64::from(config.n1);
    config
        .thresholds
        .absolute(n1)
        .iter()
        .filter(|&&tau| value > tau)
        .count() as u8
}

/// Where arrivals come from.
#[derive(Debug, Clone, Copy)]
pub enum LinkChannel<'a> {
    /// Sampled from analytic (or empirical) channel coefficients.
    Coefficients(&'a ChannelCoefficients),
    /// Resampled particle first-passage outcomes, one pool per emitter.
    /// `reference` supplies the expected self-interference used by digital
    /// cancellation.
    Physical {
        pools: [&'a HitPool; 2],
        reference: &'a ChannelCoefficients,
    },
}

impl<'a> LinkChannel<'a> {
    fn coefficients(&self) -> &'a ChannelCoefficients {
        match *self {
            LinkChannel::Coefficients(c) => c,
            LinkChannel::Physical { reference, .. } => reference,
        }
    }
}

/// One decoded symbol period.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRecord {
    pub symbol: usize,
    pub tx: [u8; 2],
    /// Value compared against the thresholds, per receiver.
    pub y: [f64; 2],
    /// Decision per receiver (Rx1 estimates Tx2's symbol and vice versa).
    pub decision: [u8; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport {
    /// Symbol errors per receiver.
    pub errors: [usize; 2],
    /// Decoded symbols per receiver.
    pub symbols: usize,
    pub records: Vec<SlotRecord>,
}

impl LinkReport {
    /// Symbol error rate at `rx`.
    pub fn error_rate(&self, rx: Node) -> f64 {
        self.errors[rx.index()] as f64 / self.symbols as f64
    }

    /// Symbol error rate pooled over both receivers.
    pub fn pooled_error_rate(&self) -> f64 {
        (self.errors[0] + self.errors[1]) as f64 / (2 * self.symbols) as f64
    }

    /// Binomial standard error of the pooled rate at probability `p`.
    pub fn standard_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / (2 * self.symbols) as f64).sqrt()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "slot,tx1_bit,tx2_bit,y_rx1,y_rx2,decision_rx1,decision_rx2")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.symbol,
                r.tx[0],
                r.tx[1],
                fmt_num(r.y[0]),
                fmt_num(r.y[1]),
                r.decision[0],
                r.decision[1]
            )?;
        }
        Ok(())
    }
}

/// Simulate `config.n_symbols` symbol periods (after a warm-up of one
/// channel memory of random symbols) and count decision errors.
pub fn run_link(config: &LinkConfig, channel: LinkChannel<'_>, keep_records: bool) -> Result<LinkReport> {
    config.validate()?;
    {
        let c = channel.coefficients();
        if c.len() < config.taps() {
            return Err(Error::invalid(format!(
                "channel has {} taps but the link needs {}",
                c.len(),
                config.taps()
            )));
        }
        let slot = config.slot_duration();
        if (c.t_s - slot).abs() > 1e-12 * slot {
            return Err(Error::invalid(format!(
                "channel slot {} s does not match the link slot {slot} s",
                c.t_s
            )));
        }
        if config.a_sic && (c.t_c - config.t_c).abs() > 1e-12 * slot {
            return Err(Error::invalid(format!(
                "channel discarding time {} s does not match the link's {} s",
                c.t_c, config.t_c
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let warmup = config.taps();
    let total = warmup + config.n_symbols;
    let stream = SymbolStream::random(total, config.modulation, &mut rng);
    let sched = schedule(&stream, config.duplex);
    let counts = match channel {
        LinkChannel::Coefficients(c) => emission_counts(c, &sched, config, &mut rng),
        LinkChannel::Physical { pools, .. } => physical_counts(pools, &sched, config, &mut rng),
    };

    let n1 = f64::from(config.n1);
    let own_current = |rx: Node| channel.coefficients().effective(rx, rx, config.a_sic)[0];
    let mut errors = [0usize; 2];
    let mut records = Vec::new();
    for n in warmup..total {
        let mut y = [0.0; 2];
        let mut decision = [0u8; 2];
        for rx in Node::BOTH {
            let slot = sched.decode_slot(rx, n);
            let mut value = counts[rx.index()][slot];
            if config.d_sic {
                if let Some(own) = sched.emissions[rx.index()][slot] {
                    value = d_sic_subtract(value, config.level(own), n1, own_current(rx));
                }
            }
            let d = detect(value, config);
            if d != stream.tx[rx.other().index()][n] {
                errors[rx.index()] += 1;
            }
            y[rx.index()] = value;
            decision[rx.index()] = d;
        }
        if keep_records {
            records.push(SlotRecord {
                symbol: n - warmup,
                tx: [stream.tx[0][n], stream.tx[1][n]],
                y,
                decision,
            });
        }
    }
    Ok(LinkReport {
        errors,
        symbols: config.n_symbols,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_tap() -> ChannelCoefficients {
        let one = vec![1.0, 0.0];
        let zero = vec![0.0, 0.0];
        ChannelCoefficients::from_taps(
            0.1,
            0.0,
            [[zero.clone(), one.clone()], [one.clone(), zero.clone()]],
            [[zero.clone(), one.clone()], [one, zero]],
        )
        .unwrap()
    }

    #[test]
    fn half_duplex_alternates() {
        let s = SymbolStream::new(vec![1, 1], vec![1, 1]).unwrap();
        let sched = apply_half_duplex(&s);
        assert_eq!(sched.pattern(Node::One), vec![1, 0, 1, 0]);
        assert_eq!(sched.pattern(Node::Two), vec![0, 1, 0, 1]);
        assert_eq!(sched.decode_slot(Node::Two, 1), 2);
        assert_eq!(sched.decode_slot(Node::One, 1), 3);
    }

    #[test]
    fn silent_streams_give_zero_counts() {
        let mut config = LinkConfig::full_duplex(500, 0.1, 0.5);
        config.noise_var = 0.0;
        config.isi_taps = Some(2);
        let s = SymbolStream::new(vec![0; 20], vec![0; 20]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = emission_counts(&single_tap(), &full_duplex_schedule(&s), &config, &mut rng);
        assert!(y.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn certain_tap_delivers_everything() {
        let mut config = LinkConfig::full_duplex(500, 0.1, 0.5);
        config.noise_var = 0.0;
        config.isi_taps = Some(2);
        let s = SymbolStream::new(vec![1, 0, 1], vec![0, 0, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = emission_counts(&single_tap(), &full_duplex_schedule(&s), &config, &mut rng);
        assert_eq!(y[1], vec![500.0, 0.0, 500.0]);
        assert_eq!(y[0], vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn detection_boundaries() {
        let config = LinkConfig::full_duplex(500, 0.1, 0.5);
        assert_eq!(detect(250.0, &config), 0);
        assert_eq!(detect(300.0, &config), 1);
        let mut q = LinkConfig::half_duplex_qcsk(500, 0.2);
        q.thresholds = Thresholds::Qcsk([0.25, 0.5, 0.75]);
        assert_eq!(detect(260.0, &q), 2);
        assert_eq!(detect(125.0, &q), 0);
        assert_eq!(detect(400.0, &q), 3);
    }

    #[test]
    fn cancellation_helpers() {
        assert_eq!(a_sic_filter(&[0.01, 0.02, 0.05], 0.0), 3);
        assert_eq!(a_sic_filter(&[0.01, 0.02, 0.05], 0.02), 1);
        assert_eq!(a_sic_filter(&[0.01, 0.02, 0.05], 0.1), 0);
        assert_eq!(d_sic_subtract(37.0, 0.0, 500.0, 0.2), 37.0);
        assert_eq!(d_sic_subtract(100.0, 1.0, 500.0, 0.2), 0.0);
    }

    #[test]
    fn slot_boundaries() {
        assert_eq!(slot_of(0.05, 0.1).0, 0);
        assert_eq!(slot_of(0.1, 0.1).0, 0);
        assert_eq!(slot_of(0.1000001, 0.1).0, 1);
        assert_eq!(slot_of(0.3, 0.1).0, 2);
    }

    #[test]
    fn noiseless_single_tap_link_is_error_free() {
        let mut config = LinkConfig::full_duplex(500, 0.1, 0.5);
        config.noise_var = 0.0;
        config.isi_taps = Some(2);
        config.d_sic = false;
        config.n_symbols = 500;
        let r = run_link(&config, LinkChannel::Coefficients(&single_tap()), true).unwrap();
        assert_eq!(r.errors, [0, 0]);
        assert_eq!(r.records.len(), 500);
    }

    #[test]
    fn config_validation() {
        let mut c = LinkConfig::full_duplex(500, 0.1, 0.5);
        c.t_c = 0.1;
        assert!(c.validate().is_err());
        let mut q = LinkConfig::half_duplex_qcsk(500, 0.2);
        q.thresholds = Thresholds::Qcsk([0.5, 0.5, 0.7]);
        assert!(q.validate().is_err());
        q.thresholds = Thresholds::Bcsk(0.5);
        assert!(q.validate().is_err());
    }
}
