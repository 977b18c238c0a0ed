//! Error probability under the Gaussian approximation.
//!
//! The count in a decoding slot is a sum of independent binomials, one per
//! past emission and tap, plus counting noise. Conditioned on the symbol
//! history it is approximated by a Gaussian. The error probability then
//! averages the Gaussian tail mass beyond the detection thresholds over
//! every history, weighting each by its prior probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelCoefficients;
use crate::error::{Error, Result};
use crate::link::{Duplex, LinkConfig, Modulation, Thresholds};
use crate::special::q_function;
use crate::topology::Node;

/// Mean and variance of a decoding-slot count given the symbol history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSlotStats {
    pub mu: f64,
    pub sigma_sq: f64,
}

/// Taps seen by one receiver in its decoding slot, indexed by symbol lag.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeTaps {
    /// From the transmitter being decoded; entry 0 is the current symbol.
    pub desired: Vec<f64>,
    /// From the co-located transmitter, most recent emission first.
    pub own: Vec<f64>,
    /// Whether `own[0]` is the co-located transmitter's current symbol,
    /// which digital cancellation removes.
    pub own_current: bool,
}

/// Map physical-slot taps to symbol lags for the receiver `rx`.
pub fn decode_taps(coeffs: &ChannelCoefficients, config: &LinkConfig, rx: Node) -> DecodeTaps {
    let k = config.taps().min(coeffs.len());
    let desired = &coeffs.effective(rx.other(), rx, config.a_sic)[..k];
    let own = &coeffs.effective(rx, rx, config.a_sic)[..k];
    match config.duplex {
        Duplex::Full => DecodeTaps {
            desired: desired.to_vec(),
            own: own.to_vec(),
            own_current: true,
        },
        Duplex::Half => DecodeTaps {
            desired: desired.iter().step_by(2).copied().collect(),
            own: own.iter().skip(1).step_by(2).copied().collect(),
            own_current: false,
        },
    }
}

/// Gaussian statistics of the decoding-slot value for the given histories
/// (most recent symbol first). Histories shorter than the tap lists are
/// padded with silence.
pub fn slot_stats(
    desired_history: &[u8],
    own_history: &[u8],
    taps: &DecodeTaps,
    config: &LinkConfig,
) -> GaussianSlotStats {
    let n1 = f64::from(config.n1);
    let mut mu = 0.0;
    let mut var = config.noise_var;
    for (hist, tap) in [(desired_history, &taps.desired), (own_history, &taps.own)] {
        for (&s, &c) in hist.iter().zip(tap.iter()) {
            let m = n1 * config.level(s);
            mu += m * c;
            var += m * c * (1.0 - c);
        }
    }
    if config.d_sic && taps.own_current {
        if let (Some(&s), Some(&c)) = (own_history.first(), taps.own.first()) {
            mu -= n1 * config.level(s) * c;
        }
    }
    GaussianSlotStats { mu, sigma_sq: var }
}

/// `P(value > tau)` for a Gaussian value.
fn tail_above(tau: f64, mu: f64, sigma: f64) -> f64 {
    if sigma > 0.0 {
        q_function((tau - mu) / sigma)
    } else if mu > tau {
        1.0
    } else {
        0.0
    }
}

/// Probability that the detector does not return `symbol`.
fn error_given(symbol: u8, thresholds: &[f64], mu: f64, sigma: f64) -> f64 {
    let s = usize::from(symbol);
    let below = if s == 0 { 0.0 } else { 1.0 - tail_above(thresholds[s - 1], mu, sigma) };
    let above = if s == thresholds.len() { 0.0 } else { tail_above(thresholds[s], mu, sigma) };
    (below + above).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerOptions {
    /// Largest number of history bits enumerated exhaustively.
    pub enumeration_cap: usize,
    /// Histories sampled beyond the cap; `None` turns the cap into an error.
    pub fallback_samples: Option<usize>,
    /// Seed for sampled histories.
    pub seed: u64,
}

impl Default for BerOptions {
    fn default() -> Self {
        Self {
            enumeration_cap: 12,
            fallback_samples: Some(100_000),
            seed: 0,
        }
    }
}

impl BerOptions {
    /// Exhaustive enumeration only.
    pub fn exact() -> Self {
        Self {
            fallback_samples: None,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Component {
    weight: f64,
    mu: f64,
    sigma: f64,
    symbol: u8,
}

/// Gaussian mixture of decoding-slot values for both receivers, ready to
/// be evaluated at any thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct BerEvaluator {
    pub config: LinkConfig,
    components: [Vec<Component>; 2],
    /// Number of histories per receiver.
    pub histories: usize,
    /// Whether every history was enumerated.
    pub exact: bool,
}

impl BerEvaluator {
    pub fn new(coeffs: &ChannelCoefficients, config: &LinkConfig, options: &BerOptions) -> Result<Self> {
        config.validate()?;
        if coeffs.len() < config.taps() {
            return Err(Error::invalid(format!(
                "channel has {} taps but the configuration needs {}",
                coeffs.len(),
                config.taps()
            )));
        }
        let alphabet = config.modulation.alphabet();
        let bits_per = config.modulation.bits_per_symbol() as usize;
        let mut components: [Vec<Component>; 2] = Default::default();
        let mut histories = 0;
        let mut exact = true;
        for rx in Node::BOTH {
            let taps = decode_taps(coeffs, config, rx);
            let nd = taps.desired.len();
            let no = taps.own.len();
            let bits = (nd + no) * bits_per;
            let mut hist_d = vec![0u8; nd];
            let mut hist_o = vec![0u8; no];
            let push = |hist_d: &[u8], hist_o: &[u8], weight: f64, out: &mut Vec<Component>| {
                let st = slot_stats(hist_d, hist_o, &taps, config);
                out.push(Component {
                    weight,
                    mu: st.mu,
                    sigma: st.sigma_sq.max(0.0).sqrt(),
                    symbol: hist_d[0],
                });
            };
            let out = &mut components[rx.index()];
            if bits <= options.enumeration_cap {
                let total = usize::from(alphabet).pow((nd + no) as u32);
                let weight = 1.0 / total as f64;
                for index in 0..total {
                    let mut rem = index;
                    for s in hist_d.iter_mut().chain(hist_o.iter_mut()) {
                        *s = (rem % usize::from(alphabet)) as u8;
                        rem /= usize::from(alphabet);
                    }
                    push(&hist_d, &hist_o, weight, out);
                }
                histories = total;
            } else {
                let Some(samples) = options.fallback_samples else {
                    return Err(Error::Intractable {
                        bits,
                        cap: options.enumeration_cap,
                    });
                };
                exact = false;
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ (rx.index() as u64));
                let weight = 1.0 / (samples * usize::from(alphabet)) as f64;
                for _ in 0..samples {
                    for s in hist_d.iter_mut().skip(1).chain(hist_o.iter_mut()) {
                        *s = rng.random_range(0..alphabet);
                    }
                    for current in 0..alphabet {
                        hist_d[0] = current;
                        push(&hist_d, &hist_o, weight, out);
                    }
                }
                histories = samples * usize::from(alphabet);
            }
        }
        Ok(Self {
            config: config.clone(),
            components,
            histories,
            exact,
        })
    }

    /// Symbol error probability at receiver `rx` for the given thresholds.
    pub fn error_at(&self, rx: Node, thresholds: &Thresholds) -> f64 {
        let taus = thresholds.absolute(f64::from(self.config.n1));
        self.components[rx.index()]
            .iter()
            .map(|c| c.weight * error_given(c.symbol, &taus, c.mu, c.sigma))
            .sum()
    }

    /// Symbol error probability averaged over both receivers.
    pub fn error(&self, thresholds: &Thresholds) -> f64 {
        0.5 * (self.error_at(Node::One, thresholds) + self.error_at(Node::Two, thresholds))
    }

    /// BCSK error probability at normalised threshold `tau_m`.
    pub fn ber(&self, tau_m: f64) -> f64 {
        self.error(&Thresholds::Bcsk(tau_m))
    }

    /// Error probability at the configured thresholds.
    pub fn configured(&self) -> f64 {
        self.error(&self.config.thresholds)
    }

    /// Conditional mean count for each emitted symbol of the decoded
    /// transmitter, averaged over histories.
    pub fn mean_by_symbol(&self) -> Vec<f64> {
        let m = usize::from(self.config.modulation.alphabet());
        let mut sum = vec![0.0; m];
        let mut w = vec![0.0; m];
        for comps in &self.components {
            for c in comps {
                sum[usize::from(c.symbol)] += c.weight * c.mu;
                w[usize::from(c.symbol)] += c.weight;
            }
        }
        sum.iter().zip(&w).map(|(s, w)| s / w).collect()
    }

    pub fn report(&self, thresholds: &Thresholds) -> BerReport {
        let per = [self.error_at(Node::One, thresholds), self.error_at(Node::Two, thresholds)];
        let ber = 0.5 * (per[0] + per[1]);
        let bits = self.config.modulation.bits_per_symbol();
        BerReport {
            ber,
            per_receiver: per,
            throughput: throughput(bits, ber, self.config.t_s),
            bits_per_symbol: bits,
            t_s: self.config.t_s,
            t_c: self.config.discarding_time(),
            n1: self.config.n1,
            duplex: self.config.duplex,
            modulation: self.config.modulation,
            thresholds: *thresholds,
            enumeration_size: self.histories,
            exact: self.exact,
        }
    }
}

/// Error probability and throughput at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerReport {
    /// Symbol error probability averaged over both receivers.
    pub ber: f64,
    pub per_receiver: [f64; 2],
    /// Bits per second per direction.
    pub throughput: f64,
    pub bits_per_symbol: u32,
    pub t_s: f64,
    pub t_c: f64,
    pub n1: u32,
    pub duplex: Duplex,
    pub modulation: Modulation,
    pub thresholds: Thresholds,
    /// Histories evaluated per receiver.
    pub enumeration_size: usize,
    pub exact: bool,
}

/// Error probability at the configured thresholds.
pub fn theoretical_ber(
    config: &LinkConfig,
    coeffs: &ChannelCoefficients,
    options: &BerOptions,
) -> Result<BerReport> {
    let eval = BerEvaluator::new(coeffs, config, options)?;
    Ok(eval.report(&config.thresholds))
}

/// `bits_per_symbol · (1 − ber) / t_s`.
pub fn throughput(bits_per_symbol: u32, ber: f64, t_s: f64) -> f64 {
    f64::from(bits_per_symbol) * (1.0 - ber) / t_s
}
