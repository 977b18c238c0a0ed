//! Analytic channel model for two absorbing receivers.

mod capture;
mod coefficients;
mod series;

pub use capture::{
    capture_probabilities, single_receiver_cdf, CaptureProbabilities, DEFAULT_LEGENDRE_TERMS,
};
pub use coefficients::{
    channel_coefficients, isi_taps, ChannelCoefficients, EmitterTaps, HittingCdf, ISI_HORIZON_S,
};
pub use series::{
    asymptotic_from_virtual, series_coefficients, two_receiver_cdf, virtual_point_distances,
    SeriesCoefficients, VirtualDistances, DEFAULT_BRACKET_TERMS,
};

pub(crate) use coefficients::check_timing;

use crate::error::Result;
use crate::topology::{Node, SystemTopology};

/// Hitting-time model for the molecules of one emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EmitterChannel {
    /// The emitter sits on the surface of `rx`: every molecule is absorbed
    /// there at `t = 0⁺`.
    OnSurface { rx: Node },
    Series(SeriesCoefficients),
}

/// Analytic channel for both emitters of a topology.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub topology: SystemTopology,
    /// Indexed by emitter.
    pub capture: [CaptureProbabilities; 2],
    /// Indexed by emitter.
    pub emitters: [EmitterChannel; 2],
    /// Truncation of the bracket sum.
    pub n_terms: usize,
}

impl ChannelModel {
    pub fn new(topology: &SystemTopology) -> Result<Self> {
        Self::with_truncation(topology, DEFAULT_LEGENDRE_TERMS, DEFAULT_BRACKET_TERMS)
    }

    pub fn with_truncation(
        topology: &SystemTopology,
        m_max: usize,
        n_terms: usize,
    ) -> Result<Self> {
        topology.validate()?;
        let mut capture = [None, None];
        let mut emitters = [None, None];
        for tx in Node::BOTH {
            let caps = capture_probabilities(topology, topology.transmitter(tx), m_max)?;
            let own_gap = match tx {
                Node::One => topology.d1,
                Node::Two => topology.d2,
            };
            let channel = if own_gap == 0.0 {
                EmitterChannel::OnSurface { rx: tx }
            } else {
                let v = virtual_point_distances(&caps, topology, tx)?;
                EmitterChannel::Series(series_coefficients(topology, tx, &v))
            };
            capture[tx.index()] = Some(caps);
            emitters[tx.index()] = Some(channel);
        }
        Ok(Self {
            topology: *topology,
            capture: capture.map(Option::unwrap),
            emitters: emitters.map(Option::unwrap),
            n_terms,
        })
    }

    /// Eventual absorption probability at `rx` for molecules from `tx`.
    pub fn capture(&self, tx: Node, rx: Node) -> f64 {
        self.capture[tx.index()].get(rx)
    }

    pub fn series(&self, tx: Node) -> Option<&SeriesCoefficients> {
        match &self.emitters[tx.index()] {
            EmitterChannel::Series(c) => Some(c),
            EmitterChannel::OnSurface { .. } => None,
        }
    }

    /// Tabulate channel coefficients with `k` slots of duration `t_s`.
    pub fn coefficients(&self, t_s: f64, t_c: f64, k: usize) -> Result<ChannelCoefficients> {
        channel_coefficients(self, t_s, t_c, k)
    }
}

impl HittingCdf for ChannelModel {
    fn cdf(&self, tx: Node, rx: Node, t: f64) -> f64 {
        match &self.emitters[tx.index()] {
            EmitterChannel::OnSurface { rx: hit } => {
                if t > 0.0 && *hit == rx {
                    1.0
                } else {
                    0.0
                }
            }
            EmitterChannel::Series(c) => c.cdf(rx, t, self.n_terms),
        }
    }
}
