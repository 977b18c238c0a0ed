//! Time-dependent hitting CDF for two absorbing receivers.
//!
//! Re-absorption by the other receiver is approximated by pinning each
//! receiver's exit point to a fixed virtual point. The two virtual
//! distances are chosen so that the CDFs converge to the exact capture
//! probabilities, and the resulting renewal equations have a closed-form
//! inverse Laplace transform that is a sum of piecewise Gaussian brackets.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::erfc;
use crate::topology::{Node, SystemTopology};

use super::capture::CaptureProbabilities;

/// Default truncation of the bracket sum.
pub const DEFAULT_BRACKET_TERMS: usize = 100_000;

/// Once the lower end of a bracket is this many diffusion lengths out,
/// every remaining bracket is below double precision.
const NEGLIGIBLE_ARGUMENT: f64 = 27.0;

/// Surface distances from the virtual points to the opposite receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualDistances {
    /// From the virtual exit point on Rx1 to Rx2 (µm).
    pub from_rx1_to_rx2: f64,
    /// From the virtual exit point on Rx2 to Rx1 (µm).
    pub from_rx2_to_rx1: f64,
}

/// Surface distances from the emitter to both receivers; `[to_rx1, to_rx2]`.
fn emitter_distances(topology: &SystemTopology, tx: Node) -> [f64; 2] {
    let p = topology.transmitter(tx);
    [
        topology.surface_distance(p, Node::One),
        topology.surface_distance(p, Node::Two),
    ]
}

/// Solve for the two virtual distances that make the asymptotic CDFs
/// equal to `caps`.
pub fn virtual_point_distances(
    caps: &CaptureProbabilities,
    topology: &SystemTopology,
    tx: Node,
) -> Result<VirtualDistances> {
    let [d_to_rx1, d_to_rx2] = emitter_distances(topology, tx);
    solve_virtual(caps.k1, caps.k2, topology.r_r1, topology.r_r2, d_to_rx1, d_to_rx2)
}

pub(crate) fn solve_virtual(
    k1: f64,
    k2: f64,
    r1: f64,
    r2: f64,
    d_to_rx1: f64,
    d_to_rx2: f64,
) -> Result<VirtualDistances> {
    let sum = k1 + k2;
    let den2 = r2 * (1.0 - k2) - d_to_rx2 * k2;
    let den1 = r1 * (1.0 - k1) - d_to_rx1 * k1;
    for (name, den) in [("Rx1 -> Rx2", den2), ("Rx2 -> Rx1", den1)] {
        if !(den > 0.0) {
            return Err(Error::Degenerate(format!(
                "virtual distance {name} has non-positive denominator {den} (k1 = {k1}, k2 = {k2})"
            )));
        }
    }
    let from_rx1_to_rx2 = (r2 * r2 * (sum - 1.0) + r2 * d_to_rx2 * sum) / den2;
    let from_rx2_to_rx1 = (r1 * r1 * (sum - 1.0) + r1 * d_to_rx1 * sum) / den1;
    for (name, d) in [("Rx1 -> Rx2", from_rx1_to_rx2), ("Rx2 -> Rx1", from_rx2_to_rx1)] {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::Degenerate(format!(
                "virtual distance {name} is not positive: {d} (k1 = {k1}, k2 = {k2})"
            )));
        }
    }
    Ok(VirtualDistances {
        from_rx1_to_rx2,
        from_rx2_to_rx1,
    })
}

/// Asymptotic CDFs `(F1(∞), F2(∞))` implied by a set of virtual distances.
/// This is the forward map that [`virtual_point_distances`] inverts.
pub fn asymptotic_from_virtual(
    v: &VirtualDistances,
    r1: f64,
    r2: f64,
    d_to_rx1: f64,
    d_to_rx2: f64,
) -> (f64, f64) {
    let g1 = r1 / (r1 + d_to_rx1);
    let g2 = r2 / (r2 + d_to_rx2);
    let h1 = r1 / (r1 + v.from_rx2_to_rx1);
    let h2 = r2 / (r2 + v.from_rx1_to_rx2);
    let den = 1.0 - h1 * h2;
    ((g1 - h1 * g2) / den, (g2 - h2 * g1) / den)
}

/// Coefficients of the bracket series for one emitter. Lengths divided by
/// `√D` are in s^½.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCoefficients {
    /// Round-trip amplification factor; always greater than one.
    pub ratio: f64,
    /// Negative round-trip delay `-(d'12 + d'21)/√D`.
    pub delay: f64,
    /// Direct offsets `d_tx→rx_i / √D`, per receiver.
    pub direct_offset: [f64; 2],
    /// Offsets of the reflected path, per receiver.
    pub image_offset: [f64; 2],
    /// Weight of the direct bracket series, per receiver.
    pub direct_weight: [f64; 2],
    /// Weight of the reflected bracket series, per receiver.
    pub image_weight: [f64; 2],
    pub virtual_distances: VirtualDistances,
}

/// Build the series coefficients for emitter `tx`.
pub fn series_coefficients(
    topology: &SystemTopology,
    tx: Node,
    v: &VirtualDistances,
) -> SeriesCoefficients {
    let [d1, d2] = emitter_distances(topology, tx);
    coefficients_from_distances(topology.r_r1, topology.r_r2, d1, d2, topology.diffusion, v)
}

pub(crate) fn coefficients_from_distances(
    r1: f64,
    r2: f64,
    d_to_rx1: f64,
    d_to_rx2: f64,
    diffusion: f64,
    v: &VirtualDistances,
) -> SeriesCoefficients {
    let sd = diffusion.sqrt();
    let p1 = v.from_rx1_to_rx2;
    let p2 = v.from_rx2_to_rx1;
    let a = (r1 + p2) * (r2 + p1) / (r1 * r2);
    let scale = a / (a - 1.0);
    SeriesCoefficients {
        ratio: a,
        delay: -(p1 + p2) / sd,
        direct_offset: [d_to_rx1 / sd, d_to_rx2 / sd],
        image_offset: [(p2 + d_to_rx2) / sd, (p1 + d_to_rx1) / sd],
        direct_weight: [scale * r1 / (r1 + d_to_rx1), scale * r2 / (r2 + d_to_rx2)],
        image_weight: [
            scale * r1 * r2 / ((r2 + d_to_rx2) * (r1 + p2)),
            scale * r1 * r2 / ((r1 + d_to_rx1) * (r2 + p1)),
        ],
        virtual_distances: *v,
    }
}

impl SeriesCoefficients {
    /// Same coefficients with receiver labels exchanged.
    pub fn swapped(&self) -> Self {
        let sw = |x: [f64; 2]| [x[1], x[0]];
        Self {
            direct_offset: sw(self.direct_offset),
            image_offset: sw(self.image_offset),
            direct_weight: sw(self.direct_weight),
            image_weight: sw(self.image_weight),
            virtual_distances: VirtualDistances {
                from_rx1_to_rx2: self.virtual_distances.from_rx2_to_rx1,
                from_rx2_to_rx1: self.virtual_distances.from_rx1_to_rx2,
            },
            ..*self
        }
    }

    /// Sum of brackets `[H_n(u)]` over `n = -1, -2, ...` for offset `b`,
    /// not yet divided by `√(πt)`.
    fn bracket_sum(&self, b: f64, t: f64, n_terms: usize) -> f64 {
        let a = self.ratio;
        let delay = self.delay;
        let four_t = 4.0 * t;
        let sqrt_four_t = four_t.sqrt();
        let sqrt_pi_t = (PI * t).sqrt();
        let mut total = 0.0;
        let mut a_n = 1.0;
        for k in 1..=n_terms {
            let n = -(k as f64);
            a_n /= a;
            let gain = a_n - 1.0;
            let ramp = delay / (a - 1.0) * (n * a_n * a - (n + 1.0) * a_n + 1.0);
            let hi = b + n * delay;
            let lo = b + (n + 1.0) * delay;
            let poly = |u: f64| (gain * (b - u) + ramp) * (-u * u / four_t).exp();
            // erf(hi) - erf(lo) written with erfc keeps full relative accuracy
            // far out in the tail.
            let erf_diff = erfc(lo / sqrt_four_t) - erfc(hi / sqrt_four_t);
            total += poly(hi) - poly(lo) + gain * sqrt_pi_t * erf_diff;
            if lo / sqrt_four_t > NEGLIGIBLE_ARGUMENT {
                break;
            }
        }
        total
    }

    /// Hitting CDF at receiver `rx` at time `t` (s).
    pub fn cdf(&self, rx: Node, t: f64, n_terms: usize) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let i = rx.index();
        let norm = (PI * t).sqrt();
        let direct = self.bracket_sum(self.direct_offset[i], t, n_terms);
        let image = self.bracket_sum(self.image_offset[i], t, n_terms);
        (-self.direct_weight[i] * direct + self.image_weight[i] * image) / norm
    }
}

/// Hitting CDF at receiver `rx` from the bracket series, truncated after
/// `n_terms` brackets.
pub fn two_receiver_cdf(coeffs: &SeriesCoefficients, rx: Node, t: f64, n_terms: usize) -> f64 {
    coeffs.cdf(rx, t, n_terms)
}
