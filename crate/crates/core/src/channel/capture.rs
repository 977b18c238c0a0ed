//! Single-receiver hitting CDF and the two-receiver capture probabilities.

use crate::error::{Error, Result};
use crate::special::{erfc, Legendre};
use crate::topology::{build_frame, to_bispherical, Node, Point, SystemTopology};

/// Default truncation of the Legendre series.
pub const DEFAULT_LEGENDRE_TERMS: usize = 100_000;

/// The series stops as soon as the remaining tail is provably below this.
const TAIL_TOLERANCE: f64 = 1e-16;

/// Positions this close to a receiver surface (relative to its radius) are
/// treated as lying on it.
const SURFACE_RTOL: f64 = 1e-12;

/// Fraction of molecules released at distance `d` from the surface of an
/// isolated absorbing sphere of radius `r` that are absorbed by time `t`.
pub fn single_receiver_cdf(r: f64, d: f64, diffusion: f64, t: f64) -> f64 {
    if d <= 0.0 {
        return if t > 0.0 || d < 0.0 { 1.0 } else { 0.0 };
    }
    if t <= 0.0 {
        return 0.0;
    }
    r / (r + d) * erfc(d / (4.0 * diffusion * t).sqrt())
}

/// Eventual absorption probabilities at Rx1 and Rx2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaptureProbabilities {
    pub k1: f64,
    pub k2: f64,
    /// Upper bound on the absolute truncation error of each value.
    pub truncation_bound: f64,
    /// Number of series terms summed.
    pub terms: usize,
}

impl CaptureProbabilities {
    pub fn get(&self, rx: Node) -> f64 {
        match rx {
            Node::One => self.k1,
            Node::Two => self.k2,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            k1: self.k2,
            k2: self.k1,
            ..*self
        }
    }
}

/// Capture probabilities for a molecule released at `tx`, summing at most
/// `m_max` Legendre terms.
pub fn capture_probabilities(
    topology: &SystemTopology,
    tx: Point,
    m_max: usize,
) -> Result<CaptureProbabilities> {
    if m_max == 0 {
        return Err(Error::invalid("m_max must be at least 1"));
    }
    for rx in Node::BOTH {
        let gap = topology.surface_distance(tx, rx);
        let r = topology.radius(rx);
        if gap.abs() <= SURFACE_RTOL * r {
            let (k1, k2) = match rx {
                Node::One => (1.0, 0.0),
                Node::Two => (0.0, 1.0),
            };
            return Ok(CaptureProbabilities {
                k1,
                k2,
                truncation_bound: 0.0,
                terms: 0,
            });
        }
        if gap < 0.0 {
            return Err(Error::Domain(format!(
                "emitter {tx} lies inside Rx{rx} (surface distance {gap})"
            )));
        }
    }

    let frame = build_frame(topology)?;
    let pos = to_bispherical(tx, &frame)?;
    let (mu0, mu1, mu2) = (pos.mu, frame.mu1, frame.mu2);
    let prefactor = (2.0 * (mu0.cosh() - pos.eta.cos())).sqrt();

    // Each term carries sinh(h x) / sinh(h y) with 0 <= x < y; written as
    // exp(h (x - y)) * expm1(-2 h x) / expm1(-2 h y) it never overflows.
    let span = mu1 + mu2;
    let to_rx1 = mu0 + mu2;
    let to_rx2 = mu1 - mu0;
    let decay1 = mu0 - 2.0 * mu1;
    let decay2 = -(mu0 + 2.0 * mu2);
    let slowest = decay1.max(decay2).exp();
    let tail_scale = prefactor / ((1.0 - slowest) * (1.0 - (-span).exp()));

    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut terms = 0;
    let mut bound = f64::INFINITY;
    for (m, p) in Legendre::new(pos.eta.cos()).take(m_max).enumerate() {
        let h = m as f64 + 0.5;
        let den = (-2.0 * h * span).exp_m1();
        s1 += (h * decay1).exp() * (-2.0 * h * to_rx1).exp_m1() / den * p;
        s2 += (h * decay2).exp() * (-2.0 * h * to_rx2).exp_m1() / den * p;
        terms = m + 1;
        bound = tail_scale * slowest.powf(terms as f64 + 0.5);
        if bound < TAIL_TOLERANCE {
            break;
        }
    }

    Ok(CaptureProbabilities {
        k1: (prefactor * s1).clamp(0.0, 1.0),
        k2: (prefactor * s2).clamp(0.0, 1.0),
        truncation_bound: bound,
        terms,
    })
}
