//! Special functions used by the channel and BER models.

use std::f64::consts::SQRT_2;

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Gaussian tail probability `P(Z > x)` for a standard normal `Z`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Legendre polynomials `P_0(x), P_1(x), ...` by the upward three-term
/// recurrence `(m+1) P_{m+1} = (2m+1) x P_m - m P_{m-1}`.
#[derive(Debug, Clone)]
pub struct Legendre {
    x: f64,
    m: usize,
    prev: f64,
    cur: f64,
}

impl Legendre {
    pub fn new(x: f64) -> Self {
        Self {
            x,
            m: 0,
            prev: 0.0,
            cur: 1.0,
        }
    }
}

impl Iterator for Legendre {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let m = self.m as f64;
        let next = if self.m == 0 {
            self.x
        } else {
            ((2.0 * m + 1.0) * self.x * self.cur - m * self.prev) / (m + 1.0)
        };
        self.prev = self.cur;
        self.cur = next;
        self.m += 1;
        Some(out)
    }
}
