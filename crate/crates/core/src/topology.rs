//! System geometry and the bispherical coordinate frame.
//!
//! Both receiver centres lie on the z axis. Rx2 is centred at `(0, 0, -a)`
//! and Rx1 at `(0, 0, ell - a)`, where `a` is chosen so that the two sphere
//! surfaces are the coordinate surfaces `mu = mu1` (Rx1) and `mu = -mu2`
//! (Rx2) of a bispherical system with foci `(0, 0, ±f)`.
//!
//! Transmitters sit on the centre line, each between its own (co-located)
//! receiver and the remote one, so that
//! `ell = r_r1 + d1 + d_tx1_rx2 + r_r2 = r_r1 + d_tx2_rx1 + d2 + r_r2`.

use std::fmt;
use std::ops::{Add, Sub};

use crate::error::{Error, Result};

const COLLINEAR_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn on_axis(z: f64) -> Self {
        Self::new(0.0, 0.0, z)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Mirror image through the plane `z = z0`.
    pub fn mirror_z(self, z0: f64) -> Self {
        Self::new(self.x, self.y, 2.0 * z0 - self.z)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// One of the two transceivers. Node `i` owns `Tx_i` and `Rx_i`; `Tx_i`
/// talks to the receiver of the *other* node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    One,
    Two,
}

impl Node {
    pub const BOTH: [Node; 2] = [Node::One, Node::Two];

    pub const fn index(self) -> usize {
        match self {
            Node::One => 0,
            Node::Two => 1,
        }
    }

    pub const fn other(self) -> Node {
        match self {
            Node::One => Node::Two,
            Node::Two => Node::One,
        }
    }

    pub fn from_index(i: usize) -> Option<Node> {
        match i {
            0 => Some(Node::One),
            1 => Some(Node::Two),
            _ => None,
        }
    }

    /// 1-based label as used in CSV output.
    pub const fn label(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Geometry and physics of the two-transceiver system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemTopology {
    /// Radius of Rx1 (µm).
    pub r_r1: f64,
    /// Radius of Rx2 (µm).
    pub r_r2: f64,
    /// Surface distance Tx1 → Rx1 (µm).
    pub d1: f64,
    /// Surface distance Tx2 → Rx2 (µm).
    pub d2: f64,
    /// Surface distance Tx1 → Rx2 (µm).
    pub d_tx1_rx2: f64,
    /// Surface distance Tx2 → Rx1 (µm).
    pub d_tx2_rx1: f64,
    /// Centre-to-centre distance between Rx1 and Rx2 (µm).
    pub ell: f64,
    /// Diffusion coefficient (µm²/s).
    pub diffusion: f64,
}

impl SystemTopology {
    /// Validated constructor. `d1` and `d2` may be zero (transmitter on the
    /// surface of its own receiver); every other length must be positive.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r_r1: f64,
        r_r2: f64,
        d1: f64,
        d2: f64,
        d_tx1_rx2: f64,
        d_tx2_rx1: f64,
        ell: f64,
        diffusion: f64,
    ) -> Result<Self> {
        let topo = Self {
            r_r1,
            r_r2,
            d1,
            d2,
            d_tx1_rx2,
            d_tx2_rx1,
            ell,
            diffusion,
        };
        topo.validate()?;
        Ok(topo)
    }

    /// Transmitters on the centre line with a surface-to-surface gap `gap`
    /// between the receivers: `d_tx1_rx2 = gap - d1`, `d_tx2_rx1 = gap - d2`.
    pub fn collinear(
        r_r1: f64,
        r_r2: f64,
        gap: f64,
        d1: f64,
        d2: f64,
        diffusion: f64,
    ) -> Result<Self> {
        Self::new(
            r_r1,
            r_r2,
            d1,
            d2,
            gap - d1,
            gap - d2,
            r_r1 + r_r2 + gap,
            diffusion,
        )
    }

    /// Reference geometry: 5 µm receivers 5 µm apart, transmitters 1.5 µm
    /// from their own receiver, D = 100 µm²/s.
    pub fn reference() -> Self {
        Self::with_separation(1.5).expect("reference topology is valid")
    }

    /// Reference geometry with both transmitter/own-receiver distances set to `d`.
    pub fn with_separation(d: f64) -> Result<Self> {
        Self::collinear(5.0, 5.0, 5.0, d, d, 100.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r_r1", self.r_r1),
            ("r_r2", self.r_r2),
            ("ell", self.ell),
            ("diffusion", self.diffusion),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Geometry(format!("{name} must be positive, got {v}")));
            }
        }
        if self.ell <= self.r_r1 + self.r_r2 {
            return Err(Error::Geometry(format!(
                "receivers overlap: ell = {} <= r_r1 + r_r2 = {}",
                self.ell,
                self.r_r1 + self.r_r2
            )));
        }
        for (name, v) in [("d_tx1_rx2", self.d_tx1_rx2), ("d_tx2_rx1", self.d_tx2_rx1)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Geometry(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("d1", self.d1), ("d2", self.d2)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Geometry(format!("{name} must be non-negative, got {v}")));
            }
        }
        for (name, total) in [
            ("Tx1", self.r_r1 + self.d1 + self.d_tx1_rx2 + self.r_r2),
            ("Tx2", self.r_r1 + self.d_tx2_rx1 + self.d2 + self.r_r2),
        ] {
            if ((total - self.ell) / self.ell).abs() > COLLINEAR_RTOL {
                return Err(Error::Geometry(format!(
                    "{name} distances are not collinear: radii + distances = {total}, ell = {}",
                    self.ell
                )));
            }
        }
        Ok(())
    }

    /// Offset `a`: Rx2 is centred at `z = -a`.
    pub fn offset(&self) -> f64 {
        (self.ell * self.ell + self.r_r2 * self.r_r2 - self.r_r1 * self.r_r1) / (2.0 * self.ell)
    }

    pub fn radius(&self, rx: Node) -> f64 {
        match rx {
            Node::One => self.r_r1,
            Node::Two => self.r_r2,
        }
    }

    pub fn receiver_center(&self, rx: Node) -> Point {
        let a = self.offset();
        match rx {
            Node::One => Point::on_axis(self.ell - a),
            Node::Two => Point::on_axis(-a),
        }
    }

    pub fn transmitter(&self, tx: Node) -> Point {
        let a = self.offset();
        match tx {
            Node::One => Point::on_axis(self.ell - a - self.r_r1 - self.d1),
            Node::Two => Point::on_axis(-a + self.r_r2 + self.d2),
        }
    }

    /// Signed distance from `p` to the surface of `rx` (negative inside).
    pub fn surface_distance(&self, p: Point, rx: Node) -> f64 {
        p.distance(self.receiver_center(rx)) - self.radius(rx)
    }

    /// Same system with the two node labels exchanged, mirrored through
    /// the midpoint of the centres so that positions map consistently.
    pub fn swapped(&self) -> Self {
        Self {
            r_r1: self.r_r2,
            r_r2: self.r_r1,
            d1: self.d2,
            d2: self.d1,
            d_tx1_rx2: self.d_tx2_rx1,
            d_tx2_rx1: self.d_tx1_rx2,
            ell: self.ell,
            diffusion: self.diffusion,
        }
    }

    /// Image of `p` under [`SystemTopology::swapped`]. The swapped offset is
    /// `ell - a`, so the two centres exchange under `z -> -z`.
    pub fn swap_point(&self, p: Point) -> Point {
        Point::new(p.x, p.y, -p.z)
    }
}

/// Bispherical frame adapted to the two receivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisphericalFrame {
    /// Rx2 centre offset (µm).
    pub a: f64,
    /// Focal half-distance (µm); foci at `(0, 0, ±f)`.
    pub f: f64,
    /// Surface coordinate of Rx1.
    pub mu1: f64,
    /// Rx2 is the surface `mu = -mu2`.
    pub mu2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisphericalPoint {
    pub mu: f64,
    /// In `[0, π]`.
    pub eta: f64,
    /// In `(-π, π]`.
    pub phi: f64,
}

pub fn build_frame(topology: &SystemTopology) -> Result<BisphericalFrame> {
    let a = topology.offset();
    let arg2 = a / topology.r_r2;
    let arg1 = (topology.ell - a) / topology.r_r1;
    if !(arg1 > 1.0 && arg2 > 1.0) {
        return Err(Error::Geometry(format!(
            "receivers overlap or touch (cosh arguments {arg1}, {arg2} must exceed 1)"
        )));
    }
    let mu2 = arg2.acosh();
    let mu1 = arg1.acosh();
    let f = topology.r_r2 * mu2.sinh();
    Ok(BisphericalFrame { a, f, mu1, mu2 })
}

impl BisphericalFrame {
    pub fn new(topology: &SystemTopology) -> Result<Self> {
        build_frame(topology)
    }

    /// Centre z and radius of the coordinate sphere `mu = const` (`mu != 0`).
    pub fn sphere(&self, mu: f64) -> (f64, f64) {
        (self.f / mu.tanh(), self.f / mu.sinh().abs())
    }

    pub fn to_bispherical(&self, p: Point) -> Result<BisphericalPoint> {
        to_bispherical(p, self)
    }

    pub fn to_cartesian(&self, b: BisphericalPoint) -> Point {
        let denom = b.mu.cosh() - b.eta.cos();
        let rho = self.f * b.eta.sin() / denom;
        Point::new(
            rho * b.phi.cos(),
            rho * b.phi.sin(),
            self.f * b.mu.sinh() / denom,
        )
    }
}

/// Cartesian → bispherical with foci `(0, 0, ±f)`.
pub fn to_bispherical(p: Point, frame: &BisphericalFrame) -> Result<BisphericalPoint> {
    let f = frame.f;
    for focus in [f, -f] {
        if p.distance(Point::on_axis(focus)) <= 1e-12 * f {
            return Err(Error::SingularCoordinate(format!(
                "point {p} coincides with a focus (0, 0, {focus})"
            )));
        }
    }
    let r2 = p.norm_sq();
    let rho = p.x.hypot(p.y);
    let mu = (2.0 * f * p.z / (r2 + f * f)).atanh();
    let eta = (2.0 * f * rho).atan2(r2 - f * f);
    let phi = p.y.atan2(p.x);
    // atan2 yields -π for (y = -0.0, x < 0); fold onto the half-open range.
    let phi = if phi <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        phi
    };
    Ok(BisphericalPoint { mu, eta, phi })
}
