//! Link-level toolkit for two-way molecular communication via diffusion
//! (MCvD) with two fully absorbing spherical receivers.
//!
//! The crate is organised bottom-up:
//!
//! - [`topology`]: system geometry and the bispherical frame.
//! - [`channel`]: closed-form capture probabilities, the time-dependent
//!   two-receiver hitting CDF and per-slot channel coefficients.
//! - [`particle`]: Brownian particle simulator used as ground truth.
//! - [`link`]: symbol-level Monte Carlo with half-/full-duplex scheduling,
//!   analog/digital self-interference cancellation and threshold detection.
//! - [`ber`]: Gaussian-approximation error probability by enumeration of
//!   bit histories, plus throughput.
//! - [`sweep`]: detection-threshold / discarding-time heatmaps and the
//!   half- vs full-duplex comparison cases.
//!
//! Units are fixed throughout: lengths in µm, time in seconds, diffusion
//! coefficients in µm²/s.

pub mod ber;
pub mod channel;
pub mod error;
pub mod link;
pub mod output;
pub mod particle;
pub mod special;
pub mod sweep;
pub mod topology;

pub use channel::{
    capture_probabilities, channel_coefficients, series_coefficients, single_receiver_cdf,
    two_receiver_cdf, virtual_point_distances, CaptureProbabilities, ChannelCoefficients,
    ChannelModel, EmitterTaps, HittingCdf, SeriesCoefficients, VirtualDistances,
};
pub use ber::{theoretical_ber, throughput, BerEvaluator, BerOptions, BerReport, GaussianSlotStats};
pub use error::{Error, Result};
pub use link::{Duplex, LinkConfig, LinkReport, Modulation, Sampling, SymbolStream, Thresholds};
pub use particle::{run_simulation, AbsorptionCheck, ParticleRunResult, SimConfig};
pub use sweep::{
    ber_heatmap, compare_systems, optimise_full_duplex, optimise_thresholds, CompareCase,
    CompareSetup, ComparisonReport, HeatmapResult, MatchStatus, OperatingPoint, SweepGrid,
};
pub use topology::{BisphericalFrame, BisphericalPoint, Node, Point, SystemTopology};
