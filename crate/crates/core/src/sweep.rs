//! Threshold / discarding-time optimisation and the half- versus
//! full-duplex comparison cases.

use std::io::Write;

use rayon::prelude::*;

use crate::ber::{throughput, BerEvaluator, BerOptions};
use crate::channel::{channel_coefficients, HittingCdf};
use crate::error::{Error, Result};
use crate::link::{Duplex, LinkConfig, Modulation, Thresholds};
use crate::output::fmt_num;

/// Points in the coarse threshold scan that precedes golden-section
/// refinement.
const TAU_SCAN_POINTS: usize = 201;
const GOLDEN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    /// Normalised thresholds, strictly increasing in `[0, 1]`.
    pub tau_m: Vec<f64>,
    /// Discarding times (s), strictly increasing in `[0, slot)`.
    pub t_c: Vec<f64>,
}

impl SweepGrid {
    /// `n_tau` evenly spaced thresholds over `[0, 1]` and discarding times
    /// `i · slot / n_tc` for `i = 0..n_tc`.
    pub fn uniform(n_tau: usize, n_tc: usize, slot: f64) -> Self {
        let tau_m = if n_tau == 1 {
            vec![0.5]
        } else {
            (0..n_tau).map(|i| i as f64 / (n_tau - 1) as f64).collect()
        };
        let t_c = (0..n_tc).map(|i| i as f64 * slot / n_tc as f64).collect();
        Self { tau_m, t_c }
    }

    /// Default resolution: 51 thresholds by 21 discarding times.
    pub fn default_for(slot: f64) -> Self {
        Self::uniform(51, 21, slot)
    }

    pub fn validate(&self, slot: f64) -> Result<()> {
        let increasing = |v: &[f64]| !v.is_empty() && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.tau_m) || !increasing(&self.t_c) {
            return Err(Error::invalid("sweep grids must be non-empty and strictly increasing"));
        }
        if self.tau_m.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::invalid("tau_m grid must lie in [0, 1]"));
        }
        if self.t_c.iter().any(|&t| !(t >= 0.0 && t < slot)) {
            return Err(Error::invalid(format!("T_c grid must lie in [0, {slot})")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapResult {
    pub grid: SweepGrid,
    /// `ber[i][j]` at `tau_m[i]`, `t_c[j]`.
    pub ber: Vec<Vec<f64>>,
    pub best_tau: f64,
    pub best_t_c: f64,
    pub min_ber: f64,
}

impl HeatmapResult {
    /// Threshold minimising the error for discarding-time column `j`
    /// (smallest threshold on ties).
    pub fn argmin_tau_at(&self, j: usize) -> f64 {
        let mut best = 0;
        for i in 1..self.grid.tau_m.len() {
            if self.ber[i][j] < self.ber[best][j] {
                best = i;
            }
        }
        self.grid.tau_m[best]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "tau_m,T_c,ber")?;
        for (j, &tc) in self.grid.t_c.iter().enumerate() {
            for (i, &tau) in self.grid.tau_m.iter().enumerate() {
                writeln!(w, "{},{},{}", fmt_num(tau), fmt_num(tc), fmt_num(self.ber[i][j]))?;
            }
        }
        writeln!(
            w,
            "# argmin tau_m={} T_c={} ber={}",
            fmt_num(self.best_tau),
            fmt_num(self.best_t_c),
            fmt_num(self.min_ber)
        )
    }
}

/// Theoretical error over every `(tau_m, T_c)` cell for the full-duplex
/// link `base` with analog and digital cancellation.
pub fn ber_heatmap<C: HittingCdf + Sync + ?Sized>(
    grid: &SweepGrid,
    cdf: &C,
    base: &LinkConfig,
    options: &BerOptions,
) -> Result<HeatmapResult> {
    let slot = base.slot_duration();
    grid.validate(slot)?;
    let columns: Vec<Vec<f64>> = grid
        .t_c
        .par_iter()
        .map(|&tc| -> Result<Vec<f64>> {
            let config = LinkConfig {
                t_c: tc,
                a_sic: true,
                ..base.clone()
            };
            let coeffs = channel_coefficients(cdf, slot, tc, config.taps())?;
            let eval = BerEvaluator::new(&coeffs, &config, options)?;
            Ok(grid.tau_m.iter().map(|&tau| eval.ber(tau)).collect())
        })
        .collect::<Result<_>>()?;
    let n_tau = grid.tau_m.len();
    let ber: Vec<Vec<f64>> = (0..n_tau)
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect();
    let (mut bi, mut bj) = (0, 0);
    for j in 0..grid.t_c.len() {
        for i in 0..n_tau {
            if ber[i][j] < ber[bi][bj] {
                bi = i;
                bj = j;
            }
        }
    }
    Ok(HeatmapResult {
        best_tau: grid.tau_m[bi],
        best_t_c: grid.t_c[bj],
        min_ber: ber[bi][bj],
        ber,
        grid: grid.clone(),
    })
}

/// Golden-section minimisation of `f` on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimise a one-dimensional error curve on `[lo, hi]`: scan, then refine
/// around the best scan point. Returns `(argmin, min)`.
fn minimise_scalar<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64) {
    let n = TAU_SCAN_POINTS;
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let mut best = 0;
    let mut values = Vec::with_capacity(n);
    for (i, &x) in xs.iter().enumerate() {
        values.push(f(x));
        if values[i] < values[best] {
            best = i;
        }
    }
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(n - 1)];
    let (x, v) = golden_section(&f, a, b, GOLDEN_TOL * (hi - lo).max(1e-12));
    if v < values[best] {
        (x, v)
    } else {
        (xs[best], values[best])
    }
}

/// BCSK threshold minimising the evaluator's error.
pub fn optimal_tau(eval: &BerEvaluator) -> (f64, f64) {
    minimise_scalar(|t| eval.ber(t), 0.0, 1.0)
}

/// QCSK thresholds by coordinate descent, each threshold searched between
/// its neighbours. Starts from midpoints of the conditional means.
pub fn optimal_qcsk_thresholds(eval: &BerEvaluator) -> ([f64; 3], f64) {
    let n1 = f64::from(eval.config.n1);
    let means = eval.mean_by_symbol();
    let mut t = [
        0.5 * (means[0] + means[1]) / n1,
        0.5 * (means[1] + means[2]) / n1,
        0.5 * (means[2] + means[3]) / n1,
    ];
    let mut err = eval.error(&Thresholds::Qcsk(t));
    for _ in 0..20 {
        let before = err;
        for k in 0..3 {
            let lo = if k == 0 { (means[0] / n1) - 1.0 } else { t[k - 1] };
            let hi = if k == 2 { (means[3] / n1) + 1.0 } else { t[k + 1] };
            let (x, v) = minimise_scalar(
                |x| {
                    let mut trial = t;
                    trial[k] = x;
                    eval.error(&Thresholds::Qcsk(trial))
                },
                lo,
                hi,
            );
            if v < err {
                t[k] = x;
                err = v;
            }
        }
        if before - err <= 1e-12 * before.max(1e-300) {
            break;
        }
    }
    (t, err)
}

/// Optimised operating point of one system.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    pub config: LinkConfig,
    pub ber: f64,
    /// Bits per second per direction.
    pub throughput: f64,
    pub exact: bool,
}

/// Full-duplex BCSK with both cancellation stages at its heatmap optimum,
/// with the threshold refined by golden section at the optimal `T_c`.
pub fn optimise_full_duplex<C: HittingCdf + Sync + ?Sized>(
    cdf: &C,
    base: &LinkConfig,
    grid: &SweepGrid,
    options: &BerOptions,
) -> Result<(OperatingPoint, HeatmapResult)> {
    let base = LinkConfig {
        duplex: Duplex::Full,
        modulation: Modulation::Bcsk,
        a_sic: true,
        d_sic: true,
        ..base.clone()
    };
    let map = ber_heatmap(grid, cdf, &base, options)?;
    let config = LinkConfig {
        t_c: map.best_t_c,
        ..base
    };
    let coeffs = channel_coefficients(cdf, config.slot_duration(), config.t_c, config.taps())?;
    let eval = BerEvaluator::new(&coeffs, &config, options)?;
    let (tau, ber) = optimal_tau(&eval);
    let (tau, ber) = if ber <= map.min_ber { (tau, ber) } else { (map.best_tau, map.min_ber) };
    let config = LinkConfig {
        thresholds: Thresholds::Bcsk(tau),
        ..config
    };
    Ok((
        OperatingPoint {
            throughput: throughput(1, ber, config.t_s),
            ber,
            exact: eval.exact,
            config,
        },
        map,
    ))
}

/// Link `base` at its optimal thresholds, with the discarding time fixed.
pub fn optimise_thresholds<C: HittingCdf + ?Sized>(
    cdf: &C,
    base: &LinkConfig,
    options: &BerOptions,
) -> Result<OperatingPoint> {
    let coeffs = channel_coefficients(
        cdf,
        base.slot_duration(),
        base.discarding_time(),
        base.taps(),
    )?;
    let eval = BerEvaluator::new(&coeffs, base, options)?;
    let (thresholds, ber) = match base.modulation {
        Modulation::Bcsk => {
            let (t, b) = optimal_tau(&eval);
            (Thresholds::Bcsk(t), b)
        }
        Modulation::Qcsk => {
            let (t, b) = optimal_qcsk_thresholds(&eval);
            (Thresholds::Qcsk(t), b)
        }
    };
    let config = LinkConfig {
        thresholds,
        ..base.clone()
    };
    Ok(OperatingPoint {
        throughput: throughput(config.modulation.bits_per_symbol(), ber, config.t_s),
        ber,
        exact: eval.exact,
        config,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareCase {
    /// Full-duplex symbols are half as long.
    HalfSymbol = 1,
    /// Equal symbol durations.
    EqualSymbol = 2,
    /// Full-duplex symbol duration searched to match the half-duplex BER.
    MatchedBer = 3,
    /// Half-duplex QCSK against full-duplex BCSK with half-length symbols.
    QcskVsBcsk = 4,
}

impl CompareCase {
    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(Self::HalfSymbol),
            2 => Some(Self::EqualSymbol),
            3 => Some(Self::MatchedBer),
            4 => Some(Self::QcskVsBcsk),
            _ => None,
        }
    }

    pub fn id(self) -> u8 {
        self as u8
    }
}

/// Inputs shared by the comparison cases.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareSetup {
    pub n1: u32,
    pub t_hd: f64,
    /// Overrides the case's full-duplex symbol duration (cases 1, 2, 4).
    pub t_fd: Option<f64>,
    pub noise_var: f64,
    pub n_tau: usize,
    pub n_tc: usize,
    pub options: BerOptions,
    /// Search interval for case 3 as multiples of `t_hd`.
    pub match_range: (f64, f64),
    /// Accepted `|ln(BER_FD / BER_HD)|` in case 3.
    pub match_tolerance: f64,
}

impl CompareSetup {
    pub fn new(n1: u32, t_hd: f64) -> Self {
        Self {
            n1,
            t_hd,
            t_fd: None,
            noise_var: crate::link::DEFAULT_NOISE_VAR,
            n_tau: 51,
            n_tc: 21,
            options: BerOptions::default(),
            match_range: (0.25, 10.0),
            match_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchStatus {
    /// Not a matching case.
    NotApplicable,
    Converged,
    /// The BER difference did not change sign over the search interval.
    NotBracketed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub case: CompareCase,
    pub n1: u32,
    pub half: OperatingPoint,
    /// `None` when the matching search failed.
    pub full: Option<OperatingPoint>,
    /// Full-duplex over half-duplex throughput.
    pub ratio: Option<f64>,
    pub status: MatchStatus,
}

impl ComparisonReport {
    pub fn t_fd(&self) -> Option<f64> {
        self.full.as_ref().map(|f| f.config.t_s)
    }
}

fn full_duplex_at<C: HittingCdf + Sync + ?Sized>(
    cdf: &C,
    setup: &CompareSetup,
    t_fd: f64,
) -> Result<OperatingPoint> {
    let mut base = LinkConfig::full_duplex(setup.n1, t_fd, 0.5);
    base.noise_var = setup.noise_var;
    let grid = SweepGrid::uniform(setup.n_tau, setup.n_tc, t_fd);
    Ok(optimise_full_duplex(cdf, &base, &grid, &setup.options)?.0)
}

/// Run one comparison case.
pub fn compare_systems<C: HittingCdf + Sync + ?Sized>(
    case: CompareCase,
    cdf: &C,
    setup: &CompareSetup,
) -> Result<ComparisonReport> {
    let mut hd_base = match case {
        CompareCase::QcskVsBcsk => LinkConfig::half_duplex_qcsk(setup.n1, setup.t_hd),
        _ => LinkConfig::half_duplex(setup.n1, setup.t_hd, 0.5),
    };
    hd_base.noise_var = setup.noise_var;
    let half = optimise_thresholds(cdf, &hd_base, &setup.options)?;

    let (full, status) = match case {
        CompareCase::HalfSymbol | CompareCase::QcskVsBcsk => {
            let t = setup.t_fd.unwrap_or(0.5 * setup.t_hd);
            (Some(full_duplex_at(cdf, setup, t)?), MatchStatus::NotApplicable)
        }
        CompareCase::EqualSymbol => {
            let t = setup.t_fd.unwrap_or(setup.t_hd);
            (Some(full_duplex_at(cdf, setup, t)?), MatchStatus::NotApplicable)
        }
        CompareCase::MatchedBer => match_ber(cdf, setup, half.ber)?,
    };
    let ratio = full.as_ref().map(|f| f.throughput / half.throughput);
    Ok(ComparisonReport {
        case,
        n1: setup.n1,
        half,
        full,
        ratio,
        status,
    })
}

/// Bisection on `ln t_fd` for `ln BER_FD(t_fd) = ln target`.
fn match_ber<C: HittingCdf + Sync + ?Sized>(
    cdf: &C,
    setup: &CompareSetup,
    target: f64,
) -> Result<(Option<OperatingPoint>, MatchStatus)> {
    let gap = |p: &OperatingPoint| p.ber.max(1e-300).ln() - target.max(1e-300).ln();
    let mut lo_t = setup.match_range.0 * setup.t_hd;
    let mut hi_t = setup.match_range.1 * setup.t_hd;
    let mut lo = full_duplex_at(cdf, setup, lo_t)?;
    let mut hi = full_duplex_at(cdf, setup, hi_t)?;
    let (mut g_lo, mut g_hi) = (gap(&lo), gap(&hi));
    if g_lo.abs() < setup.match_tolerance {
        return Ok((Some(lo), MatchStatus::Converged));
    }
    if g_hi.abs() < setup.match_tolerance {
        return Ok((Some(hi), MatchStatus::Converged));
    }
    if g_lo.signum() == g_hi.signum() {
        return Ok((None, MatchStatus::NotBracketed));
    }
    for _ in 0..60 {
        let mid_t = (lo_t * hi_t).sqrt();
        let mid = full_duplex_at(cdf, setup, mid_t)?;
        let g = gap(&mid);
        if g.abs() < setup.match_tolerance {
            return Ok((Some(mid), MatchStatus::Converged));
        }
        if g.signum() == g_lo.signum() {
            lo_t = mid_t;
            lo = mid;
            g_lo = g;
        } else {
            hi_t = mid_t;
            hi = mid;
            g_hi = g;
        }
        if hi_t / lo_t < 1.0 + 1e-9 {
            break;
        }
    }
    let best = if g_lo.abs() <= g_hi.abs() { lo } else { hi };
    Ok((Some(best), MatchStatus::NotBracketed))
}
