//! Per-slot channel coefficients derived from a hitting CDF.

use crate::error::{Error, Result};
use crate::topology::Node;

/// Arrivals later than this after emission are ignored as ISI (s).
pub const ISI_HORIZON_S: f64 = 0.6;

/// Number of slots of duration `slot` needed to cover the ISI horizon.
pub fn isi_taps(slot: f64) -> usize {
    ((ISI_HORIZON_S / slot) - 1e-9).ceil().max(1.0) as usize
}

/// Anything that can report the fraction of molecules released by `tx`
/// that have been absorbed at `rx` by time `t`.
pub trait HittingCdf {
    fn cdf(&self, tx: Node, rx: Node, t: f64) -> f64;
}

/// Taps from one emitter, indexed by receiver.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmitterTaps {
    /// `p[rx][k]`: probability of absorption at `rx` during slot `k`.
    pub p: [Vec<f64>; 2],
    /// Same, restricted to the part of each slot after the discarding time.
    pub phi: [Vec<f64>; 2],
}

/// Channel coefficients for both emitters and both receivers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelCoefficients {
    /// Slot duration (s).
    pub t_s: f64,
    /// Discarding time at the start of each slot (s).
    pub t_c: f64,
    /// Indexed by emitter.
    pub taps: [EmitterTaps; 2],
}

impl ChannelCoefficients {
    /// Build from explicit tap tables indexed `[tx][rx][k]`.
    pub fn from_taps(
        t_s: f64,
        t_c: f64,
        p: [[Vec<f64>; 2]; 2],
        phi: [[Vec<f64>; 2]; 2],
    ) -> Result<Self> {
        check_timing(t_s, t_c, 1)?;
        let len = p[0][0].len();
        for (tx, (pt, ft)) in p.iter().zip(phi.iter()).enumerate() {
            for rx in 0..2 {
                if pt[rx].len() != len || ft[rx].len() != len {
                    return Err(Error::invalid("all tap tables must have the same length"));
                }
                for (&pk, &fk) in pt[rx].iter().zip(&ft[rx]) {
                    if !(0.0..=1.0).contains(&pk) || !(0.0..=pk).contains(&fk) {
                        return Err(Error::invalid(format!(
                            "tap out of range for Tx{} -> Rx{}: p = {pk}, phi = {fk}",
                            tx + 1,
                            rx + 1
                        )));
                    }
                }
            }
        }
        let [p0, p1] = p;
        let [f0, f1] = phi;
        Ok(Self {
            t_s,
            t_c,
            taps: [EmitterTaps { p: p0, phi: f0 }, EmitterTaps { p: p1, phi: f1 }],
        })
    }

    pub fn len(&self) -> usize {
        self.taps[0].p[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn p(&self, tx: Node, rx: Node) -> &[f64] {
        &self.taps[tx.index()].p[rx.index()]
    }

    pub fn phi(&self, tx: Node, rx: Node) -> &[f64] {
        &self.taps[tx.index()].phi[rx.index()]
    }

    /// Taps seen by the receiver: `phi` when the discarding window is in
    /// use, `p` otherwise.
    pub fn effective(&self, tx: Node, rx: Node, analog_sic: bool) -> &[f64] {
        if analog_sic {
            self.phi(tx, rx)
        } else {
            self.p(tx, rx)
        }
    }

    /// Copy truncated to the first `k` taps.
    pub fn truncated(&self, k: usize) -> Self {
        let cut = |v: &Vec<f64>| v[..k.min(v.len())].to_vec();
        let mut out = self.clone();
        for e in out.taps.iter_mut() {
            for rx in 0..2 {
                e.p[rx] = cut(&e.p[rx]);
                e.phi[rx] = cut(&e.phi[rx]);
            }
        }
        out
    }
}

pub(crate) fn check_timing(t_s: f64, t_c: f64, k: usize) -> Result<()> {
    if !(t_s.is_finite() && t_s > 0.0) {
        return Err(Error::invalid(format!("slot duration must be positive, got {t_s}")));
    }
    if !(t_c >= 0.0 && t_c < t_s) {
        return Err(Error::invalid(format!(
            "discarding time must satisfy 0 <= T_c < t_s, got T_c = {t_c}, t_s = {t_s}"
        )));
    }
    if k == 0 {
        return Err(Error::invalid("at least one tap is required"));
    }
    Ok(())
}

/// Tabulate `k` taps of slot duration `t_s` with discarding time `t_c`.
pub fn channel_coefficients<C: HittingCdf + ?Sized>(
    cdf: &C,
    t_s: f64,
    t_c: f64,
    k: usize,
) -> Result<ChannelCoefficients> {
    check_timing(t_s, t_c, k)?;
    let mut taps: [EmitterTaps; 2] = Default::default();
    for tx in Node::BOTH {
        for rx in Node::BOTH {
            let f = |t: f64| cdf.cdf(tx, rx, t);
            let mut p = Vec::with_capacity(k);
            let mut phi = Vec::with_capacity(k);
            let mut start = f(0.0);
            for slot in 0..k {
                let t0 = slot as f64 * t_s;
                let end = f(t0 + t_s);
                let pk = (end - start).clamp(0.0, 1.0);
                let fk = if t_c == 0.0 {
                    pk
                } else {
                    (end - f(t0 + t_c)).clamp(0.0, pk)
                };
                p.push(pk);
                phi.push(fk);
                start = end;
            }
            taps[tx.index()].p[rx.index()] = p;
            taps[tx.index()].phi[rx.index()] = phi;
        }
    }
    Ok(ChannelCoefficients { t_s, t_c, taps })
}
