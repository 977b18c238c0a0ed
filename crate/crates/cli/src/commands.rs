//! One function per subcommand. Each reads the parsed config, runs the
//! model and writes its CSV files through [`OutputDir`].

use std::io::Write;

use mcvd::channel::isi_taps;
use mcvd::link::{run_link, LinkChannel};
use mcvd::output::fmt_num;
use mcvd::particle::{EmpiricalChannel, HitPool};
use mcvd::sweep::optimal_qcsk_thresholds;
use mcvd::*;

use crate::config::{Config, REQUIRED_TOPOLOGY};
use crate::error::CliResult;
use crate::output::OutputDir;

/// Geometry from `[topology]`. Transmitters sit on the centre line, so
/// `ell_um` and `d_tx2_rx1_um` default to the collinear values.
pub fn topology(cfg: &Config) -> CliResult<SystemTopology> {
    for key in REQUIRED_TOPOLOGY {
        cfg.require::<f64>("topology", key)?;
    }
    let r1: f64 = cfg.require("topology", "r_r1_um")?;
    let r2: f64 = cfg.require("topology", "r_r2_um")?;
    let d1: f64 = cfg.require("topology", "d1_um")?;
    let d2: f64 = cfg.require("topology", "d2_um")?;
    let d12: f64 = cfg.require("topology", "d_tx1_rx2_um")?;
    let diffusion: f64 = cfg.require("topology", "diffusion_um2_per_s")?;
    let ell = cfg.get_or("topology", "ell_um", r1 + d1 + d12 + r2)?;
    let d21 = cfg.get_or("topology", "d_tx2_rx1_um", ell - r1 - r2 - d2)?;
    Ok(SystemTopology::new(r1, r2, d1, d2, d12, d21, ell, diffusion)?)
}

/// Link settings from `[link]`.
pub fn link_config(cfg: &Config, seed: u64) -> CliResult<LinkConfig> {
    let n1 = cfg.get_or("link", "n1", 500u32)?;
    let t_s = cfg.get_or("link", "t_s", 0.2)?;
    let duplex = cfg.choice("link", "duplex", &["full", "half"], "full")?;
    let modulation = cfg.choice("link", "modulation", &["bcsk", "qcsk"], "bcsk")?;
    let mut c = match (duplex, modulation) {
        ("full", "bcsk") => LinkConfig::full_duplex(n1, t_s, 0.5),
        ("half", "bcsk") => LinkConfig::half_duplex(n1, t_s, 0.5),
        ("half", "qcsk") => LinkConfig::half_duplex_qcsk(n1, t_s),
        _ => return Err(cfg.invalid("link", "modulation", "QCSK is only defined for half duplex")),
    };
    if let Some(tau) = cfg.get("link", "tau_m")? {
        if c.modulation != Modulation::Bcsk {
            return Err(cfg.invalid("link", "tau_m", "use `thresholds` for QCSK"));
        }
        c.thresholds = Thresholds::Bcsk(tau);
    }
    if let Some(t) = cfg.list::<f64>("link", "thresholds")? {
        let t: [f64; 3] = t
            .try_into()
            .map_err(|_| cfg.invalid("link", "thresholds", "expected three comma-separated values"))?;
        if c.modulation != Modulation::Qcsk {
            return Err(cfg.invalid("link", "thresholds", "use `tau_m` for BCSK"));
        }
        c.thresholds = Thresholds::Qcsk(t);
    }
    c.t_c = cfg.get_or("link", "t_c", 0.0)?;
    c.a_sic = cfg.get_or("link", "a_sic", c.t_c > 0.0)?;
    c.d_sic = cfg.get_or("link", "d_sic", c.d_sic)?;
    c.noise_var = cfg.get_or("link", "noise_var", c.noise_var)?;
    c.isi_taps = cfg.get("link", "isi_taps")?;
    c.n_symbols = cfg.get_or("link", "symbols", c.n_symbols)?;
    c.sampling = match cfg.choice("link", "sampling", &["binomial", "gaussian"], "binomial")? {
        "gaussian" => Sampling::Gaussian,
        _ => Sampling::Binomial,
    };
    c.seed = seed;
    c.validate()?;
    Ok(c)
}

/// Particle settings from `[simulation]` for one emitter.
pub fn sim_config(cfg: &Config, topo: SystemTopology, tx: Node, seed: u64) -> CliResult<SimConfig> {
    let mut c = SimConfig::desk(topo, tx, emitter_seed(seed, tx));
    c.n_molecules = cfg.get_or("simulation", "molecules", c.n_molecules)?;
    c.dt = cfg.get_or("simulation", "dt_s", c.dt)?;
    c.t_end = cfg.get_or("simulation", "t_end_s", c.t_end)?;
    c.replications = cfg.get_or("simulation", "replications", c.replications)?;
    c.absorption = match cfg.choice("simulation", "absorption", &["end_of_step", "bridge"], "end_of_step")? {
        "bridge" => AbsorptionCheck::BrownianBridge,
        _ => AbsorptionCheck::EndOfStep,
    };
    c.validate()?;
    Ok(c)
}

/// Distinct, reproducible random streams per emitter.
fn emitter_seed(seed: u64, tx: Node) -> u64 {
    match tx {
        Node::One => seed,
        Node::Two => seed ^ 0x9E37_79B9_7F4A_7C15,
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn at_least_one(cfg: &Config, section: &str, key: &str, value: usize) -> CliResult<usize> {
    if value == 0 {
        return Err(cfg.invalid(section, key, "must be at least 1"));
    }
    Ok(value)
}

fn sic_mode(c: &LinkConfig) -> &'static str {
    match (c.a_sic, c.d_sic) {
        (false, false) => "none",
        (true, false) => "analog",
        (false, true) => "digital",
        (true, true) => "analog+digital",
    }
}

fn thresholds_text(t: &Thresholds) -> String {
    match t {
        Thresholds::Bcsk(x) => fmt_num(*x),
        Thresholds::Qcsk(x) => x.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join("/"),
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), fmt_num)
}

pub fn capture(cfg: &Config, out: &mut OutputDir) -> CliResult<()> {
    let topo = topology(cfg)?;
    let max_terms = cfg.get_or("capture", "max_terms", 100_000usize)?;
    let mut rows = Vec::new();
    for tx in Node::BOTH {
        let c = capture_probabilities(&topo, topo.transmitter(tx), max_terms)?;
        println!(
            "Tx{}: k1 = {:.6}  k2 = {:.6}  truncation bound = {:.3e} ({} terms)",
            tx.label(),
            c.k1,
            c.k2,
            c.truncation_bound,
            c.terms
        );
        rows.push((tx, c));
    }
    out.csv("capture.csv", |w| {
        writeln!(w, "emitter,k1,k2,truncation_bound,terms")?;
        for (tx, c) in &rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                tx.label(),
                fmt_num(c.k1),
                fmt_num(c.k2),
                fmt_num(c.truncation_bound),
                c.terms
            )?;
        }
        Ok(())
    })?;
    Ok(())
}

pub fn channel(cfg: &Config, out: &mut OutputDir) -> CliResult<()> {
    let topo = topology(cfg)?;
    let model = ChannelModel::new(&topo)?;
    let t_end: f64 = cfg.get_or("channel", "t_end_s", 1.0)?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(cfg.invalid("channel", "t_end_s", "must be positive"));
    }
    let points = at_least_one(cfg, "channel", "points", cfg.get_or("channel", "points", 1001usize)?)?;
    let n1 = f64::from(cfg.get_or("channel", "n1", 500u32)?);
    let t_s = cfg.get_or("channel", "t_s", 0.2)?;
    let t_c = cfg.get_or("channel", "t_c", 0.0)?;
    let taps = cfg.get_or("channel", "taps", isi_taps(t_s))?;
    let coeffs = model.coefficients(t_s, t_c, taps)?;

    let pairs = [
        (Node::One, Node::One),
        (Node::One, Node::Two),
        (Node::Two, Node::One),
        (Node::Two, Node::Two),
    ];
    for tx in Node::BOTH {
        println!(
            "Tx{}: limit k1 = {:.6}  k2 = {:.6}",
            tx.label(),
            model.capture(tx, Node::One),
            model.capture(tx, Node::Two)
        );
    }
    let times = linspace(0.0, t_end, points);
    out.csv("channel_cdf.csv", |w| {
        write!(w, "t")?;
        for (tx, rx) in pairs {
            write!(w, ",F_tx{}_rx{}", tx.label(), rx.label())?;
        }
        for (tx, rx) in pairs {
            write!(w, ",count_tx{}_rx{}", tx.label(), rx.label())?;
        }
        writeln!(w)?;
        let mut prev = [0.0; 4];
        for &t in &times {
            let f = pairs.map(|(tx, rx)| model.cdf(tx, rx, t));
            write!(w, "{}", fmt_num(t))?;
            for v in f {
                write!(w, ",{}", fmt_num(v))?;
            }
            // Expected arrivals since the previous grid time for n1 emitted molecules.
            for (v, p) in f.iter().zip(prev) {
                write!(w, ",{}", fmt_num(n1 * (v - p)))?;
            }
            writeln!(w)?;
            prev = f;
        }
        Ok(())
    })?;
    out.csv("channel_taps.csv", |w| {
        writeln!(w, "emitter,receiver,k,p,phi")?;
        for (tx, rx) in pairs {
            for (k, (p, phi)) in coeffs.p(tx, rx).iter().zip(coeffs.phi(tx, rx)).enumerate() {
                writeln!(w, "{},{},{},{},{}", tx.label(), rx.label(), k, fmt_num(*p), fmt_num(*phi))?;
            }
        }
        Ok(())
    })?;
    println!("{} grid points to t = {} s; {} taps at t_s = {} s, T_c = {} s", points, t_end, taps, t_s, t_c);
    Ok(())
}

pub fn simulate(cfg: &Config, out: &mut OutputDir, seed: u64) -> CliResult<()> {
    let topo = topology(cfg)?;
    let model = ChannelModel::new(&topo)?;
    let emitters: Vec<Node> = match cfg.choice("simulation", "emitter", &["1", "2", "both"], "both")? {
        "1" => vec![Node::One],
        "2" => vec![Node::Two],
        _ => Node::BOTH.to_vec(),
    };
    let points = at_least_one(cfg, "simulation", "grid_points", cfg.get_or("simulation", "grid_points", 101usize)?)?;
    let dump_hits = cfg.get_or("simulation", "dump_hits", false)?;

    let mut rows = Vec::new();
    for tx in emitters {
        let sim = sim_config(cfg, topo, tx, seed)?;
        let run = run_simulation(&sim)?;
        let (a1, a2) = (run.absorbed(Node::One), run.absorbed(Node::Two));
        let conserved = a1 + a2 + run.survivors == run.total;
        println!(
            "Tx{}: absorbed Rx1 {} + Rx2 {} + surviving {} = {} of {} molecules ({})",
            tx.label(),
            a1,
            a2,
            run.survivors,
            a1 + a2 + run.survivors,
            run.total,
            if conserved { "conserved" } else { "NOT conserved" }
        );
        let times = linspace(0.0, sim.t_end, points);
        let mut gap = [0.0f64; 2];
        for &t in &times {
            let sim_f = [run.empirical_cdf(Node::One, t), run.empirical_cdf(Node::Two, t)];
            let theory = [model.cdf(tx, Node::One, t), model.cdf(tx, Node::Two, t)];
            for rx in 0..2 {
                gap[rx] = gap[rx].max((sim_f[rx] - theory[rx]).abs());
            }
            rows.push((tx, t, sim_f, theory));
        }
        println!(
            "Tx{}: max |empirical - analytic| CDF gap: Rx1 {:.4}, Rx2 {:.4}",
            tx.label(),
            gap[0],
            gap[1]
        );
        if dump_hits {
            out.csv(&format!("hits_tx{}.csv", tx.label()), |w| run.write_hits_csv(w))?;
        }
    }
    out.csv("sim_cdf.csv", |w| {
        writeln!(w, "emitter,t,F1_sim,F2_sim,F1_theory,F2_theory")?;
        for (tx, t, s, a) in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                tx.label(),
                fmt_num(*t),
                fmt_num(s[0]),
                fmt_num(s[1]),
                fmt_num(a[0]),
                fmt_num(a[1])
            )?;
        }
        Ok(())
    })?;
    Ok(())
}

/// Particle data driving the link simulation directly.
struct ParticleChannel {
    pools: [HitPool; 2],
    reference: ChannelCoefficients,
}

fn particle_channel(cfg: &Config, topo: SystemTopology, link: &LinkConfig, seed: u64) -> CliResult<ParticleChannel> {
    let horizon = link.taps() as f64 * link.slot_duration();
    let runs = Node::BOTH
        .iter()
        .map(|&tx| {
            let mut sim = sim_config(cfg, topo, tx, seed)?;
            sim.t_end = horizon;
            Ok(run_simulation(&sim)?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let reference = EmpiricalChannel {
        runs: [&runs[0], &runs[1]],
    }
    .coefficients(link.slot_duration(), link.discarding_time(), link.taps())?;
    Ok(ParticleChannel {
        pools: [HitPool::from_run(&runs[0]), HitPool::from_run(&runs[1])],
        reference,
    })
}

pub fn ber(cfg: &Config, out: &mut OutputDir, seed: u64) -> CliResult<()> {
    let topo = topology(cfg)?;
    let model = ChannelModel::new(&topo)?;
    let base = link_config(cfg, seed)?;
    let coeffs = model.coefficients(base.slot_duration(), base.discarding_time(), base.taps())?;
    let eval = BerEvaluator::new(&coeffs, &base, &BerOptions::default())?;

    let thresholds: Vec<Thresholds> = match base.modulation {
        Modulation::Bcsk if cfg.contains("link", "tau_m") => vec![base.thresholds],
        Modulation::Bcsk => {
            let n = at_least_one(cfg, "link", "tau_points", cfg.get_or("link", "tau_points", 20usize)?)?;
            linspace(0.0, 1.0, n).into_iter().map(Thresholds::Bcsk).collect()
        }
        Modulation::Qcsk if cfg.contains("link", "thresholds") => vec![base.thresholds],
        Modulation::Qcsk => vec![Thresholds::Qcsk(optimal_qcsk_thresholds(&eval).0)],
    };
    let particles = match cfg.choice("link", "channel", &["analytic", "particle"], "analytic")? {
        "particle" => Some(particle_channel(cfg, topo, &base, seed)?),
        _ => None,
    };
    let channel = match &particles {
        Some(p) => LinkChannel::Physical {
            pools: [&p.pools[0], &p.pools[1]],
            reference: &p.reference,
        },
        None => LinkChannel::Coefficients(&coeffs),
    };

    let bits = base.modulation.bits_per_symbol();
    let mut rows = Vec::new();
    for t in thresholds {
        let config = LinkConfig {
            thresholds: t,
            ..base.clone()
        };
        let theory = eval.error(&t);
        let sim = if config.n_symbols > 0 {
            run_link(&config, channel, false)?.pooled_error_rate()
        } else {
            f64::NAN
        };
        rows.push((config, theory, sim, throughput(bits, theory, base.t_s)));
    }
    out.csv("ber.csv", |w| {
        writeln!(w, "tau_m,T_c,t_s,N1,duplex,sic_mode,ber_theory,ber_sim,throughput")?;
        for (c, theory, sim, tp) in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                thresholds_text(&c.thresholds),
                fmt_num(c.discarding_time()),
                fmt_num(c.t_s),
                c.n1,
                c.duplex.name(),
                sic_mode(c),
                fmt_num(*theory),
                fmt_num(*sim),
                fmt_num(*tp)
            )?;
        }
        Ok(())
    })?;
    if let Some((c, theory, sim, tp)) = rows.iter().min_by(|a, b| a.1.total_cmp(&b.1)) {
        println!(
            "{} {} N1 = {}, t_s = {} s, SIC {}: lowest theoretical BER {:.4e} at thresholds {} (simulated {:.4e}, throughput {:.4} bit/s)",
            c.duplex.name(),
            c.modulation.name(),
            c.n1,
            c.t_s,
            sic_mode(c),
            theory,
            thresholds_text(&c.thresholds),
            sim,
            tp
        );
    }
    Ok(())
}

pub fn sweep(cfg: &Config, out: &mut OutputDir, seed: u64) -> CliResult<()> {
    let topo = topology(cfg)?;
    let model = ChannelModel::new(&topo)?;
    let base = link_config(cfg, seed)?;
    if base.modulation != Modulation::Bcsk {
        return Err(cfg.invalid("link", "modulation", "the threshold sweep needs BCSK"));
    }
    let n_tau = at_least_one(cfg, "sweep", "tau_points", cfg.get_or("sweep", "tau_points", 51usize)?)?;
    let n_tc = at_least_one(cfg, "sweep", "tc_points", cfg.get_or("sweep", "tc_points", 21usize)?)?;
    let grid = SweepGrid::uniform(n_tau, n_tc, base.slot_duration());
    let options = BerOptions::default();
    let map = if base.duplex == Duplex::Full && base.d_sic {
        let (op, map) = optimise_full_duplex(&model, &base, &grid, &options)?;
        println!(
            "refined optimum: tau_m = {}, T_c = {} s, BER = {:.4e}, throughput = {:.4} bit/s",
            thresholds_text(&op.config.thresholds),
            fmt_num(op.config.t_c),
            op.ber,
            op.throughput
        );
        map
    } else {
        ber_heatmap(&grid, &model, &base, &options)?
    };
    println!(
        "heatmap: {} x {} cells, minimum BER {:.4e} at tau_m = {}, T_c = {} s",
        n_tau,
        n_tc,
        map.min_ber,
        fmt_num(map.best_tau),
        fmt_num(map.best_t_c)
    );
    out.csv("heatmap.csv", |w| map.write_csv(w))?;
    Ok(())
}

fn status_text(s: MatchStatus) -> &'static str {
    match s {
        MatchStatus::NotApplicable => "n/a",
        MatchStatus::Converged => "converged",
        MatchStatus::NotBracketed => "not_bracketed",
    }
}

pub fn compare(cfg: &Config, out: &mut OutputDir) -> CliResult<()> {
    let topo = topology(cfg)?;
    let model = ChannelModel::new(&topo)?;
    let cases = cfg
        .list::<u8>("compare", "cases")?
        .unwrap_or_else(|| vec![1])
        .into_iter()
        .map(|id| CompareCase::from_id(id).ok_or_else(|| cfg.invalid("compare", "cases", format!("unknown case {id}; expected 1-4"))))
        .collect::<CliResult<Vec<_>>>()?;
    let n1s = cfg.list::<u32>("compare", "n1")?.unwrap_or_else(|| vec![300, 400, 500]);
    let t_hds = cfg.list::<f64>("compare", "t_hd")?.unwrap_or_else(|| vec![0.2, 0.3, 0.4]);
    let noise_var = cfg.get_or("compare", "noise_var", mcvd::link::DEFAULT_NOISE_VAR)?;
    let n_tau = at_least_one(cfg, "compare", "tau_points", cfg.get_or("compare", "tau_points", 51usize)?)?;
    let n_tc = at_least_one(cfg, "compare", "tc_points", cfg.get_or("compare", "tc_points", 21usize)?)?;

    println!("case  N1   t_HD    t_FD      BER_HD      BER_FD      ratio   status");
    let mut rows = Vec::new();
    for &case in &cases {
        for &n1 in &n1s {
            for &t_hd in &t_hds {
                let mut setup = CompareSetup::new(n1, t_hd);
                setup.noise_var = noise_var;
                setup.n_tau = n_tau;
                setup.n_tc = n_tc;
                let rep = compare_systems(case, &model, &setup)?;
                println!(
                    "{:>4} {:>4} {:>6} {:>7} {:>11} {:>11} {:>8}   {}",
                    case.id(),
                    n1,
                    fmt_num(t_hd),
                    opt_num(rep.t_fd()),
                    format!("{:.4e}", rep.half.ber),
                    rep.full.as_ref().map_or("NA".into(), |f| format!("{:.4e}", f.ber)),
                    rep.ratio.map_or("NA".into(), |r| format!("{r:.4}")),
                    status_text(rep.status)
                );
                rows.push((t_hd, rep));
            }
        }
    }
    out.csv("compare.csv", |w| {
        writeln!(
            w,
            "case,N1,t_hd,t_fd,hd_modulation,ber_hd,ber_fd,throughput_hd,throughput_fd,ratio,status"
        )?;
        for (t_hd, rep) in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{}",
                rep.case.id(),
                rep.n1,
                fmt_num(*t_hd),
                opt_num(rep.t_fd()),
                rep.half.config.modulation.name(),
                fmt_num(rep.half.ber),
                opt_num(rep.full.as_ref().map(|f| f.ber)),
                fmt_num(rep.half.throughput),
                opt_num(rep.full.as_ref().map(|f| f.throughput)),
                opt_num(rep.ratio),
                status_text(rep.status)
            )?;
        }
        Ok(())
    })?;
    Ok(())
}
