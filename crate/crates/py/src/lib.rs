//! Python bindings: geometry, analytic channel, particle runs, theoretical
//! BER and link simulation.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ::mcvd as mc;
use mc::link::{run_link as run_link_core, LinkChannel};
use mc::sweep::{optimal_qcsk_thresholds, optimal_tau};
use mc::{
    BerEvaluator, BerOptions, Duplex, HittingCdf, LinkConfig as CoreLinkConfig, Modulation, Node,
    Sampling, SystemTopology, Thresholds,
};

fn to_py(e: mc::Error) -> PyErr {
    match e {
        mc::Error::Io(err) => PyOSError::new_err(err.to_string()),
        mc::Error::Intractable { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn node(label: u8) -> PyResult<Node> {
    match label {
        1 => Ok(Node::One),
        2 => Ok(Node::Two),
        _ => Err(PyValueError::new_err(format!("node must be 1 or 2, got {label}"))),
    }
}

/// Two absorbing receivers with their paired transmitters on the centre
/// line. Lengths in µm, diffusion coefficient in µm²/s.
#[pyclass(module = "mcvd", name = "Topology", frozen)]
struct PyTopology {
    inner: SystemTopology,
}

#[pymethods]
impl PyTopology {
    #[new]
    #[pyo3(signature = (r_r1, r_r2, d1, d2, d_tx1_rx2, diffusion, d_tx2_rx1=None, ell=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        r_r1: f64,
        r_r2: f64,
        d1: f64,
        d2: f64,
        d_tx1_rx2: f64,
        diffusion: f64,
        d_tx2_rx1: Option<f64>,
        ell: Option<f64>,
    ) -> PyResult<Self> {
        let ell = ell.unwrap_or(r_r1 + d1 + d_tx1_rx2 + r_r2);
        let d_tx2_rx1 = d_tx2_rx1.unwrap_or(ell - r_r1 - r_r2 - d2);
        let inner = SystemTopology::new(r_r1, r_r2, d1, d2, d_tx1_rx2, d_tx2_rx1, ell, diffusion)
            .map_err(to_py)?;
        Ok(Self { inner })
    }

    /// 5 µm receivers 5 µm apart, transmitters 1.5 µm from their own
    /// receiver, D = 100 µm²/s.
    #[staticmethod]
    fn reference() -> Self {
        Self {
            inner: SystemTopology::reference(),
        }
    }

    #[getter]
    fn r_r1(&self) -> f64 {
        self.inner.r_r1
    }
    #[getter]
    fn r_r2(&self) -> f64 {
        self.inner.r_r2
    }
    #[getter]
    fn d1(&self) -> f64 {
        self.inner.d1
    }
    #[getter]
    fn d2(&self) -> f64 {
        self.inner.d2
    }
    #[getter]
    fn d_tx1_rx2(&self) -> f64 {
        self.inner.d_tx1_rx2
    }
    #[getter]
    fn d_tx2_rx1(&self) -> f64 {
        self.inner.d_tx2_rx1
    }
    #[getter]
    fn ell(&self) -> f64 {
        self.inner.ell
    }
    #[getter]
    fn diffusion(&self) -> f64 {
        self.inner.diffusion
    }

    fn __repr__(&self) -> String {
        let t = &self.inner;
        format!(
            "Topology(r_r1={}, r_r2={}, d1={}, d2={}, d_tx1_rx2={}, d_tx2_rx1={}, ell={}, diffusion={})",
            t.r_r1, t.r_r2, t.d1, t.d2, t.d_tx1_rx2, t.d_tx2_rx1, t.ell, t.diffusion
        )
    }
}

/// Capture probabilities `(k1, k2, truncation_bound)` of a molecule
/// released by transmitter `emitter`.
#[pyfunction]
#[pyo3(signature = (topology, emitter=1, max_terms=100_000))]
fn capture_probabilities(topology: &PyTopology, emitter: u8, max_terms: usize) -> PyResult<(f64, f64, f64)> {
    let t = &topology.inner;
    let c = mc::capture_probabilities(t, t.transmitter(node(emitter)?), max_terms).map_err(to_py)?;
    Ok((c.k1, c.k2, c.truncation_bound))
}

/// Closed-form two-receiver hitting CDFs and per-slot channel taps.
#[pyclass(module = "mcvd", name = "ChannelModel", frozen)]
struct PyChannelModel {
    inner: mc::ChannelModel,
}

#[pymethods]
impl PyChannelModel {
    #[new]
    fn new(topology: &PyTopology) -> PyResult<Self> {
        Ok(Self {
            inner: mc::ChannelModel::new(&topology.inner).map_err(to_py)?,
        })
    }

    /// Capture probability from transmitter `tx` to receiver `rx`.
    fn capture(&self, tx: u8, rx: u8) -> PyResult<f64> {
        Ok(self.inner.capture(node(tx)?, node(rx)?))
    }

    /// Fraction of `tx`'s molecules absorbed by `rx` at each time (s).
    fn cdf(&self, tx: u8, rx: u8, times: Vec<f64>) -> PyResult<Vec<f64>> {
        let (tx, rx) = (node(tx)?, node(rx)?);
        Ok(times.iter().map(|&t| self.inner.cdf(tx, rx, t)).collect())
    }

    /// Taps `(p, phi)` from `tx` to `rx` for slot `t_s` and discarding
    /// time `t_c`; `taps` defaults to the ISI horizon.
    #[pyo3(signature = (tx, rx, t_s, t_c=0.0, taps=None))]
    fn taps(&self, tx: u8, rx: u8, t_s: f64, t_c: f64, taps: Option<usize>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let k = taps.unwrap_or_else(|| mc::channel::isi_taps(t_s));
        let c = self.inner.coefficients(t_s, t_c, k).map_err(to_py)?;
        let (tx, rx) = (node(tx)?, node(rx)?);
        Ok((c.p(tx, rx).to_vec(), c.phi(tx, rx).to_vec()))
    }
}

/// Outcome of one particle run.
#[pyclass(module = "mcvd", name = "ParticleRun", frozen)]
struct PyParticleRun {
    inner: mc::ParticleRunResult,
}

#[pymethods]
impl PyParticleRun {
    #[getter]
    fn total(&self) -> usize {
        self.inner.total
    }
    #[getter]
    fn survivors(&self) -> usize {
        self.inner.survivors
    }
    /// Molecules absorbed by receiver `rx`.
    fn absorbed(&self, rx: u8) -> PyResult<usize> {
        Ok(self.inner.absorbed(node(rx)?))
    }
    /// Sorted absorption times (s) at receiver `rx`.
    fn hit_times(&self, rx: u8) -> PyResult<Vec<f64>> {
        Ok(self.inner.hits[node(rx)?.index()].clone())
    }
    /// Empirical CDF at receiver `rx` on `times`.
    fn empirical_cdf(&self, rx: u8, times: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.empirical_cdf_grid(node(rx)?, &times))
    }
}

/// Brownian particle run from transmitter `emitter`. `bridge` enables the
/// Brownian-bridge crossing check within each step.
#[pyfunction]
#[pyo3(signature = (topology, emitter=1, molecules=10_000, dt=1e-4, t_end=0.1, seed=1, bridge=false))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    topology: &PyTopology,
    emitter: u8,
    molecules: usize,
    dt: f64,
    t_end: f64,
    seed: u64,
    bridge: bool,
) -> PyResult<PyParticleRun> {
    let mut config = mc::SimConfig::desk(topology.inner, node(emitter)?, seed);
    config.n_molecules = molecules;
    config.dt = dt;
    config.t_end = t_end;
    if bridge {
        config.absorption = mc::AbsorptionCheck::BrownianBridge;
    }
    let inner = py.detach(|| mc::run_simulation(&config)).map_err(to_py)?;
    Ok(PyParticleRun { inner })
}

/// Link parameters. BCSK uses `tau_m`; QCSK (half duplex only) uses three
/// increasing `thresholds`, all normalised by `n1`.
#[pyclass(module = "mcvd", name = "LinkConfig", frozen)]
struct PyLinkConfig {
    inner: CoreLinkConfig,
}

#[pymethods]
impl PyLinkConfig {
    #[new]
    #[pyo3(signature = (
        n1, t_s, duplex="full", modulation="bcsk", tau_m=0.5, thresholds=None, t_c=0.0,
        a_sic=None, d_sic=None, noise_var=100.0, symbols=10_000, seed=0, sampling="binomial"
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        n1: u32,
        t_s: f64,
        duplex: &str,
        modulation: &str,
        tau_m: f64,
        thresholds: Option<[f64; 3]>,
        t_c: f64,
        a_sic: Option<bool>,
        d_sic: Option<bool>,
        noise_var: f64,
        symbols: usize,
        seed: u64,
        sampling: &str,
    ) -> PyResult<Self> {
        let mut c = match (duplex, modulation) {
            ("full", "bcsk") => CoreLinkConfig::full_duplex(n1, t_s, tau_m),
            ("half", "bcsk") => CoreLinkConfig::half_duplex(n1, t_s, tau_m),
            ("half", "qcsk") => CoreLinkConfig::half_duplex_qcsk(n1, t_s),
            _ => {
                return Err(PyValueError::new_err(format!(
                    "unsupported duplex/modulation pair {duplex}/{modulation}"
                )))
            }
        };
        if let Some(t) = thresholds {
            c.thresholds = Thresholds::Qcsk(t);
        }
        c.t_c = t_c;
        c.a_sic = a_sic.unwrap_or(t_c > 0.0);
        c.d_sic = d_sic.unwrap_or(c.d_sic);
        c.noise_var = noise_var;
        c.n_symbols = symbols;
        c.seed = seed;
        c.sampling = match sampling {
            "binomial" => Sampling::Binomial,
            "gaussian" => Sampling::Gaussian,
            _ => return Err(PyValueError::new_err(format!("unknown sampling `{sampling}`"))),
        };
        c.validate().map_err(to_py)?;
        Ok(Self { inner: c })
    }

    #[getter]
    fn n1(&self) -> u32 {
        self.inner.n1
    }
    #[getter]
    fn t_s(&self) -> f64 {
        self.inner.t_s
    }
    #[getter]
    fn duplex(&self) -> &'static str {
        match self.inner.duplex {
            Duplex::Full => "full",
            Duplex::Half => "half",
        }
    }
    #[getter]
    fn bits_per_symbol(&self) -> u32 {
        self.inner.modulation.bits_per_symbol()
    }
    /// Normalised thresholds as a list.
    #[getter]
    fn thresholds(&self) -> Vec<f64> {
        self.inner.thresholds.absolute(1.0)
    }
}

fn evaluator(model: &PyChannelModel, config: &CoreLinkConfig) -> PyResult<BerEvaluator> {
    let coeffs = model
        .inner
        .coefficients(config.slot_duration(), config.discarding_time(), config.taps())
        .map_err(to_py)?;
    BerEvaluator::new(&coeffs, config, &BerOptions::default()).map_err(to_py)
}

/// Gaussian-approximation error probability at the configured thresholds,
/// averaged over both receivers.
#[pyfunction]
fn theoretical_ber(py: Python<'_>, model: &PyChannelModel, config: &PyLinkConfig) -> PyResult<f64> {
    py.detach(|| evaluator(model, &config.inner).map(|e| e.configured()))
}

/// Thresholds minimising the theoretical error and that error.
#[pyfunction]
fn optimal_thresholds(py: Python<'_>, model: &PyChannelModel, config: &PyLinkConfig) -> PyResult<(Vec<f64>, f64)> {
    py.detach(|| {
        let eval = evaluator(model, &config.inner)?;
        Ok(match config.inner.modulation {
            Modulation::Bcsk => {
                let (t, ber) = optimal_tau(&eval);
                (vec![t], ber)
            }
            Modulation::Qcsk => {
                let (t, ber) = optimal_qcsk_thresholds(&eval);
                (t.to_vec(), ber)
            }
        })
    })
}

/// Symbol-level Monte Carlo over the analytic taps. Returns
/// `(errors_rx1, errors_rx2, symbols)`.
#[pyfunction]
fn run_link(py: Python<'_>, model: &PyChannelModel, config: &PyLinkConfig) -> PyResult<(usize, usize, usize)> {
    let c = &config.inner;
    py.detach(|| {
        let coeffs = model
            .inner
            .coefficients(c.slot_duration(), c.discarding_time(), c.taps())
            .map_err(to_py)?;
        let r = run_link_core(c, LinkChannel::Coefficients(&coeffs), false).map_err(to_py)?;
        Ok((r.errors[0], r.errors[1], r.symbols))
    })
}

/// Bits per second per direction: `bits_per_symbol · (1 − ber) / t_s`.
#[pyfunction]
fn throughput(bits_per_symbol: u32, ber: f64, t_s: f64) -> f64 {
    mc::throughput(bits_per_symbol, ber, t_s)
}

#[pymodule]
#[pyo3(name = "mcvd")]
fn mcvd_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyTopology>()?;
    m.add_class::<PyChannelModel>()?;
    m.add_class::<PyParticleRun>()?;
    m.add_class::<PyLinkConfig>()?;
    m.add_function(wrap_pyfunction!(capture_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_ber, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(run_link, m)?)?;
    m.add_function(wrap_pyfunction!(throughput, m)?)?;
    Ok(())
}
