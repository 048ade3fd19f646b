use p1tr::cli::{cmd_gw, cmd_hurwitz, cmd_omega, cmd_rmatrix, cmd_verify, CurveConfig, Method, Output, RouteArg, Suite};
use p1tr::error::Error;
use p1tr::{applications, intersections};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_) | Error::Unstable { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn envelope(o: Output) -> String {
    serde_json::to_string(&o.envelope.to_json()).expect("json")
}

/// Spectral curve with exact parameters.
#[pyclass(frozen)]
struct Curve {
    cfg: CurveConfig,
}

#[pymethods]
impl Curve {
    /// Curve from a config JSON string, e.g. '{"kind": "p1", "w1": 1, "w2": 0, "sigma": {"rt2": 1}}'.
    #[new]
    fn new(config: &str) -> PyResult<Self> {
        let v = serde_json::from_str(config).map_err(|e| PyValueError::new_err(format!("config is not JSON: {e}")))?;
        Ok(Curve { cfg: CurveConfig::from_json(&v).map_err(to_py)? })
    }

    /// Equivariant point (w1, w2, sigma) = (1, 0, sqrt2).
    #[staticmethod]
    fn p1() -> Self {
        Curve { cfg: CurveConfig::default_p1() }
    }

    /// Non-equivariant point sigma = sqrt2.
    #[staticmethod]
    fn stationary() -> Self {
        Curve { cfg: CurveConfig::default_stationary() }
    }

    /// x = Y - log Y.
    #[staticmethod]
    fn lambert() -> Self {
        Curve { cfg: CurveConfig::default_lambert() }
    }

    /// omega_{g,n} envelope as JSON; method is "recursion", "graphsum" or "both".
    #[pyo3(signature = (g, n, method = "recursion"))]
    fn omega(&self, g: usize, n: usize, method: &str) -> PyResult<String> {
        let m = match method {
            "recursion" => Method::Recursion,
            "graphsum" => Method::Graphsum,
            "both" => Method::Both,
            _ => return Err(PyValueError::new_err(format!("unknown method '{method}'"))),
        };
        cmd_omega(&self.cfg, g, n, m, None).map(envelope).map_err(to_py)
    }

    /// Stationary invariant table envelope as JSON.
    #[pyo3(signature = (g, n, amax = 4))]
    fn gw(&self, g: usize, n: usize, amax: usize) -> PyResult<String> {
        cmd_gw(&self.cfg, g, n, amax, None).map(envelope).map_err(to_py)
    }

    /// Hurwitz numbers extracted from the curve, as a JSON envelope.
    fn hurwitz(&self, g: usize, mu: Vec<usize>) -> PyResult<String> {
        cmd_hurwitz(&self.cfg, g, &mu, None).map(envelope).map_err(to_py)
    }

    /// R-matrix envelope; route is "curve", "ode", "closed" or "all".
    #[pyo3(signature = (route = "all", order = None))]
    fn rmatrix(&self, route: &str, order: Option<usize>) -> PyResult<String> {
        let r = match route {
            "curve" => RouteArg::Curve,
            "ode" => RouteArg::Ode,
            "closed" => RouteArg::Closed,
            "all" => RouteArg::All,
            _ => return Err(PyValueError::new_err(format!("unknown route '{route}'"))),
        };
        cmd_rmatrix(&self.cfg, r, order).map(envelope).map_err(to_py)
    }

    /// Runs a verification suite on this curve; returns (passed, report).
    fn verify(&self, suite: &str) -> PyResult<(bool, String)> {
        run_verify(Some(&self.cfg), suite)
    }

    fn __repr__(&self) -> String {
        format!("Curve({})", self.cfg.curve.params_json())
    }
}

fn run_verify(cfg: Option<&CurveConfig>, suite: &str) -> PyResult<(bool, String)> {
    let s = match suite {
        "theorem-main" => Suite::TheoremMain,
        "rmatrix" => Suite::Rmatrix,
        "norbury-scott" => Suite::NorburyScott,
        "bouchard-marino" => Suite::BouchardMarino,
        "bessel" => Suite::Bessel,
        "intersections" => Suite::Intersections,
        "all" => Suite::All,
        _ => return Err(PyValueError::new_err(format!("unknown suite '{suite}'"))),
    };
    let o = cmd_verify(cfg, s).map_err(to_py)?;
    Ok((o.ok, o.pretty))
}

/// <tau_k1 ... tau_kn>_g as a fraction string.
#[pyfunction]
fn psi(g: usize, k: Vec<usize>) -> PyResult<String> {
    intersections::tau(g, &k).map(|v| v.to_string()).map_err(to_py)
}

/// Simple Hurwitz number by counting factorizations, as a fraction string.
#[pyfunction]
fn hurwitz_count(g: usize, mu: Vec<usize>) -> PyResult<String> {
    applications::hurwitz_bruteforce(g, &mu).map(|v| v.to_string()).map_err(to_py)
}

/// Runs a verification suite at the default points.
#[pyfunction]
fn verify(suite: &str) -> PyResult<(bool, String)> {
    run_verify(None, suite)
}

#[pymodule]
fn p1tr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Curve>()?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(hurwitz_count, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", p1tr::cli::VERSION)?;
    Ok(())
}
