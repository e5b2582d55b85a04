//! Python bindings: `import shearfront`.
//!
//! Coefficient profiles are passed as a float (constant) or a sequence of
//! node values. Failures raise `shearfront.ShearfrontError` with the
//! message `"CODE: description"`.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use shearfront::config::ScenarioConfig;
use shearfront::cross_section::{build_model, LossKind, LossSpec, Profile, ReactionKind, ReactionSpec};
use shearfront::diagnostics::{self, DEFAULT_DECAY_WINDOW};
use shearfront::dispersion::{self, RegimeKind};
use shearfront::eigen;
use shearfront::front::{self, FrontOptions, FrontSolution};
use shearfront::ivp::{self, CylinderGrid, InitialProfile, RunOptions, Simulator};
use shearfront::CrossSectionModel;

create_exception!(shearfront, ShearfrontError, PyException);

fn err(e: shearfront::Error) -> PyErr {
    ShearfrontError::new_err(format!("{}: {}", e.code(), e))
}

#[derive(FromPyObject)]
enum ProfileArg {
    Constant(f64),
    Nodes(Vec<f64>),
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Constant(v) => Profile::constant(v),
            ProfileArg::Nodes(values) => Profile::Nodes { values },
        }
    }
}

fn reaction_kind(s: &str) -> PyResult<ReactionKind> {
    match s {
        "linear" => Ok(ReactionKind::Linear),
        "log_kpp" => Ok(ReactionKind::LogKpp),
        _ => Err(ShearfrontError::new_err(format!("BAD_PARAMETER: unknown reaction kind {s:?}"))),
    }
}

fn loss_kind(s: &str) -> PyResult<LossKind> {
    match s {
        "linear" => Ok(LossKind::Linear),
        "saturating" => Ok(LossKind::Saturating),
        _ => Err(ShearfrontError::new_err(format!("BAD_PARAMETER: unknown loss kind {s:?}"))),
    }
}

/// Cross-section ω = [0, length] with flow u, reaction slope a and loss slope q.
#[pyclass(name = "Model", module = "shearfront", frozen)]
struct PyModel {
    inner: CrossSectionModel,
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (n_y, flow, a, q, length = 1.0, reaction = "linear", loss = "linear", lewis = 1.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        n_y: usize,
        flow: ProfileArg,
        a: ProfileArg,
        q: ProfileArg,
        length: f64,
        reaction: &str,
        loss: &str,
        lewis: f64,
    ) -> PyResult<Self> {
        let reaction = ReactionSpec {
            kind: reaction_kind(reaction)?,
            amplitude: a.into(),
        };
        let loss = LossSpec {
            kind: loss_kind(loss)?,
            rate: q.into(),
        };
        let inner = build_model(length, n_y, &flow.into(), &reaction, &loss, lewis).map_err(err)?;
        Ok(Self { inner })
    }

    /// Builds the model described by a scenario TOML file.
    #[staticmethod]
    fn from_config(path: PathBuf) -> PyResult<Self> {
        let cfg = ScenarioConfig::load(&path).map_err(err)?;
        Ok(Self {
            inner: cfg.model().map_err(err)?,
        })
    }

    /// Node positions y_j = j L / (n_y − 1).
    #[staticmethod]
    #[pyo3(signature = (n_y, length = 1.0))]
    fn nodes(n_y: usize, length: f64) -> Vec<f64> {
        (0..n_y).map(|j| j as f64 * length / (n_y - 1) as f64).collect()
    }

    #[getter]
    fn n_y(&self) -> usize {
        self.inner.n_y()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    #[getter]
    fn lewis(&self) -> f64 {
        self.inner.lewis()
    }

    #[getter]
    fn ys(&self) -> Vec<f64> {
        self.inner.ys().to_vec()
    }

    /// Flow after projection to zero mean.
    #[getter]
    fn flow(&self) -> Vec<f64> {
        self.inner.flow().to_vec()
    }

    fn mu(&self, lam: f64) -> PyResult<f64> {
        eigen::mu(&self.inner, lam).map_err(err)
    }

    fn nu(&self, lam: f64) -> PyResult<f64> {
        eigen::nu(&self.inner, lam).map_err(err)
    }

    fn mu_derivative(&self, lam: f64) -> PyResult<f64> {
        eigen::mu_derivative(&self.inner, lam).map_err(err)
    }

    /// (μ(λ), φ_λ) with φ positive and L²-normalized.
    fn eigenpair(&self, lam: f64) -> PyResult<(f64, Vec<f64>)> {
        let p = eigen::mu_pair(&self.inner, lam).map_err(err)?;
        Ok((p.value, p.eigenfunction))
    }

    fn k(&self, lam: f64) -> PyResult<f64> {
        dispersion::k_of_lambda(&self.inner, lam).map_err(err)
    }

    /// (c*, λ*).
    fn minimal_speed(&self) -> PyResult<(f64, f64)> {
        let ms = dispersion::minimal_speed(&self.inner).map_err(err)?;
        Ok((ms.c_star, ms.lambda_star))
    }

    /// (λ₁, λ₂) with k(λᵢ) = c λᵢ.
    fn roots_for_speed(&self, c: f64) -> PyResult<(f64, f64)> {
        dispersion::roots_for_speed(&self.inner, c).map_err(err)
    }

    /// Smaller root λ_c of k(λ) = c λ.
    fn lambda_c(&self, c: f64) -> PyResult<f64> {
        front::lambda_c(&self.inner, c).map_err(err)
    }

    /// Regime for initial decay rate `decay`, as a dict with key `regime`.
    fn classify<'py>(&self, py: Python<'py>, decay: f64) -> PyResult<Bound<'py, PyDict>> {
        let v = dispersion::classify_regime(&self.inner, decay).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("regime", v.label())?;
        d.set_item("decay", v.decay)?;
        let put_cert = |d: &Bound<'py, PyDict>, c: &dispersion::BlowOffCertificate| -> PyResult<()> {
            d.set_item("eta", c.eta)?;
            d.set_item("margin", c.margin)?;
            d.set_item("drift", c.drift)
        };
        match &v.kind {
            RegimeKind::Extinction { rate, blow_off } => {
                d.set_item("rate", *rate)?;
                if let Some(c) = blow_off {
                    put_cert(&d, c)?;
                }
            }
            RegimeKind::BlowOff(c) => put_cert(&d, c)?,
            RegimeKind::Propagation { speed } => d.set_item("speed", *speed)?,
            RegimeKind::OpenConjectured { c_star } => d.set_item("c_star", *c_star)?,
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Model(n_y={}, length={}, lewis={})", self.inner.n_y(), self.inner.length(), self.inner.lewis())
    }
}

/// Result of a Cauchy-problem run.
#[pyclass(name = "Simulation", module = "shearfront", frozen, get_all)]
struct PySimulation {
    /// (t, front_pos_T, front_pos_Y, sup_T, decay_rate_right, y_left_plateau)
    rows: Vec<(f64, Option<f64>, Option<f64>, f64, Option<f64>, Option<f64>)>,
    xs: Vec<f64>,
    /// Final fields, x-major: index i * n_y + j.
    temperature: Vec<f64>,
    fuel: Vec<f64>,
    t: f64,
    dt: f64,
    steps: usize,
    /// Error code if a front reached the guard margin and the run stopped early.
    stopped: Option<String>,
}

#[pymethods]
impl PySimulation {
    /// (speed, r²) from the trailing `fit_window` fraction of T-front positions.
    #[pyo3(signature = (fit_window = 0.5))]
    fn speed(&self, fit_window: f64) -> PyResult<(f64, f64)> {
        let track: Vec<(f64, f64)> = self.rows.iter().filter_map(|r| r.1.map(|x| (r.0, x))).collect();
        let fit = diagnostics::speed_estimate(&track, fit_window).map_err(err)?;
        Ok((fit.speed, fit.r2))
    }

    /// γ̂ from the trailing half of the sup T series.
    fn extinction_rate(&self) -> PyResult<f64> {
        let series: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.0, r.3)).collect();
        diagnostics::extinction_rate(&series).map_err(err)
    }
}

#[pyfunction]
#[pyo3(signature = (model, t_end, x_min = -20.0, x_max = 80.0, n_x = 2001, decay = 0.5, fuel_decay = 1.0, c1 = 1.0, c2 = 1.0, c3 = 1.0, plateau = 1.0, cadence = 50, dt_max = 0.01))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    model: &PyModel,
    t_end: f64,
    x_min: f64,
    x_max: f64,
    n_x: usize,
    decay: f64,
    fuel_decay: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    plateau: f64,
    cadence: usize,
    dt_max: f64,
) -> PyResult<PySimulation> {
    let m = &model.inner;
    let p = InitialProfile {
        decay,
        fuel_decay,
        c1,
        c2,
        c3,
        plateau,
    };
    py.detach(|| {
        let grid = CylinderGrid::new(x_min, x_max, n_x)?;
        let sim = Simulator::for_horizon(m, &grid, t_end, dt_max)?;
        let state = ivp::make_initial_profile(&grid, m, &p)?;
        let out = ivp::run(&sim, state, &RunOptions::new(t_end, cadence), |_, _| Ok(()))?;
        Ok(PySimulation {
            rows: out
                .rows
                .iter()
                .map(|r| (r.t, r.front_pos_t, r.front_pos_y, r.sup_t, r.decay_rate_right, r.y_left_plateau))
                .collect(),
            xs: grid.xs().to_vec(),
            t: out.state.t,
            temperature: out.state.temperature,
            fuel: out.state.fuel,
            dt: sim.dt(),
            steps: out.steps,
            stopped: out.boundary_touched.map(|e| e.code().to_string()),
        })
    })
    .map_err(err)
}

/// Traveling front on [−a, a] × ω.
#[pyclass(name = "Front", module = "shearfront", frozen)]
struct PyFront {
    inner: FrontSolution,
}

#[pymethods]
impl PyFront {
    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn xs(&self) -> Vec<f64> {
        self.inner.xs.clone()
    }

    /// x-major: index i * n_y + j.
    #[getter]
    fn temperature(&self) -> Vec<f64> {
        self.inner.temperature.clone()
    }

    #[getter]
    fn fuel(&self) -> Vec<f64> {
        self.inner.fuel.clone()
    }

    #[getter]
    fn y_inf(&self) -> f64 {
        self.inner.y_inf
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    #[getter]
    fn lambda_c(&self) -> f64 {
        self.inner.bounds.lambda_c
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.bounds.beta
    }

    /// (c_n, Y∞) of the approximating fronts of `minimal_speed_front`.
    #[getter]
    fn sequence(&self) -> Vec<(f64, f64)> {
        self.inner.sequence.clone()
    }

    fn in_sandwich(&self) -> bool {
        self.inner.in_sandwich()
    }

    #[pyo3(signature = (model, window = DEFAULT_DECAY_WINDOW))]
    fn right_decay_rate(&self, model: &PyModel, window: (f64, f64)) -> PyResult<f64> {
        self.inner.right_decay_rate(&model.inner, window).map_err(err)
    }

    fn mass_balance_residual(&self, model: &PyModel) -> PyResult<f64> {
        diagnostics::mass_balance_residual(&model.inner, &self.inner).map_err(err)
    }
}

fn front_options(half_length: f64, n_x: usize, tol: f64, max_iter: usize) -> FrontOptions {
    FrontOptions {
        half_length,
        n_x,
        tol,
        max_iter,
        ..FrontOptions::default()
    }
}

#[pyfunction]
#[pyo3(signature = (model, c, half_length = 40.0, n_x = 801, tol = 1e-8, max_iter = 5000))]
fn solve_front(py: Python<'_>, model: &PyModel, c: f64, half_length: f64, n_x: usize, tol: f64, max_iter: usize) -> PyResult<PyFront> {
    let opts = front_options(half_length, n_x, tol, max_iter);
    let inner = py.detach(|| front::solve_front(&model.inner, c, &opts)).map_err(err)?;
    Ok(PyFront { inner })
}

#[pyfunction]
#[pyo3(signature = (model, half_length = 40.0, n_x = 801, tol = 1e-8, max_iter = 5000))]
fn minimal_speed_front(py: Python<'_>, model: &PyModel, half_length: f64, n_x: usize, tol: f64, max_iter: usize) -> PyResult<PyFront> {
    let opts = front_options(half_length, n_x, tol, max_iter);
    let inner = py.detach(|| front::minimal_speed_front(&model.inner, &opts)).map_err(err)?;
    Ok(PyFront { inner })
}

#[pymodule]
#[pyo3(name = "shearfront")]
fn init_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("ShearfrontError", m.py().get_type::<ShearfrontError>())?;
    m.add_class::<PyModel>()?;
    m.add_class::<PySimulation>()?;
    m.add_class::<PyFront>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_front, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_speed_front, m)?)?;
    Ok(())
}
