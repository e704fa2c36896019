//! Python bindings: models, c-functions, regularization scalars, scattering, N-bar maps and suites.

use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rankone::cfunc::{c_closed_form, default_order, CFunction};
use rankone::lie_core::Mat;
use rankone::{ModelName, NbarCoordinates, RankOneModel};
use rankone_cli::{Settings, Suite};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type Rows = Vec<Vec<C64>>;

fn to_rows(m: &Mat) -> Rows {
    (0..3).map(|i| (0..3).map(|j| m[(i, j)]).collect()).collect()
}

fn from_rows(rows: &[Vec<C64>]) -> PyResult<Mat> {
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(PyValueError::new_err("expected a 3x3 matrix"));
    }
    Ok(Mat::from_fn(|i, j| rows[i][j]))
}

/// One of the rank-one models H2R, H3R, H2C in its 3x3 matrix realization.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: RankOneModel,
}

#[pymethods]
impl PyModel {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        let name: ModelName = name.parse().map_err(err)?;
        Ok(PyModel { inner: RankOneModel::build(name) })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.to_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn m_alpha(&self) -> usize {
        self.inner.m_alpha
    }

    #[getter]
    fn m_2alpha(&self) -> usize {
        self.inner.m_2alpha
    }

    #[getter]
    fn rho_check(&self) -> f64 {
        self.inner.rho_check
    }

    #[getter]
    fn vol_sphere(&self) -> f64 {
        self.inner.vol_sphere
    }

    /// Iwasawa decomposition g = k·exp(uȞ₀)·n, returned as (k, u, n).
    fn iwasawa(&self, g: Rows) -> PyResult<(Rows, f64, Rows)> {
        let (k, u, n) = self.inner.iwasawa_kan(&from_rows(&g)?).map_err(err)?;
        Ok((to_rows(&k), u, to_rows(&n)))
    }

    fn exp_a(&self, u: f64) -> Rows {
        to_rows(&self.inner.exp_a(u))
    }

    /// exp of the N̄ element with root-space coordinates (u1, u2).
    fn nbar_exp(&self, u1: Vec<f64>, u2: Vec<f64>) -> PyResult<Rows> {
        let c = self.coords(u1, u2)?;
        Ok(to_rows(&self.inner.nbar_exp(&c)))
    }

    /// 𝒩(n̄) at root-space coordinates (u1, u2).
    fn script_n(&self, u1: Vec<f64>, u2: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.script_n(&self.coords(u1, u2)?))
    }

    /// |det Dν| at root-space coordinates (u1, u2).
    #[pyo3(signature = (u1, u2, h = 1e-4))]
    fn jacobian_nu(&self, u1: Vec<f64>, u2: Vec<f64>, h: f64) -> PyResult<f64> {
        rankone::geomtransform::jacobian_nu(&self.inner, &self.coords(u1, u2)?, h).map_err(err)
    }

    fn c_integral(&self, z: C64) -> PyResult<(C64, f64)> {
        let r = CFunction::new(&self.inner).and_then(|cf| cf.c_integral(z)).map_err(err)?;
        Ok((r.value, r.estimated_error))
    }

    fn c_closed_form(&self, z: C64) -> PyResult<C64> {
        Ok(c_closed_form(&self.inner, z).map_err(err)?.value)
    }

    #[pyo3(signature = (lambda_check, k = None))]
    fn c_continued(&self, lambda_check: C64, k: Option<u32>) -> PyResult<(C64, f64)> {
        let k = k.unwrap_or_else(|| default_order(&self.inner, lambda_check));
        let r = CFunction::new(&self.inner).and_then(|cf| cf.c_continued(lambda_check, k)).map_err(err)?;
        Ok((r.value, r.estimated_error))
    }

    fn c_epsilon(&self, lambda_check: C64, eps: f64) -> PyResult<(C64, f64)> {
        let r = CFunction::new(&self.inner).and_then(|cf| cf.c_epsilon(lambda_check, eps)).map_err(err)?;
        Ok((r.value, r.estimated_error))
    }

    fn beta(&self, ell: u32, lambda_check: C64) -> C64 {
        rankone::regularize::beta(&self.inner, ell, lambda_check)
    }

    /// Scalar of S_μ on the ℓ-th zonal K-type, with the fit residual.
    #[pyo3(signature = (mu_check, ell, order = None))]
    fn scattering(&self, mu_check: C64, ell: usize, order: Option<usize>) -> PyResult<(C64, f64)> {
        let order = order.unwrap_or_else(|| rankone::poisson::PoissonOrders::for_model(&self.inner).boundary);
        let f = rankone::poisson::scattering_eigenvalue(&self.inner, mu_check, ell, order).map_err(err)?;
        Ok((f.value, f.fit_residual))
    }

    fn __repr__(&self) -> String {
        format!("Model('{}')", self.inner.name)
    }
}

impl PyModel {
    fn coords(&self, u1: Vec<f64>, u2: Vec<f64>) -> PyResult<NbarCoordinates> {
        if u1.len() != self.inner.m_alpha || u2.len() != self.inner.m_2alpha {
            return Err(PyValueError::new_err(format!(
                "expected {} + {} coordinates",
                self.inner.m_alpha, self.inner.m_2alpha
            )));
        }
        Ok(NbarCoordinates { u1, u2 })
    }
}

/// Runs an identity suite and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (suite, model = "H2R", seed = 1, workers = 1))]
fn verify(py: Python<'_>, suite: &str, model: &str, seed: u64, workers: usize) -> PyResult<String> {
    let suite: Suite = serde_json::from_value(serde_json::Value::String(suite.to_ascii_lowercase())).map_err(err)?;
    let model: ModelName = model.parse().map_err(err)?;
    let mut settings = Settings::load(None, Some(model)).map_err(err)?;
    settings.run.seed = seed;
    settings.run.workers = workers.max(1);
    let report = py.detach(|| rankone_cli::run_suite(suite, &settings)).map_err(err)?;
    Ok(report.to_json())
}

#[pymodule]
fn rankone_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
