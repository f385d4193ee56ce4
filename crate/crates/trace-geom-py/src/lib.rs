//! Python bindings. Reports cross the boundary as JSON text; the few scalar
//! helpers return tuples.

use clap::Parser;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use trace_geom::bt_tree::orbital_integral_nonarch;
use trace_geom::cli::{self, Cli, CliError};
use trace_geom::padic_local::{GammaLocal, HalfInt, SplittingType, SubgroupKind};
use trace_geom::trace_geometry::{
    catalog_setting, geometric_and_multiplicity_bound, lattice_volume, BoundOptions, QuaternionSetting, SettingInput,
    SpectralWindow,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn setting(source: &str) -> PyResult<QuaternionSetting> {
    let input = match catalog_setting(source) {
        Some(s) => s,
        None => SettingInput::from_toml(source).map_err(value_err)?,
    };
    QuaternionSetting::new(input).map_err(value_err)
}

/// Run the command line with `argv` (without the program name). Returns
/// `(exit_code, stdout)`; configuration errors raise `ValueError` and
/// computation errors `RuntimeError`.
#[pyfunction]
fn run(argv: Vec<String>) -> PyResult<(i32, String)> {
    let cli = Cli::try_parse_from(std::iter::once("trace-geom".to_string()).chain(argv)).map_err(value_err)?;
    match cli::run(cli) {
        Ok(out) => Ok((out.exit_code(), out.output)),
        Err(e @ CliError::Config(_)) => Err(value_err(e)),
        Err(e) => Err(runtime_err(e)),
    }
}

/// `(lo, hi)` enclosing the covolume of the unit group, for a preset name or
/// a setting in TOML.
#[pyfunction]
#[pyo3(signature = (setting_source, zeta_prime_bound = 100_000))]
fn covolume(setting_source: &str, zeta_prime_bound: u64) -> PyResult<(f64, f64)> {
    let v = lattice_volume(&setting(setting_source)?, zeta_prime_bound).map_err(runtime_err)?;
    Ok((v.covolume.lo, v.covolume.hi))
}

/// Exact local orbital integral `O(gamma, 1_{K_j(p^r)})` as `(num, den)`.
#[pyfunction]
fn orbital_integral(q: u64, kind: &str, nu: &str, r: u32, j: u8) -> PyResult<(u128, u128)> {
    let kind = SplittingType::parse(kind).ok_or_else(|| value_err(format!("unknown type {kind:?}")))?;
    let nu = HalfInt::parse(nu).ok_or_else(|| value_err(format!("nu must be a half-integer, got {nu:?}")))?;
    let j = SubgroupKind::from_j(j).ok_or_else(|| value_err("j must be 0 or 1"))?;
    let gamma = GammaLocal::from_type(q, kind, nu).map_err(value_err)?;
    let o = orbital_integral_nonarch(q, &gamma, r, j).map_err(runtime_err)?;
    Ok((*o.count.value.numer(), *o.count.value.denom()))
}

/// The full bound report as JSON, for a uniform `sigma` at every split place.
#[pyfunction]
fn density_bound(setting_source: &str, sigma: f64) -> PyResult<String> {
    let s = setting(setting_source)?;
    let window = SpectralWindow::uniform_sigma(s.split_places.len(), sigma);
    let report = geometric_and_multiplicity_bound(&s, &window, &BoundOptions::default()).map_err(runtime_err)?;
    serde_json::to_string(&report).map_err(runtime_err)
}

#[pymodule]
fn trace_geom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(covolume, m)?)?;
    m.add_function(wrap_pyfunction!(orbital_integral, m)?)?;
    m.add_function(wrap_pyfunction!(density_bound, m)?)?;
    Ok(())
}
