//! Python bindings for the finite Brane Calculus toolkit.

use std::collections::BTreeSet;

use brane_core::bisim::{self, BisimOptions, BisimReport, InstFamily};
use brane_core::congruence::{self, normalize, ClassKey};
use brane_core::lts::{sys_steps, SysLabel};
use brane_core::markov::{self, ssa_run};
use brane_core::stochastic::{self, sos_sys, Rate, RateTable as CoreRates};
use brane_core::syntax::{parse_term, Term as CoreTerm};
use brane_core::typing::{type_of, Type};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rate) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((r.to_string(),))
}

fn label(text: &str) -> PyResult<SysLabel> {
    SysLabel::parse(text).ok_or_else(|| value_error(format!("unknown label `{text}`")))
}

/// A well-typed Brane Calculus term.
#[pyclass(frozen, from_py_object, module = "brane")]
#[derive(Clone)]
struct Term {
    inner: CoreTerm,
    ty: Type,
}

impl Term {
    fn system(&self) -> PyResult<&CoreTerm> {
        if self.ty == Type::Sys {
            Ok(&self.inner)
        } else {
            Err(value_error(format!(
                "expected a system, found a term of type {}",
                self.ty
            )))
        }
    }
}

#[pymethods]
impl Term {
    #[new]
    fn new(source: &str) -> PyResult<Term> {
        let inner = parse_term(source).map_err(value_error)?;
        let ty = type_of(&inner).map_err(value_error)?;
        Ok(Term { inner, ty })
    }

    /// The type, e.g. `sys`, `mem` or `sys -> sys`.
    #[getter]
    fn r#type(&self) -> String {
        self.ty.to_string()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    /// The canonical representative of the congruence class.
    fn normalize(&self) -> String {
        ClassKey::from(normalize(&self.inner)).to_string()
    }

    fn equiv(&self, other: &Term) -> PyResult<bool> {
        congruence::equiv(&self.inner, &other.inner).map_err(value_error)
    }

    /// Labelled transitions as `(label, target, derivation)` triples.
    fn steps(&self) -> PyResult<Vec<(String, String, String)>> {
        let p = self.system()?;
        Ok(sys_steps(p)
            .into_iter()
            .map(|t| {
                (
                    t.label.to_string(),
                    t.target.to_string(),
                    t.derivation.compact(),
                )
            })
            .collect())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Term({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: &Term) -> bool {
        normalize(&self.inner) == normalize(&other.inner)
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        normalize(&self.inner).hash(&mut h);
        h.finish()
    }
}

/// Action rates, written as `phago n = 2` lines with an optional `default`.
#[pyclass(frozen, module = "brane")]
struct RateTable {
    inner: CoreRates,
}

#[pymethods]
impl RateTable {
    #[new]
    fn new(text: &str) -> PyResult<RateTable> {
        CoreRates::parse(text)
            .map(|inner| RateTable { inner })
            .map_err(value_error)
    }

    /// The same rate for every action.
    #[staticmethod]
    fn uniform(rate: &str) -> PyResult<RateTable> {
        let rate: Rate = rate.parse().map_err(value_error)?;
        Ok(RateTable {
            inner: CoreRates::uniform(rate),
        })
    }
}

/// Behaviour of a system: `{label: {target: Fraction}}`.
#[pyfunction]
fn behaviour<'py>(py: Python<'py>, p: &Term, rates: &RateTable) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for (l, m) in sos_sys(p.system()?, &rates.inner).map_err(value_error)? {
        let inner = PyDict::new(py);
        for (k, r) in m.iter() {
            inner.set_item(k.to_string(), fraction(py, r)?)?;
        }
        out.set_item(l.to_string(), inner)?;
    }
    Ok(out)
}

/// Rate of `label` from `p` into the set of ground systems `targets`.
#[pyfunction]
fn theta_sys<'py>(
    py: Python<'py>,
    label_text: &str,
    p: &Term,
    targets: Vec<Term>,
    rates: &RateTable,
) -> PyResult<Bound<'py, PyAny>> {
    let mut set = BTreeSet::new();
    for t in &targets {
        set.insert(ClassKey::of(t.system()?));
    }
    let r = stochastic::theta_sys(&label(label_text)?, p.system()?, &set, &rates.inner)
        .map_err(value_error)?;
    fraction(py, &r)
}

fn verdict(report: BisimReport) -> (bool, String) {
    (report.verdict.is_bisimilar(), report.verdict.to_string())
}

/// Strong bisimulation under the default instantiation family.
#[pyfunction]
#[pyo3(signature = (p, q, depth = 1))]
fn strong_bisim(p: &Term, q: &Term, depth: usize) -> PyResult<(bool, String)> {
    let (a, b) = (p.system()?, q.system()?);
    let opts = BisimOptions {
        depth,
        ..BisimOptions::default()
    };
    bisim::strong_bisim(a, b, &InstFamily::for_systems(a, b), &opts)
        .map(verdict)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Stochastic bisimulation under the default instantiation family.
#[pyfunction]
#[pyo3(signature = (p, q, rates, depth = 1))]
fn rate_bisim(p: &Term, q: &Term, rates: &RateTable, depth: usize) -> PyResult<(bool, String)> {
    let (a, b) = (p.system()?, q.system()?);
    let opts = BisimOptions {
        depth,
        ..BisimOptions::default()
    };
    bisim::rate_bisim(a, b, &rates.inner, &InstFamily::for_systems(a, b), &opts)
        .map(verdict)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Reachable states and the `.sta` / `.tra` renderings of the chain.
#[pyfunction]
#[pyo3(signature = (p, rates, budget = markov::DEFAULT_STATE_BUDGET))]
fn export_ctmc(p: &Term, rates: &RateTable, budget: usize) -> PyResult<(String, String)> {
    let (space, ctmc) = markov::explore(p.system()?, &rates.inner, budget)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(markov::export_ctmc(&space, &ctmc))
}

/// Stochastic simulation; one list of `(time, state)` pairs per run, run
/// `i` seeded with `seed + i`.
#[pyfunction]
#[pyo3(signature = (p, rates, seed, t_max, runs = 1))]
fn simulate(
    p: &Term,
    rates: &RateTable,
    seed: u64,
    t_max: f64,
    runs: usize,
) -> PyResult<Vec<Vec<(f64, String)>>> {
    let (space, ctmc) = markov::explore(p.system()?, &rates.inner, markov::DEFAULT_STATE_BUDGET)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((0..runs)
        .map(|i| {
            ssa_run(&space, &ctmc, seed.wrapping_add(i as u64), t_max)
                .steps
                .into_iter()
                .map(|(t, s)| (t, space.states[s].to_string()))
                .collect()
        })
        .collect())
}

#[pymodule]
fn brane(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Term>()?;
    m.add_class::<RateTable>()?;
    m.add_function(wrap_pyfunction!(behaviour, m)?)?;
    m.add_function(wrap_pyfunction!(theta_sys, m)?)?;
    m.add_function(wrap_pyfunction!(strong_bisim, m)?)?;
    m.add_function(wrap_pyfunction!(rate_bisim, m)?)?;
    m.add_function(wrap_pyfunction!(export_ctmc, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add("SSA_ALGORITHM", markov::SSA_ALGORITHM)?;
    Ok(())
}
