//! Python bindings. Scalars cross the boundary as `Scalar` objects or as
//! strings in the `a+b*sqrt2` grammar, never as floats.

use pyo3::basic::CompareOp;
use pyo3::exceptions::{PyOSError, PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use obspace::cli::parse_cycles;
use obspace::extension::{self, ExtensionResult, LinearSystem};
use obspace::frame::{self, Automorphism, AutomorphismGroup, ObservedDistribution, DEFAULT_AUTOMORPHISM_CAP};
use obspace::kscheck::{self, ParityVerdict};
use obspace::scenarios::{self, EighthAngle};
use obspace::{Error, ExtensionFile, SignedDistribution, SpaceFile};

fn err(e: Error) -> PyErr {
    match e {
        Error::DivisionByZero => PyZeroDivisionError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Scalar", module = "obspace", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Scalar(obspace::Scalar);

#[derive(FromPyObject)]
enum ScalarLike<'py> {
    Scalar(PyRef<'py, Scalar>),
    Int(i64),
    Text(String),
}

impl ScalarLike<'_> {
    fn value(&self) -> PyResult<obspace::Scalar> {
        match self {
            ScalarLike::Scalar(s) => Ok(s.0.clone()),
            ScalarLike::Int(n) => Ok(obspace::Scalar::integer(*n)),
            ScalarLike::Text(t) => obspace::Scalar::parse(t).map_err(err),
        }
    }
}

#[pymethods]
impl Scalar {
    #[new]
    fn py_new(value: ScalarLike<'_>) -> PyResult<Self> {
        value.value().map(Scalar)
    }

    #[staticmethod]
    fn sqrt2() -> Self {
        Scalar(obspace::Scalar::sqrt2())
    }

    /// Rational part, as a string.
    #[getter]
    fn rational(&self) -> String {
        self.0.rat().to_string()
    }

    /// Coefficient of √2, as a string.
    #[getter]
    fn root2(&self) -> String {
        self.0.root2().to_string()
    }

    fn sign(&self) -> i8 {
        self.0.sign()
    }

    fn conjugate(&self) -> Self {
        Scalar(self.0.conjugate())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Scalar('{}')", self.0)
    }

    fn __float__(&self) -> f64 {
        self.0.to_f64()
    }

    fn __bool__(&self) -> bool {
        !self.0.is_zero()
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }

    fn __richcmp__(&self, other: ScalarLike<'_>, op: CompareOp) -> PyResult<bool> {
        Ok(op.matches(self.0.cmp(&other.value()?)))
    }

    fn __neg__(&self) -> Self {
        Scalar(-&self.0)
    }

    fn __abs__(&self) -> Self {
        Scalar(self.0.abs())
    }

    fn __add__(&self, other: ScalarLike<'_>) -> PyResult<Self> {
        Ok(Scalar(&self.0 + &other.value()?))
    }

    fn __radd__(&self, other: ScalarLike<'_>) -> PyResult<Self> {
        Ok(Scalar(&other.value()? + &self.0))
    }

    fn __sub__(&self, other: ScalarLike<'_>) -> PyResult<Self> {
        Ok(Scalar(&self.0 - &other.value()?))
    }

    fn __rsub__(&self, other: ScalarLike<'_>) -> PyResult<Self> {
        Ok(Scalar(&other.value()? - &self.0))
    }

    fn __mul__(&self, other: ScalarLike<'_>) -> PyResult<Self> {
        Ok(Scalar(&self.0 * &other.value()?))
    }

    fn __rmul__(&self, other: ScalarLike<'_>) -> PyResult<Self> {
        Ok(Scalar(&other.value()? * &self.0))
    }

    fn __truediv__(&self, other: ScalarLike<'_>) -> PyResult<Self> {
        self.0.checked_div(&other.value()?).map(Scalar).map_err(err)
    }

    fn __rtruediv__(&self, other: ScalarLike<'_>) -> PyResult<Self> {
        other.value()?.checked_div(&self.0).map(Scalar).map_err(err)
    }
}

/// Result of an extension solve.
#[pyclass(module = "obspace", frozen, get_all)]
struct Extension {
    mode: String,
    status: String,
    feasible: bool,
    rank: usize,
    nullspace_dimension: usize,
    /// Outcome label to weight, or None when infeasible.
    witness: Option<Vec<(String, String)>>,
    negative_mass: Option<String>,
    /// (row label, multiplier) pairs, or None when feasible.
    certificate: Option<Vec<(String, String)>>,
    certificate_valid: Option<bool>,
}

#[pymethods]
impl Extension {
    fn __repr__(&self) -> String {
        format!("Extension(mode='{}', status='{}')", self.mode, self.status)
    }
}

impl Extension {
    fn new(mode: &str, obs: &ObservedDistribution, sys: &LinearSystem, r: &ExtensionResult) -> Self {
        let labels = obs.space().labels();
        Extension {
            mode: mode.to_string(),
            status: r.status.to_string(),
            feasible: r.is_feasible(),
            rank: r.rank,
            nullspace_dimension: r.nullspace.len(),
            witness: r
                .witness
                .as_ref()
                .map(|w| labels.iter().cloned().zip(w.iter().map(ToString::to_string)).collect()),
            negative_mass: r.negative_mass.as_ref().map(ToString::to_string),
            certificate: r.certificate.as_ref().map(|c| {
                sys.rows()
                    .iter()
                    .zip(&c.multipliers)
                    .map(|(row, y)| (row.label.clone(), y.to_string()))
                    .collect()
            }),
            certificate_valid: r.certificate.as_ref().map(|c| c.is_valid(sys)),
        }
    }
}

type Part = (Vec<String>, Scalar);

/// An observed distribution on a frame of ensembles.
#[pyclass(module = "obspace", frozen)]
struct ObservationSpace(ObservedDistribution);

fn weights_of(obs: &ObservedDistribution, weights: &Bound<'_, PyDict>) -> PyResult<SignedDistribution> {
    let mut pairs = Vec::with_capacity(weights.len());
    for (k, v) in weights.iter() {
        let label: String = k.extract()?;
        let value = v.extract::<ScalarLike<'_>>()?.value()?;
        pairs.push((label, value.to_string()));
    }
    ExtensionFile { weights: pairs }.to_distribution(obs.space()).map_err(err)
}

fn weights_dict<'py>(py: Python<'py>, d: &SignedDistribution) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for (label, w) in d.space().labels().iter().zip(d.weights()) {
        out.set_item(label, Scalar(w.clone()))?;
    }
    Ok(out)
}

#[pymethods]
impl ObservationSpace {
    /// A built-in scenario: piponi, bell, hardy or hardy-hidden. `angles`
    /// (eighths of π) applies to bell only.
    #[staticmethod]
    #[pyo3(signature = (name, angles=None))]
    fn scenario(name: &str, angles: Option<(i64, i64, i64)>) -> PyResult<Self> {
        let bundle = match (name, angles) {
            ("bell", Some((a, b, c))) => scenarios::bell(
                EighthAngle::new(a).map_err(err)?,
                EighthAngle::new(b).map_err(err)?,
                EighthAngle::new(c).map_err(err)?,
            ),
            (_, Some(_)) => return Err(PyValueError::new_err("angles apply to the bell scenario only")),
            ("piponi", None) => scenarios::piponi(),
            ("bell", None) => scenarios::bell_default(),
            ("hardy", None) => scenarios::hardy(),
            ("hardy-hidden", None) => scenarios::hardy_hidden(),
            _ => return Err(PyValueError::new_err(format!("unknown scenario `{name}`"))),
        };
        Ok(ObservationSpace(bundle.observed))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: SpaceFile = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        file.to_observed().map(ObservationSpace).map_err(err)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| PyOSError::new_err(e.to_string()))?;
        Self::from_json(&text)
    }

    fn to_json(&self) -> String {
        SpaceFile::from_observed(&self.0).to_json()
    }

    #[getter]
    fn outcomes(&self) -> Vec<String> {
        self.0.space().labels().to_vec()
    }

    /// Ensembles as (name, [(outcome labels, probability)]).
    #[getter]
    fn ensembles(&self) -> Vec<(String, Vec<Part>)> {
        let labels = self.0.space().labels();
        self.0
            .frame()
            .ensembles()
            .iter()
            .zip(self.0.table())
            .map(|(en, probs)| {
                let parts = en
                    .partition
                    .parts()
                    .zip(probs)
                    .map(|(p, x)| (p.members().map(|i| labels[i].clone()).collect(), Scalar(x.clone())))
                    .collect();
                (en.name.clone(), parts)
            })
            .collect()
    }

    fn is_normalized(&self) -> bool {
        self.0.frame().is_normalized()
    }

    /// Merge outcomes no ensemble can tell apart.
    fn normalized(&self) -> PyResult<Self> {
        self.0.normalize_fat_outcomes().map(ObservationSpace).map_err(err)
    }

    /// Solve the extension problem; mode is signed, traditional or min-negativity.
    #[pyo3(signature = (mode="signed"))]
    fn extend(&self, mode: &str) -> PyResult<Extension> {
        let sys = extension::build_system(&self.0);
        let r = match mode {
            "signed" => extension::solve_signed(&sys),
            "traditional" => extension::solve_traditional(&sys),
            "min-negativity" => match extension::minimize_negativity(&sys) {
                Ok(r) => r,
                Err(Error::Infeasible) => extension::solve_signed(&sys),
                Err(e) => return Err(err(e)),
            },
            _ => return Err(PyValueError::new_err(format!("unknown mode `{mode}`"))),
        };
        Ok(Extension::new(mode, &self.0, &sys, &r))
    }

    /// Whether the weights agree with every observed part probability.
    fn is_extended_by(&self, weights: &Bound<'_, PyDict>) -> PyResult<bool> {
        let d = weights_of(&self.0, weights)?;
        self.0.is_extended_by(&d).map_err(err)
    }

    /// All automorphisms, each as the list of image labels in outcome order.
    #[pyo3(signature = (cap=DEFAULT_AUTOMORPHISM_CAP))]
    fn automorphisms(&self, cap: usize) -> PyResult<Vec<Vec<String>>> {
        let labels = self.0.space().labels();
        let group = AutomorphismGroup::enumerate(&self.0, cap).map_err(err)?;
        Ok(group
            .elements()
            .iter()
            .map(|g| g.as_slice().iter().map(|&i| labels[i].clone()).collect())
            .collect())
    }

    /// Whether a permutation in cycle notation, e.g. "(a,b)(c,d)", is an automorphism.
    fn is_automorphism(&self, cycles: &str) -> PyResult<bool> {
        let g = Automorphism::from_cycles(self.0.space(), &parse_cycles(cycles).map_err(err)?).map_err(err)?;
        Ok(frame::is_automorphism(&self.0, &g))
    }

    /// Average an extension over the group generated by `perms` (cycle
    /// notation), or over all automorphisms when `perms` is None.
    #[pyo3(signature = (weights, perms=None))]
    fn symmetrize<'py>(
        &self,
        py: Python<'py>,
        weights: &Bound<'py, PyDict>,
        perms: Option<Vec<String>>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let q = weights_of(&self.0, weights)?;
        let group = match perms {
            None => AutomorphismGroup::enumerate(&self.0, DEFAULT_AUTOMORPHISM_CAP),
            Some(ps) => ps
                .iter()
                .map(|p| Automorphism::from_cycles(self.0.space(), &parse_cycles(p)?))
                .collect::<Result<Vec<_>, Error>>()
                .and_then(|gens| AutomorphismGroup::generate(&self.0, &gens)),
        }
        .map_err(err)?;
        let r = extension::symmetrize(&self.0, &q, &group).map_err(err)?;
        weights_dict(py, &r)
    }

    /// The traditional product extension of a two-ensemble space.
    fn product_extension<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = extension::product_extension(&self.0).map_err(err)?;
        weights_dict(py, &d)
    }

    fn __repr__(&self) -> String {
        format!(
            "ObservationSpace({} outcomes, {} ensembles)",
            self.0.space().len(),
            self.0.frame().ensembles().len()
        )
    }
}

/// Bases of mutually orthogonal rays in four dimensions.
#[pyclass(module = "obspace", frozen)]
struct BasisSystem(obspace::BasisSystem);

#[pymethods]
impl BasisSystem {
    /// The bundled 18-ray, 9-basis system.
    #[staticmethod]
    fn cabello() -> Self {
        BasisSystem(obspace::BasisSystem::cabello())
    }

    #[staticmethod]
    fn from_bases(bases: Vec<Vec<[i64; 4]>>) -> PyResult<Self> {
        obspace::BasisSystem::from_coords(&bases).map(BasisSystem).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        obspace::BasisSystem::from_json(text).map(BasisSystem).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.0.to_file()).expect("plain data serializes")
    }

    /// Distinct canonical rays.
    fn rays(&self) -> Vec<[i64; 4]> {
        self.0.rays().iter().map(|r| r.coords()).collect()
    }

    /// Structural report as a JSON string.
    fn report(&self) -> String {
        serde_json::to_string(&kscheck::validate_system(&self.0)).expect("plain data serializes")
    }

    /// "obstruction", "no obstruction" or "not applicable".
    fn parity(&self) -> &'static str {
        match kscheck::parity_obstruction(&self.0) {
            ParityVerdict::Obstruction { .. } => "obstruction",
            ParityVerdict::NoObstruction { .. } => "no obstruction",
            ParityVerdict::NotApplicable => "not applicable",
        }
    }

    /// Consistent selections, each the chosen ray index per basis.
    #[pyo3(signature = (limit=10_000))]
    fn selections(&self, limit: usize) -> PyResult<Vec<Vec<usize>>> {
        let found = kscheck::find_selections(&self.0, limit).map_err(err)?;
        Ok(found.into_iter().map(|s| s.choice).collect())
    }

    fn model_exists(&self) -> PyResult<bool> {
        kscheck::model_exists(&self.0).map_err(err)
    }
}

#[pymodule]
#[pyo3(name = "obspace")]
fn obspace_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Scalar>()?;
    m.add_class::<Extension>()?;
    m.add_class::<ObservationSpace>()?;
    m.add_class::<BasisSystem>()?;
    Ok(())
}
