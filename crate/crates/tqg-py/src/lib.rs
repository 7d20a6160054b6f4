//! Python bindings for the tqg qutrit circuit library.
//!
//! Exposes the exact amplitude/matrix types, circuits, the simulator,
//! the transpiler, and the synthesizer as an extension module. Build
//! with `cargo build -p tqg-py --release`; the resulting
//! `libtqg_py.so` imports as the module `tqg_py` (see
//! `python/smoke_test.py`).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use tqg::circuit;
use tqg::gates;
use tqg::sim;
use tqg::synth;
use tqg::transpile;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_kind(name: &str) -> PyResult<gates::GateKind> {
    gates::GateKind::from_mnemonic(name)
        .ok_or_else(|| value_err(format!("unknown gate mnemonic `{name}`")))
}

fn parse_postulate(name: &str) -> PyResult<transpile::Postulate> {
    transpile::Postulate::parse(name).ok_or_else(|| {
        value_err(format!(
            "unknown postulate `{name}` (expected I, II or III)"
        ))
    })
}

/// One exact complex amplitude `(a + b·w + c·r3 + d·r3·w) / 3^k`.
#[pyclass(frozen, name = "Amplitude")]
#[derive(Clone)]
struct PyAmplitude(tqg::ExactAmplitude);

#[pymethods]
impl PyAmplitude {
    #[new]
    #[pyo3(signature = (a=0, b=0, c=0, d=0, k=0))]
    fn new(a: i128, b: i128, c: i128, d: i128, k: u32) -> Self {
        PyAmplitude(tqg::ExactAmplitude::new(a, b, c, d, k))
    }

    #[staticmethod]
    fn omega() -> Self {
        PyAmplitude(tqg::ExactAmplitude::omega())
    }

    #[staticmethod]
    fn inv_sqrt3() -> Self {
        PyAmplitude(tqg::ExactAmplitude::inv_sqrt3())
    }

    /// Canonical coefficients (a, b, c, d, k).
    fn coefficients(&self) -> (i128, i128, i128, i128, u32) {
        self.0.coefficients()
    }

    fn conj(&self) -> Self {
        PyAmplitude(self.0.conj())
    }

    /// Floating-point value as (re, im); display only.
    fn to_float(&self) -> (f64, f64) {
        self.0.to_float()
    }

    /// The value as (numerator, denominator) when it is rational.
    fn to_fraction(&self) -> Option<(i128, i128)> {
        self.0.to_rational().map(|r| (*r.numer(), *r.denom()))
    }

    fn __add__(&self, other: &Self) -> Self {
        PyAmplitude(self.0 + other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        PyAmplitude(self.0 * other.0)
    }

    fn __neg__(&self) -> Self {
        PyAmplitude(-self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Amplitude({})", self.0)
    }
}

/// A dense square matrix of exact amplitudes.
#[pyclass(frozen, name = "Matrix")]
#[derive(Clone)]
struct PyMatrix(tqg::Matrix);

#[pymethods]
impl PyMatrix {
    #[staticmethod]
    fn identity(dim: usize) -> Self {
        PyMatrix(tqg::Matrix::identity(dim))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn get(&self, row: usize, col: usize) -> PyResult<PyAmplitude> {
        if row >= self.0.dim() || col >= self.0.dim() {
            return Err(value_err("matrix index out of range"));
        }
        Ok(PyAmplitude(self.0.get(row, col)))
    }

    fn mul(&self, other: &Self) -> PyResult<Self> {
        if self.0.dim() != other.0.dim() {
            return Err(value_err("matrix dimension mismatch"));
        }
        Ok(PyMatrix(self.0.mul(&other.0)))
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        self.mul(other)
    }

    fn dagger(&self) -> Self {
        PyMatrix(self.0.dagger())
    }

    fn kron(&self, other: &Self) -> Self {
        PyMatrix(self.0.kron(&other.0))
    }

    fn is_unitary(&self) -> bool {
        self.0.is_unitary()
    }

    /// The scalar λ with `self = λ·other`, if the two are equal up to a
    /// unimodular phase.
    fn global_phase_equal(&self, other: &Self) -> Option<PyAmplitude> {
        self.0.global_phase_equal(&other.0).map(PyAmplitude)
    }

    /// Float mirror, row-major (re, im) pairs.
    fn to_float(&self) -> Vec<Vec<(f64, f64)>> {
        (0..self.0.dim())
            .map(|i| {
                (0..self.0.dim())
                    .map(|j| self.0.get(i, j).to_float())
                    .collect()
            })
            .collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_json()).expect("serializable")
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Matrix(dim={})", self.0.dim())
    }
}

/// An ordered qutrit circuit; list order is application order.
#[pyclass(name = "Circuit")]
#[derive(Clone)]
struct PyCircuit(circuit::Circuit);

#[pymethods]
impl PyCircuit {
    /// Parses the line-oriented circuit text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        circuit::Circuit::parse(text)
            .map(PyCircuit)
            .map_err(value_err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// The exact composed unitary.
    fn compose(&self) -> PyMatrix {
        PyMatrix(self.0.compose_unitary())
    }

    /// QC3 as (one_qutrit, two_qutrit, total).
    #[pyo3(signature = (ignore_identity=false))]
    fn qc3(&self, ignore_identity: bool) -> (usize, usize, usize) {
        let r = self.0.qc3_with(ignore_identity);
        (r.one_qutrit, r.two_qutrit, r.total)
    }

    fn invert(&self) -> Self {
        PyCircuit(self.0.invert())
    }

    fn cancel_inverses(&self) -> Self {
        PyCircuit(self.0.cancel_inverses())
    }

    fn concat(&self, other: &Self) -> PyResult<Self> {
        if self.0.width() != other.0.width() {
            return Err(value_err("circuit width mismatch"));
        }
        Ok(PyCircuit(self.0.clone().concat(&other.0)))
    }

    fn __str__(&self) -> String {
        self.0.format()
    }

    fn __repr__(&self) -> String {
        format!("Circuit(width={}, gates={})", self.0.width(), self.0.len())
    }
}

/// An exact register state of 3^m amplitudes.
#[pyclass(frozen, name = "StateVector")]
#[derive(Clone)]
struct PyStateVector(sim::StateVector);

#[pymethods]
impl PyStateVector {
    /// The basis state for a ternary digit string such as "20".
    #[staticmethod]
    fn basis(digits: &str) -> PyResult<Self> {
        sim::StateVector::basis(digits)
            .map(PyStateVector)
            .map_err(value_err)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    fn amplitudes(&self) -> Vec<PyAmplitude> {
        self.0
            .amplitudes()
            .iter()
            .copied()
            .map(PyAmplitude)
            .collect()
    }

    /// Exact probabilities as (numerator, denominator) fractions.
    fn probabilities(&self) -> PyResult<Vec<(i128, i128)>> {
        let probs = self.0.probabilities().map_err(value_err)?;
        Ok(probs.iter().map(|r| (*r.numer(), *r.denom())).collect())
    }

    /// One line per nonzero amplitude, sorted by basis index.
    fn dump(&self) -> Vec<String> {
        self.0.dump_lines()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("StateVector(width={})", self.0.width())
    }
}

/// All gate mnemonics with one-line descriptions.
#[pyfunction]
fn gate_names() -> Vec<(String, String)> {
    gates::ALL_KINDS
        .iter()
        .map(|k| (k.mnemonic().to_string(), k.description().to_string()))
        .collect()
}

/// The exact 3×3 matrix of a named gate.
#[pyfunction]
fn gate_matrix(name: &str) -> PyResult<PyMatrix> {
    Ok(PyMatrix(gates::gate_matrix(parse_kind(name)?)))
}

/// The 9×9 controlled gate activated on `value` (control is the
/// more-significant qutrit).
#[pyfunction]
#[pyo3(signature = (name, value=2))]
fn controlled_matrix(name: &str, value: u8) -> PyResult<PyMatrix> {
    if value > 2 {
        return Err(value_err("control value must be 0, 1 or 2"));
    }
    Ok(PyMatrix(gates::controlled_matrix(
        parse_kind(name)?,
        gates::ControlSpec { value },
    )))
}

/// Runs a circuit from a basis state; returns the final state and one
/// (stage_name, state) snapshot per stage marker.
#[pyfunction]
fn simulate(
    circuit: &PyCircuit,
    init: &str,
) -> PyResult<(PyStateVector, Vec<(String, PyStateVector)>)> {
    let init = sim::StateVector::basis(init).map_err(value_err)?;
    let result = sim::run(&circuit.0, &init).map_err(value_err)?;
    Ok((
        PyStateVector(result.final_state),
        result
            .snapshots
            .into_iter()
            .map(|(n, s)| (n, PyStateVector(s)))
            .collect(),
    ))
}

/// Compares two states ("exact" or "global_phase"); returns the scalar λ
/// with s1 = λ·s2 when they match.
#[pyfunction]
#[pyo3(signature = (s1, s2, mode="exact"))]
fn states_equal(
    s1: &PyStateVector,
    s2: &PyStateVector,
    mode: &str,
) -> PyResult<Option<PyAmplitude>> {
    let mode = match mode {
        "exact" => sim::CompareMode::Exact,
        "global_phase" => sim::CompareMode::GlobalPhase,
        other => return Err(value_err(format!("unknown compare mode `{other}`"))),
    };
    if s1.0.width() != s2.0.width() {
        return Err(value_err("state width mismatch"));
    }
    Ok(sim::states_equal(&s1.0, &s2.0, mode).map(PyAmplitude))
}

/// Lowers a gate to a postulate's native set ("I", "II" or "III").
#[pyfunction]
#[pyo3(signature = (gate, postulate, controlled=false, mode="faithful", control_value=2))]
fn decompose(
    gate: &str,
    postulate: &str,
    controlled: bool,
    mode: &str,
    control_value: u8,
) -> PyResult<PyCircuit> {
    let kind = parse_kind(gate)?;
    let postulate = parse_postulate(postulate)?;
    let mode = match mode {
        "faithful" => transpile::Mode::Faithful,
        "strict" => transpile::Mode::Strict,
        other => return Err(value_err(format!("unknown mode `{other}`"))),
    };
    let circuit = if controlled {
        transpile::decompose_controlled(kind, postulate, mode, control_value).map_err(value_err)?
    } else {
        transpile::decompose_gate(kind, postulate).map_err(value_err)?
    };
    Ok(PyCircuit(circuit))
}

/// Classifies a circuit against a target matrix. Returns the
/// classification label and a human-readable detail string.
#[pyfunction]
fn verify(circuit: &PyCircuit, target: &PyMatrix) -> PyResult<(String, String)> {
    let result = transpile::verify_decomposition(&circuit.0, &target.0).map_err(value_err)?;
    Ok((result.label().to_string(), result.to_string()))
}

/// QC3 of a CH reset technique ("four_gate" or "two_gate") under
/// postulate II, as (one_qutrit, two_qutrit, total).
#[pyfunction]
fn reset_cost(technique: &str) -> PyResult<(usize, usize, usize)> {
    let technique = match technique {
        "four_gate" => transpile::ResetTechnique::FourGate,
        "two_gate" => transpile::ResetTechnique::TwoGate,
        other => return Err(value_err(format!("unknown reset technique `{other}`"))),
    };
    let r = transpile::reset_cost(technique, transpile::Postulate::II).map_err(value_err)?;
    Ok((r.one_qutrit, r.two_qutrit, r.total))
}

/// The 9×9 ternary SWAP permutation.
#[pyfunction]
fn swap_target() -> PyMatrix {
    PyMatrix(synth::swap_target())
}

/// The 27×27 GF3 multiply-add permutation.
#[pyfunction]
fn gf3_target() -> PyMatrix {
    PyMatrix(synth::gf3_target())
}

/// The four SWAP stage unitaries, in application order.
#[pyfunction]
fn stage_maps() -> Vec<PyMatrix> {
    let maps = synth::stage_maps_from_table2();
    maps.in_order().into_iter().cloned().map(PyMatrix).collect()
}

/// The eleven-gate staged SWAP reference circuit.
#[pyfunction]
fn staged_swap_circuit() -> PyCircuit {
    PyCircuit(synth::staged_swap_circuit())
}

/// Searches for a GF3 realization; returns the circuit or None.
#[pyfunction]
#[pyo3(signature = (control_values=vec![1, 2], depth=10))]
fn synthesize_gf3(control_values: Vec<u8>, depth: usize) -> PyResult<Option<PyCircuit>> {
    let spec = synth::SynthesisSpec::gf3(&control_values, depth);
    match synth::synthesize(&spec).map_err(value_err)? {
        synth::SynthOutcome::Found { circuit, .. } => Ok(Some(PyCircuit(circuit))),
        synth::SynthOutcome::NotFoundAtDepth { .. } => Ok(None),
    }
}

/// Searches for the 3+6-gate SWAP realization; returns the circuit or
/// None. Takes around a minute.
#[pyfunction]
#[pyo3(signature = (workers=1))]
fn synthesize_swap(workers: usize) -> PyResult<Option<PyCircuit>> {
    let spec = synth::SynthesisSpec::swap();
    match synth::synthesize_with_workers(&spec, workers).map_err(value_err)? {
        synth::SynthOutcome::Found { circuit, .. } => Ok(Some(PyCircuit(circuit))),
        synth::SynthOutcome::NotFoundAtDepth { .. } => Ok(None),
    }
}

#[pymodule]
fn tqg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyAmplitude>()?;
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyStateVector>()?;
    m.add_function(wrap_pyfunction!(gate_names, m)?)?;
    m.add_function(wrap_pyfunction!(gate_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(controlled_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(states_equal, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(reset_cost, m)?)?;
    m.add_function(wrap_pyfunction!(swap_target, m)?)?;
    m.add_function(wrap_pyfunction!(gf3_target, m)?)?;
    m.add_function(wrap_pyfunction!(stage_maps, m)?)?;
    m.add_function(wrap_pyfunction!(staged_swap_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_gf3, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_swap, m)?)?;
    Ok(())
}
