//! Exact state-vector simulation of qutrit circuits, with stage snapshots
//! and state-comparison utilities.

use std::fmt;

use num_rational::Ratio;

use crate::amplitude::ExactAmplitude;
use crate::circuit::{Circuit, GateApplication};
use crate::gates::{self, EmbedError};
use crate::matrix::unimodular_scalars;

/// A register state: 3^m exact amplitudes, indexed by base-3 digit
/// strings with qutrit 0 as the most-significant digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateVector {
    width: usize,
    amps: Vec<ExactAmplitude>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SimError {
    #[error("bad ternary digit `{0}` (expected 0, 1 or 2)")]
    BadDigit(char),
    #[error("a basis state needs at least one ternary digit")]
    EmptyBasis,
    #[error("state width {state} does not match circuit width {circuit}")]
    WidthMismatch { state: usize, circuit: usize },
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("amplitude norm at index {index} is irrational (carries a √3 part)")]
    IrrationalProbability { index: usize },
}

/// Whether two states are compared entry-for-entry or up to one overall
/// unit scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareMode {
    Exact,
    GlobalPhase,
}

impl StateVector {
    /// The basis state named by a ternary digit string, e.g. `"21"` for
    /// q0 = 2, q1 = 1 (index 7 of 9).
    pub fn basis(digits: &str) -> Result<StateVector, SimError> {
        let mut index = 0usize;
        let mut width = 0usize;
        for ch in digits.chars() {
            let d = match ch {
                '0' => 0,
                '1' => 1,
                '2' => 2,
                other => return Err(SimError::BadDigit(other)),
            };
            index = index * 3 + d;
            width += 1;
        }
        if width == 0 {
            return Err(SimError::EmptyBasis);
        }
        let mut amps = vec![ExactAmplitude::zero(); 3usize.pow(width as u32)];
        amps[index] = ExactAmplitude::one();
        Ok(StateVector { width, amps })
    }

    pub fn from_amplitudes(width: usize, amps: Vec<ExactAmplitude>) -> StateVector {
        assert_eq!(amps.len(), 3usize.pow(width as u32));
        StateVector { width, amps }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[ExactAmplitude] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> ExactAmplitude {
        self.amps[index]
    }

    /// Σ|amp|², exact. Equals 1 for any state reached from a basis state
    /// through unitary gates.
    pub fn norm_squared(&self) -> ExactAmplitude {
        self.amps
            .iter()
            .fold(ExactAmplitude::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Applies one (possibly controlled) gate without materializing the
    /// 3^m matrix: the target digit is sliced in strides of 3.
    pub fn apply(&self, app: &GateApplication) -> Result<StateVector, SimError> {
        gates::check_application(self.width, app)?;
        let base = gates::gate_matrix(app.kind);
        let t_stride = 3usize.pow((self.width - 1 - app.target) as u32);
        let ctrl = app.control.as_ref().map(|c| {
            (
                3usize.pow((self.width - 1 - c.wire) as u32),
                c.value as usize,
            )
        });
        let mut out = self.amps.clone();
        for base_idx in 0..self.amps.len() {
            if !(base_idx / t_stride).is_multiple_of(3) {
                continue;
            }
            if let Some((c_stride, v)) = ctrl {
                if (base_idx / c_stride) % 3 != v {
                    continue;
                }
            }
            let idx = [base_idx, base_idx + t_stride, base_idx + 2 * t_stride];
            let col = [self.amps[idx[0]], self.amps[idx[1]], self.amps[idx[2]]];
            for r in 0..3 {
                let mut acc = ExactAmplitude::zero();
                for (c, &amp) in col.iter().enumerate() {
                    if !amp.is_zero() {
                        acc += base.get(r, c) * amp;
                    }
                }
                out[idx[r]] = acc;
            }
        }
        Ok(StateVector {
            width: self.width,
            amps: out,
        })
    }

    /// |amp|² per basis index as exact (real) ring elements.
    pub fn norms(&self) -> Vec<ExactAmplitude> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// |amp|² per basis index as exact rationals. Errs if some norm has a
    /// √3 part (possible for exotic states; never for the circuits here).
    pub fn probabilities(&self) -> Result<Vec<Ratio<i128>>, SimError> {
        self.norms()
            .iter()
            .enumerate()
            .map(|(index, n)| {
                n.to_rational()
                    .ok_or(SimError::IrrationalProbability { index })
            })
            .collect()
    }

    /// The digit string of a basis index under this width.
    pub fn digits_of(&self, index: usize) -> String {
        let mut s = String::with_capacity(self.width);
        for q in 0..self.width {
            let stride = 3usize.pow((self.width - 1 - q) as u32);
            s.push(char::from(b'0' + ((index / stride) % 3) as u8));
        }
        s
    }

    /// One line per nonzero amplitude: `|digits⟩: <exact> (<re>, <im>)`,
    /// sorted by basis index.
    pub fn dump_lines(&self) -> Vec<String> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| {
                let (re, im) = a.to_float();
                format!("|{}⟩: {} ({:.9}, {:.9})", self.digits_of(i), a, re, im)
            })
            .collect()
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines = self.dump_lines();
        if lines.is_empty() {
            return write!(f, "(zero state)");
        }
        write!(f, "{}", lines.join("\n"))
    }
}

/// Result of running a circuit: the final state plus one snapshot per
/// stage marker, in order. Each snapshot holds the state at the end of
/// its marker's segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub final_state: StateVector,
    pub snapshots: Vec<(String, StateVector)>,
}

/// Runs a circuit from an initial state.
pub fn run(circuit: &Circuit, init: &StateVector) -> Result<RunResult, SimError> {
    if init.width() != circuit.width() {
        return Err(SimError::WidthMismatch {
            state: init.width(),
            circuit: circuit.width(),
        });
    }
    let mut state = init.clone();
    let mut snapshots: Vec<(String, StateVector)> = Vec::new();
    let mut open: Option<String> = None;
    for app in circuit.apps() {
        if let Some(label) = &app.stage {
            if let Some(prev) = open.take() {
                snapshots.push((prev, state.clone()));
            }
            open = Some(label.clone());
        }
        state = state.apply(app)?;
    }
    if let Some(label) = open {
        snapshots.push((label, state.clone()));
    }
    Ok(RunResult {
        final_state: state,
        snapshots,
    })
}

/// Compares two states of the same width. Returns the scalar λ with
/// `s1 = λ·s2` when they match under the given mode (λ = 1 for exact).
pub fn states_equal(
    s1: &StateVector,
    s2: &StateVector,
    mode: CompareMode,
) -> Option<ExactAmplitude> {
    assert_eq!(s1.width(), s2.width(), "state width mismatch");
    match mode {
        CompareMode::Exact => (s1.amps == s2.amps).then(ExactAmplitude::one),
        CompareMode::GlobalPhase => {
            let pivot = s2.amps.iter().position(|a| !a.is_zero())?;
            for lambda in unimodular_scalars() {
                if s1.amps[pivot] == lambda * s2.amps[pivot] {
                    let all = s1.amps.iter().zip(&s2.amps).all(|(&x, &y)| x == lambda * y);
                    return if all { Some(lambda) } else { None };
                }
            }
            None
        }
    }
}
