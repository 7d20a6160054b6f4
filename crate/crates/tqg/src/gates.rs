//! The ternary gate catalog: exact 3×3 unitaries for every named gate,
//! controlled (two-qutrit) embeddings activated on a configurable control
//! value, and embeddings into m-qutrit registers.
//!
//! Digit convention throughout the crate: qutrit 0 is the most-significant
//! base-3 digit of a basis index.

use crate::amplitude::ExactAmplitude;
use crate::circuit::GateApplication;
use crate::matrix::Matrix;

/// Identifier for a one-qutrit gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// Identity.
    I3,
    /// Chrestenson superposition gate (ternary Fourier).
    Ch,
    /// Inverse Chrestenson.
    ChDag,
    /// Phase gate diag(1, ω, ω²).
    Z3,
    /// Inverse phase gate diag(1, ω², ω).
    Z3Dag,
    /// Postulated native superposition gate I.
    Tsg1,
    Tsg1Dag,
    /// Postulated native superposition gate II.
    Tsg2,
    Tsg2Dag,
    /// Postulated native superposition gate III.
    Tsg3,
    Tsg3Dag,
    /// Permutative gate swapping |0⟩ and |1⟩.
    P01,
    /// Permutative gate swapping |0⟩ and |2⟩ (the ternary NOT).
    P02,
    /// Permutative gate swapping |1⟩ and |2⟩.
    P12,
    /// Cyclic shift |d⟩ → |d+1 mod 3⟩.
    Plus1,
    /// Cyclic shift |d⟩ → |d+2 mod 3⟩.
    Plus2,
}

pub const ALL_KINDS: [GateKind; 16] = [
    GateKind::I3,
    GateKind::Ch,
    GateKind::ChDag,
    GateKind::Z3,
    GateKind::Z3Dag,
    GateKind::Tsg1,
    GateKind::Tsg1Dag,
    GateKind::Tsg2,
    GateKind::Tsg2Dag,
    GateKind::Tsg3,
    GateKind::Tsg3Dag,
    GateKind::P01,
    GateKind::P02,
    GateKind::P12,
    GateKind::Plus1,
    GateKind::Plus2,
];

impl GateKind {
    /// Canonical mnemonic used by the circuit text format and the CLI.
    pub fn mnemonic(&self) -> &'static str {
        match self {
            GateKind::I3 => "I",
            GateKind::Ch => "CH",
            GateKind::ChDag => "CH+",
            GateKind::Z3 => "Z3",
            GateKind::Z3Dag => "Z3+",
            GateKind::Tsg1 => "TSG1",
            GateKind::Tsg1Dag => "TSG1+",
            GateKind::Tsg2 => "TSG2",
            GateKind::Tsg2Dag => "TSG2+",
            GateKind::Tsg3 => "TSG3",
            GateKind::Tsg3Dag => "TSG3+",
            GateKind::P01 => "01",
            GateKind::P02 => "02",
            GateKind::P12 => "12",
            GateKind::Plus1 => "+1",
            GateKind::Plus2 => "+2",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<GateKind> {
        ALL_KINDS.iter().copied().find(|k| k.mnemonic() == s)
    }

    /// One-line catalog description.
    pub fn description(&self) -> &'static str {
        match self {
            GateKind::I3 => "identity",
            GateKind::Ch => "Chrestenson superposition gate (ternary Fourier)",
            GateKind::ChDag => "inverse Chrestenson gate",
            GateKind::Z3 => "phase gate diag(1, w, w^2)",
            GateKind::Z3Dag => "inverse phase gate diag(1, w^2, w)",
            GateKind::Tsg1 => "native superposition gate of postulate I",
            GateKind::Tsg1Dag => "inverse of TSG1",
            GateKind::Tsg2 => "native superposition gate of postulate II",
            GateKind::Tsg2Dag => "inverse of TSG2",
            GateKind::Tsg3 => "native superposition gate of postulate III",
            GateKind::Tsg3Dag => "inverse of TSG3",
            GateKind::P01 => "permutative gate |0> <-> |1>",
            GateKind::P02 => "permutative gate |0> <-> |2> (ternary NOT)",
            GateKind::P12 => "permutative gate |1> <-> |2>",
            GateKind::Plus1 => "cyclic shift |d> -> |d+1 mod 3>",
            GateKind::Plus2 => "cyclic shift |d> -> |d+2 mod 3>",
        }
    }

    /// The kind whose matrix is the conjugate transpose of this one.
    pub fn dagger(&self) -> GateKind {
        match self {
            GateKind::I3 => GateKind::I3,
            GateKind::Ch => GateKind::ChDag,
            GateKind::ChDag => GateKind::Ch,
            GateKind::Z3 => GateKind::Z3Dag,
            GateKind::Z3Dag => GateKind::Z3,
            GateKind::Tsg1 => GateKind::Tsg1Dag,
            GateKind::Tsg1Dag => GateKind::Tsg1,
            GateKind::Tsg2 => GateKind::Tsg2Dag,
            GateKind::Tsg2Dag => GateKind::Tsg2,
            GateKind::Tsg3 => GateKind::Tsg3Dag,
            GateKind::Tsg3Dag => GateKind::Tsg3,
            GateKind::P01 => GateKind::P01,
            GateKind::P02 => GateKind::P02,
            GateKind::P12 => GateKind::P12,
            GateKind::Plus1 => GateKind::Plus2,
            GateKind::Plus2 => GateKind::Plus1,
        }
    }

    /// True for the diagonal phase kinds Z3 and Z3+, whose cubes are the
    /// identity.
    pub fn is_diagonal_phase(&self) -> bool {
        matches!(self, GateKind::Z3 | GateKind::Z3Dag)
    }
}

/// Control qutrit activation value for a controlled embedding; the base
/// gate acts on the target subspace where the control digit equals
/// `value`, identity elsewhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ControlSpec {
    pub value: u8,
}

impl Default for ControlSpec {
    fn default() -> Self {
        ControlSpec { value: 2 }
    }
}

fn w(n: i64) -> ExactAmplitude {
    ExactAmplitude::omega_pow(n)
}

fn one() -> ExactAmplitude {
    ExactAmplitude::one()
}

fn zero() -> ExactAmplitude {
    ExactAmplitude::zero()
}

/// The exact 3×3 unitary for a gate kind.
pub fn gate_matrix(kind: GateKind) -> Matrix {
    let s = ExactAmplitude::inv_sqrt3();
    match kind {
        GateKind::I3 => Matrix::identity(3),
        GateKind::Ch => Matrix::from_rows3([
            [one(), one(), one()],
            [one(), w(1), w(2)],
            [one(), w(2), w(1)],
        ])
        .scale(s),
        GateKind::ChDag => gate_matrix(GateKind::Ch).dagger(),
        GateKind::Z3 => Matrix::from_rows3([
            [one(), zero(), zero()],
            [zero(), w(1), zero()],
            [zero(), zero(), w(2)],
        ]),
        GateKind::Z3Dag => Matrix::from_rows3([
            [one(), zero(), zero()],
            [zero(), w(2), zero()],
            [zero(), zero(), w(1)],
        ]),
        GateKind::Tsg1 => {
            Matrix::from_rows3([[one(), w(2), w(1)], [w(2), w(2), w(2)], [w(1), w(2), one()]])
                .scale(s)
        }
        GateKind::Tsg1Dag => gate_matrix(GateKind::Tsg1).dagger(),
        GateKind::Tsg2 => {
            Matrix::from_rows3([[one(), w(2), w(1)], [w(1), w(1), w(1)], [w(2), one(), w(1)]])
                .scale(s)
        }
        GateKind::Tsg2Dag => {
            Matrix::from_rows3([[one(), w(2), w(1)], [w(1), w(2), one()], [w(2), w(2), w(2)]])
                .scale(s)
        }
        GateKind::Tsg3 => Matrix::from_rows3([
            [one(), one(), one()],
            [w(2), one(), w(1)],
            [w(1), one(), w(2)],
        ])
        .scale(s),
        GateKind::Tsg3Dag => gate_matrix(GateKind::Tsg3).dagger(),
        GateKind::P01 => Matrix::permutation(&[1, 0, 2]),
        GateKind::P02 => Matrix::permutation(&[2, 1, 0]),
        GateKind::P12 => Matrix::permutation(&[0, 2, 1]),
        GateKind::Plus1 => Matrix::permutation(&[1, 2, 0]),
        GateKind::Plus2 => Matrix::permutation(&[2, 0, 1]),
    }
}

/// The 9×9 controlled gate: block-diagonal over the control digit (the
/// more-significant digit), with the base gate on the block where the
/// control equals `ctrl.value` and identity on the other two.
pub fn controlled_matrix(kind: GateKind, ctrl: ControlSpec) -> Matrix {
    let base = gate_matrix(kind);
    let mut out = Matrix::identity(9);
    let v = ctrl.value as usize;
    for r in 0..3 {
        for c in 0..3 {
            out.set(3 * v + r, 3 * v + c, base.get(r, c));
        }
    }
    out
}

/// Errors from embedding a gate into a register.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EmbedError {
    #[error("qutrit index {index} out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("control qutrit equals target qutrit ({0})")]
    ControlEqualsTarget(usize),
    #[error("control value {0} is not a ternary digit")]
    BadControlValue(u8),
}

pub(crate) fn check_application(width: usize, app: &GateApplication) -> Result<(), EmbedError> {
    if app.target >= width {
        return Err(EmbedError::IndexOutOfRange {
            index: app.target,
            width,
        });
    }
    if let Some(ctrl) = &app.control {
        if ctrl.wire >= width {
            return Err(EmbedError::IndexOutOfRange {
                index: ctrl.wire,
                width,
            });
        }
        if ctrl.wire == app.target {
            return Err(EmbedError::ControlEqualsTarget(ctrl.wire));
        }
        if ctrl.value > 2 {
            return Err(EmbedError::BadControlValue(ctrl.value));
        }
    }
    Ok(())
}

/// The full-register unitary acting as `app` on its qutrit(s) and as the
/// identity elsewhere.
pub fn embed_gate(width: usize, app: &GateApplication) -> Result<Matrix, EmbedError> {
    check_application(width, app)?;
    let dim = 3usize.pow(width as u32);
    let base = gate_matrix(app.kind);
    let t_stride = 3usize.pow((width - 1 - app.target) as u32);
    let ctrl = app
        .control
        .as_ref()
        .map(|c| (3usize.pow((width - 1 - c.wire) as u32), c.value as usize));
    let mut out = Matrix::zero(dim);
    for col in 0..dim {
        if let Some((c_stride, v)) = ctrl {
            if (col / c_stride) % 3 != v {
                out.set(col, col, ExactAmplitude::one());
                continue;
            }
        }
        let t_digit = (col / t_stride) % 3;
        let base_col = col - t_digit * t_stride;
        for r in 0..3 {
            let e = base.get(r, t_digit);
            if !e.is_zero() {
                out.set(base_col + r * t_stride, col, e);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_matches_printed_matrices() {
        let s = ExactAmplitude::inv_sqrt3();
        let ch = gate_matrix(GateKind::Ch);
        assert_eq!(ch.get(0, 0), s);
        assert_eq!(ch.get(1, 1), s * w(1));
        assert_eq!(ch.get(2, 1), s * w(2));
        let p02 = gate_matrix(GateKind::P02);
        assert_eq!(p02, Matrix::permutation(&[2, 1, 0]));
        // SHIFT1 sends |0>->|1>, |1>->|2>, |2>->|0>
        let plus1 = gate_matrix(GateKind::Plus1);
        assert_eq!(plus1.as_permutation(), Some(vec![1, 2, 0]));
        assert_eq!(plus1.get(0, 2), ExactAmplitude::one());
    }

    #[test]
    fn every_kind_is_unitary() {
        for kind in ALL_KINDS {
            assert!(gate_matrix(kind).is_unitary(), "{kind:?} not unitary");
        }
    }

    #[test]
    fn dagger_kinds_match_matrix_dagger() {
        for kind in ALL_KINDS {
            assert_eq!(
                gate_matrix(kind.dagger()),
                gate_matrix(kind).dagger(),
                "{kind:?} dagger mismatch"
            );
        }
    }

    #[test]
    fn tsg2_dagger_matches_printed_matrix() {
        // the printed inverse equals the conjugate transpose entry-for-entry
        assert_eq!(
            gate_matrix(GateKind::Tsg2Dag),
            gate_matrix(GateKind::Tsg2).dagger()
        );
        let s = ExactAmplitude::inv_sqrt3();
        let t = gate_matrix(GateKind::Tsg2Dag);
        assert_eq!(t.get(0, 1), s * w(2));
        assert_eq!(t.get(1, 0), s * w(1));
        assert_eq!(t.get(2, 2), s * w(2));
    }

    #[test]
    fn permutatives_are_involutions() {
        for kind in [GateKind::P01, GateKind::P02, GateKind::P12] {
            let m = gate_matrix(kind);
            assert_eq!(m.mul(&m), Matrix::identity(3));
        }
    }

    #[test]
    fn shift_relations() {
        let p1 = gate_matrix(GateKind::Plus1);
        let p2 = gate_matrix(GateKind::Plus2);
        let id = Matrix::identity(3);
        assert_eq!(p1.mul(&p2), id);
        assert_eq!(p2.mul(&p1), id);
        assert_eq!(p1.mul(&p1), p2);
        assert_eq!(p2.mul(&p2), p1);
    }

    #[test]
    fn order_identities() {
        let ch = gate_matrix(GateKind::Ch);
        let z3 = gate_matrix(GateKind::Z3);
        let id = Matrix::identity(3);
        assert_eq!(ch.mul(&ch).mul(&ch).mul(&ch), id);
        assert_eq!(z3.mul(&z3).mul(&z3), id);
        assert_eq!(z3.mul(&gate_matrix(GateKind::Z3Dag)), id);
        // Z3 · Z3 = Z3+
        assert_eq!(z3.mul(&z3), gate_matrix(GateKind::Z3Dag));
        let t2 = gate_matrix(GateKind::Tsg2);
        assert_eq!(t2.mul(&t2).mul(&t2).mul(&t2), id);
        // CH · CH = the 12 permutation
        assert_eq!(ch.mul(&ch), gate_matrix(GateKind::P12));
    }

    #[test]
    fn z3_and_its_inverse_differ_beyond_phase() {
        let z3 = gate_matrix(GateKind::Z3);
        let z3dag = gate_matrix(GateKind::Z3Dag);
        assert_eq!(z3.global_phase_equal(&z3dag), None);
    }

    #[test]
    fn controlled_blocks() {
        for kind in ALL_KINDS {
            for v in 0..3u8 {
                let m = controlled_matrix(kind, ControlSpec { value: v });
                assert!(m.is_unitary());
                // inactive control digits act as identity
                for u in 0..3usize {
                    if u == v as usize {
                        continue;
                    }
                    for r in 0..3 {
                        for c in 0..3 {
                            let want = if r == c {
                                ExactAmplitude::one()
                            } else {
                                ExactAmplitude::zero()
                            };
                            assert_eq!(m.get(3 * u + r, 3 * u + c), want);
                        }
                    }
                }
            }
        }
        assert_eq!(
            controlled_matrix(GateKind::I3, ControlSpec { value: 0 }),
            Matrix::identity(9)
        );
    }

    #[test]
    fn controlled_action_on_basis_states() {
        // controlled(P12, v=2) on |2>|1> -> |2>|2>; on |0>|1> unchanged
        let m = controlled_matrix(GateKind::P12, ControlSpec::default());
        assert_eq!(m.get(8, 7), ExactAmplitude::one());
        assert_eq!(m.get(1, 1), ExactAmplitude::one());
        // controlled(SHIFT1, v=2) on |2>|2> -> |2>|0>
        let m = controlled_matrix(GateKind::Plus1, ControlSpec::default());
        assert_eq!(m.get(6, 8), ExactAmplitude::one());
    }

    #[test]
    fn embed_matches_kron() {
        let app = GateApplication::plain(GateKind::Ch, 1);
        let got = embed_gate(2, &app).unwrap();
        assert_eq!(got, Matrix::identity(3).kron(&gate_matrix(GateKind::Ch)));
        let app = GateApplication::plain(GateKind::Z3, 0);
        let got = embed_gate(2, &app).unwrap();
        assert_eq!(got, gate_matrix(GateKind::Z3).kron(&Matrix::identity(3)));
    }

    #[test]
    fn embed_controlled_most_significant_control() {
        let app = GateApplication::controlled(GateKind::Tsg2, 0, 1, 2);
        assert_eq!(
            embed_gate(2, &app).unwrap(),
            controlled_matrix(GateKind::Tsg2, ControlSpec::default())
        );
    }

    #[test]
    fn embed_controlled_reversed_wires() {
        // control on the less-significant digit: |x,2> rows transform
        let app = GateApplication::controlled(GateKind::Tsg2, 1, 0, 2);
        let m = embed_gate(2, &app).unwrap();
        let t2 = gate_matrix(GateKind::Tsg2);
        for col in 0..9 {
            let (hi, lo) = (col / 3, col % 3);
            for row in 0..9 {
                let (rhi, rlo) = (row / 3, row % 3);
                let want = if lo == 2 && rlo == 2 {
                    t2.get(rhi, hi)
                } else if row == col && lo != 2 {
                    ExactAmplitude::one()
                } else {
                    ExactAmplitude::zero()
                };
                assert_eq!(m.get(row, col), want);
            }
        }
    }

    #[test]
    fn embed_three_qutrits() {
        // controlled(SHIFT1, v=2), control=0, target=2 on |2,1,0> -> |2,1,1>
        let app = GateApplication::controlled(GateKind::Plus1, 0, 2, 2);
        let m = embed_gate(3, &app).unwrap();
        let col = 2 * 9 + 3; // |2,1,0>
        let row = 2 * 9 + 3 + 1; // |2,1,1>
        assert_eq!(m.get(row, col), ExactAmplitude::one());
        // brute force: every column is the expected basis action
        for a in 0..3usize {
            for b in 0..3usize {
                for c in 0..3usize {
                    let col = 9 * a + 3 * b + c;
                    let expect = if a == 2 {
                        9 * a + 3 * b + (c + 1) % 3
                    } else {
                        col
                    };
                    assert_eq!(m.get(expect, col), ExactAmplitude::one());
                }
            }
        }
    }

    #[test]
    fn embed_rejects_bad_indices() {
        let app = GateApplication::plain(GateKind::Ch, 2);
        assert_eq!(
            embed_gate(2, &app).unwrap_err(),
            EmbedError::IndexOutOfRange { index: 2, width: 2 }
        );
        let app = GateApplication::controlled(GateKind::Ch, 1, 1, 2);
        assert_eq!(
            embed_gate(2, &app).unwrap_err(),
            EmbedError::ControlEqualsTarget(1)
        );
    }

    #[test]
    fn kron_mixed_product_law() {
        // (A ⊗ B)(C ⊗ D) = (AC) ⊗ (BD)
        let a = gate_matrix(GateKind::Z3);
        let b = gate_matrix(GateKind::Ch);
        let c = gate_matrix(GateKind::Z3Dag);
        let d = gate_matrix(GateKind::Ch);
        assert_eq!(a.kron(&b).mul(&c.kron(&d)), a.mul(&c).kron(&b.mul(&d)));
    }
}
