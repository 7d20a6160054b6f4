//! Acceptance suite: one test per criterion, every assertion by exact
//! equality unless stated otherwise. Run with
//! `cargo test -p tqg --test acceptance -- --nocapture` to see the
//! per-criterion PASS lines.

use std::sync::OnceLock;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use tqg::amplitude::ExactAmplitude;
use tqg::circuit::{Circuit, GateApplication};
use tqg::gates::{controlled_matrix, embed_gate, gate_matrix, ControlSpec, GateKind, ALL_KINDS};
use tqg::matrix::Matrix;
use tqg::sim::{run, StateVector};
use tqg::synth::{
    aligned_swap_solution, gf3_classical, stage_alignment, stage_maps_from_table2,
    staged_swap_circuit, swap_target, synthesize, verify_connectivity, SynthOutcome, SynthesisSpec,
    GF3_MUL,
};
use tqg::transpile::{
    decompose_controlled, reset_circuit, verify_decomposition, Mode, Postulate, ResetTechnique,
    VerifyResult,
};

fn one() -> ExactAmplitude {
    ExactAmplitude::one()
}

fn w(n: i64) -> ExactAmplitude {
    ExactAmplitude::omega_pow(n)
}

fn zero() -> ExactAmplitude {
    ExactAmplitude::zero()
}

fn one_wire(kinds: &[GateKind]) -> Circuit {
    Circuit::with_apps(
        1,
        kinds
            .iter()
            .map(|&k| GateApplication::plain(k, 0))
            .collect(),
    )
}

/// The printed Chrestenson matrix.
fn ch_printed() -> Matrix {
    Matrix::from_rows3([
        [one(), one(), one()],
        [one(), w(1), w(2)],
        [one(), w(2), w(1)],
    ])
    .scale(ExactAmplitude::inv_sqrt3())
}

#[test]
fn criterion_01_ch_constructions() {
    let ch = ch_printed();
    for kinds in [
        vec![GateKind::Z3, GateKind::Tsg1, GateKind::Z3],
        vec![GateKind::Z3, GateKind::Tsg2, GateKind::Z3Dag],
        vec![GateKind::Tsg3, GateKind::Z3],
    ] {
        assert_eq!(one_wire(&kinds).compose_unitary(), ch, "{kinds:?}");
    }
    println!("ACCEPTANCE 1: PASS — all three native CH constructions compose exactly to CH");
}

#[test]
fn criterion_02_chdag_construction() {
    // the printed inverse-CH matrix
    let chdag = Matrix::from_rows3([
        [one(), one(), one()],
        [one(), w(2), w(1)],
        [one(), w(1), w(2)],
    ])
    .scale(ExactAmplitude::inv_sqrt3());
    let composed = one_wire(&[GateKind::Z3, GateKind::Tsg2Dag, GateKind::Z3Dag]).compose_unitary();
    assert_eq!(composed, chdag);
    assert_eq!(ch_printed().mul(&chdag), Matrix::identity(3));
    println!("ACCEPTANCE 2: PASS — the CH+ construction matches the printed matrix and inverts CH");
}

#[test]
fn criterion_03_order_laws() {
    let ch = gate_matrix(GateKind::Ch);
    let z3 = gate_matrix(GateKind::Z3);
    let z3dag = gate_matrix(GateKind::Z3Dag);
    let t2 = gate_matrix(GateKind::Tsg2);
    let id = Matrix::identity(3);
    assert_eq!(ch.mul(&ch).mul(&ch).mul(&ch), id);
    assert_eq!(z3.mul(&z3).mul(&z3), id);
    assert_eq!(z3.mul(&z3dag), id);
    assert_eq!(z3.mul(&z3), z3dag);
    assert_eq!(t2.mul(&t2).mul(&t2).mul(&t2), id);
    println!("ACCEPTANCE 3: PASS — CH^4 = Z3^3 = Z3·Z3+ = TSG2^4 = I and Z3^2 = Z3+");
}

#[test]
fn criterion_04_permutative_and_shift_identities() {
    let p01 = Matrix::permutation(&[1, 0, 2]);
    let p02 = Matrix::permutation(&[2, 1, 0]);
    let p12 = Matrix::permutation(&[0, 2, 1]);
    let plus1 = Matrix::permutation(&[1, 2, 0]);
    let plus2 = Matrix::permutation(&[2, 0, 1]);
    // the permutative constructions, including the two printed 01 forms
    assert_eq!(
        one_wire(&[GateKind::Ch, GateKind::Z3Dag, GateKind::Ch]).compose_unitary(),
        p01
    );
    assert_eq!(
        one_wire(&[GateKind::Ch, GateKind::Z3, GateKind::Z3, GateKind::Ch]).compose_unitary(),
        p01
    );
    assert_eq!(
        one_wire(&[GateKind::Ch, GateKind::Z3, GateKind::Ch]).compose_unitary(),
        p02
    );
    assert_eq!(
        one_wire(&[GateKind::Ch, GateKind::Ch]).compose_unitary(),
        p12
    );
    // all four factorizations of each shift gate
    for kinds in [
        [GateKind::P01, GateKind::P02],
        [GateKind::P12, GateKind::P01],
        [GateKind::P02, GateKind::P12],
        [GateKind::Plus2, GateKind::Plus2],
    ] {
        assert_eq!(one_wire(&kinds).compose_unitary(), plus1, "{kinds:?}");
    }
    for kinds in [
        [GateKind::P02, GateKind::P01],
        [GateKind::P01, GateKind::P12],
        [GateKind::P12, GateKind::P02],
        [GateKind::Plus1, GateKind::Plus1],
    ] {
        assert_eq!(one_wire(&kinds).compose_unitary(), plus2, "{kinds:?}");
    }
    // involutions and the shift inverse pair
    for m in [&p01, &p02, &p12] {
        assert_eq!(m.mul(m), Matrix::identity(3));
    }
    assert_eq!(plus1.mul(&plus2), Matrix::identity(3));
    println!("ACCEPTANCE 4: PASS — permutative and shift identities hold exactly");
}

#[test]
fn criterion_05_reset_costs() {
    let four = reset_circuit(ResetTechnique::FourGate, Postulate::II).unwrap();
    let two = reset_circuit(ResetTechnique::TwoGate, Postulate::II).unwrap();
    assert_eq!(four.qc3().total, 12);
    assert_eq!(two.qc3().total, 6);
    assert_eq!(four.compose_unitary(), Matrix::identity(3));
    assert_eq!(two.compose_unitary(), Matrix::identity(3));
    println!("ACCEPTANCE 5: PASS — reset expansions cost 12 and 6 gates and compose to I3");
}

#[test]
fn criterion_06_controlled_constructions() {
    let cases = [
        (GateKind::Ch, 3usize), // Z3 · CTSG2 · Z3+
        (GateKind::P12, 4),     // Z3 · CTSG2 · CTSG2 · Z3+
        (GateKind::Plus1, 8),   // the published eight-gate sequence
    ];
    for (kind, len) in cases {
        let c = decompose_controlled(kind, Postulate::II, Mode::Faithful, 2).unwrap();
        assert_eq!(c.len(), len, "{kind:?}");
        let target = controlled_matrix(kind, ControlSpec { value: 2 });
        assert_eq!(
            verify_decomposition(&c, &target).unwrap(),
            VerifyResult::Exact,
            "{kind:?}"
        );
        // identity on control digits 0 and 1, base action on digit 2
        let composed = c.compose_unitary();
        let base = gate_matrix(kind);
        for v in 0..3usize {
            for r in 0..3 {
                for col in 0..3 {
                    let want = if v == 2 {
                        base.get(r, col)
                    } else if r == col {
                        one()
                    } else {
                        zero()
                    };
                    assert_eq!(composed.get(3 * v + r, 3 * v + col), want);
                }
            }
        }
    }
    println!("ACCEPTANCE 6: PASS — CCH, C12 and C+1 constructions are exact controlled gates");
}

#[test]
fn criterion_07_branch_defects() {
    let z3 = gate_matrix(GateKind::Z3);
    let z3dag = gate_matrix(GateKind::Z3Dag);
    let id3 = Matrix::identity(3);

    let c01 = decompose_controlled(GateKind::P01, Postulate::II, Mode::Faithful, 2).unwrap();
    let t01 = controlled_matrix(GateKind::P01, ControlSpec { value: 2 });
    match verify_decomposition(&c01, &t01).unwrap() {
        VerifyResult::BranchDefect(r) => {
            assert_eq!(r[0].1, z3dag);
            assert_eq!(r[1].1, z3dag);
            assert_eq!(r[2].1, id3);
        }
        other => panic!("C01 should be BranchDefect, got {other:?}"),
    }
    let c02 = decompose_controlled(GateKind::P02, Postulate::II, Mode::Faithful, 2).unwrap();
    let t02 = controlled_matrix(GateKind::P02, ControlSpec { value: 2 });
    match verify_decomposition(&c02, &t02).unwrap() {
        VerifyResult::BranchDefect(r) => {
            assert_eq!(r[0].1, z3);
            assert_eq!(r[1].1, z3);
            assert_eq!(r[2].1, id3);
        }
        other => panic!("C02 should be BranchDefect, got {other:?}"),
    }
    // the concatenation C01 · C02 is exact for C+1
    let tplus1 = controlled_matrix(GateKind::Plus1, ControlSpec { value: 2 });
    assert_eq!(
        verify_decomposition(&c01.concat(&c02), &tplus1).unwrap(),
        VerifyResult::Exact
    );
    // the faithful CCH template: exact under II, defective under I and III
    let tch = controlled_matrix(GateKind::Ch, ControlSpec { value: 2 });
    let cch2 = decompose_controlled(GateKind::Ch, Postulate::II, Mode::Faithful, 2).unwrap();
    assert_eq!(
        verify_decomposition(&cch2, &tch).unwrap(),
        VerifyResult::Exact
    );
    for p in [Postulate::I, Postulate::III] {
        let c = decompose_controlled(GateKind::Ch, p, Mode::Faithful, 2).unwrap();
        match verify_decomposition(&c, &tch).unwrap() {
            VerifyResult::BranchDefect(r) => {
                // inactive branch residual is a non-identity diagonal
                let res = &r[0].1;
                assert_ne!(*res, id3, "postulate {p}");
                for i in 0..3 {
                    for j in 0..3 {
                        if i != j {
                            assert!(res.get(i, j).is_zero());
                        }
                    }
                }
            }
            other => panic!("faithful CCH under {p} should be BranchDefect, got {other:?}"),
        }
    }
    println!(
        "ACCEPTANCE 7: PASS — C01/C02 defects are Z3+/Z3, their product is exact, \
         and only postulate II cancels inactive branches"
    );
}

/// Stage cells of the published stage-by-stage table, retyped here
/// independently of the library's copy. Row order |q_b q_a⟩ = 00..22;
/// cells are (basis index, ω power); the entanglement column carries an
/// implicit 1/√3.
type Table2Row = ([(u8, u8); 3], (u8, u8), (u8, u8), (u8, u8));
const TABLE2_CELLS: [Table2Row; 9] = [
    ([(0, 0), (4, 0), (8, 0)], (0, 0), (0, 0), (0, 0)),
    ([(0, 0), (4, 1), (8, 2)], (3, 0), (3, 0), (3, 0)),
    ([(0, 0), (4, 2), (8, 1)], (6, 0), (6, 0), (6, 0)),
    ([(3, 0), (7, 0), (2, 0)], (2, 0), (1, 0), (1, 0)),
    ([(3, 0), (7, 1), (2, 2)], (5, 2), (4, 2), (4, 0)),
    ([(3, 0), (7, 2), (2, 1)], (8, 1), (7, 1), (7, 0)),
    ([(6, 0), (1, 0), (5, 0)], (1, 0), (2, 0), (2, 0)),
    ([(6, 0), (1, 1), (5, 2)], (4, 1), (5, 1), (5, 0)),
    ([(6, 0), (1, 2), (5, 1)], (7, 2), (8, 2), (8, 0)),
];

fn table2_state(cells: &[(u8, u8)], normalized: bool) -> StateVector {
    let mut amps = vec![zero(); 9];
    let norm = if normalized {
        ExactAmplitude::inv_sqrt3()
    } else {
        one()
    };
    for &(idx, pow) in cells {
        amps[idx as usize] = norm * w(pow as i64);
    }
    StateVector::from_amplitudes(2, amps)
}

/// The published SWAP Marquand chart, row-major.
const TABLE1_ROWS: [[u8; 9]; 9] = [
    [1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1],
];

fn swap_search_result() -> &'static Circuit {
    static RESULT: OnceLock<Circuit> = OnceLock::new();
    RESULT.get_or_init(
        || match synthesize(&SynthesisSpec::swap()).expect("valid spec") {
            SynthOutcome::Found { circuit, .. } => circuit,
            SynthOutcome::NotFoundAtDepth { .. } => {
                panic!("no SWAP circuit with 3 one-qutrit + 6 two-qutrit gates found")
            }
        },
    )
}

#[test]
fn criterion_08_swap_data() {
    let swap = swap_target();
    for (r, row) in TABLE1_ROWS.iter().enumerate() {
        for (c, &cell) in row.iter().enumerate() {
            let want = if cell == 1 { one() } else { zero() };
            assert_eq!(swap.get(r, c), want, "table cell ({r},{c})");
        }
    }
    // the four stage maps are unitary and compose to the chart
    let maps = stage_maps_from_table2();
    for m in maps.in_order() {
        assert!(m.is_unitary());
    }
    let [_, _, _, composed] = maps.cumulative();
    assert_eq!(composed, swap);
    // the staged gate circuit walks every cell of the stage table
    let staged = staged_swap_circuit();
    for (row, &(ent, unent, state, phase)) in TABLE2_CELLS.iter().enumerate() {
        let init = StateVector::from_amplitudes(2, {
            let mut a = vec![zero(); 9];
            a[row] = one();
            a
        });
        let result = run(&staged, &init).unwrap();
        assert_eq!(result.snapshots.len(), 4);
        assert_eq!(
            result.snapshots[0].1,
            table2_state(&ent, true),
            "row {row} ent"
        );
        assert_eq!(
            result.snapshots[1].1,
            table2_state(&[unent], false),
            "row {row} unent"
        );
        assert_eq!(
            result.snapshots[2].1,
            table2_state(&[state], false),
            "row {row} state"
        );
        assert_eq!(
            result.snapshots[3].1,
            table2_state(&[phase], false),
            "row {row} phase"
        );
    }
    // any found SWAP circuit sends each basis state to the final column
    let found = swap_search_result();
    for (row, &(_, _, _, phase)) in TABLE2_CELLS.iter().enumerate() {
        let init = StateVector::from_amplitudes(2, {
            let mut a = vec![zero(); 9];
            a[row] = one();
            a
        });
        let result = run(found, &init).unwrap();
        assert_eq!(
            result.final_state,
            table2_state(&[phase], false),
            "row {row} final"
        );
    }
    println!("ACCEPTANCE 8: PASS — chart, stage maps, and simulated stage states all agree");
}

#[test]
fn criterion_09_gf3_data() {
    let image = tqg::synth::gf3_target().as_permutation().unwrap();
    for a in 0..3usize {
        for b in 0..3usize {
            for c in 0..3usize {
                // independent oracle: mod-3 arithmetic
                let f = (a * b + c) % 3;
                assert_eq!(image[9 * a + 3 * b + c], 9 * a + 3 * b + f, "({a},{b},{c})");
            }
        }
    }
    assert_eq!(gf3_classical(0), GF3_MUL);
    assert_eq!(GF3_MUL, [[0, 0, 0], [0, 1, 2], [0, 2, 1]]);
    println!("ACCEPTANCE 9: PASS — all 27 multiply-add triples and the Toffoli case check out");
}

#[test]
fn criterion_10_swap_synthesis() {
    let started = Instant::now();
    let spec = SynthesisSpec::swap();
    let found = swap_search_result();
    let cost = found.qc3();
    assert_eq!((cost.one_qutrit, cost.two_qutrit, cost.total), (3, 6, 9));
    assert_eq!(found.compose_unitary(), swap_target());
    // alignment: either the found circuit aligns, or the per-stage search
    // certifies whether any solution of this size does
    match stage_alignment(found) {
        Some(bounds) => {
            println!("ACCEPTANCE 10: PASS — found 9-gate SWAP aligns at {bounds:?}");
        }
        None => match aligned_swap_solution(&spec) {
            Some(aligned) => {
                assert_eq!(aligned.compose_unitary(), swap_target());
                assert!(stage_alignment(&aligned).is_some());
                println!(
                    "ACCEPTANCE 10: PASS — found 9-gate SWAP; a different aligned solution exists"
                );
            }
            None => {
                println!(
                    "ACCEPTANCE 10: PASS — found exact 9-gate SWAP (3+6); certified that no \
                     solution of this size admits a 4-stage alignment"
                );
            }
        },
    }
    assert!(
        started.elapsed().as_secs() < 600,
        "search exceeded the stated budget"
    );
}

#[test]
fn criterion_11_gf3_synthesis() {
    let started = Instant::now();
    let spec = SynthesisSpec::gf3(&[1, 2], 10);
    match synthesize(&spec).unwrap() {
        SynthOutcome::Found { circuit, .. } => {
            assert!(circuit.len() <= 10);
            assert_eq!(circuit.compose_unitary(), tqg::synth::gf3_target());
            assert!(verify_connectivity(&circuit, &[(0, 2), (1, 2)]));
            assert_eq!(circuit.qc3().one_qutrit, 0);
            println!(
                "ACCEPTANCE 11: PASS — exact GF3 realization with {} two-qutrit gates (≤ 10)",
                circuit.len()
            );
        }
        SynthOutcome::NotFoundAtDepth { depth, .. } => {
            // would also be a pass if certified; with this pool a solution
            // exists, so reaching here is a failure
            panic!("GF3 search unexpectedly exhausted depth {depth}");
        }
    }
    // the restricted pool is certified unreachable rather than failing
    // silently
    match synthesize(&SynthesisSpec::gf3(&[2], 10)).unwrap() {
        SynthOutcome::NotFoundAtDepth { depth, stats } => {
            assert_eq!(depth, 10);
            assert!(stats.nodes > 0);
        }
        SynthOutcome::Found { .. } => panic!("value-2-only pool cannot realize GF3"),
    }
    assert!(
        started.elapsed().as_secs() < 1800,
        "search exceeded the stated budget"
    );
}

fn random_circuit(rng: &mut ChaCha8Rng, width: usize, max_len: usize) -> Circuit {
    let len = rng.random_range(0..=max_len);
    let mut apps = Vec::with_capacity(len);
    for _ in 0..len {
        let kind = ALL_KINDS[rng.random_range(0..ALL_KINDS.len())];
        let target = rng.random_range(0..width);
        if width >= 2 && rng.random_bool(0.4) {
            let mut control = rng.random_range(0..width);
            while control == target {
                control = rng.random_range(0..width);
            }
            apps.push(GateApplication::controlled(
                kind,
                control,
                target,
                rng.random_range(0..3),
            ));
        } else {
            apps.push(GateApplication::plain(kind, target));
        }
    }
    Circuit::with_apps(width, apps)
}

fn random_basis(rng: &mut ChaCha8Rng, width: usize) -> StateVector {
    let digits: String = (0..width)
        .map(|_| char::from(b'0' + rng.random_range(0..3u8)))
        .collect();
    StateVector::basis(&digits).unwrap()
}

/// Full-matrix oracle for the simulator: embed every gate and apply by
/// matrix-vector product.
fn apply_by_matrix(circuit: &Circuit, init: &StateVector) -> StateVector {
    let mut amps = init.amplitudes().to_vec();
    for app in circuit.apps() {
        let m = embed_gate(circuit.width(), app).unwrap();
        let mut next = vec![zero(); amps.len()];
        for (row, slot) in next.iter_mut().enumerate() {
            for (col, &a) in amps.iter().enumerate() {
                if !a.is_zero() {
                    *slot += m.get(row, col) * a;
                }
            }
        }
        amps = next;
    }
    StateVector::from_amplitudes(init.width(), amps)
}

#[test]
fn criterion_12_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7161_7472);
    for i in 0..200 {
        let width = rng.random_range(1..=3);
        let circuit = random_circuit(&mut rng, width, 15);
        let init = random_basis(&mut rng, width);
        let sliced = run(&circuit, &init).unwrap().final_state;
        let full = apply_by_matrix(&circuit, &init);
        assert_eq!(sliced, full, "circuit {i}");
        assert_eq!(sliced.norm_squared(), one(), "norm of circuit {i}");
    }
    for i in 0..500 {
        let width = rng.random_range(1..=3);
        let circuit = random_circuit(&mut rng, width, 20);
        let cancelled = circuit.cancel_inverses();
        assert_eq!(
            cancelled.compose_unitary(),
            circuit.compose_unitary(),
            "cancellation changed circuit {i}"
        );
        assert!(cancelled.len() <= circuit.len());
        assert_eq!(
            circuit.invert().invert(),
            circuit,
            "double inversion, circuit {i}"
        );
        assert_eq!(
            Circuit::parse(&circuit.format()).unwrap(),
            circuit,
            "format/parse round trip, circuit {i}"
        );
    }
    println!(
        "ACCEPTANCE 12: PASS — sliced simulation matches the matrix oracle on 200 circuits; \
         cancellation preserves 500 compositions"
    );
}

fn random_amp(rng: &mut ChaCha8Rng) -> ExactAmplitude {
    ExactAmplitude::new(
        rng.random_range(-9..=9),
        rng.random_range(-9..=9),
        rng.random_range(-9..=9),
        rng.random_range(-9..=9),
        rng.random_range(0..=4),
    )
}

#[test]
fn criterion_13_ring_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6f6d_6567);
    for _ in 0..10_000 {
        let (x, y, z) = (
            random_amp(&mut rng),
            random_amp(&mut rng),
            random_amp(&mut rng),
        );
        assert_eq!(x + y, y + x);
        assert_eq!(x * y, y * x);
        assert_eq!((x + y) + z, x + (y + z));
        assert_eq!((x * y) * z, x * (y * z));
        assert_eq!(x * (y + z), x * y + x * z);
        assert_eq!((x * y).conj(), x.conj() * y.conj());
        assert_eq!((x + y).conj(), x.conj() + y.conj());
    }
    for _ in 0..1000 {
        let (x, y) = (random_amp(&mut rng), random_amp(&mut rng));
        let (pr, pi) = (x * y).to_float();
        let ((xr, xi), (yr, yi)) = (x.to_float(), y.to_float());
        let (er, ei) = (xr * yr - xi * yi, xr * yi + xi * yr);
        assert!(
            (pr - er).abs() < 1e-12 && (pi - ei).abs() < 1e-12,
            "float mirror disagrees: {x} * {y}"
        );
    }
    println!(
        "ACCEPTANCE 13: PASS — ring laws on 10^4 random triples; conjugation is a homomorphism; \
         float mirror within 1e-12"
    );
}
