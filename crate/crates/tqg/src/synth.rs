//! Multi-qutrit target unitaries built from the published data tables
//! (the SWAP permutation, the GF3 multiply-add circuit, and the four
//! SWAP stage maps), plus a meet-in-the-middle search that re-discovers
//! gate sequences realizing them under a given pool, cost constraint,
//! and connectivity.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::amplitude::ExactAmplitude;
use crate::circuit::{Circuit, GateApplication};
use crate::gates::{self, GateKind};
use crate::matrix::Matrix;

/// GF(3) multiplication table, `GF3_MUL[a][b] = a ·₃ b`.
pub const GF3_MUL: [[u8; 3]; 3] = [[0, 0, 0], [0, 1, 2], [0, 2, 1]];

/// GF(3) addition table, `GF3_ADD[a][b] = a +₃ b`.
pub const GF3_ADD: [[u8; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];

/// The 9×9 ternary SWAP permutation `|q_b q_a⟩ → |q_a q_b⟩`, with
/// qutrit 0 (= q_b) the more-significant digit.
pub fn swap_target() -> Matrix {
    let mut image = vec![0usize; 9];
    for x in 0..3 {
        for y in 0..3 {
            image[3 * x + y] = 3 * y + x;
        }
    }
    Matrix::permutation(&image)
}

/// The 27×27 GF3 multiply-add permutation `|a,b,c⟩ → |a,b,(a·₃b)+₃c⟩`
/// with wire order a = q0, b = q1, c = q2.
pub fn gf3_target() -> Matrix {
    let mut image = vec![0usize; 27];
    for a in 0..3usize {
        for b in 0..3usize {
            for c in 0..3usize {
                let f = GF3_ADD[GF3_MUL[a][b] as usize][c] as usize;
                image[9 * a + 3 * b + c] = 9 * a + 3 * b + f;
            }
        }
    }
    Matrix::permutation(&image)
}

/// The classical output table `f = (a ·₃ b) +₃ c` for a fixed input c,
/// indexed `[a][b]`. With `fixed_c = 0` this is the ternary Toffoli
/// function `f = a ·₃ b`.
pub fn gf3_classical(fixed_c: u8) -> [[u8; 3]; 3] {
    let mut out = [[0u8; 3]; 3];
    for a in 0..3usize {
        for b in 0..3usize {
            out[a][b] = GF3_ADD[GF3_MUL[a][b] as usize][fixed_c as usize];
        }
    }
    out
}

// Stage-by-stage SWAP data. Rows are the nine initial states |q_b q_a⟩ in
// index order; each cell lists (basis index, ω exponent). Entangled cells
// carry an implicit 1/√3 normalization.
const STAGE_ENTANGLEMENT: [[(u8, u8); 3]; 9] = [
    [(0, 0), (4, 0), (8, 0)],
    [(0, 0), (4, 1), (8, 2)],
    [(0, 0), (4, 2), (8, 1)],
    [(3, 0), (7, 0), (2, 0)],
    [(3, 0), (7, 1), (2, 2)],
    [(3, 0), (7, 2), (2, 1)],
    [(6, 0), (1, 0), (5, 0)],
    [(6, 0), (1, 1), (5, 2)],
    [(6, 0), (1, 2), (5, 1)],
];
#[rustfmt::skip]
const STAGE_UNENTANGLEMENT: [(u8, u8); 9] =
    [(0, 0), (3, 0), (6, 0), (2, 0), (5, 2), (8, 1), (1, 0), (4, 1), (7, 2)];
#[rustfmt::skip]
const STAGE_STATE_CORRECTION: [(u8, u8); 9] =
    [(0, 0), (3, 0), (6, 0), (1, 0), (4, 2), (7, 1), (2, 0), (5, 1), (8, 2)];
#[rustfmt::skip]
const STAGE_PHASE_CORRECTION: [(u8, u8); 9] =
    [(0, 0), (3, 0), (6, 0), (1, 0), (4, 0), (7, 0), (2, 0), (5, 0), (8, 0)];

/// The four SWAP stage unitaries reconstructed from the stage table.
/// Applied in order (entanglement first), they compose to [`swap_target`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageMaps {
    pub entanglement: Matrix,
    pub unentanglement: Matrix,
    pub state_correction: Matrix,
    pub phase_correction: Matrix,
}

impl StageMaps {
    /// The four maps in application order.
    pub fn in_order(&self) -> [&Matrix; 4] {
        [
            &self.entanglement,
            &self.unentanglement,
            &self.state_correction,
            &self.phase_correction,
        ]
    }

    /// Cumulative prefix maps: after stage 1, stages 1–2, 1–3, 1–4.
    pub fn cumulative(&self) -> [Matrix; 4] {
        let c1 = self.entanglement.clone();
        let c2 = self.unentanglement.mul(&c1);
        let c3 = self.state_correction.mul(&c2);
        let c4 = self.phase_correction.mul(&c3);
        [c1, c2, c3, c4]
    }
}

/// Column matrix of the per-row states in one stage column.
fn stage_column_matrix(singles: Option<&[(u8, u8); 9]>) -> Matrix {
    let mut m = Matrix::zero(9);
    match singles {
        Some(cells) => {
            for (col, &(row, pow)) in cells.iter().enumerate() {
                m.set(row as usize, col, ExactAmplitude::omega_pow(pow as i64));
            }
        }
        None => {
            let norm = ExactAmplitude::inv_sqrt3();
            for (col, kets) in STAGE_ENTANGLEMENT.iter().enumerate() {
                for &(row, pow) in kets {
                    m.set(
                        row as usize,
                        col,
                        norm * ExactAmplitude::omega_pow(pow as i64),
                    );
                }
            }
        }
    }
    m
}

/// Rebuilds the four stage unitaries from the stage table (normalization
/// restored on entangled states, fixed |q_b q_a⟩ digit order) and checks
/// their internal consistency: each is unitary and their ordered
/// composition equals the SWAP permutation. Panics if the embedded data
/// were transcribed inconsistently.
pub fn stage_maps_from_table2() -> StageMaps {
    let s1 = stage_column_matrix(None);
    let s2 = stage_column_matrix(Some(&STAGE_UNENTANGLEMENT));
    let s3 = stage_column_matrix(Some(&STAGE_STATE_CORRECTION));
    let s4 = stage_column_matrix(Some(&STAGE_PHASE_CORRECTION));
    for (i, s) in [&s1, &s2, &s3, &s4].iter().enumerate() {
        assert!(s.is_unitary(), "stage column {} is not unitary", i + 1);
    }
    let maps = StageMaps {
        entanglement: s1.clone(),
        unentanglement: s2.mul(&s1.dagger()),
        state_correction: s3.mul(&s2.dagger()),
        phase_correction: s4.mul(&s3.dagger()),
    };
    for m in maps.in_order() {
        assert!(m.is_unitary(), "stage map is not unitary");
    }
    let [_, _, _, c4] = maps.cumulative();
    assert_eq!(
        c4,
        swap_target(),
        "stage composition does not equal the SWAP permutation"
    );
    assert_eq!(
        s4,
        swap_target(),
        "final stage column does not equal the SWAP permutation"
    );
    maps
}

/// An eleven-gate SWAP circuit whose marked stages land exactly on the
/// four stage maps (boundaries after gates 3, 6, 7, 11). Wire 0 is q_b,
/// wire 1 is q_a.
pub fn staged_swap_circuit() -> Circuit {
    Circuit::parse(concat!(
        "qutrits 2\n",
        "--- stage entanglement\n",
        "CH q1\n",
        "C+1[v=1] q1 -> q0\n",
        "C+2[v=2] q1 -> q0\n",
        "--- stage un-entanglement\n",
        "C+2[v=1] q0 -> q1\n",
        "C+1[v=2] q0 -> q1\n",
        "CH+ q0\n",
        "--- stage state correction\n",
        "12 q1\n",
        "--- stage phase correction\n",
        "CH q0\n",
        "C+2[v=1] q1 -> q0\n",
        "C+1[v=2] q1 -> q0\n",
        "CH+ q0\n",
    ))
    .expect("built-in circuit parses")
}

/// A synthesis problem: find a pool word composing exactly to `target`.
#[derive(Clone)]
pub struct SynthesisSpec {
    pub target: Matrix,
    pub width: usize,
    /// Allowed gate placements, in canonical order. Word comparisons and
    /// the lexicographically-least guarantee refer to indices into this
    /// list.
    pub pool: Vec<GateApplication>,
    pub depth_budget: usize,
    /// Exact (one-qutrit, two-qutrit) slot counts, when constrained.
    pub counts: Option<(usize, usize)>,
    /// Allowed (control, target) wire pairs; `None` leaves routing free.
    pub edges: Option<Vec<(usize, usize)>>,
}

impl SynthesisSpec {
    /// The SWAP problem: one-qutrit {CH, CH+, 01, 02, 12} on either wire
    /// plus controlled {+1, +2} in both directions and all control
    /// values, constrained to exactly 3 one-qutrit + 6 two-qutrit gates.
    pub fn swap() -> SynthesisSpec {
        let mut pool = Vec::new();
        for kind in [
            GateKind::Ch,
            GateKind::ChDag,
            GateKind::P01,
            GateKind::P02,
            GateKind::P12,
        ] {
            for wire in 0..2 {
                pool.push(GateApplication::plain(kind, wire));
            }
        }
        for kind in [GateKind::Plus1, GateKind::Plus2] {
            for (c, t) in [(0, 1), (1, 0)] {
                for v in 0..3 {
                    pool.push(GateApplication::controlled(kind, c, t, v));
                }
            }
        }
        SynthesisSpec {
            target: swap_target(),
            width: 2,
            pool,
            depth_budget: 9,
            counts: Some((3, 6)),
            edges: None,
        }
    }

    /// The GF3 problem: controlled permutative and shift gates, controls
    /// a and b onto target c, activated on the given control values.
    pub fn gf3(control_values: &[u8], depth_budget: usize) -> SynthesisSpec {
        let mut pool = Vec::new();
        for kind in [
            GateKind::P01,
            GateKind::P02,
            GateKind::P12,
            GateKind::Plus1,
            GateKind::Plus2,
        ] {
            for ctrl in 0..2 {
                for &v in control_values {
                    pool.push(GateApplication::controlled(kind, ctrl, 2, v));
                }
            }
        }
        SynthesisSpec {
            target: gf3_target(),
            width: 3,
            pool,
            depth_budget,
            counts: None,
            edges: Some(vec![(0, 2), (1, 2)]),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("pool is empty")]
    EmptyPool,
    #[error("depth budget {0} exceeds the supported maximum of 12")]
    DepthBudgetTooLarge(usize),
    #[error("pool template {index} violates the connectivity edges")]
    PoolViolatesConnectivity { index: usize },
    #[error("target dimension {target} does not match register dimension {register}")]
    TargetDimMismatch { target: usize, register: usize },
}

/// Search effort counters.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchStats {
    /// Enumeration tree nodes visited across both halves and all depths.
    pub nodes: u64,
    /// Peak number of entries held in the half-depth lookup tables.
    pub table_entries: usize,
    pub wall: Duration,
}

#[derive(Clone, Debug)]
pub enum SynthOutcome {
    Found {
        circuit: Circuit,
        stats: SearchStats,
    },
    NotFoundAtDepth {
        depth: usize,
        stats: SearchStats,
    },
}

/// True iff every controlled application uses an allowed (control,
/// target) pair. One-qutrit gates pass any edge set.
pub fn verify_connectivity(circuit: &Circuit, edges: &[(usize, usize)]) -> bool {
    circuit.apps().iter().all(|app| match &app.control {
        None => true,
        Some(c) => edges.contains(&(c.wire, app.target)),
    })
}

pub fn synthesize(spec: &SynthesisSpec) -> Result<SynthOutcome, SynthError> {
    synthesize_with_workers(spec, 1)
}

/// Meet-in-the-middle synthesis. The enumeration may be partitioned
/// across `workers` threads; the result is a deterministic fold
/// (lexicographic minimum over pool-index words), independent of worker
/// count and scheduling.
pub fn synthesize_with_workers(
    spec: &SynthesisSpec,
    workers: usize,
) -> Result<SynthOutcome, SynthError> {
    if spec.pool.is_empty() {
        return Err(SynthError::EmptyPool);
    }
    if spec.depth_budget > 12 {
        return Err(SynthError::DepthBudgetTooLarge(spec.depth_budget));
    }
    let dim = 3usize.pow(spec.width as u32);
    if spec.target.dim() != dim {
        return Err(SynthError::TargetDimMismatch {
            target: spec.target.dim(),
            register: dim,
        });
    }
    if let Some(edges) = &spec.edges {
        for (index, app) in spec.pool.iter().enumerate() {
            if let Some(c) = &app.control {
                if !edges.contains(&(c.wire, app.target)) {
                    return Err(SynthError::PoolViolatesConnectivity { index });
                }
            }
        }
    }

    let start = Instant::now();
    let templates: Vec<Template> = spec
        .pool
        .iter()
        .map(|app| {
            let mat = gates::embed_gate(spec.width, app).expect("pool template wires in range");
            Template {
                one_qutrit: app.control.is_none(),
                mat,
            }
        })
        .collect();

    let perm_pool: Option<Vec<Vec<u8>>> = templates
        .iter()
        .map(|t| {
            t.mat
                .as_permutation()
                .map(|v| v.iter().map(|&x| x as u8).collect())
        })
        .collect();
    let perm_target: Option<Vec<u8>> = spec
        .target
        .as_permutation()
        .map(|v| v.iter().map(|&x| x as u8).collect());

    let mut outcome = match (spec.counts, perm_pool, perm_target) {
        (None, Some(pool), Some(target)) => permutation_mitm(spec, &pool, &target),
        _ => unitary_mitm(spec, &templates, workers),
    };

    match &mut outcome {
        SynthOutcome::Found { circuit, stats } => {
            stats.wall = start.elapsed();
            debug_assert_eq!(circuit.compose_unitary(), spec.target);
        }
        SynthOutcome::NotFoundAtDepth { stats, .. } => stats.wall = start.elapsed(),
    }
    Ok(outcome)
}

struct Template {
    one_qutrit: bool,
    mat: Matrix,
}

fn word_to_circuit(spec: &SynthesisSpec, word: &[u8]) -> Circuit {
    Circuit::with_apps(
        spec.width,
        word.iter()
            .map(|&i| spec.pool[i as usize].clone())
            .collect(),
    )
}

// --- permutation-pool search -------------------------------------------

/// Composition `apply g after f` on image vectors.
fn perm_compose(g: &[u8], f: &[u8]) -> Vec<u8> {
    f.iter().map(|&x| g[x as usize]).collect()
}

fn perm_inverse(p: &[u8]) -> Vec<u8> {
    let mut inv = vec![0u8; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as u8;
    }
    inv
}

/// MITM over permutation words with exact image-vector keys. Levels are
/// deduplicated per depth, keeping the lexicographically least word for
/// each reachable permutation; words are enumerated in lex order, so
/// first-wins is lex-min.
fn permutation_mitm(spec: &SynthesisSpec, pool: &[Vec<u8>], target: &[u8]) -> SynthOutcome {
    let dim = target.len();
    let identity: Vec<u8> = (0..dim as u8).collect();
    let mut stats = SearchStats::default();

    // levels[d]: lex-ordered (word, perm) pairs of length d, one per perm
    let mut levels: Vec<Vec<(Vec<u8>, Vec<u8>)>> = vec![vec![(Vec::new(), identity.clone())]];
    let mut level_index: Vec<HashMap<Vec<u8>, usize>> =
        vec![HashMap::from([(identity.clone(), 0usize)])];
    fn grow_to(
        pool: &[Vec<u8>],
        levels: &mut Vec<Vec<(Vec<u8>, Vec<u8>)>>,
        level_index: &mut Vec<HashMap<Vec<u8>, usize>>,
        depth: usize,
        stats: &mut SearchStats,
    ) {
        while levels.len() <= depth {
            let prev = &levels[levels.len() - 1];
            let mut next: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
            let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
            for (word, perm) in prev {
                for (gi, gperm) in pool.iter().enumerate() {
                    stats.nodes += 1;
                    let np = perm_compose(gperm, perm);
                    if !seen.contains_key(&np) {
                        let mut nw = word.clone();
                        nw.push(gi as u8);
                        seen.insert(np.clone(), next.len());
                        next.push((nw, np));
                    }
                }
            }
            stats.table_entries = stats.table_entries.max(next.len());
            levels.push(next);
            level_index.push(seen);
        }
    }

    for total in 0..=spec.depth_budget {
        let dl = total / 2;
        let dr = total - dl;
        grow_to(pool, &mut levels, &mut level_index, dr.max(dl), &mut stats);
        let mut best: Option<Vec<u8>> = None;
        for (rword, rperm) in &levels[dr] {
            // full = R ∘ L = target  ⟹  L = R⁻¹ ∘ target
            let need = perm_compose(&perm_inverse(rperm), target);
            if let Some(&li) = level_index[dl].get(&need) {
                let (lword, _) = &levels[dl][li];
                let mut cand = lword.clone();
                cand.extend_from_slice(rword);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        if let Some(word) = best {
            let circuit = word_to_circuit(spec, &word);
            debug_assert_eq!(circuit.compose_unitary(), spec.target);
            return SynthOutcome::Found { circuit, stats };
        }
    }
    SynthOutcome::NotFoundAtDepth {
        depth: spec.depth_budget,
        stats,
    }
}

// --- unitary-fingerprint search ------------------------------------—---

type LeftKey = (u128, u8);

/// DFS over length-`depth` pool words in lex order, recording the first
/// (hence lex-min) word per (matrix fingerprint, one-qutrit count) key.
/// DFS over length-`depth` pool words in lexicographic order with a
/// running composed matrix. One-qutrit/two-qutrit slot caps prune the
/// walk when present.
struct HalfWalk<'a> {
    templates: &'a [Template],
    depth: usize,
    counts: Option<(usize, usize)>,
    word: Vec<u8>,
    mats: Vec<Matrix>,
    nodes: u64,
}

impl<'a> HalfWalk<'a> {
    fn new(
        templates: &'a [Template],
        dim: usize,
        depth: usize,
        counts: Option<(usize, usize)>,
    ) -> Self {
        HalfWalk {
            templates,
            depth,
            counts,
            word: Vec::with_capacity(depth),
            mats: vec![Matrix::identity(dim)],
            nodes: 0,
        }
    }

    /// Visits every word, optionally restricting the first gate choice,
    /// passing each leaf's word, composed matrix, and one-qutrit count.
    fn walk(
        &mut self,
        first_gates: Option<&[usize]>,
        leaf: &mut impl FnMut(&[u8], &Matrix, usize),
    ) {
        self.step(first_gates, 0, leaf);
    }

    fn step(
        &mut self,
        restrict_first: Option<&[usize]>,
        ones: usize,
        leaf: &mut impl FnMut(&[u8], &Matrix, usize),
    ) {
        if self.word.len() == self.depth {
            leaf(&self.word, self.mats.last().unwrap(), ones);
            return;
        }
        let twos = self.word.len() - ones;
        for gi in 0..self.templates.len() {
            if let Some(first) = restrict_first {
                if !first.contains(&gi) {
                    continue;
                }
            }
            let one_qutrit = self.templates[gi].one_qutrit;
            if let Some((max_ones, max_twos)) = self.counts {
                if (one_qutrit && ones == max_ones) || (!one_qutrit && twos == max_twos) {
                    continue;
                }
            }
            self.nodes += 1;
            self.word.push(gi as u8);
            self.mats
                .push(self.templates[gi].mat.mul(self.mats.last().unwrap()));
            self.step(None, ones + usize::from(one_qutrit), leaf);
            self.mats.pop();
            self.word.pop();
        }
    }
}

/// First halves: the lex-min word per (matrix fingerprint, one-qutrit
/// count) key. Lex order of the walk makes first-wins the minimum.
fn build_left_table(
    templates: &[Template],
    dim: usize,
    depth: usize,
    counts: Option<(usize, usize)>,
    nodes: &mut u64,
) -> HashMap<LeftKey, Vec<u8>> {
    let mut table: HashMap<LeftKey, Vec<u8>> = HashMap::new();
    let mut walk = HalfWalk::new(templates, dim, depth, counts);
    walk.walk(None, &mut |word, mat, ones| {
        table
            .entry((mat.fingerprint128(), ones as u8))
            .or_insert_with(|| word.to_vec());
    });
    *nodes += walk.nodes;
    table
}

/// Second halves, restricted to a subtree of first-gate choices:
/// collects every candidate full word whose required left half exists in
/// the table.
#[allow(clippy::too_many_arguments)]
fn right_matches(
    templates: &[Template],
    target: &Matrix,
    table: &HashMap<LeftKey, Vec<u8>>,
    depth: usize,
    counts: Option<(usize, usize)>,
    left_depth: usize,
    first_gates: &[usize],
    nodes: &mut u64,
) -> Vec<Vec<u8>> {
    let mut found: Vec<Vec<u8>> = Vec::new();
    let mut walk = HalfWalk::new(templates, target.dim(), depth, counts);
    walk.walk(Some(first_gates), &mut |word, mat, ones| {
        // full = R·L = target ⟹ L = R†·target
        let need = mat.dagger().mul(target);
        let fp = need.fingerprint128();
        let mut try_left = |left_ones: usize| {
            if let Some(lword) = table.get(&(fp, left_ones as u8)) {
                let mut full = lword.clone();
                full.extend_from_slice(word);
                found.push(full);
            }
        };
        match counts {
            Some((max_ones, _)) => {
                let left_ones = max_ones - ones;
                if left_ones <= left_depth {
                    try_left(left_ones);
                }
            }
            None => (0..=left_depth).for_each(try_left),
        }
    });
    *nodes += walk.nodes;
    found
}

fn unitary_mitm_at_depth(
    spec: &SynthesisSpec,
    templates: &[Template],
    total: usize,
    workers: usize,
    stats: &mut SearchStats,
) -> Option<Vec<u8>> {
    let dim = spec.target.dim();
    let dl = total / 2;
    let dr = total - dl;
    let mut nodes = 0u64;
    let table = build_left_table(templates, dim, dl, spec.counts, &mut nodes);
    stats.table_entries = stats.table_entries.max(table.len());

    let workers = workers.max(1).min(templates.len().max(1));
    let mut candidates: Vec<Vec<u8>> = Vec::new();
    if dr == 0 {
        candidates = right_matches(
            templates,
            &spec.target,
            &table,
            0,
            spec.counts,
            dl,
            &[],
            &mut nodes,
        );
    } else if workers <= 1 {
        let all: Vec<usize> = (0..templates.len()).collect();
        candidates = right_matches(
            templates,
            &spec.target,
            &table,
            dr,
            spec.counts,
            dl,
            &all,
            &mut nodes,
        );
    } else {
        let assignments: Vec<Vec<usize>> = (0..workers)
            .map(|w| (0..templates.len()).filter(|g| g % workers == w).collect())
            .collect();
        let results: Vec<(Vec<Vec<u8>>, u64)> = std::thread::scope(|scope| {
            let handles: Vec<_> = assignments
                .iter()
                .map(|first| {
                    scope.spawn(|| {
                        let mut local_nodes = 0u64;
                        let cands = right_matches(
                            templates,
                            &spec.target,
                            &table,
                            dr,
                            spec.counts,
                            dl,
                            first,
                            &mut local_nodes,
                        );
                        (cands, local_nodes)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect()
        });
        for (cands, n) in results {
            candidates.extend(cands);
            nodes += n;
        }
    }
    stats.nodes += nodes;

    // fingerprint matches are candidates only; accept by exact equality.
    // A failure here means two distinct exact matrices collided in the
    // 128-bit fingerprint, which would invalidate the table's dedup.
    for word in &candidates {
        assert_eq!(
            word_to_circuit(spec, word).compose_unitary(),
            spec.target,
            "matrix fingerprint collision detected"
        );
    }
    candidates.into_iter().min()
}

fn unitary_mitm(spec: &SynthesisSpec, templates: &[Template], workers: usize) -> SynthOutcome {
    let mut stats = SearchStats::default();
    match spec.counts {
        Some((ones, twos)) => {
            let total = ones + twos;
            match unitary_mitm_at_depth(spec, templates, total, workers, &mut stats) {
                Some(word) => SynthOutcome::Found {
                    circuit: word_to_circuit(spec, &word),
                    stats,
                },
                None => SynthOutcome::NotFoundAtDepth {
                    depth: total,
                    stats,
                },
            }
        }
        None => {
            for total in 0..=spec.depth_budget {
                if let Some(word) =
                    unitary_mitm_at_depth(spec, templates, total, workers, &mut stats)
                {
                    return SynthOutcome::Found {
                        circuit: word_to_circuit(spec, &word),
                        stats,
                    };
                }
            }
            SynthOutcome::NotFoundAtDepth {
                depth: spec.depth_budget,
                stats,
            }
        }
    }
}

// --- stage alignment ------------------------------------------------—--

/// Prefix boundaries (gate counts) at which a circuit's composition
/// passes through the four cumulative stage maps, ending at the SWAP
/// permutation. `None` if the circuit admits no such 4-stage alignment.
pub fn stage_alignment(circuit: &Circuit) -> Option<[usize; 4]> {
    let cumulative = stage_maps_from_table2().cumulative();
    let dim = 3usize.pow(circuit.width() as u32);
    if dim != 9 {
        return None;
    }
    let mut boundaries = [0usize; 4];
    let mut next = 0usize;
    let mut prefix = Matrix::identity(dim);
    for (i, app) in circuit.apps().iter().enumerate() {
        let g = gates::embed_gate(circuit.width(), app).expect("circuit wires in range");
        prefix = g.mul(&prefix);
        while next < 4 && prefix == cumulative[next] {
            boundaries[next] = i + 1;
            next += 1;
        }
    }
    (next == 4 && boundaries[3] == circuit.len()).then_some(boundaries)
}

/// Searches for a SWAP solution of exactly `counts` gates that is built
/// from four consecutive pool segments realizing the four stage maps.
/// Returns an aligned circuit (with stage markers) if one exists; `None`
/// is a certificate that no solution of this size aligns, because any
/// aligned solution would yield per-stage pool words of these lengths.
pub fn aligned_swap_solution(spec: &SynthesisSpec) -> Option<Circuit> {
    let (max_ones, max_twos) = spec.counts?;
    let total = max_ones + max_twos;
    let maps = stage_maps_from_table2();
    let stage_names = [
        "entanglement",
        "un-entanglement",
        "state correction",
        "phase correction",
    ];
    let templates: Vec<Template> = spec
        .pool
        .iter()
        .map(|app| Template {
            one_qutrit: app.control.is_none(),
            mat: gates::embed_gate(spec.width, app).expect("pool template wires in range"),
        })
        .collect();

    // realizations[s]: (depth, ones) -> lex-min word for stage map s
    let mut realizations: Vec<HashMap<(usize, usize), Vec<u8>>> = Vec::new();
    for target in maps.in_order() {
        let mut table: HashMap<(usize, usize), Vec<u8>> = HashMap::new();
        // every other stage needs at least one gate
        for depth in 0..=total.saturating_sub(3) {
            let sub = SynthesisSpec {
                target: target.clone(),
                width: spec.width,
                pool: spec.pool.clone(),
                depth_budget: depth,
                counts: None,
                edges: spec.edges.clone(),
            };
            let mut stats = SearchStats::default();
            for ones in 0..=depth.min(max_ones) {
                let counted = SynthesisSpec {
                    counts: Some((ones, depth - ones)),
                    ..sub.clone()
                };
                if let Some(word) =
                    unitary_mitm_at_depth(&counted, &templates, depth, 1, &mut stats)
                {
                    table.insert((depth, ones), word);
                }
            }
        }
        realizations.push(table);
    }

    // pick per-stage (depth, ones) summing to the exact slot counts,
    // preferring the lexicographically least concatenation
    let keys: Vec<Vec<(usize, usize)>> = realizations
        .iter()
        .map(|t| {
            let mut ks: Vec<_> = t.keys().copied().collect();
            ks.sort_unstable();
            ks
        })
        .collect();
    type StageCombo = [(usize, usize); 4];
    let mut best: Option<(Vec<u8>, StageCombo)> = None;
    for &(d1, o1) in &keys[0] {
        for &(d2, o2) in &keys[1] {
            for &(d3, o3) in &keys[2] {
                for &(d4, o4) in &keys[3] {
                    if d1 + d2 + d3 + d4 != total || o1 + o2 + o3 + o4 != max_ones {
                        continue;
                    }
                    let mut word = realizations[0][&(d1, o1)].clone();
                    word.extend(&realizations[1][&(d2, o2)]);
                    word.extend(&realizations[2][&(d3, o3)]);
                    word.extend(&realizations[3][&(d4, o4)]);
                    if best.as_ref().is_none_or(|(b, _)| word < *b) {
                        best = Some((word, [(d1, o1), (d2, o2), (d3, o3), (d4, o4)]));
                    }
                }
            }
        }
    }
    let (word, combo) = best?;

    // reconstruct with stage markers at the segment boundaries
    let mut circuit = Circuit::new(spec.width);
    let mut offset = 0usize;
    for (s, &(depth, _)) in combo.iter().enumerate() {
        for (j, &gi) in word[offset..offset + depth].iter().enumerate() {
            let mut app = spec.pool[gi as usize].clone();
            if j == 0 {
                app.stage = Some(stage_names[s].to_string());
            }
            circuit.push(app);
        }
        offset += depth;
    }
    debug_assert_eq!(circuit.compose_unitary(), spec.target);
    debug_assert!(stage_alignment(&circuit).is_some());
    Some(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run, StateVector};

    /// Plain enumeration in lex order with increasing depth: the first
    /// solution found is the lexicographically least at minimal depth.
    /// Independent of the MITM machinery.
    fn brute_force(spec: &SynthesisSpec) -> Option<Circuit> {
        let templates: Vec<Matrix> = spec
            .pool
            .iter()
            .map(|app| gates::embed_gate(spec.width, app).unwrap())
            .collect();
        fn rec(
            spec: &SynthesisSpec,
            templates: &[Matrix],
            depth: usize,
            ones: usize,
            word: &mut Vec<u8>,
            acc: &Matrix,
        ) -> Option<Vec<u8>> {
            if word.len() == depth {
                if let Some((max_ones, _)) = spec.counts {
                    if ones != max_ones {
                        return None;
                    }
                }
                return (*acc == spec.target).then(|| word.clone());
            }
            for (gi, t) in templates.iter().enumerate() {
                let one = spec.pool[gi].control.is_none();
                if let Some((max_ones, max_twos)) = spec.counts {
                    let twos = word.len() - ones;
                    if (one && ones == max_ones) || (!one && twos == max_twos) {
                        continue;
                    }
                }
                word.push(gi as u8);
                let next = t.mul(acc);
                if let Some(w) = rec(spec, templates, depth, ones + usize::from(one), word, &next) {
                    return Some(w);
                }
                word.pop();
            }
            None
        }
        let dim = 3usize.pow(spec.width as u32);
        for depth in 0..=spec.depth_budget {
            if let Some(word) = rec(
                spec,
                &templates,
                depth,
                0,
                &mut Vec::new(),
                &Matrix::identity(dim),
            ) {
                return Some(word_to_circuit(spec, &word));
            }
        }
        None
    }

    #[test]
    fn swap_target_is_the_digit_swap() {
        let s = swap_target();
        // column |01⟩ maps to row |10⟩, |00⟩ stays put
        assert_eq!(s.get(3, 1), ExactAmplitude::one());
        assert_eq!(s.get(0, 0), ExactAmplitude::one());
        for d in [4usize, 8] {
            assert_eq!(s.get(d, d), ExactAmplitude::one());
        }
        // swapping twice is the identity
        assert_eq!(s.mul(&s), Matrix::identity(9));
    }

    #[test]
    fn gf3_tables() {
        // (2,2,0): 2·2 = 1, +0
        let f = |a: usize, b: usize, c: usize| GF3_ADD[GF3_MUL[a][b] as usize][c] as usize;
        assert_eq!(f(2, 2, 0), 1);
        // row 0 of the product table passes c through
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(f(0, x, y), y);
            }
        }
        // (1,2,2): 2 + 2 = 1
        assert_eq!(f(1, 2, 2), 1);
        // the tables agree with mod-3 arithmetic
        for a in 0..3usize {
            for b in 0..3usize {
                assert_eq!(GF3_MUL[a][b] as usize, (a * b) % 3);
                assert_eq!(GF3_ADD[a][b] as usize, (a + b) % 3);
            }
        }
    }

    #[test]
    fn gf3_target_permutes_only_the_target_wire() {
        let image = gf3_target().as_permutation().unwrap();
        for a in 0..3usize {
            for b in 0..3usize {
                for c in 0..3usize {
                    let f = GF3_ADD[GF3_MUL[a][b] as usize][c] as usize;
                    assert_eq!(image[9 * a + 3 * b + c], 9 * a + 3 * b + f);
                }
            }
        }
        // fixing c = 0 yields the Toffoli function f = a·b
        assert_eq!(gf3_classical(0), GF3_MUL);
    }

    #[test]
    fn stage_maps_are_consistent() {
        let maps = stage_maps_from_table2();
        // the state-correction stage is the 12 permutative gate on the
        // less-significant qutrit
        assert_eq!(
            maps.state_correction,
            Matrix::identity(3).kron(&gates::gate_matrix(GateKind::P12))
        );
        // entanglement of |00⟩: (|00⟩+|11⟩+|22⟩)/√3
        let n = ExactAmplitude::inv_sqrt3();
        for row in [0usize, 4, 8] {
            assert_eq!(maps.entanglement.get(row, 0), n);
        }
        // stages 1–2 send |11⟩ to ω²|12⟩
        let [_, c2, _, _] = maps.cumulative();
        assert_eq!(c2.get(5, 4), ExactAmplitude::omega_pow(2));
        // the phase-correction stage multiplies |11⟩ by ω
        assert_eq!(maps.phase_correction.get(4, 4), ExactAmplitude::omega());
    }

    #[test]
    fn staged_circuit_aligns_with_the_stage_maps() {
        let c = staged_swap_circuit();
        assert_eq!(c.compose_unitary(), swap_target());
        assert_eq!(stage_alignment(&c), Some([3, 6, 7, 11]));
        let cost = c.qc3();
        assert_eq!((cost.one_qutrit, cost.two_qutrit), (5, 6));
    }

    #[test]
    fn staged_circuit_reproduces_stage_states() {
        // simulate the staged circuit from |12⟩ and check its snapshots
        // against the stage data
        let c = staged_swap_circuit();
        let init = StateVector::basis("12").unwrap();
        let result = run(&c, &init).unwrap();
        let snaps = &result.snapshots;
        assert_eq!(snaps.len(), 4);
        let n = ExactAmplitude::inv_sqrt3();
        // (|10⟩ + ω²|21⟩ + ω|02⟩)/√3
        assert_eq!(snaps[0].1.amplitude(3), n);
        assert_eq!(snaps[0].1.amplitude(7), n * ExactAmplitude::omega_pow(2));
        assert_eq!(snaps[0].1.amplitude(2), n * ExactAmplitude::omega());
        // ω|22⟩
        assert_eq!(snaps[1].1.amplitude(8), ExactAmplitude::omega());
        // ω|21⟩
        assert_eq!(snaps[2].1.amplitude(7), ExactAmplitude::omega());
        // |21⟩
        assert_eq!(snaps[3].1.amplitude(7), ExactAmplitude::one());
        assert_eq!(result.final_state, StateVector::basis("21").unwrap());
    }

    #[test]
    fn gf3_synthesis_finds_a_solution_within_ten_gates() {
        let spec = SynthesisSpec::gf3(&[1, 2], 10);
        match synthesize(&spec).unwrap() {
            SynthOutcome::Found { circuit, .. } => {
                assert_eq!(circuit.compose_unitary(), gf3_target());
                assert!(circuit.len() <= 10);
                assert!(verify_connectivity(&circuit, &[(0, 2), (1, 2)]));
                let cost = circuit.qc3();
                assert_eq!(cost.one_qutrit, 0);
            }
            SynthOutcome::NotFoundAtDepth { .. } => panic!("expected a GF3 solution"),
        }
    }

    #[test]
    fn gf3_value2_only_pool_is_certified_unreachable() {
        let spec = SynthesisSpec::gf3(&[2], 10);
        match synthesize(&spec).unwrap() {
            SynthOutcome::NotFoundAtDepth { depth, stats } => {
                assert_eq!(depth, 10);
                assert!(stats.nodes > 0);
            }
            SynthOutcome::Found { .. } => panic!("value-2-only pool cannot realize GF3"),
        }
    }

    #[test]
    fn mitm_matches_brute_force_on_small_searches() {
        // permutation pool: a depth-3 target word
        let gf3 = SynthesisSpec::gf3(&[1, 2], 4);
        let word = [3u8, 9, 14];
        let target = word_to_circuit(&gf3, &word).compose_unitary();
        let spec = SynthesisSpec {
            target,
            depth_budget: 4,
            ..gf3
        };
        let mitm = match synthesize(&spec).unwrap() {
            SynthOutcome::Found { circuit, .. } => circuit,
            _ => panic!("not found"),
        };
        let brute = brute_force(&spec).unwrap();
        assert_eq!(mitm, brute);

        // unitary pool (contains CH): a depth-2 target word
        let swap = SynthesisSpec::swap();
        let word = [0u8, 12];
        let target = word_to_circuit(&swap, &word).compose_unitary();
        let spec = SynthesisSpec {
            target,
            depth_budget: 3,
            counts: None,
            ..swap
        };
        let mitm = match synthesize(&spec).unwrap() {
            SynthOutcome::Found { circuit, .. } => circuit,
            _ => panic!("not found"),
        };
        let brute = brute_force(&spec).unwrap();
        assert_eq!(mitm, brute);
    }

    #[test]
    fn identity_target_needs_no_gates() {
        let spec = SynthesisSpec {
            target: Matrix::identity(27),
            depth_budget: 2,
            ..SynthesisSpec::gf3(&[1, 2], 2)
        };
        match synthesize(&spec).unwrap() {
            SynthOutcome::Found { circuit, .. } => assert!(circuit.is_empty()),
            _ => panic!("identity should be found at depth 0"),
        }
    }

    #[test]
    fn worker_count_does_not_change_the_result() {
        let swap = SynthesisSpec::swap();
        let word = [4u8, 10, 11];
        let target = word_to_circuit(&swap, &word).compose_unitary();
        let spec = SynthesisSpec {
            target,
            depth_budget: 3,
            counts: None,
            ..swap
        };
        let one = match synthesize_with_workers(&spec, 1).unwrap() {
            SynthOutcome::Found { circuit, .. } => circuit,
            _ => panic!("not found"),
        };
        let four = match synthesize_with_workers(&spec, 4).unwrap() {
            SynthOutcome::Found { circuit, .. } => circuit,
            _ => panic!("not found"),
        };
        assert_eq!(one, four);
    }

    #[test]
    fn connectivity_checks() {
        let edges = [(0usize, 2usize), (1, 2)];
        let ok = Circuit::with_apps(
            3,
            vec![
                GateApplication::controlled(GateKind::Plus1, 0, 2, 2),
                GateApplication::plain(GateKind::Ch, 1),
            ],
        );
        assert!(verify_connectivity(&ok, &edges));
        let bad = Circuit::with_apps(
            3,
            vec![GateApplication::controlled(GateKind::Plus1, 0, 1, 2)],
        );
        assert!(!verify_connectivity(&bad, &edges));
        let one_qutrit_only = Circuit::with_apps(3, vec![GateApplication::plain(GateKind::Ch, 0)]);
        assert!(verify_connectivity(&one_qutrit_only, &[]));
    }

    #[test]
    fn spec_validation_errors() {
        let mut spec = SynthesisSpec::gf3(&[1, 2], 13);
        assert_eq!(
            synthesize(&spec).unwrap_err(),
            SynthError::DepthBudgetTooLarge(13)
        );
        spec.depth_budget = 4;
        spec.pool.clear();
        assert_eq!(synthesize(&spec).unwrap_err(), SynthError::EmptyPool);
        let mut spec = SynthesisSpec::gf3(&[1, 2], 4);
        spec.pool
            .push(GateApplication::controlled(GateKind::Plus1, 0, 1, 2));
        assert_eq!(
            synthesize(&spec).unwrap_err(),
            SynthError::PoolViolatesConnectivity {
                index: spec.pool.len() - 1
            }
        );
    }
}
