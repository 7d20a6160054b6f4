//! Circuit representation: a width-m qutrit register and an ordered list
//! of gate applications, where list order is application (on-the-wire)
//! order. The composed unitary is therefore the reversed matrix product.
//!
//! Text format (UTF-8, line oriented):
//!
//! ```text
//! qutrits 2
//! # comment
//! CH q1
//! C+1[v=2] q0 -> q1
//! --- stage entanglement
//! 12 q1
//! ```
//!
//! One-qutrit lines are `<MNEMONIC> q<i>`; controlled lines are
//! `C<MNEMONIC>[v=<0|1|2>] q<control> -> q<target>` with the `[v=…]`
//! suffix optional (default 2). A `--- stage <name>` marker attaches to
//! the following gate line.

use std::fmt;

use crate::gates::{self, GateKind};
use crate::matrix::Matrix;

/// A controlled application's control wire and activation value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Control {
    pub wire: usize,
    pub value: u8,
}

/// One gate application on a register.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GateApplication {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<Control>,
    pub stage: Option<String>,
}

impl GateApplication {
    pub fn plain(kind: GateKind, target: usize) -> Self {
        GateApplication {
            kind,
            target,
            control: None,
            stage: None,
        }
    }

    pub fn controlled(kind: GateKind, control_wire: usize, target: usize, value: u8) -> Self {
        GateApplication {
            kind,
            target,
            control: Some(Control {
                wire: control_wire,
                value,
            }),
            stage: None,
        }
    }

    pub fn with_stage(mut self, name: &str) -> Self {
        self.stage = Some(name.to_string());
        self
    }

    /// Same gate, same wires, same control — ignoring the stage marker.
    pub fn same_action(&self, other: &GateApplication) -> bool {
        self.kind == other.kind && self.target == other.target && self.control == other.control
    }

    fn render(&self) -> String {
        match &self.control {
            None => format!("{} q{}", self.kind.mnemonic(), self.target),
            Some(c) => {
                format!(
                    "C{}[v={}] q{} -> q{}",
                    self.kind.mnemonic(),
                    c.value,
                    c.wire,
                    self.target
                )
            }
        }
    }
}

/// An ordered qutrit circuit. `apps[0]` is applied first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    width: usize,
    apps: Vec<GateApplication>,
}

/// QC₃ tally: one-qutrit and two-qutrit gate counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostReport {
    pub one_qutrit: usize,
    pub two_qutrit: usize,
    pub total: usize,
}

impl CostReport {
    fn new(one_qutrit: usize, two_qutrit: usize) -> Self {
        CostReport {
            one_qutrit,
            two_qutrit,
            total: one_qutrit + two_qutrit,
        }
    }
}

impl fmt::Display for CostReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QC3 = {} ({} one-qutrit + {} two-qutrit)",
            self.total, self.one_qutrit, self.two_qutrit
        )
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing `qutrits <m>` header")]
    MissingHeader,
    #[error("line {line}: bad `qutrits` header (width must be a positive integer)")]
    BadHeader { line: usize },
    #[error("line {line}: unknown mnemonic `{token}`")]
    UnknownMnemonic { line: usize, token: String },
    #[error("line {line}: bad qutrit index `{token}`")]
    BadIndex { line: usize, token: String },
    #[error("line {line}: qutrit index {index} out of range for width {width}")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        width: usize,
    },
    #[error("line {line}: control qutrit equals target qutrit")]
    ControlEqualsTarget { line: usize },
    #[error("line {line}: bad control value `{token}` (must be 0, 1 or 2)")]
    BadControlValue { line: usize, token: String },
    #[error("line {line}: malformed gate line: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: stage marker has no following gate")]
    TrailingStageMarker { line: usize },
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        assert!(width >= 1, "circuit width must be at least 1");
        Circuit {
            width,
            apps: Vec::new(),
        }
    }

    pub fn with_apps(width: usize, apps: Vec<GateApplication>) -> Self {
        let mut c = Circuit::new(width);
        for app in apps {
            c.push(app);
        }
        c
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn apps(&self) -> &[GateApplication] {
        &self.apps
    }

    pub fn len(&self) -> usize {
        self.apps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.apps.is_empty()
    }

    /// Appends an application; panics if its wires do not fit the width.
    pub fn push(&mut self, app: GateApplication) {
        gates::check_application(self.width, &app).expect("gate application out of range");
        self.apps.push(app);
    }

    /// Concatenates another circuit of the same width after this one.
    pub fn concat(mut self, other: &Circuit) -> Circuit {
        assert_eq!(self.width, other.width, "circuit width mismatch");
        self.apps.extend(other.apps.iter().cloned());
        self
    }

    /// Parses the line-oriented text format.
    pub fn parse(text: &str) -> Result<Circuit, ParseError> {
        let mut width: Option<usize> = None;
        let mut apps: Vec<GateApplication> = Vec::new();
        let mut pending_stage: Option<(String, usize)> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some(w) = width else {
                let rest = line
                    .strip_prefix("qutrits")
                    .ok_or(ParseError::MissingHeader)?
                    .trim();
                let w: usize = rest
                    .parse()
                    .map_err(|_| ParseError::BadHeader { line: line_no })?;
                if w == 0 {
                    return Err(ParseError::BadHeader { line: line_no });
                }
                width = Some(w);
                continue;
            };
            if let Some(rest) = line.strip_prefix("---") {
                let rest = rest.trim();
                let name = rest
                    .strip_prefix("stage")
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| ParseError::Malformed {
                        line: line_no,
                        reason: "expected `--- stage <name>`".into(),
                    })?;
                pending_stage = Some((name.to_string(), line_no));
                continue;
            }
            let mut app = parse_gate_line(line, line_no, w)?;
            if let Some((stage, _)) = pending_stage.take() {
                app.stage = Some(stage);
            }
            apps.push(app);
        }

        if width.is_none() {
            return Err(ParseError::MissingHeader);
        }
        if let Some((_, line)) = pending_stage {
            return Err(ParseError::TrailingStageMarker { line });
        }
        Ok(Circuit {
            width: width.unwrap(),
            apps,
        })
    }

    /// Canonical text form; `parse(format(c))` structurally equals `c`.
    pub fn format(&self) -> String {
        let mut out = format!("qutrits {}\n", self.width);
        for app in &self.apps {
            if let Some(stage) = &app.stage {
                out.push_str(&format!("--- stage {stage}\n"));
            }
            out.push_str(&app.render());
            out.push('\n');
        }
        out
    }

    /// The exact 3^m × 3^m unitary of the whole circuit: applications
    /// compose in list order, so the conventional product runs reversed.
    pub fn compose_unitary(&self) -> Matrix {
        let dim = 3usize.pow(self.width as u32);
        let mut u = Matrix::identity(dim);
        for app in &self.apps {
            let g = gates::embed_gate(self.width, app).expect("circuit invariant: wires in range");
            u = g.mul(&u);
        }
        u
    }

    /// QC₃: uncontrolled applications count as one-qutrit gates,
    /// controlled ones as two-qutrit gates.
    pub fn qc3(&self) -> CostReport {
        self.qc3_with(false)
    }

    /// QC₃ with the option to leave identity gates uncounted.
    pub fn qc3_with(&self, ignore_identity: bool) -> CostReport {
        let mut one = 0;
        let mut two = 0;
        for app in &self.apps {
            if ignore_identity && app.kind == GateKind::I3 {
                continue;
            }
            match app.control {
                None => one += 1,
                Some(_) => two += 1,
            }
        }
        CostReport::new(one, two)
    }

    /// Reversed application order with every kind replaced by its dagger
    /// kind; controls are preserved. Composes to the exact inverse.
    pub fn invert(&self) -> Circuit {
        let apps = self
            .apps
            .iter()
            .rev()
            .map(|app| GateApplication {
                kind: app.kind.dagger(),
                ..app.clone()
            })
            .collect();
        Circuit {
            width: self.width,
            apps,
        }
    }

    /// Peephole cancellation: repeatedly removes adjacent same-wire,
    /// same-control pairs (X, X†) and adjacent triples of the same
    /// diagonal phase gate (Z3·Z3·Z3 = Z3+·Z3+·Z3+ = I) until fixpoint.
    /// The composed unitary is unchanged.
    pub fn cancel_inverses(&self) -> Circuit {
        let mut stack: Vec<GateApplication> = Vec::with_capacity(self.apps.len());
        for app in &self.apps {
            if let Some(top) = stack.last() {
                if top.same_action(&GateApplication {
                    kind: app.kind.dagger(),
                    ..app.clone()
                }) {
                    stack.pop();
                    continue;
                }
            }
            if app.kind.is_diagonal_phase() && stack.len() >= 2 {
                let n = stack.len();
                if stack[n - 1].same_action(app) && stack[n - 2].same_action(app) {
                    stack.truncate(n - 2);
                    continue;
                }
            }
            stack.push(app.clone());
        }
        let out = Circuit {
            width: self.width,
            apps: stack,
        };
        debug_assert_eq!(out.compose_unitary(), self.compose_unitary());
        out
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format())
    }
}

fn parse_index(token: &str, line: usize, width: usize) -> Result<usize, ParseError> {
    let digits = token
        .strip_prefix('q')
        .ok_or_else(|| ParseError::BadIndex {
            line,
            token: token.to_string(),
        })?;
    let index: usize = digits.parse().map_err(|_| ParseError::BadIndex {
        line,
        token: token.to_string(),
    })?;
    if index >= width {
        return Err(ParseError::IndexOutOfRange { line, index, width });
    }
    Ok(index)
}

fn parse_gate_line(
    line: &str,
    line_no: usize,
    width: usize,
) -> Result<GateApplication, ParseError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let controlled = tokens.contains(&"->");
    if controlled {
        if tokens.len() != 4 || tokens[2] != "->" {
            return Err(ParseError::Malformed {
                line: line_no,
                reason: "expected `C<GATE>[v=<d>] q<control> -> q<target>`".into(),
            });
        }
        let gate_tok = tokens[0];
        let inner = gate_tok
            .strip_prefix('C')
            .ok_or_else(|| ParseError::UnknownMnemonic {
                line: line_no,
                token: gate_tok.to_string(),
            })?;
        let (mnemonic, value) = match inner.find('[') {
            None => (inner, 2u8),
            Some(pos) => {
                let (m, suffix) = inner.split_at(pos);
                let v = suffix
                    .strip_prefix("[v=")
                    .and_then(|s| s.strip_suffix(']'))
                    .ok_or_else(|| ParseError::Malformed {
                        line: line_no,
                        reason: format!("bad control suffix `{suffix}`"),
                    })?;
                let v: u8 = v.parse().map_err(|_| ParseError::BadControlValue {
                    line: line_no,
                    token: v.to_string(),
                })?;
                if v > 2 {
                    return Err(ParseError::BadControlValue {
                        line: line_no,
                        token: v.to_string(),
                    });
                }
                (m, v)
            }
        };
        let kind =
            GateKind::from_mnemonic(mnemonic).ok_or_else(|| ParseError::UnknownMnemonic {
                line: line_no,
                token: gate_tok.to_string(),
            })?;
        let control = parse_index(tokens[1], line_no, width)?;
        let target = parse_index(tokens[3], line_no, width)?;
        if control == target {
            return Err(ParseError::ControlEqualsTarget { line: line_no });
        }
        Ok(GateApplication::controlled(kind, control, target, value))
    } else {
        if tokens.len() != 2 {
            return Err(ParseError::Malformed {
                line: line_no,
                reason: "expected `<GATE> q<target>`".into(),
            });
        }
        let kind =
            GateKind::from_mnemonic(tokens[0]).ok_or_else(|| ParseError::UnknownMnemonic {
                line: line_no,
                token: tokens[0].to_string(),
            })?;
        let target = parse_index(tokens[1], line_no, width)?;
        Ok(GateApplication::plain(kind, target))
    }
}
