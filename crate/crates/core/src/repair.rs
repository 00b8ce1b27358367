//! Local, cooperative and global repair shared by both constructions.
//!
//! A code here is an evaluation set together with a map from nodes to
//! evaluation vectors: the symbol of node `n` is `<e(n), b>` for message `b`.
//! Restricted to a registered line, every codeword is a polynomial in `t` of
//! degree at most `line_degree`, so `line_degree + 1` symbols on the line
//! determine the others.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::evalset::EvaluationSet;
use crate::gf::{dot, FieldElement, PrimeField};
use crate::matrix::{vectors_rank, Matrix};
use crate::mpoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepairError {
    #[error("node {0} has no registered line with enough surviving peers")]
    NoRepairGroup(usize),
    #[error("could not recover nodes {unrecovered:?}")]
    PartialFailure {
        unrecovered: Vec<usize>,
        partial: Box<CoopOutcome>,
    },
    #[error("node {node} out of range for {len} nodes")]
    NodeOutOfRange { node: usize, len: usize },
    #[error("expected {expected} symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("message has {got} symbols, code dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("only {rank} of {needed} independent symbols are available")]
    Unrecoverable { rank: usize, needed: usize },
}

pub trait LocalCode {
    fn eval_set(&self) -> &EvaluationSet;

    /// Number of message symbols `K`.
    fn dimension(&self) -> usize;

    /// Degree bound of a codeword restricted to a registered line.
    fn line_degree(&self) -> usize;

    fn eval_vector(&self, node: usize) -> Vec<FieldElement>;

    fn field(&self) -> PrimeField {
        self.eval_set().field()
    }

    fn len(&self) -> usize {
        self.eval_set().len()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn encode(&self, b: &[FieldElement]) -> Result<Vec<FieldElement>, RepairError> {
        if b.len() != self.dimension() {
            return Err(RepairError::DimensionMismatch {
                expected: self.dimension(),
                got: b.len(),
            });
        }
        Ok((0..self.len()).map(|n| dot(&self.eval_vector(n), b)).collect())
    }

    fn is_codeword(&self, word: &[FieldElement]) -> bool {
        if word.len() != self.len() || word.iter().any(|x| x.field() != self.field()) {
            return false;
        }
        let rows: Vec<Vec<FieldElement>> = (0..self.len()).map(|n| self.eval_vector(n)).collect();
        Matrix::from_rows(self.field(), self.dimension(), &rows)
            .expect("eval vectors have length K")
            .solve(word)
            .is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRepair {
    pub node: usize,
    pub value: FieldElement,
    pub line: usize,
    pub contacts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairGroup {
    pub line: usize,
    pub helpers: Vec<usize>,
    pub recovered: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoopOutcome {
    pub recovered: BTreeMap<usize, FieldElement>,
    pub groups: Vec<RepairGroup>,
    pub unrecovered: Vec<usize>,
}

impl CoopOutcome {
    pub fn contacts(&self) -> usize {
        self.groups.iter().map(|g| g.helpers.len()).sum()
    }
}

fn check_len<C: LocalCode + ?Sized>(code: &C, available: &[Option<FieldElement>]) -> Result<(), RepairError> {
    if available.len() != code.len() {
        return Err(RepairError::LengthMismatch {
            expected: code.len(),
            got: available.len(),
        });
    }
    Ok(())
}

/// Interpolate along `line` from `helpers` and evaluate at each target.
fn interpolate_on_line(
    es: &EvaluationSet,
    line: usize,
    degree: usize,
    helpers: &[usize],
    symbols: &[Option<FieldElement>],
    targets: &[usize],
) -> Vec<FieldElement> {
    let l = &es.lines()[line];
    let samples: Vec<(FieldElement, FieldElement)> = helpers
        .iter()
        .map(|&h| {
            (
                l.param_of_node(h).expect("helper on line"),
                symbols[h].expect("helper available"),
            )
        })
        .collect();
    let g = UniPoly::interpolate(&samples, degree).expect("distinct parameters on a line");
    targets
        .iter()
        .map(|&n| g.evaluate(l.param_of_node(n).expect("target on line")))
        .collect()
}

/// Surviving peers of `node` on `line`, ascending.
fn survivors(es: &EvaluationSet, line: usize, exclude: &[usize], symbols: &[Option<FieldElement>]) -> Vec<usize> {
    let mut s: Vec<usize> = es.lines()[line]
        .nodes
        .iter()
        .copied()
        .filter(|n| !exclude.contains(n) && symbols[*n].is_some())
        .collect();
    s.sort_unstable();
    s.dedup();
    s
}

/// Repair one node from `line_degree + 1` survivors on the first registered
/// line through it that has enough of them, taking the lowest-index
/// survivors.
pub fn repair_node<C: LocalCode + ?Sized>(
    code: &C,
    failed: usize,
    available: &[Option<FieldElement>],
) -> Result<LocalRepair, RepairError> {
    check_len(code, available)?;
    if failed >= code.len() {
        return Err(RepairError::NodeOutOfRange {
            node: failed,
            len: code.len(),
        });
    }
    let es = code.eval_set();
    let need = code.line_degree() + 1;
    for &line in es.lines_through(failed) {
        let helpers = survivors(es, line, &[failed], available);
        if helpers.len() >= need {
            let contacts = helpers[..need].to_vec();
            let value = interpolate_on_line(es, line, code.line_degree(), &contacts, available, &[failed])[0];
            return Ok(LocalRepair {
                node: failed,
                value,
                line,
                contacts,
            });
        }
    }
    Err(RepairError::NoRepairGroup(failed))
}

/// Recover as many failed nodes as possible, one interpolation per line.
/// Repeatedly picks the line holding the most unrecovered failures among
/// those with enough helpers (lowest line index on ties); recovered nodes may
/// help later lines.
pub fn cooperative_repair<C: LocalCode + ?Sized>(
    code: &C,
    failed: &[usize],
    available: &[Option<FieldElement>],
) -> Result<CoopOutcome, RepairError> {
    check_len(code, available)?;
    if let Some(&node) = failed.iter().find(|&&n| n >= code.len()) {
        return Err(RepairError::NodeOutOfRange { node, len: code.len() });
    }
    let es = code.eval_set();
    let need = code.line_degree() + 1;
    let mut pending: Vec<usize> = failed.to_vec();
    pending.sort_unstable();
    pending.dedup();
    let mut symbols = available.to_vec();
    for &n in &pending {
        symbols[n] = None;
    }
    let mut out = CoopOutcome::default();
    loop {
        let mut best: Option<(usize, Vec<usize>, Vec<usize>)> = None;
        for (line, l) in es.lines().iter().enumerate() {
            let targets: Vec<usize> = pending.iter().copied().filter(|n| l.nodes.contains(n)).collect();
            if targets.is_empty() {
                continue;
            }
            let helpers = survivors(es, line, &pending, &symbols);
            if helpers.len() < need {
                continue;
            }
            if best.as_ref().is_none_or(|(_, _, t)| targets.len() > t.len()) {
                best = Some((line, helpers[..need].to_vec(), targets));
            }
        }
        let Some((line, helpers, targets)) = best else {
            break;
        };
        let values = interpolate_on_line(es, line, code.line_degree(), &helpers, &symbols, &targets);
        for (&n, &v) in targets.iter().zip(&values) {
            symbols[n] = Some(v);
            out.recovered.insert(n, v);
        }
        pending.retain(|n| !targets.contains(n));
        out.groups.push(RepairGroup {
            line,
            helpers,
            recovered: targets,
        });
    }
    out.unrecovered = pending;
    Ok(out)
}

/// Recover the message from the lowest-index available nodes whose
/// evaluation vectors are independent. Returns the message and the nodes
/// read.
pub fn information_set_decode<C: LocalCode + ?Sized>(
    code: &C,
    available: &[Option<FieldElement>],
) -> Result<(Vec<FieldElement>, Vec<usize>), RepairError> {
    check_len(code, available)?;
    let k = code.dimension();
    let field = code.field();
    let mut chosen: Vec<usize> = Vec::new();
    let mut vecs: Vec<Vec<FieldElement>> = Vec::new();
    for n in (0..code.len()).filter(|&n| available[n].is_some()) {
        if chosen.len() == k {
            break;
        }
        vecs.push(code.eval_vector(n));
        if vectors_rank(field, k, &vecs) == vecs.len() {
            chosen.push(n);
        } else {
            vecs.pop();
        }
    }
    if chosen.len() < k {
        return Err(RepairError::Unrecoverable {
            rank: chosen.len(),
            needed: k,
        });
    }
    let y: Vec<FieldElement> = chosen.iter().map(|&n| available[n].expect("available")).collect();
    let sol = Matrix::from_rows(field, k, &vecs)
        .expect("K vectors of length K")
        .solve(&y)
        .expect("independent rows");
    Ok((sol.particular, chosen))
}
