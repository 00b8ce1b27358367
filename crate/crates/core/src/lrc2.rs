//! Locality-2 codes: linear forms `x -> <b, x>` evaluated on the inner-code
//! rows plus `L` extra points on the line through each chosen pair of rows.

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::evalset::{EvaluationSet, PairError, PairSet};
use crate::gf::{vec_sub, FieldElement};
use crate::guard::TooLarge;
use crate::inner::{InnerCode, InnerError};
use crate::lincode;
use crate::ratio::{self, Rational};
use crate::repair::{self, CoopOutcome, LocalCode, LocalRepair, RepairError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Lrc2Error {
    #[error("extension length L = {l} outside 1..={max}")]
    LOutOfRange { l: usize, max: usize },
    #[error("row {0} is on no registered line")]
    UncoveredIndex(usize),
    #[error("rows {0} and {1} coincide")]
    DegenerateDirection(usize, usize),
    #[error("the first rows of the inner code are not the identity")]
    NotSystematicInner,
    #[error("decoding failed: {0}")]
    DecodingFailure(String),
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error(transparent)]
    Repair(#[from] RepairError),
    #[error(transparent)]
    Inner(#[from] InnerError),
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lrc2Code {
    inner: InnerCode,
    pairs: PairSet,
    l: usize,
    allow_uncovered: bool,
    eval_set: EvaluationSet,
}

impl Lrc2Code {
    /// Points: the inner rows `a_i` in order, then for each pair `(i, j)` the
    /// points `a_i + t (a_j - a_i)` for `t = 2..=L+1`. Each pair registers
    /// its line with `t = 0, 1, ..., L+1`.
    pub fn build(inner: InnerCode, pairs: PairSet, l: usize, allow_uncovered: bool) -> Result<Self, Lrc2Error> {
        let field = inner.field();
        let max = field.modulus() as usize - 2;
        if l < 1 || l > max {
            return Err(Lrc2Error::LOutOfRange { l, max });
        }
        if let Some(&(_, j)) = pairs.pairs().iter().find(|&&(_, j)| j >= inner.n()) {
            return Err(PairError::IndexOutOfRange { index: j, n: inner.n() }.into());
        }
        let mut es = EvaluationSet::new(field, inner.k());
        for r in inner.rows() {
            es.insert(r.clone());
        }
        for &(i, j) in pairs.pairs() {
            let dir = vec_sub(inner.row(j), inner.row(i));
            if dir.iter().all(FieldElement::is_zero) {
                return Err(Lrc2Error::DegenerateDirection(i, j));
            }
            let params = (0..l as u64 + 2).map(|t| field.elem(t)).collect();
            es.add_line(inner.row(i).to_vec(), dir, params, (i, j));
        }
        if !allow_uncovered {
            if let Some(&n) = es.uncovered().first() {
                return Err(Lrc2Error::UncoveredIndex(n));
            }
        }
        Ok(Self {
            inner,
            pairs,
            l,
            allow_uncovered,
            eval_set: es,
        })
    }

    /// Pyramid-style variant: the first `m` inner rows must be the identity,
    /// so the first `m` symbols are the message. Pairs index message rows.
    pub fn systematic(inner: InnerCode, pairs: PairSet, l: usize) -> Result<Self, Lrc2Error> {
        let m = inner.k();
        let field = inner.field();
        let is_identity = inner.n() >= m
            && (0..m).all(|i| (0..m).all(|j| inner.row(i)[j] == if i == j { field.one() } else { field.zero() }));
        if !is_identity {
            return Err(Lrc2Error::NotSystematicInner);
        }
        if let Some(&(_, j)) = pairs.pairs().iter().find(|&&(_, j)| j >= m) {
            return Err(PairError::IndexOutOfRange { index: j, n: m }.into());
        }
        Self::build(inner, pairs, l, true)
    }

    pub fn inner(&self) -> &InnerCode {
        &self.inner
    }

    pub fn pairs(&self) -> &PairSet {
        &self.pairs
    }

    pub fn extension_length(&self) -> usize {
        self.l
    }

    pub fn allow_uncovered(&self) -> bool {
        self.allow_uncovered
    }

    pub fn repair(&self, failed: usize, available: &[Option<FieldElement>]) -> Result<LocalRepair, Lrc2Error> {
        Ok(repair::repair_node(self, failed, available)?)
    }

    /// Cooperative repair; any unrecovered node is a `PartialFailure`.
    pub fn cooperative_repair(
        &self,
        failed: &[usize],
        available: &[Option<FieldElement>],
    ) -> Result<CoopOutcome, Lrc2Error> {
        let out = repair::cooperative_repair(self, failed, available)?;
        if !out.unrecovered.is_empty() {
            return Err(RepairError::PartialFailure {
                unrecovered: out.unrecovered.clone(),
                partial: Box::new(out),
            }
            .into());
        }
        Ok(out)
    }

    /// Decode the message from the inner-row block; if that fails, refill
    /// erased rows by line repair first and retry.
    pub fn decode_global(&self, received: &[Option<FieldElement>]) -> Result<Vec<FieldElement>, Lrc2Error> {
        if received.len() != self.len() {
            return Err(RepairError::LengthMismatch {
                expected: self.len(),
                got: received.len(),
            }
            .into());
        }
        let n = self.inner.n();
        let first = match self.inner.decode(&received[..n]) {
            Ok(d) => return Ok(d.message),
            Err(e) => e,
        };
        let erased: Vec<usize> = (0..self.len()).filter(|&i| received[i].is_none()).collect();
        if erased.iter().all(|&i| i >= n) {
            return Err(Lrc2Error::DecodingFailure(first.to_string()));
        }
        let coop = repair::cooperative_repair(self, &erased, received)?;
        let block: Vec<Option<FieldElement>> = (0..n)
            .map(|i| received[i].or_else(|| coop.recovered.get(&i).copied()))
            .collect();
        self.inner
            .decode(&block)
            .map(|d| d.message)
            .map_err(|e| Lrc2Error::DecodingFailure(e.to_string()))
    }

    /// Generator rows of the code (length-`|S|` rows, one per coordinate).
    pub fn generator_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.inner.k())
            .map(|j| self.eval_set.points().iter().map(|p| p[j]).collect())
            .collect()
    }

    pub fn bruteforce_min_distance(&self) -> Result<usize, Lrc2Error> {
        let d = lincode::min_distance(self.field(), &self.generator_rows(), self.len())?;
        Ok(d.expect("nonzero code"))
    }

    pub fn report(&self, with_bruteforce: bool) -> Lrc2Report {
        let n_inner = self.inner.n();
        let m = self.inner.k();
        let len = self.len();
        let lower = n_inner + self.l + 1 - m;
        let kumar = kumar_bound(len, m, 2, self.l + 1);
        let d = if with_bruteforce {
            self.bruteforce_min_distance().ok()
        } else {
            None
        };
        Lrc2Report {
            kind: "locality2",
            q: self.field().modulus(),
            n_inner,
            m,
            l: self.l,
            pairs: self.pairs.len(),
            length: len,
            length_without_collisions: n_inner + self.pairs.len() * self.l,
            dimension: m,
            rate: Ratio::new(m as u64, len as u64),
            locality: 2,
            distance_lower_bound_mds: lower,
            kumar_upper_bound: kumar,
            d_min_bruteforce: d,
            lower_bound_holds: d.map(|d| d >= lower),
            meets_upper_bound: d.map(|d| d as i64 == kumar),
        }
    }
}

/// `n - k + 1 - (ceil(k/r) - 1)(delta - 1)`.
pub fn kumar_bound(n: usize, k: usize, r: usize, delta: usize) -> i64 {
    n as i64 - k as i64 + 1 - (k.div_ceil(r) as i64 - 1) * (delta as i64 - 1)
}

impl LocalCode for Lrc2Code {
    fn eval_set(&self) -> &EvaluationSet {
        &self.eval_set
    }

    fn dimension(&self) -> usize {
        self.inner.k()
    }

    fn line_degree(&self) -> usize {
        1
    }

    fn eval_vector(&self, node: usize) -> Vec<FieldElement> {
        self.eval_set.point(node).to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lrc2Report {
    pub kind: &'static str,
    pub q: u64,
    pub n_inner: usize,
    pub m: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub pairs: usize,
    pub length: usize,
    pub length_without_collisions: usize,
    pub dimension: usize,
    #[serde(with = "ratio")]
    pub rate: Rational,
    pub locality: usize,
    /// `N - m + L + 1`; argued for MDS inner codes only.
    pub distance_lower_bound_mds: usize,
    pub kumar_upper_bound: i64,
    pub d_min_bruteforce: Option<usize>,
    pub lower_bound_holds: Option<bool>,
    pub meets_upper_bound: Option<bool>,
}
