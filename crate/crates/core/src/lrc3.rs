//! Locality-3 codes: polynomials of total degree at most 2 evaluated on the
//! sumset `S2 = {a_i + a_j : i <= j}` of the inner rows plus line extensions,
//! with an interpolating decoder and 3-survivor repair.

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evalset::{EvaluationSet, PairError, PairSet};
use crate::gf::{vec_add, vec_sub, FieldElement};
use crate::guard::TooLarge;
use crate::inner::{InnerCode, InnerError};
use crate::matrix::{vectors_rank, Matrix};
use crate::mpoly::{enumerate_monomials, Monomial, MultiPoly};
use crate::ratio::{self, Rational};
use crate::repair::{self, CoopOutcome, LocalCode, LocalRepair, RepairError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Lrc3Error {
    #[error("locality 3 needs q >= 5, got {0}")]
    QTooSmall(u64),
    #[error("extension length L = {l} outside {min}..={max}")]
    LOutOfRange { l: usize, min: usize, max: usize },
    #[error("node {0} is on no registered line")]
    UncoveredIndex(usize),
    #[error("pair ({0}, {1}) has coinciding points")]
    DegenerateDirection(usize, usize),
    #[error("inner rows extended by a constant coordinate have rank below m + 1")]
    AffineRankDeficient,
    #[error("pair differences do not span the space")]
    NoSpanningDirections,
    #[error("decoding failed: {0}")]
    DecodingFailure(String),
    #[error("expected {expected} symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error(transparent)]
    Repair(#[from] RepairError),
    #[error(transparent)]
    Inner(#[from] InnerError),
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
}

/// Where the extension lines come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// Pairs of inner rows; line `2a_i + t (a_j - a_i)`, `t = 0..=2+L`.
    A,
    /// Pairs of sumset points; line `p_i + t (p_j - p_i)`, `t = 0..=2+L`.
    B,
}

/// Pair schedule for the first step of the interpolating decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// Only pairs whose differences raise the rank, stopping at `m`.
    Spanning,
    /// Every pair; failed decodes are dropped and the rest must agree.
    AllPairs,
}

/// `S1 + S1` with provenance and translated views.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumSet {
    points: Vec<Vec<FieldElement>>,
    provenance: Vec<Vec<(usize, usize)>>,
    views: Vec<Vec<usize>>,
}

impl SumSet {
    /// Points in pair order `(i, j)`, `i <= j`, lexicographic, first
    /// occurrence kept.
    pub fn new(rows: &[Vec<FieldElement>]) -> Self {
        let n = rows.len();
        let mut points: Vec<Vec<FieldElement>> = Vec::new();
        let mut provenance: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut index = std::collections::HashMap::new();
        let mut idx = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in i..n {
                let p = vec_add(&rows[i], &rows[j]);
                let key = crate::gf::values(&p);
                let k = *index.entry(key).or_insert_with(|| {
                    points.push(p);
                    provenance.push(Vec::new());
                    points.len() - 1
                });
                provenance[k].push((i, j));
                idx[i][j] = k;
                idx[j][i] = k;
            }
        }
        Self {
            points,
            provenance,
            views: idx,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<FieldElement>] {
        &self.points
    }

    /// Pairs `(i, j)`, `i <= j`, whose sum is point `k`.
    pub fn provenance(&self, k: usize) -> &[(usize, usize)] {
        &self.provenance[k]
    }

    /// `T(i)[k]` = index of `a_k + a_i`.
    pub fn view(&self, i: usize) -> &[usize] {
        &self.views[i]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lrc3Code {
    inner: InnerCode,
    affine: InnerCode,
    pairs: PairSet,
    l: usize,
    case: Case,
    allow_uncovered: bool,
    sum_set: SumSet,
    monomials: Vec<Monomial>,
    eval_set: EvaluationSet,
}

/// One affine decode performed by the interpolating decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepDecode {
    /// `Some((i, j))` for a difference word, `None` for the final step.
    pub pair: Option<(usize, usize)>,
    pub corrected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpolationOutcome {
    pub message: Vec<FieldElement>,
    pub quadratic_part: MultiPoly,
    pub decodes: Vec<StepDecode>,
}

impl Lrc3Code {
    pub fn build(
        inner: InnerCode,
        pairs: PairSet,
        l: usize,
        case: Case,
        allow_uncovered: bool,
    ) -> Result<Self, Lrc3Error> {
        let field = inner.field();
        let q = field.modulus();
        if q < 5 {
            return Err(Lrc3Error::QTooSmall(q));
        }
        let max = q as usize - 3;
        let min = match case {
            Case::A => 1,
            Case::B => 0,
        };
        if l < min || l > max {
            return Err(Lrc3Error::LOutOfRange { l, min, max });
        }
        let affine = match inner.affine_extension() {
            Ok(a) => a,
            Err(InnerError::RankDeficient { .. }) | Err(InnerError::DuplicatePoints) => {
                return Err(Lrc3Error::AffineRankDeficient)
            }
            Err(e) => return Err(e.into()),
        };
        let sum_set = SumSet::new(inner.rows());
        let limit = match case {
            Case::A => inner.n(),
            Case::B => sum_set.len(),
        };
        if let Some(&(_, j)) = pairs.pairs().iter().find(|&&(_, j)| j >= limit) {
            return Err(PairError::IndexOutOfRange { index: j, n: limit }.into());
        }
        let mut es = EvaluationSet::new(field, inner.k());
        for p in sum_set.points() {
            es.insert(p.clone());
        }
        let params: Vec<FieldElement> = (0..l as u64 + 3).map(|t| field.elem(t)).collect();
        for &(i, j) in pairs.pairs() {
            let (base, dir) = match case {
                Case::A => (vec_add(inner.row(i), inner.row(i)), vec_sub(inner.row(j), inner.row(i))),
                Case::B => (
                    sum_set.points()[i].clone(),
                    vec_sub(&sum_set.points()[j], &sum_set.points()[i]),
                ),
            };
            if dir.iter().all(FieldElement::is_zero) {
                return Err(Lrc3Error::DegenerateDirection(i, j));
            }
            es.add_line(base, dir, params.clone(), (i, j));
        }
        if !allow_uncovered {
            if let Some(&n) = es.uncovered().first() {
                return Err(Lrc3Error::UncoveredIndex(n));
            }
        }
        Ok(Self {
            monomials: enumerate_monomials(inner.k(), 2, q as u32 - 1),
            inner,
            affine,
            pairs,
            l,
            case,
            allow_uncovered,
            sum_set,
            eval_set: es,
        })
    }

    pub fn inner(&self) -> &InnerCode {
        &self.inner
    }

    /// The inner code with a constant coordinate appended to every row.
    pub fn affine_code(&self) -> &InnerCode {
        &self.affine
    }

    pub fn pairs(&self) -> &PairSet {
        &self.pairs
    }

    pub fn extension_length(&self) -> usize {
        self.l
    }

    pub fn case(&self) -> Case {
        self.case
    }

    pub fn allow_uncovered(&self) -> bool {
        self.allow_uncovered
    }

    pub fn sum_set(&self) -> &SumSet {
        &self.sum_set
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// The data polynomial of message `b`.
    pub fn message_poly(&self, b: &[FieldElement]) -> MultiPoly {
        MultiPoly::from_terms(
            self.field(),
            self.inner.k(),
            self.monomials.iter().cloned().zip(b.iter().copied()),
        )
    }

    /// Message of a polynomial of degree at most 2.
    pub fn poly_message(&self, f: &MultiPoly) -> Vec<FieldElement> {
        self.monomials.iter().map(|m| f.coefficient(m)).collect()
    }

    pub fn repair(&self, failed: usize, available: &[Option<FieldElement>]) -> Result<LocalRepair, Lrc3Error> {
        Ok(repair::repair_node(self, failed, available)?)
    }

    pub fn cooperative_repair(
        &self,
        failed: &[usize],
        available: &[Option<FieldElement>],
    ) -> Result<CoopOutcome, Lrc3Error> {
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

    /// The pairs decoded in spanning mode: `(0, j)` for all `j`, then the
    /// remaining pairs lexicographically, keeping a pair only if its
    /// difference raises the rank; stops at rank `m`.
    pub fn spanning_schedule(&self) -> Result<Vec<(usize, usize)>, Lrc3Error> {
        let n = self.inner.n();
        let m = self.inner.k();
        let field = self.field();
        let all = PairSet::all(n);
        let candidates = (1..n)
            .map(|j| (0, j))
            .chain(all.pairs().iter().copied().filter(|&(i, _)| i > 0));
        let mut chosen = Vec::new();
        let mut dirs: Vec<Vec<FieldElement>> = Vec::new();
        for (i, j) in candidates {
            dirs.push(vec_sub(self.inner.row(i), self.inner.row(j)));
            if vectors_rank(field, m, &dirs) == dirs.len() {
                chosen.push((i, j));
                if chosen.len() == m {
                    return Ok(chosen);
                }
            } else {
                dirs.pop();
            }
        }
        Err(Lrc3Error::NoSpanningDirections)
    }

    pub fn schedule(&self, mode: Schedule) -> Result<Vec<(usize, usize)>, Lrc3Error> {
        match mode {
            Schedule::Spanning => self.spanning_schedule(),
            Schedule::AllPairs => Ok(PairSet::all(self.inner.n()).pairs().to_vec()),
        }
    }

    /// Difference word `y[T(i)] - y[T(j)]`; erased where either side is.
    pub fn difference_word(&self, received: &[Option<FieldElement>], i: usize, j: usize) -> Vec<Option<FieldElement>> {
        let (ti, tj) = (self.sum_set.view(i), self.sum_set.view(j));
        (0..self.inner.n())
            .map(|k| Some(received[ti[k]]? - received[tj[k]]?))
            .collect()
    }

    /// Interpolating decoder. `received` holds the sumset block (the first
    /// `|S2|` symbols), with `None` for erasures.
    pub fn decode_interpolating(
        &self,
        received: &[Option<FieldElement>],
        mode: Schedule,
    ) -> Result<InterpolationOutcome, Lrc3Error> {
        let s2 = self.sum_set.len();
        if received.len() != s2 && received.len() != self.len() {
            return Err(Lrc3Error::LengthMismatch {
                expected: s2,
                got: received.len(),
            });
        }
        let received = &received[..s2];
        let field = self.field();
        let m = self.inner.k();
        let n = self.inner.n();
        let fail = |what: String| Lrc3Error::DecodingFailure(what);

        // Linear part of each difference g_ij(x) = f(x + a_i) - f(x + a_j).
        let mut decodes = Vec::new();
        let mut dirs = Vec::new();
        let mut grads = Vec::new();
        for (i, j) in self.schedule(mode)? {
            match self.affine.decode(&self.difference_word(received, i, j)) {
                Ok(d) => {
                    dirs.push(vec_sub(self.inner.row(i), self.inner.row(j)));
                    grads.push(d.message[..m].to_vec());
                    decodes.push(StepDecode {
                        pair: Some((i, j)),
                        corrected: d.corrected,
                    });
                }
                Err(e) if mode == Schedule::Spanning => return Err(fail(format!("pair ({i}, {j}): {e}"))),
                Err(_) => {}
            }
        }

        // grads = dirs * P where row k of P holds the coefficients of
        // the linear form df2/dx_k.
        let d = Matrix::from_rows(field, m, &dirs).map_err(|e| fail(e.to_string()))?;
        if d.rank() < m {
            return Err(Lrc3Error::NoSpanningDirections);
        }
        let mut p_cols = Vec::with_capacity(m);
        for c in 0..m {
            let col: Vec<FieldElement> = grads.iter().map(|g| g[c]).collect();
            let sol = d
                .solve(&col)
                .map_err(|_| fail("directional derivatives are inconsistent".into()))?;
            p_cols.push(sol.particular);
        }
        let partials: Vec<MultiPoly> = (0..m)
            .map(|k| {
                let coeffs: Vec<FieldElement> = (0..m).map(|c| p_cols[c][k]).collect();
                MultiPoly::linear_form(field, &coeffs)
            })
            .collect();
        let f2 = MultiPoly::from_gradient(&partials, 2).map_err(|e| fail(e.to_string()))?;

        // xi(a_k) = f(a_k + a_0) - f2(a_k + a_0) is affine in a_k.
        let t0 = self.sum_set.view(0);
        let rest: Vec<Option<FieldElement>> = (0..n)
            .map(|k| {
                let p = &self.sum_set.points()[t0[k]];
                received[t0[k]].map(|y| y - f2.evaluate(p).expect("arity"))
            })
            .collect();
        let xi = self
            .affine
            .decode(&rest)
            .map_err(|e| fail(format!("final step: {e}")))?;
        decodes.push(StepDecode {
            pair: None,
            corrected: xi.corrected,
        });
        let c = &xi.message[..m];
        let c0 = xi.message[m] - crate::gf::dot(c, self.inner.row(0));
        let f = &(&f2 + &MultiPoly::linear_form(field, c)) + &MultiPoly::constant(field, m, c0);
        Ok(InterpolationOutcome {
            message: self.poly_message(&f),
            quadratic_part: f2,
            decodes,
        })
    }

    /// For each affine decode the interpolating decoder performs on `received`, the number of
    /// symbols differing from the same decode applied to `codeword`, and the
    /// decoding radius. Decoding succeeds whenever every count is within its
    /// radius.
    pub fn error_budget(
        &self,
        received: &[Option<FieldElement>],
        codeword: &[FieldElement],
        mode: Schedule,
    ) -> Result<Vec<DecodeBudget>, Lrc3Error> {
        let clean: Vec<Option<FieldElement>> = codeword.iter().map(|&x| Some(x)).collect();
        let budget = |pair, got: Vec<Option<FieldElement>>, want: Vec<Option<FieldElement>>| {
            let erasures = got.iter().filter(|x| x.is_none()).count();
            DecodeBudget {
                pair,
                errors: got.iter().zip(&want).filter(|(g, w)| g.is_some() && g != w).count(),
                radius: self.affine.radius(erasures),
            }
        };
        let mut out = Vec::new();
        for (i, j) in self.schedule(mode)? {
            out.push(budget(
                Some((i, j)),
                self.difference_word(received, i, j),
                self.difference_word(&clean, i, j),
            ));
        }
        let t0 = self.sum_set.view(0);
        out.push(budget(
            None,
            t0.iter().map(|&p| received[p]).collect(),
            t0.iter().map(|&p| clean[p]).collect(),
        ));
        Ok(out)
    }

    /// Rank of the evaluation matrix restricted to the sumset block.
    pub fn sumset_rank(&self) -> usize {
        let rows: Vec<Vec<FieldElement>> = (0..self.sum_set.len()).map(|n| self.eval_vector(n)).collect();
        vectors_rank(self.field(), self.dimension(), &rows)
    }

    /// Fraction of random erasure patterns of each size that still leave an
    /// information set, `trials` patterns per size.
    pub fn erasure_probe(&self, trials: usize, seed: u64) -> Vec<ErasureProbe> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.len();
        let zero = vec![Some(self.field().zero()); n];
        (1..=n - self.dimension())
            .map(|e| {
                let successes = (0..trials)
                    .filter(|_| {
                        let mut avail = zero.clone();
                        for i in sample(&mut rng, n, e) {
                            avail[i] = None;
                        }
                        repair::information_set_decode(self, &avail).is_ok()
                    })
                    .count();
                ErasureProbe {
                    erasures: e,
                    trials,
                    successes,
                }
            })
            .collect()
    }

    pub fn report(&self, probe_trials: usize, seed: u64) -> Lrc3Report {
        let n = self.inner.n() as u64;
        let s2 = self.sum_set.len() as u64;
        let k = self.dimension() as u64;
        let len = self.len() as u64;
        let epsilon = self.inner.profile().map(|p| p.epsilon);
        let tolerance = epsilon.map(|e| e * e / 18 * s2);
        let nominal_block = match self.case {
            Case::A => n * (n + 1) / 2,
            Case::B => s2,
        };
        Lrc3Report {
            kind: "locality3",
            case: self.case,
            q: self.field().modulus(),
            n_inner: self.inner.n(),
            m: self.inner.k(),
            l: self.l,
            pairs: self.pairs.len(),
            sumset_size: self.sum_set.len(),
            sumset_rank: self.sumset_rank(),
            length: self.len(),
            length_without_collisions: nominal_block as usize + self.pairs.len() * self.l,
            dimension: self.dimension(),
            rate: Ratio::new(k, len),
            locality: 3,
            inner_d_min: self.inner.profile().map(|p| p.d_min),
            affine_d_min: self.affine.profile().map(|p| p.d_min),
            epsilon,
            error_tolerance_claim: tolerance,
            distance_bound_from_tolerance: tolerance.map(|t| t * 2 + 1),
            distance_bound_claim: epsilon.map(|e| e * e / 9 * s2 + 1),
            rate_formula_case_a: epsilon.map(|e| {
                let w = Ratio::from_integer(1) - e * 2;
                w * w / (2 * self.l as u64)
            }),
            rate_formula_case_b: Ratio::new(k, n * n + n * n * (self.l as u64 + 1) / 2),
            erasure_probe: self.erasure_probe(probe_trials, seed),
        }
    }
}

impl LocalCode for Lrc3Code {
    fn eval_set(&self) -> &EvaluationSet {
        &self.eval_set
    }

    fn dimension(&self) -> usize {
        self.monomials.len()
    }

    fn line_degree(&self) -> usize {
        2
    }

    fn eval_vector(&self, node: usize) -> Vec<FieldElement> {
        let p = self.eval_set.point(node);
        self.monomials.iter().map(|m| m.evaluate(p)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeBudget {
    pub pair: Option<(usize, usize)>,
    pub errors: usize,
    pub radius: usize,
}

impl DecodeBudget {
    pub fn within(&self) -> bool {
        self.errors <= self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErasureProbe {
    pub erasures: usize,
    pub trials: usize,
    pub successes: usize,
}

fn ser_opt_ratio<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => ratio::serialize(r, s),
        None => s.serialize_none(),
    }
}

/// Parameters of a locality-3 code. The epsilon-based entries hold only for
/// inner codes meeting the noise-tolerant interpolation requirements; they
/// are reported, not verified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lrc3Report {
    pub kind: &'static str,
    pub case: Case,
    pub q: u64,
    pub n_inner: usize,
    pub m: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub pairs: usize,
    pub sumset_size: usize,
    pub sumset_rank: usize,
    pub length: usize,
    pub length_without_collisions: usize,
    pub dimension: usize,
    #[serde(with = "ratio")]
    pub rate: Rational,
    pub locality: usize,
    pub inner_d_min: Option<usize>,
    pub affine_d_min: Option<usize>,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub epsilon: Option<Rational>,
    /// `eps^2 / 18 * |S2|`.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub error_tolerance_claim: Option<Rational>,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub distance_bound_from_tolerance: Option<Rational>,
    /// `eps^2 / 9 * |S2| + 1`.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub distance_bound_claim: Option<Rational>,
    /// `(1 - 2 eps)^2 / (2L)`.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub rate_formula_case_a: Option<Rational>,
    /// `K / (N^2 + N^2 (L+1) / 2)`.
    #[serde(with = "ratio")]
    pub rate_formula_case_b: Rational,
    pub erasure_probe: Vec<ErasureProbe>,
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::gf::{dot, PrimeField};
    use crate::lincode::for_each_subset;
    use crate::rm::RmCode;
    use rand::Rng;

    pub(crate) fn toy3() -> Lrc3Code {
        let f7 = PrimeField::new(7).unwrap();
        let inner = InnerCode::scaled_mds(f7, 4, &f7.vector(&[1, 2, 3, 4, 5, 6])).unwrap();
        Lrc3Code::build(inner, PairSet::all(6), 1, Case::A, false).unwrap()
    }

    /// q = 11, N = 8, m = 4: the affine code is [8, 5, 4] and corrects one error.
    pub(crate) fn toy3_q11() -> Lrc3Code {
        let f11 = PrimeField::new(11).unwrap();
        let inner = InnerCode::scaled_mds(f11, 4, &f11.vector(&[1, 2, 3, 4, 5, 6, 7, 8])).unwrap();
        Lrc3Code::build(inner, PairSet::all(8), 1, Case::A, false).unwrap()
    }

    fn micro() -> Lrc3Code {
        let f7 = PrimeField::new(7).unwrap();
        let inner = InnerCode::from_u64_rows(f7, &[vec![1], vec![2]]).unwrap();
        Lrc3Code::build(inner, PairSet::all(2), 1, Case::A, false).unwrap()
    }

    fn random_message(code: &Lrc3Code, rng: &mut impl Rng) -> Vec<FieldElement> {
        let q = code.field().modulus();
        (0..code.dimension())
            .map(|_| code.field().elem(rng.random_range(0..q)))
            .collect()
    }

    fn some(word: &[FieldElement]) -> Vec<Option<FieldElement>> {
        word.iter().map(|&x| Some(x)).collect()
    }

    #[test]
    fn toy3_shape() {
        let c = toy3();
        assert_eq!(c.dimension(), 15);
        assert_eq!(c.sum_set().len(), 21);
        assert_eq!(c.sumset_rank(), 15);
        assert!(c.len() <= 21 + 15);
        for i in 0..6 {
            assert_eq!(c.sum_set().view(i).len(), 6);
            let twice = vec_add(c.inner().row(i), c.inner().row(i));
            assert!(c.eval_set().index_of(&twice).is_some());
        }
        for line in c.eval_set().lines() {
            assert_eq!(line.nodes.len(), 4);
            assert!(line.nodes[..3].iter().all(|&n| n < 21));
        }
        assert!(c.eval_set().uncovered().is_empty());
    }

    #[test]
    fn plain_vandermonde_rows_are_rejected() {
        let f7 = PrimeField::new(7).unwrap();
        let inner = InnerCode::mds(f7, 4, &f7.vector(&[1, 2, 3, 4, 5, 6])).unwrap();
        assert_eq!(
            Lrc3Code::build(inner, PairSet::all(6), 1, Case::A, false),
            Err(Lrc3Error::AffineRankDeficient)
        );
    }

    #[test]
    fn build_errors() {
        let f3 = PrimeField::new(3).unwrap();
        let inner = InnerCode::from_u64_rows(f3, &[vec![1], vec![2]]).unwrap();
        assert_eq!(
            Lrc3Code::build(inner, PairSet::all(2), 1, Case::A, false),
            Err(Lrc3Error::QTooSmall(3))
        );
        let f7 = PrimeField::new(7).unwrap();
        let inner = InnerCode::from_u64_rows(f7, &[vec![1], vec![2]]).unwrap();
        assert_eq!(
            Lrc3Code::build(inner.clone(), PairSet::all(2), 5, Case::A, false),
            Err(Lrc3Error::LOutOfRange { l: 5, min: 1, max: 4 })
        );
    }

    #[test]
    fn micro_instance() {
        let c = micro();
        assert_eq!(c.sum_set().len(), 3);
        assert_eq!(c.len(), 4);
        assert_eq!(c.eval_set().lines().len(), 1);
        assert_eq!(c.eval_set().lines()[0].nodes, vec![0, 1, 2, 3]);
        let f7 = c.field();
        for b in 0..343u64 {
            let msg = f7.vector(&[b % 7, (b / 7) % 7, b / 49]);
            let word = c.encode(&msg).unwrap();
            for node in 0..4 {
                let peers: Vec<usize> = (0..4).filter(|&n| n != node).collect();
                for_each_subset(3, 3, |pick| {
                    let mut avail = vec![None; 4];
                    for &p in pick {
                        avail[peers[p]] = Some(word[peers[p]]);
                    }
                    assert_eq!(c.repair(node, &avail).unwrap().value, word[node]);
                    true
                });
            }
        }
    }

    #[test]
    fn encode_examples() {
        let f7 = PrimeField::new(7).unwrap();
        let inner = InnerCode::scaled_mds(f7, 2, &f7.vector(&[1, 2, 3])).unwrap();
        let c = Lrc3Code::build(inner, PairSet::all(3), 1, Case::A, false).unwrap();
        assert_eq!(c.dimension(), 6);
        let mut e0 = vec![f7.zero(); 6];
        e0[0] = f7.one();
        assert!(c.encode(&e0).unwrap().iter().all(|x| x.value() == 1));
        // monomial order: 1, x2, x2^2, x1, x1x2, x1^2
        let mut lin = vec![f7.zero(); 6];
        lin[3] = f7.elem(2);
        lin[1] = f7.elem(3);
        let w = c.encode(&lin).unwrap();
        for (n, p) in c.eval_set().points().iter().enumerate() {
            assert_eq!(w[n], dot(p, &f7.vector(&[2, 3])));
        }
        let toy = toy3();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = random_message(&toy, &mut rng);
        let f = toy.message_poly(&b);
        let w = toy.encode(&b).unwrap();
        for (n, p) in toy.eval_set().points().iter().enumerate() {
            assert_eq!(w[n], f.evaluate(p).unwrap());
        }
    }

    #[test]
    fn interpolation_round_trip_and_all_pairs_agree() {
        let c = toy3();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let b = random_message(&c, &mut rng);
            let word = c.encode(&b).unwrap();
            let a = c.decode_interpolating(&some(&word), Schedule::Spanning).unwrap();
            assert_eq!(a.message, b);
            assert_eq!(a.quadratic_part, c.message_poly(&b).homogeneous_component(2));
            assert_eq!(
                c.decode_interpolating(&some(&word[..21]), Schedule::AllPairs)
                    .unwrap()
                    .message,
                b
            );
        }
        let zero = vec![Some(c.field().zero()); c.len()];
        assert!(c
            .decode_interpolating(&zero, Schedule::Spanning)
            .unwrap()
            .message
            .iter()
            .all(FieldElement::is_zero));
    }

    #[test]
    fn step_one_words_match_translated_differences() {
        let c = toy3();
        let field = c.field();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = random_message(&c, &mut rng);
        let f = c.message_poly(&b);
        let word = some(&c.encode(&b).unwrap());
        let space = RmCode::new(field, 4, 0).unwrap();
        for (i, j) in c.spanning_schedule().unwrap() {
            let d = c.affine_code().decode(&c.difference_word(&word, i, j)).unwrap();
            let (ai, aj) = (c.inner().row(i), c.inner().row(j));
            for x in space.points().iter().step_by(17) {
                let want = f.evaluate(&vec_add(x, ai)).unwrap() - f.evaluate(&vec_add(x, aj)).unwrap();
                let got = dot(&d.message[..4], x) + d.message[4];
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn schedule_is_spanning_and_starts_from_first_row() {
        let c = toy3();
        let s = c.spanning_schedule().unwrap();
        assert_eq!(s, vec![(0, 1), (0, 2), (0, 3), (0, 4)]);
    }

    #[test]
    fn repair_toy3_sampled() {
        let c = toy3();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let b = random_message(&c, &mut rng);
            let word = c.encode(&b).unwrap();
            let node = rng.random_range(0..c.len());
            let mut avail = some(&word);
            avail[node] = None;
            let r = c.repair(node, &avail).unwrap();
            assert_eq!(r.value, word[node]);
            assert_eq!(r.contacts.len(), 3);
        }
    }

    #[test]
    fn repair_with_degenerate_degree() {
        let c = toy3();
        let f7 = c.field();
        let mut b = vec![f7.zero(); 15];
        b[0] = f7.elem(3);
        b[1] = f7.elem(5);
        let word = c.encode(&b).unwrap();
        let mut avail = some(&word);
        avail[7] = None;
        assert_eq!(c.repair(7, &avail).unwrap().value, word[7]);
    }

    #[test]
    fn repair_needs_three_survivors() {
        let c = micro();
        let word = c.encode(&c.field().vector(&[1, 2, 3])).unwrap();
        let avail = vec![None, Some(word[1]), Some(word[2]), None];
        assert_eq!(
            c.repair(0, &avail),
            Err(Lrc3Error::Repair(RepairError::NoRepairGroup(0)))
        );
    }

    #[test]
    fn weight_four_witness_per_node() {
        let c = toy3();
        let field = c.field();
        let rm = RmCode::new(field, 4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for node in 0..c.len() {
            let line = &c.eval_set().lines()[c.eval_set().lines_through(node)[0]];
            let mut group = vec![node];
            group.extend(line.nodes.iter().copied().filter(|&n| n != node).take(3));
            let pts: Vec<Vec<FieldElement>> = group.iter().map(|&n| c.eval_set().point(n).to_vec()).collect();
            let g = rm.min_weight_dual_codeword(&pts, None).unwrap();
            let shortened: Vec<FieldElement> = c.eval_set().points().iter().map(|p| g.evaluate(p)).collect();
            let support: Vec<usize> = (0..c.len()).filter(|&i| !shortened[i].is_zero()).collect();
            group.sort_unstable();
            assert_eq!(support, group);
            for _ in 0..20 {
                let b = random_message(&c, &mut rng);
                assert!(dot(&shortened, &c.encode(&b).unwrap()).is_zero());
            }
        }
    }

    #[test]
    fn report_toy3() {
        let c = toy3();
        let r = c.report(2, 1);
        assert_eq!((r.dimension, r.sumset_size), (15, 21));
        assert_eq!(r.rate, Ratio::new(15, r.length as u64));
        assert_eq!(r.epsilon, Some(Ratio::new(1, 6)));
        assert_eq!(r.error_tolerance_claim, Some(Ratio::new(21, 648)));
        assert_eq!(r.distance_bound_claim, Some(Ratio::new(21, 324) + 1));
        assert_eq!(r.rate_formula_case_b, Ratio::new(15, 72));
        assert_eq!(r.affine_d_min, Some(2));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["error_tolerance_claim"], "7/216");
        assert_eq!(json["case"], "A");
    }

    #[test]
    fn case_b_lines() {
        let f7 = PrimeField::new(7).unwrap();
        let inner = InnerCode::scaled_mds(f7, 2, &f7.vector(&[1, 2, 3])).unwrap();
        let s2 = SumSet::new(inner.rows()).len();
        let pairs = PairSet::chain(s2);
        let c = Lrc3Code::build(inner, pairs, 2, Case::B, false).unwrap();
        for line in c.eval_set().lines() {
            assert_eq!(line.params.len(), 5);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let b = random_message(&c, &mut rng);
            let word = c.encode(&b).unwrap();
            let node = rng.random_range(0..c.len());
            let mut avail = some(&word);
            avail[node] = None;
            assert_eq!(c.repair(node, &avail).unwrap().value, word[node]);
        }
    }

    #[test]
    fn single_errors_within_budget_are_corrected() {
        let c = toy3_q11();
        assert_eq!(c.affine_code().profile().unwrap().d_min, 4);
        assert_eq!(c.sumset_rank(), 15);
        let s2 = c.sum_set().len();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let b = random_message(&c, &mut rng);
        let word = c.encode(&b).unwrap();
        let mut corrected = 0;
        for p in 0..s2 {
            let mut y = some(&word[..s2]);
            y[p] = Some(word[p] + c.field().one());
            let budget = c.error_budget(&y, &word[..s2], Schedule::Spanning).unwrap();
            let out = c.decode_interpolating(&y, Schedule::Spanning);
            if budget.iter().all(DecodeBudget::within) {
                assert_eq!(out.unwrap().message, b, "error at {p}");
                corrected += 1;
            }
        }
        // a_0 + a_t for a scheduled pair (0, t) puts two errors in one word
        assert_eq!(s2, 36);
        assert_eq!(corrected, s2 - 4);
    }

    #[test]
    fn erasures_in_sumset_block() {
        let c = toy3_q11();
        let s2 = c.sum_set().len();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let b = random_message(&c, &mut rng);
        let word = c.encode(&b).unwrap();
        for p in 0..s2 {
            let mut y = some(&word[..s2]);
            y[p] = None;
            let budget = c.error_budget(&y, &word[..s2], Schedule::AllPairs).unwrap();
            assert!(budget.iter().all(DecodeBudget::within));
            assert_eq!(c.decode_interpolating(&y, Schedule::AllPairs).unwrap().message, b);
        }
    }
}
