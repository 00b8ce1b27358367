//! Auxiliary `[N, m]` linear codes whose generator-matrix rows `a_i` seed the
//! evaluation sets. Codeword of message `b` is `(<a_1, b>, ..., <a_N, b>)`.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{dot, values, FieldElement, PrimeField};
use crate::guard::{self, TooLarge};
use crate::lincode;
use crate::matrix::{vectors_rank, Matrix, MatrixError};
use crate::ratio::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InnerError {
    #[error("{n} evaluation points requested but the field has only {q} elements")]
    TooManyPoints { n: usize, q: u64 },
    #[error("row points are not distinct")]
    DuplicatePoints,
    #[error("zero is not allowed as an evaluation point here")]
    ZeroPoint,
    #[error("rows have rank {rank}, need {k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("row {index} has length {got}, expected {expected}")]
    RowLength { index: usize, expected: usize, got: usize },
    #[error("code has dimension zero")]
    EmptyCode,
    #[error("no linearly dependent set of rows exists")]
    NoDualWord,
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),
    #[error("no code passed the checks in {0} trials")]
    NotFound(usize),
    #[error("decoding failed: {0}")]
    DecodingFailure(String),
    #[error("received word has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("stored profile does not match the rows")]
    ProfileMismatch,
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeProfile {
    pub d_min: usize,
    /// `None` when no set of rows is dependent.
    pub d_dual: Option<usize>,
    pub max_weight: usize,
    /// `(d_min - 1) / (2N)`.
    #[serde(with = "ratio")]
    pub epsilon: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightProfile {
    pub d_min: usize,
    pub max_weight: usize,
    pub distribution: Vec<u64>,
}

/// Which of the structural requirements a profile meets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NisCheck {
    pub positive_epsilon: bool,
    pub max_weight_window: bool,
    pub dual_distance: bool,
}

impl NisCheck {
    pub fn passes(&self) -> bool {
        self.positive_epsilon && self.max_weight_window && self.dual_distance
    }
}

/// Result of a successful decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub message: Vec<FieldElement>,
    /// Unerased positions where the received symbol was wrong.
    pub corrected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerCode {
    field: PrimeField,
    n: usize,
    k: usize,
    rows: Vec<Vec<FieldElement>>,
    profile: Option<CodeProfile>,
}

impl InnerCode {
    /// Vandermonde rows `(1, a, ..., a^(k-1))`.
    pub fn mds(field: PrimeField, k: usize, points: &[FieldElement]) -> Result<Self, InnerError> {
        Self::vandermonde(field, k, points, 0)
    }

    /// Scaled Vandermonde rows `(a, a^2, ..., a^k)`; points must be nonzero.
    pub fn scaled_mds(field: PrimeField, k: usize, points: &[FieldElement]) -> Result<Self, InnerError> {
        if points.iter().any(FieldElement::is_zero) {
            return Err(InnerError::ZeroPoint);
        }
        Self::vandermonde(field, k, points, 1)
    }

    fn vandermonde(field: PrimeField, k: usize, points: &[FieldElement], first_power: u64) -> Result<Self, InnerError> {
        if points.len() as u64 > field.modulus() {
            return Err(InnerError::TooManyPoints {
                n: points.len(),
                q: field.modulus(),
            });
        }
        if has_duplicates(points) {
            return Err(InnerError::DuplicatePoints);
        }
        let rows = points
            .iter()
            .map(|&a| (0..k as u64).map(|e| a.pow(e + first_power)).collect())
            .collect();
        Self::explicit(field, rows)
    }

    /// Identity rows followed by rows `(1, a, ..., a^(k-1))` for each `a`.
    pub fn systematic(field: PrimeField, k: usize, parity_points: &[FieldElement]) -> Result<Self, InnerError> {
        let mut rows: Vec<Vec<FieldElement>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { field.one() } else { field.zero() })
                    .collect()
            })
            .collect();
        rows.extend(parity_points.iter().map(|&a| (0..k as u64).map(|e| a.pow(e)).collect()));
        Self::explicit(field, rows)
    }

    pub fn explicit(field: PrimeField, rows: Vec<Vec<FieldElement>>) -> Result<Self, InnerError> {
        let k = rows.first().map_or(0, Vec::len);
        if k == 0 {
            return Err(InnerError::EmptyCode);
        }
        if let Some((index, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(InnerError::RowLength {
                index,
                expected: k,
                got: r.len(),
            });
        }
        if has_duplicates(&rows) {
            return Err(InnerError::DuplicatePoints);
        }
        let rank = vectors_rank(field, k, &rows);
        if rank < k {
            return Err(InnerError::RankDeficient { rank, k });
        }
        let mut code = Self {
            field,
            n: rows.len(),
            k,
            rows,
            profile: None,
        };
        code.profile = code.compute_profile().ok();
        Ok(code)
    }

    pub fn from_u64_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self, InnerError> {
        Self::explicit(field, rows.iter().map(|r| field.vector(r)).collect())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.rows[i]
    }

    /// Brute-forced profile; `None` when the code is too large to enumerate.
    pub fn profile(&self) -> Option<&CodeProfile> {
        self.profile.as_ref()
    }

    /// The `k x N` matrix whose rows generate the code.
    fn generator_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.k).map(|j| self.rows.iter().map(|r| r[j]).collect()).collect()
    }

    pub fn encode(&self, b: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(b.len(), self.k, "message length");
        self.rows.iter().map(|r| dot(r, b)).collect()
    }

    pub fn weight_profile(&self) -> Result<WeightProfile, InnerError> {
        let distribution = lincode::weight_distribution(self.field, &self.generator_rows(), self.n)?;
        let d_min = (1..=self.n)
            .find(|&w| distribution[w] > 0)
            .ok_or(InnerError::EmptyCode)?;
        let max_weight = (1..=self.n).rev().find(|&w| distribution[w] > 0).unwrap_or(0);
        Ok(WeightProfile {
            d_min,
            max_weight,
            distribution,
        })
    }

    /// Size of the smallest linearly dependent set of rows.
    pub fn dual_min_distance(&self) -> Result<usize, InnerError> {
        lincode::min_dependent_columns(self.field, &self.generator_rows(), self.n, self.n).ok_or(InnerError::NoDualWord)
    }

    fn compute_profile(&self) -> Result<CodeProfile, InnerError> {
        let w = self.weight_profile()?;
        let d_dual = match self.dual_min_distance() {
            Ok(d) => Some(d),
            Err(InnerError::NoDualWord) => None,
            Err(e) => return Err(e),
        };
        Ok(CodeProfile {
            d_min: w.d_min,
            d_dual,
            max_weight: w.max_weight,
            epsilon: Ratio::new(w.d_min as u64 - 1, 2 * self.n as u64),
        })
    }

    /// Requirements on an inner code for noise-tolerant interpolation:
    /// `epsilon > 0`, every codeword weight below `(1 - 2 epsilon) N`, and
    /// dual distance at least 5.
    pub fn nis_check(profile: &CodeProfile, n: usize) -> NisCheck {
        NisCheck {
            positive_epsilon: profile.d_min >= 2,
            max_weight_window: profile.max_weight + profile.d_min < n + 1,
            dual_distance: profile.d_dual.is_none_or(|d| d >= 5),
        }
    }

    /// The `[N, k+1]` code with rows `(a_i, 1)`; its messages are affine
    /// functions `x -> <w, x> + c`, with `c` as the last coordinate.
    pub fn affine_extension(&self) -> Result<InnerCode, InnerError> {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut v = r.clone();
                v.push(self.field.one());
                v
            })
            .collect();
        Self::explicit(self.field, rows)
    }

    /// Default decoding radius with `erasures` erased symbols.
    pub fn radius(&self, erasures: usize) -> usize {
        self.profile
            .as_ref()
            .map_or(0, |p| (p.d_min.saturating_sub(1 + erasures)) / 2)
    }

    /// Bounded-distance decode at the default radius.
    pub fn decode(&self, received: &[Option<FieldElement>]) -> Result<Decoded, InnerError> {
        let erasures = received.iter().filter(|r| r.is_none()).count();
        self.decode_within(received, self.radius(erasures))
    }

    /// The unique nearest message among those whose codeword differs from
    /// `received` in at most `radius` unerased positions. Candidates come
    /// from solving on every complement of an error-support guess of size
    /// `<= radius`.
    pub fn decode_within(&self, received: &[Option<FieldElement>], radius: usize) -> Result<Decoded, InnerError> {
        if received.len() != self.n {
            return Err(InnerError::LengthMismatch {
                expected: self.n,
                got: received.len(),
            });
        }
        let known: Vec<usize> = (0..self.n).filter(|&i| received[i].is_some()).collect();
        let sym = |i: usize| received[i].expect("unerased");
        let mut candidates: Vec<Decoded> = Vec::new();
        for e in 0..=radius.min(known.len()) {
            lincode::for_each_subset(known.len(), e, |guess| {
                let keep: Vec<usize> = known
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !guess.contains(j))
                    .map(|(_, &i)| i)
                    .collect();
                let ys: Vec<FieldElement> = keep.iter().map(|&i| sym(i)).collect();
                if let Some(b) = self.solve_on(&keep, &ys) {
                    if !candidates.iter().any(|c| c.message == b) {
                        let word = self.encode(&b);
                        let corrected = known.iter().copied().filter(|&i| word[i] != sym(i)).collect();
                        candidates.push(Decoded { message: b, corrected });
                    }
                }
                true
            });
        }
        let Some(best) = candidates.iter().map(|c| c.corrected.len()).min() else {
            return Err(InnerError::DecodingFailure(format!(
                "no codeword within distance {radius}"
            )));
        };
        let mut nearest = candidates.into_iter().filter(|c| c.corrected.len() == best);
        let first = nearest.next().expect("nonempty");
        if nearest.next().is_some() {
            return Err(InnerError::DecodingFailure(format!(
                "more than one codeword at distance {best}"
            )));
        }
        Ok(first)
    }

    /// Unique solution of `<a_i, b> = y_i` over `positions`, if the rows
    /// there have full rank and the system is consistent.
    fn solve_on(&self, positions: &[usize], ys: &[FieldElement]) -> Option<Vec<FieldElement>> {
        if positions.len() < self.k {
            return None;
        }
        let rows: Vec<Vec<FieldElement>> = positions.iter().map(|&i| self.rows[i].clone()).collect();
        let a = Matrix::from_rows(self.field, self.k, &rows).ok()?;
        let sol = a.solve(ys).ok()?;
        sol.is_unique().then_some(sol.particular)
    }

    /// Nearest-codeword decoding by enumerating all `q^k` messages.
    pub fn decode_exhaustive(&self, received: &[Option<FieldElement>], radius: usize) -> Result<Decoded, InnerError> {
        if received.len() != self.n {
            return Err(InnerError::LengthMismatch {
                expected: self.n,
                got: received.len(),
            });
        }
        let recv: Vec<Option<u64>> = received.iter().map(|r| r.map(|x| x.value())).collect();
        let mut best: Option<(usize, Vec<u64>)> = None;
        let mut ties = 0;
        lincode::for_each_codeword(self.field, &self.generator_rows(), self.n, |msg, word| {
            let dist = recv
                .iter()
                .zip(word)
                .filter(|(r, w)| r.is_some_and(|r| r != **w))
                .count();
            match &best {
                Some((d, _)) if dist > *d => {}
                Some((d, _)) if dist == *d => ties += 1,
                _ => {
                    best = Some((dist, msg.to_vec()));
                    ties = 0;
                }
            }
            true
        })?;
        match best {
            Some((d, msg)) if d <= radius && ties == 0 => {
                let message = self.field.vector(&msg);
                let word = self.encode(&message);
                let corrected = (0..self.n)
                    .filter(|&i| received[i].is_some_and(|r| r != word[i]))
                    .collect();
                Ok(Decoded { message, corrected })
            }
            _ => Err(InnerError::DecodingFailure(format!(
                "no unique codeword within distance {radius}"
            ))),
        }
    }

    /// Random search for a code meeting [`InnerCode::nis_check`].
    pub fn search_nis_grade(
        field: PrimeField,
        n: usize,
        k: usize,
        trials: usize,
        seed: u64,
    ) -> Result<InnerCode, InnerError> {
        if k < 4 {
            return Err(InnerError::InfeasibleParameters(format!(
                "dual distance 5 needs every 4 rows independent, impossible in dimension {k}"
            )));
        }
        if n < k {
            return Err(InnerError::InfeasibleParameters(format!(
                "length {n} below dimension {k}"
            )));
        }
        guard::check(field.modulus(), k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = field.modulus();
        for _ in 0..trials {
            let rows: Vec<Vec<FieldElement>> = (0..n)
                .map(|_| (0..k).map(|_| field.elem(rng.random_range(0..q))).collect())
                .collect();
            let Ok(code) = Self::explicit(field, rows) else {
                continue;
            };
            if code.profile.as_ref().is_some_and(|p| Self::nis_check(p, n).passes()) {
                return Ok(code);
            }
        }
        Err(InnerError::NotFound(trials))
    }

    pub fn to_file(&self) -> InnerCodeFile {
        InnerCodeFile {
            q: self.field.modulus(),
            n: self.n,
            k: self.k,
            rows: self.rows.iter().map(|r| values(r)).collect(),
            profile: self.profile.clone(),
        }
    }

    /// Rebuild from a file, checking any stored profile against the rows.
    pub fn from_file(file: &InnerCodeFile) -> Result<InnerCode, crate::Error> {
        let field = PrimeField::new(file.q)?;
        let code = Self::from_u64_rows(field, &file.rows)?;
        if code.n != file.n || code.k != file.k {
            return Err(InnerError::LengthMismatch {
                expected: file.n,
                got: code.n,
            }
            .into());
        }
        if file.profile.is_some() && file.profile != code.profile {
            return Err(InnerError::ProfileMismatch.into());
        }
        Ok(code)
    }
}

fn has_duplicates<T: PartialEq>(items: &[T]) -> bool {
    items.iter().enumerate().any(|(i, x)| items[..i].contains(x))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerCodeFile {
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub rows: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<CodeProfile>,
}
