//! Generalized Reed-Muller codes `RM_q(u, m)`: evaluations over all of
//! F_q^m of reduced polynomials (every exponent at most `q - 1`) of total
//! degree at most `u`.
//!
//! Points of F_q^m are indexed lexicographically: index `i` has base-`q`
//! digits `(p_1, ..., p_m)` with `p_1` most significant.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{param_along, support_is_collinear, Line};
use crate::gf::{vec_sub, FieldElement, PrimeField};
use crate::guard::TooLarge;
use crate::lincode;
use crate::matrix::{complete_to_basis, complete_to_basis_random, Matrix, MatrixError};
use crate::mpoly::{enumerate_monomials, Monomial, MultiPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RmError {
    #[error("degree bound {u} outside 0..={max}")]
    DegreeOutOfRange { u: u32, max: u32 },
    #[error("need at least one variable")]
    NoVariables,
    #[error("polynomial of degree {degree} exceeds the bound {u}")]
    DegreeTooHigh { degree: u32, u: u32 },
    #[error("polynomial has an exponent above q - 1; normalize it first")]
    NotReduced,
    #[error("polynomial has {got} variables, code has {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("expected {expected} points, got {got}")]
    WrongPointCount { expected: usize, got: usize },
    #[error("points are not distinct")]
    DuplicatePoints,
    #[error("points are not collinear")]
    NotCollinear,
    #[error("dual codewords on lines need u <= q - 2, got u = {0}")]
    UnsupportedDegree(u32),
    #[error(transparent)]
    TooLarge(#[from] TooLarge),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceDecomposition {
    pub mu: u32,
    pub theta: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RmCode {
    field: PrimeField,
    num_vars: usize,
    degree_bound: u32,
}

impl RmCode {
    pub fn new(field: PrimeField, num_vars: usize, degree_bound: u32) -> Result<Self, RmError> {
        if num_vars == 0 {
            return Err(RmError::NoVariables);
        }
        let max = num_vars as u32 * (field.modulus() as u32 - 1);
        if degree_bound > max {
            return Err(RmError::DegreeOutOfRange { u: degree_bound, max });
        }
        Ok(Self {
            field,
            num_vars,
            degree_bound,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    fn q(&self) -> u64 {
        self.field.modulus()
    }

    pub fn length(&self) -> usize {
        (self.q() as usize).pow(self.num_vars as u32)
    }

    /// Basis monomials in lexicographic order.
    pub fn monomials(&self) -> Vec<Monomial> {
        enumerate_monomials(self.num_vars, self.degree_bound, self.q() as u32 - 1)
    }

    pub fn dimension(&self) -> usize {
        self.monomials().len()
    }

    /// `(q-1)m - u - 1`; negative when the code is the whole space.
    pub fn dual_degree(&self) -> i64 {
        (self.q() as i64 - 1) * self.num_vars as i64 - self.degree_bound as i64 - 1
    }

    /// The dual code `RM_q(u_perp, m)`, or `None` when it is the zero code.
    pub fn dual(&self) -> Option<RmCode> {
        u32::try_from(self.dual_degree()).ok().map(|d| RmCode {
            degree_bound: d,
            ..*self
        })
    }

    /// `u = mu (q-1) + theta`, with `theta = q - 1` only at `u = m(q-1)`.
    pub fn decomposition(&self) -> DistanceDecomposition {
        let step = self.q() as u32 - 1;
        let u = self.degree_bound;
        if u == self.num_vars as u32 * step {
            DistanceDecomposition {
                mu: self.num_vars as u32 - 1,
                theta: step,
            }
        } else {
            DistanceDecomposition {
                mu: u / step,
                theta: u % step,
            }
        }
    }

    /// `(q - theta) q^(m - mu - 1)`.
    pub fn min_distance(&self) -> u64 {
        let DistanceDecomposition { mu, theta } = self.decomposition();
        (self.q() - theta as u64) * self.q().pow(self.num_vars as u32 - mu - 1)
    }

    pub fn point(&self, index: usize) -> Vec<FieldElement> {
        let q = self.q() as usize;
        let mut digits = vec![self.field.zero(); self.num_vars];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = self.field.elem((rest % q) as u64);
            rest /= q;
        }
        digits
    }

    pub fn points(&self) -> Vec<Vec<FieldElement>> {
        (0..self.length()).map(|i| self.point(i)).collect()
    }

    pub fn point_index(&self, p: &[FieldElement]) -> usize {
        p.iter()
            .fold(0usize, |acc, x| acc * self.q() as usize + x.value() as usize)
    }

    pub fn encode(&self, f: &MultiPoly) -> Result<Vec<FieldElement>, RmError> {
        if f.num_vars() != self.num_vars {
            return Err(RmError::ArityMismatch {
                expected: self.num_vars,
                got: f.num_vars(),
            });
        }
        if f.max_exponent() as u64 >= self.q() {
            return Err(RmError::NotReduced);
        }
        if let Some(degree) = f.total_degree().filter(|&d| d > self.degree_bound) {
            return Err(RmError::DegreeTooHigh {
                degree,
                u: self.degree_bound,
            });
        }
        Ok(self
            .points()
            .iter()
            .map(|p| f.evaluate(p).expect("arity checked"))
            .collect())
    }

    /// Encodings of the basis monomials.
    pub fn generator_rows(&self) -> Vec<Vec<FieldElement>> {
        let points = self.points();
        self.monomials()
            .iter()
            .map(|m| points.iter().map(|p| m.evaluate(p)).collect())
            .collect()
    }

    /// Minimum weight by enumerating all `q^dim` codewords.
    pub fn bruteforce_min_distance(&self) -> Result<u64, RmError> {
        let d = lincode::min_distance(self.field, &self.generator_rows(), self.length())?;
        Ok(d.expect("dimension >= 1") as u64)
    }

    /// Minimum distance of the dual code, found as the smallest dependent
    /// set of generator-matrix columns. `None` if none has size `<= max_size`.
    pub fn bruteforce_dual_distance(&self, max_size: usize) -> Option<u64> {
        lincode::min_dependent_columns(self.field, &self.generator_rows(), self.length(), max_size).map(|d| d as u64)
    }

    /// Every codeword of weight exactly `min_distance()` with its support.
    pub fn enumerate_min_weight_words(&self) -> Result<Vec<SupportedWord>, RmError> {
        let d = self.min_distance() as usize;
        let mut out = Vec::new();
        let field = self.field;
        lincode::for_each_codeword(field, &self.generator_rows(), self.length(), |_, w| {
            let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] != 0).collect();
            if support.len() == d {
                out.push((w.iter().map(|&x| field.elem(x)).collect(), support));
            }
            true
        })?;
        Ok(out)
    }

    /// A dual codeword, i.e. a codeword of `RM_q(u_perp, m)`, whose support
    /// is exactly the `u + 2` given collinear points. `seed` randomizes the
    /// basis completion; `None` uses the greedy standard-basis completion.
    pub fn min_weight_dual_codeword(
        &self,
        line_points: &[Vec<FieldElement>],
        seed: Option<u64>,
    ) -> Result<DualWord, RmError> {
        let q = self.q();
        let u = self.degree_bound;
        if u as u64 + 2 > q {
            return Err(RmError::UnsupportedDegree(u));
        }
        let expected = u as usize + 2;
        if line_points.len() != expected {
            return Err(RmError::WrongPointCount {
                expected,
                got: line_points.len(),
            });
        }
        if let Some(p) = line_points.iter().find(|p| p.len() != self.num_vars) {
            return Err(RmError::ArityMismatch {
                expected: self.num_vars,
                got: p.len(),
            });
        }
        for (i, p) in line_points.iter().enumerate() {
            if line_points[..i].contains(p) {
                return Err(RmError::DuplicatePoints);
            }
        }
        if !support_is_collinear(line_points) {
            return Err(RmError::NotCollinear);
        }

        let field = self.field;
        let p1 = &line_points[0];
        // h is scaled so that t_1 = 1; then L (t_1 h) = e_m.
        let h = vec_sub(&line_points[1], p1);
        let ts: Vec<FieldElement> = line_points
            .iter()
            .map(|p| param_along(p1, &h, p).expect("collinear"))
            .collect();
        let m = self.num_vars;
        let basis = match seed {
            None => complete_to_basis(&h, m - 1)?,
            Some(s) => complete_to_basis_random(&h, m - 1, &mut ChaCha8Rng::seed_from_u64(s))?,
        };
        let l = basis.inverse()?;
        let omega = l.mul_vec(p1)?;
        let omega_hat = omega[m - 1];
        let excluded: Vec<FieldElement> = ts.iter().map(|&t| omega_hat + t).collect();
        let omega_tilde: Vec<FieldElement> = field.elements().filter(|w| !excluded.contains(w)).collect();
        debug_assert_eq!(omega_tilde.len(), (q - u as u64 - 2) as usize);
        Ok(DualWord {
            field,
            l,
            omega: omega[..m - 1].to_vec(),
            omega_tilde,
            omega0: field.one(),
            line: Line {
                base: p1.clone(),
                direction: h,
                params: ts,
            },
        })
    }

    pub fn report(&self, with_bruteforce: bool) -> RmReport {
        RmReport {
            q: self.q(),
            m: self.num_vars,
            u: self.degree_bound,
            length: self.length(),
            dimension: self.dimension(),
            d_min_formula: self.min_distance(),
            d_min_bruteforce: if with_bruteforce {
                self.bruteforce_min_distance().ok()
            } else {
                None
            },
        }
    }
}

/// A codeword with its support, ascending.
pub type SupportedWord = (Vec<FieldElement>, Vec<usize>);

/// `g(x) = omega0 * prod_{i<m} (1 - (l_i(x) - omega_i)^(q-1)) * prod_j (l_m(x) - omega_tilde_j)`
/// where `l_i(x) = (L x)_i`. Kept factored so it can be evaluated without
/// expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualWord {
    field: PrimeField,
    l: Matrix,
    omega: Vec<FieldElement>,
    omega_tilde: Vec<FieldElement>,
    omega0: FieldElement,
    line: Line,
}

impl DualWord {
    pub fn line(&self) -> &Line {
        &self.line
    }

    pub fn omega_tilde(&self) -> &[FieldElement] {
        &self.omega_tilde
    }

    pub fn l_matrix(&self) -> &Matrix {
        &self.l
    }

    /// Formal degree of the factored form, `(m-1)(q-1) + #omega_tilde`.
    pub fn degree(&self) -> u32 {
        let q = self.field.modulus() as u32;
        self.omega.len() as u32 * (q - 1) + self.omega_tilde.len() as u32
    }

    pub fn evaluate(&self, x: &[FieldElement]) -> FieldElement {
        let q = self.field.modulus();
        let lx = self.l.mul_vec(x).expect("point dimension");
        let m = lx.len();
        let mut acc = self.omega0;
        for (&li, &wi) in lx[..m - 1].iter().zip(&self.omega) {
            acc *= self.field.one() - (li - wi).pow(q - 1);
            if acc.is_zero() {
                return acc;
            }
        }
        for &w in &self.omega_tilde {
            acc *= lx[m - 1] - w;
        }
        acc
    }

    /// Evaluation over all points of F_q^m in lexicographic order.
    pub fn codeword(&self, code: &RmCode) -> Vec<FieldElement> {
        code.points().iter().map(|p| self.evaluate(p)).collect()
    }

    /// Expanded, normalized polynomial.
    pub fn to_multipoly(&self) -> MultiPoly {
        let field = self.field;
        let q = field.modulus();
        let m = self.l.rows();
        let ell = |i: usize| MultiPoly::linear_form(field, self.l.row(i));
        let one = MultiPoly::constant(field, m, field.one());
        let mut acc = MultiPoly::constant(field, m, self.omega0);
        for i in 0..m - 1 {
            let shifted = &ell(i) - &MultiPoly::constant(field, m, self.omega[i]);
            let mut pow = one.clone();
            for _ in 0..q - 1 {
                pow = (&pow * &shifted).normalize();
            }
            acc = (&acc * &(&one - &pow)).normalize();
        }
        let last = ell(m - 1);
        for &w in &self.omega_tilde {
            acc = (&acc * &(&last - &MultiPoly::constant(field, m, w))).normalize();
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RmReport {
    pub q: u64,
    pub m: usize,
    pub u: u32,
    pub length: usize,
    pub dimension: usize,
    pub d_min_formula: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_min_bruteforce: Option<u64>,
}

/// All lines of F_q^m, one per (direction class, coset), as the full list of
/// `q` points each. Directions are normalized so their first nonzero entry is 1.
pub fn all_lines(field: PrimeField, m: usize) -> Vec<Vec<Vec<FieldElement>>> {
    let space = RmCode {
        field,
        num_vars: m,
        degree_bound: 0,
    };
    let points = space.points();
    let mut seen = vec![false; points.len()];
    let mut lines = Vec::new();
    for dir in &points {
        let Some(lead) = dir.iter().find(|x| !x.is_zero()) else {
            continue;
        };
        if lead.value() != 1 {
            continue;
        }
        seen.iter_mut().for_each(|s| *s = false);
        for base in &points {
            if seen[space.point_index(base)] {
                continue;
            }
            let line: Vec<Vec<FieldElement>> = field.elements().map(|t| crate::gf::axpy(base, t, dir)).collect();
            for p in &line {
                seen[space.point_index(p)] = true;
            }
            lines.push(line);
        }
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::dot;
    use crate::lincode::for_each_subset;

    fn code(q: u64, m: usize, u: u32) -> RmCode {
        RmCode::new(PrimeField::new(q).unwrap(), m, u).unwrap()
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(code(3, 2, 1).dimension(), 3);
        assert_eq!(code(5, 2, 2).dimension(), 6);
        // reduced monomials of degree <= 2 in F_3[x1,x2]: 1,x2,x2^2,x1,x1x2,x1^2
        assert_eq!(code(3, 2, 2).dimension(), 6);
        for (q, m, u) in [(3, 2, 1), (5, 2, 2), (3, 2, 3), (5, 1, 2)] {
            let c = code(q, m, u);
            assert_eq!(c.dimension() + c.dual().unwrap().dimension(), c.length());
        }
    }

    #[test]
    fn dual_degree_examples() {
        assert_eq!(code(5, 2, 1).dual_degree(), 6);
        assert_eq!(code(3, 2, 1).dual_degree(), 2);
        assert_eq!(code(3, 1, 1).dual_degree(), 0);
        assert_eq!(code(3, 1, 2).dual(), None);
    }

    #[test]
    fn distance_examples() {
        let c = code(3, 2, 1);
        assert_eq!(c.decomposition(), DistanceDecomposition { mu: 0, theta: 1 });
        assert_eq!(c.min_distance(), 6);
        assert_eq!(code(3, 2, 2).decomposition(), DistanceDecomposition { mu: 1, theta: 0 });
        assert_eq!(code(3, 2, 2).min_distance(), 3);
        assert_eq!(code(5, 2, 1).min_distance(), 20);
        assert_eq!(code(3, 2, 4).min_distance(), 1);
    }

    #[test]
    fn bruteforce_agrees_with_formula() {
        for q in [3, 5] {
            for m in 1..=2 {
                for u in 0..=(m as u32 * (q as u32 - 1)) {
                    let c = code(q, m, u);
                    if c.dimension() > 8 {
                        continue;
                    }
                    assert_eq!(
                        c.bruteforce_min_distance().unwrap(),
                        c.min_distance(),
                        "q={q} m={m} u={u}"
                    );
                }
            }
        }
    }

    #[test]
    fn encode_examples() {
        let f3 = PrimeField::new(3).unwrap();
        let c1 = code(3, 1, 1);
        assert_eq!(c1.encode(&MultiPoly::var(f3, 1, 0)).unwrap(), f3.vector(&[0, 1, 2]));
        assert!(c1
            .encode(&MultiPoly::zero(f3, 1))
            .unwrap()
            .iter()
            .all(FieldElement::is_zero));
        let f5 = PrimeField::new(5).unwrap();
        let g = MultiPoly::parse(f5, 2, "2*x1 + 3*x2").unwrap();
        let w = code(5, 2, 1).encode(&g).unwrap();
        assert_eq!(w.iter().filter(|x| !x.is_zero()).count(), 20);
        let sq = MultiPoly::parse(f5, 2, "x1^2").unwrap();
        assert_eq!(
            code(5, 2, 1).encode(&sq),
            Err(RmError::DegreeTooHigh { degree: 2, u: 1 })
        );
        let high = MultiPoly::parse(f3, 1, "x1^3").unwrap();
        assert_eq!(code(3, 1, 2).encode(&high), Err(RmError::NotReduced));
    }

    #[test]
    fn point_order_is_lexicographic() {
        let c = code(3, 2, 1);
        let f3 = c.field();
        assert_eq!(c.point(0), f3.vector(&[0, 0]));
        assert_eq!(c.point(1), f3.vector(&[0, 1]));
        assert_eq!(c.point(3), f3.vector(&[1, 0]));
        for i in 0..c.length() {
            assert_eq!(c.point_index(&c.point(i)), i);
        }
    }

    #[test]
    fn line_enumeration_counts() {
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(all_lines(f3, 2).len(), 12);
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(all_lines(f5, 2).len(), 30);
        assert_eq!(all_lines(f3, 3).len(), 117);
    }

    fn check_dual_word(c: &RmCode, pts: &[Vec<FieldElement>], seed: Option<u64>) {
        let g = c.min_weight_dual_codeword(pts, seed).unwrap();
        let word = g.codeword(c);
        let support: Vec<Vec<FieldElement>> = (0..c.length())
            .filter(|&i| !word[i].is_zero())
            .map(|i| c.point(i))
            .collect();
        let mut want = pts.to_vec();
        want.sort_by_key(|p| c.point_index(p));
        assert_eq!(support, want);
        for row in c.generator_rows() {
            assert!(dot(&row, &word).is_zero());
        }
        assert_eq!(g.degree() as i64, c.dual_degree());
    }

    #[test]
    fn dual_word_examples() {
        let c = code(3, 2, 1);
        let f3 = c.field();
        let pts: Vec<_> = [[0, 0], [1, 1], [2, 2]].iter().map(|p| f3.vector(p)).collect();
        check_dual_word(&c, &pts, None);

        let c5 = code(5, 2, 1);
        let f5 = c5.field();
        let pts: Vec<_> = [[1, 0], [0, 1], [4, 2]].iter().map(|p| f5.vector(p)).collect();
        check_dual_word(&c5, &pts, None);
        check_dual_word(&c5, &pts, Some(3));

        let c52 = code(5, 2, 2);
        let pts: Vec<_> = [[0, 1], [1, 3], [2, 0], [4, 4]].iter().map(|p| f5.vector(p)).collect();
        check_dual_word(&c52, &pts, None);
    }

    #[test]
    fn dual_word_errors() {
        let c = code(3, 2, 1);
        let f3 = c.field();
        let bad: Vec<_> = [[0, 0], [1, 0], [0, 1]].iter().map(|p| f3.vector(p)).collect();
        assert_eq!(
            c.min_weight_dual_codeword(&bad, None).unwrap_err(),
            RmError::NotCollinear
        );
        assert_eq!(
            c.min_weight_dual_codeword(&bad[..2], None).unwrap_err(),
            RmError::WrongPointCount { expected: 3, got: 2 }
        );
        let dup = vec![f3.vector(&[0, 0]), f3.vector(&[0, 0]), f3.vector(&[1, 1])];
        assert_eq!(
            c.min_weight_dual_codeword(&dup, None).unwrap_err(),
            RmError::DuplicatePoints
        );
        assert_eq!(
            code(3, 2, 2).min_weight_dual_codeword(&bad, None).unwrap_err(),
            RmError::UnsupportedDegree(2)
        );
    }

    #[test]
    fn expanded_form_matches_factored_form() {
        for (q, m, u) in [(3, 2, 1), (5, 2, 1), (5, 2, 2), (5, 3, 1), (3, 3, 1)] {
            let c = code(q, m, u);
            let dual = c.dual().unwrap();
            for (k, line) in all_lines(c.field(), m).iter().enumerate().step_by(7) {
                let g = c
                    .min_weight_dual_codeword(&line[..u as usize + 2], Some(k as u64))
                    .unwrap();
                let poly = g.to_multipoly();
                assert!(poly.total_degree().unwrap() as i64 <= c.dual_degree());
                assert_eq!(dual.encode(&poly).unwrap(), g.codeword(&c));
            }
        }
    }

    #[test]
    fn every_point_subset_of_every_line_has_a_dual_word() {
        let c = code(5, 2, 2);
        for line in all_lines(c.field(), 2) {
            for_each_subset(5, 4, |idx| {
                let pts: Vec<_> = idx.iter().map(|&i| line[i].clone()).collect();
                check_dual_word(&c, &pts, None);
                true
            });
        }
    }

    #[test]
    fn min_weight_dual_supports_are_collinear() {
        let c = code(3, 2, 1).dual().unwrap();
        let words = c.enumerate_min_weight_words().unwrap();
        // 12 lines, each carrying 2 nonzero scalings of its unique word.
        assert_eq!(words.len(), 24);
        for (_, support) in words {
            let pts: Vec<_> = support.iter().map(|&i| c.point(i)).collect();
            assert!(support_is_collinear(&pts));
        }
    }

    #[test]
    fn dual_distance_is_u_plus_two() {
        for (q, m, u) in [(3, 1, 1), (3, 2, 1), (5, 1, 1), (5, 2, 1), (5, 2, 2), (5, 1, 3)] {
            let c = code(q, m, u);
            assert_eq!(c.bruteforce_dual_distance(u as usize + 2), Some(u as u64 + 2));
            assert_eq!(c.dual().unwrap().min_distance(), u as u64 + 2);
        }
    }

    #[test]
    fn report_json_shape() {
        let r = code(3, 2, 1).report(true);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"q":3,"m":2,"u":1,"length":9,"dimension":3,"d_min_formula":6,"d_min_bruteforce":6})
        );
        assert!(serde_json::to_value(code(3, 2, 1).report(false))
            .unwrap()
            .get("d_min_bruteforce")
            .is_none());
    }
}
