//! Multivariate and univariate polynomials over a prime field.
//!
//! Monomials are exponent vectors compared lexicographically left to right,
//! so the constant monomial sorts first. Exponents are formal: `x^q` is not
//! folded into `x` unless [`MultiPoly::normalize`] is called, because formal
//! derivatives of the two forms differ even though they agree on F_q^m.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::gf::{FieldElement, GfError, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("expected a vector of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable index {0} out of range for {1} variables")]
    VarOutOfRange(usize, usize),
    #[error("line direction is the zero vector")]
    ZeroDirection,
    #[error("interpolation abscissa {0} appears twice")]
    DuplicateAbscissa(u64),
    #[error("samples are not consistent with a polynomial of degree <= {0}")]
    InconsistentSamples(usize),
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("partials are not the gradient of a homogeneous degree-{0} polynomial")]
    InconsistentGradient(u32),
    #[error("degree {degree} is divisible by the characteristic {q}")]
    CharacteristicDividesDegree { degree: u32, q: u64 },
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn constant(num_vars: usize) -> Self {
        Self(vec![0; num_vars])
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Every exponent is at most `q - 2`.
    pub fn is_irreducible(&self, q: u64) -> bool {
        self.0.iter().all(|&e| (e as u64) + 2 <= q)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> FieldElement {
        let field = point[0].field();
        self.0
            .iter()
            .zip(point)
            .fold(field.one(), |acc, (&e, &x)| acc * x.pow(e as u64))
    }

    /// Fold exponents with `x^q = x` so that each is at most `q - 1`.
    pub fn reduced(&self, q: u64) -> Monomial {
        let q = q as u32;
        Monomial(
            self.0
                .iter()
                .map(|&e| if e >= q { (e - 1) % (q - 1) + 1 } else { e })
                .collect(),
        )
    }
}

/// All exponent vectors in `num_vars` variables with total degree at most
/// `max_degree` and every exponent at most `max_exponent`, in ascending
/// lexicographic order.
pub fn enumerate_monomials(num_vars: usize, max_degree: u32, max_exponent: u32) -> Vec<Monomial> {
    fn rec(prefix: &mut Vec<u32>, left: usize, budget: u32, cap: u32, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(Monomial(prefix.clone()));
            return;
        }
        for e in 0..=budget.min(cap) {
            prefix.push(e);
            rec(prefix, left - 1, budget - e, cap, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), num_vars, max_degree, max_exponent, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: PrimeField,
    num_vars: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl MultiPoly {
    pub fn zero(field: PrimeField, num_vars: usize) -> Self {
        Self {
            field,
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, num_vars: usize, c: FieldElement) -> Self {
        Self::from_terms(field, num_vars, [(Monomial::constant(num_vars), c)])
    }

    /// The variable `x_{i+1}` (0-based `i`).
    pub fn var(field: PrimeField, num_vars: usize, i: usize) -> Self {
        Self::from_terms(field, num_vars, [(Monomial::var(num_vars, i), field.one())])
    }

    /// `sum_i coeffs[i] * x_i`, no constant term.
    pub fn linear_form(field: PrimeField, coeffs: &[FieldElement]) -> Self {
        let m = coeffs.len();
        Self::from_terms(
            field,
            m,
            coeffs.iter().enumerate().map(|(i, &c)| (Monomial::var(m, i), c)),
        )
    }

    /// Sum the given terms, dropping zero coefficients.
    pub fn from_terms<I>(field: PrimeField, num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, FieldElement)>,
    {
        let mut p = Self::zero(field, num_vars);
        for (mono, c) in terms {
            assert_eq!(mono.num_vars(), num_vars, "monomial arity");
            p.add_term(mono, c);
        }
        p
    }

    fn add_term(&mut self, mono: Monomial, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mono: &Monomial) -> FieldElement {
        self.terms.get(mono).copied().unwrap_or(self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree of a term; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Largest exponent of any variable in any term.
    pub fn max_exponent(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.exponents().iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn is_irreducible(&self) -> bool {
        let q = self.field.modulus();
        self.terms.keys().all(|m| m.is_irreducible(q))
    }

    fn check_dim(&self, got: usize) -> Result<(), PolyError> {
        if got != self.num_vars {
            return Err(PolyError::DimensionMismatch {
                expected: self.num_vars,
                got,
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        self.check_dim(point.len())?;
        if let Some(e) = point.iter().find(|e| e.field() != self.field) {
            return Err(GfError::FieldMismatch(self.field.modulus(), e.field().modulus()).into());
        }
        if self.num_vars == 0 {
            return Ok(self.coefficient(&Monomial::constant(0)));
        }
        Ok(self
            .terms
            .iter()
            .fold(self.field.zero(), |acc, (m, &c)| acc + c * m.evaluate(point)))
    }

    pub fn scale(&self, s: FieldElement) -> Self {
        Self::from_terms(
            self.field,
            self.num_vars,
            self.terms.iter().map(|(m, &c)| (m.clone(), c * s)),
        )
    }

    /// Reduce every exponent `q - 1 + k` (k >= 1) to `k`. Evaluation on F_q^m
    /// is unchanged.
    pub fn normalize(&self) -> Self {
        let q = self.field.modulus();
        Self::from_terms(
            self.field,
            self.num_vars,
            self.terms.iter().map(|(m, &c)| (m.reduced(q), c)),
        )
    }

    /// Formal partial derivative with respect to variable `var` (0-based).
    pub fn partial_derivative(&self, var: usize) -> Result<Self, PolyError> {
        if var >= self.num_vars {
            return Err(PolyError::VarOutOfRange(var, self.num_vars));
        }
        Ok(Self::from_terms(
            self.field,
            self.num_vars,
            self.terms.iter().filter(|(m, _)| m.0[var] > 0).map(|(m, &c)| {
                let mut e = m.0.clone();
                let k = e[var];
                e[var] -= 1;
                (Monomial(e), c.scale(k as u64))
            }),
        ))
    }

    /// `sum_i a_i * df/dx_i`.
    pub fn directional_derivative(&self, a: &[FieldElement]) -> Result<Self, PolyError> {
        self.check_dim(a.len())?;
        let mut acc = Self::zero(self.field, self.num_vars);
        for (i, &ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            acc = &acc + &self.partial_derivative(i)?.scale(ai);
        }
        Ok(acc)
    }

    /// Sum of the terms of total degree exactly `d`.
    pub fn homogeneous_component(&self, d: u32) -> Self {
        Self::from_terms(
            self.field,
            self.num_vars,
            self.terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, &c)| (m.clone(), c)),
        )
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Recover a homogeneous degree-`d` polynomial from its partial
    /// derivatives via Euler's identity `d * f = sum_i x_i * df/dx_i`.
    pub fn from_gradient(partials: &[MultiPoly], d: u32) -> Result<Self, PolyError> {
        let first = partials.first().ok_or(PolyError::TooFewSamples { need: 1, got: 0 })?;
        let field = first.field;
        let m = partials.len();
        for p in partials {
            if p.num_vars != m {
                return Err(PolyError::DimensionMismatch {
                    expected: m,
                    got: p.num_vars,
                });
            }
            if p.field != field {
                return Err(GfError::FieldMismatch(field.modulus(), p.field.modulus()).into());
            }
        }
        let q = field.modulus();
        if (d as u64).is_multiple_of(q) {
            return Err(PolyError::CharacteristicDividesDegree { degree: d, q });
        }
        let mut euler = Self::zero(field, m);
        for (i, p) in partials.iter().enumerate() {
            euler = &euler + &(&Self::var(field, m, i) * p);
        }
        let f = euler.scale(field.elem(d as u64).inv()?);
        if !f.is_homogeneous(d) {
            return Err(PolyError::InconsistentGradient(d));
        }
        for (i, p) in partials.iter().enumerate() {
            if &f.partial_derivative(i)? != p {
                return Err(PolyError::InconsistentGradient(d));
            }
        }
        Ok(f)
    }

    /// `t -> f(base + t * dir)` as a univariate polynomial.
    pub fn restrict_to_line(&self, base: &[FieldElement], dir: &[FieldElement]) -> Result<UniPoly, PolyError> {
        self.check_dim(base.len())?;
        self.check_dim(dir.len())?;
        if dir.iter().all(FieldElement::is_zero) {
            return Err(PolyError::ZeroDirection);
        }
        let field = self.field;
        let max_e = self.max_exponent() as usize;
        // powers[i][e] = (base_i + t dir_i)^e
        let powers: Vec<Vec<UniPoly>> = base
            .iter()
            .zip(dir)
            .map(|(&b, &h)| {
                let lin = UniPoly::from_coeffs(field, vec![b, h]);
                let mut v = vec![UniPoly::constant(field, field.one())];
                for e in 1..=max_e {
                    let next = &v[e - 1] * &lin;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = UniPoly::zero(field);
        for (mono, &c) in &self.terms {
            let mut term = UniPoly::constant(field, c);
            for (i, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    term = &term * &powers[i][e as usize];
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Parse the textual form produced by `Display`, e.g. `3*x1^2*x2 + x3 + 4`.
    /// Variables are numbered from 1.
    pub fn parse(field: PrimeField, num_vars: usize, s: &str) -> Result<Self, PolyError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PolyError::Parse("empty input".into()));
        }
        let mut poly = Self::zero(field, num_vars);
        let mut sign = 1i64;
        let mut rest = s;
        let mut first = true;
        loop {
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = rest[..end].trim();
            if term.is_empty() {
                if !(first && end == 0) {
                    return Err(PolyError::Parse(format!("empty term in `{s}`")));
                }
            } else {
                let (mono, c) = parse_term(field, num_vars, term)?;
                poly.add_term(mono, if sign < 0 { -c } else { c });
            }
            first = false;
            if end == rest.len() {
                break;
            }
            sign = if rest.as_bytes()[end] == b'-' { -1 } else { 1 };
            rest = &rest[end + 1..];
        }
        Ok(poly)
    }
}

fn parse_term(field: PrimeField, num_vars: usize, term: &str) -> Result<(Monomial, FieldElement), PolyError> {
    let mut coeff = field.one();
    let mut exps = vec![0u32; num_vars];
    for factor in term.split('*') {
        let factor = factor.trim();
        if let Some(var) = factor.strip_prefix('x') {
            let (idx, exp) = match var.split_once('^') {
                Some((i, e)) => (i, e.trim().parse::<u32>().map_err(|e| PolyError::Parse(e.to_string()))?),
                None => (var, 1),
            };
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| PolyError::Parse(format!("bad variable `{factor}`")))?;
            if idx == 0 || idx > num_vars {
                return Err(PolyError::VarOutOfRange(idx.wrapping_sub(1), num_vars));
            }
            exps[idx - 1] += exp;
        } else {
            let c: u64 = factor
                .parse()
                .map_err(|_| PolyError::Parse(format!("bad factor `{factor}`")))?;
            coeff *= field.elem(c);
        }
    }
    Ok((Monomial(exps), coeff))
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let factors: Vec<String> = mono
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, e)
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if c.value() == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{c}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "polynomial arity");
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(-self.field.one())
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "polynomial arity");
        let mut acc: BTreeMap<Monomial, FieldElement> = BTreeMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &rhs.terms {
                let e = acc.entry(ma.mul(mb)).or_insert(self.field.zero());
                *e += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        MultiPoly {
            field: self.field,
            num_vars: self.num_vars,
            terms: acc,
        }
    }
}

/// Dense univariate polynomial; `coeffs[i]` multiplies `t^i`, with no
/// trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    field: PrimeField,
    coeffs: Vec<FieldElement>,
}

impl UniPoly {
    pub fn zero(field: PrimeField) -> Self {
        Self {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: PrimeField, c: FieldElement) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    pub fn from_coeffs(field: PrimeField, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        Self { field, coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn evaluate(&self, t: FieldElement) -> FieldElement {
        self.coeffs.iter().rev().fold(self.field.zero(), |acc, &c| acc * t + c)
    }

    pub fn scale(&self, s: FieldElement) -> Self {
        Self::from_coeffs(self.field, self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Lagrange interpolation through the first `deg_bound + 1` samples;
    /// any further samples must agree with the result.
    pub fn interpolate(samples: &[(FieldElement, FieldElement)], deg_bound: usize) -> Result<Self, PolyError> {
        let need = deg_bound + 1;
        if samples.len() < need {
            return Err(PolyError::TooFewSamples {
                need,
                got: samples.len(),
            });
        }
        for (i, (ti, _)) in samples.iter().enumerate() {
            if samples[..i].iter().any(|(tj, _)| tj == ti) {
                return Err(PolyError::DuplicateAbscissa(ti.value()));
            }
        }
        let field = samples[0].0.field();
        let base = &samples[..need];
        let mut acc = Self::zero(field);
        for (j, &(tj, yj)) in base.iter().enumerate() {
            let mut basis = Self::constant(field, field.one());
            let mut denom = field.one();
            for (k, &(tk, _)) in base.iter().enumerate() {
                if k == j {
                    continue;
                }
                basis = &basis * &Self::from_coeffs(field, vec![-tk, field.one()]);
                denom *= tj - tk;
            }
            acc = &acc + &basis.scale(yj * denom.inv()?);
        }
        if samples[need..].iter().any(|&(t, y)| acc.evaluate(t) != y) {
            return Err(PolyError::InconsistentSamples(deg_bound));
        }
        Ok(acc)
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;

    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = self.field.zero();
        let coeffs = (0..n)
            .map(|i| *self.coeffs.get(i).unwrap_or(&z) + *rhs.coeffs.get(i).unwrap_or(&z))
            .collect();
        UniPoly::from_coeffs(self.field, coeffs)
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;

    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(self.field, coeffs)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn p(q: u64, m: usize, s: &str) -> MultiPoly {
        MultiPoly::parse(f(q), m, s).unwrap()
    }

    pub(crate) fn random_poly(field: PrimeField, m: usize, deg: u32, rng: &mut impl Rng) -> MultiPoly {
        let cap = (field.modulus() - 1) as u32;
        MultiPoly::from_terms(
            field,
            m,
            enumerate_monomials(m, deg, cap)
                .into_iter()
                .map(|mono| (mono, field.elem(rng.random_range(0..field.modulus())))),
        )
    }

    #[test]
    fn evaluate_examples() {
        let field = f(5);
        assert_eq!(
            p(5, 2, "2*x1 + 3*x2").evaluate(&field.vector(&[1, 1])).unwrap().value(),
            0
        );
        assert!(MultiPoly::zero(field, 2)
            .evaluate(&field.vector(&[3, 4]))
            .unwrap()
            .is_zero());
        let f3 = f(3);
        assert_eq!(p(3, 2, "x1*x2 + 1").evaluate(&f3.vector(&[2, 2])).unwrap().value(), 2);
        assert_eq!(
            p(5, 2, "x1").evaluate(&field.vector(&[1])),
            Err(PolyError::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn partial_derivative_examples() {
        let g = p(5, 2, "x1^2 + x1*x2");
        assert_eq!(g.partial_derivative(0).unwrap(), p(5, 2, "2*x1 + x2"));
        assert!(p(5, 2, "x1^2").partial_derivative(1).unwrap().is_zero());
        assert!(p(5, 2, "3").partial_derivative(0).unwrap().is_zero());
        assert_eq!(g.partial_derivative(2), Err(PolyError::VarOutOfRange(2, 2)));
    }

    #[test]
    fn directional_derivative_examples() {
        let field = f(5);
        let g = p(5, 2, "x1^2 + x1*x2");
        assert_eq!(
            g.directional_derivative(&field.vector(&[1, 2])).unwrap(),
            p(5, 2, "4*x1 + x2")
        );
        assert!(g.directional_derivative(&field.vector(&[0, 0])).unwrap().is_zero());
        let lin = p(5, 2, "2*x1 + 3*x2");
        assert_eq!(
            lin.directional_derivative(&field.vector(&[4, 1])).unwrap(),
            MultiPoly::constant(field, 2, field.elem(2 * 4 + 3))
        );
    }

    #[test]
    fn homogeneous_component_examples() {
        let g = p(5, 2, "x1^2 + x2 + 1");
        assert_eq!(g.homogeneous_component(2), p(5, 2, "x1^2"));
        assert_eq!(g.homogeneous_component(0), p(5, 2, "1"));
        let h = p(5, 2, "x1^2 + 2*x1*x2");
        assert_eq!(h.homogeneous_component(2), h);
    }

    #[test]
    fn gradient_examples() {
        let partials = [p(5, 2, "2*x1 + x2"), p(5, 2, "x1")];
        let g = MultiPoly::from_gradient(&partials, 2).unwrap();
        assert_eq!(g, p(5, 2, "x1^2 + x1*x2"));

        let zeros = [MultiPoly::zero(f(5), 2), MultiPoly::zero(f(5), 2)];
        assert!(MultiPoly::from_gradient(&zeros, 2).unwrap().is_zero());

        let bad = [p(5, 2, "x2"), p(5, 2, "2*x1")];
        assert_eq!(
            MultiPoly::from_gradient(&bad, 2),
            Err(PolyError::InconsistentGradient(2))
        );

        let two = [p(2, 2, "x2"), p(2, 2, "x1")];
        assert_eq!(
            MultiPoly::from_gradient(&two, 2),
            Err(PolyError::CharacteristicDividesDegree { degree: 2, q: 2 })
        );
    }

    #[test]
    fn gradient_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for q in [5, 7, 11] {
            let field = f(q);
            for m in 1..=4 {
                for _ in 0..20 {
                    let g = random_poly(field, m, 2, &mut rng).homogeneous_component(2);
                    let partials: Vec<MultiPoly> = (0..m).map(|i| g.partial_derivative(i).unwrap()).collect();
                    assert_eq!(MultiPoly::from_gradient(&partials, 2).unwrap(), g);
                }
            }
        }
    }

    #[test]
    fn restrict_to_line_examples() {
        let field = f(5);
        let g = p(5, 2, "2*x1 + 3*x2")
            .restrict_to_line(&field.vector(&[1, 0]), &field.vector(&[4, 1]))
            .unwrap();
        assert_eq!(g, UniPoly::from_coeffs(field, field.vector(&[2, 1])));

        let c = p(5, 2, "3")
            .restrict_to_line(&field.vector(&[1, 2]), &field.vector(&[1, 1]))
            .unwrap();
        assert_eq!(c, UniPoly::constant(field, field.elem(3)));

        let sq = p(5, 2, "x1^2")
            .restrict_to_line(&field.vector(&[0, 0]), &field.vector(&[1, 0]))
            .unwrap();
        assert_eq!(sq, UniPoly::from_coeffs(field, field.vector(&[0, 0, 1])));

        assert_eq!(
            p(5, 2, "x1").restrict_to_line(&field.vector(&[0, 0]), &field.vector(&[0, 0])),
            Err(PolyError::ZeroDirection)
        );
    }

    #[test]
    fn interpolate_examples() {
        let field = f(5);
        let s = [(field.elem(1), field.elem(3)), (field.elem(2), field.elem(4))];
        assert_eq!(
            UniPoly::interpolate(&s, 1).unwrap(),
            UniPoly::from_coeffs(field, field.vector(&[2, 1]))
        );
        let c = [(field.elem(0), field.elem(4))];
        assert_eq!(
            UniPoly::interpolate(&c, 0).unwrap(),
            UniPoly::constant(field, field.elem(4))
        );

        let f7 = f(7);
        let sq: Vec<_> = [1u64, 3, 6].iter().map(|&t| (f7.elem(t), f7.elem(t * t))).collect();
        assert_eq!(
            UniPoly::interpolate(&sq, 2).unwrap(),
            UniPoly::from_coeffs(f7, f7.vector(&[0, 0, 1]))
        );

        let dup = [(field.elem(1), field.elem(3)), (field.elem(1), field.elem(4))];
        assert_eq!(UniPoly::interpolate(&dup, 1), Err(PolyError::DuplicateAbscissa(1)));
        let extra = [
            (field.elem(1), field.elem(3)),
            (field.elem(2), field.elem(4)),
            (field.elem(3), field.elem(1)),
        ];
        assert_eq!(UniPoly::interpolate(&extra, 1), Err(PolyError::InconsistentSamples(1)));
        assert_eq!(
            UniPoly::interpolate(&extra[..1], 1),
            Err(PolyError::TooFewSamples { need: 2, got: 1 })
        );
    }

    #[test]
    fn monomial_enumeration_order() {
        let ms = enumerate_monomials(2, 2, 3);
        let exps: Vec<Vec<u32>> = ms.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(
            exps,
            vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![2, 0]]
        );
        assert_eq!(enumerate_monomials(4, 2, 5).len(), 15);
        assert_eq!(enumerate_monomials(2, 2, 1).len(), 4);
    }

    #[test]
    fn normalize_folds_high_powers() {
        let field = f(3);
        let g = p(3, 1, "x1^3 + x1^2 + x1^5");
        let n = g.normalize();
        assert_eq!(n, p(3, 1, "2*x1 + x1^2"));
        for x in field.elements() {
            assert_eq!(g.evaluate(&[x]).unwrap(), n.evaluate(&[x]).unwrap());
        }
        assert!(!p(3, 1, "x1^2").is_irreducible());
        assert!(p(5, 2, "x1^3*x2").is_irreducible());
    }

    #[test]
    fn display_parse_round_trip() {
        let g = p(7, 3, "3*x1^2*x2 + x3 + 4 + 6*x2^2");
        let text = g.to_string();
        assert_eq!(text, "3*x1^2*x2 + 6*x2^2 + x3 + 4");
        assert_eq!(MultiPoly::parse(f(7), 3, &text).unwrap(), g);
        assert_eq!(MultiPoly::zero(f(7), 3).to_string(), "0");
        assert_eq!(p(7, 2, "x1 - x2"), p(7, 2, "x1 + 6*x2"));
        assert!(MultiPoly::parse(f(7), 2, "x3").is_err());
        assert!(MultiPoly::parse(f(7), 2, "y1").is_err());
        assert!(MultiPoly::parse(f(7), 2, "x1 + + x2").is_err());
    }

    #[test]
    fn difference_minus_derivative_is_constant() {
        // f(x+a) - f(x+b) - D_{f_2}(x, a-b) is constant for degree <= 2 f.
        let field = f(5);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let pts: Vec<Vec<FieldElement>> = (0..25u64).map(|i| field.vector(&[i / 5, i % 5])).collect();
        for _ in 0..10 {
            let g = random_poly(field, 2, 2, &mut rng);
            let f2 = g.homogeneous_component(2);
            for a in &pts {
                for b in pts.iter().step_by(3) {
                    let d = f2.directional_derivative(&crate::gf::vec_sub(a, b)).unwrap();
                    let vals: Vec<FieldElement> = pts
                        .iter()
                        .map(|x| {
                            g.evaluate(&crate::gf::vec_add(x, a)).unwrap()
                                - g.evaluate(&crate::gf::vec_add(x, b)).unwrap()
                                - d.evaluate(x).unwrap()
                        })
                        .collect();
                    assert!(vals.iter().all(|&v| v == vals[0]));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn restriction_matches_pointwise(seed in any::<u64>(), q in prop::sample::select(vec![3u64, 5, 7]), m in 1usize..4) {
            let field = f(q);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_poly(field, m, 3, &mut rng);
            let base: Vec<FieldElement> = (0..m).map(|_| field.elem(rng.random_range(0..q))).collect();
            let mut dir: Vec<FieldElement> = (0..m).map(|_| field.elem(rng.random_range(0..q))).collect();
            if dir.iter().all(FieldElement::is_zero) {
                dir[0] = field.one();
            }
            let u = g.restrict_to_line(&base, &dir).unwrap();
            prop_assert!(u.degree().is_none_or(|d| d as u32 <= g.total_degree().unwrap_or(0)));
            for t in field.elements() {
                let x: Vec<FieldElement> = base.iter().zip(&dir).map(|(&b, &h)| b + t * h).collect();
                prop_assert_eq!(u.evaluate(t), g.evaluate(&x).unwrap());
            }
        }

        #[test]
        fn interpolation_inverts_sampling(seed in any::<u64>(), d in 0usize..5) {
            let field = f(11);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coeffs: Vec<FieldElement> = (0..=d).map(|_| field.elem(rng.random_range(0..11))).collect();
            let u = UniPoly::from_coeffs(field, coeffs);
            let samples: Vec<_> = field.elements().skip(2).take(d + 2).map(|t| (t, u.evaluate(t))).collect();
            prop_assert_eq!(UniPoly::interpolate(&samples, d).unwrap(), u);
        }
    }
}
