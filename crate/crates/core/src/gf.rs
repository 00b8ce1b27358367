//! Prime-field arithmetic.
//!
//! Every [`FieldElement`] carries the [`PrimeField`] it belongs to. Mixing
//! elements of different fields is an error: the checked operations return
//! [`GfError::FieldMismatch`] and the operator impls panic.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus accepted; products of two residues fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("modulus {0} is not a prime in [2, 2^31]")]
    NotPrime(u64),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u64),
    #[error("operands belong to different fields (F_{0} vs F_{1})")]
    FieldMismatch(u64, u64),
}

/// The prime field F_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self, GfError> {
        if !(2..=MAX_MODULUS).contains(&q) || !is_prime(q) {
            return Err(GfError::NotPrime(q));
        }
        Ok(Self { q })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Number of field elements, as a `usize`.
    #[inline]
    pub fn size(&self) -> usize {
        self.q as usize
    }

    /// Element with the canonical residue of `value`.
    #[inline]
    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.q,
            field: *self,
        }
    }

    /// Element with the canonical residue of a signed integer.
    pub fn elem_i64(&self, value: i64) -> FieldElement {
        let q = self.q as i64;
        self.elem(value.rem_euclid(q) as u64)
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// All elements in increasing residue order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |v| self.elem(v))
    }

    pub fn vector(&self, values: &[u64]) -> Vec<FieldElement> {
        values.iter().map(|&v| self.elem(v)).collect()
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = GfError;

    fn try_from(q: u64) -> Result<Self, Self::Error> {
        PrimeField::new(q)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.q
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A canonical residue in `[0, q)` tagged with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

/// Operation selector for [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    /// `a^b`, with `b` read as a non-negative integer.
    Pow,
    /// Unary; `b` is ignored apart from the field check.
    Neg,
    /// Unary; `b` is ignored apart from the field check.
    Inv,
}

/// Apply `op` to `a` and `b`, checking that both live in the same field.
pub fn field_arith(a: FieldElement, b: FieldElement, op: FieldOp) -> Result<FieldElement, GfError> {
    a.check_same(&b)?;
    match op {
        FieldOp::Add => Ok(a + b),
        FieldOp::Sub => Ok(a - b),
        FieldOp::Mul => Ok(a * b),
        FieldOp::Div => a.try_div(b),
        FieldOp::Pow => Ok(a.pow(b.value)),
        FieldOp::Neg => Ok(-a),
        FieldOp::Inv => a.inv(),
    }
}

impl FieldElement {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    #[inline]
    fn check_same(&self, other: &Self) -> Result<(), GfError> {
        if self.field != other.field {
            return Err(GfError::FieldMismatch(self.field.q, other.field.q));
        }
        Ok(())
    }

    #[inline]
    fn assert_same(&self, other: &Self) {
        if self.field != other.field {
            panic!("{}", GfError::FieldMismatch(self.field.q, other.field.q));
        }
    }

    pub fn try_add(self, rhs: Self) -> Result<Self, GfError> {
        self.check_same(&rhs)?;
        Ok(self + rhs)
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self, GfError> {
        self.check_same(&rhs)?;
        Ok(self - rhs)
    }

    pub fn try_mul(self, rhs: Self) -> Result<Self, GfError> {
        self.check_same(&rhs)?;
        Ok(self * rhs)
    }

    pub fn try_div(self, rhs: Self) -> Result<Self, GfError> {
        self.check_same(&rhs)?;
        Ok(self * rhs.inv()?)
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let q = self.field.q;
        let mut base = self.value;
        let mut acc = 1 % q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            exp >>= 1;
        }
        self.field.elem(acc)
    }

    /// Multiplicative inverse by Fermat exponentiation.
    pub fn inv(self) -> Result<Self, GfError> {
        if self.is_zero() {
            return Err(GfError::DivisionByZero(self.field.q));
        }
        Ok(self.pow(self.field.q - 2))
    }

    /// Multiply by a small non-negative integer.
    pub fn scale(self, k: u64) -> Self {
        self * self.field.elem(k)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = Self;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        self.assert_same(&rhs);
        let s = self.value + rhs.value;
        let q = self.field.q;
        Self {
            value: if s >= q { s - q } else { s },
            field: self.field,
        }
    }
}

impl Sub for FieldElement {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self.assert_same(&rhs);
        let q = self.field.q;
        Self {
            value: (self.value + q - rhs.value) % q,
            field: self.field,
        }
    }
}

impl Mul for FieldElement {
    type Output = Self;

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self.assert_same(&rhs);
        Self {
            value: self.value * rhs.value % self.field.q,
            field: self.field,
        }
    }
}

impl Neg for FieldElement {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        let q = self.field.q;
        Self {
            value: (q - self.value) % q,
            field: self.field,
        }
    }
}

impl AddAssign for FieldElement {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for FieldElement {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for FieldElement {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

/// Dot product of two equal-length vectors.
pub fn dot(a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    assert_eq!(a.len(), b.len(), "dot product of vectors of different length");
    let field = a.first().or(b.first()).map(|e| e.field()).expect("empty dot product");
    a.iter().zip(b).fold(field.zero(), |acc, (&x, &y)| acc + x * y)
}

/// Componentwise `a + s * b`.
pub fn axpy(a: &[FieldElement], s: FieldElement, b: &[FieldElement]) -> Vec<FieldElement> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x + s * y).collect()
}

pub fn vec_sub(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn vec_add(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn vec_scale(a: &[FieldElement], s: FieldElement) -> Vec<FieldElement> {
    a.iter().map(|&x| x * s).collect()
}

/// Raw residues of a vector.
pub fn values(v: &[FieldElement]) -> Vec<u64> {
    v.iter().map(|e| e.value()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inverse_of_three_mod_seven() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.elem(3).inv().unwrap(), f.elem(5));
        assert_eq!(field_arith(f.elem(3), f.zero(), FieldOp::Inv).unwrap().value(), 5);
    }

    #[test]
    fn add_and_pow_mod_five() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(field_arith(f.elem(4), f.elem(3), FieldOp::Add).unwrap().value(), 2);
        assert_eq!(field_arith(f.elem(2), f.elem(4), FieldOp::Pow).unwrap().value(), 1);
        assert_eq!(field_arith(f.elem(2), f.elem(3), FieldOp::Sub).unwrap().value(), 4);
        assert_eq!(field_arith(f.elem(1), f.zero(), FieldOp::Neg).unwrap().value(), 4);
        assert_eq!(field_arith(f.elem(3), f.elem(2), FieldOp::Div).unwrap().value(), 4);
    }

    #[test]
    fn errors() {
        let f5 = PrimeField::new(5).unwrap();
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f5.zero().inv(), Err(GfError::DivisionByZero(5)));
        assert_eq!(f5.one().try_div(f5.zero()), Err(GfError::DivisionByZero(5)));
        assert_eq!(f5.one().try_add(f7.one()), Err(GfError::FieldMismatch(5, 7)));
        assert_eq!(
            field_arith(f5.one(), f7.one(), FieldOp::Mul),
            Err(GfError::FieldMismatch(5, 7))
        );
        assert_eq!(PrimeField::new(9), Err(GfError::NotPrime(9)));
        assert_eq!(PrimeField::new(1), Err(GfError::NotPrime(1)));
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(2_147_483_647).is_ok());
    }

    #[test]
    #[should_panic(expected = "different fields")]
    fn operator_mismatch_panics() {
        let _ = PrimeField::new(5).unwrap().one() + PrimeField::new(7).unwrap().one();
    }

    #[test]
    fn signed_residues() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.elem_i64(-1).value(), 4);
        assert_eq!(f.elem_i64(-10).value(), 0);
        assert_eq!(f.elem(12).value(), 2);
    }

    fn field_and_triple() -> impl Strategy<Value = (u64, u64, u64, u64)> {
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101, 65_521, 2_147_483_647])
            .prop_flat_map(|q| (Just(q), 0..q, 0..q, 0..q))
    }

    proptest! {
        #[test]
        fn field_axioms((q, a, b, c) in field_and_triple()) {
            let f = PrimeField::new(q).unwrap();
            let (a, b, c) = (f.elem(a), f.elem(b), f.elem(c));
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a - b + b, a);
            prop_assert_eq!(a + (-a), f.zero());
            if !a.is_zero() {
                prop_assert_eq!(a * a.inv().unwrap(), f.one());
                prop_assert_eq!(a.pow(q - 1), f.one());
            }
        }
    }
}
