//! JSON documents for codes, messages and codewords. Field elements are
//! stored as integers in `0..q`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evalset::{LineFile, PairSet};
use crate::gf::{values, FieldElement, PrimeField};
use crate::inner::{InnerCode, InnerCodeFile};
use crate::lrc2::Lrc2Code;
use crate::lrc3::{Case, Lrc3Code};
use crate::repair::LocalCode;
use crate::sim::AnyCode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FileError {
    #[error("spec has q = {spec}, inner code has q = {inner}")]
    FieldMismatch { spec: u64, inner: u64 },
    #[error("a locality-2 spec cannot have a case")]
    UnexpectedCase,
    #[error("stored evaluation set differs from the rebuilt one")]
    EvalSetMismatch,
    #[error("symbol {value} is not in F_{q}")]
    BadSymbol { value: u64, q: u64 },
    #[error("expected {expected} symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("erased symbol at position {0}")]
    Erased(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeKind {
    Locality2,
    Locality3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalSetFile {
    pub points: Vec<Vec<u64>>,
    pub lines: Vec<LineFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpecFile {
    pub kind: CodeKind,
    pub q: u64,
    pub inner: InnerCodeFile,
    #[serde(rename = "L")]
    pub l: usize,
    pub pairs: Vec<(usize, usize)>,
    /// Locality 3 only; defaults to `A`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<Case>,
    #[serde(default)]
    pub allow_uncovered: bool,
    /// Derived data; checked against the rebuilt code when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_set: Option<EvalSetFile>,
}

impl CodeSpecFile {
    pub fn from_code(code: &AnyCode) -> Self {
        let (points, lines) = code.eval_set().to_file();
        let eval_set = Some(EvalSetFile { points, lines });
        match code {
            AnyCode::Lrc2(c) => Self {
                kind: CodeKind::Locality2,
                q: c.field().modulus(),
                inner: c.inner().to_file(),
                l: c.extension_length(),
                pairs: c.pairs().pairs().to_vec(),
                case: None,
                allow_uncovered: c.allow_uncovered(),
                eval_set,
            },
            AnyCode::Lrc3(c) => Self {
                kind: CodeKind::Locality3,
                q: c.field().modulus(),
                inner: c.inner().to_file(),
                l: c.extension_length(),
                pairs: c.pairs().pairs().to_vec(),
                case: Some(c.case()),
                allow_uncovered: c.allow_uncovered(),
                eval_set,
            },
        }
    }

    /// Rebuild the code and check any stored derived data against it.
    pub fn build(&self) -> Result<AnyCode, crate::Error> {
        if self.inner.q != self.q {
            return Err(FileError::FieldMismatch {
                spec: self.q,
                inner: self.inner.q,
            }
            .into());
        }
        let inner = InnerCode::from_file(&self.inner)?;
        // index ranges depend on the construction and are checked by `build`
        let pairs = PairSet::new(usize::MAX, self.pairs.clone())?;
        let code: AnyCode = match self.kind {
            CodeKind::Locality2 => {
                if self.case.is_some() {
                    return Err(FileError::UnexpectedCase.into());
                }
                Lrc2Code::build(inner, pairs, self.l, self.allow_uncovered)?.into()
            }
            CodeKind::Locality3 => {
                Lrc3Code::build(inner, pairs, self.l, self.case.unwrap_or(Case::A), self.allow_uncovered)?.into()
            }
        };
        if let Some(es) = &self.eval_set {
            let (points, lines) = code.eval_set().to_file();
            if es.points != points || es.lines != lines {
                return Err(FileError::EvalSetMismatch.into());
            }
        }
        Ok(code)
    }
}

/// A list of field elements, used for messages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageFile {
    pub q: u64,
    pub data: Vec<u64>,
}

impl MessageFile {
    pub fn new(data: &[FieldElement], field: PrimeField) -> Self {
        Self {
            q: field.modulus(),
            data: values(data),
        }
    }

    pub fn elements(&self, field: PrimeField) -> Result<Vec<FieldElement>, crate::Error> {
        check_q(self.q, field)?;
        self.data.iter().map(|&v| parse_symbol(v, field)).collect()
    }
}

/// A codeword with `null` marking erased symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodewordFile {
    pub q: u64,
    pub symbols: Vec<Option<u64>>,
}

impl CodewordFile {
    pub fn new(word: &[FieldElement], field: PrimeField) -> Self {
        Self {
            q: field.modulus(),
            symbols: word.iter().map(|x| Some(x.value())).collect(),
        }
    }

    pub fn received(&self, field: PrimeField, len: usize) -> Result<Vec<Option<FieldElement>>, crate::Error> {
        check_q(self.q, field)?;
        if self.symbols.len() != len {
            return Err(FileError::LengthMismatch {
                expected: len,
                got: self.symbols.len(),
            }
            .into());
        }
        self.symbols
            .iter()
            .map(|s| s.map(|v| parse_symbol(v, field)).transpose())
            .collect()
    }

    /// Every symbol, failing on the first erasure.
    pub fn complete(&self, field: PrimeField, len: usize) -> Result<Vec<FieldElement>, crate::Error> {
        self.received(field, len)?
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or(FileError::Erased(i).into()))
            .collect()
    }
}

fn check_q(q: u64, field: PrimeField) -> Result<(), FileError> {
    if q != field.modulus() {
        return Err(FileError::FieldMismatch {
            spec: field.modulus(),
            inner: q,
        });
    }
    Ok(())
}

fn parse_symbol(v: u64, field: PrimeField) -> Result<FieldElement, crate::Error> {
    if v >= field.modulus() {
        return Err(FileError::BadSymbol {
            value: v,
            q: field.modulus(),
        }
        .into());
    }
    Ok(field.elem(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trip() {
        let c: AnyCode = crate::lrc2::tests::toy2().into();
        let spec = CodeSpecFile::from_code(&c);
        let json = serde_json::to_string_pretty(&spec).unwrap();
        assert!(json.contains("\"kind\": \"locality2\""));
        assert!(json.contains("\"L\": 2"));
        let back: CodeSpecFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.build().unwrap(), c);

        let c3: AnyCode = crate::lrc3::tests::toy3().into();
        let spec3 = CodeSpecFile::from_code(&c3);
        let back: CodeSpecFile = serde_json::from_str(&serde_json::to_string(&spec3).unwrap()).unwrap();
        assert_eq!(back.build().unwrap(), c3);
    }

    #[test]
    fn tampered_specs_are_rejected() {
        let c: AnyCode = crate::lrc2::tests::toy2().into();
        let spec = CodeSpecFile::from_code(&c);
        let mut t = spec.clone();
        t.eval_set.as_mut().unwrap().points[7] = vec![0, 0];
        assert!(matches!(t.build(), Err(crate::Error::File(FileError::EvalSetMismatch))));
        let mut t = spec.clone();
        t.q = 7;
        assert!(t.build().is_err());
        let mut t = spec.clone();
        t.case = Some(Case::A);
        assert!(t.build().is_err());
        let mut t = spec;
        t.pairs = vec![(0, 4)];
        assert!(t.build().is_err());
        let bad = r#"{"kind": "locality2", "q": 5, "inner": {"q": 5, "n": 1, "k": 1, "rows": [[1]]},
                      "L": 1, "pairs": [], "bogus": 1}"#;
        assert!(serde_json::from_str::<CodeSpecFile>(bad).is_err());
    }

    #[test]
    fn codeword_files() {
        let f5 = PrimeField::new(5).unwrap();
        let w = CodewordFile {
            q: 5,
            symbols: vec![Some(1), None, Some(4)],
        };
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(json, r#"{"q":5,"symbols":[1,null,4]}"#);
        assert_eq!(w.received(f5, 3).unwrap()[1], None);
        assert!(w.complete(f5, 3).is_err());
        assert!(w.received(f5, 4).is_err());
        let bad = CodewordFile {
            q: 5,
            symbols: vec![Some(5)],
        };
        assert!(bad.received(f5, 1).is_err());
        let m = MessageFile::new(&f5.vector(&[2, 3]), f5);
        assert_eq!(m.elements(f5).unwrap(), f5.vector(&[2, 3]));
    }
}
