//! Evaluation sets: ordered, deduplicated point lists with a registry of the
//! lines used for local repair.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{values, vec_add, vec_scale, FieldElement, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairError {
    #[error("pair ({0}, {0}) has no direction")]
    DegenerateDirection(usize),
    #[error("pair ({0}, {1}) is not ordered")]
    Unordered(usize, usize),
    #[error("index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("pair ({0}, {1}) listed twice")]
    Duplicate(usize, usize),
}

/// Ordered index pairs `(i, j)` with `i < j`, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PairSet(Vec<(usize, usize)>);

impl PairSet {
    pub fn new(n: usize, pairs: Vec<(usize, usize)>) -> Result<Self, PairError> {
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if i == j {
                return Err(PairError::DegenerateDirection(i));
            }
            if i > j {
                return Err(PairError::Unordered(i, j));
            }
            if j >= n {
                return Err(PairError::IndexOutOfRange { index: j, n });
            }
            if pairs[..k].contains(&(i, j)) {
                return Err(PairError::Duplicate(i, j));
            }
        }
        Ok(Self(pairs))
    }

    /// Every pair, lexicographically.
    pub fn all(n: usize) -> Self {
        Self((0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect())
    }

    /// Disjoint consecutive pairs `(0,1), (2,3), ...`; an odd last index is
    /// paired with its predecessor.
    pub fn chain(n: usize) -> Self {
        let mut pairs: Vec<(usize, usize)> = (0..n / 2).map(|k| (2 * k, 2 * k + 1)).collect();
        if n % 2 == 1 && n > 1 {
            pairs.push((n - 2, n - 1));
        }
        Self(pairs)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices in `0..n` not appearing in any pair.
    pub fn uncovered(&self, n: usize) -> Vec<usize> {
        (0..n)
            .filter(|&k| !self.0.iter().any(|&(i, j)| i == k || j == k))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisteredLine {
    pub base: Vec<FieldElement>,
    pub direction: Vec<FieldElement>,
    pub params: Vec<FieldElement>,
    /// `nodes[k]` holds the point `base + params[k] * direction`.
    pub nodes: Vec<usize>,
    /// The pair that created the line.
    pub pair: (usize, usize),
}

impl RegisteredLine {
    pub fn param_of_node(&self, node: usize) -> Option<FieldElement> {
        self.nodes.iter().position(|&n| n == node).map(|k| self.params[k])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationSet {
    field: PrimeField,
    dim: usize,
    points: Vec<Vec<FieldElement>>,
    index: HashMap<Vec<u64>, usize>,
    lines: Vec<RegisteredLine>,
    node_lines: Vec<Vec<usize>>,
}

impl EvaluationSet {
    pub fn new(field: PrimeField, dim: usize) -> Self {
        Self {
            field,
            dim,
            points: Vec::new(),
            index: HashMap::new(),
            lines: Vec::new(),
            node_lines: Vec::new(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Node index of `p`, appending it if new.
    pub fn insert(&mut self, p: Vec<FieldElement>) -> usize {
        debug_assert_eq!(p.len(), self.dim);
        let key = values(&p);
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.points.len();
        self.index.insert(key, i);
        self.points.push(p);
        self.node_lines.push(Vec::new());
        i
    }

    /// Register the line `base + t * direction` over `params`, inserting its
    /// points. Returns the line index.
    pub fn add_line(
        &mut self,
        base: Vec<FieldElement>,
        direction: Vec<FieldElement>,
        params: Vec<FieldElement>,
        pair: (usize, usize),
    ) -> usize {
        let nodes: Vec<usize> = params
            .iter()
            .map(|&t| self.insert(vec_add(&base, &vec_scale(&direction, t))))
            .collect();
        let id = self.lines.len();
        for &n in &nodes {
            if !self.node_lines[n].contains(&id) {
                self.node_lines[n].push(id);
            }
        }
        self.lines.push(RegisteredLine {
            base,
            direction,
            params,
            nodes,
            pair,
        });
        id
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

    pub fn point(&self, node: usize) -> &[FieldElement] {
        &self.points[node]
    }

    pub fn index_of(&self, p: &[FieldElement]) -> Option<usize> {
        self.index.get(&values(p)).copied()
    }

    pub fn lines(&self) -> &[RegisteredLine] {
        &self.lines
    }

    /// Lines through `node`, in registry order.
    pub fn lines_through(&self, node: usize) -> &[usize] {
        &self.node_lines[node]
    }

    pub fn uncovered(&self) -> Vec<usize> {
        (0..self.len()).filter(|&n| self.node_lines[n].is_empty()).collect()
    }

    pub fn to_file(&self) -> (Vec<Vec<u64>>, Vec<LineFile>) {
        let points = self.points.iter().map(|p| values(p)).collect();
        let lines = self
            .lines
            .iter()
            .map(|l| LineFile {
                pair: [l.pair.0, l.pair.1],
                base: values(&l.base),
                direction: values(&l.direction),
                params: values(&l.params),
                nodes: l.nodes.clone(),
            })
            .collect();
        (points, lines)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineFile {
    pub pair: [usize; 2],
    pub base: Vec<u64>,
    pub direction: Vec<u64>,
    pub params: Vec<u64>,
    pub nodes: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_sets() {
        assert_eq!(PairSet::all(3).pairs(), &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(PairSet::chain(4).pairs(), &[(0, 1), (2, 3)]);
        assert_eq!(PairSet::chain(5).pairs(), &[(0, 1), (2, 3), (3, 4)]);
        assert_eq!(PairSet::new(4, vec![(0, 0)]), Err(PairError::DegenerateDirection(0)));
        assert_eq!(PairSet::new(4, vec![(2, 1)]), Err(PairError::Unordered(2, 1)));
        assert_eq!(
            PairSet::new(4, vec![(1, 4)]),
            Err(PairError::IndexOutOfRange { index: 4, n: 4 })
        );
        assert_eq!(PairSet::new(4, vec![(0, 1), (0, 1)]), Err(PairError::Duplicate(0, 1)));
        assert_eq!(PairSet::new(4, vec![(0, 1)]).unwrap().uncovered(4), vec![2, 3]);
    }

    #[test]
    fn dedup_keeps_first_and_merges_lines() {
        let f5 = PrimeField::new(5).unwrap();
        let mut s = EvaluationSet::new(f5, 2);
        assert_eq!(s.insert(f5.vector(&[1, 0])), 0);
        assert_eq!(s.insert(f5.vector(&[0, 1])), 1);
        assert_eq!(s.insert(f5.vector(&[1, 0])), 0);
        let l = s.add_line(f5.vector(&[1, 0]), f5.vector(&[4, 1]), f5.vector(&[0, 1, 2]), (0, 1));
        assert_eq!(s.lines()[l].nodes, vec![0, 1, 2]);
        assert_eq!(s.point(2), f5.vector(&[4, 2]).as_slice());
        let l2 = s.add_line(f5.vector(&[4, 2]), f5.vector(&[1, 0]), f5.vector(&[0, 1]), (2, 3));
        assert_eq!(s.lines()[l2].nodes, vec![2, 3]);
        assert_eq!(s.lines_through(2), &[0, 1]);
        assert_eq!(s.index_of(&f5.vector(&[0, 2])), Some(3));
        assert!(s.uncovered().is_empty());
        for line in s.lines() {
            for (k, &n) in line.nodes.iter().enumerate() {
                assert_eq!(
                    s.point(n),
                    vec_add(&line.base, &vec_scale(&line.direction, line.params[k])).as_slice()
                );
            }
        }
    }
}
