//! Single-process storage simulator: one codeword symbol per logical node,
//! failure injection and a repair ladder (line repair, then global decode).

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evalset::EvaluationSet;
use crate::gf::{values, FieldElement};
use crate::lrc2::Lrc2Code;
use crate::lrc3::Lrc3Code;
use crate::ratio::{self, Rational};
use crate::repair::{self, LocalCode, RepairError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("codeword has {got} symbols, cluster has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cannot fail {count} of {nodes} nodes")]
    TooManyFailures { count: usize, nodes: usize },
    #[error("node {node} out of range for {nodes} nodes")]
    NodeOutOfRange { node: usize, nodes: usize },
    #[error("nodes {nodes:?} are unrecoverable")]
    Unrecoverable { nodes: Vec<usize> },
    #[error("symbol {value} is not in F_{q}")]
    BadSymbol { value: u64, q: u64 },
}

/// Either construction, seen through the common repair interface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyCode {
    Lrc2(Lrc2Code),
    Lrc3(Lrc3Code),
}

impl AnyCode {
    /// Helpers needed for one line interpolation.
    pub fn locality(&self) -> usize {
        self.line_degree() + 1
    }

    fn local_kind(&self) -> RepairKind {
        match self {
            AnyCode::Lrc2(_) => RepairKind::Local2,
            AnyCode::Lrc3(_) => RepairKind::Local3,
        }
    }
}

impl LocalCode for AnyCode {
    fn eval_set(&self) -> &EvaluationSet {
        match self {
            AnyCode::Lrc2(c) => c.eval_set(),
            AnyCode::Lrc3(c) => c.eval_set(),
        }
    }

    fn dimension(&self) -> usize {
        match self {
            AnyCode::Lrc2(c) => c.dimension(),
            AnyCode::Lrc3(c) => c.dimension(),
        }
    }

    fn line_degree(&self) -> usize {
        match self {
            AnyCode::Lrc2(c) => c.line_degree(),
            AnyCode::Lrc3(c) => c.line_degree(),
        }
    }

    fn eval_vector(&self, node: usize) -> Vec<FieldElement> {
        match self {
            AnyCode::Lrc2(c) => c.eval_vector(node),
            AnyCode::Lrc3(c) => c.eval_vector(node),
        }
    }
}

impl From<Lrc2Code> for AnyCode {
    fn from(c: Lrc2Code) -> Self {
        AnyCode::Lrc2(c)
    }
}

impl From<Lrc3Code> for AnyCode {
    fn from(c: Lrc3Code) -> Self {
        AnyCode::Lrc3(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairKind {
    Local2,
    Local3,
    Cooperative,
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Placed {
        nodes: usize,
    },
    Failed {
        nodes: Vec<usize>,
    },
    /// `symbols_transferred == contacts.len()`: each helper sends one symbol.
    Repaired {
        kind: RepairKind,
        /// Registered line used; `None` for global decoding.
        line: Option<usize>,
        nodes: Vec<usize>,
        values: Vec<u64>,
        contacts: Vec<usize>,
        symbols_transferred: usize,
    },
    Unrecoverable {
        nodes: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    code: AnyCode,
    /// `None` on dead nodes.
    nodes: Vec<Option<FieldElement>>,
    history: Vec<Event>,
}

/// How to choose the nodes to fail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureSpec {
    Explicit(Vec<usize>),
    Random { count: usize, seed: u64 },
}

impl Cluster {
    pub fn place(code: impl Into<AnyCode>, codeword: &[FieldElement]) -> Result<Self, SimError> {
        let code = code.into();
        if codeword.len() != code.len() {
            return Err(SimError::LengthMismatch {
                expected: code.len(),
                got: codeword.len(),
            });
        }
        Ok(Self {
            nodes: codeword.iter().map(|&x| Some(x)).collect(),
            history: vec![Event::Placed { nodes: code.len() }],
            code,
        })
    }

    pub fn code(&self) -> &AnyCode {
        &self.code
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_alive(&self, node: usize) -> bool {
        self.nodes[node].is_some()
    }

    /// The stored symbol, `None` on a dead node.
    pub fn read(&self, node: usize) -> Option<FieldElement> {
        self.nodes[node]
    }

    pub fn symbols(&self) -> &[Option<FieldElement>] {
        &self.nodes
    }

    pub fn dead(&self) -> Vec<usize> {
        (0..self.len()).filter(|&n| !self.is_alive(n)).collect()
    }

    pub fn history(&self) -> &[Event] {
        &self.history
    }

    /// Mark nodes dead. Returns the failed nodes, ascending.
    pub fn inject_failures(&mut self, spec: &FailureSpec) -> Result<Vec<usize>, SimError> {
        let n = self.len();
        let mut failed = match spec {
            FailureSpec::Explicit(nodes) => {
                if let Some(&node) = nodes.iter().find(|&&x| x >= n) {
                    return Err(SimError::NodeOutOfRange { node, nodes: n });
                }
                if nodes.len() > n {
                    return Err(SimError::TooManyFailures {
                        count: nodes.len(),
                        nodes: n,
                    });
                }
                nodes.clone()
            }
            &FailureSpec::Random { count, seed } => {
                if count > n {
                    return Err(SimError::TooManyFailures { count, nodes: n });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                sample(&mut rng, n, count).into_vec()
            }
        };
        failed.sort_unstable();
        failed.dedup();
        for &f in &failed {
            self.nodes[f] = None;
        }
        self.history.push(Event::Failed { nodes: failed.clone() });
        Ok(failed)
    }

    /// Restore dead nodes. Line interpolations come first, preferring lines
    /// holding the most dead nodes; one global erasure decode then covers
    /// whatever no line can reach. Nodes even that cannot restore stay dead
    /// and are reported as `Unrecoverable`. Returns the events logged.
    pub fn auto_repair(&mut self) -> Result<Vec<Event>, SimError> {
        let start = self.history.len();
        let dead = self.dead();
        if dead.is_empty() {
            return Ok(Vec::new());
        }
        let coop = repair::cooperative_repair(&self.code, &dead, &self.nodes).expect("lengths match");
        for g in &coop.groups {
            let vals: Vec<FieldElement> = g.recovered.iter().map(|n| coop.recovered[n]).collect();
            for (&n, &v) in g.recovered.iter().zip(&vals) {
                self.nodes[n] = Some(v);
            }
            let kind = if g.recovered.len() > 1 {
                RepairKind::Cooperative
            } else {
                self.code.local_kind()
            };
            self.history.push(Event::Repaired {
                kind,
                line: Some(g.line),
                nodes: g.recovered.clone(),
                values: values(&vals),
                contacts: g.helpers.clone(),
                symbols_transferred: g.helpers.len(),
            });
        }
        let rest = coop.unrecovered;
        let mut outcome = Ok(());
        if !rest.is_empty() {
            match repair::information_set_decode(&self.code, &self.nodes) {
                Ok((msg, contacts)) => {
                    let vals: Vec<FieldElement> = rest
                        .iter()
                        .map(|&n| crate::gf::dot(&self.code.eval_vector(n), &msg))
                        .collect();
                    for (&n, &v) in rest.iter().zip(&vals) {
                        self.nodes[n] = Some(v);
                    }
                    self.history.push(Event::Repaired {
                        kind: RepairKind::Global,
                        line: None,
                        nodes: rest,
                        values: values(&vals),
                        symbols_transferred: contacts.len(),
                        contacts,
                    });
                }
                Err(RepairError::Unrecoverable { .. }) => {
                    self.history.push(Event::Unrecoverable { nodes: rest.clone() });
                    outcome = Err(SimError::Unrecoverable { nodes: rest });
                }
                Err(e) => unreachable!("information-set decode on a full-length word: {e}"),
            }
        }
        outcome.map(|()| self.history[start..].to_vec())
    }

    pub fn stats(&self) -> RepairStats {
        RepairStats::from_events(&self.history)
    }

    pub fn snapshot(&self) -> ClusterSnapshot {
        ClusterSnapshot {
            q: self.code.field().modulus(),
            nodes: self.nodes.iter().map(|x| x.map(|v| v.value())).collect(),
            history: self.history.clone(),
        }
    }

    /// Rebuild a cluster from a snapshot taken over the same code.
    pub fn restore(code: impl Into<AnyCode>, snap: &ClusterSnapshot) -> Result<Self, SimError> {
        let code = code.into();
        let field = code.field();
        if snap.nodes.len() != code.len() {
            return Err(SimError::LengthMismatch {
                expected: code.len(),
                got: snap.nodes.len(),
            });
        }
        let nodes = snap
            .nodes
            .iter()
            .map(|x| match *x {
                Some(v) if v >= field.modulus() => Err(SimError::BadSymbol {
                    value: v,
                    q: field.modulus(),
                }),
                Some(v) => Ok(Some(field.elem(v))),
                None => Ok(None),
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            code,
            nodes,
            history: snap.history.clone(),
        })
    }

    /// Replay a scenario. Unrecoverable repairs are logged and the run
    /// continues with the cluster degraded.
    pub fn run(&mut self, scenario: &Scenario) -> Result<RepairStats, SimError> {
        for step in &scenario.steps {
            match step {
                Step::Fail(spec) => {
                    self.inject_failures(spec)?;
                }
                Step::Repair => match self.auto_repair() {
                    Ok(_) | Err(SimError::Unrecoverable { .. }) => {}
                    Err(e) => return Err(e),
                },
            }
        }
        Ok(self.stats())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSnapshot {
    pub q: u64,
    pub nodes: Vec<Option<u64>>,
    pub history: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Step {
    Fail(FailureSpec),
    Repair,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub steps: Vec<Step>,
}

impl Scenario {
    /// `rounds` rounds of "fail `per_round` random nodes, then repair", with
    /// per-round seeds drawn from `seed`.
    pub fn random(rounds: usize, per_round: usize, seed: u64) -> Self {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let steps = (0..rounds)
            .flat_map(|_| {
                [
                    Step::Fail(FailureSpec::Random {
                        count: per_round,
                        seed: rng.random(),
                    }),
                    Step::Repair,
                ]
            })
            .collect();
        Self {
            name: format!("random-{rounds}x{per_round}-{seed}"),
            steps,
        }
    }
}

/// Totals over the repair events of a log.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct RepairStats {
    pub local2: usize,
    pub local3: usize,
    pub cooperative: usize,
    pub global: usize,
    pub nodes_repaired: usize,
    pub contacts: usize,
    pub symbols_transferred: usize,
    /// `contacts / nodes_repaired`; `None` before any repair.
    #[serde(serialize_with = "ser_mean")]
    pub mean_contacts_per_node: Option<Rational>,
    pub unrecoverable: usize,
}

fn ser_mean<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => ratio::serialize(r, s),
        None => s.serialize_none(),
    }
}

impl RepairStats {
    pub fn from_events(events: &[Event]) -> Self {
        let mut s = Self::default();
        for e in events {
            match e {
                Event::Repaired {
                    kind,
                    nodes,
                    contacts,
                    symbols_transferred,
                    ..
                } => {
                    *match kind {
                        RepairKind::Local2 => &mut s.local2,
                        RepairKind::Local3 => &mut s.local3,
                        RepairKind::Cooperative => &mut s.cooperative,
                        RepairKind::Global => &mut s.global,
                    } += 1;
                    s.nodes_repaired += nodes.len();
                    s.contacts += contacts.len();
                    s.symbols_transferred += symbols_transferred;
                }
                Event::Unrecoverable { nodes } => s.unrecoverable += nodes.len(),
                Event::Placed { .. } | Event::Failed { .. } => {}
            }
        }
        if s.nodes_repaired > 0 {
            s.mean_contacts_per_node = Some(Ratio::new(s.contacts as u64, s.nodes_repaired as u64));
        }
        s
    }

    pub fn by_kind(&self) -> BTreeMap<RepairKind, usize> {
        BTreeMap::from([
            (RepairKind::Local2, self.local2),
            (RepairKind::Local3, self.local3),
            (RepairKind::Cooperative, self.cooperative),
            (RepairKind::Global, self.global),
        ])
    }
}

/// Check that no global decode in `history` happened while some line could
/// still have repaired one of its nodes. At a global event every other node
/// is alive, so the check replays only that event.
pub fn ladder_violations(code: &AnyCode, history: &[Event]) -> Vec<usize> {
    let es = code.eval_set();
    let need = code.locality();
    history
        .iter()
        .enumerate()
        .filter_map(|(idx, e)| match e {
            Event::Repaired {
                kind: RepairKind::Global,
                nodes,
                ..
            } => {
                let line_available = nodes.iter().any(|&n| {
                    es.lines_through(n)
                        .iter()
                        .any(|&l| es.lines()[l].nodes.iter().filter(|m| !nodes.contains(m)).count() >= need)
                });
                line_available.then_some(idx)
            }
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalset::PairSet;
    use crate::gf::PrimeField;
    use crate::inner::InnerCode;
    use crate::lrc3::{Case, Lrc3Code};

    fn toy2() -> (Lrc2Code, Vec<FieldElement>) {
        let c = crate::lrc2::tests::toy2();
        let w = c.encode(&c.field().vector(&[2, 3])).unwrap();
        (c, w)
    }

    #[test]
    fn place_and_fail() {
        let (c, w) = toy2();
        let mut cl = Cluster::place(c.clone(), &w).unwrap();
        assert_eq!(cl.len(), 8);
        assert!(cl.dead().is_empty());
        assert_eq!(
            Cluster::place(c.clone(), &w[..7]),
            Err(SimError::LengthMismatch { expected: 8, got: 7 })
        );
        cl.inject_failures(&FailureSpec::Explicit(vec![1])).unwrap();
        assert_eq!(cl.dead(), vec![1]);
        assert_eq!(cl.read(1), None);
        assert_eq!(
            cl.inject_failures(&FailureSpec::Random { count: 9, seed: 1 }),
            Err(SimError::TooManyFailures { count: 9, nodes: 8 })
        );
        let a = cl
            .clone()
            .inject_failures(&FailureSpec::Random { count: 3, seed: 42 })
            .unwrap();
        let b = cl
            .clone()
            .inject_failures(&FailureSpec::Random { count: 3, seed: 42 })
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        let mut all = Cluster::place(c, &w).unwrap();
        all.inject_failures(&FailureSpec::Random { count: 8, seed: 0 }).unwrap();
        assert_eq!(all.dead().len(), 8);
        assert_eq!(
            all.auto_repair(),
            Err(SimError::Unrecoverable {
                nodes: (0..8).collect()
            })
        );
        assert_eq!(all.stats().unrecoverable, 8);
    }

    #[test]
    fn single_local2_repair() {
        let (c, w) = toy2();
        let mut cl = Cluster::place(c, &w).unwrap();
        assert_eq!(cl.stats(), RepairStats::default());
        cl.inject_failures(&FailureSpec::Explicit(vec![0])).unwrap();
        let ev = cl.auto_repair().unwrap();
        assert_eq!(ev.len(), 1);
        let Event::Repaired {
            kind, contacts, values, ..
        } = &ev[0]
        else {
            panic!("expected a repair event")
        };
        assert_eq!(*kind, RepairKind::Local2);
        assert_eq!(contacts.len(), 2);
        assert_eq!(values, &vec![2]);
        let s = cl.stats();
        assert_eq!((s.local2, s.contacts, s.symbols_transferred), (1, 2, 2));
        assert_eq!(cl.read(0), Some(w[0]));
    }

    #[test]
    fn cooperative_and_global() {
        let (c, w) = toy2();
        let line = c.eval_set().lines()[0].nodes.clone();
        let mut cl = Cluster::place(c.clone(), &w).unwrap();
        cl.inject_failures(&FailureSpec::Explicit(line[2..].to_vec())).unwrap();
        cl.auto_repair().unwrap();
        let s = cl.stats();
        assert_eq!((s.cooperative, s.contacts), (1, 2));
        let mut cl = Cluster::place(c.clone(), &w).unwrap();
        cl.inject_failures(&FailureSpec::Explicit(line.clone())).unwrap();
        cl.auto_repair().unwrap();
        let s = cl.stats();
        assert_eq!((s.global, s.contacts), (1, 2));
        assert!(ladder_violations(cl.code(), cl.history()).is_empty());
        assert_eq!(cl.symbols().iter().map(|x| x.unwrap()).collect::<Vec<_>>(), w);
    }

    #[test]
    fn local3_repairs() {
        let f7 = PrimeField::new(7).unwrap();
        let inner = InnerCode::scaled_mds(f7, 4, &f7.vector(&[1, 2, 3, 4, 5, 6])).unwrap();
        let c = Lrc3Code::build(inner, PairSet::all(6), 1, Case::A, false).unwrap();
        let b: Vec<FieldElement> = (0..15).map(|i| f7.elem(i * 3 % 7)).collect();
        let w = c.encode(&b).unwrap();
        for node in 0..c.len() {
            let mut cl = Cluster::place(c.clone(), &w).unwrap();
            cl.inject_failures(&FailureSpec::Explicit(vec![node])).unwrap();
            cl.auto_repair().unwrap();
            let s = cl.stats();
            assert_eq!((s.local3, s.contacts), (1, 3));
            assert_eq!(cl.read(node), Some(w[node]));
        }
    }

    #[test]
    fn scenarios_are_deterministic_and_restore_exactly() {
        let (c, w) = toy2();
        for seed in 0..30 {
            let sc = Scenario::random(4, 1 + (seed as usize) % 4, seed);
            let mut a = Cluster::place(c.clone(), &w).unwrap();
            let mut b = Cluster::place(c.clone(), &w).unwrap();
            a.run(&sc).unwrap();
            b.run(&sc).unwrap();
            assert_eq!(a.history(), b.history());
            assert!(ladder_violations(a.code(), a.history()).is_empty());
            for (n, &wn) in w.iter().enumerate() {
                assert!(a.read(n).is_none_or(|x| x == wn));
            }
            let json = serde_json::to_string(&a.snapshot()).unwrap();
            let snap: ClusterSnapshot = serde_json::from_str(&json).unwrap();
            assert_eq!(Cluster::restore(c.clone(), &snap).unwrap(), a);
        }
    }

    #[test]
    fn scenario_json() {
        let sc: Scenario = serde_json::from_str(
            r#"{"steps": [{"action": "fail", "explicit": [1, 5]}, {"action": "repair"},
                          {"action": "fail", "random": {"count": 2, "seed": 9}}, {"action": "repair"}]}"#,
        )
        .unwrap();
        assert_eq!(sc.steps.len(), 4);
        assert_eq!(sc.steps[0], Step::Fail(FailureSpec::Explicit(vec![1, 5])));
        let back: Scenario = serde_json::from_str(&serde_json::to_string(&sc).unwrap()).unwrap();
        assert_eq!(back, sc);
        let ev = serde_json::to_value(Event::Failed { nodes: vec![1] }).unwrap();
        assert_eq!(ev["event"], "failed");
    }

    #[test]
    fn stats_match_log() {
        let (c, w) = toy2();
        let mut cl = Cluster::place(c, &w).unwrap();
        cl.run(&Scenario::random(10, 3, 5)).unwrap();
        let s = cl.stats();
        let repaired: usize = cl
            .history()
            .iter()
            .map(|e| match e {
                Event::Repaired { nodes, .. } => nodes.len(),
                _ => 0,
            })
            .sum();
        assert_eq!(s.nodes_repaired, repaired);
        assert_eq!(s.contacts, s.symbols_transferred);
        assert_eq!(
            s.by_kind().values().sum::<usize>(),
            s.local2 + s.local3 + s.cooperative + s.global
        );
    }
}
