//! End-to-end acceptance checks, one function per criterion. Each returns a
//! pass/fail flag with a one-line detail; `run_all` runs them in order.

use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::evalset::PairSet;
use crate::fixtures;
use crate::geometry::support_is_collinear;
use crate::gf::{dot, vec_add, vec_sub, FieldElement, PrimeField};
use crate::inner::InnerCode;
use crate::lincode::for_each_subset;
use crate::lrc2::Lrc2Code;
use crate::lrc3::{DecodeBudget, Lrc3Code, Schedule};
use crate::mpoly::{enumerate_monomials, MultiPoly};
use crate::repair::LocalCode;
use crate::rm::{all_lines, RmCode};
use crate::sim::{ladder_violations, AnyCode, Cluster, Event, FailureSpec, RepairKind, Scenario};

/// Runtime limits, checked as part of each criterion.
pub const RM_GRID_LIMIT: Duration = Duration::from_secs(60);
pub const LINE_SUPPORT_LIMIT: Duration = Duration::from_secs(1);
pub const TOY2_LIMIT: Duration = Duration::from_secs(10);
pub const DECODE_LIMIT: Duration = Duration::from_secs(120);

/// Round trips and error trials for the interpolating-decoder criterion.
pub const DECODE_ROUND_TRIPS: usize = 1000;
pub const DECODE_ERROR_TRIALS: usize = 1000;
pub const REPAIR3_SAMPLES: usize = 200;
pub const DERIVATIVE_POLYS: usize = 100;
pub const DERIVATIVE_SHIFTS: usize = 100;
pub const SIM_SCENARIOS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {} ({} ms): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.millis,
            self.detail
        )
    }
}

type Check = fn() -> (bool, String);

pub const CRITERIA: [(&str, Check); 11] = [
    ("rm-distance-formula", rm_distance_formula),
    ("line-supports", line_supports),
    ("rm-dual-distance", rm_dual_distance),
    ("toy2-golden", toy2_golden),
    ("systematic-optimality", systematic_optimality),
    ("rate-accounting", rate_accounting),
    ("interpolation-round-trip", interpolation_round_trip),
    ("locality3-repair", locality3_repair),
    ("derivative-identity", derivative_identity),
    ("cooperative-line", cooperative_line),
    ("simulator-ladder", simulator_ladder),
];

pub fn run(id: usize) -> CriterionResult {
    let (name, check) = CRITERIA[id - 1];
    let start = Instant::now();
    let (passed, detail) = check();
    CriterionResult {
        id,
        name,
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERIA.len()).map(run).collect()
}

fn field(q: u64) -> PrimeField {
    PrimeField::new(q).expect("prime")
}

fn random_message(k: usize, field: PrimeField, rng: &mut impl Rng) -> Vec<FieldElement> {
    (0..k)
        .map(|_| field.elem(rng.random_range(0..field.modulus())))
        .collect()
}

fn within(limit: Duration, start: Instant) -> bool {
    start.elapsed() < limit
}

fn rm_grid() -> Vec<(u64, usize, u32)> {
    let mut grid = Vec::new();
    for q in [3u64, 5] {
        for m in [1usize, 2] {
            for u in 1..=(q as u32 - 2).min(2) {
                grid.push((q, m, u));
            }
        }
    }
    grid
}

pub fn rm_distance_formula() -> (bool, String) {
    let start = Instant::now();
    let mut bad = Vec::new();
    let grid = rm_grid();
    for &(q, m, u) in &grid {
        let code = RmCode::new(field(q), m, u).expect("valid RM parameters");
        let brute = code.bruteforce_min_distance().expect("enumerable");
        if brute != code.min_distance() {
            bad.push(format!("q={q} m={m} u={u}: {brute} vs {}", code.min_distance()));
        }
    }
    let ok = bad.is_empty() && within(RM_GRID_LIMIT, start);
    (ok, format!("{} parameter sets, mismatches {:?}", grid.len(), bad))
}

pub fn line_supports() -> (bool, String) {
    let start = Instant::now();
    let f3 = field(3);
    let code = RmCode::new(f3, 2, 1).expect("valid");
    let dual = code.dual().expect("dual exists");
    let words = dual.enumerate_min_weight_words().expect("enumerable");
    let collinear = words.iter().all(|(_, support)| {
        let pts: Vec<Vec<FieldElement>> = support.iter().map(|&i| dual.point(i)).collect();
        support_is_collinear(&pts)
    });
    let mut witnesses = 0;
    let mut failures = 0;
    let gens = code.generator_rows();
    for line in all_lines(f3, 2) {
        for_each_subset(line.len(), 3, |pick| {
            let pts: Vec<Vec<FieldElement>> = pick.iter().map(|&i| line[i].clone()).collect();
            let ok = code.min_weight_dual_codeword(&pts, None).is_ok_and(|g| {
                let w = g.codeword(&code);
                let mut want: Vec<usize> = pts.iter().map(|p| code.point_index(p)).collect();
                want.sort_unstable();
                let support: Vec<usize> = (0..w.len()).filter(|&i| !w[i].is_zero()).collect();
                support == want && gens.iter().all(|r| dot(r, &w).is_zero())
            });
            if ok {
                witnesses += 1;
            } else {
                failures += 1;
            }
            true
        });
    }
    let ok = dual.min_distance() == 3
        && !words.is_empty()
        && collinear
        && failures == 0
        && within(LINE_SUPPORT_LIMIT, start);
    (
        ok,
        format!(
            "{} minimum-weight dual words (d = {}), all collinear: {collinear}; {witnesses} line triples witnessed, {failures} failed",
            words.len(),
            dual.min_distance()
        ),
    )
}

pub fn rm_dual_distance() -> (bool, String) {
    let mut bad = Vec::new();
    let grid = rm_grid();
    for &(q, m, u) in &grid {
        let code = RmCode::new(field(q), m, u).expect("valid");
        let want = u as u64 + 2;
        let got = code.bruteforce_dual_distance(want as usize);
        if got != Some(want) {
            bad.push(format!("q={q} m={m} u={u}: {got:?}"));
        }
    }
    (
        bad.is_empty(),
        format!("{} parameter sets, mismatches {:?}", grid.len(), bad),
    )
}

pub fn toy2_golden() -> (bool, String) {
    let start = Instant::now();
    let c = fixtures::toy2();
    let f5 = c.field();
    let golden = c.encode(&f5.vector(&[2, 3])).expect("dimension 2") == f5.vector(&[2, 3, 0, 3, 4, 0, 1, 4]);
    let mut cases = 0usize;
    let mut wrong = 0usize;
    for b in 0..25u64 {
        let word = c.encode(&f5.vector(&[b % 5, b / 5])).expect("dimension 2");
        for node in 0..c.len() {
            for &line in c.eval_set().lines_through(node) {
                let peers: Vec<usize> = c.eval_set().lines()[line]
                    .nodes
                    .iter()
                    .copied()
                    .filter(|&n| n != node)
                    .collect();
                for_each_subset(peers.len(), 2, |pick| {
                    let mut avail = vec![None; c.len()];
                    for &p in pick {
                        avail[peers[p]] = Some(word[peers[p]]);
                    }
                    cases += 1;
                    match c.repair(node, &avail) {
                        Ok(r) if r.value == word[node] && r.contacts.len() == 2 => {}
                        _ => wrong += 1,
                    }
                    true
                });
            }
        }
    }
    let bound = c.inner().n() - c.inner().k() + c.extension_length() + 1;
    let d = c.bruteforce_min_distance().ok();
    let ok = golden && wrong == 0 && d.is_some_and(|d| d >= bound) && within(TOY2_LIMIT, start);
    (
        ok,
        format!("encode(2,3) golden: {golden}; {cases} repairs, {wrong} wrong; d_min {d:?} >= {bound}"),
    )
}

pub fn systematic_optimality() -> (bool, String) {
    let c = fixtures::systematic2();
    let r = c.report(true);
    let bound = (c.inner().n() - c.inner().k() + c.extension_length() + 1) as i64;
    let d = r.d_min_bruteforce.map(|d| d as i64);
    let ok = d == Some(r.kumar_upper_bound) && r.kumar_upper_bound == bound;
    (
        ok,
        format!(
            "d_min {d:?}, upper bound (r=2, delta=L+1) {}, N-m+L+1 = {bound}",
            r.kumar_upper_bound
        ),
    )
}

pub fn rate_accounting() -> (bool, String) {
    let f7 = field(7);
    let inner = InnerCode::scaled_mds(f7, 2, &f7.vector(&[1, 2, 3, 4, 5, 6])).expect("distinct points");
    let n = inner.n();
    let l = 1;
    let chain = Lrc2Code::build(inner.clone(), PairSet::chain(n), l, false).expect("valid");
    let chain_ok =
        chain.len() == n + n / 2 * l && chain.report(false).rate == num_rational::Ratio::new(2, chain.len() as u64);
    let all = Lrc2Code::build(inner.clone(), PairSet::all(n), l, false).expect("valid");
    let mut distinct: Vec<Vec<FieldElement>> = inner.rows().to_vec();
    for &(i, j) in PairSet::all(n).pairs() {
        for t in 2..=l as u64 + 1 {
            let p = crate::gf::axpy(inner.row(i), f7.elem(t), &vec_sub(inner.row(j), inner.row(i)));
            if !distinct.contains(&p) {
                distinct.push(p);
            }
        }
    }
    let r = all.report(false);
    let all_ok = r.length == distinct.len()
        && r.length <= n + n * (n - 1) / 2 * l
        && r.rate == num_rational::Ratio::new(2, r.length as u64);
    (
        chain_ok && all_ok,
        format!(
            "chain |S| = {} (expect {}), all-pairs |S| = {} (dedup {}, nominal {}), rates {} and {}",
            chain.len(),
            n + n / 2 * l,
            r.length,
            distinct.len(),
            n + n * (n - 1) / 2 * l,
            crate::ratio::to_string(&chain.report(false).rate),
            crate::ratio::to_string(&r.rate)
        ),
    )
}

/// Single-error trials: `(within budget, recovered within budget)`.
fn interpolation_error_trials(c: &Lrc3Code, trials: usize, seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s2 = c.sum_set().len();
    let f = c.field();
    let (mut eligible, mut ok) = (0, 0);
    for _ in 0..trials {
        let b = random_message(c.dimension(), f, &mut rng);
        let word = c.encode(&b).expect("dimension K");
        let mut y: Vec<Option<FieldElement>> = word[..s2].iter().map(|&x| Some(x)).collect();
        let pos = rng.random_range(0..s2);
        y[pos] = Some(word[pos] + f.elem(rng.random_range(1..f.modulus())));
        let budget = c.error_budget(&y, &word[..s2], Schedule::Spanning).expect("schedule");
        if budget.iter().all(DecodeBudget::within) {
            eligible += 1;
            if c.decode_interpolating(&y, Schedule::Spanning)
                .is_ok_and(|o| o.message == b)
            {
                ok += 1;
            }
        }
    }
    (eligible, ok)
}

pub fn interpolation_round_trip() -> (bool, String) {
    let start = Instant::now();
    let c = fixtures::toy3();
    let f = c.field();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut recovered = 0;
    for _ in 0..DECODE_ROUND_TRIPS {
        let b = random_message(c.dimension(), f, &mut rng);
        let word: Vec<Option<FieldElement>> = c.encode(&b).expect("dimension K").into_iter().map(Some).collect();
        if c.decode_interpolating(&word, Schedule::Spanning)
            .is_ok_and(|o| o.message == b)
        {
            recovered += 1;
        }
    }
    let (e7, ok7) = interpolation_error_trials(&c, DECODE_ERROR_TRIALS, 8);
    let c11 = fixtures::toy3_q11();
    let (e11, ok11) = interpolation_error_trials(&c11, DECODE_ERROR_TRIALS / 4, 9);
    let tolerance = c
        .report(0, 0)
        .error_tolerance_claim
        .map(|t| crate::ratio::to_string(&t));
    let ok = recovered == DECODE_ROUND_TRIPS && ok7 == e7 && ok11 == e11 && e11 > 0 && within(DECODE_LIMIT, start);
    (
        ok,
        format!(
            "{recovered}/{DECODE_ROUND_TRIPS} clean round trips; single errors within every decode radius: \
             q=7 {ok7}/{e7}, q=11 {ok11}/{e11}; claimed tolerance eps^2/18*|S2| = {}",
            tolerance.unwrap_or_else(|| "n/a".into())
        ),
    )
}

pub fn locality3_repair() -> (bool, String) {
    let c = fixtures::toy3();
    let f = c.field();
    let es = c.eval_set();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut wrong = 0;
    for _ in 0..REPAIR3_SAMPLES {
        let b = random_message(c.dimension(), f, &mut rng);
        let word = c.encode(&b).expect("dimension K");
        let node = rng.random_range(0..c.len());
        let through = es.lines_through(node);
        let line = &es.lines()[through[rng.random_range(0..through.len())]];
        let peers: Vec<usize> = line.nodes.iter().copied().filter(|&n| n != node).collect();
        let mut avail = vec![None; c.len()];
        for i in sample(&mut rng, peers.len(), 3) {
            avail[peers[i]] = Some(word[peers[i]]);
        }
        match c.repair(node, &avail) {
            Ok(r) if r.value == word[node] && r.contacts.len() == 3 => {}
            _ => wrong += 1,
        }
    }
    let rm = RmCode::new(f, c.inner().k(), 2).expect("valid");
    let mut missing = Vec::new();
    for node in 0..c.len() {
        let line = &es.lines()[es.lines_through(node)[0]];
        let mut group = vec![node];
        group.extend(line.nodes.iter().copied().filter(|&n| n != node).take(3));
        let pts: Vec<Vec<FieldElement>> = group.iter().map(|&n| es.point(n).to_vec()).collect();
        let ok = rm.min_weight_dual_codeword(&pts, None).is_ok_and(|g| {
            let shortened: Vec<FieldElement> = es.points().iter().map(|p| g.evaluate(p)).collect();
            let support = (0..c.len()).filter(|&i| !shortened[i].is_zero()).count();
            support == 4
                && (0..5).all(|_| {
                    let b = random_message(c.dimension(), f, &mut rng);
                    dot(&shortened, &c.encode(&b).expect("dimension K")).is_zero()
                })
        });
        if !ok {
            missing.push(node);
        }
    }
    (
        wrong == 0 && missing.is_empty(),
        format!(
            "{REPAIR3_SAMPLES} sampled repairs, {wrong} wrong; weight-4 witnesses for {}/{} nodes",
            c.len() - missing.len(),
            c.len()
        ),
    )
}

pub fn derivative_identity() -> (bool, String) {
    let f5 = field(5);
    let m = 2;
    let monos = enumerate_monomials(m, 2, 4);
    let space = RmCode::new(f5, m, 0).expect("valid").points();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0usize;
    let mut violations = 0usize;
    for _ in 0..DERIVATIVE_POLYS {
        let coeffs = random_message(monos.len(), f5, &mut rng);
        let f = MultiPoly::from_terms(f5, m, monos.iter().cloned().zip(coeffs));
        let f2 = f.homogeneous_component(2);
        for _ in 0..DERIVATIVE_SHIFTS {
            let a = random_message(m, f5, &mut rng);
            let b = random_message(m, f5, &mut rng);
            let d = f2.directional_derivative(&vec_sub(&a, &b)).expect("arity");
            let vals: Vec<FieldElement> = space
                .iter()
                .map(|x| {
                    let e = |p: &[FieldElement]| f.evaluate(p).expect("arity");
                    e(&vec_add(x, &a)) - e(&vec_add(x, &b)) - d.evaluate(x).expect("arity")
                })
                .collect();
            checked += vals.len();
            if vals.iter().any(|&v| v != vals[0]) {
                violations += 1;
            }
        }
    }
    (
        violations == 0,
        format!("{checked} (f, x, a, b) evaluations, {violations} non-constant differences"),
    )
}

pub fn cooperative_line() -> (bool, String) {
    let c = fixtures::toy2();
    let word = c.encode(&c.field().vector(&[2, 3])).expect("dimension 2");
    let line = c.eval_set().lines()[0].nodes.clone();
    let run = |failed: &[usize]| {
        let mut cl = Cluster::place(c.clone(), &word).expect("length matches");
        cl.inject_failures(&FailureSpec::Explicit(failed.to_vec()))
            .expect("in range");
        let ok = cl.auto_repair().is_ok() && cl.symbols().iter().zip(&word).all(|(s, w)| *s == Some(*w));
        (ok, cl.stats())
    };
    // the whole line: no survivor on it, recovered from the rest of the registry
    let (ok_all, s_all) = run(&line);
    // the extension points only: one interpolation on the line
    let (ok_ext, s_ext) = run(&line[2..]);
    let ok = ok_all && s_all.contacts == 2 && ok_ext && s_ext.contacts == 2 && s_ext.cooperative == 1;
    (
        ok,
        format!(
            "whole line {line:?}: {} contacts ({} global); extension nodes {:?}: {} contacts ({} cooperative)",
            s_all.contacts,
            s_all.global,
            &line[2..],
            s_ext.contacts,
            s_ext.cooperative
        ),
    )
}

pub fn simulator_ladder() -> (bool, String) {
    let codes: [AnyCode; 2] = [fixtures::toy2().into(), fixtures::toy3().into()];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let words: Vec<Vec<FieldElement>> = codes
        .iter()
        .map(|c| {
            c.encode(&random_message(c.dimension(), c.field(), &mut rng))
                .expect("dimension K")
        })
        .collect();
    let (mut mismatched, mut violations, mut corrupted) = (0, 0, 0);
    let mut kinds = std::collections::BTreeMap::<RepairKind, usize>::new();
    for s in 0..SIM_SCENARIOS {
        let which = s % 2;
        let per_round = 1 + s % if which == 0 { 4 } else { 8 };
        let scenario = Scenario::random(3, per_round, 1000 + s as u64);
        let mut a = Cluster::place(codes[which].clone(), &words[which]).expect("length matches");
        let mut b = a.clone();
        let _ = a.run(&scenario);
        let _ = b.run(&scenario);
        if a.history() != b.history() {
            mismatched += 1;
        }
        violations += ladder_violations(a.code(), a.history()).len();
        if (0..a.len()).any(|n| a.read(n).is_some_and(|x| x != words[which][n])) {
            corrupted += 1;
        }
        for e in a.history() {
            if let Event::Repaired { kind, .. } = e {
                *kinds.entry(*kind).or_default() += 1;
            }
        }
    }
    (
        mismatched == 0 && violations == 0 && corrupted == 0,
        format!(
            "{SIM_SCENARIOS} scenarios: {mismatched} nondeterministic, {violations} premature global decodes, \
             {corrupted} with wrong symbols; repairs by kind {kinds:?}"
        ),
    )
}
