//! Small named instances used by the acceptance suite, the CLI and tests.

use crate::evalset::PairSet;
use crate::gf::PrimeField;
use crate::inner::InnerCode;
use crate::lrc2::Lrc2Code;
use crate::lrc3::{Case, Lrc3Code};

fn field(q: u64) -> PrimeField {
    PrimeField::new(q).expect("prime")
}

/// q = 5, rows (1,0), (0,1), (1,1), (1,2), pairs (0,1), (2,3), L = 2.
pub fn toy2() -> Lrc2Code {
    let inner =
        InnerCode::from_u64_rows(field(5), &[vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]]).expect("full rank");
    let pairs = PairSet::new(4, vec![(0, 1), (2, 3)]).expect("valid pairs");
    Lrc2Code::build(inner, pairs, 2, false).expect("valid parameters")
}

/// Systematic q = 5 instance: rows e1, e2, (1,2), (1,4), pair (0,1), L = 2.
pub fn systematic2() -> Lrc2Code {
    let f5 = field(5);
    let inner = InnerCode::systematic(f5, 2, &f5.vector(&[2, 4])).expect("distinct rows");
    Lrc2Code::systematic(inner, PairSet::new(2, vec![(0, 1)]).expect("valid pair"), 2).expect("valid parameters")
}

/// q = 7, rows (a, a^2, a^3, a^4) for a = 1..6, all pairs, L = 1, case A.
pub fn toy3() -> Lrc3Code {
    let f7 = field(7);
    let inner = InnerCode::scaled_mds(f7, 4, &f7.vector(&[1, 2, 3, 4, 5, 6])).expect("distinct points");
    Lrc3Code::build(inner, PairSet::all(6), 1, Case::A, false).expect("valid parameters")
}

/// q = 11, rows (a, a^2, a^3, a^4) for a = 1..8, all pairs, L = 1, case A.
/// Its affine code has distance 4, so interpolating decoding corrects one error per decode.
pub fn toy3_q11() -> Lrc3Code {
    let f11 = field(11);
    let inner = InnerCode::scaled_mds(f11, 4, &f11.vector(&[1, 2, 3, 4, 5, 6, 7, 8])).expect("distinct points");
    Lrc3Code::build(inner, PairSet::all(8), 1, Case::A, false).expect("valid parameters")
}
