//! Exhaustive tools for small linear codes given by generator rows.

use crate::gf::{FieldElement, PrimeField};
use crate::guard::{self, TooLarge};
use crate::matrix::vectors_rank;

/// Call `visit(message, codeword)` for every message in `F_q^k`, in
/// odometer order with the first digit changing fastest. Stops early when
/// `visit` returns `false`.
pub fn for_each_codeword<F>(
    field: PrimeField,
    rows: &[Vec<FieldElement>],
    n: usize,
    mut visit: F,
) -> Result<(), TooLarge>
where
    F: FnMut(&[u64], &[u64]) -> bool,
{
    let q = field.modulus();
    let k = rows.len();
    guard::check(q, k)?;
    let rows: Vec<Vec<u64>> = rows.iter().map(|r| crate::gf::values(r)).collect();
    let mut msg = vec![0u64; k];
    let mut word = vec![0u64; n];
    loop {
        if !visit(&msg, &word) {
            return Ok(());
        }
        // Incrementing digit i adds row i, including the wrap q-1 -> 0.
        let mut i = 0;
        loop {
            if i == k {
                return Ok(());
            }
            for (w, r) in word.iter_mut().zip(&rows[i]) {
                *w = (*w + r) % q;
            }
            msg[i] = (msg[i] + 1) % q;
            if msg[i] != 0 {
                break;
            }
            i += 1;
        }
    }
}

/// Number of codewords of each Hamming weight `0..=n`.
pub fn weight_distribution(field: PrimeField, rows: &[Vec<FieldElement>], n: usize) -> Result<Vec<u64>, TooLarge> {
    let mut dist = vec![0u64; n + 1];
    for_each_codeword(field, rows, n, |_, w| {
        dist[w.iter().filter(|&&x| x != 0).count()] += 1;
        true
    })?;
    Ok(dist)
}

/// Minimum nonzero weight over all codewords; `None` if every codeword is
/// zero.
pub fn min_distance(field: PrimeField, rows: &[Vec<FieldElement>], n: usize) -> Result<Option<usize>, TooLarge> {
    let dist = weight_distribution(field, rows, n)?;
    Ok((1..=n).find(|&w| dist[w] > 0))
}

/// Size of the smallest linearly dependent set of columns of the matrix with
/// these rows, searched up to `max_size`. This is the minimum distance of the
/// dual code.
pub fn min_dependent_columns(
    field: PrimeField,
    rows: &[Vec<FieldElement>],
    n: usize,
    max_size: usize,
) -> Option<usize> {
    let k = rows.len();
    let cols: Vec<Vec<FieldElement>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    if cols.iter().any(|c| c.iter().all(FieldElement::is_zero)) {
        return Some(1);
    }
    (2..=max_size.min(n)).find(|&s| {
        let mut found = false;
        for_each_subset(n, s, |idx| {
            let sub: Vec<Vec<FieldElement>> = idx.iter().map(|&j| cols[j].clone()).collect();
            found = vectors_rank(field, k, &sub) < s;
            !found
        });
        found
    })
}

/// Visit every `s`-subset of `0..n` in lexicographic order until `visit`
/// returns `false`.
pub fn for_each_subset<F: FnMut(&[usize]) -> bool>(n: usize, s: usize, mut visit: F) {
    if s > n {
        return;
    }
    let mut idx: Vec<usize> = (0..s).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let Some(i) = (0..s).rev().find(|&i| idx[i] < n - s + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..s {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
