//! Run-length sequences over an arbitrary letter type.
//!
//! A word is stored as runs `(letter, exponent)` with nonzero exponents
//! and distinct adjacent letters, so it is freely reduced by
//! construction. [`Word`](crate::word::Word) and the lambda-letter words
//! of the construction module both build on these helpers.

/// Pushes `letter^exp` onto the tail of a reduced run sequence, merging
/// with or cancelling against the last run as needed. The sequence stays
/// reduced.
pub fn push<L: Copy + Eq>(runs: &mut Vec<(L, i64)>, letter: L, exp: i64) {
    if exp == 0 {
        return;
    }
    match runs.last_mut() {
        Some((last, e)) if *last == letter => {
            let merged = e
                .checked_add(exp)
                .expect("run exponent overflow; budgets should prevent this");
            if merged == 0 {
                runs.pop();
            } else {
                *e = merged;
            }
        }
        _ => runs.push((letter, exp)),
    }
}

pub fn concat<L: Copy + Eq>(a: &[(L, i64)], b: &[(L, i64)]) -> Vec<(L, i64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    for &(letter, exp) in b {
        push(&mut out, letter, exp);
    }
    out
}

pub fn invert<L: Copy + Eq>(a: &[(L, i64)]) -> Vec<(L, i64)> {
    a.iter().rev().map(|&(letter, exp)| (letter, -exp)).collect()
}

/// Reduces an arbitrary run list (adjacent duplicates, zero exponents).
pub fn reduce<L: Copy + Eq>(a: &[(L, i64)]) -> Vec<(L, i64)> {
    let mut out = Vec::with_capacity(a.len());
    for &(letter, exp) in a {
        push(&mut out, letter, exp);
    }
    out
}

pub fn letter_len<L>(a: &[(L, i64)]) -> u128 {
    a.iter().map(|&(_, e)| e.unsigned_abs() as u128).sum()
}

/// True when no run has exponent zero and adjacent runs carry distinct
/// letters.
pub fn is_reduced<L: Copy + Eq>(a: &[(L, i64)]) -> bool {
    a.iter().all(|&(_, e)| e != 0) && a.windows(2).all(|w| w[0].0 != w[1].0)
}

/// Expands to one entry per letter, signs `+1`/`-1`.
pub fn letters<L: Copy + Eq>(a: &[(L, i64)]) -> Vec<(L, i8)> {
    let mut out = Vec::new();
    for &(letter, exp) in a {
        let sign: i8 = if exp > 0 { 1 } else { -1 };
        for _ in 0..exp.unsigned_abs() {
            out.push((letter, sign));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_merges_and_cancels() {
        let mut r: Vec<(char, i64)> = Vec::new();
        push(&mut r, 'a', 2);
        push(&mut r, 'a', -1);
        push(&mut r, 'b', 1);
        push(&mut r, 'b', -1);
        push(&mut r, 'a', -1);
        assert!(r.is_empty());
    }

    #[test]
    fn concat_reduces_across_boundary() {
        let a = vec![('a', 1), ('b', 2)];
        let b = vec![('b', -2), ('a', 1)];
        assert_eq!(concat(&a, &b), vec![('a', 2)]);
    }

    #[test]
    fn invert_then_concat_is_identity() {
        let a = vec![('a', 3), ('b', -1), ('c', 2)];
        assert!(concat(&a, &invert(&a)).is_empty());
    }
}
