//! Hydra battles and the Ackermann hierarchy.
//!
//! A hydra is a word whose `a`-family letters all carry positive
//! exponents. One battle step removes the first letter and then
//! regenerates the remainder: in the original game every removal
//! regenerates (each `a_i` with `i > 1` becomes `a_i a_{i-1}`), in the
//! elaborated game only the removal of an `a`-letter does, and the
//! regeneration applies the group's defining automorphism to the whole
//! remainder. Step counters are big integers: the totals outgrow `u64`
//! long before the words outgrow memory.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::budget::Budget;
use crate::endo::FreeEndo;
use crate::error::{Error, Result};
use crate::word::{Generator, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BattleMode {
    Original,
    Elaborated,
}

/// How many intermediate words a trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotPolicy {
    None,
    /// Keeps the first half and last half of up to this many snapshots,
    /// eliding the middle.
    Capped(usize),
    Full,
}

impl SnapshotPolicy {
    pub const DEFAULT_CAP: usize = 64;
}

#[derive(Debug, Clone)]
pub struct BattleTrace {
    pub mode: BattleMode,
    pub total_steps: BigUint,
    pub a_removals: BigUint,
    pub snapshots: Option<Vec<Word>>,
    /// Number of snapshots dropped from the middle of the list.
    pub elided: u64,
    pub budget_hit: bool,
    pub final_word: Word,
}

impl BattleTrace {
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert(
            "mode".into(),
            serde_json::Value::String(
                match self.mode {
                    BattleMode::Original => "original",
                    BattleMode::Elaborated => "elaborated",
                }
                .into(),
            ),
        );
        map.insert(
            "total_steps".into(),
            serde_json::Value::String(self.total_steps.to_str_radix(10)),
        );
        map.insert(
            "a_removals".into(),
            serde_json::Value::String(self.a_removals.to_str_radix(10)),
        );
        map.insert("budget_hit".into(), serde_json::Value::Bool(self.budget_hit));
        if let Some(snaps) = &self.snapshots {
            map.insert(
                "snapshots".into(),
                serde_json::Value::Array(
                    snaps
                        .iter()
                        .map(|w| serde_json::Value::String(w.render()))
                        .collect(),
                ),
            );
            map.insert("elided".into(), serde_json::Value::from(self.elided));
        }
        serde_json::Value::Object(map)
    }
}

struct Snapshots {
    policy: SnapshotPolicy,
    head: Vec<Word>,
    tail: std::collections::VecDeque<Word>,
    elided: u64,
}

impl Snapshots {
    fn new(policy: SnapshotPolicy) -> Self {
        Snapshots {
            policy,
            head: Vec::new(),
            tail: std::collections::VecDeque::new(),
            elided: 0,
        }
    }

    fn push(&mut self, w: &Word) {
        match self.policy {
            SnapshotPolicy::None => {}
            SnapshotPolicy::Full => self.head.push(w.clone()),
            SnapshotPolicy::Capped(cap) => {
                let half = (cap / 2).max(1);
                if self.head.len() < half {
                    self.head.push(w.clone());
                } else {
                    if self.tail.len() == half {
                        self.tail.pop_front();
                        self.elided += 1;
                    }
                    self.tail.push_back(w.clone());
                }
            }
        }
    }

    fn finish(self) -> (Option<Vec<Word>>, u64) {
        match self.policy {
            SnapshotPolicy::None => (None, 0),
            _ => {
                let mut all = self.head;
                all.extend(self.tail);
                (Some(all), self.elided)
            }
        }
    }
}

/// Validates the positivity invariant: every `a`-family run positive. In
/// original mode `a_0` and non-`a` letters are rejected too.
pub fn validate_hydra(w: &Word, mode: BattleMode, k: u32) -> Result<()> {
    for &(g, e) in w.runs() {
        match g {
            Generator::A(i) => {
                if e < 0 {
                    return Err(Error::InvalidHydra(format!(
                        "a{i} occurs with negative exponent"
                    )));
                }
                let lo = match mode {
                    BattleMode::Original => 1,
                    BattleMode::Elaborated => 0,
                };
                if i < lo || i > k {
                    return Err(Error::InvalidHydra(format!("a{i} out of range")));
                }
            }
            _ if mode == BattleMode::Original => {
                return Err(Error::InvalidHydra(format!(
                    "letter {} not allowed in an original battle",
                    w.alphabet().name(g)
                )));
            }
            Generator::T => {
                return Err(Error::InvalidHydra("t is not a hydra letter".into()));
            }
            _ => {}
        }
    }
    Ok(())
}

fn strip_first(w: &Word) -> (Generator, i8, Word) {
    let &(g, e) = w.runs().first().expect("word is nonempty");
    let sign: i8 = if e > 0 { 1 } else { -1 };
    let mut rest: Vec<(Generator, i64)> = w.runs().to_vec();
    if e.abs() == 1 {
        rest.remove(0);
    } else {
        rest[0].1 -= sign as i64;
    }
    let rest = Word::from_runs(w.alphabet(), &rest).expect("tail of a valid word");
    (g, sign, rest)
}

/// Original-game regeneration: `a_i -> a_i a_{i-1}` for `i > 1`.
fn regenerate_original(w: &Word, budget: &Budget) -> Result<Word> {
    let mut out: Vec<(Generator, i64)> = Vec::new();
    for &(g, e) in w.runs() {
        match g {
            Generator::A(i) if i > 1 => {
                // e copies of a_i a_{i-1}
                budget.check_steps(e.unsigned_abs(), "regenerating")?;
                for _ in 0..e {
                    crate::runs::push(&mut out, Generator::A(i), 1);
                    crate::runs::push(&mut out, Generator::A(i - 1), 1);
                }
            }
            _ => crate::runs::push(&mut out, g, e),
        }
        budget.check_runs(out.len(), "regenerating")?;
    }
    Word::from_runs(w.alphabet(), &out)
}

/// The original battle over `a_1..a_k`. `total_steps` is `H(w)`.
pub fn battle_original(
    w: &Word,
    k: u32,
    budget: &Budget,
    policy: SnapshotPolicy,
) -> Result<BattleTrace> {
    validate_hydra(w, BattleMode::Original, k)?;
    let step_cap = BigUint::from(budget.max_steps);
    let mut cur = w.clone();
    let mut steps = BigUint::zero();
    let mut snaps = Snapshots::new(policy);
    let mut budget_hit = false;
    while !cur.is_empty() {
        if steps >= step_cap || cur.letter_len() > budget.max_letter_len as u128 {
            budget_hit = true;
            break;
        }
        // a word of plain a_1 runs just melts away, one letter per step;
        // collapse it unless the caller wants the full trace
        if policy == SnapshotPolicy::None
            && cur.runs().iter().all(|&(g, _)| g == Generator::A(1))
        {
            steps += BigUint::from(cur.letter_len());
            cur = Word::empty(cur.alphabet());
            break;
        }
        let (_, _, rest) = strip_first(&cur);
        cur = regenerate_original(&rest, budget)?;
        steps += BigUint::one();
        snaps.push(&cur);
    }
    let (snapshots, elided) = snaps.finish();
    Ok(BattleTrace {
        mode: BattleMode::Original,
        total_steps: steps.clone(),
        a_removals: steps,
        snapshots,
        elided,
        budget_hit,
        final_word: cur,
    })
}

/// The elaborated battle: regeneration applies `theta` to the remainder,
/// and only after an `a`-letter is removed.
pub fn battle_elaborated(
    w: &Word,
    theta: &FreeEndo,
    budget: &Budget,
    policy: SnapshotPolicy,
) -> Result<BattleTrace> {
    let k = theta
        .alphabet()
        .generators()
        .iter()
        .filter_map(|g| g.a_index())
        .max()
        .unwrap_or(0);
    validate_hydra(w, BattleMode::Elaborated, k)?;
    let step_cap = BigUint::from(budget.max_steps);
    let mut cur = w.clone();
    let mut steps = BigUint::zero();
    let mut a_removals = BigUint::zero();
    let mut snaps = Snapshots::new(policy);
    let mut budget_hit = false;
    while !cur.is_empty() {
        if steps >= step_cap || cur.letter_len() > budget.max_letter_len as u128 {
            budget_hit = true;
            break;
        }
        // a run of non-a letters is removed one letter per step with no
        // regeneration; collapse the whole run at once
        let &(g, e) = cur.runs().first().unwrap();
        if !g.is_a() {
            steps += BigUint::from(e.unsigned_abs());
            let mut rest = cur.runs().to_vec();
            rest.remove(0);
            cur = Word::from_runs(cur.alphabet(), &rest)?;
            snaps.push(&cur);
            continue;
        }
        let (_, _, rest) = strip_first(&cur);
        cur = theta.apply(&rest, budget)?;
        steps += BigUint::one();
        a_removals += BigUint::one();
        snaps.push(&cur);
    }
    let (snapshots, elided) = snaps.finish();
    Ok(BattleTrace {
        mode: BattleMode::Elaborated,
        total_steps: steps,
        a_removals,
        snapshots,
        elided,
        budget_hit,
        final_word: cur,
    })
}

/// The projection sending a hydra to an original-game hydra: non-`a`
/// letters are deleted and `a_0` becomes `a_1`.
pub fn project_bar(w: &Word) -> Word {
    let mut out: Vec<(Generator, i64)> = Vec::new();
    for &(g, e) in w.runs() {
        match g {
            Generator::A(0) => crate::runs::push(&mut out, Generator::A(1), e),
            Generator::A(_) => crate::runs::push(&mut out, g, e),
            _ => {}
        }
    }
    Word::from_runs(w.alphabet(), &out).expect("projection stays in the alphabet")
}

/// `H_k(n) = H(a_k^n)`, with `H_k(0) = 0`.
pub fn hydra_h_k(k: u32, n: u64, budget: &Budget) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidHydra("k must be at least 1".into()));
    }
    let alphabet = crate::word::Alphabet::new((1..=k).map(Generator::A).collect());
    if n == 0 {
        return Ok(BigUint::zero());
    }
    let n = i64::try_from(n).map_err(|_| Error::budget("hydra size"))?;
    let w = Word::single(&alphabet, Generator::A(k), n)?;
    let trace = battle_original(&w, k, budget, SnapshotPolicy::None)?;
    if trace.budget_hit {
        return Err(Error::budget(format!("H_{k}({n})")));
    }
    Ok(trace.total_steps)
}

/// The Ackermann hierarchy: `A_0(n) = n + 2`, `A_1(0) = 0`,
/// `A_k(0) = 1` for `k >= 2`, `A_{k+1}(n+1) = A_k(A_{k+1}(n))`.
///
/// Levels 0..2 use the closed consequences of the recursion
/// (`A_1(n) = 2n`, `A_2(n) = 2^n`; the unit tests pin these against the
/// literal recursion), higher levels iterate with bit-size guards.
pub fn ackermann(k: u32, n: u64, budget: &Budget) -> Result<BigUint> {
    ackermann_big(k, &BigUint::from(n), budget)
}

fn ackermann_big(k: u32, n: &BigUint, budget: &Budget) -> Result<BigUint> {
    budget.check_bits(n.bits(), "Ackermann argument")?;
    match k {
        0 => Ok(n + 2u32),
        1 => Ok(n * 2u32),
        2 => {
            let shift = u64::try_from(n).map_err(|_| Error::budget("Ackermann tower"))?;
            budget.check_bits(shift + 1, "Ackermann value")?;
            Ok(BigUint::one() << shift)
        }
        _ => {
            if n.is_zero() {
                return Ok(BigUint::one());
            }
            let reps = u64::try_from(n).map_err(|_| Error::budget("Ackermann iteration count"))?;
            budget.check_steps(reps, "Ackermann iteration")?;
            let mut acc = BigUint::one();
            for _ in 0..reps {
                acc = ackermann_big(k - 1, &acc, budget)?;
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;
    use std::sync::Arc;

    fn a_alphabet(k: u32) -> Arc<Alphabet> {
        Alphabet::new((1..=k).map(Generator::A).collect())
    }

    fn battle(word: &str, k: u32) -> BattleTrace {
        let al = a_alphabet(k);
        let w = al.parse_word(word).unwrap();
        battle_original(&w, k, &Budget::default(), SnapshotPolicy::Capped(64)).unwrap()
    }

    #[test]
    fn paper_example_h_of_a2_cubed() {
        let trace = battle("a2^3", 2);
        assert_eq!(trace.total_steps, BigUint::from(7u32));
        assert!(!trace.budget_hit);
        // intermediate words of the worked example
        let snaps: Vec<String> = trace.snapshots.unwrap().iter().map(|w| w.render()).collect();
        assert_eq!(
            snaps,
            vec!["a2 a1 a2 a1", "a1 a2 a1^2", "a2 a1^3", "a1^3", "a1^2", "a1", ""]
        );
    }

    #[test]
    fn empty_hydra_takes_no_steps() {
        let trace = battle("", 1);
        assert_eq!(trace.total_steps, BigUint::zero());
    }

    #[test]
    fn a1_power_never_regenerates() {
        let trace = battle("a1^5", 1);
        assert_eq!(trace.total_steps, BigUint::from(5u32));
    }

    #[test]
    fn h1_is_identity_up_to_twenty() {
        let b = Budget::default();
        for n in 0..=20u64 {
            assert_eq!(hydra_h_k(1, n, &b).unwrap(), BigUint::from(n));
        }
    }

    #[test]
    fn h2_matches_two_to_n_minus_one() {
        // brute-force battle simulation; 1, 3, 7, 15 checked by hand
        let b = Budget::default();
        for n in 1..=12u64 {
            let expected = (BigUint::one() << n) - 1u32;
            assert_eq!(hydra_h_k(2, n, &b).unwrap(), expected, "H_2({n})");
        }
    }

    #[test]
    fn h3_small_values() {
        let b = Budget::default();
        assert_eq!(hydra_h_k(3, 1, &b).unwrap(), BigUint::from(1u32));
        // a3 a3 -> a3 a2 -> a2 a1 -> a1 -> empty
        assert_eq!(hydra_h_k(3, 2, &b).unwrap(), BigUint::from(4u32));
    }

    #[test]
    fn rejects_invalid_hydras() {
        let al = a_alphabet(2);
        let w = Word::from_runs(&al, &[(Generator::A(2), -1)]).unwrap();
        assert!(matches!(
            battle_original(&w, 2, &Budget::default(), SnapshotPolicy::None),
            Err(Error::InvalidHydra(_))
        ));
    }

    #[test]
    fn budget_stops_h4_of_4() {
        let al = a_alphabet(4);
        let w = al.parse_word("a4^4").unwrap();
        let trace =
            battle_original(&w, 4, &Budget::default(), SnapshotPolicy::None).unwrap();
        assert!(trace.budget_hit);
        assert!(!trace.final_word.is_empty());
        assert!(matches!(
            hydra_h_k(4, 4, &Budget::default()),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn project_bar_examples() {
        let al = Alphabet::new(vec![
            Generator::A(0),
            Generator::A(1),
            Generator::A(2),
            Generator::B(1),
        ]);
        let w = al.parse_word("a0 b1 a2").unwrap();
        assert_eq!(project_bar(&w).render(), "a1 a2");
        let w = al.parse_word("b1 b1^-1").unwrap();
        assert!(project_bar(&w).is_empty());
        let w = al.parse_word("a0 a1^-1").unwrap();
        assert!(project_bar(&w).is_empty());
    }

    // Literal recursion, memoized, for small arguments only: the oracle
    // for the closed forms used at levels 1 and 2.
    fn literal_ack(k: u32, n: u64, memo: &mut std::collections::HashMap<(u32, u64), u64>) -> u64 {
        if let Some(&v) = memo.get(&(k, n)) {
            return v;
        }
        let v = match (k, n) {
            (0, n) => n + 2,
            (1, 0) => 0,
            (_, 0) => 1,
            (k, n) => {
                let inner = literal_ack(k, n - 1, memo);
                literal_ack(k - 1, inner, memo)
            }
        };
        memo.insert((k, n), v);
        v
    }

    #[test]
    fn ackermann_matches_literal_recursion() {
        let b = Budget::default();
        let mut memo = std::collections::HashMap::new();
        for n in 0..=20u64 {
            assert_eq!(
                ackermann(1, n, &b).unwrap(),
                BigUint::from(literal_ack(1, n, &mut memo))
            );
            // the literal recursion unwinds A_1 one step at a time, so
            // keep its arguments small enough for the test stack
            if n <= 10 {
                assert_eq!(
                    ackermann(2, n, &b).unwrap(),
                    BigUint::from(literal_ack(2, n, &mut memo))
                );
            }
        }
        for n in 0..=3u64 {
            assert_eq!(
                ackermann(3, n, &b).unwrap(),
                BigUint::from(literal_ack(3, n, &mut memo))
            );
        }
    }

    #[test]
    fn ackermann_paper_values() {
        let b = Budget::default();
        assert_eq!(ackermann(1, 7, &b).unwrap(), BigUint::from(14u32));
        assert_eq!(ackermann(2, 10, &b).unwrap(), BigUint::from(1024u32));
        assert_eq!(ackermann(3, 4, &b).unwrap(), BigUint::from(65536u32));
        assert_eq!(ackermann(1, 0, &b).unwrap(), BigUint::zero());
        assert_eq!(ackermann(2, 0, &b).unwrap(), BigUint::one());
        assert_eq!(ackermann(4, 0, &b).unwrap(), BigUint::one());
    }

    #[test]
    fn ackermann_a4_of_4_hits_budget_quickly() {
        let start = std::time::Instant::now();
        assert!(matches!(
            ackermann(4, 4, &Budget::default()),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(start.elapsed().as_secs() < 10);
    }

    #[test]
    fn sandwich_between_ackermann_levels() {
        // 2^{n-1} <= H_2(n) <= 2^n for 2 <= n <= 12
        let b = Budget::default();
        for n in 2..=12u64 {
            let h = hydra_h_k(2, n, &b).unwrap();
            let lo = BigUint::one() << (n - 1);
            let hi = BigUint::one() << n;
            assert!(lo <= h && h <= hi, "sandwich fails at n = {n}");
        }
    }
}
