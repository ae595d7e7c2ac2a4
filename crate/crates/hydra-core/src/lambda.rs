//! Words in the distinguished free subgroup basis and the explicit
//! constructions built from the battle rewriting.
//!
//! The subgroup is generated by the letters `(a_i t)` together with the
//! free-part generators outside the `a` family. A [`LambdaWord`] is a
//! freely reduced run sequence over those letters; expanding `(a_i t)`
//! to `a_i · t` turns it into an ambient letter stream.
//!
//! The builders realize the rewriting identities behind the distortion
//! bound: battle-driven rewriting of positive words, the words
//! `u_hat_{k,n}` equal to `a_k^n t^{H_k(n)}`, the conjugate families
//! `tau_m` and `v_n`, and the witness word for
//! `a_k^n a_2 t a_1 a_2^{-1} a_k^{-n}`. Every builder checks its
//! defining equality through the normal-form engine before returning.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fbc::{make_g, FbcGroup, GroupElement};
use crate::hydra::hydra_h_k;
use crate::runs;
use crate::word::{Generator, Word};

/// A letter of the subgroup basis: `(a_i t)` or a non-`a` generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LambdaLetter {
    At(u32),
    Gen(Generator),
}

impl LambdaLetter {
    pub fn is_at(&self) -> bool {
        matches!(self, LambdaLetter::At(_))
    }
}

/// A freely reduced word in lambda letters.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct LambdaWord {
    runs: Vec<(LambdaLetter, i64)>,
}

impl LambdaWord {
    pub fn empty() -> LambdaWord {
        LambdaWord::default()
    }

    pub fn from_runs(raw: &[(LambdaLetter, i64)]) -> LambdaWord {
        LambdaWord {
            runs: runs::reduce(raw),
        }
    }

    pub fn runs(&self) -> &[(LambdaLetter, i64)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn letter_len(&self) -> u128 {
        runs::letter_len(&self.runs)
    }

    pub fn push(&mut self, letter: LambdaLetter, exp: i64) {
        runs::push(&mut self.runs, letter, exp);
    }

    pub fn concat(&self, other: &LambdaWord) -> LambdaWord {
        LambdaWord {
            runs: runs::concat(&self.runs, &other.runs),
        }
    }

    pub fn inverse(&self) -> LambdaWord {
        LambdaWord {
            runs: runs::invert(&self.runs),
        }
    }

    /// Embeds a word on the non-`a` generators as lambda letters.
    pub fn from_rest_word(w: &Word) -> Result<LambdaWord> {
        let mut out = LambdaWord::empty();
        for &(g, e) in w.runs() {
            if g.is_a() || g == Generator::T {
                return Err(Error::ParamMismatch(
                    "word contains a-family or t letters".into(),
                ));
            }
            out.push(LambdaLetter::Gen(g), e);
        }
        Ok(out)
    }

    /// The ambient letter stream: `(a_i t)^{±1}` becomes `a_i t` or
    /// `t^{-1} a_i^{-1}`.
    pub fn expand(&self, group: &FbcGroup) -> Result<Word> {
        let full = group.full_alphabet();
        let mut raw: Vec<(Generator, i64)> = Vec::new();
        for &(letter, e) in &self.runs {
            match letter {
                LambdaLetter::At(i) => {
                    let a = Generator::A(i);
                    if e > 0 {
                        for _ in 0..e {
                            runs::push(&mut raw, a, 1);
                            runs::push(&mut raw, Generator::T, 1);
                        }
                    } else {
                        for _ in 0..(-e) {
                            runs::push(&mut raw, Generator::T, -1);
                            runs::push(&mut raw, a, -1);
                        }
                    }
                }
                LambdaLetter::Gen(g) => runs::push(&mut raw, g, e),
            }
        }
        Word::from_runs(full, &raw)
    }

    /// Deletes non-`a` letters and sends `(a_0 t)` to `(a_1 t)`, then
    /// freely reduces.
    pub fn project(&self) -> LambdaWord {
        let mut out = LambdaWord::empty();
        for &(letter, e) in &self.runs {
            match letter {
                LambdaLetter::At(0) => out.push(LambdaLetter::At(1), e),
                LambdaLetter::At(_) => out.push(letter, e),
                LambdaLetter::Gen(_) => {}
            }
        }
        out
    }

    /// Total `(a_i t)` letter count and whether all their exponents are
    /// positive.
    pub fn a_letter_stats(&self) -> (u128, bool) {
        let mut count = 0u128;
        let mut positive = true;
        for &(letter, e) in &self.runs {
            if letter.is_at() {
                count += e.unsigned_abs() as u128;
                positive &= e > 0;
            }
        }
        (count, positive)
    }

    pub fn render(&self, group: &FbcGroup) -> String {
        let f = group.f_alphabet();
        let parts: Vec<String> = self
            .runs
            .iter()
            .map(|&(letter, e)| {
                let name = match letter {
                    LambdaLetter::At(i) => format!("(a{i}t)"),
                    LambdaLetter::Gen(g) => f.name(g),
                };
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        parts.join(" ")
    }
}

/// The implementation constant in the length bounds: one more than the
/// longest generator image, floored at 2.
pub fn c_impl(group: &FbcGroup) -> u128 {
    let b = Budget::default();
    let max_image = group
        .f_alphabet()
        .generators()
        .iter()
        .map(|&g| {
            group
                .theta()
                .apply(&Word::single(group.f_alphabet(), g, 1).unwrap(), &b)
                .map(|w| w.letter_len())
                .unwrap_or(1)
        })
        .max()
        .unwrap_or(1);
    (1 + max_image).max(2)
}

/// The ordered lambda basis of a group.
pub fn lambda_letters(group: &FbcGroup) -> Vec<LambdaLetter> {
    let mut letters: Vec<LambdaLetter> = group
        .a_indices()
        .into_iter()
        .map(LambdaLetter::At)
        .collect();
    letters.extend(group.rest_generators().into_iter().map(LambdaLetter::Gen));
    letters
}

fn validate_positive_hydra_word(group: &FbcGroup, w: &Word) -> Result<()> {
    for &(g, e) in w.runs() {
        match g {
            Generator::A(_) if e < 0 => {
                return Err(Error::InvalidHydra(
                    "a-letters must have positive exponents".into(),
                ))
            }
            Generator::T => {
                return Err(Error::InvalidHydra("t is not allowed here".into()));
            }
            _ => {}
        }
        if !group.f_alphabet().contains(g) {
            return Err(Error::UnknownGenerator {
                name: w.alphabet().name(g),
            });
        }
    }
    Ok(())
}

/// Battle-driven rewriting of a positive-`a` word: strip the first
/// letter, emit `(a_i t)` and regenerate on `a`-removals, emit non-`a`
/// letters unchanged. Returns the lambda word and the number of
/// `a`-removals `s'`; the expansion equals `w · t^{s'}` in the group.
pub fn rewrite_positive(group: &FbcGroup, w: &Word) -> Result<(LambdaWord, BigUint)> {
    validate_positive_hydra_word(group, w)?;
    let budget = group.budget();
    let step_cap = BigUint::from(budget.max_steps);
    let mut cur = w.reinterpret(group.f_alphabet())?;
    let mut out = LambdaWord::empty();
    let mut removals = BigUint::zero();
    let mut steps = BigUint::zero();
    while !cur.is_empty() {
        if steps >= step_cap || cur.letter_len() > budget.max_letter_len as u128 {
            return Err(Error::budget("battle rewriting"));
        }
        let &(g, e) = cur.runs().first().unwrap();
        if let Some(i) = g.a_index() {
            out.push(LambdaLetter::At(i), 1);
            let mut rest = cur.runs().to_vec();
            if e == 1 {
                rest.remove(0);
            } else {
                rest[0].1 -= 1;
            }
            let rest = Word::from_runs(group.f_alphabet(), &rest)?;
            cur = group.theta().apply(&rest, budget)?;
            removals += 1u32;
        } else {
            // non-a removals do not regenerate; take the whole run
            out.push(LambdaLetter::Gen(g), e);
            let mut rest = cur.runs().to_vec();
            rest.remove(0);
            cur = Word::from_runs(group.f_alphabet(), &rest)?;
        }
        steps += 1u32;
    }
    // the emitted word must expand to w t^{s'} in the group
    let s = i64::try_from(&removals).map_err(|_| Error::budget("t-exponent"))?;
    let target = w
        .reinterpret(group.full_alphabet())?
        .concat(&Word::single(group.full_alphabet(), Generator::T, 1)?.pow(s))?;
    if !group.equal_words(&out.expand(group)?, &target)? {
        return Err(Error::CheckFails(
            "battle rewriting does not reproduce w t^s".into(),
        ));
    }
    Ok((out, removals))
}

/// `u_hat_{k,n}`: the battle rewriting of `a_k^n`, equal to
/// `a_k^n t^{H_k(n)}` in the group, with its length bounded between
/// `H_k(n)` and `C^{H_k(n)} n`.
pub fn build_u_hat(group: &FbcGroup, k: u32, n: u64) -> Result<LambdaWord> {
    if n < 1 || !group.a_indices().contains(&k) {
        return Err(Error::ParamMismatch(format!(
            "need n >= 1 and a_{k} present"
        )));
    }
    let w = Word::single(
        group.f_alphabet(),
        Generator::A(k),
        i64::try_from(n).map_err(|_| Error::budget("hydra size"))?,
    )?;
    let (uhat, s) = rewrite_positive(group, &w)?;
    let h = hydra_h_k(k, n, group.budget())?;
    if s != h {
        return Err(Error::CheckFails(format!(
            "a-removal count {s} differs from H_{k}({n}) = {h}"
        )));
    }
    let len = uhat.letter_len();
    let h128 = u128::try_from(&h).map_err(|_| Error::budget("H value"))?;
    let bound = u32::try_from(h128)
        .ok()
        .and_then(|hp| c_impl(group).checked_pow(hp))
        .and_then(|p| p.checked_mul(n as u128));
    if (len as u128) < h128 || bound.map(|b| len > b).unwrap_or(false) {
        return Err(Error::CheckFails(format!(
            "length {len} violates H <= len <= C^H n at (k, n) = ({k}, {n})"
        )));
    }
    let (_, all_positive) = uhat.a_letter_stats();
    if !all_positive {
        return Err(Error::CheckFails(
            "u_hat contains a negative (a_i t)".into(),
        ));
    }
    Ok(uhat)
}

fn group_uv(group: &FbcGroup) -> Result<(Word, Word)> {
    let (u, v) = group
        .uv()
        .ok_or_else(|| Error::ParamMismatch("group has no u, v data".into()))?;
    Ok((u.clone(), v.clone()))
}

/// `tau_m`, the lambda word equal to `t^{-m} a_1 t^{m+1}`:
/// `(a_0 t)` for `m = 1`, and for larger `m` images of `u` and `v`
/// under powers of `phi` around a single `(a_1 t)` or `(a_0 t)`.
pub fn build_tau(group: &FbcGroup, m: u64) -> Result<LambdaWord> {
    if m < 1 {
        return Err(Error::ParamMismatch("need m >= 1".into()));
    }
    if !group.a_indices().contains(&0) {
        return Err(Error::ParamMismatch("group has no a_0 generator".into()));
    }
    let budget = group.budget();
    let (u, v) = group_uv(group)?;
    let m_i = i64::try_from(m).map_err(|_| Error::budget("tau index"))?;
    let theta = group.theta();

    let mut out = LambdaWord::empty();
    if m == 1 {
        out.push(LambdaLetter::At(0), 1);
    } else if m % 2 == 0 {
        // phi^{m-2}(u) ... phi^2(u) u (a_1 t) phi(v) phi^3(v) ... phi^{m-1}(v)
        let mut j = m_i - 2;
        while j >= 0 {
            out = out.concat(&LambdaWord::from_rest_word(
                &theta.power_apply(j, &u, budget)?,
            )?);
            j -= 2;
        }
        out.push(LambdaLetter::At(1), 1);
        let mut j = 1;
        while j <= m_i - 1 {
            out = out.concat(&LambdaWord::from_rest_word(
                &theta.power_apply(j, &v, budget)?,
            )?);
            j += 2;
        }
    } else {
        // phi^{m-2}(u) ... phi^3(u) phi(u) (a_0 t) phi^2(v) ... phi^{m-1}(v)
        let mut j = m_i - 2;
        while j >= 1 {
            out = out.concat(&LambdaWord::from_rest_word(
                &theta.power_apply(j, &u, budget)?,
            )?);
            j -= 2;
        }
        out.push(LambdaLetter::At(0), 1);
        let mut j = 2;
        while j <= m_i - 1 {
            out = out.concat(&LambdaWord::from_rest_word(
                &theta.power_apply(j, &v, budget)?,
            )?);
            j += 2;
        }
    }

    // tau_m = t^{-m} a_1 t^{m+1} in the group
    let full = group.full_alphabet();
    let t = Word::single(full, Generator::T, 1)?;
    let target = t
        .pow(-m_i)
        .concat(&full.parse_word("a1")?)?
        .concat(&t.pow(m_i + 1))?;
    if !group.equal_words(&out.expand(group)?, &target)? {
        return Err(Error::CheckFails(format!(
            "tau_{m} does not equal t^-{m} a1 t^{}",
            m + 1
        )));
    }
    Ok(out)
}

/// `v_n = tau_1 tau_3 ... tau_{2n-1}`, satisfying
/// `t^{-1} (a_1 t^{-1})^n = v_n t^{-2n-1}`; it carries exactly `n`
/// `a`-letters, all positive.
pub fn build_v(group: &FbcGroup, n: u64) -> Result<LambdaWord> {
    if !group.a_indices().contains(&0) {
        return Err(Error::ParamMismatch("group has no a_0 generator".into()));
    }
    let mut out = LambdaWord::empty();
    for i in 1..=n {
        out = out.concat(&build_tau(group, 2 * i - 1)?);
    }

    // t^{-1} (a_1 t^{-1})^n = v_n t^{-2n-1} in the group
    let n_i = i64::try_from(n).map_err(|_| Error::budget("v index"))?;
    let full = group.full_alphabet();
    let t = Word::single(full, Generator::T, 1)?;
    let a1 = full.parse_word("a1")?;
    let lhs = t.pow(-1).concat(&a1.concat(&t.pow(-1))?.pow(n_i))?;
    let rhs = out.expand(group)?.concat(&t.pow(-2 * n_i - 1))?;
    if !group.equal_words(&lhs, &rhs)? {
        return Err(Error::CheckFails(format!(
            "v_{n} t^-{} does not equal t^-1 (a1 t^-1)^{n}",
            2 * n + 1
        )));
    }
    let (count, all_positive) = out.a_letter_stats();
    if count != n as u128 || !all_positive {
        return Err(Error::CheckFails(format!(
            "v_{n} carries {count} a-letters (positive: {all_positive}), expected {n}"
        )));
    }
    let len = out.letter_len();
    if len < n as u128 || len > c_impl(group).saturating_pow(n.min(127) as u32) {
        return Err(Error::CheckFails(format!(
            "length {len} of v_{n} violates n <= len <= C^n"
        )));
    }
    Ok(out)
}

pub struct Witness {
    pub word: LambdaWord,
    /// Raw target `a_k^n a_2 t a_1 a_2^{-1} a_k^{-n}`.
    pub target: Word,
    /// The projected reduced lambda word over the `(a_i t)` letters.
    pub projected: LambdaWord,
    pub h: BigUint,
}

/// The distortion witness: a lambda word equal to
/// `a_k^n a_2 t a_1 a_2^{-1} a_k^{-n}` whose projection has length
/// exactly `2 H_k(n) + 3`.
pub fn build_witness(group: &FbcGroup, k: u32, n: u64) -> Result<Witness> {
    if k < 2 || n < 1 {
        return Err(Error::ParamMismatch("need k >= 2 and n >= 1".into()));
    }
    let h_big = hydra_h_k(k, n, group.budget())?;
    let h = u64::try_from(&h_big).map_err(|_| Error::budget("H value"))?;

    let uhat = build_u_hat(group, k, n)?;
    let v_h = build_v(group, h)?;
    let tau_2h = build_tau(group, 2 * h)?;

    let mut at2 = LambdaWord::empty();
    at2.push(LambdaLetter::At(2), 1);
    let word = uhat
        .concat(&at2)
        .concat(&v_h)
        .concat(&tau_2h)
        .concat(&v_h.inverse())
        .concat(&at2.inverse())
        .concat(&uhat.inverse());

    let full = group.full_alphabet();
    let n_i = i64::try_from(n).map_err(|_| Error::budget("witness size"))?;
    let ak = Word::single(full, Generator::A(k), 1)?;
    let target = ak
        .pow(n_i)
        .concat(&full.parse_word("a2 t a1 a2^-1")?)?
        .concat(&ak.pow(-n_i))?;
    if !group.equal_words(&word.expand(group)?, &target)? {
        return Err(Error::CheckFails(format!(
            "witness at (k, n) = ({k}, {n}) does not equal its target"
        )));
    }

    // projecting must reproduce the original-battle word of G_k around
    // the commutator core, of length exactly 2 H_k(n) + 3
    let projected = word.project();
    let g_k = make_g(k, *group.budget())?;
    let a_k_n = Word::single(g_k.f_alphabet(), Generator::A(k), n_i)?;
    let (u_kn, _) = rewrite_positive(&g_k, &a_k_n)?;
    let mut core = LambdaWord::empty();
    core.push(LambdaLetter::At(2), 1);
    core.push(LambdaLetter::At(1), 1);
    core.push(LambdaLetter::At(2), -1);
    let expected = u_kn.concat(&core).concat(&u_kn.inverse());
    if projected != expected {
        return Err(Error::CheckFails(format!(
            "projected witness at ({k}, {n}) is not u_kn (a2t)(a1t)(a2t)^-1 u_kn^-1"
        )));
    }
    let expected_len = 2u128 * u128::try_from(&h_big).unwrap() + 3;
    if projected.letter_len() != expected_len {
        return Err(Error::CheckFails(format!(
            "projected witness length {} differs from 2 H + 3 = {expected_len}",
            projected.letter_len()
        )));
    }
    Ok(Witness {
        word,
        target,
        projected,
        h: h_big,
    })
}

/// Multiplies a normal form by one lambda letter.
fn step_lambda(
    group: &FbcGroup,
    nf: &GroupElement,
    letter: LambdaLetter,
    sign: i8,
) -> Result<GroupElement> {
    let budget = group.budget();
    let f = group.f_alphabet();
    match letter {
        LambdaLetter::At(i) => {
            let a = Word::single(f, Generator::A(i), sign as i64)?;
            if sign > 0 {
                // g · a_i t
                let body = group.theta().apply(&nf.body.concat(&a)?, budget)?;
                Ok(GroupElement {
                    t_exp: nf.t_exp + 1,
                    body,
                })
            } else {
                // g · t^{-1} a_i^{-1}
                let body = group
                    .theta()
                    .power_apply(-1, &nf.body, budget)?
                    .concat(&a)?;
                Ok(GroupElement {
                    t_exp: nf.t_exp - 1,
                    body,
                })
            }
        }
        LambdaLetter::Gen(g) => Ok(GroupElement {
            t_exp: nf.t_exp,
            body: nf.body.concat(&Word::single(f, g, sign as i64)?)?,
        }),
    }
}

/// Depth-first enumeration of freely reduced lambda words up to
/// `max_len`, visiting each with its normal form.
fn enumerate_lambda<F>(group: &FbcGroup, max_len: u32, visit: &mut F) -> Result<u64>
where
    F: FnMut(&LambdaWord, &GroupElement) -> Result<()>,
{
    let letters = lambda_letters(group);
    let mut count = 0u64;
    let mut stack: Vec<(LambdaWord, GroupElement, Option<(LambdaLetter, i8)>)> = Vec::new();
    stack.push((LambdaWord::empty(), group.identity(), None));
    while let Some((word, nf, last)) = stack.pop() {
        visit(&word, &nf)?;
        count += 1;
        group.budget().check_steps(count, "lambda enumeration")?;
        if word.letter_len() as u32 >= max_len {
            continue;
        }
        for &letter in &letters {
            for sign in [1i8, -1] {
                if let Some((pl, ps)) = last {
                    if pl == letter && ps == -sign {
                        continue; // immediate cancellation
                    }
                }
                let mut next = word.clone();
                next.push(letter, sign as i64);
                let nf2 = step_lambda(group, &nf, letter, sign)?;
                stack.push((next, nf2, Some((letter, sign))));
            }
        }
    }
    Ok(count)
}

#[derive(Debug)]
pub struct FreenessReport {
    pub max_len: u32,
    pub words_checked: u64,
    /// Occurrences of the positivity hypothesis: once for the body
    /// shifted past the `t`-power, once for the plain body.
    pub positivity_cases: (u64, u64),
}

impl FreenessReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "max_len": self.max_len,
            "words_checked": self.words_checked,
            "positivity_cases_shifted": self.positivity_cases.0,
            "positivity_cases_body": self.positivity_cases.1,
        })
    }
}

fn all_a_positive(w: &Word) -> bool {
    w.runs().iter().all(|&(g, e)| !g.is_a() || e > 0)
}

/// Exhaustively checks, over all reduced lambda words of length at most
/// `max_len`: distinct normal forms, no nonempty word in `<t>`, and the
/// positivity property (a positive-`a` body forces positive `(a_i t)`
/// exponents — checked both for the plain body and for the body
/// shifted to the right of the `t`-power).
pub fn freeness_scan(group: &FbcGroup, max_len: u32) -> Result<FreenessReport> {
    let mut seen: HashMap<(i64, String), LambdaWord> = HashMap::new();
    let mut shifted_cases = 0u64;
    let mut body_cases = 0u64;
    let budget = group.budget();
    let count = enumerate_lambda(group, max_len, &mut |word, nf| {
        let key = (nf.t_exp, nf.body.render());
        if let Some(prior) = seen.insert(key, word.clone()) {
            return Err(Error::CounterexampleFound(format!(
                "distinct lambda words share a normal form: {} vs {}",
                prior.render(group),
                word.render(group)
            )));
        }
        if nf.body.is_empty() && !word.is_empty() {
            return Err(Error::CounterexampleFound(format!(
                "nonempty lambda word lies in <t>: {}",
                word.render(group)
            )));
        }
        let (_, all_at_positive) = word.a_letter_stats();
        // hypothesis of the positivity statement: the element is
        // v_hat t^s with v_hat positive, i.e. theta^{-r}(body) positive
        let shifted = group.theta().power_apply(-nf.t_exp, &nf.body, budget)?;
        if all_a_positive(&shifted) {
            shifted_cases += 1;
            if !all_at_positive {
                return Err(Error::CounterexampleFound(format!(
                    "positivity fails (shifted body positive): {}",
                    word.render(group)
                )));
            }
        }
        if all_a_positive(&nf.body) {
            body_cases += 1;
            if !all_at_positive {
                return Err(Error::CounterexampleFound(format!(
                    "positivity fails (body positive): {}",
                    word.render(group)
                )));
            }
        }
        Ok(())
    })?;
    Ok(FreenessReport {
        max_len,
        words_checked: count,
        positivity_cases: (shifted_cases, body_cases),
    })
}

#[derive(Debug, Clone)]
pub struct DistortionRow {
    pub ext_len: u32,
    pub max_int_len: u128,
    pub witness: Option<LambdaWord>,
}

#[derive(Debug)]
pub struct DistortionReport {
    pub group: String,
    pub radius: u32,
    pub cap: u32,
    pub rows: Vec<DistortionRow>,
    pub ball_size: u64,
    pub identified: u64,
    pub complete: bool,
}

impl DistortionReport {
    pub fn to_json(&self, group: &FbcGroup) -> serde_json::Value {
        serde_json::json!({
            "group": self.group,
            "radius": self.radius,
            "cap": self.cap,
            "rows": self.rows.iter().map(|r| serde_json::json!({
                "ext_len": r.ext_len,
                "max_int_len": r.max_int_len.to_string(),
                "witness": r.witness.as_ref().map(|w| w.render(group)),
            })).collect::<Vec<_>>(),
            "ball_size": self.ball_size,
            "identified": self.identified,
            "complete": self.complete,
        })
    }
}

type NfKey = (i64, Vec<(u32, i64)>);

fn nf_key(group: &FbcGroup, el: &GroupElement) -> NfKey {
    let f = group.f_alphabet();
    (
        el.t_exp,
        el.body
            .runs()
            .iter()
            .map(|&(g, e)| (f.position(g).unwrap() as u32, e))
            .collect(),
    )
}

/// Extrinsic ball by breadth-first search over the full generating set,
/// deduplicated by normal form.
fn extrinsic_ball(group: &FbcGroup, radius: u32) -> Result<HashMap<NfKey, (u32, GroupElement)>> {
    let budget = group.budget();
    let mut ball: HashMap<NfKey, (u32, GroupElement)> = HashMap::new();
    let id = group.identity();
    ball.insert(nf_key(group, &id), (0, id.clone()));
    let mut frontier = vec![id];
    for depth in 1..=radius {
        let mut next = Vec::new();
        for el in &frontier {
            for &g in group.full_alphabet().generators() {
                for sign in [1i64, -1] {
                    let neighbor = if g == Generator::T {
                        GroupElement {
                            t_exp: el.t_exp + sign,
                            body: group.theta().power_apply(sign, &el.body, budget)?,
                        }
                    } else {
                        GroupElement {
                            t_exp: el.t_exp,
                            body: el
                                .body
                                .concat(&Word::single(group.f_alphabet(), g, sign)?)?,
                        }
                    };
                    let key = nf_key(group, &neighbor);
                    if !ball.contains_key(&key) {
                        ball.insert(key, (depth, neighbor.clone()));
                        next.push(neighbor);
                    }
                }
            }
            budget.check_steps(ball.len() as u64, "extrinsic ball")?;
        }
        frontier = next;
    }
    Ok(ball)
}

/// Joins the extrinsic ball against products of two lambda half-ball
/// words. Intrinsic values are exact for identified elements (the
/// subgroup is free, so the reduced lambda word of an element is
/// unique) and the table is a certified lower bound on distortion.
pub fn distortion_scan(group: &FbcGroup, radius: u32, cap: u32) -> Result<DistortionReport> {
    let budget = group.budget();
    let ball = extrinsic_ball(group, radius)?;
    let max_body: u128 = ball
        .values()
        .map(|(_, el)| el.body.letter_len())
        .max()
        .unwrap_or(0);

    struct Half {
        word: LambdaWord,
        nf: GroupElement,
        len: u32,
        body_len: u128,
    }
    let h = cap.div_ceil(2);
    let mut half: Vec<Half> = Vec::new();
    enumerate_lambda(group, h, &mut |word, nf| {
        half.push(Half {
            word: word.clone(),
            nf: nf.clone(),
            len: word.letter_len() as u32,
            body_len: nf.body.letter_len(),
        });
        Ok(())
    })?;

    // right-hand factors grouped by t-exponent, sorted by body length
    let mut by_t: HashMap<i64, Vec<usize>> = HashMap::new();
    for (i, e) in half.iter().enumerate() {
        by_t.entry(e.nf.t_exp).or_default().push(i);
    }
    for ids in by_t.values_mut() {
        ids.sort_by_key(|&i| half[i].body_len);
    }

    // best identified intrinsic length per ball element
    let mut best: HashMap<NfKey, (u32, u128, LambdaWord)> = HashMap::new();
    let record =
        |best: &mut HashMap<NfKey, (u32, u128, LambdaWord)>, key: NfKey, lam: LambdaWord| {
            let len = lam.letter_len();
            let (ext, _) = ball[&key];
            match best.get(&key) {
                Some((_, old, _)) if *old <= len => {}
                _ => {
                    best.insert(key, (ext, len, lam));
                }
            }
        };

    let mut pair_steps = 0u64;
    for p in &half {
        let key = nf_key(group, &p.nf);
        if ball.contains_key(&key) {
            record(&mut best, key, p.word.clone());
        }
        for (&r, ids) in &by_t {
            let t = match p.nf.t_exp.checked_add(r) {
                Some(t) if t.unsigned_abs() <= radius as u64 => t,
                _ => continue,
            };
            if p.len + 1 > cap {
                continue;
            }
            let shifted = group.theta().power_apply(r, &p.nf.body, budget)?;
            let shifted_len = shifted.letter_len();
            // the product body is at least |len(shifted) - len(q)|, so
            // only a band of q body lengths can land inside the ball
            let lo = shifted_len.saturating_sub(max_body);
            let hi = shifted_len + max_body;
            let start = ids.partition_point(|&i| half[i].body_len < lo);
            for &qi in &ids[start..] {
                let q = &half[qi];
                if q.body_len > hi {
                    break;
                }
                if p.len + q.len > cap || q.len == 0 {
                    continue;
                }
                pair_steps += 1;
                if pair_steps % (1 << 22) == 0 {
                    budget.check_steps(pair_steps >> 12, "distortion join")?;
                }
                let body = shifted.concat(&q.nf.body)?;
                if body.letter_len() > max_body {
                    continue;
                }
                let el = GroupElement { t_exp: t, body };
                let key = nf_key(group, &el);
                if ball.contains_key(&key) {
                    record(&mut best, key, p.word.concat(&q.word));
                }
            }
        }
    }

    // cumulative-max table rows
    let mut rows: Vec<DistortionRow> = (0..=radius)
        .map(|ext_len| DistortionRow {
            ext_len,
            max_int_len: 0,
            witness: None,
        })
        .collect();
    for (ext, len, lam) in best.values() {
        let row = &mut rows[*ext as usize];
        if *len > row.max_int_len {
            row.max_int_len = *len;
            row.witness = Some(lam.clone());
        }
    }
    for i in 1..rows.len() {
        if rows[i].max_int_len < rows[i - 1].max_int_len {
            rows[i].max_int_len = rows[i - 1].max_int_len;
            rows[i].witness = rows[i - 1].witness.clone();
        }
    }
    let identified = best.len() as u64;
    Ok(DistortionReport {
        group: group.label().describe(),
        radius,
        cap,
        rows,
        ball_size: ball.len() as u64,
        identified,
        complete: identified == ball.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbc::{make_psi, PsiParams};

    fn psi2() -> FbcGroup {
        make_psi(PsiParams::test_instance(2), Budget::default()).unwrap()
    }

    fn at(i: u32, e: i64) -> (LambdaLetter, i64) {
        (LambdaLetter::At(i), e)
    }

    fn b1(e: i64) -> (LambdaLetter, i64) {
        (LambdaLetter::Gen(Generator::B(1)), e)
    }

    #[test]
    fn rewrite_reproduces_the_worked_lambda_word() {
        // the G_2 rewriting of a_2^3 from the battle trace
        let g = make_g(2, Budget::default()).unwrap();
        let w = g.f_alphabet().parse_word("a2^3").unwrap();
        let (lam, s) = rewrite_positive(&g, &w).unwrap();
        let expected = LambdaWord::from_runs(&[at(2, 2), at(1, 1), at(2, 1), at(1, 3)]);
        assert_eq!(lam, expected);
        assert_eq!(s, BigUint::from(7u32));
    }

    #[test]
    fn rewrite_in_psi2() {
        let g = psi2();
        let w = g.f_alphabet().parse_word("a2").unwrap();
        let (lam, s) = rewrite_positive(&g, &w).unwrap();
        assert_eq!(lam, LambdaWord::from_runs(&[at(2, 1)]));
        assert_eq!(s, BigUint::from(1u32));

        // hand battle: a2^2 -> a2 a1 -> a0 -> empty
        let w = g.f_alphabet().parse_word("a2^2").unwrap();
        let (lam, s) = rewrite_positive(&g, &w).unwrap();
        assert_eq!(lam, LambdaWord::from_runs(&[at(2, 2), at(0, 1)]));
        assert_eq!(s, BigUint::from(3u32));
    }

    #[test]
    fn u_hat_examples() {
        let g = psi2();
        let u21 = build_u_hat(&g, 2, 1).unwrap();
        assert_eq!(u21, LambdaWord::from_runs(&[at(2, 1)]));
        let u22 = build_u_hat(&g, 2, 2).unwrap();
        assert_eq!(u22, LambdaWord::from_runs(&[at(2, 2), at(0, 1)]));
        let u23 = build_u_hat(&g, 2, 3).unwrap();
        assert!(u23.letter_len() >= 7);
    }

    #[test]
    fn tau_small_cases() {
        let g = psi2();
        assert_eq!(
            build_tau(&g, 1).unwrap(),
            LambdaWord::from_runs(&[at(0, 1)])
        );
        // m = 2: u (a_1 t) phi(v) = b1 (a1t) b1
        assert_eq!(
            build_tau(&g, 2).unwrap(),
            LambdaWord::from_runs(&[b1(1), at(1, 1), b1(1)])
        );
        // m = 3: phi(u) (a_0 t) phi^2(v) = b1 (a0t) b1
        assert_eq!(
            build_tau(&g, 3).unwrap(),
            LambdaWord::from_runs(&[b1(1), at(0, 1), b1(1)])
        );
        // the defining equality is re-checked inside for every m
        for m in 4..=8 {
            build_tau(&g, m).unwrap();
        }
    }

    #[test]
    fn v_small_cases() {
        let g = psi2();
        assert!(build_v(&g, 0).unwrap().is_empty());
        assert_eq!(build_v(&g, 1).unwrap(), LambdaWord::from_runs(&[at(0, 1)]));
        assert_eq!(
            build_v(&g, 2).unwrap(),
            LambdaWord::from_runs(&[at(0, 1), b1(1), at(0, 1), b1(1)])
        );
        for n in 3..=6 {
            build_v(&g, n).unwrap();
        }
    }

    #[test]
    fn witness_for_k2_n1() {
        let g = psi2();
        let w = build_witness(&g, 2, 1).unwrap();
        let expected = LambdaWord::from_runs(&[
            at(2, 2),
            at(0, 1),
            b1(1),
            at(1, 1),
            b1(1),
            at(0, -1),
            at(2, -2),
        ]);
        assert_eq!(w.word, expected);
        assert_eq!(w.word.letter_len(), 9);
        let projected = LambdaWord::from_runs(&[at(2, 2), at(1, 1), at(2, -2)]);
        assert_eq!(w.projected, projected);
        assert_eq!(w.projected.letter_len(), 5);
    }

    #[test]
    fn witness_lengths_follow_2h_plus_3() {
        let g = psi2();
        for (n, h) in [(2u64, 3u128), (3, 7)] {
            let w = build_witness(&g, 2, n).unwrap();
            assert_eq!(w.projected.letter_len(), 2 * h + 3);
        }
    }

    #[test]
    fn freeness_scan_small() {
        let g = psi2();
        let report = freeness_scan(&g, 3).unwrap();
        // 1 + 8 + 8*7 + 8*7^2 reduced words
        assert_eq!(report.words_checked, 1 + 8 + 56 + 392);
    }

    #[test]
    fn distortion_scan_tiny() {
        let g = psi2();
        let report = distortion_scan(&g, 2, 4).unwrap();
        assert_eq!(report.rows[0].max_int_len, 0);
        for i in 1..report.rows.len() {
            assert!(report.rows[i].max_int_len >= report.rows[i - 1].max_int_len);
        }
        // b_1 is both an extrinsic generator and a lambda letter
        assert!(report.rows[1].max_int_len >= 1);
    }

    #[test]
    fn expand_and_project() {
        let g = psi2();
        let lam = LambdaWord::from_runs(&[at(2, 1), b1(2), at(0, -1)]);
        let word = lam.expand(&g).unwrap();
        assert_eq!(word.render(), "a2 t b1^2 t^-1 a0^-1");
        assert_eq!(lam.project(), LambdaWord::from_runs(&[at(2, 1), at(1, -1)]));
    }
}
