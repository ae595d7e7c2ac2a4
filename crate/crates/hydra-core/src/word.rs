//! Generators, alphabets and freely reduced words.
//!
//! Words are run-length encoded sequences of `(generator, exponent)`
//! pairs over a fixed alphabet, freely reduced at every construction.
//! Letter-length is exposed separately from run count because battle
//! intermediates contain power blocks far longer than their run count.
//!
//! The text grammar:
//!
//! ```text
//! word := term (WS term)* | ""
//! term := name ("^" int)?
//! name := ("a"|"b"|"c"|"alpha"|"beta"|"gamma") digits | "d" | "t" | "sigma" | "tau"
//! int  := "-"? digits,  int != 0
//! ```
//!
//! Alphabets may additionally declare custom generator names (used by
//! presentation files for synthetic fixtures); those parse as bare
//! identifiers.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::runs;

/// A generator named by role. Indexed families carry their subscript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    A(u32),
    B(u32),
    C(u32),
    D,
    T,
    Alpha(u32),
    Beta(u32),
    Gamma(u32),
    Sigma,
    Tau,
    /// Index into the owning alphabet's custom name table.
    Custom(u32),
}

impl Generator {
    pub fn is_a(&self) -> bool {
        matches!(self, Generator::A(_))
    }

    pub fn a_index(&self) -> Option<u32> {
        match self {
            Generator::A(i) => Some(*i),
            _ => None,
        }
    }
}

/// An ordered set of generators together with the names of any custom
/// ones. Words hold an `Arc` to their alphabet; all binary operations
/// insist the alphabets agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    gens: Vec<Generator>,
    custom_names: Vec<String>,
    positions: HashMap<Generator, usize>,
}

impl Alphabet {
    pub fn new(gens: Vec<Generator>) -> Arc<Self> {
        Self::with_custom(gens, Vec::new())
    }

    pub fn with_custom(gens: Vec<Generator>, custom_names: Vec<String>) -> Arc<Self> {
        let mut positions = HashMap::new();
        for (i, &g) in gens.iter().enumerate() {
            let prev = positions.insert(g, i);
            assert!(prev.is_none(), "duplicate generator in alphabet");
        }
        for g in &gens {
            if let Generator::Custom(i) = g {
                assert!(
                    (*i as usize) < custom_names.len(),
                    "custom generator {i} has no name"
                );
            }
        }
        Arc::new(Alphabet {
            gens,
            custom_names,
            positions,
        })
    }

    /// Alphabet from custom names only, in the given order.
    pub fn custom(names: &[&str]) -> Arc<Self> {
        let gens = (0..names.len() as u32).map(Generator::Custom).collect();
        Self::with_custom(gens, names.iter().map(|s| s.to_string()).collect())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn contains(&self, g: Generator) -> bool {
        self.positions.contains_key(&g)
    }

    pub fn position(&self, g: Generator) -> Option<usize> {
        self.positions.get(&g).copied()
    }

    pub fn name(&self, g: Generator) -> String {
        match g {
            Generator::A(i) => format!("a{i}"),
            Generator::B(i) => format!("b{i}"),
            Generator::C(i) => format!("c{i}"),
            Generator::D => "d".into(),
            Generator::T => "t".into(),
            Generator::Alpha(i) => format!("alpha{i}"),
            Generator::Beta(i) => format!("beta{i}"),
            Generator::Gamma(i) => format!("gamma{i}"),
            Generator::Sigma => "sigma".into(),
            Generator::Tau => "tau".into(),
            Generator::Custom(i) => self.custom_names[i as usize].clone(),
        }
    }

    fn lookup(&self, name: &str) -> Option<Generator> {
        let (fam, digits) = split_name(name);
        let g = match (fam, digits) {
            ("a", Some(i)) => Generator::A(i),
            ("b", Some(i)) => Generator::B(i),
            ("c", Some(i)) => Generator::C(i),
            ("alpha", Some(i)) => Generator::Alpha(i),
            ("beta", Some(i)) => Generator::Beta(i),
            ("gamma", Some(i)) => Generator::Gamma(i),
            ("d", None) => Generator::D,
            ("t", None) => Generator::T,
            ("sigma", None) => Generator::Sigma,
            ("tau", None) => Generator::Tau,
            _ => {
                // fall through to the custom name table
                let i = self.custom_names.iter().position(|n| n == name)?;
                return Some(Generator::Custom(i as u32));
            }
        };
        if self.contains(g) {
            Some(g)
        } else {
            // a declared custom name may shadow an out-of-range standard one
            let i = self.custom_names.iter().position(|n| n == name)?;
            Some(Generator::Custom(i as u32))
        }
    }

    /// Parses the word grammar, validating every token against this
    /// alphabet, and returns the free reduction.
    pub fn parse_word(self: &Arc<Self>, text: &str) -> Result<Word> {
        let mut out: Vec<(Generator, i64)> = Vec::new();
        for (tok, pos) in split_tokens(text) {
            let (name, exp) = match tok.split_once('^') {
                Some((name, e)) => {
                    let exp: i64 = e.parse().map_err(|_| Error::Parse {
                        pos,
                        msg: format!("bad exponent {e:?}"),
                    })?;
                    if exp == 0 {
                        return Err(Error::Parse {
                            pos,
                            msg: "zero exponent".into(),
                        });
                    }
                    (name, exp)
                }
                None => (tok, 1),
            };
            let g = self.lookup(name).ok_or_else(|| Error::Parse {
                pos,
                msg: format!("unknown generator {name:?}"),
            })?;
            runs::push(&mut out, g, exp);
        }
        Ok(Word {
            alphabet: self.clone(),
            runs: out,
        })
    }
}

fn split_name(name: &str) -> (&str, Option<u32>) {
    let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    let (fam, digits) = name.split_at(split);
    if digits.is_empty() {
        (fam, None)
    } else {
        (fam, digits.parse().ok())
    }
}

fn split_tokens(text: &str) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((&text[s..i], s));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((&text[s..], s));
    }
    out
}

/// A freely reduced word. The runs invariant (nonzero exponents,
/// distinct adjacent generators) holds for every constructed value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    runs: Vec<(Generator, i64)>,
}

impl Word {
    pub fn empty(alphabet: &Arc<Alphabet>) -> Word {
        Word {
            alphabet: alphabet.clone(),
            runs: Vec::new(),
        }
    }

    /// Builds a word from raw runs, freely reducing. Every generator must
    /// belong to the alphabet.
    pub fn from_runs(alphabet: &Arc<Alphabet>, raw: &[(Generator, i64)]) -> Result<Word> {
        for &(g, _) in raw {
            if !alphabet.contains(g) {
                return Err(Error::UnknownGenerator {
                    name: alphabet.name(g),
                });
            }
        }
        Ok(Word {
            alphabet: alphabet.clone(),
            runs: runs::reduce(raw),
        })
    }

    pub fn single(alphabet: &Arc<Alphabet>, g: Generator, exp: i64) -> Result<Word> {
        Self::from_runs(alphabet, &[(g, exp)])
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn runs(&self) -> &[(Generator, i64)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Letter-length: the sum of absolute exponents.
    pub fn letter_len(&self) -> u128 {
        runs::letter_len(&self.runs)
    }

    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    /// One entry per letter with its sign.
    pub fn letters(&self) -> Vec<(Generator, i8)> {
        runs::letters(&self.runs)
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if !same_alphabet(&self.alphabet, &other.alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        Ok(Word {
            alphabet: self.alphabet.clone(),
            runs: runs::concat(&self.runs, &other.runs),
        })
    }

    pub fn inverse(&self) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            runs: runs::invert(&self.runs),
        }
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n >= 0 {
            self.runs.clone()
        } else {
            runs::invert(&self.runs)
        };
        let mut out: Vec<(Generator, i64)> = Vec::new();
        for _ in 0..n.unsigned_abs() {
            for &(g, e) in &base {
                runs::push(&mut out, g, e);
            }
        }
        Word {
            alphabet: self.alphabet.clone(),
            runs: out,
        }
    }

    /// Rebinds the word to a larger alphabet containing every generator
    /// it uses. Custom generators are matched by name.
    pub fn reinterpret(&self, alphabet: &Arc<Alphabet>) -> Result<Word> {
        let mut raw = Vec::with_capacity(self.runs.len());
        for &(g, e) in &self.runs {
            let g2 = match g {
                Generator::Custom(_) => {
                    let name = self.alphabet.name(g);
                    alphabet
                        .lookup(&name)
                        .ok_or(Error::UnknownGenerator { name })?
                }
                _ => g,
            };
            raw.push((g2, e));
        }
        Word::from_runs(alphabet, &raw)
    }

    /// Canonical printer: minimal exponents, single spaces.
    pub fn render(&self) -> String {
        let mut parts = Vec::with_capacity(self.runs.len());
        for &(g, e) in &self.runs {
            let name = self.alphabet.name(g);
            if e == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        parts.join(" ")
    }

    /// Cyclically reduces: strips mutually inverse first/last letters.
    pub fn cyclically_reduce(&self) -> Word {
        let mut r = self.runs.clone();
        loop {
            let n = r.len();
            if n < 2 {
                break;
            }
            let (gf, ef) = r[0];
            let (gl, el) = r[n - 1];
            if gf != gl || (ef > 0) == (el > 0) {
                break;
            }
            let cancel = ef.unsigned_abs().min(el.unsigned_abs()) as i64;
            let sign_f = if ef > 0 { 1 } else { -1 };
            let new_f = ef - sign_f * cancel;
            let new_l = el + sign_f * cancel;
            if new_f == 0 {
                r.remove(0);
            } else {
                r[0].1 = new_f;
            }
            let n = r.len();
            if new_l == 0 {
                r.pop();
            } else {
                r[n - 1].1 = new_l;
            }
            // fully cancelled boundary may expose a new mergeable pair
            r = runs::reduce(&r);
        }
        Word {
            alphabet: self.alphabet.clone(),
            runs: r,
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.runs.first(), self.runs.last()) {
            (Some(&(gf, ef)), Some(&(gl, el))) if self.runs.len() >= 2 => {
                gf != gl || (ef > 0) == (el > 0)
            }
            _ => true,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

pub fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}
