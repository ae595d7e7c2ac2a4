//! Finite presentations as data, the two presentations of `Gamma_k`,
//! and the machine-checkable direction of their equivalence.
//!
//! The angled presentation `P_k` (squares plus one hexagon, exact corner
//! angles in π/6 units) feeds the link analysis; the free-by-cyclic
//! presentation `Q_k` is the conjugation table of `Gamma_k`. The
//! generator map between them is verified as a homomorphism by sending
//! every relator through the normal-form engine, and as an epimorphism
//! by exhibiting an explicit preimage word for every target generator.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fbc::{make_gamma, make_psi, FbcGroup, PsiParams};
use crate::word::{Alphabet, Generator, Word};

/// Generators and cyclically reduced relators, with optional per-corner
/// angles in π/6 units (one angle per boundary letter).
#[derive(Debug, Clone)]
pub struct Presentation {
    alphabet: Arc<Alphabet>,
    relators: Vec<Word>,
    names: Vec<String>,
    corner_angles: Option<Vec<Vec<u32>>>,
}

impl Presentation {
    pub fn new(
        alphabet: Arc<Alphabet>,
        relators: Vec<Word>,
        names: Option<Vec<String>>,
        corner_angles: Option<Vec<Vec<u32>>>,
    ) -> Result<Presentation> {
        let names =
            names.unwrap_or_else(|| (0..relators.len()).map(|i| format!("r{i}")).collect());
        if names.len() != relators.len() {
            return Err(Error::BadPresentation("one name per relator".into()));
        }
        for (r, name) in relators.iter().zip(&names) {
            if r.is_empty() {
                return Err(Error::BadPresentation(format!("relator {name} is empty")));
            }
            if !r.is_cyclically_reduced() {
                return Err(Error::BadPresentation(format!(
                    "relator {name} is not cyclically reduced"
                )));
            }
        }
        if let Some(angles) = &corner_angles {
            if angles.len() != relators.len() {
                return Err(Error::AngleMismatch("one angle list per relator".into()));
            }
            for ((r, list), name) in relators.iter().zip(angles).zip(&names) {
                let m = r.letter_len();
                if list.len() as u128 != m {
                    return Err(Error::AngleMismatch(format!(
                        "relator {name} has {m} corners but {} angles",
                        list.len()
                    )));
                }
                let total: u64 = list.iter().map(|&a| a as u64).sum();
                let expected = (m as u64 - 2) * 6;
                if total != expected {
                    return Err(Error::AngleMismatch(format!(
                        "relator {name} angle sum {total} differs from (m-2)*6 = {expected}"
                    )));
                }
                if list.iter().any(|&a| a == 0) {
                    return Err(Error::AngleMismatch(format!(
                        "relator {name} has a zero corner angle"
                    )));
                }
            }
        }
        Ok(Presentation {
            alphabet,
            relators,
            names,
            corner_angles,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn corner_angles(&self) -> Option<&Vec<Vec<u32>>> {
        self.corner_angles.as_ref()
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    /// Text format: a `gens:` line, one relator per line, each
    /// optionally followed by an `angles:` line.
    pub fn parse(text: &str) -> Result<Presentation> {
        let mut alphabet: Option<Arc<Alphabet>> = None;
        let mut relators: Vec<Word> = Vec::new();
        let mut angles: Vec<Option<Vec<u32>>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("gens:") {
                if alphabet.is_some() {
                    return Err(Error::BadPresentation("duplicate gens line".into()));
                }
                alphabet = Some(parse_gens_line(rest));
                continue;
            }
            if let Some(rest) = line.strip_prefix("angles:") {
                match angles.last_mut() {
                    Some(slot @ None) => {
                        let parsed: std::result::Result<Vec<u32>, _> =
                            rest.split_whitespace().map(|t| t.parse()).collect();
                        *slot = Some(parsed.map_err(|_| Error::Parse {
                            pos: lineno,
                            msg: "bad angle list".into(),
                        })?);
                    }
                    _ => {
                        return Err(Error::BadPresentation(format!(
                            "angles line {lineno} does not follow a relator"
                        )))
                    }
                }
                continue;
            }
            let al = alphabet
                .as_ref()
                .ok_or_else(|| Error::BadPresentation("gens line must come first".into()))?;
            relators.push(al.parse_word(line)?);
            angles.push(None);
        }
        let alphabet =
            alphabet.ok_or_else(|| Error::BadPresentation("missing gens line".into()))?;
        let corner_angles = if angles.iter().all(Option::is_none) {
            None
        } else if angles.iter().all(Option::is_some) {
            Some(angles.into_iter().map(Option::unwrap).collect())
        } else {
            return Err(Error::AngleMismatch(
                "either every relator or none carries angles".into(),
            ));
        };
        Presentation::new(alphabet, relators, None, corner_angles)
    }

    pub fn format(&self) -> String {
        let mut out = String::from("gens:");
        for &g in self.alphabet.generators() {
            out.push(' ');
            out.push_str(&self.alphabet.name(g));
        }
        out.push('\n');
        for (i, r) in self.relators.iter().enumerate() {
            out.push_str(&r.render());
            out.push('\n');
            if let Some(angles) = &self.corner_angles {
                out.push_str("angles:");
                for a in &angles[i] {
                    out.push_str(&format!(" {a}"));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "gens": self.alphabet.generators().iter()
                .map(|&g| self.alphabet.name(g)).collect::<Vec<_>>(),
            "relators": self.relators.iter().map(|r| r.render()).collect::<Vec<_>>(),
            "names": self.names,
            "angles": self.corner_angles,
        })
    }
}

fn parse_gens_line(rest: &str) -> Arc<Alphabet> {
    // names that do not parse as standard generators become custom
    // generators, in order of first appearance
    let names: Vec<&str> = rest.split_whitespace().collect();
    let customs: Vec<String> = names
        .iter()
        .filter(|n| standard_generator(n).is_none())
        .map(|n| n.to_string())
        .collect();
    let gens = names
        .iter()
        .map(|name| match standard_generator(name) {
            Some(g) => g,
            None => {
                let i = customs.iter().position(|c| c == name).unwrap();
                Generator::Custom(i as u32)
            }
        })
        .collect();
    Alphabet::with_custom(gens, customs)
}

fn standard_generator(name: &str) -> Option<Generator> {
    let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    let (fam, digits) = name.split_at(split);
    let index: Option<u32> = if digits.is_empty() {
        None
    } else {
        digits.parse().ok()
    };
    match (fam, index) {
        ("a", Some(i)) => Some(Generator::A(i)),
        ("b", Some(i)) => Some(Generator::B(i)),
        ("c", Some(i)) => Some(Generator::C(i)),
        ("alpha", Some(i)) => Some(Generator::Alpha(i)),
        ("beta", Some(i)) => Some(Generator::Beta(i)),
        ("gamma", Some(i)) => Some(Generator::Gamma(i)),
        ("d", None) => Some(Generator::D),
        ("t", None) => Some(Generator::T),
        ("sigma", None) => Some(Generator::Sigma),
        ("tau", None) => Some(Generator::Tau),
        _ => None,
    }
}

/// The angled presentation `P_k`: three conjugation families, the
/// commuting square, and the hexagon built from a unit square and two
/// equilateral triangles (corners 5π/6, 5π/6, π/3, 5π/6, 5π/6, π/3).
pub fn build_p(k: u32) -> Result<Presentation> {
    if k < 1 {
        return Err(Error::ParamMismatch("need k >= 1".into()));
    }
    let mut gens: Vec<Generator> = (1..=k).map(Generator::Alpha).collect();
    gens.extend((1..=8).map(Generator::Beta));
    gens.extend((1..=8).map(Generator::Gamma));
    gens.push(Generator::Sigma);
    gens.push(Generator::Tau);
    let al = Alphabet::new(gens);

    let mut relators = Vec::new();
    let mut names = Vec::new();
    let mut angles = Vec::new();
    let square = vec![3u32, 3, 3, 3];

    for i in 2..=k {
        relators.push(Word::from_runs(
            &al,
            &[
                (Generator::Alpha(i), -1),
                (Generator::Tau, 1),
                (Generator::Alpha(i), 1),
                (Generator::Alpha(i - 1), -1),
            ],
        )?);
        names.push(format!("alpha{i}"));
        angles.push(square.clone());
    }
    for i in 1..=7u32 {
        relators.push(Word::from_runs(
            &al,
            &[
                (Generator::Beta(i), -1),
                (Generator::Tau, 1),
                (Generator::Beta(i), 1),
                (Generator::Beta(i + 1), -1),
            ],
        )?);
        names.push(format!("beta{i}"));
        angles.push(square.clone());
    }
    relators.push(Word::from_runs(
        &al,
        &[
            (Generator::Beta(8), 1),
            (Generator::Tau, 1),
            (Generator::Beta(8), -1),
            (Generator::Beta(1), -1),
        ],
    )?);
    names.push("beta8".into());
    angles.push(square.clone());
    for i in 1..=7u32 {
        relators.push(Word::from_runs(
            &al,
            &[
                (Generator::Gamma(i), -1),
                (Generator::Sigma, 1),
                (Generator::Gamma(i), 1),
                (Generator::Gamma(i + 1), -1),
            ],
        )?);
        names.push(format!("gamma{i}"));
        angles.push(square.clone());
    }
    relators.push(Word::from_runs(
        &al,
        &[
            (Generator::Gamma(8), 1),
            (Generator::Sigma, 1),
            (Generator::Gamma(8), -1),
            (Generator::Gamma(1), -1),
        ],
    )?);
    names.push("gamma8".into());
    angles.push(square.clone());

    // gamma_3 beta_5 = beta_3 gamma_5
    relators.push(Word::from_runs(
        &al,
        &[
            (Generator::Gamma(3), 1),
            (Generator::Beta(5), 1),
            (Generator::Gamma(5), -1),
            (Generator::Beta(3), -1),
        ],
    )?);
    names.push("square".into());
    angles.push(square);

    // alpha_1 gamma_1 tau = tau gamma_7 alpha_1
    relators.push(Word::from_runs(
        &al,
        &[
            (Generator::Alpha(1), 1),
            (Generator::Gamma(1), 1),
            (Generator::Tau, 1),
            (Generator::Alpha(1), -1),
            (Generator::Gamma(7), -1),
            (Generator::Tau, -1),
        ],
    )?);
    names.push("hexagon".into());
    angles.push(vec![5, 5, 2, 5, 5, 2]);

    Presentation::new(al, relators, Some(names), Some(angles))
}

/// The free-by-cyclic presentation `Q_k`: one conjugation relator
/// `t^{-1} x t = theta(x)` per free-part generator, with `u`, `v`, `w`
/// already resolved to `t`-free words.
pub fn build_q(k: u32, budget: &Budget) -> Result<Presentation> {
    let gamma = make_gamma(k, *budget)?;
    presentation_of_group(&gamma)
}

/// The conjugation-table presentation of any of the built groups.
pub fn presentation_of_group(group: &FbcGroup) -> Result<Presentation> {
    let full = group.full_alphabet();
    let budget = group.budget();
    let mut relators = Vec::new();
    let mut names = Vec::new();
    for &x in group.f_alphabet().generators() {
        let image = group
            .theta()
            .apply(&Word::single(group.f_alphabet(), x, 1)?, budget)?;
        let relator = Word::from_runs(full, &[(Generator::T, -1), (x, 1), (Generator::T, 1)])?
            .concat(&image.reinterpret(full)?.inverse())?;
        relators.push(relator.cyclically_reduce());
        names.push(group.f_alphabet().name(x));
    }
    Presentation::new(full.clone(), relators, Some(names), None)
}

/// The generator map from `P_k` into `Gamma_k` presented by `Q_k`.
pub struct PGammaHom {
    pub k: u32,
    pub p: Presentation,
    pub gamma: FbcGroup,
    pub images: BTreeMap<Generator, Word>,
    verified: bool,
}

/// One line of a verification report.
#[derive(Debug)]
pub struct CheckLine {
    pub name: String,
    pub size: u128,
    pub pass: bool,
}

pub fn report_json(title: &str, lines: &[CheckLine]) -> serde_json::Value {
    serde_json::json!({
        "check": title,
        "lines": lines.iter().map(|l| serde_json::json!({
            "name": l.name,
            "size": l.size.to_string(),
            "pass": l.pass,
        })).collect::<Vec<_>>(),
        "pass": lines.iter().all(|l| l.pass),
    })
}

/// Builds the generator images: `tau -> t^{-1}`, `beta_i -> t^{-1} b_i`
/// (`b_8 t^{-1}` for the last), `sigma -> s^{-1}` and
/// `gamma_i -> s^{-1} c_i` (`c_8 s^{-1}`) with `s = c_3 d b_3^{-1} t`,
/// and `alpha_{k-i} -> u_i` for the tower `u_0 = a_k`,
/// `u_{i+1} = u_i^{-1} t^{-1} u_i`.
pub fn hom_p_to_gamma(k: u32, budget: &Budget) -> Result<PGammaHom> {
    let gamma = make_gamma(k, *budget)?;
    let p = build_p(k)?;
    let full = gamma.full_alphabet();
    let t = Word::single(full, Generator::T, 1)?;
    let s = full.parse_word("c3 d b3^-1 t")?;

    let mut images: BTreeMap<Generator, Word> = BTreeMap::new();
    images.insert(Generator::Tau, t.inverse());
    for i in 1..=7u32 {
        images.insert(
            Generator::Beta(i),
            t.inverse().concat(&full.parse_word(&format!("b{i}"))?)?,
        );
    }
    images.insert(
        Generator::Beta(8),
        full.parse_word("b8")?.concat(&t.inverse())?,
    );
    images.insert(Generator::Sigma, s.inverse());
    for i in 1..=7u32 {
        images.insert(
            Generator::Gamma(i),
            s.inverse().concat(&full.parse_word(&format!("c{i}"))?)?,
        );
    }
    images.insert(
        Generator::Gamma(8),
        full.parse_word("c8")?.concat(&s.inverse())?,
    );

    // u_0 = a_k, u_{i+1} = u_i^{-1} t^{-1} u_i, alpha_{k-i} -> u_i
    let mut u = Word::single(full, Generator::A(k), 1)?;
    for i in 0..k {
        images.insert(Generator::Alpha(k - i), u.clone());
        u = u.inverse().concat(&t.inverse())?.concat(&u)?;
    }

    Ok(PGammaHom {
        k,
        p,
        gamma,
        images,
        verified: false,
    })
}

impl PGammaHom {
    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Applies the generator map to a word over the `P_k` alphabet.
    pub fn substitute(&self, w: &Word) -> Result<Word> {
        let full = self.gamma.full_alphabet();
        let mut out = Word::empty(full);
        for &(g, e) in w.runs() {
            let img = self.images.get(&g).ok_or_else(|| Error::UnknownGenerator {
                name: w.alphabet().name(g),
            })?;
            out = out.concat(&img.pow(e))?;
        }
        Ok(out)
    }

    /// Checks that every relator of `P_k` maps to the identity.
    pub fn verify_hom(&mut self) -> Result<Vec<CheckLine>> {
        let mut lines = Vec::new();
        for (r, name) in self.p.relators().iter().zip(self.p.names()) {
            let image = self.substitute(r)?;
            let nf = self.gamma.normal_form(&image)?;
            if nf != self.gamma.identity() {
                return Err(Error::RelatorFails { name: name.clone() });
            }
            lines.push(CheckLine {
                name: name.clone(),
                size: image.letter_len(),
                pass: true,
            });
        }
        self.verified = true;
        Ok(lines)
    }

    /// Exhibits a preimage word in the `P_k` generators for every
    /// generator of `Gamma_k` and checks it under the map.
    pub fn verify_epi(&self) -> Result<Vec<CheckLine>> {
        if !self.verified {
            return Err(Error::CheckFails(
                "verify the homomorphism before surjectivity".into(),
            ));
        }
        let p_al = self.p.alphabet();
        let single = |g: Generator, e: i64| -> Result<Word> { Word::single(p_al, g, e) };

        // p_t maps to t and p_s maps to s = c_3 d b_3^{-1} t
        let p_t = single(Generator::Tau, -1)?;
        let p_s = single(Generator::Sigma, -1)?;
        let mut pre: BTreeMap<Generator, Word> = BTreeMap::new();
        pre.insert(Generator::T, p_t.clone());
        for i in 1..=7u32 {
            pre.insert(
                Generator::B(i),
                p_t.inverse().concat(&single(Generator::Beta(i), 1)?)?,
            );
        }
        pre.insert(
            Generator::B(8),
            single(Generator::Beta(8), 1)?.concat(&p_t.inverse())?,
        );
        for i in 1..=7u32 {
            pre.insert(
                Generator::C(i),
                p_s.clone().concat(&single(Generator::Gamma(i), 1)?)?,
            );
        }
        pre.insert(
            Generator::C(8),
            single(Generator::Gamma(8), 1)?.concat(&p_s)?,
        );
        // d = c_3^{-1} s t^{-1} b_3
        let d_word = pre[&Generator::C(3)]
            .inverse()
            .concat(&single(Generator::Sigma, -1)?)?
            .concat(&pre[&Generator::T].inverse())?
            .concat(&pre[&Generator::B(3)])?;
        pre.insert(Generator::D, d_word);
        // a_k = alpha_k; a_{i-1} = a_i^{-1} t^{-1} a_i t; a_0 = t^{-1} a_1 t
        let mut a = single(Generator::Alpha(self.k), 1)?;
        pre.insert(Generator::A(self.k), a.clone());
        for i in (1..self.k).rev() {
            a = a
                .inverse()
                .concat(&pre[&Generator::T].inverse())?
                .concat(&a)?
                .concat(&pre[&Generator::T])?;
            pre.insert(Generator::A(i), a.clone());
        }
        let a0 = pre[&Generator::T]
            .inverse()
            .concat(&pre[&Generator::A(1)])?
            .concat(&pre[&Generator::T])?;
        pre.insert(Generator::A(0), a0);

        let mut lines = Vec::new();
        for &g in self.gamma.full_alphabet().generators() {
            let name = self.gamma.full_alphabet().name(g);
            let p_word = pre
                .get(&g)
                .ok_or_else(|| Error::PreimageFails { name: name.clone() })?;
            let image = self.substitute(p_word)?;
            let target = Word::single(self.gamma.full_alphabet(), g, 1)?;
            if !self.gamma.equal_words(&image, &target)? {
                return Err(Error::PreimageFails { name });
            }
            lines.push(CheckLine {
                name,
                size: p_word.letter_len(),
                pass: true,
            });
        }
        Ok(lines)
    }
}

/// The words `u_i` (with `a_k` substituted for `alpha_k`) and
/// `t^{i-1} v_i t^{-i}` must be freely equal, where `u_{i+1} =
/// u_i^{-1} t^{-1} u_i` and `v_{i+1} = v_i^{-1} t^{-1} v_i t` from
/// `u_0 = v_0 = a_k`. Checked as plain words, no group quotient.
pub fn word_change_check(max_i: u32) -> Result<Vec<CheckLine>> {
    let al = Alphabet::new(vec![Generator::A(1), Generator::T]);
    let a = Word::single(&al, Generator::A(1), 1)?;
    let t = Word::single(&al, Generator::T, 1)?;
    let mut u = a.clone();
    let mut v = a;
    let mut lines = Vec::new();
    for i in 1..=max_i {
        u = u.inverse().concat(&t.inverse())?.concat(&u)?;
        v = v.inverse().concat(&t.inverse())?.concat(&v)?.concat(&t)?;
        let rhs = t
            .pow(i as i64 - 1)
            .concat(&v)?
            .concat(&t.pow(-(i as i64)))?;
        if u != rhs {
            return Err(Error::CheckFails(format!(
                "u_{i} and t^{}v_{i}t^-{i} are not freely equal",
                i - 1
            )));
        }
        lines.push(CheckLine {
            name: format!("i={i}"),
            size: u.letter_len(),
            pass: true,
        });
    }
    Ok(lines)
}

/// The alternative free-by-cyclic expression of `Psi_1`: with
/// `abar_i = a_i t`, checks `t^{-1} abar_1 t = abar_0` and
/// `t^{-1} abar_0 t = u abar_1 phi(v)` through normal forms.
pub fn psi1_alt_check(params: PsiParams, budget: &Budget) -> Result<Vec<CheckLine>> {
    if params.k != 1 {
        return Err(Error::ParamMismatch("the base case needs k = 1".into()));
    }
    let phi = params.phi.clone();
    let group = make_psi(params, *budget)?;
    let full = group.full_alphabet();
    let (u, v) = group.uv().expect("Psi groups carry u, v");

    let mut lines = Vec::new();
    let lhs = full.parse_word("t^-1 a1 t t")?;
    let rhs = full.parse_word("a0 t")?;
    if !group.equal_words(&lhs, &rhs)? {
        return Err(Error::CheckFails("t^-1 (a1 t) t != a0 t".into()));
    }
    lines.push(CheckLine {
        name: "abar1".into(),
        size: lhs.letter_len(),
        pass: true,
    });

    let lhs = full.parse_word("t^-1 a0 t t")?;
    let phi_v = phi.apply(&v.reinterpret(phi.alphabet())?, budget)?;
    let rhs = u
        .reinterpret(full)?
        .concat(&full.parse_word("a1 t")?)?
        .concat(&phi_v.reinterpret(full)?)?;
    if !group.equal_words(&lhs, &rhs)? {
        return Err(Error::CheckFails(
            "t^-1 (a0 t) t != u (a1 t) phi(v)".into(),
        ));
    }
    lines.push(CheckLine {
        name: "abar0".into(),
        size: lhs.letter_len(),
        pass: true,
    });
    Ok(lines)
}
