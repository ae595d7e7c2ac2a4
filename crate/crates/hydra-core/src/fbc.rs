//! Free-by-cyclic groups `F ⋊_θ Z` and their canonical normal forms.
//!
//! Every element is uniquely `t^r · w` with `w` a reduced word in the
//! free part. Folding a letter stream left to right needs only
//! `theta^{±1}` per `t`-letter, and the inverse exists because group
//! construction verifies `theta` as an automorphism up front. The word
//! problem is then normal-form equality.
//!
//! Three families are built here: the hydra groups `G_k`, the
//! parametrised family `Psi_k` (choose `l`, words `u`, `v` on the `b`
//! generators and an automorphism `phi`), and `Gamma_k`, which is the
//! `Psi`-shaped group on `a_0..a_k, b_1..b_8, c_1..c_8, d` whose `u`,
//! `v` and `w` are resolved to `t`-free words during construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::budget::Budget;
use crate::endo::FreeEndo;
use crate::error::{Error, Result};
use crate::word::{same_alphabet, Alphabet, Generator, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupLabel {
    G { k: u32 },
    Psi { k: u32, l: u32 },
    Gamma { k: u32 },
}

impl GroupLabel {
    pub fn describe(&self) -> String {
        match self {
            GroupLabel::G { k } => format!("G_{k}"),
            GroupLabel::Psi { k, l } => format!("Psi_{k}(l={l})"),
            GroupLabel::Gamma { k } => format!("Gamma_{k}"),
        }
    }

    pub fn k(&self) -> u32 {
        match self {
            GroupLabel::G { k } | GroupLabel::Psi { k, .. } | GroupLabel::Gamma { k } => *k,
        }
    }
}

/// Parameters of a `Psi` group: `u`, `v` and `phi` live on `b_1..b_l`.
#[derive(Debug, Clone)]
pub struct PsiParams {
    pub k: u32,
    pub l: u32,
    pub u: Word,
    pub v: Word,
    pub phi: FreeEndo,
}

impl PsiParams {
    /// The default test instance: `l = 1`, `u = v = b_1`, `phi` the
    /// identity — the smallest instance exercising every `theta` row.
    pub fn test_instance(k: u32) -> PsiParams {
        let b_alphabet = Alphabet::new(vec![Generator::B(1)]);
        let b1 = b_alphabet.parse_word("b1").unwrap();
        PsiParams {
            k,
            l: 1,
            u: b1.clone(),
            v: b1,
            phi: FreeEndo::identity(&b_alphabet),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k < 1 || self.l < 1 {
            return Err(Error::ParamMismatch("need k >= 1 and l >= 1".into()));
        }
        for w in [&self.u, &self.v] {
            for &(g, _) in w.runs() {
                match g {
                    Generator::B(j) if (1..=self.l).contains(&j) => {}
                    _ => {
                        return Err(Error::ParamMismatch(
                            "u and v must be words on b_1..b_l".into(),
                        ))
                    }
                }
            }
        }
        if self.phi.alphabet().len() != self.l as usize {
            return Err(Error::ParamMismatch("phi must act on b_1..b_l".into()));
        }
        Ok(())
    }

    fn same_as(&self, other: &PsiParams) -> bool {
        self.l == other.l
            && self.u.render() == other.u.render()
            && self.v.render() == other.v.render()
            && self.phi.digest() == other.phi.digest()
    }
}

/// An element in normal form `t^r · w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    pub t_exp: i64,
    pub body: Word,
}

impl GroupElement {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "t_exp": self.t_exp,
            "body": self.body.render(),
        })
    }
}

pub struct FbcGroup {
    label: GroupLabel,
    f_alphabet: Arc<Alphabet>,
    full_alphabet: Arc<Alphabet>,
    theta: FreeEndo,
    budget: Budget,
    psi_params: Option<PsiParams>,
    /// Resolved `u`, `v` over the free-part alphabet (`Psi`, `Gamma`).
    uv: Option<(Word, Word)>,
}

impl FbcGroup {
    pub fn label(&self) -> &GroupLabel {
        &self.label
    }

    pub fn f_alphabet(&self) -> &Arc<Alphabet> {
        &self.f_alphabet
    }

    /// The free-part alphabet together with `t`; input streams for
    /// normal forms parse against this.
    pub fn full_alphabet(&self) -> &Arc<Alphabet> {
        &self.full_alphabet
    }

    pub fn theta(&self) -> &FreeEndo {
        &self.theta
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn set_budget(&mut self, budget: Budget) {
        self.budget = budget;
    }

    pub fn uv(&self) -> Option<(&Word, &Word)> {
        self.uv.as_ref().map(|(u, v)| (u, v))
    }

    pub fn psi_params(&self) -> Option<&PsiParams> {
        self.psi_params.as_ref()
    }

    /// `a`-family indices present in the free part, ascending.
    pub fn a_indices(&self) -> Vec<u32> {
        let mut ix: Vec<u32> = self
            .f_alphabet
            .generators()
            .iter()
            .filter_map(|g| g.a_index())
            .collect();
        ix.sort_unstable();
        ix
    }

    /// Free-part generators outside the `a` family.
    pub fn rest_generators(&self) -> Vec<Generator> {
        self.f_alphabet
            .generators()
            .iter()
            .copied()
            .filter(|g| !g.is_a())
            .collect()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            t_exp: 0,
            body: Word::empty(&self.f_alphabet),
        }
    }

    /// Folds a letter stream over `f_alphabet ∪ {t}` into normal form.
    pub fn normal_form(&self, raw: &Word) -> Result<GroupElement> {
        if !same_alphabet(raw.alphabet(), &self.full_alphabet)
            && !same_alphabet(raw.alphabet(), &self.f_alphabet)
        {
            return Err(Error::AlphabetMismatch);
        }
        let mut t_exp = 0i64;
        let mut body = Word::empty(&self.f_alphabet);
        for &(g, e) in raw.runs() {
            if g == Generator::T {
                t_exp = t_exp
                    .checked_add(e)
                    .ok_or_else(|| Error::budget("t-exponent"))?;
                body = self.theta.power_apply(e, &body, &self.budget)?;
            } else {
                body = body.concat(&Word::single(&self.f_alphabet, g, e)?)?;
            }
            self.budget
                .check_len(body.letter_len(), "normal form body")?;
        }
        Ok(GroupElement { t_exp, body })
    }

    /// Parses `text` over `f_alphabet ∪ {t}` and normalizes.
    pub fn nf_str(&self, text: &str) -> Result<GroupElement> {
        let raw = self.full_alphabet.parse_word(text)?;
        self.normal_form(&raw)
    }

    /// The raw letter stream `t^r · w` of an element.
    pub fn to_raw(&self, g: &GroupElement) -> Result<Word> {
        let t = Word::single(&self.full_alphabet, Generator::T, 1)?;
        let body = g.body.reinterpret(&self.full_alphabet)?;
        t.pow(g.t_exp).concat(&body)
    }

    pub fn multiply(&self, g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
        let t_exp = g1
            .t_exp
            .checked_add(g2.t_exp)
            .ok_or_else(|| Error::budget("t-exponent"))?;
        let shifted = self.theta.power_apply(g2.t_exp, &g1.body, &self.budget)?;
        let body = shifted.concat(&g2.body)?;
        self.budget.check_len(body.letter_len(), "product body")?;
        Ok(GroupElement { t_exp, body })
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        // (t^r w)^{-1} = t^{-r} theta^{-r}(w^{-1})
        let body = self
            .theta
            .power_apply(-g.t_exp, &g.body.inverse(), &self.budget)?;
        Ok(GroupElement {
            t_exp: g.t_exp.checked_neg().ok_or_else(|| Error::budget("t-exponent"))?,
            body,
        })
    }

    /// Word problem: do two letter streams name the same element?
    pub fn equal_words(&self, x: &Word, y: &Word) -> Result<bool> {
        Ok(self.normal_form(x)? == self.normal_form(y)?)
    }

    pub fn equal_strs(&self, x: &str, y: &str) -> Result<bool> {
        Ok(self.nf_str(x)? == self.nf_str(y)?)
    }
}

fn full_alphabet_of(f: &Arc<Alphabet>) -> Arc<Alphabet> {
    let mut gens = f.generators().to_vec();
    gens.push(Generator::T);
    Alphabet::new(gens)
}

/// The hydra group `G_k`: `theta(a_1) = a_1`, `theta(a_i) = a_i a_{i-1}`.
pub fn make_g(k: u32, budget: Budget) -> Result<FbcGroup> {
    if k < 1 {
        return Err(Error::ParamMismatch("need k >= 1".into()));
    }
    let f = Alphabet::new((1..=k).map(Generator::A).collect());
    let mut images = BTreeMap::new();
    images.insert(Generator::A(1), Word::single(&f, Generator::A(1), 1)?);
    for i in 2..=k {
        images.insert(
            Generator::A(i),
            Word::from_runs(&f, &[(Generator::A(i), 1), (Generator::A(i - 1), 1)])?,
        );
    }
    let theta = FreeEndo::new(&f, images)?.invert(&budget)?;
    Ok(FbcGroup {
        label: GroupLabel::G { k },
        full_alphabet: full_alphabet_of(&f),
        f_alphabet: f,
        theta,
        budget,
        psi_params: None,
        uv: None,
    })
}

/// A `Psi_k` group from its parameters: `theta(a_0) = u a_1 v`,
/// `theta(a_1) = a_0`, `theta(a_i) = a_i a_{i-1}`, and `theta`
/// restricted to the `b` generators is `phi`.
pub fn make_psi(params: PsiParams, budget: Budget) -> Result<FbcGroup> {
    params.validate()?;
    let (k, l) = (params.k, params.l);
    let mut gens: Vec<Generator> = (0..=k).map(Generator::A).collect();
    gens.extend((1..=l).map(Generator::B));
    let f = Alphabet::new(gens);

    let u = params.u.reinterpret(&f)?;
    let v = params.v.reinterpret(&f)?;
    let mut images = BTreeMap::new();
    images.insert(
        Generator::A(0),
        u.concat(&Word::single(&f, Generator::A(1), 1)?)?.concat(&v)?,
    );
    images.insert(Generator::A(1), Word::single(&f, Generator::A(0), 1)?);
    for i in 2..=k {
        images.insert(
            Generator::A(i),
            Word::from_runs(&f, &[(Generator::A(i), 1), (Generator::A(i - 1), 1)])?,
        );
    }
    for j in 1..=l {
        let img = params
            .phi
            .image(Generator::B(j))
            .ok_or(Error::AlphabetMismatch)?
            .reinterpret(&f)?;
        images.insert(Generator::B(j), img);
    }
    let theta = FreeEndo::new(&f, images)?.invert(&budget)?;
    Ok(FbcGroup {
        label: GroupLabel::Psi { k, l },
        full_alphabet: full_alphabet_of(&f),
        f_alphabet: f,
        theta,
        budget,
        uv: Some((u, v)),
        psi_params: Some(params),
    })
}

/// The resolved `t`-free ingredients of the `Gamma_k` construction,
/// over the alphabet `b_1..b_8, c_1..c_8, d`.
#[derive(Debug, Clone)]
pub struct GammaPieces {
    pub bcd_alphabet: Arc<Alphabet>,
    pub phi_images: BTreeMap<Generator, Word>,
    pub psi_images: BTreeMap<Generator, Word>,
    /// `theta` restricted to `b, c, d`, rows already resolved.
    pub theta_bcd: FreeEndo,
    pub u: Word,
    pub v: Word,
    pub w: Word,
}

fn lot_images(alphabet: &Arc<Alphabet>, gen: fn(u32) -> Generator) -> BTreeMap<Generator, Word> {
    let mut images = BTreeMap::new();
    for i in 1..=7u32 {
        let raw: Vec<(Generator, i64)> = (i..=8).map(|j| (gen(j), 1)).collect();
        images.insert(gen(i), Word::from_runs(alphabet, &raw).unwrap());
    }
    let mut raw: Vec<(Generator, i64)> = (1..=8u32).rev().map(|j| (gen(j), -1)).collect();
    raw.push((gen(8), 1));
    images.insert(gen(8), Word::from_runs(alphabet, &raw).unwrap());
    images
}

/// Resolves `u`, `v`, `w` and the `theta` action on `b, c, d` for
/// `Gamma_k`. The fixed order — `b` rows, `d` row, `w`, `c` rows, then
/// `u` and `v` as `theta^k`-images — avoids the apparent circularity in
/// the defining data.
pub fn gamma_pieces(k: u32, budget: &Budget) -> Result<GammaPieces> {
    let mut gens: Vec<Generator> = (1..=8).map(Generator::B).collect();
    gens.extend((1..=8).map(Generator::C));
    gens.push(Generator::D);
    let bcd = Alphabet::new(gens);

    let phi_images = lot_images(&bcd, Generator::B);
    let psi_images = lot_images(&bcd, Generator::C);
    let phi = |i: u32| phi_images.get(&Generator::B(i)).unwrap().clone();
    let psi = |i: u32| psi_images.get(&Generator::C(i)).unwrap().clone();
    let d = Word::single(&bcd, Generator::D, 1)?;

    // theta(d) = psi(c3) psi(c5) phi(b5)^{-1} d phi(b3)
    let theta_d = psi(3)
        .concat(&psi(5))?
        .concat(&phi(5).inverse())?
        .concat(&d)?
        .concat(&phi(3))?;

    // w = psi(c3)^{-1} t^{-1} b3 d^{-1} t, resolved via
    // t^{-1} b3 d^{-1} t = phi(b3) theta(d)^{-1} to the t-free word
    // psi(c3)^{-1} d^{-1} phi(b5) psi(c5)^{-1} psi(c3)^{-1}
    let w = psi(3)
        .inverse()
        .concat(&phi(3))?
        .concat(&theta_d.inverse())?;

    let mut theta_images = phi_images.clone();
    theta_images.insert(Generator::D, theta_d);
    for i in 1..=8u32 {
        let img = w.inverse().concat(&psi(i))?.concat(&w)?;
        theta_images.insert(Generator::C(i), img);
    }
    let theta_bcd = FreeEndo::new(&bcd, theta_images)?;

    // u = theta^k(c7^{-1} c3 d b3^{-1}), v = theta^k(b3 d^{-1} c3^{-1} c1)
    let u_seed = bcd.parse_word("c7^-1 c3 d b3^-1")?;
    let v_seed = bcd.parse_word("b3 d^-1 c3^-1 c1")?;
    let u = theta_bcd.power_apply(k as i64, &u_seed, budget)?;
    let v = theta_bcd.power_apply(k as i64, &v_seed, budget)?;

    Ok(GammaPieces {
        bcd_alphabet: bcd,
        phi_images,
        psi_images,
        theta_bcd,
        u,
        v,
        w,
    })
}

/// `Gamma_k` as a free-by-cyclic group on `a_0..a_k, b, c, d`.
pub fn make_gamma(k: u32, budget: Budget) -> Result<FbcGroup> {
    if k < 1 {
        return Err(Error::ParamMismatch("need k >= 1".into()));
    }
    let pieces = gamma_pieces(k, &budget)?;
    let mut gens: Vec<Generator> = (0..=k).map(Generator::A).collect();
    gens.extend(pieces.bcd_alphabet.generators().iter().copied());
    let f = Alphabet::new(gens);

    let u = pieces.u.reinterpret(&f)?;
    let v = pieces.v.reinterpret(&f)?;
    let mut images = BTreeMap::new();
    images.insert(
        Generator::A(0),
        u.concat(&Word::single(&f, Generator::A(1), 1)?)?.concat(&v)?,
    );
    images.insert(Generator::A(1), Word::single(&f, Generator::A(0), 1)?);
    for i in 2..=k {
        images.insert(
            Generator::A(i),
            Word::from_runs(&f, &[(Generator::A(i), 1), (Generator::A(i - 1), 1)])?,
        );
    }
    for &g in pieces.bcd_alphabet.generators() {
        let img = pieces.theta_bcd.image(g).unwrap().reinterpret(&f)?;
        images.insert(g, img);
    }
    let theta = FreeEndo::new(&f, images)?.invert(&budget)?;
    Ok(FbcGroup {
        label: GroupLabel::Gamma { k },
        full_alphabet: full_alphabet_of(&f),
        f_alphabet: f,
        theta,
        budget,
        psi_params: None,
        uv: Some((u, v)),
    })
}

/// The canonical inclusion `Psi_i -> Psi_k`: normal forms carry over
/// verbatim.
pub fn canonical_embed(
    small: &FbcGroup,
    big: &FbcGroup,
    g: &GroupElement,
) -> Result<GroupElement> {
    let (sp, bp) = match (&small.psi_params, &big.psi_params) {
        (Some(s), Some(b)) => (s, b),
        _ => {
            return Err(Error::ParamMismatch(
                "canonical embedding is defined for Psi groups".into(),
            ))
        }
    };
    if sp.k > bp.k {
        return Err(Error::ParamMismatch("need i <= k".into()));
    }
    if !sp.same_as(bp) {
        return Err(Error::ParamMismatch("l, u, v and phi must match".into()));
    }
    Ok(GroupElement {
        t_exp: g.t_exp,
        body: g.body.reinterpret(&big.f_alphabet)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi2() -> FbcGroup {
        make_psi(PsiParams::test_instance(2), Budget::default()).unwrap()
    }

    #[test]
    fn psi_theta_rows() {
        let g = psi2();
        let b = Budget::default();
        let row = |name: &str| {
            g.theta()
                .apply(&g.f_alphabet().parse_word(name).unwrap(), &b)
                .unwrap()
                .render()
        };
        assert_eq!(row("a0"), "b1 a1 b1");
        assert_eq!(row("a1"), "a0");
        assert_eq!(row("a2"), "a2 a1");
        assert_eq!(row("b1"), "b1");
    }

    #[test]
    fn conjugation_relation_holds_for_every_generator() {
        for group in [
            make_g(2, Budget::default()).unwrap(),
            psi2(),
            make_gamma(1, Budget::default()).unwrap(),
        ] {
            let b = Budget::default();
            for &x in group.f_alphabet().generators() {
                let name = group.f_alphabet().name(x);
                let lhs = group.nf_str(&format!("t^-1 {name} t")).unwrap();
                let image = group
                    .theta()
                    .apply(&Word::single(group.f_alphabet(), x, 1).unwrap(), &b)
                    .unwrap();
                let rhs = group
                    .normal_form(&image.reinterpret(group.full_alphabet()).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs, "relation fails for {name}");
            }
        }
    }

    #[test]
    fn normal_form_examples() {
        let g = psi2();
        let nf = g.nf_str("t^-1 a2 t").unwrap();
        assert_eq!(nf.t_exp, 0);
        assert_eq!(nf.body.render(), "a2 a1");

        let id = g.nf_str("t t^-1").unwrap();
        assert_eq!(id, g.identity());

        let nf = g.nf_str("a1 t").unwrap();
        assert_eq!(nf.t_exp, 1);
        assert_eq!(nf.body.render(), "a0");
    }

    #[test]
    fn multiply_and_inverse() {
        let g = psi2();
        let x = g.nf_str("a1 t").unwrap();
        assert_eq!(g.multiply(&x, &g.identity()).unwrap(), x);

        // (1, a0) * (-1, eps) = (0, theta^{-1}(a0)) = (0, a1)
        let lhs = g.nf_str("t a0").unwrap();
        let rhs = g.nf_str("t^-1").unwrap();
        let prod = g.multiply(&lhs, &rhs).unwrap();
        assert_eq!(prod.t_exp, 0);
        assert_eq!(prod.body.render(), "a1");

        let w = g.nf_str("a2 t^2 b1 a0^-1 t^-1").unwrap();
        let winv = g.inverse(&w).unwrap();
        assert_eq!(g.multiply(&w, &winv).unwrap(), g.identity());
        assert_eq!(g.multiply(&winv, &w).unwrap(), g.identity());
    }

    #[test]
    fn equal_words_examples() {
        let g = psi2();
        assert!(g.equal_strs("t^-1 a2 t", "a2 a1").unwrap());
        assert!(!g.equal_strs("t", "").unwrap());
    }

    #[test]
    fn gamma_theta_row_on_b3() {
        let budget = Budget::default();
        let gamma = make_gamma(2, Budget::default()).unwrap();
        let b3 = gamma.f_alphabet().parse_word("b3").unwrap();
        assert_eq!(
            gamma.theta().apply(&b3, &budget).unwrap().render(),
            "b3 b4 b5 b6 b7 b8"
        );
    }

    #[test]
    fn gamma_relation_u_a1_v() {
        // t^-1 a0 t = u a1 v by construction
        let gamma = make_gamma(1, Budget::default()).unwrap();
        let (u, v) = gamma.uv().unwrap();
        let full = gamma.full_alphabet().clone();
        let lhs = gamma.nf_str("t^-1 a0 t").unwrap();
        let rhs_word = u
            .reinterpret(&full)
            .unwrap()
            .concat(&full.parse_word("a1").unwrap())
            .unwrap()
            .concat(&v.reinterpret(&full).unwrap())
            .unwrap();
        let rhs = gamma.normal_form(&rhs_word).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn embed_preserves_normal_forms() {
        let small = psi2();
        let big = make_psi(PsiParams::test_instance(3), Budget::default()).unwrap();
        let id = canonical_embed(&small, &big, &small.identity()).unwrap();
        assert_eq!(id, big.identity());

        let el = small.nf_str("t^-1 a2 t").unwrap();
        let embedded = canonical_embed(&small, &big, &el).unwrap();
        let direct = big.nf_str("t^-1 a2 t").unwrap();
        assert_eq!(embedded, direct);
        assert_eq!(embedded.body.render(), "a2 a1");
    }

    #[test]
    fn embed_rejects_mismatched_params() {
        let small = psi2();
        let mut params = PsiParams::test_instance(3);
        let b_alphabet = params.phi.alphabet().clone();
        params.u = b_alphabet.parse_word("b1^2").unwrap();
        let big = make_psi(params, Budget::default()).unwrap();
        assert!(matches!(
            canonical_embed(&small, &big, &small.identity()),
            Err(Error::ParamMismatch(_))
        ));
    }

    #[test]
    fn randomized_normal_form_is_homomorphic() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let g = psi2();
        let full = g.full_alphabet().clone();
        let gens = full.generators().to_vec();
        let mut rng = StdRng::seed_from_u64(0x51a3);
        for _ in 0..400 {
            let mut mk = |len: usize| {
                let raw: Vec<(Generator, i64)> = (0..len)
                    .map(|_| {
                        (
                            gens[rng.gen_range(0..gens.len())],
                            if rng.gen() { 1 } else { -1 },
                        )
                    })
                    .collect();
                Word::from_runs(&full, &raw).unwrap()
            };
            let x = mk(6);
            let y = mk(6);
            let stream = x.concat(&y).unwrap();
            let folded = g.normal_form(&stream).unwrap();
            let split = g
                .multiply(&g.normal_form(&x).unwrap(), &g.normal_form(&y).unwrap())
                .unwrap();
            assert_eq!(folded, split);
        }
    }
}
