//! Endomorphisms of free groups given by generator images.
//!
//! Application and iterated powers keep a per-endomorphism memo of
//! `theta^r(x)` for each generator `x`; negative powers require a
//! verified inverse. Inversion itself goes through the folded subgroup
//! graph of the image set (see [`fold`]): the images form a free basis
//! exactly when the folded core graph is the rose over the alphabet, and
//! the fold's provenance words express each generator through the
//! images.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use sha2::{Digest, Sha256};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fold::Folder;
use crate::runs;
use crate::word::{same_alphabet, Alphabet, Generator, Word};

type ImageMap = BTreeMap<Generator, Word>;
type PowerMemo = RwLock<HashMap<(i64, Generator), Word>>;

/// An endomorphism of the free group on `alphabet`, with an optional
/// verified inverse. Values are immutable; clones share the power memo.
#[derive(Clone)]
pub struct FreeEndo {
    alphabet: Arc<Alphabet>,
    images: Arc<ImageMap>,
    inverse_images: Option<Arc<ImageMap>>,
    digest: Arc<str>,
    memo: Arc<PowerMemo>,
}

impl std::fmt::Debug for FreeEndo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FreeEndo")
            .field("digest", &self.digest)
            .field("has_inverse", &self.inverse_images.is_some())
            .finish()
    }
}

impl FreeEndo {
    /// Builds an endomorphism from one image per alphabet generator.
    pub fn new(alphabet: &Arc<Alphabet>, images: ImageMap) -> Result<FreeEndo> {
        for g in alphabet.generators() {
            let img = images
                .get(g)
                .ok_or_else(|| Error::UnknownGenerator { name: alphabet.name(*g) })?;
            if !same_alphabet(img.alphabet(), alphabet) {
                return Err(Error::AlphabetMismatch);
            }
        }
        if images.len() != alphabet.len() {
            return Err(Error::AlphabetMismatch);
        }
        let digest = image_digest(alphabet, &images);
        Ok(FreeEndo {
            alphabet: alphabet.clone(),
            images: Arc::new(images),
            inverse_images: None,
            digest: digest.into(),
            memo: Arc::new(RwLock::new(HashMap::new())),
        })
    }

    pub fn identity(alphabet: &Arc<Alphabet>) -> FreeEndo {
        let images = alphabet
            .generators()
            .iter()
            .map(|&g| (g, Word::single(alphabet, g, 1).unwrap()))
            .collect();
        FreeEndo::new(alphabet, images).unwrap()
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn image(&self, g: Generator) -> Option<&Word> {
        self.images.get(&g)
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse_images.is_some()
    }

    /// Content hash of the generator images; stable across runs.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// The inverse as an endomorphism in its own right, if verified.
    pub fn inverse(&self) -> Option<FreeEndo> {
        let inv = self.inverse_images.as_ref()?;
        Some(FreeEndo {
            alphabet: self.alphabet.clone(),
            images: inv.clone(),
            inverse_images: Some(self.images.clone()),
            digest: image_digest(&self.alphabet, inv).into(),
            memo: Arc::new(RwLock::new(HashMap::new())),
        })
    }

    /// Homomorphic image of `w`, freely reduced.
    pub fn apply(&self, w: &Word, budget: &Budget) -> Result<Word> {
        self.apply_oriented(1, w, budget)
    }

    /// Image under the verified inverse.
    pub fn apply_inverse(&self, w: &Word, budget: &Budget) -> Result<Word> {
        self.apply_oriented(-1, w, budget)
    }

    fn oriented_images(&self, sign: i64) -> Result<&ImageMap> {
        if sign >= 0 {
            Ok(&self.images)
        } else {
            self.inverse_images
                .as_deref()
                .ok_or(Error::NoInverse)
        }
    }

    fn apply_oriented(&self, sign: i64, w: &Word, budget: &Budget) -> Result<Word> {
        if !same_alphabet(w.alphabet(), &self.alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        let images = self.oriented_images(sign)?;
        let mut out: Vec<(Generator, i64)> = Vec::new();
        for &(g, e) in w.runs() {
            let img = images.get(&g).ok_or(Error::AlphabetMismatch)?;
            append_power(&mut out, img.runs(), e, budget)?;
        }
        budget.check_len(runs::letter_len(&out), "applying endomorphism")?;
        Word::from_runs(&self.alphabet, &out)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &FreeEndo, budget: &Budget) -> Result<FreeEndo> {
        if !same_alphabet(&self.alphabet, &other.alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        let mut images = ImageMap::new();
        for &g in self.alphabet.generators() {
            images.insert(g, self.apply(other.image(g).unwrap(), budget)?);
        }
        FreeEndo::new(&self.alphabet, images)
    }

    /// The memoized image of a single generator under the `r`-th power.
    pub fn power_image(&self, r: i64, g: Generator, budget: &Budget) -> Result<Word> {
        if r == 0 {
            return Word::single(&self.alphabet, g, 1);
        }
        let sign = r.signum();
        self.oriented_images(sign)?;
        if let Some(w) = self.memo.read().unwrap().get(&(r, g)) {
            return Ok(w.clone());
        }
        // resume from the deepest cached power toward r
        let mut done = 0i64;
        let mut cur = Word::single(&self.alphabet, g, 1)?;
        {
            let memo = self.memo.read().unwrap();
            let mut j = r - sign;
            while j != 0 {
                if let Some(w) = memo.get(&(j, g)) {
                    done = j;
                    cur = w.clone();
                    break;
                }
                j -= sign;
            }
        }
        budget.check_steps(r.unsigned_abs().max(done.unsigned_abs()), "iterating endomorphism power")?;
        let mut j = done;
        while j != r {
            j += sign;
            cur = self.apply_oriented(sign, &cur, budget)?;
            self.memo.write().unwrap().insert((j, g), cur.clone());
        }
        Ok(cur)
    }

    /// `r`-fold application; negative `r` requires the verified inverse.
    pub fn power_apply(&self, r: i64, w: &Word, budget: &Budget) -> Result<Word> {
        if r == 0 {
            return Ok(w.clone());
        }
        if !same_alphabet(w.alphabet(), &self.alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        let mut out: Vec<(Generator, i64)> = Vec::new();
        for &(g, e) in w.runs() {
            let img = self.power_image(r, g, budget)?;
            append_power(&mut out, img.runs(), e, budget)?;
        }
        budget.check_len(runs::letter_len(&out), "applying endomorphism power")?;
        Word::from_runs(&self.alphabet, &out)
    }

    /// Checks that the images form a free basis and, if so, returns this
    /// endomorphism with a verified inverse attached. The composition
    /// checks run on every generator in both directions.
    pub fn invert(&self, budget: &Budget) -> Result<FreeEndo> {
        let images_vec: Vec<Word> = self
            .alphabet
            .generators()
            .iter()
            .map(|&g| self.images.get(&g).unwrap().clone())
            .collect();
        let mut folder = Folder::build(&images_vec, budget)?;
        if !folder.is_full_rose(&self.alphabet) {
            return Err(Error::NotAnAutomorphism {
                reason: "folded core graph is not the rose over the alphabet".into(),
            });
        }
        let mut inverse = ImageMap::new();
        for &g in self.alphabet.generators() {
            let single = Word::single(&self.alphabet, g, 1)?;
            let expr = folder
                .express(&single)
                .map_err(|_| Error::NotAnAutomorphism {
                    reason: format!("generator {} is not in the image", self.alphabet.name(g)),
                })?;
            inverse.insert(g, expr.substitute_generators(&self.alphabet)?);
        }
        let candidate = FreeEndo {
            alphabet: self.alphabet.clone(),
            images: self.images.clone(),
            inverse_images: Some(Arc::new(inverse)),
            digest: self.digest.clone(),
            memo: self.memo.clone(),
        };
        for &g in self.alphabet.generators() {
            let x = Word::single(&self.alphabet, g, 1)?;
            let fwd_back = candidate.apply_inverse(&candidate.apply(&x, budget)?, budget)?;
            let back_fwd = candidate.apply(&candidate.apply_inverse(&x, budget)?, budget)?;
            if fwd_back != x || back_fwd != x {
                return Err(Error::NotAnAutomorphism {
                    reason: format!(
                        "composition check failed on generator {}",
                        self.alphabet.name(g)
                    ),
                });
            }
        }
        Ok(candidate)
    }

    /// Serializes as a JSON map from generator name to word string.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for &g in self.alphabet.generators() {
            map.insert(
                self.alphabet.name(g),
                serde_json::Value::String(self.images.get(&g).unwrap().render()),
            );
        }
        serde_json::Value::Object(map)
    }
}

fn image_digest(alphabet: &Alphabet, images: &ImageMap) -> String {
    let mut hasher = Sha256::new();
    for (g, w) in images {
        hasher.update(alphabet.name(*g).as_bytes());
        hasher.update(b"->");
        hasher.update(w.render().as_bytes());
        hasher.update(b";");
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn append_power(
    out: &mut Vec<(Generator, i64)>,
    img: &[(Generator, i64)],
    e: i64,
    budget: &Budget,
) -> Result<()> {
    if img.is_empty() || e == 0 {
        return Ok(());
    }
    if img.len() == 1 {
        let (g, ie) = img[0];
        let exp = ie
            .checked_mul(e)
            .ok_or_else(|| Error::budget("multiplying run exponents"))?;
        runs::push(out, g, exp);
        return Ok(());
    }
    budget.check_steps(e.unsigned_abs(), "expanding image power")?;
    let base = if e > 0 {
        img.to_vec()
    } else {
        runs::invert(img)
    };
    for _ in 0..e.unsigned_abs() {
        for &(g, ex) in &base {
            runs::push(out, g, ex);
        }
        budget.check_runs(out.len(), "expanding image power")?;
    }
    Ok(())
}

/// A word over fresh basis letters `X_1..X_m` referencing an image list;
/// substituting `images[i]` for `X_{i+1}` recovers the expressed word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisExpression {
    runs: Vec<(u32, i64)>,
}

impl BasisExpression {
    pub(crate) fn from_runs(raw: Vec<(u32, i64)>) -> Self {
        BasisExpression {
            runs: runs::reduce(&raw),
        }
    }

    pub fn runs(&self) -> &[(u32, i64)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Substitutes the image list back in and freely reduces.
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        let alphabet = images
            .first()
            .map(|w| w.alphabet().clone())
            .ok_or(Error::NotInSubgroup)?;
        let mut out = Word::empty(&alphabet);
        for &(i, e) in &self.runs {
            out = out.concat(&images[i as usize].pow(e))?;
        }
        Ok(out)
    }

    /// Substitutes generator `i` of `alphabet` for `X_{i+1}`.
    pub fn substitute_generators(&self, alphabet: &Arc<Alphabet>) -> Result<Word> {
        let raw: Vec<(Generator, i64)> = self
            .runs
            .iter()
            .map(|&(i, e)| (alphabet.generators()[i as usize], e))
            .collect();
        Word::from_runs(alphabet, &raw)
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .runs
            .iter()
            .map(|&(i, e)| {
                if e == 1 {
                    format!("X{}", i + 1)
                } else {
                    format!("X{}^{}", i + 1, e)
                }
            })
            .collect();
        parts.join(" ")
    }
}

/// Expresses `w` in the subgroup generated by `images`, or reports that
/// it is not a member. The substitution check runs before returning.
pub fn express_in_basis(w: &Word, images: &[Word], budget: &Budget) -> Result<BasisExpression> {
    if images.is_empty() {
        return Err(Error::NotInSubgroup);
    }
    let alphabet = images[0].alphabet();
    for img in images {
        if !same_alphabet(img.alphabet(), alphabet) {
            return Err(Error::AlphabetMismatch);
        }
    }
    if !same_alphabet(w.alphabet(), alphabet) {
        return Err(Error::AlphabetMismatch);
    }
    let folder = Folder::build(images, budget)?;
    let expr = folder.express(w)?;
    debug_assert_eq!(&expr.substitute(images)?, w, "folding provenance is unsound");
    Ok(expr)
}
