//! Folded subgroup graphs with provenance.
//!
//! The graph starts as a wedge of subdivided loops at a base vertex, one
//! loop per subgroup generator, and is folded until no vertex carries two
//! equally labelled edges in the same direction. Each edge carries a
//! provenance word over the basis letters `X_1..X_m`; the invariant is
//! that for every closed path at the base, substituting the image words
//! for the `X_i` in the path's provenance recovers the path's label.
//! Folding preserves this by gauging all provenance words around the
//! absorbed vertex before each merge, so membership tracing yields an
//! expression of the traced word in the subgroup generators for free.

use std::collections::HashMap;

use crate::budget::Budget;
use crate::endo::BasisExpression;
use crate::error::{Error, Result};
use crate::runs;
use crate::word::{Alphabet, Generator, Word};

type Prov = Vec<(u32, i64)>;

struct Edge {
    src: usize,
    dst: usize,
    label: Generator,
    prov: Prov,
    alive: bool,
}

pub(crate) struct Folder {
    parent: Vec<usize>,
    edges: Vec<Edge>,
    incident: Vec<Vec<usize>>,
    base: usize,
    /// `(vertex, label, outgoing) -> edge`, valid once folding is done.
    lookup: HashMap<(usize, Generator, bool), usize>,
}

impl Folder {
    pub fn build(images: &[Word], budget: &Budget) -> Result<Folder> {
        let total: usize = images.iter().map(|w| w.letters().len()).sum();
        budget.check_runs(total, "building subgroup graph")?;
        let mut f = Folder {
            parent: vec![0],
            edges: Vec::with_capacity(total),
            incident: vec![Vec::new()],
            base: 0,
            lookup: HashMap::new(),
        };
        for (i, image) in images.iter().enumerate() {
            let letters = image.letters();
            if letters.is_empty() {
                continue;
            }
            let mut prev = f.base;
            let last = letters.len() - 1;
            for (j, &(g, sign)) in letters.iter().enumerate() {
                let cur = if j == last { f.base } else { f.new_vertex() };
                let prov: Prov = if j == last {
                    vec![(i as u32, sign as i64)]
                } else {
                    Vec::new()
                };
                let id = f.edges.len();
                if sign > 0 {
                    f.edges.push(Edge { src: prev, dst: cur, label: g, prov, alive: true });
                } else {
                    f.edges.push(Edge { src: cur, dst: prev, label: g, prov, alive: true });
                }
                f.incident[prev].push(id);
                f.incident[cur].push(id);
                prev = cur;
            }
        }
        f.fold_all(budget)?;
        f.build_lookup();
        Ok(f)
    }

    fn new_vertex(&mut self) -> usize {
        let v = self.parent.len();
        self.parent.push(v);
        self.incident.push(Vec::new());
        v
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn fold_all(&mut self, budget: &Budget) -> Result<()> {
        let mut work: Vec<usize> = (0..self.parent.len()).collect();
        let mut steps = 0u64;
        while let Some(v) = work.pop() {
            let v = self.find(v);
            loop {
                let Some((keep, absorb, outgoing)) = self.find_foldable(v) else {
                    break;
                };
                steps += 1;
                budget.check_steps(steps, "folding subgroup graph")?;
                self.fold_pair(keep, absorb, outgoing, &mut work, budget)?;
            }
        }
        Ok(())
    }

    /// Finds two equally labelled edges in the same direction at `v`,
    /// returned as `(keep, absorb, outgoing)` with the absorbed far
    /// endpoint never the base.
    fn find_foldable(&mut self, v: usize) -> Option<(usize, usize, bool)> {
        let ids: Vec<usize> = self.incident[v].clone();
        let mut out_seen: HashMap<Generator, usize> = HashMap::new();
        let mut in_seen: HashMap<Generator, usize> = HashMap::new();
        for id in ids {
            if !self.edges[id].alive {
                continue;
            }
            let (src, dst, label) = {
                let e = &self.edges[id];
                (e.src, e.dst, e.label)
            };
            let src = self.find(src);
            let dst = self.find(dst);
            if src != v && dst != v {
                continue; // stale entry
            }
            if src == v {
                if let Some(&other) = out_seen.get(&label) {
                    if other != id {
                        return Some(self.orient_pair(other, id, true));
                    }
                } else {
                    out_seen.insert(label, id);
                }
            }
            if dst == v {
                if let Some(&other) = in_seen.get(&label) {
                    if other != id {
                        return Some(self.orient_pair(other, id, false));
                    }
                } else {
                    in_seen.insert(label, id);
                }
            }
        }
        None
    }

    fn far_end(&mut self, id: usize, outgoing: bool) -> usize {
        let (s, d) = (self.edges[id].src, self.edges[id].dst);
        if outgoing {
            self.find(d)
        } else {
            self.find(s)
        }
    }

    fn orient_pair(&mut self, e1: usize, e2: usize, outgoing: bool) -> (usize, usize, bool) {
        let base = self.find(self.base);
        // never absorb the base vertex
        if self.far_end(e2, outgoing) == base && self.far_end(e1, outgoing) != base {
            (e2, e1, outgoing)
        } else {
            (e1, e2, outgoing)
        }
    }

    fn fold_pair(
        &mut self,
        keep: usize,
        absorb: usize,
        outgoing: bool,
        work: &mut Vec<usize>,
        budget: &Budget,
    ) -> Result<()> {
        debug_assert_eq!(self.edges[keep].label, self.edges[absorb].label);
        let k_far = self.far_end(keep, outgoing);
        let a_far = self.far_end(absorb, outgoing);

        if k_far == a_far {
            self.edges[absorb].alive = false;
            work.push(k_far);
            return Ok(());
        }

        // gauge the absorbed vertex so the two provenances agree
        let dk = self.edges[keep].prov.clone();
        let da = self.edges[absorb].prov.clone();
        let g = if outgoing {
            // in-edge at a_far: delta -> delta * g^{-1}; want da * g^{-1} = dk
            runs::concat(&runs::invert(&dk), &da)
        } else {
            // out-edge at a_far: delta -> g * delta; want g * da = dk
            runs::concat(&dk, &runs::invert(&da))
        };
        if !g.is_empty() {
            self.gauge(a_far, &g, budget)?;
        }
        self.edges[absorb].alive = false;
        // merge a_far into k_far
        self.parent[a_far] = k_far;
        let moved = std::mem::take(&mut self.incident[a_far]);
        self.incident[k_far].extend(moved);
        work.push(k_far);
        Ok(())
    }

    /// Multiplies provenance around `v`: outgoing edges by `g` on the
    /// left, incoming by `g^{-1}` on the right, loops by both. Closed
    /// paths through `v` keep their provenance, so the invariant holds.
    fn gauge(&mut self, v: usize, g: &Prov, budget: &Budget) -> Result<()> {
        let g_inv = runs::invert(g);
        // incident lists register an edge at both endpoints, so dedupe:
        // both ends of a self-loop are handled in one visit below
        let mut ids: Vec<usize> = self.incident[v].clone();
        ids.sort_unstable();
        ids.dedup();
        for id in ids {
            if !self.edges[id].alive {
                continue;
            }
            let (src, dst) = (self.edges[id].src, self.edges[id].dst);
            let (src, dst) = (self.find(src), self.find(dst));
            if src != v && dst != v {
                continue;
            }
            let e = &mut self.edges[id];
            let mut prov = std::mem::take(&mut e.prov);
            if src == v {
                prov = runs::concat(g, &prov);
            }
            if dst == v {
                prov = runs::concat(&prov, &g_inv);
            }
            budget.check_len(runs::letter_len(&prov), "folding provenance")?;
            self.edges[id].prov = prov;
        }
        Ok(())
    }

    fn build_lookup(&mut self) {
        let mut lookup = HashMap::new();
        for id in 0..self.edges.len() {
            if !self.edges[id].alive {
                continue;
            }
            let (src, dst, label) = {
                let e = &self.edges[id];
                (e.src, e.dst, e.label)
            };
            let src = self.find(src);
            let dst = self.find(dst);
            let prev = lookup.insert((src, label, true), id);
            debug_assert!(prev.is_none(), "graph not fully folded");
            let prev = lookup.insert((dst, label, false), id);
            debug_assert!(prev.is_none(), "graph not fully folded");
        }
        self.lookup = lookup;
    }

    /// Traces `w` from the base; if it spells a closed loop, returns its
    /// provenance as an expression in the subgroup generators.
    pub fn express(&self, w: &Word) -> Result<BasisExpression> {
        let mut parent = self.parent.clone();
        let mut find = |mut v: usize| {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        };
        let base = find(self.base);
        let mut v = base;
        let mut prov: Prov = Vec::new();
        for (g, sign) in w.letters() {
            let id = *self
                .lookup
                .get(&(v, g, sign > 0))
                .ok_or(Error::NotInSubgroup)?;
            let e = &self.edges[id];
            if sign > 0 {
                for &(x, n) in &e.prov {
                    runs::push(&mut prov, x, n);
                }
                v = find(e.dst);
            } else {
                for (x, n) in runs::invert(&e.prov) {
                    runs::push(&mut prov, x, n);
                }
                v = find(e.src);
            }
        }
        if v != base {
            return Err(Error::NotInSubgroup);
        }
        Ok(BasisExpression::from_runs(prov))
    }

    /// True when, after trimming hanging trees, the graph is the rose
    /// with exactly one loop per alphabet generator at the base.
    pub fn is_full_rose(&mut self, alphabet: &Alphabet) -> bool {
        let base = self.find(self.base);
        let mut alive: Vec<usize> = (0..self.edges.len())
            .filter(|&i| self.edges[i].alive)
            .collect();
        // trim vertices of degree <= 1 (other than the base)
        loop {
            let mut degree: HashMap<usize, usize> = HashMap::new();
            for &i in &alive {
                let (s, d) = (self.edges[i].src, self.edges[i].dst);
                let (s, d) = (self.find(s), self.find(d));
                *degree.entry(s).or_insert(0) += 1;
                *degree.entry(d).or_insert(0) += 1;
            }
            let before = alive.len();
            let doomed: Vec<usize> = degree
                .iter()
                .filter(|&(&v, &deg)| v != base && deg <= 1)
                .map(|(&v, _)| v)
                .collect();
            if !doomed.is_empty() {
                alive.retain(|&i| {
                    let (s, d) = (self.edges[i].src, self.edges[i].dst);
                    let (s, d) = (self.find(s), self.find(d));
                    !(doomed.contains(&s) || doomed.contains(&d))
                });
            }
            if alive.len() == before {
                break;
            }
        }
        if alive.len() != alphabet.len() {
            return false;
        }
        let mut seen: Vec<Generator> = Vec::new();
        for &i in &alive {
            let (s, d, label) = {
                let e = &self.edges[i];
                (e.src, e.dst, e.label)
            };
            if self.find(s) != base || self.find(d) != base {
                return false;
            }
            if seen.contains(&label) || !alphabet.contains(label) {
                return false;
            }
            seen.push(label);
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;
    use std::sync::Arc;

    fn al2() -> Arc<Alphabet> {
        Alphabet::new(vec![Generator::B(1), Generator::B(2)])
    }

    #[test]
    fn membership_in_index_two_subgroup() {
        let al = al2();
        let b = Budget::default();
        // <b1^2, b2, b1 b2 b1^-1> has index 2
        let images = vec![
            al.parse_word("b1^2").unwrap(),
            al.parse_word("b2").unwrap(),
            al.parse_word("b1 b2 b1^-1").unwrap(),
        ];
        let folder = &mut Folder::build(&images, &b).unwrap();
        let member = al.parse_word("b1^2 b2 b1^2").unwrap();
        let expr = folder.express(&member).unwrap();
        assert_eq!(expr.substitute(&images).unwrap(), member);
        assert!(folder.express(&al.parse_word("b1").unwrap()).is_err());
        assert!(!folder.is_full_rose(&al));
    }

    #[test]
    fn rose_detected_for_basis() {
        let al = al2();
        let b = Budget::default();
        let images = vec![
            al.parse_word("b1 b2").unwrap(),
            al.parse_word("b2").unwrap(),
        ];
        let mut folder = Folder::build(&images, &b).unwrap();
        assert!(folder.is_full_rose(&al));
        let expr = folder.express(&al.parse_word("b1").unwrap()).unwrap();
        assert_eq!(
            expr.substitute(&images).unwrap(),
            al.parse_word("b1").unwrap()
        );
    }

    #[test]
    fn gauge_handles_merged_incident_duplicates() {
        // regression: a vertex merge used to leave duplicate incident
        // entries that double-applied the gauge word
        let al = Alphabet::new(vec![Generator::B(1), Generator::B(2), Generator::B(3)]);
        let b = Budget::default();
        let images = vec![
            al.parse_word("b2^-1 b1^-1 b2").unwrap(),
            al.parse_word("b2^-1").unwrap(),
            al.parse_word("b3").unwrap(),
        ];
        let mut folder = Folder::build(&images, &b).unwrap();
        assert!(folder.is_full_rose(&al));
        for (g, inverse_image) in [("b1", "b2^-1 b1^-1 b2"), ("b2", "b2^-1"), ("b3", "b3")] {
            let expr = folder.express(&al.parse_word(g).unwrap()).unwrap();
            assert_eq!(expr.substitute(&images).unwrap().render(), g);
            assert_eq!(expr.substitute_generators(&al).unwrap().render(), inverse_image);
        }
    }

    #[test]
    fn random_nielsen_automorphisms_fold_to_roses() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let b = Budget::default();
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..500 {
            let n = rng.gen_range(2..5u32);
            let al = Alphabet::new((1..=n).map(Generator::B).collect());
            let mut images: Vec<Word> = (1..=n)
                .map(|i| Word::single(&al, Generator::B(i), 1).unwrap())
                .collect();
            for _ in 0..rng.gen_range(1..9) {
                let i = rng.gen_range(0..n as usize);
                let j = rng.gen_range(0..n as usize);
                match rng.gen_range(0..4) {
                    0 => images[i] = images[i].inverse(),
                    1 if i != j => images[i] = images[i].concat(&images[j]).unwrap(),
                    2 if i != j => images[i] = images[j].inverse().concat(&images[i]).unwrap(),
                    _ => {}
                }
            }
            let mut folder = Folder::build(&images, &b).unwrap();
            assert!(folder.is_full_rose(&al));
            for &g in al.generators() {
                let x = Word::single(&al, g, 1).unwrap();
                let expr = folder.express(&x).unwrap();
                assert_eq!(expr.substitute(&images).unwrap(), x);
            }
        }
    }
}
