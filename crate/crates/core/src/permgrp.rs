//! Finite permutation groups with a deterministic Schreier–Sims chain, and
//! the level quotients `Ḡ_n = G / Stab_G(ℓ_n)` of a self-similar group.
//!
//! Permutations act on the right: `x^(pq) = (x^p)^q`, matching the
//! left-to-right word convention of [`crate::wreath`]. Level-`n` vertices
//! are numbered by their shortlex index.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::wreath::{GroupDef, Word};

/// A permutation of `{0, .., m-1}` stored as its image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm((0..degree as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Perm> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            let x = x as usize;
            if x >= images.len() || seen[x] {
                return Err(Error::InvalidPerm(format!("{images:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Builds a permutation from cycles, e.g. `[[0, 1], [2, 3]]`.
    pub fn from_cycles(degree: usize, cycles: &[Vec<u32>]) -> Result<Perm> {
        let mut p = Perm::identity(degree);
        for c in cycles {
            let mut img: Vec<u32> = (0..degree as u32).collect();
            for (k, &x) in c.iter().enumerate() {
                if x as usize >= degree {
                    return Err(Error::InvalidPerm(format!("point {x} out of range")));
                }
                img[x as usize] = c[(k + 1) % c.len()];
            }
            p = p.mul(&Perm::from_images(img)?);
        }
        Ok(p)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn image(&self, x: u32) -> u32 {
        self.0[x as usize]
    }

    /// `self` then `other`.
    pub fn mul(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x as usize] = i as u32;
        }
        Perm(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `other^-1 · self · other`.
    pub fn conj(&self, other: &Perm) -> Perm {
        other.inverse().mul(self).mul(other)
    }

    /// `[self, other] = self^-1 other^-1 self other`.
    pub fn commutator(&self, other: &Perm) -> Perm {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    pub fn pow(&self, k: usize) -> Perm {
        let mut out = Perm::identity(self.degree());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn order(&self) -> usize {
        let mut seen = vec![false; self.0.len()];
        let mut acc = 1usize;
        for s in 0..self.0.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            acc = lcm(acc, len);
        }
        acc
    }

    fn first_moved(&self) -> Option<u32> {
        self.0
            .iter()
            .enumerate()
            .find(|(i, &x)| *i as u32 != x)
            .map(|(i, _)| i as u32)
    }

    /// Restriction to an invariant subset, renumbered by position in `points`.
    pub fn restrict(&self, points: &[u32]) -> Perm {
        let pos: HashMap<u32, u32> = points.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        Perm(points.iter().map(|&p| pos[&self.0[p as usize]]).collect())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut any = false;
        for s in 0..self.0.len() {
            if seen[s] || self.0[s] as usize == s {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut x = s;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.0[x] as usize;
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

struct Level {
    base: u32,
    orbit: Vec<u32>,
    /// `trans[x]` maps the base point to `x`.
    trans: Vec<Option<Perm>>,
    trans_inv: Vec<Option<Perm>>,
}

struct Chain {
    strong: Vec<Perm>,
    levels: Vec<Level>,
}

impl Chain {
    fn level_gens<'a>(strong: &'a [Perm], base: &[u32]) -> Vec<&'a Perm> {
        strong
            .iter()
            .filter(|s| base.iter().all(|&b| s.image(b) == b))
            .collect()
    }

    fn make_level(degree: usize, strong: &[Perm], base: &[u32], i: usize) -> Level {
        let gens = Self::level_gens(strong, &base[..i]);
        let b = base[i];
        let mut trans: Vec<Option<Perm>> = vec![None; degree];
        trans[b as usize] = Some(Perm::identity(degree));
        let mut orbit = vec![b];
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            k += 1;
            for s in &gens {
                let y = s.image(x);
                if trans[y as usize].is_none() {
                    trans[y as usize] = Some(trans[x as usize].as_ref().unwrap().mul(s));
                    orbit.push(y);
                }
            }
        }
        let trans_inv = trans.iter().map(|t| t.as_ref().map(Perm::inverse)).collect();
        Level {
            base: b,
            orbit,
            trans,
            trans_inv,
        }
    }

    /// Sifts `h` starting at level `from`; returns the residue and the
    /// level where sifting stopped (`levels.len()` if it went through).
    fn sift(&self, mut h: Perm, from: usize) -> (Perm, usize) {
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let x = h.image(level.base);
            match &level.trans_inv[x as usize] {
                Some(inv) => h = h.mul(inv),
                None => return (h, i),
            }
        }
        (h, self.levels.len())
    }

    /// Deterministic Schreier–Sims from the given generators, keeping
    /// `base_prefix` as the beginning of the base.
    fn build(degree: usize, gens: &[Perm], base_prefix: &[u32]) -> Chain {
        let mut strong: Vec<Perm> = Vec::new();
        for g in gens {
            if !g.is_identity() && !strong.contains(g) {
                strong.push(g.clone());
            }
        }
        let mut base: Vec<u32> = base_prefix.to_vec();
        for s in &strong {
            if base.iter().all(|&b| s.image(b) == b) {
                base.push(s.first_moved().unwrap());
            }
        }
        let mut chain = Chain {
            strong,
            levels: Vec::new(),
        };
        chain.levels = (0..base.len())
            .map(|i| Self::make_level(degree, &chain.strong, &base, i))
            .collect();
        let mut i = base.len() as isize - 1;
        while i >= 0 {
            let iu = i as usize;
            let gens: Vec<Perm> = Self::level_gens(&chain.strong, &base[..iu])
                .into_iter()
                .cloned()
                .collect();
            let mut restart = None;
            'scan: for &x in &chain.levels[iu].orbit {
                let ux = chain.levels[iu].trans[x as usize].as_ref().unwrap();
                for s in &gens {
                    let y = s.image(x);
                    let h = ux.mul(s).mul(chain.levels[iu].trans_inv[y as usize].as_ref().unwrap());
                    if h.is_identity() {
                        continue;
                    }
                    let (res, j) = chain.sift(h, iu + 1);
                    if j == chain.levels.len() && res.is_identity() {
                        continue;
                    }
                    if j == chain.levels.len() {
                        base.push(res.first_moved().unwrap());
                    }
                    chain.strong.push(res);
                    restart = Some(j);
                    break 'scan;
                }
            }
            match restart {
                Some(j) => {
                    chain.levels.truncate(iu + 1);
                    for l in iu + 1..base.len() {
                        let level = Self::make_level(degree, &chain.strong, &base, l);
                        chain.levels.push(level);
                    }
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
        chain
    }
}

/// A permutation group given by generators; the stabilizer chain is built
/// on first use.
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: OnceLock<Chain>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        PermGroup::new(self.degree, self.gens.clone()).expect("already validated")
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("gens", &self.gens)
            .finish()
    }
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<PermGroup> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(Error::DegreeMismatch(g.degree(), degree));
        }
        Ok(PermGroup {
            degree,
            gens,
            chain: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup {
            degree,
            gens: Vec::new(),
            chain: OnceLock::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    fn chain(&self) -> &Chain {
        self.chain.get_or_init(|| Chain::build(self.degree, &self.gens, &[]))
    }

    pub fn base(&self) -> Vec<u32> {
        self.chain().levels.iter().map(|l| l.base).collect()
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.chain().strong
    }

    pub fn order(&self) -> BigUint {
        self.chain()
            .levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Order as a machine integer, if it fits.
    pub fn order_usize(&self) -> Option<usize> {
        self.order().to_usize()
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.iter().all(Perm::is_identity)
    }

    pub fn contains(&self, p: &Perm) -> bool {
        if p.degree() != self.degree {
            return false;
        }
        let (res, j) = self.chain().sift(p.clone(), 0);
        j == self.chain().levels.len() && res.is_identity()
    }

    /// A group with the same base prefix and one more generator.
    pub fn with_generator(&self, p: Perm) -> PermGroup {
        let chain = self.chain();
        let mut gens = chain.strong.clone();
        gens.push(p.clone());
        let base: Vec<u32> = chain.levels.iter().map(|l| l.base).collect();
        let built = Chain::build(self.degree, &gens, &base);
        let mut out_gens = self.gens.clone();
        out_gens.push(p);
        let out = PermGroup {
            degree: self.degree,
            gens: out_gens,
            chain: OnceLock::new(),
        };
        let _ = out.chain.set(built);
        out
    }

    /// `[self : ⟨gens⟩]`; every generator must lie in `self`.
    pub fn subgroup_index(&self, gens: &[Perm]) -> Result<BigUint> {
        for g in gens {
            if !self.contains(g) {
                return Err(Error::NotInGroup);
            }
        }
        let sub = PermGroup::new(self.degree, gens.to_vec())?;
        Ok(self.order() / sub.order())
    }

    pub fn orbit(&self, x: u32) -> Vec<u32> {
        let mut seen = HashSet::from([x]);
        let mut out = vec![x];
        let mut k = 0;
        while k < out.len() {
            let y = out[k];
            k += 1;
            for g in &self.gens {
                let z = g.image(y);
                if seen.insert(z) {
                    out.push(z);
                }
            }
        }
        out
    }

    /// All orbits, each sorted, ordered by smallest point.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for x in 0..self.degree as u32 {
            if seen[x as usize] {
                continue;
            }
            let mut o = self.orbit(x);
            o.sort_unstable();
            for &y in &o {
                seen[y as usize] = true;
            }
            out.push(o);
        }
        out
    }

    /// The normal closure of `gens` under `self`.
    pub fn normal_closure(&self, gens: &[Perm]) -> PermGroup {
        let mut n = PermGroup::trivial(self.degree);
        let mut queue: VecDeque<Perm> = gens.iter().cloned().collect();
        while let Some(p) = queue.pop_front() {
            if n.contains(&p) {
                continue;
            }
            n = n.with_generator(p.clone());
            for g in &self.gens {
                queue.push_back(p.conj(g));
            }
        }
        n
    }

    /// Number of index-2 subgroups: `2^r - 1` where `2^r` is the index of
    /// the normal closure of all squares and commutators of generators.
    pub fn index2_count(&self) -> BigUint {
        let mut rel = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            rel.push(g.mul(g));
            for h in &self.gens[i + 1..] {
                rel.push(g.commutator(h));
            }
        }
        let n = self.normal_closure(&rel);
        let index = self.order() / n.order();
        index - BigUint::one()
    }

    /// All elements, sorted by image table. Fails above `cap`.
    pub fn elements(&self, cap: usize) -> Result<Vec<Perm>> {
        let order = self.order_usize().filter(|&o| o <= cap).ok_or(Error::OrderCap(cap))?;
        let mut out = vec![Perm::identity(self.degree)];
        for level in self.chain().levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for x in &level.orbit {
                let t = level.trans[*x as usize].as_ref().unwrap();
                for e in &out {
                    next.push(e.mul(t));
                }
            }
            out = next;
        }
        debug_assert_eq!(out.len(), order);
        out.sort();
        Ok(out)
    }
}

/// Lazily built level quotients, shared by clones of a [`GroupDef`].
#[derive(Default)]
pub(crate) struct QuotientCache {
    levels: Mutex<HashMap<usize, Arc<PermGroup>>>,
}

impl GroupDef {
    /// The permutation of level `n` induced by `w`.
    pub fn level_image(&self, w: &Word, n: usize) -> Perm {
        Perm(self.level_perm(w, n))
    }

    /// `Ḡ_n`, generated by the level-`n` images of the generators.
    pub fn quotient(&self, n: usize) -> Arc<PermGroup> {
        if let Some(q) = self.quotient_cache().levels.lock().unwrap().get(&n) {
            return q.clone();
        }
        let d = self.degree();
        let width = crate::tree::pow_usize(d, n);
        let gens = self.generators().iter().map(|g| self.level_image(g, n)).collect();
        let q = Arc::new(PermGroup::new(width, gens).expect("level images have the level size"));
        q.order();
        self.quotient_cache()
            .levels
            .lock()
            .unwrap()
            .entry(n)
            .or_insert(q)
            .clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cycles: &[&[u32]], n: usize) -> Perm {
        Perm::from_cycles(n, &cycles.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn closure_order(g: &PermGroup) -> usize {
        let mut seen = HashSet::from([Perm::identity(g.degree())]);
        let mut queue = vec![Perm::identity(g.degree())];
        while let Some(x) = queue.pop() {
            for s in g.gens() {
                let y = x.mul(s);
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn perm_basics() {
        let a = p(&[&[0, 1, 2]], 4);
        let b = p(&[&[0, 1]], 4);
        assert_eq!(a.image(0), 1);
        assert_eq!(a.mul(&b).image(0), 0);
        assert_eq!(a.order(), 3);
        assert!(a.mul(&a.inverse()).is_identity());
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert_eq!(format!("{:?}", a), "(0 1 2)");
    }

    #[test]
    fn symmetric_groups() {
        for n in 2..7 {
            let g = PermGroup::new(n, vec![p(&[&[0, 1]], n), Perm((1..n as u32).chain([0]).collect())]).unwrap();
            let fact: usize = (1..=n).product();
            assert_eq!(g.order_usize(), Some(fact));
            assert_eq!(closure_order(&g), fact);
        }
    }

    #[test]
    fn membership_agrees_with_enumeration() {
        let n = 6;
        let g = PermGroup::new(n, vec![p(&[&[0, 1, 2]], n), p(&[&[2, 3, 4]], n)]).unwrap();
        let elems: HashSet<Perm> = g.elements(1000).unwrap().into_iter().collect();
        assert_eq!(elems.len(), 60);
        let all = PermGroup::new(n, vec![p(&[&[0, 1]], n), Perm((1..n as u32).chain([0]).collect())]).unwrap();
        for x in all.elements(1000).unwrap() {
            assert_eq!(g.contains(&x), elems.contains(&x));
        }
    }

    #[test]
    fn index2_small() {
        assert_eq!(PermGroup::trivial(3).index2_count(), BigUint::from(0u32));
        let klein = PermGroup::new(4, vec![p(&[&[0, 1], &[2, 3]], 4), p(&[&[0, 2], &[1, 3]], 4)]).unwrap();
        assert_eq!(klein.index2_count(), BigUint::from(3u32));
        let s4 = PermGroup::new(4, vec![p(&[&[0, 1]], 4), p(&[&[0, 1, 2, 3]], 4)]).unwrap();
        assert_eq!(s4.index2_count(), BigUint::from(1u32));
    }

    #[test]
    fn grigorchuk_quotients() {
        let g = GroupDef::grigorchuk();
        let orders: Vec<usize> = (1..=3).map(|n| g.quotient(n).order_usize().unwrap()).collect();
        assert_eq!(orders, vec![2, 8, 128]);
        for n in 1..=3 {
            assert_eq!(closure_order(&g.quotient(n)), orders[n - 1]);
        }
        assert_eq!(g.quotient(3).index2_count(), BigUint::from(7u32));
        assert_eq!(g.quotient(4).index2_count(), BigUint::from(7u32));
        assert_eq!(g.level_image(&g.parse_word("a").unwrap(), 1), p(&[&[0, 1]], 2));
        assert!(g.level_image(&g.parse_word("d").unwrap(), 2).is_identity());
    }

    #[test]
    fn grigorchuk_deeper_orders() {
        let g = GroupDef::grigorchuk();
        // |Ḡ_n| = 2^(5·2^(n-3)+2) for n >= 3
        for n in 4..=6 {
            let expected = BigUint::from(2u32).pow(5 * (1 << (n - 3)) + 2);
            assert_eq!(g.quotient(n).order(), expected);
        }
    }
}
