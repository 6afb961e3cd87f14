//! Subdirect products of finite permutation groups: fibre products,
//! Goursat decompositions, pair classification and exhaustive
//! enumeration used as an oracle.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::permgrp::{Perm, PermGroup};

/// Default cap on the number of elements enumerated.
pub const DEFAULT_CAP: usize = 1 << 16;

/// A homomorphism of finite permutation groups given on generators.
/// Construction checks well-definedness on every element.
#[derive(Clone, Debug)]
pub struct FiniteHom {
    domain: PermGroup,
    codomain: PermGroup,
    images: Vec<Perm>,
    table: HashMap<Perm, Perm>,
}

impl FiniteHom {
    pub fn new(domain: PermGroup, codomain: PermGroup, images: Vec<Perm>, cap: usize) -> Result<FiniteHom> {
        if images.len() != domain.gens().len() {
            return Err(Error::Hom(format!(
                "{} images for {} generators",
                images.len(),
                domain.gens().len()
            )));
        }
        if let Some(p) = images.iter().find(|p| !codomain.contains(p)) {
            return Err(Error::Hom(format!("image {p:?} is not in the codomain")));
        }
        domain.order_usize().filter(|&o| o <= cap).ok_or(Error::OrderCap(cap))?;
        // walk the Cayley graph; a second path to an element must agree
        let mut table = HashMap::new();
        let id = Perm::identity(domain.degree());
        table.insert(id.clone(), Perm::identity(codomain.degree()));
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            let fx = table[&x].clone();
            for (s, fs) in domain.gens().iter().zip(&images) {
                let y = x.mul(s);
                let fy = fx.mul(fs);
                match table.get(&y) {
                    Some(prev) if *prev != fy => {
                        return Err(Error::Hom("generator images do not define a homomorphism".into()))
                    }
                    Some(_) => {}
                    None => {
                        table.insert(y.clone(), fy);
                        queue.push(y);
                    }
                }
            }
        }
        Ok(FiniteHom {
            domain,
            codomain,
            images,
            table,
        })
    }

    pub fn domain(&self) -> &PermGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &PermGroup {
        &self.codomain
    }

    pub fn images(&self) -> &[Perm] {
        &self.images
    }

    pub fn apply(&self, x: &Perm) -> Option<&Perm> {
        self.table.get(x)
    }

    pub fn is_surjective(&self) -> bool {
        let img = PermGroup::new(self.codomain.degree(), self.images.clone()).expect("same degree");
        img.order() == self.codomain.order()
    }

    pub fn kernel(&self) -> Vec<Perm> {
        let mut k: Vec<Perm> = self
            .table
            .iter()
            .filter(|(_, v)| v.is_identity())
            .map(|(k, _)| k.clone())
            .collect();
        k.sort();
        k
    }
}

/// A subgroup of `G_1 × .. × G_n`, given by generator tuples.
#[derive(Clone, Debug)]
pub struct ProductSubgroup {
    factors: Vec<PermGroup>,
    gens: Vec<Vec<Perm>>,
}

pub type Tuple = Vec<Perm>;

impl ProductSubgroup {
    pub fn new(factors: Vec<PermGroup>, gens: Vec<Tuple>) -> Result<ProductSubgroup> {
        for t in &gens {
            if t.len() != factors.len() {
                return Err(Error::InvalidParameters(
                    "tuple length differs from factor count".into(),
                ));
            }
            for (x, f) in t.iter().zip(&factors) {
                if !f.contains(x) {
                    return Err(Error::NotInGroup);
                }
            }
        }
        Ok(ProductSubgroup { factors, gens })
    }

    /// The full direct product.
    pub fn full(factors: Vec<PermGroup>) -> ProductSubgroup {
        let mut gens = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            for g in f.gens() {
                let mut t: Tuple = factors.iter().map(|f| Perm::identity(f.degree())).collect();
                t[i] = g.clone();
                gens.push(t);
            }
        }
        ProductSubgroup { factors, gens }
    }

    /// `{(g, g)}` inside `G × G`.
    pub fn diagonal(g: &PermGroup) -> ProductSubgroup {
        let gens = g.gens().iter().map(|x| vec![x.clone(), x.clone()]).collect();
        ProductSubgroup {
            factors: vec![g.clone(), g.clone()],
            gens,
        }
    }

    pub fn factors(&self) -> &[PermGroup] {
        &self.factors
    }

    pub fn gens(&self) -> &[Tuple] {
        &self.gens
    }

    fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut acc = 0;
        for f in &self.factors {
            out.push(acc);
            acc += f.degree();
        }
        out
    }

    fn embed(&self, t: &[Perm]) -> Perm {
        let mut img = Vec::new();
        for (x, off) in t.iter().zip(self.offsets()) {
            img.extend(x.images().iter().map(|&y| y + off as u32));
        }
        Perm::from_images(img).expect("block permutation")
    }

    fn split(&self, p: &Perm) -> Tuple {
        self.factors
            .iter()
            .zip(self.offsets())
            .map(|(f, off)| {
                let img = p.images()[off..off + f.degree()]
                    .iter()
                    .map(|&y| y - off as u32)
                    .collect();
                Perm::from_images(img).expect("block permutation")
            })
            .collect()
    }

    /// The subgroup as one permutation group on the disjoint union.
    pub fn as_perm_group(&self) -> PermGroup {
        let degree = self.factors.iter().map(PermGroup::degree).sum();
        PermGroup::new(degree, self.gens.iter().map(|t| self.embed(t)).collect()).expect("consistent degree")
    }

    pub fn order(&self) -> usize {
        self.as_perm_group().order_usize().expect("finite order fits")
    }

    pub fn contains(&self, t: &[Perm]) -> bool {
        t.len() == self.factors.len() && self.as_perm_group().contains(&self.embed(t))
    }

    pub fn elements(&self, cap: usize) -> Result<Vec<Tuple>> {
        Ok(self
            .as_perm_group()
            .elements(cap)?
            .iter()
            .map(|p| self.split(p))
            .collect())
    }

    /// Projection onto the coordinates `idx`.
    pub fn projection(&self, idx: &[usize]) -> ProductSubgroup {
        let factors = idx.iter().map(|&i| self.factors[i].clone()).collect();
        let gens = self
            .gens
            .iter()
            .map(|t| idx.iter().map(|&i| t[i].clone()).collect())
            .collect();
        ProductSubgroup { factors, gens }
    }

    /// Image in factor `i` as a permutation group.
    pub fn component(&self, i: usize) -> PermGroup {
        PermGroup::new(
            self.factors[i].degree(),
            self.gens.iter().map(|t| t[i].clone()).collect(),
        )
        .unwrap()
    }

    pub fn is_subdirect(&self) -> bool {
        (0..self.factors.len()).all(|i| self.component(i).order() == self.factors[i].order())
    }

    /// Order of `H ∩ (1 × .. × G_i × .. × 1)`.
    pub fn coordinate_kernel_order(&self, i: usize, cap: usize) -> Result<usize> {
        Ok(self
            .elements(cap)?
            .iter()
            .filter(|t| t.iter().enumerate().all(|(j, x)| j == i || x.is_identity()))
            .count())
    }

    /// Same element set.
    pub fn same_as(&self, other: &ProductSubgroup) -> bool {
        self.factors.len() == other.factors.len()
            && self.order() == other.order()
            && other.gens.iter().all(|t| self.contains(t))
    }

    /// Builds a subgroup from an element list, choosing generators greedily
    /// in the given order.
    fn from_elements(factors: Vec<PermGroup>, elems: &[Tuple]) -> ProductSubgroup {
        let mut out = ProductSubgroup {
            factors,
            gens: Vec::new(),
        };
        let degree = out.factors.iter().map(PermGroup::degree).sum();
        let mut grp = PermGroup::trivial(degree);
        let target = elems.len();
        for t in elems {
            if grp.order_usize() == Some(target) {
                break;
            }
            let p = out.embed(t);
            if !grp.contains(&p) {
                grp = grp.with_generator(p);
                out.gens.push(t.clone());
            }
        }
        out
    }
}

/// `{(g_1, g_2) : f_1(g_1) = f_2(g_2)}`, by brute force.
pub fn fibre_product(f1: &FiniteHom, f2: &FiniteHom, cap: usize) -> Result<ProductSubgroup> {
    let (q1, q2) = (f1.codomain(), f2.codomain());
    let same = q1.degree() == q2.degree()
        && q1.gens().iter().all(|x| q2.contains(x))
        && q2.gens().iter().all(|x| q1.contains(x));
    if !same {
        return Err(Error::Hom("codomains differ".into()));
    }
    if !f1.is_surjective() || !f2.is_surjective() {
        return Err(Error::Hom("maps must be surjective".into()));
    }
    let e1 = f1.domain().elements(cap)?;
    let e2 = f2.domain().elements(cap)?;
    if e1.len().saturating_mul(e2.len()) > cap {
        return Err(Error::OrderCap(cap));
    }
    let mut by_image: BTreeMap<Perm, Vec<&Perm>> = BTreeMap::new();
    for y in &e2 {
        by_image.entry(f2.apply(y).unwrap().clone()).or_default().push(y);
    }
    let mut elems = Vec::new();
    for x in &e1 {
        if let Some(ys) = by_image.get(f1.apply(x).unwrap()) {
            for y in ys {
                elems.push(vec![x.clone(), (*y).clone()]);
            }
        }
    }
    Ok(ProductSubgroup::from_elements(
        vec![f1.domain().clone(), f2.domain().clone()],
        &elems,
    ))
}

/// `Q = G_1 / N_1` as a permutation group with both quotient maps.
#[derive(Clone, Debug)]
pub struct Goursat {
    pub quotient: PermGroup,
    pub f1: FiniteHom,
    pub f2: FiniteHom,
    pub kernel1_order: usize,
    pub kernel2_order: usize,
}

/// Right-coset action of `g` on the cosets of `n`.
fn coset_action(g: &PermGroup, n: &[Perm], cap: usize) -> Result<(PermGroup, Vec<Perm>)> {
    let elems = g.elements(cap)?;
    let mut coset_of: HashMap<Perm, u32> = HashMap::new();
    let mut reps: Vec<Perm> = Vec::new();
    for x in &elems {
        if coset_of.contains_key(x) {
            continue;
        }
        let id = reps.len() as u32;
        for k in n {
            coset_of.insert(k.mul(x), id);
        }
        reps.push(x.clone());
    }
    let act = |s: &Perm| -> Perm {
        Perm::from_images(reps.iter().map(|r| coset_of[&r.mul(s)]).collect()).expect("coset action")
    };
    let images: Vec<Perm> = g.gens().iter().map(act).collect();
    let q = PermGroup::new(reps.len(), images.clone())?;
    Ok((q, images))
}

pub fn goursat_decompose(h: &ProductSubgroup, cap: usize) -> Result<Goursat> {
    if h.factors().len() != 2 || !h.is_subdirect() {
        return Err(Error::NotSubdirect);
    }
    let elems = h.elements(cap)?;
    let n1: Vec<Perm> = elems
        .iter()
        .filter(|t| t[1].is_identity())
        .map(|t| t[0].clone())
        .collect();
    let n2_order = elems.iter().filter(|t| t[0].is_identity()).count();
    let g1 = h.factors()[0].clone();
    let g2 = h.factors()[1].clone();
    let (q, images1) = coset_action(&g1, &n1, cap)?;
    let f1 = FiniteHom::new(g1, q.clone(), images1, cap)?;
    // f2(g2) = f1(g1) for any (g1, g2) in H
    let mut f2_table: HashMap<Perm, Perm> = HashMap::new();
    for t in &elems {
        f2_table
            .entry(t[1].clone())
            .or_insert_with(|| f1.apply(&t[0]).unwrap().clone());
    }
    let images2 = g2.gens().iter().map(|s| f2_table[s].clone()).collect();
    let f2 = FiniteHom::new(g2, q.clone(), images2, cap)?;
    Ok(Goursat {
        quotient: q,
        f1,
        f2,
        kernel1_order: n1.len(),
        kernel2_order: n2_order,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum PairClass {
    /// The pair projection is the graph of an isomorphism.
    Graph { order: usize },
    /// The pair projection is the full product of the two projections.
    Full { order: usize },
    Mixed {
        pair_order: usize,
        left_order: usize,
        right_order: usize,
    },
}

pub fn classify_pair(h: &ProductSubgroup, i: usize, j: usize) -> PairClass {
    let hij = h.projection(&[i, j]).order();
    let hi = h.component(i).order_usize().unwrap();
    let hj = h.component(j).order_usize().unwrap();
    if hij == hi && hij == hj {
        PairClass::Graph { order: hij }
    } else if hij == hi * hj {
        PairClass::Full { order: hij }
    } else {
        PairClass::Mixed {
            pair_order: hij,
            left_order: hi,
            right_order: hj,
        }
    }
}

/// `{(g_1, .., g_n) ∈ (Z/p)^n : Σ g_i = 0}`.
pub fn sum_zero(p: usize, n: usize) -> Result<ProductSubgroup> {
    if p < 2 || !(2..p).take_while(|k| k * k <= p).all(|k| !p.is_multiple_of(k)) || n < 2 {
        return Err(Error::InvalidParameters(format!(
            "need a prime p and n >= 2, got p={p}, n={n}"
        )));
    }
    let z = small::cyclic(p);
    let shift = z.gens()[0].clone();
    let id = Perm::identity(p);
    let gens = (1..n)
        .map(|k| {
            let mut t = vec![id.clone(); n];
            t[0] = shift.clone();
            t[k] = shift.inverse();
            t
        })
        .collect();
    ProductSubgroup::new(vec![z; n], gens)
}

/// Element table of a small group for exhaustive subgroup work.
struct Table {
    elems: Vec<Perm>,
    mul: Vec<u32>,
    n: usize,
}

impl Table {
    fn new(g: &PermGroup, cap: usize) -> Result<Table> {
        let elems = g.elements(cap)?;
        let n = elems.len();
        let index: HashMap<&Perm, u32> = elems.iter().enumerate().map(|(i, p)| (p, i as u32)).collect();
        let mut mul = vec![0u32; n * n];
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                mul[i * n + j] = index[&x.mul(y)];
            }
        }
        Ok(Table { elems, mul, n })
    }

    fn m(&self, i: u32, j: u32) -> u32 {
        self.mul[i as usize * self.n + j as usize]
    }

    fn identity(&self) -> u32 {
        self.elems.iter().position(Perm::is_identity).unwrap() as u32
    }
}

#[derive(Clone)]
struct Sub {
    bits: Vec<u64>,
    elems: Vec<u32>,
    gens: Vec<u32>,
}

fn has(bits: &[u64], i: u32) -> bool {
    bits[i as usize / 64] >> (i % 64) & 1 == 1
}

fn set(bits: &mut [u64], i: u32) {
    bits[i as usize / 64] |= 1 << (i % 64);
}

/// `⟨S, x⟩` by adjoining whole right cosets of `S`.
fn join(t: &Table, s: &Sub, x: u32) -> Sub {
    let mut out = s.clone();
    out.gens.push(x);
    let mut reps = vec![t.identity()];
    let mut k = 0;
    while k < reps.len() {
        let r = reps[k];
        k += 1;
        for &g in &out.gens.clone() {
            let y = t.m(r, g);
            if has(&out.bits, y) {
                continue;
            }
            for &e in &s.elems {
                let z = t.m(e, y);
                set(&mut out.bits, z);
                out.elems.push(z);
            }
            reps.push(y);
        }
    }
    out
}

fn all_subgroups_of(t: &Table) -> Vec<Sub> {
    let words = t.n.div_ceil(64);
    let e = t.identity();
    let mut trivial = Sub {
        bits: vec![0; words],
        elems: vec![e],
        gens: Vec::new(),
    };
    set(&mut trivial.bits, e);
    // every subgroup is a join of cyclic subgroups of prime-power order
    let mut cyclic: Vec<u32> = Vec::new();
    let mut cyc_seen: HashSet<Vec<u64>> = HashSet::new();
    for x in 0..t.n as u32 {
        let ord = t.elems[x as usize].order();
        if ord == 1 || !is_prime_power(ord) {
            continue;
        }
        let c = join(t, &trivial, x);
        if cyc_seen.insert(c.bits.clone()) {
            cyclic.push(x);
        }
    }
    let mut seen: HashSet<Vec<u64>> = HashSet::from([trivial.bits.clone()]);
    let mut out = vec![trivial];
    let mut k = 0;
    while k < out.len() {
        let s = out[k].clone();
        k += 1;
        for &x in &cyclic {
            if has(&s.bits, x) {
                continue;
            }
            let r = join(t, &s, x);
            if seen.insert(r.bits.clone()) {
                out.push(r);
            }
        }
    }
    out
}

fn is_prime_power(n: usize) -> bool {
    let p = (2..=n).find(|k| n.is_multiple_of(*k)).unwrap();
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// All subgroups of `g`, as sorted element lists, ordered by size and then
/// lexicographically.
pub fn all_subgroups(g: &PermGroup, cap: usize) -> Result<Vec<Vec<Perm>>> {
    let t = Table::new(g, cap)?;
    let mut out: Vec<Vec<Perm>> = all_subgroups_of(&t)
        .into_iter()
        .map(|s| {
            let mut e: Vec<Perm> = s.elems.iter().map(|&i| t.elems[i as usize].clone()).collect();
            e.sort();
            e
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Every subgroup of `G_1 × G_2` projecting onto both factors, by
/// exhaustive enumeration.
pub fn brute_subdirect(g1: &PermGroup, g2: &PermGroup, cap: usize) -> Result<Vec<ProductSubgroup>> {
    let o1 = g1.order_usize().ok_or(Error::OrderCap(cap))?;
    let o2 = g2.order_usize().ok_or(Error::OrderCap(cap))?;
    if o1.saturating_mul(o2) > cap {
        return Err(Error::OrderCap(cap));
    }
    let full = ProductSubgroup::full(vec![g1.clone(), g2.clone()]);
    let big = full.as_perm_group();
    let mut out = Vec::new();
    for elems in all_subgroups(&big, cap)? {
        let tuples: Vec<Tuple> = elems.iter().map(|p| full.split(p)).collect();
        let first: HashSet<&Perm> = tuples.iter().map(|t| &t[0]).collect();
        let second: HashSet<&Perm> = tuples.iter().map(|t| &t[1]).collect();
        if first.len() == o1 && second.len() == o2 {
            out.push(ProductSubgroup::from_elements(vec![g1.clone(), g2.clone()], &tuples));
        }
    }
    Ok(out)
}

/// Normal subgroups as sorted element lists.
pub fn normal_subgroups(g: &PermGroup, cap: usize) -> Result<Vec<Vec<Perm>>> {
    let subs = all_subgroups(g, cap)?;
    Ok(subs
        .into_iter()
        .filter(|n| {
            let set: HashSet<&Perm> = n.iter().collect();
            g.gens().iter().all(|s| n.iter().all(|x| set.contains(&x.conj(s))))
        })
        .collect())
}

/// Number of isomorphisms between two small groups, by trying all
/// generator images.
pub fn count_isomorphisms(a: &PermGroup, b: &PermGroup, cap: usize) -> Result<usize> {
    if a.order() != b.order() {
        return Ok(0);
    }
    let gens: Vec<Perm> = small_generating_set(a, cap)?;
    let targets = b.elements(cap)?;
    let orders: Vec<usize> = gens.iter().map(Perm::order).collect();
    let candidates: Vec<Vec<&Perm>> = orders
        .iter()
        .map(|&o| targets.iter().filter(|y| y.order() == o).collect())
        .collect();
    let domain = PermGroup::new(a.degree(), gens.clone())?;
    let mut count = 0;
    let mut choice = vec![0usize; gens.len()];
    if candidates.iter().any(Vec::is_empty) {
        return Ok(0);
    }
    'outer: loop {
        let images: Vec<Perm> = choice.iter().zip(&candidates).map(|(&c, cs)| cs[c].clone()).collect();
        if PermGroup::new(b.degree(), images.clone())?.order() == b.order()
            && FiniteHom::new(domain.clone(), b.clone(), images, cap).is_ok()
        {
            count += 1;
        }
        for k in 0..choice.len() {
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                continue 'outer;
            }
            choice[k] = 0;
        }
        break;
    }
    Ok(count)
}

fn small_generating_set(g: &PermGroup, cap: usize) -> Result<Vec<Perm>> {
    let target = g.order();
    let mut grp = PermGroup::trivial(g.degree());
    let mut gens = Vec::new();
    let mut elems = g.elements(cap)?;
    // high-order elements first keeps the set short
    elems.sort_by(|x, y| y.order().cmp(&x.order()).then_with(|| x.cmp(y)));
    for x in elems {
        if grp.order() == target {
            break;
        }
        if !grp.contains(&x) {
            grp = grp.with_generator(x.clone());
            gens.push(x);
        }
    }
    Ok(gens)
}

/// Number of subdirect subgroups of `G_1 × G_2` from Goursat's lemma:
/// pairs of normal subgroups with isomorphic quotients, weighted by the
/// number of isomorphisms between the quotients.
pub fn goursat_count(g1: &PermGroup, g2: &PermGroup, cap: usize) -> Result<usize> {
    let mut quotients2 = Vec::new();
    for n in normal_subgroups(g2, cap)? {
        quotients2.push(coset_action(g2, &n, cap)?.0);
    }
    let mut total = 0;
    for n in normal_subgroups(g1, cap)? {
        let q1 = coset_action(g1, &n, cap)?.0;
        for q2 in &quotients2 {
            total += count_isomorphisms(&q1, q2, cap)?;
        }
    }
    Ok(total)
}

/// Small groups as permutation groups.
pub mod small {
    use super::*;

    fn perm(n: usize, cycles: &[&[u32]]) -> Perm {
        Perm::from_cycles(n, &cycles.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    pub fn trivial() -> PermGroup {
        PermGroup::trivial(1)
    }

    pub fn cyclic(n: usize) -> PermGroup {
        let cycle: Vec<u32> = (0..n as u32).collect();
        if n == 1 {
            return trivial();
        }
        PermGroup::new(n, vec![perm(n, &[&cycle])]).unwrap()
    }

    /// Dihedral group of order `2n` acting on an `n`-gon.
    pub fn dihedral(n: usize) -> PermGroup {
        let rot: Vec<u32> = (0..n as u32).collect();
        let refl = Perm::from_images((0..n as u32).map(|i| (n as u32 - i) % n as u32).collect()).unwrap();
        PermGroup::new(n, vec![perm(n, &[&rot]), refl]).unwrap()
    }

    pub fn symmetric(n: usize) -> PermGroup {
        if n < 2 {
            return trivial();
        }
        let rot: Vec<u32> = (0..n as u32).collect();
        PermGroup::new(n, vec![perm(n, &[&[0, 1]]), perm(n, &[&rot])]).unwrap()
    }

    pub fn alternating(n: usize) -> PermGroup {
        let gens = (2..n as u32).map(|k| perm(n, &[&[0, 1, k]])).collect();
        PermGroup::new(n, gens).unwrap()
    }

    pub fn klein() -> PermGroup {
        PermGroup::new(4, vec![perm(4, &[&[0, 1], &[2, 3]]), perm(4, &[&[0, 2], &[1, 3]])]).unwrap()
    }

    /// Quaternion group in its regular representation.
    pub fn quaternion() -> PermGroup {
        let i = perm(8, &[&[0, 2, 1, 3], &[4, 6, 5, 7]]);
        let j = perm(8, &[&[0, 4, 1, 5], &[2, 7, 3, 6]]);
        PermGroup::new(8, vec![i, j]).unwrap()
    }

    /// Direct product of two groups on the disjoint union.
    pub fn product(a: &PermGroup, b: &PermGroup) -> PermGroup {
        ProductSubgroup::full(vec![a.clone(), b.clone()]).as_perm_group()
    }

    /// Groups by name: `1`, `C<n>`, `D<n>` (order `2n`), `S<n>`, `A<n>`,
    /// `V4`, `Q8`, or a product `X x Y`.
    pub fn by_name(name: &str) -> Result<PermGroup> {
        let name = name.trim();
        if let Some((a, b)) = name.split_once(['x', '×']) {
            return Ok(product(&by_name(a)?, &by_name(b)?));
        }
        let bad = || Error::InvalidParameters(format!("unknown group `{name}`"));
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
        match name {
            "1" => Ok(trivial()),
            "V4" => Ok(klein()),
            "Q8" => Ok(quaternion()),
            _ if name.starts_with('C') => Ok(cyclic(num(&name[1..])?.max(1))),
            _ if name.starts_with('D') => {
                let n = num(&name[1..])?;
                if n < 3 {
                    return Err(bad());
                }
                Ok(dihedral(n))
            }
            _ if name.starts_with('S') => Ok(symmetric(num(&name[1..])?)),
            _ if name.starts_with('A') => {
                let n = num(&name[1..])?;
                if n < 3 {
                    return Err(bad());
                }
                Ok(alternating(n))
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::small::*;
    use super::*;

    const CAP: usize = DEFAULT_CAP;

    #[test]
    fn small_orders() {
        assert_eq!(cyclic(5).order_usize(), Some(5));
        assert_eq!(dihedral(4).order_usize(), Some(8));
        assert_eq!(symmetric(4).order_usize(), Some(24));
        assert_eq!(alternating(4).order_usize(), Some(12));
        assert_eq!(quaternion().order_usize(), Some(8));
        assert_eq!(by_name("S3 x C2").unwrap().order_usize(), Some(12));
    }

    #[test]
    fn subgroup_counts() {
        let counts: Vec<usize> = [symmetric(3), symmetric(4), dihedral(4), quaternion(), alternating(4)]
            .iter()
            .map(|g| all_subgroups(g, CAP).unwrap().len())
            .collect();
        assert_eq!(counts, vec![6, 30, 10, 6, 10]);
    }

    #[test]
    fn homomorphism_checks() {
        let s3 = symmetric(3);
        let z2 = cyclic(2);
        let sign = FiniteHom::new(
            s3.clone(),
            z2.clone(),
            vec![z2.gens()[0].clone(), Perm::identity(2)],
            CAP,
        )
        .unwrap();
        assert!(sign.is_surjective());
        assert_eq!(sign.kernel().len(), 3);
        // the 3-cycle cannot map to an involution
        assert!(FiniteHom::new(s3, z2.clone(), vec![Perm::identity(2), z2.gens()[0].clone()], CAP).is_err());
    }

    #[test]
    fn fibre_products() {
        let z2 = cyclic(2);
        let id = FiniteHom::new(z2.clone(), z2.clone(), z2.gens().to_vec(), CAP).unwrap();
        let p = fibre_product(&id, &id, CAP).unwrap();
        assert_eq!(p.order(), 2);
        let one = trivial();
        let g = symmetric(3);
        let t = FiniteHom::new(g.clone(), one.clone(), vec![Perm::identity(1); 2], CAP).unwrap();
        assert_eq!(fibre_product(&t, &t, CAP).unwrap().order(), 36);
    }

    #[test]
    fn goursat_examples() {
        let g = symmetric(3);
        let full = ProductSubgroup::full(vec![g.clone(), g.clone()]);
        assert_eq!(goursat_decompose(&full, CAP).unwrap().quotient.order_usize(), Some(1));
        let diag = ProductSubgroup::diagonal(&g);
        assert_eq!(goursat_decompose(&diag, CAP).unwrap().quotient.order_usize(), Some(6));
        assert_eq!(classify_pair(&diag, 0, 1), PairClass::Graph { order: 6 });
        assert_eq!(classify_pair(&full, 0, 1), PairClass::Full { order: 36 });
    }

    #[test]
    fn subdirect_counts() {
        let z2 = cyclic(2);
        let z3 = cyclic(3);
        let s3 = symmetric(3);
        assert_eq!(brute_subdirect(&z2, &z2, CAP).unwrap().len(), 2);
        assert_eq!(brute_subdirect(&z2, &z3, CAP).unwrap().len(), 1);
        assert_eq!(brute_subdirect(&s3, &s3, CAP).unwrap().len(), 8);
        assert_eq!(goursat_count(&s3, &s3, CAP).unwrap(), 8);
    }

    #[test]
    fn sum_zero_examples() {
        let h = sum_zero(2, 2).unwrap();
        assert_eq!(classify_pair(&h, 0, 1), PairClass::Graph { order: 2 });
        let h = sum_zero(5, 3).unwrap();
        assert_eq!(h.order(), 25);
        assert_eq!(classify_pair(&h, 0, 1), PairClass::Full { order: 25 });
        assert_eq!(h.coordinate_kernel_order(0, CAP).unwrap(), 1);
        assert_eq!(sum_zero(2, 3).unwrap().order(), 4);
        assert!(sum_zero(4, 3).is_err());
    }
}
