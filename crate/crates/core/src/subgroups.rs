//! Finitely generated subgroups of a self-similar group.
//!
//! Generators are [`Portrait`]s, so words and elements assembled at
//! orthogonal vertices are handled uniformly. Stabilizers come with
//! Schreier generators; membership is decided negatively in level
//! quotients and positively by an explicit product witness.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::permgrp::{Perm, PermGroup};
use crate::tree::{is_orthogonal_set, pow_usize, Vertex};
use crate::wreath::{GroupDef, Portrait, Tri, Word};

/// Search and certification limits. Every bounded procedure takes these
/// explicitly so results are reproducible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    /// Size cap of the section closure in the word problem.
    pub closure_cap: usize,
    /// Deepest transversal vertex the descent may create.
    pub max_depth: usize,
    /// Longest membership witness searched for, in subgroup generators.
    pub max_search_len: usize,
    /// Deepest level quotient consulted.
    pub max_level: usize,
    /// Number of distinct elements kept in a membership search ball.
    pub max_ball: usize,
    /// Largest coset or orbit enumeration.
    pub max_cosets: usize,
    /// Levels checked when testing dependence of two sections.
    pub dependence_depth: usize,
    /// Longest product of stabilizer generators tried as an independence witness.
    pub witness_len: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            closure_cap: 100_000,
            max_depth: 4,
            max_search_len: 8,
            max_level: 6,
            max_ball: 20_000,
            max_cosets: 4096,
            dependence_depth: 4,
            witness_len: 2,
        }
    }
}

pub(crate) fn ser_big<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x.to_u64() {
        Some(v) => s.serialize_u64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

pub(crate) fn ser_big_vec<S: Serializer>(xs: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Wrap<'a>(#[serde(serialize_with = "ser_big")] &'a BigUint);
    s.collect_seq(xs.iter().map(Wrap))
}

/// A word in the generators of a subgroup: `(generator index, inverted)`.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct HWord(pub Vec<(usize, bool)>);

impl HWord {
    pub fn empty() -> HWord {
        HWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> HWord {
        HWord(self.0.iter().rev().map(|&(i, b)| (i, !b)).collect())
    }

    /// Concatenation with free cancellation.
    pub fn concat(&self, other: &HWord) -> HWord {
        let mut out = self.0.clone();
        for &(i, b) in &other.0 {
            if out.last() == Some(&(i, !b)) {
                out.pop();
            } else {
                out.push((i, b));
            }
        }
        HWord(out)
    }
}

impl fmt::Display for HWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(i, b)| {
                if b {
                    format!("h{}^-1", i + 1)
                } else {
                    format!("h{}", i + 1)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for HWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A subgroup given by finitely many generators.
#[derive(Clone, Debug)]
pub struct FgSubgroup {
    group: GroupDef,
    gens: Vec<Portrait>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    Yes { witness: HWord },
    No { level: usize },
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FiniteIndexVerdict {
    Certified {
        #[serde(serialize_with = "ser_big")]
        index: BigUint,
        level: usize,
    },
    Unknown {
        /// `[Ḡ_n : H̄_n]` for `n = 0, 1, ..`.
        #[serde(serialize_with = "ser_big_vec")]
        quotient_indices: Vec<BigUint>,
    },
}

impl FiniteIndexVerdict {
    pub fn index(&self) -> Option<&BigUint> {
        match self {
            FiniteIndexVerdict::Certified { index, .. } => Some(index),
            FiniteIndexVerdict::Unknown { .. } => None,
        }
    }
}

fn hash_sig(p: &[u32]) -> u64 {
    let mut h = DefaultHasher::new();
    p.hash(&mut h);
    h.finish()
}

/// Level used for element fingerprints: the deepest with at most 1024 vertices.
fn sig_level(degree: usize) -> usize {
    let mut n = 0;
    while pow_usize(degree, n + 1) <= 1024 {
        n += 1;
    }
    n
}

fn compose(p: &[u32], q: &[u32]) -> Vec<u32> {
    p.iter().map(|&x| q[x as usize]).collect()
}

impl FgSubgroup {
    pub fn new(group: &GroupDef, gens: Vec<Portrait>) -> Result<FgSubgroup> {
        if let Some(p) = gens.iter().find(|p| p.degree() != group.degree()) {
            return Err(Error::DegreeMismatch(p.degree(), group.degree()));
        }
        Ok(FgSubgroup {
            group: group.clone(),
            gens: gens.into_iter().map(Portrait::simplified).collect(),
        })
    }

    pub fn from_words(group: &GroupDef, words: &[Word]) -> FgSubgroup {
        let gens = words.iter().map(|w| Portrait::from_word(group, w)).collect();
        FgSubgroup {
            group: group.clone(),
            gens,
        }
    }

    /// The ambient group as a subgroup of itself.
    pub fn whole(group: &GroupDef) -> FgSubgroup {
        FgSubgroup::from_words(group, &group.generators())
    }

    pub fn trivial(group: &GroupDef) -> FgSubgroup {
        FgSubgroup {
            group: group.clone(),
            gens: Vec::new(),
        }
    }

    pub fn group(&self) -> &GroupDef {
        &self.group
    }

    pub fn gens(&self) -> &[Portrait] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Generators as words, when every generator has depth zero.
    pub fn words(&self) -> Option<Vec<Word>> {
        self.gens.iter().map(|p| p.as_word().cloned()).collect()
    }

    /// Renders each generator: a word, or `u:w; ...` for deeper elements.
    pub fn render_gens(&self) -> Vec<String> {
        self.gens.iter().map(|p| render_element(&self.group, p)).collect()
    }

    /// Evaluates a word in the generators.
    pub fn evaluate(&self, w: &HWord) -> Portrait {
        let g = &self.group;
        let mut acc = Portrait::identity(g.degree());
        for &(i, inv) in &w.0 {
            let x = if inv {
                self.gens[i].inverse(g)
            } else {
                self.gens[i].clone()
            };
            acc = acc.mul(g, &x);
        }
        acc
    }

    /// The orbit of `v`, in shortlex order.
    pub fn orbit(&self, v: &Vertex) -> Vec<Vertex> {
        let mut seen = HashSet::from([v.clone()]);
        let mut queue = VecDeque::from([v.clone()]);
        while let Some(x) = queue.pop_front() {
            for h in &self.gens {
                let y = h.act(&self.group, &x);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<Vertex> = seen.into_iter().collect();
        out.sort();
        out
    }

    fn orbit_closure(&self, xs: &[Vertex], cap: usize) -> Result<Vec<Vertex>> {
        let mut seen: HashSet<Vertex> = HashSet::new();
        let mut out = Vec::new();
        for x in xs {
            if seen.contains(x) {
                continue;
            }
            for y in self.orbit(x) {
                if seen.insert(y.clone()) {
                    out.push(y);
                }
            }
            if out.len() > cap {
                return Err(Error::Budget(format!("orbit closure exceeds {cap} vertices")));
            }
        }
        out.sort();
        Ok(out)
    }

    /// The permutation group induced on the orbit closure of `xs`, with
    /// the closure itself.
    pub fn image_on(&self, xs: &[Vertex], cap: usize) -> Result<(Vec<Vertex>, PermGroup)> {
        let omega = self.orbit_closure(xs, cap)?;
        let pos: HashMap<&Vertex, u32> = omega.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
        let perms = self
            .gens
            .iter()
            .map(|h| Perm::from_images(omega.iter().map(|v| pos[&h.act(&self.group, v)]).collect()))
            .collect::<Result<Vec<_>>>()?;
        let grp = PermGroup::new(omega.len(), perms)?;
        Ok((omega, grp))
    }

    /// Pointwise stabilizer of `xs`, generated by Schreier generators over
    /// the orbit of the tuple `xs`.
    pub fn stab_set(&self, xs: &[Vertex], budgets: &Budgets) -> Result<FgSubgroup> {
        Ok(self.stab_set_with_index(xs, budgets)?.0)
    }

    /// As [`stab_set`](Self::stab_set), also returning `[H : Stab_H(X)]`.
    pub fn stab_set_with_index(&self, xs: &[Vertex], budgets: &Budgets) -> Result<(FgSubgroup, usize)> {
        if xs.is_empty() {
            return Ok((self.clone(), 1));
        }
        let g = &self.group;
        let (omega, image) = self.image_on(xs, budgets.max_cosets)?;
        let perms = image.gens().to_vec();
        // Schreier transversal over the orbit of the tuple xs
        let start: Vec<u32> = xs.iter().map(|x| omega.binary_search(x).unwrap() as u32).collect();
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut reps: Vec<(Vec<u32>, Portrait)> = Vec::new();
        index.insert(start.clone(), 0);
        reps.push((start, Portrait::identity(g.degree())));
        let mut tree_edges: HashSet<(usize, usize)> = HashSet::new();
        let mut k = 0;
        while k < reps.len() {
            for (s, sp) in perms.iter().enumerate() {
                let y: Vec<u32> = reps[k].0.iter().map(|&q| sp.image(q)).collect();
                if !index.contains_key(&y) {
                    if reps.len() >= budgets.max_cosets {
                        return Err(Error::Budget(format!("more than {} cosets", budgets.max_cosets)));
                    }
                    let t = reps[k].1.mul(g, &self.gens[s]);
                    index.insert(y.clone(), reps.len());
                    tree_edges.insert((k, s));
                    reps.push((y, t));
                }
            }
            k += 1;
        }
        let inverses: Vec<Portrait> = reps.iter().map(|(_, t)| t.inverse(g)).collect();
        let mut out = Vec::new();
        for (i, (p, t)) in reps.iter().enumerate() {
            for (s, sp) in perms.iter().enumerate() {
                if tree_edges.contains(&(i, s)) {
                    continue;
                }
                let y: Vec<u32> = p.iter().map(|&q| sp.image(q)).collect();
                let j = index[&y];
                out.push(t.mul(g, &self.gens[s]).mul(g, &inverses[j]));
            }
        }
        let sub = FgSubgroup {
            group: g.clone(),
            gens: out,
        }
        .pruned(budgets.closure_cap);
        Ok((sub, reps.len()))
    }

    pub fn stab_level(&self, n: usize, budgets: &Budgets) -> Result<FgSubgroup> {
        if n == 0 {
            return Ok(self.clone());
        }
        self.stab_set(&Vertex::level(n, self.group.degree()), budgets)
    }

    /// Sections of the generators at `v`; every generator must fix `v`.
    pub fn section_subgroup(&self, v: &Vertex) -> Result<FgSubgroup> {
        if v.degree() != self.group.degree() {
            return Err(Error::DegreeMismatch(v.degree(), self.group.degree()));
        }
        let mut gens = Vec::with_capacity(self.gens.len());
        for (i, h) in self.gens.iter().enumerate() {
            if h.act(&self.group, v) != *v {
                return Err(Error::MovesVertex(i, v.to_string()));
            }
            gens.push(h.section(&self.group, v));
        }
        Ok(FgSubgroup {
            group: self.group.clone(),
            gens,
        })
    }

    pub fn is_trivial_subgroup(&self, cap: usize) -> Tri {
        let mut unknown = false;
        for h in &self.gens {
            match h.is_trivial(&self.group, cap) {
                Tri::False => return Tri::False,
                Tri::Unknown => unknown = true,
                Tri::True => {}
            }
        }
        if unknown {
            Tri::Unknown
        } else {
            Tri::True
        }
    }

    /// Drops generators certified trivial and generators equal to an
    /// earlier generator or its inverse. The generated group is unchanged.
    pub fn pruned(self, cap: usize) -> FgSubgroup {
        let g = &self.group;
        let level = sig_level(g.degree()).min(6);
        let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
        let mut kept: Vec<Portrait> = Vec::new();
        'outer: for h in self.gens {
            let h = h.simplified();
            if h.is_trivial(g, cap) == Tri::True {
                continue;
            }
            let sig = h.level_perm(g, level);
            let mut inv_sig = vec![0u32; sig.len()];
            for (i, &x) in sig.iter().enumerate() {
                inv_sig[x as usize] = i as u32;
            }
            for key in [hash_sig(&sig), hash_sig(&inv_sig)] {
                if let Some(b) = buckets.get(&key) {
                    for &k in b {
                        if h.equal(g, &kept[k], cap) == Tri::True || h.equal(g, &kept[k].inverse(g), cap) == Tri::True {
                            continue 'outer;
                        }
                    }
                }
            }
            buckets.entry(hash_sig(&sig)).or_default().push(kept.len());
            kept.push(h);
        }
        FgSubgroup {
            group: self.group,
            gens: kept,
        }
    }

    /// `H̄_n` as a permutation group of level `n`.
    pub fn quotient_image(&self, n: usize) -> PermGroup {
        let width = pow_usize(self.group.degree(), n);
        let gens = self
            .gens
            .iter()
            .map(|h| Perm::from_images(h.level_perm(&self.group, n)).expect("level action is a bijection"))
            .collect();
        PermGroup::new(width, gens).expect("consistent degree")
    }

    /// `[Ḡ_n : H̄_n]`. Fails when some generator's image lies outside `Ḡ_n`.
    pub fn index_in_quotient(&self, n: usize) -> Result<BigUint> {
        if n == 0 {
            return Ok(BigUint::one());
        }
        let q = self.group.quotient(n);
        let img = self.quotient_image(n);
        q.subgroup_index(img.gens())
    }

    pub fn oracle(&self, budgets: &Budgets) -> MembershipOracle<'_> {
        MembershipOracle {
            h: self,
            budgets: budgets.clone(),
            images: Vec::new(),
            ball: None,
        }
    }

    pub fn membership(&self, x: &Portrait, budgets: &Budgets) -> Membership {
        self.oracle(budgets).query(x)
    }

    pub fn membership_word(&self, w: &Word, budgets: &Budgets) -> Membership {
        self.membership(&Portrait::from_word(&self.group, w), budgets)
    }

    /// Tries to certify finite index: for a level `n` where the quotient
    /// index has stabilised, every Schreier generator of the preimage of
    /// `H̄_n` is shown to lie in `H`, so `H` is that preimage.
    pub fn finite_index_verdict(&self, budgets: &Budgets) -> FiniteIndexVerdict {
        let mut indices = Vec::new();
        for n in 0..=budgets.max_level {
            match self.index_in_quotient(n) {
                Ok(i) => indices.push(i),
                Err(_) => {
                    return FiniteIndexVerdict::Unknown {
                        quotient_indices: indices,
                    }
                }
            }
        }
        let mut oracle = self.oracle(budgets);
        for n0 in 0..budgets.max_level {
            if indices[n0] != indices[n0 + 1] {
                continue;
            }
            if let Some(true) = self.certify_at(n0, &mut oracle, budgets) {
                return FiniteIndexVerdict::Certified {
                    index: indices[n0].clone(),
                    level: n0,
                };
            }
        }
        FiniteIndexVerdict::Unknown {
            quotient_indices: indices,
        }
    }

    /// Schreier generators (as ambient words) of the preimage of `H̄_n`.
    pub fn preimage_schreier_words(&self, n: usize, budgets: &Budgets) -> Option<Vec<Word>> {
        let g = &self.group;
        let gens: Vec<Word> = g.generators();
        if n == 0 {
            return Some(gens);
        }
        let quotient = g.quotient(n);
        let hbar = self.quotient_image(n);
        let orbit_id: Vec<usize> = {
            let mut id = vec![0usize; hbar.degree()];
            for (k, o) in hbar.orbits().iter().enumerate() {
                for &x in o {
                    id[x as usize] = k;
                }
            }
            id
        };
        // a right coset H̄y determines q ↦ orbit(q^(y^-1))
        let invariant = |y: &Perm| -> Vec<usize> {
            let yi = y.inverse();
            (0..hbar.degree() as u32)
                .map(|q| orbit_id[yi.image(q) as usize])
                .collect()
        };
        let gen_perms: Vec<Perm> = quotient.gens().to_vec();
        let mut reps: Vec<(Perm, Word)> = vec![(Perm::identity(hbar.degree()), Word::empty())];
        let mut buckets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        buckets.entry(invariant(&reps[0].0)).or_default().push(0);
        let find = |y: &Perm, reps: &[(Perm, Word)], buckets: &HashMap<Vec<usize>, Vec<usize>>| {
            buckets
                .get(&invariant(y))
                .and_then(|b| b.iter().copied().find(|&j| hbar.contains(&y.mul(&reps[j].0.inverse()))))
        };
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut k = 0;
        while k < reps.len() {
            for (s, sp) in gen_perms.iter().enumerate() {
                let y = reps[k].0.mul(sp);
                let tx = g.mul(&reps[k].1, &gens[s]);
                match find(&y, &reps, &buckets) {
                    Some(j) => {
                        let w = g.mul(&tx, &g.inverse(&reps[j].1));
                        if !w.is_empty() && seen.insert(w.clone()) {
                            out.push(w);
                        }
                    }
                    None => {
                        if reps.len() >= budgets.max_cosets {
                            return None;
                        }
                        buckets.entry(invariant(&y)).or_default().push(reps.len());
                        reps.push((y, tx));
                    }
                }
            }
            k += 1;
        }
        Some(out)
    }

    fn certify_at(&self, n: usize, oracle: &mut MembershipOracle<'_>, budgets: &Budgets) -> Option<bool> {
        let g = &self.group;
        let words = self.preimage_schreier_words(n, budgets)?;
        let elems: Vec<Portrait> = words.iter().map(|w| Portrait::from_word(g, w)).collect();
        // cheap refutation first
        for e in &elems {
            if oracle.refute(e).is_some() {
                return Some(false);
            }
        }
        for e in &elems {
            if !matches!(oracle.query(e), Membership::Yes { .. }) {
                return Some(false);
            }
        }
        Some(true)
    }
}

/// Renders an element: its word at depth zero, otherwise the non-trivial
/// leaf words as `vertex:word` pairs plus a `*` marker when some
/// permutation label is non-trivial.
pub fn render_element(g: &GroupDef, p: &Portrait) -> String {
    if let Some(w) = p.as_word() {
        return g.render(w);
    }
    let mut parts = Vec::new();
    let view = p.view(g);
    for node in &view.nodes {
        if !node.perm.is_empty() && node.perm.iter().enumerate().any(|(i, &x)| i != x) {
            parts.push(format!("{}:{:?}", node.vertex, node.perm));
        }
        if let Some(w) = &node.word {
            if w != "e" {
                parts.push(format!("{}:{}", node.vertex, w));
            }
        }
    }
    if parts.is_empty() {
        "e".to_string()
    } else {
        parts.join("; ")
    }
}

struct Ball {
    level: usize,
    elems: Vec<Portrait>,
    words: Vec<HWord>,
    sigs: Vec<Vec<u32>>,
    index: HashMap<u64, Vec<usize>>,
}

/// Membership queries against one subgroup, sharing quotient images and
/// the search ball between queries.
pub struct MembershipOracle<'a> {
    h: &'a FgSubgroup,
    budgets: Budgets,
    images: Vec<PermGroup>,
    ball: Option<Ball>,
}

impl MembershipOracle<'_> {
    fn image(&mut self, m: usize) -> &PermGroup {
        while self.images.len() < m {
            let next = self.images.len() + 1;
            self.images.push(self.h.quotient_image(next));
        }
        &self.images[m - 1]
    }

    /// The least level whose quotient shows `x ∉ H`.
    pub fn refute(&mut self, x: &Portrait) -> Option<usize> {
        let g = self.h.group.clone();
        for m in 1..=self.budgets.max_level {
            let p = Perm::from_images(x.level_perm(&g, m)).expect("level action is a bijection");
            if !self.image(m).contains(&p) {
                return Some(m);
            }
        }
        None
    }

    fn ball(&mut self) -> &Ball {
        if self.ball.is_none() {
            self.ball = Some(self.build_ball());
        }
        self.ball.as_ref().unwrap()
    }

    fn build_ball(&self) -> Ball {
        let g = &self.h.group;
        let cap = self.budgets.closure_cap;
        let level = sig_level(g.degree());
        let k = self.h.gens.len();
        let mut letters: Vec<(usize, bool, Portrait, Vec<u32>)> = Vec::new();
        for i in 0..k {
            let x = self.h.gens[i].clone();
            let xi = x.inverse(g);
            let sx = x.level_perm(g, level);
            let sxi = xi.level_perm(g, level);
            letters.push((i, false, x, sx));
            letters.push((i, true, xi, sxi));
        }
        let mut ball = Ball {
            level,
            elems: Vec::new(),
            words: Vec::new(),
            sigs: Vec::new(),
            index: HashMap::new(),
        };
        let id_sig: Vec<u32> = (0..pow_usize(g.degree(), level) as u32).collect();
        ball.index.entry(hash_sig(&id_sig)).or_default().push(0);
        ball.elems.push(Portrait::identity(g.degree()));
        ball.words.push(HWord::empty());
        ball.sigs.push(id_sig);
        let radius = self.budgets.max_search_len.div_ceil(2);
        let mut frontier = vec![0usize];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &e in &frontier {
                for (i, inv, x, sx) in &letters {
                    if ball.elems.len() >= self.budgets.max_ball {
                        return ball;
                    }
                    if ball.words[e].0.last() == Some(&(*i, !*inv)) {
                        continue;
                    }
                    let sig = compose(&ball.sigs[e], sx);
                    let key = hash_sig(&sig);
                    let elem = ball.elems[e].mul(g, x);
                    let dup = ball.index.get(&key).is_some_and(|b| {
                        b.iter()
                            .any(|&j| ball.sigs[j] == sig && elem.equal(g, &ball.elems[j], cap) == Tri::True)
                    });
                    if dup {
                        continue;
                    }
                    let mut word = ball.words[e].clone();
                    word.0.push((*i, *inv));
                    ball.index.entry(key).or_default().push(ball.elems.len());
                    next.push(ball.elems.len());
                    ball.elems.push(elem);
                    ball.words.push(word);
                    ball.sigs.push(sig);
                }
            }
            frontier = next;
        }
        ball
    }

    /// Searches for `x = b1 · b2^-1` with `b1, b2` in the ball.
    fn search(&mut self, x: &Portrait) -> Option<HWord> {
        let g = self.h.group.clone();
        let cap = self.budgets.closure_cap;
        let ball = self.ball();
        let sx = x.level_perm(&g, ball.level);
        for y in 0..ball.elems.len() {
            let sig = compose(&sx, &ball.sigs[y]);
            let Some(bucket) = ball.index.get(&hash_sig(&sig)) else {
                continue;
            };
            let mut z = None;
            for &j in bucket {
                if ball.sigs[j] != sig {
                    continue;
                }
                let xy = z.get_or_insert_with(|| x.mul(&g, &ball.elems[y]));
                if xy.equal(&g, &ball.elems[j], cap) == Tri::True {
                    return Some(ball.words[j].concat(&ball.words[y].inverse()));
                }
            }
        }
        None
    }

    pub fn query(&mut self, x: &Portrait) -> Membership {
        let g = self.h.group.clone();
        if x.is_trivial(&g, self.budgets.closure_cap) == Tri::True {
            return Membership::Yes {
                witness: HWord::empty(),
            };
        }
        if let Some(level) = self.refute(x) {
            return Membership::No { level };
        }
        match self.search(x) {
            Some(witness) => Membership::Yes { witness },
            None => Membership::Unknown,
        }
    }
}

/// Normal closure of a word, grown greedily from conjugates until the
/// image in `Ḡ_n` is normal for every level up to the budget.
#[derive(Clone, Debug)]
pub struct NormalClosure {
    pub subgroup: FgSubgroup,
    /// `Some` when the generated subgroup is certified to be the whole
    /// normal closure, with its index.
    pub certified_index: Option<BigUint>,
    pub verdict: FiniteIndexVerdict,
}

pub fn normal_closure_gens(g: &GroupDef, w: &Word, budgets: &Budgets) -> NormalClosure {
    let w = g.reduce(w);
    if g.is_trivial(&w, budgets.closure_cap) == Tri::True {
        let trivial = FgSubgroup::trivial(g);
        let verdict = trivial.finite_index_verdict(budgets);
        return NormalClosure {
            subgroup: trivial,
            certified_index: None,
            verdict,
        };
    }
    let gens_g = g.generators();
    let mut words = vec![w.clone()];
    for m in 1..=budgets.max_level {
        let q = g.quotient(m);
        let mut image = PermGroup::new(q.degree(), vec![g.level_image(&w, m)]).unwrap();
        for x in &words[1..] {
            image = image.with_generator(g.level_image(x, m));
        }
        let mut k = 0;
        while k < words.len() {
            for x in &gens_g {
                let c = g.mul(&g.mul(&g.inverse(x), &words[k]), x);
                let p = g.level_image(&c, m);
                if !image.contains(&p) {
                    image = image.with_generator(p);
                    words.push(c);
                }
            }
            k += 1;
        }
    }
    let subgroup = FgSubgroup::from_words(g, &words);
    let verdict = subgroup.finite_index_verdict(budgets);
    let certified_index = match &verdict {
        FiniteIndexVerdict::Certified { index, level } => {
            let q = g.quotient(*level);
            let n = if *level == 0 {
                BigUint::one()
            } else {
                q.order() / q.normal_closure(&[g.level_image(&w, *level)]).order()
            };
            (n == *index).then(|| index.clone())
        }
        FiniteIndexVerdict::Unknown { .. } => None,
    };
    NormalClosure {
        subgroup,
        certified_index,
        verdict,
    }
}

/// One diagonal factor: copies of `⟨base⟩` at the support vertices,
/// twisted by conjugation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalSpec {
    pub support: Vec<Vertex>,
    pub base: Vec<Word>,
    /// `twists[j] = c_j` places `c_j^-1 g c_j` at `support[j]`.
    pub twists: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub diagonals: Vec<DiagonalSpec>,
}

#[derive(Serialize, Deserialize)]
struct DiagonalDoc {
    support: Vec<String>,
    base: Vec<String>,
    #[serde(default)]
    twists: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct BlockDoc {
    diagonals: Vec<DiagonalDoc>,
}

impl DiagonalSpec {
    fn validate(&self, g: &GroupDef) -> Result<()> {
        if self.support.is_empty() {
            return Err(Error::InvalidParameters("empty support".into()));
        }
        if self.twists.len() != self.support.len() {
            return Err(Error::InvalidParameters(format!(
                "{} twists for {} support vertices",
                self.twists.len(),
                self.support.len()
            )));
        }
        for v in &self.support {
            if v.degree() != g.degree() {
                return Err(Error::DegreeMismatch(v.degree(), g.degree()));
            }
        }
        check_orthogonal(&self.support)
    }
}

fn check_orthogonal(vs: &[Vertex]) -> Result<()> {
    for (i, u) in vs.iter().enumerate() {
        for v in &vs[i + 1..] {
            if !is_orthogonal_set([u, v]) {
                return Err(Error::Overlap(u.to_string(), v.to_string()));
            }
        }
    }
    Ok(())
}

impl BlockSpec {
    pub fn parse_json(g: &GroupDef, text: &str) -> Result<BlockSpec> {
        let doc: BlockDoc = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        let d = g.degree();
        let diagonals = doc
            .diagonals
            .iter()
            .map(|dd| {
                let support = dd
                    .support
                    .iter()
                    .map(|s| Vertex::parse(s, d))
                    .collect::<Result<Vec<_>>>()?;
                let base = dd.base.iter().map(|s| g.parse_word(s)).collect::<Result<Vec<_>>>()?;
                let twists = if dd.twists.is_empty() {
                    vec![Word::empty(); support.len()]
                } else {
                    dd.twists.iter().map(|s| g.parse_word(s)).collect::<Result<Vec<_>>>()?
                };
                Ok(DiagonalSpec { support, base, twists })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockSpec { diagonals })
    }

    pub fn to_json(&self, g: &GroupDef) -> String {
        let doc = BlockDoc {
            diagonals: self
                .diagonals
                .iter()
                .map(|d| DiagonalDoc {
                    support: d.support.iter().map(|v| v.to_string()).collect(),
                    base: d.base.iter().map(|w| g.render(w)).collect(),
                    twists: d.twists.iter().map(|w| g.render(w)).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }
}

/// Generators of the diagonal subgroup: for each base generator `g`, the
/// element with section `c_j^-1 g c_j` at `u_j` and trivial elsewhere.
pub fn realize_diagonal(g: &GroupDef, spec: &DiagonalSpec) -> Result<FgSubgroup> {
    spec.validate(g)?;
    let mut gens = Vec::with_capacity(spec.base.len());
    for b in &spec.base {
        let mut acc = Portrait::identity(g.degree());
        for (u, c) in spec.support.iter().zip(&spec.twists) {
            let local = g.mul(&g.mul(&g.inverse(c), b), c);
            acc = acc.mul(g, &Portrait::placed(g, &local, u));
        }
        gens.push(acc);
    }
    FgSubgroup::new(g, gens)
}

pub fn realize_block(g: &GroupDef, spec: &BlockSpec) -> Result<FgSubgroup> {
    let all: Vec<Vertex> = spec.diagonals.iter().flat_map(|d| d.support.iter().cloned()).collect();
    check_orthogonal(&all)?;
    let mut gens = Vec::new();
    for d in &spec.diagonals {
        gens.extend(realize_diagonal(g, d)?.gens);
    }
    FgSubgroup::new(g, gens)
}

/// Reads a subgroup: a block-spec JSON document, a JSON object with a
/// `generators` list, or generator words separated by newlines or commas.
pub fn parse_subgroup(g: &GroupDef, text: &str) -> Result<FgSubgroup> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        if value.get("diagonals").is_some() {
            return realize_block(g, &BlockSpec::parse_json(g, text)?);
        }
        if let Some(list) = value.get("generators").and_then(|v| v.as_array()) {
            let words = list
                .iter()
                .map(|x| {
                    x.as_str()
                        .ok_or_else(|| Error::Json("generators must be strings".into()))
                        .and_then(|s| g.parse_word(s))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(FgSubgroup::from_words(g, &words));
        }
        return Err(Error::Json("expected `diagonals` or `generators`".into()));
    }
    let words = text
        .lines()
        .map(|l| l.split('#').next().unwrap())
        .flat_map(|l| l.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| g.parse_word(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(FgSubgroup::from_words(g, &words))
}

/// Known rigid stabilizers of the first Grigorchuk group: `B` at level one
/// and `K` below. Used as configuration for building block subgroups.
pub fn grigorchuk_rist(g: &GroupDef, v: &Vertex) -> Option<Vec<Word>> {
    if *g != GroupDef::grigorchuk() {
        return None;
    }
    let gens: &[&str] = match v.len() {
        0 => &["a", "b", "c", "d"],
        1 => B_GENS,
        _ => K_GENS,
    };
    Some(gens.iter().map(|s| g.parse_word(s).unwrap()).collect())
}

/// Generators of `B = ⟨b⟩^G` in the first Grigorchuk group.
pub const B_GENS: &[&str] = &["b", "aba", "dabad", "adabada"];
/// Generators of `K = ⟨abab⟩^G` in the first Grigorchuk group.
pub const K_GENS: &[&str] = &["abab", "badabada", "abadabad"];
