//! Self-similar groups given by wreath recursion.
//!
//! Each generator carries a root permutation of `{0, .., d-1}` and one
//! section letter per child. Words compose left to right: in `gh` the
//! letter `g` acts first, so `(gh)(v) = h(g(v))` and
//! `(gh)|_v = g|_v · h|_{g(v)}`.

mod builtin;
mod parse;
mod portrait;
mod word;

pub use portrait::{Portrait, TreeElement};
pub use word::{Letter, Word};

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::permgrp::QuotientCache;
use crate::tree::Vertex;

/// Three-valued answer of bounded decision procedures. `True`/`False`
/// are exact; `Unknown` means a budget ran out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Tri::True
    }
}

/// A self-similar group presented by wreath recursion.
#[derive(Clone)]
pub struct GroupDef {
    name: String,
    degree: usize,
    names: Vec<String>,
    /// `perm[l][i]` is the image of child `i` under letter `l`.
    perm: Vec<Vec<u8>>,
    /// `section[l][i]` is the section of letter `l` at child `i`.
    section: Vec<Vec<Option<Letter>>>,
    involution: Vec<bool>,
    csp: bool,
    cache: Arc<QuotientCache>,
}

/// One generator of a definition before validation.
#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub name: String,
    pub perm: Vec<u8>,
    /// Section at each child: `None` for the identity, otherwise
    /// `(generator index, inverted)`.
    pub sections: Vec<Option<(usize, bool)>>,
}

impl GroupDef {
    /// Builds and validates a definition. The identity symbol `e` is implicit.
    pub fn new(name: &str, degree: usize, gens: Vec<GeneratorSpec>, csp: bool) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidGroup("degree must be at least 2".into()));
        }
        if gens.is_empty() {
            return Err(Error::InvalidGroup("no generators".into()));
        }
        let mut seen = HashSet::new();
        for g in &gens {
            if g.name == "e" || g.name.is_empty() {
                return Err(Error::InvalidGroup(format!("reserved generator name `{}`", g.name)));
            }
            if !g.name.chars().next().unwrap().is_alphabetic()
                || !g.name.chars().all(|c| c.is_alphanumeric() || c == '_')
            {
                return Err(Error::InvalidGroup(format!("bad generator name `{}`", g.name)));
            }
            if !seen.insert(g.name.clone()) {
                return Err(Error::InvalidGroup(format!("duplicate generator `{}`", g.name)));
            }
            if g.perm.len() != degree || !is_permutation(&g.perm) {
                return Err(Error::InvalidPerm(format!("generator `{}`", g.name)));
            }
            if g.sections.len() != degree {
                return Err(Error::InvalidGroup(format!(
                    "generator `{}` has {} sections, expected {}",
                    g.name,
                    g.sections.len(),
                    degree
                )));
            }
            if g.sections.iter().flatten().any(|&(i, _)| i >= gens.len()) {
                return Err(Error::InvalidGroup(format!("generator `{}` has a bad section", g.name)));
            }
        }
        let k = gens.len();
        let mut perm = vec![Vec::new(); 2 * k];
        let mut section = vec![Vec::new(); 2 * k];
        for (gi, g) in gens.iter().enumerate() {
            let fwd = Letter::new(gi, false).index();
            let bwd = Letter::new(gi, true).index();
            perm[fwd] = g.perm.clone();
            let mut inv = vec![0u8; degree];
            for (i, &j) in g.perm.iter().enumerate() {
                inv[j as usize] = i as u8;
            }
            section[fwd] = g.sections.iter().map(|s| s.map(|(j, b)| Letter::new(j, b))).collect();
            // (g^-1)|_i = (g|_{g^-1(i)})^-1
            section[bwd] = (0..degree)
                .map(|i| g.sections[inv[i] as usize].map(|(j, b)| Letter::new(j, !b)))
                .collect();
            perm[bwd] = inv;
        }
        let mut def = GroupDef {
            name: name.to_string(),
            degree,
            names: gens.iter().map(|g| g.name.clone()).collect(),
            perm,
            section,
            involution: vec![false; k],
            csp,
            cache: Arc::default(),
        };
        // Certify involutions with the unnormalized procedure, then switch on
        // normalization. Certification only ever enables extra cancellation.
        let cap = 1 << 16;
        let flags: Vec<bool> = (0..k)
            .map(|g| {
                let l = Letter::new(g, false);
                def.is_trivial(&Word::from_letters(vec![l, l]), cap) == Tri::True
            })
            .collect();
        def.involution = flags;
        for l in 0..2 * k {
            for i in 0..degree {
                if let Some(s) = def.section[l][i] {
                    def.section[l][i] = Some(def.normalize_letter(s));
                }
            }
        }
        Ok(def)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_generators(&self) -> usize {
        self.names.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub(crate) fn quotient_cache(&self) -> &QuotientCache {
        &self.cache
    }

    pub fn has_csp(&self) -> bool {
        self.csp
    }

    pub fn is_involution(&self, generator: usize) -> bool {
        self.involution[generator]
    }

    /// The generator `i` as a one-letter word.
    pub fn generator(&self, i: usize) -> Word {
        Word::from_letters(vec![Letter::new(i, false)])
    }

    pub fn generators(&self) -> Vec<Word> {
        (0..self.num_generators()).map(|i| self.generator(i)).collect()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub(crate) fn letter_perm(&self, l: Letter) -> &[u8] {
        &self.perm[l.index()]
    }

    pub(crate) fn letter_section(&self, l: Letter, i: usize) -> Option<Letter> {
        self.section[l.index()][i]
    }

    pub(crate) fn normalize_letter(&self, l: Letter) -> Letter {
        if l.is_inverse() && self.involution[l.generator()] {
            l.inverse()
        } else {
            l
        }
    }

    pub fn inverse_letter(&self, l: Letter) -> Letter {
        self.normalize_letter(l.inverse())
    }

    /// Removes identity letters, normalizes inverses of certified
    /// involutions and cancels adjacent inverse pairs.
    pub fn reduce(&self, w: &Word) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        for &l in w.letters() {
            let l = self.normalize_letter(l);
            match out.last() {
                Some(&last) if last == self.inverse_letter(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word::from_letters(out)
    }

    pub fn mul(&self, u: &Word, v: &Word) -> Word {
        let mut letters = u.letters().to_vec();
        letters.extend_from_slice(v.letters());
        self.reduce(&Word::from_letters(letters))
    }

    pub fn inverse(&self, w: &Word) -> Word {
        let letters = w.letters().iter().rev().map(|&l| self.inverse_letter(l)).collect();
        Word::from_letters(letters)
    }

    pub fn pow(&self, w: &Word, k: usize) -> Word {
        let mut letters = Vec::with_capacity(w.len() * k);
        for _ in 0..k {
            letters.extend_from_slice(w.letters());
        }
        self.reduce(&Word::from_letters(letters))
    }

    /// Permutation of the first level induced by `w`, as an image table.
    pub fn root_perm(&self, w: &Word) -> Vec<u8> {
        let mut p: Vec<u8> = (0..self.degree as u8).collect();
        for &l in w.letters() {
            let lp = self.letter_perm(l);
            for x in p.iter_mut() {
                *x = lp[*x as usize];
            }
        }
        p
    }

    /// Section at the first-level vertex `i`, reduced.
    pub fn section1(&self, w: &Word, i: usize) -> Word {
        let mut cur = i;
        let mut out = Vec::with_capacity(w.len());
        for &l in w.letters() {
            if let Some(s) = self.letter_section(l, cur) {
                out.push(s);
            }
            cur = self.letter_perm(l)[cur] as usize;
        }
        self.reduce(&Word::from_letters(out))
    }

    fn check_degree(&self, v: &Vertex) {
        assert_eq!(v.degree(), self.degree, "vertex degree does not match the group");
    }

    /// Section of `w` at an arbitrary vertex.
    pub fn section(&self, w: &Word, v: &Vertex) -> Word {
        self.check_degree(v);
        let mut cur = self.reduce(w);
        for &x in v.letters() {
            if cur.is_empty() {
                break;
            }
            cur = self.section1(&cur, x as usize);
        }
        cur
    }

    /// Image of a vertex under `w`.
    pub fn act(&self, w: &Word, v: &Vertex) -> Vertex {
        self.check_degree(v);
        let mut letters = v.letters().to_vec();
        for &l in w.letters() {
            self.act_letter_in_place(l, &mut letters);
        }
        Vertex::new(letters, self.degree).expect("valid image")
    }

    pub(crate) fn act_letter_in_place(&self, l: Letter, letters: &mut [u8]) {
        let mut cur = Some(l);
        for x in letters.iter_mut() {
            let Some(c) = cur else { break };
            let i = *x as usize;
            *x = self.letter_perm(c)[i];
            cur = self.letter_section(c, i);
        }
    }

    /// Word problem via the closure of `w` under first-level sections.
    pub fn is_trivial(&self, w: &Word, cap: usize) -> Tri {
        let w = self.reduce(w);
        if w.is_empty() {
            return Tri::True;
        }
        let identity: Vec<u8> = (0..self.degree as u8).collect();
        let mut seen: HashSet<Word> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(w.clone());
        queue.push_back(w);
        while let Some(x) = queue.pop_front() {
            if self.root_perm(&x) != identity {
                return Tri::False;
            }
            for i in 0..self.degree {
                let s = self.section1(&x, i);
                if !s.is_empty() && !seen.contains(&s) {
                    if seen.len() >= cap {
                        return Tri::Unknown;
                    }
                    seen.insert(s.clone());
                    queue.push_back(s);
                }
            }
        }
        Tri::True
    }

    pub fn equal(&self, u: &Word, v: &Word, cap: usize) -> Tri {
        self.is_trivial(&self.mul(u, &self.inverse(v)), cap)
    }

    /// Least `k <= max_order` with `w^k = 1`, or `None` when not certified.
    pub fn element_order(&self, w: &Word, max_order: usize, cap: usize) -> Option<usize> {
        let mut power = Word::empty();
        for k in 1..=max_order {
            power = self.mul(&power, w);
            match self.is_trivial(&power, cap) {
                Tri::True => return Some(k),
                Tri::False => {}
                Tri::Unknown => return None,
            }
        }
        None
    }

    /// Depth-`depth` portrait of a word.
    pub fn portrait(&self, w: &Word, depth: usize) -> Portrait {
        Portrait::from_word(self, w).expanded(self, depth)
    }

    /// Renders a word with the generator names. Inverse letters are written
    /// `x^-1`; names are separated by `.` when some name is longer than one
    /// character.
    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            return "e".to_string();
        }
        let sep = if self.names.iter().any(|n| n.chars().count() > 1) {
            "."
        } else {
            ""
        };
        let parts: Vec<String> = w
            .letters()
            .iter()
            .map(|l| {
                let n = &self.names[l.generator()];
                if l.is_inverse() {
                    format!("{n}^-1")
                } else {
                    n.clone()
                }
            })
            .collect();
        parts.join(sep)
    }

    pub(crate) fn render_letter(&self, l: Option<Letter>) -> String {
        match l {
            None => "e".into(),
            Some(l) => self.render(&Word::from_letters(vec![l])),
        }
    }

    fn perm_cycles(perm: &[u8]) -> String {
        let mut seen = vec![false; perm.len()];
        let mut cycles = Vec::new();
        for start in 0..perm.len() {
            if seen[start] || perm[start] as usize == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = perm[start] as usize;
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = perm[x] as usize;
            }
            cycles.push(cycle);
        }
        match cycles.len() {
            0 => String::new(),
            1 => cycles[0].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
            _ => cycles
                .iter()
                .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")))
                .collect(),
        }
    }

    /// Serializes the definition in the line-based text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("name = {}\ndegree = {}\ncsp = {}\n", self.name, self.degree, self.csp);
        for (g, name) in self.names.iter().enumerate() {
            let l = Letter::new(g, false);
            let secs: Vec<String> = (0..self.degree)
                .map(|i| self.render_letter(self.section[l.index()][i]))
                .collect();
            out.push_str(&format!(
                "{name} = perm({}) [{}]\n",
                Self::perm_cycles(self.letter_perm(l)),
                secs.join(", ")
            ));
        }
        out
    }
}

impl fmt::Debug for GroupDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupDef")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("generators", &self.names)
            .finish()
    }
}

impl PartialEq for GroupDef {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree
            && self.names == other.names
            && self.perm == other.perm
            && self.section == other.section
    }
}

fn is_permutation(p: &[u8]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        let x = x as usize;
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}
