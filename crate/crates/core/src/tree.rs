//! Combinatorics of the rooted `d`-regular tree.
//!
//! Vertices are finite words over `{0, .., d-1}`; the empty word is the root.
//! A transversal is a finite maximal prefix-free set of vertices, which we
//! check through the Kraft sum `sum d^-|v| = 1` in exact arithmetic.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// A vertex of the rooted `d`-regular tree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    letters: Vec<u8>,
    degree: u8,
}

impl Vertex {
    pub fn root(degree: usize) -> Self {
        assert!((2..=DIGITS.len()).contains(&degree), "degree out of range");
        Vertex {
            letters: Vec::new(),
            degree: degree as u8,
        }
    }

    pub fn new(letters: Vec<u8>, degree: usize) -> Result<Self> {
        if !(2..=DIGITS.len()).contains(&degree) {
            return Err(Error::InvalidParameters(format!("degree {degree}")));
        }
        if let Some(&l) = letters.iter().find(|&&l| l as usize >= degree) {
            return Err(Error::InvalidVertex(format!("letter {l} >= degree {degree}")));
        }
        Ok(Vertex {
            letters,
            degree: degree as u8,
        })
    }

    /// Parses the digit-string form; `""` is the root.
    pub fn parse(s: &str, degree: usize) -> Result<Self> {
        let s = s.trim();
        let s = if s == "ε" || s == "root" { "" } else { s };
        let mut letters = Vec::with_capacity(s.len());
        for c in s.bytes() {
            let c = c.to_ascii_lowercase();
            match DIGITS.iter().position(|&d| d == c) {
                Some(p) => letters.push(p as u8),
                None => return Err(Error::InvalidVertex(s.to_string())),
            }
        }
        Vertex::new(letters, degree)
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_root(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn child(&self, i: usize) -> Vertex {
        assert!(i < self.degree());
        let mut letters = self.letters.clone();
        letters.push(i as u8);
        Vertex {
            letters,
            degree: self.degree,
        }
    }

    pub fn children(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.degree()).map(move |i| self.child(i))
    }

    pub fn parent(&self) -> Option<Vertex> {
        if self.is_root() {
            return None;
        }
        let mut letters = self.letters.clone();
        letters.pop();
        Some(Vertex {
            letters,
            degree: self.degree,
        })
    }

    pub fn concat(&self, other: &Vertex) -> Vertex {
        assert_eq!(self.degree, other.degree);
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Vertex {
            letters,
            degree: self.degree,
        }
    }

    /// The part of `self` after `prefix`, if `prefix` is a prefix.
    pub fn strip_prefix(&self, prefix: &Vertex) -> Option<Vertex> {
        self.letters.strip_prefix(prefix.letters.as_slice()).map(|rest| Vertex {
            letters: rest.to_vec(),
            degree: self.degree,
        })
    }

    pub fn is_prefix_of(&self, other: &Vertex) -> bool {
        other.letters.starts_with(&self.letters)
    }

    /// Index of the vertex among the vertices of its level, in shortlex order.
    pub fn level_index(&self) -> usize {
        self.letters
            .iter()
            .fold(0usize, |acc, &l| acc * self.degree() + l as usize)
    }

    pub fn from_level_index(mut index: usize, level: usize, degree: usize) -> Vertex {
        let mut letters = vec![0u8; level];
        for slot in letters.iter_mut().rev() {
            *slot = (index % degree) as u8;
            index /= degree;
        }
        Vertex {
            letters,
            degree: degree as u8,
        }
    }

    /// All vertices of level `n`, in shortlex order.
    pub fn level(n: usize, degree: usize) -> Vec<Vertex> {
        let count = degree.pow(n as u32);
        (0..count).map(|i| Vertex::from_level_index(i, n, degree)).collect()
    }
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
            .then_with(|| self.degree.cmp(&other.degree))
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", DIGITS[l as usize] as char)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            write!(f, "ε")
        } else {
            write!(f, "{self}")
        }
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// True iff neither vertex is a prefix of the other.
pub fn orthogonal(u: &Vertex, v: &Vertex) -> Result<bool> {
    if u.degree != v.degree {
        return Err(Error::DegreeMismatch(u.degree(), v.degree()));
    }
    Ok(!u.is_prefix_of(v) && !v.is_prefix_of(u))
}

/// True iff every pair of distinct vertices is orthogonal.
pub fn is_orthogonal_set<'a>(set: impl IntoIterator<Item = &'a Vertex>) -> bool {
    let vs: Vec<&Vertex> = set.into_iter().collect();
    for (i, u) in vs.iter().enumerate() {
        for v in &vs[i + 1..] {
            if u.degree != v.degree || u.is_prefix_of(v) || v.is_prefix_of(u) {
                return false;
            }
        }
    }
    true
}

fn kraft_is_one(vertices: &BTreeSet<Vertex>, degree: usize) -> bool {
    let depth = vertices.iter().map(Vertex::len).max().unwrap_or(0);
    let d = BigUint::from(degree);
    let mut sum = BigUint::zero();
    for v in vertices {
        sum += num_traits::pow(d.clone(), depth - v.len());
    }
    let total = num_traits::pow(d, depth);
    !vertices.is_empty() && sum == total
}

/// Checks that `set` is a transversal: pairwise orthogonal with Kraft sum one.
pub fn is_transversal<'a>(set: impl IntoIterator<Item = &'a Vertex>, degree: usize) -> bool {
    let set: BTreeSet<Vertex> = set.into_iter().cloned().collect();
    if set.iter().any(|v| v.degree() != degree) {
        return false;
    }
    is_orthogonal_set(&set) && kraft_is_one(&set, degree)
}

/// A finite maximal prefix-free set of vertices, kept in shortlex order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Transversal {
    degree: usize,
    vertices: BTreeSet<Vertex>,
}

impl Transversal {
    pub fn root(degree: usize) -> Self {
        Transversal {
            degree,
            vertices: BTreeSet::from([Vertex::root(degree)]),
        }
    }

    pub fn new(vertices: impl IntoIterator<Item = Vertex>, degree: usize) -> Result<Self> {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        if !is_transversal(&vertices, degree) {
            let shown: Vec<String> = vertices.iter().map(|v| format!("{v:?}")).collect();
            return Err(Error::NotTransversal(shown.join(",")));
        }
        Ok(Transversal { degree, vertices })
    }

    /// The full `n`-th level.
    pub fn level(n: usize, degree: usize) -> Self {
        Transversal {
            degree,
            vertices: Vertex::level(n, degree).into_iter().collect(),
        }
    }

    /// The smallest transversal containing an orthogonal set.
    pub fn minimal_containing<'a>(set: impl IntoIterator<Item = &'a Vertex>, degree: usize) -> Result<Self> {
        let set: Vec<&Vertex> = set.into_iter().collect();
        if !is_orthogonal_set(set.iter().copied()) {
            return Err(Error::NotTransversal("set is not orthogonal".into()));
        }
        let mut out = BTreeSet::new();
        fn walk(v: Vertex, set: &[&Vertex], out: &mut BTreeSet<Vertex>) {
            if set.iter().any(|u| **u == v) || !set.iter().any(|u| v.is_prefix_of(u)) {
                out.insert(v);
                return;
            }
            for c in v.children().collect::<Vec<_>>() {
                walk(c, set, out);
            }
        }
        walk(Vertex::root(degree), &set, &mut out);
        Ok(Transversal { degree, vertices: out })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.vertices.contains(v)
    }

    pub fn depth(&self) -> usize {
        self.vertices.iter().map(Vertex::len).max().unwrap_or(0)
    }

    /// The unique element of the transversal lying on the path to `v`,
    /// provided `v` is at least as deep as that element.
    pub fn ancestor_of(&self, v: &Vertex) -> Option<&Vertex> {
        self.vertices.iter().find(|x| x.is_prefix_of(v))
    }

    /// Replaces `v` by its children.
    pub fn refine(&self, v: &Vertex) -> Result<Transversal> {
        if !self.vertices.contains(v) {
            return Err(Error::NotInTransversal(format!("{v:?}")));
        }
        let mut vertices = self.vertices.clone();
        vertices.remove(v);
        vertices.extend(v.children());
        Ok(Transversal {
            degree: self.degree,
            vertices,
        })
    }

    /// `self <= other`: every vertex of `other` descends from a vertex of `self`.
    pub fn leq(&self, other: &Transversal) -> Result<bool> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(other
            .vertices
            .iter()
            .all(|y| self.vertices.iter().any(|x| x.is_prefix_of(y))))
    }

    pub fn parse(s: &str, degree: usize) -> Result<Self> {
        let vertices = s
            .split(',')
            .map(|p| Vertex::parse(p, degree))
            .collect::<Result<Vec<_>>>()?;
        Transversal::new(vertices, degree)
    }
}

impl fmt::Display for Transversal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for Transversal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| format!("{v:?}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for Transversal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.vertices.iter().map(|v| v.to_string()))
    }
}

/// Vertex strings as they appear in JSON documents (degree supplied later).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexText(pub String);

impl<'de> Deserialize<'de> for VertexText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d).map(VertexText)
    }
}

pub(crate) fn pow_usize(base: usize, exp: usize) -> usize {
    let mut acc = 1usize;
    for _ in 0..exp {
        acc = acc.checked_mul(base).expect("level size overflow");
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Vertex {
        Vertex::parse(s, 2).unwrap()
    }

    fn set(items: &[&str]) -> Vec<Vertex> {
        items.iter().map(|s| v(s)).collect()
    }

    #[test]
    fn orthogonality() {
        assert!(!orthogonal(&v(""), &v("0")).unwrap());
        assert!(orthogonal(&v("01"), &v("10")).unwrap());
        assert!(orthogonal(&v("000"), &v("001")).unwrap());
        assert!(!orthogonal(&v("0"), &v("01")).unwrap());
        let three = Vertex::parse("0", 3).unwrap();
        assert_eq!(orthogonal(&v("1"), &three), Err(Error::DegreeMismatch(2, 3)));
    }

    #[test]
    fn transversal_membership() {
        assert!(is_transversal(&set(&[""]), 2));
        assert!(is_transversal(&set(&["000", "001", "01", "1"]), 2));
        // orthogonal, Kraft sum 5/8
        assert!(!is_transversal(&set(&["000", "01", "10"]), 2));
        assert!(!is_transversal(&set(&["0", "00", "1"]), 2));
        assert!(!is_transversal(&set(&[]), 2));
    }

    #[test]
    fn refine_steps() {
        let x = Transversal::root(2);
        let x = x.refine(&v("")).unwrap();
        assert_eq!(x.to_string(), "0,1");
        let x = x.refine(&v("0")).unwrap();
        assert_eq!(x.to_string(), "1,00,01");
        let x = x.refine(&v("00")).unwrap();
        assert_eq!(x, Transversal::new(set(&["000", "001", "01", "1"]), 2).unwrap());
        assert!(matches!(x.refine(&v("0")), Err(Error::NotInTransversal(_))));
    }

    #[test]
    fn order_examples() {
        let root = Transversal::root(2);
        let a = Transversal::parse("0,1", 2).unwrap();
        let b = Transversal::parse("00,01,1", 2).unwrap();
        assert!(root.leq(&b).unwrap());
        assert!(a.leq(&b).unwrap());
        assert!(!b.leq(&a).unwrap());
    }

    #[test]
    fn minimal_containing_fig1_supports() {
        let x = Transversal::minimal_containing(&set(&["1", "000", "001"]), 2).unwrap();
        assert_eq!(x.to_string(), "1,01,000,001");
        let y = Transversal::minimal_containing(&set(&["000", "01", "10"]), 2).unwrap();
        assert_eq!(y.to_string(), "01,10,11,000,001");
    }

    #[test]
    fn level_indexing_is_shortlex() {
        let level = Vertex::level(3, 2);
        for (i, w) in level.iter().enumerate() {
            assert_eq!(w.level_index(), i);
        }
        assert_eq!(level[3].to_string(), "011");
    }
}
