use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{GroupDef, Tri, Word};
use crate::tree::{pow_usize, Vertex};

/// A finite truncation of a tree automorphism: a permutation label at every
/// vertex above `depth` and a word at every vertex of level `depth`.
///
/// Read as an element of `Aut(T)` it acts on `x_0 x_1 ...` by applying the
/// labels along the source path and then the leaf word below level `depth`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Portrait {
    degree: usize,
    depth: usize,
    /// Permutation labels of internal vertices, level by level in shortlex
    /// order, `degree` entries each.
    perms: Vec<u8>,
    leaves: Vec<Word>,
}

/// A portrait read as a candidate element of `Aut(T)`. Whether it lies in
/// the ambient group is a separate question.
pub type TreeElement = Portrait;

fn level_offset(degree: usize, level: usize) -> usize {
    (pow_usize(degree, level) - 1) / (degree - 1)
}

impl Portrait {
    pub fn identity(degree: usize) -> Portrait {
        Portrait {
            degree,
            depth: 0,
            perms: Vec::new(),
            leaves: vec![Word::empty()],
        }
    }

    pub fn from_word(g: &GroupDef, w: &Word) -> Portrait {
        Portrait {
            degree: g.degree(),
            depth: 0,
            perms: Vec::new(),
            leaves: vec![g.reduce(w)],
        }
    }

    /// The element acting as `w` below `u` and trivially elsewhere.
    pub fn placed(g: &GroupDef, w: &Word, u: &Vertex) -> Portrait {
        let d = g.degree();
        let depth = u.len();
        let internal = level_offset(d, depth);
        let mut perms = Vec::with_capacity(internal * d);
        for _ in 0..internal {
            perms.extend(0..d as u8);
        }
        let mut leaves = vec![Word::empty(); pow_usize(d, depth)];
        leaves[u.level_index()] = g.reduce(w);
        Portrait {
            degree: d,
            depth,
            perms,
            leaves,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaves(&self) -> &[Word] {
        &self.leaves
    }

    /// The word this element is, when it has depth zero.
    pub fn as_word(&self) -> Option<&Word> {
        (self.depth == 0).then(|| &self.leaves[0])
    }

    /// Permutation label at an internal vertex (`|v| < depth`).
    pub fn perm_at(&self, v: &Vertex) -> &[u8] {
        assert!(v.len() < self.depth);
        let idx = level_offset(self.degree, v.len()) + v.level_index();
        &self.perms[idx * self.degree..(idx + 1) * self.degree]
    }

    fn perm_at_index(&self, level: usize, index: usize) -> &[u8] {
        let idx = level_offset(self.degree, level) + index;
        &self.perms[idx * self.degree..(idx + 1) * self.degree]
    }

    pub fn leaf_at(&self, v: &Vertex) -> &Word {
        assert_eq!(v.len(), self.depth);
        &self.leaves[v.level_index()]
    }

    /// The same element with labels pushed down to `depth`.
    pub fn expanded(&self, g: &GroupDef, depth: usize) -> Portrait {
        let mut out = self.clone();
        while out.depth < depth {
            let d = out.degree;
            let mut leaves = Vec::with_capacity(out.leaves.len() * d);
            for w in &out.leaves {
                out.perms.extend(g.root_perm(w));
                for i in 0..d {
                    leaves.push(g.section1(w, i));
                }
            }
            out.leaves = leaves;
            out.depth += 1;
        }
        out
    }

    /// Images of the vertices of each level `0..=depth` (as level indices).
    fn level_images(&self) -> Vec<Vec<usize>> {
        let d = self.degree;
        let mut out = vec![vec![0usize]];
        for level in 0..self.depth {
            let prev = &out[level];
            let mut next = vec![0usize; prev.len() * d];
            for (i, &img) in prev.iter().enumerate() {
                let p = self.perm_at_index(level, i);
                for c in 0..d {
                    next[i * d + c] = img * d + p[c] as usize;
                }
            }
            out.push(next);
        }
        out
    }

    /// Product `self · other`: `self` acts first.
    pub fn mul(&self, g: &GroupDef, other: &Portrait) -> Portrait {
        if self.depth == 0 && other.depth == 0 {
            let w = g.mul(&self.leaves[0], &other.leaves[0]);
            return Portrait {
                degree: self.degree,
                depth: 0,
                perms: Vec::new(),
                leaves: vec![w],
            };
        }
        let depth = self.depth.max(other.depth);
        let x = self.expanded(g, depth);
        let y = other.expanded(g, depth);
        let d = self.degree;
        let imgs = x.level_images();
        let mut perms = Vec::with_capacity(x.perms.len());
        for level in 0..depth {
            for (i, &xi) in imgs[level].iter().enumerate() {
                let px = x.perm_at_index(level, i);
                let py = y.perm_at_index(level, xi);
                perms.extend((0..d).map(|c| py[px[c] as usize]));
            }
        }
        let leaves = imgs[depth]
            .iter()
            .enumerate()
            .map(|(i, &xi)| g.mul(&x.leaves[i], &y.leaves[xi]))
            .collect();
        Portrait {
            degree: d,
            depth,
            perms,
            leaves,
        }
        .simplified()
    }

    pub fn inverse(&self, g: &GroupDef) -> Portrait {
        let d = self.degree;
        let imgs = self.level_images();
        let mut perms = vec![0u8; self.perms.len()];
        for level in 0..self.depth {
            let off = level_offset(d, level);
            for (i, &xi) in imgs[level].iter().enumerate() {
                let p = self.perm_at_index(level, i);
                let slot = &mut perms[(off + xi) * d..(off + xi + 1) * d];
                for c in 0..d {
                    slot[p[c] as usize] = c as u8;
                }
            }
        }
        let mut leaves = vec![Word::empty(); self.leaves.len()];
        for (i, &xi) in imgs[self.depth].iter().enumerate() {
            leaves[xi] = g.inverse(&self.leaves[i]);
        }
        Portrait {
            degree: d,
            depth: self.depth,
            perms,
            leaves,
        }
    }

    /// Drops trailing levels whose labels are all trivial.
    pub fn simplified(mut self) -> Portrait {
        let d = self.degree;
        while self.depth > 0 {
            let level = self.depth - 1;
            let off = level_offset(d, level);
            let count = pow_usize(d, level);
            let perms_ok = (0..count).all(|i| {
                self.perms[(off + i) * d..(off + i + 1) * d]
                    .iter()
                    .enumerate()
                    .all(|(c, &p)| p as usize == c)
            });
            if !perms_ok || self.leaves.iter().any(|w| !w.is_empty()) {
                break;
            }
            self.perms.truncate(off * d);
            self.leaves = vec![Word::empty(); count];
            self.depth -= 1;
        }
        self
    }

    /// Section at `v`.
    pub fn section(&self, g: &GroupDef, v: &Vertex) -> Portrait {
        assert_eq!(v.degree(), self.degree);
        let d = self.degree;
        if v.len() >= self.depth {
            let (head, tail) = v.letters().split_at(self.depth);
            let idx = head.iter().fold(0usize, |acc, &l| acc * d + l as usize);
            let tail = Vertex::new(tail.to_vec(), d).expect("valid suffix");
            return Portrait::from_word(g, &g.section(&self.leaves[idx], &tail));
        }
        let depth = self.depth - v.len();
        let mut perms = Vec::new();
        let base = v.level_index();
        for level in 0..depth {
            let width = pow_usize(d, level);
            for j in 0..width {
                perms.extend_from_slice(self.perm_at_index(v.len() + level, base * width + j));
            }
        }
        let width = pow_usize(d, depth);
        let leaves = self.leaves[base * width..(base + 1) * width].to_vec();
        Portrait {
            degree: d,
            depth,
            perms,
            leaves,
        }
        .simplified()
    }

    pub fn act(&self, g: &GroupDef, v: &Vertex) -> Vertex {
        let d = self.degree;
        let mut letters = v.letters().to_vec();
        let mut index = 0usize;
        for level in 0..self.depth.min(letters.len()) {
            let x = letters[level] as usize;
            letters[level] = self.perm_at_index(level, index)[x];
            index = index * d + x;
        }
        if letters.len() > self.depth {
            let leaf = &self.leaves[index];
            for &l in leaf.letters() {
                g.act_letter_in_place(l, &mut letters[self.depth..]);
            }
        }
        Vertex::new(letters, d).expect("valid image")
    }

    pub fn is_trivial(&self, g: &GroupDef, cap: usize) -> Tri {
        let perms_ok = self
            .perms
            .chunks(self.degree)
            .all(|p| p.iter().enumerate().all(|(c, &x)| x as usize == c));
        if !perms_ok {
            return Tri::False;
        }
        let mut unknown = false;
        for w in &self.leaves {
            match g.is_trivial(w, cap) {
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

    pub fn equal(&self, g: &GroupDef, other: &Portrait, cap: usize) -> Tri {
        self.mul(g, &other.inverse(g)).is_trivial(g, cap)
    }

    /// Permutation induced on level `n`, vertices indexed in shortlex order.
    pub fn level_perm(&self, g: &GroupDef, n: usize) -> Vec<u32> {
        let d = self.degree;
        if n <= self.depth {
            return self.level_images()[n].iter().map(|&x| x as u32).collect();
        }
        let imgs = self.level_images();
        let below = n - self.depth;
        let width = pow_usize(d, below);
        let mut memo = HashMap::new();
        let mut out = vec![0u32; imgs[self.depth].len() * width];
        for (i, &xi) in imgs[self.depth].iter().enumerate() {
            let sub = g.word_level_perm_memo(&self.leaves[i], below, &mut memo);
            for r in 0..width {
                out[i * width + r] = (xi * width) as u32 + sub[r];
            }
        }
        out
    }

    /// A serializable view with rendered labels.
    pub fn view(&self, g: &GroupDef) -> PortraitView {
        let d = self.degree;
        let mut nodes = Vec::new();
        for level in 0..self.depth {
            for i in 0..pow_usize(d, level) {
                let p = self.perm_at_index(level, i);
                nodes.push(NodeView {
                    vertex: Vertex::from_level_index(i, level, d).to_string(),
                    perm: p.iter().map(|&x| x as usize).collect(),
                    word: None,
                });
            }
        }
        for (i, w) in self.leaves.iter().enumerate() {
            nodes.push(NodeView {
                vertex: Vertex::from_level_index(i, self.depth, d).to_string(),
                perm: Vec::new(),
                word: Some(g.render(w)),
            });
        }
        PortraitView {
            degree: d,
            depth: self.depth,
            nodes,
        }
    }

    /// Graphviz rendering: internal vertices show their permutation in
    /// cycle notation (`()` for the identity), leaves show their word.
    pub fn to_dot(&self, g: &GroupDef) -> String {
        let d = self.degree;
        let mut out = String::from("digraph portrait {\n  node [shape=circle, fontsize=10];\n");
        let id = |v: &Vertex| if v.is_root() { "r".to_string() } else { format!("v{v}") };
        for level in 0..=self.depth {
            for i in 0..pow_usize(d, level) {
                let v = Vertex::from_level_index(i, level, d);
                let label = if level < self.depth {
                    let cyc = cycle_string(self.perm_at_index(level, i));
                    if cyc.is_empty() {
                        "()".to_string()
                    } else {
                        cyc
                    }
                } else {
                    g.render(&self.leaves[i])
                };
                let shape = if level < self.depth { "" } else { ", shape=box" };
                let _ = writeln!(out, "  {} [label=\"{}\"{}];", id(&v), label, shape);
                if let Some(p) = v.parent() {
                    let _ = writeln!(
                        out,
                        "  {} -> {} [label=\"{}\"];",
                        id(&p),
                        id(&v),
                        v.letters()[level - 1]
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn cycle_string(perm: &[u8]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for s in 0..perm.len() {
        if seen[s] || perm[s] as usize == s {
            continue;
        }
        let mut cyc = vec![s];
        seen[s] = true;
        let mut x = perm[s] as usize;
        while x != s {
            seen[x] = true;
            cyc.push(x);
            x = perm[x] as usize;
        }
        let _ = write!(
            out,
            "({})",
            cyc.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        );
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeView {
    pub vertex: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub perm: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PortraitView {
    pub degree: usize,
    pub depth: usize,
    pub nodes: Vec<NodeView>,
}

impl GroupDef {
    /// Permutation of level `n` induced by a word.
    pub fn level_perm(&self, w: &Word, n: usize) -> Vec<u32> {
        self.word_level_perm_memo(&self.reduce(w), n, &mut HashMap::new())
    }

    pub(crate) fn word_level_perm_memo(
        &self,
        w: &Word,
        n: usize,
        memo: &mut HashMap<(Word, usize), Vec<u32>>,
    ) -> Vec<u32> {
        let d = self.degree();
        let width = pow_usize(d, n);
        if w.is_empty() || n == 0 {
            return (0..width as u32).collect();
        }
        if let Some(p) = memo.get(&(w.clone(), n)) {
            return p.clone();
        }
        let root = self.root_perm(w);
        let sub_width = width / d;
        let mut out = vec![0u32; width];
        for i in 0..d {
            let sub = self.word_level_perm_memo(&self.section1(w, i), n - 1, memo);
            let base = root[i] as usize * sub_width;
            for r in 0..sub_width {
                out[i * sub_width + r] = (base as u32) + sub[r];
            }
        }
        memo.insert((w.clone(), n), out.clone());
        out
    }
}
