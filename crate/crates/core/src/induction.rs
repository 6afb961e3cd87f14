//! Transversal certificates by descent, their level form, finiteness
//! verdicts, dependence of sections and block decompositions.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::permgrp::{Perm, PermGroup};
use crate::subgroups::{render_element, ser_big, ser_big_vec, Budgets, FgSubgroup, FiniteIndexVerdict};
use crate::tree::{pow_usize, Transversal, Vertex};
use crate::wreath::{GroupDef, Portrait, Tri, Word};

/// Verdict on one section `φ_v(Stab_H(X))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SectionVerdict {
    Trivial,
    FiniteIndex {
        #[serde(serialize_with = "ser_big")]
        index: BigUint,
        level: usize,
    },
    Unknown {
        #[serde(serialize_with = "ser_big_vec")]
        quotient_indices: Vec<BigUint>,
    },
}

impl SectionVerdict {
    pub fn is_unknown(&self) -> bool {
        matches!(self, SectionVerdict::Unknown { .. })
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, SectionVerdict::Trivial)
    }

    fn same_kind(&self, other: &SectionVerdict) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

/// Decides a section subgroup: trivial, certified finite index, or unknown.
pub fn section_verdict(sec: &FgSubgroup, budgets: &Budgets) -> SectionVerdict {
    if sec.is_trivial_subgroup(budgets.closure_cap) == Tri::True {
        return SectionVerdict::Trivial;
    }
    match sec.finite_index_verdict(budgets) {
        FiniteIndexVerdict::Certified { index, level } => SectionVerdict::FiniteIndex { index, level },
        FiniteIndexVerdict::Unknown { quotient_indices } => SectionVerdict::Unknown { quotient_indices },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexVerdict {
    pub vertex: Vertex,
    #[serde(flatten)]
    pub verdict: SectionVerdict,
    pub section_generators: Vec<String>,
}

/// Output of the descent: a transversal with a verdict on every section
/// of the pointwise stabilizer.
#[derive(Clone, Debug, Serialize)]
pub struct TransversalCertificate {
    pub transversal: Transversal,
    #[serde(skip)]
    pub stabilizer: FgSubgroup,
    pub stabilizer_generators: Vec<String>,
    /// `[H : Stab_H(X)]`.
    pub stab_index: usize,
    pub verdicts: Vec<VertexVerdict>,
    pub rounds: usize,
    pub budgets: Budgets,
}

impl TransversalCertificate {
    pub fn is_complete(&self) -> bool {
        self.verdicts.iter().all(|v| !v.verdict.is_unknown())
    }

    pub fn verdict(&self, v: &Vertex) -> Option<&SectionVerdict> {
        self.verdicts.iter().find(|x| x.vertex == *v).map(|x| &x.verdict)
    }

    /// Vertices whose verdict is not `Trivial`, in shortlex order.
    pub fn support(&self) -> Vec<Vertex> {
        self.verdicts
            .iter()
            .filter(|v| !v.verdict.is_trivial())
            .map(|v| v.vertex.clone())
            .collect()
    }
}

fn evaluate_round(
    h: &FgSubgroup,
    x: &Transversal,
    budgets: &Budgets,
    memo: &mut HashMap<Vec<Portrait>, SectionVerdict>,
) -> Result<(FgSubgroup, usize, Vec<VertexVerdict>)> {
    let xs: Vec<Vertex> = x.vertices().cloned().collect();
    let (stab, index) = h.stab_set_with_index(&xs, budgets)?;
    let mut verdicts = Vec::new();
    for v in &xs {
        let sec = stab.section_subgroup(v)?.pruned(budgets.closure_cap);
        let key = sec.gens().to_vec();
        let verdict = match memo.get(&key) {
            Some(vd) => vd.clone(),
            None => {
                let vd = section_verdict(&sec, budgets);
                memo.insert(key, vd.clone());
                vd
            }
        };
        verdicts.push(VertexVerdict {
            vertex: v.clone(),
            verdict,
            section_generators: sec.render_gens(),
        });
    }
    Ok((stab, index, verdicts))
}

/// Breadth-first descent: all uncertified vertices are refined together
/// until everything is certified or `max_depth` is reached.
pub fn descend(h: &FgSubgroup, budgets: &Budgets) -> TransversalCertificate {
    let d = h.group().degree();
    let mut memo = HashMap::new();
    let mut x = Transversal::root(d);
    let mut rounds = 0;
    let mut last: Option<(Transversal, FgSubgroup, usize, Vec<VertexVerdict>)> = None;
    loop {
        rounds += 1;
        let (stab, index, verdicts) = match evaluate_round(h, &x, budgets, &mut memo) {
            Ok(r) => r,
            Err(_) => break,
        };
        let refinable: Vec<Vertex> = verdicts
            .iter()
            .filter(|v| v.verdict.is_unknown() && v.vertex.len() < budgets.max_depth)
            .map(|v| v.vertex.clone())
            .collect();
        last = Some((x.clone(), stab, index, verdicts));
        if refinable.is_empty() {
            break;
        }
        for v in &refinable {
            x = x.refine(v).expect("vertex is in the transversal");
        }
    }
    let (transversal, stabilizer, stab_index, verdicts) = last.unwrap_or_else(|| {
        let root = Transversal::root(d);
        let unknown = VertexVerdict {
            vertex: Vertex::root(d),
            verdict: SectionVerdict::Unknown {
                quotient_indices: Vec::new(),
            },
            section_generators: h.render_gens(),
        };
        (root, h.clone(), 1, vec![unknown])
    });
    TransversalCertificate {
        transversal,
        stabilizer_generators: stabilizer.render_gens(),
        stabilizer,
        stab_index,
        verdicts,
        rounds,
        budgets: budgets.clone(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelVerdict {
    pub vertex: Vertex,
    /// Transversal vertex the verdict is inherited from.
    pub from: Vertex,
    #[serde(flatten)]
    pub verdict: SectionVerdict,
}

/// Certificate in level form: verdicts on all sections of `Stab_H(ℓ_n)`.
#[derive(Clone, Debug, Serialize)]
pub struct LevelForm {
    pub level: usize,
    pub verdicts: Vec<LevelVerdict>,
    /// Every re-certified verdict has the kind inherited from the transversal.
    pub consistent: bool,
}

/// Pushes a complete certificate down to the level of its deepest vertex
/// and re-certifies every level section directly.
pub fn to_level_form(h: &FgSubgroup, cert: &TransversalCertificate) -> Result<LevelForm> {
    if !cert.is_complete() {
        return Err(Error::Uncertified);
    }
    let budgets = &cert.budgets;
    let n = cert.transversal.depth();
    let stab = h.stab_level(n, budgets)?;
    let mut verdicts = Vec::new();
    let mut consistent = true;
    let mut memo: HashMap<Vec<Portrait>, SectionVerdict> = HashMap::new();
    for v in Vertex::level(n, h.group().degree()) {
        let from = cert
            .transversal
            .ancestor_of(&v)
            .expect("transversal covers the level")
            .clone();
        let inherited = cert.verdict(&from).expect("vertex has a verdict");
        let sec = stab.section_subgroup(&v)?.pruned(budgets.closure_cap);
        let verdict = memo
            .entry(sec.gens().to_vec())
            .or_insert_with(|| section_verdict(&sec, budgets))
            .clone();
        consistent &= verdict.same_kind(inherited);
        verdicts.push(LevelVerdict {
            vertex: v,
            from,
            verdict,
        });
    }
    Ok(LevelForm {
        level: n,
        verdicts,
        consistent,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Finiteness {
    Finite {
        #[serde(serialize_with = "ser_big")]
        order: BigUint,
    },
    Infinite,
    Unknown,
}

/// Finite iff the descent ends with only trivial sections; the order is then
/// the order of the action on the orbit closure of the transversal.
pub fn is_finite_verdict(h: &FgSubgroup, budgets: &Budgets) -> (Finiteness, TransversalCertificate) {
    let cert = descend(h, budgets);
    let verdict = if cert
        .verdicts
        .iter()
        .any(|v| matches!(v.verdict, SectionVerdict::FiniteIndex { .. }))
    {
        Finiteness::Infinite
    } else if cert.verdicts.iter().all(|v| v.verdict.is_trivial()) {
        let xs: Vec<Vertex> = cert.transversal.vertices().cloned().collect();
        match h.image_on(&xs, budgets.max_cosets) {
            Ok((_, image)) => Finiteness::Finite { order: image.order() },
            Err(_) => Finiteness::Unknown,
        }
    } else {
        Finiteness::Unknown
    };
    (verdict, cert)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Dependence {
    /// The pair image is the graph of a bijection at every level up to `depth`.
    Dependent {
        depth: usize,
    },
    /// `witness` has a non-trivial section at `nontrivial_at` and a trivial
    /// one at `trivial_at`.
    Independent {
        witness: String,
        nontrivial_at: Vertex,
        trivial_at: Vertex,
    },
    Unknown,
}

fn perm_of(p: &Portrait, g: &GroupDef, level: usize) -> Perm {
    Perm::from_images(p.level_perm(g, level)).expect("level action is a bijection")
}

/// Candidate independence witnesses: generators, their commutators, then
/// products of up to `len` generators.
fn witness_candidates(g: &GroupDef, gens: &[Portrait], len: usize) -> Vec<Portrait> {
    let mut out: Vec<Portrait> = gens.to_vec();
    let invs: Vec<Portrait> = gens.iter().map(|x| x.inverse(g)).collect();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            out.push(invs[i].mul(g, &invs[j]).mul(g, &gens[i]).mul(g, &gens[j]));
        }
    }
    let letters: Vec<&Portrait> = gens.iter().chain(invs.iter()).collect();
    let mut layer: Vec<Portrait> = letters.iter().map(|x| (*x).clone()).collect();
    for _ in 1..len {
        let mut next = Vec::new();
        for x in &layer {
            for y in &letters {
                next.push(x.mul(g, y));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Classifies the pair `(u, v)`. Both vertices must lie at or below
/// support vertices of the certificate; vertices strictly below the
/// transversal are first added to the stabilized set.
pub fn dependence_classify(cert: &TransversalCertificate, u: &Vertex, v: &Vertex, depth: usize) -> Result<Dependence> {
    let support = cert.support();
    for x in [u, v] {
        if !support.iter().any(|s| s.is_prefix_of(x)) {
            return Err(Error::NotInSupport(x.to_string()));
        }
    }
    if u == v {
        return Ok(Dependence::Dependent { depth });
    }
    let deeper: Vec<Vertex> = [u, v]
        .into_iter()
        .filter(|x| !cert.transversal.contains(x))
        .cloned()
        .collect();
    let stab = if deeper.is_empty() {
        cert.stabilizer.clone()
    } else {
        cert.stabilizer.stab_set(&deeper, &cert.budgets)?
    };
    let g = stab.group();
    let cap = cert.budgets.closure_cap;
    for w in witness_candidates(g, stab.gens(), cert.budgets.witness_len) {
        let su = w.section(g, u).is_trivial(g, cap);
        let sv = w.section(g, v).is_trivial(g, cap);
        let found = match (su, sv) {
            (Tri::False, Tri::True) => Some((u, v)),
            (Tri::True, Tri::False) => Some((v, u)),
            _ => None,
        };
        if let Some((a, b)) = found {
            return Ok(Dependence::Independent {
                witness: render_element(g, &w),
                nontrivial_at: a.clone(),
                trivial_at: b.clone(),
            });
        }
    }
    if pair_is_graph(&stab, u, v, depth) {
        return Ok(Dependence::Dependent { depth });
    }
    Ok(Dependence::Unknown)
}

/// `|pair image| = |proj_u| = |proj_v|` in every quotient up to `depth`.
fn pair_is_graph(stab: &FgSubgroup, u: &Vertex, v: &Vertex, depth: usize) -> bool {
    let g = stab.group();
    let su: Vec<Portrait> = stab.gens().iter().map(|h| h.section(g, u)).collect();
    let sv: Vec<Portrait> = stab.gens().iter().map(|h| h.section(g, v)).collect();
    for level in 1..=depth {
        let width = pow_usize(g.degree(), level);
        let pu: Vec<Perm> = su.iter().map(|x| perm_of(x, g, level)).collect();
        let pv: Vec<Perm> = sv.iter().map(|x| perm_of(x, g, level)).collect();
        let pair: Vec<Perm> = pu
            .iter()
            .zip(&pv)
            .map(|(a, b)| {
                let mut img: Vec<u32> = a.images().to_vec();
                img.extend(b.images().iter().map(|&x| x + width as u32));
                Perm::from_images(img).unwrap()
            })
            .collect();
        let ou = PermGroup::new(width, pu).unwrap().order();
        let ov = PermGroup::new(width, pv).unwrap().order();
        let op = PermGroup::new(2 * width, pair).unwrap().order();
        if op != ou || op != ov {
            return false;
        }
    }
    true
}

/// Conjugator `c` of a dependent vertex relative to the first vertex of
/// its class: `φ_v(h) = c^-1 φ_u(h) c` for every stabilizer generator.
#[derive(Clone, Debug, Serialize)]
pub struct Twist {
    pub vertex: Vertex,
    pub conjugator: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockClass {
    pub vertices: Vec<Vertex>,
    pub twists: Vec<Twist>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairWitness {
    pub u: Vertex,
    pub v: Vertex,
    #[serde(flatten)]
    pub dependence: Dependence,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockDecomposition {
    pub transversal: Transversal,
    pub support: Vec<Vertex>,
    pub classes: Vec<BlockClass>,
    pub pairs: Vec<PairWitness>,
    /// Pairs placed in one class by transitivity but not found dependent.
    pub conflicts: Vec<(Vertex, Vertex)>,
    pub stab_index: usize,
    pub budgets: Budgets,
}

/// Searches reduced ambient words up to `max_len` for a conjugator taking
/// the sections at `u` to those at `v`.
fn find_conjugator(stab: &FgSubgroup, u: &Vertex, v: &Vertex, budgets: &Budgets) -> Option<Word> {
    let g = stab.group();
    let cap = budgets.closure_cap;
    let su: Vec<Portrait> = stab.gens().iter().map(|h| h.section(g, u)).collect();
    let sv: Vec<Portrait> = stab.gens().iter().map(|h| h.section(g, v)).collect();
    let level = budgets.max_level.min(8);
    let pu: Vec<Perm> = su.iter().map(|x| perm_of(x, g, level)).collect();
    let pv: Vec<Perm> = sv.iter().map(|x| perm_of(x, g, level)).collect();
    let gens = g.generators();
    let mut seen: HashMap<Perm, Vec<Word>> = HashMap::new();
    let mut frontier = vec![Word::empty()];
    let mut count = 0;
    for _ in 0..=budgets.max_search_len {
        let mut next = Vec::new();
        for c in &frontier {
            let pc = g.level_image(c, level);
            let ok_sig = pu.iter().zip(&pv).all(|(a, b)| a.conj(&pc) == *b);
            if ok_sig {
                let pc_port = Portrait::from_word(g, c);
                let ci = pc_port.inverse(g);
                let exact = su
                    .iter()
                    .zip(&sv)
                    .all(|(a, b)| ci.mul(g, a).mul(g, &pc_port).equal(g, b, cap) == Tri::True);
                if exact {
                    return Some(c.clone());
                }
            }
            for x in &gens {
                for cand in [g.mul(c, x), g.mul(c, &g.inverse(x))] {
                    if cand.len() <= c.len() {
                        continue;
                    }
                    let p = g.level_image(&cand, level);
                    let bucket = seen.entry(p).or_default();
                    if bucket.iter().any(|w| g.equal(w, &cand, cap) == Tri::True) {
                        continue;
                    }
                    bucket.push(cand.clone());
                    count += 1;
                    next.push(cand);
                }
            }
            if count > budgets.max_ball {
                return None;
            }
        }
        frontier = next;
    }
    None
}

pub fn block_decomposition(h: &FgSubgroup, budgets: &Budgets) -> Result<BlockDecomposition> {
    let cert = descend(h, budgets);
    block_decomposition_of(&cert)
}

/// Partitions the support of a complete certificate into dependence classes.
pub fn block_decomposition_of(cert: &TransversalCertificate) -> Result<BlockDecomposition> {
    if !cert.is_complete() {
        return Err(Error::Uncertified);
    }
    let budgets = &cert.budgets;
    let support = cert.support();
    let n = support.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut pairs = Vec::new();
    let mut dep: BTreeMap<(usize, usize), bool> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = dependence_classify(cert, &support[i], &support[j], budgets.dependence_depth)?;
            let is_dep = matches!(d, Dependence::Dependent { .. });
            dep.insert((i, j), is_dep);
            if is_dep {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
            pairs.push(PairWitness {
                u: support[i].clone(),
                v: support[j].clone(),
                dependence: d,
            });
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut conflicts = Vec::new();
    let mut classes = Vec::new();
    let g = cert.stabilizer.group();
    for members in groups.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                if !dep[&(i, j)] {
                    conflicts.push((support[i].clone(), support[j].clone()));
                }
            }
        }
        let first = &support[members[0]];
        let twists = members
            .iter()
            .map(|&i| {
                let v = &support[i];
                let conjugator = if i == members[0] {
                    Some("e".to_string())
                } else {
                    find_conjugator(&cert.stabilizer, first, v, budgets).map(|c| g.render(&c))
                };
                Twist {
                    vertex: v.clone(),
                    conjugator,
                }
            })
            .collect();
        classes.push(BlockClass {
            vertices: members.iter().map(|&i| support[i].clone()).collect(),
            twists,
        });
    }
    Ok(BlockDecomposition {
        transversal: cert.transversal.clone(),
        support,
        classes,
        pairs,
        conflicts,
        stab_index: cert.stab_index,
        budgets: budgets.clone(),
    })
}

/// Cross-check of the three characterisations: a transversal certificate,
/// its level form, and a block decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub transversal_certificate: bool,
    pub level_form: Option<usize>,
    pub block_decomposition: bool,
    /// All three present, or all three absent.
    pub consistent: bool,
    /// `[H : Stab_H(X)]`, the index of the block subgroup found.
    pub stab_index: usize,
    pub certificate: TransversalCertificate,
}

pub fn verify_theorem_equivalence(h: &FgSubgroup, budgets: &Budgets) -> EquivalenceReport {
    let cert = descend(h, budgets);
    let complete = cert.is_complete();
    let level = to_level_form(h, &cert).ok().filter(|l| l.consistent).map(|l| l.level);
    let blocks = block_decomposition_of(&cert).is_ok_and(|b| b.conflicts.is_empty());
    let consistent = (complete && level.is_some() && blocks) || (!complete && level.is_none() && !blocks);
    EquivalenceReport {
        transversal_certificate: complete,
        level_form: level,
        block_decomposition: blocks,
        consistent,
        stab_index: cert.stab_index,
        certificate: cert,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroups::{realize_block, BlockSpec, K_GENS};

    fn g() -> GroupDef {
        GroupDef::grigorchuk()
    }

    fn sub(g: &GroupDef, ws: &[&str]) -> FgSubgroup {
        FgSubgroup::from_words(g, &ws.iter().map(|s| g.parse_word(s).unwrap()).collect::<Vec<_>>())
    }

    fn v(s: &str) -> Vertex {
        Vertex::parse(s, 2).unwrap()
    }

    #[test]
    fn trivial_and_whole() {
        let g = g();
        let b = Budgets::default();
        let c = descend(&FgSubgroup::trivial(&g), &b);
        assert_eq!(c.transversal, Transversal::root(2));
        assert_eq!(c.verdicts[0].verdict, SectionVerdict::Trivial);
        let c = descend(&FgSubgroup::whole(&g), &b);
        assert_eq!(c.transversal, Transversal::root(2));
        assert!(
            matches!(&c.verdicts[0].verdict, SectionVerdict::FiniteIndex { index, .. } if *index == BigUint::from(1u32))
        );
        assert_eq!(to_level_form(&FgSubgroup::whole(&g), &c).unwrap().level, 0);
    }

    #[test]
    fn finiteness() {
        let g = g();
        let b = Budgets::default();
        assert_eq!(
            is_finite_verdict(&sub(&g, &["b"]), &b).0,
            Finiteness::Finite { order: 2u32.into() }
        );
        assert_eq!(
            is_finite_verdict(&sub(&g, &["ad"]), &b).0,
            Finiteness::Finite { order: 4u32.into() }
        );
        assert_eq!(is_finite_verdict(&sub(&g, K_GENS), &b).0, Finiteness::Infinite);
    }

    #[test]
    fn product_of_two_k_copies() {
        let g = g();
        let text = r#"{ "diagonals": [
            { "support": ["0"], "base": ["abab", "badabada", "abadabad"] },
            { "support": ["1"], "base": ["abab", "badabada", "abadabad"] } ] }"#;
        let h = realize_block(&g, &BlockSpec::parse_json(&g, text).unwrap()).unwrap();
        let b = Budgets::default();
        let cert = descend(&h, &b);
        assert!(
            matches!(&cert.verdicts[0].verdict, SectionVerdict::FiniteIndex { index, .. } if *index == BigUint::from(64u32))
        );
        let d = dependence_classify(&cert, &v("0"), &v("1"), 3).unwrap();
        assert!(matches!(d, Dependence::Independent { .. }), "{d:?}");
    }
}
