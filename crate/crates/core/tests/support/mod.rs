//! Property suites shared by the `properties` and `acceptance` targets.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use branchlab::goursat::small::by_name;
use branchlab::goursat::{all_subgroups, classify_pair, PairClass, ProductSubgroup};
use branchlab::induction::{block_decomposition, descend, SectionVerdict};
use branchlab::permgrp::{Perm, PermGroup};
use branchlab::subgroups::{realize_block, BlockSpec, Budgets, DiagonalSpec, FgSubgroup, K_GENS};
use branchlab::tree::{Transversal, Vertex};
use branchlab::wreath::{GroupDef, Portrait, Tri, Word};
use num_traits::Zero;
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

const CAP: usize = 100_000;

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed_b4a7),
        failure_persistence: None,
        ..Config::default()
    }
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    TestRunner::new(config(cases))
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn group(which: bool) -> GroupDef {
    if which {
        GroupDef::grigorchuk()
    } else {
        GroupDef::gupta_sidki(3).unwrap()
    }
}

fn word(g: &GroupDef, letters: &[usize]) -> Word {
    let names = g.generator_names();
    let text: Vec<&str> = letters.iter().map(|&i| names[i % names.len()].as_str()).collect();
    g.parse_word(&text.join(" ")).unwrap()
}

fn vertex(g: &GroupDef, letters: &[u8]) -> Vertex {
    Vertex::new(letters.iter().map(|&x| x % g.degree() as u8).collect(), g.degree()).unwrap()
}

pub fn section_laws(cases: u32) -> Result<(), String> {
    run(
        cases,
        (
            any::<bool>(),
            vec(0usize..8, 0..10),
            vec(0usize..8, 0..10),
            vec(0u8..3, 0..4),
        ),
        |(which, u, w, v)| {
            let g = group(which);
            let (x, y, v) = (word(&g, &u), word(&g, &w), vertex(&g, &v));
            let xy = g.mul(&x, &y);
            let xv = g.act(&x, &v);
            prop_assert_eq!(g.act(&xy, &v), g.act(&y, &xv));
            let composed = g.mul(&g.section(&x, &v), &g.section(&y, &xv));
            prop_assert_eq!(g.equal(&g.section(&xy, &v), &composed, CAP), Tri::True);
            let inv = g.section(&g.inverse(&x), &xv);
            prop_assert_eq!(g.equal(&inv, &g.inverse(&g.section(&x, &v)), CAP), Tri::True);
            let n = v.len() + 1;
            let px = Portrait::from_word(&g, &x);
            let py = Portrait::from_word(&g, &y);
            prop_assert_eq!(px.mul(&g, &py).level_perm(&g, n), g.level_perm(&xy, n));
            prop_assert_eq!(px.inverse(&g).mul(&g, &px).is_trivial(&g, CAP), Tri::True);
            Ok(())
        },
    )
}

pub fn tree_invariants(cases: u32) -> Result<(), String> {
    run(cases, (vec(0u8..2, 0..6), 0usize..6), |(v, cut)| {
        let v = Vertex::new(v, 2).unwrap();
        let n = v.len();
        prop_assert_eq!(Vertex::from_level_index(v.level_index(), n, 2), v.clone());
        let t = Transversal::level(cut.min(n), 2);
        let anc = t.ancestor_of(&v).unwrap().clone();
        prop_assert!(anc.is_prefix_of(&v));
        let finer = t.refine(&anc).unwrap();
        prop_assert!(finer.leq(&t).unwrap() || t.leq(&finer).unwrap());
        prop_assert_eq!(finer.len(), t.len() + 1);
        Ok(())
    })
}

const POOL: [&str; 9] = ["b", "aba", "abab", "badabada", "abadabad", "ad", "c", "dabad", "ac"];

fn pool_subgroup(g: &GroupDef, picks: &[usize]) -> FgSubgroup {
    let words: Vec<Word> = picks
        .iter()
        .map(|&i| g.parse_word(POOL[i % POOL.len()]).unwrap())
        .collect();
    FgSubgroup::from_words(g, &words)
}

/// Orbit of the tuple `xs` under the generators, by breadth-first search.
fn tuple_orbit(h: &FgSubgroup, xs: &[Vertex]) -> usize {
    let g = h.group();
    let gens: Vec<Word> = h.words().unwrap();
    let mut seen = HashSet::from([xs.to_vec()]);
    let mut queue = VecDeque::from([xs.to_vec()]);
    while let Some(t) = queue.pop_front() {
        for s in &gens {
            let img: Vec<Vertex> = t.iter().map(|x| g.act(s, x)).collect();
            if seen.insert(img.clone()) {
                queue.push_back(img);
            }
        }
    }
    seen.len()
}

pub fn stabilizer_index(cases: u32) -> Result<(), String> {
    run(
        cases,
        (vec(0usize..9, 1..4), vec(0u8..2, 1..4), vec(0u8..2, 1..4)),
        |(picks, a, b)| {
            let g = GroupDef::grigorchuk();
            let h = pool_subgroup(&g, &picks);
            let (a, b) = (vertex(&g, &a), vertex(&g, &b));
            let xs: Vec<Vertex> = if a.is_prefix_of(&b) || b.is_prefix_of(&a) {
                vec![a]
            } else {
                vec![a, b]
            };
            let budgets = Budgets::default();
            let (stab, index) = h.stab_set_with_index(&xs, &budgets).unwrap();
            prop_assert_eq!(index, tuple_orbit(&h, &xs));
            for s in stab.gens() {
                for x in &xs {
                    prop_assert_eq!(&s.act(&g, x), x);
                }
            }
            let (omega, ph) = h.image_on(&xs, CAP).unwrap();
            let on_omega = |x: &Portrait| {
                Perm::from_images(
                    omega
                        .iter()
                        .map(|v| omega.binary_search(&x.act(&g, v)).unwrap() as u32)
                        .collect(),
                )
                .unwrap()
            };
            let ps = PermGroup::new(omega.len(), stab.gens().iter().map(on_omega).collect()).unwrap();
            prop_assert_eq!(ph.order_usize().unwrap(), index * ps.order_usize().unwrap());
            Ok(())
        },
    )
}

pub fn descent_monotone(cases: u32) -> Result<(), String> {
    run(cases, vec(0usize..9, 1..4), |picks| {
        let g = GroupDef::grigorchuk();
        let h = pool_subgroup(&g, &picks);
        let small = Budgets {
            max_depth: 1,
            max_level: 4,
            ..Budgets::default()
        };
        let large = Budgets {
            max_depth: 3,
            max_level: 5,
            ..Budgets::default()
        };
        let c1 = descend(&h, &small);
        let c2 = descend(&h, &large);
        // stabilizers of different transversals are commensurable
        let nested = c2.transversal.leq(&c1.transversal).unwrap();
        for v in &c1.verdicts {
            let Some(w) = c2.verdict(&v.vertex) else { continue };
            match (&v.verdict, w) {
                (SectionVerdict::Trivial, SectionVerdict::FiniteIndex { .. })
                | (SectionVerdict::FiniteIndex { .. }, SectionVerdict::Trivial) => prop_assert!(false, "kinds differ"),
                (SectionVerdict::FiniteIndex { index: i1, .. }, SectionVerdict::FiniteIndex { index: i2, .. })
                    if nested =>
                {
                    prop_assert!((i2 % i1).is_zero());
                }
                _ => {}
            }
        }
        if c1.is_complete() {
            prop_assert!(c2.is_complete());
        }
        Ok(())
    })
}

/// Orthogonal supports up to depth 3, with a class label per vertex.
fn supports() -> impl Strategy<Value = Vec<(Vertex, usize)>> {
    vec((0u8..3, 0usize..3), 15).prop_map(|choices| {
        let mut out = Vec::new();
        let mut stack = vec![Vertex::root(2)];
        let mut k = 0;
        while let Some(v) = stack.pop() {
            let (choice, class) = choices[k % choices.len()];
            k += 1;
            match (choice, v.len()) {
                (_, 0) | (2, 1..=2) => stack.extend(v.children().collect::<Vec<_>>().into_iter().rev()),
                (1, _) => out.push((v, class)),
                _ => {}
            }
        }
        out.sort();
        out
    })
}

/// A vertex whose subtree is covered by support vertices of two or more
/// classes would have a finite-index section, so descent would stop above
/// the intended support.
fn well_shaped(s: &[(Vertex, usize)]) -> bool {
    if s.is_empty() {
        return false;
    }
    fn covered(v: &Vertex, s: &[(Vertex, usize)]) -> bool {
        s.iter().any(|(w, _)| w == v) || (v.len() < 3 && v.children().all(|c| covered(&c, s)))
    }
    let mut prefixes = BTreeSet::new();
    for (v, _) in s {
        let mut p = v.parent();
        while let Some(q) = p {
            p = q.parent();
            prefixes.insert(q);
        }
    }
    prefixes.iter().all(|p| {
        let classes: BTreeSet<usize> = s.iter().filter(|(v, _)| p.is_prefix_of(v)).map(|(_, c)| *c).collect();
        !covered(p, s) || classes.len() == 1
    })
}

const TWISTS: [&str; 8] = ["e", "a", "b", "c", "d", "ab", "ba", "ada"];

pub fn block_round_trip(cases: u32) -> Result<(), String> {
    run(
        cases,
        (supports().prop_filter("shape", |s| well_shaped(s)), vec(0usize..8, 15)),
        |(s, twists)| {
            let g = GroupDef::grigorchuk();
            let base: Vec<Word> = K_GENS.iter().map(|w| g.parse_word(w).unwrap()).collect();
            let mut classes: Vec<Vec<Vertex>> = Vec::new();
            let mut diagonals = Vec::new();
            for c in 0..3 {
                let members: Vec<Vertex> = s.iter().filter(|(_, k)| *k == c).map(|(v, _)| v.clone()).collect();
                if members.is_empty() {
                    continue;
                }
                let tw = members
                    .iter()
                    .enumerate()
                    .map(|(i, _)| g.parse_word(TWISTS[twists[(i + 5 * c) % twists.len()]]).unwrap())
                    .collect();
                classes.push(members.clone());
                diagonals.push(DiagonalSpec {
                    support: members,
                    base: base.clone(),
                    twists: tw,
                });
            }
            let h = realize_block(&g, &BlockSpec { diagonals }).unwrap();
            let budgets = Budgets::default();
            let bd = block_decomposition(&h, &budgets).unwrap();
            let expected: BTreeSet<Vec<Vertex>> = classes.into_iter().collect();
            let found: BTreeSet<Vec<Vertex>> = bd.classes.iter().map(|c| c.vertices.clone()).collect();
            prop_assert_eq!(found, expected);
            prop_assert!(bd.conflicts.is_empty());
            for class in &bd.classes {
                let first = &class.vertices[0];
                for t in &class.twists {
                    let c = g.parse_word(t.conjugator.as_ref().unwrap()).unwrap();
                    for x in h.gens() {
                        let lhs = x.section(&g, &t.vertex);
                        let rhs = Portrait::from_word(&g, &g.inverse(&c))
                            .mul(&g, &x.section(&g, first))
                            .mul(&g, &Portrait::from_word(&g, &c));
                        prop_assert_eq!(lhs.equal(&g, &rhs, CAP), Tri::True);
                    }
                }
            }
            Ok(())
        },
    )
}

const SMALL: [&str; 8] = ["C2", "C3", "C4", "V4", "S3", "C6", "D4", "A4"];

fn random_elem(g: &PermGroup, seed: &[usize]) -> Perm {
    let mut p = Perm::identity(g.degree());
    for &i in seed {
        p = p.mul(&g.gens()[i % g.gens().len()]);
    }
    p
}

pub fn dependence_transitive(cases: u32) -> Result<(), String> {
    run(
        cases,
        (0usize..8, vec(vec(vec(0usize..4, 0..6), 3), 1..4)),
        |(gi, tuples)| {
            let g = by_name(SMALL[gi]).unwrap();
            let gens: Vec<Vec<Perm>> = tuples
                .iter()
                .map(|t| t.iter().map(|s| random_elem(&g, s)).collect())
                .collect();
            let h = ProductSubgroup::new(vec![g.clone(), g.clone(), g.clone()], gens).unwrap();
            let graph = |i, j| matches!(classify_pair(&h, i, j), PairClass::Graph { .. });
            for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 0, 2)] {
                if graph(i, j) && graph(j, k) {
                    prop_assert!(graph(i, k));
                }
            }
            Ok(())
        },
    )
}

pub fn finite_index_closure(cases: u32) -> Result<(), String> {
    run(
        cases,
        (0usize..8, 0usize..8, vec(vec(vec(0usize..4, 0..6), 2), 1..4)),
        |(gi, gj, pairs)| {
            let (g1, g2) = (by_name(SMALL[gi]).unwrap(), by_name(SMALL[gj]).unwrap());
            let gens: Vec<Vec<Perm>> = pairs
                .iter()
                .map(|p| vec![random_elem(&g1, &p[0]), random_elem(&g2, &p[1])])
                .collect();
            let h = ProductSubgroup::new(vec![g1.clone(), g2.clone()], gens).unwrap();
            let class = classify_pair(&h, 0, 1);
            let d1 = g1.degree() as u32;
            let left: Vec<u32> = (0..d1).collect();
            let right: Vec<u32> = (d1..d1 + g2.degree() as u32).collect();
            let ho = h.order();
            for sub in all_subgroups(&h.as_perm_group(), CAP).unwrap() {
                let index = ho / sub.len();
                if index > 3 {
                    continue;
                }
                let tuples = sub
                    .iter()
                    .map(|p| vec![p.restrict(&left), p.restrict(&right)])
                    .collect();
                let k = ProductSubgroup::new(vec![g1.clone(), g2.clone()], tuples).unwrap();
                match class {
                    PairClass::Graph { .. } => {
                        let is_graph = matches!(classify_pair(&k, 0, 1), PairClass::Graph { .. });
                        prop_assert!(is_graph);
                    }
                    PairClass::Full { .. } => {
                        for c in 0..2 {
                            let proj = h.component(c).order_usize().unwrap();
                            let ker = k.coordinate_kernel_order(c, CAP).unwrap();
                            prop_assert!(proj / ker <= index);
                        }
                    }
                    PairClass::Mixed { .. } => {}
                }
            }
            Ok(())
        },
    )
}
