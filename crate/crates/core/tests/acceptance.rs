//! End-to-end acceptance checks, one line per criterion.

mod support;

use std::collections::HashSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use branchlab::goursat::small::{by_name, cyclic, dihedral};
use branchlab::goursat::{
    brute_subdirect, classify_pair, fibre_product, goursat_decompose, sum_zero, FiniteHom, PairClass, DEFAULT_CAP,
};
use branchlab::induction::{
    block_decomposition_of, dependence_classify, descend, is_finite_verdict, Dependence, Finiteness, SectionVerdict,
};
use branchlab::permgrp::{Perm, PermGroup};
use branchlab::subgroups::{
    normal_closure_gens, realize_block, BlockSpec, Budgets, FgSubgroup, FiniteIndexVerdict, B_GENS, K_GENS,
};
use branchlab::tree::Vertex;
use branchlab::wreath::{GroupDef, Portrait, Tri, Word};
use num_bigint::BigUint;

const CAP: usize = 100_000;

fn words(g: &GroupDef, ws: &[&str]) -> Vec<Word> {
    ws.iter().map(|w| g.parse_word(w).unwrap()).collect()
}

fn vx(s: &str) -> Vertex {
    Vertex::parse(s, 2).unwrap()
}

fn fi(index: u32) -> impl Fn(&SectionVerdict) -> bool {
    move |v| matches!(v, SectionVerdict::FiniteIndex { index: i, .. } if *i == BigUint::from(index))
}

fn index_of_k() -> String {
    let g = GroupDef::grigorchuk();
    let k = FgSubgroup::from_words(&g, &words(&g, K_GENS));
    let t = Instant::now();
    let v = k.finite_index_verdict(&Budgets::default());
    let elapsed = t.elapsed();
    assert!(matches!(&v, FiniteIndexVerdict::Certified { index, .. } if *index == BigUint::from(16u32)));
    assert!(elapsed < Duration::from_secs(60));
    format!("Certified(16) in {elapsed:.2?}")
}

fn index_chain_of_b() -> String {
    let g = GroupDef::grigorchuk();
    let budgets = Budgets::default();
    let nc = normal_closure_gens(&g, &g.parse_word("b").unwrap(), &budgets);
    assert_eq!(nc.certified_index, Some(BigUint::from(8u32)));
    let b = FgSubgroup::from_words(&g, &words(&g, B_GENS));
    let k = FgSubgroup::from_words(&g, &words(&g, K_GENS));
    let level = match k.finite_index_verdict(&budgets) {
        FiniteIndexVerdict::Certified { level, .. } => level,
        other => panic!("{other:?}"),
    };
    let (ik, ib) = (k.index_in_quotient(level).unwrap(), b.index_in_quotient(level).unwrap());
    assert_eq!((ik.clone(), ib.clone()), (BigUint::from(16u32), BigUint::from(8u32)));
    assert_eq!(ik / ib, BigUint::from(2u32));
    "[G:B] = 8, [B:K] = 16/8 = 2".into()
}

fn index_two_count() -> String {
    let g = GroupDef::grigorchuk();
    for n in [3, 4] {
        assert_eq!(g.quotient(n).index2_count(), BigUint::from(7u32));
    }
    "7 at n = 3, 4".into()
}

fn word_problem() -> String {
    let g = GroupDef::grigorchuk();
    let g3 = GroupDef::gupta_sidki(3).unwrap();
    let t = Instant::now();
    let w = |g: &GroupDef, s: &str| g.parse_word(s).unwrap();
    for s in ["aa", "bb", "cc", "dd", "bcd", "(ad)^4", "(ab)^16"] {
        assert_eq!(g.is_trivial(&w(&g, s), CAP), Tri::True, "{s}");
    }
    for s in ["aaa", "bbb"] {
        assert_eq!(g3.is_trivial(&w(&g3, s), CAP), Tri::True, "{s}");
    }
    for s in ["ab", "ad", "(ab)^8"] {
        assert_eq!(g.is_trivial(&w(&g, s), CAP), Tri::False, "{s}");
    }
    let elapsed = t.elapsed();
    assert!(elapsed < Duration::from_secs(1));
    format!("12 exact answers in {elapsed:.2?}")
}

fn key_computation() -> String {
    let g = GroupDef::grigorchuk();
    let w = |s: &str| g.parse_word(s).unwrap();
    let c = w("c");
    assert_eq!(g.equal(&g.section(&c, &vx("0")), &w("a"), CAP), Tri::True);
    assert_eq!(g.equal(&g.section(&c, &vx("1")), &w("d"), CAP), Tri::True);
    let t = Portrait::placed(&g, &w("a"), &vx("0")).mul(&g, &Portrait::placed(&g, &w("a"), &vx("1")));
    let ct = Portrait::from_word(&g, &c).mul(&g, &t);
    assert_eq!(ct.section(&g, &vx("0")).is_trivial(&g, CAP), Tri::True);
    let da = Portrait::from_word(&g, &w("da"));
    assert_eq!(ct.section(&g, &vx("1")).equal(&g, &da, CAP), Tri::True);
    "c = (a, d); c(a, a) = (1, da)".into()
}

const FIG1: &str = r#"{"diagonals": [
  {"support": ["1"], "base": ["b", "aba", "dabad", "adabada"]},
  {"support": ["000", "001"], "base": ["abab", "badabada", "abadabad"], "twists": ["e", "a"]}
]}"#;

const FIG2: &str = r#"{"diagonals": [
  {"support": ["000", "01", "10"], "base": ["abab", "badabada", "abadabad"], "twists": ["a", "b", "c"]}
]}"#;

fn figure_one() -> String {
    let g = GroupDef::grigorchuk();
    let t = Instant::now();
    let h = realize_block(&g, &BlockSpec::parse_json(&g, FIG1).unwrap()).unwrap();
    let cert = descend(&h, &Budgets::default());
    let got: HashSet<String> = cert.transversal.vertices().map(|v| v.to_string()).collect();
    assert_eq!(got, ["1", "000", "001", "01"].map(String::from).into());
    assert!(fi(8)(cert.verdict(&vx("1")).unwrap()));
    assert!(fi(16)(cert.verdict(&vx("000")).unwrap()));
    assert!(fi(16)(cert.verdict(&vx("001")).unwrap()));
    assert_eq!(cert.verdict(&vx("01")), Some(&SectionVerdict::Trivial));
    let bd = block_decomposition_of(&cert).unwrap();
    let classes: Vec<Vec<String>> = bd
        .classes
        .iter()
        .map(|c| c.vertices.iter().map(|v| v.to_string()).collect())
        .collect();
    assert_eq!(classes, vec![vec!["1".to_string()], vec!["000".into(), "001".into()]]);
    let twist = &bd.classes[1].twists[1];
    assert_eq!(twist.vertex, vx("001"));
    let conj = g.parse_word(twist.conjugator.as_deref().unwrap()).unwrap();
    assert_eq!(g.equal(&conj, &g.parse_word("a").unwrap(), CAP), Tri::True);
    let elapsed = t.elapsed();
    assert!(elapsed < Duration::from_secs(300));
    format!(
        "transversal {}, classes {{1}} {{000,001}}, 001 twisted by a, in {elapsed:.2?}",
        cert.transversal
    )
}

fn figure_two() -> String {
    let g = GroupDef::grigorchuk();
    let h = realize_block(&g, &BlockSpec::parse_json(&g, FIG2).unwrap()).unwrap();
    let cert = descend(&h, &Budgets::default());
    let support = ["000", "01", "10"].map(vx);
    assert_eq!(cert.support(), {
        let mut s = support.to_vec();
        s.sort();
        s
    });
    for v in cert.transversal.vertices() {
        if !support.contains(v) {
            assert_eq!(cert.verdict(v), Some(&SectionVerdict::Trivial));
        }
    }
    for i in 0..3 {
        for j in i + 1..3 {
            for m in 1..=4 {
                let d = dependence_classify(&cert, &support[i], &support[j], m).unwrap();
                assert_eq!(d, Dependence::Dependent { depth: m });
            }
        }
    }
    format!(
        "transversal {}, all pairs of 000, 01, 10 dependent up to depth 4",
        cert.transversal
    )
}

fn finiteness() -> String {
    let g = GroupDef::grigorchuk();
    let budgets = Budgets::default();
    let verdict = |ws: &[&str]| is_finite_verdict(&FgSubgroup::from_words(&g, &words(&g, ws)), &budgets).0;
    assert_eq!(
        verdict(&["b"]),
        Finiteness::Finite {
            order: BigUint::from(2u32)
        }
    );
    assert_eq!(
        verdict(&["ad"]),
        Finiteness::Finite {
            order: BigUint::from(4u32)
        }
    );
    assert_eq!(verdict(K_GENS), Finiteness::Infinite);
    "<b> finite of order 2, <ad> of order 4, K infinite".into()
}

fn goursat() -> String {
    let roster: Vec<PermGroup> = ["1", "C2", "C3", "C4", "V4", "S3", "C6", "D4", "Q8", "A4", "D6", "S4"]
        .iter()
        .map(|n| by_name(n).unwrap())
        .collect();
    let mut total = 0;
    for (i, g1) in roster.iter().enumerate() {
        for g2 in &roster[i..] {
            for h in brute_subdirect(g1, g2, DEFAULT_CAP).unwrap() {
                let d = goursat_decompose(&h, DEFAULT_CAP).unwrap();
                assert!(fibre_product(&d.f1, &d.f2, DEFAULT_CAP).unwrap().same_as(&h));
                total += 1;
            }
        }
    }
    // D4 modulo its rotations and modulo a Klein four-group
    let d4 = dihedral(4);
    let z2 = cyclic(2);
    let (one, id2) = (z2.gens()[0].clone(), Perm::identity(2));
    let f1 = FiniteHom::new(d4.clone(), z2.clone(), vec![id2.clone(), one.clone()], DEFAULT_CAP).unwrap();
    let f2 = FiniteHom::new(d4.clone(), z2, vec![one, id2], DEFAULT_CAP).unwrap();
    let p = fibre_product(&f1, &f2, DEFAULT_CAP).unwrap();
    assert_eq!(p.order(), 32);
    let (r, s, id4) = (d4.gens()[0].clone(), d4.gens()[1].clone(), Perm::identity(4));
    assert!(p.contains(&[r.clone(), id4.clone()]));
    assert!(p.contains(&[id4.clone(), r.pow(2)]) && p.contains(&[id4, s]));
    assert!(matches!(classify_pair(&p, 0, 1), PairClass::Mixed { .. }));
    let h = sum_zero(5, 3).unwrap();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        assert_eq!(classify_pair(&h, i, j), PairClass::Full { order: 25 });
    }
    for c in 0..3 {
        assert_eq!(h.coordinate_kernel_order(c, DEFAULT_CAP).unwrap(), 1);
    }
    format!("{total} subdirect subgroups round-trip; D4 fibre product of order 32; sum-zero pairs full")
}

fn properties() -> String {
    let suites: [(&str, fn(u32) -> Result<(), String>); 7] = [
        ("section laws", support::section_laws),
        ("tree invariants", support::tree_invariants),
        ("stabilizer index", support::stabilizer_index),
        ("descent monotone", support::descent_monotone),
        ("block round trip", support::block_round_trip),
        ("dependence transitive", support::dependence_transitive),
        ("finite-index closure", support::finite_index_closure),
    ];
    for (name, suite) in suites {
        if let Err(e) = suite(200) {
            panic!("{name}: {e}");
        }
    }
    "7 suites x 200 cases".into()
}

fn closure_order(g: &PermGroup) -> usize {
    let id = Perm::identity(g.degree());
    let mut seen = HashSet::from([id.clone()]);
    let mut stack = vec![id];
    while let Some(x) = stack.pop() {
        for s in g.gens() {
            let y = x.mul(s);
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen.len()
}

fn quotient_orders() -> String {
    let g = GroupDef::grigorchuk();
    let orders: Vec<usize> = (1..=3).map(|n| g.quotient(n).order_usize().unwrap()).collect();
    assert_eq!(orders, vec![2, 8, 128]);
    let recount: Vec<usize> = (1..=3).map(|n| closure_order(&g.quotient(n))).collect();
    assert_eq!(recount, orders);
    "2, 8, 128".into()
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> String); 11] = [
        ("index of K", index_of_k),
        ("index chain of B", index_chain_of_b),
        ("index-2 count", index_two_count),
        ("word problem battery", word_problem),
        ("section computation for c", key_computation),
        ("first block example", figure_one),
        ("second block example", figure_two),
        ("finiteness", finiteness),
        ("Goursat oracle", goursat),
        ("property suites", properties),
        ("quotient orders", quotient_orders),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match catch_unwind(AssertUnwindSafe(check)) {
            Ok(detail) => writeln!(out, "criterion {:>2} PASS  {name}: {detail}", i + 1).unwrap(),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                writeln!(out, "criterion {:>2} FAIL  {name}: {msg}", i + 1).unwrap();
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
