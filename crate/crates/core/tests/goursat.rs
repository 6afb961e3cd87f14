use branchlab::goursat::small::*;
use branchlab::goursat::*;
use branchlab::permgrp::{Perm, PermGroup};
use branchlab::wreath::GroupDef;

const CAP: usize = DEFAULT_CAP;

pub fn roster() -> Vec<(&'static str, PermGroup)> {
    ["1", "C2", "C3", "C4", "V4", "S3", "C6", "D4", "Q8", "A4", "D6", "S4"]
        .into_iter()
        .map(|n| (n, by_name(n).unwrap()))
        .collect()
}

fn gen_z2(on: bool) -> Perm {
    if on {
        cyclic(2).gens()[0].clone()
    } else {
        Perm::identity(2)
    }
}

#[test]
fn round_trip_on_small_pairs() {
    let groups = roster();
    for (i, (n1, g1)) in groups.iter().enumerate() {
        for (n2, g2) in &groups[i..] {
            let subs = brute_subdirect(g1, g2, CAP).unwrap();
            assert_eq!(subs.len(), goursat_count(g1, g2, CAP).unwrap(), "{n1} x {n2}");
            for h in &subs {
                let d = goursat_decompose(h, CAP).unwrap();
                assert!(fibre_product(&d.f1, &d.f2, CAP).unwrap().same_as(h), "{n1} x {n2}");
                // N1 x N2 sits inside H
                let o = h.order();
                assert_eq!(o, d.kernel1_order * g2.order_usize().unwrap());
                assert_eq!(o % (d.kernel1_order * d.kernel2_order), 0);
            }
        }
    }
}

#[test]
fn sorted_output() {
    let subs = brute_subdirect(&dihedral(4), &dihedral(4), CAP).unwrap();
    let orders: Vec<usize> = subs.iter().map(ProductSubgroup::order).collect();
    assert!(orders.windows(2).all(|w| w[0] <= w[1]));
    let again = brute_subdirect(&dihedral(4), &dihedral(4), CAP).unwrap();
    for (a, b) in subs.iter().zip(&again) {
        assert_eq!(a.gens(), b.gens());
    }
}

pub fn d4_instance() -> (ProductSubgroup, PermGroup, PermGroup) {
    let d4 = dihedral(4);
    let (r, s) = (d4.gens()[0].clone(), d4.gens()[1].clone());
    let z2 = cyclic(2);
    // kernels: the rotations C4 and the Klein group <r^2, s>
    let f1 = FiniteHom::new(d4.clone(), z2.clone(), vec![gen_z2(false), gen_z2(true)], CAP).unwrap();
    let f2 = FiniteHom::new(d4.clone(), z2, vec![gen_z2(true), gen_z2(false)], CAP).unwrap();
    let p = fibre_product(&f1, &f2, CAP).unwrap();
    let c4 = PermGroup::new(4, vec![r.clone()]).unwrap();
    let v = PermGroup::new(4, vec![r.pow(2), s]).unwrap();
    (p, c4, v)
}

#[test]
fn d4_fibre_product() {
    let (p, c4, v) = d4_instance();
    assert_eq!(p.order(), 32);
    let id = Perm::identity(4);
    for x in c4.gens() {
        assert!(p.contains(&[x.clone(), id.clone()]));
    }
    for y in v.gens() {
        assert!(p.contains(&[id.clone(), y.clone()]));
    }
    assert!(matches!(
        classify_pair(&p, 0, 1),
        PairClass::Mixed { pair_order: 32, .. }
    ));
    // no graph of an automorphism of D4 lies inside P
    for sub in all_subgroups(&p.as_perm_group(), CAP)
        .unwrap()
        .iter()
        .filter(|s| s.len() == 8)
    {
        let firsts: std::collections::HashSet<_> = sub.iter().map(|x| x.restrict(&[0, 1, 2, 3])).collect();
        let seconds: std::collections::HashSet<_> = sub.iter().map(|x| x.restrict(&[4, 5, 6, 7])).collect();
        assert!(firsts.len() < 8 || seconds.len() < 8);
    }
}

#[test]
fn grigorchuk_level_three_fibre_product() {
    let g = GroupDef::grigorchuk();
    let q = (*g.quotient(3)).clone();
    let z2 = cyclic(2);
    let psi1 = FiniteHom::new(
        q.clone(),
        z2.clone(),
        [true, false, false, false].map(gen_z2).to_vec(),
        CAP,
    )
    .unwrap();
    let psi2 = FiniteHom::new(q.clone(), z2, [false, true, true, false].map(gen_z2).to_vec(), CAP).unwrap();
    let p = fibre_product(&psi1, &psi2, CAP).unwrap();
    assert_eq!(p.order(), 128 * 64);
    let id = Perm::identity(q.degree());
    for x in psi1.kernel() {
        assert!(p.contains(&[x, id.clone()]));
    }
    for y in psi2.kernel() {
        assert!(p.contains(&[id.clone(), y]));
    }
    assert!(matches!(classify_pair(&p, 0, 1), PairClass::Mixed { .. }));
}

#[test]
fn dependence_transitive_on_cubes() {
    for name in ["C2", "C3", "V4", "C4", "S3"] {
        let g = by_name(name).unwrap();
        let cube = ProductSubgroup::full(vec![g.clone(), g.clone(), g.clone()]);
        let big = cube.as_perm_group();
        let d = g.degree() as u32;
        let split = |p: &Perm| -> Vec<Perm> {
            (0..3)
                .map(|k| p.restrict(&(k * d..(k + 1) * d).collect::<Vec<_>>()))
                .collect()
        };
        let mut checked = 0;
        for elems in all_subgroups(&big, CAP).unwrap() {
            let tuples: Vec<Vec<Perm>> = elems.iter().map(split).collect();
            let h = from_tuples(&g, &tuples);
            if !h.is_subdirect() {
                continue;
            }
            checked += 1;
            let graph = |i, j| matches!(classify_pair(&h, i, j), PairClass::Graph { .. });
            for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
                if graph(i, j) && graph(j, k) {
                    assert!(graph(i, k), "{name}");
                }
            }
        }
        assert!(checked > 0);
    }
}

fn from_tuples(g: &PermGroup, tuples: &[Vec<Perm>]) -> ProductSubgroup {
    ProductSubgroup::new(vec![g.clone(); tuples[0].len()], tuples.to_vec()).unwrap()
}

#[test]
fn finite_index_closure_shadow() {
    for (i, j) in [("S3", "S3"), ("C4", "C4"), ("D4", "C2"), ("V4", "V4")] {
        let (g1, g2) = (by_name(i).unwrap(), by_name(j).unwrap());
        for h in brute_subdirect(&g1, &g2, CAP).unwrap() {
            let class = classify_pair(&h, 0, 1);
            if matches!(class, PairClass::Mixed { .. }) {
                continue;
            }
            let ho = h.order();
            let hp = h.as_perm_group();
            let d1 = g1.degree() as u32;
            for sub in all_subgroups(&hp, CAP).unwrap() {
                let index = ho / sub.len();
                if index > 3 {
                    continue;
                }
                let left: Vec<u32> = (0..d1).collect();
                let right: Vec<u32> = (d1..d1 + g2.degree() as u32).collect();
                let tuples: Vec<Vec<Perm>> = sub
                    .iter()
                    .map(|p| vec![p.restrict(&left), p.restrict(&right)])
                    .collect();
                let k = ProductSubgroup::new(vec![g1.clone(), g2.clone()], tuples).unwrap();
                let kc = classify_pair(&k, 0, 1);
                match class {
                    PairClass::Graph { .. } => assert!(matches!(kc, PairClass::Graph { .. })),
                    _ => {
                        // K contains N1(K) x N2(K) with index at most [H:K] in each projection
                        for c in 0..2 {
                            let proj = k.component(c).order_usize().unwrap();
                            let ker = k.coordinate_kernel_order(c, CAP).unwrap();
                            assert!(proj / ker <= index, "{i} x {j}");
                        }
                    }
                }
            }
        }
    }
}
