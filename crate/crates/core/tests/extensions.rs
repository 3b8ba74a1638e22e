mod common;

use common::*;
use rumple::affine::{aff_to_magma, is_affine, spectrum_admits, AbelianGroup, AffineDatum, Endomorphism};
use rumple::extensions::*;
use rumple::fp;
use rumple::permgroup::dis;
use rumple::search::{enumerate_rumples, SearchConfig};
use rumple::{Error, Magma};

fn datum(g: &AbelianGroup, base: &Magma, phi: &Endomorphism, psi: &Endomorphism, theta: Cocycle) -> ExtensionDatum {
    ExtensionDatum {
        group: g.clone(),
        base: base.clone(),
        phi: phi.clone(),
        psi: psi.clone(),
        theta,
    }
}

fn diagonal_theta(g: &AbelianGroup, n: usize, value: &[usize]) -> Cocycle {
    let mut t = Cocycle::zero(g, n);
    for x in 0..n {
        t.values[x][x] = value.to_vec();
    }
    t
}

#[test]
fn trivial_base_recovers_affine() {
    for d in [AffineDatum::cyclic(7, 3, 5, 2).unwrap(), AffineDatum::cyclic(4, 2, -1, 1).unwrap()] {
        let e = datum(&d.group, &Magma::trivial(), &d.phi, &d.psi, Cocycle { values: vec![vec![vec![0]]] });
        let shifted = AffineDatum::new(d.group.clone(), d.phi.clone(), d.psi.clone(), vec![0]).unwrap();
        assert_eq!(ext_to_magma(&e).unwrap(), aff_to_magma(&shifted));
        assert_eq!(affine_as_extension(&d).unwrap(), aff_to_magma(&d));
    }
}

#[test]
fn zero_cocycle_over_x41() {
    let (g, a, b) = order_four_pair();
    let e = datum(&g, &x41(), &a, &b, Cocycle::zero(&g, 4));
    assert!(cocycle_condition(&e).unwrap());
    let m = ext_to_magma(&e).unwrap();
    assert_eq!(m.order(), 16);
    assert!(m.is_latin_rumple());
}

#[test]
fn klein_cocycle_holds_on_affine_bases() {
    let (g, a, b) = order_four_pair();
    for f in [x41(), x42()] {
        let e = datum(&g, &f, &a, &b, diagonal_theta(&g, 4, &[0, 1]));
        assert!(cocycle_condition(&e).unwrap());
        assert_eq!(klein_extension(&f).unwrap(), e);
    }
}

#[test]
fn both_components_on_the_diagonal() {
    // θ(x, x) = (1, 1): decided by the linear system, and the direct scan must agree
    let (g, a, b) = order_four_pair();
    let theta = diagonal_theta(&g, 4, &[1, 1]);
    let holds = cocycle_condition(&datum(&g, &x41(), &a, &b, theta.clone())).unwrap();
    let basis = solve_cocycles(&g, &x41(), &a, &b).unwrap();
    assert_eq!(holds, in_span(&basis, &theta));
}

fn flatten(c: &Cocycle) -> Vec<u64> {
    let k = c.values[0][0].len();
    (0..k)
        .flat_map(|i| c.values.iter().flatten().map(move |v| v[i] as u64))
        .collect()
}

fn in_span(basis: &[Cocycle], v: &Cocycle) -> bool {
    let mut rows: Vec<Vec<u64>> = basis.iter().map(flatten).collect();
    let r = fp::rank(&rows, 2);
    rows.push(flatten(v));
    fp::rank(&rows, 2) == r
}

#[test]
fn solved_space_examples() {
    let (g, a, b) = order_four_pair();
    let basis = solve_cocycles(&g, &x41(), &a, &b).unwrap();
    assert!(in_span(&basis, &diagonal_theta(&g, 4, &[0, 1])));
    assert!(in_span(&basis, &Cocycle::zero(&g, 4)));
    assert_eq!(solve_cocycles(&g, &Magma::trivial(), &a, &b).unwrap().len(), 2);
    for c in &basis {
        assert!(cocycle_condition(&datum(&g, &x41(), &a, &b, c.clone())).unwrap());
    }
}

#[test]
fn solver_preconditions() {
    let (g, a, _) = order_four_pair();
    let id = Endomorphism::identity(&g);
    assert!(matches!(solve_cocycles(&g, &x41(), &id, &a), Err(Error::RumpConditionFails)));
    let z4 = AbelianGroup::new(vec![4]).unwrap();
    let zero = Endomorphism::zero(&z4);
    assert!(matches!(
        solve_cocycles(&z4, &x41(), &zero, &Endomorphism::identity(&z4)),
        Err(Error::InvalidExtension(_))
    ));
}

#[test]
fn cocycle_identity_iff_rump_identity_exhaustively() {
    // G = Z₂ forces φ = 0, ψ = 1
    let g = AbelianGroup::new(vec![2]).unwrap();
    let phi = Endomorphism::zero(&g);
    let psi = Endomorphism::identity(&g);
    let mut bases = vec![Magma::trivial()];
    for n in 2..=3 {
        bases.extend(enumerate_rumples(&SearchConfig::new(n)).unwrap().classes);
    }
    for f in bases {
        let n = f.order();
        let cells = n * n;
        for code in 0..1usize << cells {
            let mut theta = Cocycle::zero(&g, n);
            for i in 0..cells {
                theta.values[i / n][i % n] = vec![code >> i & 1];
            }
            let e = datum(&g, &f, &phi, &psi, theta);
            let holds = cocycle_condition(&e).unwrap();
            assert_eq!(holds, ext_to_magma(&e).unwrap().satisfies_left_rump());
        }
    }
}

#[test]
fn extension_left_division() {
    let (g, a, b) = order_four_pair();
    let e = datum(&g, &x42(), &a, &b, diagonal_theta(&g, 4, &[1, 0]));
    let m = ext_to_magma(&e).unwrap();
    assert!(m.is_left_quasigroup());
    for u in g.elements() {
        for x in 0..4 {
            for v in g.elements() {
                for y in 0..4 {
                    let (w, z) = ext_left_divide(&e, &u, x, &v, y).unwrap();
                    assert_eq!(m.left_divide(e.element_index(&u, x), e.element_index(&v, y)).unwrap(), e.element_index(&w, z));
                }
            }
        }
    }
}

#[test]
fn validation() {
    let (g, a, b) = order_four_pair();
    let mut bad = datum(&g, &x41(), &a, &b, Cocycle::zero(&g, 3));
    assert!(matches!(ext_to_magma(&bad), Err(Error::InvalidExtension(_))));
    bad.theta = Cocycle::zero(&g, 4);
    bad.theta.values[0][0] = vec![2, 0];
    assert!(matches!(ext_to_magma(&bad), Err(Error::InvalidExtension(_))));
    bad.theta = Cocycle::zero(&g, 4);
    bad.base = z3();
    assert!(matches!(ext_to_magma(&bad), Err(Error::InvalidExtension(_))));
    bad.base = x41();
    bad.psi = a.clone();
    bad.psi.matrix[0] = vec![0, 0];
    assert!(matches!(ext_to_magma(&bad), Err(Error::InvalidExtension(_))));
}

#[test]
fn klein_construction() {
    for f in [x41(), x42()] {
        let m = ext_to_magma(&klein_extension(&f).unwrap()).unwrap();
        assert_eq!(m.order(), 4 * f.order());
        assert!(m.is_latin_rumple());
        assert!(!dis(&m).unwrap().is_abelian());
        assert!(!is_affine(&m).unwrap());
    }
    assert!(matches!(klein_extension(&Magma::trivial()), Err(Error::BaseNotAffineLatin)));
    assert!(matches!(klein_extension(&two_reps()), Err(Error::BaseNotAffineLatin)));
}

#[test]
fn iterated_extensions() {
    let (g, a, b) = order_four_pair();
    let base = AffineDatum::new(g.clone(), a.clone(), b.clone(), vec![0, 0]).unwrap();
    let first = ExtensionLayer::affine(&base);
    let one = iterate_extensions(std::slice::from_ref(&first)).unwrap();
    assert_eq!(one.layers, 1);
    assert!(is_affine(&one.magma).unwrap());

    let klein = ExtensionLayer {
        group: g.clone(),
        phi: a,
        psi: b,
        theta: diagonal_theta(&g, 4, &[0, 1]),
    };
    let two = iterate_extensions(&[first, klein]).unwrap();
    assert_eq!(two.layers, 2);
    assert_eq!(two.magma.order(), 16);
    assert!(two.magma.is_latin_rumple());
    assert!(!is_affine(&two.magma).unwrap());
    for m in [&one.magma, &two.magma] {
        assert!(spectrum_admits(m.order()));
        assert!(nilpotent_order_admissible(m.order()));
    }
}

#[test]
fn iterated_layer_errors_name_the_layer() {
    let (g, a, b) = order_four_pair();
    let wrong = ExtensionLayer {
        group: g.clone(),
        phi: a,
        psi: b,
        theta: Cocycle::zero(&g, 2),
    };
    match iterate_extensions(&[wrong]) {
        Err(Error::InvalidExtension(msg)) => assert!(msg.starts_with("layer 0")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn witness_hunt_over_x41() {
    let (g, a, b) = order_four_pair();
    let report = search_witness(&g, &x41(), &a, &b, 256).unwrap();
    assert_eq!(report.order, 16);
    assert_eq!(report.examined, 256);
    let f = report.nonabelian_dis.expect("the Klein cocycle lies in the space");
    assert_eq!((f.dis_order, f.dis_center_order, f.dis_exponent), (16, 4, 4));
    assert!(!f.table.is_quasigroup() || f.table.is_latin_rumple());
}

#[test]
fn extension_json() {
    let e = klein_extension(&x41()).unwrap();
    let v: serde_json::Value = serde_json::to_value(&e).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["factors", "base", "phi", "psi", "theta"] {
        assert!(keys.contains(&k));
    }
    let back: ExtensionDatum = serde_json::from_value(v).unwrap();
    assert_eq!(back, e);
}
