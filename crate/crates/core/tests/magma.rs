mod common;

use common::*;
use rumple::{canonical_form, find_isomorphism, Error, Magma};

#[test]
fn construction_validates_shape_and_range() {
    assert_eq!(x41().order(), 4);
    assert_eq!(Magma::from_table(1, &[[0]]).unwrap(), Magma::trivial());
    assert!(matches!(
        Magma::from_table(2, &[[0, 1], [0, 2]]),
        Err(Error::EntryOutOfRange { value: 2, .. })
    ));
    assert!(matches!(
        Magma::from_table(2, &[vec![0, 1], vec![0]]),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn quasigroup_predicates() {
    assert!(Magma::projection(3).is_left_quasigroup());
    assert!(x41().is_left_quasigroup());
    assert!(!Magma::from_table(2, &[[0, 0], [1, 1]]).unwrap().is_left_quasigroup());
    assert!(x42().is_quasigroup());
    assert!(!Magma::projection(3).is_quasigroup());
    assert!(z3().is_quasigroup());
}

#[test]
fn divisions() {
    assert_eq!(x41().left_divide(1, 0).unwrap(), 3);
    assert_eq!(x41().right_divide(0, 1).unwrap(), 2);
    let p = Magma::projection(3);
    for x in 0..3 {
        for y in 0..3 {
            assert_eq!(p.left_divide(x, y).unwrap(), y);
        }
    }
    assert!(matches!(p.right_divide(0, 1), Err(Error::NotQuasigroup)));
}

#[test]
fn rump_identities() {
    assert!(x41().satisfies_left_rump());
    assert!(Magma::projection(3).satisfies_left_rump());
    assert!(!z3().satisfies_left_rump());
    assert!(x41().satisfies_right_rump());
    assert!(x42().satisfies_right_rump());
    assert!(!Magma::projection(2).satisfies_right_rump());
}

#[test]
fn squaring_and_roots() {
    assert_eq!(x41().squaring_map(), vec![0, 3, 2, 1]);
    assert!(x41().is_uniquely_2_divisible());
    assert!(Magma::projection(3).is_uniquely_2_divisible());
    assert!(!Magma::from_table(2, &[[0, 1], [1, 0]]).unwrap().is_uniquely_2_divisible());
    assert_eq!(x41().square_root_iterative(1).unwrap(), 3);
    assert_eq!(Magma::projection(4).square_root_iterative(2).unwrap(), 2);
    let r = x42().square_root_iterative(0).unwrap();
    assert_eq!(r, 3);
    assert_eq!(x42().mul(r, r), 0);
}

#[test]
fn rumple_classes() {
    let x = x41();
    assert!(x.is_rumple() && x.is_latin_rumple() && x.is_both_sided_rumple());
    assert!(two_reps().is_rumple());
    assert!(!two_reps().is_latin_rumple());
    let z = z3();
    assert!(!z.is_rumple() && !z.is_latin_rumple() && !z.is_both_sided_rumple());
}

#[test]
fn racks_and_quandles() {
    let p = Magma::projection(3);
    assert!(p.is_rack() && p.is_quandle() && p.is_2_reductive() && p.is_left_distributive());
    assert!(!x41().is_rack());
    let q = Magma::conjugation_quandle(&dihedral8()).unwrap();
    assert!(q.is_rack() && q.is_quandle());
}

#[test]
fn conjugation_quandles() {
    let z4 = Magma::cyclic_group(4);
    assert_eq!(Magma::conjugation_quandle(&z4).unwrap(), Magma::projection(4));
    assert!(Magma::conjugation_quandle(&dihedral8()).unwrap().satisfies_left_rump());
    assert!(!Magma::conjugation_quandle(&s3()).unwrap().satisfies_left_rump());
    assert!(matches!(Magma::conjugation_quandle(&x41()), Err(Error::NotAGroup(_))));
}

#[test]
fn delta_map() {
    let p = Magma::projection(2);
    assert_eq!(p.delta_map(0, 1), (1, 0));
    assert!(p.is_delta_bijective());
    let x = x41();
    assert!(x.is_delta_bijective());
    let inv = x.delta_inverse().unwrap();
    for a in 0..4 {
        for b in 0..4 {
            let (u, v) = x.delta_map(a, b);
            assert_eq!(inv[u * 4 + v], (a, b));
            let (u, v) = inv[a * 4 + b];
            assert_eq!(x.delta_map(u, v), (a, b));
        }
    }
    assert!(matches!(z3().delta_inverse(), Err(Error::NotRumple)));
}

#[test]
fn delta_bijective_iff_rumple_among_small_rump_left_quasigroups() {
    for n in 1..=3 {
        for m in all_tables(n) {
            if m.is_left_quasigroup() && m.satisfies_left_rump() {
                assert_eq!(m.is_delta_bijective(), m.is_uniquely_2_divisible(), "{m:?}");
            }
        }
    }
}

#[test]
fn duals_are_self_isomorphic_for_order_four() {
    for x in [x41(), x42()] {
        let d = x.dual_rumple().unwrap();
        assert!(find_isomorphism(&d, &x).is_some());
    }
    assert_eq!(Magma::trivial().dual_rumple().unwrap(), Magma::trivial());
    assert!(matches!(z3().dual_rumple(), Err(Error::NotRumple)));
}

#[test]
fn dual_of_latin_rumple_divides_by_squares() {
    for x in [x41(), x42()] {
        let d = x.dual_rumple().unwrap();
        assert!(d.is_latin_rumple());
        let sq = x.squaring_map();
        // the square root of a in the dual is a·a
        assert_eq!(d.square_roots().unwrap(), sq);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(d.right_divide(a, b).unwrap(), x.right_divide(sq[b], sq[a]).unwrap());
                // x\*y = (x y²)^{1/2}
                let root = x.square_roots().unwrap();
                assert_eq!(d.left_divide(a, b).unwrap(), root[x.mul(a, sq[b])]);
            }
        }
    }
}

#[test]
fn opposites() {
    assert!(x41().opposite().is_both_sided_rumple());
    assert_eq!(z3().opposite(), z3());
    assert_eq!(Magma::trivial().opposite(), Magma::trivial());
}

#[test]
fn loop_isotopes() {
    let l = x41().principal_loop_isotope(0, 0).unwrap();
    assert!(l.identity_element().is_some());
    assert_eq!(l.loop_exponent(), Some(2));
    let z = Magma::cyclic_group(5);
    assert_eq!(z.principal_loop_isotope(0, 0).unwrap(), z);
    let x = x42();
    let l = x.principal_loop_isotope(1, 1).unwrap();
    for a in 0..4 {
        assert_eq!(l.mul(a, a), x.mul(1, 1));
    }
    assert!(matches!(Magma::projection(2).principal_loop_isotope(0, 0), Err(Error::NotQuasigroup)));
}

#[test]
fn isomorphism_and_canonical_forms() {
    assert!(find_isomorphism(&x41(), &x42()).is_none());
    let relabeled = x41().relabel(&[2, 0, 3, 1]);
    let iso = find_isomorphism(&x41(), &relabeled).unwrap();
    assert!(iso.witnesses(&x41(), &relabeled));
    assert_eq!(canonical_form(&relabeled), canonical_form(&x41()));
    assert_ne!(canonical_form(&x41()), canonical_form(&x42()));
}

#[test]
fn latin_squaring_factorization() {
    // σ = R_{ee} L_e R_e⁻¹ for every e
    for x in [x41(), x42()] {
        let sq = x.squaring_map();
        for e in 0..4 {
            for a in 0..4 {
                let t = x.right_divide(a, e).unwrap();
                assert_eq!(sq[a], x.mul(x.mul(e, t), x.mul(e, e)));
            }
        }
    }
}

#[test]
fn trivial_magma_satisfies_everything() {
    let t = Magma::trivial();
    assert!(t.is_rumple() && t.is_latin_rumple() && t.is_both_sided_rumple());
    assert!(t.is_quandle() && t.is_2_reductive() && t.satisfies_right_rump());
}
