mod common;

use common::*;
use rumple::yangbaxter::{left_division_solution, rack_solution_check, rumple_to_solution, solution_to_rumple};
use rumple::{Error, Magma, SetSolution};

fn quasigroup_table(t: &[Vec<usize>]) -> bool {
    let rows: Vec<&[usize]> = t.iter().map(Vec::as_slice).collect();
    Magma::from_table(t.len(), &rows).unwrap().is_quasigroup()
}

#[test]
fn projection_gives_the_flip() {
    let s = rumple_to_solution(&Magma::projection(3)).unwrap();
    assert_eq!(s, SetSolution::flip(3));
    assert_eq!(solution_to_rumple(&SetSolution::flip(3)).unwrap(), Magma::projection(3));
    let t = rumple_to_solution(&Magma::trivial()).unwrap();
    assert_eq!(t.apply(0, 0), (0, 0));
}

#[test]
fn round_trips() {
    for x in [x41(), x42(), two_reps()] {
        let s = rumple_to_solution(&x).unwrap();
        assert!(s.satisfies_yb() && s.is_involutive() && s.is_nondegenerate());
        assert_eq!(solution_to_rumple(&s).unwrap(), x);
    }
    assert!(matches!(rumple_to_solution(&z3()), Err(Error::NotRumple)));
}

#[test]
fn flip_predicates() {
    let f = SetSolution::flip(4);
    assert!(f.satisfies_yb() && f.is_involutive());
    assert!(f.is_left_nondegenerate() && f.is_right_nondegenerate());
    assert_eq!(f.biquandle_witness().unwrap(), Some(vec![0, 1, 2, 3]));
}

#[test]
fn degenerate_solution() {
    // r(x, y) = (x, x)
    let n = 3;
    let s = SetSolution::new(n, (0..n).map(|x| vec![x; n]).collect(), (0..n).map(|x| vec![x; n]).collect())
        .unwrap();
    assert!(s.satisfies_yb());
    assert!(!s.is_left_nondegenerate());
    assert!(matches!(solution_to_rumple(&s), Err(Error::NotLeftNondegenerate)));
}

#[test]
fn biquandle_witness_is_square_root() {
    for x in [x41(), x42(), two_reps()] {
        let s = rumple_to_solution(&x).unwrap();
        assert_eq!(s.biquandle_witness().unwrap(), x.square_roots());
    }
    assert_eq!(x41().square_roots(), Some(vec![0, 3, 2, 1]));
}

#[test]
fn racks() {
    assert!(rack_solution_check(&Magma::projection(3)).unwrap());
    let q = Magma::conjugation_quandle(&dihedral8()).unwrap();
    assert!(rack_solution_check(&q).unwrap());
    assert!(matches!(rack_solution_check(&x41()), Err(Error::NotRack)));
}

#[test]
fn latin_iff_both_components_are_quasigroups() {
    for x in [x41(), x42()] {
        let s = rumple_to_solution(&x).unwrap();
        assert!(quasigroup_table(&s.r1) && quasigroup_table(&s.r2));
    }
    let s = rumple_to_solution(&two_reps()).unwrap();
    assert!(!quasigroup_table(&s.r2));
}

#[test]
fn involutive_iff_second_component_matches() {
    // for left quasigroups, r = (x\y, r2) is involutive exactly when r2 = (x\y)·x
    for x in [x41(), two_reps(), Magma::projection(3), z3()] {
        let good = left_division_solution(&x).unwrap();
        assert!(good.is_involutive(), "{x:?}");
        let n = x.order();
        let mut bad = good.clone();
        bad.r2[0][0] = (bad.r2[0][0] + 1) % n;
        assert!(!bad.is_involutive());
    }
}

#[test]
fn solution_json() {
    let s = SetSolution::flip(2);
    let text = serde_json::to_string(&s).unwrap();
    assert_eq!(text, r#"{"n":2,"r1":[[0,1],[0,1]],"r2":[[0,0],[1,1]]}"#);
}
