//! Tables shared by the integration tests.
#![allow(dead_code)]

use rumple::affine::{AbelianGroup, Endomorphism};
use rumple::Magma;

pub fn x41() -> Magma {
    Magma::from_table(4, &[[0, 1, 3, 2], [2, 3, 1, 0], [1, 0, 2, 3], [3, 2, 0, 1]]).unwrap()
}

pub fn x42() -> Magma {
    Magma::from_table(4, &[[1, 3, 0, 2], [0, 2, 1, 3], [2, 0, 3, 1], [3, 1, 2, 0]]).unwrap()
}

/// Order 4, a rumple with two equal rows.
pub fn two_reps() -> Magma {
    Magma::from_table(4, &[[1, 0, 3, 2], [3, 2, 1, 0], [1, 0, 3, 2], [3, 2, 1, 0]]).unwrap()
}

pub fn z3() -> Magma {
    Magma::cyclic_group(3)
}

/// Dihedral group of order 8: `r^i` is `i`, `s r^i` is `4 + i`.
pub fn dihedral8() -> Magma {
    Magma::from_fn(8, |x, y| {
        let (a, i) = (x / 4, x % 4);
        let (b, j) = (y / 4, y % 4);
        // (s^a r^i)(s^b r^j) = s^{a+b} r^{(-1)^b i + j}
        let k = if b == 0 { (i + j) % 4 } else { (4 - i + j) % 4 };
        ((a + b) % 2) * 4 + k
    })
}

/// `S₃` as permutations of three points, composed right to left.
pub fn s3() -> Magma {
    let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    Magma::from_fn(6, |x, y| {
        let p = perms[x];
        let q = perms[y];
        let r = [p[q[0]], p[q[1]], p[q[2]]];
        perms.iter().position(|&s| s == r).unwrap()
    })
}

/// The pair `A = ((0,1),(1,0))`, `B = ((1,0),(1,1))` over `Z₂²`.
pub fn order_four_pair() -> (AbelianGroup, Endomorphism, Endomorphism) {
    let g = AbelianGroup::elementary(2, 2);
    let a = Endomorphism::new(&g, &[vec![0, 1], vec![1, 0]]).unwrap();
    let b = Endomorphism::new(&g, &[vec![1, 0], vec![1, 1]]).unwrap();
    (g, a, b)
}

/// Every `n×n` table, in lexicographic order.
pub fn all_tables(n: usize) -> impl Iterator<Item = Magma> {
    let cells = n * n;
    let total = n.pow(cells as u32);
    (0..total).map(move |mut code| {
        let mut flat = vec![0; cells];
        for c in flat.iter_mut().rev() {
            *c = code % n;
            code /= n;
        }
        Magma::from_flat(n, flat).unwrap()
    })
}
