//! Set-theoretic solutions of the Yang–Baxter equation and their
//! correspondence with rumples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magma::{is_permutation, Magma};

/// A map `r: X×X → X×X`, `r(x, y) = (r1[x][y], r2[x][y])`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSolution {
    pub n: usize,
    pub r1: Vec<Vec<usize>>,
    pub r2: Vec<Vec<usize>>,
}

impl SetSolution {
    pub fn new(n: usize, r1: Vec<Vec<usize>>, r2: Vec<Vec<usize>>) -> Result<Self> {
        // reuse the magma validation for shape and range
        Magma::from_table(n, &r1)?;
        Magma::from_table(n, &r2)?;
        Ok(SetSolution { n, r1, r2 })
    }

    /// The flip `r(x, y) = (y, x)`.
    pub fn flip(n: usize) -> Self {
        SetSolution {
            n,
            r1: (0..n).map(|_| (0..n).collect()).collect(),
            r2: (0..n).map(|x| vec![x; n]).collect(),
        }
    }

    #[inline]
    pub fn apply(&self, x: usize, y: usize) -> (usize, usize) {
        (self.r1[x][y], self.r2[x][y])
    }

    /// `(r×1)(1×r)(r×1) = (1×r)(r×1)(1×r)` on every triple.
    pub fn satisfies_yb(&self) -> bool {
        let n = self.n;
        let r12 = |(x, y, z): (usize, usize, usize)| {
            let (a, b) = self.apply(x, y);
            (a, b, z)
        };
        let r23 = |(x, y, z): (usize, usize, usize)| {
            let (b, c) = self.apply(y, z);
            (x, b, c)
        };
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let t = (x, y, z);
                    if r12(r23(r12(t))) != r23(r12(r23(t))) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_involutive(&self) -> bool {
        (0..self.n).all(|x| {
            (0..self.n).all(|y| {
                let (a, b) = self.apply(x, y);
                self.apply(a, b) == (x, y)
            })
        })
    }

    pub fn is_bijective(&self) -> bool {
        let n = self.n;
        let mut seen = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                let (a, b) = self.apply(x, y);
                if std::mem::replace(&mut seen[a * n + b], true) {
                    return false;
                }
            }
        }
        true
    }

    /// Each `y ↦ r1(x, y)` is a permutation.
    pub fn is_left_nondegenerate(&self) -> bool {
        self.r1.iter().all(|row| is_permutation(row))
    }

    /// Each `x ↦ r2(x, y)` is a permutation.
    pub fn is_right_nondegenerate(&self) -> bool {
        (0..self.n).all(|y| {
            let col: Vec<usize> = (0..self.n).map(|x| self.r2[x][y]).collect();
            is_permutation(&col)
        })
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.is_left_nondegenerate() && self.is_right_nondegenerate()
    }

    /// A permutation `t` with `r(t(x), x) = (t(x), x)` for all `x`, if one exists.
    ///
    /// Candidates are collected per `x`; when several fit, a perfect matching
    /// between points and candidates picks one.
    pub fn biquandle_witness(&self) -> Result<Option<Vec<usize>>> {
        if !(self.is_bijective() && self.is_nondegenerate()) {
            return Err(Error::NotBirack);
        }
        let n = self.n;
        let candidates: Vec<Vec<usize>> = (0..n)
            .map(|x| (0..n).filter(|&u| self.apply(u, x) == (u, x)).collect())
            .collect();
        if candidates.iter().any(Vec::is_empty) {
            return Ok(None);
        }
        Ok(perfect_matching(&candidates))
    }
}

/// Kuhn's augmenting-path matching; returns `t` with `t[x] ∈ candidates[x]`, injective.
fn perfect_matching(candidates: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = candidates.len();
    let mut owner = vec![usize::MAX; n];
    fn augment(
        x: usize,
        candidates: &[Vec<usize>],
        owner: &mut [usize],
        visited: &mut [bool],
    ) -> bool {
        for &u in &candidates[x] {
            if visited[u] {
                continue;
            }
            visited[u] = true;
            if owner[u] == usize::MAX || augment(owner[u], candidates, owner, visited) {
                owner[u] = x;
                return true;
            }
        }
        false
    }
    for x in 0..n {
        let mut visited = vec![false; n];
        if !augment(x, candidates, &mut owner, &mut visited) {
            return None;
        }
    }
    let mut t = vec![0; n];
    for (u, &x) in owner.iter().enumerate() {
        t[x] = u;
    }
    Some(t)
}

/// `r(x, y) = (x\y, (x\y)·x)`; the result is checked to be an involutive
/// nondegenerate solution.
pub fn rumple_to_solution(x: &Magma) -> Result<SetSolution> {
    if !x.is_rumple() {
        return Err(Error::NotRumple);
    }
    let s = left_division_solution(x)?;
    assert!(s.satisfies_yb(), "solution from a rumple violates (YB)");
    assert!(s.is_involutive(), "solution from a rumple is not involutive");
    assert!(s.is_nondegenerate(), "solution from a rumple is degenerate");
    Ok(s)
}

/// `r(x, y) = (x\y, (x\y)·x)` for any left quasigroup, without postconditions.
pub fn left_division_solution(x: &Magma) -> Result<SetSolution> {
    let n = x.order();
    let ldiv = x.left_division_table()?;
    let r1: Vec<Vec<usize>> = (0..n)
        .map(|a| (0..n).map(|b| ldiv[a * n + b]).collect())
        .collect();
    let r2: Vec<Vec<usize>> = (0..n)
        .map(|a| (0..n).map(|b| x.mul(ldiv[a * n + b], a)).collect())
        .collect();
    Ok(SetSolution { n, r1, r2 })
}

/// `x·y = z ⟺ r1(x, z) = y`.
pub fn solution_to_rumple(s: &SetSolution) -> Result<Magma> {
    if !s.is_left_nondegenerate() {
        return Err(Error::NotLeftNondegenerate);
    }
    let n = s.n;
    let mut table = vec![vec![0; n]; n];
    for x in 0..n {
        for z in 0..n {
            table[x][s.r1[x][z]] = z;
        }
    }
    Magma::from_table(n, &table)
}

/// For a rack, the solution `r(x, y) = (x\y, x)` satisfies (YB) and has `r2(x, y) = x`.
pub fn rack_solution_check(x: &Magma) -> Result<bool> {
    if !x.is_rack() {
        return Err(Error::NotRack);
    }
    let n = x.order();
    let ldiv = x.left_division_table()?;
    let s = SetSolution {
        n,
        r1: (0..n)
            .map(|a| (0..n).map(|b| ldiv[a * n + b]).collect())
            .collect(),
        r2: (0..n).map(|a| vec![a; n]).collect(),
    };
    let second_is_first = (0..n).all(|a| (0..n).all(|b| s.r2[a][b] == a));
    Ok(second_is_first && s.satisfies_yb())
}
