//! Dense linear algebra over a prime field `F_p`.
//!
//! Elimination always picks the first nonzero entry in the column as pivot,
//! so bases come out the same on every run.

pub type Matrix = Vec<Vec<u64>>;

#[inline]
fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat; p is prime
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect()
}

pub fn mul(a: &Matrix, b: &Matrix, p: u64) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).map(|t| a[i][t] * b[t][j] % p).sum::<u64>() % p)
                .collect()
        })
        .collect()
}

pub fn sub(a: &Matrix, b: &Matrix, p: u64) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| (x + p - y % p) % p).collect())
        .collect()
}

pub fn trace(a: &Matrix, p: u64) -> u64 {
    (0..a.len()).map(|i| a[i][i]).sum::<u64>() % p
}

/// Row-reduces in place to reduced echelon form; returns the pivot columns.
pub fn row_reduce(a: &mut Matrix, p: u64) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a[i][c].is_multiple_of(p)) else {
            continue;
        };
        a.swap(r, pr);
        let inv = inv_mod(a[r][c], p);
        for v in a[r].iter_mut() {
            *v = *v * inv % p;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..cols {
                    a[i][j] = (a[i][j] + p * p - f * a[r][j] % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &Matrix, p: u64) -> usize {
    let mut m = a.clone();
    row_reduce(&mut m, p).len()
}

/// Determinant by elimination.
pub fn det(a: &Matrix, p: u64) -> u64 {
    let n = a.len();
    let mut m: Matrix = a.iter().map(|r| r.iter().map(|v| v % p).collect()).collect();
    let mut d = 1u64;
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| m[i][c] != 0) else {
            return 0;
        };
        if pr != c {
            m.swap(pr, c);
            d = (p - d) % p;
        }
        d = d * m[c][c] % p;
        let inv = inv_mod(m[c][c], p);
        for i in c + 1..n {
            if m[i][c] != 0 {
                let f = m[i][c] * inv % p;
                for j in c..n {
                    m[i][j] = (m[i][j] + p - f * m[c][j] % p) % p;
                }
            }
        }
    }
    d
}

pub fn inverse(a: &Matrix, p: u64) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<u64> = r.iter().map(|v| v % p).collect();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    let pivots = row_reduce(&mut aug, p);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of `{v : A v = 0}`, one vector per free column in increasing order.
pub fn nullspace(a: &Matrix, cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m = a.clone();
    let pivots = row_reduce(&mut m, p);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][f] % p) % p;
            }
            v
        })
        .collect()
}

/// Some solution of `A v = b`, if any.
pub fn solve(a: &Matrix, b: &[u64], p: u64) -> Option<Vec<u64>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row = r.clone();
            row.push(bi % p);
            row
        })
        .collect();
    let pivots = row_reduce(&mut aug, p);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut v = vec![0u64; cols];
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = aug[r][cols];
    }
    Some(v)
}
