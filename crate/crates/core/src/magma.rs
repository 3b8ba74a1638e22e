//! Finite binary algebras stored as multiplication tables.
//!
//! Elements are `0..n`; the row index is the left factor, so row `x` is the
//! left translation `L_x`. Every predicate here is total: it can be asked of
//! any table, which is what the enumerator and the verifier need.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A binary operation on `{0, .., n-1}` given by its table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "MagmaRepr", into = "MagmaRepr")]
pub struct Magma {
    order: usize,
    table: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct MagmaRepr {
    order: usize,
    table: Vec<Vec<usize>>,
}

impl TryFrom<MagmaRepr> for Magma {
    type Error = Error;

    fn try_from(r: MagmaRepr) -> Result<Self> {
        Magma::from_table(r.order, &r.table)
    }
}

impl From<Magma> for MagmaRepr {
    fn from(m: Magma) -> Self {
        MagmaRepr {
            order: m.order,
            table: m.rows(),
        }
    }
}

impl Magma {
    /// Builds a magma from an `order x order` table, validating shape and range.
    pub fn from_table<R: AsRef<[usize]>>(order: usize, rows: &[R]) -> Result<Self> {
        if order == 0 {
            return Err(Error::DimensionMismatch {
                expected: 0,
                detail: "order must be positive".into(),
            });
        }
        if rows.len() != order {
            return Err(Error::DimensionMismatch {
                expected: order,
                detail: format!("{} rows", rows.len()),
            });
        }
        let mut table = Vec::with_capacity(order * order);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != order {
                return Err(Error::DimensionMismatch {
                    expected: order,
                    detail: format!("row {i} has {} entries", row.len()),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= order {
                    return Err(Error::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                        order,
                    });
                }
                table.push(v);
            }
        }
        Ok(Magma { order, table })
    }

    /// Builds a magma from a flattened row-major table.
    pub fn from_flat(order: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 || table.len() != order * order {
            return Err(Error::DimensionMismatch {
                expected: order,
                detail: format!("{} entries", table.len()),
            });
        }
        if let Some(pos) = table.iter().position(|&v| v >= order) {
            return Err(Error::EntryOutOfRange {
                row: pos / order,
                col: pos % order,
                value: table[pos],
                order,
            });
        }
        Ok(Magma { order, table })
    }

    /// Builds a magma from a closure. Panics if the closure leaves `0..order`.
    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(order * order);
        for x in 0..order {
            for y in 0..order {
                let v = f(x, y);
                assert!(v < order, "entry {v} out of range at ({x}, {y})");
                table.push(v);
            }
        }
        Magma { order, table }
    }

    /// The one-element algebra.
    pub fn trivial() -> Self {
        Magma {
            order: 1,
            table: vec![0],
        }
    }

    /// The projection magma `x·y = y`.
    pub fn projection(order: usize) -> Self {
        Magma::from_fn(order, |_, y| y)
    }

    /// Addition table of the cyclic group `Z_n`.
    pub fn cyclic_group(order: usize) -> Self {
        Magma::from_fn(order, |x, y| (x + y) % order)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y]
    }

    /// Row `x`, i.e. the images of the left translation `L_x`.
    #[inline]
    pub fn row(&self, x: usize) -> &[usize] {
        &self.table[x * self.order..(x + 1) * self.order]
    }

    /// Column `y`, i.e. the images of the right translation `R_y`.
    pub fn column(&self, y: usize) -> Vec<usize> {
        (0..self.order).map(|x| self.mul(x, y)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.order).map(|x| self.row(x).to_vec()).collect()
    }

    /// The flattened row-major table.
    pub fn as_flat(&self) -> &[usize] {
        &self.table
    }

    /// The isomorphic copy obtained by renaming every element `x` to `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let n = self.order;
        assert_eq!(perm.len(), n);
        let mut table = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                table[perm[x] * n + perm[y]] = perm[self.mul(x, y)];
            }
        }
        Magma { order: n, table }
    }

    // ---------------------------------------------------------------------
    // quasigroup structure

    pub fn is_left_quasigroup(&self) -> bool {
        (0..self.order).all(|x| is_permutation(self.row(x)))
    }

    pub fn is_right_quasigroup(&self) -> bool {
        (0..self.order).all(|y| is_permutation(&self.column(y)))
    }

    pub fn is_quasigroup(&self) -> bool {
        self.is_left_quasigroup() && self.is_right_quasigroup()
    }

    /// The unique `u` with `x·u = y`.
    pub fn left_divide(&self, x: usize, y: usize) -> Result<usize> {
        if !self.is_left_quasigroup() {
            return Err(Error::NotLeftQuasigroup);
        }
        Ok(self.ldiv_unchecked(x, y))
    }

    /// The unique `v` with `v·x = y`.
    pub fn right_divide(&self, y: usize, x: usize) -> Result<usize> {
        if !self.is_quasigroup() {
            return Err(Error::NotQuasigroup);
        }
        Ok(self.rdiv_unchecked(y, x))
    }

    fn ldiv_unchecked(&self, x: usize, y: usize) -> usize {
        self.row(x)
            .iter()
            .position(|&v| v == y)
            .expect("row is a permutation")
    }

    fn rdiv_unchecked(&self, y: usize, x: usize) -> usize {
        (0..self.order)
            .find(|&v| self.mul(v, x) == y)
            .expect("column is a permutation")
    }

    /// Full left division table, `ldiv[x*n + y] = x\y`. Requires a left quasigroup.
    pub fn left_division_table(&self) -> Result<Vec<usize>> {
        if !self.is_left_quasigroup() {
            return Err(Error::NotLeftQuasigroup);
        }
        let n = self.order;
        let mut out = vec![0; n * n];
        for x in 0..n {
            for u in 0..n {
                out[x * n + self.mul(x, u)] = u;
            }
        }
        Ok(out)
    }

    /// Full right division table, `rdiv[y*n + x] = y/x`. Requires a quasigroup.
    pub fn right_division_table(&self) -> Result<Vec<usize>> {
        if !self.is_quasigroup() {
            return Err(Error::NotQuasigroup);
        }
        let n = self.order;
        let mut out = vec![0; n * n];
        for v in 0..n {
            for x in 0..n {
                out[self.mul(v, x) * n + x] = v;
            }
        }
        Ok(out)
    }

    // ---------------------------------------------------------------------
    // identities

    /// `(x·y)·(x·z) = (y·x)·(y·z)` for all triples.
    pub fn satisfies_left_rump(&self) -> bool {
        let n = self.order;
        for x in 0..n {
            for y in (x + 1)..n {
                let a = self.mul(x, y);
                let b = self.mul(y, x);
                for z in 0..n {
                    if self.mul(a, self.mul(x, z)) != self.mul(b, self.mul(y, z)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `(z·x)·(y·x) = (z·y)·(x·y)` for all triples.
    pub fn satisfies_right_rump(&self) -> bool {
        let n = self.order;
        for x in 0..n {
            for y in (x + 1)..n {
                let a = self.mul(y, x);
                let b = self.mul(x, y);
                for z in 0..n {
                    if self.mul(self.mul(z, x), a) != self.mul(self.mul(z, y), b) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `(x·y)·(x·z) = x·(y·z)`.
    pub fn is_left_distributive(&self) -> bool {
        let n = self.order;
        for x in 0..n {
            for y in 0..n {
                let xy = self.mul(x, y);
                for z in 0..n {
                    if self.mul(xy, self.mul(x, z)) != self.mul(x, self.mul(y, z)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `(x·y)·z = y·z`.
    pub fn is_2_reductive(&self) -> bool {
        let n = self.order;
        (0..n).all(|x| (0..n).all(|y| self.row(self.mul(x, y)) == self.row(y)))
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.order).all(|x| self.mul(x, x) == x)
    }

    pub fn is_associative(&self) -> bool {
        let n = self.order;
        for x in 0..n {
            for y in 0..n {
                let xy = self.mul(x, y);
                for z in 0..n {
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.order;
        (0..n).all(|x| (x + 1..n).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    pub fn is_rack(&self) -> bool {
        self.is_left_quasigroup() && self.is_left_distributive()
    }

    pub fn is_quandle(&self) -> bool {
        self.is_rack() && self.is_idempotent()
    }

    // ---------------------------------------------------------------------
    // squaring and square roots

    /// `σ(x) = x·x`.
    pub fn squaring_map(&self) -> Vec<usize> {
        (0..self.order).map(|x| self.mul(x, x)).collect()
    }

    pub fn is_uniquely_2_divisible(&self) -> bool {
        is_permutation(&self.squaring_map())
    }

    /// Finds a square root of `c` by iterating `c_k = (c_{k-1}\c)·c_{k-1}`.
    ///
    /// Under the left Rump identity `c_k² = L_c^{k+1}(c)`, so a root appears
    /// before `k` reaches the order of `L_c`. The global inverse of `σ` is
    /// never formed.
    pub fn square_root_iterative(&self, c: usize) -> Result<usize> {
        if !self.is_left_quasigroup() {
            return Err(Error::NotLeftQuasigroup);
        }
        let cap = permutation_order(self.row(c));
        let mut current = c;
        for _ in 0..cap {
            if self.mul(current, current) == c {
                return Ok(current);
            }
            current = self.mul(self.ldiv_unchecked(current, c), current);
        }
        Err(Error::NoSquareRoot(c))
    }

    /// Inverse of the squaring map; `None` unless `σ` is a bijection.
    pub fn square_roots(&self) -> Option<Vec<usize>> {
        let sigma = self.squaring_map();
        invert(&sigma)
    }

    // ---------------------------------------------------------------------
    // classes

    pub fn is_rumple(&self) -> bool {
        self.is_left_quasigroup() && self.satisfies_left_rump() && self.is_uniquely_2_divisible()
    }

    pub fn is_latin_rumple(&self) -> bool {
        let latin = self.is_quasigroup() && self.satisfies_left_rump();
        if latin {
            assert!(
                self.is_uniquely_2_divisible(),
                "quasigroup with the left Rump identity must be uniquely 2-divisible"
            );
        }
        latin
    }

    pub fn is_both_sided_rumple(&self) -> bool {
        let both = self.is_left_quasigroup()
            && self.satisfies_left_rump()
            && self.satisfies_right_rump();
        if both {
            assert!(
                self.is_quasigroup(),
                "left quasigroup with both Rump identities must be a quasigroup"
            );
        }
        both
    }

    // ---------------------------------------------------------------------
    // Δ map

    /// `Δ(x, y) = (x·y, y·x)`.
    pub fn delta_map(&self, x: usize, y: usize) -> (usize, usize) {
        (self.mul(x, y), self.mul(y, x))
    }

    pub fn is_delta_bijective(&self) -> bool {
        let n = self.order;
        let mut seen = vec![false; n * n];
        for x in 0..n {
            for y in 0..n {
                let (a, b) = self.delta_map(x, y);
                if std::mem::replace(&mut seen[a * n + b], true) {
                    return false;
                }
            }
        }
        true
    }

    /// `Δ⁻¹(x, y) = ((x\y²)^{1/2}, (y\x²)^{1/2})`, indexed by `x*n + y`.
    ///
    /// Both compositions with `Δ` are checked before returning.
    pub fn delta_inverse(&self) -> Result<Vec<(usize, usize)>> {
        if !self.is_rumple() {
            return Err(Error::NotRumple);
        }
        let n = self.order;
        let ldiv = self.left_division_table()?;
        let root = self.square_roots().ok_or(Error::NotRumple)?;
        let sigma = self.squaring_map();
        let star = |x: usize, y: usize| root[ldiv[x * n + sigma[y]]];
        let inv: Vec<(usize, usize)> = (0..n * n)
            .map(|p| {
                let (x, y) = (p / n, p % n);
                (star(x, y), star(y, x))
            })
            .collect();
        for x in 0..n {
            for y in 0..n {
                let (a, b) = inv[x * n + y];
                assert_eq!(self.delta_map(a, b), (x, y), "Δ∘Δ⁻¹ is not the identity");
                let (c, d) = self.delta_map(x, y);
                assert_eq!(inv[c * n + d], (x, y), "Δ⁻¹∘Δ is not the identity");
            }
        }
        Ok(inv)
    }

    // ---------------------------------------------------------------------
    // derived algebras

    /// The dual rumple `x∗y = (x\y²)^{1/2}`.
    pub fn dual_rumple(&self) -> Result<Magma> {
        if !self.is_rumple() {
            return Err(Error::NotRumple);
        }
        let dual = self.dual_unchecked();
        assert!(dual.is_rumple(), "dual of a rumple must be a rumple");
        assert_eq!(dual.dual_unchecked(), *self, "dual is not an involution");
        Ok(dual)
    }

    fn dual_unchecked(&self) -> Magma {
        let n = self.order;
        let ldiv = self.left_division_table().expect("rumple");
        let root = self.square_roots().expect("rumple");
        let sigma = self.squaring_map();
        Magma::from_fn(n, |x, y| root[ldiv[x * n + sigma[y]]])
    }

    /// Transposed table: `x ·op y = y·x`.
    pub fn opposite(&self) -> Magma {
        Magma::from_fn(self.order, |x, y| self.mul(y, x))
    }

    /// The principal loop isotope `x ∘ y = (x/e)·(f\y)` with identity `f·e`.
    pub fn principal_loop_isotope(&self, e: usize, f: usize) -> Result<Magma> {
        if !self.is_quasigroup() {
            return Err(Error::NotQuasigroup);
        }
        let n = self.order;
        let ldiv = self.left_division_table()?;
        let rdiv = self.right_division_table()?;
        let loop_ = Magma::from_fn(n, |x, y| self.mul(rdiv[x * n + e], ldiv[f * n + y]));
        let one = self.mul(f, e);
        assert!(
            (0..n).all(|x| loop_.mul(one, x) == x && loop_.mul(x, one) == x),
            "principal isotope lacks the identity f·e"
        );
        Ok(loop_)
    }

    /// Two-sided identity element, if one exists.
    pub fn identity_element(&self) -> Option<usize> {
        let n = self.order;
        (0..n).find(|&e| (0..n).all(|x| self.mul(e, x) == x && self.mul(x, e) == x))
    }

    /// Exponent of a power-associative loop: the least `k` with `x^k = 1` for all `x`,
    /// powers taken left to right. `None` if this is not a loop.
    pub fn loop_exponent(&self) -> Option<usize> {
        let one = self.identity_element()?;
        let mut exponent = 1;
        for x in 0..self.order {
            let mut power = x;
            let mut k = 1;
            while power != one {
                power = self.mul(power, x);
                k += 1;
                if k > self.order {
                    return None;
                }
            }
            exponent = lcm(exponent, k);
        }
        Some(exponent)
    }

    /// The conjugation quandle `x·y = x y x⁻¹` of a group given by its table.
    pub fn conjugation_quandle(group: &Magma) -> Result<Magma> {
        let n = group.order;
        if !group.is_quasigroup() {
            return Err(Error::NotAGroup("not a quasigroup".into()));
        }
        if !group.is_associative() {
            return Err(Error::NotAGroup("not associative".into()));
        }
        let one = group
            .identity_element()
            .ok_or_else(|| Error::NotAGroup("no identity".into()))?;
        let inverse: Vec<usize> = (0..n)
            .map(|x| (0..n).find(|&y| group.mul(x, y) == one).unwrap())
            .collect();
        Ok(Magma::from_fn(n, |x, y| {
            group.mul(group.mul(x, y), inverse[x])
        }))
    }
}

/// True if `images` lists each of `0..images.len()` exactly once.
pub fn is_permutation(images: &[usize]) -> bool {
    let n = images.len();
    let mut seen = vec![false; n];
    images
        .iter()
        .all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
}

/// Inverse of a permutation given as an image array.
pub fn invert(images: &[usize]) -> Option<Vec<usize>> {
    if !is_permutation(images) {
        return None;
    }
    let mut inv = vec![0; images.len()];
    for (i, &v) in images.iter().enumerate() {
        inv[v] = i;
    }
    Some(inv)
}

/// Order of a permutation: the lcm of its cycle lengths.
pub fn permutation_order(images: &[usize]) -> usize {
    cycle_lengths(images).into_iter().fold(1, lcm)
}

pub(crate) fn cycle_lengths(images: &[usize]) -> Vec<usize> {
    let n = images.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = images[x];
            len += 1;
        }
        out.push(len);
    }
    out
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
