//! Permutations and materialized permutation groups.
//!
//! Groups are stored as their full element sets. The degrees involved are
//! small, and explicit closure keeps every predicate a direct scan.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::magma::{self, Magma};

/// Default cap on the number of elements a closure may produce.
pub const DEFAULT_ELEMENT_CAP: usize = 10_000_000;

/// A bijection of `0..n`. Composition is right to left: `(p * q)(x) = p(q(x))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        if magma::is_permutation(&images) {
            Ok(Permutation { images })
        } else {
            Err(Error::NotAPermutation(images))
        }
    }

    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.compose(self).compose(&g.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn order(&self) -> usize {
        magma::permutation_order(&self.images)
    }

    pub fn pow(&self, k: usize) -> Permutation {
        let mut out = Permutation::identity(self.degree());
        for _ in 0..k {
            out = self.compose(&out);
        }
        out
    }

    /// Left translation `L_x` of a left quasigroup.
    pub fn left_translation(m: &Magma, x: usize) -> Permutation {
        Permutation {
            images: m.row(x).to_vec(),
        }
    }

    /// Right translation `R_x` of a right quasigroup.
    pub fn right_translation(m: &Magma, x: usize) -> Permutation {
        Permutation {
            images: m.column(x),
        }
    }

    /// Cycle notation with 0-based points, e.g. `(0 2 1 3)`.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }
}

/// A finitely generated permutation group with all elements materialized.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    index: HashSet<Permutation>,
}

/// Summary fields reported for a group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub order: usize,
    pub abelian: bool,
    pub transitive: bool,
    pub regular: bool,
    pub solvable: bool,
}

impl PermGroup {
    /// Breadth-first closure of `generators` with the default element cap.
    pub fn close(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        Self::close_with_cap(degree, generators, DEFAULT_ELEMENT_CAP)
    }

    pub fn close_with_cap(degree: usize, generators: Vec<Permutation>, cap: usize) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }
        let mut gens: Vec<Permutation> = Vec::new();
        for g in generators {
            if !g.is_identity() && !gens.contains(&g) {
                gens.push(g);
            }
        }
        let id = Permutation::identity(degree);
        let mut index = HashSet::new();
        index.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in &gens {
                let h = s.compose(&g);
                if !index.contains(&h) {
                    if index.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    index.insert(h.clone());
                    queue.push_back(h);
                }
            }
        }
        let mut elements: Vec<Permutation> = index.iter().cloned().collect();
        elements.sort();
        Ok(PermGroup {
            degree,
            generators: gens,
            elements,
            index,
        })
    }

    pub fn trivial(degree: usize) -> Self {
        Self::close(degree, Vec::new()).expect("trivial group")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Elements sorted by image array.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.index.contains(g)
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|g| other.contains(g))
    }

    pub fn same_elements(&self, other: &PermGroup) -> bool {
        self.order() == other.order() && self.is_subgroup_of(other)
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| (i + 1..g.len()).all(|j| g[i].compose(&g[j]) == g[j].compose(&g[i])))
    }

    /// Orbit of a point under the group.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut stack = vec![point];
        let mut out = vec![point];
        while let Some(x) = stack.pop() {
            for s in &self.generators {
                let y = s.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    stack.push(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    pub fn is_regular(&self) -> bool {
        let regular = self.is_transitive() && self.order() == self.degree;
        debug_assert_eq!(
            regular,
            self.is_transitive()
                && self
                    .elements
                    .iter()
                    .filter(|g| !g.is_identity())
                    .all(|g| (0..self.degree).all(|x| g.apply(x) != x))
        );
        regular
    }

    pub fn element_order(&self, g: &Permutation) -> usize {
        g.order()
    }

    pub fn exponent(&self) -> usize {
        self.elements.iter().map(|g| g.order()).fold(1, magma::lcm)
    }

    pub fn is_cyclic(&self) -> bool {
        let n = self.order();
        self.elements.iter().any(|g| g.order() == n)
    }

    /// Whether `self` is normal in `g`. Errors when `self ⊄ g`.
    pub fn is_normal_in(&self, g: &PermGroup) -> Result<bool> {
        if !self.is_subgroup_of(g) {
            return Err(Error::NotSubgroup);
        }
        Ok(self.is_normalized_by(g.generators()))
    }

    /// Whether conjugation by each of `gens` maps the group into itself.
    pub fn is_normalized_by(&self, gens: &[Permutation]) -> bool {
        gens.iter().all(|g| {
            self.generators
                .iter()
                .all(|h| self.contains(&h.conjugate_by(g)))
        })
    }

    /// Elements commuting with every element of the group.
    pub fn center(&self) -> Vec<Permutation> {
        self.elements
            .iter()
            .filter(|z| self.generators.iter().all(|g| g.compose(z) == z.compose(g)))
            .cloned()
            .collect()
    }

    /// The commutator subgroup.
    pub fn derived_subgroup(&self) -> Result<PermGroup> {
        let mut gens = Vec::new();
        for a in &self.generators {
            for b in &self.generators {
                let c = a.inverse().compose(&b.inverse()).compose(a).compose(b);
                if !c.is_identity() && !gens.contains(&c) {
                    gens.push(c);
                }
            }
        }
        let mut h = PermGroup::close(self.degree, gens.clone())?;
        // normal closure under the ambient generators
        loop {
            let mut grew = false;
            for g in &self.generators {
                for x in h.generators.clone() {
                    let y = x.conjugate_by(g);
                    if !h.contains(&y) {
                        gens.push(y);
                        grew = true;
                    }
                }
            }
            if !grew {
                return Ok(h);
            }
            h = PermGroup::close(self.degree, gens.clone())?;
        }
    }

    /// Derived series reaches the trivial group.
    pub fn is_solvable(&self) -> bool {
        let mut current = self.clone();
        for _ in 0..=self.order() {
            if current.order() == 1 {
                return true;
            }
            let next = match current.derived_subgroup() {
                Ok(g) => g,
                Err(_) => return false,
            };
            if next.order() == current.order() {
                return false;
            }
            current = next;
        }
        false
    }

    /// A finite group is nilpotent exactly when elements of coprime
    /// prime-power orders always commute.
    pub fn is_nilpotent(&self) -> bool {
        let primary: Vec<(usize, &Permutation)> = self
            .elements
            .iter()
            .filter_map(|g| {
                let o = g.order();
                let p = (2..=o).find(|d| o % d == 0)?;
                let mut r = o;
                while r % p == 0 {
                    r /= p;
                }
                (r == 1).then_some((p, g))
            })
            .collect();
        primary.iter().all(|&(p, a)| {
            primary
                .iter()
                .all(|&(q, b)| p == q || a.compose(b) == b.compose(a))
        })
    }

    pub fn summary(&self) -> GroupSummary {
        GroupSummary {
            order: self.order(),
            abelian: self.is_abelian(),
            transitive: self.is_transitive(),
            regular: self.is_regular(),
            solvable: self.is_solvable(),
        }
    }
}

fn left_translations(x: &Magma) -> Result<Vec<Permutation>> {
    if !x.is_left_quasigroup() {
        return Err(Error::NotLeftQuasigroup);
    }
    Ok((0..x.order())
        .map(|a| Permutation::left_translation(x, a))
        .collect())
}

/// `LMlt X = ⟨L_x⟩`.
pub fn lmlt(x: &Magma) -> Result<PermGroup> {
    PermGroup::close(x.order(), left_translations(x)?)
}

/// Generators `L_x, R_x` of `Mlt X`.
pub fn mlt_generators(x: &Magma) -> Result<Vec<Permutation>> {
    if !x.is_quasigroup() {
        return Err(Error::NotQuasigroup);
    }
    let mut gens = left_translations(x)?;
    gens.extend((0..x.order()).map(|a| Permutation::right_translation(x, a)));
    Ok(gens)
}

/// `Mlt X = ⟨L_x, R_x⟩`.
pub fn mlt(x: &Magma) -> Result<PermGroup> {
    PermGroup::close(x.order(), mlt_generators(x)?)
}

/// `Dis⁺ X = ⟨L_x L_0⁻¹⟩`.
pub fn dis_plus(x: &Magma) -> Result<PermGroup> {
    let l = left_translations(x)?;
    let e_inv = l[0].inverse();
    PermGroup::close(x.order(), l.iter().map(|lx| lx.compose(&e_inv)).collect())
}

/// `Dis⁻ X = ⟨L_0⁻¹ L_x⟩`.
pub fn dis_minus(x: &Magma) -> Result<PermGroup> {
    let l = left_translations(x)?;
    let e_inv = l[0].inverse();
    PermGroup::close(x.order(), l.iter().map(|lx| e_inv.compose(lx)).collect())
}

/// `Dis X = ⟨L_x L_0⁻¹, L_0⁻¹ L_x⟩`.
pub fn dis(x: &Magma) -> Result<PermGroup> {
    let l = left_translations(x)?;
    let e_inv = l[0].inverse();
    let mut gens: Vec<Permutation> = l.iter().map(|lx| lx.compose(&e_inv)).collect();
    gens.extend(l.iter().map(|lx| e_inv.compose(lx)));
    PermGroup::close(x.order(), gens)
}

/// Largest orders of `L_x L_y⁻¹` and of `R_x R_y⁻¹` over all pairs.
pub fn bothsided_generator_exponents(x: &Magma) -> Result<(usize, usize)> {
    if !x.is_both_sided_rumple() {
        return Err(Error::NotBothSided);
    }
    let n = x.order();
    let l: Vec<Permutation> = (0..n).map(|a| Permutation::left_translation(x, a)).collect();
    let r: Vec<Permutation> = (0..n).map(|a| Permutation::right_translation(x, a)).collect();
    let mut left = 1;
    let mut right = 1;
    for a in 0..n {
        for b in 0..n {
            left = left.max(l[a].compose(&l[b].inverse()).order());
            right = right.max(r[a].compose(&r[b].inverse()).order());
        }
    }
    Ok((left, right))
}
