//! Affine rumples `x∗y = φ(x) + ψ(y) + c` over finite abelian groups.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp;
use crate::iso::find_isomorphism;
use crate::magma::{gcd, Magma};
use crate::permgroup::{dis, mlt_generators, PermGroup, Permutation};

/// Default bound on `|G|` for enumeration.
pub const DEFAULT_GROUP_BOUND: usize = 10_000;
/// Largest number of compatible matrices scanned when materializing `Aut(G)`.
pub const COMPATIBLE_MATRIX_CAP: u64 = 1 << 26;

/// `Z_{n₁} × ⋯ × Z_{n_k}`; elements are tuples, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct AbelianGroup {
    factors: Vec<usize>,
}

impl TryFrom<Vec<usize>> for AbelianGroup {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        AbelianGroup::new(v)
    }
}

impl From<AbelianGroup> for Vec<usize> {
    fn from(g: AbelianGroup) -> Self {
        g.factors
    }
}

impl AbelianGroup {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if let Some(&m) = factors.iter().find(|&&m| m < 2) {
            return Err(Error::IncompatibleMatrix(format!("cyclic factor {m} is below 2")));
        }
        Ok(AbelianGroup { factors })
    }

    pub fn elementary(p: usize, rank: usize) -> Self {
        AbelianGroup {
            factors: vec![p; rank],
        }
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    /// The prime if every factor is that same prime.
    pub fn elementary_prime(&self) -> Option<usize> {
        let &p = self.factors.first()?;
        (fp::is_prime(p as u64) && self.factors.iter().all(|&m| m == p)).then_some(p)
    }

    /// Elementary divisors (prime powers), sorted; equal exactly for isomorphic groups.
    pub fn normalized(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for &m in &self.factors {
            for (p, k) in factorize(m) {
                out.push(p.pow(k as u32));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn zero(&self) -> Vec<usize> {
        vec![0; self.rank()]
    }

    pub fn add(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        a.iter()
            .zip(b)
            .zip(&self.factors)
            .map(|((&x, &y), &m)| (x + y) % m)
            .collect()
    }

    pub fn neg(&self, a: &[usize]) -> Vec<usize> {
        a.iter()
            .zip(&self.factors)
            .map(|(&x, &m)| (m - x % m) % m)
            .collect()
    }

    pub fn sub(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        self.add(a, &self.neg(b))
    }

    pub fn index_of(&self, a: &[usize]) -> usize {
        a.iter()
            .zip(&self.factors)
            .fold(0, |acc, (&x, &m)| acc * m + x % m)
    }

    pub fn element(&self, mut index: usize) -> Vec<usize> {
        let mut a = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            a[i] = index % self.factors[i];
            index /= self.factors[i];
        }
        a
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    pub fn contains(&self, a: &[usize]) -> bool {
        a.len() == self.rank() && a.iter().zip(&self.factors).all(|(&x, &m)| x < m)
    }
}

/// Prime factorization as (prime, exponent) pairs in increasing order.
pub fn factorize(mut m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut k = 0;
            while m.is_multiple_of(p) {
                m /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// An endomorphism as an integer matrix; column `j` is the image of the `j`-th
/// generator and row `i` is read modulo `nᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Endomorphism {
    pub matrix: Vec<Vec<usize>>,
}

impl Endomorphism {
    /// Reduces entries (which may be negative) and checks compatibility with `g`.
    pub fn new(g: &AbelianGroup, entries: &[Vec<i64>]) -> Result<Self> {
        let k = g.rank();
        if entries.len() != k || entries.iter().any(|r| r.len() != k) {
            return Err(Error::IncompatibleMatrix(format!("expected a {k}×{k} matrix")));
        }
        let matrix = entries
            .iter()
            .zip(g.factors())
            .map(|(row, &m)| row.iter().map(|&v| v.rem_euclid(m as i64) as usize).collect())
            .collect();
        let e = Endomorphism { matrix };
        check_compatible(g, &e)?;
        Ok(e)
    }

    pub fn identity(g: &AbelianGroup) -> Self {
        let k = g.rank();
        Endomorphism {
            matrix: (0..k).map(|i| (0..k).map(|j| usize::from(i == j)).collect()).collect(),
        }
    }

    pub fn zero(g: &AbelianGroup) -> Self {
        let k = g.rank();
        Endomorphism {
            matrix: vec![vec![0; k]; k],
        }
    }

    /// Multiplication by an integer.
    pub fn scalar(g: &AbelianGroup, s: i64) -> Self {
        let k = g.rank();
        Endomorphism {
            matrix: (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| if i == j { s.rem_euclid(g.factors()[i] as i64) as usize } else { 0 })
                        .collect()
                })
                .collect(),
        }
    }
}

pub fn check_compatible(g: &AbelianGroup, m: &Endomorphism) -> Result<()> {
    let f = g.factors();
    let k = f.len();
    if m.matrix.len() != k || m.matrix.iter().any(|r| r.len() != k) {
        return Err(Error::IncompatibleMatrix(format!("expected a {k}×{k} matrix")));
    }
    for i in 0..k {
        for j in 0..k {
            let step = f[i] / gcd(f[i], f[j]);
            if !(m.matrix[i][j] % f[i]).is_multiple_of(step) {
                return Err(Error::IncompatibleMatrix(format!(
                    "entry ({i},{j}) = {} is not a multiple of {step}",
                    m.matrix[i][j]
                )));
            }
        }
    }
    Ok(())
}

pub fn endo_apply(g: &AbelianGroup, m: &Endomorphism, x: &[usize]) -> Result<Vec<usize>> {
    check_compatible(g, m)?;
    Ok(apply(g, m, x))
}

#[inline]
fn apply(g: &AbelianGroup, m: &Endomorphism, x: &[usize]) -> Vec<usize> {
    m.matrix
        .iter()
        .zip(g.factors())
        .map(|(row, &n)| row.iter().zip(x).map(|(&a, &b)| a * b % n).sum::<usize>() % n)
        .collect()
}

/// `M ∘ N` (apply `N` first).
pub fn endo_compose(g: &AbelianGroup, m: &Endomorphism, n: &Endomorphism) -> Result<Endomorphism> {
    check_compatible(g, m)?;
    check_compatible(g, n)?;
    Ok(compose(g, m, n))
}

fn compose(g: &AbelianGroup, m: &Endomorphism, n: &Endomorphism) -> Endomorphism {
    let k = g.rank();
    let f = g.factors();
    Endomorphism {
        matrix: (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| (0..k).map(|t| m.matrix[i][t] * n.matrix[t][j] % f[i]).sum::<usize>() % f[i])
                    .collect()
            })
            .collect(),
    }
}

fn sub_endo(g: &AbelianGroup, m: &Endomorphism, n: &Endomorphism) -> Endomorphism {
    let f = g.factors();
    Endomorphism {
        matrix: m
            .matrix
            .iter()
            .zip(&n.matrix)
            .zip(f)
            .map(|((a, b), &q)| a.iter().zip(b).map(|(&x, &y)| (x + q - y % q) % q).collect())
            .collect(),
    }
}

/// The induced map on all of `G`, by element index.
pub fn element_map(g: &AbelianGroup, m: &Endomorphism) -> Vec<usize> {
    g.elements().map(|x| g.index_of(&apply(g, m, &x))).collect()
}

/// Bijectivity by direct evaluation over every element.
pub fn is_automorphism(g: &AbelianGroup, m: &Endomorphism) -> Result<bool> {
    check_compatible(g, m)?;
    Ok(crate::magma::is_permutation(&element_map(g, m)))
}

/// Inverse of an automorphism, read off from the inverse element map.
pub fn endo_inverse(g: &AbelianGroup, m: &Endomorphism) -> Result<Endomorphism> {
    check_compatible(g, m)?;
    let map = element_map(g, m);
    let inv = crate::magma::invert(&map).ok_or(Error::NotInvertible)?;
    let k = g.rank();
    let mut matrix = vec![vec![0; k]; k];
    for j in 0..k {
        let mut e = g.zero();
        e[j] = 1;
        let pre = g.element(inv[g.index_of(&e)]);
        for i in 0..k {
            matrix[i][j] = pre[i];
        }
    }
    Ok(Endomorphism { matrix })
}

/// `Aut(G)` criterion through `G/pG` for every prime `p` dividing `|G|`.
fn invertible_mod_primes(g: &AbelianGroup, m: &Endomorphism) -> bool {
    let f = g.factors();
    factorize(g.order()).into_iter().all(|(p, _)| {
        let idx: Vec<usize> = (0..f.len()).filter(|&i| f[i].is_multiple_of(p)).collect();
        let red: fp::Matrix = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| (m.matrix[i][j] % p) as u64).collect())
            .collect();
        fp::det(&red, p as u64) != 0
    })
}

/// `Aff(G, φ, ψ, c)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineDatum {
    #[serde(rename = "factors")]
    pub group: AbelianGroup,
    pub phi: Endomorphism,
    pub psi: Endomorphism,
    pub c: Vec<usize>,
}

/// Flags recorded when a datum is validated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumFlags {
    pub psi_automorphism: bool,
    pub phi_automorphism: bool,
}

impl AffineDatum {
    pub fn new(group: AbelianGroup, phi: Endomorphism, psi: Endomorphism, c: Vec<usize>) -> Result<Self> {
        check_compatible(&group, &phi)?;
        check_compatible(&group, &psi)?;
        if !group.contains(&c) {
            return Err(Error::IncompatibleMatrix(format!("constant {c:?} is not a group element")));
        }
        Ok(AffineDatum { group, phi, psi, c })
    }

    /// `Aff(Z_n, a, b, c)` with integer parameters.
    pub fn cyclic(n: usize, a: i64, b: i64, c: i64) -> Result<Self> {
        let g = AbelianGroup::new(vec![n])?;
        let phi = Endomorphism::scalar(&g, a);
        let psi = Endomorphism::scalar(&g, b);
        AffineDatum::new(g, phi, psi, vec![c.rem_euclid(n as i64) as usize])
    }

    pub fn flags(&self) -> DatumFlags {
        DatumFlags {
            psi_automorphism: crate::magma::is_permutation(&element_map(&self.group, &self.psi)),
            phi_automorphism: crate::magma::is_permutation(&element_map(&self.group, &self.phi)),
        }
    }
}

/// The multiplication table of `Aff(G, φ, ψ, c)` in lexicographic element order.
pub fn aff_to_magma(d: &AffineDatum) -> Magma {
    let g = &d.group;
    let n = g.order();
    let phi = element_map(g, &d.phi);
    let psi = element_map(g, &d.psi);
    let elems: Vec<Vec<usize>> = g.elements().collect();
    let mut table = Vec::with_capacity(n * n);
    for x in 0..n {
        let px = &elems[phi[x]];
        let base = g.add(px, &d.c);
        for y in 0..n {
            table.push(g.index_of(&g.add(&base, &elems[psi[y]])));
        }
    }
    Magma::from_flat(n, table).expect("affine table is in range")
}

/// `φψ − ψφ = φ²`; with both maps invertible, the two equivalent forms
/// `[ψ, φ⁻¹] = 1` and `[φ⁻¹, ψ⁻¹] = ψ⁻²` are computed and must agree.
pub fn rump_condition(g: &AbelianGroup, phi: &Endomorphism, psi: &Endomorphism) -> Result<bool> {
    check_compatible(g, phi)?;
    check_compatible(g, psi)?;
    let holds = rump_holds(g, phi, psi);
    if invertible_mod_primes(g, phi) && invertible_mod_primes(g, psi) {
        let pi = endo_inverse(g, phi)?;
        let si = endo_inverse(g, psi)?;
        let ba = sub_endo(g, &compose(g, psi, &pi), &compose(g, &pi, psi));
        let first = ba == Endomorphism::identity(g);
        let ab = sub_endo(g, &compose(g, &pi, &si), &compose(g, &si, &pi));
        let second = ab == compose(g, &si, &si);
        assert_eq!(holds, first, "commutator forms of the Rump condition disagree");
        assert_eq!(holds, second, "inverse forms of the Rump condition disagree");
    }
    Ok(holds)
}

fn rump_holds(g: &AbelianGroup, phi: &Endomorphism, psi: &Endomorphism) -> bool {
    let lhs = sub_endo(g, &compose(g, phi, psi), &compose(g, psi, phi));
    lhs == compose(g, phi, phi)
}

/// Whether `A`, `A²`, `B⁻¹`, `B⁻²` all have trace zero over `F_p`.
pub fn trace_conditions(p: u64, a: &fp::Matrix, b: &fp::Matrix) -> Result<bool> {
    fp::inverse(a, p).ok_or(Error::NotInvertible)?;
    let bi = fp::inverse(b, p).ok_or(Error::NotInvertible)?;
    let a2 = fp::mul(a, a, p);
    let bi2 = fp::mul(&bi, &bi, p);
    Ok([a, &a2, &bi, &bi2].iter().all(|m| fp::trace(m, p) == 0))
}

/// `Im(1 − φ − ψ)` as a sorted list of element indices.
pub fn constant_shift_image(d: &AffineDatum) -> Vec<usize> {
    let g = &d.group;
    let one = Endomorphism::identity(g);
    let m = sub_endo(g, &sub_endo(g, &one, &d.phi), &d.psi);
    let mut img = element_map(g, &m);
    img.sort_unstable();
    img.dedup();
    img
}

/// An isomorphism witness `(α, u)`: `φ₂ = αφ₁α⁻¹`, `ψ₂ = αψ₁α⁻¹`, `c₂ = α(c₁ + u)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrapalWitness {
    pub alpha: Endomorphism,
    pub u: Vec<usize>,
}

/// Searches `Aut(G)` and `Im(1−φ₁−ψ₁)` for a witness that the two data give
/// isomorphic quasigroups. Both data must use the same factor list; groups
/// with different normalized forms are never isomorphic.
pub fn drapal_isomorphic(d1: &AffineDatum, d2: &AffineDatum) -> Result<Option<DrapalWitness>> {
    if d1.group.normalized() != d2.group.normalized() {
        return Ok(None);
    }
    if d1.group != d2.group {
        return Err(Error::IncompatibleMatrix(
            "isomorphic groups in different presentations; rewrite one datum".into(),
        ));
    }
    let g = &d1.group;
    let aut = automorphism_group(g)?;
    let image = constant_shift_image(d1);
    for alpha in &aut.elements {
        if compose(g, alpha, &d1.phi) != compose(g, &d2.phi, alpha)
            || compose(g, alpha, &d1.psi) != compose(g, &d2.psi, alpha)
        {
            continue;
        }
        // u = α⁻¹(c₂) − c₁ must lie in the image
        let ainv = endo_inverse(g, alpha)?;
        let u = g.sub(&apply(g, &ainv, &d2.c), &d1.c);
        if image.binary_search(&g.index_of(&u)).is_ok() {
            return Ok(Some(DrapalWitness {
                alpha: alpha.clone(),
                u,
            }));
        }
    }
    Ok(None)
}

/// `Aut(G)` as a sorted list of matrices.
pub struct AutGroup {
    pub elements: Vec<Endomorphism>,
    index: HashMap<Endomorphism, usize>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn position(&self, m: &Endomorphism) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// Materializes `Aut(G)` by filtering every compatible matrix.
pub fn automorphism_group(g: &AbelianGroup) -> Result<AutGroup> {
    let f = g.factors();
    let k = f.len();
    // choices per entry: multiples of nᵢ/gcd(nᵢ,nⱼ) below nᵢ
    let steps: Vec<(usize, usize)> = (0..k * k)
        .map(|e| {
            let (i, j) = (e / k, e % k);
            let d = gcd(f[i], f[j]);
            (f[i] / d, d)
        })
        .collect();
    let total: u64 = steps.iter().map(|&(_, d)| d as u64).product();
    if total > COMPATIBLE_MATRIX_CAP {
        return Err(Error::BoundExceeded(format!(
            "{total} compatible matrices for group {f:?}"
        )));
    }
    let mut elements = Vec::new();
    let mut digits = vec![0usize; k * k];
    let mut m = Endomorphism::zero(g);
    for _ in 0..total {
        for e in 0..k * k {
            m.matrix[e / k][e % k] = digits[e] * steps[e].0;
        }
        if invertible_mod_primes(g, &m) {
            elements.push(m.clone());
        }
        // odometer, last entry fastest, so output is lexicographically sorted
        for e in (0..k * k).rev() {
            digits[e] += 1;
            if digits[e] < steps[e].1 {
                break;
            }
            digits[e] = 0;
        }
    }
    let index = elements.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    Ok(AutGroup { elements, index })
}

/// A small generating set of `Aut(G)`, grown until it generates everything.
fn aut_generators(g: &AbelianGroup, aut: &AutGroup) -> Vec<usize> {
    let n = aut.order();
    let mut in_h = vec![false; n];
    let id = aut.position(&Endomorphism::identity(g)).expect("identity is an automorphism");
    in_h[id] = true;
    let mut members = vec![id];
    let mut gens: Vec<usize> = Vec::new();
    let mut probe = 0usize;
    while members.len() < n {
        // a deterministic stride through the elements
        probe = (probe + 7919) % n;
        let mut cand = probe;
        while in_h[cand] {
            cand = (cand + 1) % n;
        }
        gens.push(cand);
        // close: BFS from all members using all generators
        let mut frontier = members.clone();
        while let Some(h) = frontier.pop() {
            for &s in &gens {
                let prod = compose(g, &aut.elements[s], &aut.elements[h]);
                let pi = aut.position(&prod).expect("closed under composition");
                if !in_h[pi] {
                    in_h[pi] = true;
                    members.push(pi);
                    frontier.push(pi);
                }
            }
        }
    }
    gens
}

/// One representative per isomorphism class of affine latin rumples over `G`,
/// sorted by serialized datum.
///
/// Representatives come from orbit computations: `φ` up to conjugation in
/// `Aut(G)`, then `ψ` up to the centralizer of `φ`, then `c` modulo
/// `Im(1−φ−ψ)` up to the common centralizer of `φ` and `ψ`.
pub fn enumerate_affine_latin(g: &AbelianGroup, bound: usize) -> Result<Vec<AffineDatum>> {
    if g.order() > bound {
        return Err(Error::BoundExceeded(format!("|G| = {} exceeds {bound}", g.order())));
    }
    if g.rank() == 0 {
        // the one-element group: 1·1 = 1 is a latin rumple
        let d = AffineDatum::new(g.clone(), Endomorphism::zero(g), Endomorphism::zero(g), vec![])?;
        return Ok(vec![d]);
    }
    let aut = automorphism_group(g)?;
    let n_aut = aut.order();
    let gens = aut_generators(g, &aut);
    let inverses: Vec<usize> = aut
        .elements
        .iter()
        .map(|m| aut.position(&endo_inverse(g, m).expect("automorphism")).unwrap())
        .collect();

    // conjugacy classes of φ: union-find under conjugation by generators
    let mut parent: Vec<usize> = (0..n_aut).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for a in 0..n_aut {
        for &s in &gens {
            let conj = compose(g, &compose(g, &aut.elements[s], &aut.elements[a]), &aut.elements[inverses[s]]);
            let b = aut.position(&conj).unwrap();
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                // keep the smaller index as root, so roots are lexicographic minima
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
    }
    let phi_reps: Vec<usize> = (0..n_aut).filter(|&a| find(&mut parent, a) == a).collect();

    // reductions mod each prime, used to look up ψ candidates
    let primes: Vec<usize> = factorize(g.order()).into_iter().map(|(p, _)| p).collect();
    let reduce = |m: &Endomorphism| -> Vec<Vec<u64>> {
        primes.iter().map(|&p| reduced(g, m, p).into_iter().flatten().collect()).collect()
    };
    let mut by_reduction: HashMap<Vec<Vec<u64>>, Vec<usize>> = HashMap::new();
    for (i, m) in aut.elements.iter().enumerate() {
        by_reduction.entry(reduce(m)).or_default().push(i);
    }

    let elems: Vec<Vec<usize>> = g.elements().collect();
    let mut out = Vec::new();
    for &pi in &phi_reps {
        let phi = &aut.elements[pi];
        // solution spaces of the reduced equation, one per prime
        let mut spaces = Vec::new();
        let mut feasible = true;
        for &p in &primes {
            let a = reduced(g, phi, p);
            let rank = a.len();
            if rank > 0 && g.elementary_prime().is_some() {
                // necessary: tr A = tr A² = 0 (the ψ side is checked on each candidate)
                let a2 = fp::mul(&a, &a, p as u64);
                if fp::trace(&a, p as u64) != 0 || fp::trace(&a2, p as u64) != 0 {
                    feasible = false;
                    break;
                }
            }
            match reduced_solutions(&a, p as u64) {
                Some(s) => spaces.push(s),
                None => {
                    feasible = false;
                    break;
                }
            }
        }
        if !feasible {
            continue;
        }
        let mut psis = Vec::new();
        for combo in cartesian(&spaces) {
            if let Some(list) = by_reduction.get(&combo) {
                for &si in list {
                    if rump_holds(g, phi, &aut.elements[si]) {
                        psis.push(si);
                    }
                }
            }
        }
        if psis.is_empty() {
            continue;
        }
        psis.sort_unstable();
        let centralizer: Vec<usize> = (0..n_aut)
            .filter(|&a| compose(g, &aut.elements[a], phi) == compose(g, phi, &aut.elements[a]))
            .collect();
        let mut seen = std::collections::HashSet::new();
        for &si in &psis {
            if seen.contains(&si) {
                continue;
            }
            let psi = &aut.elements[si];
            let mut stabilizer = Vec::new();
            for &a in &centralizer {
                let conj = compose(g, &compose(g, &aut.elements[a], psi), &aut.elements[inverses[a]]);
                let ci = aut.position(&conj).unwrap();
                seen.insert(ci);
                if ci == si {
                    stabilizer.push(a);
                }
            }
            // ψ-orbit representative is the least index since psis is sorted
            let datum0 = AffineDatum::new(g.clone(), phi.clone(), psi.clone(), g.zero())?;
            let image = constant_shift_image(&datum0);
            let coset_rep = |c: usize| -> usize {
                image
                    .iter()
                    .map(|&u| g.index_of(&g.add(&elems[c], &elems[u])))
                    .min()
                    .unwrap()
            };
            let mut done = vec![false; g.order()];
            for c in 0..g.order() {
                let rep = coset_rep(c);
                if done[rep] {
                    continue;
                }
                let mut orbit_min = rep;
                for &a in &stabilizer {
                    let moved = g.index_of(&apply(g, &aut.elements[a], &elems[rep]));
                    let r = coset_rep(moved);
                    done[r] = true;
                    orbit_min = orbit_min.min(r);
                }
                done[rep] = true;
                debug_assert_eq!(orbit_min, rep, "orbits are visited from their least coset");
                let d = AffineDatum::new(g.clone(), phi.clone(), psi.clone(), elems[orbit_min].clone())?;
                out.push(d);
            }
        }
    }
    for d in &out {
        assert!(aff_to_magma(d).is_latin_rumple(), "enumerated datum is not a latin rumple");
    }
    out.sort_by_cached_key(|d| serde_json::to_string(d).expect("serializable"));
    Ok(out)
}

/// The matrix induced on `G/pG`, restricted to factors divisible by `p`.
fn reduced(g: &AbelianGroup, m: &Endomorphism, p: usize) -> fp::Matrix {
    let f = g.factors();
    let idx: Vec<usize> = (0..f.len()).filter(|&i| f[i].is_multiple_of(p)).collect();
    idx.iter()
        .map(|&i| idx.iter().map(|&j| (m.matrix[i][j] % p) as u64).collect())
        .collect()
}

/// All `X` over `F_p` with `AX − XA = A²`, flattened row-major; `None` if none.
fn reduced_solutions(a: &fp::Matrix, p: u64) -> Option<Vec<Vec<u64>>> {
    let r = a.len();
    if r == 0 {
        return Some(vec![Vec::new()]);
    }
    // unknown X[s][t] at column s·r + t; equation (i,j): Σ_t A[i][t]X[t][j] − Σ_s X[i][s]A[s][j]
    let mut rows = Vec::with_capacity(r * r);
    let mut rhs = Vec::with_capacity(r * r);
    let a2 = fp::mul(a, a, p);
    for i in 0..r {
        for j in 0..r {
            let mut row = vec![0u64; r * r];
            for t in 0..r {
                row[t * r + j] = (row[t * r + j] + a[i][t]) % p;
            }
            for s in 0..r {
                row[i * r + s] = (row[i * r + s] + p - a[s][j] % p) % p;
            }
            rows.push(row);
            rhs.push(a2[i][j]);
        }
    }
    let x0 = fp::solve(&rows, &rhs, p)?;
    let kernel = fp::nullspace(&rows, r * r, p);
    let mut out = Vec::new();
    let dim = kernel.len();
    let count = (p as usize).checked_pow(dim as u32)?;
    for mut code in 0..count {
        let mut v = x0.clone();
        for kv in &kernel {
            let coef = (code % p as usize) as u64;
            code /= p as usize;
            for (x, &b) in v.iter_mut().zip(kv) {
                *x = (*x + coef * b) % p;
            }
        }
        out.push(v);
    }
    Some(out)
}

fn cartesian(spaces: &[Vec<Vec<u64>>]) -> Vec<Vec<Vec<u64>>> {
    let mut acc: Vec<Vec<Vec<u64>>> = vec![Vec::new()];
    for s in spaces {
        let mut next = Vec::with_capacity(acc.len() * s.len());
        for a in &acc {
            for v in s {
                let mut c = a.clone();
                c.push(v.clone());
                next.push(c);
            }
        }
        acc = next;
    }
    acc
}

/// Whether some affine latin rumple has order `m`: every prime `p` must divide
/// its exponent in `m`.
pub fn spectrum_admits(m: usize) -> bool {
    assert!(m >= 1, "order must be positive");
    factorize(m).into_iter().all(|(p, k)| k % p == 0)
}

/// `Circ(c₁,…,cₙ)`: row `i` is `c` rotated right by `i`.
pub fn circulant(c: &[u64], p: u64) -> fp::Matrix {
    let n = c.len();
    (0..n)
        .map(|i| (0..n).map(|j| c[(j + n - i) % n] % p).collect())
        .collect()
}

/// `D` with `d_{i+1,i} = i` (1-based) and zeros elsewhere.
fn shift_diagonal(n: usize, p: u64) -> fp::Matrix {
    let mut d = vec![vec![0u64; n]; n];
    for i in 1..n {
        d[i][i - 1] = i as u64 % p;
    }
    d
}

/// `A = Circ(0,…,0,1)` and `B = I − D` over `F_p`.
pub fn canonical_char_pair(n: usize, p: u64) -> Result<(fp::Matrix, fp::Matrix)> {
    if n == 0 || !(n as u64).is_multiple_of(p) {
        return Err(Error::CharMismatch { n, p: p as usize });
    }
    let mut c = vec![0u64; n];
    c[n - 1] = 1;
    let a = circulant(&c, p);
    let b = fp::sub(&fp::identity(n), &shift_diagonal(n, p), p);
    let ai = fp::inverse(&a, p).expect("a permutation matrix is invertible");
    assert!(fp::det(&b, p) != 0, "B = I − D is unitriangular");
    let comm = fp::sub(&fp::mul(&b, &ai, p), &fp::mul(&ai, &b, p), p);
    assert_eq!(comm, fp::identity(n), "[B, A⁻¹] = I fails for the characteristic pair");
    Ok((a, b))
}

/// `Circ(c) − D` over `F_p`, with `c` of length `p`.
pub fn circulant_b(p: u64, c: &[u64]) -> fp::Matrix {
    fp::sub(&circulant(c, p), &shift_diagonal(c.len(), p), p)
}

/// `det(Circ(c) − D) ≡ c₁ + ⋯ + c_{p−1} (mod p)`, checked against elimination.
pub fn circulant_det_formula(p: u64, c: &[u64]) -> u64 {
    assert_eq!(c.len() as u64, p, "the vector has length p");
    let formula = c[..c.len() - 1].iter().sum::<u64>() % p;
    assert_eq!(formula, fp::det(&circulant_b(p, c), p), "determinant formula fails");
    formula
}

/// `Aff(Z_p^p, Circ(0,…,0,1), Circ(c) − D, constant)`, checked to be a latin rumple.
pub fn build_cc_rumple(p: u64, c: &[u64], constant: &[usize]) -> Result<(AffineDatum, Magma)> {
    if c.len() as u64 != p || !fp::is_prime(p) {
        return Err(Error::CharMismatch { n: c.len(), p: p as usize });
    }
    if circulant_det_formula(p, c) == 0 {
        return Err(Error::SingularB);
    }
    let n = p as usize;
    let g = AbelianGroup::elementary(n, n);
    let mut shift = vec![0u64; n];
    shift[n - 1] = 1;
    let to_endo = |m: fp::Matrix| Endomorphism {
        matrix: m.into_iter().map(|r| r.into_iter().map(|v| v as usize).collect()).collect(),
    };
    let phi = to_endo(circulant(&shift, p));
    let psi = to_endo(circulant_b(p, c));
    let d = AffineDatum::new(g, phi, psi, constant.to_vec())?;
    let m = aff_to_magma(&d);
    assert!(m.is_latin_rumple(), "circulant construction is not a latin rumple");
    Ok((d, m))
}

// ---------------------------------------------------------------------------
// displacement-group characterizations

fn require_latin(x: &Magma) -> Result<()> {
    if x.is_latin_rumple() {
        Ok(())
    } else {
        Err(Error::NotLatinRumple)
    }
}

/// `Dis X` is abelian and normal in `Mlt X`.
pub fn is_affine(x: &Magma) -> Result<bool> {
    require_latin(x)?;
    let d = dis(x)?;
    let affine = d.is_abelian() && d.is_normalized_by(&mlt_generators(x)?);
    let abelian_iso = d.is_abelian();
    let group_iso = d.is_regular();
    assert!(!affine || abelian_iso, "affine but Dis not abelian");
    assert!(!abelian_iso || group_iso, "Dis abelian but not regular");
    Ok(affine)
}

/// `Dis X` acts regularly.
pub fn is_group_isotopic(x: &Magma) -> Result<bool> {
    require_latin(x)?;
    Ok(dis(x)?.is_regular())
}

/// `Dis X` is abelian.
pub fn is_abelian_group_isotopic(x: &Magma) -> Result<bool> {
    require_latin(x)?;
    let d = dis(x)?;
    let abelian = d.is_abelian();
    assert!(!abelian || d.is_regular(), "Dis abelian but not regular");
    Ok(abelian)
}

/// The affine representation over `Dis X` with base point 0, when `X` is affine.
///
/// `ξ(x) = L_x L_0⁻¹` is checked to be an isomorphism onto the result.
pub fn affinize(x: &Magma) -> Result<Option<AffineDatum>> {
    if !is_affine(x)? {
        return Ok(None);
    }
    let n = x.order();
    let e = 0;
    let d = dis(x)?;
    let basis = AbelianBasis::of(&d);
    let group = basis.group.clone();
    let l = |y: usize| Permutation::left_translation(x, y);
    let r = |y: usize| Permutation::right_translation(x, y);
    let sigma = Permutation::new(x.squaring_map())?;
    let ee = x.mul(e, e);
    let conj_matrix = |by: &Permutation| -> Endomorphism {
        let k = group.rank();
        let mut m = vec![vec![0; k]; k];
        for (j, b) in basis.generators.iter().enumerate() {
            let img = basis.coords(&b.conjugate_by(by));
            for i in 0..k {
                m[i][j] = img[i];
            }
        }
        Endomorphism { matrix: m }
    };
    let phi = conj_matrix(&r(ee));
    let psi = conj_matrix(&sigma);
    let le_inv = l(e).inverse();
    let c = basis.coords(&l(ee).compose(&le_inv));
    let datum = AffineDatum::new(group.clone(), phi, psi, c)?;
    let xi: Vec<usize> = (0..n)
        .map(|y| group.index_of(&basis.coords(&l(y).compose(&le_inv))))
        .collect();
    let target = aff_to_magma(&datum);
    assert!(crate::magma::is_permutation(&xi), "ξ is not a bijection");
    for a in 0..n {
        for b in 0..n {
            assert_eq!(xi[x.mul(a, b)], target.mul(xi[a], xi[b]), "ξ is not a homomorphism");
        }
    }
    assert!(
        crate::magma::is_permutation(&element_map(&datum.group, &datum.psi)),
        "ψ of an affinization must be an automorphism"
    );
    Ok(Some(datum))
}

/// A basis of a finite abelian permutation group, with coordinates.
struct AbelianBasis {
    group: AbelianGroup,
    generators: Vec<Permutation>,
    coords: HashMap<Vec<usize>, Vec<usize>>,
}

impl AbelianBasis {
    /// Sylow-wise: repeatedly take an element of largest order modulo the span
    /// so far and correct it so that its cyclic group meets the span trivially.
    fn of(group: &PermGroup) -> Self {
        let elems = group.elements();
        let order = |g: &Permutation| g.order();
        let mut generators: Vec<Permutation> = Vec::new();
        let mut factors = Vec::new();
        let total = group.order();
        for (p, _) in factorize(total.max(1)) {
            let sylow: Vec<&Permutation> = elems
                .iter()
                .filter(|g| factorize(order(g)).iter().all(|&(q, _)| q == p))
                .collect();
            let degree = group.degree();
            // span as map element → exponent vector over this prime's basis
            let mut span: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
            span.insert(Permutation::identity(degree).images().to_vec(), Vec::new());
            let mut basis: Vec<(Permutation, usize)> = Vec::new();
            while span.len() < sylow.len() {
                // order of g modulo the span
                let rel_order = |g: &Permutation| -> usize {
                    let mut k = 1;
                    let mut h = g.clone();
                    while !span.contains_key(h.images()) {
                        h = h.compose(g);
                        k += 1;
                    }
                    k
                };
                let (best, q) = sylow
                    .iter()
                    .map(|g| (*g, rel_order(g)))
                    .max_by_key(|&(g, k)| (k, std::cmp::Reverse(g.images().to_vec())))
                    .unwrap();
                let h = best.pow(q);
                let exps = span[h.images()].clone();
                let mut fixed = best.clone();
                for ((b, ord), &a) in basis.iter().zip(&exps) {
                    assert_eq!(a % q, 0, "basis correction is not divisible");
                    let back = (ord - a / q % ord) % ord;
                    fixed = fixed.compose(&b.pow(back));
                }
                assert!(fixed.pow(q).is_identity(), "corrected element has wrong order");
                // extend the span
                let old: Vec<(Vec<usize>, Vec<usize>)> = span.drain().collect();
                for (img, ex) in old {
                    let base = Permutation::new(img).unwrap();
                    let mut cur = base;
                    for t in 0..q {
                        let mut e2 = ex.clone();
                        e2.push(t);
                        span.insert(cur.images().to_vec(), e2);
                        cur = cur.compose(&fixed);
                    }
                }
                basis.push((fixed, q));
            }
            for (b, q) in basis {
                generators.push(b);
                factors.push(q);
            }
        }
        let ag = AbelianGroup { factors: factors.clone() };
        // coordinates of every element
        let mut coords = HashMap::new();
        for idx in 0..ag.order() {
            let v = ag.element(idx);
            let mut g = Permutation::identity(group.degree());
            for (b, &a) in generators.iter().zip(&v) {
                g = g.compose(&b.pow(a));
            }
            coords.insert(g.images().to_vec(), v);
        }
        assert_eq!(coords.len(), total, "basis does not give a direct decomposition");
        AbelianBasis {
            group: ag,
            generators,
            coords,
        }
    }

    fn coords(&self, g: &Permutation) -> Vec<usize> {
        self.coords[g.images()].clone()
    }
}

/// Isomorphism via the core search, for cross-checks against `drapal_isomorphic`.
pub fn magmas_isomorphic(d1: &AffineDatum, d2: &AffineDatum) -> bool {
    find_isomorphism(&aff_to_magma(d1), &aff_to_magma(d2)).is_some()
}

/// Number of classes per cyclic factor list, for reporting.
pub fn count_by_group(groups: &[AbelianGroup]) -> Result<BTreeMap<Vec<usize>, usize>> {
    groups
        .iter()
        .map(|g| Ok((g.factors().to_vec(), enumerate_affine_latin(g, DEFAULT_GROUP_BOUND)?.len())))
        .collect()
}
