//! Central extensions `(a,x)∗(b,y) = (φa + ψb + θ(x,y), xy)` of Rump left
//! quasigroups by abelian groups.

use serde::{Deserialize, Serialize};

use crate::affine::{
    aff_to_magma, element_map, endo_inverse, is_affine, rump_condition, AbelianGroup, AffineDatum,
    Endomorphism,
};
use crate::error::{Error, Result};
use crate::fp;
use crate::magma::{is_permutation, Magma};
use crate::permgroup::{dis, mlt_generators};

/// `θ: F×F → G`, stored as `values[x][y]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cocycle {
    pub values: Vec<Vec<Vec<usize>>>,
}

impl Cocycle {
    pub fn zero(g: &AbelianGroup, base_order: usize) -> Self {
        Cocycle {
            values: vec![vec![g.zero(); base_order]; base_order],
        }
    }

    pub fn base_order(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> &[usize] {
        &self.values[x][y]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionDatum {
    #[serde(rename = "factors")]
    pub group: AbelianGroup,
    pub base: Magma,
    pub phi: Endomorphism,
    pub psi: Endomorphism,
    pub theta: Cocycle,
}

impl ExtensionDatum {
    pub fn validate(&self) -> Result<()> {
        let g = &self.group;
        crate::affine::check_compatible(g, &self.phi)?;
        crate::affine::check_compatible(g, &self.psi)?;
        if !is_permutation(&element_map(g, &self.psi)) {
            return Err(Error::InvalidExtension("ψ is not an automorphism".into()));
        }
        if !(self.base.is_left_quasigroup() && self.base.satisfies_left_rump()) {
            return Err(Error::InvalidExtension(
                "base is not a left quasigroup with the left Rump identity".into(),
            ));
        }
        let nf = self.base.order();
        let theta = &self.theta.values;
        if theta.len() != nf || theta.iter().any(|r| r.len() != nf) {
            return Err(Error::InvalidExtension(format!("θ must be {nf}×{nf}")));
        }
        if theta.iter().flatten().any(|v| !g.contains(v)) {
            return Err(Error::InvalidExtension("θ has a value outside G".into()));
        }
        Ok(())
    }

    /// `(a, x)` ↦ `a_index · |F| + x`.
    pub fn element_index(&self, a: &[usize], x: usize) -> usize {
        self.group.index_of(a) * self.base.order() + x
    }
}

/// The table of `Ext(G, F, φ, ψ, θ)`, group coordinate major.
pub fn ext_to_magma(e: &ExtensionDatum) -> Result<Magma> {
    e.validate()?;
    Ok(build(e))
}

fn build(e: &ExtensionDatum) -> Magma {
    let g = &e.group;
    let nf = e.base.order();
    let ng = g.order();
    let phi = element_map(g, &e.phi);
    let psi = element_map(g, &e.psi);
    let elems: Vec<Vec<usize>> = g.elements().collect();
    let theta: Vec<usize> = e
        .theta
        .values
        .iter()
        .flatten()
        .map(|v| g.index_of(v))
        .collect();
    let n = ng * nf;
    let mut table = vec![0; n * n];
    for a in 0..ng {
        for x in 0..nf {
            let row = a * nf + x;
            for b in 0..ng {
                let ab = g.add(&elems[phi[a]], &elems[psi[b]]);
                for y in 0..nf {
                    let v = g.index_of(&g.add(&ab, &elems[theta[x * nf + y]]));
                    table[row * n + b * nf + y] = v * nf + e.base.mul(x, y);
                }
            }
        }
    }
    Magma::from_flat(n, table).expect("extension table is in range")
}

/// `(a,x)\(b,y) = (ψ⁻¹(b − φa − θ(x, x\y)), x\y)`.
pub fn ext_left_divide(e: &ExtensionDatum, a: &[usize], x: usize, b: &[usize], y: usize) -> Result<(Vec<usize>, usize)> {
    e.validate()?;
    let g = &e.group;
    let q = e.base.left_divide(x, y)?;
    let psi_inv = endo_inverse(g, &e.psi)?;
    let phia = crate::affine::endo_apply(g, &e.phi, a)?;
    let inner = g.sub(&g.sub(b, &phia), e.theta.at(x, q));
    Ok((crate::affine::endo_apply(g, &psi_inv, &inner)?, q))
}

/// The cocycle identity
/// `φ(θ(x,y)−θ(y,x)) + ψ(θ(x,z)−θ(y,z)) + θ(xy,xz) − θ(yx,yz) = 0`
/// on all triples; cross-checked against the left Rump identity of the
/// extension.
pub fn cocycle_condition(e: &ExtensionDatum) -> Result<bool> {
    e.validate()?;
    if !rump_condition(&e.group, &e.phi, &e.psi)? {
        return Err(Error::RumpConditionFails);
    }
    let holds = cocycle_holds(e);
    assert_eq!(
        holds,
        build(e).satisfies_left_rump(),
        "cocycle identity and Rump identity of the extension disagree"
    );
    Ok(holds)
}

fn cocycle_holds(e: &ExtensionDatum) -> bool {
    let g = &e.group;
    let f = &e.base;
    let nf = f.order();
    let th = |x: usize, y: usize| e.theta.at(x, y);
    let apply = |m: &Endomorphism, v: &[usize]| crate::affine::endo_apply(g, m, v).expect("compatible");
    for x in 0..nf {
        for y in 0..nf {
            let t1 = apply(&e.phi, &g.sub(th(x, y), th(y, x)));
            for z in 0..nf {
                let t2 = apply(&e.psi, &g.sub(th(x, z), th(y, z)));
                let t3 = g.sub(th(f.mul(x, y), f.mul(x, z)), th(f.mul(y, x), f.mul(y, z)));
                let total = g.add(&g.add(&t1, &t2), &t3);
                if total.iter().any(|&v| v != 0) {
                    return false;
                }
            }
        }
    }
    true
}

/// A basis of all cocycles over `G = Z_p^k`, from the linear system of the
/// cocycle identity. Unknown `θ(x,y)ᵢ` sits in column `i·|F|² + x·|F| + y`.
pub fn solve_cocycles(
    g: &AbelianGroup,
    base: &Magma,
    phi: &Endomorphism,
    psi: &Endomorphism,
) -> Result<Vec<Cocycle>> {
    let p = g
        .elementary_prime()
        .ok_or_else(|| Error::InvalidExtension("cocycles are solved over elementary abelian groups only".into()))?;
    if !rump_condition(g, phi, psi)? {
        return Err(Error::RumpConditionFails);
    }
    let k = g.rank();
    let nf = base.order();
    let cols = k * nf * nf;
    let var = |i: usize, x: usize, y: usize| i * nf * nf + x * nf + y;
    let pm = p as u64;
    let mut elim = Eliminator::new(cols, pm);
    let mut row = vec![0u64; cols];
    for x in 0..nf {
        for y in 0..nf {
            if x == y {
                continue;
            }
            // swapping x and y negates the equation
            if x > y {
                continue;
            }
            for z in 0..nf {
                for r in 0..k {
                    row.iter_mut().for_each(|v| *v = 0);
                    let mut add = |c: usize, v: u64| row[c] = (row[c] + v) % pm;
                    for j in 0..k {
                        let a = phi.matrix[r][j] as u64 % pm;
                        add(var(j, x, y), a);
                        add(var(j, y, x), pm - a);
                        let b = psi.matrix[r][j] as u64 % pm;
                        add(var(j, x, z), b);
                        add(var(j, y, z), pm - b);
                    }
                    add(var(r, base.mul(x, y), base.mul(x, z)), 1);
                    add(var(r, base.mul(y, x), base.mul(y, z)), pm - 1);
                    elim.insert(&row);
                }
            }
        }
    }
    let basis = elim.kernel();
    let out: Vec<Cocycle> = basis
        .into_iter()
        .map(|v| {
            let mut c = Cocycle::zero(g, nf);
            for i in 0..k {
                for x in 0..nf {
                    for y in 0..nf {
                        c.values[x][y][i] = v[var(i, x, y)] as usize;
                    }
                }
            }
            c
        })
        .collect();
    for c in &out {
        let e = ExtensionDatum {
            group: g.clone(),
            base: base.clone(),
            phi: phi.clone(),
            psi: psi.clone(),
            theta: c.clone(),
        };
        assert!(cocycle_holds(&e), "kernel vector fails the cocycle identity");
    }
    Ok(out)
}

/// Incremental Gaussian elimination keeping a reduced echelon basis.
struct Eliminator {
    cols: usize,
    p: u64,
    /// pivot column → normalized row
    pivots: Vec<Option<Vec<u64>>>,
}

impl Eliminator {
    fn new(cols: usize, p: u64) -> Self {
        Eliminator {
            cols,
            p,
            pivots: vec![None; cols],
        }
    }

    fn insert(&mut self, row: &[u64]) {
        let p = self.p;
        let mut r = row.to_vec();
        for c in 0..self.cols {
            if r[c] == 0 {
                continue;
            }
            match &self.pivots[c] {
                Some(pr) => {
                    let f = r[c];
                    for (v, &w) in r[c..].iter_mut().zip(&pr[c..]) {
                        *v = (*v + p * p - f * w) % p;
                    }
                }
                None => {
                    let inv = fp::pow_mod(r[c], p - 2, p);
                    r.iter_mut().for_each(|v| *v = *v * inv % p);
                    // keep earlier pivot rows reduced in this column
                    for pr in self.pivots.iter_mut().flatten() {
                        if pr[c] != 0 {
                            let f = pr[c];
                            for (v, &w) in pr.iter_mut().zip(&r) {
                                *v = (*v + p * p - f * w) % p;
                            }
                        }
                    }
                    self.pivots[c] = Some(r);
                    return;
                }
            }
        }
    }

    fn kernel(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        (0..self.cols)
            .filter(|&c| self.pivots[c].is_none())
            .map(|f| {
                let mut v = vec![0u64; self.cols];
                v[f] = 1;
                for (c, pr) in self.pivots.iter().enumerate() {
                    if let Some(pr) = pr {
                        v[c] = (p - pr[f] % p) % p;
                    }
                }
                v
            })
            .collect()
    }
}

/// The datum of the Klein construction over `F`: `G = Z₂²`,
/// `A = ((0,1),(1,0))`, `B = ((1,0),(1,1))`, `θ(x,y) = (0, [x = y])`.
pub fn klein_extension(f: &Magma) -> Result<ExtensionDatum> {
    if f.order() < 2 || !f.is_latin_rumple() || !is_affine(f)? {
        return Err(Error::BaseNotAffineLatin);
    }
    let g = AbelianGroup::elementary(2, 2);
    let phi = Endomorphism::new(&g, &[vec![0, 1], vec![1, 0]])?;
    let psi = Endomorphism::new(&g, &[vec![1, 0], vec![1, 1]])?;
    let nf = f.order();
    let mut theta = Cocycle::zero(&g, nf);
    for x in 0..nf {
        theta.values[x][x] = vec![0, 1];
    }
    let e = ExtensionDatum {
        group: g,
        base: f.clone(),
        phi,
        psi,
        theta,
    };
    let m = ext_to_magma(&e)?;
    assert_eq!(m.order(), 4 * nf);
    assert!(m.is_latin_rumple(), "Klein extension is not a latin rumple");
    assert!(!dis(&m)?.is_abelian(), "Klein extension has abelian displacement group");
    assert!(!is_affine(&m)?, "Klein extension is affine");
    Ok(e)
}

/// One step of an iterated construction; the base is whatever was built before.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionLayer {
    #[serde(rename = "factors")]
    pub group: AbelianGroup,
    pub phi: Endomorphism,
    pub psi: Endomorphism,
    pub theta: Cocycle,
}

impl ExtensionLayer {
    /// An affine layer `Aff(G, φ, ψ, c)` as an extension of the trivial magma.
    pub fn affine(d: &AffineDatum) -> Self {
        ExtensionLayer {
            group: d.group.clone(),
            phi: d.phi.clone(),
            psi: d.psi.clone(),
            theta: Cocycle {
                values: vec![vec![d.c.clone()]],
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct IteratedExtension {
    pub magma: Magma,
    /// Number of layers; bounds the nilpotence class from above.
    pub layers: usize,
}

/// Folds the layers over the trivial magma.
pub fn iterate_extensions(layers: &[ExtensionLayer]) -> Result<IteratedExtension> {
    let mut m = Magma::trivial();
    for (i, layer) in layers.iter().enumerate() {
        let e = ExtensionDatum {
            group: layer.group.clone(),
            base: m,
            phi: layer.phi.clone(),
            psi: layer.psi.clone(),
            theta: layer.theta.clone(),
        };
        e.validate()
            .map_err(|err| Error::InvalidExtension(format!("layer {i}: {err}")))?;
        m = build(&e);
    }
    Ok(IteratedExtension {
        magma: m,
        layers: layers.len(),
    })
}

/// Whether `m` factors as `∏ pᵢ^{pᵢ kᵢ}`, the possible orders of latin rumples
/// built by iterated central extensions.
pub fn nilpotent_order_admissible(m: usize) -> bool {
    crate::affine::spectrum_admits(m)
}

/// Properties hunted for among extensions by solved cocycles.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub order: usize,
    pub cocycle_dimension: usize,
    pub examined: usize,
    pub latin: usize,
    pub nonabelian_dis: Option<Finding>,
    pub abelian_dis_not_normal: Option<Finding>,
    pub right_rump_not_group_isotopic: Option<Finding>,
    pub dis_not_nilpotent: Option<Finding>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    /// Coefficients of the cocycle in the solved basis.
    pub coefficients: Vec<u64>,
    pub dis_order: usize,
    pub dis_center_order: usize,
    pub dis_exponent: usize,
    pub table: Magma,
}

/// Walks cocycle-space vectors in lexicographic coefficient order (at most
/// `cap` of them) and records the first extension showing each property.
pub fn search_witness(
    g: &AbelianGroup,
    base: &Magma,
    phi: &Endomorphism,
    psi: &Endomorphism,
    cap: usize,
) -> Result<WitnessReport> {
    let basis = solve_cocycles(g, base, phi, psi)?;
    let p = g.elementary_prime().expect("checked by the solver") as u64;
    let dim = basis.len();
    let total = (p as usize).checked_pow(dim as u32).unwrap_or(usize::MAX);
    let mut report = WitnessReport {
        order: g.order() * base.order(),
        cocycle_dimension: dim,
        ..Default::default()
    };
    let nf = base.order();
    for code in 0..total.min(cap) {
        let mut coeffs = vec![0u64; dim];
        let mut rest = code;
        for c in coeffs.iter_mut().rev() {
            *c = (rest % p as usize) as u64;
            rest /= p as usize;
        }
        let mut theta = Cocycle::zero(g, nf);
        for (coef, b) in coeffs.iter().zip(&basis) {
            for x in 0..nf {
                for y in 0..nf {
                    for i in 0..g.rank() {
                        let v = &mut theta.values[x][y][i];
                        *v = (*v + *coef as usize * b.values[x][y][i]) % p as usize;
                    }
                }
            }
        }
        let e = ExtensionDatum {
            group: g.clone(),
            base: base.clone(),
            phi: phi.clone(),
            psi: psi.clone(),
            theta,
        };
        let m = build(&e);
        report.examined += 1;
        if !m.is_latin_rumple() {
            continue;
        }
        report.latin += 1;
        let d = dis(&m)?;
        let finding = || Finding {
            coefficients: coeffs.clone(),
            dis_order: d.order(),
            dis_center_order: d.center().len(),
            dis_exponent: d.exponent(),
            table: m.clone(),
        };
        let abelian = d.is_abelian();
        if !abelian && report.nonabelian_dis.is_none() {
            report.nonabelian_dis = Some(finding());
        }
        if abelian && report.abelian_dis_not_normal.is_none() && !d.is_normalized_by(&mlt_generators(&m)?) {
            report.abelian_dis_not_normal = Some(finding());
        }
        if report.right_rump_not_group_isotopic.is_none() && m.satisfies_right_rump() && !d.is_regular() {
            report.right_rump_not_group_isotopic = Some(finding());
        }
        if report.dis_not_nilpotent.is_none() && !d.is_nilpotent() {
            report.dis_not_nilpotent = Some(finding());
        }
    }
    Ok(report)
}

/// `F = 1` recovers the affine construction.
pub fn affine_as_extension(d: &AffineDatum) -> Result<Magma> {
    let m = iterate_extensions(&[ExtensionLayer::affine(d)])?.magma;
    debug_assert_eq!(m, aff_to_magma(d));
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::affinize;

    fn x41() -> Magma {
        Magma::from_table(4, &[[0, 1, 3, 2], [2, 3, 1, 0], [1, 0, 2, 3], [3, 2, 0, 1]]).unwrap()
    }

    fn x42() -> Magma {
        Magma::from_table(4, &[[1, 3, 0, 2], [0, 2, 1, 3], [2, 0, 3, 1], [3, 1, 2, 0]]).unwrap()
    }

    fn klein_pair() -> (AbelianGroup, Endomorphism, Endomorphism) {
        let g = AbelianGroup::elementary(2, 2);
        let a = Endomorphism::new(&g, &[vec![0, 1], vec![1, 0]]).unwrap();
        let b = Endomorphism::new(&g, &[vec![1, 0], vec![1, 1]]).unwrap();
        (g, a, b)
    }

    #[test]
    fn klein_over_both_bases() {
        for f in [x41(), x42()] {
            let e = klein_extension(&f).unwrap();
            assert!(cocycle_condition(&e).unwrap());
            let m = ext_to_magma(&e).unwrap();
            assert_eq!(m.order(), 16);
            assert!(affinize(&m).unwrap().is_none());
        }
    }

    #[test]
    fn klein_rejects_trivial_base() {
        assert!(matches!(klein_extension(&Magma::trivial()), Err(Error::BaseNotAffineLatin)));
    }

    #[test]
    fn solved_space_contains_klein_theta() {
        let (g, a, b) = klein_pair();
        let basis = solve_cocycles(&g, &x41(), &a, &b).unwrap();
        let klein = klein_extension(&x41()).unwrap().theta;
        // membership: adding the Klein vector must not raise the rank
        let flat = |c: &Cocycle| -> Vec<u64> {
            (0..2)
                .flat_map(|i| c.values.iter().flatten().map(move |v| v[i] as u64))
                .collect()
        };
        let mut rows: Vec<Vec<u64>> = basis.iter().map(flat).collect();
        let r0 = fp::rank(&rows, 2);
        rows.push(flat(&klein));
        assert_eq!(fp::rank(&rows, 2), r0);
        assert_eq!(r0, basis.len());
    }

    #[test]
    fn trivial_base_gives_full_space() {
        let (g, a, b) = klein_pair();
        assert_eq!(solve_cocycles(&g, &Magma::trivial(), &a, &b).unwrap().len(), 2);
    }

    #[test]
    fn single_affine_layer() {
        let d = AffineDatum::cyclic(5, 2, 3, 1).unwrap();
        let it = iterate_extensions(&[ExtensionLayer::affine(&d)]).unwrap();
        assert_eq!(it.magma, aff_to_magma(&d));
        assert_eq!(it.layers, 1);
    }

    #[test]
    fn left_division_formula() {
        let e = klein_extension(&x42()).unwrap();
        let m = ext_to_magma(&e).unwrap();
        let g = &e.group;
        for a in g.elements() {
            for x in 0..4 {
                for b in g.elements() {
                    for y in 0..4 {
                        let (c, z) = ext_left_divide(&e, &a, x, &b, y).unwrap();
                        let lhs = e.element_index(&a, x);
                        assert_eq!(m.mul(lhs, e.element_index(&c, z)), e.element_index(&b, y));
                    }
                }
            }
        }
    }
}
