//! Isomorphism testing and canonical forms of magmas.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::magma::{cycle_lengths, Magma};

/// A bijection `f: X₁ → X₂`, `map[x] = f(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isomorphism {
    pub map: Vec<usize>,
}

impl Isomorphism {
    /// Checks `f(x·y) = f(x)·f(y)` and bijectivity against the two magmas.
    pub fn witnesses(&self, from: &Magma, to: &Magma) -> bool {
        let n = from.order();
        if to.order() != n || !crate::magma::is_permutation(&self.map) || self.map.len() != n {
            return false;
        }
        (0..n).all(|x| {
            (0..n).all(|y| self.map[from.mul(x, y)] == to.mul(self.map[x], self.map[y]))
        })
    }
}

/// Element invariants preserved by isomorphisms; used to restrict candidates.
fn element_invariants(m: &Magma) -> Vec<Vec<usize>> {
    let n = m.order();
    let sigma = m.squaring_map();
    let mut sigma_cycle = vec![0; n];
    for x in 0..n {
        let mut y = sigma[x];
        let mut len = 1;
        while y != x && len <= n {
            y = sigma[y];
            len += 1;
        }
        sigma_cycle[x] = if y == x { len } else { 0 };
    }
    (0..n)
        .map(|x| {
            let mut row_cycles = cycle_lengths(m.row(x));
            row_cycles.sort_unstable();
            let mut col: Vec<usize> = m.column(x);
            col.sort_unstable();
            col.dedup();
            let mut inv = vec![
                usize::from(m.mul(x, x) == x),
                sigma_cycle[x],
                col.len(),
                (0..n).filter(|&y| m.mul(y, y) == x).count(),
                (0..n).filter(|&y| m.mul(x, y) == y).count(),
            ];
            inv.extend(row_cycles);
            inv
        })
        .collect()
}

/// Finds an isomorphism `X → Y` by backtracking with closure propagation.
pub fn find_isomorphism(x: &Magma, y: &Magma) -> Option<Isomorphism> {
    let n = x.order();
    if y.order() != n {
        return None;
    }
    let inv_x = element_invariants(x);
    let inv_y = element_invariants(y);
    let mut sx = inv_x.clone();
    let mut sy = inv_y.clone();
    sx.sort();
    sy.sort();
    if sx != sy {
        return None;
    }
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|a| (0..n).filter(|&b| inv_x[a] == inv_y[b]).collect())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&a| candidates[a].len());

    let mut search = IsoSearch {
        x,
        y,
        candidates: &candidates,
        f: vec![usize::MAX; n],
        finv: vec![usize::MAX; n],
        assigned: Vec::with_capacity(n),
    };
    if search.run(&order) {
        let iso = Isomorphism { map: search.f };
        debug_assert!(iso.witnesses(x, y));
        Some(iso)
    } else {
        None
    }
}

struct IsoSearch<'a> {
    x: &'a Magma,
    y: &'a Magma,
    candidates: &'a [Vec<usize>],
    f: Vec<usize>,
    finv: Vec<usize>,
    assigned: Vec<usize>,
}

impl IsoSearch<'_> {
    fn run(&mut self, order: &[usize]) -> bool {
        let Some(&a) = order.iter().find(|&&a| self.f[a] == usize::MAX) else {
            return true;
        };
        for idx in 0..self.candidates[a].len() {
            let b = self.candidates[a][idx];
            if self.finv[b] != usize::MAX {
                continue;
            }
            let mark = self.assigned.len();
            if self.assign(a, b) && self.run(order) {
                return true;
            }
            self.undo(mark);
        }
        false
    }

    fn assign(&mut self, a: usize, b: usize) -> bool {
        let mut queue = vec![(a, b)];
        while let Some((a, b)) = queue.pop() {
            if self.f[a] != usize::MAX {
                if self.f[a] != b {
                    return false;
                }
                continue;
            }
            if self.finv[b] != usize::MAX || !self.candidates[a].contains(&b) {
                return false;
            }
            self.f[a] = b;
            self.finv[b] = a;
            self.assigned.push(a);
            for i in 0..self.assigned.len() {
                let c = self.assigned[i];
                let fc = self.f[c];
                queue.push((self.x.mul(a, c), self.y.mul(b, fc)));
                queue.push((self.x.mul(c, a), self.y.mul(fc, b)));
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.assigned.len() > mark {
            let a = self.assigned.pop().unwrap();
            self.finv[self.f[a]] = usize::MAX;
            self.f[a] = usize::MAX;
        }
    }
}

/// The lexicographically least flattened table over all relabelings.
pub fn canonical_form(m: &Magma) -> Magma {
    canonical_labeling(m).0
}

/// Canonical form together with a labeling `perm` (`perm[x]` = new name of `x`)
/// such that `m.relabel(&perm)` is the canonical form.
pub fn canonical_labeling(m: &Magma) -> (Magma, Vec<usize>) {
    let n = m.order();
    let mut c = Canon {
        m,
        n,
        label: vec![usize::MAX; n],
        element: vec![usize::MAX; n],
        next: 0,
        cur: vec![0; n * n],
        best: None,
        best_label: Vec::new(),
    };
    c.rec(0, Ordering::Less);
    let perm = c.best_label;
    (m.relabel(&perm), perm)
}

struct Canon<'a> {
    m: &'a Magma,
    n: usize,
    label: Vec<usize>,
    element: Vec<usize>,
    next: usize,
    cur: Vec<usize>,
    best: Option<Vec<usize>>,
    best_label: Vec<usize>,
}

impl Canon<'_> {
    fn state_at(&self, pos: usize) -> Ordering {
        match &self.best {
            None => Ordering::Less,
            Some(b) => self.cur[..pos].cmp(&b[..pos]),
        }
    }

    fn rec(&mut self, pos: usize, state: Ordering) {
        let n = self.n;
        if pos == n * n {
            if state == Ordering::Less {
                self.best = Some(self.cur.clone());
                self.best_label = self.label.clone();
            }
            return;
        }
        let (i, j) = (pos / n, pos % n);
        // a row or column label that no element carries yet: branch
        let missing = if self.element[i] == usize::MAX {
            Some(i)
        } else if self.element[j] == usize::MAX {
            Some(j)
        } else {
            None
        };
        if let Some(l) = missing {
            debug_assert_eq!(l, self.next);
            for w in 0..n {
                if self.label[w] != usize::MAX {
                    continue;
                }
                self.label[w] = l;
                self.element[l] = w;
                self.next += 1;
                let st = self.state_at(pos);
                self.rec(pos, st);
                self.next -= 1;
                self.element[l] = usize::MAX;
                self.label[w] = usize::MAX;
            }
            return;
        }
        let v = self.m.mul(self.element[i], self.element[j]);
        let fresh = self.label[v] == usize::MAX;
        if fresh {
            self.label[v] = self.next;
            self.element[self.next] = v;
            self.next += 1;
        }
        let entry = self.label[v];
        let mut st = state;
        if st == Ordering::Equal {
            let b = self.best.as_ref().unwrap()[pos];
            st = entry.cmp(&b);
        }
        if st != Ordering::Greater {
            self.cur[pos] = entry;
            self.rec(pos + 1, st);
        }
        if fresh {
            self.next -= 1;
            self.element[self.next] = usize::MAX;
            self.label[v] = usize::MAX;
        }
    }
}

/// Automorphisms of a magma, as image arrays (exhaustive; small orders only).
pub fn automorphisms(m: &Magma) -> Vec<Vec<usize>> {
    let n = m.order();
    let inv = element_invariants(m);
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|a| (0..n).filter(|&b| inv[a] == inv[b]).collect())
        .collect();
    let order: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    let mut search = IsoSearch {
        x: m,
        y: m,
        candidates: &candidates,
        f: vec![usize::MAX; n],
        finv: vec![usize::MAX; n],
        assigned: Vec::new(),
    };
    collect_all(&mut search, &order, &mut out);
    out.sort();
    out
}

fn collect_all(s: &mut IsoSearch<'_>, order: &[usize], out: &mut Vec<Vec<usize>>) {
    let Some(&a) = order.iter().find(|&&a| s.f[a] == usize::MAX) else {
        out.push(s.f.clone());
        return;
    };
    for idx in 0..s.candidates[a].len() {
        let b = s.candidates[a][idx];
        if s.finv[b] != usize::MAX {
            continue;
        }
        let mark = s.assigned.len();
        if s.assign(a, b) {
            collect_all(s, order, out);
        }
        s.undo(mark);
    }
}
