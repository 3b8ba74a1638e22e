//! Exhaustive enumeration of rumples up to isomorphism.
//!
//! Every finite left quasigroup satisfying `(xy)(xz) = (yx)(yz)` has a
//! bijective squaring map, and the cycle type of that map is an isomorphism
//! invariant. So the search fixes the diagonal to one block-form permutation
//! per cycle type and enumerates tables with that diagonal up to the action of
//! its centralizer. A table is kept only if it is the lexicographic minimum of
//! its centralizer orbit; this check runs on partial tables as soon as a new
//! row completes and exactly at the leaves, so each class is produced once.
//! A global canonical-form pass over the results guards against mistakes in
//! that pruning.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iso::canonical_form;
use crate::magma::Magma;

/// Largest order accepted for the general search.
pub const MAX_ORDER: usize = 8;
/// Largest order accepted when only latin rumples are wanted.
pub const MAX_LATIN_ORDER: usize = 11;
/// Environment variable holding a node cap for the search.
pub const NODE_CAP_ENV: &str = "RUMPLE_NODE_CAP";

const S: usize = 16;
const UNK: u8 = 0xFF;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub order: usize,
    pub latin_only: bool,
    pub count_only: bool,
    pub worker_count: usize,
    pub node_cap: Option<u64>,
    /// Resume from and update this file.
    pub checkpoint: Option<PathBuf>,
}

impl SearchConfig {
    pub fn new(order: usize) -> Self {
        SearchConfig {
            order,
            latin_only: false,
            count_only: false,
            worker_count: 1,
            node_cap: None,
            checkpoint: None,
        }
    }

    pub fn latin(mut self, latin: bool) -> Self {
        self.latin_only = latin;
        self
    }

    pub fn workers(mut self, k: usize) -> Self {
        self.worker_count = k.max(1);
        self
    }

    /// Takes the node cap from `RUMPLE_NODE_CAP` when it is set.
    pub fn with_env_cap(mut self) -> Result<Self> {
        if let Ok(v) = std::env::var(NODE_CAP_ENV) {
            let cap = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{NODE_CAP_ENV}={v:?} is not an integer")))?;
            self.node_cap = Some(cap);
        }
        Ok(self)
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub count: usize,
    /// Canonical forms, sorted. Empty when `count_only` was requested.
    pub classes: Vec<Magma>,
    pub nodes: u64,
    pub tasks: usize,
}

/// Rumples of the configured order, one per isomorphism class.
pub fn enumerate_rumples(cfg: &SearchConfig) -> Result<SearchOutcome> {
    run(cfg)
}

/// Latin rumples of the configured order, one per isomorphism class.
pub fn enumerate_latin_rumples(cfg: &SearchConfig) -> Result<SearchOutcome> {
    let mut cfg = cfg.clone();
    cfg.latin_only = true;
    run(&cfg)
}

/// Partitions of `n` in non-increasing order, listed lexicographically descending.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// The block-form permutation with the given cycle lengths: each block
/// `[s, s+len)` is rotated `s → s+1 → … → s`.
pub fn block_permutation(cycle_type: &[usize]) -> Vec<usize> {
    let mut p = Vec::new();
    let mut s = 0;
    for &len in cycle_type {
        for k in 0..len {
            p.push(s + (k + 1) % len);
        }
        s += len;
    }
    p
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Task {
    cycle_type: usize,
    row0: Vec<u8>,
}

#[derive(Default, Serialize, Deserialize)]
struct Checkpoint {
    order: usize,
    latin: bool,
    completed: Vec<usize>,
    /// Flattened tables found by each completed task.
    results: BTreeMap<usize, Vec<Vec<u8>>>,
    nodes: u64,
}

fn run(cfg: &SearchConfig) -> Result<SearchOutcome> {
    let n = cfg.order;
    if n == 0 {
        return Err(Error::BoundExceeded("order must be positive".into()));
    }
    let bound = if cfg.latin_only { MAX_LATIN_ORDER } else { MAX_ORDER };
    if n > bound {
        return Err(Error::BoundExceeded(format!("order {n} exceeds {bound}")));
    }
    let types = partitions(n);
    let nodes = AtomicU64::new(0);
    let aborted = AtomicBool::new(false);

    let mut tasks = Vec::new();
    for (ti, ct) in types.iter().enumerate() {
        let mut eng = Engine::new(n, cfg.latin_only, ct, cfg.node_cap, &nodes, &aborted);
        eng.collect_row0(ti, &mut tasks)?;
    }

    let mut ckpt = match &cfg.checkpoint {
        Some(path) if path.exists() => {
            let text = std::fs::read_to_string(path)?;
            let c: Checkpoint =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("checkpoint: {e}")))?;
            if c.order != n || c.latin != cfg.latin_only {
                return Err(Error::Parse("checkpoint belongs to a different search".into()));
            }
            c
        }
        _ => Checkpoint {
            order: n,
            latin: cfg.latin_only,
            ..Default::default()
        },
    };
    nodes.fetch_add(ckpt.nodes, Ordering::Relaxed);
    let done: BTreeSet<usize> = ckpt.completed.iter().copied().collect();
    let pending: Vec<usize> = (0..tasks.len()).filter(|i| !done.contains(i)).collect();

    let next = AtomicUsize::new(0);
    let shared = Mutex::new((std::mem::take(&mut ckpt), Instant::now()));
    let first_error: Mutex<Option<Error>> = Mutex::new(None);
    let workers = cfg.worker_count.max(1).min(pending.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if aborted.load(Ordering::Relaxed) {
                    return;
                }
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&id) = pending.get(k) else { return };
                if let Some(cap) = cfg.node_cap {
                    if nodes.load(Ordering::Relaxed) > cap {
                        aborted.store(true, Ordering::Relaxed);
                        first_error.lock().unwrap().get_or_insert(Error::NodeCapExceeded(cap));
                        return;
                    }
                }
                let task = &tasks[id];
                let ct = &types[task.cycle_type];
                let mut eng =
                    Engine::new(n, cfg.latin_only, ct, cfg.node_cap, &nodes, &aborted);
                match eng.run_task(task) {
                    Ok(found) => {
                        let mut guard = shared.lock().unwrap();
                        let (state, last) = &mut *guard;
                        state.completed.push(id);
                        state.results.insert(id, found);
                        if let Some(path) = &cfg.checkpoint {
                            if last.elapsed() > Duration::from_secs(5) {
                                state.nodes = nodes.load(Ordering::Relaxed);
                                if let Err(e) = save_checkpoint(path, state) {
                                    first_error.lock().unwrap().get_or_insert(e);
                                }
                                *last = Instant::now();
                            }
                        }
                    }
                    Err(e) => {
                        aborted.store(true, Ordering::Relaxed);
                        first_error.lock().unwrap().get_or_insert(e);
                        return;
                    }
                }
            });
        }
    });

    let (mut state, _) = shared.into_inner().unwrap();
    state.nodes = nodes.load(Ordering::Relaxed);
    state.completed.sort_unstable();
    if let Some(path) = &cfg.checkpoint {
        save_checkpoint(path, &state)?;
    }
    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }

    let mut raw = 0usize;
    let mut canon = BTreeSet::new();
    for tables in state.results.values() {
        for t in tables {
            raw += 1;
            let m = Magma::from_flat(n, t.iter().map(|&v| v as usize).collect())?;
            assert!(m.is_rumple(), "search produced a non-rumple");
            if cfg.latin_only {
                assert!(m.is_latin_rumple(), "latin search produced a non-latin table");
            }
            canon.insert(canonical_form(&m).as_flat().to_vec());
        }
    }
    let count = canon.len();
    debug_assert_eq!(raw, count, "orbit pruning let a duplicate through");
    let classes = if cfg.count_only {
        Vec::new()
    } else {
        canon
            .into_iter()
            .map(|t| Magma::from_flat(n, t))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(SearchOutcome {
        count,
        classes,
        nodes: state.nodes,
        tasks: tasks.len(),
    })
}

/// Number of rumples on `0..n` whose squaring map is exactly
/// `block_permutation(cycle_type)`, counted without any symmetry reduction.
///
/// Orbit counting ties this to the classified output: it equals the sum of
/// `|C(σ)| / |Aut X|` over the classes with that cycle type.
pub fn count_labeled(cycle_type: &[usize], latin: bool) -> Result<u64> {
    let n: usize = cycle_type.iter().sum();
    if n == 0 || n >= S {
        return Err(Error::BoundExceeded(format!("order {n}")));
    }
    let nodes = AtomicU64::new(0);
    let aborted = AtomicBool::new(false);
    let mut eng = Engine::new(n, latin, cycle_type, None, &nodes, &aborted);
    let mut count = 0u64;
    if eng.init() {
        eng.count_all(&mut count)?;
    }
    Ok(count)
}

/// Order of the centralizer of a permutation with the given cycle type:
/// `∏ m_k! · k^{m_k}` over cycle lengths `k` with multiplicity `m_k`.
pub fn centralizer_order(cycle_type: &[usize]) -> u64 {
    let mut mult = BTreeMap::new();
    for &k in cycle_type {
        *mult.entry(k).or_insert(0u64) += 1;
    }
    mult.iter()
        .map(|(&k, &m)| (1..=m).product::<u64>() * (k as u64).pow(m as u32))
        .product()
}

fn save_checkpoint(path: &Path, state: &Checkpoint) -> Result<()> {
    let text = serde_json::to_string(state).map_err(|e| Error::Io(e.to_string()))?;
    crate::io::write_atomic(path, text.as_bytes())
}

struct Engine<'a> {
    n: usize,
    latin: bool,
    sigma: [u8; S],
    /// Start and length of the σ-cycle (block) containing each element.
    block_start: [u8; S],
    block_len: [u8; S],
    t: [u8; S * S],
    rinv: [u8; S * S],
    cinv: [u8; S * S],
    rowcnt: [u8; S],
    colcnt: [u8; S],
    trail: Vec<u8>,
    queue: Vec<u8>,
    // relabeling state of the orbit check: rho[label] = element, lab[element] = label
    rho: [u8; S],
    lab: [u8; S],
    found: Vec<Vec<u8>>,
    local_nodes: u64,
    node_cap: Option<u64>,
    nodes: &'a AtomicU64,
    aborted: &'a AtomicBool,
}

impl<'a> Engine<'a> {
    fn new(
        n: usize,
        latin: bool,
        cycle_type: &[usize],
        node_cap: Option<u64>,
        nodes: &'a AtomicU64,
        aborted: &'a AtomicBool,
    ) -> Self {
        let sig = block_permutation(cycle_type);
        let mut e = Engine {
            n,
            latin,
            sigma: [0; S],
            block_start: [0; S],
            block_len: [0; S],
            t: [UNK; S * S],
            rinv: [UNK; S * S],
            cinv: [UNK; S * S],
            rowcnt: [0; S],
            colcnt: [0; S],
            trail: Vec::with_capacity(S * S),
            queue: Vec::with_capacity(S * S),
            rho: [UNK; S],
            lab: [UNK; S],
            found: Vec::new(),
            local_nodes: 0,
            node_cap,
            nodes,
            aborted,
        };
        let mut s = 0;
        for &len in cycle_type {
            for k in s..s + len {
                e.block_start[k] = s as u8;
                e.block_len[k] = len as u8;
            }
            s += len;
        }
        for x in 0..n {
            e.sigma[x] = sig[x] as u8;
        }
        e
    }

    #[inline]
    fn assign(&mut self, cell: usize, v: u8) -> bool {
        let cur = self.t[cell];
        if cur != UNK {
            return cur == v;
        }
        let (r, c) = (cell / S, cell % S);
        let vi = v as usize;
        if self.rinv[r * S + vi] != UNK {
            return false;
        }
        if self.latin && self.cinv[c * S + vi] != UNK {
            return false;
        }
        if r == c && self.sigma[r] != v {
            return false;
        }
        self.t[cell] = v;
        self.rinv[r * S + vi] = c as u8;
        self.cinv[c * S + vi] = r as u8;
        self.rowcnt[r] += 1;
        self.colcnt[c] += 1;
        self.trail.push(cell as u8);
        self.queue.push(cell as u8);
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let cell = self.trail.pop().unwrap() as usize;
            let (r, c) = (cell / S, cell % S);
            let v = self.t[cell] as usize;
            self.t[cell] = UNK;
            self.rinv[r * S + v] = UNK;
            self.cinv[c * S + v] = UNK;
            self.rowcnt[r] -= 1;
            self.colcnt[c] -= 1;
        }
        self.queue.clear();
    }

    /// `(xy)(xz) = (yx)(yz)`: checks the triple and forces a side when possible.
    #[inline]
    fn triple(&mut self, x: usize, y: usize, z: usize) -> bool {
        let a = self.t[x * S + y];
        let b = self.t[x * S + z];
        let c = self.t[y * S + x];
        let d = self.t[y * S + z];
        if a == UNK || b == UNK || c == UNK || d == UNK {
            return true;
        }
        let lc = a as usize * S + b as usize;
        let rc = c as usize * S + d as usize;
        let (l, r) = (self.t[lc], self.t[rc]);
        match (l == UNK, r == UNK) {
            (true, true) => true,
            (true, false) => self.assign(lc, r),
            (false, true) => self.assign(rc, l),
            (false, false) => l == r,
        }
    }

    fn propagate(&mut self) -> bool {
        let n = self.n;
        while let Some(cell) = self.queue.pop() {
            let (p, q) = (cell as usize / S, cell as usize % S);
            for k in 0..n {
                if !self.triple(p, q, k) || !self.triple(p, k, q) {
                    return false;
                }
            }
            for w in 0..n {
                let y = self.rinv[w * S + p];
                let z = self.rinv[w * S + q];
                if y != UNK && z != UNK && !self.triple(w, y as usize, z as usize) {
                    return false;
                }
            }
            if self.rowcnt[p] as usize == n - 1 && !self.fill_last_in_row(p) {
                return false;
            }
            if self.latin && self.colcnt[q] as usize == n - 1 && !self.fill_last_in_col(q) {
                return false;
            }
        }
        true
    }

    fn fill_last_in_row(&mut self, r: usize) -> bool {
        let n = self.n;
        let c = (0..n).find(|&c| self.t[r * S + c] == UNK).unwrap();
        let v = (0..n).find(|&v| self.rinv[r * S + v] == UNK).unwrap();
        self.assign(r * S + c, v as u8)
    }

    fn fill_last_in_col(&mut self, c: usize) -> bool {
        let n = self.n;
        let r = (0..n).find(|&r| self.t[r * S + c] == UNK).unwrap();
        let v = (0..n).find(|&v| self.cinv[c * S + v] == UNK).unwrap();
        self.assign(r * S + c, v as u8)
    }

    fn init(&mut self) -> bool {
        for x in 0..self.n {
            if !self.assign(x * S + x, self.sigma[x]) {
                return false;
            }
        }
        self.propagate()
    }

    fn complete_rows(&self) -> usize {
        (0..self.n)
            .take_while(|&r| self.rowcnt[r] as usize == self.n)
            .count()
    }

    fn first_unknown(&self) -> Option<usize> {
        let n = self.n;
        for r in 0..n {
            if self.rowcnt[r] as usize == n {
                continue;
            }
            for c in 0..n {
                if self.t[r * S + c] == UNK {
                    return Some(r * S + c);
                }
            }
        }
        None
    }

    fn tick(&mut self) -> Result<()> {
        self.local_nodes += 1;
        if self.local_nodes & 0xFFF == 0 {
            let total = self.nodes.fetch_add(0x1000, Ordering::Relaxed) + 0x1000;
            if let Some(cap) = self.node_cap {
                if total > cap {
                    return Err(Error::NodeCapExceeded(cap));
                }
            }
            if self.aborted.load(Ordering::Relaxed) {
                return Err(Error::NodeCapExceeded(self.node_cap.unwrap_or(0)));
            }
        }
        Ok(())
    }

    fn flush_nodes(&mut self) {
        self.nodes
            .fetch_add(self.local_nodes & 0xFFF, Ordering::Relaxed);
        self.local_nodes = 0;
    }

    /// Enumerates admissible first rows as task units.
    fn collect_row0(&mut self, ti: usize, tasks: &mut Vec<Task>) -> Result<()> {
        if self.init() {
            self.row0_rec(ti, tasks)?;
        }
        self.flush_nodes();
        Ok(())
    }

    fn row0_rec(&mut self, ti: usize, tasks: &mut Vec<Task>) -> Result<()> {
        self.tick()?;
        let n = self.n;
        if self.rowcnt[0] as usize == n {
            if !self.orbit_smaller() {
                tasks.push(Task {
                    cycle_type: ti,
                    row0: (0..n).map(|c| self.t[c]).collect(),
                });
            }
            return Ok(());
        }
        let cell = self.first_unknown().unwrap();
        self.branch(cell, |eng| eng.row0_rec(ti, tasks))
    }

    fn branch(
        &mut self,
        cell: usize,
        mut child: impl FnMut(&mut Self) -> Result<()>,
    ) -> Result<()> {
        let (r, c) = (cell / S, cell % S);
        for v in 0..self.n {
            if self.rinv[r * S + v] != UNK || (self.latin && self.cinv[c * S + v] != UNK) {
                continue;
            }
            let mark = self.trail.len();
            if self.assign(cell, v as u8) && self.propagate() {
                child(self)?;
            }
            self.undo(mark);
        }
        Ok(())
    }

    fn run_task(&mut self, task: &Task) -> Result<Vec<Vec<u8>>> {
        let ok = self.init()
            && (0..self.n).all(|c| self.assign(c, task.row0[c]) && self.propagate());
        if ok {
            let rows = self.complete_rows();
            self.dfs(rows)?;
        }
        self.flush_nodes();
        Ok(std::mem::take(&mut self.found))
    }

    fn count_all(&mut self, count: &mut u64) -> Result<()> {
        self.tick()?;
        match self.first_unknown() {
            None => {
                *count += 1;
                Ok(())
            }
            Some(cell) => self.branch(cell, |eng| eng.count_all(count)),
        }
    }

    fn dfs(&mut self, checked_rows: usize) -> Result<()> {
        self.tick()?;
        let Some(cell) = self.first_unknown() else {
            if !self.orbit_smaller() {
                let n = self.n;
                let mut flat = Vec::with_capacity(n * n);
                for r in 0..n {
                    flat.extend_from_slice(&self.t[r * S..r * S + n]);
                }
                self.found.push(flat);
            }
            return Ok(());
        };
        self.branch(cell, |eng| {
            let rows = eng.complete_rows();
            if rows > checked_rows && rows < eng.n && eng.orbit_smaller() {
                return Ok(());
            }
            eng.dfs(rows)
        })
    }

    // ---- orbit check -------------------------------------------------

    /// Is there a centralizer element `g` with `g·T < T` on the known part?
    /// `(g·T)[i][j] = g(T[g⁻¹i][g⁻¹j])`; unknown entries end a comparison
    /// without a verdict.
    fn orbit_smaller(&mut self) -> bool {
        self.rho = [UNK; S];
        self.lab = [UNK; S];
        self.lex_rec(0)
    }

    /// Maps the σ-cycle of `w` onto the block containing `label` with `w ↦ label`.
    fn bind(&mut self, w: usize, label: usize) {
        let (ws, wl) = (self.block_start[w] as usize, self.block_len[w] as usize);
        let ls = self.block_start[label] as usize;
        for k in 0..wl {
            let e = ws + (w - ws + k) % wl;
            let l = ls + (label - ls + k) % wl;
            self.rho[l] = e as u8;
            self.lab[e] = l as u8;
        }
    }

    fn unbind(&mut self, w: usize) {
        let (ws, wl) = (self.block_start[w] as usize, self.block_len[w] as usize);
        for e in ws..ws + wl {
            let l = self.lab[e] as usize;
            self.rho[l] = UNK;
            self.lab[e] = UNK;
        }
    }

    fn lex_rec(&mut self, mut pos: usize) -> bool {
        let n = self.n;
        let mut bound: Vec<usize> = Vec::new();
        let mut result = false;
        while pos < n * n {
            let (i, j) = (pos / n, pos % n);
            let missing = if self.rho[i] == UNK {
                Some(i)
            } else if self.rho[j] == UNK {
                Some(j)
            } else {
                None
            };
            if let Some(l) = missing {
                let len = self.block_len[l] as usize;
                let mut w = 0;
                while w < n {
                    let wl = self.block_len[w] as usize;
                    if wl != len || self.lab[w] != UNK {
                        w = self.block_start[w] as usize + wl;
                        continue;
                    }
                    for e in w..w + wl {
                        self.bind(e, l);
                        let hit = self.lex_rec(pos);
                        self.unbind(e);
                        if hit {
                            result = true;
                            break;
                        }
                    }
                    if result {
                        break;
                    }
                    w += wl;
                }
                break;
            }
            let x = self.rho[i] as usize;
            let y = self.rho[j] as usize;
            let v = self.t[x * S + y];
            let tv = self.t[i * S + j];
            if v == UNK || tv == UNK {
                break;
            }
            let v = v as usize;
            if self.lab[v] == UNK {
                let len = self.block_len[v];
                let mut b = 0;
                while self.rho[b] != UNK || self.block_len[b] != len {
                    b = self.block_start[b] as usize + self.block_len[b] as usize;
                }
                self.bind(v, b);
                bound.push(v);
            }
            let gv = self.lab[v];
            if gv < tv {
                result = true;
                break;
            }
            if gv > tv {
                break;
            }
            pos += 1;
        }
        for v in bound.into_iter().rev() {
            self.unbind(v);
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=8).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
    }

    #[test]
    fn block_permutation_rotates_blocks() {
        assert_eq!(block_permutation(&[3, 1]), vec![1, 2, 0, 3]);
    }

    #[test]
    fn small_counts() {
        for (n, want) in [(1, 1), (2, 2), (3, 5), (4, 23)] {
            let out = enumerate_rumples(&SearchConfig::new(n)).unwrap();
            assert_eq!(out.count, want, "order {n}");
        }
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(
            enumerate_rumples(&SearchConfig::new(9)),
            Err(Error::BoundExceeded(_))
        ));
    }
}
