//! Brute-force references for small instances.

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{BitRow, Echelon};
use crate::hypergraph::Hypergraph;
use crate::rng::RngSeed;
use crate::stripping::{check_k, StripTrace};
use crate::xorsat::XorSystem;

pub const MAX_ENUM_N: usize = 26;
pub const MAX_DEPTH_N: usize = 16;
pub const MAX_SOLUTIONS: usize = 1 << 20;
/// Solution counts up to this use all pairwise distances in
/// [`exact_connectivity_threshold`].
const PAIRWISE_MAX: usize = 4096;

/// Satisfying assignments as bit masks (bit `v` is variable `v`), ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionSet {
    pub n: usize,
    pub masks: Vec<u32>,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn to_bits(&self, i: usize) -> Vec<bool> {
        (0..self.n).map(|v| self.masks[i] >> v & 1 == 1).collect()
    }
}

pub fn mask_of(x: &[bool]) -> u32 {
    x.iter().enumerate().fold(0, |m, (v, &b)| m | (b as u32) << v)
}

fn enum_guard(sys: &XorSystem) -> Result<()> {
    if sys.n() > MAX_ENUM_N {
        return Err(Error::Guard(format!("enumeration limited to n <= {MAX_ENUM_N}, got {}", sys.n())));
    }
    Ok(())
}

fn echelon(sys: &XorSystem) -> Echelon {
    let n = sys.n();
    Echelon::new(
        n,
        sys.hypergraph
            .edges()
            .zip(&sys.rhs)
            .map(|(e, &b)| (BitRow::from_indices(n, e.iter().map(|&v| v as usize)), b)),
    )
}

/// Scans all `2^n` assignments.
pub fn enumerate_exhaustive(sys: &XorSystem) -> Result<SolutionSet> {
    enum_guard(sys)?;
    let rows: Vec<(u32, bool)> = sys
        .hypergraph
        .edges()
        .zip(&sys.rhs)
        .map(|(e, &b)| (e.iter().fold(0u32, |m, &v| m ^ 1 << v), b))
        .collect();
    let masks = (0..1u32 << sys.n())
        .filter(|&x| rows.iter().all(|&(m, b)| ((x & m).count_ones() & 1 == 1) == b))
        .collect();
    Ok(SolutionSet { n: sys.n(), masks })
}

/// A particular solution plus every combination of a null-space basis.
pub fn enumerate_nullspace(sys: &XorSystem) -> Result<SolutionSet> {
    enum_guard(sys)?;
    let ech = echelon(sys);
    let Some(x0) = ech.particular() else {
        return Ok(SolutionSet { n: sys.n(), masks: Vec::new() });
    };
    let base = mask_of(&x0);
    let basis: Vec<u32> = ech.null_basis().iter().map(|b| b.ones().fold(0, |m, i| m | 1 << i)).collect();
    let mut masks: Vec<u32> = (0..1u32 << basis.len())
        .map(|c| basis.iter().enumerate().filter(|(i, _)| c >> i & 1 == 1).fold(base, |m, (_, &b)| m ^ b))
        .collect();
    masks.sort_unstable();
    Ok(SolutionSet { n: sys.n(), masks })
}

pub fn enumerate_solutions(sys: &XorSystem) -> Result<SolutionSet> {
    enumerate_nullspace(sys)
}

pub fn gf2_rank(sys: &XorSystem) -> usize {
    echelon(sys).rank()
}

fn edge_masks(h: &Hypergraph) -> Vec<u32> {
    h.edges().map(|e| e.iter().fold(0u32, |m, &v| m | 1 << v)).collect()
}

/// Degree of `v` once the vertices in `removed` are deleted, with their edges.
fn degree_after(h: &Hypergraph, masks: &[u32], removed: u32, v: u32) -> u32 {
    h.edges()
        .zip(masks)
        .filter(|(_, &m)| m & removed == 0)
        .map(|(e, _)| e.iter().filter(|&&w| w == v).count() as u32)
        .sum()
}

/// Shortest k-stripping sequence ending at each vertex, `None` for core
/// vertices. Breadth-first over the sets of deleted vertices.
pub fn exact_depths(h: &Hypergraph, k: u32) -> Result<Vec<Option<usize>>> {
    check_k(k)?;
    let n = h.n();
    if n > MAX_DEPTH_N {
        return Err(Error::Guard(format!("exact depth limited to n <= {MAX_DEPTH_N}, got {n}")));
    }
    let masks = edge_masks(h);
    let mut depth: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; 1 << n];
    let mut queue = VecDeque::from([0u32]);
    seen[0] = true;
    while let Some(removed) = queue.pop_front() {
        let len = removed.count_ones() as usize;
        for v in 0..n as u32 {
            if removed >> v & 1 == 1 || degree_after(h, &masks, removed, v) >= k {
                continue;
            }
            if depth[v as usize].is_none() {
                depth[v as usize] = Some(len + 1);
            }
            let next = removed | 1 << v;
            if !seen[next as usize] {
                seen[next as usize] = true;
                queue.push_back(next);
            }
        }
    }
    Ok(depth)
}

pub fn exact_depth(h: &Hypergraph, k: u32, v: u32) -> Result<usize> {
    if v as usize >= h.n() {
        return Err(Error::Parameter(format!("vertex {v} out of range")));
    }
    exact_depths(h, k)?[v as usize].ok_or(Error::CoreVertex(v))
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
        a != b
    }
}

/// Smallest `d` for which solutions at Hamming distance at most `d` connect
/// the whole set.
pub fn exact_connectivity_threshold(sol: &SolutionSet) -> Result<usize> {
    let m = sol.len();
    if m == 0 {
        return Err(Error::Empty("no solutions".into()));
    }
    if m > MAX_SOLUTIONS {
        return Err(Error::Guard(format!("connectivity limited to {MAX_SOLUTIONS} solutions, got {m}")));
    }
    if m <= PAIRWISE_MAX {
        Ok(threshold_pairwise(sol))
    } else {
        threshold_by_flips(sol)
    }
}

fn threshold_pairwise(sol: &SolutionSet) -> usize {
    let m = sol.len();
    let mut dsu = Dsu((0..m).collect());
    let mut components = m;
    let mut d = 0;
    // One scan of all pairs per distance; the answer is small in practice.
    while components > 1 {
        d += 1;
        for i in 0..m {
            for j in i + 1..m {
                if (sol.masks[i] ^ sol.masks[j]).count_ones() as usize == d && dsu.union(i, j) {
                    components -= 1;
                }
            }
        }
    }
    d
}

fn threshold_by_flips(sol: &SolutionSet) -> Result<usize> {
    let m = sol.len();
    if m == 1 {
        return Ok(0);
    }
    let mut dsu = Dsu((0..m).collect());
    let mut components = m;
    let index: HashMap<u32, usize> = sol.masks.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    for d in 1..=sol.n {
        for flip in weight_masks(sol.n, d) {
            for (i, &x) in sol.masks.iter().enumerate() {
                if let Some(&j) = index.get(&(x ^ flip)) {
                    if dsu.union(i, j) {
                        components -= 1;
                    }
                }
            }
        }
        if components == 1 {
            return Ok(d);
        }
    }
    Err(Error::Invariant("solution graph disconnected at full distance".into()))
}

/// All `n`-bit masks with exactly `d` bits set.
fn weight_masks(n: usize, d: usize) -> impl Iterator<Item = u32> {
    let limit = 1u64 << n;
    let mut x: u64 = (1u64 << d) - 1;
    std::iter::from_fn(move || {
        if x >= limit {
            return None;
        }
        let out = x as u32;
        // Next mask with the same popcount.
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
        Some(out)
    })
}

/// Strips `trials` times in uniformly random order and returns the common
/// core.
pub fn exhaustive_core(h: &Hypergraph, k: u32, trials: usize, seed: RngSeed) -> Result<Vec<u32>> {
    check_k(k)?;
    let mut rng = seed.rng();
    let inc = h.incidence();
    let mut first: Option<Vec<u32>> = None;
    for t in 0..trials.max(1) {
        let mut deg: Vec<u32> = h.degrees();
        let mut edge_alive = vec![true; h.num_edges()];
        let mut deleted = vec![false; h.n()];
        let mut queued = vec![false; h.n()];
        let mut cand: Vec<u32> = Vec::new();
        for v in 0..h.n() as u32 {
            if deg[v as usize] < k {
                queued[v as usize] = true;
                cand.push(v);
            }
        }
        while !cand.is_empty() {
            let v = cand.swap_remove(rng.random_range(0..cand.len()));
            deleted[v as usize] = true;
            for &e in inc.of(v) {
                if !std::mem::replace(&mut edge_alive[e as usize], false) {
                    continue;
                }
                for &w in h.edge(e as usize) {
                    deg[w as usize] -= 1;
                    if deg[w as usize] < k && !queued[w as usize] {
                        queued[w as usize] = true;
                        cand.push(w);
                    }
                }
            }
        }
        let core: Vec<u32> = (0..h.n() as u32).filter(|&v| !deleted[v as usize]).collect();
        match &first {
            None => first = Some(core),
            Some(c) if *c != core => {
                return Err(Error::Invariant(format!("strip order {t} produced a different core")));
            }
            _ => {}
        }
    }
    Ok(first.unwrap_or_default())
}

/// Core vertices lying on some flippable cycle of the 2-core: the union of
/// supports of the kernel of the core-edge by degree-2-vertex incidence matrix.
pub fn flippable_support(h: &Hypergraph, trace: &StripTrace) -> Result<Vec<u32>> {
    if trace.n != h.n() {
        return Err(Error::Mismatch("trace does not match hypergraph".into()));
    }
    let mut core_deg = vec![0u32; h.n()];
    for &e in &trace.core_edges {
        for &v in h.edge(e as usize) {
            core_deg[v as usize] += 1;
        }
    }
    let cols: Vec<u32> = trace.core.iter().copied().filter(|&v| core_deg[v as usize] == 2).collect();
    let col_of: HashMap<u32, usize> = cols.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // A self-loop flips to parity zero within one edge and is no cycle here.
    let ech = Echelon::new(
        cols.len(),
        trace.core_edges.iter().map(|&e| {
            let idx = h.edge(e as usize).iter().filter_map(|v| col_of.get(v).copied());
            (BitRow::from_indices(cols.len(), idx), false)
        }),
    );
    let mut hit = vec![false; cols.len()];
    for b in ech.null_basis() {
        for i in b.ones() {
            hit[i] = true;
        }
    }
    let mut out: Vec<u32> = cols.iter().zip(&hit).filter(|(_, &h)| h).map(|(&v, _)| v).collect();
    // Vertices twice in one edge give a zero column; exclude them.
    out.retain(|&v| {
        trace.core_edges.iter().all(|&e| h.edge(e as usize).iter().filter(|&&w| w == v).count() != 2)
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::gen_binomial;
    use crate::stripping::parallel_strip;
    use crate::xorsat::gen_system;

    fn sys(n: usize, r: usize, edges: &[&[u32]], rhs: &[bool]) -> XorSystem {
        let h = Hypergraph::new(n, r, edges.iter().map(|e| e.to_vec()).collect(), true).unwrap();
        XorSystem::new(h, rhs.to_vec()).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_solutions(&sys(3, 3, &[], &[])).unwrap().len(), 8);
        assert_eq!(enumerate_solutions(&sys(4, 2, &[&[0, 1]], &[true])).unwrap().len(), 8);
        let five = sys(5, 3, &[&[0, 1, 2], &[0, 1, 3]], &[false, true]);
        assert_eq!(enumerate_exhaustive(&five).unwrap().len(), 8);
        assert_eq!(gf2_rank(&five), 2);
    }

    #[test]
    fn duplicate_rows_rank_once() {
        let s = sys(3, 2, &[&[0, 1], &[0, 1]], &[true, true]);
        assert_eq!(gf2_rank(&s), 1);
        assert_eq!(gf2_rank(&sys(3, 2, &[], &[])), 0);
    }

    #[test]
    fn both_enumerations_agree() {
        for seed in 0..40 {
            let h = gen_binomial(14, 3, 0.3 + 0.02 * seed as f64, RngSeed::new(seed)).unwrap();
            let s = gen_system(&h, RngSeed::new(seed + 1000));
            let a = enumerate_exhaustive(&s).unwrap();
            assert_eq!(a, enumerate_nullspace(&s).unwrap());
            if !a.is_empty() {
                assert_eq!(a.len(), 1 << (14 - gf2_rank(&s)));
            }
        }
    }

    #[test]
    fn enumeration_guard() {
        let s = sys(27, 3, &[], &[]);
        assert!(matches!(enumerate_solutions(&s), Err(Error::Guard(_))));
    }

    #[test]
    fn path_depths() {
        let h = Hypergraph::new(5, 2, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]], false).unwrap();
        assert_eq!(exact_depth(&h, 2, 2).unwrap(), 3);
        assert_eq!(exact_depths(&h, 2).unwrap(), vec![Some(1), Some(2), Some(3), Some(2), Some(1)]);
        let iso = Hypergraph::empty(1, 3);
        assert_eq!(exact_depth(&iso, 2, 0).unwrap(), 1);
    }

    #[test]
    fn core_vertex_depth_is_error() {
        let h = Hypergraph::new(4, 3, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]], false).unwrap();
        assert!(matches!(exact_depth(&h, 2, 0), Err(Error::CoreVertex(0))));
    }

    #[test]
    fn connectivity_threshold_basics() {
        let one = SolutionSet { n: 4, masks: vec![5] };
        assert_eq!(exact_connectivity_threshold(&one).unwrap(), 0);
        let two = SolutionSet { n: 4, masks: vec![0, 0b111] };
        assert_eq!(exact_connectivity_threshold(&two).unwrap(), 3);
        assert!(exact_connectivity_threshold(&SolutionSet { n: 4, masks: vec![] }).is_err());
        let five = sys(5, 3, &[&[0, 1, 2], &[0, 1, 3]], &[false, true]);
        assert!(exact_connectivity_threshold(&enumerate_solutions(&five).unwrap()).unwrap() <= 3);
    }

    #[test]
    fn pairwise_and_flip_search_agree() {
        let mut rng = RngSeed::new(3).rng();
        for n in [6usize, 9, 12] {
            for _ in 0..20 {
                let mut masks: Vec<u32> = (0..40).map(|_| rng.random_range(0..1u32 << n)).collect();
                masks.sort_unstable();
                masks.dedup();
                let s = SolutionSet { n, masks };
                assert_eq!(threshold_pairwise(&s), threshold_by_flips(&s).unwrap());
            }
        }
        let n = 14;
        let masks: Vec<u32> = (0..1u32 << n).filter(|x| x.count_ones() % 3 == 0).collect();
        assert!(masks.len() > PAIRWISE_MAX);
        assert_eq!(exact_connectivity_threshold(&SolutionSet { n, masks }).unwrap(), 3);
    }

    #[test]
    fn weight_mask_counts() {
        assert_eq!(weight_masks(6, 2).count(), 15);
        assert!(weight_masks(6, 3).all(|m| m.count_ones() == 3 && m < 64));
    }

    #[test]
    fn random_orders_agree_with_parallel() {
        for seed in 0..20 {
            let h = gen_binomial(300, 3, 5.0 + 0.05 * seed as f64, RngSeed::new(seed)).unwrap();
            let core = exhaustive_core(&h, 2, 5, RngSeed::new(seed)).unwrap();
            assert_eq!(core, parallel_strip(&h, 2).unwrap().core);
        }
        let clique = Hypergraph::new(4, 3, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]], false).unwrap();
        assert_eq!(exhaustive_core(&clique, 2, 10, RngSeed::new(1)).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn kernel_support_matches_cycles() {
        use crate::xorsat::find_flippable_cycles;
        for seed in 0..30 {
            let h = gen_binomial(400, 3, 5.6, RngSeed::new(seed)).unwrap();
            let t = parallel_strip(&h, 2).unwrap();
            let mut from_cycles: Vec<u32> = find_flippable_cycles(&h, true)
                .iter()
                .filter(|c| !c.degenerate)
                .flat_map(|c| c.vertices.clone())
                .collect();
            from_cycles.sort_unstable();
            assert_eq!(flippable_support(&h, &t).unwrap(), from_cycles, "seed {seed}");
        }
    }
}
