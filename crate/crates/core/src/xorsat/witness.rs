use serde::Serialize;

use super::eliminate::{ClusterStructure, VarKind};
use crate::error::{Error, Result};
use crate::stripping::{reach_set, DeletionDag, StripTrace};

/// Candidates `w` examined per report.
const MAX_CANDIDATES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    /// Smallest free non-core vertex on level `i_star`.
    pub u_star: u32,
    /// Highest level holding a free non-core vertex.
    pub i_star: u32,
    pub candidates: usize,
    /// Candidates failing `u* ∈ T(w)`.
    pub fail_reach: usize,
    /// Candidates whose `T(w)` meets a core flippable cycle.
    pub fail_cycle: usize,
    /// Candidates where `R⁺(u*) ∩ T(w)` does not induce a path.
    pub fail_path: usize,
    /// Candidates passing all three checks, by processing rank.
    pub verified: Vec<u32>,
    /// Verified candidates with `χ(w) = {u*}`, by processing rank.
    pub chain: Vec<u32>,
    /// `|{v ≠ u* : χ(v) = {u*}}|`.
    pub singleton_count: usize,
}

/// Ancestors of `w` in the DAG, `w` included.
fn in_reach(dag: &DeletionDag, w: u32, seen: &mut [u32], stamp: u32) -> Vec<u32> {
    let mut out = vec![w];
    seen[w as usize] = stamp;
    let mut i = 0;
    while i < out.len() {
        for &x in dag.in_neighbors(out[i]) {
            if seen[x as usize] != stamp {
                seen[x as usize] = stamp;
                out.push(x);
            }
        }
        i += 1;
    }
    out
}

/// True when the arcs among `set` form a single undirected path.
fn induces_path(dag: &DeletionDag, set: &[u32], member: &[u32], stamp: u32) -> bool {
    let mut arcs = 0usize;
    let mut deg = vec![0u8; set.len()];
    let pos = |v: u32| set.binary_search(&v).unwrap();
    for (i, &u) in set.iter().enumerate() {
        for &v in dag.out_neighbors(u) {
            if member[v as usize] == stamp {
                arcs += 1;
                deg[i] = deg[i].saturating_add(1);
                let j = pos(v);
                deg[j] = deg[j].saturating_add(1);
            }
        }
    }
    // A forest with |set| - 1 arcs and no vertex of degree above 2 is a path.
    arcs + 1 == set.len() && deg.iter().all(|&d| d <= 2) && {
        let mut parent: Vec<usize> = (0..set.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut acyclic = true;
        for &u in set {
            for &v in dag.out_neighbors(u) {
                if member[v as usize] == stamp {
                    let (a, b) = (find(&mut parent, pos(u)), find(&mut parent, pos(v)));
                    if a == b {
                        acyclic = false;
                    }
                    parent[a] = b;
                }
            }
        }
        acyclic
    }
}

/// Checks the structure behind the lower connectivity bound around the last
/// free non-core vertex `u*`: for each `w` reachable from `u*`, whether
/// `u* ∈ T(w)`, whether `T(w)` avoids core flippable cycles, and whether
/// `R⁺(u*) ∩ T(w)` induces a path.
pub fn last_free_witness(trace: &StripTrace, dag: &DeletionDag, s: &ClusterStructure) -> Result<WitnessReport> {
    if trace.n != s.n || dag.n() != s.n {
        return Err(Error::Mismatch("trace, dag and structure disagree on n".into()));
    }
    let noncore_free = &s.free_vars[..s.num_noncore_free];
    let i_star = noncore_free
        .iter()
        .map(|&u| trace.level_of[u as usize])
        .max()
        .ok_or_else(|| Error::Empty("no free non-core vertex".into()))?;
    let u_star = *noncore_free.iter().find(|&&u| trace.level_of[u as usize] == i_star).unwrap();
    let VarKind::Free(u_idx) = s.kind[u_star as usize] else {
        return Err(Error::Invariant(format!("u* = {u_star} is not free")));
    };

    let mut on_cycle = vec![false; s.n];
    for v in s.cycle_vertices() {
        on_cycle[v as usize] = true;
    }
    let reach = reach_set(dag, u_star)?;
    let mut in_r = vec![false; s.n];
    for &v in &reach {
        in_r[v as usize] = true;
    }
    let is_single = |v: u32| s.chi[v as usize] == [u_idx];

    let mut seen = vec![0u32; s.n];
    let mut member = vec![0u32; s.n];
    let mut report = WitnessReport {
        u_star,
        i_star,
        candidates: 0,
        fail_reach: 0,
        fail_cycle: 0,
        fail_path: 0,
        verified: Vec::new(),
        chain: Vec::new(),
        singleton_count: (0..s.n as u32).filter(|&v| v != u_star && is_single(v)).count(),
    };
    for (stamp, &w) in reach.iter().filter(|&&w| w != u_star).take(MAX_CANDIDATES).enumerate() {
        let stamp = stamp as u32 + 1;
        report.candidates += 1;
        let t = in_reach(dag, w, &mut seen, stamp);
        if seen[u_star as usize] != stamp {
            report.fail_reach += 1;
            continue;
        }
        if t.iter().any(|&x| on_cycle[x as usize]) {
            report.fail_cycle += 1;
            continue;
        }
        let mut twu: Vec<u32> = t.into_iter().filter(|&x| in_r[x as usize]).collect();
        twu.sort_unstable();
        for &x in &twu {
            member[x as usize] = stamp;
        }
        if !induces_path(dag, &twu, &member, stamp) {
            report.fail_path += 1;
            continue;
        }
        report.verified.push(w);
        if is_single(w) {
            report.chain.push(w);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;
    use crate::stripping::{slow_strip, SlowStripOptions};
    use crate::xorsat::{connectivity_width, eliminate, XorSystem};

    fn report(n: usize, r: usize, edges: &[&[u32]]) -> (WitnessReport, ClusterStructure) {
        let h = Hypergraph::new(n, r, edges.iter().map(|e| e.to_vec()).collect(), false).unwrap();
        let run = slow_strip(&h, 2, &SlowStripOptions::default()).unwrap();
        let sys = XorSystem::new(h, vec![false; edges.len()]).unwrap();
        let s = eliminate(&sys, &run.trace, &run.dag).unwrap();
        (last_free_witness(&run.trace, &run.dag, &s).unwrap(), s)
    }

    #[test]
    fn chain_of_graph_edges() {
        // Path 0-1-2-3-4 as 2-uniform equations plus isolated 5. Heads are
        // 0, 4, 1, 3, so 2 is free and every other path vertex follows it.
        let (rep, s) = report(6, 2, &[&[0, 1], &[1, 2], &[2, 3], &[3, 4]]);
        assert_eq!(s.free_vars, vec![2, 5]);
        assert_eq!(rep.u_star, 2);
        assert_eq!(rep.i_star, 3);
        assert_eq!(rep.candidates, 4);
        assert_eq!(rep.verified.len(), 4);
        assert_eq!(rep.chain.len(), 4);
        assert_eq!(rep.singleton_count, connectivity_width(&s).lower_witness);
    }

    #[test]
    fn chain_matches_singletons() {
        // A chain where each equation couples one new variable:
        // {0,1,2}, {2,3,4}, {4,5,6}; stripping from 0 upward leaves 6's side free.
        let (rep, s) = report(7, 3, &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 6]]);
        let w = connectivity_width(&s);
        assert!(rep.singleton_count <= w.lower_witness);
        for &v in &rep.chain {
            assert_eq!(s.chi_vertices(v), vec![rep.u_star]);
        }
        assert_eq!(rep.candidates, rep.fail_reach + rep.fail_cycle + rep.fail_path + rep.verified.len());
    }

    #[test]
    fn five_variable_example_runs() {
        let (rep, s) = report(5, 3, &[&[0, 1, 2], &[0, 1, 3]]);
        assert!(s.free_vars[..s.num_noncore_free].contains(&rep.u_star));
        assert_eq!(rep.singleton_count, 0);
    }

    #[test]
    fn no_free_vertex_is_an_error() {
        let h = Hypergraph::new(4, 3, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]], false).unwrap();
        let run = slow_strip(&h, 2, &SlowStripOptions::default()).unwrap();
        let sys = XorSystem::new(h, vec![false; 4]).unwrap();
        let s = eliminate(&sys, &run.trace, &run.dag).unwrap();
        assert!(matches!(last_free_witness(&run.trace, &run.dag, &s), Err(Error::Empty(_))));
    }
}
