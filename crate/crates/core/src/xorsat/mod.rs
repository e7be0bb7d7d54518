//! Random XORSAT systems on a hypergraph, flippable cycles, and the cluster
//! structure obtained by eliminating variables in reverse stripping order.

mod cycles;
mod eliminate;
mod witness;

pub use cycles::{find_flippable_cycles, flippable_mass, FlippableCycle};
pub use eliminate::{
    connectivity_width, eliminate, eliminate_with, extend_solution, ClusterStructure, ConnectivityWidth,
    CoreEquation, DenseForm, LinearForm, SparseForm, VarKind,
};
pub use witness::{last_free_witness, WitnessReport};

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitRow, Echelon};
use crate::hypergraph::Hypergraph;
use crate::rng::RngSeed;
use crate::stripping::StripTrace;

/// Largest core handled by the dense solver in [`solve_core`].
const SOLVE_CORE_MAX_VARS: usize = 8192;

/// One equation per edge: the XOR of the edge's variables equals its bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorSystem {
    pub hypergraph: Hypergraph,
    pub rhs: Vec<bool>,
}

impl XorSystem {
    pub fn new(hypergraph: Hypergraph, rhs: Vec<bool>) -> Result<Self> {
        if rhs.len() != hypergraph.num_edges() {
            return Err(Error::Parameter(format!(
                "{} right-hand sides for {} equations",
                rhs.len(),
                hypergraph.num_edges()
            )));
        }
        Ok(XorSystem { hypergraph, rhs })
    }

    pub fn n(&self) -> usize {
        self.hypergraph.n()
    }

    pub fn num_equations(&self) -> usize {
        self.rhs.len()
    }

    /// Index of the first equation `x` violates.
    pub fn first_violation(&self, x: &[bool]) -> Option<usize> {
        self.hypergraph
            .edges()
            .zip(&self.rhs)
            .position(|(e, &b)| e.iter().fold(false, |acc, &v| acc ^ x[v as usize]) != b)
    }

    pub fn is_satisfied_by(&self, x: &[bool]) -> bool {
        self.first_violation(x).is_none()
    }

    /// Same check with the assignment packed into a bit mask (`n <= 64`).
    pub fn is_satisfied_by_mask(&self, x: u64) -> bool {
        self.hypergraph
            .edges()
            .zip(&self.rhs)
            .all(|(e, &b)| e.iter().fold(false, |acc, &v| acc ^ (x >> v & 1 == 1)) == b)
    }
}

/// Uniform random right-hand sides.
pub fn gen_system(h: &Hypergraph, seed: RngSeed) -> XorSystem {
    let mut rng = seed.rng();
    let rhs = (0..h.num_edges()).map(|_| rng.random::<bool>()).collect();
    XorSystem { hypergraph: h.clone(), rhs }
}

/// Solves the equations of the core edges in `trace`. Returns a full-length
/// assignment (zero off the core), or `None` if the core system is
/// inconsistent.
pub fn solve_core(system: &XorSystem, trace: &StripTrace) -> Result<Option<Vec<bool>>> {
    let n = system.n();
    if trace.n != n {
        return Err(Error::Mismatch(format!("trace covers {} vertices, system has {n}", trace.n)));
    }
    if trace.core.len() > SOLVE_CORE_MAX_VARS {
        return Err(Error::Guard(format!(
            "dense core solve limited to {SOLVE_CORE_MAX_VARS} variables, core has {}",
            trace.core.len()
        )));
    }
    let mut local = vec![usize::MAX; n];
    for (i, &v) in trace.core.iter().enumerate() {
        local[v as usize] = i;
    }
    let nc = trace.core.len();
    let eqs = trace.core_edges.iter().map(|&e| {
        let row = BitRow::from_indices(nc, system.hypergraph.edge(e as usize).iter().map(|&v| local[v as usize]));
        (row, system.rhs[e as usize])
    });
    let ech = Echelon::new(nc, eqs);
    Ok(ech.particular().map(|xc| {
        let mut x = vec![false; n];
        for (i, &v) in trace.core.iter().enumerate() {
            x[v as usize] = xc[i];
        }
        x
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::gen_binomial;
    use crate::stripping::parallel_strip;

    #[test]
    fn empty_system_accepts_everything() {
        let s = gen_system(&Hypergraph::empty(3, 3), RngSeed::new(1));
        assert_eq!(s.num_equations(), 0);
        assert!((0..8u64).all(|x| s.is_satisfied_by_mask(x)));
    }

    #[test]
    fn reproducible_rhs() {
        let h = gen_binomial(200, 3, 4.0, RngSeed::new(2)).unwrap();
        assert_eq!(gen_system(&h, RngSeed::new(9)), gen_system(&h, RngSeed::new(9)));
    }

    #[test]
    fn rhs_length_checked() {
        let h = Hypergraph::new(3, 2, vec![vec![0, 1]], false).unwrap();
        assert!(XorSystem::new(h, vec![]).is_err());
    }

    #[test]
    fn core_solution_satisfies_core_equations() {
        for s in 0..20 {
            let h = gen_binomial(120, 3, 5.5, RngSeed::new(s)).unwrap();
            let sys = gen_system(&h, RngSeed::new(s + 100));
            let t = parallel_strip(&h, 2).unwrap();
            if let Some(x) = solve_core(&sys, &t).unwrap() {
                for &e in &t.core_edges {
                    let par = h.edge(e as usize).iter().fold(false, |a, &v| a ^ x[v as usize]);
                    assert_eq!(par, sys.rhs[e as usize]);
                }
            }
        }
    }
}
