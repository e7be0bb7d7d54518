use std::collections::VecDeque;

use serde::Serialize;

use super::cycles::{link_structure, FlippableCycle};
use super::XorSystem;
use crate::error::{Error, Result};
use crate::gf2::BitRow;
use crate::stripping::{DeletionDag, StripTrace};

/// Vertex counts up to this use bit-packed forms in [`eliminate`].
const DENSE_MAX_N: usize = 4096;

/// A GF(2) linear form over a fixed index space.
pub trait LinearForm: Clone {
    fn zero(dim: usize) -> Self;
    fn toggle(&mut self, i: u32);
    fn xor_assign(&mut self, other: &Self);
    /// Support, ascending.
    fn indices(&self) -> Vec<u32>;
    fn is_empty(&self) -> bool;

    fn unit(dim: usize, i: u32) -> Self {
        let mut f = Self::zero(dim);
        f.toggle(i);
        f
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseForm(BitRow);

impl LinearForm for DenseForm {
    fn zero(dim: usize) -> Self {
        DenseForm(BitRow::zeros(dim))
    }

    fn toggle(&mut self, i: u32) {
        self.0.flip(i as usize);
    }

    fn xor_assign(&mut self, other: &Self) {
        self.0.xor_assign(&other.0);
    }

    fn indices(&self) -> Vec<u32> {
        self.0.ones().map(|i| i as u32).collect()
    }

    fn is_empty(&self) -> bool {
        self.0.is_zero()
    }
}

/// Sorted support list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseForm(Vec<u32>);

impl LinearForm for SparseForm {
    fn zero(_dim: usize) -> Self {
        SparseForm(Vec::new())
    }

    fn toggle(&mut self, i: u32) {
        match self.0.binary_search(&i) {
            Ok(p) => {
                self.0.remove(p);
            }
            Err(p) => self.0.insert(p, i),
        }
    }

    fn xor_assign(&mut self, other: &Self) {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        self.0 = out;
    }

    fn indices(&self) -> Vec<u32> {
        self.0.clone()
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone)]
struct Expr<L> {
    bit: bool,
    free: L,
    core: L,
}

impl<L: LinearForm> Expr<L> {
    fn constant(bit: bool, nf: usize, n: usize) -> Self {
        Expr { bit, free: L::zero(nf), core: L::zero(n) }
    }

    fn add(&mut self, other: &Expr<L>) {
        self.bit ^= other.bit;
        self.free.xor_assign(&other.free);
        self.core.xor_assign(&other.core);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VarKind {
    /// Index into `free_vars`.
    Free(u32),
    /// 2-core variable outside every flippable cycle.
    Core,
    /// Determined by free and core variables.
    Expressed,
}

/// A constraint on non-cycle core variables: their XOR equals `bit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreEquation {
    pub edge: u32,
    pub vars: Vec<u32>,
    pub bit: bool,
}

/// Every variable written as `z_bit ⊕ (Σ of z_core variables) ⊕ (Σ of chi free variables)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterStructure {
    pub n: usize,
    /// All 2-core variables.
    pub core_vars: Vec<u32>,
    /// `F`: never-selected non-core vertices ascending, then one representative
    /// per independent core cycle.
    pub free_vars: Vec<u32>,
    /// `free_vars[..num_noncore_free]` are the non-core ones.
    pub num_noncore_free: usize,
    /// 2-core variables outside flippable cycles.
    pub noncycle_core: Vec<u32>,
    pub cycles: Vec<FlippableCycle>,
    pub kind: Vec<VarKind>,
    /// `chi[v]`: indices into `free_vars`.
    pub chi: Vec<Vec<u32>>,
    pub z_bit: Vec<bool>,
    /// Non-cycle core variables in the offset of each variable.
    pub z_core: Vec<Vec<u32>>,
    pub core_equations: Vec<CoreEquation>,
}

impl ClusterStructure {
    pub fn num_free(&self) -> usize {
        self.free_vars.len()
    }

    /// `chi` as vertex ids rather than indices.
    pub fn chi_vertices(&self, v: u32) -> Vec<u32> {
        self.chi[v as usize].iter().map(|&i| self.free_vars[i as usize]).collect()
    }

    /// Variables that change when free variable `free_vars[idx]` flips, itself included.
    pub fn flip_set(&self, idx: u32) -> Vec<u32> {
        (0..self.n as u32).filter(|&v| self.chi[v as usize].binary_search(&idx).is_ok()).collect()
    }

    /// Vertices of core flippable cycles.
    pub fn cycle_vertices(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.cycles.iter().flat_map(|c| c.vertices.iter().copied()).collect();
        v.sort_unstable();
        v
    }
}

/// [`eliminate_with`] using bit-packed forms for small systems and sorted
/// lists otherwise.
pub fn eliminate(system: &XorSystem, trace: &StripTrace, dag: &DeletionDag) -> Result<ClusterStructure> {
    if system.n() <= DENSE_MAX_N {
        eliminate_with::<DenseForm>(system, trace, dag)
    } else {
        eliminate_with::<SparseForm>(system, trace, dag)
    }
}

/// Expresses every variable through free variables and non-cycle core
/// variables. Tree links of each core cycle component are solved from the
/// component's equations bottom-up; non-core variables are solved from the
/// equation each one removed, in reverse removal order. Needs a simple
/// hypergraph and a 2-stripping trace of it.
pub fn eliminate_with<L: LinearForm>(system: &XorSystem, trace: &StripTrace, dag: &DeletionDag) -> Result<ClusterStructure> {
    let h = &system.hypergraph;
    let n = h.n();
    if trace.k != 2 {
        return Err(Error::Parameter(format!("elimination needs a 2-stripping trace, got k = {}", trace.k)));
    }
    if trace.n != n || dag.n() != n {
        return Err(Error::Mismatch(format!("trace/dag cover {}/{} vertices, system has {n}", trace.n, dag.n())));
    }
    if !h.is_simple() {
        return Err(Error::Parameter("elimination needs a simple hypergraph".into()));
    }
    if dag.removals().len() + trace.core_edges.len() != h.num_edges() {
        return Err(Error::Mismatch("removed and core edges do not partition the edge set".into()));
    }
    let mut is_head = vec![false; n];
    for &(v, e) in dag.removals() {
        if !h.edge(e as usize).contains(&v) {
            return Err(Error::Mismatch(format!("removal of edge {e} by vertex {v} not in it")));
        }
        is_head[v as usize] = true;
    }

    let links = link_structure(h, &trace.core_edges);
    let mut in_cycle = vec![false; n];
    let mut is_node = vec![false; h.num_edges()];
    for c in &links.components {
        for l in &c.links {
            in_cycle[l.v as usize] = true;
        }
        for &e in &c.nodes {
            is_node[e as usize] = true;
        }
    }

    let mut free_vars: Vec<u32> =
        (0..n as u32).filter(|&v| !trace.is_core(v) && !is_head[v as usize]).collect();
    let num_noncore_free = free_vars.len();
    for c in &links.components {
        free_vars.extend(c.chords.iter().map(|l| l.v));
    }
    let nf = free_vars.len();
    let mut kind = vec![VarKind::Expressed; n];
    let mut exprs: Vec<Option<Expr<L>>> = vec![None; n];
    for (i, &u) in free_vars.iter().enumerate() {
        kind[u as usize] = VarKind::Free(i as u32);
        exprs[u as usize] = Some(Expr { bit: false, free: L::unit(nf, i as u32), core: L::zero(n) });
    }
    let noncycle_core: Vec<u32> = trace.core.iter().copied().filter(|&v| !in_cycle[v as usize]).collect();
    for &v in &noncycle_core {
        kind[v as usize] = VarKind::Core;
        exprs[v as usize] = Some(Expr { bit: false, free: L::zero(nf), core: L::unit(n, v) });
    }

    let sum_edge = |exprs: &[Option<Expr<L>>], e: u32, skip: Option<u32>| -> Result<Expr<L>> {
        let mut acc = Expr::constant(system.rhs[e as usize], nf, n);
        for &w in h.edge(e as usize) {
            if Some(w) == skip {
                continue;
            }
            let ex = exprs[w as usize]
                .as_ref()
                .ok_or_else(|| Error::Invariant(format!("variable {w} used before it was expressed")))?;
            acc.add(ex);
        }
        Ok(acc)
    };

    let mut core_equations = Vec::new();
    for c in &links.components {
        let root = c.chords[0].a;
        let local = |e: u32| c.nodes.binary_search(&e).unwrap();
        let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); c.nodes.len()];
        for l in &c.tree {
            adj[local(l.a)].push((local(l.b), l.v));
            adj[local(l.b)].push((local(l.a), l.v));
        }
        let mut order = vec![local(root)];
        let mut parent_link = vec![u32::MAX; c.nodes.len()];
        let mut seen = vec![false; c.nodes.len()];
        seen[local(root)] = true;
        let mut q = VecDeque::from([local(root)]);
        while let Some(x) = q.pop_front() {
            for &(y, v) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent_link[y] = v;
                    order.push(y);
                    q.push_back(y);
                }
            }
        }
        for &x in order.iter().skip(1).rev() {
            let p = parent_link[x];
            exprs[p as usize] = Some(sum_edge(&exprs, c.nodes[x], Some(p))?);
        }
        let closing = sum_edge(&exprs, root, None)?;
        if !closing.free.is_empty() {
            return Err(Error::Invariant(format!("cycle closing equation {root} still depends on free variables")));
        }
        core_equations.push(CoreEquation { edge: root, vars: closing.core.indices(), bit: closing.bit });
    }
    for &e in &trace.core_edges {
        if is_node[e as usize] {
            continue;
        }
        let mut vars = h.edge(e as usize).to_vec();
        if vars.iter().any(|&v| kind[v as usize] != VarKind::Core) {
            return Err(Error::Invariant(format!("core equation {e} touches a cycle variable")));
        }
        vars.sort_unstable();
        core_equations.push(CoreEquation { edge: e, vars, bit: system.rhs[e as usize] });
    }
    core_equations.sort_by_key(|c| c.edge);

    for &(v, e) in dag.removals().iter().rev() {
        exprs[v as usize] = Some(sum_edge(&exprs, e, Some(v))?);
    }

    let mut chi = Vec::with_capacity(n);
    let mut z_bit = Vec::with_capacity(n);
    let mut z_core = Vec::with_capacity(n);
    for (v, ex) in exprs.into_iter().enumerate() {
        let ex = ex.ok_or_else(|| Error::Invariant(format!("variable {v} was never expressed")))?;
        chi.push(ex.free.indices());
        z_bit.push(ex.bit);
        z_core.push(ex.core.indices());
    }
    let cycles = links.components.iter().map(|c| c.to_cycle(true)).collect();
    Ok(ClusterStructure {
        n,
        core_vars: trace.core.clone(),
        free_vars,
        num_noncore_free,
        noncycle_core,
        cycles,
        kind,
        chi,
        z_bit,
        z_core,
        core_equations,
    })
}

/// Builds the full assignment for given non-cycle core values (read from
/// `core_assignment`, indexed by vertex) and free values (indexed like
/// `free_vars`).
pub fn extend_solution(s: &ClusterStructure, core_assignment: &[bool], free_assignment: &[bool]) -> Result<Vec<bool>> {
    if core_assignment.len() != s.n || free_assignment.len() != s.num_free() {
        return Err(Error::Parameter(format!(
            "expected {} core and {} free values, got {} and {}",
            s.n,
            s.num_free(),
            core_assignment.len(),
            free_assignment.len()
        )));
    }
    for eq in &s.core_equations {
        let par = eq.vars.iter().fold(false, |a, &v| a ^ core_assignment[v as usize]);
        if par != eq.bit {
            return Err(Error::CoreEquationViolated { edge: eq.edge });
        }
    }
    Ok((0..s.n)
        .map(|v| {
            let c = s.z_core[v].iter().fold(s.z_bit[v], |a, &u| a ^ core_assignment[u as usize]);
            s.chi[v].iter().fold(c, |a, &i| a ^ free_assignment[i as usize])
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConnectivityWidth {
    /// Largest single-free-variable flip, `1 + |χ⁻¹(u)|`; the cluster is
    /// connected at this Hamming step. Zero when `F` is empty.
    pub upper: usize,
    /// `max_u |{v : χ(v) = {u}}|`; when positive the cluster is not connected
    /// at this step.
    pub lower_witness: usize,
}

pub fn connectivity_width(s: &ClusterStructure) -> ConnectivityWidth {
    let nf = s.num_free();
    let mut inverse = vec![0usize; nf];
    let mut singles = vec![0usize; nf];
    for v in 0..s.n {
        if matches!(s.kind[v], VarKind::Free(_)) {
            continue;
        }
        for &i in &s.chi[v] {
            inverse[i as usize] += 1;
        }
        if let [i] = s.chi[v][..] {
            singles[i as usize] += 1;
        }
    }
    ConnectivityWidth {
        upper: inverse.iter().map(|&c| c + 1).max().unwrap_or(0),
        lower_witness: singles.into_iter().max().unwrap_or(0),
    }
}
