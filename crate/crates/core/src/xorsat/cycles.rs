use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::hypergraph::Hypergraph;
use crate::stripping::parallel_strip;

/// A set of degree-two vertices whose joint flip (or, for components with
/// several independent cycles, the flip of any basis cycle) preserves every
/// equation's parity.
///
/// Degree two is measured in the whole hypergraph, or in the 2-core when
/// `core` is set. With `cyclomatic == 1` the component is a simple cycle:
/// `vertices[i]` lies in `edges[i]` and `edges[(i + 1) % t]`. Larger values
/// mean several cycles share vertices; `vertices` and `edges` are then sorted.
/// A degenerate item is a single vertex listed twice in one edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlippableCycle {
    pub vertices: Vec<u32>,
    pub edges: Vec<u32>,
    pub core: bool,
    pub cyclomatic: usize,
    pub degenerate: bool,
    /// Fundamental cycles as vertex sets; each is a valid flip.
    pub basis: Vec<Vec<u32>>,
}

/// A link joins the two edges containing a degree-two vertex.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Link {
    pub v: u32,
    pub a: u32,
    pub b: u32,
}

/// A connected group of non-bridge links with a spanning tree chosen by
/// adding links in decreasing vertex order, so the smallest link of a simple
/// cycle is its only chord.
#[derive(Debug, Clone)]
pub(crate) struct LinkComponent {
    pub nodes: Vec<u32>,
    pub links: Vec<Link>,
    pub tree: Vec<Link>,
    pub chords: Vec<Link>,
}

pub(crate) struct LinkStructure {
    pub components: Vec<LinkComponent>,
    pub degenerate: Vec<(u32, u32)>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Bridges of the multigraph on `node_count` nodes, by link index.
fn bridges(node_count: usize, links: &[(usize, usize)]) -> Vec<bool> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); node_count];
    for (li, &(a, b)) in links.iter().enumerate() {
        adj[a].push((b, li));
        adj[b].push((a, li));
    }
    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; node_count];
    let mut low = vec![0usize; node_count];
    let mut is_bridge = vec![false; links.len()];
    let mut timer = 0;
    for s in 0..node_count {
        if disc[s] != UNSEEN {
            continue;
        }
        disc[s] = timer;
        low[s] = timer;
        timer += 1;
        // (node, link used to enter it, next adjacency position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(s, UNSEEN, 0)];
        while let Some(top) = stack.last_mut() {
            let (x, via, pos) = *top;
            if pos < adj[x].len() {
                top.2 += 1;
                let (y, li) = adj[x][pos];
                if li == via {
                    continue;
                }
                if disc[y] == UNSEEN {
                    disc[y] = timer;
                    low[y] = timer;
                    timer += 1;
                    stack.push((y, li, 0));
                } else {
                    low[x] = low[x].min(disc[y]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[x]);
                    if low[x] > disc[p] {
                        is_bridge[via] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

/// Link components among `edge_ids`, with degree counted inside those edges.
pub(crate) fn link_structure(h: &Hypergraph, edge_ids: &[u32]) -> LinkStructure {
    let mut deg = vec![0u32; h.n()];
    let mut first: Vec<u32> = vec![u32::MAX; h.n()];
    let mut second: Vec<u32> = vec![u32::MAX; h.n()];
    for &e in edge_ids {
        for &v in h.edge(e as usize) {
            let vi = v as usize;
            deg[vi] += 1;
            if deg[vi] == 1 {
                first[vi] = e;
            } else if deg[vi] == 2 {
                second[vi] = e;
            }
        }
    }
    let mut node_index: BTreeMap<u32, usize> = BTreeMap::new();
    let mut links: Vec<Link> = Vec::new();
    let mut degenerate = Vec::new();
    for v in 0..h.n() as u32 {
        if deg[v as usize] != 2 {
            continue;
        }
        let (a, b) = (first[v as usize], second[v as usize]);
        if a == b {
            degenerate.push((v, a));
            continue;
        }
        let next = node_index.len();
        node_index.entry(a).or_insert(next);
        let next = node_index.len();
        node_index.entry(b).or_insert(next);
        links.push(Link { v, a, b });
    }
    let pairs: Vec<(usize, usize)> = links.iter().map(|l| (node_index[&l.a], node_index[&l.b])).collect();
    let is_bridge = bridges(node_index.len(), &pairs);

    let mut uf = UnionFind::new(node_index.len());
    for (li, &(a, b)) in pairs.iter().enumerate() {
        if !is_bridge[li] {
            uf.union(a, b);
        }
    }
    // Components keyed by their smallest link, which is the first one seen.
    let mut by_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for li in 0..links.len() {
        if is_bridge[li] {
            continue;
        }
        let root = uf.find(pairs[li].0);
        let gi = *by_root.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[gi].push(li);
    }
    let components = groups
        .into_iter()
        .map(|g| {
            let comp_links: Vec<Link> = g.iter().map(|&li| links[li]).collect();
            let mut nodes: Vec<u32> = comp_links.iter().flat_map(|l| [l.a, l.b]).collect();
            nodes.sort_unstable();
            nodes.dedup();
            let local = |e: u32| nodes.binary_search(&e).unwrap();
            let mut tuf = UnionFind::new(nodes.len());
            let mut tree = Vec::new();
            let mut chords = Vec::new();
            for l in comp_links.iter().rev() {
                if tuf.union(local(l.a), local(l.b)) {
                    tree.push(*l);
                } else {
                    chords.push(*l);
                }
            }
            chords.reverse();
            LinkComponent { nodes: nodes.clone(), links: comp_links, tree, chords }
        })
        .collect();
    LinkStructure { components, degenerate }
}

impl LinkComponent {
    /// Tree links on the path between two nodes.
    fn tree_path(&self, from: u32, to: u32) -> Vec<u32> {
        let local = |e: u32| self.nodes.binary_search(&e).unwrap();
        let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); self.nodes.len()];
        for l in &self.tree {
            adj[local(l.a)].push((local(l.b), l.v));
            adj[local(l.b)].push((local(l.a), l.v));
        }
        let (s, t) = (local(from), local(to));
        let mut prev: Vec<Option<(usize, u32)>> = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            if x == t {
                break;
            }
            for &(y, v) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, v));
                    q.push_back(y);
                }
            }
        }
        let mut path = Vec::new();
        let mut x = t;
        while let Some((p, v)) = prev[x] {
            path.push(v);
            x = p;
        }
        path
    }

    pub(crate) fn to_cycle(&self, core: bool) -> FlippableCycle {
        let cyclomatic = self.chords.len();
        let basis: Vec<Vec<u32>> = self
            .chords
            .iter()
            .map(|c| {
                let mut s = self.tree_path(c.a, c.b);
                s.push(c.v);
                s.sort_unstable();
                s
            })
            .collect();
        if cyclomatic == 1 {
            // Walk the cycle starting from its smallest vertex.
            let start = self.links.iter().min_by_key(|l| l.v).copied().unwrap();
            let mut vertices = vec![start.v];
            let mut edges = vec![start.a, start.b];
            let mut prev = start.v;
            let mut node = start.b;
            loop {
                let next = self.links.iter().find(|l| l.v != prev && (l.a == node || l.b == node)).copied().unwrap();
                if next.v == start.v {
                    break;
                }
                vertices.push(next.v);
                node = if next.a == node { next.b } else { next.a };
                prev = next.v;
                if node == start.a {
                    break;
                }
                edges.push(node);
            }
            return FlippableCycle { vertices, edges, core, cyclomatic, degenerate: false, basis };
        }
        let mut vertices: Vec<u32> = self.links.iter().map(|l| l.v).collect();
        vertices.sort_unstable();
        FlippableCycle { vertices, edges: self.nodes.clone(), core, cyclomatic, degenerate: false, basis }
    }
}

/// Flippable cycles of `h`, or of its 2-core when `restrict_to_core` is set.
/// Components are reported in order of their smallest vertex, followed by
/// degenerate single-vertex items.
pub fn find_flippable_cycles(h: &Hypergraph, restrict_to_core: bool) -> Vec<FlippableCycle> {
    let edge_ids: Vec<u32> = if restrict_to_core {
        parallel_strip(h, 2).expect("k = 2 is valid").core_edges
    } else {
        (0..h.num_edges() as u32).collect()
    };
    let ls = link_structure(h, &edge_ids);
    let mut out: Vec<FlippableCycle> = ls.components.iter().map(|c| c.to_cycle(restrict_to_core)).collect();
    out.extend(ls.degenerate.iter().map(|&(v, e)| FlippableCycle {
        vertices: vec![v],
        edges: vec![e],
        core: restrict_to_core,
        cyclomatic: 1,
        degenerate: true,
        basis: vec![vec![v]],
    }));
    out
}

/// Total number of vertices in non-degenerate flippable cycles.
pub fn flippable_mass(cycles: &[FlippableCycle]) -> usize {
    cycles.iter().filter(|c| !c.degenerate).map(|c| c.vertices.len()).sum()
}
