//! W-graphs induced by a canonical basis: descent labels, edge weights,
//! cells (strongly connected components) and molecules (components of the
//! bidirected part).

use std::collections::BTreeMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::canonical::CanonicalData;
use crate::laurent::LaurentPoly;
use crate::matrix::{PolyMatrix, SparseOperator};
use crate::module::{act_hs, check_hecke_relations, hs_operator, ModuleKind, RelationReport};
use crate::perm::Perm;
use crate::qpset::QpSet;

/// A vertex-labelled weighted digraph on the carrier of a set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabeledGraph {
    pub kind: ModuleKind,
    pub rank: usize,
    pub vertices: Vec<Perm>,
    /// `tau[x]` as a bitmask: bit `i` set iff `s_i` is in the label.
    pub tau: Vec<u32>,
    /// Height parity class of each vertex inside its orbit.
    pub parity: Vec<u8>,
    /// Nonzero weights `ω(x → y)`.
    pub edges: BTreeMap<(usize, usize), i64>,
}

/// A partition of the vertex indices: every block sorted, blocks sorted by
/// their smallest element.
pub type Partition = Vec<Vec<usize>>;

fn subset(a: u32, b: u32) -> bool {
    a & !b == 0
}

impl LabeledGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn weight(&self, x: usize, y: usize) -> i64 {
        self.edges.get(&(x, y)).copied().unwrap_or(0)
    }

    pub fn tau_set(&self, x: usize) -> Vec<usize> {
        (1..self.rank).filter(|&i| self.tau[x] >> i & 1 == 1).collect()
    }

    pub fn has_label(&self, x: usize, i: usize) -> bool {
        self.tau[x] >> i & 1 == 1
    }

    /// `reach[x][y]`: there is a directed path (possibly empty) from `x` to `y`.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let d = self.len();
        let mut reach: Vec<Vec<bool>> = (0..d).map(|x| (0..d).map(|y| x == y).collect()).collect();
        for &(x, y) in self.edges.keys() {
            reach[x][y] = true;
        }
        for k in 0..d {
            for x in 0..d {
                if reach[x][k] {
                    for y in 0..d {
                        if reach[k][y] {
                            reach[x][y] = true;
                        }
                    }
                }
            }
        }
        reach
    }

    /// The `H_s` operator of the W-graph module: `v` on vertices without `s`
    /// in their label, `-v⁻¹ x + Σ ω(x → y) y` over unlabelled `y` otherwise.
    pub fn generator_operator(&self, i: usize) -> SparseOperator {
        let cols = (0..self.len())
            .map(|x| {
                if !self.has_label(x, i) {
                    return vec![(x, LaurentPoly::v())];
                }
                let mut col = vec![(x, -LaurentPoly::monomial(1, -1))];
                for (&(_, y), &w) in self.edges.range((x, 0)..(x + 1, 0)) {
                    if !self.has_label(y, i) {
                        col.push((y, LaurentPoly::constant(w)));
                    }
                }
                col
            })
            .collect();
        SparseOperator { cols }
    }
}

/// Descent labels and edge weights from the μ-coefficients of `data`.
pub fn build_graph(set: &QpSet, data: &CanonicalData) -> LabeledGraph {
    let d = set.len();
    let tau: Vec<u32> = (0..d)
        .map(|x| {
            (1..set.rank())
                .filter(|&i| match data.kind {
                    ModuleKind::M => set.step(i, x).is_le(),
                    ModuleKind::N => set.step(i, x).is_ge(),
                })
                .fold(0u32, |acc, i| acc | 1 << i)
        })
        .collect();
    let parity = (0..d).map(|x| set.height_gap(set.orbit_of(x), x).rem_euclid(2) as u8).collect();
    let mut edges = BTreeMap::new();
    for (x, y, _) in data.mu_nonzero() {
        for (a, b) in [(x, y), (y, x)] {
            if !subset(tau[a], tau[b]) {
                let w = data.mu(a, b) + data.mu(b, a);
                if w != 0 {
                    edges.insert((a, b), w);
                }
            }
        }
    }
    LabeledGraph { kind: data.kind, rank: set.rank(), vertices: set.carrier().to_vec(), tau, parity, edges }
}

fn normalize(mut blocks: Partition) -> Partition {
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort_unstable_by_key(|b| b[0]);
    blocks
}

/// Strongly connected components of the nonzero-weight digraph.
pub fn cells(g: &LabeledGraph) -> Partition {
    let mut pg = DiGraph::<(), ()>::with_capacity(g.len(), g.edges.len());
    let nodes: Vec<_> = (0..g.len()).map(|_| pg.add_node(())).collect();
    for &(x, y) in g.edges.keys() {
        pg.add_edge(nodes[x], nodes[y], ());
    }
    normalize(tarjan_scc(&pg).into_iter().map(|c| c.into_iter().map(|n| n.index()).collect()).collect())
}

/// Connected components of the subgraph of bidirected edges.
pub fn molecules(g: &LabeledGraph) -> Partition {
    let mut uf = UnionFind::<usize>::new(g.len());
    for &(x, y) in g.edges.keys() {
        if g.edges.contains_key(&(y, x)) {
            uf.union(x, y);
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..g.len() {
        blocks.entry(uf.find(x)).or_default().push(x);
    }
    normalize(blocks.into_values().collect())
}

/// Partition of `0..len` into the fibers of `key`.
pub fn fibers<K: Ord>(len: usize, key: impl Fn(usize) -> K) -> Partition {
    let mut blocks: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for x in 0..len {
        blocks.entry(key(x)).or_default().push(x);
    }
    normalize(blocks.into_values().collect())
}

/// Arrows read off the canonical basis directly: `arrows[a][b]` iff some
/// `H_s + v⁻¹` applied to the canonical element at `b` (for `M`) has a
/// nonzero coefficient at `a`, or applied at `a` has one at `b` (for `N`).
pub fn arrows_via_module(set: &QpSet, data: &CanonicalData) -> Vec<Vec<bool>> {
    let d = set.len();
    let vinv = LaurentPoly::monomial(1, -1);
    let mut hits = vec![vec![false; d]; d];
    for i in 1..set.rank() {
        for src in 0..d {
            let b = data.canonical_vector(src);
            let mut hb = act_hs(set, i, &b);
            hb.add_scaled(&vinv, &b);
            for tgt in 0..d {
                if !data.dual_functional_pairing(tgt, &hb).is_zero() {
                    hits[tgt][src] = true;
                }
            }
        }
    }
    match data.kind {
        ModuleKind::M => hits,
        ModuleKind::N => (0..d).map(|a| (0..d).map(|b| hits[b][a]).collect()).collect(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub reduced: bool,
    pub bipartite: bool,
    pub symmetric: bool,
    pub violations: Vec<String>,
}

impl AdmissibilityReport {
    pub fn holds(&self) -> bool {
        self.reduced && self.bipartite && self.symmetric
    }
}

/// Reducedness, bipartiteness by height parity, and symmetry of weights on
/// label-incomparable pairs. Weights are integers by construction.
pub fn check_quasi_admissible(g: &LabeledGraph) -> AdmissibilityReport {
    let mut rep = AdmissibilityReport { reduced: true, bipartite: true, symmetric: true, violations: Vec::new() };
    for (&(x, y), &w) in &g.edges {
        let (vx, vy) = (&g.vertices[x], &g.vertices[y]);
        if subset(g.tau[x], g.tau[y]) {
            rep.reduced = false;
            rep.violations.push(format!("{vx} -> {vy} has weight {w} but its label is contained in the target's"));
        }
        if g.parity[x] == g.parity[y] {
            rep.bipartite = false;
            rep.violations.push(format!("{vx} -> {vy} joins vertices of equal height parity"));
        }
    }
    for x in 0..g.len() {
        for y in x + 1..g.len() {
            if !subset(g.tau[x], g.tau[y]) && !subset(g.tau[y], g.tau[x]) && g.weight(x, y) != g.weight(y, x) {
                rep.symmetric = false;
                rep.violations.push(format!("{} <-> {} has unequal weights", g.vertices[x], g.vertices[y]));
            }
        }
    }
    rep
}

/// Builds the generator operators from `(τ, ω)` and checks the quadratic and
/// braid relations of the Hecke algebra.
pub fn check_wgraph_axiom(g: &LabeledGraph) -> RelationReport {
    let ops: Vec<SparseOperator> = (1..g.rank).map(|i| g.generator_operator(i)).collect();
    check_hecke_relations(&ops)
}

/// Generators whose graph operator does not reproduce the module in the
/// canonical basis. For `N` the graph operator is the matrix of `H_s`; for `M`
/// it is the transpose of `-H_s^{-1}` conjugated by the height-parity signs.
pub fn check_realizes_module(set: &QpSet, data: &CanonicalData, g: &LabeledGraph) -> Vec<usize> {
    let d = set.len();
    let mut signs = PolyMatrix::zeros(d);
    for x in 0..d {
        signs[(x, x)] = LaurentPoly::from(if g.parity[x] == 0 { 1 } else { -1 });
    }
    (1..set.rank())
        .filter(|&i| {
            let on_canonical = data.inv.mul(&hs_operator(data.kind, set, i).mul_dense(&data.c));
            let graph = g.generator_operator(i).to_dense();
            let ok = match data.kind {
                ModuleKind::N => graph == on_canonical,
                ModuleKind::M => {
                    let inverse = on_canonical.sub(&PolyMatrix::identity(d).scale(&LaurentPoly::v_minus_inv()));
                    graph.transpose() == signs.mul(&inverse).mul(&signs).scale(&LaurentPoly::from(-1))
                }
            };
            !ok
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(set: &QpSet, kind: ModuleKind) -> LabeledGraph {
        build_graph(set, &CanonicalData::compute(kind, set).unwrap())
    }

    /// Mutual reachability by brute force.
    fn cells_oracle(g: &LabeledGraph) -> Partition {
        let reach = g.reachability();
        let mut seen = vec![false; g.len()];
        let mut out = Vec::new();
        for x in 0..g.len() {
            if seen[x] {
                continue;
            }
            let block: Vec<usize> = (0..g.len()).filter(|&y| reach[x][y] && reach[y][x]).collect();
            for &y in &block {
                seen[y] = true;
            }
            out.push(block);
        }
        out
    }

    #[test]
    fn fpf_four_graphs() {
        let set = QpSet::fpf(4).unwrap();
        let gm = graph(&set, ModuleKind::M);
        assert_eq!(gm.tau_set(0), vec![1, 3]);
        assert_eq!(gm.tau_set(1), vec![2]);
        assert_eq!(gm.tau_set(2), vec![1, 2, 3]);
        let expected: BTreeMap<(usize, usize), i64> = [((0, 1), 1), ((1, 0), 1), ((2, 1), 1)].into();
        assert_eq!(gm.edges, expected);
        assert_eq!(cells(&gm), vec![vec![0, 1], vec![2]]);
        assert_eq!(molecules(&gm), cells(&gm));

        let gn = graph(&set, ModuleKind::N);
        assert_eq!(gn.tau_set(0), vec![1, 2, 3]);
        assert_eq!(gn.tau_set(1), vec![1, 3]);
        assert_eq!(gn.tau_set(2), vec![2]);
        let expected: BTreeMap<(usize, usize), i64> = [((0, 1), 1), ((1, 2), 1), ((2, 1), 1)].into();
        assert_eq!(gn.edges, expected);
        assert_eq!(cells(&gn), vec![vec![0], vec![1, 2]]);
        assert_eq!(molecules(&gn), cells(&gn));
    }

    #[test]
    fn singleton_graph() {
        let set = QpSet::fpf(2).unwrap();
        let g = graph(&set, ModuleKind::M);
        assert_eq!(cells(&g), vec![vec![0]]);
        assert_eq!(molecules(&g), vec![vec![0]]);
    }

    #[test]
    fn scc_matches_oracle_and_refines() {
        for set in [QpSet::fpf(6).unwrap(), QpSet::regular(4).unwrap()] {
            for kind in ModuleKind::BOTH {
                let g = graph(&set, kind);
                let c = cells(&g);
                assert_eq!(c, cells_oracle(&g));
                for m in molecules(&g) {
                    assert!(c.iter().any(|b| m.iter().all(|x| b.contains(x))));
                }
            }
        }
    }

    #[test]
    fn arrows_agree_with_weights() {
        for set in [QpSet::fpf(4).unwrap(), QpSet::fpf(6).unwrap(), QpSet::regular(3).unwrap()] {
            for kind in ModuleKind::BOTH {
                let data = CanonicalData::compute(kind, &set).unwrap();
                let g = build_graph(&set, &data);
                let arrows = arrows_via_module(&set, &data);
                for x in 0..set.len() {
                    for y in 0..set.len() {
                        if x != y {
                            assert_eq!(arrows[x][y], g.weight(x, y) != 0, "{} {kind} {x}->{y}", set.name());
                            if arrows[x][y] {
                                assert!(!subset(g.tau[x], g.tau[y]));
                            }
                        }
                    }
                }
            }
        }
        let set = QpSet::fpf(4).unwrap();
        let arrows = arrows_via_module(&set, &CanonicalData::compute(ModuleKind::M, &set).unwrap());
        assert!(arrows[0][1] && !arrows[0][2]);
    }

    #[test]
    fn graphs_are_admissible_wgraphs() {
        for set in [QpSet::fpf(4).unwrap(), QpSet::fpf(6).unwrap(), QpSet::regular(3).unwrap()] {
            for kind in ModuleKind::BOTH {
                let g = graph(&set, kind);
                assert!(check_quasi_admissible(&g).holds(), "{} {kind}", set.name());
                let ax = check_wgraph_axiom(&g);
                assert!(ax.holds(), "{} {kind}: {:?}", set.name(), ax.violations);
            }
        }
    }

    #[test]
    fn corrupted_weight_breaks_axiom() {
        let set = QpSet::fpf(4).unwrap();
        let mut g = graph(&set, ModuleKind::M);
        *g.edges.get_mut(&(0, 1)).unwrap() = -1;
        assert!(!check_wgraph_axiom(&g).holds());
    }

    #[test]
    fn fibers_partition() {
        assert_eq!(fibers(5, |x| x % 2), vec![vec![0, 2, 4], vec![1, 3]]);
    }
}
