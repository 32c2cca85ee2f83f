//! Structure coefficients of the Kazhdan–Lusztig basis acting on a canonical
//! basis, and the a-function they define.
//!
//! For every `w` the operator of `H̲_w` on the canonical basis is built from
//! shorter ones with `H̲_w = H̲_s H̲_u - Σ μ(z,u) H̲_z` (`u = s w < w`, `z < u`,
//! `s z < z`), one length level at a time. Column `y` of `ops[w]` is the image
//! of the canonical element at `y`, so `ops[w][(z, y)]` is the coefficient
//! usually written `h^w_{y,z}`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::canonical::CanonicalData;
use crate::kl::KlTable;
use crate::matrix::{PolyMatrix, SparseOperator};
use crate::module::ModuleKind;
use crate::qpset::QpSet;
use crate::wgraph::{LabeledGraph, Partition};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AfunError {
    #[error("set has rank {set} but the Kazhdan–Lusztig table has rank {table}")]
    RankMismatch { set: usize, table: usize },
}

#[derive(Clone, Debug)]
pub struct StructCoeffTables {
    pub kind: ModuleKind,
    /// `ops[w]` for `w` indexed like the Kazhdan–Lusztig table.
    pub ops: Vec<PolyMatrix>,
    /// Largest degree of any standard-basis structure coefficient.
    pub bound: i32,
    /// `a[z]`: largest degree of `ops[w][(z, y)]` over all `w` and `y`.
    pub a: Vec<i32>,
    /// `pair_max[(y, z)]`: largest degree of `ops[w][(z, y)]` over `w` alone.
    pub pair_max: BTreeMap<(usize, usize), i32>,
    /// Nonzero coefficients of `v^{a(z)}`, keyed by `(w, y, z)`.
    pub gamma: BTreeMap<(usize, usize, usize), i64>,
}

impl StructCoeffTables {
    pub fn compute(set: &QpSet, data: &CanonicalData, kl: &KlTable) -> Result<Self, AfunError> {
        if set.rank() != kl.rank() {
            return Err(AfunError::RankMismatch { set: set.rank(), table: kl.rank() });
        }
        let ops = canonical_operators(set, data, kl);
        let d = set.len();

        let bound = ops.par_iter().map(|op| max_degree(&data.c.mul(op).mul(&data.inv))).max().unwrap_or(0);

        let mut a = vec![i32::MIN; d];
        let mut pair_max = BTreeMap::new();
        for op in &ops {
            for ((z, y), p) in op.nonzero_entries() {
                let deg = p.degree().expect("nonzero");
                a[z] = a[z].max(deg);
                let e = pair_max.entry((y, z)).or_insert(deg);
                *e = (*e).max(deg);
            }
        }
        let mut gamma = BTreeMap::new();
        for (w, op) in ops.iter().enumerate() {
            for ((z, y), p) in op.nonzero_entries() {
                let g = p.coeff_i64(a[z]);
                if g != 0 {
                    gamma.insert((w, y, z), g);
                }
            }
        }
        Ok(Self { kind: data.kind, ops, bound, a, pair_max, gamma })
    }

    /// Structure coefficients with standard input and canonical output:
    /// column `y` expands `H̲_w` applied to the standard element at `y`.
    pub fn f_prime(&self, data: &CanonicalData, w: usize) -> PolyMatrix {
        self.ops[w].mul(&data.inv)
    }

    /// Structure coefficients in the standard basis on both sides.
    pub fn f(&self, data: &CanonicalData, w: usize) -> PolyMatrix {
        data.c.mul(&self.f_prime(data, w))
    }

    /// Canonical-basis operator recovered from `f_prime` by change of basis.
    pub fn h_from_f_prime(&self, data: &CanonicalData, w: usize) -> PolyMatrix {
        self.f_prime(data, w).mul(&data.c)
    }
}

fn max_degree(m: &PolyMatrix) -> i32 {
    m.nonzero_entries().filter_map(|(_, p)| p.degree()).max().unwrap_or(i32::MIN)
}

/// The operator of `H̲_w` on the canonical basis for every `w`.
pub fn canonical_operators(set: &QpSet, data: &CanonicalData, kl: &KlTable) -> Vec<PolyMatrix> {
    let d = set.len();
    let gens: Vec<SparseOperator> = (1..set.rank()).map(|i| data.underline_hs_canonical(set, i)).collect();
    let m = kl.len();
    let max_len = (0..m).map(|w| kl.length_idx(w)).max().unwrap_or(0);
    let mut levels: Vec<Vec<usize>> = vec![Vec::new(); max_len + 1];
    for w in 0..m {
        levels[kl.length_idx(w)].push(w);
    }
    let mut ops: Vec<Option<PolyMatrix>> = vec![None; m];
    for &w in &levels[0] {
        ops[w] = Some(PolyMatrix::identity(d));
    }
    for level in levels.iter().skip(1) {
        let done: Vec<(usize, PolyMatrix)> = level
            .par_iter()
            .map(|&w| {
                let i = (1..set.rank()).find(|&i| kl.length_idx(kl.left_mul_idx(i, w)) < kl.length_idx(w)).unwrap();
                let u = kl.left_mul_idx(i, w);
                let mut op = gens[i - 1].mul_dense(ops[u].as_ref().expect("shorter element"));
                for &(z, mu) in kl.mu_list_idx(u) {
                    let z = z as usize;
                    if kl.length_idx(kl.left_mul_idx(i, z)) < kl.length_idx(z) {
                        op.sub_scaled_assign(mu, ops[z].as_ref().expect("shorter element"));
                    }
                }
                (w, op)
            })
            .collect();
        for (w, op) in done {
            ops[w] = Some(op);
        }
    }
    ops.into_iter().map(|o| o.expect("every element reached")).collect()
}

/// Generators `s` with `sx <= x` (weak) for `M`, or `sx < x` (strict) for `N`.
pub fn descent_count(kind: ModuleKind, set: &QpSet, x: usize) -> usize {
    (1..set.rank())
        .filter(|&i| match kind {
            ModuleKind::M => set.step(i, x).is_le(),
            ModuleKind::N => set.step(i, x).is_lt(),
        })
        .count()
}

/// One line of an a-function property check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl PropertyReport {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), ..Default::default() }
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `a(x) >= #descents(x)` for every `x`.
pub fn check_descent_bound(set: &QpSet, t: &StructCoeffTables) -> PropertyReport {
    let mut rep = PropertyReport::new("descent lower bound");
    for x in 0..set.len() {
        rep.checked += 1;
        let des = descent_count(t.kind, set, x) as i32;
        if t.a[x] < des {
            rep.violations.push(format!("{}: a = {} < {des} descents", set.element(x), t.a[x]));
        }
    }
    rep
}

/// For `M`: `a = ℓ(w₀)` at maximal elements and smaller elsewhere. For `N`:
/// `a = 0` at minimal elements and positive elsewhere.
pub fn check_extremes(set: &QpSet, t: &StructCoeffTables) -> PropertyReport {
    let mut rep = PropertyReport::new("extreme values");
    let n = set.rank() as i32;
    let top = n * (n - 1) / 2;
    let (special, target) = match t.kind {
        ModuleKind::M => (set.maximal_elements(), top),
        ModuleKind::N => (set.minimal_elements(), 0),
    };
    for x in 0..set.len() {
        rep.checked += 1;
        let ok = if special.contains(&x) {
            t.a[x] == target
        } else {
            match t.kind {
                ModuleKind::M => t.a[x] < top,
                ModuleKind::N => t.a[x] > 0,
            }
        };
        if !ok {
            rep.violations.push(format!("{}: a = {}", set.element(x), t.a[x]));
        }
    }
    rep
}

/// Along every edge `x → y`: `a(y) <= a(x)` for `M`, `a(x) <= a(y)` for `N`.
pub fn check_monotone(g: &LabeledGraph, t: &StructCoeffTables) -> PropertyReport {
    let mut rep = PropertyReport::new("monotone along edges");
    for &(x, y) in g.edges.keys() {
        rep.checked += 1;
        let ok = match t.kind {
            ModuleKind::M => t.a[y] <= t.a[x],
            ModuleKind::N => t.a[x] <= t.a[y],
        };
        if !ok {
            rep.violations.push(format!("{} -> {}: a = {} -> {}", g.vertices[x], g.vertices[y], t.a[x], t.a[y]));
        }
    }
    rep
}

/// Edges `x → y` with `a(y) > a(x)`, i.e. where `a` fails to decrease in the
/// direction of the arrow. Reported, not asserted.
pub fn increasing_edges(g: &LabeledGraph, t: &StructCoeffTables) -> Vec<(usize, usize)> {
    g.edges.keys().copied().filter(|&(x, y)| t.a[y] > t.a[x]).collect()
}

/// `a` is constant on every block of `cells`.
pub fn check_constant_on_cells(set: &QpSet, cells: &Partition, t: &StructCoeffTables) -> PropertyReport {
    let mut rep = PropertyReport::new("constant on cells");
    for cell in cells {
        rep.checked += 1;
        if cell.iter().any(|&x| t.a[x] != t.a[cell[0]]) {
            let vals: Vec<String> = cell.iter().map(|&x| format!("{}:{}", set.element(x), t.a[x])).collect();
            rep.violations.push(vals.join(" "));
        }
    }
    rep
}

/// `a(z) >= a(x₀)` for every `z` in the orbit of a minimal element `x₀`.
pub fn check_orbit_bound(set: &QpSet, t: &StructCoeffTables) -> PropertyReport {
    let mut rep = PropertyReport::new("orbit lower bound");
    for z in 0..set.len() {
        if let Some(x0) = set.orbit_minimum(z) {
            rep.checked += 1;
            if t.a[z] < t.a[x0] {
                rep.violations.push(format!("{}: a = {} < {}", set.element(z), t.a[z], t.a[x0]));
            }
        }
    }
    rep
}

/// `a(z) <= B` and every standard or mixed coefficient has degree `<= B`.
pub fn check_bound(set: &QpSet, data: &CanonicalData, t: &StructCoeffTables) -> PropertyReport {
    let mut rep = PropertyReport::new("degree bound");
    for z in 0..set.len() {
        rep.checked += 1;
        if t.a[z] > t.bound {
            rep.violations.push(format!("{}: a = {} > B = {}", set.element(z), t.a[z], t.bound));
        }
    }
    for w in 0..t.ops.len() {
        rep.checked += 1;
        let fp = max_degree(&t.f_prime(data, w));
        if fp > t.bound {
            rep.violations.push(format!("w #{w}: mixed coefficient of degree {fp} > B = {}", t.bound));
        }
    }
    rep
}

/// Mixed coefficients share the leading term of the canonical ones:
/// `f'^w_{y,z} = γ^w_{y,z} v^{a(z)} + lower`.
pub fn check_leading_transfer(set: &QpSet, data: &CanonicalData, t: &StructCoeffTables) -> PropertyReport {
    let mut rep = PropertyReport::new("leading-term transfer");
    for w in 0..t.ops.len() {
        let fp = t.f_prime(data, w);
        for y in 0..set.len() {
            for z in 0..set.len() {
                rep.checked += 1;
                let p = &fp[(z, y)];
                let gamma = t.gamma.get(&(w, y, z)).copied().unwrap_or(0);
                let ok = p.degree().is_none_or(|deg| deg <= t.a[z]) && p.coeff_i64(t.a[z]) == gamma;
                if !ok {
                    rep.violations.push(format!("w #{w}, y = {}, z = {}: {p}", set.element(y), set.element(z)));
                }
            }
        }
    }
    rep
}

/// Canonical coefficients are supported on elements related by a path:
/// `z ⇝ y` for `M`, `y ⇝ z` for `N`.
pub fn check_support(set: &QpSet, g: &LabeledGraph, t: &StructCoeffTables) -> PropertyReport {
    let mut rep = PropertyReport::new("support within preorder");
    let reach = g.reachability();
    for op in &t.ops {
        for ((z, y), _) in op.nonzero_entries() {
            rep.checked += 1;
            let ok = match t.kind {
                ModuleKind::M => reach[z][y],
                ModuleKind::N => reach[y][z],
            };
            if !ok {
                rep.violations.push(format!("y = {}, z = {}", set.element(y), set.element(z)));
            }
        }
    }
    rep
}

/// Canonical coefficients with a negative integer coefficient. Reported only.
pub fn negative_coefficients(t: &StructCoeffTables) -> usize {
    t.ops.iter().map(|op| op.nonzero_entries().filter(|(_, p)| !p.has_nonnegative_coeffs()).count()).sum()
}

/// Edges `x → y` with `a(x) = a(y)` whose endpoints lie in different cells.
pub fn probe_conjectures(g: &LabeledGraph, cells: &Partition, t: &StructCoeffTables) -> Vec<(usize, usize)> {
    let mut cell_of = vec![0; g.len()];
    for (k, c) in cells.iter().enumerate() {
        for &x in c {
            cell_of[x] = k;
        }
    }
    g.edges.keys().copied().filter(|&(x, y)| t.a[x] == t.a[y] && cell_of[x] != cell_of[y]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kl::DEFAULT_MAX_RANK;
    use crate::laurent::LaurentPoly;
    use crate::module::{act_hw, ModuleVector};
    use crate::wgraph::{build_graph, cells};

    struct Fixture {
        set: QpSet,
        data: CanonicalData,
        kl: KlTable,
        t: StructCoeffTables,
    }

    fn fixture(set: QpSet, kind: ModuleKind) -> Fixture {
        let data = CanonicalData::compute(kind, &set).unwrap();
        let kl = KlTable::compute(set.rank(), DEFAULT_MAX_RANK).unwrap();
        let t = StructCoeffTables::compute(&set, &data, &kl).unwrap();
        Fixture { set, data, kl, t }
    }

    #[test]
    fn fpf_four_values() {
        let m = fixture(QpSet::fpf(4).unwrap(), ModuleKind::M);
        assert_eq!(m.t.a, vec![2, 2, 6]);
        assert_eq!(m.t.bound, 6);
        let n = fixture(QpSet::fpf(4).unwrap(), ModuleKind::N);
        assert_eq!(n.t.a, vec![0, 2, 2]);
        let s2 = m.kl.elements().iter().position(|w| *w == "1324".parse().unwrap()).unwrap();
        assert!(m.t.ops[s2][(1, 0)].is_one());
        assert!(m.t.ops[s2][(0, 0)].is_zero());
        let s1 = m.kl.elements().iter().position(|w| *w == "2134".parse().unwrap()).unwrap();
        // s1 fixes 2143, which is therefore a descent for M
        assert_eq!(m.t.ops[s1][(0, 0)], LaurentPoly::v_plus_inv());
    }

    #[test]
    fn regular_two_bound() {
        let f = fixture(QpSet::regular(2).unwrap(), ModuleKind::M);
        assert_eq!(f.t.bound, 1);
        assert!(f.t.bound >= 0);
    }

    #[test]
    fn standard_coefficients_match_direct_action() {
        for f in [fixture(QpSet::fpf(4).unwrap(), ModuleKind::M), fixture(QpSet::fpf(4).unwrap(), ModuleKind::N)] {
            let d = f.set.len();
            for (wi, w) in f.kl.elements().iter().enumerate() {
                let fm = f.t.f(&f.data, wi);
                for y in 0..d {
                    // H̲_w = Σ_x h_{x,w} H_x applied to the standard element at y
                    let e = ModuleVector::basis(f.data.kind, d, y);
                    let mut direct = ModuleVector::zero(f.data.kind, d);
                    for (x, h) in f.kl.expansion(w) {
                        direct.add_scaled(&h, &act_hw(&f.set, &x, &e));
                    }
                    assert_eq!(direct.coords, fm.column(y), "{w} on {}", f.set.element(y));
                }
                assert_eq!(f.t.h_from_f_prime(&f.data, wi), f.t.ops[wi]);
                assert_eq!(f.data.c.mul(&f.t.f_prime(&f.data, wi)), fm);
            }
        }
    }

    #[test]
    fn properties_hold_on_small_sets() {
        for set in [QpSet::fpf(4).unwrap(), QpSet::fpf(6).unwrap(), QpSet::regular(3).unwrap()] {
            for kind in ModuleKind::BOTH {
                let f = fixture(set.clone(), kind);
                let g = build_graph(&f.set, &f.data);
                let c = cells(&g);
                for rep in [
                    check_descent_bound(&f.set, &f.t),
                    check_extremes(&f.set, &f.t),
                    check_monotone(&g, &f.t),
                    check_constant_on_cells(&f.set, &c, &f.t),
                    check_orbit_bound(&f.set, &f.t),
                    check_bound(&f.set, &f.data, &f.t),
                    check_support(&f.set, &g, &f.t),
                ] {
                    assert!(rep.holds(), "{} {kind} {}: {:?}", set.name(), rep.name, rep.violations);
                }
                assert!(probe_conjectures(&g, &c, &f.t).is_empty());
            }
        }
    }

    #[test]
    fn leading_terms_transfer() {
        for kind in ModuleKind::BOTH {
            let f = fixture(QpSet::fpf(4).unwrap(), kind);
            let rep = check_leading_transfer(&f.set, &f.data, &f.t);
            assert!(rep.holds(), "{:?}", rep.violations);
        }
    }

    #[test]
    fn gamma_is_leading_coefficient() {
        let f = fixture(QpSet::fpf(4).unwrap(), ModuleKind::M);
        for (&(w, y, z), &g) in &f.t.gamma {
            assert_eq!(f.t.ops[w][(z, y)].coeff_i64(f.t.a[z]), g);
            assert!(f.t.pair_max[&(y, z)] <= f.t.a[z]);
        }
        for z in 0..f.set.len() {
            assert!(f.t.gamma.keys().any(|&(_, _, zz)| zz == z));
        }
    }

    #[test]
    fn empty_probe() {
        let f = fixture(QpSet::fpf(2).unwrap(), ModuleKind::M);
        let g = build_graph(&f.set, &f.data);
        assert!(g.edges.is_empty());
        assert!(probe_conjectures(&g, &cells(&g), &f.t).is_empty());
    }
}
