//! The Hecke algebra modules `M` and `N` spanned by a scaled set, in their
//! standard bases.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::laurent::LaurentPoly;
use crate::matrix::{PolyMatrix, SparseOperator};
use crate::perm::Perm;
use crate::qpset::QpSet;

/// Which of the two module structures is meant. They differ only when a
/// generator fixes the height of an element: `H_s` then acts by `v` on `M`
/// and by `-v⁻¹` on `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModuleKind {
    M,
    N,
}

impl ModuleKind {
    pub const BOTH: [ModuleKind; 2] = [ModuleKind::M, ModuleKind::N];

    /// Scalar by which `H_s` acts on a basis element whose height `s` fixes.
    pub fn fixed_scalar(self) -> LaurentPoly {
        match self {
            ModuleKind::M => LaurentPoly::v(),
            ModuleKind::N => -LaurentPoly::monomial(1, -1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModuleKind::M => "m",
            ModuleKind::N => "n",
        }
    }
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A vector of `M` or `N` in standard coordinates, indexed like the carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleVector {
    pub kind: ModuleKind,
    pub coords: Vec<LaurentPoly>,
}

impl ModuleVector {
    pub fn zero(kind: ModuleKind, dim: usize) -> Self {
        Self { kind, coords: vec![LaurentPoly::zero(); dim] }
    }

    /// The standard basis vector `M_x` or `N_x`.
    pub fn basis(kind: ModuleKind, dim: usize, x: usize) -> Self {
        let mut v = Self::zero(kind, dim);
        v.coords[x] = LaurentPoly::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(LaurentPoly::is_zero)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.coords[i].is_zero()).collect()
    }

    pub fn add_scaled(&mut self, c: &LaurentPoly, other: &ModuleVector) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            if !b.is_zero() {
                *a += c * b;
            }
        }
    }

    pub fn scale(&self, c: &LaurentPoly) -> ModuleVector {
        ModuleVector { kind: self.kind, coords: self.coords.iter().map(|a| a * c).collect() }
    }
}

/// `H_s` applied to the standard basis vector at `x`, as `(index, coefficient)`
/// pairs.
pub fn hs_on_basis(kind: ModuleKind, set: &QpSet, i: usize, x: usize) -> Vec<(usize, LaurentPoly)> {
    let sx = set.gen(i, x);
    match set.step(i, x) {
        Ordering::Greater => vec![(sx, LaurentPoly::one())],
        Ordering::Less => vec![(sx, LaurentPoly::one()), (x, LaurentPoly::v_minus_inv())],
        Ordering::Equal => vec![(x, kind.fixed_scalar())],
    }
}

/// `H_s · vec` for the generator `s = s_i`.
pub fn act_hs(set: &QpSet, i: usize, vec: &ModuleVector) -> ModuleVector {
    let mut out = ModuleVector::zero(vec.kind, vec.dim());
    for x in vec.support() {
        for (y, c) in hs_on_basis(vec.kind, set, i, x) {
            out.coords[y] += &c * &vec.coords[x];
        }
    }
    out
}

/// `H_w · vec`, applying the generators of one reduced word of `w`.
pub fn act_hw(set: &QpSet, w: &Perm, vec: &ModuleVector) -> ModuleVector {
    act_word(set, &w.reduced_word(), vec)
}

/// `H_{s_{i_1}} ... H_{s_{i_k}} · vec` for an arbitrary word.
pub fn act_word(set: &QpSet, word: &[usize], vec: &ModuleVector) -> ModuleVector {
    word.iter().rev().fold(vec.clone(), |acc, &i| act_hs(set, i, &acc))
}

/// The matrix of `H_s` on the standard basis.
pub fn hs_operator(kind: ModuleKind, set: &QpSet, i: usize) -> SparseOperator {
    SparseOperator { cols: (0..set.len()).map(|x| hs_on_basis(kind, set, i, x)).collect() }
}

/// The matrix of `H_s + v⁻¹` on the standard basis.
pub fn underline_hs_operator(kind: ModuleKind, set: &QpSet, i: usize) -> SparseOperator {
    let vinv = LaurentPoly::monomial(1, -1);
    let cols = (0..set.len())
        .map(|x| {
            let mut col = hs_on_basis(kind, set, i, x);
            match col.iter_mut().find(|(y, _)| *y == x) {
                Some((_, c)) => *c += &vinv,
                None => col.push((x, vinv.clone())),
            }
            col.retain(|(_, c)| !c.is_zero());
            col.sort_by_key(|&(y, _)| y);
            col
        })
        .collect();
    SparseOperator { cols }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub quadratic: bool,
    pub braid: bool,
    pub violations: Vec<String>,
}

impl RelationReport {
    pub fn holds(&self) -> bool {
        self.quadratic && self.braid
    }
}

/// Checks `T_s² = (v - v⁻¹) T_s + 1` and the braid relations for operators
/// `ops[i - 1]` standing for `s_i`.
pub fn check_hecke_relations(ops: &[SparseOperator]) -> RelationReport {
    let d = ops.first().map_or(0, SparseOperator::dim);
    let dense: Vec<PolyMatrix> = ops.iter().map(SparseOperator::to_dense).collect();
    let mut rep = RelationReport { quadratic: true, braid: true, violations: Vec::new() };
    let id = PolyMatrix::identity(d);
    for (k, op) in ops.iter().enumerate() {
        let lhs = op.mul_dense(&dense[k]);
        let rhs = dense[k].scale(&LaurentPoly::v_minus_inv()).add(&id);
        if lhs != rhs {
            rep.quadratic = false;
            rep.violations.push(format!("quadratic relation fails for s{}", k + 1));
        }
    }
    for a in 0..ops.len() {
        for b in a + 1..ops.len() {
            let (sa, sb) = (&ops[a], &ops[b]);
            let ok = if b == a + 1 {
                sa.mul_dense(&sb.mul_dense(&dense[a])) == sb.mul_dense(&sa.mul_dense(&dense[b]))
            } else {
                sa.mul_dense(&dense[b]) == sb.mul_dense(&dense[a])
            };
            if !ok {
                rep.braid = false;
                rep.violations.push(format!("braid relation fails for s{}, s{}", a + 1, b + 1));
            }
        }
    }
    rep
}
