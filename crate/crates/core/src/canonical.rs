//! Bar operators, canonical bases and their inverses.
//!
//! Matrices are indexed `(row, column)` by carrier index. Column `x` of the
//! canonical matrix `c` holds the standard coordinates of the canonical basis
//! element at `x`, so `c[(y, x)]` is the polynomial usually written `m_{y,x}`
//! (or `n_{y,x}`).
//!
//! The r-polynomials are stored unbarred: the bar operator sends the standard
//! basis element at `z` to `Σ_y bar(r[(y, z)]) · e_y`.

use std::cmp::Ordering;

use rayon::prelude::*;
use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::matrix::{PolyMatrix, SparseOperator};
use crate::module::{ModuleKind, ModuleVector};
use crate::qpset::QpSet;

/// Chain-sum inversion enumerates all chains; beyond this size it is refused.
pub const MAX_CHAIN_INVERSION: usize = 15;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CanonicalError {
    #[error("bar-invariance fails at ({y}, {x}): the defect {defect} is not antisymmetric")]
    NotAntisymmetric { y: String, x: String, defect: LaurentPoly },
    #[error("chain-sum inversion is limited to {max} elements, got {len}")]
    TooLargeForChains { len: usize, max: usize },
}

/// Everything the graph and a-function stages need about one module.
#[derive(Clone, Debug)]
pub struct CanonicalData {
    pub kind: ModuleKind,
    /// r-polynomials, `r[(y, x)]`.
    pub r: PolyMatrix,
    /// Canonical basis in standard coordinates, `c[(y, x)]`.
    pub c: PolyMatrix,
    /// Inverse of `c`: `inv[(x, z)]` is the coefficient of the canonical
    /// element at `x` in the standard element at `z`.
    pub inv: PolyMatrix,
    mu: Vec<i64>,
}

impl CanonicalData {
    /// r-polynomials, canonical basis by triangular solve, and its inverse by
    /// back-substitution.
    pub fn compute(kind: ModuleKind, set: &QpSet) -> Result<Self, CanonicalError> {
        let r = compute_r(kind, set);
        let c = compute_canonical_solve(set, &r)?;
        let inv = invert(set, &c);
        let mu = mu_table(&c);
        Ok(Self { kind, r, c, inv, mu })
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    /// Coefficient of `v⁻¹` in `c[(x, y)]`, zero on the diagonal.
    pub fn mu(&self, x: usize, y: usize) -> i64 {
        self.mu[x * self.dim() + y]
    }

    /// All `(x, y, mu)` with nonzero `mu`, row-major.
    pub fn mu_nonzero(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        let d = self.dim();
        self.mu.iter().enumerate().filter(|(_, &m)| m != 0).map(move |(k, &m)| (k / d, k % d, m))
    }

    /// The canonical basis element at `x` in standard coordinates.
    pub fn canonical_vector(&self, x: usize) -> ModuleVector {
        ModuleVector { kind: self.kind, coords: self.c.column(x) }
    }

    /// `D_x(vec)`: the coefficient of the canonical element at `x` in `vec`.
    pub fn dual_functional_pairing(&self, x: usize, vec: &ModuleVector) -> LaurentPoly {
        let mut acc = LaurentPoly::zero();
        for (z, a) in vec.coords.iter().enumerate() {
            let p = &self.inv[(x, z)];
            if !a.is_zero() && !p.is_zero() {
                acc += p * a;
            }
        }
        acc
    }

    /// Matrix of `H_s + v⁻¹` in the canonical basis, read off from the
    /// μ-coefficients.
    pub fn underline_hs_canonical(&self, set: &QpSet, i: usize) -> SparseOperator {
        let cols = (0..set.len())
            .map(|x| {
                let sx = set.gen(i, x);
                let step = set.step(i, x);
                let descent = match self.kind {
                    ModuleKind::M => step.is_le(),
                    ModuleKind::N => step.is_lt(),
                };
                if descent {
                    return vec![(x, LaurentPoly::v_plus_inv())];
                }
                let mut col = Vec::new();
                if step.is_gt() {
                    col.push((sx, LaurentPoly::one()));
                }
                for w in 0..set.len() {
                    let m = self.mu(w, x);
                    if m == 0 {
                        continue;
                    }
                    let w_step = set.step(i, w);
                    let w_descent = match self.kind {
                        ModuleKind::M => w_step.is_le(),
                        ModuleKind::N => w_step.is_lt(),
                    };
                    if w_descent {
                        col.push((w, LaurentPoly::constant(m)));
                    }
                }
                col.sort_by_key(|&(y, _)| y);
                col
            })
            .collect();
        SparseOperator { cols }
    }
}

fn mu_table(c: &PolyMatrix) -> Vec<i64> {
    let d = c.dim();
    let mut mu = vec![0; d * d];
    for ((x, y), p) in c.nonzero_entries() {
        if x != y {
            mu[x * d + y] = p.coeff_i64(-1);
        }
    }
    mu
}

/// One column of the r-matrix from the column at `s_i x`, where `s_i` lowers
/// `x`.
fn r_column_from(kind: ModuleKind, set: &QpSet, r: &PolyMatrix, i: usize, x: usize) -> Vec<LaurentPoly> {
    let sx = set.gen(i, x);
    (0..set.len())
        .map(|y| {
            let sy = set.gen(i, y);
            match set.step(i, y) {
                Ordering::Less => r[(sy, sx)].clone(),
                Ordering::Greater => &r[(sy, sx)] + &(&LaurentPoly::v_minus_inv() * &r[(y, sx)]),
                Ordering::Equal => &kind.fixed_scalar() * &r[(y, sx)],
            }
        })
        .collect()
}

/// The r-polynomials by induction on height, starting from `r = δ` at each
/// minimal element and lowering with the smallest available generator.
pub fn compute_r(kind: ModuleKind, set: &QpSet) -> PolyMatrix {
    let mut r = PolyMatrix::zeros(set.len());
    for x in set.by_height() {
        match set.lowering(x).first() {
            None => r[(x, x)] = LaurentPoly::one(),
            Some(&i) => {
                let col = r_column_from(kind, set, &r, i, x);
                r.set_column(x, col);
            }
        }
    }
    r
}

/// Recomputes every column with every lowering generator and compares with
/// `r`. Returns the `(x, generator)` pairs that disagree.
pub fn check_r_well_defined(kind: ModuleKind, set: &QpSet, r: &PolyMatrix) -> Vec<(usize, usize)> {
    let mut bad = Vec::new();
    for x in 0..set.len() {
        for i in set.lowering(x) {
            if r_column_from(kind, set, r, i, x) != r.column(x) {
                bad.push((x, i));
            }
        }
    }
    bad
}

/// The unique bar-invariant basis that is unitriangular with off-diagonal
/// entries in `v⁻¹Z[v⁻¹]`, solved column by column from `r`.
pub fn compute_canonical_solve(set: &QpSet, r: &PolyMatrix) -> Result<PolyMatrix, CanonicalError> {
    let order = set.by_height();
    let columns: Vec<Result<Vec<LaurentPoly>, CanonicalError>> = (0..set.len())
        .into_par_iter()
        .map(|x| {
            let mut col = vec![LaurentPoly::zero(); set.len()];
            col[x] = LaurentPoly::one();
            for &y in order.iter().rev() {
                if y == x || !set.leq(y, x) {
                    continue;
                }
                let mut alpha = LaurentPoly::zero();
                for (z, cz) in col.iter().enumerate() {
                    if z != y && !cz.is_zero() && !r[(y, z)].is_zero() {
                        alpha += r[(y, z)].bar() * cz.bar();
                    }
                }
                if alpha.bar() != -alpha.clone() || alpha.coeff_i64(0) != 0 {
                    return Err(CanonicalError::NotAntisymmetric {
                        y: set.element(y).to_string(),
                        x: set.element(x).to_string(),
                        defect: alpha,
                    });
                }
                col[y] = alpha.negative_part();
            }
            Ok(col)
        })
        .collect();
    let mut c = PolyMatrix::zeros(set.len());
    for (x, col) in columns.into_iter().enumerate() {
        c.set_column(x, col?);
    }
    Ok(c)
}

/// The canonical basis by the descent recurrence, without r-polynomials.
///
/// Works with the normalized polynomials `t[(x, y)] = v^{ht(y) - ht(x)} c[(x, y)]`
/// (polynomials in `v²`) by induction on the height of `y`, choosing the
/// smallest generator `s` with `ht(sy) < ht(y)`.
pub fn compute_canonical_recurrence(kind: ModuleKind, set: &QpSet) -> PolyMatrix {
    let d = set.len();
    let mut t = PolyMatrix::zeros(d);
    let v2 = LaurentPoly::monomial(1, 2);
    // μ of columns already finished, as (t, μ(t, y)) lists.
    let mut mu_cols: Vec<Vec<(usize, i64)>> = vec![Vec::new(); d];
    for y in set.by_height() {
        let Some(&i) = set.lowering(y).first() else {
            t[(y, y)] = LaurentPoly::one();
            continue;
        };
        let sy = set.gen(i, y);
        let corrections: Vec<(usize, i64)> = mu_cols[sy]
            .iter()
            .copied()
            .filter(|&(w, _)| match kind {
                ModuleKind::M => set.step(i, w).is_le(),
                ModuleKind::N => set.step(i, w).is_lt(),
            })
            .collect();
        for x in 0..d {
            let sx = set.gen(i, x);
            let mut val = match set.step(i, x) {
                Ordering::Greater => &t[(x, sy)] + &(&v2 * &t[(sx, sy)]),
                Ordering::Less => &(&v2 * &t[(x, sy)]) + &t[(sx, sy)],
                Ordering::Equal => match kind {
                    ModuleKind::M => &(&v2 * &t[(x, sy)]) + &t[(sx, sy)],
                    ModuleKind::N => LaurentPoly::zero(),
                },
            };
            for &(w, m) in &corrections {
                let txw = &t[(x, w)];
                if !txw.is_zero() {
                    val -= txw.shift(set.height_gap(w, y)).scale_i64(m);
                }
            }
            t[(x, y)] = val;
        }
        mu_cols[y] = (0..d)
            .filter(|&x| x != y)
            .filter_map(|x| {
                let m = t[(x, y)].coeff_i64(set.height_gap(x, y) - 1);
                (m != 0).then_some((x, m))
            })
            .collect();
    }
    let mut c = PolyMatrix::zeros(d);
    for ((x, y), p) in t.nonzero_entries() {
        c[(x, y)] = p.shift(-set.height_gap(x, y));
    }
    c
}

/// Inverse of a unitriangular `c` by back-substitution in decreasing height.
pub fn invert(set: &QpSet, c: &PolyMatrix) -> PolyMatrix {
    let d = set.len();
    let order = set.by_height();
    let mut p = PolyMatrix::zeros(d);
    for &x in order.iter().rev() {
        for y in 0..d {
            let mut acc = if x == y { LaurentPoly::one() } else { LaurentPoly::zero() };
            for z in 0..d {
                if z != x && !c[(x, z)].is_zero() && !p[(z, y)].is_zero() {
                    acc -= &c[(x, z)] * &p[(z, y)];
                }
            }
            p[(x, y)] = acc;
        }
    }
    p
}

/// Inverse of a unitriangular `c` as an alternating sum over strictly
/// increasing chains of nonzero entries. Exponential; small sets only.
pub fn invert_by_chains(set: &QpSet, c: &PolyMatrix) -> Result<PolyMatrix, CanonicalError> {
    let d = set.len();
    if d > MAX_CHAIN_INVERSION {
        return Err(CanonicalError::TooLargeForChains { len: d, max: MAX_CHAIN_INVERSION });
    }
    fn walk(c: &PolyMatrix, from: usize, to: usize, sign: i64, acc: &LaurentPoly, out: &mut LaurentPoly) {
        if from == to {
            *out += acc.scale_i64(sign);
            return;
        }
        for next in 0..c.dim() {
            if next != from && !c[(from, next)].is_zero() {
                walk(c, next, to, -sign, &(acc * &c[(from, next)]), out);
            }
        }
    }
    let mut p = PolyMatrix::zeros(d);
    for x in 0..d {
        for y in 0..d {
            if set.leq(x, y) {
                let mut out = LaurentPoly::zero();
                walk(c, x, y, 1, &LaurentPoly::one(), &mut out);
                p[(x, y)] = out;
            }
        }
    }
    Ok(p)
}
