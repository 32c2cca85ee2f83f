//! Kazhdan–Lusztig basis of the Hecke algebra of `S_n`.
//!
//! `h[x][y]` is the coefficient of `H_x` in `H̲_y`; the table is built by the
//! recursion `H̲_s H̲_u = H̲_{su} + Σ μ(z,u) H̲_z` over `z < u` with `sz < z`,
//! processed one length level at a time.

use rayon::prelude::*;
use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::perm::{enumerate, Perm};

/// Largest rank accepted without the opt-in flag.
pub const DEFAULT_MAX_RANK: usize = 6;
/// Largest rank accepted at all.
pub const EXTENDED_MAX_RANK: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KlError {
    #[error("rank {n} exceeds the configured maximum {max}")]
    RankTooLarge { n: usize, max: usize },
    #[error("rank must be at least 1")]
    EmptyRank,
    #[error("bad cache entry: {0}")]
    BadEntry(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KlTable {
    n: usize,
    elements: Vec<Perm>,
    lengths: Vec<usize>,
    /// `left_mul[i - 1][x]` is the index of `s_i x`.
    left_mul: Vec<Vec<u32>>,
    /// Nonzero `(x, h_{x,y})` pairs for each `y`, sorted by `x`.
    cols: Vec<Vec<(u32, LaurentPoly)>>,
    /// Nonzero `(x, μ(x,y))` with `x < y`, sorted by `x`.
    mu: Vec<Vec<(u32, i64)>>,
}

impl KlTable {
    pub fn compute(n: usize, max_rank: usize) -> Result<Self, KlError> {
        let mut table = Self::skeleton(n, max_rank)?;
        let m = table.elements.len();
        let mut by_length: Vec<Vec<usize>> = vec![Vec::new(); table.lengths.iter().max().unwrap() + 1];
        for y in 0..m {
            by_length[table.lengths[y]].push(y);
        }
        table.cols[0] = vec![(0, LaurentPoly::one())];
        for level in by_length.iter().skip(1) {
            let computed: Vec<Vec<(u32, LaurentPoly)>> =
                level.par_iter().map(|&y| table.column_from_shorter(y)).collect();
            for (&y, col) in level.iter().zip(computed) {
                table.mu[y] = mu_of_column(y, &col);
                table.cols[y] = col;
            }
        }
        Ok(table)
    }

    /// Rebuilds a table from its nonzero `(x, y, h_{x,y})` entries.
    pub fn from_entries(
        n: usize,
        max_rank: usize,
        entries: impl IntoIterator<Item = (Perm, Perm, LaurentPoly)>,
    ) -> Result<Self, KlError> {
        let mut table = Self::skeleton(n, max_rank)?;
        for (x, y, p) in entries {
            if x.rank() != n || y.rank() != n {
                return Err(KlError::BadEntry(format!("{x},{y}")));
            }
            if p.is_zero() {
                continue;
            }
            table.cols[y.lex_index()].push((x.lex_index() as u32, p));
        }
        for y in 0..table.cols.len() {
            table.cols[y].sort_by_key(|(x, _)| *x);
            table.mu[y] = mu_of_column(y, &table.cols[y]);
        }
        Ok(table)
    }

    fn skeleton(n: usize, max_rank: usize) -> Result<Self, KlError> {
        if n == 0 {
            return Err(KlError::EmptyRank);
        }
        if n > max_rank.min(EXTENDED_MAX_RANK) {
            return Err(KlError::RankTooLarge { n, max: max_rank.min(EXTENDED_MAX_RANK) });
        }
        let elements = enumerate(n);
        let lengths = elements.iter().map(Perm::length).collect();
        let left_mul =
            (1..n).map(|i| elements.iter().map(|w| w.left_mul_simple(i).lex_index() as u32).collect()).collect();
        let m = elements.len();
        Ok(Self { n, elements, lengths, left_mul, cols: vec![Vec::new(); m], mu: vec![Vec::new(); m] })
    }

    fn column_from_shorter(&self, y: usize) -> Vec<(u32, LaurentPoly)> {
        let s = (1..self.n).find(|&i| self.lengths[self.sx(i, y)] < self.lengths[y]).expect("nonidentity");
        let u = self.sx(s, y);
        let mut candidates: Vec<usize> =
            self.cols[u].iter().flat_map(|&(x, _)| [x as usize, self.sx(s, x as usize)]).collect();
        candidates.sort_unstable();
        candidates.dedup();
        let corrections: Vec<(usize, i64)> = self.mu[u]
            .iter()
            .filter(|&&(z, _)| self.lengths[self.sx(s, z as usize)] < self.lengths[z as usize])
            .map(|&(z, c)| (z as usize, c))
            .collect();
        let (v, v_inv) = (LaurentPoly::v(), LaurentPoly::monomial(1, -1));
        let mut col = Vec::new();
        for x in candidates {
            let sx = self.sx(s, x);
            let factor = if self.lengths[sx] > self.lengths[x] { &v_inv } else { &v };
            let mut val = self.h_idx(sx, u).clone() + factor * self.h_idx(x, u);
            for &(z, c) in &corrections {
                let hz = self.h_idx(x, z);
                if !hz.is_zero() {
                    val -= hz.scale_i64(c);
                }
            }
            if !val.is_zero() {
                col.push((x as u32, val));
            }
        }
        col
    }

    fn sx(&self, i: usize, x: usize) -> usize {
        self.left_mul[i - 1][x] as usize
    }

    /// Number of elements, `n!`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn length_idx(&self, y: usize) -> usize {
        self.lengths[y]
    }

    /// Index of `s_i y`.
    pub fn left_mul_idx(&self, i: usize, y: usize) -> usize {
        self.sx(i, y)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn h_idx(&self, x: usize, y: usize) -> &LaurentPoly {
        static ZERO: LaurentPoly = LaurentPoly::ZERO;
        match self.cols[y].binary_search_by_key(&(x as u32), |(i, _)| *i) {
            Ok(k) => &self.cols[y][k].1,
            Err(_) => &ZERO,
        }
    }

    /// `h_{x,y}`, the coefficient of `H_x` in `H̲_y`.
    pub fn h(&self, x: &Perm, y: &Perm) -> LaurentPoly {
        self.h_idx(x.lex_index(), y.lex_index()).clone()
    }

    /// The coefficient of `v^-1` in `h_{x,y}`.
    pub fn mu(&self, x: &Perm, y: &Perm) -> i64 {
        let (x, y) = (x.lex_index() as u32, y.lex_index());
        match self.mu[y].binary_search_by_key(&x, |(i, _)| *i) {
            Ok(k) => self.mu[y][k].1,
            Err(_) => 0,
        }
    }

    /// Nonzero `μ(z, y)` with `z < y`, by lex index.
    pub fn mu_list_idx(&self, y: usize) -> &[(u32, i64)] {
        &self.mu[y]
    }

    /// Standard-basis expansion of `H̲_y`.
    pub fn expansion(&self, y: &Perm) -> Vec<(Perm, LaurentPoly)> {
        self.cols[y.lex_index()].iter().map(|(x, p)| (self.elements[*x as usize].clone(), p.clone())).collect()
    }

    /// All nonzero entries `(x, y, h_{x,y})`, ordered by `y` then `x`.
    pub fn entries(&self) -> impl Iterator<Item = (&Perm, &Perm, &LaurentPoly)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(move |(y, col)| col.iter().map(move |(x, p)| (&self.elements[*x as usize], &self.elements[y], p)))
    }

    /// Expansion of `H̲_s H̲_w` in the Kazhdan–Lusztig basis, `s = s_i`.
    pub fn underline_s_times_underline_w(&self, i: usize, w: &Perm) -> Vec<(Perm, LaurentPoly)> {
        let wi = w.lex_index();
        let swi = self.sx(i, wi);
        if self.lengths[swi] < self.lengths[wi] {
            return vec![(w.clone(), LaurentPoly::v_plus_inv())];
        }
        let mut out = vec![(self.elements[swi].clone(), LaurentPoly::one())];
        for &(z, c) in &self.mu[wi] {
            let z = z as usize;
            if self.lengths[self.sx(i, z)] < self.lengths[z] {
                out.push((self.elements[z].clone(), LaurentPoly::constant(c)));
            }
        }
        out
    }
}

fn mu_of_column(y: usize, col: &[(u32, LaurentPoly)]) -> Vec<(u32, i64)> {
    col.iter()
        .filter(|(x, _)| *x as usize != y)
        .filter_map(|(x, p)| {
            let c = p.coeff_i64(-1);
            (c != 0).then_some((*x, c))
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use std::collections::BTreeMap;

    /// Elements of the Hecke algebra in the standard basis, keyed by lex index.
    pub(crate) type HeckeElt = BTreeMap<usize, LaurentPoly>;

    pub(crate) fn left_mul_hs(elems: &[Perm], i: usize, a: &HeckeElt) -> HeckeElt {
        let mut out = HeckeElt::new();
        for (&y, c) in a {
            let sy = elems[y].left_mul_simple(i);
            let syi = sy.lex_index();
            *out.entry(syi).or_default() += c;
            if sy.length() < elems[y].length() {
                *out.entry(y).or_default() += c * LaurentPoly::v_minus_inv();
            }
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    fn bar_elt(elems: &[Perm], a: &HeckeElt) -> HeckeElt {
        let mut out = HeckeElt::new();
        for (&x, c) in a {
            // bar(H_x) = (H_{s_1} - (v - v^-1)) ... (H_{s_k} - (v - v^-1))
            let mut acc: HeckeElt = [(0usize, c.bar())].into_iter().collect();
            for &i in elems[x].reduced_word().iter().rev() {
                let mut next = left_mul_hs(elems, i, &acc);
                for (k, p) in &acc {
                    *next.entry(*k).or_default() -= p * LaurentPoly::v_minus_inv();
                }
                next.retain(|_, p| !p.is_zero());
                acc = next;
            }
            for (k, p) in acc {
                *out.entry(k).or_default() += p;
            }
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    fn p(s: &str) -> Perm {
        s.parse().unwrap()
    }

    #[test]
    fn rank_two() {
        let t = KlTable::compute(2, DEFAULT_MAX_RANK).unwrap();
        assert_eq!(t.h(&p("12"), &p("21")), LaurentPoly::monomial(1, -1));
        assert_eq!(t.h(&p("21"), &p("21")), LaurentPoly::one());
    }

    #[test]
    fn longest_element_of_s3() {
        let t = KlTable::compute(3, DEFAULT_MAX_RANK).unwrap();
        let w0 = Perm::longest(3);
        for x in enumerate(3) {
            assert_eq!(t.h(&x, &w0), LaurentPoly::monomial(1, x.length() as i32 - 3), "x = {x}");
        }
    }

    #[test]
    fn unitriangular_without_constant_terms() {
        let t = KlTable::compute(5, DEFAULT_MAX_RANK).unwrap();
        for (x, y, h) in t.entries() {
            if x == y {
                assert!(h.is_one());
            } else {
                assert!(x.bruhat_leq(y).unwrap());
                assert!(h.is_strictly_negative(), "h_{{{x},{y}}} = {h}");
            }
        }
        // every x <= y has nonzero h
        let elems = enumerate(4);
        let t4 = KlTable::compute(4, DEFAULT_MAX_RANK).unwrap();
        for x in &elems {
            for y in &elems {
                assert_eq!(!t4.h(x, y).is_zero(), x.bruhat_leq(y).unwrap());
            }
        }
    }

    #[test]
    fn bar_invariance_up_to_rank_four() {
        for n in 1..=4 {
            let t = KlTable::compute(n, DEFAULT_MAX_RANK).unwrap();
            let elems = enumerate(n);
            for y in &elems {
                let elt: HeckeElt = t.expansion(y).into_iter().map(|(x, p)| (x.lex_index(), p)).collect();
                assert_eq!(bar_elt(&elems, &elt), elt, "H̲_{y} not bar invariant");
            }
        }
    }

    #[test]
    fn product_expansion_matches_standard_basis() {
        for n in 2..=4 {
            let t = KlTable::compute(n, DEFAULT_MAX_RANK).unwrap();
            let elems = enumerate(n);
            let std = |y: &Perm| -> HeckeElt { t.expansion(y).into_iter().map(|(x, p)| (x.lex_index(), p)).collect() };
            for w in &elems {
                for i in 1..n {
                    // H̲_s H̲_w computed in the standard basis
                    let hw = std(w);
                    let mut direct = left_mul_hs(&elems, i, &hw);
                    for (k, p) in &hw {
                        *direct.entry(*k).or_default() += p * LaurentPoly::monomial(1, -1);
                    }
                    direct.retain(|_, p| !p.is_zero());
                    let mut via = HeckeElt::new();
                    for (z, c) in t.underline_s_times_underline_w(i, w) {
                        for (k, p) in std(&z) {
                            *via.entry(k).or_default() += &c * &p;
                        }
                    }
                    via.retain(|_, p| !p.is_zero());
                    assert_eq!(direct, via, "s_{i} * {w}");
                }
            }
        }
    }

    #[test]
    fn product_examples() {
        let t2 = KlTable::compute(2, DEFAULT_MAX_RANK).unwrap();
        assert_eq!(t2.underline_s_times_underline_w(1, &p("21")), vec![(p("21"), LaurentPoly::v_plus_inv())]);
        let t3 = KlTable::compute(3, DEFAULT_MAX_RANK).unwrap();
        // s_1 s_2 = 231 in one-line notation; the identity has mu = 1 but s_1 is not a descent of it
        let prod = t3.underline_s_times_underline_w(1, &p("132"));
        assert_eq!(prod, vec![(p("231"), LaurentPoly::one())]);
        // s_2 (s_1 s_2): the correction term from s_2 appears
        let prod = t3.underline_s_times_underline_w(2, &p("231"));
        assert_eq!(prod, vec![(p("321"), LaurentPoly::one()), (p("132"), LaurentPoly::one())]);
        assert_eq!(t3.mu(&p("123"), &p("132")), 1);
    }

    #[test]
    fn rank_cap() {
        assert_eq!(KlTable::compute(7, DEFAULT_MAX_RANK), Err(KlError::RankTooLarge { n: 7, max: 6 }));
        assert_eq!(KlTable::compute(0, DEFAULT_MAX_RANK), Err(KlError::EmptyRank));
    }

    #[test]
    fn entries_round_trip() {
        let t = KlTable::compute(4, DEFAULT_MAX_RANK).unwrap();
        let rebuilt =
            KlTable::from_entries(4, DEFAULT_MAX_RANK, t.entries().map(|(x, y, p)| (x.clone(), y.clone(), p.clone())))
                .unwrap();
        assert_eq!(rebuilt, t);
    }
}
