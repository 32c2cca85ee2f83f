//! Permutations of `[n]` in one-line notation and the Coxeter combinatorics of
//! `S_n` with simple reflections `s_i = (i, i+1)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("not a permutation of 1..{n}: {window:?}")]
    NotPermutation { n: usize, window: Vec<usize> },
    #[error("fixed-point-free involutions need an even rank, got {0}")]
    OddRank(usize),
    #[error("block {start}..={end} has odd size, no fixed-point-free involution exists")]
    OddBlock { start: usize, end: usize },
    #[error("generator index {index} out of range for rank {n}")]
    BadGenerator { index: usize, n: usize },
    #[error("cannot parse permutation {0:?}")]
    Parse(String),
}

/// A permutation `w` of `{1, ..., n}` stored by its window `w(1) ... w(n)`.
///
/// Ordering is lexicographic on the window, which fixes every matrix index in
/// the crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    window: Vec<u8>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Self { window: (1..=n as u8).collect() }
    }

    pub fn from_window(window: &[usize]) -> Result<Self, PermError> {
        let n = window.len();
        let mut seen = vec![false; n + 1];
        for &a in window {
            if a == 0 || a > n || seen[a] {
                return Err(PermError::NotPermutation { n, window: window.to_vec() });
            }
            seen[a] = true;
        }
        Ok(Self { window: window.iter().map(|&a| a as u8).collect() })
    }

    /// The simple reflection `s_i = (i, i+1)`, `1 <= i < n`.
    pub fn simple(n: usize, i: usize) -> Result<Self, PermError> {
        if i == 0 || i >= n {
            return Err(PermError::BadGenerator { index: i, n });
        }
        Ok(Self::transposition(n, i, i + 1))
    }

    /// The transposition `(a, b)`, 1-based.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut w = Self::identity(n);
        w.window.swap(a - 1, b - 1);
        w
    }

    /// The longest element `w_0`.
    pub fn longest(n: usize) -> Self {
        Self { window: (1..=n as u8).rev().collect() }
    }

    pub fn rank(&self) -> usize {
        self.window.len()
    }

    /// `w(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.window[i - 1] as usize
    }

    pub fn window(&self) -> Vec<usize> {
        self.window.iter().map(|&a| a as usize).collect()
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Result<Perm, PermError> {
        if self.rank() != other.rank() {
            return Err(PermError::RankMismatch(self.rank(), other.rank()));
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Perm) -> Perm {
        Perm { window: other.window.iter().map(|&j| self.window[j as usize - 1]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut window = vec![0u8; self.rank()];
        for (i, &a) in self.window.iter().enumerate() {
            window[a as usize - 1] = i as u8 + 1;
        }
        Perm { window }
    }

    /// Number of inversions.
    pub fn length(&self) -> usize {
        let w = &self.window;
        let mut count = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// `s_i w`: swaps the values `i` and `i+1` in the window.
    pub fn left_mul_simple(&self, i: usize) -> Perm {
        let (a, b) = (i as u8, i as u8 + 1);
        Perm {
            window: self
                .window
                .iter()
                .map(|&x| {
                    if x == a {
                        b
                    } else if x == b {
                        a
                    } else {
                        x
                    }
                })
                .collect(),
        }
    }

    /// `w s_i`: swaps positions `i` and `i+1`.
    pub fn right_mul_simple(&self, i: usize) -> Perm {
        let mut w = self.clone();
        w.window.swap(i - 1, i);
        w
    }

    /// Conjugation `s_i w s_i`.
    pub fn conj_simple(&self, i: usize) -> Perm {
        self.left_mul_simple(i).right_mul_simple(i)
    }

    /// Whether `s_i w < w`, i.e. `i+1` appears before `i` in the window.
    pub fn has_left_descent(&self, i: usize) -> bool {
        let inv = self.inverse();
        inv.window[i - 1] > inv.window[i]
    }

    /// Whether `w s_i < w`, i.e. `w(i) > w(i+1)`.
    pub fn has_right_descent(&self, i: usize) -> bool {
        self.window[i - 1] > self.window[i]
    }

    pub fn left_descents(&self) -> Vec<usize> {
        (1..self.rank()).filter(|&i| self.has_left_descent(i)).collect()
    }

    /// A reduced word `[i_1, ..., i_k]` with `w = s_{i_1} ... s_{i_k}`, found by
    /// repeatedly stripping the smallest left descent.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut word = Vec::with_capacity(self.length());
        let mut w = self.clone();
        while let Some(i) = (1..w.rank()).find(|&i| w.has_left_descent(i)) {
            word.push(i);
            w = w.left_mul_simple(i);
        }
        word
    }

    pub fn from_word(n: usize, word: &[usize]) -> Perm {
        word.iter().rev().fold(Perm::identity(n), |w, &i| w.left_mul_simple(i))
    }

    /// Bruhat order `self <= w`.
    ///
    /// Walks a reduced word `s_1 ... s_k` of `w` from the left: if `s_1 w' < w'`
    /// for the current lower candidate it is stripped as well. This is the
    /// subword criterion applied to one fixed reduced word of `w`.
    pub fn bruhat_leq(&self, w: &Perm) -> Result<bool, PermError> {
        if self.rank() != w.rank() {
            return Err(PermError::RankMismatch(self.rank(), w.rank()));
        }
        let mut u = self.clone();
        if u.length() > w.length() {
            return Ok(false);
        }
        for i in w.reduced_word() {
            if u.has_left_descent(i) {
                u = u.left_mul_simple(i);
            }
        }
        Ok(u.length() == 0)
    }

    pub fn is_involution(&self) -> bool {
        self.window.iter().enumerate().all(|(i, &a)| self.window[a as usize - 1] as usize == i + 1)
    }

    pub fn is_fpf_involution(&self) -> bool {
        self.is_involution() && self.window.iter().enumerate().all(|(i, &a)| a as usize != i + 1)
    }

    /// Pairs `(a, w(a))` with `a <= w(a)`, sorted by the larger entry.
    pub fn involution_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = (1..=self.rank())
            .filter_map(|a| {
                let b = self.apply(a);
                (a <= b).then_some((a, b))
            })
            .collect();
        pairs.sort_by_key(|&(_, b)| b);
        pairs
    }

    /// Position of `self` in the lexicographic enumeration of `S_n`.
    pub fn lex_index(&self) -> usize {
        let n = self.rank();
        let mut idx = 0;
        for i in 0..n {
            let smaller_later = self.window[i + 1..].iter().filter(|&&b| b < self.window[i]).count();
            idx = idx * (n - i) + smaller_later;
        }
        idx
    }
}

/// All `n!` permutations of rank `n`, lexicographic.
pub fn enumerate(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (1..=n as u8).collect();
    loop {
        out.push(Perm { window: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// All fixed-point-free involutions of even rank `n`, lexicographic.
pub fn enumerate_fpf(n: usize) -> Result<Vec<Perm>, PermError> {
    if n % 2 == 1 {
        return Err(PermError::OddRank(n));
    }
    let mut out = Vec::new();
    let mut window = vec![0u8; n];
    fill_fpf(&mut window, &mut out);
    out.sort();
    Ok(out)
}

fn fill_fpf(window: &mut [u8], out: &mut Vec<Perm>) {
    let Some(a) = window.iter().position(|&x| x == 0) else {
        out.push(Perm { window: window.to_vec() });
        return;
    };
    for b in a + 1..window.len() {
        if window[b] == 0 {
            window[a] = b as u8 + 1;
            window[b] = a as u8 + 1;
            fill_fpf(window, out);
            window[a] = 0;
            window[b] = 0;
        }
    }
}

/// Blocks `[start, end]` (1-based, inclusive) of the Young subgroup generated
/// by the `s_k` with `k` not excluded.
fn blocks(n: usize, excluded: &[usize]) -> Vec<(usize, usize)> {
    let mut cuts: Vec<usize> = excluded.iter().copied().filter(|&k| k >= 1 && k < n).collect();
    cuts.sort_unstable();
    cuts.dedup();
    cuts.push(n);
    let mut out = Vec::new();
    let mut start = 1;
    for c in cuts {
        out.push((start, c));
        start = c + 1;
    }
    out
}

/// Longest element of the Young subgroup generated by `s_k`, `k` in
/// `[1, n-1]` minus `excluded`: reverses every block between cut points.
pub fn parabolic_longest(n: usize, excluded: &[usize]) -> Perm {
    let mut window: Vec<u8> = (1..=n as u8).collect();
    for (a, b) in blocks(n, excluded) {
        window[a - 1..b].reverse();
    }
    Perm { window }
}

/// Minimal-length fixed-point-free involution of the same Young subgroup:
/// `(a, a+1)(a+2, a+3)...` inside every block.
pub fn parabolic_min_fpf(n: usize, excluded: &[usize]) -> Result<Perm, PermError> {
    let mut window: Vec<u8> = (1..=n as u8).collect();
    for (a, b) in blocks(n, excluded) {
        if (b + 1 - a) % 2 == 1 {
            return Err(PermError::OddBlock { start: a, end: b });
        }
        for i in (a..b).step_by(2) {
            window.swap(i - 1, i);
        }
    }
    Ok(Perm { window })
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank() <= 9 {
            for a in &self.window {
                write!(f, "{a}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.window.iter().map(|a| a.to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({self})")
    }
}

impl FromStr for Perm {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let window: Option<Vec<usize>> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect()
        };
        let window = window.ok_or_else(|| PermError::Parse(s.to_string()))?;
        Perm::from_window(&window)
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Compares two permutations by length, then lexicographically.
pub fn length_lex(a: &Perm, b: &Perm) -> Ordering {
    a.length().cmp(&b.length()).then_with(|| a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Perm {
        s.parse().unwrap()
    }

    /// Bruhat order as the transitive closure of `u < ut` with `l(ut) > l(u)`.
    fn closure_oracle(n: usize) -> Vec<Vec<bool>> {
        let all = enumerate(n);
        let m = all.len();
        let mut rel = vec![vec![false; m]; m];
        for (i, u) in all.iter().enumerate() {
            rel[i][i] = true;
            for a in 1..=n {
                for b in a + 1..=n {
                    let ut = u.compose_unchecked(&Perm::transposition(n, a, b));
                    if ut.length() > u.length() {
                        rel[i][ut.lex_index()] = true;
                    }
                }
            }
        }
        for k in 0..m {
            for i in 0..m {
                if rel[i][k] {
                    for j in 0..m {
                        if rel[k][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
        }
        rel
    }

    #[test]
    fn composition() {
        assert_eq!(p("2134").compose(&p("1324")).unwrap(), p("2314"));
        let w = p("3142");
        assert_eq!(w.compose(&Perm::identity(4)).unwrap(), w);
        assert_eq!(w.compose(&w.inverse()).unwrap(), Perm::identity(4));
        assert_eq!(w.compose(&p("123")), Err(PermError::RankMismatch(4, 3)));
    }

    #[test]
    fn lengths() {
        assert_eq!(p("4321").length(), 6);
        assert_eq!(Perm::identity(4).length(), 0);
        assert_eq!(p("2143").length(), 2);
    }

    #[test]
    fn bruhat_examples() {
        assert!(p("2143").bruhat_leq(&p("4321")).unwrap());
        assert!(!p("3412").bruhat_leq(&p("2143")).unwrap());
        assert!(p("1324").bruhat_leq(&p("3142")).unwrap());
        assert!(p("12").bruhat_leq(&p("123")).is_err());
    }

    #[test]
    fn bruhat_matches_transposition_closure() {
        for n in 1..=4 {
            let all = enumerate(n);
            let rel = closure_oracle(n);
            for (i, u) in all.iter().enumerate() {
                for (j, w) in all.iter().enumerate() {
                    assert_eq!(u.bruhat_leq(w).unwrap(), rel[i][j], "{u} <= {w}");
                }
            }
        }
    }

    #[test]
    fn enumeration() {
        assert_eq!(enumerate(3).len(), 6);
        assert_eq!(enumerate(5).len(), 120);
        assert!(enumerate(4).windows(2).all(|w| w[0] < w[1]));
        assert_eq!(enumerate_fpf(2).unwrap(), vec![p("21")]);
        assert_eq!(enumerate_fpf(4).unwrap(), vec![p("2143"), p("3412"), p("4321")]);
        assert_eq!(enumerate_fpf(6).unwrap().len(), 15);
        assert_eq!(enumerate_fpf(8).unwrap().len(), 105);
        assert_eq!(enumerate_fpf(3), Err(PermError::OddRank(3)));
        // oracle: filter S_4
        let filtered: Vec<Perm> = enumerate(4).into_iter().filter(Perm::is_fpf_involution).collect();
        assert_eq!(filtered, enumerate_fpf(4).unwrap());
    }

    #[test]
    fn lex_index_matches_enumeration() {
        for (i, w) in enumerate(5).iter().enumerate() {
            assert_eq!(w.lex_index(), i);
        }
    }

    #[test]
    fn parabolic_elements() {
        assert_eq!(parabolic_longest(4, &[2]), p("2143"));
        assert_eq!(parabolic_longest(4, &[]), p("4321"));
        assert_eq!(parabolic_longest(4, &[1, 2, 3]), Perm::identity(4));
        assert_eq!(parabolic_min_fpf(4, &[]).unwrap(), p("2143"));
        assert_eq!(parabolic_min_fpf(4, &[2]).unwrap(), p("2143"));
        assert_eq!(parabolic_min_fpf(6, &[4]).unwrap(), p("214365"));
        assert_eq!(parabolic_min_fpf(4, &[1]), Err(PermError::OddBlock { start: 1, end: 1 }));
    }

    #[test]
    fn reduced_words() {
        for w in enumerate(4) {
            let word = w.reduced_word();
            assert_eq!(word.len(), w.length());
            assert_eq!(Perm::from_word(4, &word), w);
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("2143").to_string(), "2143");
        assert!("2243".parse::<Perm>().is_err());
        assert!("21x3".parse::<Perm>().is_err());
        let big = Perm::longest(10);
        assert_eq!(big.to_string().parse::<Perm>().unwrap(), big);
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Perm> {
        Just((1..=n).collect::<Vec<_>>()).prop_shuffle().prop_map(|w| Perm::from_window(&w).unwrap())
    }

    proptest! {
        #[test]
        fn length_axioms((u, w) in (1usize..=6).prop_flat_map(|n| (arb_perm(n), arb_perm(n)))) {
            let uw = u.compose(&w).unwrap();
            prop_assert!(uw.length() <= u.length() + w.length());
            prop_assert_eq!(w.length(), w.inverse().length());
            for i in 1..w.rank() {
                let sw = w.left_mul_simple(i);
                prop_assert_eq!(sw.length().abs_diff(w.length()), 1);
                prop_assert_eq!(sw.length() < w.length(), w.has_left_descent(i));
            }
        }

        #[test]
        fn bruhat_matches_tableau_criterion((u, w) in arb_perm(5).prop_flat_map(|u| (Just(u), arb_perm(5)))) {
            // u <= w iff sorted prefixes of u are dominated by those of w
            let crit = (1..=5).all(|k| {
                let mut a: Vec<usize> = u.window()[..k].to_vec();
                let mut b: Vec<usize> = w.window()[..k].to_vec();
                a.sort_unstable();
                b.sort_unstable();
                a.iter().zip(&b).all(|(x, y)| x <= y)
            });
            prop_assert_eq!(u.bruhat_leq(&w).unwrap(), crit);
        }
    }
}
