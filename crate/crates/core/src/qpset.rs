//! Scaled `S_n`-sets: a finite carrier with a generator action and a height
//! function, the quasiparabolic axiom checker, and the induced Bruhat order.
//!
//! Heights are exact rationals. The fixed-point-free set uses `ht = ℓ/2`, so its
//! minimal height is `n/4` rather than `0`; every formula downstream only uses
//! height differences, which are integers inside an orbit, so no normalization
//! is applied.

use std::collections::HashMap;
use std::fmt;

use num_rational::Rational64;
use serde::Serialize;
use thiserror::Error;

use crate::perm::{self, Perm, PermError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QpError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("{0} is not in the carrier")]
    NotInCarrier(Perm),
    #[error("{x} is not in the orbit of {base}")]
    NotInOrbit { x: Perm, base: Perm },
    #[error("rank {0} is too small")]
    EmptyRank(usize),
}

/// How `S_n` acts on the carrier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Action {
    /// `w · x = w x w⁻¹`.
    Conjugation,
    /// `w · x = w x`.
    LeftMultiplication,
}

/// A finite scaled `S_n`-set.
///
/// Elements are addressed by their index in `carrier` (lexicographic order).
/// Generators are numbered `1..n`; reflections are the transpositions `(a, b)`
/// with `a < b`, in lexicographic order.
#[derive(Clone, Debug)]
pub struct QpSet {
    n: usize,
    name: String,
    action: Action,
    carrier: Vec<Perm>,
    index: HashMap<Perm, usize>,
    /// `gens[i - 1][x]` is the index of `s_i · x`.
    gens: Vec<Vec<u32>>,
    reflections: Vec<(usize, usize)>,
    /// `refl[r][x]` is the index of `t_r · x`.
    refl: Vec<Vec<u32>>,
    heights: Vec<Rational64>,
    orbit: Vec<usize>,
    /// `below[y]` is the bitset of all `x <= y` in the Bruhat order on `X`.
    below: Vec<Vec<u64>>,
}

/// A violated instance of one of the two quasiparabolic axioms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum QpViolation {
    /// `ht(t x) = ht(x)` but `t x != x`.
    LevelReflection { reflection: (usize, usize), x: Perm },
    /// `ht(t x) > ht(x)` and `ht(s t x) < ht(s x)` but `t x != s x`.
    Exchange { reflection: (usize, usize), generator: usize, x: Perm },
}

impl fmt::Display for QpViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QpViolation::LevelReflection { reflection: (a, b), x } => {
                write!(f, "({a} {b}) fixes the height of {x} but moves it")
            }
            QpViolation::Exchange { reflection: (a, b), generator, x } => {
                write!(f, "({a} {b}) raises {x}, s{generator} reverses it, but ({a} {b})·x != s{generator}·x")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QpReport {
    pub holds: bool,
    pub violations: Vec<QpViolation>,
}

impl QpSet {
    /// Fixed-point-free involutions of `[n]` under conjugation, `ht = ℓ/2`.
    pub fn fpf(n: usize) -> Result<Self, QpError> {
        let carrier = perm::enumerate_fpf(n)?;
        if carrier.is_empty() {
            return Err(QpError::EmptyRank(n));
        }
        Ok(Self::build(n, format!("fpf-{n}"), Action::Conjugation, carrier, |x| Rational64::new(x.length() as i64, 2)))
    }

    /// `S_n` acting on itself by left multiplication, `ht = ℓ`.
    pub fn regular(n: usize) -> Result<Self, QpError> {
        if n == 0 {
            return Err(QpError::EmptyRank(n));
        }
        Ok(Self::build(n, format!("regular-{n}"), Action::LeftMultiplication, perm::enumerate(n), |x| {
            Rational64::from_integer(x.length() as i64)
        }))
    }

    /// The conjugacy class of `rep` under conjugation, `ht = ℓ/2`. Such classes
    /// need not be quasiparabolic; this exists mainly to exercise the checker.
    pub fn conjugacy_class(rep: &Perm) -> Self {
        let n = rep.rank();
        let mut seen = HashMap::new();
        let mut stack = vec![rep.clone()];
        seen.insert(rep.clone(), ());
        while let Some(x) = stack.pop() {
            for i in 1..n {
                let y = x.conj_simple(i);
                if seen.insert(y.clone(), ()).is_none() {
                    stack.push(y);
                }
            }
        }
        let mut carrier: Vec<Perm> = seen.into_keys().collect();
        carrier.sort();
        Self::build(n, format!("class-of-{rep}"), Action::Conjugation, carrier, |x| {
            Rational64::new(x.length() as i64, 2)
        })
    }

    fn build(n: usize, name: String, action: Action, carrier: Vec<Perm>, ht: impl Fn(&Perm) -> Rational64) -> Self {
        let index: HashMap<Perm, usize> = carrier.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let act = |t: &Perm, x: &Perm| match action {
            Action::Conjugation => t.compose_unchecked(x).compose_unchecked(t),
            Action::LeftMultiplication => t.compose_unchecked(x),
        };
        let lookup = |p: Perm| *index.get(&p).expect("action leaves the carrier") as u32;
        let gens: Vec<Vec<u32>> = (1..n)
            .map(|i| {
                let s = Perm::transposition(n, i, i + 1);
                carrier.iter().map(|x| lookup(act(&s, x))).collect()
            })
            .collect();
        let reflections: Vec<(usize, usize)> = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
        let refl = reflections
            .iter()
            .map(|&(a, b)| {
                let t = Perm::transposition(n, a, b);
                carrier.iter().map(|x| lookup(act(&t, x))).collect()
            })
            .collect();
        let heights = carrier.iter().map(ht).collect();

        // Orbits under the generators, labelled by their smallest index.
        let mut orbit = vec![usize::MAX; carrier.len()];
        for start in 0..carrier.len() {
            if orbit[start] != usize::MAX {
                continue;
            }
            orbit[start] = start;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for g in &gens {
                    let y = g[x] as usize;
                    if orbit[y] == usize::MAX {
                        orbit[y] = start;
                        stack.push(y);
                    }
                }
            }
        }

        let mut set =
            QpSet { n, name, action, carrier, index, gens, reflections, refl, heights, orbit, below: Vec::new() };
        set.below = set.compute_order();
        set
    }

    fn compute_order(&self) -> Vec<Vec<u64>> {
        let len = self.len();
        let words = len.div_ceil(64);
        let mut below = vec![vec![0u64; words]; len];
        // Every covering step x < t·x strictly raises the height, so filling
        // in increasing height order sees each lower set complete.
        for &y in &self.by_height() {
            let mut set = vec![0u64; words];
            set[y / 64] |= 1 << (y % 64);
            for r in 0..self.reflections.len() {
                let x = self.refl[r][y] as usize;
                if self.heights[x] < self.heights[y] {
                    for (a, b) in set.iter_mut().zip(&below[x]) {
                        *a |= *b;
                    }
                }
            }
            below[y] = set;
        }
        below
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn action(&self) -> Action {
        self.action
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn carrier(&self) -> &[Perm] {
        &self.carrier
    }

    pub fn element(&self, x: usize) -> &Perm {
        &self.carrier[x]
    }

    pub fn index_of(&self, p: &Perm) -> Result<usize, QpError> {
        self.index.get(p).copied().ok_or_else(|| QpError::NotInCarrier(p.clone()))
    }

    /// Number of simple generators, `n - 1`.
    pub fn num_generators(&self) -> usize {
        self.gens.len()
    }

    /// Index of `s_i · x`.
    pub fn gen(&self, i: usize, x: usize) -> usize {
        self.gens[i - 1][x] as usize
    }

    pub fn reflections(&self) -> &[(usize, usize)] {
        &self.reflections
    }

    /// Index of `t_r · x` for the `r`-th reflection.
    pub fn refl(&self, r: usize, x: usize) -> usize {
        self.refl[r][x] as usize
    }

    /// Index of `w · x`.
    pub fn act(&self, w: &Perm, x: usize) -> usize {
        w.reduced_word().iter().rev().fold(x, |y, &i| self.gen(i, y))
    }

    pub fn height(&self, x: usize) -> Rational64 {
        self.heights[x]
    }

    /// `ht(y) - ht(x)`; integral whenever `x` and `y` share an orbit.
    pub fn height_gap(&self, x: usize, y: usize) -> i32 {
        let d = self.heights[y] - self.heights[x];
        assert!(d.is_integer(), "non-integral height gap between {} and {}", self.carrier[x], self.carrier[y]);
        d.to_integer() as i32
    }

    /// `ht(s_i x)` compared to `ht(x)`.
    pub fn step(&self, i: usize, x: usize) -> std::cmp::Ordering {
        self.heights[self.gen(i, x)].cmp(&self.heights[x])
    }

    /// Index of the orbit representative (smallest index in the orbit).
    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit[x]
    }

    /// All indices sorted by increasing height, ties by index.
    pub fn by_height(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.heights[a].cmp(&self.heights[b]).then(a.cmp(&b)));
        idx
    }

    /// Generators `s_i` with `ht(s_i x) < ht(x)`.
    pub fn lowering(&self, x: usize) -> Vec<usize> {
        (1..self.n).filter(|&i| self.step(i, x).is_lt()).collect()
    }

    /// Bruhat order on `X`: `x <= y`.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.below[y][x / 64] >> (x % 64) & 1 == 1
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    /// All `x <= y`, ascending by index.
    pub fn lower_set(&self, y: usize) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.leq(x, y)).collect()
    }

    pub fn order_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.len()).map(|x| (0..self.len()).map(|y| self.leq(x, y)).collect()).collect()
    }

    /// Elements with `ht(s x) >= ht(x)` for every generator.
    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| (1..self.n).all(|i| !self.step(i, x).is_lt())).collect()
    }

    /// Elements with `ht(s x) <= ht(x)` for every generator.
    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| (1..self.n).all(|i| !self.step(i, x).is_gt())).collect()
    }

    /// The minimal element of the orbit of `x`, if there is exactly one.
    pub fn orbit_minimum(&self, x: usize) -> Option<usize> {
        let o = self.orbit[x];
        let mins: Vec<usize> = self.minimal_elements().into_iter().filter(|&m| self.orbit[m] == o).collect();
        (mins.len() == 1).then(|| mins[0])
    }

    /// A `w` with `x = w · base` and `ht(x) = ℓ(w) + ht(base)`, found by
    /// repeatedly lowering `x` with the smallest available generator.
    pub fn transporter(&self, base: usize, x: usize) -> Result<Perm, QpError> {
        let mut word = Vec::new();
        let mut y = x;
        while let Some(&i) = self.lowering(y).first() {
            word.push(i);
            y = self.gen(i, y);
        }
        let w = Perm::from_word(self.n, &word);
        if y != base || w.length() as i32 != self.height_gap(base, x) {
            return Err(QpError::NotInOrbit { x: self.carrier[x].clone(), base: self.carrier[base].clone() });
        }
        Ok(w)
    }

    /// Exhaustive check of both quasiparabolic axioms over reflections,
    /// elements and generators.
    pub fn check_quasiparabolic(&self) -> QpReport {
        let mut violations = Vec::new();
        for (r, &t) in self.reflections.iter().enumerate() {
            for x in 0..self.len() {
                let tx = self.refl(r, x);
                let (hx, htx) = (self.heights[x], self.heights[tx]);
                if htx == hx && tx != x {
                    violations.push(QpViolation::LevelReflection { reflection: t, x: self.carrier[x].clone() });
                }
                if htx > hx {
                    for i in 1..self.n {
                        let sx = self.gen(i, x);
                        let stx = self.gen(i, tx);
                        if self.heights[stx] < self.heights[sx] && tx != sx {
                            violations.push(QpViolation::Exchange {
                                reflection: t,
                                generator: i,
                                x: self.carrier[x].clone(),
                            });
                        }
                    }
                }
            }
        }
        QpReport { holds: violations.is_empty(), violations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Perm {
        s.parse().unwrap()
    }

    fn idx(x: &QpSet, s: &str) -> usize {
        x.index_of(&p(s)).unwrap()
    }

    #[test]
    fn fpf_four() {
        let x = QpSet::fpf(4).unwrap();
        assert_eq!(x.carrier(), &[p("2143"), p("3412"), p("4321")]);
        let hs: Vec<Rational64> = (0..3).map(|i| x.height(i)).collect();
        assert_eq!(hs, vec![Rational64::from(1), Rational64::from(2), Rational64::from(3)]);
        assert_eq!(x.gen(2, idx(&x, "2143")), idx(&x, "3412"));
        assert_eq!(x.gen(1, idx(&x, "2143")), idx(&x, "2143"));
        assert_eq!(x.minimal_elements(), vec![idx(&x, "2143")]);
        assert_eq!(x.maximal_elements(), vec![idx(&x, "4321")]);
        // total chain
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(x.leq(a, b), a <= b);
            }
        }
        assert_eq!(x.transporter(0, idx(&x, "3412")).unwrap(), Perm::simple(4, 2).unwrap());
        assert_eq!(x.transporter(0, 0).unwrap(), Perm::identity(4));
        let w = x.transporter(0, idx(&x, "4321")).unwrap();
        assert!(w == Perm::from_word(4, &[1, 2]) || w == Perm::from_word(4, &[3, 2]));
        assert_eq!(x.act(&w, 0), idx(&x, "4321"));
    }

    #[test]
    fn odd_rank_rejected() {
        assert_eq!(QpSet::fpf(3).unwrap_err(), QpError::Perm(PermError::OddRank(3)));
    }

    #[test]
    fn fpf_six_minimum() {
        let x = QpSet::fpf(6).unwrap();
        assert_eq!(x.len(), 15);
        assert_eq!(x.minimal_elements(), vec![idx(&x, "214365")]);
        assert_eq!(x.maximal_elements(), vec![idx(&x, "654321")]);
        assert!((0..x.len()).all(|y| x.orbit_of(y) == 0));
    }

    #[test]
    fn regular_set_basics() {
        let x = QpSet::regular(3).unwrap();
        assert_eq!(x.len(), 6);
        let s1 = idx(&x, "213");
        assert_eq!(x.gen(1, s1), idx(&x, "123"));
        assert_eq!(x.height(s1), Rational64::from(1));
        for y in 0..x.len() {
            for i in 1..3 {
                assert_ne!(x.height(x.gen(i, y)), x.height(y));
            }
        }
        assert_eq!(x.minimal_elements(), vec![idx(&x, "123")]);
        assert_eq!(x.maximal_elements(), vec![idx(&x, "321")]);
    }

    #[test]
    fn regular_order_is_classical_bruhat() {
        for n in 1..=4 {
            let x = QpSet::regular(n).unwrap();
            for a in 0..x.len() {
                for b in 0..x.len() {
                    assert_eq!(x.leq(a, b), x.element(a).bruhat_leq(x.element(b)).unwrap());
                }
            }
        }
    }

    #[test]
    fn order_respects_height() {
        for x in [QpSet::fpf(6).unwrap(), QpSet::regular(4).unwrap()] {
            for a in 0..x.len() {
                for b in 0..x.len() {
                    if x.lt(a, b) {
                        assert!(x.height(a) < x.height(b));
                    }
                }
            }
        }
    }

    #[test]
    fn action_tables_are_involutions() {
        for x in [QpSet::fpf(6).unwrap(), QpSet::regular(4).unwrap()] {
            for r in 0..x.reflections().len() {
                for y in 0..x.len() {
                    assert_eq!(x.refl(r, x.refl(r, y)), y);
                }
            }
            for i in 1..x.rank() {
                let r = x.reflections().iter().position(|&t| t == (i, i + 1)).unwrap();
                for y in 0..x.len() {
                    assert_eq!(x.gen(i, y), x.refl(r, y));
                    let d = x.height(x.gen(i, y)) - x.height(y);
                    assert!(d == 0.into() || d == 1.into() || d == (-1).into());
                }
            }
        }
    }

    #[test]
    fn z_property() {
        let sets = [QpSet::fpf(4).unwrap(), QpSet::fpf(6).unwrap(), QpSet::regular(3).unwrap()];
        for x in &sets {
            for a in 0..x.len() {
                for b in 0..x.len() {
                    if !x.leq(a, b) {
                        continue;
                    }
                    for i in 1..x.rank() {
                        let (sa, sb) = (x.gen(i, a), x.gen(i, b));
                        if x.leq(sb, b) {
                            assert!(x.leq(sa, b), "{}: s{i}", x.name());
                        }
                        if x.leq(a, sa) {
                            assert!(x.leq(a, sb), "{}: s{i}", x.name());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn quasiparabolic_instances() {
        for n in [2, 4, 6] {
            assert!(QpSet::fpf(n).unwrap().check_quasiparabolic().holds, "fpf {n}");
        }
        for n in 1..=4 {
            assert!(QpSet::regular(n).unwrap().check_quasiparabolic().holds, "regular {n}");
        }
    }

    #[test]
    fn class_of_simple_reflection_is_not_quasiparabolic() {
        let x = QpSet::conjugacy_class(&p("213"));
        assert_eq!(x.carrier(), &[p("132"), p("213"), p("321")]);
        assert_eq!(x.minimal_elements().len(), 2);
        let report = x.check_quasiparabolic();
        assert!(!report.holds);
        assert!(report.violations.iter().any(|v| matches!(v, QpViolation::LevelReflection { .. })));
    }

    #[test]
    fn transporter_lengths_match_heights() {
        let x = QpSet::fpf(6).unwrap();
        let base = x.minimal_elements()[0];
        for y in 0..x.len() {
            let w = x.transporter(base, y).unwrap();
            assert_eq!(x.act(&w, base), y);
            assert_eq!(w.length() as i32, x.height_gap(base, y));
        }
    }
}
