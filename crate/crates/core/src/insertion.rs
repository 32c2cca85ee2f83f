//! Row insertion (RSK) and the row/column Beissinger insertions of an
//! involution's cycles.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{self, Perm, PermError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InsertionError {
    #[error("{0} is already in the tableau")]
    Duplicate(usize),
    #[error("pair ({0}, {1}) is not ordered")]
    UnorderedPair(usize, usize),
    #[error("{0} is not an involution")]
    NotInvolution(Perm),
    #[error("insertion produced an invalid tableau {tableau}: {reason}")]
    Invalid { tableau: String, reason: String },
}

/// A tableau with distinct positive entries, stored as rows.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tableau {
    rows: Vec<Vec<usize>>,
}

impl Tableau {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a tableau from its rows, checking shape and distinctness only.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self, InsertionError> {
        let t = Self { rows };
        t.validate_shape()?;
        Ok(t)
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.rows.iter().any(|r| r.contains(&a))
    }

    /// Row lengths.
    pub fn shape(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    /// Column lengths `c_1 >= c_2 >= ...`.
    pub fn column_lengths(&self) -> Vec<usize> {
        let width = self.rows.first().map_or(0, Vec::len);
        (0..width).map(|j| self.rows.iter().filter(|r| r.len() > j).count()).collect()
    }

    /// `Σ c_i (c_i - 1) / 2` over column lengths.
    pub fn stat_a(&self) -> usize {
        self.column_lengths().iter().map(|c| c * (c.saturating_sub(1)) / 2).sum()
    }

    /// Checks that the rows form a partition shape with distinct entries.
    pub fn validate_shape(&self) -> Result<(), InsertionError> {
        let fail = |reason: String| Err(InsertionError::Invalid { tableau: self.to_string(), reason });
        for (i, row) in self.rows.iter().enumerate() {
            if row.is_empty() {
                return fail(format!("row {} is empty", i + 1));
            }
            if i > 0 && row.len() > self.rows[i - 1].len() {
                return fail(format!("row {} is longer than the row above", i + 1));
            }
        }
        let mut all: Vec<usize> = self.rows.iter().flatten().copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return fail("repeated entry".into());
        }
        Ok(())
    }

    /// Checks partition shape, distinct entries, and increasing rows and
    /// columns.
    pub fn validate(&self) -> Result<(), InsertionError> {
        self.validate_shape()?;
        let fail = |reason: String| Err(InsertionError::Invalid { tableau: self.to_string(), reason });
        for (i, row) in self.rows.iter().enumerate() {
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return fail(format!("row {} is not increasing", i + 1));
            }
            if i > 0 && row.iter().zip(&self.rows[i - 1]).any(|(b, a)| b <= a) {
                return fail(format!("a column through row {} is not increasing", i + 1));
            }
        }
        Ok(())
    }

    /// Schensted row insertion of `a`; returns the new tableau and the
    /// 1-based `(row, column)` of the added box.
    pub fn rsk_insert(&self, a: usize) -> Result<(Tableau, (usize, usize)), InsertionError> {
        if self.contains(a) {
            return Err(InsertionError::Duplicate(a));
        }
        let mut rows = self.rows.clone();
        let mut x = a;
        for (i, row) in rows.iter_mut().enumerate() {
            match row.iter().position(|&y| y > x) {
                Some(j) => x = std::mem::replace(&mut row[j], x),
                None => {
                    row.push(x);
                    let j = row.len();
                    return Ok((Tableau { rows }, (i + 1, j)));
                }
            }
        }
        rows.push(vec![x]);
        let i = rows.len();
        Ok((Tableau { rows }, (i, 1)))
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<(), InsertionError> {
        if a > b {
            return Err(InsertionError::UnorderedPair(a, b));
        }
        for e in [a, b] {
            if self.contains(e) {
                return Err(InsertionError::Duplicate(e));
            }
        }
        Ok(())
    }

    /// Row Beissinger insertion of the pair `a <= b`: insert `a`, then put
    /// `b` at the end of the row below the new box (or at the end of the
    /// first row when `a = b`).
    pub fn rbs_insert(&self, a: usize, b: usize) -> Result<Tableau, InsertionError> {
        self.check_pair(a, b)?;
        let mut t = if a == b {
            let mut t = self.clone();
            match t.rows.first_mut() {
                Some(r) => r.push(b),
                None => t.rows.push(vec![b]),
            }
            t
        } else {
            let (mut t, (i, _)) = self.rsk_insert(a)?;
            if t.rows.len() == i {
                t.rows.push(Vec::new());
            }
            t.rows[i].push(b);
            t
        };
        t.rows.retain(|r| !r.is_empty());
        t.validate_shape()?;
        Ok(t)
    }

    /// Column Beissinger insertion of the pair `a <= b`: insert `a`, then put
    /// `b` at the end of the column right of the new box (or at the end of
    /// the first column when `a = b`).
    pub fn cbs_insert(&self, a: usize, b: usize) -> Result<Tableau, InsertionError> {
        self.check_pair(a, b)?;
        let (mut t, col) = if a == b {
            (self.clone(), 0)
        } else {
            let (t, (_, j)) = self.rsk_insert(a)?;
            (t, j)
        };
        let depth = t.rows.iter().filter(|r| r.len() > col).count();
        if depth == t.rows.len() {
            t.rows.push(Vec::new());
        }
        t.rows[depth].push(b);
        // the appended box must land in column `col`
        if t.rows[depth].len() != col + 1 {
            return Err(InsertionError::Invalid {
                tableau: t.to_string(),
                reason: format!("{b} did not land in column {}", col + 1),
            });
        }
        t.validate_shape()?;
        Ok(t)
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.rows.iter().map(|r| r.iter().map(usize::to_string).collect::<Vec<_>>().join(",")).collect();
        write!(f, "{{{}}}", rows.join(" / "))
    }
}

fn fold_pairs(
    z: &Perm,
    step: impl Fn(&Tableau, usize, usize) -> Result<Tableau, InsertionError>,
) -> Result<Tableau, InsertionError> {
    if !z.is_involution() {
        return Err(InsertionError::NotInvolution(z.clone()));
    }
    // pairs come in increasing order of the larger entry, so every step
    // must leave a standard tableau
    z.involution_pairs().into_iter().try_fold(Tableau::new(), |t, (a, b)| {
        let next = step(&t, a, b)?;
        next.validate()?;
        Ok(next)
    })
}

/// Row Beissinger tableau of an involution: pairs `(a, z(a))`, `a <= z(a)`,
/// inserted in order of their larger entry.
pub fn p_rbs(z: &Perm) -> Result<Tableau, InsertionError> {
    fold_pairs(z, Tableau::rbs_insert)
}

/// Column Beissinger tableau of an involution.
pub fn p_cbs(z: &Perm) -> Result<Tableau, InsertionError> {
    fold_pairs(z, Tableau::cbs_insert)
}

/// Insertion and recording tableaux of the window of `w`.
pub fn rsk_full(w: &Perm) -> (Tableau, Tableau) {
    let mut p = Tableau::new();
    let mut q = Tableau::new();
    for (k, a) in w.window().into_iter().enumerate() {
        let (np, (i, _)) = p.rsk_insert(a).expect("permutation entries are distinct");
        p = np;
        if q.rows.len() < i {
            q.rows.push(Vec::new());
        }
        q.rows[i - 1].push(k + 1);
    }
    (p, q)
}

/// Generators excluded by the column blocks of `t`: the proper partial sums
/// of its column lengths.
fn column_cuts(t: &Tableau) -> Vec<usize> {
    let n = t.size();
    let mut acc = 0;
    t.column_lengths()
        .into_iter()
        .filter_map(|c| {
            acc += c;
            (acc < n).then_some(acc)
        })
        .collect()
}

/// Longest element of the Young subgroup whose blocks are the column lengths
/// of `t`; its length is `stat_a(t)`.
pub fn sigma_t(t: &Tableau) -> Perm {
    perm::parabolic_longest(t.size(), &column_cuts(t))
}

/// Shortest fixed-point-free involution of the same Young subgroup; fails
/// when some column block has odd size.
pub fn sigma_prime_t(t: &Tableau) -> Result<Perm, PermError> {
    perm::parabolic_min_fpf(t.size(), &column_cuts(t))
}
