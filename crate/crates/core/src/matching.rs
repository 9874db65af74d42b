//! Exact maximum-weight perfect matching on a complete bipartite graph
//! (the linear assignment problem, maximisation form).

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest order accepted by [`brute_force_max_assignment`].
pub const BRUTE_FORCE_MAX_N: usize = 10;

/// Square matrix of finite costs, stored row-major.
#[derive(Clone, PartialEq)]
pub struct CostMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Real> CostMatrix<T> {
    pub fn new(n: usize, entries: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let expected = n * n;
        if entries.len() != expected {
            return Err(Error::ShapeMismatch {
                n,
                expected,
                got: entries.len(),
            });
        }
        if let Some(k) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: k / n,
                col: k % n,
            });
        }
        Ok(Self { n, entries })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if rows.iter().any(|r| r.len() != n) {
            let got = rows.iter().map(Vec::len).sum();
            return Err(Error::ShapeMismatch {
                n,
                expected: n * n,
                got,
            });
        }
        Self::new(n, rows.concat())
    }

    /// Builds a matrix from `f(row, col)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }
}

impl<T: Real> fmt::Debug for CostMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.n).map(|i| self.row(i)))
            .finish()
    }
}

/// A permutation together with its total value `sum_i w[i][perm[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    pub permutation: Vec<usize>,
    pub value: T,
}

fn check_permutation(n: usize, pi: &[usize]) -> Result<()> {
    if pi.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} does not match matrix order {n}",
            pi.len()
        )));
    }
    let mut seen = vec![false; n];
    for (i, &j) in pi.iter().enumerate() {
        if j >= n {
            return Err(Error::InvalidPermutation(format!(
                "index {j} at position {i} is out of range"
            )));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidPermutation(format!("index {j} repeated")));
        }
    }
    Ok(())
}

/// Sum of `m[i][pi[i]]`, accumulated in row order.
pub fn assignment_value<T: Real>(m: &CostMatrix<T>, pi: &[usize]) -> Result<T> {
    check_permutation(m.n(), pi)?;
    Ok(value_unchecked(m, pi))
}

fn value_unchecked<T: Real>(m: &CostMatrix<T>, pi: &[usize]) -> T {
    pi.iter()
        .enumerate()
        .fold(T::zero(), |acc, (i, &j)| acc + m.get(i, j))
}

/// Hungarian method with row/column potentials (shortest augmenting paths),
/// O(n^3). Maximises by minimising `max_entry - w`, which keeps all reduced
/// costs nonnegative.
pub fn solve_max_assignment<T: Real>(m: &CostMatrix<T>) -> Result<Assignment<T>> {
    let n = m.n();
    let top = m.entries().iter().copied().fold(T::neg_infinity(), T::max);
    let cost = |i: usize, j: usize| top - m.get(i, j);

    // 1-based; index 0 is the virtual column used to start each augmentation.
    let inf = T::infinity();
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![inf; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|x| *x = inf);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            debug_assert!(j1 != 0, "no free column reachable");
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] = u[row_of_col[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut permutation = vec![0usize; n];
    for j in 1..=n {
        permutation[row_of_col[j] - 1] = j - 1;
    }
    let value = value_unchecked(m, &permutation);
    Ok(Assignment { permutation, value })
}

/// Exhaustive search over all `n!` permutations in lexicographic order,
/// keeping the first maximiser. Only for `n <= 10`.
pub fn brute_force_max_assignment<T: Real>(m: &CostMatrix<T>) -> Result<Assignment<T>> {
    let n = m.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = Assignment {
        value: value_unchecked(m, &perm),
        permutation: perm.clone(),
    };
    while next_permutation(&mut perm) {
        let value = value_unchecked(m, &perm);
        if value > best.value {
            best.value = value;
            best.permutation.copy_from_slice(&perm);
        }
    }
    Ok(best)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&x| x > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}
