//! Exact Gauss-Jordan elimination over Q(√2).

use crate::scalar::Scalar;

/// Outcome of reducing `A x = b` to reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub rank: usize,
    /// Rank of the augmented matrix `[A | b]`.
    pub augmented_rank: usize,
    /// Pivot column of each nonzero row of the reduced form.
    pub pivot_columns: Vec<usize>,
    /// Particular solution with every free variable set to zero.
    pub solution: Option<Vec<Scalar>>,
    /// One basis vector per free variable.
    pub nullspace: Vec<Vec<Scalar>>,
    /// Row multipliers `y` with `yᵀA = 0` and `yᵀb = −1` when inconsistent.
    pub inconsistency: Option<Vec<Scalar>>,
}

impl Elimination {
    pub fn is_consistent(&self) -> bool {
        self.solution.is_some()
    }
}

/// Reduce `A x = b` with pivots taken column by column, left to right.
///
/// The transformation applied to the rows is tracked so that an
/// inconsistent system yields an explicit combination of rows proving it.
pub fn eliminate(a: &[Vec<Scalar>], b: &[Scalar]) -> Elimination {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    assert_eq!(b.len(), m, "one right-hand side per row");
    // [A | b | I]
    let width = n + 1 + m;
    let mut rows: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, rhs))| {
            assert_eq!(row.len(), n, "ragged coefficient matrix");
            let mut r = Vec::with_capacity(width);
            r.extend(row.iter().cloned());
            r.push(rhs.clone());
            r.extend((0..m).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();

    let mut pivot_columns = Vec::new();
    let mut next = 0;
    for col in 0..n {
        let Some(p) = (next..m).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let inv = rows[next][col].recip().expect("pivot is nonzero");
        for x in rows[next].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == next || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivot_columns.push(col);
        next += 1;
        if next == m {
            break;
        }
    }
    let rank = next;

    let bad_row = (rank..m).find(|&i| !rows[i][n].is_zero());
    let augmented_rank = rank + usize::from(bad_row.is_some());
    let inconsistency = bad_row.map(|i| {
        let scale = (-rows[i][n].clone()).recip().expect("nonzero rhs");
        rows[i][n + 1..].iter().map(|y| y * &scale).collect()
    });

    let solution = inconsistency.is_none().then(|| {
        let mut x = vec![Scalar::zero(); n];
        for (r, &c) in pivot_columns.iter().enumerate() {
            x[c] = rows[r][n].clone();
        }
        x
    });

    let mut is_pivot = vec![false; n];
    for &c in &pivot_columns {
        is_pivot[c] = true;
    }
    let nullspace = (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![Scalar::zero(); n];
            v[f] = Scalar::one();
            for (r, &c) in pivot_columns.iter().enumerate() {
                v[c] = -&rows[r][f];
            }
            v
        })
        .collect();

    Elimination {
        rank,
        augmented_rank,
        pivot_columns,
        solution,
        nullspace,
        inconsistency,
    }
}

pub fn dot(x: &[Scalar], y: &[Scalar]) -> Scalar {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `yᵀA`.
pub fn combine_rows(a: &[Vec<Scalar>], y: &[Scalar]) -> Vec<Scalar> {
    let n = a.first().map_or(0, Vec::len);
    let mut out = vec![Scalar::zero(); n];
    for (row, w) in a.iter().zip(y) {
        if w.is_zero() {
            continue;
        }
        for (o, c) in out.iter_mut().zip(row) {
            *o += w * c;
        }
    }
    out
}
