//! Dense tableau simplex over Q(√2) for `{A x = b, x ≥ 0}`.
//!
//! Phase one minimizes the sum of artificial variables; phase two, when an
//! objective is given, starts from the resulting basis. Both phases use
//! Bland's rule (lowest-index entering column, lowest-index leaving basic
//! variable among ratio ties), so no basis repeats and every run terminates.

use crate::linalg::{combine_rows, dot};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    /// `farkas` satisfies `farkasᵀA ≥ 0` componentwise and `farkasᵀb < 0`.
    Infeasible { farkas: Vec<Scalar>, pivots: usize },
    Optimal {
        x: Vec<Scalar>,
        value: Scalar,
        pivots: usize,
    },
    Unbounded { pivots: usize },
}

impl LpOutcome {
    pub fn pivots(&self) -> usize {
        match self {
            LpOutcome::Infeasible { pivots, .. }
            | LpOutcome::Optimal { pivots, .. }
            | LpOutcome::Unbounded { pivots } => *pivots,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible { .. })
    }
}

/// Whether `y` proves `{A x = b, x ≥ 0}` empty: `yᵀA ≥ 0` and `yᵀb < 0`.
pub fn is_farkas_certificate(a: &[Vec<Scalar>], b: &[Scalar], y: &[Scalar]) -> bool {
    y.len() == a.len() && combine_rows(a, y).iter().all(|c| c.sign() >= 0) && dot(y, b).is_negative()
}

struct Tableau {
    /// Constraint rows; the last entry of each is the right-hand side.
    rows: Vec<Vec<Scalar>>,
    /// Reduced costs; the last entry is minus the objective value.
    costs: Vec<Scalar>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Scalar {
        self.rows[i].last().expect("rhs column")
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.rows[r][e].recip().expect("pivot element is nonzero");
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Scalar>| {
            if row[e].is_zero() {
                return;
            }
            let f = row[e].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.costs);
        self.basis[r] = e;
        self.pivots += 1;
    }

    /// Run Bland's rule over columns `< ncols` until optimal or unbounded.
    /// Returns `false` on unboundedness.
    fn optimize(&mut self, ncols: usize) -> bool {
        loop {
            let Some(e) = (0..ncols).find(|&j| self.costs[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Scalar)> = None;
            for i in 0..self.rows.len() {
                let coef = &self.rows[i][e];
                if !coef.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / coef;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, e);
        }
    }
}

/// Phase one: decide feasibility of `{A x = b, x ≥ 0}` and return a basic
/// feasible point or a Farkas certificate.
pub fn feasible_point(a: &[Vec<Scalar>], b: &[Scalar]) -> LpOutcome {
    solve(a, b, None)
}

/// Minimize `cᵀx` over `{A x = b, x ≥ 0}`.
pub fn minimize(a: &[Vec<Scalar>], b: &[Scalar], c: &[Scalar]) -> LpOutcome {
    solve(a, b, Some(c))
}

fn solve(a: &[Vec<Scalar>], b: &[Scalar], objective: Option<&[Scalar]>) -> LpOutcome {
    let m = a.len();
    let n = a.first().map_or_else(|| objective.map_or(0, <[Scalar]>::len), Vec::len);
    assert_eq!(b.len(), m, "one right-hand side per row");
    if let Some(c) = objective {
        assert_eq!(c.len(), n, "one cost per variable");
    }

    // Flip rows so that b ≥ 0, then append one artificial column per row.
    let flips: Vec<bool> = b.iter().map(Scalar::is_negative).collect();
    let rows: Vec<Vec<Scalar>> = (0..m)
        .map(|i| {
            let s = |x: &Scalar| if flips[i] { -x } else { x.clone() };
            let mut r: Vec<Scalar> = a[i].iter().map(s).collect();
            r.extend((0..m).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r.push(s(&b[i]));
            r
        })
        .collect();
    // Phase-one reduced costs: c_j − Σ_i row_i[j] with c = 1 on artificials.
    let mut costs = vec![Scalar::zero(); n + m + 1];
    for row in &rows {
        for (c, x) in costs.iter_mut().zip(row) {
            *c -= x;
        }
    }
    for c in &mut costs[n..n + m] {
        *c += &Scalar::one();
    }
    let mut t = Tableau {
        rows,
        costs,
        basis: (n..n + m).collect(),
        pivots: 0,
    };
    let bounded = t.optimize(n + m);
    debug_assert!(bounded, "phase one is bounded below by zero");

    let infeasibility = -t.costs[n + m].clone();
    if infeasibility.is_positive() {
        // Dual of the phase-one problem: y_i = 1 − d(artificial_i).
        let farkas = (0..m)
            .map(|i| {
                let y = Scalar::one() - &t.costs[n + i];
                if flips[i] {
                    y
                } else {
                    -y
                }
            })
            .collect();
        return LpOutcome::Infeasible {
            farkas,
            pivots: t.pivots,
        };
    }

    let Some(c) = objective else {
        let x = basic_values(&t, n);
        return LpOutcome::Optimal {
            x,
            value: Scalar::zero(),
            pivots: t.pivots,
        };
    };

    // Drive remaining artificials out of the basis; rows where that is
    // impossible are redundant and dropped.
    let mut keep = vec![true; m];
    for (i, kept) in keep.iter_mut().enumerate() {
        if t.basis[i] < n {
            continue;
        }
        match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
            Some(j) => t.pivot(i, j),
            None => *kept = false,
        }
    }
    let mut k = 0;
    t.rows.retain(|_| {
        k += 1;
        keep[k - 1]
    });
    let mut k = 0;
    t.basis.retain(|_| {
        k += 1;
        keep[k - 1]
    });
    for row in &mut t.rows {
        let rhs = row.pop().expect("rhs column");
        row.truncate(n);
        row.push(rhs);
    }
    let mut costs: Vec<Scalar> = c.to_vec();
    costs.push(Scalar::zero());
    for (row, &bv) in t.rows.iter().zip(&t.basis) {
        let cb = &c[bv];
        if cb.is_zero() {
            continue;
        }
        for (d, x) in costs.iter_mut().zip(row) {
            *d -= cb * x;
        }
    }
    t.costs = costs;
    if !t.optimize(n) {
        return LpOutcome::Unbounded { pivots: t.pivots };
    }
    let x = basic_values(&t, n);
    let value = dot(c, &x);
    LpOutcome::Optimal {
        x,
        value,
        pivots: t.pivots,
    }
}

fn basic_values(t: &Tableau, n: usize) -> Vec<Scalar> {
    let mut x = vec![Scalar::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            x[bv] = t.rhs(i).clone();
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&v| Scalar::integer(v)).collect()).collect()
    }

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::integer(x)).collect()
    }

    #[test]
    fn feasible_system() {
        let a = ints(&[&[1, 1, 0], &[0, 1, 1]]);
        let b = v(&[1, 1]);
        match feasible_point(&a, &b) {
            LpOutcome::Optimal { x, .. } => {
                assert!(x.iter().all(|xi| xi.sign() >= 0));
                assert_eq!(combine_rows(&[], &[]), Vec::<Scalar>::new());
                for (row, bi) in a.iter().zip(&b) {
                    assert_eq!(&dot(row, &x), bi);
                }
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_system_has_certificate() {
        // x1 + x2 = −1 has no nonnegative solution
        let a = ints(&[&[1, 1]]);
        let b = v(&[-1]);
        match feasible_point(&a, &b) {
            LpOutcome::Infeasible { farkas, .. } => assert!(is_farkas_certificate(&a, &b, &farkas)),
            other => panic!("expected infeasible, got {other:?}"),
        }
        // x1 − x2 = 1, x2 − x1 = 1
        let a = ints(&[&[1, -1], &[-1, 1]]);
        let b = v(&[1, 1]);
        match feasible_point(&a, &b) {
            LpOutcome::Infeasible { farkas, .. } => assert!(is_farkas_certificate(&a, &b, &farkas)),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn minimization_with_redundant_rows() {
        // x1 + x2 + x3 = 2 twice over, x3 = 1; minimize x1 − x2
        let a = ints(&[&[1, 1, 1], &[1, 1, 1], &[0, 0, 1]]);
        let b = v(&[2, 2, 1]);
        match minimize(&a, &b, &v(&[1, -1, 0])) {
            LpOutcome::Optimal { x, value, .. } => {
                assert_eq!(value, Scalar::integer(-1));
                assert_eq!(x, v(&[0, 1, 1]));
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn unbounded() {
        let a = ints(&[&[1, -1]]);
        let b = v(&[0]);
        assert!(matches!(minimize(&a, &b, &v(&[0, -1])), LpOutcome::Unbounded { .. }));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling instance in equality form with slacks.
        let a: Vec<Vec<Scalar>> = vec![
            vec![Scalar::ratio(1, 4), Scalar::integer(-60), Scalar::ratio(-1, 25), Scalar::integer(9), Scalar::one(), Scalar::zero(), Scalar::zero()],
            vec![Scalar::ratio(1, 2), Scalar::integer(-90), Scalar::ratio(-1, 50), Scalar::integer(3), Scalar::zero(), Scalar::one(), Scalar::zero()],
            vec![Scalar::zero(), Scalar::zero(), Scalar::one(), Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::one()],
        ];
        let b = v(&[0, 0, 1]);
        let c = vec![
            Scalar::ratio(-3, 4),
            Scalar::integer(150),
            Scalar::ratio(-1, 50),
            Scalar::integer(6),
            Scalar::zero(),
            Scalar::zero(),
            Scalar::zero(),
        ];
        match minimize(&a, &b, &c) {
            LpOutcome::Optimal { value, pivots, .. } => {
                assert_eq!(value, Scalar::ratio(-1, 20));
                assert!(pivots < 50);
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }
}
