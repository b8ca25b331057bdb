//! The extension problem: find a distribution on all events of an
//! observation space that agrees with the observed probabilities.
//!
//! Unknowns are the outcome weights `q(ω)`. Every ensemble part contributes
//! the equation `Σ_{ω ∈ part} q(ω) = P(part)`, and one more row fixes the
//! total mass at one. A signed extension is any solution; a traditional one
//! is a nonnegative solution.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::{check_automorphism, AutomorphismGroup, ObservedDistribution};
use crate::linalg::{combine_rows, dot, eliminate, Elimination};
use crate::scalar::Scalar;
use crate::simplex::{self, LpOutcome};
use crate::space::{SampleSpace, SignedDistribution};

/// One equation `coeffs · q = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub label: String,
    pub coeffs: Vec<Scalar>,
    pub rhs: Scalar,
}

/// Linear equations over outcome weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    vars: usize,
    rows: Vec<Row>,
}

impl LinearSystem {
    pub fn new(vars: usize, rows: Vec<Row>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.coeffs.len() != vars) {
            return Err(Error::Precondition(format!(
                "row `{}` has {} coefficients for {vars} variables",
                r.label,
                r.coeffs.len()
            )));
        }
        Ok(LinearSystem { vars, rows })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn matrix(&self) -> Vec<Vec<Scalar>> {
        self.rows.iter().map(|r| r.coeffs.clone()).collect()
    }

    pub fn rhs(&self) -> Vec<Scalar> {
        self.rows.iter().map(|r| r.rhs.clone()).collect()
    }

    /// Whether `q` satisfies every row exactly.
    pub fn is_solution(&self, q: &[Scalar]) -> bool {
        q.len() == self.vars && self.rows.iter().all(|r| dot(&r.coeffs, q) == r.rhs)
    }
}

/// Builds one row per ensemble part plus the total-mass row.
pub fn build_system(obs: &ObservedDistribution) -> LinearSystem {
    let n = obs.space().len();
    let mut rows = Vec::new();
    for (en, probs) in obs.frame().ensembles().iter().zip(obs.table()) {
        for (part, p) in en.partition.parts().zip(probs) {
            let coeffs = (0..n)
                .map(|w| if part.contains(w) { Scalar::one() } else { Scalar::zero() })
                .collect();
            rows.push(Row {
                label: format!("{}:{}", en.name, part),
                coeffs,
                rhs: p.clone(),
            });
        }
    }
    rows.push(Row {
        label: "total".into(),
        coeffs: vec![Scalar::one(); n],
        rhs: Scalar::one(),
    });
    LinearSystem { vars: n, rows }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Infeasible,
    /// Exactly one signed solution.
    Unique,
    /// An affine family of signed solutions of positive dimension.
    Family,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Infeasible => "infeasible",
            Status::Unique => "unique",
            Status::Family => "family",
        })
    }
}

/// Row multipliers `y` with `yᵀA ≥ 0` componentwise and `yᵀb < 0`: no
/// nonnegative `q` can satisfy `A q = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub multipliers: Vec<Scalar>,
}

impl Certificate {
    pub fn is_valid(&self, sys: &LinearSystem) -> bool {
        simplex::is_farkas_certificate(&sys.matrix(), &sys.rhs(), &self.multipliers)
    }

    /// `yᵀA`, the combined left-hand side.
    pub fn combined_coefficients(&self, sys: &LinearSystem) -> Vec<Scalar> {
        combine_rows(&sys.matrix(), &self.multipliers)
    }

    /// `yᵀb`, negative for a valid certificate.
    pub fn combined_rhs(&self, sys: &LinearSystem) -> Scalar {
        dot(&self.multipliers, &sys.rhs())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionResult {
    pub status: Status,
    /// Outcome weights of the returned extension.
    pub witness: Option<Vec<Scalar>>,
    /// Basis of the solutions of the homogeneous system.
    pub nullspace: Vec<Vec<Scalar>>,
    pub certificate: Option<Certificate>,
    /// Minimum total negative weight, in negativity-minimizing mode.
    pub negative_mass: Option<Scalar>,
    pub rank: usize,
    pub pivots: usize,
}

impl ExtensionResult {
    pub fn is_feasible(&self) -> bool {
        self.status != Status::Infeasible
    }

    /// The witness as a distribution over `space`.
    pub fn distribution(&self, space: &Arc<SampleSpace>) -> Option<Result<SignedDistribution>> {
        self.witness.as_ref().map(|w| SignedDistribution::new(space, w.clone()))
    }
}

fn signed_result(sys: &LinearSystem, e: Elimination) -> ExtensionResult {
    let status = if !e.is_consistent() {
        Status::Infeasible
    } else if e.rank == sys.vars {
        Status::Unique
    } else {
        Status::Family
    };
    ExtensionResult {
        status,
        witness: e.solution,
        nullspace: if status == Status::Infeasible { Vec::new() } else { e.nullspace },
        certificate: e.inconsistency.map(|multipliers| Certificate { multipliers }),
        negative_mass: None,
        rank: e.rank,
        pivots: 0,
    }
}

/// Exact elimination. The witness sets every free variable to zero.
pub fn solve_signed(sys: &LinearSystem) -> ExtensionResult {
    let e = eliminate(&sys.matrix(), &sys.rhs());
    signed_result(sys, e)
}

/// Nonnegative solution by phase-one simplex, or a Farkas certificate.
///
/// `status` and `nullspace` describe the signed solution set, so a feasible
/// result reports whether the traditional extension is forced.
pub fn solve_traditional(sys: &LinearSystem) -> ExtensionResult {
    let a = sys.matrix();
    let b = sys.rhs();
    let mut result = signed_result(sys, eliminate(&a, &b));
    let lp = simplex::feasible_point(&a, &b);
    result.pivots = lp.pivots();
    match lp {
        LpOutcome::Optimal { x, .. } => {
            result.witness = Some(x);
            result.certificate = None;
        }
        LpOutcome::Infeasible { farkas, .. } => {
            result.status = Status::Infeasible;
            result.witness = None;
            result.nullspace.clear();
            result.certificate = Some(Certificate { multipliers: farkas });
        }
        LpOutcome::Unbounded { .. } => unreachable!("feasibility has no objective"),
    }
    result
}

/// Among all signed solutions, one minimizing `Σ max(0, −q(ω))`.
///
/// Solved as `min Σ v` subject to `A(u − v) = b`, `u, v ≥ 0`.
pub fn minimize_negativity(sys: &LinearSystem) -> Result<ExtensionResult> {
    let a = sys.matrix();
    let b = sys.rhs();
    let mut result = signed_result(sys, eliminate(&a, &b));
    if result.status == Status::Infeasible {
        return Err(Error::Infeasible);
    }
    let n = sys.vars;
    let split: Vec<Vec<Scalar>> = a
        .iter()
        .map(|row| row.iter().cloned().chain(row.iter().map(|c| -c)).collect())
        .collect();
    let cost: Vec<Scalar> = (0..2 * n)
        .map(|j| if j < n { Scalar::zero() } else { Scalar::one() })
        .collect();
    match simplex::minimize(&split, &b, &cost) {
        LpOutcome::Optimal { x, value, pivots } => {
            let q: Vec<Scalar> = (0..n).map(|i| &x[i] - &x[n + i]).collect();
            result.witness = Some(q);
            result.negative_mass = Some(value);
            result.pivots = pivots;
            Ok(result)
        }
        // A signed solution exists and the objective is bounded below by zero.
        other => unreachable!("negativity program cannot end as {other:?}"),
    }
}

/// Average of `q` over a group of automorphisms:
/// `R(ω) = (1/|G|) Σ_g q(g(ω))`.
pub fn symmetrize(
    obs: &ObservedDistribution,
    q: &SignedDistribution,
    group: &AutomorphismGroup,
) -> Result<SignedDistribution> {
    if let Some(why) = obs.first_mismatch(q)? {
        return Err(Error::NotAnExtension(why));
    }
    group.check_group()?;
    for g in group.elements() {
        check_automorphism(obs, g)?;
    }
    let n = obs.space().len();
    let size = Scalar::integer(group.len() as i64);
    let weights: Vec<Scalar> = (0..n)
        .map(|w| {
            let total: Scalar = group.elements().iter().map(|g| q.weight(g.image(w))).sum();
            total.checked_div(&size).expect("group is nonempty")
        })
        .collect();
    let r = SignedDistribution::new(obs.space(), weights)?;
    debug_assert!(obs.is_extended_by(&r)?, "averaging over automorphisms preserves the extension property");
    Ok(r)
}

/// Product extension for a frame with exactly two ensembles whose parts
/// pairwise intersect in a single outcome: weight `P(A_i)·P(B_j)` on
/// `A_i ∩ B_j`.
pub fn product_extension(obs: &ObservedDistribution) -> Result<SignedDistribution> {
    let ens = obs.frame().ensembles();
    if ens.len() != 2 {
        return Err(Error::Precondition(format!(
            "product construction needs exactly two ensembles, got {}",
            ens.len()
        )));
    }
    let space = obs.space();
    let mut weights = vec![Scalar::zero(); space.len()];
    let (a, b) = (&ens[0].partition, &ens[1].partition);
    for (i, &ai) in a.masks().iter().enumerate() {
        for (j, &bj) in b.masks().iter().enumerate() {
            let cell = ai & bj;
            if cell == 0 {
                return Err(Error::Precondition(format!(
                    "parts {} and {} do not intersect",
                    a.part(i),
                    b.part(j)
                )));
            }
            if cell.count_ones() != 1 {
                return Err(Error::Precondition(format!(
                    "parts {} and {} share several outcomes; normalize fat outcomes first",
                    a.part(i),
                    b.part(j)
                )));
            }
            weights[cell.trailing_zeros() as usize] = obs.part_prob(0, i) * obs.part_prob(1, j);
        }
    }
    SignedDistribution::new(space, weights)
}
