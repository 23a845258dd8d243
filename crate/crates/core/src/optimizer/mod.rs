//! Exponent algebra and concrete-`n` parameter search.
//!
//! Costs are products of powers of `n`, `r`, `s` and `λ`. Substituting
//! `r = n^x` and `s = n^{−t}` turns every cost into an affine function of
//! `(x, t)` in the exponent, so balancing two costs is a linear equation
//! solved exactly over the rationals.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::constructions::{Construction, ConstructionError, ConstructionPlan, StageKind};
use crate::graph::PatternGraph;

pub mod compare;
pub mod cost;
pub mod numeric;

pub use compare::{compare_with_walk, walk_dominance, CompareRow, TSV_HEADER};
pub use cost::{fmt_ratio, ratio, Affine, CostTerm, Point};
pub use numeric::{numeric_optimize, Grid, NumericOptimum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("the balancing system is degenerate (parallel terms)")]
    DegenerateSystem,
    #[error("no feasible point: {0}")]
    NoFeasiblePoint(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("solution outside the domain 0 < x < 1, t >= 0: x = {x}, t = {t}")]
    OutOfDomain { x: String, t: String },
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

fn int(v: i64) -> Rational64 {
    Rational64::from_integer(v)
}

/// `2 − 2/(k+1) − k/((k+1)(m+1))`.
pub fn theorem1_exponent(k: usize, m: usize) -> Rational64 {
    let (k, m) = (k as i64, m as i64);
    int(2) - ratio(2, k + 1) - ratio(k, (k + 1) * (m + 1))
}

/// `t = (2k−d−3)/(k(d+1)(m−d+2))`.
pub fn theorem2_t(k: usize, d: usize, m: usize) -> Rational64 {
    let (k, d, m) = (k as i64, d as i64, m as i64);
    ratio(2 * k - d - 3, k * (d + 1) * (m - d + 2))
}

/// `2 − 2/k − t` with the second construction's `t`.
pub fn theorem2_exponent(k: usize, d: usize, m: usize) -> Rational64 {
    int(2) - ratio(2, k as i64) - theorem2_t(k, d, m)
}

/// `t₁ = (k²−2(m+1))/(k(k+1)(m+1))`.
pub fn theorem3_t1(k: usize, m: usize) -> Rational64 {
    let (k, m) = (k as i64, m as i64);
    ratio(k * k - 2 * (m + 1), k * (k + 1) * (m + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem3 {
    pub k: usize,
    pub m: usize,
    pub d: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub t1: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub t2: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub t: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub total: Rational64,
    /// The construction achieving `t`; ties go to the second one.
    pub winner: Construction,
}

pub(crate) fn ser_ratio<Ser: serde::Serializer>(v: &Rational64, s: Ser) -> Result<Ser::Ok, Ser::Error> {
    s.serialize_str(&fmt_ratio(*v))
}

pub fn check_pattern(h: &PatternGraph) -> Result<(), OptimizerError> {
    if h.k() < 3 {
        return Err(OptimizerError::InvalidPattern(format!("k must be ≥ 3 (got k = {})", h.k())));
    }
    if h.min_degree() < 1 {
        return Err(OptimizerError::InvalidPattern("minimum degree d must be ≥ 1".into()));
    }
    Ok(())
}

/// Exponent of the better of the two constructions for `h`.
pub fn theorem3_exponent(h: &PatternGraph) -> Result<Theorem3, OptimizerError> {
    check_pattern(h)?;
    let (k, m, d) = (h.k(), h.m(), h.min_degree());
    let t1 = theorem3_t1(k, m);
    let t2 = theorem2_t(k, d, m);
    let t = t1.max(t2);
    let winner = if t1 > t2 { Construction::G1 } else { Construction::G2 };
    Ok(Theorem3 {
        k,
        m,
        d,
        t1,
        t2,
        t,
        total: int(2) - ratio(2, k as i64) - t,
        winner,
    })
}

/// A solution of the balancing system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentSolution {
    /// `r = n^x`.
    #[serde(serialize_with = "ser_ratio")]
    pub x: Rational64,
    /// `s = n^{−t}`.
    #[serde(serialize_with = "ser_ratio")]
    pub t: Rational64,
    /// Maximum of `per_term`.
    #[serde(serialize_with = "ser_ratio")]
    pub total: Rational64,
    #[serde(serialize_with = "ser_ratios")]
    pub per_term: Vec<Rational64>,
}

fn ser_ratios<Ser: serde::Serializer>(v: &[Rational64], s: Ser) -> Result<Ser::Ok, Ser::Error> {
    s.collect_seq(v.iter().map(|r| fmt_ratio(*r)))
}

/// Solves `terms[a] = terms[b]` for both pairs in `equalities`, in the
/// unknowns `(x, t)`. Terms must not depend on `λ`.
pub fn balance_exponents(terms: &[CostTerm], equalities: [(usize, usize); 2]) -> Result<ExponentSolution, OptimizerError> {
    // row: cx·x + ct·t = rhs
    let row = |(a, b): (usize, usize)| {
        let (fa, fb) = (terms[a].affine(), terms[b].affine());
        (fa.x - fb.x, fa.t - fb.t, fb.constant - fa.constant)
    };
    let (a1, b1, c1) = row(equalities[0]);
    let (a2, b2, c2) = row(equalities[1]);
    let det = a1 * b2 - a2 * b1;
    if det.is_zero() {
        return Err(OptimizerError::DegenerateSystem);
    }
    let x = (c1 * b2 - c2 * b1) / det;
    let t = (a1 * c2 - a2 * c1) / det;
    if x <= int(0) || x >= int(1) || t.is_negative() {
        return Err(OptimizerError::OutOfDomain {
            x: fmt_ratio(x),
            t: fmt_ratio(t),
        });
    }
    let zero = Rational64::zero();
    let per_term: Vec<Rational64> = terms.iter().map(|c| c.exponent_at(x, t, zero)).collect();
    let total = per_term.iter().copied().max().unwrap_or(zero);
    Ok(ExponentSolution { x, t, total, per_term })
}

/// Balanced exponents of a whole plan with the dominance claims checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanBalance {
    pub construction: Construction,
    pub solution: ExponentSolution,
    /// Indices of the setup, last vertex-loading and final stage.
    pub balanced_stages: [usize; 3],
    /// The three balanced stages are equal and dominate every other stage.
    pub dominance: bool,
    /// `x/(d+1) − t/2 ≤ 1/2`, checked for the second construction.
    pub guard: Option<bool>,
}

/// Equates setup with the last vertex-loading stage (fixing `x`) and setup
/// with the final stage (fixing `t`).
pub fn balance_plan(plan: &ConstructionPlan) -> Result<PlanBalance, OptimizerError> {
    let terms: Vec<CostTerm> = plan.stages.iter().map(|s| s.cost.clone()).collect();
    let setup = 0;
    let loader = plan
        .stages
        .iter()
        .rposition(|s| matches!(s.kind, StageKind::LoadVertex { .. }))
        .ok_or(OptimizerError::DegenerateSystem)?;
    let last = plan.stages.len() - 1;
    let solution = balance_exponents(&terms, [(setup, loader), (setup, last)])?;
    let top = solution.total;
    let dominance = [setup, loader, last].iter().all(|&i| solution.per_term[i] == top);
    let guard = (plan.construction == Construction::G2).then(|| {
        let d = plan.min_degree as i64;
        solution.x / int(d + 1) - solution.t / int(2) <= ratio(1, 2)
    });
    Ok(PlanBalance {
        construction: plan.construction,
        solution,
        balanced_stages: [setup, loader, last],
        dominance,
        guard,
    })
}
