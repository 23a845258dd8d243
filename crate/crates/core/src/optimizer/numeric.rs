//! Parameter search at a concrete `n`.

use serde::Serialize;

use super::{OptimizerError, Point};
use crate::constructions::{ConstructionPlan, Objective};

/// Nested grids: level `ℓ` uses `base·2^ℓ` steps per axis, and each level
/// starts its local search from the previous level's optimum, so the cost
/// never increases with `levels`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub base: usize,
    pub levels: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { base: 16, levels: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericOptimum {
    pub n: f64,
    pub r: usize,
    pub rs: usize,
    pub s: f64,
    /// Collision parameter, for plans with a subroutine.
    pub lambda: Option<f64>,
    pub objective: Objective,
    pub cost: f64,
    /// `log_n(cost)`.
    pub log_n: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    r: usize,
    rs: usize,
    lambda: Option<f64>,
    cost: f64,
}

/// Smaller cost first, then smaller `r`, then larger `s`.
fn better(a: &Candidate, b: &Candidate) -> bool {
    let tol = 1e-12 * a.cost.abs().max(b.cost.abs());
    if (a.cost - b.cost).abs() > tol {
        return a.cost < b.cost;
    }
    if a.r != b.r {
        return a.r < b.r;
    }
    (a.rs as f64 / a.r as f64) > (b.rs as f64 / b.r as f64)
}

struct Evaluator<'a> {
    plan: &'a ConstructionPlan,
    n: f64,
    objective: Objective,
    has_subroutine: bool,
    evaluations: usize,
}

impl Evaluator<'_> {
    fn feasible(&self, r: usize, rs: usize) -> bool {
        r >= 2 && r.is_multiple_of(2) && (r as f64) <= self.n && rs >= 1 && rs < r
    }

    /// Integer `λ` candidates: a geometric grid over `[1, r]` and the
    /// rounded balancing value.
    fn lambdas(&self, r: usize) -> Vec<f64> {
        let d = self.plan.min_degree as f64;
        let star = (r as f64).powf(d / (d + 1.0));
        let mut out = vec![1.0, r as f64, star.floor().max(1.0), star.ceil().min(r as f64)];
        let mut v = 1.0f64;
        while v < r as f64 {
            out.push(v.round());
            v *= 1.25;
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn eval(&mut self, r: usize, rs: usize) -> Candidate {
        let s = rs as f64 / r as f64;
        let point = |lambda: f64| Point {
            n: self.n,
            r: r as f64,
            s,
            lambda,
        };
        let (lambda, cost) = if self.has_subroutine {
            let mut best: Option<(f64, f64)> = None;
            for lam in self.lambdas(r) {
                let c = self.plan.cost(&point(lam), self.objective);
                self.evaluations += 1;
                if best.is_none_or(|(_, b)| c < b) {
                    best = Some((lam, c));
                }
            }
            let (l, c) = best.expect("at least one lambda");
            (Some(l), c)
        } else {
            self.evaluations += 1;
            (None, self.plan.cost(&point(1.0), self.objective))
        };
        Candidate { r, rs, lambda, cost }
    }

    fn local_search(&mut self, mut best: Candidate) -> Candidate {
        loop {
            let mut moved = false;
            for (dr, ds) in [(-2i64, 0i64), (2, 0), (0, -1), (0, 1), (-2, -1), (2, 1), (-2, 1), (2, -1)] {
                let r = best.r as i64 + dr;
                let rs = best.rs as i64 + ds;
                if r < 2 || rs < 1 || !self.feasible(r as usize, rs as usize) {
                    continue;
                }
                let c = self.eval(r as usize, rs as usize);
                if better(&c, &best) && c.cost < best.cost {
                    best = c;
                    moved = true;
                }
            }
            if !moved {
                return best;
            }
        }
    }
}

/// `r = 2⌈n^x/2⌉`, `rs = max(1, ⌊r·n^{−t}⌋)`, capped at `r − 1`.
pub fn round_parameters(n: f64, x: f64, t: f64) -> (usize, usize) {
    let r = 2 * ((n.powf(x) / 2.0).ceil() as usize).max(1);
    let rs = ((r as f64 * n.powf(-t)).floor() as usize).clamp(1, r - 1);
    (r, rs)
}

pub fn numeric_optimize(
    plan: &ConstructionPlan,
    n: f64,
    objective: Objective,
    grid: Grid,
) -> Result<NumericOptimum, OptimizerError> {
    if n.is_nan() || n < 4.0 {
        return Err(OptimizerError::NoFeasiblePoint(format!("n = {n} leaves no even r with 2 <= r <= n")));
    }
    let mut ev = Evaluator {
        plan,
        n,
        objective,
        has_subroutine: plan.stages.iter().any(|s| !s.subroutine.is_empty()),
        evaluations: 0,
    };
    let mut best: Option<Candidate> = None;
    for level in 0..=grid.levels {
        let steps = grid.base.max(1) << level;
        let mut level_best = best;
        for i in 1..steps {
            let x = i as f64 / steps as f64;
            for j in 0..steps {
                let t = x * j as f64 / steps as f64;
                let (r, rs) = round_parameters(n, x, t);
                if !ev.feasible(r, rs) {
                    continue;
                }
                let c = ev.eval(r, rs);
                if level_best.is_none_or(|b| better(&c, &b)) {
                    level_best = Some(c);
                }
            }
        }
        best = level_best.map(|c| ev.local_search(c));
    }
    let best = best.ok_or_else(|| OptimizerError::NoFeasiblePoint(format!("no even r in [2, {n}]")))?;
    Ok(NumericOptimum {
        n,
        r: best.r,
        rs: best.rs,
        s: best.rs as f64 / best.r as f64,
        lambda: best.lambda,
        objective,
        cost: best.cost,
        log_n: best.cost.ln() / n.ln(),
        evaluations: ev.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{g1_stage_specs, g2_plan};
    use crate::graph::PatternGraph;

    #[test]
    fn triangle_reaches_predicted_exponent() {
        let plan = g2_plan(&PatternGraph::complete(3)).unwrap();
        let opt = numeric_optimize(&plan, 1e6, Objective::Max, Grid::default()).unwrap();
        assert!(opt.log_n <= 35.0 / 27.0 + 0.02, "{opt:?}");
        assert!(opt.s <= 1.0);
    }

    #[test]
    fn refinement_never_hurts() {
        let plan = g1_stage_specs(&PatternGraph::complete(4), 4).unwrap();
        let coarse = numeric_optimize(&plan, 1e5, Objective::Sum, Grid { base: 4, levels: 1 }).unwrap();
        let fine = numeric_optimize(&plan, 1e5, Objective::Sum, Grid { base: 4, levels: 3 }).unwrap();
        assert!(fine.cost <= coarse.cost);
    }

    #[test]
    fn rounding_rules() {
        assert_eq!(round_parameters(1e6, 0.5, 0.0), (1000, 999));
        assert_eq!(round_parameters(100.0, 0.5, 0.5), (10, 1));
        assert_eq!(round_parameters(10.0, 0.01, 0.0), (2, 1));
    }
}
