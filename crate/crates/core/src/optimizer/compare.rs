//! Learning-graph exponents next to the Johnson-graph walk.

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::{
    balance_plan, check_pattern, fmt_ratio, numeric_optimize, ratio, theorem1_exponent, theorem2_exponent,
    theorem3_exponent, Grid, OptimizerError,
};
use crate::constructions::{g1_stage_specs, g2_plan, quantum_walk_costs, Objective};
use crate::graph::PatternGraph;

/// Column names of [`CompareRow::to_tsv`].
pub const TSV_HEADER: &str = "pattern\tk\tm\td\tmethod\tx\tt\tS\tU\tC\texponent\tdecimal\tachieved";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub pattern: String,
    pub k: usize,
    pub m: usize,
    pub d: usize,
    /// `walk`, `walk-balanced`, `g1`, `g2` or `best`.
    pub method: String,
    pub x: Option<String>,
    pub t: Option<String>,
    pub setup: Option<String>,
    pub update: Option<String>,
    pub check: Option<String>,
    pub exponent: String,
    pub decimal: f64,
    /// `log_n` of the numerically optimized cost, when `n` was given.
    pub achieved: Option<f64>,
}

impl CompareRow {
    pub fn to_tsv(&self) -> String {
        let opt = |v: &Option<String>| v.clone().unwrap_or_else(|| "-".into());
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}",
            self.pattern,
            self.k,
            self.m,
            self.d,
            self.method,
            opt(&self.x),
            opt(&self.t),
            opt(&self.setup),
            opt(&self.update),
            opt(&self.check),
            self.exponent,
            self.decimal,
            self.achieved.map_or_else(|| "-".into(), |a| format!("{a:.6}"))
        )
    }
}

fn f(v: Rational64) -> f64 {
    v.to_f64().expect("small rational")
}

/// Walk exponents `(S, U, C)` at `r = n^x` and whether `C < S = U`.
pub fn walk_dominance(k: usize, d: usize, x: Rational64) -> ([Rational64; 3], bool) {
    let e = quantum_walk_costs(k, d).exponents_at(x);
    (e, e[2] < e[0] && e[0] == e[1])
}

/// Rows: the walk at `r = n^{1−1/k}`, the walk at its balanced `x`, both
/// constructions, and the better of the two. With `n`, the construction
/// rows also carry the numerically achieved exponent.
pub fn compare_with_walk(h: &PatternGraph, name: &str, n: Option<f64>, grid: Grid) -> Result<Vec<CompareRow>, OptimizerError> {
    check_pattern(h)?;
    let (k, m, d) = (h.k(), h.m(), h.min_degree());
    let base = |method: &str| CompareRow {
        pattern: name.to_string(),
        k,
        m,
        d,
        method: method.to_string(),
        x: None,
        t: None,
        setup: None,
        update: None,
        check: None,
        exponent: String::new(),
        decimal: 0.0,
        achieved: None,
    };
    let mut rows = Vec::new();
    let one = Rational64::from_integer(1);
    for (method, x) in [
        ("walk", one - ratio(1, k as i64)),
        ("walk-balanced", ratio(d as i64 + 1, d as i64 + 3)),
    ] {
        let (e, _) = walk_dominance(k, d, x);
        let total = e.iter().copied().max().expect("three terms");
        if method == "walk" {
            debug_assert_eq!(total, Rational64::from_integer(2) - ratio(2, k as i64));
        }
        let mut row = base(method);
        row.x = Some(fmt_ratio(x));
        row.setup = Some(fmt_ratio(e[0]));
        row.update = Some(fmt_ratio(e[1]));
        row.check = Some(fmt_ratio(e[2]));
        row.exponent = fmt_ratio(total);
        row.decimal = f(total);
        rows.push(row);
    }
    let plans = [("g1", g1_stage_specs(h, k)?), ("g2", g2_plan(h)?)];
    for (method, plan) in &plans {
        let bal = balance_plan(plan)?;
        let expected = if *method == "g1" {
            theorem1_exponent(k, m)
        } else {
            theorem2_exponent(k, d, m)
        };
        debug_assert_eq!(bal.solution.total, expected);
        let mut row = base(method);
        row.x = Some(fmt_ratio(bal.solution.x));
        row.t = Some(fmt_ratio(bal.solution.t));
        row.exponent = fmt_ratio(bal.solution.total);
        row.decimal = f(bal.solution.total);
        if let Some(n) = n {
            row.achieved = Some(numeric_optimize(plan, n, Objective::Max, grid)?.log_n);
        }
        rows.push(row);
    }
    let th = theorem3_exponent(h)?;
    let mut row = base("best");
    row.t = Some(fmt_ratio(th.t));
    row.exponent = fmt_ratio(th.total);
    row.decimal = f(th.total);
    rows.push(row);
    Ok(rows)
}
