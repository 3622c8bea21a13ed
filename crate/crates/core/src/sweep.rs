//! Critical error rate over a visibility grid, and its CSV form.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hom::delta_from_visibility;
use crate::optimize::linspace;
use crate::rates::{critical_qber, RateOptions};
use crate::strategies::Strategy;

pub const CSV_HEADER: &str = "strategy,V,delta,critical_qber,opt_p_filter,opt_attack_param";

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub strategy: Strategy,
    pub visibility: f64,
    pub delta: f64,
    pub critical_qber: f64,
    pub opt_p_filter: f64,
    pub opt_attack_param: f64,
}

impl SweepRow {
    pub fn compute(
        strategy: Strategy,
        visibility: f64,
        tol: f64,
        options: RateOptions,
    ) -> Result<Self> {
        let c = critical_qber(strategy, visibility, tol, options)?;
        Ok(Self {
            strategy,
            visibility,
            delta: delta_from_visibility(visibility)?,
            critical_qber: c.critical_qber,
            opt_p_filter: c.p_filter,
            opt_attack_param: c.attack_param,
        })
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            self.strategy,
            self.visibility,
            self.delta,
            self.critical_qber,
            self.opt_p_filter,
            self.opt_attack_param
        )
    }
}

/// `steps` evenly spaced visibilities on `[v_min, v_max]`.
pub fn visibility_grid(v_min: f64, v_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(v_min.is_finite() && v_max.is_finite() && 0.0 <= v_min && v_min < v_max && v_max <= 1.0) {
        return Err(Error::OutOfRange {
            name: "V range",
            value: v_min,
            range: "0 <= v_min < v_max <= 1",
        });
    }
    if steps < 2 {
        return Err(Error::OutOfRange {
            name: "steps",
            value: steps as f64,
            range: ">= 2",
        });
    }
    Ok(linspace(v_min, v_max, steps))
}

/// Sort by strategy, then visibility.
pub fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| {
        a.strategy
            .name()
            .cmp(b.strategy.name())
            .then(a.visibility.total_cmp(&b.visibility))
    });
}

/// Header plus one LF-terminated line per row, in the given order.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(out, "{}", r.to_csv_line()).expect("writing to a String");
    }
    out
}

/// Sequential sweep over every (strategy, V) pair, sorted.
pub fn sweep(
    strategies: &[Strategy],
    visibilities: &[f64],
    tol: f64,
    options: RateOptions,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(strategies.len() * visibilities.len());
    for &s in strategies {
        for &v in visibilities {
            rows.push(SweepRow::compute(s, v, tol, options)?);
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}
