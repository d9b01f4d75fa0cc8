//! Sweep execution: one record per total time T, computed concurrently and
//! assembled in ascending T order.

use adiabatic::bounds::bound_report;
use adiabatic::pathsum::jump_contribution;
use adiabatic::propagator::evolve_adaptive;
use serde::{Deserialize, Serialize};

use crate::config::Resolved;
use crate::table::{Cell, Table};

/// One sweep row. Columns that were not requested, not applicable, or lost
/// to a per-record failure stay `None`; `status` is `"ok"` or the failure
/// message, so a single failing T never aborts the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "L_used")]
    pub l_used: Option<usize>,
    pub error_exact: Option<f64>,
    pub first_order_norm: Option<f64>,
    pub upper: Option<f64>,
    pub lower: Option<f64>,
    pub two_level_upper: Option<f64>,
    pub jrs: Option<f64>,
    pub delta0: Option<f64>,
    pub delta1: Option<f64>,
    #[serde(rename = "Gamma")]
    pub gamma: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub c1_norm: Option<f64>,
    pub c2_norm: Option<f64>,
    pub tail: Option<f64>,
    pub status: String,
}

/// CSV header, in field order.
pub const COLUMNS: &[&str] = &[
    "T",
    "L_used",
    "error_exact",
    "first_order_norm",
    "upper",
    "lower",
    "two_level_upper",
    "jrs",
    "delta0",
    "delta1",
    "Gamma",
    "R",
    "c1_norm",
    "c2_norm",
    "tail",
    "status",
];

impl SweepRecord {
    fn blank(t: f64) -> SweepRecord {
        SweepRecord {
            t,
            l_used: None,
            error_exact: None,
            first_order_norm: None,
            upper: None,
            lower: None,
            two_level_upper: None,
            jrs: None,
            delta0: None,
            delta1: None,
            gamma: None,
            r: None,
            c1_norm: None,
            c2_norm: None,
            tail: None,
            status: "ok".to_string(),
        }
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Num(self.t),
            Cell::opt_int(self.l_used),
            Cell::opt(self.error_exact),
            Cell::opt(self.first_order_norm),
            Cell::opt(self.upper),
            Cell::opt(self.lower),
            Cell::opt(self.two_level_upper),
            Cell::opt(self.jrs),
            Cell::opt(self.delta0),
            Cell::opt(self.delta1),
            Cell::opt(self.gamma),
            Cell::opt(self.r),
            Cell::opt(self.c1_norm),
            Cell::opt(self.c2_norm),
            Cell::opt(self.tail),
            Cell::Text(self.status.clone()),
        ]
    }
}

/// Compute the record for one T, honouring the requested output columns.
fn compute_record(cfg: &Resolved, t: f64) -> Result<SweepRecord, adiabatic::Error> {
    let model = cfg.model.build(t)?;
    let mut rec = SweepRecord::blank(t);
    if cfg.outputs.needs_report() {
        let report = bound_report(&model, t)?;
        if cfg.outputs.bounds {
            rec.upper = Some(report.upper);
            rec.lower = Some(report.lower);
            rec.two_level_upper = report.two_level_upper;
            rec.delta0 = Some(report.delta0);
            rec.delta1 = Some(report.delta1);
            rec.gamma = Some(report.gamma_factor);
            rec.r = Some(report.remainder);
            rec.tail = Some(report.tail);
        }
        if cfg.outputs.first_order {
            rec.first_order_norm = Some(report.leading_norm);
        }
        if cfg.outputs.jrs {
            rec.jrs = Some(report.jrs);
        }
    }
    if cfg.outputs.c1 {
        rec.c1_norm = Some(jump_contribution(&model, t, 1, cfg.quad_tol)?.norm);
    }
    if cfg.outputs.c2 {
        rec.c2_norm = Some(jump_contribution(&model, t, 2, cfg.quad_tol)?.norm);
    }
    if cfg.outputs.error {
        let run = evolve_adaptive(&model, t, cfg.rel_tol, cfg.schedule)?;
        rec.l_used = Some(run.l_used);
        rec.error_exact = Some(run.error);
    }
    Ok(rec)
}

/// Run the sweep over all configured T values. Entries execute on a worker
/// pool sized by the `jobs` setting (0 = automatic); results keep ascending
/// T order, and a failing entry yields an error-tagged record.
pub fn run_sweep(cfg: &Resolved) -> Result<Vec<SweepRecord>, crate::CliError> {
    let worker = |&t: &f64| {
        compute_record(cfg, t).unwrap_or_else(|e| {
            let mut rec = SweepRecord::blank(t);
            rec.status = e.to_string();
            rec
        })
    };
    if cfg.ts.len() <= 1 || cfg.jobs == 1 {
        return Ok(cfg.ts.iter().map(worker).collect());
    }
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| crate::CliError::Io(format!("worker pool: {e}")))?;
    Ok(pool.install(|| cfg.ts.par_iter().map(worker).collect()))
}

/// Lay sweep records out as a table.
pub fn records_table(records: &[SweepRecord]) -> Table {
    let mut table = Table::new(COLUMNS);
    for rec in records {
        table.push(rec.cells());
    }
    table
}
