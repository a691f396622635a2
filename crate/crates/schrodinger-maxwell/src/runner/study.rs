//! Multi-run studies: the Table 1 comparison and grid-refinement sweeps.

use super::config::{ScenarioConfig, Scheme};
use super::pipeline::{run, RunOutput};
use super::{evaluate_checks, presets, CheckOutcome, RunError};
use crate::diagnostics::{observed_order, DiagnosticsReport, Table1Row, TABLE1_QLA};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table1Overrides {
    pub t_final: Option<f64>,
    pub m: Option<usize>,
    pub n: Option<usize>,
}

impl Table1Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(t) = self.t_final {
            cfg.t_final = t;
        }
        if let Some(m) = self.m {
            cfg.grid.m = m;
        }
        if let Some(n) = self.n {
            cfg.pgrid.n = n;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Entry {
    pub label: String,
    pub measured: Option<Table1Row>,
    pub paper: Table1Row,
    pub checks: Vec<CheckOutcome>,
}

impl Table1Entry {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1 {
    pub entries: Vec<Table1Entry>,
}

fn row_of(r: &DiagnosticsReport) -> Table1Row {
    Table1Row {
        energy_drift: r.energy_drift,
        div_b_drift: r.div_b_drift,
        gauss_f4: r.gauss_f4,
        gauss_f8: r.gauss_f8,
        err_eb: r.err_eb,
    }
}

/// Runs the periodic TM scenario with the spectral and the Yee scheme.
pub fn table1(ov: &Table1Overrides) -> Result<Table1, RunError> {
    let mut entries = vec![Table1Entry {
        label: "QLA".into(),
        measured: None,
        paper: TABLE1_QLA,
        checks: Vec::new(),
    }];
    for (label, preset) in [("schr1", "periodic-2d-tm"), ("schr2", "periodic-2d-tm-yee")] {
        let mut cfg = presets::load(preset)?;
        ov.apply(&mut cfg);
        cfg.validate()?;
        let out = run(&cfg)?;
        entries.push(Table1Entry {
            label: label.into(),
            measured: Some(row_of(&out.report)),
            paper: out.paper_reference.expect("table scenario has a paper row"),
            checks: evaluate_checks(&out),
        });
    }
    Ok(Table1 { entries })
}

fn cell(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.2e}"))
}

impl Table1 {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(Table1Entry::pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<14} {:>10} {:>12} {:>10} {:>10} {:>10}",
            "scheme", "ΔE", "Δ(div B)", "F4", "F8", "err_EB"
        );
        let mut line = |label: &str, r: &Table1Row| {
            let _ = writeln!(
                s,
                "{:<14} {:>10} {:>12} {:>10} {:>10} {:>10}",
                label,
                cell(Some(r.energy_drift)),
                cell(r.div_b_drift),
                cell(r.gauss_f4),
                cell(r.gauss_f8),
                cell(Some(r.err_eb))
            );
        };
        for e in &self.entries {
            if let Some(m) = &e.measured {
                line(&e.label, m);
            }
            line(&format!("{} (paper)", e.label), &e.paper);
        }
        for e in &self.entries {
            for c in &e.checks {
                let _ = writeln!(
                    s,
                    "{} {}: {} = {:.3e} {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    e.label,
                    c.name,
                    c.value,
                    c.limit
                );
            }
        }
        s
    }
}

/// What a sweep refines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Spatial points per direction; `h = L/m`.
    #[default]
    Space,
    /// Points of the `p` grid; `h = Δp`.
    P,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergencePoint {
    pub scheme: Scheme,
    pub level: usize,
    pub h: f64,
    pub err: f64,
    pub components: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchemeRates {
    pub scheme: Scheme,
    pub order: Option<f64>,
    /// Components whose error stays above roundoff at every level.
    pub component_orders: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub axis: SweepAxis,
    pub points: Vec<ConvergencePoint>,
    pub rates: Vec<SchemeRates>,
    pub checks: Vec<CheckOutcome>,
}

const ROUNDOFF: f64 = 1e-13;

fn order_of(h: &[f64], e: &[f64]) -> Option<f64> {
    if e.iter().any(|v| !(*v > ROUNDOFF)) {
        return None;
    }
    observed_order(h, e).ok()
}

/// Runs `base` with every scheme at every level, `jobs` at a time.
pub fn convergence(
    base: &ScenarioConfig,
    schemes: &[Scheme],
    levels: &[usize],
    axis: SweepAxis,
    jobs: Option<usize>,
) -> Result<ConvergenceTable, RunError> {
    if levels.len() < 3 {
        return Err(RunError::Config(format!("a convergence sweep needs at least 3 levels, got {}", levels.len())));
    }
    if schemes.is_empty() {
        return Err(RunError::Config("no schemes to sweep".into()));
    }
    let mut cfgs = Vec::new();
    for &scheme in schemes {
        for &level in levels {
            let mut c = base.clone();
            c.scheme = scheme;
            c.name = format!("{}-{}-{level}", base.name, scheme.name());
            match axis {
                SweepAxis::Space => c.grid.m = level,
                SweepAxis::P => c.pgrid.n = level,
            }
            c.validate()?;
            cfgs.push(c);
        }
    }
    let exec = || cfgs.par_iter().map(run).collect::<Result<Vec<RunOutput>, RunError>>();
    let outs = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| RunError::Config(e.to_string()))?
            .install(exec)?,
        None => exec()?,
    };

    let points: Vec<ConvergencePoint> = outs
        .iter()
        .map(|o| {
            let c = &o.config;
            let (level, h) = match axis {
                SweepAxis::Space => (c.grid.m, c.grid.lengths[0] / c.grid.m as f64),
                SweepAxis::P => (c.pgrid.n, (c.pgrid.right - c.pgrid.left) / c.pgrid.n as f64),
            };
            ConvergencePoint {
                scheme: c.scheme,
                level,
                h,
                err: o.report.err_eb,
                components: o.details.component_errors.clone(),
            }
        })
        .collect();

    let mut rates = Vec::new();
    for &scheme in schemes {
        let pts: Vec<&ConvergencePoint> = points.iter().filter(|p| p.scheme == scheme).collect();
        let h: Vec<f64> = pts.iter().map(|p| p.h).collect();
        let e: Vec<f64> = pts.iter().map(|p| p.err).collect();
        let mut component_orders = BTreeMap::new();
        for name in pts[0].components.keys() {
            let ce: Vec<f64> = pts.iter().map(|p| p.components.get(name).copied().unwrap_or(0.0)).collect();
            if let Some(o) = order_of(&h, &ce) {
                component_orders.insert(name.clone(), o);
            }
        }
        rates.push(SchemeRates { scheme, order: order_of(&h, &e), component_orders });
    }

    let mut checks = Vec::new();
    if axis == SweepAxis::Space {
        if let Some(r) = rates.iter().find(|r| r.scheme == Scheme::UpwindChar) {
            checks.push(CheckOutcome::within("upwind_char order", r.order.unwrap_or(f64::NAN), 0.7, 1.3));
        }
        if schemes.contains(&Scheme::UpwindChar) && schemes.contains(&Scheme::Yee1d) {
            for &level in levels {
                let at = |s| points.iter().find(|p| p.scheme == s && p.level == level).map(|p| p.err);
                let (y, u) = (at(Scheme::Yee1d).unwrap(), at(Scheme::UpwindChar).unwrap());
                checks.push(CheckOutcome {
                    name: format!("yee_1d < upwind_char at m = {level}"),
                    value: y,
                    limit: format!("< {u:.3e}"),
                    pass: y < u,
                });
            }
        }
    }
    Ok(ConvergenceTable { axis, points, rates, checks })
}

impl ConvergenceTable {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let lvl = match self.axis {
            SweepAxis::Space => "m",
            SweepAxis::P => "n_p",
        };
        let _ = writeln!(s, "{:<24} {:>6} {:>12} {:>12}", "scheme", lvl, "h", "err");
        for p in &self.points {
            let _ = writeln!(s, "{:<24} {:>6} {:>12.4e} {:>12.4e}", p.scheme.name(), p.level, p.h, p.err);
        }
        for r in &self.rates {
            let _ = write!(s, "{}: order {}", r.scheme.name(), r.order.map_or("-".into(), |o| format!("{o:.3}")));
            for (k, v) in &r.component_orders {
                let _ = write!(s, ", {k} {v:.3}");
            }
            s.push('\n');
        }
        for c in &self.checks {
            let _ = writeln!(s, "{} {} = {:.3e} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
        }
        s
    }
}
